//! Small sample statistics used by the Monte Carlo checks.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
}

pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / a.len() as f64
}

/// Pearson correlation; 0 when either sample is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let denom = (variance(a) * variance(b)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        covariance(a, b) / denom
    }
}

/// One-sample Kolmogorov-Smirnov statistic against the uniform law on
/// `[lo, hi)`.
pub fn ks_uniform(xs: &[f64], lo: f64, hi: f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic for `n` samples.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// `x mod l`, folded into `[-l/2, l/2)`.
pub fn centered_mod(x: f64, l: f64) -> f64 {
    let r = x - l * (x / l).round();
    if r >= 0.5 * l {
        r - l
    } else if r < -0.5 * l {
        r + l
    } else {
        r
    }
}

/// Distance between two points on a circle of circumference `l`.
pub fn circular_distance(a: f64, b: f64, l: f64) -> f64 {
    centered_mod(a - b, l).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_a_perfect_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!(ks_uniform(&xs, 0.0, 1.0) <= 0.5 / n as f64 + 1e-12);
        let squeezed: Vec<f64> = xs.iter().map(|x| x * 0.5).collect();
        assert!((ks_uniform(&squeezed, 0.0, 1.0) - 0.5).abs() < 1e-2);
    }

    #[test]
    fn centered_mod_range() {
        assert_eq!(centered_mod(0.75, 1.0), -0.25);
        assert_eq!(centered_mod(-0.5, 1.0), -0.5);
        assert_eq!(centered_mod(0.5, 1.0), -0.5);
        assert!((centered_mod(3.2, 1.0) - 0.2).abs() < 1e-12);
        assert!(circular_distance(0.49, -0.49, 1.0) < 0.0200001);
    }

    #[test]
    fn moments() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 4.0, 6.0, 8.0];
        assert_eq!(mean(&a), 2.5);
        assert_eq!(variance(&a), 1.25);
        assert!((correlation(&a, &b) - 1.0).abs() < 1e-12);
        assert_eq!(correlation(&a, &[1.0; 4]), 0.0);
    }
}
