//! Incremental Gaussian elimination over GF(2) for random linear network
//! coding. Coefficient vectors are bit-packed into `u64` words; each row
//! carries a payload of up to 32 bits that is combined alongside it.

/// Online decoder for `k` unknown symbols.
#[derive(Debug, Clone)]
pub struct Gf2Decoder {
    k: usize,
    words: usize,
    /// `pivots[c]` holds the row whose lowest set coefficient is `c`.
    pivots: Vec<Option<(Vec<u64>, u32)>>,
    rank: usize,
}

impl Gf2Decoder {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            words: k.div_ceil(64),
            pivots: vec![None; k],
            rank: 0,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_complete(&self) -> bool {
        self.rank == self.k
    }

    /// Add one equation `sum_j coeffs[j] * x_j = payload`. Returns whether it
    /// increased the rank.
    pub fn insert(&mut self, coeffs: &[u64], payload: u32) -> bool {
        assert_eq!(
            coeffs.len(),
            self.words,
            "coefficient vector has the wrong width"
        );
        let mut row = coeffs.to_vec();
        let mut value = payload;
        for w in 0..self.words {
            while row[w] != 0 {
                let col = w * 64 + row[w].trailing_zeros() as usize;
                if col >= self.k {
                    // padding bits beyond k are ignored
                    row[w] &= !(1u64 << (col % 64));
                    continue;
                }
                match &self.pivots[col] {
                    Some((pivot, pv)) => {
                        // pivot has no bits below `col`, so earlier words stay clear
                        for (r, p) in row[w..].iter_mut().zip(&pivot[w..]) {
                            *r ^= *p;
                        }
                        value ^= *pv;
                    }
                    None => {
                        self.pivots[col] = Some((row, value));
                        self.rank += 1;
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Solve for all `k` symbols once the system has full rank.
    pub fn solve(&self) -> Option<Vec<u32>> {
        if !self.is_complete() {
            return None;
        }
        let mut x = vec![0u32; self.k];
        for col in (0..self.k).rev() {
            let (row, value) = self.pivots[col].as_ref().expect("full rank");
            let mut v = *value;
            for (w, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if j > col && j < self.k {
                        v ^= x[j];
                    }
                }
            }
            x[col] = v;
        }
        Some(x)
    }
}
