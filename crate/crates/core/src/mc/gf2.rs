//! Dense bit matrices and linear algebra over GF(2).

use rand::Rng;

/// Row-major bit matrix packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.bits[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.bits[r * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] ^= 1u64 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self · x` over GF(2).
    pub fn mul_vec(&self, x: &[u8]) -> Vec<u8> {
        assert_eq!(x.len(), self.cols);
        let mut packed = vec![0u64; self.words];
        for (c, &b) in x.iter().enumerate() {
            if b & 1 == 1 {
                packed[c / 64] |= 1u64 << (c % 64);
            }
        }
        (0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect()
    }

    /// `row[dst] ^= row[src]`.
    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.bits.split_at_mut(src * w);
            (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
        } else {
            let (lo, hi) = self.bits.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..(src + 1) * w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.bits.swap(a * w + k, b * w + k);
        }
    }
}

/// Reduced row echelon form of a parity-check matrix, used to enumerate or
/// sample its null space.
#[derive(Clone, Debug)]
pub struct Gf2Solver {
    rref: BitMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl Gf2Solver {
    pub fn new(h: &BitMatrix) -> Self {
        let mut m = h.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(row, p);
            for r in 0..m.rows {
                if r != row && m.get(r, col) {
                    m.xor_rows(r, row);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let mut is_pivot = vec![false; m.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free = (0..m.cols).filter(|&c| !is_pivot[c]).collect();
        Gf2Solver {
            rref: m,
            pivots,
            free,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Dimension of the null space.
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// The null-space vector with the given free-variable assignment.
    pub fn solution(&self, free_bits: &[u8]) -> Vec<u8> {
        assert_eq!(free_bits.len(), self.free.len());
        let mut x = vec![0u8; self.rref.cols];
        for (&c, &b) in self.free.iter().zip(free_bits) {
            x[c] = b & 1;
        }
        for (r, &pc) in self.pivots.iter().enumerate() {
            let mut acc = 0u8;
            for &c in &self.free {
                if x[c] == 1 && self.rref.get(r, c) {
                    acc ^= 1;
                }
            }
            x[pc] = acc;
        }
        x
    }

    /// A basis of the null space, one vector per free column.
    pub fn basis(&self) -> Vec<Vec<u8>> {
        (0..self.free.len())
            .map(|k| {
                let mut bits = vec![0u8; self.free.len()];
                bits[k] = 1;
                self.solution(&bits)
            })
            .collect()
    }

    /// A uniformly random element of the null space.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        let bits: Vec<u8> = (0..self.free.len())
            .map(|_| rng.gen::<bool>() as u8)
            .collect();
        self.solution(&bits)
    }
}
