/// Dense matrix over F_p, row-major, entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Self {
        FpMatrix { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    /// Rank by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let p = self.p;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for c in 0..cols {
                    m.swap(pivot * cols + c, rank * cols + c);
                }
            }
            let inv = inv_mod(m[rank * cols + col], p);
            for c in col..cols {
                m[rank * cols + c] = m[rank * cols + c] * inv % p;
            }
            for r in 0..rows {
                let f = m[r * cols + col];
                if r != rank && f != 0 {
                    for c in col..cols {
                        let sub = f * m[rank * cols + c] % p;
                        m[r * cols + c] = (m[r * cols + c] + p - sub) % p;
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Inverse modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}
