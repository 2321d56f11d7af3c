//! Banded LU with partial pivoting (the LAPACK `gbtrf`/`gbtrs` layout).

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Storage keeps
/// `kl` extra super-diagonals for fill-in produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // column-major band storage, row offset kl + ku + i - j
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i <= j + self.kl && j <= i + self.ku, "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > j + self.kl || j > i + self.ku {
            0.0
        } else {
            self.ab[self.idx(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            for j in j0..=j1 {
                *yi += self.ab[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    /// Factorizes in place and solves `A x = b`; `b` is overwritten by `x`.
    pub fn solve_in_place(self, b: &mut [f64]) -> Result<()> {
        self.factorize()?.solve(b);
        Ok(())
    }

    pub fn factorize(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut piv = vec![0usize; n];
        // current rightmost column reachable by row j after pivoting
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.ab[self.idx(j, j)].abs();
            for i in j + 1..=j + km {
                let v = self.ab[self.idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[j] = p;
            if best == 0.0 {
                return Err(Error::NonConvergence(format!(
                    "singular banded matrix at column {j}"
                )));
            }
            ju = ju.max((j + ku + p - j).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let a = self.idx(j, c);
                    let bq = self.idx(p, c);
                    self.ab.swap(a, bq);
                }
            }
            let pivot = self.ab[self.idx(j, j)];
            for i in j + 1..=j + km {
                let l = self.ab[self.idx(i, j)] / pivot;
                let li = self.idx(i, j);
                self.ab[li] = l;
                if l != 0.0 {
                    for c in j + 1..=ju {
                        let src = self.ab[self.idx(j, c)];
                        let dst = self.idx(i, c);
                        self.ab[dst] -= l * src;
                    }
                }
            }
        }
        Ok(BandedLu { m: self, piv })
    }
}

/// LU factors of a [`BandedMatrix`], reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
    piv: Vec<usize>,
}

impl BandedLu {
    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        // forward: apply interchanges and L
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            for i in j + 1..=j + km {
                b[i] -= m.ab[m.idx(i, j)] * bj;
            }
        }
        // backward: U has bandwidth kl + ku
        for j in (0..n).rev() {
            let mut s = b[j];
            let c1 = (j + kl + ku).min(n - 1);
            for c in j + 1..=c1 {
                s -= m.ab[m.idx(j, c)] * b[c];
            }
            b[j] = s / m.ab[m.idx(j, j)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_indefinite_banded_system() {
        // 1-D Laplacian shifted into indefiniteness, bandwidth 2 to exercise pivoting
        let n = 30;
        let mut a = BandedMatrix::zeros(n, 2, 2);
        for i in 0..n {
            a.add(i, i, 2.0 - 1.5);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
            if i + 2 < n {
                a.add(i, i + 2, 0.3 * (i as f64).sin());
                a.add(i + 2, i, 0.7);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut b = a.mul_vec(&x_true);
        a.solve_in_place(&mut b).unwrap();
        for (x, t) in b.iter().zip(&x_true) {
            assert!((x - t).abs() < 1e-10, "{x} vs {t}");
        }
    }

    #[test]
    fn zero_pivot_column_needs_swap() {
        let mut a = BandedMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let mut b = vec![3.0, 5.0];
        a.solve_in_place(&mut b).unwrap();
        assert_eq!(b, vec![5.0, 3.0]);
    }
}
