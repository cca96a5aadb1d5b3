//! Symmetric indefinite `P A Pᵀ = L D Lᵀ` with Bunch–Kaufman partial pivoting
//! (1×1 and 2×2 diagonal blocks), on dense row-major storage.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const ALPHA: f64 = 0.640_388_203_202_208_0; // (1 + √17) / 8

#[derive(Debug, Clone)]
pub struct BunchKaufman {
    n: usize,
    /// Lower triangle: `L` below the diagonal, `D` on it (and at `(k+1, k)`
    /// for 2×2 blocks).
    a: Vec<f64>,
    /// `perm[i]` is the original index at position `i`.
    perm: Vec<usize>,
    /// `true` at `k` when a 2×2 block starts at `k`.
    two_by_two: Vec<bool>,
}

impl BunchKaufman {
    pub fn factor(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols());
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                a[i * n + j] = m[(i, j)];
            }
        }
        let mut bk = Self { n, a, perm: (0..n).collect(), two_by_two: vec![false; n] };
        bk.run();
        bk
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        // symmetric read from the lower triangle
        if i >= j {
            self.a[i * self.n + j]
        } else {
            self.a[j * self.n + i]
        }
    }

    fn swap(&mut self, k: usize, p: usize) {
        if k == p {
            return;
        }
        let n = self.n;
        debug_assert!(k < p);
        for j in 0..k {
            self.a.swap(k * n + j, p * n + j);
        }
        for j in k + 1..p {
            self.a.swap(j * n + k, p * n + j);
        }
        for i in p + 1..n {
            self.a.swap(i * n + k, i * n + p);
        }
        self.a.swap(k * n + k, p * n + p);
        self.perm.swap(k, p);
    }

    fn run(&mut self) {
        let n = self.n;
        let mut col = vec![0.0; n];
        let mut col2 = vec![0.0; n];
        let mut k = 0;
        while k < n {
            let absakk = self.at(k, k).abs();
            let (mut imax, mut colmax) = (k, 0.0);
            for i in k + 1..n {
                let v = self.at(i, k).abs();
                if v > colmax {
                    colmax = v;
                    imax = i;
                }
            }
            if absakk.max(colmax) == 0.0 {
                // zero column: a zero 1×1 pivot, nothing to eliminate
                k += 1;
                continue;
            }
            let mut two = false;
            let mut pivot = k;
            if absakk < ALPHA * colmax {
                let rowmax = (k..n).filter(|&j| j != imax).map(|j| self.at(imax, j).abs()).fold(0.0, f64::max);
                if absakk * rowmax >= ALPHA * colmax * colmax {
                    pivot = k;
                } else if self.at(imax, imax).abs() >= ALPHA * rowmax {
                    pivot = imax;
                } else {
                    two = true;
                    pivot = imax;
                }
            }
            if !two {
                self.swap(k, pivot);
                let d = self.at(k, k);
                for i in k + 1..n {
                    col[i] = self.a[i * n + k];
                }
                for i in k + 1..n {
                    let l = col[i] / d;
                    if l != 0.0 {
                        let row = &mut self.a[i * n + k + 1..=i * n + i];
                        for (r, c) in row.iter_mut().zip(&col[k + 1..=i]) {
                            *r -= l * c;
                        }
                    }
                    self.a[i * n + k] = l;
                }
                k += 1;
            } else {
                self.swap(k + 1, pivot);
                self.two_by_two[k] = true;
                let (d11, d21, d22) = (self.at(k, k), self.at(k + 1, k), self.at(k + 1, k + 1));
                let det = d11 * d22 - d21 * d21;
                for i in k + 2..n {
                    col[i] = self.a[i * n + k];
                    col2[i] = self.a[i * n + k + 1];
                }
                for i in k + 2..n {
                    // [l1 l2] = [a_ik a_i,k+1] D⁻¹
                    let l1 = (col[i] * d22 - col2[i] * d21) / det;
                    let l2 = (col2[i] * d11 - col[i] * d21) / det;
                    let row = &mut self.a[i * n + k + 2..=i * n + i];
                    for ((r, c1), c2) in row.iter_mut().zip(&col[k + 2..=i]).zip(&col2[k + 2..=i]) {
                        *r -= l1 * c1 + l2 * c2;
                    }
                    self.a[i * n + k] = l1;
                    self.a[i * n + k + 1] = l2;
                }
                k += 2;
            }
        }
    }

    /// `(negative, zero, positive)` counts of `D`, equal to those of `A` by
    /// Sylvester's law of inertia.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let n = self.n;
        let (mut neg, mut zero, mut pos) = (0, 0, 0);
        let mut k = 0;
        while k < n {
            if self.two_by_two[k] {
                let (a, b, c) = (self.at(k, k), self.at(k + 1, k), self.at(k + 1, k + 1));
                let det = a * c - b * b;
                if det < 0.0 {
                    neg += 1;
                    pos += 1;
                } else if det > 0.0 {
                    if a + c < 0.0 {
                        neg += 2;
                    } else {
                        pos += 2;
                    }
                } else {
                    zero += 1;
                    if a + c < 0.0 {
                        neg += 1;
                    } else {
                        pos += 1;
                    }
                }
                k += 2;
            } else {
                let d = self.at(k, k);
                if d < 0.0 {
                    neg += 1;
                } else if d > 0.0 {
                    pos += 1;
                } else {
                    zero += 1;
                }
                k += 1;
            }
        }
        (neg, zero, pos)
    }

    /// Solves `A x = b`; errors on a singular `D`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L z = y
        let mut k = 0;
        while k < n {
            let width = if self.two_by_two[k] { 2 } else { 1 };
            for c in k..k + width {
                let v = y[c];
                if v != 0.0 {
                    for i in k + width..n {
                        y[i] -= self.a[i * n + c] * v;
                    }
                }
            }
            k += width;
        }
        // D w = z
        let mut k = 0;
        while k < n {
            if self.two_by_two[k] {
                let (a, b, c) = (self.at(k, k), self.at(k + 1, k), self.at(k + 1, k + 1));
                let det = a * c - b * b;
                if det == 0.0 {
                    return Err(Error::Breakdown { index: k, value: 0.0 });
                }
                let (y0, y1) = (y[k], y[k + 1]);
                y[k] = (c * y0 - b * y1) / det;
                y[k + 1] = (a * y1 - b * y0) / det;
                k += 2;
            } else {
                let d = self.at(k, k);
                if d == 0.0 {
                    return Err(Error::Breakdown { index: k, value: 0.0 });
                }
                y[k] /= d;
                k += 1;
            }
        }
        // Lᵀ x = w
        let mut k = n;
        while k > 0 {
            let start = if k >= 2 && self.two_by_two[k - 2] { k - 2 } else { k - 1 };
            let width = k - start;
            for c in start..k {
                let mut s = 0.0;
                for i in start + width..n {
                    s += self.a[i * n + c] * y[i];
                }
                y[c] -= s;
            }
            k = start;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }
}

/// Inertia of a dense symmetric matrix.
pub fn dense_inertia(m: &DMatrix<f64>) -> (usize, usize, usize) {
    BunchKaufman::factor(m).inertia()
}
