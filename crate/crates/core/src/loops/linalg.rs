//! Dense complex LU with partial pivoting.
//!
//! Sized for the small systems of the Birkhoff solver (2(M+1) square, so 26
//! unknowns at the default truncation); no blocking, no external BLAS.

use num_complex::Complex64;

pub struct Lu {
    n: usize,
    a: Vec<Complex64>,
    piv: Vec<usize>,
    cond_proxy: f64,
}

impl Lu {
    /// Factor a row-major `n x n` matrix. Returns `None` on an exactly zero
    /// pivot column.
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Option<Lu> {
        assert_eq!(a.len(), n * n);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for r in k + 1..n {
                let v = a[r * n + k].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if best == 0.0 {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] * inv;
                a[r * n + k] = f;
                for c in k + 1..n {
                    let u = a[k * n + c];
                    a[r * n + c] -= f * u;
                }
            }
        }
        let mut dmax = 0.0f64;
        let mut dmin = f64::INFINITY;
        for k in 0..n {
            let v = a[k * n + k].norm();
            dmax = dmax.max(v);
            dmin = dmin.min(v);
        }
        let cond_proxy = if dmin == 0.0 { f64::INFINITY } else { dmax / dmin };
        Some(Lu { n, a, piv, cond_proxy })
    }

    /// Ratio of extreme pivot magnitudes; a cheap growth indicator used to
    /// flag near-singular systems.
    pub fn cond_proxy(&self) -> f64 {
        self.cond_proxy
    }

    /// Solve in place: `b := A^{-1} b`.
    pub fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for k in 1..n {
            for j in 0..k {
                let l = self.a[k * n + j];
                let y = b[j];
                b[k] -= l * y;
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let u = self.a[k * n + j];
                let x = b[j];
                b[k] -= u * x;
            }
            b[k] /= self.a[k * n + k];
        }
    }
}
