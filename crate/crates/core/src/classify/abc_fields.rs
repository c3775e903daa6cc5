//! Taylor tables of the frame-coefficient fields about a diagonal point.
//!
//! Flatness of the frame form forces, on the coordinate strip,
//!
//! ```text
//! A_y = 0,   c_y = A·a,   a_x = b·c,   b_x = −a·c,
//! ```
//!
//! and along the diagonal d/dt = ∂_x + ∂_y. Together these determine every
//! partial derivative of (a, b, c) at (t₀, t₀) from the curve derivatives
//! alone. The recognition criteria consume the tables of σ = −A·a and of its
//! iterated derivatives along the null field η = b ∂_x − A ∂_y.

use crate::cauchy::AbcData;

/// Partial-derivative table: entry `[i][j]` is ∂_x^i ∂_y^j at the point.
pub(crate) type Table = [[f64; 4]; 4];

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

/// `(f·g)` partial at `(i, j)` by the Leibniz rule, from tables of partials.
fn product_entry(f: &Table, g: &Table, i: usize, j: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..=i {
        for l in 0..=j {
            s += BINOM[i][k] * BINOM[j][l] * f[k][l] * g[i - k][j - l];
        }
    }
    s
}

/// Field tables at (t₀, t₀), valid through total order 3 for `a` and `sigma`
/// and total order 2 for `b` and `c`.
pub(crate) struct DiagonalFields {
    pub a: Table,
    pub b: Table,
    pub c: Table,
    /// A^{(k)}(t₀); A depends on x only.
    pub big_a: [f64; 4],
    /// σ = −A·a.
    pub sigma: Table,
}

impl DiagonalFields {
    pub fn at(d: &AbcData, t0: f64) -> DiagonalFields {
        let da: Vec<f64> = (0..4).map(|k| d.a.derivative_at(k, t0)).collect();
        let db: Vec<f64> = (0..3).map(|k| d.b.derivative_at(k, t0)).collect();
        let dc: Vec<f64> = (0..3).map(|k| d.c.derivative_at(k, t0)).collect();
        let big_a = [
            d.big_a.derivative_at(0, t0),
            d.big_a.derivative_at(1, t0),
            d.big_a.derivative_at(2, t0),
            d.big_a.derivative_at(3, t0),
        ];

        let mut a: Table = [[0.0; 4]; 4];
        let mut b: Table = [[0.0; 4]; 4];
        let mut c: Table = [[0.0; 4]; 4];

        a[0][0] = da[0];
        b[0][0] = db[0];
        c[0][0] = dc[0];

        // Order 1: x-partials from the field equations, then the y-partial
        // is whatever the diagonal derivative leaves over.
        a[1][0] = b[0][0] * c[0][0];
        a[0][1] = da[1] - a[1][0];
        b[1][0] = -a[0][0] * c[0][0];
        b[0][1] = db[1] - b[1][0];
        c[0][1] = big_a[0] * a[0][0];
        c[1][0] = dc[1] - c[0][1];

        // Order 2.
        a[2][0] = b[1][0] * c[0][0] + b[0][0] * c[1][0];
        a[1][1] = b[0][1] * c[0][0] + b[0][0] * c[0][1];
        a[0][2] = da[2] - a[2][0] - 2.0 * a[1][1];
        b[2][0] = -(a[1][0] * c[0][0] + a[0][0] * c[1][0]);
        b[1][1] = -(a[0][1] * c[0][0] + a[0][0] * c[0][1]);
        b[0][2] = db[2] - b[2][0] - 2.0 * b[1][1];
        c[0][2] = big_a[0] * a[0][1];
        c[1][1] = big_a[1] * a[0][0] + big_a[0] * a[1][0];
        c[2][0] = dc[2] - 2.0 * c[1][1] - c[0][2];

        // Order 3 is only needed for a (σ must reach third order).
        a[3][0] = b[2][0] * c[0][0] + 2.0 * b[1][0] * c[1][0] + b[0][0] * c[2][0];
        a[2][1] = b[1][1] * c[0][0] + b[1][0] * c[0][1] + b[0][1] * c[1][0] + b[0][0] * c[1][1];
        a[1][2] = b[0][2] * c[0][0] + 2.0 * b[0][1] * c[0][1] + b[0][0] * c[0][2];
        a[0][3] = da[3] - a[3][0] - 3.0 * a[2][1] - 3.0 * a[1][2];

        let mut sigma: Table = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 - i {
                let mut s = 0.0;
                for k in 0..=i {
                    s += BINOM[i][k] * big_a[k] * a[i - k][j];
                }
                sigma[i][j] = -s;
            }
        }

        DiagonalFields { a, b, c, big_a, sigma }
    }

    fn big_a_table(&self) -> Table {
        let mut t: Table = [[0.0; 4]; 4];
        for i in 0..4 {
            t[i][0] = self.big_a[i];
        }
        t
    }

    /// Table of η(f) = b·f_x − A·f_y through total order `max`; `f` must be
    /// valid through `max + 1`.
    pub fn eta_apply(&self, f: &Table, max: usize) -> Table {
        debug_assert!(max <= 2);
        let shift_x = |f: &Table| -> Table {
            let mut t: Table = [[0.0; 4]; 4];
            for i in 0..3 {
                for j in 0..4 - i - 1 {
                    t[i][j] = f[i + 1][j];
                }
            }
            t
        };
        let shift_y = |f: &Table| -> Table {
            let mut t: Table = [[0.0; 4]; 4];
            for i in 0..3 {
                for j in 0..4 - i - 1 {
                    t[i][j] = f[i][j + 1];
                }
            }
            t
        };
        let fx = shift_x(f);
        let fy = shift_y(f);
        let atab = self.big_a_table();
        let mut out: Table = [[0.0; 4]; 4];
        for i in 0..=max {
            for j in 0..=max - i {
                out[i][j] = product_entry(&self.b, &fx, i, j) - product_entry(&atab, &fy, i, j);
            }
        }
        out
    }

    /// Values of ησ, ηησ, ηηησ at the point.
    pub fn eta_chain(&self) -> (f64, f64, f64) {
        let g1 = self.eta_apply(&self.sigma, 2);
        let g2 = self.eta_apply(&g1, 1);
        let g3 = self.eta_apply(&g2, 0);
        (g1[0][0], g2[0][0], g3[0][0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::ScalarCurve;

    fn data(a: ScalarCurve, b: ScalarCurve, c: ScalarCurve) -> AbcData {
        AbcData::unit_speed(a, b, c, (-1.0, 1.0))
    }

    #[test]
    fn linear_a_reconstructs_first_order() {
        let d = data(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.0),
        );
        let f = DiagonalFields::at(&d, 0.0);
        assert_eq!(f.a[0][0], 0.0);
        assert_eq!(f.a[1][0], 0.0);
        assert_eq!(f.a[0][1], 1.0);
        assert_eq!(f.sigma[0][1], -1.0);
        let (g1, _, _) = f.eta_chain();
        // η = −∂x − ∂y here, so ησ = a′.
        assert_eq!(g1, 1.0);
    }

    #[test]
    fn quadratic_a_gives_degenerate_gradient_and_hessian() {
        let d = data(
            ScalarCurve::poly(vec![0.0, 0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::poly(vec![0.0, 1.0]),
        );
        let f = DiagonalFields::at(&d, 0.0);
        assert_eq!(f.sigma[1][0], 0.0);
        assert_eq!(f.sigma[0][1], 0.0);
        assert_eq!(f.sigma[2][0], 1.0);
        assert_eq!(f.sigma[1][1], 0.0);
        assert_eq!(f.sigma[0][2], -3.0);
        let (g1, g2, _) = f.eta_chain();
        assert_eq!(g1, 0.0);
        assert_eq!(g2, -2.0);
    }

    #[test]
    fn chain_rule_consistency_against_shifted_expansion() {
        // a(t) = t + t³, b(t) = −1 + t², c(t) = t − t²: check the diagonal
        // derivative identity d/dt = ∂x + ∂y on the reconstructed tables by
        // re-summing rows against the curve derivatives.
        let d = data(
            ScalarCurve::poly(vec![0.0, 1.0, 0.0, 1.0]),
            ScalarCurve::poly(vec![-1.0, 0.0, 1.0]),
            ScalarCurve::poly(vec![0.0, 1.0, -1.0]),
        );
        let t0 = 0.3;
        let f = DiagonalFields::at(&d, t0);
        let a1 = d.a.derivative_at(1, t0);
        let a2 = d.a.derivative_at(2, t0);
        let a3 = d.a.derivative_at(3, t0);
        assert!((f.a[1][0] + f.a[0][1] - a1).abs() < 1e-12);
        assert!((f.a[2][0] + 2.0 * f.a[1][1] + f.a[0][2] - a2).abs() < 1e-12);
        let sum3 = f.a[3][0] + 3.0 * f.a[2][1] + 3.0 * f.a[1][2] + f.a[0][3];
        assert!((sum3 - a3).abs() < 1e-12);

        let b2 = d.b.derivative_at(2, t0);
        assert!((f.b[2][0] + 2.0 * f.b[1][1] + f.b[0][2] - b2).abs() < 1e-12);
        let c2 = d.c.derivative_at(2, t0);
        assert!((f.c[2][0] + 2.0 * f.c[1][1] + f.c[0][2] - c2).abs() < 1e-12);
    }

    #[test]
    fn non_unit_big_a_scales_sigma() {
        let d = AbcData {
            a: ScalarCurve::poly(vec![0.0, 1.0]),
            b: ScalarCurve::constant(-1.0),
            c: ScalarCurve::constant(0.0),
            big_a: ScalarCurve::constant(2.0),
            interval: (-1.0, 1.0),
        };
        let f = DiagonalFields::at(&d, 0.0);
        assert_eq!(f.sigma[0][1], -2.0);
        // c_y = A·a picks up the factor as well.
        let d2 = AbcData {
            a: ScalarCurve::constant(0.5),
            b: ScalarCurve::constant(-1.0),
            c: ScalarCurve::constant(0.0),
            big_a: ScalarCurve::constant(2.0),
            interval: (-1.0, 1.0),
        };
        let f2 = DiagonalFields::at(&d2, 0.0);
        assert_eq!(f2.c[0][1], 1.0);
        assert_eq!(f2.c[1][0], -1.0);
    }
}
