//! Lorentzian-harmonic maps into the plane.
//!
//! In null coordinates the wave equation N_xy = 0 has the d'Alembert
//! solution N(x, y) = (f₁(x) + g₁(y), f₂(x) + g₂(y)); the singular set Σ is
//! the zero set of the Jacobian determinant λ = f₁′(x)g₂′(y) − f₂′(x)g₁′(y).
//! The module is deliberately small: gridded evaluation of (N, dN, λ) plus
//! the pointwise facts about Σ that the classification of these maps rests
//! on (null lines inside Σ, the Morse data of λ, and the zero-2-jet
//! degeneracy λ = x²y²Λ, which rules out finite determinacy).

use crate::builder::Grid;
use crate::cauchy::ScalarCurve;
use crate::classify::{banded_condition, Condition, Verdict};
use serde::Serialize;

/// General solution of N_xy = 0 into ℝ²: a sum of one-variable maps,
/// N = (f₁(x) + g₁(y), f₂(x) + g₂(y)).
#[derive(Clone)]
pub struct PlanarWaveMap {
    pub f1: ScalarCurve,
    pub f2: ScalarCurve,
    pub g1: ScalarCurve,
    pub g2: ScalarCurve,
}

impl PlanarWaveMap {
    pub fn new(f1: ScalarCurve, f2: ScalarCurve, g1: ScalarCurve, g2: ScalarCurve) -> Self {
        PlanarWaveMap { f1, f2, g1, g2 }
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.f1.eval(x) + self.g1.eval(y),
            self.f2.eval(x) + self.g2.eval(y),
        ]
    }

    /// Jacobian [[∂x N₁, ∂y N₁], [∂x N₂, ∂y N₂]] row-major.
    pub fn jacobian(&self, x: f64, y: f64) -> [f64; 4] {
        [
            self.f1.derivative_at(1, x),
            self.g1.derivative_at(1, y),
            self.f2.derivative_at(1, x),
            self.g2.derivative_at(1, y),
        ]
    }

    pub fn lambda(&self, x: f64, y: f64) -> f64 {
        let j = self.jacobian(x, y);
        j[0] * j[3] - j[2] * j[1]
    }
}

/// Gridded map values, Jacobians, and λ; layout matches the builder fields
/// (index = iy·nx + ix).
pub struct PlanarField {
    pub grid: Grid,
    pub value: Vec<[f64; 2]>,
    pub jacobian: Vec<[f64; 4]>,
    pub lambda: Vec<f64>,
}

impl PlanarField {
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        self.grid.index(ix, iy)
    }
}

pub fn planar_eval(m: &PlanarWaveMap, grid: &Grid) -> PlanarField {
    // One-variable data is constant along the opposite axis: tabulate per
    // line, then combine.
    let fx: Vec<[f64; 4]> = grid
        .x()
        .iter()
        .map(|&x| {
            [
                m.f1.eval(x),
                m.f2.eval(x),
                m.f1.derivative_at(1, x),
                m.f2.derivative_at(1, x),
            ]
        })
        .collect();
    let gy: Vec<[f64; 4]> = grid
        .y()
        .iter()
        .map(|&y| {
            [
                m.g1.eval(y),
                m.g2.eval(y),
                m.g1.derivative_at(1, y),
                m.g2.derivative_at(1, y),
            ]
        })
        .collect();
    let n = grid.nx() * grid.ny();
    let mut out = PlanarField {
        grid: grid.clone(),
        value: Vec::with_capacity(n),
        jacobian: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
    };
    for g in &gy {
        for f in &fx {
            out.value.push([f[0] + g[0], f[1] + g[1]]);
            out.jacobian.push([f[2], g[2], f[3], g[3]]);
            out.lambda.push(f[2] * g[3] - f[3] * g[2]);
        }
    }
    out
}

/// Local structure of Σ at one point, per the appendix case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlanarStratum {
    /// λ ≠ 0: local diffeomorphism.
    Immersion,
    /// λ = 0, ∇λ ≠ 0: Σ is a smooth curve (fold series (x, xy ± y^k), …).
    SmoothSigma,
    /// λ = ∇λ = 0, det Hess λ ≠ 0: Σ is an isolated point or a transverse
    /// crossing.
    Morse,
    /// λ = ∇λ = 0 and the Hessian degenerates (λ_xx = 0 or λ_yy = 0 once
    /// λ_xy is forced to vanish).
    DegenerateMorse,
    /// j²N = 0: λ = x²y²Λ, never finitely determined.
    NotFinitelyDetermined,
    Unresolved,
}

/// Pointwise report: rank of dN, which null lines lie inside Σ, the Morse
/// data of λ, and the zero-2-jet flag.
#[derive(Debug, Clone, Serialize)]
pub struct PlanarReport {
    pub stratum: PlanarStratum,
    pub rank: u32,
    /// N_x vanishes at the point, so the whole null line x = x₀ lies in Σ.
    pub null_x_in_sigma: bool,
    /// N_y vanishes at the point, so the whole null line y = y₀ lies in Σ.
    pub null_y_in_sigma: bool,
    /// j²N = 0 at the point: λ = x²y²Λ and no finite determinacy.
    pub zero_two_jet: bool,
    pub conditions: Vec<Condition>,
}

impl PlanarReport {
    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

pub fn planar_stratum(m: &PlanarWaveMap, point: (f64, f64)) -> PlanarReport {
    let (x0, y0) = point;
    let f1: Vec<f64> = (1..=3).map(|k| m.f1.derivative_at(k, x0)).collect();
    let f2: Vec<f64> = (1..=3).map(|k| m.f2.derivative_at(k, x0)).collect();
    let g1: Vec<f64> = (1..=3).map(|k| m.g1.derivative_at(k, y0)).collect();
    let g2: Vec<f64> = (1..=3).map(|k| m.g2.derivative_at(k, y0)).collect();

    // ∂ᵏλ/∂xᵏ = f₁⁽ᵏ⁾g₂′ − f₂⁽ᵏ⁾g₁′ and symmetrically in y; the only mixed
    // second derivative is λ_xy = f₁″g₂″ − f₂″g₁″.
    let lam = f1[0] * g2[0] - f2[0] * g1[0];
    let lam_x = f1[1] * g2[0] - f2[1] * g1[0];
    let lam_y = f1[0] * g2[1] - f2[0] * g1[1];
    let lam_xx = f1[2] * g2[0] - f2[2] * g1[0];
    let lam_xy = f1[1] * g2[1] - f2[1] * g1[1];
    let lam_yy = f1[0] * g2[2] - f2[0] * g1[2];

    let nx_norm = f1[0].hypot(f2[0]);
    let ny_norm = g1[0].hypot(g2[0]);
    let null_x = nx_norm == 0.0;
    let null_y = ny_norm == 0.0;
    let rank = match (null_x, null_y) {
        (true, true) => 0,
        _ if lam != 0.0 => 2,
        _ => 1,
    };
    let zero_two_jet = null_x
        && null_y
        && f1[1] == 0.0
        && f2[1] == 0.0
        && g1[1] == 0.0
        && g2[1] == 0.0;

    let scale = [
        f1[0] * g2[0],
        f2[0] * g1[0],
        nx_norm * ny_norm,
    ];
    let mut conds = vec![banded_condition("lambda", lam, &scale, false)];
    let grad_scale = [
        f1[1] * g2[0],
        f2[1] * g1[0],
        f1[0] * g2[1],
        f2[0] * g1[1],
    ];
    conds.push(banded_condition("lambda_x", lam_x, &grad_scale, false));
    conds.push(banded_condition("lambda_y", lam_y, &grad_scale, false));
    let hess_scale = [f1[2] * g2[0], f2[2] * g1[0], f1[1] * g2[1], f2[1] * g1[1]];
    conds.push(banded_condition("lambda_xx", lam_xx, &hess_scale, false));
    conds.push(banded_condition("lambda_xy", lam_xy, &hess_scale, false));
    conds.push(banded_condition("lambda_yy", lam_yy, &hess_scale, false));
    let det = lam_xx * lam_yy - lam_xy * lam_xy;
    conds.push(banded_condition(
        "det_hess_lambda",
        det,
        &[lam_xx * lam_yy, lam_xy * lam_xy],
        true,
    ));

    let verdict = |conds: &[Condition], id: &str| {
        conds.iter().find(|c| c.id == id).map(|c| c.verdict).unwrap()
    };
    let stratum = if zero_two_jet {
        PlanarStratum::NotFinitelyDetermined
    } else {
        match verdict(&conds, "lambda") {
            Verdict::NonZero => PlanarStratum::Immersion,
            Verdict::Zero => {
                let gx = verdict(&conds, "lambda_x");
                let gy = verdict(&conds, "lambda_y");
                if gx == Verdict::NonZero || gy == Verdict::NonZero {
                    PlanarStratum::SmoothSigma
                } else if gx == Verdict::Zero && gy == Verdict::Zero {
                    match verdict(&conds, "det_hess_lambda") {
                        Verdict::Positive | Verdict::Negative => PlanarStratum::Morse,
                        Verdict::Zero => PlanarStratum::DegenerateMorse,
                        _ => PlanarStratum::Unresolved,
                    }
                } else {
                    PlanarStratum::Unresolved
                }
            }
            _ => PlanarStratum::Unresolved,
        }
    };

    PlanarReport {
        stratum,
        rank,
        null_x_in_sigma: null_x,
        null_y_in_sigma: null_y,
        zero_two_jet,
        conditions: conds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> ScalarCurve {
        ScalarCurve::poly(c.to_vec())
    }

    // N = (x + y, x² + y²): λ = 2(y − x), Σ is the diagonal.
    fn diagonal_map() -> PlanarWaveMap {
        PlanarWaveMap::new(
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
        )
    }

    #[test]
    fn lambda_field_of_the_diagonal_example() {
        let grid = Grid::square((-1.0, 1.0), 21);
        let field = planar_eval(&diagonal_map(), &grid);
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let (x, y) = (grid.x()[ix], grid.y()[iy]);
                let l = field.lambda[field.idx(ix, iy)];
                assert!((l - 2.0 * (y - x)).abs() < 1e-12);
            }
        }
        let r = planar_stratum(&diagonal_map(), (0.0, 0.0));
        assert_eq!(r.stratum, PlanarStratum::SmoothSigma);
        assert_eq!(r.rank, 1);
        assert!(!r.null_x_in_sigma && !r.null_y_in_sigma);
        let r = planar_stratum(&diagonal_map(), (0.5, -0.5));
        assert_eq!(r.stratum, PlanarStratum::Immersion);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn lambda_matches_jacobian_determinant() {
        let m = PlanarWaveMap::new(
            poly(&[0.0, 0.5, -1.0, 0.25]),
            poly(&[0.0, 2.0, 0.0, -0.5]),
            poly(&[0.0, -1.5, 0.5]),
            poly(&[0.0, 1.0, 1.0, 1.0]),
        );
        let grid = Grid::square((-0.8, 0.8), 33);
        let field = planar_eval(&m, &grid);
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let j = field.jacobian[field.idx(ix, iy)];
                let det = j[0] * j[3] - j[2] * j[1];
                assert!((det - field.lambda[field.idx(ix, iy)]).abs() < 1e-12);
            }
        }
        // Jacobian columns against centered differences of the value field.
        let (hx, hy) = (grid.hx(), grid.hy());
        for iy in 1..grid.ny() - 1 {
            for ix in 1..grid.nx() - 1 {
                let j = field.jacobian[field.idx(ix, iy)];
                for comp in 0..2 {
                    let dx = (field.value[field.idx(ix + 1, iy)][comp]
                        - field.value[field.idx(ix - 1, iy)][comp])
                        / (2.0 * hx);
                    let dy = (field.value[field.idx(ix, iy + 1)][comp]
                        - field.value[field.idx(ix, iy - 1)][comp])
                        / (2.0 * hy);
                    assert!((dx - j[2 * comp]).abs() < 1e-2);
                    assert!((dy - j[2 * comp + 1]).abs() < 1e-2);
                }
            }
        }
    }

    #[test]
    fn vanishing_x_derivatives_put_the_null_line_in_sigma() {
        // N = (x²/2, y²/2 shifted): N_x(0, y₀) = 0, so λ(0, ·) ≡ 0.
        let m = PlanarWaveMap::new(
            poly(&[0.0, 0.0, 0.5]),
            poly(&[0.0]),
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.5]),
        );
        let grid = Grid::square((-1.0, 1.0), 21);
        let field = planar_eval(&m, &grid);
        let ix0 = grid.nearest_x(0.0).unwrap();
        for iy in 0..grid.ny() {
            assert_eq!(field.lambda[field.idx(ix0, iy)], 0.0);
        }
        // λ = xy: a Morse crossing of the two lines x = 0 and y = 0.
        let r = planar_stratum(&m, (0.0, 0.0));
        assert!(r.null_x_in_sigma && !r.null_y_in_sigma);
        assert_eq!(r.rank, 1);
        assert_eq!(r.stratum, PlanarStratum::Morse);
        assert_eq!(r.condition("lambda_xy").unwrap().value, 1.0);
        assert!(!r.zero_two_jet);
    }

    #[test]
    fn rank_zero_flags_both_null_lines() {
        let m = PlanarWaveMap::new(
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, -1.0]),
        );
        let r = planar_stratum(&m, (0.0, 0.0));
        assert_eq!(r.rank, 0);
        assert!(r.null_x_in_sigma && r.null_y_in_sigma);
        assert!(!r.zero_two_jet);
    }

    #[test]
    fn zero_two_jet_is_never_finitely_determined() {
        // N = (x³ + y³, x³ − y³): λ = −18x²y², the printed x²y²Λ form.
        let m = PlanarWaveMap::new(
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, -1.0]),
        );
        let r = planar_stratum(&m, (0.0, 0.0));
        assert!(r.zero_two_jet);
        assert_eq!(r.stratum, PlanarStratum::NotFinitelyDetermined);
        assert_eq!(m.lambda(0.5, 2.0), -18.0 * 0.25 * 4.0);

        let zero = PlanarWaveMap::new(poly(&[0.0]), poly(&[0.0]), poly(&[0.0]), poly(&[0.0]));
        let grid = Grid::square((-1.0, 1.0), 5);
        assert!(planar_eval(&zero, &grid).lambda.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn separated_cubic_is_a_degenerate_morse_point() {
        // N = (x + y, x³): λ = −3x², gradient zero, Hessian rank 1.
        let m = PlanarWaveMap::new(
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 1.0]),
            poly(&[0.0]),
        );
        let r = planar_stratum(&m, (0.0, 0.0));
        assert_eq!(r.stratum, PlanarStratum::DegenerateMorse);
        assert_eq!(r.condition("lambda_xx").unwrap().value, -6.0);
        assert_eq!(r.condition("lambda_xy").unwrap().verdict, Verdict::Zero);

        // Restoring the y-cubic makes λ = 3y² − 3x², an ordinary saddle.
        let m = PlanarWaveMap::new(
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
            poly(&[0.0, 1.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
        );
        let r = planar_stratum(&m, (0.0, 0.0));
        assert_eq!(r.stratum, PlanarStratum::Morse);
        assert_eq!(r.condition("det_hess_lambda").unwrap().verdict, Verdict::Negative);
    }
}
