//! Cauchy data along the diagonal and its conversion to loop potentials.
//!
//! The construction accepts three forms of data on an interval I:
//! geometric pairs (N₀, V) = (N(t,t), N_x(t,t)), direct coefficient triples
//! (a, b, c) of the adapted frame, and harmonic jet coefficients. All routes
//! end in the potential pair
//!
//! ```text
//! α̂₀ = (c e3 + A e1 λ + (−b e1 + a e2) λ⁻¹) dt,   χ̂ = α̂₀(x) dx, ψ̂ = α̂₀(y) dy,
//! ```
//!
//! with the frame normalized to the identity at the base point (t₀, t₀).

use crate::algebra::{e1, e2, e3, Vec3};
use crate::jets::{expand_jet, normal_jet_at, BivariateJet, JetCoeffs};
use crate::loops::LoopAlgebraForm;
use crate::poly::Rat;
use std::sync::Arc;
use thiserror::Error;

/// Step for the 5-point central-difference fallback on black-box curves.
pub const FD_STEP: f64 = 1e-4;

/// Sample count used for data validation on the interval.
const VALIDATION_SAMPLES: usize = 33;

/// Tolerance for the structural checks |N₀| = 1 and ⟨V, N₀⟩ = 0.
pub const DATA_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum CauchyError {
    /// A stated hypothesis of the construction fails at a sample point.
    #[error("degenerate Cauchy data at t = {t}: {detail}")]
    DegenerateData { t: f64, detail: String },
    /// |N_x(t,t)| too small to define the potential (A ≈ 0).
    #[error("transverse derivative vanishes at t = {t}: |N_x| = {value:.3e}")]
    ZeroTransverseDerivative { t: f64, value: f64 },
}

/// Real-valued curve t ↦ ℝ: either an explicit polynomial (exact
/// derivatives) or a black box (derivatives by 5-point central differences
/// with step [`FD_STEP`]).
#[derive(Clone)]
pub enum ScalarCurve {
    /// Coefficient of t^k at index k.
    Poly(Vec<f64>),
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ScalarCurve {
    pub fn poly(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        ScalarCurve::Poly(coeffs)
    }

    pub fn constant(v: f64) -> Self {
        ScalarCurve::Poly(vec![v])
    }

    pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarCurve::Func(Arc::new(f))
    }

    /// Polynomial coefficients when the curve is exact.
    pub fn poly_coeffs(&self) -> Option<&[f64]> {
        match self {
            ScalarCurve::Poly(c) => Some(c),
            ScalarCurve::Func(_) => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarCurve::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck),
            ScalarCurve::Func(f) => f(t),
        }
    }

    /// k-th derivative at t, k ≤ 3. Exact for polynomials; 5-point central
    /// differences otherwise.
    pub fn derivative_at(&self, k: usize, t: f64) -> f64 {
        assert!(k <= 3, "derivatives beyond order 3 are not provided");
        match self {
            ScalarCurve::Poly(c) => {
                let mut d = c.clone();
                for _ in 0..k {
                    d = d
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, &ci)| i as f64 * ci)
                        .collect();
                    if d.is_empty() {
                        return 0.0;
                    }
                }
                d.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
            }
            ScalarCurve::Func(f) => {
                let h = FD_STEP;
                let fm2 = f(t - 2.0 * h);
                let fm1 = f(t - h);
                let f0 = f(t);
                let fp1 = f(t + h);
                let fp2 = f(t + 2.0 * h);
                match k {
                    0 => f0,
                    1 => (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
                    2 => (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h),
                    _ => (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h),
                }
            }
        }
    }

    /// True when derivatives are exact (polynomial curve).
    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarCurve::Poly(_))
    }
}

/// Vector-valued curve with an optional exact derivative.
#[derive(Clone)]
pub struct VecCurve {
    f: Arc<dyn Fn(f64) -> Vec3 + Send + Sync>,
    df: Option<Arc<dyn Fn(f64) -> Vec3 + Send + Sync>>,
}

impl VecCurve {
    pub fn new(f: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        VecCurve {
            f: Arc::new(f),
            df: None,
        }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        df: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        VecCurve {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
        }
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        (self.f)(t)
    }

    pub fn derivative(&self, t: f64) -> Vec3 {
        if let Some(df) = &self.df {
            return df(t);
        }
        let h = FD_STEP;
        let fm2 = (self.f)(t - 2.0 * h);
        let fm1 = (self.f)(t - h);
        let fp1 = (self.f)(t + h);
        let fp2 = (self.f)(t + 2.0 * h);
        (fm2 - fm1.scale(8.0) + fp1.scale(8.0) - fp2).scale(1.0 / (12.0 * h))
    }
}

/// Geometric Cauchy data: the Gauss map and its transverse derivative along
/// the diagonal, N₀(t) = N(t,t) and V(t) = N_x(t,t), with optional speed
/// A(t) = |V(t)| (defaults to |V| computed per sample).
#[derive(Clone)]
pub struct GeometricCauchyData {
    pub n0: VecCurve,
    pub v: VecCurve,
    pub big_a: Option<ScalarCurve>,
    pub interval: (f64, f64),
}

/// Adapted-frame coefficient functions along the diagonal.
#[derive(Clone)]
pub struct AbcData {
    pub a: ScalarCurve,
    pub b: ScalarCurve,
    pub c: ScalarCurve,
    pub big_a: ScalarCurve,
    pub interval: (f64, f64),
}

impl AbcData {
    /// Direct triple with unit speed, the normalized form of the theorems.
    pub fn unit_speed(a: ScalarCurve, b: ScalarCurve, c: ScalarCurve, interval: (f64, f64)) -> Self {
        AbcData {
            a,
            b,
            c,
            big_a: ScalarCurve::constant(1.0),
            interval,
        }
    }
}

/// Characteristic potential pair: χ̂ feeds the x-axis ODE, ψ̂ the y-axis ODE,
/// both normalized to the identity frame at the base point.
#[derive(Clone)]
pub struct PotentialPair {
    pub chi: LoopAlgebraForm,
    pub psi: LoopAlgebraForm,
    pub base: (f64, f64),
}

impl PotentialPair {
    pub fn new(chi: LoopAlgebraForm, psi: LoopAlgebraForm, base: (f64, f64)) -> Self {
        assert!(chi.band().1 <= 1, "χ̂ may only contain powers ≤ 1");
        assert!(psi.band().0 >= -1, "ψ̂ may only contain powers ≥ −1");
        PotentialPair { chi, psi, base }
    }
}

fn sample_points(interval: (f64, f64), n: usize) -> Vec<f64> {
    let (t0, t1) = interval;
    (0..n)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Convert geometric data to frame coefficients via the quotient formulas
///
/// ```text
/// a = ⟨N₀′, N₀×V⟩/A,   b = ⟨V−N₀′, V⟩/A,
/// c = (⟨N₀′−V, N₀×V′⟩ − ⟨N₀′, N₀×V⟩ A′/A) / ⟨V−N₀′, V⟩.
/// ```
///
/// The division defining c requires b ≠ 0 on I; data violating that (or the
/// structural constraints |N₀| = 1, V ⊥ N₀) is rejected.
pub fn geometric_to_abc(d: &GeometricCauchyData) -> Result<AbcData, CauchyError> {
    let n0 = d.n0.clone();
    let v = d.v.clone();
    let big_a: ScalarCurve = match &d.big_a {
        Some(a) => a.clone(),
        None => {
            let v = v.clone();
            ScalarCurve::func(move |t| v.eval(t).norm())
        }
    };

    for &t in &sample_points(d.interval, VALIDATION_SAMPLES) {
        let n0t = n0.eval(t);
        let vt = v.eval(t);
        let norm_err = (n0t.norm() - 1.0).abs();
        if norm_err > DATA_TOL {
            return Err(CauchyError::DegenerateData {
                t,
                detail: format!("|N0| deviates from 1 by {norm_err:.3e}"),
            });
        }
        let ortho = n0t.dot(vt).abs();
        if ortho > DATA_TOL * (1.0 + vt.norm()) {
            return Err(CauchyError::DegenerateData {
                t,
                detail: format!("<V, N0> = {ortho:.3e} is not zero"),
            });
        }
        let at = big_a.eval(t);
        if !(at > 1e-10) {
            return Err(CauchyError::ZeroTransverseDerivative { t, value: at });
        }
        let n0p = n0.derivative(t);
        let vp = v.derivative(t);
        let denom = (vt - n0p).dot(vt);
        let scale = 1.0 + vt.norm() * (vt.norm() + n0p.norm());
        if denom.abs() < 1e-9 * scale {
            let c_num = (n0p - vt).dot(n0t.cross(vp))
                - n0p.dot(n0t.cross(vt)) * big_a.derivative_at(1, t) / at;
            let detail = if c_num.abs() < 1e-9 * scale {
                "<V - N0', V> vanishes (0/0 in the formula for c)".to_string()
            } else {
                format!("<V - N0', V> vanishes while the c-numerator is {c_num:.3e}")
            };
            return Err(CauchyError::DegenerateData { t, detail });
        }
    }

    let a_curve = {
        let (n0, v, big_a) = (n0.clone(), v.clone(), big_a.clone());
        ScalarCurve::func(move |t| {
            n0.derivative(t).dot(n0.eval(t).cross(v.eval(t))) / big_a.eval(t)
        })
    };
    let b_curve = {
        let (n0, v, big_a) = (n0.clone(), v.clone(), big_a.clone());
        ScalarCurve::func(move |t| {
            let vt = v.eval(t);
            (vt - n0.derivative(t)).dot(vt) / big_a.eval(t)
        })
    };
    let c_curve = {
        let (n0, v, big_a) = (n0.clone(), v.clone(), big_a.clone());
        ScalarCurve::func(move |t| {
            let n0t = n0.eval(t);
            let n0p = n0.derivative(t);
            let vt = v.eval(t);
            let vp = v.derivative(t);
            let at = big_a.eval(t);
            let num = (n0p - vt).dot(n0t.cross(vp))
                - n0p.dot(n0t.cross(vt)) * big_a.derivative_at(1, t) / at;
            num / (vt - n0p).dot(vt)
        })
    };
    Ok(AbcData {
        a: a_curve,
        b: b_curve,
        c: c_curve,
        big_a,
        interval: d.interval,
    })
}

/// Assemble the potential pair α̂₀ dt on both characteristic axes.
pub fn abc_to_potential(d: &AbcData, t0: f64) -> PotentialPair {
    let coeffs = {
        let d = d.clone();
        move |t: f64| {
            vec![
                e1().scale_re(-d.b.eval(t)) + e2().scale_re(d.a.eval(t)),
                e3().scale_re(d.c.eval(t)),
                e1().scale_re(d.big_a.eval(t)),
            ]
        }
    };
    let chi = LoopAlgebraForm::new(-1, 1, coeffs.clone());
    let psi = LoopAlgebraForm::new(-1, 1, coeffs);
    PotentialPair::new(chi, psi, (t0, t0))
}

/// Frame coefficients of a harmonic jet along its diagonal, computed from
/// exact partials of N. With V(t) = N_x(t,t), A = |V|, and the diagonal
/// derivative V′ = (N_xx + N_xy)|_(t,t):
///
/// ```text
/// a = ⟨N_y, N×V⟩/A,  b = −⟨N_y, V⟩/A,  c = ⟨V′, N×V⟩/A².
/// ```
///
/// This c is the algebraic reduction of the quotient in [`geometric_to_abc`]
/// under |N| = 1, V ⊥ N; being division-free in b it also covers
/// non-wave-front points (b = 0). The reduction cannot drop the N_xy term:
/// a truncated jet satisfies the harmonic map equation only at the origin,
/// so N_xy ∦ N along the rest of the diagonal.
pub fn jet_to_abc(c: &JetCoeffs<Rat>, interval: (f64, f64)) -> Result<AbcData, CauchyError> {
    let j: BivariateJet<f64> = expand_jet(c).to_f64();

    for &t in &sample_points(interval, VALIDATION_SAMPLES) {
        let nj = normal_jet_at(&j, t, t);
        let a_t = nj.partial_vec3(1, 0).norm();
        if !(a_t > 1e-10) {
            return Err(CauchyError::ZeroTransverseDerivative { t, value: a_t });
        }
    }

    let make = |pick: fn(&BivariateJet<f64>, f64) -> f64, j: &BivariateJet<f64>| {
        let j = j.clone();
        ScalarCurve::func(move |t| pick(&j, t))
    };
    fn frame_parts(j: &BivariateJet<f64>, t: f64) -> (f64, f64, f64, f64) {
        let nj = normal_jet_at(j, t, t);
        let n = nj.value_vec3();
        let nx = nj.partial_vec3(1, 0);
        let ny = nj.partial_vec3(0, 1);
        let v_prime = nj.partial_vec3(2, 0) + nj.partial_vec3(1, 1);
        let a_cap = nx.norm();
        let e1_dir = n.cross(nx);
        (
            ny.dot(e1_dir) / a_cap,
            -ny.dot(nx) / a_cap,
            v_prime.dot(e1_dir) / (a_cap * a_cap),
            a_cap,
        )
    }
    let a = make(|j, t| frame_parts(j, t).0, &j);
    let b = make(|j, t| frame_parts(j, t).1, &j);
    let c_curve = make(|j, t| frame_parts(j, t).2, &j);
    let big_a = make(|j, t| frame_parts(j, t).3, &j);
    Ok(AbcData {
        a,
        b,
        c: c_curve,
        big_a,
        interval,
    })
}

/// Full jet route: expand, read frame data off the diagonal, build the
/// potential based at the origin.
pub fn jet_to_potential(
    c: &JetCoeffs<Rat>,
    interval: (f64, f64),
) -> Result<PotentialPair, CauchyError> {
    assert!(
        interval.0 <= 0.0 && 0.0 <= interval.1,
        "jet germs are based at the origin; the interval must contain 0"
    );
    Ok(abc_to_potential(&jet_to_abc(c, interval)?, 0.0))
}
