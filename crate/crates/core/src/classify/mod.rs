//! Singularity recognition for frontal pseudospherical surfaces and their
//! Gauss maps.
//!
//! Three interchangeable routes produce a [`SingularityReport`]:
//!
//! * [`classify_jet`]: exact rational discriminants on the free Taylor
//!   coefficients of the normal germ;
//! * [`classify_abc`]: derivative criteria for surfaces described by frame
//!   coefficients (a, b, c) along the initial diagonal;
//! * [`classify_grid`]: banded finite-difference criteria on a built surface.
//!
//! All three evaluate the same geometric quantities: the degeneracy function
//! σ = det(f_x, f_y, N), its derivatives along the null direction η of df,
//! and the Hessian of σ where ∇σ vanishes. The jet route keeps every
//! decision in exact arithmetic; the printed coefficient discriminants are
//! reported alongside for inspection.

mod abc_fields;
mod grid;

pub use grid::{classify_grid, swallowtail_points};

use crate::cauchy::AbcData;
use crate::jets::{expand_jet, normal_jet_origin, BivariateJet, JetCoeffs};
use crate::poly::{Poly2, Rat, Scalar};
use abc_fields::DiagonalFields;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// Relative width of the "equals zero" acceptance band for floating-point
/// condition values.
pub const ZERO_BAND: f64 = 1e-6;
/// Relative width below which a value is not yet accepted as nonzero; the
/// gap between the bands maps to [`Verdict::Unresolved`].
pub const NONZERO_BAND: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Regular,
    CuspidalEdge,
    Swallowtail,
    CuspidalButterfly,
    CuspidalLips,
    CuspidalBeaks,
    TwoFiveCuspidalEdge,
    Shcherbak,
    Rank0,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Jet,
    Abc,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    NonZero,
    Positive,
    Negative,
    Unresolved,
}

impl Verdict {
    pub fn is_zero(self) -> bool {
        self == Verdict::Zero
    }

    pub fn is_nonzero(self) -> bool {
        matches!(self, Verdict::NonZero | Verdict::Positive | Verdict::Negative)
    }
}

/// One evaluated recognition condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub id: String,
    pub value: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub label: Label,
    pub method: Method,
    pub codimension: Option<u32>,
    pub conditions: Vec<Condition>,
}

impl SingularityReport {
    fn new(label: Label, method: Method, conditions: Vec<Condition>) -> Self {
        SingularityReport {
            label,
            method,
            codimension: codimension(label),
            conditions,
        }
    }

    /// Value of a reported condition by id.
    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

/// Codimension within the space of initial data: the edge/swallowtail pair
/// is generic, the remaining named strata appear in one-parameter families,
/// and rank-zero points cost at least two conditions.
fn codimension(label: Label) -> Option<u32> {
    match label {
        Label::CuspidalEdge | Label::Swallowtail => Some(0),
        Label::CuspidalButterfly
        | Label::CuspidalLips
        | Label::CuspidalBeaks
        | Label::TwoFiveCuspidalEdge
        | Label::Shcherbak => Some(1),
        Label::Rank0 => Some(2),
        Label::Regular | Label::Unresolved => None,
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("jet order {order} is too low for this classification; need {needed}")]
    OrderTooLow { order: usize, needed: usize },
    #[error("t0 = {t0} lies outside the data interval [{lo}, {hi}]")]
    NotOnCurve { t0: f64, lo: f64, hi: f64 },
    #[error("point is not singular: |sigma| = {sigma:.3e} exceeds threshold {threshold:.3e}")]
    NotSingular { sigma: f64, threshold: f64 },
    #[error("base jet classifies as {found:?}; family conditions apply to 2/5-cuspidal-edge or Shcherbak bases")]
    WrongStratum { found: Label },
}

/// Banded verdict for a floating-point value: zero when it is small against
/// the competing terms that formed it, nonzero when clearly above the band,
/// unresolved in between. `signed` upgrades NonZero to a sign verdict.
pub(crate) fn banded_verdict(value: f64, competing: &[f64], signed: bool) -> Verdict {
    if !value.is_finite() {
        return Verdict::Unresolved;
    }
    if value == 0.0 {
        return Verdict::Zero;
    }
    let scale = competing
        .iter()
        .fold(value.abs(), |m, t| if t.is_finite() { m.max(t.abs()) } else { m });
    if value.abs() <= ZERO_BAND * scale {
        Verdict::Zero
    } else if value.abs() >= NONZERO_BAND * scale {
        if signed {
            if value > 0.0 {
                Verdict::Positive
            } else {
                Verdict::Negative
            }
        } else {
            Verdict::NonZero
        }
    } else {
        Verdict::Unresolved
    }
}

pub(crate) fn banded_condition(id: &str, value: f64, competing: &[f64], signed: bool) -> Condition {
    Condition {
        id: id.to_string(),
        value,
        verdict: banded_verdict(value, competing, signed),
    }
}

fn rat_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn rat_cond(id: &str, v: &Rat) -> Condition {
    Condition {
        id: id.to_string(),
        value: rat_f64(v),
        verdict: if v.is_zero() { Verdict::Zero } else { Verdict::NonZero },
    }
}

fn rat_sign_cond(id: &str, v: &Rat) -> Condition {
    let verdict = if v.is_zero() {
        Verdict::Zero
    } else if *v > Rat::zero() {
        Verdict::Positive
    } else {
        Verdict::Negative
    };
    Condition {
        id: id.to_string(),
        value: rat_f64(v),
        verdict,
    }
}

fn mirror_xy(c: &JetCoeffs<Rat>) -> JetCoeffs<Rat> {
    JetCoeffs::new(c.ay.clone(), c.ax.clone(), c.by.clone(), c.bx.clone())
}

fn swap_uv(c: &JetCoeffs<Rat>) -> JetCoeffs<Rat> {
    JetCoeffs::new(c.bx.clone(), c.by.clone(), c.ax.clone(), c.ay.clone())
}

type JetVec = [Poly2<Rat>; 3];

fn jv_cross(p: &JetVec, q: &JetVec, deg: usize) -> JetVec {
    [
        p[1].mul_trunc(&q[2], deg).sub(&p[2].mul_trunc(&q[1], deg)),
        p[2].mul_trunc(&q[0], deg).sub(&p[0].mul_trunc(&q[2], deg)),
        p[0].mul_trunc(&q[1], deg).sub(&p[1].mul_trunc(&q[0], deg)),
    ]
}

fn jv_dot(p: &JetVec, q: &JetVec, deg: usize) -> Poly2<Rat> {
    p[0].mul_trunc(&q[0], deg)
        .add(&p[1].mul_trunc(&q[1], deg))
        .add(&p[2].mul_trunc(&q[2], deg))
}

fn rat_det3(p: &[Rat; 3], q: &[Rat; 3], r: &[Rat; 3]) -> Rat {
    p[0].clone() * (q[1].clone() * r[2].clone() - q[2].clone() * r[1].clone())
        - p[1].clone() * (q[0].clone() * r[2].clone() - q[2].clone() * r[0].clone())
        + p[2].clone() * (q[0].clone() * r[1].clone() - q[1].clone() * r[0].clone())
}

/// Exact jets about the origin of σ = det(f_x, f_y, N), ⟨f_y, f_y⟩ and
/// ⟨f_x, f_y⟩, with f_x = N × N_x and f_y = N_y × N (the frontal surface
/// recovered from its Gauss map).
struct FrontalJets {
    sigma: Poly2<Rat>,
    b2: Poly2<Rat>,
    g: Poly2<Rat>,
}

fn frontal_jets(c: &JetCoeffs<Rat>) -> FrontalJets {
    let order = c.order().max(5);
    let j = expand_jet(&c.zero_extend(order));
    let n = normal_jet_origin(&j);
    let deg = order - 1;
    let nn: JetVec = [
        n.comp[0].truncate(deg),
        n.comp[1].truncate(deg),
        n.comp[2].truncate(deg),
    ];
    let nx: JetVec = [n.comp[0].diff_x(), n.comp[1].diff_x(), n.comp[2].diff_x()];
    let ny: JetVec = [n.comp[0].diff_y(), n.comp[1].diff_y(), n.comp[2].diff_y()];
    let fx = jv_cross(&nn, &nx, deg);
    let fy = jv_cross(&ny, &nn, deg);
    let sigma = jv_dot(&jv_cross(&fx, &fy, deg), &nn, deg);
    let b2 = jv_dot(&fy, &fy, deg);
    let g = jv_dot(&fx, &fy, deg);
    FrontalJets { sigma, b2, g }
}

/// η̃(w) for η̃ = ⟨f_y,f_y⟩ ∂x − ⟨f_x,f_y⟩ ∂y. On the singular set η̃ is a
/// positive multiple of the null direction, so iterated values at a point
/// where the lower-order ones vanish match the null-field derivatives up to
/// positive factors.
fn eta_tilde(fj: &FrontalJets, w: &Poly2<Rat>, deg: usize) -> Poly2<Rat> {
    fj.b2
        .mul_trunc(&w.diff_x(), deg)
        .sub(&fj.g.mul_trunc(&w.diff_y(), deg))
}

/// Exact discriminant-chain classification from the free jet coefficients
/// of a harmonic normal germ, singular or not at the origin.
pub fn classify_jet(c: &JetCoeffs<Rat>) -> Result<SingularityReport, ClassifyError> {
    if c.order() < 3 {
        return Err(ClassifyError::OrderTooLow {
            order: c.order(),
            needed: 3,
        });
    }

    let nx_sq = c.ax[0].clone() * c.ax[0].clone() + c.bx[0].clone() * c.bx[0].clone();
    let ny_sq = c.ay[0].clone() * c.ay[0].clone() + c.by[0].clone() * c.by[0].clone();
    if nx_sq.is_zero() && ny_sq.is_zero() {
        return Ok(SingularityReport::new(
            Label::Rank0,
            Method::Jet,
            vec![
                rat_cond("nx_norm_sq", &nx_sq),
                rat_cond("ny_norm_sq", &ny_sq),
            ],
        ));
    }

    // Normalize to N_x(0) ≠ 0; x ↔ y maps solutions to solutions and flips
    // only the sign of σ, which no criterion sees.
    let cn = if nx_sq.is_zero() { mirror_xy(c) } else { c.clone() };
    // Normalize to a₁₀ ≠ 0 likewise (u ↔ v is a reflection of the sphere).
    let cn = if cn.ax[0].is_zero() { swap_uv(&cn) } else { cn };

    let a10 = cn.ax[0].clone();
    let a20 = cn.ax[1].clone();
    let a30 = cn.ax[2].clone();
    let a11 = cn.ay[0].clone();
    let a22 = cn.ay[1].clone();
    let a33 = cn.ay[2].clone();
    let b10 = cn.bx[0].clone();
    let b20 = cn.bx[1].clone();
    let b30 = cn.bx[2].clone();
    let b11 = cn.by[0].clone();
    let b22 = cn.by[1].clone();
    let b33 = cn.by[2].clone();

    let c1 = b11.clone() * a10.clone() - b10.clone() * a11.clone();
    let mut conds = vec![rat_cond("c1", &c1)];
    if !c1.is_zero() {
        return Ok(SingularityReport::new(Label::Regular, Method::Jet, conds));
    }

    let fj = frontal_jets(&cn);
    let deg = fj.sigma.deg();
    let g1p = eta_tilde(&fj, &fj.sigma, deg - 1);
    let g2p = eta_tilde(&fj, &g1p, deg - 2);
    let g3p = eta_tilde(&fj, &g2p, deg - 3);
    let g1 = g1p.get(0, 0);
    let g2 = g2p.get(0, 0);
    let g3 = g3p.get(0, 0);
    let sig_x = fj.sigma.get(1, 0);
    let sig_y = fj.sigma.get(0, 1);
    let grad_sq = sig_x.clone() * sig_x.clone() + sig_y.clone() * sig_y.clone();
    conds.push(rat_cond("grad_sigma_sq", &grad_sq));

    // After normalization the germ is a wave front exactly when N_y(0) ≠ 0.
    let wave_front = !(a11.is_zero() && b11.is_zero());
    if wave_front {
        // Printed first- and third-order discriminants for inspection; the
        // decisions below use the exact η̃-chain, which agrees with them on
        // their domain of validity and needs no normalization assumptions.
        let sx = a20.clone() * b11.clone() - a11.clone() * b20.clone();
        let sy = a10.clone() * b22.clone() - a22.clone() * b10.clone();
        let pair = b11.clone() * sx.clone() + b10.clone() * sy.clone();
        conds.push(rat_cond("pair_condition", &pair));
        conds.push(rat_cond("eta_sigma", &g1));
        if !g1.is_zero() {
            return Ok(SingularityReport::new(
                Label::CuspidalEdge,
                Method::Jet,
                conds,
            ));
        }

        if !grad_sq.is_zero() {
            let cubic = swallowtail_cubic(
                &a10, &a20, &a30, &a11, &a22, &a33, &b10, &b20, &b30, &b11, &b22, &b33,
            );
            conds.push(rat_cond("cubic_condition", &cubic));
            conds.push(rat_cond("eta_eta_sigma", &g2));
            if !g2.is_zero() {
                return Ok(SingularityReport::new(
                    Label::Swallowtail,
                    Method::Jet,
                    conds,
                ));
            }
            conds.push(rat_cond("eta3_sigma", &g3));
            if !g3.is_zero() {
                return Ok(SingularityReport::new(
                    Label::CuspidalButterfly,
                    Method::Jet,
                    conds,
                ));
            }
            return Ok(SingularityReport::new(Label::Unresolved, Method::Jet, conds));
        }

        // Singular set itself singular: Morse dichotomy of σ.
        let p = a10.clone() * b30.clone() - a30.clone() * b10.clone();
        let q = a10.clone() * b33.clone() - a33.clone() * b10.clone();
        conds.push(rat_cond("p_coeff", &p));
        conds.push(rat_cond("q_coeff", &q));
        let h20 = fj.sigma.get(2, 0) * Rat::from_int(2);
        let h11 = fj.sigma.get(1, 1);
        let h02 = fj.sigma.get(0, 2) * Rat::from_int(2);
        let minus_det = h11.clone() * h11.clone() - h20.clone() * h02.clone();
        conds.push(rat_sign_cond("morse_discriminant", &minus_det));
        if minus_det.is_zero() {
            return Ok(SingularityReport::new(Label::Unresolved, Method::Jet, conds));
        }
        if minus_det < Rat::zero() {
            return Ok(SingularityReport::new(
                Label::CuspidalLips,
                Method::Jet,
                conds,
            ));
        }
        let transversal = p.clone() * a11.clone() * a11.clone() * a11.clone()
            - q.clone() * a10.clone() * a10.clone() * a10.clone();
        conds.push(rat_cond("beaks_transversal", &transversal));
        conds.push(rat_cond("eta_eta_sigma", &g2));
        if !g2.is_zero() {
            return Ok(SingularityReport::new(
                Label::CuspidalBeaks,
                Method::Jet,
                conds,
            ));
        }
        return Ok(SingularityReport::new(Label::Unresolved, Method::Jet, conds));
    }

    // Not a wave front: N_y(0) = 0 after normalization. The frontal still
    // has f_x ≠ 0; the strata are read off brackets of N-derivatives and
    // the Hessian of σ.
    let j5 = expand_jet(&cn.zero_extend(5));
    let n = normal_jet_origin(&j5);
    let n0 = n.partial(0, 0);
    let n_x = n.partial(1, 0);
    let n_yy = n.partial(0, 2);
    let n_yyy = n.partial(0, 3);
    let br1 = rat_det3(&n0, &n_x, &n_yy);
    let br2 = rat_det3(&n0, &n_yy, &n_yyy);
    conds.push(rat_cond("bracket_n_nx_nyy", &br1));

    if !br1.is_zero() {
        conds.push(rat_cond("bracket_n_nyy_nyyy", &br2));
        if !br2.is_zero() {
            return Ok(SingularityReport::new(
                Label::TwoFiveCuspidalEdge,
                Method::Jet,
                conds,
            ));
        }
        return Ok(SingularityReport::new(Label::Unresolved, Method::Jet, conds));
    }

    // σ has the indefinite Morse form [[0, *],[*, σ_yy/2]] here; the saddle
    // plus a nonzero vertical second derivative are the recognition pair.
    let morse = a22.clone() * (a10.clone() * b20.clone() - a20.clone() * b10.clone());
    conds.push(rat_cond("morse_offdiag", &morse));
    let h20 = fj.sigma.get(2, 0) * Rat::from_int(2);
    let h11 = fj.sigma.get(1, 1);
    let h02 = fj.sigma.get(0, 2) * Rat::from_int(2);
    let minus_det = h11.clone() * h11.clone() - h20.clone() * h02.clone();
    conds.push(rat_sign_cond("morse_discriminant", &minus_det));
    // σ_yy(0) = −6(a₁₀b₃₃ − a₃₃b₁₀); report the coefficient form.
    let transversal = a10.clone() * b33.clone() - a33.clone() * b10.clone();
    conds.push(rat_cond("shcherbak_transversal", &transversal));
    if minus_det > Rat::zero() && !fj.sigma.get(0, 2).is_zero() {
        return Ok(SingularityReport::new(Label::Shcherbak, Method::Jet, conds));
    }
    Ok(SingularityReport::new(Label::Unresolved, Method::Jet, conds))
}

/// The printed third-order swallowtail discriminant, reported alongside the
/// exact ηησ value it matches up to a positive factor.
#[allow(clippy::too_many_arguments)]
fn swallowtail_cubic(
    a10: &Rat,
    a20: &Rat,
    a30: &Rat,
    a11: &Rat,
    a22: &Rat,
    a33: &Rat,
    b10: &Rat,
    b20: &Rat,
    b30: &Rat,
    b11: &Rat,
    b22: &Rat,
    b33: &Rat,
) -> Rat {
    let i = |n: i64| Rat::from_int(n);
    let mut u = i(6) * b33.clone() * a10.clone() * b10.clone() * b10.clone();
    u = u - i(6) * b30.clone() * a11.clone() * b11.clone() * b11.clone();
    u = u - i(6) * a33.clone() * b10.clone() * b10.clone() * b10.clone();
    u = u + i(6) * a30.clone() * b11.clone() * b11.clone() * b11.clone();
    u = u + i(4) * b20.clone() * b22.clone() * a10.clone() * b11.clone();
    u = u - i(4) * b20.clone() * b22.clone() * a11.clone() * b10.clone();
    u = u + i(12) * a20.clone() * b22.clone() * b10.clone() * b11.clone();
    u = u - i(12) * a22.clone() * b20.clone() * b10.clone() * b11.clone();
    u = u + a10.clone() * a10.clone() * a10.clone() * b11.clone() * b11.clone() * b11.clone();
    u = u + i(3)
        * a10.clone()
        * a10.clone()
        * a11.clone()
        * b10.clone()
        * b11.clone()
        * b11.clone();
    u = u - i(3)
        * a10.clone()
        * a11.clone()
        * a11.clone()
        * b10.clone()
        * b10.clone()
        * b11.clone();
    u = u + i(6) * a10.clone() * b10.clone() * b10.clone() * b11.clone() * b11.clone() * b11.clone();
    u = u - a11.clone() * a11.clone() * a11.clone() * b10.clone() * b10.clone() * b10.clone();
    u = u - i(6) * a11.clone() * b10.clone() * b10.clone() * b10.clone() * b11.clone() * b11.clone();
    u
}

/// Classification from frame-coefficient curves (a, b, c) and A along the
/// initial diagonal, at parameter t0.
pub fn classify_abc(d: &AbcData, t0: f64) -> Result<SingularityReport, ClassifyError> {
    let (lo, hi) = d.interval;
    if !t0.is_finite() || t0 < lo || t0 > hi {
        return Err(ClassifyError::NotOnCurve { t0, lo, hi });
    }
    let f = DiagonalFields::at(d, t0);
    let b0 = f.b[0][0];
    let s = &f.sigma;

    let a_scale = [
        (f.a[1][0] + f.a[0][1]).abs(),
        (f.a[2][0] + 2.0 * f.a[1][1] + f.a[0][2]).abs(),
    ];
    let sigma_cond = banded_condition("sigma", s[0][0], &a_scale, false);
    let b_scale = [(f.b[1][0] + f.b[0][1]).abs(), f.c[0][0].abs(), 1.0];
    let b_cond = banded_condition("b_coeff", b0, &b_scale, false);
    let mut conds = vec![sigma_cond.clone(), b_cond.clone()];

    if sigma_cond.verdict.is_nonzero() {
        return Ok(SingularityReport::new(Label::Regular, Method::Abc, conds));
    }
    if sigma_cond.verdict != Verdict::Zero {
        return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
    }

    let hess_scale = s[2][0].abs() + 2.0 * s[1][1].abs() + s[0][2].abs();
    let grad_sq = s[1][0] * s[1][0] + s[0][1] * s[0][1];
    let grad_cond = banded_condition("grad_sigma_sq", grad_sq, &[hess_scale * hess_scale], false);
    let (g1, g2, g3) = f.eta_chain();
    let g1t = f.eta_apply(&f.sigma, 2);
    let g2t = f.eta_apply(&g1t, 1);
    let eta_scale = [
        (f.b[0][0] * s[1][0]).abs(),
        (f.big_a[0] * s[0][1]).abs(),
        f.big_a[0].abs() * hess_scale,
    ];
    let g1_cond = banded_condition("eta_sigma", g1, &eta_scale, false);
    let g2_scale = [
        (f.b[0][0] * g1t[1][0]).abs(),
        (f.big_a[0] * g1t[0][1]).abs(),
    ];
    let g2_cond = banded_condition("eta_eta_sigma", g2, &g2_scale, false);
    let g3_scale = [
        (f.b[0][0] * g2t[1][0]).abs(),
        (f.big_a[0] * g2t[0][1]).abs(),
    ];
    let g3_cond = banded_condition("eta3_sigma", g3, &g3_scale, false);
    let minus_det = s[1][1] * s[1][1] - s[2][0] * s[0][2];
    let morse_cond = banded_condition(
        "morse_discriminant",
        minus_det,
        &[(s[2][0] * s[0][2]).abs(), s[1][1] * s[1][1]],
        true,
    );

    if b_cond.verdict.is_nonzero() {
        // Wave-front branch.
        conds.push(g1_cond.clone());
        if g1_cond.verdict.is_nonzero() {
            return Ok(SingularityReport::new(
                Label::CuspidalEdge,
                Method::Abc,
                conds,
            ));
        }
        if g1_cond.verdict != Verdict::Zero {
            return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
        }
        conds.push(grad_cond.clone());
        if grad_cond.verdict.is_nonzero() {
            conds.push(g2_cond.clone());
            if g2_cond.verdict.is_nonzero() {
                return Ok(SingularityReport::new(
                    Label::Swallowtail,
                    Method::Abc,
                    conds,
                ));
            }
            if g2_cond.verdict == Verdict::Zero {
                conds.push(g3_cond.clone());
                if g3_cond.verdict.is_nonzero() {
                    return Ok(SingularityReport::new(
                        Label::CuspidalButterfly,
                        Method::Abc,
                        conds,
                    ));
                }
            }
            return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
        }
        if grad_cond.verdict != Verdict::Zero {
            return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
        }
        conds.push(morse_cond.clone());
        match morse_cond.verdict {
            Verdict::Negative => {
                return Ok(SingularityReport::new(
                    Label::CuspidalLips,
                    Method::Abc,
                    conds,
                ));
            }
            Verdict::Positive => {
                conds.push(g2_cond.clone());
                if g2_cond.verdict.is_nonzero() {
                    return Ok(SingularityReport::new(
                        Label::CuspidalBeaks,
                        Method::Abc,
                        conds,
                    ));
                }
                return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
            }
            _ => return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds)),
        }
    }

    if b_cond.verdict != Verdict::Zero {
        return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
    }

    // Not a wave front: a(t0) = b(t0) = 0.
    conds.push(grad_cond.clone());
    let disc = f.a[0][1] * f.b[0][2] - f.b[0][1] * f.a[0][2];
    let disc_cond = banded_condition(
        "two_five_discriminant",
        disc,
        &[(f.a[0][1] * f.b[0][2]).abs(), (f.b[0][1] * f.a[0][2]).abs()],
        false,
    );
    if grad_cond.verdict.is_nonzero() {
        conds.push(disc_cond.clone());
        if disc_cond.verdict.is_nonzero() {
            return Ok(SingularityReport::new(
                Label::TwoFiveCuspidalEdge,
                Method::Abc,
                conds,
            ));
        }
        return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
    }
    if grad_cond.verdict != Verdict::Zero {
        return Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds));
    }

    let offdiag_cond = banded_condition(
        "morse_offdiag",
        s[1][1],
        &[hess_scale],
        false,
    );
    let transversal_cond = banded_condition(
        "shcherbak_transversal",
        -s[0][2],
        &[hess_scale],
        false,
    );
    conds.push(offdiag_cond.clone());
    conds.push(transversal_cond.clone());
    if offdiag_cond.verdict.is_nonzero() && transversal_cond.verdict.is_nonzero() {
        return Ok(SingularityReport::new(Label::Shcherbak, Method::Abc, conds));
    }
    Ok(SingularityReport::new(Label::Unresolved, Method::Abc, conds))
}

/// The four tangent-space generators of the Monge-Taylor image at a germ:
///
/// ```text
/// U1 = u_x − u_x(0) − (u_x(0)u + v_x(0)v)u,   U2 = u_y − u_y(0) − (u_y(0)u + v_y(0)v)u,
/// V1 = v_x − v_x(0) − (u_x(0)u + v_x(0)v)v,   V2 = v_y − v_y(0) − (u_y(0)u + v_y(0)v)v,
/// ```
///
/// each truncated at the jet order.
pub fn monge_taylor_tangent<T: Scalar>(j: &BivariateJet<T>) -> [Poly2<T>; 4] {
    let deg = j.order();
    let ux = j.u.diff_x();
    let uy = j.u.diff_y();
    let vx = j.v.diff_x();
    let vy = j.v.diff_y();
    let ux0 = ux.get(0, 0);
    let uy0 = uy.get(0, 0);
    let vx0 = vx.get(0, 0);
    let vy0 = vy.get(0, 0);
    let wx = j.u.scale(&ux0).add(&j.v.scale(&vx0));
    let wy = j.u.scale(&uy0).add(&j.v.scale(&vy0));
    let gen = |d: &Poly2<T>, d0: &T, w: &Poly2<T>, comp: &Poly2<T>| {
        d.sub(&Poly2::constant(0, d0.clone()))
            .sub(&w.mul_trunc(comp, deg))
            .truncate(deg)
    };
    [
        gen(&ux, &ux0, &wx, &j.u),
        gen(&uy, &uy0, &wy, &j.u),
        gen(&vx, &vx0, &wx, &j.v),
        gen(&vy, &vy0, &wy, &j.v),
    ]
}

/// Base jet plus the mixed s-derivatives of a one-parameter deformation at
/// the origin.
#[derive(Debug, Clone)]
pub struct FamilyJet {
    pub base: JetCoeffs<Rat>,
    /// ∂²u/∂s∂x at the origin.
    pub u_sx: f64,
    /// ∂²u/∂s∂y at the origin.
    pub u_sy: f64,
    /// ∂²v/∂s∂x at the origin.
    pub v_sx: f64,
    /// ∂²v/∂s∂y at the origin.
    pub v_sy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub stratum: Label,
    pub conditions: Vec<Condition>,
}

/// Genericity of a one-parameter family around a codimension-one base germ:
/// transversality of the deformation to the stratum and, for the 2/5 edge,
/// which side of the family grows the double-point curve.
pub fn family_genericity(fj: &FamilyJet) -> Result<FamilyReport, ClassifyError> {
    let base = classify_jet(&fj.base)?;
    // Apply the same normalizations to the s-derivatives that classify_jet
    // applies to the base coefficients.
    let nx_zero = fj.base.ax[0].is_zero() && fj.base.bx[0].is_zero();
    let (mut cn, mut u_sx, mut u_sy, mut v_sx, mut v_sy) = if nx_zero {
        (mirror_xy(&fj.base), fj.u_sy, fj.u_sx, fj.v_sy, fj.v_sx)
    } else {
        (fj.base.clone(), fj.u_sx, fj.u_sy, fj.v_sx, fj.v_sy)
    };
    if cn.ax[0].is_zero() {
        cn = swap_uv(&cn);
        std::mem::swap(&mut u_sx, &mut v_sx);
        std::mem::swap(&mut u_sy, &mut v_sy);
    }
    let a10 = rat_f64(&cn.ax[0]);
    let a22 = rat_f64(&cn.ay[1]);
    let b10 = rat_f64(&cn.bx[0]);
    let b22 = rat_f64(&cn.by[1]);

    match base.label {
        Label::TwoFiveCuspidalEdge => {
            let ta = b22 * u_sy - a22 * v_sy;
            let tb = b10 * u_sx - a10 * v_sx;
            let side = b10 * b22 * u_sy + (2.0 * a22 * b10 - 3.0 * a10 * b22) * v_sy;
            let conditions = vec![
                banded_condition(
                    "family_transverse",
                    ta,
                    &[(b22 * u_sy).abs(), (a22 * v_sy).abs()],
                    false,
                ),
                banded_condition(
                    "family_swaps_type",
                    tb,
                    &[(b10 * u_sx).abs(), (a10 * v_sx).abs()],
                    false,
                ),
                banded_condition(
                    "double_point_side",
                    side,
                    &[
                        (b10 * b22 * u_sy).abs(),
                        ((2.0 * a22 * b10 - 3.0 * a10 * b22) * v_sy).abs(),
                    ],
                    true,
                ),
            ];
            Ok(FamilyReport {
                stratum: base.label,
                conditions,
            })
        }
        Label::Shcherbak => {
            let t = b10 * u_sy - a10 * v_sy;
            let mut conditions = vec![banded_condition(
                "family_transverse",
                t,
                &[(b10 * u_sy).abs(), (a10 * v_sy).abs()],
                false,
            )];
            for id in ["morse_offdiag", "shcherbak_transversal"] {
                if let Some(c) = base.condition(id) {
                    conditions.push(c.clone());
                }
            }
            Ok(FamilyReport {
                stratum: base.label,
                conditions,
            })
        }
        found => Err(ClassifyError::WrongStratum { found }),
    }
}

/// Strata of the Gauss map germ N itself, as a map to the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GaussStratum {
    Immersion,
    Fold,
    CuspSeries,
    Lips,
    Beaks,
    RankZeroI22,
    Excluded,
    Deeper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussMapReport {
    pub stratum: GaussStratum,
    /// For the cusp series (x, xy + P(y)): the exponent of the first
    /// nonvanishing term of P, when the jet order determines it.
    pub series_index: Option<usize>,
    pub conditions: Vec<Condition>,
}

impl GaussMapReport {
    pub fn condition_value(&self, id: &str) -> Option<f64> {
        self.conditions.iter().find(|c| c.id == id).map(|c| c.value)
    }
}

/// A-classification gateway for the Gauss map N as a plane germ, via its
/// chart Jacobian λ = u_x v_y − u_y v_x and the kernel field
/// κ = u_y ∂x − u_x ∂y, all in exact arithmetic.
pub fn classify_gauss_map_jet(c: &JetCoeffs<Rat>) -> Result<GaussMapReport, ClassifyError> {
    if c.order() < 3 {
        return Err(ClassifyError::OrderTooLow {
            order: c.order(),
            needed: 3,
        });
    }

    let nx_sq = c.ax[0].clone() * c.ax[0].clone() + c.bx[0].clone() * c.bx[0].clone();
    let ny_sq = c.ay[0].clone() * c.ay[0].clone() + c.by[0].clone() * c.by[0].clone();
    if nx_sq.is_zero() && ny_sq.is_zero() {
        // Rank zero: the 2-jet (a₂₀x²+a₂₂y², b₂₀x²+b₂₂y²) is equivalent to
        // (x², y²) exactly when its coefficient determinant is nonzero; the
        // degenerate cases admit no finitely determined harmonic germ.
        let i22 = c.ax[1].clone() * c.by[1].clone() - c.ay[1].clone() * c.bx[1].clone();
        let quad_sq = c.ax[1].clone() * c.ax[1].clone()
            + c.ay[1].clone() * c.ay[1].clone()
            + c.bx[1].clone() * c.bx[1].clone()
            + c.by[1].clone() * c.by[1].clone();
        let stratum = if !i22.is_zero() {
            GaussStratum::RankZeroI22
        } else {
            GaussStratum::Excluded
        };
        return Ok(GaussMapReport {
            stratum,
            series_index: None,
            conditions: vec![
                rat_cond("i22_det", &i22),
                rat_cond("j2n_quadratic_norm_sq", &quad_sq),
            ],
        });
    }

    let cn = if nx_sq.is_zero() { mirror_xy(c) } else { c.clone() };
    let cn = if cn.ax[0].is_zero() { swap_uv(&cn) } else { cn };

    let a10 = cn.ax[0].clone();
    let a20 = cn.ax[1].clone();
    let a30 = cn.ax[2].clone();
    let a11 = cn.ay[0].clone();
    let a22 = cn.ay[1].clone();
    let a33 = cn.ay[2].clone();
    let b10 = cn.bx[0].clone();
    let b20 = cn.bx[1].clone();
    let b30 = cn.bx[2].clone();
    let b11 = cn.by[0].clone();
    let b22 = cn.by[1].clone();
    let b33 = cn.by[2].clone();

    let c1 = a10.clone() * b11.clone() - a11.clone() * b10.clone();
    let mut conds = vec![rat_cond("n_singular", &c1)];
    if !c1.is_zero() {
        return Ok(GaussMapReport {
            stratum: GaussStratum::Immersion,
            series_index: None,
            conditions: conds,
        });
    }

    let order = cn.order().max(5);
    let j = expand_jet(&cn.zero_extend(order));
    let deg = order - 1;
    let ux = j.u.diff_x();
    let uy = j.u.diff_y();
    let vx = j.v.diff_x();
    let vy = j.v.diff_y();
    let lambda = ux
        .mul_trunc(&vy, deg)
        .sub(&uy.mul_trunc(&vx, deg));
    let kappa = |w: &Poly2<Rat>, d: usize| -> Poly2<Rat> {
        uy.mul_trunc(&w.diff_x(), d).sub(&ux.mul_trunc(&w.diff_y(), d))
    };

    // Printed fold and gateway coefficients, reported for inspection.
    let rxy = a10.clone() * b20.clone() - a20.clone() * b10.clone();
    let fold_coeff = rxy.clone() * a11.clone() * a11.clone()
        + (a10.clone() * b22.clone() - a22.clone() * b10.clone()) * a10.clone() * a10.clone();
    let gateway = a11.clone() * rxy.clone();
    conds.push(rat_cond("fold_coeff", &fold_coeff));
    conds.push(rat_cond("gateway_coeff", &gateway));

    let k1 = kappa(&lambda, deg - 1);
    if !k1.get(0, 0).is_zero() {
        return Ok(GaussMapReport {
            stratum: GaussStratum::Fold,
            series_index: None,
            conditions: conds,
        });
    }

    let grad_sq = lambda.get(1, 0).clone() * lambda.get(1, 0).clone()
        + lambda.get(0, 1).clone() * lambda.get(0, 1).clone();
    conds.push(rat_cond("grad_lambda_sq", &grad_sq));
    if !grad_sq.is_zero() {
        // Cusp series (x, xy + P(y)): the exponent of P's first term is one
        // more than the number of κ-applications needed to reach a nonzero
        // value, which the supplied order bounds.
        let mut series_index = None;
        let mut w = k1;
        let mut d = deg - 1;
        for m in 2..cn.order() {
            d -= 1;
            w = kappa(&w, d);
            if !w.get(0, 0).is_zero() {
                series_index = Some(m + 1);
                break;
            }
        }
        return Ok(GaussMapReport {
            stratum: GaussStratum::CuspSeries,
            series_index,
            conditions: conds,
        });
    }

    // λ critical at the origin: Morse dichotomy of λ decides lips/beaks.
    let q = a10.clone() * b33.clone() - a33.clone() * b10.clone();
    let p = a10.clone() * b30.clone() - a30.clone() * b10.clone();
    let l1 = -(Rat::from_int(3) * a11.clone() * q.clone());
    let l2 = Rat::from_int(3) * a11.clone() * a11.clone() * q.clone();
    let l3 = q.clone() * a10.clone() * a10.clone() * a10.clone()
        - p.clone() * a11.clone() * a11.clone() * a11.clone();
    let disc = l2.clone() * l2.clone() - Rat::from_int(3) * l1.clone() * l3.clone();
    conds.push(rat_cond("l1", &l1));
    conds.push(rat_cond("l2", &l2));
    conds.push(rat_cond("l3", &l3));
    conds.push(rat_sign_cond("lb_discriminant", &disc));
    conds.push(rat_sign_cond("pq_product", &(p.clone() * q.clone())));

    let h20 = lambda.get(2, 0) * Rat::from_int(2);
    let h11 = lambda.get(1, 1);
    let h02 = lambda.get(0, 2) * Rat::from_int(2);
    let det = h20.clone() * h02.clone() - h11.clone() * h11.clone();
    conds.push(rat_sign_cond("det_hess_lambda", &det));
    if det > Rat::zero() {
        return Ok(GaussMapReport {
            stratum: GaussStratum::Lips,
            series_index: None,
            conditions: conds,
        });
    }
    if det < Rat::zero() {
        let k2 = kappa(&kappa(&lambda, deg - 1), deg - 2);
        let kk = k2.get(0, 0);
        conds.push(rat_cond("kappa2_lambda", &kk));
        if !kk.is_zero() {
            return Ok(GaussMapReport {
                stratum: GaussStratum::Beaks,
                series_index: None,
                conditions: conds,
            });
        }
    }
    Ok(GaussMapReport {
        stratum: GaussStratum::Deeper,
        series_index: None,
        conditions: conds,
    })
}
