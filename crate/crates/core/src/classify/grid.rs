//! Banded finite-difference recognition on built surfaces.
//!
//! The grid route evaluates the same chain as the exact routes: σ and its
//! derivatives along η̃ = ⟨f_y,f_y⟩ ∂x − ⟨f_x,f_y⟩ ∂y, then the Hessian of σ
//! where the gradient degenerates. Every verdict carries both a relative
//! band against the competing terms and an absolute floor for the
//! finite-difference noise at the relevant derivative order.

use super::{Condition, ClassifyError, Label, Method, SingularityReport, Verdict, NONZERO_BAND, ZERO_BAND};
use crate::builder::mesh::Polyline;
use crate::builder::{field_dx, field_dy, Grid, SurfaceData};

/// Absolute noise level of the gridded σ field, from the build residuals of
/// the analytic reference surfaces. Each derivative order divides by h.
pub const GRID_SIGMA_NOISE: f64 = 1e-6;

/// Ratio between the nonzero threshold and the zero floor; values in the
/// gap stay unresolved.
const FLOOR_GAP: f64 = 10.0;

fn noise_floor(order: u32, h: f64) -> f64 {
    GRID_SIGMA_NOISE / h.powi(order as i32)
}

fn grid_verdict(value: f64, competing: &[f64], floor: f64, signed: bool) -> Verdict {
    if !value.is_finite() {
        return Verdict::Unresolved;
    }
    let scale = competing
        .iter()
        .fold(value.abs(), |m, t| if t.is_finite() { m.max(t.abs()) } else { m });
    let lo = (ZERO_BAND * scale).max(floor);
    let hi = (NONZERO_BAND * scale).max(FLOOR_GAP * floor);
    if value.abs() <= lo {
        Verdict::Zero
    } else if value.abs() >= hi {
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

fn grid_condition(id: &str, value: f64, competing: &[f64], floor: f64, signed: bool) -> Condition {
    Condition {
        id: id.to_string(),
        value,
        verdict: grid_verdict(value, competing, floor, signed),
    }
}

// Scalar twin of the Vec3 stencils in the builder: 5-point order-4 first
// derivative with the same small-grid and boundary fallbacks.
fn d1_scalar(get: &dyn Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    assert!(n >= 2, "differencing needs at least 2 samples per axis");
    if n < 5 {
        let w2 = 1.0 / (2.0 * h);
        return if n == 2 {
            (get(1) - get(0)) / h
        } else if i == 0 {
            (-3.0 * get(0) + 4.0 * get(1) - get(2)) * w2
        } else if i + 1 == n {
            (get(n - 3) - 4.0 * get(n - 2) + 3.0 * get(n - 1)) * w2
        } else {
            (get(i + 1) - get(i - 1)) * w2
        };
    }
    let w12 = 1.0 / (12.0 * h);
    let comb = |base: usize, w: [f64; 5]| {
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            acc += get(base + k) * wk * w12;
        }
        acc
    };
    if i >= 2 && i + 2 < n {
        comb(i - 2, [1.0, -8.0, 0.0, 8.0, -1.0])
    } else if i == 0 {
        comb(0, [-25.0, 48.0, -36.0, 16.0, -3.0])
    } else if i == 1 {
        comb(0, [-3.0, -10.0, 18.0, -6.0, 1.0])
    } else if i == n - 2 {
        comb(n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0])
    } else {
        comb(n - 5, [3.0, -16.0, 36.0, -48.0, 25.0])
    }
}

fn scalar_dx(field: &[f64], g: &Grid) -> Vec<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let get = |k: usize| field[iy * nx + k];
            out[iy * nx + ix] = d1_scalar(&get, ix, nx, g.hx());
        }
    }
    out
}

fn scalar_dy(field: &[f64], g: &Grid) -> Vec<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let get = |k: usize| field[k * nx + ix];
            out[iy * nx + ix] = d1_scalar(&get, iy, ny, g.hy());
        }
    }
    out
}

/// The directional-derivative fields of the wave-front chain: g1 = η̃σ,
/// g2 = η̃g1, g3 = η̃g2, with η̃ = ⟨f_y,f_y⟩ ∂x − ⟨f_x,f_y⟩ ∂y.
struct ChainFields {
    b2: Vec<f64>,
    g: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    g3: Vec<f64>,
    sigma_x: Vec<f64>,
    sigma_y: Vec<f64>,
}

fn chain_fields(s: &SurfaceData) -> ChainFields {
    let g = &s.grid;
    let fx = field_dx(&s.f, g);
    let fy = field_dy(&s.f, g);
    let b2: Vec<f64> = fy.iter().map(|v| v.dot(*v)).collect();
    let gg: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a.dot(*b)).collect();
    let eta = |w: &[f64]| -> Vec<f64> {
        let wx = scalar_dx(w, g);
        let wy = scalar_dy(w, g);
        (0..w.len())
            .map(|i| b2[i] * wx[i] - gg[i] * wy[i])
            .collect()
    };
    let sigma_x = scalar_dx(&s.sigma, g);
    let sigma_y = scalar_dy(&s.sigma, g);
    let g1: Vec<f64> = (0..s.sigma.len())
        .map(|i| b2[i] * sigma_x[i] - gg[i] * sigma_y[i])
        .collect();
    let g2 = eta(&g1);
    let g3 = eta(&g2);
    ChainFields {
        b2,
        g: gg,
        g1,
        g2,
        g3,
        sigma_x,
        sigma_y,
    }
}

/// Classification of a singular surface point from gridded data alone.
///
/// The query point snaps to the nearest grid node. Points whose |σ| exceeds
/// the surface's regularity threshold are rejected as `NotSingular`; points
/// where the criteria stay inside the noise bands come back `Unresolved`
/// rather than mislabelled.
pub fn classify_grid(
    s: &SurfaceData,
    point: (f64, f64),
) -> Result<SingularityReport, ClassifyError> {
    let g = &s.grid;
    let ix = g.nearest_x(point.0).ok_or(ClassifyError::NotOnCurve {
        t0: point.0,
        lo: g.x()[0],
        hi: g.x()[g.nx() - 1],
    })?;
    let iy = g.nearest_y(point.1).ok_or(ClassifyError::NotOnCurve {
        t0: point.1,
        lo: g.y()[0],
        hi: g.y()[g.ny() - 1],
    })?;
    let idx = g.index(ix, iy);
    let h = g.hx().max(g.hy());

    let sigma0 = s.sigma[idx];
    let threshold = s.sigma_threshold();
    if !s.ok[idx] || !sigma0.is_finite() {
        return Ok(SingularityReport::new(
            Label::Unresolved,
            Method::Grid,
            vec![grid_condition("sigma", sigma0, &[], 0.0, false)],
        ));
    }
    if sigma0.abs() > threshold {
        return Err(ClassifyError::NotSingular {
            sigma: sigma0,
            threshold,
        });
    }

    let ch = chain_fields(s);
    let mut conds = vec![Condition {
        id: "sigma".to_string(),
        value: sigma0,
        verdict: Verdict::Zero,
    }];

    // Front test: |f_y| bounded away from the noise of a position field.
    let b_cond = grid_condition(
        "b_coeff",
        ch.b2[idx].sqrt(),
        &[1.0],
        noise_floor(1, h) * h,
        false,
    );
    conds.push(b_cond.clone());

    let g1_floor = noise_floor(1, h) * (ch.b2[idx].abs() + ch.g[idx].abs()).max(1e-12);
    let g1_cond = grid_condition(
        "eta_sigma",
        ch.g1[idx],
        &[ch.b2[idx] * ch.sigma_x[idx], ch.g[idx] * ch.sigma_y[idx]],
        g1_floor,
        false,
    );

    if !b_cond.verdict.is_nonzero() {
        // Below the front stratum the higher chain is not trustworthy on a
        // grid; report what was measured and stop.
        conds.push(g1_cond);
        return Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds));
    }

    conds.push(g1_cond.clone());
    if g1_cond.verdict.is_nonzero() {
        return Ok(SingularityReport::new(
            Label::CuspidalEdge,
            Method::Grid,
            conds,
        ));
    }
    if g1_cond.verdict != Verdict::Zero {
        return Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds));
    }

    let sxx = scalar_dx(&ch.sigma_x, g)[idx];
    let sxy = scalar_dy(&ch.sigma_x, g)[idx];
    let syy = scalar_dy(&ch.sigma_y, g)[idx];
    let hess_scale = sxx.abs() + 2.0 * sxy.abs() + syy.abs();
    let grad_sq = ch.sigma_x[idx] * ch.sigma_x[idx] + ch.sigma_y[idx] * ch.sigma_y[idx];
    let grad_cond = grid_condition(
        "grad_sigma_sq",
        grad_sq,
        &[(hess_scale * h).powi(2)],
        noise_floor(1, h).powi(2),
        false,
    );
    conds.push(grad_cond.clone());

    let chain_scale = ch.b2[idx].abs() + ch.g[idx].abs();
    let g2_floor = noise_floor(2, h) * chain_scale * chain_scale.max(1.0);
    let g2_cond = grid_condition("eta_eta_sigma", ch.g2[idx], &[], g2_floor, false);
    let g3_floor = noise_floor(3, h) * chain_scale * chain_scale * chain_scale.max(1.0);
    let g3_cond = grid_condition("eta3_sigma", ch.g3[idx], &[], g3_floor, false);

    if grad_cond.verdict.is_nonzero() {
        conds.push(g2_cond.clone());
        if g2_cond.verdict.is_nonzero() {
            return Ok(SingularityReport::new(
                Label::Swallowtail,
                Method::Grid,
                conds,
            ));
        }
        if g2_cond.verdict == Verdict::Zero {
            conds.push(g3_cond.clone());
            if g3_cond.verdict.is_nonzero() {
                return Ok(SingularityReport::new(
                    Label::CuspidalButterfly,
                    Method::Grid,
                    conds,
                ));
            }
        }
        return Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds));
    }
    if grad_cond.verdict != Verdict::Zero {
        return Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds));
    }

    let minus_det = sxy * sxy - sxx * syy;
    let morse_cond = grid_condition(
        "morse_discriminant",
        minus_det,
        &[sxy * sxy, sxx * syy],
        noise_floor(2, h).powi(2),
        true,
    );
    conds.push(morse_cond.clone());
    match morse_cond.verdict {
        Verdict::Negative => Ok(SingularityReport::new(
            Label::CuspidalLips,
            Method::Grid,
            conds,
        )),
        Verdict::Positive => {
            conds.push(g2_cond.clone());
            if g2_cond.verdict.is_nonzero() {
                return Ok(SingularityReport::new(
                    Label::CuspidalBeaks,
                    Method::Grid,
                    conds,
                ));
            }
            Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds))
        }
        _ => Ok(SingularityReport::new(Label::Unresolved, Method::Grid, conds)),
    }
}

fn bilinear(field: &[f64], g: &Grid, x: f64, y: f64) -> f64 {
    let xs = g.x();
    let ys = g.y();
    let fx = ((x - xs[0]) / g.hx()).clamp(0.0, (g.nx() - 1) as f64);
    let fy = ((y - ys[0]) / g.hy()).clamp(0.0, (g.ny() - 1) as f64);
    let ix = (fx.floor() as usize).min(g.nx() - 2);
    let iy = (fy.floor() as usize).min(g.ny() - 2);
    let tx = fx - ix as f64;
    let ty = fy - iy as f64;
    let v00 = field[g.index(ix, iy)];
    let v10 = field[g.index(ix + 1, iy)];
    let v01 = field[g.index(ix, iy + 1)];
    let v11 = field[g.index(ix + 1, iy + 1)];
    (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
}

/// Swallowtail candidates along singular curves: vertices where g1 = η̃σ
/// changes sign between consecutive polyline points, located by linear
/// interpolation. Sign changes are only accepted once both endpoint values
/// clear the finite-difference noise floor, so tangential wiggle near a
/// degenerate edge does not spray spurious points.
pub fn swallowtail_points(s: &SurfaceData, curves: &[Polyline]) -> Vec<(f64, f64)> {
    let g1 = chain_fields(s).g1;
    let g = &s.grid;
    let h = g.hx().max(g.hy());
    let floor = FLOOR_GAP * noise_floor(1, h);
    let mut out = Vec::new();
    for curve in curves {
        let pts = &curve.points;
        if pts.len() < 2 {
            continue;
        }
        // Vertices inside the noise band carry no usable sign; crossings are
        // read between consecutive vertices that clear the floor.
        let survivors: Vec<(usize, f64)> = pts
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| (k, bilinear(&g1, g, x, y)))
            .filter(|(_, v)| v.is_finite() && v.abs() >= floor)
            .collect();
        if survivors.len() < 2 {
            continue;
        }
        let m = survivors.len();
        let last = if curve.closed { m } else { m - 1 };
        for k in 0..last {
            let (i0, v0) = survivors[k];
            let (i1, v1) = survivors[(k + 1) % m];
            if (v0 > 0.0) == (v1 > 0.0) {
                continue;
            }
            let bias = v0 / (v0 - v1);
            let (p0, p1) = (pts[i0], pts[i1]);
            out.push((
                p0.0 + bias * (p1.0 - p0.0),
                p0.1 + bias * (p1.1 - p0.1),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::mesh::singular_contour;
    use crate::builder::{dalembert_solve, BuildOptions, Grid};
    use crate::cauchy::jet_to_potential;
    use crate::classify::classify_jet;
    use crate::jets::JetCoeffs;

    fn surface(ax: &[i64], ay: &[i64], bx: &[i64], by: &[i64]) -> SurfaceData {
        let c = JetCoeffs::from_ints(ax, ay, bx, by);
        let p = jet_to_potential(&c, (-0.4, 0.4)).unwrap();
        let grid = Grid::square((-0.4, 0.4), 81);
        dalembert_solve(&p, &grid, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn grid_route_agrees_with_jet_route_on_edge_and_tail() {
        let cases: [(&[i64], &[i64], &[i64], &[i64]); 2] = [
            (&[1, 1, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]),
            (&[1, 1, 0], &[1, 2, 0], &[1, 0, 0], &[1, 1, 0]),
        ];
        for (ax, ay, bx, by) in cases {
            let c = JetCoeffs::from_ints(ax, ay, bx, by);
            let expected = classify_jet(&c).unwrap().label;
            let s = surface(ax, ay, bx, by);
            let got = classify_grid(&s, (0.0, 0.0)).unwrap();
            assert_eq!(got.label, expected, "jet {ax:?} {ay:?} {bx:?} {by:?}");
            assert_eq!(got.method, Method::Grid);
        }
    }

    #[test]
    fn grid_route_rejects_regular_points() {
        let s = surface(&[1, 1, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]);
        // The edge through the origin is the line x = y for this datum, so
        // a point well off the diagonal is regular.
        let err = classify_grid(&s, (0.2, -0.2)).unwrap_err();
        assert!(matches!(err, ClassifyError::NotSingular { .. }));
        let err = classify_grid(&s, (9.0, 0.0)).unwrap_err();
        assert!(matches!(err, ClassifyError::NotOnCurve { .. }));
    }

    #[test]
    fn swallowtail_point_found_on_contour() {
        let s = surface(&[1, 1, 0], &[1, 2, 0], &[1, 0, 0], &[1, 1, 0]);
        let contours = singular_contour(&s);
        assert!(!contours.is_empty());
        let pts = swallowtail_points(&s, &contours);
        assert_eq!(pts.len(), 1, "points: {pts:?}");
        let (x, y) = pts[0];
        assert!(x.abs() < 0.02 && y.abs() < 0.02, "found at ({x}, {y})");
    }

    #[test]
    fn cuspidal_edge_contour_has_no_swallowtail_points() {
        let s = surface(&[1, 1, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]);
        let contours = singular_contour(&s);
        assert!(!contours.is_empty());
        let pts = swallowtail_points(&s, &contours);
        assert!(pts.is_empty(), "unexpected points: {pts:?}");
    }
}
