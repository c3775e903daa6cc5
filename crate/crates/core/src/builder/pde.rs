//! Characteristic-coordinate marching for the harmonic map system,
//! independent of the loop-group pipeline.
//!
//! In rotated coordinates t = (x+y)/2, s = (x−y)/2 the system
//! u_{xy} = G_u(u, v, ∇u, ∇v) becomes u_{ss} = u_{tt} − 4G_u, marched away
//! from the diagonal s = 0 by leapfrog at CFL ratio 1 (the grid itself is
//! characteristic).

use super::{BuildError, Grid, CHART_OVERFLOW};
use crate::algebra::Vec3;
use crate::cauchy::ScalarCurve;
use crate::jets::{jet_to_poly_cauchy, JetCoeffs, PolyCauchyData};
use crate::poly::Rat;
use num_traits::ToPrimitive;

/// Cauchy data (u, u_x, v, v_x) along the diagonal x = y, parameterised by t.
#[derive(Clone)]
pub struct DiagonalData {
    pub u: ScalarCurve,
    pub ux: ScalarCurve,
    pub v: ScalarCurve,
    pub vx: ScalarCurve,
}

impl DiagonalData {
    pub fn from_poly_cauchy(d: &PolyCauchyData<Rat>) -> DiagonalData {
        let diag = |c: &[Rat]| {
            // u_diag stores the t¹..tⁿ coefficients of u(t,t).
            let mut v = vec![0.0];
            v.extend(c.iter().map(|r| r.to_f64().expect("finite rational")));
            ScalarCurve::poly(v)
        };
        let deriv = |c: &[Rat]| {
            ScalarCurve::poly(c.iter().map(|r| r.to_f64().expect("finite rational")).collect())
        };
        DiagonalData {
            u: diag(&d.u_diag),
            ux: deriv(&d.ux_diag),
            v: diag(&d.v_diag),
            vx: deriv(&d.vx_diag),
        }
    }

    pub fn from_jet(c: &JetCoeffs<Rat>) -> DiagonalData {
        DiagonalData::from_poly_cauchy(&jet_to_poly_cauchy(c))
    }
}

/// Gridded chart functions and the Gauss map N = (u, v, 1)/√(1+u²+v²).
pub struct MarchOutput {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub n: Vec<Vec3>,
}

fn rhs(u: f64, v: f64, ux: f64, uy: f64, vx: f64, vy: f64) -> (f64, f64) {
    let w = 1.0 + u * u + v * v;
    let mixed = ux * vy + uy * vx;
    (
        (2.0 * u * ux * uy + v * mixed) / w,
        (2.0 * v * vx * vy + u * mixed) / w,
    )
}

/// March the system over a square grid (x and y samples must coincide) from
/// diagonal data. Levels d = ix − iy = ±1, ±2 are started by second-order
/// Taylor expansion in s with u_s = 2u_x − u_t and u_{ss} = u_{tt} − 4G_u;
/// levels |d| ≥ 3 by the leapfrog diamond
/// u(t, s±h) = u(t+h, s) + u(t−h, s) − u(t, s∓h) − 4h²G(t, s).
pub fn pde_march(data: &DiagonalData, grid: &Grid) -> Result<MarchOutput, BuildError> {
    let n = grid.nx();
    assert_eq!(n, grid.ny(), "marching needs a square grid");
    assert!(
        grid.x()
            .iter()
            .zip(grid.y())
            .all(|(a, b)| (a - b).abs() < 1e-12),
        "marching needs identical x and y samples"
    );
    assert!(n >= 4, "marching needs at least a 4x4 grid");
    let h = grid.hx();

    let mut u = vec![f64::NAN; n * n];
    let mut v = vec![f64::NAN; n * n];

    // Diagonal values and Taylor starts for the first two levels each side.
    for i in 0..n {
        let t = grid.x()[i];
        u[i * n + i] = data.u.eval(t);
        v[i * n + i] = data.v.eval(t);
    }
    for d in 1..=2usize.min(n - 1) {
        let s = d as f64 * h / 2.0;
        for i in 0..n - d {
            // (ix, iy) = (i+d, i) above the diagonal, (i, i+d) below.
            let t = (grid.x()[i + d] + grid.x()[i]) / 2.0;
            for (ix, iy, sgn) in [(i + d, i, 1.0), (i, i + d, -1.0)] {
                let (u0, v0) = (data.u.eval(t), data.v.eval(t));
                let (ut, vt) = (data.u.derivative_at(1, t), data.v.derivative_at(1, t));
                let (ux, vx) = (data.ux.eval(t), data.vx.eval(t));
                let (uy, vy) = (ut - ux, vt - vx);
                let (gu, gv) = rhs(u0, v0, ux, uy, vx, vy);
                let (us, vs) = (2.0 * ux - ut, 2.0 * vx - vt);
                let (uss, vss) = (
                    data.u.derivative_at(2, t) - 4.0 * gu,
                    data.v.derivative_at(2, t) - 4.0 * gv,
                );
                let ss = sgn * s;
                u[iy * n + ix] = u0 + ss * us + 0.5 * ss * ss * uss;
                v[iy * n + ix] = v0 + ss * vs + 0.5 * ss * ss * vss;
            }
        }
    }

    // Leapfrog for the outer levels. The diamond for the produced point
    // (p, q) is centred one level in: gradients there are fully central.
    for d in 3..n {
        for p in d..n {
            let q = p - d;
            for (tx, ty, cx, cy, ox, oy) in [
                // (produced) above: centre (p−1, q+1), opposite (p−2, q+2).
                (p, q, p - 1, q + 1, p - 2, q + 2),
                // below the diagonal, mirrored.
                (q, p, q + 1, p - 1, q + 2, p - 2),
            ] {
                let c = cy * n + cx;
                let (uc, vc) = (u[c], v[c]);
                let ux = (u[cy * n + cx + 1] - u[cy * n + cx - 1]) / (2.0 * h);
                let uy = (u[(cy + 1) * n + cx] - u[(cy - 1) * n + cx]) / (2.0 * h);
                let vx = (v[cy * n + cx + 1] - v[cy * n + cx - 1]) / (2.0 * h);
                let vy = (v[(cy + 1) * n + cx] - v[(cy - 1) * n + cx]) / (2.0 * h);
                let (gu, gv) = rhs(uc, vc, ux, uy, vx, vy);
                let plus = (cy + 1) * n + cx + 1;
                let minus = (cy - 1) * n + cx - 1;
                let opp = oy * n + ox;
                let un = u[plus] + u[minus] - u[opp] - 4.0 * h * h * gu;
                let vn = v[plus] + v[minus] - v[opp] - 4.0 * h * h * gv;
                if un.abs() + vn.abs() > CHART_OVERFLOW {
                    return Err(BuildError::Overflow {
                        x: grid.x()[tx],
                        y: grid.y()[ty],
                        value: un.abs() + vn.abs(),
                    });
                }
                u[ty * n + tx] = un;
                v[ty * n + tx] = vn;
            }
        }
    }

    let nfield = u
        .iter()
        .zip(&v)
        .map(|(&uu, &vv)| {
            let delta = (1.0 + uu * uu + vv * vv).powf(-0.5);
            Vec3::new(uu * delta, vv * delta, delta)
        })
        .collect();
    Ok(MarchOutput { u, v, n: nfield })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{expand_jet, jet_eval};

    #[test]
    fn zero_data_stays_zero() {
        let data = DiagonalData {
            u: ScalarCurve::constant(0.0),
            ux: ScalarCurve::constant(0.0),
            v: ScalarCurve::constant(0.0),
            vx: ScalarCurve::constant(0.0),
        };
        let g = Grid::square((-1.0, 1.0), 33);
        let out = pde_march(&data, &g).unwrap();
        assert!(out.u.iter().chain(&out.v).all(|&w| w == 0.0));
        assert!(out
            .n
            .iter()
            .all(|nv| (*nv - Vec3::new(0.0, 0.0, 1.0)).norm() == 0.0));
    }

    #[test]
    fn vacuum_data_reproduces_tangent_sum() {
        // u(x,y) = tan((x+y)/2), v = 0 solves the system: N is the vacuum
        // Gauss map (0, −sin(x+y), cos(x+y)) after the chart change... the
        // chart is N = δ(u, v, 1), so u = N_1/N_3. For the one-dimensional
        // family N = (sin(x+y), 0, cos(x+y)), u = tan(x+y), v = 0.
        let data = DiagonalData {
            u: ScalarCurve::func(|t: f64| (2.0 * t).tan()),
            ux: ScalarCurve::func(|t: f64| 1.0 + (2.0 * t).tan().powi(2)),
            v: ScalarCurve::constant(0.0),
            vx: ScalarCurve::constant(0.0),
        };
        let g = Grid::square((-0.5, 0.5), 81);
        let out = pde_march(&data, &g).unwrap();
        let mut worst = 0.0f64;
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let w = (g.x()[ix] + g.y()[iy]).tan();
                worst = worst.max((out.u[iy * g.nx() + ix] - w).abs());
            }
        }
        assert!(worst < 2e-4, "worst {worst:.3e}");
    }

    #[test]
    fn march_is_second_order() {
        let data = DiagonalData {
            u: ScalarCurve::func(|t: f64| (2.0 * t).tan()),
            ux: ScalarCurve::func(|t: f64| 1.0 + (2.0 * t).tan().powi(2)),
            v: ScalarCurve::constant(0.0),
            vx: ScalarCurve::constant(0.0),
        };
        let err = |n: usize| {
            let g = Grid::square((-0.5, 0.5), n);
            let out = pde_march(&data, &g).unwrap();
            let mut worst = 0.0f64;
            for iy in 0..n {
                for ix in 0..n {
                    let w = (g.x()[ix] + g.y()[iy]).tan();
                    worst = worst.max((out.u[iy * n + ix] - w).abs());
                }
            }
            worst
        };
        let ratio = err(41) / err(81);
        assert!(
            (2.8..6.0).contains(&ratio),
            "expected ≈4 for order 2, got {ratio:.2}"
        );
    }

    #[test]
    fn jet_data_matches_taylor_expansion_near_origin() {
        // The march takes the degree-3 polynomial diagonal data exactly, so
        // the matching Taylor reference is the jet of that same data padded
        // with zeros to order 8 (padding the jet instead would change the
        // diagonal trace beyond degree 3).
        let c = JetCoeffs::from_ints(&[1, 1, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]);
        let data = DiagonalData::from_jet(&c);
        let mut padded = jet_to_poly_cauchy(&c);
        let zero = Rat::from_integer(0.into());
        padded.u_diag.resize(8, zero.clone());
        padded.ux_diag.resize(8, zero.clone());
        padded.v_diag.resize(8, zero.clone());
        padded.vx_diag.resize(8, zero);
        let j = expand_jet(&crate::jets::poly_cauchy_to_jet(&padded)).to_f64();

        let g = Grid::square((-0.2, 0.2), 81);
        let out = pde_march(&data, &g).unwrap();
        let mut worst = 0.0f64;
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let (x, y) = (g.x()[ix], g.y()[iy]);
                if x.abs().max(y.abs()) > 0.1 {
                    continue;
                }
                let jv = jet_eval(&j, x, y);
                let n_march = out.n[iy * g.nx() + ix];
                worst = worst.max((n_march - jv.value_vec3()).norm());
            }
        }
        // O(h²) marching error plus O(|t|⁹) jet truncation.
        assert!(worst < 5e-5, "worst {worst:.3e}");
    }

    #[test]
    fn overflow_is_reported() {
        // u(x,y) = 8e5·y solves the system exactly (u_x ≡ 0 kills every
        // nonlinear term) and the scheme reproduces linear solutions exactly,
        // so the chart bound 1e6 is crossed at marched points with |y| > 1.25.
        let data = DiagonalData {
            u: ScalarCurve::poly(vec![0.0, 8e5]),
            ux: ScalarCurve::constant(0.0),
            v: ScalarCurve::constant(0.0),
            vx: ScalarCurve::constant(0.0),
        };
        let g = Grid::square((-1.5, 1.5), 121);
        assert!(matches!(
            pde_march(&data, &g),
            Err(BuildError::Overflow { .. })
        ));
    }
}
