//! Gridded surface construction.
//!
//! The main entry point is [`dalembert_solve`]: integrate the two potential
//! ODEs along the axes, Birkhoff-factorize per grid point, and read the
//! surface off the extended frame through the Sym formula. The module also
//! provides the direct frontal integrator (`f_x = N×N_x`, `f_y = −N×N_y`),
//! fundamental forms, parallel surfaces, and an independent characteristic
//! marching scheme for the underlying PDE system used as a cross-check.

pub mod mesh;
pub mod pde;

use crate::algebra::{
    e3, su2_residual, su2_to_vec_unchecked, unitarity_residual, Mat2C, Vec3, SU2_TOL,
};
use crate::cauchy::PotentialPair;
use crate::loops::{
    birkhoff_k_factor, integrate_loop_ode_path, LoopAlgebraForm, TwistedLaurentLoop,
    DEFAULT_CIRCLE_SAMPLES, DEFAULT_STEPS_PER_UNIT, DEFAULT_TRUNCATION,
};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

type C64 = Complex64;

/// Points with |σ| ≤ factor·h² are treated as singular when evaluating
/// quantities that require df to have full rank.
pub const SIGMA_REGULARITY_FACTOR: f64 = 10.0;

/// |u|+|v| beyond this means the solution left the coordinate chart.
pub const CHART_OVERFLOW: f64 = 1e6;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("base point ({0}, {1}) does not lie on the grid")]
    BaseOffGrid(f64, f64),
    #[error("factorization failed at the base point: {0}")]
    BasePoint(crate::loops::LoopError),
    #[error("marching left the chart at (x, y) = ({x}, {y}): |u|+|v| = {value:.3e}")]
    Overflow { x: f64, y: f64, value: f64 },
}

/// Uniform rectangular grid in the null coordinates (x, y).
#[derive(Debug, Clone)]
pub struct Grid {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn linspace(range: (f64, f64), n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least 2 samples per axis");
    assert!(range.1 > range.0, "range must be ascending");
    let h = (range.1 - range.0) / (n - 1) as f64;
    (0..n).map(|i| range.0 + i as f64 * h).collect()
}

impl Grid {
    pub fn uniform(x_range: (f64, f64), nx: usize, y_range: (f64, f64), ny: usize) -> Grid {
        Grid {
            x: linspace(x_range, nx),
            y: linspace(y_range, ny),
        }
    }

    pub fn square(range: (f64, f64), n: usize) -> Grid {
        Grid::uniform(range, n, range, n)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn hx(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn hy(&self) -> f64 {
        self.y[1] - self.y[0]
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx() && iy < self.ny());
        iy * self.nx() + ix
    }

    fn nearest(samples: &[f64], h: f64, t: f64) -> Option<usize> {
        let i = ((t - samples[0]) / h).round();
        if i < 0.0 || i >= samples.len() as f64 {
            return None;
        }
        let i = i as usize;
        ((samples[i] - t).abs() <= 1e-6 * h).then_some(i)
    }

    pub fn nearest_x(&self, t: f64) -> Option<usize> {
        Self::nearest(&self.x, self.hx(), t)
    }

    pub fn nearest_y(&self, t: f64) -> Option<usize> {
        Self::nearest(&self.y, self.hy(), t)
    }
}

/// Numerical parameters of the d'Alembert pipeline.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub truncation: usize,
    pub circle_samples: usize,
    pub rk4_steps_per_unit: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            truncation: DEFAULT_TRUNCATION,
            circle_samples: DEFAULT_CIRCLE_SAMPLES,
            rk4_steps_per_unit: DEFAULT_STEPS_PER_UNIT,
        }
    }
}

/// Worst residuals seen over the grid.
#[derive(Debug, Clone, Default)]
pub struct BuildDiagnostics {
    /// Max Laurent tail mass of the extended frames (truncation quality).
    pub max_tail_mass: f64,
    /// Max deviation of F(1) from unitarity.
    pub max_unitarity_residual: f64,
    /// Max non-su(2) part of the Sym-formula output.
    pub max_su2_residual: f64,
    /// Grid points where the factorization or the frame checks failed.
    pub failed_points: usize,
}

/// Surface (f, N) with frame, singular-set function, and per-point status.
/// Layout is row-major with x fastest: index = iy·nx + ix.
#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub grid: Grid,
    pub base: (usize, usize),
    pub f: Vec<Vec3>,
    pub n: Vec<Vec3>,
    pub frame: Vec<Mat2C>,
    pub sigma: Vec<f64>,
    pub ok: Vec<bool>,
    pub diagnostics: BuildDiagnostics,
}

impl SurfaceData {
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        self.grid.index(ix, iy)
    }

    pub fn f_at(&self, ix: usize, iy: usize) -> Vec3 {
        self.f[self.idx(ix, iy)]
    }

    pub fn n_at(&self, ix: usize, iy: usize) -> Vec3 {
        self.n[self.idx(ix, iy)]
    }

    pub fn sigma_at(&self, ix: usize, iy: usize) -> f64 {
        self.sigma[self.idx(ix, iy)]
    }

    pub fn sigma_threshold(&self) -> f64 {
        let h = self.grid.hx().max(self.grid.hy());
        SIGMA_REGULARITY_FACTOR * h * h
    }
}

// 5-point first-derivative stencils of order 4. `get` samples one grid line.
fn d1_line(get: &dyn Fn(usize) -> Vec3, i: usize, n: usize, h: f64) -> Vec3 {
    assert!(n >= 2, "differencing needs at least 2 samples per axis");
    if n < 5 {
        // Grids too small for the wide stencils fall back to lower order.
        let w2 = 1.0 / (2.0 * h);
        return if n == 2 {
            (get(1) - get(0)).scale(1.0 / h)
        } else if i == 0 {
            (get(0).scale(-3.0) + get(1).scale(4.0) - get(2)).scale(w2)
        } else if i + 1 == n {
            (get(n - 3) - get(n - 2).scale(4.0) + get(n - 1).scale(3.0)).scale(w2)
        } else {
            (get(i + 1) - get(i - 1)).scale(w2)
        };
    }
    let w12 = 1.0 / (12.0 * h);
    let comb = |base: usize, w: [f64; 5]| {
        let mut acc = Vec3::ZERO;
        for (k, wk) in w.iter().enumerate() {
            acc = acc + get(base + k).scale(wk * w12);
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

/// ∂/∂x of a gridded Vec3 field, order 4.
pub fn field_dx(field: &[Vec3], g: &Grid) -> Vec<Vec3> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![Vec3::ZERO; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let get = |k: usize| field[iy * nx + k];
            out[iy * nx + ix] = d1_line(&get, ix, nx, g.hx());
        }
    }
    out
}

/// ∂/∂y of a gridded Vec3 field, order 4.
pub fn field_dy(field: &[Vec3], g: &Grid) -> Vec<Vec3> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![Vec3::ZERO; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let get = |k: usize| field[k * nx + ix];
            out[iy * nx + ix] = d1_line(&get, iy, ny, g.hy());
        }
    }
    out
}

fn integrate_axis(
    form: &LoopAlgebraForm,
    ts: &[f64],
    i0: usize,
    opts: &BuildOptions,
) -> Vec<TwistedLaurentLoop> {
    let n = ts.len();
    let h = (ts[n - 1] - ts[0]).abs() / (n - 1) as f64;
    let steps = ((h * opts.rk4_steps_per_unit as f64).ceil() as usize).max(1);
    let mut out = vec![TwistedLaurentLoop::identity(opts.truncation); n];
    if i0 + 1 < n {
        let path = &ts[i0..];
        let loops =
            integrate_loop_ode_path(form, path, steps, opts.truncation, opts.circle_samples);
        for (k, l) in loops.into_iter().enumerate() {
            out[i0 + 1 + k] = l;
        }
    }
    if i0 > 0 {
        let path: Vec<f64> = ts[..=i0].iter().rev().copied().collect();
        let loops =
            integrate_loop_ode_path(form, &path, steps, opts.truncation, opts.circle_samples);
        for (k, l) in loops.into_iter().enumerate() {
            out[i0 - 1 - k] = l;
        }
    }
    out
}

struct PointOut {
    f: Vec3,
    n: Vec3,
    frame: Mat2C,
    ok: bool,
    tail: f64,
    unit: f64,
    su2: f64,
}

fn failed_point() -> PointOut {
    PointOut {
        f: Vec3::new(f64::NAN, f64::NAN, f64::NAN),
        n: Vec3::new(f64::NAN, f64::NAN, f64::NAN),
        frame: Mat2C::zero(),
        ok: false,
        tail: 0.0,
        unit: 0.0,
        su2: 0.0,
    }
}

/// Generalized d'Alembert pipeline: X̂ solves dX̂ = X̂ χ̂ along the x-axis,
/// Ŷ solves dŶ = Ŷ ψ̂ along y, both from the identity at the base point.
/// At each grid point the factorization X̂⁻¹Ŷ = Ĥ₋Ĥ₊ yields the extended
/// frame F̂ = X̂Ĥ₋ = Ŷ·K (K = Ĥ₊⁻¹), the Gauss map N = Ad_{F(1)} e3, and the
/// surface f through the Sym formula f = (λ∂_λF̂·F̂⁻¹)|_{λ=1}.
///
/// Factorization failures away from the base point are recorded in the
/// per-point `ok` mask; a failure at the base point aborts the build.
pub fn dalembert_solve(
    p: &PotentialPair,
    grid: &Grid,
    opts: &BuildOptions,
) -> Result<SurfaceData, BuildError> {
    let ibx = grid
        .nearest_x(p.base.0)
        .ok_or(BuildError::BaseOffGrid(p.base.0, p.base.1))?;
    let iby = grid
        .nearest_y(p.base.1)
        .ok_or(BuildError::BaseOffGrid(p.base.0, p.base.1))?;

    let x_loops = integrate_axis(&p.chi, grid.x(), ibx, opts);
    let y_loops = integrate_axis(&p.psi, grid.y(), iby, opts);
    let x_inv: Vec<_> = x_loops
        .par_iter()
        .map(|l| l.inverse_with_samples(opts.circle_samples))
        .collect();

    let (nx, ny) = (grid.nx(), grid.ny());
    let one = C64::new(1.0, 0.0);
    let points: Vec<PointOut> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % nx, idx / nx);
            let xi = match &x_inv[ix] {
                Ok(l) => l,
                Err(_) => return failed_point(),
            };
            let g = xi.multiply(&y_loops[iy]);
            let k = match birkhoff_k_factor(&g) {
                Ok(k) => k,
                Err(_) => return failed_point(),
            };
            let fhat = y_loops[iy].multiply(&k);
            let f1 = fhat.evaluate(one);
            let unit = unitarity_residual(&f1);
            let f1_inv = f1.inverse();
            if !f1_inv.is_finite() {
                return failed_point();
            }
            let n_mat = f1 * e3() * f1_inv;
            let n = su2_to_vec_unchecked(&n_mat);
            let sym = fhat.lambda_d_dlambda().evaluate(one) * f1_inv;
            let f = su2_to_vec_unchecked(&sym);
            PointOut {
                f,
                n,
                frame: f1,
                ok: unit <= SU2_TOL && (n.norm() - 1.0).abs() <= SU2_TOL,
                tail: fhat.tail_mass(),
                unit,
                su2: su2_residual(&sym),
            }
        })
        .collect();

    if !points[grid.index(ibx, iby)].ok {
        let g = x_inv[ibx]
            .as_ref()
            .map(|xi| xi.multiply(&y_loops[iby]))
            .unwrap_or_else(|_| TwistedLaurentLoop::identity(opts.truncation));
        return Err(BuildError::BasePoint(
            birkhoff_k_factor(&g).err().unwrap_or(
                crate::loops::LoopError::SingularLoop { min_det: 0.0 },
            ),
        ));
    }

    let mut diagnostics = BuildDiagnostics::default();
    let mut f = Vec::with_capacity(points.len());
    let mut n = Vec::with_capacity(points.len());
    let mut frame = Vec::with_capacity(points.len());
    let mut ok = Vec::with_capacity(points.len());
    for p in &points {
        diagnostics.max_tail_mass = diagnostics.max_tail_mass.max(p.tail);
        diagnostics.max_unitarity_residual = diagnostics.max_unitarity_residual.max(p.unit);
        diagnostics.max_su2_residual = diagnostics.max_su2_residual.max(p.su2);
        diagnostics.failed_points += usize::from(!p.ok);
        f.push(p.f);
        n.push(p.n);
        frame.push(p.frame);
        ok.push(p.ok);
    }

    let mut s = SurfaceData {
        grid: grid.clone(),
        base: (ibx, iby),
        f,
        n,
        frame,
        sigma: Vec::new(),
        ok,
        diagnostics,
    };
    s.sigma = sigma_field(&s.f, &s.n, &s.ok, grid);
    Ok(s)
}

/// σ = det(f_x, f_y, N), the signed area density whose zero set is the
/// singular set. NaN where a stencil touches a failed point.
pub fn sigma_field(f: &[Vec3], n: &[Vec3], ok: &[bool], g: &Grid) -> Vec<f64> {
    let fx = field_dx(f, g);
    let fy = field_dy(f, g);
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![f64::NAN; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let idx = iy * nx + ix;
            let stencil_ok = stencil_range(ix, nx)
                .all(|k| ok[iy * nx + k])
                && stencil_range(iy, ny).all(|k| ok[k * nx + ix]);
            if stencil_ok {
                out[idx] = Vec3::det3(fx[idx], fy[idx], n[idx]);
            }
        }
    }
    out
}

fn stencil_range(i: usize, n: usize) -> std::ops::Range<usize> {
    if i >= 2 && i + 2 < n {
        i - 2..i + 3
    } else if i < 2 {
        0..5.min(n)
    } else {
        n - 5..n
    }
}

/// Direct integration of f_x = N×N_x, f_y = −N×N_y from the base point,
/// corrected-trapezoid cumulative quadrature (endpoint-derivative correction,
/// order 4). f(base) = 0.
pub fn integrate_frontal(n: &[Vec3], g: &Grid, base: (usize, usize)) -> Vec<Vec3> {
    let ndx = field_dx(n, g);
    let ndy = field_dy(n, g);
    let (nx, ny) = (g.nx(), g.ny());
    let px: Vec<Vec3> = (0..nx * ny).map(|i| n[i].cross(ndx[i])).collect();
    let qy: Vec<Vec3> = (0..nx * ny).map(|i| -(n[i].cross(ndy[i]))).collect();

    let mut f = vec![Vec3::ZERO; nx * ny];
    let (ibx, iby) = base;
    // Base row in x, then every column in y.
    let row: Vec<Vec3> = (0..nx).map(|ix| px[iby * nx + ix]).collect();
    let frow = cumulative_corrected(&row, g.hx(), ibx);
    for ix in 0..nx {
        f[iby * nx + ix] = frow[ix];
    }
    for ix in 0..nx {
        let col: Vec<Vec3> = (0..ny).map(|iy| qy[iy * nx + ix]).collect();
        let fcol = cumulative_corrected(&col, g.hy(), iby);
        for iy in 0..ny {
            f[iy * nx + ix] = f[iby * nx + ix] + fcol[iy];
        }
    }
    f
}

/// Cumulative integral of sampled values with F(start) = 0. Trapezoid with
/// the Euler-Maclaurin endpoint-derivative correction: per interval
/// h/2·(v_k + v_{k+1}) − h²/12·(v'_{k+1} − v'_k), derivatives by the order-4
/// stencils, giving an order-4 cumulative rule.
fn cumulative_corrected(vals: &[Vec3], h: f64, start: usize) -> Vec<Vec3> {
    let n = vals.len();
    let get = |k: usize| vals[k];
    let dv: Vec<Vec3> = (0..n).map(|i| d1_line(&get, i, n, h)).collect();
    let mut out = vec![Vec3::ZERO; n];
    let c = h * h / 12.0;
    for i in start..n - 1 {
        let inc = (vals[i] + vals[i + 1]).scale(h / 2.0) - (dv[i + 1] - dv[i]).scale(c);
        out[i + 1] = out[i] + inc;
    }
    for i in (0..start).rev() {
        let inc = (vals[i] + vals[i + 1]).scale(h / 2.0) - (dv[i + 1] - dv[i]).scale(c);
        out[i] = out[i + 1] - inc;
    }
    out
}

/// First fundamental form lengths and angle, and the Gaussian curvature from
/// the shape operator, at a regular grid point.
#[derive(Debug, Clone, Copy)]
pub struct FormRecord {
    /// A = |f_x|
    pub a: f64,
    /// B = |f_y|
    pub b: f64,
    /// Signed angle between f_x and f_y: sin φ = σ/(AB), cos φ = ⟨f_x,f_y⟩/(AB).
    pub phi: f64,
    /// det(shape operator)
    pub k: f64,
}

/// Per-point fundamental forms plus the worst structural residuals.
#[derive(Debug, Clone)]
pub struct FormsField {
    pub records: Vec<Option<FormRecord>>,
    /// max over regular points of ||f_x|−|N_x|| and ||f_y|−|N_y||
    pub max_len_mismatch: f64,
    /// max over regular points of |⟨f_x,N_x⟩| and |⟨f_y,N_y⟩|
    pub max_asymptotic: f64,
    pub threshold: f64,
}

/// Evaluate I and II at every point with |σ| above the regularity threshold.
/// The second fundamental form is computed from first derivatives only,
/// through e = −⟨f_x,N_x⟩, m = −(⟨f_x,N_y⟩+⟨f_y,N_x⟩)/2, g = −⟨f_y,N_y⟩.
pub fn fundamental_forms(s: &SurfaceData) -> FormsField {
    let g = &s.grid;
    let fx = field_dx(&s.f, g);
    let fy = field_dy(&s.f, g);
    let nxf = field_dx(&s.n, g);
    let nyf = field_dy(&s.n, g);
    let threshold = s.sigma_threshold();

    let mut records = vec![None; s.f.len()];
    let mut max_len = 0.0f64;
    let mut max_asym = 0.0f64;
    for idx in 0..s.f.len() {
        let sig = s.sigma[idx];
        if !sig.is_finite() || sig.abs() <= threshold {
            continue;
        }
        let (a, b) = (fx[idx].norm(), fy[idx].norm());
        let cos_phi = fx[idx].dot(fy[idx]) / (a * b);
        let sin_phi = sig / (a * b);
        let phi = sin_phi.atan2(cos_phi);
        let (ee, ff, gg) = (
            fx[idx].dot(fx[idx]),
            fx[idx].dot(fy[idx]),
            fy[idx].dot(fy[idx]),
        );
        let (le, lm, lg) = (
            -fx[idx].dot(nxf[idx]),
            -0.5 * (fx[idx].dot(nyf[idx]) + fy[idx].dot(nxf[idx])),
            -fy[idx].dot(nyf[idx]),
        );
        let det_i = ee * gg - ff * ff;
        let k = (le * lg - lm * lm) / det_i;
        records[idx] = Some(FormRecord { a, b, phi, k });
        max_len = max_len
            .max((a - nxf[idx].norm()).abs())
            .max((b - nyf[idx].norm()).abs());
        max_asym = max_asym.max(le.abs()).max(lg.abs());
    }
    FormsField {
        records,
        max_len_mismatch: max_len,
        max_asymptotic: max_asym,
        threshold,
    }
}

/// Parallel surface point: position and curvatures by the closed formulas
/// and by finite differences.
#[derive(Debug, Clone, Copy)]
pub struct ParallelPoint {
    pub g: Vec3,
    /// Denominator (1−r²)sin φ + 2r cos φ; small |d| means near the focal set.
    pub d: f64,
    pub k_formula: f64,
    pub h_formula: f64,
    pub k_fd: f64,
    pub h_fd: f64,
}

#[derive(Debug, Clone)]
pub struct ParallelData {
    pub r: f64,
    pub points: Vec<Option<ParallelPoint>>,
    /// Points excluded because (1−r²)sin φ + 2r cos φ ≈ 0 (focal distance).
    pub focal_excluded: usize,
}

/// Parallel surface g = f + rN with curvatures
/// K_g = −sin φ / D, H_g = (r sin φ − cos φ) / D, D = (1−r²)sin φ + 2r cos φ,
/// and independently from finite differences of g (shared normal N).
pub fn parallel_surface(s: &SurfaceData, r: f64) -> ParallelData {
    let grid = &s.grid;
    let forms = fundamental_forms(s);
    let fx = field_dx(&s.f, grid);
    let fy = field_dy(&s.f, grid);
    let nxf = field_dx(&s.n, grid);
    let nyf = field_dy(&s.n, grid);

    let mut points = vec![None; s.f.len()];
    let mut focal = 0usize;
    for idx in 0..s.f.len() {
        let Some(rec) = forms.records[idx] else {
            continue;
        };
        let (sin_phi, cos_phi) = rec.phi.sin_cos();
        let d = (1.0 - r * r) * sin_phi + 2.0 * r * cos_phi;
        if d.abs() < 1e-6 * (1.0 + r * r) {
            focal += 1;
            continue;
        }
        let gx = fx[idx] + nxf[idx].scale(r);
        let gy = fy[idx] + nyf[idx].scale(r);
        let (ee, ff, gg) = (gx.dot(gx), gx.dot(gy), gy.dot(gy));
        let (le, lm, lg) = (
            -gx.dot(nxf[idx]),
            -0.5 * (gx.dot(nyf[idx]) + gy.dot(nxf[idx])),
            -gy.dot(nyf[idx]),
        );
        let det_i = ee * gg - ff * ff;
        points[idx] = Some(ParallelPoint {
            g: s.f[idx] + s.n[idx].scale(r),
            d,
            k_formula: -sin_phi / d,
            h_formula: (r * sin_phi - cos_phi) / d,
            k_fd: (le * lg - lm * lm) / det_i,
            h_fd: (le * gg - 2.0 * lm * ff + lg * ee) / (2.0 * det_i),
        });
    }
    ParallelData {
        r,
        points,
        focal_excluded: focal,
    }
}

/// Max over interior points of |N × N_xy| (second-order cross stencil);
/// the harmonic map equation makes the true value 0.
pub fn harmonicity_residual(s: &SurfaceData) -> f64 {
    let g = &s.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let scale = 1.0 / (4.0 * g.hx() * g.hy());
    let mut worst = 0.0f64;
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let all_ok = [(0i64, 0i64), (1, 1), (1, -1), (-1, 1), (-1, -1)]
                .iter()
                .all(|&(dx, dy)| {
                    s.ok[((iy as i64 + dy) as usize) * nx + (ix as i64 + dx) as usize]
                });
            if !all_ok {
                continue;
            }
            let n_xy = (s.n[(iy + 1) * nx + ix + 1] - s.n[(iy - 1) * nx + ix + 1]
                - s.n[(iy + 1) * nx + ix - 1]
                + s.n[(iy - 1) * nx + ix - 1])
                .scale(scale);
            worst = worst.max(s.n[iy * nx + ix].cross(n_xy).norm());
        }
    }
    worst
}

fn rank_of(cx: Vec3, cy: Vec3, threshold: f64) -> u8 {
    // Singular values via the 2×2 Gram matrix.
    let (ee, ff, gg) = (cx.dot(cx), cx.dot(cy), cy.dot(cy));
    let tr = ee + gg;
    let disc = ((ee - gg) * (ee - gg) + 4.0 * ff * ff).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc).max(0.0);
    u8::from(l1.sqrt() > threshold) + u8::from(l2.sqrt() > threshold)
}

/// Count grid points where rank df ≠ rank dN at the given singular-value
/// threshold.
pub fn rank_mismatch_count(s: &SurfaceData, threshold: f64) -> usize {
    let g = &s.grid;
    let fx = field_dx(&s.f, g);
    let fy = field_dy(&s.f, g);
    let nxf = field_dx(&s.n, g);
    let nyf = field_dy(&s.n, g);
    (0..s.f.len())
        .filter(|&i| {
            s.ok[i]
                && rank_of(fx[i], fy[i], threshold) != rank_of(nxf[i], nyf[i], threshold)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{abc_to_potential, AbcData, ScalarCurve};

    fn vacuum_potential() -> PotentialPair {
        let d = AbcData::unit_speed(
            ScalarCurve::constant(0.0),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.0),
            (-1.0, 1.0),
        );
        abc_to_potential(&d, 0.0)
    }

    fn ribbon_potential() -> PotentialPair {
        // (a, b, c, A) = (0, 0, 0, 1): α̂₀ = e1λ dt, N_y ≡ 0.
        let d = AbcData::unit_speed(
            ScalarCurve::constant(0.0),
            ScalarCurve::constant(0.0),
            ScalarCurve::constant(0.0),
            (-1.0, 1.0),
        );
        abc_to_potential(&d, 0.0)
    }

    #[test]
    fn vacuum_surface_matches_closed_form() {
        let g = Grid::square((-1.0, 1.0), 21);
        let s = dalembert_solve(&vacuum_potential(), &g, &BuildOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for iy in 0..21 {
            for ix in 0..21 {
                let (x, y) = (g.x()[ix], g.y()[iy]);
                let f_ref = Vec3::new(x - y, 0.0, 0.0);
                let n_ref = Vec3::new(0.0, -(x + y).sin(), (x + y).cos());
                worst = worst
                    .max((s.f_at(ix, iy) - f_ref).norm())
                    .max((s.n_at(ix, iy) - n_ref).norm());
            }
        }
        assert!(worst < 1e-9, "worst deviation {worst:.3e}");
        assert_eq!(s.diagnostics.failed_points, 0);
    }

    #[test]
    fn ribbon_surface_never_a_front() {
        let g = Grid::square((-1.0, 1.0), 17);
        let s = dalembert_solve(&ribbon_potential(), &g, &BuildOptions::default()).unwrap();
        for iy in 0..17 {
            for ix in 0..17 {
                let (x, _y) = (g.x()[ix], g.y()[iy]);
                assert!((s.f_at(ix, iy) - Vec3::new(x, 0.0, 0.0)).norm() < 1e-9);
                let n_ref = Vec3::new(0.0, -x.sin(), x.cos());
                assert!((s.n_at(ix, iy) - n_ref).norm() < 1e-9);
                // N_y ≡ 0 ⟹ σ ≡ 0.
                assert!(s.sigma_at(ix, iy).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn base_off_grid_is_rejected() {
        let g = Grid::uniform((0.25, 1.25), 11, (0.25, 1.25), 11);
        let err = dalembert_solve(&vacuum_potential(), &g, &BuildOptions::default());
        assert!(matches!(err, Err(BuildError::BaseOffGrid(_, _))));
    }

    #[test]
    fn sym_and_direct_integration_agree_up_to_translation() {
        let d = AbcData::unit_speed(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.1),
            (-1.0, 1.0),
        );
        let p = abc_to_potential(&d, 0.0);
        let g = Grid::square((-0.5, 0.5), 41);
        let s = dalembert_solve(&p, &g, &BuildOptions::default()).unwrap();
        let f2 = integrate_frontal(&s.n, &g, s.base);
        let shift = s.f[s.grid.index(s.base.0, s.base.1)];
        let mut worst = 0.0f64;
        for i in 0..f2.len() {
            worst = worst.max((s.f[i] - shift - f2[i]).norm());
        }
        assert!(worst < 1e-6, "gauge deviation {worst:.3e}");
    }

    #[test]
    fn constant_normal_integrates_to_zero() {
        let g = Grid::square((-1.0, 1.0), 31);
        let n = vec![Vec3::new(0.0, 0.0, 1.0); 31 * 31];
        let f = integrate_frontal(&n, &g, (15, 15));
        assert!(f.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn vacuum_normal_integrates_to_ribbon() {
        let g = Grid::square((-1.0, 1.0), 81);
        let mut n = Vec::new();
        for iy in 0..81 {
            for ix in 0..81 {
                let s = g.x()[ix] + g.y()[iy];
                n.push(Vec3::new(0.0, -s.sin(), s.cos()));
            }
        }
        let f = integrate_frontal(&n, &g, (40, 40));
        let mut worst = 0.0f64;
        for iy in 0..81 {
            for ix in 0..81 {
                let f_ref = Vec3::new(g.x()[ix] - g.y()[iy], 0.0, 0.0);
                worst = worst.max((f[g.index(ix, iy)] - f_ref).norm());
            }
        }
        // Fourth-order differencing of N dominates: h⁴|N⁽⁵⁾|/30 ≈ 1e-8 here.
        assert!(worst < 1e-7, "worst {worst:.3e}");
    }

    #[test]
    fn built_surface_has_curvature_minus_one() {
        let d = AbcData::unit_speed(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.1),
            (-1.0, 1.0),
        );
        let p = abc_to_potential(&d, 0.0);
        let g = Grid::square((-0.5, 0.5), 51);
        let s = dalembert_solve(&p, &g, &BuildOptions::default()).unwrap();
        let forms = fundamental_forms(&s);
        let mut worst = 0.0f64;
        let mut count = 0usize;
        for (idx, rec) in forms.records.iter().enumerate() {
            if let Some(rec) = rec {
                if s.sigma[idx].abs() > 0.1 {
                    worst = worst.max((rec.k + 1.0).abs());
                    count += 1;
                }
            }
        }
        assert!(count > 100, "too few regular points: {count}");
        assert!(worst < 1e-4, "K deviation {worst:.3e}");
        // Stencil truncation at h = 0.02 sits near 1e-6.
        assert!(forms.max_len_mismatch < 1e-5);
        assert!(forms.max_asymptotic < 1e-5);
    }

    #[test]
    fn parallels_satisfy_weingarten_identity() {
        let d = AbcData::unit_speed(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.1),
            (-1.0, 1.0),
        );
        let p = abc_to_potential(&d, 0.0);
        let g = Grid::square((-0.5, 0.5), 51);
        let s = dalembert_solve(&p, &g, &BuildOptions::default()).unwrap();
        for r in [0.3, -0.3] {
            let par = parallel_surface(&s, r);
            let mut worst_w = 0.0f64;
            let mut worst_umb = 0.0f64;
            let mut worst_cross = 0.0f64;
            let mut count = 0;
            for pt in par.points.iter().flatten() {
                // Near the focal set 1/D amplifies differencing error; keep the
                // check on a patch with the denominator bounded away from zero.
                if pt.d.abs() <= 0.2 {
                    continue;
                }
                worst_w = worst_w.max(((1.0 + r * r) * pt.k_fd + 2.0 * r * pt.h_fd + 1.0).abs());
                let d_inv2 = pt.h_formula * pt.h_formula - pt.k_formula;
                worst_umb = worst_umb.max((pt.h_fd * pt.h_fd - pt.k_fd - d_inv2).abs());
                worst_cross = worst_cross
                    .max((pt.k_fd - pt.k_formula).abs())
                    .max((pt.h_fd - pt.h_formula).abs());
                count += 1;
            }
            assert!(count > 1000);
            assert!(worst_w < 1e-6, "Weingarten residual {worst_w:.3e}");
            assert!(worst_umb < 1e-5, "umbilic identity residual {worst_umb:.3e}");
            assert!(worst_cross < 1e-5, "route disagreement {worst_cross:.3e}");
        }
    }

    #[test]
    fn parallel_at_zero_reproduces_surface() {
        let g = Grid::square((-0.5, 0.5), 31);
        let d = AbcData::unit_speed(
            ScalarCurve::constant(0.0),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.0),
            (-1.0, 1.0),
        );
        let s = dalembert_solve(&abc_to_potential(&d, 0.0), &g, &BuildOptions::default()).unwrap();
        let par = parallel_surface(&s, 0.0);
        for (idx, pt) in par.points.iter().enumerate() {
            if let Some(pt) = pt {
                assert!((pt.g - s.f[idx]).norm() == 0.0);
                assert!((pt.k_formula + 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn harmonicity_residual_is_second_order() {
        let d = AbcData::unit_speed(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.1),
            (-1.0, 1.0),
        );
        let p = abc_to_potential(&d, 0.0);
        let opts = BuildOptions::default();
        let coarse = dalembert_solve(&p, &Grid::square((-0.4, 0.4), 21), &opts).unwrap();
        let fine = dalembert_solve(&p, &Grid::square((-0.4, 0.4), 41), &opts).unwrap();
        let (rc, rf) = (harmonicity_residual(&coarse), harmonicity_residual(&fine));
        let ratio = rc / rf;
        assert!(
            (2.5..8.0).contains(&ratio),
            "expected ≈4 for order 2, got {ratio:.2} ({rc:.3e} vs {rf:.3e})"
        );
    }

    #[test]
    fn ranks_of_df_and_dn_agree() {
        let d = AbcData::unit_speed(
            ScalarCurve::poly(vec![0.0, 1.0]),
            ScalarCurve::constant(-1.0),
            ScalarCurve::constant(0.1),
            (-1.0, 1.0),
        );
        let p = abc_to_potential(&d, 0.0);
        let g = Grid::square((-0.5, 0.5), 41);
        let s = dalembert_solve(&p, &g, &BuildOptions::default()).unwrap();
        assert_eq!(rank_mismatch_count(&s, 10.0 * g.hx()), 0);
    }

    #[test]
    fn unitarity_and_sphere_enforced() {
        let g = Grid::square((-1.0, 1.0), 21);
        let s = dalembert_solve(&vacuum_potential(), &g, &BuildOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for v in &s.n {
            worst = worst.max((v.norm() - 1.0).abs());
        }
        assert!(worst < 1e-8);
        assert!(s.diagnostics.max_unitarity_residual < 1e-8);
        assert!(s.diagnostics.max_tail_mass < 1e-8);
    }
}
