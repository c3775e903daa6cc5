//! Jet calculus for Lorentzian-harmonic germs into S².
//!
//! In the chart N = δ·(u, v, 1), δ = (1+u²+v²)^{-1/2}, harmonicity of N is the
//! semi-linear system
//!
//! ```text
//! (1+u²+v²) u_xy = 2u u_x u_y + v (u_x v_y + u_y v_x)
//! (1+u²+v²) v_xy = 2v v_x v_y + u (v_x u_y + v_y u_x)
//! ```
//!
//! whose Taylor solutions are freely parametrized by the pure coefficients
//! (of x^k and y^k): every mixed coefficient of total degree k is forced by
//! the recursion and depends only on pure coefficients of degree ≤ k−2. Work
//! is exact over rationals by default so that classification discriminants
//! stay sign-exact; `f64` instantiations serve the numeric pipeline.

use crate::poly::{Poly2, Rat, Scalar};
use num_traits::ToPrimitive;

/// Default cap on jet order; all recognition criteria use 4th-order data,
/// and the numeric butterfly confirmation needs one more degree of margin.
pub const MAX_JET_ORDER: usize = 8;

/// Free (pure) Taylor coefficients of a harmonic germ: the coefficient of
/// x^i in u is `ax[i-1]` (the paper's a_{i0}), of y^i in u is `ay[i-1]`
/// (a_{ii}); `bx`, `by` likewise for v (b_{i0}, b_{ii}).
#[derive(Debug, Clone, PartialEq)]
pub struct JetCoeffs<T: Scalar = Rat> {
    pub ax: Vec<T>,
    pub ay: Vec<T>,
    pub bx: Vec<T>,
    pub by: Vec<T>,
}

impl<T: Scalar> JetCoeffs<T> {
    pub fn new(ax: Vec<T>, ay: Vec<T>, bx: Vec<T>, by: Vec<T>) -> Self {
        assert!(!ax.is_empty(), "jet order must be at least 1");
        assert!(
            ax.len() == ay.len() && ax.len() == bx.len() && ax.len() == by.len(),
            "coefficient arrays must have equal length"
        );
        JetCoeffs { ax, ay, bx, by }
    }

    pub fn order(&self) -> usize {
        self.ax.len()
    }

    pub fn zeros(n: usize) -> Self {
        JetCoeffs::new(
            vec![T::zero(); n],
            vec![T::zero(); n],
            vec![T::zero(); n],
            vec![T::zero(); n],
        )
    }

    /// Pad with zero pure coefficients up to order `n`: the germ with no
    /// higher-order pure terms.
    pub fn zero_extend(&self, n: usize) -> Self {
        assert!(n >= self.order());
        let pad = |v: &Vec<T>| {
            let mut w = v.clone();
            w.resize(n, T::zero());
            w
        };
        JetCoeffs::new(pad(&self.ax), pad(&self.ay), pad(&self.bx), pad(&self.by))
    }
}

impl JetCoeffs<Rat> {
    pub fn from_ints(ax: &[i64], ay: &[i64], bx: &[i64], by: &[i64]) -> Self {
        let conv = |v: &[i64]| v.iter().map(|&n| Rat::from_int(n)).collect();
        JetCoeffs::new(conv(ax), conv(ay), conv(bx), conv(by))
    }

    pub fn to_f64(&self) -> JetCoeffs<f64> {
        let conv = |v: &Vec<Rat>| v.iter().map(|r| r.to_f64().unwrap()).collect();
        JetCoeffs::new(conv(&self.ax), conv(&self.ay), conv(&self.bx), conv(&self.by))
    }
}

/// Full degree-n Taylor tables of (u, v); mixed coefficients satisfy the PDE
/// recursion by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateJet<T: Scalar = Rat> {
    pub u: Poly2<T>,
    pub v: Poly2<T>,
}

impl<T: Scalar> BivariateJet<T> {
    pub fn order(&self) -> usize {
        self.u.deg()
    }
}

impl BivariateJet<Rat> {
    pub fn to_f64(&self) -> BivariateJet<f64> {
        BivariateJet {
            u: self.u.map(|r| r.to_f64().unwrap()),
            v: self.v.map(|r| r.to_f64().unwrap()),
        }
    }
}

/// Right-hand side 2w w_x w_y + z (w_x z_y + w_y z_x) − (w²+z²) w_xy,
/// truncated at `deg`; equals (the Taylor table of) w_xy through `deg`
/// whenever (w, z) solves the system.
fn harmonic_rhs<T: Scalar>(w: &Poly2<T>, z: &Poly2<T>, deg: usize) -> Poly2<T> {
    let wx = w.diff_x();
    let wy = w.diff_y();
    let zx = z.diff_x();
    let zy = z.diff_y();
    let wxy = wx.diff_y();
    let t1 = w.mul_trunc(&wx, deg).mul_trunc(&wy, deg).scale(&T::from_int(2));
    let t2 = z.mul_trunc(&wx.mul_trunc(&zy, deg).add(&wy.mul_trunc(&zx, deg)), deg);
    let t3 = w
        .mul_trunc(w, deg)
        .add(&z.mul_trunc(z, deg))
        .mul_trunc(&wxy, deg);
    t1.add(&t2).sub(&t3)
}

/// Expand pure coefficients to the unique PDE-compatible degree-n jet:
/// mixed coefficients of each total degree k are read off the right-hand
/// side at degree k−2, which involves only already-known lower data.
pub fn expand_jet<T: Scalar>(c: &JetCoeffs<T>) -> BivariateJet<T> {
    let n = c.order();
    let mut u = Poly2::zero(n);
    let mut v = Poly2::zero(n);
    for i in 1..=n {
        u.set(i, 0, c.ax[i - 1].clone());
        u.set(0, i, c.ay[i - 1].clone());
        v.set(i, 0, c.bx[i - 1].clone());
        v.set(0, i, c.by[i - 1].clone());
    }
    for k in 2..=n {
        let rhs_u = harmonic_rhs(&u, &v, k - 2);
        let rhs_v = harmonic_rhs(&v, &u, k - 2);
        for i in 1..=k - 1 {
            let denom = ((k - i) * i) as i64;
            u.set(k - i, i, rhs_u.get(k - i - 1, i - 1).div_int(denom));
            v.set(k - i, i, rhs_v.get(k - i - 1, i - 1).div_int(denom));
        }
    }
    BivariateJet { u, v }
}

/// Taylor residual of the harmonic system through degree n−2: since
/// (1+w²+z²)w_xy − RHS = w_xy − [`harmonic_rhs`], the residual per component
/// is w_xy minus the right-hand side. Exactly zero for expanded jets.
pub fn pde_residual<T: Scalar>(j: &BivariateJet<T>) -> (Poly2<T>, Poly2<T>) {
    let deg = j.order().saturating_sub(2);
    let ru = j
        .u
        .diff_x()
        .diff_y()
        .truncate(deg)
        .sub(&harmonic_rhs(&j.u, &j.v, deg));
    let rv = j
        .v
        .diff_x()
        .diff_y()
        .truncate(deg)
        .sub(&harmonic_rhs(&j.v, &j.u, deg));
    (ru, rv)
}

/// Diagonal Cauchy data of the germ: Taylor coefficients of u(t,t) (index
/// i−1 ↔ t^i, `u_diag`), of u_x(t,t) (index i−1 ↔ t^{i−1}, `ux_diag`), and
/// the v counterparts. This is the target of the paper's diffeomorphism ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCauchyData<T: Scalar = Rat> {
    pub u_diag: Vec<T>,
    pub ux_diag: Vec<T>,
    pub v_diag: Vec<T>,
    pub vx_diag: Vec<T>,
}

impl<T: Scalar> PolyCauchyData<T> {
    pub fn new(u_diag: Vec<T>, ux_diag: Vec<T>, v_diag: Vec<T>, vx_diag: Vec<T>) -> Self {
        assert!(!u_diag.is_empty());
        assert!(
            u_diag.len() == ux_diag.len()
                && u_diag.len() == v_diag.len()
                && u_diag.len() == vx_diag.len(),
            "coefficient arrays must have equal length"
        );
        PolyCauchyData {
            u_diag,
            ux_diag,
            v_diag,
            vx_diag,
        }
    }

    pub fn order(&self) -> usize {
        self.u_diag.len()
    }
}

/// Restrict the expanded jet to the diagonal: with a_{ij} the coefficient of
/// x^{i−j}y^j, the t^i coefficient of u(t,t) is Σ_j a_{ij} and the t^{i−1}
/// coefficient of u_x(t,t) is Σ_{j≤i−1} (i−j) a_{ij}.
pub fn jet_to_poly_cauchy<T: Scalar>(c: &JetCoeffs<T>) -> PolyCauchyData<T> {
    let n = c.order();
    let j = expand_jet(c);
    let mut out = PolyCauchyData::new(
        vec![T::zero(); n],
        vec![T::zero(); n],
        vec![T::zero(); n],
        vec![T::zero(); n],
    );
    for i in 1..=n {
        let mut alpha = T::zero();
        let mut beta = T::zero();
        let mut lambda = T::zero();
        let mut mu = T::zero();
        for jj in 0..=i {
            let cu = j.u.get(i - jj, jj);
            let cv = j.v.get(i - jj, jj);
            alpha = alpha + cu.clone();
            lambda = lambda + cv.clone();
            if jj < i {
                beta = beta + cu * T::from_int((i - jj) as i64);
                mu = mu + cv * T::from_int((i - jj) as i64);
            }
        }
        out.u_diag[i - 1] = alpha;
        out.ux_diag[i - 1] = beta;
        out.v_diag[i - 1] = lambda;
        out.vx_diag[i - 1] = mu;
    }
    out
}

/// Invert [`jet_to_poly_cauchy`] by back-substitution in increasing degree:
/// at degree i the mixed coefficients are already determined by lower pure
/// data, leaving a triangular 2×2 solve for (a_{i0}, a_{ii}) and (b_{i0},
/// b_{ii}).
pub fn poly_cauchy_to_jet<T: Scalar>(d: &PolyCauchyData<T>) -> JetCoeffs<T> {
    let n = d.order();
    let mut c: JetCoeffs<T> = JetCoeffs::zeros(n);
    for i in 1..=n {
        // Mixed degree-i coefficients depend only on pure degree ≤ i−2.
        let j = expand_jet(&c);
        let mut mixed_u_sum = T::zero();
        let mut mixed_u_weighted = T::zero();
        let mut mixed_v_sum = T::zero();
        let mut mixed_v_weighted = T::zero();
        for jj in 1..=i.saturating_sub(1) {
            let cu = j.u.get(i - jj, jj);
            let cv = j.v.get(i - jj, jj);
            mixed_u_sum = mixed_u_sum + cu.clone();
            mixed_u_weighted = mixed_u_weighted + cu * T::from_int((i - jj) as i64);
            mixed_v_sum = mixed_v_sum + cv.clone();
            mixed_v_weighted = mixed_v_weighted + cv * T::from_int((i - jj) as i64);
        }
        let ai0 = (d.ux_diag[i - 1].clone() - mixed_u_weighted).div_int(i as i64);
        let aii = d.u_diag[i - 1].clone() - ai0.clone() - mixed_u_sum;
        let bi0 = (d.vx_diag[i - 1].clone() - mixed_v_weighted).div_int(i as i64);
        let bii = d.v_diag[i - 1].clone() - bi0.clone() - mixed_v_sum;
        c.ax[i - 1] = ai0;
        c.ay[i - 1] = aii;
        c.bx[i - 1] = bi0;
        c.by[i - 1] = bii;
    }
    c
}

/// Taylor table of the unit normal N = δ(u, v, 1) about a point, one truncated
/// polynomial per component; partial derivatives are coefficients times
/// factorials.
#[derive(Debug, Clone)]
pub struct NormalJet<T: Scalar = f64> {
    pub comp: [Poly2<T>; 3],
}

impl<T: Scalar> NormalJet<T> {
    pub fn value(&self) -> [T; 3] {
        self.partial(0, 0)
    }

    /// ∂^{i+j} N / ∂x^i ∂y^j at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> [T; 3] {
        let mut fact = T::one();
        for k in 2..=i {
            fact = fact * T::from_int(k as i64);
        }
        for k in 2..=j {
            fact = fact * T::from_int(k as i64);
        }
        [
            self.comp[0].get(i, j) * fact.clone(),
            self.comp[1].get(i, j) * fact.clone(),
            self.comp[2].get(i, j) * fact,
        ]
    }
}

impl NormalJet<f64> {
    pub fn value_vec3(&self) -> crate::algebra::Vec3 {
        let [x, y, z] = self.value();
        crate::algebra::Vec3::new(x, y, z)
    }

    pub fn partial_vec3(&self, i: usize, j: usize) -> crate::algebra::Vec3 {
        let [x, y, z] = self.partial(i, j);
        crate::algebra::Vec3::new(x, y, z)
    }
}

/// δ-series: given w = 1+u²+v² shifted so its constant term is w0, with
/// `inv_sqrt_w0` = w0^{-1/2} supplied by the caller, expand w^{-1/2} as
/// w0^{-1/2}(1+z)^{-1/2}, z = (w−w0)/w0.
fn inv_sqrt_series<T: Scalar>(w: &Poly2<T>, w0: T, inv_sqrt_w0: T) -> Poly2<T> {
    let deg = w.deg();
    let mut z = w.clone();
    z.set(0, 0, T::zero());
    let z = z.scale(&(T::one() / w0));
    let mut acc = Poly2::constant(deg, T::one());
    let mut zk = Poly2::constant(deg, T::one());
    let mut coeff = T::one();
    for k in 1..=deg {
        zk = zk.mul_trunc(&z, deg);
        // binom(-1/2, k) = binom(-1/2, k-1) · -(2k-1)/(2k)
        coeff = coeff * (-T::from_int(2 * k as i64 - 1)).div_int(2 * k as i64);
        acc = acc.add(&zk.scale(&coeff));
    }
    acc.scale(&inv_sqrt_w0)
}

fn normal_jet_from_shifted<T: Scalar>(u: &Poly2<T>, v: &Poly2<T>, inv_sqrt_w0: T) -> NormalJet<T> {
    let deg = u.deg();
    let w = Poly2::constant(deg, T::one())
        .add(&u.mul_trunc(u, deg))
        .add(&v.mul_trunc(v, deg));
    let w0 = w.get(0, 0);
    let delta = inv_sqrt_series(&w, w0, inv_sqrt_w0);
    NormalJet {
        comp: [
            delta.mul_trunc(u, deg),
            delta.mul_trunc(v, deg),
            delta,
        ],
    }
}

/// Exact normal jet about the origin (where u = v = 0, so δ(0,0) = 1 and no
/// square root enters the coefficients).
pub fn normal_jet_origin<T: Scalar>(j: &BivariateJet<T>) -> NormalJet<T> {
    assert!(j.u.get(0, 0).is_zero() && j.v.get(0, 0).is_zero());
    normal_jet_from_shifted(&j.u, &j.v, T::one())
}

/// Normal jet about an arbitrary point, floating point.
pub fn normal_jet_at(j: &BivariateJet<f64>, x: f64, y: f64) -> NormalJet<f64> {
    let u = j.u.shift(&x, &y);
    let v = j.v.shift(&x, &y);
    let w0 = 1.0 + u.get(0, 0).powi(2) + v.get(0, 0).powi(2);
    normal_jet_from_shifted(&u, &v, 1.0 / w0.sqrt())
}

/// N and its partials (through order 3 in each variable) at a point.
pub fn jet_eval(j: &BivariateJet<f64>, x: f64, y: f64) -> NormalJet<f64> {
    normal_jet_at(j, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rat(rng: &mut impl Rng) -> Rat {
        rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
    }

    fn random_jet(rng: &mut impl Rng, n: usize) -> JetCoeffs<Rat> {
        let mut arr = || (0..n).map(|_| random_rat(rng)).collect::<Vec<_>>();
        JetCoeffs::new(arr(), arr(), arr(), arr())
    }

    #[test]
    fn zero_jet_expands_to_zero() {
        let j = expand_jet(&JetCoeffs::<Rat>::zeros(4));
        assert!(j.u.is_zero() && j.v.is_zero());
    }

    #[test]
    fn degree_two_mixed_coefficients_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let j = expand_jet(&random_jet(&mut rng, 4));
            assert_eq!(j.u.get(1, 1), rat(0, 1));
            assert_eq!(j.v.get(1, 1), rat(0, 1));
        }
    }

    #[test]
    fn degree_three_mixed_coefficients_match_printed_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..25 {
            let c = random_jet(&mut rng, 3);
            let j = expand_jet(&c);
            let (a10, a11) = (c.ax[0].clone(), c.ay[0].clone());
            let (b10, b11) = (c.bx[0].clone(), c.by[0].clone());
            let half = rat(1, 2);
            let u_xy2 = a10.clone() * a11.clone() * a11.clone()
                + half.clone() * a10.clone() * b11.clone() * b11.clone()
                + half.clone() * a11.clone() * b10.clone() * b11.clone();
            let u_x2y = a10.clone() * a10.clone() * a11.clone()
                + half.clone() * a10.clone() * b10.clone() * b11.clone()
                + half.clone() * a11.clone() * b10.clone() * b10.clone();
            let v_xy2 = b10.clone() * b11.clone() * b11.clone()
                + half.clone() * b10.clone() * a11.clone() * a11.clone()
                + half.clone() * b11.clone() * a10.clone() * a11.clone();
            let v_x2y = b10.clone() * b10.clone() * b11.clone()
                + half.clone() * b10.clone() * a10.clone() * a11.clone()
                + half * b11.clone() * a10.clone() * a10.clone();
            assert_eq!(j.u.get(1, 2), u_xy2);
            assert_eq!(j.u.get(2, 1), u_x2y);
            assert_eq!(j.v.get(1, 2), v_xy2);
            assert_eq!(j.v.get(2, 1), v_x2y);
        }
    }

    #[test]
    fn unit_first_order_jet_has_xy2_coefficient_two() {
        let c = JetCoeffs::from_ints(&[1, 0, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]);
        let j = expand_jet(&c);
        assert_eq!(j.u.get(1, 2), rat(2, 1));
    }

    /// Independent statement of the full system, no rearrangement:
    /// (1+u²+v²)u_xy − 2u u_x u_y − v(u_x v_y + u_y v_x), truncated.
    fn full_residual(w: &Poly2<Rat>, z: &Poly2<Rat>, deg: usize) -> Poly2<Rat> {
        let wx = w.diff_x();
        let wy = w.diff_y();
        let zx = z.diff_x();
        let zy = z.diff_y();
        let wxy = wx.diff_y();
        let coeff = Poly2::constant(deg, rat(1, 1))
            .add(&w.mul_trunc(w, deg))
            .add(&z.mul_trunc(z, deg));
        coeff
            .mul_trunc(&wxy, deg)
            .sub(&w.mul_trunc(&wx, deg).mul_trunc(&wy, deg).scale(&rat(2, 1)))
            .sub(&z.mul_trunc(&wx.mul_trunc(&zy, deg).add(&wy.mul_trunc(&zx, deg)), deg))
    }

    #[test]
    fn pde_residual_of_expanded_jet_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let j = expand_jet(&random_jet(&mut rng, 6));
        let (ru, rv) = pde_residual(&j);
        assert!(ru.is_zero() && rv.is_zero());
        assert!(full_residual(&j.u, &j.v, 4).is_zero());
        assert!(full_residual(&j.v, &j.u, 4).is_zero());
    }

    #[test]
    fn diagonal_data_at_degree_one() {
        let c = JetCoeffs::new(
            vec![rat(3, 2)],
            vec![rat(-1, 3)],
            vec![rat(2, 1)],
            vec![rat(5, 1)],
        );
        let d = jet_to_poly_cauchy(&c);
        assert_eq!(d.u_diag[0], rat(3, 2) + rat(-1, 3));
        assert_eq!(d.ux_diag[0], rat(3, 2));
        assert_eq!(d.v_diag[0], rat(7, 1));
        assert_eq!(d.vx_diag[0], rat(2, 1));
    }

    #[test]
    fn degree_one_inversion() {
        let d = PolyCauchyData::new(vec![rat(2, 1)], vec![rat(1, 1)], vec![rat(0, 1)], vec![rat(0, 1)]);
        let c = poly_cauchy_to_jet(&d);
        assert_eq!(c.ax[0], rat(1, 1));
        assert_eq!(c.ay[0], rat(1, 1));
    }

    #[test]
    fn cauchy_round_trip_is_exact_through_order_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let c = random_jet(&mut rng, 6);
            let back = poly_cauchy_to_jet(&jet_to_poly_cauchy(&c));
            assert_eq!(back, c);
            let d = jet_to_poly_cauchy(&c);
            let fwd = jet_to_poly_cauchy(&poly_cauchy_to_jet(&d));
            assert_eq!(fwd, d);
        }
    }

    #[test]
    fn normal_jet_base_point_values() {
        let c = JetCoeffs::from_ints(&[2, 0, 0], &[1, 0, 0], &[-3, 0, 0], &[5, 0, 0]);
        let nj = normal_jet_origin(&expand_jet(&c));
        assert_eq!(nj.value(), [rat(0, 1), rat(0, 1), rat(1, 1)]);
        // ∇δ(0,0) = 0, so N_x(0,0) = (u_x, v_x, 0).
        assert_eq!(nj.partial(1, 0), [rat(2, 1), rat(-3, 1), rat(0, 1)]);
        assert_eq!(nj.partial(0, 1), [rat(1, 1), rat(5, 1), rat(0, 1)]);
    }

    #[test]
    fn harmonicity_cross_product_vanishes_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let j = expand_jet(&random_jet(&mut rng, 4));
            let nj = normal_jet_origin(&j);
            let n0 = nj.value();
            let nxy = nj.partial(1, 1);
            let cross = [
                n0[1].clone() * nxy[2].clone() - n0[2].clone() * nxy[1].clone(),
                n0[2].clone() * nxy[0].clone() - n0[0].clone() * nxy[2].clone(),
                n0[0].clone() * nxy[1].clone() - n0[1].clone() * nxy[0].clone(),
            ];
            for c in cross {
                assert!(c.is_zero(), "harmonicity violated: {c:?}");
            }
        }
    }

    #[test]
    fn float_normal_jet_matches_exact_at_origin() {
        let c = JetCoeffs::from_ints(&[1, 1, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]);
        let exact = normal_jet_origin(&expand_jet(&c));
        let float = normal_jet_at(&expand_jet(&c).to_f64(), 0.0, 0.0);
        for i in 0..=3 {
            for j in 0..=3 - i {
                let e = exact.partial(i, j);
                let f = float.partial(i, j);
                for k in 0..3 {
                    let ev = e[k].to_f64().unwrap();
                    assert!((ev - f[k]).abs() < 1e-10 * (1.0 + ev.abs()));
                }
            }
        }
    }

    #[test]
    fn shifted_normal_jet_is_consistent_with_resampling() {
        // Partials at (x0, y0) from one global jet must agree with the value
        // of the derivative jet evaluated there.
        let c = JetCoeffs::from_ints(&[1, 1, 0], &[1, 2, 0], &[1, 0, 0], &[1, 1, 0]);
        let j = expand_jet(&c).to_f64();
        let (x0, y0) = (0.05, -0.08);
        let nj = normal_jet_at(&j, x0, y0);
        let h = 1e-5;
        let plus = normal_jet_at(&j, x0 + h, y0).value();
        let minus = normal_jet_at(&j, x0 - h, y0).value();
        let fd: Vec<f64> = (0..3).map(|k| (plus[k] - minus[k]) / (2.0 * h)).collect();
        let ex = nj.partial(1, 0);
        for k in 0..3 {
            assert!((fd[k] - ex[k]).abs() < 1e-8, "{} vs {}", fd[k], ex[k]);
        }
    }
}
