//! Radial profiles on ℝ^N and the scalar functionals of the energy problem.
//!
//! A profile is a grid function on `[0, r_max]`; every integral carries the
//! measure weight `ω_{N-1} r^{N-1} dr`. The quadrature is a composite
//! order-4 rule (cubic interpolation integrated exactly on each interval)
//! on the graded grid; derivatives come from centered differences, one-sided
//! at the endpoints.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::params::Params;

/// A radial function: strictly increasing nodes starting at 0, finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    n: usize,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(n: usize, nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProfile("dimension N must be >= 1".into()));
        }
        if nodes.len() < 3 {
            return Err(Error::InvalidProfile("a profile needs at least 3 nodes".into()));
        }
        if nodes.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidProfile("first node must be r = 0".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidProfile("nodes must be finite and strictly increasing".into()));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("values must be finite".into()));
        }
        Ok(RadialProfile { n, nodes, values })
    }

    /// Sample `f` on a grid.
    pub fn from_fn(n: usize, nodes: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        RadialProfile::new(n, nodes, values)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// True if the node values never increase with r.
    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Max of |values| over nodes. Profiles are radial decreasing by
    /// construction, so for them this equals `values[0]`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Monotone cubic interpolant of the node data.
    pub fn interpolant(&self) -> MonotoneCubic {
        MonotoneCubic::new(&self.nodes, &self.values)
    }

    /// Pointwise map of the values onto the same grid.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        RadialProfile::new(self.n, self.nodes.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Index one past the last nonzero value: compactly supported profiles
    /// are stored with trailing exact zeros and integrated only to the first
    /// zero node after the support.
    fn integration_end(&self) -> usize {
        match self.values.iter().rposition(|&v| v != 0.0) {
            Some(k) => (k + 1).min(self.len() - 1),
            None => self.len() - 1,
        }
    }
}

/// All scalar functionals of a profile. The three composite quantities
/// (`energy`, `pohozaev`, `pohozaev2`) are linear combinations of the four
/// base integrals, computed from them rather than by separate quadrature,
/// so the defining identities hold to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValues {
    /// a = ‖u‖₂²
    pub mass: f64,
    /// ‖∇u‖₂²
    pub kinetic: f64,
    /// V(u) = ∫ u²|∇u|²
    pub quasi: f64,
    /// ‖u‖_p^p
    pub lp: f64,
    /// I(u) = kinetic/2 + quasi - lp/p
    pub energy: f64,
    /// P(u) = kinetic + (N+2)·quasi - ((p-2)N/(2p))·lp
    pub pohozaev: f64,
    /// d²/dt² I(t★u)|_{t=1}
    pub pohozaev2: f64,
    /// ‖u‖_∞ over nodes
    pub sup_norm: f64,
}

impl FunctionalValues {
    /// Energy restricted to the Pohozaev manifold:
    /// ((p-2)N-4)/(2(p-2)N)·kinetic + ((p-4)N-4)/((p-2)N)·quasi.
    /// Coincides with `energy` exactly when `pohozaev` vanishes.
    pub fn manifold_energy(&self, params: &Params) -> f64 {
        let nf = params.n as f64;
        let p = params.p;
        ((p - 2.0) * nf - 4.0) / (2.0 * (p - 2.0) * nf) * self.kinetic
            + ((p - 4.0) * nf - 4.0) / ((p - 2.0) * nf) * self.quasi
    }

    /// λ·a as read from the stationary equation: lp - kinetic - 4·quasi.
    pub fn lagrange_product(&self) -> f64 {
        self.lp - self.kinetic - 4.0 * self.quasi
    }
}

/// Evaluate every functional of `u` by quadrature.
pub fn functionals(u: &RadialProfile, params: &Params) -> Result<FunctionalValues> {
    if u.dim() != params.n {
        return Err(Error::InvalidInput(format!(
            "profile dimension {} does not match params N = {}",
            u.dim(),
            params.n
        )));
    }
    let end = u.integration_end();
    let nodes = &u.nodes[..=end];
    let vals = &u.values[..=end];
    let deriv = derivative(nodes, vals);
    let omega = params.sphere_area();
    let nm1 = (params.n - 1) as i32;
    let p = params.p;

    let weight = |r: f64| omega * r.powi(nm1);
    let mut w_mass = vec![0.0; nodes.len()];
    let mut w_kin = vec![0.0; nodes.len()];
    let mut w_quasi = vec![0.0; nodes.len()];
    let mut w_lp = vec![0.0; nodes.len()];
    for i in 0..nodes.len() {
        let w = weight(nodes[i]);
        let v = vals[i];
        let d = deriv[i];
        w_mass[i] = w * v * v;
        w_kin[i] = w * d * d;
        w_quasi[i] = w * v * v * d * d;
        w_lp[i] = w * v.abs().powf(p);
    }
    let mass = integrate_graded(nodes, &w_mass);
    let kinetic = integrate_graded(nodes, &w_kin);
    let quasi = integrate_graded(nodes, &w_quasi);
    let lp = integrate_graded(nodes, &w_lp);

    let nf = params.n as f64;
    let energy = 0.5 * kinetic + quasi - lp / p;
    let pohozaev = kinetic + (nf + 2.0) * quasi - (p - 2.0) * nf / (2.0 * p) * lp;
    let pohozaev2 = kinetic + (nf + 2.0) * (nf + 1.0) * quasi
        - (p - 2.0) * nf * ((p - 2.0) * nf - 2.0) / (4.0 * p) * lp;

    Ok(FunctionalValues {
        mass,
        kinetic,
        quasi,
        lp,
        energy,
        pohozaev,
        pohozaev2,
        sup_norm: u.sup_norm(),
    })
}

/// Empirical Gagliardo-Nirenberg report for one profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GNReport {
    pub theta1: f64,
    pub theta2: f64,
    /// lp / (mass^θ1 · quasi^θ2); the best constant is the supremum of this
    /// over profiles.
    pub ratio: f64,
    pub delta_exponent: f64,
}

pub fn gn_ratio(u: &RadialProfile, params: &Params) -> Result<GNReport> {
    let fv = functionals(u, params)?;
    if fv.quasi <= 0.0 {
        if fv.lp > 0.0 {
            return Err(Error::Numeric(
                "V(u) = 0 with ‖u‖_p > 0: inconsistent functional values".into(),
            ));
        }
        return Err(Error::InvalidInput("Gagliardo-Nirenberg ratio needs V(u) > 0".into()));
    }
    let ratio = fv.lp / (fv.mass.powf(params.theta1()) * fv.quasi.powf(params.theta2()));
    if !ratio.is_finite() {
        return Err(Error::Numeric("non-finite Gagliardo-Nirenberg ratio".into()));
    }
    Ok(GNReport {
        theta1: params.theta1(),
        theta2: params.theta2(),
        ratio,
        delta_exponent: params.delta_exponent(),
    })
}

/// Geometrically graded grid: spacing starts at `h0`, grows by `growth`
/// per interval, and is capped at `max_step`. The last node is snapped to
/// `r_max` exactly.
pub fn graded_grid(h0: f64, growth: f64, max_step: f64, r_max: f64) -> Result<Vec<f64>> {
    if !(h0 > 0.0) || !(growth >= 1.0) || !(max_step >= h0) || !(r_max > h0) {
        return Err(Error::InvalidInput(format!(
            "bad grid spec: h0={h0}, growth={growth}, max_step={max_step}, r_max={r_max}"
        )));
    }
    let mut nodes = vec![0.0];
    let mut r = 0.0;
    let mut h = h0;
    while r < r_max {
        r += h;
        if r >= r_max - 0.25 * h {
            nodes.push(r_max);
            break;
        }
        nodes.push(r);
        h = (h * growth).min(max_step);
        if nodes.len() > 8_000_000 {
            return Err(Error::Numeric("grid would exceed 8e6 nodes".into()));
        }
    }
    Ok(nodes)
}

/// Like [`graded_grid`] but with the cap released beyond `uniform_until`:
/// past that radius the spacing resumes geometric growth (rate `tail_growth`)
/// so algebraic far fields can be covered without an enormous node count.
pub fn graded_grid_with_tail(
    h0: f64,
    growth: f64,
    max_step: f64,
    uniform_until: f64,
    tail_growth: f64,
    r_max: f64,
) -> Result<Vec<f64>> {
    if uniform_until >= r_max {
        return graded_grid(h0, growth, max_step, r_max);
    }
    let mut nodes = graded_grid(h0, growth, max_step, uniform_until)?;
    let mut r = *nodes.last().unwrap();
    let mut h = max_step;
    while r < r_max {
        r += h;
        if r >= r_max - 0.25 * h {
            nodes.push(r_max);
            break;
        }
        nodes.push(r);
        h *= tail_growth;
        if nodes.len() > 8_000_000 {
            return Err(Error::Numeric("grid would exceed 8e6 nodes".into()));
        }
    }
    Ok(nodes)
}

/// Composite order-4 quadrature of node data on a non-uniform grid: each
/// interval integrates the cubic through its 4-node stencil exactly
/// (2-point Gauss-Legendre on the interpolant).
pub fn integrate_graded(nodes: &[f64], f: &[f64]) -> f64 {
    let m = nodes.len();
    debug_assert_eq!(m, f.len());
    if m < 2 {
        return 0.0;
    }
    if m == 2 {
        return 0.5 * (nodes[1] - nodes[0]) * (f[0] + f[1]);
    }
    if m == 3 {
        // quadratic through all three nodes, integrated exactly
        return quadratic_segment(nodes, f, nodes[0], nodes[2]);
    }
    const GL: f64 = 0.577350269189625764509148780502; // 1/sqrt(3)
    let mut total = 0.0;
    for k in 0..m - 1 {
        let j0 = k.saturating_sub(1).min(m - 4);
        let a = nodes[k];
        let b = nodes[k + 1];
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x1 = mid - half * GL;
        let x2 = mid + half * GL;
        let s = lagrange4(&nodes[j0..j0 + 4], &f[j0..j0 + 4], x1)
            + lagrange4(&nodes[j0..j0 + 4], &f[j0..j0 + 4], x2);
        total += half * s;
    }
    total
}

fn lagrange4(x: &[f64], y: &[f64], t: f64) -> f64 {
    let mut s = 0.0;
    for j in 0..4 {
        let mut l = y[j];
        for i in 0..4 {
            if i != j {
                l *= (t - x[i]) / (x[j] - x[i]);
            }
        }
        s += l;
    }
    s
}

fn quadratic_segment(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    const GL: f64 = 0.577350269189625764509148780502;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let eval = |t: f64| {
        let mut s = 0.0;
        for j in 0..3 {
            let mut l = y[j];
            for i in 0..3 {
                if i != j {
                    l *= (t - x[i]) / (x[j] - x[i]);
                }
            }
            s += l;
        }
        s
    };
    half * (eval(mid - half * GL) + eval(mid + half * GL))
}

/// First derivative of node data: centered 3-point differences on the
/// non-uniform grid, one-sided 3-point at the endpoints.
pub fn derivative(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    debug_assert!(m >= 3);
    let mut d = vec![0.0; m];
    for i in 1..m - 1 {
        let hl = nodes[i] - nodes[i - 1];
        let hr = nodes[i + 1] - nodes[i];
        d[i] = -hr / (hl * (hl + hr)) * values[i - 1]
            + (hr - hl) / (hl * hr) * values[i]
            + hl / (hr * (hl + hr)) * values[i + 1];
    }
    let h0 = nodes[1] - nodes[0];
    let h1 = nodes[2] - nodes[1];
    d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * values[0]
        + (h0 + h1) / (h0 * h1) * values[1]
        - h0 / (h1 * (h0 + h1)) * values[2];
    let hm = nodes[m - 1] - nodes[m - 2];
    let hm1 = nodes[m - 2] - nodes[m - 3];
    d[m - 1] = (2.0 * hm + hm1) / (hm * (hm + hm1)) * values[m - 1]
        - (hm + hm1) / (hm * hm1) * values[m - 2]
        + hm / (hm1 * (hm + hm1)) * values[m - 3];
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_profile(n: usize, h: f64, r_max: f64) -> RadialProfile {
        let grid = graded_grid(h, 1.0, h, r_max).unwrap();
        RadialProfile::from_fn(n, grid, |r| (-0.5 * r * r).exp()).unwrap()
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(RadialProfile::new(1, vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(RadialProfile::new(1, vec![0.1, 1.0, 2.0], vec![1.0, 0.5, 0.2]).is_err());
        assert!(RadialProfile::new(1, vec![0.0, 1.0, 0.5], vec![1.0, 0.5, 0.2]).is_err());
        assert!(RadialProfile::new(1, vec![0.0, 1.0, 2.0], vec![1.0, f64::NAN, 0.2]).is_err());
        assert!(RadialProfile::new(1, vec![0.0, 1.0, 2.0], vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn gaussian_mass_n1() {
        // closed form: ∫_ℝ e^{-r²} dr = √π; oracle value 1.77245385090551603
        let params = Params::new(1, 9.0).unwrap();
        let u = gaussian_profile(1, 2e-4, 12.0);
        let fv = functionals(&u, &params).unwrap();
        let exact = 1.772_453_850_905_516_f64;
        assert!(
            (fv.mass - exact).abs() / exact < 1e-10,
            "mass = {}, expected {exact}",
            fv.mass
        );
    }

    #[test]
    fn gaussian_kinetic_and_quasi_n1() {
        // kinetic = √π/2 = 0.886226925452758; quasi = √(π/2)/4 = 0.313328534328875
        let params = Params::new(1, 9.0).unwrap();
        let u = gaussian_profile(1, 2e-4, 12.0);
        let fv = functionals(&u, &params).unwrap();
        let kin_exact = 0.886_226_925_452_758_f64;
        let quasi_exact = 0.313_328_534_328_875_f64;
        assert!((fv.kinetic - kin_exact).abs() / kin_exact < 1e-7);
        assert!((fv.quasi - quasi_exact).abs() / quasi_exact < 1e-7);
    }

    #[test]
    fn zero_profile_all_zero() {
        let params = Params::new(2, 8.0).unwrap();
        let grid = graded_grid(1e-3, 1.02, 0.05, 5.0).unwrap();
        let u = RadialProfile::from_fn(2, grid, |_| 0.0).unwrap();
        let fv = functionals(&u, &params).unwrap();
        assert_eq!(fv.mass, 0.0);
        assert_eq!(fv.kinetic, 0.0);
        assert_eq!(fv.quasi, 0.0);
        assert_eq!(fv.lp, 0.0);
        assert_eq!(fv.energy, 0.0);
        assert_eq!(fv.pohozaev, 0.0);
        assert_eq!(fv.pohozaev2, 0.0);
        assert_eq!(fv.sup_norm, 0.0);
    }

    #[test]
    fn linear_identities_hold_to_rounding() {
        let params = Params::new(3, 7.0).unwrap();
        let grid = graded_grid(1e-5, 1.01, 2e-3, 10.0).unwrap();
        let u = RadialProfile::from_fn(3, grid, |r| (1.0 + r * r).powf(-1.8)).unwrap();
        let fv = functionals(&u, &params).unwrap();
        let nf = 3.0;
        let p = params.p;
        let e = 0.5 * fv.kinetic + fv.quasi - fv.lp / p;
        let poh = fv.kinetic + (nf + 2.0) * fv.quasi - (p - 2.0) * nf / (2.0 * p) * fv.lp;
        let poh2 = fv.kinetic + (nf + 2.0) * (nf + 1.0) * fv.quasi
            - (p - 2.0) * nf * ((p - 2.0) * nf - 2.0) / (4.0 * p) * fv.lp;
        assert_eq!(fv.energy, e);
        assert_eq!(fv.pohozaev, poh);
        assert_eq!(fv.pohozaev2, poh2);
    }

    #[test]
    fn quasi_equals_quarter_kinetic_of_square() {
        let params = Params::new(1, 9.0).unwrap();
        let u = gaussian_profile(1, 4e-5, 11.0);
        let fv = functionals(&u, &params).unwrap();
        let usq = u.map_values(|v| v * v).unwrap();
        let fv2 = functionals(&usq, &params).unwrap();
        let rel = (fv.quasi - 0.25 * fv2.kinetic).abs() / fv.quasi;
        assert!(rel < 1e-8, "relative gap {rel}");
    }

    #[test]
    fn quadrature_converges_at_order_four() {
        // pure integrals (no differentiation) halve-grid converge at the
        // quadrature order; differentiated functionals at the FD order 2
        let params = Params::new(1, 9.0).unwrap();
        let exact_mass = 1.772_453_850_905_516_f64;
        let exact_kin = 0.886_226_925_452_758_f64;
        let mut mass_err = Vec::new();
        let mut kin_err = Vec::new();
        for h in [4e-3, 2e-3] {
            let u = gaussian_profile(1, h, 12.0);
            let fv = functionals(&u, &params).unwrap();
            mass_err.push((fv.mass - exact_mass).abs());
            kin_err.push((fv.kinetic - exact_kin).abs());
        }
        let mass_order = (mass_err[0] / mass_err[1]).log2();
        let kin_order = (kin_err[0] / kin_err[1]).log2();
        assert!(mass_order > 3.5, "mass order {mass_order}");
        assert!(kin_order > 1.7 && kin_order < 2.6, "kinetic order {kin_order}");
    }

    #[test]
    fn compact_support_stops_at_first_zero_node() {
        let params = Params::new(1, 9.0).unwrap();
        let nodes: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.002).collect();
        // supported on [0, 1]: v = (1-r²)₊, exact zeros beyond
        let vals: Vec<f64> =
            nodes.iter().map(|&r| if r < 1.0 { 1.0 - r * r } else { 0.0 }).collect();
        let u = RadialProfile::new(1, nodes.clone(), vals).unwrap();
        let fv = functionals(&u, &params).unwrap();
        // ∫_ℝ (1-r²)² dr over [-1,1] = 2·(1 - 2/3 + 1/5) = 16/15
        assert!((fv.mass - 16.0 / 15.0).abs() < 1e-6, "mass = {}", fv.mass);
    }

    #[test]
    fn gn_ratio_finite_and_gated() {
        let params = Params::new(1, 9.0).unwrap();
        let u = gaussian_profile(1, 1e-3, 10.0);
        let rep = gn_ratio(&u, &params).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
        assert!((rep.theta1 - (4.0 + 9.0) / 6.0).abs() < 1e-14);
        assert!((rep.theta2 - 7.0 / 6.0).abs() < 1e-14);
        let grid = graded_grid(1e-3, 1.02, 0.05, 5.0).unwrap();
        let zero = RadialProfile::from_fn(1, grid, |_| 0.0).unwrap();
        assert!(gn_ratio(&zero, &params).is_err());
    }

    #[test]
    fn gn_ratio_stable_under_refinement() {
        let params = Params::new(1, 9.0).unwrap();
        let coarse = gaussian_profile(1, 1e-3, 11.0);
        let fine = gaussian_profile(1, 5e-4, 11.0);
        let r0 = gn_ratio(&coarse, &params).unwrap().ratio;
        let r1 = gn_ratio(&fine, &params).unwrap().ratio;
        assert!((r0 - r1).abs() / r1 < 1e-6, "ratio drift {}", (r0 - r1).abs() / r1);
    }
}
