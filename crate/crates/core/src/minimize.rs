//! Independent min-max oracle: minimize the reduced energy
//! u ↦ max_{t>0} I(t★u) over radial decreasing profiles of mass a, without
//! any ODE shooting. Desk-scale Nelder-Mead over a low-dimensional
//! monotone-spline parametrization; every candidate is renormalized to mass
//! exactly a, and the fiber maximum is evaluated in closed form from the
//! fiber polynomial.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{project_pohozaev, FiberPolynomial};
use crate::interp::MonotoneCubic;
use crate::params::Params;
use crate::radial::{functionals, graded_grid, RadialProfile};

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Knot count of the decreasing-spline parametrization (8-16 is the
    /// intended range).
    pub knots: usize,
    pub max_iters: usize,
    /// Relative spread of simplex values at which the search stops.
    pub tol: f64,
    /// Seed for the restart jitter.
    pub seed: u64,
    pub restarts: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { knots: 12, max_iters: 6000, tol: 1e-11, seed: 0, restarts: 2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeResult {
    #[serde(skip)]
    pub profile: RadialProfile,
    pub a: f64,
    pub m_hat: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Decreasing-profile family: heights at fixed relative knot abscissas on a
/// floating length scale, glued to an exponential tail.
///
/// θ = [ln h₀, d₁, ..., d_{K-1}, ln s, ln β]: heights decrease by the
/// softplus of each dᵢ, the knots sit at s·ξᵢ, and the tail decays at rate
/// β/s past the last knot.
struct Family {
    n: usize,
    xi: Vec<f64>,
}

impl Family {
    fn new(n: usize, knots: usize) -> Self {
        let xi = (0..knots).map(|j| 1.6 * j as f64 / (knots - 1) as f64).collect();
        Family { n, xi }
    }

    fn dim(&self) -> usize {
        self.xi.len() + 2
    }

    fn softplus(x: f64) -> f64 {
        if x > 30.0 {
            x
        } else {
            x.exp().ln_1p()
        }
    }

    /// Build the grid profile for parameters θ; None when θ leaves its
    /// sane box.
    fn build(&self, theta: &[f64]) -> Option<RadialProfile> {
        let k = self.xi.len();
        let h0 = theta[0].exp();
        let s = theta[k].exp();
        let beta = theta[k + 1].exp();
        if !(1e-6..=1e6).contains(&h0)
            || !(1e-4..=1e4).contains(&s)
            || !(0.05..=50.0).contains(&beta)
        {
            return None;
        }
        let mut heights = Vec::with_capacity(k);
        let mut h = h0;
        heights.push(h);
        for d in &theta[1..k] {
            h *= (-Self::softplus(*d)).exp();
            heights.push(h);
        }
        let radii: Vec<f64> = self.xi.iter().map(|&x| x * s).collect();
        let spline = MonotoneCubic::new(&radii, &heights);
        let r_knot = radii[k - 1];
        let mu = beta / s;
        let r_end = r_knot + (heights[k - 1].max(1e-300) / (1e-13 * h0)).ln().max(1.0) / mu;
        let grid = graded_grid(1e-5 * s, 1.02, 8e-3 * s, r_end).ok()?;
        let tail_h = heights[k - 1];
        let values: Vec<f64> = grid
            .iter()
            .map(|&r| {
                if r <= r_knot {
                    spline.eval(r)
                } else {
                    tail_h * (-mu * (r - r_knot)).exp()
                }
            })
            .collect();
        RadialProfile::new(self.n, grid, values).ok()
    }
}

/// Reduced energy of the mass-a normalization of a candidate profile:
/// rescale values so mass = a exactly, then take max_t I(t★u) = h(t_u)
/// from the fiber polynomial.
fn reduced_energy_at_mass(params: &Params, profile: &RadialProfile, a: f64) -> Option<f64> {
    let fv = functionals(profile, params).ok()?;
    if !(fv.mass > 0.0) {
        return None;
    }
    let c = (a / fv.mass).sqrt();
    let c2 = c * c;
    // kinetic, quasi, lp scale by c², c⁴, c^p under u ↦ c·u
    let kinetic = c2 * fv.kinetic;
    let quasi = c2 * c2 * fv.quasi;
    let lp = c.powf(params.p) * fv.lp;
    let poly =
        FiberPolynomial::new(0.5 * kinetic, quasi, lp / params.p, params.n, params.sigma).ok()?;
    let t = poly.critical_point().ok()?;
    Some(poly.h(t))
}

/// Fit family parameters to an initial profile.
fn fit_theta(family: &Family, init: &RadialProfile) -> Vec<f64> {
    let k = family.xi.len();
    let interp = init.interpolant();
    let h0 = init.values()[0].max(1e-12);
    // half-height radius as the length scale
    let mut s = init.r_max() * 0.25;
    for (r, v) in init.nodes().iter().zip(init.values()) {
        if *v <= 0.5 * h0 {
            s = (*r).max(init.nodes()[1]);
            break;
        }
    }
    let mut heights = Vec::with_capacity(k);
    let mut prev = f64::INFINITY;
    for &x in &family.xi {
        let mut v = interp.eval(x * s).max(1e-14 * h0);
        if v >= prev {
            v = prev * 0.95;
        }
        heights.push(v);
        prev = v;
    }
    let mut theta = vec![0.0; family.dim()];
    theta[0] = heights[0].ln();
    for j in 1..k {
        let ratio = (heights[j - 1] / heights[j]).ln().max(1e-8);
        // invert the softplus
        theta[j] = if ratio > 30.0 { ratio } else { (ratio.exp() - 1.0).max(1e-12).ln() };
    }
    theta[k] = s.ln();
    theta[k + 1] = 0.0; // β = 1: tail rate 1/s
    theta
}

/// Nelder-Mead with standard coefficients.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    max_iters: usize,
    tol: f64,
) -> (Vec<f64>, f64, usize) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += scale;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = dim + 1;
    while evals < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= tol * (best.abs() + 1e-30) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let xr: Vec<f64> =
            (0..dim).map(|j| centroid[j] + (centroid[j] - simplex[dim].0[j])).collect();
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe: Vec<f64> =
                (0..dim).map(|j| centroid[j] + 2.0 * (centroid[j] - simplex[dim].0[j])).collect();
            let fe = f(&xe);
            evals += 1;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let xc: Vec<f64> =
            (0..dim).map(|j| centroid[j] + 0.5 * (simplex[dim].0[j] - centroid[j])).collect();
        let fc = f(&xc);
        evals += 1;
        if fc < simplex[dim].1 {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best_x = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            for j in 0..dim {
                v.0[j] = best_x[j] + 0.5 * (v.0[j] - best_x[j]);
            }
            v.1 = f(&v.0);
            evals += 1;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), simplex[0].1, evals)
}

/// Minimize the reduced energy over the decreasing-profile family at mass
/// exactly a, starting from `init`.
pub fn minimize_reduced(
    params: &Params,
    a: f64,
    init: &RadialProfile,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("mass must be positive, got {a}")));
    }
    if init.dim() != params.n {
        return Err(Error::InvalidInput("init profile dimension mismatch".into()));
    }
    if !init.is_nonnegative() || !init.is_nonincreasing() || init.sup_norm() == 0.0 {
        return Err(Error::InvalidInput(
            "init profile must be nonzero, nonnegative and decreasing".into(),
        ));
    }
    let init_mass = functionals(init, params)?.mass;
    if init_mass > a * (1.0 + 1e-8) {
        return Err(Error::InvalidInput(format!(
            "init profile mass {init_mass} exceeds the target {a}"
        )));
    }
    let family = Family::new(params.n, opts.knots.clamp(8, 16));
    let objective = |theta: &[f64]| -> f64 {
        match family.build(theta).and_then(|u| reduced_energy_at_mass(params, &u, a)) {
            Some(v) => v,
            None => 1e30,
        }
    };
    let mut theta = fit_theta(&family, init);
    if objective(&theta) >= 1e30 {
        return Err(Error::Numeric("could not fit the spline family to the init profile".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_val = f64::INFINITY;
    let mut total_evals = 0usize;
    for restart in 0..=opts.restarts {
        let scale = 0.25 / (1 << restart) as f64;
        let jitter: Vec<f64> = if restart == 0 {
            vec![0.0; family.dim()]
        } else {
            (0..family.dim()).map(|_| rng.random_range(-0.02..0.02)).collect()
        };
        let start: Vec<f64> = theta.iter().zip(&jitter).map(|(t, j)| t + j).collect();
        let (best, val, evals) =
            nelder_mead(&objective, &start, scale, opts.max_iters / (opts.restarts + 1), opts.tol);
        total_evals += evals;
        if val < best_val {
            best_val = val;
            theta = best;
        }
    }
    if best_val >= 1e30 {
        return Err(Error::Numeric("reduced-energy search never found a feasible profile".into()));
    }
    // final candidate: normalize to mass a and project onto the manifold
    let raw = family
        .build(&theta)
        .ok_or_else(|| Error::Numeric("best parameters left the feasible box".into()))?;
    let fv = functionals(&raw, params)?;
    let c = (a / fv.mass).sqrt();
    let normalized = raw.map_values(|v| c * v)?;
    let projection = project_pohozaev(&normalized, params)?;
    Ok(MinimizeResult {
        profile: projection.projected,
        a,
        m_hat: best_val,
        iterations: total_evals,
        converged: total_evals < opts.max_iters,
    })
}

/// Neutral starting profile: the best mass-a Gaussian over a scale ladder.
pub fn default_init(params: &Params, a: f64) -> Result<RadialProfile> {
    let mut best: Option<(f64, f64)> = None; // (reduced energy, scale)
    for k in 0..24 {
        let s = 0.15 * (200.0f64).powf(k as f64 / 23.0); // 0.15 .. 30
        let grid = graded_grid(1e-4 * s, 1.02, 1e-2 * s, 14.0 * s)?;
        let u = RadialProfile::from_fn(params.n, grid, |r| (-0.5 * (r / s).powi(2)).exp())?;
        if let Some(m) = reduced_energy_at_mass(params, &u, a) {
            if best.map(|(b, _)| m < b).unwrap_or(true) {
                best = Some((m, s));
            }
        }
    }
    let (_, s) =
        best.ok_or_else(|| Error::Numeric("no feasible Gaussian init for this mass".into()))?;
    let grid = graded_grid(1e-4 * s, 1.02, 5e-3 * s, 16.0 * s)?;
    let u = RadialProfile::from_fn(params.n, grid, |r| (-0.5 * (r / s).powi(2)).exp())?;
    let mass = functionals(&u, params)?.mass;
    let c = (a / mass).sqrt();
    u.map_values(|v| c * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_ladder_monotone_in_mass() {
        // M̂ decreases as the mass grows
        let params = Params::new(1, 9.0).unwrap();
        let opts = MinimizeOptions { max_iters: 1500, restarts: 1, ..Default::default() };
        let masses = [1.8, 2.6, 3.8];
        let mut found = Vec::new();
        for &a in &masses {
            let init = default_init(&params, a).unwrap();
            let out = minimize_reduced(&params, a, &init, &opts).unwrap();
            found.push(out.m_hat);
        }
        assert!(found[0] > found[1] && found[1] > found[2], "M̂ must decrease in a: {found:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = Params::new(1, 9.0).unwrap();
        let init = default_init(&params, 2.0).unwrap();
        let opts = MinimizeOptions::default();
        assert!(minimize_reduced(&params, -1.0, &init, &opts).is_err());
        // init mass above the target is rejected
        assert!(minimize_reduced(&params, 1.0, &init, &opts).is_err());
    }

    #[test]
    fn result_mass_saturates() {
        let params = Params::new(1, 9.0).unwrap();
        let a = 2.5;
        let init = default_init(&params, a).unwrap();
        let opts = MinimizeOptions { max_iters: 1200, restarts: 0, ..Default::default() };
        let out = minimize_reduced(&params, a, &init, &opts).unwrap();
        let fv = functionals(&out.profile, &params).unwrap();
        assert!(
            (fv.mass - a).abs() / a < 1e-5,
            "projected minimizer mass {} vs target {a}",
            fv.mass
        );
        let scale = fv.kinetic + 3.0 * fv.quasi + 0.5 * fv.lp;
        assert!(fv.pohozaev.abs() < 1e-4 * scale);
        assert!(out.m_hat > 0.0);
    }
}
