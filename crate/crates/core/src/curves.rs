//! The ground-state branch λ ↦ (a, M_a) and the asymptotic checks along it:
//! monotonicity of M in a, the zero-mass threshold a₀ for N ≥ 5, the
//! free-boundary small-mass limit, the semilinear large-mass asymptotics,
//! and the Talenti rescaling at N = 3, p = 6.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::FiberPolynomial;
use crate::ivp::Trajectory;
use crate::params::Params;
use crate::radial::{functionals, RadialProfile};
use crate::shooting::{
    shoot_dual, shoot_zero_mass, DecayShot, FreeBoundarySolution, ShootDiagnostics, ShootOptions,
    ZeroMassSolution,
};

/// One solved ground state on the branch.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BranchPoint {
    pub lambda: f64,
    /// Mass ‖u‖₂².
    pub a: f64,
    /// Energy I(u) = M_a on the branch.
    pub m: f64,
    pub kinetic: f64,
    pub quasi: f64,
    pub lp: f64,
    pub sup_norm: f64,
    /// |λa - (lp - kinetic - 4·quasi)|.
    pub lagrange_residual: f64,
    /// |P(u)|.
    pub pohozaev_residual: f64,
}

impl BranchPoint {
    /// Both residual gates at the given relative tolerance.
    pub fn passes_gates(&self, rtol: f64) -> bool {
        self.lagrange_residual <= rtol * self.lambda * self.a
            && self.pohozaev_residual <= rtol * self.kinetic
    }
}

/// A branch point together with the profiles it came from.
#[derive(Debug, Clone)]
pub struct BranchSolution {
    pub point: BranchPoint,
    /// Dual profile v_λ.
    pub v: Trajectory,
    /// Primal profile u = φ(v_λ).
    pub u: RadialProfile,
    pub diagnostics: ShootDiagnostics,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub shoot: ShootOptions,
    /// Residual gate for both identities, relative.
    pub residual_rtol: f64,
    /// Slack for the strict-monotonicity check of M along a.
    pub monotone_slack: f64,
    /// Minimum fraction of λ points that must solve.
    pub min_success: f64,
    /// Worker threads for the sweep (1 = sequential).
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            shoot: ShootOptions::default(),
            residual_rtol: 1e-4,
            monotone_slack: 1e-6,
            min_success: 0.8,
            jobs: 1,
        }
    }
}

/// Solve one branch point: dual shooting at λ, map to u = φ(v), evaluate
/// the functionals and both residuals.
///
/// Near the zero-mass limit (N ≥ 5, λ → 0) the Lagrange identity
/// λa = lp − kinetic − 4·quasi degenerates: λa comes out of a cancellation
/// of much larger terms, so the residual gate demands far more quadrature
/// accuracy than elsewhere on the branch. The grid-spacing cap is refined
/// until both gates clear (or the ladder bottoms out).
pub fn branch_point(params: &Params, lambda: f64, opts: &SweepOptions) -> Result<BranchSolution> {
    let caps = [opts.shoot.grid_cap_rel, 1e-4, 2.5e-5, 1e-5];
    let mut last: Option<BranchSolution> = None;
    for (k, &cap) in caps.iter().enumerate() {
        if cap > opts.shoot.grid_cap_rel && k > 0 {
            continue;
        }
        let shoot = ShootOptions { grid_cap_rel: cap, ..opts.shoot };
        let shot: DecayShot = shoot_dual(params, lambda, &shoot)?;
        let u = crate::shooting::primal_profile(&shot.trajectory)?;
        let fv = functionals(&u, params)?;
        let point = BranchPoint {
            lambda,
            a: fv.mass,
            m: fv.energy,
            kinetic: fv.kinetic,
            quasi: fv.quasi,
            lp: fv.lp,
            sup_norm: fv.sup_norm,
            lagrange_residual: (lambda * fv.mass - fv.lagrange_product()).abs(),
            pohozaev_residual: fv.pohozaev.abs(),
        };
        let sol = BranchSolution { point, v: shot.trajectory, u, diagnostics: shot.diagnostics };
        if sol.point.passes_gates(opts.residual_rtol) {
            return Ok(sol);
        }
        last = Some(sol);
    }
    Ok(last.expect("at least one cap level ran"))
}

/// Tail values of the three functionals at the large-mass end of the table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauEstimates {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    /// M strictly decreasing along increasing a (within the slack).
    pub decreasing: bool,
    /// Worst adjacent-pair violation, relative to |M|.
    pub max_violation: f64,
    pub pairs: usize,
}

/// The swept branch, sorted by mass.
#[derive(Debug, Clone, Serialize)]
pub struct BranchTable {
    pub points: Vec<BranchPoint>,
    /// +∞ for N ≤ 4; ‖u₀‖₂² for N ≥ 5.
    pub a_star: f64,
    pub tau_estimates: TauEstimates,
    pub monotone: MonotoneReport,
    /// λ strictly decreasing along increasing a.
    pub lambda_monotone_in_a: bool,
    /// log₁₀ of λ(a_min)/λ(a_max).
    pub lambda_span_decades: f64,
    /// λ·a at the largest mass over its mid-branch value; tends to 0 for
    /// 1 ≤ N ≤ 3 with p < 2*.
    pub lambda_a_tail_ratio: f64,
    /// λ points that failed to solve or missed a residual gate.
    pub failures: Vec<(f64, String)>,
}

/// Geometric λ grid.
pub fn geometric_lambdas(lambda_min: f64, lambda_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lambda_min * (lambda_max / lambda_min).powf(k as f64 / (count - 1).max(1) as f64))
        .collect()
}

/// Sweep the branch over a λ grid (≥ 8 points spanning ≥ 3 decades),
/// dropping failed points with a warning as long as at least the
/// `min_success` fraction solves.
pub fn branch_sweep(params: &Params, lambdas: &[f64], opts: &SweepOptions) -> Result<BranchTable> {
    if lambdas.len() < 8 {
        return Err(Error::InvalidInput(format!(
            "a branch sweep needs at least 8 λ points, got {}",
            lambdas.len()
        )));
    }
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().cloned().fold(0.0f64, f64::max);
    if !(lo > 0.0) || hi / lo < 1e3 * (1.0 - 1e-9) {
        return Err(Error::InvalidInput(format!(
            "a branch sweep must span at least 3 decades of λ, got [{lo}, {hi}]"
        )));
    }
    let solve = |&lambda: &f64| (lambda, branch_point(params, lambda, opts));
    let results: Vec<(f64, Result<BranchSolution>)> = if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Numeric(format!("worker pool: {e}")))?;
        pool.install(|| lambdas.par_iter().map(solve).collect())
    } else {
        lambdas.iter().map(solve).collect()
    };

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (lambda, res) in results {
        match res {
            Ok(sol) => {
                if sol.point.passes_gates(opts.residual_rtol) {
                    points.push(sol.point);
                } else {
                    failures.push((
                        lambda,
                        format!(
                            "residual gate: lagrange {} (λa {}), pohozaev {} (kinetic {})",
                            sol.point.lagrange_residual,
                            lambda * sol.point.a,
                            sol.point.pohozaev_residual,
                            sol.point.kinetic
                        ),
                    ));
                }
            }
            Err(e) => failures.push((lambda, e.to_string())),
        }
    }
    if (points.len() as f64) < opts.min_success * lambdas.len() as f64 {
        return Err(Error::Numeric(format!(
            "branch sweep solved only {}/{} points",
            points.len(),
            lambdas.len()
        )));
    }
    points.sort_by(|x, y| x.a.total_cmp(&y.a));

    let mut decreasing = true;
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for w in points.windows(2) {
        let rel = (w[1].m - w[0].m) / w[0].m.abs();
        if rel > opts.monotone_slack {
            decreasing = false;
        }
        max_violation = max_violation.max(rel);
    }
    let lambda_monotone_in_a = points.windows(2).all(|w| w[1].lambda < w[0].lambda);
    let lambda_span_decades =
        (points.first().unwrap().lambda / points.last().unwrap().lambda).log10();
    let mid = &points[points.len() / 2];
    let last = points.last().unwrap();
    let lambda_a_tail_ratio = (last.lambda * last.a) / (mid.lambda * mid.a);

    let a_star =
        if params.n <= 4 { f64::INFINITY } else { shoot_zero_mass(params, &opts.shoot)?.a0 };
    let tau_estimates = TauEstimates { tau1: last.kinetic, tau2: last.quasi, tau3: last.lp };

    Ok(BranchTable {
        points,
        a_star,
        tau_estimates,
        monotone: MonotoneReport { decreasing, max_violation, pairs: lambdas.len() - 1 },
        lambda_monotone_in_a,
        lambda_span_decades,
        lambda_a_tail_ratio,
        failures,
    })
}

/// λ→0⁺ extrapolation of the branch against the zero-mass solution, N ≥ 5.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct A0Report {
    /// a(λ→0⁺) by 3-point Richardson extrapolation in √λ.
    pub a0_extrapolated: f64,
    /// ‖u₀‖₂² from the zero-mass solver.
    pub a0_zero_mass: f64,
    pub a0_rel_gap: f64,
    /// M(λ→0⁺), same extrapolation.
    pub m_extrapolated: f64,
    /// I(u₀).
    pub m_u0: f64,
    pub m_rel_gap: f64,
    /// Set when the a₀ gap exceeds 5%: branch truncation suspected.
    pub flagged: bool,
}

/// Quadratic (3-point) extrapolation of y(x) to x = 0.
fn richardson3(x: [f64; 3], y: [f64; 3]) -> f64 {
    let mut out = 0.0;
    for i in 0..3 {
        let mut l = y[i];
        for j in 0..3 {
            if j != i {
                l *= -x[j] / (x[i] - x[j]);
            }
        }
        out += l;
    }
    out
}

pub fn estimate_a0(
    params: &Params,
    table: &BranchTable,
    zero_mass: &ZeroMassSolution,
) -> Result<A0Report> {
    if params.n < 5 {
        return Err(Error::InvalidParams(format!(
            "a₀ is defined only for N ≥ 5 (got N = {}); a* = +∞ below that",
            params.n
        )));
    }
    let mut pts = table.points.clone();
    pts.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    if pts.len() < 3 || pts[0].lambda > 1e-3 * (1.0 + 1e-9) {
        return Err(Error::InvalidInput(
            "a₀ extrapolation needs the branch solved down to λ ≤ 1e-3".into(),
        ));
    }
    let x = [pts[0].lambda.sqrt(), pts[1].lambda.sqrt(), pts[2].lambda.sqrt()];
    let a0_extrapolated = richardson3(x, [pts[0].a, pts[1].a, pts[2].a]);
    let m_extrapolated = richardson3(x, [pts[0].m, pts[1].m, pts[2].m]);
    let a0_zero_mass = zero_mass.a0;
    let m_u0 = zero_mass.functionals.energy;
    let a0_rel_gap = (a0_extrapolated - a0_zero_mass).abs() / a0_zero_mass;
    let m_rel_gap = (m_extrapolated - m_u0).abs() / m_u0.abs();
    Ok(A0Report {
        a0_extrapolated,
        a0_zero_mass,
        a0_rel_gap,
        m_extrapolated,
        m_u0,
        m_rel_gap,
        flagged: a0_rel_gap > 0.05,
    })
}

/// Small-mass rescalings of one branch solution against the free-boundary
/// profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallMassPoint {
    pub lambda: f64,
    /// sup |ṽ_λ - ṽ| on [0, 0.9R].
    pub sup_distance: f64,
    /// ū_λ(0)/√(ṽ(0)) against the free-boundary head, tending to 2^{1/4}.
    pub u_bar_ratio: f64,
    /// ‖v_λ‖_∞^{(p-2)/2}/λ, bounded below by 2^{(2-p)/4}.
    pub v_ratio: f64,
    /// ‖u_λ‖_∞^{p-2}/λ, bounded between positive constants.
    pub u_ratio: f64,
}

/// The rescaled dual profile ṽ_λ(x) = λ^{-2/(p-2)} v_λ(x/λ^{(p-4)/(2(p-2))}).
pub fn rescale_small_mass(params: &Params, v: &RadialProfile, lambda: f64) -> RadialProfile {
    let p = params.p;
    let node_scale = lambda.powf((p - 4.0) / (2.0 * (p - 2.0)));
    let val_scale = lambda.powf(-2.0 / (p - 2.0));
    let nodes = v.nodes().iter().map(|&r| r * node_scale).collect();
    let values = v.values().iter().map(|&x| x * val_scale).collect();
    RadialProfile::new(v.dim(), nodes, values).expect("rescaling preserves validity")
}

pub fn small_mass_point(
    params: &Params,
    sol: &BranchSolution,
    fb: &FreeBoundarySolution,
) -> SmallMassPoint {
    let p = params.p;
    let lambda = sol.point.lambda;
    let scaled = rescale_small_mass(params, &sol.v.profile, lambda);
    let fb_interp = fb.v_tilde.interpolant();
    let sc_interp = scaled.interpolant();
    let mut sup = 0.0f64;
    let samples = 1000;
    for k in 0..=samples {
        let r = 0.9 * fb.radius * k as f64 / samples as f64;
        sup = sup.max((fb_interp.eval(r) - sc_interp.eval(r)).abs());
    }
    let v0 = sol.v.profile.values()[0];
    let u0 = sol.u.values()[0];
    let u_bar0 = lambda.powf(-1.0 / (p - 2.0)) * u0;
    SmallMassPoint {
        lambda,
        sup_distance: sup,
        u_bar_ratio: u_bar0 / fb.alpha.sqrt(),
        v_ratio: v0.powf(0.5 * (p - 2.0)) / lambda,
        u_ratio: u0.powf(p - 2.0) / lambda,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallMassReport {
    pub points: Vec<SmallMassPoint>,
    /// sup-distance strictly decreasing along increasing λ.
    pub distances_decreasing: bool,
    /// ū ratio at the largest λ against 2^{1/4}, relative.
    pub u_bar_ratio_gap: f64,
    /// min over the ladder of v_ratio / 2^{(2-p)/4}.
    pub v_ratio_floor: f64,
    /// max/min of u_ratio across the ladder.
    pub u_ratio_spread: f64,
}

/// Check the small-mass limit on a ladder of solutions (any order; the
/// report sorts by λ).
pub fn small_mass_limit_check(
    params: &Params,
    sols: &[BranchSolution],
    fb: &FreeBoundarySolution,
) -> Result<SmallMassReport> {
    if sols.len() < 2 {
        return Err(Error::InvalidInput("small-mass check needs at least 2 λ points".into()));
    }
    let mut points: Vec<SmallMassPoint> =
        sols.iter().map(|s| small_mass_point(params, s, fb)).collect();
    points.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let distances_decreasing = points.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance);
    let quarter = 2f64.powf(0.25);
    let u_bar_ratio_gap = (points.last().unwrap().u_bar_ratio - quarter).abs() / quarter;
    let liminf_bound = 2f64.powf(0.25 * (2.0 - params.p));
    let v_ratio_floor =
        points.iter().map(|q| q.v_ratio / liminf_bound).fold(f64::INFINITY, f64::min);
    let u_max = points.iter().map(|q| q.u_ratio).fold(0.0f64, f64::max);
    let u_min = points.iter().map(|q| q.u_ratio).fold(f64::INFINITY, f64::min);
    Ok(SmallMassReport {
        points,
        distances_decreasing,
        u_bar_ratio_gap,
        v_ratio_floor,
        u_ratio_spread: u_max / u_min,
    })
}

/// Large-mass asymptotics against the semilinear profile W, for 1 ≤ N ≤ 3
/// with p < 2*.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LargeMassReport {
    /// Fitted log-log slope of λ against a.
    pub slope: f64,
    /// −2(p−2)/((p−2)N−4).
    pub slope_target: f64,
    pub slope_rel_gap: f64,
    /// Observed λ·a^{2(p−2)/((p−2)N−4)} at the largest mass.
    pub prefactor: f64,
    /// ‖W‖₂^{4(p−2)/((p−2)N−4)}.
    pub prefactor_target: f64,
    pub prefactor_rel_gap: f64,
    /// M/(λa) at the largest mass.
    pub energy_ratio: f64,
    /// ((p−2)N−4)/(2(p−2)N)·‖∇W‖₂²/‖W‖₂².
    pub energy_ratio_target: f64,
    pub energy_ratio_rel_gap: f64,
    pub r_squared: f64,
    /// Set when the log-log fit has R² < 0.999.
    pub flagged: bool,
}

pub fn large_mass_asymptotics(
    params: &Params,
    table: &BranchTable,
    w_shot: &DecayShot,
) -> Result<LargeMassReport> {
    if params.n > 3 || !(params.p < params.two_star) {
        return Err(Error::InvalidParams(format!(
            "large-mass asymptotics need 1 ≤ N ≤ 3 and p < 2*; got N = {}, p = {} (2* = {})",
            params.n, params.p, params.two_star
        )));
    }
    let w_fv = functionals(&w_shot.trajectory.profile, params)?;
    let pts = &table.points;
    if pts.len() < 4 {
        return Err(Error::InvalidInput("large-mass fit needs at least 4 points".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|q| q.a.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|q| q.lambda.ln()).collect();
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let mean_y = sy / m;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = 1.0 - ss_res / ss_tot;

    let nf = params.n as f64;
    let p = params.p;
    let delta = (p - 2.0) * nf - 4.0;
    let slope_target = -2.0 * (p - 2.0) / delta;
    let last = pts.last().unwrap();
    let prefactor = last.lambda * last.a.powf(2.0 * (p - 2.0) / delta);
    let prefactor_target = w_fv.mass.powf(2.0 * (p - 2.0) / delta);
    let energy_ratio = last.m / (last.lambda * last.a);
    let energy_ratio_target = delta / (2.0 * (p - 2.0) * nf) * w_fv.kinetic / w_fv.mass;
    Ok(LargeMassReport {
        slope,
        slope_target,
        slope_rel_gap: (slope - slope_target).abs() / slope_target.abs(),
        prefactor,
        prefactor_target,
        prefactor_rel_gap: (prefactor - prefactor_target).abs() / prefactor_target,
        energy_ratio,
        energy_ratio_target,
        energy_ratio_rel_gap: (energy_ratio - energy_ratio_target).abs() / energy_ratio_target,
        r_squared,
        flagged: r_squared < 0.999,
    })
}

/// Talenti rescaling at the critical point N = 3, p = 6.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    /// (λ, μ, sup-distance on [0, 5]) per ladder point, ordered by
    /// decreasing λ.
    pub points: Vec<(f64, f64, f64)>,
    /// Fitted exponent of μ against λ; −1/4 expected.
    pub mu_exponent: f64,
    pub distances_decreasing: bool,
    /// U(0) = 3^{1/4}.
    pub u_zero: f64,
}

pub fn critical_rescale(params: &Params, sols: &[BranchSolution]) -> Result<CriticalReport> {
    if params.n != 3 || (params.p - 6.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(
            "the Talenti rescaling applies at N = 3, p = 6 only".into(),
        ));
    }
    if sols.len() < 2 {
        return Err(Error::InvalidInput("critical check needs at least 2 λ points".into()));
    }
    let u_zero = 3f64.powf(0.25);
    let mut points = Vec::new();
    for sol in sols {
        let u0 = sol.u.values()[0];
        let mu = (u_zero / u0).powi(2);
        let interp = sol.u.interpolant();
        let mut sup = 0.0f64;
        for k in 0..=500 {
            let x = 5.0 * k as f64 / 500.0;
            let rescaled = mu.sqrt() * interp.eval(mu * x);
            let talenti = u_zero / (1.0 + x * x).sqrt();
            sup = sup.max((rescaled - talenti).abs());
        }
        points.push((sol.point.lambda, mu, sup));
    }
    points.sort_by(|x, y| y.0.total_cmp(&x.0));
    let distances_decreasing = points.windows(2).all(|w| w[1].2 < w[0].2);
    let m = points.len() as f64;
    let sx: f64 = points.iter().map(|q| q.0.ln()).sum();
    let sy: f64 = points.iter().map(|q| q.1.ln()).sum();
    let sxx: f64 = points.iter().map(|q| q.0.ln().powi(2)).sum();
    let sxy: f64 = points.iter().map(|q| q.0.ln() * q.1.ln()).sum();
    let mu_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok(CriticalReport { points, mu_exponent, distances_decreasing, u_zero })
}

/// V(u)/a^δ along the branch with the admissible-window exponent δ: the
/// constants behind the Gagliardo-Nirenberg lower bound for V.
pub fn quasi_lower_bound_constants(params: &Params, table: &BranchTable) -> Vec<f64> {
    let dexp = params.delta_exponent();
    table.points.iter().map(|q| q.quasi / q.a.powf(dexp)).collect()
}

/// Manifold-formula energy of a branch point:
/// ((p−2)N−4)/(2(p−2)N)·kinetic + ((p−4)N−4)/((p−2)N)·quasi.
pub fn manifold_energy(params: &Params, point: &BranchPoint) -> f64 {
    let nf = params.n as f64;
    let p = params.p;
    ((p - 2.0) * nf - 4.0) / (2.0 * (p - 2.0) * nf) * point.kinetic
        + ((p - 4.0) * nf - 4.0) / ((p - 2.0) * nf) * point.quasi
}

/// Fiber polynomial of a branch point, for reduced-energy cross-checks.
pub fn fiber_of_point(params: &Params, point: &BranchPoint) -> Result<FiberPolynomial> {
    FiberPolynomial::new(
        0.5 * point.kinetic,
        point.quasi,
        point.lp / params.p,
        params.n,
        params.sigma,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_point_residuals_and_manifold_energy() {
        let params = Params::new(1, 9.0).unwrap();
        let opts = SweepOptions::default();
        let sol = branch_point(&params, 1.0, &opts).unwrap();
        assert!(sol.point.passes_gates(1e-4));
        assert!(sol.point.m > 0.0);
        let formula = manifold_energy(&params, &sol.point);
        let rel = (sol.point.m - formula).abs() / sol.point.m;
        assert!(rel < 1e-6, "manifold formula gap {rel}");
    }

    #[test]
    fn richardson_extrapolates_quadratics_exactly() {
        let y = |x: f64| 3.0 - 2.0 * x + x * x;
        let x = [0.1, 0.2, 0.4];
        let out = richardson3(x, [y(x[0]), y(x[1]), y(x[2])]);
        assert!((out - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let params = Params::new(1, 9.0).unwrap();
        let opts = SweepOptions::default();
        assert!(branch_sweep(&params, &[1.0, 2.0, 4.0], &opts).is_err());
        let narrow = geometric_lambdas(0.5, 2.0, 10);
        assert!(branch_sweep(&params, &narrow, &opts).is_err());
    }
}
