//! The acceptance suite: nine numbered criteria covering functional
//! identities, the fiber map, the dual transform, shooting correctness,
//! branch structure, both mass limits, the min-max oracle, and the
//! free-boundary uniqueness hypotheses. Every tolerance is pinned here;
//! `run_all` is what the CLI `verify` subcommand executes and what the
//! acceptance test target asserts, one criterion per test.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::{
    branch_point, branch_sweep, estimate_a0, geometric_lambdas, large_mass_asymptotics,
    small_mass_limit_check, BranchSolution, SweepOptions,
};
use crate::dual::{phi, phi_inv};
use crate::fiber::FiberPolynomial;
use crate::minimize::{default_init, minimize_reduced, MinimizeOptions};
use crate::oracle;
use crate::params::Params;
use crate::radial::{functionals, graded_grid, RadialProfile};
use crate::shooting::{
    shoot_dual, shoot_free_boundary, shoot_semilinear, shoot_zero_mass, FbProblem, ShootOptions,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {} [{}] {} ({:.2}s / budget {:.0}s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.budget_seconds
        )
    }
}

struct Checks {
    details: Vec<String>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { details: Vec::new(), ok: true }
    }

    fn check(&mut self, pass: bool, line: String) {
        if pass {
            self.details.push(format!("  ok   {line}"));
        } else {
            self.details.push(format!("  FAIL {line}"));
            self.ok = false;
        }
    }
}

fn finish(
    id: usize,
    name: &'static str,
    start: Instant,
    budget: f64,
    mut checks: Checks,
) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    if seconds >= budget {
        checks.check(false, format!("runtime {seconds:.2}s exceeds the {budget:.0}s budget"));
    }
    CriterionResult { id, name, passed: checks.ok, details: checks.details, seconds, budget_seconds: budget }
}

/// Criterion 1: linear functional identities at 1e-12 and the quasilinear
/// term against ¼‖∇(u²)‖² at 1e-8, over 100 random decreasing profiles.
pub fn criterion_1() -> CriterionResult {
    use rayon::prelude::*;
    let start = Instant::now();
    let mut checks = Checks::new();
    let dims = [1usize, 2, 3, 5];
    // per-trial seeds keep the results identical regardless of scheduling
    let per_trial: Vec<(f64, f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(1001 + trial);
            let n = dims[rng.random_range(0..dims.len())];
            let params = random_params(&mut rng, n);
            let terms: Vec<(f64, f64)> = (0..rng.random_range(1..=3))
                .map(|_| (rng.random_range(0.2..2.0), rng.random_range(0.5..2.0)))
                .collect();
            let mix = oracle::GaussianMix { n, terms };
            let h = 4e-5;
            let grid = graded_grid(h, 1.0, h, 8.5).expect("grid");
            let u = RadialProfile::from_fn(n, grid, |r| mix.eval(r)).expect("profile");
            let fv = functionals(&u, &params).expect("functionals");
            let nf = n as f64;
            let p = params.p;
            let e = 0.5 * fv.kinetic + fv.quasi - fv.lp / p;
            let poh = fv.kinetic + (nf + 2.0) * fv.quasi - (p - 2.0) * nf / (2.0 * p) * fv.lp;
            let poh2 = fv.kinetic + (nf + 2.0) * (nf + 1.0) * fv.quasi
                - (p - 2.0) * nf * ((p - 2.0) * nf - 2.0) / (4.0 * p) * fv.lp;
            let mut identity_gap = 0.0f64;
            for (got, want) in [(fv.energy, e), (fv.pohozaev, poh), (fv.pohozaev2, poh2)] {
                identity_gap = identity_gap.max((got - want).abs() / (1.0 + want.abs()));
            }
            let usq = u.map_values(|v| v * v).expect("square");
            let fv2 = functionals(&usq, &params).expect("functionals of u²");
            let quasi_gap = (fv.quasi - 0.25 * fv2.kinetic).abs() / fv.quasi;
            let mass_gap = if trial == 0 {
                (fv.mass - mix.mass_exact(params.sphere_area())).abs() / fv.mass
            } else {
                0.0
            };
            (identity_gap, quasi_gap, mass_gap)
        })
        .collect();
    let worst_identity = per_trial.iter().map(|t| t.0).fold(0.0f64, f64::max);
    let worst_quasi = per_trial.iter().map(|t| t.1).fold(0.0f64, f64::max);
    let mass_gap = per_trial[0].2;
    checks.check(mass_gap < 1e-9, format!("closed-form mass gap {mass_gap:.2e}"));
    checks.check(
        worst_identity <= 1e-12,
        format!("I/P/P₂ linear identities, worst gap {worst_identity:.2e} (tol 1e-12)"),
    );
    checks.check(
        worst_quasi <= 1e-8,
        format!("V(u) = ¼‖∇(u²)‖², worst relative gap {worst_quasi:.2e} (tol 1e-8)"),
    );
    finish(1, "functional identities", start, 10.0, checks)
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Params {
    let nf = n as f64;
    let lo = 4.0 + 4.0 / nf;
    let hi = if n >= 3 { 4.0 * nf / (nf - 2.0) } else { lo + 8.0 };
    let p = rng.random_range(lo + 0.15 * (hi - lo)..lo + 0.9 * (hi - lo));
    Params::new(n, p).expect("random exponent stays inside the admissible window")
}

/// Criterion 2: the fiber polynomial has exactly one positive critical
/// point (a maximum) for 10⁴ random coefficient sets, the sign trichotomy
/// is exact, and the frozen cubic root is reproduced to 1e-8.
pub fn criterion_2() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut unique_ok = true;
    let mut second_ok = true;
    let mut trichotomy_ok = true;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=6usize);
        let sigma = (n + 2) as f64 + 10f64.powf(rng.random_range(-2.0..1.3));
        let a = 10f64.powf(rng.random_range(-3.0..3.0));
        let b = 10f64.powf(rng.random_range(-3.0..3.0));
        let c = 10f64.powf(rng.random_range(-3.0..3.0));
        let poly = FiberPolynomial::new(a, b, c, n, sigma).expect("coefficients");
        let t_u = poly.critical_point().expect("critical point");
        if poly.h_second(t_u) >= 0.0 {
            second_ok = false;
        }
        // exactly one sign change of h' along the fiber
        let mut last_positive = true;
        let mut changes = 0;
        for k in 0..=100 {
            let t = t_u * 10f64.powf(-3.0 + 6.0 * k as f64 / 100.0);
            let positive = poly.h_prime(t) > 0.0;
            if k > 0 && positive != last_positive {
                changes += 1;
            }
            last_positive = positive;
        }
        if changes != 1 {
            unique_ok = false;
        }
        let p_sign = poly.h_prime(1.0);
        let consistent = if p_sign.abs() <= 1e-12 * (a + b + c) {
            (t_u - 1.0).abs() < 1e-6
        } else if p_sign < 0.0 {
            t_u < 1.0
        } else {
            t_u > 1.0
        };
        if !consistent {
            trichotomy_ok = false;
        }
    }
    checks.check(unique_ok, "unique sign change of h' for 10⁴ random (A,B,C,N,σ)".into());
    checks.check(second_ok, "h''(t_u) < 0 everywhere".into());
    checks.check(trichotomy_ok, "sign(P) ↔ t_u vs 1 trichotomy exact".into());
    let oracle_root = oracle::bisect_root(
        &|t: f64| 5.0 * t * t * t - 4.0 * t * t - 2.0,
        0.5,
        2.0,
        1e-14,
    )
    .expect("bisection oracle");
    let poly = FiberPolynomial::new(1.0, 1.0, 1.0, 2, 5.0).expect("frozen example");
    let t_u = poly.critical_point().expect("frozen example root");
    checks.check(
        (t_u - oracle_root).abs() <= 1e-8,
        format!("5t³-4t²-2 root: fiber {t_u:.12} vs oracle {oracle_root:.12}"),
    );
    finish(2, "fiber map", start, 5.0, checks)
}

/// Criterion 3: dual-transform round trip, the φ bounds at 10³ sampled
/// points, and both asymptotic constants at 0.5%.
pub fn criterion_3() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let mut worst_round = 0.0f64;
    for k in 0..1000 {
        let u = 10f64.powf(-6.0 + 12.0 * k as f64 / 999.0);
        let s = phi_inv(u);
        let back = phi(s).expect("phi").phi;
        worst_round = worst_round.max((back - u).abs() / u);
    }
    checks.check(worst_round <= 1e-11, format!("round trip worst {worst_round:.2e} (tol 1e-11)"));
    let quarter = 2f64.powf(0.25);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut bounds_ok = true;
    for k in 0..1000 {
        let s = 10f64.powf(-3.0 + 9.0 * k as f64 / 999.0); // (0, 1e6]
        let v = phi(s).expect("phi");
        let b1 = v.phi_prime > 0.0 && v.phi_prime <= 1.0;
        let b2 = v.phi <= s.min(quarter * s.sqrt()) * (1.0 + 1e-14);
        let b3 = v.phi * v.phi_prime <= inv_sqrt2 * (1.0 + 1e-14);
        let mid = v.phi * v.phi_prime * s;
        let b4 = 0.5 * v.phi * v.phi <= mid * (1.0 + 1e-12) && mid <= v.phi * v.phi * (1.0 + 1e-12);
        if !(b1 && b2 && b3 && b4) {
            bounds_ok = false;
        }
    }
    checks.check(bounds_ok, "0<φ'≤1, φ≤min(s,2^{1/4}√s), φφ'≤2^{-1/2}, ½φ²≤φφ's≤φ² at 10³ points".into());
    let s = 1e6;
    let v = phi(s).expect("phi at 1e6");
    let c1 = v.phi / s.sqrt();
    let c2 = v.phi_prime * s.sqrt();
    checks.check(
        (c1 - quarter).abs() / quarter <= 5e-3,
        format!("φ(s)/√s = {c1:.6} vs 2^(1/4) = {quarter:.6} at s=1e6"),
    );
    let limit = 2f64.powf(-0.75);
    checks.check(
        (c2 - limit).abs() / limit <= 5e-3,
        format!("φ'(s)√s = {c2:.6} vs 2^(-3/4) = {limit:.6} at s=1e6"),
    );
    finish(3, "dual transform", start, 1.0, checks)
}

/// Criterion 4: the dual shooting solution against an independent
/// collocation BVP oracle, the semilinear profile against the sech ansatz,
/// and the critical-exponent integration against the closed-form bubble.
pub fn criterion_4() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let params = Params::new(1, 9.0).expect("params");
    let sopts = ShootOptions::default();

    let shot = shoot_dual(&params, 1.0, &sopts).expect("dual shot");
    match oracle::collocation_dual_alpha_1d(9.0, 1.0, 30.0, 20_000) {
        Ok(alpha_colloc) => {
            let diff = (alpha_colloc - shot.diagnostics.alpha).abs();
            checks.check(
                diff <= 1e-6,
                format!(
                    "dual α: shooting {:.10} vs collocation {alpha_colloc:.10} (diff {diff:.2e})",
                    shot.diagnostics.alpha
                ),
            );
        }
        Err(e) => checks.check(false, format!("collocation oracle failed: {e}")),
    }

    let ansatz = oracle::SechAnsatz { p: 9.0 };
    let mut residual_ok = true;
    for k in 0..=200 {
        if ansatz.residual(8.0 * k as f64 / 200.0).abs() > 1e-10 {
            residual_ok = false;
        }
    }
    checks.check(residual_ok, "sech ansatz ODE residual < 1e-10".into());
    let w = shoot_semilinear(&params, &sopts).expect("semilinear");
    let mut sup = 0.0f64;
    for (r, v) in w.trajectory.profile.nodes().iter().zip(w.trajectory.profile.values()) {
        sup = sup.max((v - ansatz.eval(*r)).abs());
    }
    checks.check(sup <= 1e-6, format!("W vs sech ansatz sup distance {sup:.2e} (tol 1e-6)"));
    let w_fv = functionals(&w.trajectory.profile, &params).expect("W functionals");
    let mass_oracle = 2.0
        * oracle::adaptive_simpson(&|x: f64| ansatz.eval(x).powi(2), 0.0, 40.0, 1e-13);
    checks.check(
        (w_fv.mass - mass_oracle).abs() / mass_oracle <= 1e-6,
        format!("‖W‖₂²: grid {:.9} vs ansatz quadrature {mass_oracle:.9}", w_fv.mass),
    );

    let alpha = 3f64.powf(0.25);
    let opts = crate::ivp::IvpOptions { r_max: 10.0, h0: 1e-7, ..Default::default() };
    let talenti = crate::ivp::integrate_radial_ivp(3, |v: f64| v * v * v * v * v, alpha, &opts)
        .expect("talenti integration");
    let mut sup_t = 0.0f64;
    for (r, v) in talenti.profile.nodes().iter().zip(talenti.profile.values()) {
        sup_t = sup_t.max((v - oracle::talenti(*r)).abs());
    }
    checks.check(sup_t <= 1e-6, format!("Talenti bubble sup distance {sup_t:.2e} (tol 1e-6)"));
    finish(4, "shooting correctness", start, 30.0, checks)
}

/// Criterion 5: branch structure. N=1, p=9 over five decades: residual
/// gates at every point, M strictly decreasing in a, λ → ∞ as a → 0.
/// N=5, p=6: the λ→0 branch endpoint matches the zero-mass threshold.
pub fn criterion_5() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let opts = SweepOptions::default();

    let params = Params::new(1, 9.0).expect("params");
    match branch_sweep(&params, &geometric_lambdas(1e-2, 1e3, 25), &opts) {
        Ok(table) => {
            checks.check(
                table.failures.is_empty() && table.points.len() == 25,
                format!("25/25 points solved with residuals ≤ 1e-4 ({} failures)", table.failures.len()),
            );
            checks.check(
                table.monotone.decreasing,
                format!("M strictly decreasing in a (worst pair slack {:.2e})", table.monotone.max_violation),
            );
            checks.check(
                table.lambda_monotone_in_a && table.lambda_span_decades >= 3.0,
                format!("λ→∞ as a→0 across {:.1} decades", table.lambda_span_decades),
            );
        }
        Err(e) => checks.check(false, format!("N=1 sweep failed: {e}")),
    }

    let params5 = Params::new(5, 6.0).expect("params N=5");
    let zm = shoot_zero_mass(&params5, &opts.shoot).expect("zero mass");
    checks.check(
        !zm.truncation_flagged,
        format!("zero-mass decay exponent {:.3} (target 3)", zm.decay_exponent),
    );
    match branch_sweep(&params5, &geometric_lambdas(1e-4, 1.0, 13), &opts) {
        Ok(table) => match estimate_a0(&params5, &table, &zm) {
            Ok(rep) => {
                checks.check(
                    rep.a0_rel_gap <= 1e-2,
                    format!(
                        "a(λ→0⁺) = {:.4} vs a₀ = {:.4} (gap {:.2e}, tol 1e-2)",
                        rep.a0_extrapolated, rep.a0_zero_mass, rep.a0_rel_gap
                    ),
                );
                checks.check(
                    rep.m_rel_gap <= 1e-2,
                    format!(
                        "M(λ→0⁺) = {:.6} vs I(u₀) = {:.6} (gap {:.2e}, tol 1e-2)",
                        rep.m_extrapolated, rep.m_u0, rep.m_rel_gap
                    ),
                );
            }
            Err(e) => checks.check(false, format!("a₀ extrapolation failed: {e}")),
        },
        Err(e) => checks.check(false, format!("N=5 sweep failed: {e}")),
    }
    finish(5, "branch structure", start, 600.0, checks)
}

/// Criterion 6: small-mass limits at N=1, p=9 for λ ∈ {1e2, 1e3, 1e4}.
pub fn criterion_6() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let params = Params::new(1, 9.0).expect("params");
    let opts = SweepOptions::default();
    let fb = shoot_free_boundary(&params, &opts.shoot).expect("free boundary");
    let closed = FbProblem::new(&params).alpha_first_integral();
    checks.check(
        (fb.alpha - closed).abs() <= 1e-8,
        format!("free-boundary α {:.12} vs closed form {closed:.12}", fb.alpha),
    );
    let mut sols: Vec<BranchSolution> = Vec::new();
    for lambda in [1e2, 1e3, 1e4] {
        match branch_point(&params, lambda, &opts) {
            Ok(sol) => sols.push(sol),
            Err(e) => checks.check(false, format!("λ = {lambda} failed: {e}")),
        }
    }
    if sols.len() == 3 {
        let rep = small_mass_limit_check(&params, &sols, &fb).expect("report");
        let dists: Vec<String> =
            rep.points.iter().map(|q| format!("{:.4e}", q.sup_distance)).collect();
        checks.check(
            rep.distances_decreasing,
            format!("sup distance to ṽ strictly decreasing in λ: [{}]", dists.join(", ")),
        );
        checks.check(
            rep.u_bar_ratio_gap <= 1e-2,
            format!("ū_λ(0)/√ṽ(0) vs 2^(1/4): gap {:.2e} at λ=1e4 (tol 1e-2)", rep.u_bar_ratio_gap),
        );
        checks.check(
            rep.v_ratio_floor >= 1.0 - 1e-2,
            format!("‖v_λ‖∞^((p-2)/2)/λ ≥ 2^((2-p)/4)·0.99 (floor ratio {:.3})", rep.v_ratio_floor),
        );
        checks.check(
            rep.u_ratio_spread.is_finite() && rep.u_ratio_spread < 1.5,
            format!("‖u_λ‖∞^(p-2)/λ stable across the ladder (spread {:.4})", rep.u_ratio_spread),
        );
    }
    finish(6, "small-mass limits", start, 300.0, checks)
}

/// Criterion 7: large-mass asymptotics against the semilinear profile for
/// (N, p) ∈ {(1, 9), (2, 8)}.
pub fn criterion_7() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let opts = SweepOptions::default();
    for (n, p, lo, hi) in [(1usize, 9.0, 1e-10, 1e-7), (2, 8.0, 1e-9, 1e-6)] {
        let params = Params::new(n, p).expect("params");
        let w = shoot_semilinear(&params, &opts.shoot).expect("semilinear");
        match branch_sweep(&params, &geometric_lambdas(lo, hi, 8), &opts) {
            Ok(table) => match large_mass_asymptotics(&params, &table, &w) {
                Ok(rep) => {
                    checks.check(
                        rep.slope_rel_gap <= 2e-2,
                        format!(
                            "N={n} p={p}: slope {:.5} vs {:.5} (gap {:.2e}, tol 2e-2)",
                            rep.slope, rep.slope_target, rep.slope_rel_gap
                        ),
                    );
                    checks.check(
                        rep.prefactor_rel_gap <= 3e-2,
                        format!(
                            "N={n} p={p}: prefactor {:.5} vs ‖W‖₂-form {:.5} (gap {:.2e}, tol 3e-2)",
                            rep.prefactor, rep.prefactor_target, rep.prefactor_rel_gap
                        ),
                    );
                    checks.check(
                        rep.energy_ratio_rel_gap <= 2e-2,
                        format!(
                            "N={n} p={p}: M/(λa) {:.5} vs {:.5} (gap {:.2e}, tol 2e-2)",
                            rep.energy_ratio, rep.energy_ratio_target, rep.energy_ratio_rel_gap
                        ),
                    );
                    checks.check(
                        !rep.flagged,
                        format!("N={n} p={p}: log-log fit R² = {:.7} (≥ 0.999)", rep.r_squared),
                    );
                }
                Err(e) => checks.check(false, format!("N={n} p={p} asymptotics failed: {e}")),
            },
            Err(e) => checks.check(false, format!("N={n} p={p} sweep failed: {e}")),
        }
    }
    finish(7, "large-mass asymptotics", start, 300.0, checks)
}

/// Criterion 8: the min-max oracle reproduces the branch energy within 1%
/// at three masses per (N, p) and never undercuts it beyond 1e-6·|M|.
pub fn criterion_8() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    let sopts = SweepOptions::default();
    let mopts = MinimizeOptions::default();
    for (n, p) in [(1usize, 9.0), (2, 8.0)] {
        let params = Params::new(n, p).expect("params");
        for lambda in [0.3, 1.0, 3.0] {
            match branch_point(&params, lambda, &sopts) {
                Ok(sol) => {
                    let a = sol.point.a;
                    let m_branch = sol.point.m;
                    let init = default_init(&params, a).expect("init");
                    match minimize_reduced(&params, a, &init, &mopts) {
                        Ok(out) => {
                            let gap = (out.m_hat - m_branch).abs() / m_branch;
                            let undercut = (m_branch - out.m_hat) / m_branch.abs();
                            checks.check(
                                gap <= 1e-2 && undercut <= 1e-6,
                                format!(
                                    "N={n} p={p} a={a:.4}: M̂ {:.7} vs M {:.7} (gap {:.2e}, undercut {:.1e})",
                                    out.m_hat, m_branch, gap, undercut.max(0.0)
                                ),
                            );
                        }
                        Err(e) => checks.check(false, format!("minimize failed at a={a}: {e}")),
                    }
                }
                Err(e) => checks.check(false, format!("branch point λ={lambda} failed: {e}")),
            }
        }
    }
    finish(8, "min-max oracle", start, 900.0, checks)
}

/// Criterion 9: the free-boundary uniqueness hypotheses for p ∈ {5, 6, 9}.
pub fn criterion_9() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    for p in [5.0, 6.0, 9.0] {
        let fb = FbProblem { p };
        let b = fb.b();
        checks.check(fb.f(b) == 0.0, format!("p={p}: f(√2/2) = {:?} (exact zero)", fb.f(b)));
        let mut monotone = true;
        let mut prev = f64::INFINITY;
        for k in 1..=1000 {
            let s = b * 10f64.powf(6.0 * k as f64 / 1000.0);
            let g = fb.g(s);
            if g > prev * (1.0 + 1e-13) {
                monotone = false;
            }
            prev = g;
        }
        checks.check(monotone, format!("p={p}: g non-increasing on (√2/2, 10⁶·√2/2]"));
        let limit = 0.5 * (p - 2.0);
        let g_far = fb.g(b * 1e6);
        checks.check(
            (g_far - limit).abs() <= 1e-3,
            format!("p={p}: g(10⁶·√2/2) = {g_far:.6} vs (p-2)/2 = {limit} (tol 1e-3)"),
        );
    }
    finish(9, "uniqueness hypotheses", start, 1.0, checks)
}

/// Run the whole suite in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}
