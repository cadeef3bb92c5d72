//! Adaptive radial initial-value integration for
//!
//! ```text
//! v'' + ((N-1)/r) v' + rhs(v) = 0,   v(0) = α, v'(0) = 0,
//! ```
//!
//! with event detection. The coordinate singularity at r = 0 is removed by
//! a series start at r = h₀:
//!
//! ```text
//! v(h₀) = α - rhs(α) h₀²/(2N) + O(h₀⁴),   v'(h₀) = -rhs(α) h₀/N.
//! ```
//!
//! The stepper is the Dormand-Prince 5(4) embedded pair; events (value
//! zero, slope zero) are located on the cubic Hermite dense output of each
//! accepted step.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// How a shooting trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Outcome {
    /// Fell below the decay threshold while monotone decreasing.
    Decay,
    /// Hit v = 0 with negative slope at the recorded radius.
    Crossing(f64),
    /// Slope reached 0 with v > 0 at the recorded radius.
    Turning(f64),
    /// Ran out of domain, steps, or dynamic range without an event.
    Truncated,
}

/// A classified trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub profile: RadialProfile,
    pub outcome: Outcome,
    /// Initial height v(0).
    pub alpha: f64,
    /// Slope at the last stored node.
    pub derivative_at_end: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct IvpOptions {
    /// Relative step tolerance.
    pub rtol: f64,
    /// Absolute step tolerance (scaled by the caller to the solution size).
    pub atol: f64,
    /// Truncation radius.
    pub r_max: f64,
    /// Series-start offset; also sets the scale of the first step.
    pub h0: f64,
    /// Hard cap on the step size (∞ when unused).
    pub max_step: f64,
    /// Decay threshold: a value below this, while monotone decreasing,
    /// ends the integration. Disabled when 0.
    pub eps_decay: f64,
    /// Consecutive decreasing steps required before the decay threshold
    /// may fire.
    pub decay_window: usize,
    pub max_steps: usize,
}

impl Default for IvpOptions {
    fn default() -> Self {
        IvpOptions {
            rtol: 1e-12,
            atol: 1e-14,
            r_max: 1e4,
            h0: 1e-6,
            max_step: f64::INFINITY,
            eps_decay: 0.0,
            decay_window: 20,
            max_steps: 4_000_000,
        }
    }
}

/// One accepted step endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawStep {
    pub r: f64,
    pub v: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RawEnd {
    Crossing { r: f64, w: f64 },
    Turning { r: f64, v: f64 },
    /// Monotone decreasing and below the threshold passed to the driver.
    Below { r: f64, v: f64, w: f64 },
    RMax { r: f64, v: f64, w: f64 },
    /// Step underflow or dynamic-range blowup.
    Failed { r: f64 },
}

pub(crate) struct Integration {
    pub steps: Vec<RawStep>,
    pub end: RawEnd,
}

/// Fills profile values on a fixed grid from the dense output while the
/// integration advances.
pub(crate) struct GridSampler<'a> {
    grid: &'a [f64],
    pub values: Vec<f64>,
    next: usize,
}

impl<'a> GridSampler<'a> {
    pub fn new(grid: &'a [f64]) -> Self {
        GridSampler { grid, values: vec![0.0; grid.len()], next: 0 }
    }

    /// Nodes at or below the series-start radius get the series values.
    fn fill_head(&mut self, alpha: f64, rhs_alpha: f64, n: usize, h0: f64) {
        while self.next < self.grid.len() && self.grid[self.next] <= h0 * (1.0 + 1e-12) {
            let r = self.grid[self.next];
            self.values[self.next] = alpha - rhs_alpha * r * r / (2.0 * n as f64);
            self.next += 1;
        }
    }

    fn fill_to(&mut self, a: &RawStep, b: &RawStep) {
        while self.next < self.grid.len() && self.grid[self.next] <= b.r {
            let r = self.grid[self.next];
            self.values[self.next] = hermite(a.r, a.v, a.w, b.r, b.v, b.w, r);
            self.next += 1;
        }
    }

    pub fn filled(&self) -> usize {
        self.next
    }
}

fn hermite(r0: f64, v0: f64, w0: f64, r1: f64, v1: f64, w1: f64, r: f64) -> f64 {
    let h = r1 - r0;
    let t = (r - r0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * v0
        + (t3 - 2.0 * t2 + t) * h * w0
        + (-2.0 * t3 + 3.0 * t2) * v1
        + (t3 - t2) * h * w1
}

/// Bisection for the sign change of `f` on [a, b], given f(a) = fa.
fn locate(mut a: f64, mut b: f64, fa: f64, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Core loop. `below_threshold` is the stop-low value (negative disables);
/// `record` keeps accepted steps; `sampler` receives dense output.
pub(crate) fn integrate_raw(
    n: usize,
    rhs: &dyn Fn(f64) -> f64,
    alpha: f64,
    opts: &IvpOptions,
    below_threshold: f64,
    record: bool,
    mut sampler: Option<&mut GridSampler>,
) -> Result<Integration> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("shooting height must be positive, got {alpha}")));
    }
    let nf = n as f64;
    let h0 = opts.h0;
    let ra = rhs(alpha);
    if !ra.is_finite() {
        return Err(Error::InvalidInput("rhs not finite at the initial height".into()));
    }
    let mut r = h0;
    let mut v = alpha - ra * h0 * h0 / (2.0 * nf);
    let mut w = -ra * h0 / nf;
    let overflow = 1e12 * alpha.max(1.0);

    let f = |r: f64, v: f64, w: f64| -> (f64, f64) {
        let drag = if n == 1 { 0.0 } else { -(nf - 1.0) / r * w };
        (w, drag - rhs(v))
    };

    let mut steps = Vec::new();
    if record {
        steps.push(RawStep { r, v, w });
    }
    if let Some(s) = sampler.as_deref_mut() {
        s.fill_head(alpha, ra, n, h0);
    }

    // bending upward from the start: an immediate turning (rhs(α) = 0
    // leaves a flat start and the dynamics decide)
    if ra < 0.0 {
        return Ok(Integration { steps, end: RawEnd::Turning { r, v } });
    }

    let mut k1 = f(r, v, w);
    let mut h = (h0 * 8.0).min(opts.max_step);
    let mut monotone_run = 0usize;
    let mut stall = 0usize;

    for _ in 0..opts.max_steps {
        if r >= opts.r_max * (1.0 - 1e-12) {
            return Ok(Integration { steps, end: RawEnd::RMax { r, v, w } });
        }
        h = h.min(opts.r_max - r).min(opts.max_step);
        let (v2, w2) = (v + h * A21 * k1.0, w + h * A21 * k1.1);
        let k2 = f(r + C2 * h, v2, w2);
        let (v3, w3) = (v + h * (A31 * k1.0 + A32 * k2.0), w + h * (A31 * k1.1 + A32 * k2.1));
        let k3 = f(r + C3 * h, v3, w3);
        let (v4, w4) = (
            v + h * (A41 * k1.0 + A42 * k2.0 + A43 * k3.0),
            w + h * (A41 * k1.1 + A42 * k2.1 + A43 * k3.1),
        );
        let k4 = f(r + C4 * h, v4, w4);
        let (v5, w5) = (
            v + h * (A51 * k1.0 + A52 * k2.0 + A53 * k3.0 + A54 * k4.0),
            w + h * (A51 * k1.1 + A52 * k2.1 + A53 * k3.1 + A54 * k4.1),
        );
        let k5 = f(r + C5 * h, v5, w5);
        let (v6, w6) = (
            v + h * (A61 * k1.0 + A62 * k2.0 + A63 * k3.0 + A64 * k4.0 + A65 * k5.0),
            w + h * (A61 * k1.1 + A62 * k2.1 + A63 * k3.1 + A64 * k4.1 + A65 * k5.1),
        );
        let k6 = f(r + h, v6, w6);
        let vn = v + h * (B1 * k1.0 + B3 * k3.0 + B4 * k4.0 + B5 * k5.0 + B6 * k6.0);
        let wn = w + h * (B1 * k1.1 + B3 * k3.1 + B4 * k4.1 + B5 * k5.1 + B6 * k6.1);
        let k7 = f(r + h, vn, wn);
        let ev = h * (E1 * k1.0 + E3 * k3.0 + E4 * k4.0 + E5 * k5.0 + E6 * k6.0 + E7 * k7.0);
        let ew = h * (E1 * k1.1 + E3 * k3.1 + E4 * k4.1 + E5 * k5.1 + E6 * k6.1 + E7 * k7.1);
        let sv = opts.atol + opts.rtol * v.abs().max(vn.abs());
        let sw = opts.atol + opts.rtol * w.abs().max(wn.abs());
        let err = ((ev / sv).powi(2) + (ew / sw).powi(2)).sqrt() / std::f64::consts::SQRT_2;

        if !vn.is_finite() || !wn.is_finite() || vn.abs() > overflow || wn.abs() > overflow {
            return Ok(Integration { steps, end: RawEnd::Failed { r } });
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            if h < 1e-14 * (1.0 + r) {
                stall += 1;
                if stall > 50 {
                    return Ok(Integration { steps, end: RawEnd::Failed { r } });
                }
            }
            continue;
        }
        stall = 0;
        let r_next = r + h;

        let tol = 1e-12 * (1.0 + r_next);
        let cross = if v > 0.0 && vn <= 0.0 {
            Some(if vn == 0.0 {
                r_next
            } else {
                locate(r, r_next, v, |x| hermite(r, v, w, r_next, vn, wn, x), tol)
            })
        } else {
            None
        };
        let turn = if w < 0.0 && wn >= 0.0 {
            Some(if wn == 0.0 {
                r_next
            } else {
                locate(r, r_next, w, |x| hermite(r, w, k1.1, r_next, wn, k7.1, x), tol)
            })
        } else {
            None
        };
        let turn_first = match (cross, turn) {
            (Some(rc), Some(rt)) => rt < rc,
            (None, Some(_)) => true,
            _ => false,
        };
        if turn_first {
            let rt = turn.unwrap();
            let v_at = hermite(r, v, w, r_next, vn, wn, rt);
            if v_at > 0.0 {
                if let Some(s) = sampler.as_deref_mut() {
                    s.fill_to(&RawStep { r, v, w }, &RawStep { r: rt, v: v_at, w: 0.0 });
                }
                if record {
                    steps.push(RawStep { r: rt, v: v_at, w: 0.0 });
                }
                return Ok(Integration { steps, end: RawEnd::Turning { r: rt, v: v_at } });
            }
            // the value ran out before the slope did: the crossing sits
            // inside [r, rt]
            let rc = locate(r, rt, v, |x| hermite(r, v, w, r_next, vn, wn, x), tol);
            let w_at = hermite(r, w, k1.1, r_next, wn, k7.1, rc);
            if let Some(s) = sampler.as_deref_mut() {
                s.fill_to(&RawStep { r, v, w }, &RawStep { r: rc, v: 0.0, w: w_at });
            }
            if record {
                steps.push(RawStep { r: rc, v: 0.0, w: w_at });
            }
            return Ok(Integration { steps, end: RawEnd::Crossing { r: rc, w: w_at } });
        }
        if let Some(rc) = cross {
            let w_at = hermite(r, w, k1.1, r_next, wn, k7.1, rc);
            if let Some(s) = sampler.as_deref_mut() {
                s.fill_to(&RawStep { r, v, w }, &RawStep { r: rc, v: 0.0, w: w_at });
            }
            if record {
                steps.push(RawStep { r: rc, v: 0.0, w: w_at });
            }
            return Ok(Integration { steps, end: RawEnd::Crossing { r: rc, w: w_at } });
        }

        if let Some(s) = sampler.as_deref_mut() {
            s.fill_to(&RawStep { r, v, w }, &RawStep { r: r_next, v: vn, w: wn });
        }
        r = r_next;
        v = vn;
        w = wn;
        k1 = k7;
        if record {
            steps.push(RawStep { r, v, w });
        }
        if w < 0.0 && v > 0.0 {
            monotone_run += 1;
        } else {
            monotone_run = 0;
        }
        if below_threshold > 0.0 && monotone_run >= opts.decay_window && v < below_threshold {
            return Ok(Integration { steps, end: RawEnd::Below { r, v, w } });
        }
        // rose above the start while moving up: turning side, reachable only
        // from a flat start (a downward trajectory hits the w-event first)
        if w > 0.0 && v > alpha {
            return Ok(Integration { steps, end: RawEnd::Turning { r, v } });
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 6.0);
    }
    Ok(Integration { steps, end: RawEnd::Failed { r } })
}

/// Integrate and classify a radial trajectory, storing the accepted steps
/// as the profile.
pub fn integrate_radial_ivp(
    n: usize,
    rhs: impl Fn(f64) -> f64,
    alpha: f64,
    opts: &IvpOptions,
) -> Result<Trajectory> {
    let below = if opts.eps_decay > 0.0 { opts.eps_decay } else { -1.0 };
    let raw = integrate_raw(n, &rhs, alpha, opts, below, true, None)?;
    let mut nodes = Vec::with_capacity(raw.steps.len() + 1);
    let mut values = Vec::with_capacity(raw.steps.len() + 1);
    nodes.push(0.0);
    values.push(alpha);
    for s in &raw.steps {
        nodes.push(s.r);
        values.push(s.v);
    }
    let last_w = raw.steps.last().map(|s| s.w).unwrap_or(0.0);
    let (outcome, derivative_at_end) = match raw.end {
        RawEnd::Crossing { r, w } => (Outcome::Crossing(r), w),
        RawEnd::Turning { r, .. } => (Outcome::Turning(r), 0.0),
        RawEnd::Below { w, .. } => (Outcome::Decay, w),
        RawEnd::RMax { w, .. } => (Outcome::Truncated, w),
        RawEnd::Failed { .. } => (Outcome::Truncated, last_w),
    };
    // immediate turning can leave fewer than 3 points
    while nodes.len() < 3 {
        let last = *nodes.last().unwrap();
        nodes.push(last * 2.0);
        values.push(*values.last().unwrap());
    }
    let profile = RadialProfile::new(n, nodes, values)?;
    Ok(Trajectory { profile, outcome, alpha, derivative_at_end })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_crossing() {
        // N=1, rhs(v) = v gives v'' = -v, v = cos(r): first zero at π/2
        let opts = IvpOptions { r_max: 10.0, h0: 1e-8, ..Default::default() };
        let t = integrate_radial_ivp(1, |v| v, 1.0, &opts).unwrap();
        match t.outcome {
            Outcome::Crossing(rc) => {
                assert!(
                    (rc - std::f64::consts::FRAC_PI_2).abs() < 1e-8,
                    "crossing at {rc}, expected π/2"
                );
            }
            other => panic!("expected crossing, got {other:?}"),
        }
        assert!(t.derivative_at_end < 0.0);
    }

    #[test]
    fn constant_truncates() {
        let opts = IvpOptions { r_max: 50.0, h0: 1e-8, ..Default::default() };
        let t = integrate_radial_ivp(1, |_| 0.0, 1.0, &opts).unwrap();
        assert_eq!(t.outcome, Outcome::Truncated);
        assert!(t.profile.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!((t.profile.r_max() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn talenti_bubble() {
        // N=3, -Δv = v⁵: U(r) = 3^{1/4}(1+r²)^{-1/2}
        let alpha = 3f64.powf(0.25);
        let opts =
            IvpOptions { r_max: 10.0, h0: 1e-7, rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let t = integrate_radial_ivp(3, |v| v.powi(5), alpha, &opts).unwrap();
        let mut sup = 0.0f64;
        for (r, v) in t.profile.nodes().iter().zip(t.profile.values()) {
            let exact = alpha / (1.0 + r * r).sqrt();
            sup = sup.max((v - exact).abs());
        }
        assert!(sup < 1e-6, "sup error {sup} against the closed form");
        assert_eq!(t.outcome, Outcome::Truncated);
    }

    #[test]
    fn immediate_turning_when_rhs_negative() {
        let opts = IvpOptions { r_max: 10.0, h0: 1e-8, ..Default::default() };
        let t = integrate_radial_ivp(2, |v| v - 10.0, 1.0, &opts).unwrap();
        assert!(matches!(t.outcome, Outcome::Turning(_)));
    }

    #[test]
    fn turning_located_midflight() {
        // rhs changes sign along the trajectory: v dips then turns
        let opts = IvpOptions { r_max: 40.0, h0: 1e-8, ..Default::default() };
        let t = integrate_radial_ivp(1, |v| v - 0.5, 1.0, &opts).unwrap();
        match t.outcome {
            Outcome::Turning(rt) => {
                // v'' = 0.5 - v with v(0)=1: v = 0.5 + 0.5cos(r), minimum at π
                assert!((rt - std::f64::consts::PI).abs() < 1e-7, "turning at {rt}");
            }
            other => panic!("expected turning, got {other:?}"),
        }
    }

    #[test]
    fn event_location_stable_under_tolerance_halving() {
        let opts1 =
            IvpOptions { r_max: 10.0, h0: 1e-9, rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let opts2 = IvpOptions { rtol: 5e-13, atol: 5e-15, ..opts1 };
        let t1 = integrate_radial_ivp(1, |v| v, 1.0, &opts1).unwrap();
        let t2 = integrate_radial_ivp(1, |v| v, 1.0, &opts2).unwrap();
        let (Outcome::Crossing(a), Outcome::Crossing(b)) = (t1.outcome, t2.outcome) else {
            panic!("both must cross");
        };
        assert!((a - b).abs() < 1e-10);
    }
}
