//! Change of unknown u = φ(v) between the quasilinear equation and its
//! semilinear dual.
//!
//! φ is the solution of φ′(s) = 1/√(1+2φ²(s)), φ(0) = 0, extended oddly.
//! Its inverse has the closed form
//!
//! ```text
//! φ⁻¹(u) = ½ u √(1+2u²) + (√2/4) ln(√2 u + √(1+2u²))
//! ```
//!
//! and φ itself is computed by Newton inversion of that closed form with
//! the analytic derivative √(1+2u²), which keeps the pair consistent to
//! machine precision instead of accumulating ODE integration error.

use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// φ and φ′ at one point of the dual variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub s: f64,
    pub phi: f64,
    /// φ′(s) = 1/√(1+2φ²(s)); lies in (0, 1].
    pub phi_prime: f64,
}

/// Closed-form φ⁻¹: v = ∫₀^u √(1+2t²) dt, odd in u.
pub fn phi_inv(u: f64) -> f64 {
    if u < 0.0 {
        return -phi_inv(-u);
    }
    if u > 1e8 {
        // beyond this the √2/8 correction is below one ulp and the direct
        // log argument risks overflow for extreme inputs
        return std::f64::consts::FRAC_1_SQRT_2 * u * u
            + std::f64::consts::SQRT_2 / 4.0 * (2.0 * std::f64::consts::SQRT_2 * u).ln();
    }
    let root = (1.0 + 2.0 * u * u).sqrt();
    // ln(√2 u + √(1+2u²)) written through ln_1p so the result keeps full
    // relative accuracy as u → 0
    let log_term = (std::f64::consts::SQRT_2 * u + 2.0 * u * u / (root + 1.0)).ln_1p();
    0.5 * u * root + std::f64::consts::SQRT_2 / 4.0 * log_term
}

/// Infallible (φ(s), φ′(s)) pair: NaN propagates, non-convergence (which
/// the convexity of φ⁻¹ rules out for finite input) yields NaN. Odd in s.
pub(crate) fn phi_raw(s: f64) -> (f64, f64) {
    if s == 0.0 {
        return (0.0, 1.0);
    }
    if s < 0.0 {
        let (p, dp) = phi_raw(-s);
        return (-p, dp);
    }
    if !s.is_finite() {
        return (f64::NAN, f64::NAN);
    }
    // φ(s) ≤ min(s, 2^{1/4}√s) and φ⁻¹ is convex, so Newton from the bound
    // decreases monotonically onto the root.
    let mut u = s.min(2f64.powf(0.25) * s.sqrt());
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..60 {
        let f = phi_inv(u) - s;
        residual = f.abs();
        let df = (1.0 + 2.0 * u * u).sqrt();
        let step = f / df;
        u -= step;
        if step.abs() <= 4.0 * f64::EPSILON * u.abs() {
            converged = true;
            break;
        }
    }
    if !converged && residual > 1e-13 * s {
        return (f64::NAN, f64::NAN);
    }
    (u, 1.0 / (1.0 + 2.0 * u * u).sqrt())
}

/// φ(s) by Newton inversion of [`phi_inv`], with φ′ from the defining
/// relation.
pub fn phi(s: f64) -> Result<PhiValue> {
    if !s.is_finite() {
        return Err(Error::InvalidInput(format!("phi argument must be finite, got {s}")));
    }
    let (p, dp) = phi_raw(s);
    if !p.is_finite() {
        return Err(Error::Numeric(format!("phi inversion did not converge at s = {s}")));
    }
    Ok(PhiValue { s, phi: p, phi_prime: dp })
}

/// φ(s)·φ′(s) = u/√(1+2u²) with u = φ(s); bounded by 2^{-1/2}.
pub fn phi_times_prime(s: f64) -> Result<f64> {
    let v = phi(s)?;
    Ok(v.phi * v.phi_prime)
}

/// Map a primal profile u ↦ v = φ⁻¹(u) pointwise.
pub fn u_to_v(u: &RadialProfile) -> Result<RadialProfile> {
    if !u.is_nonnegative() {
        return Err(Error::InvalidInput("dual transform needs a nonnegative profile".into()));
    }
    u.map_values(phi_inv)
}

/// Map a dual profile v ↦ u = φ(v) pointwise.
pub fn v_to_u(v: &RadialProfile) -> Result<RadialProfile> {
    if !v.is_nonnegative() {
        return Err(Error::InvalidInput("dual transform needs a nonnegative profile".into()));
    }
    let mut out = Vec::with_capacity(v.len());
    for &s in v.values() {
        out.push(phi(s)?.phi);
    }
    RadialProfile::new(v.dim(), v.nodes().to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{graded_grid, RadialProfile};

    #[test]
    fn phi_inv_frozen_values() {
        assert_eq!(phi_inv(0.0), 0.0);
        // oracle: closed form cross-checked against quadrature of √(1+2t²),
        // both give 1.27127389852281552
        let expected = 1.271_273_898_522_815_5_f64;
        assert!((phi_inv(1.0) - expected).abs() < 1e-14);
        // odd extension
        assert_eq!(phi_inv(-1.0), -phi_inv(1.0));
    }

    #[test]
    fn phi_inv_asymptotic_constant() {
        // φ⁻¹(u)/u² → 2^{-1/2}
        let u = 1e3;
        let limit = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi_inv(u) / (u * u) - limit).abs() / limit < 1e-2);
        // reference values straddling the large-argument branch switch
        let at_1e8 = 7_071_067_811_865_482.3_f64;
        let at_2e8 = 28_284_271_247_461_908.0_f64;
        assert!((phi_inv(1e8) - at_1e8).abs() / at_1e8 < 1e-15);
        assert!((phi_inv(2e8) - at_2e8).abs() / at_2e8 < 1e-15);
        // small-argument relative accuracy (ln_1p path)
        let at_1em6 = 1.000_000_000_000_333_3e-6_f64;
        assert!((phi_inv(1e-6) - at_1em6).abs() / at_1em6 < 1e-15);
    }

    #[test]
    fn phi_at_origin_and_round_trip() {
        let v = phi(0.0).unwrap();
        assert_eq!(v.phi, 0.0);
        assert_eq!(v.phi_prime, 1.0);
        // φ(φ⁻¹(u)) = u to 1e-12 relative across many scales
        for &u in &[1e-8, 1e-3, 0.5, 1.0, 7.3, 120.0, 1e5] {
            let s = phi_inv(u);
            let back = phi(s).unwrap().phi;
            assert!((back - u).abs() / u < 1e-12, "round trip at u = {u}");
        }
        // inverse of the frozen example
        assert!((phi(1.271_273_898_522_815_5).unwrap().phi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_bounds_sampled() {
        let quarter = 2f64.powf(0.25);
        let bound = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..1000 {
            let s = 1e-3 * (1e9f64).powf(k as f64 / 999.0); // covers (0, 1e6]
            let v = phi(s).unwrap();
            assert!(v.phi_prime > 0.0 && v.phi_prime <= 1.0);
            assert!(v.phi <= s.min(quarter * s.sqrt()) * (1.0 + 1e-14));
            assert!(v.phi * v.phi_prime <= bound * (1.0 + 1e-14));
            // ½φ² ≤ φφ′s ≤ φ²
            let lhs = 0.5 * v.phi * v.phi;
            let mid = v.phi * v.phi_prime * s;
            let rhs = v.phi * v.phi;
            assert!(lhs <= mid * (1.0 + 1e-12) && mid <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn phi_monotone_concave() {
        let mut prev_phi = 0.0;
        let mut prev_prime = 1.0 + 1e-15;
        for k in 1..=2000 {
            let s = 10.0 * k as f64 / 2000.0;
            let v = phi(s).unwrap();
            assert!(v.phi > prev_phi, "phi must increase");
            assert!(v.phi_prime < prev_prime, "phi' must decrease");
            prev_phi = v.phi;
            prev_prime = v.phi_prime;
        }
    }

    #[test]
    fn phi_prime_large_argument_limit() {
        // φ′(s)·√s → 2^{-3/4} = 0.594603557501361
        let s = 1e6;
        let v = phi(s).unwrap();
        let limit = 2f64.powf(-0.75);
        let observed = v.phi_prime * s.sqrt();
        assert!((observed - limit).abs() / limit < 5e-3, "observed {observed}");
    }

    #[test]
    fn profile_round_trip() {
        let grid = graded_grid(1e-4, 1.01, 0.02, 8.0).unwrap();
        let u = RadialProfile::from_fn(1, grid, |r| 1.3 * (-0.5 * r * r).exp()).unwrap();
        let v = u_to_v(&u).unwrap();
        assert!(v.is_nonincreasing());
        let back = v_to_u(&v).unwrap();
        let sup = u
            .values()
            .iter()
            .zip(back.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(sup < 1e-11, "round-trip sup error {sup}");
        // zero maps to zero
        let z = u.map_values(|_| 0.0).unwrap();
        assert_eq!(u_to_v(&z).unwrap().values(), z.values());
        // negative values rejected
        let neg = u.map_values(|x| x - 1.0).unwrap();
        assert!(u_to_v(&neg).is_err());
    }
}
