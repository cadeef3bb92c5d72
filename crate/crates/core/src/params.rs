use serde::Serialize;

use crate::error::{Error, Result};

/// Problem parameters: dimension `N` and nonlinearity exponent `p` for
///
/// ```text
/// -Δu - Δ(u²)u + λu = u^{p-1}   in ℝ^N
/// ```
///
/// The standing assumption is the mass-supercritical window
/// `4 + 4/N < p < 2·2*` with `2* = 2N/(N-2)` (`+∞` for N = 1, 2). The
/// equivalent fiber condition `σ = (p-2)N/2 > N+2` is what makes the
/// Pohozaev projection single-valued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    /// Space dimension N ≥ 1.
    pub n: usize,
    /// Nonlinearity exponent.
    pub p: f64,
    /// Fiber exponent σ = (p-2)N/2.
    pub sigma: f64,
    /// Critical Sobolev exponent 2N/(N-2), +∞ for N ≤ 2.
    pub two_star: f64,
    /// Mass-critical exponent 4 + 4/N.
    pub mass_critical: f64,
}

impl Params {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("dimension N must be >= 1".into()));
        }
        if !p.is_finite() || p <= 2.0 {
            return Err(Error::InvalidParams(format!("exponent p = {p} must be finite and > 2")));
        }
        let nf = n as f64;
        let two_star = if n >= 3 { 2.0 * nf / (nf - 2.0) } else { f64::INFINITY };
        let mass_critical = 4.0 + 4.0 / nf;
        if p <= mass_critical {
            return Err(Error::InvalidParams(format!(
                "p = {p} must exceed the mass-critical exponent 4 + 4/N = {mass_critical} for N = {n}"
            )));
        }
        if p >= 2.0 * two_star {
            return Err(Error::InvalidParams(format!(
                "p = {p} must stay below 2·2* = {} for N = {n}",
                2.0 * two_star
            )));
        }
        let sigma = 0.5 * (p - 2.0) * nf;
        debug_assert!(sigma > nf + 2.0);
        Ok(Params { n, p, sigma, two_star, mass_critical })
    }

    /// Surface measure of the unit (N-1)-sphere, ω_{N-1} = 2π^{N/2}/Γ(N/2).
    ///
    /// ω_0 = 2, ω_1 = 2π, ω_2 = 4π, ...
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.n)
    }

    /// Exponent of the mass in the lower bound for V along the constraint,
    /// ((N-2)p - 4N)/((p-4)N - 4). Negative in the admissible window.
    pub fn delta_exponent(&self) -> f64 {
        let nf = self.n as f64;
        ((nf - 2.0) * self.p - 4.0 * nf) / ((self.p - 4.0) * nf - 4.0)
    }

    /// Gagliardo-Nirenberg mass exponent (4N - p(N-2))/(2(N+2)).
    pub fn theta1(&self) -> f64 {
        let nf = self.n as f64;
        (4.0 * nf - self.p * (nf - 2.0)) / (2.0 * (nf + 2.0))
    }

    /// Gagliardo-Nirenberg quasilinear-term exponent N(p-2)/(2(N+2)).
    /// Exceeds 1 throughout the admissible window.
    pub fn theta2(&self) -> f64 {
        let nf = self.n as f64;
        nf * (self.p - 2.0) / (2.0 * (nf + 2.0))
    }
}

/// ω_{N-1} = 2π^{N/2}/Γ(N/2) without a general gamma function: N is a small
/// integer, so Γ(N/2) reduces to factorials and √π.
pub fn sphere_area(n: usize) -> f64 {
    let nf = n as f64;
    if n % 2 == 0 {
        // Γ(m) = (m-1)! with m = N/2
        let m = n / 2;
        let mut gamma = 1.0f64;
        for k in 2..m {
            gamma *= k as f64;
        }
        2.0 * std::f64::consts::PI.powi(m as i32) / gamma
    } else {
        // N = 2m+1: ω = 2 π^m 4^m m! / (2m)!
        let m = (n - 1) / 2;
        let mut ratio = 1.0f64; // 4^m m!/(2m)!
        for k in 1..=m {
            ratio *= 4.0 * k as f64 / ((2 * k - 1) as f64 * (2 * k) as f64);
        }
        let _ = nf;
        2.0 * std::f64::consts::PI.powi(m as i32) * ratio
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_window() {
        assert!(Params::new(1, 9.0).is_ok());
        assert!(Params::new(2, 8.0).is_ok());
        assert!(Params::new(3, 6.0).is_ok());
        assert!(Params::new(5, 6.0).is_ok());
        // at or below mass-critical
        assert!(Params::new(1, 8.0).is_err());
        assert!(Params::new(1, 7.0).is_err());
        assert!(Params::new(3, 4.0).is_err());
        // at or above 2·2*
        assert!(Params::new(3, 12.0).is_err());
        assert!(Params::new(5, 20.0 / 3.0).is_err());
        assert!(Params::new(0, 9.0).is_err());
    }

    #[test]
    fn derived_exponents() {
        let p = Params::new(1, 9.0).unwrap();
        assert_eq!(p.sigma, 3.5);
        assert_eq!(p.two_star, f64::INFINITY);
        assert_eq!(p.mass_critical, 8.0);
        let p = Params::new(3, 7.0).unwrap();
        assert_eq!(p.sigma, 7.5);
        assert_eq!(p.two_star, 6.0);
        // theta2 > 1 whenever p is supercritical
        for (n, pp) in [(1usize, 8.2), (2, 6.5), (3, 5.5), (4, 5.2), (5, 5.0)] {
            let params = Params::new(n, pp).unwrap();
            assert!(params.theta2() > 1.0, "theta2 must exceed 1 at N={n}, p={pp}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        // ω_4 = 8π²/3
        let pi = std::f64::consts::PI;
        assert!((sphere_area(5) - 8.0 * pi * pi / 3.0).abs() < 1e-13);
        // ω_3 = 2π²
        assert!((sphere_area(4) - 2.0 * pi * pi).abs() < 1e-13);
    }
}
