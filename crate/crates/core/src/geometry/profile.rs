//! Warped-product profiles `f(r)` with closed-form derivatives.
//!
//! A profile is a C² piecewise function: a base region `[0, r1]` where the
//! cap is exactly flat (`f = r`) or a constant-curvature spherical cap
//! (`f = sin r`), a quintic Hermite transition of `f'` on `[r1, r0]`, and
//! an affine tail `f = a·r + b` for `r ≥ r0`. The intercept `b` is fixed by
//! continuity; with `f' ` interpolated monotonically an exactly linear tail
//! (`b = 0`) together with a convex profile is not attainable once `a ≠ 1`,
//! so the tail is affine and the collar family becomes
//! `h_ρ = ρ² f(1/ρ)² ĥ = (a + bρ)² ĥ` for `ρ ≤ 1/r0`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapKind {
    /// `f(r) = r` on the base region: exactly flat cap.
    Flat,
    /// `f(r) = sin r` on the base region: constant curvature +1 cap.
    /// Requires `r1 < π/2`.
    SphericalCap,
    /// `f(r) = sinh r` on the base region: constant curvature −1 cap
    /// (Cartan-Hadamard when the tail slope keeps `f'' ≥ 0`).
    HyperbolicCap,
}

#[derive(Clone, Debug)]
pub struct WarpedProfile {
    pub kind: CapKind,
    /// End of the base region.
    pub r1: f64,
    /// Start of the affine tail.
    pub r0: f64,
    /// Tail slope `a`.
    pub slope: f64,
    /// Tail intercept `b`, determined by continuity.
    pub intercept: f64,
    /// Monomial coefficients of `f'` on the transition, in `t = (r-r1)/(r0-r1)`.
    fp_coeff: [f64; 6],
    /// `f(r1)`.
    f_at_r1: f64,
}

// C² quintic Hermite basis on [0,1]; rows H0..H5 give monomial coefficients
// for (value0, d1_0, d2_0, value1, d1_1, d2_1).
const HBASIS: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
];

impl WarpedProfile {
    pub fn new(kind: CapKind, r1: f64, r0: f64, slope: f64) -> Result<Self> {
        if !(r1 > 0.0 && r0 > r1) {
            return Err(Error::InvalidModel("profile needs 0 < r1 < r0".into()));
        }
        if slope <= 0.0 {
            return Err(Error::InvalidModel("tail slope must be positive".into()));
        }
        if kind == CapKind::SphericalCap && r1 >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidModel("spherical cap requires r1 < pi/2".into()));
        }
        let dr = r0 - r1;
        // f' Hermite data at both ends of the transition
        let (v0, d0, dd0, f_at_r1) = match kind {
            CapKind::Flat => (1.0, 0.0, 0.0, r1),
            CapKind::SphericalCap => (r1.cos(), -r1.sin(), -r1.cos(), r1.sin()),
            CapKind::HyperbolicCap => (r1.cosh(), r1.sinh(), r1.cosh(), r1.sinh()),
        };
        let data = [v0, d0 * dr, dd0 * dr * dr, slope, 0.0, 0.0];
        let mut fp_coeff = [0.0; 6];
        for (basis, coef) in HBASIS.iter().zip(data.iter()) {
            for k in 0..6 {
                fp_coeff[k] += coef * basis[k];
            }
        }
        let mut p = WarpedProfile { kind, r1, r0, slope, intercept: 0.0, fp_coeff, f_at_r1 };
        p.intercept = p.f_of_transition(r0) - slope * r0;
        // positivity of f on a sample grid
        for i in 1..400 {
            let r = r0 * i as f64 / 400.0;
            if p.eval(r).0 <= 0.0 {
                return Err(Error::InvalidModel(format!("profile not positive at r={r}")));
            }
        }
        Ok(p)
    }

    /// Euclidean profile: `f(r) = r` everywhere.
    pub fn euclidean() -> Self {
        WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 1.0).unwrap()
    }

    fn f_of_transition(&self, r: f64) -> f64 {
        let dr = self.r0 - self.r1;
        let t = (r - self.r1) / dr;
        // integral of f' from r1 to r: dr * Σ c_k t^{k+1}/(k+1)
        let mut integral = 0.0;
        for k in 0..6 {
            integral += self.fp_coeff[k] * t.powi(k as i32 + 1) / (k as f64 + 1.0);
        }
        self.f_at_r1 + dr * integral
    }

    /// `(f, f', f'')` at `r ≥ 0`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r <= self.r1 {
            match self.kind {
                CapKind::Flat => (r, 1.0, 0.0),
                CapKind::SphericalCap => (r.sin(), r.cos(), -r.sin()),
                CapKind::HyperbolicCap => (r.sinh(), r.cosh(), r.sinh()),
            }
        } else if r >= self.r0 {
            (self.slope * r + self.intercept, self.slope, 0.0)
        } else {
            let dr = self.r0 - self.r1;
            let t = (r - self.r1) / dr;
            let mut fp = 0.0;
            let mut fpp = 0.0;
            for k in (0..6).rev() {
                fp = fp * t + self.fp_coeff[k];
            }
            for k in (1..6).rev() {
                fpp = fpp * t + k as f64 * self.fp_coeff[k];
            }
            (self.f_of_transition(r), fp, fpp / dr)
        }
    }

    /// Check `sign(f'') == sign(slope - 1)` throughout (used by the convex
    /// builder flag).
    pub fn second_derivative_sign_ok(&self, want_convex: bool) -> bool {
        for i in 0..=800 {
            let r = self.r0 * 1.2 * i as f64 / 800.0;
            let (_, _, fpp) = self.eval(r);
            if want_convex && fpp < -1e-12 {
                return false;
            }
        }
        true
    }

    /// Collar family factor `w(ρ) = ρ² f(1/ρ)²` and its first two
    /// ρ-derivatives, valid for `0 < ρ ≤ 1/r1`. At `ρ = 0` the analytic
    /// tail values `(a², 2ab, 2b²)` are returned.
    pub fn w_jet(&self, rho: f64) -> (f64, f64, f64) {
        let (a, b) = (self.slope, self.intercept);
        if rho <= 1.0 / self.r0 {
            // tail: w = (a + bρ)²
            let w = (a + b * rho).powi(2);
            return (w, 2.0 * b * (a + b * rho), 2.0 * b * b);
        }
        let r = 1.0 / rho;
        let (f, fp, fpp) = self.eval(r);
        let w = rho * rho * f * f;
        let wp = 2.0 * rho * f * f - 2.0 * f * fp;
        let wpp = 2.0 * f * f - 4.0 * f * fp / rho + 2.0 * (fp * fp + f * fpp) / (rho * rho);
        (w, wp, wpp)
    }

    /// Radial sectional curvature `K(∂r, V) = −f''/f`.
    pub fn radial_curvature(&self, r: f64) -> f64 {
        let (f, _, fpp) = self.eval(r);
        -fpp / f
    }

    /// Tangential sectional curvature `K(V, W) = (κ − f'²)/f²` where `κ`
    /// is the section curvature (only meaningful over sphere sections).
    pub fn tangential_curvature(&self, r: f64, section_curv: f64) -> f64 {
        let (f, fp, _) = self.eval(r);
        (section_curv - fp * fp) / (f * f)
    }

    /// Cap-chart conformal factors: `φ = (f/r)²`, `χ = (1−φ)/r²`, together
    /// with the even radial quotients `α = φ'/r`, `α₁ = α'/r`, `β = χ'/r`,
    /// `β₁ = β'/r` needed for first and second derivatives of the cap
    /// metric `G = φ I + χ u uᵀ`. Everything is regular at `r = 0`.
    pub fn cap_factors(&self, r: f64) -> CapFactors {
        match self.kind {
            CapKind::Flat if r <= self.r1 => CapFactors::flat(),
            CapKind::SphericalCap if r <= self.r1 => CapFactors::from_sinc(r, false),
            CapKind::HyperbolicCap if r <= self.r1 => CapFactors::from_sinc(r, true),
            _ => {
                let (f, fp, fpp) = self.eval(r);
                let big_f = f / r;
                let g1 = (fp * r - f) / (r * r);
                let g1p = fpp / r - 2.0 * g1 / r;
                let phi = big_f * big_f;
                let phip = 2.0 * big_f * g1;
                let phipp = 2.0 * (g1 * g1 + big_f * g1p);
                let chi = (1.0 - phi) / (r * r);
                let chip = -phip / (r * r) - 2.0 * chi / r;
                let chipp = -phipp / (r * r) + 2.0 * phip / (r * r * r) - 2.0 * chip / r + 2.0 * chi / (r * r);
                let alpha = phip / r;
                let beta = chip / r;
                CapFactors {
                    phi,
                    chi,
                    alpha,
                    alpha1: (phipp - alpha) / (r * r),
                    beta,
                    beta1: (chipp - beta) / (r * r),
                }
            }
        }
    }
}

/// Radial data for the cap metric `G = φ I + χ u uᵀ`; see
/// [`WarpedProfile::cap_factors`].
#[derive(Clone, Copy, Debug)]
pub struct CapFactors {
    pub phi: f64,
    pub chi: f64,
    /// `φ'/r`
    pub alpha: f64,
    /// `(φ'/r)'/r`
    pub alpha1: f64,
    /// `χ'/r`
    pub beta: f64,
    /// `(χ'/r)'/r`
    pub beta1: f64,
}

impl CapFactors {
    fn flat() -> Self {
        CapFactors { phi: 1.0, chi: 0.0, alpha: 0.0, alpha1: 0.0, beta: 0.0, beta1: 0.0 }
    }

    /// Factors for `f = sin r` (or `sinh r` when `hyper` is set), via even
    /// series in `r` near 0 and direct formulas away from 0. The sinh case
    /// is the same series with alternating signs removed.
    fn from_sinc(r: f64, hyper: bool) -> Self {
        // F = f(r)/r, G1 = F'/r, G2 = G1'/r, q = (1-F)/r², Q1 = q'/r, Q2 = Q1'/r
        let (f, g1, g2, q, q1, q2);
        let sg = if hyper { -1.0 } else { 1.0 };
        if r < 0.3 {
            let r2 = sg * r * r; // alternation absorbed into the squared variable
            let r4 = r2 * r2;
            let r6 = r4 * r2;
            let r8 = r4 * r4;
            let r10 = r8 * r2;
            f = 1.0 - r2 / 6.0 + r4 / 120.0 - r6 / 5040.0 + r8 / 362880.0 - r10 / 39916800.0;
            g1 = sg * (-1.0 / 3.0 + r2 / 30.0 - r4 / 840.0 + r6 / 45360.0 - r8 / 3991680.0);
            g2 = 1.0 / 15.0 - r2 / 210.0 + r4 / 7560.0 - r6 / 498960.0;
            q = sg * (1.0 / 6.0 - r2 / 120.0 + r4 / 5040.0 - r6 / 362880.0 + r8 / 39916800.0);
            q1 = -1.0 / 60.0 + r2 / 1260.0 - r4 / 60480.0 + r6 / 4989600.0;
            q2 = sg * (1.0 / 630.0 - r2 / 15120.0 + r4 / 831600.0);
        } else {
            let (s, c) = if hyper { (r.sinh(), r.cosh()) } else { r.sin_cos() };
            f = s / r;
            let fp = (c - f) / r;
            let fpp = (sg * -s - 2.0 * fp) / r;
            g1 = fp / r;
            g2 = (fpp - g1) / (r * r);
            q = (1.0 - f) / (r * r);
            let qp = -fp / (r * r) - 2.0 * q / r;
            let qpp = -fpp / (r * r) + 2.0 * fp / (r * r * r) - 2.0 * qp / r + 2.0 * q / (r * r);
            q1 = qp / r;
            q2 = (qpp - q1) / (r * r);
        }
        CapFactors {
            phi: f * f,
            chi: q * (1.0 + f),
            alpha: 2.0 * f * g1, // φ'/r = 2 F F'/r = 2 F G1
            alpha1: 2.0 * (g1 * g1 + f * g2),
            beta: q1 * (1.0 + f) + q * g1,
            beta1: q2 * (1.0 + f) + 2.0 * q1 * g1 + q * g2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{central_diff4};
    use approx::assert_relative_eq;

    #[test]
    fn profile_is_c2_at_junctions() {
        let p = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        for &r in &[1.0, 4.0] {
            let below = p.eval(r - 1e-9);
            let above = p.eval(r + 1e-9);
            assert_relative_eq!(below.0, above.0, epsilon = 1e-8);
            assert_relative_eq!(below.1, above.1, epsilon = 1e-7);
            assert_relative_eq!(below.2, above.2, epsilon = 1e-5);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = WarpedProfile::new(CapKind::SphericalCap, 1.2, 5.0, 0.7).unwrap();
        for &r in &[0.4, 1.5, 2.9, 4.4, 6.0] {
            let (_, fp, fpp) = p.eval(r);
            let fd1 = central_diff4(|x| p.eval(x).0, r, 1e-4);
            let fd2 = central_diff4(|x| p.eval(x).1, r, 1e-4);
            assert_relative_eq!(fp, fd1, epsilon = 1e-9, max_relative = 1e-9);
            assert_relative_eq!(fpp, fd2, epsilon = 1e-8, max_relative = 1e-7);
        }
    }

    #[test]
    fn convexity_sign() {
        let convex = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        assert!(convex.second_derivative_sign_ok(true));
        let concave = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 0.5).unwrap();
        assert!(!concave.second_derivative_sign_ok(true));
    }

    #[test]
    fn hyperbolic_cap_has_curvature_minus_one() {
        // f = sinh r in the base region: K(∂r, V) = −1 there, covering the
        // interval [2, 3] when r1 > 3
        let p = WarpedProfile::new(CapKind::HyperbolicCap, 3.2, 6.0, 14.0).unwrap();
        for &r in &[0.5, 2.0, 2.5, 3.0] {
            assert_relative_eq!(p.radial_curvature(r), -1.0, epsilon = 1e-12);
        }
        // cap factors against finite differences across the series switch
        for &r in &[0.05, 0.29, 0.31, 1.5] {
            let cf = p.cap_factors(r);
            let fd_phip = central_diff4(|x| p.cap_factors(x).phi, r, 1e-4);
            assert_relative_eq!(cf.alpha * r, fd_phip, epsilon = 1e-8, max_relative = 1e-6);
            let fd_chip = central_diff4(|x| p.cap_factors(x).chi, r, 1e-4);
            assert_relative_eq!(cf.beta * r, fd_chip, epsilon = 1e-8, max_relative = 1e-6);
        }
    }

    #[test]
    fn euclidean_profile_is_identity() {
        let p = WarpedProfile::euclidean();
        for &r in &[0.2, 1.7, 3.0, 10.0] {
            let (f, fp, fpp) = p.eval(r);
            assert_relative_eq!(f, r, epsilon = 1e-13);
            assert_relative_eq!(fp, 1.0, epsilon = 1e-13);
            assert!(fpp.abs() < 1e-12);
        }
        assert!(p.intercept.abs() < 1e-14);
    }

    #[test]
    fn w_jet_matches_finite_differences() {
        let p = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        for &rho in &[0.02, 0.1, 0.21, 0.4, 0.8] {
            let (_, wp, wpp) = p.w_jet(rho);
            let fd1 = central_diff4(|x| p.w_jet(x).0, rho, 1e-5);
            let fd2 = central_diff4(|x| p.w_jet(x).1, rho, 1e-5);
            assert_relative_eq!(wp, fd1, epsilon = 1e-7, max_relative = 1e-7);
            assert_relative_eq!(wpp, fd2, epsilon = 1e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn cap_factors_continuous_and_match_fd() {
        let p = WarpedProfile::new(CapKind::SphericalCap, 1.2, 5.0, 0.7).unwrap();
        // series branch against exact values just below the switch radius
        let r = 0.3 - 1e-12;
        let lo = p.cap_factors(r);
        let f_exact = r.sin() / r;
        assert_relative_eq!(lo.phi, f_exact * f_exact, epsilon = 1e-12);
        assert_relative_eq!(lo.chi, (1.0 - f_exact * f_exact) / (r * r), epsilon = 1e-12);
        for &r in &[0.05, 0.29, 0.7, 1.5, 3.0] {
            let cf = p.cap_factors(r);
            // φ' = α r, χ' = β r against finite differences
            let fd_phip = central_diff4(|x| p.cap_factors(x).phi, r, 1e-4);
            let fd_chip = central_diff4(|x| p.cap_factors(x).chi, r, 1e-4);
            assert_relative_eq!(cf.alpha * r, fd_phip, epsilon = 1e-9, max_relative = 1e-7);
            assert_relative_eq!(cf.beta * r, fd_chip, epsilon = 1e-9, max_relative = 1e-7);
            // α' = α₁ r
            let fd_alphap = central_diff4(|x| p.cap_factors(x).alpha, r, 1e-4);
            assert_relative_eq!(cf.alpha1 * r, fd_alphap, epsilon = 1e-8, max_relative = 1e-6);
        }
    }
}
