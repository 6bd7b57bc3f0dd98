//! Lossless beam-splitter coefficient families.
//!
//! A splitter seen from its four incidence geometries carries eight Fresnel
//! coefficients. Energy conservation in a Michelson arrangement and
//! time-reversal with phase-conjugate mirrors pin all but one free phase.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{normalize_phase, phase_of, ComplexAmplitude};

/// Tolerance for construction preconditions (unit norm, quadrature phase).
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for residuals of identities that hold algebraically.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Selects the `+pi` or `-pi` solution of the phase-sum relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

/// Named non-negative residuals, each judged against one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub tolerance: f64,
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    fn new(tolerance: f64) -> Self {
        Self { tolerance, checks: Vec::new() }
    }

    fn push(&mut self, name: &str, residual: f64) {
        let residual = residual.abs();
        self.checks.push(ConstraintCheck {
            name: name.to_owned(),
            residual,
            pass: residual <= self.tolerance,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "  {:<20} residual {:<12.3e} {}",
                c.name,
                c.residual,
                if c.pass { "ok" } else { "FAIL" }
            )?;
        }
        write!(f, "  (tolerance {:e})", self.tolerance)
    }
}

/// Residual of the quadrature condition, |cos(phi_rho - phi_tau)|.
/// Zero when either amplitude vanishes, since its phase is then free.
fn quadrature_residual(rho: ComplexAmplitude, tau: ComplexAmplitude) -> f64 {
    let denom = rho.norm() * tau.norm();
    if denom == 0.0 {
        0.0
    } else {
        ((rho * tau.conj()).re / denom).abs()
    }
}

/// A lossless splitter with the same (rho, tau) at both input ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricSplitter {
    rho: ComplexAmplitude,
    tau: ComplexAmplitude,
}

impl SymmetricSplitter {
    /// Validated constructor at [`CONSTRUCTION_TOL`].
    pub fn new(rho: ComplexAmplitude, tau: ComplexAmplitude) -> Result<Self> {
        Self::with_tolerance(rho, tau, CONSTRUCTION_TOL)
    }

    pub fn with_tolerance(rho: ComplexAmplitude, tau: ComplexAmplitude, tol: f64) -> Result<Self> {
        let s = Self { rho, tau };
        let report = validate_symmetric(&s, tol);
        if report.passed() {
            Ok(s)
        } else {
            Err(Error::InvalidSplitter(report))
        }
    }

    /// No validation. Use for probing constraint violations.
    pub fn new_unchecked(rho: ComplexAmplitude, tau: ComplexAmplitude) -> Self {
        Self { rho, tau }
    }

    /// rho = 1/sqrt 2, tau = i/sqrt 2.
    pub fn balanced() -> Self {
        Self {
            rho: Complex64::new(FRAC_1_SQRT_2, 0.0),
            tau: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    /// |rho| with phase `rho_phase`; tau gets the complementary magnitude and
    /// phase `rho_phase + branch * pi/2`.
    pub fn from_polar(rho_mag: f64, rho_phase: f64, branch: Branch) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_mag) {
            return Err(Error::InvalidArgument(format!("|rho| = {rho_mag} outside [0, 1]")));
        }
        let tau_mag = (1.0 - rho_mag * rho_mag).sqrt();
        Self::new(
            Complex64::from_polar(rho_mag, rho_phase),
            Complex64::from_polar(tau_mag, rho_phase + branch.sign() * FRAC_PI_2),
        )
    }

    /// CLI-style construction: magnitudes plus phases in degrees. Omitted tau
    /// magnitude defaults to sqrt(1 - |rho|^2), omitted tau phase to rho + 90.
    pub fn from_degrees(
        rho_mag: f64,
        rho_deg: f64,
        tau_mag: Option<f64>,
        tau_deg: Option<f64>,
        tol: f64,
    ) -> Result<Self> {
        if !rho_mag.is_finite() || rho_mag < 0.0 {
            return Err(Error::InvalidArgument(format!("|rho| = {rho_mag} must be >= 0")));
        }
        let tau_mag = match tau_mag {
            Some(t) if t.is_finite() && t >= 0.0 => t,
            Some(t) => return Err(Error::InvalidArgument(format!("|tau| = {t} must be >= 0"))),
            None => (1.0 - rho_mag * rho_mag).max(0.0).sqrt(),
        };
        let tau_deg = tau_deg.unwrap_or(rho_deg + 90.0);
        Self::with_tolerance(
            Complex64::from_polar(rho_mag, rho_deg.to_radians()),
            Complex64::from_polar(tau_mag, tau_deg.to_radians()),
            tol,
        )
    }

    pub fn rho(&self) -> ComplexAmplitude {
        self.rho
    }

    pub fn tau(&self) -> ComplexAmplitude {
        self.tau
    }

    /// The splitter with rho and tau exchanged (equivalently, exit ports relabeled).
    pub fn swapped(&self) -> Self {
        Self { rho: self.tau, tau: self.rho }
    }

    /// (rho*, tau*): undoes this splitter's two-mode transform.
    pub fn conjugate(&self) -> Self {
        Self { rho: self.rho.conj(), tau: self.tau.conj() }
    }

    pub fn to_asymmetric(&self) -> AsymmetricSplitter {
        AsymmetricSplitter::uniform(self.rho, self.tau)
    }
}

/// Fresnel coefficients for all four incidence geometries.
///
/// `_p`, `_pp`, `_ppp` stand for one, two and three primes: return from the
/// first mirror, return from the second mirror (backside), and backside
/// incidence respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetricSplitter {
    pub rho: ComplexAmplitude,
    pub tau: ComplexAmplitude,
    pub rho_p: ComplexAmplitude,
    pub tau_p: ComplexAmplitude,
    pub rho_pp: ComplexAmplitude,
    pub tau_pp: ComplexAmplitude,
    pub rho_ppp: ComplexAmplitude,
    pub tau_ppp: ComplexAmplitude,
}

impl AsymmetricSplitter {
    /// Every rho-like coefficient equal to `rho`, every tau-like to `tau`.
    pub fn uniform(rho: ComplexAmplitude, tau: ComplexAmplitude) -> Self {
        Self {
            rho,
            tau,
            rho_p: rho,
            tau_p: tau,
            rho_pp: rho,
            tau_pp: tau,
            rho_ppp: rho,
            tau_ppp: tau,
        }
    }

    /// The eight coefficients in declaration order, labelled.
    pub fn coefficients(&self) -> [(&'static str, ComplexAmplitude); 8] {
        [
            ("rho", self.rho),
            ("tau", self.tau),
            ("rho_p", self.rho_p),
            ("tau_p", self.tau_p),
            ("rho_pp", self.rho_pp),
            ("tau_pp", self.tau_pp),
            ("rho_ppp", self.rho_ppp),
            ("tau_ppp", self.tau_ppp),
        ]
    }
}

pub fn validate_symmetric(s: &SymmetricSplitter, tol: f64) -> ConstraintReport {
    let mut report = ConstraintReport::new(tol);
    report.push("unitarity", s.rho.norm_sqr() + s.tau.norm_sqr() - 1.0);
    report.push("quadrature_phase", quadrature_residual(s.rho, s.tau));
    report
}

/// Every invariant of a complete lossless family, plus the time-reversal
/// residuals.
pub fn validate_asymmetric(s: &AsymmetricSplitter, tol: f64) -> ConstraintReport {
    let mut report = ConstraintReport::new(tol);
    report.push("norm", s.rho.norm_sqr() + s.tau.norm_sqr() - 1.0);
    report.push("norm_p", s.rho_p.norm_sqr() + s.tau_p.norm_sqr() - 1.0);
    report.push("norm_pp", s.rho_pp.norm_sqr() + s.tau_pp.norm_sqr() - 1.0);
    report.push("reflection_match", s.rho_p.norm() - s.rho_pp.norm());
    report.push("transmission_match", s.tau_p.norm() - s.tau_pp.norm());
    report.push("phase_sum", phase_sum_residual(s));
    let (c1, c2) = time_reversal_residuals(s);
    report.push("time_reversal_1", c1.norm());
    report.push("time_reversal_2", c2.norm());
    report.push("backside_rho", (s.rho_ppp - s.rho_pp).norm());
    report.push("backside_tau", (s.tau_ppp - s.tau_p).norm());
    report
}

/// Angular distance of (phi'_rho + phi''_rho) - (phi'_tau + phi''_tau) from pi.
/// Zero when any of the four coefficients vanishes.
pub fn phase_sum_residual(s: &AsymmetricSplitter) -> f64 {
    let parts = [s.rho_p, s.rho_pp, s.tau_p, s.tau_pp];
    if parts.iter().any(|z| z.norm() == 0.0) {
        return 0.0;
    }
    let diff =
        phase_of(s.rho_p) + phase_of(s.rho_pp) - phase_of(s.tau_p) - phase_of(s.tau_pp);
    normalize_phase(diff - PI).abs()
}

/// Exit amplitudes (psi1, psi2) of a Michelson interferometer built around
/// the splitter, for round-trip arm phases `phi1` and `phi2`.
pub fn michelson_amplitudes(
    s: &AsymmetricSplitter,
    phi1: f64,
    phi2: f64,
) -> (ComplexAmplitude, ComplexAmplitude) {
    let e1 = Complex64::from_polar(1.0, phi1);
    let e2 = Complex64::from_polar(1.0, phi2);
    let psi1 = s.rho * s.rho_p * e1 + s.tau * s.tau_pp * e2;
    let psi2 = s.rho * s.tau_p * e1 + s.tau * s.rho_pp * e2;
    (psi1, psi2)
}

/// |psi1|^2 + |psi2|^2 - 1 at arm-phase difference `delta_phi`.
pub fn lossless_residual(s: &AsymmetricSplitter, delta_phi: f64) -> f64 {
    let (psi1, psi2) = michelson_amplitudes(s, delta_phi, 0.0);
    psi1.norm_sqr() + psi2.norm_sqr() - 1.0
}

/// Builds the full family implied by losslessness and time reversal from
/// (rho, tau), the free transmission phase `phi_tau_prime`, and a branch.
pub fn complete_family(
    rho: ComplexAmplitude,
    tau: ComplexAmplitude,
    phi_tau_prime: f64,
    branch: Branch,
) -> Result<AsymmetricSplitter> {
    let norm = rho.norm_sqr() + tau.norm_sqr();
    if (norm - 1.0).abs() > CONSTRUCTION_TOL {
        return Err(Error::NotUnitNorm { norm, tol: CONSTRUCTION_TOL });
    }
    let tau_p = Complex64::from_polar(tau.norm(), phi_tau_prime);
    let phi_rho_pp = phase_of(tau) + phi_tau_prime - phase_of(rho) + branch.sign() * PI;
    let rho_pp = Complex64::from_polar(rho.norm(), normalize_phase(phi_rho_pp));
    Ok(AsymmetricSplitter {
        rho,
        tau,
        rho_p: rho,
        tau_p,
        rho_pp,
        tau_pp: tau,
        rho_ppp: rho_pp,
        tau_ppp: tau_p,
    })
}

/// (rho* rho' + tau* tau'' - 1, rho* tau' + tau* rho'').
pub fn time_reversal_residuals(s: &AsymmetricSplitter) -> (ComplexAmplitude, ComplexAmplitude) {
    let c1 = s.rho.conj() * s.rho_p + s.tau.conj() * s.tau_pp - 1.0;
    let c2 = s.rho.conj() * s.tau_p + s.tau.conj() * s.rho_pp;
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn balanced_family() -> AsymmetricSplitter {
        SymmetricSplitter::balanced().to_asymmetric()
    }

    /// Expanded cosine form of the Michelson energy balance.
    fn cosine_form(s: &AsymmetricSplitter, dphi: f64) -> f64 {
        let p = phase_of;
        s.rho.norm_sqr() * (s.rho_p.norm_sqr() + s.tau_p.norm_sqr())
            + s.tau.norm_sqr() * (s.rho_pp.norm_sqr() + s.tau_pp.norm_sqr())
            - 1.0
            + 2.0
                * s.rho.norm()
                * s.tau.norm()
                * ((s.rho_p * s.tau_pp).norm()
                    * (p(s.rho) + p(s.rho_p) - p(s.tau) - p(s.tau_pp) + dphi).cos()
                    + (s.rho_pp * s.tau_p).norm()
                        * (p(s.rho) + p(s.tau_p) - p(s.tau) - p(s.rho_pp) + dphi).cos())
    }

    #[test]
    fn validate_symmetric_examples() {
        let r = validate_symmetric(&SymmetricSplitter::balanced(), 1e-10);
        assert!(r.passed());
        assert!(r.max_residual() < 1e-15);

        let mirror = SymmetricSplitter::new_unchecked(c(1.0, 0.0), c(0.0, 0.0));
        let r = validate_symmetric(&mirror, 1e-10);
        assert!(r.passed());
        assert_eq!(r.residual("unitarity"), Some(0.0));

        let bad = SymmetricSplitter::new_unchecked(c(0.8, 0.0), c(0.6, 0.0));
        let r = validate_symmetric(&bad, 1e-10);
        assert!(!r.passed());
        assert!(r.residual("unitarity").unwrap() < 1e-15);
        assert!((r.residual("quadrature_phase").unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn michelson_balanced_fringes() {
        let s = balanced_family();
        let (p1, p2) = michelson_amplitudes(&s, 0.0, 0.0);
        assert!(p1.norm() < 1e-15);
        assert!((p2.norm() - 1.0).abs() < 1e-15);

        let (p1, p2) = michelson_amplitudes(&s, PI, 0.0);
        assert!((p1.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(p2.norm_sqr() < 1e-15);

        let (p1, p2) = michelson_amplitudes(&s, 1.3 + FRAC_PI_2, 1.3);
        assert!((p1.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((p2.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lossless_residual_matches_cosine_form() {
        let fam = complete_family(
            Complex64::from_polar(0.6, 0.4),
            Complex64::from_polar(0.8, 2.1),
            -0.9,
            Branch::Plus,
        )
        .unwrap();
        let mut broken = fam;
        broken.rho_pp *= Complex64::from_polar(1.0, 0.1);
        for dphi in [0.0, 0.7, 2.5, -1.9] {
            assert!(lossless_residual(&fam, dphi).abs() < 1e-12);
            assert!((lossless_residual(&broken, dphi) - cosine_form(&broken, dphi)).abs() < 1e-12);
        }
    }

    #[test]
    fn lossless_residual_examples() {
        assert!(lossless_residual(&balanced_family(), 0.7).abs() < 1e-12);

        let mut broken = balanced_family();
        broken.rho_pp *= Complex64::from_polar(1.0, 0.1);
        let a = lossless_residual(&broken, 0.0);
        let b = lossless_residual(&broken, FRAC_PI_2);
        assert!((a - b).abs() > 1e-3, "{a} vs {b}");

        let window = AsymmetricSplitter::uniform(c(0.0, 0.0), c(0.0, 1.0));
        for dphi in [0.0, 1.0, 3.0] {
            assert!(lossless_residual(&window, dphi).abs() < 1e-15);
        }
    }

    #[test]
    fn complete_family_balanced_is_fully_symmetric() {
        let s = SymmetricSplitter::balanced();
        let fam = complete_family(s.rho(), s.tau(), FRAC_PI_2, Branch::Minus).unwrap();
        for (name, z) in fam.coefficients() {
            let expect = if name.starts_with("rho") { s.rho() } else { s.tau() };
            assert!((z - expect).norm() < 1e-15, "{name}");
        }
    }

    #[test]
    fn complete_family_mirror_limit() {
        let fam = complete_family(c(1.0, 0.0), c(0.0, 0.0), 0.37, Branch::Plus).unwrap();
        for (name, z) in fam.coefficients() {
            if name.starts_with("tau") {
                assert_eq!(z.norm(), 0.0, "{name}");
            } else {
                assert!((z.norm() - 1.0).abs() < 1e-15, "{name}");
            }
        }
        assert!(validate_asymmetric(&fam, IDENTITY_TOL).passed());
    }

    #[test]
    fn complete_family_rejects_non_unit_norm() {
        let err = complete_family(c(0.9, 0.0), c(0.0, 0.6), 0.0, Branch::Plus).unwrap_err();
        assert!(matches!(err, Error::NotUnitNorm { .. }));
    }

    #[test]
    fn time_reversal_examples() {
        let (c1, c2) = time_reversal_residuals(&balanced_family());
        assert!(c1.norm() < 1e-15 && c2.norm() < 1e-15);

        let fam = complete_family(
            Complex64::from_polar(0.3, -1.0),
            Complex64::from_polar((1.0f64 - 0.09).sqrt(), 0.2),
            1.1,
            Branch::Minus,
        )
        .unwrap();
        let (c1, c2) = time_reversal_residuals(&fam);
        assert!(c1.norm() < 1e-12 && c2.norm() < 1e-12);

        let mut flipped = fam;
        flipped.tau_p = -fam.tau_p;
        let (_, c2) = time_reversal_residuals(&flipped);
        assert!((c2 - (-2.0 * fam.rho.conj() * fam.tau_p)).norm() < 1e-12);
    }

    #[test]
    fn from_degrees_defaults() {
        let s = SymmetricSplitter::from_degrees(0.6, 30.0, None, None, 1e-10).unwrap();
        assert!((s.tau().norm() - 0.8).abs() < 1e-15);
        assert!((phase_of(s.tau()) - 120f64.to_radians()).abs() < 1e-15);

        let err = SymmetricSplitter::from_degrees(0.8, 0.0, Some(0.6), Some(0.0), 1e-10);
        assert!(matches!(err, Err(Error::InvalidSplitter(_))));
    }
}
