//! Error exponents and error-probability bounds.
//!
//! The quantum s-overlap `Q_s = tr(ρ₀^s ρ₁^{1−s})` of two zero-mean two-mode
//! Gaussian states is evaluated from their Williamson decompositions in
//! vacuum-1 units (`V = 4·cov`):
//!
//! ```text
//! Q_s = 4 · Π_k G_s(α_k) G_{1−s}(β_k) / √det[V₀(s) + V₁(1−s)]
//! G_p(x) = 2^p / [(x+1)^p − (x−1)^p]
//! Λ_p(x) = [(x+1)^p + (x−1)^p] / [(x+1)^p − (x−1)^p]
//! V_i(p) = S_i · diag(Λ_p(ν)) · S_iᵀ
//! ```
//!
//! with α, β the symplectic spectra of `V₀`, `V₁`. Everything is evaluated in
//! the log domain: per-mode-pair exponents go down to ~1e-10 and M up to 1e7.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{
    alice_conditional_cov, eve_conditional_cov, homodyne_cov, opa_spec, Bit, HomodyneCov,
    OpaSpec, ProtocolParams,
};
use crate::symplectic::{williamson, CovMat4, Mat4, VACUUM_NU};

const LN_2: f64 = std::f64::consts::LN_2;
const NEGATIVE_EXPONENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapResult {
    pub s: f64,
    /// tr(ρ₀^s ρ₁^{1−s})
    pub q_s: f64,
    pub ln_q: f64,
}

impl OverlapResult {
    /// −ln Q_s, clamped at 0 for rounding-level negatives.
    pub fn exponent(&self) -> Result<f64> {
        clamp_exponent(-self.ln_q)
    }
}

fn clamp_exponent(e: f64) -> Result<f64> {
    if e >= 0.0 {
        Ok(e)
    } else if e > -NEGATIVE_EXPONENT_SLACK {
        Ok(0.0)
    } else {
        Err(Error::NumericalInstability(format!(
            "negative error exponent {e:.3e}"
        )))
    }
}

/// ln[(x+1)^p − (x−1)^p] for x ≥ 1, 0 < p < 1, free of cancellation.
fn ln_power_gap(x: f64, p: f64) -> f64 {
    p * (x + 1.0).ln() + (-(p * ln_ratio(x)).exp_m1()).ln()
}

/// ln[(x−1)/(x+1)]
fn ln_ratio(x: f64) -> f64 {
    if x < 3.0 {
        ((x - 1.0) / (x + 1.0)).ln()
    } else {
        (-2.0 / (x + 1.0)).ln_1p()
    }
}

fn ln_g(x: f64, p: f64) -> f64 {
    p * LN_2 - ln_power_gap(x, p)
}

fn lambda(x: f64, p: f64) -> f64 {
    let l = p * ln_ratio(x);
    (1.0 + l.exp()) / -l.exp_m1()
}

fn vacuum1_spectrum(nu: [f64; 2]) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (o, n) in out.iter_mut().zip(nu) {
        if n < VACUUM_NU - 1e-9 {
            return Err(Error::NonPhysicalCovariance(format!(
                "symplectic eigenvalue {n:.6e} below 1/4"
            )));
        }
        *o = (4.0 * n).max(1.0);
    }
    Ok(out)
}

fn ln_det_spd(m: &Mat4) -> Result<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let chol = sym.cholesky().ok_or_else(|| {
        Error::NumericalInstability("overlap determinant is not positive".into())
    })?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// `tr(ρ₀^s ρ₁^{1−s})` for zero-mean two-mode Gaussian states.
pub fn gaussian_s_overlap(cov0: &CovMat4, cov1: &CovMat4, s: f64) -> Result<OverlapResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("overlap parameter s must lie in (0,1), got {s}")));
    }
    if cov0 == cov1 {
        // tr ρ = 1
        return Ok(OverlapResult { s, q_s: 1.0, ln_q: 0.0 });
    }
    let w0 = williamson(cov0)?;
    let w1 = williamson(cov1)?;
    let alpha = vacuum1_spectrum(w0.nu)?;
    let beta = vacuum1_spectrum(w1.nu)?;

    // S is unchanged by the ×4 rescaling; only the spectra scale.
    let mut w0v = w0;
    w0v.nu = alpha;
    let mut w1v = w1;
    w1v.nu = beta;
    let v0 = w0v.rebuild_with(|x| lambda(x, s));
    let v1 = w1v.rebuild_with(|x| lambda(x, 1.0 - s));

    let ln_prefactor: f64 = 2.0 * LN_2
        + alpha.iter().map(|&a| ln_g(a, s)).sum::<f64>()
        + beta.iter().map(|&b| ln_g(b, 1.0 - s)).sum::<f64>();
    let ln_q = ln_prefactor - 0.5 * ln_det_spd(&(v0 + v1))?;
    if !ln_q.is_finite() {
        return Err(Error::NumericalInstability("non-finite overlap".into()));
    }
    Ok(OverlapResult {
        s,
        q_s: ln_q.exp(),
        ln_q,
    })
}

/// Chernoff exponent at the symmetric point, `−ln Q_{1/2}`. For BPSK-mirrored
/// pairs s = 1/2 is the optimum.
pub fn qcb_exponent(cov0: &CovMat4, cov1: &CovMat4) -> Result<f64> {
    gaussian_s_overlap(cov0, cov1, 0.5)?.exponent()
}

/// `E(s) = −ln Q_s` over a grid.
pub fn chernoff_profile(cov0: &CovMat4, cov1: &CovMat4, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&s| Ok((s, -gaussian_s_overlap(cov0, cov1, s)?.ln_q)))
        .collect()
}

/// The grid {0.05, 0.10, …, 0.95}.
pub fn default_s_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffCheck {
    pub s_star: f64,
    pub max_exponent: f64,
    pub exponent_half: f64,
}

/// Diagnostic: evaluates E(s) on the default grid and fails unless the
/// maximum sits at s = 1/2.
pub fn check_symmetric_optimum(cov0: &CovMat4, cov1: &CovMat4) -> Result<ChernoffCheck> {
    let profile = chernoff_profile(cov0, cov1, &default_s_grid())?;
    let (s_star, max_exponent) = profile
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let exponent_half = -gaussian_s_overlap(cov0, cov1, 0.5)?.ln_q;
    let slack = 1e-9 * max_exponent.abs() + 1e-15;
    if exponent_half + slack < max_exponent {
        return Err(Error::DomainError(format!(
            "Chernoff optimum at s = {s_star:.2}, not 1/2 (E = {max_exponent:.6e} vs {exponent_half:.6e})"
        )));
    }
    Ok(ChernoffCheck {
        s_star,
        max_exponent,
        exponent_half,
    })
}

/// `exp(−M·E)/2`
pub fn chernoff_upper(exponent: f64, m: u64) -> f64 {
    0.5 * (-(m as f64) * exponent).exp()
}

/// `(1 − √(1 − e^{−2M·E}))/2`, evaluated as `x / (2(1 + √(1−x)))`.
pub fn error_lower(exponent: f64, m: u64) -> f64 {
    let x = (-2.0 * m as f64 * exponent).exp();
    x / (2.0 * (1.0 + (-(-2.0 * m as f64 * exponent).exp_m1()).sqrt()))
}

/// Exponent, bounds and mode-pair count for one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSet {
    pub exponent: f64,
    pub upper: f64,
    pub lower: f64,
    pub m: u64,
}

impl BoundSet {
    pub fn new(exponent: f64, m: u64) -> Self {
        BoundSet {
            exponent,
            upper: chernoff_upper(exponent, m),
            lower: error_lower(exponent, m),
            m,
        }
    }
}

fn ln_det2(a: f64, b: f64, c: f64) -> f64 {
    (a * b).ln() + (-(c * c) / (a * b)).ln_1p()
}

/// Classical Chernoff exponent `−ln ∫ p₀^s p₁^{1−s}` of two zero-mean
/// bivariate Gaussians.
pub fn classical_chernoff_2d(h0: &HomodyneCov, h1: &HomodyneCov, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("s must lie in (0,1), got {s}")));
    }
    let (i0, i1) = match (h0.0.try_inverse(), h1.0.try_inverse()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NumericalInstability("singular homodyne covariance".into())),
    };
    let mix = i0 * s + i1 * (1.0 - s);
    let (d0, d1, dm) = (h0.0.determinant(), h1.0.determinant(), mix.determinant());
    if !(d0 > 0.0 && d1 > 0.0 && dm > 0.0) {
        return Err(Error::NumericalInstability("singular homodyne covariance".into()));
    }
    clamp_exponent(0.5 * (s * d0.ln() + (1.0 - s) * d1.ln() + dm.ln()))
}

/// Homodyne receiver exponent: the Bhattacharyya (s = 1/2) exponent of the
/// two bivariate Gaussians, `½ ln det Σ̄ − ¼ ln det Σ₀ − ¼ ln det Σ₁`.
/// For the mirrored pair this is `½ ln(AS/(AS − C_a²))`.
pub fn homodyne_exponent(h0: &HomodyneCov, h1: &HomodyneCov) -> Result<f64> {
    let (a0, b0, c0) = (h0.var_return(), h0.var_idler(), h0.cross());
    let (a1, b1, c1) = (h1.var_return(), h1.var_idler(), h1.cross());
    if !(a0 * b0 > c0 * c0 && a1 * b1 > c1 * c1 && a0 > 0.0 && a1 > 0.0) {
        return Err(Error::NumericalInstability("singular homodyne covariance".into()));
    }
    let (am, bm, cm) = (0.5 * (a0 + a1), 0.5 * (b0 + b1), 0.5 * (c0 + c1));
    clamp_exponent(0.5 * ln_det2(am, bm, cm) - 0.25 * ln_det2(a0, b0, c0) - 0.25 * ln_det2(a1, b1, c1))
}

/// OPA Bhattacharyya exponent for Bose-Einstein counts with means N₀, N₁:
/// `ln[√((N₀+1)(N₁+1)) − √(N₀N₁)]`.
pub fn opa_exponent(spec: &OpaSpec) -> Result<f64> {
    let (n0, n1) = (spec.n0, spec.n1);
    if !(n0 >= 0.0 && n1 >= 0.0 && n0.is_finite() && n1.is_finite()) {
        return Err(Error::invalid(format!("photon means must be >= 0, got {n0}, {n1}")));
    }
    let u = ((n0 + 1.0) * (n1 + 1.0)).sqrt();
    let v = (n0 * n1).sqrt();
    // u − v − 1 = (√N₀ − √N₁)² / (u + v + 1)
    let gap = (n0.sqrt() - n1.sqrt()).powi(2) / (u + v + 1.0);
    Ok(gap.ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticExponents {
    pub alice: f64,
    pub eve: f64,
    pub homodyne: f64,
    pub opa: f64,
    /// N_S ≤ 0.01 and κN_B ≥ 10.
    pub valid: bool,
}

pub const ASYMPTOTIC_MAX_NS: f64 = 0.01;
pub const ASYMPTOTIC_MIN_KAPPA_NB: f64 = 10.0;

/// Low-brightness, high-noise closed forms: 4κN_S/N_B, 4κ(1−κ)N_S²/N_B,
/// κN_S/N_B and 2κN_S/N_B.
pub fn asymptotic_exponents(p: &ProtocolParams) -> Result<AsymptoticExponents> {
    p.validate()?;
    if p.nb <= 0.0 {
        return Err(Error::invalid("asymptotic exponents require N_B > 0"));
    }
    let base = p.kappa * p.ns / p.nb;
    Ok(AsymptoticExponents {
        alice: 4.0 * base,
        eve: 4.0 * base * (1.0 - p.kappa) * p.ns,
        homodyne: base,
        opa: 2.0 * base,
        valid: p.ns <= ASYMPTOTIC_MAX_NS && p.kappa * p.nb >= ASYMPTOTIC_MIN_KAPPA_NB,
    })
}

/// Exact per-mode-pair exponents of all four receivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub alice: f64,
    pub eve: f64,
    pub homodyne: f64,
    /// `None` when N_B = 0 (OPA gain undefined).
    pub opa: Option<f64>,
}

pub fn alice_exponent(p: &ProtocolParams) -> Result<f64> {
    qcb_exponent(
        &alice_conditional_cov(p, Bit::Zero)?,
        &alice_conditional_cov(p, Bit::One)?,
    )
}

pub fn eve_exponent(p: &ProtocolParams) -> Result<f64> {
    qcb_exponent(
        &eve_conditional_cov(p, Bit::Zero)?,
        &eve_conditional_cov(p, Bit::One)?,
    )
}

pub fn exact_exponents(p: &ProtocolParams) -> Result<Exponents> {
    let homodyne = homodyne_exponent(&homodyne_cov(p, Bit::Zero)?, &homodyne_cov(p, Bit::One)?)?;
    let opa = if p.nb > 0.0 {
        Some(opa_exponent(&opa_spec(p)?)?)
    } else {
        None
    };
    Ok(Exponents {
        alice: alice_exponent(p)?,
        eve: eve_exponent(p)?,
        homodyne,
        opa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReceiverBounds {
    pub alice_opt: BoundSet,
    pub eve_opt: BoundSet,
    pub homodyne: BoundSet,
    pub opa: Option<BoundSet>,
}

impl Exponents {
    pub fn bounds(&self, m: u64) -> ReceiverBounds {
        ReceiverBounds {
            alice_opt: BoundSet::new(self.alice, m),
            eve_opt: BoundSet::new(self.eve, m),
            homodyne: BoundSet::new(self.homodyne, m),
            opa: self.opa.map(|e| BoundSet::new(e, m)),
        }
    }
}

/// Serializable helper for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Receiver {
    AliceOptimum,
    EveOptimum,
    Homodyne,
    Opa,
}
