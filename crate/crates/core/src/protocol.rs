//! Protocol model: parameters, scalar symbols and conditional covariances.
//!
//! Everything is second-moment level. The operator relations of the link are
//! realized as affine maps on covariance matrices (see [`channel`]); the
//! closed forms returned by [`alice_conditional_cov`] and
//! [`eve_conditional_cov`] are checked against those maps in the tests.

use nalgebra::{Matrix2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{CovMat4, Mat4};

/// Bob's information bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// (−1)^k
    pub fn sign(self) -> f64 {
        match self {
            Bit::Zero => 1.0,
            Bit::One => -1.0,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub fn from_bool(one: bool) -> Bit {
        if one {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Channel transmissivity κ ∈ (0, 1].
    pub kappa: f64,
    /// Mean signal (and idler) photons per mode.
    pub ns: f64,
    /// Bob's added classical noise photons per mode.
    pub nb: f64,
    /// Number of signal-idler mode pairs per bit.
    pub m: u64,
}

impl ProtocolParams {
    pub fn new(kappa: f64, ns: f64, nb: f64, m: u64) -> Result<Self> {
        let p = ProtocolParams { kappa, ns, nb, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::invalid(format!(
                "kappa must lie in (0, 1], got {}",
                self.kappa
            )));
        }
        if !(self.ns >= 0.0 && self.ns.is_finite()) {
            return Err(Error::invalid(format!(
                "N_S must be finite and >= 0, got {}",
                self.ns
            )));
        }
        if !(self.nb >= 0.0 && self.nb.is_finite()) {
            return Err(Error::invalid(format!(
                "N_B must be finite and >= 0, got {}",
                self.nb
            )));
        }
        if self.m == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        Ok(())
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = m;
        self
    }

    /// Symbol values without re-validating the parameters.
    pub fn symbols(&self) -> DerivedSymbols {
        let (k, ns, nb) = (self.kappa, self.ns, self.nb);
        let s = 2.0 * ns + 1.0;
        let c_q = 2.0 * (ns * (ns + 1.0)).sqrt();
        DerivedSymbols {
            s,
            c_q,
            a: 2.0 * k * k * ns + 2.0 * k * nb + 1.0,
            c_a: k * c_q,
            d: 2.0 * (1.0 - k) * ns + 1.0,
            e: 2.0 * (1.0 - k) * k * ns + 2.0 * (1.0 - k) * nb + 1.0,
            c_e: 2.0 * (1.0 - k) * k.sqrt() * ns,
        }
    }
}

/// Scalar symbols of the conditional covariance matrices (vacuum-1 units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedSymbols {
    /// Source variance 2N_S + 1.
    pub s: f64,
    /// Source phase-sensitive cross correlation 2√(N_S(N_S+1)).
    pub c_q: f64,
    /// Alice's return variance 2κ²N_S + 2κN_B + 1.
    pub a: f64,
    /// Alice's return-idler cross correlation κC_q.
    pub c_a: f64,
    /// Eve's forward-tap variance 2(1−κ)N_S + 1.
    pub d: f64,
    /// Eve's return-tap variance 2(1−κ)κN_S + 2(1−κ)N_B + 1.
    pub e: f64,
    /// Eve's tap-tap cross correlation 2(1−κ)√κ N_S.
    pub c_e: f64,
}

pub fn derive_symbols(p: &ProtocolParams) -> Result<DerivedSymbols> {
    p.validate()?;
    Ok(p.symbols())
}

fn correlated_cov(v1: f64, v2: f64, c_q: f64, c_p: f64) -> Mat4 {
    Mat4::new(
        v1, 0.0, c_q, 0.0, //
        0.0, v1, 0.0, c_p, //
        c_q, 0.0, v2, 0.0, //
        0.0, c_p, 0.0, v2,
    ) * 0.25
}

/// Two-mode squeezed vacuum with `ns` photons per mode (signal, idler).
pub fn tmsv_cov(ns: f64) -> Result<CovMat4> {
    if !(ns >= 0.0 && ns.is_finite()) {
        return Err(Error::invalid(format!("N_S must be >= 0, got {ns}")));
    }
    let s = 2.0 * ns + 1.0;
    let c_q = 2.0 * (ns * (ns + 1.0)).sqrt();
    Ok(CovMat4::from_trusted(correlated_cov(s, s, c_q, -c_q)))
}

/// Alice's conditional covariance of (return, idler) given bit `k`.
pub fn alice_conditional_cov(p: &ProtocolParams, k: Bit) -> Result<CovMat4> {
    let sym = derive_symbols(p)?;
    let c = k.sign() * sym.c_a;
    Ok(CovMat4::from_trusted(correlated_cov(sym.a, sym.s, c, -c)))
}

/// Eve's conditional covariance of (forward tap, return tap) given bit `k`.
/// The cross correlation is phase-insensitive: same sign on q-q and p-p.
pub fn eve_conditional_cov(p: &ProtocolParams, k: Bit) -> Result<CovMat4> {
    let sym = derive_symbols(p)?;
    let c = k.sign() * sym.c_e;
    Ok(CovMat4::from_trusted(correlated_cov(sym.d, sym.e, c, c)))
}

/// Covariance of (Re a_R, Re a_I) seen by the homodyne receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneCov(pub Matrix2<f64>);

impl HomodyneCov {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * m.amax() || m.cholesky().is_none() {
            return Err(Error::NonPhysicalCovariance(
                "homodyne covariance must be symmetric positive definite".into(),
            ));
        }
        Ok(HomodyneCov(m))
    }

    pub fn var_return(&self) -> f64 {
        self.0[(0, 0)]
    }

    pub fn var_idler(&self) -> f64 {
        self.0[(1, 1)]
    }

    pub fn cross(&self) -> f64 {
        self.0[(0, 1)]
    }

    pub fn correlation(&self) -> f64 {
        self.cross() / (self.var_return() * self.var_idler()).sqrt()
    }
}

pub fn homodyne_cov(p: &ProtocolParams, k: Bit) -> Result<HomodyneCov> {
    let cov = alice_conditional_cov(p, k)?;
    let m = cov.matrix();
    Ok(HomodyneCov(Matrix2::new(
        m[(0, 0)],
        m[(0, 2)],
        m[(2, 0)],
        m[(2, 2)],
    )))
}

/// OPA receiver: gain and per-mode output photon means under each bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaSpec {
    pub gain: f64,
    pub n0: f64,
    pub n1: f64,
}

impl OpaSpec {
    pub fn mean(&self, k: Bit) -> f64 {
        match k {
            Bit::Zero => self.n0,
            Bit::One => self.n1,
        }
    }
}

/// OPA output `a' = √G a_I + √(G−1) a_R†` with `G = 1 + N_S/√(κN_B)`.
///
/// `N_k = G N_S + (G−1)(κ²N_S + κN_B + 1) + (−1)^k √(G(G−1)) C_a`; the output
/// mode is thermal, so photon counts are Bose-Einstein distributed.
pub fn opa_spec(p: &ProtocolParams) -> Result<OpaSpec> {
    p.validate()?;
    if p.nb <= 0.0 {
        return Err(Error::invalid("OPA receiver requires N_B > 0"));
    }
    let sym = p.symbols();
    let gain = 1.0 + p.ns / (p.kappa * p.nb).sqrt();
    let g1 = p.ns / (p.kappa * p.nb).sqrt();
    let return_photons = p.kappa * p.kappa * p.ns + p.kappa * p.nb;
    let base = gain * p.ns + g1 * (return_photons + 1.0);
    let cross = (gain * g1).sqrt() * sym.c_a;
    Ok(OpaSpec {
        gain,
        n0: base + cross,
        n1: (base - cross).max(0.0),
    })
}

/// ⟨a'†a'⟩ of the OPA output evaluated as a quadratic form over a
/// (return, idler) covariance.
pub fn opa_mean_from_cov(cov: &CovMat4, gain: f64) -> f64 {
    let (g, h) = (gain.sqrt(), (gain - 1.0).max(0.0).sqrt());
    let wq = Vector4::new(h, 0.0, g, 0.0);
    let wp = Vector4::new(0.0, -h, 0.0, g);
    let m = cov.matrix();
    (wq.transpose() * m * wq)[0] + (wp.transpose() * m * wp)[0] - 0.5
}

/// Covariance-level Gaussian channels.
pub mod channel {
    use super::*;
    use crate::symplectic::beam_splitter;

    /// Pure loss `a → √κ a + √(1−κ) e`, `e` in vacuum.
    pub fn pure_loss(cov: &CovMat4, mode: usize, kappa: f64) -> CovMat4 {
        let mut k = Mat4::identity();
        let i = 2 * mode;
        k[(i, i)] = kappa.sqrt();
        k[(i + 1, i + 1)] = kappa.sqrt();
        let mut out = k * cov.matrix() * k.transpose();
        out[(i, i)] += 0.25 * (1.0 - kappa);
        out[(i + 1, i + 1)] += 0.25 * (1.0 - kappa);
        CovMat4::from_trusted(out)
    }

    /// Classical isotropic Gaussian noise carrying `nb` mean photons: adds
    /// `nb/2` to each quadrature variance of `mode`.
    pub fn additive_noise(cov: &CovMat4, mode: usize, nb: f64) -> CovMat4 {
        let mut out = *cov.matrix();
        let i = 2 * mode;
        out[(i, i)] += 0.5 * nb;
        out[(i + 1, i + 1)] += 0.5 * nb;
        CovMat4::from_trusted(out)
    }

    /// BPSK: `a → (−1)^k a` on `mode`.
    pub fn bpsk(cov: &CovMat4, mode: usize, k: Bit) -> CovMat4 {
        let mut p = Mat4::identity();
        let i = 2 * mode;
        p[(i, i)] = k.sign();
        p[(i + 1, i + 1)] = k.sign();
        cov.transformed(&p)
    }

    /// Thermal state with `n` mean photons on mode 0, vacuum on mode 1.
    pub fn thermal_and_vacuum(n: f64) -> CovMat4 {
        let v = 0.25 * (2.0 * n + 1.0);
        CovMat4::from_trusted(Mat4::from_diagonal(&Vector4::new(v, v, 0.25, 0.25)))
    }

    /// Beam splitter of transmissivity `kappa` mixing mode 0 with mode 1:
    /// mode 0 → √κ a₀ + √(1−κ) a₁, mode 1 → −√(1−κ) a₀ + √κ a₁.
    pub fn mix(cov: &CovMat4, kappa: f64) -> CovMat4 {
        cov.transformed(&beam_splitter(kappa.sqrt().acos()))
    }

    /// Alice's (return, idler) covariance built by composing the link's
    /// channels on the source state.
    pub fn alice_by_composition(p: &ProtocolParams, k: Bit) -> Result<CovMat4> {
        p.validate()?;
        let src = tmsv_cov(p.ns)?;
        let at_bob = pure_loss(&src, 0, p.kappa);
        let sent = additive_noise(&bpsk(&at_bob, 0, k), 0, p.nb);
        Ok(pure_loss(&sent, 0, p.kappa))
    }

    /// Eve's (forward tap, return tap) covariance built by composing channels.
    /// Only the signal marginal (thermal) matters for Eve.
    pub fn eve_by_composition(p: &ProtocolParams, k: Bit) -> Result<CovMat4> {
        p.validate()?;
        // (a_S, e_B) → (a_B, −c_S)
        let split = mix(&thermal_and_vacuum(p.ns), p.kappa);
        let split = bpsk(&split, 1, Bit::One);
        let sent = additive_noise(&bpsk(&split, 0, k), 0, p.nb);
        // c_R = √(1−κ) a_B' + vacuum
        let tapped = pure_loss(&sent, 0, 1.0 - p.kappa);
        Ok(tapped.swap_modes())
    }
}
