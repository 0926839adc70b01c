//! Monte-Carlo simulation of the homodyne and OPA receivers.
//!
//! Each trial draws its own bit and measurement record from a ChaCha8 stream
//! indexed by the trial number, so results depend only on `(seed, trial)` and
//! not on how trials are scheduled.
//!
//! Two samplers are provided. `PerMode` draws every mode pair literally.
//! `Exact` draws the receiver's decision statistic directly from its exact
//! distribution, which makes `M ~ 10⁶` affordable:
//!
//! * Homodyne. With standardized outputs `(x, y)` of correlation `ρ`,
//!   `x + y` and `x − y` are independent with variances `2(1 ± ρ)`, so
//!   `Σ xₘyₘ = ½[(1+ρ)U − (1−ρ)V]` with `U, V` iid `χ²_M`.
//! * OPA. A sum of `M` Bose-Einstein counts of mean `N` is negative binomial,
//!   i.e. `Poisson(Γ(M, N))`.
//!
//! Homodyne decision rule. The two hypotheses share the marginal variances
//! `a = A/4`, `b = S/4` and differ only in the sign of the cross term `±c`.
//! For covariance `[[a, ±c], [±c, b]]` the inverse is
//! `[[b, ∓c], [∓c, a]] / (ab − c²)`. The two quadratic forms differ only in
//! the `∓2c·xy` term, so the log-likelihood ratio of `M` pairs is
//! `2c Σ xₘyₘ / (ab − c²)`.
//! With `c > 0` under `k = 0` the likelihood-ratio test is `Σ xₘyₘ ≥ 0`.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, Geometric, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::protocol::{homodyne_cov, opa_spec, Bit, OpaSpec, ProtocolParams};

pub const MIN_TRIALS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Decision statistic drawn from its exact law.
    #[default]
    Exact,
    /// Every mode pair drawn individually.
    PerMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub params: ProtocolParams,
    pub trials: u64,
    pub seed: u64,
    pub sampler: Sampler,
}

impl McConfig {
    pub fn new(params: ProtocolParams, trials: u64, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            params,
            trials,
            seed,
            sampler: Sampler::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McResult {
    pub errors: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci95: (f64, f64),
}

impl McResult {
    pub fn from_counts(errors: u64, trials: u64) -> Self {
        McResult {
            errors,
            trials,
            p_hat: errors as f64 / trials as f64,
            ci95: wilson_interval(errors, trials, 1.959_963_984_540_054),
        }
    }

    /// Binomial standard error `√(p̂(1−p̂)/n)`.
    pub fn sigma(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    /// `p̂ − 3σ̂ ≤ bound`
    pub fn within_bound(&self, bound: f64) -> bool {
        self.p_hat - 3.0 * self.sigma() <= bound
    }
}

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trials<F>(cfg: &McConfig, exec: Exec, wrong: F) -> Result<McResult>
where
    F: Fn(Bit, &mut ChaCha8Rng) -> bool + Sync + Send,
{
    cfg.validate()?;
    let errors = exec.count_range(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        let k = Bit::from_bool(rng.random::<bool>());
        wrong(k, &mut rng)
    });
    Ok(McResult::from_counts(errors, cfg.trials))
}

/// Homodyne receiver: `M` (return, idler) quadrature pairs, decide `k̂ = 0`
/// iff `Σ xₘyₘ ≥ 0`.
pub fn simulate_homodyne(cfg: &McConfig, exec: Exec) -> Result<McResult> {
    cfg.validate()?;
    let p = &cfg.params;
    let covs = [homodyne_cov(p, Bit::Zero)?, homodyne_cov(p, Bit::One)?];
    let m = p.m;
    match cfg.sampler {
        Sampler::Exact => {
            let chi = ChiSquared::new(m as f64)
                .map_err(|e| Error::DomainError(format!("chi-square law: {e}")))?;
            let rho = [covs[0].correlation(), covs[1].correlation()];
            run_trials(cfg, exec, |k, rng| {
                let r = rho[k as usize];
                let u: f64 = chi.sample(rng);
                let v: f64 = chi.sample(rng);
                let decide_zero = (1.0 + r) * u - (1.0 - r) * v >= 0.0;
                decide_zero != (k == Bit::Zero)
            })
        }
        Sampler::PerMode => {
            let chol: Vec<Matrix2<f64>> = covs
                .iter()
                .map(|h| {
                    h.0.cholesky()
                        .map(|c| c.l())
                        .ok_or_else(|| Error::DomainError("homodyne covariance is singular".into()))
                })
                .collect::<Result<_>>()?;
            run_trials(cfg, exec, |k, rng| {
                let l = &chol[k as usize];
                let mut stat = 0.0;
                for _ in 0..m {
                    let z0: f64 = rng.sample(StandardNormal);
                    let z1: f64 = rng.sample(StandardNormal);
                    let x = l[(0, 0)] * z0;
                    let y = l[(1, 0)] * z0 + l[(1, 1)] * z1;
                    stat += x * y;
                }
                (stat >= 0.0) != (k == Bit::Zero)
            })
        }
    }
}

/// Photon-count decision for the OPA receiver: the log-likelihood ratio of a
/// total count `n` over `M` Bose-Einstein modes is monotone in `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaDecision {
    spec: OpaSpec,
    m: f64,
}

impl OpaDecision {
    pub fn new(spec: OpaSpec, m: u64) -> Self {
        OpaDecision { spec, m: m as f64 }
    }

    /// `n ln[N₀(N₁+1)/(N₁(N₀+1))] − M ln[(N₀+1)/(N₁+1)] ≥ 0`, ties → 0.
    pub fn decide(&self, n: f64) -> Bit {
        let (n0, n1) = (self.spec.n0, self.spec.n1);
        if n0 == n1 {
            return Bit::Zero;
        }
        if n1 == 0.0 {
            return if n > 0.0 { Bit::Zero } else { Bit::One };
        }
        if n0 == 0.0 {
            return if n > 0.0 { Bit::One } else { Bit::Zero };
        }
        let slope = (n0.ln() - n0.ln_1p()) - (n1.ln() - n1.ln_1p());
        let offset = self.m * (n0.ln_1p() - n1.ln_1p());
        if n * slope - offset >= 0.0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }

    /// Count threshold `n*`, `None` when the test is degenerate.
    pub fn threshold(&self) -> Option<f64> {
        let (n0, n1) = (self.spec.n0, self.spec.n1);
        if n0 == n1 || n0 == 0.0 || n1 == 0.0 {
            return None;
        }
        let slope = (n0.ln() - n0.ln_1p()) - (n1.ln() - n1.ln_1p());
        Some(self.m * (n0.ln_1p() - n1.ln_1p()) / slope)
    }
}

/// OPA receiver: photon counting on the `M` amplifier outputs, total-count
/// likelihood-ratio test.
pub fn simulate_opa(cfg: &McConfig, exec: Exec) -> Result<McResult> {
    cfg.validate()?;
    let spec = opa_spec(&cfg.params)?;
    let m = cfg.params.m;
    let rule = OpaDecision::new(spec, m);
    let means = [spec.n0, spec.n1];
    match cfg.sampler {
        Sampler::Exact => {
            let gammas: Vec<Option<Gamma<f64>>> = means
                .iter()
                .map(|&n| {
                    if n > 0.0 {
                        Gamma::new(m as f64, n)
                            .map(Some)
                            .map_err(|e| Error::DomainError(format!("gamma law: {e}")))
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_>>()?;
            run_trials(cfg, exec, |k, rng| {
                let count = match &gammas[k as usize] {
                    None => 0.0,
                    Some(g) => {
                        let lambda = g.sample(rng);
                        if lambda > 0.0 {
                            Poisson::new(lambda).map(|p| p.sample(rng)).unwrap_or(0.0)
                        } else {
                            0.0
                        }
                    }
                };
                rule.decide(count) != k
            })
        }
        Sampler::PerMode => {
            let geos: Vec<Geometric> = means
                .iter()
                .map(|&n| {
                    Geometric::new(1.0 / (n + 1.0))
                        .map_err(|e| Error::DomainError(format!("geometric law: {e}")))
                })
                .collect::<Result<_>>()?;
            run_trials(cfg, exec, |k, rng| {
                let g = &geos[k as usize];
                let count: u64 = (0..m).map(|_| g.sample(rng)).sum();
                rule.decide(count as f64) != k
            })
        }
    }
}

/// Weighted least-squares slope of `−ln(2p̂)` against `M`.
///
/// Each point is weighted by the inverse of the delta-method variance of
/// `ln p̂`, `n p̂ / (1 − p̂)`.
pub fn fit_exponent(points: &[(u64, McResult)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DomainError("exponent fit needs at least two points".into()));
    }
    if points.iter().any(|(_, r)| !(r.p_hat > 0.0 && r.p_hat < 0.5)) {
        return Err(Error::DomainError(
            "exponent fit needs every p_hat in (0, 1/2)".into(),
        ));
    }
    let w: Vec<f64> = points
        .iter()
        .map(|(_, r)| r.trials as f64 * r.p_hat / (1.0 - r.p_hat))
        .collect();
    let xs: Vec<f64> = points.iter().map(|&(m, _)| m as f64).collect();
    let ys: Vec<f64> = points.iter().map(|(_, r)| -(2.0 * r.p_hat).ln()).collect();
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let my = w.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(&xs).map(|(w, x)| w * (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DomainError("exponent fit needs distinct M values".into()));
    }
    let sxy: f64 = (0..xs.len()).map(|i| w[i] * (xs[i] - mx) * (ys[i] - my)).sum();
    Ok(sxy / sxx)
}
