//! Truncated two-mode Fock-space oracle.
//!
//! Builds the protocol's conditional states as density matrices in the
//! photon-number basis, one channel at a time, and evaluates trace overlaps
//! by eigendecomposition. It shares no code with the Gaussian path beyond the
//! parameter type.
//!
//! Every state produced here has real matrix elements in the Fock basis
//! (real TMSV amplitudes, real Kraus operators, a ±1 phase flip), so density
//! matrices are stored as real symmetric matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::discrimination::gaussian_s_overlap;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::protocol::{alice_conditional_cov, eve_conditional_cov, Bit, ProtocolParams};
use crate::symplectic::{CovMat4, Mat4};

/// Largest truncated weight accepted when preparing the source.
pub const SOURCE_TRUNCATION_LIMIT: f64 = 1e-6;
/// Largest trace deficit accepted after the additive-noise channel.
pub const CHANNEL_TRUNCATION_LIMIT: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState2 {
    pub rho: DMatrix<f64>,
    pub cutoff: usize,
}

impl FockState2 {
    fn zeros(cutoff: usize) -> Self {
        let d = (cutoff + 1) * (cutoff + 1);
        FockState2 {
            rho: DMatrix::zeros(d, d),
            cutoff,
        }
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    #[inline]
    fn idx(&self, n0: usize, n1: usize) -> usize {
        n0 * self.dim() + n1
    }

    /// |0,0⟩⟨0,0|
    pub fn vacuum(cutoff: usize) -> Self {
        let mut st = FockState2::zeros(cutoff);
        st.rho[(0, 0)] = 1.0;
        st
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    /// `1 − tr ρ`: weight pushed beyond the cutoff.
    pub fn truncation_deficit(&self) -> f64 {
        1.0 - self.trace()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.rho - self.rho.transpose()).amax()
    }

    /// `tr(ρ X)` for an operator given column-wise: `X|n₀,n₁⟩ = Σ c |m₀,m₁⟩`.
    fn expect<F>(&self, op: F) -> f64
    where
        F: Fn(usize, usize) -> Option<(usize, usize, f64)>,
    {
        let d = self.dim();
        let mut acc = 0.0;
        for n0 in 0..d {
            for n1 in 0..d {
                if let Some((m0, m1, c)) = op(n0, n1) {
                    if m0 < d && m1 < d {
                        acc += c * self.rho[(self.idx(n0, n1), self.idx(m0, m1))];
                    }
                }
            }
        }
        acc
    }

    pub fn mean_photons(&self, mode: usize) -> f64 {
        self.expect(|n0, n1| {
            let n = if mode == 0 { n0 } else { n1 };
            Some((n0, n1, n as f64))
        })
    }

    fn mean_field(&self, mode: usize) -> f64 {
        self.expect(|n0, n1| match mode {
            0 if n0 > 0 => Some((n0 - 1, n1, (n0 as f64).sqrt())),
            1 if n1 > 0 => Some((n0, n1 - 1, (n1 as f64).sqrt())),
            _ => None,
        })
    }

    fn squeeze_moment(&self, mode: usize) -> f64 {
        self.expect(|n0, n1| match mode {
            0 if n0 > 1 => Some((n0 - 2, n1, ((n0 * (n0 - 1)) as f64).sqrt())),
            1 if n1 > 1 => Some((n0, n1 - 2, ((n1 * (n1 - 1)) as f64).sqrt())),
            _ => None,
        })
    }

    /// ⟨a₀a₁⟩
    fn pair_moment(&self) -> f64 {
        self.expect(|n0, n1| {
            (n0 > 0 && n1 > 0).then(|| (n0 - 1, n1 - 1, ((n0 * n1) as f64).sqrt()))
        })
    }

    /// ⟨a₀†a₁⟩
    fn exchange_moment(&self) -> f64 {
        self.expect(|n0, n1| (n1 > 0).then(|| (n0 + 1, n1 - 1, (((n0 + 1) * n1) as f64).sqrt())))
    }

    /// Wigner covariance (vacuum = I/4) extracted from the state's moments.
    pub fn covariance(&self) -> Mat4 {
        let tr = self.trace();
        let mut m = Mat4::zeros();
        let mean = [self.mean_field(0) / tr, self.mean_field(1) / tr];
        for mode in 0..2 {
            let n = self.mean_photons(mode) / tr;
            let sq = self.squeeze_moment(mode) / tr;
            let i = 2 * mode;
            m[(i, i)] = 0.25 * (2.0 * sq + 2.0 * n + 1.0) - mean[mode] * mean[mode];
            m[(i + 1, i + 1)] = 0.25 * (-2.0 * sq + 2.0 * n + 1.0);
        }
        let pair = self.pair_moment() / tr;
        let exch = self.exchange_moment() / tr;
        m[(0, 2)] = 0.5 * (pair + exch) - mean[0] * mean[1];
        m[(2, 0)] = m[(0, 2)];
        m[(1, 3)] = 0.5 * (exch - pair);
        m[(3, 1)] = m[(1, 3)];
        m
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Two-mode squeezed vacuum `Σ √((1−x)xⁿ)|n,n⟩`, `x = N_S/(N_S+1)`.
pub fn tmsv_fock(ns: f64, cutoff: usize) -> Result<FockState2> {
    if !(ns >= 0.0 && ns.is_finite()) {
        return Err(Error::invalid(format!("N_S must be >= 0, got {ns}")));
    }
    if cutoff < 1 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let x = ns / (ns + 1.0);
    let lost = x.powi(cutoff as i32 + 1);
    if lost > SOURCE_TRUNCATION_LIMIT {
        return Err(Error::CutoffTooSmall {
            cutoff,
            deficit: lost,
            limit: SOURCE_TRUNCATION_LIMIT,
        });
    }
    let mut st = FockState2::zeros(cutoff);
    let amp: Vec<f64> = (0..=cutoff).map(|n| ((1.0 - x) * x.powi(n as i32)).sqrt()).collect();
    for n in 0..=cutoff {
        for m in 0..=cutoff {
            let (i, j) = (st.idx(n, n), st.idx(m, m));
            st.rho[(i, j)] = amp[n] * amp[m];
        }
    }
    Ok(st)
}

/// Single-mode Kraus family whose members map |n⟩ to `coef(n)·|n + shift⟩`.
struct ShiftKraus {
    shift: isize,
    coef: Vec<f64>,
}

fn apply_shift_kraus(state: &FockState2, mode: usize, ops: &[ShiftKraus]) -> FockState2 {
    let d = state.dim();
    let mut out = FockState2::zeros(state.cutoff);
    let target = |n: usize, shift: isize| -> Option<usize> {
        let t = n as isize + shift;
        (t >= 0 && (t as usize) < d).then_some(t as usize)
    };
    for op in ops {
        for a0 in 0..d {
            for a1 in 0..d {
                let (na, other_a) = if mode == 0 { (a0, a1) } else { (a1, a0) };
                let Some(ta) = target(na, op.shift) else { continue };
                let ca = op.coef[na];
                if ca == 0.0 {
                    continue;
                }
                let row_in = state.idx(a0, a1);
                let row_out = if mode == 0 { out.idx(ta, other_a) } else { out.idx(other_a, ta) };
                for b0 in 0..d {
                    for b1 in 0..d {
                        let (nb, other_b) = if mode == 0 { (b0, b1) } else { (b1, b0) };
                        let Some(tb) = target(nb, op.shift) else { continue };
                        let v = state.rho[(row_in, state.idx(b0, b1))];
                        if v == 0.0 {
                            continue;
                        }
                        let col_out = if mode == 0 { out.idx(tb, other_b) } else { out.idx(other_b, tb) };
                        out.rho[(row_out, col_out)] += ca * op.coef[nb] * v;
                    }
                }
            }
        }
    }
    out
}

fn check_mode(mode: usize) -> Result<()> {
    if mode > 1 {
        return Err(Error::invalid(format!("mode index must be 0 or 1, got {mode}")));
    }
    Ok(())
}

/// Pure-loss channel of transmissivity `kappa` on `mode`:
/// `K_l|n⟩ = √(C(n,l) κ^{n−l} (1−κ)^l) |n−l⟩`.
pub fn apply_loss(state: &FockState2, mode: usize, kappa: f64) -> Result<FockState2> {
    check_mode(mode)?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!("transmissivity must lie in [0,1], got {kappa}")));
    }
    if kappa == 1.0 {
        return Ok(state.clone());
    }
    let d = state.dim();
    let ops: Vec<ShiftKraus> = (0..d)
        .map(|l| ShiftKraus {
            shift: -(l as isize),
            coef: (0..d)
                .map(|n| {
                    if n < l {
                        0.0
                    } else {
                        (binomial(n, l) * kappa.powi((n - l) as i32) * (1.0 - kappa).powi(l as i32)).sqrt()
                    }
                })
                .collect(),
        })
        .collect();
    Ok(apply_shift_kraus(state, mode, &ops))
}

/// Phase-insensitive amplifier of gain `g ≥ 1` on `mode`:
/// `A_l|n⟩ = √(C(n+l,l) (1−1/g)^l / g^{n+1}) |n+l⟩`.
pub fn apply_amplifier(state: &FockState2, mode: usize, gain: f64) -> Result<FockState2> {
    check_mode(mode)?;
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(Error::invalid(format!("gain must be >= 1, got {gain}")));
    }
    if gain == 1.0 {
        return Ok(state.clone());
    }
    let d = state.dim();
    let ops: Vec<ShiftKraus> = (0..d)
        .map(|l| ShiftKraus {
            shift: l as isize,
            coef: (0..d)
                .map(|n| {
                    (binomial(n + l, l) * (1.0 - 1.0 / gain).powi(l as i32) / gain.powi(n as i32 + 1)).sqrt()
                })
                .collect(),
        })
        .collect();
    Ok(apply_shift_kraus(state, mode, &ops))
}

/// BPSK phase flip `(−1)^{n̂}` on `mode` when `k = 1`.
pub fn apply_bpsk(state: &FockState2, mode: usize, k: Bit) -> Result<FockState2> {
    check_mode(mode)?;
    let mut out = state.clone();
    if k == Bit::Zero {
        return Ok(out);
    }
    let d = state.dim();
    for a0 in 0..d {
        for a1 in 0..d {
            let na = if mode == 0 { a0 } else { a1 };
            for b0 in 0..d {
                for b1 in 0..d {
                    let nb = if mode == 0 { b0 } else { b1 };
                    if (na + nb) % 2 == 1 {
                        let (i, j) = (state.idx(a0, a1), state.idx(b0, b1));
                        out.rho[(i, j)] = -out.rho[(i, j)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Classical additive Gaussian noise with `nb` mean photons on `mode`,
/// realized as loss `1/(1+N_B)` followed by amplification `1+N_B`.
pub fn apply_additive_noise(state: &FockState2, mode: usize, nb: f64) -> Result<FockState2> {
    check_mode(mode)?;
    if !(nb >= 0.0 && nb.is_finite()) {
        return Err(Error::invalid(format!("N_B must be >= 0, got {nb}")));
    }
    if nb == 0.0 {
        return Ok(state.clone());
    }
    let g = 1.0 + nb;
    let out = apply_amplifier(&apply_loss(state, mode, 1.0 / g)?, mode, g)?;
    let deficit = out.truncation_deficit();
    if deficit > CHANNEL_TRUNCATION_LIMIT {
        return Err(Error::CutoffTooSmall {
            cutoff: state.cutoff,
            deficit,
            limit: CHANNEL_TRUNCATION_LIMIT,
        });
    }
    Ok(out)
}

/// Index sets of the connected components of the joint nonzero pattern of
/// the given matrices. Every matrix is block diagonal over these sets.
fn joint_blocks(mats: &[&DMatrix<f64>]) -> Vec<Vec<usize>> {
    let n = mats[0].nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in mats {
        for j in 0..n {
            for i in (j + 1)..n {
                if m[(i, j)] != 0.0 || m[(j, i)] != 0.0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups
        .into_iter()
        .filter(|g| !g.is_empty() && g.iter().any(|&i| mats.iter().any(|m| m[(i, i)] != 0.0)))
        .collect()
}

struct BlockSpectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn block_spectrum(m: &DMatrix<f64>, idx: &[usize]) -> Result<BlockSpectrum> {
    let k = idx.len();
    let sub = DMatrix::from_fn(k, k, |i, j| 0.5 * (m[(idx[i], idx[j])] + m[(idx[j], idx[i])]));
    let trace = sub.trace();
    let eig = SymmetricEigen::try_new(sub, f64::EPSILON, 0).ok_or_else(|| {
        Error::NumericalInstability("Fock-space eigensolver did not converge".into())
    })?;
    let sum: f64 = eig.eigenvalues.iter().sum();
    if eig.eigenvalues.iter().any(|w| !w.is_finite()) || (sum - trace).abs() > 1e-9 {
        return Err(Error::NumericalInstability(
            "Fock-space eigendecomposition lost the trace".into(),
        ));
    }
    Ok(BlockSpectrum {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}

/// Eigendecompositions of a pair of states on their common block structure,
/// kept so the overlap can be evaluated at several s.
pub struct PairSpectrum {
    blocks: Vec<(BlockSpectrum, BlockSpectrum, DMatrix<f64>)>,
}

impl PairSpectrum {
    pub fn new(rho0: &FockState2, rho1: &FockState2) -> Result<Self> {
        if rho0.cutoff != rho1.cutoff {
            return Err(Error::invalid("Fock states have different cutoffs"));
        }
        let mut blocks = Vec::new();
        for idx in joint_blocks(&[&rho0.rho, &rho1.rho]) {
            let b0 = block_spectrum(&rho0.rho, &idx)?;
            let b1 = block_spectrum(&rho1.rho, &idx)?;
            let c = b0.vectors.transpose() * &b1.vectors;
            blocks.push((b0, b1, c));
        }
        Ok(PairSpectrum { blocks })
    }

    /// `tr(ρ₀^s ρ₁^{1−s}) = Σᵢⱼ w₀ᵢ^s w₁ⱼ^{1−s} ⟨uᵢ|vⱼ⟩²`, negative
    /// eigenvalues clipped to zero.
    pub fn overlap(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("s must lie in (0,1), got {s}")));
        }
        let mut acc = 0.0;
        for (b0, b1, c) in &self.blocks {
            let p: Vec<f64> = b0.values.iter().map(|w| w.max(0.0).powf(s)).collect();
            for (j, w) in b1.values.iter().enumerate() {
                let q = w.max(0.0).powf(1.0 - s);
                if q == 0.0 {
                    continue;
                }
                let col: f64 = (0..c.nrows()).map(|i| p[i] * c[(i, j)] * c[(i, j)]).sum();
                acc += q * col;
            }
        }
        Ok(acc)
    }
}

/// Smallest eigenvalue of the state before any clipping.
pub fn min_eigenvalue(state: &FockState2) -> Result<f64> {
    let mut lo = f64::INFINITY;
    for idx in joint_blocks(&[&state.rho]) {
        let b = block_spectrum(&state.rho, &idx)?;
        lo = b.values.iter().copied().fold(lo, f64::min);
    }
    Ok(if lo.is_finite() { lo } else { 0.0 })
}

pub fn s_overlap_fock(rho0: &FockState2, rho1: &FockState2, s: f64) -> Result<f64> {
    PairSpectrum::new(rho0, rho1)?.overlap(s)
}

/// Smallest cutoff keeping the thermal tail of every intermediate mode below
/// `tail`: the largest intermediate mean is `max(N_S, κN_S + N_B)`.
pub fn auto_cutoff(p: &ProtocolParams, tail: f64) -> usize {
    let mean = p.ns.max(p.kappa * p.ns + p.nb);
    if mean <= 0.0 {
        return 2;
    }
    let x = mean / (mean + 1.0);
    let c = (tail.ln() / x.ln()).ceil() as usize;
    c.max(2)
}

/// Alice's (return, idler) state for bit `k`: source, loss, BPSK, noise, loss.
pub fn alice_fock(p: &ProtocolParams, k: Bit, cutoff: usize) -> Result<FockState2> {
    p.validate()?;
    let st = tmsv_fock(p.ns, cutoff)?;
    let st = apply_loss(&st, 0, p.kappa)?;
    let st = apply_bpsk(&st, 0, k)?;
    let st = apply_additive_noise(&st, 0, p.nb)?;
    apply_loss(&st, 0, p.kappa)
}

/// Eve's (forward tap, return tap) state for bit `k`.
///
/// The thermal signal marginal is split on the outbound beam splitter,
/// `|n⟩ → Σⱼ √(C(n,j) κʲ (1−κ)^{n−j}) |n−j⟩_c |j⟩_B`; Bob's mode is then
/// modulated, noised and tapped with transmissivity `1−κ` toward Eve.
pub fn eve_fock(p: &ProtocolParams, k: Bit, cutoff: usize) -> Result<FockState2> {
    p.validate()?;
    let x = p.ns / (p.ns + 1.0);
    let lost = x.powi(cutoff as i32 + 1);
    if lost > SOURCE_TRUNCATION_LIMIT {
        return Err(Error::CutoffTooSmall {
            cutoff,
            deficit: lost,
            limit: SOURCE_TRUNCATION_LIMIT,
        });
    }
    let mut st = FockState2::zeros(cutoff);
    let d = st.dim();
    for n in 0..d {
        let pn = (1.0 - x) * x.powi(n as i32);
        let psi: Vec<(usize, f64)> = (0..=n)
            .map(|j| {
                let a = (binomial(n, j) * p.kappa.powi(j as i32) * (1.0 - p.kappa).powi((n - j) as i32)).sqrt();
                (st.idx(n - j, j), a)
            })
            .collect();
        for &(i, a) in &psi {
            for &(j, b) in &psi {
                st.rho[(i, j)] += pn * a * b;
            }
        }
    }
    let st = apply_bpsk(&st, 1, k)?;
    let st = apply_additive_noise(&st, 1, p.nb)?;
    apply_loss(&st, 1, 1.0 - p.kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Eve,
}

/// Parameter grid for the oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleGrid {
    pub ns: Vec<f64>,
    pub kappa: Vec<f64>,
    pub nb: Vec<f64>,
    pub s: Vec<f64>,
    pub parties: Vec<Party>,
    /// Fixed cutoff; chosen per point when `None`.
    pub cutoff: Option<usize>,
    pub tolerance: f64,
    pub max_deficit: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            ns: vec![0.05, 0.1, 0.3],
            kappa: vec![0.3, 0.6, 0.9],
            nb: vec![0.0, 0.2, 0.5],
            s: vec![0.3, 0.5, 0.7],
            parties: vec![Party::Alice, Party::Eve],
            cutoff: None,
            tolerance: 1e-4,
            max_deficit: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub party: Party,
    pub ns: f64,
    pub kappa: f64,
    pub nb: f64,
    pub cutoff: usize,
    pub deficit: f64,
    /// max over s of |Q_s(Gaussian) − Q_s(Fock)|
    pub max_deviation: f64,
    pub error: Option<String>,
    pub pass: bool,
}

/// Tail target used when the grid leaves the cutoff free.
pub const AUTO_CUTOFF_TAIL: f64 = 1e-10;

fn oracle_point(grid: &OracleGrid, party: Party, ns: f64, kappa: f64, nb: f64) -> OracleRow {
    let mut row = OracleRow {
        party,
        ns,
        kappa,
        nb,
        cutoff: 0,
        deficit: f64::NAN,
        max_deviation: f64::NAN,
        error: None,
        pass: false,
    };
    let result = (|| -> Result<(usize, f64, f64)> {
        let p = ProtocolParams::new(kappa, ns, nb, 1)?;
        let cutoff = grid.cutoff.unwrap_or_else(|| auto_cutoff(&p, AUTO_CUTOFF_TAIL));
        let (f0, f1, g0, g1): (FockState2, FockState2, CovMat4, CovMat4) = match party {
            Party::Alice => (
                alice_fock(&p, Bit::Zero, cutoff)?,
                alice_fock(&p, Bit::One, cutoff)?,
                alice_conditional_cov(&p, Bit::Zero)?,
                alice_conditional_cov(&p, Bit::One)?,
            ),
            Party::Eve => (
                eve_fock(&p, Bit::Zero, cutoff)?,
                eve_fock(&p, Bit::One, cutoff)?,
                eve_conditional_cov(&p, Bit::Zero)?,
                eve_conditional_cov(&p, Bit::One)?,
            ),
        };
        let deficit = f0.truncation_deficit().max(f1.truncation_deficit());
        let pair = PairSpectrum::new(&f0, &f1)?;
        let mut dev: f64 = 0.0;
        for &s in &grid.s {
            let fock = pair.overlap(s)?;
            let gauss = gaussian_s_overlap(&g0, &g1, s)?.q_s;
            dev = dev.max((fock - gauss).abs());
        }
        Ok((cutoff, deficit, dev))
    })();
    match result {
        Ok((cutoff, deficit, dev)) => {
            row.cutoff = cutoff;
            row.deficit = deficit;
            row.max_deviation = dev;
            row.pass = dev < grid.tolerance && deficit < grid.max_deficit;
        }
        Err(e) => {
            if let Error::CutoffTooSmall { cutoff, deficit, .. } = e {
                row.cutoff = cutoff;
                row.deficit = deficit;
            }
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Runs the Gaussian-vs-Fock comparison over every grid point.
pub fn run_oracle_grid(grid: &OracleGrid, exec: Exec) -> Vec<OracleRow> {
    let mut points = Vec::new();
    for &party in &grid.parties {
        for &ns in &grid.ns {
            for &kappa in &grid.kappa {
                for &nb in &grid.nb {
                    points.push((party, ns, kappa, nb));
                }
            }
        }
    }
    exec.map_slice(&points, |&(party, ns, kappa, nb)| oracle_point(grid, party, ns, kappa, nb))
}
