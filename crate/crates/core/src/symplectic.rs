//! Symplectic linear algebra for two-mode covariance matrices.
//!
//! Quadratures are ordered (q₁, p₁, q₂, p₂) and normalized so the vacuum
//! covariance is I/4; symplectic eigenvalues of physical states are therefore
//! ≥ 1/4.

use nalgebra::{Matrix2, Matrix4, Vector4};
use rand::Rng;

use crate::error::{Error, Result};
use crate::protocol::{Bit, DerivedSymbols};

pub type Mat4 = Matrix4<f64>;

/// Vacuum symplectic eigenvalue in the I/4 convention.
pub const VACUUM_NU: f64 = 0.25;

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICAL_SLACK: f64 = 1e-9;

/// The symplectic form Ω = [[0,1],[-1,0]] ⊕ [[0,1],[-1,0]].
pub struct SymplecticForm;

impl SymplecticForm {
    pub fn matrix() -> Mat4 {
        Mat4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        )
    }
}

/// Wigner covariance matrix of a zero-mean two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMat4(Mat4);

impl CovMat4 {
    /// Validates symmetry, positive definiteness and the uncertainty
    /// principle `cov + (i/4)Ω ≥ 0`.
    pub fn new(m: Mat4) -> Result<Self> {
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (m - m.transpose()).amax();
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonPhysicalCovariance("non-finite entry".into()));
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NonPhysicalCovariance(format!(
                "asymmetry {asym:.3e} exceeds tolerance"
            )));
        }
        let sym = (m + m.transpose()) * 0.5;
        if sym.cholesky().is_none() {
            return Err(Error::NonPhysicalCovariance(
                "matrix is not positive definite".into(),
            ));
        }
        let cov = CovMat4(sym);
        let nu = symplectic_spectrum(&cov)?;
        if nu[1] < VACUUM_NU - PHYSICAL_SLACK {
            return Err(Error::NonPhysicalCovariance(format!(
                "symplectic eigenvalue {:.6e} below vacuum value 1/4",
                nu[1]
            )));
        }
        Ok(cov)
    }

    /// Wraps a matrix already known to be a physical covariance.
    pub(crate) fn from_trusted(m: Mat4) -> Self {
        CovMat4((m + m.transpose()) * 0.5)
    }

    pub fn vacuum() -> Self {
        CovMat4(Mat4::identity() * 0.25)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    /// Mean photon number ⟨a†a⟩ of `mode` (0 or 1).
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let i = 2 * mode;
        self.0[(i, i)] + self.0[(i + 1, i + 1)] - 0.5
    }

    /// 2×2 block of mode `mode`.
    pub fn mode_block(&self, mode: usize) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned()
    }

    /// Conjugation `S · cov · Sᵀ` by a symplectic matrix.
    pub fn transformed(&self, s: &Mat4) -> Self {
        CovMat4::from_trusted(s * self.0 * s.transpose())
    }

    /// Swaps the two modes.
    pub fn swap_modes(&self) -> Self {
        let mut p = Mat4::zeros();
        p[(0, 2)] = 1.0;
        p[(1, 3)] = 1.0;
        p[(2, 0)] = 1.0;
        p[(3, 1)] = 1.0;
        self.transformed(&p)
    }
}

/// Symplectic matrix plus symplectic spectrum: `cov = S · diag(ν₁,ν₁,ν₂,ν₂) · Sᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilliamsonDecomp {
    pub s: Mat4,
    /// Symplectic eigenvalues, descending.
    pub nu: [f64; 2],
}

impl WilliamsonDecomp {
    pub fn diag(&self) -> Mat4 {
        Mat4::from_diagonal(&Vector4::new(self.nu[0], self.nu[0], self.nu[1], self.nu[1]))
    }

    pub fn reconstruct(&self) -> Mat4 {
        self.s * self.diag() * self.s.transpose()
    }

    /// `S · diag(f(ν₁),f(ν₁),f(ν₂),f(ν₂)) · Sᵀ`.
    pub fn rebuild_with<F: Fn(f64) -> f64>(&self, f: F) -> Mat4 {
        let d = Vector4::new(f(self.nu[0]), f(self.nu[0]), f(self.nu[1]), f(self.nu[1]));
        self.s * Mat4::from_diagonal(&d) * self.s.transpose()
    }
}

/// `‖M Ω Mᵀ − Ω‖_max ≤ tol`.
pub fn is_symplectic(m: &Mat4, tol: f64) -> bool {
    symplectic_defect(m) <= tol
}

pub fn symplectic_defect(m: &Mat4) -> f64 {
    let omega = SymplecticForm::matrix();
    (m * omega * m.transpose() - omega).amax()
}

/// Williamson decomposition of a positive-definite covariance.
///
/// With `B = V^{-1/2} Ω V^{-1/2}` (antisymmetric) brought to real Schur form
/// `B = O J Oᵀ`, `J = ⊕ [[0, 1/ν],[-1/ν, 0]]`, the matrix
/// `S = V^{1/2} O D^{-1/2}` is symplectic and `S D Sᵀ = V`.
///
/// Conventions: ν sorted descending; each column pair of `S` is signed so the
/// first significant entry of its first column is positive.
pub fn williamson(cov: &CovMat4) -> Result<WilliamsonDecomp> {
    let v = cov.matrix();
    let (sqrt_v, inv_sqrt_v) = sqrt_and_inverse_sqrt(v)?;
    let omega = SymplecticForm::matrix();
    let b = inv_sqrt_v * omega * inv_sqrt_v;
    let b = (b - b.transpose()) * 0.5;

    let (q, t) = nalgebra::linalg::Schur::new(b).unpack();

    // Each 2×2 diagonal block of t carries one symplectic eigenvalue.
    let mut pairs: Vec<(f64, [Vector4<f64>; 2])> = Vec::with_capacity(2);
    for blk in 0..2 {
        let i = 2 * blk;
        let (t01, t10) = (t[(i, i + 1)], t[(i + 1, i)]);
        let prod = -(t01 * t10);
        if !(prod > 0.0) {
            return Err(Error::NumericalInstability(format!(
                "Schur block {blk} is not a rotation generator"
            )));
        }
        let nu = 1.0 / prod.sqrt();
        let c0: Vector4<f64> = q.column(i).into_owned();
        let mut c1: Vector4<f64> = q.column(i + 1).into_owned();
        if t01 < 0.0 {
            c1 = -c1;
        }
        pairs.push((nu, [c0, c1]));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut s = Mat4::zeros();
    let nu = [pairs[0].0, pairs[1].0];
    for (k, (nu_k, cols)) in pairs.iter().enumerate() {
        let scale = nu_k.sqrt().recip();
        let mut c0 = sqrt_v * cols[0] * scale;
        let mut c1 = sqrt_v * cols[1] * scale;
        if first_significant(&c0) < 0.0 {
            c0 = -c0;
            c1 = -c1;
        }
        s.set_column(2 * k, &c0);
        s.set_column(2 * k + 1, &c1);
    }
    Ok(WilliamsonDecomp { s, nu })
}

/// Symplectic eigenvalues only.
pub fn symplectic_spectrum(cov: &CovMat4) -> Result<[f64; 2]> {
    williamson(cov).map(|w| w.nu)
}

fn first_significant(v: &Vector4<f64>) -> f64 {
    let tol = 1e-12 * v.amax();
    v.iter().copied().find(|x| x.abs() > tol).unwrap_or(0.0)
}

fn sqrt_and_inverse_sqrt(v: &Mat4) -> Result<(Mat4, Mat4)> {
    let eig = v.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NonPhysicalCovariance(
            "matrix is not positive definite".into(),
        ));
    }
    let u = &eig.eigenvectors;
    let sq = eig.eigenvalues.map(f64::sqrt);
    let isq = sq.map(f64::recip);
    let sqrt_v = u * Mat4::from_diagonal(&sq) * u.transpose();
    let inv_sqrt_v = u * Mat4::from_diagonal(&isq) * u.transpose();
    Ok((
        (sqrt_v + sqrt_v.transpose()) * 0.5,
        (inv_sqrt_v + inv_sqrt_v.transpose()) * 0.5,
    ))
}

/// Closed-form decomposition of Alice's conditional covariance (return mode
/// first, idler second): `S = [[X₊, ±X₋],[±X₋, X₊]]`, `X± = diag(x±, ±x±)`.
///
/// `nu` is listed per mode of `S` (return, idler), so it is descending only
/// when A ≥ S.
pub fn analytic_decomp_alice(sym: &DerivedSymbols, k: Bit) -> Result<WilliamsonDecomp> {
    let (a, s, ca) = (sym.a, sym.s, sym.c_a);
    let disc = (a + s).powi(2) - 4.0 * ca * ca;
    if !(disc > 0.0) {
        return Err(Error::DomainError(format!(
            "(A+S)^2 - 4C_a^2 = {disc:.3e} must be positive"
        )));
    }
    let root = disc.sqrt();
    let x_plus = ((a + s + root) / (2.0 * root)).sqrt();
    let x_minus = ((a + s - root).max(0.0) / (2.0 * root)).sqrt();
    let sg = k.sign();
    let mut m = Mat4::zeros();
    m[(0, 0)] = x_plus;
    m[(1, 1)] = x_plus;
    m[(2, 2)] = x_plus;
    m[(3, 3)] = x_plus;
    m[(0, 2)] = sg * x_minus;
    m[(1, 3)] = -sg * x_minus;
    m[(2, 0)] = sg * x_minus;
    m[(3, 1)] = -sg * x_minus;
    let nu1 = ((a - s) + root) / 8.0;
    let nu2 = ((s - a) + root) / 8.0;
    Ok(WilliamsonDecomp { s: m, nu: [nu1, nu2] })
}

/// Two-mode squeezer parameters (x₊, x₋) of [`analytic_decomp_alice`].
pub fn alice_squeeze_coefficients(sym: &DerivedSymbols) -> Result<(f64, f64)> {
    let w = analytic_decomp_alice(sym, Bit::Zero)?;
    Ok((w.s[(0, 0)], w.s[(0, 2)]))
}

/// Mixing angle θ of Eve's beam-splitter form: `cos 2θ = (D−E)/√((D−E)²+4C_e²)`,
/// `sin 2θ ≥ 0`.
pub fn eve_mixing_angle(sym: &DerivedSymbols) -> Result<f64> {
    let (d, e, ce) = (sym.d, sym.e, sym.c_e);
    let r = ((d - e).powi(2) + 4.0 * ce * ce).sqrt();
    if !r.is_finite() {
        return Err(Error::DomainError("non-finite Eve symbols".into()));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * (2.0 * ce).atan2(d - e))
}

/// Closed-form decomposition of Eve's conditional covariance:
/// `S = [[Y, ∓Z],[±Z, Y]]`, `Y = cos θ·I`, `Z = sin θ·I`; `nu` descending.
pub fn analytic_decomp_eve(sym: &DerivedSymbols, k: Bit) -> Result<WilliamsonDecomp> {
    let (d, e, ce) = (sym.d, sym.e, sym.c_e);
    let theta = eve_mixing_angle(sym)?;
    let (sin, cos) = theta.sin_cos();
    let sg = k.sign();
    let mut m = Mat4::zeros();
    for i in 0..4 {
        m[(i, i)] = cos;
    }
    m[(0, 2)] = -sg * sin;
    m[(1, 3)] = -sg * sin;
    m[(2, 0)] = sg * sin;
    m[(3, 1)] = sg * sin;
    let r = ((d - e).powi(2) + 4.0 * ce * ce).sqrt();
    Ok(WilliamsonDecomp {
        s: m,
        nu: [(d + e + r) / 8.0, (d + e - r) / 8.0],
    })
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Single-mode phase rotation on `mode`.
pub fn phase_rotation(mode: usize, theta: f64) -> Mat4 {
    let mut m = Mat4::identity();
    m.fixed_view_mut::<2, 2>(2 * mode, 2 * mode)
        .copy_from(&rotation(theta));
    m
}

/// Single-mode squeezer `diag(e^r, e^{-r})` on `mode`.
pub fn single_mode_squeezer(mode: usize, r: f64) -> Mat4 {
    let mut m = Mat4::identity();
    m[(2 * mode, 2 * mode)] = r.exp();
    m[(2 * mode + 1, 2 * mode + 1)] = (-r).exp();
    m
}

/// Beam splitter with transmissivity `cos²φ`: `q₁ → cos φ q₁ + sin φ q₂`,
/// `q₂ → −sin φ q₁ + cos φ q₂` and likewise for p.
pub fn beam_splitter(phi: f64) -> Mat4 {
    let (s, c) = phi.sin_cos();
    let mut m = Mat4::zeros();
    for j in 0..2 {
        m[(j, j)] = c;
        m[(j, j + 2)] = s;
        m[(j + 2, j)] = -s;
        m[(j + 2, j + 2)] = c;
    }
    m
}

/// Two-mode squeezer `[[cosh r·I, sinh r·Z],[sinh r·Z, cosh r·I]]`, `Z = diag(1,-1)`.
pub fn two_mode_squeezer(r: f64) -> Mat4 {
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut m = Mat4::identity() * ch;
    m[(0, 2)] = sh;
    m[(2, 0)] = sh;
    m[(1, 3)] = -sh;
    m[(3, 1)] = -sh;
    m
}

/// Random symplectic matrix built from passive rotations, beam splitters and
/// single- and two-mode squeezers with `|r| ≤ max_squeeze`.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, max_squeeze: f64) -> Mat4 {
    let tau = std::f64::consts::TAU;
    let mut s = Mat4::identity();
    for _ in 0..2 {
        s = phase_rotation(0, rng.random::<f64>() * tau) * s;
        s = phase_rotation(1, rng.random::<f64>() * tau) * s;
        s = single_mode_squeezer(0, rng.random_range(-max_squeeze..=max_squeeze)) * s;
        s = single_mode_squeezer(1, rng.random_range(-max_squeeze..=max_squeeze)) * s;
        s = beam_splitter(rng.random::<f64>() * tau) * s;
        s = two_mode_squeezer(rng.random_range(-max_squeeze..=max_squeeze)) * s;
    }
    s
}

/// Random physical covariance: random symplectic acting on a product of
/// thermal states with mean photon numbers up to `max_photons`.
pub fn random_physical_cov<R: Rng + ?Sized>(
    rng: &mut R,
    max_squeeze: f64,
    max_photons: f64,
) -> (CovMat4, [f64; 2]) {
    let n1 = rng.random::<f64>() * max_photons;
    let n2 = rng.random::<f64>() * max_photons;
    let mut nu = [VACUUM_NU * (2.0 * n1 + 1.0), VACUUM_NU * (2.0 * n2 + 1.0)];
    nu.sort_by(|a, b| b.total_cmp(a));
    let s = random_symplectic(rng, max_squeeze);
    let d = Mat4::from_diagonal(&Vector4::new(nu[0], nu[0], nu[1], nu[1]));
    (CovMat4::from_trusted(s * d * s.transpose()), nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{alice_conditional_cov, eve_conditional_cov, tmsv_cov, ProtocolParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> ProtocolParams {
        ProtocolParams::new(0.1, 0.004, 100.0, 1).unwrap()
    }

    #[test]
    fn omega_properties() {
        let o = SymplecticForm::matrix();
        assert_eq!(o * o, -Mat4::identity());
        assert_eq!(o.transpose(), -o);
    }

    #[test]
    fn vacuum_decomposes_to_identity() {
        let w = williamson(&CovMat4::vacuum()).unwrap();
        assert_relative_eq!(w.s, Mat4::identity(), epsilon = 1e-14);
        assert_relative_eq!(w.nu[0], 0.25, epsilon = 1e-15);
        assert_relative_eq!(w.nu[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn tmsv_is_pure() {
        for ns in [0.004, 0.1, 1.0, 10.0] {
            let w = williamson(&tmsv_cov(ns).unwrap()).unwrap();
            assert_relative_eq!(w.nu[0], 0.25, max_relative = 1e-9);
            assert_relative_eq!(w.nu[1], 0.25, max_relative = 1e-9);
        }
    }

    #[test]
    fn alice_fig1_spectrum() {
        // [(-1)^n (S-A) + sqrt((A+S)^2 - 4 C_a^2)] / 8 at A=21.00008, S=1.008
        let (a, s, ca) = (21.00008_f64, 1.008_f64, 0.1 * 2.0 * (0.004_f64 * 1.004).sqrt());
        let root = ((a + s).powi(2) - 4.0 * ca * ca).sqrt();
        let expect = [((a - s) + root) / 8.0, ((s - a) + root) / 8.0];
        let w = williamson(&alice_conditional_cov(&fig1(), Bit::Zero).unwrap()).unwrap();
        assert_relative_eq!(w.nu[0], expect[0], max_relative = 1e-12);
        assert_relative_eq!(w.nu[1], expect[1], max_relative = 1e-12);
        assert_relative_eq!(w.nu[0], 5.25002, epsilon = 1e-5);
        assert_relative_eq!(w.nu[1], 0.25200, epsilon = 1e-5);
        assert!(is_symplectic(&w.s, 1e-9));
    }

    #[test]
    fn is_symplectic_basic_cases() {
        assert!(is_symplectic(&Mat4::identity(), 1e-12));
        assert!(!is_symplectic(&(Mat4::identity() * 2.0), 1e-9));
        assert!(is_symplectic(&two_mode_squeezer(0.7), 1e-12));
        assert!(is_symplectic(&beam_splitter(0.3), 1e-12));
    }

    #[test]
    fn rejects_unphysical() {
        let too_small = Mat4::identity() * 0.2;
        assert!(matches!(
            CovMat4::new(too_small),
            Err(Error::NonPhysicalCovariance(_))
        ));
        let mut asym = Mat4::identity();
        asym[(0, 1)] = 0.1;
        assert!(CovMat4::new(asym).is_err());
        let mut indefinite = Mat4::identity();
        indefinite[(0, 0)] = -1.0;
        assert!(CovMat4::new(indefinite).is_err());
        // squeezed vacuum sits on the boundary and must pass
        let sq = CovMat4::vacuum().transformed(&single_mode_squeezer(0, 1.3));
        assert!(CovMat4::new(*sq.matrix()).is_ok());
    }

    #[test]
    fn alice_analytic_pure_limit() {
        let p = ProtocolParams::new(1.0, 0.3, 0.0, 1).unwrap();
        let w = analytic_decomp_alice(&p.symbols(), Bit::Zero).unwrap();
        assert_relative_eq!(w.nu[0], 0.25, epsilon = 1e-12);
        assert_relative_eq!(w.nu[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn alice_analytic_fig1() {
        let sym = fig1().symbols();
        for k in [Bit::Zero, Bit::One] {
            let an = analytic_decomp_alice(&sym, k).unwrap();
            let cov = alice_conditional_cov(&fig1(), k).unwrap();
            let num = williamson(&cov).unwrap();
            assert_relative_eq!(an.nu[0], num.nu[0], max_relative = 1e-10);
            assert_relative_eq!(an.nu[1], num.nu[1], max_relative = 1e-10);
            assert!(is_symplectic(&an.s, 1e-12));
            assert_relative_eq!(an.reconstruct(), *cov.matrix(), epsilon = 1e-12);
        }
        let (xp, xm) = alice_squeeze_coefficients(&sym).unwrap();
        assert_relative_eq!(xp * xp - xm * xm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn alice_analytic_domain_guard() {
        let mut sym = fig1().symbols();
        sym.c_a = 100.0;
        assert!(matches!(
            analytic_decomp_alice(&sym, Bit::Zero),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn eve_analytic_lossless_is_unmixed() {
        let p = ProtocolParams::new(1.0, 0.004, 100.0, 1).unwrap();
        let sym = p.symbols();
        assert_eq!(eve_mixing_angle(&sym).unwrap(), 0.0);
        let w = analytic_decomp_eve(&sym, Bit::Zero).unwrap();
        assert_relative_eq!(w.s, Mat4::identity(), epsilon = 1e-15);
        assert_relative_eq!(w.nu[0], sym.e.max(sym.d) / 4.0, epsilon = 1e-15);
        assert_relative_eq!(w.nu[1], sym.e.min(sym.d) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn eve_analytic_fig1() {
        let sym = fig1().symbols();
        let theta = eve_mixing_angle(&sym).unwrap();
        let (s2, c2) = (2.0 * theta).sin_cos();
        assert_relative_eq!(s2 * s2 + c2 * c2, 1.0, epsilon = 1e-15);
        for k in [Bit::Zero, Bit::One] {
            let an = analytic_decomp_eve(&sym, k).unwrap();
            let cov = eve_conditional_cov(&fig1(), k).unwrap();
            let num = williamson(&cov).unwrap();
            assert_relative_eq!(an.nu[0], num.nu[0], max_relative = 1e-10);
            assert_relative_eq!(an.nu[1], num.nu[1], max_relative = 1e-10);
            assert!(is_symplectic(&an.s, 1e-12));
            assert_relative_eq!(an.reconstruct(), *cov.matrix(), epsilon = 1e-12);
        }
    }

    #[test]
    fn numeric_and_analytic_differ_by_symplectic_orthogonal() {
        let p = fig1();
        let an = analytic_decomp_alice(&p.symbols(), Bit::One).unwrap();
        let num = williamson(&alice_conditional_cov(&p, Bit::One).unwrap()).unwrap();
        let r = num.s.try_inverse().unwrap() * an.s;
        assert_relative_eq!(r * r.transpose(), Mat4::identity(), epsilon = 1e-9);
        assert!(is_symplectic(&r, 1e-9));
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (cov, _) = random_physical_cov(&mut rng, 0.8, 3.0);
        assert_eq!(williamson(&cov).unwrap(), williamson(&cov).unwrap());
    }

    #[test]
    fn sign_convention_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (cov, _) = random_physical_cov(&mut rng, 0.8, 3.0);
            let w = williamson(&cov).unwrap();
            for k in 0..2 {
                let c: Vector4<f64> = w.s.column(2 * k).into_owned();
                assert!(first_significant(&c) > 0.0);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn reconstruction_and_closure(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (cov, nu) = random_physical_cov(&mut rng, 0.8, 5.0);
            let w = williamson(&cov).unwrap();
            let rel = (w.reconstruct() - cov.matrix()).amax() / cov.matrix().amax();
            prop_assert!(rel < 1e-8, "reconstruction {rel:e}");
            prop_assert!(is_symplectic(&w.s, 1e-9));
            prop_assert!(w.nu[0] >= w.nu[1]);
            prop_assert!((w.nu[0] - nu[0]).abs() < 1e-9 * nu[0]);
            prop_assert!((w.nu[1] - nu[1]).abs() < 1e-9 * nu[1]);
        }

        #[test]
        fn spectrum_is_symplectic_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (cov, _) = random_physical_cov(&mut rng, 0.6, 5.0);
            let s = random_symplectic(&mut rng, 0.6);
            let a = symplectic_spectrum(&cov).unwrap();
            let b = symplectic_spectrum(&cov.transformed(&s)).unwrap();
            prop_assert!((a[0] - b[0]).abs() <= 1e-10 * a[0].max(1.0));
            prop_assert!((a[1] - b[1]).abs() <= 1e-10 * a[1].max(1.0));
        }
    }
}
