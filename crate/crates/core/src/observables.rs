//! Covariant time POMs on finite truncations.
//!
//! A covariant time observable is generated by a positive operator `T0` in
//! the energy basis, `T_t = exp(-iHt) T0 exp(iHt)`, and gives the density
//! `p(t|rho) = tr[rho T_t]`. Validity requires unit diagonal blocks:
//! `<E,d|T0|E,d'> = delta_{dd'}`. The canonical choice couples every pair of
//! levels with weight one along each degeneracy index.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::apfun::APFunction;
use crate::canonical::StateVector;
use crate::error::{invalid, Error, Result};
use crate::spectrum::Spectrum;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity of asserted-Hermitian matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Most negative eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

/// Tolerance on the unit-diagonal-block constraint.
pub const DIAGONAL_TOL: f64 = 1e-10;

/// Eigenvalues of `N(X)` below this span its numerical null space.
pub const NULL_EPS: f64 = 1e-10;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A dense matrix in the `(level, degeneracy)` energy basis of a spectrum.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    spectrum: Arc<Spectrum>,
    matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn new(spectrum: Arc<Spectrum>, matrix: CMatrix) -> Result<Self> {
        let n = spectrum.dimension();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(OperatorMatrix { spectrum, matrix })
    }

    pub fn identity(spectrum: Arc<Spectrum>) -> Self {
        let n = spectrum.dimension();
        OperatorMatrix {
            spectrum,
            matrix: CMatrix::identity(n, n),
        }
    }

    /// `|psi><psi|`.
    pub fn pure_state(psi: &StateVector) -> Self {
        let v = DVector::from_column_slice(psi.amplitudes());
        OperatorMatrix {
            spectrum: psi.spectrum().clone(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Random full-rank density matrix `B B^dagger / tr` with Gaussian `B`.
    pub fn random_density<R: Rng + ?Sized>(spectrum: Arc<Spectrum>, rng: &mut R) -> Self {
        let n = spectrum.dimension();
        let b = random_gaussian(n, n, rng);
        let mut rho = &b * b.adjoint();
        let tr = rho.trace();
        rho /= tr;
        OperatorMatrix { spectrum, matrix: rho }
    }

    pub fn spectrum(&self) -> &Arc<Spectrum> {
        &self.spectrum
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |A - A^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Hermitian part, used before eigendecompositions.
fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// A validated covariant time POM.
#[derive(Clone, Debug)]
pub struct TimePOM {
    t0: OperatorMatrix,
    gamma: f64,
}

/// Check `T0 >= 0` and `<E,d|T0|E,d'> = delta_{dd'}`.
pub fn validate_t0(t0: OperatorMatrix) -> Result<TimePOM> {
    let s = t0.spectrum.clone();
    let m = &t0.matrix;
    let dev = t0.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotPositive(format!("matrix is not Hermitian (deviation {dev:e})")));
    }
    for level in 0..s.level_count() {
        let deg = s.degeneracy(level);
        for d in 0..deg {
            for dp in 0..deg {
                let v = m[(s.index(level, d), s.index(level, dp))];
                let target = if d == dp { 1.0 } else { 0.0 };
                if (v - target).norm() > DIAGONAL_TOL {
                    return Err(Error::DiagonalViolation {
                        level,
                        d,
                        d_prime: dp,
                        value: format!("{v}"),
                    });
                }
            }
        }
    }
    let min = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(Error::NotPositive(format!("minimum eigenvalue {min:e}")));
    }
    Ok(TimePOM { t0, gamma: 1.0 })
}

/// The canonical `T0`: entry 1 between `|E,d>` and `|E',d>` whenever both exist.
pub fn canonical_t0(spectrum: Arc<Spectrum>) -> TimePOM {
    let n = spectrum.dimension();
    let m = CMatrix::from_fn(n, n, |a, b| {
        if spectrum.level_of(a).1 == spectrum.level_of(b).1 {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    TimePOM {
        t0: OperatorMatrix { spectrum, matrix: m },
        gamma: 1.0,
    }
}

/// Random valid `T0`: a Gram matrix of Gaussian vectors of the given rank,
/// normalised by its diagonal blocks, `D^{-1/2} G D^{-1/2}`.
pub fn random_t0<R: Rng + ?Sized>(spectrum: Arc<Spectrum>, rank: usize, rng: &mut R) -> Result<TimePOM> {
    let n = spectrum.dimension();
    let max_deg = spectrum.levels().iter().map(|l| l.degeneracy).max().unwrap_or(1);
    if rank < max_deg {
        return Err(invalid(format!("rank must be at least the largest degeneracy {max_deg}")));
    }
    let b = random_gaussian(n, rank, rng);
    let g = &b * b.adjoint();
    let mut scale = CMatrix::zeros(n, n);
    for level in 0..spectrum.level_count() {
        let start = spectrum.index(level, 0);
        let deg = spectrum.degeneracy(level);
        let block = hermitian_part(&g.view((start, start), (deg, deg)).into_owned());
        let eig = block.symmetric_eigen();
        let inv_sqrt = DVector::from_iterator(deg, eig.eigenvalues.iter().map(|l| c64(l.sqrt().recip(), 0.0)));
        let v = &eig.eigenvectors;
        let r = v * CMatrix::from_diagonal(&inv_sqrt) * v.adjoint();
        scale.view_mut((start, start), (deg, deg)).copy_from(&r);
    }
    let t0 = hermitian_part(&(&scale * g * &scale));
    validate_t0(OperatorMatrix::new(spectrum, t0)?)
}

impl TimePOM {
    pub fn t0(&self) -> &OperatorMatrix {
        &self.t0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn spectrum(&self) -> &Arc<Spectrum> {
        &self.t0.spectrum
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        let s = self.spectrum();
        (0..s.dimension())
            .map(|a| Complex64::from_polar(1.0, -s.frequency(s.level_of(a).0) * t))
            .collect()
    }

    /// `T_t = exp(-iHt) T0 exp(iHt)`.
    pub fn element_at(&self, t: f64) -> CMatrix {
        let ph = self.phases(t);
        let m = &self.t0.matrix;
        CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| ph[a] * m[(a, b)] * ph[b].conj())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.t0.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.t0.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// `tr[rho T_t]`.
    pub fn density_mixed(&self, rho: &OperatorMatrix, t: f64) -> Result<f64> {
        self.check_dim(rho.dim())?;
        let ph = self.phases(t);
        let m = &self.t0.matrix;
        let r = &rho.matrix;
        let mut acc = c64(0.0, 0.0);
        for a in 0..m.nrows() {
            for b in 0..m.ncols() {
                acc += r[(b, a)] * m[(a, b)] * ph[a] * ph[b].conj();
            }
        }
        Ok(acc.re)
    }

    /// `<psi|T_t|psi>`.
    pub fn density_pure(&self, psi: &StateVector, t: f64) -> Result<f64> {
        self.check_dim(psi.dimension())?;
        let ph = self.phases(t);
        let c = psi.amplitudes();
        let m = &self.t0.matrix;
        let mut acc = c64(0.0, 0.0);
        for a in 0..m.nrows() {
            for b in 0..m.ncols() {
                acc += c[a].conj() * ph[a] * m[(a, b)] * ph[b].conj() * c[b];
            }
        }
        Ok(acc.re)
    }

    /// `t -> tr[rho T_t]` as an almost-periodic function; its mean is `tr rho`.
    pub fn density_function(&self, rho: &OperatorMatrix) -> Result<APFunction> {
        self.check_dim(rho.dim())?;
        let s = self.spectrum();
        let m = &self.t0.matrix;
        let r = &rho.matrix;
        let n = m.nrows();
        let terms = (0..n).flat_map(|a| {
            (0..n).map(move |b| {
                let ka = s.key(s.level_of(a).0);
                let kb = s.key(s.level_of(b).0);
                (kb - ka, r[(b, a)] * m[(a, b)])
            })
        });
        Ok(APFunction::from_terms(s.module().clone(), terms))
    }

    /// Kraus operators of the noise channel: with `T0 = sum_m |m><m|` from the
    /// eigendecomposition, `A_m = sum_E |E,0><m_E|`, where `m_E` is the
    /// restriction of `|m>` to the level-`E` block. Without degeneracy this is
    /// the diagonal operator `A_m = sum_E conj(<E|m>) |E><E|`.
    pub fn kraus_decompose(&self) -> Result<Vec<OperatorMatrix>> {
        let s = self.spectrum();
        let eig = hermitian_part(&self.t0.matrix).symmetric_eigen();
        let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let n = s.dimension();
        let mut out = Vec::new();
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -PSD_TOL {
                return Err(Error::NotPositive(format!("eigenvalue {lambda:e}")));
            }
            if lambda <= 1e-14 * max.max(1.0) {
                continue;
            }
            let m = eig.eigenvectors.column(i) * c64(lambda.sqrt() * self.gamma.sqrt(), 0.0);
            let mut a = CMatrix::zeros(n, n);
            for row in 0..n {
                let (level, _) = s.level_of(row);
                a[(s.index(level, 0), row)] = m[row].conj();
            }
            out.push(OperatorMatrix {
                spectrum: s.clone(),
                matrix: a,
            });
        }
        Ok(out)
    }
}

/// `phi(rho) = sum_m A_m rho A_m^dagger`.
pub fn channel_apply(kraus: &[OperatorMatrix], rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for a in kraus {
        if a.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.dim(),
            });
        }
        out += &a.matrix * &rho.matrix * a.matrix.adjoint();
    }
    Ok(OperatorMatrix {
        spectrum: rho.spectrum.clone(),
        matrix: out,
    })
}

/// `max |sum_m A_m^dagger A_m - 1|`.
pub fn kraus_completeness_deviation(kraus: &[OperatorMatrix]) -> f64 {
    let Some(first) = kraus.first() else { return f64::INFINITY };
    let n = first.dim();
    let mut sum = CMatrix::zeros(n, n);
    for a in kraus {
        sum += a.matrix.adjoint() * &a.matrix;
    }
    max_abs(&(sum - CMatrix::identity(n, n)))
}

/// The finite-horizon approximation to the canonical POM built from
/// `N(X) = X^{-1} int_0^X |t><t| dt`.
#[derive(Clone, Debug)]
pub struct PomLimit {
    spectrum: Arc<Spectrum>,
    horizon: f64,
    n: CMatrix,
    inv_sqrt: CMatrix,
    p0: CMatrix,
}

/// Closed-form `N(X)`, its inverse square root on the support, and the null
/// projector `P0` (eigenvalues below [`NULL_EPS`]).
pub fn normalisation_operator(spectrum: Arc<Spectrum>, horizon: f64) -> Result<PomLimit> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon must be positive"));
    }
    if spectrum.is_degenerate() {
        return Err(invalid("normalisation operator needs a nondegenerate spectrum"));
    }
    let k = spectrum.level_count();
    let n = CMatrix::from_fn(k, k, |j, l| {
        if j == l {
            return c64(1.0, 0.0);
        }
        let w = spectrum.frequency(l) - spectrum.frequency(j);
        (Complex64::from_polar(1.0, w * horizon) - 1.0) / c64(0.0, w * horizon)
    });
    let eig = hermitian_part(&n).symmetric_eigen();
    let v = &eig.eigenvectors;
    let inv = DVector::from_iterator(
        k,
        eig.eigenvalues
            .iter()
            .map(|&l| if l < NULL_EPS { c64(0.0, 0.0) } else { c64(l.sqrt().recip(), 0.0) }),
    );
    let null = DVector::from_iterator(
        k,
        eig.eigenvalues
            .iter()
            .map(|&l| if l < NULL_EPS { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
    );
    let inv_sqrt = v * CMatrix::from_diagonal(&inv) * v.adjoint();
    let p0 = v * CMatrix::from_diagonal(&null) * v.adjoint();
    Ok(PomLimit {
        spectrum,
        horizon,
        n,
        inv_sqrt,
        p0,
    })
}

impl PomLimit {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n(&self) -> &CMatrix {
        &self.n
    }

    pub fn p0(&self) -> &CMatrix {
        &self.p0
    }

    /// `max |N(X) - 1|`.
    pub fn identity_deviation(&self) -> f64 {
        let k = self.n.nrows();
        max_abs(&(&self.n - CMatrix::identity(k, k)))
    }

    /// `|t> = sum_E exp(-iEt) |E>`.
    fn time_ket(&self, t: f64) -> DVector<Complex64> {
        let s = &self.spectrum;
        DVector::from_iterator(s.level_count(), (0..s.level_count()).map(|j| Complex64::from_polar(1.0, -s.frequency(j) * t)))
    }

    /// `M_t(X) = X^{-1} N^{-1/2} |t><t| N^{-1/2}`, so that
    /// `int_0^X M_t dt + P0 = 1`.
    pub fn m_t(&self, t: f64) -> CMatrix {
        let v = &self.inv_sqrt * self.time_ket(t);
        (&v * v.adjoint()) / c64(self.horizon, 0.0)
    }

    /// `<f>_X = X^{-1} int_0^X f(t) |<t|N^{-1/2}|psi>|^2 dt + <psi|P0|psi>`,
    /// evaluated exactly for an almost-periodic `f` over the spectrum's module.
    pub fn expectation(&self, psi: &StateVector, f: &APFunction) -> Result<Complex64> {
        if psi.dimension() != self.n.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.n.nrows(),
                found: psi.dimension(),
            });
        }
        let c = DVector::from_column_slice(psi.amplitudes());
        let phi = &self.inv_sqrt * &c;
        let s = &self.spectrum;
        let g = APFunction::from_terms(s.module().clone(), (0..s.level_count()).map(|j| (s.key(j).clone(), phi[j])));
        let weight = g.conjugate().multiply(&g)?.multiply(f)?;
        let null = (c.adjoint() * &self.p0 * &c)[(0, 0)];
        Ok(weight.finite_mean(self.horizon) + null)
    }
}

/// Diagnostic of the Hermitian operator `G = i hbar sum_{j != k} |E_j><E_k| / (E_j - E_k)`.
#[derive(Clone, Debug, Serialize)]
pub struct GalaponReport {
    #[serde(skip)]
    pub g: CMatrix,
    pub hermitian_deviation: f64,
    /// `<E_k|[H,G]|E_k>` for each level.
    pub commutator_diagonal: Vec<Complex64>,
    /// `||[H,G]|E_k>||` for each level (zero would be needed for `[H,G]|E_k> = 0`).
    pub commutator_on_eigenstates: Vec<f64>,
    /// `(tau, <G>_tau)` along the evolution.
    pub expectation_trace: Vec<(f64, f64)>,
    /// `max_tau |<G>_tau - <G>_0 - tau|`.
    pub covariance_deviation: f64,
    /// `s` in `[H,G] phi = s i hbar phi` on states with `sum_j c_j = 0`.
    pub commutator_sign: f64,
    /// `max ||[H,G] phi - s i hbar phi||` over sampled unit states with `sum_j c_j = 0`.
    pub commutator_residual: f64,
}

pub fn galapon_operator(spectrum: &Spectrum) -> Result<CMatrix> {
    if spectrum.is_degenerate() {
        return Err(invalid("the operator is defined for nondegenerate spectra"));
    }
    let n = spectrum.level_count();
    let hbar = spectrum.hbar();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        if j == k {
            c64(0.0, 0.0)
        } else {
            c64(0.0, hbar / (spectrum.energy(j) - spectrum.energy(k)))
        }
    }))
}

pub fn galapon_diagnostic<R: Rng + ?Sized>(
    psi: &StateVector,
    taus: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<GalaponReport> {
    let s = psi.spectrum();
    let n = s.level_count();
    if n < 2 {
        return Err(invalid("need at least two levels"));
    }
    let g = galapon_operator(s)?;
    let hbar = s.hbar();
    let h = CMatrix::from_diagonal(&DVector::from_iterator(n, (0..n).map(|j| c64(s.energy(j), 0.0))));
    let comm = &h * &g - &g * &h;

    let commutator_diagonal = (0..n).map(|k| comm[(k, k)]).collect();
    let commutator_on_eigenstates = (0..n).map(|k| comm.column(k).norm()).collect();

    let expect = |tau: f64| -> f64 {
        let evolved = psi.evolve(tau);
        let c = DVector::from_column_slice(evolved.amplitudes());
        (c.adjoint() * &g * &c)[(0, 0)].re
    };
    let g0 = expect(0.0);
    let expectation_trace: Vec<(f64, f64)> = taus.iter().map(|&t| (t, expect(t))).collect();
    let covariance_deviation = expectation_trace
        .iter()
        .map(|(t, v)| (v - g0 - t).abs())
        .fold(0.0, f64::max);

    let ih = c64(0.0, hbar);
    let mut sign_acc = 0.0;
    let mut vectors = Vec::with_capacity(samples.max(1));
    for _ in 0..samples.max(1) {
        let mut phi = DVector::from_fn(n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let mean = phi.sum() / c64(n as f64, 0.0);
        phi.add_scalar_mut(-mean);
        let norm = phi.norm();
        phi /= c64(norm, 0.0);
        let v = &comm * &phi;
        sign_acc += ((phi.adjoint() * &v)[(0, 0)] / ih).re;
        vectors.push((phi, v));
    }
    let commutator_sign = if sign_acc >= 0.0 { 1.0 } else { -1.0 };
    let commutator_residual = vectors
        .iter()
        .map(|(phi, v)| (v - phi * (ih * commutator_sign)).norm())
        .fold(0.0, f64::max);

    Ok(GalaponReport {
        hermitian_deviation: max_abs(&(&g - g.adjoint())),
        g,
        commutator_diagonal,
        commutator_on_eigenstates,
        expectation_trace,
        covariance_deviation,
        commutator_sign,
        commutator_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{generate, Family, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hydrogen(n: usize) -> Arc<Spectrum> {
        Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: n }).unwrap())
    }

    fn iso(n: usize) -> Arc<Spectrum> {
        Arc::new(generate(&Family::Isotropic2 { omega: 1.0, n_max: n }).unwrap())
    }

    #[test]
    fn validate_examples() {
        let s = hydrogen(3);
        assert!(validate_t0(OperatorMatrix::identity(s.clone())).is_ok());
        let ones = CMatrix::from_element(3, 3, c64(1.0, 0.0));
        let pom = validate_t0(OperatorMatrix::new(s.clone(), ones.clone()).unwrap()).unwrap();
        assert_eq!(pom.t0().matrix(), canonical_t0(s.clone()).t0().matrix());
        let mut bad = CMatrix::identity(3, 3);
        bad[(1, 1)] = c64(0.9, 0.0);
        assert!(matches!(
            validate_t0(OperatorMatrix::new(s.clone(), bad).unwrap()),
            Err(Error::DiagonalViolation { level: 1, d: 0, d_prime: 0, .. })
        ));
        let mut neg = CMatrix::identity(3, 3);
        neg[(0, 1)] = c64(2.0, 0.0);
        neg[(1, 0)] = c64(2.0, 0.0);
        assert!(matches!(validate_t0(OperatorMatrix::new(s, neg).unwrap()), Err(Error::NotPositive(_))));
    }

    #[test]
    fn canonical_t0_examples() {
        let c = canonical_t0(hydrogen(3));
        assert!(c.t0().matrix().iter().all(|z| *z == c64(1.0, 0.0)));

        let s = iso(1);
        let c = canonical_t0(s.clone());
        let m = c.t0().matrix();
        // basis order: |0,0>, |1,0>, |1,1>
        assert_eq!(m[(0, 1)], c64(1.0, 0.0));
        assert_eq!(m[(0, 2)], c64(0.0, 0.0));
        assert_eq!(m[(1, 2)], c64(0.0, 0.0));
        assert_eq!(m[(2, 2)], c64(1.0, 0.0));
        assert!(validate_t0(c.t0().clone()).is_ok());

        let one = Arc::new(Spectrum::from_rationals(&[Rational::from_integer(0)], &[1], 1.0).unwrap());
        assert_eq!(canonical_t0(one).t0().matrix(), &CMatrix::identity(1, 1));
    }

    #[test]
    fn pom_density_examples() {
        let s = hydrogen(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = StateVector::random(s.clone(), &mut rng);
        let can = canonical_t0(s.clone());
        let id = validate_t0(OperatorMatrix::identity(s.clone())).unwrap();
        let e = StateVector::eigenstate(s.clone(), 2, 0).unwrap();
        let random = random_t0(s.clone(), 3, &mut rng).unwrap();
        for i in 0..20 {
            let t = i as f64 * 1.37;
            assert!((can.density_pure(&psi, t).unwrap() - psi.density_at(t)).abs() < 1e-10);
            assert!((id.density_pure(&psi, t).unwrap() - 1.0).abs() < 1e-12);
            assert!((random.density_pure(&e, t).unwrap() - 1.0).abs() < 1e-10);
            let rho = OperatorMatrix::pure_state(&psi);
            assert!((random.density_mixed(&rho, t).unwrap() - random.density_pure(&psi, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn every_valid_pom_has_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in [hydrogen(5), iso(2)] {
            let pom = random_t0(s.clone(), 4, &mut rng).unwrap();
            let rho = OperatorMatrix::random_density(s.clone(), &mut rng);
            let f = pom.density_function(&rho).unwrap();
            assert!((f.besicovitch_mean() - 1.0).norm() < 1e-12);
            for t in [0.0, 0.3, 7.0] {
                assert!((f.evaluate(t).re - pom.density_mixed(&rho, t).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kraus_examples() {
        let s = hydrogen(4);
        let k = canonical_t0(s.clone()).kraus_decompose().unwrap();
        assert_eq!(k.len(), 1);
        for j in 0..4 {
            assert!((k[0].matrix()[(j, j)].norm() - 1.0).abs() < 1e-12);
        }

        let s2 = hydrogen(2);
        let id = validate_t0(OperatorMatrix::identity(s2.clone())).unwrap();
        let k = id.kraus_decompose().unwrap();
        assert_eq!(k.len(), 2);
        assert!(kraus_completeness_deviation(&k) < 1e-12);
        let a = 0.5f64.sqrt();
        let plus = StateVector::from_level_amplitudes(s2, &[c64(a, 0.0), c64(a, 0.0)]).unwrap();
        let out = channel_apply(&k, &OperatorMatrix::pure_state(&plus)).unwrap();
        assert!(out.matrix()[(0, 1)].norm() < 1e-12);
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_leaves_state_unchanged() {
        let s = hydrogen(3);
        let rho = OperatorMatrix::random_density(s.clone(), &mut ChaCha8Rng::seed_from_u64(3));
        let out = channel_apply(&[OperatorMatrix::identity(s)], &rho).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn noise_equivalence_on_random_poms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in [hydrogen(5), iso(2)] {
            for rank in [3, 5] {
                let pom = random_t0(s.clone(), rank, &mut rng).unwrap();
                let can = canonical_t0(s.clone());
                let kraus = pom.kraus_decompose().unwrap();
                assert!(kraus_completeness_deviation(&kraus) < 1e-10);
                let rho = OperatorMatrix::random_density(s.clone(), &mut rng);
                let out = channel_apply(&kraus, &rho).unwrap();
                assert!((out.matrix().trace() - 1.0).norm() < 1e-10);
                for j in 0..s.level_count() {
                    let block = |m: &CMatrix| -> f64 {
                        (0..s.degeneracy(j)).map(|d| m[(s.index(j, d), s.index(j, d))].re).sum()
                    };
                    assert!((block(out.matrix()) - block(rho.matrix())).abs() < 1e-10);
                }
                for i in 0..25 {
                    let t = i as f64 * 0.9;
                    let lhs = pom.density_mixed(&rho, t).unwrap();
                    let rhs = can.density_mixed(&out, t).unwrap();
                    assert!((lhs - rhs).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn normalisation_operator_examples() {
        let s = hydrogen(4);
        let gap = s.min_gap().unwrap();
        let mut last = f64::INFINITY;
        for x in [1e2, 1e3, 1e4] {
            let lim = normalisation_operator(s.clone(), x / gap).unwrap();
            let d = lim.identity_deviation();
            assert!(d <= 2.0 / x + 1e-15);
            assert!(d < last);
            last = d;
        }
        let one = Arc::new(Spectrum::from_rationals(&[Rational::from_integer(0)], &[1], 1.0).unwrap());
        let lim = normalisation_operator(one, 3.0).unwrap();
        assert_eq!(lim.n(), &CMatrix::identity(1, 1));
        assert!(normalisation_operator(iso(1), 1.0).is_err());
    }

    #[test]
    fn pom_limit_resolves_identity() {
        let s = hydrogen(3);
        let x = 50.0;
        let lim = normalisation_operator(s.clone(), x).unwrap();
        // int_0^X M_t dt + P0 = 1 via fine Gauss-Legendre panels
        let mut acc = CMatrix::zeros(3, 3);
        let panels = 2000;
        let h = x / panels as f64;
        for p in 0..panels {
            let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
            let mid = 0.5 * (a + b);
            let d = 0.5 * h / 3f64.sqrt();
            acc += (lim.m_t(mid - d) + lim.m_t(mid + d)) * c64(0.5 * h, 0.0);
        }
        acc += lim.p0();
        assert!(max_abs(&(acc - CMatrix::identity(3, 3))) < 1e-8);
    }

    #[test]
    fn pom_limit_expectations_converge() {
        let s = hydrogen(3);
        let psi = StateVector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(5));
        let m = s.module().clone();
        let f = APFunction::from_terms(
            m.clone(),
            [
                (m.zero(), c64(1.0, 0.0)),
                (s.key(1) - s.key(0), c64(0.5, 0.0)),
                (s.key(0) - s.key(1), c64(0.5, 0.0)),
            ],
        );
        let p = psi.canonical_density().unwrap();
        let exact = p.expectation(&f).unwrap();
        let lim = normalisation_operator(s.clone(), 1e6 / s.min_gap().unwrap()).unwrap();
        assert!((lim.expectation(&psi, &f).unwrap() - exact).norm() < 1e-3);
    }

    #[test]
    fn galapon_two_level() {
        let s = Arc::new(Spectrum::from_rationals(&[Rational::from_integer(1), Rational::from_integer(2)], &[1, 1], 1.0).unwrap());
        let g = galapon_operator(&s).unwrap();
        // G = i (|E1><E0| - |E0><E1|) with E1 - E0 = 1
        assert!((g[(1, 0)] - c64(0.0, 1.0)).norm() < 1e-15);
        assert!((g[(0, 1)] - c64(0.0, -1.0)).norm() < 1e-15);
        let psi = StateVector::equal_superposition(s);
        let r = galapon_diagnostic(&psi, &[0.0, 1.0], 4, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        assert!(r.commutator_diagonal.iter().all(|z| z.norm() < 1e-15));
        assert!(r.hermitian_deviation < 1e-15);
    }

    #[test]
    fn galapon_eigenstate_expectation_is_constant() {
        let s = hydrogen(4);
        let e = StateVector::eigenstate(s.clone(), 1, 0).unwrap();
        let taus: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let r = galapon_diagnostic(&e, &taus, 1, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        for (_, v) in &r.expectation_trace {
            assert!(v.abs() < 1e-15);
        }
        assert!((r.covariance_deviation - 10.0).abs() < 1e-12);
    }

    #[test]
    fn galapon_matches_matrix_exponential() {
        let s = hydrogen(4);
        let psi = StateVector::equal_superposition(s.clone());
        let g = galapon_operator(&s).unwrap();
        let h = CMatrix::from_diagonal(&DVector::from_iterator(4, (0..4).map(|j| c64(s.energy(j), 0.0))));
        let c = DVector::from_column_slice(psi.amplitudes());
        let taus: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let r = galapon_diagnostic(&psi, &taus, 8, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        for (tau, v) in &r.expectation_trace {
            let u = (&h * c64(0.0, -*tau)).exp();
            let ct = &u * &c;
            let direct = (ct.adjoint() * &g * &ct)[(0, 0)].re;
            assert!((direct - v).abs() < 1e-10);
        }
        assert!(r.covariance_deviation > 0.1);
        assert_eq!(r.commutator_sign, -1.0);
        assert!(r.commutator_residual < 1e-10);
        for n in &r.commutator_on_eigenstates {
            assert!((n - 3f64.sqrt()).abs() < 1e-12);
        }
    }
}
