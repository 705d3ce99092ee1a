//! Covariance-matrix representation of Gaussian states and the symplectic
//! operations the key-rate computations are built from.
//!
//! States carry second moments only (no displacements): a `2N x 2N` real
//! symmetric matrix in quadrature ordering `(x1, p1, x2, p2, ...)`, shot-noise
//! units with vacuum variance 1. Physicality means every symplectic
//! eigenvalue satisfies `nu_k >= 1`.

use nalgebra::DMatrix;

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
/// Roundoff slack below the uncertainty bound `nu_k >= 1`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Which quadrature a homodyne detector measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Protocol bookkeeping names for the modes of composite states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeName {
    A,
    B,
    C,
    E1,
    E2,
    F,
    G,
}

/// A named mode position inside a multimode state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLabel {
    pub index: usize,
    pub name: ModeName,
}

/// Ordered symplectic eigenvalues `nu_k >= 1` of a covariance matrix,
/// descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    /// Von Neumann entropy in bits: `sum_k G((nu_k - 1)/2)`. Eigenvalues
    /// below 1 are clipped to 1 (roundoff from pure modes).
    pub fn entropy_bits(&self) -> f64 {
        self.values
            .iter()
            .map(|&nu| g_thermal((nu.max(1.0) - 1.0) / 2.0))
            .sum()
    }
}

/// Thermal-state entropy kernel `G(x) = (x+1) log2(x+1) - x log2 x`.
///
/// Evaluated through `ln_1p` on both branches so the result stays accurate
/// for `x` near 0 and for `x` up to ~1e15, where the textbook form loses
/// six digits to cancellation.
pub fn g_thermal(x: f64) -> f64 {
    const LN_2: f64 = std::f64::consts::LN_2;
    if x <= 1e-12 {
        0.0
    } else if x > 1.0 {
        (x + 1.0) * (1.0 / x).ln_1p() / LN_2 + x.log2()
    } else {
        (x + 1.0) * x.ln_1p() / LN_2 - x * x.log2()
    }
}

/// Covariance matrix of an `N`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wrap an explicit matrix, checking shape and symmetry.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::BadShape { rows, cols });
        }
        let mut max_asym = 0.0f64;
        for i in 0..rows {
            for j in (i + 1)..rows {
                max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_asym,
            });
        }
        Ok(Self { n_modes: rows / 2, m })
    }

    /// `N` vacuum modes (identity matrix).
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            m: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Single thermal mode of the given quadrature variance.
    pub fn thermal(variance: f64) -> Result<Self> {
        if !(variance >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "variance",
                value: variance,
                constraint: "variance >= 1",
            });
        }
        Ok(Self {
            n_modes: 1,
            m: DMatrix::identity(2, 2) * variance,
        })
    }

    /// Two-mode squeezed vacuum with local variance `variance` on each arm.
    ///
    /// Diagonal blocks `V*I`, off-diagonal blocks `sqrt(V^2-1)*diag(1,-1)`;
    /// the state is pure for any `variance >= 1`.
    pub fn epr_source(variance: f64) -> Result<Self> {
        if !(variance >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "variance",
                value: variance,
                constraint: "variance >= 1",
            });
        }
        let c = (variance * variance - 1.0).sqrt();
        let mut m = DMatrix::zeros(4, 4);
        for q in 0..2 {
            m[(q, q)] = variance;
            m[(2 + q, 2 + q)] = variance;
        }
        m[(0, 2)] = c;
        m[(2, 0)] = c;
        m[(1, 3)] = -c;
        m[(3, 1)] = -c;
        Ok(Self { n_modes: 2, m })
    }

    /// Direct sum of uncorrelated subsystems; mode ordering is input order.
    pub fn compose(states: &[CovarianceMatrix]) -> CovarianceMatrix {
        let n: usize = states.iter().map(|s| s.n_modes).sum();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        let mut at = 0;
        for s in states {
            let d = 2 * s.n_modes;
            m.view_mut((at, at), (d, d)).copy_from(&s.m);
            at += d;
        }
        CovarianceMatrix { n_modes: n, m }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    /// Variance of one quadrature of one mode.
    pub fn mode_variance(&self, mode: usize, quad: Quadrature) -> f64 {
        let i = 2 * mode + quad.offset();
        self.m[(i, i)]
    }

    /// Covariance between a quadrature of two modes.
    pub fn correlation(&self, mode_a: usize, mode_b: usize, quad: Quadrature) -> f64 {
        let i = 2 * mode_a + quad.offset();
        let j = 2 * mode_b + quad.offset();
        self.m[(i, j)]
    }

    /// Keep only the listed modes (partial trace over the rest).
    pub fn keep_modes(&self, modes: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(2 * modes.len());
        for &k in modes {
            self.check_mode(k)?;
            rows.push(2 * k);
            rows.push(2 * k + 1);
        }
        let d = rows.len();
        let mut m = DMatrix::zeros(d, d);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                m[(a, b)] = self.m[(i, j)];
            }
        }
        Ok(Self {
            n_modes: modes.len(),
            m,
        })
    }

    /// Mix modes `i` and `j` on a beam splitter of the given transmittance.
    ///
    /// Acts as `(x_i, x_j) -> (sqrt(T) x_i + sqrt(1-T) x_j,
    /// -sqrt(1-T) x_i + sqrt(T) x_j)` and identically on `p`. The reflected
    /// arm takes the minus sign; all derived quantities depend on squared
    /// correlations only, so the phase choice is immaterial.
    pub fn beam_splitter(&self, i: usize, j: usize, transmittance: f64) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::DistinctModesRequired);
        }
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::InvalidParameter {
                name: "transmittance",
                value: transmittance,
                constraint: "0 <= T <= 1",
            });
        }
        let t = transmittance.sqrt();
        let r = (1.0 - transmittance).sqrt();
        let d = 2 * self.n_modes;
        let mut s = DMatrix::identity(d, d);
        for q in 0..2 {
            s[(2 * i + q, 2 * i + q)] = t;
            s[(2 * i + q, 2 * j + q)] = r;
            s[(2 * j + q, 2 * i + q)] = -r;
            s[(2 * j + q, 2 * j + q)] = t;
        }
        let m = &s * &self.m * s.transpose();
        Ok(Self {
            n_modes: self.n_modes,
            m: symmetrize(m),
        })
    }

    /// Thermal-loss channel on one mode: transmittivity `eta`, excess noise
    /// `eps` referred to the channel output as `eta * eps`.
    ///
    /// The mode's diagonal block is scaled by `eta` (cross-correlations by
    /// `sqrt(eta)`) and `(1 - eta + eta*eps) * I` is added, reproducing
    /// `V -> eta*V + 1 - eta + eta*eps`.
    pub fn loss_channel(&self, mode: usize, eta: f64, eps: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                constraint: "0 < eta <= 1",
            });
        }
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                constraint: "eps >= 0",
            });
        }
        let mut m = self.m.clone();
        let se = eta.sqrt();
        let d = 2 * self.n_modes;
        for q in 0..2 {
            let i = 2 * mode + q;
            for j in 0..d {
                if j / 2 != mode {
                    m[(i, j)] *= se;
                    m[(j, i)] *= se;
                }
            }
        }
        for q in 0..2 {
            let i = 2 * mode + q;
            for q2 in 0..2 {
                let j = 2 * mode + q2;
                m[(i, j)] *= eta;
            }
            m[(i, i)] += 1.0 - eta + eta * eps;
        }
        Ok(Self {
            n_modes: self.n_modes,
            m,
        })
    }

    /// Add phase-insensitive noise `noise * I` to one mode.
    pub fn add_noise(&self, mode: usize, noise: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(noise >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "noise",
                value: noise,
                constraint: "noise >= 0",
            });
        }
        let mut m = self.m.clone();
        for q in 0..2 {
            let i = 2 * mode + q;
            m[(i, i)] += noise;
        }
        Ok(Self {
            n_modes: self.n_modes,
            m,
        })
    }

    /// Symplectic eigenvalues: the moduli of the eigenvalues of `i*Omega*gamma`,
    /// each doubly degenerate, reported once each in descending order.
    pub fn symplectic_eigenvalues(&self) -> SymplecticSpectrum {
        let d = 2 * self.n_modes;
        let mut om_g = DMatrix::zeros(d, d);
        // Omega * gamma: row 2k is gamma row 2k+1, row 2k+1 is -gamma row 2k.
        for k in 0..self.n_modes {
            for j in 0..d {
                om_g[(2 * k, j)] = self.m[(2 * k + 1, j)];
                om_g[(2 * k + 1, j)] = -self.m[(2 * k, j)];
            }
        }
        let eig = om_g.complex_eigenvalues();
        let mut mods: Vec<f64> = eig.iter().map(|c| c.norm()).collect();
        mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Pairs (+i nu, -i nu) are adjacent after sorting; geometric mean
        // symmetrizes the roundoff between the two copies.
        let values = mods
            .chunks_exact(2)
            .map(|p| (p[0] * p[1]).sqrt())
            .collect();
        SymplecticSpectrum { values }
    }

    /// Smallest symplectic eigenvalue.
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues().min()
    }

    /// Uncertainty-principle check: `min_k nu_k >= 1 - tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_symplectic_eigenvalue() >= 1.0 - tol
    }

    /// Von Neumann entropy in bits; 0 iff the state is pure.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.symplectic_eigenvalues().entropy_bits()
    }

    /// Covariance of the remaining modes after a perfect homodyne detection
    /// of one quadrature of `measured_mode`.
    ///
    /// Implements `gamma' = gamma_rest - sigma (X gamma X)^MP sigma^T` where
    /// the Moore-Penrose inverse of the rank-one measured block is
    /// `diag(1/v, 0)` for measured variance `v` (mirrored between x and p).
    pub fn homodyne_condition(&self, measured_mode: usize, quad: Quadrature) -> Result<Self> {
        self.check_mode(measured_mode)?;
        if self.n_modes < 2 {
            return Err(Error::ModeOutOfRange {
                mode: measured_mode,
                n_modes: self.n_modes,
            });
        }
        let mi = 2 * measured_mode + quad.offset();
        let v = self.m[(mi, mi)];
        if v <= 1e-300 {
            return Err(Error::DegenerateMeasurement { variance: v });
        }
        let keep: Vec<usize> = (0..2 * self.n_modes)
            .filter(|r| r / 2 != measured_mode)
            .collect();
        let d = keep.len();
        let mut m = DMatrix::zeros(d, d);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m[(a, b)] = self.m[(i, j)] - self.m[(i, mi)] * self.m[(j, mi)] / v;
            }
        }
        Ok(Self {
            n_modes: self.n_modes - 1,
            m,
        })
    }

    /// Conditional variance `V_t - C^2 / V_m` of one quadrature of
    /// `target_mode` after homodyning the same quadrature of `measured_mode`.
    pub fn conditional_variance(
        &self,
        target_mode: usize,
        measured_mode: usize,
        quad: Quadrature,
    ) -> Result<f64> {
        self.check_mode(target_mode)?;
        self.check_mode(measured_mode)?;
        if target_mode == measured_mode {
            return Err(Error::DistinctModesRequired);
        }
        let ti = 2 * target_mode + quad.offset();
        let mi = 2 * measured_mode + quad.offset();
        let v = self.m[(mi, mi)];
        if v <= 1e-300 {
            return Err(Error::DegenerateMeasurement { variance: v });
        }
        Ok(self.m[(ti, ti)] - self.m[(ti, mi)] * self.m[(ti, mi)] / v)
    }
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn epr_unit_variance_is_two_vacua() {
        let g = CovarianceMatrix::epr_source(1.0).unwrap();
        assert_eq!(g.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn epr_two_blocks() {
        let g = CovarianceMatrix::epr_source(2.0).unwrap();
        let c = 3.0f64.sqrt();
        assert_close(g.mode_variance(0, Quadrature::X), 2.0, 1e-15);
        assert_close(g.mode_variance(1, Quadrature::P), 2.0, 1e-15);
        assert_close(g.correlation(0, 1, Quadrature::X), c, 1e-15);
        assert_close(g.correlation(0, 1, Quadrature::P), -c, 1e-15);
        let nu = g.symplectic_eigenvalues();
        assert_close(nu.values()[0], 1.0, 1e-12);
        assert_close(nu.values()[1], 1.0, 1e-12);
    }

    #[test]
    fn epr_marginal_is_thermal() {
        let g = CovarianceMatrix::epr_source(20.0).unwrap();
        assert_close(g.mode_variance(0, Quadrature::X), 20.0, 1e-12);
        assert_close(g.mode_variance(1, Quadrature::X), 20.0, 1e-12);
        // purity
        assert!(g.von_neumann_entropy() < 1e-9);
    }

    #[test]
    fn epr_rejects_subunit_variance() {
        assert!(CovarianceMatrix::epr_source(0.5).is_err());
    }

    #[test]
    fn compose_vacua_is_identity() {
        let g = CovarianceMatrix::compose(&[
            CovarianceMatrix::vacuum(1),
            CovarianceMatrix::vacuum(1),
        ]);
        assert_eq!(g.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn compose_single_input_is_identity_map() {
        let e = CovarianceMatrix::epr_source(2.0).unwrap();
        let g = CovarianceMatrix::compose(std::slice::from_ref(&e));
        assert_eq!(g.matrix(), e.matrix());
    }

    #[test]
    fn compose_has_zero_cross_blocks() {
        let g = CovarianceMatrix::compose(&[
            CovarianceMatrix::epr_source(2.0).unwrap(),
            CovarianceMatrix::vacuum(1),
        ]);
        assert_eq!(g.n_modes(), 3);
        for q in 0..2 {
            assert_eq!(g.matrix()[(q, 4)], 0.0);
            assert_eq!(g.matrix()[(2 + q, 4 + q)], 0.0);
        }
    }

    #[test]
    fn beam_splitter_full_transmission_is_identity() {
        let g = CovarianceMatrix::epr_source(3.0).unwrap();
        let out = g.beam_splitter(0, 1, 1.0).unwrap();
        let diff = (out.matrix() - g.matrix()).abs().max();
        assert!(diff < 1e-14);
    }

    #[test]
    fn beam_splitter_full_reflection_swaps_modes() {
        let g = CovarianceMatrix::compose(&[
            CovarianceMatrix::thermal(5.0).unwrap(),
            CovarianceMatrix::vacuum(1),
        ]);
        let out = g.beam_splitter(0, 1, 0.0).unwrap();
        assert_close(out.mode_variance(0, Quadrature::X), 1.0, 1e-14);
        assert_close(out.mode_variance(1, Quadrature::X), 5.0, 1e-14);
    }

    #[test]
    fn beam_splitter_mixes_epr_with_vacuum() {
        let g = CovarianceMatrix::compose(&[
            CovarianceMatrix::epr_source(2.0).unwrap(),
            CovarianceMatrix::vacuum(1),
        ]);
        let out = g.beam_splitter(0, 2, 0.5).unwrap();
        assert_close(out.mode_variance(0, Quadrature::X), 1.5, 1e-14);
    }

    #[test]
    fn beam_splitter_same_mode_rejected() {
        let g = CovarianceMatrix::vacuum(2);
        assert!(matches!(
            g.beam_splitter(1, 1, 0.5),
            Err(Error::DistinctModesRequired)
        ));
    }

    #[test]
    fn loss_identity_at_unit_transmittivity() {
        let g = CovarianceMatrix::epr_source(4.0).unwrap();
        let out = g.loss_channel(1, 1.0, 0.0).unwrap();
        let diff = (out.matrix() - g.matrix()).abs().max();
        assert!(diff < 1e-15);
    }

    #[test]
    fn loss_thermal_examples() {
        let g = CovarianceMatrix::thermal(21.0).unwrap();
        let out = g.loss_channel(0, 0.01, 0.0).unwrap();
        assert_close(out.mode_variance(0, Quadrature::X), 1.2, 1e-12);

        let g = CovarianceMatrix::thermal(10.0).unwrap();
        let out = g.loss_channel(0, 0.1, 0.5).unwrap();
        assert_close(out.mode_variance(0, Quadrature::X), 1.95, 1e-12);
    }

    #[test]
    fn add_noise_examples() {
        let g = CovarianceMatrix::vacuum(1);
        let out = g.add_noise(0, 0.33).unwrap();
        assert_close(out.mode_variance(0, Quadrature::X), 1.33, 1e-15);
        let out0 = g.add_noise(0, 0.0).unwrap();
        assert_eq!(out0.matrix(), g.matrix());
        let t = CovarianceMatrix::thermal(20.0).unwrap().add_noise(0, 1.0).unwrap();
        assert_close(t.mode_variance(0, Quadrature::P), 21.0, 1e-15);
    }

    #[test]
    fn symplectic_spectrum_examples() {
        let vac = CovarianceMatrix::vacuum(3);
        for &nu in vac.symplectic_eigenvalues().values() {
            assert_close(nu, 1.0, 1e-12);
        }
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 4.5;
        let g = CovarianceMatrix::from_matrix(m).unwrap();
        assert_close(g.symplectic_eigenvalues().values()[0], 3.0, 1e-12);
    }

    #[test]
    fn symplectic_spectrum_after_loss() {
        // frozen: EPR(20) with loss_channel(eta=0.3, eps=0.2) on mode B
        let g = CovarianceMatrix::epr_source(20.0)
            .unwrap()
            .loss_channel(1, 0.3, 0.2)
            .unwrap();
        let nu = g.symplectic_eigenvalues();
        assert_close(nu.values()[0], 14.32223344, 1e-7);
        assert_close(nu.values()[1], 1.08223344, 1e-7);
        assert_close(g.von_neumann_entropy(), 4.531534484039, 1e-9);
    }

    #[test]
    fn entropy_examples() {
        assert_close(g_thermal(1.0), 2.0, 1e-15);
        assert_close(g_thermal(0.5), 1.377443751082, 1e-12);
        assert_close(g_thermal(5e8), 30.340047896318, 1e-9);
        assert_eq!(g_thermal(0.0), 0.0);
        let t3 = CovarianceMatrix::thermal(3.0).unwrap();
        assert_close(t3.von_neumann_entropy(), 2.0, 1e-12);
        let t2 = CovarianceMatrix::thermal(2.0).unwrap();
        assert_close(t2.von_neumann_entropy(), 1.377443751082, 1e-12);
        // pure states have zero entropy
        let e = CovarianceMatrix::epr_source(5.0).unwrap();
        assert!(e.von_neumann_entropy() < 1e-10);
    }

    #[test]
    fn entropy_additive_over_compose() {
        let a = CovarianceMatrix::thermal(3.0).unwrap();
        let b = CovarianceMatrix::epr_source(2.0)
            .unwrap()
            .loss_channel(0, 0.4, 0.1)
            .unwrap();
        let joint = CovarianceMatrix::compose(&[a.clone(), b.clone()]);
        assert_close(
            joint.von_neumann_entropy(),
            a.von_neumann_entropy() + b.von_neumann_entropy(),
            1e-9,
        );
    }

    #[test]
    fn homodyne_epr_example() {
        let g = CovarianceMatrix::epr_source(2.0).unwrap();
        let cond = g.homodyne_condition(1, Quadrature::X).unwrap();
        assert_close(cond.mode_variance(0, Quadrature::X), 0.5, 1e-14);
        assert_close(cond.mode_variance(0, Quadrature::P), 2.0, 1e-14);
    }

    #[test]
    fn homodyne_conditional_variance_is_inverse_v() {
        for &v in &[1.0, 2.0, 10.0, 100.0] {
            let g = CovarianceMatrix::epr_source(v).unwrap();
            let cond = g.homodyne_condition(1, Quadrature::X).unwrap();
            assert_close(cond.mode_variance(0, Quadrature::X), 1.0 / v, 1e-12);
        }
    }

    #[test]
    fn homodyne_uncorrelated_mode_leaves_rest_unchanged() {
        let g = CovarianceMatrix::compose(&[
            CovarianceMatrix::epr_source(3.0).unwrap(),
            CovarianceMatrix::thermal(7.0).unwrap(),
        ]);
        let cond = g.homodyne_condition(2, Quadrature::X).unwrap();
        let orig = CovarianceMatrix::epr_source(3.0).unwrap();
        let diff = (cond.matrix() - orig.matrix()).abs().max();
        assert!(diff < 1e-14);
    }

    #[test]
    fn conditional_variance_matches_homodyne_entry() {
        let g = CovarianceMatrix::epr_source(2.0).unwrap();
        let cv = g.conditional_variance(0, 1, Quadrature::X).unwrap();
        assert_close(cv, 0.5, 1e-14);
        let cv_uncorr = CovarianceMatrix::compose(&[
            CovarianceMatrix::thermal(4.0).unwrap(),
            CovarianceMatrix::thermal(6.0).unwrap(),
        ])
        .conditional_variance(0, 1, Quadrature::P)
        .unwrap();
        assert_close(cv_uncorr, 4.0, 1e-14);
    }

    #[test]
    fn keep_modes_of_compose_recovers_parts() {
        let a = CovarianceMatrix::epr_source(2.5).unwrap();
        let b = CovarianceMatrix::thermal(4.0).unwrap();
        let joint = CovarianceMatrix::compose(&[a.clone(), b.clone()]);
        let back = joint.keep_modes(&[0, 1]).unwrap();
        assert_eq!(back.matrix(), a.matrix());
        let swapped = joint.keep_modes(&[2]).unwrap();
        assert_eq!(swapped.matrix(), b.matrix());
    }

    #[test]
    fn from_matrix_rejects_asymmetry() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 1e-6;
        assert!(matches!(
            CovarianceMatrix::from_matrix(m),
            Err(Error::NotSymmetric { .. })
        ));
    }
}
