//! Input states: the ancilla qubit and probe density matrices in spectral form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_algebra::{eigenbasis, EnsembleDim, Operator, PhaseGenerator};

/// Probe eigenvalues at or below this weight are dropped.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

const SUM_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-10;

/// The ancillary qubit `cos(theta0/2)|e> + e^{-i phi0} sin(theta0/2)|g>`,
/// optionally passed through the dephasing channel.
#[derive(Debug, Clone)]
pub struct AncillaState {
    theta0: f64,
    phi0: f64,
    dephasing: f64,
    rho: Operator,
}

impl AncillaState {
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Dephasing rate `x` in `[0, 1]`; zero for a pure state.
    pub fn dephasing(&self) -> f64 {
        self.dephasing
    }

    pub fn is_pure(&self) -> bool {
        self.dephasing == 0.0
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    /// State vector of the undephased ancilla.
    pub fn ket(&self) -> DVector<Complex64> {
        ancilla_ket(self.theta0, self.phi0)
    }

    /// `<sigma_z>` on this state.
    pub fn sigma_z_expectation(&self) -> f64 {
        let m = self.rho.matrix();
        (m[(0, 0)] - m[(1, 1)]).re
    }
}

fn ancilla_ket(theta0: f64, phi0: f64) -> DVector<Complex64> {
    DVector::from_vec(vec![
        Complex64::new((theta0 / 2.0).cos(), 0.0),
        Complex64::from_polar((theta0 / 2.0).sin(), -phi0),
    ])
}

/// Pure ancilla with population-imbalance angle `theta0` and relative phase `phi0`.
pub fn ancilla_state(theta0: f64, phi0: f64) -> AncillaState {
    let ket = ancilla_ket(theta0, phi0);
    AncillaState {
        theta0,
        phi0,
        dephasing: 0.0,
        rho: Operator::projector(&ket),
    }
}

/// Applies the dephasing channel with Kraus operators
/// `K1 = sqrt(1 - x/2) I`, `K2 = sqrt(x/2) sigma_z`.
///
/// Rates compose: dephasing by `x` then `y` gives total coherence factor
/// `(1 - x)(1 - y)`, recorded as the equivalent single rate.
pub fn dephase_ancilla(a: &AncillaState, x: f64) -> Result<AncillaState> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "dephasing rate x",
            value: x,
            range: "[0, 1]",
        });
    }
    let k1 = Operator::identity(2).scale((1.0 - x / 2.0).sqrt());
    let k2 = Operator::sigma_z().scale((x / 2.0).sqrt());
    let rho = a.rho();
    let out = &(&(&k1 * rho) * &k1.adjoint()) + &(&(&k2 * rho) * &k2.adjoint());
    let coherence = (1.0 - a.dephasing) * (1.0 - x);
    Ok(AncillaState {
        theta0: a.theta0,
        phi0: a.phi0,
        dephasing: 1.0 - coherence,
        rho: out.tag_hermitian(),
    })
}

/// A probe density matrix `sum_i p_i |psi_i><psi_i|` in spectral form.
#[derive(Debug, Clone)]
pub struct SpectralProbe {
    dim: EnsembleDim,
    terms: Vec<(f64, DVector<Complex64>)>,
}

impl SpectralProbe {
    /// Builds a probe from weighted orthonormal vectors.
    ///
    /// Terms with weight at or below [`SPECTRAL_CUTOFF`] are dropped and the
    /// remaining weights renormalized.
    pub fn new(dim: EnsembleDim, terms: Vec<(f64, DVector<Complex64>)>) -> Result<Self> {
        for (_, v) in &terms {
            if v.len() != dim.dim() {
                return Err(Error::DimensionMismatch {
                    expected: dim.dim(),
                    found: v.len(),
                });
            }
        }
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbe(format!("weights sum to {total}, not 1")));
        }
        if let Some((p, _)) = terms.iter().find(|(p, _)| *p < -SPECTRAL_CUTOFF) {
            return Err(Error::InvalidProbe(format!("negative weight {p}")));
        }
        let kept: Vec<_> = terms.into_iter().filter(|(p, _)| *p > SPECTRAL_CUTOFF).collect();
        let kept_total: f64 = kept.iter().map(|(p, _)| p).sum();
        let terms: Vec<_> = kept.into_iter().map(|(p, v)| (p / kept_total, v)).collect();

        for (a, (_, u)) in terms.iter().enumerate() {
            for (b, (_, v)) in terms.iter().enumerate().skip(a) {
                let overlap = u.dotc(v);
                let expected = if a == b { 1.0 } else { 0.0 };
                if (overlap - Complex64::new(expected, 0.0)).norm() > ORTHO_TOL {
                    return Err(Error::InvalidProbe(format!(
                        "vectors {a} and {b} are not orthonormal (overlap {overlap})"
                    )));
                }
            }
        }
        Ok(Self { dim, terms })
    }

    /// A single pure state.
    pub fn pure(dim: EnsembleDim, psi: DVector<Complex64>) -> Result<Self> {
        Self::new(dim, vec![(1.0, psi)])
    }

    pub fn dim(&self) -> EnsembleDim {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, DVector<Complex64>)] {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Reassembles the density matrix.
    pub fn density(&self) -> Operator {
        let n = self.dim.dim();
        let mut rho = DMatrix::<Complex64>::zeros(n, n);
        for (p, v) in &self.terms {
            rho += (v * Complex64::new(*p, 0.0)) * v.adjoint();
        }
        Operator::new(rho).tag_hermitian()
    }
}

fn check_generator(dim: EnsembleDim, generator: &PhaseGenerator) -> Result<()> {
    if generator.dim() != dim.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim.dim(),
            found: generator.dim(),
        });
    }
    Ok(())
}

const DEGENERACY_TOL: f64 = 1e-8;

fn extremal_vectors(
    dim: EnsembleDim,
    generator: &PhaseGenerator,
) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
    check_generator(dim, generator)?;
    let pairs = eigenbasis(generator.matrix())?;
    let n = pairs.len();
    if n < 2 {
        return Ok((pairs[0].vector.clone(), pairs[0].vector.clone()));
    }
    let low_gap = pairs[1].value - pairs[0].value;
    let high_gap = pairs[n - 1].value - pairs[n - 2].value;
    let gap = low_gap.min(high_gap);
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateExtremum { gap });
    }
    Ok((pairs[0].vector.clone(), pairs[n - 1].vector.clone()))
}

/// Which extremal eigenvector a polarized probe occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    /// Largest eigenvalue, `|j, +j>`.
    Up,
    /// Smallest eigenvalue, `|j, -j>`.
    Down,
}

/// Probe polarized along the generator: its `m = +j` or `m = -j` eigenvector.
pub fn polarized_probe(
    dim: EnsembleDim,
    generator: &PhaseGenerator,
    sign: Polarization,
) -> Result<SpectralProbe> {
    let (low, high) = extremal_vectors(dim, generator)?;
    let psi = match sign {
        Polarization::Up => high,
        Polarization::Down => low,
    };
    SpectralProbe::pure(dim, psi)
}

/// GHZ-type probe `(|j, j> + |j, -j>) / sqrt(2)` in the generator's eigenbasis.
pub fn ghz_probe(dim: EnsembleDim, generator: &PhaseGenerator) -> Result<SpectralProbe> {
    let (low, high) = extremal_vectors(dim, generator)?;
    let psi = (high + low) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    SpectralProbe::pure(dim, psi)
}

/// Thermal probe `exp(-beta G) / Z` in the generator's eigenbasis.
///
/// The lowest eigenvalue (`m = -j` for a spin generator) is the ground state.
pub fn thermal_probe(dim: EnsembleDim, generator: &PhaseGenerator, beta: f64) -> Result<SpectralProbe> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::OutOfRange {
            name: "inverse temperature beta",
            value: beta,
            range: "[0, inf)",
        });
    }
    check_generator(dim, generator)?;
    let pairs = eigenbasis(generator.matrix())?;
    let weights = thermal_weights(pairs.iter().map(|p| p.value), beta);
    let terms = weights
        .into_iter()
        .zip(pairs)
        .map(|(w, p)| (w, p.vector))
        .collect();
    SpectralProbe::new(dim, terms)
}

/// Normalized Boltzmann weights `exp(-beta m) / Z`, shifted by the largest
/// exponent so nothing overflows.
pub fn thermal_weights(levels: impl Iterator<Item = f64> + Clone, beta: f64) -> Vec<f64> {
    let shift = levels.clone().map(|m| -beta * m).fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = levels.map(|m| (-beta * m - shift).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Spectral decomposition of a probe density matrix.
///
/// Terms are returned in descending weight.
pub fn spectral_decompose(dim: EnsembleDim, rho: &Operator) -> Result<SpectralProbe> {
    if rho.dim() != dim.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim.dim(),
            found: rho.dim(),
        });
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > SUM_TOL || trace.im.abs() > SUM_TOL {
        return Err(Error::InvalidDensity(format!("trace is {trace}, not 1")));
    }
    let pairs = eigenbasis(rho)?;
    let min = pairs.first().map(|p| p.value).unwrap_or(0.0);
    if min < -SPECTRAL_CUTOFF {
        return Err(Error::InvalidDensity(format!(
            "not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    let kept: Vec<(f64, DVector<Complex64>)> = pairs
        .into_iter()
        .rev()
        .filter(|p| p.value > SPECTRAL_CUTOFF)
        .map(|p| (p.value, p.vector))
        .collect();
    let total: f64 = kept.iter().map(|(p, _)| p).sum();
    SpectralProbe::new(dim, kept.into_iter().map(|(p, v)| (p / total, v)).collect())
}
