//! Quantum and classical Fisher information of the circuit output.
//!
//! The general QFI works from the probe's spectral decomposition and the
//! analytic derivative `dU/dtheta`. The SLD oracle works from the output
//! density matrix alone and serves as an independent cross-check.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuit::{check_joint, Circuit, ModelParams, Schedule};
use crate::error::{Error, Result};
use crate::spin_algebra::{eigenbasis, joint_vector, EnsembleDim, GeneratorKind, Operator, PhaseGenerator};
use crate::states::{AncillaState, SpectralProbe, SPECTRAL_CUTOFF};

/// Probabilities below this (with a small derivative) are treated as zeros
/// of the outcome distribution in the CFI sum.
pub const PROB_CUTOFF: f64 = 1e-12;
/// Default central-difference step for the numerical CFI.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default phase at which the CFI is evaluated.
pub const DEFAULT_THETA_EVAL: f64 = 0.2;

const NEGATIVE_CLIP: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-10;

/// How a Fisher value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FisherMethod {
    General,
    Simplified,
    SldOracle,
    ThermalExact,
    ThermalLargeN,
    Deviation,
    Dephased,
    CfiAnalytic,
    CfiFiniteDiff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    pub value: f64,
    pub method: FisherMethod,
}

impl FisherResult {
    /// Small negative round-off (down to `-1e-9`) is clipped to zero.
    fn new(value: f64, method: FisherMethod) -> Self {
        let value = if value < 0.0 && value > -NEGATIVE_CLIP { 0.0 } else { value };
        Self { value, method }
    }
}

fn input_state(probe: &SpectralProbe, ancilla: &AncillaState) -> Operator {
    probe.density().kron(ancilla.rho())
}

fn hermitian_part(m: DMatrix<Complex64>) -> Operator {
    Operator::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).tag_hermitian()
}

/// `rho(theta) = U_theta (rho_P (x) rho_A) U_theta^dagger`.
pub fn output_state(
    probe: &SpectralProbe,
    ancilla: &AncillaState,
    params: &ModelParams,
    sched: &Schedule,
) -> Operator {
    let u = Circuit::new(params, probe.dim(), sched).unitary();
    let rho0 = input_state(probe, ancilla);
    hermitian_part((u.matrix() * rho0.matrix()) * u.matrix().adjoint())
}

/// Output state together with its first and second `theta` derivatives,
/// built from the analytic derivatives of the circuit unitary.
#[derive(Debug, Clone)]
pub struct OutputDerivatives {
    pub rho: Operator,
    pub d_rho: Operator,
    pub d2_rho: Operator,
}

pub fn output_derivatives(
    probe: &SpectralProbe,
    ancilla: &AncillaState,
    params: &ModelParams,
    sched: &Schedule,
) -> OutputDerivatives {
    let circuit = Circuit::new(params, probe.dim(), sched);
    let rho0 = input_state(probe, ancilla);
    let rho0 = rho0.matrix();
    let u = circuit.unitary().into_matrix();
    let du = circuit.derivative().into_matrix();
    let d2u = circuit.second_derivative().into_matrix();

    let rho = (&u * rho0) * u.adjoint();
    let half_d = (&du * rho0) * u.adjoint();
    let half_d2 = (&d2u * rho0) * u.adjoint() + (&du * rho0) * du.adjoint();
    OutputDerivatives {
        rho: hermitian_part(rho),
        d_rho: Operator::new(&half_d + half_d.adjoint()).tag_hermitian(),
        d2_rho: Operator::new(&half_d2 + half_d2.adjoint()).tag_hermitian(),
    }
}

/// QFI of the output state from the probe's spectral decomposition:
///
/// `F = 4 sum_i p_i <d_i|d_i> - sum_ij 8 p_i p_j / (p_i + p_j) |<u_i|d_j>|^2`
///
/// with `|u_i> = U |psi_i, phi>` and `|d_i> = dU/dtheta |psi_i, phi>`.
/// Requires a pure ancilla.
pub fn qfi_general(
    probe: &SpectralProbe,
    ancilla: &AncillaState,
    params: &ModelParams,
    sched: &Schedule,
) -> Result<FisherResult> {
    if !ancilla.is_pure() {
        return Err(Error::MixedAncilla { x: ancilla.dephasing() });
    }
    let circuit = Circuit::new(params, probe.dim(), sched);
    let u = circuit.unitary();
    let du = circuit.derivative();
    let phi = ancilla.ket();

    let mut outs = Vec::with_capacity(probe.rank());
    let mut first = 0.0;
    for (p, psi) in probe.terms() {
        let input = joint_vector(psi, &phi);
        let d = du.apply(&input);
        first += 4.0 * p * d.norm_squared();
        outs.push((*p, u.apply(&input), d));
    }
    let mut second = 0.0;
    for (pi, ui, _) in &outs {
        for (pj, _, dj) in &outs {
            second += 8.0 * pi * pj / (pi + pj) * ui.dotc(dj).norm_sqr();
        }
    }
    Ok(FisherResult::new(first - second, FisherMethod::General))
}

/// `4 sum_i p_i <psi_i| G^2 |psi_i>`, the QFI at the optimum.
pub fn qfi_simplified(probe: &SpectralProbe, generator: &PhaseGenerator) -> Result<FisherResult> {
    if generator.dim() != probe.dim().dim() {
        return Err(Error::DimensionMismatch {
            expected: probe.dim().dim(),
            found: generator.dim(),
        });
    }
    let g = generator.matrix();
    let value = probe
        .terms()
        .iter()
        .map(|(p, psi)| 4.0 * p * g.apply(psi).norm_squared())
        .sum();
    Ok(FisherResult::new(value, FisherMethod::Simplified))
}

/// Symmetric-logarithmic-derivative QFI of a density matrix:
///
/// `F = 2 sum_{k,l: l_k + l_l > eps} |<k| d_rho |l>|^2 / (l_k + l_l)`
/// over the eigenpairs `(l_k, |k>)` of `rho`.
pub fn qfi_sld_oracle(rho: &Operator, d_rho: &Operator) -> Result<FisherResult> {
    if rho.dim() != d_rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: d_rho.dim(),
        });
    }
    let trace = rho.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace is {trace}, not 1")));
    }
    d_rho.ensure_hermitian()?;
    let d_trace = d_rho.trace();
    if d_trace.norm() > TRACE_TOL * rho.dim() as f64 {
        return Err(Error::InvalidDensity(format!("derivative trace is {d_trace}, not 0")));
    }
    let pairs = eigenbasis(rho)?;
    if let Some(min) = pairs.first().map(|p| p.value).filter(|&v| v < -SPECTRAL_CUTOFF) {
        return Err(Error::InvalidDensity(format!(
            "not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    let n = rho.dim();
    let vecs = DMatrix::from_columns(&pairs.iter().map(|p| p.vector.clone()).collect::<Vec<_>>());
    let rotated = vecs.adjoint() * d_rho.matrix() * &vecs;
    let mut value = 0.0;
    for k in 0..n {
        for l in 0..n {
            let denom = pairs[k].value + pairs[l].value;
            if denom > SPECTRAL_CUTOFF {
                value += 2.0 * rotated[(k, l)].norm_sqr() / denom;
            }
        }
    }
    Ok(FisherResult::new(value, FisherMethod::SldOracle))
}

/// Thermal-probe QFI at the optimum: the exact ratio
/// `4 sum m^2 e^{-m beta} / sum e^{-m beta}` and the large-`N` form
/// `N^2 - 4N/(e^beta - 1) + 4(e^beta + 1)/(e^beta - 1)^2`.
pub fn qfi_thermal(dim: EnsembleDim, beta: f64) -> Result<(FisherResult, FisherResult)> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::OutOfRange {
            name: "inverse temperature beta (large-N form)",
            value: beta,
            range: "(0, inf)",
        });
    }
    let exact = qfi_thermal_exact(dim, beta)?;
    let n = dim.n_spins() as f64;
    let em1 = beta.exp_m1();
    let large = n * n - 4.0 * n / em1 + 4.0 * (em1 + 2.0) / (em1 * em1);
    Ok((exact, FisherResult::new(large, FisherMethod::ThermalLargeN)))
}

/// Exact thermal QFI; valid for any `beta >= 0`.
pub fn qfi_thermal_exact(dim: EnsembleDim, beta: f64) -> Result<FisherResult> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::OutOfRange {
            name: "inverse temperature beta",
            value: beta,
            range: "[0, inf)",
        });
    }
    let levels: Vec<f64> = dim.m_values().collect();
    let weights = crate::states::thermal_weights(levels.iter().copied(), beta);
    let value = levels.iter().zip(weights).map(|(m, w)| 4.0 * m * m * w).sum();
    Ok(FisherResult::new(value, FisherMethod::ThermalExact))
}

/// Deviations of the coupling and probe frequency from their nominal values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviationSpec {
    pub dg: f64,
    pub d_omega_p: f64,
}

impl DeviationSpec {
    /// Whether both deviations are small over `t1` (`|delta t1| <= 0.1`).
    pub fn is_small(&self, t1: f64) -> bool {
        (self.dg * t1).abs() <= 0.1 && (self.d_omega_p * t1).abs() <= 0.1
    }
}

/// Second-order QFI under parameter deviations for the polarized optimal probe:
/// `N^2 - N(N - 1)(d_omega_P^2 + dg^2) t1^2`.
pub fn qfi_deviation(dim: EnsembleDim, spec: &DeviationSpec, t1: f64) -> FisherResult {
    if !spec.is_small(t1) {
        log::warn!(
            "deviation expansion used outside its regime: dg*t1 = {}, d_omega_P*t1 = {}",
            spec.dg * t1,
            spec.d_omega_p * t1
        );
    }
    let n = dim.n_spins() as f64;
    let value = n * n - n * (n - 1.0) * (spec.d_omega_p.powi(2) + spec.dg.powi(2)) * t1 * t1;
    FisherResult::new(value, FisherMethod::Deviation)
}

/// QFI with a dephased ancilla at the ZZ optimum:
///
/// `F = 4 sum_i p_i <G^2>_i - sum_ij 8x(2-x) p_i p_j / ((2-x) p_i + x p_j) |<psi_i|G|psi_j>|^2`.
pub fn qfi_dephased(
    probe: &SpectralProbe,
    theta0: f64,
    x: f64,
    generator: &PhaseGenerator,
) -> Result<FisherResult> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "dephasing rate x",
            value: x,
            range: "[0, 1]",
        });
    }
    if let GeneratorKind::Xz { .. } = generator.kind() {
        return Err(Error::Unsupported(
            "the dephased closed form is only established for the ZZ coupling".into(),
        ));
    }
    if (theta0 - FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::NotOptimal(format!("theta0 = {theta0}, expected pi/2")));
    }
    let first = qfi_simplified(probe, generator)?.value;
    let g = generator.matrix();
    let terms = probe.terms();
    let images: Vec<DVector<Complex64>> = terms.iter().map(|(_, psi)| g.apply(psi)).collect();
    let mut second = 0.0;
    for (pi, psi_i) in terms {
        for ((pj, _), g_psi_j) in terms.iter().zip(&images) {
            let denom = (2.0 - x) * pi + x * pj;
            if denom > 0.0 {
                second += 8.0 * x * (2.0 - x) * pi * pj / denom * psi_i.dotc(g_psi_j).norm_sqr();
            }
        }
    }
    Ok(FisherResult::new(first - second, FisherMethod::Dephased))
}

/// Ancilla outcome `|+>` or `|->` (eigenstates of `sigma_x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn ket(self) -> DVector<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sign = match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        };
        DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(sign * s, 0.0)])
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Projective measurement performed on the output.
#[derive(Debug, Clone)]
pub enum MeasurementBasis {
    /// `|j, m>_G (x) |+->` over the eigenbasis of `G`.
    FullSystem(PhaseGenerator),
    /// `|+->` on the ancilla with the probe traced out.
    AncillaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityRow {
    /// Eigenvalue label; `None` for ancilla-only outcomes.
    pub m: Option<f64>,
    pub branch: Branch,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub rows: Vec<ProbabilityRow>,
}

impl ProbabilityTable {
    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.p).sum()
    }

    /// Probability of outcome `(m, branch)`, matching `m` to within `1e-9`.
    pub fn get(&self, m: Option<f64>, branch: Branch) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| {
                r.branch == branch
                    && match (r.m, m) {
                        (Some(a), Some(b)) => (a - b).abs() < 1e-9,
                        (None, None) => true,
                        _ => false,
                    }
            })
            .map(|r| r.p)
    }
}

/// A measurement outcome as a set of orthonormal joint vectors.
struct Outcome {
    m: Option<f64>,
    branch: Branch,
    vectors: Vec<DVector<Complex64>>,
}

impl Outcome {
    fn prob(&self, rho: &Operator) -> f64 {
        self.vectors.iter().map(|v| rho.expectation(v)).sum()
    }
}

fn outcomes(basis: &MeasurementBasis, joint_dim: usize) -> Result<Vec<Outcome>> {
    let probe_dim = joint_dim / 2;
    let branches = [Branch::Plus, Branch::Minus];
    match basis {
        MeasurementBasis::FullSystem(generator) => {
            if generator.dim() != probe_dim {
                return Err(Error::DimensionMismatch {
                    expected: probe_dim,
                    found: generator.dim(),
                });
            }
            let pairs = eigenbasis(generator.matrix())?;
            Ok(pairs
                .iter()
                .flat_map(|pair| {
                    branches.iter().map(move |&b| Outcome {
                        m: Some(pair.value),
                        branch: b,
                        vectors: vec![joint_vector(&pair.vector, &b.ket())],
                    })
                })
                .collect())
        }
        MeasurementBasis::AncillaOnly => Ok(branches
            .iter()
            .map(|&b| Outcome {
                m: None,
                branch: b,
                vectors: (0..probe_dim)
                    .map(|k| joint_vector(&DVector::from_fn(probe_dim, |i, _| unit(i == k)), &b.ket()))
                    .collect(),
            })
            .collect()),
    }
}

fn unit(on: bool) -> Complex64 {
    Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
}

/// Outcome distribution `P(m, +-|theta) = <Psi_{m,+-}| rho |Psi_{m,+-}>`.
pub fn measurement_probs(rho: &Operator, basis: &MeasurementBasis) -> Result<ProbabilityTable> {
    if !rho.dim().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim() + 1,
            found: rho.dim(),
        });
    }
    let rows = outcomes(basis, rho.dim())?
        .iter()
        .map(|o| ProbabilityRow {
            m: o.m,
            branch: o.branch,
            p: o.prob(rho),
        })
        .collect();
    Ok(ProbabilityTable { rows })
}

/// How `dP/dtheta` is obtained for the CFI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CfiMode {
    /// Exact derivatives from `dU/dtheta`; zeros of `P` use the finite limit
    /// `dP^2 / P -> 2 d^2P/dtheta^2`.
    Analytic,
    /// Central differences with step `h`; zeros of `P` are dropped.
    FiniteDiff { h: f64 },
}

/// Classical Fisher information `sum_k (dP_k/dtheta)^2 / P_k` at `sched.theta`.
pub fn cfi(
    probe: &SpectralProbe,
    ancilla: &AncillaState,
    params: &ModelParams,
    sched: &Schedule,
    basis: &MeasurementBasis,
    mode: CfiMode,
) -> Result<FisherResult> {
    let dim = probe.dim();
    let outs = outcomes(basis, dim.joint_dim())?;
    let small_slope = PROB_CUTOFF.sqrt();
    match mode {
        CfiMode::Analytic => {
            let d = output_derivatives(probe, ancilla, params, sched);
            check_joint(dim, &d.rho)?;
            let mut value = 0.0;
            for o in &outs {
                let p = o.prob(&d.rho);
                let dp = o.prob(&d.d_rho);
                if p < PROB_CUTOFF && dp.abs() < small_slope {
                    value += (2.0 * o.prob(&d.d2_rho)).max(0.0);
                } else {
                    value += dp * dp / p;
                }
            }
            Ok(FisherResult::new(value, FisherMethod::CfiAnalytic))
        }
        CfiMode::FiniteDiff { h } => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::OutOfRange {
                    name: "finite-difference step h",
                    value: h,
                    range: "(0, inf)",
                });
            }
            let at = |theta: f64| output_state(probe, ancilla, params, &sched.with_theta(theta));
            let (rho, plus, minus) = (at(sched.theta), at(sched.theta + h), at(sched.theta - h));
            let mut value = 0.0;
            for o in &outs {
                let p = o.prob(&rho);
                let dp = (o.prob(&plus) - o.prob(&minus)) / (2.0 * h);
                if p < PROB_CUTOFF && dp.abs() < small_slope {
                    continue;
                }
                value += dp * dp / p;
            }
            Ok(FisherResult::new(value, FisherMethod::CfiFiniteDiff))
        }
    }
}
