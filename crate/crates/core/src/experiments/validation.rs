//! Seeded randomized cross-checks between the two QFI implementations.
//!
//! Each instance draws a model, an ensemble size `N <= max_n`, a schedule,
//! an ancilla and a probe of rank at most three. The spectral QFI is compared
//! with the SLD QFI of the output density matrix, and the CFI of an
//! ancilla-only or full-system measurement must not exceed either.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{write_outputs, Cell, Dataset, ExperimentError, Summary};
use crate::circuit::{optimal_generator, Interaction, ModelParams, Schedule};
use crate::error::Result;
use crate::fisher::{cfi, output_derivatives, qfi_general, qfi_sld_oracle, CfiMode, MeasurementBasis};
use crate::spin_algebra::EnsembleDim;
use crate::states::{ancilla_state, AncillaState, SpectralProbe};

/// Relative tolerance between the spectral and SLD QFI, scaled by `max(F, 1)`.
pub const ORACLE_TOL: f64 = 1e-8;
/// Allowed excess of the CFI over the QFI.
pub const CRAMER_RAO_SLACK: f64 = 1e-8;

/// One random configuration.
#[derive(Debug, Clone)]
pub struct Instance {
    pub params: ModelParams,
    pub probe: SpectralProbe,
    pub ancilla: AncillaState,
    pub sched: Schedule,
    /// Measure the full system in the optimal generator's basis instead of
    /// the ancilla alone.
    pub full_basis: bool,
}

impl Instance {
    /// Draws an instance with `1 <= N <= max_n`.
    pub fn random(rng: &mut impl Rng, max_n: usize) -> Result<Self> {
        let interaction = if rng.gen_bool(0.5) { Interaction::Zz } else { Interaction::Xz };
        let g = rng.gen_range(0.5..2.0);
        let params = ModelParams::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), g, interaction)?;
        let dim = EnsembleDim::new(rng.gen_range(1..=max_n.max(1)))?;
        let t1 = rng.gen_range(1e-3..=PI / g);
        let theta = rng.gen_range(-PI..PI);
        let sched = if rng.gen_bool(0.5) {
            Schedule::conjugate(t1, theta)?
        } else {
            Schedule::steps(t1, rng.gen_range(0.0..PI / g), theta)?
        };
        let ancilla = ancilla_state(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI));
        let probe = random_probe(rng, dim)?;
        Ok(Self {
            params,
            probe,
            ancilla,
            sched,
            full_basis: rng.gen_bool(0.5),
        })
    }
}

/// Random probe of rank `1..=min(3, N + 1)` with Haar-like eigenvectors.
pub fn random_probe(rng: &mut impl Rng, dim: EnsembleDim) -> Result<SpectralProbe> {
    let d = dim.dim();
    let rank = rng.gen_range(1..=d.min(3));
    let raw = DMatrix::from_fn(d, rank, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let q = raw.qr().q();
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let terms = weights
        .into_iter()
        .enumerate()
        .map(|(k, w)| (w, q.column(k).into_owned()))
        .collect();
    SpectralProbe::new(dim, terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseResult {
    pub n: usize,
    pub interaction: Interaction,
    pub qfi_general: f64,
    pub qfi_sld: f64,
    pub cfi: f64,
}

impl CaseResult {
    pub fn rel_err(&self) -> f64 {
        (self.qfi_general - self.qfi_sld).abs() / self.qfi_sld.abs().max(1.0)
    }

    pub fn passes(&self) -> bool {
        self.rel_err() <= ORACLE_TOL
            && self.cfi <= self.qfi_sld + CRAMER_RAO_SLACK
            && self.cfi <= self.qfi_general + CRAMER_RAO_SLACK
    }
}

pub fn evaluate(instance: &Instance) -> Result<CaseResult> {
    let Instance {
        params,
        probe,
        ancilla,
        sched,
        full_basis,
    } = instance;
    let dim = probe.dim();
    let general = qfi_general(probe, ancilla, params, sched)?.value;
    let out = output_derivatives(probe, ancilla, params, sched);
    let sld = qfi_sld_oracle(&out.rho, &out.d_rho)?.value;
    let basis = if *full_basis {
        MeasurementBasis::FullSystem(optimal_generator(params, dim, sched.t1))
    } else {
        MeasurementBasis::AncillaOnly
    };
    let fc = cfi(probe, ancilla, params, sched, &basis, CfiMode::Analytic)?.value;
    Ok(CaseResult {
        n: dim.n_spins(),
        interaction: params.interaction,
        qfi_general: general,
        qfi_sld: sld,
        cfi: fc,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub cases: Vec<CaseResult>,
}

impl ValidationReport {
    pub fn max_rel_err(&self) -> f64 {
        self.cases.iter().map(CaseResult::rel_err).fold(0.0, f64::max)
    }

    /// Largest `cfi - qfi_sld` seen (negative when the ordering always holds).
    pub fn max_cramer_rao_excess(&self) -> f64 {
        self.cases
            .iter()
            .map(|c| c.cfi - c.qfi_sld)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.passes()).count()
    }

    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.failures() == 0
    }
}

impl ValidationReport {
    pub fn dataset(&self) -> Dataset {
        let rows = self
            .cases
            .iter()
            .enumerate()
            .map(|(i, c)| {
                vec![
                    Cell::Int(i as i64),
                    Cell::Int(c.n as i64),
                    Cell::Text(interaction_name(c.interaction).into()),
                    Cell::Num(c.qfi_general),
                    Cell::Num(c.qfi_sld),
                    Cell::Num(c.cfi),
                    Cell::Num(c.rel_err()),
                    Cell::Text(if c.passes() { "pass" } else { "fail" }.into()),
                ]
            })
            .collect();
        Dataset {
            name: "validate".into(),
            columns: vec!["case", "N", "interaction", "FQ_general", "FQ_sld", "Fc", "rel_err", "status"],
            rows,
        }
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        s.push("seed", self.seed);
        s.push("samples", self.cases.len());
        s.push("failures", self.failures());
        s.push_num("max_rel_err", self.max_rel_err());
        s.push_num("max_cfi_minus_qfi", self.max_cramer_rao_excess());
        s.push("passed", self.passed());
        s
    }

    /// Writes `validate.csv` and `validate_summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> std::result::Result<Vec<PathBuf>, ExperimentError> {
        write_outputs(dir, &[self.dataset()], "validate", &self.summary())
    }
}

fn interaction_name(i: Interaction) -> &'static str {
    match i {
        Interaction::Zz => "zz",
        Interaction::Xz => "xz",
    }
}

/// Draws `samples` instances from a ChaCha8 stream seeded with `seed` and
/// evaluates them in parallel. Results come back in draw order.
pub fn run_validation(samples: usize, seed: u64, max_n: usize) -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..samples)
        .map(|_| Instance::random(&mut rng, max_n))
        .collect::<Result<Vec<_>>>()?;
    let cases = instances.par_iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport { seed, cases })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_validation(24, 11, 6).unwrap();
        assert!(a.passed(), "max rel err {}", a.max_rel_err());
        let b = run_validation(24, 11, 6).unwrap();
        assert_eq!(a, b);
        let ds = a.dataset();
        assert_eq!(ds.rows.len(), 24);
        assert_eq!(a.summary().get("failures"), Some("0"));
    }

    #[test]
    fn random_probe_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5] {
            let p = random_probe(&mut rng, EnsembleDim::new(n).unwrap()).unwrap();
            assert!(p.rank() <= 3);
            let total: f64 = p.terms().iter().map(|t| t.0).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
