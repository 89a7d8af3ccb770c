//! The two-step joint evolution circuit and its time-reversal structure.
//!
//! `U_theta = U(t2) R(theta) U(t1)` with `U(t) = exp(-i H t)`. The encoder is
//! `R_x(theta) = exp(-i theta J_x)` for the ZZ coupling and
//! `R_z(theta) = exp(-i theta J_z)` for the XZ coupling.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_algebra::{
    collective_ops, eigenbasis, joint_embed, phase_generator, unitary_from_eigen,
    unitary_of_hermitian, EigenPair, EnsembleDim, Operator, PhaseGenerator,
};

/// `1 - F(T)` below which `T` counts as a reversal period.
pub const PERIOD_RESIDUAL_TOL: f64 = 1e-9;
/// Largest denominator accepted when detecting rational frequency ratios.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIO_TOL: f64 = 1e-9;
const INTEGER_TOL: f64 = 1e-9;
const MAX_SCAN_STEPS: usize = 50_000_000;

/// Probe-ancilla coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interaction {
    /// `g J_z sigma_z`, phase encoded by `R_x`.
    Zz,
    /// `g J_x sigma_z`, phase encoded by `R_z`.
    Xz,
}

/// Frequencies of `H = omega_P J_z + omega_A sigma_z + g J_{z|x} sigma_z`.
///
/// Frequencies are expressed in units of the coupling, so `g = 1` is the
/// usual choice. `g = 0` (no coupling) is accepted as a baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega_p: f64,
    pub omega_a: f64,
    pub g: f64,
    pub interaction: Interaction,
}

impl ModelParams {
    pub fn new(omega_p: f64, omega_a: f64, g: f64, interaction: Interaction) -> Result<Self> {
        for (name, value) in [("omega_P", omega_p), ("omega_A", omega_a)] {
            if !value.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    range: "finite",
                });
            }
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::OutOfRange {
                name: "coupling g",
                value: g,
                range: "[0, inf)",
            });
        }
        Ok(Self {
            omega_p,
            omega_a,
            g,
            interaction,
        })
    }

    pub fn zz(omega_p: f64, omega_a: f64, g: f64) -> Result<Self> {
        Self::new(omega_p, omega_a, g, Interaction::Zz)
    }

    pub fn xz(omega_p: f64, omega_a: f64, g: f64) -> Result<Self> {
        Self::new(omega_p, omega_a, g, Interaction::Xz)
    }

    /// `sqrt(omega_P^2 + g^2)`, the precession frequency of the XZ model.
    pub fn omega_tilde(&self) -> f64 {
        (self.omega_p * self.omega_p + self.g * self.g).sqrt()
    }

    pub fn with_deviation(&self, dg: f64, d_omega_p: f64) -> Result<Self> {
        Self::new(self.omega_p + d_omega_p, self.omega_a, self.g + dg, self.interaction)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_p: 3.0,
            omega_a: 3.0,
            g: 1.0,
            interaction: Interaction::Zz,
        }
    }
}

/// How the second joint evolution is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reversal {
    /// Forward evolution for `t2 = total - t1`; exact reversal only when
    /// `total` is a reversal period.
    Period { total: f64 },
    /// The second leg is `U(t1)^dagger` by construction.
    ExactConjugate,
}

/// Timing and encoded phase of one circuit run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub t1: f64,
    pub theta: f64,
    pub reversal: Reversal,
}

impl Schedule {
    pub fn conjugate(t1: f64, theta: f64) -> Result<Self> {
        check_time("t1", t1)?;
        Ok(Self {
            t1,
            theta,
            reversal: Reversal::ExactConjugate,
        })
    }

    /// Forward-evolution schedule with `t2 = total - t1`.
    pub fn period(t1: f64, total: f64, theta: f64) -> Result<Self> {
        check_time("t1", t1)?;
        check_time("t2", total - t1)?;
        Ok(Self {
            t1,
            theta,
            reversal: Reversal::Period { total },
        })
    }

    /// Forward-evolution schedule from explicit step durations.
    pub fn steps(t1: f64, t2: f64, theta: f64) -> Result<Self> {
        check_time("t2", t2)?;
        Self::period(t1, t1 + t2, theta)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// Duration of the second step (equal to `t1` in conjugate mode).
    pub fn t2(&self) -> f64 {
        match self.reversal {
            Reversal::Period { total } => total - self.t1,
            Reversal::ExactConjugate => self.t1,
        }
    }
}

fn check_time(name: &'static str, t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::OutOfRange {
            name,
            value: t,
            range: "[0, inf)",
        });
    }
    Ok(())
}

/// Joint Hamiltonian on the `2 (N + 1)`-dimensional space.
pub fn hamiltonian(params: &ModelParams, dim: EnsembleDim) -> Operator {
    let (jx, _, jz) = collective_ops(dim);
    let id_p = Operator::identity(dim.dim());
    let id_a = Operator::identity(2);
    let sz = Operator::sigma_z();
    let coupling = match params.interaction {
        Interaction::Zz => &jz,
        Interaction::Xz => &jx,
    };
    let free = &jz.kron(&id_a).scale(params.omega_p) + &id_p.kron(&sz).scale(params.omega_a);
    (&free + &coupling.kron(&sz).scale(params.g)).tag_hermitian()
}

/// Spectral data of the joint Hamiltonian, reusable across many times.
#[derive(Debug, Clone)]
pub struct Evolution {
    pairs: Vec<EigenPair>,
    dim: usize,
}

impl Evolution {
    pub fn new(params: &ModelParams, dim: EnsembleDim) -> Self {
        let h = hamiltonian(params, dim);
        let pairs = eigenbasis(&h).expect("Hamiltonian is Hermitian by construction");
        Self {
            pairs,
            dim: dim.joint_dim(),
        }
    }

    /// `exp(-i H t)`.
    pub fn at(&self, t: f64) -> Operator {
        unitary_from_eigen(&self.pairs, self.dim, t)
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.value)
    }

    /// `|Tr U(T)| / 2(N + 1)`, clamped to `[0, 1]`.
    pub fn normalized_trace(&self, t: f64) -> f64 {
        let tr: Complex64 = self.energies().map(|e| Complex64::from_polar(1.0, -e * t)).sum();
        (tr.norm() / self.dim as f64).clamp(0.0, 1.0)
    }
}

/// `exp(-i H t)`.
pub fn propagator(params: &ModelParams, dim: EnsembleDim, t: f64) -> Operator {
    Evolution::new(params, dim).at(t)
}

/// Probe generator of the phase encoding: `J_x` (ZZ) or `J_z` (XZ).
pub fn encoding_generator(interaction: Interaction, dim: EnsembleDim) -> Operator {
    let (jx, _, jz) = collective_ops(dim);
    match interaction {
        Interaction::Zz => jx,
        Interaction::Xz => jz,
    }
}

/// Phase encoder `R(theta) (x) I_2`.
pub fn encoder(interaction: Interaction, theta: f64, dim: EnsembleDim) -> Operator {
    let rot = unitary_of_hermitian(&encoding_generator(interaction, dim), theta)
        .expect("spin generators are Hermitian");
    rot.kron(&Operator::identity(2))
}

/// The three factors of the circuit plus the encoding generator, assembled
/// once so the unitary and its `theta` derivatives share work.
#[derive(Debug, Clone)]
pub struct Circuit {
    first: Operator,
    encoder: Operator,
    generator: Operator,
    second: Operator,
}

impl Circuit {
    pub fn new(params: &ModelParams, dim: EnsembleDim, sched: &Schedule) -> Self {
        let evolution = Evolution::new(params, dim);
        Self::with_evolution(&evolution, params.interaction, dim, sched)
    }

    pub fn with_evolution(
        evolution: &Evolution,
        interaction: Interaction,
        dim: EnsembleDim,
        sched: &Schedule,
    ) -> Self {
        let first = evolution.at(sched.t1);
        let second = match sched.reversal {
            Reversal::ExactConjugate => first.adjoint(),
            Reversal::Period { .. } => evolution.at(sched.t2()),
        };
        Self {
            first,
            encoder: encoder(interaction, sched.theta, dim),
            generator: encoding_generator(interaction, dim).kron(&Operator::identity(2)),
            second,
        }
    }

    /// `U_theta`.
    pub fn unitary(&self) -> Operator {
        &(&self.second * &self.encoder) * &self.first
    }

    /// `dU/dtheta = U(t2) (-i G) R(theta) U(t1)`.
    pub fn derivative(&self) -> Operator {
        self.derivative_order(1)
    }

    /// `d^2U/dtheta^2 = U(t2) (-i G)^2 R(theta) U(t1)`.
    pub fn second_derivative(&self) -> Operator {
        self.derivative_order(2)
    }

    fn derivative_order(&self, order: u32) -> Operator {
        let mut mid = self.encoder.clone();
        let minus_i_g = self.generator.scale_complex(Complex64::new(0.0, -1.0));
        for _ in 0..order {
            mid = &minus_i_g * &mid;
        }
        &(&self.second * &mid) * &self.first
    }
}

/// Full circuit unitary `U(t2) R(theta) U(t1)`.
pub fn circuit_unitary(params: &ModelParams, dim: EnsembleDim, sched: &Schedule) -> Operator {
    Circuit::new(params, dim, sched).unitary()
}

/// `|Tr U(T)| / 2(N + 1)`.
pub fn normalized_trace(params: &ModelParams, dim: EnsembleDim, t: f64) -> f64 {
    Evolution::new(params, dim).normalized_trace(t)
}

/// Integers certifying a reversal period through the sufficient conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodIntegers {
    /// Even `N`: `gT/pi = n1`, `omega_P T/pi = n1 + 2 n2`, `omega_A T/pi = n3`.
    ZzEven { n1: i64, n2: i64, n3: i64 },
    /// Odd `N`: as above but `omega_A T/pi = n1/2 + n4`.
    ZzOdd { n1: i64, n2: i64, n4: i64 },
    /// `omega_tilde T/pi = 2 n5`, `omega_A T/pi = n6`.
    Xz { n5: i64, n6: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodMethod {
    /// Rational frequency ratios; the period follows from their common base.
    Commensurate,
    /// Grid scan of the normalized trace with local refinement.
    Scan,
}

/// A verified reversal period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSolution {
    pub period: f64,
    /// Present when the period satisfies the closed-form integer conditions.
    pub integers: Option<PeriodIntegers>,
    /// `1 - F(period)`.
    pub residual: f64,
    pub method: PeriodMethod,
}

/// Smallest `T` in `(0, window]` with `U(T)` proportional to the identity.
///
/// When every gap of the joint spectrum is a rational multiple of the others
/// the exact period `2 pi / omega_base` is computed from their common base
/// frequency. Otherwise the normalized trace is scanned with step
/// `pi / (64 * spread)` and candidate peaks are refined.
pub fn reversal_period(params: &ModelParams, dim: EnsembleDim, window: f64) -> Result<PeriodSolution> {
    if !window.is_finite() || window <= 0.0 {
        return Err(Error::OutOfRange {
            name: "search window",
            value: window,
            range: "(0, inf)",
        });
    }
    let evolution = Evolution::new(params, dim);
    let energies: Vec<f64> = evolution.energies().collect();
    let gaps = distinct_gaps(&energies);
    if gaps.is_empty() {
        return Err(Error::Unsupported(
            "Hamiltonian is proportional to the identity; every T is a period".into(),
        ));
    }

    let verify = |period: f64, method| -> Option<PeriodSolution> {
        let residual = 1.0 - evolution.normalized_trace(period);
        (residual < PERIOD_RESIDUAL_TOL).then(|| PeriodSolution {
            period,
            integers: period_integers(params, dim, period),
            residual,
            method,
        })
    };

    if let Some(base) = commensurate_base(&gaps) {
        let period = 2.0 * PI / base;
        if let Some(sol) = verify(period, PeriodMethod::Commensurate) {
            return if period <= window * (1.0 + 1e-12) {
                Ok(sol)
            } else {
                Err(Error::NoPeriod { window })
            };
        }
        log::debug!("commensurate period {period} failed verification; scanning");
    }

    scan_period(&evolution, window).and_then(|period| verify(period, PeriodMethod::Scan))
        .ok_or(Error::NoPeriod { window })
}

/// First refined peak of the normalized trace in `(0, window]` that passes
/// the residual test, scanning with step `pi / (64 * spread)`.
fn scan_period(evolution: &Evolution, window: f64) -> Option<f64> {
    let energies: Vec<f64> = evolution.energies().collect();
    let spread = energies.last()? - energies.first()?;
    let step = PI / (64.0 * spread);
    let steps = (window / step).ceil() as usize;
    if steps > MAX_SCAN_STEPS {
        log::warn!("scan over (0, {window}] would take {steps} steps; giving up");
        return None;
    }
    let f = |t: f64| evolution.normalized_trace(t);
    let mut prev = f(0.0);
    let mut cur = f(step);
    for k in 1..=steps {
        let t = k as f64 * step;
        let next = f(t + step);
        if cur >= prev && cur >= next && cur > 0.99 {
            let peak = refine_peak(&f, t - step, (t + step).min(window));
            if 1.0 - f(peak) < PERIOD_RESIDUAL_TOL {
                return Some(peak);
            }
        }
        prev = cur;
        cur = next;
    }
    None
}

fn distinct_gaps(energies: &[f64]) -> Vec<f64> {
    let scale = energies.iter().map(|e| e.abs()).fold(1.0, f64::max);
    let base = energies[0];
    let mut gaps: Vec<f64> = energies
        .iter()
        .map(|e| e - base)
        .filter(|d| d.abs() > 1e-9 * scale)
        .collect();
    gaps.sort_by(f64::total_cmp);
    gaps.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    gaps
}

/// Largest `w` with every gap an integer multiple of `w`, if the gaps are
/// mutually rational.
fn commensurate_base(gaps: &[f64]) -> Option<f64> {
    let reference = gaps[0];
    let mut lcm_den: u64 = 1;
    let mut fractions = Vec::with_capacity(gaps.len());
    for &gap in gaps {
        let (p, q) = rational_approx(gap / reference, MAX_DENOMINATOR)?;
        lcm_den = lcm(lcm_den, q);
        if lcm_den > MAX_DENOMINATOR {
            return None;
        }
        fractions.push((p, q));
    }
    let numerator_gcd = fractions
        .iter()
        .map(|&(p, q)| p.unsigned_abs() * (lcm_den / q))
        .fold(0, gcd);
    Some(reference * numerator_gcd as f64 / lcm_den as f64)
}

/// Continued-fraction approximation `p/q` of `x` with `q <= max_den`, accepted
/// only when `|x - p/q| <= 1e-9 * max(1, |x|)`.
pub fn rational_approx(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = RATIO_TOL * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (x - approx).abs() <= tol {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn as_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= INTEGER_TOL * x.abs().max(1.0)).then_some(r as i64)
}

/// Integers of the sufficient reversal conditions at `period`, if they exist.
pub fn period_integers(params: &ModelParams, dim: EnsembleDim, period: f64) -> Option<PeriodIntegers> {
    let over_pi = |w: f64| w * period / PI;
    match params.interaction {
        Interaction::Zz => {
            let n1 = as_integer(over_pi(params.g))?;
            let n2 = as_integer((over_pi(params.omega_p) - n1 as f64) / 2.0)?;
            let wa = over_pi(params.omega_a);
            if dim.n_spins().is_multiple_of(2) {
                Some(PeriodIntegers::ZzEven {
                    n1,
                    n2,
                    n3: as_integer(wa)?,
                })
            } else {
                Some(PeriodIntegers::ZzOdd {
                    n1,
                    n2,
                    n4: as_integer(wa - n1 as f64 / 2.0)?,
                })
            }
        }
        Interaction::Xz => Some(PeriodIntegers::Xz {
            n5: as_integer(over_pi(params.omega_tilde()) / 2.0)?,
            n6: as_integer(over_pi(params.omega_a))?,
        }),
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn refine_peak(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        a
    } else {
        b
    }
}

/// Coefficients of the XZ closed form
/// `U_theta = exp(i theta (c_z J_z + c_x J_x sigma_z + c_y J_y sigma_z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BchCoefficients {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl BchCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.cx * self.cx + self.cy * self.cy + self.cz * self.cz
    }
}

pub fn bch_coefficients(params: &ModelParams, t1: f64) -> Result<BchCoefficients> {
    if params.interaction != Interaction::Xz {
        return Err(Error::Unsupported("BCH coefficients are defined for the XZ coupling".into()));
    }
    let (g, wp) = (params.g, params.omega_p);
    let wt = params.omega_tilde();
    if wt == 0.0 {
        return Ok(BchCoefficients {
            cx: 0.0,
            cy: 0.0,
            cz: -1.0,
        });
    }
    let w2 = wt * wt;
    let c = (wt * t1).cos();
    Ok(BchCoefficients {
        cz: -(g * g / w2) * c - wp * wp / w2,
        cx: (g * wp / w2) * (c - 1.0),
        cy: -(g / wt) * (wt * t1).sin(),
    })
}

/// Hermitian `K` with `U_theta = exp(-i theta K)` under exact reversal.
///
/// ZZ: `K = cos(g t1) J(-phi) - sin(g t1) J(pi/2 - phi) sigma_z`, `phi = omega_P t1`.
/// XZ: `K = -(c_z J_z + c_x J_x sigma_z + c_y J_y sigma_z)`.
pub fn closed_form_generator(params: &ModelParams, dim: EnsembleDim, t1: f64) -> Operator {
    let id_a = Operator::identity(2);
    let sz = Operator::sigma_z();
    let k = match params.interaction {
        Interaction::Zz => {
            let phi = params.omega_p * t1;
            let gt = params.g * t1;
            let along = phase_generator(dim, -phi).matrix().kron(&id_a).scale(gt.cos());
            let across = phase_generator(dim, FRAC_PI_2 - phi).matrix().kron(&sz).scale(gt.sin());
            &along - &across
        }
        Interaction::Xz => {
            let c = bch_coefficients(params, t1).expect("interaction checked");
            let (jx, jy, jz) = collective_ops(dim);
            let z = jz.kron(&id_a).scale(c.cz);
            let planar = (&jx.scale(c.cx) + &jy.scale(c.cy)).kron(&sz);
            -&(&z + &planar)
        }
    };
    k.tag_hermitian()
}

/// Closed-form circuit unitary `exp(-i theta K)`.
///
/// Valid only under exact time reversal: in period mode the period must be
/// verified, otherwise [`Error::UnverifiedPeriod`] is returned.
pub fn closed_form_unitary(params: &ModelParams, dim: EnsembleDim, sched: &Schedule) -> Result<Operator> {
    if let Reversal::Period { total } = sched.reversal {
        let residual = 1.0 - normalized_trace(params, dim, total);
        if residual >= PERIOD_RESIDUAL_TOL {
            return Err(Error::UnverifiedPeriod {
                period: total,
                residual,
            });
        }
    }
    unitary_of_hermitian(&closed_form_generator(params, dim, sched.t1), sched.theta)
}

/// Whether the recommended settings reach the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingStatus {
    Optimal,
    /// Weak XZ coupling (`g < omega_P`): only the ancilla-dependent term of the
    /// generator overlap can be cancelled.
    SubOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalSettings {
    pub theta0: f64,
    pub t1: f64,
    pub status: SettingStatus,
}

/// Optimal ancilla angle and first-step duration on branch `n`.
pub fn optimal_settings(params: &ModelParams, n: u32) -> OptimalSettings {
    let n = n as f64;
    let theta0 = FRAC_PI_2;
    match params.interaction {
        Interaction::Zz => OptimalSettings {
            theta0,
            t1: (n + 0.5) * PI / params.g,
            status: SettingStatus::Optimal,
        },
        Interaction::Xz => {
            let wt = params.omega_tilde();
            if params.g >= params.omega_p.abs() {
                let ratio = -(params.omega_p * params.omega_p) / (params.g * params.g);
                OptimalSettings {
                    theta0,
                    t1: (ratio.clamp(-1.0, 1.0).acos() + 2.0 * n * PI) / wt,
                    status: SettingStatus::Optimal,
                }
            } else {
                OptimalSettings {
                    theta0,
                    t1: (2.0 * n + 1.0) * PI / wt,
                    status: SettingStatus::SubOptimal,
                }
            }
        }
    }
}

/// The probe generator whose extremal eigenstates are the optimal probes
/// at first-step duration `t1`: `J(pi/2 - omega_P t1)` for ZZ, `c_x J_x + c_y J_y` for XZ.
pub fn optimal_generator(params: &ModelParams, dim: EnsembleDim, t1: f64) -> PhaseGenerator {
    match params.interaction {
        Interaction::Zz => PhaseGenerator::opt_zz(dim, FRAC_PI_2 - params.omega_p * t1),
        Interaction::Xz => {
            let c = bch_coefficients(params, t1).expect("interaction checked");
            PhaseGenerator::xz(dim, c.cx, c.cy, c.cz)
        }
    }
}

/// Checks a joint operator against the declared dimension.
pub(crate) fn check_joint(dim: EnsembleDim, op: &Operator) -> Result<()> {
    if op.dim() != dim.joint_dim() {
        return Err(Error::DimensionMismatch {
            expected: dim.joint_dim(),
            found: op.dim(),
        });
    }
    Ok(())
}

/// `probe (x) ancilla` as a joint operator; re-exported for callers building
/// their own input states.
pub fn product_state(probe: &Operator, ancilla: &Operator) -> Result<Operator> {
    joint_embed(probe, ancilla)
}
