//! Collective spin algebra in the symmetric (Dicke) subspace.
//!
//! Basis conventions used throughout the crate:
//!
//! * probe states are indexed by `k = 0..=N`, with `J_z` eigenvalue
//!   `m = k - j` (ascending from `-j` to `+j`);
//! * the ancilla basis is `(|e>, |g>)` with `|e>` at index 0, so
//!   `sigma_z = diag(+1, -1)`;
//! * joint operators are Kronecker products with the probe factor first,
//!   i.e. joint index `2k + a`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance on `max |A - A^dagger|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity tolerance on `max |U^dagger U - I|`.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Size of the probe ensemble.
///
/// Stores the spin count `N`; the total spin `j = N / 2` and the Dicke
/// dimension `N + 1` are derived, so half-integer arithmetic stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleDim {
    n_spins: usize,
}

impl EnsembleDim {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidDimension(n_spins));
        }
        Ok(Self { n_spins })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Total spin `j = N / 2`.
    pub fn j(&self) -> f64 {
        self.n_spins as f64 / 2.0
    }

    /// Dimension of the symmetric subspace, `N + 1`.
    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    /// Dimension of the probe plus ancilla space, `2 (N + 1)`.
    pub fn joint_dim(&self) -> usize {
        2 * self.dim()
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// All magnetic quantum numbers, ascending.
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(move |k| self.m(k))
    }
}

/// Dense complex square matrix with advisory Hermitian / unitary tags.
///
/// Tags are set by constructors that guarantee the property (for example
/// [`unitary_of_hermitian`]) and can be re-checked with
/// [`Operator::hermiticity_error`] and [`Operator::unitarity_error`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    /// Wraps a square matrix without any tags.
    ///
    /// # Panics
    ///
    /// Panics if `mat` is not square.
    pub fn new(mat: DMatrix<Complex64>) -> Self {
        assert!(mat.is_square(), "operator matrix must be square");
        Self {
            mat,
            hermitian: false,
            unitary: false,
        }
    }

    /// Wraps a matrix after checking it is Hermitian to [`HERMITIAN_TOL`].
    pub fn hermitian(mat: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(mat);
        let deviation = op.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
            hermitian: true,
            unitary: true,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            mat: DMatrix::from_diagonal(&d),
            hermitian: true,
            unitary: false,
        }
    }

    /// Pauli `sigma_z = diag(+1, -1)` in the `(|e>, |g>)` basis.
    pub fn sigma_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    /// Pauli `sigma_x`.
    pub fn sigma_x() -> Self {
        Self {
            mat: DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            hermitian: true,
            unitary: true,
        }
    }

    /// Pauli `sigma_y`.
    pub fn sigma_y() -> Self {
        Self {
            mat: DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            hermitian: true,
            unitary: true,
        }
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Self {
        Self::new(a * b.adjoint())
    }

    /// Projector `|v><v|`.
    pub fn projector(v: &DVector<Complex64>) -> Self {
        let mut op = Self::outer(v, v);
        op.hermitian = true;
        op
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn is_tagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_tagged_unitary(&self) -> bool {
        self.unitary
    }

    pub(crate) fn tag_hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }

    pub(crate) fn tag_unitary(mut self) -> Self {
        self.unitary = true;
        self
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    /// `max |A^dagger A - I|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(&(self.mat.adjoint() * &self.mat), &DMatrix::identity(n, n))
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.hermitian {
            return Ok(());
        }
        let deviation = self.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            Err(Error::NotHermitian { deviation })
        } else {
            Ok(())
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(c, 0.0),
            hermitian: self.hermitian,
            unitary: false,
        }
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        Self::new(&self.mat * c)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
            hermitian: self.hermitian && other.hermitian,
            unitary: self.unitary && other.unitary,
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.mat * v
    }

    /// `<u| A |v>`.
    pub fn sandwich(&self, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
        u.dotc(&(&self.mat * v))
    }

    /// Real expectation value `<v| A |v>` (imaginary part discarded).
    pub fn expectation(&self, v: &DVector<Complex64>) -> f64 {
        self.sandwich(v, v).re
    }

    /// `max |A - B|` over all entries.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }

    /// Distance insensitive to a global phase.
    ///
    /// The phase is taken from the largest-magnitude entry of `other`:
    /// returns `max |A - e^{i phi} B|` with `phi = arg(A_kl / B_kl)`.
    pub fn phase_insensitive_distance(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let (idx, _) = other
            .mat
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
        let a = self.mat.as_slice()[idx];
        let b = other.mat.as_slice()[idx];
        let phase = if b.norm() == 0.0 || a.norm() == 0.0 {
            ONE
        } else {
            let r = a / b;
            r / r.norm()
        };
        max_abs_diff(&self.mat, &(&other.mat * phase))
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
            hermitian: false,
            unitary: self.unitary && rhs.unitary,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
            hermitian: self.hermitian && rhs.hermitian,
            unitary: false,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
            hermitian: self.hermitian && rhs.hermitian,
            unitary: false,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        Operator {
            mat: -&self.mat,
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Collective spin operators `(J_x, J_y, J_z)` for `N` spins.
pub fn collective_ops(dim: EnsembleDim) -> (Operator, Operator, Operator) {
    let n = dim.dim();
    let j = dim.j();
    // J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
    let mut raise = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n - 1 {
        let m = dim.m(k);
        raise[(k + 1, k)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let jx = (&raise + &lower) * Complex64::new(0.5, 0.0);
    let jy = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let jz: Vec<f64> = dim.m_values().collect();
    (
        Operator::new(jx).tag_hermitian(),
        Operator::new(jy).tag_hermitian(),
        Operator::from_real_diagonal(&jz),
    )
}

/// Which family a [`PhaseGenerator`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    /// `cos(phi) J_x + sin(phi) J_y`.
    Planar { phi: f64 },
    /// The optimized planar generator of the ZZ protocol, `J(pi/2 - omega_P t1)`.
    OptZz { phi: f64 },
    /// The probe part `c_x J_x + c_y J_y` of the XZ closed form.
    Xz { cx: f64, cy: f64, cz: f64 },
}

/// A Hermitian generator on the probe's Dicke subspace.
#[derive(Debug, Clone)]
pub struct PhaseGenerator {
    kind: GeneratorKind,
    matrix: Operator,
}

impl PhaseGenerator {
    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Generator for the optimized ZZ protocol, `J(phi)` labelled as such.
    pub fn opt_zz(dim: EnsembleDim, phi: f64) -> Self {
        Self {
            kind: GeneratorKind::OptZz { phi },
            matrix: planar_matrix(dim, phi),
        }
    }

    /// Generator `c_x J_x + c_y J_y` for the XZ protocol.
    pub fn xz(dim: EnsembleDim, cx: f64, cy: f64, cz: f64) -> Self {
        let (jx, jy, _) = collective_ops(dim);
        Self {
            kind: GeneratorKind::Xz { cx, cy, cz },
            matrix: &jx.scale(cx) + &jy.scale(cy),
        }
    }

    /// Wraps an arbitrary Hermitian probe operator as a planar-kind generator
    /// with angle zero; intended for tests and custom measurement bases.
    pub fn custom(matrix: Operator) -> Result<Self> {
        matrix.ensure_hermitian()?;
        Ok(Self {
            kind: GeneratorKind::Planar { phi: f64::NAN },
            matrix: matrix.tag_hermitian(),
        })
    }

    pub fn negated(&self) -> Self {
        Self {
            kind: self.kind,
            matrix: -&self.matrix,
        }
    }
}

fn planar_matrix(dim: EnsembleDim, phi: f64) -> Operator {
    let (jx, jy, _) = collective_ops(dim);
    &jx.scale(phi.cos()) + &jy.scale(phi.sin())
}

/// Planar phase generator `J(phi) = cos(phi) J_x + sin(phi) J_y`.
pub fn phase_generator(dim: EnsembleDim, phi: f64) -> PhaseGenerator {
    PhaseGenerator {
        kind: GeneratorKind::Planar { phi },
        matrix: planar_matrix(dim, phi),
    }
}

/// An eigenpair of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<Complex64>,
}

/// Eigen-decomposition of a Hermitian operator.
///
/// Eigenvalues are ascending. Each eigenvector is normalized and its global
/// phase is fixed so that the first component of (near-)maximal magnitude is
/// real and positive, which makes the output reproducible run to run.
pub fn eigenbasis(op: &Operator) -> Result<Vec<EigenPair>> {
    op.ensure_hermitian()?;
    // Symmetrize away sub-tolerance noise before handing off to the solver.
    let herm = (op.matrix() + op.matrix().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut pairs: Vec<EigenPair> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&value, col)| EigenPair {
            value,
            vector: fix_phase(col.into_owned()),
        })
        .collect();
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

fn fix_phase(mut v: DVector<Complex64>) -> DVector<Complex64> {
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-10)).copied() {
        let phase = pivot.conj() / pivot.norm();
        v *= phase;
    }
    v
}

/// `e^{-i H t}` by spectral decomposition of a Hermitian `H`.
pub fn unitary_of_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    let pairs = eigenbasis(h)?;
    Ok(unitary_from_eigen(&pairs, h.dim(), t))
}

pub(crate) fn unitary_from_eigen(pairs: &[EigenPair], dim: usize, t: f64) -> Operator {
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for pair in pairs {
        let phase = Complex64::from_polar(1.0, -pair.value * t);
        u += (&pair.vector * phase) * pair.vector.adjoint();
    }
    Operator::new(u).tag_unitary()
}

/// Embeds a probe operator and an ancilla operator as `probe (x) ancilla`.
pub fn joint_embed(probe_op: &Operator, ancilla_op: &Operator) -> Result<Operator> {
    if ancilla_op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ancilla_op.dim(),
        });
    }
    Ok(probe_op.kron(ancilla_op))
}

/// Lifts a probe vector and an ancilla vector to the joint space.
pub fn joint_vector(probe: &DVector<Complex64>, ancilla: &DVector<Complex64>) -> DVector<Complex64> {
    probe.kronecker(ancilla)
}
