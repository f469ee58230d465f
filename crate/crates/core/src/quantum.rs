//! Qubit states, the three channel families and their generators.
//!
//! Conventions used throughout:
//! - the system is the first tensor factor, the ancilla the second;
//! - |0⟩ is the +1 eigenvector of σ_z;
//! - superoperators act on row-major flattened matrices, so
//!   `vec(A X B) = (A ⊗ Bᵀ) vec(X)`. With this ordering the Lindblad
//!   generator reads `-i(H ⊗ I - I ⊗ Hᵀ) + Σ γ (J ⊗ J̄ - I)` for
//!   self-adjoint J with J² = I.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, C64, I, ONE, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

pub fn sigma_x() -> CMatrix {
    CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_major(alloc::vec![ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Two-qubit SWAP.
pub fn swap_gate() -> CMatrix {
    CMatrix::from_fn(4, |i, j| {
        let (a, b) = (i / 2, i % 2);
        if j == b * 2 + a {
            ONE
        } else {
            ZERO
        }
    })
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates `m` against the state invariants without modifying it.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_state(&m, HERMITIAN_TOL, TRACE_TOL)?;
        Ok(DensityMatrix { m })
    }

    /// Takes the Hermitian part, rescales to unit trace, clips roundoff
    /// negativity on qubits and then validates. This is the cleanup applied
    /// after every propagation.
    pub fn from_propagated(m: &CMatrix) -> Result<Self> {
        let h = m.hermitian_part();
        let tr = h.trace().re;
        if !(libm::fabs(tr - 1.0) <= 1e-8) {
            return Err(Error::Numerical(format!("trace drifted to {tr}")));
        }
        let mut h = h.scale_re(1.0 / tr);
        if h.dim() == 2 {
            clip_qubit(&mut h)?;
        }
        check_state(&h, HERMITIAN_TOL, TRACE_TOL).map_err(|e| Error::Numerical(format!("{e}")))?;
        Ok(DensityMatrix { m: h })
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(invalid("state vector must be nonzero"));
        }
        let inv = 1.0 / libm::sqrt(norm2);
        let v: Vec<C64> = psi.iter().map(|z| z * inv).collect();
        Self::new(CMatrix::outer(&v, &v).hermitian_part())
    }

    /// |0⟩⟨0|
    pub fn ground() -> Self {
        DensityMatrix {
            m: CMatrix::unit(2, 0, 0),
        }
    }

    /// |1⟩⟨1|
    pub fn excited() -> Self {
        DensityMatrix {
            m: CMatrix::unit(2, 1, 1),
        }
    }

    /// |+⟩⟨+| with |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        DensityMatrix {
            m: CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Qubit state from Bloch components; errors if the vector is longer
    /// than one.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = CMatrix::from_row_major(alloc::vec![
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            C64::new(0.5 * (1.0 - z), 0.0),
        ]);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.m.kron(&other.m),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.m)
    }

    /// Largest entrywise distance to another state of the same dimension.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.m.max_abs_diff(&other.m)
    }
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.dim() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let half = 0.5 * (a + d);
        let r = libm::sqrt(0.25 * (a - d) * (a - d) + b.norm_sqr());
        half - r
    } else {
        hermitian_eigenvalues(m)[0]
    }
}

fn check_state(m: &CMatrix, herm_tol: f64, trace_tol: f64) -> Result<()> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidState("empty matrix".into()));
    }
    if m.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > herm_tol {
                return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
            }
        }
    }
    let tr = m.trace();
    if (tr - ONE).norm() > trace_tol {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let ev = min_eigenvalue(m);
    if ev < -PSD_TOL {
        return Err(Error::InvalidState(format!("minimum eigenvalue {ev:e}")));
    }
    Ok(())
}

// Shrinks a qubit Bloch vector back to the unit ball when roundoff pushed it
// just outside.
fn clip_qubit(h: &mut CMatrix) -> Result<()> {
    let x = 2.0 * h[(1, 0)].re;
    let y = 2.0 * h[(1, 0)].im;
    let z = (h[(0, 0)] - h[(1, 1)]).re;
    let len = libm::sqrt(x * x + y * y + z * z);
    if len <= 1.0 {
        return Ok(());
    }
    if len > 1.0 + 2.0 * PSD_TOL {
        return Err(Error::Numerical(format!("qubit Bloch vector length {len}")));
    }
    let s = 1.0 / len;
    let off = h[(0, 1)] * s;
    let zz = z * s;
    h[(0, 0)] = C64::new(0.5 * (1.0 + zz), 0.0);
    h[(1, 1)] = C64::new(0.5 * (1.0 - zz), 0.0);
    h[(0, 1)] = off;
    h[(1, 0)] = off.conj();
    Ok(())
}

/// Partial trace over the second (ancilla) qubit of a 4×4 matrix.
pub fn partial_trace_ancilla_matrix(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(2, |i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)])
}

/// Reduced system state `Tr_A ρ_SA`.
pub fn partial_trace_ancilla(rho_sa: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_sa.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_sa.dim(),
        });
    }
    DensityMatrix::from_propagated(&partial_trace_ancilla_matrix(rho_sa.matrix()))
}

/// Coherence `|Tr(σ₊ ρ)| = |ρ₀₁|` of a qubit state.
pub fn coherence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    Ok(rho.matrix()[(0, 1)].norm())
}

/// Which rate convention a dephasing channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DephasingConvention {
    /// Exponential of `γ(σ_z ρ σ_z − ρ)`: coherences decay as `e^{−2γt}`.
    #[default]
    Generator,
    /// `½[(1 + e^{−γt}) ρ + (1 − e^{−γt}) σ_z ρ σ_z]`: coherences decay as
    /// `e^{−γt}`.
    #[cfg_attr(feature = "serde", serde(alias = "sm_closed_form"))]
    ClosedForm,
}

impl DephasingConvention {
    /// Factor multiplying the off-diagonal entries after time `t`.
    pub fn coherence_factor(self, gamma: f64, t: f64) -> f64 {
        match self {
            DephasingConvention::Generator => libm::exp(-2.0 * gamma * t),
            DephasingConvention::ClosedForm => libm::exp(-gamma * t),
        }
    }
}

/// Dephasing channel applied to a qubit state.
pub fn apply_dephasing(
    rho: &DensityMatrix,
    gamma: f64,
    t: f64,
    convention: DephasingConvention,
) -> Result<DensityMatrix> {
    if !(gamma >= 0.0) || !(t >= 0.0) {
        return Err(invalid("dephasing needs gamma >= 0 and t >= 0"));
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let mut m = rho.matrix().clone();
    dephase_in_place(&mut m, convention.coherence_factor(gamma, t));
    Ok(DensityMatrix { m })
}

fn dephase_in_place(m: &mut CMatrix, factor: f64) {
    m[(0, 1)] *= factor;
    m[(1, 0)] *= factor;
}

/// `U = i cos(gs) I + sin(gs) SWAP`.
pub fn partial_swap_unitary(g: f64, s: f64) -> CMatrix {
    let (sn, cs) = libm::sincos(g * s);
    let swap = swap_gate();
    CMatrix::from_fn(4, |i, j| {
        let id = if i == j { C64::new(0.0, cs) } else { ZERO };
        id + swap[(i, j)] * sn
    })
}

/// A linear map on d×d matrices, stored as a d²×d² matrix acting on
/// row-major flattened operands.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    hilbert_dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(hilbert_dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != hilbert_dim * hilbert_dim {
            return Err(Error::DimensionMismatch {
                expected: hilbert_dim * hilbert_dim,
                found: matrix.dim(),
            });
        }
        Ok(Superoperator { hilbert_dim, matrix })
    }

    pub fn identity(hilbert_dim: usize) -> Self {
        Superoperator {
            hilbert_dim,
            matrix: CMatrix::identity(hilbert_dim * hilbert_dim),
        }
    }

    pub fn zeros(hilbert_dim: usize) -> Self {
        Superoperator {
            hilbert_dim,
            matrix: CMatrix::zeros(hilbert_dim * hilbert_dim),
        }
    }

    /// Tabulates a linear map from its action on matrix units.
    pub fn from_map(hilbert_dim: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let d = hilbert_dim;
        let n = d * d;
        let mut matrix = CMatrix::zeros(n);
        for i in 0..d {
            for j in 0..d {
                let out = f(&CMatrix::unit(d, i, j));
                let col = i * d + j;
                for (row, z) in out.as_slice().iter().enumerate() {
                    matrix[(row, col)] = *z;
                }
            }
        }
        Superoperator { hilbert_dim, matrix }
    }

    /// `-i[H, ·]`
    pub fn commutator(h: &CMatrix) -> Self {
        let d = h.dim();
        let id = CMatrix::identity(d);
        let m = &h.kron(&id) - &id.kron(&h.transpose());
        Superoperator {
            hilbert_dim: d,
            matrix: m.scale(-I),
        }
    }

    /// `γ(J · J† − ·)` for a self-adjoint unitary J (J² = I).
    pub fn dephasing(j: &CMatrix, gamma: f64) -> Self {
        let d = j.dim();
        let n = d * d;
        let m = &j.kron(&j.conj()) - &CMatrix::identity(n);
        Superoperator {
            hilbert_dim: d,
            matrix: m.scale_re(gamma),
        }
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.dim(), self.hilbert_dim);
        CMatrix::from_row_major(self.matrix.mul_vec(x.as_slice()))
    }

    /// `exp(self · t)`
    pub fn exp(&self, t: f64) -> Superoperator {
        Superoperator {
            hilbert_dim: self.hilbert_dim,
            matrix: self.matrix.scale_re(t).exp(),
        }
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            hilbert_dim: self.hilbert_dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            hilbert_dim: self.hilbert_dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, w: f64) -> Superoperator {
        Superoperator {
            hilbert_dim: self.hilbert_dim,
            matrix: self.matrix.scale_re(w),
        }
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.hilbert_dim;
        let mut out = CMatrix::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                let e = self.apply(&CMatrix::unit(d, i, j));
                for a in 0..d {
                    for b in 0..d {
                        out[(i * d + a, j * d + b)] = e[(a, b)];
                    }
                }
            }
        }
        out
    }
}

/// Liouvillian of qubit dephasing `γ(σ_z ρ σ_z − ρ)`.
pub fn dephasing_liouvillian(gamma: f64) -> Superoperator {
    Superoperator::dephasing(&sigma_z(), gamma)
}

/// XXZ Hamiltonian `g(σxσx + σyσy + Δ σzσz)`.
pub fn xxz_hamiltonian(g: f64, delta: f64) -> CMatrix {
    let xx = sigma_x().kron(&sigma_x());
    let yy = sigma_y().kron(&sigma_y());
    let zz = sigma_z().kron(&sigma_z());
    (&(&xx + &yy) + &zz.scale_re(delta)).scale_re(g)
}

/// Joint generator: XXZ exchange plus σ_z dephasing on both qubits.
pub fn xxz_liouvillian(g: f64, delta: f64, gamma: f64) -> Result<Superoperator> {
    if !(gamma >= 0.0) || !g.is_finite() || !delta.is_finite() {
        return Err(invalid("xxz needs finite g, delta and gamma >= 0"));
    }
    let id = CMatrix::identity(2);
    let l = Superoperator::commutator(&xxz_hamiltonian(g, delta))
        .add(&Superoperator::dephasing(&sigma_z().kron(&id), gamma))
        .add(&Superoperator::dephasing(&id.kron(&sigma_z()), gamma));
    Ok(l)
}

/// `exp(L t)` applied to `rho`, cleaned up and validated.
pub fn propagate(l: &Superoperator, t: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(invalid("propagation time must be >= 0"));
    }
    if l.hilbert_dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.hilbert_dim(),
            found: rho.dim(),
        });
    }
    DensityMatrix::from_propagated(&l.exp(t).apply(rho.matrix()))
}

/// Channel families, parameterized by the duration they act for.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ChannelSpec {
    #[default]
    Identity,
    Dephasing {
        gamma: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        convention: DephasingConvention,
    },
    /// `U(s) = i cos(gs) I + sin(gs) SWAP`, acting by conjugation.
    PartialSwap { g: f64 },
    /// Exponential of the XXZ + dephasing Liouvillian.
    XxzDephasing { g: f64, delta: f64, gamma: f64 },
}

impl ChannelSpec {
    /// Hilbert dimension the channel acts on; `None` for the identity,
    /// which acts on anything.
    pub fn hilbert_dim(&self) -> Option<usize> {
        match self {
            ChannelSpec::Identity => None,
            ChannelSpec::Dephasing { .. } => Some(2),
            ChannelSpec::PartialSwap { .. } | ChannelSpec::XxzDephasing { .. } => Some(4),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Identity => Ok(()),
            ChannelSpec::Dephasing { gamma, .. } if !(gamma >= 0.0 && gamma.is_finite()) => {
                Err(invalid("dephasing gamma must be finite and >= 0"))
            }
            ChannelSpec::PartialSwap { g } if !g.is_finite() => Err(invalid("partial swap g must be finite")),
            ChannelSpec::XxzDephasing { g, delta, gamma } => xxz_liouvillian(g, delta, gamma).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// A channel ready for repeated application. Superoperators for the
/// durations passed to [`Channel::with_cached_time`] are precomputed; the
/// value is immutable afterwards and can be shared across threads.
#[derive(Debug, Clone)]
pub struct Channel {
    spec: ChannelSpec,
    generator: Option<Superoperator>,
    cache: Vec<(f64, Superoperator)>,
}

impl Channel {
    pub fn new(spec: ChannelSpec) -> Result<Self> {
        spec.validate()?;
        let generator = match spec {
            ChannelSpec::XxzDephasing { g, delta, gamma } => Some(xxz_liouvillian(g, delta, gamma)?),
            _ => None,
        };
        Ok(Channel {
            spec,
            generator,
            cache: Vec::new(),
        })
    }

    pub fn with_cached_time(mut self, t: f64) -> Self {
        if self.generator.is_some() && !self.cache.iter().any(|(c, _)| *c == t) {
            let s = self.superoperator_uncached(t, 4);
            self.cache.push((t, s));
        }
        self
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.spec, ChannelSpec::Identity)
    }

    /// Applies the channel for duration `t` to an arbitrary operator.
    pub fn apply_matrix(&self, t: f64, x: &CMatrix) -> Result<CMatrix> {
        if let Some(d) = self.spec.hilbert_dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.dim(),
                });
            }
        }
        Ok(match self.spec {
            ChannelSpec::Identity => x.clone(),
            ChannelSpec::Dephasing { gamma, convention } => {
                let mut m = x.clone();
                dephase_in_place(&mut m, convention.coherence_factor(gamma, t));
                m
            }
            ChannelSpec::PartialSwap { g } => {
                let u = partial_swap_unitary(g, t);
                &(&u * x) * &u.dagger()
            }
            ChannelSpec::XxzDephasing { .. } => match self.cache.iter().find(|(c, _)| *c == t) {
                Some((_, s)) => s.apply(x),
                None => self.superoperator_uncached(t, 4).apply(x),
            },
        })
    }

    pub fn apply(&self, t: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_propagated(&self.apply_matrix(t, rho.matrix())?)
    }

    /// Superoperator of the channel at duration `t` on a `dim`-dimensional
    /// space (`dim` matters only for the identity).
    pub fn superoperator(&self, t: f64, dim: usize) -> Result<Superoperator> {
        if let Some(d) = self.spec.hilbert_dim() {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: dim,
                });
            }
        }
        if let Some((_, s)) = self.cache.iter().find(|(c, _)| *c == t) {
            return Ok(s.clone());
        }
        Ok(self.superoperator_uncached(t, dim))
    }

    fn superoperator_uncached(&self, t: f64, dim: usize) -> Superoperator {
        match &self.generator {
            Some(l) => l.exp(t),
            None => Superoperator::from_map(dim, |x| self.apply_matrix(t, x).expect("dimension checked by caller")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_exchanges_product_states() {
        let a = DensityMatrix::plus();
        let b = DensityMatrix::ground();
        let s = swap_gate();
        let out = &(&s * a.kron(&b).matrix()) * &s;
        assert!(out.max_abs_diff(b.kron(&a).matrix()) < 1e-15);
    }

    #[test]
    fn state_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5])).is_err());
        assert!(DensityMatrix::from_bloch(0.0, 0.0, 1.0).is_ok());
        assert!(DensityMatrix::from_bloch(1.0, 0.1, 0.0).is_err());
        let mut m = CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]);
        m[(0, 1)] = C64::new(0.5, 0.1);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(coherence(&DensityMatrix::plus()).unwrap(), 0.5);
        assert_eq!(coherence(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.0);
        assert_eq!(coherence(&DensityMatrix::ground()).unwrap(), 0.0);
        assert!(coherence(&DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn coherence_ignores_raising_convention() {
        let rho = DensityMatrix::from_bloch(0.3, -0.4, 0.1).unwrap();
        let up = CMatrix::unit(2, 0, 1);
        let down = CMatrix::unit(2, 1, 0);
        let a = (&up * rho.matrix()).trace().norm();
        let b = (&down * rho.matrix()).trace().norm();
        assert!((a - b).abs() < 1e-15);
        assert!((a - coherence(&rho).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn dephasing_examples() {
        let rho = DensityMatrix::plus();
        let full = apply_dephasing(&rho, 1.0, 1e3, DephasingConvention::Generator).unwrap();
        assert!(full.distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        let same = apply_dephasing(&rho, 0.3, 0.0, DephasingConvention::ClosedForm).unwrap();
        assert_eq!(same, rho);
        let gen = apply_dephasing(&rho, 0.05, 10.0, DephasingConvention::Generator).unwrap();
        assert!((gen.matrix()[(0, 1)].re - 0.5 * libm::exp(-1.0)).abs() < 1e-15);
        let cf = apply_dephasing(&rho, 0.05, 10.0, DephasingConvention::ClosedForm).unwrap();
        assert!((cf.matrix()[(0, 1)].re - 0.5 * libm::exp(-0.5)).abs() < 1e-15);
        assert!(apply_dephasing(&rho, -1.0, 1.0, DephasingConvention::Generator).is_err());
        assert!(apply_dephasing(&rho, 1.0, -1.0, DephasingConvention::Generator).is_err());
    }

    #[test]
    fn partial_swap_endpoints() {
        let u = partial_swap_unitary(1.0, core::f64::consts::FRAC_PI_2);
        assert!(u.max_abs_diff(&swap_gate()) < 1e-15);
        let u0 = partial_swap_unitary(0.7, 0.0);
        assert!(u0.max_abs_diff(&CMatrix::identity(4).scale(I)) < 1e-15);
    }

    #[test]
    fn xxz_zero_parameters_is_zero() {
        let l = xxz_liouvillian(0.0, 0.3, 0.0).unwrap();
        assert_eq!(l.matrix().max_abs(), 0.0);
    }

    #[test]
    fn xxz_annihilates_identity_and_trace() {
        let l = xxz_liouvillian(0.4, 1.7, 0.2).unwrap();
        let out = l.apply(&CMatrix::identity(4).scale_re(0.25));
        assert!(out.max_abs() < 1e-12);
        // identity row vector is a left null vector
        let id = CMatrix::identity(4);
        for col in 0..16 {
            let s: C64 = (0..16).map(|row| id.as_slice()[row] * l.matrix()[(row, col)]).sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let s = DensityMatrix::from_bloch(0.2, 0.1, -0.3).unwrap();
        let a = DensityMatrix::plus();
        let red = partial_trace_ancilla(&s.kron(&a)).unwrap();
        assert!(red.distance(&s) < 1e-15);
        let red = partial_trace_ancilla(&DensityMatrix::maximally_mixed(4)).unwrap();
        assert!(red.distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]).unwrap();
        let red = partial_trace_ancilla(&bell).unwrap();
        assert!(red.distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        assert!(partial_trace_ancilla(&s).is_err());
    }

    #[test]
    fn from_propagated_clips_roundoff() {
        let mut m = DensityMatrix::plus().into_matrix();
        m[(0, 1)] = C64::new(0.5 + 1e-11, 0.0);
        m[(1, 0)] = C64::new(0.5 + 1e-11, 0.0);
        let rho = DensityMatrix::from_propagated(&m).unwrap();
        assert!(rho.min_eigenvalue() >= -1e-15);
        m[(0, 1)] = C64::new(0.6, 0.0);
        m[(1, 0)] = C64::new(0.6, 0.0);
        assert!(matches!(DensityMatrix::from_propagated(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn channel_dimension_mismatch() {
        let ch = Channel::new(ChannelSpec::PartialSwap { g: 1.0 }).unwrap();
        assert!(ch.apply(1.0, &DensityMatrix::plus()).is_err());
    }
}
