//! Small dense complex matrices.
//!
//! Everything here is sized for qubit work: 2×2 states, 4×4 joint states,
//! 16×16 superoperators. Storage is row-major, so the row-major flattening
//! of a matrix is its `data` slice; that flattening is also the
//! vectorization used by [`crate::quantum::Superoperator`].

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds a matrix from row-major entries. Panics unless `data.len()` is a
    /// perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Self {
        let dim = isqrt(data.len());
        assert_eq!(dim * dim, data.len(), "row-major data must be square");
        CMatrix { dim, data }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        CMatrix {
            dim,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    /// The matrix unit |i⟩⟨j|.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Kronecker product `self ⊗ other`, with `self` as the first factor.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i1 in 0..a {
            for j1 in 0..a {
                let x = self[(i1, j1)];
                if x == ZERO {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        out[(i1 * b + i2, j1 * b + j2)] = x * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential, see [`expm`].
    pub fn exp(&self) -> Self {
        expm(self)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = libm::sqrt(n as f64) as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

// Padé [13/13] coefficients for the exponential.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the [13/13] approximant reaches double precision.
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a [13/13] Padé
/// approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    if a.data.iter().all(|z| *z == ZERO) {
        return CMatrix::identity(n);
    }
    let norm = a.norm1();
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    let scaled = a.scale_re(libm::pow(2.0, -squarings as f64));

    let b = &PADE13;
    let eye = CMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let lin = |terms: &[(&CMatrix, f64)]| -> CMatrix {
        let mut out = CMatrix::zeros(n);
        for (m, c) in terms {
            for (o, x) in out.data.iter_mut().zip(&m.data) {
                *o += x * c;
            }
        }
        out
    };

    let u_inner = lin(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])]);
    let u_inner = &(&a6 * &u_inner) + &lin(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&eye, b[1])]);
    let u = &scaled * &u_inner;
    let v_inner = lin(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])]);
    let v = &(&a6 * &v_inner) + &lin(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&eye, b[0])]);

    let mut r = solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is nonsingular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Solves `A X = B` by LU with partial pivoting. Returns `None` for a
/// numerically singular `A`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    let n = a.dim();
    assert_eq!(n, b.dim());
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| lu[(p, col)].norm().total_cmp(&lu[(q, col)].norm()))
            .unwrap();
        if lu[(pivot, col)].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                lu.data.swap(pivot * n + j, col * n + j);
                x.data.swap(pivot * n + j, col * n + j);
            }
        }
        let inv = ONE / lu[(col, col)];
        for row in col + 1..n {
            let f = lu[(row, col)] * inv;
            if f == ZERO {
                continue;
            }
            for j in col..n {
                let t = lu[(col, j)];
                lu[(row, j)] -= f * t;
            }
            for j in 0..n {
                let t = x[(col, j)];
                x[(row, j)] -= f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = ONE / lu[(col, col)];
        for j in 0..n {
            let mut acc = x[(col, j)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = acc * inv;
        }
    }
    Some(x)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The matrix is embedded as the real symmetric `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is that of `a` with every eigenvalue doubled, and
/// diagonalized by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.dim();
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            // Hermitian part, so tiny asymmetries do not bias the result.
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    jacobi_symmetric(&mut s, m);
    let mut ev: Vec<f64> = (0..m).map(|k| s[k * m + k]).collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

fn jacobi_symmetric(s: &mut [f64], m: usize) {
    let scale: f64 = s.iter().map(|x| x * x).sum::<f64>();
    if scale == 0.0 {
        return;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum();
        if off <= 1e-30 * scale {
            return;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
}

/// Numerical rank with relative tolerance, together with a basis of the
/// null space (as column vectors). Gaussian elimination with complete
/// pivoting.
pub fn null_space(a: &CMatrix, rel_tol: f64) -> Vec<Vec<C64>> {
    let n = a.dim();
    let mut m = a.clone();
    let mut cols: Vec<usize> = (0..n).collect();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for step in 0..n {
        let mut best = (step, step, 0.0);
        for i in step..n {
            for j in step..n {
                let v = m[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= rel_tol * scale {
            break;
        }
        let (pi, pj, _) = best;
        for j in 0..n {
            m.data.swap(step * n + j, pi * n + j);
        }
        for i in 0..n {
            m.data.swap(i * n + step, i * n + pj);
        }
        cols.swap(step, pj);
        let inv = ONE / m[(step, step)];
        for i in step + 1..n {
            let f = m[(i, step)] * inv;
            for j in step..n {
                let t = m[(step, j)];
                m[(i, j)] -= f * t;
            }
        }
        rank += 1;
    }
    // Back substitution for each free variable.
    let mut basis = Vec::new();
    for free in rank..n {
        let mut y = vec![ZERO; n];
        y[free] = ONE;
        for row in (0..rank).rev() {
            let mut acc = ZERO;
            for j in row + 1..n {
                acc += m[(row, j)] * y[j];
            }
            y[row] = -acc / m[(row, row)];
        }
        let mut x = vec![ZERO; n];
        for (k, &c) in cols.iter().enumerate() {
            x[c] = y[k];
        }
        basis.push(x);
    }
    basis
}
