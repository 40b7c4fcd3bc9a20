//! Dense complex matrices of dimension 2 (one qubit) and 4 (system ⊗ controller).
//!
//! Every four-dimensional object uses the subsystem order (system, controller):
//! basis index `2 * i + k` pairs system level `i` with controller level `k`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ENTRIES: usize = 16;
const MAX_SWEEPS: usize = 100;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(Error::UnsupportedDim(d)),
    }
}

#[inline]
fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Which factor of a two-qubit operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Controller,
}

/// Square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat<T: Real> {
    dim: usize,
    data: [Complex<T>; MAX_ENTRIES],
}

impl<T: Real> fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Complex<T>]> = self.data[..self.dim * self.dim]
            .chunks(self.dim)
            .collect();
        f.debug_struct("CMat")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [czero(); MAX_ENTRIES],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = creal(T::one());
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major complex entries.
    pub fn from_complex(dim: usize, entries: &[Complex<T>]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                found: entries.len(),
            });
        }
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major real entries.
    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        let cs: Vec<Complex<T>> = entries.iter().map(|&x| creal(x)).collect();
        Self::from_complex(dim, &cs)
    }

    pub fn diag(values: &[T]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * dim + i] = creal(v);
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        self.data[row * self.dim + col] = value;
    }

    /// Row-major view of the `dim * dim` entries.
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data[..self.dim * self.dim]
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        let mut out = *self;
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o = f(*o, *b);
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == czero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: T) -> Self {
        self.scale_complex(creal(factor))
    }

    pub fn scale_complex(&self, factor: Complex<T>) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z = *z * factor);
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries()
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.try_sub(other)?.max_abs())
    }

    pub fn frobenius(&self) -> T {
        self.entries()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-abs entry of `self - self†`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// Kronecker product `self ⊗ other` of two qubit operators.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        for m in [self, other] {
            if m.dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: m.dim,
                });
            }
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.data[i * 2 + j];
                for k in 0..2 {
                    for l in 0..2 {
                        out.data[(2 * i + k) * 4 + (2 * j + l)] = a * other.data[k * 2 + l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Traces out one factor of a (system, controller) operator.
    pub fn partial_trace(&self, keep: Subsystem) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.dim,
            });
        }
        let mut out = Self::zeros(2)?;
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = czero();
                for t in 0..2 {
                    let (row, col) = match keep {
                        Subsystem::System => (2 * a + t, 2 * b + t),
                        Subsystem::Controller => (2 * t + a, 2 * t + b),
                    };
                    acc = acc + self.data[row * 4 + col];
                }
                out.data[a * 2 + b] = acc;
            }
        }
        Ok(out)
    }

    /// System operator `(I ⊗ ⟨bra|) self (I ⊗ |ket⟩)`.
    pub fn controller_block(&self, bra: &Ket<T>, ket: &Ket<T>) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.dim,
            });
        }
        let mut out = Self::zeros(2)?;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = czero();
                for k in 0..2 {
                    for l in 0..2 {
                        acc = acc
                            + bra.amp[k].conj() * self.data[(2 * i + k) * 4 + (2 * j + l)] * ket.amp[l];
                    }
                }
                out.data[i * 2 + j] = acc;
            }
        }
        Ok(out)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Dimension 2 uses the closed-form quadratic, dimension 4 cyclic Jacobi
    /// rotations.
    pub fn herm_eigvals(&self) -> Result<Vec<T>> {
        let dev = self.hermiticity_deviation();
        if !(dev <= T::lit(T::EXACT_TOL)) {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        match self.dim {
            2 => {
                let a = self.data[0].re;
                let d = self.data[3].re;
                let b = self.data[1].norm();
                let two = T::lit(2.0);
                let mean = (a + d) / two;
                let rad = ((a - d) / two).hypot(b);
                Ok(vec![mean - rad, mean + rad])
            }
            _ => Ok(jacobi_eigh(self)?.0),
        }
    }
}

/// Cyclic complex Jacobi diagonalisation of a Hermitian matrix.
///
/// Returns ascending eigenvalues and the unitary `V` whose columns are the
/// matching eigenvectors, so that `V · diag(λ) · V† = a`.
pub(crate) fn jacobi_eigh<T: Real>(a: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    let n = a.dim;
    let mut m = *a;
    let mut v = CMat::identity(n)?;
    let scale = T::one().max(a.frobenius());
    let tol = T::lit(T::JACOBI_TOL) * scale;

    let off = |m: &CMat<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + m.data[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off: off(&m).to_f64().unwrap_or(f64::NAN),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m.data[p * n + q];
                let mag = b.norm();
                if mag == T::zero() {
                    continue;
                }
                let phase = b / mag;
                let alpha = m.data[p * n + p].re;
                let beta = m.data[q * n + q].re;
                let theta = (beta - alpha) / (T::lit(2.0) * mag);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                let mut g = CMat::identity(n)?;
                g.data[p * n + p] = creal(c);
                g.data[p * n + q] = creal(s);
                g.data[q * n + p] = phase.conj() * creal(-s);
                g.data[q * n + q] = phase.conj() * creal(c);

                m = g.dagger().matmul(&m)?.matmul(&g)?;
                m.data[p * n + q] = czero();
                m.data[q * n + p] = czero();
                for i in 0..n {
                    m.data[i * n + i].im = T::zero();
                }
                v = v.matmul(&g)?;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.data[i * n + i]
            .re
            .partial_cmp(&m.data[j * n + j].re)
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| m.data[i * n + i].re).collect();
    let mut vecs = CMat::zeros(n)?;
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vecs.data[row * n + col] = v.data[row * n + src];
        }
    }
    Ok((values, vecs))
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;

    /// Panics on dimension mismatch; see [`CMat::try_add`].
    fn add(self, rhs: Self) -> CMat<T> {
        self.try_add(rhs).expect("dimension mismatch in add")
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;

    fn sub(self, rhs: Self) -> CMat<T> {
        self.try_sub(rhs).expect("dimension mismatch in sub")
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;

    fn mul(self, rhs: Self) -> CMat<T> {
        self.matmul(rhs).expect("dimension mismatch in matmul")
    }
}

/// Pure qubit state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<T: Real> {
    pub amp: [Complex<T>; 2],
}

impl<T: Real> Ket<T> {
    pub fn new(a0: Complex<T>, a1: Complex<T>) -> Self {
        Self { amp: [a0, a1] }
    }

    pub fn zero() -> Self {
        Self::new(creal(T::one()), czero())
    }

    pub fn one() -> Self {
        Self::new(czero(), creal(T::one()))
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::new(creal(h), creal(h))
    }

    /// `(|0⟩ - |1⟩)/√2`
    pub fn minus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::new(creal(h), creal(-h))
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amp[0].conj() * other.amp[0] + self.amp[1].conj() * other.amp[1]
    }

    pub fn norm(&self) -> T {
        self.inner(self).re.sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.amp[0] / n, self.amp[1] / n)
    }

    /// Projector onto the ray spanned by `self`: `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    ///
    /// Dividing by the computed norm keeps e.g. `|+⟩⟨+|` at exactly `0.5`
    /// entrywise even though `1/√2` is not representable.
    pub fn projector(&self) -> CMat<T> {
        let norm_sqr = self.amp[0].norm_sqr() + self.amp[1].norm_sqr();
        let mut m = CMat::zeros(2).expect("dim 2");
        for i in 0..2 {
            for j in 0..2 {
                m.data[i * 2 + j] = self.amp[i] * self.amp[j].conj() / norm_sqr;
            }
        }
        m
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T: Real> {
    mat: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `mat` against the density-matrix invariants.
    pub fn new(mat: CMat<T>) -> Result<Self> {
        Self::check(&mat)?;
        Ok(Self { mat })
    }

    pub(crate) fn new_unchecked(mat: CMat<T>) -> Self {
        Self { mat }
    }

    fn check(mat: &CMat<T>) -> Result<()> {
        check_dim(mat.dim)?;
        if !mat.is_finite() {
            return Err(Error::NotDensityMatrix("non-finite entry".into()));
        }
        let herm = mat.hermiticity_deviation();
        if herm > T::lit(T::EXACT_TOL) {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity deviation {herm:e}"
            )));
        }
        let tr = mat.trace();
        let tr_dev = (tr - creal(T::one())).norm();
        if tr_dev > T::lit(T::EXACT_TOL) {
            return Err(Error::NotDensityMatrix(format!("trace {} deviates from 1", tr.re)));
        }
        let min = mat.herm_eigvals()?[0];
        if min < -T::lit(T::PSD_TOL) {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Re-checks the invariants; useful on states assembled from trusted parts.
    pub fn validate(&self) -> Result<()> {
        Self::check(&self.mat)
    }

    pub fn pure(ket: &Ket<T>) -> Result<Self> {
        Self::new(ket.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let id = CMat::identity(dim)?;
        Ok(Self {
            mat: id.scale(T::one() / T::from_usize(dim).expect("small dim")),
        })
    }

    pub fn diagonal(populations: &[T]) -> Result<Self> {
        Self::new(CMat::diag(populations)?)
    }

    /// Qubit state `(I + x X + y Y + z Z)/2` for a Bloch vector of length ≤ 1.
    pub fn from_bloch(x: T, y: T, z: T) -> Result<Self> {
        let h = T::lit(0.5);
        let mat = CMat::from_complex(
            2,
            &[
                creal(h * (T::one() + z)),
                Complex::new(h * x, -h * y),
                Complex::new(h * x, h * y),
                creal(h * (T::one() - z)),
            ],
        )?;
        Self::new(mat)
    }

    #[inline]
    pub fn mat(&self) -> &CMat<T> {
        &self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    /// Real part of the `level`-th diagonal entry.
    pub fn population(&self, level: usize) -> T {
        self.mat.get(level, level).re
    }

    pub fn eigvals(&self) -> Result<Vec<T>> {
        self.mat.herm_eigvals()
    }

    /// Spectrum with rounding noise removed: values in `[-PSD_TOL, 0)` become
    /// 0 and values above 1 become 1.
    pub fn clipped_spectrum(&self) -> Result<Vec<T>> {
        Ok(self
            .eigvals()?
            .into_iter()
            .map(|x| x.max(T::zero()).min(T::one()))
            .collect())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self::new_unchecked(self.mat.tensor(&other.mat)?))
    }

    pub fn partial_trace(&self, keep: Subsystem) -> Result<Self> {
        Ok(Self::new_unchecked(self.mat.partial_trace(keep)?))
    }
}

/// `½ Σ |eig(a − b)|`
pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    let diff = a.mat.try_sub(&b.mat)?;
    let eig = diff.herm_eigvals()?;
    Ok(T::lit(0.5) * eig.into_iter().map(|x| x.abs()).sum::<T>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMat<f64> {
        let mut m = CMat::zeros(dim).unwrap();
        for i in 0..dim {
            m.set(i, i, c(rng.gen_range(-1.0..1.0), 0.0));
            for j in (i + 1)..dim {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    #[test]
    fn tensor_examples() {
        let i2 = CMat::<f64>::identity(2).unwrap();
        assert_eq!(i2.tensor(&i2).unwrap(), CMat::identity(4).unwrap());

        let a = CMat::diag(&[1.0, 0.0]).unwrap();
        let b = CMat::diag(&[0.0, 1.0]).unwrap();
        assert_eq!(a.tensor(&b).unwrap(), CMat::diag(&[0.0, 1.0, 0.0, 0.0]).unwrap());

        let plus = Ket::<f64>::plus().projector();
        let zero = Ket::<f64>::zero().projector();
        let t = plus.tensor(&zero).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if [0, 2].contains(&i) && [0, 2].contains(&j) { 0.5 } else { 0.0 };
                assert!((t.get(i, j) - c(expected, 0.0)).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn tensor_rejects_dim4() {
        let i4 = CMat::<f64>::identity(4).unwrap();
        let i2 = CMat::<f64>::identity(2).unwrap();
        assert!(matches!(i4.tensor(&i2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_trace_examples() {
        let rho = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let sigma = DensityMatrix::from_bloch(-0.1, 0.4, 0.2).unwrap();
        let joint = rho.tensor(&sigma).unwrap();
        let sys = joint.partial_trace(Subsystem::System).unwrap();
        assert!(sys.mat().max_abs_diff(rho.mat()).unwrap() < 1e-15);
        let ctl = joint.partial_trace(Subsystem::Controller).unwrap();
        assert!(ctl.mat().max_abs_diff(sigma.mat()).unwrap() < 1e-15);

        let mixed = CMat::<f64>::identity(4).unwrap().scale(0.25);
        let half = mixed.partial_trace(Subsystem::Controller).unwrap();
        assert!(half.max_abs_diff(&CMat::identity(2).unwrap().scale(0.5)).unwrap() < 1e-15);

        assert!(CMat::<f64>::identity(2)
            .unwrap()
            .partial_trace(Subsystem::System)
            .is_err());
    }

    #[test]
    fn eigvals_examples() {
        let d = CMat::<f64>::diag(&[0.8, 0.2]).unwrap();
        let ev = d.herm_eigvals().unwrap();
        assert!((ev[0] - 0.2).abs() < 1e-15 && (ev[1] - 0.8).abs() < 1e-15);

        let ev = Ket::<f64>::plus().projector().herm_eigvals().unwrap();
        assert!(ev[0].abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);

        let m = CMat::<f64>::from_real(2, &[0.5, 0.3, 0.3, 0.5]).unwrap();
        let ev = m.herm_eigvals().unwrap();
        assert!((ev[0] - 0.2).abs() < 1e-15 && (ev[1] - 0.8).abs() < 1e-15);

        let d4 = CMat::diag(&[0.4, 0.1, 0.3, 0.2]).unwrap();
        assert_eq!(d4.herm_eigvals().unwrap(), vec![0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn eigvals_reject_non_hermitian() {
        let m = CMat::from_real(2, &[0.5, 0.3, 0.1, 0.5]).unwrap();
        assert!(matches!(m.herm_eigvals(), Err(Error::NotHermitian { .. })));
        let m4 = CMat::from_real(
            4,
            &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        assert!(m4.herm_eigvals().is_err());
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = random_hermitian(&mut rng, 4);
            let (vals, v) = jacobi_eigh(&a).unwrap();
            let rebuilt = &(&v * &CMat::diag(&vals).unwrap()) * &v.dagger();
            assert!(rebuilt.max_abs_diff(&a).unwrap() <= 1e-10);
            let unitary = &v * &v.dagger();
            assert!(unitary.max_abs_diff(&CMat::identity(4).unwrap()).unwrap() <= 1e-12);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 4] {
            for _ in 0..1000 {
                let a = random_hermitian(&mut rng, dim);
                let sum: f64 = a.herm_eigvals().unwrap().iter().sum();
                assert!((sum - a.trace().re).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_handles_degenerate_and_rank_one() {
        let psi = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        let mut m = CMat::zeros(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                m.set(i, j, psi[i] * psi[j].conj());
            }
        }
        let ev = m.herm_eigvals().unwrap();
        for x in &ev[..3] {
            assert!(x.abs() < 1e-14);
        }
        assert!((ev[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ring_operations() {
        let a = CMat::from_complex(2, &[c(1.0, 2.0), c(0.5, -1.0), c(0.0, 3.0), c(-2.0, 0.0)]).unwrap();
        let b = CMat::from_complex(2, &[c(0.3, 0.0), c(1.0, 1.0), c(-1.0, 0.5), c(0.0, -2.0)]).unwrap();
        let id = CMat::identity(2).unwrap();
        assert_eq!(&id * &a, a);
        assert_eq!(a.dagger().dagger(), a);
        let ab = (&a * &b).trace();
        let ba = (&b * &a).trace();
        assert!((ab - ba).norm() < 1e-14);

        let f1 = CMat::diag(&[1.0, -1.0]).unwrap().scale((1.0f64 - 0.8).sqrt());
        assert_eq!(f1.dagger(), f1);

        let r: f64 = 0.7;
        let energy = (&CMat::diag(&[r, 1.0 - r]).unwrap() * &CMat::diag(&[0.0, 1.0]).unwrap()).trace();
        assert!((energy.re - (1.0 - r)).abs() < 1e-15);

        assert!(a.matmul(&CMat::identity(4).unwrap()).is_err());
        assert!(a.try_add(&CMat::identity(4).unwrap()).is_err());
        assert!(CMat::<f64>::zeros(3).is_err());
        assert!(CMat::<f64>::from_real(2, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::from_bloch(0.1, 0.2, 0.3).unwrap();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);

        let zero = DensityMatrix::pure(&Ket::<f64>::zero()).unwrap();
        let one = DensityMatrix::pure(&Ket::<f64>::one()).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);

        let a = DensityMatrix::<f64>::diagonal(&[0.8, 0.2]).unwrap();
        let b = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.3).abs() < 1e-15);

        let m4 = DensityMatrix::<f64>::maximally_mixed(4).unwrap();
        assert!(trace_distance(&a, &m4).is_err());
    }

    #[test]
    fn density_matrix_rejects_invalid() {
        assert!(DensityMatrix::diagonal(&[0.7, 0.7]).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::new(CMat::from_real(2, &[0.5, 0.3, 0.1, 0.5]).unwrap()).is_err());
        assert!(DensityMatrix::diagonal(&[f64::NAN, 0.5]).is_err());
        // rounding-level negativity is tolerated
        assert!(DensityMatrix::diagonal(&[1.0 + 5e-11, -5e-11]).is_ok());
    }

    #[test]
    fn controller_block_of_product_state() {
        let rho = DensityMatrix::from_bloch(0.3, 0.0, -0.4).unwrap();
        let joint = rho.tensor(&DensityMatrix::pure(&Ket::plus()).unwrap()).unwrap();
        let blk = joint.mat().controller_block(&Ket::plus(), &Ket::plus()).unwrap();
        assert!(blk.max_abs_diff(rho.mat()).unwrap() < 1e-15);
        let off = joint.mat().controller_block(&Ket::plus(), &Ket::minus()).unwrap();
        assert!(off.max_abs() < 1e-15);
    }

    #[test]
    fn single_precision_kernel() {
        let m = CMat::<f32>::from_real(2, &[0.5, 0.3, 0.3, 0.5]).unwrap();
        let ev = m.herm_eigvals().unwrap();
        assert!((ev[0] - 0.2).abs() < 1e-6 && (ev[1] - 0.8).abs() < 1e-6);
        let d = CMat::<f32>::diag(&[0.1, 0.4, 0.3, 0.2]).unwrap();
        let u = Ket::<f32>::plus().projector().tensor(&Ket::plus().projector()).unwrap();
        let m4 = &d.scale(0.5) + &u.scale(0.5);
        let sum: f32 = m4.herm_eigvals().unwrap().iter().sum();
        assert!((sum - 1.0).abs() < 1e-5);
    }
}
