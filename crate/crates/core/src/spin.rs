//! ℂ³ spin vectors, the Pauli correspondence `s ↦ s·σ`, and 2×2 complex matrices.
//!
//! The spin dot product is bilinear: `s·t = s₁t₁ + s₂t₂ + s₃t₃` with no
//! conjugation. The Hermitian pairing appears only where explicitly named.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{ci, cone, cr, czero, Real, C};

/// A complex spin vector `(s₁, s₂, s₃) ∈ ℂ³`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComplexSpin<T: Real>(pub [C<T>; 3]);

impl<T: Real> ComplexSpin<T> {
    pub fn new(s1: C<T>, s2: C<T>, s3: C<T>) -> Self {
        Self([s1, s2, s3])
    }

    pub fn real(v: [T; 3]) -> Self {
        Self([cr(v[0]), cr(v[1]), cr(v[2])])
    }

    pub fn zero() -> Self {
        Self([czero(); 3])
    }

    /// Bilinear dot product.
    pub fn dot(&self, other: &Self) -> C<T> {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Hermitian pairing `s·t̄`.
    pub fn hdot(&self, other: &Self) -> C<T> {
        self.0[0] * other.0[0].conj() + self.0[1] * other.0[1].conj() + self.0[2] * other.0[2].conj()
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Self([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self(self.0.map(|z| z * k))
    }

    /// Euclidean (Hermitian) norm.
    pub fn norm(&self) -> T {
        self.hdot(self).re.sqrt()
    }

    /// Largest imaginary part modulus.
    pub fn max_imag(&self) -> T {
        self.0.iter().map(|z| z.im.abs()).fold(T::zero(), T::max)
    }

    pub fn re(&self) -> [T; 3] {
        self.0.map(|z| z.re)
    }

    /// `s·s = 0` up to `tol·max(1, |s|²)`.
    pub fn is_null(&self, tol: T) -> bool {
        let n2 = self.hdot(self).re;
        self.dot(self).norm() <= tol * n2.max(T::one())
    }
}

impl<T: Real> Index<usize> for ComplexSpin<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.0[i]
    }
}

impl<T: Real> IndexMut<usize> for ComplexSpin<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.0[i]
    }
}

impl<T: Real> Add for ComplexSpin<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for ComplexSpin<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2<T: Real>(pub [[C<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        Self([[czero(); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(cone(), cone())
    }

    pub fn diag(a: C<T>, d: C<T>) -> Self {
        Self::new(a, czero(), czero(), d)
    }

    /// The all-ones matrix `H`.
    pub fn ones() -> Self {
        Self::new(cone(), cone(), cone(), cone())
    }

    pub fn sigma1() -> Self {
        Self::new(czero(), cone(), cone(), czero())
    }

    pub fn sigma2() -> Self {
        Self::new(czero(), -ci::<T>(), ci(), czero())
    }

    pub fn sigma3() -> Self {
        Self::diag(cone(), -cone::<T>())
    }

    pub fn trace(&self) -> C<T> {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self(self.0.map(|row| row.map(|z| z * k)))
    }

    pub fn norm_fro(&self) -> T {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn norm_max(&self) -> T {
        self.0.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Index<(usize, usize)> for Mat2<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.0[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl<T: Real> Mul<C<T>> for Mat2<T> {
    type Output = Self;
    fn mul(self, k: C<T>) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-cone::<T>())
    }
}

impl<T: Real> std::iter::Sum for Mat2<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// `s·σ = [[s₃, s₁ − i s₂], [s₁ + i s₂, −s₃]]`.
pub fn spin_to_matrix<T: Real>(s: &ComplexSpin<T>) -> Mat2<T> {
    let [s1, s2, s3] = s.0;
    let i = ci::<T>();
    Mat2::new(s3, s1 - i * s2, s1 + i * s2, -s3)
}

/// Inverse Pauli map, `m_k = ½ Tr(M σ_k)`. Fails if `|Tr M| > tol·max(1, ‖M‖)`.
pub fn matrix_to_spin<T: Real>(m: &Mat2<T>, tol: T) -> Result<ComplexSpin<T>> {
    let tr = m.trace();
    if tr.norm() > tol * m.norm_fro().max(T::one()) {
        return Err(Error::NonTraceless {
            trace: tr.norm().to_f64_lossy(),
        });
    }
    Ok(matrix_to_spin_unchecked(m))
}

/// Inverse Pauli map without the trace check (drops the trace part).
pub fn matrix_to_spin_unchecked<T: Real>(m: &Mat2<T>) -> ComplexSpin<T> {
    let half = cr(T::lit(0.5));
    let i = ci::<T>();
    let b = m.0[0][1];
    let c = m.0[1][0];
    ComplexSpin([
        (b + c) * half,
        (c - b) * half / i,
        (m.0[0][0] - m.0[1][1]) * half,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64 as c;
    use proptest::prelude::*;

    type S = ComplexSpin<f64>;

    fn close(a: &Mat2<f64>, b: &Mat2<f64>, tol: f64) -> bool {
        (*a - *b).norm_max() < tol
    }

    #[test]
    fn zero_spin_gives_zero_matrix() {
        assert_eq!(spin_to_matrix(&S::zero()), Mat2::zero());
    }

    #[test]
    fn unit_z_gives_sigma3() {
        assert_eq!(spin_to_matrix(&S::real([0.0, 0.0, 1.0])), Mat2::sigma3());
    }

    #[test]
    fn null_spin_example() {
        let s = S::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        let expect = Mat2::new(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(close(&spin_to_matrix(&s), &expect, 1e-15));
    }

    #[test]
    fn matrix_to_spin_examples() {
        let tol = 1e-10;
        let s = matrix_to_spin(&Mat2::sigma3(), tol).unwrap();
        assert_eq!(s, S::real([0.0, 0.0, 1.0]));

        let m = Mat2::new(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let s = matrix_to_spin(&m, tol).unwrap();
        assert!((s - S::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0))).norm() < 1e-15);

        let m = Mat2::new(c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0));
        let s = matrix_to_spin(&m, tol).unwrap();
        assert!((s - S::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))).norm() < 1e-15);
    }

    #[test]
    fn traced_matrix_is_rejected() {
        let err = matrix_to_spin(&Mat2::<f64>::identity(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonTraceless { .. }));
    }

    #[test]
    fn commutator_examples() {
        let x = Mat2::new(c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, 0.0));
        assert_eq!(Mat2::identity().commutator(&x), Mat2::zero());
        let lhs = Mat2::<f64>::sigma1().commutator(&Mat2::sigma2());
        assert!(close(&lhs, &Mat2::sigma3().scale(c(0.0, 2.0)), 1e-15));
    }

    fn spin_strategy() -> impl Strategy<Value = S> {
        prop::array::uniform6(-2.0f64..2.0)
            .prop_map(|v| S::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5])))
    }

    fn null_spin_strategy() -> impl Strategy<Value = S> {
        // s = (a² − b², i(a² + b²), 2ab)·k is null for any complex a, b
        prop::array::uniform4(-1.5f64..1.5).prop_map(|v| {
            let a = c(v[0], v[1]);
            let b = c(v[2], v[3]);
            S::new(a * a - b * b, c(0.0, 1.0) * (a * a + b * b), c(2.0, 0.0) * a * b)
        })
    }

    proptest! {
        #[test]
        fn pauli_product_identity(x in spin_strategy(), y in spin_strategy()) {
            let lhs = spin_to_matrix(&x) * spin_to_matrix(&y);
            let rhs = Mat2::identity().scale(x.dot(&y))
                + spin_to_matrix(&x.cross(&y)).scale(c(0.0, 1.0));
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn commutator_is_cross_product(x in spin_strategy(), y in spin_strategy()) {
            let lhs = spin_to_matrix(&x).commutator(&spin_to_matrix(&y));
            let rhs = spin_to_matrix(&x.cross(&y)).scale(c(0.0, 2.0));
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn anticommutator_is_dot(x in spin_strategy()) {
            let a = spin_to_matrix(&x);
            let rhs = Mat2::identity().scale(x.dot(&x) * c(2.0, 0.0));
            prop_assert!(close(&a.anticommutator(&a), &rhs, 1e-12));
        }

        #[test]
        fn pauli_round_trip(x in spin_strategy()) {
            let back = matrix_to_spin(&spin_to_matrix(&x), 1e-10).unwrap();
            prop_assert!((back - x).norm() < 1e-14);
        }

        #[test]
        fn null_spin_squares_to_zero(s in null_spin_strategy()) {
            prop_assert!(s.dot(&s).norm() < 1e-12);
            let a = spin_to_matrix(&s);
            prop_assert!((a * a).norm_max() < 1e-12);
        }
    }
}
