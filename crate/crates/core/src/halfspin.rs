//! Half-spin factorization `A_j = E_j H F_j` of null spin matrices, the
//! stacked diagonal matrices 𝓔 and 𝓕, the constant matrices `H`, `T`, 𝓗,
//! and the doubled-matrix calculus `U ↦ [U] = U ⊗ I₂`.
//!
//! For a site with half-spins `(α, β)`:
//!
//! ```text
//! e = (α, β),   ξ = (β, −α),   E = diag(α, β),   F = diag(β, −α)
//! E H F = [[αβ, −α²], [β², −αβ]]
//! ```
//!
//! Formulas elsewhere in the crate contract these objects directly at size
//! N×N; the 2N×2N realizations here exist for cross-checks.

use crate::constraints::RationalData;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{ci, cone, czero, Real, C};
use crate::spin::{ComplexSpin, Mat2};

/// Half-spin pair `(α_j, β_j)` of one site.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HalfSpinPair<T: Real> {
    pub alpha: C<T>,
    pub beta: C<T>,
}

impl<T: Real> HalfSpinPair<T> {
    pub fn new(alpha: C<T>, beta: C<T>) -> Self {
        Self { alpha, beta }
    }

    /// `e = (α, β)`.
    pub fn e(&self) -> [C<T>; 2] {
        [self.alpha, self.beta]
    }

    /// `ξ = (β, −α)`.
    pub fn xi(&self) -> [C<T>; 2] {
        [self.beta, -self.alpha]
    }

    /// `E = diag(α, β)`.
    pub fn e_block(&self) -> Mat2<T> {
        Mat2::diag(self.alpha, self.beta)
    }

    /// `F = diag(β, −α)`.
    pub fn f_block(&self) -> Mat2<T> {
        Mat2::diag(self.beta, -self.alpha)
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.alpha, -self.beta)
    }

    /// Spin vector reconstructed from `E H F`.
    pub fn to_spin(&self) -> ComplexSpin<T> {
        let a2 = self.alpha * self.alpha;
        let b2 = self.beta * self.beta;
        let half = C::new(T::lit(0.5), T::zero());
        // s₁ − i s₂ = −α², s₁ + i s₂ = β²
        ComplexSpin::new(
            (b2 - a2) * half,
            (b2 + a2) * half / ci::<T>(),
            self.alpha * self.beta,
        )
    }

    fn distance(&self, other: &Self) -> T {
        (self.alpha - other.alpha).norm() + (self.beta - other.beta).norm()
    }
}

/// `E H F = [[αβ, −α²], [β², −αβ]]`.
pub fn halfspin_to_matrix<T: Real>(p: &HalfSpinPair<T>) -> Mat2<T> {
    let ab = p.alpha * p.beta;
    Mat2::new(ab, -(p.alpha * p.alpha), p.beta * p.beta, -ab)
}

/// Canonical half-spins of a null spin.
///
/// `α` is the principal root of `−s₁ + i s₂`. When `α` is not negligible,
/// `β = s₃/α` so that `αβ = s₃` holds exactly; otherwise `β` is the principal
/// root of `s₁ + i s₂`.
pub fn canonical_halfspins<T: Real>(s: &ComplexSpin<T>, tol: T) -> Result<HalfSpinPair<T>> {
    if !s.is_null(tol) {
        return Err(Error::NotNull {
            site: None,
            residual: s.dot(s).norm().to_f64_lossy(),
        });
    }
    Ok(canonical_halfspins_unchecked(s))
}

/// Branch rule of [`canonical_halfspins`] without the nullity check.
pub fn canonical_halfspins_unchecked<T: Real>(s: &ComplexSpin<T>) -> HalfSpinPair<T> {
    let i = ci::<T>();
    let alpha = (-s[0] + i * s[1]).sqrt();
    let threshold = T::tol(1e-12, 16.0) * s.norm().max(T::one()).sqrt();
    let beta = if alpha.norm() > threshold {
        s[2] / alpha
    } else {
        (s[0] + i * s[1]).sqrt()
    };
    HalfSpinPair::new(alpha, beta)
}

/// Of the two half-spin lifts `±(α, β)` of `s`, the one closest to `prev`.
pub fn continuous_halfspins<T: Real>(s: &ComplexSpin<T>, prev: &HalfSpinPair<T>) -> HalfSpinPair<T> {
    let p = canonical_halfspins_unchecked(s);
    let m = p.negated();
    if m.distance(prev) < p.distance(prev) {
        m
    } else {
        p
    }
}

/// Half-spins along a sampled trajectory, with signs chosen so that each
/// step moves as little as possible.
pub fn lift_series<T: Real>(spins: &[Vec<ComplexSpin<T>>]) -> Vec<Vec<HalfSpinPair<T>>> {
    let mut out: Vec<Vec<HalfSpinPair<T>>> = Vec::with_capacity(spins.len());
    for (n, row) in spins.iter().enumerate() {
        let lifted = if n == 0 {
            row.iter().map(canonical_halfspins_unchecked).collect()
        } else {
            let prev = &out[n - 1];
            row.iter()
                .zip(prev)
                .map(|(s, p)| continuous_halfspins(s, p))
                .collect()
        };
        out.push(lifted);
    }
    out
}

/// The half-spin pairs of all sites.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HalfSpinSet<T: Real> {
    pub pairs: Vec<HalfSpinPair<T>>,
}

impl<T: Real> HalfSpinSet<T> {
    pub fn new(pairs: Vec<HalfSpinPair<T>>) -> Self {
        Self { pairs }
    }

    /// Canonical half-spins of every spin; fails on the first non-null one.
    pub fn from_spins(spins: &[ComplexSpin<T>], tol: T) -> Result<Self> {
        let pairs = spins
            .iter()
            .enumerate()
            .map(|(j, s)| {
                canonical_halfspins(s, tol).map_err(|e| match e {
                    Error::NotNull { residual, .. } => Error::NotNull {
                        site: Some(j),
                        residual,
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn alphas(&self) -> Vec<C<T>> {
        self.pairs.iter().map(|p| p.alpha).collect()
    }

    pub fn betas(&self) -> Vec<C<T>> {
        self.pairs.iter().map(|p| p.beta).collect()
    }

    /// `ξ_j·e_k = β_j α_k − α_j β_k`.
    pub fn pairing(&self, j: usize, k: usize) -> C<T> {
        pairing(&self.pairs[j], &self.pairs[k])
    }

    /// Diagonal of 𝓔: `(α₁, β₁, α₂, β₂, …)`.
    pub fn e_diagonal(&self) -> Vec<C<T>> {
        self.pairs.iter().flat_map(|p| [p.alpha, p.beta]).collect()
    }

    /// Diagonal of 𝓕: `(β₁, −α₁, β₂, −α₂, …)`.
    pub fn f_diagonal(&self) -> Vec<C<T>> {
        self.pairs.iter().flat_map(|p| [p.beta, -p.alpha]).collect()
    }

    /// 𝓔 as a 2N×2N matrix.
    pub fn script_e(&self) -> CMatrix<T> {
        CMatrix::from_diag(&self.e_diagonal())
    }

    /// 𝓕 as a 2N×2N matrix.
    pub fn script_f(&self) -> CMatrix<T> {
        CMatrix::from_diag(&self.f_diagonal())
    }

    /// The block column `𝓔T = (E₁, …, E_N)ᵀ`.
    pub fn e_stack(&self) -> Vec<Mat2<T>> {
        self.pairs.iter().map(HalfSpinPair::e_block).collect()
    }

    /// The block column `𝓕T = (F₁, …, F_N)ᵀ`.
    pub fn f_stack(&self) -> Vec<Mat2<T>> {
        self.pairs.iter().map(HalfSpinPair::f_block).collect()
    }

    /// Spin matrices `A_j = E_j H F_j`.
    pub fn spin_matrices(&self) -> Vec<Mat2<T>> {
        self.pairs.iter().map(halfspin_to_matrix).collect()
    }
}

/// `ξ_a·e_b = β_a α_b − α_a β_b`; antisymmetric in its arguments.
pub fn pairing<T: Real>(a: &HalfSpinPair<T>, b: &HalfSpinPair<T>) -> C<T> {
    a.beta * b.alpha - a.alpha * b.beta
}

/// Half-spin set of a datum (canonical gauge).
pub fn assemble<T: Real>(data: &RationalData<T>, tol: T) -> Result<HalfSpinSet<T>> {
    HalfSpinSet::from_spins(&data.spins, tol)
}

/// A doubled matrix `[U]`, stored as its N×N base.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledMatrix<T: Real> {
    pub base: CMatrix<T>,
}

/// Wraps `U` as the doubled matrix `[U]`.
pub fn double<T: Real>(u: &CMatrix<T>) -> DoubledMatrix<T> {
    DoubledMatrix { base: u.clone() }
}

impl<T: Real> DoubledMatrix<T> {
    pub fn n(&self) -> usize {
        self.base.rows()
    }

    /// The 2N×2N realization: entry `U_{ij}` becomes the block `U_{ij} I₂`.
    pub fn materialize(&self) -> CMatrix<T> {
        let n = self.base.rows();
        let m = self.base.cols();
        CMatrix::from_fn(2 * n, 2 * m, |r, c| {
            if r % 2 == c % 2 {
                self.base[(r / 2, c / 2)]
            } else {
                czero()
            }
        })
    }

    /// `[K]·(M₁, …, M_N)ᵀ = (Σ_k K_{jk} M_k)_j`.
    pub fn apply_blocks(&self, blocks: &[Mat2<T>]) -> Vec<Mat2<T>> {
        assert_eq!(blocks.len(), self.base.cols(), "block column length");
        (0..self.base.rows())
            .map(|j| {
                blocks
                    .iter()
                    .enumerate()
                    .map(|(k, b)| b.scale(self.base[(j, k)]))
                    .sum()
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            base: &self.base * &other.base,
        }
    }
}

/// `H`, the 2×2 all-ones matrix.
pub fn h_matrix<T: Real>() -> Mat2<T> {
    Mat2::ones()
}

/// `T ∈ ℝ^{2N×2}`, a vertical stack of N identity blocks.
pub fn t_matrix<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::from_fn(2 * n, 2, |r, c| if r % 2 == c { cone() } else { czero() })
}

/// Block-diagonal 2N×2N matrix with `block` repeated N times.
pub fn block_diagonal<T: Real>(block: &Mat2<T>, n: usize) -> CMatrix<T> {
    CMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r / 2 == c / 2 {
            block[(r % 2, c % 2)]
        } else {
            czero()
        }
    })
}

/// 𝓗 = diag(H, …, H).
pub fn script_h<T: Real>(n: usize) -> CMatrix<T> {
    block_diagonal(&h_matrix(), n)
}

/// Read the 2×2 block `(bi, bj)` of a 2N×2N matrix.
pub fn block<T: Real>(m: &CMatrix<T>, bi: usize, bj: usize) -> Mat2<T> {
    Mat2::new(
        m[(2 * bi, 2 * bj)],
        m[(2 * bi, 2 * bj + 1)],
        m[(2 * bi + 1, 2 * bj)],
        m[(2 * bi + 1, 2 * bj + 1)],
    )
}

/// Convert a 2×2 block matrix to a [`CMatrix`].
pub fn mat2_to_cmatrix<T: Real>(m: &Mat2<T>) -> CMatrix<T> {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}
