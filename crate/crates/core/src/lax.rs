//! Lax matrices in half-spin form and isospectral diagnostics.
//!
//! ```text
//! L_jj = ẋ_j,   L_jk = (ξ_j·e_k)/(x_j − x_k)
//! B_jj = 0,     B_jk = (ξ_j·e_k)/(x_j − x_k)²
//! ```
//!
//! `B` is antisymmetric because the pairing `ξ_j·e_k` is.

use crate::constraints::{initial_velocities, RationalData};
use crate::error::{Error, Result};
use crate::halfspin::{assemble, lift_series, HalfSpinSet};
use crate::linalg::{char_poly, power_traces, CMatrix};
use crate::oracle::OracleState;
use crate::scalar::{c, Real, C};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct LaxPair<T: Real> {
    pub l: CMatrix<T>,
    pub b: CMatrix<T>,
    pub velocities: Vec<C<T>>,
}

/// `L` and `B` from poles, velocities and half-spins.
pub fn lax_from_parts<T: Real>(poles: &[C<T>], velocities: &[C<T>], hs: &HalfSpinSet<T>) -> LaxPair<T> {
    let n = poles.len();
    let mut l = CMatrix::from_diag(velocities);
    let mut b = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let p = hs.pairing(j, k);
            let d = poles[j] - poles[k];
            l[(j, k)] = p / d;
            b[(j, k)] = p / (d * d);
        }
    }
    LaxPair {
        l,
        b,
        velocities: velocities.to_vec(),
    }
}

/// Lax pair of a datum, with velocities from the constraints.
pub fn build_lax<T: Real>(data: &RationalData<T>, tol: &Tolerances<T>) -> Result<LaxPair<T>> {
    data.check_geometry(tol.pole_guard)?;
    let hs = assemble(data, tol.algebra)?;
    let v = initial_velocities(data, tol.constraint)?;
    Ok(lax_from_parts(&data.poles, &v, &hs))
}

/// Sign matrix with `ε_{k,j} = (ξ_j·e_k)/√(−2 s_j·s_k)` (principal root);
/// the diagonal is left at zero.
pub fn matsuno_consistency<T: Real>(data: &RationalData<T>, tol: &Tolerances<T>) -> Result<CMatrix<T>> {
    let hs = assemble(data, tol.algebra)?;
    let n = data.len();
    let mut eps = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let dot = data.spins[j].dot(&data.spins[k]);
            let scale = data.spins[j].norm() * data.spins[k].norm();
            if dot.norm() <= tol.algebra * scale.max(T::min_positive_value()) {
                return Err(Error::OrthogonalSpins { j: j.min(k), k: j.max(k) });
            }
            let root = (dot * c::<T>(-2.0, 0.0)).sqrt();
            eps[(k, j)] = hs.pairing(j, k) / root;
        }
    }
    Ok(eps)
}

/// `L` rebuilt in square-root form: `L_jk = ε_{k,j} √(−2 s_j·s_k)/(x_j − x_k)`.
pub fn matsuno_l<T: Real>(data: &RationalData<T>, eps: &CMatrix<T>, velocities: &[C<T>]) -> CMatrix<T> {
    let n = data.len();
    let mut l = CMatrix::from_diag(velocities);
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let root = (data.spins[j].dot(&data.spins[k]) * c::<T>(-2.0, 0.0)).sqrt();
                l[(j, k)] = eps[(k, j)] * root / (data.poles[j] - data.poles[k]);
            }
        }
    }
    l
}

/// `[Tr L, Tr L², …, Tr L^kmax]`.
pub fn conserved_traces<T: Real>(l: &CMatrix<T>, kmax: usize) -> Result<Vec<C<T>>> {
    if kmax < 1 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    Ok(power_traces(l, kmax))
}

/// Coefficients `[1, c₁, …, c_N]` of `det(λI − L)`.
pub fn char_coefficients<T: Real>(l: &CMatrix<T>) -> Vec<C<T>> {
    char_poly(l)
}

/// Lax pairs along a trajectory, using a sign-continuous half-spin lift and
/// the trajectory's own velocities.
pub fn lax_series<T: Real, S: OracleState<T>>(states: &[S]) -> Vec<LaxPair<T>> {
    if let Some(lifted) = states.iter().map(|s| s.halfspins()).collect::<Option<Vec<_>>>() {
        return states
            .iter()
            .zip(lifted)
            .map(|(s, hs)| lax_from_parts(s.poles(), s.velocities(), &HalfSpinSet::new(hs)))
            .collect();
    }
    let spins: Vec<_> = states.iter().map(|s| s.spins()).collect();
    lift_series(&spins)
        .into_iter()
        .zip(states)
        .map(|(hs, s)| lax_from_parts(s.poles(), s.velocities(), &HalfSpinSet::new(hs)))
        .collect()
}

/// `max_t ‖(L(t+h) − L(t−h))/2h − [B(t), L(t)]‖_F` over interior samples of a
/// trajectory sampled at uniform step `h`.
pub fn lax_residual<T: Real, S: OracleState<T>>(states: &[S], h: T) -> T {
    let pairs = lax_series(states);
    let mut worst = T::zero();
    for i in 1..pairs.len().saturating_sub(1) {
        let dl = (&pairs[i + 1].l - &pairs[i - 1].l).scale(C::new((h + h).recip(), T::zero()));
        let comm = pairs[i].b.commutator(&pairs[i].l);
        worst = worst.max((&dl - &comm).norm_fro());
    }
    worst
}

/// Worst relative drift `|c_k(t) − c_k(0)| / max(|c_k(0)|, 1)` over a sequence.
pub fn max_relative_drift<T: Real>(series: &[Vec<C<T>>]) -> T {
    let Some(first) = series.first() else {
        return T::zero();
    };
    let mut worst = T::zero();
    for row in series {
        for (a, b) in row.iter().zip(first) {
            let scale = b.norm().max(T::one());
            worst = worst.max((*a - *b).norm() / scale);
        }
    }
    worst
}
