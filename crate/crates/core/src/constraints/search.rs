//! Best-effort search for valid multi-pole data.
//!
//! With `m₀` and the poles fixed, the constraints `s_j·s_j = 0` and
//! `Tr(B_j A_j) = 0` are 4N real equations in the 6N real spin unknowns. Random
//! starting spins are polished by a minimum-norm Gauss–Newton iteration; a
//! start is kept once the residual reaches roundoff and the result passes
//! [`validate`](super::validate) plus a few conditioning filters.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{b_matrix, projected_velocity, validate, RationalData};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cr, Real, C};
use crate::spin::{spin_to_matrix, ComplexSpin};
use crate::tolerance::Tolerances;

/// Filters applied to candidate data.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_attempts: usize,
    pub max_newton_iterations: usize,
    /// Standard deviation of the random starting spin components.
    pub spin_scale: f64,
    /// Reject data whose smallest spin is shorter than this.
    pub min_spin_norm: f64,
    /// Reject data whose largest spin is longer than this.
    pub max_spin_norm: f64,
    /// Reject data with some `|b_j|` above this.
    pub max_speed: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_attempts: 200,
            max_newton_iterations: 80,
            spin_scale: 0.6,
            min_spin_norm: 0.1,
            max_spin_norm: 3.0,
            max_speed: 3.0,
        }
    }
}

fn pack<T: Real>(spins: &[ComplexSpin<T>]) -> Vec<T> {
    spins
        .iter()
        .flat_map(|s| s.0.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .collect()
}

fn unpack<T: Real>(p: &[T]) -> Vec<ComplexSpin<T>> {
    p.chunks(6)
        .map(|c| ComplexSpin::new(C::new(c[0], c[1]), C::new(c[2], c[3]), C::new(c[4], c[5])))
        .collect()
}

/// Real residual vector `(Re, Im)` of `s_j·s_j` and `½ Tr(B_j A_j)` per site.
fn residual<T: Real>(m0: &ComplexSpin<T>, poles: &[C<T>], p: &[T]) -> Result<Vec<T>> {
    let data = RationalData::new(*m0, poles.to_vec(), unpack(p));
    let mut r = Vec::with_capacity(4 * poles.len());
    for j in 0..poles.len() {
        let s = &data.spins[j];
        let nn = s.dot(s);
        let b = b_matrix(&data, j)?;
        let tr = (b * spin_to_matrix(s)).trace() * cr(T::lit(0.5));
        r.extend([nn.re, nn.im, tr.re, tr.im]);
    }
    Ok(r)
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| x.abs()).fold(T::zero(), T::max)
}

/// Polish `spins` onto the constraint set by minimum-norm Gauss–Newton.
/// Returns the polished spins and the final residual (max-norm).
pub fn newton_polish<T: Real>(
    m0: &ComplexSpin<T>,
    poles: &[C<T>],
    spins: &[ComplexSpin<T>],
    max_iter: usize,
) -> Result<(Vec<ComplexSpin<T>>, T)> {
    let mut p = pack(spins);
    let mut r = residual(m0, poles, &p)?;
    let target = T::epsilon() * T::lit(16.0);
    for _ in 0..max_iter {
        let rn = max_abs(&r);
        if rn <= target {
            break;
        }
        // central-difference Jacobian, rows = equations, cols = unknowns
        let m = r.len();
        let n = p.len();
        let mut jac = CMatrix::zeros(m, n);
        let h = T::epsilon().cbrt();
        for c in 0..n {
            let step = h * p[c].abs().max(T::one());
            let mut pp = p.clone();
            pp[c] = p[c] + step;
            let rp = residual(m0, poles, &pp)?;
            pp[c] = p[c] - step;
            let rm = residual(m0, poles, &pp)?;
            for i in 0..m {
                jac[(i, c)] = cr((rp[i] - rm[i]) / (step + step));
            }
        }
        // δ = −Jᵀ (J Jᵀ)⁻¹ r
        let jt = jac.transpose();
        let gram = &jac * &jt;
        let Some(lu) = gram.lu() else {
            return Ok((unpack(&p), rn));
        };
        let rc: Vec<C<T>> = r.iter().map(|&x| cr(x)).collect();
        let y = lu.solve(&rc);
        let delta: Vec<T> = jt.matvec(&y).iter().map(|z| -z.re).collect();
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<T> = p.iter().zip(&delta).map(|(a, d)| *a + lambda * *d).collect();
            if let Ok(rt) = residual(m0, poles, &trial) {
                if max_abs(&rt) < rn {
                    p = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    let rn = max_abs(&r);
    Ok((unpack(&p), rn))
}

/// Search for valid spins attached to the given poles and `m₀`.
pub fn search_spins<T: Real, R: Rng + ?Sized>(
    m0: ComplexSpin<T>,
    poles: &[C<T>],
    rng: &mut R,
    opts: &SearchOptions,
) -> Result<RationalData<T>> {
    let tol = Tolerances::<T>::default();
    let n = poles.len();
    for _ in 0..opts.max_attempts {
        let start: Vec<ComplexSpin<T>> = (0..n)
            .map(|_| {
                let mut z = || {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    C::new(T::lit(re * opts.spin_scale), T::lit(im * opts.spin_scale))
                };
                ComplexSpin::new(z(), z(), z())
            })
            .collect();
        let Ok((spins, res)) = newton_polish(&m0, poles, &start, opts.max_newton_iterations) else {
            continue;
        };
        if !(res <= T::tol(1e-13, 64.0)) {
            continue;
        }
        let data = RationalData::new(m0, poles.to_vec(), spins);
        let norms: Vec<f64> = data.spins.iter().map(|s| s.norm().to_f64_lossy()).collect();
        if norms.iter().any(|&v| v < opts.min_spin_norm || v > opts.max_spin_norm) {
            continue;
        }
        if !validate(&data, &tol).valid {
            continue;
        }
        let fast = (0..n).any(|j| {
            projected_velocity(&data, j)
                .map(|v| v.norm().to_f64_lossy() > opts.max_speed)
                .unwrap_or(true)
        });
        if fast {
            continue;
        }
        return Ok(data);
    }
    Err(Error::SearchFailed {
        attempts: opts.max_attempts,
    })
}

/// `n` poles with real parts spread over `[−2(n−1), 2(n−1)]` (jittered) and
/// heights in `[0.8, 1.6]`, pairwise separated by at least 1.
pub fn random_poles<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let poles: Vec<C<T>> = (0..n)
            .map(|j| {
                let base = 2.0 * j as f64 - (n as f64 - 1.0);
                let re = base + rng.gen_range(-0.4..0.4);
                let im = rng.gen_range(0.8..1.6);
                C::new(T::lit(re), T::lit(im))
            })
            .collect();
        if super::min_separation(&poles) >= T::one() {
            return poles;
        }
    }
}

/// Random valid datum with `n` poles and `m₀ = ẑ`.
pub fn random_valid_datum<T: Real, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    opts: &SearchOptions,
) -> Result<RationalData<T>> {
    let m0 = ComplexSpin::real([T::zero(), T::zero(), T::one()]);
    for _ in 0..opts.max_attempts.max(1) {
        let poles = random_poles(n, rng);
        let single = SearchOptions {
            max_attempts: 20,
            ..opts.clone()
        };
        if let Ok(d) = search_spins(m0, &poles, rng, &single) {
            return Ok(d);
        }
    }
    Err(Error::SearchFailed {
        attempts: opts.max_attempts,
    })
}
