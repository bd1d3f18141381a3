//! Closed-form evolution of a valid datum.
//!
//! With `X₀ = diag(x_j(0))`, `L₀ = L(0)` and canonical half-spins at `t = 0`,
//!
//! ```text
//! π₋(t, x) = −Σ_jk [(X₀ + tL₀ − x)⁻¹]_jk E_j H F_k
//! π₊(t, x) = −Σ_jk [(X̄₀ + tL₀ᴴ − x)⁻¹]_jk F_j* H E_k*
//! M(t, x)  = M₀ + π₋(t, x) + π₊(t, x)
//! ```
//!
//! The poles at time `t` are the eigenvalues of `X₀ + tL₀`. Every sum is
//! contracted at size N through two linear solves; nothing 2N×2N is formed.

use crate::constraints::{initial_velocities, projected_velocities, require_valid, RationalData};
use crate::error::{Error, Result};
use crate::halfspin::{assemble, canonical_halfspins_unchecked, HalfSpinSet};
use crate::lax::lax_from_parts;
use crate::linalg::{eigen, CMatrix, Lu};
use crate::scalar::{c, ci, cr, Real, C};
use crate::spin::{matrix_to_spin_unchecked, spin_to_matrix, ComplexSpin, Mat2};
use crate::tolerance::Tolerances;

/// Everything the closed form needs, frozen at `t = 0`.
#[derive(Clone, Debug)]
pub struct FrozenEvolution<T: Real> {
    pub m0: ComplexSpin<T>,
    pub x0: Vec<C<T>>,
    pub l0: CMatrix<T>,
    pub halfspins: HalfSpinSet<T>,
    pub tol: Tolerances<T>,
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<T: Real> FrozenEvolution<T> {
    /// Freeze a datum after checking every constraint.
    pub fn new(data: &RationalData<T>, tol: &Tolerances<T>) -> Result<Self> {
        require_valid(data, tol)?;
        let hs = assemble(data, tol.algebra)?;
        let v = initial_velocities(data, tol.constraint)?;
        Ok(Self::from_parts(data, hs, &v, tol))
    }

    /// Freeze a datum without checking constraints. Velocities come from the
    /// projection form. Meant for negative controls.
    pub fn new_unchecked(data: &RationalData<T>, tol: &Tolerances<T>) -> Result<Self> {
        data.check_geometry(tol.pole_guard)?;
        let hs = HalfSpinSet::new(data.spins.iter().map(canonical_halfspins_unchecked).collect());
        let v = projected_velocities(data)?;
        Ok(Self::from_parts(data, hs, &v, tol))
    }

    fn from_parts(data: &RationalData<T>, hs: HalfSpinSet<T>, v: &[C<T>], tol: &Tolerances<T>) -> Self {
        let lax = lax_from_parts(&data.poles, v, &hs);
        Self {
            m0: data.m0,
            x0: data.poles.clone(),
            l0: lax.l,
            halfspins: hs,
            tol: *tol,
        }
    }

    pub fn len(&self) -> usize {
        self.x0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x0.is_empty()
    }

    /// `X₀ + t L₀`.
    pub fn pole_matrix(&self, t: T) -> CMatrix<T> {
        &CMatrix::from_diag(&self.x0) + &self.l0.scale(cr(t))
    }

    fn factor(m: &CMatrix<T>, x: C<T>) -> Result<Lu<T>> {
        m.shift(x).lu().ok_or(Error::ResolventSingular {
            re: x.re.to_f64_lossy(),
            im: x.im.to_f64_lossy(),
        })
    }

    /// `M(t, x)` at any `x` off the poles, without the reality check.
    pub fn field_matrix(&self, t: T, x: C<T>) -> Result<Mat2<T>> {
        Ok(spin_to_matrix(&self.m0) + pi_minus(self, t, x)? + pi_plus(self, t, x)?)
    }

    /// The Hardy-space operators `G` and `𝓛` at `t = 0`.
    pub fn hardy_representation(&self) -> HardyRepresentation<T> {
        let n = self.len();
        let hs = &self.halfspins;
        let g = CMatrix::from_diag(&self.x0.iter().map(|x| x.conj()).collect::<Vec<_>>());
        let script_l = CMatrix::from_fn(n, n, |k, j| {
            if k == j {
                -self.l0[(j, j)].conj()
            } else {
                // e_k·ξ_j = α_k β_j − β_k α_j
                let p = hs.pairs[k].alpha * hs.pairs[j].beta - hs.pairs[k].beta * hs.pairs[j].alpha;
                p.conj() / (self.x0[k] - self.x0[j]).conj()
            }
        });
        HardyRepresentation { g, script_l }
    }
}

/// `π₋(t, x)`, the part of `M − M₀` holomorphic in the lower half-plane.
pub fn pi_minus<T: Real>(fe: &FrozenEvolution<T>, t: T, x: C<T>) -> Result<Mat2<T>> {
    let lu = FrozenEvolution::factor(&fe.pole_matrix(t), x)?;
    let a = fe.halfspins.alphas();
    let b = fe.halfspins.betas();
    let rb = lu.solve(&b);
    let ra = lu.solve(&a);
    Ok(-Mat2::new(dot(&a, &rb), -dot(&a, &ra), dot(&b, &rb), -dot(&b, &ra)))
}

/// `π₊(t, x)`, the part of `M − M₀` holomorphic in the upper half-plane.
pub fn pi_plus<T: Real>(fe: &FrozenEvolution<T>, t: T, x: C<T>) -> Result<Mat2<T>> {
    let m = &CMatrix::from_diag(&fe.x0.iter().map(|z| z.conj()).collect::<Vec<_>>())
        + &fe.l0.adjoint().scale(cr(t));
    let lu = FrozenEvolution::factor(&m, x)?;
    let ab: Vec<_> = fe.halfspins.alphas().iter().map(|z| z.conj()).collect();
    let bb: Vec<_> = fe.halfspins.betas().iter().map(|z| z.conj()).collect();
    let qa = lu.solve(&ab);
    let qb = lu.solve(&bb);
    Ok(-Mat2::new(dot(&bb, &qa), dot(&bb, &qb), -dot(&ab, &qa), -dot(&ab, &qb)))
}

/// Multiplication by `x̄_j` and the Toeplitz-compressed Lax operator in the
/// basis `1/(x − x̄_j)` of the upper Hardy space.
#[derive(Clone, Debug)]
pub struct HardyRepresentation<T: Real> {
    pub g: CMatrix<T>,
    /// `𝓛_kj = conj(e_k·ξ_j)/conj(x_k − x_j)` off the diagonal, `−b̄_j` on it.
    pub script_l: CMatrix<T>,
}

/// `π₊(t, x)` through the Hardy representation: solve
/// `(G − t𝓛 − x) c = ᾱ, β̄` and contract with `F_j* H`.
pub fn hardy_rep_pi_plus<T: Real>(fe: &FrozenEvolution<T>, t: T, x: C<T>) -> Result<Mat2<T>> {
    let rep = fe.hardy_representation();
    let m = &rep.g - &rep.script_l.scale(cr(t));
    let lu = FrozenEvolution::factor(&m, x)?;
    let ab: Vec<_> = fe.halfspins.alphas().iter().map(|z| z.conj()).collect();
    let bb: Vec<_> = fe.halfspins.betas().iter().map(|z| z.conj()).collect();
    let ca = lu.solve(&ab);
    let cb = lu.solve(&bb);
    let mut out = Mat2::zero();
    for j in 0..fe.len() {
        // F_j* H diag(ca_j, cb_j)
        out = out
            + Mat2::new(
                bb[j] * ca[j],
                bb[j] * cb[j],
                -ab[j] * ca[j],
                -ab[j] * cb[j],
            );
    }
    Ok(-out)
}

/// The field at a real point.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample<T: Real> {
    pub matrix: Mat2<T>,
    pub m: [T; 3],
    /// `max_k |Im m_k|` before it was discarded.
    pub im_residual: T,
}

/// `m(t, x)` at real `x`; fails if the imaginary residue exceeds the
/// reality tolerance.
pub fn full_field<T: Real>(fe: &FrozenEvolution<T>, t: T, x: T) -> Result<FieldSample<T>> {
    let matrix = fe.field_matrix(t, cr(x))?;
    let s = matrix_to_spin_unchecked(&matrix);
    let im_residual = s.max_imag();
    if !(im_residual <= fe.tol.reality * matrix.norm_max().max(T::one())) {
        return Err(Error::NonRealField {
            residual: im_residual.to_f64_lossy(),
        });
    }
    Ok(FieldSample {
        matrix,
        m: s.re(),
        im_residual,
    })
}

/// Poles and spins at time `t`, read from the eigen-decomposition of `X₀ + tL₀`.
#[derive(Clone, Debug)]
pub struct PoleSnapshot<T: Real> {
    pub t: T,
    /// Sorted by real part, then imaginary part.
    pub poles: Vec<C<T>>,
    pub spins: Vec<ComplexSpin<T>>,
    /// `‖P‖_F ‖P⁻¹‖_F` of the eigenvector matrix.
    pub conditioning: T,
    /// Set when some pole is within the boundary tolerance of the real axis.
    pub boundary_warning: bool,
}

impl<T: Real> PoleSnapshot<T> {
    pub fn to_data(&self, m0: ComplexSpin<T>) -> RationalData<T> {
        RationalData::new(m0, self.poles.clone(), self.spins.clone())
    }
}

pub fn poles_and_spins_at<T: Real>(fe: &FrozenEvolution<T>, t: T) -> Result<PoleSnapshot<T>> {
    let eig = eigen(&fe.pole_matrix(t)).ok_or(Error::DefectiveMatrix {
        condition: f64::INFINITY,
    })?;
    let conditioning = eig.condition();
    if !(conditioning <= fe.tol.defective_condition) {
        return Err(Error::DefectiveMatrix {
            condition: conditioning.to_f64_lossy(),
        });
    }
    let p = &eig.vectors;
    let pinv = p.inverse().ok_or(Error::DefectiveMatrix {
        condition: f64::INFINITY,
    })?;
    let a = fe.halfspins.alphas();
    let b = fe.halfspins.betas();
    let pt = p.transpose();
    let ua = pt.matvec(&a);
    let ub = pt.matvec(&b);
    let wa = pinv.matvec(&a);
    let wb = pinv.matvec(&b);
    let mut sites: Vec<(C<T>, ComplexSpin<T>)> = (0..fe.len())
        .map(|m| {
            let res = Mat2::new(ua[m] * wb[m], -ua[m] * wa[m], ub[m] * wb[m], -ub[m] * wa[m]);
            (eig.values[m], matrix_to_spin_unchecked(&res))
        })
        .collect();
    sites.sort_by(|x, y| {
        x.0.re
            .partial_cmp(&y.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.0.im.partial_cmp(&y.0.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let min_im = sites.iter().map(|s| s.0.im).fold(T::infinity(), T::min);
    Ok(PoleSnapshot {
        t,
        poles: sites.iter().map(|s| s.0).collect(),
        spins: sites.iter().map(|s| s.1).collect(),
        conditioning,
        boundary_warning: min_im < fe.tol.boundary,
    })
}

/// `|∇|M` of a rational field, stored by its poles and residues:
///
/// ```text
/// |∇|M(x) = i Σ A_j/(x − x_j)² − i Σ A_j*/(x − x̄_j)²
/// ```
#[derive(Clone, Debug)]
pub struct HalfWaveCoefficients<T: Real> {
    pub poles: Vec<C<T>>,
    pub residues: Vec<Mat2<T>>,
}

impl<T: Real> HalfWaveCoefficients<T> {
    pub fn evaluate(&self, x: C<T>) -> Mat2<T> {
        let i = ci::<T>();
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(p, a)| {
                let d = (x - p).inv();
                let e = (x - p.conj()).inv();
                a.scale(i * d * d) - a.adjoint().scale(i * e * e)
            })
            .sum()
    }
}

/// `|∇|` of the field described by `data`.
pub fn halfwave_apply<T: Real>(data: &RationalData<T>) -> HalfWaveCoefficients<T> {
    HalfWaveCoefficients {
        poles: data.poles.clone(),
        residues: data.spin_matrices(),
    }
}

/// `‖∂ₜM + (i/2)[M, |∇|M]‖_F` at `(t, x)`, with `∂ₜM` by central differences
/// of step `h` and `|∇|M` from the pole snapshot at `t`.
pub fn pde_residual<T: Real>(fe: &FrozenEvolution<T>, t: T, x: T, h: T) -> Result<T> {
    let xm = cr(x);
    let dm = (fe.field_matrix(t + h, xm)? - fe.field_matrix(t - h, xm)?).scale(cr((h + h).recip()));
    let m = fe.field_matrix(t, xm)?;
    let snap = poles_and_spins_at(fe, t)?;
    let grad = halfwave_apply(&snap.to_data(fe.m0)).evaluate(xm);
    let rhs = m.commutator(&grad).scale(ci::<T>() * c::<T>(-0.5, 0.0));
    Ok((dm - rhs).norm_fro())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64 as c;
    use crate::constraints::search::{random_valid_datum, SearchOptions};
    use crate::constraints::{moving_soliton, single_soliton};
    use crate::halfspin::{block, double, script_h, t_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn zhat() -> ComplexSpin<f64> {
        ComplexSpin::real([0.0, 0.0, 1.0])
    }

    fn datum(n: usize, seed: u64) -> RationalData<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_valid_datum(n, &mut rng, &SearchOptions::default()).unwrap()
    }

    #[test]
    fn static_soliton_field() {
        let d = single_soliton(c(0.0, 1.0), zhat(), 0.0).unwrap();
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        for &t in &[0.0, 1.0, 5.0] {
            for &x in &[-3.0, -0.5, 0.0, 0.7, 2.0] {
                let f = full_field(&fe, t, x).unwrap();
                let q = x * x + 1.0;
                let expect = [2.0 * x / q, 0.0, (x * x - 1.0) / q];
                for k in 0..3 {
                    assert!((f.m[k] - expect[k]).abs() < 1e-14, "t={t} x={x}");
                }
            }
        }
    }

    #[test]
    fn time_zero_reproduces_partial_fractions() {
        let d = datum(3, 2);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        for x in [c(0.3, 0.0), c(-1.0, 0.5), c(2.0, -0.7)] {
            let pm = pi_minus(&fe, 0.0, x).unwrap();
            let pp = pi_plus(&fe, 0.0, x).unwrap();
            assert!((pm - d.partial_fractions_minus(x)).norm_max() < 1e-13);
            assert!((pp - d.partial_fractions_plus(x)).norm_max() < 1e-13);
        }
    }

    #[test]
    fn hardy_path_matches_direct_path() {
        let d = datum(3, 6);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let rep = fe.hardy_representation();
        assert!((&rep.script_l + &fe.l0.adjoint()).norm_max() < 1e-14);
        for t in [0.0, 0.4, 1.3] {
            for x in [c(0.1, 0.0), c(-2.0, 0.3)] {
                let a = pi_plus(&fe, t, x).unwrap();
                let b = hardy_rep_pi_plus(&fe, t, x).unwrap();
                assert!((a - b).norm_max() < 1e-12);
            }
        }
    }

    #[test]
    fn resolvent_symmetry() {
        let d = datum(2, 8);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        for x in [c(0.2, 0.4), c(-1.5, -0.3)] {
            let a = pi_minus(&fe, 0.7, x.conj()).unwrap();
            let b = pi_plus(&fe, 0.7, x).unwrap().adjoint();
            assert!((a - b).norm_max() < 1e-13);
        }
    }

    #[test]
    fn doubled_formula_matches_contraction() {
        let d = datum(2, 12);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let n = 2;
        let (t, x) = (0.6, c(0.25, 0.0));
        // −Tᵀ 𝓔 𝓗 [X₀ + tL₀ − x]⁻¹ 𝓕 T with every factor materialized
        let r = fe.pole_matrix(t).shift(x).inverse().unwrap();
        let big_r = double(&r).materialize();
        let e = fe.halfspins.script_e();
        let f = fe.halfspins.script_f();
        let tm = t_matrix::<f64>(n);
        let lhs = &(&(&(&tm.transpose() * &e) * &script_h(n)) * &big_r) * &(&f * &tm);
        let lit = block(&(-&lhs), 0, 0);
        let fast = pi_minus(&fe, t, x).unwrap();
        assert!((lit - fast).norm_max() < 1e-13);
    }

    #[test]
    fn large_x_decay() {
        let d = datum(2, 14);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let m0 = spin_to_matrix(&fe.m0);
        let near = (fe.field_matrix(0.5, c(1e3, 0.0)).unwrap() - m0).norm_max();
        let far = (fe.field_matrix(0.5, c(1e6, 0.0)).unwrap() - m0).norm_max();
        assert!(far < 1e-5 && far < near * 1e-2);
    }

    #[test]
    fn snapshot_at_zero_recovers_datum() {
        let d = datum(3, 15);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let snap = poles_and_spins_at(&fe, 0.0).unwrap();
        assert!(!snap.boundary_warning);
        for (x, s) in d.poles.iter().zip(&d.spins) {
            let k = (0..3)
                .min_by(|&a, &b| (snap.poles[a] - x).norm().partial_cmp(&(snap.poles[b] - x).norm()).unwrap())
                .unwrap();
            assert!((snap.poles[k] - x).norm() < 1e-12);
            assert!((snap.spins[k] - *s).norm() < 1e-10);
        }
    }

    #[test]
    fn moving_soliton_translates() {
        let d = moving_soliton(c(0.0, 1.0), zhat(), 0.0, 0.5).unwrap();
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let v = fe.l0[(0, 0)];
        let snap = poles_and_spins_at(&fe, 2.0).unwrap();
        assert!((snap.poles[0] - (d.poles[0] + v * 2.0)).norm() < 1e-14);
        assert!((snap.spins[0] - d.spins[0]).norm() < 1e-14);
    }

    #[test]
    fn pde_residual_shrinks_with_step() {
        let d = datum(2, 16);
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        let r1 = pde_residual(&fe, 0.3, 0.2, 1e-2).unwrap();
        let r2 = pde_residual(&fe, 0.3, 0.2, 5e-3).unwrap();
        assert!(r2 < r1 && (r1 / r2 - 4.0).abs() < 0.5, "{r1} {r2}");
    }

    #[test]
    fn unchecked_datum_breaks_reality() {
        // right spin for the pole height but wrong magnitude: constraints fail
        let mut d = single_soliton(c(0.0, 1.0), zhat(), 0.0).unwrap();
        d.spins[0] = d.spins[0].scale(c(1.7, 0.0));
        assert!(FrozenEvolution::new(&d, &tol()).is_err());
        let fe = FrozenEvolution::new_unchecked(&d, &tol()).unwrap();
        let mut worst: f64 = 0.0;
        for x in [-1.0, 0.0, 0.5, 2.0] {
            let m = fe.field_matrix(1.0, c(x, 0.0)).unwrap();
            let s = matrix_to_spin_unchecked(&m).re();
            worst = worst.max((s[0] * s[0] + s[1] * s[1] + s[2] * s[2] - 1.0).abs());
        }
        assert!(worst > 1e-3);
    }

    #[test]
    fn resolvent_singular_on_pole() {
        let d = single_soliton(c(0.0, 1.0), zhat(), 0.0).unwrap();
        let fe = FrozenEvolution::new(&d, &tol()).unwrap();
        assert!(matches!(pi_minus(&fe, 0.0, c(0.0, 1.0)), Err(Error::ResolventSingular { .. })));
    }
}
