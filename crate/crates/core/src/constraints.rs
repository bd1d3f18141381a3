//! Rational initial data, the constraint set it must satisfy, and the
//! initial pole velocities.
//!
//! For `M(x) = M₀ + Σ A_j/(x − x_j) + Σ A_j*/(x − x̄_j)` the constraints are
//!
//! ```text
//! M₀² = I,  M₀* = M₀,  Tr M₀ = 0,  A_j² = 0,  B_j A_j + A_j B_j = 0
//! B_j = M₀ + A_j*/(x_j − x̄_j) + Σ_{k≠j} [A_k*/(x_j − x̄_k) + A_k/(x_j − x_k)]
//! ```
//!
//! and the velocity of pole `j` is the eigenvalue `b_j` in `B_j A_j = b_j A_j`.

pub mod search;

use crate::error::{Error, Result};
use crate::scalar::{ci, cr, Real, C};
use crate::spin::{spin_to_matrix, ComplexSpin, Mat2};
use crate::tolerance::Tolerances;

/// Full initial datum: `m₀`, poles `x_j` in the upper half-plane, spins `s_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalData<T: Real> {
    /// Real unit vector, stored with zero imaginary parts.
    pub m0: ComplexSpin<T>,
    pub poles: Vec<C<T>>,
    pub spins: Vec<ComplexSpin<T>>,
}

impl<T: Real> RationalData<T> {
    pub fn new(m0: ComplexSpin<T>, poles: Vec<C<T>>, spins: Vec<ComplexSpin<T>>) -> Self {
        assert_eq!(poles.len(), spins.len(), "one spin per pole");
        Self { m0, poles, spins }
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn m0_matrix(&self) -> Mat2<T> {
        spin_to_matrix(&self.m0)
    }

    pub fn spin_matrices(&self) -> Vec<Mat2<T>> {
        self.spins.iter().map(spin_to_matrix).collect()
    }

    pub fn min_imag(&self) -> T {
        self.poles.iter().map(|x| x.im).fold(T::infinity(), T::min)
    }

    pub fn min_separation(&self) -> T {
        min_separation(&self.poles)
    }

    /// Reject poles below `guard` in height or closer than `guard` to each other.
    pub fn check_geometry(&self, guard: T) -> Result<()> {
        if let Some((j, x)) = self.poles.iter().enumerate().find(|(_, x)| !(x.im >= guard)) {
            return Err(Error::DegeneratePoles {
                reason: format!("Im x_{j} = {} is below {}", x.im, guard),
            });
        }
        let sep = self.min_separation();
        if sep < guard {
            return Err(Error::DegeneratePoles {
                reason: format!("pole separation {sep:e} is below {guard:e}"),
            });
        }
        Ok(())
    }

    /// `M(x)` evaluated directly from its partial-fraction form.
    pub fn field_matrix(&self, x: C<T>) -> Mat2<T> {
        let mut m = self.m0_matrix();
        for (xj, s) in self.poles.iter().zip(&self.spins) {
            let a = spin_to_matrix(s);
            m = m + a.scale((x - xj).inv()) + a.adjoint().scale((x - xj.conj()).inv());
        }
        m
    }

    /// `Σ A_j/(x − x_j)`, the part of the field holomorphic in the lower half-plane.
    pub fn partial_fractions_minus(&self, x: C<T>) -> Mat2<T> {
        self.poles
            .iter()
            .zip(&self.spins)
            .map(|(xj, s)| spin_to_matrix(s).scale((x - xj).inv()))
            .sum()
    }

    /// `Σ A_j*/(x − x̄_j)`.
    pub fn partial_fractions_plus(&self, x: C<T>) -> Mat2<T> {
        self.poles
            .iter()
            .zip(&self.spins)
            .map(|(xj, s)| spin_to_matrix(s).adjoint().scale((x - xj.conj()).inv()))
            .sum()
    }
}

pub(crate) fn min_separation<T: Real>(poles: &[C<T>]) -> T {
    let mut best = T::infinity();
    for j in 0..poles.len() {
        for k in (j + 1)..poles.len() {
            best = best.min((poles[j] - poles[k]).norm());
        }
    }
    best
}

/// `B_j = M₀ + A_j*/(x_j − x̄_j) + Σ_{k≠j} [A_k*/(x_j − x̄_k) + A_k/(x_j − x_k)]`.
pub fn b_matrix<T: Real>(data: &RationalData<T>, j: usize) -> Result<Mat2<T>> {
    let xj = data.poles[j];
    let zero = T::zero();
    let inv = |d: C<T>, what: &str| -> Result<C<T>> {
        if d.norm() == zero || !d.re.is_finite() || !d.im.is_finite() {
            Err(Error::DegeneratePoles {
                reason: format!("vanishing denominator {what} at site {j}"),
            })
        } else {
            Ok(d.inv())
        }
    };
    let aj = spin_to_matrix(&data.spins[j]);
    let mut b = data.m0_matrix() + aj.adjoint().scale(inv(xj - xj.conj(), "x_j − x̄_j")?);
    for (k, (xk, sk)) in data.poles.iter().zip(&data.spins).enumerate() {
        if k == j {
            continue;
        }
        let ak = spin_to_matrix(sk);
        b = b
            + ak.adjoint().scale(inv(xj - xk.conj(), "x_j − x̄_k")?)
            + ak.scale(inv(xj - xk, "x_j − x_k")?);
    }
    Ok(b)
}

/// Projection form `Tr(B_j A_j A_j*) / Tr(A_j A_j*)` without the
/// proportionality check.
pub fn projected_velocity<T: Real>(data: &RationalData<T>, j: usize) -> Result<C<T>> {
    let a = spin_to_matrix(&data.spins[j]);
    let b = b_matrix(data, j)?;
    let den = (a * a.adjoint()).trace();
    if den.norm() == T::zero() {
        return Err(Error::ZeroSpin { site: j });
    }
    Ok((b * a * a.adjoint()).trace() / den)
}

/// Trace form `½ Tr([A_j, A_j*] B_j) / Tr(A_j A_j*)`.
pub fn trace_velocity<T: Real>(data: &RationalData<T>, j: usize) -> Result<C<T>> {
    let a = spin_to_matrix(&data.spins[j]);
    let b = b_matrix(data, j)?;
    let den = (a * a.adjoint()).trace();
    if den.norm() == T::zero() {
        return Err(Error::ZeroSpin { site: j });
    }
    Ok((a.commutator(&a.adjoint()) * b).trace() * cr(T::lit(0.5)) / den)
}

/// `b_j` with `B_j A_j = b_j A_j`; fails when `B_j A_j` is not proportional
/// to `A_j` within `tol·‖A_j‖`.
pub fn initial_velocity<T: Real>(data: &RationalData<T>, j: usize, tol: T) -> Result<C<T>> {
    let a = spin_to_matrix(&data.spins[j]);
    let b = b_matrix(data, j)?;
    let v = projected_velocity(data, j)?;
    let residual = (b * a - a.scale(v)).norm_fro();
    if residual > tol * a.norm_fro() {
        return Err(Error::NotProportional {
            site: j,
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(v)
}

/// All initial velocities, checked.
pub fn initial_velocities<T: Real>(data: &RationalData<T>, tol: T) -> Result<Vec<C<T>>> {
    (0..data.len()).map(|j| initial_velocity(data, j, tol)).collect()
}

/// All initial velocities by the projection form, unchecked. Used to build
/// deliberately constraint-violating negative controls.
pub fn projected_velocities<T: Real>(data: &RationalData<T>) -> Result<Vec<C<T>>> {
    (0..data.len()).map(|j| projected_velocity(data, j)).collect()
}

/// Residuals of every constraint; `valid` iff each is below tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport<T: Real> {
    /// `|s_j·s_j|` per site.
    pub null_residual: Vec<T>,
    /// `‖B_j A_j + A_j B_j‖ / ‖A_j‖` per site.
    pub anticomm_residual: Vec<T>,
    /// `‖B_j A_j − b_j A_j‖ / ‖A_j‖` per site.
    pub eigen_residual: Vec<T>,
    /// `‖M₀² − I‖`.
    pub m0_square_residual: T,
    /// `|Tr M₀|`.
    pub m0_trace_residual: T,
    /// `‖M₀ − M₀*‖`.
    pub m0_hermitian_residual: T,
    /// `b_j` by the projection form (`None` where it is undefined).
    pub velocities: Vec<Option<C<T>>>,
    pub min_imag: T,
    pub min_separation: T,
    pub valid: bool,
    /// Human-readable reasons the datum is invalid.
    pub problems: Vec<String>,
}

/// Evaluate every constraint. Never fails: problems are reported, not thrown.
pub fn validate<T: Real>(data: &RationalData<T>, tol: &Tolerances<T>) -> ConstraintReport<T> {
    let n = data.len();
    let mut problems = Vec::new();
    let m0 = data.m0_matrix();
    let eye = Mat2::identity();
    let m0_square_residual = (m0 * m0 - eye).norm_fro();
    let m0_trace_residual = m0.trace().norm();
    let m0_hermitian_residual = (m0 - m0.adjoint()).norm_fro();
    for (name, r) in [
        ("M₀² = I", m0_square_residual),
        ("Tr M₀ = 0", m0_trace_residual),
        ("M₀* = M₀", m0_hermitian_residual),
    ] {
        if !(r < tol.constraint) {
            problems.push(format!("{name} violated: residual {r:e}"));
        }
    }
    if n == 0 {
        problems.push("no poles".to_string());
    }
    let min_imag = data.min_imag();
    let min_sep = data.min_separation();
    if n > 0 && !(min_imag >= tol.pole_guard) {
        problems.push(format!("min Im x_j = {min_imag:e} below guard {:e}", tol.pole_guard));
    }
    if !(min_sep >= tol.pole_guard) {
        problems.push(format!("pole separation {min_sep:e} below guard {:e}", tol.pole_guard));
    }

    let mut null_residual = Vec::with_capacity(n);
    let mut anticomm_residual = Vec::with_capacity(n);
    let mut eigen_residual = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    for j in 0..n {
        let s = &data.spins[j];
        let nr = s.dot(s).norm();
        null_residual.push(nr);
        if !(nr < tol.constraint) {
            problems.push(format!("site {j}: s·s = {nr:e}"));
        }
        let a = spin_to_matrix(s);
        let an = a.norm_fro();
        if !(an > tol.pole_guard) {
            problems.push(format!("site {j}: zero spin"));
        }
        match b_matrix(data, j) {
            Ok(b) => {
                let scale = if an > T::zero() { an } else { T::one() };
                let ac = b.anticommutator(&a).norm_fro() / scale;
                anticomm_residual.push(ac);
                if !(ac < tol.constraint) {
                    problems.push(format!("site {j}: B_jA_j + A_jB_j = {ac:e}"));
                }
                match projected_velocity(data, j) {
                    Ok(v) => {
                        let er = (b * a - a.scale(v)).norm_fro() / scale;
                        eigen_residual.push(er);
                        if !(er < tol.constraint) {
                            problems.push(format!("site {j}: B_jA_j − b_jA_j = {er:e}"));
                        }
                        velocities.push(Some(v));
                    }
                    Err(_) => {
                        eigen_residual.push(T::infinity());
                        velocities.push(None);
                    }
                }
            }
            Err(e) => {
                problems.push(format!("site {j}: {e}"));
                anticomm_residual.push(T::infinity());
                eigen_residual.push(T::infinity());
                velocities.push(None);
            }
        }
    }
    ConstraintReport {
        null_residual,
        anticomm_residual,
        eigen_residual,
        m0_square_residual,
        m0_trace_residual,
        m0_hermitian_residual,
        velocities,
        min_imag,
        min_separation: min_sep,
        valid: problems.is_empty(),
        problems,
    }
}

/// Like [`validate`], but returns the first violated constraint as a typed error.
pub fn require_valid<T: Real>(data: &RationalData<T>, tol: &Tolerances<T>) -> Result<()> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("datum has no poles".into()));
    }
    real_unit(&data.m0)?;
    data.check_geometry(tol.pole_guard)?;
    for (j, s) in data.spins.iter().enumerate() {
        if !(spin_to_matrix(s).norm_fro() > tol.pole_guard) {
            return Err(Error::ZeroSpin { site: j });
        }
        let nr = s.dot(s).norm();
        if !(nr < tol.constraint) {
            return Err(Error::NotNull {
                site: Some(j),
                residual: nr.to_f64_lossy(),
            });
        }
    }
    initial_velocities(data, tol.constraint)?;
    let report = validate(data, tol);
    if !report.valid {
        return Err(Error::InvalidArgument(report.problems.join("; ")));
    }
    Ok(())
}

/// Orthonormal real pair `(e_a, e_b)` spanning the plane orthogonal to `m0`,
/// oriented so that `m0 × e_a = e_b`. For `m0 = ẑ` this is `(x̂, ŷ)`.
pub fn transverse_frame<T: Real>(m0: [T; 3]) -> ([T; 3], [T; 3]) {
    let cross = |a: [T; 3], b: [T; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let reference = if m0[1].abs() < T::lit(0.9) {
        [T::zero(), T::one(), T::zero()]
    } else {
        [T::one(), T::zero(), T::zero()]
    };
    let ea = cross(reference, m0);
    let nrm = (ea[0] * ea[0] + ea[1] * ea[1] + ea[2] * ea[2]).sqrt();
    let ea = ea.map(|v| v / nrm);
    let eb = cross(m0, ea);
    (ea, eb)
}

fn real_unit<T: Real>(m0: &ComplexSpin<T>) -> Result<[T; 3]> {
    let re = m0.re();
    let nrm = (re[0] * re[0] + re[1] * re[1] + re[2] * re[2]).sqrt();
    if m0.max_imag() > T::tol(1e-12, 16.0) || (nrm - T::one()).abs() > T::tol(1e-10, 1e4) {
        return Err(Error::InvalidArgument("m0 must be a real unit vector".into()));
    }
    Ok(re)
}

/// Static one-soliton datum `s = Im(x₁)·(u(φ) + i m₀)`, with `u(φ)` the unit
/// vector at angle `phase` in the plane orthogonal to `m₀`.
///
/// For `x₁ = i`, `m₀ = ẑ`, `φ = 0` this is `s = (1, 0, i)` and the field is
/// `m(x) = (2x/(x²+1), 0, (x²−1)/(x²+1))`.
pub fn single_soliton<T: Real>(x1: C<T>, m0: ComplexSpin<T>, phase: T) -> Result<RationalData<T>> {
    moving_soliton(x1, m0, phase, x1.im)
}

/// One-soliton datum from the family
/// `s = a u(φ) + i μ v(φ) + i γ m₀` with `a² = yγ`, `μ² = yγ − γ²`, `y = Im x₁`,
/// for `0 < γ ≤ y`. Both N=1 constraints hold for every member; `γ = y`
/// gives the static soliton, smaller `γ` a moving one.
pub fn moving_soliton<T: Real>(x1: C<T>, m0: ComplexSpin<T>, phase: T, gamma: T) -> Result<RationalData<T>> {
    let y = x1.im;
    if !(y > T::zero()) {
        return Err(Error::InvalidArgument("Im x1 must be positive".into()));
    }
    if !(gamma > T::zero() && gamma <= y) {
        return Err(Error::InvalidArgument("gamma must lie in (0, Im x1]".into()));
    }
    let m = real_unit(&m0)?;
    let (ea, eb) = transverse_frame(m);
    let (sn, cs) = phase.sin_cos();
    let u: [T; 3] = std::array::from_fn(|k| cs * ea[k] + sn * eb[k]);
    let v: [T; 3] = std::array::from_fn(|k| -sn * ea[k] + cs * eb[k]);
    let a = (y * gamma).sqrt();
    let mu = (y * gamma - gamma * gamma).max(T::zero()).sqrt();
    let i = ci::<T>();
    let s = ComplexSpin(std::array::from_fn(|k| {
        cr::<T>(a * u[k]) + i * cr(mu * v[k]) + i * cr(gamma * m[k])
    }));
    Ok(RationalData::new(ComplexSpin::real(m), vec![x1], vec![s]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64 as c;

    type S = ComplexSpin<f64>;

    fn static_soliton() -> RationalData<f64> {
        RationalData::new(
            S::real([0.0, 0.0, 1.0]),
            vec![c(0.0, 1.0)],
            vec![S::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))],
        )
    }

    #[test]
    fn b_matrix_static_soliton() {
        let b = b_matrix(&static_soliton(), 0).unwrap();
        let expect = Mat2::new(c(0.5, 0.0), c(0.0, -0.5), c(0.0, -0.5), c(-0.5, 0.0));
        assert!((b - expect).norm_max() < 1e-15);
    }

    #[test]
    fn b_matrix_collapses_to_m0_for_zero_spin() {
        let mut d = static_soliton();
        d.spins[0] = S::zero();
        assert_eq!(b_matrix(&d, 0).unwrap(), d.m0_matrix());
    }

    #[test]
    fn b_matrix_swap_symmetry() {
        let d = RationalData::new(
            S::real([0.0, 0.0, 1.0]),
            vec![c(-0.5, 1.0), c(1.5, 0.7)],
            vec![
                S::new(c(0.2, 0.1), c(-0.3, 0.4), c(0.5, 0.0)),
                S::new(c(-0.1, 0.6), c(0.3, 0.2), c(0.0, -0.4)),
            ],
        );
        let swapped = RationalData::new(
            d.m0,
            vec![d.poles[1], d.poles[0]],
            vec![d.spins[1], d.spins[0]],
        );
        for j in 0..2 {
            let a = b_matrix(&d, j).unwrap();
            let b = b_matrix(&swapped, 1 - j).unwrap();
            assert!((a - b).norm_max() < 1e-15);
        }
    }

    #[test]
    fn coincident_pole_is_degenerate() {
        let mut d = static_soliton();
        d.poles.push(d.poles[0]);
        d.spins.push(d.spins[0]);
        assert!(matches!(b_matrix(&d, 0), Err(Error::DegeneratePoles { .. })));
    }

    #[test]
    fn static_soliton_velocity_is_zero() {
        let d = static_soliton();
        let v = initial_velocity(&d, 0, 1e-10).unwrap();
        assert!(v.norm() < 1e-15);
        let b = b_matrix(&d, 0).unwrap();
        assert!((b * spin_to_matrix(&d.spins[0])).norm_max() < 1e-15);
    }

    #[test]
    fn violated_constraints_are_not_proportional() {
        let mut d = static_soliton();
        d.spins[0] = S::new(c(1.0, 0.0), c(0.0, 0.3), c(0.2, 1.0));
        assert!(matches!(
            initial_velocity(&d, 0, 1e-10),
            Err(Error::NotProportional { site: 0, .. })
        ));
    }

    #[test]
    fn validate_static_soliton() {
        let r = validate(&static_soliton(), &Tolerances::default());
        assert!(r.valid, "{:?}", r.problems);
        for v in r
            .null_residual
            .iter()
            .chain(&r.anticomm_residual)
            .chain(&r.eigen_residual)
            .chain([&r.m0_square_residual, &r.m0_trace_residual, &r.m0_hermitian_residual])
        {
            assert!(*v < 1e-12);
        }
    }

    #[test]
    fn validate_flags_non_unit_m0() {
        let mut d = static_soliton();
        d.m0 = S::real([0.0, 0.0, 2.0]);
        let r = validate(&d, &Tolerances::default());
        assert!(!r.valid);
        assert!((r.m0_square_residual - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn validate_flags_non_null_spin() {
        let mut d = static_soliton();
        d.spins[0] = S::real([1.0, 0.0, 0.0]);
        let r = validate(&d, &Tolerances::default());
        assert!(!r.valid);
        assert_eq!(r.null_residual[0], 1.0);
    }

    #[test]
    fn validate_flags_lower_half_plane() {
        let mut d = static_soliton();
        d.poles[0] = c(0.0, -1.0);
        assert!(!validate(&d, &Tolerances::default()).valid);
    }

    #[test]
    fn single_soliton_example() {
        let d = single_soliton(c(0.0, 1.0), S::real([0.0, 0.0, 1.0]), 0.0).unwrap();
        assert!((d.spins[0] - S::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))).norm() < 1e-15);
        let r = validate(&d, &Tolerances::default());
        assert!(r.valid);
        let a = spin_to_matrix(&d.spins[0]);
        let b = b_matrix(&d, 0).unwrap();
        assert!(b.anticommutator(&a).norm_max() < 1e-15);
    }

    #[test]
    fn single_soliton_profile() {
        let d = single_soliton(c(0.0, 1.0), S::real([0.0, 0.0, 1.0]), 0.0).unwrap();
        for k in 0..21 {
            let x = -5.0 + 0.5 * k as f64;
            let m = crate::spin::matrix_to_spin(&d.field_matrix(c(x, 0.0)), 1e-12).unwrap();
            let expect = [2.0 * x / (x * x + 1.0), 0.0, (x * x - 1.0) / (x * x + 1.0)];
            for i in 0..3 {
                assert!((m[i] - c(expect[i], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn soliton_family_is_valid_everywhere() {
        let tol = Tolerances::default();
        for (k, m0) in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, 1.0, 0.0], [-0.48, 0.6, 0.64]]
            .into_iter()
            .enumerate()
        {
            for gamma in [0.3, 0.9, 1.7] {
                let x1 = c(0.4 * k as f64 - 1.0, 1.7);
                let d = moving_soliton(x1, S::real(m0), 0.3 + k as f64, gamma).unwrap();
                let r = validate(&d, &tol);
                assert!(r.valid, "{m0:?} γ={gamma}: {:?}", r.problems);
                let pv = projected_velocity(&d, 0).unwrap();
                let tv = trace_velocity(&d, 0).unwrap();
                assert!((pv - tv).norm() < 1e-12);
            }
            let st = single_soliton(c(0.0, 1.7), S::real(m0), 1.0).unwrap();
            assert!(projected_velocity(&st, 0).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn bad_soliton_arguments() {
        let m0 = S::real([0.0, 0.0, 1.0]);
        assert!(single_soliton(c(0.0, -1.0), m0, 0.0).is_err());
        assert!(single_soliton(c(0.0, 1.0), S::real([0.0, 0.0, 2.0]), 0.0).is_err());
        assert!(moving_soliton(c(0.0, 1.0), m0, 0.0, 1.5).is_err());
    }
}
