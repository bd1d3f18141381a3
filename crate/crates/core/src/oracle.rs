//! Independent reference integrators for the pole dynamics.
//!
//! Two first-order systems are integrated with classical fourth-order
//! Runge–Kutta at a fixed step:
//!
//! ```text
//! spin form:       ẋ_j = v_j,  v̇_j = −4 Σ_k s_j·s_k/(x_j − x_k)³,
//!                  ṡ_j = 2i Σ_k s_j × s_k/(x_j − x_k)²
//! half-spin form:  ẋ_j = v_j,  v̇_j = 2 Σ_k (ξ_j·e_k)²/(x_j − x_k)³,
//!                  α̇ = B α,    β̇ = B β
//! ```
//!
//! with `B_jk = (ξ_j·e_k)/(x_j − x_k)²`. The half-spin form can be augmented
//! with the propagator `U̇ = B U, U(0) = I`.

use crate::constraints::{initial_velocities, require_valid, RationalData};
use crate::error::{Error, Result};
use crate::evolution::{poles_and_spins_at, FrozenEvolution};
use crate::halfspin::{assemble, canonical_halfspins_unchecked, pairing, HalfSpinPair};
use crate::linalg::CMatrix;
use crate::scalar::{c, ci, czero, Real, C};
use crate::spin::{matrix_to_spin_unchecked, ComplexSpin};
use crate::tolerance::Tolerances;

/// Read access shared by the two trajectory state types.
pub trait OracleState<T: Real> {
    fn t(&self) -> T;
    fn poles(&self) -> &[C<T>];
    fn velocities(&self) -> &[C<T>];
    fn spins(&self) -> Vec<ComplexSpin<T>>;
    /// Half-spins carried by the state, if it has them.
    fn halfspins(&self) -> Option<Vec<HalfSpinPair<T>>> {
        None
    }
}

/// `(x, ẋ, s)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCMState<T: Real> {
    pub t: T,
    pub poles: Vec<C<T>>,
    pub velocities: Vec<C<T>>,
    pub spins: Vec<ComplexSpin<T>>,
}

/// `(x, ẋ, α, β)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpinState<T: Real> {
    pub t: T,
    pub poles: Vec<C<T>>,
    pub velocities: Vec<C<T>>,
    pub pairs: Vec<HalfSpinPair<T>>,
}

impl<T: Real> OracleState<T> for SpinCMState<T> {
    fn t(&self) -> T {
        self.t
    }
    fn poles(&self) -> &[C<T>] {
        &self.poles
    }
    fn velocities(&self) -> &[C<T>] {
        &self.velocities
    }
    fn spins(&self) -> Vec<ComplexSpin<T>> {
        self.spins.clone()
    }
}

impl<T: Real> OracleState<T> for HalfSpinState<T> {
    fn t(&self) -> T {
        self.t
    }
    fn poles(&self) -> &[C<T>] {
        &self.poles
    }
    fn velocities(&self) -> &[C<T>] {
        &self.velocities
    }
    fn spins(&self) -> Vec<ComplexSpin<T>> {
        self.pairs.iter().map(HalfSpinPair::to_spin).collect()
    }
    fn halfspins(&self) -> Option<Vec<HalfSpinPair<T>>> {
        Some(self.pairs.clone())
    }
}

/// Samples `t_k = k h`, `k = 0..=steps`.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real, S> {
    pub h: T,
    pub m0: ComplexSpin<T>,
    pub states: Vec<S>,
    /// `max |y_h(t₁) − y_{h/2}(t₁)| / 15` when it was requested and computable.
    pub richardson_error: Option<T>,
}

impl<T: Real, S: OracleState<T>> Trajectory<T, S> {
    /// The datum at sample `i` (field reconstruction, constraint checks).
    pub fn data_at(&self, i: usize) -> RationalData<T> {
        let s = &self.states[i];
        RationalData::new(self.m0, s.poles().to_vec(), s.spins())
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Sample index closest to time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let k = (t / self.h).round();
        let i = k.to_usize()?;
        let on_grid = (k * self.h - t).abs() <= self.h * T::lit(1e-6);
        (on_grid && i < self.states.len()).then_some(i)
    }
}

/// Propagator `U(t)` with `α(t) = U(t) α(0)`, `β(t) = U(t) β(0)`.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    pub t: T,
    pub u: CMatrix<T>,
}

/// Right-hand side of the spin form.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCMRates<T: Real> {
    pub dx: Vec<C<T>>,
    pub dv: Vec<C<T>>,
    pub ds: Vec<ComplexSpin<T>>,
}

/// Right-hand side of the half-spin form.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpinRates<T: Real> {
    pub dx: Vec<C<T>>,
    pub dv: Vec<C<T>>,
    pub dalpha: Vec<C<T>>,
    pub dbeta: Vec<C<T>>,
}

/// Index order in which the spin-flow matrix is assembled. Both give the same
/// rates because the pairing is antisymmetric; having both lets that be
/// checked on arbitrary states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingOrder {
    /// `α̇_j = Σ_k (ξ_j·e_k)/(x_j − x_k)² α_k`.
    Forward,
    /// `α̇_j = −Σ_k (ξ_k·e_j)/(x_j − x_k)² α_k`.
    Reversed,
}

fn inv_differences<T: Real>(x: &[C<T>], t: T, guard: T) -> Result<CMatrix<T>> {
    let n = x.len();
    let mut d = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let diff = x[j] - x[k];
            let sep = diff.norm();
            if !(sep >= guard) {
                return Err(Error::PoleCollision {
                    t: t.to_f64_lossy(),
                    separation: sep.to_f64_lossy(),
                });
            }
            d[(j, k)] = diff.inv();
        }
    }
    Ok(d)
}

/// Rates of the spin form at `state`; fails if two poles are closer than `guard`.
pub fn rhs_spin_cm<T: Real>(state: &SpinCMState<T>, guard: T) -> Result<SpinCMRates<T>> {
    let n = state.poles.len();
    let d = inv_differences(&state.poles, state.t, guard)?;
    let two_i = ci::<T>() * c::<T>(2.0, 0.0);
    let mut dv = vec![czero(); n];
    let mut ds = vec![ComplexSpin::zero(); n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let r = d[(j, k)];
            let r2 = r * r;
            dv[j] = dv[j] - state.spins[j].dot(&state.spins[k]) * r2 * r * c::<T>(4.0, 0.0);
            ds[j] = ds[j] + state.spins[j].cross(&state.spins[k]).scale(two_i * r2);
        }
    }
    Ok(SpinCMRates {
        dx: state.velocities.clone(),
        dv,
        ds,
    })
}

/// Rates of the half-spin form.
pub fn rhs_halfspin<T: Real>(state: &HalfSpinState<T>, order: PairingOrder, guard: T) -> Result<HalfSpinRates<T>> {
    let n = state.poles.len();
    let d = inv_differences(&state.poles, state.t, guard)?;
    let b = flow_matrix(&state.pairs, &d, order);
    let mut dv = vec![czero(); n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let p = pairing(&state.pairs[j], &state.pairs[k]);
                let r = d[(j, k)];
                dv[j] = dv[j] + p * p * r * r * r * c::<T>(2.0, 0.0);
            }
        }
    }
    let alphas: Vec<_> = state.pairs.iter().map(|p| p.alpha).collect();
    let betas: Vec<_> = state.pairs.iter().map(|p| p.beta).collect();
    Ok(HalfSpinRates {
        dx: state.velocities.clone(),
        dv,
        dalpha: b.matvec(&alphas),
        dbeta: b.matvec(&betas),
    })
}

fn flow_matrix<T: Real>(pairs: &[HalfSpinPair<T>], d: &CMatrix<T>, order: PairingOrder) -> CMatrix<T> {
    let n = pairs.len();
    CMatrix::from_fn(n, n, |j, k| {
        if j == k {
            return czero();
        }
        let r2 = d[(j, k)] * d[(j, k)];
        match order {
            PairingOrder::Forward => pairing(&pairs[j], &pairs[k]) * r2,
            PairingOrder::Reversed => -pairing(&pairs[k], &pairs[j]) * r2,
        }
    })
}

/// One classical RK4 step for `y' = f(y)` on a flat complex vector.
fn rk4_step<T: Real, F>(y: &[C<T>], h: T, f: &F) -> Result<Vec<C<T>>>
where
    F: Fn(&[C<T>], T) -> Result<Vec<C<T>>>,
{
    let half = h * T::lit(0.5);
    let axpy = |a: &[C<T>], s: T, b: &[C<T>]| -> Vec<C<T>> {
        a.iter().zip(b).map(|(x, y)| *x + *y * s).collect()
    };
    let k1 = f(y, T::zero())?;
    let k2 = f(&axpy(y, half, &k1), half)?;
    let k3 = f(&axpy(y, half, &k2), half)?;
    let k4 = f(&axpy(y, h, &k3), h)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    Ok(y.iter()
        .enumerate()
        .map(|(i, yi)| *yi + (k1[i] + k2[i] * two + k3[i] * two + k4[i]) * sixth)
        .collect())
}

fn step_count<T: Real>(t1: T, h: T) -> Result<usize> {
    if !(h > T::zero()) || !(t1 >= T::zero()) {
        return Err(Error::InvalidArgument("need h > 0 and t1 >= 0".into()));
    }
    let k = (t1 / h).round();
    if (k * h - t1).abs() > h * T::lit(1e-6) {
        return Err(Error::InvalidArgument(format!("t1 = {t1} is not a multiple of h = {h}")));
    }
    k.to_usize()
        .ok_or_else(|| Error::InvalidArgument("step count out of range".into()))
}

fn check_boundary<T: Real>(x: &[C<T>], t: T, tol: &Tolerances<T>) -> Result<()> {
    let min_im = x.iter().map(|z| z.im).fold(T::infinity(), T::min);
    if !(min_im >= tol.boundary) {
        return Err(Error::BoundaryApproach {
            t: t.to_f64_lossy(),
            min_im: min_im.to_f64_lossy(),
        });
    }
    Ok(())
}

fn pack_spin_cm<T: Real>(s: &SpinCMState<T>) -> Vec<C<T>> {
    let mut y = s.poles.clone();
    y.extend(&s.velocities);
    y.extend(s.spins.iter().flat_map(|v| v.0));
    y
}

fn unpack_spin_cm<T: Real>(y: &[C<T>], n: usize, t: T) -> SpinCMState<T> {
    SpinCMState {
        t,
        poles: y[..n].to_vec(),
        velocities: y[n..2 * n].to_vec(),
        spins: y[2 * n..5 * n]
            .chunks(3)
            .map(|c| ComplexSpin::new(c[0], c[1], c[2]))
            .collect(),
    }
}

fn pack_halfspin<T: Real>(s: &HalfSpinState<T>) -> Vec<C<T>> {
    let mut y = s.poles.clone();
    y.extend(&s.velocities);
    y.extend(s.pairs.iter().map(|p| p.alpha));
    y.extend(s.pairs.iter().map(|p| p.beta));
    y
}

fn unpack_halfspin<T: Real>(y: &[C<T>], n: usize, t: T) -> HalfSpinState<T> {
    HalfSpinState {
        t,
        poles: y[..n].to_vec(),
        velocities: y[n..2 * n].to_vec(),
        pairs: (0..n)
            .map(|j| HalfSpinPair::new(y[2 * n + j], y[3 * n + j]))
            .collect(),
    }
}

fn spin_cm_field<T: Real>(n: usize, t0: T, guard: T) -> impl Fn(&[C<T>], T) -> Result<Vec<C<T>>> {
    move |y, dt| {
        let r = rhs_spin_cm(&unpack_spin_cm(y, n, t0 + dt), guard)?;
        let mut out = r.dx;
        out.extend(r.dv);
        out.extend(r.ds.iter().flat_map(|v| v.0));
        Ok(out)
    }
}

fn halfspin_field<T: Real>(n: usize, t0: T, guard: T) -> impl Fn(&[C<T>], T) -> Result<Vec<C<T>>> {
    move |y, dt| {
        let r = rhs_halfspin(&unpack_halfspin(y, n, t0 + dt), PairingOrder::Forward, guard)?;
        let mut out = r.dx;
        out.extend(r.dv);
        out.extend(r.dalpha);
        out.extend(r.dbeta);
        Ok(out)
    }
}

/// March `y0` through `steps` RK4 steps, calling `record` after each.
fn march<T: Real, F, G>(
    y0: Vec<C<T>>,
    n: usize,
    h: T,
    steps: usize,
    tol: &Tolerances<T>,
    make_field: F,
    mut record: impl FnMut(&[C<T>], T),
) -> Result<Vec<C<T>>>
where
    F: Fn(T) -> G,
    G: Fn(&[C<T>], T) -> Result<Vec<C<T>>>,
{
    let mut y = y0;
    for k in 0..steps {
        let t = T::from_usize(k).unwrap() * h;
        y = rk4_step(&y, h, &make_field(t))?;
        let t_next = T::from_usize(k + 1).unwrap() * h;
        check_boundary(&y[..n], t_next, tol)?;
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::PoleCollision {
                t: t_next.to_f64_lossy(),
                separation: 0.0,
            });
        }
        record(&y, t_next);
    }
    Ok(y)
}

fn richardson<T: Real>(coarse: &[C<T>], fine: &[C<T>]) -> T {
    coarse
        .iter()
        .zip(fine)
        .map(|(a, b)| (*a - *b).norm())
        .fold(T::zero(), T::max)
        / T::lit(15.0)
}

/// Integrate the spin form from a valid datum over `[0, t1]` with step `h`.
pub fn integrate_spin_cm<T: Real>(
    data: &RationalData<T>,
    t1: T,
    h: T,
    tol: &Tolerances<T>,
) -> Result<Trajectory<T, SpinCMState<T>>> {
    require_valid(data, tol)?;
    let start = SpinCMState {
        t: T::zero(),
        poles: data.poles.clone(),
        velocities: initial_velocities(data, tol.constraint)?,
        spins: data.spins.clone(),
    };
    integrate_spin_cm_from(data.m0, start, t1, h, tol, true)
}

/// Integrate the spin form from an arbitrary state (no constraint checks).
/// With `estimate` set the run is repeated at `h/2` for a Richardson estimate.
pub fn integrate_spin_cm_from<T: Real>(
    m0: ComplexSpin<T>,
    start: SpinCMState<T>,
    t1: T,
    h: T,
    tol: &Tolerances<T>,
    estimate: bool,
) -> Result<Trajectory<T, SpinCMState<T>>> {
    let steps = step_count(t1, h)?;
    let n = start.poles.len();
    let y0 = pack_spin_cm(&start);
    let mut states = vec![SpinCMState { t: T::zero(), ..start }];
    let guard = tol.pole_guard;
    let coarse = march(y0.clone(), n, h, steps, tol, |t| spin_cm_field(n, t, guard), |y, t| {
        states.push(unpack_spin_cm(y, n, t))
    })?;
    let richardson_error = if estimate {
        let h2 = h * T::lit(0.5);
        march(y0, n, h2, 2 * steps, tol, |t| spin_cm_field(n, t, guard), |_, _| {})
            .ok()
            .map(|fine| richardson(&coarse, &fine))
    } else {
        None
    };
    Ok(Trajectory {
        h,
        m0,
        states,
        richardson_error,
    })
}

/// Integrate the half-spin form from a valid datum, starting from the
/// canonical half-spins.
pub fn integrate_halfspin<T: Real>(
    data: &RationalData<T>,
    t1: T,
    h: T,
    tol: &Tolerances<T>,
) -> Result<Trajectory<T, HalfSpinState<T>>> {
    require_valid(data, tol)?;
    let start = HalfSpinState {
        t: T::zero(),
        poles: data.poles.clone(),
        velocities: initial_velocities(data, tol.constraint)?,
        pairs: assemble(data, tol.algebra)?.pairs,
    };
    integrate_halfspin_from(data.m0, start, t1, h, tol)
}

/// Integrate the half-spin form from an arbitrary state.
pub fn integrate_halfspin_from<T: Real>(
    m0: ComplexSpin<T>,
    start: HalfSpinState<T>,
    t1: T,
    h: T,
    tol: &Tolerances<T>,
) -> Result<Trajectory<T, HalfSpinState<T>>> {
    let steps = step_count(t1, h)?;
    let n = start.poles.len();
    let y0 = pack_halfspin(&start);
    let mut states = vec![HalfSpinState { t: T::zero(), ..start }];
    let guard = tol.pole_guard;
    march(y0, n, h, steps, tol, |t| halfspin_field(n, t, guard), |y, t| {
        states.push(unpack_halfspin(y, n, t))
    })?;
    Ok(Trajectory {
        h,
        m0,
        states,
        richardson_error: None,
    })
}

/// Propagator along a trajectory, obtained by re-integrating the half-spin
/// form jointly with `U̇ = B U` on the trajectory's own time grid.
pub fn integrate_propagator<T: Real, S: OracleState<T>>(
    traj: &Trajectory<T, S>,
    tol: &Tolerances<T>,
) -> Result<Vec<Propagator<T>>> {
    let first = &traj.states[0];
    let n = first.poles().len();
    let pairs = first
        .halfspins()
        .unwrap_or_else(|| first.spins().iter().map(canonical_halfspins_unchecked).collect());
    let start = HalfSpinState {
        t: T::zero(),
        poles: first.poles().to_vec(),
        velocities: first.velocities().to_vec(),
        pairs,
    };
    let mut y0 = pack_halfspin(&start);
    y0.extend(CMatrix::<T>::identity(n).data().iter().copied());
    let guard = tol.pole_guard;
    let field = |t0: T| {
        move |y: &[C<T>], dt: T| -> Result<Vec<C<T>>> {
            let state = unpack_halfspin(&y[..4 * n], n, t0 + dt);
            let d = inv_differences(&state.poles, state.t, guard)?;
            let b = flow_matrix(&state.pairs, &d, PairingOrder::Forward);
            let r = rhs_halfspin(&state, PairingOrder::Forward, guard)?;
            let u = CMatrix::from_fn(n, n, |i, j| y[4 * n + i * n + j]);
            let mut out = r.dx;
            out.extend(r.dv);
            out.extend(r.dalpha);
            out.extend(r.dbeta);
            out.extend((&b * &u).data().iter().copied());
            Ok(out)
        }
    };
    let mut props = vec![Propagator {
        t: T::zero(),
        u: CMatrix::identity(n),
    }];
    let steps = traj.states.len() - 1;
    march(y0, n, traj.h, steps, tol, field, |y, t| {
        props.push(Propagator {
            t,
            u: CMatrix::from_fn(n, n, |i, j| y[4 * n + i * n + j]),
        })
    })?;
    Ok(props)
}

/// Sample times and real points at which formula and oracle are compared.
#[derive(Clone, Debug)]
pub struct SampleGrid<T: Real> {
    pub times: Vec<T>,
    pub xs: Vec<T>,
}

impl<T: Real> SampleGrid<T> {
    /// `nt` equispaced times in `[0, t1]` and `nx` points in `[xmin, xmax]`.
    pub fn uniform(t1: T, nt: usize, xmin: T, xmax: T, nx: usize) -> Self {
        let lin = |a: T, b: T, m: usize| -> Vec<T> {
            if m <= 1 {
                return vec![a];
            }
            (0..m)
                .map(|i| a + (b - a) * T::from_usize(i).unwrap() / T::from_usize(m - 1).unwrap())
                .collect()
        };
        Self {
            times: lin(T::zero(), t1, nt),
            xs: lin(xmin, xmax, nx),
        }
    }
}

/// Formula-versus-oracle errors at one time.
#[derive(Clone, Debug)]
pub struct CompareRow<T: Real> {
    pub t: T,
    /// `max_x max_k |m_k^formula(x) − m_k^oracle(x)|`.
    pub field_error: T,
    /// Largest distance between matched poles.
    pub pole_error: T,
    /// Largest `|s^formula − s^oracle|` between matched sites.
    pub spin_error: T,
    /// `max_x | |m|² − 1 |` of the formula field.
    pub sphere_deviation: T,
    /// `max_x max_k |Im m_k|` of the formula field.
    pub imag_residual: T,
}

#[derive(Clone, Debug)]
pub struct CompareReport<T: Real> {
    pub rows: Vec<CompareRow<T>>,
    pub max_field_error: T,
    pub max_pole_error: T,
    pub max_spin_error: T,
    pub richardson_error: Option<T>,
}

/// Greedy nearest-neighbour matching, ties broken by `(distance, i, j)`.
/// Returns `perm` with `a[i]` matched to `b[perm[i]]`.
pub fn match_poles<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<usize> {
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((*x - *y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| {
        p.0.partial_cmp(&q.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.1.cmp(&q.1))
            .then(p.2.cmp(&q.2))
    });
    let mut perm = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    perm
}

/// Compare the closed-form evolution against an oracle trajectory.
pub fn compare<T: Real, S: OracleState<T>>(
    fe: &FrozenEvolution<T>,
    traj: &Trajectory<T, S>,
    grid: &SampleGrid<T>,
) -> Result<CompareReport<T>> {
    let mut rows = Vec::with_capacity(grid.times.len());
    for &t in &grid.times {
        let i = traj
            .index_of(t)
            .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is not a trajectory sample")))?;
        let data = traj.data_at(i);
        let snap = poles_and_spins_at(fe, t)?;
        let perm = match_poles(&data.poles, &snap.poles);
        let mut pole_error = T::zero();
        let mut spin_error = T::zero();
        for (j, &k) in perm.iter().enumerate() {
            pole_error = pole_error.max((data.poles[j] - snap.poles[k]).norm());
            spin_error = spin_error.max((data.spins[j] - snap.spins[k]).norm());
        }
        let mut field_error = T::zero();
        let mut sphere_deviation = T::zero();
        let mut imag_residual = T::zero();
        for &x in &grid.xs {
            let xm = C::new(x, T::zero());
            let formula = matrix_to_spin_unchecked(&fe.field_matrix(t, xm)?);
            let oracle = matrix_to_spin_unchecked(&data.field_matrix(xm));
            for k in 0..3 {
                field_error = field_error.max((formula[k].re - oracle[k].re).abs());
                imag_residual = imag_residual.max(formula[k].im.abs());
            }
            let r = formula.re();
            let sq = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
            sphere_deviation = sphere_deviation.max((sq - T::one()).abs());
        }
        rows.push(CompareRow {
            t,
            field_error,
            pole_error,
            spin_error,
            sphere_deviation,
            imag_residual,
        });
    }
    let fold = |f: fn(&CompareRow<T>) -> T| rows.iter().map(f).fold(T::zero(), T::max);
    Ok(CompareReport {
        max_field_error: fold(|r| r.field_error),
        max_pole_error: fold(|r| r.pole_error),
        max_spin_error: fold(|r| r.spin_error),
        richardson_error: traj.richardson_error,
        rows,
    })
}
