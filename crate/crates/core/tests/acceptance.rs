//! Acceptance suite: one test and one PASS/FAIL line per criterion.
//! Run with `cargo test -p hwm-core --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::{datum, report, rel, rng, tol, zhat};
use hwm_core::halfspin::{block_diagonal, double, h_matrix, lift_series, HalfSpinPair};
use hwm_core::lax::{lax_series, max_relative_drift};
use hwm_core::linalg::{char_poly, power_traces};
use hwm_core::oracle::{integrate_spin_cm_from, SpinCMState};
use hwm_core::spin::Mat2;
use hwm_core::{
    c64, compare, full_field, hardy_rep_pi_plus, integrate_propagator, integrate_spin_cm, lax_residual,
    pde_residual, pi_minus, pi_plus, single_soliton, spin_to_matrix, CMatrix, Complex64, Datum, Evolution,
    SampleGrid, Spin,
};
use rand::Rng;

fn n2_data() -> Vec<Datum> {
    [101, 202, 303].iter().map(|&s| datum(2, s)).collect()
}

fn rand_c(r: &mut impl Rng) -> Complex64 {
    c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

#[test]
fn criterion_01_static_soliton_exactness() {
    let start = Instant::now();
    let d = single_soliton(c64(0.0, 1.0), zhat(), 0.0).unwrap();
    let spin_ok = (d.spins[0] - Spin::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0))).norm() < 1e-15;
    let fe = Evolution::new(&d, &tol()).unwrap();
    let mut sup: f64 = 0.0;
    for t in [0.0, 0.5, 1.0, 10.0] {
        for i in 0..201 {
            let x = -10.0 + 0.1 * i as f64;
            let m = full_field(&fe, t, x).unwrap().m;
            let q = x * x + 1.0;
            let expect = [2.0 * x / q, 0.0, (x * x - 1.0) / q];
            for k in 0..3 {
                sup = sup.max((m[k] - expect[k]).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = spin_ok && sup < 1e-12 && elapsed < 1.0;
    report(1, "static soliton exactness", pass, format!("sup err {sup:.2e}, {elapsed:.3} s"));
    assert!(pass);
}

#[test]
fn criterion_02_formula_vs_oracle() {
    let start = Instant::now();
    let grid = SampleGrid::uniform(1.0, 11, -10.0, 10.0, 201);
    let mut worst: f64 = 0.0;
    for d in n2_data() {
        let fe = Evolution::new(&d, &tol()).unwrap();
        let traj = integrate_spin_cm(&d, 1.0, 1e-3, &tol()).unwrap();
        let rep = compare(&fe, &traj, &grid).unwrap();
        worst = worst.max(rep.max_field_error);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-6 && elapsed < 30.0;
    report(2, "formula vs oracle", pass, format!("sup field err {worst:.2e} over 3 data, {elapsed:.2} s"));
    assert!(pass);
}

#[test]
fn criterion_03_isospectrality() {
    let mut worst_char: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut data = n2_data();
    data.push(datum(3, 404));
    data.push(datum(4, 505));
    for d in data {
        let n = d.len();
        let traj = integrate_spin_cm(&d, 1.0, 1e-3, &tol()).unwrap();
        let pairs = lax_series(&traj.states);
        let chars: Vec<_> = pairs.iter().map(|p| char_poly(&p.l)).collect();
        let traces: Vec<_> = pairs.iter().map(|p| power_traces(&p.l, 2 * n)).collect();
        worst_char = worst_char.max(max_relative_drift(&chars));
        worst_trace = worst_trace.max(max_relative_drift(&traces));
    }
    let pass = worst_char < 1e-8 && worst_trace < 1e-8;
    report(
        3,
        "isospectrality",
        pass,
        format!("char drift {worst_char:.2e}, trace drift {worst_trace:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_lax_residual_order() {
    let mut ratios = Vec::new();
    for d in n2_data().into_iter().chain([datum(3, 404)]) {
        let h = 0.01;
        let coarse = integrate_spin_cm(&d, 1.0, h, &tol()).unwrap();
        let fine = integrate_spin_cm(&d, 1.0, h / 2.0, &tol()).unwrap();
        let r1 = lax_residual(&coarse.states, h);
        let r2 = lax_residual(&fine.states, h / 2.0);
        ratios.push(r1 / r2);
    }
    let pass = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    report(4, "Lax residual order", pass, format!("ratios [{}]", shown.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_05_halfspin_transport() {
    let mut worst_e: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for d in n2_data().into_iter().chain([datum(3, 404)]) {
        let traj = integrate_spin_cm(&d, 1.0, 1e-3, &tol()).unwrap();
        let spins: Vec<_> = traj.states.iter().map(|s| s.spins.clone()).collect();
        let lifted = lift_series(&spins);
        let props = integrate_propagator(&traj, &tol()).unwrap();
        let e0: Vec<Mat2<f64>> = lifted[0].iter().map(HalfSpinPair::e_block).collect();
        let f0: Vec<Mat2<f64>> = lifted[0].iter().map(HalfSpinPair::f_block).collect();
        let last = lifted.len() - 1;
        let u = double(&props[last].u);
        let ue = u.apply_blocks(&e0);
        let uf = u.apply_blocks(&f0);
        for (j, p) in lifted[last].iter().enumerate() {
            worst_e = worst_e.max((p.e_block() - ue[j]).norm_fro());
            worst_f = worst_f.max((p.f_block() - uf[j]).norm_fro());
        }
    }
    let pass = worst_e < 1e-6 && worst_f < 1e-6;
    report(
        5,
        "half-spin transport",
        pass,
        format!("E err {worst_e:.2e}, F err {worst_f:.2e} at t = 1"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_conjugacy_and_hardy_equivalence() {
    let mut r = rng(606);
    let evolutions: Vec<Evolution> = (2..=4)
        .map(|n| Evolution::new(&datum(n, 600 + n as u64), &tol()).unwrap())
        .collect();
    let mut worst_conj: f64 = 0.0;
    let mut worst_hardy: f64 = 0.0;
    for i in 0..1000 {
        let fe = &evolutions[i % evolutions.len()];
        let t = r.gen_range(0.0..1.0);
        let x = c64(r.gen_range(-10.0..10.0), 0.0);
        let pm = pi_minus(fe, t, x).unwrap();
        let pp = pi_plus(fe, t, x).unwrap();
        let hp = hardy_rep_pi_plus(fe, t, x).unwrap();
        worst_conj = worst_conj.max(rel((pp - pm.adjoint()).norm_max(), pp.norm_max()));
        worst_hardy = worst_hardy.max(rel((hp - pp).norm_max(), pp.norm_max()));
    }
    let pass = worst_conj < 1e-12 && worst_hardy < 1e-12;
    report(
        6,
        "pi_plus/pi_minus conjugacy and Hardy equivalence",
        pass,
        format!("conj err {worst_conj:.2e}, Hardy err {worst_hardy:.2e}, 1000 samples"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_partial_fraction_identity() {
    let mut r = rng(707);
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for rep in 0..3 {
            let d = datum(n, 700 + 10 * n as u64 + rep);
            let fe = Evolution::new(&d, &tol()).unwrap();
            for _ in 0..20 {
                let x = c64(r.gen_range(-12.0..12.0), r.gen_range(-3.0..0.5));
                let direct = d.partial_fractions_minus(x);
                let formula = pi_minus(&fe, 0.0, x).unwrap();
                worst = worst.max(rel((formula - direct).norm_max(), direct.norm_max()));
            }
        }
    }
    let pass = worst < 1e-12;
    report(7, "partial-fraction identity at t = 0", pass, format!("max err {worst:.2e}, N = 1..6"));
    assert!(pass);
}

fn random_spin(r: &mut impl Rng) -> Spin {
    Spin::new(rand_c(r), rand_c(r), rand_c(r))
}

fn random_matrix(r: &mut impl Rng, n: usize) -> CMatrix<f64> {
    CMatrix::from_fn(n, n, |_, _| rand_c(r))
}

#[test]
fn criterion_08_algebraic_lemmas() {
    const CASES: usize = 500;
    let mut r = rng(808);
    let mut worst = [0.0f64; 6];
    let names = [
        "H D1 D2 H = (d1.d2) H",
        "[AB] = [A][B]",
        "[U] commutes with block diagonals",
        "(xi_j.e_k)^2 = -2 s_j.s_k",
        "pairing antisymmetry",
        "Pauli product identity",
    ];
    let h = h_matrix::<f64>();
    for _ in 0..CASES {
        let (d1, d2) = ([rand_c(&mut r), rand_c(&mut r)], [rand_c(&mut r), rand_c(&mut r)]);
        let lhs = h * Mat2::diag(d1[0], d1[1]) * Mat2::diag(d2[0], d2[1]) * h;
        let rhs = h.scale(d1[0] * d2[0] + d1[1] * d2[1]);
        worst[0] = worst[0].max((lhs - rhs).norm_max());

        let n = r.gen_range(1..=5);
        let (a, b) = (random_matrix(&mut r, n), random_matrix(&mut r, n));
        let ab = double(&(&a * &b)).materialize();
        let prod = &double(&a).materialize() * &double(&b).materialize();
        worst[1] = worst[1].max((&ab - &prod).norm_max());

        let u = double(&a).materialize();
        let blk = block_diagonal(&Mat2::new(rand_c(&mut r), rand_c(&mut r), rand_c(&mut r), rand_c(&mut r)), n);
        worst[2] = worst[2].max((&(&u * &blk) - &(&blk * &u)).norm_max());

        let (p, q) = (
            HalfSpinPair::new(rand_c(&mut r), rand_c(&mut r)),
            HalfSpinPair::new(rand_c(&mut r), rand_c(&mut r)),
        );
        let pq = hwm_core::halfspin::pairing(&p, &q);
        let dot = p.to_spin().dot(&q.to_spin());
        worst[3] = worst[3].max((pq * pq + dot * 2.0).norm());
        worst[4] = worst[4].max((pq + hwm_core::halfspin::pairing(&q, &p)).norm());

        let (sa, sb) = (random_spin(&mut r), random_spin(&mut r));
        let lhs = spin_to_matrix(&sa) * spin_to_matrix(&sb);
        let rhs = Mat2::identity().scale(sa.dot(&sb)) + spin_to_matrix(&sa.cross(&sb)).scale(c64(0.0, 1.0));
        worst[5] = worst[5].max((lhs - rhs).norm_max());
    }
    let pass = worst.iter().all(|&w| w < 1e-12);
    let detail: Vec<String> = names.iter().zip(&worst).map(|(n, w)| format!("{n}: {w:.1e}")).collect();
    report(8, "algebraic lemmas", pass, format!("{CASES} cases each; {}", detail.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_09_sphere_and_reality() {
    let grid = SampleGrid::uniform(1.0, 11, -10.0, 10.0, 201);
    let mut sphere: f64 = 0.0;
    let mut imag: f64 = 0.0;
    for d in n2_data() {
        let fe = Evolution::new(&d, &tol()).unwrap();
        let traj = integrate_spin_cm(&d, 1.0, 1e-3, &tol()).unwrap();
        for row in compare(&fe, &traj, &grid).unwrap().rows {
            sphere = sphere.max(row.sphere_deviation);
            imag = imag.max(row.imag_residual);
        }
    }
    let pass = sphere < 1e-8 && imag < 1e-8;
    report(9, "sphere and reality", pass, format!("||m|^2 - 1| {sphere:.2e}, Im {imag:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_10_pde_residual() {
    let points = [(0.3, -1.0), (0.5, 0.2), (0.8, 2.5)];
    let mut ratios = Vec::new();
    for d in n2_data() {
        let fe = Evolution::new(&d, &tol()).unwrap();
        for &(t, x) in &points {
            let r1 = pde_residual(&fe, t, x, 1e-2).unwrap();
            let r2 = pde_residual(&fe, t, x, 5e-3).unwrap();
            ratios.push(r1 / r2);
        }
    }
    // negative control: valid datum with one spin rescaled
    let mut bad = n2_data().remove(0);
    bad.spins[1] = bad.spins[1].scale(c64(1.5, 0.0));
    let fe_bad = Evolution::new_unchecked(&bad, &tol()).unwrap();
    let mut control = f64::INFINITY;
    for &(t, x) in &points {
        let r = pde_residual(&fe_bad, t, x, 1e-3).unwrap();
        control = control.min(r);
    }
    let order_ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    let control_ok = control > 1e-3;
    let pass = order_ok && control_ok;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    report(
        10,
        "PDE residual",
        pass,
        format!("ratios in [{lo:.3}, {hi:.3}], negative control residual >= {control:.2e}"),
    );
    assert!(pass);
}

#[test]
fn oracle_halving_leaves_comparison_unchanged() {
    // supporting check for criterion 2: the oracle is converged at h = 1e-3
    let d = datum(2, 101);
    let fe = Evolution::new(&d, &tol()).unwrap();
    let grid = SampleGrid::uniform(1.0, 3, -5.0, 5.0, 21);
    let start = SpinCMState {
        t: 0.0,
        poles: d.poles.clone(),
        velocities: hwm_core::initial_velocities(&d, 1e-10).unwrap(),
        spins: d.spins.clone(),
    };
    let a = integrate_spin_cm_from(d.m0, start.clone(), 1.0, 1e-3, &tol(), false).unwrap();
    let b = integrate_spin_cm_from(d.m0, start, 1.0, 5e-4, &tol(), false).unwrap();
    let ea = compare(&fe, &a, &grid).unwrap().max_field_error;
    let eb = compare(&fe, &b, &grid).unwrap().max_field_error;
    assert!(ea < 1e-10 && eb < 1e-10, "{ea:e} {eb:e}");
}
