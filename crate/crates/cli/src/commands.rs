//! Command implementations. Each returns the full output text so that
//! identical inputs give byte-identical output.

use std::fmt::Write as _;

use hwm_core::oracle::match_poles;
use hwm_core::{
    build_lax, c64, compare, conserved_traces, integrate_spin_cm, poles_and_spins_at, random_valid_datum,
    single_soliton, ConstraintReport, Datum, Evolution, SampleGrid, SearchOptions, Spin, Tolerances,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{datum_to_toml, load_datum, CliError, Command, RunConfig};

/// Text to emit and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// Lossless float formatting (17 significant digits).
fn f(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check()?;
    if cfg.command == Command::SolitonGen {
        return soliton_gen(cfg).map(Outcome::ok);
    }
    let path = cfg
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("an input datum file is required".into()))?;
    let tol = cfg.tolerances();
    if cfg.command == Command::Validate {
        let (data, report) = load_datum(path, &tol, true)?;
        let code = if report.valid { 0 } else { 2 };
        return Ok(Outcome {
            text: validation_report(&data, &report),
            code,
        });
    }
    let (data, _) = load_datum(path, &tol, cfg.force)?;
    let fe = if cfg.force {
        Evolution::new(&data, &tol).or_else(|_| Evolution::new_unchecked(&data, &tol))?
    } else {
        Evolution::new(&data, &tol)?
    };
    let text = match cfg.command {
        Command::Evolve => evolve(cfg, &fe),
        Command::Poles => poles(cfg, &fe, &data)?,
        Command::Conserved => conserved(cfg, &fe, &tol)?,
        Command::OracleCompare => oracle_compare(cfg, &fe, &data, &tol)?,
        Command::Validate | Command::SolitonGen => unreachable!(),
    };
    Ok(Outcome::ok(text))
}

fn validation_report(data: &Datum, r: &ConstraintReport<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "valid: {}", r.valid);
    let _ = writeln!(out, "poles: {}", data.len());
    let _ = writeln!(out, "m0_square_residual: {}", f(r.m0_square_residual));
    let _ = writeln!(out, "m0_trace_residual: {}", f(r.m0_trace_residual));
    let _ = writeln!(out, "m0_hermitian_residual: {}", f(r.m0_hermitian_residual));
    let _ = writeln!(out, "min_imag: {}", f(r.min_imag));
    let _ = writeln!(out, "min_separation: {}", f(r.min_separation));
    let _ = writeln!(out, "j,null_residual,anticomm_residual,eigen_residual,re_b,im_b");
    for j in 0..data.len() {
        let (re, im) = r.velocities[j].map_or((f64::NAN, f64::NAN), |v| (v.re, v.im));
        let _ = writeln!(
            out,
            "{j},{},{},{},{},{}",
            f(r.null_residual[j]),
            f(r.anticomm_residual[j]),
            f(r.eigen_residual[j]),
            f(re),
            f(im)
        );
    }
    for p in &r.problems {
        let _ = writeln!(out, "problem: {p}");
    }
    out
}

fn evolve(cfg: &RunConfig, fe: &Evolution) -> String {
    let times = cfg.times();
    let xs = cfg.xs();
    let reality = fe.tol.reality;
    let rows: Vec<String> = (0..times.len() * xs.len())
        .into_par_iter()
        .map(|i| {
            let (t, x) = (times[i / xs.len()], xs[i % xs.len()]);
            match fe.field_matrix(t, c64(x, 0.0)) {
                Ok(m) => {
                    let s = hwm_core::spin::matrix_to_spin_unchecked(&m);
                    let r = s.re();
                    let im = s.max_imag();
                    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                    let status = if im <= reality * m.norm_max().max(1.0) { "ok" } else { "nonreal" };
                    format!(
                        "{},{},{},{},{},{},{},{status}",
                        f(t),
                        f(x),
                        f(r[0]),
                        f(r[1]),
                        f(r[2]),
                        f(norm - 1.0),
                        f(im)
                    )
                }
                Err(_) => {
                    let nan = f(f64::NAN);
                    format!("{},{},{nan},{nan},{nan},{nan},{nan},singular", f(t), f(x))
                }
            }
        })
        .collect();
    let mut out = String::from("t,x,m1,m2,m3,norm_minus_1,im_residual,status\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn spin_cols(s: &Spin) -> String {
    s.0.iter()
        .map(|z| format!("{},{}", f(z.re), f(z.im)))
        .collect::<Vec<_>>()
        .join(",")
}

/// Poles and spins per time. Labels follow each pole continuously from its
/// input position by nearest-neighbour matching between consecutive times.
fn poles(cfg: &RunConfig, fe: &Evolution, data: &Datum) -> Result<String, CliError> {
    let mut out = String::from("t,j,re_x,im_x,re_s1,im_s1,re_s2,im_s2,re_s3,im_s3,conditioning,boundary_warning\n");
    let mut previous = data.poles.clone();
    for t in cfg.times() {
        let snap = poles_and_spins_at(fe, t)?;
        let perm = match_poles(&previous, &snap.poles);
        for (j, &k) in perm.iter().enumerate() {
            // exact input values at t = 0
            let x = if t == 0.0 { data.poles[j] } else { snap.poles[k] };
            let _ = writeln!(
                out,
                "{},{j},{},{},{},{},{}",
                f(t),
                f(x.re),
                f(x.im),
                spin_cols(&snap.spins[k]),
                f(snap.conditioning),
                snap.boundary_warning
            );
        }
        previous = perm.iter().map(|&k| snap.poles[k]).collect();
    }
    Ok(out)
}

/// `Tr L^k` at `t = 0` and its worst relative drift over the time grid, with
/// `L(t)` rebuilt from the pole snapshot at each time.
fn conserved(cfg: &RunConfig, fe: &Evolution, tol: &Tolerances<f64>) -> Result<String, CliError> {
    let kmax = cfg.kmax.unwrap_or(2 * fe.len());
    let reference = conserved_traces(&fe.l0, kmax)?;
    let mut drift = vec![0.0f64; kmax];
    for t in cfg.times() {
        let snap = poles_and_spins_at(fe, t)?;
        let lax = build_lax(&snap.to_data(fe.m0), tol)?;
        let traces = conserved_traces(&lax.l, kmax)?;
        for k in 0..kmax {
            let d = (traces[k] - reference[k]).norm() / reference[k].norm().max(1.0);
            drift[k] = drift[k].max(d);
        }
    }
    let mut out = String::from("k,re_trace,im_trace,drift\n");
    for k in 0..kmax {
        let _ = writeln!(out, "{},{},{},{}", k + 1, f(reference[k].re), f(reference[k].im), f(drift[k]));
    }
    Ok(out)
}

fn oracle_compare(cfg: &RunConfig, fe: &Evolution, data: &Datum, tol: &Tolerances<f64>) -> Result<String, CliError> {
    let traj = integrate_spin_cm(data, cfg.t1, cfg.h, tol)?;
    let grid = SampleGrid {
        times: cfg.times(),
        xs: cfg.xs(),
    };
    let report = compare(fe, &traj, &grid)?;
    let mut out = String::from("t,sup_err,pole_err,spin_err\n");
    for r in &report.rows {
        let _ = writeln!(out, "{},{},{},{}", f(r.t), f(r.field_error), f(r.pole_error), f(r.spin_error));
    }
    Ok(out)
}

fn soliton_gen(cfg: &RunConfig) -> Result<String, CliError> {
    let zhat = Spin::real([0.0, 0.0, 1.0]);
    let data = match cfg.n {
        0 => return Err(CliError::Config("n must be at least 1".into())),
        1 => single_soliton(c64(0.0, 1.0), zhat, 0.0)?,
        n => {
            let seed = cfg
                .seed
                .ok_or_else(|| CliError::Config("soliton-gen with n >= 2 needs --seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_valid_datum(n, &mut rng, &SearchOptions::default())?
        }
    };
    Ok(datum_to_toml(&data))
}
