//! `oddwave`: bifurcation tables, branch continuation, time evolution and
//! verification runs for the odd-viscosity traveling-wave model.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (non-convergence, non-finite values, or a failed verification check),
//! 1 for I/O errors.

mod artifacts;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oddwave::evolution::{order_study, traveling_error_of};
use oddwave::io::{branch_csv, profile_csv, sweep_csv, trajectory_csvs, BranchEnvelope, TrajectoryManifest};
use oddwave::verify::{run_invariants, VerifySettings};
use oddwave::{
    continue_branch, detect_bifurcations, evolve, BranchPoint, BranchStatus, CosineSeries, Error, Fault,
};
use serde::Serialize;

use artifacts::Writer;
use config::{Initial, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "oddwave", version, about = "Traveling waves of the odd-viscosity surface-wave model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate critical speeds with simplicity and transversality flags.
    Bifurcate,
    /// Continue the m-fold branch from its bifurcation point.
    Branch,
    /// Evolve a branch point (or zero data) and report the traveling error.
    Evolve,
    /// Run the invariant suite and the commutator-ratio sweep.
    Verify,
    /// Fast built-in checks; writes nothing.
    Selftest,
}

/// Overrides for the configuration file. Unset flags keep the file value.
#[derive(clap::Args, Debug, Default)]
struct Flags {
    /// TOML file with any RunConfig keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Symmetry fold m.
    #[arg(long, global = true)]
    fold: Option<usize>,
    /// Modes per fold (truncation n).
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true)]
    smax: Option<f64>,
    /// First continuation step; negative values trace the mirror branch.
    #[arg(long, global = true, allow_negative_numbers = true)]
    ds: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    tfinal: Option<f64>,
    /// Branch amplitude s used as initial data by `evolve`.
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    #[arg(long, global = true, value_enum)]
    initial: Option<Initial>,
    /// Add an order study over dt, dt/2, dt/4 to `evolve`.
    #[arg(long = "halve-dt", global = true)]
    halve_dt: bool,
    /// Ensemble size per degree tier for `verify`.
    #[arg(long, global = true)]
    ensemble: Option<usize>,
    /// Degree tiers, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    tiers: Option<Vec<usize>>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Test hook: none, commutator-sign or grid-shift.
    #[arg(long = "inject-fault", global = true, value_parser = parse_fault)]
    inject_fault: Option<Fault>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown fault '{s}' (expected none, commutator-sign or grid-shift)"))
}

impl Flags {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })*
            };
        }
        set!(
            epsilon => epsilon, alpha0 => alpha0, beta => beta, fold => fold, modes => modes,
            k_max => k_max, smax => s_max, ds => ds, tol => tol, max_iter => max_iter, dt => dt,
            tfinal => t_final, amplitude => amplitude, initial => initial, ensemble => ensemble,
            tiers => tiers, alpha => alpha, inject_fault => inject_fault, out => out, seed => seed,
        );
        if self.halve_dt && cfg.order_levels == 0 {
            cfg.order_levels = 3;
        }
    }
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            match e {
                Error::Io(io) => Failure::Io(io),
                other => Failure::Config(other.to_string()),
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| run(&cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bifurcate => "bifurcate",
        Command::Branch => "branch",
        Command::Evolve => "evolve",
        Command::Verify => "verify",
        Command::Selftest => "selftest",
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.flags.apply(&mut cfg);
    cfg.command = command_name(&cli.command).into();
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command, cfg: &RunConfig) -> Outcome {
    match cmd {
        Command::Bifurcate => bifurcate(cfg),
        Command::Branch => branch(cfg),
        Command::Evolve => evolve_cmd(cfg),
        Command::Verify => verify(cfg),
        Command::Selftest => selftest(cfg),
    }
}

fn report_files(w: &Writer) {
    for p in w.written() {
        println!("wrote {}", p.display());
    }
}

#[derive(Serialize)]
struct BifurcationRow {
    k: usize,
    speed: f64,
    simple: bool,
    transversal: bool,
    resonant_with: Vec<usize>,
}

fn bifurcate(cfg: &RunConfig) -> Outcome {
    let p = cfg.params()?;
    let found = detect_bifurcations(&p, cfg.k_max, cfg.modes)?;
    let mut table = String::from("k,speed,simple,transversal,resonant_with\n");
    println!("{:>4} {:>24} {:>7} {:>12}  resonant_with", "k", "c_k", "simple", "transversal");
    let mut rows = Vec::with_capacity(found.len());
    for c in &found {
        let res: Vec<String> = c.resonant_with.iter().map(|j| j.to_string()).collect();
        table.push_str(&format!(
            "{},{:.17e},{},{},{}\n",
            c.k,
            c.speed,
            c.simple,
            c.transversal,
            res.join(";")
        ));
        println!("{:>4} {:>24.16e} {:>7} {:>12}  {}", c.k, c.speed, c.simple, c.transversal, res.join(" "));
        rows.push(BifurcationRow {
            k: c.k,
            speed: c.speed,
            simple: c.simple,
            transversal: c.transversal,
            resonant_with: c.resonant_with.clone(),
        });
    }
    let mut w = Writer::new(&cfg.out, cfg)?;
    w.csv("bifurcations.csv", &table)?;
    w.json("bifurcations.json", &rows)?;
    report_files(&w);
    Ok(())
}

fn status_failure(status: &BranchStatus, last: &BranchPoint) -> Option<String> {
    match status {
        BranchStatus::Completed => None,
        BranchStatus::NewtonFailed { s, residual, iters } => Some(format!(
            "Newton failed at s = {s} (residual {residual:.3e} after {iters} iterations); last good point s = {}",
            last.s
        )),
        BranchStatus::StepUnderflow { s } => Some(format!(
            "step underflow near s = {s}; last good point s = {}",
            last.s
        )),
    }
}

fn branch(cfg: &RunConfig) -> Outcome {
    let p = cfg.params()?;
    let b = continue_branch(cfg.fold, &p, &cfg.continuation()?)?;
    let m = cfg.fold;
    let chosen: Vec<&BranchPoint> = if cfg.profile_s.is_empty() {
        b.points.iter().collect()
    } else {
        cfg.profile_s.iter().filter_map(|&s| b.nearest(s)).collect()
    };
    let mut w = Writer::new(&cfg.out, cfg)?;
    w.csv(&format!("branch_m{m}.csv"), &branch_csv(&b)?)?;
    w.json(&format!("branch_m{m}.json"), &BranchEnvelope::new(&b))?;
    w.csv(&format!("profiles_m{m}.csv"), &profile_csv(&chosen, cfg.profile_grid())?)?;
    let last = b.points.last().expect("trivial point");
    println!(
        "m = {m}: {} points, c_m = {:.16e}, last s = {}, c_s = {:.16e}, residual {:.3e}",
        b.points.len(),
        b.points[0].c,
        last.s,
        last.c,
        last.residual_norm
    );
    report_files(&w);
    match status_failure(&b.status, last) {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct EvolveReport {
    initial: Initial,
    amplitude: f64,
    speed: f64,
    traveling_error: f64,
    max_mass_drift: f64,
    order_study: Option<oddwave::evolution::OrderStudy>,
}

fn evolve_cmd(cfg: &RunConfig) -> Outcome {
    let p = cfg.params()?;
    let evo = cfg.evolution()?;
    let point = match cfg.initial {
        Initial::Zero => BranchPoint {
            s: 0.0,
            c: 0.0,
            phi: CosineSeries::zeros(evo.n),
            residual_norm: 0.0,
            newton_iters: 0,
        },
        Initial::Branch => {
            let settings = oddwave::ContinuationSettings {
                s_max: cfg.amplitude,
                ..cfg.continuation()?
            };
            let b = continue_branch(cfg.fold, &p, &settings)?;
            let last = b.points.last().expect("trivial point").clone();
            if let Some(msg) = status_failure(&b.status, &last) {
                return Err(Failure::Numerical(msg));
            }
            last
        }
    };

    let mut w = Writer::new(&cfg.out, cfg)?;
    let traj = match evolve(point.phi.field(), &p, &evo) {
        Ok(t) => t,
        Err(Error::NonFinite { t, last_finite, last_time }) => {
            let grid = cfg.profile_grid();
            let mut table = String::from("x,f\n");
            for (x, v) in oddwave::spectral::grid_points(grid).zip(last_finite.values_on(grid)) {
                table.push_str(&format!("{x:.17e},{v:.17e}\n"));
            }
            w.csv("trajectory/last_finite.csv", &table)?;
            report_files(&w);
            return Err(Failure::Numerical(format!(
                "non-finite state at t = {t}; last finite state (t = {last_time}) saved"
            )));
        }
        Err(e) => return Err(e.into()),
    };

    let grid = cfg.profile_grid();
    for (i, (_, text)) in trajectory_csvs(&traj, grid)?.into_iter().enumerate() {
        w.csv(&format!("trajectory/state_{i:05}.csv"), &text)?;
    }
    w.json("trajectory/manifest.json", &TrajectoryManifest::new(&traj, &p, &evo))?;

    let error = traveling_error_of(&traj, &point);
    let study = if cfg.order_levels >= 3 {
        Some(order_study(&point, &p, &evo, cfg.order_levels)?)
    } else {
        None
    };
    println!(
        "evolved {} steps of dt = {:.3e} (dt_max {:.3e}); traveling error {error:.3e}; mass drift {:.1e}",
        traj.steps, traj.dt, traj.dt_max, traj.max_mass_drift
    );
    if let Some(s) = &study {
        println!("order estimate {:.3} from increments {:?} over dt {:?}", s.order, s.increments, s.dts);
    }
    w.json(
        "evolve.json",
        &EvolveReport {
            initial: cfg.initial,
            amplitude: point.s,
            speed: point.c,
            traveling_error: error,
            max_mass_drift: traj.max_mass_drift,
            order_study: study,
        },
    )?;
    report_files(&w);
    Ok(())
}

fn print_checks(report: &oddwave::verify::VerifyReport) {
    for c in &report.checks {
        println!(
            "{} {}: measured {:.3e} (tolerance {:.2e}) {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.family,
            c.measured,
            c.tolerance,
            c.detail
        );
    }
}

fn verify(cfg: &RunConfig) -> Outcome {
    let p = cfg.params()?;
    let settings = VerifySettings {
        samples: cfg.samples,
        degree: cfg.degree,
        seed: cfg.seed,
        fault: cfg.inject_fault,
        sweep: cfg.sweep()?,
    };
    let report = run_invariants(&p, &settings)?;
    print_checks(&report);
    let mut w = Writer::new(&cfg.out, cfg)?;
    w.csv("sweep.csv", &sweep_csv(&report.sweep_records)?)?;
    w.json("sweep_summary.json", &report.sweep_summary)?;
    w.json("verify.json", &report)?;
    report_files(&w);
    if report.all_pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.family.as_str()).collect();
        Err(Failure::Numerical(format!("verification failed: {}", failed.join(", "))))
    }
}

fn selftest(cfg: &RunConfig) -> Outcome {
    let p = cfg.params()?;
    let settings = VerifySettings {
        samples: 12,
        degree: 16,
        seed: cfg.seed,
        fault: cfg.inject_fault,
        sweep: oddwave::holder::SweepConfig {
            members: 40,
            degree_tiers: vec![10, 20],
            alpha: 0.5,
            seed: cfg.seed,
            grid: 1024,
        },
    };
    let report = run_invariants(&p, &settings)?;
    print_checks(&report);
    let mut ok = report.all_pass();

    let short = oddwave::ContinuationSettings {
        s_max: 0.02,
        n: 32,
        ..Default::default()
    };
    let b = continue_branch(1, &p, &short)?;
    let pt = b.points.last().expect("trivial point");
    let evo = oddwave::EvolutionConfig {
        dt: 1e-3,
        t_final: 0.1,
        n: 32,
        save_every: 50,
        ..Default::default()
    };
    let traj = evolve(pt.phi.field(), &p, &evo)?;
    let err = traveling_error_of(&traj, pt);
    let pass = b.is_complete() && err < 1e-8;
    ok &= pass;
    println!(
        "{} branch-and-evolve: {} points, traveling error {err:.3e} (tolerance 1.0e-8)",
        if pass { "PASS" } else { "FAIL" },
        b.points.len()
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical("selftest failed".into()))
    }
}
