//! `pgames`: simulate, analyse and verify learning dynamics in periodic
//! zero-sum games.
//!
//! Exit status: 0 on success or a passed check, 1 for usage, configuration,
//! precondition or I/O errors, 2 for numerical failures, 3 when a
//! verification fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pgames_core::analysis::{
    boundary_central_eigenvalue, boundary_fixed_point, char_poly_eval, check_bregman_identities_joint,
    check_extra_kl_decrease, check_omwu_increments, check_omwu_ratio_identities, composed_reduced_map,
    detect_periodic_orbit, eigenvalues_small, interior_eigenvalues, jacobian_fd, OrbitVerdict, PropertyReport,
    DEFAULT_FD_STEP,
};
use pgames_core::dynamics::{
    divergence_margin, max_step_size, omwu_eta_bound_for_divergence, omwu_reduced_compose, run_trajectory,
    run_trajectory_tail, AlgorithmTag,
};
use pgames_core::equilibrium::{common_equilibrium, DEFAULT_TOL};
use pgames_core::simplex::normalize_log_weights;
use pgames_core::{JointState, PeriodicGame};
use pgames_harness::config::{parse_config, RunConfig};
use pgames_harness::csv::read_csv;
use pgames_harness::experiments::{builtin_experiments, default_eta_steps, find_experiment};
use pgames_harness::generate::generate_common_schedule;
use pgames_harness::run::run_experiment;
use pgames_harness::svg::{emit_svg_plot, Series};
use pgames_harness::{HarnessError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXIT_PROPERTY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "pgames", version, about = "Learning dynamics in periodic zero-sum games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the game and parameters described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in experiment (game2x2, exp1, exp2, nocommon3).
    Experiment {
        /// Experiment name; omit with --all.
        name: Option<String>,
        /// Run every built-in experiment. --out-csv/--out-svg then name
        /// directories receiving `<name>.csv` / `<name>.svg`.
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Spectral analysis of the reduced OMWU map of the 2x2 alternating game.
    Analyze {
        #[arg(value_enum)]
        what: AnalyzeKind,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        /// Point z1,z2,z3,z4 for `jacobian` and `eigen`.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5; 4])]
        point: Vec<f64>,
        /// Finite-difference step.
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        h: f64,
        /// Number of curve parameters a = k/(samples+1) for `fixed-curve`.
        #[arg(long, default_value_t = 9)]
        samples: usize,
    },
    /// Check a property of the dynamics; exits 3 when it fails.
    Verify {
        #[arg(value_enum)]
        what: VerifyKind,
        #[command(flatten)]
        opts: VerifyFlags,
    },
    /// Plot columns of a trajectory CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out_svg: PathBuf,
        /// Columns to draw; defaults to kl_to_ref when it has finite values,
        /// else every strategy component.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long)]
        log_y: bool,
    },
}

#[derive(Args, Default)]
struct RunFlags {
    #[arg(long, value_parser = parse_algo)]
    algo: Option<AlgorithmTag>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    record_every: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    log_y: bool,
}

#[derive(Args)]
struct VerifyFlags {
    /// Built-in game for `kl-monotone` (default game2x2) and `orbit`
    /// (default nocommon3).
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long, value_parser = parse_algo)]
    algo: Option<AlgorithmTag>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    /// Seed for `bregman` cases; for `kl-monotone` it replaces the built-in
    /// game with a generated 3x3 3-periodic schedule.
    #[arg(long)]
    seed: Option<u64>,
    /// First-action probabilities x1_1,x2_1 of the 2x2 initial point.
    #[arg(long, value_delimiter = ',', default_values_t = [0.45, 0.45])]
    init: Vec<f64>,
    /// Tolerance of `identities` (relative) or `kl-monotone` (absolute).
    #[arg(long)]
    tol: Option<f64>,
    /// Number of `bregman` cases.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol_orbit: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol_nontrivial: f64,
    /// Verdict `orbit` must produce; without it any conclusive verdict passes.
    #[arg(long, value_enum)]
    expect: Option<Verdict>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Jacobian,
    Eigen,
    FixedCurve,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Identities,
    Increments,
    KlMonotone,
    Bregman,
    Orbit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verdict {
    ConvergedPoint,
    ConvergedOrbit,
    DivergingBoundary,
}

impl From<Verdict> for OrbitVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::ConvergedPoint => OrbitVerdict::ConvergedPoint,
            Verdict::ConvergedOrbit => OrbitVerdict::ConvergedOrbit,
            Verdict::DivergingBoundary => OrbitVerdict::DivergingBoundary,
        }
    }
}

fn parse_algo(s: &str) -> std::result::Result<AlgorithmTag, String> {
    s.parse().map_err(|e: pgames_core::Error| e.to_string())
}

impl RunFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(algo) = self.algo {
            if algo != cfg.algo {
                let (eta, steps) = default_eta_steps(algo);
                cfg.algo = algo;
                cfg.eta = eta;
                cfg.steps = steps;
                cfg.record_every = pgames_core::dynamics::default_record_every(steps);
            }
        }
        if let Some(eta) = self.eta {
            cfg.eta = eta;
        }
        if let Some(steps) = self.steps {
            cfg.steps = steps;
            cfg.record_every = pgames_core::dynamics::default_record_every(steps);
        }
        if let Some(r) = self.record_every {
            cfg.record_every = r;
        }
        if self.out_csv.is_some() {
            cfg.out_csv.clone_from(&self.out_csv);
        }
        if self.out_svg.is_some() {
            cfg.out_svg.clone_from(&self.out_svg);
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        cfg.log_y |= self.log_y;
    }
}

fn report_run(cfg: &RunConfig) -> Result<String> {
    let out = run_experiment(cfg)?;
    let mut text = out.summary(&cfg.name);
    for w in &out.warnings {
        text.push_str(&format!("\n{}: warning: {w}", cfg.name));
    }
    for p in out.csv_path.iter().chain(&out.svg_path) {
        text.push_str(&format!("\n{}: wrote {}", cfg.name, p.display()));
    }
    Ok(text)
}

fn simulate(config: &Path, flags: &RunFlags) -> Result<()> {
    let mut cfg = parse_config(config)?;
    flags.apply(&mut cfg);
    println!("{}", report_run(&cfg)?);
    Ok(())
}

fn experiment(name: Option<&str>, all: bool, flags: &RunFlags) -> Result<()> {
    if !all {
        let name = name.ok_or_else(|| HarnessError::Usage("give an experiment name or --all".into()))?;
        let mut cfg = RunConfig::for_experiment(&find_experiment(name)?, None);
        flags.apply(&mut cfg);
        println!("{}", report_run(&cfg)?);
        return Ok(());
    }
    for dir in flags.out_csv.iter().chain(&flags.out_svg) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let configs: Vec<RunConfig> = builtin_experiments()
        .iter()
        .map(|spec| {
            let mut cfg = RunConfig::for_experiment(spec, None);
            flags.apply(&mut cfg);
            cfg.out_csv = flags.out_csv.as_ref().map(|d| d.join(format!("{}.csv", spec.name)));
            cfg.out_svg = flags.out_svg.as_ref().map(|d| d.join(format!("{}.svg", spec.name)));
            cfg
        })
        .collect();
    let results: Vec<Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(|| report_run(c))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    });
    let mut first_err = None;
    for r in results {
        match r {
            Ok(text) => println!("{text}"),
            Err(e) => {
                eprintln!("error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn print_matrix(rows: &[Vec<f64>]) {
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:>+.12e}")).collect();
        println!("  [{}]", cells.join(", "));
    }
}

fn analyze(what: AnalyzeKind, eta: f64, point: &[f64], h: f64, samples: usize) -> Result<()> {
    if point.len() != 4 {
        return Err(HarnessError::Usage(format!("--point takes four values, got {}", point.len())));
    }
    let map = composed_reduced_map(eta);
    match what {
        AnalyzeKind::Jacobian => {
            let jac = jacobian_fd(&map, point, h)?;
            println!("jacobian of the two-step reduced map at {point:?}, eta = {eta}:");
            print_matrix(&jac.to_rows());
        }
        AnalyzeKind::Eigen => {
            let jac = jacobian_fd(&map, point, h)?;
            println!("eigenvalues at {point:?}, eta = {eta}:");
            for z in eigenvalues_small(&jac)? {
                println!("  {:+.12e} {:+.12e}i  |z| = {:.12e}", z.re, z.im, z.norm());
            }
            if point.iter().all(|&z| z == 0.5) {
                for lambda in interior_eigenvalues(eta) {
                    let r = char_poly_eval(&jac, Complex64::new(lambda, 0.0))?;
                    println!("  analytic {lambda:.15e}: |det(J - lambda I)| = {:.3e}", r.norm());
                }
            }
        }
        AnalyzeKind::FixedCurve => {
            println!("a, z4, fixed-point residual, eigenvalue moduli, predicted central eigenvalue (eta = {eta})");
            for k in 1..=samples {
                let a = k as f64 / (samples + 1) as f64;
                let p = boundary_fixed_point(a, eta)?;
                let residual = omwu_reduced_compose(p, eta)?.max_abs_diff(&p);
                let jac = jacobian_fd(&map, &p.0, h)?;
                let moduli: Vec<String> =
                    eigenvalues_small(&jac)?.iter().map(|z| format!("{:.9}", z.norm())).collect();
                println!(
                    "  {a:.4}, {:.12}, {residual:.3e}, [{}], {:.9}",
                    p.0[3],
                    moduli.join(", "),
                    boundary_central_eigenvalue(a, eta)
                );
            }
        }
    }
    Ok(())
}

fn print_report(r: &PropertyReport) {
    println!(
        "{}: {} ({} checks, {} violations)",
        r.name,
        if r.passed { "passed" } else { "FAILED" },
        r.checked_steps,
        r.violation_count
    );
    for (k, v) in &r.stats {
        println!("  {k} = {v:e}");
    }
    for v in r.violations.iter().take(10) {
        println!("  t = {}: {}: lhs = {:e}, rhs = {:e}, slack = {:e}", v.t, v.check, v.lhs, v.rhs, v.slack);
    }
}

fn alternating_game() -> PeriodicGame {
    find_experiment("game2x2").expect("built-in").game
}

fn init_2x2(init: &[f64]) -> Result<JointState> {
    let &[a, b] = init else {
        return Err(HarnessError::Usage(format!("--init takes two values, got {}", init.len())));
    };
    JointState::from_probs(&[a, 1.0 - a], &[b, 1.0 - b]).map_err(|e| HarnessError::Usage(format!("--init: {e}")))
}

fn verify(what: VerifyKind, o: &VerifyFlags) -> Result<bool> {
    let report = match what {
        VerifyKind::Identities => {
            let eta = o.eta.unwrap_or(1e-3);
            let traj = run_trajectory(
                &alternating_game(),
                AlgorithmTag::Omwu,
                init_2x2(&o.init)?,
                eta,
                o.steps.unwrap_or(1000),
                1,
                None,
            )?;
            check_omwu_ratio_identities(&traj, eta, o.tol.unwrap_or(1e-10))?
        }
        VerifyKind::Increments => {
            let init = init_2x2(&o.init)?;
            let p = divergence_margin(&init);
            let eta = match o.eta {
                Some(eta) => eta,
                None => omwu_eta_bound_for_divergence(&init)?,
            };
            println!("p = {p}, eta = {eta:e}");
            let traj = run_trajectory(
                &alternating_game(),
                AlgorithmTag::Omwu,
                init,
                eta,
                o.steps.unwrap_or(2000),
                1,
                None,
            )?;
            check_omwu_increments(&traj, p, eta)?
        }
        VerifyKind::KlMonotone => {
            let (game, eq) = match o.seed {
                Some(seed) => {
                    let g = generate_common_schedule(seed, 3, 3, 3)?;
                    (g.game, g.equilibrium)
                }
                None => {
                    let game = find_experiment(o.experiment.as_deref().unwrap_or("game2x2"))?.game;
                    let eq = common_equilibrium(&game, DEFAULT_TOL)?
                        .ok_or_else(|| HarnessError::Usage("the game has no common equilibrium".into()))?;
                    (game, eq.joint_state())
                }
            };
            let eta = o.eta.unwrap_or(0.9 * max_step_size(&game));
            let init = pgames_harness::experiments::default_init(game.rows(), game.cols())?;
            let traj = run_trajectory(
                &game,
                AlgorithmTag::ExtraMwu,
                init,
                eta,
                o.steps.unwrap_or(10_000),
                1,
                Some(&eq),
            )?;
            println!("eta = {eta}, final kl = {:e}", traj.last().unwrap().kl_to_ref);
            check_extra_kl_decrease(&traj, &eq, o.tol.unwrap_or(1e-12))?
        }
        VerifyKind::Bregman => {
            let mut rng = ChaCha8Rng::seed_from_u64(o.seed.unwrap_or(0));
            let mut total = PropertyReport::new("bregman identities");
            let mut worst: f64 = 0.0;
            for _ in 0..o.cases {
                let m = rng.gen_range(2..=5);
                let n = rng.gen_range(2..=5);
                let mut point = |k: usize| {
                    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    normalize_log_weights(&w)
                };
                let p = JointState::new(point(m)?, point(n)?);
                let x = JointState::new(point(m)?, point(n)?);
                let xp = JointState::new(point(m)?, point(n)?);
                let y1: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let y2: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let step = rng.gen_range(0.01..1.0);
                let r = check_bregman_identities_joint(&p, &x, &xp, (&y1, &y2), step)?;
                worst = worst.max(r.stat("max_residual").unwrap_or(f64::NAN));
                total.merge(r);
            }
            total.set_stat("max_residual", worst);
            total
        }
        VerifyKind::Orbit => {
            let spec = find_experiment(o.experiment.as_deref().unwrap_or("nocommon3"))?;
            let algo = o.algo.unwrap_or(AlgorithmTag::ExtraMwu);
            let (eta, default_steps) = match algo {
                AlgorithmTag::Omwu => default_eta_steps(algo),
                _ => (spec.default_eta, 30_000),
            };
            let eta = o.eta.unwrap_or(eta);
            let period = spec.game.period();
            let init = pgames_harness::experiments::default_init(spec.game.rows(), spec.game.cols())?;
            let steps = o.steps.unwrap_or(default_steps);
            let tail = (10 * period + 1) as u64;
            let traj = run_trajectory_tail(&spec.game, algo, init, eta, steps, tail, None)?;
            let orbit = detect_periodic_orbit(&traj, period, o.tol_orbit, o.tol_nontrivial)?;
            let mut r = PropertyReport::new(format!("orbit of {} under {algo}", spec.name));
            println!("verdict = {}", orbit.verdict);
            let expected = o.expect.map(OrbitVerdict::from);
            let ok = match expected {
                Some(v) => orbit.verdict == v,
                None => orbit.verdict != OrbitVerdict::Inconclusive,
            };
            if !ok {
                r.violate(steps, &format!("verdict {}", orbit.verdict), 0.0, 0.0, 0.0);
            }
            r.checked_steps = 1;
            r.set_stat("period_gap", orbit.period_gap);
            r.set_stat("max_consecutive_gap", orbit.max_consecutive_gap);
            r.set_stat("final_min_component", orbit.final_min_component);
            r
        }
    };
    print_report(&report);
    Ok(report.passed)
}

fn plot(csv: &Path, out: &Path, columns: &[String], log_y: bool) -> Result<()> {
    let table = read_csv(csv)?;
    let names: Vec<String> = if !columns.is_empty() {
        columns.to_vec()
    } else if table.column("kl_to_ref").is_some_and(|c| c.iter().any(|v| v.is_finite())) {
        vec!["kl_to_ref".into()]
    } else {
        table.columns.iter().filter(|c| c.starts_with('x')).cloned().collect()
    };
    let series = names
        .iter()
        .map(|name| {
            table
                .series(name)
                .map(|pts| Series::new(name.clone(), pts))
                .ok_or_else(|| HarnessError::Usage(format!("no column `{name}` in {}", csv.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    emit_svg_plot(&series, out, log_y)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { config, flags } => simulate(&config, &flags).map(|_| true),
        Command::Experiment { name, all, flags } => experiment(name.as_deref(), all, &flags).map(|_| true),
        Command::Analyze {
            what,
            eta,
            point,
            h,
            samples,
        } => analyze(what, eta, &point, h, samples).map(|_| true),
        Command::Verify { what, opts } => verify(what, &opts),
        Command::Plot {
            csv,
            out_svg,
            columns,
            log_y,
        } => plot(&csv, &out_svg, &columns, log_y).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PROPERTY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
