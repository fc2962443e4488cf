use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wentzell_lab::commands;
use wentzell_lab::error::{LabError, Result};
use wentzell_lab::spec::{Command, FSpec, RunSpec};
use wentzell_lab::verify::Injection;

/// Wentzell boundary problems on [0,1]: Riccati solution, semigroup
/// solver, Monte Carlo and the verification suite.
#[derive(Parser)]
#[command(name = "wentzell", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the Riccati system: riccati.json, J_profile.csv.
    Riccati(Opts),
    /// Run the semigroup solver: field.csv, traces.csv, summary.json.
    Solve(Opts),
    /// Monte Carlo exit law and Φ drift: exit_stats.json, exit_hist.csv.
    Simulate(Opts),
    /// Run the acceptance checks: report.json; exit 3 on any failure.
    Verify(Opts),
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct Opts {
    /// JSON file with (part of) a run specification; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<String>,
    /// Master seed of every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Initial profile: a name (zero, one, sine, step, smoke, h0, h1, g0,
    /// g1), `poly:c0,c1,...` or `csv:<path>`.
    #[arg(long = "f")]
    f: Option<String>,
    /// Boundary value at 0 (default: the profile's own).
    #[arg(long)]
    f0: Option<f64>,
    /// Boundary value at 1 (default: the profile's own).
    #[arg(long)]
    f1: Option<f64>,
    /// Final time of `solve`.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Time step (`solve`: Volterra step; `simulate`: finest MC step).
    #[arg(long)]
    dt: Option<f64>,
    /// Spatial cells of the reconstructed field.
    #[arg(long)]
    n_space: Option<usize>,
    /// Write every `stride`-th time row of the field.
    #[arg(long)]
    stride: Option<usize>,
    /// Also solve by finite differences and report `fd_sup_diff`.
    #[arg(long)]
    oracle: bool,
    /// Finite-difference time step of the oracle.
    #[arg(long)]
    fd_dt: Option<f64>,
    /// Finite-difference spatial cells of the oracle.
    #[arg(long)]
    fd_n_space: Option<usize>,
    /// Exit-law paths per boundary.
    #[arg(long)]
    paths: Option<usize>,
    /// Truncation horizon of exit-law paths.
    #[arg(long)]
    t_max: Option<f64>,
    /// Coarsest MC step.
    #[arg(long)]
    max_step: Option<f64>,
    /// Exit histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Paths of each Φ slope run.
    #[arg(long)]
    slope_paths: Option<usize>,
    /// Horizon of the Φ slope runs.
    #[arg(long)]
    slope_t_max: Option<f64>,
    /// Skip the Monte Carlo checks and shrink the random batteries.
    #[arg(long)]
    quick: bool,
    /// Run only these checks, e.g. `--checks 1,4,8`.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<u32>>,
    #[arg(long, hide = true)]
    inject: Option<Injection>,
}

fn build_spec(command: Command, o: &Opts) -> Result<RunSpec> {
    let mut s = RunSpec::from_config_file(o.config.as_deref())?;
    s.command = command;
    macro_rules! set {
        ($src:expr => $dst:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(o.mu => s.mu);
    set!(o.sigma => s.sigma);
    set!(o.out.clone() => s.out_dir);
    set!(o.seed => s.seed);
    if let Some(p) = &o.f {
        s.f_spec = FSpec {
            profile: FSpec::parse_profile(p)?,
            f0: None,
            f1: None,
        };
    }
    if o.f0.is_some() {
        s.f_spec.f0 = o.f0;
    }
    if o.f1.is_some() {
        s.f_spec.f1 = o.f1;
    }
    set!(o.t_end => s.volterra.t_end);
    set!(o.n_space => s.volterra.n_space);
    set!(o.stride => s.volterra.output_stride);
    set!(o.fd_dt => s.fd.dt);
    set!(o.fd_n_space => s.fd.n_space);
    if command == Command::Simulate {
        set!(o.dt => s.sim.dt);
    } else {
        set!(o.dt => s.volterra.dt);
    }
    set!(o.paths => s.sim.n_paths);
    set!(o.t_max => s.sim.t_max);
    set!(o.max_step => s.sim.max_step);
    set!(o.bins => s.sim.n_bins);
    set!(o.slope_paths => s.slope.n_paths);
    set!(o.slope_t_max => s.slope.t_max);
    s.oracle |= o.oracle;
    s.quick |= o.quick;
    set!(o.checks.clone() => s.checks);
    s.sync_seed();
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, opts) = match &cli.command {
        Cmd::Riccati(o) => (Command::Riccati, o),
        Cmd::Solve(o) => (Command::Solve, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Verify(o) => (Command::Verify, o),
    };
    let spec = match build_spec(command, opts) {
        Ok(s) => s,
        Err(e) => return fail(None, e),
    };
    let printer = |c: &wentzell_lab::verify::CheckResult| {
        println!(
            "[{}] {:>2} {:<28} measured {:.4e} tolerance {:.4e} ({:.1} s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.measured,
            c.tolerance,
            c.seconds
        );
    };
    match commands::run(&spec, opts.inject, printer) {
        Ok(()) => {
            println!("outputs written to {}", spec.out_dir);
            ExitCode::SUCCESS
        }
        Err(e) => fail(Some(&spec), e),
    }
}

fn fail(spec: Option<&RunSpec>, e: LabError) -> ExitCode {
    eprintln!("wentzell: {e}");
    if let Some(s) = spec {
        commands::write_error(s, &e);
    }
    ExitCode::from(e.exit_code())
}
