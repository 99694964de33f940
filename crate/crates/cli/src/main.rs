use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use muskat::config::{ConfigMap, KNOWN_KEYS};
use muskat::decay::{
    fit_exponent, log_times, save_fit_csv, semigroup_norm_closed, semigroup_norm_quadrature,
    FitRow, RadialProfile,
};
use muskat::evolve::{run, MonitorMode};
use muskat::rhs::NonlocalOperator;
use muskat::series::{admissibility_value, admissible_constant, MuskatDim};
use muskat::spectral::{write_field, Fourier};
use muskat::table::{sci, Table};
use muskat::verify::{random_field, run_suite, Suite};
use muskat::MuskatError;

/// Pseudo-spectral Muskat solver and verification harness.
///
/// Any configuration key can also be given as `--key value`; flags override
/// the config file, which overrides the defaults.
#[derive(Parser, Debug)]
#[command(name = "muskat", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for random initial data (same as `initial.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Configuration override `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the configured problem and write the trajectory CSV.
    Run,
    /// Tabulate linear semigroup norms of the profile r^a e^{-r} and fit their decay.
    Linear(LinearArgs),
    /// Compare the nonlinearity with its Fourier majorant on random fields.
    Bounds(BoundsArgs),
    /// Evaluate the admissibility series at the claimed small-data constant.
    Consts(ConstsArgs),
    /// Fit decay exponents to columns of an existing trajectory CSV.
    Fit(FitArgs),
    /// Run a self-check suite: norms, rhs, bounds, decay or all.
    Verify { suite: String },
}

#[derive(Args, Debug)]
struct LinearArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    s: Vec<f64>,
    #[arg(long, default_value_t = 1000.0)]
    t_end: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    s: Vec<f64>,
    /// Largest `||f||_1` of the random fields.
    #[arg(long, default_value_t = 0.15)]
    max_norm: f64,
    #[arg(long, default_value_t = 8)]
    k_max: u32,
}

#[derive(Args, Debug)]
struct ConstsArgs {
    /// Physical dimension, 2 or 3.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Defaults to `quad.delta`.
    #[arg(long)]
    delta: Option<f64>,
    /// Evaluation point; defaults to the claimed constant (1/5 or 1/3).
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    csv: PathBuf,
    /// Columns to fit, e.g. `s=1,s=2`; defaults to every `s=` column.
    #[arg(long, value_delimiter = ',')]
    cols: Vec<String>,
    /// Window `lo,hi`; defaults to `[t_end/10, t_end]`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    window: Option<Vec<f64>>,
    /// Besov exponent of the data; the expected slope is `-s + nu`.
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
}

/// Rewrites `--key value` and `--key=value` for configuration keys into `--set key=value`.
fn expand_key_flags(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if let Some(body) = a.strip_prefix("--") {
            let (key, inline) = match body.split_once('=') {
                Some((k, v)) => (k.to_string(), Some(v.to_string())),
                None => (body.to_string(), None),
            };
            if KNOWN_KEYS.contains(&key.as_str()) {
                let value = inline.or_else(|| it.next()).unwrap_or_default();
                out.push("--set".into());
                out.push(format!("{key}={value}"));
                continue;
            }
        }
        out.push(a);
    }
    out
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<MuskatError>() {
        Some(MuskatError::Config(_))
        | Some(MuskatError::ConfigLine { .. })
        | Some(MuskatError::Parse { .. })
        | Some(MuskatError::Precondition(_)) => 2,
        Some(MuskatError::BlowUp { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(expand_key_flags(std::env::args().collect()));
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn config_map(cli: &Cli) -> anyhow::Result<ConfigMap> {
    let mut map = match &cli.config {
        Some(p) => ConfigMap::load(p)?,
        None => ConfigMap::default(),
    };
    if let Some(seed) = cli.seed {
        map.set("initial.seed", &seed.to_string())?;
    }
    for pair in &cli.set {
        map.set_pair(pair)?;
    }
    Ok(map)
}

fn out_path(cli: &Cli, name: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    Ok(cli.out.join(name))
}

fn dispatch(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Run => cmd_run(cli),
        Command::Linear(args) => cmd_linear(cli, args),
        Command::Bounds(args) => cmd_bounds(cli, args),
        Command::Consts(args) => cmd_consts(cli, args),
        Command::Fit(args) => cmd_fit(cli, args),
        Command::Verify { suite } => cmd_verify(suite.parse()?),
    }
}

fn cmd_run(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = config_map(cli)?.simulation()?;
    let csv = out_path(cli, "trajectory.csv")?;
    let record = match run(&cfg) {
        Ok(r) => r,
        Err(MuskatError::BlowUp {
            time,
            step,
            reason,
            last_valid,
            record,
        }) => {
            record.save(&csv)?;
            let snap = out_path(cli, "last_valid.bin")?;
            let field = Fourier::new(cfg.grid).synthesize(&last_valid)?;
            write_field(fs::File::create(&snap)?, &field)?;
            eprintln!("blow-up at t = {} (step {step}): {reason}", sci(time));
            eprintln!("last valid snapshot: {}", snap.display());
            return Ok(3);
        }
        Err(e) => return Err(e.into()),
    };
    record.save(&csv)?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "wrote {} ({} rows)", csv.display(), record.len())?;
    writeln!(stdout, "monitors ({}):", cfg.monitors)?;
    for m in &record.monitors {
        writeln!(stdout, "  {m}")?;
    }
    let failed = record.monitors.iter().filter(|m| !m.passed).count();
    if failed > 0 {
        eprintln!("warning: {failed} monitor(s) failed");
        if cfg.monitors == MonitorMode::Fail {
            return Ok(1);
        }
    }
    Ok(0)
}

fn cmd_linear(cli: &Cli, args: &LinearArgs) -> anyhow::Result<u8> {
    let profile = RadialProfile::new(args.a, args.dim, 1.0)?;
    let times = log_times(args.t_end, args.samples);
    let mut header = vec!["t".to_string()];
    for s in &args.s {
        header.push(format!("closed_s={s}"));
        header.push(format!("quadrature_s={s}"));
    }
    let mut text = header.join(",") + "\n";
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); args.s.len()];
    for &t in &times {
        let mut row = vec![sci(t)];
        for (j, &s) in args.s.iter().enumerate() {
            let c = semigroup_norm_closed(&profile, s, t)?;
            row.push(sci(c));
            row.push(sci(semigroup_norm_quadrature(&profile, s, t)?));
            columns[j].push(c);
        }
        text += &(row.join(",") + "\n");
    }
    let table = out_path(cli, "semigroup.csv")?;
    fs::write(&table, text)?;
    let window = (args.t_end / 100.0, args.t_end);
    let mut rows = Vec::new();
    for (j, &s) in args.s.iter().enumerate() {
        let fit = fit_exponent(&times, &columns[j], Some(window))?;
        let expected_slope = -(s + args.a + args.dim as f64);
        println!(
            "s={s} slope={:.6} expected={expected_slope} r2={:.9}",
            fit.slope, fit.r2
        );
        rows.push(FitRow {
            s,
            nu: profile.endpoint(),
            fit,
            expected_slope,
        });
    }
    let fits = out_path(cli, "semigroup_fit.csv")?;
    save_fit_csv(&rows, &fits)?;
    println!("wrote {} and {}", table.display(), fits.display());
    Ok(0)
}

fn cmd_bounds(cli: &Cli, args: &BoundsArgs) -> anyhow::Result<u8> {
    let map = config_map(cli)?;
    let cfg = map.simulation()?;
    let series = map.series()?;
    let op = NonlocalOperator::new(cfg.grid, cfg.quad)?;
    let mut text = String::from("s,lhs,rhs,holds\n");
    let mut failures = 0;
    for i in 0..args.count as u64 {
        let spec = random_field(&cfg.grid, args.k_max, args.max_norm, cfg.initial.seed + i)?;
        let field = op.fourier().synthesize(&spec)?;
        for &s in &args.s {
            let r = op.bound_report(&field, s, series.max_n)?;
            failures += usize::from(!r.holds);
            text += &format!("{},{},{},{}\n", sci(r.s), sci(r.lhs), sci(r.rhs), r.holds);
        }
    }
    let path = out_path(cli, "bounds.csv")?;
    fs::write(&path, text)?;
    let total = args.count * args.s.len();
    println!(
        "{} majorant d={} fields={} checks={total} failures={failures}",
        if failures == 0 { "PASS" } else { "FAIL" },
        cfg.grid.dim(),
        args.count
    );
    println!("wrote {}", path.display());
    Ok(u8::from(failures > 0))
}

fn cmd_consts(cli: &Cli, args: &ConstsArgs) -> anyhow::Result<u8> {
    let dim = MuskatDim::from_physical(args.dim)?;
    let delta = match args.delta {
        Some(d) => d,
        None => config_map(cli)?.series()?.delta,
    };
    let k = args.k.unwrap_or(dim.claimed_constant());
    let value = admissibility_value(dim, delta, k, 100_000);
    let best = admissible_constant(dim, delta, 1e-10)?;
    let ok = value.upper() <= 1.0;
    println!("dim={} delta={delta} k={k}", args.dim);
    println!(
        "series={} tail_bound={} terms={}",
        sci(value.partial_sum),
        sci(value.tail_bound),
        value.terms
    );
    println!("maximal_constant={best:.10}");
    println!("{} admissible k={k}", if ok { "PASS" } else { "FAIL" });
    Ok(u8::from(!ok))
}

fn missing_column(csv: &Path, name: &str) -> MuskatError {
    MuskatError::Parse {
        path: Some(csv.to_path_buf()),
        message: format!("missing column '{name}'"),
    }
}

fn cmd_fit(cli: &Cli, args: &FitArgs) -> anyhow::Result<u8> {
    let table = Table::read(&args.csv)?;
    let times = table
        .column("t")
        .ok_or_else(|| missing_column(&args.csv, "t"))?;
    let cols: Vec<String> = if args.cols.is_empty() {
        table.header.iter().filter(|h| h.starts_with("s=")).cloned().collect()
    } else {
        args.cols.clone()
    };
    let window = args.window.as_ref().map(|w| (w[0], w[1]));
    let mut rows = Vec::new();
    for name in &cols {
        let values = table
            .column(name)
            .ok_or_else(|| missing_column(&args.csv, name))?;
        let s: f64 = name
            .strip_prefix("s=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| MuskatError::Config(format!("'{name}' is not an s= column")))?;
        let fit = fit_exponent(&times, &values, window)?;
        let nu = args.nu.unwrap_or(f64::NAN);
        let expected_slope = -s + nu;
        println!(
            "{name} slope={:.6} expected={} r2={:.6} window=[{}, {}]",
            fit.slope,
            if nu.is_nan() { "n/a".to_string() } else { expected_slope.to_string() },
            fit.r2,
            fit.window.0,
            fit.window.1
        );
        rows.push(FitRow {
            s,
            nu,
            fit,
            expected_slope,
        });
    }
    let path = out_path(cli, "fit.csv")?;
    save_fit_csv(&rows, &path)?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_verify(suite: Suite) -> anyhow::Result<u8> {
    let checks = run_suite(suite)?;
    for c in &checks {
        println!("{c}");
    }
    Ok(u8::from(checks.iter().any(|c| !c.passed)))
}
