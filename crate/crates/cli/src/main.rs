//! `oir` — run, sweep, and verify online isotonic regression games.
//!
//! Exit codes: 0 success; 1 operational error; 2 assertion failure
//! (`run`/`sweep` with `--assert-bounds` seeing a bound violation, or
//! `verify` with failing checks).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use oir_core::acceptance::{self, VerifyConfig};
use oir_core::adversaries::{AdversarySpec, OrderOverride, ADVERSARY_NAMES};
use oir_core::engine::{self, ExecMode, GameResult, SweepConfig};
use oir_core::learners::{InitSpec, LearnerSpec, LEARNER_NAMES};
use oir_core::loss::LossKind;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Directory used for relative output paths when set.
const OUT_DIR_ENV: &str = "OIR_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "oir",
    version,
    about = "Online isotonic regression testbed: learners vs adversaries with regret accounting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one learner against one adversary, one game per seed.
    Run(RunArgs),
    /// Cross product of learners, adversaries, horizons, and seeds, with
    /// regret-growth fits.
    Sweep(SweepArgs),
    /// Run the built-in verification suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct AlgoArgs {
    /// Grid steps for the net forecasters (default: horizon-tuned).
    #[arg(long)]
    k: Option<usize>,
    /// Learning rate for eg/ogd (defaults: tuned for eg, 0.5 for ogd).
    #[arg(long)]
    eta: Option<f64>,
    /// Regularization strength for ftrl (default 1.0).
    #[arg(long)]
    lambda: Option<f64>,
    /// Initial parameter vector for ogd/ftrl: "diag" or "const:<v>".
    #[arg(long)]
    init: Option<String>,
    /// Noise level for noisy-iso (default 0.1).
    #[arg(long)]
    sigma: Option<f64>,
    /// Segment count for lb-segments (default: round(T^(1/3))).
    #[arg(long)]
    lb_k: Option<usize>,
    /// Segment selector bits for lb-segments, e.g. "0110" (default: random).
    #[arg(long)]
    omega: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Learner name; see `oir run --help` for the list.
    #[arg(long)]
    learner: Option<String>,
    /// Adversary name.
    #[arg(long)]
    adversary: Option<String>,
    /// Horizon (number of points).
    #[arg(long)]
    t: Option<usize>,
    /// Seeds: "7", "1,2,5", or "0..20" / "0..=19".
    #[arg(long)]
    seed: Option<String>,
    /// squared | entropic | absolute.
    #[arg(long)]
    loss: Option<String>,
    /// Reveal-order override: default | iso | anti | random.
    #[arg(long)]
    order: Option<String>,
    /// csv | json.
    #[arg(long)]
    format: Option<String>,
    /// Output file (stdout when absent); relative paths land in $OIR_OUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 2 if any game violates its theorem bound.
    #[arg(long)]
    assert_bounds: bool,
    #[arg(long)]
    master_seed: Option<u64>,
    /// JSON config file; explicit flags win over file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sequential | parallel.
    #[arg(long)]
    exec: Option<String>,
    #[command(flatten)]
    algo: AlgoArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated learner names.
    #[arg(long)]
    learners: Option<String>,
    /// Comma-separated adversary names.
    #[arg(long)]
    adversaries: Option<String>,
    /// Comma-separated horizons, e.g. "64,128,256".
    #[arg(long)]
    t_grid: Option<String>,
    /// Seeds: "7", "1,2,5", or "0..20".
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    order: Option<String>,
    /// Output prefix: writes <prefix>.json and <prefix>.csv; JSON to
    /// stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 2 if any cell violates its theorem bound.
    #[arg(long)]
    assert_bounds: bool,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    exec: Option<String>,
    #[command(flatten)]
    algo: AlgoArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run checks whose id contains this substring.
    #[arg(long)]
    only: Option<String>,
    /// Harness self-test: corrupt one net-forecaster update factor by
    /// this multiplier so the DP-vs-enumeration check must fail.
    #[arg(long, hide = true)]
    inject_beta_fault: Option<f64>,
}

/// File-backed defaults for `run` and `sweep`; any explicit flag wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    learner: Option<String>,
    learners: Option<String>,
    adversary: Option<String>,
    adversaries: Option<String>,
    t: Option<usize>,
    t_grid: Option<String>,
    seed: Option<String>,
    loss: Option<String>,
    order: Option<String>,
    format: Option<String>,
    master_seed: Option<u64>,
    exec: Option<String>,
    k: Option<usize>,
    eta: Option<f64>,
    lambda: Option<f64>,
    init: Option<String>,
    sigma: Option<f64>,
    lb_k: Option<usize>,
    omega: Option<String>,
    /// Labels for the `fixed` adversary (position order).
    labels: Option<Vec<f64>>,
    /// 1-based reveal order for the `fixed` adversary.
    fixed_order: Option<Vec<usize>>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("cannot parse config file {}", p.display()))
        }
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let start: u64 = a.trim().parse().context("bad seed range start")?;
        let (inclusive, rest) = match b.strip_prefix('=') {
            Some(rest) => (true, rest),
            None => (false, b),
        };
        let end: u64 = rest.trim().parse().context("bad seed range end")?;
        let end = if inclusive { end + 1 } else { end };
        if end <= start {
            bail!("empty seed range '{spec}'");
        }
        return Ok((start..end).collect());
    }
    let seeds: Result<Vec<u64>> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u64>().map_err(|e| anyhow!("bad seed '{s}': {e}")))
        .collect();
    let seeds = seeds?;
    if seeds.is_empty() {
        bail!("seed list is empty");
    }
    Ok(seeds)
}

fn parse_horizons(spec: &str) -> Result<Vec<usize>> {
    let ts: Result<Vec<usize>> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|e| anyhow!("bad horizon '{s}': {e}")))
        .collect();
    let ts = ts?;
    if ts.is_empty() {
        bail!("horizon grid is empty");
    }
    Ok(ts)
}

fn parse_order(spec: Option<&str>) -> Result<OrderOverride> {
    match spec.unwrap_or("default") {
        "default" => Ok(OrderOverride::Default),
        "iso" | "isotonic" => Ok(OrderOverride::Isotonic),
        "anti" | "antitonic" => Ok(OrderOverride::Antitonic),
        "random" => Ok(OrderOverride::Random),
        other => bail!("unknown order '{other}' (default, iso, anti, random)"),
    }
}

fn parse_exec(spec: Option<&str>) -> Result<ExecMode> {
    match spec {
        None => Ok(ExecMode::default()),
        Some("sequential") | Some("seq") => Ok(ExecMode::Sequential),
        Some("parallel") | Some("par") => Ok(ExecMode::Parallel),
        Some(other) => bail!("unknown exec mode '{other}' (sequential, parallel)"),
    }
}

fn parse_init(spec: Option<&str>) -> Result<InitSpec> {
    match spec.unwrap_or("diag") {
        "diag" | "diagonal" => Ok(InitSpec::Diagonal),
        other => match other.strip_prefix("const:") {
            Some(v) => Ok(InitSpec::Constant(v.parse().context("bad init constant")?)),
            None => bail!("unknown init '{other}' (diag, const:<v>)"),
        },
    }
}

fn learner_spec(name: &str, algo: &AlgoArgs) -> Result<LearnerSpec> {
    let spec = match name {
        "ew-net" => LearnerSpec::EwNet { k: algo.k },
        "ew-net-naive" => LearnerSpec::EwNetNaive { k: algo.k },
        "ew-entropic" => LearnerSpec::EwEntropic { k: algo.k },
        "eg" => LearnerSpec::Eg { eta: algo.eta },
        "ogd" => LearnerSpec::Ogd {
            eta: algo.eta.unwrap_or(0.5),
            init: parse_init(algo.init.as_deref())?,
        },
        "ftrl" => LearnerSpec::Ftrl {
            lambda: algo.lambda.unwrap_or(1.0),
            init: parse_init(algo.init.as_deref())?,
        },
        "continuous-ew" => LearnerSpec::ContinuousEw,
        "minimax-any" => LearnerSpec::MinimaxAny,
        "minimax-iso" => LearnerSpec::MinimaxIso,
        other => bail!(
            "unknown learner '{other}'; valid learners: {}",
            LEARNER_NAMES.join(", ")
        ),
    };
    Ok(spec)
}

fn adversary_spec(name: &str, algo: &AlgoArgs, file: &FileConfig) -> Result<AdversarySpec> {
    let spec = match name {
        "lb-segments" => AdversarySpec::LbSegments {
            k: algo.lb_k,
            omega: algo.omega.clone(),
        },
        "gd-killer-zeros" => AdversarySpec::GdKillerZeros,
        "gd-killer-ones" => AdversarySpec::GdKillerOnes,
        "midpoint-splitter" => AdversarySpec::MidpointSplitter,
        "greedy-iso" => AdversarySpec::GreedyIso,
        "random-iso" => AdversarySpec::RandomIso,
        "noisy-iso" => AdversarySpec::NoisyIso {
            sigma: algo.sigma.unwrap_or(0.1),
        },
        "fixed" => AdversarySpec::Fixed {
            labels: file
                .labels
                .clone()
                .ok_or_else(|| anyhow!("adversary 'fixed' needs \"labels\" in the config file"))?,
            order: file.fixed_order.clone(),
        },
        other => bail!(
            "unknown adversary '{other}'; valid adversaries: {}",
            ADVERSARY_NAMES.join(", ")
        ),
    };
    Ok(spec)
}

fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

/// 17 significant digits: round-trips through decimal are exact.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Resolved `run` invocation, echoed into every output for provenance.
#[derive(Debug, Clone, Serialize)]
struct RunEcho {
    command: &'static str,
    learner: LearnerSpec,
    adversary: AdversarySpec,
    t: usize,
    seeds: Vec<u64>,
    loss: LossKind,
    order: OrderOverride,
    master_seed: u64,
}

#[derive(Serialize)]
struct RunOutput<'a> {
    version: &'static str,
    master_seed: u64,
    config: &'a RunEcho,
    games: Vec<SeededGame>,
}

#[derive(Serialize)]
struct SeededGame {
    seed: u64,
    #[serde(flatten)]
    result: GameResult,
}

fn cmd_run(args: RunArgs) -> Result<u8> {
    let file = load_config(&args.config)?;
    let learner_name = args
        .learner
        .or(file.learner.clone())
        .ok_or_else(|| anyhow!("--learner is required"))?;
    let adversary_name = args
        .adversary
        .or(file.adversary.clone())
        .ok_or_else(|| anyhow!("--adversary is required"))?;
    let t = args.t.or(file.t).ok_or_else(|| anyhow!("--t is required"))?;
    let algo = AlgoArgs {
        k: args.algo.k.or(file.k),
        eta: args.algo.eta.or(file.eta),
        lambda: args.algo.lambda.or(file.lambda),
        init: args.algo.init.clone().or(file.init.clone()),
        sigma: args.algo.sigma.or(file.sigma),
        lb_k: args.algo.lb_k.or(file.lb_k),
        omega: args.algo.omega.clone().or(file.omega.clone()),
    };
    let seeds = parse_seeds(args.seed.as_deref().or(file.seed.as_deref()).unwrap_or("0"))?;
    let kind: LossKind = args
        .loss
        .as_deref()
        .or(file.loss.as_deref())
        .unwrap_or("squared")
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let order = parse_order(args.order.as_deref().or(file.order.as_deref()))?;
    let format = args
        .format
        .as_deref()
        .or(file.format.as_deref())
        .unwrap_or("csv")
        .to_string();
    let master_seed = args.master_seed.or(file.master_seed).unwrap_or(0);

    let learner = learner_spec(&learner_name, &algo)?;
    let adversary = adversary_spec(&adversary_name, &algo, &file)?;
    let echo = RunEcho {
        command: "run",
        learner: learner.clone(),
        adversary: adversary.clone(),
        t,
        seeds: seeds.clone(),
        loss: kind,
        order,
        master_seed,
    };

    let mut games = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let mut l = learner.build(t, kind).map_err(|e| anyhow!("{e}"))?;
        let mut a = adversary
            .build(t, order, master_seed, seed)
            .map_err(|e| anyhow!("{e}"))?;
        let result = engine::run_game(l.as_mut(), a.as_mut(), kind)?;
        games.push(SeededGame { seed, result });
    }
    let violations = games
        .iter()
        .filter(|g| g.result.bound_satisfied == Some(false))
        .count();

    let text = match format.as_str() {
        "json" => {
            let out = RunOutput {
                version: VERSION,
                master_seed,
                config: &echo,
                games,
            };
            let mut s = serde_json::to_string_pretty(&out)?;
            s.push('\n');
            s
        }
        "csv" => run_csv(&echo, &games)?,
        other => bail!("unknown format '{other}' (csv, json)"),
    };
    write_output(args.out.as_deref(), &text)?;

    if args.assert_bounds && violations > 0 {
        eprintln!("{violations} game(s) violated their theorem bound");
        return Ok(2);
    }
    Ok(0)
}

fn run_csv(echo: &RunEcho, games: &[SeededGame]) -> Result<String> {
    let mut s = String::new();
    s.push_str(&format!("# oir-version={VERSION}\n"));
    s.push_str(&format!("# config={}\n", serde_json::to_string(echo)?));
    s.push_str(&format!("# master-seed={}\n", echo.master_seed));
    s.push_str(
        "record,seed,trial,index,prediction,label,loss,learner,adversary,horizon,learner_loss,oracle_loss,regret,bound,bound_satisfied\n",
    );
    for game in games {
        for r in &game.result.transcript.trials {
            s.push_str(&format!(
                "trial,{},{},{},{},{},{},,,,,,,,\n",
                game.seed,
                r.trial,
                r.index,
                fmt_f64(r.prediction),
                fmt_f64(r.label),
                fmt_f64(r.loss),
            ));
        }
        let g = &game.result;
        s.push_str(&format!(
            "summary,{},,,,,,{},{},{},{},{},{},{},{}\n",
            game.seed,
            g.learner,
            g.adversary,
            g.horizon,
            fmt_f64(g.learner_loss),
            fmt_f64(g.oracle_loss),
            fmt_f64(g.regret),
            fmt_opt_f64(g.bound),
            g.bound_satisfied.map(|b| b.to_string()).unwrap_or_default(),
        ));
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepOutput<'a> {
    version: &'static str,
    master_seed: u64,
    config: &'a SweepConfig,
    #[serde(flatten)]
    report: &'a engine::SweepReport,
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let file = load_config(&args.config)?;
    let learner_names = args
        .learners
        .or(file.learners.clone())
        .ok_or_else(|| anyhow!("--learners is required"))?;
    let adversary_names = args
        .adversaries
        .or(file.adversaries.clone())
        .ok_or_else(|| anyhow!("--adversaries is required"))?;
    let horizons = parse_horizons(
        args.t_grid
            .as_deref()
            .or(file.t_grid.as_deref())
            .ok_or_else(|| anyhow!("--t-grid is required"))?,
    )?;
    let algo = AlgoArgs {
        k: args.algo.k.or(file.k),
        eta: args.algo.eta.or(file.eta),
        lambda: args.algo.lambda.or(file.lambda),
        init: args.algo.init.clone().or(file.init.clone()),
        sigma: args.algo.sigma.or(file.sigma),
        lb_k: args.algo.lb_k.or(file.lb_k),
        omega: args.algo.omega.clone().or(file.omega.clone()),
    };
    let seeds = parse_seeds(args.seed.as_deref().or(file.seed.as_deref()).unwrap_or("0"))?;
    let kind: LossKind = args
        .loss
        .as_deref()
        .or(file.loss.as_deref())
        .unwrap_or("squared")
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let order = parse_order(args.order.as_deref().or(file.order.as_deref()))?;
    let master_seed = args.master_seed.or(file.master_seed).unwrap_or(0);
    let mode = parse_exec(args.exec.as_deref().or(file.exec.as_deref()))?;

    let learners: Vec<LearnerSpec> = learner_names
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|name| learner_spec(name.trim(), &algo))
        .collect::<Result<_>>()?;
    let adversaries: Vec<AdversarySpec> = adversary_names
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|name| adversary_spec(name.trim(), &algo, &file))
        .collect::<Result<_>>()?;

    let cfg = SweepConfig {
        horizons,
        seeds,
        learners,
        adversaries,
        order,
        kind,
        master_seed,
        mode,
    };
    let report = engine::sweep(&cfg)?;
    let json = {
        let out = SweepOutput {
            version: VERSION,
            master_seed,
            config: &cfg,
            report: &report,
        };
        let mut s = serde_json::to_string_pretty(&out)?;
        s.push('\n');
        s
    };

    match &args.out {
        Some(prefix) => {
            let prefix = resolve_out_path(prefix);
            let json_path = prefix.with_extension("json");
            let csv_path = prefix.with_extension("csv");
            std::fs::write(&json_path, &json)
                .with_context(|| format!("cannot write {}", json_path.display()))?;
            let mut csv = String::new();
            csv.push_str(&format!("# oir-version={VERSION}\n"));
            csv.push_str(&format!("# config={}\n", serde_json::to_string(&cfg)?));
            csv.push_str(&format!("# master-seed={master_seed}\n"));
            csv.push_str("learner,adversary,horizon,seed,regret,bound,bound_violated\n");
            for c in &report.cells {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    c.learner,
                    c.adversary,
                    c.horizon,
                    c.seed,
                    fmt_f64(c.regret),
                    fmt_opt_f64(c.bound),
                    c.bound_violated,
                ));
            }
            std::fs::write(&csv_path, &csv)
                .with_context(|| format!("cannot write {}", csv_path.display()))?;
            eprintln!(
                "wrote {} and {}",
                json_path.display(),
                csv_path.display()
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(json.as_bytes())?;
        }
    }

    if args.assert_bounds && report.bound_violations > 0 {
        eprintln!("{} cell(s) violated their theorem bound", report.bound_violations);
        return Ok(2);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let cfg = VerifyConfig {
        beta_fault: args.inject_beta_fault,
    };
    let outcomes = acceptance::run(args.only.as_deref(), &cfg);
    if outcomes.is_empty() {
        bail!(
            "no check matches '{}'; known checks: {}",
            args.only.unwrap_or_default(),
            acceptance::CHECKS
                .iter()
                .map(|(id, _)| *id)
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    let mut failed = 0;
    for outcome in &outcomes {
        println!("{}", outcome.line());
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "{}/{} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 { 0 } else { 2 })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let p = resolve_out_path(p);
            std::fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
