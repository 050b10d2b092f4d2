//! `sarsa-arena`: train campaigns, summarize finished runs, inspect snapshots.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sarsa_arena::config::{ExperimentConfig, CONFIG_ENV};
use sarsa_arena::encoder::{StateId, NUM_STATES};
use sarsa_arena::harness::{
    deaths_plot, kills_plot, load_reports, run_campaign, streak_plot, CampaignOptions, LevelSummary, RunConfig,
};
use sarsa_arena::rl::parse_snapshot;
use sarsa_arena::weapons::{actions_for, WeaponCategory};

#[derive(Parser)]
#[command(name = "sarsa-arena", version, about = "Tabular Sarsa(λ) shooting bot in a simulated FPS arena")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run training campaigns against scripted opponents.
    Train(TrainArgs),
    /// Summarize finished campaigns.
    Report(ReportArgs),
    /// Print the contents of a table snapshot.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
    #[value(name = "5")]
    Five,
    All,
}

impl LevelArg {
    fn levels(self) -> &'static [u8] {
        match self {
            LevelArg::One => &[1],
            LevelArg::Three => &[3],
            LevelArg::Five => &[5],
            LevelArg::All => &[1, 3, 5],
        }
    }
}

#[derive(clap::Args)]
struct TrainArgs {
    /// Opponent skill level.
    #[arg(long, value_enum)]
    level: LevelArg,
    /// Games per campaign (overrides the configuration and its scale).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    games: Option<u32>,
    /// Simulated minutes per game (overrides the configuration and its scale).
    #[arg(long)]
    minutes: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Configuration file; defaults to $SARSA_ARENA_CONFIG, then the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Keep every k-th death snapshot.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    snapshot_every: Option<u64>,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// A campaign directory, or a directory of campaign subdirectories.
    #[arg(long = "in")]
    input: PathBuf,
    /// Write kills, deaths and kill-streak SVG plots into each campaign directory.
    #[arg(long)]
    svg: bool,
    /// Print the full aggregate tables and write `summary.csv`.
    #[arg(long)]
    tables: bool,
}

#[derive(clap::Args)]
struct InspectArgs {
    snapshot: PathBuf,
    /// Print the action values of one state in every category.
    #[arg(long)]
    state: Option<usize>,
    /// Print the N highest-valued state-action pairs.
    #[arg(long)]
    top: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => train(args),
        Command::Report(args) => report(args),
        Command::Inspect(args) => inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    config: String,
    resolved_config: &'static str,
    seed: u64,
    runs: Vec<ManifestRun>,
}

#[derive(Serialize)]
struct ManifestRun {
    level: u8,
    run_id: String,
    dir: String,
    games: u32,
    minutes: f64,
    seed: u64,
    opponents: usize,
    snapshot_every: u64,
}

const MANIFEST_FILE: &str = "manifest.toml";
const RESOLVED_CONFIG_FILE: &str = "config.toml";

fn load_config(flag: Option<PathBuf>) -> Result<(ExperimentConfig, String), Failure> {
    let path = flag.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => Ok((ExperimentConfig::load(&p)?, p.display().to_string())),
        None => Ok((ExperimentConfig::default(), "(built-in defaults)".into())),
    }
}

fn train(args: TrainArgs) -> Result<(), Failure> {
    if let Some(m) = args.minutes {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Failure::Usage(format!("--minutes must be positive, got {m}")));
        }
    }
    let (mut config, config_origin) = load_config(args.config)?;
    if let Some(seed) = args.seed {
        config.harness.seed = seed;
    }
    if let Some(k) = args.snapshot_every {
        config.harness.snapshot_every = k;
    }

    let levels = args.level.levels();
    let mut runs: Vec<RunConfig> = Vec::new();
    for &level in levels {
        let dir = if levels.len() == 1 {
            args.out.clone()
        } else {
            args.out.join(format!("level_{level}"))
        };
        let mut run = config.run_config(level, Some(dir))?;
        if let Some(g) = args.games {
            run.games = g;
        }
        if let Some(m) = args.minutes {
            run.minutes = m;
        }
        runs.push(run);
    }

    // everything that can fail on the file system fails before any simulation
    for run in &runs {
        let dir = run.out_dir.as_ref().expect("output directory set");
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let manifest = RunManifest {
        tool: "sarsa-arena",
        version: env!("CARGO_PKG_VERSION"),
        config: config_origin,
        resolved_config: RESOLVED_CONFIG_FILE,
        seed: config.harness.seed,
        runs: runs
            .iter()
            .map(|r| ManifestRun {
                level: r.level,
                run_id: r.run_id.clone(),
                dir: relative(r.out_dir.as_deref().unwrap(), &args.out),
                games: r.games,
                minutes: r.minutes,
                seed: r.seed,
                opponents: r.opponents,
                snapshot_every: r.snapshot_every,
            })
            .collect(),
    };
    write_file(&args.out.join(RESOLVED_CONFIG_FILE), &config.to_toml())?;
    write_file(
        &args.out.join(MANIFEST_FILE),
        &toml::to_string(&manifest).expect("manifest serializes"),
    )?;

    // campaigns share nothing, so levels run side by side
    let results = thread::scope(|scope| {
        let handles: Vec<_> = runs
            .iter()
            .map(|run| scope.spawn(move || run_campaign(run, CampaignOptions::default())))
            .collect();
        handles.into_iter().map(|h| h.join().expect("campaign thread panicked")).collect::<Vec<_>>()
    });
    for (run, result) in runs.iter().zip(results) {
        let result = result?;
        let kills: u64 = result.games.iter().map(|g| g.kills).sum();
        println!(
            "level {}: {} games, {} kills, {} deaths, {} snapshots -> {}",
            run.level,
            result.games.len(),
            kills,
            result.deaths,
            result.snapshots.len(),
            run.out_dir.as_ref().unwrap().display()
        );
    }
    Ok(())
}

fn relative(dir: &Path, base: &Path) -> String {
    dir.strip_prefix(base)
        .map(|p| if p.as_os_str().is_empty() { ".".into() } else { p.display().to_string() })
        .unwrap_or_else(|_| dir.display().to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn headline(s: &LevelSummary) -> String {
    let fmt = |v: Option<f64>, unit: &str| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}{unit}"));
    format!(
        "level {}: KD ratio {} (kills {}, deaths by others {}, suicides {}), hits {}, {} games, {} lives",
        s.level,
        fmt(s.kd_ratio, ":1"),
        s.kills,
        s.deaths_by_others,
        s.suicides,
        fmt(s.hit_percentage, "%"),
        s.games,
        s.lives
    )
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let reports = load_reports(&args.input)?;
    for r in &reports {
        if args.tables {
            print!("{}", r.summary.render(&r.weapons));
        } else {
            println!("{}", headline(&r.summary));
        }
    }
    if args.tables {
        let mut csv = format!("{}\n", LevelSummary::CSV_HEADER);
        for r in &reports {
            csv.push_str(&r.summary.csv_row());
            csv.push('\n');
        }
        let path = args.input.join("summary.csv");
        write_file(&path, &csv)?;
        println!("wrote {}", path.display());
    }
    if args.svg {
        for r in &reports {
            let level = r.summary.level;
            let plots = [
                (format!("kills_level_{level}.svg"), kills_plot(level, &r.games)),
                (format!("deaths_level_{level}.svg"), deaths_plot(level, &r.games)),
                (format!("streak_level_{level}.svg"), streak_plot(level, &r.games)),
            ];
            for (name, svg) in plots {
                let path = r.dir.join(name);
                write_file(&path, &svg)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn inspect(args: InspectArgs) -> Result<(), Failure> {
    let state = args
        .state
        .map(|s| StateId::new(s).map_err(|_| Failure::Usage(format!("--state {s} is outside [0, {NUM_STATES})"))))
        .transpose()?;
    let path = &args.snapshot;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let snap = parse_snapshot(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let (alpha, gamma, lambda) = snap.params;
    println!("lives {}", snap.lives);
    println!("params alpha {alpha} gamma {gamma} lambda {lambda}");
    println!("nonzero entries:");
    for table in snap.tables.iter() {
        println!("  {:<12} {}", table.category().name(), table.nonzero_count());
    }
    if let Some(state) = state {
        println!("state {state}:");
        for table in snap.tables.iter() {
            let values: Vec<String> = actions_for(table.category())
                .iter()
                .zip(table.q_row(state))
                .map(|(a, v)| format!("{}={v}", a.label()))
                .collect();
            println!("  {:<12} {}", table.category().name(), values.join(" "));
        }
    }
    if let Some(n) = args.top {
        let mut pairs: Vec<(WeaponCategory, StateId, usize, f64)> = snap
            .tables
            .iter()
            .flat_map(|t| t.nonzero().map(move |(s, a, v)| (t.category(), s, a, v)))
            .collect();
        pairs.sort_by(|x, y| y.3.total_cmp(&x.3).then((x.0, x.1, x.2).cmp(&(y.0, y.1, y.2))));
        println!("top {n}:");
        for (c, s, a, v) in pairs.into_iter().take(n) {
            println!("  {:<12} state {s:>4} {:<9} {v}", c.name(), actions_for(c)[a].label());
        }
    }
    Ok(())
}
