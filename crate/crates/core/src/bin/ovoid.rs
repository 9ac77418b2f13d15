use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ovoid_core::error::{Error, Result};
use ovoid_core::gf::{prime_power, FieldCtx};
use ovoid_core::gq::{GqCache, PartialOvoid};
use ovoid_core::manifest::{self, RunManifest};
use ovoid_core::models::{Model, ModelKind, PartialOvoidFile};
use ovoid_core::pipeline::{self, PipelineConfig};
use ovoid_core::redei::residue_set;
use ovoid_core::search::{
    canonical_qplus, search_antipode_paired, search_maximal, SearchConfig, SearchMode, SearchResult,
};

const Q_CAP: u32 = 13;

#[derive(Parser, Debug)]
#[command(name = "ovoid", version, about = "Partial ovoids of Q(4,q): models, search, verification, census")]
struct Cli {
    /// Field order (odd prime power).
    #[arg(long, global = true)]
    q: Option<u32>,
    #[arg(long, global = true, default_value = "q4")]
    model: ModelKind,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search time budget in seconds.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Output file (or directory for `pipeline`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow q = 11 in `pipeline`.
    #[arg(long, global = true)]
    stretch: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and verify a model; print its order and counts.
    Build,
    /// Search for a maximal partial ovoid.
    Search {
        /// Defaults to q^2 - 1.
        #[arg(long)]
        target: Option<usize>,
        /// exact, pairs (Q(4,q) only) or random. Defaults to pairs for q4,
        /// exact for t2.
        #[arg(long)]
        mode: Option<SearchMode>,
    },
    /// Check a partial ovoid file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Elliptic-section census of a partial ovoid; CSV to --out, JSON beside it.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Residues mod p allowed for elliptic sections.
    Residues,
    /// Search, verify, census and compare with reference values.
    Pipeline,
}

/// A failure reported as JSON on stderr.
struct Failure {
    code: u8,
    body: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 2,
            body: json!({"error": e.kind().name(), "message": e.to_string()}),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        body: json!({"error": "usage", "message": msg.into()}),
    }
}

fn check_failed(detail: Value) -> Failure {
    Failure {
        code: 1,
        body: json!({"error": "check_failed", "detail": detail}),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({"error": "usage", "message": e.to_string().trim_end()}));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Build => cmd_build(cli),
        Command::Search { target, mode } => cmd_search(cli, *target, *mode),
        Command::Verify { input } => cmd_verify(cli, input),
        Command::Census { input } => cmd_census(cli, input),
        Command::Residues => cmd_residues(cli),
        Command::Pipeline => cmd_pipeline(cli),
    }
}

fn field(cli: &Cli) -> std::result::Result<Arc<FieldCtx>, Failure> {
    let q = cli.q.ok_or_else(|| usage("--q is required"))?;
    let (p, _) = prime_power(q).ok_or_else(|| usage(format!("{q} is not a prime power")))?;
    if p == 2 {
        return Err(usage(format!("q = {q} is even; only odd q is supported")));
    }
    if q > Q_CAP {
        return Err(usage(format!("q = {q} exceeds the cap {Q_CAP}")));
    }
    Ok(Arc::new(FieldCtx::of_order(q)?))
}

fn build_model(kind: ModelKind, f: Arc<FieldCtx>) -> Result<Model> {
    Model::build_cached(kind, f, GqCache::from_env().as_ref())
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(Error::from)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_build(cli: &Cli) -> std::result::Result<(), Failure> {
    let f = field(cli)?;
    let model = build_model(cli.model, f.clone())?;
    let gq = model.gq();
    let (s, t) = gq.order();
    println!(
        "order ({s},{t}), {} points, {} lines",
        gq.num_points(),
        gq.num_lines()
    );
    if let Some(out) = &cli.out {
        let summary = json!({
            "model": cli.model,
            "field": f.descriptor(),
            "order": [s, t],
            "points": gq.num_points(),
            "lines": gq.num_lines(),
        });
        emit(Some(out), &summary)?;
    }
    Ok(())
}

fn cmd_search(cli: &Cli, target: Option<usize>, mode: Option<SearchMode>) -> std::result::Result<(), Failure> {
    let f = field(cli)?;
    let q = f.q() as usize;
    let mode = mode.unwrap_or(match cli.model {
        ModelKind::Q4 => SearchMode::AntipodePaired,
        ModelKind::T2 => SearchMode::ExactDfs,
    });
    let mut cfg = SearchConfig::new(target.unwrap_or(q * q - 1), mode);
    cfg.seed = cli.seed;
    cfg.threads = cli.threads;
    cfg.time_budget = cli.budget;
    cfg.require_maximal = cfg.target_size == q * q - 1;

    let model = build_model(cli.model, f)?;
    let (result, stats) = match (&model, mode) {
        (Model::Q4(m), SearchMode::AntipodePaired) => {
            cfg.root_fix = None;
            search_antipode_paired(m, &canonical_qplus(m), &cfg)?
        }
        (Model::T2(_), SearchMode::AntipodePaired) => {
            return Err(usage("pairs mode needs --model q4"));
        }
        (Model::T2(m), _) => {
            // (∞) in K puts the affine part in the shape the identity suite needs
            cfg.root_fix = Some(m.infinity());
            search_maximal(m.gq(), &cfg)?
        }
        (Model::Q4(m), _) => search_maximal(m.gq(), &cfg)?,
    };
    match result {
        SearchResult::Found(k) => emit(cli.out.as_deref(), &model.to_file(&k)),
        other => Err(Failure {
            code: 1,
            body: json!({
                "error": "not_found",
                "outcome": if matches!(other, SearchResult::Timeout) { "timeout" } else { "exhausted" },
                "nodes": stats.nodes,
                "elapsed_secs": stats.elapsed_secs,
            }),
        }),
    }
}

fn read_file(path: &Path) -> Result<PartialOvoidFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn load(path: &Path) -> Result<(Model, PartialOvoid)> {
    let file = read_file(path)?;
    let f = Arc::new(FieldCtx::from_descriptor(&file.field)?);
    let model = build_model(file.model, f)?;
    let k = model.from_file(&file)?;
    Ok((model, k))
}

fn cmd_verify(cli: &Cli, input: &Path) -> std::result::Result<(), Failure> {
    let file = read_file(input)?;
    let f = Arc::new(FieldCtx::from_descriptor(&file.field)?);
    let model = build_model(file.model, f)?;
    let k = match model.from_file(&file) {
        Ok(k) => k,
        Err(e @ Error::NotPartialOvoid(..)) => {
            return Err(check_failed(json!([{"check": "partial_ovoid", "message": e.to_string()}])));
        }
        Err(e) => return Err(e.into()),
    };
    let report = pipeline::verify_partial_ovoid(&model, &k, GqCache::from_env().as_ref())?;
    emit(cli.out.as_deref(), &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(check_failed(serde_json::to_value(&report.failures).map_err(Error::from)?))
    }
}

fn cmd_census(cli: &Cli, input: &Path) -> std::result::Result<(), Failure> {
    let (model, k) = load(input)?;
    let (q4, k) = pipeline::in_quadric_model(&model, &k, GqCache::from_env().as_ref())?;
    let summary = pipeline::census_summary(&q4, &k)?;
    match &cli.out {
        Some(out) => {
            summary.census.write_csv(fs::File::create(out).map_err(Error::from)?)?;
            emit(Some(&out.with_extension("json")), &summary)?;
        }
        None => summary.census.write_csv(std::io::stdout().lock())?,
    }
    if summary.passed() {
        Ok(())
    } else {
        Err(check_failed(serde_json::to_value(&summary).map_err(Error::from)?))
    }
}

fn cmd_residues(cli: &Cli) -> std::result::Result<(), Failure> {
    let f = field(cli)?;
    let set = residue_set(&f)?;
    emit(cli.out.as_deref(), &json!({"q": f.q(), "residues": set}))
}

fn cmd_pipeline(cli: &Cli) -> std::result::Result<(), Failure> {
    let start = Instant::now();
    let f = field(cli)?;
    let q = f.q();
    if f.h() != 1 {
        return Err(usage(format!(
            "q = {q}: maximal partial ovoids of size q^2-1 do not exist for non-prime q"
        )));
    }
    match q {
        3 | 5 | 7 => {}
        11 if cli.stretch => {}
        11 => return Err(usage("q = 11 needs --stretch")),
        _ => return Err(usage(format!("pipeline supports q in {{3,5,7}} (11 with --stretch), got {q}"))),
    }
    let cfg = PipelineConfig {
        q,
        threads: cli.threads,
        seed: cli.seed,
        budget: cli.budget,
    };
    let out = pipeline::run_pipeline(&cfg)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("ovoid-q{q}")));
    fs::create_dir_all(&dir).map_err(Error::from)?;
    let k_path = dir.join("k.json");
    let csv_path = dir.join("census.csv");
    let report_path = dir.join("report.json");
    let manifest_path = dir.join("manifest.json");
    emit(Some(&k_path), &out.example)?;
    out.report.census.write_csv(fs::File::create(&csv_path).map_err(Error::from)?)?;
    emit(Some(&report_path), &out.report)?;

    let result = json!({"example": &out.example, "report": &out.report});
    let m = RunManifest {
        command: "pipeline".into(),
        config: json!({
            "q": q,
            "seed": cli.seed,
            "budget": cli.budget,
            "stretch": cli.stretch,
            "mode": "pairs",
            "deterministic": true,
        }),
        field: f.descriptor(),
        inputs: vec![],
        outputs: [&k_path, &csv_path, &report_path]
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        wall_secs: start.elapsed().as_secs_f64(),
        digest: manifest::digest(&result)?,
    };
    emit(Some(&manifest_path), &m)?;
    emit(None, &m)?;

    if out.report.passed() {
        return Ok(());
    }
    let mut differing = Vec::new();
    if let Some(c) = out.report.comparisons.elliptic_values.as_ref().filter(|c| !c.equal) {
        differing.push(json!({"set": "elliptic_values", "expected": c.expected, "observed": c.observed}));
    }
    if let Some(c) = out.report.comparisons.antipode_values.as_ref().filter(|c| !c.equal) {
        differing.push(json!({"set": "antipode_values", "expected": c.expected, "observed": c.observed}));
    }
    Err(check_failed(json!({"reference_mismatch": differing, "report": report_path.display().to_string()})))
}
