use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gowergraph::pipeline::{
    generate_synthetic, run_pipeline, run_stage, verify_manifest, write_manifest, PipelineConfig, Stage, SynthSpec,
};
use gowergraph::Error;

const CONFIG_ERROR: u8 = 2;
const STAGE_FAILURE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "gowergraph", version, about = "Weighted Gower similarity networks and cluster inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Pipeline config (JSON). For `synth`, a generator spec instead.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every stage, or resume from `--stage`, then write the manifest.
    Pipeline {
        #[arg(long, value_name = "NAME")]
        stage: Option<String>,
    },
    /// Load, validate and scale the input table.
    Dataset,
    /// Derive or import feature weights.
    Weights,
    /// Compute the Gower dissimilarity and similarity matrices.
    Similarity,
    /// Sweep K, build the mutual kNN graph and detect communities.
    Network,
    /// PERMANOVA, effect sizes, tiers and trend tables.
    Inference,
    /// Write a planted-partition dataset (data.csv, schema.json, labels.csv).
    Synth,
    /// Re-check the checksums in an output directory's manifest.
    Verify,
}

struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::InvalidConfig(_) => CONFIG_ERROR,
            _ => STAGE_FAILURE,
        };
        Failure { code, error }
    }
}

fn config_error(error: Error) -> Failure {
    Failure { code: CONFIG_ERROR, error }
}

fn load_config(common: &Common) -> Result<PipelineConfig, Failure> {
    let path =
        common.config.as_deref().ok_or_else(|| config_error(Error::InvalidConfig("--config is required".into())))?;
    let mut patch = serde_json::Map::new();
    if let Some(seed) = common.seed {
        patch.insert("seed".into(), seed.into());
    }
    let mut config = PipelineConfig::load_patched(path, patch).map_err(config_error)?;
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if common.threads.is_some() {
        config.threads = common.threads;
    }
    config.validate().map_err(config_error)?;
    Ok(config)
}

fn synth(common: &Common) -> Result<(), Failure> {
    let mut spec = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_error(Error::io(path, e)))?;
            serde_json::from_str::<SynthSpec>(&text)
                .map_err(|e| config_error(Error::InvalidConfig(format!("{}: {e}", path.display()))))?
        }
        None => SynthSpec::default(),
    };
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(config_error)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("synthetic"));
    let data = generate_synthetic(&spec)?;
    for p in data.write(&dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn verify(common: &Common) -> Result<(), Failure> {
    let dir: PathBuf = match (&common.out, &common.config) {
        (Some(out), _) => out.clone(),
        (None, Some(_)) => load_config(common)?.output_dir,
        (None, None) => return Err(config_error(Error::InvalidConfig("verify needs --out or --config".into()))),
    };
    let report = verify_manifest(Path::new(&dir))?;
    for name in &report.mismatched {
        println!("MISMATCH {name}");
    }
    for name in &report.missing {
        println!("MISSING  {name}");
    }
    for name in &report.unlisted {
        println!("UNLISTED {name}");
    }
    println!("{} files checked", report.checked);
    if report.ok() {
        Ok(())
    } else {
        Err(Failure {
            code: STAGE_FAILURE,
            error: Error::ChecksumMismatch(
                report.mismatched.iter().chain(&report.missing).cloned().collect::<Vec<_>>().join(", "),
            ),
        })
    }
}

fn single_stage(stage: Stage, common: &Common) -> Result<(), Failure> {
    let config = load_config(common)?;
    for p in run_stage(stage, &config)? {
        println!("{}", p.display());
    }
    write_manifest(&config)?;
    Ok(())
}

fn pipeline(stage: Option<&str>, common: &Common) -> Result<(), Failure> {
    let config = load_config(common)?;
    let manifest = match stage {
        None => run_pipeline(&config)?,
        Some(name) => {
            let from: Stage = name.parse().map_err(config_error)?;
            for s in Stage::ALL.into_iter().skip_while(|s| *s != from) {
                run_stage(s, &config)?;
            }
            write_manifest(&config)?
        }
    };
    println!("output: {}", config.output_dir.display());
    if let Some(k) = manifest.selected_k {
        println!("selected K: {k}");
    }
    if let Some(c) = manifest.n_clusters {
        println!("clusters: {c}");
    }
    println!("files: {}", manifest.files.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GOWERGRAPH_LOG", "info")).init();
    let result = match &cli.command {
        Command::Pipeline { stage } => pipeline(stage.as_deref(), &cli.common),
        Command::Dataset => single_stage(Stage::Dataset, &cli.common),
        Command::Weights => single_stage(Stage::Weights, &cli.common),
        Command::Similarity => single_stage(Stage::Similarity, &cli.common),
        Command::Network => single_stage(Stage::Network, &cli.common),
        Command::Inference => single_stage(Stage::Inference, &cli.common),
        Command::Synth => synth(&cli.common),
        Command::Verify => verify(&cli.common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error!("{}", f.error);
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
