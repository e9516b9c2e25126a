use gowergraph::pipeline::*;
use gowergraph::Error;
use std::path::{Path, PathBuf};

fn fixture(dir: &Path, seed: u64) -> PipelineConfig {
    let data = generate_synthetic(&SynthSpec { seed, ..SynthSpec::default() }).unwrap();
    let input = dir.join("in");
    data.write(&input).unwrap();
    let mut config = PipelineConfig::new(input.join("data.csv"), input.join("schema.json"), seed);
    config.output_dir = dir.join("out");
    config.n_permutations = 99;
    config
}

fn read(path: PathBuf) -> Vec<u8> {
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn stage_without_upstream_reports_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path(), 1);
    let err = run_stage(Stage::Network, &config).unwrap_err();
    let Error::StageFailure { stage, source } = err else { panic!("unexpected {err:?}") };
    assert_eq!(stage, "network");
    assert!(matches!(*source, Error::MissingUpstream(_)), "{source:?}");
}

#[test]
fn weights_stage_writes_only_weights_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path(), 2);
    run_stage(Stage::Dataset, &config).unwrap();
    let before: Vec<_> = std::fs::read_dir(&config.output_dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    let written = run_stage(Stage::Weights, &config).unwrap();
    assert_eq!(written, vec![config.output_dir.join(WEIGHTS_JSON)]);
    let after = std::fs::read_dir(&config.output_dir).unwrap().count();
    assert_eq!(after, before.len() + 1);
}

#[test]
fn inverted_k_range_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = fixture(dir.path(), 3);
    config.k_min = 12;
    config.k_max = 4;
    assert!(matches!(run_pipeline(&config), Err(Error::InvalidConfig(_))));
    assert!(!config.output_dir.exists());
}

#[test]
fn full_run_outputs_rerun_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = fixture(dir.path(), 4);
    let manifest = run_pipeline(&config).unwrap();
    let out = config.output_dir.clone();
    for name in [
        SCALED_TABLE_JSON,
        SCALED_CSV,
        SCALE_PARAMS_JSON,
        SCALE_PARAMS_CSV,
        VIF_CSV,
        CORRELATION_CSV,
        WEIGHTS_JSON,
        DISSIMILARITY_BIN,
        SIMILARITY_BIN,
        DISSIMILARITY_CSV,
        SIMILARITY_CSV,
        KTRACE_CSV,
        GRAPHML,
        EDGES_CSV,
        PARTITION_CSV,
        NETWORK_JSON,
        PERMANOVA_JSON,
        PAIRWISE_CSV,
        EFFECTS_CSV,
        TIERS_CSV,
        TRENDS_CSV,
        COMPOSITION_CSV,
        CLUSTERS_TARGET_CSV,
        INFERENCE_JSON,
        MANIFEST_JSON,
    ] {
        assert!(!read(out.join(name)).is_empty(), "{name} empty");
    }
    assert!(manifest.selected_k.is_some());
    assert!(verify_manifest(&out).unwrap().ok());

    // Rerunning only inference with new thresholds leaves upstream files alone.
    let upstream: Vec<_> = [WEIGHTS_JSON, SIMILARITY_BIN, NETWORK_JSON].iter().map(|n| read(out.join(n))).collect();
    let tiers_before = read(out.join(TIERS_CSV));
    config.t1 = 0.5;
    config.t2 = 1000.0;
    run_stage(Stage::Inference, &config).unwrap();
    let upstream_after: Vec<_> =
        [WEIGHTS_JSON, SIMILARITY_BIN, NETWORK_JSON].iter().map(|n| read(out.join(n))).collect();
    assert_eq!(upstream, upstream_after);
    let tiers_after = String::from_utf8(read(out.join(TIERS_CSV))).unwrap();
    assert_ne!(tiers_before, tiers_after.as_bytes());
    assert!(tiers_after.lines().skip(1).all(|l| l.ends_with("MAT")));

    // The manifest is now stale for the inference outputs.
    let report = verify_manifest(&out).unwrap();
    assert!(report.mismatched.iter().any(|f| f == TIERS_CSV));
    write_manifest(&config).unwrap();
    assert!(verify_manifest(&out).unwrap().ok());

    std::fs::write(out.join(EDGES_CSV), b"tampered\n").unwrap();
    let report = verify_manifest(&out).unwrap();
    assert_eq!(report.mismatched, vec![EDGES_CSV.to_string()]);
    std::fs::remove_file(out.join(GRAPHML)).unwrap();
    assert_eq!(verify_manifest(&out).unwrap().missing, vec![GRAPHML.to_string()]);
}

#[test]
fn stage_names_round_trip() {
    for s in Stage::ALL {
        assert_eq!(s.name().parse::<Stage>().unwrap(), s);
    }
    assert!("clustering".parse::<Stage>().is_err());
}
