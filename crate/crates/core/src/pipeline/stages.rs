use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::artifacts::*;
use super::config::{PipelineConfig, WeightsSource};
use crate::dataset::{load_table, prepare, FeatureSchema, FeatureValues, MissingPolicy, PrepareOptions, ScaledTable};
use crate::error::{Error, Result};
use crate::inference::{
    assign_tiers, cluster_composition, effect_profile, pairwise_permanova, permanova, rank_by_median, trend_table,
    write_clusters_target, write_composition, write_effects, write_pairwise, write_tiers, write_trends, Adjustment,
    CompositionRow, PermanovaResult, RankedCluster, Tier,
};
use crate::network::{
    evaluate_k, finalize, select_k, summarize, to_graphml, write_edge_list, write_ktrace, write_partition, GraphSummary,
};
use crate::rng::{derive, substream};
use crate::similarity::{gower_matrix, read_binary, to_similarity, write_binary, write_matrix_csv, SimilarityMatrix};
use crate::weights::{
    average_columns, correlation_matrix, evaluate_model, fold_weights, make_splits, resolve_imported, vif, Provenance,
    WeightVector, WeightsFile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Dataset,
    Weights,
    Similarity,
    Network,
    Inference,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Dataset, Stage::Weights, Stage::Similarity, Stage::Network, Stage::Inference];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Dataset => "dataset",
            Stage::Weights => "weights",
            Stage::Similarity => "similarity",
            Stage::Network => "network",
            Stage::Inference => "inference",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown stage `{s}`")))
    }
}

/// Contents of `network.json`. Member indices refer to rows of the scaled
/// table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkResult {
    pub k: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub n_communities: usize,
    pub summary: GraphSummary,
    pub clusters: Vec<NetworkCluster>,
    pub excluded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkCluster {
    pub community: usize,
    pub members: Vec<usize>,
}

/// Contents of `inference.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceSummary {
    pub permanova: PermanovaResult,
    pub n_pairs: usize,
    pub n_significant_pairs: usize,
    pub alpha: f64,
    pub adjusted: bool,
    pub clusters: Vec<ClusterSummary>,
    pub composition_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub label: usize,
    pub community: usize,
    pub size: usize,
    #[serde(with = "crate::float_serde")]
    pub median_target: f64,
    pub tier: Tier,
    #[serde(with = "crate::float_serde::pairs")]
    pub top_features: Vec<(String, f64)>,
}

fn load_scaled(dir: &Path) -> Result<ScaledTable> {
    read_json(&upstream(dir, SCALED_TABLE_JSON)?)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub(crate) fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs one stage against `config.output_dir`, reading upstream artifacts
/// from there. Returns the files written.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let started = Instant::now();
    let out = with_threads(config.threads, || match stage {
        Stage::Dataset => dataset_stage(config, dir),
        Stage::Weights => weights_stage(config, dir),
        Stage::Similarity => similarity_stage(config, dir),
        Stage::Network => network_stage(config, dir),
        Stage::Inference => inference_stage(config, dir),
    })?
    .map_err(|e| e.in_stage(stage.name()))?;
    log::info!("stage {stage} finished in {:.3}s ({} files)", started.elapsed().as_secs_f64(), out.len());
    Ok(out)
}

fn dataset_stage(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let schema = FeatureSchema::load(&config.schema)?;
    let policy = if config.strict_missing { MissingPolicy::Strict } else { MissingPolicy::Lenient };
    let table = load_table(&config.input, &schema, policy)?;
    let scaled = prepare(&table, &schema, PrepareOptions { log_target: config.log_target })?;
    log::info!("dataset: {} rows, {} features", scaled.n_rows(), scaled.features.len());

    let mut out = vec![write_json(&dir.join(SCALED_TABLE_JSON), &scaled)?];
    out.push(write_with(&dir.join(SCALED_CSV), |w| scaled.write_csv(w))?);
    out.push(write_json(&dir.join(SCALE_PARAMS_JSON), &scaled.scale_params)?);
    out.push(write_with(&dir.join(SCALE_PARAMS_CSV), |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["feature", "min", "max"])?;
        for (name, (lo, hi)) in &scaled.scale_params {
            c.write_record([name.clone(), format!("{lo:?}"), format!("{hi:?}")])?;
        }
        c.flush().map_err(|e| Error::io(SCALE_PARAMS_CSV, e))
    })?);

    let (names, columns): (Vec<String>, Vec<Vec<f64>>) = scaled
        .features
        .iter()
        .filter_map(|f| match &f.values {
            FeatureValues::Numeric(v) => Some((f.name.clone(), v.clone())),
            FeatureValues::Categorical(_) => None,
        })
        .unzip();
    let vifs = if columns.len() >= 2 { vif(&columns)? } else { vec![f64::NAN; columns.len()] };
    out.push(write_with(&dir.join(VIF_CSV), |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["feature", "vif"])?;
        for (n, v) in names.iter().zip(&vifs) {
            c.write_record([n.clone(), format!("{v:?}")])?;
        }
        c.flush().map_err(|e| Error::io(VIF_CSV, e))
    })?);
    let corr = if columns.is_empty() { vec![] } else { correlation_matrix(&columns)? };
    out.push(write_with(&dir.join(CORRELATION_CSV), |w| {
        let mut c = csv::Writer::from_writer(w);
        let mut header = vec!["feature".to_string()];
        header.extend(names.iter().cloned());
        c.write_record(&header)?;
        for (n, row) in names.iter().zip(&corr) {
            let mut rec = vec![n.clone()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            c.write_record(&rec)?;
        }
        c.flush().map_err(|e| Error::io(CORRELATION_CSV, e))
    })?);
    Ok(out)
}

fn weights_stage(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let scaled = load_scaled(dir)?;
    let file = match &config.weights {
        WeightsSource::Import { path } => {
            let imported = WeightsFile::load(path)?;
            let w = resolve_imported(&imported.averaged, &scaled)?;
            WeightsFile {
                models: imported.models,
                per_model: imported.per_model,
                averaged: w.weights,
                averaged_columns: None,
                seed: imported.seed,
                provenance: Some(Provenance::Imported),
                metrics: None,
            }
        }
        WeightsSource::Derive { models, cv, permutation_repeats } => {
            let design = scaled.design_matrix();
            let plan = crate::weights::CvPlan { seed: substream(config.seed, "cv"), ..*cv };
            let splits = make_splits(&scaled.target, &plan)?;
            let model_seed = substream(config.seed, "weights");
            let mut per_model = IndexMap::new();
            let mut metrics = IndexMap::new();
            for (i, m) in models.iter().enumerate() {
                let started = Instant::now();
                let eval = evaluate_model(
                    &design.rows,
                    &scaled.target,
                    &design.names,
                    m,
                    &splits,
                    *permutation_repeats,
                    derive(model_seed, &[i as u64]),
                )?;
                log::info!(
                    "weights: {} mean R2 {:.4} ({:.2}s)",
                    eval.model,
                    eval.metrics.mean.r2,
                    started.elapsed().as_secs_f64()
                );
                per_model.insert(eval.model.clone(), eval.importance);
                metrics.insert(eval.model, eval.metrics);
            }
            let names: Vec<String> = per_model.keys().cloned().collect();
            let columns = average_columns(&per_model, &names)?;
            let parents: IndexMap<String, String> =
                design.names.iter().cloned().zip(design.parents.iter().cloned()).collect();
            let w = fold_weights(&columns, &parents)?;
            WeightsFile {
                models: names,
                per_model,
                averaged: w.weights,
                averaged_columns: Some(columns),
                seed: Some(config.seed),
                provenance: Some(Provenance::Derived),
                metrics: Some(metrics),
            }
        }
    };
    Ok(vec![write_json(&dir.join(WEIGHTS_JSON), &file)?])
}

fn similarity_stage(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let scaled = load_scaled(dir)?;
    let file: WeightsFile = read_json(&upstream(dir, WEIGHTS_JSON)?)?;
    let weights = WeightVector::new(file.averaged, file.provenance.unwrap_or(Provenance::Imported))?;
    let d = gower_matrix(&scaled, &weights)?;
    let s = to_similarity(&d);
    let mut out = Vec::new();
    for (bin, m) in [(DISSIMILARITY_BIN, &d.0), (SIMILARITY_BIN, &s.0)] {
        let path = dir.join(bin);
        write_binary(&path, &scaled.ids, m)?;
        out.push(crate::similarity::sidecar_path(&path));
        out.push(path);
    }
    if config.emit_matrix_csv {
        out.push(write_with(&dir.join(DISSIMILARITY_CSV), |w| write_matrix_csv(&scaled.ids, &d.0, w))?);
        out.push(write_with(&dir.join(SIMILARITY_CSV), |w| write_matrix_csv(&scaled.ids, &s.0, w))?);
    }
    Ok(out)
}

fn network_stage(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let (ids, s) = read_binary(&upstream(dir, SIMILARITY_BIN)?)?;
    let s = SimilarityMatrix::from_sym(s);
    let n = s.n();
    if n < 3 {
        return Err(Error::InvalidConfig(format!("network needs at least 3 rows (got {n})")));
    }
    let k_max = config.k_max.min(n - 1);
    if k_max < config.k_max {
        log::warn!("k_max {} clipped to {k_max} (n = {n})", config.k_max);
    }
    let k_min = config.k_min.min(k_max);
    let seed = substream(config.seed, "network");
    let selection = select_k(&s, k_min, k_max, seed)?;
    let best = evaluate_k(&s, selection.best_k, seed)?;
    let clusters = finalize(&best.partition, config.min_cluster_size);
    log::info!(
        "network: K = {}, Q = {:.4}, {} communities, {} retained, {} rows excluded",
        selection.best_k,
        best.trace.modularity,
        best.partition.n_communities(),
        clusters.clusters.len(),
        clusters.excluded.len()
    );

    let result = NetworkResult {
        k: selection.best_k,
        k_min,
        k_max,
        n_communities: best.partition.n_communities(),
        summary: summarize(&best.graph),
        clusters: clusters.clusters.iter().map(|(c, m)| NetworkCluster { community: *c, members: m.clone() }).collect(),
        excluded: clusters.excluded.clone(),
    };
    let mut out = vec![write_with(&dir.join(KTRACE_CSV), |w| write_ktrace(&selection.traces, w))?];
    let graphml = to_graphml(&ids, &best.graph, &best.partition);
    let p = dir.join(GRAPHML);
    std::fs::write(&p, graphml).map_err(|e| Error::io(&p, e))?;
    out.push(p);
    out.push(write_with(&dir.join(EDGES_CSV), |w| write_edge_list(&ids, &best.graph, w))?);
    out.push(write_with(&dir.join(PARTITION_CSV), |w| write_partition(&ids, &best.partition, w))?);
    out.push(write_json(&dir.join(NETWORK_JSON), &result)?);
    Ok(out)
}

fn inference_stage(config: &PipelineConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let scaled = load_scaled(dir)?;
    let network: NetworkResult = read_json(&upstream(dir, NETWORK_JSON)?)?;
    let (ids, d) = read_binary(&upstream(dir, DISSIMILARITY_BIN)?)?;
    if ids != scaled.ids {
        return Err(Error::MalformedArtifact("dissimilarity ids differ from the scaled table".into()));
    }
    if network.clusters.len() < 2 {
        return Err(Error::DegenerateGroups(format!(
            "{} cluster(s) of size >= {}; need at least 2",
            network.clusters.len(),
            config.min_cluster_size
        )));
    }
    // Tiers live in target-rate units even when the models saw ln(1 + rate).
    let rate: Vec<f64> =
        if config.log_target { scaled.target.iter().map(|t| t.exp_m1()).collect() } else { scaled.target.clone() };
    let raw: Vec<(usize, Vec<usize>)> = network.clusters.iter().map(|c| (c.community, c.members.clone())).collect();
    let ranked: Vec<RankedCluster> = rank_by_median(&raw, &rate);
    let labelled: Vec<(usize, Vec<usize>)> = ranked.iter().map(|c| (c.label, c.members.clone())).collect();
    let (nodes, groups): (Vec<usize>, Vec<usize>) =
        labelled.iter().flat_map(|(l, m)| m.iter().map(move |&r| (r, *l))).unzip();

    let global = permanova(&d, &nodes, &groups, config.n_permutations, substream(config.seed, "permanova"))?;
    let adjust = if config.bh_adjust { Adjustment::Bh } else { Adjustment::None };
    let pairs =
        pairwise_permanova(&d, &nodes, &groups, config.n_permutations, substream(config.seed, "pairwise"), adjust)?;
    let profile = effect_profile(&scaled, &labelled, config.effect_top_m)?;
    let medians: Vec<(usize, f64)> = ranked.iter().map(|c| (c.label, c.median)).collect();
    let tiers = assign_tiers(&medians, config.t1, config.t2)?;
    let ordering: Vec<usize> = ranked.iter().map(|c| c.label).collect();
    let trends = trend_table(&profile, &ordering)?;

    let column = config.metadata_column.clone().or_else(|| scaled.metadata.keys().next().cloned());
    let composition: Vec<CompositionRow> = match &column {
        Some(name) => {
            let values = scaled.metadata.get(name).ok_or_else(|| Error::MissingColumn(name.clone()))?;
            cluster_composition(&labelled, values)
        }
        None => cluster_composition(&labelled, &vec!["all".to_string(); scaled.n_rows()]),
    };
    log::info!(
        "inference: {} clusters, pseudo-F {:.3}, p = {}, {}/{} pairs significant",
        ranked.len(),
        global.pseudo_f,
        global.p_value,
        pairs.n_significant(config.alpha),
        pairs.pairs.len()
    );

    let summary = InferenceSummary {
        permanova: global,
        n_pairs: pairs.pairs.len(),
        n_significant_pairs: pairs.n_significant(config.alpha),
        alpha: config.alpha,
        adjusted: config.bh_adjust,
        clusters: ranked
            .iter()
            .map(|c| ClusterSummary {
                label: c.label,
                community: c.community,
                size: c.members.len(),
                median_target: c.median,
                tier: tiers.tier(c.label).expect("every cluster is tiered"),
                top_features: profile.cluster(c.label).map(|p| p.top.clone()).unwrap_or_default(),
            })
            .collect(),
        composition_column: column,
    };
    let mut out = vec![write_json(&dir.join(PERMANOVA_JSON), &global)?];
    out.push(write_with(&dir.join(PAIRWISE_CSV), |w| write_pairwise(&pairs, w))?);
    out.push(write_with(&dir.join(EFFECTS_CSV), |w| write_effects(&profile, w))?);
    out.push(write_with(&dir.join(TIERS_CSV), |w| write_tiers(&tiers, w))?);
    out.push(write_with(&dir.join(TRENDS_CSV), |w| write_trends(&trends, w))?);
    out.push(write_with(&dir.join(COMPOSITION_CSV), |w| write_composition(&composition, w))?);
    out.push(write_with(&dir.join(CLUSTERS_TARGET_CSV), |w| write_clusters_target(&ranked, &scaled.ids, &rate, w))?);
    out.push(write_json(&dir.join(INFERENCE_JSON), &summary)?);
    Ok(out)
}

/// Rewrites `manifest.json` from the current contents of the output
/// directory.
pub fn write_manifest(config: &PipelineConfig) -> Result<RunManifest> {
    let dir = &config.output_dir;
    let network: Option<NetworkResult> = match dir.join(NETWORK_JSON) {
        p if p.is_file() => Some(read_json(&p)?),
        _ => None,
    };
    let total_rows = match dir.join(SCALED_TABLE_JSON) {
        p if p.is_file() => Some(read_json::<ScaledTable>(&p)?.n_rows()),
        _ => None,
    };
    let counts = match (&network, total_rows) {
        (Some(n), Some(total)) => {
            let clustered: usize = n.clusters.iter().map(|c| c.members.len()).sum();
            Some(DatasetCounts { total_rows: total, clustered_rows: clustered, excluded_rows: total - clustered })
        }
        _ => None,
    };
    let manifest = RunManifest {
        tool: "gowergraph".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        counts,
        selected_k: network.as_ref().map(|n| n.k),
        n_clusters: network.as_ref().map(|n| n.clusters.len()),
        files: checksum_tree(dir)?,
    };
    write_json(&dir.join(MANIFEST_JSON), &manifest)?;
    Ok(manifest)
}

/// Validates `config` and runs every stage in order, then writes the
/// manifest.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    for stage in Stage::ALL {
        run_stage(stage, config)?;
    }
    let manifest = write_manifest(config)?;
    log::info!("pipeline finished in {:.3}s", started.elapsed().as_secs_f64());
    Ok(manifest)
}
