//! Output file names, the run manifest and its verification.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use crate::checksum::file_sha256;
use crate::error::{Error, Result};

pub const SCALED_TABLE_JSON: &str = "scaled_table.json";
pub const SCALED_CSV: &str = "scaled.csv";
pub const SCALE_PARAMS_JSON: &str = "scale_params.json";
pub const SCALE_PARAMS_CSV: &str = "scale_params.csv";
pub const VIF_CSV: &str = "vif.csv";
pub const CORRELATION_CSV: &str = "correlation.csv";
pub const WEIGHTS_JSON: &str = "weights.json";
pub const DISSIMILARITY_BIN: &str = "dissimilarity.bin";
pub const DISSIMILARITY_CSV: &str = "dissimilarity.csv";
pub const SIMILARITY_BIN: &str = "similarity.bin";
pub const SIMILARITY_CSV: &str = "similarity.csv";
pub const KTRACE_CSV: &str = "ktrace.csv";
pub const GRAPHML: &str = "graph.graphml";
pub const EDGES_CSV: &str = "edges.csv";
pub const PARTITION_CSV: &str = "partition.csv";
pub const NETWORK_JSON: &str = "network.json";
pub const PERMANOVA_JSON: &str = "permanova.json";
pub const PAIRWISE_CSV: &str = "pairwise.csv";
pub const EFFECTS_CSV: &str = "effects.csv";
pub const TIERS_CSV: &str = "tiers.csv";
pub const TRENDS_CSV: &str = "trends.csv";
pub const COMPOSITION_CSV: &str = "composition.csv";
pub const CLUSTERS_TARGET_CSV: &str = "clusters_target.csv";
pub const INFERENCE_JSON: &str = "inference.json";
pub const MANIFEST_JSON: &str = "manifest.json";

pub(crate) fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes through `f`, flushing and mapping IO errors to `path`.
pub(crate) fn write_with<F>(path: &Path, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<()>,
{
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact(format!("{}: {e}", path.display())))
}

/// Fails with `MissingUpstream` unless `dir/name` exists.
pub(crate) fn upstream(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(Error::MissingUpstream(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCounts {
    pub total_rows: usize,
    pub clustered_rows: usize,
    pub excluded_rows: usize,
}

/// Summary of an output directory. Stage timings go to the log rather than
/// here so that the tree stays byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub counts: Option<DatasetCounts>,
    pub selected_k: Option<usize>,
    pub n_clusters: Option<usize>,
    /// SHA-256 of every other file in the directory, by file name.
    pub files: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST_JSON))
    }
}

/// Checksums of every regular file in `dir` except the manifest.
pub fn checksum_tree(dir: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if path.is_file() && name != MANIFEST_JSON {
            out.insert(name, file_sha256(&path)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub mismatched: Vec<String>,
    pub missing: Vec<String>,
    /// Present on disk but not listed.
    pub unlisted: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatched.is_empty() && self.missing.is_empty()
    }
}

/// Recomputes the checksums listed in `dir/manifest.json`.
pub fn verify_manifest(dir: &Path) -> Result<VerifyReport> {
    let manifest = RunManifest::load(dir)?;
    let actual = checksum_tree(dir)?;
    let mut report = VerifyReport { checked: 0, mismatched: vec![], missing: vec![], unlisted: vec![] };
    for (name, sum) in &manifest.files {
        match actual.get(name) {
            None => report.missing.push(name.clone()),
            Some(s) => {
                report.checked += 1;
                if s != sum {
                    report.mismatched.push(name.clone());
                }
            }
        }
    }
    report.unlisted = actual.keys().filter(|k| !manifest.files.contains_key(*k)).cloned().collect();
    Ok(report)
}
