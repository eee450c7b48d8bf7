//! Pipeline configuration: TOML file, then command-line overrides, then validation.

use crate::CliError;
use cofold_qc::confidence::HIGH_CONFIDENCE_THRESHOLD;
use cofold_qc::plausibility::{PlausibilityOptions, DEFAULT_CLASH_FACTOR};
use cofold_qc::quality::{
    PocketFit, QualityOptions, DEFAULT_BOND_TOLERANCE, DEFAULT_MIN_COVERAGE, HIGH_QUALITY_POCKET_RMSD,
};
use cofold_qc::stats::{
    BootstrapOptions, ThermoConstants, DEFAULT_BOOTSTRAP_REPLICATES, DEFAULT_CI_LEVEL, DEFAULT_SIMILARITY_EDGES,
    MIN_SERIES_SIZE,
};
use cofold_qc::triage::{HybridCutoffs, TriageOptions, DEFAULT_TANIMOTO_CUTOFF};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// High confidence iff score > this.
    pub confidence: f64,
    /// High quality iff pocket RMSD < this (Å).
    pub pocket_rmsd: f64,
    /// Training ligands above this similarity to a test ligand are removed.
    pub tanimoto: f64,
    pub hybrid_low: f64,
    pub hybrid_high: f64,
    pub min_coverage: f64,
    pub similarity_bins: Vec<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        let cut = HybridCutoffs::default();
        Self {
            confidence: HIGH_CONFIDENCE_THRESHOLD,
            pocket_rmsd: HIGH_QUALITY_POCKET_RMSD,
            tanimoto: DEFAULT_TANIMOTO_CUTOFF,
            hybrid_low: cut.low,
            hybrid_high: cut.high,
            min_coverage: DEFAULT_MIN_COVERAGE,
            similarity_bins: DEFAULT_SIMILARITY_EDGES.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// Run the geometric plausibility screen; when off, the manifest's `physical` flag is used.
    pub internal_plausibility: bool,
    pub symmetry: bool,
    pub pocket_fit: PocketFit,
    pub bond_tolerance: f64,
    pub clash_factor: f64,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            internal_plausibility: true,
            symmetry: true,
            pocket_fit: PocketFit::AllHeavy,
            bond_tolerance: DEFAULT_BOND_TOLERANCE,
            clash_factor: DEFAULT_CLASH_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bootstrap {
    pub replicates: usize,
    pub level: f64,
    pub min_series_size: usize,
    /// Kelvin, for ΔG → pK.
    pub temperature: f64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_BOOTSTRAP_REPLICATES,
            level: DEFAULT_CI_LEVEL,
            min_series_size: MIN_SERIES_SIZE,
            temperature: ThermoConstants::default().temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub out_dir: Option<PathBuf>,
    pub test_ligands: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub workers: usize,
    pub seed: u64,
    /// Batch fails (exit 2) when more than this fraction of entries fail.
    pub max_failure_fraction: f64,
    pub thresholds: Thresholds,
    pub checks: Checks,
    pub bootstrap: Bootstrap,
    pub paths: Paths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            seed: 0,
            max_failure_fraction: 0.5,
            thresholds: Thresholds::default(),
            checks: Checks::default(),
            bootstrap: Bootstrap::default(),
            paths: Paths::default(),
        }
    }
}

/// Values given on the command line; each replaces the file value when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub confidence: Option<f64>,
    pub pocket_rmsd: Option<f64>,
    pub tanimoto: Option<f64>,
    pub hybrid_low: Option<f64>,
    pub hybrid_high: Option<f64>,
    pub min_coverage: Option<f64>,
    pub max_failure_fraction: Option<f64>,
    pub similarity_bins: Option<Vec<f64>>,
    pub replicates: Option<usize>,
    pub level: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn unit(name: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        set(&mut self.workers, o.workers);
        set(&mut self.seed, o.seed);
        if o.out_dir.is_some() {
            self.paths.out_dir = o.out_dir.clone();
        }
        let t = &mut self.thresholds;
        set(&mut t.confidence, o.confidence);
        set(&mut t.pocket_rmsd, o.pocket_rmsd);
        set(&mut t.tanimoto, o.tanimoto);
        set(&mut t.hybrid_low, o.hybrid_low);
        set(&mut t.hybrid_high, o.hybrid_high);
        set(&mut t.min_coverage, o.min_coverage);
        set(&mut t.similarity_bins, o.similarity_bins.clone());
        set(&mut self.max_failure_fraction, o.max_failure_fraction);
        set(&mut self.bootstrap.replicates, o.replicates);
        set(&mut self.bootstrap.level, o.level);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.workers < 1 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        let t = &self.thresholds;
        unit("thresholds.confidence", t.confidence)?;
        unit("thresholds.tanimoto", t.tanimoto)?;
        unit("thresholds.min_coverage", t.min_coverage)?;
        unit("max_failure_fraction", self.max_failure_fraction)?;
        positive("thresholds.pocket_rmsd", t.pocket_rmsd)?;
        if !(t.hybrid_low.is_finite() && t.hybrid_high.is_finite() && t.hybrid_low <= t.hybrid_high) {
            return Err(CliError::Usage(format!(
                "hybrid cutoffs must be finite with low <= high, got {} / {}",
                t.hybrid_low, t.hybrid_high
            )));
        }
        let bins = &t.similarity_bins;
        if bins.len() < 2 || bins.iter().any(|b| !b.is_finite()) || bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("similarity_bins must be at least two ascending finite edges".into()));
        }
        positive("checks.bond_tolerance", self.checks.bond_tolerance)?;
        positive("checks.clash_factor", self.checks.clash_factor)?;
        let b = &self.bootstrap;
        if b.replicates < 1 {
            return Err(CliError::Usage("bootstrap.replicates must be at least 1".into()));
        }
        if !(b.level > 0.0 && b.level < 1.0) {
            return Err(CliError::Usage(format!("bootstrap.level must lie in (0, 1), got {}", b.level)));
        }
        if b.min_series_size < 2 {
            return Err(CliError::Usage("bootstrap.min_series_size must be at least 2".into()));
        }
        positive("bootstrap.temperature", b.temperature)?;
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths.out_dir.clone().unwrap_or_else(|| PathBuf::from("cofold-qc-out"))
    }

    pub fn triage_options(&self) -> TriageOptions {
        TriageOptions {
            confidence_threshold: self.thresholds.confidence,
            pocket_rmsd_threshold: self.thresholds.pocket_rmsd,
            min_coverage: self.thresholds.min_coverage,
        }
    }

    pub fn hybrid_cutoffs(&self) -> HybridCutoffs {
        HybridCutoffs { low: self.thresholds.hybrid_low, high: self.thresholds.hybrid_high }
    }

    pub fn quality_options(&self) -> QualityOptions {
        QualityOptions {
            pocket_fit: self.checks.pocket_fit,
            symmetry: self.checks.symmetry,
            bond_tolerance: self.checks.bond_tolerance,
            ..QualityOptions::default()
        }
    }

    pub fn plausibility_options(&self) -> PlausibilityOptions {
        PlausibilityOptions { bond_tolerance: self.checks.bond_tolerance, clash_factor: self.checks.clash_factor }
    }

    pub fn bootstrap_options(&self) -> BootstrapOptions {
        BootstrapOptions {
            replicates: self.bootstrap.replicates,
            level: self.bootstrap.level,
            seed: self.seed,
            min_size: self.bootstrap.min_series_size,
        }
    }

    pub fn thermo(&self) -> Result<ThermoConstants, CliError> {
        ThermoConstants::at_temperature(self.bootstrap.temperature).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.thresholds.confidence, 0.9);
        assert_eq!(c.thresholds.pocket_rmsd, 2.0);
        assert_eq!((c.thresholds.hybrid_low, c.thresholds.hybrid_high), (1.0, 1.2));
    }

    #[test]
    fn toml_then_overrides() {
        let mut c = PipelineConfig::from_toml(
            "workers = 3\nseed = 9\n[thresholds]\nconfidence = 0.8\n[checks]\npocket_fit = \"backbone\"\n",
        )
        .unwrap();
        assert_eq!((c.workers, c.seed, c.thresholds.confidence), (3, 9, 0.8));
        assert_eq!(c.checks.pocket_fit, PocketFit::Backbone);
        assert_eq!(c.thresholds.pocket_rmsd, 2.0);
        c.apply(&Overrides { workers: Some(5), confidence: Some(0.95), ..Default::default() });
        assert_eq!((c.workers, c.seed, c.thresholds.confidence), (5, 9, 0.95));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(PipelineConfig::from_toml("bogus = 1").is_err());
        for text in [
            "workers = 0",
            "[thresholds]\nconfidence = 1.5",
            "[thresholds]\nhybrid_low = 1.3",
            "[thresholds]\nsimilarity_bins = [0.5, 0.2]",
            "[bootstrap]\nlevel = 1.0",
            "max_failure_fraction = -0.1",
        ] {
            assert!(PipelineConfig::from_toml(text).unwrap().validate().is_err(), "{text}");
        }
    }
}
