//! Array-size sweep over all alignment schemes.

use std::io::Write;

use ckm_core::alignment::{
    scheme_beam_sweeping, scheme_bim, scheme_from_paths, scheme_location_based, scheme_perfect_csi,
    scheme_training_estimation, Scheme, SchemeOutcome,
};
use ckm_core::channel::{synthesize_channel, PathSet};
use ckm_core::ckm::{label_sample, BimDatabase, CpmDatabase};
use ckm_core::codebook::Codebook;
use ckm_core::geometry::{ArrayLayout, Point3, UpaConfig};
use ckm_core::locerror::LocationErrorModel;
use ckm_core::metrics::{average_rate, mean, LinkBudget};
use ckm_core::rng::streams;
use ckm_core::scene::{dataset_sample, draw_location, los_blocked, trace_paths, GroundTruthSample, Scene};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, TestLocations};
use crate::scenefile::scene_hash;

/// Column names of the result table.
pub const CSV_COLUMNS: [&str; 7] = [
    "Mt",
    "scheme",
    "avg_rate_bpshz",
    "avg_gain",
    "avg_overhead_symbols",
    "n_locations",
    "seed",
];

/// `count` traced samples, generated in parallel. Identical to the
/// sequential generator for the same seed.
pub fn generate_dataset_par(
    scene: &Scene,
    count: usize,
    max_paths: usize,
    seed: u64,
) -> ckm_core::Result<Vec<GroundTruthSample>> {
    scene.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| dataset_sample(scene, seed, i, max_paths))
        .collect()
}

/// BIM labeling in parallel.
pub fn build_bim_par(
    dataset: &[GroundTruthSample],
    layout: ArrayLayout,
    tx_book: &Codebook,
    rx_book: &Codebook,
    k: usize,
) -> ckm_core::Result<BimDatabase> {
    layout.check_books(tx_book, rx_book)?;
    let labeled = dataset
        .par_iter()
        .map(|s| label_sample(s, &layout, tx_book, rx_book))
        .collect::<ckm_core::Result<Vec<_>>>()?;
    BimDatabase::from_labeled(labeled, layout, k)
}

/// Median perfect-CSI gain over `count` fresh locations with a
/// `tx_rows × tx_cols` BS array and the configured UE array. Used to place
/// the SNR operating point.
pub fn median_best_gain(
    cfg: &ExperimentConfig,
    scene: &Scene,
    tx_cols: usize,
    count: usize,
) -> ckm_core::Result<f64> {
    let layout = ArrayLayout {
        tx: UpaConfig::new(cfg.tx_rows, tx_cols, scene.bs_orientation)?,
        rx: UpaConfig::new(cfg.rx_rows, cfg.rx_cols, scene.ue_orientation)?,
    };
    let f = Codebook::new(tx_cols, cfg.tx_rows)?;
    let w = Codebook::new(cfg.rx_cols, cfg.rx_rows)?;
    let mut gains = (0..count)
        .into_par_iter()
        .map(|i| {
            let q = draw_location(scene, cfg.seed, streams::TEST_LOCATIONS + i as u64)?;
            let h = synthesize_channel(&trace_paths(scene, q, cfg.max_paths)?, &layout.tx, &layout.rx);
            Ok(scheme_perfect_csi(&h, &f, &w)?.gain)
        })
        .collect::<ckm_core::Result<Vec<f64>>>()?;
    gains.sort_by(f64::total_cmp);
    Ok(gains[gains.len() / 2])
}

/// One evaluation point: where the UE is and where it reports to be.
#[derive(Debug, Clone)]
pub struct TestPoint {
    pub index: usize,
    pub location: Point3,
    pub reported: Point3,
    pub los_blocked: bool,
    pub truth: PathSet,
    /// CPM answer at the reported location; array independent.
    pub cpm_estimate: Option<PathSet>,
}

#[derive(Debug, Clone)]
pub struct LocationResult {
    pub index: usize,
    /// Perfect-CSI gain, kept even when that scheme is not reported.
    pub best_gain: f64,
    /// One outcome per configured scheme, in configuration order.
    pub outcomes: Vec<SchemeOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub mt: usize,
    pub scheme: Scheme,
    pub avg_rate: f64,
    pub avg_gain: f64,
    pub avg_overhead: f64,
    pub n_locations: usize,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub mt: usize,
    pub tx_cols: usize,
    pub locations: Vec<LocationResult>,
    pub summaries: Vec<SchemeSummary>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub scene_hash: String,
    pub dataset_len: usize,
    pub points: Vec<TestPoint>,
    pub sweep: Vec<SweepPoint>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] crate::error::ConfigError),
    #[error(transparent)]
    Core(#[from] ckm_core::Error),
    #[error("dataset has {got} samples but {needed} knots were requested as test locations")]
    NotEnoughKnots { needed: usize, got: usize },
    #[error("dataset was generated for scene {dataset} but the experiment uses scene {scene}")]
    SceneMismatch { dataset: String, scene: String },
}

/// Inputs resolved from files or generated; maps are optional overrides.
pub struct ExperimentInputs<'a> {
    pub scene: &'a Scene,
    pub dataset: Vec<GroundTruthSample>,
    /// Hash recorded in the dataset header, checked against the scene.
    pub dataset_scene_hash: Option<String>,
    pub cpm: Option<CpmDatabase>,
}

fn test_points(
    cfg: &ExperimentConfig,
    scene: &Scene,
    dataset: &[GroundTruthSample],
    cpm: Option<&CpmDatabase>,
) -> Result<Vec<TestPoint>, ExperimentError> {
    let errors = LocationErrorModel::new(cfg.mean_error, cfg.seed)?;
    if cfg.test_mode == TestLocations::Knots && dataset.len() < cfg.test_locations {
        return Err(ExperimentError::NotEnoughKnots {
            needed: cfg.test_locations,
            got: dataset.len(),
        });
    }
    (0..cfg.test_locations)
        .into_par_iter()
        .map(|i| {
            let (location, truth) = match cfg.test_mode {
                TestLocations::Fresh => {
                    let q = draw_location(scene, cfg.seed, streams::TEST_LOCATIONS + i as u64)?;
                    (q, trace_paths(scene, q, cfg.max_paths)?)
                }
                TestLocations::Knots => (dataset[i].location, dataset[i].pathset.clone()),
            };
            let reported = errors.perturb(i as u64, location);
            Ok(TestPoint {
                index: i,
                location,
                reported,
                los_blocked: los_blocked(scene, scene.bs, location),
                truth,
                cpm_estimate: cpm.map(|db| db.query(reported)),
            })
        })
        .collect::<ckm_core::Result<Vec<_>>>()
        .map_err(Into::into)
}

fn evaluate_point(
    cfg: &ExperimentConfig,
    scene: &Scene,
    layout: &ArrayLayout,
    books: (&Codebook, &Codebook),
    bim: Option<&BimDatabase>,
    p: &TestPoint,
) -> ckm_core::Result<LocationResult> {
    let (f, w) = books;
    let h = synthesize_channel(&p.truth, &layout.tx, &layout.rx);
    let best = scheme_perfect_csi(&h, f, w)?;
    let outcomes = cfg
        .schemes
        .iter()
        .map(|s| match s {
            Scheme::PerfectCsi => Ok(best),
            Scheme::TrainingEstimation => scheme_training_estimation(&h, f, w, cfg.block_len),
            Scheme::BeamSweeping => scheme_beam_sweeping(&h, f, w, cfg.block_len),
            Scheme::LocationBased => scheme_location_based(&h, scene.bs, layout, p.reported, f, w),
            Scheme::Cpm => {
                let est = p.cpm_estimate.as_ref().expect("cpm estimate computed");
                scheme_from_paths(&h, est, layout, f, w)
            }
            Scheme::Bim => scheme_bim(&h, bim.expect("bim built"), p.reported, f, w),
        })
        .collect::<ckm_core::Result<Vec<_>>>()?;
    Ok(LocationResult {
        index: p.index,
        best_gain: best.gain,
        outcomes,
    })
}

fn summarize(mt: usize, schemes: &[Scheme], locs: &[LocationResult], lb: &LinkBudget) -> ckm_core::Result<Vec<SchemeSummary>> {
    schemes
        .iter()
        .enumerate()
        .map(|(j, &scheme)| {
            let outs: Vec<SchemeOutcome> = locs.iter().map(|l| l.outcomes[j]).collect();
            Ok(SchemeSummary {
                mt,
                scheme,
                avg_rate: average_rate(&outs, lb)?,
                avg_gain: mean(outs.iter().map(|o| o.gain))?,
                avg_overhead: mean(outs.iter().map(|o| o.training_symbols as f64))?,
                n_locations: outs.len(),
            })
        })
        .collect()
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    inputs: ExperimentInputs<'_>,
) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate()?;
    let scene = inputs.scene;
    scene.validate()?;
    let hash = scene_hash(scene);
    if let Some(h) = inputs.dataset_scene_hash {
        if h != hash {
            return Err(ExperimentError::SceneMismatch { dataset: h, scene: hash });
        }
    }
    let dataset = inputs.dataset;
    let wants = |s: Scheme| cfg.schemes.contains(&s);

    let cpm = if wants(Scheme::Cpm) {
        match inputs.cpm {
            Some(db) => Some(db),
            None => Some(CpmDatabase::build(dataset.clone(), cfg.cpm_params())?),
        }
    } else {
        None
    };
    let points = test_points(cfg, scene, &dataset, cpm.as_ref())?;
    let lb = cfg.link_budget();
    lb.validate()?;

    let mut sweep = Vec::with_capacity(cfg.tx_cols.len());
    for &cols in &cfg.tx_cols {
        let layout = ArrayLayout {
            tx: UpaConfig::new(cfg.tx_rows, cols, scene.bs_orientation)?,
            rx: UpaConfig::new(cfg.rx_rows, cfg.rx_cols, scene.ue_orientation)?,
        };
        let f = Codebook::new(cols, cfg.tx_rows)?;
        let w = Codebook::new(cfg.rx_cols, cfg.rx_rows)?;
        let bim = if wants(Scheme::Bim) {
            Some(build_bim_par(&dataset, layout, &f, &w, cfg.k)?)
        } else {
            None
        };
        let locations = points
            .par_iter()
            .map(|p| evaluate_point(cfg, scene, &layout, (&f, &w), bim.as_ref(), p))
            .collect::<ckm_core::Result<Vec<_>>>()?;
        let mt = layout.tx.len();
        let summaries = summarize(mt, &cfg.schemes, &locations, &lb)?;
        sweep.push(SweepPoint {
            mt,
            tx_cols: cols,
            locations,
            summaries,
        });
    }
    Ok(ExperimentOutput {
        config: cfg.clone(),
        scene_hash: hash,
        dataset_len: dataset.len(),
        points,
        sweep,
    })
}

impl ExperimentOutput {
    pub fn summary(&self, mt: usize, scheme: Scheme) -> Option<&SchemeSummary> {
        self.sweep
            .iter()
            .find(|p| p.mt == mt)?
            .summaries
            .iter()
            .find(|s| s.scheme == scheme)
    }

    pub fn scheme_column(&self, scheme: Scheme) -> Option<usize> {
        self.config.schemes.iter().position(|&s| s == scheme)
    }

    /// Fraction of test locations whose direct path is blocked.
    pub fn blocked_fraction(&self) -> f64 {
        let n = self.points.iter().filter(|p| p.los_blocked).count();
        n as f64 / self.points.len() as f64
    }

    fn metadata(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            "ckmbeam results v1".to_string(),
            format!("seed={} scene={} dataset_samples={}", c.seed, self.scene_hash, self.dataset_len),
            format!(
                "power_w={} noise_w={} block_len={} mean_error_m={}",
                c.power, c.noise, c.block_len, c.mean_error
            ),
            format!(
                "tx_rows={} rx={}x{} k={} idw_power={} max_paths={}",
                c.tx_rows, c.rx_rows, c.rx_cols, c.k, c.idw_power, c.max_paths
            ),
            format!(
                "test_locations={} mode={:?} los_blocked_fraction={}",
                self.points.len(),
                c.test_mode,
                self.blocked_fraction()
            ),
        ]
    }

    /// Result table with a `#` metadata block.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for line in self.metadata() {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for point in &self.sweep {
            for s in &point.summaries {
                w.write_record([
                    s.mt.to_string(),
                    s.scheme.to_string(),
                    s.avg_rate.to_string(),
                    s.avg_gain.to_string(),
                    s.avg_overhead.to_string(),
                    s.n_locations.to_string(),
                    self.config.seed.to_string(),
                ])?;
            }
        }
        w.flush()
    }
}
