use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ckm_core::alignment::Scheme;
use ckm_core::ckm::{CpmDatabase, CpmParams};
use ckm_core::codebook::Codebook;
use ckm_core::geometry::{ArrayLayout, UpaConfig};
use ckm_core::scene::Scene;
use ckm_sim::config::{resolve_output, ExperimentConfig, TestLocations};
use ckm_sim::dataset::{load_dataset, save_dataset, Dataset, DatasetHeader};
use ckm_sim::experiment::{build_bim_par, generate_dataset_par, run_experiment, ExperimentInputs};
use ckm_sim::maps::{load_cpm, save_bim, save_cpm};
use ckm_sim::report::{read_results, write_wide};
use ckm_sim::scenefile::{load_scene, save_scene};

/// CKM-based beam alignment simulator.
///
/// Relative output paths are placed under $CKMBEAM_OUTPUT_DIR when it is set.
#[derive(Parser, Debug)]
#[command(name = "ckmbeam", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the built-in desk scene as TOML.
    SceneGen {
        #[arg(long, default_value = "scene.toml")]
        out: PathBuf,
    },
    /// Trace a ground-truth dataset.
    DatasetGen {
        /// Scene TOML (desk scene when omitted).
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "dataset.txt")]
        out: PathBuf,
    },
    /// Build a channel path map from a dataset.
    BuildCpm {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2.0)]
        idw_power: f64,
        #[arg(long, default_value = "cpm.json")]
        out: PathBuf,
    },
    /// Label a dataset with optimal beam pairs and build a beam index map.
    BuildBim {
        #[arg(long)]
        dataset: PathBuf,
        /// Scene TOML supplying the array orientations (desk scene when omitted).
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        tx_rows: usize,
        #[arg(long, default_value_t = 16)]
        tx_cols: usize,
        #[arg(long, default_value_t = 2)]
        rx_rows: usize,
        #[arg(long, default_value_t = 2)]
        rx_cols: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "bim.json")]
        out: PathBuf,
    },
    /// Run the array-size sweep and write the result table.
    Evaluate(Box<EvaluateArgs>),
    /// Pivot a result table into rate-vs-Mt columns per scheme.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// TOML experiment configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Prebuilt channel path map (built from the dataset otherwise).
    #[arg(long)]
    cpm: Option<PathBuf>,
    /// Schemes to evaluate; repeat or comma-separate.
    #[arg(long = "scheme", value_delimiter = ',', value_parser = parse_scheme)]
    schemes: Vec<Scheme>,
    #[arg(long, value_delimiter = ',')]
    tx_cols: Vec<usize>,
    #[arg(long)]
    tx_rows: Option<usize>,
    #[arg(long)]
    rx_rows: Option<usize>,
    #[arg(long)]
    rx_cols: Option<usize>,
    #[arg(long)]
    block_len: Option<u64>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    idw_power: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    test_locations: Option<usize>,
    /// Evaluate at dataset knots instead of fresh locations.
    #[arg(long)]
    knots: bool,
    #[arg(long)]
    mean_error: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: ckm_core::alignment::UnknownScheme| e.to_string())
}

fn output_path(path: &Path) -> Result<PathBuf> {
    let path = resolve_output(path);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(path)
}

fn scene_or_desk(path: Option<&Path>) -> Result<Scene> {
    match path {
        Some(p) => load_scene(p).with_context(|| format!("loading scene {}", p.display())),
        None => Ok(Scene::desk()),
    }
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    load_dataset(path).with_context(|| format!("loading dataset {}", path.display()))
}

impl EvaluateArgs {
    fn into_config(self) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => {
                $(if let Some(v) = self.$flag { c.$field = v; })*
            };
        }
        set!(tx_rows <- tx_rows, rx_rows <- rx_rows, rx_cols <- rx_cols, block_len <- block_len,
             power <- power, noise <- noise, max_paths <- paths, k <- k, idw_power <- idw_power,
             samples <- samples, test_locations <- test_locations, mean_error <- mean_error,
             seed <- seed, output <- out);
        if self.scene.is_some() {
            c.scene_file = self.scene;
        }
        if self.dataset.is_some() {
            c.dataset_file = self.dataset;
        }
        if !self.schemes.is_empty() {
            c.schemes = self.schemes;
        }
        if !self.tx_cols.is_empty() {
            c.tx_cols = self.tx_cols;
        }
        if self.knots {
            c.test_mode = TestLocations::Knots;
        }
        Ok((c, self.cpm))
    }
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let (cfg, cpm_path) = args.into_config()?;
    cfg.validate().context("invalid configuration")?;
    let scene = scene_or_desk(cfg.scene_file.as_deref())?;
    let (dataset, hash) = match &cfg.dataset_file {
        Some(p) => {
            let d = read_dataset(p)?;
            (d.samples, d.header.scene_hash)
        }
        None => (generate_dataset_par(&scene, cfg.samples, cfg.max_paths, cfg.seed)?, None),
    };
    let cpm = match &cpm_path {
        Some(p) => Some(load_cpm(p).with_context(|| format!("loading map {}", p.display()))?),
        None => None,
    };
    let out = run_experiment(
        &cfg,
        ExperimentInputs {
            scene: &scene,
            dataset,
            dataset_scene_hash: hash,
            cpm,
        },
    )?;
    let path = output_path(&cfg.output)?;
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    out.write_csv(BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))?;
    for point in &out.sweep {
        for s in &point.summaries {
            eprintln!("Mt={:<5} {:<20} {:.4} bps/Hz", s.mt, s.scheme, s.avg_rate);
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::SceneGen { out } => {
            let path = output_path(&out)?;
            save_scene(&path, &Scene::desk())?;
            eprintln!("wrote {}", path.display());
        }
        Command::DatasetGen {
            scene,
            samples,
            paths,
            seed,
            out,
        } => {
            anyhow::ensure!(samples >= 1, "--samples must be at least 1");
            anyhow::ensure!(paths >= 1, "--paths must be at least 1");
            let scene = scene_or_desk(scene.as_deref())?;
            let data = Dataset {
                header: DatasetHeader::for_scene(&scene, seed, paths),
                samples: generate_dataset_par(&scene, samples, paths, seed)?,
            };
            let path = output_path(&out)?;
            save_dataset(&path, &data)?;
            eprintln!("wrote {} samples to {}", data.samples.len(), path.display());
        }
        Command::BuildCpm {
            dataset,
            k,
            idw_power,
            out,
        } => {
            let data = read_dataset(&dataset)?;
            let max_paths = data
                .header
                .max_paths
                .unwrap_or_else(|| data.samples.iter().map(|s| s.pathset.max_paths()).max().unwrap_or(1));
            let db = CpmDatabase::build(
                data.samples,
                CpmParams {
                    k,
                    power: idw_power,
                    max_paths,
                },
            )?;
            let path = output_path(&out)?;
            save_cpm(&path, &db)?;
            eprintln!("wrote {}", path.display());
        }
        Command::BuildBim {
            dataset,
            scene,
            tx_rows,
            tx_cols,
            rx_rows,
            rx_cols,
            k,
            out,
        } => {
            let scene = scene_or_desk(scene.as_deref())?;
            let data = read_dataset(&dataset)?;
            let layout = ArrayLayout {
                tx: UpaConfig::new(tx_rows, tx_cols, scene.bs_orientation)?,
                rx: UpaConfig::new(rx_rows, rx_cols, scene.ue_orientation)?,
            };
            let f = Codebook::new(tx_cols, tx_rows)?;
            let w = Codebook::new(rx_cols, rx_rows)?;
            let db = build_bim_par(&data.samples, layout, &f, &w, k)?;
            let path = output_path(&out)?;
            save_bim(&path, &db)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Evaluate(args) => evaluate(*args)?,
        Command::Report { input, out } => {
            let file = fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let rows = read_results(file).with_context(|| format!("reading {}", input.display()))?;
            let path = output_path(&out)?;
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_wide(&rows, BufWriter::new(file))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
