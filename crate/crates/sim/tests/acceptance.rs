//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::PI;
use std::fs;
use std::path::Path as FsPath;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ckm_core::alignment::Scheme;
use ckm_core::channel::{beamformed_gain, synthesize_channel, Path, PathSet};
use ckm_core::codebook::{best_beam_pair, Codebook};
use ckm_core::geometry::{AnglePair, Orientation, UpaConfig};
use ckm_core::locerror::LocationErrorModel;
use ckm_core::metrics::prelog;
use ckm_core::rng::{substream, unit_f64};
use ckm_core::scene::Scene;
use ckm_core::Complex64;
use ckm_sim::config::{ExperimentConfig, TestLocations};
use ckm_sim::experiment::{generate_dataset_par, run_experiment, ExperimentInputs, ExperimentOutput};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

// ---- independent reference implementations ----

/// Half-wavelength UPA response, element `m·rows + n` for column m, row n.
fn oracle_steering(rows: usize, cols: usize, a: AnglePair) -> Vec<Complex64> {
    let amp = 1.0 / ((rows * cols) as f64).sqrt();
    let uy = a.zenith.sin() * a.azimuth.sin();
    let uz = a.zenith.cos();
    let mut v = Vec::with_capacity(rows * cols);
    for m in 0..cols {
        for n in 0..rows {
            v.push(Complex64::from_polar(amp, PI * (m as f64 * uy + n as f64 * uz)));
        }
    }
    v
}

/// DFT codeword `(m, n)` of a `cols × rows` grid.
fn oracle_codeword(cols: usize, rows: usize, m: usize, n: usize) -> Vec<Complex64> {
    let amp = 1.0 / ((rows * cols) as f64).sqrt();
    let mut v = Vec::with_capacity(rows * cols);
    for k in 0..cols {
        for l in 0..rows {
            let phase = 2.0 * PI * ((m * k) as f64 / cols as f64 + (n * l) as f64 / rows as f64);
            v.push(Complex64::from_polar(amp, phase));
        }
    }
    v
}

/// Entry (i, j) of the channel via a plain triple loop.
fn oracle_channel(z: &PathSet, tx: (usize, usize), rx: (usize, usize)) -> Vec<Vec<Complex64>> {
    let (mt, mr) = (tx.0 * tx.1, rx.0 * rx.1);
    let scale = ((mt * mr) as f64).sqrt();
    let mut h = vec![vec![Complex64::new(0.0, 0.0); mt]; mr];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            for p in z.paths() {
                let ar = oracle_steering(rx.0, rx.1, p.aoa);
                let at = oracle_steering(tx.0, tx.1, p.aod);
                *entry += scale * Complex64::from_polar(p.gain, p.phase) * ar[i] * at[j].conj();
            }
        }
    }
    h
}

fn oracle_gain(h: &[Vec<Complex64>], w: &[Complex64], f: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in h.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            acc += w[i].conj() * x * f[j];
        }
    }
    acc.norm_sqr()
}

fn random_angles(rng: &mut ChaCha8Rng) -> AnglePair {
    AnglePair::new(PI * unit_f64(rng), -PI + 2.0 * PI * unit_f64(rng)).unwrap()
}

fn random_pathset(rng: &mut ChaCha8Rng, l: usize) -> PathSet {
    let paths = (0..l)
        .map(|_| Path {
            gain: 0.05 + unit_f64(rng),
            phase: -PI + 2.0 * PI * unit_f64(rng),
            aod: random_angles(rng),
            aoa: random_angles(rng),
        })
        .collect();
    PathSet::new(paths, l).unwrap()
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[(unit_f64(rng) * xs.len() as f64) as usize]
}

fn upa(rows: usize, cols: usize) -> UpaConfig {
    UpaConfig::new(rows, cols, Orientation::IDENTITY).unwrap()
}

// (rows, cols)
const TX_SHAPES: [(usize, usize); 3] = [(2, 2), (2, 4), (4, 4)];
const RX_SHAPES: [(usize, usize); 2] = [(1, 2), (2, 2)];

// ---- criteria ----

fn beam_search_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(101, 0);
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let tx = pick(&mut rng, &TX_SHAPES);
        let rx = pick(&mut rng, &RX_SHAPES);
        let l = 1 + (unit_f64(&mut rng) * 3.0) as usize;
        let z = random_pathset(&mut rng, l);
        let h = synthesize_channel(&z, &upa(tx.0, tx.1), &upa(rx.0, rx.1));
        let f = Codebook::new(tx.1, tx.0).unwrap();
        let w = Codebook::new(rx.1, rx.0).unwrap();
        let (pair, gain) = best_beam_pair(&h, &f, &w).unwrap();

        let href = oracle_channel(&z, tx, rx);
        let mut best = (f64::NEG_INFINITY, (0, 0, 0, 0));
        for mt in 0..tx.1 {
            for nt in 0..tx.0 {
                let fc = oracle_codeword(tx.1, tx.0, mt, nt);
                for mr in 0..rx.1 {
                    for nr in 0..rx.0 {
                        let g = oracle_gain(&href, &oracle_codeword(rx.1, rx.0, mr, nr), &fc);
                        if g > best.0 {
                            best = (g, (mt, nt, mr, nr));
                        }
                    }
                }
            }
        }
        let got = (pair.tx.m, pair.tx.n, pair.rx.m, pair.rx.n);
        let rel = (gain - best.0).abs() / best.0.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if got != best.1 || rel > 1e-12 {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        mismatches == 0 && t < Duration::from_secs(5),
        format!("beam search vs double-loop oracle: 100 instances, {mismatches} mismatches, max rel gain err {worst:.1e}, {}", ms(t)),
    )
}

fn synthesis_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(102, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let tx = pick(&mut rng, &[(2, 2), (2, 4), (4, 4), (4, 16)]);
        let rx = pick(&mut rng, &RX_SHAPES);
        let l = 1 + (unit_f64(&mut rng) * 3.0) as usize;
        let z = random_pathset(&mut rng, l);
        let h = synthesize_channel(&z, &upa(tx.0, tx.1), &upa(rx.0, rx.1));
        let href = oracle_channel(&z, tx, rx);
        for (i, row) in href.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                worst = worst.max((h.get(i, j) - x).norm());
            }
        }
    }
    let t = start.elapsed();
    verdict(
        worst <= 1e-12 && t < Duration::from_secs(5),
        format!("channel synthesis vs triple loop: 100 path sets, max entry err {worst:.1e}, {}", ms(t)),
    )
}

fn exact_identities() -> Verdict {
    let mut rng = substream(103, 0);
    // single-path Frobenius norm
    let mut frob = 0.0f64;
    for _ in 0..50 {
        let tx = pick(&mut rng, &[(2, 2), (4, 4), (4, 16), (4, 64)]);
        let rx = pick(&mut rng, &RX_SHAPES);
        let z = random_pathset(&mut rng, 1);
        let h = synthesize_channel(&z, &upa(tx.0, tx.1), &upa(rx.0, rx.1));
        let expect = ((tx.0 * tx.1 * rx.0 * rx.1) as f64).sqrt() * z.paths()[0].gain;
        frob = frob.max((h.frobenius_norm() - expect).abs() / expect);
    }

    // on-grid path, matched codewords
    let fold = |x: f64| if x >= 1.0 { x - 2.0 } else { x };
    let grid = |cols: usize, rows: usize, m: usize, n: usize| {
        let uy = fold(2.0 * m as f64 / cols as f64);
        let uz = fold(2.0 * n as f64 / rows as f64);
        (uy * uy + uz * uz < 1.0 - 1e-9).then(|| {
            let zenith = uz.acos();
            AnglePair::new(zenith, (uy / zenith.sin()).asin()).unwrap()
        })
    };
    let mut grid_err = 0.0f64;
    let mut grid_cases = 0;
    for &(tr, tc) in &[(4usize, 4usize), (4, 8), (4, 16)] {
        let (rr, rc) = (2, 2);
        let (f, w) = (Codebook::new(tc, tr).unwrap(), Codebook::new(rc, rr).unwrap());
        for ti in 0..f.len() {
            let bt = f.index(ti);
            let Some(aod) = grid(tc, tr, bt.m, bt.n) else { continue };
            for ri in 0..w.len() {
                let br = w.index(ri);
                let Some(aoa) = grid(rc, rr, br.m, br.n) else { continue };
                let gain = 0.1 + unit_f64(&mut rng);
                let z = PathSet::new(vec![Path { gain, phase: 1.0, aod, aoa }], 1).unwrap();
                let h = synthesize_channel(&z, &upa(tr, tc), &upa(rr, rc));
                let g = beamformed_gain(&h, w.codeword(ri), f.codeword(ti)).unwrap();
                let expect = (tr * tc * rr * rc) as f64 * gain * gain;
                grid_err = grid_err.max((g - expect).abs() / expect);
                grid_cases += 1;
            }
        }
    }

    // Gram matrices
    let mut gram = 0.0f64;
    for cols in 1..=16 {
        for rows in 1..=16 {
            let cb = Codebook::new(cols, rows).unwrap();
            for i in 0..cb.len() {
                for j in 0..cb.len() {
                    let g: Complex64 = cb.codeword(i).iter().zip(cb.codeword(j)).map(|(a, b)| a.conj() * b).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    gram = gram.max((g - target).norm());
                }
            }
        }
    }
    verdict(
        frob <= 1e-12 && grid_err <= 1e-12 && gram <= 1e-12 && grid_cases > 0,
        format!(
            "identities: Frobenius rel err {frob:.1e}; on-grid gain rel err {grid_err:.1e} over {grid_cases} pairs; Gram err {gram:.1e} up to 16x16"
        ),
    )
}

fn run(cfg: &ExperimentConfig, scene: &Scene) -> ExperimentOutput {
    let dataset = generate_dataset_par(scene, cfg.samples, cfg.max_paths, cfg.seed).unwrap();
    run_experiment(
        cfg,
        ExperimentInputs {
            scene,
            dataset,
            dataset_scene_hash: None,
            cpm: None,
        },
    )
    .unwrap()
}

fn column(out: &ExperimentOutput, s: Scheme) -> usize {
    out.scheme_column(s).unwrap()
}

fn rate(out: &ExperimentOutput, mt: usize, s: Scheme) -> f64 {
    out.summary(mt, s).unwrap().avg_rate
}

fn knot_reproduction(out: &ExperimentOutput) -> Verdict {
    let (pc, cpm, bim) = (
        column(out, Scheme::PerfectCsi),
        column(out, Scheme::Cpm),
        column(out, Scheme::Bim),
    );
    let mut pair_mismatch = 0;
    let mut rate_mismatch = 0;
    for p in &out.sweep {
        for l in &p.locations {
            for j in [cpm, bim] {
                if l.outcomes[j].pair != l.outcomes[pc].pair || l.outcomes[j].gain.to_bits() != l.outcomes[pc].gain.to_bits() {
                    pair_mismatch += 1;
                }
            }
        }
        let r = rate(out, p.mt, Scheme::PerfectCsi);
        for s in [Scheme::Cpm, Scheme::Bim] {
            if rate(out, p.mt, s).to_bits() != r.to_bits() {
                rate_mismatch += 1;
            }
        }
    }
    verdict(
        pair_mismatch == 0 && rate_mismatch == 0,
        format!(
            "knots, mu=0: {} locations x {} Mt, {pair_mismatch} pair mismatches, {rate_mismatch} rate mismatches",
            out.points.len(),
            out.sweep.len()
        ),
    )
}

fn overhead_accounting(out: &ExperimentOutput) -> Verdict {
    let c = &out.config;
    let mr = (c.rx_rows * c.rx_cols) as f64;
    let mut worst = 0.0f64;
    for p in &out.sweep {
        let ratio = rate(out, p.mt, Scheme::BeamSweeping) / rate(out, p.mt, Scheme::PerfectCsi);
        let expect = (1.0 - p.mt as f64 * mr / c.block_len as f64).max(0.0);
        worst = worst.max((ratio - expect).abs());
    }
    let full_500 = prelog(500 * 25, 50_000);
    let full_1500 = prelog(1500 * 25, 50_000);
    let full_ok = (full_500 - 0.75).abs() <= 1e-12 && (full_1500 - 0.25).abs() <= 1e-12;
    verdict(
        worst <= 1e-12 && full_ok,
        format!("sweep/perfect vs 1-Mt*Mr/N: max err {worst:.1e}; full-scale prelog {full_500} at Mt=500, {full_1500} at Mt=1500"),
    )
}

fn trend(out: &ExperimentOutput, elapsed: Duration) -> Verdict {
    let blocked = out.blocked_fraction();
    let mut ok = blocked >= 0.3 && elapsed < Duration::from_secs(120);
    let mut rows = Vec::new();
    for p in &out.sweep {
        let pc = rate(out, p.mt, Scheme::PerfectCsi);
        let loc = rate(out, p.mt, Scheme::LocationBased);
        let cpm = rate(out, p.mt, Scheme::Cpm);
        let bim = rate(out, p.mt, Scheme::Bim);
        ok &= pc >= bim && bim >= 0.8 * pc && pc >= cpm && cpm >= 0.8 * pc && cpm > loc && bim > loc;
        rows.push(format!("Mt={} cpm/pc={:.3} bim/pc={:.3} loc/pc={:.3}", p.mt, cpm / pc, bim / pc, loc / pc));
    }
    verdict(
        ok,
        format!("desk mu=0, blocked {:.0}%, {}: {}", blocked * 100.0, ms(elapsed), rows.join("; ")),
    )
}

fn robustness(clean: &[ExperimentOutput], noisy: &[ExperimentOutput]) -> Verdict {
    let n = clean.len() as f64;
    let avg = |outs: &[ExperimentOutput], mt: usize, s: Scheme| outs.iter().map(|o| rate(o, mt, s)).sum::<f64>() / n;
    let mut worst_drop = 0.0f64;
    let mut loc_ok = true;
    let mut sweep_ok = true;
    let mut rows = Vec::new();
    for p in &clean[0].sweep {
        let mt = p.mt;
        let loc = avg(noisy, mt, Scheme::LocationBased);
        let sweep = avg(noisy, mt, Scheme::BeamSweeping);
        let mut row = format!("Mt={mt}");
        for s in [Scheme::Cpm, Scheme::Bim] {
            let (r0, r1) = (avg(clean, mt, s), avg(noisy, mt, s));
            let drop = (r0 - r1) / r0;
            worst_drop = worst_drop.max(drop);
            loc_ok &= r1 > loc;
            sweep_ok &= r1 > sweep;
            row.push_str(&format!(" {s} {r1:.3} ({:+.1}%)", -drop * 100.0));
        }
        row.push_str(&format!(" loc {loc:.3} sweep {sweep:.3}"));
        rows.push(row);
    }
    verdict(
        worst_drop < 0.15 && loc_ok && sweep_ok,
        format!(
            "mu=1 over seeds 1-3: worst drop {:.1}%, above location-based {loc_ok}, above sweeping {sweep_ok}: {}",
            worst_drop * 100.0,
            rows.join("; ")
        ),
    )
}

fn error_statistics() -> Verdict {
    let model = LocationErrorModel::new(1.0, 108).unwrap();
    let origin = ckm_core::geometry::Point3::new(0.0, 0.0, 1.5);
    let n = 1_000_000u64;
    let mut sum = 0.0;
    for i in 0..n {
        let p = model.perturb(i, origin);
        sum += (p.x * p.x + p.y * p.y).sqrt();
    }
    let mean = sum / n as f64;
    let rel = (mean - 1.0).abs();
    verdict(rel <= 0.005, format!("10^6 draws, mu=1 m: mean radius {mean:.5} m, rel err {:.2}%", rel * 100.0))
}

fn cli(dir: &FsPath, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_ckmbeam"))
        .current_dir(dir)
        .env_remove("CKMBEAM_OUTPUT_DIR")
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> Verdict {
    let files = ["scene.toml", "dataset.txt", "cpm.json", "bim.json", "results.csv", "report.csv"];
    let run = |dir: &FsPath| {
        cli(dir, &["scene-gen", "--out", "scene.toml"])
            && cli(dir, &["dataset-gen", "--scene", "scene.toml", "--seed", "5", "--out", "dataset.txt"])
            && cli(dir, &["build-cpm", "--dataset", "dataset.txt", "--out", "cpm.json"])
            && cli(dir, &["build-bim", "--dataset", "dataset.txt", "--scene", "scene.toml", "--out", "bim.json"])
            && cli(
                dir,
                &[
                    "evaluate", "--scene", "scene.toml", "--dataset", "dataset.txt", "--cpm", "cpm.json",
                    "--seed", "5", "--mean-error", "1", "--out", "results.csv",
                ],
            )
            && cli(dir, &["report", "--input", "results.csv", "--out", "report.csv"])
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    if !(run(a.path()) && run(b.path())) {
        return verdict(false, "pipeline command failed".into());
    }
    let differing: Vec<&str> = files
        .iter()
        .filter(|f| fs::read(a.path().join(f)).ok() != fs::read(b.path().join(f)).ok())
        .copied()
        .collect();
    verdict(
        differing.is_empty(),
        format!("two CLI pipeline runs, seed 5: {} files compared, differing: {differing:?}", files.len()),
    )
}

fn inequalities(runs: &[&ExperimentOutput]) -> Verdict {
    let mut gain_violations = 0;
    let mut rate_violations = 0;
    let mut rstar_err = 0.0f64;
    let mut checked = 0usize;
    for out in runs {
        let c = &out.config;
        let pc = column(out, Scheme::PerfectCsi);
        for p in &out.sweep {
            for l in &p.locations {
                for o in &l.outcomes {
                    checked += 1;
                    if o.gain > l.best_gain {
                        gain_violations += 1;
                    }
                }
                assert_eq!(l.outcomes[pc].gain, l.best_gain);
            }
            let rstar = p.summaries[pc].avg_rate;
            let independent = p
                .locations
                .iter()
                .map(|l| (1.0 + c.power * l.best_gain / c.noise).log2())
                .sum::<f64>()
                / p.locations.len() as f64;
            rstar_err = rstar_err.max((rstar - independent).abs() / independent.max(1e-300));
            rate_violations += p.summaries.iter().filter(|s| s.avg_rate > rstar).count();
        }
    }
    verdict(
        gain_violations == 0 && rate_violations == 0 && rstar_err <= 1e-12,
        format!(
            "{} runs, {checked} scheme outcomes: {gain_violations} gain violations, {rate_violations} rate violations, R* rel err {rstar_err:.1e}",
            runs.len()
        ),
    )
}

fn main() -> ExitCode {
    let scene = Scene::desk();
    let report = |n: usize, v: Verdict| {
        println!("criterion {n:>2}: {}  {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        v.pass
    };
    let mut results = Vec::new();
    results.push(report(1, beam_search_oracle()));
    results.push(report(2, synthesis_oracle()));
    results.push(report(3, exact_identities()));

    let knots_cfg = ExperimentConfig {
        test_mode: TestLocations::Knots,
        ..Default::default()
    };
    let knots = run(&knots_cfg, &scene);
    results.push(report(4, knot_reproduction(&knots)));

    let mut clean = Vec::new();
    let mut noisy = Vec::new();
    let start = Instant::now();
    clean.push(run(&ExperimentConfig::default(), &scene));
    let elapsed = start.elapsed();
    results.push(report(5, overhead_accounting(&clean[0])));
    results.push(report(6, trend(&clean[0], elapsed)));

    for seed in 1..=3 {
        if seed > 1 {
            clean.push(run(&ExperimentConfig { seed, ..Default::default() }, &scene));
        }
        noisy.push(run(
            &ExperimentConfig {
                seed,
                mean_error: 1.0,
                ..Default::default()
            },
            &scene,
        ));
    }
    results.push(report(7, robustness(&clean, &noisy)));
    results.push(report(8, error_statistics()));
    results.push(report(9, determinism()));

    let all: Vec<&ExperimentOutput> = std::iter::once(&knots).chain(&clean).chain(&noisy).collect();
    results.push(report(10, inequalities(&all)));

    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, &p)| !p).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
