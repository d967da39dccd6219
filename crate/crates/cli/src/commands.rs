use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use islr_core::gesture_hmm::{encode, segment_stream, FrameTuple, GestureDefinition, SymbolTable};
use islr_core::grid_features::{extract_features, write_feature_csv, GridSpec};
use islr_core::imaging::{read_frame, Blob};
use islr_core::net::{stream_client, Server, ServerContext};
use islr_core::pipeline::dataset::{self, SynthOptions, TakeDir};
use islr_core::pipeline::eval::{sweep_csv, sweep_table, EvaluationReport};
use islr_core::pipeline::synth::{self, Jitter, TakeNoise};
use islr_core::pipeline::{
    evaluate_gestures, evaluate_poses, fit_pose_model, hand_from_frame, load_models, run_take, save_models,
    sweep_grids, train_gesture_bank, train_test_split, ModelSet, Pipeline, PipelineConfig, StageTimings, STAGES,
};
use islr_core::{Bank, Real};

use crate::{Cli, Command, EvalOutput};

pub fn run(cli: &Cli, cfg: &PipelineConfig) -> Result<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::Synth {
            out,
            classes,
            per_class,
            intermediate_per_class,
            gestures,
            frame_takes,
            tuple_takes,
            no_jitter,
        } => {
            let opts = SynthOptions {
                seed,
                classes: *classes,
                per_class: *per_class,
                intermediate_per_class: *intermediate_per_class,
                gestures: *gestures,
                frame_takes: *frame_takes,
                tuple_takes: *tuple_takes,
                jitter: if *no_jitter { Jitter::none() } else { Jitter::default() },
                take_noise: if *no_jitter { TakeNoise::none() } else { TakeNoise::default() },
                debounce: cfg.debounce,
            };
            let s = dataset::write_synth_dataset(out, &opts)?;
            println!(
                "wrote {} pose images, {} intermediate images, {} rendered takes, {} tuple takes to {}",
                s.pose_images,
                s.intermediate_images,
                s.frame_takes,
                s.tuple_takes,
                out.display()
            );
            Ok(())
        }
        Command::TrainPose { data, models } => train_pose(cfg, data, models),
        Command::TrainGestures {
            data,
            models,
            defs,
            from_frames,
        } => train_gestures(cfg, data, models, defs.as_deref(), *from_frames),
        Command::ClassifyImage {
            models,
            intermediate,
            images,
        } => classify_images(cfg, models, *intermediate, images),
        Command::ClassifyTake {
            models,
            take,
            tuples,
            quiet,
            timings,
        } => classify_take(cfg, models, take, *tuples, *quiet, *timings),
        Command::EvaluatePoses {
            data,
            intermediate,
            self_test,
            out,
        } => evaluate_pose_set(cfg, seed, data, *intermediate, *self_test, out),
        Command::EvaluateGestures {
            data,
            models,
            defs,
            impostors,
            from_frames,
            out,
        } => evaluate_gesture_set(cfg, seed, data, models.as_deref(), defs.as_deref(), *impostors, *from_frames, out),
        Command::SweepGrid {
            data,
            grids,
            intermediate,
            out,
        } => sweep(cfg, seed, data, grids, *intermediate, out),
        Command::ExportFeatures { data, out, intermediate } => export_features(cfg, data, out, *intermediate),
        Command::Serve { models, bind } => serve(cfg, models, bind),
        Command::Stream { addr, frames, fps } => stream(addr, frames, *fps),
    }
}

fn pose_dir(data: &Path, intermediate: bool) -> PathBuf {
    data.join(if intermediate {
        dataset::INTERMEDIATE_DIR
    } else {
        dataset::POSES_DIR
    })
}

/// Hand blobs of every labeled image; images without a hand are skipped.
fn load_hands(cfg: &PipelineConfig, root: &Path) -> Result<Vec<(String, Blob)>> {
    let images = dataset::list_labeled_images(root).with_context(|| format!("listing {}", root.display()))?;
    if images.is_empty() {
        bail!("no images under {}", root.display());
    }
    let mut out = Vec::with_capacity(images.len());
    for (label, path) in images {
        let f = read_frame(&path).with_context(|| format!("reading {}", path.display()))?;
        match hand_from_frame(&f, cfg) {
            Some(b) => out.push((label, b)),
            None => eprintln!("warning: no hand found in {}", path.display()),
        }
    }
    Ok(out)
}

fn write_csv(out: &EvalOutput, text: &str) -> Result<()> {
    if let Some(p) = &out.csv {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn train_pose(cfg: &PipelineConfig, data: &Path, models_dir: &Path) -> Result<()> {
    let mut set = ModelSet::default();
    for intermediate in [false, true] {
        let root = pose_dir(data, intermediate);
        if !root.is_dir() {
            continue;
        }
        let hands = load_hands(cfg, &root)?;
        let model = fit_pose_model(&hands, cfg)?;
        println!(
            "{}: {} samples, {} labels, k={}, grid={}",
            root.display(),
            hands.len(),
            model.labels().len(),
            cfg.k,
            cfg.grid
        );
        if intermediate {
            set.intermediate = Some(model);
        } else {
            set.pose = Some(model);
        }
    }
    if set.is_empty() {
        bail!("no poses/ or intermediate/ directory in {}", data.display());
    }
    save_models(models_dir, &set)?;
    Ok(())
}

fn read_definitions(data: &Path, defs: Option<&Path>) -> Result<(SymbolTable, Vec<GestureDefinition>)> {
    let path = defs
        .map(Path::to_path_buf)
        .unwrap_or_else(|| data.join(dataset::DEFINITIONS_FILE));
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let (poses, defs) = GestureDefinition::parse_file(&text).with_context(|| format!("parsing {}", path.display()))?;
    let poses = poses.with_context(|| format!("{} has no `poses` line", path.display()))?;
    Ok((SymbolTable::new(poses)?, defs))
}

/// Longest segment of a take as a symbol sequence, from its tuples when
/// allowed and present, otherwise from its frames.
fn take_sequence(take: &TakeDir, table: &SymbolTable, pipeline: Option<&mut Pipeline>, debounce: usize) -> Result<Vec<usize>> {
    let tuples: Vec<FrameTuple> = match (pipeline, take.tuples()?) {
        (None, Some(events)) => segment_stream(events, debounce)
            .into_iter()
            .max_by_key(|s| s.len())
            .unwrap_or_default(),
        (Some(p), _) => {
            let outcome = run_take(p, &take.frames()?)?;
            outcome.decision().map(|s| s.tuples.clone()).unwrap_or_default()
        }
        (None, None) => bail!("{} has no tuples.txt; pass --from-frames", take.path.display()),
    };
    Ok(encode(&tuples, table)?)
}

fn frame_pipeline(cfg: &PipelineConfig, models: &ModelSet, take: Option<&Path>) -> Result<Pipeline> {
    let face = dataset::face_provider(&cfg.face, take)?;
    Ok(Pipeline::new(cfg.clone(), models, Arc::new(face))?)
}

/// Sequences grouped by gesture, in definition order.
fn gesture_sequences(
    cfg: &PipelineConfig,
    takes: &[TakeDir],
    defs: &[GestureDefinition],
    table: &SymbolTable,
    models: Option<&ModelSet>,
) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut by_name: BTreeMap<&str, Vec<Vec<usize>>> = BTreeMap::new();
    for take in takes {
        if !defs.iter().any(|d| d.name == take.gesture) {
            eprintln!("warning: {} has no definition", take.path.display());
            continue;
        }
        let seq = match models {
            Some(m) => {
                let mut p = frame_pipeline(cfg, m, Some(&take.path))?;
                take_sequence(take, table, Some(&mut p), cfg.debounce)?
            }
            None => take_sequence(take, table, None, cfg.debounce)?,
        };
        if seq.is_empty() {
            eprintln!("warning: {} produced no symbols", take.path.display());
            continue;
        }
        by_name.entry(take.gesture.as_str()).or_default().push(seq);
    }
    Ok(defs
        .iter()
        .map(|d| by_name.remove(d.name.as_str()).unwrap_or_default())
        .collect())
}

fn train_gestures(
    cfg: &PipelineConfig,
    data: &Path,
    models_dir: &Path,
    defs: Option<&Path>,
    from_frames: bool,
) -> Result<()> {
    let (table, defs) = read_definitions(data, defs)?;
    let takes = dataset::list_takes(data.join(dataset::GESTURES_DIR))?;
    let mut set = if models_dir.exists() {
        load_models(models_dir).unwrap_or_default()
    } else {
        ModelSet::default()
    };
    if from_frames && set.intermediate.is_none() {
        bail!("--from-frames needs an intermediate pose model in {}", models_dir.display());
    }
    let seqs = gesture_sequences(cfg, &takes, &defs, &table, from_frames.then_some(&set))?;
    let (bank, reports) = train_gesture_bank(&defs, table, &seqs, cfg)?;
    for ((d, r), s) in defs.iter().zip(&reports).zip(&seqs) {
        println!(
            "{}: {} takes, {} iterations, log-likelihood {:.4}{}",
            d.name,
            s.len(),
            r.iterations,
            r.history.last().copied().unwrap_or(f64::NAN),
            if r.converged { "" } else { " (not converged)" }
        );
    }
    println!("reject threshold {:.6}", bank.reject_threshold);
    set.gestures = Some(bank);
    save_models(models_dir, &set)?;
    Ok(())
}

fn classify_images(cfg: &PipelineConfig, models_dir: &Path, intermediate: bool, images: &[PathBuf]) -> Result<()> {
    let set = load_models(models_dir)?;
    let model = if intermediate { set.intermediate } else { set.pose };
    let model = model.with_context(|| format!("no matching pose model in {}", models_dir.display()))?;
    for path in images {
        let f = read_frame(path).with_context(|| format!("reading {}", path.display()))?;
        match hand_from_frame(&f, cfg) {
            Some(h) => {
                let c = model.classify(&extract_features(&h, model.grid()))?;
                println!("{} {} {} {:.6}", path.display(), c.label, c.votes, c.mean_distance);
            }
            None => println!("{} NONE", path.display()),
        }
    }
    Ok(())
}

fn timing_report(all: &[StageTimings]) -> String {
    let n = all.len().max(1) as f64;
    let mut s = String::from("stage         avg_ms\n");
    for (i, name) in STAGES.iter().enumerate() {
        let _ = writeln!(s, "{name:<12} {:>8.3}", all.iter().map(|t| t.stages[i]).sum::<f64>() / n);
    }
    let total = all.iter().map(|t| t.total).sum::<f64>() / n;
    let _ = writeln!(s, "{:<12} {:>8.3}", "total", total);
    let _ = writeln!(s, "frames {}  throughput {:.1} frames/s", all.len(), 1e3 / total.max(1e-9));
    s
}

fn classify_take(
    cfg: &PipelineConfig,
    models_dir: &Path,
    take: &Path,
    tuples: bool,
    quiet: bool,
    timings: bool,
) -> Result<()> {
    let set = load_models(models_dir)?;
    if tuples {
        let bank: &Bank = set.gestures.as_ref().context("no gesture bank in models")?;
        let text = std::fs::read_to_string(take.join(dataset::TUPLES_FILE))
            .with_context(|| format!("reading tuples of {}", take.display()))?;
        for seg in segment_stream(dataset::parse_tuples(&text)?, cfg.debounce) {
            let d = bank.classify(&encode(&seg, &bank.symbols)?)?;
            println!("GESTURE {} {:.6}", d.label_or_wrong(), d.avg_log_likelihood);
        }
        return Ok(());
    }
    let mut p = frame_pipeline(cfg, &set, Some(take))?;
    let frames = dataset::read_frames(take)?;
    let outcome = run_take(&mut p, &frames)?;
    if !quiet {
        for r in &outcome.frames {
            println!("frame {:04} {}", r.frame_index, r.reply_text());
        }
    }
    for s in &outcome.segments {
        println!("{}", s.reply_text());
    }
    if timings {
        let t: Vec<StageTimings> = outcome.frames.iter().map(|r| r.timings).collect();
        eprint!("{}", timing_report(&t));
    }
    Ok(())
}

fn evaluate_pose_set(
    cfg: &PipelineConfig,
    seed: u64,
    data: &Path,
    intermediate: bool,
    self_test: bool,
    out: &EvalOutput,
) -> Result<()> {
    let hands = load_hands(cfg, &pose_dir(data, intermediate))?;
    let (train, test) = if self_test {
        (hands.clone(), hands)
    } else {
        train_test_split(hands, cfg.train_fraction, seed)?
    };
    let model = fit_pose_model(&train, cfg)?;
    let test = islr_core::pipeline::eval::samples_for_grid::<Real>(&test, cfg.grid);
    let report = evaluate_poses(&model, &test)?;
    print_report(&report, out)
}

fn print_report(report: &EvaluationReport, out: &EvalOutput) -> Result<()> {
    let csv = report.to_csv();
    print!("{}", report.to_table());
    println!();
    print!("{csv}");
    println!("accuracy,{:.3}", report.accuracy());
    write_csv(out, &csv)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_gesture_set(
    cfg: &PipelineConfig,
    seed: u64,
    data: &Path,
    models_dir: Option<&Path>,
    defs: Option<&Path>,
    impostors: usize,
    from_frames: bool,
    out: &EvalOutput,
) -> Result<()> {
    let (table, defs) = read_definitions(data, defs)?;
    let takes = dataset::list_takes(data.join(dataset::GESTURES_DIR))?;
    let set = models_dir.map(load_models).transpose()?;
    if from_frames && set.as_ref().and_then(|s| s.intermediate.as_ref()).is_none() {
        bail!("--from-frames needs --models with an intermediate pose model");
    }
    let frame_models = if from_frames { set.as_ref() } else { None };
    let seqs = gesture_sequences(cfg, &takes, &defs, &table, frame_models)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (bank, test) = match set.as_ref().and_then(|s| s.gestures.clone()) {
        Some(bank) => (bank, seqs),
        None => {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for mut s in seqs {
                s.shuffle(&mut rng);
                let cut = ((s.len() as f64 * cfg.train_fraction).round() as usize).clamp(1, s.len().max(1));
                test.push(s.split_off(cut.min(s.len())));
                train.push(s);
            }
            (train_gesture_bank(&defs, table.clone(), &train, cfg)?.0, test)
        }
    };
    let mut cases = Vec::new();
    for (d, seqs) in defs.iter().zip(test) {
        cases.extend(seqs.into_iter().map(|s| (Some(d.name.clone()), s)));
    }
    for _ in 0..impostors {
        cases.push((None, synth::impostor_sequence(&mut rng, bank.symbols.size(), 6, 12)));
    }
    let report = evaluate_gestures(&bank, &cases)?;
    print_report(&report, out)
}

fn sweep(cfg: &PipelineConfig, seed: u64, data: &Path, grids: &[GridSpec], intermediate: bool, out: &EvalOutput) -> Result<()> {
    let hands = load_hands(cfg, &pose_dir(data, intermediate))?;
    let grids = if grids.is_empty() {
        GridSpec::sweep_set()
    } else {
        grids.to_vec()
    };
    let rows = sweep_grids(&hands, &grids, cfg.k, cfg.backend, cfg.train_fraction, seed)?;
    print!("{}", sweep_table(&rows));
    let csv = sweep_csv(&rows);
    println!();
    print!("{csv}");
    write_csv(out, &csv)
}

fn export_features(cfg: &PipelineConfig, data: &Path, out: &Path, intermediate: bool) -> Result<()> {
    let hands = load_hands(cfg, &pose_dir(data, intermediate))?;
    let rows: Vec<(String, Vec<Real>)> = hands
        .iter()
        .map(|(l, b)| (l.clone(), extract_features::<Real>(b, cfg.grid).values))
        .collect();
    let file = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
    write_feature_csv::<Real, _>(file, rows, cfg.grid.len())?;
    println!("wrote {} rows to {}", hands.len(), out.display());
    Ok(())
}

fn serve(cfg: &PipelineConfig, models_dir: &Path, bind: &str) -> Result<()> {
    let set = load_models(models_dir)?;
    let face = dataset::face_provider(&cfg.face, None)?;
    let ctx = ServerContext::new(cfg.clone(), set, face)?;
    let server = Server::bind(bind, ctx).with_context(|| format!("binding {bind}"))?;
    eprintln!("listening on {}", server.local_addr()?);
    server.run()?;
    Ok(())
}

fn stream(addr: &str, frames_dir: &Path, fps: f64) -> Result<()> {
    let frames = dataset::read_frames(frames_dir).with_context(|| format!("reading {}", frames_dir.display()))?;
    let mut i = 0usize;
    stream_client(addr, &frames, fps, |r| {
        for line in r.lines() {
            if i < frames.len() && !line.starts_with("GESTURE ") {
                println!("frame {i:04} {line}");
            } else {
                println!("{line}");
            }
        }
        i += 1;
    })
    .with_context(|| format!("streaming to {addr}"))?;
    Ok(())
}
