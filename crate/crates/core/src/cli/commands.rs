use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use matteforge::codec::{
    encode_labels, encode_rgb, read_labels, read_matte, read_rgb, write_atomic,
};
use matteforge::guidance::{
    SamplingParams, ThicknessSchedule, deform, deform_with_thickness, synth_clickmap,
};
use matteforge::harness::{
    self, BlurOracle, GroundTruth, GuidanceKind, Predictor, TestsetParams, build_testset,
    load_scenes, run_eval, stability_report, synth_scenes, write_report, write_scenes,
    write_testset,
};
use matteforge::losses::matting_loss;
use matteforge::metrics::{MetricParams, evaluate};
use matteforge::rng::derive_seed;
use matteforge::sfm::{FeaturePyramid, SfmWeights, sfm_forward, write_weights};
use matteforge::trimap::{make_trimap, partition, random_radii};
use matteforge::{Dims, Error, Rng, composite};
use serde::Serialize;

use super::config::Config;
use super::{Cli, Command, SEED_ENV};

enum Failure {
    /// Bad flags or config; nothing was written.
    Usage(String),
    Data(Error),
    /// Output was written but some inputs failed.
    Partial(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Resolved settings: flags, then config, then environment, then defaults.
struct Settings {
    seed: u64,
    jobs: usize,
    schedule: ThicknessSchedule,
    metrics: MetricParams,
    root: Option<PathBuf>,
}

impl Settings {
    fn resolve(cli: &Cli) -> std::result::Result<Settings, Failure> {
        let cfg = match &cli.global.config {
            Some(p) => Config::load(p).map_err(Failure::Usage)?,
            None => Config::default(),
        };
        let seed = match cli.global.seed.or(cfg.seed) {
            Some(v) => v,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse::<u64>().map_err(|_| {
                    Failure::Usage(format!(
                        "{SEED_ENV}=`{v}` is not an unsigned 64-bit integer"
                    ))
                })?,
                Err(_) => 0,
            },
        };
        Ok(Settings {
            seed,
            jobs: cli.global.jobs.or(cfg.jobs).unwrap_or(0),
            schedule: cfg.schedule.unwrap_or_default(),
            metrics: cfg.metrics.unwrap_or_default(),
            root: cfg.root,
        })
    }

    fn root(&self, flag: &Option<PathBuf>) -> std::result::Result<PathBuf, Failure> {
        flag.clone().or_else(|| self.root.clone()).ok_or_else(|| {
            Failure::Usage("a dataset root is required (--root or `root` in --config)".into())
        })
    }
}

/// Writes to stdout. A closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Data(e.into())),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Data(e.into()))?;
    emit(&s)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Data(e.into()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)?;
    Ok(())
}

fn parse_kind(s: &str) -> std::result::Result<GuidanceKind, Failure> {
    s.parse::<GuidanceKind>()
        .map_err(|e| Failure::Usage(e.to_string()))
}

pub fn run(cli: Cli) -> ExitCode {
    let result = Settings::resolve(&cli).and_then(|s| {
        let jobs = s.jobs;
        harness::with_jobs(jobs, || dispatch(cli.command, &s)).map_err(Failure::from)?
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `matteforge --help` for usage.");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command, s: &Settings) -> Outcome {
    match cmd {
        Command::Composite { fg, bg, alpha, out } => {
            let img = composite(&read_rgb(&fg)?, &read_rgb(&bg)?, &read_matte(&alpha)?)?;
            write_atomic(&out, &encode_rgb(&img)?)?;
        }
        Command::Trimap {
            alpha,
            fg_shrink,
            bg_shrink,
            out,
        } => {
            let a = read_matte(&alpha)?;
            let (rf, rb) = random_radii(
                &mut Rng::derive(s.seed, "trimap"),
                a.width().max(a.height()),
            );
            let t = make_trimap(&a, fg_shrink.unwrap_or(rf), bg_shrink.unwrap_or(rb));
            write_atomic(&out, &encode_labels(&t)?)?;
        }
        Command::Guide {
            trimap,
            step,
            thickness,
            out,
        } => {
            if thickness == Some(0) {
                return Err(Failure::Usage("--thickness must be at least 1".into()));
            }
            s.schedule.validate()?;
            let t = read_labels(&trimap)?;
            let mut rng = Rng::new(s.seed);
            let g = match thickness {
                Some(th) => deform_with_thickness(&t, th, &SamplingParams::default(), &mut rng)?,
                None => deform(&t, step, &s.schedule, &mut rng)?,
            };
            write_atomic(&out, &encode_labels(&g)?)?;
        }
        Command::Clickmap {
            trimap,
            diameter,
            out,
        } => {
            if diameter == 0 {
                return Err(Failure::Usage("--diameter must be at least 1".into()));
            }
            let t = read_labels(&trimap)?;
            let g = synth_clickmap(
                &t,
                diameter,
                &SamplingParams::default(),
                &mut Rng::new(s.seed),
            )?;
            write_atomic(&out, &encode_labels(&g)?)?;
        }
        Command::Schedule { step, every } => {
            s.schedule.validate()?;
            match step {
                Some(n) => emit(&s.schedule.thickness_at(n).to_string())?,
                None => {
                    if every == 0 {
                        return Err(Failure::Usage("--every must be at least 1".into()));
                    }
                    let mut table = String::from("step\tthickness");
                    let end = s.schedule.total_steps();
                    let mut n = 0;
                    while n <= end {
                        table += &format!("\n{n}\t{}", s.schedule.thickness_at(n));
                        n += every;
                    }
                    emit(&table)?;
                }
            }
        }
        Command::Metrics {
            pred,
            gt,
            trimap,
            out,
        } => {
            s.metrics.validate()?;
            let report = evaluate(
                &read_matte(&pred)?,
                &read_matte(&gt)?,
                &read_labels(&trimap)?,
                &s.metrics,
            )?;
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
            print_json(&report)?;
        }
        Command::Loss {
            pred,
            gt,
            trimap,
            sigma,
        } => {
            let sigma = sigma.unwrap_or(s.metrics.sigma);
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Failure::Usage(format!(
                    "--sigma must be positive, got {sigma}"
                )));
            }
            let part = partition(&read_labels(&trimap)?);
            print_json(&matting_loss(
                &read_matte(&pred)?,
                &read_matte(&gt)?,
                &part,
                sigma,
            )?)?;
        }
        Command::SfmDemo {
            channels,
            size,
            n_fpem,
            out,
        } => {
            if channels == 0 || size < 8 || n_fpem == 0 {
                return Err(Failure::Usage(
                    "need --channels >= 1, --size >= 8 and --n-fpem >= 1".into(),
                ));
            }
            let weights = SfmWeights::seeded(channels, n_fpem, s.seed);
            let pyr =
                FeaturePyramid::seeded(channels, size, size, &mut Rng::derive(s.seed, "sfm/input"));
            let fused = sfm_forward(&pyr, &weights, n_fpem)?;
            if let Some(stem) = out {
                write_weights(&weights, &stem)?;
            }
            let (c, h, w) = fused.shape();
            print_json(&serde_json::json!({
                "seed": s.seed,
                "shape": [c, h, w],
                "checksum": fused.checksum(),
            }))?;
        }
        Command::Synth { n, size, out } => {
            if n == 0 || size < 64 {
                return Err(Failure::Usage("need --n >= 1 and --size >= 64".into()));
            }
            write_scenes(&out, &synth_scenes(n, size, s.seed)?)?;
        }
        Command::Testset { root, kind, out } => {
            let kind = parse_kind(&kind)?;
            let root = s.root(&root)?;
            let params = TestsetParams {
                schedule: s.schedule,
                ..TestsetParams::default()
            };
            params.schedule.validate()?;
            let dir = out.unwrap_or_else(|| root.join(harness::GUIDANCE_DIR));
            let set = build_testset(&load_scenes(&root)?, kind, &params, s.seed)?;
            write_testset(&root, &dir, &set)?;
        }
        Command::Eval {
            root,
            pred,
            gt,
            trimap,
            out,
        } => {
            s.metrics.validate()?;
            let dirs = match (pred, gt, trimap) {
                (Some(p), Some(g), Some(t)) => (p, g, t),
                (p, g, t) => {
                    let root = s.root(&root)?;
                    (
                        p.unwrap_or_else(|| root.join(harness::PRED_DIR)),
                        g.unwrap_or_else(|| root.join(harness::ALPHA_DIR)),
                        t.unwrap_or_else(|| root.join(harness::TRIMAP_DIR)),
                    )
                }
            };
            let report = run_eval(&dirs.0, &dirs.1, &dirs.2, &s.metrics)?;
            write_report(&report, &out)?;
            print_json(&report.mean)?;
            if report.is_partial() {
                return Err(Failure::Partial(format!(
                    "{} failed, {} missing, {} extra",
                    report.failures(),
                    report.missing.len(),
                    report.extra.len()
                )));
            }
        }
        Command::Stability {
            root,
            kind,
            variants,
            predictor,
            out,
        } => {
            let kind = parse_kind(&kind)?;
            if variants < 2 {
                return Err(Failure::Usage("--variants must be at least 2".into()));
            }
            let predictor: Box<dyn Predictor> = match predictor.as_str() {
                "blur" => Box::new(BlurOracle::default()),
                "gt" => Box::new(GroundTruth),
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown predictor `{other}` (expected blur or gt)"
                    )));
                }
            };
            s.metrics.validate()?;
            let root = s.root(&root)?;
            let params = TestsetParams {
                schedule: s.schedule,
                ..TestsetParams::default()
            };
            let seeds: Vec<u64> = (0..variants)
                .map(|i| derive_seed(s.seed, &format!("variant/{i}")))
                .collect();
            let report = stability_report(
                &load_scenes(&root)?,
                kind,
                &seeds,
                predictor.as_ref(),
                &params,
                &s.metrics,
            )?;
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
            print_json(&report)?;
        }
    }
    Ok(())
}
