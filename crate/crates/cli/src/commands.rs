use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use lvyscale::exponent::{default_index_grid, log_grid, IndexEnd, IndexFit, LevyExponent};
use lvyscale::io;
use lvyscale::sampler::sample_increment_with;
use lvyscale::synth::Synthesizer;
use lvyscale::verify::{verify_degeneration, verify_scaling_limit, ScalingReport, Verdict};
use lvyscale::Error;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ExperimentConfig, Format, Manifest, MANIFEST_SCHEMA};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The scientific check failed.
    Rejected,
    /// An index fit had nothing to fit.
    DegenerateFit,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Rejected => 1,
            Status::DegenerateFit => 2,
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_manifest(cfg: &ExperimentConfig, command: &str, outputs: Vec<String>) -> anyhow::Result<()> {
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_string(),
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        outputs,
    };
    let path = cfg.out.join("manifest.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn simulate(cfg: &ExperimentConfig) -> anyhow::Result<Status> {
    cfg.validate()?;
    let layered = cfg.layered.unwrap_or_default();
    let noise = cfg.noise_spec();
    let ext = cfg.format.extension();
    prepare_out(&cfg.out)?;

    let outputs = if let Some(count) = cfg.simulate.increments {
        let samples = sample_increment_with(&noise, cfg.simulate.vol, count, &layered)?;
        let name = format!("samples.{ext}");
        let mut w = create(&cfg.out.join(&name))?;
        match cfg.format {
            Format::Csv => io::write_samples_csv(&mut w, &samples)?,
            Format::Bin => io::write_samples_bin(&mut w, &samples)?,
            Format::Json => serde_json::to_writer(&mut w, &samples)?,
        }
        w.flush()?;
        vec![name]
    } else {
        let synth = Synthesizer::with_config(&noise, cfg.operator, cfg.grid_spec()?, &layered)?;
        (0..cfg.simulate.paths as u64)
            .into_par_iter()
            .map(|stream| -> anyhow::Result<String> {
                let path = synth.path(stream);
                let name = format!("path-{stream:06}.{ext}");
                let mut w = create(&cfg.out.join(&name))?;
                match cfg.format {
                    Format::Csv => io::write_path_csv(&mut w, &path)?,
                    Format::Bin => io::write_path_bin(&mut w, &path)?,
                    Format::Json => serde_json::to_writer(&mut w, &path)?,
                }
                w.flush()?;
                Ok(name)
            })
            .collect::<anyhow::Result<Vec<_>>>()?
    };
    write_manifest(cfg, "simulate", outputs.clone())?;
    for name in &outputs {
        println!("{}", cfg.out.join(name).display());
    }
    Ok(Status::Ok)
}

fn fit_json(fit: &IndexFit) -> serde_json::Value {
    json!({
        "index": fit.slope,
        "rawSlope": fit.raw_slope,
        "intercept": fit.intercept,
        "rSquared": fit.r_squared,
        "gridLo": fit.grid.first(),
        "gridHi": fit.grid.last(),
        "gridPoints": fit.grid.len(),
    })
}

/// `indices` writes `indices.json` and `psi.csv` only when `out` is set.
pub fn indices(noise: &LevyExponent, format: Format, out: Option<&Path>) -> anyhow::Result<Status> {
    let th = noise.theoretical_indices();
    let fit = |end| match noise.fit_index(end, &default_index_grid(end)) {
        Ok(f) => Ok(Ok(f)),
        Err(Error::DegenerateFit(msg)) => Ok(Err(msg)),
        Err(e) => Err(e),
    };
    let zero = fit(IndexEnd::Zero)?;
    let inf = fit(IndexEnd::Infinity)?;
    let entry = |r: &Result<IndexFit, String>| match r {
        Ok(f) => fit_json(f),
        Err(msg) => json!({ "error": msg }),
    };
    let doc = json!({
        "noise": noise,
        "family": noise.family_name(),
        "theoretical": { "beta0": th.beta0, "betaInf": th.beta_inf },
        "fitted": { "beta0": entry(&zero), "betaInf": entry(&inf) },
    });

    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("noise        {}", noise.family_name());
        println!("theoretical  beta0 = {}  betaInf = {}", th.beta0, th.beta_inf);
        for (label, r) in [("beta0  ", &zero), ("betaInf", &inf)] {
            match r {
                Ok(f) => println!(
                    "fitted {label}  {:.4}  (raw slope {:.4}, r² {:.6}, ξ in [{:.0e}, {:.0e}])",
                    f.slope,
                    f.raw_slope,
                    f.r_squared,
                    f.grid[0],
                    f.grid[f.grid.len() - 1]
                ),
                Err(msg) => println!("fitted {label}  degenerate: {msg}"),
            }
        }
    }

    if let Some(dir) = out {
        prepare_out(dir)?;
        let mut w = create(&dir.join("indices.json"))?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        let grid: Vec<f64> = log_grid(1e-4, 1e4, 161);
        let mut w = create(&dir.join("psi.csv"))?;
        io::write_exponent_csv(&mut w, noise, &grid)?;
        w.flush()?;
    }

    if zero.is_err() || inf.is_err() {
        return Ok(Status::DegenerateFit);
    }
    Ok(Status::Ok)
}

const ROUTED_NOTE: &str = "betaInf = 0: no fine-scale stable limit, ran the degeneration check instead";

pub fn verify(cfg: &ExperimentConfig) -> anyhow::Result<Status> {
    cfg.validate_verify()?;
    let report = if cfg.routes_to_degeneration() {
        let mut r = verify_degeneration(&cfg.degeneration_request())?;
        r.note = Some(match r.note.take() {
            Some(n) => format!("{ROUTED_NOTE}; {n}"),
            None => ROUTED_NOTE.to_string(),
        });
        r
    } else {
        verify_scaling_limit(&cfg.scaling_request())?
    };
    prepare_out(&cfg.out)?;
    let mut w = create(&cfg.out.join("report.json"))?;
    io::write_report_json(&mut w, &report)?;
    w.flush()?;
    write_manifest(cfg, "verify", vec!["report.json".into()])?;

    if cfg.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_summary(&report);
    }
    Ok(match report.verdict {
        Verdict::Converging | Verdict::DegenerateToZero => Status::Ok,
        Verdict::NonConverging => Status::Rejected,
    })
}

fn print_summary(r: &ScalingReport) {
    println!(
        "{} / {:?} / {:?}  H = {:.6}  seed = {}",
        r.noise.family_name(),
        r.operator,
        r.direction,
        r.h,
        r.seed
    );
    for p in &r.ladder {
        let extra = p.ks_p_value.map(|v| format!("  p = {v:.3}")).unwrap_or_default();
        println!("  a = {:<10} distance = {:.5}  n = {}{extra}", p.a, p.distance, p.n);
    }
    println!("  threshold {}  verdict {:?}", r.threshold, r.verdict);
    if let Some(note) = &r.note {
        println!("  note: {note}");
    }
}

pub fn report(files: &[impl AsRef<Path>], format: Format) -> anyhow::Result<Status> {
    let reports = files
        .iter()
        .map(|f| {
            let f = f.as_ref();
            let file = File::open(f).with_context(|| format!("cannot open {}", f.display()))?;
            io::read_report_json(std::io::BufReader::new(file)).with_context(|| format!("{}", f.display()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for (f, r) in files.iter().zip(&reports) {
            println!("{}", f.as_ref().display());
            print_summary(r);
        }
    }
    Ok(Status::Ok)
}
