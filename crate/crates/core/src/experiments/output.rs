//! CSV tables, run manifests and the binary data cache.
//!
//! Files are named `<example>_<delta>_<seed>_<kind>.csv`. Numbers use Rust's
//! shortest round-trip formatting so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::trace_grid;
use crate::inverse::CauchySample;
use crate::linsolve::Spectral;

use super::config::ExperimentConfig;
use super::ensemble::{EnsembleRun, ErrorReport};
use super::sweep::{SweepAxis, SweepRow};

pub fn file_name(config: &ExperimentConfig, kind: &str, ext: &str) -> String {
    format!("{}_{}_{}_{kind}.{ext}", config.example, config.delta_tag(), config.seed)
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

/// Ensemble means of reference and reconstruction with pointwise E1.
pub fn fields_csv(run: &EnsembleRun) -> String {
    let g = &run.grid;
    let n = run.outcomes.len() as f64;
    let mut s = String::from("x,y,t,reference_mean,reconstruction_mean,e1\n");
    let nx = g.nodes.len();
    for (k, &t) in g.times.iter().enumerate() {
        for (i, p) in g.nodes.iter().enumerate() {
            let j = k * nx + i;
            let r: f64 = run.outcomes.iter().map(|(_, o)| o.reference[j]).sum::<f64>() / n;
            let c: f64 = run.outcomes.iter().map(|(_, o)| o.reconstruction[j]).sum::<f64>() / n;
            let _ = writeln!(s, "{},{},{},{},{},{}", p[0], p[1], t, r, c, run.report.metrics.e1[j]);
        }
    }
    s
}

pub fn e2_csv(run: &EnsembleRun) -> String {
    let mut s = String::from("x,y,e2,in_summary\n");
    for ((p, e), m) in run.grid.nodes.iter().zip(&run.report.metrics.e2).zip(&run.grid.mask) {
        let _ = writeln!(s, "{},{},{},{}", p[0], p[1], e, u8::from(*m));
    }
    s
}

pub fn e3_csv(run: &EnsembleRun) -> String {
    let mut s = String::from("t,e3\n");
    for (t, e) in run.grid.times.iter().zip(&run.report.metrics.e3) {
        let _ = writeln!(s, "{t},{e}");
    }
    s
}

pub fn paths_csv(report: &ErrorReport) -> String {
    let mut s = String::from("path,gamma,residual_norm,solution_norm\n");
    for p in &report.paths {
        let _ = writeln!(s, "{},{},{},{}", p.path, p.gamma, p.residual_norm, p.solution_norm);
    }
    s
}

pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut s = format!("{axis},mean_e2,max_e2,mean_e3,max_e3,mean_gamma,status\n");
    for r in rows {
        let status = r.error.as_deref().map_or("ok".to_string(), |e| format!("failed: {}", e.replace([',', '\n'], ";")));
        let _ = writeln!(s, "{},{},{},{},{},{},{}", r.value, r.mean_e2, r.max_e2, r.mean_e3, r.max_e3, r.mean_gamma, status);
    }
    s
}

/// Residual norm, solution norm and GCV value over a parameter grid.
pub fn reg_trace_csv(spectral: &Spectral, grid: &[f64], chosen: f64) -> String {
    let mut s = String::from("gamma,residual_norm,solution_norm,gcv,chosen\n");
    for &g in grid {
        let gcv = spectral.gcv(g).unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            g,
            spectral.residual2(g).sqrt(),
            spectral.solution2(g).sqrt(),
            gcv,
            u8::from(g == chosen)
        );
    }
    s
}

pub fn data_csv(samples: &[CauchySample]) -> String {
    let mut s = String::from("path,x,y,nx,ny,t,h1,h1_t,h2\n");
    for d in samples {
        for (i, tp) in d.trace.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                d.path_id, tp.x[0], tp.x[1], tp.normal[0], tp.normal[1], tp.t, d.h1[i], d.h1_t[i], d.h2[i]
            );
        }
    }
    s
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'a str,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a super::metrics::Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failures: Option<&'a [super::ensemble::PathFailure]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_axis: Option<SweepAxis>,
    files: Vec<String>,
}

/// Writes fields, E2, E3 and per-path tables plus a manifest. Returns the paths written.
pub fn write_ensemble(dir: &Path, run: &EnsembleRun) -> Result<Vec<PathBuf>> {
    let cfg = &run.report.config;
    let tables = [
        ("fields", fields_csv(run)),
        ("e2", e2_csv(run)),
        ("e3", e3_csv(run)),
        ("paths", paths_csv(&run.report)),
    ];
    let mut out = Vec::new();
    for (kind, body) in &tables {
        out.push(write_file(dir, &file_name(cfg, kind, "csv"), body)?);
    }
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind: "ensemble",
        config: cfg,
        summary: Some(&run.report.metrics.summary),
        failures: Some(&run.report.failures),
        sweep_axis: None,
        files: out.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
    };
    out.push(write_file(dir, &file_name(cfg, "manifest", "json"), &serde_json::to_string_pretty(&m)?)?);
    Ok(out)
}

pub fn write_sweep(dir: &Path, config: &ExperimentConfig, axis: SweepAxis, rows: &[SweepRow]) -> Result<Vec<PathBuf>> {
    let kind = format!("sweep-{axis}");
    let table = write_file(dir, &file_name(config, &kind, "csv"), &sweep_csv(axis, rows))?;
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind: &kind,
        config,
        summary: None,
        failures: None,
        sweep_axis: Some(axis),
        files: vec![table.file_name().unwrap().to_string_lossy().into_owned()],
    };
    let manifest = write_file(dir, &file_name(config, &format!("{kind}-manifest"), "json"), &serde_json::to_string_pretty(&m)?)?;
    Ok(vec![table, manifest])
}

pub fn write_table(dir: &Path, config: &ExperimentConfig, kind: &str, body: &str) -> Result<PathBuf> {
    write_file(dir, &file_name(config, kind, "csv"), body)
}

/// Hash of every config field that affects the generated data.
pub fn data_key(config: &ExperimentConfig) -> String {
    #[derive(Serialize)]
    struct Key<'a> {
        example: super::examples::ExampleId,
        n_paths: usize,
        delta: f64,
        seed: u64,
        b4_on: bool,
        noise_target: crate::stochastic::NoiseTarget,
        forward: &'a super::config::ForwardConfig,
        trace_nb: usize,
        trace_nt: usize,
    }
    let k = Key {
        example: config.example,
        n_paths: config.n_paths,
        delta: config.delta,
        seed: config.seed,
        b4_on: config.b4_on,
        noise_target: config.noise_target,
        forward: &config.forward,
        trace_nb: config.trace_nb,
        trace_nt: config.trace_nt,
    };
    let digest = Sha256::digest(serde_json::to_vec(&k).expect("key serializes"));
    digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
}

const MAGIC: &[u8; 8] = b"CWDATA01";

/// Per-path Cauchy data or the error that prevented it.
pub type CachedData = Vec<std::result::Result<CauchySample, String>>;

pub fn cache_path(dir: &Path, config: &ExperimentConfig) -> PathBuf {
    dir.join("cache").join(format!("{}_{}.bin", config.example, data_key(config)))
}

pub fn save_cache(dir: &Path, config: &ExperimentConfig, data: &CachedData) -> Result<PathBuf> {
    let path = cache_path(dir, config);
    fs::create_dir_all(path.parent().expect("cache file has a parent"))?;
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(data.len() as u64).to_le_bytes());
    for entry in data {
        match entry {
            Ok(d) => {
                buf.push(1);
                for v in [d.path_id, d.n_b as u64, d.n_t as u64] {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
                buf.extend_from_slice(&d.delta.to_le_bytes());
                for arr in [&d.h1, &d.h1_t, &d.h2] {
                    for v in arr.iter() {
                        buf.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
            Err(msg) => {
                buf.push(0);
                buf.extend_from_slice(&(msg.len() as u64).to_le_bytes());
                buf.extend_from_slice(msg.as_bytes());
            }
        }
    }
    fs::File::create(&path)?.write_all(&buf)?;
    Ok(path)
}

/// Cached data for `config`, or `None` if no cache exists.
pub fn load_cache(dir: &Path, config: &ExperimentConfig) -> Result<Option<CachedData>> {
    let path = cache_path(dir, config);
    let mut buf = Vec::new();
    match fs::File::open(&path) {
        Ok(mut f) => f.read_to_end(&mut buf)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = || Error::invalid(format!("corrupt data cache {}", path.display()));
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = buf.get(pos..pos + n).ok_or_else(corrupt)?;
        pos += n;
        Ok(s)
    };
    if take(8)? != MAGIC {
        return Err(corrupt());
    }
    let u64_at = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
    let count = u64_at(take(8)?) as usize;
    let domain = config.example.domain();
    let trace = trace_grid(&domain, config.trace_nb, config.trace_nt)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let tag = take(1)?[0];
        if tag == 0 {
            let len = u64_at(take(8)?) as usize;
            out.push(Err(String::from_utf8_lossy(take(len)?).into_owned()));
            continue;
        }
        let path_id = u64_at(take(8)?);
        let n_b = u64_at(take(8)?) as usize;
        let n_t = u64_at(take(8)?) as usize;
        let delta = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let n = n_b * n_t;
        if n != trace.len() {
            return Err(corrupt());
        }
        let mut arrays = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for a in arrays.iter_mut() {
            for _ in 0..n {
                a.push(f64::from_le_bytes(take(8)?.try_into().expect("8 bytes")));
            }
        }
        let [h1, h1_t, h2] = arrays;
        out.push(Ok(CauchySample { trace: trace.clone(), n_b, n_t, h1, h1_t, h2, path_id, delta }));
    }
    Ok(Some(out))
}
