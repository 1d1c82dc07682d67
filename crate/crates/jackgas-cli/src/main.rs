//! Command-line driver: sampling runs with reproducible manifests,
//! density/rate-function tabulation for plotting, and the verification
//! suites. Configuration comes from an optional JSON file with flag
//! overrides (flags win). All numeric output is serialized with 17
//! significant digits so downstream comparisons are stable.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 configuration
//! or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use jackgas::asymptotics::{
    clt_covariance, clt_covariance_series, edge_compare, edge_rate, gbe_sample, global_energy,
    global_rate,
};
use jackgas::ensemble::{build_model, normalization_closed_form, Case, CaseParams};
use jackgas::equilibrium::{band_endpoints, nu_density, EquilibriumDensity};
use jackgas::error::Error;
use jackgas::mcmc::{run_chains, ChainConfig, EmpiricalMeasure, InitState};
use jackgas::oracle::{run_suite, Suite};
use jackgas::partition::Partition;
use jackgas::poly::Poly;

#[derive(Parser)]
#[command(name = "jackgas", version, about = "Jack measures as discrete beta-ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Model parameters; every flag overrides the JSON config when both are
/// present.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// JSON config with the same field names as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Case label: I, II, III, IV, V or VI.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Ratio m = M/N (lowercase).
    #[arg(long)]
    m: Option<f64>,
    /// Explicit count M (uppercase; wins over the ratio).
    #[arg(long = "M")]
    m_count: Option<u64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    t2: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    /// Box multiplier d for Cases IV-VI.
    #[arg(long)]
    d: Option<u64>,
    /// Explicit box column bound R.
    #[arg(long)]
    r_box: Option<u64>,
    /// Cutoff ratio R/K for the unbounded Cases I and III.
    #[arg(long)]
    r_factor: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<CaseParams, Error> {
        let mut p: CaseParams = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => {
                let case = self
                    .case
                    .as_deref()
                    .ok_or_else(|| Error::Config("--case is required without --config".into()))?
                    .parse::<Case>()?;
                let theta = self
                    .theta
                    .ok_or_else(|| Error::Config("--theta is required without --config".into()))?;
                let n = self.n.unwrap_or(200);
                CaseParams::new(case, theta, n)
            }
        };
        if let Some(case) = &self.case {
            p.case = case.parse()?;
        }
        if let Some(theta) = self.theta {
            p.theta = theta;
        }
        if let Some(a) = self.a {
            p.a = Some(a);
        }
        if let Some(b) = self.b {
            p.b = Some(b);
        }
        if let Some(m) = self.m {
            p.m_ratio = Some(m);
        }
        if let Some(m) = self.m_count {
            p.m_count = Some(m);
        }
        if let Some(t) = self.t {
            p.t = Some(t);
        }
        if let Some(t1) = self.t1 {
            p.t1 = Some(t1);
        }
        if let Some(t2) = self.t2 {
            p.t2 = Some(t2);
        }
        if let Some(n) = self.n {
            p.n = n;
        }
        if let Some(d) = self.d {
            p.d = Some(d);
        }
        if let Some(r) = self.r_box {
            p.r_box = Some(r);
        }
        if let Some(r) = self.r_factor {
            p.r_factor = Some(r);
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
struct ChainArgs {
    #[arg(long, default_value_t = 12_000)]
    sweeps: u64,
    #[arg(long, default_value_t = 2_000)]
    burnin: u64,
    #[arg(long, default_value_t = 20)]
    thin: u64,
    #[arg(long, default_value_t = 1)]
    chains: u64,
    #[arg(long, default_value_t = 20260809)]
    seed: u64,
    /// Start from the full rectangle instead of the empty partition.
    #[arg(long)]
    top_start: bool,
}

impl ChainArgs {
    fn config(&self) -> ChainConfig {
        let init = if self.top_start { InitState::FullBox } else { InitState::Empty };
        ChainConfig {
            sweeps: self.sweeps,
            burnin: self.burnin,
            thin: self.thin,
            seed: self.seed,
            chains: self.chains,
            init,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run Metropolis chains and write samples plus a run manifest.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
        /// Output CSV (chain, sweep, lambda).
        #[arg(long, default_value = "samples.csv")]
        out: PathBuf,
        /// Manifest path.
        #[arg(long, default_value = "manifest.json")]
        manifest: PathBuf,
    },
    /// Tabulate the equilibrium particle density on a grid.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value = "density.csv")]
        out: PathBuf,
        /// Band endpoints and region labels (JSON); stdout when omitted.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Tabulate the global (shifted) limit density on a grid.
    NuDensity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long)]
        xmin: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long, default_value = "nu_density.csv")]
        out: PathBuf,
    },
    /// Run the exact verification suites.
    Verify {
        /// all | jack | normalization | pmf | moments | nekrasov
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 6)]
        max_degree: u64,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CLT covariance of two polynomial statistics (Case II).
    CltCov {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated coefficients of f, constant first.
        #[arg(long, default_value = "0,1")]
        f_coeffs: String,
        /// Comma-separated coefficients of g; defaults to f.
        #[arg(long)]
        g_coeffs: Option<String>,
        #[arg(long, default_value_t = 2048)]
        nodes: usize,
    },
    /// Edge large-deviation rate function at a point (Case II).
    EdgeRate {
        #[command(flatten)]
        model: ModelArgs,
        /// Evaluation point t in [theta, m + theta).
        #[arg(long)]
        point: f64,
    },
    /// Global energy of a density (Case II): E_V and the rate.
    Energy {
        #[command(flatten)]
        model: ModelArgs,
        /// CSV of (x, density) rows; equilibrium density when omitted.
        #[arg(long)]
        density_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
    },
    /// Edge-fluctuation comparison against the Gaussian beta-ensemble.
    EdgeCompare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
        /// Independent GbetaE draws (defaults to the chain count).
        #[arg(long)]
        draws: Option<u64>,
    },
    /// KS distance of a sample file against the equilibrium density.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        samples: PathBuf,
    },
}

/// 17-significant-digit decimal serialization.
fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn sha256_hex(path: &Path) -> Result<String, Error> {
    let bytes =
        fs::read(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize)]
struct OutputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    params: &'a CaseParams,
    chain: &'a ChainConfig,
    seed: u64,
    tool_version: &'static str,
    wall_clock_secs: f64,
    acceptance_rates: Vec<f64>,
    normalization_log_closed_form: f64,
    outputs: Vec<OutputDigest>,
}

fn parse_poly(spec: &str) -> Result<Poly, Error> {
    let coeffs: Result<Vec<f64>, _> =
        spec.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
    coeffs
        .map(Poly::new)
        .map_err(|e| Error::Config(format!("bad coefficient list {spec:?}: {e}")))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn lambda_field(lam: &Partition) -> String {
    lam.parts().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_lambda_field(field: &str) -> Result<Partition, Error> {
    let parts: Result<Vec<u32>, _> =
        field.split_whitespace().map(|tok| tok.parse::<u32>()).collect();
    let parts = parts.map_err(|e| Error::Config(format!("bad lambda field {field:?}: {e}")))?;
    Partition::new(parts)
}

fn cmd_sample(
    model_args: &ModelArgs,
    chain_args: &ChainArgs,
    out: &Path,
    manifest_path: &Path,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let model = build_model(&params)?;
    let cfg = chain_args.config();
    let start = Instant::now();
    let outputs = run_chains(&model, &cfg)?;
    let mut csv = String::from("chain,sweep,lambda\n");
    for chain in &outputs {
        for (sweep, lam) in &chain.samples {
            csv.push_str(&format!("{},{},{}\n", chain.chain, sweep, lambda_field(lam)));
        }
    }
    write_text(out, &csv)?;
    let manifest = RunManifest {
        params: &params,
        chain: &cfg,
        seed: cfg.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_clock_secs: start.elapsed().as_secs_f64(),
        acceptance_rates: outputs.iter().map(|c| c.accept_rate).collect(),
        normalization_log_closed_form: normalization_closed_form(&params)?,
        outputs: vec![OutputDigest {
            path: out.display().to_string(),
            sha256: sha256_hex(out)?,
        }],
    };
    write_text(manifest_path, &serde_json::to_string_pretty(&manifest).unwrap())?;
    eprintln!(
        "wrote {} samples from {} chain(s) to {} (K = {}, R = {})",
        outputs.iter().map(|c| c.samples.len()).sum::<usize>(),
        cfg.chains,
        out.display(),
        model.k(),
        model.r(),
    );
    Ok(0)
}

fn cmd_density(
    model_args: &ModelArgs,
    grid: usize,
    out: &Path,
    meta: Option<&Path>,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let density = EquilibriumDensity::new(&params)?;
    let edge = density.info().right_edge;
    let mut csv = String::from("x,density\n");
    for i in 0..grid {
        let x = edge * i as f64 / (grid - 1).max(1) as f64;
        csv.push_str(&format!("{},{}\n", g17(x), g17(density.density(x))));
    }
    write_text(out, &csv)?;
    let info = band_endpoints(&params)?;
    let meta_json = serde_json::to_string_pretty(&info).unwrap();
    match meta {
        Some(path) => write_text(path, &meta_json)?,
        None => println!("{meta_json}"),
    }
    Ok(0)
}

fn cmd_nu_density(
    model_args: &ModelArgs,
    grid: usize,
    xmin: Option<f64>,
    xmax: Option<f64>,
    out: &Path,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    // Default window: from just below the saturation threshold (the
    // density is identically 1/theta further left) to just past the top
    // of the support.
    let cap = 1.0 / params.theta;
    let probe: Vec<f64> = (0..2000).map(|i| -20.0 + i as f64 * 0.02).collect();
    let lo = xmin.unwrap_or_else(|| {
        probe
            .iter()
            .copied()
            .find(|&x| {
                nu_density(&params, x).map(|v| v < cap * (1.0 - 1e-9)).unwrap_or(false)
            })
            .unwrap_or(-5.0)
            - 1.0
    });
    let hi = xmax.unwrap_or_else(|| {
        probe
            .iter()
            .rev()
            .copied()
            .find(|&x| nu_density(&params, x).map(|v| v > 0.0).unwrap_or(false))
            .unwrap_or(5.0)
            + 0.5
    });
    let mut csv = String::from("x,density\n");
    for i in 0..grid {
        let x = lo + (hi - lo) * i as f64 / (grid - 1).max(1) as f64;
        csv.push_str(&format!("{},{}\n", g17(x), g17(nu_density(&params, x)?)));
    }
    write_text(out, &csv)?;
    Ok(0)
}

fn cmd_verify(suite: &str, max_degree: u64, out: Option<&Path>) -> Result<i32, Error> {
    let suite: Suite = suite.parse()?;
    let reports = run_suite(suite, max_degree)?;
    let json = serde_json::to_string_pretty(&reports).unwrap();
    match out {
        Some(path) => write_text(path, &json)?,
        None => println!("{json}"),
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

#[derive(Serialize)]
struct ValueReport {
    value: f64,
    error_estimate: f64,
    nodes: usize,
}

fn cmd_clt_cov(
    model_args: &ModelArgs,
    f_spec: &str,
    g_spec: Option<&str>,
    nodes: usize,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let f = parse_poly(f_spec)?;
    let g = match g_spec {
        Some(spec) => parse_poly(spec)?,
        None => f.clone(),
    };
    let result = clt_covariance(&f, &g, &params, nodes)?;
    let series = clt_covariance_series(&f, &g, &params)?;
    let json = serde_json::json!({
        "value": result.value,
        "error_estimate": result.error_estimate,
        "nodes": result.nodes,
        "imaginary_residue": result.imaginary_residue,
        "series_oracle": series,
        "degenerate_band": result.degenerate,
    });
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    Ok(0)
}

fn cmd_edge_rate(model_args: &ModelArgs, t: f64) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let value = edge_rate(t, &params)?;
    let report = ValueReport { value, error_estimate: 1e-11, nodes: 0 };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(0)
}

fn cmd_energy(
    model_args: &ModelArgs,
    density_csv: Option<&Path>,
    cells: usize,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let (e_v, rate) = match density_csv {
        None => {
            let eq = EquilibriumDensity::new(&params)?;
            let e = global_energy(|x| eq.density(x), &params, cells)?;
            (e, 0.0)
        }
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for line in text.lines().skip(1) {
                let mut cols = line.split(',');
                let (Some(x), Some(y)) = (cols.next(), cols.next()) else { continue };
                xs.push(x.trim().parse::<f64>().map_err(|e| Error::Config(e.to_string()))?);
                ys.push(y.trim().parse::<f64>().map_err(|e| Error::Config(e.to_string()))?);
            }
            if xs.len() < 2 {
                return Err(Error::Config("density CSV needs at least two rows".into()));
            }
            let interp = move |x: f64| -> f64 {
                match xs.binary_search_by(|v| v.total_cmp(&x)) {
                    Ok(i) => ys[i],
                    Err(0) => 0.0,
                    Err(i) if i >= xs.len() => 0.0,
                    Err(i) => {
                        let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                        ys[i - 1] * (1.0 - w) + ys[i] * w
                    }
                }
            };
            let e = global_energy(&interp, &params, cells)?;
            let rate = global_rate(&interp, &params, cells)?;
            (e, rate)
        }
    };
    let json = serde_json::json!({
        "energy": e_v,
        "rate": rate,
        "cells": cells,
    });
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    Ok(0)
}

fn cmd_edge_compare(
    model_args: &ModelArgs,
    chain_args: &ChainArgs,
    draws: Option<u64>,
) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    if params.theta < 0.5 {
        eprintln!(
            "warning: beta = 2 theta = {} is below 1; the cited edge-universality \
             regime needs beta >= 1",
            2.0 * params.theta
        );
    }
    let model = build_model(&params)?;
    let cfg = chain_args.config();
    let outputs = run_chains(&model, &cfg)?;
    let n = params.n;
    let mut tops = Vec::new();
    for chain in &outputs {
        if let Some((_, lam)) = chain.samples.last() {
            let ell1 = lam.row(1) as f64 + (model.k() as f64 - 1.0) * model.theta();
            tops.push(ell1 / n as f64);
        }
    }
    let draws = draws.unwrap_or(cfg.chains);
    let beta = 2.0 * params.theta;
    let mut gbe_tops = Vec::new();
    for i in 0..draws {
        gbe_tops.push(gbe_sample(n as usize, beta, cfg.seed ^ (0x9e37_79b9 + i))?[0]);
    }
    let ks = edge_compare(&params, n, &tops, &gbe_tops)?;
    let json = serde_json::json!({
        "ks": ks,
        "chains": tops.len(),
        "gbe_draws": gbe_tops.len(),
        "beta": beta,
    });
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    Ok(0)
}

fn cmd_compare(model_args: &ModelArgs, samples_path: &Path) -> Result<i32, Error> {
    let params = model_args.resolve()?;
    let model = build_model(&params)?;
    let density = EquilibriumDensity::new(&params)?;
    let text = fs::read_to_string(samples_path)
        .map_err(|e| Error::Config(format!("{}: {e}", samples_path.display())))?;
    let mut samples = Vec::new();
    for line in text.lines().skip(1) {
        let Some(field) = line.split(',').nth(2) else { continue };
        samples.push(parse_lambda_field(field)?);
    }
    let emp = EmpiricalMeasure::from_samples(&model, &samples, model.k() as f64)?;
    let ks = emp.ks_distance(|x| density.cdf(x));
    let json = serde_json::json!({
        "ks": ks,
        "samples": emp.sample_count(),
        "pooled_positions": emp.positions().len(),
    });
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Sample { model, chain, out, manifest } => {
            cmd_sample(model, chain, out, manifest)
        }
        Command::Density { model, grid, out, meta } => {
            cmd_density(model, *grid, out, meta.as_deref())
        }
        Command::NuDensity { model, grid, xmin, xmax, out } => {
            cmd_nu_density(model, *grid, *xmin, *xmax, out)
        }
        Command::Verify { suite, max_degree, out } => {
            cmd_verify(suite, *max_degree, out.as_deref())
        }
        Command::CltCov { model, f_coeffs, g_coeffs, nodes } => {
            cmd_clt_cov(model, f_coeffs, g_coeffs.as_deref(), *nodes)
        }
        Command::EdgeRate { model, point } => cmd_edge_rate(model, *point),
        Command::Energy { model, density_csv, cells } => {
            cmd_energy(model, density_csv.as_deref(), *cells)
        }
        Command::EdgeCompare { model, chain, draws } => cmd_edge_compare(model, chain, *draws),
        Command::Compare { model, samples } => cmd_compare(model, samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
