//! `schmidtlab` — biphoton Schmidt-decomposition toolbox.
//!
//! Deterministic CSV/JSON emission of derived kernel parameters, Schmidt and
//! spiral spectra, entanglement entropies, parameter sweeps, detection-loss
//! retention curves, mode-field samples, HG→LG conversion blocks, and an
//! independent numerical verification report.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use schmidtlab::entropy::{
    self, DetectionScenario, EntropyReport, RetentionModel, VnApproxForm,
};
use schmidtlab::modes::{hg_2d, lg, ModeIndex, ModeScale};
use schmidtlab::oracle::{
    kernel_svd_1d, numeric_k_cartesian, radial_kernel_svd, verify_hardy_hille, verify_mehler,
};
use schmidtlab::spdc::{DerivedParams, PumpCrystalParams};
use schmidtlab::spectrum::{build_spectrum, hg_to_lg_block, Basis, Truncation};

use output::{fmt_f64, json_document, manifest, units, write_output, Csv, Json};

#[derive(Parser)]
#[command(name = "schmidtlab", version, about = "Schmidt-decomposition analysis of down-converted photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Cartesian,
    Polar,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::Cartesian => Basis::Cartesian,
            BasisArg::Polar => Basis::Polar,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    ApproxEq21,
    ExactSpectrum,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Derive all kernel parameters from physical or reduced inputs.
    Derive(DeriveArgs),
    /// Emit the Schmidt spectrum up to a truncation.
    Spectrum(SpectrumArgs),
    /// Schmidt number and entropies at one parameter point.
    Entropy(EntropyArgs),
    /// Entropy-vs-bσ sweep (CSV).
    Sweep(SweepArgs),
    /// Retained fraction of shared bits under non-ideal detection (CSV).
    Retention(RetentionArgs),
    /// Sample one transverse mode on a grid (CSV).
    Modes(ModesArgs),
    /// Run the numerical oracles; exit 1 if any tolerance is missed.
    Verify(VerifyArgs),
    /// Emit one HG→LG conversion block.
    Convert(ConvertArgs),
}

#[derive(clap::Args)]
struct DeriveArgs {
    /// Pump waist w_p in meters (with --pump-wavelength and --crystal-length).
    #[arg(long, requires = "pump_wavelength", requires = "crystal_length")]
    pump_waist: Option<f64>,
    /// Pump vacuum wavelength in meters.
    #[arg(long, requires = "pump_waist")]
    pump_wavelength: Option<f64>,
    /// Crystal length L in meters.
    #[arg(long, requires = "pump_waist")]
    crystal_length: Option<f64>,
    /// Residual phase mismatch Φ (with physical inputs only).
    #[arg(long, requires = "pump_waist")]
    phase_offset: Option<f64>,
    /// Dimensionless control parameter bσ.
    #[arg(long, conflicts_with_all = ["pump_waist", "b", "sigma"])]
    b_sigma: Option<f64>,
    /// Mode width Γ in meters accompanying --b-sigma.
    #[arg(long, requires = "b_sigma")]
    gamma: Option<f64>,
    /// Kernel width b in meters (with --sigma).
    #[arg(long, requires = "sigma", conflicts_with = "pump_waist")]
    b: Option<f64>,
    /// Pump spectral width σ in inverse meters.
    #[arg(long, requires = "b")]
    sigma: Option<f64>,
}

#[derive(clap::Args)]
struct SpectrumArgs {
    #[arg(long)]
    b_sigma: f64,
    #[arg(long, value_enum, default_value = "cartesian")]
    basis: BasisArg,
    /// Keep all modes of order <= N.
    #[arg(long, conflicts_with = "tail")]
    max_order: Option<u32>,
    /// Truncate at the smallest order with tail mass <= this.
    #[arg(long)]
    tail: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EntropyArgs {
    #[arg(long, conflicts_with = "k")]
    b_sigma: Option<f64>,
    /// Schmidt number; resolved to the bσ <= 1 branch.
    #[arg(long)]
    k: Option<f64>,
    /// Comma-separated Rényi orders (each > 0, != 1).
    #[arg(long, default_value = "0.5,2,3", value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    b_sigma_min: f64,
    #[arg(long)]
    b_sigma_max: f64,
    #[arg(long)]
    points: usize,
    /// Log-spaced grid instead of linear.
    #[arg(long)]
    log: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RetentionArgs {
    /// Comma-separated detection fractions η = K_eff/K in (0, 1].
    #[arg(long, default_value = "0.5", value_delimiter = ',')]
    eta: Vec<f64>,
    /// K grid as MIN:MAX:POINTS (log-spaced).
    #[arg(long, conflicts_with = "b_sigma_range")]
    k_range: Option<String>,
    /// bσ grid as MIN:MAX:POINTS (log-spaced).
    #[arg(long)]
    b_sigma_range: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    model: ModelArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ModesArgs {
    #[arg(long, value_enum)]
    basis: BasisArg,
    /// Cartesian indices.
    #[arg(long, conflicts_with_all = ["ell", "p"])]
    m: Option<u32>,
    #[arg(long, requires = "m")]
    n: Option<u32>,
    /// Polar indices.
    #[arg(long)]
    ell: Option<i32>,
    #[arg(long, requires = "ell")]
    p: Option<u32>,
    /// Mode width Γ (inverse transverse-momentum units).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Half-width of the sampled square; default 4/Γ.
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    b_sigma: f64,
    /// Nyström grid size.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Number of leading singular values compared per kernel.
    #[arg(long, default_value_t = 10)]
    modes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ConvertArgs {
    /// Mode order N of the block.
    #[arg(long)]
    order: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("SCHMIDTLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: SCHMIDTLAB_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Derive(a) => cmd_derive(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Retention(a) => cmd_retention(a),
        Command::Modes(a) => cmd_modes(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn lib_err(e: schmidtlab::Error) -> String {
    e.to_string()
}

fn cmd_derive(a: DeriveArgs) -> Result<u8, String> {
    let mut params = Json::obj();
    let dp = if let Some(w) = a.pump_waist {
        let (wl, l) = (
            a.pump_wavelength.expect("clap requires"),
            a.crystal_length.expect("clap requires"),
        );
        let mut pc = PumpCrystalParams::from_wavelength(w, wl, l).map_err(lib_err)?;
        if let Some(phi) = a.phase_offset {
            pc = pc.with_phase_offset(phi).map_err(lib_err)?;
        }
        params.push("pump_waist", Json::Num(w));
        params.push("pump_wavelength", Json::Num(wl));
        params.push("crystal_length", Json::Num(l));
        params.push("phase_offset", Json::Num(pc.phase_offset));
        DerivedParams::from_pump_crystal(&pc).map_err(lib_err)?
    } else if let Some(bs) = a.b_sigma {
        let gamma = a.gamma.unwrap_or(1.0);
        params.push("b_sigma", Json::Num(bs));
        params.push("gamma", Json::Num(gamma));
        DerivedParams::from_reduced(bs, gamma).map_err(lib_err)?
    } else if let Some(b) = a.b {
        let sigma = a.sigma.expect("clap requires");
        params.push("b", Json::Num(b));
        params.push("sigma", Json::Num(sigma));
        DerivedParams::from_b_sigma_pair(b, sigma).map_err(lib_err)?
    } else {
        return Err(
            "derive needs one input set: --pump-waist/--pump-wavelength/--crystal-length, \
             --b-sigma [--gamma], or --b --sigma"
                .into(),
        );
    };

    let k = entropy::schmidt_number(dp.b_sigma).map_err(lib_err)?;
    let mut payload = Json::obj();
    payload.push("b", Json::Num(dp.b));
    payload.push("sigma", Json::Num(dp.sigma));
    payload.push("b_sigma", Json::Num(dp.b_sigma));
    payload.push(
        "rayleigh_range",
        dp.rayleigh_range.map_or(Json::Null, Json::Num),
    );
    payload.push("gamma", Json::Num(dp.gamma));
    payload.push("mu", Json::Num(dp.mu));
    payload.push("mu_signed", Json::Num(dp.mu_signed));
    payload.push("g_param", Json::Num(dp.g_param));
    payload.push("eta_a", Json::Num(dp.eta_a));
    payload.push("norm", Json::Num(dp.norm));
    payload.push("k", Json::Num(k));
    let u = units(&[
        ("b", "m"),
        ("sigma", "1/m"),
        ("b_sigma", "dimensionless"),
        ("rayleigh_range", "m"),
        ("gamma", "m"),
        ("mu", "dimensionless"),
        ("mu_signed", "dimensionless"),
        ("g_param", "m^2"),
        ("eta_a", "dimensionless"),
        ("norm", "1/m^2"),
        ("k", "dimensionless"),
    ]);
    write_output(None, &json_document("derive", params, payload, u), None)?;
    Ok(0)
}

fn spectrum_params(a: &SpectrumArgs, trunc: &Truncation) -> Json {
    let mut params = Json::obj();
    params.push("b_sigma", Json::Num(a.b_sigma));
    params.push(
        "basis",
        Json::Str(match a.basis {
            BasisArg::Cartesian => "cartesian".into(),
            BasisArg::Polar => "polar".into(),
        }),
    );
    match trunc {
        Truncation::MaxOrder(n) => params.push("max_order", Json::Int(i64::from(*n))),
        Truncation::TailMass(e) => params.push("tail", Json::Num(*e)),
    };
    params
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<u8, String> {
    let trunc = match (a.max_order, a.tail) {
        (Some(n), None) => Truncation::MaxOrder(n),
        (None, Some(e)) => Truncation::TailMass(e),
        (None, None) => Truncation::TailMass(1e-12),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let spectrum = build_spectrum(a.b_sigma, a.basis.into(), trunc).map_err(lib_err)?;
    let params = spectrum_params(&a, &trunc);

    let total: f64 = spectrum.entries.iter().map(|(_, l)| l).sum();
    match a.format {
        FormatArg::Csv => {
            let (h1, h2) = match spectrum.basis {
                Basis::Cartesian => ("m", "n"),
                Basis::Polar => ("ell", "p"),
            };
            let mut csv = Csv::new(&[h1, h2, "order", "lambda", "cumulative_mass"]);
            let mut cum = 0.0;
            for &(index, lambda) in &spectrum.entries {
                cum += lambda;
                let (i, j) = match index {
                    ModeIndex::Cartesian { m, n } => (i64::from(m), i64::from(n)),
                    ModeIndex::Polar { ell, p } => (i64::from(ell), i64::from(p)),
                };
                csv.row(&[
                    i.to_string(),
                    j.to_string(),
                    index.order().to_string(),
                    fmt_f64(lambda),
                    fmt_f64(cum),
                ]);
            }
            // Footer: closed-form mass of everything beyond the truncation.
            csv.row(&[
                String::new(),
                String::new(),
                "tail".into(),
                fmt_f64(spectrum.tail_mass),
                fmt_f64(total + spectrum.tail_mass),
            ]);
            let body = csv.into_text();
            let man = manifest("spectrum", params, body.as_bytes());
            write_output(a.out.as_deref(), &body, Some(&man))?;
        }
        FormatArg::Json => {
            let mut entries = Vec::with_capacity(spectrum.entries.len());
            for &(index, lambda) in &spectrum.entries {
                let mut e = Json::obj();
                match index {
                    ModeIndex::Cartesian { m, n } => {
                        e.push("m", Json::Int(i64::from(m)));
                        e.push("n", Json::Int(i64::from(n)));
                    }
                    ModeIndex::Polar { ell, p } => {
                        e.push("ell", Json::Int(i64::from(ell)));
                        e.push("p", Json::Int(i64::from(p)));
                    }
                }
                e.push("order", Json::Int(i64::from(index.order())));
                e.push("lambda", Json::Num(lambda));
                entries.push(e);
            }
            let mut payload = Json::obj();
            payload.push("b_sigma", Json::Num(spectrum.b_sigma));
            payload.push("max_order", Json::Int(i64::from(spectrum.max_order)));
            payload.push("entries", Json::Arr(entries));
            payload.push("total_mass", Json::Num(total));
            payload.push("tail_mass", Json::Num(spectrum.tail_mass));
            let u = units(&[
                ("b_sigma", "dimensionless"),
                ("lambda", "probability"),
                ("tail_mass", "probability"),
            ]);
            let body = json_document("spectrum", params, payload, u);
            write_output(a.out.as_deref(), &body, None)?;
        }
    }
    Ok(0)
}

fn cmd_entropy(a: EntropyArgs) -> Result<u8, String> {
    let (b_sigma, mut params) = match (a.b_sigma, a.k) {
        (Some(bs), None) => {
            let mut p = Json::obj();
            p.push("b_sigma", Json::Num(bs));
            (bs, p)
        }
        (None, Some(k)) => {
            let mut p = Json::obj();
            p.push("k", Json::Num(k));
            (entropy::bsigma_from_k(k).map_err(lib_err)?, p)
        }
        _ => return Err("entropy needs exactly one of --b-sigma or --k".into()),
    };
    params.push(
        "alpha",
        Json::Arr(a.alpha.iter().map(|&x| Json::Num(x)).collect()),
    );
    let report = EntropyReport::new(b_sigma, &a.alpha).map_err(lib_err)?;

    let mut renyi = Vec::with_capacity(report.renyi.len());
    for &(alpha, h) in &report.renyi {
        let mut e = Json::obj();
        e.push("alpha", Json::Num(alpha));
        e.push("h_bits", Json::Num(h));
        renyi.push(e);
    }
    let mut payload = Json::obj();
    payload.push("b_sigma", Json::Num(report.b_sigma));
    payload.push("k", Json::Num(report.k));
    payload.push("renyi", Json::Arr(renyi));
    payload.push("s_exact", Json::Num(report.s_exact));
    payload.push("s_approx_eq21", Json::Num(report.s_approx_eq21));
    payload.push("s_expansion_eq22", Json::Num(report.s_expansion_eq22));
    let u = units(&[
        ("b_sigma", "dimensionless"),
        ("k", "dimensionless"),
        ("h_bits", "bits"),
        ("s_exact", "bits"),
        ("s_approx_eq21", "bits"),
        ("s_expansion_eq22", "bits"),
    ]);
    let body = json_document("entropy", params, payload, u);
    write_output(a.out.as_deref(), &body, None)?;
    Ok(0)
}

fn grid_points(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>, String> {
    if !(min.is_finite() && max.is_finite() && min > 0.0) {
        return Err(format!("grid bounds must be positive and finite, got {min}..{max}"));
    }
    if min >= max {
        return Err(format!("grid minimum {min} must be below maximum {max}"));
    }
    if points < 2 {
        return Err(format!("need at least 2 grid points, got {points}"));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}

fn cmd_sweep(a: SweepArgs) -> Result<u8, String> {
    let grid = grid_points(a.b_sigma_min, a.b_sigma_max, a.points, a.log)?;
    let rows: Vec<Result<[f64; 5], String>> = grid
        .par_iter()
        .map(|&bs| {
            let k = entropy::schmidt_number(bs).map_err(lib_err)?;
            Ok([
                bs,
                k,
                entropy::von_neumann_exact(bs).map_err(lib_err)?,
                entropy::von_neumann_approx(k, VnApproxForm::Eq21).map_err(lib_err)?,
                entropy::von_neumann_approx(k, VnApproxForm::Eq22).map_err(lib_err)?,
            ])
        })
        .collect();
    let mut csv = Csv::new(&["b_sigma", "k", "s_exact", "s_approx_eq21", "s_expansion_eq22"]);
    for row in rows {
        let row = row?;
        csv.row(&row.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>());
    }
    let mut params = Json::obj();
    params.push("b_sigma_min", Json::Num(a.b_sigma_min));
    params.push("b_sigma_max", Json::Num(a.b_sigma_max));
    params.push("points", Json::Int(a.points as i64));
    params.push("log", Json::Bool(a.log));
    let body = csv.into_text();
    let man = manifest("sweep", params, body.as_bytes());
    write_output(a.out.as_deref(), &body, Some(&man))?;
    Ok(0)
}

fn parse_range(spec: &str, flag: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("{flag} must be MIN:MAX:POINTS, got {spec:?}"));
    }
    let min: f64 = parts[0].parse().map_err(|_| format!("{flag}: bad minimum {:?}", parts[0]))?;
    let max: f64 = parts[1].parse().map_err(|_| format!("{flag}: bad maximum {:?}", parts[1]))?;
    let points: usize = parts[2].parse().map_err(|_| format!("{flag}: bad point count {:?}", parts[2]))?;
    Ok((min, max, points))
}

fn cmd_retention(a: RetentionArgs) -> Result<u8, String> {
    for &eta in &a.eta {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(format!("eta values must lie in (0,1], got {eta}"));
        }
    }
    let ks: Vec<f64> = match (&a.k_range, &a.b_sigma_range) {
        (Some(spec), None) => {
            let (min, max, points) = parse_range(spec, "--k-range")?;
            if min < 1.0 {
                return Err(format!("--k-range minimum must be >= 1, got {min}"));
            }
            grid_points(min, max, points, true)?
        }
        (None, Some(spec)) => {
            let (min, max, points) = parse_range(spec, "--b-sigma-range")?;
            grid_points(min, max, points, true)?
                .into_iter()
                .map(|bs| entropy::schmidt_number(bs).map_err(lib_err))
                .collect::<Result<_, _>>()?
        }
        _ => return Err("retention needs exactly one of --k-range or --b-sigma-range".into()),
    };
    let models: Vec<RetentionModel> = match a.model {
        ModelArg::ApproxEq21 => vec![RetentionModel::ApproxEq21],
        ModelArg::ExactSpectrum => vec![RetentionModel::ExactSpectrum],
        ModelArg::Both => vec![RetentionModel::ApproxEq21, RetentionModel::ExactSpectrum],
    };
    let model_name = |m: RetentionModel| match m {
        RetentionModel::ApproxEq21 => "approx_eq21",
        RetentionModel::ExactSpectrum => "exact_spectrum",
    };
    let mut header: Vec<String> = vec!["b_sigma".into(), "k".into()];
    for &eta in &a.eta {
        for &m in &models {
            header.push(format!("retained_{}_eta_{}", model_name(m), eta));
        }
    }
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for &k in &ks {
        let mut row = vec![
            fmt_f64(entropy::bsigma_from_k(k).map_err(lib_err)?),
            fmt_f64(k),
        ];
        for &eta in &a.eta {
            for &m in &models {
                let scenario = DetectionScenario::new(eta, m).map_err(lib_err)?;
                // Below one effective mode the fraction is undefined; leave
                // the cell empty rather than abort the whole table.
                row.push(match entropy::retained_fraction(k, scenario) {
                    Ok(f) => fmt_f64(f),
                    Err(_) => String::new(),
                });
            }
        }
        csv.row(&row);
    }
    let mut params = Json::obj();
    params.push(
        "eta",
        Json::Arr(a.eta.iter().map(|&x| Json::Num(x)).collect()),
    );
    if let Some(spec) = &a.k_range {
        params.push("k_range", Json::Str(spec.clone()));
    }
    if let Some(spec) = &a.b_sigma_range {
        params.push("b_sigma_range", Json::Str(spec.clone()));
    }
    params.push(
        "model",
        Json::Str(
            match a.model {
                ModelArg::ApproxEq21 => "approx_eq21",
                ModelArg::ExactSpectrum => "exact_spectrum",
                ModelArg::Both => "both",
            }
            .into(),
        ),
    );
    let body = csv.into_text();
    let man = manifest("retention", params, body.as_bytes());
    write_output(a.out.as_deref(), &body, Some(&man))?;
    Ok(0)
}

fn cmd_modes(a: ModesArgs) -> Result<u8, String> {
    let scale = ModeScale::new(a.gamma).map_err(lib_err)?;
    if a.grid < 2 {
        return Err(format!("--grid must be at least 2, got {}", a.grid));
    }
    let extent = a.extent.unwrap_or(4.0 / a.gamma);
    if !(extent.is_finite() && extent > 0.0) {
        return Err(format!("--extent must be positive, got {extent}"));
    }
    let index = match a.basis {
        BasisArg::Cartesian => match (a.m, a.n) {
            (Some(m), Some(n)) => ModeIndex::Cartesian { m, n },
            _ => return Err("cartesian modes need --m and --n".into()),
        },
        BasisArg::Polar => match (a.ell, a.p) {
            (Some(ell), Some(p)) => ModeIndex::Polar { ell, p },
            _ => return Err("polar modes need --ell and --p".into()),
        },
    };
    let mut csv = Csv::new(&["q1", "q2", "re", "im"]);
    let step = 2.0 * extent / (a.grid - 1) as f64;
    for i in 0..a.grid {
        let x = -extent + step * i as f64;
        for j in 0..a.grid {
            let y = -extent + step * j as f64;
            let value = match index {
                ModeIndex::Cartesian { m, n } => {
                    num_complex_from(hg_2d(m, n, scale, x, y).map_err(lib_err)?)
                }
                ModeIndex::Polar { ell, p } => {
                    let rho = x.hypot(y);
                    let phi = y.atan2(x);
                    let v = lg(ell, p, scale, rho, phi).map_err(lib_err)?;
                    (v.re, v.im)
                }
            };
            csv.row(&[fmt_f64(x), fmt_f64(y), fmt_f64(value.0), fmt_f64(value.1)]);
        }
    }
    let mut params = Json::obj();
    match index {
        ModeIndex::Cartesian { m, n } => {
            params.push("basis", Json::Str("cartesian".into()));
            params.push("m", Json::Int(i64::from(m)));
            params.push("n", Json::Int(i64::from(n)));
        }
        ModeIndex::Polar { ell, p } => {
            params.push("basis", Json::Str("polar".into()));
            params.push("ell", Json::Int(i64::from(ell)));
            params.push("p", Json::Int(i64::from(p)));
        }
    }
    params.push("gamma", Json::Num(a.gamma));
    params.push("grid", Json::Int(a.grid as i64));
    params.push("extent", Json::Num(extent));
    let body = csv.into_text();
    let man = manifest("modes", params, body.as_bytes());
    write_output(a.out.as_deref(), &body, Some(&man))?;
    Ok(0)
}

fn num_complex_from(re: f64) -> (f64, f64) {
    (re, 0.0)
}

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, String> {
    let dp = DerivedParams::from_reduced(a.b_sigma, 1.0).map_err(lib_err)?;
    let mu = dp.mu;
    let mut checks: Vec<Check> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    // Cartesian 1D singular values vs sqrt(1-μ²) μⁿ.
    let cart = kernel_svd_1d(&dp, a.grid).map_err(lib_err)?;
    if let Some(w) = &cart.accuracy_warning {
        warnings.push(w.clone());
    }
    let amp = |n: u32| (1.0 - mu * mu).sqrt() * mu.powi(n as i32);
    let mut worst = 0.0f64;
    for n in 0..a.modes.min(cart.singular_values.len()) {
        let want = amp(n as u32);
        if want < 1e-12 {
            break;
        }
        worst = worst.max((cart.singular_values[n] - want).abs() / want);
    }
    checks.push(Check {
        name: "max_sv_rel_err_cartesian",
        value: worst,
        tolerance: 1e-6,
    });

    // Radial blocks ℓ ∈ {0, 1, 2} vs (1-μ²) μ^{2p+ℓ}, p <= 4.
    let radial_grid = a.grid.min(300);
    let mut worst_rad = 0.0f64;
    for ell in 0..=2u32 {
        let rad = radial_kernel_svd(ell, &dp, radial_grid).map_err(lib_err)?;
        for p in 0..=4usize {
            if p >= rad.singular_values.len() {
                break;
            }
            let want = (1.0 - mu * mu) * mu.powi((2 * p as u32 + ell) as i32);
            if want < 1e-12 {
                break;
            }
            worst_rad = worst_rad.max((rad.singular_values[p] - want).abs() / want);
        }
    }
    checks.push(Check {
        name: "max_sv_rel_err_radial",
        value: worst_rad,
        tolerance: 1e-6,
    });

    // Schmidt number: Nyström vs closed form. An oracle precision error
    // (grid too small to resolve the spectrum) is a failed check, not a
    // usage error, so it is recorded as an infinite residual.
    let k_exact = entropy::schmidt_number(a.b_sigma).map_err(lib_err)?;
    let k_rel_err = match numeric_k_cartesian(&cart) {
        Ok(k_numeric) => (k_numeric - k_exact).abs() / k_exact,
        Err(e) => {
            warnings.push(e.to_string());
            f64::INFINITY
        }
    };
    checks.push(Check {
        name: "numeric_k_rel_err",
        value: k_rel_err,
        tolerance: 1e-5,
    });

    // Identity residuals.
    checks.push(Check {
        name: "mehler_max_rel_err",
        value: verify_mehler(&dp, 200).map_err(lib_err)?,
        tolerance: 1e-9,
    });
    let mut hh = verify_hardy_hille(0, 0.5, 100)
        .map_err(lib_err)?
        .max(verify_hardy_hille(3, 0.7, 100).map_err(lib_err)?);
    if mu > 0.0 && mu < 1.0 {
        hh = hh.max(verify_hardy_hille(2, mu, 100).map_err(lib_err)?);
    }
    checks.push(Check {
        name: "hardy_hille_max_rel_err",
        value: hh,
        tolerance: 1e-9,
    });

    // HG→LG block unitarity for N <= 10.
    let mut worst_unitarity = 0.0f64;
    for order in 0..=10u32 {
        worst_unitarity =
            worst_unitarity.max(hg_to_lg_block(order).map_err(lib_err)?.unitarity_residual());
    }
    checks.push(Check {
        name: "conversion_unitarity_residual",
        value: worst_unitarity,
        tolerance: 1e-10,
    });

    let all_passed = checks.iter().all(|c| c.value < c.tolerance);
    let mut report = Json::obj();
    report.push("b_sigma", Json::Num(a.b_sigma));
    report.push("grid", Json::Int(a.grid as i64));
    report.push("modes", Json::Int(a.modes as i64));
    let mut arr = Vec::with_capacity(checks.len());
    for c in &checks {
        let mut e = Json::obj();
        e.push("name", Json::Str(c.name.into()));
        e.push("value", Json::Num(c.value));
        e.push("tolerance", Json::Num(c.tolerance));
        e.push("passed", Json::Bool(c.value < c.tolerance));
        arr.push(e);
    }
    report.push("checks", Json::Arr(arr));
    report.push(
        "warnings",
        Json::Arr(warnings.into_iter().map(Json::Str).collect()),
    );
    report.push("passed", Json::Bool(all_passed));
    // Convenience top-level aliases for the headline numbers.
    for c in &checks {
        report.push(c.name, Json::Num(c.value));
    }

    let mut params = Json::obj();
    params.push("b_sigma", Json::Num(a.b_sigma));
    params.push("grid", Json::Int(a.grid as i64));
    params.push("modes", Json::Int(a.modes as i64));
    let u = units(&[("b_sigma", "dimensionless")]);
    let body = json_document("verify", params, report, u);
    write_output(a.out.as_deref(), &body, None)?;
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_convert(a: ConvertArgs) -> Result<u8, String> {
    let block = hg_to_lg_block(a.order).map_err(lib_err)?;
    let indices = block.polar_indices();
    let mut rows = Vec::with_capacity(indices.len());
    for (r, &(ell, p)) in indices.iter().enumerate() {
        let mut row = Json::obj();
        row.push("ell", Json::Int(i64::from(ell)));
        row.push("p", Json::Int(i64::from(p)));
        let coeffs: Vec<Json> = (0..block.matrix.ncols())
            .map(|c| {
                let v = block.matrix[(r, c)];
                Json::Arr(vec![Json::Num(v.re), Json::Num(v.im)])
            })
            .collect();
        row.push("coefficients", Json::Arr(coeffs));
        rows.push(row);
    }
    let mut payload = Json::obj();
    payload.push("order", Json::Int(i64::from(a.order)));
    payload.push("rows", Json::Arr(rows));
    payload.push("unitarity_residual", Json::Num(block.unitarity_residual()));
    let mut params = Json::obj();
    params.push("order", Json::Int(i64::from(a.order)));
    let u = units(&[("coefficients", "dimensionless [re, im] pairs")]);
    let body = json_document("convert", params, payload, u);
    write_output(a.out.as_deref(), &body, None)?;
    Ok(0)
}
