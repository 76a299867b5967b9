//! Command-line front end: spectrum, orbit, spin, and verify pipelines
//! driven by a TOML experiment config.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use orbitrace::config::{ExperimentConfig, ModelConfig};
use orbitrace::error::Result;
use orbitrace::output::{self, SpectrumSummary};
use orbitrace::quantizer::SpectrumRecord;
use orbitrace::spin::{self, SpinModel};
use orbitrace::{integrator, quantizer, verify};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "orbitrace", version, about = "Semiclassical and quantum spectra of pseudo-Hermitian models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Engine {
    Quantum,
    Semiclassical,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spectrum by one or both engines and write data files.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Reconstruct one quantized orbit with its symmetry image.
    Orbit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run the two-level sweep and dump representative trajectories.
    Spin {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run the invariant suite; exit 2 on any failure.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ErrorRecord {
    error: String,
}

fn out_dir(cfg: &ExperimentConfig, flag: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_error(dir: &Path, err: &orbitrace::Error) {
    let _ = output::write_json(&dir.join("error.json"), &ErrorRecord { error: err.to_string() });
}

fn cmd_spectrum(config: &Path, engine: Engine, out: &Option<PathBuf>, format: &str) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.output.format = format.to_string();
    cfg.validate()?;
    let dir = out_dir(&cfg, out)?;

    if matches!(cfg.model, ModelConfig::Spin { .. }) {
        return Err(orbitrace::Error::Config(
            "spectrum expects a phase-space model; use the spin command".into(),
        ));
    }

    let result = (|| -> Result<ExitCode> {
        match engine {
            Engine::Quantum => {
                let op = verify::build_operator(&cfg).expect("phase-space model");
                let eigs = op.eigenvalues()?;
                emit_quantum(&dir, format, &eigs)?;
            }
            Engine::Semiclassical => {
                let model = cfg.model.to_spec().expect("phase-space model");
                let records = quantizer::semiclassical_spectrum(
                    &model,
                    &cfg.families,
                    &cfg.quantizer_settings(),
                );
                emit_semiclassical(&dir, format, &records)?;
            }
            Engine::Both => {
                let (records, eigs, unmatched) = verify::matched_spectrum(&cfg)?;
                emit_quantum(&dir, format, &eigs)?;
                emit_semiclassical(&dir, format, &records)?;
                let errors: Vec<f64> = records.iter().filter_map(|r| r.match_error).collect();
                let (dichotomy, exceptions) = verify::check_dichotomy(&records);
                let summary = SpectrumSummary {
                    model: format!("{:?}", cfg.model.to_spec().unwrap().id()),
                    levels: records.len(),
                    matched: errors.len(),
                    max_match_error: errors.iter().copied().reduce(f64::max),
                    median_match_error: median(&errors),
                    dichotomy_pass: dichotomy.passed,
                    dichotomy_exceptions: exceptions,
                };
                output::write_json(&dir.join("match_report.json"), &MatchReport::new(&records, &unmatched))?;
                output::write_json(&dir.join("summary.json"), &summary)?;
            }
        }
        Ok(ExitCode::SUCCESS)
    })();
    if let Err(err) = &result {
        write_error(&dir, err);
    }
    result
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    })
}

#[derive(Serialize)]
struct MatchReport {
    levels: Vec<SpectrumRecord>,
    unmatched_quantum: Vec<orbitrace::C64>,
}

impl MatchReport {
    fn new(records: &[SpectrumRecord], unmatched: &[orbitrace::C64]) -> Self {
        // The unmatched list is dominated by high-lying grid levels above
        // every configured family window; keep the 50 smallest for the
        // report.
        let mut u = unmatched.to_vec();
        u.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        u.truncate(50);
        MatchReport { levels: records.to_vec(), unmatched_quantum: u }
    }
}

fn emit_quantum(dir: &Path, format: &str, eigs: &[orbitrace::C64]) -> Result<()> {
    if format == "json" {
        output::write_json(&dir.join("spectrum_quantum.json"), &eigs)
    } else {
        output::write_quantum_csv(&dir.join("spectrum_quantum.csv"), eigs)
    }
}

fn emit_semiclassical(dir: &Path, format: &str, records: &[SpectrumRecord]) -> Result<()> {
    if format == "json" {
        output::write_json(&dir.join("spectrum_semiclassical.json"), &records)
    } else {
        output::write_spectrum_csv(&dir.join("spectrum_semiclassical.csv"), records)
    }
}

#[derive(Serialize)]
struct OrbitReport {
    family: String,
    n: i64,
    energy: orbitrace::C64,
    classification: String,
    image_distance: f64,
    closure_error: f64,
}

fn cmd_orbit(config: &Path, family: &str, n: i64, out: &Option<PathBuf>, format: &str) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let dir = out_dir(&cfg, out)?;
    let model = cfg
        .model
        .to_spec()
        .ok_or_else(|| orbitrace::Error::Config("orbit expects a phase-space model".into()))?;
    let fam = cfg
        .families
        .iter()
        .find(|f| f.label == family)
        .ok_or_else(|| orbitrace::Error::Config(format!("unknown family {family}")))?;
    if n < fam.n_min || n > fam.n_max {
        return Err(orbitrace::Error::Config(format!(
            "n={n} outside family {family} range [{}, {}]",
            fam.n_min, fam.n_max
        )));
    }
    let settings = cfg.quantizer_settings();
    let result = (|| -> Result<ExitCode> {
        // Quantize the whole family so classification can see siblings.
        let records = quantizer::semiclassical_spectrum(&model, &cfg.families, &settings);
        let rec = records
            .iter()
            .find(|r| r.family_label == family && r.n == n && r.converged())
            .ok_or_else(|| orbitrace::Error::Config(format!("level {family}:{n} did not converge")))?;
        let orbit = quantizer::build_orbit(&model, fam, rec.e_semiclassical, &settings)?;
        let image = integrator::orbit_image(&model, &orbit);
        let distance = integrator::orbit_distance(&orbit, &image)?;
        if format == "json" {
            output::write_json(&dir.join("orbit.json"), &orbit)?;
            output::write_json(&dir.join("orbit_image.json"), &image)?;
        } else {
            output::write_orbit_csv(&dir.join("orbit.csv"), &orbit)?;
            output::write_orbit_csv(&dir.join("orbit_image.csv"), &image)?;
        }
        let report = OrbitReport {
            family: family.to_string(),
            n,
            energy: rec.e_semiclassical,
            classification: output::classification_label(&rec.orbit_class),
            image_distance: distance,
            closure_error: integrator::closure_error(&orbit),
        };
        output::write_json(&dir.join("orbit_report.json"), &report)?;
        println!(
            "orbit {family}:{n}  E = {}  class = {}  image distance = {:.3e}",
            report.energy, report.classification, report.image_distance
        );
        Ok(ExitCode::SUCCESS)
    })();
    if let Err(err) = &result {
        write_error(&dir, err);
    }
    result
}

fn cmd_spin(config: &Path, out: &Option<PathBuf>, format: &str) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let dir = out_dir(&cfg, out)?;
    let ModelConfig::Spin { t1 } = cfg.model else {
        return Err(orbitrace::Error::Config("spin expects model id = \"spin\"".into()));
    };
    let values = cfg.spin.values();
    if values.is_empty() {
        return Err(orbitrace::Error::Config("spin: empty delta1 sweep".into()));
    }
    let rows = spin::pt_sweep(t1, &values, cfg.spin.steps);
    if format == "json" {
        output::write_json(&dir.join("sweep.json"), &rows)?;
    } else {
        output::write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
    }
    // Representative closed trajectories on both sides of the transition,
    // with their symmetry images, for the phase-portrait panels.
    for (tag, d1) in [("below", 0.5 * t1), ("above", 1.5 * t1)] {
        let model = SpinModel::new(t1, d1);
        let traj = spin::representative_trajectory(&model, cfg.spin.steps);
        let image = spin::spin_image(&traj);
        output::write_spin_trajectory_csv(&dir.join(format!("trajectory_{tag}.csv")), &traj)?;
        output::write_spin_trajectory_csv(&dir.join(format!("trajectory_{tag}_image.csv")), &image)?;
    }
    println!("spin sweep: {} rows written to {}", rows.len(), dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &Path, out: &Option<PathBuf>) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let dir = out_dir(&cfg, out)?;
    let report = verify::run_verify(&cfg)?;
    print!("{}", report.render());
    output::write_json(&dir.join("verify_report.json"), &report)?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ORBITRACE_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: ORBITRACE_THREADS must be a positive integer");
                return ExitCode::FAILURE;
            }
        }
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum { config, engine, out, format } => {
            cmd_spectrum(config, *engine, out, format)
        }
        Command::Orbit { config, family, n, out, format } => {
            cmd_orbit(config, family, *n, out, format)
        }
        Command::Spin { config, out, format } => cmd_spin(config, out, format),
        Command::Verify { config, out } => cmd_verify(config, out),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
