//! The five commands behind the `trbs` binary. Each returns its printed
//! report and a pass/fail flag that becomes the exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{analyze, smooth_events, AnalysisThresholds};
use crate::config::{NetworkKind, RunConfig};
use crate::correlation::landscape_theory;
use crate::error::{Error, Result};
use crate::grid::LandscapeGrid;
use crate::network::{gauge_distance, tritter, u_zero, NetworkFamily, UNITARY_TOL};
use crate::permanent::perm_ryser;
use crate::protocol::ProtocolReport;
use crate::sampler::{parse_events, read_events, write_events, Sampler};

/// Landscape dip threshold checked by `landscape --verify`.
pub const DIP_LIMIT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutcome {
    pub report: String,
    pub success: bool,
    pub written: Vec<PathBuf>,
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

pub fn cmd_network(cfg: &RunConfig) -> Result<CommandOutcome> {
    let u = cfg.network_unitary()?;
    let mut r = String::new();
    writeln!(r, "# tr-boson network report v1").unwrap();
    writeln!(r, "kind = {}", format!("{:?}", cfg.network.kind).to_lowercase()).unwrap();
    writeln!(r, "phi = {}", cfg.network.phi).unwrap();
    writeln!(r, "unitary =").unwrap();
    write!(r, "{u}").unwrap();
    let defect = u.unitarity_defect().ok_or_else(|| Error::NotSquare { rows: u.n_rows(), cols: u.n_cols() })?;
    let unitary_ok = defect <= UNITARY_TOL;
    writeln!(r, "unitarity_defect = {defect:.3e} ({})", pass(unitary_ok)).unwrap();
    writeln!(r, "abs_permanent = {:.6e}", perm_ryser(&u)?.norm()).unwrap();
    let mut ok = unitary_ok;
    if u.n_rows() == 3 {
        writeln!(r, "gauge_distance_u_zero = {:.3e}", gauge_distance(&u, &u_zero())?).unwrap();
        writeln!(r, "gauge_distance_tritter = {:.3e}", gauge_distance(&u, &tritter())?).unwrap();
        let family = match cfg.network.kind {
            NetworkKind::Paper => Some(NetworkFamily::paper()),
            NetworkKind::Circuit => {
                let path = cfg.network.path.as_ref().expect("validated");
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Some(NetworkFamily::from_toml_str(&text)?)
            }
            NetworkKind::Matrix => None,
        };
        if let Some(a) = family.map(|f| f.anchors()).transpose()? {
            writeln!(r, "anchor.zero = {:.3e}", a.zero_anchor).unwrap();
            writeln!(r, "anchor.tritter = {:.3e}", a.tritter_anchor).unwrap();
            writeln!(r, "anchor.swap = {:.3e}", a.swap_anchor).unwrap();
            writeln!(r, "anchor.unitarity = {:.3e}", a.unitarity).unwrap();
            writeln!(r, "anchors = {}", pass(a.passes())).unwrap();
            ok &= a.passes();
        }
    }
    writeln!(r, "status = {}", pass(ok)).unwrap();
    Ok(CommandOutcome { report: r, success: ok, written: vec![] })
}

/// Theory landscape for ports (1, 2, 3) on the configured grid.
pub fn theory_landscape(cfg: &RunConfig) -> Result<LandscapeGrid> {
    let u = cfg.network_unitary()?;
    let sources = cfg.source_set()?;
    let grid = landscape_theory(&u, &sources, [1, 2, 3], &cfg.grid)?;
    Ok(grid.with_meta("phi", cfg.network.phi).with_meta("network", format!("{:?}", cfg.network.kind).to_lowercase()))
}

pub fn cmd_landscape(cfg: &RunConfig, out: Option<&Path>, verify: bool) -> Result<CommandOutcome> {
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.join("landscape.txt"));
    let hash = cfg.config_hash();
    let f = theory_landscape(cfg)?;
    ensure_parent(&path)?;
    f.write(&path, Some(&hash))?;
    let mut r = String::new();
    writeln!(r, "# tr-boson landscape run v1").unwrap();
    writeln!(r, "output = {}", path.display()).unwrap();
    writeln!(r, "config_hash = {hash}").unwrap();
    writeln!(r, "max = {:e}", f.max()).unwrap();
    let mut ok = true;
    if verify {
        let center = f.interpolate(0.0, 0.0).unwrap_or(f64::NAN);
        let ratio = if f.max() > 0.0 { center / f.max() } else { 0.0 };
        ok = ratio < DIP_LIMIT;
        writeln!(r, "dip_ratio = {ratio:.4e} (< {DIP_LIMIT}: {})", pass(ok)).unwrap();
    }
    Ok(CommandOutcome { report: r, success: ok, written: vec![path] })
}

pub fn cmd_sample(cfg: &RunConfig, out: Option<&Path>) -> Result<CommandOutcome> {
    let seed = cfg.sampler.seed.ok_or_else(|| Error::Config("sampler.seed is required for sampling".into()))?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.join("events.csv"));
    let u = cfg.network_unitary()?;
    let sources = cfg.source_set()?;
    let noise = cfg.noise_model(sources.len())?;
    let run = Sampler::new(&u, &sources, &noise, cfg.statistics())?
        .with_options(cfg.sampler_options())
        .run(cfg.sampler.n_events, seed)?;
    let hash = cfg.config_hash();
    ensure_parent(&path)?;
    write_events(&path, &run.events, Some(&hash))?;
    let mut r = String::new();
    writeln!(r, "# tr-boson sample run v1").unwrap();
    writeln!(r, "output = {}", path.display()).unwrap();
    writeln!(r, "config_hash = {hash}").unwrap();
    writeln!(r, "events = {}", run.events.len()).unwrap();
    writeln!(r, "trials = {}", run.trials).unwrap();
    writeln!(r, "rejection_acceptance = {:.4}", run.acceptance()).unwrap();
    writeln!(r, "contaminated = {}", run.events.iter().filter(|e| e.contaminated).count()).unwrap();
    Ok(CommandOutcome { report: r, success: true, written: vec![path] })
}

/// Reads a theory file: a landscape grid, or an event file smoothed onto
/// the configured grid.
fn read_theory(path: &Path, cfg: &RunConfig) -> Result<(LandscapeGrid, Option<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    if text.starts_with("# tr-boson events") {
        let (events, hash) = parse_events(&text, &origin)?;
        Ok((smooth_events(&events, &cfg.grid, cfg.analysis.r0_ns)?, hash))
    } else {
        LandscapeGrid::parse(&text, &origin)
    }
}

pub fn cmd_analyze(cfg: &RunConfig, events: &Path, theory: &Path, force: bool) -> Result<CommandOutcome> {
    let (ev, ev_hash) = read_events(events)?;
    let (f_t, t_hash) = read_theory(theory, cfg)?;
    if let (Some(a), Some(b)) = (&ev_hash, &t_hash) {
        if a != b && !force {
            return Err(Error::HashMismatch { a: a.clone(), b: b.clone() });
        }
    }
    let report = analyze(&ev, &f_t, cfg.analysis.r0_ns)?;
    let limits = AnalysisThresholds {
        min_fidelity: cfg.analysis.min_fidelity,
        min_rotation_120: cfg.analysis.min_rotation_120,
    };
    let failures = report.failures(&limits);
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let toml_path = cfg.output_dir.join("report.toml");
    let kv_path = cfg.output_dir.join("report.kv");
    let text = report.to_toml();
    std::fs::write(&toml_path, &text).map_err(|e| Error::io(&toml_path, e))?;
    std::fs::write(&kv_path, report.to_key_values()).map_err(|e| Error::io(&kv_path, e))?;
    let mut r = text;
    for f in &failures {
        writeln!(r, "# threshold failed: {f}").unwrap();
    }
    Ok(CommandOutcome { report: r, success: failures.is_empty(), written: vec![toml_path, kv_path] })
}

pub fn cmd_protocol(cfg: &RunConfig) -> Result<CommandOutcome> {
    let p = &cfg.protocol;
    let report = ProtocolReport::run(&p.protocol, p.batches, p.seed)?;
    Ok(CommandOutcome { report: report.to_text(), success: report.within_3_sigma, written: vec![] })
}
