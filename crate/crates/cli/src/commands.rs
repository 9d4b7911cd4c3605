use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use cavity::fbp::{reconstruct, Reconstruction, ReconstructionConfig, MIN_SIGMA_INTERVALS};
use cavity::forward::{simulate_sinogram, Phantom, Sinogram};
use cavity::geometry::{cavity_mask, extract_ovals, is_oscillatory_at, Verdict};
use cavity::levitation::{
    constant_field_prediction, layer_field, surface_field, DensityKind, LevitationReport, MassDensitySpec,
};
use cavity::poly::format_polynomial;
use cavity::separator::verify_separator;
use cavity::time_reversal::tr_reconstruct;
use cavity::{Error, Polynomial, ScalarGrid};

use crate::args::*;
use crate::error::{invalid, CliError, CliResult};
use crate::inputs::{self, Setup, Weight};

fn print(v: &impl Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn save_json(path: &Path, v: &impl Serialize) -> CliResult<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn check_format(format: Format, dim: usize) -> CliResult<()> {
    if format == Format::Pgm16 && dim != 2 {
        return invalid("--format pgm16 needs a 2D geometry");
    }
    Ok(())
}

/// Writes a grid and returns the files written.
fn write_grid(g: &ScalarGrid, path: &Path, format: Format) -> CliResult<Vec<PathBuf>> {
    Ok(match format {
        Format::Csv => {
            g.write_csv(path)?;
            vec![path.to_path_buf()]
        }
        Format::Pgm16 => {
            let side = g.write_pgm16(path)?;
            vec![path.to_path_buf(), side]
        }
    })
}

fn one_line(p: &Polynomial) -> String {
    format_polynomial(p, None)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    check_format(args.format, s.dim())?;
    fs::create_dir_all(&args.out)?;
    let verdict = is_oscillatory_at(&s.p, &s.a, &s.rule)?;
    let mut summary = json!({
        "degree": s.p.degree(),
        "dimension": s.dim(),
        "point": s.a,
        "directions": s.rule.len(),
    });
    match &verdict {
        Verdict::Oscillatory { skipped, .. } => {
            summary["verdict"] = json!("oscillatory");
            summary["skipped_directions"] = json!(skipped);
        }
        Verdict::Counterexample { omega } => {
            summary["verdict"] = json!("not oscillatory");
            summary["counterexample"] = json!(omega);
        }
        Verdict::Inconclusive { degenerate_fraction } => {
            summary["verdict"] = json!("inconclusive");
            summary["degenerate_fraction"] = json!(degenerate_fraction);
        }
    }
    if verdict.is_oscillatory() {
        // An unbounded cavity has no closed ovals; the mask still needs a box.
        let ov = match extract_ovals(&s.p, &s.a, &s.rule) {
            Ok(ov) => Some(ov),
            Err(Error::NotOscillatory(msg)) => {
                if args.grid.lo.is_none() {
                    return invalid(format!("{msg}; no closed ovals, give --lo and --hi for the mask"));
                }
                summary["ovals"] = json!(null);
                summary["ovals_error"] = json!(msg);
                None
            }
            Err(e) => return Err(e.into()),
        };
        let spec = inputs::grid_spec(&args.grid, &s)?;
        let mut files = Vec::new();
        let clouds = ov.as_ref().map_or(&[][..], |o| &o.clouds[..]);
        for (k, cloud) in clouds.iter().enumerate() {
            let path = args.out.join(format!("oval_{}.csv", k + 1));
            let mut text = String::from(if s.dim() == 2 { "x,y\n" } else { "x,y,z\n" });
            for x in cloud {
                let row: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
                let _ = writeln!(text, "{}", row.join(","));
            }
            fs::write(&path, text)?;
            files.push(path);
        }
        let mask = cavity_mask(&s.p, &spec, &s.rule)?;
        let ext = if args.format == Format::Csv { "csv" } else { "pgm" };
        files.extend(write_grid(&mask.grid, &args.out.join(format!("mask.{ext}")), args.format)?);
        if let Some(ov) = &ov {
            summary["ovals"] = json!(ov.clouds.len());
            summary["nested"] = json!(ov.nested);
        }
        summary["mask_cells"] = json!(mask.marked());
        summary["grid_cells"] = json!(spec.len());
        summary["convexity_violations"] = json!(mask.convexity_violations(20_000));
        summary["files"] = json!(files);
    }
    save_json(&args.out.join("summary.json"), &summary)?;
    print(&summary)
}

pub fn separator(args: &SeparatorArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    let Weight::Poly(q) = inputs::load_q(&args.q, &s, false)? else {
        unreachable!()
    };
    let rep = verify_separator(&s.p, &q, &s.a, &s.rule)?;
    let out = json!({ "q": one_line(&q), "report": rep });
    if let Some(path) = &args.out {
        save_json(path, &out)?;
    }
    print(&out)
}

fn phantom(sim: &SimulationArgs, dim: usize) -> CliResult<Option<Phantom>> {
    let Some(text) = &sim.phantom else { return Ok(None) };
    let f = Phantom::parse(text)?;
    if f.dim != dim {
        return invalid(format!("--phantom has dimension {}, the polynomial has {dim}", f.dim));
    }
    Ok(Some(f))
}

fn check_sim(sim: &SimulationArgs) -> CliResult<()> {
    if sim.nsigma < MIN_SIGMA_INTERVALS || sim.nsigma > 1 << 20 {
        return invalid(format!("--nsigma must be between {MIN_SIGMA_INTERVALS} and 1048576"));
    }
    if let Some(m) = sim.sigma_max {
        if !(m > 0.0 && m.is_finite()) {
            return invalid("--sigma-max must be positive");
        }
    }
    Ok(())
}

fn simulate_with(s: &Setup, f: &Phantom, sim: &SimulationArgs) -> CliResult<Sinogram> {
    let sigma_max = match sim.sigma_max {
        Some(v) => v,
        None => {
            let (inner, outer) = inputs::extents(s)?;
            1.125 * (inner + outer).powi(2)
        }
    };
    Ok(simulate_sinogram(f, &s.p, &s.a, &s.rule, sigma_max / sim.nsigma as f64, sim.nsigma)?)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    check_sim(&args.sim)?;
    let Some(f) = phantom(&args.sim, s.dim())? else {
        return invalid("simulate needs --phantom");
    };
    let sino = simulate_with(&s, &f, &args.sim)?;
    sino.write_csv(&args.out)?;
    print(&json!({
        "centers": sino.centers.len(),
        "n_sigma": sino.n_sigma,
        "d_sigma": sino.d_sigma,
        "sigma_max": sino.sigma_max(),
        "out": args.out,
    }))
}

/// The sinogram from `--sinogram`, or simulated from `--phantom`.
fn sinogram(s: &Setup, path: &Option<PathBuf>, f: Option<&Phantom>, sim: &SimulationArgs) -> CliResult<Sinogram> {
    match (path, f) {
        (Some(path), _) => {
            let sino = Sinogram::read_csv(path)?;
            if sino.dim != s.dim() || sino.degree != s.p.degree() {
                return invalid(format!(
                    "{} was made for dimension {} degree {}, not this polynomial",
                    path.display(),
                    sino.dim,
                    sino.degree
                ));
            }
            Ok(sino)
        }
        (None, Some(f)) => simulate_with(s, f, sim),
        (None, None) => invalid("give --sinogram or --phantom"),
    }
}

fn truth(f: &Phantom, rec: &Reconstruction) -> ScalarGrid {
    let mut t = ScalarGrid::from_fn(rec.grid.spec.clone(), |x| f.eval(x));
    for (v, o) in t.values.iter_mut().zip(&rec.outside) {
        if *o {
            *v = 0.0;
        }
    }
    t
}

pub fn reconstruct_cmd(args: &ReconstructArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    check_sim(&args.sim)?;
    check_format(args.format, s.dim())?;
    if let Some(c) = args.normalization {
        if !(c.is_finite() && c != 0.0) {
            return invalid("--normalization must be finite and nonzero");
        }
    }
    let f = phantom(&args.sim, s.dim())?;
    let spec = inputs::grid_spec(&args.grid, &s)?;
    let sino = sinogram(&s, &args.sinogram, f.as_ref(), &args.sim)?;
    let cfg = ReconstructionConfig {
        normalization: args.normalization,
        ..Default::default()
    };
    let rec = reconstruct(&sino, &s.p, &spec, &cfg)?;
    let files = write_grid(&rec.grid, &args.out, args.format)?;
    let mut out = json!({
        "files": files,
        "cells": spec.len(),
        "outside_cells": rec.outside_count(),
        "max": rec.grid.max(),
    });
    if let Some(f) = &f {
        out["relative_l2_error"] = json!(rec.grid.relative_l2_error(&truth(f, &rec)));
    }
    print(&out)
}

pub fn timereverse(args: &TimeReverseArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    check_sim(&args.sim)?;
    check_format(args.format, s.dim())?;
    if let Some(h) = args.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return invalid("--horizon must be positive");
        }
    }
    let f = phantom(&args.sim, s.dim())?;
    let spec = inputs::grid_spec(&args.grid, &s)?;
    let sino = sinogram(&s, &args.sinogram, f.as_ref(), &args.sim)?;
    let tr = tr_reconstruct(&sino, &s.p, &spec, args.horizon)?;
    let fbp = reconstruct(&sino, &s.p, &spec, &ReconstructionConfig::default())?;
    let files = write_grid(&tr.grid, &args.out, args.format)?;
    let scale = fbp.grid.max_abs();
    let max_delta = tr
        .grid
        .values
        .iter()
        .zip(&fbp.grid.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut out = json!({
        "files": files,
        "cells": spec.len(),
        "outside_cells": tr.outside_count(),
        "max": tr.grid.max(),
        "max_delta_vs_fbp": if scale > 0.0 { max_delta / scale } else { max_delta },
        "relative_l2_vs_fbp": if scale > 0.0 { tr.grid.relative_l2_error(&fbp.grid) } else { 0.0 },
    });
    if let Some(f) = &f {
        out["relative_l2_error"] = json!(tr.grid.relative_l2_error(&truth(f, &tr)));
    }
    print(&out)
}

fn prediction(s: &Setup, q: &Polynomial) -> CliResult<Option<Vec<f64>>> {
    match constant_field_prediction(&s.p, q, &s.a, &s.rule) {
        Ok(v) => Ok(Some(v)),
        Err(Error::NonElliptic) | Err(Error::Precondition { .. }) => Ok(None),
        Err(e) => Err(CliError::Core(e)),
    }
}

fn finish_report(rep: &LevitationReport, out: &Option<PathBuf>) -> CliResult<()> {
    if let Some(path) = out {
        save_json(path, rep)?;
    }
    print(rep)
}

pub fn levitate(args: &LevitateArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    let weight = inputs::load_q(&args.q, &s, true)?;
    let (kind, label, pred) = match weight {
        Weight::Uniform => (DensityKind::UniformSurface, "uniform surface density".to_string(), None),
        Weight::Poly(q) => {
            let pred = prediction(&s, &q)?;
            let label = format!("|q| delta(p), q = {}", one_line(&q));
            (DensityKind::Surface { q }, label, pred)
        }
    };
    let points = inputs::probes(&args.probes.probes, args.probes.count, &s, |_| true)?;
    let spec = MassDensitySpec {
        p: s.p.clone(),
        kind,
        anchor: s.a.clone(),
    };
    let probes = points
        .iter()
        .map(|x| surface_field(&spec, x, &s.rule))
        .collect::<Result<Vec<_>, _>>()?;
    finish_report(&LevitationReport::new(&label, probes, pred), &args.probes.out)
}

pub fn layer_levitate(args: &LayerArgs) -> CliResult<()> {
    let s = inputs::load(&args.geometry)?;
    let (lo, hi) = (args.lo_level, args.hi_level);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return invalid("--lo-level must be below --hi-level");
    }
    if args.nodes == 0 || args.nodes > 256 {
        return invalid("--nodes must be between 1 and 256");
    }
    let Weight::Poly(q) = inputs::load_q(&args.q, &s, false)? else {
        unreachable!()
    };
    let label = format!("|q| on {lo} <= p <= {hi}, q = {}", one_line(&q));
    let pred = prediction(&s, &q)?;
    let p = s.p.clone();
    let outside_layer = move |x: &[f64]| {
        p.eval(x).map_or(false, |v| v < lo || v > hi)
    };
    let points = inputs::probes(&args.probes.probes, args.probes.count, &s, outside_layer)?;
    let spec = MassDensitySpec {
        p: s.p.clone(),
        kind: DensityKind::Layer { q, lo, hi },
        anchor: s.a.clone(),
    };
    let probes = points
        .iter()
        .map(|x| layer_field(&spec, x, &s.rule, args.nodes))
        .collect::<Result<Vec<_>, _>>()?;
    finish_report(&LevitationReport::new(&label, probes, pred), &args.probes.out)
}
