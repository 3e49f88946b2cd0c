//! Subcommand bodies. Each returns a JSON report and whether every check passed.

use std::path::{Path, PathBuf};

use psc_core::bifurcation::{branch_slope, classify_branch, derivative_checks, fit_cubic_equivariant, table_value};
use psc_core::coupling::{square_expansion_checks, TripleProductTable};
use psc_core::dynamics::{heteroclinic_experiment, integrate_rescaled, FlowVariant, HeteroclinicParams, Side, CONNECTIONS};
use psc_core::equilibrium::{branch_point_at, continue_branch, ContinuationOptions, Equilibrium};
use psc_core::geometry::{
    antipodal_admissible, center_cusp_check, mean_curvature_exponent, minimal_surface_index, monotonicity_operator_nonpositive,
    radial_residual, self_similar_datum, simulate_original, MetricProfile,
};
use psc_core::spectral::{n_coeffs, SpectralField};
use psc_core::stability::{morse_index, morse_row, MORSE_TABLE};
use psc_core::symmetry::{lattice_dims, GroupName, IsotropyDescriptor, TABLE_PAIRS};
use psc_core::{lambda_ell, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::formats::{branch_csv, json as to_json, metric_csv, parse_triple_cache, trajectory_csv, triple_cache_text, write_file};
use crate::svg::{branch_diagram, BranchPlot};

/// Relative tolerance of the closed-form derivative rows.
pub const DERIVATIVE_TOL: f64 = 1e-10;
/// Absolute tolerance of the `e²` coefficient rows.
pub const EXPANSION_TOL: f64 = 1e-12;
/// Branch parameter of the index rows.
pub const MORSE_S: f64 = 0.2;
/// Degree of the cached triple-product table (squares of degree-4 generators).
pub const TRIPLE_CACHE_DEGREE: usize = 8;

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn save_report(cfg: &RunConfig, name: &str, report: &Value) -> Result<PathBuf> {
    let path = cfg.output_dir.join(format!("{name}.json"));
    write_file(&path, &to_json(report))?;
    Ok(path)
}

fn descriptor(group: GroupName, ell: usize, l_max: usize) -> Result<IsotropyDescriptor> {
    IsotropyDescriptor::new(group, ell, l_max).map_err(|e| match e {
        Error::UnknownPair { .. } | Error::ResolutionMismatch { .. } => CliError::Config(e.to_string()),
        e => e.into(),
    })
}

pub fn parse_group(s: &str) -> Result<GroupName> {
    GroupName::parse(s).ok_or_else(|| CliError::Config(format!("unknown group {s:?}")))
}

pub fn verify_tables(cfg: &RunConfig) -> Result<Outcome> {
    let derivatives: Vec<Value> = derivative_checks()?
        .iter()
        .map(|c| {
            let mut v = value(c);
            v["pass"] = json!(c.rel_error < DERIVATIVE_TOL);
            v
        })
        .collect();
    let rows: Vec<Value> = MORSE_TABLE
        .par_iter()
        .map(|row| match morse_row(*row, MORSE_S, cfg.l_max, cfg.zero_tol) {
            Ok(r) => {
                let mut v = value(&r);
                v["pass"] = json!(r.passes());
                v
            }
            Err(e) => json!({"ell": row.0, "group": row.1, "side": row.2, "expected": row.3, "error": e.to_string(), "pass": false}),
        })
        .collect();
    let pass = |v: &Value| v["pass"].as_bool() == Some(true);
    let ok = derivatives.iter().all(pass) && rows.iter().all(pass);
    let report = json!({
        "l_max": cfg.l_max,
        "zero_tol": cfg.zero_tol,
        "s": MORSE_S,
        "derivatives": derivatives,
        "morse": rows,
        "failed": derivatives.iter().chain(&rows).filter(|v| !pass(v)).count(),
        "pass": ok,
    });
    save_report(cfg, "verify_tables", &report)?;
    Ok(Outcome { report, ok })
}

pub fn branch(cfg: &RunConfig, group: GroupName, ell: usize) -> Result<Outcome> {
    let k = descriptor(group, ell, cfg.l_max)?;
    let opts = ContinuationOptions { s_max: cfg.s_max, ds: cfg.ds, tol: cfg.newton_tol, two_sided: true };
    let br = continue_branch(&k, &opts);
    let stem = format!("branch_{}_{ell}", group.ident());
    let csv_path = cfg.output_dir.join(format!("{stem}.csv"));
    write_file(&csv_path, &branch_csv(&br))?;

    let mut annotations = Vec::new();
    let ends: Vec<_> = [br.points.first(), br.points.last()].into_iter().flatten().filter(|p| p.s != 0.0).collect();
    for p in ends {
        let eq = Equilibrium { lambda: p.lambda, v: p.v.clone(), group, residual_norm: 0.0 };
        let text = match morse_index(&eq, cfg.zero_tol) {
            Ok((i, _)) => format!("i={i}"),
            Err(_) => "i=?".to_string(),
        };
        annotations.push((p.lambda, p.s, text));
    }
    let plot = BranchPlot { label: format!("{} ℓ={ell}", group.symbol()), points: br.points.iter().map(|p| (p.lambda, p.s)).collect(), annotations };
    let svg_path = cfg.output_dir.join(format!("{stem}.svg"));
    write_file(&svg_path, &branch_diagram(&format!("{} branch at λ = {}", group.symbol(), lambda_ell(ell)), &[plot]))?;

    let reference = table_value(ell, group).map(|(q, tabulated)| {
        let closed = if q == "lambda_prime" { branch_slope(ell, group).ok() } else { Some(tabulated) };
        json!({"quantity": q, "tabulated": tabulated, "closed_form": closed})
    });
    let report = json!({
        "group": group,
        "ell": ell,
        "l_max": cfg.l_max,
        "kind": br.kind,
        "points": br.points.len(),
        "stopped_at": br.stopped_at,
        "lambda_prime_fit": br.lambda_prime_fit,
        "lambda_second_fit": br.lambda_second_fit,
        "reference": reference,
        "csv": csv_path,
        "svg": svg_path,
    });
    Ok(Outcome { ok: br.stopped_at.is_empty(), report })
}

fn load_or_build_cache(path: &Path) -> Result<(TripleProductTable, &'static str)> {
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok((parse_triple_cache(&text, TRIPLE_CACHE_DEGREE)?, "loaded"))
    } else {
        let t = TripleProductTable::build(TRIPLE_CACHE_DEGREE);
        write_file(path, &triple_cache_text(&t))?;
        Ok((t, "written"))
    }
}

pub fn coeffs(cfg: &RunConfig, triple_cache: Option<&Path>) -> Result<Outcome> {
    let reports = TABLE_PAIRS.iter().map(|&(g, l)| classify_branch(l, g)).collect::<psc_core::Result<Vec<_>>>()?;
    let derivatives = derivative_checks()?;
    let expansions = square_expansion_checks()?;
    let (alpha, beta, residual) = fit_cubic_equivariant()?;
    let pi = std::f64::consts::PI;
    let (alpha_ref, beta_ref) = (287.0 / (1430.0 * pi), 812.0 / (143.0 * pi));
    let cubic_ok = residual < 1e-12 && ((alpha - alpha_ref) / alpha_ref).abs() < DERIVATIVE_TOL && ((beta - beta_ref) / beta_ref).abs() < DERIVATIVE_TOL;
    let mut ok = cubic_ok
        && derivatives.iter().all(|c| c.rel_error < DERIVATIVE_TOL)
        && expansions.iter().all(|c| (c.computed - c.expected).abs() < EXPANSION_TOL);
    let mut report = json!({
        "branches": reports,
        "derivatives": derivatives,
        "expansions": expansions,
        "cubic_fit": {"alpha": alpha, "beta": beta, "residual": residual, "alpha_reference": alpha_ref, "beta_reference": beta_ref, "pass": cubic_ok},
    });
    if let Some(path) = triple_cache {
        let (table, how) = load_or_build_cache(path)?;
        let consistent = how == "written" || table == TripleProductTable::build(TRIPLE_CACHE_DEGREE);
        ok &= consistent;
        report["triple_cache"] = json!({"path": path, "entries": table.len(), "status": how, "consistent": consistent});
    }
    report["pass"] = json!(ok);
    save_report(cfg, "coeffs", &report)?;
    Ok(Outcome { report, ok })
}

pub fn parse_side(s: &str) -> Result<Side> {
    match s.to_ascii_lowercase().as_str() {
        "below" | "sub" => Ok(Side::Below),
        "above" | "super" => Ok(Side::Above),
        _ => Err(CliError::Config(format!("side must be below or above, got {s:?}"))),
    }
}

fn tag(g: Option<GroupName>) -> &'static str {
    g.map_or("0", |g| g.ident())
}

pub fn heteroclinic(cfg: &RunConfig, ell: usize, side: Side) -> Result<Outcome> {
    let selected: Vec<_> = CONNECTIONS.iter().filter(|c| c.ell == ell && c.side == side).collect();
    if selected.is_empty() {
        return Err(CliError::Config(format!("no connections at degree {ell} on side {side:?}")));
    }
    let params = HeteroclinicParams { l_max: cfg.l_max, classify_tol: cfg.classify_tol, lambda_offset: cfg.lambda_offset(ell), ..HeteroclinicParams::new(ell) };
    let outcomes: Vec<_> = selected.par_iter().map(|c| (c, heteroclinic_experiment(c, &params))).collect();
    let mut rows = Vec::new();
    let mut ok = true;
    for (c, out) in outcomes {
        let name = format!("heteroclinic_{ell}_{}_{}_to_{}", format!("{side:?}").to_lowercase(), tag(c.source), tag(c.target));
        let row = match out {
            Ok(o) => {
                let csv = cfg.output_dir.join(format!("{name}.csv"));
                write_file(&csv, &trajectory_csv(&o.record, "tau"))?;
                let realized = o.realized.is_some();
                ok &= realized || !c.required;
                json!({
                    "connection": c,
                    "lambda": o.lambda,
                    "source": o.source_id,
                    "expected_target": o.expected_target,
                    "status": if realized { "Realized" } else { "Unclassified" },
                    "target": o.target_id(),
                    "attempts": o.attempts,
                    "csv": csv,
                })
            }
            Err(e) => {
                ok &= !c.required;
                json!({"connection": c, "status": "Failed", "error": e.to_string()})
            }
        };
        rows.push(row);
    }
    let report = json!({"ell": ell, "side": side, "l_max": cfg.l_max, "connections": rows, "pass": ok});
    save_report(cfg, &format!("heteroclinic_{ell}_{}", format!("{side:?}").to_lowercase()), &report)?;
    Ok(Outcome { report, ok })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Datum {
    /// Constant field (the trivial equilibrium when zero).
    Isotropic(f64),
    /// Branch equilibrium `(group, ℓ, s)`.
    Branch(GroupName, usize, f64),
    /// Seeded random field of degree ≤ 3 with the given sup-norm bound.
    Random(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimMode {
    Rescaled { variant: FlowVariant, t_end: f64, dt: f64, lambda: f64 },
    /// `λ` is taken from the branch point for branch data.
    Original { lambda: Option<f64>, r_start: f64, r_end: f64, dr: f64 },
}

/// Random band-limited field with `Σ |c_ℓm| √((2ℓ+1)/4π) ≤ amplitude`, so `|v| ≤ amplitude`.
pub fn random_field(l_max: usize, degree: usize, amplitude: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = SpectralField::zeros(l_max);
    let n = n_coeffs(degree.min(l_max));
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let bound: f64 = raw.iter().enumerate().map(|(i, c)| c.abs() * ((2 * psc_core::spectral::degree_order(i).0 + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt()).sum();
    for (i, c) in raw.iter().enumerate() {
        v.coeffs_mut()[i] = amplitude * c / bound.max(1e-300);
    }
    v
}

fn branch_profile(group: GroupName, ell: usize, s: f64, l_max: usize) -> Result<(f64, SpectralField)> {
    let k = descriptor(group, ell, l_max)?;
    let p = branch_point_at(&k, s, 0.01)?;
    Ok((p.lambda, p.v))
}

pub fn simulate(cfg: &RunConfig, mode: &SimMode, datum: &Datum) -> Result<Outcome> {
    let field = |lambda: Option<f64>| -> Result<(Option<f64>, SpectralField)> {
        Ok(match datum {
            Datum::Isotropic(c) => (lambda, SpectralField::constant(cfg.l_max, *c)),
            Datum::Branch(g, ell, s) => {
                let (l, v) = branch_profile(*g, *ell, *s, cfg.l_max)?;
                (Some(l), v)
            }
            Datum::Random(a) => (lambda, random_field(cfg.l_max, 3, *a, cfg.seed)),
        })
    };
    match *mode {
        SimMode::Rescaled { variant, t_end, dt, lambda } => {
            let (_, v0) = field(Some(lambda))?;
            let rec = integrate_rescaled(&v0, lambda, t_end, dt, variant)?;
            let csv = cfg.output_dir.join("simulate_rescaled.csv");
            write_file(&csv, &trajectory_csv(&rec, "t"))?;
            let report = json!({
                "mode": "rescaled",
                "lambda": lambda,
                "variant": variant,
                "events": rec.events,
                "max_energy_increase": rec.max_energy_increase,
                "accepted_steps": rec.accepted_steps,
                "rejected_steps": rec.rejected_steps,
                "final_energy": rec.energies.last(),
                "csv": csv,
            });
            Ok(Outcome { report, ok: true })
        }
        SimMode::Original { lambda, r_start, r_end, dr } => {
            let (lam, v) = field(lambda)?;
            let lam = lam.ok_or_else(|| CliError::Config("--lambda is required for this datum".into()))?;
            let w0 = match datum {
                Datum::Isotropic(_) | Datum::Branch(..) => self_similar_datum(&v, lam, r_start),
                Datum::Random(_) => {
                    let mut w = self_similar_datum(&SpectralField::zeros(cfg.l_max), lam, r_start);
                    w.axpy(1.0, &v);
                    w
                }
            };
            let run = simulate_original(&w0, lam, r_start, r_end, dr)?;
            let csv = cfg.output_dir.join("simulate_original.csv");
            write_file(&csv, &trajectory_csv(&run.record, "r"))?;
            let report = json!({
                "mode": "original",
                "lambda": lam,
                "r_start": r_start,
                "events": run.record.events,
                "blowup_radius": run.blowup_radius,
                "steps": run.record.accepted_steps,
                "csv": csv,
            });
            Ok(Outcome { report, ok: run.blowup_radius.is_some() })
        }
    }
}

/// `trivial` or `<group>:<ell>:<s>`.
pub fn parse_profile(s: &str) -> Result<Option<(GroupName, usize, f64)>> {
    if s.eq_ignore_ascii_case("trivial") {
        return Ok(None);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("profile must be trivial or <group>:<ell>:<s>, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let g = parse_group(parts[0])?;
    let ell = parts[1].parse().map_err(|_| bad())?;
    let sv: f64 = parts[2].parse().map_err(|_| bad())?;
    Ok(Some((g, ell, sv)))
}

pub fn geometry(cfg: &RunConfig, profile: Option<(GroupName, usize, f64)>, lambda: Option<f64>, n_radii: usize) -> Result<Outcome> {
    if n_radii == 0 {
        return Err(CliError::Config("need at least one radius".into()));
    }
    let (lam, v, group) = match profile {
        None => {
            let lam = lambda.ok_or_else(|| CliError::Config("--lambda is required for the trivial profile".into()))?;
            (lam, SpectralField::zeros(cfg.l_max), GroupName::O3)
        }
        Some((g, ell, s)) => {
            let (lam, v) = branch_profile(g, ell, s, cfg.l_max)?;
            (lam, v, g)
        }
    };
    let radii: Vec<f64> = (1..=n_radii).map(|k| k as f64 / (n_radii + 1) as f64).collect();
    let metric = MetricProfile::build(&v, lam, &radii)?;
    let csv = cfg.output_dir.join("geometry.csv");
    write_file(&csv, &metric_csv(&metric))?;
    let near_one: Vec<f64> = (1..8).map(|k| 1.0 - 10f64.powi(-k)).collect();
    let cusp = center_cusp_check(lam)?;
    let report = json!({
        "lambda": lam,
        "group": group,
        "radial_residual": radial_residual(&v, lam, &radii)?,
        "min_g_rr": metric.min_g_ss(),
        "curvature_exponent": mean_curvature_exponent(&v, lam, &near_one)?,
        "cusp_exponent": cusp.exponent,
        "cusp_coefficient": cusp.coefficient,
        "minimal_surface_index": minimal_surface_index(lam).ok(),
        "monotone": monotonicity_operator_nonpositive(lam),
        "antipodal_admissible": antipodal_admissible(group),
        "csv": csv,
    });
    Ok(Outcome { ok: metric.min_g_ss() > 0.0, report })
}

pub fn lattice(cfg: &RunConfig) -> Result<Outcome> {
    let rows = lattice_dims();
    let ok = rows.iter().all(|r| r.expected_dim == r.computed_dim);
    let report = json!({"rows": rows, "pass": ok});
    save_report(cfg, "lattice", &report)?;
    Ok(Outcome { report, ok })
}
