//! CSV, JSON and triple-product cache serialization.

use std::fmt::Write as _;
use std::path::Path;

use psc_core::coupling::{TripleKey, TripleProductTable};
use psc_core::dynamics::TrajectoryRecord;
use psc_core::equilibrium::Branch;
use psc_core::geometry::MetricProfile;
use psc_core::spectral::{degree_order, n_coeffs};
use serde::Serialize;

use crate::error::{CliError, Result};

/// 17 significant digits; parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn coeff_header(l_max: usize) -> Vec<String> {
    (0..n_coeffs(l_max))
        .map(|i| {
            let (l, m) = degree_order(i);
            format!("coeff_{l}_{m}")
        })
        .collect()
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let row: Vec<String> = cells.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// `s,lambda,coeff_<l>_<m>,...`
pub fn branch_csv(branch: &Branch) -> String {
    let l_max = branch.points.first().map_or(0, |p| p.v.l_max());
    let mut out = String::new();
    push_row(&mut out, ["s".to_string(), "lambda".to_string()].into_iter().chain(coeff_header(l_max)));
    for p in &branch.points {
        push_row(&mut out, [num(p.s), num(p.lambda)].into_iter().chain(p.v.coeffs().iter().map(|c| num(*c))));
    }
    out
}

/// `<time>,energy,coeff_<l>_<m>,...`; the energy column is dropped when no energies were recorded.
pub fn trajectory_csv(rec: &TrajectoryRecord, time_label: &str) -> String {
    let l_max = rec.snapshots.first().map_or(0, |v| v.l_max());
    let with_energy = rec.energies.len() == rec.times.len() && !rec.energies.is_empty();
    let mut head = vec![time_label.to_string()];
    if with_energy {
        head.push("energy".into());
    }
    let mut out = String::new();
    push_row(&mut out, head.into_iter().chain(coeff_header(l_max)));
    for (i, (t, v)) in rec.times.iter().zip(&rec.snapshots).enumerate() {
        let mut cells = vec![num(*t)];
        if with_energy {
            cells.push(num(rec.energies[i]));
        }
        push_row(&mut out, cells.into_iter().chain(v.coeffs().iter().map(|c| num(*c))));
    }
    out
}

/// `s,r,theta,phi,u,g_rr,H`, one row per radius and grid point; `g_rr` is the `ds²` coefficient.
pub fn metric_csv(m: &MetricProfile) -> String {
    let mut out = String::from("s,r,theta,phi,u,g_rr,H\n");
    for (i, (&s, &r)) in m.s.iter().zip(&m.r).enumerate() {
        for (p, &(theta, phi)) in m.points.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{},{},{}", num(s), num(r), num(theta), num(phi), num(m.u[i][p]), num(m.g_ss[p]), num(m.h[i][p]));
        }
    }
    out
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::io(path, e))
}

/// One line per entry: `l1 m1 l2 m2 l3 m3 value`.
pub fn triple_cache_text(table: &TripleProductTable) -> String {
    let mut out = String::new();
    for (k, v) in table.entries() {
        let _ = writeln!(out, "{} {} {} {} {} {} {}", k[0].0, k[0].1, k[1].0, k[1].1, k[2].0, k[2].1, num(*v));
    }
    out
}

pub fn parse_triple_cache(text: &str, l_max: usize) -> Result<TripleProductTable> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |detail: String| CliError::Parse { what: "triple cache", line: n + 1, detail };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(bad(format!("expected 7 fields, found {}", f.len())));
        }
        let mut key: TripleKey = [(0, 0); 3];
        for j in 0..3 {
            let l: usize = f[2 * j].parse().map_err(|_| bad(format!("degree {:?}", f[2 * j])))?;
            let m: i64 = f[2 * j + 1].parse().map_err(|_| bad(format!("order {:?}", f[2 * j + 1])))?;
            if l > l_max || m.unsigned_abs() as usize > l {
                return Err(bad(format!("index ({l}, {m}) outside degree {l_max}")));
            }
            key[j] = (l, m);
        }
        let v: f64 = f[6].parse().map_err(|_| bad(format!("value {:?}", f[6])))?;
        entries.push((key, v));
    }
    Ok(TripleProductTable::from_entries(l_max, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(-0.1).parse::<f64>().unwrap(), -0.1);
    }

    #[test]
    fn cache_lines() {
        let t = TripleProductTable::build(1);
        let text = triple_cache_text(&t);
        assert!(text.lines().all(|l| l.split(' ').count() == 7));
        assert_eq!(parse_triple_cache(&text, 1).unwrap(), t);
        assert!(matches!(parse_triple_cache("0 0 0 0 0", 1), Err(CliError::Parse { line: 1, .. })));
        assert!(parse_triple_cache("2 0 0 0 2 0 1.0", 1).is_err());
    }

    #[test]
    fn headers() {
        assert_eq!(coeff_header(1), ["coeff_0_0", "coeff_1_-1", "coeff_1_0", "coeff_1_1"]);
    }
}
