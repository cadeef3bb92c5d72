//! File formats: profile CSV (`r,value`), branch-table CSV, and the float
//! formatting rule shared by both. Floats are written with 17 significant
//! digits so every value round-trips exactly and identical runs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::curves::BranchTable;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

/// 17 significant digits: lossless for f64 and deterministic.
pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        return "inf".to_string();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    format!("{x:.16e}")
}

/// Write a profile as `r,value` rows, radii ascending.
pub fn write_profile_csv(path: &Path, profile: &RadialProfile) -> Result<()> {
    let mut out = String::with_capacity(profile.len() * 48);
    out.push_str("r,value\n");
    for (r, v) in profile.nodes().iter().zip(profile.values()) {
        out.push_str(&format_float(*r));
        out.push(',');
        out.push_str(&format_float(*v));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Read a profile CSV written by [`write_profile_csv`] (or compatible).
pub fn read_profile_csv(path: &Path, n: usize) -> Result<RadialProfile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 && line.trim().eq_ignore_ascii_case("r,value") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let r = parts
            .next()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad radius on line {}", idx + 1)))?;
        let v = parts
            .next()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad value on line {}", idx + 1)))?;
        nodes.push(r);
        values.push(v);
    }
    RadialProfile::new(n, nodes, values)
}

/// Branch table CSV with the fixed header
/// `lambda,a,M,kinetic,quasi,lp,sup_norm,lagrange_residual,pohozaev_residual`.
pub fn write_branch_csv(path: &Path, table: &BranchTable) -> Result<()> {
    let mut out = String::new();
    out.push_str("lambda,a,M,kinetic,quasi,lp,sup_norm,lagrange_residual,pohozaev_residual\n");
    for q in &table.points {
        let row = [
            q.lambda,
            q.a,
            q.m,
            q.kinetic,
            q.quasi,
            q.lp,
            q.sup_norm,
            q.lagrange_residual,
            q.pohozaev_residual,
        ];
        let cells: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    }
    let mut file = fs::File::create(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    file.write_all(bytes).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::graded_grid;

    #[test]
    fn profile_round_trip_is_lossless() {
        let grid = graded_grid(1e-4, 1.05, 0.1, 6.0).unwrap();
        let profile = RadialProfile::from_fn(2, grid, |r| (-0.7 * r * r).exp() * 1.37).unwrap();
        let dir = std::env::temp_dir().join(format!("groundstate-io-{}", std::process::id()));
        let path = dir.join("profile.csv");
        write_profile_csv(&path, &profile).unwrap();
        let back = read_profile_csv(&path, 2).unwrap();
        assert_eq!(profile.nodes(), back.nodes());
        assert_eq!(profile.values(), back.values());
        // identical write is byte-identical
        let first = std::fs::read(&path).unwrap();
        write_profile_csv(&path, &profile).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn float_formatting_has_enough_digits() {
        let x = std::f64::consts::PI * 1e-7;
        let s = format_float(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(format_float(f64::INFINITY), "inf");
    }
}
