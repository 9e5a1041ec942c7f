//! Deterministic CSV emission and parsing. Floats print with 17 significant
//! digits so parsing reproduces the original values bit-exactly; files use
//! UTF-8 with LF line endings and contain no timestamps.

use pta_core::analysis::EigenTrace;
use pta_core::controller::{pt_gain, PtGainParams};
use pta_core::sim::Trajectory;
use std::io::Write;
use std::path::Path;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a trajectory with the fixed column order
/// `t, x1..xn, norm2, u, k1..k4, latched`. Control columns are empty for
/// uncontrolled runs; `gain_params` supplies the time-varying gain entries of
/// controlled runs before the switch.
pub fn write_trajectory(
    path: &Path,
    traj: &Trajectory,
    gain_params: Option<&PtGainParams>,
) -> std::io::Result<()> {
    let n = traj.states().first().map(|x| x.len()).unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",norm2,u,k1,k2,k3,k4,latched\n");
    let t_s = traj.switch_event().map(|e| e.t_s);
    for (i, &t) in traj.times().iter().enumerate() {
        out.push_str(&fmt(t));
        for v in &traj.states()[i] {
            out.push(',');
            out.push_str(&fmt(*v));
        }
        out.push(',');
        out.push_str(&fmt(traj.norms()[i]));
        out.push(',');
        if let Some(inputs) = traj.inputs() {
            out.push_str(&fmt(inputs[i]));
        }
        let latched = t_s.map(|ts| t >= ts).unwrap_or(false);
        match (traj.inputs().is_some(), gain_params) {
            (true, Some(params)) => {
                let gain = if latched {
                    traj.switch_event().expect("latched implies event").frozen_gain.clone()
                } else {
                    pt_gain(t, params).expect("pre-switch times are inside the gain domain")
                };
                for j in 0..4 {
                    out.push(',');
                    out.push_str(&fmt(gain.get(0, j)));
                }
            }
            _ => out.push_str(",,,,"),
        }
        out.push(',');
        out.push_str(if latched { "1" } else { "0" });
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

#[derive(Debug, Clone)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub norm2: f64,
    pub u: Option<f64>,
    pub gain: Option<[f64; 4]>,
    pub latched: bool,
}

/// Parse a trajectory.csv written by [`write_trajectory`].
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().filter(|c| c.starts_with('x')).count();
    if n == 0 || cols.len() != n + 8 {
        return Err(format!("unexpected header '{header}'"));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(format!("line {}: expected {} fields", lineno + 2, cols.len()));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", lineno + 2));
        let t = parse(fields[0])?;
        let x = fields[1..=n].iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        let norm2 = parse(fields[n + 1])?;
        let u = if fields[n + 2].is_empty() { None } else { Some(parse(fields[n + 2])?) };
        let gain_fields = &fields[n + 3..n + 7];
        let gain = if gain_fields.iter().all(|f| f.is_empty()) {
            None
        } else {
            let mut g = [0.0; 4];
            for (j, f) in gain_fields.iter().enumerate() {
                g[j] = parse(f)?;
            }
            Some(g)
        };
        let latched = fields[n + 7] == "1";
        rows.push(TrajectoryRow { t, x, norm2, u, gain, latched });
    }
    Ok(rows)
}

/// Write an eigenvalue trace with columns `t, re1, im1, …, ren, imn`,
/// eigenvalues sorted by descending real part at each time.
pub fn write_eigtrace(path: &Path, trace: &EigenTrace) -> std::io::Result<()> {
    let n = trace.spectra().first().map(|s| s.len()).unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",re{i},im{i}"));
    }
    out.push('\n');
    for (i, &t) in trace.times().iter().enumerate() {
        out.push_str(&fmt(t));
        for ev in &trace.spectra()[i] {
            out.push(',');
            out.push_str(&fmt(ev.re));
            out.push(',');
            out.push_str(&fmt(ev.im));
        }
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// One eigtrace row: the time and the (re, im) pairs.
pub type EigRow = (f64, Vec<(f64, f64)>);

/// Parse an eigtrace.csv.
pub fn read_eigtrace(path: &Path) -> Result<Vec<EigRow>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let ncols = header.split(',').count();
    if ncols < 3 || (ncols - 1) % 2 != 0 {
        return Err(format!("unexpected header '{header}'"));
    }
    let n = (ncols - 1) / 2;
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            return Err("ragged row".into());
        }
        let t = fields[0].parse::<f64>().map_err(|e| e.to_string())?;
        let mut evs = Vec::with_capacity(n);
        for j in 0..n {
            let re = fields[1 + 2 * j].parse::<f64>().map_err(|e| e.to_string())?;
            let im = fields[2 + 2 * j].parse::<f64>().map_err(|e| e.to_string())?;
            evs.push((re, im));
        }
        rows.push((t, evs));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pta_core::sim::{integrate, IntegratorConfig};
    use pta_core::systems::{catalog_get, params_from};

    #[test]
    fn trajectory_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let sys = catalog_get("remark2-diagonal", &params_from(&[("tau", 1.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        let traj = integrate(&sys, &[1.0, -0.5], 0.0, 0.9, &cfg).unwrap();
        let path = dir.path().join("trajectory.csv");
        write_trajectory(&path, &traj, None).unwrap();
        let rows = read_trajectory(&path).unwrap();
        assert_eq!(rows.len(), traj.len());
        for (row, ((&t, state), &norm)) in rows.iter().zip(
            traj.times().iter().zip(traj.states()).zip(traj.norms()),
        ) {
            assert_eq!(row.t, t);
            assert_eq!(row.x.as_slice(), state.as_slice());
            assert_eq!(row.norm2, norm);
            assert!(row.u.is_none());
            assert!(row.gain.is_none());
            assert!(!row.latched);
        }
    }
}
