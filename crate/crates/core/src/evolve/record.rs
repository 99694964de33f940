//! Norm time series along a trajectory and their CSV form.
//!
//! Header: `t,linf,s=<v>...,besov_nu=<v>...,sobolev_l=<l>,dt`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::monitors::MonitorVerdict;
use crate::error::{MuskatError, Result};
use crate::table::{sci, Table};

/// Values recorded at one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub linf: f64,
    pub s_norms: Vec<f64>,
    pub besov: Vec<f64>,
    pub sobolev: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub s_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    pub sobolev_order: f64,
    pub times: Vec<f64>,
    pub linf: Vec<f64>,
    /// `s_norms[j][i]`: `||f||_{s_j}` at snapshot `i`.
    pub s_norms: Vec<Vec<f64>>,
    /// `besov[j][i]`: `||f||_{nu_j, inf}` at snapshot `i`.
    pub besov: Vec<Vec<f64>>,
    pub sobolev: Vec<f64>,
    /// Step size that produced each snapshot (0 for the initial one).
    pub dt: Vec<f64>,
    /// Accepted steps up to each snapshot.
    pub steps: Vec<usize>,
    pub monitors: Vec<MonitorVerdict>,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

impl TrajectoryRecord {
    pub fn new(s_values: Vec<f64>, nu_values: Vec<f64>, sobolev_order: f64) -> Self {
        Self {
            s_norms: vec![Vec::new(); s_values.len()],
            besov: vec![Vec::new(); nu_values.len()],
            s_values,
            nu_values,
            sobolev_order,
            ..Self::default()
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, snap: Snapshot, steps: usize) -> Result<()> {
        if snap.s_norms.len() != self.s_values.len() || snap.besov.len() != self.nu_values.len() {
            return Err(MuskatError::Invariant("snapshot does not match record columns".into()));
        }
        if let Some(&last) = self.times.last() {
            if !(snap.t > last) {
                return Err(MuskatError::Invariant(format!(
                    "snapshot time {} does not follow {last}",
                    snap.t
                )));
            }
        }
        let bad = snap
            .s_norms
            .iter()
            .chain(&snap.besov)
            .chain([&snap.linf, &snap.sobolev])
            .any(|v| !(v.is_finite() && *v >= 0.0));
        if bad {
            return Err(MuskatError::Invariant(format!(
                "non-finite or negative norm at t = {}",
                snap.t
            )));
        }
        self.times.push(snap.t);
        self.linf.push(snap.linf);
        for (col, v) in self.s_norms.iter_mut().zip(snap.s_norms) {
            col.push(v);
        }
        for (col, v) in self.besov.iter_mut().zip(snap.besov) {
            col.push(v);
        }
        self.sobolev.push(snap.sobolev);
        self.dt.push(snap.dt);
        self.steps.push(steps);
        Ok(())
    }

    /// `||f||_s` series, if `s` was recorded.
    pub fn series(&self, s: f64) -> Option<&[f64]> {
        let j = self.s_values.iter().position(|&v| same(v, s))?;
        Some(&self.s_norms[j])
    }

    /// `||f||_{nu, inf}` series, if `nu` was recorded.
    pub fn besov_series(&self, nu: f64) -> Option<&[f64]> {
        let j = self.nu_values.iter().position(|&v| same(v, nu))?;
        Some(&self.besov[j])
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_string(), "linf".to_string()];
        cols.extend(self.s_values.iter().map(|s| format!("s={s}")));
        cols.extend(self.nu_values.iter().map(|v| format!("besov_nu={v}")));
        cols.push(format!("sobolev_l={}", self.sobolev_order));
        cols.push("dt".to_string());
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.header())?;
        for i in 0..self.len() {
            let mut row = vec![sci(self.times[i]), sci(self.linf[i])];
            row.extend(self.s_norms.iter().map(|c| sci(c[i])));
            row.extend(self.besov.iter().map(|c| sci(c[i])));
            row.push(sci(self.sobolev[i]));
            row.push(sci(self.dt[i]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    /// Reads a record CSV; monitor verdicts and step counts are not stored.
    pub fn load(path: &Path) -> Result<Self> {
        let table = Table::read(path)?;
        Self::from_table(&table).map_err(|message| MuskatError::Parse {
            path: Some(path.to_path_buf()),
            message,
        })
    }

    pub fn from_table(table: &Table) -> std::result::Result<Self, String> {
        let h = &table.header;
        if h.len() < 4 || h[0] != "t" || h[1] != "linf" || h[h.len() - 1] != "dt" {
            return Err(format!("not a trajectory header: {}", h.join(",")));
        }
        let mut s_values = Vec::new();
        let mut nu_values = Vec::new();
        let mut sobolev_order = None;
        for name in &h[2..h.len() - 1] {
            let parse = |v: &str| v.parse::<f64>().map_err(|e| format!("column '{name}': {e}"));
            if let Some(v) = name.strip_prefix("s=") {
                s_values.push(parse(v)?);
            } else if let Some(v) = name.strip_prefix("besov_nu=") {
                nu_values.push(parse(v)?);
            } else if let Some(v) = name.strip_prefix("sobolev_l=") {
                sobolev_order = Some(parse(v)?);
            } else {
                return Err(format!("unknown column '{name}'"));
            }
        }
        let sobolev_order = sobolev_order.ok_or("missing sobolev_l column")?;
        let (ns, nn) = (s_values.len(), nu_values.len());
        let mut rec = Self::new(s_values, nu_values, sobolev_order);
        for row in &table.rows {
            let snap = Snapshot {
                t: row[0],
                linf: row[1],
                s_norms: row[2..2 + ns].to_vec(),
                besov: row[2 + ns..2 + ns + nn].to_vec(),
                sobolev: row[2 + ns + nn],
                dt: row[3 + ns + nn],
            };
            rec.push(snap, 0).map_err(|e| e.to_string())?;
        }
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TrajectoryRecord {
        let mut r = TrajectoryRecord::new(vec![0.0, 1.0, 2.5], vec![-1.0], 2.0);
        for i in 0..3 {
            let t = i as f64 * 0.5;
            let e = (-t).exp();
            r.push(
                Snapshot {
                    t,
                    linf: 0.1 * e,
                    s_norms: vec![0.1 * e, 0.1 * e, 0.1 * e],
                    besov: vec![0.05 * e],
                    sobolev: 0.3 * e,
                    dt: if i == 0 { 0.0 } else { 0.5 },
                },
                i,
            )
            .unwrap();
        }
        r
    }

    #[test]
    fn header_layout() {
        assert_eq!(sample().header(), "t,linf,s=0,s=1,s=2.5,besov_nu=-1,sobolev_l=2,dt");
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        r.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0.000000000000e+00,1.000000000000e-01,"));
        let back = TrajectoryRecord::load(&path).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.s_values, r.s_values);
        for (a, b) in back.series(2.5).unwrap().iter().zip(r.series(2.5).unwrap()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn rejects_bad_snapshots() {
        let mut r = sample();
        let snap = Snapshot {
            t: 0.2,
            linf: 0.0,
            s_norms: vec![0.0; 3],
            besov: vec![0.0],
            sobolev: 0.0,
            dt: 0.1,
        };
        assert!(r.push(snap.clone(), 9).is_err());
        let nan = Snapshot {
            t: 5.0,
            linf: f64::NAN,
            ..snap
        };
        assert!(r.push(nan, 9).is_err());
    }
}
