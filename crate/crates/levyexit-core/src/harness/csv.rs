//! CSV emission: UTF-8, LF line endings, '.' decimal separator, and a
//! '#'-prefixed metadata block before the header row. Data values are
//! printed with 17 significant digits so a reader recovers them exactly.

use std::io::{self, Write};
use std::path::Path;

use crate::assembly::SolutionProfile;
use crate::error::Result;
use crate::harness::{ConvergenceReport, SweepResult};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub trait CsvRecord {
    fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()>;
}

impl CsvRecord for SolutionProfile {
    fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let p = &self.problem;
        writeln!(w, "# alpha={}", p.alpha)?;
        writeln!(w, "# eps={}", p.eps)?;
        writeln!(w, "# d={}", p.d)?;
        writeln!(w, "# drift={}", p.drift)?;
        writeln!(w, "# domain={},{}", p.domain.0, p.domain.1)?;
        writeln!(w, "# kind={}", p.kind.name())?;
        writeln!(w, "# scheme={}", self.scheme.name())?;
        writeln!(w, "# cells={}", self.grid.n_cells())?;
        writeln!(w, "# one_sided={}", self.one_sided)?;
        writeln!(w, "# solver={}", self.stats.method)?;
        writeln!(w, "# iterations={}", self.stats.iterations)?;
        writeln!(w, "# residual={:.3e}", self.stats.residual)?;
        writeln!(w, "x,value")?;
        for (x, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(w, "{},{}", num(*x), num(*v))?;
        }
        Ok(())
    }
}

impl CsvRecord for ConvergenceReport {
    fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# probe={}", self.probe)?;
        writeln!(w, "# reference={}", self.reference)?;
        writeln!(w, "# fitted_slope={}", num(self.fitted_slope))?;
        writeln!(w, "{},error", self.axis_name)?;
        for (x, e) in self.axis.iter().zip(&self.errors) {
            writeln!(w, "{},{}", num(*x), num(*e))?;
        }
        Ok(())
    }
}

impl CsvRecord for SweepResult {
    /// One blank-line-separated profile block per successful cell; failed
    /// cells turn into a single comment line so the sweep stays readable.
    fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (i, cell) in self.cells.iter().enumerate() {
            if i > 0 {
                writeln!(w)?;
            }
            writeln!(
                w,
                "# cell={} requested_alpha={} eps={} d={} domain={},{}",
                i, cell.alpha, cell.eps, cell.d, cell.domain.0, cell.domain.1
            )?;
            match &cell.result {
                Ok(profile) => profile.write_csv(w)?,
                Err(e) => writeln!(w, "# error={e}")?,
            }
        }
        Ok(())
    }
}

/// Write a record to `path`, creating parent directories as needed.
pub fn write_csv<T: CsvRecord>(value: &T, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    value.write_csv(&mut file)?;
    file.flush()?;
    Ok(())
}

/// Render a record to a string (stdout emission and tests).
pub fn to_csv_string<T: CsvRecord>(value: &T) -> String {
    let mut buf = Vec::new();
    value.write_csv(&mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_profile, ExperimentConfig};

    #[test]
    fn profile_csv_shape_and_roundtrip() {
        let config = ExperimentConfig {
            n_cells: Some(4),
            ..Default::default()
        };
        let profile = run_profile(&config).unwrap();
        let text = to_csv_string(&profile);
        let lines: Vec<&str> = text.lines().collect();
        let meta = lines.iter().filter(|l| l.starts_with('#')).count();
        let body: Vec<&str> = lines
            .iter()
            .filter(|l| !l.starts_with('#'))
            .copied()
            .collect();
        assert_eq!(meta, 12);
        // header + one row per node (5 nodes for 4 cells)
        assert_eq!(body.len(), 6);
        assert_eq!(body[0], "x,value");
        for (row, (x, v)) in body[1..]
            .iter()
            .zip(profile.grid.nodes().iter().zip(&profile.values))
        {
            let mut fields = row.split(',');
            let rx: f64 = fields.next().unwrap().parse().unwrap();
            let rv: f64 = fields.next().unwrap().parse().unwrap();
            assert_eq!(rx, *x);
            assert_eq!(rv, *v);
        }
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let config = ExperimentConfig {
            n_cells: Some(20),
            ..Default::default()
        };
        let a = to_csv_string(&run_profile(&config).unwrap());
        let b = to_csv_string(&run_profile(&config).unwrap());
        assert_eq!(a, b);
        assert!(!a.contains('\r'));
    }
}
