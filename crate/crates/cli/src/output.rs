//! Outputs are staged in memory and flushed only after every computation
//! has succeeded, so a failing run leaves no partial files behind.

use std::path::{Path, PathBuf};

use qaept::io::{json_f64, table_csv, to_json_string, wavefunction_bytes, wavefunction_csv};
use qaept::quantum::WaveFunction;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn json(&mut self, name: impl Into<PathBuf>, v: &Value) {
        self.add(name, to_json_string(v).into_bytes());
    }

    /// A numeric table as CSV (also used for `bin`) and/or JSON records.
    pub fn table(&mut self, stem: &str, headers: &[&str], rows: &[Vec<f64>], formats: &[Format]) {
        if formats.iter().any(|f| matches!(f, Format::Csv | Format::Bin)) {
            self.add(format!("{stem}.csv"), table_csv(headers, rows).into_bytes());
        }
        if formats.contains(&Format::Json) {
            let records: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = headers.iter().zip(r).map(|(h, &v)| (h.to_string(), json_f64(v))).collect();
                    Value::Object(m)
                })
                .collect();
            self.json(format!("{stem}.json"), &Value::Array(records));
        }
    }

    pub fn wavefunction(&mut self, stem: &str, psi: &WaveFunction, formats: &[Format]) {
        for f in formats {
            match f {
                Format::Csv => self.add(format!("{stem}.csv"), wavefunction_csv(psi).into_bytes()),
                Format::Bin => self.add(format!("{stem}.bin"), wavefunction_bytes(psi)),
                Format::Json => self.json(format!("{stem}.json"), &wavefunction_json(psi)),
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(p, _)| p.display().to_string()).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let fail = |p: &Path, e: std::io::Error| CliError::Output { path: p.display().to_string(), message: e.to_string() };
        std::fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
        for (name, bytes) in &self.files {
            let p = dir.join(name);
            if let Some(parent) = p.parent() {
                std::fs::create_dir_all(parent).map_err(|e| fail(parent, e))?;
            }
            std::fs::write(&p, bytes).map_err(|e| fail(&p, e))?;
        }
        Ok(())
    }
}

pub fn wavefunction_json(psi: &WaveFunction) -> Value {
    let g = psi.grid;
    json!({
        "t": json_f64(psi.t),
        "hbar": json_f64(psi.consts.hbar),
        "m": json_f64(psi.consts.m),
        "grid": {"x_min": json_f64(g.x_min()), "x_max": json_f64(g.x_max()), "n": g.len()},
        "re": psi.samples.iter().map(|z| json_f64(z.re)).collect::<Vec<_>>(),
        "im": psi.samples.iter().map(|z| json_f64(z.im)).collect::<Vec<_>>(),
    })
}

/// File-name tag for a sample time, e.g. `2.5` becomes `t2.500000`.
pub fn time_tag(t: f64) -> String {
    format!("t{t:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use qaept::quantum::{Grid, PhysicalConstants};

    #[test]
    fn staged_layout() {
        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        let psi = WaveFunction::zeros(g, 0.5, PhysicalConstants::default());
        let mut s = Staged::new();
        s.wavefunction("psi", &psi, &[Format::Csv, Format::Json, Format::Bin]);
        s.table("tab", &["a", "b"], &[vec![1.0, 2.0]], &[Format::Json]);
        assert_eq!(s.names(), ["psi.csv", "psi.json", "psi.bin", "tab.json"]);
        let dir = tempfile::tempdir().unwrap();
        s.write(&dir.path().join("nested")).unwrap();
        let back = qaept::io::read_wavefunction_binary(&dir.path().join("nested/psi.bin")).unwrap();
        assert_eq!(back.t, 0.5);
        assert_eq!(time_tag(2.5), "t2.500000");
    }
}
