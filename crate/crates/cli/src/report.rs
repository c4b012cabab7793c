use std::io::Write;
use std::path::Path;

use crate::Failure;

/// Stated in the header of every CSV file.
pub const LOWER_BOUND_NOTE: &str = "empirical PoA values are lower bounds: maxima over the finite \
instance family listed here and over the equilibria found (priority orderings plus seeded restarts), \
standing in for suprema over all games and sensitivity distributions";

/// CSV table preceded by `#` comment lines.
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, header: &[&str]) -> Self {
        Self {
            comments: vec![format!("tollsub {command}"), LOWER_BOUND_NOTE.to_string()],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> Result<Vec<u8>, Failure> {
        let mut buf = Vec::new();
        for c in &self.comments {
            writeln!(buf, "# {c}").expect("writing to memory");
        }
        let mut w = csv::Writer::from_writer(buf);
        let io = |e: csv::Error| Failure::Input(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::Input(format!("csv: {e}")))
    }

    /// Writes to the file at `path`, or to `out` when no path is given.
    pub fn emit(&self, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
        let bytes = self.render()?;
        match path {
            Some(p) => std::fs::write(p, bytes)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
            None => Ok(out.write_all(&bytes)?),
        }
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}
