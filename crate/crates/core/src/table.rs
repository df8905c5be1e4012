//! Plain-text data tables: a comment block, one header line, then
//! tab-separated rows at fixed 12-significant-digit formatting so repeated
//! runs are byte-identical and diffable as regression goldens.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::lindblad::PopulationTrace;
use crate::propagator::IntensityTrace;

/// Fixed 12-significant-digit scientific formatting.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write comments, a header and rows of numeric columns.
pub fn write_table<W: Write>(
    mut w: W,
    comments: &[String],
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", header.join("\t"))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| fmt_sig12(x)).collect();
        writeln!(w, "{}", line.join("\t"))?;
    }
    Ok(())
}

pub fn write_table_file(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    write_table(&mut f, comments, header, rows)
}

impl IntensityTrace {
    /// Full per-site trace table: columns z[cm], I_site0, I_site1, …
    pub fn write_table<W: Write>(
        &self,
        w: W,
        comments: &[String],
        site_labels: &[String],
    ) -> Result<()> {
        let mut header = vec!["z[cm]".to_string()];
        for (i, _) in self.intensities.first().iter().flat_map(|r| r.iter()).enumerate() {
            let label = site_labels
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("site{i}"));
            header.push(format!("I_{label}"));
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = self
            .z_grid
            .iter()
            .zip(&self.intensities)
            .map(|(&z, row)| std::iter::once(z).chain(row.iter().copied()).collect());
        write_table(w, comments, &header_refs, rows)
    }
}

impl PopulationTrace {
    /// Population table: columns z[cm], then one column per basis state.
    pub fn write_table<W: Write>(&self, w: W, comments: &[String]) -> Result<()> {
        let mut header = vec!["z[cm]".to_string()];
        header.extend(self.labels.iter().cloned());
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = self
            .z_grid
            .iter()
            .zip(&self.populations)
            .map(|(&z, row)| std::iter::once(z).chain(row.iter().copied()).collect());
        write_table(w, comments, &header_refs, rows)
    }
}
