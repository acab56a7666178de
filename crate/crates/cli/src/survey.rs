//! Survey rows and the versioned, append-only CSV they live in.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const CSV_VERSION_LINE: &str = "# costas-lab v1";
pub const COLUMNS: [&str; 10] = [
    "q",
    "family",
    "delta",
    "size",
    "exact",
    "bound",
    "bound_kind",
    "pass",
    "status",
    "wall_s",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub q: u64,
    pub family: String,
    pub delta: Option<f64>,
    pub size: u64,
    pub exact: Option<u32>,
    pub bound: f64,
    pub bound_kind: String,
    pub pass: Option<bool>,
    /// `ok` or `skipped`.
    pub status: String,
    pub wall_s: Option<f64>,
}

impl SurveyRow {
    pub fn key(&self) -> (u64, String, String) {
        (self.q, self.family.clone(), fmt_delta(self.delta))
    }

    fn fields(&self) -> Vec<String> {
        let opt = |o: Option<String>| o.unwrap_or_default();
        vec![
            self.q.to_string(),
            self.family.clone(),
            fmt_delta(self.delta),
            self.size.to_string(),
            opt(self.exact.map(|e| e.to_string())),
            fmt_bound(self.bound),
            self.bound_kind.clone(),
            opt(self.pass.map(|p| p.to_string())),
            self.status.clone(),
            opt(self.wall_s.map(|w| format!("{w:.3}"))),
        ]
    }
}

fn fmt_delta(d: Option<f64>) -> String {
    d.map(|d| d.to_string()).unwrap_or_default()
}

fn fmt_bound(b: f64) -> String {
    if b.fract() == 0.0 {
        format!("{b:.0}")
    } else {
        format!("{b:.6}")
    }
}

/// Writes the version line and column header.
pub fn write_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    w.flush()
}

pub fn write_row<W: Write>(out: &mut W, row: &SurveyRow) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
    w.write_record(row.fields())?;
    w.flush()?;
    drop(w);
    out.flush()
}

/// Keys `(q, family, delta)` of completed rows already in `path`.
pub fn completed_keys(path: &Path) -> io::Result<BTreeSet<(u64, String, String)>> {
    let mut keys = BTreeSet::new();
    if !path.exists() {
        return Ok(keys);
    }
    let reader = BufReader::new(File::open(path)?);
    for line in reader.lines() {
        let line = line?;
        if line.starts_with('#') || line.starts_with("q,") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != COLUMNS.len() || cols[8] != "ok" {
            continue;
        }
        if let Ok(q) = cols[0].parse() {
            keys.insert((q, cols[1].to_string(), cols[2].to_string()));
        }
    }
    Ok(keys)
}

/// Opens `path` for appending, writing the header when the file is new.
///
/// A trailing partial line from an interrupted run is cut off first.
pub fn open_append(path: &Path) -> io::Result<File> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    if !fresh {
        let text = std::fs::read(path)?;
        if let Some(last_nl) = text.iter().rposition(|&b| b == b'\n') {
            if last_nl + 1 != text.len() {
                OpenOptions::new().write(true).open(path)?.set_len(last_nl as u64 + 1)?;
            }
        }
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        write_header(&mut file)?;
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(q: u64, status: &str) -> SurveyRow {
        SurveyRow {
            q,
            family: "G".into(),
            delta: None,
            size: 4,
            exact: Some(3),
            bound: 4.0,
            bound_kind: "UpperBound".into(),
            pass: Some(true),
            status: status.into(),
            wall_s: None,
        }
    }

    #[test]
    fn header_then_rows() {
        let mut buf = Vec::new();
        write_header(&mut buf).unwrap();
        write_row(&mut buf, &row(11, "ok")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# costas-lab v1\nq,family,delta,size,exact,bound,bound_kind,pass,status,wall_s\n11,G,,4,3,4,UpperBound,true,ok,\n"
        );
    }

    #[test]
    fn resume_skips_done_and_trims_partial() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        {
            let mut f = open_append(&path).unwrap();
            write_row(&mut f, &row(11, "ok")).unwrap();
            write_row(&mut f, &row(13, "skipped")).unwrap();
            f.write_all(b"16,G,,8").unwrap();
        }
        let keys = completed_keys(&path).unwrap();
        assert_eq!(keys.len(), 1);
        assert!(keys.contains(&(11, "G".into(), String::new())));
        drop(open_append(&path).unwrap());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with("skipped,\n"));
        assert_eq!(text.matches(CSV_VERSION_LINE).count(), 1);
    }
}
