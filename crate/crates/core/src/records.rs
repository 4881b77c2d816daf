//! Vertex streams as text: CSV `x,y` lines (`#` comments and blank lines
//! skipped) or JSON lines `{"x":…,"y":…}`. Numbers are written in shortest
//! round-trip form, which never needs more than 17 significant digits.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.ndjson`/`.json` → JSONL, anything else → CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("jsonl" | "ndjson" | "json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            other => Err(format!("unknown format '{other}' (expected csv or jsonl)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    x: f64,
    y: f64,
}

/// Parses one line; `Ok(None)` for blank and comment lines. `line` is 1-based.
pub fn parse_line(text: &str, format: Format, line: usize) -> Result<Option<Point>> {
    let t = text.trim();
    if t.is_empty() || (format == Format::Csv && t.starts_with('#')) {
        return Ok(None);
    }
    let err = |msg: String| Error::Parse { line, msg };
    let p = match format {
        Format::Csv => {
            let mut it = t.split(',').map(str::trim);
            let (Some(xs), Some(ys), None) = (it.next(), it.next(), it.next()) else {
                return Err(err(format!("expected two comma-separated numbers, got '{t}'")));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("invalid number '{s}'")));
            Point::new(num(xs)?, num(ys)?)
        }
        Format::Jsonl => {
            let r: Record = serde_json::from_str(t).map_err(|e| err(e.to_string()))?;
            Point::new(r.x, r.y)
        }
    };
    if !p.is_finite() {
        return Err(err("non-finite coordinate".into()));
    }
    Ok(Some(p))
}

/// Streaming reader yielding one vertex per record.
pub struct Reader<R> {
    inner: R,
    format: Format,
    line: usize,
    buf: String,
}

impl<R: BufRead> Reader<R> {
    pub fn new(inner: R, format: Format) -> Self {
        Reader { inner, format, line: 0, buf: String::new() }
    }
}

impl<R: BufRead> Iterator for Reader<R> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Result<Point>> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => match parse_line(&self.buf, self.format, self.line) {
                    Ok(Some(p)) => return Some(Ok(p)),
                    Ok(None) => continue,
                    Err(e) => return Some(Err(e)),
                },
                Err(e) => return Some(Err(Error::Parse { line: self.line, msg: e.to_string() })),
            }
        }
    }
}

/// Reads a whole curve.
pub fn read_curve<R: BufRead>(inner: R, format: Format) -> Result<Vec<Point>> {
    Reader::new(inner, format).collect()
}

pub fn format_point(p: Point, format: Format) -> String {
    match format {
        Format::Csv => format!("{:?},{:?}", p.x, p.y),
        Format::Jsonl => serde_json::to_string(&Record { x: p.x, y: p.y }).expect("finite floats serialize"),
    }
}

pub fn write_point<W: Write>(w: &mut W, p: Point, format: Format) -> std::io::Result<()> {
    writeln!(w, "{}", format_point(p, format))
}
