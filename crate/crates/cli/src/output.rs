//! Rendering command results as aligned tables, CSV or JSON.
//!
//! Tables round numbers to a number of significant digits. CSV and JSON
//! carry full precision, so rounding never reaches data meant for reuse.

use std::io::{self, Write};

use clap::ValueEnum;
use divlab::curves::format_csv_value;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A titled block of rows.
#[derive(Debug, Clone)]
pub struct Section {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            title: None,
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }
}

/// What a command prints: tabular sections plus the JSON document.
pub struct Report {
    pub sections: Vec<Section>,
    pub json: serde_json::Value,
}

impl Report {
    pub fn new(sections: Vec<Section>, json: &impl Serialize) -> Self {
        Self {
            sections,
            json: serde_json::to_value(json).expect("command results serialize to JSON"),
        }
    }

    pub fn write(&self, out: &mut impl Write, format: Format, digits: usize) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                for (i, s) in self.sections.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    write_csv(out, s)?;
                }
                Ok(())
            }
            Format::Table => {
                for (i, s) in self.sections.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    write_table(out, s, digits)?;
                }
                Ok(())
            }
        }
    }
}

fn write_csv(out: &mut impl Write, s: &Section) -> io::Result<()> {
    if let Some(t) = &s.title {
        writeln!(out, "# {t}")?;
    }
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(&s.headers)?;
    for row in &s.rows {
        w.write_record(row.iter().map(|c| match c {
            Cell::Num(v) => format_csv_value(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
        }))?;
    }
    w.flush()
}

fn write_table(out: &mut impl Write, s: &Section, digits: usize) -> io::Result<()> {
    if let Some(t) = &s.title {
        writeln!(out, "{t}")?;
    }
    let rendered: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Cell::Num(v) => format_sig(*v, digits),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(t) => t.clone(),
                })
                .collect()
        })
        .collect();
    let numeric: Vec<bool> = (0..s.headers.len())
        .map(|j| {
            s.rows
                .iter()
                .all(|r| matches!(r[j], Cell::Num(_) | Cell::Int(_)))
        })
        .collect();
    let widths: Vec<usize> = (0..s.headers.len())
        .map(|j| {
            rendered
                .iter()
                .map(|r| r[j].chars().count())
                .chain([s.headers[j].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if numeric[j] {
                    format!("{c:>w$}", w = widths[j])
                } else {
                    format!("{c:<w$}", w = widths[j])
                }
            })
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(&s.headers))?;
    for r in &rendered {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

/// `v` rounded to `digits` significant digits, trailing zeros dropped.
///
/// Values too large or too small for a short fixed-point form use
/// scientific notation.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0.0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-5..=15).contains(&exp) {
        let (mantissa, e) = sci.split_at(sci.find('e').unwrap());
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}{e}");
    }
    let decimals = digits as i32 - 1 - exp;
    if decimals < 0 {
        let scale = 10f64.powi(-decimals);
        return trim_zeros(&format!("{:.0}", (v / scale).round() * scale));
    }
    trim_zeros(&format!("{v:.prec$}", prec = decimals as usize))
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(2.0, 6), "2.0");
        assert_eq!(format_sig(0.063_864_2, 6), "0.0638642");
        assert_eq!(format_sig(0.063_864_2, 3), "0.0639");
        assert_eq!(format_sig(6.495_854_5, 3), "6.5");
        assert_eq!(format_sig(-3.074_12, 4), "-3.074");
        assert_eq!(format_sig(123_456.7, 3), "123000.0");
        assert_eq!(format_sig(1e-10, 6), "1e-10");
        assert_eq!(format_sig(f64::INFINITY, 6), "inf");
        assert_eq!(format_sig(0.0, 6), "0.0");
    }

    #[test]
    fn table_alignment() {
        let mut s = Section::new(["name", "value"]);
        s.row(vec!["a".into(), 1.5.into()]);
        s.row(vec!["long".into(), 10.25.into()]);
        let mut buf = Vec::new();
        Report::new(vec![s], &())
            .write(&mut buf, Format::Table, 6)
            .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "name  value\na       1.5\nlong  10.25\n"
        );
    }
}
