//! Output assembly: a sweep is an ordered table plus a metadata block, and
//! both serializers are pure functions of it, so identical scenarios give
//! byte-identical files.

use std::io::Write;

use crate::scenario::OutputFormat;

/// One table cell: a number formatted on output, or verbatim text
/// (status flags, booleans).
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "true" } else { "false" }.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    /// `key = value` provenance lines, echoed in order.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Format with `sig` significant digits, plain decimal in a moderate
/// exponent window and scientific outside it, trailing zeros stripped —
/// printf's %g, pinned down so output bytes never depend on platform
/// quirks.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        // Strip trailing zeros in the mantissa: 1.2300e-5 -> 1.23e-5.
        match s.split_once('e') {
            Some((mantissa, e)) => {
                let m = if mantissa.contains('.') {
                    mantissa.trim_end_matches('0').trim_end_matches('.')
                } else {
                    mantissa
                };
                format!("{m}e{e}")
            }
            None => s,
        }
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn render_cell(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Num(x) => format_sig(*x, digits),
        Cell::Text(s) => s.clone(),
    }
}

pub fn write_csv(out: &mut dyn Write, sweep: &SweepOutput, digits: usize) -> std::io::Result<()> {
    for (k, v) in &sweep.metadata {
        writeln!(out, "# {k} = {v}")?;
    }
    writeln!(out, "{}", sweep.columns.join(","))?;
    for row in &sweep.rows {
        let cells: Vec<String> = row.iter().map(|c| render_cell(c, digits)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_json(out: &mut dyn Write, sweep: &SweepOutput, digits: usize) -> std::io::Result<()> {
    // serde_json's map keeps keys sorted, which is deterministic but loses
    // the metadata order; emit metadata as an ordered array of pairs
    // instead.
    let meta: Vec<serde_json::Value> = sweep
        .metadata
        .iter()
        .map(|(k, v)| serde_json::json!([k, v]))
        .collect();
    let rows: Vec<serde_json::Value> = sweep
        .rows
        .iter()
        .map(|row| {
            serde_json::Value::Array(
                row.iter()
                    .map(|c| match c {
                        // Render numbers through the same fixed-precision
                        // formatter as CSV so the two formats agree.
                        Cell::Num(x) if x.is_finite() => {
                            serde_json::json!(format_sig(*x, digits)
                                .parse::<f64>()
                                .expect("formatter emits valid numbers"))
                        }
                        Cell::Num(x) => serde_json::json!(format_sig(*x, digits)),
                        Cell::Text(s) => serde_json::json!(s),
                    })
                    .collect(),
            )
        })
        .collect();
    let doc = serde_json::json!({
        "metadata": meta,
        "columns": sweep.columns,
        "rows": rows,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
}

pub fn write(out: &mut dyn Write, sweep: &SweepOutput, format: OutputFormat, digits: usize) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, sweep, digits),
        OutputFormat::Json => write_json(out, sweep, digits),
    }
}
