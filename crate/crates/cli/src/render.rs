//! Table and JSON rendering helpers.

use std::fmt::Write as _;

use cbr_markov::cbr::{cbr_transition_matrix, mean_phases, CbrError, CbrParameters};
use cbr_markov::markov::{canonical_form, RatMatrix};
use cbr_markov::Rational;
use serde_json::{json, Value};

/// Terminal styling. Only bold headings, and only when enabled.
#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub bold: bool,
}

impl Style {
    /// Bold when stdout is a terminal and `NO_COLOR` is unset or empty.
    pub fn detect() -> Self {
        use std::io::IsTerminal;
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style {
            bold: !no_color && std::io::stdout().is_terminal(),
        }
    }

    pub fn heading(&self, text: &str) -> String {
        if self.bold {
            format!("\x1b[1m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

/// `7 (7.00000)`, `1/3 (0.333333)`.
pub fn both(q: &Rational) -> String {
    format!("{q} ({})", q.to_decimal())
}

/// Machine form of a rational: exact fraction plus decimal.
pub fn exact(q: &Rational) -> Value {
    json!({ "exact": q.to_string(), "decimal": q.to_decimal() })
}

pub fn exact_vec<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(qs.into_iter().map(exact).collect())
}

pub fn exact_matrix(m: &RatMatrix) -> Value {
    Value::Array(m.iter_rows().map(exact_vec).collect())
}

pub fn params_json(p: &CbrParameters) -> Value {
    json!({ "p31": exact(p.p31()), "p33": exact(p.p33()), "p34": exact(p.p34()) })
}

pub fn params_line(p: &CbrParameters) -> String {
    format!(
        "p31 = {}  p33 = {}  p34 = {}",
        both(p.p31()),
        both(p.p33()),
        both(p.p34())
    )
}

/// Left-aligned text table with a header row and a label column.
pub fn table(corner: &str, header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let mut widths = vec![corner.len()];
    widths.extend(header.iter().map(String::len));
    for (label, cells) in rows {
        widths[0] = widths[0].max(label.len());
        for (j, c) in cells.iter().enumerate() {
            widths[j + 1] = widths[j + 1].max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |first: &str, cells: &[String]| {
        let mut s = format!("  {first:<w$}", w = widths[0]);
        for (j, c) in cells.iter().enumerate() {
            let _ = write!(s, "  {c:<w$}", w = widths[j + 1]);
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(corner, header);
    for (label, cells) in rows {
        line(label, cells);
    }
    out
}

pub fn matrix_table(row_labels: &[String], col_labels: &[String], m: &RatMatrix) -> String {
    let rows: Vec<_> = row_labels
        .iter()
        .zip(m.iter_rows())
        .map(|(l, r)| (l.clone(), r.iter().map(both).collect()))
        .collect();
    table("", col_labels, &rows)
}

/// The fundamental matrix of the CBR chain with labels, a reading of each
/// entry and row sums.
pub fn render_fundamental(p: &CbrParameters, style: Style) -> Result<String, CbrError> {
    mean_phases(p)?;
    let chain = canonical_form(&cbr_transition_matrix(p))?;
    let n = chain.fundamental()?;
    let labels = chain.transient_labels();
    let mut header: Vec<String> = labels.to_vec();
    header.push("row sum".into());
    let rows: Vec<_> = labels
        .iter()
        .zip(n.iter_rows())
        .map(|(l, row)| {
            let mut cells: Vec<String> = row.iter().map(both).collect();
            cells.push(both(&row.iter().sum()));
            (l.clone(), cells)
        })
        .collect();
    let mut out = style.heading("Fundamental matrix N = (I - Q)^-1");
    out.push('\n');
    out.push_str("  n_ij = mean number of times in state Rj before absorption, starting from Ri\n");
    out.push_str(&table("", &header, &rows));
    Ok(out)
}
