//! Graph JSON, metric CSV and profile CSV.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use intrinsic_core::radial::{series_terms, RadialProfile};
use intrinsic_core::{PseudoMetric, RawGraph, WeightedGraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("graph JSON, line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("graph JSON, field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("metric CSV, line {line}, field {field}: {message}")]
    Csv { line: u64, field: usize, message: String },
    #[error("metric CSV: {0}")]
    CsvShape(String),
    #[error(transparent)]
    Core(#[from] intrinsic_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `{"vertices": [...], "measure": [...], "edges": [[u, v, b], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub measure: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphDocument {
    pub fn from_graph(graph: &WeightedGraph) -> Self {
        GraphDocument {
            vertices: (0..graph.vertex_count()).map(|u| graph.label(u)).collect(),
            measure: graph.measures().to_vec(),
            edges: graph.edges().collect(),
        }
    }

    pub fn into_graph(self) -> Result<WeightedGraph, FormatError> {
        let field = |field: String, message: String| FormatError::Field { field, message };
        if self.vertices.len() != self.measure.len() {
            return Err(field(
                "measure".into(),
                format!("{} values for {} vertices", self.measure.len(), self.vertices.len()),
            ));
        }
        let mut seen = BTreeSet::new();
        for (i, &(u, v, b)) in self.edges.iter().enumerate() {
            if u >= v {
                return Err(field(format!("edges[{i}]"), format!("expected u < v, got [{u}, {v}, {b}]")));
            }
            if !seen.insert((u, v)) {
                return Err(field(format!("edges[{i}]"), format!("duplicate pair ({u}, {v})")));
            }
        }
        let raw = RawGraph { measure: self.measure, entries: self.edges, labels: Some(self.vertices) };
        let report = intrinsic_core::graph::validate(&raw);
        if let Some(issue) = report.errors().next() {
            return Err(field("graph".into(), issue.to_string()));
        }
        Ok(WeightedGraph::from_raw(&raw)?)
    }
}

pub fn read_graph(mut reader: impl Read) -> Result<WeightedGraph, FormatError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let doc: GraphDocument = serde_json::from_str(&text)
        .map_err(|e| FormatError::Json { line: e.line(), column: e.column(), message: e.to_string() })?;
    doc.into_graph()
}

pub fn write_graph(graph: &WeightedGraph, mut writer: impl Write) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut writer, &GraphDocument::from_graph(graph)).map_err(std::io::Error::from)?;
    writeln!(writer)?;
    Ok(())
}

fn format_entry(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Full symmetric table under a header of labels; infinity is written `inf`.
pub fn write_metric(labels: &[String], metric: &PseudoMetric, writer: impl Write) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| FormatError::CsvShape(e.to_string());
    out.write_record(labels).map_err(csv_err)?;
    for row in metric.to_rows() {
        out.write_record(row.iter().map(|&v| format_entry(v))).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Returns the header labels and the table.
pub fn read_metric(reader: impl Read) -> Result<(Vec<String>, PseudoMetric), FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let labels: Vec<String> =
        rdr.headers().map_err(|e| FormatError::CsvShape(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| FormatError::CsvShape(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for (field, text) in record.iter().enumerate() {
            let value = match text {
                "inf" => f64::INFINITY,
                _ => text.parse::<f64>().map_err(|e| FormatError::Csv {
                    line,
                    field: field + 1,
                    message: format!("cannot read `{text}` as a number ({e})"),
                })?,
            };
            row.push(value);
        }
        rows.push(row);
    }
    if rows.len() != labels.len() {
        return Err(FormatError::CsvShape(format!("{} labels but {} rows", labels.len(), rows.len())));
    }
    Ok((labels, PseudoMetric::from_rows(&rows)?))
}

pub const PROFILE_COLUMNS: [&str; 9] =
    ["r", "sphere_mass", "kappa_plus", "kappa_minus", "boundary", "term_iii", "term_v", "partial_sum_iii", "partial_sum_v"];

/// One row per radius; quantities that need `S_{R+1}` or lie outside the
/// series range are left empty.
pub fn write_profile(profile: &RadialProfile, writer: impl Write) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| FormatError::CsvShape(e.to_string());
    out.write_record(PROFILE_COLUMNS).map_err(csv_err)?;
    let series = series_terms(profile);
    let horizon = profile.horizon();
    for r in 0..=horizon {
        let row = series.iter().find(|s| s.r == r);
        let inner = r < horizon;
        let fields = [
            r.to_string(),
            format_entry(profile.sphere_mass[r]),
            if inner { format_entry(profile.kappa_plus[r]) } else { String::new() },
            format_entry(profile.kappa_minus[r]),
            if inner { format_entry(profile.boundary(r)) } else { String::new() },
            row.map_or(String::new(), |s| format_entry(s.term_iii)),
            row.map_or(String::new(), |s| format_entry(s.term_v)),
            row.map_or(String::new(), |s| format_entry(s.partial_iii)),
            row.map_or(String::new(), |s| format_entry(s.partial_v)),
        ];
        out.write_record(&fields).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"vertices": ["a", "b"], "measure": [1, 2], "edges": [[0, 1, 0.5]]}"#;

    #[test]
    fn graph_round_trip() {
        let g = read_graph(TWO.as_bytes()).unwrap();
        assert_eq!(g.label(1), "b");
        assert_eq!(g.weight(0, 1), 0.5);
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        assert_eq!(read_graph(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn graph_rejections() {
        let cases = [
            (r#"{"vertices": ["a","b"], "measure": [1, 1], "edges": [[1, 0, 1]]}"#, "edges[0]"),
            (r#"{"vertices": ["a","b"], "measure": [1, 1], "edges": [[0, 1, 1], [0, 1, 2]]}"#, "duplicate"),
            (r#"{"vertices": ["a"], "measure": [1, 1], "edges": []}"#, "measure"),
            (r#"{"vertices": ["a","b"], "measure": [1, -1], "edges": [[0, 1, 1]]}"#, "not strictly positive"),
            (r#"{"vertices": ["a","b"], "measure": [1, 1],
               "edges": [[0, 1, "x"]]}"#, "line 2"),
        ];
        for (text, needle) in cases {
            let err = read_graph(text.as_bytes()).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }

    #[test]
    fn metric_round_trip_with_infinity() {
        let labels = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let mut m = PseudoMetric::zero(3);
        m.set(0, 1, 0.1 + 0.2).unwrap();
        m.set(0, 2, f64::INFINITY).unwrap();
        m.set(1, 2, f64::INFINITY).unwrap();
        let mut buf = Vec::new();
        write_metric(&labels, &m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,z\n0,0.30000000000000004,inf\n"));
        let (l, back) = read_metric(buf.as_slice()).unwrap();
        assert_eq!(l, labels);
        assert_eq!(back, m);
    }

    #[test]
    fn metric_parse_error_position() {
        let err = read_metric("a,b\n0,1\n1,oops\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 3, field 2"), "{err}");
        assert!(read_metric("a,b\n0,1\n2,0\n".as_bytes()).is_err());
    }

    #[test]
    fn profile_columns() {
        let p = RadialProfile::antitree_polynomial(2.0, 3).unwrap();
        let mut buf = Vec::new();
        write_profile(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], PROFILE_COLUMNS.join(","));
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,1,4,0,4,,"));
        assert!(lines[2].starts_with("1,4,9,1,36,0.33333"));
    }
}
