//! Edge-list text, Graphviz DOT, JSON reports and CSV histograms.
//!
//! Edge lists hold one `SOURCE TARGET` pair per line separated by
//! whitespace. Blank lines and lines starting with `#` are skipped, and
//! trailing whitespace (including `\r`) is ignored. Sources and targets are
//! either non-negative integer ids or arbitrary labels; labels are numbered in
//! order of first appearance.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::dag::{back_edges, Dag, NodeId};
use crate::error::{Error, Result};
use crate::metrics::{ComparisonReport, GraphAnalysis, Histogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdFormat {
    #[default]
    Integer,
    Labeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclePolicy {
    /// Fail on the first back edge.
    #[default]
    Strict,
    /// Drop every back edge found by the depth-first validator.
    Lenient,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    pub format: IdFormat,
    pub cycles: CyclePolicy,
    /// Node count for integer ids; defaults to one past the largest id seen.
    pub node_count: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub dag: Dag,
    /// Label of each node id for labeled input.
    pub labels: Option<Vec<String>>,
    pub records: usize,
    pub duplicates_dropped: usize,
    /// Back edges (self-loops included) removed in lenient mode.
    pub back_edges_dropped: usize,
}

/// Parses an edge list into a validated DAG in a single streaming pass.
pub fn read_edge_list<R: BufRead>(mut reader: R, options: &ReadOptions) -> Result<EdgeListLoad> {
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut max_id: Option<NodeId> = None;

    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two tokens, got {:?}", line),
            });
        };
        let edge = match options.format {
            IdFormat::Integer => {
                let parse = |tok: &str| {
                    tok.parse::<NodeId>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("invalid node id {tok:?}"),
                    })
                };
                let (u, v) = (parse(a)?, parse(b)?);
                max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
                (u, v)
            }
            IdFormat::Labeled => {
                let mut intern = |tok: &str| {
                    if let Some(&id) = ids.get(tok) {
                        return id;
                    }
                    let id = labels.len() as NodeId;
                    ids.insert(tok.to_string(), id);
                    labels.push(tok.to_string());
                    id
                };
                (intern(a), intern(b))
            }
        };
        edges.push(edge);
        lines.push(line_no);
    }

    let node_count = match options.format {
        IdFormat::Labeled => labels.len(),
        IdFormat::Integer => {
            let seen = max_id.map_or(0, |m| m as usize + 1);
            match options.node_count {
                Some(n) if n < seen => {
                    return Err(Error::NodeIdOutOfRange {
                        id: seen as u64 - 1,
                        node_count: n,
                    })
                }
                Some(n) => n,
                None => seen,
            }
        }
    };
    let records = edges.len();
    let name = |id: NodeId| match options.format {
        IdFormat::Labeled => labels[id as usize].clone(),
        IdFormat::Integer => id.to_string(),
    };

    let back = back_edges(node_count, &edges);
    let mut back_edges_dropped = 0;
    if !back.is_empty() {
        match options.cycles {
            CyclePolicy::Strict => {
                let (u, v) = back[0];
                let line = edges
                    .iter()
                    .zip(&lines)
                    .find(|(&e, _)| e == (u, v))
                    .map(|(_, &l)| l)
                    .unwrap_or(0);
                return Err(Error::CycleAtLine {
                    line,
                    from: name(u),
                    to: name(v),
                });
            }
            CyclePolicy::Lenient => {
                let drop: std::collections::HashSet<_> = back.iter().copied().collect();
                back_edges_dropped = back.len();
                edges.retain(|e| !drop.contains(e));
            }
        }
    }
    let kept = edges.len();
    let dag = Dag::new(node_count, edges)?;
    Ok(EdgeListLoad {
        duplicates_dropped: kept - dag.edge_count(),
        dag,
        labels: (options.format == IdFormat::Labeled).then_some(labels),
        records,
        back_edges_dropped,
    })
}

/// One `u v` line per edge, sorted by `(u, v)`.
pub fn write_edge_list(dag: &Dag) -> String {
    let mut out = String::with_capacity(dag.edge_count() * 12);
    for &(u, v) in dag.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub const DEFAULT_DOT_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct DotOptions<'a> {
    pub cap: usize,
    pub graph_name: &'a str,
    /// Optional node labels, indexed by id.
    pub labels: Option<&'a [String]>,
}

impl Default for DotOptions<'_> {
    fn default() -> Self {
        Self {
            cap: DEFAULT_DOT_CAP,
            graph_name: "G",
            labels: None,
        }
    }
}

/// Graphviz digraph with one statement per node (ascending id) followed by
/// one statement per edge (sorted).
pub fn export_dot(dag: &Dag, options: &DotOptions<'_>) -> Result<String> {
    if dag.node_count() > options.cap {
        return Err(Error::CapExceeded {
            node_count: dag.node_count(),
            cap: options.cap,
        });
    }
    let mut out = format!("digraph {} {{\n", dot_id(options.graph_name));
    for v in 0..dag.node_count() {
        match options.labels {
            Some(labels) => {
                let _ = writeln!(out, "  {v} [label={}];", dot_id(&labels[v]));
            }
            None => {
                let _ = writeln!(out, "  {v};");
            }
        }
    }
    for &(u, v) in dag.edges() {
        let _ = writeln!(out, "  {u} -> {v};");
    }
    out.push_str("}\n");
    Ok(out)
}

fn dot_id(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.starts_with(|c: char| c.is_ascii_digit());
    if plain {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// JSON analysis report, schema version 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub graphs: Vec<GraphAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
    /// Seeds, configuration and provenance notes.
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl AnalysisReport {
    pub fn new(graphs: Vec<GraphAnalysis>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            graphs,
            comparison: None,
            metadata: BTreeMap::new(),
        }
    }

    /// Checks the schema version and that every histogram total matches the
    /// population or sample it describes.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::InvalidReport(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        for g in &self.graphs {
            let name = &g.summary.name;
            let n = g.summary.node_count as u64;
            let checks = [
                ("in_degree", &g.in_degree, n),
                ("out_degree", &g.out_degree, n),
                ("depth", &g.depth, g.summary.leaf_count as u64),
                ("rrl", &g.rrl, g.verdict.sample_count),
            ];
            for (what, hist, expected) in checks {
                if !hist.is_consistent() || hist.total() != expected {
                    return Err(Error::InvalidReport(format!(
                        "{name}: {what} histogram total {} does not match {expected}",
                        hist.total()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn write_report(report: &AnalysisReport) -> Result<String> {
    report.validate()?;
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn read_report(text: &str) -> Result<AnalysisReport> {
    let report: AnalysisReport = serde_json::from_str(text)?;
    report.validate()?;
    Ok(report)
}

/// `value,count` CSV, rows in ascending value order.
pub fn write_histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("value,count\n");
    for (v, c) in hist.bins() {
        let _ = writeln!(out, "{v},{c}");
    }
    out
}
