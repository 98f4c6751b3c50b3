//! Run configuration, report rows and their JSON-lines / CSV encodings.
//!
//! Bodies are deterministic for a fixed [`RunConfig`]; the wall-clock
//! timestamp appears only in the header.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::integrate::{QuadratureSpec, Scheme};
use crate::oscillation::GridPreset;
use crate::symbols::{corpus_manifest, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidSpec(format!("unknown output format `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub node_count: usize,
    pub degree_cap: usize,
    pub grid: GridPreset,
    pub format: Format,
    pub out: Option<String>,
    pub scheme: Scheme,
    /// Metric-ball radius for the `_r` transforms.
    pub radius: f64,
    pub symbol: Option<String>,
    pub params: Params,
    /// Replace the holomorphic multiplier `j` by `|j|` in the Hankel basis.
    pub fault_injection: bool,
}

impl RunConfig {
    pub const DEFAULT_SEED: u64 = 20_240_501;
    pub const DEFAULT_NODES: usize = 20_000;

    pub fn new(n: usize) -> Self {
        Self {
            n,
            seed: Self::DEFAULT_SEED,
            node_count: Self::DEFAULT_NODES,
            degree_cap: crate::hankel::default_degree_cap(n),
            grid: GridPreset::RayLadder,
            format: Format::Jsonl,
            out: None,
            scheme: Scheme::QuasiRandom,
            radius: crate::oscillation::DEFAULT_RADIUS,
            symbol: None,
            params: Params::new(),
            fault_injection: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidSpec(format!("radius must be positive, got {}", self.radius)));
        }
        self.spec().map(|_| ())
    }

    pub fn spec(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::new(self.scheme, self.node_count, self.seed, self.n)
    }

    /// Ordered `(key, value)` echo of every field.
    pub fn echo(&self) -> Vec<(String, Cell)> {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={}", fmt_real(*v))).collect();
        vec![
            ("n".into(), Cell::Int(self.n as i128)),
            ("seed".into(), Cell::Int(self.seed as i128)),
            ("node_count".into(), Cell::Int(self.node_count as i128)),
            ("degree_cap".into(), Cell::Int(self.degree_cap as i128)),
            ("grid".into(), Cell::Text(self.grid.name().into())),
            ("format".into(), Cell::Text(self.format.name().into())),
            ("out".into(), Cell::Text(self.out.clone().unwrap_or_else(|| "-".into()))),
            ("scheme".into(), Cell::Text(self.scheme.name().into())),
            ("radius".into(), Cell::Real(self.radius)),
            ("symbol".into(), Cell::Text(self.symbol.clone().unwrap_or_default())),
            ("params".into(), Cell::Text(params.join(";"))),
            ("fault_injection".into(), Cell::Flag(self.fault_injection)),
        ]
    }
}

/// Git-style content hash of the corpus manifest: hex SHA-256 of
/// `blob <len>\0<manifest>`, as in a SHA-256 git object store.
pub fn corpus_hash() -> String {
    let manifest = corpus_manifest();
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", manifest.len()).as_bytes());
    h.update(manifest.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 17 significant digits; non-finite values become `null` in JSON.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Real(f64),
    Int(i128),
    Flag(bool),
}

impl Cell {
    fn json(&self) -> String {
        match self {
            Cell::Text(s) => serde_json::to_string(s).expect("string serialization"),
            Cell::Real(x) if x.is_finite() => fmt_real(*x),
            Cell::Real(_) => "null".into(),
            Cell::Int(i) => i.to_string(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn plain(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Real(x) => fmt_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

/// One report row: ordered named cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(mut self, k: &str, v: impl Into<String>) -> Self {
        self.0.push((k.into(), Cell::Text(v.into())));
        self
    }

    pub fn real(mut self, k: &str, v: f64) -> Self {
        self.0.push((k.into(), Cell::Real(v)));
        self
    }

    pub fn int(mut self, k: &str, v: impl Into<i128>) -> Self {
        self.0.push((k.into(), Cell::Int(v.into())));
        self
    }

    pub fn flag(mut self, k: &str, v: bool) -> Self {
        self.0.push((k.into(), Cell::Flag(v)));
        self
    }

    pub fn get(&self, k: &str) -> Option<&Cell> {
        self.0.iter().find(|(key, _)| key == k).map(|(_, c)| c)
    }

    fn json(&self) -> String {
        let body: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("key"), v.json()))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Self { command: command.into(), config: config.clone(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    fn header(&self, timestamp: u64) -> Vec<(String, Cell)> {
        let mut h = vec![("command".to_string(), Cell::Text(self.command.clone()))];
        h.extend(self.config.echo());
        h.push(("corpus_sha256".into(), Cell::Text(corpus_hash())));
        h.push(("unix_time".into(), Cell::Int(timestamp as i128)));
        h
    }

    /// Rows only, in the configured format.
    pub fn render_body(&self) -> String {
        match self.config.format {
            Format::Jsonl => self.rows.iter().map(|r| r.json() + "\n").collect(),
            Format::Csv => self.csv_body(),
        }
    }

    /// Header and rows with the given timestamp.
    pub fn render_with_time(&self, timestamp: u64) -> String {
        let header = self.header(timestamp);
        match self.config.format {
            Format::Jsonl => format!("{{\"header\":{}}}\n{}", Row(header).json(), self.render_body()),
            Format::Csv => {
                let mut s: String = header.iter().map(|(k, v)| format!("# {k}: {}\n", v.plain())).collect();
                s.push_str(&self.render_body());
                s
            }
        }
    }

    pub fn render(&self) -> String {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.render_with_time(now)
    }

    fn csv_body(&self) -> String {
        let mut columns: Vec<String> = Vec::new();
        for r in &self.rows {
            for (k, _) in &r.0 {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&columns).expect("in-memory csv");
        for r in &self.rows {
            let map: BTreeMap<&str, String> = r.0.iter().map(|(k, v)| (k.as_str(), v.plain())).collect();
            let rec: Vec<&str> = columns.iter().map(|c| map.get(c.as_str()).map_or("", |s| s.as_str())).collect();
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
    }
}
