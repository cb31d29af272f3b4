//! Batch front end over `raag-core`.
//!
//! [`run`] reads graphs from a line stream or a named builtin, processes
//! them in parallel chunks and writes one record per graph in input order,
//! followed by a summary. JSON output is one object per line, each tagged
//! with `"schema": 1` and a `"kind"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use raag_core::audit::{audit, AuditIssue};
use raag_core::autgrp::{enumerate_graphs, ENUMERATE_MAX_VERTICES};
use raag_core::certify::simplify;
use raag_core::io::{parse_graph_line, to_edge_list, to_graph6};
use raag_core::lcslin::{check_autnottrans_theorem, AUTCHECK_MAX_VERTICES};
use raag_core::lyndon::{bracketing, enumerate_lyndon, lyndon_ranks};
use raag_core::{certify, Certificate, Graph, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

/// Graphs handed to the worker pool at a time.
const CHUNK: usize = 256;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("input line {line}: {source}")]
    Input {
        line: usize,
        #[source]
        source: raag_core::Error,
    },
    #[error(transparent)]
    Core(#[from] raag_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("cannot build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Certify,
    Enumerate {
        max_n: usize,
        certify: bool,
    },
    Lyndon {
        length: usize,
    },
    Ranks {
        upto: usize,
    },
    /// Runs over the input graphs, or over every non-complete class up to
    /// `max_n` vertices when set.
    Autcheck {
        max_n: Option<usize>,
    },
    Simplify,
}

/// Named graph families accepted by `--builtin`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Cycle(usize),
    Complete(usize),
    Edgeless(usize),
    CompleteMultipartite(Vec<usize>),
    Petersen,
}

impl Builtin {
    pub fn build(&self) -> raag_core::Result<Graph> {
        match self {
            Builtin::Cycle(n) => Graph::cycle(*n),
            Builtin::Complete(n) => Graph::complete(*n),
            Builtin::Edgeless(n) => Graph::edgeless(*n),
            Builtin::CompleteMultipartite(parts) => Graph::complete_multipartite(parts),
            Builtin::Petersen => Ok(Graph::petersen()),
        }
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "petersen" || s == "petersen()" {
            return Ok(Builtin::Petersen);
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| format!("expected name(args), got {s:?}"))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("missing closing parenthesis in {s:?}"))?;
        let nums = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad argument {a:?}: {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let single = || match nums.as_slice() {
            [n] => Ok(*n),
            _ => Err(format!("{name} takes exactly one argument")),
        };
        match name.trim() {
            "cycle" => single().map(Builtin::Cycle),
            "complete" => single().map(Builtin::Complete),
            "edgeless" => single().map(Builtin::Edgeless),
            "complete_multipartite" => Ok(Builtin::CompleteMultipartite(nums)),
            other => Err(format!("unknown builtin {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Stdin,
    File(PathBuf),
    /// In-memory text, one graph per line.
    Text(String),
    Builtin(Builtin),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("format must be json or text, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: InputSource,
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
    /// Report destination; stdout when `None`.
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, input: InputSource) -> Self {
        RunConfig {
            command,
            input,
            jobs: None,
            out: None,
            format: Format::Json,
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.command {
            Command::Enumerate { max_n, .. } => {
                if *max_n == 0 || *max_n > ENUMERATE_MAX_VERTICES {
                    return usage(format!("--max-n must be in 1..={ENUMERATE_MAX_VERTICES}"));
                }
                if self.input != InputSource::None {
                    return usage("enumerate generates its own graphs and takes no input");
                }
            }
            Command::Autcheck { max_n: Some(m) } => {
                if *m == 0 || *m > AUTCHECK_MAX_VERTICES {
                    return usage(format!("--max-n must be in 1..={AUTCHECK_MAX_VERTICES}"));
                }
                if self.input != InputSource::None {
                    return usage("autcheck takes either --max-n or an input, not both");
                }
            }
            _ => {
                if self.input == InputSource::None {
                    return usage("this command needs --input or --builtin");
                }
            }
        }
        if self.jobs == Some(0) {
            return usage("--jobs must be positive");
        }
        Ok(())
    }
}

/// Totals gathered while writing a report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub graphs: usize,
    /// Verdict counts keyed by verdict name.
    pub verdicts: BTreeMap<String, usize>,
    /// Root rule counts keyed by rule name.
    pub root_rules: BTreeMap<String, usize>,
    /// Graphs per vertex count, for `enumerate`.
    pub classes_by_n: BTreeMap<usize, usize>,
    pub audit_failures: usize,
    /// Signed automorphisms without an eigenvalue-one witness.
    pub autcheck_failures: usize,
}

impl RunSummary {
    pub fn undecided(&self) -> usize {
        self.verdicts.get("UNDECIDED").copied().unwrap_or(0)
    }

    /// 0 when everything was decided and checked, 2 when something was left
    /// undecided or a witness search came up empty, 1 when a certificate
    /// failed its audit.
    pub fn exit_code(&self) -> i32 {
        if self.audit_failures > 0 {
            1
        } else if self.undecided() > 0 || self.autcheck_failures > 0 {
            2
        } else {
            0
        }
    }
}

/// Runs `config`, writing the report to `--out` or stdout.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let s = run_to(config, &mut w)?;
            w.flush()?;
            Ok(s)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let s = run_to(config, &mut w)?;
            w.flush()?;
            Ok(s)
        }
    }
}

/// Runs `config`, writing the report to `out`.
pub fn run_to(config: &RunConfig, out: &mut dyn Write) -> Result<RunSummary> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;
    Runner::new(config, &pool, out).execute()
}

struct Runner<'a> {
    config: &'a RunConfig,
    pool: &'a rayon::ThreadPool,
    out: &'a mut dyn Write,
    summary: RunSummary,
}

/// One processed graph: a JSON record, its text rendering, and summary deltas.
struct Record {
    json: serde_json::Value,
    text: String,
    certificate: Option<(Verdict, String)>,
    audit_failed: bool,
    autcheck_failures: usize,
}

impl Record {
    fn new(json: serde_json::Value, text: String) -> Self {
        Record {
            json,
            text,
            certificate: None,
            audit_failed: false,
            autcheck_failures: 0,
        }
    }
}

impl<'a> Runner<'a> {
    fn new(config: &'a RunConfig, pool: &'a rayon::ThreadPool, out: &'a mut dyn Write) -> Self {
        Runner {
            config,
            pool,
            out,
            summary: RunSummary::default(),
        }
    }

    fn execute(mut self) -> Result<RunSummary> {
        match &self.config.command {
            Command::Enumerate { max_n, certify } => self.enumerate(*max_n, *certify)?,
            Command::Autcheck { max_n: Some(m) } => {
                for n in 1..=*m {
                    let graphs: Vec<Graph> = enumerate_graphs(n)?
                        .into_iter()
                        .filter(|g| !g.is_complete())
                        .collect();
                    self.process_chunk(&graphs)?;
                }
            }
            _ => self.stream_input()?,
        }
        self.write_summary()?;
        Ok(self.summary)
    }

    fn enumerate(&mut self, max_n: usize, certify: bool) -> Result<()> {
        for n in 1..=max_n {
            let graphs = enumerate_graphs(n)?;
            self.summary.classes_by_n.insert(n, graphs.len());
            if certify {
                for chunk in graphs.chunks(CHUNK) {
                    self.process_chunk(chunk)?;
                }
            } else {
                for g in &graphs {
                    let g6 = to_graph6(g);
                    let rec = Record::new(
                        json!({"schema": SCHEMA_VERSION, "kind": "graph", "n": n, "graph6": g6}),
                        g6.clone(),
                    );
                    self.emit(rec)?;
                }
            }
        }
        Ok(())
    }

    fn stream_input(&mut self) -> Result<()> {
        let reader: Box<dyn BufRead> = match &self.config.input {
            InputSource::Builtin(b) => return self.process_chunk(&[b.build()?]),
            InputSource::Stdin => Box::new(BufReader::new(io::stdin())),
            InputSource::File(p) => Box::new(BufReader::new(File::open(p)?)),
            InputSource::Text(t) => Box::new(io::Cursor::new(t.clone().into_bytes())),
            InputSource::None => return usage("no input"),
        };
        let mut chunk = Vec::with_capacity(CHUNK);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == ">>graph6<<" {
                continue;
            }
            let g = parse_graph_line(&line).map_err(|source| CliError::Input {
                line: idx + 1,
                source,
            })?;
            chunk.push(g);
            if chunk.len() == CHUNK {
                self.process_chunk(&chunk)?;
                chunk.clear();
            }
        }
        self.process_chunk(&chunk)
    }

    fn process_chunk(&mut self, graphs: &[Graph]) -> Result<()> {
        let command = &self.config.command;
        let records = self.pool.install(|| {
            graphs
                .par_iter()
                .map(|g| process(command, g))
                .collect::<Result<Vec<_>>>()
        })?;
        for r in records {
            self.emit(r)?;
        }
        Ok(())
    }

    fn emit(&mut self, r: Record) -> Result<()> {
        self.summary.graphs += 1;
        if let Some((verdict, rule)) = r.certificate {
            *self
                .summary
                .verdicts
                .entry(verdict.to_string())
                .or_default() += 1;
            *self.summary.root_rules.entry(rule).or_default() += 1;
        }
        self.summary.audit_failures += r.audit_failed as usize;
        self.summary.autcheck_failures += r.autcheck_failures;
        match self.config.format {
            Format::Json => writeln!(self.out, "{}", r.json)?,
            Format::Text => write!(self.out, "{}", ensure_newline(r.text))?,
        }
        Ok(())
    }

    fn write_summary(&mut self) -> Result<()> {
        match self.config.format {
            Format::Json => {
                let mut v = serde_json::to_value(&self.summary).expect("summary serializes");
                v["schema"] = json!(SCHEMA_VERSION);
                v["kind"] = json!("summary");
                writeln!(self.out, "{v}")?;
            }
            Format::Text => {
                let s = &self.summary;
                writeln!(self.out, "# graphs: {}", s.graphs)?;
                for (n, c) in &s.classes_by_n {
                    writeln!(self.out, "# classes on {n} vertices: {c}")?;
                }
                for (v, c) in &s.verdicts {
                    writeln!(self.out, "# verdict {v}: {c}")?;
                }
                for (r, c) in &s.root_rules {
                    writeln!(self.out, "# rule {r}: {c}")?;
                }
                writeln!(self.out, "# audit failures: {}", s.audit_failures)?;
                if s.autcheck_failures > 0 {
                    writeln!(self.out, "# autcheck failures: {}", s.autcheck_failures)?;
                }
            }
        }
        Ok(())
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn render_certificate(c: &Certificate, depth: usize, out: &mut String) {
    let _ = writeln!(
        out,
        "{:indent$}{} {} {} ({})",
        "",
        c.graph6,
        c.verdict,
        c.rule.name(),
        c.citation,
        indent = 2 * depth
    );
    for child in &c.children {
        render_certificate(child, depth + 1, out);
    }
}

fn process(command: &Command, g: &Graph) -> Result<Record> {
    let g6 = to_graph6(g);
    let header = json!({"schema": SCHEMA_VERSION, "graph6": g6, "n": g.n()});
    let with = |kind: &str, fields: serde_json::Value| {
        let mut v = header.clone();
        v["kind"] = json!(kind);
        for (k, val) in fields.as_object().expect("object literal") {
            v[k] = val.clone();
        }
        v
    };
    match command {
        Command::Certify | Command::Enumerate { .. } => {
            let cert = certify(g)?;
            let issues: Vec<AuditIssue> = audit(&cert);
            let mut text = String::new();
            render_certificate(&cert, 0, &mut text);
            for i in &issues {
                let _ = writeln!(
                    text,
                    "! audit: {:?} {} {}",
                    i.path,
                    i.rule.name(),
                    i.message
                );
            }
            let json = with(
                "certificate",
                json!({"certificate": cert, "audit_issues": issues}),
            );
            let mut r = Record::new(json, text);
            r.certificate = Some((cert.verdict, cert.rule.name().to_string()));
            r.audit_failed = !issues.is_empty();
            Ok(r)
        }
        Command::Lyndon { length } => {
            let elements = enumerate_lyndon(g, *length)?;
            let mut rows = Vec::with_capacity(elements.len());
            let mut text = format!("{g6} length {length}: {} elements\n", elements.len());
            for m in &elements {
                let b = bracketing(g, m)?.to_string();
                let _ = writeln!(text, "  {m} {b}");
                rows.push(json!({"word": m.std(), "display": m.to_string(), "bracket": b}));
            }
            let json = with(
                "lyndon",
                json!({"length": length, "count": elements.len(), "elements": rows}),
            );
            Ok(Record::new(json, text))
        }
        Command::Ranks { upto } => {
            let ranks = lyndon_ranks(g, *upto)?;
            let list = ranks
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            let json = with("ranks", json!({"upto": upto, "ranks": ranks}));
            Ok(Record::new(json, format!("{g6} ranks {list}")))
        }
        Command::Autcheck { .. } => {
            let report = check_autnottrans_theorem(g)?;
            let [l1, l2, l3] = report.witnesses_by_level;
            let text = format!(
                "{g6} signed automorphisms {} level1 {l1} level2 {l2} level3 {l3} failures {}",
                report.total,
                report.failures.len()
            );
            let failures = report.failures.len();
            let json = with("autcheck", json!({"report": report}));
            let mut r = Record::new(json, text);
            r.autcheck_failures = failures;
            Ok(r)
        }
        Command::Simplify => {
            let s = simplify(g)?;
            let chain: Vec<String> = s.chain.iter().map(to_graph6).collect();
            let mut text = String::new();
            for (i, step) in s.chain.iter().enumerate() {
                let _ = writeln!(text, "{:indent$}{}", "", to_edge_list(step), indent = 2 * i);
            }
            let category = serde_json::to_value(s.category).expect("category serializes");
            let _ = writeln!(text, "terminal: {}", category.as_str().unwrap_or_default());
            let json = with(
                "simplification",
                json!({"chain": chain, "terminal": to_graph6(&s.terminal), "category": category}),
            );
            Ok(Record::new(json, text))
        }
    }
}
