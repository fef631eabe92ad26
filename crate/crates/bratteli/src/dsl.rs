//! The line-oriented text format for every object in the crate.
//!
//! One input may hold several documents, each opened by a kind header
//! (`diagram`, `graph`, `ultragraph`, `matrix`, `descriptor`) with a name.
//! `#` starts a comment. Errors carry line and column. Printing produces the
//! canonical form, which parses back to the same value; printing a parsed
//! document is idempotent, so outputs are always valid inputs and commands
//! compose into pipelines.
//!
//! ```text
//! diagram worked_example
//! level 1: s=2 t=2 u=3
//! edges 1: s->v:1 t->v:2 t->w:2 u->w:1
//! level 2: v=8 w=7
//!
//! graph two_blocks
//! vertex l
//! vertex m
//! edge e: m -> { l }
//!
//! ultragraph el
//! vertex a
//! vertex b @boundary
//! edge e_a: a -> { *all !a } +tail(e_b)
//! periodic 1
//!
//! matrix shift
//! row 1: 2
//! row 2: +tail(2)
//!
//! descriptor example
//! flag unital = yes
//! summand {
//! flag simple = yes
//! }
//! witness graph two_blocks
//! ```
//!
//! A realized ultragraph additionally carries its provenance (`provenance
//! depth`, `source-level`, `source-dim`, `delta`, `inject` lines); parsing
//! replays the construction and checks that it reproduces the stored edges
//! bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Num;

use crate::classify::{AlgDescriptor, Witness};
use crate::diagram::{BratteliDiagram, DiagVertex, Level, MultMatrix, PeriodicTail};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphEdge};
use crate::matrix::{MatrixRow, RowBase, ZeroOneMatrix};
use crate::realize::{InjectionTable, RealizedUltragraph, SlotRow};
use crate::tri::Tri;
use crate::ultragraph::{RangeSet, Ultraedge, Ultragraph};
use crate::Nat;

/// A parsed document.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Diagram(BratteliDiagram),
    Graph(DirectedGraph),
    Ultragraph(Ultragraph),
    Realized(RealizedUltragraph),
    Matrix(ZeroOneMatrix),
    Descriptor(AlgDescriptor),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Diagram(_) => "diagram",
            Document::Graph(_) => "graph",
            Document::Ultragraph(_) | Document::Realized(_) => "ultragraph",
            Document::Matrix(_) => "matrix",
            Document::Descriptor(_) => "descriptor",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Document::Diagram(d) => d.name(),
            Document::Graph(g) => g.name(),
            Document::Ultragraph(u) => u.name(),
            Document::Realized(r) => r.ultragraph().name(),
            Document::Matrix(m) => m.name(),
            Document::Descriptor(a) => &a.name,
        }
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// One significant line: number, raw text, and tokens with byte offsets.
struct TokLine<'a> {
    no: usize,
    raw: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> TokLine<'a> {
    fn first(&self) -> &'a str {
        self.tokens[0].1
    }

    fn col(&self, token_index: usize) -> usize {
        self.tokens
            .get(token_index)
            .map(|(off, _)| off + 1)
            .unwrap_or(self.raw.len() + 1)
    }

    fn err(&self, token_index: usize, msg: impl Into<String>) -> Error {
        perr(self.no, self.col(token_index), msg)
    }

    /// Token at `i` or a located error.
    fn tok(&self, i: usize, what: &str) -> Result<&'a str> {
        self.tokens
            .get(i)
            .map(|(_, t)| *t)
            .ok_or_else(|| perr(self.no, self.raw.len() + 1, format!("expected {what}")))
    }
}

fn tokenize(text: &str) -> Vec<TokLine<'_>> {
    let mut out = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        // `#` opens a comment only at the start of a token, so copy markers
        // like `v->w#0` survive.
        let mut comment = None;
        let mut prev_ws = true;
        for (off, ch) in raw_line.char_indices() {
            if ch == '#' && prev_ws {
                comment = Some(off);
                break;
            }
            prev_ws = ch.is_whitespace();
        }
        let body = match comment {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (off, ch) in body.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((s, &body[s..off]));
                }
            } else if start.is_none() {
                start = Some(off);
            }
        }
        if let Some(s) = start {
            tokens.push((s, &body[s..]));
        }
        if !tokens.is_empty() {
            out.push(TokLine {
                no: i + 1,
                raw: raw_line,
                tokens,
            });
        }
    }
    out
}

const KINDS: [&str; 5] = ["diagram", "graph", "ultragraph", "matrix", "descriptor"];

/// Parses every document in the input.
pub fn parse_all(text: &str) -> Result<Vec<Document>> {
    let lines = tokenize(text);
    let mut docs: Vec<Document> = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let header = &lines[pos];
        if !KINDS.contains(&header.first()) {
            return Err(header.err(0, format!("expected a document kind, got `{}`", header.first())));
        }
        let mut end = pos + 1;
        while end < lines.len() && !KINDS.contains(&lines[end].first()) {
            end += 1;
        }
        let section = &lines[pos..end];
        let doc = match header.first() {
            "diagram" => parse_diagram(section)?,
            "graph" => parse_graph(section)?,
            "ultragraph" => parse_ultragraph(section)?,
            "matrix" => parse_matrix(section)?,
            "descriptor" => parse_descriptor(section, &docs)?,
            _ => unreachable!(),
        };
        docs.push(doc);
        pos = end;
    }
    Ok(docs)
}

/// Parses the first document of the input.
pub fn parse(text: &str) -> Result<Document> {
    let docs = parse_all(text)?;
    docs.into_iter()
        .next()
        .ok_or_else(|| perr(1, 1, "empty input"))
}

fn parse_name(header: &TokLine<'_>) -> Result<String> {
    Ok(header.tok(1, "a document name")?.to_string())
}

fn parse_usize(line: &TokLine<'_>, i: usize, what: &str) -> Result<usize> {
    let t = line.tok(i, what)?;
    t.parse()
        .map_err(|_| line.err(i, format!("{what} must be a nonnegative integer, got `{t}`")))
}

fn parse_nat(line: &TokLine<'_>, i: usize, text: &str, what: &str) -> Result<Nat> {
    Nat::from_str_radix(text, 10)
        .map_err(|_| line.err(i, format!("{what} must be a nonnegative integer, got `{text}`")))
}

fn wrap_build<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(line, 1, other.to_string()),
    })
}

fn parse_diagram(section: &[TokLine<'_>]) -> Result<Document> {
    let name = parse_name(&section[0])?;
    let mut levels: BTreeMap<usize, Level> = BTreeMap::new();
    // (line, column, src, dst, mult) per declared edge, grouped by level.
    type EdgeLine = (usize, usize, String, String, Nat);
    let mut edge_lines: BTreeMap<usize, Vec<EdgeLine>> = BTreeMap::new();
    let mut tail = None;
    for line in &section[1..] {
        match line.first() {
            "level" => {
                let n = parse_level_no(line)?;
                let mut vertices = Vec::new();
                for i in 2..line.tokens.len() {
                    let t = line.tokens[i].1;
                    let (id, dim_text) = t
                        .split_once('=')
                        .ok_or_else(|| line.err(i, format!("expected `<id>=<dim>`, got `{t}`")))?;
                    let dim = parse_nat(line, i, dim_text, "dimension")?;
                    if dim == Nat::from(0u32) {
                        return Err(line.err(i, "dimension must be >= 1"));
                    }
                    vertices.push(DiagVertex::new(id, dim));
                }
                if vertices.is_empty() {
                    return Err(line.err(1, "a level needs at least one vertex"));
                }
                if levels.insert(n, Level::new(vertices)).is_some() {
                    return Err(line.err(1, format!("level {} declared twice", n + 1)));
                }
            }
            "edges" => {
                let n = parse_level_no(line)?;
                let entry = edge_lines.entry(n).or_default();
                for i in 2..line.tokens.len() {
                    let t = line.tokens[i].1;
                    let (src, rest) = t
                        .split_once("->")
                        .ok_or_else(|| line.err(i, format!("expected `<src>-><dst>:<mult>`, got `{t}`")))?;
                    let (dst, mult_text) = rest
                        .split_once(':')
                        .ok_or_else(|| line.err(i, format!("expected a `:<mult>` suffix in `{t}`")))?;
                    let mult = parse_nat(line, i, mult_text, "multiplicity")?;
                    entry.push((line.no, line.col(i), src.to_string(), dst.to_string(), mult));
                }
            }
            "periodic" => {
                // periodic from <n> period <p>
                if line.tok(1, "`from`")? != "from" {
                    return Err(line.err(1, "expected `periodic from <n> period <p>`"));
                }
                let n = parse_usize(line, 2, "level number")?;
                if n == 0 {
                    return Err(line.err(2, "levels are numbered from 1"));
                }
                if line.tok(3, "`period`")? != "period" {
                    return Err(line.err(3, "expected `period <p>`"));
                }
                let p = parse_usize(line, 4, "period")?;
                tail = Some(PeriodicTail {
                    from: n - 1,
                    period: p,
                });
            }
            other => return Err(line.err(0, format!("unexpected `{other}` in a diagram"))),
        }
    }
    if levels.is_empty() {
        return Err(section[0].err(0, "diagram has no levels"));
    }
    let depth = *levels.keys().max().unwrap() + 1;
    for n in 0..depth {
        if !levels.contains_key(&n) {
            return Err(section[0].err(0, format!("level {} is missing", n + 1)));
        }
    }
    let level_vec: Vec<Level> = (0..depth).map(|n| levels.remove(&n).unwrap()).collect();
    let mut matrices: Vec<MultMatrix> = (0..depth.saturating_sub(1))
        .map(|n| MultMatrix::zero(level_vec[n].width(), level_vec[n + 1].width()))
        .collect();
    for (n, entries) in edge_lines {
        if n + 1 >= depth {
            let (line, col, ..) = entries[0];
            return Err(perr(line, col, format!("edges {} point past the last level", n + 1)));
        }
        for (line, col, src, dst, mult) in entries {
            let i = level_vec[n]
                .index_of(&src)
                .ok_or_else(|| perr(line, col, format!("unknown vertex {src} at level {}", n + 1)))?;
            let j = level_vec[n + 1]
                .index_of(&dst)
                .ok_or_else(|| perr(line, col, format!("unknown vertex {dst} at level {}", n + 2)))?;
            matrices[n].set(i, j, mult);
        }
    }
    let d = wrap_build(
        section[0].no,
        BratteliDiagram::new(name, level_vec, matrices, tail),
    )?;
    Ok(Document::Diagram(d))
}

fn parse_level_no(line: &TokLine<'_>) -> Result<usize> {
    let t = line.tok(1, "a level number")?;
    let t = t.strip_suffix(':').unwrap_or(t);
    let n: usize = t
        .parse()
        .map_err(|_| line.err(1, format!("expected a level number, got `{t}`")))?;
    if n == 0 {
        return Err(line.err(1, "levels are numbered from 1"));
    }
    Ok(n - 1)
}

/// Items allowed inside a `{ ... }` range and after it.
struct ParsedRange {
    resolved: BTreeSet<String>,
    all: bool,
    exclusions: BTreeSet<String>,
    tails: BTreeSet<String>,
    infinite: bool,
}

fn parse_range(line: &TokLine<'_>, mut i: usize) -> Result<(ParsedRange, usize)> {
    if line.tok(i, "`{`")? != "{" {
        return Err(line.err(i, "expected `{` to open the range"));
    }
    i += 1;
    let mut range = ParsedRange {
        resolved: BTreeSet::new(),
        all: false,
        exclusions: BTreeSet::new(),
        tails: BTreeSet::new(),
        infinite: false,
    };
    loop {
        let t = line.tok(i, "`}` to close the range")?;
        if t == "}" {
            i += 1;
            break;
        }
        if t == "*all" {
            range.all = true;
        } else if let Some(x) = t.strip_prefix('!') {
            range.exclusions.insert(x.to_string());
        } else if t.starts_with('*') || t.starts_with('+') {
            return Err(line.err(i, format!("unexpected marker `{t}` inside a range")));
        } else {
            range.resolved.insert(t.to_string());
        }
        i += 1;
    }
    while let Some((_, t)) = line.tokens.get(i) {
        if let Some(inner) = t.strip_prefix("+tail(").and_then(|s| s.strip_suffix(')')) {
            range.tails.insert(inner.to_string());
        } else if *t == "*inf" {
            range.infinite = true;
        } else {
            return Err(line.err(i, format!("unexpected trailing `{t}`")));
        }
        i += 1;
    }
    if !range.all && !range.exclusions.is_empty() {
        return Err(line.err(0, "exclusions `!v` need `*all` in the range"));
    }
    Ok((range, i))
}

struct VertexLines {
    vertices: Vec<String>,
    boundary: BTreeSet<String>,
}

fn parse_vertex_line(line: &TokLine<'_>, acc: &mut VertexLines) -> Result<()> {
    let id = line.tok(1, "a vertex id")?;
    acc.vertices.push(id.to_string());
    for i in 2..line.tokens.len() {
        match line.tokens[i].1 {
            "@boundary" => {
                acc.boundary.insert(id.to_string());
            }
            other => return Err(line.err(i, format!("unexpected `{other}` after a vertex"))),
        }
    }
    Ok(())
}

fn parse_graph(section: &[TokLine<'_>]) -> Result<Document> {
    let name = parse_name(&section[0])?;
    let mut acc = VertexLines {
        vertices: Vec::new(),
        boundary: BTreeSet::new(),
    };
    let mut edges = Vec::new();
    let mut periodic = None;
    for line in &section[1..] {
        match line.first() {
            "vertex" => parse_vertex_line(line, &mut acc)?,
            "edge" => {
                let id = line
                    .tok(1, "an edge id")?
                    .strip_suffix(':')
                    .ok_or_else(|| line.err(1, "expected `edge <id>: <src> -> { ... }`"))?
                    .to_string();
                let src = line.tok(2, "a source vertex")?.to_string();
                if line.tok(3, "`->`")? != "->" {
                    return Err(line.err(3, "expected `->`"));
                }
                let (range, _) = parse_range(line, 4)?;
                if range.all || !range.exclusions.is_empty() || !range.tails.is_empty() {
                    return Err(line.err(4, "graph edges take a single explicit target"));
                }
                if range.resolved.len() != 1 {
                    return Err(line.err(4, "graph edges take exactly one target"));
                }
                edges.push(GraphEdge {
                    id,
                    source: src,
                    target: range.resolved.into_iter().next().unwrap(),
                    infinite: range.infinite,
                });
            }
            "periodic" => periodic = Some(parse_usize(line, 1, "template size")?),
            other => return Err(line.err(0, format!("unexpected `{other}` in a graph"))),
        }
    }
    let g = wrap_build(
        section[0].no,
        DirectedGraph::new(name, acc.vertices, acc.boundary, edges, periodic),
    )?;
    Ok(Document::Graph(g))
}

fn parse_ultragraph(section: &[TokLine<'_>]) -> Result<Document> {
    let name = parse_name(&section[0])?;
    let mut acc = VertexLines {
        vertices: Vec::new(),
        boundary: BTreeSet::new(),
    };
    let mut edges = Vec::new();
    let mut periodic = None;
    let mut provenance_start = None;
    for (idx, line) in section[1..].iter().enumerate() {
        match line.first() {
            "vertex" => parse_vertex_line(line, &mut acc)?,
            "edge" => {
                let id = line
                    .tok(1, "an edge id")?
                    .strip_suffix(':')
                    .ok_or_else(|| line.err(1, "expected `edge <id>: <src> -> { ... }`"))?
                    .to_string();
                let src = line.tok(2, "a source vertex")?.to_string();
                if line.tok(3, "`->`")? != "->" {
                    return Err(line.err(3, "expected `->`"));
                }
                let (range, _) = parse_range(line, 4)?;
                if range.infinite {
                    return Err(line.err(4, "`*inf` applies to graph edges, not ultraedges"));
                }
                edges.push(Ultraedge {
                    id,
                    source: src,
                    range: RangeSet::new(
                        range.resolved,
                        range.all.then_some(range.exclusions),
                        range.tails,
                    ),
                });
            }
            "periodic" => periodic = Some(parse_usize(line, 1, "template size")?),
            "provenance" => {
                provenance_start = Some(idx + 1);
                break;
            }
            other => return Err(line.err(0, format!("unexpected `{other}` in an ultragraph"))),
        }
    }
    let u = wrap_build(
        section[0].no,
        Ultragraph::new(name, acc.vertices, acc.boundary, edges, periodic),
    )?;
    match provenance_start {
        None => Ok(Document::Ultragraph(u)),
        Some(start) => {
            let realized = parse_provenance(&section[start..], u)?;
            Ok(Document::Realized(realized))
        }
    }
}

fn parse_provenance(section: &[TokLine<'_>], body: Ultragraph) -> Result<RealizedUltragraph> {
    // provenance depth <n>
    let head = &section[0];
    if head.tok(1, "`depth`")? != "depth" {
        return Err(head.err(1, "expected `provenance depth <n>`"));
    }
    let depth = parse_usize(head, 2, "depth")?;
    let mut level_of: Vec<(String, usize)> = Vec::new();
    let mut dim_of: BTreeMap<String, Nat> = BTreeMap::new();
    let mut deltas: BTreeMap<String, Nat> = BTreeMap::new();
    let mut injects: Vec<(usize, String, String, u64, u64, usize, usize)> = Vec::new();
    for line in &section[1..] {
        match line.first() {
            "source-level" => {
                let id = line.tok(1, "a vertex id")?.to_string();
                if line.tok(2, "`=`")? != "=" {
                    return Err(line.err(2, "expected `=`"));
                }
                let n = parse_usize(line, 3, "level")?;
                if n == 0 {
                    return Err(line.err(3, "levels are numbered from 1"));
                }
                level_of.push((id, n - 1));
            }
            "source-dim" => {
                let id = line.tok(1, "a vertex id")?.to_string();
                if line.tok(2, "`=`")? != "=" {
                    return Err(line.err(2, "expected `=`"));
                }
                let text = line.tok(3, "a dimension")?;
                dim_of.insert(id, parse_nat(line, 3, text, "dimension")?);
            }
            "delta" => {
                let id = line.tok(1, "a vertex id")?.to_string();
                if line.tok(2, "`=`")? != "=" {
                    return Err(line.err(2, "expected `=`"));
                }
                let text = line.tok(3, "a delta value")?;
                deltas.insert(id, parse_nat(line, 3, text, "delta")?);
            }
            "inject" => {
                let n = parse_level_no(line)?;
                let triple = line.tok(2, "`<src>-><dst>#<copy>`")?;
                let (src, rest) = triple
                    .split_once("->")
                    .ok_or_else(|| line.err(2, "expected `<src>-><dst>#<copy>`"))?;
                let (dst, copy_text) = rest
                    .split_once('#')
                    .ok_or_else(|| line.err(2, "expected a `#<copy>` suffix"))?;
                let copy: u64 = copy_text
                    .parse()
                    .map_err(|_| line.err(2, "copy index must be an integer"))?;
                if line.tok(3, "`=`")? != "=" {
                    return Err(line.err(3, "expected `=`"));
                }
                let k: u64 = line
                    .tok(4, "a slot")?
                    .parse()
                    .map_err(|_| line.err(4, "slot must be an integer"))?;
                injects.push((n, src.to_string(), dst.to_string(), copy, k, line.no, line.col(2)));
            }
            other => return Err(line.err(0, format!("unexpected `{other}` in provenance"))),
        }
    }
    // Rebuild the source diagram.
    let max_level = level_of.iter().map(|(_, n)| *n).max().unwrap_or(0);
    if max_level + 1 != depth {
        return Err(head.err(2, "provenance depth does not match the source levels"));
    }
    let mut levels: Vec<Vec<DiagVertex>> = vec![Vec::new(); depth];
    for (id, n) in &level_of {
        let dim = dim_of
            .get(id)
            .ok_or_else(|| head.err(0, format!("missing source-dim for {id}")))?;
        levels[*n].push(DiagVertex::new(id.clone(), dim.clone()));
    }
    let levels: Vec<Level> = levels.into_iter().map(Level::new).collect();
    let mut matrices: Vec<MultMatrix> = (0..depth.saturating_sub(1))
        .map(|n| MultMatrix::zero(levels[n].width(), levels[n + 1].width()))
        .collect();
    let mut slot_rows: BTreeMap<(usize, usize), SlotRow> = BTreeMap::new();
    for (n, src, dst, copy, k, line, col) in &injects {
        if *n == 0 || *n >= depth {
            return Err(perr(*line, *col, "inject level out of range"));
        }
        let i = levels[*n - 1]
            .index_of(src)
            .ok_or_else(|| perr(*line, *col, format!("unknown source {src}")))?;
        let j = levels[*n]
            .index_of(dst)
            .ok_or_else(|| perr(*line, *col, format!("unknown target {dst}")))?;
        let current = matrices[*n - 1].get(i, j).clone();
        let needed = Nat::from(copy + 1);
        if current < needed {
            matrices[*n - 1].set(i, j, needed);
        }
        slot_rows.entry((*n, j)).or_default().push((i, *copy, *k));
    }
    let diagram = wrap_build(
        head.no,
        BratteliDiagram::new(format!("{}.source", body.name()), levels, matrices, None),
    )?;
    let injections = InjectionTable::new(slot_rows);
    let realized = wrap_build(
        head.no,
        RealizedUltragraph::reassemble(diagram, injections, &body, deltas),
    )?;
    Ok(realized)
}

fn parse_matrix(section: &[TokLine<'_>]) -> Result<Document> {
    let name = parse_name(&section[0])?;
    let mut indices = Vec::new();
    let mut rows = Vec::new();
    let mut periodic = None;
    for line in &section[1..] {
        match line.first() {
            "row" => {
                let id = line
                    .tok(1, "an index")?
                    .strip_suffix(':')
                    .ok_or_else(|| line.err(1, "expected `row <i>: <j> ...`"))?
                    .to_string();
                let mut resolved = BTreeSet::new();
                let mut all = false;
                let mut exclusions = BTreeSet::new();
                let mut tails = BTreeSet::new();
                for i in 2..line.tokens.len() {
                    let t = line.tokens[i].1;
                    if t == "*all" {
                        all = true;
                    } else if let Some(x) = t.strip_prefix('!') {
                        exclusions.insert(x.to_string());
                    } else if let Some(inner) =
                        t.strip_prefix("+tail(").and_then(|s| s.strip_suffix(')'))
                    {
                        tails.insert(inner.to_string());
                    } else if t.starts_with('*') || t.starts_with('+') {
                        return Err(line.err(i, format!("unexpected marker `{t}`")));
                    } else {
                        resolved.insert(t.to_string());
                    }
                }
                if !all && !exclusions.is_empty() {
                    return Err(line.err(2, "exclusions `!j` need `*all`"));
                }
                if all && !resolved.is_empty() {
                    return Err(line.err(2, "a row is either explicit or `*all !...`"));
                }
                let base = if all {
                    RowBase::Cofinite(exclusions)
                } else {
                    RowBase::Finite(resolved)
                };
                indices.push(id);
                rows.push(MatrixRow::new(base, tails));
            }
            "periodic" => periodic = Some(parse_usize(line, 1, "template size")?),
            other => return Err(line.err(0, format!("unexpected `{other}` in a matrix"))),
        }
    }
    let m = wrap_build(
        section[0].no,
        ZeroOneMatrix::new(name, indices, rows, periodic),
    )?;
    Ok(Document::Matrix(m))
}

fn flag_slot<'a>(a: &'a mut AlgDescriptor, name: &str) -> Option<&'a mut Tri> {
    Some(match name {
        "nonzero" => &mut a.nonzero,
        "simple" => &mut a.simple,
        "unital" => &mut a.unital,
        "finite_dimensional" => &mut a.finite_dimensional,
        "stable" => &mut a.stable,
        "commutative_nondiscrete_spectrum" => &mut a.commutative_nondiscrete_spectrum,
        "has_c_quotient" => &mut a.has_c_quotient,
        "has_findim_quotient" => &mut a.has_findim_quotient,
        "has_unital_quotient" => &mut a.has_unital_quotient,
        "has_unital_non_type_i_quotient" => &mut a.has_unital_non_type_i_quotient,
        "has_unital_quotient_with_infinitely_many_ideals" => {
            &mut a.has_unital_quotient_with_infinitely_many_ideals
        }
        "m2_unitization_of_exel_laca" => &mut a.m2_unitization_of_exel_laca,
        _ => return None,
    })
}

const FLAG_ORDER: [&str; 12] = [
    "nonzero",
    "simple",
    "unital",
    "finite_dimensional",
    "stable",
    "commutative_nondiscrete_spectrum",
    "has_c_quotient",
    "has_findim_quotient",
    "has_unital_quotient",
    "has_unital_non_type_i_quotient",
    "has_unital_quotient_with_infinitely_many_ideals",
    "m2_unitization_of_exel_laca",
];

fn parse_descriptor(section: &[TokLine<'_>], previous: &[Document]) -> Result<Document> {
    let name = parse_name(&section[0])?;
    let mut pos = 1;
    let a = parse_descriptor_body(section, &mut pos, name, previous, 0)?;
    if pos != section.len() {
        return Err(section[pos].err(0, "unexpected content after the descriptor"));
    }
    Ok(Document::Descriptor(a))
}

fn parse_descriptor_body(
    section: &[TokLine<'_>],
    pos: &mut usize,
    name: String,
    previous: &[Document],
    depth: usize,
) -> Result<AlgDescriptor> {
    let mut a = AlgDescriptor::named(name);
    while *pos < section.len() {
        let line = &section[*pos];
        match line.first() {
            "flag" => {
                let flag = line.tok(1, "a flag name")?;
                if line.tok(2, "`=`")? != "=" {
                    return Err(line.err(2, "expected `=`"));
                }
                let value: Tri = line
                    .tok(3, "yes|no|unknown")?
                    .parse()
                    .map_err(|_| line.err(3, "expected yes, no, or unknown"))?;
                let slot = flag_slot(&mut a, flag)
                    .ok_or_else(|| line.err(1, format!("unknown flag `{flag}`")))?;
                *slot = value;
                *pos += 1;
            }
            "summand" => {
                if line.tok(1, "`{`")? != "{" {
                    return Err(line.err(1, "expected `summand {`"));
                }
                *pos += 1;
                let child_name = format!("{}.summand{}", a.name, a.summands.len() + 1);
                let child =
                    parse_descriptor_body(section, pos, child_name, previous, depth + 1)?;
                a.summands.push(child);
            }
            "}" => {
                if depth == 0 {
                    return Err(line.err(0, "unmatched `}`"));
                }
                *pos += 1;
                return Ok(a);
            }
            "witness" => {
                let kind = line.tok(1, "a witness kind")?;
                let target = line.tok(2, "a document name")?;
                let doc = previous
                    .iter()
                    .find(|d| d.name() == target)
                    .ok_or_else(|| {
                        line.err(2, format!("witness `{target}` is not defined earlier in the input"))
                    })?;
                let witness = match (kind, doc) {
                    ("graph", Document::Graph(g)) => Witness::Graph(g.clone()),
                    ("ultragraph", Document::Ultragraph(u)) => Witness::Ultragraph(u.clone()),
                    ("ultragraph", Document::Realized(r)) => {
                        Witness::Ultragraph(r.ultragraph().clone())
                    }
                    ("matrix", Document::Matrix(m)) => Witness::Matrix(m.clone()),
                    _ => {
                        return Err(line.err(
                            1,
                            format!("witness `{target}` is not a {kind} document"),
                        ))
                    }
                };
                a.witnesses.push(witness);
                *pos += 1;
            }
            other => return Err(line.err(0, format!("unexpected `{other}` in a descriptor"))),
        }
    }
    if depth != 0 {
        return Err(perr(
            section.last().map(|l| l.no).unwrap_or(1),
            1,
            "unterminated summand block",
        ));
    }
    Ok(a)
}

/// Prints the canonical form of one document.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    print_into(doc, &mut BTreeSet::new(), &mut out);
    out
}

/// Prints several documents separated by blank lines. Witness documents a
/// descriptor would hoist are skipped when they already appeared in the
/// batch, so printing is idempotent across multi-document inputs.
pub fn print_all(docs: &[Document]) -> String {
    let mut out = String::new();
    let mut seen = BTreeSet::new();
    for (i, d) in docs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_into(d, &mut seen, &mut out);
    }
    out
}

fn print_into(doc: &Document, seen: &mut BTreeSet<String>, out: &mut String) {
    use fmt::Write;
    match doc {
        Document::Diagram(d) => {
            writeln!(out, "diagram {}", d.name()).unwrap();
            for (n, level) in d.levels().iter().enumerate() {
                let cells: Vec<String> = level
                    .vertices
                    .iter()
                    .map(|v| format!("{}={}", v.id, v.dim))
                    .collect();
                writeln!(out, "level {}: {}", n + 1, cells.join(" ")).unwrap();
                if n + 1 < d.depth() {
                    let m = d.matrix(n);
                    let mut cells = Vec::new();
                    for i in 0..m.rows() {
                        for j in 0..m.cols() {
                            let mult = m.get(i, j);
                            if !num_traits::Zero::is_zero(mult) {
                                cells.push(format!(
                                    "{}->{}:{}",
                                    level.vertices[i].id,
                                    d.level(n + 1).vertices[j].id,
                                    mult
                                ));
                            }
                        }
                    }
                    if !cells.is_empty() {
                        writeln!(out, "edges {}: {}", n + 1, cells.join(" ")).unwrap();
                    }
                }
            }
            if let Some(t) = d.tail() {
                writeln!(out, "periodic from {} period {}", t.from + 1, t.period).unwrap();
            }
        }
        Document::Graph(g) => {
            writeln!(out, "graph {}", g.name()).unwrap();
            for v in g.vertices() {
                if g.explicit_boundary().contains(v) {
                    writeln!(out, "vertex {v} @boundary").unwrap();
                } else {
                    writeln!(out, "vertex {v}").unwrap();
                }
            }
            for e in g.edges() {
                let inf = if e.infinite { " *inf" } else { "" };
                writeln!(out, "edge {}: {} -> {{ {} }}{}", e.id, e.source, e.target, inf).unwrap();
            }
            if let Some(k) = g.periodic() {
                writeln!(out, "periodic {k}").unwrap();
            }
        }
        Document::Ultragraph(u) => print_ultragraph(u, None, out),
        Document::Realized(r) => print_ultragraph(r.ultragraph(), Some(r), out),
        Document::Matrix(m) => {
            writeln!(out, "matrix {}", m.name()).unwrap();
            for (i, row) in m.rows() {
                let mut cells: Vec<String> = Vec::new();
                match &row.base {
                    RowBase::Finite(s) => cells.extend(s.iter().cloned()),
                    RowBase::Cofinite(excl) => {
                        cells.push("*all".into());
                        cells.extend(excl.iter().map(|x| format!("!{x}")));
                    }
                }
                cells.extend(row.tails.iter().map(|t| format!("+tail({t})")));
                writeln!(out, "row {}: {}", i, cells.join(" ")).unwrap();
            }
            if let Some(k) = m.periodic() {
                writeln!(out, "periodic {k}").unwrap();
            }
        }
        Document::Descriptor(a) => {
            // Witness documents come first so that the output parses.
            let mut witness_docs = Vec::new();
            collect_witness_docs(a, seen, &mut witness_docs);
            for w in witness_docs {
                print_into(&w, seen, out);
                out.push('\n');
            }
            writeln!(out, "descriptor {}", a.name).unwrap();
            print_descriptor_body(a, out);
        }
    }
    seen.insert(doc.name().to_string());
}

fn collect_witness_docs(a: &AlgDescriptor, seen: &mut BTreeSet<String>, out: &mut Vec<Document>) {
    for w in &a.witnesses {
        let doc = match w {
            Witness::Graph(g) => Document::Graph(g.clone()),
            Witness::Ultragraph(u) => Document::Ultragraph(u.clone()),
            Witness::Matrix(m) => Document::Matrix(m.clone()),
        };
        if seen.insert(doc.name().to_string()) {
            out.push(doc);
        }
    }
    for s in &a.summands {
        collect_witness_docs(s, seen, out);
    }
}

fn print_descriptor_body(a: &AlgDescriptor, out: &mut String) {
    use fmt::Write;
    let mut probe = a.clone();
    for flag in FLAG_ORDER {
        let value = *flag_slot(&mut probe, flag).unwrap();
        if !value.is_unknown() {
            writeln!(out, "flag {flag} = {value}").unwrap();
        }
    }
    for s in &a.summands {
        writeln!(out, "summand {{").unwrap();
        print_descriptor_body(s, out);
        writeln!(out, "}}").unwrap();
    }
    for w in &a.witnesses {
        let (kind, name) = match w {
            Witness::Graph(g) => ("graph", g.name().to_string()),
            Witness::Ultragraph(u) => ("ultragraph", u.name().to_string()),
            Witness::Matrix(m) => ("matrix", m.name().to_string()),
        };
        writeln!(out, "witness {kind} {name}").unwrap();
    }
}

fn print_ultragraph(u: &Ultragraph, realized: Option<&RealizedUltragraph>, out: &mut String) {
    use fmt::Write;
    writeln!(out, "ultragraph {}", u.name()).unwrap();
    for v in u.vertices() {
        if u.explicit_boundary().contains(v) {
            writeln!(out, "vertex {v} @boundary").unwrap();
        } else {
            writeln!(out, "vertex {v}").unwrap();
        }
    }
    for e in u.edges() {
        let mut cells: Vec<String> = Vec::new();
        if let Some(excl) = e.range.all_except() {
            cells.push("*all".into());
            cells.extend(excl.iter().map(|x| format!("!{x}")));
        }
        cells.extend(e.range.resolved().iter().cloned());
        let tails: Vec<String> = e
            .range
            .tails()
            .iter()
            .map(|t| format!("+tail({t})"))
            .collect();
        let tail_suffix = if tails.is_empty() {
            String::new()
        } else {
            format!(" {}", tails.join(" "))
        };
        writeln!(
            out,
            "edge {}: {} -> {{ {} }}{}",
            e.id,
            e.source,
            cells.join(" "),
            tail_suffix
        )
        .unwrap();
    }
    if let Some(k) = u.periodic() {
        writeln!(out, "periodic {k}").unwrap();
    }
    if let Some(r) = realized {
        let d = r.diagram();
        writeln!(out, "provenance depth {}", r.depth()).unwrap();
        for (n, level) in d.levels().iter().enumerate() {
            for v in &level.vertices {
                writeln!(out, "source-level {} = {}", v.id, n + 1).unwrap();
            }
        }
        for level in d.levels() {
            for v in &level.vertices {
                writeln!(out, "source-dim {} = {}", v.id, v.dim).unwrap();
            }
        }
        for level in d.levels() {
            for v in &level.vertices {
                writeln!(out, "delta {} = {}", v.id, r.deltas().get(&v.id).unwrap()).unwrap();
            }
        }
        for (&(n, j), row) in r.injections().rows() {
            for (i, copy, k) in row {
                writeln!(
                    out,
                    "inject {}: {}->{}#{} = {}",
                    n + 1,
                    d.level(n - 1).vertices[*i].id,
                    d.level(n).vertices[j].id,
                    copy,
                    k
                )
                .unwrap();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::{build_ultragraph, InjectionChoice};

    const WORKED: &str = "\
# the three-level example
diagram worked_example
level 1: s=2 t=2 u=3
edges 1: s->v:1 t->v:2 t->w:2 u->w:1
level 2: v=8 w=7
edges 2: v->x:1 v->y:1 v->z:1 w->y:2 w->z:1
level 3: x=9 y=22 z=16
";

    #[test]
    fn diagram_round_trips() {
        let doc = parse(WORKED).unwrap();
        let printed = print(&doc);
        let reparsed = parse(&printed).unwrap();
        assert_eq!(doc, reparsed);
        assert_eq!(printed, print(&reparsed));
    }

    #[test]
    fn zero_dimension_is_an_error_with_location() {
        let err = parse("diagram bad\nlevel 1: v=0\n").unwrap_err();
        match err {
            Error::Parse { line, column, message } => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
                assert!(message.contains(">= 1"), "{message}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_vertex_in_edges_is_located() {
        let err = parse("diagram bad\nlevel 1: v=2\nedges 1: v->w:1\nlevel 2: x=4\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown vertex w"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graph_and_matrix_round_trip() {
        let text = "\
graph vw
vertex v1
vertex w1
vertex v2
vertex w2
edge c1: v1 -> { v2 }
edge s1: v1 -> { w1 }
periodic 2

matrix shifty
row 1: *all !1
row 2: 3
row 3: +tail(3)
periodic 1
";
        let docs = parse_all(text).unwrap();
        assert_eq!(docs.len(), 2);
        let printed = print_all(&docs);
        let reparsed = parse_all(&printed).unwrap();
        assert_eq!(docs, reparsed);
        assert_eq!(printed, print_all(&reparsed));
    }

    #[test]
    fn infinite_edges_parse_on_graphs_only() {
        let g = parse("graph ktilde\nvertex v\nvertex w\nedge e: v -> { w } *inf\n").unwrap();
        match &g {
            Document::Graph(g) => assert!(g.edges()[0].infinite),
            other => panic!("{other:?}"),
        }
        assert!(parse("ultragraph u\nvertex v\nedge e: v -> { v } *inf\n").is_err());
    }

    #[test]
    fn descriptor_with_witness_resolves_earlier_documents() {
        let text = "\
graph f2
vertex v1
vertex v2
edge a1: v1 -> { v2 }
edge b1: v1 -> { v2 }
periodic 1

descriptor cf2
flag nonzero = yes
flag simple = yes
flag unital = no
flag finite_dimensional = no
summand {
flag nonzero = yes
}
witness graph f2
";
        let docs = parse_all(text).unwrap();
        let Document::Descriptor(a) = &docs[1] else {
            panic!("expected a descriptor");
        };
        assert_eq!(a.witnesses.len(), 1);
        assert_eq!(a.summands.len(), 1);
        let printed = print(&docs[1]);
        // The printed descriptor embeds its witness first and reparses.
        let reparsed = parse_all(&printed).unwrap();
        assert_eq!(reparsed.len(), 2);
        assert_eq!(&reparsed[1], &docs[1]);
    }

    #[test]
    fn missing_witness_is_an_error() {
        let err = parse("descriptor d\nwitness graph nope\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn realized_ultragraph_round_trips_with_provenance() {
        let d = crate::realize::testutil::worked_example();
        let realized = build_ultragraph(&d, 3, InjectionChoice::Deterministic).unwrap();
        let doc = Document::Realized(realized.clone());
        let printed = print(&doc);
        let reparsed = parse(&printed).unwrap();
        match reparsed {
            Document::Realized(r) => {
                assert_eq!(r.ultragraph().edges(), realized.ultragraph().edges());
                assert_eq!(r.injections(), realized.injections());
                assert_eq!(r.diagram().levels(), realized.diagram().levels());
            }
            other => panic!("expected a realized ultragraph, got {other:?}"),
        }
        assert_eq!(printed, print(&parse(&printed).unwrap()));
    }

    #[test]
    fn corrupted_provenance_is_rejected() {
        let d = crate::realize::testutil::worked_example();
        let realized = build_ultragraph(&d, 3, InjectionChoice::Deterministic).unwrap();
        let printed = print(&Document::Realized(realized));
        // Flip one injection slot: the replay no longer matches the body.
        let broken = printed.replace("inject 3: v->x#0 = 1", "inject 3: v->x#0 = 0");
        assert_ne!(printed, broken);
        assert!(parse(&broken).is_err());
    }

    #[test]
    fn print_parse_is_idempotent_on_a_mixed_corpus() {
        let texts = [
            WORKED,
            "graph g\nvertex a\nvertex b @boundary\nedge e: a -> { b }\n",
            "ultragraph u\nvertex a\nvertex b\nedge e: a -> { *all !a }\n",
            "matrix m\nrow i: j\nrow j: i\n",
            "descriptor d\nflag stable = yes\n",
        ];
        for text in texts {
            let doc = parse(text).unwrap();
            let once = print(&doc);
            let twice = print(&parse(&once).unwrap());
            assert_eq!(once, twice, "not idempotent for:\n{text}");
        }
    }
}
