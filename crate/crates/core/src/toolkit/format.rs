//! Line-oriented text formats.
//!
//! ```text
//! c comment
//! p semimatch <jobs> <machines> <edges>
//! e <job> <machine> <weight>
//! ```
//!
//! Cover graphs use `p cover <vertices> <edges>` and `e <a> <b>`. Ids are
//! 1-based on disk. Assignments are `a <job> <machine>` lines followed by
//! `cost <value>`.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cover::{EdgeCover, SimpleGraph};
use crate::error::InstanceError;
use crate::graph::{BipartiteInstance, Cost, Edge, SemiMatching, WEIGHT_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: record before the problem line")]
    MissingHeader { line: usize },
    #[error("no problem line found")]
    EmptyInput,
    #[error("line {line}: malformed problem line: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: second problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: expected a `{expected}` file, found `{found}`")]
    WrongKind { line: usize, expected: &'static str, found: String },
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: unknown record type `{tag}`")]
    UnknownRecord { line: usize, tag: String },
    #[error("line {line}: {what} id {id} out of range 1..={max}")]
    IdOutOfRange { line: usize, what: &'static str, id: u64, max: usize },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: i64 },
    #[error("line {line}: weight {weight} exceeds 2^31 - 1")]
    WeightTooLarge { line: usize, weight: u64 },
    #[error("line {line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("line {line}: self-loop")]
    SelfLoop { line: usize },
    #[error("header declares {expected} edges, body has {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("line {line}: job {job} assigned twice")]
    DuplicateAssignment { line: usize, job: usize },
    #[error("infeasible: {0}")]
    Infeasible(InstanceError),
}

impl ParseError {
    /// Whether the text was well formed but describes an unsolvable problem.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, ParseError::Infeasible(_))
    }
}

/// A parsed problem file of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemFile {
    SemiMatching(BipartiteInstance),
    Cover(SimpleGraph),
}

struct Record<'a> {
    line: usize,
    tag: &'a str,
    fields: Vec<&'a str>,
}

fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let mut it = raw.split_whitespace();
        let tag = it.next()?;
        (tag != "c").then(|| Record { line: i + 1, tag, fields: it.collect() })
    })
}

fn number(rec: &Record<'_>, idx: usize, what: &str) -> Result<u64, ParseError> {
    let raw = rec.fields.get(idx).ok_or_else(|| ParseError::MalformedRecord {
        line: rec.line,
        reason: format!("missing {what}"),
    })?;
    if let Some(neg) = raw.strip_prefix('-') {
        if neg.parse::<u64>().is_ok() {
            return Err(ParseError::MalformedRecord {
                line: rec.line,
                reason: format!("negative {what} {raw}"),
            });
        }
    }
    raw.parse().map_err(|_| ParseError::MalformedRecord {
        line: rec.line,
        reason: format!("{what} `{raw}` is not a non-negative integer"),
    })
}

fn id(rec: &Record<'_>, idx: usize, what: &'static str, max: usize) -> Result<usize, ParseError> {
    let v = number(rec, idx, what)?;
    if v == 0 || v > max as u64 {
        return Err(ParseError::IdOutOfRange { line: rec.line, what, id: v, max });
    }
    Ok(v as usize - 1)
}

fn expect_fields(rec: &Record<'_>, n: usize) -> Result<(), ParseError> {
    if rec.fields.len() != n {
        return Err(ParseError::MalformedRecord {
            line: rec.line,
            reason: format!("expected {n} fields after `{}`, found {}", rec.tag, rec.fields.len()),
        });
    }
    Ok(())
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut recs = records(text);
    let header = recs.next().ok_or(ParseError::EmptyInput)?;
    if header.tag != "p" {
        return Err(ParseError::MissingHeader { line: header.line });
    }
    let bad_header = |reason: &str| ParseError::MalformedHeader {
        line: header.line,
        reason: reason.to_string(),
    };
    let kind = *header.fields.first().ok_or_else(|| bad_header("missing problem kind"))?;
    let count = |idx: usize, what: &str| -> Result<usize, ParseError> {
        let raw = header.fields.get(idx).ok_or_else(|| bad_header(&format!("missing {what}")))?;
        raw.parse().map_err(|_| bad_header(&format!("{what} `{raw}` is not a count")))
    };
    match kind {
        "semimatch" => {
            if header.fields.len() != 4 {
                return Err(bad_header("expected `p semimatch <jobs> <machines> <edges>`"));
            }
            let (n, nm, m) = (count(1, "job count")?, count(2, "machine count")?, count(3, "edge count")?);
            let mut edges = Vec::with_capacity(m.min(1 << 20));
            let mut seen = HashSet::new();
            for rec in recs {
                match rec.tag {
                    "e" => {
                        expect_fields(&rec, 3)?;
                        let job = id(&rec, 0, "job", n)?;
                        let machine = id(&rec, 1, "machine", nm)?;
                        let raw = rec.fields[2];
                        if let Ok(w) = raw.parse::<i64>() {
                            if w < 0 {
                                return Err(ParseError::NegativeWeight { line: rec.line, weight: w });
                            }
                        }
                        let weight = number(&rec, 2, "weight")?;
                        if weight >= WEIGHT_LIMIT {
                            return Err(ParseError::WeightTooLarge { line: rec.line, weight });
                        }
                        if !seen.insert((job, machine)) {
                            return Err(ParseError::DuplicateEdge { line: rec.line });
                        }
                        edges.push(Edge { job, machine, weight: weight as u32 });
                    }
                    "p" => return Err(ParseError::DuplicateHeader { line: rec.line }),
                    tag => return Err(ParseError::UnknownRecord { line: rec.line, tag: tag.into() }),
                }
            }
            if edges.len() != m {
                return Err(ParseError::CountMismatch { expected: m, found: edges.len() });
            }
            BipartiteInstance::new(n, nm, edges)
                .map(ProblemFile::SemiMatching)
                .map_err(ParseError::Infeasible)
        }
        "cover" => {
            if header.fields.len() != 3 {
                return Err(bad_header("expected `p cover <vertices> <edges>`"));
            }
            let (n, m) = (count(1, "vertex count")?, count(2, "edge count")?);
            let mut pairs = Vec::with_capacity(m.min(1 << 20));
            let mut seen = HashSet::new();
            for rec in recs {
                match rec.tag {
                    "e" => {
                        expect_fields(&rec, 2)?;
                        let a = id(&rec, 0, "vertex", n)?;
                        let b = id(&rec, 1, "vertex", n)?;
                        if a == b {
                            return Err(ParseError::SelfLoop { line: rec.line });
                        }
                        if !seen.insert((a.min(b), a.max(b))) {
                            return Err(ParseError::DuplicateEdge { line: rec.line });
                        }
                        pairs.push((a, b));
                    }
                    "p" => return Err(ParseError::DuplicateHeader { line: rec.line }),
                    tag => return Err(ParseError::UnknownRecord { line: rec.line, tag: tag.into() }),
                }
            }
            if pairs.len() != m {
                return Err(ParseError::CountMismatch { expected: m, found: pairs.len() });
            }
            let graph = SimpleGraph::new(n, &pairs).map_err(ParseError::Infeasible)?;
            if let Some(v) = (0..n).find(|&v| graph.degree(v) == 0) {
                return Err(ParseError::Infeasible(InstanceError::IsolatedVertex { vertex: v }));
            }
            Ok(ProblemFile::Cover(graph))
        }
        other => Err(ParseError::WrongKind {
            line: header.line,
            expected: "semimatch` or `cover",
            found: other.to_string(),
        }),
    }
}

pub fn parse_instance(text: &str) -> Result<BipartiteInstance, ParseError> {
    match parse_problem(text)? {
        ProblemFile::SemiMatching(g) => Ok(g),
        ProblemFile::Cover(_) => Err(ParseError::WrongKind {
            line: header_line(text),
            expected: "semimatch",
            found: "cover".into(),
        }),
    }
}

pub fn parse_cover_graph(text: &str) -> Result<SimpleGraph, ParseError> {
    match parse_problem(text)? {
        ProblemFile::Cover(g) => Ok(g),
        ProblemFile::SemiMatching(_) => Err(ParseError::WrongKind {
            line: header_line(text),
            expected: "cover",
            found: "semimatch".into(),
        }),
    }
}

fn header_line(text: &str) -> usize {
    records(text).next().map_or(0, |r| r.line)
}

pub fn emit_instance(instance: &BipartiteInstance) -> String {
    let mut out = format!(
        "p semimatch {} {} {}\n",
        instance.num_jobs(),
        instance.num_machines(),
        instance.num_edges()
    );
    for e in instance.edges() {
        writeln!(out, "e {} {} {}", e.job + 1, e.machine + 1, e.weight).unwrap();
    }
    out
}

pub fn emit_cover_graph(graph: &SimpleGraph) -> String {
    let mut out = format!("p cover {} {}\n", graph.num_vertices(), graph.num_edges());
    for &(a, b) in graph.edges() {
        writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
    }
    out
}

/// Assignment lines for every job, then the cost trailer.
pub fn emit_assignment(matching: &SemiMatching, cost: Cost) -> String {
    let mut out = String::new();
    for (u, m) in matching.assignment().iter().enumerate() {
        if let Some(v) = m {
            writeln!(out, "a {} {}", u + 1, v + 1).unwrap();
        }
    }
    writeln!(out, "cost {cost}").unwrap();
    out
}

/// Cover edges as `e <a> <b>` lines, then the cost trailer.
pub fn emit_cover(graph: &SimpleGraph, cover: &EdgeCover) -> String {
    let mut out = String::new();
    for &e in cover.edges() {
        let (a, b) = graph.edge(e);
        writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
    }
    writeln!(out, "cost {}", cover.cost()).unwrap();
    out
}

/// Reads `a` lines (and an optional `cost` trailer) for an instance with
/// `num_jobs` jobs and `num_machines` machines.
pub fn parse_assignment(
    text: &str,
    num_jobs: usize,
    num_machines: usize,
) -> Result<(SemiMatching, Option<Cost>), ParseError> {
    let mut matching = SemiMatching::unassigned(num_jobs);
    let mut cost = None;
    for rec in records(text) {
        match rec.tag {
            "a" => {
                expect_fields(&rec, 2)?;
                let job = id(&rec, 0, "job", num_jobs)?;
                let machine = id(&rec, 1, "machine", num_machines)?;
                if matching.machine_of(job).is_some() {
                    return Err(ParseError::DuplicateAssignment { line: rec.line, job: job + 1 });
                }
                matching.assign(job, machine);
            }
            "cost" => {
                expect_fields(&rec, 1)?;
                cost = Some(rec.fields[0].parse().map_err(|_| ParseError::MalformedRecord {
                    line: rec.line,
                    reason: format!("cost `{}` is not an integer", rec.fields[0]),
                })?);
            }
            tag => return Err(ParseError::UnknownRecord { line: rec.line, tag: tag.into() }),
        }
    }
    Ok((matching, cost))
}

/// Reads the edge ids named by `e` lines of a cover (and an optional `cost`
/// trailer). Coverage is left to [`EdgeCover::new`].
pub fn parse_cover(text: &str, graph: &SimpleGraph) -> Result<(Vec<usize>, Option<Cost>), ParseError> {
    let n = graph.num_vertices();
    let mut edges = Vec::new();
    let mut cost = None;
    for rec in records(text) {
        match rec.tag {
            "e" => {
                expect_fields(&rec, 2)?;
                let a = id(&rec, 0, "vertex", n)?;
                let b = id(&rec, 1, "vertex", n)?;
                let e = graph.neighbors(a).iter().find(|&&(w, _)| w == b).map(|&(_, e)| e);
                edges.push(e.ok_or_else(|| ParseError::MalformedRecord {
                    line: rec.line,
                    reason: format!("{} {} is not an edge of the graph", a + 1, b + 1),
                })?);
            }
            "cost" => {
                expect_fields(&rec, 1)?;
                cost = Some(rec.fields[0].parse().map_err(|_| ParseError::MalformedRecord {
                    line: rec.line,
                    reason: format!("cost `{}` is not an integer", rec.fields[0]),
                })?);
            }
            tag => return Err(ParseError::UnknownRecord { line: rec.line, tag: tag.into() }),
        }
    }
    Ok((edges, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_small_instance() {
        let g = parse_instance("p semimatch 2 1 2\ne 1 1 1\ne 2 1 2\n").unwrap();
        assert_eq!((g.num_jobs(), g.num_machines()), (2, 1));
        let w: Vec<u32> = g.edges().iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![1, 2]);
    }

    #[test]
    fn named_errors() {
        let err = |t: &str| parse_instance(t).unwrap_err();
        assert_eq!(
            err("p semimatch 1 1 1\ne 1 2 1\n"),
            ParseError::IdOutOfRange { line: 2, what: "machine", id: 2, max: 1 }
        );
        assert_eq!(err("e 1 1 1\n"), ParseError::MissingHeader { line: 1 });
        assert_eq!(err(""), ParseError::EmptyInput);
        assert!(matches!(err("p semimatch 1 1\n"), ParseError::MalformedHeader { line: 1, .. }));
        assert_eq!(err("p semimatch 1 1 2\ne 1 1 1\n"), ParseError::CountMismatch { expected: 2, found: 1 });
        assert_eq!(
            err("p semimatch 1 1 1\nc note\ne 1 1 -3\n"),
            ParseError::NegativeWeight { line: 3, weight: -3 }
        );
        assert!(matches!(err("p semimatch 1 1 1\ne 1 1\n"), ParseError::MalformedRecord { line: 2, .. }));
        assert_eq!(err("p semimatch 1 1 2\ne 1 1 1\ne 1 1 4\n"), ParseError::DuplicateEdge { line: 3 });
        assert!(err("p semimatch 2 1 1\ne 1 1 1\n").is_infeasible());
        assert!(matches!(err("p cover 2 1\ne 1 2\n"), ParseError::WrongKind { .. }));
        assert!(matches!(err("p semimatch 1 1 1\ne 1 1 9999999999\n"), ParseError::WeightTooLarge { .. }));
    }

    #[test]
    fn cover_files() {
        let g = parse_cover_graph("c path\np cover 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(parse_cover_graph(&emit_cover_graph(&g)).unwrap(), g);
        assert!(parse_cover_graph("p cover 3 1\ne 1 2\n").unwrap_err().is_infeasible());
        assert_eq!(parse_cover_graph("p cover 2 1\ne 2 2\n").unwrap_err(), ParseError::SelfLoop { line: 2 });
        let cover = EdgeCover::new(&g, vec![0, 1]).unwrap();
        let text = emit_cover(&g, &cover);
        assert_eq!(text, "e 1 2\ne 2 3\ncost 5\n");
        assert_eq!(parse_cover(&text, &g).unwrap(), (vec![0, 1], Some(5)));
        assert!(matches!(parse_cover("e 1 3\n", &g), Err(ParseError::MalformedRecord { line: 1, .. })));
    }

    #[test]
    fn assignment_round_trip() {
        let m = SemiMatching::from_assignment(vec![0, 1, 1]);
        let text = emit_assignment(&m, 7);
        assert_eq!(text, "a 1 1\na 2 2\na 3 2\ncost 7\n");
        assert_eq!(parse_assignment(&text, 3, 2).unwrap(), (m, Some(7)));
        assert!(matches!(
            parse_assignment("a 1 1\na 1 2\n", 1, 2),
            Err(ParseError::DuplicateAssignment { line: 2, job: 1 })
        ));
    }

    fn instance() -> impl Strategy<Value = BipartiteInstance> {
        (1usize..6, 1usize..5)
            .prop_flat_map(|(n, nm)| {
                (
                    Just(nm),
                    proptest::collection::vec(0..nm, n),
                    proptest::collection::vec((0u32..20, any::<bool>()), n * nm),
                )
            })
            .prop_map(|(nm, fallback, cells)| {
                let n = fallback.len();
                let mut edges = Vec::new();
                for (u, row) in cells.chunks(nm).enumerate() {
                    for (v, &(w, on)) in row.iter().enumerate() {
                        if on || v == fallback[u] {
                            edges.push(Edge { job: u, machine: v, weight: w });
                        }
                    }
                }
                BipartiteInstance::new(n, nm, edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(g in instance()) {
            let text = emit_instance(&g);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(emit_instance(&back), text);
        }

        #[test]
        fn parser_never_panics(text in "[pec0-9 \\-a-z\n]{0,80}") {
            let _ = parse_problem(&text);
        }

        #[test]
        fn parser_never_panics_on_near_misses(
            body in proptest::collection::vec("(e|c|p|x)( -?[0-9]{1,3}){0,4}", 0..6)
        ) {
            let text = format!("p semimatch 3 2 2\n{}\n", body.join("\n"));
            let _ = parse_problem(&text);
        }
    }
}
