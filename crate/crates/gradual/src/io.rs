//! Plain-text formats.
//!
//! Graph files hold one edge `u v w` per line (weight optional, default 1)
//! or a lone vertex id for an isolated vertex. Solution files hold one
//! `u v` pair per line. Update streams use `+e u v w`, `-e u v`,
//! `+v id [u w]...` and `-v id`. Blank lines and `#` comments are skipped
//! everywhere.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError, UpdateEvent, VertexId};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Non-empty, comment-stripped lines with 1-based numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> + '_ {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| (i + 1, body.split_whitespace().collect()))
    })
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("bad {what} {tok:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut g = Graph::new();
    for (line, toks) in data_lines(text) {
        match toks.as_slice() {
            [v] => {
                g.ensure_vertex(num(line, v, "vertex")?);
            }
            [u, v, rest @ ..] if rest.len() <= 1 => {
                let u: VertexId = num(line, u, "vertex")?;
                let v: VertexId = num(line, v, "vertex")?;
                let w: f64 = match rest.first() {
                    Some(t) => num(line, t, "weight")?,
                    None => 1.0,
                };
                g.insert_edge(u, v, w).map_err(|source| ParseError::Graph { line, source })?;
            }
            _ => return Err(syntax(line, "expected `u v [w]` or a single vertex id")),
        }
    }
    Ok(g)
}

pub fn emit_graph(g: &Graph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    for v in g.vertices() {
        if g.degree(v) == 0 {
            writeln!(out, "{v}").unwrap();
        }
    }
    out
}

pub fn parse_pairs(text: &str) -> Result<Vec<(VertexId, VertexId)>, ParseError> {
    data_lines(text)
        .map(|(line, toks)| match toks.as_slice() {
            [u, v] => Ok((num(line, u, "vertex")?, num(line, v, "vertex")?)),
            _ => Err(syntax(line, "expected `u v`")),
        })
        .collect()
}

pub fn emit_pairs(pairs: &[(VertexId, VertexId)]) -> String {
    let mut out = String::new();
    for (u, v) in pairs {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn parse_update(line: usize, toks: &[&str]) -> Result<UpdateEvent, ParseError> {
    match toks {
        ["+e", u, v, w] => Ok(UpdateEvent::InsertEdge {
            u: num(line, u, "vertex")?,
            v: num(line, v, "vertex")?,
            w: num(line, w, "weight")?,
        }),
        ["+e", u, v] => Ok(UpdateEvent::InsertEdge { u: num(line, u, "vertex")?, v: num(line, v, "vertex")?, w: 1.0 }),
        ["-e", u, v] => Ok(UpdateEvent::DeleteEdge { u: num(line, u, "vertex")?, v: num(line, v, "vertex")? }),
        ["+v", id, rest @ ..] if rest.len() % 2 == 0 => {
            let edges = rest
                .chunks(2)
                .map(|c| Ok((num(line, c[0], "vertex")?, num(line, c[1], "weight")?)))
                .collect::<Result<_, ParseError>>()?;
            Ok(UpdateEvent::InsertVertex { id: num(line, id, "vertex")?, edges })
        }
        ["-v", id] => Ok(UpdateEvent::DeleteVertex { id: num(line, id, "vertex")? }),
        _ => Err(syntax(line, format!("unrecognized update {:?}", toks.join(" ")))),
    }
}

pub fn parse_updates(text: &str) -> Result<Vec<UpdateEvent>, ParseError> {
    data_lines(text).map(|(line, toks)| parse_update(line, &toks)).collect()
}

pub fn emit_updates(updates: &[UpdateEvent]) -> String {
    let mut out = String::new();
    for u in updates {
        writeln!(out, "{u}").unwrap();
    }
    out
}

/// Checks a stream against a starting graph, naming the first bad line.
pub fn audit_updates(start: &Graph, updates: &[UpdateEvent]) -> Result<(), ParseError> {
    let mut g = start.clone();
    for (i, ev) in updates.iter().enumerate() {
        g.apply_update(ev).map_err(|source| ParseError::Graph { line: i + 1, source })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph_with_comments_and_isolated_vertex() {
        let g = parse_graph("# demo\n0 1 2.5\n1 2   # default weight\n\n7\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_vertex(7));
        assert_eq!(g.edge_between(1, 2).unwrap().w, 1.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse_graph("0 1\n0 x\n").unwrap_err(), syntax(2, "bad vertex \"x\""));
        assert!(matches!(parse_graph("0 1\n\n1 0\n"), Err(ParseError::Graph { line: 3, .. })));
        assert!(matches!(parse_graph("0 1 -2\n"), Err(ParseError::Graph { line: 1, .. })));
        assert!(matches!(parse_updates("+e 0 1 1\n*e 0 1\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(parse_pairs("0 1 2\n"), Err(ParseError::Syntax { line: 1, .. })));
    }

    #[test]
    fn audit_names_phantom_delete() {
        let ups = parse_updates("+e 0 1 1\n-e 0 1\n-e 0 1\n").unwrap();
        assert!(matches!(audit_updates(&Graph::new(), &ups), Err(ParseError::Graph { line: 3, .. })));
    }

    fn weight() -> impl Strategy<Value = f64> {
        prop_oneof![(1u32..1000).prop_map(f64::from), 1e-3f64..1e6]
    }

    fn event() -> impl Strategy<Value = UpdateEvent> {
        prop_oneof![
            (0u32..50, 0u32..50, weight()).prop_map(|(u, v, w)| UpdateEvent::InsertEdge { u, v, w }),
            (0u32..50, 0u32..50).prop_map(|(u, v)| UpdateEvent::DeleteEdge { u, v }),
            (0u32..50, prop::collection::vec((0u32..50, weight()), 0..4))
                .prop_map(|(id, edges)| UpdateEvent::InsertVertex { id, edges }),
            (0u32..50).prop_map(|id| UpdateEvent::DeleteVertex { id }),
        ]
    }

    proptest! {
        #[test]
        fn graph_round_trip(edges in prop::collection::vec((0u32..30, 0u32..30, weight()), 0..60), iso in 30u32..40) {
            let mut g = Graph::new();
            for (u, v, w) in edges {
                let _ = g.insert_edge(u, v, w);
            }
            g.ensure_vertex(iso);
            let back = parse_graph(&emit_graph(&g)).unwrap();
            let a: Vec<_> = g.edges().map(|e| (e.u, e.v, e.w)).collect();
            let b: Vec<_> = back.edges().map(|e| (e.u, e.v, e.w)).collect();
            prop_assert_eq!(a, b);
            prop_assert_eq!(g.vertices().collect::<Vec<_>>(), back.vertices().collect::<Vec<_>>());
        }

        #[test]
        fn pairs_round_trip(pairs in prop::collection::vec((0u32..1000, 0u32..1000), 0..40)) {
            prop_assert_eq!(parse_pairs(&emit_pairs(&pairs)).unwrap(), pairs);
        }

        #[test]
        fn updates_round_trip(evs in prop::collection::vec(event(), 0..40)) {
            prop_assert_eq!(parse_updates(&emit_updates(&evs)).unwrap(), evs);
        }
    }
}
