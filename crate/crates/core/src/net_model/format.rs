//! Line-oriented text format for networks.
//!
//! ```text
//! # comment
//! endpoints A B
//! node g1_1 0.01
//! edge A g1_1
//! ```
//!
//! Exactly one `endpoints` line is required and endpoints never appear in
//! `node` lines. Edges may only reference declared nodes or endpoints.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::network::{Network, NetworkBuilder, NodeId};

pub fn parse_network(text: &str) -> Result<Network> {
    let mut endpoints: Option<(usize, NodeId, NodeId)> = None;
    let mut nodes: Vec<(usize, NodeId, f64)> = Vec::new();
    let mut edges: Vec<(usize, NodeId, NodeId)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "endpoints" => {
                let [_, a, b] = fields[..] else {
                    return Err(err("expected `endpoints <idA> <idB>`".into()));
                };
                if let Some((first, ..)) = endpoints {
                    return Err(err(format!(
                        "duplicate endpoints line (first on line {first})"
                    )));
                }
                if a == b {
                    return Err(err("endpoints must be distinct".into()));
                }
                endpoints = Some((line_no, a.into(), b.into()));
            }
            "node" => {
                let [_, id, trust] = fields[..] else {
                    return Err(err("expected `node <id> <trust>`".into()));
                };
                let trust: f64 = trust
                    .parse()
                    .map_err(|_| err(format!("trust `{trust}` is not a number")))?;
                if !(0.0..=1.0).contains(&trust) {
                    return Err(err(format!("trust {trust} of `{id}` is outside [0, 1]")));
                }
                nodes.push((line_no, id.into(), trust));
            }
            "edge" => {
                let [_, u, v] = fields[..] else {
                    return Err(err("expected `edge <id1> <id2>`".into()));
                };
                edges.push((line_no, u.into(), v.into()));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let Some((_, a, b)) = endpoints else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `endpoints` line".into(),
        });
    };
    let mut builder: NetworkBuilder = Network::builder(a, b);
    for (line, id, trust) in nodes {
        builder.node(id, trust).map_err(|e| at_line(line, e))?;
    }
    for (line, u, v) in edges {
        builder.edge(u, v).map_err(|e| at_line(line, e))?;
    }
    builder.build()
}

fn at_line(line: usize, e: Error) -> Error {
    let message = match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    };
    Error::Parse { line, message }
}

/// Deterministic serialization: nodes and edges in sorted order.
pub fn serialize_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "endpoints {} {}", net.endpoint_a(), net.endpoint_b());
    for (id, p) in net.trust_map() {
        let _ = writeln!(out, "node {id} {p}");
    }
    for (u, v) in net.edges() {
        let _ = writeln!(out, "edge {u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net_model::{build_lscheme, build_mnop, LSchemeParams};

    #[test]
    fn round_trip_small() {
        let net = build_mnop(&[1], 0.0).unwrap();
        let text = serialize_network(&net);
        assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn lscheme_edge_lines() {
        let net = build_lscheme(&LSchemeParams::new(4, 2, 0.1).unwrap()).unwrap();
        let text = serialize_network(&net);
        assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 14);
        assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn undeclared_node_is_named() {
        let text = "endpoints A B\nnode x 0.1\nedge A x\nedge x ghost\n";
        let err = parse_network(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("endpoints A B\nvertex x\n", 2),
            ("node x 0.1\n", 1),
            ("endpoints A B\nnode x 1.5\n", 2),
            ("endpoints A B\nnode x 0.1\nnode x 0.2\n", 3),
            ("endpoints A B\nnode A 0.1\n", 2),
            ("endpoints A B\nendpoints C D\n", 2),
            ("# only a comment\n\nnode x 0.5\n", 3),
        ];
        for (text, line) in cases {
            match parse_network(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# demo\nendpoints A B   # the pair\n\nnode m 0.25\nedge A m\nedge m B\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.intermediate_count(), 1);
        assert_eq!(net.trust(&"m".into()), Some(0.25));
    }
}
