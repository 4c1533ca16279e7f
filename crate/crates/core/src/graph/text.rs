//! Line-oriented text format for graphs and windows.
//!
//! ```text
//! graph <recipe>
//! vertices <n> edges <m>
//! label <v> lattice <x> <y> | tree <depth> leaf|inner | cylinder <level> <slice>
//! mark <v>
//! <u> <v>                       one line per edge, in edge-id order
//! ```
//!
//! Windows are rebuilt from their header, so the edge lines are checked
//! rather than trusted:
//!
//! ```text
//! window width=<w> height=<h> boundary=free|fixed+|fixed-|periodic
//! <u> <v>
//! loop <f0> <f1> ...            optional dual loops as face sequences
//! ```

use std::fmt::Write;

use super::{Boundary, DualLoop, Graph, Label, PlanarWindow};
use crate::error::{parse_err, Result};

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "graph {}", g.recipe()).unwrap();
    writeln!(out, "vertices {} edges {}", g.n(), g.m()).unwrap();
    for (v, l) in g.labels().iter().enumerate() {
        match l {
            Label::Plain => {}
            Label::Lattice { x, y } => writeln!(out, "label {v} lattice {x} {y}").unwrap(),
            Label::Tree { depth, leaf } => {
                writeln!(out, "label {v} tree {depth} {}", if *leaf { "leaf" } else { "inner" }).unwrap()
            }
            Label::Cylinder { level, slice } => writeln!(out, "label {v} cylinder {level} {slice}").unwrap(),
        }
    }
    for v in g.marked() {
        writeln!(out, "mark {v}").unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing field"))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let recipe = head.strip_prefix("graph ").ok_or_else(|| parse_err(ln, "expected `graph` header"))?;
    let (ln, sizes) = lines.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let t: Vec<&str> = sizes.split_whitespace().collect();
    if t.len() != 4 || t[0] != "vertices" || t[2] != "edges" {
        return Err(parse_err(ln, "expected `vertices <n> edges <m>`"));
    }
    let n: usize = num(Some(t[1]), ln)?;
    let m: usize = num(Some(t[3]), ln)?;
    let mut labels = vec![Label::Plain; n];
    let mut marked = Vec::new();
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            None => continue,
            Some("label") => {
                let v: usize = num(tok.next(), ln)?;
                if v >= n {
                    return Err(parse_err(ln, "label vertex out of range"));
                }
                labels[v] = match tok.next() {
                    Some("lattice") => Label::Lattice { x: num(tok.next(), ln)?, y: num(tok.next(), ln)? },
                    Some("tree") => {
                        let depth = num(tok.next(), ln)?;
                        let leaf = match tok.next() {
                            Some("leaf") => true,
                            Some("inner") => false,
                            _ => return Err(parse_err(ln, "expected leaf|inner")),
                        };
                        Label::Tree { depth, leaf }
                    }
                    Some("cylinder") => Label::Cylinder { level: num(tok.next(), ln)?, slice: num(tok.next(), ln)? },
                    _ => return Err(parse_err(ln, "unknown label kind")),
                };
            }
            Some("mark") => marked.push(num(tok.next(), ln)?),
            Some(first) => {
                let u: usize = num(Some(first), ln)?;
                let v: usize = num(tok.next(), ln)?;
                edges.push((u, v));
            }
        }
    }
    if edges.len() != m {
        return Err(parse_err(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok(Graph::from_edges(n, &edges, recipe)?.with_labels(labels).with_marked(marked))
}

fn mode_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Free => "free",
        Boundary::Fixed(s) if s > 0 => "fixed+",
        Boundary::Fixed(_) => "fixed-",
        Boundary::Periodic => "periodic",
    }
}

pub fn write_window(w: &PlanarWindow, loops: &[DualLoop]) -> String {
    let mut out = String::new();
    writeln!(out, "window width={} height={} boundary={}", w.width(), w.height(), mode_name(w.boundary())).unwrap();
    for (u, v) in w.graph().edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    for l in loops {
        let faces: Vec<String> = l.faces().iter().map(|f| f.to_string()).collect();
        writeln!(out, "loop {}", faces.join(" ")).unwrap();
    }
    out
}

pub fn read_window(text: &str) -> Result<(PlanarWindow, Vec<DualLoop>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut tok = head.split_whitespace();
    if tok.next() != Some("window") {
        return Err(parse_err(ln, "expected `window` header"));
    }
    let (mut width, mut height, mut mode) = (None, None, None);
    for kv in tok {
        let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(ln, format!("bad header field {kv:?}")))?;
        match k {
            "width" => width = Some(num::<usize>(Some(v), ln)?),
            "height" => height = Some(num::<usize>(Some(v), ln)?),
            "boundary" => {
                mode = Some(match v {
                    "free" => Boundary::Free,
                    "fixed+" => Boundary::Fixed(1),
                    "fixed-" => Boundary::Fixed(-1),
                    "periodic" => Boundary::Periodic,
                    _ => return Err(parse_err(ln, format!("unknown boundary {v:?}"))),
                })
            }
            _ => return Err(parse_err(ln, format!("unknown header key {k:?}"))),
        }
    }
    let (Some(width), Some(height), Some(mode)) = (width, height, mode) else {
        return Err(parse_err(ln, "header needs width, height and boundary"));
    };
    let w = PlanarWindow::new(width, height, mode)?;
    let mut edge_idx = 0;
    let mut loops = Vec::new();
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            None => continue,
            Some("loop") => {
                let faces = tok.map(|t| num::<usize>(Some(t), ln)).collect::<Result<Vec<_>>>()?;
                let lp = DualLoop::from_faces(&w, &faces).map_err(|e| parse_err(ln, e))?;
                if lp.faces() != faces.as_slice() {
                    return Err(parse_err(ln, "loop faces not in canonical order"));
                }
                loops.push(lp);
            }
            Some(first) => {
                let pair = (num::<usize>(Some(first), ln)?, num::<usize>(tok.next(), ln)?);
                if edge_idx >= w.graph().m() || w.graph().edge(edge_idx) != pair {
                    return Err(parse_err(ln, "edge does not match the window"));
                }
                edge_idx += 1;
            }
        }
    }
    if edge_idx != w.graph().m() {
        return Err(parse_err(0, "window edge list is incomplete"));
    }
    Ok((w, loops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_dual_loops;

    #[test]
    fn graph_round_trips() {
        let graphs = [
            Graph::regular_tree(3, 3).unwrap(),
            Graph::cylinder(&Graph::shared_clique_pair(4).unwrap(), -2, 2).unwrap(),
            Graph::complete(5),
            PlanarWindow::new(4, 3, Boundary::Periodic).unwrap().graph().clone(),
        ];
        for g in graphs {
            let text = write_graph(&g);
            let back = read_graph(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(write_graph(&back), text);
        }
    }

    #[test]
    fn window_round_trips_with_loops() {
        for mode in [Boundary::Free, Boundary::Fixed(-1)] {
            let w = PlanarWindow::new(6, 5, mode).unwrap();
            let loops = enumerate_dual_loops(&w, 8).unwrap();
            let text = write_window(&w, &loops);
            let (w2, loops2) = read_window(&text).unwrap();
            assert_eq!(loops2, loops);
            assert_eq!(write_window(&w2, &loops2), text);
        }
    }

    #[test]
    fn tampered_edges_are_rejected() {
        let w = PlanarWindow::new(3, 3, Boundary::Free).unwrap();
        let text = write_window(&w, &[]).replacen("0 1", "0 2", 1);
        assert!(read_window(&text).is_err());
    }
}
