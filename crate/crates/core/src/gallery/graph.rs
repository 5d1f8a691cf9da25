use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{params_of, require, GalleryOperator, GridKind, GridMeta, OperatorSpec, PredictedVerdicts, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{DenseMatrix, OrderedVector, RankOneFrame};

/// Edge `a-b` of the given length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Star with three edges of lengths 1, 1.5 and 2.
pub fn three_star() -> Vec<Edge> {
    vec![
        Edge { a: 0, b: 1, length: 1.0 },
        Edge { a: 0, b: 2, length: 1.5 },
        Edge { a: 0, b: 3, length: 2.0 },
    ]
}

/// Parses comma-separated `a-b:length` tokens.
pub fn parse_edge_list(s: &str) -> Result<Vec<Edge>> {
    let bad = |tok: &str| Error::InvalidParameter {
        name: "edges",
        reason: alloc::format!("expected a-b:length, found {tok:?}"),
    };
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (ends, len) = tok.split_once(':').ok_or_else(|| bad(tok))?;
        let (a, b) = ends.split_once('-').ok_or_else(|| bad(tok))?;
        let a = a.trim().parse::<usize>().map_err(|_| bad(tok))?;
        let b = b.trim().parse::<usize>().map_err(|_| bad(tok))?;
        let length = len.trim().parse::<f64>().map_err(|_| bad(tok))?;
        out.push(Edge { a, b, length });
    }
    if out.is_empty() {
        return Err(bad(s));
    }
    Ok(out)
}

fn connected(vertices: usize, edges: &[Edge]) -> bool {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (0..vertices).all(|v| find(&mut parent, v) == root)
}

/// Kirchhoff Laplacian on a metric graph. Vertex unknowns come first, then
/// the interior nodes of each edge ordered from `a` to `b`.
pub fn build_graph_laplacian(edges: &[Edge], n_per_unit: usize) -> Result<GalleryOperator> {
    require(!edges.is_empty(), "edges", "graph has no edges")?;
    require(n_per_unit >= 2, "n", "need at least 2 points per unit length")?;
    for (i, e) in edges.iter().enumerate() {
        if !(e.length > 0.0) || !e.length.is_finite() {
            return Err(Error::NonPositiveLength { edge: i, length: e.length });
        }
        require(e.a != e.b, "edges", "loops are not supported")?;
    }
    let vertices = edges.iter().map(|e| e.a.max(e.b)).max().unwrap_or(0) + 1;
    if !connected(vertices, edges) {
        return Err(Error::DisconnectedGraph);
    }
    let intervals: Vec<usize> = edges
        .iter()
        .map(|e| (libm::round(e.length * n_per_unit as f64) as usize).max(2))
        .collect();
    let spacing: Vec<f64> = edges.iter().zip(&intervals).map(|(e, &m)| e.length / m as f64).collect();
    let n = vertices + intervals.iter().map(|m| m - 1).sum::<usize>();

    let mut a = DenseMatrix::zeros(n);
    let mut weights = vec![0.0; n];
    let mut nodes = vec![0.0; n];
    let mut next = vertices;
    for ((e, &m), &h) in edges.iter().zip(&intervals).zip(&spacing) {
        let s = 1.0 / (h * h);
        let first = next;
        let last = next + m - 2;
        for k in 0..m - 1 {
            let i = first + k;
            weights[i] = h;
            nodes[i] = (k + 1) as f64 * h;
            let left = if k == 0 { e.a } else { i - 1 };
            let right = if k == m - 2 { e.b } else { i + 1 };
            a[(i, left)] += s;
            a[(i, i)] -= 2.0 * s;
            a[(i, right)] += s;
        }
        weights[e.a] += h / 2.0;
        weights[e.b] += h / 2.0;
        a[(e.a, first)] += 1.0 / h;
        a[(e.a, e.a)] -= 1.0 / h;
        a[(e.b, last)] += 1.0 / h;
        a[(e.b, e.b)] -= 1.0 / h;
        next += m - 1;
    }
    for v in 0..vertices {
        let w = weights[v];
        for x in a.row_mut(v) {
            *x /= w;
        }
    }
    let description: String = edges
        .iter()
        .map(|e| alloc::format!("{}-{}:{}", e.a, e.b, e.length))
        .collect::<Vec<_>>()
        .join(",");
    let mut params = params_of(&[("n_per_unit", n_per_unit as f64), ("vertices", vertices as f64)]);
    params.insert("total_length".to_string(), edges.iter().map(|e| e.length).sum());
    Ok(GalleryOperator {
        name: "graph".to_string(),
        spec: OperatorSpec::Graph { edges: edges.to_vec() },
        frame: RankOneFrame::unit(weights)?,
        matrix: a,
        lambda0: 0.0,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta { kind: GridKind::Graph, n, spacing, nodes },
        predicted: PredictedVerdicts::new(
            Verdict::Untested,
            Verdict::Holds,
            &alloc::format!("uniform anti-maximum principle Res(mu) <= -1(x)1 left of 0 on the graph {description}"),
            &["Kirchhoff Laplacian on a compact metric graph"],
        ),
        params,
        declared_eigenvector: Some(OrderedVector::new(vec![1.0; n])?),
        consistency_order: None,
        symmetric: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_edges() {
        let e = parse_edge_list("0-1:1, 0-2:1.5,0-3:2").unwrap();
        assert_eq!(e, three_star());
        assert!(parse_edge_list("0-1").is_err());
        assert!(parse_edge_list("a-1:2").is_err());
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn rejects_bad_graphs() {
        let e = [Edge { a: 0, b: 1, length: 1.0 }, Edge { a: 2, b: 3, length: 1.0 }];
        assert_eq!(build_graph_laplacian(&e, 10), Err(Error::DisconnectedGraph));
        let e = [Edge { a: 0, b: 1, length: -1.0 }];
        assert!(matches!(build_graph_laplacian(&e, 10), Err(Error::NonPositiveLength { edge: 0, .. })));
    }
}
