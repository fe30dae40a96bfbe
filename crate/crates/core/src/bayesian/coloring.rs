use std::collections::BTreeMap;

use crate::graph::PlantedGraph;

/// Proper edge colouring with at most `Δ + 1` colours (Misra–Gries).
/// Keys are edges `(u, v)` with `u < v`; colours start at 0.
pub fn edge_coloring(graph: &PlantedGraph) -> BTreeMap<(usize, usize), usize> {
    let n = graph.n();
    let delta = (0..n).map(|v| graph.degree(v)).max().unwrap_or(0);
    let mut col = MisraGries {
        n,
        palette: delta + 1,
        color: vec![None; n * n],
    };
    for (u, v) in graph.edges() {
        col.color_edge(graph, u, v);
    }
    graph
        .edges()
        .into_iter()
        .map(|(u, v)| ((u, v), col.get(u, v).expect("every edge is coloured")))
        .collect()
}

/// Adjacent edges differ and every edge of the graph is coloured.
pub fn is_proper_edge_coloring(graph: &PlantedGraph, coloring: &BTreeMap<(usize, usize), usize>) -> bool {
    let edges = graph.edges();
    if edges.len() != coloring.len() || edges.iter().any(|e| !coloring.contains_key(e)) {
        return false;
    }
    (0..graph.n()).all(|v| {
        let mut seen: Vec<usize> = graph
            .neighbors(v)
            .map(|u| coloring[&(u.min(v), u.max(v))])
            .collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == total
    })
}

struct MisraGries {
    n: usize,
    palette: usize,
    color: Vec<Option<usize>>,
}

impl MisraGries {
    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.color[u * self.n + v]
    }

    fn set(&mut self, u: usize, v: usize, c: Option<usize>) {
        self.color[u * self.n + v] = c;
        self.color[v * self.n + u] = c;
    }

    fn is_free(&self, graph: &PlantedGraph, x: usize, c: usize) -> bool {
        graph.neighbors(x).all(|y| self.get(x, y) != Some(c))
    }

    fn free_color(&self, graph: &PlantedGraph, x: usize) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(graph, x, c))
            .expect("a vertex of degree at most Δ always has a free colour among Δ + 1")
    }

    /// Maximal fan of `u` starting at `v`.
    fn fan(&self, graph: &PlantedGraph, u: usize, v: usize) -> Vec<usize> {
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("non-empty");
            let next = graph.neighbors(u).find(|&z| {
                !fan.contains(&z) && self.get(u, z).is_some_and(|c| self.is_free(graph, last, c))
            });
            match next {
                Some(z) => fan.push(z),
                None => return fan,
            }
        }
    }

    /// Swaps `c` and `d` along the maximal path from `u` alternating `d`, `c`, ….
    fn invert_path(&mut self, graph: &PlantedGraph, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let (mut cur, mut prev, mut want) = (u, usize::MAX, d);
        while let Some(next) = graph
            .neighbors(cur)
            .find(|&y| y != prev && self.get(cur, y) == Some(want))
        {
            path.push((cur, next));
            prev = cur;
            cur = next;
            want = if want == d { c } else { d };
        }
        for (a, b) in path {
            let swapped = if self.get(a, b) == Some(c) { d } else { c };
            self.set(a, b, Some(swapped));
        }
    }

    fn is_fan_prefix(&self, graph: &PlantedGraph, u: usize, fan: &[usize]) -> bool {
        fan.windows(2).all(|w| {
            self.get(u, w[1])
                .is_some_and(|c| self.is_free(graph, w[0], c))
        })
    }

    fn color_edge(&mut self, graph: &PlantedGraph, u: usize, v: usize) {
        let fan = self.fan(graph, u, v);
        let c = self.free_color(graph, u);
        let d = self.free_color(graph, *fan.last().expect("non-empty"));
        self.invert_path(graph, u, c, d);
        let w = (0..fan.len())
            .find(|&i| self.is_free(graph, fan[i], d) && self.is_fan_prefix(graph, u, &fan[..=i]))
            .expect("Misra-Gries guarantees a rotatable fan prefix");
        for i in 0..w {
            let next = self.get(u, fan[i + 1]);
            self.set(u, fan[i], next);
        }
        self.set(u, fan[w], Some(d));
    }
}
