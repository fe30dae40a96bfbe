//! Undirected graphs with self-loop-inclusive adjacency and an optional planted clique.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{seeded, Stream};

/// Graph on `n` vertices. `adjacent(v, v)` is always true, matching the
/// "adjacency matrix with 1s on the diagonal" convention of the reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedGraph {
    n: usize,
    adj: Vec<bool>,
    planted: Option<Vec<usize>>,
}

impl PlantedGraph {
    pub fn empty(n: usize) -> Self {
        let mut adj = vec![false; n * n];
        (0..n).for_each(|v| adj[v * n + v] = true);
        Self {
            n,
            adj,
            planted: None,
        }
    }

    pub fn complete(n: usize) -> Self {
        Self {
            n,
            adj: vec![true; n * n],
            planted: None,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Format(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            g.connect(u, v);
        }
        Ok(g)
    }

    /// Marks `set` as the planted clique after checking that it is one.
    pub fn with_planted(mut self, mut set: Vec<usize>) -> Result<Self> {
        set.sort_unstable();
        set.dedup();
        if set.iter().any(|&v| v >= self.n) {
            return Err(Error::Format("planted vertex out of range".into()));
        }
        if !self.is_clique(&set) {
            return Err(Error::Format("planted set is not a clique".into()));
        }
        self.planted = Some(set);
        Ok(self)
    }

    fn connect(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn planted(&self) -> Option<&[usize]> {
        self.planted.as_deref()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// Neighbours of `v`, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && self.adjacent(v, u))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.adjacent(u, v))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True iff every pair of vertices in `set` is adjacent.
    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &u)| set[a + 1..].iter().all(|&v| self.adjacent(u, v)))
    }

    /// `|E(S1, S2)| / (|S1||S2|)` where ordered pairs count when adjacent or equal.
    pub fn density(&self, s1: &[usize], s2: &[usize]) -> Result<f64> {
        if s1.is_empty() || s2.is_empty() {
            return Err(Error::InvalidParameter("density of an empty vertex set".into()));
        }
        if s1.iter().chain(s2).any(|&v| v >= self.n) {
            return Err(Error::InvalidParameter("vertex out of range".into()));
        }
        let hits = s1
            .iter()
            .map(|&u| s2.iter().filter(|&&v| self.adjacent(u, v)).count())
            .sum::<usize>();
        Ok(hits as f64 / (s1.len() * s2.len()) as f64)
    }

    /// Adjacency matrix with ones on the diagonal, as 0/1 reals.
    pub fn adjacency_matrix(&self) -> ndarray::Array2<f64> {
        ndarray::Array2::from_shape_fn((self.n, self.n), |(u, v)| {
            if self.adjacent(u, v) {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// `G(n, ½)` with a uniformly random `k`-subset turned into a clique.
pub fn sample_planted_clique(n: usize, k: usize, seed: u64) -> Result<PlantedGraph> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "clique size {k} exceeds vertex count {n}"
        )));
    }
    let mut rng = seeded(seed, Stream::Graph);
    let mut g = PlantedGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                g.connect(u, v);
            }
        }
    }
    let mut clique = index::sample(&mut rng, n, k).into_vec();
    clique.sort_unstable();
    for (a, &u) in clique.iter().enumerate() {
        for &v in &clique[a + 1..] {
            g.connect(u, v);
        }
    }
    g.planted = Some(clique);
    Ok(g)
}

/// Circulant graph `C_n(1, 2)`: 4-regular and connected for `n ≥ 5`, with
/// vertices relabelled by a seeded random permutation.
pub fn random_four_regular(n: usize, seed: u64) -> Result<PlantedGraph> {
    if n < 5 {
        return Err(Error::InvalidParameter("a 4-regular circulant needs n >= 5".into()));
    }
    let mut rng = seeded(seed, Stream::Graph);
    let perm = index::sample(&mut rng, n, n).into_vec();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| [(v, (v + 1) % n), (v, (v + 2) % n)])
        .map(|(u, v)| (perm[u], perm[v]))
        .collect();
    PlantedGraph::from_edges(n, &edges)
}

/// The octahedron `K_{2,2,2}`: 4-regular and 3-colourable (opposite vertices
/// `v` and `v + 3` share a colour).
pub fn octahedron() -> PlantedGraph {
    let edges: Vec<(usize, usize)> = (0..6)
        .flat_map(|u| (u + 1..6).map(move |v| (u, v)))
        .filter(|&(u, v)| v != u + 3)
        .collect();
    PlantedGraph::from_edges(6, &edges).expect("static edge list")
}

pub fn complete_graph(n: usize) -> PlantedGraph {
    PlantedGraph::complete(n)
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    planted: Vec<usize>,
}

impl Serialize for PlantedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            planted: self.planted.clone().unwrap_or_default(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlantedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = GraphFile::deserialize(d)?;
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = PlantedGraph::from_edges(file.n, &edges).map_err(D::Error::custom)?;
        if file.planted.is_empty() {
            Ok(g)
        } else {
            g.with_planted(file.planted).map_err(D::Error::custom)
        }
    }
}
