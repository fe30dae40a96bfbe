//! From an approximate equilibrium of a reduction game back to the planted clique.
//!
//! Extraction finds two vertex sets of size `target_size` with bipartite density
//! at least `density_threshold`. Reconstruction turns such a pair into a clique
//! by a score-and-grow heuristic whose output is always verified.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{mass, restrict_normalize, MixedProfile};
use crate::graph::PlantedGraph;
use crate::reductions::ReductionArtifact;

pub const DEFAULT_DENSITY_THRESHOLD: f64 = 5.0 / 9.0;
/// Minimum score `|N[v] ∩ T| / |T|` for a vertex to enter the greedy clique.
pub const CANDIDATE_SCORE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionParams {
    /// Conditional-value slack: the conditional value must be at least `(1 − s)α`.
    pub s: f64,
    /// Mass slack: each player puts at least `1 − t` on the vertex block.
    pub t: f64,
    pub target_size: usize,
    pub density_threshold: f64,
}

impl ExtractionParams {
    pub fn new(s: f64, t: f64, target_size: usize) -> Result<Self> {
        for (name, v) in [("s", s), ("t", t)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        if target_size == 0 {
            return Err(Error::InvalidParameter("target_size must be positive".into()));
        }
        Ok(Self {
            s,
            t,
            target_size,
            density_threshold: DEFAULT_DENSITY_THRESHOLD,
        })
    }

    /// `target_size = ⌊c₂ log₂ n⌋`, at least 1.
    pub fn with_c2(s: f64, t: f64, c2: f64, n: usize) -> Result<Self> {
        Self::new(s, t, target_size(c2, n))
    }

    /// Whether `1 − t − 3√s/2 ≥ α + ε`, the condition under which extraction
    /// is guaranteed to succeed on a random instance.
    pub fn condition_holds(&self, alpha: f64, eps: f64) -> bool {
        1.0 - self.t - 1.5 * self.s.sqrt() >= alpha + eps - 1e-12
    }
}

pub fn target_size(c2: f64, n: usize) -> usize {
    ((c2 * (n.max(2) as f64).log2()).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub achieved_density: f64,
    /// `‖x_[n]‖`.
    pub mass_row: f64,
    /// `‖y_[n]‖`.
    pub mass_col: f64,
    pub conditional_value: f64,
    /// Sizes of the threshold sets before truncation.
    pub candidates_row: usize,
    pub candidates_col: usize,
    /// `‖x̃_{[n]∖S′₁}‖`, bounded by `3√s/2` whenever the preconditions hold.
    pub outside_mass_row: f64,
    /// `‖ỹ_{[n]∖S′₂}‖`, bounded by `3√s/2` whenever the preconditions hold.
    pub outside_mass_col: f64,
}

/// Extracts a dense bipartite pair from a profile of the reduction game.
///
/// Preconditions (checked): `‖x_[n]‖, ‖y_[n]‖ ≥ 1 − t` and conditional value on
/// the vertex block `≥ (1 − s)α`. Truncation keeps the lowest indices.
pub fn extract_dense_subgraph(
    graph: &PlantedGraph,
    artifact: &ReductionArtifact,
    profile: &MixedProfile,
    params: &ExtractionParams,
) -> Result<ExtractionReport> {
    let n = graph.n();
    if artifact.layout.vertex_block != (0..n) {
        return Err(Error::DimensionMismatch(format!(
            "artifact vertex block {:?} does not match a graph on {n} vertices",
            artifact.layout.vertex_block
        )));
    }
    let game = &artifact.game;
    if profile.x.len() != game.rows() || profile.y.len() != game.cols() {
        return Err(Error::DimensionMismatch("profile does not fit the artifact game".into()));
    }
    let vertices: Vec<usize> = (0..n).collect();
    let mass_row = mass(&profile.x, vertices.iter().copied());
    let mass_col = mass(&profile.y, vertices.iter().copied());
    let required_mass = 1.0 - params.t;
    if mass_row < required_mass {
        return Err(Error::PreconditionViolated {
            bound: "row mass on vertex block",
            measured: mass_row,
            required: required_mass,
        });
    }
    if mass_col < required_mass {
        return Err(Error::PreconditionViolated {
            bound: "column mass on vertex block",
            measured: mass_col,
            required: required_mass,
        });
    }
    let conditional_value = game.conditional_value(profile, &vertices)?;
    let required_value = (1.0 - params.s) * artifact.params.alpha;
    if conditional_value < required_value - 1e-12 {
        return Err(Error::PreconditionViolated {
            bound: "conditional value on vertex block",
            measured: conditional_value,
            required: required_value,
        });
    }

    let x_tilde = restrict_normalize(&profile.x[..n], &vertices)?;
    let y_tilde = restrict_normalize(&profile.y[..n], &vertices)?;
    let a = graph.adjacency_matrix();

    let ay = a.dot(&ndarray::ArrayView1::from(&y_tilde));
    let row_threshold = 1.0 - 2.0 * params.s.sqrt() / 3.0;
    let s1_full: Vec<usize> = (0..n).filter(|&i| ay[i] >= row_threshold - 1e-12).collect();
    let outside_mass_row = 1.0 - mass(&x_tilde, s1_full.iter().copied());
    if s1_full.len() < params.target_size {
        return Err(Error::ExtractionFailed(format!(
            "only {} rows reach the threshold {row_threshold:.6}, need {}",
            s1_full.len(),
            params.target_size
        )));
    }
    let s1 = s1_full[..params.target_size].to_vec();

    let x_bar_a: Vec<f64> = (0..n)
        .map(|j| s1.iter().filter(|&&i| graph.adjacent(i, j)).count() as f64 / s1.len() as f64)
        .collect();
    let s2_full: Vec<usize> = (0..n)
        .filter(|&j| x_bar_a[j] >= params.density_threshold - 1e-12)
        .collect();
    let outside_mass_col = 1.0 - mass(&y_tilde, s2_full.iter().copied());
    if s2_full.len() < params.target_size {
        return Err(Error::ExtractionFailed(format!(
            "only {} columns reach density {:.6} against S1, need {}",
            s2_full.len(),
            params.density_threshold,
            params.target_size
        )));
    }
    let s2 = s2_full[..params.target_size].to_vec();
    let achieved_density = graph.density(&s1, &s2)?;
    if achieved_density < params.density_threshold - 1e-12 {
        return Err(Error::ExtractionFailed(format!(
            "density {achieved_density:.6} below {:.6}",
            params.density_threshold
        )));
    }
    Ok(ExtractionReport {
        candidates_row: s1_full.len(),
        candidates_col: s2_full.len(),
        s1,
        s2,
        achieved_density,
        mass_row,
        mass_col,
        conditional_value,
        outside_mass_row: outside_mass_row.max(0.0),
        outside_mass_col: outside_mass_col.max(0.0),
    })
}

/// Grows a clique of size at least `k` from a dense pair `(s1, s2)`.
///
/// Scores every vertex by `|N[v] ∩ T| / |T|` for `T = s1 ∪ s2`, greedily builds a
/// clique from vertices scoring at least ¾ in descending score order (ties by
/// index), extends it maximally by index order, and verifies the result.
pub fn reconstruct_clique(
    graph: &PlantedGraph,
    s1: &[usize],
    s2: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    let n = graph.n();
    let mut t: Vec<usize> = s1.iter().chain(s2).copied().collect();
    t.sort_unstable();
    t.dedup();
    if t.is_empty() {
        return Err(Error::ReconstructionFailed("empty seed sets".into()));
    }
    if t.iter().any(|&v| v >= n) {
        return Err(Error::InvalidParameter("seed vertex out of range".into()));
    }
    let score: Vec<f64> = (0..n)
        .map(|v| t.iter().filter(|&&u| graph.adjacent(v, u)).count() as f64 / t.len() as f64)
        .collect();
    let mut order: Vec<usize> = (0..n).filter(|&v| score[v] >= CANDIDATE_SCORE).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));

    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&u| graph.adjacent(u, v)) {
            clique.push(v);
        }
    }
    for v in 0..n {
        if !clique.contains(&v) && clique.iter().all(|&u| graph.adjacent(u, v)) {
            clique.push(v);
        }
    }
    clique.sort_unstable();
    if !verify_clique(graph, &clique) {
        return Err(Error::Internal("greedy clique failed verification".into()));
    }
    if clique.len() < k {
        return Err(Error::ReconstructionFailed(format!(
            "largest clique found has {} vertices, need {k}",
            clique.len()
        )));
    }
    Ok(clique)
}

pub fn verify_clique(graph: &PlantedGraph, set: &[usize]) -> bool {
    set.iter().all(|&v| v < graph.n()) && graph.is_clique(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub report: ExtractionReport,
    pub clique: Vec<usize>,
}

/// Extraction followed by reconstruction of a clique of size at least `k`.
pub fn soundness_pipeline(
    graph: &PlantedGraph,
    artifact: &ReductionArtifact,
    profile: &MixedProfile,
    params: &ExtractionParams,
    k: usize,
) -> Result<Recovery> {
    let report = extract_dense_subgraph(graph, artifact, profile, params)?;
    let clique = reconstruct_clique(graph, &report.s1, &report.s2, k)?;
    Ok(Recovery { report, clique })
}
