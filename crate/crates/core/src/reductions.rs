//! Graph-to-game constructions and their parameter maps.
//!
//! The hidden-clique game on an `n`-vertex graph with adjacency `A` (ones on the
//! diagonal) and an `N × n` Bernoulli(β) matrix `B` is
//!
//! ```text
//!          ⎛ αA   0  ⎞            ⎛ αA   Bᵀ ⎞
//! M_row =  ⎝ B    γJ ⎠    M_col = ⎝ 0    γJ ⎠
//! ```
//!
//! The small-support variant replaces the lower blocks by `N₂` stacked copies of
//! `B` and a uniformly random 0/1 matrix `R` (row player) against `J − R`
//! (column player). The second-equilibrium variant appends one strategy per
//! player that pays λ against the original game and 1 against itself.

use std::ops::Range;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::BimatrixGame;
use crate::graph::PlantedGraph;
use crate::rng::{seeded, Stream};

/// Default reconstruction constant `c₂`; the source construction leaves it unspecified.
pub const DEFAULT_C2: f64 = 6.0;
/// Default payoff of the appended strategy in the second-equilibrium game.
pub const DEFAULT_LAMBDA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: Option<f64>,
    pub c2: f64,
    /// Rows of `B` in the hidden-clique game.
    pub n_big: usize,
    /// Rows of `B` in the small-support game.
    pub n1: usize,
    /// Number of stacked copies of `B` in the small-support game.
    pub n2: usize,
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    /// Conditional-value slack handed to dense-subgraph extraction.
    pub s: Option<f64>,
    /// Mass slack handed to dense-subgraph extraction.
    pub t: Option<f64>,
    pub support_bound: Option<usize>,
    /// Free-form flags: violated side conditions, chosen defaults, log base.
    pub notes: Vec<String>,
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl ReductionParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        open_unit("alpha", alpha)?;
        open_unit("beta", beta)?;
        open_unit("gamma", gamma)?;
        Ok(Self {
            alpha,
            beta,
            gamma,
            lambda: None,
            c2: DEFAULT_C2,
            n_big: 1,
            n1: 1,
            n2: 1,
            eps: None,
            eta: None,
            delta: None,
            s: None,
            t: None,
            support_bound: None,
            notes: vec!["logarithms in clique and block sizing are base 2".into()],
        })
    }

    pub fn with_n_big(mut self, n_big: usize) -> Self {
        self.n_big = n_big;
        self
    }

    pub fn with_blocks(mut self, n1: usize, n2: usize) -> Self {
        self.n1 = n1;
        self.n2 = n2;
        self
    }

    pub fn with_c2(mut self, c2: f64) -> Self {
        self.c2 = c2;
        self
    }

    /// Exponent `c = (c₂ + 1)·log₂(1/β)` of the exact block size `N = n^c`.
    pub fn block_exponent(&self) -> f64 {
        (self.c2 + 1.0) * (1.0 / self.beta).log2()
    }

    /// Exact block size `n^c`, usually far beyond what fits in memory; the
    /// builders take `n_big` / `n1` explicitly instead.
    pub fn exact_block_size(&self, n: usize) -> f64 {
        (n as f64).powf(self.block_exponent())
    }

    /// Slack of `1 − t − 3√s/2 ≥ α + ε`; non-negative when dense-subgraph
    /// extraction is guaranteed to apply for an ε-equilibrium.
    pub fn extraction_margin(&self, eps: f64) -> Option<f64> {
        Some(1.0 - self.t? - 1.5 * self.s?.sqrt() - (self.alpha + eps))
    }
}

/// Parameters for hardness of (½ − η)-equilibria with value close to optimal:
/// `t = 4η/7`, `α = ½ + t`, `β = γ = ⅓`, `δ = t²`.
pub fn params_eps_hardness(eta: f64) -> Result<ReductionParams> {
    if !(0.0..0.875).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} must lie in [0, 7/8) so that alpha < 1"
        )));
    }
    let t = 4.0 * eta / 7.0;
    let mut p = ReductionParams::new(0.5 + t, 1.0 / 3.0, 1.0 / 3.0)?;
    p.eta = Some(eta);
    p.eps = Some(0.5 - eta);
    p.t = Some(t);
    p.delta = Some(t * t);
    p.s = Some(t * t);
    let margin = p.extraction_margin(0.5 - eta).expect("s and t set");
    if margin < 0.0 {
        p.notes.push(format!(
            "extraction condition 1 - t - 3 sqrt(s)/2 >= alpha + eps misses by {:.6}; it holds for t <= 2 eta / 7",
            -margin
        ));
    }
    Ok(p)
}

/// Parameters separating value ≥ η from value 1 − η:
/// `ε = (η/5)²`, `α = 1 − η`, `β = α − ε`, `γ = 4√ε`.
pub fn params_value_hardness(eta: f64) -> Result<ReductionParams> {
    open_unit("eta", eta)?;
    let eps = (eta / 5.0).powi(2);
    let alpha = 1.0 - eta;
    let mut p = ReductionParams::new(alpha, alpha - eps, 4.0 * eps.sqrt())?;
    p.eta = Some(eta);
    p.eps = Some(eps);
    p.t = Some(eps.sqrt());
    p.s = Some(3.0 * eps / alpha);
    if alpha <= 0.75 {
        p.notes
            .push(format!("alpha = {alpha} violates the side condition alpha > 3/4 (eta too large)"));
    }
    Ok(p)
}

/// Parameters of the small-support game for (½ − η)-equilibria:
/// `α = ½ + η/8`, `β = 1 − 7η/8 − η²/8`, `t = η/8`, `s = η²/4`.
pub fn params_small_support(eta: f64) -> Result<ReductionParams> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must lie in (0, 1/2)")));
    }
    let mut p = ReductionParams::new(0.5 + eta / 8.0, 1.0 - 7.0 * eta / 8.0 - eta * eta / 8.0, 0.5)?;
    p.eta = Some(eta);
    p.eps = Some(0.5 - eta);
    p.t = Some(eta / 8.0);
    p.s = Some(eta * eta / 4.0);
    p.notes
        .push("gamma is unused by the small-support game".into());
    Ok(p)
}

/// Knobs for the (¼ − η) small-support variant. Only the target approximation
/// changes; the defaults follow from rerunning the (½ − η) inequality chain with
/// `ε = ¼ − η`:
///
/// * `α = ½ + η/8` and `β = α + ε − η²/8`, so a deviation into `B` gains at most
///   `ε − η²/8` against the clique profile (completeness margin `η²/8`);
/// * mass bound `pq ≥ (½ − ε)/(½ − (β − α))`, giving `t = 1 − that bound`;
/// * conditional value `w ≥ α − η²/8`, giving `s = η²/(8α)`.
///
/// These are derived defaults, recorded in `notes`.
pub fn params_small_support_quarter(eta: f64) -> Result<ReductionParams> {
    if !(eta > 0.0 && eta < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} must lie in (0, 1/4); the construction degenerates as eta -> 0"
        )));
    }
    let target = 0.25 - eta;
    let alpha = 0.5 + eta / 8.0;
    let beta = alpha + target - eta * eta / 8.0;
    let mass = (0.5 - target) / (0.5 - (beta - alpha));
    let mut p = ReductionParams::new(alpha, beta, 0.5)?;
    p.eta = Some(eta);
    p.eps = Some(target);
    p.t = Some(1.0 - mass);
    p.s = Some(eta * eta / (8.0 * alpha));
    p.notes.extend([
        "derived defaults for the 1/4 - eta variant (not stated by the source construction)".into(),
        format!("completeness margin eta^2/8 = {}", eta * eta / 8.0),
        "support bound defaults to floor(log2(n) / 2) and is configurable".into(),
    ]);
    Ok(p)
}

/// Index ranges of the strategy space of a reduction game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub dim: usize,
    /// Strategies identified with graph vertices (the `αA` block).
    pub vertex_block: Range<usize>,
    /// Auxiliary strategies, one range per copy of `B` (the `B`/`J`/`R` blocks).
    pub copy_blocks: Vec<Range<usize>>,
    /// The appended strategy of the second-equilibrium game.
    pub extra_strategy: Option<usize>,
}

impl BlockLayout {
    /// True when the ranges tile `0..dim` in order without gaps or overlaps.
    pub fn is_partition(&self) -> bool {
        let mut next = 0;
        let ranges = std::iter::once(&self.vertex_block).chain(&self.copy_blocks);
        for r in ranges {
            if r.start != next || r.end < r.start {
                return false;
            }
            next = r.end;
        }
        if let Some(e) = self.extra_strategy {
            if e != next {
                return false;
            }
            next += 1;
        }
        next == self.dim
    }

    pub fn auxiliary(&self) -> Range<usize> {
        let start = self.vertex_block.end;
        let end = self.copy_blocks.last().map_or(start, |r| r.end);
        start..end
    }
}

/// How an artifact was built; enough to rebuild it from the source graph and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Recipe {
    HiddenClique,
    SmallSupport,
    SecondEquilibrium { base: Box<Recipe>, lambda: f64 },
}

/// A reduction game together with everything needed to audit or replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionArtifact {
    pub recipe: Recipe,
    pub game: BimatrixGame,
    pub layout: BlockLayout,
    pub params: ReductionParams,
    pub source: PlantedGraph,
    pub seed: u64,
}

/// Serialized form: the recipe, parameters, layout, seed and graph. The payoff
/// matrices are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    recipe: Recipe,
    params: ReductionParams,
    layout: BlockLayout,
    seed: u64,
    source: PlantedGraph,
}

impl Serialize for ReductionArtifact {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArtifactFile {
            recipe: self.recipe.clone(),
            params: self.params.clone(),
            layout: self.layout.clone(),
            seed: self.seed,
            source: self.source.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReductionArtifact {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = ArtifactFile::deserialize(d)?;
        let art = replay(&file.recipe, &file.source, &file.params, file.seed)
            .map_err(D::Error::custom)?;
        if art.layout != file.layout {
            return Err(D::Error::custom("replayed layout differs from the stored one"));
        }
        Ok(art)
    }
}

/// Rebuilds an artifact from its recipe.
pub fn replay(
    recipe: &Recipe,
    graph: &PlantedGraph,
    params: &ReductionParams,
    seed: u64,
) -> Result<ReductionArtifact> {
    match recipe {
        Recipe::HiddenClique => build_hk_game(graph, params, seed),
        Recipe::SmallSupport => build_small_support_game(graph, params, seed),
        Recipe::SecondEquilibrium { base, lambda } => {
            let base = replay(base, graph, params, seed)?;
            build_second_equilibrium_game(&base, *lambda)
        }
    }
}

/// `rows × cols` matrix of i.i.d. Bernoulli(`p`) entries drawn row-major from `stream`.
pub fn bernoulli_matrix(rows: usize, cols: usize, p: f64, seed: u64, stream: Stream) -> Array2<f64> {
    let mut rng = seeded(seed, stream);
    Array2::from_shape_simple_fn((rows, cols), || if rng.random_bool(p) { 1.0 } else { 0.0 })
}

pub fn build_hk_game(
    graph: &PlantedGraph,
    params: &ReductionParams,
    seed: u64,
) -> Result<ReductionArtifact> {
    open_unit("alpha", params.alpha)?;
    open_unit("beta", params.beta)?;
    open_unit("gamma", params.gamma)?;
    if params.n_big == 0 {
        return Err(Error::InvalidParameter("n_big must be at least 1".into()));
    }
    let n = graph.n();
    let big = params.n_big;
    let dim = n + big;
    let b = bernoulli_matrix(big, n, params.beta, seed, Stream::BMatrix);
    let a = graph.adjacency_matrix();

    let mut m_row = Array2::<f64>::zeros((dim, dim));
    let mut m_col = Array2::<f64>::zeros((dim, dim));
    let scaled = a.mapv(|v| params.alpha * v);
    m_row.slice_mut(ndarray::s![..n, ..n]).assign(&scaled);
    m_col.slice_mut(ndarray::s![..n, ..n]).assign(&scaled);
    m_row.slice_mut(ndarray::s![n.., ..n]).assign(&b);
    m_col.slice_mut(ndarray::s![..n, n..]).assign(&b.t());
    m_row.slice_mut(ndarray::s![n.., n..]).fill(params.gamma);
    m_col.slice_mut(ndarray::s![n.., n..]).fill(params.gamma);

    Ok(ReductionArtifact {
        recipe: Recipe::HiddenClique,
        game: BimatrixGame::new(m_row, m_col)?,
        layout: BlockLayout {
            dim,
            vertex_block: 0..n,
            copy_blocks: vec![n..dim],
            extra_strategy: None,
        },
        params: params.clone().with_n_big(big),
        source: graph.clone(),
        seed,
    })
}

/// Appends one strategy per player paying λ against every original strategy of
/// the opponent and 1 against itself; `(e_{N+1}, e_{N+1})` is then a pure Nash
/// equilibrium.
pub fn build_second_equilibrium_game(
    base: &ReductionArtifact,
    lambda: f64,
) -> Result<ReductionArtifact> {
    open_unit("lambda", lambda)?;
    if base.layout.extra_strategy.is_some() {
        return Err(Error::InvalidParameter("base game already has an appended strategy".into()));
    }
    let n = base.game.rows();
    if n != base.game.cols() {
        return Err(Error::DimensionMismatch("base game must be square".into()));
    }
    let mut m_row = Array2::<f64>::zeros((n + 1, n + 1));
    let mut m_col = Array2::<f64>::zeros((n + 1, n + 1));
    m_row.slice_mut(ndarray::s![..n, ..n]).assign(base.game.m_row());
    m_col.slice_mut(ndarray::s![..n, ..n]).assign(base.game.m_col());
    m_row.slice_mut(ndarray::s![n, ..n]).fill(lambda);
    m_col.slice_mut(ndarray::s![..n, n]).fill(lambda);
    m_row[[n, n]] = 1.0;
    m_col[[n, n]] = 1.0;

    let mut params = base.params.clone();
    params.lambda = Some(lambda);
    let mut layout = base.layout.clone();
    layout.dim = n + 1;
    layout.extra_strategy = Some(n);
    Ok(ReductionArtifact {
        recipe: Recipe::SecondEquilibrium {
            base: Box::new(base.recipe.clone()),
            lambda,
        },
        game: BimatrixGame::new(m_row, m_col)?,
        layout,
        params,
        source: base.source.clone(),
        seed: base.seed,
    })
}

/// Small-support game: `N₂` stacked copies of the `N₁ × n` matrix `B` and a
/// uniformly random 0/1 matrix `R` of side `N₁N₂` (row player) against `J − R`
/// (column player). Parameters come from [`params_small_support`] or
/// [`params_small_support_quarter`], with `n1`, `n2` set via `with_blocks`.
pub fn build_small_support_game(
    graph: &PlantedGraph,
    params: &ReductionParams,
    seed: u64,
) -> Result<ReductionArtifact> {
    open_unit("alpha", params.alpha)?;
    open_unit("beta", params.beta)?;
    if params.n1 == 0 || params.n2 == 0 {
        return Err(Error::InvalidParameter("n1 and n2 must be at least 1".into()));
    }
    let n = graph.n();
    let (n1, n2) = (params.n1, params.n2);
    let aux = n1 * n2;
    let dim = n + aux;
    let b = bernoulli_matrix(n1, n, params.beta, seed, Stream::BMatrix);
    let r = bernoulli_matrix(aux, aux, 0.5, seed, Stream::RMatrix);
    let a = graph.adjacency_matrix();

    let mut m_row = Array2::<f64>::zeros((dim, dim));
    let mut m_col = Array2::<f64>::zeros((dim, dim));
    let scaled = a.mapv(|v| params.alpha * v);
    m_row.slice_mut(ndarray::s![..n, ..n]).assign(&scaled);
    m_col.slice_mut(ndarray::s![..n, ..n]).assign(&scaled);
    let mut copy_blocks = Vec::with_capacity(n2);
    for c in 0..n2 {
        let block = n + c * n1..n + (c + 1) * n1;
        m_row.slice_mut(ndarray::s![block.clone(), ..n]).assign(&b);
        m_col.slice_mut(ndarray::s![..n, block.clone()]).assign(&b.t());
        copy_blocks.push(block);
    }
    m_row.slice_mut(ndarray::s![n.., n..]).assign(&r);
    m_col
        .slice_mut(ndarray::s![n.., n..])
        .assign(&r.mapv(|v| 1.0 - v));

    Ok(ReductionArtifact {
        recipe: Recipe::SmallSupport,
        game: BimatrixGame::new(m_row, m_col)?,
        layout: BlockLayout {
            dim,
            vertex_block: 0..n,
            copy_blocks,
            extra_strategy: None,
        },
        params: params.clone(),
        source: graph.clone(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{uniform_on, MixedProfile};
    use crate::graph::sample_planted_clique;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn eps_hardness_parameter_map() {
        let p = params_eps_hardness(0.07).unwrap();
        assert!(close(p.t.unwrap(), 0.04));
        assert!(close(p.alpha, 0.54));
        assert!(close(p.delta.unwrap(), 0.0016));
        assert!(close(p.beta, 1.0 / 3.0) && close(p.gamma, 1.0 / 3.0));
        assert!(close(params_eps_hardness(0.0).unwrap().alpha, 0.5));
        let p = params_eps_hardness(0.7).unwrap();
        assert!(close(p.t.unwrap(), 0.4) && close(p.alpha, 0.9));
        assert!(params_eps_hardness(0.9).is_err());
        let p = params_eps_hardness(0.07).unwrap();
        assert!(p.extraction_margin(0.43).unwrap() < 0.0);
        assert!(p.notes.iter().any(|n| n.contains("2 eta / 7")));
    }

    #[test]
    fn value_hardness_parameter_map() {
        let p = params_value_hardness(0.5).unwrap();
        assert!(close(p.eps.unwrap(), 0.01));
        assert!(close(p.alpha, 0.5) && close(p.beta, 0.49) && close(p.gamma, 0.4));
        assert!(p.notes.iter().any(|n| n.contains("3/4")));
        let p = params_value_hardness(0.1).unwrap();
        assert!(close(p.eps.unwrap(), 0.0004) && close(p.gamma, 0.08));
        assert!(!p.notes.iter().any(|n| n.contains("3/4")));
    }

    #[test]
    fn small_support_parameter_map() {
        let p = params_small_support(0.4).unwrap();
        assert!(close(p.alpha, 0.55) && close(p.beta, 0.63));
        assert!(params_small_support(0.5).is_err());
        // the soundness chain closes for the stated t and s
        assert!(p.extraction_margin(p.eps.unwrap()).unwrap() >= -1e-12);
    }

    #[test]
    fn quarter_variant_defaults() {
        for eta in [0.01, 0.05, 0.1, 0.2] {
            let p = params_small_support_quarter(eta).unwrap();
            let target = 0.25 - eta;
            // completeness: deviation into B gains strictly less than the target
            assert!(p.beta - p.alpha < target);
            assert!(close(target - (p.beta - p.alpha), eta * eta / 8.0));
            // soundness: the extraction condition holds
            assert!(p.extraction_margin(target).unwrap() >= 0.0);
            assert!(p.notes.iter().any(|n| n.contains("derived")));
        }
        assert!(params_small_support_quarter(0.0).is_err());
        assert!(params_small_support_quarter(0.3).is_err());
    }

    #[test]
    fn exact_block_size_calculator() {
        let p = params_eps_hardness(0.07).unwrap().with_c2(1.0);
        assert!(close(p.block_exponent(), 2.0 * 3f64.log2()));
        assert!((p.exact_block_size(4) - 4f64.powf(2.0 * 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn hk_game_block_structure() {
        let g = sample_planted_clique(4, 2, 1).unwrap();
        let p = ReductionParams::new(0.6, 1.0 - 1e-12, 0.3).unwrap().with_n_big(3);
        let art = build_hk_game(&g, &p, 5).unwrap();
        assert_eq!((art.game.rows(), art.game.cols()), (7, 7));
        assert!(art.layout.is_partition());
        let a = g.adjacency_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert!(close(art.game.m_row()[[i, j]], 0.6 * a[[i, j]]));
                assert!(close(art.game.m_col()[[i, j]], 0.6 * a[[i, j]]));
            }
        }
        for i in 4..7 {
            for j in 4..7 {
                assert!(close(art.game.m_row()[[i, j]], 0.3));
            }
            for j in 0..4 {
                // beta ~ 1 makes B all ones
                assert_eq!(art.game.m_row()[[i, j]], 1.0);
                assert_eq!(art.game.m_col()[[j, i]], 1.0);
                assert_eq!(art.game.m_row()[[j, i]], 0.0);
                assert_eq!(art.game.m_col()[[i, j]], 0.0);
            }
        }
    }

    #[test]
    fn clique_profile_has_conditional_value_alpha() {
        let g = sample_planted_clique(30, 8, 3).unwrap();
        let p = params_eps_hardness(0.07).unwrap().with_n_big(50);
        let art = build_hk_game(&g, &p, 3).unwrap();
        let x = uniform_on(art.layout.dim, g.planted().unwrap()).unwrap();
        let prof = MixedProfile::new(x.clone(), x).unwrap();
        let vertices: Vec<usize> = art.layout.vertex_block.clone().collect();
        assert!(close(art.game.conditional_value(&prof, &vertices).unwrap(), p.alpha));
    }

    #[test]
    fn second_equilibrium_game_shape() {
        let g = sample_planted_clique(10, 4, 2).unwrap();
        let base = build_hk_game(&g, &params_value_hardness(0.1).unwrap().with_n_big(6), 2).unwrap();
        let art = build_second_equilibrium_game(&base, DEFAULT_LAMBDA).unwrap();
        let n = base.game.rows();
        assert_eq!(art.game.rows(), n + 1);
        assert!(art.layout.is_partition());
        let e = MixedProfile::pure(n + 1, n + 1, n, n).unwrap();
        let cert = art.game.regret(&e).unwrap();
        assert_eq!((cert.regret_row, cert.regret_col), (0.0, 0.0));
        assert_eq!(art.params.lambda, Some(0.8));
        assert!(build_second_equilibrium_game(&art, 0.8).is_err());
        assert!(build_second_equilibrium_game(&base, 1.0).is_err());
    }

    #[test]
    fn small_support_game_structure() {
        let g = sample_planted_clique(8, 3, 4).unwrap();
        let p = params_small_support(0.4).unwrap().with_blocks(5, 3);
        let art = build_small_support_game(&g, &p, 4).unwrap();
        assert_eq!(art.game.rows(), 8 + 15);
        assert!(art.layout.is_partition());
        let (mr, mc) = (art.game.m_row(), art.game.m_col());
        for i in 8..23 {
            for j in 8..23 {
                assert_eq!(mr[[i, j]] + mc[[i, j]], 1.0);
            }
        }
        for c in 1..3 {
            for r in 0..5 {
                for j in 0..8 {
                    assert_eq!(mr[[8 + r, j]], mr[[8 + c * 5 + r, j]]);
                    assert_eq!(mc[[j, 8 + r]], mc[[j, 8 + c * 5 + r]]);
                }
            }
        }
    }

    #[test]
    fn artifact_json_replays_identically() {
        let g = sample_planted_clique(12, 4, 8).unwrap();
        let base = build_hk_game(&g, &params_eps_hardness(0.07).unwrap().with_n_big(9), 8).unwrap();
        let art = build_second_equilibrium_game(&base, 0.8).unwrap();
        let json = serde_json::to_string(&art).unwrap();
        assert!(!json.contains("m_row"));
        let back: ReductionArtifact = serde_json::from_str(&json).unwrap();
        assert_eq!(back, art);
    }
}
