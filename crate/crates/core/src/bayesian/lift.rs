use super::{BayesianGame, PureBayesProfile};
use crate::error::{Error, Result};
use crate::game::MixedProfile;
use crate::reductions::ReductionArtifact;

/// Uniform-type Bayesian game whose payoffs ignore the types and equal the
/// artifact's bimatrix payoffs.
pub fn lift_uniform_bayes(artifact: &ReductionArtifact, num_types: usize) -> Result<BayesianGame> {
    if num_types == 0 {
        return Err(Error::InvalidParameter("num_types must be positive".into()));
    }
    BayesianGame::type_invariant(
        num_types,
        num_types,
        artifact.game.m_row().clone(),
        artifact.game.m_col().clone(),
    )
}

/// Empirical distribution of the actions assigned across types.
pub fn pure_bayes_to_mixed(game: &BayesianGame, profile: &PureBayesProfile) -> Result<MixedProfile> {
    game.check(profile)?;
    if !game.is_uniform() {
        return Err(Error::InvalidParameter("type distribution is not uniform".into()));
    }
    let empirical = |actions: &[usize], len: usize| {
        let mut v = vec![0.0; len];
        actions.iter().for_each(|&a| v[a] += 1.0 / actions.len() as f64);
        v
    };
    MixedProfile::new(
        empirical(&profile.s_row, game.n_row()),
        empirical(&profile.s_col, game.n_col()),
    )
}
