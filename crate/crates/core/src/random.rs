//! Seeded random games.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Game, GameBuilder, Orientation, RelationKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGameParams {
    pub n: usize,
    pub orientation: Orientation,
    /// Probability that a pair is a known friendship.
    pub friend_density: f64,
    /// Probability that a pair is a stranger pair.
    pub stranger_density: f64,
    /// Draw unordered pairs once and mirror them.
    pub symmetric: bool,
}

impl RandomGameParams {
    pub fn validate(&self) -> Result<()> {
        let (f, s) = (self.friend_density, self.stranger_density);
        for (name, d) in [("friend", f), ("stranger", s)] {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::InvalidDensities(format!(
                    "{name} density {d} is outside [0, 1]"
                )));
            }
        }
        if f + s > 1.0 {
            return Err(Error::InvalidDensities(format!(
                "friend and stranger densities sum to {} > 1",
                f + s
            )));
        }
        Ok(())
    }
}

/// Each pair independently becomes a friend, stranger or enemy pair.
pub fn random_game<R: Rng + ?Sized>(params: &RandomGameParams, rng: &mut R) -> Result<Game> {
    params.validate()?;
    let n = params.n;
    let mut draft = GameBuilder::new(params.orientation, n).symmetric(params.symmetric);
    for i in 0..n {
        for j in 0..n {
            if i == j || (params.symmetric && j < i) {
                continue;
            }
            let x: f64 = rng.random();
            let kind = if x < params.friend_density {
                RelationKind::Friend
            } else if x < params.friend_density + params.stranger_density {
                RelationKind::Stranger
            } else {
                RelationKind::Enemy
            };
            if params.symmetric {
                draft.set_mutual(i, j, kind);
            } else {
                draft.set(i, j, kind);
            }
        }
    }
    draft.build()
}
