//! Resolutions of stranger relations.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{bit, AgentId, Game, GameBuilder, Members, Partition, RelationKind};

/// Default cap on the number of free binary choices a full enumeration may
/// range over.
pub const DEFAULT_RESOLUTION_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Friendship,
    Enmity,
}

impl Outcome {
    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Friendship => Outcome::Enmity,
            Outcome::Enmity => Outcome::Friendship,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Friendship => "friendship",
            Outcome::Enmity => "enmity",
        })
    }
}

/// Whether mirrored stranger pairs resolve together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResolutionMode {
    /// One choice per unordered pair; `(i, j)` and `(j, i)` always agree.
    Joint,
    /// One choice per ordered pair.
    Independent,
}

impl ResolutionMode {
    /// Joint for symmetric games, independent otherwise.
    pub fn default_for(game: &Game) -> Self {
        if game.symmetric_flag() {
            ResolutionMode::Joint
        } else {
            ResolutionMode::Independent
        }
    }
}

/// A total assignment of a game's stranger pairs to friendship or enmity.
///
/// Stored as one bitset per agent: the strangers it resolves as friends.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Resolution {
    strangers: Vec<u64>,
    friendly: Vec<u64>,
}

impl Resolution {
    /// Resolves each ordered stranger pair `(i, j)` by `decide(i, j)`.
    pub fn from_fn<F>(game: &Game, mut decide: F) -> Self
    where
        F: FnMut(AgentId, AgentId) -> Outcome,
    {
        let n = game.agent_count();
        let strangers: Vec<u64> = (0..n).map(|i| game.stranger_mask(i)).collect();
        let friendly = (0..n)
            .map(|i| {
                Members(strangers[i])
                    .filter(|&j| decide(AgentId(i), AgentId(j)) == Outcome::Friendship)
                    .fold(0, |m, j| m | bit(j))
            })
            .collect();
        Resolution {
            strangers,
            friendly,
        }
    }

    /// Builds a resolution from explicit pair outcomes, which must cover the
    /// game's stranger pairs exactly once each.
    pub fn from_pairs<I>(game: &Game, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (AgentId, AgentId, Outcome)>,
    {
        let n = game.agent_count();
        let mut covered = vec![0u64; n];
        let mut friendly = vec![0u64; n];
        for (i, j, outcome) in pairs {
            if i.0 >= n || j.0 >= n || i == j || game.relation(i, j) != RelationKind::Stranger {
                return Err(Error::InvalidResolution(format!(
                    "({i},{j}) is not a stranger pair"
                )));
            }
            if covered[i.0] & bit(j.0) != 0 {
                return Err(Error::InvalidResolution(format!(
                    "({i},{j}) is resolved twice"
                )));
            }
            covered[i.0] |= bit(j.0);
            if outcome == Outcome::Friendship {
                friendly[i.0] |= bit(j.0);
            }
        }
        if (0..n).any(|i| covered[i] != game.stranger_mask(i)) {
            return Err(Error::IncompleteResolution);
        }
        Ok(Resolution {
            strangers: covered,
            friendly,
        })
    }

    /// How the stranger pair `(i, j)` resolves; `None` when it is not a
    /// stranger pair.
    pub fn outcome(&self, i: AgentId, j: AgentId) -> Option<Outcome> {
        let row = *self.strangers.get(i.0)?;
        if j.0 >= 64 || row & bit(j.0) == 0 {
            return None;
        }
        Some(if self.friendly[i.0] & bit(j.0) != 0 {
            Outcome::Friendship
        } else {
            Outcome::Enmity
        })
    }

    /// Every resolved pair in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, AgentId, Outcome)> + '_ {
        self.strangers
            .iter()
            .enumerate()
            .flat_map(move |(i, &row)| {
                Members(row).map(move |j| {
                    let outcome = if self.friendly[i] & bit(j) != 0 {
                        Outcome::Friendship
                    } else {
                        Outcome::Enmity
                    };
                    (AgentId(i), AgentId(j), outcome)
                })
            })
    }

    pub fn len(&self) -> usize {
        self.strangers.iter().map(|s| s.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True iff the domain is exactly the game's stranger pairs.
    pub fn covers(&self, game: &Game) -> bool {
        self.strangers.len() == game.agent_count()
            && (0..game.agent_count()).all(|i| self.strangers[i] == game.stranger_mask(i))
    }

    /// True iff mirrored pairs resolve the same way.
    pub fn is_symmetric(&self) -> bool {
        self.pairs()
            .all(|(i, j, o)| self.outcome(j, i).is_none_or(|mirror| mirror == o))
    }

    /// Every pair resolved the other way.
    pub fn flipped(&self) -> Resolution {
        Resolution {
            strangers: self.strangers.clone(),
            friendly: self
                .strangers
                .iter()
                .zip(&self.friendly)
                .map(|(s, f)| s & !f)
                .collect(),
        }
    }

    #[inline]
    pub(crate) fn friendly_mask(&self, i: usize) -> u64 {
        self.friendly[i]
    }
}

impl fmt::Display for Resolution {
    /// Lists pairs 1-indexed; symmetric resolutions list each unordered pair once.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("(no strangers)");
        }
        let symmetric = self.is_symmetric();
        let mut first = true;
        for (i, j, o) in self.pairs() {
            if symmetric && self.outcome(j, i).is_some() && j < i {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            let arrow = if symmetric && self.outcome(j, i).is_some() {
                "~"
            } else {
                "->"
            };
            write!(f, "{i}{arrow}{j} {o}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `r⁺`: every stranger becomes a friend.
pub fn all_friends(game: &Game) -> Resolution {
    Resolution::from_fn(game, |_, _| Outcome::Friendship)
}

/// `r⁻`: every stranger becomes an enemy.
pub fn all_enemies(game: &Game) -> Resolution {
    Resolution::from_fn(game, |_, _| Outcome::Enmity)
}

/// `r′`: strangers sharing a coalition of `partition` become friends, the
/// rest enemies.
pub fn aligned(game: &Game, partition: &Partition) -> Resolution {
    Resolution::from_fn(game, |i, j| {
        if partition.same_coalition(i, j) {
            Outcome::Friendship
        } else {
            Outcome::Enmity
        }
    })
}

/// `r*`: the complement of [`aligned`].
pub fn anti_aligned(game: &Game, partition: &Partition) -> Resolution {
    Resolution::from_fn(game, |i, j| {
        if partition.same_coalition(i, j) {
            Outcome::Enmity
        } else {
            Outcome::Friendship
        }
    })
}

/// The free choices of a full enumeration, in canonical order: ordered pairs
/// for independent mode, pairs `i < j` for joint mode (asymmetric stranger
/// pairs in a joint-mode game still get their own choice).
pub fn choice_pairs(game: &Game, mode: ResolutionMode) -> Vec<(AgentId, AgentId)> {
    game.stranger_pairs()
        .into_iter()
        .filter(|&(i, j)| match mode {
            ResolutionMode::Independent => true,
            ResolutionMode::Joint => i < j || game.relation(j, i) != RelationKind::Stranger,
        })
        .collect()
}

/// Number of free binary choices of a full enumeration.
pub fn resolution_bits(game: &Game, mode: ResolutionMode) -> usize {
    choice_pairs(game, mode).len()
}

/// Every resolution exactly once, in lexicographic order over
/// [`choice_pairs`] with enmity before friendship. Refuses when the number
/// of choices exceeds `cap`.
pub fn enumerate_resolutions(game: &Game, mode: ResolutionMode, cap: usize) -> Result<Resolutions> {
    let choices = choice_pairs(game, mode);
    let bits = choices.len();
    if bits > cap || bits >= 64 {
        return Err(Error::TooManyResolutions { bits, cap });
    }
    Ok(Resolutions {
        strangers: (0..game.agent_count())
            .map(|i| game.stranger_mask(i))
            .collect(),
        choices,
        joint: mode == ResolutionMode::Joint,
        next: 0,
        end: 1u64 << bits,
    })
}

/// Iterator returned by [`enumerate_resolutions`].
#[derive(Clone, Debug)]
pub struct Resolutions {
    strangers: Vec<u64>,
    choices: Vec<(AgentId, AgentId)>,
    joint: bool,
    next: u64,
    end: u64,
}

impl Resolutions {
    /// Builds the `index`-th resolution; the first choice is the most
    /// significant bit.
    fn build(&self, index: u64) -> Resolution {
        let bits = self.choices.len();
        let mut friendly = vec![0u64; self.strangers.len()];
        for (k, &(i, j)) in self.choices.iter().enumerate() {
            if index >> (bits - 1 - k) & 1 == 1 {
                friendly[i.0] |= bit(j.0);
                if self.joint && self.strangers[j.0] & bit(i.0) != 0 {
                    friendly[j.0] |= bit(i.0);
                }
            }
        }
        Resolution {
            strangers: self.strangers.clone(),
            friendly,
        }
    }
}

impl Iterator for Resolutions {
    type Item = Resolution;

    fn next(&mut self) -> Option<Resolution> {
        if self.next >= self.end {
            return None;
        }
        let r = self.build(self.next);
        self.next += 1;
        Some(r)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Resolutions {}

/// The stranger-free game obtained by applying `resolution`.
pub fn resolve(game: &Game, resolution: &Resolution) -> Result<Game> {
    if !resolution.covers(game) {
        return Err(Error::IncompleteResolution);
    }
    let n = game.agent_count();
    let mut draft = GameBuilder::new(game.orientation(), n);
    for i in game.agents() {
        for j in game.agents() {
            if i == j {
                continue;
            }
            let kind = match game.relation(i, j) {
                RelationKind::Stranger => match resolution.outcome(i, j) {
                    Some(Outcome::Friendship) => RelationKind::Friend,
                    _ => RelationKind::Enemy,
                },
                kind => kind,
            };
            draft.set(i.0, j.0, kind);
        }
    }
    let symmetric = game.symmetric_flag() && resolution.is_symmetric();
    draft.symmetric(symmetric).build()
}
