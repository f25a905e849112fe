//! Symmetric games up to relabelling of agents.
//!
//! A symmetric game is an edge-coloured complete graph (friend, enemy,
//! stranger). Its canonical code is the smallest pair-by-pair encoding over
//! all agent orders compatible with a colour refinement of the agents, and
//! games are generated one agent at a time, keeping one representative per
//! code at every size.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{bit, Game, GameBuilder, Orientation, RelationKind};

/// Codes use two bits per unordered pair.
pub const CANONICAL_CAP: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrangerPairs {
    Any,
    AtMost(usize),
    Exactly(usize),
}

impl StrangerPairs {
    fn ceiling(self) -> usize {
        match self {
            StrangerPairs::Any => usize::MAX,
            StrangerPairs::AtMost(k) | StrangerPairs::Exactly(k) => k,
        }
    }

    fn admits(self, pairs: usize) -> bool {
        match self {
            StrangerPairs::Any => true,
            StrangerPairs::AtMost(k) => pairs <= k,
            StrangerPairs::Exactly(k) => pairs == k,
        }
    }
}

/// A class of symmetric games.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GameFamily {
    pub orientation: Orientation,
    pub max_strangers_per_agent: Option<usize>,
    pub stranger_pairs: StrangerPairs,
    /// Every agent has strictly more known friends than strangers.
    pub friends_exceed_strangers: bool,
}

impl GameFamily {
    pub fn unrestricted(orientation: Orientation) -> Self {
        GameFamily {
            orientation,
            max_strangers_per_agent: None,
            stranger_pairs: StrangerPairs::Any,
            friends_exceed_strangers: false,
        }
    }

    fn member(&self, g: &Shape) -> bool {
        self.stranger_pairs.admits(g.stranger_pairs())
            && (!self.friends_exceed_strangers
                || (0..g.n).all(|i| g.friends[i].count_ones() > g.strangers[i].count_ones()))
    }

    fn game_of(&self, g: &Shape) -> Game {
        let mut draft = GameBuilder::new(self.orientation, g.n).symmetric(true);
        for i in 0..g.n {
            for j in i + 1..g.n {
                draft.set_mutual(i, j, g.kind(i, j));
            }
        }
        draft.build().expect("generated games are valid")
    }
}

/// Friend and stranger masks of a symmetric game; everything else is enmity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Shape {
    n: usize,
    friends: Vec<u64>,
    strangers: Vec<u64>,
}

impl Shape {
    fn from_game(game: &Game) -> Result<Self> {
        if !game.is_symmetric() {
            return Err(Error::AsymmetricGame);
        }
        let n = game.agent_count();
        Ok(Shape {
            n,
            friends: (0..n).map(|i| game.friend_mask(i)).collect(),
            strangers: (0..n).map(|i| game.stranger_mask(i)).collect(),
        })
    }

    fn kind(&self, i: usize, j: usize) -> RelationKind {
        if self.friends[i] & bit(j) != 0 {
            RelationKind::Friend
        } else if self.strangers[i] & bit(j) != 0 {
            RelationKind::Stranger
        } else {
            RelationKind::Enemy
        }
    }

    fn code_of(&self, i: usize, j: usize) -> u128 {
        match self.kind(i, j) {
            RelationKind::Enemy => 0,
            RelationKind::Friend => 1,
            RelationKind::Stranger => 2,
        }
    }

    fn stranger_pairs(&self) -> usize {
        self.strangers
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Colour refinement: agents start coloured by their friend and stranger
    /// counts and are split by the colours of their neighbours until stable.
    fn refined_colours(&self) -> Vec<usize> {
        let n = self.n;
        let mut colours = rank(
            (0..n)
                .map(|i| (self.friends[i].count_ones(), self.strangers[i].count_ones()))
                .collect(),
        );
        loop {
            let classes = colours.iter().max().map_or(0, |&m| m + 1);
            let signatures = (0..n)
                .map(|i| {
                    let mut around: Vec<(u32, usize)> = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| (self.code_of(i, j) as u32, colours[j]))
                        .collect();
                    around.sort_unstable();
                    (colours[i], around)
                })
                .collect();
            let next = rank(signatures);
            let refined = next.iter().max().map_or(0, |&m| m + 1);
            colours = next;
            if refined == classes {
                return colours;
            }
        }
    }

    fn relabel(&self, order: &[usize]) -> Shape {
        let n = self.n;
        let mut out = Shape {
            n,
            friends: vec![0; n],
            strangers: vec![0; n],
        };
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                match self.kind(order[p], order[q]) {
                    RelationKind::Friend => out.friends[p] |= bit(q),
                    RelationKind::Stranger => out.strangers[p] |= bit(q),
                    RelationKind::Enemy => {}
                }
            }
        }
        out
    }

    /// Smallest code and an agent order achieving it.
    fn canonical(&self) -> (u128, Vec<usize>) {
        let colours = self.refined_colours();
        let mut cells: Vec<Vec<usize>> = Vec::new();
        for c in 0..colours.iter().max().map_or(0, |&m| m + 1) {
            cells.push((0..self.n).filter(|&i| colours[i] == c).collect());
        }
        let slots: Vec<usize> = cells
            .iter()
            .enumerate()
            .flat_map(|(c, cell)| std::iter::repeat_n(c, cell.len()))
            .collect();
        let mut search = CanonSearch {
            shape: self,
            cells: &cells,
            slots: &slots,
            order: Vec::with_capacity(self.n),
            used: 0,
            best: None,
            best_prefix: vec![u128::MAX; self.n + 1],
        };
        search.place(0);
        search.best.expect("at least one order")
    }
}

/// Ranks signatures by sorted position, so equal signatures share a colour
/// and the colours do not depend on the labelling.
fn rank<T: Ord + Clone>(signatures: Vec<T>) -> Vec<usize> {
    let mut distinct = signatures.clone();
    distinct.sort();
    distinct.dedup();
    signatures
        .iter()
        .map(|s| distinct.binary_search(s).expect("present"))
        .collect()
}

struct CanonSearch<'a> {
    shape: &'a Shape,
    cells: &'a [Vec<usize>],
    slots: &'a [usize],
    order: Vec<usize>,
    used: u64,
    best: Option<(u128, Vec<usize>)>,
    /// Smallest code prefix seen after placing `p` agents. Every partial
    /// order extends to a full one, so larger prefixes can be skipped.
    best_prefix: Vec<u128>,
}

impl CanonSearch<'_> {
    /// Codes are built column by column: placing the agent at position `p`
    /// appends its relations to positions `0..p`.
    fn place(&mut self, prefix: u128) {
        let p = self.order.len();
        if p == self.shape.n {
            if self.best.as_ref().is_none_or(|(b, _)| prefix < *b) {
                self.best = Some((prefix, self.order.clone()));
            }
            return;
        }
        for &v in &self.cells[self.slots[p]] {
            if self.used & bit(v) != 0 {
                continue;
            }
            let code = self
                .order
                .iter()
                .fold(prefix, |c, &u| (c << 2) | self.shape.code_of(u, v));
            if code > self.best_prefix[p + 1] {
                continue;
            }
            self.best_prefix[p + 1] = code;
            self.order.push(v);
            self.used |= bit(v);
            self.place(code);
            self.order.pop();
            self.used &= !bit(v);
        }
    }
}

/// Canonical code of a symmetric game: two games get the same code iff they
/// differ only by a relabelling of agents.
pub fn canonical_key(game: &Game) -> Result<(usize, u128)> {
    let n = game.agent_count();
    if n > CANONICAL_CAP {
        return Err(Error::CanonicalFormCap {
            agents: n,
            cap: CANONICAL_CAP,
        });
    }
    Ok((n, Shape::from_game(game)?.canonical().0))
}

/// One representative per isomorphism class of `n`-agent shapes respecting
/// the hereditary part of `family`, for every size `1..=n_max`.
pub(crate) fn shape_levels(family: &GameFamily, n_max: usize) -> Result<Vec<Vec<Shape>>> {
    if n_max > CANONICAL_CAP {
        return Err(Error::CanonicalFormCap {
            agents: n_max,
            cap: CANONICAL_CAP,
        });
    }
    let per_agent = family.max_strangers_per_agent.unwrap_or(usize::MAX);
    let total = family.stranger_pairs.ceiling();
    let mut levels: Vec<Vec<Shape>> = Vec::new();
    if n_max == 0 {
        return Ok(levels);
    }
    levels.push(vec![Shape {
        n: 1,
        friends: vec![0],
        strangers: vec![0],
    }]);
    for k in 1..n_max {
        let mut seen: HashMap<u128, Shape> = HashMap::new();
        for base in &levels[k - 1] {
            let room = total.saturating_sub(base.stranger_pairs());
            let mut kinds = vec![0u8; k];
            loop {
                let strangers_new = kinds.iter().filter(|&&c| c == 2).count();
                let fits = strangers_new <= per_agent
                    && strangers_new <= room
                    && (0..k).all(|i| {
                        kinds[i] != 2 || (base.strangers[i].count_ones() as usize) < per_agent
                    });
                if fits {
                    let grown = extend(base, &kinds);
                    let (code, order) = grown.canonical();
                    seen.entry(code).or_insert_with(|| grown.relabel(&order));
                }
                // next assignment in base 3
                let mut pos = 0;
                while pos < k && kinds[pos] == 2 {
                    kinds[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
                kinds[pos] += 1;
            }
        }
        let mut next: Vec<(u128, Shape)> = seen.into_iter().collect();
        next.sort_by_key(|(code, _)| *code);
        levels.push(next.into_iter().map(|(_, s)| s).collect());
    }
    Ok(levels)
}

fn extend(base: &Shape, kinds: &[u8]) -> Shape {
    let k = base.n;
    let mut g = Shape {
        n: k + 1,
        friends: base.friends.clone(),
        strangers: base.strangers.clone(),
    };
    g.friends.push(0);
    g.strangers.push(0);
    for (i, &c) in kinds.iter().enumerate() {
        let masks = match c {
            1 => &mut g.friends,
            2 => &mut g.strangers,
            _ => continue,
        };
        masks[i] |= bit(k);
        masks[k] |= bit(i);
    }
    g
}

pub(crate) fn shapes_to_games<'a>(
    family: &'a GameFamily,
    shapes: &'a [Shape],
) -> impl Iterator<Item = Game> + 'a {
    shapes
        .iter()
        .filter(|s| family.member(s))
        .map(|s| family.game_of(s))
}

/// All `n`-agent symmetric games of `family`, one per isomorphism class,
/// ordered by canonical code and labelled canonically.
pub fn canonical_games(family: &GameFamily, n: usize) -> Result<Vec<Game>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let levels = shape_levels(family, n)?;
    Ok(shapes_to_games(family, &levels[n - 1]).collect())
}
