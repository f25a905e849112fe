//! Possible and necessary stability verification.
//!
//! Every procedure here compares a handful of extreme resolutions instead of
//! enumerating all `2^|S|` of them:
//!
//! - A coalition `C` *possibly blocks* `γ` iff every member `i` strictly
//!   prefers `C` when the strangers in `C ∖ γ(i)` are friends and those in
//!   `γ(i) ∖ C` are enemies. Strangers in `C ∩ γ(i)` count the same on both
//!   sides and cancel. *Necessarily blocks* swaps the two extremes.
//! - Under the aligned resolution `r′` every member of any coalition sees
//!   its worst case, so a coalition blocking under `r′` blocks under every
//!   resolution. This makes P-CS, P-SCS and P-INS a single sweep under `r′`.
//! - `r′` is simultaneously the best case for staying put and the worst case
//!   for every unilateral move, `r*` the reverse. P-NS/P-IS/P-CIS/P-IR
//!   reduce to one check under `r′` and the necessary versions to one check
//!   under `r*`; IS, CIS and IR use the equivalent closed forms over `r⁺`/`r⁻`
//!   and the permission sets.
//!
//! Every unstable [`Verdict`] carries a [`Witness`] that [`replay`] checks
//! against the plain definitions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    bit, utility, AgentId, Coalition, Game, Members, Orientation, Partition, SizeLexSubsets,
};
use crate::resolution::{aligned, anti_aligned, Outcome, Resolution, DEFAULT_RESOLUTION_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Notion {
    /// Individual rationality.
    Ir,
    /// Nash stability.
    Ns,
    /// Individual stability.
    Is,
    /// Contractual individual stability.
    Cis,
    /// Core stability.
    Cs,
    /// Strict core stability.
    Scs,
    /// Internal stability.
    Ins,
}

impl Notion {
    pub const ALL: [Notion; 7] = [
        Notion::Ir,
        Notion::Ns,
        Notion::Is,
        Notion::Cis,
        Notion::Cs,
        Notion::Scs,
        Notion::Ins,
    ];

    /// IR, NS, IS and CIS judge single-agent deviations.
    pub fn is_individual(self) -> bool {
        matches!(self, Notion::Ir | Notion::Ns | Notion::Is | Notion::Cis)
    }

    pub fn name(self) -> &'static str {
        match self {
            Notion::Ir => "IR",
            Notion::Ns => "NS",
            Notion::Is => "IS",
            Notion::Cis => "CIS",
            Notion::Cs => "CS",
            Notion::Scs => "SCS",
            Notion::Ins => "INS",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Notion::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown stability notion `{s}` (expected IR, NS, IS, CIS, CS, SCS or INS)")
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Possible,
    Necessary,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Possible, Mode::Necessary];

    pub fn prefix(self) -> &'static str {
        match self {
            Mode::Possible => "P",
            Mode::Necessary => "N",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Possible => "possible",
            Mode::Necessary => "necessary",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p" | "possible" | "possibly" => Ok(Mode::Possible),
            "n" | "necessary" | "necessarily" => Ok(Mode::Necessary),
            _ => Err(format!(
                "unknown mode `{s}` (expected possible or necessary)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StabilityQuery {
    pub notion: Notion,
    pub mode: Mode,
}

impl StabilityQuery {
    pub fn new(notion: Notion, mode: Mode) -> Self {
        StabilityQuery { notion, mode }
    }

    /// All 14 queries.
    pub fn all() -> impl Iterator<Item = StabilityQuery> {
        Notion::ALL.into_iter().flat_map(|notion| {
            Mode::ALL
                .into_iter()
                .map(move |mode| StabilityQuery { notion, mode })
        })
    }
}

/// `P-CIS`, `N-INS`, ...
impl fmt::Display for StabilityQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.mode.prefix(), self.notion)
    }
}

impl FromStr for StabilityQuery {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (mode, notion) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| format!("expected a query like N-CIS, got `{s}`"))?;
        Ok(StabilityQuery {
            notion: notion.parse()?,
            mode: mode.parse()?,
        })
    }
}

/// Evidence of instability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `agent` leaves its coalition to join `target` (empty: go alone).
    Deviation {
        agent: AgentId,
        target: Coalition,
        resolution: Resolution,
    },
    /// `coalition` (weakly, if `weak`) blocks the partition. For INS it is a
    /// proper subset of one coalition.
    Blocking {
        coalition: Coalition,
        resolution: Resolution,
        weak: bool,
    },
}

impl Witness {
    pub fn resolution(&self) -> &Resolution {
        match self {
            Witness::Deviation { resolution, .. } | Witness::Blocking { resolution, .. } => {
                resolution
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub query: StabilityQuery,
    witness: Option<Witness>,
}

impl Verdict {
    fn stable(query: StabilityQuery) -> Self {
        Verdict {
            query,
            witness: None,
        }
    }

    fn unstable(query: StabilityQuery, witness: Witness) -> Self {
        Verdict {
            query,
            witness: Some(witness),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn into_witness(self) -> Option<Witness> {
        self.witness
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// CS/SCS sweep at most `2^coalition_cap` coalitions; INS at most
    /// `2^coalition_cap` subsets of one coalition.
    pub coalition_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            coalition_cap: DEFAULT_RESOLUTION_CAP,
        }
    }
}

fn check_inputs(game: &Game, partition: &Partition) -> Result<()> {
    partition.check_against(game)
}

fn check_candidate(game: &Game, coalition: Coalition) -> Result<()> {
    if coalition.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    if !coalition.is_subset(game.grand_coalition()) {
        return Err(Error::InvalidPartition(format!(
            "coalition {coalition} names an agent outside the game"
        )));
    }
    Ok(())
}

/// Strangers with both ends in `coalition` become friends, all others enemies.
fn favouring(game: &Game, coalition: Coalition) -> Resolution {
    Resolution::from_fn(game, |i, j| {
        if coalition.contains(i) && coalition.contains(j) {
            Outcome::Friendship
        } else {
            Outcome::Enmity
        }
    })
}

#[inline]
fn possibly_blocks_mask(game: &Game, partition: &Partition, c: u64) -> bool {
    Members(c).all(|i| {
        let home = partition.mask_of(i);
        game.optimistic_value(i, c & !home) > game.pessimistic_value(i, home & !c)
    })
}

#[inline]
fn necessarily_blocks_mask(game: &Game, partition: &Partition, c: u64) -> bool {
    Members(c).all(|i| {
        let home = partition.mask_of(i);
        game.pessimistic_value(i, c & !home) > game.optimistic_value(i, home & !c)
    })
}

/// Weak blocking given per-member (gain from `C ∖ γ(i)`, loss from `γ(i) ∖ C`).
#[inline]
fn weak_margins<F>(c: u64, mut margin: F) -> bool
where
    F: FnMut(usize) -> i64,
{
    let mut strict = false;
    for i in Members(c) {
        let m = margin(i);
        if m < 0 {
            return false;
        }
        strict |= m > 0;
    }
    strict
}

fn possibly_weakly_blocks_mask(game: &Game, partition: &Partition, c: u64) -> bool {
    weak_margins(c, |i| {
        let home = partition.mask_of(i);
        game.optimistic_value(i, c & !home) - game.pessimistic_value(i, home & !c)
    })
}

fn necessarily_weakly_blocks_mask(game: &Game, partition: &Partition, c: u64) -> bool {
    weak_margins(c, |i| {
        let home = partition.mask_of(i);
        game.pessimistic_value(i, c & !home) - game.optimistic_value(i, home & !c)
    })
}

/// Whether some resolution makes every member of `coalition` strictly prefer
/// it to its current coalition. On success, returns such a resolution.
pub fn possibly_blocks(
    game: &Game,
    partition: &Partition,
    coalition: Coalition,
) -> Result<Option<Resolution>> {
    check_inputs(game, partition)?;
    check_candidate(game, coalition)?;
    Ok(possibly_blocks_mask(game, partition, coalition.mask()).then(|| favouring(game, coalition)))
}

/// Whether `coalition` blocks `partition` under every resolution.
pub fn necessarily_blocks(
    game: &Game,
    partition: &Partition,
    coalition: Coalition,
) -> Result<bool> {
    check_inputs(game, partition)?;
    check_candidate(game, coalition)?;
    Ok(necessarily_blocks_mask(game, partition, coalition.mask()))
}

/// Weak blocking: every member weakly better off, at least one strictly.
///
/// `Possible` asks for some resolution and returns one; `Necessary` asks for
/// all resolutions and returns the aligned resolution, which is the worst
/// case for every member at once.
pub fn weakly_blocks(
    game: &Game,
    partition: &Partition,
    coalition: Coalition,
    mode: Mode,
) -> Result<Option<Resolution>> {
    check_inputs(game, partition)?;
    check_candidate(game, coalition)?;
    let c = coalition.mask();
    Ok(match mode {
        Mode::Possible => {
            possibly_weakly_blocks_mask(game, partition, c).then(|| favouring(game, coalition))
        }
        Mode::Necessary => {
            necessarily_weakly_blocks_mask(game, partition, c).then(|| aligned(game, partition))
        }
    })
}

/// Targets of a unilateral move by `i`: the other coalitions, then going alone.
fn targets(partition: &Partition, i: usize) -> impl Iterator<Item = u64> + '_ {
    let home = partition.mask_of(i);
    partition
        .coalitions()
        .iter()
        .map(|c| c.mask())
        .filter(move |&c| c != home)
        .chain(std::iter::once(0))
}

/// Verifies IR, NS, IS or CIS in polynomial time.
pub fn verify_individual(
    game: &Game,
    partition: &Partition,
    notion: Notion,
    mode: Mode,
) -> Result<Verdict> {
    check_inputs(game, partition)?;
    if !notion.is_individual() {
        return Err(Error::UnsupportedNotion {
            notion: notion.name(),
            routine: "verify_individual",
        });
    }
    let query = StabilityQuery::new(notion, mode);
    let n = game.agent_count();

    let deviation = match notion {
        Notion::Ir => (0..n)
            .find(|&i| {
                let home = partition.mask_of(i);
                let best = match mode {
                    Mode::Possible => game.optimistic_value(i, home),
                    Mode::Necessary => game.pessimistic_value(i, home),
                };
                best < 0
            })
            .map(|i| (i, 0)),
        Notion::Ns => {
            let r = match mode {
                Mode::Possible => aligned(game, partition),
                Mode::Necessary => anti_aligned(game, partition),
            };
            first_deviation(partition, n, |i, home, target| {
                game.resolved_value(&r, i, target) > game.resolved_value(&r, i, home)
            })
        }
        Notion::Is | Notion::Cis => {
            let contractual = notion == Notion::Cis;
            first_deviation(partition, n, |i, home, target| {
                let (desire, admit, release) = match mode {
                    Mode::Possible => (
                        game.pessimistic_value(i, target) > game.optimistic_value(i, home),
                        Members(target).all(|j| game.friend_mask(j) & bit(i) != 0),
                        Members(home & !bit(i)).all(|k| game.enemy_mask(k) & bit(i) != 0),
                    ),
                    Mode::Necessary => (
                        game.optimistic_value(i, target) > game.pessimistic_value(i, home),
                        Members(target)
                            .all(|j| (game.friend_mask(j) | game.stranger_mask(j)) & bit(i) != 0),
                        Members(home & !bit(i))
                            .all(|k| (game.enemy_mask(k) | game.stranger_mask(k)) & bit(i) != 0),
                    ),
                };
                desire && admit && (!contractual || release)
            })
        }
        _ => unreachable!("group notions rejected above"),
    };

    Ok(match deviation {
        None => Verdict::stable(query),
        Some((i, target)) => {
            let resolution = match mode {
                Mode::Possible => aligned(game, partition),
                Mode::Necessary => anti_aligned(game, partition),
            };
            Verdict::unstable(
                query,
                Witness::Deviation {
                    agent: AgentId(i),
                    target: Coalition::from_mask(target),
                    resolution,
                },
            )
        }
    })
}

fn first_deviation<F>(partition: &Partition, n: usize, mut deviates: F) -> Option<(usize, u64)>
where
    F: FnMut(usize, u64, u64) -> bool,
{
    (0..n).find_map(|i| {
        let home = partition.mask_of(i);
        targets(partition, i)
            .find(|&t| deviates(i, home, t))
            .map(|t| (i, t))
    })
}

/// Verifies CS, SCS or INS by sweeping candidate coalitions in
/// size-then-lexicographic order.
pub fn verify_group(
    game: &Game,
    partition: &Partition,
    notion: Notion,
    mode: Mode,
    options: &VerifyOptions,
) -> Result<Verdict> {
    check_inputs(game, partition)?;
    let query = StabilityQuery::new(notion, mode);
    let n = game.agent_count();
    match notion {
        Notion::Cs | Notion::Scs => {
            if n > options.coalition_cap {
                return Err(Error::TooManyCoalitions {
                    agents: n,
                    cap: options.coalition_cap,
                });
            }
            let weak = notion == Notion::Scs;
            let all = SizeLexSubsets::new((0..n).collect(), n);
            let blocker = match mode {
                Mode::Necessary => {
                    let mut hit = all.filter(|&c| {
                        if weak {
                            possibly_weakly_blocks_mask(game, partition, c)
                        } else {
                            possibly_blocks_mask(game, partition, c)
                        }
                    });
                    hit.next()
                        .map(|c| (c, favouring(game, Coalition::from_mask(c))))
                }
                Mode::Possible => {
                    let r = aligned(game, partition);
                    let mut hit = all.filter(|&c| {
                        let blocks = blocks_under(game, partition, &r, c, weak);
                        debug_assert!(
                            !blocks
                                || if weak {
                                    necessarily_weakly_blocks_mask(game, partition, c)
                                } else {
                                    necessarily_blocks_mask(game, partition, c)
                                },
                            "blocking under the aligned resolution must be necessary"
                        );
                        blocks
                    });
                    hit.next().map(|c| (c, r.clone()))
                }
            };
            Ok(match blocker {
                None => Verdict::stable(query),
                Some((c, resolution)) => Verdict::unstable(
                    query,
                    Witness::Blocking {
                        coalition: Coalition::from_mask(c),
                        resolution,
                        weak,
                    },
                ),
            })
        }
        Notion::Ins => {
            let largest = partition
                .coalitions()
                .iter()
                .map(|c| c.len())
                .max()
                .unwrap_or(0);
            if largest > options.coalition_cap {
                return Err(Error::TooManyCoalitions {
                    agents: largest,
                    cap: options.coalition_cap,
                });
            }
            let aligned_r = (mode == Mode::Possible).then(|| aligned(game, partition));
            for &whole in partition.coalitions() {
                let c = whole.mask();
                let splinter =
                    SizeLexSubsets::of_mask(c, whole.len().saturating_sub(1)).find(|&d| {
                        let rest = c & !d;
                        match &aligned_r {
                            Some(r) => Members(d).all(|i| game.resolved_value(r, i, rest) < 0),
                            None => Members(d).all(|i| possibly_prefers_splinter(game, i, rest)),
                        }
                    });
                if let Some(d) = splinter {
                    let resolution = match aligned_r {
                        Some(r) => r,
                        None => favouring(game, Coalition::from_mask(d)),
                    };
                    return Ok(Verdict::unstable(
                        query,
                        Witness::Blocking {
                            coalition: Coalition::from_mask(d),
                            resolution,
                            weak: false,
                        },
                    ));
                }
            }
            Ok(Verdict::stable(query))
        }
        _ => Err(Error::UnsupportedNotion {
            notion: notion.name(),
            routine: "verify_group",
        }),
    }
}

/// Whether some resolution makes `i` strictly prefer dropping `rest` from its
/// coalition. One known friend in `rest` outweighs everything else in a
/// friend-oriented game; in an enemy-oriented game one enemy or stranger in
/// `rest` suffices.
fn possibly_prefers_splinter(game: &Game, i: usize, rest: u64) -> bool {
    match game.orientation() {
        Orientation::FriendOriented => game.friend_mask(i) & rest == 0,
        Orientation::EnemyOriented => (game.enemy_mask(i) | game.stranger_mask(i)) & rest != 0,
    }
}

fn blocks_under(game: &Game, partition: &Partition, r: &Resolution, c: u64, weak: bool) -> bool {
    let margin = |i: usize| {
        let home = partition.mask_of(i);
        game.resolved_value(r, i, c & !home) - game.resolved_value(r, i, home & !c)
    };
    if weak {
        weak_margins(c, margin)
    } else {
        Members(c).all(|i| margin(i) > 0)
    }
}

/// Dispatches to [`verify_individual`] or [`verify_group`].
pub fn verify(
    game: &Game,
    partition: &Partition,
    query: StabilityQuery,
    options: &VerifyOptions,
) -> Result<Verdict> {
    if query.notion.is_individual() {
        verify_individual(game, partition, query.notion, query.mode)
    } else {
        verify_group(game, partition, query.notion, query.mode, options)
    }
}

/// Checks a witness against the definition of `notion` using
/// [`utility`] under the witness resolution: true iff it shows the partition
/// is not `notion`-stable under that resolution.
pub fn replay(
    game: &Game,
    partition: &Partition,
    notion: Notion,
    witness: &Witness,
) -> Result<bool> {
    check_inputs(game, partition)?;
    let u = |r: &Resolution, i: AgentId, c: Coalition| utility(game, r, i, c);
    match witness {
        Witness::Deviation {
            agent,
            target,
            resolution,
        } => {
            if !notion.is_individual() {
                return Ok(false);
            }
            let i = *agent;
            game.check_agent(i)?;
            let home = partition.coalition_of(i);
            if target.contains(i) || !(target.is_empty() || partition.contains_coalition(*target)) {
                return Ok(false);
            }
            let current = u(resolution, i, home)?;
            if notion == Notion::Ir {
                return Ok(target.is_empty() && current < 0);
            }
            if u(resolution, i, target.with(i))? <= current {
                return Ok(false);
            }
            if notion == Notion::Ns {
                return Ok(true);
            }
            for j in target.iter() {
                if u(resolution, j, target.with(i))? < u(resolution, j, *target)? {
                    return Ok(false);
                }
            }
            if notion == Notion::Cis {
                let remaining = home.without(i);
                for k in remaining.iter() {
                    if u(resolution, k, remaining)? < u(resolution, k, home)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Witness::Blocking {
            coalition,
            resolution,
            weak,
        } => {
            if coalition.is_empty() || notion.is_individual() {
                return Ok(false);
            }
            if notion == Notion::Ins {
                let home = partition.coalition_of(coalition.first().expect("non-empty"));
                if !coalition.is_subset(home) || *coalition == home {
                    return Ok(false);
                }
            }
            if *weak != (notion == Notion::Scs) {
                return Ok(false);
            }
            let mut strict = false;
            for i in coalition.iter() {
                let gain = u(resolution, i, *coalition)?;
                let now = u(resolution, i, partition.coalition_of(i))?;
                if gain < now || (!weak && gain == now) {
                    return Ok(false);
                }
                strict |= gain > now;
            }
            Ok(strict)
        }
    }
}
