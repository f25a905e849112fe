//! Small games shared by the unit tests.

use proptest::prelude::*;

use crate::model::{Game, GameBuilder, Orientation, RelationKind};

/// Two agents who are strangers to each other.
pub fn mutual_strangers_pair(orientation: Orientation) -> Game {
    GameBuilder::new(orientation, 2)
        .symmetric(true)
        .with_mutual(0, 1, RelationKind::Stranger)
        .build()
        .unwrap()
}

/// Enemy-oriented, agent 1 friends with 2 and 3, who are strangers.
pub fn star_with_stranger_leaves() -> Game {
    GameBuilder::new(Orientation::EnemyOriented, 3)
        .symmetric(true)
        .with_mutual(0, 1, RelationKind::Friend)
        .with_mutual(0, 2, RelationKind::Friend)
        .with_mutual(1, 2, RelationKind::Stranger)
        .build()
        .unwrap()
}

/// Friend pairs 1–2 and 4–5 with agent 3 a stranger to 2 and 4.
pub fn two_pairs_with_bridge(orientation: Orientation) -> Game {
    GameBuilder::new(orientation, 5)
        .symmetric(true)
        .with_mutual(0, 1, RelationKind::Friend)
        .with_mutual(3, 4, RelationKind::Friend)
        .with_mutual(1, 2, RelationKind::Stranger)
        .with_mutual(2, 3, RelationKind::Stranger)
        .fill_unset(RelationKind::Enemy)
        .build()
        .unwrap()
}

fn kind(k: u8) -> RelationKind {
    match k {
        0 => RelationKind::Friend,
        1 => RelationKind::Enemy,
        _ => RelationKind::Stranger,
    }
}

fn assemble(
    orientation: Orientation,
    n: usize,
    symmetric: bool,
    kinds: &[u8],
    max_strangers: usize,
) -> Game {
    let mut draft = GameBuilder::new(orientation, n).symmetric(symmetric);
    let mut budget = max_strangers;
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let mut rel = kind(kinds[k % kinds.len()]);
            k += 1;
            if rel == RelationKind::Stranger {
                if budget == 0 {
                    rel = RelationKind::Enemy;
                } else {
                    budget -= 1;
                }
            }
            if symmetric {
                draft.set_mutual(i, j, rel);
            } else {
                draft.set(i, j, rel);
            }
        }
    }
    draft.build().unwrap()
}

fn arb_orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![
        Just(Orientation::FriendOriented),
        Just(Orientation::EnemyOriented)
    ]
}

/// Random games with `1..=max_n` agents and at most `max_bits` free stranger
/// choices (extra strangers are demoted to enemies).
pub fn arb_game_limited(max_n: usize, max_bits: usize) -> impl Strategy<Value = Game> {
    (
        arb_orientation(),
        1..=max_n,
        any::<bool>(),
        proptest::collection::vec(0u8..3, max_n * max_n),
    )
        .prop_map(move |(o, n, sym, kinds)| assemble(o, n, sym, &kinds, max_bits))
}

pub fn arb_game(max_n: usize) -> impl Strategy<Value = Game> {
    arb_game_limited(max_n, usize::MAX)
}

pub fn arb_game_with(max_n: usize, orientation: Orientation) -> impl Strategy<Value = Game> {
    (
        1..=max_n,
        any::<bool>(),
        proptest::collection::vec(0u8..3, max_n * max_n),
    )
        .prop_map(move |(n, sym, kinds)| assemble(orientation, n, sym, &kinds, usize::MAX))
}
