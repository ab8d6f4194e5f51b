//! Seeded random mazes for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::maze::{Dir, Maze, MazeBuilder, MonsterKind, Pos};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub min_side: u32,
    pub max_side: u32,
    pub max_gems: usize,
    pub max_monsters: usize,
    pub max_hearts: usize,
    /// Chance that a free cell becomes an obstacle.
    pub obstacle_density: f64,
    /// Initial health is drawn from this list.
    pub health_choices: Vec<i32>,
}

impl CorpusSpec {
    /// Up to 5×5, at most 2 gems, 2 monsters and 1 heart.
    pub fn small() -> Self {
        CorpusSpec {
            min_side: 1,
            max_side: 5,
            max_gems: 2,
            max_monsters: 2,
            max_hearts: 1,
            obstacle_density: 0.2,
            health_choices: vec![100, 100, 100, 60, 40],
        }
    }

    /// Exactly 8×8 with the lesson's usual entity mix.
    pub fn classroom() -> Self {
        CorpusSpec {
            min_side: 8,
            max_side: 8,
            max_gems: 3,
            max_monsters: 3,
            max_hearts: 2,
            obstacle_density: 0.2,
            health_choices: vec![100],
        }
    }
}

const KINDS: [MonsterKind; 4] = [
    MonsterKind::Bat,
    MonsterKind::Ghost,
    MonsterKind::SkeletonArcher,
    MonsterKind::Dragon,
];

/// One random maze. Entities never share a cell; solvability is not
/// guaranteed.
pub fn random_maze<R: Rng>(rng: &mut R, spec: &CorpusSpec) -> Maze {
    loop {
        let w = rng.random_range(spec.min_side..=spec.max_side);
        let h = rng.random_range(spec.min_side..=spec.max_side);
        if w * h < 2 {
            continue;
        }
        let mut cells: Vec<Pos> = (0..h as i32)
            .flat_map(|y| (0..w as i32).map(move |x| Pos { x, y }))
            .collect();
        cells.shuffle(rng);
        let mut free = cells.into_iter();
        let mut b = MazeBuilder::new(w, h);
        let dir = [Dir::North, Dir::East, Dir::South, Dir::West][rng.random_range(0..4)];
        b.start(free.next().unwrap(), dir);
        b.goal(free.next().unwrap());
        for _ in 0..rng.random_range(0..=spec.max_gems) {
            if let Some(p) = free.next() {
                b.gem(p);
            }
        }
        for _ in 0..rng.random_range(0..=spec.max_monsters) {
            if let Some(p) = free.next() {
                b.monster(p, KINDS[rng.random_range(0..KINDS.len())]);
            }
        }
        for _ in 0..rng.random_range(0..=spec.max_hearts) {
            if let Some(p) = free.next() {
                b.heart(p);
            }
        }
        for p in free {
            if rng.random_bool(spec.obstacle_density) {
                b.obstacle(p);
            }
        }
        if let Some(&hp) = spec.health_choices.get(rng.random_range(0..spec.health_choices.len().max(1))) {
            b.initial_health(hp);
        }
        if let Ok(m) = b.build() {
            return m;
        }
    }
}

/// `n` mazes from a fixed seed; the same arguments give the same corpus.
pub fn corpus(seed: u64, n: usize, spec: &CorpusSpec) -> Vec<Maze> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_maze(&mut rng, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::serialize_maze;

    #[test]
    fn seeded_corpus_repeats() {
        let a: Vec<String> = corpus(7, 20, &CorpusSpec::small()).iter().map(serialize_maze).collect();
        let b: Vec<String> = corpus(7, 20, &CorpusSpec::small()).iter().map(serialize_maze).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn respects_caps() {
        for m in corpus(1, 200, &CorpusSpec::small()) {
            assert!(m.width() <= 5 && m.height() <= 5);
            assert!(m.gems().len() <= 2 && m.monsters().len() <= 2 && m.hearts().len() <= 1);
        }
        for m in corpus(2, 10, &CorpusSpec::classroom()) {
            assert_eq!((m.width(), m.height()), (8, 8));
        }
    }
}
