//! Maze data model and the JSON maze document format.
//!
//! Coordinates are `(x, y)` with `y` growing southward. Entity lists are kept
//! sorted in row-major `(y, x)` order; the position of an entity in its list
//! is its bit index in the simulator's collection masks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::MazeError;

pub const MAX_GEMS: usize = 16;
pub const MAX_HEARTS: usize = 8;
pub const MAX_MONSTERS: usize = 16;
/// Largest accepted side length of a maze.
pub const MAX_SIDE: u32 = 64;

pub const DEFAULT_INITIAL_HEALTH: i32 = 100;
pub const DEFAULT_HEART_HEAL: i32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn offset(self, dir: Dir) -> Pos {
        let (dx, dy) = dir.delta();
        Pos::new(self.x + dx, self.y + dy)
    }
}

impl Ord for Pos {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Pos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Facing direction of the avatar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "N")]
    North,
    #[serde(rename = "E")]
    East,
    #[serde(rename = "S")]
    South,
    #[serde(rename = "W")]
    West,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::North => (0, -1),
            Dir::East => (1, 0),
            Dir::South => (0, 1),
            Dir::West => (-1, 0),
        }
    }

    pub fn left(self) -> Dir {
        Dir::ALL[(self.index() + 3) % 4]
    }

    pub fn right(self) -> Dir {
        Dir::ALL[(self.index() + 1) % 4]
    }

    pub fn back(self) -> Dir {
        Dir::ALL[(self.index() + 2) % 4]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Dir::North => 'N',
            Dir::East => 'E',
            Dir::South => 'S',
            Dir::West => 'W',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonsterKind {
    Bat,
    Ghost,
    SkeletonArcher,
    Dragon,
}

impl MonsterKind {
    pub const ALL: [MonsterKind; 4] = [
        MonsterKind::Bat,
        MonsterKind::Ghost,
        MonsterKind::SkeletonArcher,
        MonsterKind::Dragon,
    ];

    /// Health lost when defeating this monster, before any maze override.
    pub fn base_damage(self) -> i32 {
        match self {
            MonsterKind::Bat => 20,
            MonsterKind::Ghost => 40,
            MonsterKind::SkeletonArcher => 20,
            MonsterKind::Dragon => 60,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MonsterKind::Bat => "bat",
            MonsterKind::Ghost => "ghost",
            MonsterKind::SkeletonArcher => "skeleton_archer",
            MonsterKind::Dragon => "dragon",
        }
    }

    pub fn from_name(name: &str) -> Option<MonsterKind> {
        MonsterKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for MonsterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeConfig {
    pub initial_health: i32,
    pub heart_heal: i32,
    pub damage_overrides: BTreeMap<MonsterKind, i32>,
}

impl Default for MazeConfig {
    fn default() -> Self {
        MazeConfig {
            initial_health: DEFAULT_INITIAL_HEALTH,
            heart_heal: DEFAULT_HEART_HEAL,
            damage_overrides: BTreeMap::new(),
        }
    }
}

/// What occupies a single cell. Indices refer to the maze's entity lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Obstacle,
    Gem(u8),
    Heart(u8),
    Monster(u8),
}

/// A validated maze. Construct through [`MazeBuilder`] or [`parse_maze`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maze {
    width: u32,
    height: u32,
    obstacles: BTreeSet<Pos>,
    gems: Vec<Pos>,
    hearts: Vec<Pos>,
    monsters: Vec<(Pos, MonsterKind)>,
    start: Pos,
    start_dir: Dir,
    goal: Pos,
    config: MazeConfig,
    cells: Vec<Cell>,
}

impl Maze {
    pub fn builder(width: u32, height: u32) -> MazeBuilder {
        MazeBuilder::new(width, height)
    }

    /// Builds a maze from a compact text picture, one row per line.
    ///
    /// Legend: `S` start, `G` goal, `#` obstacle, `*` gem, `+` heart,
    /// `b` bat, `h` ghost, `k` skeleton archer, `d` dragon, `.` empty.
    /// Spaces are ignored, so `"S b . G"` and `"Sb.G"` describe the same row.
    pub fn from_picture(picture: &str, start_dir: Dir) -> Result<Maze, MazeError> {
        let rows: Vec<Vec<char>> = picture
            .lines()
            .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<Vec<_>>())
            .filter(|r| !r.is_empty())
            .collect();
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        let mut b = MazeBuilder::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            if row.len() as u32 != width {
                return Err(MazeError::schema(
                    "picture",
                    None,
                    format!("row {y} has {} cells, expected {width}", row.len()),
                ));
            }
            for (x, &c) in row.iter().enumerate() {
                let p = Pos::new(x as i32, y as i32);
                match c {
                    '.' => {}
                    'S' => {
                        b.start(p, start_dir);
                    }
                    'G' => {
                        b.goal(p);
                    }
                    '#' => {
                        b.obstacle(p);
                    }
                    '*' => {
                        b.gem(p);
                    }
                    '+' => {
                        b.heart(p);
                    }
                    'b' => {
                        b.monster(p, MonsterKind::Bat);
                    }
                    'h' => {
                        b.monster(p, MonsterKind::Ghost);
                    }
                    'k' => {
                        b.monster(p, MonsterKind::SkeletonArcher);
                    }
                    'd' => {
                        b.monster(p, MonsterKind::Dragon);
                    }
                    other => {
                        return Err(MazeError::schema(
                            "picture",
                            Some(p),
                            format!("unknown cell symbol {other:?}"),
                        ))
                    }
                }
            }
        }
        b.build()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn start(&self) -> Pos {
        self.start
    }

    pub fn start_dir(&self) -> Dir {
        self.start_dir
    }

    pub fn goal(&self) -> Pos {
        self.goal
    }

    pub fn obstacles(&self) -> &BTreeSet<Pos> {
        &self.obstacles
    }

    pub fn gems(&self) -> &[Pos] {
        &self.gems
    }

    pub fn hearts(&self) -> &[Pos] {
        &self.hearts
    }

    pub fn monsters(&self) -> &[(Pos, MonsterKind)] {
        &self.monsters
    }

    pub fn config(&self) -> &MazeConfig {
        &self.config
    }

    pub fn initial_health(&self) -> i32 {
        self.config.initial_health
    }

    pub fn heart_heal(&self) -> i32 {
        self.config.heart_heal
    }

    /// Damage dealt by `kind` in this maze, honouring document overrides.
    pub fn damage(&self, kind: MonsterKind) -> i32 {
        self.config
            .damage_overrides
            .get(&kind)
            .copied()
            .unwrap_or_else(|| kind.base_damage())
    }

    pub fn monster_damage(&self, index: usize) -> i32 {
        self.damage(self.monsters[index].1)
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as u32) < self.width && (p.y as u32) < self.height
    }

    /// Contents of `p`; out-of-bounds cells read as obstacles.
    pub fn cell(&self, p: Pos) -> Cell {
        if !self.in_bounds(p) {
            return Cell::Obstacle;
        }
        self.cells[self.cell_index(p)]
    }

    pub fn cell_index(&self, p: Pos) -> usize {
        p.y as usize * self.width as usize + p.x as usize
    }

    pub fn full_gem_mask(&self) -> u16 {
        mask_of(self.gems.len()) as u16
    }

    /// SHA-256 over the canonical document, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(serialize_maze(self).as_bytes()))
    }

    pub fn to_builder(&self) -> MazeBuilder {
        MazeBuilder {
            width: self.width,
            height: self.height,
            start: Some((self.start, self.start_dir)),
            goal: Some(self.goal),
            obstacles: self.obstacles.iter().copied().collect(),
            gems: self.gems.clone(),
            hearts: self.hearts.clone(),
            monsters: self.monsters.clone(),
            config: self.config.clone(),
        }
    }
}

pub(crate) fn mask_of(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Collects maze parts and validates them in [`MazeBuilder::build`].
#[derive(Debug, Clone)]
pub struct MazeBuilder {
    width: u32,
    height: u32,
    start: Option<(Pos, Dir)>,
    goal: Option<Pos>,
    obstacles: Vec<Pos>,
    gems: Vec<Pos>,
    hearts: Vec<Pos>,
    monsters: Vec<(Pos, MonsterKind)>,
    config: MazeConfig,
}

impl MazeBuilder {
    pub fn new(width: u32, height: u32) -> Self {
        MazeBuilder {
            width,
            height,
            start: None,
            goal: None,
            obstacles: Vec::new(),
            gems: Vec::new(),
            hearts: Vec::new(),
            monsters: Vec::new(),
            config: MazeConfig::default(),
        }
    }

    pub fn start(&mut self, p: Pos, dir: Dir) -> &mut Self {
        self.start = Some((p, dir));
        self
    }

    pub fn goal(&mut self, p: Pos) -> &mut Self {
        self.goal = Some(p);
        self
    }

    pub fn obstacle(&mut self, p: Pos) -> &mut Self {
        self.obstacles.push(p);
        self
    }

    pub fn gem(&mut self, p: Pos) -> &mut Self {
        self.gems.push(p);
        self
    }

    pub fn heart(&mut self, p: Pos) -> &mut Self {
        self.hearts.push(p);
        self
    }

    pub fn monster(&mut self, p: Pos, kind: MonsterKind) -> &mut Self {
        self.monsters.push((p, kind));
        self
    }

    pub fn initial_health(&mut self, hp: i32) -> &mut Self {
        self.config.initial_health = hp;
        self
    }

    pub fn heart_heal(&mut self, hp: i32) -> &mut Self {
        self.config.heart_heal = hp;
        self
    }

    pub fn damage_override(&mut self, kind: MonsterKind, damage: i32) -> &mut Self {
        self.config.damage_overrides.insert(kind, damage);
        self
    }

    /// Removes every entity and obstacle at `p`.
    pub fn clear(&mut self, p: Pos) -> &mut Self {
        self.obstacles.retain(|&q| q != p);
        self.gems.retain(|&q| q != p);
        self.hearts.retain(|&q| q != p);
        self.monsters.retain(|&(q, _)| q != p);
        self
    }

    pub fn build(&self) -> Result<Maze, MazeError> {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 || w > MAX_SIDE || h > MAX_SIDE {
            return Err(MazeError::schema(
                "width",
                None,
                format!("maze size {w}×{h} outside 1..={MAX_SIDE}"),
            ));
        }
        let (start, start_dir) = self
            .start
            .ok_or_else(|| MazeError::schema("start", None, "missing start"))?;
        let goal = self
            .goal
            .ok_or_else(|| MazeError::schema("goal", None, "missing goal"))?;
        let in_bounds = |p: Pos| p.x >= 0 && p.y >= 0 && (p.x as u32) < w && (p.y as u32) < h;
        for (field, p) in [("start", start), ("goal", goal)] {
            if !in_bounds(p) {
                return Err(MazeError::schema(field, Some(p), "coordinate out of bounds"));
            }
        }
        if start == goal {
            return Err(MazeError::schema("goal", Some(goal), "goal coincides with start"));
        }

        let mut cells = vec![Cell::Empty; (w * h) as usize];
        let mut place = |field: &'static str, p: Pos, cell: Cell| -> Result<(), MazeError> {
            if !in_bounds(p) {
                return Err(MazeError::schema(field, Some(p), "coordinate out of bounds"));
            }
            let slot = &mut cells[p.y as usize * w as usize + p.x as usize];
            if *slot != Cell::Empty {
                return Err(MazeError::schema(
                    field,
                    Some(p),
                    "cell already holds another entity",
                ));
            }
            *slot = cell;
            Ok(())
        };

        let obstacles: BTreeSet<Pos> = self.obstacles.iter().copied().collect();
        let mut gems = self.gems.clone();
        gems.sort();
        let mut hearts = self.hearts.clone();
        hearts.sort();
        let mut monsters = self.monsters.clone();
        monsters.sort();

        if gems.len() > MAX_GEMS {
            return Err(MazeError::schema(
                "gems",
                None,
                format!("{} gems exceed the cap of {MAX_GEMS}", gems.len()),
            ));
        }
        if hearts.len() > MAX_HEARTS {
            return Err(MazeError::schema(
                "hearts",
                None,
                format!("{} hearts exceed the cap of {MAX_HEARTS}", hearts.len()),
            ));
        }
        if monsters.len() > MAX_MONSTERS {
            return Err(MazeError::schema(
                "monsters",
                None,
                format!("{} monsters exceed the cap of {MAX_MONSTERS}", monsters.len()),
            ));
        }

        if obstacles.len() != self.obstacles.len() {
            let dup = first_duplicate(&self.obstacles);
            return Err(MazeError::schema("obstacles", dup, "duplicate obstacle"));
        }
        for &p in &obstacles {
            place("obstacles", p, Cell::Obstacle)?;
        }
        for (i, &p) in gems.iter().enumerate() {
            place("gems", p, Cell::Gem(i as u8))?;
        }
        for (i, &p) in hearts.iter().enumerate() {
            place("hearts", p, Cell::Heart(i as u8))?;
        }
        for (i, &(p, _)) in monsters.iter().enumerate() {
            place("monsters", p, Cell::Monster(i as u8))?;
        }

        for (field, p) in [("start", start), ("goal", goal)] {
            match cells[p.y as usize * w as usize + p.x as usize] {
                Cell::Obstacle => {
                    return Err(MazeError::schema(field, Some(p), "cell holds an obstacle"))
                }
                Cell::Monster(_) => {
                    return Err(MazeError::schema(field, Some(p), "cell holds a monster"))
                }
                _ => {}
            }
        }

        if self.config.initial_health <= 0 {
            return Err(MazeError::schema(
                "config.initial_health",
                None,
                "initial health must be positive",
            ));
        }
        if self.config.heart_heal < 0 {
            return Err(MazeError::schema(
                "config.heart_heal",
                None,
                "heart heal must not be negative",
            ));
        }
        if let Some((kind, _)) = self.config.damage_overrides.iter().find(|(_, &d)| d < 0) {
            return Err(MazeError::schema(
                "config.damage_overrides",
                None,
                format!("damage for {kind} must not be negative"),
            ));
        }

        Ok(Maze {
            width: w,
            height: h,
            obstacles,
            gems,
            hearts,
            monsters,
            start,
            start_dir,
            goal,
            config: self.config.clone(),
            cells,
        })
    }
}

fn first_duplicate(ps: &[Pos]) -> Option<Pos> {
    let mut seen = BTreeSet::new();
    ps.iter().copied().find(|p| !seen.insert(*p))
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MazeDocument {
    width: i64,
    height: i64,
    start: StartDoc,
    goal: XyDoc,
    #[serde(default)]
    obstacles: Vec<XyDoc>,
    #[serde(default)]
    gems: Vec<XyDoc>,
    #[serde(default)]
    hearts: Vec<XyDoc>,
    #[serde(default)]
    monsters: Vec<MonsterDoc>,
    #[serde(default)]
    config: ConfigDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StartDoc {
    x: i64,
    y: i64,
    dir: Dir,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XyDoc {
    x: i64,
    y: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonsterDoc {
    x: i64,
    y: i64,
    kind: MonsterKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(default = "default_initial_health")]
    initial_health: i64,
    #[serde(default = "default_heart_heal")]
    heart_heal: i64,
    #[serde(default)]
    damage_overrides: BTreeMap<String, i64>,
}

impl Default for ConfigDoc {
    fn default() -> Self {
        ConfigDoc {
            initial_health: default_initial_health(),
            heart_heal: default_heart_heal(),
            damage_overrides: BTreeMap::new(),
        }
    }
}

fn default_initial_health() -> i64 {
    DEFAULT_INITIAL_HEALTH as i64
}

fn default_heart_heal() -> i64 {
    DEFAULT_HEART_HEAL as i64
}

fn to_pos(field: &str, x: i64, y: i64) -> Result<Pos, MazeError> {
    let conv = |v: i64| i32::try_from(v).ok();
    match (conv(x), conv(y)) {
        (Some(x), Some(y)) => Ok(Pos::new(x, y)),
        _ => Err(MazeError::schema(
            field,
            None,
            format!("coordinate ({x}, {y}) out of bounds"),
        )),
    }
}

fn to_i32(field: &str, v: i64) -> Result<i32, MazeError> {
    i32::try_from(v).map_err(|_| MazeError::schema(field, None, format!("value {v} out of range")))
}

/// Parses a maze document and validates every maze invariant.
pub fn parse_maze(document: &str) -> Result<Maze, MazeError> {
    let doc: MazeDocument = serde_json::from_str(document).map_err(MazeError::from_json)?;
    let dim = |field: &str, v: i64| -> Result<u32, MazeError> {
        u32::try_from(v)
            .ok()
            .filter(|&v| (1..=MAX_SIDE).contains(&v))
            .ok_or_else(|| MazeError::schema(field, None, format!("{field} {v} outside 1..={MAX_SIDE}")))
    };
    let mut b = MazeBuilder::new(dim("width", doc.width)?, dim("height", doc.height)?);
    b.start(to_pos("start", doc.start.x, doc.start.y)?, doc.start.dir);
    b.goal(to_pos("goal", doc.goal.x, doc.goal.y)?);
    for o in &doc.obstacles {
        b.obstacle(to_pos("obstacles", o.x, o.y)?);
    }
    for g in &doc.gems {
        b.gem(to_pos("gems", g.x, g.y)?);
    }
    for h in &doc.hearts {
        b.heart(to_pos("hearts", h.x, h.y)?);
    }
    for m in &doc.monsters {
        b.monster(to_pos("monsters", m.x, m.y)?, m.kind);
    }
    b.initial_health(to_i32("config.initial_health", doc.config.initial_health)?);
    b.heart_heal(to_i32("config.heart_heal", doc.config.heart_heal)?);
    for (name, &dmg) in &doc.config.damage_overrides {
        let kind = MonsterKind::from_name(name).ok_or_else(|| {
            MazeError::schema(
                "config.damage_overrides",
                None,
                format!("unknown monster kind {name:?}"),
            )
        })?;
        b.damage_override(kind, to_i32("config.damage_overrides", dmg)?);
    }
    b.build()
}

/// Canonical pretty-printed JSON: fixed key order, entities sorted by `(y, x)`.
pub fn serialize_maze(m: &Maze) -> String {
    let xy = |p: &Pos| XyDoc { x: p.x as i64, y: p.y as i64 };
    let doc = MazeDocument {
        width: m.width as i64,
        height: m.height as i64,
        start: StartDoc {
            x: m.start.x as i64,
            y: m.start.y as i64,
            dir: m.start_dir,
        },
        goal: xy(&m.goal),
        obstacles: m.obstacles.iter().map(xy).collect(),
        gems: m.gems.iter().map(xy).collect(),
        hearts: m.hearts.iter().map(xy).collect(),
        monsters: m
            .monsters
            .iter()
            .map(|(p, kind)| MonsterDoc {
                x: p.x as i64,
                y: p.y as i64,
                kind: *kind,
            })
            .collect(),
        config: ConfigDoc {
            initial_health: m.config.initial_health as i64,
            heart_heal: m.config.heart_heal as i64,
            damage_overrides: m
                .config
                .damage_overrides
                .iter()
                .map(|(k, &d)| (k.name().to_string(), d as i64))
                .collect(),
        },
    };
    serde_json::to_string_pretty(&doc).expect("maze document serializes")
}

impl fmt::Display for Maze {
    /// Renders the maze using the [`Maze::from_picture`] legend.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for y in 0..self.height as i32 {
            let row: String = (0..self.width as i32)
                .map(|x| {
                    let p = Pos::new(x, y);
                    if p == self.start {
                        return 'S';
                    }
                    if p == self.goal {
                        return 'G';
                    }
                    match self.cell(p) {
                        Cell::Empty => '.',
                        Cell::Obstacle => '#',
                        Cell::Gem(_) => '*',
                        Cell::Heart(_) => '+',
                        Cell::Monster(i) => match self.monsters[i as usize].1 {
                            MonsterKind::Bat => 'b',
                            MonsterKind::Ghost => 'h',
                            MonsterKind::SkeletonArcher => 'k',
                            MonsterKind::Dragon => 'd',
                        },
                    }
                })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
