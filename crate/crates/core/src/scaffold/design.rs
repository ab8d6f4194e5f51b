//! Checking a designed maze against lesson requirements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::interp::execute_actions;
use crate::maze::Maze;
use crate::solver::{is_solvable_within, Limits, SolveError, UnsolvableReason, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignRequirements {
    pub required_width: u32,
    pub required_height: u32,
    pub min_gems: usize,
    pub min_monsters: usize,
    /// Distinct kinds among gem, heart, obstacle and each monster kind.
    pub min_asset_kinds: usize,
    pub must_be_solvable: bool,
}

impl Default for DesignRequirements {
    fn default() -> Self {
        DesignRequirements {
            required_width: 8,
            required_height: 8,
            min_gems: 1,
            min_monsters: 2,
            min_asset_kinds: 3,
            must_be_solvable: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Summary of the shortest solution found for a solvable maze.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub path_length: usize,
    /// Lowest health along the route. Any extra damage of at least this
    /// much would kill the avatar.
    pub health_margin: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub checks: Vec<DesignCheck>,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub unsolvable: Option<UnsolvableReason>,
}

impl DesignReport {
    pub fn check(&self, name: &str) -> Option<&DesignCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Asset kinds present: "gem", "heart", "obstacle" and monster kind names.
pub fn asset_kinds(m: &Maze) -> BTreeSet<&'static str> {
    let mut kinds = BTreeSet::new();
    if !m.gems().is_empty() {
        kinds.insert("gem");
    }
    if !m.hearts().is_empty() {
        kinds.insert("heart");
    }
    if !m.obstacles().is_empty() {
        kinds.insert("obstacle");
    }
    for (_, k) in m.monsters() {
        kinds.insert(k.name());
    }
    kinds
}

pub fn check_design(m: &Maze, req: &DesignRequirements) -> DesignReport {
    check_design_within(m, req, &Limits::none()).expect("no deadline set")
}

/// Every check runs, whatever the earlier ones found.
pub fn check_design_within(
    m: &Maze,
    req: &DesignRequirements,
    limits: &Limits,
) -> Result<DesignReport, SolveError> {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(DesignCheck {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let (w, h) = (m.width(), m.height());
    let size_ok = (w, h) == (req.required_width, req.required_height);
    push(
        "size",
        size_ok,
        if size_ok {
            format!("{w}×{h}")
        } else {
            format!("expected {}×{}, found {w}×{h}", req.required_width, req.required_height)
        },
    );
    let gems = m.gems().len();
    push(
        "min_gems",
        gems >= req.min_gems,
        format!("found {gems}, need at least {}", req.min_gems),
    );
    let monsters = m.monsters().len();
    push(
        "min_monsters",
        monsters >= req.min_monsters,
        format!("found {monsters}, need at least {}", req.min_monsters),
    );
    let kinds = asset_kinds(m);
    push(
        "min_asset_kinds",
        kinds.len() >= req.min_asset_kinds,
        format!(
            "found {} ({}), need at least {}",
            kinds.len(),
            kinds.iter().copied().collect::<Vec<_>>().join(", "),
            req.min_asset_kinds
        ),
    );

    let mut witness = None;
    let mut unsolvable = None;
    if req.must_be_solvable {
        match is_solvable_within(m, limits)? {
            Verdict::Solvable(actions) => {
                let trace = execute_actions(&actions, m);
                let margin = trace.states.iter().map(|s| s.health).min().unwrap_or(m.initial_health());
                witness = Some(Witness {
                    path_length: actions.len(),
                    health_margin: margin,
                });
                push(
                    "solvable",
                    true,
                    format!("shortest route has {} actions, lowest health {margin}", actions.len()),
                );
            }
            Verdict::Unsolvable(reason) => {
                unsolvable = Some(reason);
                let why = match reason {
                    UnsolvableReason::NoPath => "the goal cannot be reached with every gem",
                    UnsolvableReason::HealthInfeasible => "every route runs out of health",
                };
                push("solvable", false, format!("{reason}: {why}"));
            }
        }
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(DesignReport {
        checks,
        passed,
        witness,
        unsolvable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::Dir;

    fn classroom() -> Maze {
        Maze::from_picture(
            "S . . . . . . .\n\
             . # # . # # . .\n\
             . . * . . b . .\n\
             . # # # . # # .\n\
             . . . + . . . .\n\
             # # . # # d # .\n\
             . . . . . . * .\n\
             . # # # . # . G",
            Dir::East,
        )
        .unwrap()
    }

    #[test]
    fn classroom_maze_passes() {
        let r = check_design(&classroom(), &DesignRequirements::default());
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.len(), 5);
        let w = r.witness.unwrap();
        assert!(w.health_margin > 0);
        assert_eq!(r.check("size").unwrap().detail, "8×8");
    }

    #[test]
    fn small_maze_fails_size_only_among_failures() {
        let m = Maze::from_picture("S . .\n. * .\n. b G", Dir::East).unwrap();
        let r = check_design(&m, &DesignRequirements::default());
        assert!(!r.passed);
        let size = r.check("size").unwrap();
        assert!(!size.passed);
        assert_eq!(size.detail, "expected 8×8, found 3×3");
        // later checks still ran
        assert!(r.check("solvable").unwrap().passed);
    }

    #[test]
    fn walled_goal() {
        let mut b = classroom().to_builder();
        b.obstacle(crate::maze::Pos { x: 6, y: 7 });
        b.obstacle(crate::maze::Pos { x: 7, y: 6 });
        let r = check_design(&b.build().unwrap(), &DesignRequirements::default());
        assert_eq!(r.unsolvable, Some(UnsolvableReason::NoPath));
        assert!(r.check("solvable").unwrap().detail.starts_with("NoPath"));
    }

    #[test]
    fn solvability_optional() {
        let m = Maze::from_picture("S # G", Dir::East).unwrap();
        let req = DesignRequirements {
            required_width: 3,
            required_height: 1,
            min_gems: 0,
            min_monsters: 0,
            min_asset_kinds: 1,
            must_be_solvable: false,
        };
        let r = check_design(&m, &req);
        assert!(r.passed);
        assert!(r.check("solvable").is_none());
    }
}
