//! Static support-graph stability check.
//!
//! This is a conservative heuristic, not a physics simulation: a structure is
//! reported stable when every block is connected to the ground through
//! resting contacts and every block's center lies over the span of the
//! contacts holding it up. Torque carried through chains of blocks is not
//! modelled.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use crate::level::Structure;

/// Maximum vertical gap between faces that still counts as resting contact.
pub const CONTACT_EPSILON: f64 = 0.02;
/// Minimum horizontal overlap for a contact.
pub const MIN_CONTACT_WIDTH: f64 = 0.01;
/// Slack added on each side of the support span in the balance check.
pub const BALANCE_SLACK: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Supporter {
    Ground,
    Block(usize),
}

impl fmt::Display for Supporter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Supporter::Ground => f.write_str("ground"),
            Supporter::Block(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportContact {
    pub supporter: Supporter,
    pub supported: usize,
    pub x0: f64,
    pub x1: f64,
}

/// All resting contacts, ordered by supported block then supporter.
pub fn build_support_graph(structure: &Structure) -> Vec<SupportContact> {
    let blocks = &structure.blocks;
    let mut contacts = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        if b.bottom().abs() <= CONTACT_EPSILON {
            contacts.push(SupportContact {
                supporter: Supporter::Ground,
                supported: i,
                x0: b.left(),
                x1: b.right(),
            });
        }
        for (j, s) in blocks.iter().enumerate() {
            if i == j || (s.top() - b.bottom()).abs() > CONTACT_EPSILON {
                continue;
            }
            let x0 = b.left().max(s.left());
            let x1 = b.right().min(s.right());
            if x1 - x0 >= MIN_CONTACT_WIDTH {
                contacts.push(SupportContact {
                    supporter: Supporter::Block(j),
                    supported: i,
                    x0,
                    x1,
                });
            }
        }
    }
    contacts
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// Blocks with no chain of contacts down to the ground.
    pub floating: Vec<usize>,
    /// Supported blocks whose center lies outside their support span.
    pub unbalanced: Vec<usize>,
    pub contacts: Vec<SupportContact>,
}

impl StabilityReport {
    /// Human-readable multi-line summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stable: {}", if self.stable { "yes" } else { "no" });
        let _ = writeln!(out, "floating blocks: {}", join(&self.floating));
        let _ = writeln!(out, "unbalanced blocks: {}", join(&self.unbalanced));
        let _ = writeln!(out, "contacts: {}", self.contacts.len());
        for c in &self.contacts {
            let _ = writeln!(
                out,
                "  {} -> {} over [{:.4}, {:.4}]",
                c.supporter, c.supported, c.x0, c.x1
            );
        }
        out
    }

    /// Single `key=value` record.
    pub fn to_record(&self) -> String {
        format!(
            "stable={} floating={} unbalanced={} contacts={}",
            self.stable,
            join(&self.floating),
            join(&self.unbalanced),
            self.contacts.len()
        )
    }
}

fn join(ids: &[usize]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn check_stability(structure: &Structure) -> StabilityReport {
    let n = structure.blocks.len();
    let contacts = build_support_graph(structure);

    let mut grounded = vec![false; n];
    let mut queue = VecDeque::new();
    for c in &contacts {
        if c.supporter == Supporter::Ground && !grounded[c.supported] {
            grounded[c.supported] = true;
            queue.push_back(c.supported);
        }
    }
    while let Some(j) = queue.pop_front() {
        for c in &contacts {
            if c.supporter == Supporter::Block(j) && !grounded[c.supported] {
                grounded[c.supported] = true;
                queue.push_back(c.supported);
            }
        }
    }
    let floating: Vec<usize> = (0..n).filter(|&i| !grounded[i]).collect();

    let mut span = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for c in &contacts {
        let s = &mut span[c.supported];
        s.0 = s.0.min(c.x0);
        s.1 = s.1.max(c.x1);
    }
    let unbalanced: Vec<usize> = (0..n)
        .filter(|&i| {
            let (lo, hi) = span[i];
            let cx = structure.blocks[i].cx;
            lo <= hi && (cx < lo - BALANCE_SLACK || cx > hi + BALANCE_SLACK)
        })
        .collect();

    StabilityReport {
        stable: floating.is_empty() && unbalanced.is_empty(),
        floating,
        unbalanced,
        contacts,
    }
}
