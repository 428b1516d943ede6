//! Greedy argmax-and-suppress placement over a selection ranking.

use std::cmp::Ordering;

use super::ranking::SelectionRanking;
use super::Kernel;

/// One greedy pick: kernel layer, bottom-left anchor and its score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pick {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub hit: f64,
}

/// Outcome of a greedy run, with the number of strictly positive ranking
/// entries left after each iteration.
#[derive(Clone, Debug, Default)]
pub struct GreedyTrace {
    pub picks: Vec<Pick>,
    pub initial_positive: usize,
    pub positive_after: Vec<usize>,
}

impl GreedyTrace {
    pub fn iterations(&self) -> usize {
        self.positive_after.len()
    }
}

/// Anchor offsets `q - p` at which kernel `b` anchored at `q` shares a cell
/// with kernel `a` anchored at `p`.
fn conflict_offsets(a: &Kernel, b: &Kernel) -> Vec<(isize, isize)> {
    if a.is_rectangle() && b.is_rectangle() {
        let mut out = Vec::new();
        for dr in -(b.height as isize) + 1..a.height as isize {
            for dc in -(b.width as isize) + 1..a.width as isize {
                out.push((dr, dc));
            }
        }
        return out;
    }
    let mut out: Vec<(isize, isize)> = a
        .cells
        .iter()
        .flat_map(|&(ar, ac)| {
            b.cells
                .iter()
                .map(move |&(br, bc)| (ar as isize - br as isize, ac as isize - bc as isize))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Runs the greedy loop: repeatedly take the highest-valued placement, then
/// zero every placement whose kernel would share a cell with it, until no
/// positive value remains.
///
/// Ties on value prefer the larger kernel area, then the lower row, the lower
/// column and the lower layer index.
pub fn greedy_select(ranking: &SelectionRanking) -> GreedyTrace {
    let (width, height) = (ranking.width(), ranking.height());
    let plane = width * height;
    let kernels = ranking.kernels();
    let mut values = ranking.values().to_vec();

    let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
    let key = |i: usize| {
        let layer = i / plane;
        let rest = i % plane;
        (
            values[i],
            kernels[layer].area(),
            rest / width,
            rest % width,
            layer,
        )
    };
    order.sort_by(|&a, &b| {
        let (va, aa, ra, ca, la) = key(a);
        let (vb, ab, rb, cb, lb) = key(b);
        vb.partial_cmp(&va)
            .unwrap_or(Ordering::Equal)
            .then(ab.cmp(&aa))
            .then(ra.cmp(&rb))
            .then(ca.cmp(&cb))
            .then(la.cmp(&lb))
    });

    let conflicts: Vec<Vec<Vec<(isize, isize)>>> = kernels
        .iter()
        .map(|a| kernels.iter().map(|b| conflict_offsets(a, b)).collect())
        .collect();

    let mut trace = GreedyTrace {
        initial_positive: order.len(),
        ..GreedyTrace::default()
    };
    let mut positive = order.len();
    for &i in &order {
        if values[i] <= 0.0 {
            continue;
        }
        let layer = i / plane;
        let (row, col) = ((i % plane) / width, (i % plane) % width);
        trace.picks.push(Pick {
            layer,
            row,
            col,
            value: values[i],
            hit: ranking.hit(layer, row, col),
        });
        for (other, offsets) in conflicts[layer].iter().enumerate() {
            for &(dr, dc) in offsets {
                let (r, c) = (row as isize + dr, col as isize + dc);
                if r < 0 || c < 0 || r >= height as isize || c >= width as isize {
                    continue;
                }
                let j = other * plane + r as usize * width + c as usize;
                if values[j] > 0.0 {
                    values[j] = 0.0;
                    positive -= 1;
                }
            }
        }
        trace.positive_after.push(positive);
    }
    trace
}
