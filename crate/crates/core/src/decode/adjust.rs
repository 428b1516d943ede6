use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::level::{Structure, OVERLAP_EPSILON};

pub const MAX_SWEEPS: usize = 1000;

/// Pushes blocks up or to the right until no two blocks interpenetrate.
///
/// For each overlapping pair, either the block with the higher center is
/// raised above the other or the block with the center further right is moved
/// right of it, whichever displacement is smaller; the move clears the other
/// block by [`OVERLAP_EPSILON`]. Pairs are visited bottom-to-top, then
/// left-to-right, by their original centers. Structures without overlaps come
/// back unchanged.
pub fn adjust_overlaps(structure: &Structure) -> Result<Structure> {
    let mut out = structure.clone();
    let blocks = &mut out.blocks;
    if blocks
        .iter()
        .any(|b| !(b.cx.is_finite() && b.cy.is_finite()))
    {
        return Err(Error::Adjustment {
            sweeps: 0,
            pairs: Vec::new(),
        });
    }

    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (&blocks[a], &blocks[b]);
        a.cy.partial_cmp(&b.cy)
            .unwrap_or(Ordering::Equal)
            .then(a.cx.partial_cmp(&b.cx).unwrap_or(Ordering::Equal))
    });

    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[..pos] {
                if !blocks[j].interpenetrates(&blocks[i]) {
                    continue;
                }
                let (lower, upper) = if blocks[j].cy <= blocks[i].cy {
                    (j, i)
                } else {
                    (i, j)
                };
                let (left, right) = if blocks[j].cx <= blocks[i].cx {
                    (j, i)
                } else {
                    (i, j)
                };
                let up = blocks[lower].top() - blocks[upper].bottom() + OVERLAP_EPSILON;
                let across = blocks[left].right() - blocks[right].left() + OVERLAP_EPSILON;
                if across < up {
                    blocks[right].cx += across;
                } else {
                    blocks[upper].cy += up;
                }
                moved = true;
            }
        }
        if !moved {
            return Ok(out);
        }
    }
    Err(Error::Adjustment {
        sweeps: MAX_SWEEPS,
        pairs: out.overlapping_pairs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::{Block, BlockType, Material, Orientation};

    fn sq(x: f64, y: f64) -> Block {
        Block::new(
            BlockType::SquareSmall,
            Material::Wood,
            Orientation::Horizontal,
            x,
            y,
        )
    }

    #[test]
    fn clean_structure_unchanged() {
        let s = Structure::new(
            vec![sq(0.0, 0.215), sq(0.43, 0.215), sq(0.0, 0.645)],
            vec![],
        );
        assert_eq!(adjust_overlaps(&s).unwrap(), s);
    }

    #[test]
    fn raises_upper_square() {
        let s = Structure::new(vec![sq(0.0, 0.215), sq(0.0, 0.635)], vec![]);
        let out = adjust_overlaps(&s).unwrap();
        assert_eq!(out.blocks[0], s.blocks[0]);
        let lift = out.blocks[1].cy - 0.635;
        assert!((lift - 0.01).abs() < 1e-5, "lift {lift}");
        assert_eq!(out.blocks[1].cx, 0.0);
        assert!(out.overlapping_pairs().is_empty());
    }

    #[test]
    fn pushes_side_neighbour_right() {
        let s = Structure::new(vec![sq(0.0, 0.215), sq(0.42, 0.215)], vec![]);
        let out = adjust_overlaps(&s).unwrap();
        assert!((out.blocks[1].cx - 0.43).abs() < 1e-5);
        assert_eq!(out.blocks[1].cy, 0.215);
    }

    #[test]
    fn cascading_stack_resolves() {
        // each block sinks 0.02 into the one below
        let s = Structure::new(
            vec![sq(0.0, 0.215), sq(0.01, 0.625), sq(-0.01, 1.035)],
            vec![],
        );
        let out = adjust_overlaps(&s).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                let (dx, dy) = out.blocks[i].overlap_depths(&out.blocks[j]);
                assert!(dx <= OVERLAP_EPSILON || dy <= OVERLAP_EPSILON);
            }
        }
        for w in out.blocks.windows(2) {
            assert!(w[1].bottom() >= w[0].top() - 1e-6);
            assert!(w[1].cy > w[0].cy);
        }
    }

    #[test]
    fn order_is_preserved() {
        let s = Structure::new(
            vec![
                sq(0.0, 0.215),
                sq(0.42, 0.215),
                sq(0.84, 0.215),
                sq(0.2, 0.63),
            ],
            vec![],
        );
        let out = adjust_overlaps(&s).unwrap();
        assert!(out.blocks[0].cx < out.blocks[1].cx && out.blocks[1].cx < out.blocks[2].cx);
        assert!(out.blocks[3].cy > out.blocks[0].cy);
        assert!(out.overlapping_pairs().is_empty());
    }

    #[test]
    fn non_finite_is_an_error() {
        let s = Structure::new(vec![sq(f64::NAN, 0.2)], vec![]);
        assert!(matches!(adjust_overlaps(&s), Err(Error::Adjustment { .. })));
    }
}
