use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::AffineMap;
use crate::roots::cmp_complex;
use crate::serde_complex;

const MAP_DEDUP: f64 = 1e-10;
const POINT_DEDUP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Closure {
    pub elements: Vec<AffineMap>,
    /// Set when the cap was reached before the closure was complete.
    pub truncated: bool,
}

/// Subgroup generated by `generators`, identity first, in breadth-first
/// order. Stops at `cap` elements and flags truncation if more exist.
pub fn group_closure(generators: &[AffineMap], cap: usize) -> Closure {
    let cap = cap.max(1);
    let moves = with_inverses(generators);
    let mut elements = vec![AffineMap::identity()];
    let mut queue = VecDeque::from([AffineMap::identity()]);
    while let Some(g) = queue.pop_front() {
        for m in &moves {
            let h = m.compose(&g);
            if elements.iter().any(|e| e.approx_eq(&h, MAP_DEDUP)) {
                continue;
            }
            if elements.len() == cap {
                return Closure {
                    elements,
                    truncated: true,
                };
            }
            elements.push(h);
            queue.push_back(h);
        }
    }
    Closure {
        elements,
        truncated: false,
    }
}

fn with_inverses(generators: &[AffineMap]) -> Vec<AffineMap> {
    let mut moves: Vec<AffineMap> = Vec::with_capacity(2 * generators.len());
    for g in generators {
        let g = AffineMap::new(g.angle, g.b);
        for m in [g, g.invert()] {
            if !moves.iter().any(|e| e.approx_eq(&m, MAP_DEDUP)) {
                moves.push(m);
            }
        }
    }
    moves
}

fn serialize_distance<S: Serializer>(d: &f64, s: S) -> Result<S::Ok, S::Error> {
    if d.is_finite() {
        s.serialize_f64(*d)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    #[serde(with = "serde_complex")]
    pub base: Complex64,
    #[serde(serialize_with = "serde_complex::vec::serialize")]
    pub points: Vec<Complex64>,
    pub generators: Vec<AffineMap>,
    pub depth: usize,
    /// `+∞` for a single point; serialized as `null`.
    #[serde(serialize_with = "serialize_distance")]
    pub min_pairwise_distance: f64,
}

/// Images of `z` under words of length at most `depth` in the generators
/// and their inverses, deduplicated and sorted.
pub fn orbit(z: Complex64, generators: &[AffineMap], depth: usize) -> OrbitReport {
    let moves = with_inverses(generators);
    let mut points = vec![z];
    let mut frontier = vec![z];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &w in &frontier {
            for m in &moves {
                let image = m.apply(w);
                if points.iter().all(|p| (p - image).norm() > POINT_DEDUP) {
                    points.push(image);
                    next.push(image);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    points.sort_by(cmp_complex);
    OrbitReport {
        base: z,
        min_pairwise_distance: min_pairwise_distance(&points),
        points,
        generators: generators.to_vec(),
        depth,
    }
}

pub fn min_pairwise_distance(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}
