//! Seeded workload generators. Every trace is a pure function of
//! `(mode, n, seed)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::Op;
use crate::geom::Point;

/// Radius of the sampling disk.
pub const DISK_RADIUS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `n` insertions.
    Incremental,
    /// `n` insertions, then all `n` points deleted in random order.
    Decremental,
    /// `n` insertions randomly interleaved with deletions of uniformly chosen
    /// live points.
    Mixed,
    /// `n` points on a circle, then `n` rounds that delete a random live
    /// point and insert a fresh one on the same circle.
    Churn,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Incremental, Mode::Decremental, Mode::Mixed, Mode::Churn];

    /// Index of the first operation of the measured phase.
    pub fn measured_from(self, n: usize) -> usize {
        match self {
            Mode::Decremental => n,
            _ => 0,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Incremental => "incremental",
            Mode::Decremental => "decremental",
            Mode::Mixed => "mixed",
            Mode::Churn => "churn",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode {s:?} (expected incremental, decremental, mixed or churn)"))
    }
}

fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> (i64, i64) {
    let r = radius * rng.random::<f64>().sqrt();
    let t = TAU * rng.random::<f64>();
    ((r * t.cos()).round() as i64, (r * t.sin()).round() as i64)
}

fn on_circle(rng: &mut ChaCha8Rng, radius: f64) -> (i64, i64) {
    let t = TAU * rng.random::<f64>();
    ((radius * t.cos()).round() as i64, (radius * t.sin()).round() as i64)
}

pub fn generate(mode: Mode, n: usize, seed: u64) -> Vec<Op> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Vec::new();
    let mut next_id = 0u64;
    let mut insert = |ops: &mut Vec<Op>, (x, y): (i64, i64)| {
        ops.push(Op::Insert(Point::new(next_id, x, y)));
        next_id += 1;
        next_id - 1
    };
    match mode {
        Mode::Incremental => {
            for _ in 0..n {
                let p = in_disk(&mut rng, DISK_RADIUS);
                insert(&mut ops, p);
            }
        }
        Mode::Decremental => {
            let mut ids: Vec<u64> = (0..n).map(|_| {
                let p = in_disk(&mut rng, DISK_RADIUS);
                insert(&mut ops, p)
            }).collect();
            ids.shuffle(&mut rng);
            ops.extend(ids.into_iter().map(Op::Delete));
        }
        Mode::Mixed => {
            let mut live: Vec<u64> = Vec::new();
            let mut inserted = 0;
            while inserted < n {
                if live.is_empty() || rng.random_bool(2.0 / 3.0) {
                    let p = in_disk(&mut rng, DISK_RADIUS);
                    live.push(insert(&mut ops, p));
                    inserted += 1;
                } else {
                    let i = rng.random_range(0..live.len());
                    ops.push(Op::Delete(live.swap_remove(i)));
                }
            }
        }
        Mode::Churn => {
            let mut live: Vec<u64> = (0..n).map(|_| {
                let p = on_circle(&mut rng, DISK_RADIUS);
                insert(&mut ops, p)
            }).collect();
            for _ in 0..n {
                let i = rng.random_range(0..live.len());
                ops.push(Op::Delete(live.swap_remove(i)));
                let p = on_circle(&mut rng, DISK_RADIUS);
                live.push(insert(&mut ops, p));
            }
        }
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::format_trace;
    use std::collections::HashSet;

    fn live_after(ops: &[Op]) -> usize {
        let mut live = HashSet::new();
        for op in ops {
            match op {
                Op::Insert(p) => assert!(live.insert(p.id), "duplicate id"),
                Op::Delete(id) => assert!(live.remove(id), "dead id"),
            }
        }
        live.len()
    }

    #[test]
    fn deterministic_per_seed() {
        for mode in Mode::ALL {
            let a = format_trace(&generate(mode, 10, 42));
            assert_eq!(a, format_trace(&generate(mode, 10, 42)));
            assert_ne!(a, format_trace(&generate(mode, 10, 43)));
        }
    }

    #[test]
    fn shapes() {
        let inc = generate(Mode::Incremental, 100, 1);
        assert_eq!((inc.len(), live_after(&inc)), (100, 100));
        let dec = generate(Mode::Decremental, 100, 1);
        assert_eq!((dec.len(), live_after(&dec)), (200, 0));
        let mixed = generate(Mode::Mixed, 100, 1);
        assert_eq!(mixed.iter().filter(|o| matches!(o, Op::Insert(_))).count(), 100);
        live_after(&mixed);
        let churn = generate(Mode::Churn, 100, 1);
        assert_eq!((churn.len(), live_after(&churn)), (300, 100));
    }

    #[test]
    fn points_stay_in_disk() {
        for op in generate(Mode::Incremental, 1000, 7) {
            if let Op::Insert(p) = op {
                let r2 = (p.x * p.x + p.y * p.y) as f64;
                assert!(r2.sqrt() <= DISK_RADIUS + 1.0);
            }
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.to_string().parse::<Mode>(), Ok(m));
        }
        assert!("sideways".parse::<Mode>().is_err());
    }
}
