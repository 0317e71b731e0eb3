//! Trace execution: CSV reports, oracle verification and timing runs.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineConfig, EngineError, Op, WidthEngine, WidthReport};
use crate::gen::{generate, Mode};
use crate::geom::{Coord, SquaredDistance};
use crate::oracle::calipers_width;
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("operation {op_index}: {source}")]
pub struct RunError {
    pub op_index: usize,
    pub source: EngineError,
}

/// One CSV row per executed operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub op_index: usize,
    pub op_kind: char,
    pub width_sq_num: String,
    pub width_sq_den: String,
    pub width_float: f64,
    pub k: usize,
    pub corners_added: usize,
    pub corners_removed: usize,
    pub sides_added: usize,
    pub sides_removed: usize,
    pub time_ns: u64,
}

impl BenchRecord {
    pub fn new(op_index: usize, op: &Op, r: &WidthReport) -> Self {
        let (num, den) = r.width_sq.reduced().expect("width is finite");
        BenchRecord {
            op_index,
            op_kind: match op {
                Op::Insert(_) => 'I',
                Op::Delete(_) => 'D',
            },
            width_sq_num: num.to_string(),
            width_sq_den: den.to_string(),
            width_float: r.width,
            k: r.k(),
            corners_added: r.diff.corners_added,
            corners_removed: r.diff.corners_removed,
            sides_added: r.diff.sides_added,
            sides_removed: r.diff.sides_removed,
            time_ns: r.time_ns,
        }
    }
}

/// Executes `ops` on a fresh engine. With `timing` off every `time_ns` is 0,
/// which makes the output a pure function of the trace.
pub fn run_trace(ops: &[Op], config: EngineConfig, timing: bool) -> Result<Vec<BenchRecord>, RunError> {
    let mut engine = WidthEngine::new(config);
    ops.iter()
        .enumerate()
        .map(|(i, op)| {
            let mut r = engine.apply(*op).map_err(|source| RunError { op_index: i, source })?;
            if !timing {
                r.time_ns = 0;
            }
            Ok(BenchRecord::new(i, op, &r))
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("CSV into memory");
    buf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub op_index: usize,
    pub engine: SquaredDistance,
    pub oracle: SquaredDistance,
}

/// Operations per oracle work unit in [`verify_trace`].
const CHUNK: usize = 64;

fn step(live: &mut BTreeMap<u64, Coord>, op: &Op) {
    match op {
        Op::Insert(p) => {
            live.insert(p.id, p.coord());
        }
        Op::Delete(id) => {
            live.remove(id);
        }
    }
}

/// Calipers width of the live set after every operation. The trace is cut
/// into chunks that replay independently from a snapshot of the live set.
pub fn oracle_widths(ops: &[Op], exec: Execution) -> Vec<SquaredDistance> {
    let mut starts = Vec::new();
    let mut live = BTreeMap::new();
    for (i, op) in ops.iter().enumerate() {
        if i % CHUNK == 0 {
            starts.push((i, live.clone()));
        }
        step(&mut live, op);
    }
    let chunks = par::map(&starts, exec, |(from, snapshot)| {
        let mut live = snapshot.clone();
        let to = (from + CHUNK).min(ops.len());
        ops[*from..to]
            .iter()
            .map(|op| {
                step(&mut live, op);
                let pts: Vec<Coord> = live.values().copied().collect();
                calipers_width(&pts).width_sq
            })
            .collect::<Vec<_>>()
    });
    chunks.into_iter().flatten().collect()
}

/// Replays `ops` on the engine and compares its width after every operation
/// with the calipers oracle. Returns the first disagreement.
pub fn verify_trace(ops: &[Op], config: EngineConfig, exec: Execution) -> Result<Option<Mismatch>, RunError> {
    let mut engine = WidthEngine::new(config);
    let mut widths = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let r = engine.apply(*op).map_err(|source| RunError { op_index: i, source })?;
        widths.push(r.width_sq);
    }
    let reference = oracle_widths(ops, exec);
    Ok(widths
        .into_iter()
        .zip(reference)
        .enumerate()
        .find(|(_, (e, o))| e != o)
        .map(|(op_index, (engine, oracle))| Mismatch { op_index, engine, oracle }))
}

/// Timing summary of one trace size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub mode: String,
    pub n: usize,
    pub repeats: usize,
    pub measured_ops: usize,
    pub total_ns: u64,
    pub amortized_ns: f64,
    pub sum_k: usize,
    pub max_k: usize,
    pub naive_ns_per_op: f64,
    pub speedup: f64,
    pub slope: f64,
}

/// Live sets at which the naive baseline is timed.
const NAIVE_SAMPLES: usize = 16;

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

/// Estimated cost per operation of recomputing the width from scratch,
/// timed on evenly spaced live sets of the measured phase.
pub fn naive_ns_per_op(ops: &[Op], measured_from: usize) -> f64 {
    let measured = ops.len() - measured_from;
    if measured == 0 {
        return 0.0;
    }
    let stride = measured.div_ceil(NAIVE_SAMPLES).max(1);
    let mut live = BTreeMap::new();
    let (mut total, mut samples) = (0u128, 0u32);
    for (i, op) in ops.iter().enumerate() {
        step(&mut live, op);
        if i >= measured_from && (i - measured_from).is_multiple_of(stride) {
            let pts: Vec<Coord> = live.values().copied().collect();
            let t = Instant::now();
            std::hint::black_box(calipers_width(&pts));
            total += t.elapsed().as_nanos();
            samples += 1;
        }
    }
    total as f64 / samples as f64
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |(n, d), &(x, y)| (n + (x - mx) * (y - my), d + (x - mx) * (x - mx)));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Times the engine on generated traces of each size. Traces for repeat `r`
/// use seed `seed + r`; the reported time is the median over repeats.
pub fn bench(mode: Mode, sizes: &[usize], repeats: usize, seed: u64, config: EngineConfig) -> Result<Vec<BenchRow>, RunError> {
    let repeats = repeats.max(1);
    let mut rows = Vec::new();
    for &n in sizes {
        let from = mode.measured_from(n);
        let mut times = Vec::new();
        let (mut sum_k, mut max_k, mut measured_ops, mut naive) = (0, 0, 0, 0.0);
        for r in 0..repeats {
            let ops = generate(mode, n, seed + r as u64);
            let mut engine = WidthEngine::new(config);
            let mut apply = |i: usize, op: &Op| engine.apply(*op).map_err(|source| RunError { op_index: i, source });
            for (i, op) in ops[..from].iter().enumerate() {
                apply(i, op)?;
            }
            let (mut k_total, mut k_max) = (0, 0);
            let start = Instant::now();
            for (i, op) in ops.iter().enumerate().skip(from) {
                let k = apply(i, op)?.k();
                k_total += k;
                k_max = k_max.max(k);
            }
            times.push(start.elapsed().as_nanos() as u64);
            sum_k = sum_k.max(k_total);
            max_k = max_k.max(k_max);
            measured_ops = ops.len() - from;
            if r == 0 {
                naive = naive_ns_per_op(&ops, from);
            }
        }
        let total_ns = median(times);
        let amortized_ns = total_ns as f64 / measured_ops.max(1) as f64;
        rows.push(BenchRow {
            mode: mode.to_string(),
            n,
            repeats,
            measured_ops,
            total_ns,
            amortized_ns,
            sum_k,
            max_k,
            naive_ns_per_op: naive,
            speedup: naive / amortized_ns,
            slope: 0.0,
        });
    }
    let fit: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.amortized_ns)).collect();
    let slope = log_log_slope(&fit);
    for r in &mut rows {
        r.slope = slope;
    }
    Ok(rows)
}
