use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Sorts and merges overlapping intervals. Endpoints closer than `1e-12`
/// relative to the overall scale are treated as touching, so identical
/// intervals collapse to one.
pub fn merge_intervals(intervals: &[Interval]) -> Vec<Interval> {
    let mut v: Vec<Interval> = intervals.iter().copied().filter(|i| i.hi >= i.lo).collect();
    if v.is_empty() {
        return v;
    }
    v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let scale = v
        .iter()
        .map(|i| i.lo.abs().max(i.hi.abs()))
        .fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for i in v {
        match out.last_mut() {
            Some(last) if i.lo <= last.hi + tol => last.hi = last.hi.max(i.hi),
            _ => out.push(i),
        }
    }
    out
}

/// Lebesgue measure of the union.
pub fn union_measure(intervals: &[Interval]) -> f64 {
    merge_intervals(intervals).iter().map(Interval::width).sum()
}
