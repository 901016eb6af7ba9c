//! Commutative-monoid aggregation for campaign runs: sign counts, tracked
//! extremes with reproducible digests, and a deterministic bottom-k row
//! subsample. Merging partial aggregates is associative and commutative
//! (ties broken by sample index), so results cannot depend on how samples
//! were partitioned across workers.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::deltas::{DeltaInputs, DeltaReport};

/// What produced an extreme value: always the sample index (with the master
/// seed this replays the sample), plus the spectrum triples when available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub sample_index: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<DeltaInputs>,
}

/// Sign counts and extremes for one named quantity.
#[derive(Debug, Clone, Serialize)]
pub struct QuantityStats {
    pub negative: u64,
    pub zero: u64,
    pub positive: u64,
    pub min_value: f64,
    pub min_input_digest: Option<InputDigest>,
    pub max_value: f64,
    #[serde(skip)]
    min_index: u64,
    #[serde(skip)]
    max_index: u64,
}

impl Default for QuantityStats {
    fn default() -> Self {
        Self {
            negative: 0,
            zero: 0,
            positive: 0,
            min_value: f64::INFINITY,
            min_input_digest: None,
            max_value: f64::NEG_INFINITY,
            min_index: u64::MAX,
            max_index: u64::MAX,
        }
    }
}

impl QuantityStats {
    /// Classify one observation. Values below −cut count negative, within
    /// ±cut zero, above +cut positive; infinities join the sign counts but
    /// never the tracked extremes.
    pub fn observe(&mut self, index: u64, value: f64, inputs: Option<&DeltaInputs>, cut: f64) {
        if value < -cut {
            self.negative += 1;
        } else if value <= cut {
            self.zero += 1;
        } else {
            self.positive += 1;
        }
        if !value.is_finite() {
            return;
        }
        if value < self.min_value || (value == self.min_value && index < self.min_index) {
            self.min_value = value;
            self.min_index = index;
            self.min_input_digest = Some(InputDigest {
                sample_index: index,
                inputs: inputs.cloned(),
            });
        }
        if value > self.max_value || (value == self.max_value && index < self.max_index) {
            self.max_value = value;
            self.max_index = index;
        }
    }

    pub fn merge(&mut self, other: QuantityStats) {
        self.negative += other.negative;
        self.zero += other.zero;
        self.positive += other.positive;
        if other.min_value < self.min_value
            || (other.min_value == self.min_value && other.min_index < self.min_index)
        {
            self.min_value = other.min_value;
            self.min_index = other.min_index;
            self.min_input_digest = other.min_input_digest;
        }
        if other.max_value > self.max_value
            || (other.max_value == self.max_value && other.max_index < self.max_index)
        {
            self.max_value = other.max_value;
            self.max_index = other.max_index;
        }
    }

    pub fn total(&self) -> u64 {
        self.negative + self.zero + self.positive
    }
}

/// One row retained for CSV/plot output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetainedRow {
    pub index: u64,
    pub report: DeltaReport,
}

#[derive(Debug, Clone)]
struct RetEntry {
    priority: u64,
    row: RetainedRow,
}

impl PartialEq for RetEntry {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority && self.row.index == other.row.index
    }
}
impl Eq for RetEntry {}
impl PartialOrd for RetEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for RetEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.priority, self.row.index).cmp(&(other.priority, other.row.index))
    }
}

/// Bottom-k sample keyed by retention priority. A max-heap of size ≤ cap
/// holds the current k smallest keys; merging pushes one heap into the
/// other.
#[derive(Debug, Clone)]
pub struct Retainer {
    cap: usize,
    heap: BinaryHeap<RetEntry>,
}

impl Retainer {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            heap: BinaryHeap::new(),
        }
    }

    pub fn offer(&mut self, priority: u64, row: RetainedRow) {
        if self.cap == 0 {
            return;
        }
        let entry = RetEntry { priority, row };
        if self.heap.len() < self.cap {
            self.heap.push(entry);
        } else if let Some(top) = self.heap.peek() {
            if entry < *top {
                self.heap.pop();
                self.heap.push(entry);
            }
        }
    }

    pub fn merge(&mut self, other: Retainer) {
        for entry in other.heap.into_vec() {
            self.offer(entry.priority, entry.row);
        }
    }

    /// Rows in sample-index order.
    pub fn finish(self) -> Vec<RetainedRow> {
        let mut rows: Vec<RetainedRow> = self.heap.into_vec().into_iter().map(|e| e.row).collect();
        rows.sort_by_key(|r| r.index);
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::rng::retention_priority;
    use crate::entropy::Spectrum;
    use crate::marginal::QubitMarginTriple;

    fn dummy_row(index: u64) -> RetainedRow {
        let t = QubitMarginTriple::new(Spectrum::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(), 0.3, 0.4)
            .unwrap();
        let report = crate::deltas::compute_deltas(&t, &t).unwrap();
        RetainedRow { index, report }
    }

    #[test]
    fn stats_classification_and_extremes() {
        let mut s = QuantityStats::default();
        s.observe(0, -1e-3, None, 1e-12);
        s.observe(1, 5e-13, None, 1e-12);
        s.observe(2, 2.0, None, 1e-12);
        s.observe(3, f64::INFINITY, None, 1e-12);
        assert_eq!((s.negative, s.zero, s.positive), (1, 1, 2));
        assert_eq!(s.min_value, -1e-3);
        assert_eq!(s.max_value, 2.0);
        assert_eq!(s.min_input_digest.as_ref().unwrap().sample_index, 0);
        assert_eq!(s.total(), 4);
    }

    #[test]
    fn merge_is_partition_invariant() {
        let values = [(0u64, 0.5), (1, -0.25), (2, 0.1), (3, -0.25), (4, 0.9)];
        let mut whole = QuantityStats::default();
        for &(i, v) in &values {
            whole.observe(i, v, None, 1e-12);
        }
        let mut left = QuantityStats::default();
        let mut right = QuantityStats::default();
        for &(i, v) in &values {
            if i % 2 == 0 {
                left.observe(i, v, None, 1e-12);
            } else {
                right.observe(i, v, None, 1e-12);
            }
        }
        // Note both partitions saw a −0.25; the lower index must win.
        left.merge(right);
        assert_eq!(left.min_value, whole.min_value);
        assert_eq!(left.min_index, whole.min_index);
        assert_eq!(left.negative, whole.negative);
    }

    #[test]
    fn retainer_keeps_bottom_k_regardless_of_partition() {
        let n = 500u64;
        let cap = 50;
        let mut single = Retainer::new(cap);
        for i in 0..n {
            single.offer(retention_priority(9, i), dummy_row(i));
        }
        let mut a = Retainer::new(cap);
        let mut b = Retainer::new(cap);
        for i in 0..n {
            let target = if i < 200 { &mut a } else { &mut b };
            target.offer(retention_priority(9, i), dummy_row(i));
        }
        a.merge(b);
        let lhs: Vec<u64> = single.finish().iter().map(|r| r.index).collect();
        let rhs: Vec<u64> = a.finish().iter().map(|r| r.index).collect();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.len(), cap);
    }
}
