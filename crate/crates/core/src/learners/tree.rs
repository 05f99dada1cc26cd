//! CART-style decision trees.
//!
//! Splits minimise the weighted sum of squared errors of the children. For
//! 0/1 targets this is exactly half the weighted Gini impurity, so the same
//! builder serves regression (variance reduction) and binary classification
//! (Gini). Leaves store the weighted target mean, which for classification is
//! the fraction of class-1 samples.

use std::cell::RefCell;
use std::rc::Rc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dataset::ColumnIndex;
use crate::domain::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                Node::Leaf { .. } => return id,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if x[feature as usize] <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.leaf_value(self.leaf_index(x))
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push((left as usize, d + 1));
                stack.push((right as usize, d + 1));
            }
        }
        best
    }

    pub(crate) fn leaf_value(&self, id: usize) -> f64 {
        match self.nodes[id] {
            Node::Leaf { value } => value,
            Node::Split { .. } => f64::NAN,
        }
    }

    pub(crate) fn set_leaf_value(&mut self, id: usize, v: f64) {
        if let Node::Leaf { value } = &mut self.nodes[id] {
            *value = v;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Number of non-constant features inspected per node.
    pub max_features: usize,
}

/// Largest number of bins per feature.
pub const MAX_BINS: usize = 256;

/// Nodes with at most this many rows are split by sorting their bin codes
/// instead of through a histogram.
const SMALL_NODE: usize = 64;
const LOCAL: u32 = 0xffff;

/// Features discretised into at most `max_bins` ordered bins.
///
/// A feature with no more distinct values than bins gets one bin per value,
/// which makes split search exact. Otherwise consecutive distinct values are
/// grouped into bins of roughly equal row count and thresholds can only fall
/// between bins.
#[derive(Debug, Clone)]
pub(crate) struct Binned {
    codes: Vec<Vec<u8>>,
    /// Smallest and largest training value in each bin.
    lo: Vec<Vec<f64>>,
    hi: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    total_bins: usize,
}

impl Binned {
    pub(crate) fn new(index: &ColumnIndex, max_bins: usize) -> Self {
        let max_bins = max_bins.clamp(2, MAX_BINS);
        let n = index.n_rows;
        let n_features = index.values.len();
        let mut codes = Vec::with_capacity(n_features);
        let mut lo = Vec::with_capacity(n_features);
        let mut hi = Vec::with_capacity(n_features);
        let mut offsets = Vec::with_capacity(n_features);
        let mut total_bins = 0;
        for f in 0..n_features {
            let values = &index.values[f];
            let mut distinct = 0;
            let mut prev = f64::NAN;
            for &v in values {
                if v != prev {
                    distinct += 1;
                    prev = v;
                    if distinct > max_bins {
                        break;
                    }
                }
            }
            let per_bin = if distinct <= max_bins { 1 } else { n.div_ceil(max_bins) };
            let ids = &index.ids[f];
            let mut code = vec![0u8; n];
            let (mut f_lo, mut f_hi) = (Vec::new(), Vec::new());
            let mut a = 0;
            while a < n {
                let mut b = (a + per_bin).min(n);
                while b < n && values[b] == values[b - 1] {
                    b += 1;
                }
                let c = f_lo.len() as u8;
                for &i in &ids[a..b] {
                    code[i as usize] = c;
                }
                f_lo.push(values[a]);
                f_hi.push(values[b - 1]);
                a = b;
            }
            offsets.push(total_bins);
            total_bins += f_lo.len();
            codes.push(code);
            lo.push(f_lo);
            hi.push(f_hi);
        }
        Binned {
            codes,
            lo,
            hi,
            offsets,
            total_bins,
        }
    }

    fn n_features(&self) -> usize {
        self.codes.len()
    }

    fn n_bins(&self, f: usize) -> usize {
        self.lo[f].len()
    }
}

struct Candidate {
    score: f64,
    feature: usize,
    /// Rows with a code up to and including this bin go left.
    bin: u8,
    threshold: f64,
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

/// Running left-hand sums while walking a feature's non-empty bins in order.
struct Scan {
    wl: f64,
    sl: f64,
    prev: Option<usize>,
    wsum: f64,
    ysum: f64,
    best: Option<(f64, usize, usize)>,
}

impl Scan {
    fn new(wsum: f64, ysum: f64) -> Self {
        Scan {
            wl: 0.0,
            sl: 0.0,
            prev: None,
            wsum,
            ysum,
            best: None,
        }
    }

    fn push(&mut self, bin: usize, w: f64, wy: f64) {
        if let Some(p) = self.prev {
            let wr = self.wsum - self.wl;
            let sr = self.ysum - self.sl;
            let score = self.sl * self.sl / self.wl + sr * sr / wr;
            if self.best.map_or(true, |b| score > b.0) {
                self.best = Some((score, p, bin));
            }
        }
        self.wl += w;
        self.sl += wy;
        self.prev = Some(bin);
    }
}

struct Task {
    id: usize,
    start: usize,
    end: usize,
    depth: usize,
    hist: Option<Vec<f64>>,
}

struct Grower<'a> {
    binned: &'a Binned,
    targets: &'a [f64],
    weight: Vec<f64>,
    clean: Vec<Vec<f64>>,
    dirty: Vec<Vec<f64>>,
    pairs: RefCell<Vec<(f64, f64)>>,
}

impl Grower<'_> {
    fn take_zeroed(&mut self) -> Vec<f64> {
        if let Some(h) = self.clean.pop() {
            return h;
        }
        match self.dirty.pop() {
            Some(mut h) => {
                h.fill(0.0);
                h
            }
            None => vec![0.0; 2 * (self.binned.total_bins + MAX_BINS)],
        }
    }

    /// Returns a histogram built from `rows` to the pool, clearing just the
    /// touched bins when that is cheaper than zeroing it later.
    fn release(&mut self, mut hist: Vec<f64>, rows: &[u32]) {
        if rows.len() * self.binned.n_features() * 4 >= hist.len() {
            self.dirty.push(hist);
            return;
        }
        for f in 0..self.binned.n_features() {
            let codes = &self.binned.codes[f];
            let h = &mut hist[2 * self.binned.offsets[f]..];
            for &r in rows {
                let b = 2 * codes[r as usize] as usize;
                h[b] = 0.0;
                h[b + 1] = 0.0;
            }
        }
        self.clean.push(hist);
    }

    /// Adds (`sign = 1`) or removes (`sign = -1`) rows from a histogram.
    fn accumulate(&self, hist: &mut [f64], rows: &[u32], sign: f64) {
        let mut pairs = self.pairs.borrow_mut();
        pairs.clear();
        pairs.extend(rows.iter().map(|r| {
            let w = sign * self.weight[*r as usize];
            (w, w * self.targets[*r as usize])
        }));
        for f in 0..self.binned.n_features() {
            let codes = &self.binned.codes[f];
            let start = 2 * self.binned.offsets[f];
            let h: &mut [f64; 2 * MAX_BINS] = (&mut hist[start..start + 2 * MAX_BINS])
                .try_into()
                .expect("histograms are padded");
            for (&r, &(w, wy)) in rows.iter().zip(pairs.iter()) {
                let b = 2 * codes[r as usize] as usize;
                h[b] += w;
                h[b + 1] += wy;
            }
        }
    }

    fn scan_hist(&self, hist: &[f64], f: usize, wsum: f64, ysum: f64) -> Scan {
        let mut scan = Scan::new(wsum, ysum);
        let h = &hist[2 * self.binned.offsets[f]..2 * (self.binned.offsets[f] + self.binned.n_bins(f))];
        for (b, pair) in h.chunks_exact(2).enumerate() {
            if pair[0] > 0.0 {
                scan.push(b, pair[0], pair[1]);
            }
        }
        scan
    }
}

/// Exact split search for small subtrees. The subtree's codes, targets and
/// weights are copied into compact local arrays and each feature gets a list
/// of `code << 16 | local row` entries sorted by code. Lists are partitioned
/// as nodes split, skipping features that are already constant in the node.
#[derive(Default)]
struct SmallTree {
    y: Vec<f64>,
    w: Vec<f64>,
    lists: Vec<u32>,
    scratch: Vec<u32>,
    goes_left: Vec<bool>,
}

#[derive(Clone, Copy)]
struct Stats {
    count: usize,
    wsum: f64,
    ysum: f64,
    ymin: f64,
    ymax: f64,
}

impl Stats {
    fn new() -> Self {
        Stats {
            count: 0,
            wsum: 0.0,
            ysum: 0.0,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, w: f64, y: f64) {
        self.count += 1;
        self.wsum += w;
        self.ysum += w * y;
        self.ymin = self.ymin.min(y);
        self.ymax = self.ymax.max(y);
    }

    fn is_leaf(&self, depth: usize, params: &TreeParams) -> bool {
        self.count < params.min_samples_split || self.ymin == self.ymax || params.max_depth.is_some_and(|d| depth >= d)
    }
}

struct SmallNode {
    id: usize,
    start: usize,
    end: usize,
    depth: usize,
    stats: Stats,
    active: Rc<Vec<u16>>,
}

impl SmallTree {
    #[allow(clippy::too_many_arguments)]
    fn grow(
        &mut self,
        g: &Grower<'_>,
        rows: &[u32],
        root: usize,
        root_depth: usize,
        nodes: &mut Vec<Node>,
        params: &TreeParams,
        order: &mut Vec<usize>,
        rng: &mut Rng,
    ) {
        let binned = g.binned;
        let n_features = binned.n_features();
        let m = rows.len();
        self.lists.clear();
        self.lists.resize(n_features * m, 0);
        for f in 0..n_features {
            let global = &binned.codes[f];
            let list = &mut self.lists[f * m..(f + 1) * m];
            for (slot, (k, r)) in list.iter_mut().zip(rows.iter().enumerate()) {
                *slot = (global[*r as usize] as u32) << 16 | k as u32;
            }
            list.sort_unstable();
        }
        self.y.clear();
        self.y.extend(rows.iter().map(|r| g.targets[*r as usize]));
        self.w.clear();
        self.w.extend(rows.iter().map(|r| g.weight[*r as usize]));
        self.scratch.resize(m, 0);
        self.goes_left.resize(m, false);

        let mut stats = Stats::new();
        for k in 0..m {
            stats.add(self.w[k], self.y[k]);
        }
        let mut stack = vec![SmallNode {
            id: root,
            start: 0,
            end: m,
            depth: root_depth,
            stats,
            active: Rc::new((0..n_features as u16).collect()),
        }];
        while let Some(node) = stack.pop() {
            let SmallNode {
                id,
                start: s,
                end: e,
                depth,
                stats,
                active,
            } = node;
            let value = stats.ysum / stats.wsum;
            if stats.is_leaf(depth, params) {
                nodes[id] = Node::Leaf { value };
                continue;
            }

            let max_features = params.max_features.clamp(1, n_features);
            order.clear();
            order.extend(active.iter().map(|f| *f as usize));
            let mut still_active = Vec::with_capacity(order.len());
            let mut best: Option<Candidate> = None;
            let mut visited = 0;
            for k in 0..order.len() {
                if visited >= max_features {
                    still_active.extend(order[k..].iter().map(|f| *f as u16));
                    break;
                }
                let j = rng.gen_range(k..order.len());
                order.swap(k, j);
                let f = order[k];
                let block = &self.lists[f * m + s..f * m + e];
                if block[0] >> 16 == block[block.len() - 1] >> 16 {
                    continue;
                }
                still_active.push(f as u16);
                let mut scan = Scan::new(stats.wsum, stats.ysum);
                let mut current = block[0] >> 16;
                let (mut w, mut wy) = (0.0, 0.0);
                for &entry in block {
                    let code = entry >> 16;
                    if code != current {
                        scan.push(current as usize, w, wy);
                        current = code;
                        w = 0.0;
                        wy = 0.0;
                    }
                    let r = (entry & LOCAL) as usize;
                    w += self.w[r];
                    wy += self.w[r] * self.y[r];
                }
                scan.push(current as usize, w, wy);
                let Some((score, left_bin, right_bin)) = scan.best else {
                    continue;
                };
                visited += 1;
                let better = best
                    .as_ref()
                    .map_or(true, |b| score > b.score || (score == b.score && f < b.feature));
                if better {
                    best = Some(Candidate {
                        score,
                        feature: f,
                        bin: left_bin as u8,
                        threshold: midpoint(binned.hi[f][left_bin], binned.lo[f][right_bin]),
                    });
                }
            }
            let Some(split) = best else {
                nodes[id] = Node::Leaf { value };
                continue;
            };

            let f = split.feature;
            let (mut ls, mut rs) = (Stats::new(), Stats::new());
            for &entry in &self.lists[f * m + s..f * m + e] {
                let k = (entry & LOCAL) as usize;
                let left = (entry >> 16) as u8 <= split.bin;
                self.goes_left[k] = left;
                if left {
                    ls.add(self.w[k], self.y[k]);
                } else {
                    rs.add(self.w[k], self.y[k]);
                }
            }
            let left = nodes.len();
            nodes.push(Node::Leaf {
                value: ls.ysum / ls.wsum,
            });
            nodes.push(Node::Leaf {
                value: rs.ysum / rs.wsum,
            });
            nodes[id] = Node::Split {
                feature: f as u32,
                threshold: split.threshold,
                left: left as u32,
                right: left as u32 + 1,
            };
            let left_open = !ls.is_leaf(depth + 1, params);
            let right_open = !rs.is_leaf(depth + 1, params);
            if !left_open && !right_open {
                continue;
            }
            for &f in still_active.iter() {
                let f = f as usize;
                let range = &mut self.lists[f * m + s..f * m + e];
                let mut write = 0;
                let mut spill = 0;
                for q in 0..range.len() {
                    let k = range[q];
                    let left = self.goes_left[(k & LOCAL) as usize];
                    range[write] = k;
                    self.scratch[spill] = k;
                    write += usize::from(left);
                    spill += usize::from(!left);
                }
                range[write..].copy_from_slice(&self.scratch[..spill]);
            }
            let mid = s + ls.count;
            let active = Rc::new(still_active);
            if right_open {
                stack.push(SmallNode {
                    id: left + 1,
                    start: mid,
                    end: e,
                    depth: depth + 1,
                    stats: rs,
                    active: Rc::clone(&active),
                });
            }
            if left_open {
                stack.push(SmallNode {
                    id: left,
                    start: s,
                    end: mid,
                    depth: depth + 1,
                    stats: ls,
                    active,
                });
            }
        }
    }
}

/// Grows a tree on the rows with positive weight.
pub(crate) fn grow(
    binned: &Binned,
    targets: &[f64],
    weights: Option<&[u32]>,
    params: &TreeParams,
    rng: &mut Rng,
) -> DecisionTree {
    let n_features = binned.n_features();
    let n = targets.len();
    let weight: Vec<f64> = match weights {
        Some(w) => w.iter().map(|c| f64::from(*c)).collect(),
        None => vec![1.0; n],
    };
    let mut rows: Vec<u32> = (0..n as u32).filter(|i| weight[*i as usize] > 0.0).collect();
    let m = rows.len();
    if m == 0 || n_features == 0 {
        return DecisionTree {
            nodes: vec![Node::Leaf { value: 0.0 }],
        };
    }
    let mut g = Grower {
        binned,
        targets,
        weight,
        clean: Vec::new(),
        dirty: Vec::new(),
        pairs: RefCell::new(Vec::new()),
    };
    let mut scratch: Vec<u32> = vec![0; m];
    let mut order: Vec<usize> = (0..n_features).collect();
    let max_features = params.max_features.clamp(1, n_features);

    let root_hist = (m > SMALL_NODE).then(|| {
        let mut h = g.take_zeroed();
        g.accumulate(&mut h, &rows, 1.0);
        h
    });
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut stack = vec![Task {
        id: 0,
        start: 0,
        end: m,
        depth: 0,
        hist: root_hist,
    }];
    let mut small = SmallTree::default();
    let mut small_order = Vec::new();
    while let Some(task) = stack.pop() {
        let Task {
            id,
            start: s,
            end: e,
            depth,
            hist,
        } = task;
        if hist.is_none() {
            small.grow(&g, &rows[s..e], id, depth, &mut nodes, params, &mut small_order, rng);
            continue;
        }
        let (mut wsum, mut ysum) = (0.0, 0.0);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in &rows[s..e] {
            let i = i as usize;
            let y = targets[i];
            wsum += g.weight[i];
            ysum += g.weight[i] * y;
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let value = ysum / wsum;
        let stop = e - s < params.min_samples_split || ymin == ymax || params.max_depth.is_some_and(|d| depth >= d);

        let mut best: Option<Candidate> = None;
        if !stop {
            let mut visited = 0;
            for k in 0..n_features {
                if visited >= max_features {
                    break;
                }
                let j = rng.gen_range(k..n_features);
                order.swap(k, j);
                let f = order[k];
                let scan = g.scan_hist(hist.as_ref().expect("large nodes carry a histogram"), f, wsum, ysum);
                let Some((score, left_bin, right_bin)) = scan.best else {
                    continue;
                };
                visited += 1;
                let better = best
                    .as_ref()
                    .map_or(true, |b| score > b.score || (score == b.score && f < b.feature));
                if better {
                    best = Some(Candidate {
                        score,
                        feature: f,
                        bin: left_bin as u8,
                        threshold: midpoint(binned.hi[f][left_bin], binned.lo[f][right_bin]),
                    });
                }
            }
        }

        let Some(split) = best else {
            nodes[id] = Node::Leaf { value };
            if let Some(h) = hist {
                g.release(h, &rows[s..e]);
            }
            continue;
        };

        let codes = &binned.codes[split.feature];
        let range = &mut rows[s..e];
        let mut write = 0;
        let mut spill = 0;
        for k in 0..range.len() {
            let i = range[k];
            if codes[i as usize] <= split.bin {
                range[write] = i;
                write += 1;
            } else {
                scratch[spill] = i;
                spill += 1;
            }
        }
        range[write..].copy_from_slice(&scratch[..spill]);
        let mid = s + write;

        let (small, large) = if mid - s <= e - mid {
            ((s, mid), (mid, e))
        } else {
            ((mid, e), (s, mid))
        };
        let (small_hist, large_hist) = match hist {
            Some(mut h) => {
                let small_rows = &rows[small.0..small.1];
                let small_hist = (small.1 - small.0 > SMALL_NODE).then(|| {
                    let mut sh = g.take_zeroed();
                    g.accumulate(&mut sh, small_rows, 1.0);
                    sh
                });
                let large_hist = if large.1 - large.0 > SMALL_NODE {
                    match &small_hist {
                        Some(sh) => h.iter_mut().zip(sh).for_each(|(a, b)| *a -= b),
                        None => g.accumulate(&mut h, small_rows, -1.0),
                    }
                    Some(h)
                } else {
                    g.release(h, &rows[s..e]);
                    None
                };
                (small_hist, large_hist)
            }
            None => (None, None),
        };
        let (left_hist, right_hist) = if small.0 == s {
            (small_hist, large_hist)
        } else {
            (large_hist, small_hist)
        };

        let left = nodes.len();
        nodes.push(Node::Leaf { value });
        nodes.push(Node::Leaf { value });
        nodes[id] = Node::Split {
            feature: split.feature as u32,
            threshold: split.threshold,
            left: left as u32,
            right: left as u32 + 1,
        };
        stack.push(Task {
            id: left + 1,
            start: mid,
            end: e,
            depth: depth + 1,
            hist: right_hist,
        });
        stack.push(Task {
            id: left,
            start: s,
            end: mid,
            depth: depth + 1,
            hist: left_hist,
        });
    }
    DecisionTree { nodes }
}
