//! Exact nearest-neighbour index over embedded (normalized) points.
//!
//! Points are appended one at a time. A static k-d tree covers the prefix
//! that existed at the last rebuild; newer points sit in a linear buffer that
//! is folded in once it grows past a fraction of the indexed set. Pruning
//! uses per-node bounding boxes and the metric's own lower bound, which
//! handles wrapped angular coordinates. Ties resolve to the lowest id.

use crate::env::Metric;

const LEAF_SIZE: usize = 12;
const MIN_BUFFER: usize = 64;
// Relative slack on pruning so rounding in the box bound never hides a tie.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Kind {
    Leaf { start: usize, end: usize },
    Inner { left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct KdNode {
    kind: Kind,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct KdTree {
    nodes: Vec<KdNode>,
    order: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    dist: f64,
    id: usize,
}

impl Best {
    #[inline]
    fn offer(&mut self, dist: f64, id: usize) {
        if dist < self.dist || (dist == self.dist && id < self.id) {
            self.dist = dist;
            self.id = id;
        }
    }
}

#[derive(Debug, Clone)]
pub struct NearestIndex {
    metric: Metric,
    dim: usize,
    points: Vec<f64>,
    kd: KdTree,
    built: usize,
}

impl NearestIndex {
    pub fn new(metric: Metric) -> Self {
        let dim = metric.dim();
        Self {
            metric,
            dim,
            points: Vec::new(),
            kd: KdTree::default(),
            built: 0,
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> &[f64] {
        &self.points[id * self.dim..(id + 1) * self.dim]
    }

    /// Append an embedded point; returns its id.
    pub fn push(&mut self, p: &[f64]) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        let id = self.len();
        self.points.extend_from_slice(p);
        if self.len() - self.built > MIN_BUFFER.max(self.built / 4) {
            self.rebuild();
        }
        id
    }

    fn rebuild(&mut self) {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        self.build_node(&mut order, 0, n, &mut nodes);
        self.kd = KdTree { nodes, order };
        self.built = n;
    }

    fn build_node(&self, order: &mut [usize], start: usize, end: usize, nodes: &mut Vec<KdNode>) -> usize {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &id in &order[start..end] {
            for (d, &v) in self.point(id).iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let slot = nodes.len();
        nodes.push(KdNode {
            kind: Kind::Leaf { start, end },
            lo,
            hi,
        });
        if end - start <= LEAF_SIZE {
            return slot;
        }
        let (lo, hi) = (&nodes[slot].lo, &nodes[slot].hi);
        let split = (0..self.dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0);
        if hi[split] <= lo[split] {
            // all points coincide
            return slot;
        }
        let mid = start + (end - start) / 2;
        let dim = self.dim;
        let pts = &self.points;
        order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a * dim + split].total_cmp(&pts[b * dim + split]).then(a.cmp(&b))
        });
        let left = self.build_node(order, start, mid, nodes);
        let right = self.build_node(order, mid, end, nodes);
        nodes[slot].kind = Kind::Inner { left, right };
        slot
    }

    /// Id of the nearest point and its distance; `None` when empty.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut best = Best {
            dist: f64::INFINITY,
            id: usize::MAX,
        };
        if !self.kd.nodes.is_empty() {
            self.search(0, q, &mut best);
        }
        for id in self.built..self.len() {
            best.offer(self.metric.dist(q, self.point(id)), id);
        }
        Some((best.id, best.dist))
    }

    fn search(&self, node: usize, q: &[f64], best: &mut Best) {
        let n = &self.kd.nodes[node];
        match n.kind {
            Kind::Leaf { start, end } => {
                for &id in &self.kd.order[start..end] {
                    best.offer(self.metric.dist(q, self.point(id)), id);
                }
            }
            Kind::Inner { left, right } => {
                let bl = self.bound(left, q);
                let br = self.bound(right, q);
                let (first, fb, second, sb) = if bl <= br {
                    (left, bl, right, br)
                } else {
                    (right, br, left, bl)
                };
                if fb <= best.dist * (1.0 + PRUNE_SLACK) {
                    self.search(first, q, best);
                }
                if sb <= best.dist * (1.0 + PRUNE_SLACK) {
                    self.search(second, q, best);
                }
            }
        }
    }

    fn bound(&self, node: usize, q: &[f64]) -> f64 {
        let n = &self.kd.nodes[node];
        self.metric.box_lower_bound(q, &n.lo, &n.hi)
    }
}
