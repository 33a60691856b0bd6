//! Maximum-norm nearest-neighbor search: a KD-tree for large samples and
//! brute force for small ones. Both order neighbors by `(distance, index)`
//! so they agree exactly, ties included.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Sample size above which the tree is used.
pub const BRUTE_FORCE_LIMIT: usize = 512;
const LEAF_SIZE: usize = 16;

/// Row-major point cloud.
#[derive(Debug, Clone)]
pub struct Points {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Points {
    /// Points whose coordinates are the given columns.
    pub fn from_columns(columns: &[&[f64]]) -> Self {
        let d = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            for c in columns {
                data.push(c[i]);
            }
        }
        Self { n, d, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        max_norm(self.row(i), self.row(j))
    }
}

fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Inner { left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct TreeNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    start: usize,
    end: usize,
    kind: Node,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Points,
    order: Vec<usize>,
    nodes: Vec<TreeNode>,
}

impl KdTree {
    pub fn new(points: Points) -> Self {
        let mut tree = Self {
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
        };
        if tree.points.len() > 0 {
            tree.build(0, tree.points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let d = self.points.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for (k, &x) in self.points.row(i).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            lo: lo.clone(),
            hi: hi.clone(),
            start,
            end,
            kind: Node::Leaf { start, end },
        });
        if end - start > LEAF_SIZE {
            let dim = (0..d)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap_or(0);
            if hi[dim] > lo[dim] {
                let mid = (start + end) / 2;
                let pts = &self.points;
                self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                    pts.row(a)[dim].total_cmp(&pts.row(b)[dim]).then(a.cmp(&b))
                });
                let left = self.build(start, mid);
                let right = self.build(mid, end);
                self.nodes[id].kind = Node::Inner { left, right };
            }
        }
        id
    }

    fn box_distance(&self, node: usize, p: &[f64]) -> f64 {
        let n = &self.nodes[node];
        p.iter()
            .zip(n.lo.iter().zip(&n.hi))
            .map(|(&x, (&lo, &hi))| (lo - x).max(x - hi).max(0.0))
            .fold(0.0, f64::max)
    }

    fn knn(&self, i: usize, k: usize) -> Vec<(f64, usize)> {
        let p = self.points.row(i);
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if heap.len() == k && self.box_distance(node, p) > heap.peek().unwrap().dist {
                continue;
            }
            match self.nodes[node].kind {
                Node::Leaf { start, end } => {
                    for &j in &self.order[start..end] {
                        if j == i {
                            continue;
                        }
                        let c = Candidate {
                            dist: max_norm(p, self.points.row(j)),
                            index: j,
                        };
                        if heap.len() < k {
                            heap.push(c);
                        } else if c < *heap.peek().unwrap() {
                            heap.pop();
                            heap.push(c);
                        }
                    }
                }
                Node::Inner { left, right } => {
                    // visit the nearer child first
                    let (a, b) = if self.box_distance(left, p) <= self.box_distance(right, p) {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        heap.into_sorted_vec().into_iter().map(|c| (c.dist, c.index)).collect()
    }

    fn count(&self, i: usize, radii: &[f64], strict: bool) -> usize {
        let p = self.points.row(i);
        let inside = |d: f64, r: f64| if strict { d < r } else { d <= r };
        let mut total = 0;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            let n = &self.nodes[node];
            let mut reachable = true;
            let mut contained = true;
            for (k, &x) in p.iter().enumerate() {
                let near = (n.lo[k] - x).max(x - n.hi[k]).max(0.0);
                let far = (x - n.lo[k]).abs().max((n.hi[k] - x).abs());
                reachable &= inside(near, radii[k]);
                contained &= inside(far, radii[k]);
            }
            if !reachable {
                continue;
            }
            if contained {
                total += n.end - n.start;
                continue;
            }
            match n.kind {
                Node::Leaf { start, end } => {
                    total += self.order[start..end]
                        .iter()
                        .filter(|&&j| in_box(p, self.points.row(j), radii, strict))
                        .count();
                }
                Node::Inner { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        // the query point itself is at distance zero
        total - usize::from(radii.iter().all(|&r| inside(0.0, r)))
    }
}

fn in_box(p: &[f64], q: &[f64], radii: &[f64], strict: bool) -> bool {
    p.iter().zip(q).zip(radii).all(|((a, b), &r)| {
        let d = (a - b).abs();
        if strict {
            d < r
        } else {
            d <= r
        }
    })
}

/// Neighbor search over a fixed point cloud.
#[derive(Debug, Clone)]
pub enum Search {
    Brute(Points),
    Tree(KdTree),
}

impl Search {
    /// Tree above [`BRUTE_FORCE_LIMIT`] points, brute force otherwise.
    pub fn new(points: Points) -> Self {
        Self::with_limit(points, BRUTE_FORCE_LIMIT)
    }

    pub fn with_limit(points: Points, limit: usize) -> Self {
        if points.len() > limit {
            Self::Tree(KdTree::new(points))
        } else {
            Self::Brute(points)
        }
    }

    pub fn points(&self) -> &Points {
        match self {
            Self::Brute(p) => p,
            Self::Tree(t) => &t.points,
        }
    }

    /// The `k` nearest other points of point `i` as `(distance, index)`,
    /// ascending by distance then index.
    pub fn knn(&self, i: usize, k: usize) -> Vec<(f64, usize)> {
        match self {
            Self::Tree(t) => t.knn(i, k),
            Self::Brute(p) => {
                let mut all: Vec<Candidate> = (0..p.len())
                    .filter(|&j| j != i)
                    .map(|j| Candidate {
                        dist: p.distance(i, j),
                        index: j,
                    })
                    .collect();
                let k = k.min(all.len());
                if k == 0 {
                    return Vec::new();
                }
                all.select_nth_unstable(k - 1);
                all.truncate(k);
                all.sort_unstable();
                all.into_iter().map(|c| (c.dist, c.index)).collect()
            }
        }
    }

    /// Number of other points within distance `r` of point `i`
    /// (`< r` if `strict`, else `≤ r`).
    pub fn count(&self, i: usize, r: f64, strict: bool) -> usize {
        self.count_box(i, &vec![r; self.points().dim()], strict)
    }

    /// Number of other points whose offset from point `i` is within
    /// `radii[d]` in every coordinate `d`.
    pub fn count_box(&self, i: usize, radii: &[f64], strict: bool) -> usize {
        match self {
            Self::Tree(t) => t.count(i, radii, strict),
            Self::Brute(p) => (0..p.len())
                .filter(|&j| j != i && in_box(p.row(i), p.row(j), radii, strict))
                .count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, d: usize, seed: u64, grid: bool) -> Points {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let x: f64 = rng.random();
                        if grid {
                            (x * 8.0).floor()
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        Points::from_columns(&refs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn tree_matches_brute_force(seed in 0u64..1000, d in 1usize..4, k in 1usize..6, grid in any::<bool>()) {
            let pts = cloud(700, d, seed, grid);
            let brute = Search::with_limit(pts.clone(), usize::MAX);
            let tree = Search::with_limit(pts, 0);
            for i in (0..700).step_by(37) {
                let a = brute.knn(i, k);
                let b = tree.knn(i, k);
                prop_assert_eq!(&a, &b);
                let r = a[k - 1].0;
                prop_assert_eq!(brute.count(i, r, true), tree.count(i, r, true));
                prop_assert_eq!(brute.count(i, r, false), tree.count(i, r, false));
                let radii: Vec<f64> = (0..d).map(|j| r * (1.0 + j as f64)).collect();
                prop_assert_eq!(brute.count_box(i, &radii, false), tree.count_box(i, &radii, false));
            }
        }
    }

    #[test]
    fn excludes_self() {
        let p = Points::from_columns(&[&[0.0, 1.0, 3.0]]);
        let s = Search::new(p);
        assert_eq!(s.knn(0, 1), vec![(1.0, 1)]);
        assert_eq!(s.count(0, 1.0, true), 0);
        assert_eq!(s.count(0, 1.0, false), 1);
    }
}
