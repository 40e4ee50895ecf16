//! Static 3-d tree for exact K-nearest-neighbor queries.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::Point3;

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// Neighbor returned by [`KdTree::nearest`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index into the point slice the tree was built from.
    pub index: usize,
    pub distance: f64,
}

/// Exact KNN over a fixed point set. Equal distances are ordered by index.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Point3>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree {
    pub fn build(points: &[Point3]) -> Self {
        let mut tree = KdTree {
            points: points.to_vec(),
            nodes: Vec::with_capacity(points.len()),
            root: None,
        };
        let mut idx: Vec<usize> = (0..points.len()).collect();
        tree.root = tree.build_rec(&mut idx, 0);
        tree
    }

    fn build_rec(&mut self, idx: &mut [usize], depth: usize) -> Option<usize> {
        if idx.is_empty() {
            return None;
        }
        let axis = depth % 3;
        let pts = &self.points;
        idx.sort_unstable_by(|&a, &b| {
            pts[a]
                .axis(axis)
                .total_cmp(&pts[b].axis(axis))
                .then(a.cmp(&b))
        });
        let mid = idx.len() / 2;
        let point = idx[mid];
        let node_id = self.nodes.len();
        self.nodes.push(Node {
            point,
            axis,
            left: None,
            right: None,
        });
        let (lo, rest) = idx.split_at_mut(mid);
        let left = self.build_rec(lo, depth + 1);
        let right = self.build_rec(&mut rest[1..], depth + 1);
        self.nodes[node_id].left = left;
        self.nodes[node_id].right = right;
        Some(node_id)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// The `k` nearest points, closest first.
    pub fn nearest(&self, q: Point3, k: usize) -> Vec<Neighbor> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        if k > 0 {
            self.search(self.root, q, k, &mut best);
        }
        best.into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect()
    }

    fn search(&self, node: Option<usize>, q: Point3, k: usize, best: &mut Vec<(f64, usize)>) {
        let Some(id) = node else { return };
        let n = &self.nodes[id];
        let p = self.points[n.point];
        let d = p - q;
        let cand = (d.dot(d), n.point);
        let pos = best.partition_point(|e| cmp_key(e, &cand) == Ordering::Less);
        if pos < k {
            best.insert(pos, cand);
            best.truncate(k);
        }
        let diff = q.axis(n.axis) - p.axis(n.axis);
        let (near, far) = if diff < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.search(near, q, k, best);
        if best.len() < k || diff * diff <= best[best.len() - 1].0 {
            self.search(far, q, k, best);
        }
    }
}

fn cmp_key(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, unit_f64};
    use proptest::prelude::*;

    fn brute(points: &[Point3], q: Point3, k: usize) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| ((*p - q).dot(*p - q), i))
            .collect();
        all.sort_by(cmp_key);
        all.into_iter().take(k).map(|(_, i)| i).collect()
    }

    #[test]
    fn empty_and_small() {
        let t = KdTree::build(&[]);
        assert!(t.nearest(Point3::ZERO, 3).is_empty());
        let pts = [Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0)];
        let t = KdTree::build(&pts);
        let n = t.nearest(Point3::ZERO, 5);
        assert_eq!(n.len(), 2);
        assert_eq!(n[0], Neighbor { index: 0, distance: 1.0 });
        assert!(t.nearest(Point3::ZERO, 0).is_empty());
    }

    #[test]
    fn ties_resolve_by_index() {
        // a grid gives many exact distance ties
        let mut pts = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                pts.push(Point3::new(i as f64, j as f64, 0.0));
            }
        }
        let t = KdTree::build(&pts);
        for q in [Point3::new(3.0, 3.0, 0.0), Point3::new(2.5, 2.5, 0.0), Point3::new(0.5, 6.0, 1.0)] {
            for k in 1..10 {
                let got: Vec<usize> = t.nearest(q, k).iter().map(|n| n.index).collect();
                assert_eq!(got, brute(&pts, q, k));
            }
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(seed in any::<u64>(), n in 1usize..200, k in 1usize..8) {
            let mut rng = substream(seed, 0);
            let pts: Vec<Point3> = (0..n)
                .map(|_| Point3::new(unit_f64(&mut rng) * 100.0, unit_f64(&mut rng) * 100.0, 1.5))
                .collect();
            let t = KdTree::build(&pts);
            let q = Point3::new(unit_f64(&mut rng) * 120.0 - 10.0, unit_f64(&mut rng) * 120.0 - 10.0, 1.5);
            let got: Vec<usize> = t.nearest(q, k).iter().map(|n| n.index).collect();
            prop_assert_eq!(got, brute(&pts, q, k));
        }
    }
}
