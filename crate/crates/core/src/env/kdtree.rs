use crate::geom::Vec2;

#[derive(Debug, Clone, Copy)]
struct Node {
    point: usize,
    axis: u8,
    left: Option<u32>,
    right: Option<u32>,
}

/// Static balanced 2-d tree over an external point slice. Queries are exact;
/// ties on distance resolve to the lower point index.
#[derive(Debug, Clone, Default)]
pub struct KdTree {
    nodes: Vec<Node>,
    root: Option<u32>,
}

impl KdTree {
    pub fn build(points: &[Vec2]) -> Self {
        let mut idx: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = build_rec(points, &mut idx, &mut nodes);
        Self { nodes, root }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Returns `(index, squared distance)` of the closest accepted point.
    pub fn nearest_where(
        &self,
        points: &[Vec2],
        q: &Vec2,
        keep: impl Fn(&Vec2) -> bool,
    ) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        if let Some(r) = self.root {
            self.search(points, r, q, &keep, &mut best);
        }
        best
    }

    fn search(
        &self,
        points: &[Vec2],
        node: u32,
        q: &Vec2,
        keep: &impl Fn(&Vec2) -> bool,
        best: &mut Option<(usize, f64)>,
    ) {
        let n = self.nodes[node as usize];
        let p = &points[n.point];
        if keep(p) {
            let d2 = (p - q).norm_squared();
            let better = match *best {
                None => true,
                Some((bi, bd)) => d2 < bd || (d2 == bd && n.point < bi),
            };
            if better {
                *best = Some((n.point, d2));
            }
        }
        let diff = q[n.axis as usize] - p[n.axis as usize];
        let (near, far) = if diff < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        if let Some(c) = near {
            self.search(points, c, q, keep, best);
        }
        if let Some(c) = far {
            let prune = matches!(*best, Some((_, bd)) if diff * diff > bd);
            if !prune {
                self.search(points, c, q, keep, best);
            }
        }
    }
}

fn build_rec(points: &[Vec2], idx: &mut [usize], nodes: &mut Vec<Node>) -> Option<u32> {
    if idx.is_empty() {
        return None;
    }
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for &i in idx.iter() {
        lo = lo.inf(&points[i]);
        hi = hi.sup(&points[i]);
    }
    let spread = hi - lo;
    let axis = if spread.x >= spread.y { 0 } else { 1 };
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis]
            .total_cmp(&points[b][axis])
            .then(a.cmp(&b))
    });
    let me = nodes.len() as u32;
    nodes.push(Node {
        point: idx[mid],
        axis: axis as u8,
        left: None,
        right: None,
    });
    let (l, r) = idx.split_at_mut(mid);
    let left = build_rec(points, l, nodes);
    let right = build_rec(points, &mut r[1..], nodes);
    nodes[me as usize].left = left;
    nodes[me as usize].right = right;
    Some(me)
}
