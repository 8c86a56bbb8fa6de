//! Binary tree geometry: padding, leaf ordering and node connectivity.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Leg labels of every internal tensor, in storage order.
pub const LEGS: [&str; 3] = ["c0", "c1", "p"];
pub const PARENT: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    /// Physical leg attached to a leaf position.
    Leaf(usize),
    /// Bond to leg `leg` of node `node`.
    Node { node: usize, leg: usize },
    /// Dimension-one leg (the parent leg of a lone root).
    Open,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: usize,
    /// 1 for nodes holding leaves, increasing upward.
    pub layer: usize,
    pub legs: [Link; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryTreeLayout {
    pub n_physical: usize,
    pub n_leaves: usize,
    pub nodes: Vec<TreeNode>,
    /// Physical site held by each leaf position, `None` for padding.
    pub leaf_site: Vec<Option<usize>>,
    pub site_leaf: Vec<usize>,
}

/// Bit-interleaved key with the first coordinate least significant.
pub fn morton_key(coords: &[usize]) -> u128 {
    let d = coords.len();
    let mut key = 0u128;
    for bit in 0..(128 / d.max(1)).min(42) {
        for (a, &c) in coords.iter().enumerate() {
            if (c >> bit) & 1 == 1 {
                key |= 1u128 << (d * bit + a);
            }
        }
    }
    key
}

/// Tree over `n_sites` sites of a lattice with extents `shape` (site index
/// `x + L_x (y + L_y z)`). An empty or one-element `shape` means a chain in
/// site order; otherwise leaves follow the Z-order curve.
pub fn build_layout(n_sites: usize, shape: &[usize]) -> Result<BinaryTreeLayout> {
    if n_sites < 2 {
        return Err(Error::InvalidArgument("a tree needs at least two sites".into()));
    }
    let mut order: Vec<usize> = (0..n_sites).collect();
    if shape.len() > 1 {
        if shape.iter().product::<usize>() != n_sites {
            return Err(Error::InvalidArgument(format!(
                "lattice shape {shape:?} does not hold {n_sites} sites"
            )));
        }
        let coords = |j: usize| {
            let mut c = Vec::with_capacity(shape.len());
            let mut r = j;
            for &l in shape {
                c.push(r % l);
                r /= l;
            }
            c
        };
        order.sort_by_key(|&j| morton_key(&coords(j)));
    }
    let n_leaves = n_sites.next_power_of_two();
    let mut leaf_site = vec![None; n_leaves];
    let mut site_leaf = vec![0; n_sites];
    for (pos, &s) in order.iter().enumerate() {
        leaf_site[pos] = Some(s);
        site_leaf[s] = pos;
    }

    let mut nodes: Vec<TreeNode> = Vec::with_capacity(n_leaves.saturating_sub(2).max(1));
    if n_leaves == 2 {
        nodes.push(TreeNode {
            id: 0,
            layer: 1,
            legs: [Link::Leaf(0), Link::Leaf(1), Link::Open],
        });
    } else {
        let mut below: Vec<Link> = (0..n_leaves).map(Link::Leaf).collect();
        let mut layer = 1;
        while below.len() > 2 {
            let mut current = Vec::with_capacity(below.len() / 2);
            for pair in below.chunks(2) {
                let id = nodes.len();
                for (leg, &child) in pair.iter().enumerate() {
                    if let Link::Node { node, .. } = child {
                        nodes[node].legs[PARENT] = Link::Node { node: id, leg };
                    }
                }
                nodes.push(TreeNode {
                    id,
                    layer,
                    legs: [pair[0], pair[1], Link::Open],
                });
                current.push(Link::Node { node: id, leg: PARENT });
            }
            below = current;
            layer += 1;
        }
        if let [Link::Node { node: a, .. }, Link::Node { node: b, .. }] = below[..] {
            nodes[a].legs[PARENT] = Link::Node { node: b, leg: PARENT };
            nodes[b].legs[PARENT] = Link::Node { node: a, leg: PARENT };
        }
    }
    Ok(BinaryTreeLayout {
        n_physical: n_sites,
        n_leaves,
        nodes,
        leaf_site,
        site_leaf,
    })
}

impl BinaryTreeLayout {
    pub fn n_internal(&self) -> usize {
        self.nodes.len()
    }

    /// `log2` of the padded leaf count.
    pub fn n_layers(&self) -> usize {
        self.n_leaves.trailing_zeros() as usize
    }

    /// Node and leg holding leaf position `pos`.
    pub fn leaf_parent(&self, pos: usize) -> (usize, usize) {
        (pos / 2, pos % 2)
    }

    /// Node and leg holding physical site `site`.
    pub fn site_parent(&self, site: usize) -> (usize, usize) {
        self.leaf_parent(self.site_leaf[site])
    }

    /// Internal neighbours of `node` with the connecting legs
    /// `(leg on node, neighbour, leg on neighbour)`.
    pub fn neighbors(&self, node: usize) -> Vec<(usize, usize, usize)> {
        self.nodes[node]
            .legs
            .iter()
            .enumerate()
            .filter_map(|(l, link)| match *link {
                Link::Node { node: b, leg } => Some((l, b, leg)),
                _ => None,
            })
            .collect()
    }

    /// Node sequence from `a` to `b` inclusive.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let n = self.nodes.len();
        let mut prev = vec![usize::MAX; n];
        let mut queue = alloc::collections::VecDeque::new();
        prev[a] = a;
        queue.push_back(a);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for (_, y, _) in self.neighbors(x) {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![b];
        let mut x = b;
        while x != a {
            x = prev[x];
            path.push(x);
        }
        path.reverse();
        path
    }

    /// Leg of `a` pointing at the adjacent node `b`.
    pub fn leg_towards(&self, a: usize, b: usize) -> Option<usize> {
        self.neighbors(a).into_iter().find(|n| n.1 == b).map(|n| n.0)
    }

    /// Leaf positions reachable from `node` through `leg` without returning.
    pub fn leaves_behind(&self, node: usize, leg: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_behind(node, leg, &mut out, &mut Vec::new());
        out
    }

    /// Internal nodes reachable from `node` through `leg`.
    pub fn nodes_behind(&self, node: usize, leg: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_behind(node, leg, &mut Vec::new(), &mut out);
        out
    }

    fn collect_behind(&self, node: usize, leg: usize, leaves: &mut Vec<usize>, nodes: &mut Vec<usize>) {
        match self.nodes[node].legs[leg] {
            Link::Leaf(p) => leaves.push(p),
            Link::Open => {}
            Link::Node { node: b, leg: lb } => {
                nodes.push(b);
                for l in 0..3 {
                    if l != lb {
                        self.collect_behind(b, l, leaves, nodes);
                    }
                }
            }
        }
    }

    /// Depth-first Euler tour over internal nodes starting at `start`; each
    /// edge is crossed twice.
    pub fn euler_tour(&self, start: usize) -> Vec<usize> {
        let mut tour = vec![start];
        self.tour_from(start, usize::MAX, &mut tour);
        tour
    }

    fn tour_from(&self, x: usize, from: usize, tour: &mut Vec<usize>) {
        for (_, y, _) in self.neighbors(x) {
            if y != from {
                tour.push(y);
                self.tour_from(y, x, tour);
                tour.push(x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for (n, layers) in [(4, 2), (8, 3), (16, 4), (64, 6)] {
            let l = build_layout(n, &[]).unwrap();
            assert_eq!(l.n_internal(), n - 2);
            assert_eq!(l.n_layers(), layers);
        }
        let l = build_layout(2, &[]).unwrap();
        assert_eq!(l.n_internal(), 1);
        assert_eq!(l.nodes[0].legs[PARENT], Link::Open);
    }

    #[test]
    fn padding() {
        let l = build_layout(5, &[]).unwrap();
        assert_eq!(l.n_leaves, 8);
        assert_eq!(l.leaf_site[5..], [None, None, None]);
    }

    #[test]
    fn z_order() {
        let l = build_layout(4, &[2, 2]).unwrap();
        assert_eq!(l.leaf_site, [Some(0), Some(1), Some(2), Some(3)]);
        let l = build_layout(16, &[4, 4]).unwrap();
        // (2,0) follows the first 2×2 block.
        assert_eq!(l.leaf_site[4], Some(2));
    }

    #[test]
    fn tour_crosses_each_edge_twice() {
        let l = build_layout(16, &[]).unwrap();
        let t = l.euler_tour(0);
        assert_eq!(t.len(), 2 * l.n_internal() - 1);
        for w in t.windows(2) {
            assert!(l.leg_towards(w[0], w[1]).is_some());
        }
    }
}
