//! Tree tensor network states, gauge moves and observables.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::layout::{BinaryTreeLayout, Link, LEGS, PARENT};
use crate::decomp::{isometrize, isometry_defect};
use crate::models::StateAccessor;
use crate::oracle::AmplitudeSource;
use crate::{DenseTensor, Error, Mat, Result, C64, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct TtnState {
    layout: BinaryTreeLayout,
    tensors: Vec<DenseTensor>,
    center: usize,
    local_dims: Vec<usize>,
}

/// Value of a measurement with the number of tensor contractions it took.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub value: C64,
    pub contractions: usize,
}

fn sat_product(it: impl Iterator<Item = usize>) -> usize {
    it.fold(1usize, |a, d| a.saturating_mul(d))
}

impl TtnState {
    /// Wraps explicit tensors. Every tensor must carry labels `c0, c1, p`
    /// with leg dimensions matching the layout and `local_dims`.
    pub fn from_tensors(
        layout: BinaryTreeLayout,
        tensors: Vec<DenseTensor>,
        local_dims: Vec<usize>,
        center: usize,
    ) -> Result<Self> {
        if tensors.len() != layout.n_internal() || local_dims.len() != layout.n_physical {
            return Err(Error::InvalidArgument("tensor or site count does not match the layout".into()));
        }
        if center >= tensors.len() {
            return Err(Error::InvalidArgument(format!("centre {center} out of range")));
        }
        let tensors = tensors
            .into_iter()
            .map(|t| t.permute_to(&LEGS))
            .collect::<Result<Vec<_>>>()?;
        let s = Self {
            layout,
            tensors,
            center,
            local_dims,
        };
        for (i, node) in s.layout.nodes.iter().enumerate() {
            for (leg, link) in node.legs.iter().enumerate() {
                let want = match *link {
                    Link::Leaf(p) => Some(s.leaf_dim(p)),
                    Link::Open => Some(1),
                    Link::Node { node: b, leg: lb } => Some(s.tensors[b].shape()[lb]),
                };
                if want != Some(s.tensors[i].shape()[leg]) {
                    return Err(Error::DimensionMismatch {
                        left: format!("node {i} leg {}", LEGS[leg]),
                        right: "layout".into(),
                        left_dim: s.tensors[i].shape()[leg],
                        right_dim: want.unwrap_or(0),
                    });
                }
            }
        }
        Ok(s)
    }

    /// Random isometrized Gaussian tensors with bonds capped at `max_bond`.
    pub fn random<G: Rng + ?Sized>(
        layout: BinaryTreeLayout,
        local_dims: &[usize],
        max_bond: usize,
        center: usize,
        rng: &mut G,
    ) -> Result<Self> {
        if local_dims.len() != layout.n_physical {
            return Err(Error::InvalidArgument("one local dimension per site required".into()));
        }
        let leaf_dim = |p: usize| layout.leaf_site[p].map(|s| local_dims[s]).unwrap_or(1);
        let mut tensors = Vec::with_capacity(layout.n_internal());
        for (i, node) in layout.nodes.iter().enumerate() {
            let mut shape = vec![0; 3];
            for (leg, link) in node.legs.iter().enumerate() {
                shape[leg] = match *link {
                    Link::Leaf(p) => leaf_dim(p),
                    Link::Open => 1,
                    Link::Node { node: b, leg: lb } => {
                        let here = sat_product(layout.leaves_behind(b, lb).into_iter().map(leaf_dim));
                        let there = sat_product(layout.leaves_behind(i, leg).into_iter().map(leaf_dim));
                        max_bond.min(here).min(there).max(1)
                    }
                };
            }
            tensors.push(crate::random::gaussian_tensor(rng, shape, &LEGS)?);
        }
        let mut s = Self::from_tensors(layout, tensors, local_dims.to_vec(), center)?;
        s.gauge_toward(center)?;
        let n = libm::sqrt(s.tensors[center].norm_sqr());
        s.tensors[center].scale(C64::new(1.0 / n, 0.0));
        Ok(s)
    }

    /// Bond-dimension-one product state `|s_0 s_1 …⟩`.
    pub fn product_state(layout: BinaryTreeLayout, local_dims: &[usize], states: &[usize]) -> Result<Self> {
        if states.len() != layout.n_physical || local_dims.len() != layout.n_physical {
            return Err(Error::InvalidArgument("one state per site required".into()));
        }
        let mut tensors = Vec::with_capacity(layout.n_internal());
        for node in &layout.nodes {
            let mut shape = vec![1; 3];
            let mut pick = [0usize; 3];
            for (leg, link) in node.legs.iter().enumerate() {
                if let Link::Leaf(p) = *link {
                    if let Some(s) = layout.leaf_site[p] {
                        if states[s] >= local_dims[s] {
                            return Err(Error::InvalidArgument(format!("state {} exceeds dimension", states[s])));
                        }
                        shape[leg] = local_dims[s];
                        pick[leg] = states[s];
                    }
                }
            }
            tensors.push(DenseTensor::from_fn(shape, &LEGS, |i| {
                if i[0] == pick[0] && i[1] == pick[1] {
                    ONE
                } else {
                    ZERO
                }
            })?);
        }
        Self::from_tensors(layout, tensors, local_dims.to_vec(), 0)
    }

    pub fn layout(&self) -> &BinaryTreeLayout {
        &self.layout
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn tensor(&self, node: usize) -> &DenseTensor {
        &self.tensors[node]
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub(crate) fn set_tensor(&mut self, node: usize, t: DenseTensor) {
        self.tensors[node] = t;
    }

    pub fn leaf_dim(&self, pos: usize) -> usize {
        self.layout.leaf_site[pos].map(|s| self.local_dims[s]).unwrap_or(1)
    }

    pub fn max_bond(&self) -> usize {
        self.layout
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| {
                n.legs
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| matches!(l, Link::Node { .. }))
                    .map(move |(leg, _)| (i, leg))
            })
            .map(|(i, leg)| self.tensors[i].shape()[leg])
            .max()
            .unwrap_or(1)
    }

    /// Moves the orthogonality centre across one bond to the adjacent `to`.
    fn step(&mut self, to: usize) -> Result<()> {
        let from = self.center;
        let la = self
            .layout
            .leg_towards(from, to)
            .ok_or_else(|| Error::InvalidArgument(format!("nodes {from} and {to} are not adjacent")))?;
        let lb = self.layout.leg_towards(to, from).expect("symmetric adjacency");
        let (q, r) = isometrize(&self.tensors[from], LEGS[la])?;
        let r = r.to_matrix(&[LEGS[la]])?;
        self.tensors[from] = q;
        self.tensors[to] = self.tensors[to].apply_on(LEGS[lb], &r)?;
        self.center = to;
        Ok(())
    }

    /// Moves the centre to `to`, returning the nodes whose tensors changed.
    pub fn move_center(&mut self, to: usize) -> Result<Vec<usize>> {
        if to >= self.tensors.len() {
            return Err(Error::InvalidArgument(format!("node {to} out of range")));
        }
        let path = self.layout.path(self.center, to);
        for &b in &path[1..] {
            self.step(b)?;
        }
        Ok(if path.len() > 1 { path } else { Vec::new() })
    }

    /// Isometrizes every tensor toward `c`, farthest first.
    pub fn gauge_toward(&mut self, c: usize) -> Result<()> {
        let n = self.tensors.len();
        let mut dist = vec![usize::MAX; n];
        let mut next = vec![usize::MAX; n];
        dist[c] = 0;
        let mut queue = alloc::collections::VecDeque::from([c]);
        let mut order = Vec::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for (_, y, _) in self.layout.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    next[y] = x;
                    queue.push_back(y);
                }
            }
        }
        for &x in order.iter().rev() {
            if x == c {
                continue;
            }
            let y = next[x];
            let lx = self.layout.leg_towards(x, y).expect("adjacent");
            let ly = self.layout.leg_towards(y, x).expect("adjacent");
            let (q, r) = isometrize(&self.tensors[x], LEGS[lx])?;
            let r = r.to_matrix(&[LEGS[lx]])?;
            self.tensors[x] = q;
            self.tensors[y] = self.tensors[y].apply_on(LEGS[ly], &r)?;
        }
        self.center = c;
        Ok(())
    }

    /// Largest deviation from the isometry condition toward the centre.
    pub fn isometry_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in 0..self.tensors.len() {
            if x == self.center {
                continue;
            }
            let path = self.layout.path(x, self.center);
            let leg = self.layout.leg_towards(x, path[1]).expect("adjacent");
            worst = worst.max(isometry_defect(&self.tensors[x], LEGS[leg])?);
        }
        Ok(worst)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.full_contraction(&[]).re
    }

    /// `⟨ψ|O|ψ⟩` for one site after moving the centre to the site's parent;
    /// touches the centre tensor, its conjugate and the operator.
    pub fn measure_local(&mut self, op: &Mat, site: usize) -> Result<Measurement> {
        self.check_op(op, site)?;
        let (node, leg) = self.layout.site_parent(site);
        let moved = self.move_center(node)?.len().saturating_sub(1);
        let t = &self.tensors[node];
        let ket = t.apply_on(LEGS[leg], op)?;
        let value = t.inner(&ket) / t.norm_sqr();
        Ok(Measurement {
            value,
            contractions: 2 * moved + 2,
        })
    }

    /// `⟨ψ|O_a O'_b|ψ⟩` contracting the tensors on the path between the two
    /// leaves; the count includes the gauge moves to the first leaf.
    pub fn measure_two_point(&mut self, op_a: &Mat, site_a: usize, op_b: &Mat, site_b: usize) -> Result<Measurement> {
        if site_a == site_b {
            return Err(Error::InvalidArgument("two-point function needs distinct sites".into()));
        }
        self.check_op(op_a, site_a)?;
        self.check_op(op_b, site_b)?;
        let (na, la) = self.layout.site_parent(site_a);
        let (nb, lb) = self.layout.site_parent(site_b);
        let mut count = 2 * self.move_center(na)?.len().saturating_sub(1);
        let norm = self.tensors[na].norm_sqr();
        let path = self.layout.path(na, nb);
        let t0 = &self.tensors[na];
        let mut ket = t0.apply_on(LEGS[la], op_a)?;
        count += 1;
        if path.len() == 1 {
            ket = ket.apply_on(LEGS[lb], op_b)?;
            let value = t0.inner(&ket) / norm;
            return Ok(Measurement {
                value,
                contractions: count + 2,
            });
        }
        let out = self.layout.leg_towards(na, path[1]).expect("adjacent");
        let mut x = DenseTensor::sandwich(t0, &ket, LEGS[out])?;
        count += 1;
        for k in 1..path.len() - 1 {
            let (prev, here, next) = (path[k - 1], path[k], path[k + 1]);
            let inc = self.layout.leg_towards(here, prev).expect("adjacent");
            let o = self.layout.leg_towards(here, next).expect("adjacent");
            let t = &self.tensors[here];
            let ket = t.apply_on(LEGS[inc], &x)?;
            x = DenseTensor::sandwich(t, &ket, LEGS[o])?;
            count += 2;
        }
        let t = &self.tensors[nb];
        let inc = self.layout.leg_towards(nb, path[path.len() - 2]).expect("adjacent");
        let ket = t.apply_on(LEGS[inc], &x)?.apply_on(LEGS[lb], op_b)?;
        count += 2;
        Ok(Measurement {
            value: t.inner(&ket) / norm,
            contractions: count,
        })
    }

    fn check_op(&self, op: &Mat, site: usize) -> Result<()> {
        if site >= self.local_dims.len() {
            return Err(Error::InvalidArgument(format!("site {site} out of range")));
        }
        let d = self.local_dims[site];
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch {
                left: "operator".into(),
                right: format!("site {site}"),
                left_dim: op.nrows(),
                right_dim: d,
            });
        }
        Ok(())
    }

    /// Unnormalized `⟨ψ| Π O_k |ψ⟩` by contracting the whole double layer
    /// bottom-up, independent of the gauge.
    fn full_contraction(&self, factors: &[(usize, &Mat)]) -> C64 {
        let n = self.tensors.len();
        let mut up: Vec<Option<Mat>> = vec![None; n];
        let leaf_mat = |p: usize| -> Mat {
            let d = self.leaf_dim(p);
            self.layout.leaf_site[p]
                .and_then(|s| factors.iter().find(|f| f.0 == s).map(|f| f.1.clone()))
                .unwrap_or_else(|| Mat::identity(d, d))
        };
        // Children always precede their parents in node order.
        for i in 0..n {
            let t = &self.tensors[i];
            let mut ket = t.clone();
            for leg in 0..2 {
                let m = match self.layout.nodes[i].legs[leg] {
                    Link::Leaf(p) => leaf_mat(p),
                    Link::Node { node, .. } => up[node].clone().expect("child contracted first"),
                    Link::Open => unreachable!("children are never open"),
                };
                ket = ket.apply_on(LEGS[leg], &m).expect("consistent dims");
            }
            up[i] = Some(DenseTensor::sandwich(t, &ket, LEGS[PARENT]).expect("consistent labels"));
        }
        match self.layout.nodes[n - 1].legs[PARENT] {
            Link::Open => up[n - 1].as_ref().expect("root")[(0, 0)],
            Link::Node { node: a, .. } => {
                let ma = up[a].as_ref().expect("top");
                let mb = up[n - 1].as_ref().expect("top");
                ma.iter().zip(mb.iter()).map(|(x, y)| x * y).sum()
            }
            Link::Leaf(_) => unreachable!("parent legs never hold leaves"),
        }
    }

    /// `ψ(s)` for a configuration of the physical sites.
    pub fn amplitude(&self, config: &[usize]) -> C64 {
        let n = self.tensors.len();
        let mut up: Vec<Vec<C64>> = vec![Vec::new(); n];
        for i in 0..n {
            let t = &self.tensors[i];
            let (d0, d1, dp) = (t.shape()[0], t.shape()[1], t.shape()[2]);
            let vec_of = |leg: usize, d: usize| -> Vec<C64> {
                match self.layout.nodes[i].legs[leg] {
                    Link::Leaf(p) => {
                        let s = self.layout.leaf_site[p].map(|s| config[s]).unwrap_or(0);
                        (0..d).map(|k| if k == s { ONE } else { ZERO }).collect()
                    }
                    Link::Node { node, .. } => up[node].clone(),
                    Link::Open => vec![ONE],
                }
            };
            let v0 = vec_of(0, d0);
            let v1 = vec_of(1, d1);
            let mut out = vec![ZERO; dp];
            for a in 0..d0 {
                if v0[a] == ZERO {
                    continue;
                }
                for b in 0..d1 {
                    let w = v0[a] * v1[b];
                    if w == ZERO {
                        continue;
                    }
                    let base = (a * d1 + b) * dp;
                    for (p, o) in out.iter_mut().enumerate() {
                        *o += w * t.data()[base + p];
                    }
                }
            }
            up[i] = out;
        }
        match self.layout.nodes[n - 1].legs[PARENT] {
            Link::Node { node: a, .. } => up[a].iter().zip(&up[n - 1]).map(|(x, y)| x * y).sum(),
            _ => up[n - 1][0],
        }
    }
}

impl StateAccessor for TtnState {
    fn expect_product(&self, factors: &[(usize, &Mat)]) -> Result<C64> {
        for &(s, m) in factors {
            self.check_op(m, s)?;
        }
        Ok(self.full_contraction(factors) / self.full_contraction(&[]))
    }
}

impl AmplitudeSource for TtnState {
    fn amplitude(&self, config: &[usize]) -> C64 {
        TtnState::amplitude(self, config)
    }
}
