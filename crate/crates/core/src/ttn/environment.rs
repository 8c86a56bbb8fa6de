//! Cached contractions of the Hamiltonian with everything beyond a tree bond.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::layout::{Link, LEGS};
use super::state::TtnState;
use crate::effective::EffectiveOperator;
use crate::{DenseTensor, HamiltonianTerms, Mat, Result, C64};

/// Completed terms in `block` and open strings of crossing terms in
/// `partial` (without coefficients), as `[bra, ket]` matrices on the bond.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnvBlock {
    pub block: Option<Mat>,
    pub partial: BTreeMap<usize, Mat>,
}

impl EnvBlock {
    fn max_diff(&self, other: &Self) -> f64 {
        let bd = match (&self.block, &other.block) {
            (Some(a), Some(b)) => (a - b).norm(),
            (None, None) => 0.0,
            (Some(a), None) | (None, Some(a)) => a.norm(),
        };
        let mut worst = bd;
        for (k, a) in &self.partial {
            worst = worst.max(other.partial.get(k).map(|b| (a - b).norm()).unwrap_or(f64::INFINITY));
        }
        if self.partial.len() != other.partial.len() {
            worst = f64::INFINITY;
        }
        worst
    }
}

/// Environment cache for one Hamiltonian on one layout. Entry `(node, leg)`
/// holds the contraction of the subtree seen from `node` through `leg`.
pub struct Environment<'h> {
    h: &'h HamiltonianTerms,
    /// Leaf positions of every term.
    term_leaves: Vec<Vec<usize>>,
    /// Per directed bond, membership of every leaf position.
    behind: Vec<Vec<bool>>,
    /// Per node, the directed bonds whose subtree contains it.
    dependents: Vec<Vec<usize>>,
    cache: Vec<Option<EnvBlock>>,
    /// Number of entries computed so far.
    pub recomputed: usize,
}

fn edge(node: usize, leg: usize) -> usize {
    3 * node + leg
}

/// `Σ conj(T) (X ⊗ Y) T` with `open` left uncontracted.
fn transport(t: &DenseTensor, open: usize, factors: &[(usize, &Mat)]) -> Result<Mat> {
    let mut ket = t.clone();
    for &(leg, m) in factors {
        ket = ket.apply_on(LEGS[leg], m)?;
    }
    DenseTensor::sandwich(t, &ket, LEGS[open])
}

impl<'h> Environment<'h> {
    pub fn new(h: &'h HamiltonianTerms, state: &TtnState) -> Self {
        let layout = state.layout();
        let n = layout.n_internal();
        let term_leaves = h
            .terms
            .iter()
            .map(|t| t.sites().map(|s| layout.site_leaf[s]).collect())
            .collect();
        let mut behind = vec![vec![false; layout.n_leaves]; 3 * n];
        let mut dependents = vec![Vec::new(); n];
        for x in 0..n {
            for leg in 0..3 {
                for p in layout.leaves_behind(x, leg) {
                    behind[edge(x, leg)][p] = true;
                }
                for y in layout.nodes_behind(x, leg) {
                    dependents[y].push(edge(x, leg));
                }
            }
        }
        Self {
            h,
            term_leaves,
            behind,
            dependents,
            cache: vec![None; 3 * n],
            recomputed: 0,
        }
    }

    /// Drops every entry that depends on the tensor at `node`.
    pub fn invalidate(&mut self, node: usize) {
        for &e in &self.dependents[node] {
            self.cache[e] = None;
        }
    }

    pub fn invalidate_all(&mut self) {
        self.cache.iter_mut().for_each(|c| *c = None);
    }

    fn hits(&self, e: usize, term: usize) -> (bool, bool) {
        let b = &self.behind[e];
        let any = self.term_leaves[term].iter().any(|&p| b[p]);
        let all = self.term_leaves[term].iter().all(|&p| b[p]);
        (any, all)
    }

    /// Ensures entry `(node, leg)` is current and returns it.
    pub fn get(&mut self, state: &TtnState, node: usize, leg: usize) -> Result<&EnvBlock> {
        let e = edge(node, leg);
        if self.cache[e].is_none() {
            let v = self.compute(state, node, leg)?;
            self.cache[e] = Some(v);
            self.recomputed += 1;
        }
        Ok(self.cache[e].as_ref().expect("just filled"))
    }

    fn compute(&mut self, state: &TtnState, node: usize, leg: usize) -> Result<EnvBlock> {
        let h = self.h;
        let layout = state.layout();
        match layout.nodes[node].legs[leg] {
            Link::Open => Ok(EnvBlock::default()),
            Link::Leaf(p) => {
                let mut out = EnvBlock::default();
                let Some(site) = layout.leaf_site[p] else {
                    return Ok(out);
                };
                for (idx, t) in h.terms.iter().enumerate() {
                    let Some(id) = t.op_at(site) else { continue };
                    let m = h.op(site, id);
                    if t.factors.len() == 1 {
                        let y = m * t.coeff;
                        match &mut out.block {
                            Some(b) => *b += y,
                            slot => *slot = Some(y),
                        }
                    } else {
                        out.partial.insert(idx, m.clone());
                    }
                }
                Ok(out)
            }
            Link::Node { node: b, leg: lb } => {
                let others: Vec<usize> = (0..3).filter(|&l| l != lb).collect();
                for &l in &others {
                    self.get(state, b, l)?;
                }
                let e = edge(node, leg);
                let (e1, e2) = (edge(b, others[0]), edge(b, others[1]));
                let env1 = self.cache[e1].as_ref().expect("filled");
                let env2 = self.cache[e2].as_ref().expect("filled");
                let t = state.tensor(b);
                let mut out = EnvBlock::default();
                let add_block = |m: Mat, out: &mut EnvBlock| match &mut out.block {
                    Some(x) => *x += m,
                    slot => *slot = Some(m),
                };
                if let Some(x) = &env1.block {
                    add_block(transport(t, lb, &[(others[0], x)])?, &mut out);
                }
                if let Some(x) = &env2.block {
                    add_block(transport(t, lb, &[(others[1], x)])?, &mut out);
                }
                for (idx, term) in h.terms.iter().enumerate() {
                    let (any, all) = self.hits(e, idx);
                    if !any {
                        continue;
                    }
                    let (in1, _) = self.hits(e1, idx);
                    let (in2, _) = self.hits(e2, idx);
                    if all && !(in1 && in2) {
                        continue;
                    }
                    let mut f: Vec<(usize, &Mat)> = Vec::with_capacity(2);
                    if in1 {
                        f.push((others[0], &env1.partial[&idx]));
                    }
                    if in2 {
                        f.push((others[1], &env2.partial[&idx]));
                    }
                    let m = transport(t, lb, &f)?;
                    if all {
                        add_block(m * term.coeff, &mut out);
                    } else {
                        out.partial.insert(idx, m);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Effective Hamiltonian on the tensor at `node`, which must be the centre.
    pub fn effective_operator(&mut self, state: &TtnState, node: usize) -> Result<EffectiveOperator<'_>> {
        for leg in 0..3 {
            self.get(state, node, leg)?;
        }
        let dims = state.tensor(node).shape().to_vec();
        let envs: [&EnvBlock; 3] = [0, 1, 2].map(|l| self.cache[edge(node, l)].as_ref().expect("filled"));
        let mut op = EffectiveOperator::new(dims);
        let one = C64::new(1.0, 0.0);
        for (l, env) in envs.iter().enumerate() {
            if let Some(b) = &env.block {
                op.add(one, vec![(l, b)]);
            }
        }
        for (idx, term) in self.h.terms.iter().enumerate() {
            let legs: Vec<usize> = (0..3).filter(|&l| self.hits(edge(node, l), idx).0).collect();
            if legs.len() < 2 {
                continue;
            }
            let f = legs.iter().map(|&l| (l, &envs[l].partial[&idx])).collect();
            op.add(term.coeff, f);
        }
        Ok(op)
    }

    /// Largest difference between cached entries and a fresh recomputation.
    pub fn recompute_check(&self, state: &TtnState) -> Result<f64> {
        let mut fresh = Environment::new(self.h, state);
        let mut worst = 0.0f64;
        for (e, cached) in self.cache.iter().enumerate() {
            if let Some(c) = cached {
                let f = fresh.get(state, e / 3, e % 3)?;
                worst = worst.max(c.max_diff(f));
            }
        }
        Ok(worst)
    }
}
