//! Open hypercubic lattices up to three dimensions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

/// Half-link direction `±μ` at a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    pub axis: Axis,
    pub forward: bool,
}

impl Direction {
    pub const fn plus(axis: Axis) -> Self {
        Self {
            axis,
            forward: true,
        }
    }

    pub const fn minus(axis: Axis) -> Self {
        Self {
            axis,
            forward: false,
        }
    }

    /// Fixed mode order `+x, −x, +y, −y, +z, −z`.
    pub const ORDER: [Direction; 6] = [
        Direction::plus(Axis::X),
        Direction::minus(Axis::X),
        Direction::plus(Axis::Y),
        Direction::minus(Axis::Y),
        Direction::plus(Axis::Z),
        Direction::minus(Axis::Z),
    ];

    pub fn opposite(self) -> Self {
        Self {
            axis: self.axis,
            forward: !self.forward,
        }
    }

    pub fn name(self) -> String {
        format!("{}{}", if self.forward { "+" } else { "-" }, self.axis.name())
    }
}

/// Link from `site` to `neighbor = site + μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bond {
    pub site: usize,
    pub axis: Axis,
    pub neighbor: usize,
}

/// Elementary square with corner `site` spanned by `mu < nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub site: usize,
    pub mu: Axis,
    pub nu: Axis,
}

/// Open lattice `Lx × Ly × Lz`, site index `x + Lx (y + Ly z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    dims: [usize; 3],
}

impl LatticeSpec {
    pub fn new(dims: [usize; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("lattice dimensions must be at least 1".into()));
        }
        if dims.iter().all(|&d| d < 2) {
            return Err(Error::InvalidArgument("lattice needs at least two sites".into()));
        }
        Ok(Self { dims })
    }

    pub fn chain(n: usize) -> Result<Self> {
        Self::new([n, 1, 1])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of axes with extent at least 2.
    pub fn spatial_dims(&self) -> usize {
        self.dims.iter().filter(|&&d| d >= 2).count()
    }

    pub fn coords(&self, site: usize) -> [usize; 3] {
        let [lx, ly, _] = self.dims;
        [site % lx, (site / lx) % ly, site / (lx * ly)]
    }

    pub fn site(&self, c: [usize; 3]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    /// Staggering phase `(−1)^{x+y+z}`.
    pub fn stagger(&self, site: usize) -> i32 {
        let c = self.coords(site);
        if (c[0] + c[1] + c[2]) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn neighbor(&self, site: usize, dir: Direction) -> Option<usize> {
        let mut c = self.coords(site);
        let a = dir.axis.index();
        if dir.forward {
            if c[a] + 1 >= self.dims[a] {
                return None;
            }
            c[a] += 1;
        } else {
            if c[a] == 0 {
                return None;
            }
            c[a] -= 1;
        }
        Some(self.site(c))
    }

    /// Existing half-link directions at `site`, in mode order.
    pub fn directions(&self, site: usize) -> Vec<Direction> {
        Direction::ORDER
            .iter()
            .copied()
            .filter(|&d| self.neighbor(site, d).is_some())
            .collect()
    }

    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::new();
        for site in 0..self.n_sites() {
            for axis in Axis::ALL {
                if let Some(neighbor) = self.neighbor(site, Direction::plus(axis)) {
                    out.push(Bond {
                        site,
                        axis,
                        neighbor,
                    });
                }
            }
        }
        out
    }

    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        for site in 0..self.n_sites() {
            for (i, &mu) in Axis::ALL.iter().enumerate() {
                for &nu in &Axis::ALL[i + 1..] {
                    let a = self.neighbor(site, Direction::plus(mu));
                    let b = self.neighbor(site, Direction::plus(nu));
                    if a.is_some() && b.is_some() {
                        out.push(Plaquette { site, mu, nu });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_counts() {
        let l = LatticeSpec::new([2, 2, 2]).unwrap();
        assert_eq!(l.bonds().len(), 12);
        assert_eq!(l.plaquettes().len(), 6);
        assert_eq!(l.directions(0).len(), 3);
        assert_eq!(l.stagger(l.site([1, 1, 0])), 1);
        assert_eq!(l.stagger(l.site([1, 1, 1])), -1);
        let c = LatticeSpec::chain(5).unwrap();
        assert_eq!(c.spatial_dims(), 1);
        assert!(c.plaquettes().is_empty());
        assert!(LatticeSpec::new([1, 1, 1]).is_err());
        assert!(LatticeSpec::new([0, 2, 1]).is_err());
    }
}
