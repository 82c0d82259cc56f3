//! Periodic hypercubic lattices with `Q` qubits per site.
//!
//! Sites are `[x, y, z]` triples (`z = 0` in 2D) taken modulo the extents.
//! The flat site index is `x + Lx * (y + Ly * z)` and qubit `k` of site `s`
//! has index `Q * s + k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Site = [i64; 3];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dims: [usize; 3],
    ndim: usize,
    q: usize,
}

impl Lattice {
    pub fn new(dims: &[usize], q: usize) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(Error::Geometry(format!("lattice must be 2D or 3D, got {}D", dims.len())));
        }
        if dims.contains(&0) || q == 0 {
            return Err(Error::Geometry(format!("extents {dims:?} and Q = {q} must be positive")));
        }
        let mut d = [1; 3];
        d[..dims.len()].copy_from_slice(dims);
        Ok(Self {
            dims: d,
            ndim: dims.len(),
            q,
        })
    }

    pub fn square(lx: usize, ly: usize, q: usize) -> Result<Self> {
        Self::new(&[lx, ly], q)
    }

    pub fn cubic(lx: usize, ly: usize, lz: usize, q: usize) -> Result<Self> {
        Self::new(&[lx, ly, lz], q)
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.ndim]
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    pub fn qubits_per_site(&self) -> usize {
        self.q
    }

    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_qubits(&self) -> usize {
        self.q * self.n_sites()
    }

    /// Reduces coordinates into the fundamental domain.
    pub fn wrap(&self, s: Site) -> Site {
        let mut out = [0; 3];
        for a in 0..3 {
            out[a] = s[a].rem_euclid(self.dims[a] as i64);
        }
        out
    }

    pub fn site_index(&self, s: Site) -> usize {
        let w = self.wrap(s);
        (w[0] as usize) + self.dims[0] * ((w[1] as usize) + self.dims[1] * (w[2] as usize))
    }

    pub fn site_of(&self, index: usize) -> Site {
        let x = index % self.dims[0];
        let y = (index / self.dims[0]) % self.dims[1];
        let z = index / (self.dims[0] * self.dims[1]);
        [x as i64, y as i64, z as i64]
    }

    pub fn qubit(&self, s: Site, k: usize) -> usize {
        debug_assert!(k < self.q);
        self.q * self.site_index(s) + k
    }

    pub fn site_qubits(&self, s: Site) -> std::ops::Range<usize> {
        let base = self.q * self.site_index(s);
        base..base + self.q
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.n_sites()).map(|i| self.site_of(i))
    }

    pub fn with_q(&self, q: usize) -> Result<Self> {
        Self::new(self.dims(), q)
    }
}

pub fn add(a: Site, b: Site) -> Site {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
