//! Site regions and the tripartitions used for entropy combinations.
//!
//! Builders work in raw (unwrapped) coordinates relative to `origin`, check
//! that the whole construction stays at least [`CLEARANCE`] sites away from
//! its own periodic image, and only then wrap onto the torus.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{add, Lattice, Site};

pub const CLEARANCE: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Region {
    sites: BTreeSet<Site>,
}

impl Region {
    pub fn new<I: IntoIterator<Item = Site>>(lattice: &Lattice, sites: I) -> Self {
        Self {
            sites: sites.into_iter().map(|s| lattice.wrap(s)).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Axis-aligned box `origin + [0, size)` per axis.
    pub fn boxed(lattice: &Lattice, origin: Site, size: [usize; 3]) -> Self {
        let mut sites = Vec::with_capacity(size.iter().product());
        for z in 0..size[2] as i64 {
            for y in 0..size[1] as i64 {
                for x in 0..size[0] as i64 {
                    sites.push(add(origin, [x, y, z]));
                }
            }
        }
        Self::new(lattice, sites)
    }

    pub fn full(lattice: &Lattice) -> Self {
        Self::new(lattice, lattice.sites())
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.sites.contains(s)
    }

    pub fn sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region {
            sites: self.sites.union(&other.sites).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region {
            sites: self.sites.intersection(&other.sites).copied().collect(),
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region {
            sites: self.sites.difference(&other.sites).copied().collect(),
        }
    }

    pub fn complement(&self, lattice: &Lattice) -> Region {
        Region {
            sites: lattice.sites().filter(|s| !self.sites.contains(s)).collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.sites.is_disjoint(&other.sites)
    }

    pub fn translate(&self, lattice: &Lattice, v: Site) -> Region {
        Region::new(lattice, self.sites.iter().map(|&s| add(s, v)))
    }

    pub fn insert(&mut self, lattice: &Lattice, s: Site) -> bool {
        self.sites.insert(lattice.wrap(s))
    }

    pub fn remove(&mut self, lattice: &Lattice, s: Site) -> bool {
        self.sites.remove(&lattice.wrap(s))
    }

    /// Sorted qubit indices of every site in the region.
    pub fn qubits(&self, lattice: &Lattice) -> Vec<usize> {
        let mut out: Vec<usize> = self.sites.iter().flat_map(|&s| lattice.site_qubits(s)).collect();
        out.sort_unstable();
        out
    }

    /// Per-qubit membership mask.
    pub fn qubit_mask(&self, lattice: &Lattice) -> Vec<bool> {
        let mut mask = vec![false; lattice.n_qubits()];
        for q in self.qubits(lattice) {
            mask[q] = true;
        }
        mask
    }

    pub fn touches(&self, lattice: &Lattice, s: Site) -> bool {
        neighbours(lattice, s).iter().any(|n| self.contains(n))
    }

    /// Sites of the region with a nearest neighbour outside it.
    pub fn boundary(&self, lattice: &Lattice) -> Region {
        Region {
            sites: self
                .sites
                .iter()
                .filter(|&&s| neighbours(lattice, s).iter().any(|n| !self.contains(n)))
                .copied()
                .collect(),
        }
    }

    /// Nearest-neighbour connected components.
    pub fn components(&self, lattice: &Lattice) -> Vec<Region> {
        let mut seen: BTreeSet<Site> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.sites {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                for n in neighbours(lattice, s) {
                    if self.contains(&n) && seen.insert(n) {
                        comp.insert(n);
                        queue.push_back(n);
                    }
                }
            }
            out.push(Region { sites: comp });
        }
        out
    }
}

/// Wrapped nearest neighbours along every lattice axis.
pub fn neighbours(lattice: &Lattice, s: Site) -> Vec<Site> {
    let mut out = Vec::with_capacity(2 * lattice.ndim());
    for a in 0..lattice.ndim() {
        for d in [-1, 1] {
            let mut n = s;
            n[a] += d;
            out.push(lattice.wrap(n));
        }
    }
    out
}

fn check_clearance(lattice: &Lattice, extent: [usize; 3], what: &str) -> Result<()> {
    for a in 0..lattice.ndim() {
        if extent[a] + CLEARANCE > lattice.extent(a) {
            return Err(Error::Geometry(format!(
                "{what} spans {} sites along axis {a}; the torus extent {} leaves less than {CLEARANCE} sites to its periodic image",
                extent[a],
                lattice.extent(a)
            )));
        }
    }
    Ok(())
}

fn check_min(values: &[(&str, usize)], min: usize) -> Result<()> {
    for &(name, v) in values {
        if v < min {
            return Err(Error::Geometry(format!("{name} = {v} is below the minimum {min}")));
        }
    }
    Ok(())
}

/// Moves `site` from `donor` into `acceptor`, or removes it when `acceptor` is `None`.
pub fn notch(
    lattice: &Lattice,
    donor: &Region,
    acceptor: Option<&Region>,
    site: Site,
) -> Result<(Region, Option<Region>)> {
    let site = lattice.wrap(site);
    if !donor.contains(&site) {
        return Err(Error::Geometry(format!("notch site {site:?} is not in the donor region")));
    }
    match acceptor {
        Some(acc) => {
            if !acc.touches(lattice, site) {
                return Err(Error::Geometry(format!(
                    "notch site {site:?} is not adjacent to the acceptor region"
                )));
            }
            let mut d = donor.clone();
            d.remove(lattice, site);
            let mut a = acc.clone();
            a.insert(lattice, site);
            Ok((d, Some(a)))
        }
        None => {
            if neighbours(lattice, site).iter().all(|n| donor.contains(n)) {
                return Err(Error::Geometry(format!(
                    "notch site {site:?} is interior to the donor region"
                )));
            }
            let mut d = donor.clone();
            d.remove(lattice, site);
            Ok((d, None))
        }
    }
}

/// Three labelled regions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tripartition {
    pub a: Region,
    pub b: Region,
    pub c: Region,
}

impl Tripartition {
    pub fn union(&self) -> Region {
        self.a.union(&self.b).union(&self.c)
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.a.is_disjoint(&self.b) && self.a.is_disjoint(&self.c) && self.b.is_disjoint(&self.c)
    }

    pub fn translate(&self, lattice: &Lattice, v: Site) -> Tripartition {
        Tripartition {
            a: self.a.translate(lattice, v),
            b: self.b.translate(lattice, v),
            c: self.c.translate(lattice, v),
        }
    }
}

/// Single-site deformation of the B/C interface of the KP layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KpNotch {
    /// B site on the interface, `offset` columns right of the triple point, moves into C.
    BToC { offset: usize },
    /// C site on the interface moves into B.
    CToB { offset: usize },
}

/// Left block A of height `ly + ly_p`, B above C on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpParams {
    pub origin: Site,
    pub lx: usize,
    pub lx_p: usize,
    pub ly: usize,
    pub ly_p: usize,
    pub notch: Option<KpNotch>,
}

impl KpParams {
    pub fn square(l: usize) -> Self {
        Self {
            origin: [0, 0, 0],
            lx: l,
            lx_p: l,
            ly: l,
            ly_p: l,
            notch: None,
        }
    }

    pub fn with_notch(mut self, notch: KpNotch) -> Self {
        self.notch = Some(notch);
        self
    }

    pub fn extent(&self) -> [usize; 3] {
        [self.lx + self.lx_p, self.ly + self.ly_p, 1]
    }
}

pub fn kp_regions(lattice: &Lattice, p: &KpParams) -> Result<Tripartition> {
    check_min(&[("lx", p.lx), ("lx'", p.lx_p), ("ly", p.ly), ("ly'", p.ly_p)], 2)?;
    check_clearance(lattice, p.extent(), "KP construction")?;
    let o = p.origin;
    let a = Region::boxed(lattice, o, [p.lx, p.ly + p.ly_p, 1]);
    let c = Region::boxed(lattice, add(o, [p.lx as i64, 0, 0]), [p.lx_p, p.ly_p, 1]);
    let b = Region::boxed(lattice, add(o, [p.lx as i64, p.ly_p as i64, 0]), [p.lx_p, p.ly, 1]);
    let (b, c) = match p.notch {
        None => (b, c),
        Some(KpNotch::BToC { offset }) => {
            check_offset(offset, p.lx_p)?;
            let s = add(o, [(p.lx + offset) as i64, p.ly_p as i64, 0]);
            let (b2, c2) = notch(lattice, &b, Some(&c), s)?;
            (b2, c2.expect("acceptor given"))
        }
        Some(KpNotch::CToB { offset }) => {
            check_offset(offset, p.lx_p)?;
            let s = add(o, [(p.lx + offset) as i64, p.ly_p as i64 - 1, 0]);
            let (c2, b2) = notch(lattice, &c, Some(&b), s)?;
            (b2.expect("acceptor given"), c2)
        }
    };
    Ok(Tripartition { a, b, c })
}

fn check_offset(offset: usize, len: usize) -> Result<()> {
    if offset >= len {
        return Err(Error::Geometry(format!("notch offset {offset} outside an interface of length {len}")));
    }
    Ok(())
}

/// Single-site deformation of the upper B block's edge facing the hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LwNotch {
    /// Upper-B site on the hole edge, `offset` columns from the left, is dropped into the hole.
    BTopToHole { offset: usize },
    /// Hole site under upper B joins B.
    HoleToBTop { offset: usize },
}

/// Three columns (widths `lx`, `lx_p`, `lx_pp`) by three rows (heights
/// `ly_pp` bottom, `ly_p` middle, `ly` top); the centre block is the hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LwParams {
    pub origin: Site,
    pub lx: usize,
    pub lx_p: usize,
    pub lx_pp: usize,
    pub ly: usize,
    pub ly_p: usize,
    pub ly_pp: usize,
    pub notch: Option<LwNotch>,
}

impl LwParams {
    pub fn square(l: usize) -> Self {
        Self {
            origin: [0, 0, 0],
            lx: l,
            lx_p: l,
            lx_pp: l,
            ly: l,
            ly_p: l,
            ly_pp: l,
            notch: None,
        }
    }

    pub fn with_notch(mut self, notch: LwNotch) -> Self {
        self.notch = Some(notch);
        self
    }

    pub fn extent(&self) -> [usize; 3] {
        [self.lx + self.lx_p + self.lx_pp, self.ly + self.ly_p + self.ly_pp, 1]
    }

    pub fn hole(&self, lattice: &Lattice) -> Region {
        Region::boxed(
            lattice,
            add(self.origin, [self.lx as i64, self.ly_pp as i64, 0]),
            [self.lx_p, self.ly_p, 1],
        )
    }
}

pub fn lw_regions(lattice: &Lattice, p: &LwParams) -> Result<Tripartition> {
    check_min(
        &[
            ("lx", p.lx),
            ("lx'", p.lx_p),
            ("lx''", p.lx_pp),
            ("ly", p.ly),
            ("ly'", p.ly_p),
            ("ly''", p.ly_pp),
        ],
        2,
    )?;
    let ext = p.extent();
    check_clearance(lattice, ext, "LW construction")?;
    let o = p.origin;
    let a = Region::boxed(lattice, o, [p.lx, ext[1], 1]);
    let c = Region::boxed(lattice, add(o, [(p.lx + p.lx_p) as i64, 0, 0]), [p.lx_pp, ext[1], 1]);
    let top_y = (p.ly_pp + p.ly_p) as i64;
    let b_top = Region::boxed(lattice, add(o, [p.lx as i64, top_y, 0]), [p.lx_p, p.ly, 1]);
    let b_bottom = Region::boxed(lattice, add(o, [p.lx as i64, 0, 0]), [p.lx_p, p.ly_pp, 1]);
    let b_top = match p.notch {
        None => b_top,
        Some(LwNotch::BTopToHole { offset }) => {
            check_offset(offset, p.lx_p)?;
            let s = add(o, [(p.lx + offset) as i64, top_y, 0]);
            notch(lattice, &b_top, None, s)?.0
        }
        Some(LwNotch::HoleToBTop { offset }) => {
            check_offset(offset, p.lx_p)?;
            let s = add(o, [(p.lx + offset) as i64, top_y - 1, 0]);
            notch(lattice, &p.hole(lattice), Some(&b_top), s)?.1.expect("acceptor given")
        }
    };
    Ok(Tripartition {
        a,
        b: b_top.union(&b_bottom),
        c,
    })
}

/// Two weights joined by a horizontal bar. Weights are `lx` wide and
/// `t + w + b` tall; the bar is `bar_len` long and `w` wide with `b` sites
/// below it and `t` above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumbbellParams {
    pub origin: Site,
    pub lx: usize,
    pub bar_len: usize,
    pub w: usize,
    pub t: usize,
    pub b: usize,
}

impl DumbbellParams {
    pub fn new(lx: usize, bar_len: usize, w: usize, t: usize, b: usize) -> Self {
        Self {
            origin: [0, 0, 0],
            lx,
            bar_len,
            w,
            t,
            b,
        }
    }

    pub fn height(&self) -> usize {
        self.t + self.w + self.b
    }

    pub fn extent(&self) -> [usize; 3] {
        [2 * self.lx + self.bar_len, self.height(), 1]
    }
}

pub fn dumbbell_regions(lattice: &Lattice, p: &DumbbellParams) -> Result<Tripartition> {
    check_min(&[("L", p.bar_len)], 2)?;
    check_min(&[("lx", p.lx), ("w", p.w)], 1)?;
    check_clearance(lattice, p.extent(), "dumbbell")?;
    let o = p.origin;
    let h = p.height();
    let a = Region::boxed(lattice, o, [p.lx, h, 1]);
    let b = Region::boxed(lattice, add(o, [p.lx as i64, p.b as i64, 0]), [p.bar_len, p.w, 1]);
    let c = Region::boxed(lattice, add(o, [(p.lx + p.bar_len) as i64, 0, 0]), [p.lx, h, 1]);
    Ok(Tripartition { a, b, c })
}

/// 3D dumbbell: two boxes of size `(lx + lx_p + lx_pp) × ly × (lz + lz_p + lz_pp)`
/// separated along y by a duct of cross-section `lx_p × lz_p` and length `ly_p`,
/// offset by `lx` and `lz` from the box corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dumbbell3dParams {
    pub origin: Site,
    pub lx: usize,
    pub lx_p: usize,
    pub lx_pp: usize,
    pub ly: usize,
    pub ly_p: usize,
    pub lz: usize,
    pub lz_p: usize,
    pub lz_pp: usize,
}

impl Dumbbell3dParams {
    pub fn new(margin: usize, lx_p: usize, ly: usize, ly_p: usize, lz_p: usize) -> Self {
        Self {
            origin: [0, 0, 0],
            lx: margin,
            lx_p,
            lx_pp: margin,
            ly,
            ly_p,
            lz: margin,
            lz_p,
            lz_pp: margin,
        }
    }

    pub fn extent(&self) -> [usize; 3] {
        [
            self.lx + self.lx_p + self.lx_pp,
            2 * self.ly + self.ly_p,
            self.lz + self.lz_p + self.lz_pp,
        ]
    }
}

pub fn dumbbell3d_regions(lattice: &Lattice, p: &Dumbbell3dParams) -> Result<Tripartition> {
    if lattice.ndim() != 3 {
        return Err(Error::Geometry("3D dumbbell needs a 3D lattice".into()));
    }
    check_min(&[("lx'", p.lx_p), ("ly", p.ly), ("ly'", p.ly_p), ("lz'", p.lz_p)], 1)?;
    let ext = p.extent();
    check_clearance(lattice, ext, "3D dumbbell")?;
    let o = p.origin;
    let weight = [ext[0], p.ly, ext[2]];
    let a = Region::boxed(lattice, o, weight);
    let b = Region::boxed(lattice, add(o, [p.lx as i64, p.ly as i64, p.lz as i64]), [p.lx_p, p.ly_p, p.lz_p]);
    let c = Region::boxed(lattice, add(o, [0, (p.ly + p.ly_p) as i64, 0]), weight);
    Ok(Tripartition { a, b, c })
}

/// The two 3D slab tripartitions around a carved core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kp3dVariant {
    /// A and C are the side columns, B the strips above and below the core.
    Split,
    /// C is one side column, A the bottom strip, B wraps the far side and the top.
    Arcs,
}

/// Slab of columns `lx, lx_p, lx_pp`, rows `ly_pp` (bottom), `ly_p`, `ly` (top)
/// and thickness `lz`; the centre block is carved out through the slab.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kp3dParams {
    pub origin: Site,
    pub lx: usize,
    pub lx_p: usize,
    pub lx_pp: usize,
    pub ly: usize,
    pub ly_p: usize,
    pub ly_pp: usize,
    pub lz: usize,
}

impl Kp3dParams {
    pub fn new(l: usize, lz: usize) -> Self {
        Self {
            origin: [0, 0, 0],
            lx: l,
            lx_p: l,
            lx_pp: l,
            ly: l,
            ly_p: l,
            ly_pp: l,
            lz,
        }
    }

    pub fn extent(&self) -> [usize; 3] {
        [
            self.lx + self.lx_p + self.lx_pp,
            self.ly + self.ly_p + self.ly_pp,
            self.lz,
        ]
    }

    pub fn core(&self, lattice: &Lattice) -> Region {
        Region::boxed(
            lattice,
            add(self.origin, [self.lx as i64, self.ly_pp as i64, 0]),
            [self.lx_p, self.ly_p, self.lz],
        )
    }
}

pub fn kp3d_regions(lattice: &Lattice, variant: Kp3dVariant, p: &Kp3dParams) -> Result<Tripartition> {
    if lattice.ndim() != 3 {
        return Err(Error::Geometry("3D KP regions need a 3D lattice".into()));
    }
    check_min(
        &[
            ("lx", p.lx),
            ("lx'", p.lx_p),
            ("lx''", p.lx_pp),
            ("ly", p.ly),
            ("ly'", p.ly_p),
            ("ly''", p.ly_pp),
            ("lz", p.lz),
        ],
        1,
    )?;
    let ext = p.extent();
    check_clearance(lattice, ext, "3D KP construction")?;
    let o = p.origin;
    let (x1, x2) = (p.lx as i64, (p.lx + p.lx_p) as i64);
    let (y1, y2) = (p.ly_pp as i64, (p.ly_pp + p.ly_p) as i64);
    let lz = p.lz;
    let left = Region::boxed(lattice, o, [p.lx, ext[1], lz]);
    let right = Region::boxed(lattice, add(o, [x2, 0, 0]), [p.lx_pp, ext[1], lz]);
    Ok(match variant {
        Kp3dVariant::Split => {
            let bottom = Region::boxed(lattice, add(o, [x1, 0, 0]), [p.lx_p, p.ly_pp, lz]);
            let top = Region::boxed(lattice, add(o, [x1, y2, 0]), [p.lx_p, p.ly, lz]);
            Tripartition {
                a: right,
                b: bottom.union(&top),
                c: left,
            }
        }
        Kp3dVariant::Arcs => {
            let a = Region::boxed(lattice, add(o, [x1, 0, 0]), [p.lx_p + p.lx_pp, p.ly_pp, lz]);
            let side = Region::boxed(lattice, add(o, [x2, y1, 0]), [p.lx_pp, p.ly_p, lz]);
            let top = Region::boxed(lattice, add(o, [x1, y2, 0]), [p.lx_p + p.lx_pp, p.ly, lz]);
            Tripartition {
                a,
                b: side.union(&top),
                c: left,
            }
        }
    })
}

/// Sites with coordinate along `axis` in `[0, extent / 2)`.
pub fn half_cylinder(lattice: &Lattice, axis: usize) -> Result<Region> {
    if lattice.ndim() != 2 {
        return Err(Error::Geometry("half cylinder needs a 2D torus".into()));
    }
    if axis > 1 {
        return Err(Error::Geometry(format!("axis {axis} on a 2D torus")));
    }
    let e = lattice.extent(axis);
    if !e.is_multiple_of(2) {
        return Err(Error::Geometry(format!("odd extent {e} along the cylinder axis")));
    }
    Ok(Region::new(
        lattice,
        lattice.sites().filter(|s| (s[axis] as usize) < e / 2),
    ))
}
