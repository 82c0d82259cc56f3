//! Exact entanglement entropies of stabilizer states and their combinations.
//!
//! For a stabilizer group `G` on `N` qubits and a region `R` with `N_R`
//! qubits, `S(R) = N_R - dim G_R` bits, where `G_R` is the subgroup supported
//! inside `R`. When the state is pure this equals
//! `rank(M restricted to R) - N_R`, which only needs the rows touching `R`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::lattice::Lattice;
use crate::models::{StabilizerModel, SymmetryLine};
use crate::pauli::{qubit_columns, PauliString};
use crate::regions::{
    dumbbell3d_regions, dumbbell_regions, half_cylinder, kp3d_regions, kp_regions, lw_regions, Dumbbell3dParams,
    DumbbellParams, Kp3dParams, Kp3dVariant, KpParams, LwParams, Region, Tripartition,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub sites: usize,
    pub n_qubits: usize,
    pub dim_gr: usize,
    pub entropy: usize,
}

fn check_region(model: &StabilizerModel, region: &Region) -> Result<()> {
    let dims = model.lattice().dims();
    for s in region.sites() {
        for (a, &d) in dims.iter().enumerate() {
            if s[a] < 0 || s[a] as usize >= d {
                return Err(Error::Dimension(format!("site {s:?} lies outside the {dims:?} lattice")));
            }
        }
        if s[dims.len()..].iter().any(|&c| c != 0) {
            return Err(Error::Dimension(format!("site {s:?} has coordinates beyond a {}D lattice", dims.len())));
        }
    }
    Ok(())
}

/// Rows with support touching the masked qubits, restricted to `cols`.
fn restricted(model: &StabilizerModel, touches: &[bool], cols: &[usize]) -> BinaryMatrix {
    let rows: Vec<usize> = model
        .supports()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|&q| touches[q]))
        .map(|(r, _)| r)
        .collect();
    model.matrix().select_rows(&rows).select_columns(cols)
}

/// `log2 |G_R|` for the qubit set given by `mask`.
pub fn subgroup_dim(model: &StabilizerModel, mask: &[bool]) -> usize {
    let n = model.n_qubits();
    let outside_mask: Vec<bool> = mask.iter().map(|&b| !b).collect();
    let outside: Vec<usize> = (0..n).filter(|&q| !mask[q]).collect();
    if outside.is_empty() {
        return model.rank();
    }
    let r_out = restricted(model, &outside_mask, &qubit_columns(&outside)).rank();
    model.rank() - r_out
}

pub fn entropy(model: &StabilizerModel, region: &Region) -> Result<EntropyReport> {
    check_region(model, region)?;
    let lattice = model.lattice();
    let qubits = region.qubits(lattice);
    let n_r = qubits.len();
    let mask = region.qubit_mask(lattice);
    let dim_gr = if model.degeneracy() == 0 {
        if n_r == 0 {
            0
        } else {
            let r_in = restricted(model, &mask, &qubit_columns(&qubits)).rank();
            n_r - (r_in - n_r)
        }
    } else {
        subgroup_dim(model, &mask)
    };
    Ok(EntropyReport {
        sites: region.len(),
        n_qubits: n_r,
        dim_gr,
        entropy: n_r - dim_gr,
    })
}

pub fn entropy_bits(model: &StabilizerModel, region: &Region) -> Result<i64> {
    Ok(entropy(model, region)?.entropy as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum RegionSpec {
    Kp(KpParams),
    Lw(LwParams),
    Dumbbell(DumbbellParams),
    Dumbbell3d(Dumbbell3dParams),
    Kp3d { variant: Kp3dVariant, params: Kp3dParams },
    Explicit,
}

impl RegionSpec {
    pub fn build(&self, lattice: &Lattice) -> Result<Tripartition> {
        match self {
            RegionSpec::Kp(p) => kp_regions(lattice, p),
            RegionSpec::Lw(p) => lw_regions(lattice, p),
            RegionSpec::Dumbbell(p) => dumbbell_regions(lattice, p),
            RegionSpec::Dumbbell3d(p) => dumbbell3d_regions(lattice, p),
            RegionSpec::Kp3d { variant, params } => kp3d_regions(lattice, *variant, params),
            RegionSpec::Explicit => Err(Error::Geometry("explicit regions carry no builder".into())),
        }
    }

    /// Extent of the construction along each axis.
    pub fn extent(&self) -> [usize; 3] {
        match self {
            RegionSpec::Kp(p) => p.extent(),
            RegionSpec::Lw(p) => p.extent(),
            RegionSpec::Dumbbell(p) => p.extent(),
            RegionSpec::Dumbbell3d(p) => p.extent(),
            RegionSpec::Kp3d { params, .. } => params.extent(),
            RegionSpec::Explicit => [0, 0, 0],
        }
    }
}

/// The seven subregion entropies and their alternating sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoSummary {
    pub regions: RegionSpec,
    pub s_a: i64,
    pub s_b: i64,
    pub s_c: i64,
    pub s_ab: i64,
    pub s_bc: i64,
    pub s_ac: i64,
    pub s_abc: i64,
    pub value: i64,
}

impl TopoSummary {
    pub fn entropies(&self) -> [i64; 7] {
        [self.s_a, self.s_b, self.s_c, self.s_ab, self.s_bc, self.s_ac, self.s_abc]
    }

    /// `S_AB + S_BC - S_B - S_ABC`, non-negative by strong subadditivity.
    pub fn conditional_mutual_information(&self) -> i64 {
        self.s_ab + self.s_bc - self.s_b - self.s_abc
    }
}

pub fn tripartite_information(model: &StabilizerModel, parts: &Tripartition) -> Result<TopoSummary> {
    tripartite_with_spec(model, parts, RegionSpec::Explicit)
}

fn tripartite_with_spec(model: &StabilizerModel, parts: &Tripartition, spec: RegionSpec) -> Result<TopoSummary> {
    if !parts.pairwise_disjoint() {
        return Err(Error::Geometry("regions A, B, C overlap".into()));
    }
    let (a, b, c) = (&parts.a, &parts.b, &parts.c);
    let combos = [
        a.clone(),
        b.clone(),
        c.clone(),
        a.union(b),
        b.union(c),
        a.union(c),
        parts.union(),
    ];
    // warm the shared caches before fanning out
    model.rank();
    model.supports();
    let s: Vec<i64> = combos
        .par_iter()
        .map(|r| entropy_bits(model, r))
        .collect::<Result<_>>()?;
    Ok(TopoSummary {
        regions: spec,
        s_a: s[0],
        s_b: s[1],
        s_c: s[2],
        s_ab: s[3],
        s_bc: s[4],
        s_ac: s[5],
        s_abc: s[6],
        value: s[0] + s[1] + s[2] - s[3] - s[4] - s[5] + s[6],
    })
}

/// Builds the regions described by `spec` and evaluates their tripartite information.
pub fn s_topo(model: &StabilizerModel, spec: &RegionSpec) -> Result<TopoSummary> {
    let parts = spec.build(model.lattice())?;
    tripartite_with_spec(model, &parts, spec.clone())
}

pub fn s_topo_kp(model: &StabilizerModel, p: &KpParams) -> Result<TopoSummary> {
    s_topo(model, &RegionSpec::Kp(*p))
}

pub fn s_topo_lw(model: &StabilizerModel, p: &LwParams) -> Result<TopoSummary> {
    s_topo(model, &RegionSpec::Lw(*p))
}

pub fn s_dumb(model: &StabilizerModel, p: &DumbbellParams) -> Result<TopoSummary> {
    s_topo(model, &RegionSpec::Dumbbell(*p))
}

pub fn s_dumb3d(model: &StabilizerModel, p: &Dumbbell3dParams) -> Result<TopoSummary> {
    s_topo(model, &RegionSpec::Dumbbell3d(*p))
}

pub fn s_topo_kp3d(model: &StabilizerModel, variant: Kp3dVariant, p: &Kp3dParams) -> Result<TopoSummary> {
    s_topo(model, &RegionSpec::Kp3d { variant, params: *p })
}

/// Smallest torus extents that keep `spec` clear of its periodic images.
pub fn auto_torus(spec: &RegionSpec, ndim: usize, min: usize) -> Vec<usize> {
    let e = spec.extent();
    (0..ndim).map(|a| (e[a] + crate::regions::CLEARANCE).max(min)).collect()
}

/// Linear fit of the half-cylinder entropy within one commensurability class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFit {
    /// `gcd(circumference, period)` shared by every point in the class.
    pub class: usize,
    pub circumferences: Vec<usize>,
    pub entropies: Vec<i64>,
    /// Bits per unit circumference per cut.
    pub slope: f64,
    /// Constant correction per cut.
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderFit {
    pub period: usize,
    pub circumferences: Vec<usize>,
    pub entropies: Vec<i64>,
    pub classes: Vec<ClassFit>,
}

impl CylinderFit {
    /// The correction for the class containing `circumference`.
    pub fn beta_for(&self, circumference: usize) -> Option<f64> {
        let g = gcd(circumference, self.period);
        self.classes.iter().find(|c| c.class == g).map(|c| c.beta)
    }
}

/// Half-cylinder entropies for models whose circumference runs along axis 0.
///
/// The torus has two cuts, so the fitted slope and intercept are halved.
pub fn cylinder_correction(models: &[StabilizerModel], period: usize) -> Result<CylinderFit> {
    if period == 0 {
        return Err(Error::Fit("period must be positive".into()));
    }
    let mut points: Vec<(usize, i64)> = models
        .par_iter()
        .map(|m| {
            if m.degeneracy() != 0 {
                return Err(Error::Fit(format!(
                    "{} has a {}-fold degenerate ground space; add winding strings to select a state",
                    m.name(),
                    m.degeneracy()
                )));
            }
            let half = half_cylinder(m.lattice(), 1)?;
            Ok((m.lattice().extent(0), entropy_bits(m, &half)?))
        })
        .collect::<Result<_>>()?;
    points.sort();
    let mut classes = Vec::new();
    for class in (1..=period).filter(|d| period.is_multiple_of(*d)) {
        let pts: Vec<(usize, i64)> = points.iter().copied().filter(|&(l, _)| gcd(l, period) == class).collect();
        if pts.is_empty() {
            continue;
        }
        if pts.len() < 2 {
            return Err(Error::Fit(format!(
                "class gcd(L, {period}) = {class} has a single circumference"
            )));
        }
        let (l0, s0) = (pts[0].0 as f64, pts[0].1 as f64);
        let (l1, s1) = (pts[1].0 as f64, pts[1].1 as f64);
        let slope = (s1 - s0) / (l1 - l0);
        let intercept = s0 - slope * l0;
        for &(l, s) in &pts[2..] {
            let resid = s as f64 - (slope * l as f64 + intercept);
            if resid.abs() > 1e-9 {
                return Err(Error::Fit(format!(
                    "circumference {l} misses the linear fit by {resid} bits"
                )));
            }
        }
        classes.push(ClassFit {
            class,
            circumferences: pts.iter().map(|p| p.0).collect(),
            entropies: pts.iter().map(|p| p.1).collect(),
            slope: slope / 2.0,
            beta: intercept / 2.0,
        });
    }
    Ok(CylinderFit {
        period,
        circumferences: points.iter().map(|p| p.0).collect(),
        entropies: points.iter().map(|p| p.1).collect(),
        classes,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds one model per circumference with `build` and fits the cylinder correction.
pub fn cylinder_correction_with<F>(circumferences: &[usize], period: usize, build: F) -> Result<CylinderFit>
where
    F: Fn(usize) -> Result<StabilizerModel> + Sync,
{
    let models: Vec<StabilizerModel> = circumferences.par_iter().map(|&l| build(l)).collect::<Result<_>>()?;
    cylinder_correction(&models, period)
}

/// Stabilizers supported in the region that are not products of generators inside it.
pub fn nonlocal_count(model: &StabilizerModel, region: &Region) -> Result<usize> {
    let report = entropy(model, region)?;
    let mask = region.qubit_mask(model.lattice());
    let inside: Vec<usize> = model
        .supports()
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty() && s.iter().all(|&q| mask[q]))
        .map(|(r, _)| r)
        .collect();
    let local = model.matrix().select_rows(&inside).rank();
    Ok(report.dim_gr - local)
}

/// `|<P>|` in the stabilizer state: 1 when `P` is in the group, else 0.
pub fn expectation_magnitude(model: &StabilizerModel, p: &PauliString) -> u8 {
    u8::from(model.contains(p))
}

/// The line operator restricted to `len` consecutive sites starting `start` sites along the line.
pub fn open_string(model: &StabilizerModel, line: &SymmetryLine, start: i64, len: usize) -> Result<PauliString> {
    let lattice = model.lattice();
    let period = line.pattern.len() as i64;
    if len == 0 || len + 1 > lattice.extent(line.axis) {
        return Err(Error::Geometry(format!(
            "open string of length {len} on extent {}",
            lattice.extent(line.axis)
        )));
    }
    let mut p = PauliString::identity(lattice.n_qubits());
    for t in start..start + len as i64 {
        let mut s = line.base;
        s[line.axis] += t;
        for (k, &l) in line.pattern[t.rem_euclid(period) as usize].iter().enumerate() {
            p.set(lattice.qubit(s, k), l);
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringCorrelationResult {
    pub length: usize,
    pub value: i64,
    pub endpoints: (String, String),
}

/// `|<O_1 g O_L>| - |<O_1>| |<O_L>|` at caller-supplied endpoints.
pub fn string_correlation(
    model: &StabilizerModel,
    string: &PauliString,
    length: usize,
    o1: &PauliString,
    ol: &PauliString,
) -> Result<StringCorrelationResult> {
    let full = o1.mul(string)?.mul(ol)?;
    let value = expectation_magnitude(model, &full) as i64
        - (expectation_magnitude(model, o1) * expectation_magnitude(model, ol)) as i64;
    Ok(StringCorrelationResult {
        length,
        value,
        endpoints: (label(o1), label(ol)),
    })
}

fn label(p: &PauliString) -> String {
    if p.is_identity() {
        return "I".into();
    }
    p.support().map(|q| format!("{}{}", p.get(q).as_char(), q)).collect::<Vec<_>>().join(" ")
}

/// True when every value equals 1, i.e. the string order does not decay.
pub fn infinite_string_order(results: &[StringCorrelationResult]) -> bool {
    !results.is_empty() && results.iter().all(|r| r.value == 1)
}

/// Best value of the string correlation over all Pauli endpoints supported in `n1` and `n2`.
pub fn max_endpoint_value(model: &StabilizerModel, string: &PauliString, n1: &Region, n2: &Region) -> Result<i64> {
    if !n1.is_disjoint(n2) {
        return Err(Error::Geometry("endpoint neighbourhoods overlap".into()));
    }
    let lattice = model.lattice();
    let both = n1.union(n2);
    if model.contains(string) {
        let mask = |r: &Region| r.qubit_mask(lattice);
        let d = subgroup_dim(model, &mask(&both));
        let d1 = subgroup_dim(model, &mask(n1));
        let d2 = subgroup_dim(model, &mask(n2));
        return Ok(i64::from(d > d1 + d2));
    }
    if model.anticommuting_generator(string).is_none() {
        // a logical operator: no endpoint dressing can make it a stabilizer
        return Ok(0);
    }
    let inside = both.qubit_mask(lattice);
    let outside: Vec<usize> = (0..model.n_qubits()).filter(|&q| !inside[q]).collect();
    let cols = qubit_columns(&outside);
    let restricted_m = model.matrix().select_columns(&cols);
    let v = crate::gf2::BinaryMatrix::from_rows(2 * model.n_qubits(), std::iter::once(&string.to_symplectic()))?
        .select_columns(&cols)
        .row(0);
    Ok(i64::from(restricted_m.in_rowspace(&v)?))
}

/// Sites within Chebyshev distance `radius` of `centre`.
pub fn neighbourhood(lattice: &Lattice, centre: crate::lattice::Site, radius: i64) -> Region {
    let mut sites = Vec::new();
    let rz = if lattice.ndim() == 3 { radius } else { 0 };
    for dz in -rz..=rz {
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                sites.push([centre[0] + dx, centre[1] + dy, centre[2] + dz]);
            }
        }
    }
    Region::new(lattice, sites)
}

/// Open horizontal cluster-state string in row `y` with its closing endpoint operators.
///
/// `XI` strings cover `x0 + 1 ..= x0 + len` and end on `IZ` pairs in rows `y`,
/// `y + 1` at columns `x0` and `x0 + len`. `IX` strings cover `x0 .. x0 + len`
/// and end on `ZI` pairs in rows `y - 1`, `y` at the same columns.
pub fn cluster2d_string_with_endpoints(
    lattice: &Lattice,
    qubit: usize,
    y: i64,
    x0: i64,
    len: usize,
) -> Result<(PauliString, PauliString, PauliString)> {
    use crate::pauli::Pauli;
    if qubit > 1 || lattice.qubits_per_site() != 2 {
        return Err(Error::Dimension("cluster strings use qubit 0 or 1 of a Q = 2 lattice".into()));
    }
    let n = lattice.n_qubits();
    let first = if qubit == 0 { x0 + 1 } else { x0 };
    let string: Vec<(usize, Pauli)> = (first..first + len as i64)
        .map(|x| (lattice.qubit([x, y, 0], qubit), Pauli::X))
        .collect();
    let (ek, rows) = if qubit == 0 { (1, [y, y + 1]) } else { (0, [y - 1, y]) };
    let end = |x: i64| -> Result<PauliString> {
        let ops: Vec<(usize, Pauli)> = rows.iter().map(|&r| (lattice.qubit([x, r, 0], ek), Pauli::Z)).collect();
        PauliString::from_sparse(n, &ops)
    };
    Ok((PauliString::from_sparse(n, &string)?, end(x0)?, end(x0 + len as i64)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_2d, ModelId};

    #[test]
    fn trivial_regions() {
        let m = build_2d(ModelId::Cluster2d, 4, 4).unwrap();
        assert_eq!(entropy(&m, &Region::empty()).unwrap().entropy, 0);
        assert_eq!(entropy(&m, &Region::full(m.lattice())).unwrap().entropy, 0);
        let one = Region::new(m.lattice(), [[1, 1, 0]]);
        assert_eq!(entropy(&m, &one).unwrap().entropy, 2);
    }

    #[test]
    fn general_path_matches_pure_path() {
        let m = build_2d(ModelId::Cluster2d, 5, 5).unwrap();
        let l = m.lattice().clone();
        for r in [
            Region::boxed(&l, [0, 0, 0], [2, 3, 1]),
            Region::boxed(&l, [1, 2, 0], [3, 3, 1]),
            Region::new(&l, [[0, 0, 0], [3, 3, 0], [4, 1, 0]]),
        ] {
            let pure = entropy(&m, &r).unwrap();
            let general = r.qubits(&l).len() - subgroup_dim(&m, &r.qubit_mask(&l));
            assert_eq!(pure.entropy, general);
        }
    }

    #[test]
    fn region_outside_lattice_rejected() {
        let m = build_2d(ModelId::Cluster2d, 4, 4).unwrap();
        let mut bad = Region::empty();
        bad.insert(&Lattice::square(8, 8, 2).unwrap(), [6, 6, 0]);
        assert!(entropy(&m, &bad).is_err());
    }

    #[test]
    fn overlapping_parts_rejected() {
        let m = build_2d(ModelId::Cluster2d, 6, 6).unwrap();
        let l = m.lattice();
        let r = Region::boxed(l, [0, 0, 0], [2, 2, 1]);
        let t = Tripartition {
            a: r.clone(),
            b: r.clone(),
            c: Region::empty(),
        };
        assert!(tripartite_information(&m, &t).is_err());
    }

    #[test]
    fn cylinder_rejects_degenerate() {
        let m = build_2d(ModelId::CubicCompactified { q: 3 }, 6, 6).unwrap();
        assert!(m.degeneracy() > 0);
        assert!(cylinder_correction(&[m], 1).is_err());
    }
}
