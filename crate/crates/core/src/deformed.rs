//! Rényi-2 entropies of the controlled-phase deformed cluster state.
//!
//! `|θ⟩` applies a controlled phase `diag(1, 1, 1, e^{iθ})` to every edge of the
//! fine square lattice starting from `|+⟩^N`. At θ = π it is the cluster state,
//! at θ = 0 a product state. Purities of the coarse-grained regions reduce to
//! loops of 4×4 transfer matrices acting on the doubled boundary spin
//! `(s, s')` of the two replicas. Boundary states are ordered
//! `(0,0), (0,1), (1,0), (1,1)`.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Replica mismatch `s - s'` of each doubled boundary state.
const MISMATCH: [i32; 4] = [0, -1, 1, 0];

/// Largest number of boundary sites the oracle enumerates.
pub const ORACLE_MAX_BOUNDARY: usize = 14;

const IMAG_TOL: f64 = 1e-12;

fn phase(theta: f64, m: i32) -> C64 {
    C64::from_polar(1.0, theta * m as f64)
}

/// `|(1 + e^{iθm}) / 2|²`, the weight of an exterior site with total mismatch `m`.
pub fn exterior_weight(theta: f64, m: i32) -> f64 {
    ((C64::new(1.0, 0.0) + phase(theta, m)) / 2.0).norm_sqr()
}

/// Transfer matrices and boundary vectors for one θ.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferSet {
    pub theta: f64,
    /// One unit of straight boundary.
    pub e: Matrix4<C64>,
    /// A convex corner, `E · C_Γ`.
    pub c: Matrix4<C64>,
    /// Exterior site touching a single boundary site.
    pub c_gamma: Matrix4<C64>,
    /// Junction where a boundary meets a third region.
    pub k: Matrix4<C64>,
    pub r: Vector4<C64>,
    pub l: Vector4<C64>,
    pub r_gamma: Vector4<C64>,
    pub l_gamma: Vector4<C64>,
    /// `|+⟩ ⊗ |+⟩` in the doubled basis.
    pub plus: Vector4<C64>,
}

fn bits(a: usize) -> (usize, usize) {
    (a >> 1, a & 1)
}

pub fn transfer_set(theta: f64) -> TransferSet {
    let edge = |u: usize, s: usize| phase(theta, (u * s) as i32);
    // exterior site contracted with two boundary sites, ket and bra legs
    let e = Matrix4::from_fn(|a, b| {
        let ((sa, sa_), (sb, sb_)) = (bits(a), bits(b));
        let amp: C64 = (0..2)
            .map(|u| edge(u, sa) * edge(u, sb) * edge(u, sa_).conj() * edge(u, sb_).conj())
            .sum();
        C64::new(amp.norm_sqr() / 16.0, 0.0)
    });
    let c_gamma = Matrix4::from_diagonal(&Vector4::from_fn(|a, _| {
        C64::new(exterior_weight(theta, MISMATCH[a]), 0.0)
    }));
    let k = Matrix4::from_fn(|a, c| {
        let s: f64 = (0..4)
            .map(|b| exterior_weight(theta, MISMATCH[a] + MISMATCH[b] + MISMATCH[c]))
            .sum();
        C64::new(s / 16.0, 0.0)
    });
    let plus = Vector4::repeat(C64::new(0.5, 0.0));
    let c = e * c_gamma;
    let r = c * plus;
    let r_gamma = c_gamma * plus;
    TransferSet {
        theta,
        e,
        c,
        c_gamma,
        k,
        r,
        l: r,
        r_gamma,
        l_gamma: r_gamma,
        plus,
    }
}

impl TransferSet {
    pub fn e_pow(&self, n: usize) -> Matrix4<C64> {
        self.e.pow(n as u32)
    }

    /// `⟨L| E^a C E^b |R⟩`.
    ///
    /// The outer vectors each absorb one straight unit and one corner, so this is
    /// the boundary loop of an `(a + 3) × (b + 2)` coarse rectangle.
    pub fn boundary_loop(&self, a: usize, b: usize) -> C64 {
        (self.l.transpose() * self.e_pow(a) * self.c * self.e_pow(b) * self.r)[0]
    }

    /// Boundary loop of an `x × y` coarse rectangle, `x, y ≥ 1`.
    fn f(&self, x: usize, y: usize) -> C64 {
        let g = &self.c_gamma;
        (self.plus.transpose() * g * self.e_pow(x - 1) * g * self.e_pow(y - 1) * g * self.plus)[0]
    }

    /// Open segment of length `n` ending on a corner.
    fn g(&self, n: usize) -> C64 {
        (self.plus.transpose() * self.e_pow(n - 1) * self.c_gamma * self.plus)[0]
    }

    fn sandwich(&self, ops: &[Matrix4<C64>]) -> C64 {
        let m = ops.iter().fold(Matrix4::identity(), |acc, op| acc * op);
        (self.plus.transpose() * m * self.plus)[0]
    }

    /// `Tr ρ²` of an `x × y` rectangle of coarse sites.
    pub fn rectangle_purity(&self, x: usize, y: usize) -> Result<f64> {
        check_lengths(&[("x", x), ("y", y)])?;
        real(self.f(x, y) * self.f(x, y), "rectangle purity")
    }
}

fn real(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what} has imaginary part {:e}", z.im)));
    }
    if !(z.re > 0.0 && z.re <= 1.0 + 1e-12) {
        return Err(Error::Numerical(format!("{what} = {} is not a purity", z.re)));
    }
    Ok(z.re)
}

fn check_lengths(lengths: &[(&str, usize)]) -> Result<()> {
    for &(name, v) in lengths {
        if v == 0 {
            return Err(Error::Geometry(format!("{name} must be at least 1")));
        }
    }
    Ok(())
}

fn s2(p: f64) -> f64 {
    -p.log2()
}

/// Purities entering the KP combination; A and BC, B and C share a shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpPurities {
    pub b: f64,
    pub ab: f64,
    pub ac: f64,
    pub abc: f64,
}

impl KpPurities {
    /// `S_A + S_B + S_C - S_AB - S_BC - S_AC + S_ABC` with `S_A = S_BC`, `S_C = S_B`.
    pub fn value(&self) -> f64 {
        2.0 * s2(self.b) - s2(self.ab) - s2(self.ac) + s2(self.abc)
    }
}

/// KP layout in coarse sites: A is `lx × 2ly` on the left, C is `lx × ly` at the
/// bottom right and B sits on top of C.
pub fn kp_purities(theta: f64, lx: usize, ly: usize) -> Result<KpPurities> {
    check_lengths(&[("lx", lx), ("ly", ly)])?;
    let t = transfer_set(theta);
    let e = |n: usize| t.e_pow(n - 1);
    let g = t.c_gamma;
    let ab_loop = t.sandwich(&[g, e(lx), g, e(ly), t.k, e(lx), g, e(ly), g]);
    Ok(KpPurities {
        b: real(t.f(lx, ly) * t.f(lx, ly), "S_B purity")?,
        ab: real(t.f(2 * lx, 2 * ly) * ab_loop, "S_AB purity")?,
        ac: real(t.f(lx, 2 * ly) * t.f(2 * lx, ly) * t.g(ly) * t.g(lx), "S_AC purity")?,
        abc: real(t.f(2 * lx, 2 * ly) * t.f(2 * lx, 2 * ly), "S_ABC purity")?,
    })
}

pub fn renyi2_kp(theta: f64, lx: usize, ly: usize) -> Result<f64> {
    Ok(kp_purities(theta, lx, ly)?.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumbbellPurities {
    pub b: f64,
    pub ab: f64,
    pub bc: f64,
    pub abc: f64,
}

impl DumbbellPurities {
    /// `S_B + S_ABC - S_AB - S_BC`.
    pub fn value(&self) -> f64 {
        s2(self.b) + s2(self.abc) - s2(self.ab) - s2(self.bc)
    }
}

/// Dumbbell geometry in coarse sites: weights `lx × (t + w + b)` joined by a bar of
/// length `len` and width `w`, `b` sites above the bottom edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaDumbbell {
    pub len: usize,
    pub w: usize,
    pub t: usize,
    pub b: usize,
    pub lx: usize,
}

impl ThetaDumbbell {
    pub fn height(&self) -> usize {
        self.t + self.w + self.b
    }
}

pub fn dumbbell_purities(theta: f64, d: &ThetaDumbbell) -> Result<DumbbellPurities> {
    check_lengths(&[("L", d.len), ("w", d.w), ("t", d.t), ("b", d.b), ("lx", d.lx)])?;
    let t = transfer_set(theta);
    let e = |n: usize| t.e_pow(n - 1);
    let g = t.c_gamma;
    let (lx, len, w) = (d.lx, d.len, d.w);
    let weight = t.f(lx, d.height());
    let ab_loop = t.sandwich(&[g, e(lx), g, e(d.b), t.k, e(len), g, e(w), g]);
    let bc_loop = t.sandwich(&[g, e(w), g, e(len), t.k, e(d.t), g, e(lx), g]);
    let top = t.sandwich(&[e(len), t.k, e(d.t), g, e(lx), g]);
    let bottom = t.sandwich(&[g, e(lx), g, e(d.b), t.k, e(len)]);
    Ok(DumbbellPurities {
        b: real(t.f(len, w) * t.f(len, w), "S_B purity")?,
        ab: real(weight * ab_loop * t.g(d.t) * t.g(len), "S_AB purity")?,
        bc: real(weight * bc_loop * t.g(len) * t.g(d.b), "S_BC purity")?,
        abc: real(weight * weight * t.g(d.b) * t.g(d.t) * top * bottom, "S_ABC purity")?,
    })
}

pub fn renyi2_dumb(theta: f64, d: &ThetaDumbbell) -> Result<f64> {
    Ok(dumbbell_purities(theta, d)?.value())
}

/// Fine-lattice sites of a set of coarse sites: `(i, j)` holds `(i - j, i + j)` and `(i - j + 1, i + j)`.
pub fn coarse_to_fine(coarse: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let set: BTreeSet<(i64, i64)> = coarse
        .iter()
        .flat_map(|&(i, j)| [(i - j, i + j), (i - j + 1, i + j)])
        .collect();
    set.into_iter().collect()
}

pub fn coarse_rectangle(x0: i64, y0: i64, nx: usize, ny: usize) -> Vec<(i64, i64)> {
    (y0..y0 + ny as i64)
        .flat_map(|j| (x0..x0 + nx as i64).map(move |i| (i, j)))
        .collect()
}

fn fine_neighbours((x, y): (i64, i64)) -> [(i64, i64); 4] {
    [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
}

/// `Tr ρ²` of a fine-lattice region by enumerating boundary replica mismatches.
///
/// Gates inside the region or outside it cancel between ket and bra, so only the
/// mismatch `d = s - s'` of boundary sites matters. Each boundary site carries
/// weight 1/4 for `d = ±1` and 1/2 for `d = 0`; each exterior neighbour adds
/// `|(1 + e^{iθ Σd}) / 2|²` over the boundary sites it touches.
pub fn brute_force_purity(theta: f64, fine_sites: &[(i64, i64)]) -> Result<f64> {
    let region: BTreeSet<(i64, i64)> = fine_sites.iter().copied().collect();
    let boundary: Vec<(i64, i64)> = region
        .iter()
        .copied()
        .filter(|&s| fine_neighbours(s).iter().any(|n| !region.contains(n)))
        .collect();
    let nb = boundary.len();
    if nb > ORACLE_MAX_BOUNDARY {
        return Err(Error::Capacity(format!(
            "{nb} boundary sites exceed the oracle bound {ORACLE_MAX_BOUNDARY}"
        )));
    }
    let mut exterior: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, &s) in boundary.iter().enumerate() {
        for n in fine_neighbours(s) {
            if !region.contains(&n) {
                exterior.entry(n).or_default().push(i);
            }
        }
    }
    let groups: Vec<Vec<usize>> = exterior.into_values().collect();
    let total = 3usize.pow(nb as u32);
    let sum: f64 = (0..total)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(|mut code| {
            let mut d = [0i32; ORACLE_MAX_BOUNDARY];
            let mut weight = 1.0;
            for di in d.iter_mut().take(nb) {
                *di = (code % 3) as i32 - 1;
                code /= 3;
                weight *= if *di == 0 { 0.5 } else { 0.25 };
            }
            for grp in &groups {
                weight *= exterior_weight(theta, grp.iter().map(|&i| d[i]).sum());
            }
            weight
        })
        .sum();
    Ok(sum)
}

/// Leading Schmidt values of the single-row reduced density matrix viewed as a 1D state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub lambdas: Vec<f64>,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub const SPECTRUM_TOL: f64 = 1e-12;
pub const SPECTRUM_MAX_ITER: usize = 10_000;

/// Local MPO tensor of the row density matrix, `A[left][phys][right]`.
///
/// Physical index `(s_L, s_L', s_R, s_R')` covers the two fine sites of a coarse
/// site in ket and bra. The bond carries the exterior bits above and below the
/// row and the previous site's right spin in ket and bra.
pub fn row_mpo(theta: f64) -> Vec<C64> {
    let ph = |a: usize, b: usize| phase(theta, (a * b) as i32);
    let mut a = vec![C64::new(0.0, 0.0); 16 * 16 * 16];
    for l in 0..16 {
        let (e, f, prev, prev_) = ((l >> 3) & 1, (l >> 2) & 1, (l >> 1) & 1, l & 1);
        for p in 0..16 {
            let (sl, sl_, sr, sr_) = ((p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1);
            let dl = sl as i32 - sl_ as i32;
            let dr = sr as i32 - sr_ as i32;
            for e2 in 0..2 {
                for f2 in 0..2 {
                    let r = (e2 << 3) | (f2 << 2) | (sr << 1) | sr_;
                    let v = phase(theta, e as i32 * dl)
                        * phase(theta, e2 as i32 * dl)
                        * phase(theta, f2 as i32 * dr)
                        * phase(theta, f as i32 * dr)
                        * ph(prev, sl)
                        * ph(prev_, sl_).conj()
                        * ph(sl, sr)
                        * ph(sl_, sr_).conj()
                        * 0.25;
                    a[(l * 16 + p) * 16 + r] += v;
                }
            }
        }
    }
    a
}

/// One application of the doubled transfer map from the right: `V ← Σ A V A†`.
fn push_right(a: &[C64], v: &DMatrix<C64>) -> DMatrix<C64> {
    let mut av = vec![C64::new(0.0, 0.0); 16 * 16 * 16];
    // av[a][p][d] = Σ_b A[a][p][b] V[b][d]
    for ap in 0..256 {
        for b in 0..16 {
            let x = a[ap * 16 + b];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for d in 0..16 {
                av[ap * 16 + d] += x * v[(b, d)];
            }
        }
    }
    DMatrix::from_fn(16, 16, |i, c| {
        let mut s = C64::new(0.0, 0.0);
        for p in 0..16 {
            for d in 0..16 {
                s += av[(i * 16 + p) * 16 + d] * a[(c * 16 + p) * 16 + d].conj();
            }
        }
        s
    })
}

/// `V ← Σ Aᵀ V A*` from the left.
fn push_left(a: &[C64], v: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(16, 16, |b, d| {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..16 {
            for c in 0..16 {
                let vc = v[(i, c)];
                if vc.norm_sqr() == 0.0 {
                    continue;
                }
                for p in 0..16 {
                    s += vc * a[(i * 16 + p) * 16 + b] * a[(c * 16 + p) * 16 + d].conj();
                }
            }
        }
        s
    })
}

fn normalise(v: DMatrix<C64>) -> Result<DMatrix<C64>> {
    let tr = v.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::Numerical("environment trace vanished".into()));
    }
    let v = v / tr;
    Ok((&v + v.adjoint()) * C64::new(0.5, 0.0))
}

/// Squared Schmidt values at a cut from left and right environments, descending and normalised.
fn schmidt_weights(vl: &DMatrix<C64>, vr: &DMatrix<C64>) -> Result<Vec<f64>> {
    // eigenvalues of Vlᵀ Vr through the Hermitian form X Vlᵀ X with X = Vr^{1/2}
    let eig = vr.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    let x = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let h = &x * vl.transpose() * &x;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    let total: f64 = vals.iter().map(|x| x.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::Numerical("empty entanglement spectrum".into()));
    }
    // weights below the rounding floor are zero
    let floor = 64.0 * f64::EPSILON * total;
    for v in &mut vals {
        *v = if *v > floor { *v / total } else { 0.0 };
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

fn lambdas(weights: &[f64]) -> Vec<f64> {
    weights.iter().map(|w| w.sqrt()).collect()
}

/// Spectrum after exactly `steps` applications of the transfer map on each side.
pub fn row_spectrum_window(theta: f64, steps: usize) -> Result<Vec<f64>> {
    let a = row_mpo(theta);
    let mut vr = DMatrix::<C64>::identity(16, 16);
    let mut vl = DMatrix::<C64>::identity(16, 16);
    for _ in 0..steps {
        vr = normalise(push_right(&a, &vr))?;
        vl = normalise(push_left(&a, &vl))?;
    }
    Ok(lambdas(&schmidt_weights(&vl, &vr)?))
}

/// Top-`k` Schmidt values of the row density matrix at an infinite cut.
///
/// Environments are iterated from the identity until the squared Schmidt values
/// change by less than `tol` between sweeps.
pub fn row_spectrum(theta: f64, k: usize, tol: f64) -> Result<SpectrumResult> {
    row_spectrum_with_cap(theta, k, tol, SPECTRUM_MAX_ITER)
}

pub fn row_spectrum_with_cap(theta: f64, k: usize, tol: f64, max_iter: usize) -> Result<SpectrumResult> {
    if k < 2 {
        return Err(Error::Dimension("request at least two Schmidt values".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Dimension("tolerance must be positive".into()));
    }
    let a = row_mpo(theta);
    let mut vr = DMatrix::<C64>::identity(16, 16);
    let mut vl = DMatrix::<C64>::identity(16, 16);
    let mut prev = schmidt_weights(&vl, &vr)?;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        vr = normalise(push_right(&a, &vr))?;
        vl = normalise(push_left(&a, &vl))?;
        let cur = schmidt_weights(&vl, &vr)?;
        residual = cur.iter().zip(&prev).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prev = cur;
        if residual < tol {
            let mut lambdas = lambdas(&prev);
            lambdas.truncate(k.min(lambdas.len()));
            let gap = lambdas[0] - lambdas[1];
            return Ok(SpectrumResult {
                lambdas,
                gap,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}
