//! Independent checks of the engine against dense statevectors and brute-force enumeration.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use stabent::entropy::{entropy_bits, s_dumb, s_topo_kp, s_topo_lw};
use stabent::models::{build_2d, cluster2d_from_circuit, same_rowspace, ModelId};
use stabent::pauli::{generator_matrix, supported_subgroup_dim, Gate};
use stabent::regions::{DumbbellParams, KpParams, LwParams, Region};
use stabent::{BinaryMatrix, PauliString};

const L: usize = 3;
const N: usize = 2 * L * L;

fn qubit(i: i64, j: i64, k: usize) -> usize {
    let (i, j) = (i.rem_euclid(L as i64) as usize, j.rem_euclid(L as i64) as usize);
    2 * (i + L * j) + k
}

/// Qubit index of a fine-lattice point, read off the diagonal coarse-graining.
fn fine_to_qubit(a: i64, b: i64) -> usize {
    let k = (a + b).rem_euclid(2);
    qubit((a + b - k) / 2, (b - a + k) / 2, k as usize)
}

fn fine_edges() -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for i in 0..L as i64 {
        for j in 0..L as i64 {
            for k in 0..2 {
                let (a, b) = (i - j + k, i + j);
                let me = qubit(i, j, k as usize);
                for (da, db) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let other = fine_to_qubit(a + da, b + db);
                    edges.insert((me.min(other), me.max(other)));
                }
            }
        }
    }
    edges
}

fn cluster_state() -> Vec<f64> {
    let edges = fine_edges();
    let norm = (1u64 << N) as f64;
    (0..1usize << N)
        .map(|b| {
            let parity = edges.iter().filter(|&&(u, v)| (b >> u) & 1 == 1 && (b >> v) & 1 == 1).count();
            if parity % 2 == 0 {
                1.0 / norm.sqrt()
            } else {
                -1.0 / norm.sqrt()
            }
        })
        .collect()
}

fn masks(p: &PauliString) -> (usize, usize) {
    let (mut x, mut z) = (0, 0);
    for q in p.support() {
        let (xb, zb) = p.get(q).bits();
        x |= usize::from(xb) << q;
        z |= usize::from(zb) << q;
    }
    (x, z)
}

/// `|⟨ψ| X^x Z^z |ψ⟩|`; the Y phase does not change the magnitude.
fn expectation(psi: &[f64], p: &PauliString) -> f64 {
    let (x, z) = masks(p);
    let s: f64 = psi
        .iter()
        .enumerate()
        .map(|(b, &a)| {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            psi[b ^ x] * sign * a
        })
        .sum();
    s.abs()
}

fn dense_entropy(psi: &[f64], qubits: &[usize]) -> usize {
    let inside: usize = qubits.iter().map(|&q| 1 << q).sum();
    let rest: Vec<usize> = (0..N).filter(|q| inside >> q & 1 == 0).collect();
    let mut m = DMatrix::<f64>::zeros(1 << qubits.len(), 1 << rest.len());
    for (b, &a) in psi.iter().enumerate() {
        let r: usize = qubits.iter().enumerate().map(|(i, &q)| ((b >> q) & 1) << i).sum();
        let c: usize = rest.iter().enumerate().map(|(i, &q)| ((b >> q) & 1) << i).sum();
        m[(r, c)] = a;
    }
    let svals = m.svd(false, false).singular_values;
    let rank = svals.iter().filter(|&&s| s > 1e-9).count();
    assert!(rank.is_power_of_two());
    rank.trailing_zeros() as usize
}

#[test]
fn dense_cluster_state_is_the_unique_ground_state() {
    let model = build_2d(ModelId::Cluster2d, L, L).unwrap();
    assert_eq!(model.n_qubits(), N);
    assert_eq!(model.degeneracy(), 0);
    let psi = cluster_state();
    for r in 0..model.matrix().nrows() {
        let g = model.generator(r);
        assert!((expectation(&psi, &g) - 1.0).abs() < 1e-12, "{}", model.describe_row(r));
    }
    // a single-qubit Z is not a stabilizer
    let z0 = PauliString::parse(&format!("Z{}", "I".repeat(N - 1))).unwrap();
    assert!(expectation(&psi, &z0) < 1e-12);
}

#[test]
fn dense_entropies_match_rank_formula() {
    let model = build_2d(ModelId::Cluster2d, L, L).unwrap();
    let lattice = model.lattice().clone();
    let psi = cluster_state();
    let shapes: Vec<Vec<[i64; 3]>> = vec![
        vec![[0, 0, 0]],
        vec![[0, 0, 0], [1, 0, 0]],
        vec![[0, 0, 0], [0, 1, 0]],
        vec![[0, 0, 0], [1, 1, 0]],
        vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]],
        vec![[0, 0, 0], [1, 0, 0], [2, 0, 0]],
        vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]],
    ];
    for sites in shapes {
        let region = Region::new(&lattice, sites.iter().copied());
        let dense = dense_entropy(&psi, &region.qubits(&lattice));
        assert_eq!(entropy_bits(&model, &region).unwrap(), dense as i64, "{sites:?}");
    }
}

#[test]
fn circuit_construction_matches_templates() {
    for (lx, ly) in [(4, 4), (6, 5), (8, 8)] {
        let a = build_2d(ModelId::Cluster2d, lx, ly).unwrap();
        let b = cluster2d_from_circuit(lx, ly).unwrap();
        assert!(same_rowspace(&a, &b).unwrap());
    }
    // the oracle's own fine-lattice graph agrees as well
    let model = build_2d(ModelId::Cluster2d, L, L).unwrap();
    let edges = fine_edges();
    let mut gens = Vec::new();
    for v in 0..N {
        let mut p = PauliString::identity(N);
        p.set(v, stabent::Pauli::X);
        for &(a, b) in &edges {
            if a == v {
                p.set(b, stabent::Pauli::Z);
            } else if b == v {
                p.set(a, stabent::Pauli::Z);
            }
        }
        gens.push(p);
    }
    let graph = generator_matrix(N, &gens).unwrap();
    assert_eq!(graph.rank(), N);
    assert_eq!(graph.stack(model.matrix()).unwrap().rank(), N);
}

fn brute_force_subgroup_dim(m: &BinaryMatrix, mask: &[usize]) -> usize {
    let n = m.width() / 2;
    let outside: Vec<usize> = (0..n).filter(|q| !mask.contains(q)).collect();
    let mut seen = BTreeSet::new();
    for combo in 0u32..1 << m.nrows() {
        let mut acc = vec![false; m.width()];
        for r in 0..m.nrows() {
            if combo >> r & 1 == 1 {
                for (c, bit) in acc.iter_mut().enumerate() {
                    *bit ^= m.get(r, c);
                }
            }
        }
        if outside.iter().all(|&q| !acc[2 * q] && !acc[2 * q + 1]) {
            seen.insert(acc);
        }
    }
    seen.len().trailing_zeros() as usize
}

#[test]
fn subgroup_dim_matches_enumeration() {
    // a 1D cluster ring on 6 qubits with a duplicated row
    let n = 6;
    let mut m = BinaryMatrix::new(2 * n);
    let mut rows = Vec::new();
    for v in 0..n {
        let mut p = PauliString::identity(n);
        p.set(v, stabent::Pauli::X);
        p.set((v + 1) % n, stabent::Pauli::Z);
        p.set((v + n - 1) % n, stabent::Pauli::Z);
        rows.push(p);
    }
    rows.push(rows[0].mul(&rows[2]).unwrap());
    for p in &rows {
        m.push_row(&p.to_symplectic()).unwrap();
    }
    for mask in [vec![], vec![0], vec![0, 1, 2], vec![1, 2, 3, 4], vec![0, 1, 2, 3, 4, 5], vec![0, 2, 4]] {
        assert_eq!(
            supported_subgroup_dim(&m, &mask).unwrap(),
            brute_force_subgroup_dim(&m, &mask),
            "{mask:?}"
        );
    }
}

#[test]
fn gates_are_involutions_on_the_frame() {
    let p = PauliString::parse("XYZIXZ").unwrap();
    for g in [Gate::h(1), Gate::cz(0, 4), Gate::cnot(2, 5)] {
        let once = stabent::conjugate_by_gate(&p, &g).unwrap();
        assert_eq!(stabent::conjugate_by_gate(&once, &g).unwrap(), p);
    }
}

#[test]
fn cluster_values_do_not_depend_on_block_size() {
    let m = build_2d(ModelId::Cluster2d, 24, 24).unwrap();
    for l in 3..=7 {
        assert_eq!(s_topo_kp(&m, &KpParams::square(l)).unwrap().value, -2);
        assert_eq!(s_topo_lw(&m, &LwParams::square(l)).unwrap().value, -2);
    }
    for t in 1..=3 {
        assert_eq!(s_dumb(&m, &DumbbellParams::new(4, 4, 3, t, t)).unwrap().value, -2);
    }
}
