//! Translation-invariant stabilizer models and the model zoo.
//!
//! Plaquette templates list corners in the order NW, NE, SW, SE, which map to
//! offsets `(0,1)`, `(1,1)`, `(0,0)`, `(1,0)`. Cube templates list the top
//! face `z = 1` as NW, NE, SW, SE followed by the bottom face `z = 0` as
//! SE, SW, NE, NW, so argument `k + 4` sits antipodal to argument `k`.
//!
//! Coarse graining for the two-qubit cluster family: coarse site `(i, j)`
//! holds qubit 0 at fine square-lattice site `(i - j, i + j)` and qubit 1 at
//! `(i - j + 1, i + j)`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, Echelon};
use crate::lattice::{add, Lattice, Site};
use crate::pauli::{generator_matrix, Gate, GateKind, Pauli, PauliString};

pub const NW: Site = [0, 1, 0];
pub const NE: Site = [1, 1, 0];
pub const SW: Site = [0, 0, 0];
pub const SE: Site = [1, 0, 0];

/// Cube corners in template argument order.
pub const CUBE_CORNERS: [Site; 8] = [
    [0, 1, 1],
    [1, 1, 1],
    [0, 0, 1],
    [1, 0, 1],
    [1, 0, 0],
    [0, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub offset: Site,
    pub qubit: usize,
    pub letter: Pauli,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorTemplate {
    pub terms: Vec<Term>,
}

impl GeneratorTemplate {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// Builds a template from per-corner letter strings such as `"XZ"`; empty or
    /// `"I"`-only strings contribute nothing.
    pub fn from_corners(corners: &[Site], words: &[&str]) -> Result<Self> {
        assert_eq!(corners.len(), words.len());
        let mut terms = Vec::new();
        for (&offset, w) in corners.iter().zip(words) {
            for (qubit, c) in w.chars().enumerate() {
                let letter = Pauli::from_char(c)?;
                if letter != Pauli::I {
                    terms.push(Term { offset, qubit, letter });
                }
            }
        }
        Ok(Self { terms })
    }

    /// Builds a template from per-corner lists of 1-based qubit labels sharing one letter.
    pub fn from_labels(corners: &[Site], letter: Pauli, labels: &[&[usize]], q: usize) -> Self {
        let mut acc: HashMap<(Site, usize), Pauli> = HashMap::new();
        for (&offset, ls) in corners.iter().zip(labels) {
            for &l in *ls {
                let qubit = (l + q - 1) % q;
                let e = acc.entry((offset, qubit)).or_insert(Pauli::I);
                *e = e.mul(letter);
            }
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, l)| *l != Pauli::I)
            .map(|((offset, qubit), letter)| Term { offset, qubit, letter })
            .collect();
        terms.sort_by_key(|t| (t.offset, t.qubit));
        Self { terms }
    }

    pub fn span(&self) -> [i64; 3] {
        let mut span = [0; 3];
        for a in 0..3 {
            let lo = self.terms.iter().map(|t| t.offset[a]).min().unwrap_or(0);
            let hi = self.terms.iter().map(|t| t.offset[a]).max().unwrap_or(0);
            span[a] = hi - lo;
        }
        span
    }

    pub fn instantiate(&self, lattice: &Lattice, anchor: Site) -> PauliString {
        let mut p = PauliString::identity(lattice.n_qubits());
        for t in &self.terms {
            let q = lattice.qubit(add(anchor, t.offset), t.qubit);
            let cur = p.get(q);
            p.set(q, cur.mul(t.letter));
        }
        p
    }
}

/// A line operator: `pattern[t % pattern.len()]` on the `t`-th site of the line
/// through `base` along `axis`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryLine {
    pub axis: usize,
    pub base: Site,
    pub pattern: Vec<Vec<Pauli>>,
    pub label: String,
}

impl SymmetryLine {
    pub fn new(axis: usize, base: Site, pattern: &[&str], label: impl Into<String>) -> Result<Self> {
        let pattern = pattern
            .iter()
            .map(|w| w.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            axis,
            base,
            pattern,
            label: label.into(),
        })
    }

    pub fn operator(&self, lattice: &Lattice) -> Result<PauliString> {
        tile_pattern(lattice, &self.pattern, self.axis, self.base)
    }
}

fn tile_pattern(lattice: &Lattice, pattern: &[Vec<Pauli>], axis: usize, base: Site) -> Result<PauliString> {
    if axis >= lattice.ndim() {
        return Err(Error::Geometry(format!("axis {axis} on a {}D lattice", lattice.ndim())));
    }
    let period = pattern.len();
    let extent = lattice.extent(axis);
    if period == 0 || !extent.is_multiple_of(period) {
        return Err(Error::Geometry(format!(
            "pattern period {period} does not divide extent {extent}"
        )));
    }
    let q = lattice.qubits_per_site();
    let mut p = PauliString::identity(lattice.n_qubits());
    for t in 0..extent {
        let mut s = base;
        s[axis] += t as i64;
        let letters = &pattern[t % period];
        if letters.len() != q {
            return Err(Error::Dimension(format!(
                "pattern entry has {} letters for Q = {q}",
                letters.len()
            )));
        }
        for (k, &l) in letters.iter().enumerate() {
            p.set(lattice.qubit(s, k), l);
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Cluster2d,
    Stacked1d,
    Zigzag1d,
    OneformCluster,
    CubicCompactified { q: usize },
    Cluster3d,
    /// `Q` qubits per site each stabilized by `X`.
    Product { q: usize },
}

impl ModelId {
    pub fn qubits_per_site(self) -> usize {
        match self {
            ModelId::Cluster2d | ModelId::Stacked1d | ModelId::Zigzag1d | ModelId::Cluster3d => 2,
            ModelId::OneformCluster => 3,
            ModelId::CubicCompactified { q } => 2 * q,
            ModelId::Product { q } => q,
        }
    }

    pub fn ndim(self) -> usize {
        match self {
            ModelId::Cluster3d => 3,
            _ => 2,
        }
    }

    pub fn catalog() -> Vec<(&'static str, &'static str)> {
        vec![
            ("cluster2d", "coarse-grained square-lattice cluster state, Q = 2"),
            ("stacked1d", "decoupled horizontal 1D cluster chains, Q = 2"),
            ("zigzag1d", "zigzagging 1D cluster chains, Q = 2"),
            ("oneform_cluster", "cluster state with global and 1-form symmetry, Q = 3"),
            ("cubic_compactified(q)", "compactified cubic code, q a multiple of 3, Q = 2q"),
            ("cluster3d", "body-centred cubic cluster state, Q = 2, 3D"),
            ("product(q)", "product state of X eigenstates, Q = q"),
        ]
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Cluster2d => write!(f, "cluster2d"),
            ModelId::Stacked1d => write!(f, "stacked1d"),
            ModelId::Zigzag1d => write!(f, "zigzag1d"),
            ModelId::OneformCluster => write!(f, "oneform_cluster"),
            ModelId::CubicCompactified { q } => write!(f, "cubic_compactified({q})"),
            ModelId::Cluster3d => write!(f, "cluster3d"),
            ModelId::Product { q } => write!(f, "product({q})"),
        }
    }
}

impl FromStr for ModelId {
    type Err = Error;

    /// Accepts `cluster2d`, `cubic_compactified(3)`, `cubic-q3`, `product(2)` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let (head, arg) = match norm.find('(') {
            Some(i) if norm.ends_with(')') => (&norm[..i], Some(&norm[i + 1..norm.len() - 1])),
            _ => (norm.as_str(), None),
        };
        let parse_q = |a: &str| {
            a.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid parameter in model name {s:?}")))
        };
        let id = match (head, arg) {
            ("cluster2d", None) => ModelId::Cluster2d,
            ("stacked1d", None) => ModelId::Stacked1d,
            ("zigzag1d", None) => ModelId::Zigzag1d,
            ("oneform_cluster" | "oneform", None) => ModelId::OneformCluster,
            ("cluster3d", None) => ModelId::Cluster3d,
            ("cubic_compactified" | "cubic", Some(a)) => ModelId::CubicCompactified { q: parse_q(a)? },
            ("product", Some(a)) => ModelId::Product { q: parse_q(a)? },
            ("product", None) => ModelId::Product { q: 2 },
            _ => {
                if let Some(q) = head.strip_prefix("cubic_q") {
                    ModelId::CubicCompactified { q: parse_q(q)? }
                } else {
                    return Err(Error::Parse(format!("unknown model {s:?}")));
                }
            }
        };
        Ok(id)
    }
}

/// Generator templates of a zoo model.
pub fn templates(id: ModelId) -> Result<Vec<GeneratorTemplate>> {
    let plaq = [NW, NE, SW, SE];
    let t = |w: [&str; 4]| GeneratorTemplate::from_corners(&plaq, &w);
    match id {
        ModelId::Cluster2d => Ok(vec![t(["IZ", "IZ", "IZ", "XZ"])?, t(["ZX", "ZI", "ZI", "ZI"])?]),
        ModelId::Stacked1d => Ok(vec![t(["II", "II", "IZ", "XZ"])?, t(["II", "II", "ZX", "ZI"])?]),
        ModelId::Zigzag1d => Ok(vec![t(["IZ", "IZ", "II", "XI"])?, t(["IX", "II", "ZI", "ZI"])?]),
        ModelId::OneformCluster => Ok(vec![
            t(["IIZ", "ZXZ", "", "ZII"])?,
            t(["", "", "IZX", "IZI"])?,
            t(["IZI", "", "XZI", ""])?,
        ]),
        ModelId::CubicCompactified { q } => {
            if q == 0 || q % 3 != 0 {
                return Err(Error::Construction(format!(
                    "cubic_compactified needs q a positive multiple of 3, got {q}"
                )));
            }
            let n = 2 * q;
            let mut out = Vec::with_capacity(n);
            for i in 0..q {
                let k = 2 * i;
                out.push(GeneratorTemplate::from_labels(
                    &plaq,
                    Pauli::X,
                    &[&[k + 1, k + 2, k + 4], &[k + 2, k + 3], &[k + 2, k + 3], &[k + 1]],
                    n,
                ));
            }
            for i in 0..q {
                let k = 2 * i;
                out.push(GeneratorTemplate::from_labels(
                    &plaq,
                    Pauli::Z,
                    &[&[k + 4], &[k + 2, k + 3], &[k + 2, k + 3], &[k + 1, k + 3, k + 4]],
                    n,
                ));
            }
            Ok(out)
        }
        ModelId::Cluster3d => Ok(vec![
            GeneratorTemplate::from_corners(
                &CUBE_CORNERS,
                &["ZI", "ZI", "ZI", "ZI", "ZI", "ZX", "ZI", "ZI"],
            )?,
            GeneratorTemplate::from_corners(
                &CUBE_CORNERS,
                &["IZ", "XZ", "IZ", "IZ", "IZ", "IZ", "IZ", "IZ"],
            )?,
        ]),
        ModelId::Product { q } => Ok((0..q)
            .map(|qubit| {
                GeneratorTemplate::new(vec![Term {
                    offset: [0, 0, 0],
                    qubit,
                    letter: Pauli::X,
                }])
            })
            .collect()),
    }
}

/// Line symmetries known in closed form for the zoo.
pub fn symmetry_lines(id: ModelId, lattice: &Lattice) -> Result<Vec<SymmetryLine>> {
    let mut lines = Vec::new();
    let (lx, ly) = (lattice.extent(0) as i64, lattice.extent(1) as i64);
    match id {
        ModelId::Cluster2d => {
            for y in 0..ly {
                lines.push(SymmetryLine::new(0, [0, y, 0], &["XI"], format!("row {y} XI"))?);
                lines.push(SymmetryLine::new(0, [0, y, 0], &["IX"], format!("row {y} IX"))?);
            }
            for x in 0..lx {
                lines.push(SymmetryLine::new(1, [x, 0, 0], &["XI"], format!("column {x} XI"))?);
                lines.push(SymmetryLine::new(1, [x, 0, 0], &["IX"], format!("column {x} IX"))?);
            }
        }
        ModelId::CubicCompactified { q: 3 } => {
            let xs = ["XXXXII", "IIXXXX", "XXIIXX"];
            let zs = ["ZZZZII", "IIZZZZ", "ZZIIZZ"];
            // columns run through the same three words in the opposite cyclic order
            let xs_col = ["XXXXII", "XXIIXX", "IIXXXX"];
            let zs_col = ["ZZZZII", "ZZIIZZ", "IIZZZZ"];
            if lx % 3 == 0 {
                for y in 0..ly {
                    lines.push(SymmetryLine::new(0, [0, y, 0], &xs, format!("row {y} X"))?);
                    lines.push(SymmetryLine::new(0, [0, y, 0], &zs, format!("row {y} Z"))?);
                }
            }
            if ly % 3 == 0 {
                for x in 0..lx {
                    lines.push(SymmetryLine::new(1, [x, 0, 0], &xs_col, format!("column {x} X"))?);
                    lines.push(SymmetryLine::new(1, [x, 0, 0], &zs_col, format!("column {x} Z"))?);
                }
            }
        }
        _ => {}
    }
    Ok(lines)
}

/// Per-site winding patterns (along axis 0) that fix the ground-space sector used for
/// cylinder cuts. Only the compactified cubic code with `q = 3` has a catalogued set.
pub fn default_winding_patterns(id: ModelId) -> Option<Vec<Vec<&'static str>>> {
    match id {
        ModelId::CubicCompactified { q: 3 } => Some(vec![
            vec!["XXXXXX", "XIXIXI"],
            vec!["ZIZIZI"],
            vec!["IXIXIX"],
            vec!["ZZZZZZ", "IZIZIZ"],
        ]),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub commuting: bool,
    /// First anticommuting row pair, if any.
    pub offending_pair: Option<(usize, usize)>,
    pub n_generators: usize,
    pub rank: usize,
    pub n_relations: usize,
    pub degeneracy: usize,
    /// `None` when the ground space is degenerate.
    pub symmetry_membership: Vec<(String, Option<bool>)>,
}

#[derive(Clone, Debug)]
pub struct StabilizerModel {
    name: String,
    lattice: Lattice,
    templates: Vec<GeneratorTemplate>,
    extra_generators: Vec<PauliString>,
    matrix: BinaryMatrix,
    symmetry_lines: Vec<SymmetryLine>,
    supports: OnceLock<Vec<Vec<usize>>>,
    rank: OnceLock<usize>,
    echelon: OnceLock<Echelon>,
}

impl StabilizerModel {
    /// Assembles a model without checking commutation.
    pub fn from_parts(
        name: impl Into<String>,
        lattice: Lattice,
        templates: Vec<GeneratorTemplate>,
        extra_generators: Vec<PauliString>,
        symmetry_lines: Vec<SymmetryLine>,
    ) -> Result<Self> {
        let q = lattice.qubits_per_site();
        for t in &templates {
            if let Some(bad) = t.terms.iter().find(|term| term.qubit >= q) {
                return Err(Error::Dimension(format!("template qubit {} with Q = {q}", bad.qubit)));
            }
            let span = t.span();
            for a in 0..lattice.ndim() {
                if span[a] as usize + 1 > lattice.extent(a) {
                    return Err(Error::Construction(format!(
                        "lattice extent {} along axis {a} is smaller than a generator",
                        lattice.extent(a)
                    )));
                }
            }
        }
        let n = lattice.n_qubits();
        let mut rows: Vec<PauliString> = Vec::with_capacity(templates.len() * lattice.n_sites());
        for t in &templates {
            for s in lattice.sites() {
                rows.push(t.instantiate(&lattice, s));
            }
        }
        rows.extend(extra_generators.iter().cloned());
        let matrix = generator_matrix(n, &rows)?;
        Ok(Self::from_matrix(name, lattice, templates, extra_generators, matrix, symmetry_lines))
    }

    fn from_matrix(
        name: impl Into<String>,
        lattice: Lattice,
        templates: Vec<GeneratorTemplate>,
        extra_generators: Vec<PauliString>,
        matrix: BinaryMatrix,
        symmetry_lines: Vec<SymmetryLine>,
    ) -> Self {
        Self {
            name: name.into(),
            lattice,
            templates,
            extra_generators,
            matrix,
            symmetry_lines,
            supports: OnceLock::new(),
            rank: OnceLock::new(),
            echelon: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n_qubits(&self) -> usize {
        self.lattice.n_qubits()
    }

    pub fn templates(&self) -> &[GeneratorTemplate] {
        &self.templates
    }

    pub fn extra_generators(&self) -> &[PauliString] {
        &self.extra_generators
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn symmetry_lines(&self) -> &[SymmetryLine] {
        &self.symmetry_lines
    }

    pub fn generator(&self, row: usize) -> PauliString {
        PauliString::from_symplectic(&self.matrix.row(row)).expect("even width")
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.echelon().rank())
    }

    pub fn degeneracy(&self) -> usize {
        self.n_qubits() - self.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        self.echelon.get_or_init(|| self.matrix.echelon())
    }

    /// Qubit supports of every generator row.
    pub fn supports(&self) -> &[Vec<usize>] {
        self.supports.get_or_init(|| {
            (0..self.matrix.nrows())
                .map(|r| {
                    let words = self.matrix.row_words(r);
                    let mut qs: Vec<usize> = Vec::new();
                    for (wi, &w) in words.iter().enumerate() {
                        let mut w = w;
                        while w != 0 {
                            let q = (wi * 64 + w.trailing_zeros() as usize) / 2;
                            if qs.last() != Some(&q) {
                                qs.push(q);
                            }
                            w &= w - 1;
                        }
                    }
                    qs
                })
                .collect()
        })
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.n_qubits() == self.n_qubits() && self.echelon().contains(&p.to_symplectic())
    }

    /// Human-readable origin of a matrix row.
    pub fn describe_row(&self, row: usize) -> String {
        let per = self.lattice.n_sites();
        if row < self.templates.len() * per {
            let site = self.lattice.site_of(row % per);
            format!("template {} at site {:?}", row / per, &site[..self.lattice.ndim()])
        } else {
            format!("extra generator {}", row - self.templates.len() * per)
        }
    }

    /// First anticommuting row pair, found through shared-qubit buckets.
    pub fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        let supports = self.supports();
        let mut by_qubit: Vec<Vec<usize>> = vec![Vec::new(); self.n_qubits()];
        for (r, s) in supports.iter().enumerate() {
            for &q in s {
                by_qubit[q].push(r);
            }
        }
        let mut stamp = vec![usize::MAX; self.matrix.nrows()];
        for (i, s) in supports.iter().enumerate() {
            for &q in s {
                for &j in &by_qubit[q] {
                    if j <= i || stamp[j] == i {
                        continue;
                    }
                    stamp[j] = i;
                    if self.rows_anticommute(i, j) {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    fn rows_anticommute(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.matrix.row_words(i), self.matrix.row_words(j));
        crate::pauli::symplectic_product_rows(a, b)
    }

    /// Index of a generator row that anticommutes with `p`.
    pub fn anticommuting_generator(&self, p: &PauliString) -> Option<usize> {
        let v = p.to_symplectic();
        (0..self.matrix.nrows()).find(|&r| crate::pauli::symplectic_product_rows(self.matrix.row_words(r), v.words()))
    }

    pub fn validate(&self) -> ValidationReport {
        let offending_pair = self.first_anticommuting_pair();
        let rank = self.rank();
        let degeneracy = self.n_qubits() - rank;
        let symmetry_membership = self
            .symmetry_lines
            .iter()
            .map(|l| {
                let member = if degeneracy == 0 {
                    l.operator(&self.lattice).ok().map(|p| self.contains(&p))
                } else {
                    None
                };
                (l.label.clone(), member)
            })
            .collect();
        ValidationReport {
            commuting: offending_pair.is_none(),
            offending_pair,
            n_generators: self.matrix.nrows(),
            rank,
            n_relations: self.matrix.nrows() - rank,
            degeneracy,
            symmetry_membership,
        }
    }

    /// Returns a copy with more generators appended after a commutation check.
    pub fn with_extra_generators(&self, extras: &[PauliString]) -> Result<StabilizerModel> {
        for (k, p) in extras.iter().enumerate() {
            if p.n_qubits() != self.n_qubits() {
                return Err(Error::Dimension(format!(
                    "extra generator on {} qubits for a {}-qubit model",
                    p.n_qubits(),
                    self.n_qubits()
                )));
            }
            if let Some(r) = self.anticommuting_generator(p) {
                return Err(Error::Construction(format!(
                    "extra generator {k} anticommutes with {}",
                    self.describe_row(r)
                )));
            }
            for (j, o) in extras[..k].iter().enumerate() {
                if crate::pauli::symplectic_product(p, o)? {
                    return Err(Error::Construction(format!(
                        "extra generators {j} and {k} anticommute"
                    )));
                }
            }
        }
        let mut matrix = self.matrix.clone();
        for p in extras {
            matrix.push_row(&p.to_symplectic())?;
        }
        let mut all = self.extra_generators.clone();
        all.extend(extras.iter().cloned());
        Ok(Self::from_matrix(
            self.name.clone(),
            self.lattice.clone(),
            self.templates.clone(),
            all,
            matrix,
            self.symmetry_lines.clone(),
        ))
    }

    /// Appends one winding string per pattern, each tiled along axis 0 through row `y`.
    pub fn with_winding_patterns(&self, patterns: &[Vec<&str>], y: i64) -> Result<StabilizerModel> {
        let strings = patterns
            .iter()
            .map(|words| {
                let pattern: Vec<Vec<Pauli>> = words.iter().map(|w| letters(w)).collect::<Result<_>>()?;
                self.winding_string(&pattern, 0, [0, y, 0])
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_extra_generators(&strings)
    }

    /// Basis of logical operators supported on the strip of sites whose coordinate along
    /// `1 - axis` lies in `[start, start + width)`, independent modulo the stabilizer group.
    ///
    /// The strip winds along `axis`; all returned operators commute with each other.
    pub fn strip_logicals(&self, axis: usize, start: i64, width: usize) -> Result<Vec<PauliString>> {
        let l = &self.lattice;
        if l.ndim() != 2 || axis > 1 {
            return Err(Error::Geometry(format!("strip along axis {axis} needs a 2D lattice")));
        }
        let across = 1 - axis;
        if width == 0 || width >= l.extent(across) {
            return Err(Error::Geometry(format!(
                "strip width {width} must be in 1..{}",
                l.extent(across)
            )));
        }
        let rows: Vec<i64> = (0..width as i64).map(|d| (start + d).rem_euclid(l.extent(across) as i64)).collect();
        let qubits: Vec<usize> = l
            .sites()
            .filter(|s| rows.contains(&s[across]))
            .flat_map(|s| l.site_qubits(s))
            .collect();
        let swapped: Vec<usize> = qubits.iter().flat_map(|&q| [2 * q + 1, 2 * q]).collect();
        let constraints = self.matrix.select_columns(&swapped);
        let ech = self.echelon();
        let mut chosen: Vec<PauliString> = Vec::new();
        let mut residues = BinaryMatrix::new(2 * self.n_qubits());
        for v in constraints.nullspace() {
            let mut p = PauliString::identity(self.n_qubits());
            for (j, &q) in qubits.iter().enumerate() {
                p.set(q, Pauli::from_bits(v.get(2 * j), v.get(2 * j + 1)));
            }
            residues.push_row(&ech.reduce(&p.to_symplectic()))?;
            if residues.rank() == chosen.len() + 1 {
                chosen.push(p);
            } else {
                residues = residues.select_rows(&(0..chosen.len()).collect::<Vec<_>>());
            }
        }
        // greedy mutually commuting subset
        let mut out: Vec<PauliString> = Vec::new();
        for p in chosen {
            if out.iter().all(|o| !crate::pauli::symplectic_product(&p, o).unwrap_or(true)) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Tiles `pattern` along `axis` through `base` and checks it commutes with every generator.
    pub fn winding_string(&self, pattern: &[Vec<Pauli>], axis: usize, base: Site) -> Result<PauliString> {
        let p = tile_pattern(&self.lattice, pattern, axis, base)?;
        if let Some(r) = self.anticommuting_generator(&p) {
            return Err(Error::Construction(format!(
                "winding string anticommutes with {}",
                self.describe_row(r)
            )));
        }
        Ok(p)
    }

    /// Conjugates every generator by the tiled circuit.
    pub fn apply_circuit(&self, pattern: &CircuitPattern) -> Result<StabilizerModel> {
        let gates = pattern.gates_on(&self.lattice)?;
        let mut matrix = self.matrix.clone();
        for g in &gates {
            g.apply_to_matrix(&mut matrix)?;
        }
        let n_sites = self.lattice.n_sites();
        let n_tpl = self.templates.len() * n_sites;
        let translation_invariant = pattern.period.iter().all(|&p| p == 1);
        let conj = |p: &PauliString| -> Result<PauliString> {
            let mut m = generator_matrix(self.n_qubits(), std::slice::from_ref(p))?;
            for g in &gates {
                g.apply_to_matrix(&mut m)?;
            }
            PauliString::from_symplectic(&m.row(0))
        };
        let mut extras: Vec<PauliString> = self.extra_generators.iter().map(conj).collect::<Result<_>>()?;
        let templates = if translation_invariant {
            let origin = self.lattice.site_index([0, 0, 0]);
            (0..self.templates.len())
                .map(|t| {
                    let row = PauliString::from_symplectic(&matrix.row(t * n_sites + origin))?;
                    Ok(template_from_string(&self.lattice, &row))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            let mut rows: Vec<PauliString> = (0..n_tpl)
                .map(|r| PauliString::from_symplectic(&matrix.row(r)))
                .collect::<Result<_>>()?;
            rows.append(&mut extras);
            extras = rows;
            Vec::new()
        };
        let name = format!("{}+{}", self.name, pattern.label);
        Ok(Self::from_matrix(name, self.lattice.clone(), templates, extras, matrix, Vec::new()))
    }

    /// Rotates the model by 90 degrees: site `(x, y)` moves to `(-y, x)`.
    pub fn rotate90(&self) -> Result<StabilizerModel> {
        let l = &self.lattice;
        if l.ndim() != 2 {
            return Err(Error::Geometry(format!("rotate90 needs a 2D lattice, got {:?}", l.dims())));
        }
        let q = l.qubits_per_site();
        let rotated = Lattice::square(l.extent(1), l.extent(0), q)?;
        let rot = |s: Site| -> Site { [-s[1], s[0], s[2]] };
        let mut perm = vec![0usize; l.n_qubits()];
        for s in l.sites() {
            for k in 0..q {
                perm[l.qubit(s, k)] = rotated.qubit(rot(s), k);
            }
        }
        let map = |p: &PauliString| -> PauliString {
            let mut out = PauliString::identity(p.n_qubits());
            for qb in p.support() {
                out.set(perm[qb], p.get(qb));
            }
            out
        };
        let templates: Vec<GeneratorTemplate> = self
            .templates
            .iter()
            .map(|t| {
                let mut terms: Vec<Term> = t
                    .terms
                    .iter()
                    .map(|term| Term {
                        offset: rot(term.offset),
                        ..*term
                    })
                    .collect();
                let min_x = terms.iter().map(|t| t.offset[0]).min().unwrap_or(0);
                let min_y = terms.iter().map(|t| t.offset[1]).min().unwrap_or(0);
                for term in &mut terms {
                    term.offset[0] -= min_x;
                    term.offset[1] -= min_y;
                }
                GeneratorTemplate::new(terms)
            })
            .collect();
        let extras: Vec<PauliString> = self.extra_generators.iter().map(map).collect();
        let lines = self
            .symmetry_lines
            .iter()
            .map(|line| SymmetryLine {
                axis: 1 - line.axis,
                base: rotated.wrap(rot(line.base)),
                pattern: if line.axis == 0 {
                    line.pattern.clone()
                } else {
                    // a column running up turns into a row running left
                    let mut p = line.pattern.clone();
                    p.reverse();
                    p.rotate_right(1);
                    p
                },
                label: format!("{} (rotated)", line.label),
            })
            .collect();
        Self::from_parts(format!("{}+rot90", self.name), rotated, templates, extras, lines)
    }

    pub fn to_spec(&self) -> ModelSpec {
        let l = &self.lattice;
        let q = l.qubits_per_site();
        let extra_generators = self
            .extra_generators
            .iter()
            .map(|p| {
                p.support()
                    .map(|qb| SparseTerm {
                        site: l.site_of(qb / q),
                        qubit: qb % q,
                        letter: p.get(qb),
                    })
                    .collect()
            })
            .collect();
        ModelSpec {
            schema_version: MODEL_SPEC_VERSION,
            name: self.name.clone(),
            dims: l.dims().to_vec(),
            q,
            templates: self.templates.clone(),
            extra_generators,
            symmetry_lines: self.symmetry_lines.clone(),
        }
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<StabilizerModel> {
        let lattice = Lattice::new(&spec.dims, spec.q)?;
        let n = lattice.n_qubits();
        let extras = spec
            .extra_generators
            .iter()
            .map(|terms| {
                let ops: Vec<(usize, Pauli)> = terms
                    .iter()
                    .map(|t| {
                        if t.qubit >= spec.q {
                            return Err(Error::Dimension(format!("qubit {} with Q = {}", t.qubit, spec.q)));
                        }
                        Ok((lattice.qubit(t.site, t.qubit), t.letter))
                    })
                    .collect::<Result<_>>()?;
                PauliString::from_sparse(n, &ops)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(
            spec.name.clone(),
            lattice,
            spec.templates.clone(),
            extras,
            spec.symmetry_lines.clone(),
        )
    }
}

fn template_from_string(lattice: &Lattice, p: &PauliString) -> GeneratorTemplate {
    let q = lattice.qubits_per_site();
    let centre = |c: i64, ext: usize| -> i64 {
        let e = ext as i64;
        if c > e / 2 {
            c - e
        } else {
            c
        }
    };
    let terms = p
        .support()
        .map(|qb| {
            let s = lattice.site_of(qb / q);
            let mut offset = [0; 3];
            for a in 0..lattice.ndim() {
                offset[a] = centre(s[a], lattice.extent(a));
            }
            Term {
                offset,
                qubit: qb % q,
                letter: p.get(qb),
            }
        })
        .collect();
    GeneratorTemplate::new(terms)
}

pub const MODEL_SPEC_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseTerm {
    pub site: Site,
    pub qubit: usize,
    pub letter: Pauli,
}

/// Serializable model description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub schema_version: u32,
    pub name: String,
    pub dims: Vec<usize>,
    pub q: usize,
    pub templates: Vec<GeneratorTemplate>,
    pub extra_generators: Vec<Vec<SparseTerm>>,
    pub symmetry_lines: Vec<SymmetryLine>,
}

/// Builds and validates a zoo model.
pub fn build_model(id: ModelId, lattice: &Lattice) -> Result<StabilizerModel> {
    if lattice.qubits_per_site() != id.qubits_per_site() {
        return Err(Error::Construction(format!(
            "{id} needs Q = {}, lattice has Q = {}",
            id.qubits_per_site(),
            lattice.qubits_per_site()
        )));
    }
    if lattice.ndim() != id.ndim() {
        return Err(Error::Construction(format!(
            "{id} lives on a {}D lattice, got {}D",
            id.ndim(),
            lattice.ndim()
        )));
    }
    if let Some(&d) = lattice.dims().iter().find(|&&d| d < 3) {
        return Err(Error::Construction(format!("lattice extent {d} is below the minimum of 3")));
    }
    let model = StabilizerModel::from_parts(
        id.to_string(),
        lattice.clone(),
        templates(id)?,
        Vec::new(),
        symmetry_lines(id, lattice)?,
    )?;
    if let Some((i, j)) = model.first_anticommuting_pair() {
        return Err(Error::Construction(format!(
            "{} anticommutes with {}",
            model.describe_row(i),
            model.describe_row(j)
        )));
    }
    if let Some(line) = model
        .symmetry_lines
        .iter()
        .find(|l| l.operator(lattice).map(|p| model.anticommuting_generator(&p).is_some()).unwrap_or(true))
    {
        return Err(Error::Construction(format!("symmetry line {} is not a symmetry", line.label)));
    }
    Ok(model)
}

/// Shorthand for a 2D zoo model on an `lx × ly` torus.
pub fn build_2d(id: ModelId, lx: usize, ly: usize) -> Result<StabilizerModel> {
    build_model(id, &Lattice::square(lx, ly, id.qubits_per_site())?)
}

/// Cluster state assembled from CZ gates on the edges of the fine square lattice
/// acting on the product state, then read on the coarse lattice.
pub fn cluster2d_from_circuit(lx: usize, ly: usize) -> Result<StabilizerModel> {
    let lattice = Lattice::square(lx, ly, 2)?;
    let product = build_model(ModelId::Product { q: 2 }, &lattice)?;
    let mut legs = Vec::new();
    // the four fine neighbours of the qubit-0 site at the coarse origin
    let f = fine_position([0, 0, 0], 0);
    for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
        let (site, k) = coarse_position((f.0 + d.0, f.1 + d.1));
        debug_assert_eq!(k, 1);
        legs.push(site);
    }
    let pattern = CircuitPattern {
        gates: legs
            .into_iter()
            .map(|s| PatternGate {
                kind: GateKind::CZ,
                legs: vec![([0, 0, 0], 0), (s, 1)],
            })
            .collect(),
        period: [1, 1, 1],
        label: "fine-cz".into(),
    };
    let mut m = product.apply_circuit(&pattern)?;
    m.name = "cluster2d(circuit)".into();
    Ok(m)
}

/// Fine square-lattice position of qubit `k` of a coarse site.
pub fn fine_position(s: Site, k: usize) -> (i64, i64) {
    (s[0] - s[1] + k as i64, s[0] + s[1])
}

/// Coarse site and qubit index of a fine square-lattice position.
pub fn coarse_position(f: (i64, i64)) -> (Site, usize) {
    let (a, b) = f;
    if (a + b).rem_euclid(2) == 0 {
        ([(a + b) / 2, (b - a) / 2, 0], 0)
    } else {
        ([(a + b - 1) / 2, (b - a + 1) / 2, 0], 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGate {
    pub kind: GateKind,
    /// `(offset from anchor, qubit)` per gate leg; control first for CNOT.
    pub legs: Vec<(Site, usize)>,
}

/// Gates tiled over the anchor sublattice `period[a] * Z` along each axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitPattern {
    pub gates: Vec<PatternGate>,
    pub period: [usize; 3],
    pub label: String,
}

/// Which qubit pairs of the vertical staircase the conjugated-CZ circuit touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerticalPairs {
    Both,
    IntraSite,
    InterSite,
}

impl CircuitPattern {
    pub fn empty() -> Self {
        Self {
            gates: Vec::new(),
            period: [1, 1, 1],
            label: "empty".into(),
        }
    }

    /// `(H⊗H) CZ (H⊗H)` on nearest-neighbour pairs along vertical staircases.
    pub fn vertical_hh_cz_hh(pairs: VerticalPairs) -> Self {
        let mut edges = Vec::new();
        if pairs != VerticalPairs::InterSite {
            edges.push(([0, 0, 0], [0, 0, 0]));
        }
        if pairs != VerticalPairs::IntraSite {
            edges.push(([0, 0, 0], [0, 1, 0]));
        }
        let mut gates = Vec::new();
        for (a, b) in edges {
            let h = |s: Site, k: usize| PatternGate {
                kind: GateKind::H,
                legs: vec![(s, k)],
            };
            gates.push(h(a, 0));
            gates.push(h(b, 1));
            gates.push(PatternGate {
                kind: GateKind::CZ,
                legs: vec![(a, 0), (b, 1)],
            });
            gates.push(h(a, 0));
            gates.push(h(b, 1));
        }
        Self {
            gates,
            period: [1, 1, 1],
            label: "vertical-hczh".into(),
        }
    }

    /// CZ on nearest neighbours along each row.
    pub fn row_cz() -> Self {
        Self {
            gates: vec![
                PatternGate {
                    kind: GateKind::CZ,
                    legs: vec![([0, 0, 0], 0), ([0, 0, 0], 1)],
                },
                PatternGate {
                    kind: GateKind::CZ,
                    legs: vec![([0, 0, 0], 1), ([1, 0, 0], 0)],
                },
            ],
            period: [1, 1, 1],
            label: "row-cz".into(),
        }
    }

    pub fn gates_on(&self, lattice: &Lattice) -> Result<Vec<Gate>> {
        let q = lattice.qubits_per_site();
        let mut out = Vec::new();
        for anchor in lattice.sites() {
            if (0..3).any(|a| !(anchor[a] as usize).is_multiple_of(self.period[a].max(1))) {
                continue;
            }
            for g in &self.gates {
                let mut qubits = Vec::with_capacity(g.legs.len());
                for &(off, k) in &g.legs {
                    if k >= q {
                        return Err(Error::Dimension(format!("gate leg on qubit {k} with Q = {q}")));
                    }
                    qubits.push(lattice.qubit(add(anchor, off), k));
                }
                let gate = Gate::new(g.kind, qubits);
                gate.check(lattice.n_qubits())?;
                out.push(gate);
            }
        }
        Ok(out)
    }
}

/// Rows of `a` and `b` span the same space.
pub fn same_rowspace(a: &StabilizerModel, b: &StabilizerModel) -> Result<bool> {
    let stacked = a.matrix().stack(b.matrix())?;
    let r = stacked.rank();
    Ok(r == a.rank() && r == b.rank())
}

/// Pauli letters of a dense word such as `"XXIZ"`.
pub fn letters(word: &str) -> Result<Vec<Pauli>> {
    word.chars().map(Pauli::from_char).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ids() {
        assert_eq!("cluster2d".parse::<ModelId>().unwrap(), ModelId::Cluster2d);
        assert_eq!("cubic-q3".parse::<ModelId>().unwrap(), ModelId::CubicCompactified { q: 3 });
        assert_eq!(
            "cubic_compactified(6)".parse::<ModelId>().unwrap(),
            ModelId::CubicCompactified { q: 6 }
        );
        assert!("nope".parse::<ModelId>().is_err());
        for (name, _) in ModelId::catalog() {
            let fixed = name.replace("(q)", "(3)");
            assert!(fixed.parse::<ModelId>().is_ok(), "{fixed}");
        }
    }

    #[test]
    fn coarse_map_round_trip() {
        for i in -3..3 {
            for j in -3..3 {
                for k in 0..2 {
                    let s = [i, j, 0];
                    assert_eq!(coarse_position(fine_position(s, k)), (s, k));
                }
            }
        }
    }

    #[test]
    fn zoo_models_commute() {
        for id in [
            ModelId::Cluster2d,
            ModelId::Stacked1d,
            ModelId::Zigzag1d,
            ModelId::OneformCluster,
            ModelId::CubicCompactified { q: 3 },
            ModelId::CubicCompactified { q: 6 },
        ] {
            for (lx, ly) in [(3, 3), (4, 5), (6, 6)] {
                let m = build_2d(id, lx, ly).unwrap();
                assert!(m.validate().commuting, "{id} {lx}x{ly}");
            }
        }
        let m = build_model(ModelId::Cluster3d, &Lattice::cubic(3, 4, 3, 2).unwrap()).unwrap();
        assert!(m.validate().commuting);
    }

    #[test]
    fn cluster2d_counts() {
        let m = build_2d(ModelId::Cluster2d, 8, 8).unwrap();
        let r = m.validate();
        assert_eq!((r.n_relations, r.degeneracy), (0, 0));
        assert_eq!(r.symmetry_membership.len(), 32);
        assert!(r.symmetry_membership.iter().all(|(_, m)| *m == Some(true)));
    }

    #[test]
    fn flipped_letter_is_caught() {
        let lattice = Lattice::square(4, 4, 2).unwrap();
        let mut t = templates(ModelId::Cluster2d).unwrap();
        t[0].terms[0].letter = Pauli::X;
        let m = StabilizerModel::from_parts("bad", lattice, t, vec![], vec![]).unwrap();
        assert!(!m.validate().commuting);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let m = build_2d(ModelId::Cluster2d, 4, 4).unwrap();
        let c = m.apply_circuit(&CircuitPattern::empty()).unwrap();
        assert_eq!(c.matrix(), m.matrix());
    }

    #[test]
    fn circuit_builder_matches_templates() {
        let a = build_2d(ModelId::Cluster2d, 5, 4).unwrap();
        let b = cluster2d_from_circuit(5, 4).unwrap();
        assert!(same_rowspace(&a, &b).unwrap());
    }

    #[test]
    fn small_lattice_rejected() {
        assert!(build_2d(ModelId::Cluster2d, 2, 5).is_err());
        assert!(build_2d(ModelId::CubicCompactified { q: 4 }, 6, 6).is_err());
    }
}
