//! Transition sets, the momentum-space operator and the constraint checks.
//!
//! A transition set holds the centre matrix and the eight neighbour matrices
//! of one automaton. The same type serves the two-component Weyl automata
//! (`D = 2`) and the four-component Dirac families (`D = 4`).

use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::lattice::{generating_set, GeneratingSet, IntVec3, WaveVector};
use crate::smallmat::{max_norm, pauli, CMat2, C64};

/// Default tolerance for unitarity and constraint residuals.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Tolerance for identities that are exact in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet<const D: usize> {
    pub a0: SMatrix<C64, D, D>,
    /// `A_j`, paired with `gen.h_plus[j]`.
    pub a_plus: [SMatrix<C64, D, D>; 4],
    /// `A_{−j}`, paired with `gen.h_minus[j]`.
    pub a_minus: [SMatrix<C64, D, D>; 4],
    pub gen: GeneratingSet,
}

pub type WeylTransitionSet = TransitionSet<2>;

impl<const D: usize> TransitionSet<D> {
    pub fn new(
        a0: SMatrix<C64, D, D>,
        a_plus: [SMatrix<C64, D, D>; 4],
        a_minus: [SMatrix<C64, D, D>; 4],
    ) -> Self {
        TransitionSet { a0, a_plus, a_minus, gen: generating_set() }
    }

    pub fn zeros() -> Self {
        let z = SMatrix::<C64, D, D>::zeros();
        Self::new(z, [z; 4], [z; 4])
    }

    /// The nine `(h, A_h)` pairs, centre first, then `S+`, then `S−`.
    pub fn entries(&self) -> [(IntVec3, SMatrix<C64, D, D>); 9] {
        let g = &self.gen;
        [
            (IntVec3::ZERO, self.a0),
            (g.h_plus[0], self.a_plus[0]),
            (g.h_plus[1], self.a_plus[1]),
            (g.h_plus[2], self.a_plus[2]),
            (g.h_plus[3], self.a_plus[3]),
            (g.h_minus[0], self.a_minus[0]),
            (g.h_minus[1], self.a_minus[1]),
            (g.h_minus[2], self.a_minus[2]),
            (g.h_minus[3], self.a_minus[3]),
        ]
    }

    /// `A(k) = A_0 + Σ_j e^{i k·h_j} A_j + e^{−i k·h_j} A_{−j}`.
    pub fn momentum_operator(&self, k: &WaveVector) -> SMatrix<C64, D, D> {
        let mut out = self.a0;
        for j in 0..4 {
            let ph = C64::from_polar(1.0, self.gen.h_plus[j].phase(k));
            out += self.a_plus[j] * ph + self.a_minus[j] * ph.conj();
        }
        out
    }

    /// `‖A_0 + Σ_j (A_j + A_{−j}) − I‖_max`.
    pub fn c0_residual(&self) -> f64 {
        let sum = self
            .entries()
            .iter()
            .fold(SMatrix::<C64, D, D>::zeros(), |acc, (_, a)| acc + a);
        max_norm(&(sum - SMatrix::<C64, D, D>::identity()))
    }

    /// Conjugate every transition matrix by a fixed matrix `u`: `A_h ↦ u A_h u†`.
    pub fn conjugated(&self, u: &SMatrix<C64, D, D>) -> Self {
        let ud = u.adjoint();
        TransitionSet {
            a0: u * self.a0 * ud,
            a_plus: self.a_plus.map(|a| u * a * ud),
            a_minus: self.a_minus.map(|a| u * a * ud),
            gen: self.gen,
        }
    }

    /// The set of `k ↦ A(−k)†`: `A_h ↦ A_h†` at the same displacement.
    pub fn adjoint_reflected(&self) -> Self {
        TransitionSet {
            a0: self.a0.adjoint(),
            a_plus: self.a_plus.map(|a| a.adjoint()),
            a_minus: self.a_minus.map(|a| a.adjoint()),
            gen: self.gen,
        }
    }
}

/// One labelled residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintEntry {
    pub constraint: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ConstraintEntry {
    pub fn new(constraint: impl Into<String>, residual: f64, tol: f64) -> Self {
        ConstraintEntry { constraint: constraint.into(), residual, tol, pass: residual <= tol }
    }
}

/// Residuals keyed by constraint label. Serializes as a JSON array of entries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstraintReport {
    pub entries: Vec<ConstraintEntry>,
}

impl ConstraintReport {
    pub fn push(&mut self, label: impl Into<String>, residual: f64, tol: f64) {
        self.entries.push(ConstraintEntry::new(label, residual, tol));
    }

    pub fn extend(&mut self, other: ConstraintReport) {
        self.entries.extend(other.entries);
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, label: &str) -> Option<&ConstraintEntry> {
        self.entries.iter().find(|e| e.constraint == label)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// `(label, residual)` pairs.
    pub fn residuals(&self) -> BTreeMap<String, f64> {
        self.entries.iter().map(|e| (e.constraint.clone(), e.residual)).collect()
    }
}

pub fn check_c0<const D: usize>(ts: &TransitionSet<D>, tol: f64) -> ConstraintEntry {
    ConstraintEntry::new("C0", ts.c0_residual(), tol)
}

/// Every phase group of `A†A = I` and `AA† = I`, plus the named subcases.
///
/// All 81 ordered pairs `(h', h)` over the centre and the eight neighbours
/// are grouped by `h'' = h − h'`. The `h'' = 0` groups must sum to the
/// identity and every other group to zero.
pub fn check_unitarity_groups<const D: usize>(ts: &TransitionSet<D>, tol: f64) -> ConstraintReport {
    let entries = ts.entries();
    let id = SMatrix::<C64, D, D>::identity();
    let mut left: BTreeMap<IntVec3, SMatrix<C64, D, D>> = BTreeMap::new();
    let mut right: BTreeMap<IntVec3, SMatrix<C64, D, D>> = BTreeMap::new();
    for (hp, ap) in &entries {
        for (h, a) in &entries {
            let diff = *h - *hp;
            *left.entry(diff).or_insert_with(SMatrix::zeros) += ap.adjoint() * a;
            *right.entry(diff).or_insert_with(SMatrix::zeros) += ap * a.adjoint();
        }
    }
    let mut report = ConstraintReport::default();
    for (name, groups) in [("A'A", &left), ("AA'", &right)] {
        for (diff, sum) in groups.iter() {
            let target = if *diff == IntVec3::ZERO { id } else { SMatrix::zeros() };
            report.push(format!("{name} h''={diff}"), max_norm(&(sum - target)), tol);
        }
    }

    let (a0, ap, am) = (&ts.a0, &ts.a_plus, &ts.a_minus);
    let max_over = |f: &dyn Fn(usize, usize) -> f64, pairs: bool| -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            if pairs {
                for j in (0..4).filter(|&j| j != i) {
                    m = m.max(f(i, j));
                }
            } else {
                m = m.max(f(i, i));
            }
        }
        m
    };
    report.push("C1a", max_over(&|j, _| max_norm(&(ap[j] * am[j].adjoint())), false), tol);
    report.push("C1b", max_over(&|j, _| max_norm(&(ap[j].adjoint() * am[j])), false), tol);
    report.push(
        "C2a",
        max_over(&|i, j| max_norm(&(ap[i] * ap[j].adjoint() + am[j] * am[i].adjoint())), true),
        tol,
    );
    report.push(
        "C2b",
        max_over(&|i, j| max_norm(&(ap[i].adjoint() * ap[j] + am[j].adjoint() * am[i])), true),
        tol,
    );
    report.push(
        "C3a",
        max_over(&|j, _| max_norm(&(a0 * ap[j].adjoint() + am[j] * a0.adjoint())), false),
        tol,
    );
    report.push(
        "C3b",
        max_over(&|j, _| max_norm(&(a0.adjoint() * ap[j] + am[j].adjoint() * a0)), false),
        tol,
    );
    report
}

/// Worst `‖A(k)†A(k) − I‖_max` and `| |det A(k)| − 1 |` over the given momenta.
pub fn sampled_unitarity<const D: usize>(ts: &TransitionSet<D>, ks: &[WaveVector]) -> (f64, f64) {
    let id = SMatrix::<C64, D, D>::identity();
    ks.iter().fold((0.0, 0.0), |(u, d), k| {
        let a = ts.momentum_operator(k);
        (
            u.max(max_norm(&(a.adjoint() * a - id))),
            d.max((DMatrix::from_column_slice(D, D, a.as_slice()).determinant().norm() - 1.0).abs()),
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// The π rotation about this axis as an integer map.
    pub fn rotate(self, v: IntVec3) -> IntVec3 {
        match self {
            Axis::X => IntVec3::new(v.x, -v.y, -v.z),
            Axis::Y => IntVec3::new(-v.x, v.y, -v.z),
            Axis::Z => IntVec3::new(-v.x, -v.y, v.z),
        }
    }
}

/// A π rotation, its action on the tetrahedron indices and its 2×2 representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyElement {
    pub axis: Option<Axis>,
    /// `perm[j]` is the index of the rotated `h_j`.
    pub perm: [usize; 4],
    pub u: CMat2,
}

impl IsotropyElement {
    pub fn identity() -> Self {
        IsotropyElement { axis: None, perm: [0, 1, 2, 3], u: CMat2::identity() }
    }
}

/// π rotations about x, y, z, represented by σ₁, σ₂, σ₃.
pub fn isotropy_table() -> [IsotropyElement; 3] {
    let s = pauli();
    [
        IsotropyElement { axis: Some(Axis::X), perm: [1, 0, 3, 2], u: s[0] },
        IsotropyElement { axis: Some(Axis::Y), perm: [2, 3, 0, 1], u: s[1] },
        IsotropyElement { axis: Some(Axis::Z), perm: [3, 2, 1, 0], u: s[2] },
    ]
}

/// `max_{l, ±j} ‖A_{l(±j)} − U_l A_{±j} U_l†‖_max`, including the centre matrix.
pub fn check_isotropy(ts: &WeylTransitionSet, table: &[IsotropyElement]) -> f64 {
    let mut worst: f64 = 0.0;
    for el in table {
        let conj = |a: &CMat2| el.u * a * el.u.adjoint();
        worst = worst.max(max_norm(&(ts.a0 - conj(&ts.a0))));
        for j in 0..4 {
            let l = el.perm[j];
            worst = worst.max(max_norm(&(ts.a_plus[l] - conj(&ts.a_plus[j]))));
            worst = worst.max(max_norm(&(ts.a_minus[l] - conj(&ts.a_minus[j]))));
        }
    }
    worst
}

/// C0, all phase groups and isotropy in one report.
pub fn full_report(ts: &WeylTransitionSet, tol: f64) -> ConstraintReport {
    let mut r = ConstraintReport::default();
    r.entries.push(check_c0(ts, tol));
    r.extend(check_unitarity_groups(ts, tol));
    r.push("isotropy", check_isotropy(ts, &isotropy_table()), tol);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::canonical_solution;
    use crate::smallmat::{c, unitarity_defect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn canonical() -> WeylTransitionSet {
        canonical_solution().transition_set()
    }

    #[test]
    fn momentum_operator_at_special_points() {
        let ts = canonical();
        let a0 = ts.momentum_operator(&WaveVector::zeros());
        assert!(max_norm(&(a0 - CMat2::identity())) < 1e-15);
        let api = ts.momentum_operator(&WaveVector::new(PI, PI, PI));
        assert!(max_norm(&(api + CMat2::identity())) < 1e-14);
    }

    #[test]
    fn unitary_on_random_brillouin_zone_points() {
        let ts = canonical();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut n = 0;
        while n < 200 {
            let k = WaveVector::new(
                rng.random_range(-PI..=PI),
                rng.random_range(-PI..=PI),
                rng.random_range(-PI..=PI),
            );
            if !crate::lattice::in_brillouin_zone(&k) {
                continue;
            }
            assert!(unitarity_defect(&ts.momentum_operator(&k)) <= 1e-12);
            n += 1;
        }
    }

    #[test]
    fn c0_examples() {
        assert!(check_c0(&canonical(), EXACT_TOL).pass);
        let zero = WeylTransitionSet::zeros();
        assert_eq!(zero.c0_residual(), 1.0);
        let mut trivial = WeylTransitionSet::zeros();
        trivial.a0 = CMat2::identity();
        assert_eq!(trivial.c0_residual(), 0.0);
    }

    #[test]
    fn canonical_passes_every_group() {
        let report = check_unitarity_groups(&canonical(), CONSTRAINT_TOL);
        assert!(report.pass(), "{report:?}");
        // Distinct differences: 0, ±h_j, ±2h_j, the 12 of type ±(h_i − h_j) and the 6 of type ±2e_a.
        let groups = report.entries.iter().filter(|e| e.constraint.contains("h''")).count();
        assert_eq!(groups, 2 * (1 + 8 + 8 + 12 + 6));
        assert!(report.get("C1a").unwrap().residual == 0.0);
    }

    #[test]
    fn group_labels_cover_pair_sums() {
        let report = check_unitarity_groups(&canonical(), CONSTRAINT_TOL);
        assert!(report.get("A'A h''=(2,0,0)").is_some());
        assert!(report.get("AA' h''=(0,2,2)").is_some());
        assert!(report.get("A'A h''=(2,2,2)").is_some());
        assert!(report.get("A'A h''=(0,0,0)").is_some());
    }

    #[test]
    fn perturbation_breaks_unitarity() {
        let mut ts = canonical();
        ts.a_plus[0] += pauli()[0] * c(0.1, 0.0);
        let report = check_unitarity_groups(&ts, CONSTRAINT_TOL);
        assert!(!report.pass());
        assert!(report.max_residual() >= 0.01);
    }

    #[test]
    fn isotropy_table_matches_geometry() {
        let gen = generating_set();
        for el in isotropy_table() {
            let axis = el.axis.unwrap();
            for j in 0..4 {
                assert_eq!(axis.rotate(gen.h_plus[j]), gen.h_plus[el.perm[j]]);
                assert_eq!(axis.rotate(gen.h_minus[j]), gen.h_minus[el.perm[j]]);
            }
            assert!(unitarity_defect(&el.u) == 0.0);
            assert_eq!(el.u.adjoint(), el.u);
        }
        let t = isotropy_table();
        assert_eq!(t[2].perm, [3, 2, 1, 0]);
        assert_eq!(t[0].perm, [1, 0, 3, 2]);
        let id = IsotropyElement::identity();
        assert_eq!(id.perm, [0, 1, 2, 3]);
        assert_eq!(id.u, CMat2::identity());
    }

    #[test]
    fn isotropy_residuals() {
        let ts = canonical();
        assert!(check_isotropy(&ts, &isotropy_table()) <= EXACT_TOL);
        assert_eq!(check_isotropy(&ts, &[IsotropyElement::identity()]), 0.0);
        let mut swapped = ts.clone();
        swapped.a_plus.swap(0, 1);
        assert!(check_isotropy(&swapped, &isotropy_table()) >= 0.1);
    }

    #[test]
    fn centre_matrix_invariance_is_trivial() {
        let ts = canonical();
        assert_eq!(ts.a0, CMat2::zeros());
        for el in isotropy_table() {
            assert_eq!(el.u * ts.a0 * el.u.adjoint(), ts.a0);
        }
    }

    #[test]
    fn report_serializes_as_entry_list() {
        let mut r = ConstraintReport::default();
        r.push("C0", 0.0, 1e-14);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(
            json,
            serde_json::json!([{"constraint": "C0", "residual": 0.0, "tol": 1e-14, "pass": true}])
        );
    }

    #[test]
    fn adjoint_reflection_is_a_dagger_minus_k() {
        let ts = canonical();
        let refl = ts.adjoint_reflected();
        let k = WaveVector::new(0.3, -1.1, 0.7);
        let expect = ts.momentum_operator(&(-k)).adjoint();
        assert!(max_norm(&(refl.momentum_operator(&k) - expect)) < 1e-15);
    }
}
