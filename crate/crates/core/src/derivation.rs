//! Finite reconstruction of the Weyl automata from their Gram matrices.
//!
//! With transition matrices `A_j = (α/2)(I + a_j·σ)` and
//! `A_{−j} = (α*/2)(I − a_j*·σ)`, the constraints fix the conjugated Gram
//! matrix of the vectors `a_j` to the tetrahedron Gram `4I − J` and leave the
//! plain Gram matrix with two unknowns `(x, y)`. The admissible pairs, the
//! six matrices `B` whose columns are the `a_j`, and the twelve resulting
//! automata are built here, then split into their two spectral classes.

use nalgebra::{Matrix3x4, Matrix4, SymmetricEigen};
use std::f64::consts::PI;

use crate::automaton::{TransitionSet, WeylTransitionSet};
use crate::error::{Error, Result};
use crate::lattice::{tetra_matrix, WaveVector};
use crate::smallmat::{c, dot_sigma, max_norm, CMat2, CVec3, UnitarySpectral, C64, I_UNIT};
use crate::Sign;

/// Which component of the tetrahedron vectors carries the `±i` phase.
///
/// Family 1 multiplies the third (z) component, family 2 the second, family 3
/// the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Family {
    One,
    Two,
    Three,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::One, Family::Two, Family::Three];

    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
        }
    }

    /// Row of `T` that picks up the phase.
    fn phase_row(self) -> usize {
        match self {
            Family::One => 2,
            Family::Two => 1,
            Family::Three => 0,
        }
    }
}

impl TryFrom<u8> for Family {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Family::One),
            2 => Ok(Family::Two),
            3 => Ok(Family::Three),
            _ => Err(format!("family must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<Family> for u8 {
    fn from(f: Family) -> u8 {
        f.index()
    }
}

/// 4×4 Gram matrix (complex storage; real for every admissible solution).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramMatrix4(pub Matrix4<C64>);

impl GramMatrix4 {
    pub fn from_real(m: [[f64; 4]; 4]) -> Self {
        GramMatrix4(Matrix4::from_fn(|r, col| c(m[r][col], 0.0)))
    }

    pub fn row_sums(&self) -> [C64; 4] {
        [0, 1, 2, 3].map(|r| self.0.row(r).iter().sum())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        max_norm(&(self.0 - self.0.transpose())) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_norm(&(self.0 - self.0.adjoint())) <= tol
    }

    /// Eigenvalues of the real part, ascending. Meaningful when the matrix is real symmetric.
    pub fn real_eigenvalues(&self) -> [f64; 4] {
        let re = self.0.map(|z| z.re);
        let mut ev: Vec<f64> = SymmetricEigen::new(re).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// Eigenvalues of a Hermitian Gram matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }
}

/// The tetrahedron Gram matrix `4I − J`.
pub fn tetrahedron_gram() -> GramMatrix4 {
    GramMatrix4::from_real([0, 1, 2, 3].map(|r| [0, 1, 2, 3].map(|k| if r == k { 3.0 } else { -1.0 })))
}

/// `(G^R, G^C)` with `G^R_{jk} = v_j·v_k` and `G^C_{jk} = v_j*·v_k`.
pub fn gram_pair(vectors: &[CVec3; 4]) -> (GramMatrix4, GramMatrix4) {
    let gr = Matrix4::from_fn(|j, k| vectors[j].dot(&vectors[k]));
    let gc = Matrix4::from_fn(|j, k| vectors[j].dotc(&vectors[k]));
    (GramMatrix4(gr), GramMatrix4(gc))
}

/// The orthogonal matrix that diagonalises both admissible Gram matrices:
/// a row of ones on top of `T`, scaled by one half.
pub fn rotation_r() -> Matrix4<f64> {
    let t = tetra_matrix();
    Matrix4::from_fn(|r, col| if r == 0 { 0.5 } else { 0.5 * t[r - 1][col] as f64 })
}

/// `G^R` with unit diagonal and vanishing row sums, parametrised by
/// `x = a_1·a_2` and `y = a_1·a_4`.
pub fn gr_from_xy(x: f64, y: f64) -> GramMatrix4 {
    let w = -1.0 - x - y;
    GramMatrix4::from_real([
        [1.0, x, w, y],
        [x, 1.0, y, w],
        [w, y, 1.0, x],
        [y, w, x, 1.0],
    ])
}

/// Closed-form eigenvalues of [`gr_from_xy`] along the rows of [`rotation_r`].
pub fn gr_eigenvalues_closed(x: f64, y: f64) -> [f64; 4] {
    [0.0, 2.0 * (1.0 + x), -2.0 * (x + y), 2.0 * (1.0 + y)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrSolution {
    pub x: f64,
    pub y: f64,
    pub gram: GramMatrix4,
}

/// Real roots of `|1 + t| = 2`.
fn unit_modulus_roots() -> [f64; 2] {
    [1.0, -3.0]
}

/// Finite search for the admissible `(x, y)`.
///
/// `G^R = Tᵗ D T` with `D = diag((1+x)/2, −(x+y)/2, (1+y)/2)` must equal
/// `Tᵗ W T` for a unitary `W`, so every diagonal entry of `D` has unit
/// modulus. For real `x, y` that means `x, y ∈ {1, −3}` with `|x + y| = 2`.
pub fn enumerate_gr_solutions() -> Vec<GrSolution> {
    let mut out = Vec::new();
    for x in unit_modulus_roots() {
        for y in unit_modulus_roots() {
            if ((x + y) / 2.0).abs() != 1.0 {
                continue;
            }
            out.push(GrSolution { x, y, gram: gr_from_xy(x, y) });
        }
    }
    // Family order: (1, −3), (1, 1), (−3, 1).
    out.sort_by(|a, b| (-a.x, a.y).partial_cmp(&(-b.x, b.y)).expect("finite"));
    out
}

/// 3×4 integer matrix of tetrahedron columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TMatrix(pub [[i64; 4]; 3]);

impl TMatrix {
    pub fn tetrahedron() -> Self {
        TMatrix(tetra_matrix())
    }

    /// `TᵗT`.
    pub fn gram(&self) -> [[i64; 4]; 4] {
        let t = &self.0;
        let mut g = [[0; 4]; 4];
        for j in 0..4 {
            for k in 0..4 {
                g[j][k] = (0..3).map(|r| t[r][j] * t[r][k]).sum();
            }
        }
        g
    }
}

/// Columns are the vectors `a_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BMatrix {
    pub entries: Matrix3x4<C64>,
    pub family: Family,
    pub sign: Sign,
}

impl BMatrix {
    /// `B_{i±} = D_{i±} T`, with `D` the identity carrying `±i` in the family's row.
    pub fn new(family: Family, sign: Sign) -> Self {
        let t = tetra_matrix();
        let row = family.phase_row();
        let phase = I_UNIT * sign.value();
        let entries = Matrix3x4::from_fn(|r, col| {
            let v = c(t[r][col] as f64, 0.0);
            if r == row {
                v * phase
            } else {
                v
            }
        });
        BMatrix { entries, family, sign }
    }

    pub fn column(&self, j: usize) -> CVec3 {
        self.entries.column(j).into_owned()
    }

    pub fn columns(&self) -> [CVec3; 4] {
        [0, 1, 2, 3].map(|j| self.column(j))
    }

    pub fn gram_pair(&self) -> (GramMatrix4, GramMatrix4) {
        gram_pair(&self.columns())
    }

    pub fn conjugate(&self) -> Matrix3x4<C64> {
        self.entries.map(|z| z.conj())
    }
}

/// The six admissible B matrices, ordered `1+, 1−, 2+, 2−, 3+, 3−`.
pub fn build_b_matrices() -> Vec<BMatrix> {
    Family::ALL
        .iter()
        .flat_map(|&f| [Sign::Plus, Sign::Minus].map(move |s| BMatrix::new(f, s)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionLabel {
    pub family: Family,
    pub sign: Sign,
    pub alpha_branch: Sign,
}

impl std::fmt::Display for SolutionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "B{}{} alpha(1{}i)/4", self.family.index(), self.sign, self.alpha_branch)
    }
}

/// A B matrix together with `α = (1 ± i)/4` and `β = α*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylSolution {
    pub b: BMatrix,
    pub alpha: C64,
    pub beta: C64,
    pub alpha_branch: Sign,
}

impl WeylSolution {
    pub fn new(family: Family, sign: Sign, alpha_branch: Sign) -> Self {
        let alpha = c(0.25, 0.25 * alpha_branch.value());
        WeylSolution { b: BMatrix::new(family, sign), alpha, beta: alpha.conj(), alpha_branch }
    }

    pub fn label(&self) -> SolutionLabel {
        SolutionLabel { family: self.b.family, sign: self.b.sign, alpha_branch: self.alpha_branch }
    }

    /// `A_j = (α/2)(I + a_j·σ)`, `A_{−j} = (α*/2)(I − a_j*·σ)`, `A_0 = 0`.
    pub fn transition_set(&self) -> WeylTransitionSet {
        let id = CMat2::identity();
        let a_plus = [0, 1, 2, 3].map(|j| (id + dot_sigma(&self.b.column(j))) * (self.alpha * 0.5));
        let a_minus = [0, 1, 2, 3]
            .map(|j| (id - dot_sigma(&self.b.column(j).map(|z| z.conj()))) * (self.beta * 0.5));
        TransitionSet::new(CMat2::zeros(), a_plus, a_minus)
    }
}

/// Family 1, sign −, `α = (1 + i)/4`.
pub fn canonical_solution() -> WeylSolution {
    WeylSolution::new(Family::One, Sign::Minus, Sign::Plus)
}

pub fn build_weyl_solution(family: Family, sign: Sign, alpha_branch: Sign) -> WeylTransitionSet {
    WeylSolution::new(family, sign, alpha_branch).transition_set()
}

/// All twelve `(B, α)` combinations, in B-matrix order with `α` branch `+` first.
pub fn all_solutions() -> Vec<WeylSolution> {
    build_b_matrices()
        .into_iter()
        .flat_map(|b| {
            [Sign::Plus, Sign::Minus].map(move |a| WeylSolution::new(b.family, b.sign, a))
        })
        .collect()
}

/// Probe momenta separating the two dispersion branches.
pub fn default_probes() -> Vec<WaveVector> {
    vec![
        WaveVector::new(PI / 4.0, PI / 4.0, PI / 4.0),
        WaveVector::new(PI / 3.0, PI / 5.0, PI / 7.0),
    ]
}

pub const FINGERPRINT_TOL: f64 = 1e-9;

/// Sorted eigenphases of `A(k)` at each probe.
pub fn spectral_fingerprint(ts: &WeylTransitionSet, probes: &[WaveVector]) -> Result<Vec<[f64; 2]>> {
    probes
        .iter()
        .map(|k| {
            let p = ts.momentum_operator(k).eigenphases()?;
            Ok([p[0], p[1]])
        })
        .collect()
}

fn fingerprints_match(a: &[[f64; 2]], b: &[[f64; 2]], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x[0] - y[0]).abs() <= tol && (x[1] - y[1]).abs() <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralClass {
    /// Indices into the classified slice.
    pub members: Vec<usize>,
    pub fingerprint: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceClasses {
    pub classes: Vec<SpectralClass>,
    /// Whether `A(k) ↦ A†(−k)` maps each class's first member onto the other class.
    pub exchanged_by_adjoint_reflection: bool,
}

/// Partition twelve automata by the eigenphases of `A(k)` at the probe momenta.
pub fn classify_equivalence(
    all: &[WeylTransitionSet],
    probes: &[WaveVector],
) -> Result<EquivalenceClasses> {
    if all.len() != 12 {
        return Err(Error::SolutionCount { expected: 12, found: all.len() });
    }
    // The probes must separate the closed-form branches cos w = ccc ± sss.
    let separated = probes.iter().any(|k| {
        let s = k.x.sin() * k.y.sin() * k.z.sin();
        (2.0 * s).abs() > FINGERPRINT_TOL
    });
    if !separated {
        return Err(Error::DegenerateProbe);
    }
    let mut classes: Vec<SpectralClass> = Vec::new();
    for (i, ts) in all.iter().enumerate() {
        let fp = spectral_fingerprint(ts, probes)?;
        match classes.iter_mut().find(|cl| fingerprints_match(&cl.fingerprint, &fp, FINGERPRINT_TOL)) {
            Some(cl) => cl.members.push(i),
            None => classes.push(SpectralClass { members: vec![i], fingerprint: fp }),
        }
    }
    let exchanged = classes.len() == 2
        && classes.iter().enumerate().all(|(ci, cl)| {
            let image = all[cl.members[0]].adjoint_reflected();
            spectral_fingerprint(&image, probes)
                .map(|fp| fingerprints_match(&fp, &classes[1 - ci].fingerprint, FINGERPRINT_TOL))
                .unwrap_or(false)
        });
    Ok(EquivalenceClasses { classes, exchanged_by_adjoint_reflection: exchanged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{check_isotropy, check_unitarity_groups, isotropy_table, CONSTRAINT_TOL};

    fn to_c(m: [[i64; 4]; 4]) -> Matrix4<C64> {
        Matrix4::from_fn(|r, col| c(m[r][col] as f64, 0.0))
    }

    #[test]
    fn gram_pair_of_tetrahedron() {
        let t = tetra_matrix();
        let cols = [0, 1, 2, 3].map(|j| CVec3::new(c(t[0][j] as f64, 0.), c(t[1][j] as f64, 0.), c(t[2][j] as f64, 0.)));
        let (gr, gc) = gram_pair(&cols);
        assert_eq!(gr, tetrahedron_gram());
        assert_eq!(gc, tetrahedron_gram());
        assert_eq!(to_c(TMatrix::tetrahedron().gram()), tetrahedron_gram().0);
    }

    #[test]
    fn gram_pair_of_zero_vectors() {
        let (gr, gc) = gram_pair(&[CVec3::zeros(); 4]);
        assert_eq!(gr.0, Matrix4::zeros());
        assert_eq!(gc.0, Matrix4::zeros());
    }

    #[test]
    fn b1_minus_conjugated_gram_is_tetrahedral() {
        let (_, gc) = BMatrix::new(Family::One, Sign::Minus).gram_pair();
        assert!(max_norm(&(gc.0 - tetrahedron_gram().0)) <= 1e-14);
    }

    #[test]
    fn search_returns_three_pairs() {
        let sols = enumerate_gr_solutions();
        let pairs: Vec<(f64, f64)> = sols.iter().map(|s| (s.x, s.y)).collect();
        assert_eq!(pairs, vec![(1.0, -3.0), (1.0, 1.0), (-3.0, 1.0)]);
        // (−3, −3) is the one candidate cut by |x + y| = 2.
        assert!(!pairs.contains(&(-3.0, -3.0)));
    }

    #[test]
    fn gr_eigenvalues_under_rotation() {
        let r = rotation_r();
        assert_eq!(r.transpose() * r, Matrix4::identity());
        for s in enumerate_gr_solutions() {
            let re = s.gram.0.map(|z| z.re);
            let d = r * re * r.transpose();
            let expect = gr_eigenvalues_closed(s.x, s.y);
            for i in 0..4 {
                for j in 0..4 {
                    let e = if i == j { expect[i] } else { 0.0 };
                    assert!((d[(i, j)] - e).abs() < 1e-14, "({}, {})", s.x, s.y);
                }
            }
        }
        let mut ev = gr_eigenvalues_closed(1.0, -3.0);
        ev.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(ev, [-4.0, 0.0, 4.0, 4.0]);
    }

    #[test]
    fn gr_row_sums_vanish() {
        for s in enumerate_gr_solutions() {
            for r in s.gram.row_sums() {
                assert!(r.norm() <= 1e-14);
            }
            assert!(s.gram.is_symmetric(0.0));
        }
    }

    #[test]
    fn b_matrix_examples() {
        let b = BMatrix::new(Family::One, Sign::Plus);
        assert_eq!(b.column(0), CVec3::new(c(1., 0.), c(1., 0.), c(0., 1.)));
        assert_eq!(b.column(0).dot(&b.column(0)), c(1.0, 0.0));
        for f in Family::ALL {
            assert_eq!(BMatrix::new(f, Sign::Plus).entries, BMatrix::new(f, Sign::Minus).conjugate());
        }
    }

    #[test]
    fn every_b_matrix_has_admissible_grams() {
        let admissible: Vec<GramMatrix4> = enumerate_gr_solutions().iter().map(|s| s.gram).collect();
        let bs = build_b_matrices();
        assert_eq!(bs.len(), 6);
        for b in &bs {
            for col in b.columns() {
                assert!((col.dot(&col) - c(1.0, 0.0)).norm() <= 1e-14);
            }
            let (gr, gc) = b.gram_pair();
            assert!(max_norm(&(gc.0 - tetrahedron_gram().0)) <= 1e-14);
            assert!(admissible.iter().any(|g| max_norm(&(g.0 - gr.0)) <= 1e-14));
            assert!(gc.is_hermitian(0.0));
            assert!(gc.hermitian_eigenvalues()[0] >= -1e-12);
            assert!(gc.hermitian_eigenvalues()[0].abs() <= 1e-10);
            assert!(gc.determinant().norm() <= 1e-12);
            for s in gc.row_sums() {
                assert!(s.norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn family_maps_to_pair() {
        let expect = [(Family::One, (1.0, -3.0)), (Family::Two, (1.0, 1.0)), (Family::Three, (-3.0, 1.0))];
        for (f, (x, y)) in expect {
            let (gr, _) = BMatrix::new(f, Sign::Plus).gram_pair();
            assert_eq!(gr.0[(0, 1)], c(x, 0.0));
            assert_eq!(gr.0[(0, 3)], c(y, 0.0));
        }
    }

    #[test]
    fn alpha_constraints() {
        for branch in [Sign::Plus, Sign::Minus] {
            let s = WeylSolution::new(Family::One, Sign::Minus, branch);
            assert_eq!(s.alpha + s.beta, c(0.5, 0.0));
            assert_eq!(s.alpha.norm_sqr(), 0.125);
            assert_eq!(s.beta.norm_sqr(), 0.125);
            assert_eq!(s.transition_set().a0, CMat2::zeros());
        }
    }

    #[test]
    fn twelve_solutions_satisfy_all_constraints() {
        let sols = all_solutions();
        assert_eq!(sols.len(), 12);
        for s in &sols {
            let ts = s.transition_set();
            assert!(ts.c0_residual() <= 1e-14, "{}", s.label());
            assert!(check_unitarity_groups(&ts, CONSTRAINT_TOL).pass(), "{}", s.label());
            assert!(check_isotropy(&ts, &isotropy_table()) <= 1e-14, "{}", s.label());
        }
    }

    #[test]
    fn two_classes_of_six() {
        let sols = all_solutions();
        let sets: Vec<_> = sols.iter().map(|s| s.transition_set()).collect();
        let cls = classify_equivalence(&sets, &default_probes()).unwrap();
        assert_eq!(cls.classes.len(), 2);
        for cl in &cls.classes {
            assert_eq!(cl.members.len(), 6);
            let branch = sols[cl.members[0]].alpha_branch;
            assert!(cl.members.iter().all(|&m| sols[m].alpha_branch == branch));
        }
        assert!(cls.exchanged_by_adjoint_reflection);
    }

    #[test]
    fn probe_cosines_match_closed_form() {
        let k = default_probes()[0];
        for (branch, expect) in [(Sign::Plus, 0.5f64.sqrt()), (Sign::Minus, 0.0)] {
            let ts = build_weyl_solution(Family::Two, Sign::Plus, branch);
            let fp = spectral_fingerprint(&ts, &[k]).unwrap();
            assert!((fp[0][0].cos() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_probe_is_rejected() {
        let sets: Vec<_> = all_solutions().iter().map(|s| s.transition_set()).collect();
        let bad = [WaveVector::new(0.3, 0.0, 0.0), WaveVector::new(0.0, 1.0, 2.0)];
        assert_eq!(classify_equivalence(&sets, &bad), Err(Error::DegenerateProbe));
        assert!(matches!(
            classify_equivalence(&sets[..5], &default_probes()),
            Err(Error::SolutionCount { .. })
        ));
    }
}
