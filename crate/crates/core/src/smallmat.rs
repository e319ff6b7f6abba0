//! Fixed-size complex linear algebra for the 2×2 and 4×4 operators.
//!
//! Matrices are plain `nalgebra` static matrices over [`C64`]. The Pauli
//! basis, the Weyl-representation Gamma matrices and the closed-form
//! spectral routines for unitaries live here.

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;
pub type CVec3 = Vector3<C64>;

/// Tolerance on `‖U†U − I‖_max` accepted by the spectral routines.
pub const UNITARY_TOL: f64 = 1e-10;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const I_UNIT: C64 = c(0.0, 1.0);

/// Maximum absolute entry.
pub fn max_norm<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect<const D: usize>(u: &SMatrix<C64, D, D>) -> f64 {
    max_norm(&(u.adjoint() * u - SMatrix::<C64, D, D>::identity()))
}

pub fn is_finite<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Wrap an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    // rem_euclid maps −π to π already; guard the rounding edge.
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

/// Distance between two angles on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// σ₁, σ₂, σ₃.
pub fn pauli() -> [CMat2; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    [
        CMat2::new(z, one, one, z),
        CMat2::new(z, -I_UNIT, I_UNIT, z),
        CMat2::new(one, z, z, -one),
    ]
}

/// `v·σ` for a complex 3-vector.
pub fn dot_sigma(v: &CVec3) -> CMat2 {
    let s = pauli();
    s[0] * v[0] + s[1] * v[1] + s[2] * v[2]
}

/// Coefficients of `a0·I + a·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomp {
    pub a0: C64,
    pub a: CVec3,
}

pub fn pauli_compose(d: &PauliDecomp) -> CMat2 {
    CMat2::identity() * d.a0 + dot_sigma(&d.a)
}

/// Unique Pauli coefficients, `a_μ = tr(σ_μ m)/2`.
pub fn pauli_decompose(m: &CMat2) -> PauliDecomp {
    // Written out entrywise so the round trip stays exact to rounding.
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    PauliDecomp {
        a0: (m00 + m11) * 0.5,
        a: CVec3::new(
            (m01 + m10) * 0.5,
            (m01 - m10) * c(0.0, 0.5),
            (m00 - m11) * 0.5,
        ),
    }
}

/// Eigenphases `(w_plus, w_minus)` of a 2×2 unitary, `w_plus ≥ w_minus`, both in `(−π, π]`.
///
/// The unitary is factored as `e^{iφ/2}·V` with `V ∈ SU(2)`; writing
/// `V = cos θ·I + b·σ` gives the eigenphases `φ/2 ± θ` with
/// `θ = atan2(‖b‖, Re tr V / 2)`, which stays well conditioned at
/// degenerate points where the quadratic formula does not.
pub fn eigenphases2(u: &CMat2) -> Result<(f64, f64), Error> {
    let defect = unitarity_defect(u);
    if !(defect <= UNITARY_TOL) {
        return Err(Error::NotUnitary { defect });
    }
    let (half, theta) = su2_angles(u);
    let p = wrap_phase(half + theta);
    let m = wrap_phase(half - theta);
    Ok(if p >= m { (p, m) } else { (m, p) })
}

/// `(φ/2, θ)` with `u = e^{iφ/2}(cos θ I + i sin θ n̂·σ)`, `θ ∈ [0, π]`.
fn su2_angles(u: &CMat2) -> (f64, f64) {
    let half = 0.5 * u.determinant().arg();
    let v = u * C64::from_polar(1.0, -half);
    let d = pauli_decompose(&v);
    let bnorm = d.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (half, bnorm.atan2(d.a0.re))
}

/// Spectral operations shared by the 2×2 and 4×4 unitaries.
pub trait UnitarySpectral: Sized {
    /// Eigenphases in `(−π, π]`, sorted descending.
    fn eigenphases(&self) -> Result<Vec<f64>, Error>;
    /// `self^n` through the spectral decomposition.
    fn unitary_power(&self, n: u64) -> Result<Self, Error>;
    /// Unit eigenvectors paired with eigenphases, sorted by descending phase.
    fn eigenpairs(&self) -> Result<Vec<(f64, Vec<C64>)>, Error>;
}

impl UnitarySpectral for CMat2 {
    fn eigenphases(&self) -> Result<Vec<f64>, Error> {
        let (p, m) = eigenphases2(self)?;
        Ok(vec![p, m])
    }

    fn unitary_power(&self, n: u64) -> Result<Self, Error> {
        let defect = unitarity_defect(self);
        if !(defect <= UNITARY_TOL) {
            return Err(Error::NotUnitary { defect });
        }
        if n == 0 {
            return Ok(CMat2::identity());
        }
        let (half, theta) = su2_angles(self);
        let v = self * C64::from_polar(1.0, -half);
        let d = pauli_decompose(&v);
        let nf = n as f64;
        let st = theta.sin();
        // sin(nθ)/sin θ, with the limit n·cos(nθ)/cos θ at θ ∈ {0, π}.
        let ratio = if st.abs() < 1e-12 {
            nf * (nf * theta).cos() / theta.cos()
        } else {
            (nf * theta).sin() / st
        };
        let vn = CMat2::identity() * c((nf * theta).cos(), 0.0) + dot_sigma(&(d.a * c(ratio, 0.0)));
        Ok(vn * C64::from_polar(1.0, nf * half))
    }

    fn eigenpairs(&self) -> Result<Vec<(f64, Vec<C64>)>, Error> {
        let (p, m) = eigenphases2(self)?;
        let mut out = Vec::with_capacity(2);
        for phase in [p, m] {
            let lam = C64::from_polar(1.0, phase);
            // Null vector of (u − λ I): take the better-conditioned row.
            let a = self - CMat2::identity() * lam;
            let r0 = a[(0, 0)].norm_sqr() + a[(0, 1)].norm_sqr();
            let r1 = a[(1, 0)].norm_sqr() + a[(1, 1)].norm_sqr();
            let v = if r0.max(r1) < 1e-24 {
                // u = λ I, every vector works; keep the two orthogonal.
                if out.is_empty() {
                    vec![c(1.0, 0.0), c(0.0, 0.0)]
                } else {
                    vec![c(0.0, 0.0), c(1.0, 0.0)]
                }
            } else if r0 >= r1 {
                vec![a[(0, 1)], -a[(0, 0)]]
            } else {
                vec![a[(1, 1)], -a[(1, 0)]]
            };
            out.push((phase, normalize(v)));
        }
        Ok(out)
    }
}

impl UnitarySpectral for CMat4 {
    fn eigenphases(&self) -> Result<Vec<f64>, Error> {
        Ok(self.eigenpairs()?.into_iter().map(|(p, _)| p).collect())
    }

    fn unitary_power(&self, n: u64) -> Result<Self, Error> {
        if n == 0 {
            return Ok(CMat4::identity());
        }
        let (q, phases) = schur_unitary4(self)?;
        let diag = CMat4::from_diagonal(&nalgebra::Vector4::from_iterator(
            phases.iter().map(|&p| C64::from_polar(1.0, p * n as f64)),
        ));
        Ok(q * diag * q.adjoint())
    }

    fn eigenpairs(&self) -> Result<Vec<(f64, Vec<C64>)>, Error> {
        let (q, phases) = schur_unitary4(self)?;
        let mut pairs: Vec<(f64, Vec<C64>)> = phases
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, q.column(i).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(pairs)
    }
}

/// Complex Schur form of a 4×4 unitary. Unitaries are normal, so the
/// triangular factor is diagonal to rounding and the Schur vectors are
/// eigenvectors; the diagonal is projected back onto the unit circle.
fn schur_unitary4(u: &CMat4) -> Result<(CMat4, [f64; 4]), Error> {
    let defect = unitarity_defect(u);
    if !(defect <= UNITARY_TOL) {
        return Err(Error::NotUnitary { defect });
    }
    let schur = nalgebra::linalg::Schur::try_new(*u, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let phases = [0, 1, 2, 3].map(|i| wrap_phase(t[(i, i)].arg()));
    Ok((q, phases))
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Weyl-representation Gamma matrices and `γ5 = iγ0γ1γ2γ3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub g0: CMat4,
    pub g: [CMat4; 3],
    pub g5: CMat4,
}

impl GammaSet {
    /// `γ0, γ1, γ2, γ3` in index order.
    pub fn mu(&self, mu: usize) -> &CMat4 {
        match mu {
            0 => &self.g0,
            1..=3 => &self.g[mu - 1],
            _ => panic!("gamma index {mu} out of range"),
        }
    }

    /// `v·(γγ0) = Σ_i v_i γ_i γ0`.
    pub fn dot_gamma_gamma0(&self, v: &CVec3) -> CMat4 {
        (0..3).fold(CMat4::zeros(), |acc, i| acc + self.g[i] * self.g0 * v[i])
    }
}

pub fn gamma_set() -> GammaSet {
    let id = CMat2::identity();
    let g0 = block4(&CMat2::zeros(), &id, &id, &CMat2::zeros());
    let g = pauli().map(|s| block4(&CMat2::zeros(), &s, &(-s), &CMat2::zeros()));
    let g5 = g0 * g[0] * g[1] * g[2] * I_UNIT;
    GammaSet { g0, g, g5 }
}

/// Assemble `[[a, b], [c, d]]` from 2×2 blocks.
pub fn block4(a: &CMat2, b: &CMat2, cm: &CMat2, d: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(cm);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// The 2×2 block at block row `r`, block column `col`.
pub fn sub_block(m: &CMat4, r: usize, col: usize) -> CMat2 {
    m.fixed_view::<2, 2>(2 * r, 2 * col).into_owned()
}
