//! Four-component automata built by coupling two Weyl automata.
//!
//! `B(k, s) = [[s A(k), ± i r I], [± i r I, s A†(k)]]` with `r = √(1 − s²)`.
//! The transition matrices are `B_0 = ± i r γ0`,
//! `B_j = s (α/2)(I + a_j·γγ0)` and `B_{−j} = s (α*/2)(I − a_j*·γγ0)`.

use crate::automaton::TransitionSet;
use crate::derivation::WeylSolution;
use crate::error::{Error, Result};
use crate::lattice::WaveVector;
use crate::smallmat::{block4, c, gamma_set, CMat2, CMat4, I_UNIT};
use crate::Sign;

#[derive(Debug, Clone, PartialEq)]
pub struct DiracTransitionSet {
    pub s: f64,
    pub mass_sign: Sign,
    pub weyl: WeylSolution,
    pub set: TransitionSet<4>,
}

/// `√(1 − s²)`, factored to limit cancellation near `s = 1`.
pub fn mass_from_coupling(s: f64) -> f64 {
    ((1.0 - s) * (1.0 + s)).max(0.0).sqrt()
}

pub fn build_dirac(s: f64, mass_sign: Sign, weyl: WeylSolution) -> Result<DiracTransitionSet> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("coupling s = {s} outside [0, 1]")));
    }
    let g = gamma_set();
    let r = mass_from_coupling(s);
    let id = CMat4::identity();
    let b0 = g.g0 * (I_UNIT * (mass_sign.value() * r));
    let a_plus = [0, 1, 2, 3].map(|j| {
        let a = weyl.b.column(j);
        (id + g.dot_gamma_gamma0(&a)) * (weyl.alpha * (0.5 * s))
    });
    let a_minus = [0, 1, 2, 3].map(|j| {
        let a = weyl.b.column(j).map(|z| z.conj());
        (id - g.dot_gamma_gamma0(&a)) * (weyl.beta * (0.5 * s))
    });
    Ok(DiracTransitionSet { s, mass_sign, weyl, set: TransitionSet::new(b0, a_plus, a_minus) })
}

impl DiracTransitionSet {
    pub fn mass(&self) -> f64 {
        mass_from_coupling(self.s)
    }

    pub fn momentum_operator(&self, k: &WaveVector) -> CMat4 {
        self.set.momentum_operator(k)
    }

    /// `B'_j = γ0 B_j` (and `B'_{−j}`, `B'_0`).
    pub fn primed(&self) -> TransitionSet<4> {
        self.set.left_multiplied(&gamma_set().g0)
    }
}

impl TransitionSet<4> {
    fn left_multiplied(&self, m: &CMat4) -> Self {
        TransitionSet {
            a0: m * self.a0,
            a_plus: self.a_plus.map(|a| m * a),
            a_minus: self.a_minus.map(|a| m * a),
            gen: self.gen,
        }
    }
}

/// `ω ∈ [0, π]` with `cos ω = s(cos kx cos ky cos kz ± sin kx sin ky sin kz)`;
/// the spectrum is `e^{±iω}`, each with multiplicity two.
pub fn dirac_closed_spectrum(k: &WaveVector, s: f64, branch: Sign) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("coupling s = {s} outside [0, 1]")));
    }
    Ok(crate::analysis::dispersion_cos_scaled(k, branch, s).acos())
}

/// Flip the mass sign; equivalent to conjugating every transition matrix by γ5.
pub fn gamma5_conjugate(dts: &DiracTransitionSet) -> Result<DiracTransitionSet> {
    build_dirac(dts.s, dts.mass_sign.flip(), dts.weyl)
}

/// `γ5 B γ5` for each transition matrix (γ5 is Hermitian and squares to one).
pub fn gamma5_conjugated_set(dts: &DiracTransitionSet) -> TransitionSet<4> {
    dts.set.conjugated(&gamma_set().g5)
}

/// Diagonal coupling blocks of `B(k)`: `(s A(k), i r I, i r I, s A†(k))`.
pub fn expected_blocks(dts: &DiracTransitionSet, k: &WaveVector) -> CMat4 {
    let a = dts.weyl.transition_set().momentum_operator(k);
    let m = I_UNIT * (dts.mass_sign.value() * dts.mass());
    let off = CMat2::identity() * m;
    block4(&(a * c(dts.s, 0.0)), &off, &off, &(a.adjoint() * c(dts.s, 0.0)))
}
