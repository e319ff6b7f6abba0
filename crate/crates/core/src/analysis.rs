//! Closed-form dispersion relations and the numerical checks against them.
//!
//! Sign conventions: the automaton acts as `A(k) = e^{−iH(k)}`, so an
//! eigenphase `w` of `A(k)` is the energy `−w`. Bands are labelled by the
//! sign of their energy: the `+` band has energy `+arccos(cos w)` and
//! eigenphase `−arccos(cos w)`. Group velocities are energy gradients, which
//! is the direction wave packets actually travel under the gather stencil.

use nalgebra::{SMatrix, Vector3};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{self, Write};

use crate::automaton::{TransitionSet, WeylTransitionSet};
use crate::derivation::WeylSolution;
use crate::dirac::{build_dirac, mass_from_coupling, DiracTransitionSet};
use crate::error::{Error, Result};
use crate::lattice::WaveVector;
use crate::smallmat::{
    c, dot_sigma, eigenphases2, gamma_set, max_norm, pauli_decompose, phase_distance, CMat2, CMat4,
    CVec3, UnitarySpectral, C64, I_UNIT,
};
use crate::Sign;

/// `cos kx cos ky cos kz ± sin kx sin ky sin kz`.
pub fn dispersion_cos(k: &WaveVector, branch: Sign) -> f64 {
    let ccc = k.x.cos() * k.y.cos() * k.z.cos();
    let sss = k.x.sin() * k.y.sin() * k.z.sin();
    ccc + branch.value() * sss
}

/// `s·dispersion_cos`, clamped into `[−1, 1]` against rounding.
pub fn dispersion_cos_scaled(k: &WaveVector, branch: Sign, s: f64) -> f64 {
    (s * dispersion_cos(k, branch)).clamp(-1.0, 1.0)
}

/// `(w, −w)` with `w = arccos(cos kx cos ky cos kz ± sin kx sin ky sin kz) ∈ [0, π]`.
pub fn weyl_dispersion(k: &WaveVector, branch: Sign) -> (f64, f64) {
    let w = dispersion_cos(k, branch).clamp(-1.0, 1.0).acos();
    (w, -w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub k: WaveVector,
    /// Descending.
    pub numeric_phases: Vec<f64>,
    /// Descending, with multiplicity.
    pub closed_form_phases: Vec<f64>,
    pub abs_err: f64,
}

/// Worst circular distance under the assignment minimising the total distance.
pub fn matched_error(numeric: &[f64], closed: &[f64]) -> f64 {
    assert_eq!(numeric.len(), closed.len());
    let n = numeric.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, f64::INFINITY);
    permute(&mut perm, 0, &mut |p| {
        let d: Vec<f64> = p.iter().enumerate().map(|(i, &j)| phase_distance(numeric[i], closed[j])).collect();
        let total: f64 = d.iter().sum();
        if total < best.0 {
            best = (total, d.iter().copied().fold(0.0, f64::max));
        }
    });
    best.1
}

fn permute(p: &mut [usize], start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}

pub fn spectrum_sample<const D: usize>(
    set: &TransitionSet<D>,
    k: &WaveVector,
    closed: Vec<f64>,
) -> Result<SpectrumSample>
where
    SMatrix<C64, D, D>: UnitarySpectral,
{
    let numeric = set.momentum_operator(k).eigenphases()?;
    let abs_err = matched_error(&numeric, &closed);
    Ok(SpectrumSample { k: *k, numeric_phases: numeric, closed_form_phases: closed, abs_err })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub samples: Vec<SpectrumSample>,
    pub max_err: f64,
}

impl SpectrumReport {
    fn from_samples(samples: Vec<SpectrumSample>) -> Self {
        let max_err = samples.iter().map(|s| s.abs_err).fold(0.0, f64::max);
        SpectrumReport { samples, max_err }
    }

    /// Whether every sample's numerical phases come in equal pairs.
    pub fn multiplicity_two(&self, tol: f64) -> bool {
        self.samples.iter().all(|s| pairs_up(&s.numeric_phases, tol))
    }

    /// `kx,ky,kz,w_num_1,…,w_cf_plus,w_cf_minus,abs_err`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.samples.first().map_or(2, |s| s.numeric_phases.len());
        let mut header = String::from("kx,ky,kz");
        for i in 1..=n {
            header.push_str(&format!(",w_num_{i}"));
        }
        header.push_str(",w_cf_plus,w_cf_minus,abs_err");
        writeln!(w, "{header}")?;
        for s in &self.samples {
            let mut row = format!("{},{},{}", s.k.x, s.k.y, s.k.z);
            for p in &s.numeric_phases {
                row.push_str(&format!(",{p}"));
            }
            let hi = s.closed_form_phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = s.closed_form_phases.iter().copied().fold(f64::INFINITY, f64::min);
            row.push_str(&format!(",{hi},{lo},{}", s.abs_err));
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// Descending phases split into equal neighbours `(p0 ≈ p1), (p2 ≈ p3), …`,
/// treating the two ends of the circle as neighbours.
fn pairs_up(phases: &[f64], tol: f64) -> bool {
    let n = phases.len();
    if !n.is_multiple_of(2) {
        return false;
    }
    let direct = (0..n / 2).all(|i| phase_distance(phases[2 * i], phases[2 * i + 1]) <= tol);
    let rotated = (0..n / 2).all(|i| phase_distance(phases[(2 * i + 1) % n], phases[(2 * i + 2) % n]) <= tol);
    direct || rotated
}

/// Compare the eigenphases of a Weyl `A(k)` against the closed form of `branch`.
pub fn verify_weyl_dispersion(
    ts: &WeylTransitionSet,
    branch: Sign,
    grid: &[WaveVector],
) -> Result<SpectrumReport> {
    let samples = grid
        .par_iter()
        .map(|k| {
            let (p, m) = weyl_dispersion(k, branch);
            spectrum_sample(ts, k, vec![p, m])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport::from_samples(samples))
}

/// Compare the eigenphases of `B(k, s)` against `±ω`, each twice.
pub fn verify_dirac_dispersion(
    dts: &DiracTransitionSet,
    branch: Sign,
    grid: &[WaveVector],
) -> Result<SpectrumReport> {
    let samples = grid
        .par_iter()
        .map(|k| {
            let w = crate::dirac::dirac_closed_spectrum(k, dts.s, branch)?;
            spectrum_sample(&dts.set, k, vec![w, w, -w, -w])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport::from_samples(samples))
}

/// Which closed-form dispersion a group velocity refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    Weyl { alpha_branch: Sign },
    Dirac { alpha_branch: Sign, s: f64 },
}

impl Dispersion {
    /// `|E| = arccos(cos ω) ∈ [0, π]`.
    pub fn abs_energy(&self, k: &WaveVector) -> f64 {
        match *self {
            Dispersion::Weyl { alpha_branch } => weyl_dispersion(k, alpha_branch).0,
            Dispersion::Dirac { alpha_branch, s } => dispersion_cos_scaled(k, alpha_branch, s).acos(),
        }
    }

    /// Energy of `band`, i.e. minus the corresponding eigenphase.
    pub fn energy(&self, k: &WaveVector, band: Sign) -> f64 {
        band.value() * self.abs_energy(k)
    }

    /// Closest approach of the two bands, `2 min(|E|, π − |E|)`.
    pub fn gap(&self, k: &WaveVector) -> f64 {
        let e = self.abs_energy(k);
        2.0 * e.min(PI - e)
    }
}

pub const DEGENERACY_TOL: f64 = 1e-6;

/// Central-difference gradient of the band energy.
pub fn group_velocity(disp: &Dispersion, band: Sign, k: &WaveVector, h: f64) -> Result<Vector3<f64>> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!("difference step {h} outside [1e-6, 1e-2]")));
    }
    let mut v = Vector3::zeros();
    for axis in 0..3 {
        let mut e = WaveVector::zeros();
        e[axis] = h;
        for q in [*k, k + e, k - e] {
            let gap = disp.gap(&q);
            if gap < DEGENERACY_TOL {
                return Err(Error::DegenerateBand { gap });
            }
        }
        v[axis] = (disp.energy(&(k + e), band) - disp.energy(&(k - e), band)) / (2.0 * h);
    }
    Ok(v)
}

/// Log-log fit of a residual against a shrinking scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceFit {
    pub scales: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted_order: f64,
}

impl ConvergenceFit {
    pub fn new(scales: Vec<f64>, residuals: Vec<f64>) -> Result<Self> {
        if scales.len() != residuals.len() || scales.len() < 2 {
            return Err(Error::InsufficientData { needed: 2, found: scales.len().min(residuals.len()) });
        }
        if scales.iter().any(|&e| !(e > 0.0)) || scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("scales must be positive and strictly decreasing".into()));
        }
        if residuals.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidParameter("residuals must be positive to fit an order".into()));
        }
        let xs: Vec<f64> = scales.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
        let fitted_order = least_squares_slope(&xs, &ys);
        Ok(ConvergenceFit { scales, residuals, fitted_order })
    }
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn unit_direction(direction: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = direction.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter("direction must be a nonzero finite vector".into()));
    }
    Ok(direction / n)
}

fn real_cvec(v: &Vector3<f64>) -> CVec3 {
    v.map(|x| c(x, 0.0))
}

/// `‖A(ε n̂) − (I + i ε n̂·σ)‖_max`.
pub fn continuum_residual_at(ts: &WeylTransitionSet, eps: f64, n_hat: &Vector3<f64>) -> f64 {
    let k = n_hat * eps;
    let target = CMat2::identity() + dot_sigma(&real_cvec(&k)) * I_UNIT;
    max_norm(&(ts.momentum_operator(&k) - target))
}

pub fn continuum_residual(
    ts: &WeylTransitionSet,
    epsilons: &[f64],
    direction: &Vector3<f64>,
) -> Result<ConvergenceFit> {
    let n_hat = unit_direction(direction)?;
    if epsilons.iter().any(|&e| e > 0.5) {
        return Err(Error::InvalidParameter("continuum scales must not exceed 0.5".into()));
    }
    let res = epsilons.iter().map(|&e| continuum_residual_at(ts, e, &n_hat)).collect();
    ConvergenceFit::new(epsilons.to_vec(), res)
}

/// `‖B(k, s) − (I + i k·γγ0 + i r γ0)‖_max` with `s = √(1 − r²)`, mass sign `+`.
pub fn dirac_continuum_residual_at(weyl: WeylSolution, k: &WaveVector, r: f64) -> Result<f64> {
    let s = mass_from_coupling(r);
    let d = build_dirac(s, Sign::Plus, weyl)?;
    let g = gamma_set();
    let target = CMat4::identity() + g.dot_gamma_gamma0(&real_cvec(k)) * I_UNIT + g.g0 * (I_UNIT * r);
    Ok(max_norm(&(d.momentum_operator(k) - target)))
}

/// Joint limit `k = ε n̂`, `r = mass_ratio·ε`.
pub fn dirac_continuum_residual(
    weyl: WeylSolution,
    epsilons: &[f64],
    direction: &Vector3<f64>,
    mass_ratio: f64,
) -> Result<ConvergenceFit> {
    let n_hat = unit_direction(direction)?;
    if epsilons.iter().any(|&e| e > 0.5) || !(mass_ratio >= 0.0) {
        return Err(Error::InvalidParameter("continuum scales must not exceed 0.5".into()));
    }
    let res = epsilons
        .iter()
        .map(|&e| dirac_continuum_residual_at(weyl, &(n_hat * e), mass_ratio * e))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceFit::new(epsilons.to_vec(), res)
}

/// Principal `H(k) = i log A(k)`; its eigenvalues are minus the eigenphases.
pub fn hamiltonian(ts: &WeylTransitionSet, k: &WaveVector) -> Result<CMat2> {
    let a = ts.momentum_operator(k);
    let (p, m) = eigenphases2(&a)?;
    if p.abs() >= PI - 1e-12 || m.abs() >= PI - 1e-12 {
        return Err(Error::LogBranch);
    }
    // A = e^{i mid}·V with V ∈ SU(2) of eigenphases ±half.
    let mid = 0.5 * (p + m);
    let half = 0.5 * (p - m);
    let v = a * C64::from_polar(1.0, -mid);
    let b = pauli_decompose(&v).a;
    let ratio = if half.abs() < 1e-8 { 1.0 + half * half / 6.0 } else { half / half.sin() };
    let log_v = dot_sigma(&(b * c(ratio, 0.0)));
    Ok(CMat2::identity() * c(-mid, 0.0) + log_v * I_UNIT)
}

/// `‖H(k) − (−k·σ)‖_max`.
pub fn hamiltonian_deviation(ts: &WeylTransitionSet, k: &WaveVector) -> Result<f64> {
    let h = hamiltonian(ts, k)?;
    Ok(max_norm(&(h + dot_sigma(&real_cvec(k)))))
}

/// Largest `‖H(k) − (−k·σ)‖_max / |k|²` over `ks`, skipping `k = 0`.
pub fn hamiltonian_limit(ts: &WeylTransitionSet, ks: &[WaveVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in ks {
        let n2 = k.norm_squared();
        if n2 > 0.0 {
            worst = worst.max(hamiltonian_deviation(ts, k)? / n2);
        }
    }
    Ok(worst)
}
