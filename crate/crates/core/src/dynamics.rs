//! Field evolution on the periodic lattice.
//!
//! The stencil gathers: `ψ_y(t+1) = A₀ψ_y(t) + Σ_h A_h ψ_{y+h}(t)`, so a plane
//! wave `e^{ik·x}χ` is mapped to `e^{ik·x}A(k)χ`. Scattering instead would
//! silently evolve with the adjoint automaton.

use nalgebra::{SMatrix, SVector, Vector3};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use crate::automaton::TransitionSet;
use crate::error::{Error, Result};
use crate::lattice::{IntVec3, PeriodicLattice, WaveVector};
use crate::smallmat::{phase_distance, UnitarySpectral, C64};
use crate::Sign;

/// Amplitudes laid out as `amp[site * ncomp + component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub lat: PeriodicLattice,
    pub ncomp: usize,
    pub amp: Vec<C64>,
    pub time_step: u64,
}

impl FieldState {
    pub fn zeros(lat: PeriodicLattice, ncomp: usize) -> Self {
        FieldState { lat, ncomp, amp: vec![C64::new(0.0, 0.0); lat.num_sites() * ncomp], time_step: 0 }
    }

    /// A single site carrying `spinor`.
    pub fn delta(lat: PeriodicLattice, site: IntVec3, spinor: &[C64]) -> Self {
        let mut s = FieldState::zeros(lat, spinor.len());
        let [x, y, z] = lat.wrap(site);
        let i = lat.index(x, y, z);
        s.site_mut(i).copy_from_slice(spinor);
        s
    }

    /// The same spinor on every site.
    pub fn uniform(lat: PeriodicLattice, spinor: &[C64]) -> Self {
        let amp = spinor.iter().copied().cycle().take(lat.num_sites() * spinor.len()).collect();
        FieldState { lat, ncomp: spinor.len(), amp, time_step: 0 }
    }

    pub fn site(&self, idx: usize) -> &[C64] {
        &self.amp[idx * self.ncomp..(idx + 1) * self.ncomp]
    }

    pub fn site_mut(&mut self, idx: usize) -> &mut [C64] {
        &mut self.amp[idx * self.ncomp..(idx + 1) * self.ncomp]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Probability per site.
    pub fn density(&self) -> Vec<f64> {
        self.amp.chunks(self.ncomp).map(|s| s.iter().map(|a| a.norm_sqr()).sum()).collect()
    }

    /// The state moved by `shift`: new amplitude at `x + shift` is the old one at `x`.
    pub fn translated(&self, shift: IntVec3) -> Self {
        let mut out = FieldState::zeros(self.lat, self.ncomp);
        out.time_step = self.time_step;
        for i in 0..self.lat.num_sites() {
            let j = self.lat.shifted(i, shift);
            out.site_mut(j).copy_from_slice(self.site(i));
        }
        out
    }

    /// Largest componentwise difference.
    pub fn max_deviation(&self, other: &FieldState) -> f64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.ncomp != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.ncomp });
        }
        Ok(())
    }
}

/// One step of the gather stencil.
pub fn evolve_direct<const D: usize>(state: &FieldState, ts: &TransitionSet<D>) -> Result<FieldState> {
    state.check_dim(D)?;
    let lat = state.lat;
    let entries: Vec<_> = ts.entries().into_iter().filter(|(_, m)| m.iter().any(|z| z.norm() != 0.0)).collect();
    let mut amp = vec![C64::new(0.0, 0.0); state.amp.len()];
    amp.par_chunks_mut(D).enumerate().for_each(|(y, out)| {
        let mut acc = SVector::<C64, D>::zeros();
        for (h, m) in &entries {
            let src = lat.shifted(y, *h);
            acc += m * SVector::<C64, D>::from_column_slice(state.site(src));
        }
        out.copy_from_slice(acc.as_slice());
    });
    Ok(FieldState { lat, ncomp: D, amp, time_step: state.time_step + 1 })
}

pub fn evolve_direct_steps<const D: usize>(state: &FieldState, ts: &TransitionSet<D>, steps: u64) -> Result<FieldState> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = evolve_direct(&s, ts)?;
    }
    s.check_dim(D)?;
    Ok(s)
}

/// In-place 3D DFT of an `L³` array in site order, unnormalised.
struct Fft3 {
    side: usize,
    plan: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    fn new(side: usize, inverse: bool) -> Self {
        let mut planner = FftPlanner::new();
        let plan = if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
        Fft3 { side, plan }
    }

    fn apply(&self, data: &mut [C64]) {
        let l = self.side;
        // z is contiguous.
        self.plan.process(data);
        let mut line = vec![C64::new(0.0, 0.0); l];
        for stride in [l, l * l] {
            for base in 0..data.len() {
                // Each line starts at an index whose coordinate along this axis is 0.
                if (base / stride) % l != 0 {
                    continue;
                }
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                self.plan.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// Per-component spectra `F_c(k) = Σ_x e^{−ik·x} ψ_c(x)`, in FFT bin order.
pub fn to_momentum(state: &FieldState) -> Vec<Vec<C64>> {
    let fft = Fft3::new(state.lat.side(), false);
    (0..state.ncomp)
        .map(|c| {
            let mut f: Vec<C64> = state.amp.iter().skip(c).step_by(state.ncomp).copied().collect();
            fft.apply(&mut f);
            f
        })
        .collect()
}

fn from_momentum(lat: PeriodicLattice, spectra: Vec<Vec<C64>>, time_step: u64) -> FieldState {
    let ncomp = spectra.len();
    let fft = Fft3::new(lat.side(), true);
    let scale = 1.0 / lat.num_sites() as f64;
    let mut out = FieldState::zeros(lat, ncomp);
    out.time_step = time_step;
    for (c, mut f) in spectra.into_iter().enumerate() {
        fft.apply(&mut f);
        for (i, v) in f.into_iter().enumerate() {
            out.amp[i * ncomp + c] = v * scale;
        }
    }
    out
}

/// `steps` applications of the automaton via `A(k)^steps` on the momentum grid.
pub fn evolve_momentum<const D: usize>(state: &FieldState, ts: &TransitionSet<D>, steps: u64) -> Result<FieldState>
where
    SMatrix<C64, D, D>: UnitarySpectral,
{
    state.check_dim(D)?;
    if steps == 0 {
        return Ok(state.clone());
    }
    let lat = state.lat;
    let spectra = to_momentum(state);
    let evolved: Vec<SVector<C64, D>> = (0..lat.num_sites())
        .into_par_iter()
        .map(|i| {
            let p = ts.momentum_operator(&lat.grid_momentum(i)).unitary_power(steps)?;
            Ok(p * SVector::<C64, D>::from_fn(|c, _| spectra[c][i]))
        })
        .collect::<Result<_>>()?;
    let spectra = (0..D).map(|c| evolved.iter().map(|v| v[c]).collect()).collect();
    Ok(from_momentum(lat, spectra, state.time_step + steps))
}

/// Gaussian packet carried by one band of the automaton at `k0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    pub k0: [f64; 3],
    pub sigma: f64,
    pub x0: [f64; 3],
    /// Sign of the band energy; energy is minus the eigenphase.
    pub branch: Sign,
}

impl WavePacketSpec {
    pub fn validate(&self, lat: &PeriodicLattice) -> Result<()> {
        let max = lat.side() as f64 / 8.0;
        if !(self.sigma >= 1.0 && self.sigma <= max) {
            return Err(Error::InvalidParameter(format!("sigma {} outside [1, {max}]", self.sigma)));
        }
        if self.k0.iter().chain(&self.x0).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("packet centre and momentum must be finite".into()));
        }
        Ok(())
    }
}

pub const BAND_GAP_TOL: f64 = 1e-6;

/// Unit eigenvector of `A(k)` for the band with energy sign `band`.
pub fn band_spinor<const D: usize>(ts: &TransitionSet<D>, k: &WaveVector, band: Sign) -> Result<Vec<C64>>
where
    SMatrix<C64, D, D>: UnitarySpectral,
{
    let mut pairs = ts.momentum_operator(k).eigenpairs()?;
    let gap = phase_distance(pairs[0].0, pairs[D - 1].0);
    if gap < BAND_GAP_TOL {
        return Err(Error::DegenerateBand { gap });
    }
    // Positive energy is the smallest eigenphase.
    let chosen = match band {
        Sign::Plus => pairs.pop(),
        Sign::Minus => pairs.into_iter().next(),
    };
    Ok(chosen.map(|p| p.1).unwrap_or_default())
}

pub fn make_wave_packet<const D: usize>(
    spec: &WavePacketSpec,
    lat: PeriodicLattice,
    ts: &TransitionSet<D>,
) -> Result<FieldState>
where
    SMatrix<C64, D, D>: UnitarySpectral,
{
    spec.validate(&lat)?;
    let k0 = WaveVector::from(spec.k0);
    let chi = band_spinor(ts, &k0, spec.branch)?;
    let l = lat.side() as f64;
    let x0 = Vector3::from(spec.x0);
    let mut state = FieldState::zeros(lat, D);
    for i in 0..lat.num_sites() {
        let xs = lat.coords(i);
        // Minimum-image displacement keeps the packet and its phase continuous.
        let d = Vector3::from_fn(|a, _| {
            let raw = xs[a] as f64 - x0[a];
            raw - l * (raw / l).round()
        });
        let envelope = (-d.norm_squared() / (4.0 * spec.sigma * spec.sigma)).exp();
        let phase = C64::from_polar(envelope, k0.dot(&(x0 + d)));
        for (a, &c) in state.site_mut(i).iter_mut().zip(&chi) {
            *a = phase * c;
        }
    }
    let n = state.norm();
    state.amp.iter_mut().for_each(|a| *a /= n);
    Ok(state)
}

/// Periodic-aware centre of probability, each coordinate in `[0, L)`.
pub fn centroid(state: &FieldState) -> Vector3<f64> {
    let lat = state.lat;
    let l = lat.side() as f64;
    let density = state.density();
    let mut modes = [C64::new(0.0, 0.0); 3];
    for (i, p) in density.iter().enumerate() {
        let xs = lat.coords(i);
        for a in 0..3 {
            modes[a] += C64::from_polar(*p, 2.0 * PI * xs[a] as f64 / l);
        }
    }
    let total: f64 = density.iter().sum();
    // A vanishing first mode means no preferred position; pin it to the origin.
    Vector3::from_fn(|a, _| {
        if modes[a].norm() <= 1e-12 * total {
            0.0
        } else {
            (modes[a].arg() * l / (2.0 * PI)).rem_euclid(l)
        }
    })
}

/// Least-squares slope of the unwrapped centroid against the time step.
pub fn centroid_velocity(trajectory: &[FieldState]) -> Result<Vector3<f64>> {
    if trajectory.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: trajectory.len() });
    }
    let l = trajectory[0].lat.side() as f64;
    let mut path = Vec::with_capacity(trajectory.len());
    let mut prev: Option<(Vector3<f64>, Vector3<f64>)> = None;
    for s in trajectory {
        let raw = centroid(s);
        let unwrapped = match prev {
            None => raw,
            Some((last_raw, last)) => {
                let step = (raw - last_raw).map(|d| d - l * (d / l).round());
                last + step
            }
        };
        prev = Some((raw, unwrapped));
        path.push(unwrapped);
    }
    let ts: Vec<f64> = trajectory.iter().map(|s| s.time_step as f64).collect();
    Ok(Vector3::from_fn(|a, _| {
        let ys: Vec<f64> = path.iter().map(|p| p[a]).collect();
        crate::analysis::least_squares_slope(&ts, &ys)
    }))
}

/// `steps + 1` states starting at `state`, by the direct stencil.
pub fn trajectory<const D: usize>(state: &FieldState, ts: &TransitionSet<D>, steps: u64) -> Result<Vec<FieldState>> {
    let mut out = vec![state.clone()];
    for _ in 0..steps {
        let next = evolve_direct(out.last().expect("nonempty"), ts)?;
        out.push(next);
    }
    Ok(out)
}

/// `t,cx,cy,cz,norm`.
pub fn write_trajectory_csv<W: Write>(mut w: W, states: &[FieldState]) -> io::Result<()> {
    writeln!(w, "t,cx,cy,cz,norm")?;
    for s in states {
        let c = centroid(s);
        writeln!(w, "{},{},{},{},{}", s.time_step, c.x, c.y, c.z, s.norm())?;
    }
    Ok(())
}

/// `x,y,z,p`, one row per site.
pub fn write_density_csv<W: Write>(mut w: W, state: &FieldState) -> io::Result<()> {
    writeln!(w, "x,y,z,p")?;
    for (i, p) in state.density().into_iter().enumerate() {
        let [x, y, z] = state.lat.coords(i);
        writeln!(w, "{x},{y},{z},{p}")?;
    }
    Ok(())
}
