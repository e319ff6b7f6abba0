//! Body-centred cubic geometry.
//!
//! The eight neighbours of a site are the vertices of a regular tetrahedron
//! `h_1..h_4` and of its dual `−h_1..−h_4`. Finite simulations use a periodic
//! cube of even side `L` embedded in ℤ³; the shifts `(±1, ±1, ±1)` flip the
//! parity of `x + y + z`, and an even side keeps that structure intact under
//! the wrap.

use nalgebra::Vector3;
use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Wave vector in radians per lattice unit.
pub type WaveVector = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVec3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl IntVec3 {
    pub const ZERO: IntVec3 = IntVec3 { x: 0, y: 0, z: 0 };

    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        IntVec3 { x, y, z }
    }

    pub fn dot(&self, o: &IntVec3) -> i64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// `k·h` for a real wave vector.
    pub fn phase(&self, k: &WaveVector) -> f64 {
        k.x * self.x as f64 + k.y * self.y as f64 + k.z * self.z as f64
    }

    pub fn to_array(self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for IntVec3 {
    type Output = IntVec3;
    fn add(self, o: IntVec3) -> IntVec3 {
        IntVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for IntVec3 {
    type Output = IntVec3;
    fn sub(self, o: IntVec3) -> IntVec3 {
        IntVec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for IntVec3 {
    type Output = IntVec3;
    fn neg(self) -> IntVec3 {
        IntVec3::new(-self.x, -self.y, -self.z)
    }
}

impl std::fmt::Display for IntVec3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Tetrahedron `S+` and its dual `S−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratingSet {
    pub h_plus: [IntVec3; 4],
    pub h_minus: [IntVec3; 4],
}

impl GeneratingSet {
    /// All eight neighbour displacements, `S+` first.
    pub fn all(&self) -> impl Iterator<Item = IntVec3> + '_ {
        self.h_plus.iter().chain(self.h_minus.iter()).copied()
    }

    /// Dot-product matrix of the tetrahedron vectors.
    pub fn gram(&self) -> [[i64; 4]; 4] {
        let mut g = [[0; 4]; 4];
        for (j, hj) in self.h_plus.iter().enumerate() {
            for (k, hk) in self.h_plus.iter().enumerate() {
                g[j][k] = hj.dot(hk);
            }
        }
        g
    }
}

pub fn generating_set() -> GeneratingSet {
    let h_plus = [
        IntVec3::new(1, 1, 1),
        IntVec3::new(1, -1, -1),
        IntVec3::new(-1, 1, -1),
        IntVec3::new(-1, -1, 1),
    ];
    GeneratingSet { h_plus, h_minus: h_plus.map(|h| -h) }
}

/// 3×4 matrix whose columns are the tetrahedron vectors.
pub fn tetra_matrix() -> [[i64; 4]; 3] {
    let gen = generating_set();
    let mut t = [[0; 4]; 3];
    for (j, h) in gen.h_plus.iter().enumerate() {
        let a = h.to_array();
        for r in 0..3 {
            t[r][j] = a[r];
        }
    }
    t
}

/// Rhombic-dodecahedron membership, boundary included.
pub fn in_brillouin_zone(k: &WaveVector) -> bool {
    let pairs = [(k.x, k.y), (k.x, k.z), (k.y, k.z)];
    // |a| + |b| ≤ π covers all four sign choices of ±a ± b.
    pairs.iter().all(|&(a, b)| a.abs() + b.abs() <= PI)
}

/// Periodic cube of `side³` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicLattice {
    side: usize,
}

impl PeriodicLattice {
    pub fn new(side: usize) -> Result<Self> {
        if side < 4 || !side.is_multiple_of(2) {
            return Err(Error::InvalidLatticeSide(side));
        }
        Ok(PeriodicLattice { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn num_sites(&self) -> usize {
        self.side.pow(3)
    }

    /// Linear index, `z` fastest.
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.side + y) * self.side + z
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let l = self.side;
        [idx / (l * l), (idx / l) % l, idx % l]
    }

    pub fn wrap(&self, v: IntVec3) -> [usize; 3] {
        let l = self.side as i64;
        [v.x.rem_euclid(l) as usize, v.y.rem_euclid(l) as usize, v.z.rem_euclid(l) as usize]
    }

    pub fn wrap_vec(&self, v: IntVec3) -> IntVec3 {
        let [x, y, z] = self.wrap(v);
        IntVec3::new(x as i64, y as i64, z as i64)
    }

    /// Index of the site `coords(idx) + h`, wrapped.
    pub fn shifted(&self, idx: usize, h: IntVec3) -> usize {
        let [x, y, z] = self.coords(idx);
        let [a, b, cz] = self.wrap(IntVec3::new(x as i64 + h.x, y as i64 + h.y, z as i64 + h.z));
        self.index(a, b, cz)
    }

    /// Signed frequency of FFT bin `i`, in `{−L/2+1, …, L/2}`.
    pub fn frequency(&self, i: usize) -> i64 {
        let l = self.side as i64;
        let i = i as i64;
        if i <= l / 2 {
            i
        } else {
            i - l
        }
    }

    /// Wave vector of the FFT bin with linear index `idx`.
    pub fn grid_momentum(&self, idx: usize) -> WaveVector {
        let [a, b, cz] = self.coords(idx);
        let s = 2.0 * PI / self.side as f64;
        WaveVector::new(
            s * self.frequency(a) as f64,
            s * self.frequency(b) as f64,
            s * self.frequency(cz) as f64,
        )
    }
}

/// The `L³` momenta `2π n / L`, `n_i ∈ {−L/2+1, …, L/2}`, in FFT bin order.
pub fn momentum_grid(lat: &PeriodicLattice) -> Vec<WaveVector> {
    (0..lat.num_sites()).map(|i| lat.grid_momentum(i)).collect()
}

/// `n³` points spanning `[−π, π]³` inclusively; odd `n` contains the origin.
pub fn uniform_grid(n: usize) -> Vec<WaveVector> {
    assert!(n >= 2, "grid needs at least two points per axis");
    let step = 2.0 * PI / (n - 1) as f64;
    let axis: Vec<f64> = (0..n)
        .map(|i| if 2 * i + 1 == n { 0.0 } else { -PI + step * i as f64 })
        .collect();
    let mut out = Vec::with_capacity(n * n * n);
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                out.push(WaveVector::new(x, y, z));
            }
        }
    }
    out
}
