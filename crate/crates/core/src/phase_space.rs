//! Wigner function from the displaced-parity formula
//! `W(α) = (2/π) tr[D(−α) ρ D(α) P]`, evaluated in a zero-padded Fock space.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock_algebra::{displacement, hermitian_eig, CMatrix, I, ZERO};
use crate::liouvillian::DensityMatrix;

/// Largest tolerated imaginary part of a Wigner value.
pub const IMAG_TOL: f64 = 1e-10;
/// Extrema shallower than this are treated as ripple.
pub const EXTREMUM_THRESHOLD: f64 = 0.01 * FRAC_2_PI;

/// Default padding: twice the state dimension.
pub fn default_pad(dim: usize) -> usize {
    2 * dim
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerValue {
    pub value: f64,
    /// `|α|² > (dim + pad)/2`: displacement reaches the truncation edge.
    pub truncation_warning: bool,
}

/// `values[ip][ix] = W(xs[ix] + i·ps[ip])`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub truncation_warning: bool,
    pub max_imag: f64,
}

fn warn(alpha: Complex64, padded: usize) -> bool {
    alpha.norm_sqr() > padded as f64 / 2.0
}

fn parity_sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn real_part(w: Complex64) -> Result<f64> {
    if w.im.abs() > IMAG_TOL {
        return Err(Error::NotHermitian {
            deviation: w.im.abs(),
        });
    }
    Ok(w.re)
}

/// Direct evaluation with a matrix-exponential displacement.
pub fn wigner_point(rho: &DensityMatrix, alpha: Complex64, pad: usize) -> Result<WignerValue> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("wigner argument"));
    }
    let dim = rho.dim();
    let np = dim + pad;
    let d = displacement(np, alpha)?;
    let r = rho.matrix();
    let mut acc = ZERO;
    for k in 0..np {
        let mut diag = ZERO;
        for i in 0..dim {
            let left = d[(i, k)].conj();
            if left == ZERO {
                continue;
            }
            for j in 0..dim {
                diag += left * r[(i, j)] * d[(j, k)];
            }
        }
        acc += diag * parity_sign(k);
    }
    Ok(WignerValue {
        value: real_part(acc * FRAC_2_PI)?,
        truncation_warning: warn(alpha, np),
    })
}

/// `W(0) = (2/π) tr(ρ P)`.
pub fn wigner_origin(rho: &DensityMatrix) -> f64 {
    FRAC_2_PI
        * rho
            .matrix()
            .diagonal()
            .iter()
            .enumerate()
            .map(|(k, z)| z.re * parity_sign(k))
            .sum::<f64>()
}

/// Radial displacements `D(r) = exp(r(a† − a))` from one eigendecomposition.
struct RadialDisplacement {
    vecs: CMatrix,
    vals: Vec<f64>,
}

impl RadialDisplacement {
    fn new(np: usize) -> Result<Self> {
        let a = crate::fock_algebra::annihilation(np)?;
        // i(a† − a) is Hermitian; a† − a = −i V Λ V†.
        let gen = (&a.adjoint() - &a).scale(I);
        let (vals, vecs) = hermitian_eig(&gen)?;
        Ok(Self { vecs, vals })
    }

    /// First `rows` rows of `D(r)`.
    fn rows(&self, r: f64, rows: usize) -> Vec<Vec<Complex64>> {
        let np = self.vals.len();
        let phases: Vec<Complex64> = self.vals.iter().map(|l| (-I * r * l).exp()).collect();
        (0..rows)
            .map(|i| {
                (0..np)
                    .map(|k| {
                        (0..np)
                            .map(|l| self.vecs[(i, l)] * phases[l] * self.vecs[(k, l)].conj())
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// `W(re^{iφ})` using `D(re^{iφ}) = U_φ D(r) U_φ†` with `U_φ = e^{iφn̂}`.
fn wigner_fast(rho: &CMatrix, radial: &RadialDisplacement, alpha: Complex64) -> Complex64 {
    let dim = rho.dim();
    let (r, phi) = alpha.to_polar();
    let d = radial.rows(r, dim);
    let np = radial.vals.len();
    // M_ji = Σ_k D_jk P_k D*_ik, so W = (2/π) Σ_ij ρ_ij e^{iφ(j−i)} M_ji.
    let mut acc = ZERO;
    for i in 0..dim {
        for j in 0..dim {
            let rij = rho[(i, j)];
            if rij == ZERO {
                continue;
            }
            let m: Complex64 = (0..np)
                .map(|k| d[j][k] * d[i][k].conj() * parity_sign(k))
                .sum();
            let phase = Complex64::from_polar(1.0, phi * (j as f64 - i as f64));
            acc += rij * phase * m;
        }
    }
    acc * FRAC_2_PI
}

/// Wigner function on the rectangular grid `xs × ps`.
pub fn wigner_grid(rho: &DensityMatrix, xs: &[f64], ps: &[f64], pad: usize) -> Result<WignerGrid> {
    if xs.iter().chain(ps).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("wigner grid"));
    }
    let np = rho.dim() + pad;
    let radial = RadialDisplacement::new(np)?;
    let rows: Vec<Vec<Complex64>> = ps
        .par_iter()
        .map(|&p| {
            xs.iter()
                .map(|&x| wigner_fast(rho.matrix(), &radial, Complex64::new(x, p)))
                .collect()
        })
        .collect();
    let mut max_imag = 0.0f64;
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for w in row {
            max_imag = max_imag.max(w.im.abs());
            out.push(real_part(w)?);
        }
        values.push(out);
    }
    let truncation_warning = ps
        .iter()
        .any(|&p| xs.iter().any(|&x| warn(Complex64::new(x, p), np)));
    Ok(WignerGrid {
        xs: xs.to_vec(),
        ps: ps.to_vec(),
        values,
        truncation_warning,
        max_imag,
    })
}

/// `start, start + step, …` up to `stop` inclusive (with rounding slack).
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Extrema {
    /// `(ix, ip)` indices of counted maxima.
    pub maxima: Vec<(usize, usize)>,
    pub minima: Vec<(usize, usize)>,
}

const DIRS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl WignerGrid {
    fn at(&self, ix: isize, ip: isize) -> Option<f64> {
        if ix < 0 || ip < 0 {
            return None;
        }
        self.values
            .get(ip as usize)
            .and_then(|row| row.get(ix as usize))
            .copied()
    }

    /// Prominence along the 8 grid rays: walk away from the point while the
    /// values keep moving away from it, and keep the smallest depth reached.
    fn ray_prominence(&self, ix: usize, ip: usize, is_max: bool) -> f64 {
        let w0 = self.values[ip][ix];
        let mut prom = f64::INFINITY;
        for (dx, dp) in DIRS {
            let (mut x, mut p) = (ix as isize, ip as isize);
            let mut last = w0;
            while let Some(next) = self.at(x + dx, p + dp) {
                let moving_away = if is_max { next < last } else { next > last };
                if !moving_away {
                    break;
                }
                last = next;
                x += dx;
                p += dp;
            }
            prom = prom.min((w0 - last).abs());
        }
        prom
    }

    /// Strict interior local extrema (8-neighbour) with ray prominence at
    /// least `threshold`.
    pub fn extrema(&self, threshold: f64) -> Extrema {
        let mut out = Extrema::default();
        let np = self.ps.len();
        let nx = self.xs.len();
        if np < 3 || nx < 3 {
            return out;
        }
        for ip in 1..np - 1 {
            for ix in 1..nx - 1 {
                let w = self.values[ip][ix];
                let neigh = DIRS.map(|(dx, dp)| {
                    self.values[(ip as isize + dp) as usize][(ix as isize + dx) as usize]
                });
                if neigh.iter().all(|v| w > *v) && self.ray_prominence(ix, ip, true) >= threshold {
                    out.maxima.push((ix, ip));
                }
                if neigh.iter().all(|v| w < *v) && self.ray_prominence(ix, ip, false) >= threshold {
                    out.minima.push((ix, ip));
                }
            }
        }
        out
    }

    /// `∬ W dx dp` by the trapezoidal rule.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wp = trapezoid_weights(&self.ps);
        self.values
            .iter()
            .zip(&wp)
            .map(|(row, a)| a * row.iter().zip(&wx).map(|(v, b)| v * b).sum::<f64>())
            .sum()
    }
}

/// Counts of maxima and minima with the default ripple threshold.
pub fn count_extrema(grid: &WignerGrid) -> (usize, usize) {
    let e = grid.extrema(EXTREMUM_THRESHOLD);
    (e.maxima.len(), e.minima.len())
}

fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = 0.5 * (xs[i] - xs[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

/// Closed-form vacuum value, for reference in tests and diagnostics.
pub fn vacuum_wigner(alpha: Complex64) -> f64 {
    2.0 / PI * (-2.0 * alpha.norm_sqr()).exp()
}
