//! Fourier–Bessel (Mie) series for plane-wave scattering by the unit disk.
//!
//! The incident wave `exp(i k x_1)` expands as `sum eps_n i^n J_n(kr) cos(n theta)`
//! with `eps_0 = 1`, `eps_n = 2`. Outside the disk the total field is
//! `sum eps_n i^n [J_n(kr) + d_n H_n(kr)] cos(n theta)`; inside the
//! penetrable disk it is `sum eps_n i^n c_n J_n(k_in r) cos(n theta)` with
//! `k_in = k/2`.

use crate::specfun::{bessel_j_table, bessel_table};
use crate::{Complex64, Error, Point, Result};

pub use crate::coefficients::ProblemKind;

/// Which series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Interior series inside the penetrable disk, exterior series elsewhere.
    #[default]
    Auto,
    /// Interior series wherever evaluated (extension of the interior field).
    /// Sound-soft problems have no interior series and use the exterior one.
    ForceInner,
    /// Exterior series wherever evaluated.
    ForceOuter,
}

#[derive(Debug, Clone)]
pub struct MieSeries {
    pub kind: ProblemKind,
    pub k: f64,
    pub truncation: usize,
    /// Scattered-field Hankel coefficients `d_n`.
    pub outer_coeffs: Vec<Complex64>,
    /// Interior Bessel coefficients `c_n` (empty for sound-soft).
    pub inner_coeffs: Vec<Complex64>,
    pub interior_wavenumber: f64,
    weights: Vec<Complex64>,
}

/// `N = ceil(k r + 4 (k r)^(1/3) + 16)`.
pub fn choose_truncation(k: f64, r_max: f64) -> usize {
    let kr = k * r_max;
    (kr + 4.0 * kr.cbrt() + 16.0).ceil() as usize
}

fn mode_weights(n_max: usize) -> Vec<Complex64> {
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    (0..=n_max)
        .map(|n| i_pow[n % 4] * if n == 0 { 1.0 } else { 2.0 })
        .collect()
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Parameter(format!("wavenumber must be positive, got {k}")));
    }
    Ok(())
}

/// Sound-soft disk: `d_n = -J_n(k) / H_n(k)`.
pub fn solve_soundsoft(k: f64, n_max: usize) -> Result<MieSeries> {
    check_k(k)?;
    let t = bessel_table(n_max, k)?;
    let outer_coeffs = (0..=n_max)
        .map(|n| -Complex64::new(t.j[n], 0.0) / t.hankel1(n).0)
        .collect();
    Ok(MieSeries {
        kind: ProblemKind::SoundSoft,
        k,
        truncation: n_max,
        outer_coeffs,
        inner_coeffs: Vec::new(),
        interior_wavenumber: k,
        weights: mode_weights(n_max),
    })
}

/// Penetrable disk with `A = 2`, `mu = 1/2` inside: per mode, continuity of
/// the field and of the flux `A d_r u`.
pub fn solve_penetrable(k: f64, n_max: usize) -> Result<MieSeries> {
    check_k(k)?;
    let k_in = 0.5 * k;
    let out = bessel_table(n_max, k)?;
    let inn = bessel_table(n_max, k_in)?;
    let mut outer_coeffs = Vec::with_capacity(n_max + 1);
    let mut inner_coeffs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (h, hp) = out.hankel1(n);
        let jin = Complex64::new(inn.j[n], 0.0);
        let jpin = Complex64::new(inn.jp[n], 0.0);
        let rhs_value = Complex64::new(out.j[n], 0.0);
        let rhs_flux = Complex64::new(k * out.jp[n], 0.0);
        // [ J_n(k_in)           -H_n(k)    ] [c]   [ J_n(k)    ]
        // [ 2 k_in J'_n(k_in)   -k H'_n(k) ] [d] = [ k J'_n(k) ]
        let a11 = jin;
        let a12 = -h;
        let a21 = jpin * (2.0 * k_in);
        let a22 = -hp * k;
        let det = a11 * a22 - a12 * a21;
        let scale = (a11 * a22).norm() + (a12 * a21).norm();
        if !(det.norm() > 1e-14 * scale) {
            return Err(Error::Computation(format!(
                "penetrable mode system for n = {n} is singular (|det| = {:e})",
                det.norm()
            )));
        }
        inner_coeffs.push((rhs_value * a22 - a12 * rhs_flux) / det);
        outer_coeffs.push((a11 * rhs_flux - rhs_value * a21) / det);
    }
    Ok(MieSeries {
        kind: ProblemKind::Penetrable,
        k,
        truncation: n_max,
        outer_coeffs,
        inner_coeffs,
        interior_wavenumber: k_in,
        weights: mode_weights(n_max),
    })
}

/// Build the series for a problem kind.
pub fn solve(kind: ProblemKind, k: f64, n_max: usize) -> Result<MieSeries> {
    match kind {
        ProblemKind::SoundSoft => solve_soundsoft(k, n_max),
        ProblemKind::Penetrable => solve_penetrable(k, n_max),
    }
}

/// Value and Cartesian gradient of a complex field.
pub type FieldSample = (Complex64, [Complex64; 2]);

fn to_cartesian(x: Point, r: f64, dr: Complex64, dtheta: Complex64) -> [Complex64; 2] {
    let (c, s) = (x[0] / r, x[1] / r);
    let dt = dtheta / r;
    [dr * c - dt * s, dr * s + dt * c]
}

impl MieSeries {
    fn use_inner(&self, r: f64, branch: Branch) -> bool {
        if self.kind == ProblemKind::SoundSoft {
            return false;
        }
        match branch {
            Branch::Auto => r < 1.0,
            Branch::ForceInner => true,
            Branch::ForceOuter => false,
        }
    }

    /// Total field and gradient at `x`.
    pub fn eval(&self, x: Point, branch: Branch) -> Result<FieldSample> {
        let r = x[0].hypot(x[1]);
        if self.use_inner(r, branch) {
            self.eval_inner(x, r)
        } else {
            self.eval_outer(x, r, true)
        }
    }

    /// Scattered field `u_tot - u_inc` of the exterior series (Hankel terms only).
    pub fn eval_scattered(&self, x: Point) -> Result<FieldSample> {
        let r = x[0].hypot(x[1]);
        self.eval_outer(x, r, false)
    }

    fn eval_outer(&self, x: Point, r: f64, include_incident: bool) -> Result<FieldSample> {
        if !(r > 0.0) {
            return Err(Error::Domain(
                "exterior series is singular at the origin".into(),
            ));
        }
        let t = bessel_table(self.truncation, self.k * r)?;
        let rot = Complex64::new(x[0] / r, x[1] / r);
        let mut e = Complex64::new(1.0, 0.0);
        let mut value = Complex64::new(0.0, 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        let mut dtheta = Complex64::new(0.0, 0.0);
        for n in 0..=self.truncation {
            let (h, hp) = t.hankel1(n);
            let d = self.outer_coeffs[n];
            let (mut radial, mut radial_p) = (d * h, d * hp);
            if include_incident {
                radial += t.j[n];
                radial_p += t.jp[n];
            }
            let w = self.weights[n];
            value += w * radial * e.re;
            dr += w * radial_p * e.re;
            dtheta -= w * radial * (n as f64 * e.im);
            e *= rot;
        }
        dr *= self.k;
        if !(value.re.is_finite() && value.im.is_finite() && dr.re.is_finite()) {
            return Err(Error::Computation(format!(
                "exterior series overflowed at r = {r}"
            )));
        }
        Ok((value, to_cartesian(x, r, dr, dtheta)))
    }

    fn eval_inner(&self, x: Point, r: f64) -> Result<FieldSample> {
        let kin = self.interior_wavenumber;
        if r == 0.0 {
            let value = self.weights[0] * self.inner_coeffs[0];
            let gx = if self.truncation >= 1 {
                self.weights[1] * self.inner_coeffs[1] * (0.5 * kin)
            } else {
                Complex64::new(0.0, 0.0)
            };
            return Ok((value, [gx, Complex64::new(0.0, 0.0)]));
        }
        let (j, jp) = bessel_j_table(self.truncation, kin * r)?;
        let rot = Complex64::new(x[0] / r, x[1] / r);
        let mut e = Complex64::new(1.0, 0.0);
        let mut value = Complex64::new(0.0, 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        let mut dtheta = Complex64::new(0.0, 0.0);
        for n in 0..=self.truncation {
            let wc = self.weights[n] * self.inner_coeffs[n];
            value += wc * (j[n] * e.re);
            dr += wc * (jp[n] * e.re);
            dtheta -= wc * (j[n] * n as f64 * e.im);
            e *= rot;
        }
        dr *= kin;
        Ok((value, to_cartesian(x, r, dr, dtheta)))
    }
}

/// The incident plane wave `exp(i k x_1)` and its gradient.
pub fn incident(k: f64, x: Point) -> FieldSample {
    let v = Complex64::from_polar(1.0, k * x[0]);
    (v, [v * Complex64::new(0.0, k), Complex64::new(0.0, 0.0)])
}
