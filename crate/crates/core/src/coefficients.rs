//! Closed-form coefficient fields of the PML-truncated scattering problems.
//!
//! Coefficients are evaluated lazily at query points. Each region carries
//! its own smooth formula, and [`mu_in_region`] / [`a_in_region`] evaluate
//! that formula at any point, including points slightly outside the region.
//! Assembly on straight elements needs this: an element of the annulus
//! whose chord dips inside the unit circle must still see the annulus
//! coefficients.

use crate::specfun::erfc;
use crate::{Complex64, Error, Point, Result};
use std::f64::consts::PI;

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    SoundSoft,
    Penetrable,
}

/// Power-law PML profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlProfile {
    pub strength: f64,
    pub exponent: u32,
    pub start_radius: f64,
    pub outer_radius: f64,
}

impl Default for PmlProfile {
    fn default() -> Self {
        PmlProfile {
            strength: 10.0,
            exponent: 2,
            start_radius: 4.0,
            outer_radius: 5.0,
        }
    }
}

impl PmlProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.strength > 0.0)
            || self.exponent < 1
            || !(self.start_radius > 0.0)
            || !(self.start_radius < self.outer_radius)
        {
            return Err(Error::Parameter(format!("invalid PML profile {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub k: f64,
    pub pml: PmlProfile,
    pub cutoff_center: f64,
    pub cutoff_width: f64,
    pub scatterer_radius: f64,
    pub total_field_radius: f64,
}

impl ProblemSpec {
    /// The standard configuration: unit scatterer, error region of radius 2,
    /// erf cutoff centred at 3 with width 0.2, PML on `4 < r < 5`.
    pub fn new(kind: ProblemKind, k: f64) -> Self {
        ProblemSpec {
            kind,
            k,
            pml: PmlProfile::default(),
            cutoff_center: 3.0,
            cutoff_width: 0.2,
            scatterer_radius: 1.0,
            total_field_radius: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pml.validate()?;
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::Parameter(format!("wavenumber must be positive, got {}", self.k)));
        }
        if !(self.cutoff_width > 0.0) {
            return Err(Error::Parameter("cutoff width must be positive".into()));
        }
        if !(0.0 < self.scatterer_radius
            && self.scatterer_radius < self.total_field_radius
            && self.total_field_radius < self.pml.start_radius)
        {
            return Err(Error::Parameter(format!(
                "radii must satisfy 0 < {} < {} < {} < {}",
                self.scatterer_radius,
                self.total_field_radius,
                self.pml.start_radius,
                self.pml.outer_radius
            )));
        }
        Ok(())
    }

    pub fn outer_radius(&self) -> f64 {
        self.pml.outer_radius
    }
}

/// Coefficient regions. Penetrable problems use all three; sound-soft
/// problems have no `Inner` region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Inner,
    Physical,
    Pml,
}

impl Region {
    pub fn id(self) -> u32 {
        match self {
            Region::Inner => 1,
            Region::Physical => 2,
            Region::Pml => 3,
        }
    }

    pub fn from_id(id: u32) -> Option<Region> {
        match id {
            1 => Some(Region::Inner),
            2 => Some(Region::Physical),
            3 => Some(Region::Pml),
            _ => None,
        }
    }
}

#[inline]
fn norm(x: Point) -> f64 {
    x[0].hypot(x[1])
}

/// Radial stretching derivative profile: 1 before the layer,
/// `1 + i strength (r - r0)^exponent` inside it.
pub fn beta(r: f64, pml: &PmlProfile) -> Complex64 {
    if r < pml.start_radius {
        Complex64::new(1.0, 0.0)
    } else {
        let d = r - pml.start_radius;
        Complex64::new(1.0, pml.strength * d.powi(pml.exponent as i32))
    }
}

/// Integrated stretching profile divided by r:
/// `1 + i strength/((exponent+1) r) (r - r0)^(exponent+1)` inside the layer.
pub fn frak_b(r: f64, pml: &PmlProfile) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("integrated PML profile needs r > 0, got {r}")));
    }
    if r < pml.start_radius {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let d = r - pml.start_radius;
    let e = pml.exponent as i32;
    Ok(Complex64::new(
        1.0,
        pml.strength / ((e + 1) as f64 * r) * d.powi(e + 1),
    ))
}

/// Region of a point; interface points belong to the inner side.
pub fn region_of(x: Point, spec: &ProblemSpec) -> Result<Region> {
    let r = norm(x);
    if r > spec.outer_radius() {
        return Err(Error::Domain(format!(
            "point at radius {r} is outside the computational domain"
        )));
    }
    Ok(if spec.kind == ProblemKind::Penetrable && r <= spec.scatterer_radius {
        Region::Inner
    } else if r <= spec.pml.start_radius {
        Region::Physical
    } else {
        Region::Pml
    })
}

/// `mu` using the formula attached to `region`, evaluated at `x`.
pub fn mu_in_region(x: Point, region: Region, spec: &ProblemSpec) -> Result<Complex64> {
    Ok(match region {
        Region::Inner => Complex64::new(0.5, 0.0),
        Region::Physical => Complex64::new(1.0, 0.0),
        Region::Pml => {
            let r = norm(x);
            frak_b(r, &spec.pml)? * beta(r, &spec.pml)
        }
    })
}

/// `A` using the formula attached to `region`, evaluated at `x`.
pub fn a_in_region(x: Point, region: Region, spec: &ProblemSpec) -> Result<Mat2> {
    let zero = Complex64::new(0.0, 0.0);
    let diag = |v: f64| [[Complex64::new(v, 0.0), zero], [zero, Complex64::new(v, 0.0)]];
    Ok(match region {
        Region::Inner => diag(2.0),
        Region::Physical => diag(1.0),
        Region::Pml => {
            let r = norm(x);
            let fb = frak_b(r, &spec.pml)?;
            let b = beta(r, &spec.pml);
            let (c, s) = (x[0] / r, x[1] / r);
            let radial = fb / b;
            let angular = b / fb;
            let a00 = radial * (c * c) + angular * (s * s);
            let a11 = radial * (s * s) + angular * (c * c);
            let a01 = (radial - angular) * (c * s);
            [[a00, a01], [a01, a11]]
        }
    })
}

pub fn mu_field(x: Point, spec: &ProblemSpec) -> Result<Complex64> {
    mu_in_region(x, region_of(x, spec)?, spec)
}

pub fn a_field(x: Point, spec: &ProblemSpec) -> Result<Mat2> {
    a_in_region(x, region_of(x, spec)?, spec)
}

/// Radial cutoff `chi(r) = erfc((r - c)/sigma)/2` with its first two
/// derivatives in `r`.
pub fn cutoff_chi(r: f64, spec: &ProblemSpec) -> (f64, f64, f64) {
    let sigma = spec.cutoff_width;
    let t = (r - spec.cutoff_center) / sigma;
    let chi = 0.5 * erfc(t);
    let g = (-t * t).exp();
    let dchi = -g / (sigma * PI.sqrt());
    let d2chi = 2.0 * t * g / (sigma * sigma * PI.sqrt());
    (chi, dchi, d2chi)
}

/// Load `(-lap chi - 2 i k d_1 chi) exp(i k x_1)`.
pub fn rhs_f(x: Point, spec: &ProblemSpec) -> Complex64 {
    let r = norm(x);
    let (_, dchi, d2chi) = cutoff_chi(r, spec);
    let (lap, d1) = if r > 0.0 {
        (d2chi + dchi / r, dchi * x[0] / r)
    } else {
        let (_, _, d2_0) = cutoff_chi(0.0, spec);
        (2.0 * d2_0, 0.0)
    };
    let k = spec.k;
    Complex64::new(-lap, -2.0 * k * d1) * Complex64::from_polar(1.0, k * x[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ss() -> ProblemSpec {
        ProblemSpec::new(ProblemKind::SoundSoft, 1.0)
    }

    fn pen() -> ProblemSpec {
        ProblemSpec::new(ProblemKind::Penetrable, 1.0)
    }

    #[test]
    fn pml_profiles() {
        let p = PmlProfile::default();
        assert_eq!(beta(0.0, &p), c(1.0, 0.0));
        assert_eq!(beta(4.0, &p), c(1.0, 0.0));
        assert_eq!(beta(5.0, &p), c(1.0, 10.0));
        assert_eq!(frak_b(2.0, &p).unwrap(), c(1.0, 0.0));
        assert_eq!(frak_b(4.0, &p).unwrap(), c(1.0, 0.0));
        assert!((frak_b(5.0, &p).unwrap() - c(1.0, 2.0 / 3.0)).norm() < 1e-15);
        assert!(matches!(frak_b(0.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu_field([2.0, 0.0], &ss()).unwrap(), c(1.0, 0.0));
        assert_eq!(mu_field([0.5, 0.0], &pen()).unwrap(), c(0.5, 0.0));
        let want = c(-17.0 / 3.0, 32.0 / 3.0);
        assert!((mu_field([5.0, 0.0], &ss()).unwrap() - want).norm() < 1e-13);
        assert!((mu_field([5.0, 0.0], &pen()).unwrap() - want).norm() < 1e-13);
        assert!(mu_field([5.1, 0.0], &ss()).is_err());
    }

    #[test]
    fn a_values() {
        let a = a_field([3.0, 0.0], &ss()).unwrap();
        assert_eq!(a, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        let a = a_field([0.0, 0.5], &pen()).unwrap();
        assert_eq!(a, [[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]]);
        let a = a_field([5.0, 0.0], &ss()).unwrap();
        let fb = c(1.0, 2.0 / 3.0);
        let b = c(1.0, 10.0);
        assert!((a[0][0] - fb / b).norm() < 1e-14);
        assert!((a[1][1] - b / fb).norm() < 1e-14);
        assert!(a[0][1].norm() < 1e-15 && a[1][0].norm() < 1e-15);
        assert!(a_field([0.0, 5.5], &ss()).is_err());
    }

    #[test]
    fn cutoff_values() {
        let (chi, dchi, d2chi) = cutoff_chi(3.0, &ss());
        assert_eq!(chi, 0.5);
        assert!((dchi + 1.0 / (0.2 * PI.sqrt())).abs() < 1e-14);
        assert_eq!(d2chi, 0.0);
        assert!((1.0 - cutoff_chi(1.0, &ss()).0).abs() < 1e-12);
        assert!((1.0 - cutoff_chi(2.0, &ss()).0).abs() < 1e-12);
        assert!(cutoff_chi(4.5, &ss()).0.abs() < 1e-12);
        assert!(cutoff_chi(4.0, &ss()).0.abs() < 1e-12);
    }

    #[test]
    fn cutoff_derivatives_match_finite_differences() {
        let spec = ss();
        let h = 1e-5;
        for &r in &[2.6, 2.9, 3.0, 3.15, 3.4] {
            let (_, d1, d2) = cutoff_chi(r, &spec);
            let f = |s: f64| cutoff_chi(s, &spec).0;
            let fd1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let fd2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-7, "r={r}");
            assert!((d2 - fd2).abs() < 1e-3 * d2.abs().max(1.0), "r={r}");
        }
    }

    #[test]
    fn rhs_values() {
        assert!(rhs_f([1.0, 0.0], &ss()).norm() < 1e-10);
        assert!(rhs_f([4.5, 0.0], &ss()).norm() < 1e-10);
        assert!(rhs_f([0.0, 0.0], &pen()).norm() < 1e-10);
        let dchi = -1.0 / (0.2 * PI.sqrt());
        let want = -(c(dchi / 3.0, 2.0 * dchi)) * Complex64::from_polar(1.0, 3.0);
        assert!((rhs_f([3.0, 0.0], &ss()) - want).norm() < 1e-12);
    }

    #[test]
    fn regions() {
        assert_eq!(region_of([0.0, 0.0], &pen()).unwrap(), Region::Inner);
        assert_eq!(region_of([4.5, 0.0], &pen()).unwrap(), Region::Pml);
        assert_eq!(region_of([3.0, 0.0], &ss()).unwrap(), Region::Physical);
        assert_eq!(region_of([1.0, 0.0], &pen()).unwrap(), Region::Inner);
        assert_eq!(region_of([4.0, 0.0], &ss()).unwrap(), Region::Physical);
        assert_eq!(region_of([0.5, 0.0], &ss()).unwrap(), Region::Physical);
        assert!(region_of([6.0, 0.0], &ss()).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ss().validate().is_ok());
        let mut s = ss();
        s.total_field_radius = 4.5;
        assert!(s.validate().is_err());
        let mut s = ss();
        s.k = 0.0;
        assert!(s.validate().is_err());
    }

    fn rot(t: f64) -> [[f64; 2]; 2] {
        [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
    }

    proptest! {
        #[test]
        fn pml_interface_continuity(theta in 0.0..(2.0 * PI)) {
            let e = [theta.cos(), theta.sin()];
            for eps in [1e-6, 1e-9] {
                for r in [4.0 - eps, 4.0 + eps] {
                    let x = [r * e[0], r * e[1]];
                    let mu = mu_field(x, &ss()).unwrap();
                    prop_assert!((mu - c(1.0, 0.0)).norm() < 100.0 * eps);
                    let a = a_field(x, &ss()).unwrap();
                    for i in 0..2 {
                        for j in 0..2 {
                            let id = if i == j { 1.0 } else { 0.0 };
                            prop_assert!((a[i][j] - c(id, 0.0)).norm() < 100.0 * eps);
                        }
                    }
                }
            }
        }

        #[test]
        fn a_symmetric_and_physical_coercive(
            r in 0.01..5.0f64,
            theta in 0.0..(2.0 * PI),
            xr in -1.0..1.0f64, xi in -1.0..1.0f64, yr in -1.0..1.0f64, yi in -1.0..1.0f64,
        ) {
            let x = [r * theta.cos(), r * theta.sin()];
            for spec in [ss(), pen()] {
                let a = a_field(x, &spec).unwrap();
                prop_assert!((a[0][1] - a[1][0]).norm() <= 1e-15 * (1.0 + a[0][1].norm()));
                if r < 4.0 {
                    let xi_v = [c(xr, xi), c(yr, yi)];
                    let mut form = c(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            form += a[i][j] * xi_v[j] * xi_v[i].conj();
                        }
                    }
                    let n2 = xi_v[0].norm_sqr() + xi_v[1].norm_sqr();
                    prop_assert!(form.re >= 0.999 * n2);
                }
            }
        }

        #[test]
        fn rotational_invariance(r in 0.05..5.0f64, theta in 0.0..(2.0 * PI), phi in 0.0..(2.0 * PI)) {
            let x = [r * theta.cos(), r * theta.sin()];
            let rm = rot(phi);
            let y = [rm[0][0] * x[0] + rm[0][1] * x[1], rm[1][0] * x[0] + rm[1][1] * x[1]];
            for spec in [ss(), pen()] {
                prop_assert!((mu_field(x, &spec).unwrap() - mu_field(y, &spec).unwrap()).norm() < 1e-12);
                let ax = a_field(x, &spec).unwrap();
                let ay = a_field(y, &spec).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let mut v = c(0.0, 0.0);
                        for a in 0..2 {
                            for b in 0..2 {
                                v += ax[a][b] * (rm[i][a] * rm[j][b]);
                            }
                        }
                        prop_assert!((v - ay[i][j]).norm() < 1e-12 * (1.0 + v.norm()));
                    }
                }
            }
        }

        #[test]
        fn rhs_vanishes_away_from_cutoff_band(r in prop_oneof![0.0..1.9f64, 4.1..5.0f64], theta in 0.0..(2.0 * PI)) {
            let x = [r * theta.cos(), r * theta.sin()];
            let mut spec = ss();
            spec.k = 40.0;
            prop_assert!(rhs_f(x, &spec).norm() <= 1e-10);
        }
    }
}
