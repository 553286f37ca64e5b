//! Real-argument special functions: integer-order Bessel functions of the
//! first and second kind, Hankel functions of the first kind and the error
//! function.
//!
//! `J_n` comes from Miller's backward recurrence normalised with
//! `J_0 + 2 sum J_2m = 1`. `Y_0` and `Y_1` come from the Neumann series in
//! the already computed `J_2k` for moderate arguments and from the Hankel
//! asymptotic expansion for large ones; higher orders follow by forward
//! recurrence, which is stable for `Y`.

use crate::{Complex64, Error, Result};
use std::f64::consts::{FRAC_2_PI, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments above this use the asymptotic expansion for `Y_0`, `Y_1`.
/// At 25 the smallest asymptotic term is around `exp(-50)`.
const ASYMPTOTIC_CROSSOVER: f64 = 25.0;

const RESCALE_LIMIT: f64 = 1e250;

/// Bessel functions `J_n`, `Y_n` and their derivatives for `n = 0..=order_max`
/// at one argument.
#[derive(Debug, Clone)]
pub struct BesselTable {
    pub order_max: usize,
    pub argument: f64,
    pub j: Vec<f64>,
    pub jp: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
}

impl BesselTable {
    /// `H_n^(1)(x)` and its derivative.
    #[inline]
    pub fn hankel1(&self, n: usize) -> (Complex64, Complex64) {
        (
            Complex64::new(self.j[n], self.y[n]),
            Complex64::new(self.jp[n], self.yp[n]),
        )
    }
}

/// Start order for Miller's recurrence. The recurrence only converges to
/// `J` when started beyond the turning point `n ~ x`.
fn miller_start(order_max: usize, x: f64) -> usize {
    let base = order_max.max(x.ceil() as usize);
    let extra = 20usize.max((10.0 * x.cbrt()).ceil() as usize);
    let m = base + extra;
    m + (m & 1)
}

/// `J_0 ..= J_{m}` by backward recurrence, with `m >= order_max + 1`.
/// Accepts `x >= 0`.
fn miller_j(order_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut j = vec![0.0; order_max + 2];
        j[0] = 1.0;
        return j;
    }
    let start = miller_start(order_max + 1, x);
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-30;
    for n in (1..=start).rev() {
        let next = (2.0 * n as f64 / x) * j[n] - j[n + 1];
        j[n - 1] = next;
        if next.abs() > RESCALE_LIMIT {
            for v in &mut j[n - 1..] {
                *v /= RESCALE_LIMIT;
            }
        }
    }
    let mut norm = j[0];
    for m in (2..=start).step_by(2) {
        norm += 2.0 * j[m];
    }
    for v in &mut j {
        *v /= norm;
    }
    j
}

/// `Y_0`, `Y_1` from the Neumann series over the `J_2k` values.
fn neumann_y01(j: &[f64], x: f64) -> (f64, f64) {
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1usize;
    while 2 * k + 1 < j.len() {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * (log_term * j[0] - 2.0 * s0);
    let y1 = -FRAC_2_PI * (j[0] / x - log_term * j[1] - s1);
    (y0, y1)
}

/// Hankel asymptotic expansion of `Y_nu`, `nu` in {0, 1}.
fn asymptotic_y(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60u32 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 * (p.abs() + q.abs()) {
            break;
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos())
}

/// Tabulate `J_n, J'_n, Y_n, Y'_n` for `n = 0..=order_max` at `x > 0`.
pub fn bessel_table(order_max: usize, x: f64) -> Result<BesselTable> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel table needs a positive finite argument, got {x}"
        )));
    }
    let jall = miller_j(order_max + 1, x);
    let (y0, y1) = if x <= ASYMPTOTIC_CROSSOVER {
        neumann_y01(&jall, x)
    } else {
        (asymptotic_y(0, x), asymptotic_y(1, x))
    };
    let mut yall = Vec::with_capacity(order_max + 2);
    yall.push(y0);
    yall.push(y1);
    for n in 1..=order_max {
        let next = (2.0 * n as f64 / x) * yall[n] - yall[n - 1];
        yall.push(next);
    }
    let j: Vec<f64> = jall[..=order_max].to_vec();
    let y: Vec<f64> = yall[..=order_max].to_vec();
    let derivative = |v: &[f64]| -> Vec<f64> {
        (0..=order_max)
            .map(|n| {
                if n == 0 {
                    -v[1]
                } else {
                    0.5 * (v[n - 1] - v[n + 1])
                }
            })
            .collect()
    };
    let jp = derivative(&jall);
    let yp = derivative(&yall);
    Ok(BesselTable {
        order_max,
        argument: x,
        j,
        jp,
        y,
        yp,
    })
}

/// `J_n(x)` and `J'_n(x)` for `n = 0..=order_max`, valid at `x >= 0`.
pub fn bessel_j_table(order_max: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel J needs a non-negative finite argument, got {x}"
        )));
    }
    let jall = miller_j(order_max + 1, x);
    let jp = (0..=order_max)
        .map(|n| {
            if n == 0 {
                -jall[1]
            } else {
                0.5 * (jall[n - 1] - jall[n + 1])
            }
        })
        .collect();
    Ok((jall[..=order_max].to_vec(), jp))
}

/// `H_n^(1)(x) = J_n(x) + i Y_n(x)` and its derivative.
pub fn hankel1(n: usize, x: f64) -> Result<(Complex64, Complex64)> {
    Ok(bessel_table(n, x)?.hankel1(n))
}

/// Complementary error function for `x >= 0` via the continued fraction,
/// accurate once `x >= 3`.
fn erfc_continued_fraction(x: f64) -> f64 {
    // Modified Lentz on erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// `erf(x)` for `0 <= x < 3` via the positive-term series
/// `2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (1*3*...*(2n+1))`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// The error function `2/sqrt(pi) * int_0^x exp(-s^2) ds`.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 3.0 {
        erf_series(ax)
    } else {
        1.0 - erfc_continued_fraction(ax)
    };
    v.copysign(x)
}

/// The complementary error function `1 - erf(x)`, without cancellation for
/// large positive `x`.
pub fn erfc(x: f64) -> f64 {
    if x >= 3.0 {
        erfc_continued_fraction(x)
    } else if x > -3.0 {
        if x >= 0.0 {
            1.0 - erf_series(x)
        } else {
            1.0 + erf_series(-x)
        }
    } else {
        2.0 - erfc_continued_fraction(-x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series `sum (-1)^m (x/2)^(n+2m) / (m! (n+m)!)`, good for small x.
    fn j_series(n: usize, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = half.powi(n as i32) / (1..=n).map(|v| v as f64).product::<f64>();
        let mut sum = term;
        for m in 1..80 {
            term *= -half * half / (m as f64 * (n + m) as f64);
            sum += term;
        }
        sum
    }

    fn bisect_j0_zero(mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if j_series(0, lo) * j_series(0, mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(matches!(bessel_table(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_table(3, -1.0), Err(Error::Domain(_))));
        assert!(hankel1(0, 0.0).is_err());
    }

    #[test]
    fn first_zero_of_j0() {
        let z = bisect_j0_zero(2.0, 3.0);
        assert!((z - 2.404825557695773).abs() < 1e-12);
        let t = bessel_table(0, 2.404825557695773).unwrap();
        assert!(t.j[0].abs() <= 1e-10);
        let (h, _) = hankel1(0, 2.404825557695773).unwrap();
        assert!(h.re.abs() <= 1e-9);
    }

    #[test]
    fn j1_at_one_matches_series() {
        let oracle = j_series(1, 1.0);
        assert!((oracle - 0.4400505857449335).abs() < 1e-15);
        let t = bessel_table(5, 1.0).unwrap();
        assert!((t.j[1] - oracle).abs() < 1e-9);
        for n in 0..=5 {
            assert!((t.j[n] - j_series(n, 1.0)).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn known_y_values() {
        // Y_0(1), Y_1(1), Y_0(30) from standard tables.
        let t = bessel_table(1, 1.0).unwrap();
        assert!((t.y[0] - 0.088_256_964_215_676_96).abs() < 1e-14);
        assert!((t.y[1] + 0.781_212_821_300_288_7).abs() < 1e-14);
        let t = bessel_table(1, 30.0).unwrap();
        assert!((t.y[0] + 0.117_295_731_686_664).abs() < 1e-13);
    }

    #[test]
    fn wronskian_and_recurrence() {
        for &x in &[0.1, 1.0, 7.9, 8.1, 10.0, 24.9, 25.1, 50.0, 200.0] {
            let t = bessel_table(60, x).unwrap();
            let w = 2.0 / (PI * x);
            for n in 0..=60 {
                let lhs = t.j[n] * t.yp[n] - t.jp[n] * t.y[n];
                assert!(
                    (lhs - w).abs() <= 1e-10 * w,
                    "x = {x}, n = {n}: {lhs} vs {w}"
                );
            }
            for n in 1..60 {
                let r = t.j[n - 1] + t.j[n + 1] - (2.0 * n as f64 / x) * t.j[n];
                assert!(r.abs() <= 1e-10 * t.j[n].abs().max(1.0));
            }
        }
    }

    #[test]
    fn hankel_derivative_recurrence() {
        let (_, d1) = hankel1(1, 1.0).unwrap();
        let (h0, _) = hankel1(0, 1.0).unwrap();
        let (h2, _) = hankel1(2, 1.0).unwrap();
        assert!((d1 - 0.5 * (h0 - h2)).norm() < 1e-10);
        let t = bessel_table(0, 1.0).unwrap();
        let (h, _) = hankel1(0, 1.0).unwrap();
        assert!((h.re - t.j[0]).abs() < 1e-12 && (h.im - t.y[0]).abs() < 1e-12);
    }

    #[test]
    fn j_only_table_accepts_zero() {
        let (j, jp) = bessel_j_table(4, 0.0).unwrap();
        assert_eq!(j, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(jp[0], 0.0);
        let (j, _) = bessel_j_table(3, 2.0).unwrap();
        let t = bessel_table(3, 2.0).unwrap();
        assert_eq!(j, t.j);
    }

    fn erf_taylor(x: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for n in 0..terms {
            if n > 0 {
                fact *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * x.powi(2 * n as i32 + 1) / (fact * (2 * n + 1) as f64);
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        let oracle = erf_taylor(1.0, 30);
        assert!((oracle - 0.8427007929497149).abs() < 1e-15);
        assert!((erf(1.0) - oracle).abs() < 1e-12);
        assert_eq!(erf(-1.0), -erf(1.0));
        assert!(erf(6.0) > 1.0 - 1e-12 && erf(6.0) <= 1.0);
        // Continued-fraction branch against known erfc values.
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-18);
        assert!((erfc(5.0) - 1.537_459_794_428_035e-12).abs() < 1e-24);
        assert!((erf(2.9) - erf_taylor(2.9, 80)).abs() < 1e-12);
        assert!((erfc(-1.0) - (1.0 + erf(1.0))).abs() < 1e-15);
    }

    #[test]
    fn erf_monotone_and_bounded() {
        let mut prev = -1.0;
        let mut x = -7.0;
        while x <= 7.0 {
            let v = erf(x);
            assert!(v >= prev && (-1.0..=1.0).contains(&v));
            prev = v;
            x += 0.01;
        }
    }
}
