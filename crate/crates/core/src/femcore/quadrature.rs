use crate::{Error, Result};

/// A quadrature rule on the reference triangle, exact for polynomials of
/// total degree `degree`. Weights sum to the reference area 1/2.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub const MAX_DEGREE: usize = 20;

/// Collapsed (Duffy) Gauss rule: Gauss–Legendre in the collapsed
/// direction times Gauss–Jacobi with weight `(1 - b)` in the other.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::Parameter(format!(
            "quadrature degree must be in 1..={MAX_DEGREE}, got {degree}"
        )));
    }
    // 2n - 1 >= degree in each collapsed direction.
    let n = (degree + 2) / 2;
    let (ga, wa) = gauss_jacobi(n, 0.0, 0.0);
    let (gb, wb) = gauss_jacobi(n, 1.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (b, wbj) in gb.iter().zip(&wb) {
        for (a, wai) in ga.iter().zip(&wa) {
            let eta = 0.5 * (1.0 + b);
            let xi = 0.25 * (1.0 + a) * (1.0 - b);
            points.push([xi, eta]);
            weights.push(wai * wbj / 8.0);
        }
    }
    Ok(QuadratureRule {
        degree,
        points,
        weights,
    })
}

/// Nodes and weights of the `n`-point Gauss–Jacobi rule for the weight
/// `(1-x)^alpha (1+x)^beta` on `[-1, 1]`, with `alpha + beta` in {0, 1}.
///
/// Nodes are the eigenvalues of the Jacobi matrix, found by Sturm-sequence
/// bisection; weights follow from the orthonormal polynomials.
fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let s = 2.0 * k as f64 + ab;
            if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            }
        })
        .collect();
    // off[k] couples k-1 and k, k >= 1.
    let off: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            (4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt()
        })
        .collect();
    // Integral of the weight; equals 2 for both (0,0) and (1,0).
    let mu0 = 2.0f64;

    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for k in 0..n {
            let b2 = if k == 0 { 0.0 } else { off[k] * off[k] };
            q = diag[k] - x - if k == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        nodes.push(0.5 * (lo + hi));
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = 0.0;
            let mut p = 1.0 / mu0.sqrt();
            let mut sum = p * p;
            for k in 0..n - 1 {
                let next = ((x - diag[k]) * p - off[k] * p_prev) / off[k + 1];
                p_prev = p;
                p = next;
                sum += p * p;
            }
            1.0 / sum
        })
        .collect();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|v| v as f64).product()
    }

    #[test]
    fn centroid_rule() {
        let q = quadrature(1).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.points[0][1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_range() {
        assert!(quadrature(0).is_err());
        assert!(quadrature(MAX_DEGREE + 1).is_err());
    }

    #[test]
    fn monomial_exactness() {
        for degree in 1..=20 {
            let q = quadrature(degree).unwrap();
            let total: f64 = q.weights.iter().sum();
            assert!((total - 0.5).abs() < 1e-14);
            assert!(q.weights.iter().all(|&w| w > 0.0));
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let got: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    assert!((got - exact).abs() < 1e-13, "deg {degree}: x^{a} y^{b}");
                }
            }
        }
        let q = quadrature(4).unwrap();
        let got: f64 = q
            .points
            .iter()
            .zip(&q.weights)
            .map(|(p, w)| w * p[0].powi(2) * p[1].powi(2))
            .sum();
        assert!((got - 1.0 / 180.0).abs() < 1e-13);
    }

    #[test]
    fn points_inside_reference_triangle() {
        let q = quadrature(20).unwrap();
        for p in &q.points {
            assert!(p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0);
        }
    }
}
