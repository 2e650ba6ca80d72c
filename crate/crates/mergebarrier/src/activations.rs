//! GELU and SiLU together with their exact n-th derivatives.
//!
//! GELU derivatives come from the Gaussian-density recursion
//! h_n(x) = (-x) h_{n-1}(x) - (n-1) h_{n-2}(x), which gives
//! gelu^(n)(x) = x h_{n-1}(x) + n h_{n-2}(x) with h_{-1} taken as the normal
//! CDF. SiLU derivatives use the polynomial-in-sigmoid representation
//! sigma^(n) = sum_m c_m sigma^m, advanced by (sigma^m)' = m(sigma^m - sigma^{m+1}).
//! Both stacks are pinned to finite-difference oracles in the tests.

use serde::{Deserialize, Serialize};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// The two activations the toy model supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Gelu,
    Silu,
}

/// Logistic sigmoid, stable in both tails.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF via Cody's rational erf approximation
/// (double-precision accurate).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Error function, |erf(x) - exact| < 1e-15 over the real line.
pub fn erf(x: f64) -> f64 {
    1.0 - erfc(x)
}

/// Complementary error function (W. J. Cody, 1969 rational approximations).
pub fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let result = if ax < 0.46875 {
        // erf on the central interval
        const P: [f64; 5] = [
            3.209377589138469472562e3,
            3.774852376853020208137e2,
            1.138641541510501556495e2,
            3.161123743870565596947e0,
            1.857777061846031526730e-1,
        ];
        const Q: [f64; 5] = [
            2.844236833439170622273e3,
            1.282616526077372275645e3,
            2.440246379344441733056e2,
            2.360129095234412093499e1,
            1.0,
        ];
        let z = x * x;
        let mut num = P[4] * z;
        let mut den = Q[4] * z;
        for i in (1..4).rev() {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        return 1.0 - x * (num + P[0]) / (den + Q[0]);
    } else if ax < 4.0 {
        const P: [f64; 9] = [
            1.23033935479799725272e3,
            2.05107837782607146532e3,
            1.71204761263407058314e3,
            8.81952221241769090411e2,
            2.98635138197400131132e2,
            6.61191906371416294775e1,
            8.88314979438837594118e0,
            5.64188496988670089180e-1,
            2.15311535474403846343e-8,
        ];
        const Q: [f64; 9] = [
            1.23033935480374942043e3,
            3.43936767414372163696e3,
            4.36261909014324715820e3,
            3.29079923573345962678e3,
            1.62138957456669018874e3,
            5.37181101862009857509e2,
            1.17693950891312499305e2,
            1.57449261107098347253e1,
            1.0,
        ];
        let mut num = P[8] * ax;
        let mut den = Q[8] * ax;
        for i in (1..8).rev() {
            num = (num + P[i]) * ax;
            den = (den + Q[i]) * ax;
        }
        let frac = (num + P[0]) / (den + Q[0]);
        (-ax * ax).exp() * frac
    } else {
        const P: [f64; 6] = [
            -6.58749161529837803157e-4,
            -1.60837851487422766278e-2,
            -1.25781726111229246204e-1,
            -3.60344899949804439429e-1,
            -3.05326634961232344035e-1,
            -1.63153871373020978498e-2,
        ];
        const Q: [f64; 6] = [
            2.33520497626869185443e-3,
            6.05183413124413191178e-2,
            5.27905102951428412248e-1,
            1.87295284992346047209e0,
            2.56852019228982242072e0,
            1.0,
        ];
        let z = 1.0 / (ax * ax);
        let mut num = P[5] * z;
        let mut den = Q[5] * z;
        for i in (1..5).rev() {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let frac = z * (num + P[0]) / (den + Q[0]);
        (-ax * ax).exp() * (INV_SQRT_2PI * std::f64::consts::SQRT_2 + frac) / ax
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Activation value: GELU(x) = x * Phi(x), SiLU(x) = x * sigma(x).
pub fn act_eval(kind: ActivationKind, x: f64) -> f64 {
    match kind {
        ActivationKind::Gelu => x * normal_cdf(x),
        ActivationKind::Silu => x * sigmoid(x),
    }
}

/// n-th derivative of the selected activation.
pub fn act_derivative(kind: ActivationKind, n: usize, x: f64) -> f64 {
    match kind {
        ActivationKind::Gelu => gelu_derivative(n, x),
        ActivationKind::Silu => silu_derivative(n, x),
    }
}

/// h_n(x): n-th derivative of the standard normal density.
/// h_0 = phi, h_1 = -x phi, h_n = (-x) h_{n-1} - (n-1) h_{n-2}.
pub fn gaussian_h(n: usize, x: f64) -> f64 {
    if n == 0 {
        return phi(x);
    }
    let mut prev2 = phi(x); // h_0
    let mut prev1 = -x * phi(x); // h_1
    if n == 1 {
        return prev1;
    }
    for m in 2..=n {
        let cur = (-x) * prev1 - (m as f64 - 1.0) * prev2;
        prev2 = prev1;
        prev1 = cur;
    }
    prev1
}

/// n-th derivative of GELU. n = 0 is the activation itself; the recursion
/// gelu^(n)(x) = x h_{n-1}(x) + n h_{n-2}(x) uses h_{-1} := Phi(x) so that
/// n = 1 reduces to the familiar Phi(x) + x phi(x).
pub fn gelu_derivative(n: usize, x: f64) -> f64 {
    match n {
        0 => act_eval(ActivationKind::Gelu, x),
        1 => x * gaussian_h(0, x) + normal_cdf(x),
        _ => x * gaussian_h(n - 1, x) + (n as f64) * gaussian_h(n - 2, x),
    }
}

/// Coefficient table expressing sigma^(n)(x) as sum_m coeffs[m] * sigma(x)^m.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmoidPoly {
    pub order: usize,
    pub coeffs: Vec<f64>,
}

impl SigmoidPoly {
    pub fn eval(&self, x: f64) -> f64 {
        let s = sigmoid(x);
        // Horner in s over coeffs[0] + coeffs[1] s + ... + coeffs[n+1] s^{n+1}
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

/// Build the sigma^(n) coefficient table. Order 0 is (0, 1) — sigma itself —
/// and each step applies d/dx sigma^m = m (sigma^m - sigma^{m+1}).
pub fn sigmoid_poly(n: usize) -> SigmoidPoly {
    let mut coeffs = vec![0.0, 1.0];
    for _ in 0..n {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (m, c) in coeffs.iter().enumerate() {
            if *c == 0.0 || m == 0 {
                continue;
            }
            let mf = m as f64;
            next[m] += c * mf;
            next[m + 1] -= c * mf;
        }
        coeffs = next;
    }
    SigmoidPoly { order: n, coeffs }
}

/// n-th derivative of SiLU: SiLU^(n)(x) = x sigma^(n)(x) + n sigma^(n-1)(x),
/// n = 0 being the activation itself.
pub fn silu_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        return act_eval(ActivationKind::Silu, x);
    }
    let dn = sigmoid_poly(n).eval(x);
    let dn1 = sigmoid_poly(n - 1).eval(x);
    x * dn + (n as f64) * dn1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature of the standard normal density on [0, x],
    /// used as the independent oracle for Phi.
    fn phi_quadrature(x: f64) -> f64 {
        fn simpson(a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (phi(a) + 4.0 * phi(m) + phi(b))
        }
        fn adaptive(a: f64, b: f64, whole: f64, depth: usize) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(a, m);
            let right = simpson(m, b);
            if depth == 0 || (left + right - whole).abs() < 1e-15 {
                left + right + (left + right - whole) / 15.0
            } else {
                adaptive(a, m, left, depth - 1) + adaptive(m, b, right, depth - 1)
            }
        }
        0.5 + adaptive(0.0, x, simpson(0.0, x), 30)
    }

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn activation_values_at_zero() {
        assert_eq!(act_eval(ActivationKind::Gelu, 0.0), 0.0);
        assert_eq!(act_eval(ActivationKind::Silu, 0.0), 0.0);
    }

    #[test]
    fn gelu_matches_quadrature_oracle() {
        for &x in &[-2.0, -0.5, 0.3, 1.0, 2.7] {
            let expected = x * phi_quadrature(x);
            let got = act_eval(ActivationKind::Gelu, x);
            assert!(
                (got - expected).abs() <= 1e-12,
                "GELU({x}): {got} vs quadrature {expected}"
            );
        }
    }

    #[test]
    fn erf_known_values() {
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-14);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!((erf(-1.0) + erf(1.0)).abs() < 1e-15);
        assert!(erfc(6.0) > 0.0 && erfc(6.0) < 1e-15);
    }

    #[test]
    fn gaussian_h_base_cases() {
        assert!((gaussian_h(0, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(gaussian_h(1, 0.0), 0.0);
    }

    #[test]
    fn gaussian_h_matches_finite_difference() {
        let x = 0.7;
        let fd = central_diff(|t| gaussian_h(2, t), x, 1e-5);
        let exact = gaussian_h(3, x);
        assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn gelu_first_derivative_at_zero() {
        assert!((gelu_derivative(1, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gelu_order_zero_is_the_activation() {
        for &x in &[-1.5, 0.0, 0.8, 2.0] {
            assert_eq!(gelu_derivative(0, x), act_eval(ActivationKind::Gelu, x));
        }
    }

    #[test]
    fn gelu_fourth_derivative_matches_finite_difference() {
        let x = 1.2;
        let fd = central_diff(|t| gelu_derivative(3, t), x, 1e-5);
        let exact = gelu_derivative(4, x);
        assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn sigmoid_poly_tables() {
        assert_eq!(sigmoid_poly(0).coeffs, vec![0.0, 1.0]);
        assert_eq!(sigmoid_poly(1).coeffs, vec![0.0, 1.0, -1.0]);
        assert_eq!(sigmoid_poly(2).coeffs, vec![0.0, 1.0, -3.0, 2.0]);
    }

    #[test]
    fn sigmoid_poly_five_matches_finite_difference() {
        let x = -0.3;
        let fd = central_diff(|t| sigmoid_poly(4).eval(t), x, 1e-5);
        let exact = sigmoid_poly(5).eval(x);
        assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn silu_first_derivative_at_zero() {
        assert!((silu_derivative(1, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn silu_order_zero_is_the_activation() {
        for &x in &[-2.0, 0.0, 0.4, 1.7] {
            assert_eq!(silu_derivative(0, x), act_eval(ActivationKind::Silu, x));
        }
    }

    #[test]
    fn silu_third_derivative_matches_finite_difference() {
        let x = 0.9;
        let fd = central_diff(|t| silu_derivative(2, t), x, 1e-5);
        let exact = silu_derivative(3, x);
        assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
    }

    #[test]
    fn all_orders_match_finite_differences() {
        let xs = [-3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 2.5];
        for n in 1..=8 {
            for &x in &xs {
                let g = gelu_derivative(n, x);
                let fd = central_diff(|t| gelu_derivative(n - 1, t), x, 1e-5);
                let tol = (1e-6_f64).max(1e-6 * g.abs());
                assert!((fd - g).abs() <= tol, "gelu^({n}) at {x}: fd {fd} vs {g}");

                let s = silu_derivative(n, x);
                let fd = central_diff(|t| silu_derivative(n - 1, t), x, 1e-5);
                let tol = (1e-6_f64).max(1e-6 * s.abs());
                assert!((fd - s).abs() <= tol, "silu^({n}) at {x}: fd {fd} vs {s}");
            }
        }
    }

    #[test]
    fn hermite_identity_polynomial_fit() {
        // (-1)^n h_n(x) / phi(x) is a degree-n polynomial (the Hermite
        // polynomial He_n); check by least-squares fitting a degree-n
        // polynomial through 20 sample points and demanding a tiny residual.
        use crate::numkit::{jacobi_eigh, Matrix};
        for n in 1..=6 {
            let xs: Vec<f64> = (0..20).map(|i| -2.0 + 4.0 * i as f64 / 19.0).collect();
            let ys: Vec<f64> = xs
                .iter()
                .map(|&x| (if n % 2 == 0 { 1.0 } else { -1.0 }) * gaussian_h(n, x) / phi(x))
                .collect();
            // Vandermonde least squares via normal equations, solved through
            // the eigendecomposition of V^T V
            let v = Matrix::from_fn(20, n + 1, |i, j| xs[i].powi(j as i32));
            let vtv = v.transpose_matmul(&v).unwrap();
            let vty: Vec<f64> = (0..=n)
                .map(|j| (0..20).map(|i| v.get(i, j) * ys[i]).sum())
                .collect();
            let eig = jacobi_eigh(&vtv).unwrap();
            // coeffs = U diag(1/lambda) U^T vty
            let u = &eig.eigenvectors;
            let mut coeffs = vec![0.0; n + 1];
            for k in 0..=n {
                let uk: Vec<f64> = u.column(k);
                let dot: f64 = uk.iter().zip(&vty).map(|(a, b)| a * b).sum();
                let scaled = dot / eig.eigenvalues[k];
                for i in 0..=n {
                    coeffs[i] += uk[i] * scaled;
                }
            }
            let mut residual: f64 = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                let fit: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * x.powi(j as i32))
                    .sum();
                residual = residual.max((fit - ys[i]).abs());
            }
            assert!(residual < 1e-8, "degree-{n} fit residual {residual}");
        }
    }

    #[test]
    fn sigmoid_derivative_coarse_bound() {
        let factorial = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        for n in 1..=8 {
            for &x in &[-4.0, -1.0, 0.0, 0.5, 3.0] {
                let v = sigmoid_poly(n).eval(x).abs();
                assert!(v <= factorial(n), "sigma^({n})({x}) = {v} exceeds n!");
            }
        }
    }
}
