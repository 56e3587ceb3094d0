//! Truncated multivariate Taylor series ("jets") used for exact derivatives
//! of metric components.
//!
//! A [`Jet`] holds the Taylor coefficients `c_alpha = d^alpha f / alpha!` of a
//! function around a base point, for all multi-indices of total degree at
//! most the jet's valid order. Differentiation lowers the valid order by one;
//! arithmetic keeps the smaller order of its operands.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// Monomial tables shared by all jets over the same variables and order.
pub struct JetSpace {
    vars: usize,
    max_order: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<usize>,
    /// `first_of_degree[d]` is the index of the first monomial of degree `d`.
    first_of_degree: Vec<usize>,
    /// `(i, j, k)` with monomial `i * j = k`, sorted by degree of `k`.
    products: Vec<(usize, usize, usize)>,
    /// `products_up_to[d]`: number of leading entries of `products` of degree `<= d`.
    products_up_to: Vec<usize>,
    /// `deriv[v][m] = (source, factor)`: `d/dx_v` maps `factor * c[source]` to `c[m]`.
    deriv: Vec<Vec<Option<(usize, f64)>>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("vars", &self.vars)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl JetSpace {
    pub fn new(vars: usize, max_order: usize) -> Arc<Self> {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut first_of_degree = Vec::new();
        for d in 0..=max_order {
            first_of_degree.push(exponents.len());
            let mut cur = vec![0u8; vars];
            push_degree(&mut exponents, &mut cur, 0, d);
        }
        first_of_degree.push(exponents.len());
        let degree: Vec<usize> = exponents.iter().map(|e| e.iter().map(|x| *x as usize).sum()).collect();
        let index: HashMap<Vec<u8>, usize> = exponents.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

        let mut products = Vec::new();
        for i in 0..exponents.len() {
            for j in 0..exponents.len() {
                if degree[i] + degree[j] <= max_order {
                    let e: Vec<u8> = exponents[i].iter().zip(&exponents[j]).map(|(a, b)| a + b).collect();
                    products.push((i, j, index[&e]));
                }
            }
        }
        products.sort_by_key(|(_, _, k)| degree[*k]);
        let products_up_to = (0..=max_order)
            .map(|d| products.iter().take_while(|(_, _, k)| degree[*k] <= d).count())
            .collect();

        let deriv = (0..vars)
            .map(|v| {
                exponents
                    .iter()
                    .map(|e| {
                        let mut src = e.clone();
                        src[v] += 1;
                        index.get(&src).map(|s| (*s, src[v] as f64))
                    })
                    .collect()
            })
            .collect();

        Arc::new(Self {
            vars,
            max_order,
            exponents,
            degree,
            first_of_degree,
            products,
            products_up_to,
            deriv,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self, m: usize) -> &[u8] {
        &self.exponents[m]
    }

    pub fn degree(&self, m: usize) -> usize {
        self.degree[m]
    }

    /// Number of monomials of degree at most `order`.
    pub fn len_up_to(&self, order: usize) -> usize {
        self.first_of_degree[order.min(self.max_order) + 1]
    }

    /// Index of a monomial given by its exponent vector.
    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.exponents.iter().position(|e| e.as_slice() == exps)
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, remaining: usize) {
    if var + 1 == cur.len() || cur.is_empty() {
        if let Some(last) = cur.len().checked_sub(1) {
            cur[last] = remaining as u8;
            out.push(cur.clone());
            cur[last] = 0;
        } else if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[var] = k as u8;
        push_degree(out, cur, var + 1, remaining - k);
    }
    cur[var] = 0;
}

/// A truncated Taylor series around a fixed base point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<f64>,
    order: usize,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: f64) -> Self {
        Self::constant_of_order(space, value, space.max_order)
    }

    fn constant_of_order(space: &Arc<JetSpace>, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; space.len_up_to(order)];
        coeffs[0] = value;
        Self {
            space: space.clone(),
            coeffs,
            order,
        }
    }

    /// The coordinate function `x_var` expanded around `base`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, base: f64) -> Self {
        let mut j = Self::constant(space, base);
        if space.max_order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// All coordinate functions around `point`.
    pub fn variables(space: &Arc<JetSpace>, point: &[f64]) -> Vec<Self> {
        point.iter().enumerate().map(|(v, x)| Self::variable(space, v, *x)).collect()
    }

    /// Build from raw coefficients (indexed as in the space) valid up to `order`.
    pub fn from_coeffs(space: &Arc<JetSpace>, mut coeffs: Vec<f64>, order: usize) -> Self {
        let order = order.min(space.max_order);
        let len = space.len_up_to(order);
        assert!(coeffs.len() >= len, "not enough coefficients for the requested order");
        coeffs.truncate(len);
        Self {
            space: space.clone(),
            coeffs,
            order,
        }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of a monomial (Taylor coefficient, not the derivative);
    /// zero beyond the valid order.
    pub fn coeff(&self, m: usize) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    /// Same jet with the valid order lowered to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(&self.space, self.coeffs.clone(), order.min(self.order))
    }

    /// `d/dx_var`, valid to one order less.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(self.order >= 1, "jet has no derivative information left");
        let order = self.order - 1;
        let len = self.space.len_up_to(order);
        let table = &self.space.deriv[var];
        let mut coeffs = vec![0.0; len];
        for (m, c) in coeffs.iter_mut().enumerate() {
            if let Some((src, factor)) = table[m] {
                *c = factor * self.coeffs[src];
            }
        }
        Self {
            space: self.space.clone(),
            coeffs,
            order,
        }
    }

    /// The partial derivative of order `alpha` at the base point.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let m = self.space.index_of(alpha).expect("multi-index within the space");
        let factorial: f64 = alpha.iter().map(|k| (1..=*k as u64).product::<u64>() as f64).product();
        self.coeff(m) * factorial
    }

    fn mul_ref(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        let order = self.order.min(other.order);
        let mut coeffs = vec![0.0; self.space.len_up_to(order)];
        let (a, b) = (&self.coeffs, &other.coeffs);
        for &(i, j, k) in &self.space.products[..self.space.products_up_to[order]] {
            coeffs[k] += a[i] * b[j];
        }
        Self {
            space: self.space.clone(),
            coeffs,
            order,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        let order = self.order.min(other.order);
        let len = self.space.len_up_to(order);
        let coeffs = (0..len).map(|m| f(self.coeffs[m], other.coeffs[m])).collect();
        Self {
            space: self.space.clone(),
            coeffs,
            order,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            order: self.order,
        }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `f(self)` given `f(x0), f'(x0), f''(x0), ...` at `x0 = self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = Self::constant_of_order(&self.space, derivs[0], self.order);
        let mut power = Self::constant_of_order(&self.space, 1.0, self.order);
        let mut factorial = 1.0;
        for (k, d) in derivs.iter().enumerate().take(self.order + 1).skip(1) {
            power = power.mul_ref(&delta);
            factorial *= k as f64;
            if *d != 0.0 {
                for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    *o += d / factorial * p;
                }
            }
        }
        out
    }

    fn derivative_list(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        (0..=self.order).map(f).collect()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.coeffs == other.coeffs
    }
}

/// Numeric type usable in metric component formulas: `f64` or [`Jet`].
pub trait Scalar: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    /// A constant in the same space as `self`.
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn recip(&self) -> Self;

    fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut acc = self.lift(1.0);
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn scale(&self, s: f64) -> Self {
        self.clone() * self.lift(s)
    }

    fn add_const(&self, c: f64) -> Self {
        self.clone() + self.lift(c)
    }
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
}

impl Scalar for Jet {
    fn lift(&self, c: f64) -> Self {
        Jet::constant(&self.space, c)
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&self.derivative_list(|_| e))
    }
    fn ln(&self) -> Self {
        let x = self.value();
        self.compose(&self.derivative_list(|k| {
            if k == 0 {
                x.ln()
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                let fact: f64 = (1..k).map(|i| i as f64).product();
                sign * fact / x.powi(k as i32)
            }
        }))
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&self.derivative_list(|k| [s, c, -s, -c][k % 4]))
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&self.derivative_list(|k| [c, -s, -c, s][k % 4]))
    }
    fn powf(&self, p: f64) -> Self {
        let x = self.value();
        self.compose(&self.derivative_list(|k| {
            let falling: f64 = (0..k).map(|i| p - i as f64).product();
            falling * x.powf(p - k as f64)
        }))
    }
    fn recip(&self) -> Self {
        self.powi_neg_one()
    }
}

impl Jet {
    fn powi_neg_one(&self) -> Self {
        let x = self.value();
        self.compose(&self.derivative_list(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            sign * fact / x.powi(k as i32 + 1)
        }))
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $body(self, rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a: &Jet, b: &Jet| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a: &Jet, b: &Jet| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a: &Jet, b: &Jet| a.mul_ref(b));
jet_binop!(Div, div, |a: &Jet, b: &Jet| a.mul_ref(&b.recip()));

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> Arc<JetSpace> {
        JetSpace::new(n, 4)
    }

    #[test]
    fn monomial_counts() {
        // binomial(n + k, k)
        assert_eq!(JetSpace::new(4, 4).len(), 70);
        assert_eq!(JetSpace::new(8, 4).len(), 495);
        assert_eq!(JetSpace::new(3, 2).len(), 10);
        let s = JetSpace::new(2, 3);
        assert_eq!(s.exponents(0), &[0, 0]);
        assert_eq!(s.exponents(1), &[1, 0]);
        assert_eq!(s.exponents(2), &[0, 1]);
        assert_eq!(s.len_up_to(1), 3);
    }

    #[test]
    fn polynomial_partials() {
        let s = space(2);
        let v = Jet::variables(&s, &[0.5, -1.0]);
        // f = x^3 y + 2 y^2
        let f = &(&(&v[0] * &v[0]) * &v[0]) * &v[1] + (&v[1] * &v[1]).scale(2.0);
        assert!((f.value() - (2.0 - 0.125)).abs() < 1e-15);
        assert!((f.partial(&[1, 0]) + 0.75).abs() < 1e-15);
        assert!((f.partial(&[0, 1]) - (0.125 - 4.0)).abs() < 1e-15);
        assert!((f.partial(&[2, 1]) - 6.0 * 0.5).abs() < 1e-15);
        assert!((f.partial(&[3, 1]) - 6.0).abs() < 1e-15);
        assert!((f.partial(&[0, 2]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let s = space(1);
        let x0 = 0.7;
        let x = Jet::variable(&s, 0, x0);
        let checks: Vec<(Jet, Vec<f64>)> = vec![
            (x.exp(), vec![x0.exp(); 5]),
            (x.sin(), vec![x0.sin(), x0.cos(), -x0.sin(), -x0.cos(), x0.sin()]),
            (
                x.ln(),
                vec![x0.ln(), 1.0 / x0, -1.0 / x0.powi(2), 2.0 / x0.powi(3), -6.0 / x0.powi(4)],
            ),
            (
                x.recip(),
                vec![1.0 / x0, -1.0 / x0.powi(2), 2.0 / x0.powi(3), -6.0 / x0.powi(4), 24.0 / x0.powi(5)],
            ),
        ];
        for (j, expected) in checks {
            for (k, e) in expected.iter().enumerate() {
                let d = j.partial(&[k as u8]);
                assert!((d - e).abs() < 1e-12 * (1.0 + e.abs()), "order {k}: {d} vs {e}");
            }
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let s = space(3);
        let v = Jet::variables(&s, &[1.0, 2.0, 3.0]);
        let f = (&v[0] * &v[1]).exp();
        let d = f.derivative(1);
        assert_eq!(d.order(), 3);
        // d/dy exp(xy) = x exp(xy)
        assert!((d.value() - 2.0_f64.exp()).abs() < 1e-12);
        let dd = d.derivative(0);
        // d/dx (x e^{xy}) = e^{xy} (1 + x y)
        assert!((dd.value() - 3.0 * 2.0_f64.exp()).abs() < 1e-12);
        assert_eq!(dd.order(), 2);
    }

    #[test]
    fn quotient_matches_chain_rule() {
        let s = space(2);
        let v = Jet::variables(&s, &[0.3, 0.4]);
        let q = &v[0] / &(&(&v[0] * &v[0]) + &(&v[1] * &v[1]).add_scalar(1.0));
        let (x, y) = (0.3, 0.4);
        let den: f64 = 1.0 + x * x + y * y;
        assert!((q.partial(&[1, 0]) - (den - 2.0 * x * x) / (den * den)).abs() < 1e-14);
        assert!((q.partial(&[0, 1]) - (-2.0 * x * y) / (den * den)).abs() < 1e-14);
    }
}
