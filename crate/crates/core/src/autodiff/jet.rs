use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by plain `f64` and [`Jet2`].
///
/// Closed-form solutions, level-set functions and PDE operators are written
/// once against this trait; evaluating them on jets yields exact first and
/// second directional derivatives.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sqrt(self) -> Self;
    /// `|x|`, differentiated with the sign of the value (kink at 0 ignored).
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Second-order truncated Taylor jet along one fixed direction:
/// value, first and second directional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    #[inline]
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    /// A constant: both derivatives vanish.
    #[inline]
    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// A coordinate seeded with direction component `dir`.
    #[inline]
    pub const fn seed(value: f64, dir: f64) -> Self {
        Self::new(value, dir, 0.0)
    }

    /// Composition with a scalar map given `h(v), h'(v), h''(v)`.
    #[inline]
    pub fn compose(self, h0: f64, h1: f64, h2: f64) -> Self {
        Self::new(h0, h1 * self.d1, h2 * self.d1 * self.d1 + h1 * self.d2)
    }

    #[inline]
    pub fn scale(self, c: f64) -> Self {
        Self::new(self.value * c, self.d1 * c, self.d2 * c)
    }

    /// `self += c * other`, the accumulation used by affine layers.
    #[inline]
    pub fn add_scaled(&mut self, c: f64, other: Jet2) {
        self.value += c * other.value;
        self.d1 += c * other.d1;
        self.d2 += c * other.d2;
    }

    #[inline]
    pub fn sigmoid(self) -> Self {
        let [s0, s1, s2, _] = sigmoid_derivs(self.value);
        self.compose(s0, s1, s2)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// `σ, σ', σ'', σ'''` at `s`, evaluated without overflow for any finite `s`.
#[inline]
pub fn sigmoid_derivs(s: f64) -> [f64; 4] {
    // sig and its complement are both formed from exp(-|s|) <= 1
    let e = (-s.abs()).exp();
    let inv = 1.0 / (1.0 + e);
    let (sig, comp) = if s >= 0.0 { (inv, e * inv) } else { (e * inv, inv) };
    let d1 = sig * comp;
    let d2 = d1 * (comp - sig);
    let d3 = d1 * (1.0 - 6.0 * d1);
    [sig, d1, d2, d3]
}

#[inline]
pub fn sigmoid(s: f64) -> f64 {
    sigmoid_derivs(s)[0]
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, o: Jet2) -> Jet2 {
        let q = self.value / o.value;
        let q1 = (self.d1 - q * o.d1) / o.value;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.value;
        Jet2::new(q, q1, q2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        Jet2::new(-self.value, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, c: f64) -> Jet2 {
        Jet2::new(self.value + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, c: f64) -> Jet2 {
        Jet2::new(self.value - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, c: f64) -> Jet2 {
        Jet2::new(self.value / c, self.d1 / c, self.d2 / c)
    }
}

impl Scalar for Jet2 {
    #[inline]
    fn cst(v: f64) -> Self {
        Jet2::constant(v)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.value
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        let inv = 1.0 / (1.0 + self.value);
        self.compose(self.value.ln_1p(), inv, -inv * inv)
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * r * r))
    }
    #[inline]
    fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        let v = self.value;
        let nf = f64::from(n);
        self.compose(v.powi(n), nf * v.powi(n - 1), nf * (nf - 1.0) * v.powi(n - 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_of_seed_at_zero() {
        let j = Jet2::seed(0.0, 1.0).sigmoid();
        assert_eq!(j, Jet2::new(0.5, 0.25, 0.0));
    }

    #[test]
    fn constant_has_no_derivatives() {
        let j = Jet2::constant(1.7).sigmoid();
        assert_eq!((j.d1, j.d2), (0.0, 0.0));
    }

    #[test]
    fn sigmoid_saturates_without_nan() {
        for s in [-1e12, -800.0, -40.0, 40.0, 800.0, 1e12] {
            let d = sigmoid_derivs(s);
            assert!(d.iter().all(|v| v.is_finite()), "{s}: {d:?}");
        }
        assert_eq!(sigmoid_derivs(1e12)[0], 1.0);
        assert_eq!(sigmoid_derivs(-1e12)[0], 0.0);
        assert_eq!(sigmoid_derivs(-1e12)[1], 0.0);
    }

    #[test]
    fn sigmoid_derivatives_match_finite_differences() {
        for s in [-3.0, -0.4, 0.0, 0.9, 2.5] {
            let d = sigmoid_derivs(s);
            let h = 1e-5;
            let fd = |k: usize| (sigmoid_derivs(s + h)[k] - sigmoid_derivs(s - h)[k]) / (2.0 * h);
            for k in 0..3 {
                assert!((fd(k) - d[k + 1]).abs() < 1e-9, "order {} at {s}", k + 1);
            }
        }
    }

    #[test]
    fn quotient_and_sqrt_rules() {
        // f(x) = sqrt(x) / (1 + x^2) at x = 2 with unit seed
        let x = Jet2::seed(2.0, 1.0);
        let f = x.sqrt() / (x * x + 1.0);
        let g = |t: f64| t.sqrt() / (1.0 + t * t);
        let h = 1e-4;
        let d1 = (g(2.0 + h) - g(2.0 - h)) / (2.0 * h);
        let d2 = (g(2.0 + h) - 2.0 * g(2.0) + g(2.0 - h)) / (h * h);
        assert!((f.value - g(2.0)).abs() < 1e-15);
        assert!((f.d1 - d1).abs() < 1e-8);
        assert!((f.d2 - d2).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn product_matches_symbolic_expansion(
            a in prop::array::uniform3(-10.0f64..10.0),
            b in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let (ja, jb) = (Jet2::new(a[0], a[1], a[2]), Jet2::new(b[0], b[1], b[2]));
            let p = ja * jb;
            prop_assert_eq!(p.value, a[0] * b[0]);
            prop_assert_eq!(p.d1, a[1] * b[0] + a[0] * b[1]);
            prop_assert_eq!(p.d2, a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2]);
        }

        #[test]
        fn exp_ln1p_roundtrip(v in -0.5f64..3.0, d1 in -2.0f64..2.0, d2 in -2.0f64..2.0) {
            let j = Jet2::new(v, d1, d2);
            let back = (j.exp() - 1.0).ln_1p();
            prop_assert!((back.value - v).abs() < 1e-12);
            prop_assert!((back.d1 - d1).abs() < 1e-10);
            prop_assert!((back.d2 - d2).abs() < 1e-9);
        }
    }
}
