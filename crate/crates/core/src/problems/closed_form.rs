//! Closed-form reference solutions and manufactured source terms.
//!
//! Every solution is written against [`Scalar`] so that evaluating on jets
//! gives exact derivatives. Terms of the form `exp(-c/ε)` are evaluated
//! directly: for small ε they underflow to zero, which is the correct limit,
//! and no denominator `1 − exp(-c/ε)` can vanish for ε ≤ 1.

use crate::autodiff::Scalar;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Example 1: `(e^{-x} − e^{-x/ε}) / (e^{-1} − e^{-1/ε})`.
pub fn ex1<T: Scalar>(x: T, eps: f64) -> T {
    let den = (-1.0f64).exp() - (-1.0 / eps).exp();
    ((-x).exp() - (-x / eps).exp()) / den
}

/// Example 2: `(−e^{-(1−x)/ε} + e^{-(1+x)/ε}) / (e^{-2/ε} − 1)`.
pub fn ex2<T: Scalar>(x: T, eps: f64) -> T {
    let den = (-2.0 / eps).exp() - 1.0;
    (((x + 1.0) / (-eps)).exp() - ((-x + 1.0) / (-eps)).exp()) / den
}

/// Example 3: `(u1, u2) = (2W1 + W2, 4W1)`.
pub fn ex3<T: Scalar>(x: T, eps: f64) -> [T; 2] {
    let e1 = (-1.0 / eps).exp();
    let e2 = (-2.0 / eps).exp();
    let den = (1.0 - e1) * (1.0 - e1);
    let ex = (-x / eps).exp();
    let exp1 = ((x + 1.0) / (-eps)).exp();
    let one = T::cst(1.0);

    // W1 with the overall 1/ε distributed into each term
    let t1 = ((-x * x * 2.0 + x * 2.0 + 2.0) + (x * 8.0 - 4.0) * eps - one / eps) * e1;
    let t2 = ex * (-x * 2.0 + x / eps - 4.0 * eps);
    let t3 = exp1 * ((x * (2.0 * eps - 1.0) + (4.0 * eps * eps - 2.0 * eps + 1.0)) / eps);
    let t4 = x * (x - 4.0 * eps - 1.0) * e2 - (x - 1.0) * (-x + 4.0 * eps);
    let w1 = (t1 + t2 + t3 + t4) / den;

    let w2 = (x * (x - 2.0 * eps) * e1 + (x - 1.0) * (-x + (2.0 * eps - 1.0)) + ex * (2.0 * eps - 1.0)) / (1.0 - e1);
    [w1 * 2.0 + w2, w1 * 4.0]
}

/// Factor of Example 4: `F(t) = t²/(2a) + εt/a² + (1/(2a) + ε/a²)(e^{-a/ε} − e^{-a(1−t)/ε}) / (1 − e^{-a/ε})`.
fn ex4_factor<T: Scalar>(t: T, a: f64, eps: f64) -> T {
    let ea = (-a / eps).exp();
    let coef = 1.0 / (2.0 * a) + eps / (a * a);
    let layer = ((-t + 1.0) * (-a / eps)).exp();
    t * t / (2.0 * a) + t * (eps / (a * a)) + (-layer + ea) * (coef / (1.0 - ea))
}

pub const EX4_VELOCITY: [f64; 2] = [0.5, SQRT3 / 2.0];

pub fn ex4<T: Scalar>(x: T, y: T, eps: f64) -> T {
    ex4_factor(x, EX4_VELOCITY[0], eps) * ex4_factor(y, EX4_VELOCITY[1], eps)
}

/// Source of Example 4. Each factor satisfies `−εF'' + aF' = t`, so
/// `f = x·Y + y·X + X·Y`.
pub fn ex4_source(x: f64, y: f64, eps: f64) -> f64 {
    let fx = ex4_factor(x, EX4_VELOCITY[0], eps);
    let fy = ex4_factor(y, EX4_VELOCITY[1], eps);
    x * fy + y * fx + fx * fy
}

/// Example 5: `e^{y−x} + (1+y)·exp(ln((1+y)/2)/ε)`, with the logarithm taken
/// as `ln_1p((y−1)/2)` so the layer near `y = 1` keeps full precision.
pub fn ex5<T: Scalar>(x: T, y: T, eps: f64) -> T {
    (y - x).exp() + (y + 1.0) * (((y - 1.0) * 0.5).ln_1p() / eps).exp()
}

pub fn ex5_source(x: f64, y: f64, eps: f64) -> f64 {
    (1.0 / (1.0 + y) - 2.0 * eps) * (y - x).exp()
}

/// The four one-dimensional factors of Example 6: `u1 = P(x)Q(y)`,
/// `u2 = −R(x)S(y)`.
fn ex6_p<T: Scalar>(x: T, eps: f64) -> T {
    let e1 = (-1.0 / (2.0 * eps)).exp();
    let ex = (-x / (2.0 * eps)).exp();
    (x * x * e1 - (x * x - 1.0) - ex + (x - 1.0 - x * e1 + ex) * (4.0 * eps)) / (1.0 - e1)
}

fn ex6_q<T: Scalar>(y: T, eps: f64) -> T {
    let e2 = (-SQRT3 / (2.0 * eps)).exp();
    let ey = (-y * (SQRT3 / (2.0 * eps))).exp();
    ((y * y * e2 - (y * y - 1.0) - ey) * SQRT3 + (y - 1.0 - y * e2 + ey) * (4.0 * eps)) / (3.0 * (1.0 - e2))
}

fn ex6_r<T: Scalar>(x: T, eps: f64) -> T {
    let e1 = (-1.0 / (2.0 * eps)).exp();
    let ex = (-x / (2.0 * eps)).exp();
    let x2 = x * x;
    let x3 = x2 * x;
    ((-x3 * e1 + x3 - 1.0 + ex) * 2.0 - (-x2 * e1 + x2 - 1.0 + ex) * (12.0 * eps)
        + (x - 1.0 - x * e1 + ex) * (48.0 * eps * eps))
        / (3.0 * (1.0 - e1))
}

fn ex6_s<T: Scalar>(y: T, eps: f64) -> T {
    let e2 = (-SQRT3 / (2.0 * eps)).exp();
    let ey = (-y * (SQRT3 / (2.0 * eps))).exp();
    let y2 = y * y;
    let y3 = y2 * y;
    ((-y3 * e2 + y3 - 1.0 + ey) * 2.0 - (-y2 * e2 + y2 - 1.0 + ey) * (4.0 * SQRT3 * eps)
        + (y - 1.0 - y * e2 + ey) * (16.0 * eps * eps))
        / (3.0 * SQRT3 * (1.0 - e2))
}

/// `R'(x)`, written out by hand.
fn ex6_r_prime(x: f64, eps: f64) -> f64 {
    let e1 = (-1.0 / (2.0 * eps)).exp();
    let ex = (-x / (2.0 * eps)).exp();
    let num = 2.0 * (3.0 * x * x * (1.0 - e1)) - ex / eps - 24.0 * eps * x * (1.0 - e1)
        + 6.0 * ex
        + 48.0 * eps * eps * (1.0 - e1)
        - 24.0 * eps * ex;
    num / (3.0 * (1.0 - e1))
}

/// `S'(y)`, written out by hand.
fn ex6_s_prime(y: f64, eps: f64) -> f64 {
    let e2 = (-SQRT3 / (2.0 * eps)).exp();
    let k = SQRT3 / (2.0 * eps);
    let ey = (-k * y).exp();
    let num = 6.0 * y * y * (1.0 - e2) - 2.0 * k * ey - 8.0 * SQRT3 * eps * y * (1.0 - e2)
        + 6.0 * ey
        + 16.0 * eps * eps * (1.0 - e2)
        - 8.0 * SQRT3 * eps * ey;
    num / (3.0 * SQRT3 * (1.0 - e2))
}

pub const EX6_A: [[f64; 2]; 2] = [[0.5, 1.0], [0.0, 0.5]];
pub const EX6_B: [[f64; 2]; 2] = [[SQRT3 / 2.0, 1.0], [0.0, SQRT3 / 2.0]];

pub fn ex6<T: Scalar>(x: T, y: T, eps: f64) -> [T; 2] {
    [ex6_p(x, eps) * ex6_q(y, eps), -(ex6_r(x, eps) * ex6_s(y, eps))]
}

/// Source of Example 6. With `L_x = −ε∂² − ½∂` and `L_y = −ε∂² − (√3/2)∂`
/// the factors satisfy `L_x P = x`, `L_y Q = y`, `L_x R = −x²`,
/// `L_y S = −y²`, hence
/// `f1 = xQ + yP + R'S + RS'` and `f2 = x²S + y²R`.
pub fn ex6_source(x: f64, y: f64, eps: f64) -> [f64; 2] {
    let (p, q) = (ex6_p(x, eps), ex6_q(y, eps));
    let (r, s) = (ex6_r(x, eps), ex6_s(y, eps));
    let f1 = x * q + y * p + ex6_r_prime(x, eps) * s + r * ex6_s_prime(y, eps);
    let f2 = x * x * s + y * y * r;
    [f1, f2]
}
