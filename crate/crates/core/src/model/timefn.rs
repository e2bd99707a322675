use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// Real scalar function of time, held as an expression tree so that its
/// derivative is available in closed form.
///
/// Besides the arithmetic nodes there is an `Integral` node, `∫₀ᵗ f(s) ds`,
/// evaluated by adaptive Simpson quadrature; its derivative is `f`.
#[derive(Clone)]
pub struct TimeFunction(Arc<Node>);

enum Node {
    Const(f64),
    Time,
    Add(TimeFunction, TimeFunction),
    Mul(TimeFunction, TimeFunction),
    Sin(TimeFunction),
    Cos(TimeFunction),
    Exp(TimeFunction),
    Pow(TimeFunction, f64),
    Integral(TimeFunction),
}

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: u32 = 48;

impl TimeFunction {
    fn node(n: Node) -> Self {
        Self(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn t() -> Self {
        Self::node(Node::Time)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn sin(&self) -> Self {
        match self.as_constant() {
            Some(c) => Self::constant(c.sin()),
            None => Self::node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.as_constant() {
            Some(c) => Self::constant(c.cos()),
            None => Self::node(Node::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Self {
        match self.as_constant() {
            Some(c) => Self::constant(c.exp()),
            None => Self::node(Node::Exp(self.clone())),
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        if p == 0.0 {
            return Self::one();
        }
        if p == 1.0 {
            return self.clone();
        }
        match self.as_constant() {
            Some(c) => Self::constant(c.powf(p)),
            None => Self::node(Node::Pow(self.clone(), p)),
        }
    }

    pub fn square(&self) -> Self {
        self.powf(2.0)
    }

    pub fn recip(&self) -> Self {
        self.powf(-1.0)
    }

    /// `∫₀ᵗ self(s) ds`.
    pub fn integral(&self) -> Self {
        match self.as_constant() {
            Some(c) => Self::constant(c) * Self::t(),
            None => Self::node(Node::Integral(self.clone())),
        }
    }

    pub fn sinh(&self) -> Self {
        (self.exp() - (-self).exp()) * 0.5
    }

    pub fn cosh(&self) -> Self {
        (self.exp() + (-self).exp()) * 0.5
    }

    pub fn tanh(&self) -> Self {
        self.sinh() / self.cosh()
    }

    pub fn sech(&self) -> Self {
        self.cosh().recip()
    }

    pub fn tan(&self) -> Self {
        self.sin() / self.cos()
    }

    pub fn sec(&self) -> Self {
        self.cos().recip()
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &*self.0 {
            Node::Const(c) => *c,
            Node::Time => t,
            Node::Add(a, b) => a.eval(t) + b.eval(t),
            Node::Mul(a, b) => a.eval(t) * b.eval(t),
            Node::Sin(a) => a.eval(t).sin(),
            Node::Cos(a) => a.eval(t).cos(),
            Node::Exp(a) => a.eval(t).exp(),
            Node::Pow(a, p) => {
                let x = a.eval(t);
                if p.fract() == 0.0 && p.abs() < 64.0 {
                    x.powi(*p as i32)
                } else {
                    x.powf(*p)
                }
            }
            Node::Integral(f) => adaptive_simpson(|s| f.eval(s), 0.0, t),
        }
    }

    pub fn derivative(&self) -> Self {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Time => Self::one(),
            Node::Add(a, b) => a.derivative() + b.derivative(),
            Node::Mul(a, b) => a.derivative() * b.clone() + a.clone() * b.derivative(),
            Node::Sin(a) => a.cos() * a.derivative(),
            Node::Cos(a) => -(a.sin() * a.derivative()),
            Node::Exp(a) => self.clone() * a.derivative(),
            Node::Pow(a, p) => a.powf(p - 1.0) * *p * a.derivative(),
            Node::Integral(f) => f.clone(),
        }
    }
}

fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, SIMPSON_TOL, SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

impl From<f64> for TimeFunction {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

fn add(a: &TimeFunction, b: &TimeFunction) -> TimeFunction {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => TimeFunction::constant(x + y),
        (Some(x), _) if x == 0.0 => b.clone(),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => TimeFunction::node(Node::Add(a.clone(), b.clone())),
    }
}

fn mul(a: &TimeFunction, b: &TimeFunction) -> TimeFunction {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => TimeFunction::constant(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => TimeFunction::zero(),
        (Some(x), _) if x == 1.0 => b.clone(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        // keep constants on the left so folding can see them
        (None, Some(_)) => TimeFunction::node(Node::Mul(b.clone(), a.clone())),
        _ => TimeFunction::node(Node::Mul(a.clone(), b.clone())),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<TimeFunction> for TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: TimeFunction) -> TimeFunction {
                $body(&self, &rhs)
            }
        }
        impl $tr<&TimeFunction> for TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: &TimeFunction) -> TimeFunction {
                $body(&self, rhs)
            }
        }
        impl $tr<&TimeFunction> for &TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: &TimeFunction) -> TimeFunction {
                $body(self, rhs)
            }
        }
        impl $tr<TimeFunction> for &TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: TimeFunction) -> TimeFunction {
                $body(self, &rhs)
            }
        }
        impl $tr<f64> for TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: f64) -> TimeFunction {
                $body(&self, &TimeFunction::constant(rhs))
            }
        }
        impl $tr<f64> for &TimeFunction {
            type Output = TimeFunction;
            fn $m(self, rhs: f64) -> TimeFunction {
                $body(self, &TimeFunction::constant(rhs))
            }
        }
        impl $tr<TimeFunction> for f64 {
            type Output = TimeFunction;
            fn $m(self, rhs: TimeFunction) -> TimeFunction {
                $body(&TimeFunction::constant(self), &rhs)
            }
        }
        impl $tr<&TimeFunction> for f64 {
            type Output = TimeFunction;
            fn $m(self, rhs: &TimeFunction) -> TimeFunction {
                $body(&TimeFunction::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Mul, mul, mul);
binop!(Sub, sub, |a: &TimeFunction, b: &TimeFunction| add(a, &-b));
binop!(Div, div, |a: &TimeFunction, b: &TimeFunction| mul(a, &b.recip()));

impl Neg for &TimeFunction {
    type Output = TimeFunction;
    fn neg(self) -> TimeFunction {
        mul(&TimeFunction::constant(-1.0), self)
    }
}

impl Neg for TimeFunction {
    type Output = TimeFunction;
    fn neg(self) -> TimeFunction {
        -&self
    }
}

impl fmt::Display for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) if *c < 0.0 => write!(f, "({c})"),
            Node::Const(c) => write!(f, "{c}"),
            Node::Time => write!(f, "t"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Pow(a, p) if *p < 0.0 => write!(f, "({a})^({p})"),
            Node::Pow(a, p) => write!(f, "({a})^{p}"),
            Node::Integral(a) => write!(f, "int[0,t]({a})"),
        }
    }
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeFunction({self})")
    }
}
