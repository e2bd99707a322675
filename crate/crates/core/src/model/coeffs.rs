use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{parse_expr, TimeFunction};
use crate::algebra::{build_generators, Generators, OperatorMatrix, C64};
use crate::error::{Error, Result};

/// Index of a Hamiltonian coefficient μ_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coeff {
    J,
    JJ,
    U,
    V,
    UJ,
    VJ,
    UU,
    VV,
    UV,
}

impl Coeff {
    pub const ALL: [Coeff; 9] = [
        Coeff::J,
        Coeff::JJ,
        Coeff::U,
        Coeff::V,
        Coeff::UJ,
        Coeff::VJ,
        Coeff::UU,
        Coeff::VV,
        Coeff::UV,
    ];

    pub fn json_key(self) -> &'static str {
        match self {
            Coeff::J => "muJ",
            Coeff::JJ => "muJJ",
            Coeff::U => "muU",
            Coeff::V => "muV",
            Coeff::UJ => "muUJ",
            Coeff::VJ => "muVJ",
            Coeff::UU => "muUU",
            Coeff::VV => "muVV",
            Coeff::UV => "muUV",
        }
    }

    pub fn from_json_key(key: &str) -> Option<Coeff> {
        Coeff::ALL.into_iter().find(|c| c.json_key() == key)
    }

    fn slot(self) -> usize {
        self as usize
    }

    fn operator(self, g: &Generators) -> &OperatorMatrix {
        match self {
            Coeff::J => &g.j,
            Coeff::JJ => &g.jj,
            Coeff::U => &g.u,
            Coeff::V => &g.v,
            Coeff::UJ => &g.uj,
            Coeff::VJ => &g.vj,
            Coeff::UU => &g.uu,
            Coeff::VV => &g.vv,
            Coeff::UV => &g.uv,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.json_key())
    }
}

/// A complex coefficient as a pair of real time functions.
#[derive(Clone, Debug)]
pub struct ComplexFunction {
    pub re: TimeFunction,
    pub im: TimeFunction,
}

impl ComplexFunction {
    pub fn new(re: TimeFunction, im: TimeFunction) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::real(TimeFunction::zero())
    }

    pub fn real(re: impl Into<TimeFunction>) -> Self {
        Self { re: re.into(), im: TimeFunction::zero() }
    }

    pub fn imag(im: impl Into<TimeFunction>) -> Self {
        Self { re: TimeFunction::zero(), im: im.into() }
    }

    pub fn at(&self, t: f64) -> C64 {
        C64::new(self.re.eval(t), self.im.eval(t))
    }

    pub fn derivative(&self) -> Self {
        Self { re: self.re.derivative(), im: self.im.derivative() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl From<TimeFunction> for ComplexFunction {
    fn from(re: TimeFunction) -> Self {
        Self::real(re)
    }
}

/// The nine coefficient functions of a Hamiltonian in the E₂ algebra,
/// `μ_JJ J² + μ_J J + μ_u u + μ_v v + μ_uJ uJ + μ_vJ vJ + μ_uu u² + μ_vv v² + μ_uv uv`.
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    entries: [ComplexFunction; 9],
}

impl Default for CoefficientSet {
    fn default() -> Self {
        Self::zero()
    }
}

impl CoefficientSet {
    pub fn zero() -> Self {
        Self { entries: std::array::from_fn(|_| ComplexFunction::zero()) }
    }

    pub fn get(&self, c: Coeff) -> &ComplexFunction {
        &self.entries[c.slot()]
    }

    pub fn set(&mut self, c: Coeff, f: impl Into<ComplexFunction>) {
        self.entries[c.slot()] = f.into();
    }

    pub fn with(mut self, c: Coeff, f: impl Into<ComplexFunction>) -> Self {
        self.set(c, f);
        self
    }

    pub fn values_at(&self, t: f64) -> CoefficientValues {
        CoefficientValues(std::array::from_fn(|k| self.entries[k].at(t)))
    }

    pub fn derivative(&self) -> Self {
        Self { entries: std::array::from_fn(|k| self.entries[k].derivative()) }
    }

    /// Parse the JSON form: an object with all nine keys `muJ`, `muJJ`, ...,
    /// each `{"re": expr, "im": expr}` where `expr` is a string or a number.
    pub fn from_json_str(src: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(src)
            .map_err(|e| Error::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidCoefficients("expected a JSON object".into()))?;
        for key in obj.keys() {
            if Coeff::from_json_key(key).is_none() {
                return Err(Error::InvalidCoefficients(format!("unknown key '{key}'")));
            }
        }
        let mut set = Self::zero();
        for c in Coeff::ALL {
            let entry = obj
                .get(c.json_key())
                .ok_or_else(|| Error::InvalidCoefficients(format!("missing key '{c}'")))?;
            let parts = entry
                .as_object()
                .ok_or_else(|| Error::InvalidCoefficients(format!("'{c}' must be an object with re/im")))?;
            for k in parts.keys() {
                if k != "re" && k != "im" {
                    return Err(Error::InvalidCoefficients(format!("unknown key '{c}.{k}'")));
                }
            }
            let part = |name: &str| -> Result<TimeFunction> {
                match parts.get(name) {
                    None => Ok(TimeFunction::zero()),
                    Some(Value::Number(n)) => Ok(TimeFunction::constant(n.as_f64().unwrap_or(f64::NAN))),
                    Some(Value::String(s)) => parse_expr(s).map_err(|e| match e {
                        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{c}.{name}: {msg}") },
                        other => other,
                    }),
                    Some(_) => Err(Error::InvalidCoefficients(format!("'{c}.{name}' must be a string or number"))),
                }
            };
            set.set(c, ComplexFunction::new(part("re")?, part("im")?));
        }
        Ok(set)
    }

    /// JSON form with expressions printed back as strings.
    pub fn to_json_value(&self) -> Value {
        let map: BTreeMap<&str, Value> = Coeff::ALL
            .iter()
            .map(|&c| {
                let f = self.get(c);
                (c.json_key(), serde_json::json!({ "re": f.re.to_string(), "im": f.im.to_string() }))
            })
            .collect();
        serde_json::to_value(map).unwrap_or(Value::Null)
    }
}

/// Coefficients evaluated at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientValues(pub [C64; 9]);

impl CoefficientValues {
    pub fn get(&self, c: Coeff) -> C64 {
        self.0[c.slot()]
    }

    pub fn set(&mut self, c: Coeff, z: C64) {
        self.0[c.slot()] = z;
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn realize_with(&self, g: &Generators) -> OperatorMatrix {
        let mut data = nalgebra::DMatrix::zeros(g.basis().dim(), g.basis().dim());
        for c in Coeff::ALL {
            let z = self.get(c);
            if z != C64::new(0.0, 0.0) {
                data += c.operator(g).data() * z;
            }
        }
        OperatorMatrix::from_data(g.basis(), data).expect("dimensions match the generators")
    }
}

/// Realize the coefficient set at time `t` on the truncation of order `m`.
pub fn realize(c: &CoefficientSet, t: f64, m: usize) -> Result<OperatorMatrix> {
    if m < 4 {
        return Err(Error::TruncationTooSmall { got: m, min: 4 });
    }
    let g = build_generators(m)?;
    Ok(c.values_at(t).realize_with(&g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realize_matches_generator_sums() {
        let g = build_generators(8).unwrap();
        let set = CoefficientSet::zero().with(Coeff::U, TimeFunction::one());
        assert_eq!(realize(&set, 0.0, 8).unwrap().data(), g.u.data());
        assert_eq!(realize(&CoefficientSet::zero(), 1.0, 8).unwrap().data().norm(), 0.0);

        let (zeta, beta, n) = (0.5, 0.3, 2.3);
        let set = CoefficientSet::zero()
            .with(Coeff::JJ, TimeFunction::constant(4.0))
            .with(Coeff::UJ, ComplexFunction::imag(TimeFunction::constant(2.0 * (1.0 - beta) * zeta)))
            .with(Coeff::VV, TimeFunction::constant(-beta * zeta * zeta))
            .with(Coeff::V, TimeFunction::constant(2.0 * zeta * n));
        let h = realize(&set, 0.0, 8).unwrap();
        let i = C64::new(0.0, 1.0);
        let want = g.jj.data() * C64::from(4.0)
            + g.uj.data() * (i * 2.0 * (1.0 - beta) * zeta)
            - g.vv.data() * C64::from(beta * zeta * zeta)
            + g.v.data() * C64::from(2.0 * zeta * n);
        assert!((h.data() - want).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let src = r#"{"muJ":{"re":"0","im":"0"},"muJJ":{"re":"4","im":0},"muU":{"re":"sin(t)","im":"0"},
            "muV":{"re":"0","im":"0"},"muUJ":{"re":"0","im":"1.5"},"muVJ":{"re":"0","im":"0"},
            "muUU":{"re":"0","im":"0"},"muVV":{"re":"-0.1","im":"0"},"muUV":{"re":"0","im":"0"}}"#;
        let set = CoefficientSet::from_json_str(src).unwrap();
        assert_eq!(set.get(Coeff::UJ).at(0.0), C64::new(0.0, 1.5));
        assert!((set.get(Coeff::U).at(0.5).re - 0.5f64.sin()).abs() < 1e-15);
        let again = CoefficientSet::from_json_value(&set.to_json_value()).unwrap();
        assert_eq!(again.values_at(0.7), set.values_at(0.7));

        let missing = src.replace(r#""muUV":{"re":"0","im":"0"}"#, r#""extra":{"re":"0"}"#);
        assert!(CoefficientSet::from_json_str(&missing).unwrap_err().is_parse());
        let bad_expr = src.replace("sin(t)", "sin(t");
        assert!(matches!(CoefficientSet::from_json_str(&bad_expr), Err(Error::Parse { .. })));
        assert!(CoefficientSet::from_json_str("[1,2]").unwrap_err().is_parse());
    }
}
