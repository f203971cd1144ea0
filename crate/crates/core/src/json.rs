//! JSON encodings of the library types. Rationals are strings `"p/q"` (reduced,
//! `q > 0`); scalars are `{"re", "im"}` records, though a bare rational string
//! or integer is accepted on input.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::complex::{EigenBlocks, GenFuncSet, JordanSpecC, SolutionPair};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::{Poly, Ring};
use crate::real::{CoeffTable, HypothesisReport, JordanSpecR};
use crate::scalar::{format_rational, parse_rational, Field, Scalar};
use crate::star::{Modulus, MuPoly, SolutionCheck, StarSystem};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing key `{key}`")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().and_then(|n| n.to_usize()).ok_or_else(|| parse_err(format!("{what} must be a non-negative integer")))
}

pub fn rational_to_json(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(parse_err(format!("expected a rational string, got {v}"))),
    }
}

pub fn scalar_to_json(c: &Scalar) -> Value {
    json!({ "re": rational_to_json(c.re()), "im": rational_to_json(c.im()) })
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::Object(_) => {
            let re = rational_from_json(field_of(v, "re")?)?;
            let im = match v.get("im") {
                Some(im) => rational_from_json(im)?,
                None => BigRational::from_integer(0.into()),
            };
            Ok(Scalar::new(re, im))
        }
        _ => rational_from_json(v).map(Scalar::real),
    }
}

fn parse_field(v: &Value) -> Result<Field> {
    match v.as_str() {
        Some("real") => Ok(Field::Real),
        Some("complex") => Ok(Field::Complex),
        _ => Err(parse_err(format!("field must be \"real\" or \"complex\", got {v}"))),
    }
}

fn vars_from_json(v: &Value) -> Result<Vec<String>> {
    let vars: Vec<String> = as_array(field_of(v, "vars")?, "vars")?
        .iter()
        .map(|x| x.as_str().map(str::to_owned).ok_or_else(|| parse_err("variable names must be strings")))
        .collect::<Result<_>>()?;
    let mut sorted = vars.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != vars.len() {
        return Err(parse_err("duplicate variable name"));
    }
    Ok(vars)
}

pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p.terms().map(|(e, c)| json!({ "coeff": scalar_to_json(c), "exp": e })).collect();
    json!({ "vars": p.vars(), "field": p.field().name(), "terms": terms })
}

/// The field is taken from an optional `"field"` key; without it the
/// polynomial is real unless some coefficient has an imaginary part.
pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let vars = vars_from_json(v)?;
    let mut terms = Vec::new();
    for t in as_array(field_of(v, "terms")?, "terms")? {
        let c = scalar_from_json(field_of(t, "coeff")?)?;
        let exp = as_array(field_of(t, "exp")?, "exp")?
            .iter()
            .map(|e| e.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| parse_err("exponents must be small non-negative integers")))
            .collect::<Result<Vec<u32>>>()?;
        terms.push((exp, c));
    }
    let field = match v.get("field") {
        Some(f) => parse_field(f)?,
        None if terms.iter().all(|(_, c)| c.is_real()) => Field::Real,
        None => Field::Complex,
    };
    Poly::from_terms(&Ring::new(vars, field), terms)
}

pub fn mupoly_to_json(v: &MuPoly) -> Value {
    json!({ "m": v.len(), "coeffs": v.coeffs().iter().map(poly_to_json).collect::<Vec<_>>() })
}

pub fn mupoly_from_json(v: &Value) -> Result<MuPoly> {
    let coeffs = as_array(field_of(v, "coeffs")?, "coeffs")?.iter().map(poly_from_json).collect::<Result<Vec<_>>>()?;
    if let Some(m) = v.get("m") {
        if as_usize(m, "m")? != coeffs.len() {
            return Err(parse_err("`m` disagrees with the number of coefficients"));
        }
    }
    let first = coeffs.first().ok_or_else(|| parse_err("a μ-vector needs at least one coefficient"))?;
    let ring = first.ring().clone();
    MuPoly::new(&ring, coeffs)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(scalar_to_json).collect())).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let rows = as_array(v, "matrix")?
        .iter()
        .map(|r| as_array(r, "matrix row")?.iter().map(scalar_from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

/// `Z` is listed low degree first and without the leading one.
pub fn system_to_json(s: &StarSystem) -> Value {
    json!({
        "X": matrix_to_json(s.pencil_base()),
        "Z": s.modulus().coeffs().iter().map(scalar_to_json).collect::<Vec<_>>(),
        "vars": s.ring().vars(),
    })
}

pub fn system_from_json(v: &Value) -> Result<StarSystem> {
    let x = matrix_from_json(field_of(v, "X")?)?;
    let z = as_array(field_of(v, "Z")?, "Z")?.iter().map(scalar_from_json).collect::<Result<Vec<_>>>()?;
    let vars = vars_from_json(v)?;
    StarSystem::new(x, Modulus::new(z)?, &Ring::new(vars, Field::Real))
}

pub fn check_to_json(c: &SolutionCheck) -> Value {
    let forms = |fs: &[crate::form::OneForm]| -> Vec<Value> {
        fs.iter().map(|f| Value::Array(f.components().iter().map(poly_to_json).collect())).collect()
    };
    json!({ "is_solution": c.is_solution, "quotient": forms(&c.quotient), "remainder": forms(&c.remainder) })
}

pub enum JordanSpec {
    Complex(JordanSpecC),
    Real(JordanSpecR),
}

pub fn spec_from_json(v: &Value) -> Result<JordanSpec> {
    let sizes = |b: &Value| -> Result<Vec<usize>> { as_array(b, "blocks")?.iter().map(|x| as_usize(x, "block size")).collect() };
    match parse_field(field_of(v, "field")?)? {
        Field::Complex => {
            let eigenvalues = as_array(field_of(v, "eigenvalues")?, "eigenvalues")?
                .iter()
                .map(|e| Ok(EigenBlocks { lambda: scalar_from_json(field_of(e, "lambda")?)?, sizes: sizes(field_of(e, "blocks")?)? }))
                .collect::<Result<Vec<_>>>()?;
            Ok(JordanSpec::Complex(JordanSpecC::new(eigenvalues)?))
        }
        Field::Real => {
            let alpha = rational_from_json(field_of(v, "alpha")?)?;
            let beta = rational_from_json(field_of(v, "beta")?)?;
            Ok(JordanSpec::Real(JordanSpecR::new(alpha, beta, sizes(field_of(v, "blocks")?)?)?))
        }
    }
}

pub fn spec_to_json(spec: &JordanSpec) -> Value {
    match spec {
        JordanSpec::Complex(s) => json!({
            "field": "complex",
            "eigenvalues": s.eigenvalues().iter()
                .map(|e| json!({ "lambda": scalar_to_json(&e.lambda), "blocks": e.sizes }))
                .collect::<Vec<_>>(),
        }),
        JordanSpec::Real(s) => json!({
            "field": "real",
            "alpha": rational_to_json(s.alpha()),
            "beta": rational_to_json(s.beta()),
            "blocks": s.sizes(),
        }),
    }
}

pub fn phis_to_json(phis: &GenFuncSet) -> Value {
    Value::Array(phis.phis.iter().map(poly_to_json).collect())
}

pub fn phis_from_json(v: &Value) -> Result<GenFuncSet> {
    Ok(GenFuncSet::new(as_array(v, "function set")?.iter().map(poly_from_json).collect::<Result<_>>()?))
}

pub fn pair_to_json(p: &SolutionPair) -> Value {
    let mut m = Map::new();
    m.insert("f".into(), poly_to_json(&p.f));
    m.insert("g".into(), poly_to_json(&p.g));
    if let Some(h) = &p.h {
        m.insert("h".into(), poly_to_json(h));
    }
    Value::Object(m)
}

/// Keys are `"k,i1,...,ir"` with `k` the 0-based function index and `i` the
/// exponent of each formal variable.
pub fn table_from_json(v: &Value) -> Result<CoeffTable> {
    let obj = v.as_object().ok_or_else(|| parse_err("coefficient table must be an object"))?;
    let mut table = CoeffTable::default();
    for (key, c) in obj {
        let parts = key
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| parse_err(format!("bad coefficient key `{key}`"))))
            .collect::<Result<Vec<u32>>>()?;
        if parts.len() < 2 {
            return Err(parse_err(format!("coefficient key `{key}` needs k and at least one exponent")));
        }
        table.insert(parts[0] as usize, parts[1..].to_vec(), scalar_from_json(c)?);
    }
    Ok(table)
}

pub fn table_to_json(t: &CoeffTable) -> Value {
    let mut m = Map::new();
    for ((k, index), c) in &t.entries {
        let key = std::iter::once(k.to_string()).chain(index.iter().map(u32::to_string)).collect::<Vec<_>>().join(",");
        m.insert(key, scalar_to_json(c));
    }
    Value::Object(m)
}

pub fn report_to_json(r: &HypothesisReport) -> Value {
    let list = |xs: &[Scalar]| xs.iter().map(scalar_to_json).collect::<Vec<_>>();
    json!({
        "agree": r.agree,
        "truncation": r.truncation,
        "basis_size": r.basis_size,
        "unknowns": r.unknowns,
        "equations": r.equations,
        "rank": r.rank,
        "residual": list(&r.residual),
        "certificate": r.certificate.as_deref().map(list),
        "constants": r.constants.as_ref().map(|cs| cs.iter()
            .map(|(i, a)| json!({ "index": i, "a": list(a) }))
            .collect::<Vec<_>>()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_roundtrip() {
        let v: Value = serde_json::from_str(
            r#"{"vars":["x0","x1"],"terms":[{"coeff":{"re":"3/4","im":"0"},"exp":[2,1]},{"coeff":"-2","exp":[0,0]}]}"#,
        )
        .unwrap();
        let p = poly_from_json(&v).unwrap();
        assert_eq!(p.field(), Field::Real);
        assert_eq!(p.num_terms(), 2);
        assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_unreduced_rational() {
        assert!(scalar_from_json(&json!("2/4")).is_err());
        assert!(scalar_from_json(&json!("1/-2")).is_err());
        assert!(scalar_from_json(&json!(1.5)).is_err());
    }

    #[test]
    fn complex_coefficient_promotes() {
        let v = json!({"vars":["x"],"terms":[{"coeff":{"re":"0","im":"1"},"exp":[1]}]});
        assert_eq!(poly_from_json(&v).unwrap().field(), Field::Complex);
        let forced = json!({"vars":["x"],"field":"real","terms":[{"coeff":{"re":"0","im":"1"},"exp":[1]}]});
        assert!(poly_from_json(&forced).is_err());
    }

    #[test]
    fn table_keys() {
        let t = table_from_json(&json!({"0,2": "1", "1,0,3": {"re":"0","im":"2"}})).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(table_from_json(&table_to_json(&t)).unwrap(), t);
        assert!(table_from_json(&json!({"3": "1"})).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let v = json!({"field":"complex","eigenvalues":[{"lambda":{"re":"2","im":"0"},"blocks":[2]},{"lambda":{"re":"0","im":"1"},"blocks":[2,1]}]});
        let s = spec_from_json(&v).unwrap();
        assert_eq!(spec_to_json(&s), v);
        let r = json!({"field":"real","alpha":"0","beta":"1","blocks":[2,1]});
        assert_eq!(spec_to_json(&spec_from_json(&r).unwrap()), r);
    }
}
