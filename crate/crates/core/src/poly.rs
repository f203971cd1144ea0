//! Exact multivariate polynomials over rational or complex-rational scalars.
//!
//! A [`Poly`] lives in a [`Ring`]: an ordered list of variable names plus a
//! field mode. Terms are kept in a `BTreeMap` keyed by exponent vector with
//! zero coefficients dropped, so structural equality is semantic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Arc<Vec<String>>,
    field: Field,
}

impl Ring {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, field: Field) -> Self {
        Ring { vars: Arc::new(vars.into_iter().map(Into::into).collect()), field }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn with_field(&self, field: Field) -> Ring {
        Ring { vars: self.vars.clone(), field }
    }

    /// Same variables followed by `extra`.
    pub fn extended<S: Into<String>>(&self, extra: impl IntoIterator<Item = S>) -> Ring {
        let mut vars = (*self.vars).clone();
        vars.extend(extra.into_iter().map(Into::into));
        Ring { vars: Arc::new(vars), field: self.field }
    }

    fn same_vars(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    fn check_vars(&self, other: &Ring) -> Result<()> {
        if self.same_vars(other) {
            Ok(())
        } else {
            Err(Error::VarMismatch { left: self.vars.to_vec(), right: other.vars.to_vec() })
        }
    }

    /// Errors unless both rings have the same variables and field mode.
    pub fn check_compatible(&self, other: &Ring) -> Result<()> {
        self.check_vars(other)?;
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Exponent, Scalar>,
}

// Equality is semantic: same variables and same terms. The field tag is a
// mode, not part of the value, so a real polynomial equals its complex copy.
impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        self.ring.same_vars(&other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.vars.hash(state);
        self.terms.hash(state);
    }
}

impl Poly {
    pub fn zero(ring: &Ring) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Ring, c: Scalar) -> Self {
        let mut p = Poly::zero(ring).promoted_for(&c);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.nvars()], c);
        }
        p
    }

    pub fn one(ring: &Ring) -> Self {
        Poly::constant(ring, Scalar::one())
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let i = ring.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Poly::var_index(ring, i))
    }

    pub fn var_index(ring: &Ring, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Poly::monomial(ring, e, Scalar::one())
    }

    pub fn monomial(ring: &Ring, exp: Exponent, c: Scalar) -> Self {
        assert_eq!(exp.len(), ring.nvars(), "exponent length must match the variable count");
        let mut p = Poly::zero(ring).promoted_for(&c);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, summing repeats.
    /// Fails in real mode if a coefficient has a nonzero imaginary part.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Exponent, Scalar)>) -> Result<Self> {
        let mut p = Poly::zero(ring);
        for (e, c) in terms {
            if e.len() != ring.nvars() {
                return Err(Error::Dimension(format!(
                    "exponent of length {} over {} variables",
                    e.len(),
                    ring.nvars()
                )));
            }
            if ring.field() == Field::Real && !c.is_real() {
                return Err(Error::NotReal);
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    fn promoted_for(mut self, c: &Scalar) -> Self {
        if !c.is_real() {
            self.ring = self.ring.with_field(Field::Complex);
        }
        self
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if !c.is_real() && self.ring.field == Field::Real {
            self.ring = self.ring.with_field(Field::Complex);
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        self.ring.vars()
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.ring.nvars()])
    }

    /// `p - p(0)`.
    pub fn without_constant(&self) -> Poly {
        let mut p = self.clone();
        p.terms.remove(&vec![0; self.ring.nvars()]);
        p
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Whether every coefficient is real (regardless of field tag).
    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    /// Re-tags the field mode. Demotion to real fails on a non-real coefficient.
    pub fn with_field(&self, field: Field) -> Result<Poly> {
        if field == Field::Real && !self.has_real_coefficients() {
            return Err(Error::NotReal);
        }
        Ok(Poly { ring: self.ring.with_field(field), terms: self.terms.clone() })
    }

    pub fn to_complex(&self) -> Poly {
        Poly { ring: self.ring.with_field(Field::Complex), terms: self.terms.clone() }
    }

    /// Checked ring addition (same variables and field mode required).
    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_compatible(&other.ring)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_compatible(&other.ring)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_compatible(&other.ring)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        let mut out = Poly::zero(&self.ring).promoted_for(c);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(&self.ring).with_field(self.field()).unwrap();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Poly> {
        let i = self.ring.index_of(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(self.partial_index(i))
    }

    pub fn partial_index(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.terms.insert(d, c * &Scalar::from_int(e[i] as i64));
        }
        out
    }

    /// Composition: every variable of `self` is replaced by its image; all
    /// images must live over one target variable list.
    pub fn substitute(&self, assignment: &BTreeMap<String, Poly>) -> Result<Poly> {
        let mut images = Vec::with_capacity(self.ring.nvars());
        for v in self.vars() {
            images.push(assignment.get(v).ok_or_else(|| Error::MissingImage(v.clone()))?);
        }
        self.substitute_images(&images)
    }

    /// Positional form of [`Poly::substitute`]: `images[i]` replaces variable `i`.
    pub fn substitute_images(&self, images: &[&Poly]) -> Result<Poly> {
        if images.len() != self.ring.nvars() {
            return Err(Error::Dimension(format!(
                "{} images for {} variables",
                images.len(),
                self.ring.nvars()
            )));
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => {
                // A polynomial in no variables is a constant.
                return Ok(self.clone());
            }
        };
        for p in images {
            target.check_vars(&p.ring).map_err(|_| {
                Error::Dimension("substitution images use different variable lists".into())
            })?;
        }
        let field = images.iter().fold(self.field(), |f, p| f.join(p.field()));
        let target = target.with_field(field);

        // Powers of each image, computed up to the largest exponent needed.
        let mut max_exp = vec![0u32; self.ring.nvars()];
        for e in self.terms.keys() {
            for (m, &k) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        let powers: Vec<Vec<Poly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(p, &k)| {
                let mut v = vec![Poly::one(&target)];
                for _ in 0..k {
                    let next = v.last().unwrap() * *p;
                    v.push(next);
                }
                v
            })
            .collect();

        let mut out = Poly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Rewrites the polynomial over `target`, which must contain every variable
    /// of `self` (matched by name).
    pub fn lift(&self, target: &Ring) -> Result<Poly> {
        let map: Vec<usize> = self
            .vars()
            .iter()
            .map(|v| target.index_of(v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<_>>()?;
        let mut out = Poly::zero(&target.with_field(target.field().join(self.field())));
        for (e, c) in &self.terms {
            let mut t = vec![0; target.nvars()];
            for (i, &k) in e.iter().enumerate() {
                t[map[i]] += k;
            }
            out.add_term(t, c);
        }
        Ok(out)
    }

    /// Inverse of [`Poly::lift`]: rewrites over `target`, a sub-list of the
    /// variables. Fails if a dropped variable occurs in some term.
    pub fn restrict(&self, target: &Ring) -> Result<Poly> {
        let map: Vec<Option<usize>> = self.vars().iter().map(|v| target.index_of(v)).collect();
        let mut out = Poly::zero(&target.with_field(target.field().join(self.field())));
        for (e, c) in &self.terms {
            let mut t = vec![0; target.nvars()];
            for (i, &k) in e.iter().enumerate() {
                match map[i] {
                    Some(j) => t[j] += k,
                    None if k == 0 => {}
                    None => return Err(Error::UnknownVariable(self.vars()[i].clone())),
                }
            }
            out.add_term(t, c);
        }
        Ok(out)
    }

    /// Coefficients with respect to variable `var`: `self = sum_k out[k] * var^k`,
    /// each `out[k]` over the remaining variables.
    pub fn split_var(&self, var: &str) -> Result<Vec<Poly>> {
        let i = self.ring.index_of(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let rest: Vec<String> =
            self.vars().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
        let ring = Ring::new(rest, self.field());
        let mut out: Vec<Poly> = Vec::new();
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            while out.len() <= k {
                out.push(Poly::zero(&ring));
            }
            let mut r = e.clone();
            r.remove(i);
            out[k].add_term(r, c);
        }
        Ok(out)
    }

    /// Coefficientwise complex conjugation; variables stand for real quantities.
    pub fn conjugate(&self) -> Result<Poly> {
        if self.field() != Field::Complex {
            return Err(Error::RequiresComplex);
        }
        Ok(self.map_coeffs(|c| c.conj(), Field::Complex))
    }

    /// Real parts of the coefficients, as a real-mode polynomial.
    pub fn re_part(&self) -> Poly {
        self.map_coeffs(Scalar::re_part, Field::Real)
    }

    /// Imaginary parts of the coefficients, as a real-mode polynomial.
    pub fn im_part(&self) -> Poly {
        self.map_coeffs(Scalar::im_part, Field::Real)
    }

    fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar, field: Field) -> Poly {
        let mut out = Poly::zero(&self.ring.with_field(field));
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    /// Variables (by index) that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.nvars()];
        for e in self.terms.keys() {
            for (u, &k) in used.iter_mut().zip(e) {
                *u |= k > 0;
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }
}

fn combine(a: &Poly, b: &Poly, sign: i64) -> Poly {
    assert!(a.ring.same_vars(&b.ring), "polynomials over different variable lists");
    let mut out = a.clone();
    out.ring = out.ring.with_field(a.field().join(b.field()));
    let s = Scalar::from_int(sign);
    for (e, c) in &b.terms {
        if sign == 1 {
            out.add_term(e.clone(), c);
        } else {
            out.add_term(e.clone(), &(c * &s));
        }
    }
    out
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        combine(self, rhs, 1)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        combine(self, rhs, -1)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert!(self.ring.same_vars(&rhs.ring), "polynomials over different variable lists");
        let ring = self.ring.with_field(self.field().join(rhs.field()));
        let mut out = Poly::zero(&ring);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// Checked `{add|sub|mul}` on two polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(p: &Poly, q: &Poly, op: ArithOp) -> Result<Poly> {
    match op {
        ArithOp::Add => p.try_add(q),
        ArithOp::Sub => p.try_sub(q),
        ArithOp::Mul => p.try_mul(q),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars()[i].clone() } else { format!("{}^{}", self.vars()[i], k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", c, mono.join("*"))?;
            }
        }
        Ok(())
    }
}
