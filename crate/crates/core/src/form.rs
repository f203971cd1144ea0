//! Polynomial one-forms: gradients, the closedness test and exact integration
//! of closed forms on a star-shaped neighbourhood of the origin.

use crate::error::{Error, Result};
use crate::poly::{Poly, Ring};
use crate::scalar::{rational, Scalar};

/// A one-form `sum_i components[i] dx_i`, one component per ring variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    components: Vec<Poly>,
}

impl OneForm {
    pub fn new(ring: &Ring, components: Vec<Poly>) -> Result<Self> {
        if components.len() != ring.nvars() {
            return Err(Error::Dimension(format!(
                "{} components over {} variables",
                components.len(),
                ring.nvars()
            )));
        }
        for c in &components {
            if c.vars() != ring.vars() {
                return Err(Error::VarMismatch { left: ring.vars().to_vec(), right: c.vars().to_vec() });
            }
        }
        Ok(OneForm { components })
    }

    pub(crate) fn new_unchecked(components: Vec<Poly>) -> Self {
        OneForm { components }
    }

    pub fn zero(ring: &Ring) -> Self {
        OneForm { components: vec![Poly::zero(ring); ring.nvars()] }
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm { components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        OneForm { components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> OneForm {
        OneForm { components: self.components.iter().map(|p| p.scale(c)).collect() }
    }
}

pub fn gradient(p: &Poly) -> OneForm {
    OneForm { components: (0..p.ring().nvars()).map(|i| p.partial_index(i)).collect() }
}

/// Exact test of `d omega_i / dx_j == d omega_j / dx_i` for all `i < j`.
pub fn is_closed(omega: &OneForm) -> bool {
    first_non_closed_pair(omega).is_none()
}

fn first_non_closed_pair(omega: &OneForm) -> Option<(usize, usize)> {
    let n = omega.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if omega.components[i].partial_index(j) != omega.components[j].partial_index(i) {
                return Some((i, j));
            }
        }
    }
    None
}

/// The unique `P` with `grad P = omega` and `P(0) = 0`.
///
/// Uses the homotopy formula `P = sum_i int_0^1 omega_i(t x) x_i dt`, which on a
/// monomial `c x^a` in component `i` contributes `c / (|a| + 1) * x^a * x_i`.
pub fn integrate_exact(omega: &OneForm) -> Result<Poly> {
    let Some(first) = omega.components.first() else {
        // No variables: only the zero form exists and its potential is 0.
        return Err(Error::Dimension("cannot integrate a form over zero variables".into()));
    };
    if let Some((i, j)) = first_non_closed_pair(omega) {
        let vars = first.vars();
        return Err(Error::NotClosed { i: vars[i].clone(), j: vars[j].clone() });
    }
    let ring = first.ring().clone();
    let mut out = Poly::zero(&ring);
    for (i, comp) in omega.components.iter().enumerate() {
        for (e, c) in comp.terms() {
            let deg: u32 = e.iter().sum();
            let mut raised = e.clone();
            raised[i] += 1;
            let w = Scalar::real(rational(1, deg as i64 + 1));
            out.add_term(raised, &(c * &w));
        }
    }
    Ok(out)
}
