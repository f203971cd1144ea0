//! Seeded random inputs: small rationals, polynomials, arbitrary-function sets
//! and coefficient tables. Everything is driven by a caller-owned RNG so runs
//! are reproducible from a seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{formal_ring, EigenBlocks, GenFuncSet};
use crate::poly::{Poly, Ring};
use crate::real::{CoeffTable, JordanSpecR};
use crate::scalar::{Field, Scalar};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 4`; never zero.
pub fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let p: i64 = rng.gen_range(-5..=5);
        if p != 0 {
            return Scalar::ratio(p, rng.gen_range(1..=4));
        }
    }
}

/// A nonzero scalar; with `complex` set, half of them get an imaginary part.
pub fn small_scalar<R: Rng>(rng: &mut R, complex: bool) -> Scalar {
    let re = small_rational(rng);
    if complex && rng.gen_bool(0.5) {
        let im = small_rational(rng);
        Scalar::new(re.re().clone(), im.re().clone())
    } else {
        re
    }
}

/// Up to `max_terms` random monomials of total degree `≤ max_deg`.
pub fn random_poly<R: Rng>(rng: &mut R, ring: &Ring, max_terms: usize, max_deg: u32) -> Poly {
    let complex = ring.field() == Field::Complex;
    let n = ring.nvars();
    let mut p = Poly::zero(ring);
    let terms = rng.gen_range(0..=max_terms);
    for _ in 0..terms {
        let mut exp = vec![0u32; n];
        if n > 0 {
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                exp[rng.gen_range(0..n)] += 1;
            }
        }
        p = &p + &Poly::monomial(ring, exp, small_scalar(rng, complex));
    }
    p
}

/// `φ_0 … φ_{n_1}` for one eigenvalue, each over `s1 … s{ν_k}`.
pub fn random_phis<R: Rng>(rng: &mut R, e: &EigenBlocks, max_terms: usize, max_deg: u32, field: Field) -> GenFuncSet {
    let phis = (0..e.sizes[0]).map(|k| random_poly(rng, &formal_ring(e.nu(k), field), max_terms, max_deg)).collect();
    GenFuncSet::new(phis)
}

/// Random `c_{k,I}` with `|I| ≤ max_deg` for a real spec; complex entries when
/// `complex` is set.
pub fn random_coeff_table<R: Rng>(rng: &mut R, spec: &JordanSpecR, entries: usize, max_deg: u32, complex: bool) -> CoeffTable {
    let mut table = CoeffTable::default();
    for _ in 0..entries {
        let k = rng.gen_range(0..spec.sizes()[0]);
        let arity = spec.nu(k);
        let mut index = vec![0u32; arity];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            index[rng.gen_range(0..arity)] += 1;
        }
        table.insert(k, index, small_scalar(rng, complex));
    }
    table
}
