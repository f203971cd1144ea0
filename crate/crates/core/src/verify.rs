//! Randomized invariant suites with a fixed seed. Each property draws from its
//! own RNG stream (seed mixed with the property index), so adding trials to
//! one property never changes another.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{
    build_matrices, decompose_by_eigenvalue, embed, extend_nilpotent, general_solution, nilpotent_system,
    psi_bell, psi_multinomial, reconstruct_star_series, EigenBlocks, JordanSpecC,
};
use crate::error::{Error, Result};
use crate::form::{gradient, integrate_exact, is_closed};
use crate::matrix::Matrix;
use crate::poly::{Poly, Ring};
use crate::random::{random_coeff_table, random_phis, random_poly, rng_from_seed, small_scalar};
use crate::real::{
    basis_matrix, direct_real_solution, extend_real, n_power_formula, normalize_real, pull_back, real_general_solution,
    reconstruct_real, JordanSpecR,
};
use crate::scalar::{Field, Scalar};
use crate::star::{check_solution, star_power, star_product, star_product_companion, Modulus, MuPoly, StarSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Cr,
    Complex,
    Real,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "cr" => Ok(Suite::Cr),
            "complex" => Ok(Suite::Complex),
            "real" => Ok(Suite::Real),
            other => Err(Error::Parse(format!("unknown suite `{other}` (expected cr, complex or real)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cr => "cr",
            Suite::Complex => "complex",
            Suite::Real => "real",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<()>;

fn fail(msg: impl Into<String>) -> Result<()> {
    Err(Error::Verification(msg.into()))
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        fail(msg)
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Vec<PropertyReport> {
    let props: &[(&'static str, Check)] = match suite {
        Suite::Cr => CR_PROPS,
        Suite::Complex => COMPLEX_PROPS,
        Suite::Real => REAL_PROPS,
    };
    props
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = rng_from_seed(seed ^ ((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let mut failures = 0;
            let mut first_failure = None;
            for _ in 0..trials {
                if let Err(e) = check(&mut rng) {
                    failures += 1;
                    first_failure.get_or_insert_with(|| e.to_string());
                }
            }
            PropertyReport { name, trials, failures, first_failure }
        })
        .collect()
}

// ---------- Cauchy-Riemann ----------

const CR_PROPS: &[(&str, Check)] = &[
    ("cr_product_formula", cr_product_formula),
    ("cr_power_matches_complex_power", cr_power),
    ("companion_equivalence", companion_equivalence),
    ("commutative_associative_bilinear", ring_laws),
    ("remainder_law", remainder_law),
    ("cr_star_closure", cr_closure),
];

fn cr_ring() -> Ring {
    Ring::new(["x", "y"], Field::Real)
}

fn cr_modulus() -> Modulus {
    Modulus::one_plus_mu_sq_pow(1).expect("degree 2")
}

/// A holomorphic polynomial split into `(Re, Im)` over `x, y`.
fn random_holomorphic(rng: &mut ChaCha8Rng) -> MuPoly {
    let ring = cr_ring();
    let z = &Poly::var_index(&ring.with_field(Field::Complex), 0)
        + &Poly::var_index(&ring.with_field(Field::Complex), 1).scale(&Scalar::i());
    let deg = rng.gen_range(0..=4);
    let mut p = Poly::zero(&ring.with_field(Field::Complex));
    for k in 0..=deg {
        if rng.gen_bool(0.7) {
            p = &p + &z.pow(k).scale(&small_scalar(rng, true));
        }
    }
    MuPoly::new(&ring, vec![p.re_part(), p.im_part()]).expect("same ring")
}

fn cr_product_formula(rng: &mut ChaCha8Rng) -> Result<()> {
    let v = random_holomorphic(rng);
    let w = random_holomorphic(rng);
    let p = star_product(&v, &w, &cr_modulus())?;
    let (f, g) = (&v.coeffs()[0], &v.coeffs()[1]);
    let (ft, gt) = (&w.coeffs()[0], &w.coeffs()[1]);
    ensure(p.coeffs()[0] == &(f * ft) - &(g * gt), "real part differs")?;
    ensure(p.coeffs()[1] == &(f * gt) + &(g * ft), "imaginary part differs")
}

fn cr_power(rng: &mut ChaCha8Rng) -> Result<()> {
    let ring = cr_ring();
    let k = rng.gen_range(0..=8);
    let v = MuPoly::new(&ring, vec![Poly::var_index(&ring, 0), Poly::var_index(&ring, 1)])?;
    let p = star_power(&v, k, &cr_modulus())?;
    let cring = ring.with_field(Field::Complex);
    let z = (&Poly::var_index(&cring, 0) + &Poly::var_index(&cring, 1).scale(&Scalar::i())).pow(k);
    ensure(p.coeffs()[0] == z.re_part() && p.coeffs()[1] == z.im_part(), "power differs from (x+iy)^k")
}

fn random_mupoly(rng: &mut ChaCha8Rng, ring: &Ring, m: usize) -> MuPoly {
    MuPoly::new(ring, (0..m).map(|_| random_poly(rng, ring, 3, 3)).collect()).expect("same ring")
}

fn random_modulus(rng: &mut ChaCha8Rng) -> Modulus {
    let m = rng.gen_range(1..=4);
    Modulus::new((0..m).map(|_| if rng.gen_bool(0.5) { Scalar::zero() } else { small_scalar(rng, false) }).collect())
        .expect("m ≥ 1")
}

fn companion_equivalence(rng: &mut ChaCha8Rng) -> Result<()> {
    let z = random_modulus(rng);
    let ring = Ring::new(["a", "b"], Field::Real);
    let v = random_mupoly(rng, &ring, z.degree());
    let w = random_mupoly(rng, &ring, z.degree());
    ensure(star_product(&v, &w, &z)? == star_product_companion(&v, &w, &z)?, "companion path differs")
}

fn ring_laws(rng: &mut ChaCha8Rng) -> Result<()> {
    let z = random_modulus(rng);
    let ring = Ring::new(["a", "b"], Field::Real);
    let (u, v, w) = (random_mupoly(rng, &ring, z.degree()), random_mupoly(rng, &ring, z.degree()), random_mupoly(rng, &ring, z.degree()));
    ensure(star_product(&u, &v, &z)? == star_product(&v, &u, &z)?, "not commutative")?;
    let left = star_product(&star_product(&u, &v, &z)?, &w, &z)?;
    let right = star_product(&u, &star_product(&v, &w, &z)?, &z)?;
    ensure(left == right, "not associative")?;
    let c = small_rational_scalar(rng);
    let lhs = star_product(&u.scale(&c).add(&v)?, &w, &z)?;
    let rhs = star_product(&u, &w, &z)?.scale(&c).add(&star_product(&v, &w, &z)?)?;
    ensure(lhs == rhs, "not bilinear")
}

fn small_rational_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    small_scalar(rng, false)
}

fn remainder_law(rng: &mut ChaCha8Rng) -> Result<()> {
    let z = random_modulus(rng);
    let ring = Ring::new(["a", "b"], Field::Real);
    let v = random_mupoly(rng, &ring, z.degree());
    let w = random_mupoly(rng, &ring, z.degree());
    let mut diff = v.full_product(&w);
    for (slot, c) in star_product(&v, &w, &z)?.coeffs().iter().enumerate() {
        diff[slot] = &diff[slot] - c;
    }
    ensure(crate::star::reduce_mod(&ring, &diff, &z)?.is_zero(), "difference not divisible by Z")
}

fn cr_closure(rng: &mut ChaCha8Rng) -> Result<()> {
    let x = Matrix::from_rows(vec![vec![Scalar::zero(), Scalar::from_int(-1)], vec![Scalar::one(), Scalar::zero()]])?;
    let sys = StarSystem::new(x, cr_modulus(), &cr_ring())?;
    let v = random_holomorphic(rng);
    let w = random_holomorphic(rng);
    ensure(check_solution(&sys, &v)?.is_solution, "factor is not a solution")?;
    ensure(check_solution(&sys, &star_product(&v, &w, &cr_modulus())?)?.is_solution, "product is not a solution")
}

// ---------- complex ----------

const COMPLEX_PROPS: &[(&str, Check)] = &[
    ("general_solution_verifies", general_solution_verifies),
    ("reconstruction_top_coefficients", reconstruction_top),
    ("reconstruction_matches_extension", reconstruction_vs_extension),
    ("psi_bell_equals_multinomial", psi_agreement),
    ("nilpotent_star_closure", nilpotent_closure),
    ("embedding_preserves_solutions", embedding_property),
    ("decomposition_sums_back", decomposition_roundtrip),
    ("integration_oracle", integration_oracle),
];

/// Up to three weakly decreasing blocks with total size at most `max_total`.
pub fn random_sizes<R: Rng>(rng: &mut R, max_blocks: usize, max_total: usize) -> Vec<usize> {
    loop {
        let count = rng.gen_range(1..=max_blocks);
        let mut sizes: Vec<usize> = (0..count).map(|_| rng.gen_range(1..=4)).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if sizes.iter().sum::<usize>() <= max_total {
            return sizes;
        }
    }
}

fn random_single_spec(rng: &mut ChaCha8Rng) -> JordanSpecC {
    let lambda = if rng.gen_bool(0.3) { Scalar::zero() } else { small_scalar(rng, true) };
    JordanSpecC::single(lambda, random_sizes(rng, 3, 8)).expect("valid sizes")
}

fn random_general(rng: &mut ChaCha8Rng) -> Result<(JordanSpecC, crate::complex::GenFuncSet)> {
    let spec = random_single_spec(rng);
    let phis = random_phis(rng, &spec.eigenvalues()[0], 3, 5, Field::Complex);
    Ok((spec, phis))
}

fn general_solution_verifies(rng: &mut ChaCha8Rng) -> Result<()> {
    let (spec, phis) = random_general(rng)?;
    general_solution(&spec, &phis).map(|_| ())
}

fn reconstruction_top(rng: &mut ChaCha8Rng) -> Result<()> {
    let (spec, phis) = random_general(rng)?;
    let sol = general_solution(&spec, &phis)?;
    let v = reconstruct_star_series(&spec, &phis)?;
    let n1 = spec.eigenvalues()[0].n1();
    ensure(v.coeffs()[n1] == sol.g, "top coefficient differs from g")?;
    if n1 >= 1 {
        ensure(&v.coeffs()[n1 - 1] == sol.h.as_ref().expect("h set"), "coefficient n1-1 differs from h")?;
    }
    ensure(check_solution(&nilpotent_system(&spec)?, &v)?.is_solution, "series is not a solution")
}

fn reconstruction_vs_extension(rng: &mut ChaCha8Rng) -> Result<()> {
    let (spec, phis) = random_general(rng)?;
    let sol = general_solution(&spec, &phis)?;
    let v = reconstruct_star_series(&spec, &phis)?;
    let u = build_matrices(&spec).u;
    let ext = extend_nilpotent(&u, sol.h.as_ref().expect("h set"), &sol.g)?;
    ensure(v.without_constants() == ext.without_constants(), "differs from the extension beyond constants")
}

fn psi_agreement(rng: &mut ChaCha8Rng) -> Result<()> {
    let n = rng.gen_range(0..=4usize);
    let ring = Ring::new((0..=n).map(|j| format!("x{j}")), Field::Real);
    let vars: Vec<usize> = (0..=n).collect();
    let i = rng.gen_range(0..=6);
    let j = rng.gen_range(0..=n as u32);
    ensure(psi_multinomial(&ring, &vars, i, j) == psi_bell(&ring, &vars, i, j), "Bell route differs")
}

fn nilpotent_closure(rng: &mut ChaCha8Rng) -> Result<()> {
    let spec = random_single_spec(rng);
    let e = &spec.eigenvalues()[0];
    let sys = nilpotent_system(&spec)?;
    let mut vs = Vec::new();
    for _ in 0..2 {
        let phis = random_phis(rng, e, 2, 3, Field::Complex);
        vs.push(reconstruct_star_series(&spec, &phis)?);
    }
    let z = sys.modulus().clone();
    ensure(check_solution(&sys, &star_product(&vs[0], &vs[1], &z)?)?.is_solution, "product is not a solution")
}

fn embedding_property(rng: &mut ChaCha8Rng) -> Result<()> {
    let mut sizes = random_sizes(rng, 3, 8);
    if sizes.len() < 2 {
        sizes.push(1);
    }
    let full = JordanSpecC::single(Scalar::zero(), sizes.clone())?;
    // Subsystem made of blocks 2.., renamed onto the full spec's variables.
    let sub = JordanSpecC::single(Scalar::zero(), sizes[1..].to_vec())?;
    let sub_phis = random_phis(rng, &sub.eigenvalues()[0], 2, 3, Field::Complex);
    let v = reconstruct_star_series(&sub, &sub_phis)?;
    let rename: Vec<String> = full.var_names()[sizes[0]..].to_vec();
    let renamed_ring = Ring::new(rename, v.ring().field());
    let coeffs = v
        .coeffs()
        .iter()
        .map(|c| {
            let mut p = Poly::zero(&renamed_ring);
            for (e, s) in c.terms() {
                p = &p + &Poly::monomial(&renamed_ring, e.clone(), s.clone());
            }
            p
        })
        .collect();
    let v = MuPoly::new(&renamed_ring, coeffs)?;
    let target = nilpotent_system(&full)?;
    let w = embed(&v, sizes[0] - sizes[1], &target)?;
    ensure(check_solution(&target, &w)?.is_solution, "embedded vector is not a solution")
}

fn decomposition_roundtrip(rng: &mut ChaCha8Rng) -> Result<()> {
    let l1 = small_scalar(rng, true);
    let mut l2 = small_scalar(rng, true);
    while l2 == l1 {
        l2 = small_scalar(rng, true);
    }
    let e1 = EigenBlocks { lambda: l1, sizes: random_sizes(rng, 2, 4) };
    let e2 = EigenBlocks { lambda: l2, sizes: random_sizes(rng, 2, 4) };
    let full = JordanSpecC::new(vec![e1.clone(), e2.clone()])?;
    let ring = full.ring();
    let mut f = Poly::zero(&ring);
    let mut g = Poly::zero(&ring);
    let mut parts = Vec::new();
    for (k, e) in [e1, e2].into_iter().enumerate() {
        let single = JordanSpecC::new(vec![e.clone()])?;
        let sol = general_solution(&single, &random_phis(rng, &e, 2, 3, Field::Complex))?;
        let sub = full.eigen_ring(k);
        let rename = |p: &Poly| -> Poly {
            let mut out = Poly::zero(&sub);
            for (ex, c) in p.terms() {
                out = &out + &Poly::monomial(&sub, ex.clone(), c.clone());
            }
            out
        };
        let (fk, gk) = (rename(&sol.f), rename(&sol.g));
        f = &f + &fk.lift(&ring)?;
        g = &g + &gk.lift(&ring)?;
        parts.push((fk, gk));
    }
    let out = decompose_by_eigenvalue(&full, &f, &g)?;
    for (k, ((fk, gk), got)) in parts.iter().zip(&out).enumerate() {
        // Constant terms cannot be attributed to an eigenvalue; they land in the first component.
        let same = got.f.without_constant() == fk.without_constant() && got.g.without_constant() == gk.without_constant();
        ensure(same, &format!("component {k} differs"))?;
    }
    Ok(())
}

fn integration_oracle(rng: &mut ChaCha8Rng) -> Result<()> {
    let n = rng.gen_range(1..=6);
    let ring = Ring::new((0..n).map(|i| format!("x{i}")), Field::Complex);
    let p = random_poly(rng, &ring, 6, 6);
    let omega = gradient(&p);
    ensure(is_closed(&omega), "gradient is not closed")?;
    ensure(integrate_exact(&omega)? == p.without_constant(), "integration does not invert the gradient")
}

// ---------- real ----------

const REAL_PROPS: &[(&str, Check)] = &[
    ("basis_conjugation_identity", basis_identity),
    ("n_power_formula", n_power),
    ("extend_real_roundtrip", extend_real_roundtrip),
    ("reconstruct_real_equals_direct", reconstruct_vs_direct),
    ("real_star_closure", real_closure),
    ("normalization_roundtrip", normalization_property),
];

fn basis_identity(rng: &mut ChaCha8Rng) -> Result<()> {
    basis_matrix(rng.gen_range(0..=4)).map(|_| ())
}

fn n_power(rng: &mut ChaCha8Rng) -> Result<()> {
    let n = rng.gen_range(0..=4);
    let a = rng.gen_range(0..=6);
    let nm = basis_matrix(n)?.n_matrix()?;
    ensure(n_power_formula(n, a) == nm.pow(a as u32)?, "closed form differs from the repeated product")
}

fn random_real_spec(rng: &mut ChaCha8Rng) -> JordanSpecR {
    let sizes = match rng.gen_range(0..4) {
        0 => vec![1],
        1 => vec![2],
        2 => vec![3],
        _ => vec![2, 1],
    };
    JordanSpecR::normalized_blocks(sizes).expect("valid")
}

fn random_real_solution(rng: &mut ChaCha8Rng, spec: &JordanSpecR) -> Result<(Poly, Poly)> {
    let phis = random_phis(
        rng,
        &EigenBlocks { lambda: Scalar::i(), sizes: spec.sizes().to_vec() },
        3,
        3,
        Field::Complex,
    );
    real_general_solution(spec, &phis)
}

fn extend_real_roundtrip(rng: &mut ChaCha8Rng) -> Result<()> {
    let spec = random_real_spec(rng);
    let (f, g) = random_real_solution(rng, &spec)?;
    let v = extend_real(&spec, &f, &g)?;
    ensure(v.coeffs()[0] == f && v.coeffs()[v.len() - 1] == g, "designated slots differ")?;
    ensure(check_solution(&spec.system()?, &v)?.is_solution, "extension is not a solution")
}

fn reconstruct_vs_direct(rng: &mut ChaCha8Rng) -> Result<()> {
    let n = rng.gen_range(0..=2);
    let spec = JordanSpecR::normalized_blocks(vec![n + 1])?;
    let table = random_coeff_table(rng, &spec, 3, 4, true);
    let v = reconstruct_real(&table, n, u32::MAX)?;
    let (f, g) = direct_real_solution(&spec, &table)?;
    ensure(v.coeffs()[0] == pull_back(&spec, &f)?, "f differs")?;
    ensure(v.coeffs()[2 * n + 1] == pull_back(&spec, &g)?, "g differs")
}

fn real_closure(rng: &mut ChaCha8Rng) -> Result<()> {
    let spec = random_real_spec(rng);
    let sys = spec.system()?;
    let (f1, g1) = random_real_solution(rng, &spec)?;
    let (f2, g2) = random_real_solution(rng, &spec)?;
    let v = extend_real(&spec, &f1, &g1)?;
    let w = extend_real(&spec, &f2, &g2)?;
    ensure(check_solution(&sys, &star_product(&v, &w, sys.modulus())?)?.is_solution, "product is not a solution")
}

fn normalization_property(rng: &mut ChaCha8Rng) -> Result<()> {
    let sizes = random_real_spec(rng).sizes().to_vec();
    let alpha = small_scalar(rng, false).re().clone();
    let beta = small_scalar(rng, false).re().clone();
    let spec = JordanSpecR::new(alpha, beta, sizes)?;
    let (f, g) = random_real_solution(rng, &spec)?;
    normalize_real(&spec, &f, &g).map(|_| ())
}
