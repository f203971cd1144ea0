//! The complex theory of `∇f = M∇g` for `M` in Jordan form: extension of
//! solutions to μ-vectors, embeddings, the general solution generated by
//! arbitrary functions of the major variables, and its reconstruction as a
//! *-power series of simple solutions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::form::{gradient, integrate_exact, OneForm};
use crate::matrix::Matrix;
use crate::poly::{Poly, Ring};
use crate::scalar::{binomial, factorial, Field, Scalar};
use crate::star::{star_power, star_product, Modulus, MuPoly, StarSystem};

/// Jordan blocks for one eigenvalue. `sizes[i] = n_i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenBlocks {
    pub lambda: Scalar,
    pub sizes: Vec<usize>,
}

impl EigenBlocks {
    /// The `n_i`.
    pub fn ns(&self) -> Vec<usize> {
        self.sizes.iter().map(|s| s - 1).collect()
    }

    pub fn n1(&self) -> usize {
        self.sizes[0] - 1
    }

    /// `ν_k`: number of blocks with `n_i ≥ k`.
    pub fn nu(&self, k: usize) -> usize {
        self.sizes.iter().filter(|&&s| s > k).count()
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Complex Jordan specification with canonical variables `x{k}_{b}_{j}`
/// (eigenvalue `k` and block `b` counted from 1, index `j` from 0), ordered
/// eigenvalue-major, then block-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanSpecC {
    eigenvalues: Vec<EigenBlocks>,
}

pub fn var_name(k: usize, b: usize, j: usize) -> String {
    format!("x{k}_{b}_{j}")
}

impl JordanSpecC {
    pub fn new(eigenvalues: Vec<EigenBlocks>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidSpec("no eigenvalues".into()));
        }
        for (k, e) in eigenvalues.iter().enumerate() {
            if e.sizes.is_empty() {
                return Err(Error::InvalidSpec(format!("eigenvalue {} has no blocks", k + 1)));
            }
            if e.sizes.contains(&0) {
                return Err(Error::InvalidSpec("block sizes must be positive".into()));
            }
            if e.sizes.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidSpec("block sizes must be weakly decreasing".into()));
            }
            if eigenvalues[..k].iter().any(|o| o.lambda == e.lambda) {
                return Err(Error::InvalidSpec(format!("eigenvalue {} repeated", e.lambda)));
            }
        }
        Ok(JordanSpecC { eigenvalues })
    }

    pub fn single(lambda: Scalar, sizes: Vec<usize>) -> Result<Self> {
        JordanSpecC::new(vec![EigenBlocks { lambda, sizes }])
    }

    pub fn eigenvalues(&self) -> &[EigenBlocks] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(EigenBlocks::dim).sum()
    }

    pub fn field(&self) -> Field {
        self.eigenvalues.iter().fold(Field::Real, |f, e| f.join(e.lambda.field()))
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        for (k, e) in self.eigenvalues.iter().enumerate() {
            for (b, &size) in e.sizes.iter().enumerate() {
                for j in 0..size {
                    out.push(var_name(k + 1, b + 1, j));
                }
            }
        }
        out
    }

    pub fn ring(&self) -> Ring {
        Ring::new(self.var_names(), self.field())
    }

    /// Offset of the first variable of eigenvalue `k` (0-based) and its count.
    fn eigen_range(&self, k: usize) -> (usize, usize) {
        let start = self.eigenvalues[..k].iter().map(EigenBlocks::dim).sum();
        (start, self.eigenvalues[k].dim())
    }

    /// Ring of the variables belonging to eigenvalue `k` (0-based).
    pub fn eigen_ring(&self, k: usize) -> Ring {
        let (start, len) = self.eigen_range(k);
        Ring::new(self.var_names()[start..start + len].to_vec(), self.eigenvalues[k].lambda.field())
    }

    fn require_single(&self) -> Result<&EigenBlocks> {
        match self.eigenvalues.as_slice() {
            [e] => Ok(e),
            _ => Err(Error::InvalidSpec("operation needs a single-eigenvalue specification".into())),
        }
    }

    /// Indices in [`JordanSpecC::ring`] of block `b` (0-based) of a single-eigenvalue spec.
    fn block_vars(e: &EigenBlocks, b: usize) -> Vec<usize> {
        let start: usize = e.sizes[..b].iter().sum();
        (start..start + e.sizes[b]).collect()
    }
}

/// `M` in Jordan form, its nilpotent part `U = M − λI` (blockwise) and the
/// variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanMatrices {
    pub m: Matrix,
    pub u: Matrix,
    pub var_names: Vec<String>,
}

/// Upper shift `U_n` of size `n + 1`.
pub fn shift_block(size: usize) -> Matrix {
    let mut u = Matrix::zeros(size, size);
    for i in 1..size {
        u[(i - 1, i)] = Scalar::one();
    }
    u
}

pub fn build_matrices(spec: &JordanSpecC) -> JordanMatrices {
    let mut m_blocks = Vec::new();
    let mut u_blocks = Vec::new();
    for e in spec.eigenvalues() {
        for &size in &e.sizes {
            let u = shift_block(size);
            let m = u.add(&Matrix::identity(size).scale(&e.lambda)).expect("same shape");
            m_blocks.push(m);
            u_blocks.push(u);
        }
    }
    JordanMatrices { m: Matrix::block_diag(&m_blocks), u: Matrix::block_diag(&u_blocks), var_names: spec.var_names() }
}

/// `(f, g)` and, when an eigenvalue is in play, `h = f − λg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionPair {
    pub f: Poly,
    pub g: Poly,
    pub h: Option<Poly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `(f, g) ↦ (h, g)` with `h = f − λg`.
    Forward,
    /// `(h, g) ↦ (f, g)` with `f = h + λg`.
    Inverse,
}

/// In the forward direction `first` is `f` and the result's `f` field holds the
/// input with `h` set; in the inverse direction `first` is `h`.
pub fn eigen_shift(first: &Poly, g: &Poly, lambda: &Scalar, direction: ShiftDirection) -> SolutionPair {
    match direction {
        ShiftDirection::Forward => {
            let h = first - &g.scale(lambda);
            SolutionPair { f: first.clone(), g: g.clone(), h: Some(h) }
        }
        ShiftDirection::Inverse => {
            let f = first + &g.scale(lambda);
            SolutionPair { f, g: g.clone(), h: Some(first.clone()) }
        }
    }
}

/// Exact test of `∇f = M∇g`.
pub fn verify_gradient(m: &Matrix, f: &Poly, g: &Poly) -> Result<bool> {
    if f.vars() != g.vars() {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: g.vars().to_vec() });
    }
    let n = f.ring().nvars();
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!("{}x{} matrix over {n} variables", m.rows(), m.cols())));
    }
    if n == 0 {
        return Ok(true);
    }
    let rhs = m.apply_form(&gradient(g))?;
    Ok(gradient(f).sub(&rhs).is_zero())
}

/// `(X = −U, Z = μ^{n_1+1})` over the spec's variables.
pub fn nilpotent_system(spec: &JordanSpecC) -> Result<StarSystem> {
    let e = spec.require_single()?;
    let u = build_matrices(spec).u;
    StarSystem::new(u.neg(), Modulus::mu_power(e.n1() + 1)?, &spec.ring())
}

/// Extends a solution of `∇f = U∇g` to a μ-vector `V` of length `r` (the
/// nilpotency index of `U`) with `V_{r−2} = f`, `V_{r−1} = g` and
/// `∇V_i = U^{r−1−i}∇g`, each `V_i` normalized by `V_i(0) = 0`.
pub fn extend_nilpotent(u: &Matrix, f: &Poly, g: &Poly) -> Result<MuPoly> {
    let r = u.nilpotency_index()?;
    if !verify_gradient(u, f, g)? {
        return Err(Error::NotASolution("∇f ≠ U∇g".into()));
    }
    let ring = f.ring().with_field(f.field().join(g.field()).join(u.field()));
    let grad_g = gradient(g);
    let mut coeffs = vec![Poly::zero(&ring); r];
    coeffs[r - 1] = g.clone();
    if r >= 2 {
        coeffs[r - 2] = f.clone();
    }
    let mut omega: OneForm = u.apply_form(&grad_g)?;
    for i in (0..r.saturating_sub(2)).rev() {
        omega = u.apply_form(&omega)?;
        coeffs[i] = integrate_exact(&omega)?;
    }
    MuPoly::new(&ring, coeffs)
}

/// `μ^s V_μ` in a larger system, lifted onto the target variables.
pub fn embed(v: &MuPoly, s: usize, target: &StarSystem) -> Result<MuPoly> {
    if target.degree() != v.len() + s {
        return Err(Error::Dimension(format!(
            "embedding length {} shifted by {s} into a degree-{} system",
            v.len(),
            target.degree()
        )));
    }
    Ok(v.lift(target.ring())?.shift(s))
}

/// `(1 + μ²)^k V_μ` in a larger real system, lifted onto the target variables.
pub fn embed_real(v: &MuPoly, k: usize, target: &StarSystem) -> Result<MuPoly> {
    if target.degree() != v.len() + 2 * k {
        return Err(Error::Dimension(format!(
            "real embedding of length {} by (1+μ²)^{k} into a degree-{} system",
            v.len(),
            target.degree()
        )));
    }
    let lifted = v.lift(target.ring())?;
    let weights: Vec<Scalar> =
        (0..=2 * k).map(|t| if t % 2 == 0 { Scalar::from_bigint(binomial(k as u64, (t / 2) as u64)) } else { Scalar::zero() }).collect();
    let factor = MuPoly::constant(target.ring(), &weights);
    MuPoly::new(target.ring(), lifted.full_product(&factor))
}

/// The arbitrary functions `φ_0 … φ_{n_1}`; `φ_k` is a polynomial in
/// `s1 … s{ν_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenFuncSet {
    pub phis: Vec<Poly>,
}

pub fn formal_ring(arity: usize, field: Field) -> Ring {
    Ring::new((1..=arity).map(|i| format!("s{i}")), field)
}

impl GenFuncSet {
    pub fn new(phis: Vec<Poly>) -> Self {
        GenFuncSet { phis }
    }

    fn check(&self, e: &EigenBlocks) -> Result<()> {
        if self.phis.len() != e.n1() + 1 {
            return Err(Error::Arity(format!("{} functions given, {} expected", self.phis.len(), e.n1() + 1)));
        }
        for (k, phi) in self.phis.iter().enumerate() {
            if phi.ring().nvars() != e.nu(k) {
                return Err(Error::Arity(format!(
                    "φ_{k} has {} variables but ν_{k} = {}",
                    phi.ring().nvars(),
                    e.nu(k)
                )));
            }
        }
        Ok(())
    }
}

/// `x^b_μ = x^b_0 + x^b_1 μ + …` for block `b` (0-based), as polynomials in
/// the spec ring extended by `mu`.
fn block_mu_poly(spec_ring: &Ring, e: &EigenBlocks, b: usize) -> Poly {
    let ring_mu = spec_ring.extended(["mu"]);
    let mu = ring_mu.nvars() - 1;
    let mut out = Poly::zero(&ring_mu);
    for (j, idx) in JordanSpecC::block_vars(e, b).into_iter().enumerate() {
        let mut exp = vec![0; ring_mu.nvars()];
        exp[idx] = 1;
        exp[mu] = j as u32;
        out = &out + &Poly::monomial(&ring_mu, exp, Scalar::one());
    }
    out
}

/// Coefficients of `μ^0 … μ^{upto}` in `φ(x^1_μ, …, x^ν_μ)`.
fn mu_coefficients(spec_ring: &Ring, e: &EigenBlocks, phi: &Poly, upto: usize) -> Result<Vec<Poly>> {
    let images: Vec<Poly> = (0..phi.ring().nvars()).map(|b| block_mu_poly(spec_ring, e, b)).collect();
    let refs: Vec<&Poly> = images.iter().collect();
    let composed = if refs.is_empty() {
        Poly::constant(&spec_ring.extended(["mu"]), phi.constant_term())
    } else {
        phi.substitute_images(&refs)?
    };
    let mut coeffs = composed.split_var("mu")?;
    coeffs.truncate(upto + 1);
    let mut out: Vec<Poly> = coeffs.into_iter().map(|c| c.lift(spec_ring)).collect::<Result<_>>()?;
    while out.len() <= upto {
        out.push(Poly::zero(spec_ring));
    }
    Ok(out)
}

/// General solution for one eigenvalue: `g = Σ g_k`, `f = Σ f_k` (constant 0)
/// with `g_k = ∂^k_μ φ_k(x^{(k)}_μ)|_0` and
/// `f_k = λ g_k + k ∂^{k−1}_μ φ_k(x^{(k)}_μ)|_0`. The result is checked against
/// `∇f = M∇g` before it is returned.
pub fn general_solution(spec: &JordanSpecC, phis: &GenFuncSet) -> Result<SolutionPair> {
    let e = spec.require_single()?;
    phis.check(e)?;
    let ring = spec.ring();
    let mut f = Poly::zero(&ring);
    let mut g = Poly::zero(&ring);
    for (k, phi) in phis.phis.iter().enumerate() {
        if phi.is_zero() {
            continue;
        }
        let coeffs = mu_coefficients(&ring, e, phi, k)?;
        let kfact = Scalar::from_bigint(factorial(k as u64));
        let gk = coeffs[k].scale(&kfact);
        let mut fk = gk.scale(&e.lambda);
        if k >= 1 {
            // k · (k−1)! · coeff_{k−1} = k! · coeff_{k−1}
            fk = &fk + &coeffs[k - 1].scale(&kfact);
        }
        f = &f + &fk;
        g = &g + &gk;
    }
    let m = build_matrices(spec).m;
    if !verify_gradient(&m, &f, &g)? {
        return Err(Error::Verification("general solution fails ∇f = M∇g".into()));
    }
    let h = &f - &g.scale(&e.lambda);
    Ok(SolutionPair { f, g, h: Some(h) })
}

/// `Ψ_{i,j}` over the variables `x` (that is `x_0 … x_n`) by the multinomial sum.
pub fn psi_multinomial(ring: &Ring, x: &[usize], i: u32, j: u32) -> Poly {
    let mut out = Poly::zero(ring);
    let n = x.len().saturating_sub(1);
    let mut a = vec![0u32; n + 1];
    psi_rec(ring, x, i, j, 1, i, j, &mut a, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn psi_rec(ring: &Ring, x: &[usize], i: u32, j: u32, l: usize, left_i: u32, left_j: u32, a: &mut Vec<u32>, out: &mut Poly) {
    if left_j == 0 {
        a[0] = left_i;
        let mut coeff = factorial(i as u64);
        let mut exp = vec![0u32; ring.nvars()];
        for (t, &at) in a.iter().enumerate() {
            coeff /= factorial(at as u64);
            if at > 0 {
                exp[x[t]] += at;
            }
        }
        *out = &*out + &Poly::monomial(ring, exp, Scalar::from_bigint(coeff));
        a[0] = 0;
        return;
    }
    if l >= x.len() {
        return;
    }
    let max = (left_j / l as u32).min(left_i);
    for al in 0..=max {
        a[l] = al;
        psi_rec(ring, x, i, j, l + 1, left_i - al, left_j - al * l as u32, a, out);
    }
    a[l] = 0;
}

/// `Ψ_{i,j} = Σ_s C(i,s) x_0^{i−s} (s!/j!) B_{j,s}(1!x_1, 2!x_2, …)` with the
/// standard partial Bell polynomials (`x_k = 0` beyond the block).
pub fn psi_bell(ring: &Ring, x: &[usize], i: u32, j: u32) -> Poly {
    let j = j as usize;
    let y: Vec<Poly> = (0..=j)
        .map(|m| {
            if m == 0 || m >= x.len() {
                Poly::zero(ring)
            } else {
                Poly::var_index(ring, x[m]).scale(&Scalar::from_bigint(factorial(m as u64)))
            }
        })
        .collect();
    // bell[n][k] = B_{n,k}(y_1, y_2, …)
    let mut bell = vec![vec![Poly::zero(ring); j + 1]; j + 1];
    bell[0][0] = Poly::one(ring);
    for n in 1..=j {
        for k in 1..=n {
            let mut acc = Poly::zero(ring);
            for m in 1..=(n - k + 1) {
                if y[m].is_zero() || bell[n - m][k - 1].is_zero() {
                    continue;
                }
                let c = Scalar::from_bigint(binomial((n - 1) as u64, (m - 1) as u64));
                acc = &acc + &(&y[m] * &bell[n - m][k - 1]).scale(&c);
            }
            bell[n][k] = acc;
        }
    }
    let x0 = Poly::var_index(ring, x[0]);
    let jfact = Scalar::from_bigint(factorial(j as u64));
    let mut out = Poly::zero(ring);
    for s in 0..=j.min(i as usize) {
        if bell[j][s].is_zero() {
            continue;
        }
        let w = &Scalar::from_bigint(binomial(i as u64, s as u64) * factorial(s as u64)) / &jfact;
        out = &out + &(&x0.pow(i - s as u32) * &bell[j][s]).scale(&w);
    }
    out
}

/// `Ψ_{I,j}` for a single-eigenvalue spec: the convolution of the one-block
/// `Ψ_{i_t, j_t}` over `j_1 + … + j_r = j`.
pub fn psi(index: &[u32], j: usize, spec: &JordanSpecC) -> Result<Poly> {
    let e = spec.require_single()?;
    let r = index.len();
    if r == 0 || r > e.sizes.len() {
        return Err(Error::IndexOutOfRange(format!("multi-index of length {r} for {} blocks", e.sizes.len())));
    }
    let nr = e.sizes[r - 1] - 1;
    if j > nr {
        return Err(Error::IndexOutOfRange(format!("j = {j} exceeds n_{r} = {nr}")));
    }
    let ring = spec.ring();
    // conv[q] holds the partial convolution at total degree q.
    let mut conv: Vec<Poly> = (0..=j).map(|q| if q == 0 { Poly::one(&ring) } else { Poly::zero(&ring) }).collect();
    for (b, &i) in index.iter().enumerate() {
        let vars = JordanSpecC::block_vars(e, b);
        let local: Vec<Poly> = (0..=j).map(|q| psi_multinomial(&ring, &vars, i, q as u32)).collect();
        let mut next = vec![Poly::zero(&ring); j + 1];
        for (q, nq) in next.iter_mut().enumerate() {
            for t in 0..=q {
                if !conv[q - t].is_zero() && !local[t].is_zero() {
                    *nq = &*nq + &(&conv[q - t] * &local[t]);
                }
            }
        }
        conv = next;
    }
    Ok(conv.pop().expect("j + 1 entries"))
}

/// `(x_μ)^I_*` by successive embeddings: start from `(x^r_μ)^{i_r}` modulo
/// `μ^{n_r+1}`, multiply by `μ^{n_{t}−n_{t+1}}` and star-multiply with
/// `(x^t_μ)^{i_t}` modulo `μ^{n_t+1}`, down to `t = 1`.
pub fn nested_power(spec: &JordanSpecC, index: &[u32]) -> Result<MuPoly> {
    let e = spec.require_single()?;
    let r = index.len();
    if r == 0 || r > e.sizes.len() {
        return Err(Error::IndexOutOfRange(format!("multi-index of length {r} for {} blocks", e.sizes.len())));
    }
    let ring = spec.ring();
    let ns = e.ns();
    let block = |b: usize| -> Result<MuPoly> {
        let coeffs = JordanSpecC::block_vars(e, b).into_iter().map(|i| Poly::var_index(&ring, i)).collect();
        MuPoly::new(&ring, coeffs)
    };
    let mut w = star_power(&block(r - 1)?, index[r - 1], &Modulus::mu_power(ns[r - 1] + 1)?)?;
    for t in (0..r - 1).rev() {
        let z = Modulus::mu_power(ns[t] + 1)?;
        w = w.shift(ns[t] - ns[t + 1]);
        w = star_product(&star_power(&block(t)?, index[t], &z)?, &w, &z)?;
    }
    Ok(w)
}

/// `Σ_I (b_I)_μ * (x_μ)^I_*` with `(b_I)_μ = Σ_j j!·c_{I,j}·μ^{n_r−j}` over
/// the `j` with `ν_j = r = |I|`.
pub fn reconstruct_star_series(spec: &JordanSpecC, phis: &GenFuncSet) -> Result<MuPoly> {
    let e = spec.require_single()?;
    phis.check(e)?;
    let ring = spec.ring();
    let m = e.n1() + 1;
    let ns = e.ns();
    let mut constants: BTreeMap<Vec<u32>, Vec<Scalar>> = BTreeMap::new();
    for (j, phi) in phis.phis.iter().enumerate() {
        let r = e.nu(j);
        let jfact = Scalar::from_bigint(factorial(j as u64));
        for (index, c) in phi.terms() {
            let slot = ns[r - 1] - j;
            let b = constants.entry(index.clone()).or_insert_with(|| vec![Scalar::zero(); m]);
            b[slot] += &(c * &jfact);
        }
    }
    let z = Modulus::mu_power(m)?;
    let mut out = MuPoly::zero(&ring, m);
    for (index, b) in constants {
        if b.iter().all(Scalar::is_zero) {
            continue;
        }
        let power = nested_power(spec, &index)?;
        out = out.add(&star_product(&MuPoly::constant(&ring, &b), &power, &z)?)?;
    }
    Ok(out)
}

/// Splits a solution into its per-eigenvalue parts, each over the variables
/// of that eigenvalue; constants go to the first part.
///
/// Grouping monomials by support is exact for genuine solutions. Take
/// `M = diag(λ1, λ2)` with `λ1 ≠ λ2`: `f_{x1} = λ1 g_{x1}` and
/// `f_{x2} = λ2 g_{x2}` give `f_{x1 x2} = λ1 g_{x1 x2} = λ2 g_{x1 x2}`, so
/// `g_{x1 x2} = 0` and then `f_{x1 x2} = 0`: no monomial of a solution can
/// mix `x1` and `x2`. The same argument runs through each pair of Jordan
/// blocks with distinct eigenvalues, so a mixed monomial means the input was
/// not a solution and is reported rather than projected away.
pub fn decompose_by_eigenvalue(spec: &JordanSpecC, f: &Poly, g: &Poly) -> Result<Vec<SolutionPair>> {
    let ring = spec.ring();
    if f.vars() != ring.vars() || g.vars() != ring.vars() {
        return Err(Error::VarMismatch { left: ring.vars().to_vec(), right: f.vars().to_vec() });
    }
    let m = build_matrices(spec).m;
    if !verify_gradient(&m, f, g)? {
        return Err(Error::NotASolution("∇f ≠ M∇g".into()));
    }
    let owner: Vec<usize> = spec
        .eigenvalues()
        .iter()
        .enumerate()
        .flat_map(|(k, e)| std::iter::repeat_n(k, e.dim()))
        .collect();
    let parts = spec.eigenvalues().len();
    let split = |p: &Poly| -> Result<Vec<Poly>> {
        let mut out = vec![Poly::zero(&ring); parts];
        for (exp, c) in p.terms() {
            let mut k_found: Option<usize> = None;
            for (i, &a) in exp.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                match k_found {
                    None => k_found = Some(owner[i]),
                    Some(k) if k != owner[i] => {
                        return Err(Error::CrossEigenvalueMonomial(
                            Poly::monomial(&ring, exp.clone(), c.clone()).to_string(),
                        ));
                    }
                    _ => {}
                }
            }
            let k = k_found.unwrap_or(0);
            out[k] = &out[k] + &Poly::monomial(&ring, exp.clone(), c.clone());
        }
        Ok(out)
    };
    let fs = split(f)?;
    let gs = split(g)?;
    let mut out = Vec::with_capacity(parts);
    for (k, (fk, gk)) in fs.into_iter().zip(gs).enumerate() {
        let sub = spec.eigen_ring(k);
        let fk = fk.restrict(&sub)?;
        let gk = gk.restrict(&sub)?;
        let h = &fk - &gk.scale(&spec.eigenvalues()[k].lambda);
        out.push(SolutionPair { f: fk, g: gk, h: Some(h) });
    }
    Ok(out)
}

/// Jordan matrix `M^k` of eigenvalue `k` (0-based) alone, matching
/// [`JordanSpecC::eigen_ring`].
pub fn component_matrix(spec: &JordanSpecC, k: usize) -> Matrix {
    let e = &spec.eigenvalues()[k];
    build_matrices(&JordanSpecC { eigenvalues: vec![e.clone()] }).m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::check_solution;

    fn s(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    fn u3_spec() -> JordanSpecC {
        JordanSpecC::single(s(0), vec![3]).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(JordanSpecC::single(s(0), vec![1, 2]).is_err());
        assert!(JordanSpecC::single(s(0), vec![]).is_err());
        let dup = vec![
            EigenBlocks { lambda: s(1), sizes: vec![1] },
            EigenBlocks { lambda: s(1), sizes: vec![2] },
        ];
        assert!(JordanSpecC::new(dup).is_err());
    }

    #[test]
    fn matrices() {
        let jm = build_matrices(&u3_spec());
        assert_eq!(jm.u, shift_block(3));
        assert_eq!(jm.var_names, vec!["x1_1_0", "x1_1_1", "x1_1_2"]);
        let one = build_matrices(&JordanSpecC::single(s(0), vec![1]).unwrap());
        assert_eq!(one.u, Matrix::zeros(1, 1));
    }

    #[test]
    fn u3_example() {
        let spec = u3_spec();
        let ring = spec.ring();
        let x: Vec<Poly> = (0..3).map(|i| Poly::var_index(&ring, i)).collect();
        let phi2 = Poly::var_index(&formal_ring(1, Field::Real), 0).pow(2);
        let zero1 = Poly::zero(&formal_ring(1, Field::Real));
        let set = GenFuncSet::new(vec![zero1.clone(), zero1, phi2]);
        let sol = general_solution(&spec, &set).unwrap();
        let expected_g = &(&x[0] * &x[2]).scale(&s(4)) + &x[1].pow(2).scale(&s(2));
        assert_eq!(sol.g, expected_g);
        assert_eq!(sol.h.clone().unwrap(), (&x[0] * &x[1]).scale(&s(4)));

        let v = extend_nilpotent(&shift_block(3), &sol.f, &sol.g).unwrap();
        assert_eq!(v.coeffs(), &[x[0].pow(2).scale(&s(2)), (&x[0] * &x[1]).scale(&s(4)), expected_g]);
        assert!(check_solution(&nilpotent_system(&spec).unwrap(), &v).unwrap().is_solution);
        assert_eq!(reconstruct_star_series(&spec, &set).unwrap(), v);
    }

    #[test]
    fn psi_small_values() {
        let spec = u3_spec();
        let ring = spec.ring();
        let x: Vec<Poly> = (0..3).map(|i| Poly::var_index(&ring, i)).collect();
        assert_eq!(psi(&[4], 0, &spec).unwrap(), x[0].pow(4));
        assert_eq!(psi(&[2], 1, &spec).unwrap(), (&x[0] * &x[1]).scale(&s(2)));
        let expected = &(&x[0].pow(2) * &x[2]).scale(&s(3)) + &(&x[0] * &x[1].pow(2)).scale(&s(3));
        assert_eq!(psi(&[3], 2, &spec).unwrap(), expected);
        assert!(psi(&[1], 3, &spec).is_err());
        let vars = [0, 1, 2];
        for i in 0..=6 {
            for j in 0..=4 {
                assert_eq!(psi_multinomial(&ring, &vars, i, j), psi_bell(&ring, &vars, i, j), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn shift_roundtrip() {
        let ring = Ring::new(["x"], Field::Complex);
        let x = Poly::var_index(&ring, 0);
        let lambda = Scalar::i();
        let f = x.pow(3);
        let g = x.pow(2);
        let fwd = eigen_shift(&f, &g, &lambda, ShiftDirection::Forward);
        let back = eigen_shift(fwd.h.as_ref().unwrap(), &g, &lambda, ShiftDirection::Inverse);
        assert_eq!(back.f, f);
        assert_eq!(eigen_shift(&f, &g, &s(0), ShiftDirection::Forward).h.unwrap(), f);
    }

    #[test]
    fn embedding_example() {
        // (z²) in (U_0, μ) embedded by μ into (diag(U_1, U_0), μ²).
        let spec = JordanSpecC::single(s(0), vec![2, 1]).unwrap();
        let target = nilpotent_system(&spec).unwrap();
        let small = Ring::new(["x1_2_0"], Field::Real);
        let z = Poly::var_index(&small, 0);
        let v = MuPoly::new(&small, vec![z.pow(2)]).unwrap();
        let w = embed(&v, 1, &target).unwrap();
        let zt = Poly::var(target.ring(), "x1_2_0").unwrap();
        assert_eq!(w.coeffs(), &[Poly::zero(target.ring()), zt.pow(2)]);
        assert!(check_solution(&target, &w).unwrap().is_solution);
        assert!(embed(&v, 0, &target).is_err());
    }
}
