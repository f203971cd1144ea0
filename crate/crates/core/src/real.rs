//! The real theory for a complex-conjugate eigenvalue pair `α ± iβ` with real
//! Jordan blocks built from `L = [[α, β], [−β, α]]`.
//!
//! Variables of block `b` (from 1) are `x{b}_{j}, y{b}_{j}`, interleaved per
//! `j`. After the change `x = Bs` the coordinates are `s{b}_{j}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::complex::{formal_ring, verify_gradient, GenFuncSet};
use crate::error::{Error, Result};
use crate::form::{gradient, integrate_exact};
use crate::matrix::{solve_linear, LinearSolution, Matrix};
use crate::poly::{Poly, Ring};
use crate::scalar::{binomial, factorial, gbinom, Field, Scalar};
use crate::star::{check_solution, reduce_mod, star_power, star_product, Modulus, MuPoly, StarSystem};

/// Real Jordan specification. `sizes[i] = n_i + 1`; block `i` has `2(n_i + 1)` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanSpecR {
    alpha: BigRational,
    beta: BigRational,
    sizes: Vec<usize>,
}

impl JordanSpecR {
    pub fn new(alpha: BigRational, beta: BigRational, sizes: Vec<usize>) -> Result<Self> {
        if beta.is_zero() {
            return Err(Error::InvalidSpec("β must be nonzero".into()));
        }
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidSpec("block sizes must be positive and nonempty".into()));
        }
        if sizes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec("block sizes must be weakly decreasing".into()));
        }
        Ok(JordanSpecR { alpha, beta, sizes })
    }

    /// `α = 0`, `β = 1`.
    pub fn normalized_blocks(sizes: Vec<usize>) -> Result<Self> {
        JordanSpecR::new(BigRational::zero(), BigRational::one(), sizes)
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn ns(&self) -> Vec<usize> {
        self.sizes.iter().map(|s| s - 1).collect()
    }

    pub fn n1(&self) -> usize {
        self.sizes[0] - 1
    }

    pub fn nu(&self, k: usize) -> usize {
        self.sizes.iter().filter(|&&s| s > k).count()
    }

    pub fn is_normalized(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_one()
    }

    pub fn normalized(&self) -> JordanSpecR {
        JordanSpecR { alpha: BigRational::zero(), beta: BigRational::one(), sizes: self.sizes.clone() }
    }

    pub fn dim(&self) -> usize {
        2 * self.sizes.iter().sum::<usize>()
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &size) in self.sizes.iter().enumerate() {
            for j in 0..size {
                out.push(format!("x{}_{j}", b + 1));
                out.push(format!("y{}_{j}", b + 1));
            }
        }
        out
    }

    pub fn ring(&self) -> Ring {
        Ring::new(self.var_names(), Field::Real)
    }

    pub fn s_var_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &size) in self.sizes.iter().enumerate() {
            for j in 0..2 * size {
                out.push(format!("s{}_{j}", b + 1));
            }
        }
        out
    }

    pub fn s_ring(&self) -> Ring {
        Ring::new(self.s_var_names(), Field::Real)
    }

    /// Offset of block `b` (0-based) in the variable list.
    fn block_offset(&self, b: usize) -> usize {
        2 * self.sizes[..b].iter().sum::<usize>()
    }

    /// Real Jordan matrix: `L` on the diagonal, `I_2` on the block superdiagonal.
    pub fn matrix(&self) -> Matrix {
        let blocks: Vec<Matrix> = self.sizes.iter().map(|&s| real_block(&self.alpha, &self.beta, s)).collect();
        Matrix::block_diag(&blocks)
    }

    /// `(X = M^{-1}, Z = (1+μ²)^{n_1+1})`.
    pub fn system(&self) -> Result<StarSystem> {
        StarSystem::new(self.matrix().inverse()?, Modulus::one_plus_mu_sq_pow(self.n1() + 1)?, &self.ring())
    }
}

fn real_block(alpha: &BigRational, beta: &BigRational, size: usize) -> Matrix {
    let mut m = Matrix::zeros(2 * size, 2 * size);
    for k in 0..size {
        let o = 2 * k;
        m[(o, o)] = Scalar::real(alpha.clone());
        m[(o + 1, o + 1)] = Scalar::real(alpha.clone());
        m[(o, o + 1)] = Scalar::real(beta.clone());
        m[(o + 1, o)] = Scalar::real(-beta);
        if k + 1 < size {
            m[(o, o + 2)] = Scalar::one();
            m[(o + 1, o + 3)] = Scalar::one();
        }
    }
    m
}

/// `Λ = [[0, 1], [−1, 0]]`.
pub fn lambda_matrix() -> Matrix {
    let mut l = Matrix::zeros(2, 2);
    l[(0, 1)] = Scalar::one();
    l[(1, 0)] = Scalar::from_int(-1);
    l
}

fn minus_lambda_pow(k: usize) -> Matrix {
    lambda_matrix().neg().pow(k as u32).expect("square")
}

/// Moves `(f, g)` to the normalized system: `f~ = f − αg`, `g~ = βg`, and
/// `x^b_j = β^{n_b − j} x~^b_j` (same for `y`). Both ends are checked.
pub fn normalize_real(spec: &JordanSpecR, f: &Poly, g: &Poly) -> Result<(JordanSpecR, Poly, Poly)> {
    let m = spec.matrix();
    if !verify_gradient(&m, f, g)? {
        return Err(Error::NotASolution("∇f ≠ M∇g".into()));
    }
    let ring = spec.ring();
    let alpha = Scalar::real(spec.alpha.clone());
    let beta = Scalar::real(spec.beta.clone());
    let ft = f - &g.scale(&alpha);
    let gt = g.scale(&beta);
    let mut images = Vec::with_capacity(ring.nvars());
    for &size in &spec.sizes {
        for j in 0..size {
            let w = beta.powi((size - 1 - j) as i64)?;
            let idx = images.len();
            images.push(Poly::var_index(&ring, idx).scale(&w));
            images.push(Poly::var_index(&ring, idx + 1).scale(&w));
        }
    }
    let refs: Vec<&Poly> = images.iter().collect();
    let ft = ft.substitute_images(&refs)?;
    let gt = gt.substitute_images(&refs)?;
    let norm = spec.normalized();
    if !verify_gradient(&norm.matrix(), &ft, &gt)? {
        return Err(Error::Verification("normalized pair fails the normalized system".into()));
    }
    Ok((norm, ft, gt))
}

/// Extends a solution of the normalized system to `V` of length `2n_1 + 2` with
/// `V_0 = f` and `V_{2n_1+1} = g`, by `∇V_{j−1} = Z_j∇g − M^{−1}∇V_j` downward
/// from the top, each step integrated with `V_j(0) = 0`.
pub fn extend_real(spec: &JordanSpecR, f: &Poly, g: &Poly) -> Result<MuPoly> {
    if !spec.is_normalized() {
        return Err(Error::InvalidSpec("extend_real expects α = 0, β = 1".into()));
    }
    let sys = spec.system()?;
    if !verify_gradient(&spec.matrix(), f, g)? {
        return Err(Error::NotASolution("∇f ≠ M∇g".into()));
    }
    let len = sys.degree();
    let z = sys.modulus().coeffs().to_vec();
    let grad_g = gradient(g);
    let mut coeffs = vec![Poly::zero(f.ring()); len];
    coeffs[len - 1] = g.clone();
    for j in (1..len).rev() {
        let omega = grad_g.scale(&z[j]).sub(&sys.pencil_base().apply_form(&gradient(&coeffs[j]))?);
        if j == 1 {
            if !omega.sub(&gradient(f)).is_zero() {
                return Err(Error::NotASolution("recursion does not return ∇f".into()));
            }
            coeffs[0] = f.clone();
        } else {
            coeffs[j - 1] = integrate_exact(&omega)?;
        }
    }
    MuPoly::new(f.ring(), coeffs)
}

/// The basis matrix of one real block: `x = B s` turns `s_μ` into a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealBasis {
    pub n: usize,
    pub b: Matrix,
}

/// `B_{ij} = C(i+j−3, i−1)(−Λ)^{i+j−2}e_1` for block rows `i = 1..n+1` and
/// columns `j = 1..2n+2`, verified before it is returned.
pub fn basis_matrix(n: usize) -> Result<RealBasis> {
    let size = 2 * n + 2;
    let mut b = Matrix::zeros(size, size);
    for i in 1..=n + 1 {
        for j in 1..=size {
            let c = Scalar::real(gbinom((i + j) as i64 - 3, i as i64 - 1));
            let p = minus_lambda_pow(i + j - 2);
            b[(2 * (i - 1), j - 1)] = &c * &p[(0, 0)];
            b[(2 * (i - 1) + 1, j - 1)] = &c * &p[(1, 0)];
        }
    }
    let basis = RealBasis { n, b };
    basis.verify()?;
    Ok(basis)
}

impl RealBasis {
    fn spec(&self) -> JordanSpecR {
        JordanSpecR::normalized_blocks(vec![self.n + 1]).expect("valid")
    }

    /// `N = −M^{−T}`.
    pub fn n_matrix(&self) -> Result<Matrix> {
        Ok(self.spec().matrix().inverse()?.transpose().neg())
    }

    /// `(X = Bᵀ M^{−1} B^{−T}, Z = (1+μ²)^{n+1})` over the `s` coordinates.
    pub fn s_system(&self) -> Result<StarSystem> {
        let spec = self.spec();
        let x = self.b.transpose().mul(&spec.matrix().inverse()?)?.mul(&self.b.inverse()?.transpose())?;
        StarSystem::new(x, Modulus::one_plus_mu_sq_pow(self.n + 1)?, &spec.s_ring())
    }

    /// `s_μ = s_0 + s_1μ + … + s_{2n+1}μ^{2n+1}`.
    pub fn s_mu(&self) -> MuPoly {
        let ring = self.spec().s_ring();
        let coeffs = (0..ring.nvars()).map(|i| Poly::var_index(&ring, i)).collect();
        MuPoly::new(&ring, coeffs).expect("same ring")
    }

    /// Checks `N B = B C` and that `s_μ` solves the system in `s` coordinates.
    pub fn verify(&self) -> Result<()> {
        let c = crate::star::companion_matrix(&Modulus::one_plus_mu_sq_pow(self.n + 1)?);
        let lhs = self.n_matrix()?.mul(&self.b)?;
        let rhs = self.b.mul(c.matrix())?;
        if lhs != rhs {
            return Err(Error::Verification(format!("−M^(−T)B ≠ BC for n = {}", self.n)));
        }
        if !check_solution(&self.s_system()?, &self.s_mu())?.is_solution {
            return Err(Error::Verification(format!("s_μ is not a solution for n = {}", self.n)));
        }
        Ok(())
    }
}

/// Closed form of `N^a`: block `(i, j)` is `C(a−1+i−j, i−j)(−Λ)^{a+i−j}` for
/// `i ≥ j` and zero above the diagonal.
pub fn n_power_formula(n: usize, a: usize) -> Matrix {
    let blocks = n + 1;
    let mut out = Matrix::zeros(2 * blocks, 2 * blocks);
    for i in 0..blocks {
        for j in 0..=i {
            let d = i - j;
            let c = Scalar::real(gbinom((a + d) as i64 - 1, d as i64));
            if c.is_zero() {
                continue;
            }
            let p = minus_lambda_pow(a + d);
            for r in 0..2 {
                for q in 0..2 {
                    out[(2 * i + r, 2 * j + q)] = &c * &p[(r, q)];
                }
            }
        }
    }
    out
}

/// Substitutes `x = B s` with the block-diagonal basis of `spec`.
pub fn pull_back(spec: &JordanSpecR, p: &Poly) -> Result<Poly> {
    let s_ring = spec.s_ring().with_field(p.field());
    let mut images = vec![Poly::zero(&s_ring); spec.dim()];
    for (blk, &size) in spec.sizes.iter().enumerate() {
        let basis = basis_matrix(size - 1)?;
        let off = spec.block_offset(blk);
        for (r, img) in images[off..off + 2 * size].iter_mut().enumerate() {
            for c in 0..2 * size {
                let e = &basis.b[(r, c)];
                if !e.is_zero() {
                    *img = &*img + &Poly::var_index(&s_ring, off + c).scale(e);
                }
            }
        }
    }
    let refs: Vec<&Poly> = images.iter().collect();
    p.substitute_images(&refs)
}

/// `F_k` with its real split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FkEval {
    /// Complex polynomial `F_k = f_k − λ̄ g_k`.
    pub big_f: Poly,
    pub f: Poly,
    pub g: Poly,
}

/// `F_k = D_k − Σ_{l=1}^{k} (−i/(2β))^l · k!/(k−l)! · conj(D_{k−l})` with
/// `D_d = ∂^d_μ φ_k(z_μ)|_0`, `z^b_μ = Σ_j (x^b_j + i y^b_j)μ^j`. Then
/// `g_k = Im F_k / β` and `f_k = Re F_k + α g_k`.
pub fn f_k_eval(phi: &Poly, k: usize, spec: &JordanSpecR) -> Result<FkEval> {
    let nu = spec.nu(k);
    if phi.ring().nvars() != nu {
        return Err(Error::Arity(format!("φ_{k} has {} variables but ν_{k} = {nu}", phi.ring().nvars())));
    }
    let ring = spec.ring().with_field(Field::Complex);
    let ring_mu = ring.extended(["mu"]);
    let mu = ring_mu.nvars() - 1;
    let images: Vec<Poly> = (0..nu)
        .map(|b| {
            let off = spec.block_offset(b);
            let mut z = Poly::zero(&ring_mu);
            for j in 0..spec.sizes[b] {
                for (t, c) in [(0, Scalar::one()), (1, Scalar::i())] {
                    let mut e = vec![0; ring_mu.nvars()];
                    e[off + 2 * j + t] = 1;
                    e[mu] = j as u32;
                    z = &z + &Poly::monomial(&ring_mu, e, c);
                }
            }
            z
        })
        .collect();
    let composed = if images.is_empty() {
        Poly::constant(&ring_mu, phi.constant_term())
    } else {
        phi.substitute_images(&images.iter().collect::<Vec<_>>())?
    };
    let split = composed.split_var("mu")?;
    let deriv = |d: usize| -> Result<Poly> {
        let c = split.get(d).cloned().unwrap_or_else(|| Poly::zero(&ring));
        Ok(c.lift(&ring)?.scale(&Scalar::from_bigint(factorial(d as u64))))
    };
    let beta = Scalar::real(spec.beta.clone());
    let weight = &(&Scalar::i() * &Scalar::from_int(-1)) / &(&Scalar::from_int(2) * &beta);
    let mut big_f = deriv(k)?;
    for l in 1..=k {
        let ratio = Scalar::from_bigint(factorial(k as u64) / factorial((k - l) as u64));
        let coeff = &weight.pow(l as u32) * &ratio;
        big_f = &big_f - &deriv(k - l)?.to_complex().conjugate()?.scale(&coeff);
    }
    let g = big_f.im_part().scale(&beta.inv()?);
    let f = &big_f.re_part() + &g.scale(&Scalar::real(spec.alpha.clone()));
    Ok(FkEval { big_f: big_f.to_complex(), f, g })
}

/// `(f, g) = Σ_k (f_k, g_k)` over all `φ_k`.
pub fn real_general_solution(spec: &JordanSpecR, phis: &GenFuncSet) -> Result<(Poly, Poly)> {
    if phis.phis.len() != spec.n1() + 1 {
        return Err(Error::Arity(format!("{} functions given, {} expected", phis.phis.len(), spec.n1() + 1)));
    }
    let ring = spec.ring();
    let mut f = Poly::zero(&ring);
    let mut g = Poly::zero(&ring);
    for (k, phi) in phis.phis.iter().enumerate() {
        let e = f_k_eval(phi, k, spec)?;
        f = &f + &e.f;
        g = &g + &e.g;
    }
    Ok((f, g))
}

/// Coefficients `c_{k,I}` of `φ_k = Σ_I c_{k,I} s^I`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoeffTable {
    pub entries: BTreeMap<(usize, Vec<u32>), Scalar>,
}

impl CoeffTable {
    pub fn insert(&mut self, k: usize, index: Vec<u32>, c: Scalar) {
        if !c.is_zero() {
            self.entries.insert((k, index), c);
        }
    }

    /// The polynomials `φ_0 … φ_{count−1}`; `arity(k)` gives the variable count.
    pub fn to_phis(&self, count: usize, arity: impl Fn(usize) -> usize) -> Result<GenFuncSet> {
        let mut phis: Vec<Poly> = (0..count).map(|k| Poly::zero(&formal_ring(arity(k), Field::Real))).collect();
        for ((k, index), c) in &self.entries {
            if *k >= count {
                return Err(Error::IndexOutOfRange(format!("k = {k} but only {count} functions")));
            }
            if index.len() != arity(*k) {
                return Err(Error::Arity(format!("entry for k = {k} has {} exponents, expected {}", index.len(), arity(*k))));
            }
            let t = Poly::monomial(&formal_ring(index.len(), Field::Real), index.clone(), c.clone());
            phis[*k] = &phis[*k] + &t;
        }
        Ok(GenFuncSet::new(phis))
    }
}

/// The constants `a_{m,μ}` (for real coefficients) and `a'_{m,μ}` (for purely
/// imaginary ones), each of length `2n + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealConstants {
    pub n: usize,
    pub a: Vec<Vec<Scalar>>,
    pub a_imag: Vec<Vec<Scalar>>,
}

/// Multiplies two coefficient lists in μ.
fn mu_mul(p: &[Scalar], q: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += &(a * b);
        }
    }
    out
}

fn one_plus_mu_sq(k: usize) -> Vec<Scalar> {
    (0..=2 * k)
        .map(|t| if t % 2 == 0 { Scalar::from_bigint(binomial(k as u64, (t / 2) as u64)) } else { Scalar::zero() })
        .collect()
}

fn constants_for(n: usize, m: usize, imaginary: bool) -> Vec<Scalar> {
    let len = 2 * n + 2;
    let mut total = vec![Scalar::zero(); len];
    let sign = |e: usize| if e.is_multiple_of(2) { 1i64 } else { -1 };
    let mfact = Scalar::from_bigint(factorial(m as u64));
    for j in 0..=m {
        // inner = Σ_k Σ_i (−1)^k 2^{i−m} C(j,k) b_{ikm}, as c0 + c1 μ
        let mut c0 = BigRational::zero();
        let mut c1 = BigRational::zero();
        for k in 0..=j {
            for i in 0..=m {
                let w = BigRational::from_integer(binomial(j as u64, k as u64) * sign(k))
                    * Scalar::from_int(2).powi(i as i64 - m as i64).expect("nonzero").re().clone();
                let (i, k2) = (i as i64, 2 * k as i64);
                match (m.is_multiple_of(2), imaginary) {
                    (true, false) => c0 += w * gbinom(i + k2, i) * BigRational::from_integer(sign(m / 2).into()),
                    (false, false) => c1 += w * gbinom(i + k2 - 1, i) * BigRational::from_integer(sign((m - 1) / 2).into()),
                    (true, true) => c1 += w * gbinom(i + k2 - 1, i) * BigRational::from_integer(sign(m / 2).into()),
                    (false, true) => c0 -= w * gbinom(i + k2, i) * BigRational::from_integer(sign((m - 1) / 2).into()),
                }
            }
        }
        let inner = [Scalar::real(c0), Scalar::real(c1)];
        let term = mu_mul(&one_plus_mu_sq(n - j), &inner);
        for (t, v) in term.into_iter().enumerate() {
            if t < len {
                total[t] += &(&v * &mfact);
            } else {
                debug_assert!(v.is_zero());
            }
        }
    }
    total
}

/// `a_{m,μ} = Σ_j m!(1+μ²)^{n−j} Σ_k Σ_i (−1)^k 2^{i−m} C(j,k) b_{ikm}` for
/// `m = 0..n`, with `b_{ikm} = (−1)^{m/2}C(i+2k, i)` for even `m` and
/// `μ(−1)^{(m−1)/2}C(i+2k−1, i)` for odd `m`. The imaginary variant swaps the
/// parity roles: `μ(−1)^{m/2}C(i+2k−1, i)` and `−(−1)^{(m−1)/2}C(i+2k, i)`.
pub fn real_constants(n: usize) -> RealConstants {
    RealConstants {
        n,
        a: (0..=n).map(|m| constants_for(n, m, false)).collect(),
        a_imag: (0..=n).map(|m| constants_for(n, m, true)).collect(),
    }
}

/// `Σ_{(m,j)} (Re c_{mj}·a_{m,μ} + Im c_{mj}·a'_{m,μ}) * (s_μ)^j` for one block
/// of half-size `n + 1`, keeping entries with `j ≤ truncation`.
pub fn reconstruct_real(c: &CoeffTable, n: usize, truncation: u32) -> Result<MuPoly> {
    let basis = basis_matrix(n)?;
    let s_mu = basis.s_mu();
    let ring = s_mu.ring().clone();
    let z = Modulus::one_plus_mu_sq_pow(n + 1)?;
    let consts = real_constants(n);
    let mut out = MuPoly::zero(&ring, z.degree());
    let mut powers: BTreeMap<u32, MuPoly> = BTreeMap::new();
    for ((m, index), coeff) in &c.entries {
        if *m > n {
            return Err(Error::IndexOutOfRange(format!("m = {m} exceeds n = {n}")));
        }
        let [j] = index.as_slice() else {
            return Err(Error::Arity("single-block tables take one exponent per entry".into()));
        };
        if *j > truncation {
            continue;
        }
        let mut a = vec![Scalar::zero(); z.degree()];
        for t in 0..z.degree() {
            a[t] = &(&consts.a[*m][t] * &coeff.re_part()) + &(&consts.a_imag[*m][t] * &coeff.im_part());
        }
        if !powers.contains_key(j) {
            powers.insert(*j, star_power(&s_mu, *j, &z)?);
        }
        out = out.add(&star_product(&MuPoly::constant(&ring, &a), &powers[j], &z)?)?;
    }
    Ok(out)
}

/// The direct solution of a coefficient table through `F_k`, in `x` coordinates.
pub fn direct_real_solution(spec: &JordanSpecR, c: &CoeffTable) -> Result<(Poly, Poly)> {
    let phis = c.to_phis(spec.n1() + 1, |k| spec.nu(k))?;
    real_general_solution(spec, &phis)
}

/// `(f, g)` of `F_n` for `φ_n = s` on one block, in `s` coordinates:
/// with `d_j = (n!/2^n) Σ_i 2^i C(i+j−1, i)` and `b_j = 2n!·C(n+j−1, n) − d_j`,
/// for even `n`: `f = Σ_r (−1)^{n/2+r} b_{2r} s_{2r}`, `g = Σ_r (−1)^{n/2+r} d_{2r+1} s_{2r+1}`;
/// for odd `n`: `f = −Σ_r (−1)^{(n−1)/2+r} b_{2r+1} s_{2r+1}`, `g = Σ_r (−1)^{(n−1)/2+r} d_{2r} s_{2r}`.
pub fn degree_one_closed_form(n: usize) -> (Poly, Poly) {
    let ring = JordanSpecR::normalized_blocks(vec![n + 1]).expect("valid").s_ring();
    let nf = BigRational::from_integer(factorial(n as u64));
    let d = |j: usize| -> BigRational {
        let sum = (0..=n).fold(BigRational::zero(), |acc, i| {
            acc + gbinom((i + j) as i64 - 1, i as i64) * BigRational::from_integer(num_bigint::BigInt::from(2).pow(i as u32))
        });
        &nf * sum / BigRational::from_integer(num_bigint::BigInt::from(2).pow(n as u32))
    };
    let b = |j: usize| -> BigRational {
        BigRational::from_integer(num_bigint::BigInt::from(2)) * &nf * gbinom((n + j) as i64 - 1, n as i64) - d(j)
    };
    let sign = |e: usize| if e.is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
    let var = |i: usize| Poly::var_index(&ring, i);
    let mut f = Poly::zero(&ring);
    let mut g = Poly::zero(&ring);
    for r in 0..=n {
        if n.is_multiple_of(2) {
            let sg = sign(n / 2 + r);
            f = &f + &var(2 * r).scale(&(&sg * &Scalar::real(b(2 * r))));
            g = &g + &var(2 * r + 1).scale(&(&sg * &Scalar::real(d(2 * r + 1))));
        } else {
            let sg = sign((n - 1) / 2 + r);
            f = &f - &var(2 * r + 1).scale(&(&sg * &Scalar::real(b(2 * r + 1))));
            g = &g + &var(2 * r).scale(&(&sg * &Scalar::real(d(2 * r))));
        }
    }
    (f, g)
}

/// Outcome of the multi-block reconstruction experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub agree: bool,
    pub truncation: u32,
    pub basis_size: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Reduced right-hand sides on the zero rows of the echelon form; all zero
    /// exactly when the system is consistent.
    pub residual: Vec<Scalar>,
    /// `y` with `yᵀA = 0` and `yᵀb ≠ 0` when the system is inconsistent.
    pub certificate: Option<Vec<Scalar>>,
    /// One solution `(a_I)_μ` per basis multi-index when consistent.
    pub constants: Option<Vec<(Vec<u32>, Vec<Scalar>)>>,
}

/// Multi-indices `I ∈ ℕ^r` with `|I| ≤ t`, in lexicographic order.
fn multi_indices(r: usize, t: u32) -> Vec<Vec<u32>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=t {
        for mut rest in multi_indices(r - 1, t - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `(s_μ)^I_*` by nested embeddings: start from `(s^r_μ)^{i_r}` modulo
/// `(1+μ²)^{n_r+1}`, multiply by `(1+μ²)^{n_t−n_{t+1}}`, then star-multiply with
/// `(s^t_μ)^{i_t}` modulo `(1+μ²)^{n_t+1}`, down to `t = 1`.
pub fn real_nested_power(spec: &JordanSpecR, index: &[u32]) -> Result<MuPoly> {
    let ring = spec.s_ring();
    let ns = spec.ns();
    let r = index.len();
    if r == 0 || r > ns.len() {
        return Err(Error::IndexOutOfRange(format!("multi-index of length {r} for {} blocks", ns.len())));
    }
    let block = |b: usize| -> Result<MuPoly> {
        let off = spec.block_offset(b);
        MuPoly::new(&ring, (off..off + 2 * spec.sizes[b]).map(|i| Poly::var_index(&ring, i)).collect())
    };
    let mut w = star_power(&block(r - 1)?, index[r - 1], &Modulus::one_plus_mu_sq_pow(ns[r - 1] + 1)?)?;
    for t in (0..r - 1).rev() {
        let z = Modulus::one_plus_mu_sq_pow(ns[t] + 1)?;
        let factor = MuPoly::constant(&ring, &one_plus_mu_sq(ns[t] - ns[t + 1]));
        w = MuPoly::new(&ring, w.full_product(&factor))?;
        w = star_product(&star_power(&block(t)?, index[t], &z)?, &w, &z)?;
    }
    Ok(w)
}

/// Tests whether the direct solution of `c` is reproduced by
/// `Σ_I (a_I)_μ * (s_μ)^I_*` over `|I| ≤ truncation` for some constant
/// `(a_I)_μ`, by solving the linear system on the outer coefficients
/// (slot 0 = f, top slot = g) exactly. Report-only: a mismatch is evidence,
/// not an error. The spec is normalized internally.
pub fn hypothesis_check(spec: &JordanSpecR, c: &CoeffTable, truncation: u32) -> Result<HypothesisReport> {
    let (f, g) = direct_real_solution(spec, c)?;
    let (norm, f, g) = normalize_real(spec, &f, &g)?;
    let fs = pull_back(&norm, &f)?;
    let gs = pull_back(&norm, &g)?;
    let ring = norm.s_ring();
    let z = Modulus::one_plus_mu_sq_pow(norm.n1() + 1)?;
    let len = z.degree();

    let mut elements = Vec::new();
    for r in 1..=norm.sizes.len() {
        for index in multi_indices(r, truncation) {
            let w = real_nested_power(&norm, &index)?;
            elements.push((index, w));
        }
    }

    // Column (e, q) is the outer coefficients of μ^q * e.
    let mut columns: Vec<(Poly, Poly)> = Vec::with_capacity(elements.len() * len);
    for (_, e) in &elements {
        for q in 0..len {
            let prod = reduce_mod(&ring, &e.shift(q).into_coeffs(), &z)?;
            let cs = prod.into_coeffs();
            columns.push((cs[0].clone(), cs[len - 1].clone()));
        }
    }
    // Rows: (slot, monomial) pairs that occur anywhere.
    let mut rows: BTreeMap<(u8, Vec<u32>), usize> = BTreeMap::new();
    let mut register = |slot: u8, p: &Poly| {
        for (e, _) in p.terms() {
            let next = rows.len();
            rows.entry((slot, e.clone())).or_insert(next);
        }
    };
    for (lo, hi) in &columns {
        register(0, lo);
        register(1, hi);
    }
    register(0, &fs);
    register(1, &gs);
    let mut a = Matrix::zeros(rows.len(), columns.len());
    for (col, (lo, hi)) in columns.iter().enumerate() {
        for (slot, p) in [(0u8, lo), (1, hi)] {
            for (e, v) in p.terms() {
                a[(rows[&(slot, e.clone())], col)] = v.clone();
            }
        }
    }
    let mut rhs = vec![Scalar::zero(); rows.len()];
    for (slot, p) in [(0u8, &fs), (1, &gs)] {
        for (e, v) in p.terms() {
            rhs[rows[&(slot, e.clone())]] = v.clone();
        }
    }

    let base = HypothesisReport {
        agree: false,
        truncation,
        basis_size: elements.len(),
        unknowns: columns.len(),
        equations: rows.len(),
        rank: 0,
        residual: Vec::new(),
        certificate: None,
        constants: None,
    };
    Ok(match solve_linear(&a, &rhs)? {
        LinearSolution::Consistent { x, rank } => {
            let constants = elements.iter().zip(x.chunks(len)).map(|((i, _), a)| (i.clone(), a.to_vec())).collect();
            let residual = vec![Scalar::zero(); rows.len() - rank];
            HypothesisReport { agree: true, rank, residual, constants: Some(constants), ..base }
        }
        LinearSolution::Inconsistent { certificate, residual, rank } => {
            HypothesisReport { rank, residual, certificate: Some(certificate), ..base }
        }
    })
}
