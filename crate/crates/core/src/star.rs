//! The *-multiplication on μ-vectors modulo a monic constant-coefficient
//! polynomial `Z_μ`, and the solution test for `A_μ ∇V_μ ≡ 0 (mod Z_μ)` with
//! `A_μ = X + μI`.

use crate::error::{Error, Result};
use crate::form::{gradient, OneForm};
use crate::matrix::Matrix;
use crate::poly::{Poly, Ring};
use crate::scalar::{binomial, Field, Scalar};

/// Monic modulus `Z_μ = μ^m + Z_{m-1}μ^{m-1} + … + Z_0` with constant `Z_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    z: Vec<Scalar>,
}

impl Modulus {
    /// `z` lists `Z_0 … Z_{m-1}`; the leading 1 is implicit.
    pub fn new(z: Vec<Scalar>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Dimension("modulus degree must be at least 1".into()));
        }
        Ok(Modulus { z })
    }

    /// `μ^m`.
    pub fn mu_power(m: usize) -> Result<Self> {
        Modulus::new(vec![Scalar::zero(); m])
    }

    /// `(1 + μ²)^k`, of degree `2k`.
    pub fn one_plus_mu_sq_pow(k: usize) -> Result<Self> {
        let mut z = vec![Scalar::zero(); 2 * k];
        for t in 0..k {
            z[2 * t] = Scalar::from_bigint(binomial(k as u64, t as u64));
        }
        Modulus::new(z)
    }

    pub fn degree(&self) -> usize {
        self.z.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.z
    }

    pub fn field(&self) -> Field {
        self.z.iter().fold(Field::Real, |f, c| f.join(c.field()))
    }

    /// `Z_μ − μ^m` as a constant μ-vector, a trivial solution of every system.
    pub fn tail(&self, ring: &Ring) -> MuPoly {
        MuPoly::constant(ring, &self.z)
    }
}

/// `V_0 + V_1 μ + … + V_{m-1} μ^{m-1}` over one shared ring.
#[derive(Debug, Clone)]
pub struct MuPoly {
    ring: Ring,
    coeffs: Vec<Poly>,
}

impl PartialEq for MuPoly {
    fn eq(&self, other: &MuPoly) -> bool {
        self.ring.vars() == other.ring.vars() && self.coeffs == other.coeffs
    }
}

impl Eq for MuPoly {}

impl MuPoly {
    /// Coefficients must share variables; the field is promoted to the join.
    pub fn new(ring: &Ring, coeffs: Vec<Poly>) -> Result<Self> {
        let mut field = ring.field();
        for c in &coeffs {
            if c.vars() != ring.vars() {
                return Err(Error::VarMismatch { left: ring.vars().to_vec(), right: c.vars().to_vec() });
            }
            field = field.join(c.field());
        }
        let ring = ring.with_field(field);
        let coeffs = coeffs.into_iter().map(|c| c.with_field(field)).collect::<Result<_>>()?;
        Ok(MuPoly { ring, coeffs })
    }

    pub fn zero(ring: &Ring, m: usize) -> Self {
        MuPoly { ring: ring.clone(), coeffs: vec![Poly::zero(ring); m] }
    }

    /// `(1, 0, …, 0)`.
    pub fn unit(ring: &Ring, m: usize) -> Self {
        let mut v = MuPoly::zero(ring, m);
        if m > 0 {
            v.coeffs[0] = Poly::one(ring);
        }
        v
    }

    pub fn constant(ring: &Ring, values: &[Scalar]) -> Self {
        let coeffs = values.iter().map(|c| Poly::constant(ring, c.clone())).collect();
        MuPoly::new(ring, coeffs).expect("constants share the ring")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Poly> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Poly::is_constant)
    }

    /// Constant values, if every coefficient is constant.
    pub fn constant_values(&self) -> Option<Vec<Scalar>> {
        self.is_constant().then(|| self.coeffs.iter().map(Poly::constant_term).collect())
    }

    pub fn add(&self, other: &MuPoly) -> Result<MuPoly> {
        self.check_len(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        MuPoly::new(&self.ring, coeffs)
    }

    pub fn sub(&self, other: &MuPoly) -> Result<MuPoly> {
        self.check_len(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        MuPoly::new(&self.ring, coeffs)
    }

    pub fn scale(&self, c: &Scalar) -> MuPoly {
        let coeffs = self.coeffs.iter().map(|p| p.scale(c)).collect();
        MuPoly::new(&self.ring, coeffs).expect("same ring")
    }

    /// Every coefficient minus its value at the origin.
    pub fn without_constants(&self) -> MuPoly {
        MuPoly { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(Poly::without_constant).collect() }
    }

    /// `μ^s V_μ` as a vector of length `len + s`.
    pub fn shift(&self, s: usize) -> MuPoly {
        let mut coeffs = vec![Poly::zero(&self.ring); s];
        coeffs.extend(self.coeffs.iter().cloned());
        MuPoly { ring: self.ring.clone(), coeffs }
    }

    /// Ordinary (untruncated) product of the μ-polynomials.
    pub fn full_product(&self, other: &MuPoly) -> Vec<Poly> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Poly::zero(&self.ring); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        out
    }

    /// Rewrites every coefficient over `target` (see [`Poly::lift`]).
    pub fn lift(&self, target: &Ring) -> Result<MuPoly> {
        let coeffs = self.coeffs.iter().map(|c| c.lift(target)).collect::<Result<Vec<_>>>()?;
        MuPoly::new(target, coeffs)
    }

    fn check_len(&self, other: &MuPoly) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("μ-vectors of length {} and {}", self.len(), other.len())));
        }
        if self.ring.vars() != other.ring.vars() {
            return Err(Error::VarMismatch {
                left: self.ring.vars().to_vec(),
                right: other.ring.vars().to_vec(),
            });
        }
        Ok(())
    }
}

/// Companion matrix of a modulus: subdiagonal ones, last column `−Z_0 … −Z_{m−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanionMatrix(Matrix);

impl CompanionMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

pub fn companion_matrix(z: &Modulus) -> CompanionMatrix {
    let m = z.degree();
    let mut c = Matrix::zeros(m, m);
    for i in 1..m {
        c[(i, i - 1)] = Scalar::one();
    }
    for (i, zi) in z.coeffs().iter().enumerate() {
        c[(i, m - 1)] = -zi;
    }
    CompanionMatrix(c)
}

/// Things that can be combined linearly during division in μ.
trait Linear: Clone {
    /// `self − c·other`
    fn minus_scaled(&self, c: &Scalar, other: &Self) -> Self;
    fn zero_like(&self) -> Self;
}

impl Linear for Poly {
    fn minus_scaled(&self, c: &Scalar, other: &Self) -> Self {
        self - &other.scale(c)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(self.ring())
    }
}

impl Linear for OneForm {
    fn minus_scaled(&self, c: &Scalar, other: &Self) -> Self {
        self.sub(&other.scale(c))
    }
    fn zero_like(&self) -> Self {
        OneForm::new_unchecked(self.components().iter().map(|p| Poly::zero(p.ring())).collect())
    }
}

/// Long division of `Σ v_i μ^i` by monic `z`; returns (quotient, remainder of length m).
fn divide<T: Linear>(mut v: Vec<T>, z: &Modulus, zero: &T) -> (Vec<T>, Vec<T>) {
    let m = z.degree();
    let qlen = v.len().saturating_sub(m);
    let mut quotient = vec![zero.zero_like(); qlen];
    for d in (m..v.len()).rev() {
        let lead = v[d].clone();
        quotient[d - m] = lead.clone();
        for (i, zi) in z.coeffs().iter().enumerate() {
            if !zi.is_zero() {
                v[d - m + i] = v[d - m + i].minus_scaled(zi, &lead);
            }
        }
        v[d] = zero.zero_like();
    }
    v.truncate(m);
    while v.len() < m {
        v.push(zero.zero_like());
    }
    (quotient, v)
}

/// Remainder of `Σ V_i μ^i` modulo `Z_μ`, as a μ-vector of length m.
pub fn reduce_mod(ring: &Ring, v: &[Poly], z: &Modulus) -> Result<MuPoly> {
    let (_, rem) = divide(v.to_vec(), z, &Poly::zero(ring));
    MuPoly::new(ring, rem)
}

fn check_pair(v: &MuPoly, w: &MuPoly, z: &Modulus) -> Result<()> {
    let m = z.degree();
    if v.len() != m || w.len() != m {
        return Err(Error::Dimension(format!(
            "star product of lengths {} and {} under a degree-{m} modulus",
            v.len(),
            w.len()
        )));
    }
    if v.ring().vars() != w.ring().vars() {
        return Err(Error::VarMismatch { left: v.ring().vars().to_vec(), right: w.ring().vars().to_vec() });
    }
    Ok(())
}

/// `V * W`: remainder of the ordinary product modulo `Z_μ`.
pub fn star_product(v: &MuPoly, w: &MuPoly, z: &Modulus) -> Result<MuPoly> {
    check_pair(v, w, z)?;
    reduce_mod(v.ring(), &v.full_product(w), z)
}

/// `V * W` computed as `(Σ V_i C^i)(Σ W_i C^i) e_1 = (Σ V_i C^i) W`, where `C`
/// is the companion matrix. Independent of [`star_product`]; kept for cross-checks.
pub fn star_product_companion(v: &MuPoly, w: &MuPoly, z: &Modulus) -> Result<MuPoly> {
    check_pair(v, w, z)?;
    let m = z.degree();
    let c = companion_matrix(z).0;
    let mut power = Matrix::identity(m);
    let mut out = vec![Poly::zero(v.ring()); m];
    for vi in v.coeffs() {
        if !vi.is_zero() {
            for (k, slot) in out.iter_mut().enumerate() {
                for (l, wl) in w.coeffs().iter().enumerate() {
                    let e = &power[(k, l)];
                    if !e.is_zero() && !wl.is_zero() {
                        *slot = &*slot + &(vi * wl).scale(e);
                    }
                }
            }
        }
        power = power.mul(&c)?;
    }
    MuPoly::new(v.ring(), out)
}

pub fn star_power(v: &MuPoly, k: u32, z: &Modulus) -> Result<MuPoly> {
    let mut out = MuPoly::unit(v.ring(), z.degree());
    let mut base = v.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = star_product(&out, &base, z)?;
        }
        k >>= 1;
        if k > 0 {
            base = star_product(&base, &base, z)?;
        }
    }
    Ok(out)
}

/// `Σ_r a_r * base^r` for constant μ-vectors `a_r`.
pub fn star_series(a: &[MuPoly], base: &MuPoly, z: &Modulus) -> Result<MuPoly> {
    let mut out = MuPoly::zero(base.ring(), z.degree());
    let mut power = MuPoly::unit(base.ring(), z.degree());
    for (r, ar) in a.iter().enumerate() {
        if r > 0 {
            power = star_product(&power, base, z)?;
        }
        if !ar.is_constant() {
            return Err(Error::Dimension(format!("series coefficient {r} is not constant")));
        }
        let ar = ar.lift(base.ring())?;
        out = out.add(&star_product(&ar, &power, z)?)?;
    }
    Ok(out)
}

/// `A_μ = X + μI` with constant `X`, a modulus and the ambient variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSystem {
    x: Matrix,
    modulus: Modulus,
    ring: Ring,
}

impl StarSystem {
    pub fn new(x: Matrix, modulus: Modulus, ring: &Ring) -> Result<Self> {
        let n = ring.nvars();
        if x.rows() != n || x.cols() != n {
            return Err(Error::Dimension(format!("pencil base is {}x{} over {n} variables", x.rows(), x.cols())));
        }
        let field = ring.field().join(x.field()).join(modulus.field());
        Ok(StarSystem { x, modulus, ring: ring.with_field(field) })
    }

    pub fn pencil_base(&self) -> &Matrix {
        &self.x
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }
}

/// Result of [`check_solution`]: `A_μ∇V_μ = Z_μ u_μ + remainder`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCheck {
    pub is_solution: bool,
    pub quotient: Vec<OneForm>,
    pub remainder: Vec<OneForm>,
}

/// Divides `A_μ ∇V_μ` by `Z_μ`. Gradients are columns, so the μ^j coefficient
/// of the product is `X∇V_j + ∇V_{j−1}`.
pub fn check_solution(sys: &StarSystem, v: &MuPoly) -> Result<SolutionCheck> {
    let m = sys.degree();
    if v.len() != m {
        return Err(Error::Dimension(format!("μ-vector of length {} in a degree-{m} system", v.len())));
    }
    if v.ring().vars() != sys.ring().vars() {
        return Err(Error::VarMismatch { left: sys.ring().vars().to_vec(), right: v.ring().vars().to_vec() });
    }
    let grads: Vec<OneForm> = v.coeffs().iter().map(gradient).collect();
    let zero = OneForm::zero(v.ring());
    let mut product = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut c = if j < m { sys.x.apply_form(&grads[j])? } else { zero.clone() };
        if j > 0 {
            c = c.add(&grads[j - 1]);
        }
        product.push(c);
    }
    let (quotient, remainder) = divide(product, &sys.modulus, &zero);
    let is_solution = remainder.iter().all(OneForm::is_zero);
    Ok(SolutionCheck { is_solution, quotient, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn xy() -> Ring {
        Ring::new(["x", "y"], Field::Real)
    }

    fn cr_modulus() -> Modulus {
        Modulus::new(vec![Scalar::one(), Scalar::zero()]).unwrap()
    }

    fn cr_system() -> StarSystem {
        let x = Matrix::from_rows(vec![
            vec![Scalar::zero(), Scalar::from_int(-1)],
            vec![Scalar::one(), Scalar::zero()],
        ])
        .unwrap();
        StarSystem::new(x, cr_modulus(), &xy()).unwrap()
    }

    fn v(r: &Ring, name: &str) -> Poly {
        Poly::var(r, name).unwrap()
    }

    #[test]
    fn companion_examples() {
        let c = companion_matrix(&cr_modulus());
        assert_eq!(c.matrix().to_rows(), vec![
            vec![Scalar::zero(), Scalar::from_int(-1)],
            vec![Scalar::one(), Scalar::zero()]
        ]);
        let c = companion_matrix(&Modulus::one_plus_mu_sq_pow(2).unwrap());
        let last: Vec<Scalar> = (0..4).map(|i| c.matrix()[(i, 3)].clone()).collect();
        assert_eq!(last, [-1, 0, -2, 0].map(Scalar::from_int).to_vec());
        let shift = companion_matrix(&Modulus::mu_power(3).unwrap());
        assert_eq!(shift.matrix().nilpotency_index().unwrap(), 3);
    }

    #[test]
    fn reduce_examples() {
        let r = xy();
        let (x, y) = (v(&r, "x"), v(&r, "y"));
        let out = reduce_mod(&r, &[x.pow(2), (&x * &y).scale(&Scalar::from_int(2)), y.pow(2)], &cr_modulus())
            .unwrap();
        assert_eq!(out.coeffs(), &[&x.pow(2) - &y.pow(2), (&x * &y).scale(&Scalar::from_int(2))]);

        let one = Poly::one(&r);
        let zero = Poly::zero(&r);
        let out = reduce_mod(&r, &[zero.clone(), zero.clone(), zero.clone(), zero.clone(), one], &Modulus::mu_power(3).unwrap())
            .unwrap();
        assert!(out.is_zero() && out.len() == 3);

        let out = reduce_mod(&r, std::slice::from_ref(&x), &Modulus::mu_power(3).unwrap()).unwrap();
        assert_eq!(out.coeffs(), &[x, zero.clone(), zero]);
    }

    #[test]
    fn cr_product_and_cube() {
        let r = xy();
        let (x, y) = (v(&r, "x"), v(&r, "y"));
        let z = MuPoly::new(&r, vec![x.clone(), y.clone()]).unwrap();
        let sq = star_product(&z, &z, &cr_modulus()).unwrap();
        assert_eq!(sq.coeffs(), &[&x.pow(2) - &y.pow(2), (&x * &y).scale(&Scalar::from_int(2))]);
        assert_eq!(sq, star_product_companion(&z, &z, &cr_modulus()).unwrap());
        let cube = star_power(&z, 3, &cr_modulus()).unwrap();
        let three = Scalar::from_int(3);
        assert_eq!(cube.coeffs(), &[
            &x.pow(3) - &(&x * &y.pow(2)).scale(&three),
            &(&x.pow(2) * &y).scale(&three) - &y.pow(3)
        ]);
        assert_eq!(star_power(&z, 0, &cr_modulus()).unwrap(), MuPoly::unit(&r, 2));
    }

    #[test]
    fn truncated_square() {
        let r = Ring::new(["x0", "x1", "x2"], Field::Real);
        let xs: Vec<Poly> = (0..3).map(|i| Poly::var_index(&r, i)).collect();
        let vmu = MuPoly::new(&r, xs.clone()).unwrap();
        let sq = star_power(&vmu, 2, &Modulus::mu_power(3).unwrap()).unwrap();
        let two = Scalar::from_int(2);
        assert_eq!(sq.coeffs(), &[
            xs[0].pow(2),
            (&xs[0] * &xs[1]).scale(&two),
            &(&xs[0] * &xs[2]).scale(&two) + &xs[1].pow(2)
        ]);
    }

    #[test]
    fn cr_solution_checks() {
        let sys = cr_system();
        let r = xy();
        let (x, y) = (v(&r, "x"), v(&r, "y"));
        let good = MuPoly::new(&r, vec![&x.pow(2) - &y.pow(2), (&x * &y).scale(&Scalar::from_int(2))]).unwrap();
        let res = check_solution(&sys, &good).unwrap();
        assert!(res.is_solution);
        // The single quotient coefficient is ∇V_{m-1}.
        assert_eq!(res.quotient, vec![gradient(&good.coeffs()[1])]);
        let bad = MuPoly::new(&r, vec![y, Poly::zero(&r)]).unwrap();
        assert!(!check_solution(&sys, &bad).unwrap().is_solution);
        assert!(check_solution(&sys, &sys.modulus().tail(&r)).unwrap().is_solution);
    }

    #[test]
    fn nilpotent_solution_check() {
        let r = Ring::new(["x0", "x1", "x2"], Field::Real);
        let x: Vec<Poly> = (0..3).map(|i| Poly::var_index(&r, i)).collect();
        let mut neg_u = Matrix::zeros(3, 3);
        neg_u[(0, 1)] = Scalar::from_int(-1);
        neg_u[(1, 2)] = Scalar::from_int(-1);
        let sys = StarSystem::new(neg_u, Modulus::mu_power(3).unwrap(), &r).unwrap();
        let s = |k: i64| Scalar::from_int(k);
        let vmu = MuPoly::new(&r, vec![
            x[0].pow(2).scale(&s(2)),
            (&x[0] * &x[1]).scale(&s(4)),
            &(&x[0] * &x[2]).scale(&s(4)) + &x[1].pow(2).scale(&s(2)),
        ])
        .unwrap();
        assert!(check_solution(&sys, &vmu).unwrap().is_solution);
    }

    #[test]
    fn series_examples() {
        let r = xy();
        let z = MuPoly::new(&r, vec![v(&r, "x"), v(&r, "y")]).unwrap();
        let m = cr_modulus();
        let id = [MuPoly::zero(&r, 2), MuPoly::unit(&r, 2)];
        assert_eq!(star_series(&id, &z, &m).unwrap(), z);
        assert!(star_series(&[], &z, &m).unwrap().is_zero());
    }
}
