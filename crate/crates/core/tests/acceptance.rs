//! Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.
//! Runs without the libtest harness so the report is always printed.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use starmul::complex::{
    build_matrices, decompose_by_eigenvalue, embed, extend_nilpotent, general_solution, nilpotent_system,
    reconstruct_star_series, verify_gradient, EigenBlocks, JordanSpecC,
};
use starmul::json::{matrix_to_json, poly_to_json};
use starmul::matrix::Matrix;
use starmul::poly::{Poly, Ring};
use starmul::random::{random_phis, random_poly, rng_from_seed, small_scalar};
use starmul::real::{
    basis_matrix, extend_real, f_k_eval, hypothesis_check, n_power_formula, pull_back, real_constants,
    real_general_solution, reconstruct_real, CoeffTable, JordanSpecR,
};
use starmul::scalar::{Field, Scalar};
use starmul::star::{check_solution, companion_matrix, star_power, star_product, Modulus, MuPoly, StarSystem};
use starmul::verify::random_sizes;
use starmul::{gradient, integrate_exact};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: starmul::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn var(ring: &Ring, name: &str) -> Poly {
    Poly::var(ring, name).expect("known variable")
}

fn c(n: i64) -> Scalar {
    Scalar::from_int(n)
}

// 1 ---------------------------------------------------------------------------

fn cr_algebra() -> Outcome {
    let ring = Ring::new(["x", "y"], Field::Real);
    let (x, y) = (var(&ring, "x"), var(&ring, "y"));
    let z = lib(Modulus::one_plus_mu_sq_pow(1))?;
    let v = lib(MuPoly::new(&ring, vec![x.clone(), y.clone()]))?;
    let sq = lib(star_product(&v, &v, &z))?;
    ensure(sq.coeffs()[0] == &(&x * &x) - &(&y * &y), || "real part of (x,y)*(x,y)".into())?;
    ensure(sq.coeffs()[1] == (&x * &y).scale(&c(2)), || "imaginary part of (x,y)*(x,y)".into())?;
    let cring = ring.with_field(Field::Complex);
    let zc = &var(&cring, "x") + &var(&cring, "y").scale(&Scalar::i());
    for k in 0..=8 {
        let p = lib(star_power(&v, k, &z))?;
        let w = zc.pow(k);
        ensure(p.coeffs()[0] == w.re_part() && p.coeffs()[1] == w.im_part(), || format!("power {k}"))?;
    }
    Ok(())
}

// 2 ---------------------------------------------------------------------------

fn exn5_matrix(spec: &JordanSpecC) -> Matrix {
    build_matrices(spec).m
}

fn exn5() -> Outcome {
    let (l1, l2) = (c(2), Scalar::i());
    let spec = lib(JordanSpecC::new(vec![
        EigenBlocks { lambda: l1.clone(), sizes: vec![2] },
        EigenBlocks { lambda: l2.clone(), sizes: vec![2, 1] },
    ]))?;
    let ring = spec.ring();
    ensure(ring.vars() == ["x1_1_0", "x1_1_1", "x2_1_0", "x2_1_1", "x2_2_0"], || "variable order".into())?;
    let (x0, x1) = (var(&ring, "x1_1_0"), var(&ring, "x1_1_1"));
    let (y0, y1, w0) = (var(&ring, "x2_1_0"), var(&ring, "x2_1_1"), var(&ring, "x2_2_0"));
    let g1 = &(&x0 * &x1).scale(&c(2)) + &x0.pow(3);
    let h1 = x0.pow(2);
    let g2 = &(&y0 * &w0.pow(2)) + &y1;
    let h2 = y0.clone();
    let f = &(&(&g1.scale(&l1) + &h1) + &g2.scale(&l2)) + &h2;
    let g = &g1 + &g2;

    let m = exn5_matrix(&spec);
    ensure(lib(verify_gradient(&m, &f, &g))?, || "∇f ≠ M∇g".into())?;
    check_grad_cli(&m, &f, &g)?;

    let parts = lib(decompose_by_eigenvalue(&spec, &f, &g))?;
    ensure(parts.len() == 2, || "two components".into())?;
    let r1 = spec.eigen_ring(0);
    let r2 = spec.eigen_ring(1);
    let f1 = lib((&g1.scale(&l1) + &h1).restrict(&r1))?;
    let f2 = lib((&g2.scale(&l2) + &h2).restrict(&r2))?;
    ensure(parts[0].f == f1 && parts[0].g == lib(g1.restrict(&r1))?, || "first component".into())?;
    ensure(parts[1].f == f2 && parts[1].g == lib(g2.restrict(&r2))?, || "second component".into())?;

    // First component: μ*(x0+μx1)³ + (x0+μx1)² in (X = −U1, Z = μ²).
    let z = lib(Modulus::mu_power(2))?;
    let xm = lib(MuPoly::new(&r1, vec![var(&r1, "x1_1_0"), var(&r1, "x1_1_1")]))?;
    let mu = MuPoly::constant(&r1, &[Scalar::zero(), Scalar::one()]);
    let v1 = lib(lib(star_product(&mu, &lib(star_power(&xm, 3, &z))?, &z))?.add(&lib(star_power(&xm, 2, &z))?))?;
    ensure(v1.coeffs()[1] == parts[0].g && Some(&v1.coeffs()[0]) == parts[0].h.as_ref(), || "first *-expression".into())?;
    let e1 = JordanSpecC::single(Scalar::zero(), vec![2]).expect("valid");
    let sys1 = lib(StarSystem::new(build_matrices(&e1).u.neg(), z.clone(), &r1))?;
    ensure(lib(check_solution(&sys1, &v1))?.is_solution, || "first expression is not a solution".into())?;

    // Second component: embed((y0²)², 1) * (y0¹+μy1¹) + (y0¹+μy1¹) in (X = −diag(U1, U0), Z = μ²).
    let e2 = JordanSpecC::single(Scalar::zero(), vec![2, 1]).expect("valid");
    let sys2 = lib(StarSystem::new(build_matrices(&e2).u.neg(), z.clone(), &r2))?;
    let small = Ring::new(["x2_2_0"], Field::Real);
    let inner = lib(MuPoly::new(&small, vec![var(&small, "x2_2_0").pow(2)]))?;
    let embedded = lib(embed(&inner, 1, &sys2))?;
    let ym = lib(MuPoly::new(&r2, vec![var(&r2, "x2_1_0"), var(&r2, "x2_1_1")]))?;
    let v2 = lib(lib(star_product(&embedded, &ym, &z))?.add(&ym))?;
    ensure(v2.coeffs()[1] == parts[1].g && Some(&v2.coeffs()[0]) == parts[1].h.as_ref(), || "second *-expression".into())?;
    ensure(lib(check_solution(&sys2, &v2))?.is_solution, || "second expression is not a solution".into())?;

    // Re-assembly: f = Σ (h_k + λ_k g_k), g = Σ g_k over the full variables.
    let lift = |p: &Poly| p.lift(&ring).expect("sub-ring");
    let f_back = &(&lift(&v1.coeffs()[0]) + &lift(&v1.coeffs()[1]).scale(&l1))
        + &(&lift(&v2.coeffs()[0]) + &lift(&v2.coeffs()[1]).scale(&l2));
    let g_back = &lift(&v1.coeffs()[1]) + &lift(&v2.coeffs()[1]);
    ensure(f_back == f && g_back == g, || "re-assembled pair differs".into())
}

fn check_grad_cli(m: &Matrix, f: &Poly, g: &Poly) -> Outcome {
    let dir = std::env::temp_dir().join(format!("starmul-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let write = |name: &str, v: serde_json::Value| {
        let p = dir.join(name);
        std::fs::write(&p, v.to_string()).expect("temp file");
        p
    };
    let (mp, fp, gp) = (write("M5.json", matrix_to_json(m)), write("f.json", poly_to_json(f)), write("g.json", poly_to_json(g)));
    let status = Command::new(env!("CARGO_BIN_EXE_starmul"))
        .args(["check-grad", "--matrix"])
        .arg(&mp)
        .arg("--f")
        .arg(&fp)
        .arg("--g")
        .arg(&gp)
        .output()
        .map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(status.status.code() == Some(0), || format!("check-grad exited with {:?}", status.status.code()))
}

// 3 ---------------------------------------------------------------------------

fn complex_one_block() -> Outcome {
    let mut rng = rng_from_seed(3);
    for size in [3usize, 4] {
        for trial in 0..50 {
            let lambda = small_scalar(&mut rng, true);
            let spec = lib(JordanSpecC::single(lambda, vec![size]))?;
            let phis = random_phis(&mut rng, &spec.eigenvalues()[0], 4, 5, Field::Complex);
            let sol = lib(general_solution(&spec, &phis))?;
            let v = lib(reconstruct_star_series(&spec, &phis))?;
            let n1 = size - 1;
            let h = sol.h.clone().expect("h");
            ensure(v.coeffs()[n1] == sol.g && v.coeffs()[n1 - 1] == h, || format!("block {size}, trial {trial}: top coefficients"))?;
            let ext = lib(extend_nilpotent(&build_matrices(&spec).u, &h, &sol.g))?;
            ensure(v.without_constants() == ext.without_constants(), || format!("block {size}, trial {trial}: extension"))?;
        }
    }
    Ok(())
}

// 4 ---------------------------------------------------------------------------

fn random_complex_table(rng: &mut ChaCha8Rng, e: &EigenBlocks) -> CoeffTable {
    let mut t = CoeffTable::default();
    for _ in 0..rng.gen_range(1..=4) {
        let k = rng.gen_range(0..e.sizes[0]);
        let mut index = vec![0u32; e.nu(k)];
        for _ in 0..rng.gen_range(0..=4) {
            let i = rng.gen_range(0..index.len());
            index[i] += 1;
        }
        t.insert(k, index, small_scalar(rng, true));
    }
    t
}

fn complex_multi_block() -> Outcome {
    let mut rng = rng_from_seed(4);
    for sizes in [vec![2usize, 1], vec![3, 2, 1]] {
        for trial in 0..50 {
            let spec = lib(JordanSpecC::single(Scalar::zero(), sizes.clone()))?;
            let e = spec.eigenvalues()[0].clone();
            let table = random_complex_table(&mut rng, &e);
            let phis = lib(table.to_phis(e.n1() + 1, |k| e.nu(k)))?;
            let sol = lib(general_solution(&spec, &phis))?;
            let v = lib(reconstruct_star_series(&spec, &phis))?;
            let n1 = e.n1();
            let ok = v.coeffs()[n1] == sol.g && Some(&v.coeffs()[n1 - 1]) == sol.h.as_ref();
            ensure(ok, || format!("blocks {sizes:?}, trial {trial}: differs from the general solution"))?;
            ensure(lib(check_solution(&lib(nilpotent_system(&spec))?, &v))?.is_solution, || format!("blocks {sizes:?}, trial {trial}: not a solution"))?;
        }
    }
    Ok(())
}

// 5 ---------------------------------------------------------------------------

fn real_spec(rng: &mut ChaCha8Rng) -> JordanSpecR {
    let sizes = [vec![1], vec![2], vec![3], vec![2, 1]][rng.gen_range(0..4)].clone();
    JordanSpecR::normalized_blocks(sizes).expect("valid")
}

fn real_solution(rng: &mut ChaCha8Rng, spec: &JordanSpecR) -> Result<(Poly, Poly), String> {
    let e = EigenBlocks { lambda: Scalar::i(), sizes: spec.sizes().to_vec() };
    lib(real_general_solution(spec, &random_phis(rng, &e, 3, 3, Field::Complex)))
}

fn star_closure() -> Outcome {
    let mut rng = rng_from_seed(5);
    for trial in 0..100 {
        let spec = lib(JordanSpecC::single(Scalar::zero(), random_sizes(&mut rng, 3, 6)))?;
        let e = spec.eigenvalues()[0].clone();
        let sys = lib(nilpotent_system(&spec))?;
        let v = lib(reconstruct_star_series(&spec, &random_phis(&mut rng, &e, 3, 3, Field::Complex)))?;
        let w = lib(reconstruct_star_series(&spec, &random_phis(&mut rng, &e, 3, 3, Field::Complex)))?;
        let p = lib(star_product(&v, &w, sys.modulus()))?;
        ensure(lib(check_solution(&sys, &p))?.is_solution, || format!("nilpotent trial {trial}"))?;
    }
    for trial in 0..100 {
        let spec = real_spec(&mut rng);
        let sys = lib(spec.system())?;
        let (f1, g1) = real_solution(&mut rng, &spec)?;
        let (f2, g2) = real_solution(&mut rng, &spec)?;
        let v = lib(extend_real(&spec, &f1, &g1))?;
        let w = lib(extend_real(&spec, &f2, &g2))?;
        let p = lib(star_product(&v, &w, sys.modulus()))?;
        ensure(lib(check_solution(&sys, &p))?.is_solution, || format!("real trial {trial}"))?;
    }
    Ok(())
}

// 6 ---------------------------------------------------------------------------

fn real_basis() -> Outcome {
    for n in 0..=4 {
        let basis = lib(basis_matrix(n))?;
        let comp = companion_matrix(&lib(Modulus::one_plus_mu_sq_pow(n + 1))?);
        let nb = lib(lib(basis.n_matrix())?.mul(&basis.b))?;
        ensure(nb == lib(basis.b.mul(comp.matrix()))?, || format!("−M^(−T)B ≠ BC at n = {n}"))?;
        let nm = lib(basis.n_matrix())?;
        for a in 0..=6 {
            ensure(n_power_formula(n, a) == lib(nm.pow(a as u32))?, || format!("N^{a} at n = {n}"))?;
        }
        if n <= 3 {
            ensure(lib(check_solution(&lib(basis.s_system())?, &basis.s_mu()))?.is_solution, || format!("s_μ at n = {n}"))?;
        }
    }
    ensure(lib(basis_matrix(0))?.b == Matrix::identity(2), || "B ≠ I at n = 0".into())
}

// 7 ---------------------------------------------------------------------------

fn real_reconstruction() -> Outcome {
    for n in 0..=2usize {
        let spec = lib(JordanSpecR::normalized_blocks(vec![n + 1]))?;
        let s1 = Ring::new(["s1"], Field::Complex);
        for k in 0..=n {
            for deg in 0..=4u32 {
                let phi = var(&s1, "s1").pow(deg);
                let oracle = lib(f_k_eval(&phi, k, &spec))?;
                let mut table = CoeffTable::default();
                table.insert(k, vec![deg], Scalar::one());
                let v = lib(reconstruct_real(&table, n, u32::MAX))?;
                let f = lib(pull_back(&spec, &oracle.f))?;
                let g = lib(pull_back(&spec, &oracle.g))?;
                ensure(v.coeffs()[0] == f && v.coeffs()[2 * n + 1] == g, || format!("n = {n}, k = {k}, N = {deg}"))?;
            }
        }
    }
    // n = 0: holomorphic powers of s1_0 + i s1_1.
    let ring = Ring::new(["s1_0", "s1_1"], Field::Complex);
    let z = &var(&ring, "s1_0") + &var(&ring, "s1_1").scale(&Scalar::i());
    for deg in 0..=4u32 {
        let mut table = CoeffTable::default();
        table.insert(0, vec![deg], Scalar::one());
        let v = lib(reconstruct_real(&table, 0, u32::MAX))?;
        let w = z.pow(deg);
        ensure(v.coeffs()[0] == w.re_part() && v.coeffs()[1] == w.im_part(), || format!("holomorphic power {deg}"))?;
    }
    ensure(real_constants(0).a[0] == [Scalar::one(), Scalar::zero()], || "a_0 ≠ 1".into())
}

// 8 ---------------------------------------------------------------------------

fn extension_roundtrips() -> Outcome {
    let mut rng = rng_from_seed(8);
    for trial in 0..100 {
        let lambda = small_scalar(&mut rng, true);
        let spec = lib(JordanSpecC::single(lambda, random_sizes(&mut rng, 3, 7)))?;
        let e = spec.eigenvalues()[0].clone();
        let sol = lib(general_solution(&spec, &random_phis(&mut rng, &e, 3, 4, Field::Complex)))?;
        let h = sol.h.clone().expect("h");
        let v = lib(extend_nilpotent(&build_matrices(&spec).u, &h, &sol.g))?;
        let r = v.len();
        let slots = v.coeffs()[r - 1] == sol.g && (r < 2 || v.coeffs()[r - 2] == h);
        ensure(slots, || format!("complex trial {trial}: designated slots"))?;
        ensure(lib(check_solution(&lib(nilpotent_system(&spec))?, &v))?.is_solution, || format!("complex trial {trial}"))?;
    }
    for trial in 0..100 {
        let spec = real_spec(&mut rng);
        let (f, g) = real_solution(&mut rng, &spec)?;
        let v = lib(extend_real(&spec, &f, &g))?;
        ensure(v.coeffs()[0] == f && v.coeffs()[v.len() - 1] == g, || format!("real trial {trial}: designated slots"))?;
        ensure(lib(check_solution(&lib(spec.system())?, &v))?.is_solution, || format!("real trial {trial}"))?;
    }
    Ok(())
}

// 9 ---------------------------------------------------------------------------

fn integration_oracle() -> Outcome {
    let mut rng = rng_from_seed(9);
    for trial in 0..200 {
        let n = rng.gen_range(1..=6);
        let ring = Ring::new((0..n).map(|i| format!("x{i}")), Field::Complex);
        let p = random_poly(&mut rng, &ring, 8, 6);
        let back = lib(integrate_exact(&gradient(&p)))?;
        ensure(back == &p - &Poly::constant(&ring, p.constant_term()), || format!("trial {trial}"))?;
    }
    Ok(())
}

// 10 --------------------------------------------------------------------------

fn hypothesis_harness() -> Outcome {
    let spec = lib(JordanSpecR::normalized_blocks(vec![2, 1]))?;
    let mut rng = rng_from_seed(10);
    for trial in 0..6 {
        let table = starmul::random::random_coeff_table(&mut rng, &spec, 3, 3, trial % 2 == 1);
        for t in 0..=3 {
            let report = lib(hypothesis_check(&spec, &table, t))?;
            ensure(report == lib(hypothesis_check(&spec, &table, t))?, || "report is not deterministic".into())?;
            let consistent = report.residual.iter().all(Scalar::is_zero);
            let well_formed = if report.agree {
                consistent && report.certificate.is_none() && report.constants.is_some()
            } else {
                !consistent && report.certificate.is_some()
            };
            ensure(well_formed, || format!("trial {trial}, truncation {t}: malformed report"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("CR algebra", cr_algebra, Some(Duration::from_secs(1))),
        ("five-variable example end to end", exn5, Some(Duration::from_secs(1))),
        ("complex one-block reconstruction", complex_one_block, Some(Duration::from_secs(30))),
        ("complex multi-block reconstruction", complex_multi_block, Some(Duration::from_secs(60))),
        ("star closure", star_closure, None),
        ("real basis", real_basis, Some(Duration::from_secs(5))),
        ("real reconstruction", real_reconstruction, Some(Duration::from_secs(60))),
        ("extension roundtrips", extension_roundtrips, None),
        ("integration oracle", integration_oracle, None),
        ("hypothesis harness", hypothesis_harness, None),
    ];
    let mut failed = 0;
    for (i, (name, run, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(b)) = (&result, bound) {
            if elapsed > *b {
                result = Err(format!("took {elapsed:.2?}, bound {b:?}"));
            }
        }
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
