use proptest::prelude::*;

use starmul::complex::{
    build_matrices, extend_nilpotent, general_solution, nilpotent_system, psi_bell, psi_multinomial,
    reconstruct_star_series, JordanSpecC,
};
use starmul::json::{mupoly_from_json, mupoly_to_json, poly_from_json, poly_to_json, scalar_from_json, scalar_to_json};
use starmul::random::{random_phis, rng_from_seed, small_scalar};
use starmul::scalar::rational;
use starmul::star::{reduce_mod, star_product_companion};
use starmul::verify::random_sizes;
use starmul::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=5, -3i64..=3).prop_map(|(p, q, im)| Scalar::new(rational(p, q), rational(im, 2)))
}

fn real_scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| Scalar::ratio(p, q))
}

fn ring(n: usize) -> Ring {
    Ring::new((0..n).map(|i| format!("x{i}")), Field::Complex)
}

fn poly(n: usize, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..4, n), scalar()), 0..=max_terms)
        .prop_map(move |terms| Poly::from_terms(&ring(n), terms).expect("valid terms"))
}

fn modulus() -> impl Strategy<Value = Modulus> {
    prop::collection::vec(real_scalar(), 1..=4).prop_map(|z| Modulus::new(z).expect("nonempty"))
}

fn mupoly(n: usize, m: usize) -> impl Strategy<Value = MuPoly> {
    prop::collection::vec(poly(n, 4), m).prop_map(move |cs| MuPoly::new(&ring(n), cs).expect("same ring"))
}

/// A modulus together with three μ-vectors of its degree.
fn triple() -> impl Strategy<Value = (Modulus, MuPoly, MuPoly, MuPoly)> {
    modulus().prop_flat_map(|z| {
        let m = z.degree();
        (Just(z), mupoly(2, m), mupoly(2, m), mupoly(2, m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_product_is_commutative_and_associative((z, u, v, w) in triple()) {
        prop_assert_eq!(star_product(&u, &v, &z).unwrap(), star_product(&v, &u, &z).unwrap());
        let left = star_product(&star_product(&u, &v, &z).unwrap(), &w, &z).unwrap();
        let right = star_product(&u, &star_product(&v, &w, &z).unwrap(), &z).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn companion_route_agrees((z, u, v, _) in triple()) {
        prop_assert_eq!(star_product(&u, &v, &z).unwrap(), star_product_companion(&u, &v, &z).unwrap());
    }

    #[test]
    fn product_minus_star_product_is_divisible((z, u, v, _) in triple()) {
        let mut diff = u.full_product(&v);
        for (slot, c) in star_product(&u, &v, &z).unwrap().coeffs().iter().enumerate() {
            diff[slot] = &diff[slot] - c;
        }
        prop_assert!(reduce_mod(u.ring(), &diff, &z).unwrap().is_zero());
    }

    #[test]
    fn star_unit_is_neutral((z, u, _, _) in triple()) {
        let one = MuPoly::unit(u.ring(), z.degree());
        prop_assert_eq!(star_product(&one, &u, &z).unwrap(), u);
    }

    #[test]
    fn gradients_integrate_back(p in poly(3, 8)) {
        let omega = gradient(&p);
        prop_assert!(is_closed(&omega));
        let back = integrate_exact(&omega).unwrap();
        prop_assert_eq!(back, &p - &Poly::constant(p.ring(), p.constant_term()));
    }

    #[test]
    fn json_roundtrips(p in poly(3, 6), v in mupoly(2, 3), c in scalar()) {
        prop_assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
        prop_assert_eq!(mupoly_from_json(&mupoly_to_json(&v)).unwrap(), v);
        prop_assert_eq!(scalar_from_json(&scalar_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn constant_vectors_are_trivial_solutions(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let spec = JordanSpecC::single(Scalar::zero(), random_sizes(&mut rng, 3, 6)).unwrap();
        let sys = nilpotent_system(&spec).unwrap();
        let values: Vec<Scalar> = (0..sys.degree()).map(|_| small_scalar(&mut rng, true)).collect();
        let v = MuPoly::constant(sys.ring(), &values);
        prop_assert!(check_solution(&sys, &v).unwrap().is_solution);
    }

    #[test]
    fn psi_routes_agree(n in 0usize..5, i in 0u32..7, j in 0u32..5) {
        let j = j.min(n as u32);
        let ring = Ring::new((0..=n).map(|k| format!("x{k}")), Field::Real);
        let vars: Vec<usize> = (0..=n).collect();
        prop_assert_eq!(psi_multinomial(&ring, &vars, i, j), psi_bell(&ring, &vars, i, j));
    }

    #[test]
    fn general_solutions_extend_and_reconstruct(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let spec = JordanSpecC::single(small_scalar(&mut rng, true), random_sizes(&mut rng, 3, 6)).unwrap();
        let e = spec.eigenvalues()[0].clone();
        let phis = random_phis(&mut rng, &e, 3, 4, Field::Complex);
        let sol = general_solution(&spec, &phis).unwrap();
        let h = sol.h.clone().unwrap();
        let ext = extend_nilpotent(&build_matrices(&spec).u, &h, &sol.g).unwrap();
        let rec = reconstruct_star_series(&spec, &phis).unwrap();
        prop_assert_eq!(rec.without_constants(), ext.without_constants());
        prop_assert!(check_solution(&nilpotent_system(&spec).unwrap(), &rec).unwrap().is_solution);
    }
}
