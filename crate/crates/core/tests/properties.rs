use std::sync::Arc;

use proptest::prelude::*;

use gwrecon::cone_h::{
    basis_from_matrix, flow_point, input_target, j_function, match_input, monomial_basis, Family, PhiPoly,
};
use gwrecon::job::{run, Caps, InputTerm, Job, Pipeline};
use gwrecon::poly::Poly;
use gwrecon::ratfn::RatFn;
use gwrecon::rational::{rat, zero};
use gwrecon::ring::{equivariant_projective_ring, ktheory_projective_ring, projective_ring};
use gwrecon::seed::{seed_terms, Target};
use gwrecon::{Algebra, HSeries, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=6, any::<bool>(), 1i64..=4).prop_map(|(n, neg, d)| rat(if neg { -n } else { n }, d))
}

fn cp2(q: u32, t: u32) -> Arc<Algebra> {
    Target::Projective { n: 3 }.algebra(&["s", "e"], q, t).unwrap()
}

// Terms of positive Q- or deformation degree, so exp and 1/(1+x) make sense.
fn nilpotent(alg: Arc<Algebra>) -> impl Strategy<Value = HSeries> {
    prop::collection::vec((-2i16..=1, 0usize..3, 0i16..=2, 0i16..=2, 0i16..=2, small_rat()), 0..6).prop_map(move |ts| {
        let terms = ts.into_iter().filter(|t| t.2 + t.3 + t.4 > 0).map(|(z, comp, q, s, e, c)| {
            let m = alg.mono_z(z).with(alg.nov_slot(0), q).with(alg.def_slot(0), s).with(alg.def_slot(1), e);
            ((m, comp as u8), c)
        });
        HSeries::from_terms(&alg, terms)
    })
}

fn ratfn() -> impl Strategy<Value = RatFn> {
    (-3i32..=3, prop::collection::vec(small_rat(), 1..5), prop::collection::vec(small_rat(), 1..4), nonzero_rat())
        .prop_map(|(shift, num, mut den, lead)| {
            den.push(lead);
            RatFn::new(shift, Poly::from_coeffs(num), Poly::from_coeffs(den))
        })
}

#[test]
fn ring_axioms() {
    for n in 1..=5 {
        projective_ring(n).unwrap().check_axioms().unwrap();
        ktheory_projective_ring(n).unwrap().check_axioms().unwrap();
        equivariant_projective_ring(n).unwrap().check_axioms().unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unit_inverse_round_trip(x in nilpotent(cp2(2, 2))) {
        let u = &HSeries::one(x.alg()) + &x;
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(&u * &inv, HSeries::one(x.alg()));
    }

    #[test]
    fn exp_is_a_homomorphism(a in nilpotent(cp2(2, 2)), b in nilpotent(cp2(2, 2))) {
        let b = b.retruncate(a.alg()).unwrap();
        prop_assert_eq!((&a + &b).exp().unwrap(), &a.exp().unwrap() * &b.exp().unwrap());
    }

    #[test]
    fn truncation_commutes_with_products(a in nilpotent(cp2(3, 3)), b in nilpotent(cp2(3, 3))) {
        let small = cp2(2, 1);
        let b = b.retruncate(a.alg()).unwrap();
        let lhs = (&a * &b).retruncate(&small).unwrap();
        let rhs = &a.retruncate(&small).unwrap() * &b.retruncate(&small).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn k_split_resums(f in ratfn()) {
        let (l, r) = f.k_split();
        prop_assert_eq!(&l + &r, f);
        prop_assert!(l.is_laurent_polynomial());
        prop_assert!(r.is_reduced());
    }

    #[test]
    fn output_tables_round_trip(dmax in 1u32..=2) {
        let job = Job { dmax: Some(dmax), ..Job::parse(r#"{"target":{"type":"projective","n":3},"pipeline":"nd-invariants","dmax":1}"#).unwrap() };
        let doc = run(&job).unwrap().document;
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Flowing a point of the cone keeps it on the cone: re-matching its
    // H₊ part reproduces its H₋ part.
    #[test]
    fn flow_preserves_the_cone(c0 in small_rat(), c1 in nonzero_rat(), e in nonzero_rat(), s in nonzero_rat(), k in 0u32..2) {
        let target = Target::Projective { n: 2 };
        let alg = target.algebra(&["s", "e"], 2, 2).unwrap();
        let f = Family::new(&alg, seed_terms(&target.seed().unwrap(), &alg).unwrap(), monomial_basis(2)).unwrap();
        let sv = HSeries::var(&alg, "s").unwrap().scale(&s);
        let m = match_input(&f, &input_target(&alg, &[(k, 1, sv)])).unwrap();
        let eps = HSeries::var(&alg, "e").unwrap().scale(&e);
        let g = flow_point(&m.point, &PhiPoly::from_p_coeffs(&[c0, c1]), &eps).unwrap();
        prop_assert_eq!(j_function(&f, &g.h_plus()).unwrap().h_minus(), g.h_minus());
    }

    // J(t) depends on t only, not on the basis Φ used to sweep the cone.
    #[test]
    fn j_is_basis_independent(a in nonzero_rat(), b in nonzero_rat(), c in nonzero_rat(), x in small_rat(), y in small_rat(), z in small_rat()) {
        let target = Target::Projective { n: 3 };
        let alg = target.algebra(&["s"], 2, 2).unwrap();
        let seed = seed_terms(&target.seed().unwrap(), &alg).unwrap();
        let input = input_target(&alg, &[(0, 1, HSeries::var(&alg, "s").unwrap())]);
        let plain = Family::new(&alg, seed.clone(), monomial_basis(3)).unwrap();
        let m = vec![vec![a, x, y], vec![zero(), b, z], vec![zero(), zero(), c]];
        let other = Family::new(&alg, seed, basis_from_matrix(&m)).unwrap();
        prop_assert_eq!(j_function(&other, &input).unwrap(), j_function(&plain, &input).unwrap());
    }

    #[test]
    fn jobs_round_trip(n in 1usize..=4, q in 1u32..=4, t in 0u32..=4, coeff in small_rat(), nov in 0u32..=2, power in 0i32..=2, pick in 0usize..3) {
        let (target, pipeline) = match pick {
            0 => (Target::Projective { n }, Pipeline::JFunction),
            1 => (Target::Equivariant { n, lambda_order: 2 }, Pipeline::Seed),
            _ => (Target::ProjectiveK { n }, Pipeline::KJFunction),
        };
        let vars = if nov == 0 { vec!["s".to_string()] } else { vec![] };
        let job = Job {
            schema: 1,
            target,
            pipeline,
            caps: Some(Caps { q_degree: q, def_degree: t, z_window: None }),
            basis: None,
            input: vec![InputTerm { power, index: n - 1, coeff: gwrecon::rational::to_canonical(&coeff), vars, novikov: nov }],
            dmax: None,
            directions: None,
            normalization: Default::default(),
        };
        let text = job.to_json();
        let back = Job::parse(&text).unwrap();
        prop_assert_eq!(&back, &job);
        prop_assert_eq!(back.to_json(), text);
    }
}
