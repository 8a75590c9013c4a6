use fgf_core::interpretation::{
    decode_function, encode_function, free_factor_relation, BasisSplit, FiniteFunction, FreeFactorHandle,
};
use fgf_core::involutions::{build_conjugator, decompose_inverted, CanonicalData};
use fgf_core::whitehead::{is_primitive, minimize};
use fgf_core::{FreeGroupContext, GeneratorMap, SubgroupGraph, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 3;

fn ctx() -> FreeGroupContext {
    FreeGroupContext::new(N).unwrap()
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=N as i32, any::<bool>()), 0..=max_len).prop_map(|v| {
        let letters: Vec<i32> = v.into_iter().map(|(g, inv)| if inv { -g } else { g }).collect();
        Word::reduce(&letters, ctx()).unwrap()
    })
}

fn nonempty_word(max_len: usize) -> impl Strategy<Value = Word> {
    word(max_len).prop_filter("non-trivial", |w| !w.is_identity())
}

fn automorphism() -> impl Strategy<Value = (GeneratorMap, GeneratorMap)> {
    (any::<u64>(), 0..8usize)
        .prop_map(|(seed, len)| GeneratorMap::random_with_inverse(ctx(), len, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn canonical(allow_swaps: bool) -> impl Strategy<Value = CanonicalData> {
    (2..=5usize, any::<u64>()).prop_map(move |(n, seed)| {
        CanonicalData::random(FreeGroupContext::new(n).unwrap(), allow_swaps, &mut ChaCha8Rng::seed_from_u64(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn words_form_a_group(a in word(10), b in word(10), c in word(10)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a * &a.invert()).is_identity());
        prop_assert_eq!(Word::reduce(a.letters(), ctx()).unwrap(), a.clone());
        prop_assert!(a.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!((&a * &b).invert(), &b.invert() * &a.invert());
    }

    #[test]
    fn shortlex_refines_length(a in word(8), b in word(8)) {
        if a.len() < b.len() {
            prop_assert!(a < b);
        }
        prop_assert_eq!(a == b, a.cmp(&b) == std::cmp::Ordering::Equal);
    }

    #[test]
    fn cyclic_reduction_conjugates(a in word(12)) {
        let (core, conj) = a.cyclic_reduce();
        prop_assert_eq!(core.conjugate_by(&conj), a.clone());
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(core.len(), a.cyclic_len());
    }

    #[test]
    fn maps_are_homomorphisms((f, _) in automorphism(), u in word(8), v in word(8)) {
        prop_assert_eq!(f.apply(&(&u * &v)), &f.apply(&u) * &f.apply(&v));
    }

    #[test]
    fn inverses_and_matrices((f, f_inv) in automorphism(), (g, _) in automorphism()) {
        prop_assert!(f.is_automorphism());
        let computed = f.inverse().unwrap();
        prop_assert_eq!(&computed, &f_inv);
        prop_assert!(f.compose(&computed).is_identity());
        prop_assert_eq!(f.induced_matrix().determinant().abs(), 1);
        prop_assert_eq!(f.compose(&g).induced_matrix(), f.induced_matrix().mul(&g.induced_matrix()));
    }

    #[test]
    fn stallings_membership(g1 in nonempty_word(6), g2 in nonempty_word(6), w in word(8),
                            picks in prop::collection::vec((0..2usize, any::<bool>()), 0..6)) {
        let gens = [g1, g2];
        let h = SubgroupGraph::build(ctx(), &gens);
        let product = picks.iter().fold(ctx().identity(), |acc, &(i, inv)| {
            &acc * &if inv { gens[i].invert() } else { gens[i].clone() }
        });
        prop_assert!(h.contains(&product));
        prop_assert!(SubgroupGraph::build(ctx(), &h.basis()).same_subgroup(&h));
        let k = SubgroupGraph::build(ctx(), &[w.clone(), ctx().generator(1)]);
        let meet = h.intersect(&k);
        for probe in [&w, &product, &gens[0]] {
            prop_assert_eq!(meet.contains(probe), h.contains(probe) && k.contains(probe));
        }
    }

    #[test]
    fn whitehead_minimization(w in nonempty_word(10), (f, _) in automorphism()) {
        let (min, witness) = minimize(&w).unwrap();
        prop_assert_eq!(witness.apply(&w), min.clone());
        prop_assert!(min.len() <= w.cyclic_len());
        prop_assert_eq!(is_primitive(&w).unwrap(), is_primitive(&f.apply(&w)).unwrap());
        prop_assert!(is_primitive(&f.apply(&ctx().generator(2))).unwrap());
    }

    #[test]
    fn canonical_forms_are_involutions(d in canonical(true)) {
        let f = d.realize();
        prop_assert!(f.compose(&f).is_identity());
    }

    #[test]
    fn relabelings_are_conjugate(d in canonical(false), seed in any::<u64>()) {
        let e = d.random_relabeling(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = build_conjugator(&d, &e).unwrap();
        prop_assert_eq!(s.inverse().unwrap().compose(&d.realize().compose(&s)), e.realize());
    }

    #[test]
    fn inverted_elements_reconstruct(d in canonical(false), seed in any::<u64>(), delta in 0..2i64) {
        let c = d.context();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fgf_core::words::random_word(c, 8, &mut rng);
        let phi = d.realize();
        let base = match d.blocks().first() {
            Some(b) => c.generator(b.x).pow(delta),
            None => c.identity(),
        };
        let a = &(&phi.apply(&w) * &base) * &w.invert();
        let form = decompose_inverted(&d, &a).unwrap();
        prop_assert_eq!(form.reconstruct(&phi), a);
    }

    #[test]
    fn encode_decode_round_trip(m in 1..=8usize, seed in any::<u64>()) {
        let f = FiniteFunction::random(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let split = BasisSplit::standard(m).unwrap();
        let sigma = encode_function(&f, &split).unwrap();
        prop_assert_eq!(decode_function(&sigma, &split).unwrap(), f);
    }

    #[test]
    fn factor_relation_is_symmetric(b_mask in 0u32..16, c_mask in 0u32..16, a_mask in 0u32..16) {
        let c4 = FreeGroupContext::new(4).unwrap();
        let handle = |mask: u32| {
            let idx: Vec<usize> = (1..=4).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            FreeFactorHandle::standard(c4, &idx).unwrap()
        };
        let (a, b, c) = (handle(a_mask), handle(b_mask), handle(c_mask));
        let r = free_factor_relation(&a, &b, &c).unwrap();
        prop_assert_eq!(r, free_factor_relation(&a, &c, &b).unwrap());
        prop_assert_eq!(r, b_mask & c_mask == 0 && b_mask | c_mask == a_mask);
    }
}
