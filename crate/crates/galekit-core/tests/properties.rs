//! Property-based invariants across the core modules.

use proptest::prelude::*;

use galekit_core::bitseq::{cylinder_union, CylinderFamily, SequenceSource, Word};
use galekit_core::complexity::ComplexityModel;
use galekit_core::gales::{check_averaging, random_martingale, to_s_gale};
use galekit_core::transforms::{dilute, undilute, SelectionRule};
use galekit_core::{ratio, Q};

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(any::<bool>(), 0..=max_len).prop_map(Word::from_bits)
}

fn family_strategy() -> impl Strategy<Value = CylinderFamily> {
    proptest::collection::vec(word_strategy(6), 0..5).prop_map(CylinderFamily::from_generators)
}

fn source_strategy() -> impl Strategy<Value = SequenceSource> {
    prop_oneof![
        Just(SequenceSource::zeros()),
        any::<u64>().prop_map(SequenceSource::seeded_random),
        proptest::collection::vec(any::<bool>(), 1..8)
            .prop_map(|p| SequenceSource::periodic(&Word::from_bits(p)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any family's exact measure equals the sum of its generators' dyadic
    /// measures, and union never exceeds the sum of the parts.
    #[test]
    fn cylinder_measures_exact(a in family_strategy(), b in family_strategy()) {
        let sum_a: Q = a.generators().iter().map(Word::cylinder_measure).sum();
        prop_assert_eq!(a.measure(), &sum_a);
        let u = cylinder_union(&[a.clone(), b.clone()]);
        prop_assert!(u.measure() <= &(a.measure() + b.measure()));
        // Idempotence and commutativity on the measure/generator semantics.
        let uu = cylinder_union(&[u.clone(), u.clone()]);
        prop_assert_eq!(uu.generators(), u.generators());
        let vu = cylinder_union(&[b, a]);
        prop_assert_eq!(vu.generators(), u.generators());
    }

    /// Prefix determinism: shorter requests agree with longer ones bitwise.
    #[test]
    fn prefix_determinism(src in source_strategy(), n in 0usize..128, m in 0usize..128) {
        let (short, long) = (n.min(m), n.max(m));
        let a = src.prefix(short).unwrap();
        let b = src.prefix(long).unwrap();
        prop_assert!(a.is_prefix_of(&b));
    }

    /// The selected subsequence map is monotone: phi(w) is a prefix of
    /// phi(wx) for any extension.
    #[test]
    fn phi_monotone(w in word_strategy(12), ext in word_strategy(6)) {
        for rule in [SelectionRule::all(), SelectionRule::even_length(), SelectionRule::powers_of_two()] {
            let wx = w.concat(&ext);
            prop_assert!(rule.phi(&w).is_prefix_of(&rule.phi(&wx)));
        }
    }

    /// Randomly generated finitely-supported martingales satisfy the exact
    /// averaging law; their derived s-gales satisfy the taxed law.
    #[test]
    fn random_martingales_average(seed in any::<u64>(), depth in 1u32..6) {
        let d = random_martingale(seed, depth);
        prop_assert!(check_averaging(&d, depth + 1).unwrap().ok());
        let g = to_s_gale(&d, &ratio(1, 2)).unwrap();
        prop_assert!(check_averaging(&g, depth + 1).unwrap().ok());
    }

    /// dilute/undilute is the identity for any admissible rational rate.
    #[test]
    fn dilution_roundtrip(p in 1i64..12, q in 2i64..13, seed in any::<u64>()) {
        prop_assume!(p < q);
        let alpha = ratio(p, q);
        let src = SequenceSource::seeded_random(seed);
        let back = undilute(&alpha, &dilute(&alpha, &src).unwrap()).unwrap();
        prop_assert_eq!(back.prefix(256).unwrap(), src.prefix(256).unwrap());
    }

    /// The incremental coder agrees with the one-shot code length at every
    /// prefix, and the code length is subadditive up to the pairing cost.
    #[test]
    fn coder_prefix_consistency(bits in proptest::collection::vec(any::<bool>(), 0..48)) {
        let model = ComplexityModel::v1();
        let lengths = model.code_lengths_of_prefixes(&bits);
        for n in 0..=bits.len() {
            let w = Word::from_bits(bits[..n].to_vec());
            prop_assert_eq!(lengths[n], model.code_length(&w));
        }
        if bits.len() >= 2 {
            let mid = bits.len() / 2;
            let whole = lengths[bits.len()];
            let left = model.code_length(&Word::from_bits(bits[..mid].to_vec()));
            let right = model.code_length(&Word::from_bits(bits[mid..].to_vec()));
            prop_assert!(whole <= left + right + model.c_pair());
        }
    }
}
