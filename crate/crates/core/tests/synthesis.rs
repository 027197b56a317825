mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::measures::{parry_measure, InvariantMeasure};
use symdyn::synthesis::{
    certify, glue, in_support_language, measure_fact, synthesize_witness, GapClass, KStructure, OrbitPrefix,
    SegmentSource, SupportFact,
};
use symdyn::{Error, Potential, ShiftSpace, Word};

use common::{indicator_one, random_primitive};

const N: usize = 1 << 15;

fn witness(s: &ShiftSpace, class: GapClass, seed: u64, prefix: Option<&Word>) -> OrbitPrefix {
    synthesize_witness(s, class, &indicator_one(s), N, seed, prefix).unwrap()
}

/// Symbols of a non-random segment, rebuilt from its description alone.
fn rebuild(src: &SegmentSource, len: usize) -> Option<Vec<usize>> {
    match src {
        SegmentSource::Literal { word } => Some(word.0.clone()),
        SegmentSource::Cycle { cycle } => Some((0..len).map(|i| cycle[i % cycle.len()]).collect()),
        SegmentSource::Minimal { generator, offset } => Some(generator.generate(*offset, len).0),
        SegmentSource::Markov { .. } => None,
    }
}

fn check_windows(s: &ShiftSpace, o: &OrbitPrefix) {
    let cert = &o.certificate;
    let bp = s.higher_block(cert.block_len);
    let x = &o.word;
    let mut last_end = 0;
    for (i, seg) in cert.schedule.segments.iter().enumerate() {
        assert!(seg.start >= last_end, "segment {i} overlaps");
        if i > 0 {
            assert_eq!(seg.start - last_end, cert.schedule.bridge_len, "gap before segment {i}");
        }
        let end = (seg.start + seg.len).min(x.len());
        let window = &x[seg.start..end];
        match rebuild(&seg.source, seg.len) {
            Some(expect) => assert_eq!(window, &expect[..window.len()], "segment {i}"),
            None => {
                let SegmentSource::Markov { measure } = &seg.source else { unreachable!() };
                let m = cert.measure(measure).unwrap();
                assert!(in_support_language(&bp, m, window), "segment {i} leaves the support of {measure}");
            }
        }
        last_end = seg.start + seg.len;
    }
    assert!(last_end >= x.len());
}

fn chain_entropies(o: &OrbitPrefix) -> Vec<f64> {
    let cert = &o.certificate;
    match &cert.k_structure {
        KStructure::Segment { left, right } => vec![cert.measure(left).unwrap().entropy(), cert.measure(right).unwrap().entropy()],
        KStructure::Singleton { measure } => vec![cert.measure(measure).unwrap().entropy()],
        KStructure::Chain { base, links } => {
            let b = cert.measure(base).unwrap();
            links
                .iter()
                .map(|l| InvariantMeasure::mix(l.theta, b.clone(), cert.measure(&l.cycle).unwrap().clone()).entropy())
                .collect()
        }
        KStructure::Minimal { .. } => vec![0.0],
    }
}

#[test]
fn every_class_glues_exactly_and_certifies() {
    let s = ShiftSpace::full(2);
    for class in GapClass::ALL {
        let o = witness(&s, class, 3, None);
        assert_eq!(o.word.len(), N, "{class}");
        assert!(s.is_admissible(&o.word).unwrap(), "{class}");
        check_windows(&s, &o);
        certify(&o).unwrap_or_else(|e| panic!("{class}: {e}"));
        let inf = chain_entropies(&o).into_iter().fold(f64::INFINITY, f64::min);
        assert!((inf - o.certificate.inf_entropy_over_k).abs() <= 1e-12, "{class}: {inf}");
    }
}

#[test]
fn golden_mean_witnesses_certify() {
    let s = ShiftSpace::golden_mean();
    for class in GapClass::ALL {
        let o = witness(&s, class, 9, None);
        assert!(s.is_admissible(&o.word).unwrap(), "{class}");
        check_windows(&s, &o);
        certify(&o).unwrap_or_else(|e| panic!("{class}: {e}"));
    }
}

#[test]
fn synthesis_is_deterministic() {
    let s = ShiftSpace::full(2);
    for class in GapClass::ALL {
        let a = witness(&s, class, 17, None);
        let b = witness(&s, class, 17, None);
        assert_eq!(a.word, b.word, "{class}");
        assert_eq!(a.certificate, b.certificate, "{class}");
    }
    let a = witness(&s, GapClass::VNotW, 1, None);
    let b = witness(&s, GapClass::VNotW, 2, None);
    assert_ne!(a.word, b.word);
}

#[test]
fn edited_entropy_fact_is_rejected() {
    let s = ShiftSpace::full(2);
    let mut o = witness(&s, GapClass::WNotQr, 1, None);
    o.certificate.facts[0].entropy += 1e-6;
    assert!(matches!(certify(&o), Err(Error::CertificateMismatch(_))));
}

#[test]
fn full_support_measure_cannot_pose_as_proper() {
    let s = ShiftSpace::full(2);
    let phi = indicator_one(&s);
    let mut o = witness(&s, GapClass::VNotW, 1, None);
    let cert = &mut o.certificate;
    let bp = s.higher_block(cert.block_len);
    let parry = parry_measure(bp.shift()).unwrap();
    for nm in cert.measures.iter_mut().filter(|m| m.name == "mu") {
        nm.measure = parry.clone();
    }
    let lifted = phi.lift(&bp);
    for f in cert.facts.iter_mut() {
        let m = cert.measures.iter().find(|m| m.name == f.name).unwrap();
        *f = measure_fact(&f.name, &m.measure, bp.shift(), &lifted).unwrap();
    }
    let err = certify(&o).unwrap_err();
    assert!(matches!(err, Error::CertificateMismatch(_)), "{err}");
}

#[test]
fn tampered_symbol_is_rejected() {
    let s = ShiftSpace::full(2);
    let mut o = witness(&s, GapClass::RFullSupport, 1, None);
    let seg = &o.certificate.schedule.segments[0];
    let i = seg.start + seg.len / 2;
    o.word.0[i] ^= 1;
    assert!(matches!(certify(&o), Err(Error::CertificateMismatch(_))));
}

#[test]
fn truncated_word_still_certifies() {
    let s = ShiftSpace::full(2);
    let mut o = witness(&s, GapClass::INotQw, 5, None);
    o.word.0.truncate(N / 4);
    certify(&o).unwrap();
}

#[test]
fn required_support_facts_are_present() {
    let s = ShiftSpace::full(2);
    let o = witness(&s, GapClass::QwNotV, 1, None);
    assert!(o.certificate.support_facts.contains(&SupportFact::ChainSupportsProper));
    let o = witness(&s, GapClass::QrNotErgNotA, 1, None);
    assert!(o.certificate.support_facts.iter().any(|f| matches!(f, SupportFact::NonErgodic { .. })));
}

#[test]
fn non_primitive_shift_is_refused() {
    let s = ShiftSpace::from_matrix(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
    let phi = Potential::indicator(&s, 1);
    let err = synthesize_witness(&s, GapClass::RFullSupport, &phi, N, 0, None).unwrap_err();
    assert!(matches!(err, Error::NotPrimitive));
}

fn random_word(s: &ShiftSpace, rng: &mut ChaCha8Rng, len: usize) -> Word {
    let mut w = vec![rng.gen_range(0..s.k())];
    while w.len() < len {
        let succ: Vec<usize> = s.successors(*w.last().unwrap()).collect();
        w.push(succ[rng.gen_range(0..succ.len())]);
    }
    Word(w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn glued_words_keep_their_segments(seed in any::<u64>(), k in 2usize..=4, parts in 1usize..5) {
        let s = random_primitive(k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segs: Vec<Word> = (0..parts).map(|_| { let l = rng.gen_range(1..6); random_word(&s, &mut rng, l) }).collect();
        let g = glue(&s, &segs).unwrap();
        prop_assert!(s.is_admissible(&g).unwrap());
        let m = s.primitive_gap().unwrap();
        let mut pos = 0;
        for w in &segs {
            prop_assert_eq!(&g[pos..pos + w.len()], &w[..]);
            pos += w.len() + m;
        }
        prop_assert_eq!(g.len(), pos - m);
    }

    #[test]
    fn witnesses_start_with_pinned_prefix(seed in any::<u64>(), len in 1usize..=8, class in 0usize..8) {
        let s = ShiftSpace::golden_mean();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_word(&s, &mut rng, len);
        let class = GapClass::ALL[class];
        let o = synthesize_witness(&s, class, &indicator_one(&s), 1 << 13, seed, Some(&p)).unwrap();
        prop_assert_eq!(&o.word[..len], &p[..]);
        prop_assert!(certify(&o).is_ok());
    }
}
