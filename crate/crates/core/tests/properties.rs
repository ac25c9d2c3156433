use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use doodle_core::codec::{emit_gauss, from_json, parse_gauss, parse_pd, to_json};
use doodle_core::families::{borromean, gyro, hopf, ortho, trivial};
use doodle_core::moves::{apply_h2_plus, apply_site, find_sites, random_expansion, reduce, ArcRef, Strategy as Reduction};
use doodle_core::virtualization::{drawing_genus, planarize_seeded};
use doodle_core::{canonical_code, CanonicalCode, DoodleMap, Mode};

fn bases() -> Vec<DoodleMap> {
    vec![
        trivial(1),
        trivial(2),
        hopf(),
        borromean(3).unwrap(),
        borromean(4).unwrap(),
        gyro(3).unwrap(),
        ortho(3).unwrap(),
        hopf().disjoint_union(&borromean(3).unwrap()),
    ]
}

/// A random, usually non-minimal, diagram.
fn diagram() -> impl Strategy<Value = DoodleMap> {
    (0..8usize, 0..6usize, any::<u64>()).prop_map(|(b, steps, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_expansion(&bases()[b], steps, &mut rng)
    })
}

fn relabelled(m: &DoodleMap, seed: u64) -> DoodleMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = m.crossing_count();
    let mut perm: Vec<usize> = (0..v).collect();
    perm.shuffle(&mut rng);
    let shift: Vec<usize> = (0..v).map(|_| rng.gen_range(0..4)).collect();
    m.relabel(&perm, &shift)
}

fn code(m: &DoodleMap, mode: Mode) -> CanonicalCode {
    canonical_code(m, mode)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_code_ignores_crossing_names(m in diagram(), seed in any::<u64>()) {
        let r = relabelled(&m, seed);
        for mode in Mode::ALL {
            prop_assert_eq!(code(&m, mode), code(&r, mode));
        }
    }

    #[test]
    fn canonical_code_round_trips(m in diagram()) {
        for mode in Mode::ALL {
            let c = code(&m, mode);
            let back = CanonicalCode::from_hex(&c.to_hex()).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(code(&back.to_map().unwrap(), mode), c);
        }
    }

    #[test]
    fn json_round_trip(m in diagram()) {
        let (back, mode) = from_json(&to_json(&m, Mode::ORIENTED_ORDERED)).unwrap();
        prop_assert_eq!(mode, Mode::ORIENTED_ORDERED);
        prop_assert_eq!(code(&back, Mode::ORIENTED_ORDERED), code(&m, Mode::ORIENTED_ORDERED));
    }

    #[test]
    fn gauss_round_trip(m in diagram()) {
        let back = parse_gauss(&emit_gauss(&m), Mode::UNORIENTED).unwrap();
        prop_assert_eq!(code(&back, Mode::ORIENTED), code(&m, Mode::ORIENTED));
    }

    #[test]
    fn planarization_round_trip(m in diagram(), seed in any::<u64>()) {
        let p = planarize_seeded(&m, seed);
        prop_assert_eq!(p.document.virtual_count(), p.virtual_crossings);
        prop_assert_eq!(drawing_genus(&p.document).unwrap(), 0);
        let back = parse_pd(&p.document, Mode::UNORIENTED).unwrap();
        prop_assert_eq!(code(&back, Mode::UNORIENTED), code(&m, Mode::UNORIENTED));
    }

    #[test]
    fn reduction_is_confluent(b in 0..8usize, steps in 0..8usize, seed in any::<u64>()) {
        let base = &bases()[b];
        let m = random_expansion(base, steps, &mut ChaCha8Rng::seed_from_u64(seed));
        let target = code(&reduce(base, Reduction::First), Mode::UNORIENTED);
        for strategy in [Reduction::First, Reduction::GreedyBigonFirst, Reduction::Random(seed)] {
            let r = reduce(&m, strategy);
            prop_assert!(r.is_minimal());
            prop_assert_eq!(code(&r, Mode::UNORIENTED), target.clone());
        }
    }

    #[test]
    fn minus_moves_lower_the_level(m in diagram()) {
        for site in find_sites(&m) {
            let next = apply_site(&m, &site).unwrap();
            prop_assert!(next.level() < m.level());
            prop_assert!(next.crossing_count() < m.crossing_count());
        }
    }

    #[test]
    fn euler_and_degree_identities(m in diagram()) {
        prop_assert_eq!(m.edge_count(), 2 * m.crossing_count());
        let (_, fv) = m.face_trace();
        let degree_sum: usize = fv.counts.iter().enumerate().map(|(d, c)| d * c).sum();
        prop_assert_eq!(degree_sum, 4 * m.crossing_count());
        let r = reduce(&m, Reduction::First);
        if r.crossing_count() > 0 && r.is_connected() {
            prop_assert!(r.check_identities().all_hold());
        }
    }

    #[test]
    fn mirror_is_an_involution(m in diagram()) {
        prop_assert_eq!(code(&m.mirror().mirror(), Mode::ORIENTED_ORDERED), code(&m, Mode::ORIENTED_ORDERED));
        prop_assert_eq!(m.mirror().genus().total, m.genus().total);
    }

    #[test]
    fn bigon_insertion_is_undone_by_reduction(m in diagram(), pick in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        if m.dart_count() > 0 {
            let d = rng.gen_range(0..m.dart_count());
            let e = m.face_next(d);
            if let Ok(bigger) = apply_h2_plus(&m, ArcRef::Edge(d), ArcRef::Edge(e)) {
                prop_assert_eq!(bigger.crossing_count(), m.crossing_count() + 2);
                prop_assert_eq!(
                    code(&reduce(&bigger, Reduction::First), Mode::UNORIENTED),
                    code(&reduce(&m, Reduction::First), Mode::UNORIENTED)
                );
            }
        }
    }
}
