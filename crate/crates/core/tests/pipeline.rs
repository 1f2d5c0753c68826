use langgen::dataset::{generate_split, Role, SplitSpec};
use langgen::editdist::{edit_distance, levenshtein};
use langgen::perturb::sample_edit;
use langgen::{by_name, registry, Symbol, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn positives_are_members_in_range_with_consistent_next_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for l in registry() {
        for (min, max) in [(0, 40), (10, 20), (30, 80)] {
            for _ in 0..50 {
                let w = l.sample_positive(min, max, &mut rng).unwrap();
                assert!(l.contains(&w), "{}", l.name());
                assert!((min..=max).contains(&w.len()), "{} {}", l.name(), w.len());
                let next = l.next_sets(&w);
                for (t, s) in w.iter().enumerate() {
                    assert!(next[t].contains(*s), "{} at {t}", l.name());
                }
                assert!(next[w.len()].has_eos(), "{}", l.name());
            }
        }
    }
}

#[test]
fn edit_distance_bounds_and_one_edit_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for name in [
        "repeat-01",
        "parity",
        "even-pairs",
        "dyck-2-3",
        "cycle-navigation",
    ] {
        let l = by_name(name).unwrap();
        let dfa = l.dfa().unwrap();
        let k = l.alphabet().len();
        let shortest = (0..).find(|n| {
            let t = langgen::sampler::SamplerTables::build(dfa, *n).unwrap();
            !t.valid_lengths(*n, *n).is_empty()
        });
        for _ in 0..200 {
            let n = rng.random_range(0..=12);
            let w: Word = (0..n)
                .map(|_| Symbol(rng.random_range(0..k) as u8))
                .collect();
            let r = edit_distance(dfa, &w).unwrap();
            assert!(r.distance <= w.len() + shortest.unwrap());
            assert!(l.contains(&r.witness));
            assert_eq!(levenshtein(&r.witness, &w), r.distance);
            if let Some(e) = sample_edit(&w, k, 0, 20, &mut rng) {
                let mut v = w.clone();
                e.apply(&mut v);
                let d2 = edit_distance(dfa, &v).unwrap().distance;
                assert!(
                    d2.abs_diff(r.distance) <= 1,
                    "{name}: {} -> {d2}",
                    r.distance
                );
            }
        }
    }
}

#[test]
fn split_does_not_depend_on_thread_count() {
    let l = by_name("binary-addition").unwrap();
    let spec = SplitSpec {
        role: Role::Train,
        count: 300,
        min_len: 0,
        max_len: 60,
    };
    let many = generate_split(l.as_ref(), &spec, 11, true, None, 1).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let one = pool.install(|| generate_split(l.as_ref(), &spec, 11, true, None, 1).unwrap());
    assert_eq!(many, one);
}
