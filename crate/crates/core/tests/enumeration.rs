mod common;

use std::collections::BTreeSet;

use hwspinc::action::{are_equivalent, canonical_form, for_each_group_element, group_order};
use hwspinc::enumeration::{
    corpus_text, count_hw, enumerate_classes, enumerate_hw, enumerate_normalized, for_each_hw, EnumOptions, Mode,
};
use hwspinc::{parse_matrices, SMatrix};

fn opts() -> EnumOptions {
    EnumOptions::default()
}

#[test]
fn degree_three_raw_matches_base4_filter() {
    let oracle: BTreeSet<SMatrix> =
        (0u64..1 << 12).map(|c| common::from_offdiag_base4(3, c)).filter(common::is_hw).collect();
    let raw: BTreeSet<SMatrix> = enumerate_hw(3, Mode::Raw, opts()).unwrap().into_iter().collect();
    assert_eq!(raw, oracle);
    let counts = count_hw(3, opts()).unwrap();
    assert_eq!(counts.raw_count as usize, oracle.len());
    assert_eq!(counts.class_count, 1);
    // orbit-stabilizer bookkeeping: the orbit sizes add up to the raw count
    let classes = common::orbit_reduce(&oracle);
    assert_eq!(classes.len(), 1);
    assert_eq!(classes.iter().map(|c| c.1).sum::<usize>(), oracle.len());
}

#[test]
fn degree_five_matches_distinguished_filter_and_orbit_reduction() {
    let oracle: BTreeSet<SMatrix> =
        (0u64..1 << 20).map(|c| common::distinguished_from_bits(5, c)).filter(common::is_hw).collect();
    let raw = enumerate_hw(5, Mode::Raw, opts()).unwrap();
    assert_eq!(raw.len(), oracle.len());
    assert_eq!(raw.iter().cloned().collect::<BTreeSet<_>>(), oracle);

    let reduced = common::orbit_reduce(&oracle);
    let classes = enumerate_classes(5, opts()).unwrap();
    assert_eq!(classes, reduced.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
    assert_eq!(classes.len(), 2);
    assert_eq!(reduced.iter().map(|c| c.1).sum::<usize>(), raw.len());
    assert_eq!(count_hw(5, opts()).unwrap().raw_count as usize, raw.len());
}

#[test]
fn canonical_mode_is_a_transversal() {
    let classes = enumerate_hw(5, Mode::Canonical, opts()).unwrap();
    for (a, x) in classes.iter().enumerate() {
        assert_eq!(&canonical_form(x).unwrap(), x);
        for y in &classes[a + 1..] {
            assert!(!are_equivalent(x, y).unwrap());
        }
    }
    // every raw matrix sits in exactly one class (sampled)
    let raw = enumerate_hw(5, Mode::Raw, opts()).unwrap();
    for m in raw.iter().step_by(37) {
        let hits = classes.iter().filter(|c| are_equivalent(m, c).unwrap()).count();
        assert_eq!(hits, 1);
    }
}

#[test]
fn every_emitted_matrix_is_hw() {
    for n in [3, 5] {
        let mut count = 0u64;
        for_each_hw(n, opts(), |m| {
            assert!(m.is_hw_matrix().unwrap());
            assert!(common::is_hw(m));
            count += 1;
        })
        .unwrap();
        assert_eq!(count, count_hw(n, opts()).unwrap().raw_count);
    }
}

#[test]
fn output_is_deterministic() {
    assert_eq!(enumerate_hw(5, Mode::Raw, opts()).unwrap(), enumerate_hw(5, Mode::Raw, opts()).unwrap());
    assert_eq!(count_hw(5, opts()).unwrap(), count_hw(5, opts()).unwrap());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let threaded = pool.install(|| enumerate_normalized(5, opts()).unwrap());
    assert_eq!(threaded, enumerate_normalized(5, opts()).unwrap());
}

#[test]
fn degree_seven_orbits_partition_the_raw_set() {
    let counts = count_hw(7, opts()).unwrap();
    let classes = enumerate_classes(7, opts()).unwrap();
    assert_eq!(classes.len() as u64, counts.class_count);
    // each representative is the minimum of its own orbit, so the orbits are
    // disjoint; orbit-stabilizer gives their sizes
    let mut total = 0u128;
    for c in &classes {
        let mut min = c.clone();
        let mut stab = 0u128;
        for_each_group_element(7, |g| {
            let img = g.act(c).unwrap();
            if img == *c {
                stab += 1;
            }
            if img < min {
                min = img;
            }
        });
        assert_eq!(&min, c);
        total += group_order(7) / stab;
    }
    assert_eq!(total, counts.raw_count as u128);
}

#[test]
fn rejects_bad_degrees() {
    for n in [0, 1, 2, 4, 6, 9] {
        assert!(enumerate_hw(n, Mode::Canonical, opts()).is_err(), "n = {n}");
    }
}

#[test]
fn corpus_round_trip() {
    let classes = enumerate_classes(5, opts()).unwrap();
    let text = corpus_text(5, Mode::Canonical, &classes);
    assert!(text.starts_with("# HW-matrices\n# n = 5\n# mode = canonical\n# count = 2\n"));
    assert_eq!(parse_matrices(&text).unwrap(), classes);
}
