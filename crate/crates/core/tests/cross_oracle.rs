//! Enumerated broccoli counts against the recursion, and broccoli against
//! Welschinger counts on identical conditions.

use tropicount::ch::{ch_invariant, table_rows, InvariantKey};
use tropicount::curve::{del_pezzo_degree, Degree, Surface};
use tropicount::enumerate::{count_invariant, count_random, random_conditions, Exec, Mode, Problem, DEFAULT_BOX};

fn relative_degree(key: &InvariantKey) -> Degree {
    Degree::relative(key.d, &key.alpha, &key.beta)
        .unwrap()
        .with_markings(key.r() as usize, key.s as usize)
}

#[test]
fn enumeration_matches_recursion_up_to_conics() {
    for d in 1..=2u32 {
        for (alpha, beta) in table_rows(d) {
            let mut s = 0;
            while let Ok(key) = InvariantKey::new(d, alpha.clone(), beta.clone(), s) {
                let deg = relative_degree(&key);
                let want = ch_invariant(&key).unwrap();
                for seed in [1u64, 2] {
                    let got = count_random(&deg, Mode::Broccoli, seed * 1000 + s as u64, DEFAULT_BOX, Exec::Parallel)
                        .unwrap()
                        .report
                        .value;
                    assert_eq!(got, want, "{key} seed {seed}");
                }
                s += 1;
            }
        }
    }
}

#[test]
fn broccoli_equals_welschinger_for_del_pezzo() {
    let surfaces = [
        Surface::P2 { d: 1 },
        Surface::P2 { d: 2 },
        Surface::P1xP1 { d1: 1, d2: 1 },
        Surface::P2Blown { d: 2, blown: vec![1] },
    ];
    for surface in surfaces {
        let base = del_pezzo_degree(&surface).unwrap();
        let n = base.len() - 1;
        for s in 0..=n / 2 {
            let deg = base.clone().with_markings(n - 2 * s, s);
            for seed in [3u64, 4] {
                let cond = random_conditions(&deg, seed, DEFAULT_BOX);
                let b = Problem::new(deg.clone(), Mode::Broccoli, cond.clone()).unwrap();
                let w = Problem::new(deg.clone(), Mode::Welschinger, cond).unwrap();
                let vb = count_invariant(&b).unwrap().value;
                let vw = count_invariant(&w).unwrap().value;
                assert_eq!(vb, vw, "{surface:?} s={s} seed={seed}");
            }
        }
    }
}
