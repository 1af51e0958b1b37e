use std::sync::Arc;

use harmlab::exit::{exit_measure, strong_markov_residual, ExitSolver};
use harmlab::group::grigorchuk::is_trivial;
use harmlab::{DirectedBall, Group, GroupElement};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

const FAMILIES: [&str; 6] = ["z:2", "free:2", "heis", "lamplighter", "bs:1:2", "grigorchuk"];

fn letters(spec: &str) -> Vec<char> {
    Group::from_spec(spec).unwrap().generators().iter().map(|g| g.name).collect()
}

fn word_strategy(spec: &str, max: usize) -> impl Strategy<Value = String> {
    let ls = letters(spec);
    prop::collection::vec(prop::sample::select(ls), 0..max).prop_map(|v| v.into_iter().collect())
}

fn inverse_letter(spec: &str, c: char) -> char {
    match spec {
        "grigorchuk" => c,
        "lamplighter" if c == 's' => 's',
        _ if c.is_ascii_lowercase() => c.to_ascii_uppercase(),
        _ => c.to_ascii_lowercase(),
    }
}

fn axioms(spec: &str) {
    let g = Group::from_spec(spec).unwrap();
    let w = || word_strategy(spec, 12);
    let cfg = ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() };
    proptest!(cfg, |(x in w(), y in w(), z in w())| {
        let (x, y, z) = (g.word(&x).unwrap(), g.word(&y).unwrap(), g.word(&z).unwrap());
        let xy_z = g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap();
        let x_yz = g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(&g.multiply(&x, g.identity()).unwrap(), &x);
        prop_assert_eq!(&g.multiply(g.identity(), &x).unwrap(), &x);
        prop_assert!(g.is_identity(&g.multiply(&x, &x.inverse()).unwrap()));
        prop_assert!(g.is_identity(&g.multiply(&x.inverse(), &x).unwrap()));
    });
}

#[test]
fn group_axioms_hold_in_every_family() {
    for spec in FAMILIES {
        axioms(spec);
    }
}

fn canonical(spec: &str) {
    let g = Group::from_spec(spec).unwrap();
    let ls = letters(spec);
    let cfg = ProptestConfig { cases: 2_000, failure_persistence: None, ..ProptestConfig::default() };
    proptest!(cfg, |(w in word_strategy(spec, 12), at in 0usize..13, c in prop::sample::select(ls.clone()))| {
        let at = at.min(w.len());
        let padded = format!("{}{}{}{}", &w[..at], c, inverse_letter(spec, c), &w[at..]);
        let x = g.word(&w).unwrap();
        let y = g.word(&padded).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.to_string(), y.to_string());
    });
}

#[test]
fn inserting_cancelling_pairs_gives_the_same_canonical_form() {
    for spec in FAMILIES {
        canonical(spec);
    }
}

/// Action of a generator on a finite binary string, from the tree rules.
fn act(letter: char, s: &mut [u8]) {
    if s.is_empty() {
        return;
    }
    let (head, rest) = s.split_at_mut(1);
    match (letter, head[0]) {
        ('a', _) => head[0] ^= 1,
        ('b', 0) | ('c', 0) => act('a', rest),
        ('b', _) => act('c', rest),
        ('c', _) => act('d', rest),
        ('d', 0) => {}
        ('d', _) => act('b', rest),
        _ => unreachable!(),
    }
}

fn acts_equally(u: &str, v: &str, depth: usize) -> bool {
    (0..1u32 << depth).all(|bits| {
        let start: Vec<u8> = (0..depth).map(|i| ((bits >> i) & 1) as u8).collect();
        let (mut x, mut y) = (start.clone(), start);
        u.chars().rev().for_each(|c| act(c, &mut x));
        v.chars().rev().for_each(|c| act(c, &mut y));
        x == y
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2_000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn grigorchuk_equality_is_sound(u in word_strategy("grigorchuk", 10), v in word_strategy("grigorchuk", 10)) {
        let g = Group::from_spec("grigorchuk").unwrap();
        let same = g.word(&u).unwrap() == g.word(&v).unwrap();
        if same {
            prop_assert!(acts_equally(&u, &v, 10));
        }
        if !acts_equally(&u, &v, 10) {
            prop_assert!(!same);
        }
    }

    #[test]
    fn grigorchuk_trivial_words_act_trivially(w in word_strategy("grigorchuk", 16)) {
        let letters: Vec<u8> = w.bytes().map(|c| c - b'a').collect();
        if is_trivial(&letters) {
            prop_assert!(acts_equally(&w, "", 10));
        }
        if !acts_equally(&w, "", 10) {
            prop_assert!(!is_trivial(&letters));
        }
    }
}

fn small_radius(spec: &str) -> usize {
    match spec {
        "z:2" | "lamplighter" => 3,
        _ => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exit_measure_is_translation_equivariant(fam in 0usize..6, shift in 0usize..4096) {
        let spec = FAMILIES[fam];
        let g = Group::from_spec(spec).unwrap();
        let ls = letters(spec);
        let word: String = (0..5).map(|i| ls[(shift >> (2 * i)) % ls.len()]).collect();
        let t = g.word(&word).unwrap();
        let steps = g.uniform_steps();
        let r = small_radius(spec);
        let base = Arc::new(DirectedBall::build(g.identity(), &steps, r).unwrap());
        let moved = Arc::new(DirectedBall::build(&t, &steps, r).unwrap());
        prop_assert_eq!(base.interior_len(), moved.interior_len());
        prop_assert_eq!(base.boundary_len(), moved.boundary_len());
        let em = exit_measure::<BigRational>(base.clone()).unwrap();
        let em_moved = exit_measure::<BigRational>(moved.clone()).unwrap();
        for v in 0..base.interior_len() {
            let tv = moved.index_of(&g.multiply(&t, base.vertex(v)).unwrap()).unwrap();
            for x in 0..base.boundary_len() {
                let tx = moved.boundary_index_of(&g.multiply(&t, base.boundary_vertex(x)).unwrap()).unwrap();
                prop_assert_eq!(em.get(v, x), em_moved.get(tv, tx));
            }
        }
    }

    #[test]
    fn balls_are_nested_and_deterministic(fam in 0usize..6, r in 0usize..3) {
        let g = Group::from_spec(FAMILIES[fam]).unwrap();
        let steps = g.uniform_steps();
        let small = DirectedBall::build(g.identity(), &steps, r).unwrap();
        let big = DirectedBall::build(g.identity(), &steps, r + 1).unwrap();
        let again = DirectedBall::build(g.identity(), &steps, r + 1).unwrap();
        prop_assert!(big.embed(&small).is_some());
        prop_assert!(small.boundary().iter().all(|x| big.contains(x)));
        prop_assert_eq!(big.vertices(), again.vertices());
        prop_assert_eq!(big.boundary(), again.boundary());
    }

    #[test]
    fn exact_and_float_agree(fam in 0usize..6) {
        let g = Group::from_spec(FAMILIES[fam]).unwrap();
        let ball = Arc::new(DirectedBall::build(g.identity(), &g.uniform_steps(), small_radius(FAMILIES[fam])).unwrap());
        let exact = exit_measure::<BigRational>(ball.clone()).unwrap();
        let float = exit_measure::<f64>(ball).unwrap();
        prop_assert!(float.check_invariants().holds());
        for (re, rf) in exact.rows().iter().zip(float.rows()) {
            for (e, f) in re.iter().zip(rf) {
                prop_assert!((harmlab::linalg::ratio_to_f64(e) - f).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn strong_markov_decomposition_is_exact(fam in 0usize..6, path in 0usize..64, inner_r in 0usize..2) {
        let spec = FAMILIES[fam];
        let g = Group::from_spec(spec).unwrap();
        let ls = letters(spec);
        let steps = g.uniform_steps();
        let word: String = (0..2).map(|i| ls[(path >> (3 * i)) % ls.len()]).collect();
        let a = g.word(&word).unwrap();
        let inner = Arc::new(DirectedBall::build(&a, &steps, inner_r).unwrap());
        let outer = Arc::new(DirectedBall::build(g.identity(), &steps, inner_r + 2).unwrap());
        let em_in = exit_measure::<BigRational>(inner).unwrap();
        let em_out = exit_measure::<BigRational>(outer).unwrap();
        prop_assert!(em_in.check_invariants().holds());
        prop_assert!(em_out.check_invariants().holds());
        prop_assert!(strong_markov_residual(&em_in, &em_out, &a).unwrap().is_zero());
    }

    #[test]
    fn rows_and_columns_agree(fam in 0usize..6) {
        let g = Group::from_spec(FAMILIES[fam]).unwrap();
        let ball = Arc::new(DirectedBall::build(g.identity(), &g.uniform_steps(), 2).unwrap());
        let solver = ExitSolver::<BigRational>::new(ball.clone()).unwrap();
        for x in (0..ball.boundary_len()).step_by(7) {
            let col = solver.column(x);
            for v in (0..ball.interior_len()).step_by(3) {
                prop_assert_eq!(&solver.row(v)[x], &col[v]);
            }
        }
    }
}

#[test]
fn identity_parses_in_every_family() {
    for spec in FAMILIES {
        let g = Group::from_spec(spec).unwrap();
        assert!(g.is_identity(&g.parse_element("e").unwrap()));
        assert_eq!(matches!(g.identity(), GroupElement::Zd(_)), spec.starts_with("z:"));
    }
}
