//! Property tests against naive oracles: closure by breadth-first search for
//! orders and membership, and element-wise checks for the group axioms.

use std::collections::HashSet;

use amalgam_core::perm::{is_semiprimitive, Permutation, PermGroup};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn gens(n: usize) -> impl Strategy<Value = Vec<Permutation>> {
    prop::collection::vec(perm(n), 1..4)
}

fn closure(n: usize, gens: &[Permutation]) -> HashSet<Permutation> {
    let mut seen: HashSet<Permutation> = HashSet::from([Permutation::identity(n)]);
    let mut frontier = vec![Permutation::identity(n)];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = &x * g;
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn composition_is_associative_with_inverses(a in perm(7), b in perm(7), c in perm(7)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a * &a.inverse()).is_identity());
        // right action: x^(ab) = (x^a)^b
        for x in 0..7 {
            prop_assert_eq!((&a * &b).apply(x), b.apply(a.apply(x)));
        }
        prop_assert_eq!(a.conjugate_by(&b), &(&b.inverse() * &a) * &b);
    }

    #[test]
    fn stabilizer_chain_order_matches_closure(g in gens(6)) {
        let grp = PermGroup::new(6, g.clone()).unwrap();
        let elems = closure(6, &g);
        prop_assert_eq!(grp.order(), elems.len() as u64);
        let listed: HashSet<Permutation> = grp.elements().into_iter().collect();
        prop_assert_eq!(&listed, &elems);
    }

    #[test]
    fn membership_matches_closure(g in gens(6), x in perm(6)) {
        let grp = PermGroup::new(6, g.clone()).unwrap();
        prop_assert_eq!(grp.contains(&x), closure(6, &g).contains(&x));
    }

    #[test]
    fn orbits_partition_points(g in gens(7)) {
        let grp = PermGroup::new(7, g).unwrap();
        let mut seen = vec![false; 7];
        for cell in grp.orbits().cells() {
            for &p in cell {
                prop_assert!(!seen[p]);
                seen[p] = true;
            }
            let orbit = grp.orbit(cell[0]);
            prop_assert_eq!(orbit.len(), cell.len());
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn semiprimitivity_is_conjugation_invariant(g in gens(6), s in perm(6)) {
        let grp = PermGroup::new(6, g).unwrap();
        prop_assume!(grp.is_transitive());
        let conj = grp.conjugate(&s);
        let a = is_semiprimitive(&grp).unwrap().is_semiprimitive();
        let b = is_semiprimitive(&conj).unwrap().is_semiprimitive();
        prop_assert_eq!(a, b);
        if grp.is_regular() {
            prop_assert!(a);
        }
    }
}
