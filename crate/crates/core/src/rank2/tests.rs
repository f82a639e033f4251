use super::*;
use crate::abstract_group::DEFAULT_CAP;
use crate::perm::catalog;

fn p(n: usize, cs: &[&[usize]]) -> Permutation {
    let cs: Vec<Vec<usize>> = cs.iter().map(|c| c.to_vec()).collect();
    Permutation::from_cycles(n, &cs).unwrap()
}

fn d4_c2(ell: usize) -> Rank2Instance {
    build_from_groups(
        &catalog::dihedral(4).unwrap(),
        &catalog::cyclic(2).unwrap(),
        ell,
    )
    .unwrap()
}

/// C2 wr Sym(3) on 6 points: S_δ has order 2, so the defining condition of A
/// has content.
fn c2_wr_s3() -> PermGroup {
    PermGroup::new(
        6,
        vec![
            p(6, &[&[0, 1]]),
            p(6, &[&[0, 2, 4], &[1, 3, 5]]),
            p(6, &[&[0, 2], &[1, 3]]),
        ],
    )
    .unwrap()
}

#[test]
fn omega_numbering() {
    let o = OmegaIndex::new(3, 2).unwrap();
    assert_eq!(o.m(), 6);
    assert_eq!(o.index(0, 0), 0);
    assert_eq!(o.index(2, 1), 5);
    assert_eq!(o.index(1, 0), 1);
    assert_eq!(o.pair(3), (0, 1));
    let r = p(3, &[&[0, 1, 2]]);
    let ext = o.extended(&r);
    assert_eq!(ext.degree(), 7);
    assert!(ext.fixes(6));
    // (y, z)^r = (y^r, z)
    for j in 0..6 {
        let (y, z) = o.pair(j);
        assert_eq!(o.pair(ext.apply(j)), (r.apply(y), z));
    }
    assert!(OmegaIndex::new(3, 0).is_err());
    assert!(OmegaIndex::new(1, 1).is_err());
}

#[test]
fn orders_for_dihedral_family() {
    let o = d4_c2(1).orders();
    assert_eq!((o.a, o.c, o.m, o.b, o.p1, o.p2), (128, 32, 16, 32, 128, 64));
    assert_eq!(o.m_predicted, 16);
    for (ell, m) in [(2, 256u64), (3, 4096)] {
        let o = d4_c2(ell).orders();
        assert_eq!(o.m, m);
        assert_eq!(o.a, 8 * m);
        assert_eq!(o.c, 2 * m);
        assert_eq!(o.b, 2 * m);
    }
}

#[test]
fn semiprimitive_l_is_refused() {
    let err = build_from_groups(
        &catalog::symmetric(3).unwrap(),
        &catalog::cyclic(2).unwrap(),
        1,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Hypothesis { .. }));
}

#[test]
fn degenerate_parameters() {
    let l = catalog::dihedral(4).unwrap();
    let w = find_witness(&l).unwrap().unwrap();
    assert!(Rank2Instance::build(w.clone(), &catalog::cyclic(2).unwrap(), 0).is_err());
    assert!(Rank2Instance::build(w.clone(), &PermGroup::trivial(1), 1).is_err());
    let intransitive = PermGroup::new(3, vec![p(3, &[&[0, 1]])]).unwrap();
    assert!(Rank2Instance::build(w, &intransitive, 1).is_err());
}

#[test]
fn group_law_and_inverses() {
    let inst = d4_c2(1);
    let ops = inst.ops().clone();
    let p2 = inst.p2().enumerate(DEFAULT_CAP).unwrap();
    let id = ops.identity();
    for x in p2.iter().step_by(5) {
        let xi = ops.inv(x);
        assert_eq!(ops.mul(x, &xi), id);
        assert_eq!(ops.mul(&xi, x), id);
        for y in p2.iter().step_by(7) {
            for z in p2.iter().step_by(11) {
                assert_eq!(ops.mul(&ops.mul(x, y), z), ops.mul(x, &ops.mul(y, z)));
            }
        }
    }
}

#[test]
fn permutation_images_are_faithful_homomorphisms() {
    let inst = d4_c2(1);
    let ops = inst.ops().clone();
    let a = inst.a().enumerate(DEFAULT_CAP).unwrap();
    let mut seen = HashSet::new();
    for x in a {
        let ix = ops.wreath_image(x).unwrap();
        assert!(seen.insert(ix.clone()));
        for y in a.iter().step_by(3) {
            assert_eq!(ops.wreath_image(&ops.mul(x, y)).unwrap(), &ix * &ops.wreath_image(y).unwrap());
        }
    }
    let p2 = inst.p2().enumerate(DEFAULT_CAP).unwrap();
    let mut seen = HashSet::new();
    for x in p2 {
        let ix = ops.cr_image(x).unwrap();
        assert!(seen.insert(ix.clone()));
        for y in p2 {
            assert_eq!(ops.cr_image(&ops.mul(x, y)).unwrap(), &ix * &ops.cr_image(y).unwrap());
        }
    }
}

#[test]
fn tuple_view_round_trips() {
    let inst = d4_c2(2);
    let ops = inst.ops();
    for x in inst.a().generators() {
        let t = ops.tuple_view(x);
        assert_eq!(t.gs.len(), 5);
        assert_eq!(t.hs.len(), 4);
        assert_eq!(&ops.from_tuple(&t), x);
    }
    // elements of C have g_i^π = g_0^π for every slot
    for x in inst.c().enumerate(DEFAULT_CAP).unwrap() {
        let t = ops.tuple_view(x);
        let w = inst.witness();
        assert!(t.gs.iter().all(|g| w.pi(g) == w.pi(&t.gs[0])));
    }
}

#[test]
fn lifts() {
    let inst = d4_c2(1);
    let id = Permutation::identity(4);
    assert_eq!(inst.lift_f_g(&id), inst.ops().identity());
    for g in inst.witness().l().elements() {
        let e = inst.lift_f_g(&g);
        assert_eq!(inst.phi(&e), g);
        assert!(inst.membership_a(&e));
    }
    let inst = build_from_groups(&c2_wr_s3(), &catalog::cyclic(2).unwrap(), 1).unwrap();
    for g in inst.witness().l().elements() {
        assert!(inst.membership_a(&inst.lift_f_g(&g)));
    }
}

#[test]
fn membership() {
    let inst = d4_c2(1);
    let ops = inst.ops().clone();
    assert!(inst.membership_a(&ops.identity()));
    for x in inst.m().enumerate(DEFAULT_CAP).unwrap() {
        assert!(inst.membership_a(x));
    }
    // S_δ is trivial for D4, so any top element with trivial f qualifies.
    let rot = p(4, &[&[0, 1, 2, 3]]);
    let id = Permutation::identity(4);
    let e = ops.element(&rot, |_, _| id.clone(), &Permutation::identity(2));
    assert!(inst.membership_a(&e));
    // f-values must lie in L_λ
    let e = ops.element(&id, |_, _| rot.clone(), &Permutation::identity(2));
    assert!(!inst.membership_a(&e));

    // Here S_δ has order 2: a top element inducing the nontrivial element of
    // S_δ with trivial f violates the condition at x = 1.
    let inst = build_from_groups(&c2_wr_s3(), &catalog::cyclic(2).unwrap(), 1).unwrap();
    let g = p(6, &[&[2, 4], &[3, 5]]);
    assert!(inst.witness().l().contains(&g));
    let id = Permutation::identity(6);
    let e = inst.ops().element(&g, |_, _| id.clone(), &Permutation::identity(2));
    assert!(!inst.membership_a(&e));
    assert!(inst.membership_a(&inst.lift_f_g(&g)));
}

#[test]
fn r_action_checks_inputs() {
    let inst = d4_c2(1);
    let swap = p(2, &[&[0, 1]]);
    let c = &inst.c().generators()[0];
    let cr = inst.r_action(c, &swap).unwrap();
    assert!(inst.membership_c(&cr));
    assert_eq!(inst.r_action(&cr, &swap).unwrap(), *c);
    assert_eq!(inst.r_action(c, &Permutation::identity(2)).unwrap(), *c);
    let not_c = inst.lift_f_g(&p(4, &[&[0, 1, 2, 3]]));
    assert!(inst.r_action(&not_c, &swap).is_err());
    assert!(inst.r1_action_on_a(&not_c, &swap).is_err());
    assert_eq!(
        inst.r1_action_on_a(&not_c, &Permutation::identity(2)).unwrap(),
        not_c
    );
}

#[test]
fn full_verification_passes_at_ell_one() {
    let inst = d4_c2(1);
    let verdicts = inst.verify(VerifyMode::Full, DEFAULT_CAP);
    for v in &verdicts {
        assert!(v.is_pass(), "{v:?}");
    }
    assert_eq!(verdicts.len(), 16);
}

#[test]
fn fast_verification_skips_brute_force() {
    let verdicts = d4_c2(2).verify(VerifyMode::Fast, DEFAULT_CAP);
    assert!(crate::verdict::all_passed(&verdicts));
    let faithful = verdicts.iter().find(|v| v.label == "faithful").unwrap();
    assert!(!faithful.is_pass());
}

#[test]
fn larger_witness_orders() {
    // |Δ| = 3, |K_λ| = 4, |L_λ| = 8
    let inst = build_from_groups(&c2_wr_s3(), &catalog::cyclic(2).unwrap(), 1).unwrap();
    let o = inst.orders();
    assert_eq!((o.cells, o.k_lambda, o.l_lambda, o.s_delta), (3, 4, 8, 2));
    assert_eq!(o.m as u128, o.m_predicted);
    assert_eq!(o.m, 4u64.pow(6));
    assert_eq!(o.a, 48 * o.m);
    assert_eq!(o.c, 8 * o.m);
    assert_eq!(o.b, o.c);
}

#[test]
fn faithful_at_ell_two() {
    let verdicts = d4_c2(2).verify(VerifyMode::Full, DEFAULT_CAP);
    for v in &verdicts {
        assert!(v.is_pass(), "{v:?}");
    }
}

#[test]
fn reindexing_is_not_an_action_on_a_when_r1_is_nontrivial() {
    // G-slot i and H-slot i-1 come from the same f_i but are moved by
    // different index maps, and products in A mix the two.
    let inst = build_from_groups(
        &catalog::dihedral(4).unwrap(),
        &catalog::symmetric(3).unwrap(),
        1,
    )
    .unwrap();
    assert_eq!(inst.r1().order(), 2);
    assert!(matches!(inst.assemble_amalgam(), Err(Error::Construction(_))));
    let verdicts = inst.verify(VerifyMode::Full, DEFAULT_CAP);
    let get = |l: &str| verdicts.iter().find(|v| v.label == l).unwrap().clone();
    assert!(get("r_action_on_c").is_pass());
    assert!(get("r1_action_on_a").is_fail());
    assert!(matches!(get("faithful").outcome, crate::verdict::Outcome::Skipped { .. }));
}
