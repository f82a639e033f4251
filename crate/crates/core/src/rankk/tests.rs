use super::*;
use crate::abstract_group::DEFAULT_CAP;
use crate::perm::catalog;

fn c2() -> PermGroup {
    catalog::cyclic(2).unwrap()
}

fn s3() -> PermGroup {
    catalog::symmetric(3).unwrap()
}

#[test]
fn interleave_small_cases() {
    let ia = interleave(&c2(), &c2(), 0, 0, 1).unwrap();
    assert_eq!(ia.size(), 4);
    assert!(ia.g().is_identity());
    let ia = interleave(&c2(), &c2(), 0, 0, 2).unwrap();
    assert_eq!(ia.size(), 8);
    assert_eq!(ia.g().cycles(), vec![vec![0, 1]]);
    for v in ia.verify() {
        assert!(v.is_pass(), "{v:?}");
    }
    assert!(interleave(&PermGroup::trivial(1), &c2(), 0, 0, 1).is_err());
    assert!(interleave(&c2(), &c2(), 0, 0, 0).is_err());
}

#[test]
fn interleave_numbering_and_maps() {
    let ia = interleave(&s3(), &c2(), 0, 0, 3).unwrap();
    assert_eq!(ia.size(), 18);
    for w in 0..18 {
        let (d, l, i) = ia.triple(w);
        assert_eq!(ia.index(d, l, i), w);
    }
    assert_eq!(ia.omega0(), 0);
    let k = catalog::cyclic(2).unwrap().generators()[0].clone();
    // ρ_K agrees with ρ'_K on points away from the moved fibre
    let rk = ia.rho_k(&k);
    let rk1 = ia.rho_k_prime(&k);
    let w = ia.index(1, 0, 2);
    assert_eq!(rk.apply(w), rk1.apply(w));
    // and sends (δ0, λ0, i) to (δ0, λ0^k, i-1)
    assert_eq!(rk.apply(ia.index(0, 0, 1)), ia.index(0, 1, 0));
}

#[test]
fn orders_rank_three() {
    let inst = build_rankk(&[s3(), c2(), c2()], 1).unwrap();
    let o = inst.orders();
    assert_eq!((o.u, o.u_prime, o.b), (16, 8, 16));
    assert_eq!(o.p, vec![48, 32, 32]);
    assert_eq!(o.borel_bound, 16);
    let o = build_rankk(&[s3(), c2(), c2()], 2).unwrap().orders();
    assert_eq!(o.b, 256);
    assert_eq!(o.borel_bound, 256);
}

#[test]
fn enumeration_matches_representation() {
    let inst = build_rankk(&[s3(), c2(), c2()], 1).unwrap();
    for g in inst.groups().iter().chain([inst.b(), inst.u(), inst.u_prime()]) {
        assert_eq!(
            g.order(DEFAULT_CAP).unwrap() as u64,
            g.order_via_representation().unwrap(),
            "{}",
            g.name()
        );
    }
}

#[test]
fn group_law() {
    let inst = build_rankk(&[s3(), c2(), c2()], 2).unwrap();
    let ops = inst.ops().clone();
    let id = ops.identity();
    for p in inst.groups() {
        let els = p.enumerate(DEFAULT_CAP).unwrap();
        for x in els.iter().step_by(13) {
            let xi = ops.inv(x);
            assert_eq!(ops.mul(x, &xi), id);
            assert_eq!(ops.mul(&xi, x), id);
            let ix = ops.permutation_image(x).unwrap();
            for y in els.iter().step_by(17) {
                let iy = ops.permutation_image(y).unwrap();
                assert_eq!(ops.permutation_image(&ops.mul(x, y)).unwrap(), &ix * &iy);
            }
        }
    }
}

#[test]
fn cores_rank_three() {
    let inst = build_rankk(&[s3(), c2(), c2()], 1).unwrap();
    let cores = inst.compute_cores(DEFAULT_CAP).unwrap();
    // point stabilizers of C2 are trivial, so B = U and the cores of P2, P3 are all of U
    assert_eq!(cores.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![8, 16, 16]);
    let u_prime = inst.u_prime().enumerate(DEFAULT_CAP).unwrap();
    assert!(cores[0].iter().all(|x| u_prime.contains(x)));
}

#[test]
fn full_verification_rank_three_and_four() {
    for (locals, ell) in [
        (vec![s3(), c2(), c2()], 1),
        (vec![s3(), c2(), c2()], 2),
        (vec![s3(), c2(), c2(), c2()], 1),
    ] {
        let inst = build_rankk(&locals, ell).unwrap();
        for v in inst.verify(VerifyMode::Full, DEFAULT_CAP) {
            assert!(v.is_pass(), "k={} ell={ell}: {v:?}", locals.len());
        }
    }
}

#[test]
fn first_non_regular_group_becomes_l1() {
    let inst = build_rankk(&[c2(), s3(), c2()], 1).unwrap();
    assert_eq!(inst.input_order(), &[1, 0, 2]);
    assert_eq!(inst.locals()[0].order(), 6);
}

#[test]
fn refusals() {
    let err = build_rankk(&[c2(), c2(), c2()], 1).unwrap_err();
    assert!(matches!(err, Error::Hypothesis { .. }));
    assert!(build_rankk(&[s3(), c2()], 1).is_err());
    assert!(build_rankk(&[s3(), c2(), c2()], 0).is_err());
}

#[test]
fn nontrivial_stabilizers_in_the_interleaved_pair() {
    // L2 = Sym(3) has point stabilizer of order 2, so B is larger than U.
    let inst = build_rankk(&[s3(), s3(), c2()], 1).unwrap();
    let o = inst.orders();
    assert_eq!(o.u, 1 << 6);
    assert_eq!(o.b, o.u * 2);
    for v in inst.verify(VerifyMode::Full, DEFAULT_CAP) {
        assert!(v.is_pass(), "{v:?}");
    }
}
