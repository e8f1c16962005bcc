//! Tree-side checks of decision verdicts: the geometric facts each verdict relies on are
//! confirmed by probing the tree directly.

mod common;

use std::collections::BTreeMap;

use common::*;
use nonarch::btree::{self, Intersection, TreeVertex};
use nonarch::decide::{amalgam_allowed, decide, Case, DecideOptions, Isomorphism, Verdict};
use nonarch::examples::{congruence_menu, menu_examples};
use nonarch::exec::Exec;
use nonarch::groupkit::{self, FiniteGroupId, GroupTag};
use nonarch::localfield::{Field, FieldConfig};
use nonarch::psl2::{self, Mat2, Order, Tag};

const PROBE: u32 = 3;

fn examples(case: Case) -> Vec<(Field, Mat2, Mat2, Verdict)> {
    let mut out = Vec::new();
    for cfg in [FieldConfig::padic(5), FieldConfig::padic(7), FieldConfig::padic(13), FieldConfig::laurent(13, 1), FieldConfig::laurent(3, 2)] {
        for (spec, ex) in menu_examples(&cfg) {
            if spec.case != case {
                continue;
            }
            let Ok(ex) = ex else { continue };
            let v = decide(&ex.field, &ex.a, &ex.b, &DecideOptions::default()).unwrap();
            out.push((ex.field, ex.a, ex.b, v));
        }
    }
    out
}

/// Vertices of `ball(center, PROBE)` fixed by every matrix in `gs`.
fn common_fixed(k: &Field, gs: &[Mat2], center: &TreeVertex) -> Vec<TreeVertex> {
    btree::ball(k, center, PROBE, Exec::default())
        .vertices()
        .filter(|v| gs.iter().all(|g| btree::displacement(k, g, v) == 0))
        .cloned()
        .collect()
}

fn on_axis(k: &Field, b: &Mat2, v: &TreeVertex) -> bool {
    btree::displacement(k, b, v) == psl2::translation_length(k, b)
}

#[test]
fn finite_order_elements_are_elliptic_and_generate_cyclic_groups() {
    for k in field_pool() {
        let mut r = rng(11);
        for _ in 0..10 {
            let (a, n) = random_finite_order(&k, &mut r);
            assert_eq!(psl2::translation_length(&k, &a), 0);
            assert_eq!(psl2::classify(&k, &a).tag, Tag::Elliptic);
            let c = groupkit::closure_with_cap(&k, &[a], groupkit::default_cap(&k));
            let id = groupkit::identify_finite_group(&k, &c.elements).unwrap();
            assert_eq!(id, FiniteGroupId::new(GroupTag::Cyclic(n)), "{}", k.config().label());
        }
    }
}

#[test]
fn double_involutions_reflect_the_axis() {
    let cases = examples(Case::G);
    assert!(cases.len() >= 8);
    for (k, _, _, v) in &cases {
        let (x, y) = &v.reduced_pair;
        let conj = x.conjugate_by(k, y);
        let g0 = groupkit::closure_with_cap(k, &[x.clone(), conj.clone()], groupkit::default_cap(k));
        assert!(g0.is_finite());
        let g = groupkit::find_double_involution(k, &g0.elements, y).expect("case (g) has a witness");
        assert!(psl2::is_involution(k, &g).unwrap());
        assert!(psl2::is_involution(k, &g.mul(k, y)).unwrap());
        let center = btree::descend(k, x, &TreeVertex::base());
        let fixed = common_fixed(k, &[x.clone(), conj], &center);
        assert!(!fixed.is_empty(), "{}: no fixed vertex of G0 near the probe", k.config().label());
        for w in fixed {
            let lhs = btree::apply(k, &g, &btree::apply(k, y, &w));
            assert_eq!(lhs, btree::apply(k, &y.inv(k), &w));
        }
    }
    // in case (f) there is no witness
    for (k, _, _, v) in examples(Case::F) {
        let (x, y) = &v.reduced_pair;
        let g0 = groupkit::closure_with_cap(&k, &[x.clone(), x.conjugate_by(&k, y)], groupkit::default_cap(&k));
        assert!(groupkit::find_double_involution(&k, &g0.elements, y).is_none());
    }
}

#[test]
fn hnn_and_amalgam_verdicts_have_overlap_equal_to_the_translation_length() {
    let mut seen = 0;
    for case in [Case::F, Case::G] {
        for (k, _, _, v) in examples(case) {
            let (x, y) = &v.reduced_pair;
            let ly = psl2::translation_length(&k, y) as u32;
            let i = btree::fix_ax_intersection(&k, x, y, ly + 2, Exec::default()).unwrap();
            assert_eq!(i, Intersection::Path(ly), "{} ({case})", k.config().label());
            if let Some(Isomorphism::Amalgam { g0, edge }) = v.isomorphism {
                assert!(amalgam_allowed(&g0, edge));
                assert!(congruence_menu(k.config()).contains(Case::G, &v.isomorphism.unwrap()));
            }
            seen += 1;
        }
    }
    assert!(seen >= 12);
}

#[test]
fn free_verdicts_have_short_axis_overlap() {
    let cases = examples(Case::B);
    assert!(!cases.is_empty());
    for (k, _, _, v) in cases {
        let (x, y) = &v.reduced_pair;
        let (lx, ly) = (psl2::translation_length(&k, x), psl2::translation_length(&k, y));
        assert!(lx > 0 && ly > 0);
        let center = btree::descend(&k, y, &btree::descend(&k, x, &TreeVertex::base()));
        let r = (lx.max(ly) + 2) as u32;
        let overlap = btree::ball(&k, &center, r, Exec::default())
            .vertices()
            .filter(|w| on_axis(&k, x, w) && on_axis(&k, y, w))
            .count();
        // a path with `n` vertices has length `n - 1`
        assert!(overlap == 0 || (overlap as u64 - 1) < lx.min(ly), "{} overlap {overlap}", k.config().label());
    }
}

/// Every non-discrete verdict names an infinite vertex stabiliser.
fn witness(k: &Field, v: &Verdict) -> Result<(), String> {
    let (x, y) = &v.reduced_pair;
    let infinite_elliptic = |m: &Mat2| {
        psl2::classify(k, m).tag == Tag::Elliptic && psl2::element_order(k, m) == Order::Infinite
    };
    match v.final_step() {
        5 => infinite_elliptic(x).then_some(()).ok_or("X is not elliptic of infinite order".into()),
        7 if infinite_elliptic(y) => Ok(()),
        7 => {
            let g = groupkit::closure_with_cap(k, &[x.clone(), y.clone()], groupkit::default_cap(k));
            // the nearest point of Fix(Y) to a point of Fix(X) lies in both
            let center = btree::descend(k, y, &btree::descend(k, x, &TreeVertex::base()));
            let fixed = common_fixed(k, &[x.clone(), y.clone()], &center);
            if g.is_finite() || fixed.is_empty() {
                return Err("G is not an infinite group fixing a vertex".into());
            }
            Ok(())
        }
        9 => infinite_elliptic(&x.commutator(k, y)).then_some(()).ok_or("[X,Y] has finite order".into()),
        11 => {
            let c = x.commutator(k, &y.mul(k, y));
            (psl2::translation_length(k, &c) == 0).then_some(()).ok_or("[X,Y^2] is hyperbolic".into())
        }
        12 => {
            let g0 = groupkit::closure_with_cap(k, &[x.clone(), x.conjugate_by(k, y)], groupkit::default_cap(k));
            (!g0.is_finite()).then_some(()).ok_or("G0 is finite".into())
        }
        s => Err(format!("false verdict at step {s}")),
    }
}

#[test]
fn non_discrete_verdicts_exhibit_infinite_stabilisers() {
    let mut by_step: BTreeMap<u8, usize> = BTreeMap::new();
    let mut check = |k: &Field, a: &Mat2, b: &Mat2| {
        let v = decide(k, a, b, &DecideOptions::default()).unwrap();
        if !v.discrete {
            witness(k, &v).unwrap_or_else(|e| panic!("{} step {}: {e}", k.config().label(), v.final_step()));
            *by_step.entry(v.final_step()).or_default() += 1;
        }
    };
    let k5 = qp(5);
    let s = Mat2::parse(&k5, [["0", "-1"], ["1", "0"]]).unwrap();
    check(&k5, &s, &Mat2::parse(&k5, [["0", "-1"], ["1", "1"]]).unwrap());
    let k2 = qp(2);
    check(&k2, &Mat2::parse(&k2, [["1", "2"], ["0", "1"]]).unwrap(), &Mat2::parse(&k2, [["1", "0"], ["2", "1"]]).unwrap());
    // an involution and a hyperbolic element whose commutator is unipotent
    let b = Mat2::parse(&k5, [["5", "1"], ["0", "1/5"]]).unwrap();
    check(&k5, &Mat2::parse(&k5, [["1", "1"], ["0", "1"]]).unwrap(), &b);
    for p in [3u32, 5, 7] {
        let k = qp(p);
        let mut r = rng(900 + p as u64);
        for _ in 0..40 {
            let (x, _) = random_finite_order(&k, &mut r);
            let (y, _) = random_finite_order(&k, &mut r);
            check(&k, &x, &y);
            check(&k, &x, &random_sl2(&k, &mut r));
        }
    }
    assert!(by_step.contains_key(&5) && by_step.contains_key(&7), "{by_step:?}");
    println!("false verdicts by step: {by_step:?}");
}
