use gwcycle::cycle_classes::fcurve_degree;
use gwcycle::gw_numbers::fourpoint_value;
use gwcycle::moduli_comb::tcount;
use gwcycle::verify::{random_wdvv_input, wdvv_sides};
use gwcycle::{
    all_fcurves, decompose_in_rays, fourpoint_divisor, fourpoint_divisor_with, npoint_codim0,
    parse_element, parse_element_list, star_product, BasisClass, ClassVector, GwSpec, MarkSet,
    QhElement, Rational, RayTable, TargetSpace,
};
use gwcycle::Strategy as Eval;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn spaces() -> Vec<TargetSpace> {
    ["P1", "P2", "P3", "P5", "Q1", "Q3", "Q5", "Q4", "Q6", "Q8"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn space_strategy() -> impl Strategy<Value = TargetSpace> {
    prop::sample::select(spaces())
}

fn basis_pair() -> impl Strategy<Value = (TargetSpace, BasisClass, BasisClass)> {
    space_strategy().prop_flat_map(|s| {
        let b = s.basis();
        (Just(s), prop::sample::select(b.clone()), prop::sample::select(b))
    })
}

/// A degree and four basis classes satisfying the divisor condition.
fn four_point_input() -> impl Strategy<Value = (TargetSpace, u32, [BasisClass; 4])> {
    (
        prop::sample::select(vec!["P2", "P3", "P4", "Q3", "Q5", "Q4", "Q6"]),
        1..=3u32,
        any::<[prop::sample::Index; 3]>(),
    )
        .prop_filter_map("no completing class", |(name, d, idx)| {
            let space: TargetSpace = name.parse().unwrap();
            let basis = space.basis();
            let first: Vec<BasisClass> = idx.iter().map(|i| *i.get(&basis)).collect();
            let s: u32 = first.iter().map(|&c| space.codim(c)).sum();
            let need = (1 + space.fano_degree() * d + space.dim()).checked_sub(s)?;
            let last = basis.iter().copied().find(|&c| space.codim(c) == need)?;
            Some((space, d, [first[0], first[1], first[2], last]))
        })
}

fn el(space: TargetSpace, c: BasisClass) -> QhElement {
    QhElement::from_basis(space, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_graded((space, a, b) in basis_pair()) {
        let ab = star_product(&el(space, a), &el(space, b)).unwrap();
        let ba = star_product(&el(space, b), &el(space, a)).unwrap();
        prop_assert_eq!(&ab, &ba);
        if !ab.is_zero() {
            prop_assert_eq!(ab.degree(), Some((space.codim(a) + space.codim(b)) as u64));
        }
    }

    #[test]
    fn four_point_is_symmetric((space, d, c) in four_point_input(), perm in Just([0usize, 1, 2, 3]).prop_shuffle()) {
        let s = GwSpec::from_classes(space, d, &c).unwrap();
        let p = [c[perm[0]], c[perm[1]], c[perm[2]], c[perm[3]]];
        let t = GwSpec::from_classes(space, d, &p).unwrap();
        prop_assert_eq!(fourpoint_divisor(&s).unwrap(), fourpoint_divisor(&t).unwrap());
    }

    #[test]
    fn divisor_shortcut_matches_splitting((space, d, c) in four_point_input()) {
        prop_assume!(c.contains(&BasisClass::H(1)));
        let s = GwSpec::from_classes(space, d, &c).unwrap();
        prop_assert_eq!(
            fourpoint_divisor_with(&s, Eval::Auto).unwrap(),
            fourpoint_divisor_with(&s, Eval::ForceSplit).unwrap()
        );
    }

    #[test]
    fn q_shift_lowers_the_degree((space, d, c) in four_point_input(), k in 0..=2u32, slot in 0..4usize) {
        let plain: Vec<QhElement> = c.iter().map(|&x| el(space, x)).collect();
        let mut shifted = plain.clone();
        shifted[slot] = shifted[slot].shift_q(k).unwrap();
        let a = fourpoint_value(space, (d + k) as i64, &shifted, Eval::Auto).unwrap();
        let b = fourpoint_value(space, d as i64, &plain, Eval::Auto).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn wdvv_relations_hold(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (space, d, c) = random_wdvv_input(&mut rng);
        let [lhs, a, b] = wdvv_sides(space, d, c).unwrap();
        prop_assert_eq!(&lhs, &a);
        prop_assert_eq!(&lhs, &b);
    }

    #[test]
    fn fundamental_class_is_harmless(seed in any::<u64>()) {
        for (r, d, a) in gwcycle::verify::random_level_one_tuples(1, seed) {
            let space = TargetSpace::projective(r).unwrap();
            let classes: Vec<BasisClass> = a.iter().map(|&k| BasisClass::H(k)).collect();
            let s = GwSpec::from_classes(space, d, &classes).unwrap();
            let mut with_one = classes.clone();
            with_one.push(BasisClass::H(0));
            let t = GwSpec::from_classes(space, d, &with_one).unwrap();
            prop_assert_eq!(npoint_codim0(&s).unwrap(), npoint_codim0(&t).unwrap());
        }
    }

    #[test]
    fn complement_has_the_same_tcount(bits in 1u32..63) {
        let t: MarkSet = (1..=6).filter(|i| bits & (1 << (i - 1)) != 0).collect();
        prop_assert_eq!(tcount(t, 6), tcount(t.complement(6), 6));
    }

    #[test]
    fn relabelling_transports_fcurve_degrees(
        perm in Just(vec![1u32, 2, 3, 4, 5, 6]).prop_shuffle(),
        fi in 0..65usize,
        which in 0..3usize,
    ) {
        let (name, d, ins) = [
            ("Q3", 2, "H1,H1,H1,H2,H2,H3"),
            ("P2", 2, "H2,H2,H2,H1,H1,H2"),
            ("Q4", 2, "H1,Xi1,Xi1,Xi1,Xi2,H4"),
        ][which];
        let space: TargetSpace = name.parse().unwrap();
        let s = GwSpec::with_inferred_codim(space, d, parse_element_list(space, ins).unwrap()).unwrap();
        let f = all_fcurves(6)[fi];
        let moved = fcurve_degree(&s.relabel(&perm).unwrap(), &f.relabel(&perm).unwrap()).unwrap();
        prop_assert_eq!(moved, fcurve_degree(&s, &f).unwrap());
    }

    #[test]
    fn decomposition_round_trips(a in 0..4i64, b in 0..4i64) {
        let table = RayTable::builtin();
        let v = table.get("R1").unwrap().scale(&Rational::from_integer(a.into()))
            .try_add(&table.get("R16").unwrap().scale(&Rational::from_integer(b.into()))).unwrap();
        let dec = decompose_in_rays(&v, &table).unwrap().unwrap();
        let mut sum = ClassVector::zero(6).unwrap();
        for (name, c) in &dec {
            prop_assert!(*c >= Rational::zero());
            sum = sum.try_add(&table.get(name).unwrap().scale(c)).unwrap();
        }
        prop_assert_eq!(sum, v);
    }

    #[test]
    fn class_json_round_trips(coeffs in prop::collection::vec(-20i64..20, 16)) {
        let v = ClassVector::from_integers(6, &coeffs).unwrap();
        let json = v.to_json();
        let back = ClassVector::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
        prop_assert_eq!(back, v);
    }
}

#[test]
fn associativity_on_every_basis_triple() {
    for space in gwcycle::verify::associativity_spaces() {
        let b: Vec<QhElement> = space.basis().into_iter().map(|c| el(space, c)).collect();
        for x in &b {
            for y in &b {
                for z in &b {
                    let l = star_product(&star_product(x, y).unwrap(), z).unwrap();
                    let r = star_product(x, &star_product(y, z).unwrap()).unwrap();
                    assert_eq!(l, r, "{space}: {x} {y} {z}");
                }
            }
        }
    }
}

#[test]
fn vacua_kill_four_point_classes() {
    let space: TargetSpace = "Q3".parse().unwrap();
    let s = GwSpec::new(
        space,
        2,
        ["H0", "H3", "H3", "H3"].iter().map(|c| parse_element(space, c).unwrap()).collect(),
        1,
    )
    .unwrap();
    assert_eq!(fourpoint_divisor(&s).unwrap(), BigInt::zero());
}
