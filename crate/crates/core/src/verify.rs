//! Replays the worked examples as a list of pass/fail checks.
//!
//! Each [`Report`] groups the items of one acceptance criterion; a report
//! passes when every item does. Errors raised while computing an item turn
//! into failed items rather than aborting the run.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::cycle_classes::{
    divisor_class, fcurve_degree, fcurve_degree_by_products, pullback_pairing_with,
    pushforward_divisor, stratum_degree, ClassVector,
};
use crate::error::{Error, Result};
use crate::gw_numbers::{
    big_gw_projective, fourpoint_divisor, fourpoint_value, npoint_codim0, GwSpec, Strategy,
};
use crate::moduli_comb::{all_fcurves, all_leg_orders, nonadjacent_basis, pullback_fcurve, FCurve};
use crate::nef_cone::{
    contracted_fcurves_odd_quadric, decompose_in_rays, is_f_nef, ContractionRule, RayTable,
};
use crate::qh_ring::{
    parse_element_list, rat, star_product, BasisClass, QhElement, Rational, SpaceKind, TargetSpace,
};

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "quantum ring tables"),
    (2, "associativity of the quantum product"),
    (3, "codimension-0 numbers"),
    (4, "four-point divisors"),
    (5, "WDVV relations on five classes"),
    (6, "odd-quadric divisor classes"),
    (7, "even-quadric divisor classes"),
    (8, "n-point invariants of projective space"),
    (9, "stratum degrees and pushforwards"),
    (10, "degeneration, basis, contraction and nefness properties"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub id: u32,
    pub title: &'static str,
    pub items: Vec<Item>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.passed)
    }
}

fn item(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Item {
    Item {
        label: label.into(),
        passed,
        detail: detail.into(),
    }
}

fn eq_item<T: PartialEq + Display>(label: impl Into<String>, got: T, want: T) -> Item {
    let passed = got == want;
    item(label, passed, format!("got {got}, expected {want}"))
}

fn guarded(label: &str, f: impl FnOnce() -> Result<Item>) -> Item {
    f().unwrap_or_else(|e| item(label, false, format!("error: {e}")))
}

fn spec(space: &str, d: u32, ins: &str) -> Result<GwSpec> {
    let space: TargetSpace = space.parse()?;
    GwSpec::with_inferred_codim(space, d, parse_element_list(space, ins)?)
}

fn class_list(prefix: &str, r: u32, count: usize) -> String {
    vec![format!("{prefix}{r}"); count].join(",")
}

fn ray(name: &str) -> ClassVector {
    RayTable::builtin()
        .get(name)
        .cloned()
        .expect("builtin ray")
}

/// Ray type of a table key: representatives of one symmetry class share
/// the name up to trailing primes.
pub fn ray_type(name: &str) -> &str {
    name.trim_end_matches('\'')
}

/// Runs one criterion.
pub fn run(id: u32) -> Result<Report> {
    let (_, title) = CRITERIA
        .iter()
        .find(|(k, _)| *k == id)
        .ok_or_else(|| Error::Unsupported(format!("no criterion {id}")))?;
    let items = match id {
        1 => ring_tables(),
        2 => associativity(),
        3 => codim0_numbers(),
        4 => fourpoint_numbers(),
        5 => wdvv_relations(),
        6 => odd_quadric_classes(),
        7 => even_quadric_classes(),
        8 => projective_invariants(),
        9 => strata_and_pushforwards(),
        _ => properties(),
    };
    Ok(Report {
        id,
        title,
        items,
    })
}

pub fn run_all() -> Vec<Report> {
    CRITERIA
        .iter()
        .map(|(id, _)| run(*id).expect("listed criterion"))
        .collect()
}

// ---------------------------------------------------------------------------
// 1. ring tables

/// `H_i * H_j` on `Q_r` as `(q-power, k, coeff)` terms in the `H_k`.
fn quadric_table(r: u32, i: u32, j: u32) -> Vec<(u32, u32, i64)> {
    if i + j < r {
        vec![(0, i + j, 1)]
    } else if i + j == r {
        vec![(0, r, 1), (1, 0, 2)]
    } else if i == r && j == r {
        vec![(2, 0, 4)]
    } else if j == r {
        vec![(1, i, 2)]
    } else if i == r {
        vec![(1, j, 2)]
    } else {
        vec![(1, i + j - r, 4)]
    }
}

fn h_terms(space: TargetSpace, terms: &[(u32, u32, i64)]) -> Result<QhElement> {
    let mut acc = QhElement::zero(space);
    for &(q, k, c) in terms {
        let t = space.hyperplane_power(k)?.scale(&rat(c)).shift_q(q)?;
        acc = acc.try_add(&t)?;
    }
    Ok(acc)
}

/// `H_i * H_j` inside the hyperplane subring of `QH(P1 x P1)` with both
/// quantum parameters set to `q`, as `(q-power, k, coeff)` in `H0, H1, H2`.
fn quadric_surface_product(i: u32, j: u32) -> Vec<(u32, u32, Rational)> {
    // basis 1, h1, h2, pt; H0 = 1, H1 = h1 + h2, H2 = 2 pt
    fn mul(a: usize, b: usize) -> (u32, usize) {
        match (a.min(b), a.max(b)) {
            (0, x) => (0, x),
            (1, 1) | (2, 2) => (1, 0),
            (1, 2) => (0, 3),
            (1, 3) => (1, 2),
            (2, 3) => (1, 1),
            _ => (2, 0),
        }
    }
    let h = |k: u32| -> Vec<(usize, i64)> {
        match k {
            0 => vec![(0, 1)],
            1 => vec![(1, 1), (2, 1)],
            _ => vec![(3, 2)],
        }
    };
    let mut acc: BTreeMap<u32, [i64; 4]> = BTreeMap::new();
    for (a, ca) in h(i) {
        for (b, cb) in h(j) {
            let (q, c) = mul(a, b);
            acc.entry(q).or_default()[c] += ca * cb;
        }
    }
    let mut out = Vec::new();
    for (q, v) in acc {
        assert_eq!(v[1], v[2], "hyperplane subring is closed");
        for (k, c) in [(0, rat(v[0])), (1, rat(v[1])), (2, Rational::new(v[3].into(), 2.into()))] {
            if !c.is_zero() {
                out.push((q, k, c));
            }
        }
    }
    out
}

fn ring_tables() -> Vec<Item> {
    let mut items = Vec::new();
    let mut bad = Vec::new();
    let mut checked = 0;
    for i in 1..=2 {
        for j in 1..=2 {
            checked += 1;
            let want: Vec<(u32, u32, Rational)> = quadric_table(2, i, j)
                .into_iter()
                .map(|(q, k, c)| (q, k, rat(c)))
                .collect();
            let mut got = quadric_surface_product(i, j);
            got.sort();
            let mut want = want;
            want.sort();
            if got != want {
                bad.push(format!("Q2 H{i}*H{j}"));
            }
        }
    }
    for r in 3..=8 {
        let space = TargetSpace::quadric(r).expect("quadric");
        for i in 1..=r {
            for j in 1..=r {
                checked += 1;
                let ok = (|| -> Result<bool> {
                    let got = star_product(&space.hyperplane_power(i)?, &space.hyperplane_power(j)?)?;
                    Ok(got == h_terms(space, &quadric_table(r, i, j))?)
                })();
                if !matches!(ok, Ok(true)) {
                    bad.push(format!("Q{r} H{i}*H{j}"));
                }
            }
        }
    }
    items.push(item(
        "H_i * H_j follows the five-case table on Q_r, 2 <= r <= 8",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} products agree (Q2 on the hyperplane subring of P1 x P1)")
        } else {
            format!("mismatches: {}", bad.join(", "))
        },
    ));
    let mut bad = Vec::new();
    for r in 3..=8 {
        let space = TargetSpace::quadric(r).expect("quadric");
        let ok = (|| -> Result<bool> {
            let top = h_terms(space, &[(0, r, 1), (1, 0, 2)])?;
            let next = h_terms(space, &[(1, 1, 4)])?;
            Ok(crate::qh_ring::h_star_power(space, r) == top
                && crate::qh_ring::h_star_power(space, r + 1) == next)
        })();
        if !matches!(ok, Ok(true)) {
            bad.push(format!("Q{r}"));
        }
    }
    items.push(item(
        "H^{*r} = H_r + 2q and H^{*(r+1)} = 4q H_1 on Q_r, 3 <= r <= 8",
        bad.is_empty(),
        if bad.is_empty() {
            "6 quadrics agree".to_string()
        } else {
            format!("mismatches: {}", bad.join(", "))
        },
    ));
    items
}

// ---------------------------------------------------------------------------
// 2. associativity

/// Spaces covered by the exhaustive associativity check.
pub fn associativity_spaces() -> Vec<TargetSpace> {
    let mut out: Vec<TargetSpace> = (1..=6).map(|r| TargetSpace::projective(r).unwrap()).collect();
    out.extend([1, 3, 5, 7].map(|r| TargetSpace::quadric(r).unwrap()));
    out.extend([4, 6].map(|r| TargetSpace::quadric(r).unwrap()));
    out
}

fn associativity() -> Vec<Item> {
    associativity_spaces()
        .into_iter()
        .map(|space| {
            let label = format!("(a*b)*c = a*(b*c) on {space}");
            guarded(&label.clone(), || {
                let basis: Vec<QhElement> = space
                    .basis()
                    .into_iter()
                    .map(|c| QhElement::from_basis(space, c))
                    .collect::<Result<_>>()?;
                let mut triples = 0;
                for a in &basis {
                    for b in &basis {
                        let ab = star_product(a, b)?;
                        for c in &basis {
                            triples += 1;
                            if star_product(&ab, c)? != star_product(a, &star_product(b, c)?)? {
                                return Ok(item(label, false, format!("fails on {a}, {b}, {c}")));
                            }
                        }
                    }
                }
                Ok(item(label, true, format!("{triples} triples")))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 3. codimension-0 numbers

fn codim0_numbers() -> Vec<Item> {
    let mut items = Vec::new();
    for r in [3, 5, 7] {
        let label = format!("I^0_1(H1, H{r}, H{}) = 4 on Q{r}", r - 1);
        items.push(guarded(&label.clone(), || {
            let s = spec(&format!("Q{r}"), 1, &format!("H1,H{r},H{}", r - 1))?;
            Ok(eq_item(label, npoint_codim0(&s)?, BigInt::from(4)))
        }));
    }
    for r in [3, 5, 7] {
        let label = format!("I^0_2(H{r}, H{r}, H{r}) = 2 on Q{r}");
        items.push(guarded(&label.clone(), || {
            let s = spec(&format!("Q{r}"), 2, &class_list("H", r, 3))?;
            Ok(eq_item(label, npoint_codim0(&s)?, BigInt::from(2)))
        }));
    }
    let label = "P^r level-one numbers equal 1 on 50 random tuples";
    items.push(guarded(label, || {
        let tuples = random_level_one_tuples(50, 0x5eed);
        for (r, d, a) in &tuples {
            let space = TargetSpace::projective(*r)?;
            let classes: Vec<BasisClass> = a.iter().map(|&k| BasisClass::H(k)).collect();
            let s = GwSpec::from_classes(space, *d, &classes)?;
            let v = npoint_codim0(&s)?;
            if v != BigInt::from(1) {
                return Ok(item(label, false, format!("P{r} d={d} {a:?} gives {v}")));
            }
        }
        Ok(item(label, true, format!("{} tuples", tuples.len())))
    }));
    items
}

/// Random `(r, d, a)` with `a_i` in `[1, r]` satisfying the codimension-0
/// cycle condition `sum a_i = (r + 1) d + r` on `P^r`.
pub fn random_level_one_tuples(count: usize, seed: u64) -> Vec<(u32, u32, Vec<u32>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let r = rng.gen_range(2..=6u32);
        let d = rng.gen_range(1..=3u32);
        let n = rng.gen_range(3..=8usize);
        let target = (r + 1) * d + r;
        let mut a: Vec<u32> = (0..n - 1).map(|_| rng.gen_range(1..=r)).collect();
        let s: u32 = a.iter().sum();
        if s < target && (1..=r).contains(&(target - s)) {
            a.push(target - s);
            out.push((r, d, a));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 4. four-point divisors

/// `a_1` if `a_2 + a_3 >= a_1 + a_4`, else `r + 1 - a_4`, for sorted `a`.
pub fn line_closed_form(r: u32, a: [u32; 4]) -> u32 {
    if a[1] + a[2] >= a[0] + a[3] {
        a[0]
    } else {
        r + 1 - a[3]
    }
}

/// Sorted 4-tuples in `[1, r]` with the given sum.
pub fn sorted_quadruples(r: u32, sum: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in 1..=r {
        for b in a..=r {
            for c in b..=r {
                if let Some(e) = sum.checked_sub(a + b + c) {
                    if e >= c && e <= r {
                        out.push([a, b, c, e]);
                    }
                }
            }
        }
    }
    out
}

fn fourpoint_numbers() -> Vec<Item> {
    let mut items = Vec::new();
    for (ins, want) in [("H3,H3,H2,H2", 16), ("L0,L0,L1,L1", 1)] {
        let label = format!("I^1_2({ins}) = {want} on Q3");
        items.push(guarded(&label.clone(), || {
            Ok(eq_item(label, fourpoint_divisor(&spec("Q3", 2, ins)?)?, BigInt::from(want)))
        }));
    }
    let label = "P^r degree-1 four-point divisors match the closed form, r <= 6";
    items.push(guarded(label, || {
        let mut count = 0;
        for r in 1..=6 {
            let space = TargetSpace::projective(r)?;
            for a in sorted_quadruples(r, 2 * (r + 1)) {
                count += 1;
                let s = GwSpec::from_classes(space, 1, &a.map(BasisClass::H))?;
                let got = fourpoint_divisor(&s)?;
                let want = BigInt::from(line_closed_form(r, a));
                if got != want {
                    return Ok(item(label, false, format!("P{r} {a:?}: got {got}, expected {want}")));
                }
            }
        }
        Ok(item(label, true, format!("{count} tuples")))
    }));
    let label = "P^r degree-2 four-point divisors vanish, r <= 6";
    items.push(guarded(label, || {
        let mut count = 0;
        for r in 1..=6 {
            let space = TargetSpace::projective(r)?;
            for a in sorted_quadruples(r, 3 * (r + 1)) {
                count += 1;
                let s = GwSpec::from_classes(space, 2, &a.map(BasisClass::H))?;
                let got = fourpoint_divisor(&s)?;
                if !got.is_zero() {
                    return Ok(item(label, false, format!("P{r} {a:?}: got {got}")));
                }
            }
        }
        Ok(item(label, true, format!("{count} tuples")))
    }));
    items
}

// ---------------------------------------------------------------------------
// 5. WDVV

/// A random degree and five basis classes satisfying the codimension-1
/// cycle condition for four insertions after one product.
pub fn random_wdvv_input(rng: &mut StdRng) -> (TargetSpace, u32, [BasisClass; 5]) {
    let spaces: Vec<TargetSpace> = ["P2", "P3", "P4", "Q3", "Q5", "Q4", "Q6"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    loop {
        let space = spaces[rng.gen_range(0..spaces.len())];
        let d = rng.gen_range(1..=2u32);
        let basis = space.basis();
        let target = 1 + space.fano_degree() * d + space.dim();
        let first: Vec<BasisClass> = (0..4).map(|_| basis[rng.gen_range(0..basis.len())]).collect();
        let s: u32 = first.iter().map(|&c| space.codim(c)).sum();
        let Some(need) = target.checked_sub(s) else { continue };
        let last: Vec<BasisClass> = basis.iter().copied().filter(|&c| space.codim(c) == need).collect();
        if last.is_empty() {
            continue;
        }
        let e = last[rng.gen_range(0..last.len())];
        return (space, d, [first[0], first[1], first[2], first[3], e]);
    }
}

/// The three expressions of the five-class relation, with classes
/// `(i, j, k, l, m)`.
pub fn wdvv_sides(space: TargetSpace, d: u32, c: [BasisClass; 5]) -> Result<[Rational; 3]> {
    let b = |x: BasisClass| QhElement::from_basis(space, x);
    let [i, j, k, l, m] = c.map(b);
    let (i, j, k, l, m) = (i?, j?, k?, l?, m?);
    let d = d as i64;
    let f = |a: &QhElement, x: &QhElement, y: &QhElement, p: &QhElement, q: &QhElement| {
        fourpoint_value(space, d, &[a.clone(), x.clone(), y.clone(), star_product(p, q)?], Strategy::Auto)
    };
    let lhs = f(&k, &l, &m, &i, &j)?;
    let common = f(&i, &j, &m, &k, &l)?;
    let first = f(&j, &l, &m, &i, &k)? + f(&i, &k, &m, &j, &l)? - &common;
    let second = f(&j, &k, &m, &i, &l)? + f(&i, &l, &m, &j, &k)? - &common;
    Ok([lhs, first, second])
}

fn wdvv_relations() -> Vec<Item> {
    let label = "both five-class relations hold on 200 random inputs";
    vec![guarded(label, || {
        let mut rng = StdRng::seed_from_u64(0x0dd5);
        let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
        let mut nonzero = 0;
        for _ in 0..200 {
            let (space, d, c) = random_wdvv_input(&mut rng);
            *kinds
                .entry(match space.kind() {
                    SpaceKind::ProjSpace => "P",
                    SpaceKind::OddQuadric => "odd Q",
                    SpaceKind::EvenQuadric => "even Q",
                })
                .or_default() += 1;
            let [lhs, a, b] = wdvv_sides(space, d, c)?;
            if lhs != a || lhs != b {
                return Ok(item(
                    label,
                    false,
                    format!("{space} d={d} {c:?}: {lhs} vs {a} vs {b}"),
                ));
            }
            if !lhs.is_zero() {
                nonzero += 1;
            }
        }
        let kinds: Vec<String> = kinds.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        Ok(item(
            label,
            kinds.len() == 3,
            format!("{} ({nonzero} with nonzero value)", kinds.join(", ")),
        ))
    })]
}

// ---------------------------------------------------------------------------
// 6, 7. divisor classes from quadrics

/// Divisor examples on odd quadrics: `(spec, multiple, ray)`.
pub fn odd_quadric_examples() -> Result<Vec<(GwSpec, i64, &'static str)>> {
    let mut out = Vec::new();
    for r in [3, 5, 7] {
        out.push((spec(&format!("Q{r}"), 4, &format!("H1,{}", class_list("H", r, 5)))?, 16, "R1"));
    }
    for (r, i, j) in [(5, 2, 4), (5, 3, 3), (7, 2, 6), (7, 3, 5)] {
        let ins = format!("H{i},H{j},{}", class_list("H", r, 4));
        out.push((spec(&format!("Q{r}"), 4, &ins)?, 8, "R10"));
    }
    Ok(out)
}

/// The two even-quadric examples with their expected vectors.
pub fn even_quadric_examples() -> Result<Vec<(GwSpec, [i64; 16])>> {
    Ok(vec![
        (
            spec("Q6", 2, "H1,H6,Xi1,Xi1,Xi1,Xi1")?,
            [2, 0, 2, 2, 0, 2, 4, 0, 4, 0, 0, 0, 6, 0, 0, 3],
        ),
        (
            spec("Q4", 2, "H1,Xi1,Xi1,Xi1,Xi2,H4")?,
            [0, 1, 1, 0, 2, 0, 2, 0, 2, 1, 2, 1, 2, 0, 0, 2],
        ),
    ])
}

fn describe(s: &GwSpec) -> String {
    let ins: Vec<String> = s.insertions.iter().map(|a| a.to_string()).collect();
    format!("{} d={} ({})", s.space, s.degree, ins.join(","))
}

fn odd_quadric_classes() -> Vec<Item> {
    let examples = match odd_quadric_examples() {
        Ok(e) => e,
        Err(e) => return vec![item("odd-quadric examples", false, e.to_string())],
    };
    let mut items = Vec::new();
    for (s, k, name) in examples {
        let label = format!("{} = {k} {name}", describe(&s));
        items.push(guarded(&label.clone(), || {
            let got = divisor_class(&s)?;
            let want = ray(name).scale(&rat(k));
            let mut detail = format!("got {got}, expected {want}");
            let pattern = got
                .coeffs()
                .iter()
                .zip(want.coeffs())
                .all(|(a, b)| a.is_zero() == b.is_zero());
            if got != want && pattern {
                detail.push_str(" (same support)");
            }
            Ok(item(label, got == want, detail))
        }));
    }
    items
}

fn even_quadric_classes() -> Vec<Item> {
    let examples = match even_quadric_examples() {
        Ok(e) => e,
        Err(e) => return vec![item("even-quadric examples", false, e.to_string())],
    };
    let mut items = Vec::new();
    for (i, (s, want)) in examples.into_iter().enumerate() {
        let label = format!("class of {}", describe(&s));
        let got = divisor_class(&s);
        items.push(guarded(&label.clone(), || {
            let want = ClassVector::from_integers(6, &want)?;
            Ok(eq_item(label, got.clone()?, want))
        }));
        if i == 0 {
            let label = "delta_135 combination value 6 on Q6";
            items.push(guarded(label, || {
                let got = got?;
                let sys = nonadjacent_basis(6)?;
                let k = sys
                    .labels()
                    .iter()
                    .position(|l| l == "d135")
                    .ok_or_else(|| Error::Internal("no d135 in basis".into()))?;
                Ok(eq_item(label, got.coeffs()[k].clone(), rat(6)))
            }));
        }
    }
    items
}

// ---------------------------------------------------------------------------
// 8. projective invariants

fn projective_invariants() -> Vec<Item> {
    let cases: [(&str, u32, u32, Vec<u32>, i64); 5] = [
        ("<H2^4 H1>_1 on P3", 3, 1, vec![2, 2, 2, 2, 1], 2),
        ("lines through 2 points of P2, with an H1 marking", 2, 1, vec![2, 2, 1], 1),
        ("conics through 5 points of P2", 2, 2, vec![2; 5], 1),
        ("cubics through 8 points of P2", 2, 3, vec![2; 8], 12),
        ("quartics through 11 points of P2", 2, 4, vec![2; 11], 620),
    ];
    let mut items: Vec<Item> = cases
        .into_iter()
        .map(|(label, r, d, codims, want)| {
            guarded(label, || {
                let got = big_gw_projective(r, d, &codims)?;
                Ok(eq_item(label, got, BigInt::from(want)))
            })
        })
        .collect();
    let label = "three-point values agree with the quantum product on P^r, r <= 4";
    items.push(guarded(label, || {
        let mut count = 0;
        for r in 1..=4 {
            let space = TargetSpace::projective(r)?;
            for d in 0..=2 {
                for a in 0..=r {
                    for b in a..=r {
                        for c in b..=r {
                            count += 1;
                            let s = GwSpec::new(
                                space,
                                d,
                                [a, b, c]
                                    .iter()
                                    .map(|&k| QhElement::from_basis(space, BasisClass::H(k)))
                                    .collect::<Result<_>>()?,
                                0,
                            )?;
                            let got = big_gw_projective(r, d, &[a, b, c])?;
                            let want = npoint_codim0(&s)?;
                            if got != want {
                                return Ok(item(
                                    label,
                                    false,
                                    format!("P{r} d={d} ({a},{b},{c}): {got} vs {want}"),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(item(label, true, format!("{count} triples")))
    }));
    items
}

// ---------------------------------------------------------------------------
// 9. strata and pushforwards

/// The two codimension-2 classes on `M_{0,7}` that are pushed forward.
pub fn pushforward_examples() -> Result<[(GwSpec, [i64; 16]); 2]> {
    Ok([
        (
            spec("P3", 2, "H1,H2,H2,H2,H2,H2,H2")?,
            [4, 0, 4, 6, 2, 4, 6, 2, 4, 2, 2, 0, 10, 2, 0, 2],
        ),
        (
            spec("P3", 2, "H1,H1,H1,H1,H3,H3,H3")?,
            [1, 1, 2, 1, 1, 2, 2, 1, 2, 1, 1, 1, 3, 0, 1, 1],
        ),
    ])
}

fn strata_and_pushforwards() -> Vec<Item> {
    let mut items = Vec::new();
    let strata: [(&str, &str, Option<Vec<i64>>, i64); 4] = [
        ("A", "F{1|2|3|4,5,6}", Some(vec![2, 0, 2]), 4),
        ("B", "F{1|2|3,4|5,6}", Some(vec![0, 0, 0]), 0),
        ("C", "F{2|3|4|1,5,6}", None, 6),
        ("D", "F{2|5|1,6|3,4}", None, 2),
    ];
    for (name, curve, parts, total) in strata {
        let label = format!("Z . pi^*{name} strata for Z = I^2_2(H1, H2^6) on P3");
        items.push(guarded(&label.clone(), || {
            let z = spec("P3", 2, "H1,H2,H2,H2,H2,H2,H2")?;
            let f: FCurve = curve.parse()?;
            let values = pullback_fcurve(&f)?
                .iter()
                .map(|t| stratum_degree(&z, t))
                .collect::<Result<Vec<_>>>()?;
            let sum: Rational = values.iter().sum();
            let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            let mut ok = sum == rat(total);
            if let Some(p) = &parts {
                ok &= values == p.iter().map(|&v| rat(v)).collect::<Vec<_>>();
            }
            let want = match &parts {
                Some(p) => format!("{p:?}, total {total}"),
                None => format!("total {total}"),
            };
            Ok(item(label, ok, format!("got [{}], expected {want}", shown.join(", "))))
        }));
    }
    let examples = match pushforward_examples() {
        Ok(e) => e,
        Err(e) => {
            items.push(item("pushforward examples", false, e.to_string()));
            return items;
        }
    };
    let table = RayTable::builtin();
    for (k, (s, want)) in examples.into_iter().enumerate() {
        let label = format!("pi_* {}", describe(&s));
        let got = pushforward_divisor(&s);
        items.push(guarded(&label.clone(), || {
            Ok(eq_item(label, got.clone()?, ClassVector::from_integers(6, &want)?))
        }));
        let (label, rays, coeff): (&str, Vec<&str>, i64) = if k == 0 {
            ("first pushforward = 2 (R1 + R6 + R6' + R5)", vec!["R1", "R6", "R6'", "R5"], 2)
        } else {
            ("second pushforward decomposes as {R5: 1, R16: 1}", table.rays().keys().map(String::as_str).collect(), 1)
        };
        items.push(guarded(label, || {
            let v = got?;
            let sub = table.subset(&rays)?;
            let Some(dec) = decompose_in_rays(&v, &sub)? else {
                return Ok(item(label, false, "no decomposition"));
            };
            let used: BTreeMap<String, Rational> = dec.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let shown: Vec<String> = used.iter().map(|(n, c)| format!("{n}: {c}")).collect();
            let ok = if k == 0 {
                used.len() == 4 && used.values().all(|c| *c == rat(coeff))
            } else {
                let by_type: BTreeMap<&str, Rational> =
                    used.iter().map(|(n, c)| (ray_type(n), c.clone())).collect();
                by_type.len() == 2 && by_type.get("R5") == Some(&rat(1)) && by_type.get("R16") == Some(&rat(1))
            };
            Ok(item(label, ok, format!("{{{}}}", shown.join(", "))))
        }));
    }
    items
}

// ---------------------------------------------------------------------------
// 10. properties

/// Sorted 6-tuples in `[1, r]` giving a divisor of degree `d` on `Q_r`.
pub fn odd_quadric_divisor_tuples(r: u32, d: u32) -> Vec<[u32; 6]> {
    let target = 1 + r * d + r;
    let mut out = Vec::new();
    let mut a = [1u32; 6];
    fn rec(pos: usize, lo: u32, r: u32, left: u32, a: &mut [u32; 6], out: &mut Vec<[u32; 6]>) {
        if pos == 6 {
            if left == 0 {
                out.push(*a);
            }
            return;
        }
        for v in lo..=r {
            if v * (6 - pos) as u32 > left {
                break;
            }
            a[pos] = v;
            rec(pos + 1, v, r, left - v, a, out);
        }
    }
    rec(0, 1, r, target, &mut a, &mut out);
    out
}

/// Flagged F-curves of the rule with nonzero degree, over the exhaustive
/// sweep at `n = 6`: `(flagged, failures, first failure)`.
pub fn contraction_sweep(rule: ContractionRule) -> Result<(usize, usize, Option<String>)> {
    let mut jobs = Vec::new();
    for r in [3, 5, 7] {
        for d in 1..=4 {
            for a in odd_quadric_divisor_tuples(r, d) {
                jobs.push((r, d, a));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|(r, d, a)| -> Result<(usize, Vec<String>)> {
            let space = TargetSpace::quadric(*r)?;
            let s = GwSpec::from_classes(space, *d, &a.map(BasisClass::H))?;
            let flagged = contracted_fcurves_odd_quadric(&s, rule)?;
            let mut bad = Vec::new();
            for f in &flagged {
                let v = fcurve_degree(&s, f)?;
                if !v.is_zero() {
                    bad.push(format!("Q{r} d={d} {a:?} on {f}: degree {v}"));
                }
            }
            Ok((flagged.len(), bad))
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = results.iter().map(|(n, _)| n).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|(_, b)| b).collect();
    Ok((flagged, bad.len(), bad.into_iter().next()))
}

fn properties() -> Vec<Item> {
    let mut items = Vec::new();

    let label = "Z . pi^*F is independent of the degeneration of long legs at n = 7";
    items.push(guarded(label, || {
        let sys = nonadjacent_basis(6)?;
        let mut curves: Vec<FCurve> = sys.duals.iter().flatten().map(|(_, f)| *f).collect();
        curves.sort_by_key(|f| f.to_string());
        curves.dedup();
        let mut splits = 0;
        for (z, _) in pushforward_examples()? {
            for f in &curves {
                let orders = all_leg_orders(f);
                let first = pullback_pairing_with(&z, f, &orders[0])?;
                for o in &orders[1..] {
                    splits += 1;
                    let v = pullback_pairing_with(&z, f, o)?;
                    if v != first {
                        return Ok(item(label, false, format!("{f}: {first} vs {v}")));
                    }
                }
            }
        }
        Ok(item(label, splits > 0, format!("{splits} alternative splits agree")))
    }));

    let mut classes: Vec<(String, GwSpec)> = Vec::new();
    if let Ok(ex) = odd_quadric_examples() {
        classes.extend(ex.into_iter().map(|(s, _, _)| (describe(&s), s)));
    }
    if let Ok(ex) = even_quadric_examples() {
        classes.extend(ex.into_iter().map(|(s, _)| (describe(&s), s)));
    }
    for (name, s) in &classes {
        let label = format!("F-curve degrees match the Keel pairing for {name}");
        items.push(guarded(&label.clone(), || {
            let v = divisor_class(s)?;
            let sys = nonadjacent_basis(6)?;
            let used: Vec<FCurve> = sys.duals.iter().flatten().map(|(_, f)| *f).collect();
            let mut count = 0;
            for f in all_fcurves(6).into_iter().filter(|f| !used.contains(f)) {
                count += 1;
                let direct = fcurve_degree(s, &f)?;
                let by_products = fcurve_degree_by_products(s, &f)?;
                let keel = v.pair_fcurve(&f)?;
                if Rational::from_integer(direct.clone()) != keel || direct != by_products {
                    return Ok(item(
                        label,
                        false,
                        format!("{f}: sum {direct}, products {by_products}, Keel {keel}"),
                    ));
                }
            }
            Ok(item(label, count >= 20, format!("{count} non-basis F-curves")))
        }));
    }

    let label = "pushforwards match Z . pi^*F on all 65 F-curves";
    items.push(guarded(label, || {
        for (z, _) in pushforward_examples()? {
            let v = pushforward_divisor(&z)?;
            for f in all_fcurves(6) {
                let direct = crate::cycle_classes::pullback_pairing(&z, &f)?;
                let keel = v.pair_fcurve(&f)?;
                if direct != keel {
                    return Ok(item(
                        label,
                        false,
                        format!("{} on {f}: pullback {direct}, Keel {keel}", describe(&z)),
                    ));
                }
            }
        }
        Ok(item(label, true, "2 classes"))
    }));

    for (rule, name) in [
        (ContractionRule::Contract1, "first contraction rule"),
        (ContractionRule::Contract2, "pair contraction rule"),
    ] {
        let label = format!("{name} is sound at n = 6");
        items.push(guarded(&label.clone(), || {
            let (flagged, failures, first) = contraction_sweep(rule)?;
            let detail = match first {
                None => format!("{flagged} flagged F-curves all contracted"),
                Some(f) => format!("{failures} of {flagged} flagged F-curves have nonzero degree, e.g. {f}"),
            };
            Ok(item(label, failures == 0 && flagged > 0, detail))
        }));
    }

    let label = "every computed divisor class is F-nef";
    items.push(guarded(label, || {
        let mut vectors: Vec<(String, ClassVector)> = Vec::new();
        for (name, s) in &classes {
            vectors.push((name.clone(), divisor_class(s)?));
        }
        for (s, _) in pushforward_examples()? {
            vectors.push((format!("pi_* {}", describe(&s)), pushforward_divisor(&s)?));
        }
        for r in [3, 5, 7] {
            for d in 1..=4 {
                for a in odd_quadric_divisor_tuples(r, d) {
                    let space = TargetSpace::quadric(r)?;
                    let s = GwSpec::from_classes(space, d, &a.map(BasisClass::H))?;
                    vectors.push((describe(&s), divisor_class(&s)?));
                }
            }
        }
        for (name, v) in &vectors {
            if !is_f_nef(v)? {
                return Ok(item(label, false, format!("{name} = {v} is negative on an F-curve")));
            }
        }
        Ok(item(label, true, format!("{} classes", vectors.len())))
    }));
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_table() {
        assert_eq!(line_closed_form(3, [2, 2, 2, 2]), 2);
        assert_eq!(line_closed_form(3, [1, 2, 2, 3]), 1);
        assert_eq!(line_closed_form(4, [2, 2, 3, 3]), 2);
        assert_eq!(sorted_quadruples(2, 6), vec![[1, 1, 2, 2]]);
    }

    #[test]
    fn quadric_surface_model() {
        assert_eq!(
            quadric_surface_product(1, 1),
            vec![(0, 2, rat(1)), (1, 0, rat(2))]
        );
        assert_eq!(quadric_surface_product(2, 2), vec![(2, 0, rat(4))]);
    }

    #[test]
    fn tuples_satisfy_cycle_condition() {
        for (r, d, a) in random_level_one_tuples(20, 7) {
            assert_eq!(a.iter().sum::<u32>(), (r + 1) * d + r);
            assert!(a.iter().all(|&x| (1..=r).contains(&x)));
        }
        for a in odd_quadric_divisor_tuples(5, 2) {
            assert_eq!(a.iter().sum::<u32>(), 16);
        }
    }

    #[test]
    fn unknown_criterion() {
        assert!(run(11).is_err());
        assert_eq!(ray_type("R5''"), "R5");
    }
}
