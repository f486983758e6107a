//! Genus-zero Gromov-Witten numbers.
//!
//! * codimension-0 classes on `M_{0,n}` are read off the small quantum
//!   product: the coefficient of `q^d [pt]` in `a_1 * ... * a_n`;
//! * four-point divisor degrees are reduced to three-point numbers by the
//!   hyperplane-splitting rewrite of the four-point WDVV relation, ending in
//!   the divisor axiom;
//! * arbitrary `n`-point invariants of `P^r` come from the WDVV relation on
//!   `M_{0,n+1}`, which peels one hyperplane factor off an insertion.
//!
//! Insertions may carry powers of `q`; `q^k a` at degree `d` means `a` at
//! degree `d - k`, and the extension is linear over `Q`, not over `Q[q]`.

use std::sync::OnceLock;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qh_ring::{
    rat, star_product, star_product_all, BasisClass, QhElement, Rational, SpaceKind, TargetSpace,
};

/// Recursion budget; valid inputs stay far below it.
const MAX_DEPTH: u32 = 4096;

/// A Gromov-Witten class `I^{c,X}_{d, (a_1..a_n)}` on `M_{0,n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GwSpec {
    pub space: TargetSpace,
    pub degree: u32,
    pub insertions: Vec<QhElement>,
    pub codim: u32,
}

impl GwSpec {
    pub fn new(
        space: TargetSpace,
        degree: u32,
        insertions: Vec<QhElement>,
        codim: u32,
    ) -> Result<Self> {
        for (i, a) in insertions.iter().enumerate() {
            if a.space() != space {
                return Err(Error::SpaceMismatch(space, a.space()));
            }
            if !a.is_homogeneous() {
                return Err(Error::NotHomogeneous(i));
            }
        }
        Ok(GwSpec {
            space,
            degree,
            insertions,
            codim,
        })
    }

    /// Build a spec whose codimension is read off the cycle condition.
    pub fn with_inferred_codim(
        space: TargetSpace,
        degree: u32,
        insertions: Vec<QhElement>,
    ) -> Result<Self> {
        let mut spec = Self::new(space, degree, insertions, 0)?;
        let excess = spec.insertion_degree() - spec.expected_degree(0);
        if excess < 0 {
            return Err(Error::Unsupported(format!(
                "insertions have total degree {} below the dimension bound {}",
                spec.insertion_degree(),
                spec.expected_degree(0)
            )));
        }
        spec.codim = excess as u32;
        Ok(spec)
    }

    /// Convenience constructor from basis classes.
    pub fn from_classes(space: TargetSpace, degree: u32, classes: &[BasisClass]) -> Result<Self> {
        let ins = classes
            .iter()
            .map(|&c| QhElement::from_basis(space, c))
            .collect::<Result<Vec<_>>>()?;
        Self::with_inferred_codim(space, degree, ins)
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    /// `sum |a_i|`, counting `q` with its degree.
    pub fn insertion_degree(&self) -> i64 {
        self.insertions
            .iter()
            .map(|a| a.degree().unwrap_or(0) as i64)
            .sum()
    }

    fn expected_degree(&self, codim: u32) -> i64 {
        codim as i64 + self.space.fano_degree() as i64 * self.degree as i64 + self.space.dim() as i64
    }

    /// `sum |a_i| = c + c_1(T_X).d + dim X`.
    pub fn satisfies_cycle_condition(&self) -> bool {
        self.insertions.iter().all(|a| !a.is_zero())
            && self.insertion_degree() == self.expected_degree(self.codim)
    }

    /// Move the insertion at marking `i` to marking `perm[i - 1]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<GwSpec> {
        let n = self.n();
        let mut slots: Vec<Option<QhElement>> = vec![None; n];
        if perm.len() != n {
            return Err(Error::InsertionCount {
                expected: n,
                got: perm.len(),
            });
        }
        for (a, &p) in self.insertions.iter().zip(perm) {
            let slot = (p as usize)
                .checked_sub(1)
                .and_then(|k| slots.get_mut(k))
                .filter(|s| s.is_none())
                .ok_or_else(|| Error::Combinatorics(format!("{perm:?} is not a permutation")))?;
            *slot = Some(a.clone());
        }
        Ok(GwSpec {
            insertions: slots.into_iter().map(|s| s.expect("filled")).collect(),
            ..self.clone()
        })
    }
}

// ---------------------------------------------------------------------------
// Memo tables

#[derive(Default)]
struct Memo {
    three: DashMap<(TargetSpace, i64, [BasisClass; 3]), Rational>,
    four: DashMap<(TargetSpace, i64, [BasisClass; 4]), Rational>,
    split: DashMap<(TargetSpace, i64, [BasisClass; 3], u32), Rational>,
    projective: DashMap<(u32, i64, Vec<u32>), BigInt>,
}

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(Memo::default)
}

fn sorted<const N: usize>(mut a: [BasisClass; N]) -> [BasisClass; N] {
    a.sort();
    a
}

pub(crate) fn to_integer(x: &Rational) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::NonIntegral(x.to_string()))
    }
}

fn depth_guard(depth: u32) -> Result<()> {
    if depth > MAX_DEPTH {
        Err(Error::Internal("recursion depth exceeded".into()))
    } else {
        Ok(())
    }
}

/// Expand a list of elements multilinearly into `(q-shift, classes, coeff)`.
fn expand(items: &[QhElement]) -> Vec<(u32, Vec<BasisClass>, Rational)> {
    let mut acc: Vec<(u32, Vec<BasisClass>, Rational)> = vec![(0, Vec::new(), Rational::one())];
    for item in items {
        let mut next = Vec::with_capacity(acc.len() * item.len());
        for (s, classes, c) in &acc {
            for (q, b, k) in item.terms() {
                let mut cl = classes.clone();
                cl.push(b);
                next.push((s + q, cl, c * k));
            }
        }
        acc = next;
    }
    acc
}

// ---------------------------------------------------------------------------
// Codimension zero

/// Coefficient of `q^d [pt]` in the quantum product of the insertions.
pub fn codim0_value(space: TargetSpace, degree: i64, insertions: &[QhElement]) -> Result<Rational> {
    if degree < 0 || insertions.is_empty() {
        return Ok(Rational::zero());
    }
    let product = star_product_all(insertions)?;
    if product.space() != space {
        return Err(Error::SpaceMismatch(space, product.space()));
    }
    Ok(product.point_coefficient(degree as u32))
}

/// Three-point number `<a, b, c>_d` of basis classes.
pub fn three_point(space: TargetSpace, degree: i64, classes: [BasisClass; 3]) -> Rational {
    if degree < 0 {
        return Rational::zero();
    }
    let key = (space, degree, sorted(classes));
    if let Some(v) = memo().three.get(&key) {
        return v.clone();
    }
    let codims: u32 = classes.iter().map(|&c| space.codim(c)).sum();
    let value = if codims as i64 != space.fano_degree() as i64 * degree + space.dim() as i64 {
        Rational::zero()
    } else {
        let [a, b, c] = classes;
        let ab = star_product(&basis(space, a), &basis(space, b)).expect("same space");
        let abc = star_product(&ab, &basis(space, c)).expect("same space");
        abc.point_coefficient(degree as u32)
    };
    memo().three.insert(key, value.clone());
    value
}

fn basis(space: TargetSpace, c: BasisClass) -> QhElement {
    QhElement::from_basis(space, c).expect("basis class of the space")
}

/// `I^0_d(a_1..a_n)`: the degree of the codimension-0 class.
pub fn npoint_codim0(spec: &GwSpec) -> Result<BigInt> {
    if spec.insertions.is_empty() {
        return Err(Error::InsertionCount {
            expected: 1,
            got: 0,
        });
    }
    if spec.codim != 0 || !spec.satisfies_cycle_condition() {
        return Ok(BigInt::zero());
    }
    to_integer(&codim0_value(spec.space, spec.degree as i64, &spec.insertions)?)
}

// ---------------------------------------------------------------------------
// Four-point divisors

/// How `fourpoint_divisor` treats an insertion of codimension one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Use the divisor axiom whenever an `H1` insertion is present.
    #[default]
    Auto,
    /// At the top level, split an insertion of codimension at least two even
    /// if an `H1` insertion is present (used to cross-check the shortcut).
    ForceSplit,
}

/// `(H1 . d') I^0_{d'}(rest)` summed over the `q`-expansion of `rest`.
fn divisor_axiom(space: TargetSpace, degree: i64, rest: &[QhElement]) -> Rational {
    let mut total = Rational::zero();
    for (shift, classes, coeff) in expand(rest) {
        let d = degree - shift as i64;
        if d <= 0 {
            continue;
        }
        let v = three_point(space, d, [classes[0], classes[1], classes[2]]);
        if !v.is_zero() {
            total += coeff * rat(d) * v;
        }
    }
    total
}

fn four_point_cycle_ok(space: TargetSpace, degree: i64, codims: u32) -> bool {
    codims as i64 == 1 + space.fano_degree() as i64 * degree + space.dim() as i64
}

/// Degree of `I^1_d(a, b, c, e)` on `M_{0,4}` for basis classes.
pub fn four_point(space: TargetSpace, degree: i64, classes: [BasisClass; 4]) -> Result<Rational> {
    four_point_with(space, degree, classes, Strategy::Auto, 0)
}

fn four_point_with(
    space: TargetSpace,
    degree: i64,
    classes: [BasisClass; 4],
    strategy: Strategy,
    depth: u32,
) -> Result<Rational> {
    depth_guard(depth)?;
    if degree <= 0 || classes.contains(&BasisClass::H(0)) {
        return Ok(Rational::zero());
    }
    let codims: u32 = classes.iter().map(|&c| space.codim(c)).sum();
    if !four_point_cycle_ok(space, degree, codims) {
        return Ok(Rational::zero());
    }
    let classes = sorted(classes);
    let key = (space, degree, classes);
    if strategy == Strategy::Auto {
        if let Some(v) = memo().four.get(&key) {
            return Ok(v.clone());
        }
    }

    let divisor_slot = classes.iter().position(|&c| c == BasisClass::H(1));
    let split_slot = classes
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            BasisClass::H(t) if *t >= 2 => Some((*t, i)),
            _ => None,
        })
        .max();

    let value = match (divisor_slot, split_slot, strategy) {
        (Some(i), _, Strategy::Auto) | (Some(i), None, Strategy::ForceSplit) => {
            let rest: Vec<QhElement> = (0..4)
                .filter(|&j| j != i)
                .map(|j| basis(space, classes[j]))
                .collect();
            divisor_axiom(space, degree, &rest)
        }
        (_, Some((t, i)), _) => {
            let mut others = [BasisClass::H(0); 3];
            let mut k = 0;
            for (j, &c) in classes.iter().enumerate() {
                if j != i {
                    others[k] = c;
                    k += 1;
                }
            }
            let shortcut = strategy == Strategy::Auto;
            split(space, degree, others, t, shortcut, depth + 1)?
        }
        (None, None, _) => {
            return Err(Error::Internal(format!(
                "no insertion of {space} can be split in {classes:?}"
            )))
        }
    };
    if strategy == Strategy::Auto {
        memo().four.insert(key, value.clone());
    }
    Ok(value)
}

/// `I^1_d(x, y, z, H_t)` via
/// `I(x,y,z,H*Y) = I(x*H, y, z, Y) + I(x, H, z, Y*y) - I(x*y, z, H, Y)`
/// with `Y = H_{t-1}`; the last two terms fall to the divisor axiom and the
/// first lowers `t`.
fn split(
    space: TargetSpace,
    degree: i64,
    xyz: [BasisClass; 3],
    t: u32,
    shortcut: bool,
    depth: u32,
) -> Result<Rational> {
    depth_guard(depth)?;
    if degree <= 0 || xyz.contains(&BasisClass::H(0)) {
        return Ok(Rational::zero());
    }
    let codims: u32 = xyz.iter().map(|&c| space.codim(c)).sum::<u32>() + t;
    if !four_point_cycle_ok(space, degree, codims) {
        return Ok(Rational::zero());
    }
    let h_t = space.hyperplane_power(t)?;
    if t == 1 {
        return Ok(divisor_axiom(
            space,
            degree,
            &xyz.map(|c| basis(space, c)),
        ));
    }
    if shortcut {
        if let Some(i) = xyz.iter().position(|&c| c == BasisClass::H(1)) {
            let mut rest: Vec<QhElement> = (0..3)
                .filter(|&j| j != i)
                .map(|j| basis(space, xyz[j]))
                .collect();
            rest.push(h_t);
            return Ok(divisor_axiom(space, degree, &rest));
        }
    }
    let xyz = sorted(xyz);
    let key = (space, degree, xyz, t);
    if shortcut {
        if let Some(v) = memo().split.get(&key) {
            return Ok(v.clone());
        }
    }

    let [x, y, z] = xyz;
    let h = basis(space, BasisClass::H(1));
    let lower = space.hyperplane_power(t - 1)?;
    let (xe, ye, ze) = (basis(space, x), basis(space, y), basis(space, z));

    let mut value = Rational::zero();
    for (s, b, c) in star_product(&xe, &h)?.terms() {
        let v = split(space, degree - s as i64, [b, y, z], t - 1, true, depth + 1)?;
        value += c * v;
    }
    value += divisor_axiom(space, degree, &[xe.clone(), ze.clone(), star_product(&lower, &ye)?]);
    value -= divisor_axiom(space, degree, &[star_product(&xe, &ye)?, ze, lower]);

    if shortcut {
        memo().split.insert(key, value.clone());
    }
    Ok(value)
}

/// `I^1_d(a_1..a_4)` for `q`-extended insertions, as an exact rational.
pub fn fourpoint_value(
    space: TargetSpace,
    degree: i64,
    insertions: &[QhElement],
    strategy: Strategy,
) -> Result<Rational> {
    if insertions.len() != 4 {
        return Err(Error::InsertionCount {
            expected: 4,
            got: insertions.len(),
        });
    }
    if let Some(a) = insertions.iter().find(|a| a.space() != space) {
        return Err(Error::SpaceMismatch(space, a.space()));
    }
    let mut total = Rational::zero();
    for (shift, classes, coeff) in expand(insertions) {
        let d = degree - shift as i64;
        let cl = [classes[0], classes[1], classes[2], classes[3]];
        let v = four_point_with(space, d, cl, strategy, 0)?;
        total += coeff * v;
    }
    Ok(total)
}

/// Degree of the divisor `I^1_d(a_1..a_4)` in `Pic(M_{0,4}) = Z`.
pub fn fourpoint_divisor(spec: &GwSpec) -> Result<BigInt> {
    fourpoint_divisor_with(spec, Strategy::Auto)
}

pub fn fourpoint_divisor_with(spec: &GwSpec, strategy: Strategy) -> Result<BigInt> {
    if spec.n() != 4 {
        return Err(Error::InsertionCount {
            expected: 4,
            got: spec.n(),
        });
    }
    if spec.codim != 1 || !spec.satisfies_cycle_condition() {
        return Ok(BigInt::zero());
    }
    to_integer(&fourpoint_value(
        spec.space,
        spec.degree as i64,
        &spec.insertions,
        strategy,
    )?)
}

// ---------------------------------------------------------------------------
// n-point invariants of projective space

/// `<H_{a_1}, ..., H_{a_n}>_d` on `P^r`.
pub fn big_gw_projective(r: u32, degree: u32, codims: &[u32]) -> Result<BigInt> {
    let space = TargetSpace::projective(r)?;
    if codims.len() < 3 {
        return Err(Error::Unsupported(format!(
            "{}-point invariants (need at least 3 insertions)",
            codims.len()
        )));
    }
    projective_invariant(space, degree as i64, codims.to_vec(), 0)
}

/// Same as [`big_gw_projective`] for a space already known to be `P^r`.
pub(crate) fn projective_invariant(
    space: TargetSpace,
    degree: i64,
    mut a: Vec<u32>,
    depth: u32,
) -> Result<BigInt> {
    depth_guard(depth)?;
    if space.kind() != SpaceKind::ProjSpace {
        return Err(Error::Unsupported(format!(
            "n-point invariants with n >= 5 on {space}"
        )));
    }
    let r = space.dim();
    let n = a.len();
    if degree < 0 || a.iter().any(|&x| x > r) {
        return Ok(BigInt::zero());
    }
    let total: i64 = a.iter().map(|&x| x as i64).sum();
    if total != (r as i64 + 1) * degree + r as i64 + n as i64 - 3 {
        return Ok(BigInt::zero());
    }
    if n == 3 {
        let v = three_point(space, degree, [BasisClass::H(a[0]), BasisClass::H(a[1]), BasisClass::H(a[2])]);
        return to_integer(&v);
    }
    if n < 3 {
        return Err(Error::Unsupported(format!("{n}-point invariant")));
    }
    if a.contains(&0) || degree == 0 {
        return Ok(BigInt::zero());
    }
    a.sort_unstable();
    if a[0] == 1 {
        let rest = a[1..].to_vec();
        return Ok(BigInt::from(degree) * projective_invariant(space, degree, rest, depth + 1)?);
    }
    let key = (r, degree, a.clone());
    if let Some(v) = memo().projective.get(&key) {
        return Ok(v.clone());
    }

    // Replace a_p = a[0] by the pair (H, H_{a_p - 1}) and compare the two
    // boundary decompositions D(p,p'|k,l) = D(p,k|p',l) on M_{0,n+1}.
    let ap = a[0];
    let ak = a[n - 1];
    let al = a[1];
    let rest: Vec<u32> = a[2..n - 1].to_vec();
    let m = rest.len();
    let r64 = r as i64;

    let inv = |codims: Vec<u32>, d: i64| projective_invariant(space, d, codims, depth + 1);
    // node codimension on the side holding H, `fixed` and `part`:
    // 1 + fixed + sum(part) + e = (r+1)d + r + |part|
    let node = |fixed: u32, part: &[u32], d: i64| -> Option<u32> {
        let sum: i64 = fixed as i64 + part.iter().map(|&x| x as i64).sum::<i64>();
        let e = (r64 + 1) * d + r64 + part.len() as i64 - 1 - sum;
        (0..=r64).contains(&e).then_some(e as u32)
    };

    let mut lhs = BigInt::zero();
    let mut rhs = BigInt::zero();
    for mask in 0u32..(1 << m) {
        let (part_a, part_b): (Vec<u32>, Vec<u32>) = {
            let mut pa = Vec::new();
            let mut pb = Vec::new();
            for (i, &x) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    pa.push(x);
                } else {
                    pb.push(x);
                }
            }
            (pa, pb)
        };
        for d1 in 0..=degree {
            let d2 = degree - d1;
            // LHS: <H, H_{ap-1}, A, T_e>_{d1} <T^e, k, l, B>_{d2}
            if !(mask == 0 && d1 == 0) {
                if let Some(e) = node(ap - 1, &part_a, d1) {
                    let mut f1 = vec![1, ap - 1, e];
                    f1.extend(&part_a);
                    let v1 = inv(f1, d1)?;
                    if !v1.is_zero() {
                        let mut f2 = vec![r - e, ak, al];
                        f2.extend(&part_b);
                        lhs += v1 * inv(f2, d2)?;
                    }
                }
            }
            // RHS: <H, k, A, T_e>_{d1} <T^e, H_{ap-1}, l, B>_{d2}
            if let Some(e) = node(ak, &part_a, d1) {
                let mut g1 = vec![1, ak, e];
                g1.extend(&part_a);
                let v1 = inv(g1, d1)?;
                if !v1.is_zero() {
                    let mut g2 = vec![r - e, ap - 1, al];
                    g2.extend(&part_b);
                    rhs += v1 * inv(g2, d2)?;
                }
            }
        }
    }
    let value = rhs - lhs;
    memo().projective.insert(key, value.clone());
    Ok(value)
}

/// `<a_1, ..., a_k>_d`, the degree of the top-codimension class
/// `I^{k-3}_d(a_1..a_k)` on `M_{0,k}`, for `q`-extended insertions.
pub fn top_invariant(space: TargetSpace, degree: i64, insertions: &[QhElement]) -> Result<Rational> {
    match insertions.len() {
        3 => codim0_value(space, degree, insertions),
        4 => fourpoint_value(space, degree, insertions, Strategy::Auto),
        k if k > 4 => {
            if space.kind() != SpaceKind::ProjSpace {
                return Err(Error::Unsupported(format!(
                    "{k}-point invariants on {space}"
                )));
            }
            let mut total = Rational::zero();
            for (shift, classes, coeff) in expand(insertions) {
                let codims = classes.iter().map(|&c| space.codim(c)).collect();
                let v = projective_invariant(space, degree - shift as i64, codims, 0)?;
                if !v.is_zero() {
                    total += coeff * Rational::from_integer(v);
                }
            }
            Ok(total)
        }
        k => Err(Error::Unsupported(format!("{k}-point top invariant"))),
    }
}
