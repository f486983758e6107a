//! Named extremal rays of `Nef(M_{0,6})`, contraction predicates for odd
//! quadrics and exact decomposition of classes into rays.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cycle_classes::ClassVector;
use crate::error::{Error, Result};
use crate::gw_numbers::GwSpec;
use crate::moduli_comb::{all_fcurves, FCurve, MarkSet};
use crate::qh_ring::{BasisClass, Rational, SpaceKind};

/// Largest support tried by [`decompose_in_rays`].
pub const MAX_SUPPORT: usize = 7;

/// A named collection of rays on `M_{0,n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayTable {
    n: u32,
    rays: BTreeMap<String, ClassVector>,
}

#[derive(Serialize, Deserialize)]
struct RayTableRecord {
    n: u32,
    rays: BTreeMap<String, Vec<i64>>,
}

const BUILTIN_RAYS: &[(&str, [i64; 16])] = &[
    ("R1", [1, 0, 1, 1, 0, 1, 1, 0, 1, 0, 0, 0, 2, 0, 0, 0]),
    ("R3", [0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1]),
    ("R5", [1, 0, 1, 1, 0, 1, 1, 0, 1, 0, 0, 0, 2, 0, 0, 1]),
    ("R5'", [0, 1, 1, 1, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0, 1, 0]),
    ("R6", [0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0]),
    ("R6'", [0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0]),
    ("R6''", [0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 1]),
    ("R10", [1, 0, 1, 1, 0, 1, 1, 0, 1, 0, 0, 0, 3, 0, 0, 1]),
    ("R16", [1, 0, 1, 0, 1, 1, 1, 0, 2, 0, 1, 1, 2, 0, 0, 1]),
    ("R20", [0, 1, 0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1]),
];

impl RayTable {
    pub fn new(n: u32, rays: BTreeMap<String, ClassVector>) -> Result<RayTable> {
        for (name, v) in &rays {
            if v.n() != n {
                return Err(Error::Combinatorics(format!("ray {name} lives on M_0,{}", v.n())));
            }
            if !v.is_integral() || v.coeffs().iter().any(Signed::is_negative) || v.is_zero() {
                return Err(Error::Combinatorics(format!(
                    "ray {name} must be integral, nonnegative and nonzero"
                )));
            }
        }
        Ok(RayTable { n, rays })
    }

    /// The rays of `M_{0,6}` quoted in the worked examples, with the extra
    /// representatives `R5'`, `R6'` and `R6''` of the same symmetry orbits.
    pub fn builtin() -> RayTable {
        let rays = BUILTIN_RAYS
            .iter()
            .map(|(name, v)| {
                (name.to_string(), ClassVector::from_integers(6, v).expect("length 16"))
            })
            .collect();
        RayTable::new(6, rays).expect("builtin rays are valid")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rays(&self) -> &BTreeMap<String, ClassVector> {
        &self.rays
    }

    pub fn get(&self, name: &str) -> Option<&ClassVector> {
        self.rays.get(name)
    }

    /// The sub-table with the given names, in any order.
    pub fn subset(&self, names: &[&str]) -> Result<RayTable> {
        let mut rays = BTreeMap::new();
        for &name in names {
            let v = self
                .get(name)
                .ok_or_else(|| Error::Combinatorics(format!("no ray named {name}")))?;
            rays.insert(name.to_string(), v.clone());
        }
        RayTable::new(self.n, rays)
    }

    pub fn from_json(s: &str) -> Result<RayTable> {
        let rec: RayTableRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let rays = rec
            .rays
            .into_iter()
            .map(|(name, v)| Ok((name, ClassVector::from_integers(rec.n, &v)?)))
            .collect::<Result<BTreeMap<_, _>>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        RayTable::new(rec.n, rays).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let rays = self
            .rays
            .iter()
            .map(|(name, v)| {
                let ints = v
                    .coeffs()
                    .iter()
                    .map(|c| i64::try_from(c.to_integer()).expect("small ray entries"))
                    .collect();
                (name.clone(), ints)
            })
            .collect();
        serde_json::to_string(&RayTableRecord { n: self.n, rays }).expect("serializable")
    }
}

// ---------------------------------------------------------------------------
// Decomposition

/// Solve `sum_k x_k columns[k] = target` exactly when the columns are
/// linearly independent.
fn solve_independent(columns: &[&[Rational]], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let k = columns.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let p = (pivot_row..rows).find(|&i| !m[i][col].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != pivot_row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=k {
                    let delta = &f * &m[pivot_row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if m[k..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

/// Advance `idx` to the next increasing `idx.len()`-subset of `0..n`.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Nonnegative rational coefficients expressing `v` in the rays of `table`,
/// or `None` if there is no such expression with at most
/// [`MAX_SUPPORT`] rays. Smaller supports are preferred; unused rays get 0.
pub fn decompose_in_rays(
    v: &ClassVector,
    table: &RayTable,
) -> Result<Option<BTreeMap<String, Rational>>> {
    if v.n() != table.n() {
        return Err(Error::Combinatorics(format!(
            "class on M_0,{} against rays on M_0,{}",
            v.n(),
            table.n()
        )));
    }
    let mut result: BTreeMap<String, Rational> = table
        .rays()
        .keys()
        .map(|k| (k.clone(), Rational::zero()))
        .collect();
    if v.is_zero() {
        return Ok(Some(result));
    }
    if v.coeffs().iter().any(Signed::is_negative) {
        return Ok(None);
    }
    let support: Vec<bool> = v.coeffs().iter().map(|c| !c.is_zero()).collect();
    let candidates: Vec<(&String, &ClassVector)> = table
        .rays()
        .iter()
        .filter(|(_, r)| {
            r.coeffs()
                .iter()
                .zip(&support)
                .all(|(c, &s)| s || c.is_zero())
        })
        .collect();

    for size in 1..=MAX_SUPPORT.min(candidates.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let cols: Vec<&[Rational]> = idx.iter().map(|&i| candidates[i].1.coeffs()).collect();
            if let Some(x) = solve_independent(&cols, v.coeffs()) {
                if x.iter().all(|c| !c.is_negative()) {
                    for (&i, c) in idx.iter().zip(x) {
                        result.insert(candidates[i].0.clone(), c);
                    }
                    return Ok(Some(result));
                }
            }
            if !next_combination(&mut idx, candidates.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// F-curves on which the class has negative degree, by the Keel pairing.
pub fn negative_fcurves(v: &ClassVector) -> Result<Vec<(FCurve, Rational)>> {
    let mut out = Vec::new();
    for f in all_fcurves(v.n()) {
        let d = v.pair_fcurve(&f)?;
        if d.is_negative() {
            out.push((f, d));
        }
    }
    Ok(out)
}

/// `true` when the class pairs nonnegatively with every F-curve.
pub fn is_f_nef(v: &ClassVector) -> Result<bool> {
    Ok(negative_fcurves(v)?.is_empty())
}

/// F-curves on which the class has degree zero.
pub fn contracted_fcurves(v: &ClassVector) -> Result<Vec<FCurve>> {
    let mut out = Vec::new();
    for f in all_fcurves(v.n()) {
        if v.pair_fcurve(&f)?.is_zero() {
            out.push(f);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Contraction predicates

/// Which contraction criterion to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionRule {
    /// A part holding a marking with `a_i = r` together with markings whose
    /// codimensions add up to `r`.
    Contract1,
    /// `d` parts, each holding a pair of markings with `a + b > r`.
    Contract2,
}

fn h_codims(spec: &GwSpec) -> Result<Vec<u32>> {
    spec.insertions
        .iter()
        .map(|a| {
            let mut terms = a.terms();
            match (terms.next(), terms.next()) {
                (Some((0, BasisClass::H(i), _)), None) => Ok(i),
                _ => Err(Error::Unsupported(format!(
                    "contraction rules need single H classes, got `{a}`"
                ))),
            }
        })
        .collect()
}

fn part_contract1(part: MarkSet, a: &[u32], r: u32) -> bool {
    part.iter().any(|i| {
        a[i as usize - 1] == r && {
            let rest = part.minus(MarkSet::singleton(i));
            !rest.is_empty()
                && rest.iter().all(|j| (1..=r).contains(&a[j as usize - 1]))
                && rest.iter().map(|j| a[j as usize - 1]).sum::<u32>() == r
        }
    })
}

fn part_has_heavy_pair(part: MarkSet, a: &[u32], r: u32) -> bool {
    let m = part.to_vec();
    m.iter().enumerate().any(|(x, &i)| {
        m[x + 1..]
            .iter()
            .any(|&j| a[i as usize - 1] + a[j as usize - 1] > r)
    })
}

/// All F-curves of `M_{0,n}` that the rule predicts the class contracts.
pub fn contracted_fcurves_odd_quadric(spec: &GwSpec, rule: ContractionRule) -> Result<Vec<FCurve>> {
    if spec.space.kind() != SpaceKind::OddQuadric {
        return Err(Error::Unsupported(format!(
            "contraction rules are stated for odd quadrics, not {}",
            spec.space
        )));
    }
    if spec.codim != 1 {
        return Err(Error::Unsupported("contraction rules need a divisor".into()));
    }
    let n = spec.n() as u32;
    if n < 4 {
        return Err(Error::InsertionCount {
            expected: 4,
            got: spec.n(),
        });
    }
    let r = spec.space.dim();
    let a = h_codims(spec)?;
    let d = spec.degree as usize;
    if rule == ContractionRule::Contract2 && !(1..=4).contains(&d) {
        return Err(Error::Unsupported(format!(
            "the pair rule covers degrees 1 to 4, got {d}"
        )));
    }
    Ok(all_fcurves(n)
        .into_iter()
        .filter(|f| match rule {
            ContractionRule::Contract1 => f.parts().iter().any(|&p| part_contract1(p, &a, r)),
            ContractionRule::Contract2 => {
                f.parts()
                    .iter()
                    .filter(|&&p| part_has_heavy_pair(p, &a, r))
                    .count()
                    >= d
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qh_ring::{parse_element_list, TargetSpace};

    fn spec(space: &str, d: u32, ins: &str) -> GwSpec {
        let space: TargetSpace = space.parse().unwrap();
        GwSpec::with_inferred_codim(space, d, parse_element_list(space, ins).unwrap()).unwrap()
    }

    fn cv(v: &[i64]) -> ClassVector {
        ClassVector::from_integers(6, v).unwrap()
    }

    #[test]
    fn builtin_rays_are_f_nef() {
        let t = RayTable::builtin();
        assert_eq!(t.rays().len(), 10);
        for (name, v) in t.rays() {
            assert!(is_f_nef(v).unwrap(), "{name}");
        }
    }

    #[test]
    fn decomposes_sums_of_rays() {
        let t = RayTable::builtin();
        let v = cv(&[1, 1, 2, 1, 1, 2, 2, 1, 2, 1, 1, 1, 3, 0, 1, 1]);
        let sub = t.subset(&["R5'", "R16"]).unwrap();
        let got = decompose_in_rays(&v, &sub).unwrap().unwrap();
        assert_eq!(got["R5'"], Rational::from_integer(1.into()));
        assert_eq!(got["R16"], Rational::from_integer(1.into()));
        let only_r5 = t.subset(&["R5", "R16"]).unwrap();
        assert_eq!(decompose_in_rays(&v, &only_r5).unwrap(), None);
    }

    #[test]
    fn decomposition_reproduces_the_vector() {
        let t = RayTable::builtin();
        let v = cv(&[0, 1, 1, 0, 2, 0, 2, 0, 2, 1, 2, 1, 2, 0, 0, 2]);
        let got = decompose_in_rays(&v, &t).unwrap().unwrap();
        let mut sum = ClassVector::zero(6).unwrap();
        for (name, c) in &got {
            sum = sum.try_add(&t.get(name).unwrap().scale(c)).unwrap();
        }
        assert_eq!(sum, v);
    }

    #[test]
    fn zero_and_hopeless_vectors() {
        let t = RayTable::builtin();
        let zero = ClassVector::zero(6).unwrap();
        let got = decompose_in_rays(&zero, &t).unwrap().unwrap();
        assert!(got.values().all(Zero::is_zero));
        let mut e = vec![0; 16];
        e[0] = 1;
        assert_eq!(decompose_in_rays(&cv(&e), &t).unwrap(), None);
        let five = ClassVector::zero(5).unwrap();
        assert!(decompose_in_rays(&five, &t).is_err());
    }

    #[test]
    fn ray_table_json_round_trip() {
        let t = RayTable::builtin();
        let json = t.to_json();
        assert_eq!(RayTable::from_json(&json).unwrap(), t);
        assert!(RayTable::from_json(r#"{"n":6,"rays":{"bad":[0,0]}}"#).is_err());
        let neg = r#"{"n":5,"rays":{"x":[1,0,0,0,-1]}}"#;
        assert!(RayTable::from_json(neg).is_err());
    }

    #[test]
    fn contraction_rule_instances() {
        let s = spec("Q5", 4, "H1,H5,H5,H5,H5,H5");
        let c1 = contracted_fcurves_odd_quadric(&s, ContractionRule::Contract1).unwrap();
        let f: FCurve = "F{1|2|3,4|5,6}".parse().unwrap();
        assert!(c1.contains(&f));
        let g: FCurve = "F{1|2|3|4,5,6}".parse().unwrap();
        assert!(!c1.contains(&g));

        let s = spec("Q3", 1, "H2,H2,H1,H1,H1");
        let c2 = contracted_fcurves_odd_quadric(&s, ContractionRule::Contract2).unwrap();
        assert!(c2.contains(&"F{1,2|3|4|5}".parse().unwrap()));
        assert!(!c2.contains(&"F{1,3|2|4|5}".parse().unwrap()));

        let s = spec("Q5", 1, "H2,H2,H2,H2,H1,H2");
        for rule in [ContractionRule::Contract1, ContractionRule::Contract2] {
            assert!(contracted_fcurves_odd_quadric(&s, rule).unwrap().is_empty());
        }
        let p = spec("P3", 1, "H2,H2,H2,H1");
        assert!(contracted_fcurves_odd_quadric(&p, ContractionRule::Contract1).is_err());
    }
}
