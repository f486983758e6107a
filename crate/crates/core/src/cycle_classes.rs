//! Intersections of Gromov-Witten classes with F-curves and boundary strata,
//! divisor classes in the nonadjacent basis, and pushforwards along the map
//! forgetting the last marking.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gw_numbers::{codim0_value, fourpoint_value, to_integer, top_invariant, GwSpec, Strategy};
use crate::moduli_comb::{
    canonical_leg_orders, fcurve_delta_pairing, nonadjacent_basis, pullback_fcurve_with, FCurve,
    LegOrder, MarkSet, StratumTree,
};
use crate::qh_ring::{diagonal, star_product_all, QhElement, Rational};

/// A divisor class on `M_{0,n}` in the nonadjacent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVector {
    n: u32,
    coeffs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct ClassVectorRecord {
    n: u32,
    basis: Vec<String>,
    coeffs: Vec<String>,
}

impl ClassVector {
    pub fn new(n: u32, coeffs: Vec<Rational>) -> Result<ClassVector> {
        let size = nonadjacent_basis(n)?.basis.len();
        if coeffs.len() != size {
            return Err(Error::Combinatorics(format!(
                "class vector on M_0,{n} needs {size} entries, got {}",
                coeffs.len()
            )));
        }
        Ok(ClassVector { n, coeffs })
    }

    pub fn from_integers(n: u32, coeffs: &[i64]) -> Result<ClassVector> {
        ClassVector::new(n, coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero(n: u32) -> Result<ClassVector> {
        let size = nonadjacent_basis(n)?.basis.len();
        ClassVector::new(n, vec![Rational::zero(); size])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, k: &Rational) -> ClassVector {
        ClassVector {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn try_add(&self, other: &ClassVector) -> Result<ClassVector> {
        if self.n != other.n {
            return Err(Error::Combinatorics(format!(
                "adding classes on M_0,{} and M_0,{}",
                self.n, other.n
            )));
        }
        Ok(ClassVector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// Labels of the basis elements, e.g. `d13`.
    pub fn basis_labels(&self) -> Vec<String> {
        nonadjacent_basis(self.n).expect("validated n").labels()
    }

    /// Degree of the class on an F-curve, via the Keel pairing with the basis.
    pub fn pair_fcurve(&self, f: &FCurve) -> Result<Rational> {
        let sys = nonadjacent_basis(self.n)?;
        let mut total = Rational::zero();
        for (c, b) in self.coeffs.iter().zip(&sys.basis) {
            let p = fcurve_delta_pairing(f, b)?;
            if p != 0 {
                total += c * Rational::from_integer(p.into());
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("serializable")
    }

    fn record(&self) -> ClassVectorRecord {
        ClassVectorRecord {
            n: self.n,
            basis: self.basis_labels(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<ClassVector> {
        let rec: ClassVectorRecord =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let sys = nonadjacent_basis(rec.n).map_err(|e| Error::Parse(e.to_string()))?;
        if rec.basis != sys.labels() {
            return Err(Error::Parse(format!(
                "basis labels do not match the nonadjacent basis of M_0,{}",
                rec.n
            )));
        }
        let coeffs = rec
            .coeffs
            .iter()
            .map(|c| {
                c.parse::<Rational>()
                    .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        ClassVector::new(rec.n, coeffs).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One `label,coefficient` row per basis element, after a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis,coeff\n");
        for (l, c) in self.basis_labels().iter().zip(&self.coeffs) {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", items.join(","))
    }
}

// ---------------------------------------------------------------------------
// F-curves

fn check_markings(spec: &GwSpec, n: u32) -> Result<()> {
    if spec.n() != n as usize {
        return Err(Error::InsertionCount {
            expected: n as usize,
            got: spec.n(),
        });
    }
    Ok(())
}

fn insertions_of(spec: &GwSpec, part: MarkSet) -> Vec<QhElement> {
    part.iter()
        .map(|i| spec.insertions[i as usize - 1].clone())
        .collect()
}

/// One way to fill a spine slot: the class at the node, the degree carried
/// by the leg and the leg's weight.
struct SlotTerm {
    class: QhElement,
    degree: i64,
    weight: Rational,
}

/// Every nonzero leg contribution for the part `part`.
fn leg_terms(spec: &GwSpec, part: MarkSet) -> Result<Vec<SlotTerm>> {
    let space = spec.space;
    let ins = insertions_of(spec, part);
    if ins.len() == 1 {
        return Ok(vec![SlotTerm {
            class: ins[0].clone(),
            degree: 0,
            weight: Rational::one(),
        }]);
    }
    let fano = space.fano_degree() as i64;
    let leg_degree: i64 = ins.iter().map(|a| a.degree().unwrap_or(0) as i64).sum();
    let mut out = Vec::new();
    for (spine, leg, coeff) in diagonal(space).terms {
        // leg cycle condition: sum |a| + |leg| = fano * d_j + r
        let excess = leg_degree + space.codim(leg) as i64 - space.dim() as i64;
        if excess < 0 || excess % fano != 0 {
            continue;
        }
        let dj = excess / fano;
        if dj > spec.degree as i64 {
            continue;
        }
        let mut with_leg = ins.clone();
        with_leg.push(QhElement::from_basis(space, leg)?);
        let v = codim0_value(space, dj, &with_leg)?;
        if !v.is_zero() {
            out.push(SlotTerm {
                class: QhElement::from_basis(space, spine)?,
                degree: dj,
                weight: coeff * v,
            });
        }
    }
    Ok(out)
}

/// Degree of `I^1_d(a_1..a_n)` on the F-curve `F`, summing over node labels
/// and degree splittings between the spine and the four legs.
pub fn fcurve_degree(spec: &GwSpec, f: &FCurve) -> Result<BigInt> {
    check_markings(spec, f.n())?;
    if spec.codim != 1 || !spec.satisfies_cycle_condition() {
        return Ok(BigInt::zero());
    }
    let slots = f
        .parts()
        .iter()
        .map(|&p| leg_terms(spec, p))
        .collect::<Result<Vec<_>>>()?;
    let d = spec.degree as i64;
    let mut total = Rational::zero();
    for a in &slots[0] {
        for b in &slots[1] {
            for c in &slots[2] {
                for e in &slots[3] {
                    let spine_degree = d - a.degree - b.degree - c.degree - e.degree;
                    if spine_degree <= 0 {
                        continue;
                    }
                    let ins = [a.class.clone(), b.class.clone(), c.class.clone(), e.class.clone()];
                    let v = fourpoint_value(spec.space, spine_degree, &ins, Strategy::Auto)?;
                    if !v.is_zero() {
                        total += &a.weight * &b.weight * &c.weight * &e.weight * v;
                    }
                }
            }
        }
    }
    to_integer(&total)
}

/// The same degree computed as `I^1_d(P_1, .., P_4)`, where `P_j` is the
/// quantum product of the insertions on the `j`-th part.
pub fn fcurve_degree_by_products(spec: &GwSpec, f: &FCurve) -> Result<BigInt> {
    check_markings(spec, f.n())?;
    if spec.codim != 1 || !spec.satisfies_cycle_condition() {
        return Ok(BigInt::zero());
    }
    let products = f
        .parts()
        .iter()
        .map(|&p| star_product_all(&insertions_of(spec, p)))
        .collect::<Result<Vec<_>>>()?;
    to_integer(&fourpoint_value(
        spec.space,
        spec.degree as i64,
        &products,
        Strategy::Auto,
    )?)
}

/// Class of `I^1_d(a_1..a_n)` in the nonadjacent basis, `n = 5, 6`.
pub fn divisor_class(spec: &GwSpec) -> Result<ClassVector> {
    let n = spec.n() as u32;
    let sys = nonadjacent_basis(n)?;
    let coeffs = sys
        .duals
        .par_iter()
        .map(|combo| {
            let mut c = BigInt::zero();
            for (sign, f) in combo {
                c += BigInt::from(*sign) * fcurve_degree(spec, f)?;
            }
            Ok(Rational::from_integer(c))
        })
        .collect::<Result<Vec<_>>>()?;
    ClassVector::new(n, coeffs)
}

// ---------------------------------------------------------------------------
// Boundary strata

/// Pairing of `I^c_d(a_1..a_n)` with a stratum of dimension `c`: a sum over
/// node labels of the product of the vertices' top invariants, with each
/// vertex degree fixed by its cycle condition.
pub fn stratum_degree(spec: &GwSpec, s: &StratumTree) -> Result<Rational> {
    check_markings(spec, s.n())?;
    if s.dimension() != spec.codim as usize {
        return Err(Error::Combinatorics(format!(
            "stratum {s} has dimension {}, class has codimension {}",
            s.dimension(),
            spec.codim
        )));
    }
    if !spec.satisfies_cycle_condition() {
        return Ok(Rational::zero());
    }
    let space = spec.space;
    let diag = diagonal(space).terms;
    let edges = s.edges();
    let nv = s.vertices().len();
    let base: Vec<Vec<QhElement>> = s.vertices().iter().map(|&v| insertions_of(spec, v)).collect();
    let base_degree: Vec<i64> = base
        .iter()
        .map(|ins| ins.iter().map(|a| a.degree().unwrap_or(0) as i64).sum())
        .collect();

    let mut total = Rational::zero();
    let mut choice = vec![0usize; edges.len()];
    loop {
        // labels on this choice
        let mut degrees = base_degree.clone();
        let mut weight = Rational::one();
        for (e, &k) in choice.iter().enumerate() {
            let (a, b, coeff) = &diag[k];
            degrees[edges[e].0] += space.codim(*a) as i64;
            degrees[edges[e].1] += space.codim(*b) as i64;
            weight *= coeff;
        }
        let vertex_degrees: Option<Vec<i64>> = (0..nv)
            .map(|v| {
                let cv = s.valence(v) as i64 - 3;
                let excess = degrees[v] - cv - space.dim() as i64;
                let fano = space.fano_degree() as i64;
                (excess >= 0 && excess % fano == 0).then_some(excess / fano)
            })
            .collect();
        if let Some(dv) = vertex_degrees {
            if dv.iter().sum::<i64>() == spec.degree as i64 {
                let mut term = weight;
                for v in 0..nv {
                    let mut ins = base[v].clone();
                    for (e, &k) in choice.iter().enumerate() {
                        let (a, b, _) = &diag[k];
                        if edges[e].0 == v {
                            ins.push(QhElement::from_basis(space, *a)?);
                        }
                        if edges[e].1 == v {
                            ins.push(QhElement::from_basis(space, *b)?);
                        }
                    }
                    let value = top_invariant(space, dv[v], &ins)?;
                    if value.is_zero() {
                        term = Rational::zero();
                        break;
                    }
                    term *= value;
                }
                total += term;
            }
        }
        // next labelling
        let mut e = 0;
        loop {
            if e == choice.len() {
                return Ok(total);
            }
            choice[e] += 1;
            if choice[e] < diag.len() {
                break;
            }
            choice[e] = 0;
            e += 1;
        }
    }
}

/// `Z . pi^*(F)` for the map forgetting the last marking, with the
/// canonical degeneration of long legs.
pub fn pullback_pairing(spec: &GwSpec, f: &FCurve) -> Result<Rational> {
    pullback_pairing_with(spec, f, &canonical_leg_orders(f))
}

/// `Z . pi^*(F)` with explicit chain orders for the long legs of `F`.
pub fn pullback_pairing_with(spec: &GwSpec, f: &FCurve, orders: &[LegOrder]) -> Result<Rational> {
    let mut total = Rational::zero();
    for tree in pullback_fcurve_with(f, orders)? {
        total += stratum_degree(spec, &tree)?;
    }
    Ok(total)
}

/// `pi_*` of the codimension-2 class `I^2_d(a_1..a_n)` along the map
/// forgetting marking `n`, for `n = 6, 7`.
pub fn pushforward_divisor(spec: &GwSpec) -> Result<ClassVector> {
    let n = spec.n() as u32;
    if !(6..=7).contains(&n) {
        return Err(Error::Unsupported(format!(
            "pushforward from M_0,{n} (only 6 and 7 markings)"
        )));
    }
    if spec.codim != 2 {
        return Err(Error::Unsupported(format!(
            "pushforward of a codimension-{} class",
            spec.codim
        )));
    }
    let sys = nonadjacent_basis(n - 1)?;
    let coeffs = sys
        .duals
        .par_iter()
        .map(|combo| {
            let mut c = Rational::zero();
            for (sign, f) in combo {
                c += Rational::from_integer((*sign).into()) * pullback_pairing(spec, f)?;
            }
            to_integer(&c).map(Rational::from_integer)
        })
        .collect::<Result<Vec<_>>>()?;
    ClassVector::new(n - 1, coeffs)
}

/// Spec on the first `n - 1` markings, dropping the last insertion and
/// recomputing the codimension.
pub fn truncated_spec(spec: &GwSpec) -> Result<GwSpec> {
    let mut ins = spec.insertions.clone();
    ins.pop();
    GwSpec::with_inferred_codim(spec.space, spec.degree, ins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qh_ring::{parse_element_list, TargetSpace};

    fn spec(space: &str, d: u32, ins: &str) -> GwSpec {
        let space: TargetSpace = space.parse().unwrap();
        GwSpec::with_inferred_codim(space, d, parse_element_list(space, ins).unwrap()).unwrap()
    }

    fn f(s: &str) -> FCurve {
        s.parse().unwrap()
    }

    #[test]
    fn fcurve_degrees_of_the_level_one_quadric_class() {
        // F{1|2|3|4,5,6} gives 4 I_2(H1, Hr, Hr, Hr) = 4 * 2 * <Hr, Hr, Hr>_2 = 64
        for r in [3, 5, 7] {
            let s = spec(&format!("Q{r}"), 4, &format!("H1,H{r},H{r},H{r},H{r},H{r}"));
            assert_eq!(fcurve_degree(&s, &f("F{1|2|3|4,5,6}")).unwrap(), BigInt::from(64));
            assert_eq!(fcurve_degree(&s, &f("F{1|4|2,3|5,6}")).unwrap(), BigInt::zero());
        }
    }

    #[test]
    fn even_quadric_fcurve_degree() {
        let s = spec("Q6", 2, "H1,H6,Xi1,Xi1,Xi1,Xi1");
        assert_eq!(fcurve_degree(&s, &f("F{3|4|5|1,2,6}")).unwrap(), BigInt::from(4));
    }

    #[test]
    fn both_routes_agree() {
        let s = spec("Q5", 4, "H2,H4,H5,H5,H5,H5");
        for curve in crate::moduli_comb::all_fcurves(6) {
            assert_eq!(
                fcurve_degree(&s, &curve).unwrap(),
                fcurve_degree_by_products(&s, &curve).unwrap(),
                "{curve}"
            );
        }
    }

    #[test]
    fn mismatched_marking_count() {
        let s = spec("Q3", 2, "H3,H3,H2,H2");
        assert!(matches!(
            fcurve_degree(&s, &f("F{1|2|3|4,5}")),
            Err(Error::InsertionCount { .. })
        ));
    }

    #[test]
    fn class_vector_json_and_csv() {
        let v = ClassVector::from_integers(5, &[1, 0, 2, 0, 3]).unwrap();
        let json = v.to_json();
        assert_eq!(
            json,
            r#"{"n":5,"basis":["d13","d14","d24","d25","d35"],"coeffs":["1","0","2","0","3"]}"#
        );
        assert_eq!(ClassVector::from_json(&json).unwrap(), v);
        assert!(v.to_csv().starts_with("basis,coeff\nd13,1\n"));
        assert!(ClassVector::from_integers(5, &[1, 2]).is_err());
        assert!(ClassVector::from_json(r#"{"n":5,"basis":[],"coeffs":[]}"#).is_err());
    }

    #[test]
    fn keel_pairing_recovers_dual_coefficients() {
        let v = ClassVector::from_integers(5, &[4, 0, 1, 7, 2]).unwrap();
        let sys = nonadjacent_basis(5).unwrap();
        for (k, combo) in sys.duals.iter().enumerate() {
            let mut total = Rational::zero();
            for (sign, curve) in combo {
                total += Rational::from_integer((*sign).into()) * v.pair_fcurve(curve).unwrap();
            }
            assert_eq!(total, v.coeffs()[k].clone());
        }
    }

    #[test]
    fn stratum_dimension_must_match() {
        let s = spec("P3", 2, "H1,H2,H2,H2,H2,H2,H2");
        let trees = crate::moduli_comb::pullback_fcurve(&f("F{1|2|3|4,5,6}")).unwrap();
        assert!(stratum_degree(&s, &trees[0]).is_ok());
        let s1 = spec("P3", 2, "H2,H2,H2,H2,H2,H2,H2");
        assert!(stratum_degree(&s1, &trees[0]).is_err());
    }
}
