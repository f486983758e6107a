//! Combinatorics of `M_{0,n}`: F-curves, boundary divisors, boundary strata
//! and the nonadjacent basis with its dual curves for `n = 5, 6`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest number of markings supported by [`MarkSet`].
pub const MAX_MARKINGS: u32 = 31;

/// A set of markings drawn from `{1..31}`, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkSet(u32);

impl MarkSet {
    pub const EMPTY: MarkSet = MarkSet(0);

    pub fn full(n: u32) -> MarkSet {
        assert!(n <= MAX_MARKINGS);
        MarkSet(((1u64 << (n + 1)) - 2) as u32)
    }

    pub fn singleton(i: u32) -> MarkSet {
        assert!((1..=MAX_MARKINGS).contains(&i), "marking {i} out of range");
        MarkSet(1 << i)
    }

    pub fn try_from_markings(items: &[u32]) -> Result<MarkSet> {
        let mut s = MarkSet::EMPTY;
        for &i in items {
            if !(1..=MAX_MARKINGS).contains(&i) {
                return Err(Error::Combinatorics(format!("marking {i} out of range")));
            }
            if s.contains(i) {
                return Err(Error::Combinatorics(format!("marking {i} repeated")));
            }
            s = s.with(i);
        }
        Ok(s)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: u32) -> bool {
        i <= MAX_MARKINGS && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: u32) -> MarkSet {
        MarkSet(self.0 | MarkSet::singleton(i).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: MarkSet) -> MarkSet {
        MarkSet(self.0 | o.0)
    }

    pub fn intersection(self, o: MarkSet) -> MarkSet {
        MarkSet(self.0 & o.0)
    }

    pub fn minus(self, o: MarkSet) -> MarkSet {
        MarkSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: MarkSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn complement(self, n: u32) -> MarkSet {
        MarkSet::full(n).minus(self)
    }

    pub fn first(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    pub fn last(self) -> Option<u32> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros())
    }

    /// Markings in increasing order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        (1..=MAX_MARKINGS).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Image under `i -> perm[i - 1]`.
    pub fn relabel(self, perm: &[u32]) -> MarkSet {
        self.iter()
            .fold(MarkSet::EMPTY, |s, i| s.with(perm[i as usize - 1]))
    }

    /// Compact label such as `135`; falls back to `{10,11}` style when any
    /// marking has two digits.
    pub fn label(self) -> String {
        if self.iter().all(|i| i < 10) {
            self.iter().map(|i| i.to_string()).collect()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromIterator<u32> for MarkSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        iter.into_iter().fold(MarkSet::EMPTY, MarkSet::with)
    }
}

fn parse_markings(s: &str) -> Result<MarkSet> {
    let items = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad marking `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    MarkSet::try_from_markings(&items).map_err(|e| Error::Parse(e.to_string()))
}

fn check_perm(perm: &[u32], n: u32) -> Result<()> {
    let image: MarkSet = perm.iter().copied().filter(|&i| i >= 1 && i <= n).collect();
    if perm.len() != n as usize || image != MarkSet::full(n) {
        return Err(Error::Combinatorics(format!(
            "{perm:?} is not a permutation of 1..{n}"
        )));
    }
    Ok(())
}

/// Number of connected components of `T` on the `n`-cycle `1-2-...-n-1`.
pub fn tcount(t: MarkSet, n: u32) -> usize {
    let t = t.intersection(MarkSet::full(n));
    if t.is_empty() {
        return 0;
    }
    if t == MarkSet::full(n) {
        return 1;
    }
    (1..=n)
        .filter(|&i| {
            let prev = if i == 1 { n } else { i - 1 };
            t.contains(i) && !t.contains(prev)
        })
        .count()
}

// ---------------------------------------------------------------------------
// F-curves

/// The F-curve `F_{N1,N2,N3,N4}`; equality ignores the order of the parts.
#[derive(Clone, Copy, Debug)]
pub struct FCurve {
    n: u32,
    parts: [MarkSet; 4],
}

impl FCurve {
    pub fn new(n: u32, parts: [MarkSet; 4]) -> Result<FCurve> {
        if !(4..=MAX_MARKINGS).contains(&n) {
            return Err(Error::Combinatorics(format!("F-curves need 4 <= n <= 31, got {n}")));
        }
        let mut seen = MarkSet::EMPTY;
        for p in parts {
            if p.is_empty() {
                return Err(Error::Combinatorics("empty part in F-curve".into()));
            }
            if !p.intersection(seen).is_empty() {
                return Err(Error::Combinatorics("F-curve parts overlap".into()));
            }
            seen = seen.union(p);
        }
        if seen != MarkSet::full(n) {
            return Err(Error::Combinatorics(format!(
                "F-curve parts cover {seen}, expected 1..{n}"
            )));
        }
        Ok(FCurve { n, parts })
    }

    /// Build from lists of markings; `n` is the largest marking.
    pub fn from_parts(parts: [&[u32]; 4]) -> Result<FCurve> {
        let sets = [
            MarkSet::try_from_markings(parts[0])?,
            MarkSet::try_from_markings(parts[1])?,
            MarkSet::try_from_markings(parts[2])?,
            MarkSet::try_from_markings(parts[3])?,
        ];
        let n = sets.iter().filter_map(|s| s.last()).max().unwrap_or(0);
        FCurve::new(n, sets)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn parts(&self) -> [MarkSet; 4] {
        self.parts
    }

    fn sorted_parts(&self) -> [MarkSet; 4] {
        let mut p = self.parts;
        p.sort();
        p
    }

    pub fn relabel(&self, perm: &[u32]) -> Result<FCurve> {
        check_perm(perm, self.n)?;
        FCurve::new(self.n, self.parts.map(|p| p.relabel(perm)))
    }
}

impl PartialEq for FCurve {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.sorted_parts() == other.sorted_parts()
    }
}

impl Eq for FCurve {}

impl Hash for FCurve {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.sorted_parts().hash(state);
    }
}

impl fmt::Display for FCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "F{{{}}}", parts.join("|"))
    }
}

impl FromStr for FCurve {
    type Err = Error;

    /// Parses `F{1|2|3|4,5,6}`.
    fn from_str(s: &str) -> Result<FCurve> {
        let body = s
            .trim()
            .strip_prefix('F')
            .and_then(|b| b.strip_prefix('{'))
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected F{{a|b|c|d}}, got `{s}`")))?;
        let parts = body
            .split('|')
            .map(parse_markings)
            .collect::<Result<Vec<_>>>()?;
        let parts: [MarkSet; 4] = parts
            .try_into()
            .map_err(|_| Error::Parse(format!("F-curve `{s}` needs four parts")))?;
        let n = parts.iter().filter_map(|p| p.last()).max().unwrap_or(0);
        FCurve::new(n, parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// All F-curves of `M_{0,n}` (unordered partitions into four parts).
pub fn all_fcurves(n: u32) -> Vec<FCurve> {
    assert!((4..=12).contains(&n), "all_fcurves supports 4 <= n <= 12");
    // restricted growth strings with exactly four blocks
    let mut out = Vec::new();
    let mut labels = vec![0usize; n as usize];
    fn go(i: usize, used: usize, labels: &mut Vec<usize>, n: u32, out: &mut Vec<FCurve>) {
        if i == labels.len() {
            if used == 4 {
                let mut parts = [MarkSet::EMPTY; 4];
                for (k, &b) in labels.iter().enumerate() {
                    parts[b] = parts[b].with(k as u32 + 1);
                }
                out.push(FCurve::new(n, parts).expect("valid partition"));
            }
            return;
        }
        for b in 0..(used + 1).min(4) {
            labels[i] = b;
            go(i + 1, used.max(b + 1), labels, n, out);
        }
    }
    go(0, 0, &mut labels, n, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Boundary divisors

/// The boundary divisor `delta_T = delta_{T^c}`.
///
/// The stored side is the smaller one, or the one containing marking 1 when
/// both have the same size, which matches the labels `d13`, `d46`, `d124`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryDivisor {
    n: u32,
    t: MarkSet,
}

impl BoundaryDivisor {
    pub fn new(n: u32, t: MarkSet) -> Result<BoundaryDivisor> {
        if !(4..=MAX_MARKINGS).contains(&n) {
            return Err(Error::Combinatorics(format!("boundary divisors need 4 <= n <= 31, got {n}")));
        }
        if !t.is_subset(MarkSet::full(n)) {
            return Err(Error::Combinatorics(format!("{t} is not a subset of 1..{n}")));
        }
        if t.len() < 2 || t.len() + 2 > n as usize {
            return Err(Error::Combinatorics(format!(
                "delta_T needs 2 <= |T| <= n-2, got T = {t} with n = {n}"
            )));
        }
        let c = t.complement(n);
        let t = match t.len().cmp(&c.len()) {
            std::cmp::Ordering::Less => t,
            std::cmp::Ordering::Greater => c,
            std::cmp::Ordering::Equal => {
                if t.contains(1) {
                    t
                } else {
                    c
                }
            }
        };
        Ok(BoundaryDivisor { n, t })
    }

    pub fn from_markings(n: u32, t: &[u32]) -> Result<BoundaryDivisor> {
        BoundaryDivisor::new(n, MarkSet::try_from_markings(t)?)
    }

    /// Parses `d{1,3,5}`.
    pub fn parse(s: &str, n: u32) -> Result<BoundaryDivisor> {
        let body = s
            .trim()
            .strip_prefix('d')
            .and_then(|b| b.strip_prefix('{'))
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected d{{a,b,..}}, got `{s}`")))?;
        BoundaryDivisor::new(n, parse_markings(body)?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> MarkSet {
        self.t
    }

    pub fn other_side(&self) -> MarkSet {
        self.t.complement(self.n)
    }

    /// Short label such as `d135`.
    pub fn label(&self) -> String {
        format!("d{}", self.t.label())
    }

    pub fn relabel(&self, perm: &[u32]) -> Result<BoundaryDivisor> {
        check_perm(perm, self.n)?;
        BoundaryDivisor::new(self.n, self.t.relabel(perm))
    }
}

impl fmt::Display for BoundaryDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.t)
    }
}

/// Intersection number `F . delta_T`.
pub fn fcurve_delta_pairing(f: &FCurve, d: &BoundaryDivisor) -> Result<i64> {
    if f.n() != d.n() {
        return Err(Error::Combinatorics(format!(
            "F-curve on {} markings against a divisor on {}",
            f.n(),
            d.n()
        )));
    }
    let t = d.side();
    let p = f.parts();
    for (i, j) in [(0, 1), (0, 2), (0, 3)] {
        let u = p[i].union(p[j]);
        if t == u || t == u.complement(f.n()) {
            return Ok(1);
        }
    }
    if p.iter().any(|&part| part == t || part == d.other_side()) {
        return Ok(-1);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// Nonadjacent basis

/// Ordered basis of `Pic(M_{0,n})` with a dual combination of F-curves for
/// every basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCurveSystem {
    pub n: u32,
    pub basis: Vec<BoundaryDivisor>,
    pub duals: Vec<Vec<(i64, FCurve)>>,
}

impl DualCurveSystem {
    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(BoundaryDivisor::label).collect()
    }

    pub fn index_of(&self, d: &BoundaryDivisor) -> Option<usize> {
        self.basis.iter().position(|b| b == d)
    }

    /// Matrix of `dual_i . basis_j`.
    pub fn pairing_matrix(&self) -> Vec<Vec<i64>> {
        self.duals
            .iter()
            .map(|combo| {
                self.basis
                    .iter()
                    .map(|b| {
                        combo
                            .iter()
                            .map(|(s, f)| s * fcurve_delta_pairing(f, b).expect("same n"))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

fn digits(s: &str) -> Vec<u32> {
    s.chars().map(|c| c.to_digit(10).expect("digit")).collect()
}

fn fc(n: u32, spec: &str) -> FCurve {
    let parts: Vec<MarkSet> = spec
        .split(',')
        .map(|p| MarkSet::try_from_markings(&digits(p)).expect("valid"))
        .collect();
    FCurve::new(n, [parts[0], parts[1], parts[2], parts[3]]).expect("valid F-curve")
}

/// The nonadjacent basis `{delta_T : t(T) >= 2}` and its dual F-curves.
pub fn nonadjacent_basis(n: u32) -> Result<DualCurveSystem> {
    let (basis, duals): (&[&str], Vec<Vec<(i64, &str)>>) = match n {
        5 => (
            &["13", "14", "24", "25", "35"],
            ["1,2,3,45", "1,4,5,23", "2,3,4,15", "1,2,5,34", "3,4,5,12"]
                .iter()
                .map(|s| vec![(1, *s)])
                .collect(),
        ),
        6 => {
            let mut duals: Vec<Vec<(i64, &str)>> = [
                "1,2,3,456", "1,4,23,56", "1,5,6,234", "2,3,4,156", "2,5,16,34", "1,2,6,345",
                "3,4,5,126", "3,6,12,45", "4,5,6,123", "3,4,12,56", "5,6,12,34", "1,2,34,56",
            ]
            .iter()
            .map(|s| vec![(1, *s)])
            .collect();
            duals.push(vec![
                (1, "5,6,13,24"),
                (1, "1,2,3,456"),
                (1, "2,3,4,156"),
                (-1, "2,3,16,45"),
            ]);
            for s in ["2,3,16,45", "1,6,23,45", "4,5,16,23"] {
                duals.push(vec![(1, s)]);
            }
            (
                &[
                    "13", "14", "15", "24", "25", "26", "35", "36", "46", "124", "125", "134",
                    "135", "136", "145", "146",
                ],
                duals,
            )
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "nonadjacent basis data for n = {n} (only 5 and 6)"
            )))
        }
    };
    let basis = basis
        .iter()
        .map(|t| BoundaryDivisor::from_markings(n, &digits(t)))
        .collect::<Result<Vec<_>>>()?;
    let duals = duals
        .into_iter()
        .map(|combo| combo.into_iter().map(|(s, f)| (s, fc(n, f))).collect())
        .collect();
    Ok(DualCurveSystem { n, basis, duals })
}

// ---------------------------------------------------------------------------
// Boundary strata

/// A boundary stratum of `M_{0,n}` given by its dual tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StratumTree {
    n: u32,
    vertices: Vec<MarkSet>,
    edges: Vec<(usize, usize)>,
}

impl StratumTree {
    pub fn new(n: u32, vertices: Vec<MarkSet>, edges: Vec<(usize, usize)>) -> Result<StratumTree> {
        let tree = StratumTree { n, vertices, edges };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Combinatorics(m));
        let mut seen = MarkSet::EMPTY;
        for v in &self.vertices {
            if !v.intersection(seen).is_empty() {
                return bad(format!("marking repeated in {self}"));
            }
            seen = seen.union(*v);
        }
        if seen != MarkSet::full(self.n) {
            return bad(format!("markings of {self} do not cover 1..{}", self.n));
        }
        let k = self.vertices.len();
        if k == 0 || self.edges.len() + 1 != k {
            return bad(format!("{self} is not a tree"));
        }
        // connectivity by union-find
        let mut root: Vec<usize> = (0..k).collect();
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            if a >= k || b >= k || a == b {
                return bad(format!("bad edge ({a},{b})"));
            }
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            if ra == rb {
                return bad(format!("{self} has a cycle"));
            }
            root[ra] = rb;
        }
        if let Some(v) = (0..k).find(|&v| self.valence(v) < 3) {
            return bad(format!("vertex {v} of {self} is unstable"));
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[MarkSet] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of the edges at vertex `v`.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 == v || self.edges[e].1 == v)
            .collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].len() + self.incident_edges(v).len()
    }

    pub fn dimension(&self) -> usize {
        (0..self.vertices.len()).map(|v| self.valence(v) - 3).sum()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.valence(v) >= 3)
    }

    /// Vertex valences, largest first.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..self.vertices.len()).map(|v| self.valence(v)).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

impl fmt::Display for StratumTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "[{} | {}]", vs.join(" "), es.join(" "))
    }
}

/// How a leg with at least three markings is degenerated into a chain.
///
/// `order[0]` sits next to the spine, each later marking one step further
/// out, and the last two share the final vertex.
pub type LegOrder = Vec<u32>;

/// The canonical chain order of every leg with at least three markings,
/// in the order of the F-curve's parts.
pub fn canonical_leg_orders(f: &FCurve) -> Vec<LegOrder> {
    f.parts()
        .iter()
        .filter(|p| p.len() >= 3)
        .map(|p| p.to_vec())
        .collect()
}

/// Every choice of chain order for the legs with at least three markings,
/// up to swapping the last two markings.
pub fn all_leg_orders(f: &FCurve) -> Vec<Vec<LegOrder>> {
    fn perms(items: &[u32]) -> Vec<Vec<u32>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let mut combos: Vec<Vec<LegOrder>> = vec![Vec::new()];
    for p in f.parts().iter().filter(|p| p.len() >= 3) {
        let orders: Vec<LegOrder> = perms(&p.to_vec())
            .into_iter()
            .filter(|o| o[o.len() - 2] < o[o.len() - 1])
            .collect();
        combos = combos
            .into_iter()
            .flat_map(|c| {
                orders.iter().map(move |o| {
                    let mut c = c.clone();
                    c.push(o.clone());
                    c
                })
            })
            .collect();
    }
    combos
}

/// Components of `pi^*(F)` under the map forgetting marking `F.n() + 1`.
pub fn pullback_fcurve(f: &FCurve) -> Result<Vec<StratumTree>> {
    pullback_fcurve_with(f, &canonical_leg_orders(f))
}

/// As [`pullback_fcurve`], with explicit chain orders for long legs.
pub fn pullback_fcurve_with(f: &FCurve, leg_orders: &[LegOrder]) -> Result<Vec<StratumTree>> {
    let n = f.n() + 1;
    if n > MAX_MARKINGS {
        return Err(Error::Combinatorics("too many markings".into()));
    }
    let long: Vec<MarkSet> = f.parts().into_iter().filter(|p| p.len() >= 3).collect();
    if long.len() != leg_orders.len() {
        return Err(Error::Combinatorics(format!(
            "{} leg orders given for {} long legs",
            leg_orders.len(),
            long.len()
        )));
    }
    let mut vertices = vec![MarkSet::EMPTY];
    let mut edges = Vec::new();
    let mut long_idx = 0;
    for part in f.parts() {
        match part.len() {
            1 => vertices[0] = vertices[0].union(part),
            2 => {
                vertices.push(part);
                edges.push((0, vertices.len() - 1));
            }
            _ => {
                let order = &leg_orders[long_idx];
                long_idx += 1;
                if MarkSet::try_from_markings(order)? != part {
                    return Err(Error::Combinatorics(format!(
                        "leg order {order:?} does not match part {part}"
                    )));
                }
                let mut prev = 0;
                let k = order.len();
                for (i, &m) in order.iter().enumerate().take(k - 1) {
                    let mut v = MarkSet::singleton(m);
                    if i == k - 2 {
                        v = v.with(order[k - 1]);
                    }
                    vertices.push(v);
                    edges.push((prev, vertices.len() - 1));
                    prev = vertices.len() - 1;
                }
            }
        }
    }
    let base = StratumTree::new(f.n(), vertices, edges)?;
    if base.dimension() != 1 {
        return Err(Error::Internal(format!("F-curve tree {base} is not one-dimensional")));
    }
    (0..base.vertices.len())
        .map(|v| {
            let mut vertices = base.vertices.clone();
            vertices[v] = vertices[v].with(n);
            StratumTree::new(n, vertices, base.edges.clone())
        })
        .collect()
}
