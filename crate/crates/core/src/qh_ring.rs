//! Cohomology bases, Poincaré pairing, the class of the diagonal and the
//! small quantum product for projective spaces and smooth quadrics.
//!
//! Every supported target has second Betti number one, so a single quantum
//! parameter `q` suffices. Its degree is the Fano index of the target:
//! `r + 1` for `P^r` and `r` for a quadric `Q_r`.
//!
//! Bases:
//!
//! * `P^r`, odd `Q_r`: `H0, H1, ..., Hr` where `Hi` is the `i`-th power of the
//!   hyperplane class.
//! * even `Q_{2m}`: `H0, ..., H(m-1), Xi1, Xi2, H(m+1), ..., Hr`. The middle
//!   power `Hm` is not a basis element; it is rewritten as `Xi1 + Xi2`.
//!
//! Derived classes `Li` (the class of an `i`-dimensional linear subspace on a
//! quadric) are accepted as input and rewritten as `1/2 * H(r-i)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn half() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    ProjSpace,
    OddQuadric,
    EvenQuadric,
}

/// A target variety `X` together with its dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetSpace {
    kind: SpaceKind,
    r: u32,
}

impl TargetSpace {
    pub fn new(kind: SpaceKind, r: u32) -> Result<Self> {
        let ok = match kind {
            SpaceKind::ProjSpace => r >= 1,
            SpaceKind::OddQuadric => r % 2 == 1,
            SpaceKind::EvenQuadric => r % 2 == 0 && r >= 4,
        };
        if ok && r <= 64 {
            Ok(TargetSpace { kind, r })
        } else {
            Err(Error::InvalidSpace(format!("{kind:?} of dimension {r}")))
        }
    }

    pub fn projective(r: u32) -> Result<Self> {
        Self::new(SpaceKind::ProjSpace, r)
    }

    /// The smooth quadric of dimension `r`; parity picks the kind.
    pub fn quadric(r: u32) -> Result<Self> {
        if r % 2 == 1 {
            Self::new(SpaceKind::OddQuadric, r)
        } else {
            Self::new(SpaceKind::EvenQuadric, r)
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> u32 {
        self.r
    }

    /// `m` with `r = 2m + 1` or `r = 2m`.
    pub fn half_dim(&self) -> u32 {
        self.r / 2
    }

    pub fn is_quadric(&self) -> bool {
        self.kind != SpaceKind::ProjSpace
    }

    /// `c_1(T_X)` evaluated on the line class.
    pub fn fano_degree(&self) -> u32 {
        match self.kind {
            SpaceKind::ProjSpace => self.r + 1,
            _ => self.r,
        }
    }

    pub fn basis(&self) -> Vec<BasisClass> {
        match self.kind {
            SpaceKind::EvenQuadric => {
                let m = self.half_dim();
                let mut out: Vec<BasisClass> = (0..m).map(BasisClass::H).collect();
                out.push(BasisClass::Xi1);
                out.push(BasisClass::Xi2);
                out.extend((m + 1..=self.r).map(BasisClass::H));
                out
            }
            _ => (0..=self.r).map(BasisClass::H).collect(),
        }
    }

    pub fn contains(&self, class: BasisClass) -> bool {
        match class {
            BasisClass::H(i) => {
                i <= self.r && !(self.kind == SpaceKind::EvenQuadric && i == self.half_dim())
            }
            BasisClass::Xi1 | BasisClass::Xi2 => self.kind == SpaceKind::EvenQuadric,
        }
    }

    pub(crate) fn check(&self, class: BasisClass) -> Result<()> {
        if self.contains(class) {
            Ok(())
        } else {
            Err(Error::InvalidClass {
                space: *self,
                class: class.to_string(),
            })
        }
    }

    pub fn codim(&self, class: BasisClass) -> u32 {
        match class {
            BasisClass::H(i) => i,
            BasisClass::Xi1 | BasisClass::Xi2 => self.half_dim(),
        }
    }

    pub fn basis_index(&self, class: BasisClass) -> Option<usize> {
        if !self.contains(class) {
            return None;
        }
        let m = self.half_dim() as usize;
        Some(match (self.kind, class) {
            (SpaceKind::EvenQuadric, BasisClass::H(i)) if (i as usize) < m => i as usize,
            (SpaceKind::EvenQuadric, BasisClass::Xi1) => m,
            (SpaceKind::EvenQuadric, BasisClass::Xi2) => m + 1,
            (SpaceKind::EvenQuadric, BasisClass::H(i)) => i as usize + 1,
            (_, BasisClass::H(i)) => i as usize,
            _ => unreachable!(),
        })
    }

    /// Multiplicity `w` with `[pt] = w * Hr`.
    pub fn point_weight(&self) -> Rational {
        if self.is_quadric() {
            half()
        } else {
            Rational::one()
        }
    }

    pub fn point_class(&self) -> QhElement {
        QhElement::monomial(*self, 0, BasisClass::H(self.r), self.point_weight())
    }

    /// `Hi` as an element of the basis (`Hm = Xi1 + Xi2` on even quadrics).
    pub fn hyperplane_power(&self, i: u32) -> Result<QhElement> {
        if i > self.r {
            return Err(Error::InvalidClass {
                space: *self,
                class: format!("H{i}"),
            });
        }
        if self.kind == SpaceKind::EvenQuadric && i == self.half_dim() {
            let mut e = QhElement::zero(*self);
            e.add_term(0, BasisClass::Xi1, Rational::one());
            e.add_term(0, BasisClass::Xi2, Rational::one());
            Ok(e)
        } else {
            Ok(QhElement::monomial(*self, 0, BasisClass::H(i), Rational::one()))
        }
    }

    /// `Li`, the class of an `i`-dimensional linear space on a quadric.
    pub fn linear_class(&self, i: u32) -> Result<QhElement> {
        let m = self.half_dim();
        let max = match self.kind {
            SpaceKind::OddQuadric => Some(m),
            SpaceKind::EvenQuadric => Some(m - 1),
            SpaceKind::ProjSpace => None,
        };
        match max {
            Some(max) if i <= max => {
                Ok(QhElement::monomial(*self, 0, BasisClass::H(self.r - i), half()))
            }
            _ => Err(Error::InvalidClass {
                space: *self,
                class: format!("L{i}"),
            }),
        }
    }
}

impl fmt::Display for TargetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::ProjSpace => write!(f, "P{}", self.r),
            _ => write!(f, "Q{}", self.r),
        }
    }
}

impl FromStr for TargetSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown target space `{s}` (expected e.g. P3 or Q5)"));
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str().trim_start_matches('^');
        let r: u32 = rest.parse().map_err(|_| bad())?;
        match head.to_ascii_uppercase() {
            'P' => Self::projective(r),
            'Q' => Self::quadric(r),
            _ => Err(bad()),
        }
    }
}

/// A basis class of `H^*(X, Q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisClass {
    H(u32),
    Xi1,
    Xi2,
}

impl BasisClass {
    pub fn other_xi(self) -> BasisClass {
        match self {
            BasisClass::Xi1 => BasisClass::Xi2,
            BasisClass::Xi2 => BasisClass::Xi1,
            h => h,
        }
    }
}

impl fmt::Display for BasisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisClass::H(i) => write!(f, "H{i}"),
            BasisClass::Xi1 => f.write_str("Xi1"),
            BasisClass::Xi2 => f.write_str("Xi2"),
        }
    }
}

/// A finite `Q`-linear combination of `q^k * class`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QhElement {
    space: TargetSpace,
    terms: BTreeMap<(u32, BasisClass), Rational>,
}

impl QhElement {
    pub fn zero(space: TargetSpace) -> Self {
        QhElement {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: TargetSpace) -> Self {
        Self::monomial(space, 0, BasisClass::H(0), Rational::one())
    }

    pub fn from_basis(space: TargetSpace, class: BasisClass) -> Result<Self> {
        space.check(class)?;
        Ok(Self::monomial(space, 0, class, Rational::one()))
    }

    /// `coeff * q^qpow * class`; `class` must be a basis class of `space`.
    pub fn monomial(space: TargetSpace, qpow: u32, class: BasisClass, coeff: Rational) -> Self {
        debug_assert!(space.contains(class), "{class} not in {space}");
        let mut e = Self::zero(space);
        e.add_term(qpow, class, coeff);
        e
    }

    pub fn space(&self) -> TargetSpace {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, BasisClass, &Rational)> + '_ {
        self.terms.iter().map(|(&(q, b), c)| (q, b, c))
    }

    pub fn coefficient(&self, qpow: u32, class: BasisClass) -> Rational {
        self.terms
            .get(&(qpow, class))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `q^qpow * [pt]`.
    pub fn point_coefficient(&self, qpow: u32) -> Rational {
        self.coefficient(qpow, BasisClass::H(self.space.r)) / self.space.point_weight()
    }

    pub(crate) fn add_term(&mut self, qpow: u32, class: BasisClass, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry((qpow, class)).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&(qpow, class));
        }
    }

    fn same_space(&self, other: &QhElement) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(self.space, other.space))
        }
    }

    pub fn try_add(&self, other: &QhElement) -> Result<QhElement> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (q, b, c) in other.terms() {
            out.add_term(q, b, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &QhElement) -> Result<QhElement> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> QhElement {
        let mut out = QhElement::zero(self.space);
        if k.is_zero() {
            return out;
        }
        for (q, b, c) in self.terms() {
            out.add_term(q, b, c * k);
        }
        out
    }

    /// Multiply by `q^k`.
    pub fn shift_q(&self, k: u32) -> Result<QhElement> {
        let mut out = QhElement::zero(self.space);
        for (q, b, c) in self.terms() {
            let q = q.checked_add(k).ok_or_else(q_overflow)?;
            out.add_term(q, b, c.clone());
        }
        Ok(out)
    }

    /// Graded degree of a single term: `qpow * fano_degree + codim`.
    pub fn term_degree(&self, qpow: u32, class: BasisClass) -> u64 {
        qpow as u64 * self.space.fano_degree() as u64 + self.space.codim(class) as u64
    }

    /// The common degree of all terms, if there is one. `None` for zero.
    pub fn degree(&self) -> Option<u64> {
        let mut degs = self.terms().map(|(q, b, _)| self.term_degree(q, b));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// The `q^0` part.
    pub fn classical_part(&self) -> QhElement {
        let mut out = QhElement::zero(self.space);
        for (q, b, c) in self.terms() {
            if q == 0 {
                out.add_term(q, b, c.clone());
            }
        }
        out
    }
}

fn q_overflow() -> Error {
    Error::Internal("q-power overflow".into())
}

impl std::ops::Add<&QhElement> for &QhElement {
    type Output = QhElement;

    /// Panics if the operands live on different targets; use
    /// [`QhElement::try_add`] for a checked variant.
    fn add(self, rhs: &QhElement) -> QhElement {
        self.try_add(rhs).expect("adding elements of different targets")
    }
}

impl std::ops::Sub<&QhElement> for &QhElement {
    type Output = QhElement;

    fn sub(self, rhs: &QhElement) -> QhElement {
        self.try_sub(rhs).expect("subtracting elements of different targets")
    }
}

impl fmt::Display for QhElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (q, b, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            match q {
                0 => {}
                1 => f.write_str("q*")?,
                k => write!(f, "q^{k}*")?,
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Product tables

type Entry = Vec<(u32, BasisClass, Rational)>;

struct ProductTable {
    size: usize,
    entries: Vec<Entry>,
}

impl ProductTable {
    fn get(&self, i: usize, j: usize) -> &Entry {
        &self.entries[i * self.size + j]
    }
}

fn table_cache() -> &'static RwLock<HashMap<TargetSpace, Arc<ProductTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<TargetSpace, Arc<ProductTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn product_table(space: TargetSpace) -> Arc<ProductTable> {
    if let Some(t) = table_cache().read().unwrap().get(&space) {
        return t.clone();
    }
    let table = Arc::new(build_table(space));
    table_cache()
        .write()
        .unwrap()
        .entry(space)
        .or_insert(table)
        .clone()
}

fn build_table(space: TargetSpace) -> ProductTable {
    let basis = space.basis();
    let size = basis.len();
    let mut entries = Vec::with_capacity(size * size);
    for &a in &basis {
        for &b in &basis {
            let e = basis_product_uncached(space, a, b);
            entries.push(e.terms().map(|(q, c, k)| (q, c, k.clone())).collect());
        }
    }
    ProductTable { size, entries }
}

/// `Hi * Hj` on a quadric, as powers of the hyperplane class.
fn quadric_hh(space: TargetSpace, i: u32, j: u32) -> QhElement {
    let r = space.dim();
    let h = |k: u32| space.hyperplane_power(k).expect("index in range");
    if i == 0 {
        return h(j);
    }
    if j == 0 {
        return h(i);
    }
    let s = i + j;
    if s < r {
        h(s)
    } else if s == r {
        let mut e = h(r);
        e.add_term(1, BasisClass::H(0), rat(2));
        e
    } else if i < r && j < r {
        h(s - r).scale(&rat(4)).shift_q(1).unwrap()
    } else if i == r && j == r {
        QhElement::monomial(space, 2, BasisClass::H(0), rat(4))
    } else {
        let low = i.min(j);
        h(low).scale(&rat(2)).shift_q(1).unwrap()
    }
}

fn basis_product_uncached(space: TargetSpace, a: BasisClass, b: BasisClass) -> QhElement {
    use BasisClass::*;
    let r = space.dim();
    match space.kind() {
        SpaceKind::ProjSpace => {
            let (H(i), H(j)) = (a, b) else { unreachable!() };
            let s = i + j;
            if s <= r {
                QhElement::monomial(space, 0, H(s), Rational::one())
            } else {
                QhElement::monomial(space, 1, H(s - r - 1), Rational::one())
            }
        }
        SpaceKind::OddQuadric => {
            let (H(i), H(j)) = (a, b) else { unreachable!() };
            quadric_hh(space, i, j)
        }
        SpaceKind::EvenQuadric => {
            let m = space.half_dim();
            match (a, b) {
                (H(i), H(j)) => quadric_hh(space, i, j),
                (H(_), _) => basis_product_uncached(space, b, a),
                (xi, H(0)) => QhElement::monomial(space, 0, xi, Rational::one()),
                (xi, H(j)) if j == r => {
                    QhElement::monomial(space, 1, xi.other_xi(), rat(2))
                }
                // Xi * Hj = (Xi * H) * H(j-1) = 1/2 H(m+1) * H(j-1) for j < r.
                (_, H(j)) => quadric_hh(space, m + 1, j - 1).scale(&half()),
                (x, y) => {
                    let same = x == y;
                    let point = same == (m % 2 == 0);
                    if point {
                        QhElement::monomial(space, 0, H(r), half())
                    } else {
                        QhElement::monomial(space, 1, H(0), Rational::one())
                    }
                }
            }
        }
    }
}

/// Product of two basis classes (no `q` factors on the inputs).
pub fn basis_product(space: TargetSpace, a: BasisClass, b: BasisClass) -> Result<QhElement> {
    space.check(a)?;
    space.check(b)?;
    let table = product_table(space);
    let i = space.basis_index(a).unwrap();
    let j = space.basis_index(b).unwrap();
    let mut out = QhElement::zero(space);
    for (q, c, k) in table.get(i, j) {
        out.add_term(*q, *c, k.clone());
    }
    Ok(out)
}

/// The small quantum product, extended bilinearly over `Q[q]`.
pub fn star_product(a: &QhElement, b: &QhElement) -> Result<QhElement> {
    a.same_space(b)?;
    let space = a.space;
    let table = product_table(space);
    let mut out = QhElement::zero(space);
    for (qa, ca, ka) in a.terms() {
        let i = space.basis_index(ca).unwrap();
        for (qb, cb, kb) in b.terms() {
            let j = space.basis_index(cb).unwrap();
            let base = qa.checked_add(qb).ok_or_else(q_overflow)?;
            let kk = ka * kb;
            for (q, c, k) in table.get(i, j) {
                let q = base.checked_add(*q).ok_or_else(q_overflow)?;
                out.add_term(q, *c, &kk * k);
            }
        }
    }
    Ok(out)
}

/// Product of a non-empty list of elements, left to right.
pub fn star_product_all(items: &[QhElement]) -> Result<QhElement> {
    let (first, rest) = items
        .split_first()
        .ok_or_else(|| Error::Unsupported("empty product".into()))?;
    let mut acc = first.clone();
    for x in rest {
        acc = star_product(&acc, x)?;
    }
    Ok(acc)
}

/// `H^{*t}`, the `t`-th quantum power of the hyperplane class.
pub fn h_star_power(space: TargetSpace, t: u32) -> QhElement {
    let h = QhElement::from_basis(space, BasisClass::H(1)).expect("H1 is a basis class");
    let mut acc = QhElement::one(space);
    for _ in 0..t {
        acc = star_product(&acc, &h).expect("same space");
    }
    acc
}

/// Coefficient of the point class in the cup product `a . b`.
pub fn poincare_pairing(space: TargetSpace, a: BasisClass, b: BasisClass) -> Result<Rational> {
    use BasisClass::*;
    space.check(a)?;
    space.check(b)?;
    let r = space.dim();
    if space.codim(a) + space.codim(b) != r {
        return Ok(Rational::zero());
    }
    Ok(match (a, b) {
        (H(_), H(_)) if space.is_quadric() => rat(2),
        (H(_), H(_)) => Rational::one(),
        (H(_), _) | (_, H(_)) => unreachable!("Hm is not a basis class"),
        (x, y) => {
            let m_even = space.half_dim() % 2 == 0;
            if (x == y) == m_even {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    })
}

/// The class of the diagonal as `sum coeff * left (x) right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalDecomposition {
    pub space: TargetSpace,
    pub terms: Vec<(BasisClass, BasisClass, Rational)>,
}

impl DiagonalDecomposition {
    /// The right-hand label paired with `left`, with its coefficient.
    pub fn partner(&self, left: BasisClass) -> impl Iterator<Item = &(BasisClass, BasisClass, Rational)> {
        self.terms.iter().filter(move |(l, _, _)| *l == left)
    }
}

pub fn diagonal(space: TargetSpace) -> DiagonalDecomposition {
    use BasisClass::*;
    let r = space.dim();
    let mut terms = Vec::new();
    for b in space.basis() {
        match b {
            H(i) => {
                let coeff = if space.is_quadric() { half() } else { Rational::one() };
                terms.push((H(i), H(r - i), coeff));
            }
            x => {
                let partner = if space.half_dim() % 2 == 0 { x } else { x.other_xi() };
                terms.push((x, partner, Rational::one()));
            }
        }
    }
    DiagonalDecomposition { space, terms }
}

// ---------------------------------------------------------------------------
// Class-name parsing

fn parse_class_token(space: TargetSpace, tok: &str) -> Result<QhElement> {
    let lower = tok.to_ascii_lowercase();
    let bad = || Error::Parse(format!("unknown class `{tok}`"));
    if let Some(rest) = lower.strip_prefix("xi") {
        return match rest {
            "1" => QhElement::from_basis(space, BasisClass::Xi1),
            "2" => QhElement::from_basis(space, BasisClass::Xi2),
            _ => Err(bad()),
        };
    }
    if let Some(rest) = lower.strip_prefix('h') {
        let i: u32 = rest.parse().map_err(|_| bad())?;
        return space.hyperplane_power(i);
    }
    if let Some(rest) = lower.strip_prefix('l') {
        let i: u32 = rest.parse().map_err(|_| bad())?;
        return space.linear_class(i);
    }
    Err(bad())
}

fn parse_coefficient(tok: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad coefficient `{tok}`"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(tok.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_term(space: TargetSpace, term: &str) -> Result<QhElement> {
    let mut coeff = Rational::one();
    let mut qpow = 0u32;
    let factors: Vec<&str> = term.split('*').map(str::trim).collect();
    let (class_tok, prefix) = factors
        .split_last()
        .ok_or_else(|| Error::Parse("empty term".into()))?;
    for f in prefix {
        let fl = f.to_ascii_lowercase();
        if fl == "q" {
            qpow = qpow.checked_add(1).ok_or_else(q_overflow)?;
        } else if let Some(k) = fl.strip_prefix("q^") {
            let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad q-power `{f}`")))?;
            qpow = qpow.checked_add(k).ok_or_else(q_overflow)?;
        } else {
            coeff *= parse_coefficient(f)?;
        }
    }
    parse_class_token(space, class_tok)?
        .scale(&coeff)
        .shift_q(qpow)
}

/// Parse an element such as `H3`, `q^2*H0`, `1/2*H3 - q*H0` or `Xi1+Xi2`.
pub fn parse_element(space: TargetSpace, s: &str) -> Result<QhElement> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty class expression".into()));
    }
    let mut out = QhElement::zero(space);
    let mut sign = Rational::one();
    let mut start = 0;
    let bytes = s.as_bytes();
    let push = |piece: &str, sign: &Rational, out: &mut QhElement| -> Result<()> {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::Parse(format!("dangling operator in `{s}`")));
        }
        *out = out.try_add(&parse_term(space, piece)?.scale(sign))?;
        Ok(())
    };
    for (i, &c) in bytes.iter().enumerate() {
        if (c == b'+' || c == b'-') && i > 0 {
            push(&s[start..i], &sign, &mut out)?;
            sign = if c == b'-' { -Rational::one() } else { Rational::one() };
            start = i + 1;
        } else if c == b'-' && i == 0 {
            sign = -Rational::one();
            start = 1;
        }
    }
    push(&s[start..], &sign, &mut out)?;
    Ok(out)
}

/// Parse a list of elements separated by commas, or by whitespace when
/// there is no comma.
pub fn parse_element_list(space: TargetSpace, s: &str) -> Result<Vec<QhElement>> {
    let pieces: Vec<&str> = if s.contains(',') {
        s.split(',').collect()
    } else {
        s.split_whitespace().collect()
    };
    pieces
        .into_iter()
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_element(space, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(r: u32) -> TargetSpace {
        TargetSpace::quadric(r).unwrap()
    }

    fn p(r: u32) -> TargetSpace {
        TargetSpace::projective(r).unwrap()
    }

    fn el(space: TargetSpace, s: &str) -> QhElement {
        parse_element(space, s).unwrap()
    }

    #[test]
    fn space_invariants() {
        assert!(TargetSpace::new(SpaceKind::EvenQuadric, 2).is_err());
        assert!(TargetSpace::new(SpaceKind::OddQuadric, 4).is_err());
        assert!(TargetSpace::new(SpaceKind::ProjSpace, 0).is_err());
        assert_eq!(p(3).fano_degree(), 4);
        assert_eq!(q(5).fano_degree(), 5);
        assert_eq!(q(6).half_dim(), 3);
        assert_eq!("q6".parse::<TargetSpace>().unwrap(), q(6));
        assert_eq!("P3".parse::<TargetSpace>().unwrap().to_string(), "P3");
        assert!("X3".parse::<TargetSpace>().is_err());
    }

    #[test]
    fn even_quadric_basis_skips_middle_power() {
        let b = q(6).basis();
        assert_eq!(b.len(), 8);
        assert!(!b.contains(&BasisClass::H(3)));
        assert!(b.contains(&BasisClass::Xi1));
        for (i, c) in b.iter().enumerate() {
            assert_eq!(q(6).basis_index(*c), Some(i));
        }
        assert_eq!(el(q(6), "H3"), el(q(6), "Xi1+Xi2"));
    }

    #[test]
    fn pairing_examples() {
        use BasisClass::*;
        assert_eq!(poincare_pairing(p(3), H(1), H(2)).unwrap(), rat(1));
        assert_eq!(poincare_pairing(q(3), H(1), H(2)).unwrap(), rat(2));
        assert_eq!(poincare_pairing(q(6), Xi1, Xi2).unwrap(), rat(1));
        assert_eq!(poincare_pairing(q(6), Xi1, Xi1).unwrap(), rat(0));
        assert_eq!(poincare_pairing(q(4), Xi1, Xi1).unwrap(), rat(1));
        assert!(poincare_pairing(q(5), Xi1, H(0)).is_err());
    }

    #[test]
    fn diagonal_examples() {
        use BasisClass::*;
        assert_eq!(
            diagonal(p(2)).terms,
            vec![(H(0), H(2), rat(1)), (H(1), H(1), rat(1)), (H(2), H(0), rat(1))]
        );
        assert_eq!(
            diagonal(q(3)).terms,
            vec![
                (H(0), H(3), half()),
                (H(1), H(2), half()),
                (H(2), H(1), half()),
                (H(3), H(0), half())
            ]
        );
        let mid: Vec<_> = diagonal(q(4))
            .terms
            .into_iter()
            .filter(|(l, _, _)| !matches!(l, H(_)))
            .collect();
        assert_eq!(mid, vec![(Xi1, Xi1, rat(1)), (Xi2, Xi2, rat(1))]);
    }

    #[test]
    fn product_examples() {
        for r in [3, 5, 6] {
            let s = q(r);
            let a = star_product(&el(s, "H1"), &el(s, &format!("H{}", r - 1))).unwrap();
            assert_eq!(a, el(s, &format!("H{r} + 2*q*H0")));
            let b = star_product(&el(s, &format!("H{r}")), &el(s, &format!("H{r}"))).unwrap();
            assert_eq!(b, el(s, "4*q^2*H0"));
        }
        assert_eq!(star_product(&el(p(3), "H2"), &el(p(3), "H2")).unwrap(), el(p(3), "q*H0"));
        assert_eq!(star_product(&el(q(6), "Xi1"), &el(q(6), "Xi1")).unwrap(), el(q(6), "q*H0"));
        assert_eq!(star_product(&el(q(6), "Xi1"), &el(q(6), "Xi2")).unwrap(), el(q(6), "L0"));
        assert_eq!(star_product(&el(q(4), "Xi1"), &el(q(4), "Xi2")).unwrap(), el(q(4), "q*H0"));
        assert_eq!(star_product(&el(q(6), "H1"), &el(q(6), "Xi2")).unwrap(), el(q(6), "1/2*H4"));
    }

    #[test]
    fn mixing_spaces_is_an_error() {
        let a = el(q(3), "H1");
        let b = el(q(5), "H1");
        assert!(matches!(star_product(&a, &b), Err(Error::SpaceMismatch(..))));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn h_powers() {
        let s = q(3);
        assert_eq!(h_star_power(s, 0), QhElement::one(s));
        assert_eq!(h_star_power(s, 2), el(s, "H2"));
        assert_eq!(h_star_power(s, 3), el(s, "H3 + 2*q*H0"));
        assert_eq!(h_star_power(s, 4), el(s, "4*q*H1"));
    }

    #[test]
    fn parsing_and_display() {
        let s = q(3);
        assert_eq!(el(s, "L0"), QhElement::monomial(s, 0, BasisClass::H(3), half()));
        assert_eq!(el(s, "l1"), QhElement::monomial(s, 0, BasisClass::H(2), half()));
        assert_eq!(el(s, "Q^2*h0"), QhElement::monomial(s, 2, BasisClass::H(0), rat(1)));
        assert!(parse_element(s, "L2").is_err());
        assert!(parse_element(q(6), "L3").is_err());
        assert!(parse_element(s, "H4").is_err());
        assert!(parse_element(s, "Xi1").is_err());
        assert!(parse_element(p(3), "L0").is_err());
        let e = el(s, "H3 - 2*q*H0 + 1/2*H1");
        assert_eq!(e.to_string(), "1/2*H1 + H3 - 2*q*H0");
        assert_eq!(el(s, &e.to_string()), e);
        assert_eq!(parse_element_list(s, "H3, H3,H2 ,H2").unwrap().len(), 4);
        assert_eq!(parse_element_list(s, "H3 H3  H2").unwrap().len(), 3);
        assert_eq!(parse_element_list(s, "H3 - 2*q*H0, H1").unwrap().len(), 2);
    }

    #[test]
    fn degree_of_terms() {
        let s = q(5);
        assert_eq!(el(s, "q*H2").degree(), Some(7));
        assert_eq!(el(s, "H5 + 2*q*H0").degree(), Some(5));
        assert_eq!(el(s, "H1 + H2").degree(), None);
    }
}
