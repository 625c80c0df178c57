//! Sparse arithmetic in `𝔅 = K(ℓ²({#} ∪ ℕ)) + ℂI`.
//!
//! A [`BooleanElement`] is a finitely supported matrix over [`Index`] pairs
//! plus a scalar multiple of the identity. The sparse map never fabricates
//! entries: every product, sum or adjoint only touches the supports of its
//! inputs, and entries whose modulus falls below [`DROP_THRESHOLD`] are
//! removed so that equality is entrywise.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::ComplexFloat;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{C64, DROP_THRESHOLD};

/// A site label `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "u32")]
pub struct Site(u32);

impl Site {
    /// Panics on `0`; use [`Site::try_new`] for untrusted input.
    pub fn new(n: u32) -> Self {
        Self::try_new(n).expect("site labels start at 1")
    }

    pub fn try_new(n: u32) -> Result<Self> {
        if n == 0 {
            Err(Error::ZeroSite(0))
        } else {
            Ok(Site(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Site {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Site::try_new(n)
    }
}

impl From<Site> for u32 {
    fn from(s: Site) -> u32 {
        s.0
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Basis label of `ℓ²({#} ∪ ℕ)`. `Vacuum` orders before every site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Vacuum,
    Site(Site),
}

impl Index {
    pub fn site(n: u32) -> Self {
        Index::Site(Site::new(n))
    }

    pub fn is_vacuum(self) -> bool {
        matches!(self, Index::Vacuum)
    }

    pub fn as_site(self) -> Option<Site> {
        match self {
            Index::Vacuum => None,
            Index::Site(s) => Some(s),
        }
    }
}

impl From<Site> for Index {
    fn from(s: Site) -> Self {
        Index::Site(s)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Vacuum => f.write_str("#"),
            Index::Site(s) => write!(f, "{s}"),
        }
    }
}

// "#" for the vacuum, a bare integer for a site. Inside JSON object keys the
// integer is quoted by serde_json, so the visitor also parses digit strings.
impl Serialize for Index {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Index::Vacuum => s.serialize_str("#"),
            Index::Site(site) => s.serialize_u32(site.get()),
        }
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IndexVisitor;

        impl<'de> Visitor<'de> for IndexVisitor {
            type Value = Index;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"#\" or a positive integer")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Index, E> {
                let n = u32::try_from(v).map_err(|_| E::custom(format!("site {v} out of range")))?;
                Site::try_new(n).map(Index::Site).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Index, E> {
                if v < 0 {
                    return Err(E::custom(format!("negative site label {v}")));
                }
                self.visit_u64(v as u64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Index, E> {
                if v == "#" {
                    return Ok(Index::Vacuum);
                }
                let n: u64 = v
                    .parse()
                    .map_err(|_| E::custom(format!("expected \"#\" or a site label, got {v:?}")))?;
                self.visit_u64(n)
            }
        }

        d.deserialize_any(IndexVisitor)
    }
}

// Shares the index visitor so that quoted keys also parse in buffered
// (internally tagged) content.
impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Index::deserialize(d)? {
            Index::Site(s) => Ok(s),
            Index::Vacuum => Err(de::Error::custom("expected a site label, got \"#\"")),
        }
    }
}

/// `[re, im]` (de)serialization for a single amplitude.
pub(crate) mod complex_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub(crate) fn is_negligible(z: C64) -> bool {
    z.abs() < DROP_THRESHOLD
}

/// An element `A + βI` of `𝔅` with `A` finitely supported.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BooleanElement {
    compact: BTreeMap<(Index, Index), C64>,
    scalar: C64,
}

impl BooleanElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar_multiple(C64::new(1.0, 0.0))
    }

    pub fn scalar_multiple(c: C64) -> Self {
        Self { compact: BTreeMap::new(), scalar: c }
    }

    /// The matrix unit `ε_{mn}`, mapping `e_n` to `e_m`.
    pub fn matrix_unit(m: Index, n: Index) -> Self {
        let mut compact = BTreeMap::new();
        compact.insert((m, n), C64::new(1.0, 0.0));
        Self { compact, scalar: C64::new(0.0, 0.0) }
    }

    /// `P_# = ε_{##}`.
    pub fn vacuum_projection() -> Self {
        Self::matrix_unit(Index::Vacuum, Index::Vacuum)
    }

    /// `P_#^⊥ = I − ε_{##}`.
    pub fn vacuum_complement() -> Self {
        let mut x = Self::identity();
        x.compact.insert((Index::Vacuum, Index::Vacuum), C64::new(-1.0, 0.0));
        x
    }

    /// Builds an element from raw entries, summing duplicates and dropping
    /// negligible amplitudes.
    pub fn from_entries<I>(entries: I, scalar: C64) -> Self
    where
        I: IntoIterator<Item = ((Index, Index), C64)>,
    {
        let mut compact: BTreeMap<(Index, Index), C64> = BTreeMap::new();
        for (key, amp) in entries {
            *compact.entry(key).or_default() += amp;
        }
        let mut x = Self { compact, scalar };
        x.canonicalize();
        x
    }

    fn canonicalize(&mut self) {
        self.compact.retain(|_, amp| !is_negligible(*amp));
    }

    pub fn scalar(&self) -> C64 {
        self.scalar
    }

    /// Entry of the compact part at `(m, n)`; the scalar part is not included.
    pub fn entry(&self, m: Index, n: Index) -> C64 {
        self.compact.get(&(m, n)).copied().unwrap_or_default()
    }

    /// Stored entries of the compact part in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((Index, Index), C64)> + '_ {
        self.compact.iter().map(|(k, v)| (*k, *v))
    }

    pub fn nnz(&self) -> usize {
        self.compact.len()
    }

    pub fn is_zero(&self) -> bool {
        self.compact.is_empty() && self.scalar == C64::new(0.0, 0.0)
    }

    /// True when the element has no compact part.
    pub fn is_scalar(&self) -> bool {
        self.compact.is_empty()
    }

    /// Sorted set of row and column indices touched by the compact part.
    pub fn support(&self) -> Vec<Index> {
        let mut s: Vec<Index> = self.compact.keys().flat_map(|&(m, n)| [m, n]).collect();
        s.sort();
        s.dedup();
        s
    }

    /// Copy of the element with only its compact part.
    pub fn compact_part(&self) -> Self {
        Self { compact: self.compact.clone(), scalar: C64::default() }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut x = Self {
            compact: self.compact.iter().map(|(k, v)| (*k, c * v)).collect(),
            scalar: c * self.scalar,
        };
        x.canonicalize();
        x
    }

    pub fn adjoint(&self) -> Self {
        Self {
            compact: self.compact.iter().map(|(&(m, n), v)| ((n, m), v.conj())).collect(),
            scalar: self.scalar.conj(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut compact = self.compact.clone();
        for (k, v) in &other.compact {
            *compact.entry(*k).or_default() += v;
        }
        let mut x = Self { compact, scalar: self.scalar + other.scalar };
        x.canonicalize();
        x
    }

    /// `(A + aI)(B + bI) = AB + aB + bA + abI`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut rows_of_other: BTreeMap<Index, Vec<(Index, C64)>> = BTreeMap::new();
        for (&(k, j), &v) in &other.compact {
            rows_of_other.entry(k).or_default().push((j, v));
        }
        let mut compact: BTreeMap<(Index, Index), C64> = BTreeMap::new();
        for (&(i, k), &u) in &self.compact {
            if let Some(row) = rows_of_other.get(&k) {
                for &(j, v) in row {
                    *compact.entry((i, j)).or_default() += u * v;
                }
            }
            if other.scalar != C64::default() {
                *compact.entry((i, k)).or_default() += u * other.scalar;
            }
        }
        if self.scalar != C64::default() {
            for (&key, &v) in &other.compact {
                *compact.entry(key).or_default() += self.scalar * v;
            }
        }
        let mut x = Self { compact, scalar: self.scalar * other.scalar };
        x.canonicalize();
        x
    }

    /// `(A + βI)v = Av + βv`.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out: BTreeMap<Index, C64> = BTreeMap::new();
        for (&(m, n), &a) in &self.compact {
            let vn = v.component(n);
            if vn != C64::default() {
                *out.entry(m).or_default() += a * vn;
            }
        }
        if self.scalar != C64::default() {
            for (i, z) in v.components() {
                *out.entry(i).or_default() += self.scalar * z;
            }
        }
        FockVector::from_components(out)
    }

    /// Largest entrywise modulus of `self − other`, scalar part included.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&(Index, Index)> = self.compact.keys().chain(other.compact.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.entry(k.0, k.1) - other.entry(k.0, k.1)).abs())
            .fold((self.scalar - other.scalar).abs(), f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Relabels site indices by `f`, fixing the vacuum and the scalar.
    pub(crate) fn relabel(&self, f: impl Fn(Site) -> Site) -> Self {
        let map = |i: Index| match i {
            Index::Vacuum => Index::Vacuum,
            Index::Site(s) => Index::Site(f(s)),
        };
        Self {
            compact: self.compact.iter().map(|(&(m, n), &v)| ((map(m), map(n)), v)).collect(),
            scalar: self.scalar,
        }
    }

    /// Restriction of the compact part to rows and columns accepted by `keep`.
    pub(crate) fn restrict(&self, keep: impl Fn(Index) -> bool) -> Self {
        Self {
            compact: self
                .compact
                .iter()
                .filter(|(&(m, n), _)| keep(m) && keep(n))
                .map(|(k, v)| (*k, *v))
                .collect(),
            scalar: C64::default(),
        }
    }
}

impl Add for &BooleanElement {
    type Output = BooleanElement;
    fn add(self, rhs: Self) -> BooleanElement {
        BooleanElement::add(self, rhs)
    }
}

impl Sub for &BooleanElement {
    type Output = BooleanElement;
    fn sub(self, rhs: Self) -> BooleanElement {
        BooleanElement::add(self, &rhs.scale(C64::new(-1.0, 0.0)))
    }
}

impl Sub for BooleanElement {
    type Output = BooleanElement;
    fn sub(self, rhs: Self) -> BooleanElement {
        &self - &rhs
    }
}

impl Neg for &BooleanElement {
    type Output = BooleanElement;
    fn neg(self) -> BooleanElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &BooleanElement {
    type Output = BooleanElement;
    fn mul(self, rhs: Self) -> BooleanElement {
        BooleanElement::mul(self, rhs)
    }
}

impl Mul<&BooleanElement> for C64 {
    type Output = BooleanElement;
    fn mul(self, rhs: &BooleanElement) -> BooleanElement {
        rhs.scale(self)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    row: Index,
    col: Index,
    #[serde(with = "complex_pair")]
    amp: C64,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    #[serde(with = "complex_pair")]
    scalar: C64,
    compact: Vec<EntryRepr>,
}

impl Serialize for BooleanElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            scalar: self.scalar,
            compact: self
                .compact
                .iter()
                .map(|(&(row, col), &amp)| EntryRepr { row, col, amp })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BooleanElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        Ok(BooleanElement::from_entries(
            repr.compact.into_iter().map(|e| ((e.row, e.col), e.amp)),
            repr.scalar,
        ))
    }
}

/// A vector `α ⊕ g` of the Boolean Fock space `ℂ ⊕ ℓ²(ℕ)` with finite support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    vacuum: C64,
    wave: BTreeMap<Site, C64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `Ω = e_# = (1, 0)`.
    pub fn vacuum() -> Self {
        Self { vacuum: C64::new(1.0, 0.0), wave: BTreeMap::new() }
    }

    pub fn basis(i: Index) -> Self {
        Self::from_components([(i, C64::new(1.0, 0.0))])
    }

    /// A one-particle vector `0 ⊕ g`.
    pub fn wave<I: IntoIterator<Item = (Site, C64)>>(wave: I) -> Self {
        Self::from_components(wave.into_iter().map(|(s, z)| (Index::Site(s), z)))
    }

    pub fn from_components<I: IntoIterator<Item = (Index, C64)>>(components: I) -> Self {
        let mut v = Self::zero();
        for (i, z) in components {
            match i {
                Index::Vacuum => v.vacuum += z,
                Index::Site(s) => *v.wave.entry(s).or_default() += z,
            }
        }
        v.wave.retain(|_, z| !is_negligible(*z));
        if is_negligible(v.vacuum) {
            v.vacuum = C64::default();
        }
        v
    }

    pub fn vacuum_amp(&self) -> C64 {
        self.vacuum
    }

    pub fn component(&self, i: Index) -> C64 {
        match i {
            Index::Vacuum => self.vacuum,
            Index::Site(s) => self.wave.get(&s).copied().unwrap_or_default(),
        }
    }

    /// Nonzero components, vacuum first.
    pub fn components(&self) -> impl Iterator<Item = (Index, C64)> + '_ {
        let vac = (self.vacuum != C64::default()).then_some((Index::Vacuum, self.vacuum));
        vac.into_iter().chain(self.wave.iter().map(|(&s, &z)| (Index::Site(s), z)))
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.wave.keys().copied()
    }

    /// `⟨self, other⟩`, linear in the first slot and conjugate-linear in the second.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = self.vacuum * other.vacuum.conj();
        for (s, z) in &self.wave {
            if let Some(w) = other.wave.get(s) {
                acc += z * w.conj();
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_components(self.components().map(|(i, z)| (i, c * z)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_components(self.components().chain(other.components()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).components().map(|(_, z)| z.abs()).fold(0.0, f64::max)
    }
}

impl Serialize for FockVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<Index, [f64; 2]> = self.components().map(|(i, z)| (i, [z.re, z.im])).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<Index, [f64; 2]>::deserialize(d)?;
        Ok(FockVector::from_components(map.into_iter().map(|(i, [re, im])| (i, C64::new(re, im)))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn eps(m: Index, n: Index) -> BooleanElement {
        BooleanElement::matrix_unit(m, n)
    }

    const V: Index = Index::Vacuum;

    #[test]
    fn matrix_unit_vacuum_is_projection() {
        let p = eps(V, V);
        assert_eq!(p.entries().collect::<Vec<_>>(), vec![((V, V), c(1.0, 0.0))]);
        assert_eq!(p.scalar(), c(0.0, 0.0));
        assert_eq!(p, BooleanElement::vacuum_projection());
    }

    #[test]
    fn matrix_unit_adjoint_and_delta_rule() {
        let one = Index::site(1);
        assert_eq!(eps(V, one).adjoint(), eps(one, V));
        assert_eq!(eps(V, one).mul(&eps(one, V)), eps(V, V));
        assert!(eps(V, one).mul(&eps(V, one)).is_zero());
    }

    #[test]
    fn product_with_scalar_parts() {
        let p = eps(V, V);
        let x = p.add(&BooleanElement::identity());
        let y = &p - &BooleanElement::identity();
        let expected = &p - &BooleanElement::identity();
        assert_eq!(x.mul(&y), expected);
    }

    #[test]
    fn add_negation_is_zero() {
        let x = BooleanElement::from_entries(
            [((V, Index::site(3)), c(0.5, -2.0)), ((Index::site(2), Index::site(2)), c(1.0, 0.0))],
            c(0.25, 1.0),
        );
        assert!(x.add(&x.scale(c(-1.0, 0.0))).is_zero());
    }

    #[test]
    fn adjoint_is_conjugate_linear() {
        let i = c(0.0, 1.0);
        let one = Index::site(1);
        assert_eq!(eps(V, one).scale(i).adjoint(), eps(one, V).scale(-i));
    }

    #[test]
    fn apply_on_basis() {
        let e = FockVector::vacuum();
        assert_eq!(BooleanElement::vacuum_projection().apply(&e), e);
        assert_eq!(eps(Index::site(1), V).apply(&e), FockVector::basis(Index::site(1)));
        assert_eq!(BooleanElement::vacuum_complement().apply(&e), FockVector::zero());
    }

    #[test]
    fn canonical_form_drops_rounding_residue() {
        let x = BooleanElement::from_entries([((V, V), c(1e-15, 0.0)), ((V, Index::site(1)), c(1.0, 0.0))], c(0.0, 0.0));
        assert_eq!(x.nnz(), 1);
    }

    #[test]
    fn zero_site_is_rejected() {
        assert!(Site::try_new(0).is_err());
        assert!(serde_json::from_str::<Index>("0").is_err());
        assert!(serde_json::from_str::<Index>("\"x\"").is_err());
        assert_eq!(serde_json::from_str::<Index>("\"#\"").unwrap(), V);
        assert_eq!(serde_json::from_str::<Index>("7").unwrap(), Index::site(7));
    }

    #[test]
    fn json_layout_is_row_major_with_vacuum_first() {
        let x = BooleanElement::from_entries(
            [
                ((Index::site(2), V), c(3.0, 0.0)),
                ((V, Index::site(2)), c(2.0, 0.0)),
                ((V, V), c(-4.0, 0.5)),
            ],
            c(5.0, 0.0),
        );
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r##"{"scalar":[5.0,0.0],"compact":[{"row":"#","col":"#","amp":[-4.0,0.5]},{"row":"#","col":2,"amp":[2.0,0.0]},{"row":2,"col":"#","amp":[3.0,0.0]}]}"##
        );
        let back: BooleanElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn fock_vector_json_uses_index_keys() {
        let v = FockVector::from_components([(V, c(0.5, 0.0)), (Index::site(3), c(0.0, -1.0))]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r##"{"#":[0.5,0.0],"3":[0.0,-1.0]}"##);
        assert_eq!(serde_json::from_str::<FockVector>(&json).unwrap(), v);
    }
}
