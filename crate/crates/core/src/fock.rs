//! Boolean creation and annihilation operators, the embeddings `ι_j` of the
//! sample algebra `𝔄 = M₂(ℂ) ⊕ ℂ`, and the action of finite permutations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{complex_pair, is_negligible, BooleanElement, FockVector, Index, Site};
use crate::error::{Error, Result};
use crate::C64;

/// `b†(f) = Σ_i f_i ε_{i#}`. `f` must have no vacuum component.
pub fn creator(f: &FockVector) -> Result<BooleanElement> {
    one_particle(f)?;
    Ok(BooleanElement::from_entries(
        f.components().map(|(i, z)| ((i, Index::Vacuum), z)),
        C64::default(),
    ))
}

/// `b(f) = Σ_i conj(f_i) ε_{#i}`, the adjoint of [`creator`].
pub fn annihilator(f: &FockVector) -> Result<BooleanElement> {
    one_particle(f)?;
    Ok(BooleanElement::from_entries(
        f.components().map(|(i, z)| ((Index::Vacuum, i), z.conj())),
        C64::default(),
    ))
}

fn one_particle(f: &FockVector) -> Result<()> {
    if is_negligible(f.vacuum_amp()) {
        Ok(())
    } else {
        Err(Error::VacuumComponent(f.vacuum_amp()))
    }
}

/// `b_j = ε_{#j}`.
pub fn annihilator_at(j: Site) -> BooleanElement {
    BooleanElement::matrix_unit(Index::Vacuum, j.into())
}

/// `b†_j = ε_{j#}`.
pub fn creator_at(j: Site) -> BooleanElement {
    BooleanElement::matrix_unit(j.into(), Index::Vacuum)
}

/// An element `((a, b), (c, d)) ⊕ β` of the sample algebra `M₂(ℂ) ⊕ ℂ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestAlgebraElement {
    #[serde(with = "complex_pair")]
    pub a: C64,
    #[serde(with = "complex_pair")]
    pub b: C64,
    #[serde(with = "complex_pair")]
    pub c: C64,
    #[serde(with = "complex_pair")]
    pub d: C64,
    #[serde(with = "complex_pair")]
    pub beta: C64,
}

impl TestAlgebraElement {
    pub fn new(a: C64, b: C64, c: C64, d: C64, beta: C64) -> Self {
        Self { a, b, c, d, beta }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64, beta: f64) -> Self {
        let r = |x| C64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d), r(beta))
    }

    pub fn unit() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0, 1.0)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj(), self.beta.conj())
    }

    /// Block product: 2×2 matrices multiplied, `β`'s multiplied.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.beta * other.beta,
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
            self.beta - other.beta,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

/// `ι_j(A) = a ε_{##} + b ε_{#j} + c ε_{j#} + d ε_{jj} + β P_{ℕ∖{j}}`,
/// with `P_{ℕ∖{j}} = I − ε_{##} − ε_{jj}`.
pub fn embed(j: Site, x: &TestAlgebraElement) -> BooleanElement {
    let v = Index::Vacuum;
    let s = Index::Site(j);
    BooleanElement::from_entries(
        [
            ((v, v), x.a - x.beta),
            ((v, s), x.b),
            ((s, v), x.c),
            ((s, s), x.d - x.beta),
        ],
        x.beta,
    )
}

/// A permutation of the sites moving finitely many of them.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "PermutationRepr", into = "PermutationRepr")]
pub struct FinitePermutation {
    // identity entries are never stored
    map: BTreeMap<Site, Site>,
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    map: BTreeMap<Site, Site>,
}

impl TryFrom<PermutationRepr> for FinitePermutation {
    type Error = Error;
    fn try_from(r: PermutationRepr) -> Result<Self> {
        FinitePermutation::from_map(r.map)
    }
}

impl From<FinitePermutation> for PermutationRepr {
    fn from(p: FinitePermutation) -> Self {
        PermutationRepr { map: p.map }
    }
}

impl FinitePermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Validates that `map` is a bijection of its key set onto itself.
    pub fn from_map(map: BTreeMap<Site, Site>) -> Result<Self> {
        let domain: BTreeSet<Site> = map.keys().copied().collect();
        let image: BTreeSet<Site> = map.values().copied().collect();
        if image.len() != map.len() {
            return Err(Error::InvalidPermutation("two sites share an image".into()));
        }
        if domain != image {
            return Err(Error::InvalidPermutation("image differs from the moved set".into()));
        }
        Ok(Self { map: map.into_iter().filter(|(k, v)| k != v).collect() })
    }

    pub fn swap(i: Site, j: Site) -> Self {
        Self::from_map([(i, j), (j, i)].into_iter().collect()).expect("a transposition is a bijection")
    }

    /// The permutation sending `sites[k]` to `images[k]`; both lists must
    /// contain the same sites.
    pub fn from_images(sites: &[Site], images: &[Site]) -> Result<Self> {
        if sites.len() != images.len() {
            return Err(Error::InvalidPermutation("length mismatch".into()));
        }
        let mut map = BTreeMap::new();
        for (&s, &t) in sites.iter().zip(images) {
            if map.insert(s, t).is_some() {
                return Err(Error::InvalidPermutation(format!("site {s} listed twice")));
            }
        }
        Self::from_map(map)
    }

    pub fn apply(&self, s: Site) -> Site {
        self.map.get(&s).copied().unwrap_or(s)
    }

    pub fn apply_index(&self, i: Index) -> Index {
        match i {
            Index::Vacuum => Index::Vacuum,
            Index::Site(s) => Index::Site(self.apply(s)),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let moved: BTreeSet<Site> = self.map.keys().chain(other.map.keys()).copied().collect();
        let map = moved.into_iter().map(|s| (s, self.apply(other.apply(s)))).collect();
        Self::from_map(map).expect("composition of bijections")
    }

    pub fn inverse(&self) -> Self {
        Self { map: self.map.iter().map(|(&k, &v)| (v, k)).collect() }
    }

    /// Sites not fixed by the permutation.
    pub fn moved(&self) -> impl Iterator<Item = Site> + '_ {
        self.map.keys().copied()
    }
}

/// The *-automorphism `α_g`: relabels site indices, fixing the vacuum and
/// the scalar part.
pub fn permute(g: &FinitePermutation, x: &BooleanElement) -> BooleanElement {
    x.relabel(|s| g.apply(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn s(n: u32) -> Site {
        Site::new(n)
    }

    const V: Index = Index::Vacuum;

    #[test]
    fn creator_of_basis_vector_is_matrix_unit() {
        let e1 = FockVector::basis(Index::site(1));
        assert_eq!(creator(&e1).unwrap(), BooleanElement::matrix_unit(Index::site(1), V));
        assert_eq!(annihilator(&e1).unwrap(), BooleanElement::matrix_unit(V, Index::site(1)));
    }

    #[test]
    fn creator_action() {
        let b2 = creator(&FockVector::basis(Index::site(2))).unwrap();
        assert_eq!(b2.apply(&FockVector::vacuum()), FockVector::basis(Index::site(2)));
        assert_eq!(b2.apply(&FockVector::basis(Index::site(1))), FockVector::zero());
    }

    #[test]
    fn creator_is_linear() {
        let f = FockVector::wave([(s(1), c(1.0, 0.0)), (s(2), c(0.0, 1.0))]);
        let expected = BooleanElement::from_entries(
            [((Index::site(1), V), c(1.0, 0.0)), ((Index::site(2), V), c(0.0, 1.0))],
            C64::default(),
        );
        let b = creator(&f).unwrap();
        assert_eq!(b, expected);
        for n in 1..=3 {
            let e = FockVector::basis(Index::site(n));
            assert_eq!(b.apply(&e), FockVector::zero());
        }
        assert_eq!(b.apply(&FockVector::vacuum()), f);
    }

    #[test]
    fn annihilator_is_conjugate_linear() {
        let f = FockVector::wave([(s(1), c(0.0, 1.0))]);
        let expected = BooleanElement::matrix_unit(V, Index::site(1)).scale(c(0.0, -1.0));
        assert_eq!(annihilator(&f).unwrap(), expected);
    }

    #[test]
    fn vacuum_component_is_rejected() {
        let f = FockVector::vacuum();
        assert!(matches!(creator(&f), Err(Error::VacuumComponent(_))));
        assert!(matches!(annihilator(&f), Err(Error::VacuumComponent(_))));
    }

    #[test]
    fn embedding_of_unit_is_identity() {
        assert_eq!(embed(s(1), &TestAlgebraElement::unit()), BooleanElement::identity());
    }

    #[test]
    fn embedding_normal_form() {
        let x = TestAlgebraElement::real(1.0, 2.0, 3.0, 4.0, 5.0);
        let two = Index::site(2);
        let expected = BooleanElement::from_entries(
            [
                ((V, V), c(-4.0, 0.0)),
                ((V, two), c(2.0, 0.0)),
                ((two, V), c(3.0, 0.0)),
                ((two, two), c(-1.0, 0.0)),
            ],
            c(5.0, 0.0),
        );
        assert_eq!(embed(s(2), &x), expected);

        // Against the displayed sum of matrix units, term by term.
        let eps = BooleanElement::matrix_unit;
        let complement = BooleanElement::identity() - eps(V, V) - eps(two, two);
        let by_terms = eps(V, V)
            .add(&eps(V, two).scale(c(2.0, 0.0)))
            .add(&eps(two, V).scale(c(3.0, 0.0)))
            .add(&eps(two, two).scale(c(4.0, 0.0)))
            .add(&complement.scale(c(5.0, 0.0)));
        assert_eq!(embed(s(2), &x), by_terms);
    }

    #[test]
    fn permutation_relabels_sites() {
        let g = FinitePermutation::swap(s(1), s(2));
        let x = BooleanElement::matrix_unit(V, Index::site(1));
        assert_eq!(permute(&g, &x), BooleanElement::matrix_unit(V, Index::site(2)));
        assert_eq!(permute(&g, &BooleanElement::identity()), BooleanElement::identity());
    }

    #[test]
    fn permutation_validation() {
        let bad: BTreeMap<Site, Site> = [(s(1), s(2))].into_iter().collect();
        assert!(FinitePermutation::from_map(bad).is_err());
        let collide: BTreeMap<Site, Site> = [(s(1), s(3)), (s(2), s(3)), (s(3), s(1))].into_iter().collect();
        assert!(FinitePermutation::from_map(collide).is_err());
        assert!(serde_json::from_str::<FinitePermutation>(r#"{"map": {"1": 2}}"#).is_err());
    }

    #[test]
    fn permutation_json() {
        let g: FinitePermutation = serde_json::from_str(r#"{"map": {"1": 2, "2": 1}}"#).unwrap();
        assert_eq!(g, FinitePermutation::swap(s(1), s(2)));
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"map":{"1":2,"2":1}}"#);
    }

    #[test]
    fn test_algebra_json() {
        let x = TestAlgebraElement::real(1.0, 2.0, 3.0, 4.0, 5.0);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"{"a":[1.0,0.0],"b":[2.0,0.0],"c":[3.0,0.0],"d":[4.0,0.0],"beta":[5.0,0.0]}"#
        );
        assert_eq!(serde_json::from_str::<TestAlgebraElement>(&json).unwrap(), x);
    }

    #[test]
    fn test_algebra_adjoint_swaps_off_diagonal() {
        let x = TestAlgebraElement::new(c(1.0, 1.0), c(2.0, 0.5), c(3.0, -1.0), c(0.0, 4.0), c(5.0, 2.0));
        let y = x.adjoint();
        assert_eq!(y.b, x.c.conj());
        assert_eq!(y.c, x.b.conj());
        assert_eq!(embed(s(3), &y), embed(s(3), &x).adjoint());
    }
}
