//! States on `𝔅` in the form `ω = γ ψ_T + (1 − γ) ω_∞`, with `ψ_T(A) = Tr(TA)`
//! for a finite-rank density `T` and `ω_∞(A + aI) = a`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

use crate::algebra::{BooleanElement, FockVector, Index, Site};
use crate::error::{Error, Result};
use crate::fock::{embed, TestAlgebraElement};
use crate::{C64, DROP_THRESHOLD, KERNEL_TOLERANCE};

// Eigenvalues at or below this are treated as numerical zeros of the density.
const NULL_EIGENVALUE: f64 = 1e-12;

/// A positive, trace-one, finite-rank operator `T = Σ_k λ_k ⟨·, ξ_k⟩ ξ_k`.
///
/// Construction checks `λ_k > 0`, `Σ λ_k = 1` and orthonormality of the
/// `ξ_k`, all to [`KERNEL_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TraceClassRepr", into = "TraceClassRepr")]
pub struct TraceClassOperator {
    eigenpairs: Vec<(f64, FockVector)>,
}

#[derive(Serialize, Deserialize)]
struct EigenpairRepr {
    weight: f64,
    vector: FockVector,
}

#[derive(Serialize, Deserialize)]
struct TraceClassRepr {
    eigenpairs: Vec<EigenpairRepr>,
}

impl TryFrom<TraceClassRepr> for TraceClassOperator {
    type Error = Error;
    fn try_from(r: TraceClassRepr) -> Result<Self> {
        TraceClassOperator::new(r.eigenpairs.into_iter().map(|p| (p.weight, p.vector)).collect())
    }
}

impl From<TraceClassOperator> for TraceClassRepr {
    fn from(t: TraceClassOperator) -> Self {
        TraceClassRepr {
            eigenpairs: t
                .eigenpairs
                .into_iter()
                .map(|(weight, vector)| EigenpairRepr { weight, vector })
                .collect(),
        }
    }
}

impl TraceClassOperator {
    pub fn new(eigenpairs: Vec<(f64, FockVector)>) -> Result<Self> {
        if eigenpairs.is_empty() {
            return Err(Error::InvalidTraceClass("no eigenpairs".into()));
        }
        for (k, (w, _)) in eigenpairs.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidTraceClass(format!("weight {k} is {w}, must be positive")));
            }
        }
        let total: f64 = eigenpairs.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > KERNEL_TOLERANCE {
            return Err(Error::InvalidTraceClass(format!("weights sum to {total}, not 1")));
        }
        for (i, (_, u)) in eigenpairs.iter().enumerate() {
            for (j, (_, v)) in eigenpairs.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let g = u.inner(v);
                if (g - C64::new(expected, 0.0)).abs() > KERNEL_TOLERANCE {
                    return Err(Error::InvalidTraceClass(format!(
                        "eigenvectors are not orthonormal: <xi_{i}, xi_{j}> = {g}"
                    )));
                }
            }
        }
        Ok(Self { eigenpairs })
    }

    /// Rank-one projection onto `v / ‖v‖`.
    pub fn pure(v: &FockVector) -> Result<Self> {
        let n = v.norm();
        if n < DROP_THRESHOLD {
            return Err(Error::InvalidTraceClass("zero vector".into()));
        }
        Self::new(vec![(1.0, v.scale(C64::new(1.0 / n, 0.0)))])
    }

    /// `P_# = |e_#⟩⟨e_#|`.
    pub fn vacuum_projector() -> Self {
        Self { eigenpairs: vec![(1.0, FockVector::vacuum())] }
    }

    /// Normalized `Σ_k w_k |v_k⟩⟨v_k|` for arbitrary (not necessarily
    /// orthogonal) vectors, re-diagonalized into a genuine eigendecomposition.
    pub fn from_mixture(terms: &[(f64, FockVector)]) -> Result<Self> {
        if terms.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidTraceClass("mixture weights must be non-negative".into()));
        }
        let support: Vec<Index> = terms
            .iter()
            .flat_map(|(_, v)| v.components().map(|(i, _)| i).collect::<Vec<_>>())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = support.len();
        if n == 0 {
            return Err(Error::InvalidTraceClass("empty mixture".into()));
        }
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (w, v) in terms {
            for (r, &i) in support.iter().enumerate() {
                for (c, &j) in support.iter().enumerate() {
                    m[(r, c)] += C64::new(*w, 0.0) * v.component(i) * v.component(j).conj();
                }
            }
        }
        let trace: f64 = (0..n).map(|k| m[(k, k)].re).sum();
        if trace <= DROP_THRESHOLD {
            return Err(Error::InvalidTraceClass("mixture has zero trace".into()));
        }
        m /= C64::new(trace, 0.0);
        Self::from_density(&support, m)
    }

    /// Eigendecomposition of a Hermitian positive matrix given on `support`.
    /// Eigenvalues below the drop threshold are discarded and the rest renormalized.
    pub(crate) fn from_density(support: &[Index], m: DMatrix<C64>) -> Result<Self> {
        let eig = SymmetricEigen::new(m);
        let mut pairs = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -KERNEL_TOLERANCE {
                return Err(Error::InvalidTraceClass(format!("negative eigenvalue {lambda}")));
            }
            if lambda <= NULL_EIGENVALUE {
                continue;
            }
            let col = eig.eigenvectors.column(k);
            let v = FockVector::from_components(support.iter().zip(col.iter()).map(|(&i, &z)| (i, z)));
            pairs.push((lambda, v));
        }
        let total: f64 = pairs.iter().map(|(w, _)| w).sum();
        for (w, _) in &mut pairs {
            *w /= total;
        }
        // largest weight first, so that the representation is stable
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self::new(pairs)
    }

    pub fn eigenpairs(&self) -> &[(f64, FockVector)] {
        &self.eigenpairs
    }

    pub fn rank(&self) -> usize {
        self.eigenpairs.len()
    }

    /// `T v = Σ_k λ_k ⟨v, ξ_k⟩ ξ_k`.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        self.eigenpairs
            .iter()
            .fold(FockVector::zero(), |acc, (w, xi)| acc.add(&xi.scale(C64::new(*w, 0.0) * v.inner(xi))))
    }

    /// Matrix entry `⟨T e_n, e_m⟩`.
    pub fn entry(&self, m: Index, n: Index) -> C64 {
        self.eigenpairs
            .iter()
            .map(|(w, xi)| C64::new(*w, 0.0) * xi.component(m) * xi.component(n).conj())
            .sum()
    }

    /// `ω_#(T) = ⟨T e_#, e_#⟩`.
    pub fn vacuum_weight(&self) -> f64 {
        self.eigenpairs.iter().map(|(w, xi)| w * xi.vacuum_amp().norm_sqr()).sum()
    }

    /// `Tr(T A)` for the compact part `A` of `x`; the scalar part is ignored.
    pub fn trace_with(&self, x: &BooleanElement) -> C64 {
        // Tr(TA) = Σ_{m,n} T_{nm} A_{mn}
        x.entries().map(|((m, n), a)| self.entry(n, m) * a).sum()
    }

    /// Sites carrying a nonzero component of some eigenvector.
    pub fn sites(&self) -> BTreeSet<Site> {
        self.eigenpairs.iter().flat_map(|(_, xi)| xi.sites().collect::<Vec<_>>()).collect()
    }

    /// `T` as a Boolean element (compact, no scalar part).
    pub fn to_element(&self) -> BooleanElement {
        let support: BTreeSet<Index> = self
            .eigenpairs
            .iter()
            .flat_map(|(_, xi)| xi.components().map(|(i, _)| i).collect::<Vec<_>>())
            .collect();
        BooleanElement::from_entries(
            support
                .iter()
                .flat_map(|&m| support.iter().map(move |&n| (m, n)))
                .map(|(m, n)| ((m, n), self.entry(m, n))),
            C64::default(),
        )
    }
}

/// `ω = γ ψ_T + (1 − γ) ω_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct BooleanState {
    gamma: f64,
    t: TraceClassOperator,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    gamma: f64,
    #[serde(rename = "T")]
    t: TraceClassOperator,
}

impl TryFrom<StateRepr> for BooleanState {
    type Error = Error;
    fn try_from(r: StateRepr) -> Result<Self> {
        BooleanState::new(r.gamma, r.t)
    }
}

impl From<BooleanState> for StateRepr {
    fn from(s: BooleanState) -> Self {
        StateRepr { gamma: s.gamma, t: s.t }
    }
}

impl BooleanState {
    pub fn new(gamma: f64, t: TraceClassOperator) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self { gamma, t })
    }

    /// `ψ_T`, i.e. `γ = 1`.
    pub fn normal(t: TraceClassOperator) -> Self {
        Self { gamma: 1.0, t }
    }

    /// The Fock vacuum state `ω_#`.
    pub fn vacuum() -> Self {
        Self::normal(TraceClassOperator::vacuum_projector())
    }

    /// `ω_∞(A + aI) = a`. The stored `T` is a placeholder and never read.
    pub fn infinity() -> Self {
        Self { gamma: 0.0, t: TraceClassOperator::vacuum_projector() }
    }

    /// `γ ω_# + (1 − γ) ω_∞`, the segment of permutation-invariant states.
    pub fn symmetric(gamma: f64) -> Result<Self> {
        Self::new(gamma, TraceClassOperator::vacuum_projector())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn density(&self) -> &TraceClassOperator {
        &self.t
    }

    /// `γ Tr(T A) + a` for `x = A + aI`.
    pub fn evaluate(&self, x: &BooleanElement) -> C64 {
        if self.gamma == 0.0 {
            return x.scalar();
        }
        C64::new(self.gamma, 0.0) * self.t.trace_with(x) + x.scalar()
    }

    /// The normal component `ψ_T` on its own.
    pub fn normal_part(&self) -> BooleanState {
        Self::normal(self.t.clone())
    }
}

/// `ι_{j_1}(A_1) ⋯ ι_{j_n}(A_n)`.
pub fn word_product(word: &[(Site, TestAlgebraElement)]) -> BooleanElement {
    word.iter()
        .fold(BooleanElement::identity(), |acc, (j, x)| acc.mul(&embed(*j, x)))
}

/// `ω(ι_{j_1}(A_1) ⋯ ι_{j_n}(A_n))`.
pub fn moment(state: &BooleanState, word: &[(Site, TestAlgebraElement)]) -> Result<C64> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(state.evaluate(&word_product(word)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: Index = Index::Vacuum;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn s(n: u32) -> Site {
        Site::new(n)
    }

    #[test]
    fn infinity_state_reads_scalar() {
        let x = BooleanElement::from_entries(
            [((V, V), c(3.0, 1.0)), ((Index::site(4), V), c(-2.0, 0.0))],
            c(0.75, -0.5),
        );
        assert_eq!(BooleanState::infinity().evaluate(&x), c(0.75, -0.5));
    }

    #[test]
    fn vacuum_state_on_matrix_units() {
        let w = BooleanState::vacuum();
        assert_eq!(w.evaluate(&BooleanElement::vacuum_projection()), c(1.0, 0.0));
        assert_eq!(w.evaluate(&BooleanElement::matrix_unit(Index::site(1), Index::site(1))), c(0.0, 0.0));
        assert_eq!(w.evaluate(&BooleanElement::identity()), c(1.0, 0.0));
    }

    #[test]
    fn symmetric_segment() {
        let half = BooleanState::symmetric(0.5).unwrap();
        assert_eq!(half.evaluate(&BooleanElement::vacuum_projection()), c(0.5, 0.0));
        assert_eq!(BooleanState::symmetric(1.0).unwrap(), BooleanState::vacuum());
        assert!(matches!(BooleanState::symmetric(1.5), Err(Error::GammaOutOfRange(_))));
        assert!(matches!(BooleanState::symmetric(-0.1), Err(Error::GammaOutOfRange(_))));
    }

    #[test]
    fn one_site_moment_under_vacuum_is_corner() {
        let x = TestAlgebraElement::new(c(0.3, 0.1), c(2.0, 0.0), c(-1.0, 1.0), c(4.0, 0.0), c(5.0, 0.0));
        for j in 1..=5 {
            assert!((moment(&BooleanState::vacuum(), &[(s(j), x)]).unwrap() - x.a).norm() < 1e-15);
        }
    }

    #[test]
    fn infinity_state_moment_is_product_of_betas() {
        let x = TestAlgebraElement::real(1.0, 2.0, 3.0, 4.0, 5.0);
        let y = TestAlgebraElement::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -2.0));
        let m = moment(&BooleanState::infinity(), &[(s(1), x), (s(2), y)]).unwrap();
        assert_eq!(m, x.beta * y.beta);
    }

    #[test]
    fn empty_word_is_rejected() {
        assert!(matches!(moment(&BooleanState::vacuum(), &[]), Err(Error::EmptyWord)));
    }

    #[test]
    fn trace_class_validation() {
        let e1 = FockVector::basis(Index::site(1));
        assert!(TraceClassOperator::new(vec![]).is_err());
        assert!(TraceClassOperator::new(vec![(0.5, e1.clone())]).is_err());
        assert!(TraceClassOperator::new(vec![(1.5, e1.clone()), (-0.5, FockVector::vacuum())]).is_err());
        assert!(TraceClassOperator::new(vec![(0.5, e1.clone()), (0.5, e1.clone())]).is_err());
        assert!(TraceClassOperator::new(vec![(1.0, e1.scale(c(2.0, 0.0)))]).is_err());
        assert!(TraceClassOperator::new(vec![(0.5, e1), (0.5, FockVector::vacuum())]).is_ok());
    }

    #[test]
    fn mixture_is_rediagonalized() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = FockVector::from_components([(V, c(r, 0.0)), (Index::site(1), c(r, 0.0))]);
        let minus = FockVector::from_components([(V, c(r, 0.0)), (Index::site(1), c(-r, 0.0))]);
        // equal mixture of the two is half the projection onto span{e_#, e_1}
        let t = TraceClassOperator::from_mixture(&[(1.0, plus.clone()), (1.0, minus)]).unwrap();
        assert_eq!(t.rank(), 2);
        assert!((t.entry(V, V) - c(0.5, 0.0)).norm() < 1e-12);
        assert!(t.entry(V, Index::site(1)).norm() < 1e-12);
        // non-normalized single vector
        let t = TraceClassOperator::from_mixture(&[(3.0, plus.scale(c(2.0, 0.0)))]).unwrap();
        assert_eq!(t.rank(), 1);
        assert!((t.vacuum_weight() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn state_json() {
        let json = r##"{"gamma": 0.7, "T": {"eigenpairs": [{"weight": 1.0, "vector": {"#": [0.6, 0.0], "3": [0.0, 0.8]}}]}}"##;
        let st: BooleanState = serde_json::from_str(json).unwrap();
        assert_eq!(st.gamma(), 0.7);
        assert!((st.density().vacuum_weight() - 0.36).abs() < 1e-15);
        let back: BooleanState = serde_json::from_str(&serde_json::to_string(&st).unwrap()).unwrap();
        assert_eq!(back, st);

        let bad = r##"{"gamma": 0.7, "T": {"eigenpairs": [{"weight": 0.5, "vector": {"#": [1.0, 0.0]}}]}}"##;
        let err = serde_json::from_str::<BooleanState>(bad).unwrap_err().to_string();
        assert!(err.contains("weights sum"), "{err}");
    }

    #[test]
    fn decay_outside_support_is_exact() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let xi = FockVector::from_components([(V, c(r, 0.0)), (Index::site(3), c(0.0, r))]);
        let st = BooleanState::normal(TraceClassOperator::pure(&xi).unwrap());
        for i in 1..=20u32 {
            let n = BooleanElement::matrix_unit(Index::site(i), Index::site(i));
            let v = st.evaluate(&n);
            if i == 3 {
                assert!((v - c(0.5, 0.0)).norm() < 1e-15);
            } else {
                assert_eq!(v, c(0.0, 0.0));
            }
        }
    }
}
