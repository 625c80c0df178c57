//! The tail algebra `ℂP_# ⊕ ℂP_#^⊥` and conditional expectations onto it.
//!
//! Every conditional expectation onto the tail algebra factors as
//! `F_φ(A) = ω_#(A) P_# + φ(P_#^⊥ A P_#^⊥) P_#^⊥` for a state `φ` on
//! `B(ℓ²(ℕ))`. Two computable families of `φ` are provided: normal states
//! with a finite-rank density supported on sites, and singular states that
//! factor through the Calkin algebra and therefore kill every compact.
//!
//! Whether some `F_φ` preserves `ψ_T` is decided by [`is_expected`]: it does
//! exactly when `e_#` is an eigenvector of `T`. The positive branch is
//! witnessed by [`preserving_phi`], the negative one by
//! [`counterexample_ratio`], whose witness `X = ⟨·, ξ_{j0}⟩ e_#` satisfies
//! `P_#^⊥ X P_#^⊥ = 0` and so rules out every `φ` at once.
//!
//! The multiplicity `⊗ I` of the tail algebra in the GNS space, and the
//! extra `⊕ ℂ` summand for `0 < γ < 1`, are not represented: mixed states
//! are handled through their normal part.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{complex_pair, BooleanElement, FockVector, Index};
use crate::error::{Error, Result};
use crate::states::TraceClassOperator;
use crate::{C64, KERNEL_TOLERANCE};

/// `x P_# + y P_#^⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailElement {
    #[serde(with = "complex_pair")]
    pub x: C64,
    #[serde(with = "complex_pair")]
    pub y: C64,
}

impl TailElement {
    pub fn new(x: C64, y: C64) -> Self {
        Self { x, y }
    }

    pub fn unit() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        Self::new(c, c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.x * other.x, self.y * other.y)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.x.conj(), self.y.conj())
    }

    /// `x ε_{##} + y (I − ε_{##})`.
    pub fn to_element(&self) -> BooleanElement {
        BooleanElement::from_entries([((Index::Vacuum, Index::Vacuum), self.x - self.y)], self.y)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x).norm().max((self.y - other.y).norm())
    }
}

/// A state `φ` on `B(ℓ²(ℕ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhiRepr", into = "PhiRepr")]
pub enum PhiState {
    /// `φ(B) = Tr(S B)` with `S` supported on sites.
    Normal(TraceClassOperator),
    /// `φ = σ ∘ π` through the Calkin algebra: `φ(A + aI) = a`.
    Singular,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PhiRepr {
    Normal {
        #[serde(rename = "S")]
        s: TraceClassOperator,
    },
    Singular,
}

impl TryFrom<PhiRepr> for PhiState {
    type Error = Error;
    fn try_from(r: PhiRepr) -> Result<Self> {
        match r {
            PhiRepr::Normal { s } => PhiState::normal(s),
            PhiRepr::Singular => Ok(PhiState::Singular),
        }
    }
}

impl From<PhiState> for PhiRepr {
    fn from(p: PhiState) -> Self {
        match p {
            PhiState::Normal(s) => PhiRepr::Normal { s },
            PhiState::Singular => PhiRepr::Singular,
        }
    }
}

impl PhiState {
    /// Rejects densities with a vacuum component.
    pub fn normal(s: TraceClassOperator) -> Result<Self> {
        if s.vacuum_weight() > KERNEL_TOLERANCE {
            return Err(Error::InvalidPhi(format!(
                "density has vacuum weight {}; it must live on l2(N)",
                s.vacuum_weight()
            )));
        }
        Ok(PhiState::Normal(s))
    }

    /// `φ(P_#^⊥ X P_#^⊥)`, the vacuum row and column of `X` being ignored.
    pub fn evaluate_corner(&self, x: &BooleanElement) -> C64 {
        match self {
            PhiState::Singular => x.scalar(),
            PhiState::Normal(s) => {
                let corner = x.restrict(|i| !i.is_vacuum());
                s.trace_with(&corner) + x.scalar()
            }
        }
    }
}

/// `ω_#(X) = ⟨X e_#, e_#⟩`.
pub fn vacuum_expectation(x: &BooleanElement) -> C64 {
    x.entry(Index::Vacuum, Index::Vacuum) + x.scalar()
}

/// `F_φ(X) = ω_#(X) P_# + φ(P_#^⊥ X P_#^⊥) P_#^⊥`.
pub fn cond_expect(phi: &PhiState, x: &BooleanElement) -> TailElement {
    TailElement::new(vacuum_expectation(x), phi.evaluate_corner(x))
}

/// `E(X) = ω_#(X) P_# + P_#^⊥ X P_#^⊥`; every `F_φ` factors through it.
pub fn vacuum_compression(x: &BooleanElement) -> BooleanElement {
    let corner = x.restrict(|i| !i.is_vacuum());
    BooleanElement::from_entries(
        corner
            .entries()
            .chain([((Index::Vacuum, Index::Vacuum), vacuum_expectation(x) - x.scalar())]),
        x.scalar(),
    )
}

/// Largest deviation in `F_φ(Z X Z') = Z F_φ(X) Z'`.
pub fn module_property_deviation(phi: &PhiState, z: &TailElement, x: &BooleanElement, z2: &TailElement) -> f64 {
    let sandwiched = z.to_element().mul(x).mul(&z2.to_element());
    let lhs = cond_expect(phi, &sandwiched);
    let rhs = z.mul(&cond_expect(phi, x)).mul(z2);
    lhs.max_abs_diff(&rhs)
}

pub fn module_property_check(phi: &PhiState, z: &TailElement, x: &BooleanElement, z2: &TailElement) -> bool {
    module_property_deviation(phi, z, x, z2) <= KERNEL_TOLERANCE
}

/// `‖T e_# − ⟨T e_#, e_#⟩ e_#‖`: zero exactly when `e_#` is an eigenvector.
pub fn vacuum_defect(t: &TraceClassOperator) -> f64 {
    let te = t.apply(&FockVector::vacuum());
    let along = FockVector::vacuum().scale(te.vacuum_amp());
    te.sub(&along).norm()
}

/// Whether some `F_φ` preserves `ψ_T`, i.e. whether `e_#` is an eigenvector of `T`.
pub fn is_expected(t: &TraceClassOperator) -> bool {
    vacuum_defect(t) <= KERNEL_TOLERANCE
}

/// The `φ` whose `F_φ` preserves `ψ_T`:
/// `S = (T − ω_#(T) P_#) / (1 − ω_#(T))`, or `Singular` when `T = P_#`.
pub fn preserving_phi(t: &TraceClassOperator) -> Result<PhiState> {
    let defect = vacuum_defect(t);
    if defect > KERNEL_TOLERANCE {
        return Err(Error::NotExpected { defect });
    }
    let w = t.vacuum_weight();
    if w >= 1.0 - KERNEL_TOLERANCE {
        return Ok(PhiState::Singular);
    }
    // With e_# an eigenvector, T − ω_#(T)P_# = P_#^⊥ T P_#^⊥.
    let sites: Vec<Index> = t.sites().into_iter().map(Index::Site).collect();
    let n = sites.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (r, &i) in sites.iter().enumerate() {
        for (c, &j) in sites.iter().enumerate() {
            m[(r, c)] = t.entry(i, j) / (1.0 - w);
        }
    }
    PhiState::normal(TraceClassOperator::from_density(&sites, m)?)
}

/// Outcome of the negative branch: `ψ_T(F_φ(X)) = ratio · ψ_T(X)` for every `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub ratio: f64,
    /// Eigenpair index `j0` used to build the witness.
    pub j0: usize,
    /// `X = ⟨·, ξ_{j0}⟩ e_#`.
    pub witness: BooleanElement,
}

/// `Σ_k (λ_k / λ_{j0}) |⟨e_#, ξ_k⟩|²` with `j0` the first eigenpair of largest
/// weight among those overlapping the vacuum.
pub fn counterexample_ratio(t: &TraceClassOperator) -> Result<Counterexample> {
    if is_expected(t) {
        return Err(Error::Expected);
    }
    let pairs = t.eigenpairs();
    let mut j0: Option<usize> = None;
    for (k, (w, xi)) in pairs.iter().enumerate() {
        if xi.vacuum_amp().norm() <= KERNEL_TOLERANCE {
            continue;
        }
        if j0.is_none_or(|best| *w > pairs[best].0) {
            j0 = Some(k);
        }
    }
    // not expected implies some eigenvector overlaps the vacuum
    let j0 = j0.expect("non-expected T has an eigenvector overlapping e_#");
    let lambda0 = pairs[j0].0;
    let ratio = pairs
        .iter()
        .map(|(w, xi)| w / lambda0 * xi.vacuum_amp().norm_sqr())
        .sum();
    let xi0 = &pairs[j0].1;
    let witness = BooleanElement::from_entries(
        xi0.components().map(|(n, z)| ((Index::Vacuum, n), z.conj())),
        C64::default(),
    );
    Ok(Counterexample { ratio, j0, witness })
}

/// `F(X) = ω_#(X) P_# + [ψ_T(X) − ω_#(T) ω_#(X)] / (1 − ω_#(T)) P_#^⊥`.
pub fn theorem_preserving_f(t: &TraceClassOperator, x: &BooleanElement) -> Result<TailElement> {
    let defect = vacuum_defect(t);
    if defect > KERNEL_TOLERANCE {
        return Err(Error::NotExpected { defect });
    }
    let w = t.vacuum_weight();
    if w >= 1.0 - KERNEL_TOLERANCE {
        return Err(Error::VacuumSaturated);
    }
    let vac = vacuum_expectation(x);
    let psi = t.trace_with(x) + x.scalar();
    Ok(TailElement::new(vac, (psi - w * vac) / (1.0 - w)))
}

/// Sites on which the density of a normal `φ` lives; empty for singular `φ`.
pub fn phi_sites(phi: &PhiState) -> BTreeSet<crate::Site> {
    match phi {
        PhiState::Normal(s) => s.sites(),
        PhiState::Singular => BTreeSet::new(),
    }
}
