//! Dense-truncation oracle.
//!
//! Every sparse element is supported on finitely many indices, so `A + aI`
//! is represented exactly by the square matrix `A_S + a I_S` over a finite
//! index list `S` (always containing `#`) together with the scalar `a`,
//! which is what the operator does outside `S`. All arithmetic here goes
//! through `nalgebra` dense matrices and the embeddings are rebuilt from
//! their defining formula, so this path shares no code with the sparse
//! kernel beyond the data types it converts from.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{BooleanElement, FockVector, Index, Site};
use crate::error::{Error, Result};
use crate::fock::TestAlgebraElement;
use crate::states::{BooleanState, TraceClassOperator};
use crate::tail::{PhiState, TailElement};
use crate::verify::Kernel;
use crate::C64;

/// `A_S + a I_S` over `indices`, plus the scalar `a`.
#[derive(Debug, Clone)]
pub struct DenseElement {
    indices: Vec<Index>,
    matrix: DMatrix<C64>,
    scalar: C64,
}

fn index_set<'a>(parts: impl IntoIterator<Item = &'a [Index]>) -> Vec<Index> {
    let mut set: BTreeSet<Index> = BTreeSet::new();
    set.insert(Index::Vacuum);
    for p in parts {
        set.extend(p.iter().copied());
    }
    set.into_iter().collect()
}

impl DenseElement {
    pub fn from_sparse(x: &BooleanElement, extra: &[Index]) -> Self {
        let indices = index_set([x.support().as_slice(), extra]);
        let n = indices.len();
        let mut matrix = DMatrix::<C64>::identity(n, n) * x.scalar();
        for ((m, k), amp) in x.entries() {
            let r = indices.binary_search(&m).expect("row index present");
            let c = indices.binary_search(&k).expect("column index present");
            matrix[(r, c)] += amp;
        }
        Self { indices, matrix, scalar: x.scalar() }
    }

    /// Re-expresses `self` over a larger index list.
    fn widen(&self, indices: &[Index]) -> DMatrix<C64> {
        let n = indices.len();
        let mut m = DMatrix::<C64>::identity(n, n) * self.scalar;
        for (r, &i) in self.indices.iter().enumerate() {
            let rr = indices.binary_search(&i).expect("superset");
            for (c, &j) in self.indices.iter().enumerate() {
                let cc = indices.binary_search(&j).expect("superset");
                m[(rr, cc)] = self.matrix[(r, c)];
            }
        }
        m
    }

    pub fn to_sparse(&self) -> BooleanElement {
        let n = self.indices.len();
        let mut entries = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let mut v = self.matrix[(r, c)];
                if r == c {
                    v -= self.scalar;
                }
                entries.push(((self.indices[r], self.indices[c]), v));
            }
        }
        BooleanElement::from_entries(entries, self.scalar)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let indices = index_set([self.indices.as_slice(), other.indices.as_slice()]);
        let matrix = self.widen(&indices) * other.widen(&indices);
        Self { indices, matrix, scalar: self.scalar * other.scalar }
    }

    pub fn add(&self, other: &Self) -> Self {
        let indices = index_set([self.indices.as_slice(), other.indices.as_slice()]);
        let matrix = self.widen(&indices) + other.widen(&indices);
        Self { indices, matrix, scalar: self.scalar + other.scalar }
    }

    pub fn adjoint(&self) -> Self {
        Self { indices: self.indices.clone(), matrix: self.matrix.adjoint(), scalar: self.scalar.conj() }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let extra: Vec<Index> = v.components().map(|(i, _)| i).collect();
        let indices = index_set([self.indices.as_slice(), extra.as_slice()]);
        let m = self.widen(&indices);
        let dv = DVector::from_iterator(indices.len(), indices.iter().map(|&i| v.component(i)));
        let out = m * dv;
        FockVector::from_components(indices.iter().copied().zip(out.iter().copied()))
    }

    /// Compact part `A_S` over `indices` (a superset of `self.indices`).
    fn compact_over(&self, indices: &[Index]) -> DMatrix<C64> {
        let n = indices.len();
        self.widen(indices) - DMatrix::<C64>::identity(n, n) * self.scalar
    }
}

/// `Σ_k λ_k ξ_k ξ_k^*` over `indices`.
fn density_matrix(t: &TraceClassOperator, indices: &[Index]) -> DMatrix<C64> {
    let n = indices.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (w, xi) in t.eigenpairs() {
        let v = DVector::from_iterator(n, indices.iter().map(|&i| xi.component(i)));
        m += (&v * v.adjoint()) * C64::new(*w, 0.0);
    }
    m
}

fn density_indices(t: &TraceClassOperator) -> Vec<Index> {
    t.eigenpairs()
        .iter()
        .flat_map(|(_, xi)| xi.components().map(|(i, _)| i).collect::<Vec<_>>())
        .collect()
}

/// `ι_j(A)` assembled entry by entry over `{#, j}`.
pub fn dense_embed(j: Site, x: &TestAlgebraElement) -> DenseElement {
    let indices = vec![Index::Vacuum, Index::Site(j)];
    let matrix = DMatrix::from_row_slice(2, 2, &[x.a, x.b, x.c, x.d]);
    DenseElement { indices, matrix, scalar: x.beta }
}

pub fn dense_mul(x: &BooleanElement, y: &BooleanElement) -> BooleanElement {
    DenseElement::from_sparse(x, &[]).mul(&DenseElement::from_sparse(y, &[])).to_sparse()
}

pub fn dense_add(x: &BooleanElement, y: &BooleanElement) -> BooleanElement {
    DenseElement::from_sparse(x, &[]).add(&DenseElement::from_sparse(y, &[])).to_sparse()
}

pub fn dense_adjoint(x: &BooleanElement) -> BooleanElement {
    DenseElement::from_sparse(x, &[]).adjoint().to_sparse()
}

pub fn dense_apply(x: &BooleanElement, v: &FockVector) -> FockVector {
    DenseElement::from_sparse(x, &[]).apply(v)
}

/// `γ Tr(T_S A_S) + a` with `S` covering both supports.
pub fn dense_evaluate(state: &BooleanState, x: &BooleanElement) -> C64 {
    if state.gamma() == 0.0 {
        return x.scalar();
    }
    let d = DenseElement::from_sparse(x, &density_indices(state.density()));
    let t = density_matrix(state.density(), &d.indices);
    let a = d.compact_over(&d.indices);
    (t * a).trace() * state.gamma() + d.scalar
}

pub fn dense_word(word: &[(Site, TestAlgebraElement)]) -> BooleanElement {
    word.iter()
        .map(|(j, x)| dense_embed(*j, x))
        .reduce(|acc, e| acc.mul(&e))
        .map(|d| d.to_sparse())
        .unwrap_or_else(BooleanElement::identity)
}

pub fn dense_moment(state: &BooleanState, word: &[(Site, TestAlgebraElement)]) -> Result<C64> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(dense_evaluate(state, &dense_word(word)))
}

/// `x = ⟨M e_#, e_#⟩`, `y = φ(P_#^⊥ M P_#^⊥)` with `P_#^⊥` as a dense projector.
pub fn dense_cond_expect(phi: &PhiState, x: &BooleanElement) -> TailElement {
    let extra = match phi {
        PhiState::Normal(s) => density_indices(s),
        PhiState::Singular => Vec::new(),
    };
    let d = DenseElement::from_sparse(x, &extra);
    let n = d.indices.len();
    let vac = d.indices.binary_search(&Index::Vacuum).expect("vacuum always present");
    let top = d.matrix[(vac, vac)];
    let mut perp = DMatrix::<C64>::identity(n, n);
    perp[(vac, vac)] = C64::default();
    let corner = &perp * d.compact_over(&d.indices) * &perp;
    let bottom = match phi {
        PhiState::Singular => d.scalar,
        PhiState::Normal(s) => (density_matrix(s, &d.indices) * corner).trace() + d.scalar,
    };
    TailElement::new(top, bottom)
}

/// The oracle as a drop-in [`Kernel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseKernel;

impl Kernel for DenseKernel {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn mul(&self, x: &BooleanElement, y: &BooleanElement) -> BooleanElement {
        dense_mul(x, y)
    }

    fn evaluate(&self, state: &BooleanState, x: &BooleanElement) -> C64 {
        dense_evaluate(state, x)
    }

    fn cond_expect(&self, phi: &PhiState, x: &BooleanElement) -> TailElement {
        dense_cond_expect(phi, x)
    }

    fn word(&self, word: &[(Site, TestAlgebraElement)]) -> BooleanElement {
        dense_word(word)
    }
}
