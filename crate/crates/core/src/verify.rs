//! Randomized checkers for the process-level definitions: exchangeability,
//! conditional independence and identical distribution with respect to the
//! tail algebra, the n-fold factorization, and the De Finetti
//! classification of a state.
//!
//! Every checker is generic over a [`Kernel`], so the same sampling plan can
//! be replayed against the dense oracle in [`crate::dense`]. A failing
//! equality keeps the first offending sample as a [`Witness`], which
//! serializes to JSON and can be recomputed later with [`Witness::recompute`].

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BooleanElement, FockVector, Index, Site};
use crate::error::Result;
use crate::fock::{annihilator, creator, embed, FinitePermutation, TestAlgebraElement};
use crate::sample::{self, Letter};
use crate::states::{word_product, BooleanState, TraceClassOperator};
use crate::tail::{
    self, counterexample_ratio, is_expected, phi_sites, preserving_phi, Counterexample, PhiState,
    TailElement,
};
use crate::{C64, CHECK_TOLERANCE};

/// The operations the checkers route through.
pub trait Kernel: Sync {
    fn name(&self) -> &'static str;
    fn mul(&self, x: &BooleanElement, y: &BooleanElement) -> BooleanElement;
    fn evaluate(&self, state: &BooleanState, x: &BooleanElement) -> C64;
    fn cond_expect(&self, phi: &PhiState, x: &BooleanElement) -> TailElement;
    /// `ι_{j_1}(A_1) ⋯ ι_{j_n}(A_n)`, the identity for an empty word.
    fn word(&self, word: &[(Site, TestAlgebraElement)]) -> BooleanElement;

    fn moment(&self, state: &BooleanState, word: &[(Site, TestAlgebraElement)]) -> Result<C64> {
        if word.is_empty() {
            return Err(crate::Error::EmptyWord);
        }
        Ok(self.evaluate(state, &self.word(word)))
    }
}

/// The sparse kernel of this crate.
#[derive(Debug, Clone, Copy, Default)]
pub struct SparseKernel;

impl Kernel for SparseKernel {
    fn name(&self) -> &'static str {
        "sparse"
    }

    fn mul(&self, x: &BooleanElement, y: &BooleanElement) -> BooleanElement {
        x.mul(y)
    }

    fn evaluate(&self, state: &BooleanState, x: &BooleanElement) -> C64 {
        state.evaluate(x)
    }

    fn cond_expect(&self, phi: &PhiState, x: &BooleanElement) -> TailElement {
        tail::cond_expect(phi, x)
    }

    fn word(&self, word: &[(Site, TestAlgebraElement)]) -> BooleanElement {
        word_product(word)
    }
}

/// First failing sample of a check, with every input needed to recompute it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Exchangeability {
        state: BooleanState,
        word: Vec<Letter>,
        permutation: FinitePermutation,
        deviation: f64,
    },
    IdenticalDistribution {
        /// `None` stands for the trivial tail `ℂ` with `E = ω_∞`.
        phi: Option<PhiState>,
        #[serde(rename = "A")]
        element: TestAlgebraElement,
        i: Site,
        k: Site,
        deviation: f64,
    },
    Factorization {
        state: BooleanState,
        phi: Option<PhiState>,
        factors: Vec<BooleanElement>,
        deviation: f64,
    },
    Preservation {
        state: BooleanState,
        phi: Option<PhiState>,
        element: BooleanElement,
        deviation: f64,
    },
    Counterexample {
        density: TraceClassOperator,
        phi: PhiState,
        deviation: f64,
    },
    BooleanRelation {
        f: FockVector,
        g: FockVector,
        deviation: f64,
    },
    MatrixUnit {
        row: Index,
        col: Index,
        deviation: f64,
    },
    Embedding {
        site: Site,
        first: TestAlgebraElement,
        second: TestAlgebraElement,
        deviation: f64,
    },
}

impl Witness {
    /// Deviation recorded when the witness was produced.
    pub fn deviation(&self) -> f64 {
        match self {
            Witness::Exchangeability { deviation, .. }
            | Witness::IdenticalDistribution { deviation, .. }
            | Witness::Factorization { deviation, .. }
            | Witness::Preservation { deviation, .. }
            | Witness::Counterexample { deviation, .. }
            | Witness::BooleanRelation { deviation, .. }
            | Witness::MatrixUnit { deviation, .. }
            | Witness::Embedding { deviation, .. } => *deviation,
        }
    }

    /// Recomputes the deviation from the recorded inputs with the sparse kernel.
    pub fn recompute(&self) -> Result<f64> {
        let k = SparseKernel;
        Ok(match self {
            Witness::Exchangeability { state, word, permutation, .. } => {
                let w: Vec<_> = word.iter().map(|l| (l.site, l.element)).collect();
                exchange_deviation(&k, state, &w, permutation)?
            }
            Witness::IdenticalDistribution { phi, element, i, k: other, .. } => {
                let cond = Conditioning::from_option(phi.as_ref());
                identical_deviation(&k, &cond, element, *i, *other)
            }
            Witness::Factorization { state, phi, factors, .. } => {
                let cond = Conditioning::from_option(phi.as_ref());
                let lines = telescoping_lines(&k, state, &cond, factors);
                (lines[0] - lines[lines.len() - 1]).norm()
            }
            Witness::Preservation { state, phi, element, .. } => {
                let cond = Conditioning::from_option(phi.as_ref());
                preservation_deviation(&k, state, &cond, element)
            }
            Witness::Counterexample { density, phi, .. } => {
                let ce = counterexample_ratio(density)?;
                ratio_deviation(&k, density, &ce, phi)
            }
            Witness::BooleanRelation { f, g, .. } => relation_deviation(&k, f, g)?,
            Witness::MatrixUnit { row, col, .. } => matrix_unit_deviation(&k, *row, *col),
            Witness::Embedding { site, first, second, .. } => embedding_deviation(&k, *site, first, second),
        })
    }
}

/// Outcome of one checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub samples_run: usize,
    pub witness: Option<Witness>,
}

/// Running max-deviation and first-witness accumulator.
struct Tally {
    name: &'static str,
    tolerance: f64,
    max_deviation: f64,
    samples: usize,
    witness: Option<Witness>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, max_deviation: 0.0, samples: 0, witness: None }
    }

    fn record(&mut self, deviation: f64, witness: impl FnOnce() -> Witness) {
        self.samples += 1;
        let failed = deviation.is_nan() || deviation > self.tolerance;
        if failed || deviation > self.max_deviation {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation.max(self.max_deviation) };
        }
        if failed && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name.to_string(),
            passed: self.witness.is_none(),
            max_deviation: self.max_deviation,
            samples_run: self.samples,
            witness: self.witness,
        }
    }
}

/// The conditional expectation a check conditions on.
#[derive(Debug, Clone)]
enum Conditioning<'a> {
    Phi(&'a PhiState),
    /// Tail algebra `ℂ`, `E = ω_∞`; the `γ = 0` case.
    Trivial,
}

impl<'a> Conditioning<'a> {
    fn from_option(phi: Option<&'a PhiState>) -> Self {
        phi.map_or(Conditioning::Trivial, Conditioning::Phi)
    }

    fn apply<K: Kernel>(&self, k: &K, x: &BooleanElement) -> TailElement {
        match self {
            Conditioning::Phi(phi) => k.cond_expect(phi, x),
            Conditioning::Trivial => TailElement::scalar(x.scalar()),
        }
    }

    fn phi(&self) -> Option<PhiState> {
        match self {
            Conditioning::Phi(p) => Some((*p).clone()),
            Conditioning::Trivial => None,
        }
    }
}

fn permute_word(g: &FinitePermutation, word: &[(Site, TestAlgebraElement)]) -> Vec<(Site, TestAlgebraElement)> {
    word.iter().map(|(j, a)| (g.apply(*j), *a)).collect()
}

fn exchange_deviation<K: Kernel>(
    k: &K,
    state: &BooleanState,
    word: &[(Site, TestAlgebraElement)],
    g: &FinitePermutation,
) -> Result<f64> {
    let lhs = k.moment(state, word)?;
    let rhs = k.moment(state, &permute_word(g, word))?;
    Ok((lhs - rhs).norm())
}

fn identical_deviation<K: Kernel>(k: &K, cond: &Conditioning, a: &TestAlgebraElement, i: Site, j: Site) -> f64 {
    let lhs = cond.apply(k, &k.word(&[(i, *a)]));
    let rhs = cond.apply(k, &k.word(&[(j, *a)]));
    lhs.max_abs_diff(&rhs)
}

fn evaluate_tail<K: Kernel>(k: &K, state: &BooleanState, z: &TailElement) -> C64 {
    k.evaluate(state, &z.to_element())
}

fn product<K: Kernel>(k: &K, xs: &[BooleanElement]) -> BooleanElement {
    xs.iter().fold(BooleanElement::identity(), |acc, x| k.mul(&acc, x))
}

/// The successive quantities of the telescoping argument for
/// `ω(X_1 ⋯ X_n) = ω(E(X_1) ⋯ E(X_n))`, first and last included.
///
/// With `P_m = E(X_1) ⋯ E(X_m)` and `R_m = X_{m+1} ⋯ X_n` the chain is
/// `ω(X_1 ⋯ X_n)`, then for each `m = 1, …, n − 1`:
/// `ω(E(P_{m−1} R_{m−1}))` (skipped for `m = 1`), `ω(E(P_{m−1} X_m) E(R_m))`,
/// and `ω(P_m E(R_m))` (skipped for `m = 1`, where it repeats the previous line).
fn telescoping_lines<K: Kernel>(
    k: &K,
    state: &BooleanState,
    cond: &Conditioning,
    factors: &[BooleanElement],
) -> Vec<C64> {
    let n = factors.len();
    let mut lines = vec![k.evaluate(state, &product(k, factors))];
    if n < 2 {
        if n == 1 {
            lines.push(evaluate_tail(k, state, &cond.apply(k, &factors[0])));
        }
        return lines;
    }
    let mut prefix = TailElement::unit();
    for m in 0..n - 1 {
        let rest = product(k, &factors[m + 1..]);
        let e_rest = cond.apply(k, &rest);
        if m > 0 {
            let whole = k.mul(&k.mul(&prefix.to_element(), &factors[m]), &rest);
            lines.push(evaluate_tail(k, state, &cond.apply(k, &whole)));
        }
        let head = cond.apply(k, &k.mul(&prefix.to_element(), &factors[m]));
        lines.push(evaluate_tail(k, state, &head.mul(&e_rest)));
        prefix = prefix.mul(&cond.apply(k, &factors[m]));
        if m > 0 {
            lines.push(evaluate_tail(k, state, &prefix.mul(&e_rest)));
        }
    }
    lines
}

fn preservation_deviation<K: Kernel>(k: &K, state: &BooleanState, cond: &Conditioning, x: &BooleanElement) -> f64 {
    (evaluate_tail(k, state, &cond.apply(k, x)) - k.evaluate(state, x)).norm()
}

fn ratio_deviation<K: Kernel>(k: &K, t: &TraceClassOperator, ce: &Counterexample, phi: &PhiState) -> f64 {
    let psi = BooleanState::normal(t.clone());
    let lhs = evaluate_tail(k, &psi, &k.cond_expect(phi, &ce.witness));
    let rhs = k.evaluate(&psi, &ce.witness) * ce.ratio;
    (lhs - rhs).norm()
}

fn relation_deviation<K: Kernel>(k: &K, f: &FockVector, g: &FockVector) -> Result<f64> {
    // b(f) b†(g) = ⟨g, f⟩ ε_{##}
    let lhs = k.mul(&annihilator(f)?, &creator(g)?);
    let rhs = BooleanElement::vacuum_projection().scale(g.inner(f));
    let mut dev = lhs.max_abs_diff(&rhs);
    // b†(f) b(g) = ⟨·, 0 ⊕ g⟩ 0 ⊕ f, checked column by column
    let op = k.mul(&creator(f)?, &annihilator(g)?);
    let basis: BTreeSet<Index> = std::iter::once(Index::Vacuum)
        .chain(f.components().map(|(i, _)| i))
        .chain(g.components().map(|(i, _)| i))
        .collect();
    for i in basis {
        let e = FockVector::basis(i);
        let expected = f.scale(e.inner(g));
        dev = dev.max(op.apply(&e).max_abs_diff(&expected));
    }
    Ok(dev)
}

fn matrix_unit_deviation<K: Kernel>(k: &K, row: Index, col: Index) -> f64 {
    use crate::fock::{annihilator_at, creator_at};
    let eps = BooleanElement::matrix_unit;
    match (row, col) {
        // ε_{##} = b_i b†_i
        (Index::Vacuum, Index::Site(i)) => k.mul(&annihilator_at(i), &creator_at(i)).max_abs_diff(&eps(row, row)),
        // ε_{ij} = b†_i b_j
        (Index::Site(i), Index::Site(j)) => k.mul(&creator_at(i), &annihilator_at(j)).max_abs_diff(&eps(row, col)),
        _ => 0.0,
    }
}

fn embedding_deviation<K: Kernel>(k: &K, j: Site, x: &TestAlgebraElement, y: &TestAlgebraElement) -> f64 {
    let prod = k.mul(&embed(j, x), &embed(j, y));
    let dev = prod.max_abs_diff(&embed(j, &x.compose(y)));
    let unital = embed(j, &TestAlgebraElement::unit()).max_abs_diff(&BooleanElement::identity());
    let star = embed(j, &x.adjoint()).max_abs_diff(&embed(j, x).adjoint());
    dev.max(unital).max(star)
}

/// Sites drawn by the checkers for `state`: `1..=8`, extended so that at
/// least two sites lie beyond every site the state or `φ` touches.
pub fn site_pool_for(state: &BooleanState, phi: Option<&PhiState>) -> Vec<Site> {
    let mut top = 0;
    if state.gamma() > 0.0 {
        top = state.density().sites().iter().map(|s| s.get()).max().unwrap_or(0);
    }
    if let Some(p) = phi {
        top = top.max(phi_sites(p).iter().map(|s| s.get()).max().unwrap_or(0));
    }
    sample::site_pool(8.max(top + 2))
}

/// Elements of `(⋁_{i ∈ I} ι_i(𝔄)) ∨ 𝔷^⊥` for a block `I`: the generic form
/// `ω_#(A) P_# + P_# A P_I + P_I A P_# + P_I A P_I + a P_{ℕ∖I}`, a word in
/// the embeddings interleaved with tail elements, or a pure tail element.
fn block_element<R: Rng>(rng: &mut R, block: &[Site], form: usize) -> BooleanElement {
    match form % 3 {
        0 => {
            let mut indices = vec![Index::Vacuum];
            indices.extend(block.iter().copied().map(Index::Site));
            let a = sample::complex(rng);
            let mut entries = Vec::new();
            for &m in &indices {
                for &n in &indices {
                    entries.push(((m, n), sample::complex(rng)));
                }
                entries.push(((m, m), -a));
            }
            BooleanElement::from_entries(entries, a)
        }
        1 => {
            let len = rng.gen_range(1..=3);
            let mut x = sample::tail_element(rng).to_element();
            for _ in 0..len {
                let j = sample::site(rng, block);
                x = x.mul(&embed(j, &sample::test_element(rng)));
                x = x.mul(&sample::tail_element(rng).to_element());
            }
            x
        }
        _ => sample::tail_element(rng).to_element(),
    }
}

/// Pairwise-disjoint random blocks of sizes `1..=max_block` from `pool`.
fn disjoint_blocks<R: Rng>(rng: &mut R, pool: &[Site], count: usize, max_block: usize) -> Vec<Vec<Site>> {
    let mut shuffled = pool.to_vec();
    shuffled.shuffle(rng);
    let mut blocks = Vec::with_capacity(count);
    let mut cursor = 0;
    for b in 0..count {
        let remaining_blocks = count - b - 1;
        let room = shuffled.len() - cursor - remaining_blocks;
        let size = rng.gen_range(1..=max_block.min(room).max(1));
        blocks.push(shuffled[cursor..cursor + size].to_vec());
        cursor += size;
    }
    blocks
}

/// n-fold factorization outcome with the deviation of each telescoping step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub report: CheckReport,
    /// `step_deviations[s]` is the largest `|line_s − line_{s+1}|` over all samples.
    pub step_deviations: Vec<f64>,
}

/// The De Finetti classification of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub symmetric: bool,
    pub expected: bool,
    pub iid: bool,
    /// `symmetric ⟺ iid`.
    pub consistent: bool,
    pub gamma: f64,
    pub rank: usize,
    /// Largest deviation among the checks that passed.
    pub max_deviation: f64,
    pub counterexample: Option<Counterexample>,
    pub reports: Vec<CheckReport>,
}

/// Checker configuration plus the kernel the checks run on.
#[derive(Debug, Clone)]
pub struct Verifier<K: Kernel = SparseKernel> {
    pub kernel: K,
    pub tolerance: f64,
    /// Words per exchangeability check inside [`Verifier::classify_definetti`].
    pub n_words: usize,
    pub max_word_len: usize,
    /// Samples per independence and preservation check.
    pub n_samples: usize,
}

impl Default for Verifier<SparseKernel> {
    fn default() -> Self {
        Self::new()
    }
}

impl Verifier<SparseKernel> {
    pub fn new() -> Self {
        Self::with_kernel(SparseKernel)
    }
}

impl<K: Kernel> Verifier<K> {
    pub fn with_kernel(kernel: K) -> Self {
        Self { kernel, tolerance: CHECK_TOLERANCE, n_words: 200, max_word_len: 5, n_samples: 100 }
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn words(mut self, n_words: usize, max_word_len: usize) -> Self {
        self.n_words = n_words;
        self.max_word_len = max_word_len;
        self
    }

    pub fn samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    /// Moments against permuted moments on random words and permutations.
    pub fn check_exchangeable(&self, state: &BooleanState, n_words: usize, max_len: usize, seed: u64) -> CheckReport {
        let mut rng = sample::rng(seed);
        let pool = site_pool_for(state, None);
        let mut tally = Tally::new("exchangeable", self.tolerance);
        for _ in 0..n_words {
            let word = sample::word(&mut rng, &pool, max_len);
            let g = sample::permutation(&mut rng, &pool);
            let dev = exchange_deviation(&self.kernel, state, &word, &g).unwrap_or(f64::INFINITY);
            tally.record(dev, || Witness::Exchangeability {
                state: state.clone(),
                word: word.iter().map(|&(site, element)| Letter { site, element }).collect(),
                permutation: g.clone(),
                deviation: dev,
            });
        }
        tally.finish()
    }

    /// `E_φ(ι_i(A)) = E_φ(ι_k(A))` for every sampled `A` and index pair.
    pub fn check_identically_distributed(
        &self,
        phi: &PhiState,
        sample_as: &[TestAlgebraElement],
        index_pairs: &[(Site, Site)],
    ) -> CheckReport {
        self.identically_distributed(&Conditioning::Phi(phi), sample_as, index_pairs)
    }

    fn identically_distributed(
        &self,
        cond: &Conditioning,
        sample_as: &[TestAlgebraElement],
        index_pairs: &[(Site, Site)],
    ) -> CheckReport {
        let mut tally = Tally::new("identically_distributed", self.tolerance);
        for a in sample_as {
            for &(i, k) in index_pairs {
                let dev = identical_deviation(&self.kernel, cond, a, i, k);
                tally.record(dev, || Witness::IdenticalDistribution {
                    phi: cond.phi(),
                    element: *a,
                    i,
                    k,
                    deviation: dev,
                });
            }
        }
        tally.finish()
    }

    /// `ω(XY) = ω(E(X) E(Y))` for `X`, `Y` over disjoint blocks joined with the tail.
    pub fn check_pair_independence(&self, state: &BooleanState, phi: &PhiState, n_samples: usize, seed: u64) -> CheckReport {
        self.pair_independence(state, &Conditioning::Phi(phi), n_samples, seed)
    }

    fn pair_independence(&self, state: &BooleanState, cond: &Conditioning, n_samples: usize, seed: u64) -> CheckReport {
        let mut rng = sample::rng(seed);
        let pool = site_pool_for(state, cond.phi().as_ref());
        let mut tally = Tally::new("pair_independence", self.tolerance);
        for s in 0..n_samples {
            let blocks = disjoint_blocks(&mut rng, &pool, 2, 3);
            let x = block_element(&mut rng, &blocks[0], s);
            let y = block_element(&mut rng, &blocks[1], s / 3);
            let factors = vec![x, y];
            let lines = telescoping_lines(&self.kernel, state, cond, &factors);
            let dev = (lines[0] - lines[lines.len() - 1]).norm();
            tally.record(dev, || Witness::Factorization {
                state: state.clone(),
                phi: cond.phi(),
                factors: factors.clone(),
                deviation: dev,
            });
        }
        tally.finish()
    }

    /// `ω(X_1 ⋯ X_n) = ω(E(X_1) ⋯ E(X_n))` over random pairwise-disjoint blocks,
    /// each telescoping step checked on its own.
    pub fn check_nfold_factorization(
        &self,
        state: &BooleanState,
        phi: &PhiState,
        n: usize,
        n_samples: usize,
        seed: u64,
    ) -> FactorizationReport {
        let mut rng = sample::rng(seed);
        let base = site_pool_for(state, Some(phi));
        let pool = sample::site_pool((base.len() as u32).max(3 * n as u32));
        let plans: Vec<Vec<Vec<Site>>> = (0..n_samples).map(|_| disjoint_blocks(&mut rng, &pool, n, 3)).collect();
        self.nfold(state, &Conditioning::Phi(phi), &plans, &mut rng)
    }

    /// As [`Verifier::check_nfold_factorization`] with fixed blocks.
    pub fn check_nfold_with_blocks(
        &self,
        state: &BooleanState,
        phi: &PhiState,
        blocks: &[Vec<Site>],
        n_samples: usize,
        seed: u64,
    ) -> FactorizationReport {
        let mut rng = sample::rng(seed);
        let plans = vec![blocks.to_vec(); n_samples];
        self.nfold(state, &Conditioning::Phi(phi), &plans, &mut rng)
    }

    fn nfold<R: Rng>(
        &self,
        state: &BooleanState,
        cond: &Conditioning,
        plans: &[Vec<Vec<Site>>],
        rng: &mut R,
    ) -> FactorizationReport {
        let mut tally = Tally::new("nfold_factorization", self.tolerance);
        let mut steps: Vec<f64> = Vec::new();
        for (s, blocks) in plans.iter().enumerate() {
            let factors: Vec<BooleanElement> = blocks
                .iter()
                .enumerate()
                .map(|(b, block)| block_element(rng, block, s + b))
                .collect();
            let lines = telescoping_lines(&self.kernel, state, cond, &factors);
            let step_devs: Vec<f64> = lines.windows(2).map(|w| (w[0] - w[1]).norm()).collect();
            if steps.len() < step_devs.len() {
                steps.resize(step_devs.len(), 0.0);
            }
            for (acc, d) in steps.iter_mut().zip(&step_devs) {
                *acc = acc.max(*d);
            }
            let end_to_end = (lines[0] - lines[lines.len() - 1]).norm();
            let dev = step_devs.iter().copied().fold(end_to_end, f64::max);
            tally.record(dev, || Witness::Factorization {
                state: state.clone(),
                phi: cond.phi(),
                factors: factors.clone(),
                deviation: dev,
            });
        }
        FactorizationReport { report: tally.finish(), step_deviations: steps }
    }

    /// `ω(E(X)) = ω(X)` on random elements.
    pub fn check_preservation(&self, state: &BooleanState, phi: &PhiState, n_samples: usize, seed: u64) -> CheckReport {
        self.preservation(state, &Conditioning::Phi(phi), n_samples, seed)
    }

    fn preservation(&self, state: &BooleanState, cond: &Conditioning, n_samples: usize, seed: u64) -> CheckReport {
        let mut rng = sample::rng(seed);
        let pool = site_pool_for(state, cond.phi().as_ref());
        let mut tally = Tally::new("preservation", self.tolerance);
        for s in 0..n_samples {
            let x = if s % 2 == 0 {
                let nnz = rng.gen_range(1..=12);
                sample::element(&mut rng, &pool, nnz)
            } else {
                let blocks = disjoint_blocks(&mut rng, &pool, 1, 3);
                block_element(&mut rng, &blocks[0], s / 2)
            };
            let dev = preservation_deviation(&self.kernel, state, cond, &x);
            tally.record(dev, || Witness::Preservation {
                state: state.clone(),
                phi: cond.phi(),
                element: x.clone(),
                deviation: dev,
            });
        }
        tally.finish()
    }

    /// `ψ_T(F_φ(X)) = ratio · ψ_T(X)` on the witness of [`counterexample_ratio`],
    /// for each of the given `φ`. Fails outright if `T` is expected.
    pub fn check_counterexample(&self, t: &TraceClassOperator, phis: &[PhiState]) -> (Option<Counterexample>, CheckReport) {
        let mut tally = Tally::new("counterexample", self.tolerance);
        let ce = match counterexample_ratio(t) {
            Ok(ce) => ce,
            Err(_) => {
                tally.samples = 1;
                tally.max_deviation = f64::INFINITY;
                let mut report = tally.finish();
                report.passed = false;
                return (None, report);
            }
        };
        for phi in phis {
            let dev = ratio_deviation(&self.kernel, t, &ce, phi);
            tally.record(dev, || Witness::Counterexample { density: t.clone(), phi: phi.clone(), deviation: dev });
        }
        let mut report = tally.finish();
        report.passed &= ce.ratio < 1.0 - 1e-12;
        (Some(ce), report)
    }

    /// `b(f) b†(g) = ⟨g, f⟩ ε_{##}` and `b†(f) b(g) = ⟨·, g⟩ f` on random
    /// one-particle vectors with support at most `max_support`.
    pub fn check_boolean_relations(&self, n_pairs: usize, max_support: usize, seed: u64) -> CheckReport {
        let mut rng = sample::rng(seed);
        let pool = sample::site_pool((2 * max_support.max(1)) as u32);
        let mut tally = Tally::new("boolean_relations", self.tolerance);
        for _ in 0..n_pairs {
            let (sf, sg) = (rng.gen_range(1..=max_support.max(1)), rng.gen_range(1..=max_support.max(1)));
            let f = sample::wave(&mut rng, &pool, sf);
            let g = sample::wave(&mut rng, &pool, sg);
            let dev = relation_deviation(&self.kernel, &f, &g).unwrap_or(f64::INFINITY);
            tally.record(dev, || Witness::BooleanRelation { f: f.clone(), g: g.clone(), deviation: dev });
        }
        tally.finish()
    }

    /// `ε_{##} = b_i b†_i`, `ε_{ij} = b†_i b_j` for `i, j ≤ max_site`, and the
    /// product rule `ε_{mn} ε_{pq} = δ_{np} ε_{mq}` over `{#} ∪ {1..=max_site}`.
    pub fn check_matrix_units(&self, max_site: u32) -> CheckReport {
        let mut tally = Tally::new("matrix_units", self.tolerance);
        let mut indices = vec![Index::Vacuum];
        indices.extend((1..=max_site).map(Index::site));
        for &row in &indices {
            for &col in &indices {
                if row.is_vacuum() && col.is_vacuum() {
                    continue;
                }
                let dev = matrix_unit_deviation(&self.kernel, row, col);
                tally.record(dev, || Witness::MatrixUnit { row, col, deviation: dev });
            }
        }
        let eps = BooleanElement::matrix_unit;
        for &m in &indices {
            for &n in &indices {
                for &p in &indices {
                    for &q in &indices {
                        let prod = self.kernel.mul(&eps(m, n), &eps(p, q));
                        let expected = if n == p { eps(m, q) } else { BooleanElement::zero() };
                        let dev = prod.max_abs_diff(&expected);
                        tally.record(dev, || Witness::MatrixUnit { row: m, col: q, deviation: dev });
                    }
                }
            }
        }
        tally.finish()
    }

    /// `ι_j` multiplicative, unital and *-preserving on random pairs.
    pub fn check_embedding_homomorphism(&self, n_pairs: usize, seed: u64) -> CheckReport {
        let mut rng = sample::rng(seed);
        let pool = sample::site_pool(8);
        let mut tally = Tally::new("embedding_homomorphism", self.tolerance);
        for _ in 0..n_pairs {
            let j = sample::site(&mut rng, &pool);
            let x = sample::test_element(&mut rng);
            let y = sample::test_element(&mut rng);
            let dev = embedding_deviation(&self.kernel, j, &x, &y);
            tally.record(dev, || Witness::Embedding { site: j, first: x, second: y, deviation: dev });
        }
        tally.finish()
    }

    /// Symmetric (exchangeable), expected, conditionally i.i.d., and whether
    /// `symmetric ⟺ iid`.
    ///
    /// For `0 < γ < 1` the tail-algebra questions are answered on the normal
    /// part `ψ_T`; for `γ = 0` the tail algebra is `ℂ` and `E = ω_∞`.
    pub fn classify_definetti(&self, state: &BooleanState, seed: u64) -> Classification {
        let seeds = |k: u64| sample::stream_seed(seed, k);
        let mut reports = Vec::new();

        let exch = self.check_exchangeable(state, self.n_words, self.max_word_len, seeds(0));
        let symmetric = exch.passed;
        reports.push(exch);

        let mut counterexample = None;
        let (expected, iid) = if state.gamma() == 0.0 {
            let cond = Conditioning::Trivial;
            let mut rng = sample::rng(seeds(1));
            let pool = site_pool_for(state, None);
            let (as_, pairs) = identical_distribution_plan(&mut rng, &pool);
            let checks = [
                self.preservation(state, &cond, self.n_samples, seeds(2)),
                self.identically_distributed(&cond, &as_, &pairs),
                self.pair_independence(state, &cond, self.n_samples, seeds(3)),
            ];
            let iid = checks.iter().all(|r| r.passed);
            reports.extend(checks);
            (true, iid)
        } else {
            let t = state.density();
            let psi = state.normal_part();
            if is_expected(t) {
                let phi = preserving_phi(t).expect("expected density has a preserving phi");
                let cond = Conditioning::Phi(&phi);
                let mut rng = sample::rng(seeds(1));
                let pool = site_pool_for(&psi, Some(&phi));
                let (as_, pairs) = identical_distribution_plan(&mut rng, &pool);
                let checks = [
                    self.preservation(&psi, &cond, self.n_samples, seeds(2)),
                    self.identically_distributed(&cond, &as_, &pairs),
                    self.pair_independence(&psi, &cond, self.n_samples, seeds(3)),
                ];
                let iid = checks.iter().all(|r| r.passed);
                reports.extend(checks);
                (true, iid)
            } else {
                let mut rng = sample::rng(seeds(4));
                let pool = site_pool_for(&psi, None);
                let s = sample::site_density(&mut rng, &pool, 2);
                let normal = PhiState::normal(s).expect("site density");
                let (ce, report) = self.check_counterexample(t, &[PhiState::Singular, normal]);
                counterexample = ce;
                reports.push(report);
                (false, false)
            }
        };

        let max_deviation = reports
            .iter()
            .filter(|r| r.passed)
            .map(|r| r.max_deviation)
            .fold(0.0, f64::max);
        Classification {
            symmetric,
            expected,
            iid,
            consistent: symmetric == iid,
            gamma: state.gamma(),
            rank: state.density().rank(),
            max_deviation,
            counterexample,
            reports,
        }
    }
}

/// One row of a randomized classification sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub rank: usize,
    pub symmetric: bool,
    pub expected: bool,
    pub iid: bool,
    pub consistent: bool,
    pub max_deviation: f64,
}

impl From<&Classification> for SweepRow {
    fn from(c: &Classification) -> Self {
        Self {
            gamma: c.gamma,
            rank: c.rank,
            symmetric: c.symmetric,
            expected: c.expected,
            iid: c.iid,
            consistent: c.consistent,
            max_deviation: c.max_deviation,
        }
    }
}

/// Classifies `n_states` generated states; state `i` cycles through the
/// strata with `i mod 3` and through `γ ∈ {1, (0.1, 0.9), 0}` with
/// `⌊i / 3⌋ mod 3`, and draws from its own stream of `seed`. Rows come back
/// in generation order whatever the scheduling.
pub fn sweep<K: Kernel>(verifier: &Verifier<K>, n_states: usize, max_rank: usize, seed: u64) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let pool = sample::site_pool(8.max(max_rank as u32 + 1));
    (0..n_states)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::rng(sample::stream_seed(seed, i as u64));
            let stratum = sample::Stratum::ALL[i % 3];
            let gamma = sample::GammaChoice::ALL[(i / 3) % 3];
            let state = sample::state(&mut rng, stratum, gamma, &pool, max_rank);
            SweepRow::from(&verifier.classify_definetti(&state, rng.gen()))
        })
        .collect()
}

/// A handful of random `A`s and every unordered pair of sites in `pool`.
fn identical_distribution_plan<R: Rng>(rng: &mut R, pool: &[Site]) -> (Vec<TestAlgebraElement>, Vec<(Site, Site)>) {
    let as_ = (0..6).map(|_| sample::test_element(rng)).collect();
    let mut pairs = Vec::new();
    for (n, &i) in pool.iter().enumerate() {
        for &k in &pool[n + 1..] {
            pairs.push((i, k));
        }
    }
    (as_, pairs)
}
