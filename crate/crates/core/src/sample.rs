//! Seeded random generators for elements, words, permutations and states.
//!
//! Amplitudes are uniform on `[−1, 1] + i[−1, 1]`. All generators take an
//! explicit RNG so that a run is reproduced by its seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BooleanElement, FockVector, Index, Site};
use crate::fock::{FinitePermutation, TestAlgebraElement};
use crate::states::{BooleanState, TraceClassOperator};
use crate::tail::{counterexample_ratio, vacuum_defect, TailElement};
use crate::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th independent stream derived from `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn test_element<R: Rng>(rng: &mut R) -> TestAlgebraElement {
    TestAlgebraElement::new(complex(rng), complex(rng), complex(rng), complex(rng), complex(rng))
}

pub fn tail_element<R: Rng>(rng: &mut R) -> TailElement {
    TailElement::new(complex(rng), complex(rng))
}

/// Sites `1..=n`.
pub fn site_pool(n: u32) -> Vec<Site> {
    (1..=n).map(Site::new).collect()
}

pub fn site<R: Rng>(rng: &mut R, pool: &[Site]) -> Site {
    *pool.choose(rng).expect("non-empty site pool")
}

/// A uniformly random permutation of `pool`.
pub fn permutation<R: Rng>(rng: &mut R, pool: &[Site]) -> FinitePermutation {
    let mut images = pool.to_vec();
    images.shuffle(rng);
    FinitePermutation::from_images(pool, &images).expect("shuffle of the pool")
}

/// One letter `(j, A)` of a process word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Letter {
    pub site: Site,
    #[serde(rename = "A")]
    pub element: TestAlgebraElement,
}

pub fn word<R: Rng>(rng: &mut R, pool: &[Site], max_len: usize) -> Vec<(Site, TestAlgebraElement)> {
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len).map(|_| (site(rng, pool), test_element(rng))).collect()
}

/// Random element with `nnz` entries on `{#} ∪ sites` and a random scalar.
pub fn element<R: Rng>(rng: &mut R, sites: &[Site], nnz: usize) -> BooleanElement {
    let mut indices = vec![Index::Vacuum];
    indices.extend(sites.iter().copied().map(Index::Site));
    let entries: Vec<_> = (0..nnz)
        .map(|_| {
            let m = *indices.choose(rng).unwrap();
            let n = *indices.choose(rng).unwrap();
            ((m, n), complex(rng))
        })
        .collect();
    BooleanElement::from_entries(entries, complex(rng))
}

/// A one-particle vector with `support` random sites out of `pool`.
pub fn wave<R: Rng>(rng: &mut R, pool: &[Site], support: usize) -> FockVector {
    let chosen: Vec<Site> = pool.choose_multiple(rng, support.min(pool.len())).copied().collect();
    FockVector::wave(chosen.into_iter().map(|s| (s, complex(rng))))
}

pub fn fock_vector<R: Rng>(rng: &mut R, pool: &[Site], support: usize) -> FockVector {
    wave(rng, pool, support).add(&FockVector::vacuum().scale(complex(rng)))
}

/// `k` orthonormal vectors supported on `indices` (modified Gram-Schmidt on
/// random vectors; retried on near-dependence).
pub fn orthonormal<R: Rng>(rng: &mut R, indices: &[Index], k: usize) -> Vec<FockVector> {
    assert!(k <= indices.len(), "cannot fit {k} orthonormal vectors in {} dimensions", indices.len());
    let mut basis: Vec<FockVector> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v = FockVector::from_components(indices.iter().map(|&i| (i, complex(rng))));
        for u in &basis {
            v = v.sub(&u.scale(v.inner(u)));
        }
        let n = v.norm();
        if n < 1e-3 {
            continue;
        }
        basis.push(v.scale(C64::new(1.0 / n, 0.0)));
    }
    basis
}

/// `k` positive weights summing to one, each at least `0.05 / k`.
pub fn weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn assemble(weights: Vec<f64>, vectors: Vec<FockVector>) -> TraceClassOperator {
    TraceClassOperator::new(weights.into_iter().zip(vectors).collect()).expect("generated density is valid")
}

fn site_indices(pool: &[Site]) -> Vec<Index> {
    pool.iter().copied().map(Index::Site).collect()
}

/// Density of rank `rank` supported on the sites of `pool` only.
pub fn site_density<R: Rng>(rng: &mut R, pool: &[Site], rank: usize) -> TraceClassOperator {
    let rank = rank.clamp(1, pool.len());
    assemble(weights(rng, rank), orthonormal(rng, &site_indices(pool), rank))
}

/// Density with `e_#` as an eigenvector and `T ≠ P_#`: either a vacuum
/// eigenpair plus `rank − 1` site vectors, or `rank` site vectors only.
pub fn expected_density<R: Rng>(rng: &mut R, pool: &[Site], rank: usize) -> TraceClassOperator {
    let rank = rank.max(1);
    let with_vacuum = rank >= 2 && rng.gen_bool(0.5);
    let site_rank = if with_vacuum { rank - 1 } else { rank };
    let mut vectors = orthonormal(rng, &site_indices(pool), site_rank);
    if with_vacuum {
        vectors.insert(0, FockVector::vacuum().scale(C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))));
    }
    assemble(weights(rng, rank), vectors)
}

/// Density for which `e_#` is not an eigenvector, with margin: the vacuum
/// defect exceeds `1e-3` and the counterexample ratio stays below `1 − 1e-6`.
pub fn non_expected_density<R: Rng>(rng: &mut R, pool: &[Site], rank: usize) -> TraceClassOperator {
    let mut indices = vec![Index::Vacuum];
    indices.extend(site_indices(pool));
    loop {
        let t = assemble(weights(rng, rank.max(1)), orthonormal(rng, &indices, rank.max(1)));
        if vacuum_defect(&t) < 1e-3 {
            continue;
        }
        match counterexample_ratio(&t) {
            Ok(ce) if ce.ratio < 1.0 - 1e-6 => return t,
            _ => continue,
        }
    }
}

/// Which branch of the classification a generated state is meant to hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// `T = P_#`.
    Symmetric,
    /// `e_#` an eigenvector of `T ≠ P_#`.
    ExpectedNonSymmetric,
    /// `e_#` not an eigenvector of `T`.
    NonExpected,
}

impl Stratum {
    pub const ALL: [Stratum; 3] = [Stratum::Symmetric, Stratum::ExpectedNonSymmetric, Stratum::NonExpected];
}

pub fn density<R: Rng>(rng: &mut R, stratum: Stratum, pool: &[Site], rank: usize) -> TraceClassOperator {
    match stratum {
        Stratum::Symmetric => TraceClassOperator::vacuum_projector(),
        Stratum::ExpectedNonSymmetric => expected_density(rng, pool, rank),
        Stratum::NonExpected => non_expected_density(rng, pool, rank),
    }
}

/// Mixing weight choice for generated states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaChoice {
    Zero,
    /// Uniform in `[0.1, 0.9]`.
    Interior,
    One,
}

impl GammaChoice {
    pub const ALL: [GammaChoice; 3] = [GammaChoice::One, GammaChoice::Interior, GammaChoice::Zero];

    pub fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            GammaChoice::Zero => 0.0,
            GammaChoice::Interior => rng.gen_range(0.1..=0.9),
            GammaChoice::One => 1.0,
        }
    }
}

pub fn state<R: Rng>(rng: &mut R, stratum: Stratum, gamma: GammaChoice, pool: &[Site], max_rank: usize) -> BooleanState {
    let rank = rng.gen_range(1..=max_rank.max(1));
    let t = density(rng, stratum, pool, rank);
    BooleanState::new(gamma.draw(rng), t).expect("gamma in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::is_expected;

    #[test]
    fn strata_hit_their_branch() {
        let mut r = rng(11);
        let pool = site_pool(8);
        for rank in 1..=6 {
            for _ in 0..20 {
                let t = expected_density(&mut r, &pool, rank);
                assert!(is_expected(&t));
                assert_eq!(t.rank(), rank);
                assert!(t.vacuum_weight() < 1.0 - 1e-6);
                let t = non_expected_density(&mut r, &pool, rank);
                assert!(!is_expected(&t));
                assert_eq!(t.rank(), rank);
            }
        }
    }

    #[test]
    fn same_seed_same_state() {
        let pool = site_pool(8);
        let a = state(&mut rng(5), Stratum::NonExpected, GammaChoice::Interior, &pool, 4);
        let b = state(&mut rng(5), Stratum::NonExpected, GammaChoice::Interior, &pool, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn stream_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| stream_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
