//! Why `G(a)` is not the multiplication group of a proper loop.
//!
//! If `G` were `Mult(L)` with `Inn(L) = H_i`, the normalizer of `Inn(L)`
//! would be `Inn(L) × Z(Mult(L))`. The center of `G` is trivial, so the
//! normalizer would be `H_i` itself, while it is the 3-dimensional `G'`.
//! The certificate collects the sampled evidence for both facts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{central_defect, standard_probes, AlgebraVector, StructureConstants};
use crate::error::Result;
use crate::group::{GroupElement, GroupParam, ELEMENT_TOL};
use crate::sampling::Sampler;
use crate::subgroups::{subgroup_element, SubgroupId};

/// Whether `g` normalizes the one-parameter subgroup `sub`: the conjugate
/// of `subgroup_element(sub, 1)` is tested against the defining relations.
pub fn normalizes(p: GroupParam, g: &GroupElement, sub: SubgroupId) -> Result<bool> {
    sub.check(p)?;
    let s = subgroup_element(sub, 1.0);
    Ok(sub.contains(&p.conjugate(g, &s), ELEMENT_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Config {
    /// Samples per slab (inside and outside `G'`).
    pub samples: usize,
    pub half_width: f64,
    /// Lower bound on `|x4|` for samples outside `G'`.
    pub min_abs_x4: f64,
    /// Random algebra directions tested for centrality.
    pub directions: usize,
    pub seed: u64,
}

impl Theorem2Config {
    pub fn new(samples: usize, seed: u64) -> Self {
        Theorem2Config {
            samples,
            half_width: 5.0,
            min_abs_x4: 1e-3,
            directions: 100,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizerRecord {
    pub subgroup: SubgroupId,
    /// Samples with `x4 = 0`, and how many normalize.
    pub slab_samples: usize,
    pub slab_normalizing: usize,
    /// Samples with `|x4| >= min_abs_x4`, and how many normalize.
    pub off_samples: usize,
    pub off_normalizing: usize,
    /// Sampled surrogate: 3 when exactly the `x4 = 0` slab normalizes.
    pub normalizer_dim_estimate: Option<u8>,
    pub normalizer_equals_commutator: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub direction: String,
    pub defect: f64,
}

pub const CENTER_DEFECT_MIN: f64 = 1e-9;

pub const HYPOTHESIS: &str = "assumes Inn(L) = H_i whenever G = Mult(L) for a loop L = G/H_i; \
     with that, Lemma 2 forces N_G(H_i) = H_i x Z(G) = H_i, contradicting N_G(H_i) = G'";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Certificate {
    pub a: f64,
    pub seed: u64,
    pub records: Vec<NormalizerRecord>,
    pub center: Vec<CenterRecord>,
    pub random_directions: usize,
    pub min_random_defect: f64,
    pub center_dimension: usize,
    pub center_trivial: bool,
    pub contradiction: bool,
    pub hypothesis: String,
}

fn label(v: AlgebraVector) -> String {
    let terms: Vec<String> = v
        .to_array()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| {
            if *c == 1.0 {
                format!("e{}", i + 1)
            } else {
                format!("{c}*e{}", i + 1)
            }
        })
        .collect();
    terms.join("+")
}

pub fn theorem2_certificate(p: GroupParam, cfg: &Theorem2Config) -> Theorem2Certificate {
    let mut sampler = Sampler::new(cfg.seed);
    let slab: Vec<GroupElement> = (0..cfg.samples)
        .map(|_| {
            let mut g = sampler.element(cfg.half_width);
            g.x4 = 0.0;
            g
        })
        .collect();
    let off: Vec<GroupElement> = (0..cfg.samples)
        .map(|_| sampler.element_off_commutator(cfg.half_width, cfg.min_abs_x4))
        .collect();
    let directions: Vec<AlgebraVector> = (0..cfg.directions)
        .map(|_| {
            let v = AlgebraVector::from_array([(); 4].map(|_| sampler.uniform(-1.0, 1.0)));
            v * (1.0 / v.norm())
        })
        .collect();

    let count = |gs: &[GroupElement], sub: SubgroupId| {
        gs.par_iter()
            .filter(|g| normalizes(p, g, sub).expect("admissible subgroup"))
            .count()
    };
    let records: Vec<NormalizerRecord> = SubgroupId::stabilizers(p)
        .into_iter()
        .map(|sub| {
            let slab_normalizing = count(&slab, sub);
            let off_normalizing = count(&off, sub);
            let equals = slab_normalizing == slab.len() && off_normalizing == 0;
            NormalizerRecord {
                subgroup: sub,
                slab_samples: slab.len(),
                slab_normalizing,
                off_samples: off.len(),
                off_normalizing,
                normalizer_dim_estimate: equals.then_some(3),
                normalizer_equals_commutator: equals,
            }
        })
        .collect();

    let probes = standard_probes(p);
    let basis = [
        AlgebraVector::E1,
        AlgebraVector::E2,
        AlgebraVector::E3,
        AlgebraVector::E4,
        AlgebraVector::E2 + AlgebraVector::E3,
    ];
    let center: Vec<CenterRecord> = basis
        .iter()
        .map(|&v| CenterRecord {
            direction: label(v),
            defect: central_defect(p, v, &probes),
        })
        .collect();
    let min_random_defect = directions
        .par_iter()
        .map(|&v| central_defect(p, v, &probes))
        .reduce(|| f64::INFINITY, f64::min);
    let center_dimension = StructureConstants::new(p).center_dimension();
    let center_trivial = center_dimension == 0
        && center.iter().all(|c| c.defect > CENTER_DEFECT_MIN)
        && (directions.is_empty() || min_random_defect > CENTER_DEFECT_MIN);

    let contradiction = center_trivial
        && !records.is_empty()
        && records.iter().all(|r| r.normalizer_equals_commutator);
    Theorem2Certificate {
        a: p.a(),
        seed: cfg.seed,
        records,
        center,
        random_directions: directions.len(),
        min_random_defect,
        center_dimension,
        center_trivial,
        contradiction,
        hypothesis: HYPOTHESIS.to_string(),
    }
}
