//! One-dimensional subgroups of `G(a)`, their coset charts, the automorphism
//! reduction of one-dimensional subalgebras, and fixed points of the
//! stabilizer `H4 = {g(0,0,0,t)}`.
//!
//! Coset charts: `H1` and `H2` use representatives `g(x,y,0,z)`, `H3` uses
//! `g(x,0,y,z)` and `H4` uses `g(x,y,w,0)`. Every element factors uniquely as
//! `embed(rep) · subgroup_element(k)`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraVector, AutomorphismParams};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParam};
use crate::loops::LoopPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupId {
    /// `{g(0,0,t,0)} = exp(t e3)`
    H1,
    /// `{g(t,0,t,0)} = exp(t (e1 + e3))`, `a ≠ 1`
    H2,
    /// `{g(t,t,0,0)} = exp(t (e1 + e2))`, `a ≠ 1`
    H3,
    /// `{g(0,0,0,t)} = exp(t e4)`, outside the commutator subgroup
    H4,
}

impl SubgroupId {
    pub const ALL: [SubgroupId; 4] = [
        SubgroupId::H1,
        SubgroupId::H2,
        SubgroupId::H3,
        SubgroupId::H4,
    ];

    pub fn is_admissible(self, p: GroupParam) -> bool {
        !matches!(self, SubgroupId::H2 | SubgroupId::H3) || !p.is_one()
    }

    pub fn check(self, p: GroupParam) -> Result<()> {
        if self.is_admissible(p) {
            Ok(())
        } else {
            Err(Error::InadmissibleSubgroup {
                sub: self,
                a: p.a(),
            })
        }
    }

    /// The subgroups inside the commutator subgroup that can serve as
    /// stabilizers for the given parameter.
    pub fn stabilizers(p: GroupParam) -> Vec<SubgroupId> {
        [SubgroupId::H1, SubgroupId::H2, SubgroupId::H3]
            .into_iter()
            .filter(|s| s.is_admissible(p))
            .collect()
    }

    pub fn canonical_generator(self) -> AlgebraVector {
        match self {
            SubgroupId::H1 => AlgebraVector::E3,
            SubgroupId::H2 => AlgebraVector::E1 + AlgebraVector::E3,
            SubgroupId::H3 => AlgebraVector::E1 + AlgebraVector::E2,
            SubgroupId::H4 => AlgebraVector::E4,
        }
    }

    /// Membership by the defining linear relations, absolute tolerance `tol`.
    pub fn contains(self, g: &GroupElement, tol: f64) -> bool {
        let zero = |v: f64| v.abs() <= tol;
        match self {
            SubgroupId::H1 => zero(g.x1) && zero(g.x2) && zero(g.x4),
            SubgroupId::H2 => zero(g.x2) && zero(g.x4) && zero(g.x1 - g.x3),
            SubgroupId::H3 => zero(g.x3) && zero(g.x4) && zero(g.x1 - g.x2),
            SubgroupId::H4 => zero(g.x1) && zero(g.x2) && zero(g.x3),
        }
    }
}

pub fn subgroup_element(sub: SubgroupId, k: f64) -> GroupElement {
    match sub {
        SubgroupId::H1 => GroupElement::new(0.0, 0.0, k, 0.0),
        SubgroupId::H2 => GroupElement::new(k, 0.0, k, 0.0),
        SubgroupId::H3 => GroupElement::new(k, k, 0.0, 0.0),
        SubgroupId::H4 => GroupElement::new(0.0, 0.0, 0.0, k),
    }
}

pub fn embed(p: GroupParam, sub: SubgroupId, m: LoopPoint) -> Result<GroupElement> {
    sub.check(p)?;
    Ok(embed_unchecked(sub, m))
}

pub(crate) fn embed_unchecked(sub: SubgroupId, m: LoopPoint) -> GroupElement {
    match sub {
        SubgroupId::H1 | SubgroupId::H2 => GroupElement::new(m.x, m.y, 0.0, m.z),
        SubgroupId::H3 => GroupElement::new(m.x, 0.0, m.y, m.z),
        SubgroupId::H4 => GroupElement::new(m.x, m.y, m.z, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompResult {
    pub rep: LoopPoint,
    pub k: f64,
}

pub fn decompose(p: GroupParam, sub: SubgroupId, g: &GroupElement) -> Result<DecompResult> {
    sub.check(p)?;
    Ok(decompose_unchecked(p, sub, g))
}

pub(crate) fn decompose_unchecked(
    p: GroupParam,
    sub: SubgroupId,
    g: &GroupElement,
) -> DecompResult {
    let shift = ((p.a() - 1.0) * g.x4).exp();
    match sub {
        SubgroupId::H1 => DecompResult {
            rep: LoopPoint::new(g.x1, g.x2 - g.x4 * g.x3, g.x4),
            k: (-g.x4).exp() * g.x3,
        },
        SubgroupId::H2 => DecompResult {
            rep: LoopPoint::new(g.x1 - shift * g.x3, g.x2 - g.x4 * g.x3, g.x4),
            k: (-g.x4).exp() * g.x3,
        },
        SubgroupId::H3 => DecompResult {
            rep: LoopPoint::new(g.x1 - shift * g.x2, g.x3, g.x4),
            k: (-g.x4).exp() * g.x2,
        },
        SubgroupId::H4 => DecompResult {
            rep: LoopPoint::new(g.x1, g.x2, g.x3),
            k: g.x4,
        },
    }
}

/// Outcome of reducing a one-dimensional subalgebra by automorphisms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SubalgebraClass {
    H1 {
        automorphism: AutomorphismParams,
    },
    H2 {
        automorphism: AutomorphismParams,
    },
    H3 {
        automorphism: AutomorphismParams,
    },
    /// The span is an ideal, so the subgroup is normal and has nontrivial core.
    NormalInadmissible,
    /// Conjugate to `H4 = exp(R e4)`; the automorphism carries the span onto `R e4`.
    NotInCommutator {
        automorphism: AutomorphismParams,
    },
}

impl SubalgebraClass {
    pub fn subgroup(&self) -> Option<SubgroupId> {
        match self {
            SubalgebraClass::H1 { .. } => Some(SubgroupId::H1),
            SubalgebraClass::H2 { .. } => Some(SubgroupId::H2),
            SubalgebraClass::H3 { .. } => Some(SubgroupId::H3),
            SubalgebraClass::NotInCommutator { .. } => Some(SubgroupId::H4),
            SubalgebraClass::NormalInadmissible => None,
        }
    }

    pub fn automorphism(&self) -> Option<AutomorphismParams> {
        match *self {
            SubalgebraClass::H1 { automorphism }
            | SubalgebraClass::H2 { automorphism }
            | SubalgebraClass::H3 { automorphism }
            | SubalgebraClass::NotInCommutator { automorphism } => Some(automorphism),
            SubalgebraClass::NormalInadmissible => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SubalgebraClass::H1 { .. } => "H1",
            SubalgebraClass::H2 { .. } => "H2",
            SubalgebraClass::H3 { .. } => "H3",
            SubalgebraClass::NormalInadmissible => "NormalInadmissible",
            SubalgebraClass::NotInCommutator { .. } => "NotInCommutator",
        }
    }
}

/// The generator `b1 e3 + b2 e1 + b3 e2` of a subalgebra of the commutator ideal.
pub fn commutator_generator(b1: f64, b2: f64, b3: f64) -> AlgebraVector {
    AlgebraVector::new(b2, b3, b1, 0.0)
}

/// Classifies `span(b1 e3 + b2 e1 + b3 e2)` up to automorphism.
///
/// Returned automorphisms use `l = 1` and carry the generator onto a nonzero
/// multiple of the canonical generator of the class.
pub fn classify_subalgebra(p: GroupParam, b1: f64, b2: f64, b3: f64) -> Result<SubalgebraClass> {
    if b1 == 0.0 && b2 == 0.0 && b3 == 0.0 {
        return Err(Error::ZeroGenerator);
    }
    let f = [0.0; 3];
    if p.is_one() {
        if b1 == 0.0 {
            return Ok(SubalgebraClass::NormalInadmissible);
        }
        // e1 and e2 components of the image vanish for n1 = -b2/b1, n2 = -b3/b1
        let automorphism = AutomorphismParams::UnitParameter {
            k1: 1.0,
            k2: 0.0,
            l: 1.0,
            n1: -b2 / b1,
            n2: -b3 / b1,
            f,
        };
        return Ok(SubalgebraClass::H1 { automorphism });
    }
    Ok(match (b1 != 0.0, b2 != 0.0) {
        (true, false) => SubalgebraClass::H1 {
            automorphism: AutomorphismParams::Generic {
                k: 1.0,
                l: 1.0,
                n: -b3 / b1,
                f,
            },
        },
        (true, true) => SubalgebraClass::H2 {
            automorphism: AutomorphismParams::Generic {
                k: b1 / b2,
                l: 1.0,
                n: -b3 / b1,
                f,
            },
        },
        (false, _) if b2 * b3 != 0.0 => SubalgebraClass::H3 {
            automorphism: AutomorphismParams::Generic {
                k: b3 / b2,
                l: 1.0,
                n: 0.0,
                f,
            },
        },
        (false, _) => SubalgebraClass::NormalInadmissible,
    })
}

/// Classifies the span of an arbitrary nonzero algebra vector.
pub fn classify_generator(p: GroupParam, v: AlgebraVector) -> Result<SubalgebraClass> {
    if v.c4 != 0.0 {
        // e4 ↦ e4 - u with u = (c1 e1 + c2 e2 + c3 e3) / c4 sends v / c4 to e4
        let s = 1.0 / v.c4;
        let automorphism = AutomorphismParams::Generic {
            k: 1.0,
            l: 1.0,
            n: 0.0,
            f: [-v.c1 * s, -v.c2 * s, -v.c3 * s],
        };
        return Ok(SubalgebraClass::NotInCommutator { automorphism });
    }
    classify_subalgebra(p, v.c3, v.c1, v.c2)
}

/// For `g` outside the commutator subgroup, a coset `m H4` fixed by `g`:
/// `g · embed(H4, m) = embed(H4, m) · g(0,0,0,g4)`.
pub fn fixed_point_witness(p: GroupParam, g: &GroupElement) -> Result<LoopPoint> {
    if g.x4 == 0.0 {
        return Err(Error::NoFixedPoint);
    }
    let x = g.x1 / -(p.a() * g.x4).exp_m1();
    let w = g.x3 / -g.x4.exp_m1();
    let y = (g.x2 + g.x4 * g.x4.exp() * w) / -g.x4.exp_m1();
    Ok(LoopPoint::new(x, y, w))
}

/// Max-coordinate residual of the fixed-coset equation.
pub fn fixed_point_residual(p: GroupParam, g: &GroupElement, m: LoopPoint) -> f64 {
    let c = embed_unchecked(SubgroupId::H4, m);
    let lhs = p.mul(g, &c);
    let rhs = p.mul(&c, &subgroup_element(SubgroupId::H4, g.x4));
    lhs.distance(&rhs)
}
