//! The four-dimensional solvable group `G(a)`.
//!
//! Elements are written `g(x1, x2, x3, x4)` and realized as the matrices
//!
//! ```text
//! | e^{a x4}  0       0           x1 |
//! | 0         e^{x4}  x4 e^{x4}   x2 |
//! | 0         0       e^{x4}      x3 |
//! | 0         0       0           1  |
//! ```
//!
//! The coordinates are global, so the group law, inverse and every chart used
//! elsewhere in the crate are closed-form expressions in them. The matrix
//! realization is kept as an independent oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix4;

/// Componentwise absolute tolerance for comparing group elements.
pub const ELEMENT_TOL: f64 = 1e-10;

/// The family parameter `a`, nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GroupParam(f64);

impl GroupParam {
    pub fn new(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(a));
        }
        Ok(GroupParam(a))
    }

    pub fn a(self) -> f64 {
        self.0
    }

    /// For `a = 1` the subgroups `H2`, `H3` and the loop cases B and C are
    /// unavailable and the automorphism group is larger.
    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn mul(self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let ea = (self.0 * g.x4).exp();
        let e = g.x4.exp();
        GroupElement {
            x1: g.x1 + ea * h.x1,
            x2: g.x2 + e * h.x2 + g.x4 * e * h.x3,
            x3: g.x3 + e * h.x3,
            x4: g.x4 + h.x4,
        }
    }

    pub fn inv(self, g: &GroupElement) -> GroupElement {
        let ea = (-self.0 * g.x4).exp();
        let e = (-g.x4).exp();
        GroupElement {
            x1: -ea * g.x1,
            x2: -e * g.x2 + g.x4 * e * g.x3,
            x3: -e * g.x3,
            x4: -g.x4,
        }
    }

    /// `g h g^{-1}`
    pub fn conjugate(self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.mul(&self.mul(g, h), &self.inv(g))
    }

    pub fn as_matrix(self, g: &GroupElement) -> Matrix4 {
        let e = g.x4.exp();
        Matrix4([
            [(self.0 * g.x4).exp(), 0.0, 0.0, g.x1],
            [0.0, e, g.x4 * e, g.x2],
            [0.0, 0.0, e, g.x3],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    /// Reads coordinates back off a matrix of the displayed shape.
    ///
    /// Returns the element together with the largest deviation of the
    /// remaining entries from the shape `as_matrix` would produce.
    pub fn from_matrix(self, m: &Matrix4) -> (GroupElement, f64) {
        let g = GroupElement {
            x1: m.get(0, 3),
            x2: m.get(1, 3),
            x3: m.get(2, 3),
            x4: m.get(2, 2).ln(),
        };
        let defect = self.as_matrix(&g).max_rel_diff(m);
        (g, defect)
    }
}

impl TryFrom<f64> for GroupParam {
    type Error = Error;

    fn try_from(a: f64) -> Result<Self> {
        GroupParam::new(a)
    }
}

impl From<GroupParam> for f64 {
    fn from(p: GroupParam) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupElement {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
        x4: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        GroupElement { x1, x2, x3, x4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        GroupElement::new(v[0], v[1], v[2], v[3])
    }

    /// Max-coordinate distance.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Max-coordinate distance relative to `max(1, |coordinate|)`.
    pub fn rel_distance(&self, other: &GroupElement) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &GroupElement) -> bool {
        self.distance(other) <= ELEMENT_TOL
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}
