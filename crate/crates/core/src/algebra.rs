//! The Lie algebra of `G(a)`: basis `e1..e4` with the only nonzero brackets
//! `[e1,e4] = a e1`, `[e2,e4] = e2`, `[e3,e4] = e2 + e3`, its automorphisms,
//! and the exponential map into the group.
//!
//! Matrix conventions. The flow generators of the four coordinates are
//! `X1 = E14`, `X2 = E24`, `X3 = E34` and `X4 = diag(a,1,1,0) + E23`.
//! [`flow_matrix`] sends `ei ↦ Xi`, so `exp(t e4) = g(0,0,0,t)`. Matrix
//! commutators of flow generators carry the opposite sign from the bracket
//! table; [`bracket_matrix`] sends `e4 ↦ -X4` instead and is a Lie algebra
//! homomorphism, which is what the commutator oracle checks.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParam};
use crate::matrix::Matrix4;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector::new(0.0, 0.0, 0.0, 0.0);
    pub const E1: AlgebraVector = AlgebraVector::new(1.0, 0.0, 0.0, 0.0);
    pub const E2: AlgebraVector = AlgebraVector::new(0.0, 1.0, 0.0, 0.0);
    pub const E3: AlgebraVector = AlgebraVector::new(0.0, 0.0, 1.0, 0.0);
    pub const E4: AlgebraVector = AlgebraVector::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        AlgebraVector { c1, c2, c3, c4 }
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Self::from_array(c)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        AlgebraVector::new(c[0], c[1], c[2], c[3])
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(self, other: AlgebraVector) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn max_abs_diff(self, other: AlgebraVector) -> f64 {
        (self - other)
            .to_array()
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max)
    }

    /// Distance of `self / |self|` from the line spanned by `target`.
    /// Zero iff `self` is a nonzero multiple of `target`; one for zero `self`.
    pub fn collinearity_residual(self, target: AlgebraVector) -> f64 {
        let n = self.norm();
        let t = target.norm();
        if n == 0.0 || t == 0.0 {
            return 1.0;
        }
        let u = self * (1.0 / n);
        let w = target * (1.0 / t);
        (u - w * u.dot(w)).norm()
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, r: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(
            self.c1 + r.c1,
            self.c2 + r.c2,
            self.c3 + r.c3,
            self.c4 + r.c4,
        )
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, r: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(
            self.c1 - r.c1,
            self.c2 - r.c2,
            self.c3 - r.c3,
            self.c4 - r.c4,
        )
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        self * -1.0
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> AlgebraVector {
        AlgebraVector::new(self.c1 * s, self.c2 * s, self.c3 * s, self.c4 * s)
    }
}

/// Bracket table: `[ei, ej] = Σk table[i][j][k] ek`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub table: [[[f64; 4]; 4]; 4],
}

impl StructureConstants {
    pub fn new(p: GroupParam) -> Self {
        let mut table = [[[0.0; 4]; 4]; 4];
        let mut set = |i: usize, j: usize, v: [f64; 4]| {
            table[i][j] = v;
            table[j][i] = v.map(|c| -c);
        };
        set(0, 3, [p.a(), 0.0, 0.0, 0.0]);
        set(1, 3, [0.0, 1.0, 0.0, 0.0]);
        set(2, 3, [0.0, 1.0, 1.0, 0.0]);
        StructureConstants { table }
    }

    pub fn bracket(&self, u: AlgebraVector, v: AlgebraVector) -> AlgebraVector {
        let (u, v) = (u.to_array(), v.to_array());
        let mut out = [0.0; 4];
        for (ui, row) in u.iter().zip(&self.table) {
            for (vj, entry) in v.iter().zip(row) {
                let w = ui * vj;
                if w == 0.0 {
                    continue;
                }
                for (o, t) in out.iter_mut().zip(entry) {
                    *o += w * t;
                }
            }
        }
        AlgebraVector::from_array(out)
    }

    /// Largest coefficient of `table[i][j] + table[j][i]` over all pairs.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    worst = worst.max((self.table[i][j][k] + self.table[j][i][k]).abs());
                }
            }
        }
        worst
    }

    /// Largest coefficient of the Jacobiator over all basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let e = AlgebraVector::basis;
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let (x, y, z) = (e(i), e(j), e(k));
                    let jac = self.bracket(x, self.bracket(y, z))
                        + self.bracket(y, self.bracket(z, x))
                        + self.bracket(z, self.bracket(x, y));
                    worst = worst.max(jac.max_abs_diff(AlgebraVector::ZERO));
                }
            }
        }
        worst
    }

    /// Dimension of the center, by Gaussian elimination on the map
    /// `v ↦ ([v,e1], [v,e2], [v,e3], [v,e4])`.
    pub fn center_dimension(&self) -> usize {
        // 16 equations in 4 unknowns; rows indexed by (j, k), columns by i
        let mut rows: Vec<[f64; 4]> = Vec::with_capacity(16);
        for j in 0..4 {
            for k in 0..4 {
                rows.push([0, 1, 2, 3].map(|i| self.table[i][j][k]));
            }
        }
        4 - rank(&mut rows, 1e-12)
    }
}

fn rank(rows: &mut [[f64; 4]], tol: f64) -> usize {
    let mut r = 0;
    for col in 0..4 {
        let Some(pivot) =
            (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[pivot][col].abs() <= tol {
            continue;
        }
        rows.swap(r, pivot);
        let pr = rows[r];
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[col] / pr[col];
            for c in col..4 {
                row[c] -= f * pr[c];
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

pub fn bracket(p: GroupParam, u: AlgebraVector, v: AlgebraVector) -> AlgebraVector {
    StructureConstants::new(p).bracket(u, v)
}

fn x4_generator(p: GroupParam) -> Matrix4 {
    let mut m = Matrix4::ZERO;
    m.0[0][0] = p.a();
    m.0[1][1] = 1.0;
    m.0[2][2] = 1.0;
    m.0[1][2] = 1.0;
    m
}

/// `c1 X1 + c2 X2 + c3 X3 + c4 X4`: the generator whose flow is `exp_alg`.
pub fn flow_matrix(p: GroupParam, v: AlgebraVector) -> Matrix4 {
    Matrix4::unit(0, 3).scale(v.c1)
        + Matrix4::unit(1, 3).scale(v.c2)
        + Matrix4::unit(2, 3).scale(v.c3)
        + x4_generator(p).scale(v.c4)
}

/// `c1 X1 + c2 X2 + c3 X3 - c4 X4`: a homomorphism of Lie algebras onto the
/// matrix realization, `[bracket_matrix(u), bracket_matrix(v)] = bracket_matrix([u,v])`.
pub fn bracket_matrix(p: GroupParam, v: AlgebraVector) -> Matrix4 {
    flow_matrix(p, AlgebraVector { c4: -v.c4, ..v })
}

/// `exp(t v)` computed as the matrix exponential of `t · flow_matrix(v)`.
pub fn exp_alg(p: GroupParam, v: AlgebraVector, t: f64) -> GroupElement {
    let m = flow_matrix(p, v * t).expm();
    let (g, defect) = p.from_matrix(&m);
    assert!(
        defect < 1e-9,
        "matrix exponential left the coordinate patch (defect {defect:e})"
    );
    g
}

/// Automorphisms of the algebra.
///
/// `Generic` is the full automorphism group for `a ≠ 1` (and a subgroup of it
/// for `a = 1`); `UnitParameter` is the larger group available when `a = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum AutomorphismParams {
    /// `e1 ↦ k e1`, `e2 ↦ l e2`, `e3 ↦ n e2 + l e3`, `e4 ↦ f1 e1 + f2 e2 + f3 e3 + e4`.
    Generic { k: f64, l: f64, n: f64, f: [f64; 3] },
    /// `e1 ↦ k1 e1 + k2 e2`, `e2 ↦ l e2`, `e3 ↦ n1 e1 + n2 e2 + l e3`,
    /// `e4 ↦ f1 e1 + f2 e2 + f3 e3 + e4`.
    UnitParameter {
        k1: f64,
        k2: f64,
        l: f64,
        n1: f64,
        n2: f64,
        f: [f64; 3],
    },
}

impl AutomorphismParams {
    pub const IDENTITY: AutomorphismParams = AutomorphismParams::Generic {
        k: 1.0,
        l: 1.0,
        n: 0.0,
        f: [0.0; 3],
    };

    /// Images of the basis vectors, in order.
    pub fn images(&self) -> [AlgebraVector; 4] {
        match *self {
            AutomorphismParams::Generic { k, l, n, f } => [
                AlgebraVector::new(k, 0.0, 0.0, 0.0),
                AlgebraVector::new(0.0, l, 0.0, 0.0),
                AlgebraVector::new(0.0, n, l, 0.0),
                AlgebraVector::new(f[0], f[1], f[2], 1.0),
            ],
            AutomorphismParams::UnitParameter {
                k1,
                k2,
                l,
                n1,
                n2,
                f,
            } => [
                AlgebraVector::new(k1, k2, 0.0, 0.0),
                AlgebraVector::new(0.0, l, 0.0, 0.0),
                AlgebraVector::new(n1, n2, l, 0.0),
                AlgebraVector::new(f[0], f[1], f[2], 1.0),
            ],
        }
    }

    pub fn validate(&self, p: GroupParam) -> Result<()> {
        match *self {
            AutomorphismParams::Generic { k, l, .. } => {
                if k * l == 0.0 {
                    return Err(Error::SingularAutomorphism("k·l = 0"));
                }
            }
            AutomorphismParams::UnitParameter { k1, l, .. } => {
                if !p.is_one() {
                    return Err(Error::VariantMismatch(p.a()));
                }
                if k1 * l == 0.0 {
                    return Err(Error::SingularAutomorphism("k1·l = 0"));
                }
            }
        }
        Ok(())
    }
}

pub fn apply_automorphism(
    p: GroupParam,
    phi: &AutomorphismParams,
    v: AlgebraVector,
) -> Result<AlgebraVector> {
    phi.validate(p)?;
    let img = phi.images();
    Ok(img[0] * v.c1 + img[1] * v.c2 + img[2] * v.c3 + img[3] * v.c4)
}

const CENTRAL_PROBE_TIMES: [f64; 3] = [0.25, 0.5, 1.0];

/// Largest failure of `exp(t v)` to commute with the probes.
pub fn central_defect(p: GroupParam, v: AlgebraVector, probes: &[GroupElement]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in &CENTRAL_PROBE_TIMES {
        let x = exp_alg(p, v, t);
        for q in probes {
            worst = worst.max(p.mul(&x, q).distance(&p.mul(q, &x)));
        }
    }
    worst
}

/// The probe set `{exp(e4), exp(e1), exp(e3)}`.
pub fn standard_probes(p: GroupParam) -> [GroupElement; 3] {
    [
        exp_alg(p, AlgebraVector::E4, 1.0),
        exp_alg(p, AlgebraVector::E1, 1.0),
        exp_alg(p, AlgebraVector::E3, 1.0),
    ]
}
