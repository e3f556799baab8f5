//! The loops `L_σ` on `G/H ≅ ℝ³` defined by `xH ∗ yH = σ(xH) y H`.
//!
//! Multiplication and left division are closed form in every case. Right
//! division is closed form in case A, a one-dimensional root problem in
//! case C and a two-dimensional one in case B.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{root1d, root2d, NewtonConfig, ScanConfig, SearchBox};
use crate::report::{CheckEntry, MaxError, Status, VerificationReport};
use crate::sampling::Sampler;
use crate::sections::{
    degeneracy_report, section_lift, DegeneracyConfig, GenerationVerdict, SectionCase, SectionSpec,
};
use crate::subgroups::{decompose_unchecked, embed_unchecked};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LoopPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LoopPoint {
    pub const ORIGIN: LoopPoint = LoopPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        LoopPoint { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Max-coordinate distance; NaN compares as infinitely far.
    pub fn distance(&self, other: &LoopPoint) -> f64 {
        let d = (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs());
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }

    pub fn in_normal_subloop(&self) -> bool {
        self.z == 0.0
    }
}

/// Right-division search: the box `[-half_width, half_width]` in the
/// unknown coordinates, doubled up to `expansions` times while no root is
/// found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdivConfig {
    pub half_width: f64,
    pub expansions: usize,
    pub scan: ScanConfig,
    pub newton: NewtonConfig,
}

impl Default for RdivConfig {
    fn default() -> Self {
        RdivConfig {
            half_width: 10.0,
            expansions: 4,
            scan: ScanConfig::default(),
            newton: NewtonConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopCase {
    pub spec: SectionSpec,
    pub verdict: Option<GenerationVerdict>,
    pub rdiv: RdivConfig,
}

/// `1 - e^{t}`, exact zero at `t = 0`.
fn one_minus_exp(t: f64) -> f64 {
    -t.exp_m1()
}

impl LoopCase {
    /// Builds the loop and caches its generation verdict.
    pub fn new(spec: SectionSpec) -> Self {
        let verdict = degeneracy_report(&spec, &DegeneracyConfig::default());
        Self::with_verdict(spec, Some(verdict))
    }

    pub fn with_verdict(spec: SectionSpec, verdict: Option<GenerationVerdict>) -> Self {
        LoopCase {
            spec,
            verdict,
            rdiv: RdivConfig::default(),
        }
    }

    pub fn case(&self) -> SectionCase {
        self.spec.case
    }

    fn a(&self) -> f64 {
        self.spec.a()
    }

    fn f(&self, x: f64, y: f64, z: f64) -> f64 {
        self.spec.func.eval(x, y, z)
    }

    pub fn mul(&self, m1: LoopPoint, m2: LoopPoint) -> LoopPoint {
        let a = self.a();
        let (e1, ea1) = (m1.z.exp(), (a * m1.z).exp());
        let z = m1.z + m2.z;
        match self.case() {
            SectionCase::A => {
                let f = self.f(m1.x, 0.0, m1.z);
                LoopPoint::new(m1.x + ea1 * m2.x, m1.y + e1 * m2.y - m2.z * e1 * f, z)
            }
            SectionCase::B => {
                let h = self.f(m1.x, m1.y, m1.z);
                let c = one_minus_exp((a - 1.0) * m2.z);
                LoopPoint::new(
                    m1.x + ea1 * (m2.x + h * c),
                    m1.y + e1 * (m2.y - m2.z * h),
                    z,
                )
            }
            SectionCase::C => {
                let f = self.f(m1.x, m1.y, m1.z);
                let c = one_minus_exp((a - 1.0) * m2.z);
                let shear = m2.y * m1.z * ((a - 1.0) * m2.z).exp();
                LoopPoint::new(m1.x + ea1 * (m2.x - shear + f * c), m1.y + e1 * m2.y, z)
            }
        }
    }

    /// The unique `X` with `m1 ∗ X = b`.
    pub fn ldiv(&self, m1: LoopPoint, b: LoopPoint) -> LoopPoint {
        let a = self.a();
        let z = b.z - m1.z;
        let dx = (-a * m1.z).exp() * (b.x - m1.x);
        let dy = (-m1.z).exp() * (b.y - m1.y);
        match self.case() {
            SectionCase::A => LoopPoint::new(dx, dy + z * self.f(m1.x, 0.0, m1.z), z),
            SectionCase::B => {
                let h = self.f(m1.x, m1.y, m1.z);
                LoopPoint::new(dx - h * one_minus_exp((a - 1.0) * z), dy + z * h, z)
            }
            SectionCase::C => {
                let f = self.f(m1.x, m1.y, m1.z);
                let c = one_minus_exp((a - 1.0) * z);
                LoopPoint::new(dx + dy * m1.z * ((a - 1.0) * z).exp() - f * c, dy, z)
            }
        }
    }

    /// Case B: with `z1 = b.z - m2.z` fixed, the residual of `(x, y, z1) ∗ m2 = b`.
    pub fn rdiv_equation_b(
        &self,
        b: LoopPoint,
        m2: LoopPoint,
    ) -> (f64, impl Fn([f64; 2]) -> [f64; 2] + Sync + '_) {
        let a = self.a();
        let z1 = b.z - m2.z;
        let (e1, ea1) = (z1.exp(), (a * z1).exp());
        let c = one_minus_exp((a - 1.0) * m2.z);
        let eq = move |v: [f64; 2]| {
            let h = self.f(v[0], v[1], z1);
            [
                v[0] + ea1 * (m2.x + h * c) - b.x,
                v[1] + e1 * (m2.y - m2.z * h) - b.y,
            ]
        };
        (z1, eq)
    }

    /// Case C: `y1` and `z1` are explicit; returns them with the residual in `x1`.
    pub fn rdiv_equation_c(
        &self,
        b: LoopPoint,
        m2: LoopPoint,
    ) -> (f64, f64, impl Fn(f64) -> f64 + Sync + '_) {
        let a = self.a();
        let z1 = b.z - m2.z;
        let y1 = b.y - z1.exp() * m2.y;
        let ea1 = (a * z1).exp();
        let c = one_minus_exp((a - 1.0) * m2.z);
        let shear = m2.y * z1 * ((a - 1.0) * m2.z).exp();
        let eq = move |x: f64| x + ea1 * (m2.x - shear + self.f(x, y1, z1) * c) - b.x;
        (y1, z1, eq)
    }

    /// The `X` with `X ∗ m2 = b`. In cases B and C several roots in the
    /// search box, or none, are reported as errors.
    pub fn rdiv(&self, b: LoopPoint, m2: LoopPoint) -> Result<LoopPoint> {
        let cfg = &self.rdiv;
        match self.case() {
            SectionCase::A => {
                let z1 = b.z - m2.z;
                let (e1, ea1) = (z1.exp(), (self.a() * z1).exp());
                let x1 = b.x - ea1 * m2.x;
                let y1 = b.y - e1 * m2.y + m2.z * e1 * self.f(x1, 0.0, z1);
                Ok(LoopPoint::new(x1, y1, z1))
            }
            SectionCase::C => {
                let (y1, z1, eq) = self.rdiv_equation_c(b, m2);
                let mut hw = cfg.half_width;
                for _ in 0..=cfg.expansions {
                    let interval = SearchBox::new([-hw], [hw])?;
                    match root1d(&eq, &interval, &cfg.scan).as_slice() {
                        [] => hw *= 2.0,
                        [x] => return Ok(LoopPoint::new(*x, y1, z1)),
                        many => return Err(Error::MultipleRoots { count: many.len() }),
                    }
                }
                Err(Error::NoRootInBox {
                    lo: -hw / 2.0,
                    hi: hw / 2.0,
                })
            }
            SectionCase::B => {
                let (z1, eq) = self.rdiv_equation_b(b, m2);
                let mut hw = cfg.half_width;
                let mut converged = false;
                for _ in 0..=cfg.expansions {
                    let plane = SearchBox::new([-hw, -hw], [hw, hw])?;
                    let res = root2d(&eq, &plane, &cfg.newton);
                    converged |= !res.nonconvergent();
                    match res.roots.as_slice() {
                        [] => hw *= 2.0,
                        [r] => return Ok(LoopPoint::new(r[0], r[1], z1)),
                        many => return Err(Error::MultipleRoots { count: many.len() }),
                    }
                }
                if converged {
                    Err(Error::NoRootInBox {
                        lo: -hw / 2.0,
                        hi: hw / 2.0,
                    })
                } else {
                    Err(Error::SolverDivergence)
                }
            }
        }
    }

    /// Distance between the closed-form product and the coset computation
    /// `σ(m1 H) · m2 H`.
    pub fn coset_cross_check(&self, m1: LoopPoint, m2: LoopPoint) -> f64 {
        let p = self.spec.param;
        let sub = self.spec.subgroup();
        let g = p.mul(&section_lift(&self.spec, m1), &embed_unchecked(sub, m2));
        decompose_unchecked(p, sub, &g)
            .rep
            .distance(&self.mul(m1, m2))
    }

    pub fn associativity_defect(&self, m1: LoopPoint, m2: LoopPoint, m3: LoopPoint) -> f64 {
        let left = self.mul(self.mul(m1, m2), m3);
        let right = self.mul(m1, self.mul(m2, m3));
        left.distance(&right)
    }
}

pub fn loop_mul(c: &LoopCase, m1: LoopPoint, m2: LoopPoint) -> LoopPoint {
    c.mul(m1, m2)
}

pub fn loop_ldiv(c: &LoopCase, m1: LoopPoint, b: LoopPoint) -> LoopPoint {
    c.ldiv(m1, b)
}

pub fn loop_rdiv(c: &LoopCase, b: LoopPoint, m2: LoopPoint) -> Result<LoopPoint> {
    c.rdiv(b, m2)
}

pub fn coset_cross_check(c: &LoopCase, m1: LoopPoint, m2: LoopPoint) -> f64 {
    c.coset_cross_check(m1, m2)
}

pub fn associativity_defect(c: &LoopCase, m1: LoopPoint, m2: LoopPoint, m3: LoopPoint) -> f64 {
    c.associativity_defect(m1, m2, m3)
}

pub const LDIV_TOL: f64 = 1e-9;
pub const RDIV_TOL: f64 = 1e-8;
pub const CROSS_CHECK_TOL: f64 = 1e-10;
pub const ASSOCIATIVITY_WITNESS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub region: SearchBox<3>,
    pub samples: usize,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(half_width: f64, samples: usize, seed: u64) -> Result<Self> {
        Ok(SampleConfig {
            region: SearchBox::cube(half_width)?,
            samples,
            seed,
        })
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::NoRootInBox { .. } => "NoRootInBox",
        Error::MultipleRoots { .. } => "MultipleRoots",
        Error::SolverDivergence => "SolverDivergence",
        _ => "Other",
    }
}

/// Identity laws, division round trips, additivity of `z` and the
/// cross-check against the coset computation.
///
/// Right division is tested on `b = s ∗ m2` with `s, m2` drawn from the
/// region, so a solution is known to exist.
pub fn axiom_suite(c: &LoopCase, cfg: &SampleConfig) -> VerificationReport {
    let mut sampler = Sampler::new(cfg.seed);
    let draws: Vec<[LoopPoint; 3]> = (0..cfg.samples)
        .map(|_| {
            [
                sampler.point(&cfg.region),
                sampler.point(&cfg.region),
                sampler.point(&cfg.region),
            ]
        })
        .collect();

    struct Row {
        identity: f64,
        ldiv: f64,
        rdiv: std::result::Result<f64, &'static str>,
        z_add: f64,
        cross: f64,
        scale: f64,
    }

    let rows: Vec<Row> = draws
        .par_iter()
        .map(|&[m1, m2, s]| {
            let e = LoopPoint::ORIGIN;
            let identity = c.mul(e, m1).distance(&m1).max(c.mul(m1, e).distance(&m1));
            let ldiv = c.mul(m1, c.ldiv(m1, m2)).distance(&m2);
            let b = c.mul(s, m2);
            let rdiv = c
                .rdiv(b, m2)
                .map(|r| c.mul(r, m2).distance(&b))
                .map_err(|e| error_name(&e));
            let z_add = (c.mul(m1, m2).z - (m1.z + m2.z)).abs();
            let cross = c.coset_cross_check(m1, m2);
            let scale = c
                .mul(m1, m2)
                .to_array()
                .iter()
                .fold(0.0, |acc: f64, v| acc.max(v.abs()));
            Row {
                identity,
                ldiv,
                rdiv,
                z_add,
                cross,
                scale,
            }
        })
        .collect();

    let n = cfg.samples;
    let mut report = VerificationReport::new(Some(cfg.seed));
    report.push(CheckEntry::measured(
        "identity",
        rows.iter().map(|r| r.identity).collect::<MaxError>().get(),
        0.0,
        n,
    ));
    report.push(CheckEntry::measured(
        "ldiv-roundtrip",
        rows.iter().map(|r| r.ldiv).collect::<MaxError>().get(),
        LDIV_TOL,
        n,
    ));
    let solved: Vec<f64> = rows.iter().filter_map(|r| r.rdiv.ok()).collect();
    report.push(CheckEntry::measured(
        "rdiv-roundtrip",
        solved.iter().copied().collect::<MaxError>().get(),
        RDIV_TOL,
        solved.len(),
    ));
    for kind in ["NoRootInBox", "MultipleRoots", "SolverDivergence", "Other"] {
        let count = rows.iter().filter(|r| r.rdiv == Err(kind)).count();
        if count > 0 {
            report.push(CheckEntry::flag(
                format!("rdiv-error:{kind}"),
                Status::Fail,
                count,
                format!("{count} of {n} right divisions failed"),
            ));
        }
    }
    report.push(CheckEntry::measured(
        "z-additivity",
        rows.iter().map(|r| r.z_add).collect::<MaxError>().get(),
        0.0,
        n,
    ));
    report.push(
        CheckEntry::measured(
            "coset-cross-check",
            rows.iter().map(|r| r.cross).collect::<MaxError>().get(),
            CROSS_CHECK_TOL,
            n,
        )
        .with_notes(format!(
            "absolute defect; largest product coordinate {:.3e}",
            rows.iter().map(|r| r.scale).collect::<MaxError>().get()
        )),
    );
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociativityWitness {
    pub triple: [LoopPoint; 3],
    pub defect: f64,
    pub samples: usize,
}

/// The sampled triple with the largest associativity defect.
pub fn associativity_search(c: &LoopCase, cfg: &SampleConfig) -> AssociativityWitness {
    let mut sampler = Sampler::new(cfg.seed);
    let triples: Vec<[LoopPoint; 3]> = (0..cfg.samples.max(1))
        .map(|_| {
            [
                sampler.point(&cfg.region),
                sampler.point(&cfg.region),
                sampler.point(&cfg.region),
            ]
        })
        .collect();
    let defects: Vec<f64> = triples
        .par_iter()
        .map(|t| c.associativity_defect(t[0], t[1], t[2]))
        .collect();
    let best = defects.iter().enumerate().fold(0, |best, (i, d)| {
        if d.total_cmp(&defects[best]).is_gt() {
            i
        } else {
            best
        }
    });
    AssociativityWitness {
        triple: triples[best],
        defect: defects[best],
        samples: triples.len(),
    }
}

/// Case A: `N = {(x, y, 0)}` is a normal subloop with `L/N ≅ (ℝ, +)`.
/// Membership in a coset of `N` is equality of the `z` coordinate, so every
/// check here is exact.
pub fn normal_subloop_check(c: &LoopCase, cfg: &SampleConfig) -> Result<VerificationReport> {
    if c.case() != SectionCase::A {
        return Err(Error::UnsupportedCase(c.case().label()));
    }
    let mut sampler = Sampler::new(cfg.seed);
    let flat = |s: &mut Sampler| {
        let p = s.point(&cfg.region);
        LoopPoint::new(p.x, p.y, 0.0)
    };
    let draws: Vec<(LoopPoint, LoopPoint, LoopPoint, LoopPoint)> = (0..cfg.samples)
        .map(|_| {
            let m = sampler.point(&cfg.region);
            let m2 = sampler.point(&cfg.region);
            (m, m2, flat(&mut sampler), flat(&mut sampler))
        })
        .collect();

    // counts of violated set relations
    let mut bad = [0usize; 5];
    for &(m, m2, n1, n2) in &draws {
        // mN = Nm: both sides are {z = m.z}, and every point of that plane is reached
        let target = LoopPoint::new(n1.x, n1.y, m.z);
        let left_coset = c.mul(m, n1).z == m.z
            && c.mul(n1, m).z == m.z
            && c.ldiv(m, target).in_normal_subloop()
            && c.rdiv(target, m).is_ok_and(|r| r.in_normal_subloop());
        let assoc_left = c.mul(c.mul(m, n1), m2).z == c.mul(m, c.mul(n1, m2)).z;
        let assoc_right = c.mul(c.mul(m, m2), n1).z == c.mul(m, c.mul(m2, n1)).z;
        let quotient =
            c.mul(
                c.mul(LoopPoint::new(0.0, 0.0, m.z), n1),
                c.mul(LoopPoint::new(0.0, 0.0, m2.z), n2),
            )
            .z == m.z + m2.z;
        let subloop = c.mul(n1, n2).in_normal_subloop()
            && c.mul(n1, n2) == c.mul(n2, n1)
            && c.ldiv(n1, n2).in_normal_subloop();
        for (i, ok) in [left_coset, assoc_left, assoc_right, quotient, subloop]
            .into_iter()
            .enumerate()
        {
            bad[i] += usize::from(!ok);
        }
    }
    let n = cfg.samples;
    let mut report = VerificationReport::new(Some(cfg.seed));
    let names = [
        ("coset-mN-eq-Nm", "m*N = N*m"),
        ("coset-assoc-left", "(m*N)*m' = m*(N*m')"),
        ("coset-assoc-right", "m*(m'*N) = (m*m')*N"),
        ("quotient-additive", "(0,0,z1)N * (0,0,z2)N = (0,0,z1+z2)N"),
        ("N-abelian-subgroup", "N closed, commutative"),
    ];
    for ((name, relation), violations) in names.into_iter().zip(bad) {
        let status = if violations == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        report.push(CheckEntry::flag(
            name,
            status,
            n,
            format!("{relation}: {violations} violations"),
        ));
    }
    Ok(report)
}
