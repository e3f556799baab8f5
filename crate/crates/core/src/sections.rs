//! Sections `σ: G/H → G` over the stabilizers `H1`, `H2`, `H3`, the
//! generation (degeneracy) test, and box certification of sharp transitivity.
//!
//! | case | stabilizer | chart          | lift                                              |
//! |------|------------|----------------|---------------------------------------------------|
//! | A    | `H1`       | `g(x,y,0,z)`   | `g(x, y + z e^z f(x,z), e^z f(x,z), z)`           |
//! | B    | `H2`       | `g(x,y,0,z)`   | `g(x + e^{az} h, y + z e^z h, e^z h, z)`          |
//! | C    | `H3`       | `g(x,0,y,z)`   | `g(x + e^{az} f, e^z f, y, z)`                    |
//!
//! In B and C the function depends on all of `(x, y, z)`; in A it must not
//! depend on `y` for the section to be sharply transitive, so it is a
//! function of `(x, z)` only.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expr, Var};
use crate::group::{GroupElement, GroupParam};
use crate::loops::{LoopCase, LoopPoint};
use crate::numerics::{
    self, linspace, root1d, root2d, FitResult, NewtonConfig, ScanConfig, SearchBox,
};
use crate::report::{CheckEntry, MaxError, Status, VerificationReport};
use crate::sampling::Sampler;
use crate::subgroups::SubgroupId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectionCase {
    A,
    B,
    C,
}

impl SectionCase {
    pub const ALL: [SectionCase; 3] = [SectionCase::A, SectionCase::B, SectionCase::C];

    pub fn subgroup(self) -> SubgroupId {
        match self {
            SectionCase::A => SubgroupId::H1,
            SectionCase::B => SubgroupId::H2,
            SectionCase::C => SubgroupId::H3,
        }
    }

    pub fn arity(self) -> Arity {
        match self {
            SectionCase::A => Arity::TwoVar,
            SectionCase::B | SectionCase::C => Arity::ThreeVar,
        }
    }

    pub fn label(self) -> char {
        match self {
            SectionCase::A => 'A',
            SectionCase::B => 'B',
            SectionCase::C => 'C',
        }
    }

    pub fn is_admissible(self, p: GroupParam) -> bool {
        self == SectionCase::A || !p.is_one()
    }
}

impl fmt::Display for SectionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for SectionCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "A" | "a" => Ok(SectionCase::A),
            "B" | "b" => Ok(SectionCase::B),
            "C" | "c" => Ok(SectionCase::C),
            _ => Err(format!("unknown case `{s}` (expected A, B or C)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arity {
    /// `f(x, z)`
    TwoVar,
    /// `f(x, y, z)`
    ThreeVar,
}

impl Arity {
    pub fn variables(self) -> &'static [Var] {
        match self {
            Arity::TwoVar => &[Var::X, Var::Z],
            Arity::ThreeVar => &[Var::X, Var::Y, Var::Z],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Arity::TwoVar => "f(x,z)",
            Arity::ThreeVar => "f(x,y,z)",
        }
    }
}

/// Named function families.
///
/// In case C the slice identity reads `f(x,y,0) = -x`, so `bilinear` is
/// shifted by `-x` there and `lemma1` becomes the section of the subgroup
/// `{x1 = K (e^{a x4} - 1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Preset {
    /// `f ≡ 0`
    Zero,
    /// `f = x`
    LinearX,
    /// `f = x z` (case C: `-x + x z`); satisfies both identities yet generates `G`
    Bilinear,
    /// `f = K (1 - e^{-z})` (case C: `K - (K + x) e^{-a z}`)
    Lemma1 {
        #[serde(rename = "K")]
        k: f64,
    },
    /// `f = ε sin x`
    SinSmall { eps: f64 },
}

impl Preset {
    pub const DEFAULT_K: f64 = 1.0;
    pub const DEFAULT_EPS: f64 = 1e-3;

    /// Builds a preset from its name and optional coefficient.
    pub fn from_name(name: &str, coef: Option<f64>) -> std::result::Result<Preset, String> {
        let no_coef = |p: Preset| match coef {
            None => Ok(p),
            Some(_) => Err(format!("preset `{name}` takes no coefficient")),
        };
        match name {
            "zero" => no_coef(Preset::Zero),
            "linear-x" => no_coef(Preset::LinearX),
            "bilinear" => no_coef(Preset::Bilinear),
            "lemma1" => Ok(Preset::Lemma1 {
                k: coef.unwrap_or(Self::DEFAULT_K),
            }),
            "sin-small" => Ok(Preset::SinSmall {
                eps: coef.unwrap_or(Self::DEFAULT_EPS),
            }),
            _ => Err(format!(
                "unknown preset `{name}` (zero, linear-x, bilinear, lemma1, sin-small)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::LinearX => "linear-x",
            Preset::Bilinear => "bilinear",
            Preset::Lemma1 { .. } => "lemma1",
            Preset::SinSmall { .. } => "sin-small",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Preset {
        preset: Preset,
        case: SectionCase,
        a: f64,
    },
    Expr(Expr),
}

/// The continuous function defining a section, vanishing at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    arity: Arity,
    source: String,
    body: Body,
}

impl FunctionSpec {
    pub fn preset(preset: Preset, case: SectionCase, p: GroupParam) -> Self {
        let a = p.a();
        let c = case == SectionCase::C;
        let source = match preset {
            Preset::Zero => "0".to_string(),
            Preset::LinearX => "x".to_string(),
            Preset::Bilinear if c => "-x + x*z".to_string(),
            Preset::Bilinear => "x*z".to_string(),
            Preset::Lemma1 { k } if c => format!("{k:?} - ({k:?} + x)*exp(-{a:?}*z)"),
            Preset::Lemma1 { k } => format!("{k:?}*(1 - exp(-z))"),
            Preset::SinSmall { eps } => format!("{eps:?}*sin(x)"),
        };
        FunctionSpec {
            arity: case.arity(),
            source,
            body: Body::Preset { preset, case, a },
        }
    }

    /// Parses an expression; checks the variables against `arity` and the
    /// value at the origin.
    pub fn parse(text: &str, arity: Arity) -> Result<Self> {
        let tree = expr::parse_function_expr(text, arity.variables())?;
        Ok(FunctionSpec {
            arity,
            source: text.to_string(),
            body: Body::Expr(tree),
        })
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        match self.body {
            Body::Preset { preset, .. } => Some(preset),
            Body::Expr(_) => None,
        }
    }

    /// Value at `(x, y, z)`; `y` is ignored for two-variable functions.
    /// Expressions that divide by (almost) zero evaluate to NaN.
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        match &self.body {
            Body::Preset { preset, case, a } => match (*preset, *case) {
                (Preset::Zero, _) => 0.0,
                (Preset::LinearX, _) => x,
                (Preset::Bilinear, SectionCase::C) => x * z - x,
                (Preset::Bilinear, _) => x * z,
                (Preset::Lemma1 { k }, SectionCase::C) => {
                    -x * (-a * z).exp() - k * (-a * z).exp_m1()
                }
                (Preset::Lemma1 { k }, _) => -k * (-z).exp_m1(),
                (Preset::SinSmall { eps }, _) => eps * x.sin(),
            },
            Body::Expr(e) => e.eval(x, y, z).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpec {
    pub case: SectionCase,
    pub param: GroupParam,
    pub func: FunctionSpec,
}

impl SectionSpec {
    pub fn new(case: SectionCase, param: GroupParam, func: FunctionSpec) -> Result<Self> {
        if !case.is_admissible(param) {
            return Err(Error::InadmissibleCase {
                case: case.label(),
                a: param.a(),
            });
        }
        if func.arity() != case.arity() {
            return Err(Error::ArityMismatch {
                case: case.label(),
                found: func.arity().name(),
            });
        }
        Ok(SectionSpec { case, param, func })
    }

    pub fn preset(case: SectionCase, param: GroupParam, preset: Preset) -> Result<Self> {
        Self::new(case, param, FunctionSpec::preset(preset, case, param))
    }

    pub fn parse(case: SectionCase, param: GroupParam, text: &str) -> Result<Self> {
        Self::new(case, param, FunctionSpec::parse(text, case.arity())?)
    }

    pub fn a(&self) -> f64 {
        self.param.a()
    }

    pub fn subgroup(&self) -> SubgroupId {
        self.case.subgroup()
    }
}

/// `σ(m H)` for the coset with chart coordinates `m`.
pub fn section_lift(spec: &SectionSpec, m: LoopPoint) -> GroupElement {
    let a = spec.a();
    let ez = m.z.exp();
    let v = spec.func.eval(m.x, m.y, m.z);
    match spec.case {
        SectionCase::A => GroupElement::new(m.x, m.y + m.z * ez * v, ez * v, m.z),
        SectionCase::B => {
            GroupElement::new(m.x + (a * m.z).exp() * v, m.y + m.z * ez * v, ez * v, m.z)
        }
        SectionCase::C => GroupElement::new(m.x + (a * m.z).exp() * v, ez * v, m.y, m.z),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyConfig {
    /// Grid points per tested axis (at least 50).
    pub points_per_axis: usize,
    /// Slices are tested on `[-half_width, half_width]`.
    pub half_width: f64,
    pub identity_tol: f64,
    pub fit_tol: f64,
}

impl Default for DegeneracyConfig {
    fn default() -> Self {
        DegeneracyConfig {
            points_per_axis: 50,
            half_width: 5.0,
            identity_tol: 1e-8,
            fit_tol: 1e-9,
        }
    }
}

/// Outcome of the two identities that characterize non-generating sections
/// (case A: `f(x,0) = 0` and `f(0,z) = K (1 - e^{-z})`; case B:
/// `h(x,y,0) = 0` and `h(0,0,z) = K (1 - e^{-z})`; case C: `f(x,y,0) = -x`
/// and `f(0,0,z) = c (1 - e^{-a z})`). Verdicts hold on the tested box only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationVerdict {
    pub generates: bool,
    /// Least-squares `K` (cases A, B) or `c` (case C).
    pub fitted_constant: Option<f64>,
    pub slice_identity_holds: bool,
    pub slice_identity_residual: f64,
    pub exponential_identity_holds: bool,
    pub fit: Option<FitResult>,
    pub samples: usize,
    pub half_width: f64,
}

pub fn degeneracy_report(spec: &SectionSpec, cfg: &DegeneracyConfig) -> GenerationVerdict {
    let n = cfg.points_per_axis.max(2);
    let axis = linspace(-cfg.half_width, cfg.half_width, n);
    let f = &spec.func;

    let slice: MaxError = match spec.case {
        SectionCase::A => axis.iter().map(|&x| f.eval(x, 0.0, 0.0).abs()).collect(),
        SectionCase::B => axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| f.eval(x, y, 0.0).abs()))
            .collect(),
        SectionCase::C => axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| (f.eval(x, y, 0.0) + x).abs()))
            .collect(),
    };
    let slice_samples = if spec.case == SectionCase::A {
        n
    } else {
        n * n
    };
    let slice_residual = slice.get();
    let slice_identity_holds = slice_residual <= cfg.identity_tol;

    let rate = if spec.case == SectionCase::C {
        spec.a()
    } else {
        1.0
    };
    let samples: Vec<(f64, f64)> = axis.iter().map(|&z| (z, f.eval(0.0, 0.0, z))).collect();
    let fit = numerics::fit_against(&samples, |z| -(-rate * z).exp_m1()).ok();
    let exponential_identity_holds = fit.is_some_and(|r| r.rms_residual <= cfg.fit_tol);

    GenerationVerdict {
        generates: !(slice_identity_holds && exponential_identity_holds),
        fitted_constant: fit.map(|r| r.k),
        slice_identity_holds,
        slice_identity_residual: slice_residual,
        exponential_identity_holds,
        fit,
        samples: slice_samples + samples.len(),
        half_width: cfg.half_width,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitivityConfig {
    /// Solutions and right factors are drawn from this box; roots are
    /// counted inside its `x` (case C) or `(x, y)` (case B) projection.
    pub region: SearchBox<3>,
    pub samples: usize,
    pub seed: u64,
    pub scan: ScanConfig,
    pub newton: NewtonConfig,
}

impl TransitivityConfig {
    pub fn new(half_width: f64, samples: usize, seed: u64) -> Result<Self> {
        Ok(TransitivityConfig {
            region: SearchBox::cube(half_width)?,
            samples,
            seed,
            scan: ScanConfig::default(),
            newton: NewtonConfig::default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub report: VerificationReport,
    /// Roots found per sample, in sampling order.
    pub root_counts: Vec<usize>,
    pub nonconverged: usize,
}

impl TransitivityReport {
    pub fn all_unique(&self) -> bool {
        self.root_counts.iter().all(|&c| c == 1)
    }
}

/// Solution tolerance for recovering the sampled solution.
pub const RECOVERY_TOL: f64 = 1e-8;

/// Counts, for sampled pairs of cosets, the elements of `σ(G/H)` carrying
/// one to the other.
///
/// Each sample draws a solution `s` and a right factor `m` from the region
/// and sets `b = s ∗ m`; the implicit equations for the unknown left factor
/// are then scanned over the region. Sharp transitivity on the region means
/// exactly one root, and that root is `s`.
pub fn sharp_transitivity_check(
    spec: &SectionSpec,
    cfg: &TransitivityConfig,
) -> TransitivityReport {
    let mut report = VerificationReport::new(Some(cfg.seed));
    if spec.case == SectionCase::A {
        report.push(CheckEntry::flag(
            "unique-root",
            Status::Pass,
            0,
            "case A: right division is closed form, every continuous f(x,z) is sharply transitive",
        ));
        return TransitivityReport {
            report,
            root_counts: Vec::new(),
            nonconverged: 0,
        };
    }

    let lc = LoopCase::with_verdict(spec.clone(), None);
    let mut sampler = Sampler::new(cfg.seed);
    let pairs: Vec<(LoopPoint, LoopPoint)> = (0..cfg.samples)
        .map(|_| (sampler.point(&cfg.region), sampler.point(&cfg.region)))
        .collect();

    struct Outcome {
        count: usize,
        nonconverged: bool,
        residual: f64,
        recovery: f64,
    }

    let outcomes: Vec<Outcome> = pairs
        .par_iter()
        .map(|&(solution, right)| {
            let b = lc.mul(solution, right);
            match spec.case {
                SectionCase::C => {
                    let (y1, z1, r) = lc.rdiv_equation_c(b, right);
                    let interval = SearchBox::new([cfg.region.lower[0]], [cfg.region.upper[0]])
                        .expect("valid region");
                    let roots = root1d(&r, &interval, &cfg.scan);
                    let residual = roots
                        .iter()
                        .map(|&x| r(x).abs())
                        .collect::<MaxError>()
                        .get();
                    let recovery = match roots.as_slice() {
                        [x] => LoopPoint::new(*x, y1, z1).distance(&solution),
                        _ => f64::INFINITY,
                    };
                    Outcome {
                        count: roots.len(),
                        nonconverged: false,
                        residual,
                        recovery,
                    }
                }
                SectionCase::B => {
                    let (z1, fb) = lc.rdiv_equation_b(b, right);
                    let plane = SearchBox::new(
                        [cfg.region.lower[0], cfg.region.lower[1]],
                        [cfg.region.upper[0], cfg.region.upper[1]],
                    )
                    .expect("valid region");
                    let res = root2d(&fb, &plane, &cfg.newton);
                    let residual = res
                        .roots
                        .iter()
                        .map(|r| {
                            let v = fb(*r);
                            v[0].abs().max(v[1].abs())
                        })
                        .collect::<MaxError>()
                        .get();
                    let recovery = match res.roots.as_slice() {
                        [r] => LoopPoint::new(r[0], r[1], z1).distance(&solution),
                        _ => f64::INFINITY,
                    };
                    Outcome {
                        count: res.roots.len(),
                        nonconverged: res.nonconvergent(),
                        residual,
                        recovery,
                    }
                }
                SectionCase::A => unreachable!(),
            }
        })
        .collect();

    let root_counts: Vec<usize> = outcomes.iter().map(|o| o.count).collect();
    let nonconverged = outcomes.iter().filter(|o| o.nonconverged).count();
    let none = root_counts.iter().filter(|&&c| c == 0).count();
    let multiple = root_counts.iter().filter(|&&c| c > 1).count();
    let unique = cfg.samples - none - multiple;
    let status = if none + multiple == 0 {
        Status::Pass
    } else {
        Status::Fail
    };
    report.push(CheckEntry::flag(
        "unique-root",
        status,
        cfg.samples,
        format!(
            "{unique} unique, {none} without root, {multiple} with multiple roots, {nonconverged} solver failures (on tested box)"
        ),
    ));
    let residual: MaxError = outcomes.iter().map(|o| o.residual).collect();
    let tol = if spec.case == SectionCase::B {
        10.0 * cfg.newton.tol
    } else {
        1e-8
    };
    report.push(CheckEntry::measured(
        "root-residual",
        residual.get(),
        tol,
        cfg.samples,
    ));
    let recovery: MaxError = outcomes.iter().map(|o| o.recovery).collect();
    report.push(CheckEntry::measured(
        "solution-recovered",
        recovery.get(),
        RECOVERY_TOL,
        cfg.samples,
    ));
    TransitivityReport {
        report,
        root_counts,
        nonconverged,
    }
}
