//! Command-line front end and JSON reports.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::algebra::{
    apply_automorphism, bracket, bracket_matrix, exp_alg, AlgebraVector, StructureConstants,
};
use crate::error::Result;
use crate::expr::{self, Var};
use crate::group::{GroupElement, GroupParam};
use crate::loops::{
    associativity_search, axiom_suite, normal_subloop_check, LoopCase, SampleConfig,
    ASSOCIATIVITY_WITNESS,
};
use crate::multgroup::{theorem2_certificate, Theorem2Config};
use crate::numerics::{functional_equation_defect, functional_fit, linspace, ScanConfig};
use crate::report::{CheckEntry, MaxError, Status, VerificationReport};
use crate::sampling::{Sampler, DEFAULT_SEED};
use crate::sections::{
    degeneracy_report, sharp_transitivity_check, DegeneracyConfig, Preset, SectionCase,
    SectionSpec, TransitivityConfig,
};
use crate::subgroups::{
    classify_subalgebra, commutator_generator, fixed_point_residual, fixed_point_witness,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Writes every `f64` with 17 significant digits; the layout is that of
/// [`PrettyFormatter`].
pub struct FloatFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FloatFormatter<'_> {
    fn default() -> Self {
        FloatFormatter {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for FloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// JSON text of `value` with [`FloatFormatter`]; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter::default());
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSource {
    Preset {
        name: String,
        coefficient: Option<f64>,
    },
    Expression {
        text: String,
    },
}

/// The parameters of one run, echoed into its report. The output path is
/// not echoed so that reports do not depend on where they are written.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<SectionCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn tol(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    fn input(mut self, name: &str, value: impl Serialize) -> Self {
        self.inputs.insert(
            name.to_string(),
            serde_json::to_value(value).expect("serializable input"),
        );
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub status: Status,
    pub seed: u64,
    pub config: RunConfig,
    pub checks: Vec<CheckEntry>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, checks: Vec<CheckEntry>, data: Value) -> Self {
        let status = checks.iter().fold(Status::Pass, |s, c| s.combine(c.status));
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            status,
            seed: config.seed,
            config,
            checks,
            data,
            wall_time_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass | Status::Warn => 0,
            Status::Fail => 1,
        }
    }
}

/// Writes the report to `path`, or to standard output.
pub fn emit_report(report: &Report, path: Option<&Path>) -> io::Result<()> {
    let text = to_json(report);
    match path {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "solvable-loops",
    version,
    about = "Loops from sharply transitive sections in G(a)"
)]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Include the wall time in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    record_time: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(id = "function", required = true, multiple = false)]
struct FunctionArgs {
    /// Expression in x, z (case A) or x, y, z (cases B, C).
    #[arg(long = "fn", group = "function")]
    expr: Option<String>,
    /// zero, linear-x, bilinear, lemma1, sin-small
    #[arg(long, group = "function")]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct SectionArgs {
    #[arg(long)]
    case: SectionCase,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[command(flatten)]
    function: FunctionArgs,
    /// K for lemma1, ε for sin-small.
    #[arg(long, allow_hyphen_values = true)]
    coef: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Product law against the matrix representation, inverse,
    /// associativity, bracket table and exponential.
    VerifyGroup {
        /// Group parameters (default: -1, 0.5, 1, 2).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        a: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Reduce span(b1 e3 + b2 e1 + b3 e2) to a canonical subalgebra.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b1: f64,
        #[arg(long, allow_hyphen_values = true)]
        b2: f64,
        #[arg(long, allow_hyphen_values = true)]
        b3: f64,
    },
    /// Loop axioms, coset cross-check, generation and associativity.
    LoopCheck {
        #[command(flatten)]
        section: SectionArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Half-width of the sampling cube.
        #[arg(long = "box", default_value_t = 5.0)]
        half_width: f64,
    },
    /// Whether the section's image generates G.
    Generation {
        #[command(flatten)]
        section: SectionArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long = "box", default_value_t = 5.0)]
        half_width: f64,
    },
    /// Root counts of the right-division equations on a box.
    Transitivity {
        #[command(flatten)]
        section: SectionArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long = "box", default_value_t = 5.0)]
        half_width: f64,
        #[arg(long, default_value_t = 10_000)]
        resolution: usize,
    },
    /// Normalizers of the stabilizers and the center of G.
    Theorem2 {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Fit f(z) = K (1 - e^{-z}) and test f(z2) + e^{-z2} f(z1) = f(z1 + z2).
    Lemma1 {
        /// Expression in z.
        #[arg(long = "fn", conflicts_with = "k", required_unless_present = "k")]
        expr: Option<String>,
        #[arg(long = "K", allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long = "box", default_value_t = 2.0)]
        half_width: f64,
    },
    /// Fixed coset of g on G/H4.
    FixedPoint {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        /// x1,x2,x3,x4
        #[arg(long, allow_hyphen_values = true, value_parser = parse_element)]
        g: GroupElement,
    },
}

/// Parses `argv` (program name first), runs the command and writes its
/// report. Returns 0 on pass or warn, 1 on fail and 2 on usage errors.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let mut report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    if cli.record_time {
        report.wall_time_ms = Some(elapsed);
    }
    if let Err(e) = emit_report(&report, cli.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return 2;
    }
    eprintln!("{}: {:?} ({elapsed:.1} ms)", report.command, report.status);
    report.exit_code()
}

fn base_config(cli: &Cli) -> RunConfig {
    RunConfig {
        seed: cli.seed,
        out: cli.out.clone(),
        ..Default::default()
    }
}

fn build_section(args: &SectionArgs) -> Result<(SectionSpec, FunctionSource)> {
    let p = GroupParam::new(args.a)?;
    match (&args.function.expr, &args.function.preset) {
        (Some(text), _) => Ok((
            SectionSpec::parse(args.case, p, text)?,
            FunctionSource::Expression { text: text.clone() },
        )),
        (None, Some(name)) => {
            let preset = Preset::from_name(name, args.coef).map_err(crate::Error::InvalidPreset)?;
            let source = FunctionSource::Preset {
                name: name.clone(),
                coefficient: args.coef,
            };
            Ok((SectionSpec::preset(args.case, p, preset)?, source))
        }
        (None, None) => unreachable!("clap requires --fn or --preset"),
    }
}

fn section_config(cli: &Cli, args: &SectionArgs, source: FunctionSource) -> RunConfig {
    RunConfig {
        a: vec![args.a],
        case: Some(args.case),
        function: Some(source),
        ..base_config(cli)
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::VerifyGroup { a, samples } => {
            let params = if a.is_empty() {
                vec![-1.0, 0.5, 1.0, 2.0]
            } else {
                a.clone()
            };
            let mut checks = Vec::new();
            for &value in &params {
                let p = GroupParam::new(value)?;
                checks.extend(verify_group(p, *samples, cli.seed).entries);
            }
            let config = RunConfig {
                a: params,
                samples: Some(*samples),
                half_width: Some(5.0),
                ..base_config(cli)
            }
            .tol("product", 1e-12)
            .tol("exp", 1e-10);
            Ok(Report::new("verify-group", config, checks, json!({})))
        }
        Command::Classify { a, b1, b2, b3 } => {
            let p = GroupParam::new(*a)?;
            let class = classify_subalgebra(p, *b1, *b2, *b3)?;
            let generator = commutator_generator(*b1, *b2, *b3);
            let mut checks = Vec::new();
            let mut image = None;
            if let (Some(sub), Some(phi)) = (class.subgroup(), class.automorphism()) {
                let img = apply_automorphism(p, &phi, generator)?;
                checks.push(CheckEntry::measured(
                    "collinearity",
                    img.collinearity_residual(sub.canonical_generator()),
                    1e-12,
                    1,
                ));
                checks.push(CheckEntry::measured(
                    "bracket-preservation",
                    bracket_preservation(p, &phi)?,
                    1e-12,
                    16,
                ));
                image = Some(img);
            } else {
                checks.push(CheckEntry::flag(
                    "classification",
                    Status::Pass,
                    1,
                    "the span is an ideal, so the subgroup is normal and cannot be a stabilizer",
                ));
            }
            let config = base_config(cli)
                .input("b1", b1)
                .input("b2", b2)
                .input("b3", b3)
                .tol("collinearity", 1e-12);
            let config = RunConfig {
                a: vec![*a],
                ..config
            };
            let data = json!({ "class": class, "label": class.label(), "generator": generator, "image": image });
            Ok(Report::new("classify", config, checks, data))
        }
        Command::LoopCheck {
            section,
            samples,
            half_width,
        } => {
            let (spec, source) = build_section(section)?;
            let lc = LoopCase::new(spec);
            let cfg = SampleConfig::new(*half_width, *samples, cli.seed)?;
            let mut checks = axiom_suite(&lc, &cfg).entries;
            let verdict = lc
                .verdict
                .clone()
                .expect("verdict computed by LoopCase::new");
            checks.push(generation_entry(verdict.generates, verdict.samples));
            let witness = associativity_search(&lc, &cfg);
            checks.push(associativity_entry(
                verdict.generates,
                witness.defect,
                witness.samples,
            ));
            if lc.case() == SectionCase::A {
                checks.extend(normal_subloop_check(&lc, &cfg)?.entries);
            }
            let config = RunConfig {
                half_width: Some(*half_width),
                samples: Some(*samples),
                ..section_config(cli, section, source)
            }
            .tol("ldiv", crate::loops::LDIV_TOL)
            .tol("rdiv", crate::loops::RDIV_TOL)
            .tol("coset-cross-check", crate::loops::CROSS_CHECK_TOL)
            .tol("associativity-witness", ASSOCIATIVITY_WITNESS);
            let data = json!({
                "function": lc.spec.func.source(),
                "generation": verdict,
                "associativity_witness": witness,
            });
            Ok(Report::new("loop-check", config, checks, data))
        }
        Command::Generation {
            section,
            points,
            half_width,
        } => {
            let (spec, source) = build_section(section)?;
            let cfg = DegeneracyConfig {
                points_per_axis: *points,
                half_width: *half_width,
                ..Default::default()
            };
            let verdict = degeneracy_report(&spec, &cfg);
            let checks = vec![generation_entry(verdict.generates, verdict.samples)];
            let config = RunConfig {
                half_width: Some(*half_width),
                samples: Some(*points),
                ..section_config(cli, section, source)
            }
            .tol("identity", cfg.identity_tol)
            .tol("fit-rms", cfg.fit_tol);
            Ok(Report::new(
                "generation",
                config,
                checks,
                json!({ "function": spec.func.source(), "verdict": verdict }),
            ))
        }
        Command::Transitivity {
            section,
            samples,
            half_width,
            resolution,
        } => {
            let (spec, source) = build_section(section)?;
            let mut cfg = TransitivityConfig::new(*half_width, *samples, cli.seed)?;
            cfg.scan = ScanConfig {
                resolution: *resolution,
                ..cfg.scan
            };
            let result = sharp_transitivity_check(&spec, &cfg);
            let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
            for c in &result.root_counts {
                *histogram.entry(c.to_string()).or_default() += 1;
            }
            let config = RunConfig {
                half_width: Some(*half_width),
                samples: Some(*samples),
                ..section_config(cli, section, source)
            }
            .input("resolution", resolution)
            .tol("bisection", cfg.scan.tol)
            .tol("newton", cfg.newton.tol);
            let data = json!({
                "function": spec.func.source(),
                "root_count_histogram": histogram,
                "root_counts": result.root_counts,
                "nonconverged": result.nonconverged,
            });
            Ok(Report::new(
                "transitivity",
                config,
                result.report.entries,
                data,
            ))
        }
        Command::Theorem2 { a, samples } => {
            let p = GroupParam::new(*a)?;
            let cert = theorem2_certificate(p, &Theorem2Config::new(*samples, cli.seed));
            let mut checks: Vec<CheckEntry> = cert
                .records
                .iter()
                .map(|r| {
                    let status = if r.normalizer_equals_commutator { Status::Pass } else { Status::Fail };
                    CheckEntry::flag(
                        format!("normalizer:{:?}", r.subgroup),
                        status,
                        r.slab_samples + r.off_samples,
                        format!(
                            "{}/{} with x4 = 0 normalize, {}/{} with x4 != 0 normalize (sampled estimate of N_G = G')",
                            r.slab_normalizing, r.slab_samples, r.off_normalizing, r.off_samples
                        ),
                    )
                })
                .collect();
            checks.push(CheckEntry::flag(
                "center-trivial",
                if cert.center_trivial {
                    Status::Pass
                } else {
                    Status::Fail
                },
                cert.center.len() + cert.random_directions,
                format!("algebraic center dimension {}", cert.center_dimension),
            ));
            checks.push(CheckEntry::flag(
                "contradiction",
                if cert.contradiction {
                    Status::Pass
                } else {
                    Status::Fail
                },
                1,
                cert.hypothesis.clone(),
            ));
            let config = RunConfig {
                a: vec![*a],
                samples: Some(*samples),
                ..base_config(cli)
            };
            Ok(Report::new(
                "theorem2",
                config,
                checks,
                json!({ "certificate": cert }),
            ))
        }
        Command::Lemma1 {
            expr,
            k,
            samples,
            half_width,
        } => {
            let (f, source): (Box<dyn Fn(f64) -> f64>, FunctionSource) = match (expr, k) {
                (Some(text), _) => {
                    let tree = expr::parse_function_expr(text, &[Var::Z])?;
                    (
                        Box::new(move |z| tree.eval(0.0, 0.0, z).unwrap_or(f64::NAN)),
                        FunctionSource::Expression { text: text.clone() },
                    )
                }
                (None, Some(k)) => {
                    let k = *k;
                    (
                        Box::new(move |z: f64| -k * (-z).exp_m1()),
                        FunctionSource::Preset {
                            name: "lemma1".into(),
                            coefficient: Some(k),
                        },
                    )
                }
                (None, None) => unreachable!("clap requires --fn or --K"),
            };
            let zs = linspace(-half_width, *half_width, *samples);
            let pts: Vec<(f64, f64)> = zs.iter().map(|&z| (z, f(z))).collect();
            let fit = functional_fit(&pts)?;
            let defect = functional_equation_defect(&f, &zs);
            let checks = vec![
                CheckEntry::measured("fit-rms", fit.rms_residual, 1e-9, fit.n_samples),
                CheckEntry::measured("functional-equation", defect, 1e-12, zs.len() * zs.len()),
            ];
            let config = RunConfig {
                function: Some(source),
                half_width: Some(*half_width),
                samples: Some(*samples),
                ..base_config(cli)
            }
            .tol("fit-rms", 1e-9)
            .tol("functional-equation", 1e-12);
            Ok(Report::new(
                "lemma1",
                config,
                checks,
                json!({ "fit": fit, "functional_equation_defect": defect }),
            ))
        }
        Command::FixedPoint { a, g } => {
            let p = GroupParam::new(*a)?;
            let m = fixed_point_witness(p, g)?;
            let residual = fixed_point_residual(p, g, m);
            let checks = vec![CheckEntry::measured(
                "fixed-coset-equation",
                residual,
                1e-10,
                1,
            )];
            let config = RunConfig {
                a: vec![*a],
                ..base_config(cli)
            }
            .input("g", g)
            .tol("fixed-coset-equation", 1e-10);
            Ok(Report::new(
                "fixed-point",
                config,
                checks,
                json!({ "witness": m, "residual": residual }),
            ))
        }
    }
}

fn parse_element(text: &str) -> std::result::Result<GroupElement, String> {
    let coords = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    match coords.as_slice() {
        &[x1, x2, x3, x4] => Ok(GroupElement::new(x1, x2, x3, x4)),
        _ => Err(format!(
            "expected 4 comma-separated coordinates, got {}",
            coords.len()
        )),
    }
}

fn generation_entry(generates: bool, samples: usize) -> CheckEntry {
    if generates {
        CheckEntry::flag(
            "generation",
            Status::Pass,
            samples,
            "section generates G on the tested box: proper loop",
        )
    } else {
        CheckEntry::flag(
            "generation",
            Status::Warn,
            samples,
            "both identities hold on the tested box: degenerate family, left translations generate a proper subgroup",
        )
    }
}

fn associativity_entry(generates: bool, defect: f64, samples: usize) -> CheckEntry {
    let witnessed = defect > ASSOCIATIVITY_WITNESS;
    let (status, note) = match (generates, witnessed) {
        (true, true) => (Status::Pass, "non-associative triple found"),
        (true, false) => (Status::Warn, "no non-associative triple found in the samples"),
        (false, false) => (Status::Pass, "associative on the samples, consistent with a group"),
        (false, true) => (
            Status::Warn,
            "non-associative although both identities hold: the identities are necessary but not sufficient for degeneracy",
        ),
    };
    CheckEntry::flag(
        "associativity",
        status,
        samples,
        format!("{note}; max defect {defect:.3e}"),
    )
}

/// `max |φ[e_i, e_j] - [φ e_i, φ e_j]|` over basis pairs.
fn bracket_preservation(p: GroupParam, phi: &crate::algebra::AutomorphismParams) -> Result<f64> {
    let mut worst = MaxError::default();
    for i in 0..4 {
        for j in 0..4 {
            let (u, v) = (AlgebraVector::basis(i), AlgebraVector::basis(j));
            let lhs = apply_automorphism(p, phi, bracket(p, u, v))?;
            let rhs = bracket(
                p,
                apply_automorphism(p, phi, u)?,
                apply_automorphism(p, phi, v)?,
            );
            worst.update(lhs.max_abs_diff(rhs));
        }
    }
    Ok(worst.get())
}

/// Group-law sweep for one parameter: the product against the matrix
/// representation, inverses, associativity, the bracket table against
/// matrix commutators and the one-parameter property of `exp`.
pub fn verify_group(p: GroupParam, samples: usize, seed: u64) -> VerificationReport {
    let mut sampler = Sampler::new(seed);
    let triples: Vec<[GroupElement; 3]> = (0..samples)
        .map(|_| {
            [
                sampler.element(5.0),
                sampler.element(5.0),
                sampler.element(5.0),
            ]
        })
        .collect();
    let tag = |name: &str| format!("{name}[a={}]", p.a());

    let rows: Vec<[f64; 3]> = triples
        .par_iter()
        .map(|[g, h, k]| {
            let oracle = (p.as_matrix(g) * p.as_matrix(h)).max_rel_diff(&p.as_matrix(&p.mul(g, h)));
            let inverse = p.mul(g, &p.inv(g)).rel_distance(&GroupElement::IDENTITY);
            let assoc = p.mul(&p.mul(g, h), k).rel_distance(&p.mul(g, &p.mul(h, k)));
            [oracle, inverse, assoc]
        })
        .collect();
    let column = |i: usize| rows.iter().map(|r| r[i]).collect::<MaxError>().get();

    let mut report = VerificationReport::new(Some(seed));
    report.push(CheckEntry::measured(
        tag("matrix-oracle"),
        column(0),
        1e-12,
        samples,
    ));
    report.push(CheckEntry::measured(
        tag("inverse"),
        column(1),
        1e-12,
        samples,
    ));
    report.push(CheckEntry::measured(
        tag("associativity"),
        column(2),
        1e-12,
        samples,
    ));

    let table = StructureConstants::new(p);
    report.push(CheckEntry::measured(
        tag("antisymmetry"),
        table.antisymmetry_defect(),
        0.0,
        16,
    ));
    report.push(CheckEntry::measured(
        tag("jacobi"),
        table.jacobi_defect(),
        0.0,
        64,
    ));

    // small integer coefficients keep every product exact
    let mut commutator = MaxError::default();
    let int_vector =
        |s: &mut Sampler| AlgebraVector::from_array([(); 4].map(|_| s.uniform(-4.0, 4.0).round()));
    let pairs: Vec<(AlgebraVector, AlgebraVector)> = (0..200)
        .map(|_| (int_vector(&mut sampler), int_vector(&mut sampler)))
        .collect();
    for &(u, v) in &pairs {
        let lhs = bracket_matrix(p, bracket(p, u, v));
        let rhs = bracket_matrix(p, u).commutator(&bracket_matrix(p, v));
        commutator.update(lhs.max_abs_diff(&rhs));
    }
    report.push(CheckEntry::measured(
        tag("bracket-vs-commutator"),
        commutator.get(),
        0.0,
        pairs.len(),
    ));

    let flows: Vec<(AlgebraVector, f64, f64)> = (0..200)
        .map(|_| {
            let v = AlgebraVector::from_array([(); 4].map(|_| sampler.uniform(-1.0, 1.0)));
            (v, sampler.uniform(-1.0, 1.0), sampler.uniform(-1.0, 1.0))
        })
        .collect();
    let one_param: MaxError = flows
        .iter()
        .map(|&(v, s, t)| {
            exp_alg(p, v, s + t).distance(&p.mul(&exp_alg(p, v, s), &exp_alg(p, v, t)))
        })
        .collect();
    report.push(CheckEntry::measured(
        tag("exp-one-parameter"),
        one_param.get(),
        1e-10,
        flows.len(),
    ));
    report
}
