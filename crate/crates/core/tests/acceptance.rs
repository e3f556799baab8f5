//! Acceptance suite. Every oracle below is computed locally from 4×4
//! matrices or literal closed forms; the library is only the system under
//! test. One line is printed per criterion and the process exits nonzero if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use solvable_loops::algebra::{apply_automorphism, bracket, exp_alg, AlgebraVector};
use solvable_loops::loops::{associativity_search, LoopCase, LoopPoint, SampleConfig};
use solvable_loops::multgroup::{normalizes, theorem2_certificate, Theorem2Config};
use solvable_loops::numerics::{functional_equation_defect, functional_fit, linspace};
use solvable_loops::sampling::Sampler;
use solvable_loops::sections::{
    degeneracy_report, sharp_transitivity_check, DegeneracyConfig, Preset, SectionCase,
    SectionSpec, TransitivityConfig,
};
use solvable_loops::subgroups::{
    classify_subalgebra, commutator_generator, fixed_point_witness, SubgroupId,
};
use solvable_loops::{GroupElement, GroupParam};

const PARAMS: [f64; 4] = [-1.0, 0.5, 1.0, 2.0];
const SEED: u64 = 20_240_601;

const GROUP_REL_TOL: f64 = 1e-12;
const EXP_MEMBERSHIP_TOL: f64 = 1e-9;
const COLLINEARITY_TOL: f64 = 1e-12;
const BRACKET_PRESERVATION_TOL: f64 = 1e-12;
const DIVISION_TOL: f64 = 1e-8;
const CROSS_CHECK_TOL: f64 = 1e-10;
const WITNESS_MIN: f64 = 1e-6;
const FIT_TOL: f64 = 1e-9;
const FUNCTIONAL_EQ_TOL: f64 = 1e-12;
const PERTURBED_MIN: f64 = 1e-4;
const SCAN_RESOLUTION: usize = 10_000;
const EXPLICIT_ROOT_TOL: f64 = 1e-8;
const FIXED_POINT_TOL: f64 = 1e-10;
const MEMBERSHIP_TOL: f64 = 1e-10;

type M4 = [[f64; 4]; 4];
type Criterion = fn() -> (bool, String);

fn p(a: f64) -> GroupParam {
    GroupParam::new(a).unwrap()
}

fn matrix(a: f64, g: [f64; 4]) -> M4 {
    let [x1, x2, x3, x4] = g;
    let (ea, e) = ((a * x4).exp(), x4.exp());
    [
        [ea, 0.0, 0.0, x1],
        [0.0, e, x4 * e, x2],
        [0.0, 0.0, e, x3],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

fn matmul(l: &M4, r: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| l[i][k] * r[k][j]).sum();
        }
    }
    out
}

fn coords(m: &M4) -> [f64; 4] {
    [m[0][3], m[1][3], m[2][3], m[2][2].ln()]
}

fn gmul(a: f64, g: [f64; 4], h: [f64; 4]) -> [f64; 4] {
    coords(&matmul(&matrix(a, g), &matrix(a, h)))
}

fn rel_matrix_diff(l: &M4, r: &M4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((l[i][j] - r[i][j]).abs() / r[i][j].abs().max(1.0));
        }
    }
    worst
}

fn max_abs(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn rel(u: &[f64], v: &[f64]) -> f64 {
    max_abs(u, v) / v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

/// Algebra generators of the matrix group, with `e4 ↦ -X4`.
fn generator(a: f64, v: [f64; 4]) -> M4 {
    let mut m = [[0.0; 4]; 4];
    m[0][3] = v[0];
    m[1][3] = v[1];
    m[2][3] = v[2];
    m[0][0] = -a * v[3];
    m[1][1] = -v[3];
    m[2][2] = -v[3];
    m[1][2] = -v[3];
    m
}

fn commutator(l: &M4, r: &M4) -> M4 {
    let (lr, rl) = (matmul(l, r), matmul(r, l));
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = lr[i][j] - rl[i][j];
        }
    }
    out
}

/// `[e1,e4] = a e1`, `[e2,e4] = e2`, `[e3,e4] = e2 + e3`, all others zero.
fn table_bracket(a: f64, u: [f64; 4], v: [f64; 4]) -> [f64; 4] {
    let c14 = u[0] * v[3] - u[3] * v[0];
    let c24 = u[1] * v[3] - u[3] * v[1];
    let c34 = u[2] * v[3] - u[3] * v[2];
    [a * c14, c24 + c34, c34, 0.0]
}

fn in_subgroup(sub: SubgroupId, g: [f64; 4], tol: f64) -> bool {
    let [x1, x2, x3, x4] = g;
    let z = |v: f64| v.abs() <= tol;
    match sub {
        SubgroupId::H1 => z(x1) && z(x2) && z(x4),
        SubgroupId::H2 => z(x2) && z(x4) && z(x1 - x3),
        SubgroupId::H3 => z(x3) && z(x4) && z(x1 - x2),
        SubgroupId::H4 => z(x1) && z(x2) && z(x3),
    }
}

fn random_element(s: &mut Sampler, hw: f64) -> [f64; 4] {
    [(); 4].map(|_| s.uniform(-hw, hw))
}

fn criterion_1() -> (bool, String) {
    let mut s = Sampler::new(SEED);
    let (mut prod, mut inv, mut assoc) = (0.0f64, 0.0f64, 0.0f64);
    for a in PARAMS {
        let gp = p(a);
        for _ in 0..10_000 {
            let (g, h, k) = (
                random_element(&mut s, 5.0),
                random_element(&mut s, 5.0),
                random_element(&mut s, 5.0),
            );
            let (ge, he, ke) = (
                GroupElement::from_array(g),
                GroupElement::from_array(h),
                GroupElement::from_array(k),
            );
            let lib = gp.mul(&ge, &he).to_array();
            prod = prod.max(rel_matrix_diff(
                &matrix(a, lib),
                &matmul(&matrix(a, g), &matrix(a, h)),
            ));
            let gi = gp.inv(&ge).to_array();
            let id = matmul(&matrix(a, g), &matrix(a, gi));
            inv = inv.max(rel_matrix_diff(&id, &matrix(a, [0.0; 4])));
            let l = gp.mul(&gp.mul(&ge, &he), &ke).to_array();
            let r = gp.mul(&ge, &gp.mul(&he, &ke)).to_array();
            assoc = assoc.max(rel(&l, &r));
        }
    }
    let ok = prod <= GROUP_REL_TOL && inv <= GROUP_REL_TOL && assoc <= GROUP_REL_TOL;
    (ok, format!("product {prod:.2e}, inverse {inv:.2e}, associativity {assoc:.2e} (tol {GROUP_REL_TOL:e})"))
}

fn criterion_2() -> (bool, String) {
    let mut s = Sampler::new(SEED + 2);
    let int = |s: &mut Sampler| [(); 4].map(|_| s.uniform(-6.0, 6.0).round());
    let (mut comm, mut table, mut jacobi) = (0.0f64, 0.0f64, 0.0f64);
    for a in PARAMS {
        for _ in 0..1000 {
            let (u, v, w) = (int(&mut s), int(&mut s), int(&mut s));
            let (uv, vv, wv) = (
                AlgebraVector::from_array(u),
                AlgebraVector::from_array(v),
                AlgebraVector::from_array(w),
            );
            let b = bracket(p(a), uv, vv).to_array();
            let lhs = generator(a, b);
            let rhs = commutator(&generator(a, u), &generator(a, v));
            comm = comm.max(max_abs(lhs.as_flattened(), rhs.as_flattened()));
            table = table.max(max_abs(&b, &table_bracket(a, u, v)));
            let br = |x, y| bracket(p(a), x, y);
            let j = br(uv, br(vv, wv)) + br(vv, br(wv, uv)) + br(wv, br(uv, vv));
            jacobi = jacobi.max(j.norm());
        }
    }
    let mut membership = 0.0f64;
    let gens = [
        (SubgroupId::H1, [0.0, 0.0, 1.0, 0.0]),
        (SubgroupId::H2, [1.0, 0.0, 1.0, 0.0]),
        (SubgroupId::H3, [1.0, 1.0, 0.0, 0.0]),
        (SubgroupId::H4, [0.0, 0.0, 0.0, 1.0]),
    ];
    let mut all_in = true;
    for a in PARAMS {
        for (sub, v) in gens {
            if a == 1.0 && matches!(sub, SubgroupId::H2 | SubgroupId::H3) {
                continue;
            }
            for t in linspace(-3.0, 3.0, 25) {
                let g = exp_alg(p(a), AlgebraVector::from_array(v), t).to_array();
                let [x1, x2, x3, x4] = g;
                let r = match sub {
                    SubgroupId::H1 => x1.abs().max(x2.abs()).max(x4.abs()),
                    SubgroupId::H2 => x2.abs().max(x4.abs()).max((x1 - x3).abs()),
                    SubgroupId::H3 => x3.abs().max(x4.abs()).max((x1 - x2).abs()),
                    SubgroupId::H4 => x1.abs().max(x2.abs()).max(x3.abs()),
                };
                membership = membership.max(r);
                all_in &= in_subgroup(sub, g, EXP_MEMBERSHIP_TOL);
            }
        }
    }
    let ok = comm == 0.0 && table == 0.0 && jacobi == 0.0 && all_in;
    (
        ok,
        format!(
            "commutator {comm:e}, table {table:e}, jacobi {jacobi:e} (exact); exp membership {membership:.2e} (tol {EXP_MEMBERSHIP_TOL:e})"
        ),
    )
}

fn expected_class(a: f64, b: [f64; 3]) -> &'static str {
    let [b1, b2, b3] = b;
    if a == 1.0 {
        return if b1 != 0.0 {
            "H1"
        } else {
            "NormalInadmissible"
        };
    }
    match (b1 != 0.0, b2 != 0.0, b3 != 0.0) {
        (true, false, _) => "H1",
        (true, true, _) => "H2",
        (false, true, true) => "H3",
        _ => "NormalInadmissible",
    }
}

fn criterion_3() -> (bool, String) {
    let mut points: Vec<(f64, [f64; 3])> = Vec::new();
    let values = [-2.0, -0.5, 0.0, 1.0, 3.0];
    for a in PARAMS {
        for b1 in values {
            for b2 in values {
                for b3 in values {
                    if [b1, b2, b3] != [0.0; 3] {
                        points.push((a, [b1, b2, b3]));
                    }
                }
            }
        }
    }
    let mut s = Sampler::new(SEED + 3);
    while points.len() < 1000 {
        let a = PARAMS[(s.uniform(0.0, 3.999) as usize).min(3)];
        let b = [(); 3].map(|_| {
            if s.uniform(0.0, 1.0) < 0.3 {
                0.0
            } else {
                s.uniform(-4.0, 4.0)
            }
        });
        if b != [0.0; 3] {
            points.push((a, b));
        }
    }

    let basis = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let (mut mismatches, mut collinear, mut preserve) = (0usize, 0.0f64, 0.0f64);
    for &(a, b) in &points {
        let class = classify_subalgebra(p(a), b[0], b[1], b[2]).unwrap();
        if class.label() != expected_class(a, b) {
            mismatches += 1;
            continue;
        }
        let (Some(sub), Some(phi)) = (class.subgroup(), class.automorphism()) else {
            continue;
        };
        let image = apply_automorphism(p(a), &phi, commutator_generator(b[0], b[1], b[2]))
            .unwrap()
            .to_array();
        let target = sub.canonical_generator().to_array();
        let k = image.iter().zip(&target).map(|(x, y)| x * y).sum::<f64>()
            / target.iter().map(|y| y * y).sum::<f64>();
        let scaled: Vec<f64> = target.iter().map(|y| k * y).collect();
        collinear = collinear.max(max_abs(&image, &scaled) / k.abs().max(1e-300));
        let phi_of = |v: [f64; 4]| {
            apply_automorphism(p(a), &phi, AlgebraVector::from_array(v))
                .unwrap()
                .to_array()
        };
        for u in basis {
            for v in basis {
                let lhs = phi_of(table_bracket(a, u, v));
                let rhs = table_bracket(a, phi_of(u), phi_of(v));
                preserve = preserve.max(rel(&lhs, &rhs));
            }
        }
    }
    let ok =
        mismatches == 0 && collinear <= COLLINEARITY_TOL && preserve <= BRACKET_PRESERVATION_TOL;
    (
        ok,
        format!(
            "{} points, {mismatches} class mismatches, collinearity {collinear:.2e}, bracket preservation {preserve:.2e} (tol 1e-12)",
            points.len()
        ),
    )
}

fn local_f(preset: Preset, m: LoopPoint) -> f64 {
    match preset {
        Preset::Zero => 0.0,
        Preset::LinearX => m.x,
        Preset::SinSmall { eps } => eps * m.x.sin(),
        _ => unreachable!("not used by the loop criterion"),
    }
}

fn embed(case: SectionCase, m: LoopPoint) -> [f64; 4] {
    match case {
        SectionCase::A | SectionCase::B => [m.x, m.y, 0.0, m.z],
        SectionCase::C => [m.x, 0.0, m.y, m.z],
    }
}

fn stabilizer(case: SectionCase, k: f64) -> [f64; 4] {
    match case {
        SectionCase::A => [0.0, 0.0, k, 0.0],
        SectionCase::B => [k, 0.0, k, 0.0],
        SectionCase::C => [k, k, 0.0, 0.0],
    }
}

/// `σ(m1) · m2` compared with `embed(m1 ∗ m2) · h(k)`, where `k` is read off
/// the coordinate that the stabilizer factor moves on its own.
fn coset_defect(
    a: f64,
    case: SectionCase,
    preset: Preset,
    m1: LoopPoint,
    m2: LoopPoint,
    prod: LoopPoint,
) -> f64 {
    let lift = gmul(a, embed(case, m1), stabilizer(case, local_f(preset, m1)));
    let g = gmul(a, lift, embed(case, m2));
    let k = (-prod.z).exp() * if case == SectionCase::C { g[1] } else { g[2] };
    let rebuilt = gmul(a, embed(case, prod), stabilizer(case, k));
    max_abs(&rebuilt, &g)
}

fn criterion_4() -> (bool, String) {
    let mut runs: Vec<(SectionCase, Preset, f64)> = Vec::new();
    for a in [-1.0, 0.5, 2.0] {
        runs.push((SectionCase::A, Preset::LinearX, a));
        runs.push((SectionCase::A, Preset::Zero, a));
    }
    for case in [SectionCase::B, SectionCase::C] {
        runs.push((case, Preset::Zero, 0.5));
        runs.push((
            case,
            Preset::SinSmall {
                eps: Preset::DEFAULT_EPS,
            },
            0.5,
        ));
    }
    let region = solvable_loops::numerics::SearchBox::cube(5.0).unwrap();
    let mut all_ok = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for (i, &(case, preset, a)) in runs.iter().enumerate() {
        let lc = LoopCase::with_verdict(SectionSpec::preset(case, p(a), preset).unwrap(), None);
        let mut s = Sampler::new(SEED + 40 + i as u64);
        let (mut identity_ok, mut z_ok) = (true, true);
        let (mut div, mut cross, mut rdiv_errors) = (0.0f64, 0.0f64, 0usize);
        for _ in 0..1000 {
            let (m1, m2, sol) = (s.point(&region), s.point(&region), s.point(&region));
            identity_ok &=
                lc.mul(LoopPoint::ORIGIN, m1) == m1 && lc.mul(m1, LoopPoint::ORIGIN) == m1;
            let prod = lc.mul(m1, m2);
            z_ok &= prod.z == m1.z + m2.z;
            div = div.max(lc.mul(m1, lc.ldiv(m1, m2)).distance(&m2));
            let b = lc.mul(sol, m2);
            match lc.rdiv(b, m2) {
                Ok(r) => div = div.max(lc.mul(r, m2).distance(&b)),
                Err(_) => rdiv_errors += 1,
            }
            cross = cross.max(coset_defect(a, case, preset, m1, m2, prod));
        }
        let ok = identity_ok
            && z_ok
            && div <= DIVISION_TOL
            && cross <= CROSS_CHECK_TOL
            && rdiv_errors == 0;
        if !ok {
            failures.push(format!(
                "{case}/{}/a={a}: identity {identity_ok}, z {z_ok}, division {div:.2e}, cross {cross:.2e}, rdiv errors {rdiv_errors}",
                preset.name()
            ));
        }
        all_ok &= ok;
        worst = (
            worst.0.max(div),
            worst.1.max(cross),
            worst.2 + rdiv_errors as f64,
        );
    }
    let mut detail = format!(
        "{} runs x 1000 pairs, division {:.2e} (tol {DIVISION_TOL:e}), cross-check {:.2e} (tol {CROSS_CHECK_TOL:e}), rdiv errors {}",
        runs.len(),
        worst.0,
        worst.1,
        worst.2
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join("; ")));
    }
    (all_ok, detail)
}

fn criterion_5() -> (bool, String) {
    let a = 0.5;
    let gen_presets = [
        Preset::Zero,
        Preset::LinearX,
        Preset::SinSmall {
            eps: Preset::DEFAULT_EPS,
        },
    ];
    let cfg = SampleConfig::new(5.0, 1000, SEED + 5).unwrap();
    let mut ok = true;
    let mut min_witness = f64::INFINITY;
    let mut generating = 0;
    for case in SectionCase::ALL {
        for preset in gen_presets {
            let lc = LoopCase::new(SectionSpec::preset(case, p(a), preset).unwrap());
            let verdict = lc.verdict.clone().unwrap();
            if !verdict.generates {
                // zero is degenerate in cases A and B, handled below
                ok &= preset == Preset::Zero && case != SectionCase::C;
                continue;
            }
            generating += 1;
            let w = associativity_search(&lc, &cfg).defect;
            min_witness = min_witness.min(w);
            ok &= w > WITNESS_MIN;
        }
    }

    let k = 2.0;
    let mut degenerate = Vec::new();
    for case in SectionCase::ALL {
        if case != SectionCase::C {
            degenerate.push((case, Preset::Zero, 0.0));
        }
        degenerate.push((case, Preset::Bilinear, 0.0));
        degenerate.push((case, Preset::Lemma1 { k }, k));
    }
    let mut fit_err = 0.0f64;
    for &(case, preset, expected) in &degenerate {
        let spec = SectionSpec::preset(case, p(a), preset).unwrap();
        let v = degeneracy_report(&spec, &DegeneracyConfig::default());
        let err = v
            .fitted_constant
            .map_or(f64::INFINITY, |c| (c - expected).abs());
        fit_err = fit_err.max(err);
        ok &= !v.generates && err <= FIT_TOL;
    }
    (
        ok,
        format!(
            "{generating} generating presets, smallest witness {min_witness:.2e} (min {WITNESS_MIN:e}); {} degenerate presets, fit error {fit_err:.2e} (tol {FIT_TOL:e})",
            degenerate.len()
        ),
    )
}

fn eq1_residual(f: impl Fn(f64) -> f64, zs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &z1 in zs {
        for &z2 in zs {
            worst = worst.max((f(z2) + (-z2).exp() * f(z1) - f(z1 + z2)).abs());
        }
    }
    worst
}

fn criterion_6() -> (bool, String) {
    let zs = linspace(-2.0, 2.0, 50);
    let mut ok = true;
    let (mut fit_err, mut exact, mut perturbed) = (0.0f64, 0.0f64, f64::INFINITY);
    for k in [-3.0, 0.5, 2.0] {
        let f = |z: f64| k * (1.0 - (-z).exp());
        let samples: Vec<(f64, f64)> = zs.iter().map(|&z| (z, f(z))).collect();
        let fit = functional_fit(&samples).unwrap();
        fit_err = fit_err.max((fit.k - k).abs());
        exact = exact
            .max(eq1_residual(f, &zs))
            .max(functional_equation_defect(f, &zs));
        let g = |z: f64| f(z) + 0.01 * z * z;
        let r = eq1_residual(g, &zs).min(functional_equation_defect(g, &zs));
        let gfit = functional_fit(&zs.iter().map(|&z| (z, g(z))).collect::<Vec<_>>()).unwrap();
        perturbed = perturbed.min(r).min(gfit.max_residual);
    }
    ok &= fit_err <= FIT_TOL && exact <= FUNCTIONAL_EQ_TOL && perturbed > PERTURBED_MIN;
    (
        ok,
        format!(
            "fit error {fit_err:.2e} (tol {FIT_TOL:e}), exact residual {exact:.2e} (tol {FUNCTIONAL_EQ_TOL:e}), perturbed residual {perturbed:.2e} (min {PERTURBED_MIN:e})"
        ),
    )
}

/// Sign changes (and exact zeros) of `g` on a uniform grid.
fn scan_count(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> usize {
    let xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let zeros = vals.iter().filter(|v| **v == 0.0).count();
    zeros + vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

fn criterion_7() -> (bool, String) {
    let (a, hw, samples) = (0.5, 5.0, 100);
    let eps = Preset::DEFAULT_EPS;
    let spec = SectionSpec::preset(SectionCase::C, p(a), Preset::SinSmall { eps }).unwrap();
    let mut cfg = TransitivityConfig::new(hw, samples, SEED + 7).unwrap();
    cfg.scan.resolution = SCAN_RESOLUTION;
    let lib = sharp_transitivity_check(&spec, &cfg);

    // the unknown left factor (x, y2 - e^{z2-z1} y1, z2 - z1) solves the
    // literal x-equation; (x1,y1,z1) is the right factor, (x2,y2,z2) the product
    let lc = LoopCase::with_verdict(spec.clone(), None);
    let mut s = Sampler::new(cfg.seed);
    let mut oracle_counts = Vec::new();
    for _ in 0..samples {
        let (sol, right) = (s.point(&cfg.region), s.point(&cfg.region));
        let b = lc.mul(sol, right);
        let (x1, y1, z1) = (right.x, right.y, right.z);
        let (x2, y2, z2) = (b.x, b.y, b.z);
        let f = |x: f64, _y: f64, _z: f64| eps * x.sin();
        let g = |x: f64| {
            let fx = f(x, y2 - (z2 - z1).exp() * y1, z2 - z1);
            x2 - x1 * (a * (z2 - z1)).exp()
                + (a * z2 - z1).exp() * (y1 * (z2 - z1) + (1.0 - ((1.0 - a) * z1).exp()) * fx)
                - x
        };
        oracle_counts.push(scan_count(g, -hw, hw, SCAN_RESOLUTION));
    }
    let c_ok = lib.all_unique() && lib.report.passed() && oracle_counts.iter().all(|&c| c == 1);
    let agree = oracle_counts == lib.root_counts;

    let mut b_ok = true;
    let mut explicit = 0.0f64;
    let k = Preset::DEFAULT_K;
    for a in [0.5, 2.0] {
        let spec = SectionSpec::preset(SectionCase::B, p(a), Preset::Lemma1 { k }).unwrap();
        let cfg = TransitivityConfig::new(hw, samples, SEED + 70).unwrap();
        let lib = sharp_transitivity_check(&spec, &cfg);
        b_ok &= lib.all_unique() && lib.report.passed();
        let lc = LoopCase::with_verdict(spec, None);
        let mut s = Sampler::new(cfg.seed);
        let h = |z: f64| k * (1.0 - (-z).exp());
        for _ in 0..samples {
            let (sol, right) = (s.point(&cfg.region), s.point(&cfg.region));
            let b = lc.mul(sol, right);
            let (x1, y1, z1) = (right.x, right.y, right.z);
            let (x2, y2, z2) = (b.x, b.y, b.z);
            let zz = z2 - z1;
            let y = y2 - zz.exp() * y1 + zz.exp() * z1 * h(zz);
            let x =
                x2 - x1 * (a * zz).exp() + (a * z2).exp() * ((-z1).exp() - (-a * z1).exp()) * h(zz);
            let scale = b.to_array().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            explicit = explicit.max(max_abs(&[x, y, zz], &sol.to_array()) / scale);
        }
    }
    b_ok &= explicit <= EXPLICIT_ROOT_TOL;
    let unique = lib.root_counts.iter().filter(|&&c| c == 1).count();
    (
        c_ok && agree && b_ok,
        format!(
            "C sin-small: {unique}/{samples} unique, oracle scan agrees {agree}; B lemma1: unique {b_ok}, explicit root error {explicit:.2e} (tol {EXPLICIT_ROOT_TOL:e})"
        ),
    )
}

fn criterion_8() -> (bool, String) {
    let mut s = Sampler::new(SEED + 8);
    let mut worst = 0.0f64;
    for a in PARAMS {
        for _ in 0..100 {
            let mut g = random_element(&mut s, 5.0);
            g[3] = s.sign() * s.uniform(0.1, 3.0);
            let m = fixed_point_witness(p(a), &GroupElement::from_array(g)).unwrap();
            let c = [m.x, m.y, m.z, 0.0];
            let lhs = gmul(a, g, c);
            let rhs = gmul(a, c, [0.0, 0.0, 0.0, g[3]]);
            worst = worst.max(max_abs(&lhs, &rhs));
        }
    }
    (
        worst <= FIXED_POINT_TOL,
        format!("400 elements, residual {worst:.2e} (tol {FIXED_POINT_TOL:e})"),
    )
}

fn criterion_9() -> (bool, String) {
    let mut ok = true;
    let (mut mismatches, mut oracle_mismatches) = (0usize, 0usize);
    let mut certs = Vec::new();
    for a in PARAMS {
        let mut s = Sampler::new(SEED + 9);
        let subs: Vec<SubgroupId> = SubgroupId::stabilizers(p(a));
        for i in 0..10_000 {
            let mut g = random_element(&mut s, 5.0);
            if i % 2 == 0 {
                g[3] = 0.0;
            } else {
                g[3] = s.sign() * s.uniform(1e-3, 5.0);
            }
            let expected = g[3] == 0.0;
            for &sub in &subs {
                if normalizes(p(a), &GroupElement::from_array(g), sub).unwrap() != expected {
                    mismatches += 1;
                }
                let h = match sub {
                    SubgroupId::H1 => [0.0, 0.0, 1.0, 0.0],
                    SubgroupId::H2 => [1.0, 0.0, 1.0, 0.0],
                    _ => [1.0, 1.0, 0.0, 0.0],
                };
                let gi = coords(&invert(&matrix(a, g)));
                let conj = gmul(a, gmul(a, g, h), gi);
                if in_subgroup(sub, conj, MEMBERSHIP_TOL) != expected {
                    oracle_mismatches += 1;
                }
            }
        }
        let cert = theorem2_certificate(p(a), &Theorem2Config::new(5_000, SEED + 9));
        ok &= cert.center_trivial && cert.contradiction;
        certs.push(format!("a={a}: {}", cert.contradiction));
    }
    ok &= mismatches == 0 && oracle_mismatches == 0;
    (
        ok,
        format!(
            "10^4 samples per a, {mismatches} library / {oracle_mismatches} oracle mismatches; contradiction {}",
            certs.join(", ")
        ),
    )
}

/// Inverse of an upper triangular group matrix by back substitution.
#[allow(clippy::needless_range_loop)]
fn invert(m: &M4) -> M4 {
    let mut inv = [[0.0; 4]; 4];
    for col in 0..4 {
        for row in (0..4).rev() {
            let rhs = if row == col { 1.0 } else { 0.0 };
            let acc: f64 = (row + 1..4).map(|k| m[row][k] * inv[k][col]).sum();
            inv[row][col] = (rhs - acc) / m[row][row];
        }
    }
    inv
}

fn criterion_10() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_solvable-loops");
    let suite: [&[&str]; 8] = [
        &["verify-group", "--samples", "500"],
        &[
            "classify", "--a", "2", "--b1", "1", "--b2", "1", "--b3", "0",
        ],
        &[
            "loop-check",
            "--case",
            "B",
            "--a",
            "0.5",
            "--preset",
            "sin-small",
            "--samples",
            "200",
        ],
        &[
            "generation",
            "--case",
            "C",
            "--a",
            "0.5",
            "--preset",
            "lemma1",
        ],
        &[
            "transitivity",
            "--case",
            "C",
            "--a",
            "0.5",
            "--preset",
            "sin-small",
            "--samples",
            "20",
        ],
        &["theorem2", "--a", "-1", "--samples", "500"],
        &["lemma1", "--K", "2"],
        &["fixed-point", "--a", "2", "--g", "1,2,3,0.5"],
    ];
    let mut identical = 0;
    for (i, args) in suite.iter().enumerate() {
        let run = |tag: &str| {
            let out = dir.path().join(format!("{i}-{tag}.json"));
            let status = Command::new(bin)
                .args(*args)
                .args(["--seed", "11", "--out"])
                .arg(&out)
                .status()
                .expect("binary runs");
            (status.code(), std::fs::read(&out).unwrap_or_default())
        };
        let (first, second) = (run("first"), run("second"));
        if first == second && !first.1.is_empty() {
            identical += 1;
        }
    }
    (
        identical == suite.len(),
        format!(
            "{identical}/{} subcommands byte-identical across two runs",
            suite.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("group oracle", criterion_1),
        ("lie algebra", criterion_2),
        ("classification", criterion_3),
        ("loop axioms", criterion_4),
        ("properness", criterion_5),
        ("functional equation", criterion_6),
        ("sharp transitivity", criterion_7),
        ("fixed cosets of H4", criterion_8),
        ("normalizer certificate", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!ok);
        println!(
            "[{}] {} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
