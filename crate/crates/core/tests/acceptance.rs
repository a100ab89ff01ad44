//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! ```text
//! cargo test -p portsolve --test acceptance
//! ```

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use portsolve::circuit::{effective_relation_linear, solve_naive, solve_nested, CircuitTree};
use portsolve::mixed::{mmdr, vdp_solve, MixedProblem, VdpParams};
use portsolve::netlist::{
    parse, print, DriveSpec, Element, ElementKind, NetlistDocument, SolverDecl, Space, Topology, TreeExpr,
};
use portsolve::operators::OperatorSpec;
use portsolve::signal::{dft, idft, inner, Signal};
use portsolve::splitting::{douglas_rachford, forward_backward, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Residual checks for converged mixed-monotone runs, collected by
/// criteria 1 and 3 and judged by criterion 6.
#[derive(Default)]
struct FixedPointChecks {
    runs: Vec<(String, Option<f64>, f64)>,
}

impl FixedPointChecks {
    fn record(&mut self, label: String, residual: Option<f64>, eps: f64) {
        self.runs.push((label, residual, eps));
    }
}

// Criterion 1 ----------------------------------------------------------------

fn vdp_rhs(mu: f64, v: f64, w: f64) -> [f64; 2] {
    [w, mu * (1.0 - v * v) * w - v]
}

fn rk4(mu: f64, s: [f64; 2], h: f64) -> [f64; 2] {
    let a = vdp_rhs(mu, s[0], s[1]);
    let b = vdp_rhs(mu, s[0] + 0.5 * h * a[0], s[1] + 0.5 * h * a[1]);
    let c = vdp_rhs(mu, s[0] + 0.5 * h * b[0], s[1] + 0.5 * h * b[1]);
    let d = vdp_rhs(mu, s[0] + h * c[0], s[1] + h * c[1]);
    [
        s[0] + h * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]) / 6.0,
        s[1] + h * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1]) / 6.0,
    ]
}

/// Time-domain reference: period and one period of `v` on an `n`-point grid.
fn vdp_oracle(mu: f64, n: usize) -> (f64, Vec<f64>) {
    let h = 2e-3 / (1.0 + mu);
    let mut s = [0.5, 0.0];
    // Deviations from the cycle decay like exp(-μt) for small μ.
    let transient = (100.0 + 20.0 * mu).max(12.0 / mu);
    for _ in 0..(transient / h) as usize {
        s = rk4(mu, s, h);
    }
    let mut t = 0.0;
    let mut ups = Vec::new();
    while ups.len() < 6 {
        let next = rk4(mu, s, h);
        if s[0] < 0.0 && next[0] >= 0.0 {
            ups.push(t + h * s[0] / (s[0] - next[0]));
        }
        s = next;
        t += h;
    }
    let period = (ups[5] - ups[0]) / 5.0;
    let sub = 64;
    let hs = period / (n * sub) as f64;
    let mut wave = Vec::with_capacity(n);
    for _ in 0..n {
        wave.push(s[0]);
        for _ in 0..sub {
            s = rk4(mu, s, hs);
        }
    }
    (period, wave)
}

/// Smallest relative l2 distance between `x` and cyclic shifts of `reference`.
fn aligned_error(x: &[f64], reference: &[f64]) -> f64 {
    let n = x.len();
    let ref_energy: f64 = reference.iter().map(|v| v * v).sum();
    let best = (0..n)
        .map(|shift| {
            (0..n)
                .map(|k| {
                    let d = x[k] - reference[(k + shift) % n];
                    d * d
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    (best / ref_energy).sqrt()
}

fn criterion_1(checks: &mut FixedPointChecks) -> Outcome {
    let (alpha, eps, n) = (0.05, 0.01, 5000);
    let mut pass = true;
    let mut parts = Vec::new();
    for mu in [0.0002, 1.5, 10.0] {
        let (period, reference) = vdp_oracle(mu, n);
        let cfg = SolverConfig::new(alpha, eps, 10_000);
        let params = VdpParams::new(mu, period, n);
        match vdp_solve(&params, &cfg) {
            Ok(r) => {
                if r.converged {
                    checks.record(format!("vdp mu={mu}"), r.fixed_point_residual, eps);
                }
                let peak = r.solution.max();
                let ref_peak = reference.iter().cloned().fold(f64::MIN, f64::max);
                let peak_err = (peak - ref_peak).abs() / ref_peak;
                let l2_err = aligned_error(r.solution.samples(), &reference);
                let ok = r.converged && peak_err <= 0.05 && l2_err <= 0.05;
                pass &= ok;
                parts.push(format!(
                    "mu={mu}: T={period:.4} iters={} peak={peak:.4} (ref {ref_peak:.4}) l2err={:.2}%",
                    r.iterations,
                    100.0 * l2_err
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("mu={mu}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

// Criterion 2 ----------------------------------------------------------------

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 256;
    let period = 2.0 * PI;
    let kinds = [
        ("gain", OperatorSpec::Gain(1.7)),
        ("cubic", OperatorSpec::cubic(1.5)),
        ("saturation", OperatorSpec::saturation(2.0, 0.8)),
        (
            "lossless lti",
            OperatorSpec::tf(vec![1.0, 0.0, 1.0], vec![1.0, 0.0]).unwrap(),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, op) in &kinds {
        let mut worst = f64::INFINITY;
        for _ in 0..1000 {
            let alpha = rng.random_range(0.05..2.0);
            let scale = rng.random_range(0.1..4.0);
            let z1 = Signal::new((0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect(), period).unwrap();
            let z2 = Signal::new((0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect(), period).unwrap();
            let dx = op
                .resolvent(alpha, &z1)
                .unwrap()
                .sub(&op.resolvent(alpha, &z2).unwrap());
            let dz = z1.sub(&z2);
            let margin = inner(&dx, &dz).unwrap() - inner(&dx, &dx).unwrap();
            worst = worst.min(margin);
        }
        pass &= worst >= -1e-9;
        parts.push(format!("{name}: min margin {worst:.2e}"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

// Criterion 3 ----------------------------------------------------------------

fn criterion_3(checks: &mut FixedPointChecks) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..200 {
        let g1 = rng.random_range(0.1..3.0);
        let g2 = rng.random_range(0.1..3.0);
        let d = rng.random_range(-5.0..5.0);
        let b = rng.random_range(0.0..2.0);
        let exact = d / (g1 + g2);
        let drive = Signal::constant(4, 1.0, d).unwrap();
        let eps = 1e-10;
        // Forward/backward is stable for α < 2/g1.
        let fb_cfg = SolverConfig::new(1.0 / g1, eps, 1_000_000);
        let dr_cfg = SolverConfig::new(1.0 / (g1 * g2).sqrt(), eps, 1_000_000);
        let (m1, m2) = (OperatorSpec::Gain(g1), OperatorSpec::Gain(g2));
        let fb = forward_backward(&m1, &m2, &drive, &fb_cfg);
        let dr = douglas_rachford(&m1, &m2, &drive, &dr_cfg);
        // The same problem with an anti-monotone path folded in:
        // (g1 + b)x + g2 x - b x = d.
        let problem = MixedProblem::new(
            OperatorSpec::Gain(g1 + b),
            OperatorSpec::Gain(g2),
            OperatorSpec::Gain(b),
            drive.clone(),
        )
        .unwrap();
        let mm = mmdr(&problem, &drive.filled(0.0), &dr_cfg).ok();
        if let Some(r) = mm.as_ref().filter(|r| r.converged) {
            checks.record(
                format!("linear g1={g1:.3} g2={g2:.3} b={b:.3}"),
                r.fixed_point_residual,
                eps,
            );
        }
        for r in [fb.ok(), dr.ok(), mm] {
            match r {
                Some(r) if r.converged => {
                    let e = r
                        .solution
                        .samples()
                        .iter()
                        .map(|v| (v - exact).abs())
                        .fold(0.0, f64::max);
                    worst = worst.max(e);
                    if e > 1e-6 {
                        failures += 1;
                    }
                }
                _ => failures += 1,
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("600 solves (fb, dr, mmdr), max error {worst:.2e}, failures {failures}"),
    }
}

// Criterion 4 ----------------------------------------------------------------

fn random_leaf(rng: &mut ChaCha8Rng) -> CircuitTree {
    CircuitTree::leaf(match rng.random_range(0..3) {
        0 => OperatorSpec::Gain(rng.random_range(1.0..2.0)),
        1 => OperatorSpec::cubic(rng.random_range(0.1..0.5)),
        _ => OperatorSpec::saturation(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)),
    })
}

fn gain_leaf(rng: &mut ChaCha8Rng) -> CircuitTree {
    CircuitTree::leaf(OperatorSpec::Gain(rng.random_range(1.0..2.0)))
}

/// A sum of a random leaf, a gain leaf and, at the root and with some
/// probability below it, the inverse of a smaller tree of the same shape:
/// `M1 + (M2 + M3)⁻¹` generalized to three levels. The gain leaf keeps
/// every sum strongly monotone and onto.
fn random_nonlinear_tree(rng: &mut ChaCha8Rng, levels: usize) -> CircuitTree {
    let mut children = vec![random_leaf(rng), gain_leaf(rng)];
    let nest = levels > 1 && (levels == 3 || rng.random_bool(0.7));
    if nest {
        children.push(random_nonlinear_tree(rng, levels - 1).inverse());
        if levels == 3 && rng.random_bool(0.3) {
            children.push(random_nonlinear_tree(rng, 1).inverse());
        }
    }
    CircuitTree::sum(children)
}

fn is_nonlinear(tree: &CircuitTree) -> bool {
    tree.leaves().iter().any(|op| matches!(op, OperatorSpec::Static(_)))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = 1e-5;
    let (mut cheaper, mut agree, mut trees) = (0, 0, 0);
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    while trees < 50 {
        let tree = random_nonlinear_tree(&mut rng, 3);
        if !is_nonlinear(&tree) {
            continue;
        }
        trees += 1;
        let drive = Signal::from_fn(16, 1.0, |t| 1.0 + 0.8 * (2.0 * PI * t).sin()).unwrap();
        let cfg = SolverConfig::new(0.3, eps, 200_000);
        match (solve_nested(&tree, &drive, &cfg), solve_naive(&tree, &drive, &cfg)) {
            (Ok(a), Ok(b)) if a.converged && b.converged => {
                let d = a.solution.sub(&b.solution).sample_norm();
                worst = worst.max(d);
                if d <= 20.0 * eps {
                    agree += 1;
                }
                if a.resolvent_evaluations < b.resolvent_evaluations {
                    cheaper += 1;
                }
            }
            (a, b) => notes.push(format!(
                "tree {trees}: nested {:?} naive {:?}",
                a.map(|r| r.converged),
                b.map(|r| r.converged)
            )),
        }
    }
    Outcome {
        pass: agree == 50 && cheaper >= 45,
        detail: format!(
            "agree {agree}/50 (max diff {worst:.2e}), nested cheaper {cheaper}/50{}",
            if notes.is_empty() {
                String::new()
            } else {
                format!("; {}", notes.join("; "))
            }
        ),
    }
}

// Criterion 5 ----------------------------------------------------------------

/// Series and parallel interconnections of gains in which every node has a
/// leaf child, so that every sum has a cheap backward step.
fn random_linear_tree(rng: &mut ChaCha8Rng, depth: usize) -> CircuitTree {
    if depth == 0 || rng.random_bool(0.25) {
        return gain_leaf(rng);
    }
    let mut children = vec![gain_leaf(rng)];
    for _ in 0..rng.random_range(1..=2) {
        children.push(random_linear_tree(rng, depth - 1));
    }
    if rng.random_bool(0.5) {
        CircuitTree::sum(children)
    } else {
        CircuitTree::parallel(children)
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..100 {
        let tree = random_linear_tree(&mut rng, 3);
        let d = rng.random_range(0.5..5.0);
        let gains: f64 = tree
            .leaves()
            .iter()
            .map(|op| match op {
                OperatorSpec::Gain(g) => *g,
                _ => unreachable!(),
            })
            .sum();
        let cfg = SolverConfig::new(1.0 / gains, 1e-10, 1_000_000);
        let expected = d / effective_relation_linear(&tree).unwrap();
        match solve_nested(&tree, &Signal::constant(1000, 1.0, d).unwrap(), &cfg) {
            Ok(r) if r.converged => {
                let e = r
                    .solution
                    .samples()
                    .iter()
                    .map(|v| (v - expected).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(e);
                if e > 1e-6 {
                    failures.push(format!("tree {k}: error {e:.2e}"));
                }
            }
            Ok(_) => failures.push(format!("tree {k}: not converged")),
            Err(e) => failures.push(format!("tree {k}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "100 trees, max error {worst:.2e}{}",
            failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    }
}

// Criterion 6 ----------------------------------------------------------------

fn criterion_6(checks: &FixedPointChecks) -> Outcome {
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (label, residual, eps) in &checks.runs {
        match residual {
            Some(r) => {
                worst_ratio = worst_ratio.max(r / eps);
                if *r > 10.0 * eps {
                    failures.push(format!("{label}: residual {r:.3e} > 10·{eps:e}"));
                }
            }
            None => failures.push(format!("{label}: residual not evaluable")),
        }
    }
    let vdp: Vec<String> = checks
        .runs
        .iter()
        .filter(|(l, ..)| l.starts_with("vdp"))
        .map(|(l, r, _)| format!("{l} residual {:.3e}", r.unwrap_or(f64::NAN)))
        .collect();
    Outcome {
        pass: failures.is_empty() && !checks.runs.is_empty(),
        detail: format!(
            "{} converged runs, worst residual/eps {worst_ratio:.2}; {}{}",
            checks.runs.len(),
            vdp.join(", "),
            failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    }
}

// Criterion 7 ----------------------------------------------------------------

const NAME_POOL: &[&str] = &[
    "m1", "m2", "r_load", "series", "parallel", "element", "tree", "gain", "neg", "x", "_c9", "drive", "b", "a1",
];

fn random_float(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-5i32..=5) as f64,
        1 => rng.random_range(-10.0..10.0),
        2 => rng.random_range(1.0..9.0) * 10f64.powi(rng.random_range(-12..12)),
        _ => -rng.random_range(0.0..1.0) * 1e-7,
    }
}

fn positive_float(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1.0..9.0) * 10f64.powi(rng.random_range(-8..3))
}

fn random_expr(rng: &mut ChaCha8Rng, names: &[String], depth: usize) -> TreeExpr {
    if depth == 0 || rng.random_bool(0.4) {
        return TreeExpr::Name(names[rng.random_range(0..names.len())].clone());
    }
    let count = rng.random_range(2..=3);
    let items = (0..count).map(|_| random_expr(rng, names, depth - 1)).collect();
    if rng.random_bool(0.5) {
        TreeExpr::Series(items)
    } else {
        TreeExpr::Parallel(items)
    }
}

fn random_document(rng: &mut ChaCha8Rng) -> NetlistDocument {
    let mut pool: Vec<&str> = NAME_POOL.to_vec();
    let count = rng.random_range(1..=6);
    let mut elements: Vec<Element> = Vec::new();
    for _ in 0..count {
        let name = pool.remove(rng.random_range(0..pool.len())).to_string();
        let kind = match rng.random_range(0..4) {
            0 => ElementKind::Gain(random_float(rng)),
            1 => ElementKind::Cubic(random_float(rng)),
            2 => ElementKind::Tf {
                num: (0..rng.random_range(1..4)).map(|_| random_float(rng)).collect(),
                den: (0..rng.random_range(1..4)).map(|_| positive_float(rng)).collect(),
            },
            _ if !elements.is_empty() => ElementKind::Neg(elements[rng.random_range(0..elements.len())].name.clone()),
            _ => ElementKind::Gain(1.0),
        };
        elements.push(Element { name, kind });
    }
    let names: Vec<String> = elements.iter().map(|e| e.name.clone()).collect();
    let pick = |rng: &mut ChaCha8Rng| names[rng.random_range(0..names.len())].clone();
    let topology = if rng.random_bool(0.7) {
        Topology::Tree(random_expr(rng, &names, 3))
    } else {
        Topology::Mixed {
            a1: pick(rng),
            a2: pick(rng),
            b: pick(rng),
        }
    };
    let drive = match rng.random_range(0..5) {
        0 => DriveSpec::Zero,
        1 => DriveSpec::Const(random_float(rng)),
        2 => DriveSpec::Sin {
            amplitude: random_float(rng),
            frequency: random_float(rng),
        },
        3 => DriveSpec::Csv("data/drive.csv".into()),
        _ => DriveSpec::Csv("my runs/\"quoted\" #1.csv".into()),
    };
    NetlistDocument {
        space: Space {
            n_samples: rng.random_range(1..100_000),
            period: positive_float(rng),
        },
        solver: SolverDecl {
            alphas: (0..rng.random_range(1..4)).map(|_| positive_float(rng)).collect(),
            eps: positive_float(rng),
            max_iter: rng.random_range(1..1_000_000),
        },
        elements,
        topology,
        drive,
    }
}

const HEADER: &str = "space N=4 T=1\nsolver alpha=0.1 eps=1e-6 maxiter=100\n";

fn malformed_inputs() -> Vec<(String, usize)> {
    let h = HEADER;
    vec![
        (String::new(), 1),
        ("space N=4\n".into(), 2),
        ("space N=four T=1\n".into(), 1),
        ("space N=4 T=1\nsolver eps=1e-6 maxiter=100\n".into(), 2),
        ("space N=4 T=1\nsolver alpha=0.1 eps=1e-6\n".into(), 3),
        (format!("{h}tree a\ndrive zero\n"), 3),
        (format!("{h}element a gain 1\ntree a\ndrive zero\n"), 3),
        (format!("{h}element a: resistor 1\ntree a\ndrive zero\n"), 3),
        (format!("{h}element a: gain\ntree a\ndrive zero\n"), 4),
        (format!("{h}element a: gain 1\ntree series(a)\ndrive zero\n"), 4),
        (format!("{h}element a: gain 1\ntree series(a, b)\ndrive zero\n"), 4),
        (
            format!("{h}element a: gain 1\nelement a: gain 2\ntree a\ndrive zero\n"),
            4,
        ),
        (format!("{h}element a: gain 1\ntree parallel(a, a\ndrive zero\n"), 5),
        (format!("{h}element a: gain 1\ntree a\ndrive sin 1\n"), 6),
        (format!("{h}element a: gain 1\ntree a\n"), 5),
        (format!("{h}element a: tf num=1 den=0\ntree a\ndrive zero\n"), 3),
        (
            format!("{h}element a: neg b\nelement b: neg a\ntree a\ndrive zero\n"),
            3,
        ),
        (format!("{h}element a: gain 1\nmixed a1=a a2=a\ndrive zero\n"), 5),
        (format!("{h}element a: gain 1\ntree a\ndrive csv \"unterminated\n"), 5),
        (format!("{h}element a: gain 1\ntree a\ndrive zero\nextra\n"), 6),
    ]
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut round_trip_failures = 0;
    for _ in 0..500 {
        let doc = random_document(&mut rng);
        assert!(
            doc.validate().is_ok(),
            "generator produced an invalid document: {doc:?}"
        );
        match parse(&print(&doc)) {
            Ok(back) if back == doc => {}
            _ => round_trip_failures += 1,
        }
    }
    let mut diag_failures = Vec::new();
    for (k, (text, line)) in malformed_inputs().iter().enumerate() {
        match parse(text) {
            Ok(_) => diag_failures.push(format!("input {k} parsed")),
            Err(d) => {
                let lines: Vec<&str> = text.split('\n').collect();
                let in_bounds = d.line >= 1
                    && d.line <= lines.len()
                    && d.column >= 1
                    && d.column <= lines[d.line - 1].chars().count() + 1;
                if !in_bounds || d.line != *line {
                    diag_failures.push(format!("input {k}: {d} (expected line {line})"));
                }
            }
        }
    }
    Outcome {
        pass: round_trip_failures == 0 && diag_failures.is_empty(),
        detail: format!(
            "500 documents, {round_trip_failures} round-trip failures; 20 malformed inputs, {} bad diagnostics{}",
            diag_failures.len(),
            diag_failures.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    }
}

// Criterion 8 ----------------------------------------------------------------

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_rt = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for n in [2, 3, 64, 1000, 5000] {
        for _ in 0..5 {
            let x = Signal::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect(), 3.0).unwrap();
            let spectrum = dft(&x);
            let back = idft(&spectrum);
            worst_rt = worst_rt.max(back.sub(&x).max_abs());
            let time: f64 = x.samples().iter().map(|v| v * v).sum();
            let freq: f64 = spectrum.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
            worst_parseval = worst_parseval.max((time - freq).abs() / time.max(1.0));
        }
    }
    Outcome {
        pass: worst_rt <= 1e-10 && worst_parseval <= 1e-10,
        detail: format!("max round-trip error {worst_rt:.2e}, max Parseval error {worst_parseval:.2e}"),
    }
}

fn main() -> ExitCode {
    let mut checks = FixedPointChecks::default();
    let mut results: Vec<(usize, &str, Duration, Duration, Outcome)> = Vec::new();
    let mut run = |id, name, budget: u64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        results.push((id, name, start.elapsed(), Duration::from_secs(budget), outcome));
    };
    run(1, "van der Pol vs RK4", 60, &mut || criterion_1(&mut checks));
    run(2, "resolvent firm nonexpansiveness", 10, &mut criterion_2);
    run(3, "scalar splitting correctness", 5, &mut || criterion_3(&mut checks));
    run(4, "nested vs naive", 60, &mut criterion_4);
    run(5, "linear tree exactness", 10, &mut criterion_5);
    run(6, "fixed points solve the inclusion", 1, &mut || criterion_6(&checks));
    run(7, "netlist round trip and diagnostics", 5, &mut criterion_7);
    run(8, "DFT round trip and Parseval", 5, &mut criterion_8);

    let mut all = true;
    for (id, name, elapsed, budget, outcome) in &results {
        let pass = outcome.pass && elapsed <= budget;
        all &= pass;
        println!(
            "criterion {id} [{name}]: {} ({:.2}s of {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
