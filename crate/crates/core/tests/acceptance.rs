//! One line per acceptance criterion. Exits non-zero on any failure that is
//! not one of the documented unattainable items.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::beta::{beta_admissible, beta_entropy_estimate, BetaShiftSpec, BetaValue, DEFAULT_HORIZON};
use symdyn::classify::{evaluate_certificate, factor_max_gap, is_eventually_periodic, ClassifyConfig, ExpectedStatistic, RecurrenceReport};
use symdyn::measures::{parry_measure, InvariantMeasure};
use symdyn::minimal::{thue_morse_word, MinimalKind};
use symdyn::oracle::{brute_constrained_entropy, brute_count_cycles, brute_count_words, brute_cycle_mean_range, brute_density};
use symdyn::par::Mode;
use symdyn::shift::ln_big;
use symdyn::spectrum::{check_concavity, has_irregular, spectrum_curve, spectrum_point, sup_equals_htop};
use symdyn::synthesis::{
    certify, in_support_language, measure_fact, synthesize_with, Certificate, GapClass, KStructure, OrbitPrefix, SupportFact, SynthesisParams,
    THUE_MORSE_GAP_BOUND,
};
use symdyn::{Potential, ShiftSpace, Symbol, Word};

use common::{random_primitive, test_shifts};

const N: usize = 1 << 20;
const SEED: u64 = 7;
/// Entropy slacks of the two evidence runs whose thresholds need a deep
/// excursion; certificates at these slacks are still exact.
const V_NOT_W_EVIDENCE_SLACK: f64 = 0.7;
const I_NOT_QW_EVIDENCE_SLACK: f64 = 0.85;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the failure is a documented, unattainable item.
    known_gap: bool,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: summary, known_gap: false }
    } else {
        Outcome { pass: false, detail: failures.join("; "), known_gap: false }
    }
}

fn run(id: usize, title: &str, limit_secs: f64, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let secs = t.elapsed().as_secs_f64();
    if secs > limit_secs {
        o.pass = false;
        o.known_gap = false;
        o.detail = format!("{} | runtime {secs:.2} s > {limit_secs} s", o.detail);
    }
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {id} {tag} {title}: {} [{secs:.2} s]", o.detail);
    o
}

fn ind(s: &ShiftSpace) -> Potential {
    Potential::indicator(s, 1)
}

fn params(slack: f64) -> SynthesisParams {
    SynthesisParams { entropy_slack: slack, ..SynthesisParams::default() }
}

fn synth(s: &ShiftSpace, class: GapClass, n: usize, seed: u64, prefix: Option<&Word>, p: &SynthesisParams) -> symdyn::Result<OrbitPrefix> {
    synthesize_with(s, class, &ind(s), n, seed, prefix, p)
}

fn entropy_triple() -> Outcome {
    let gm = ShiftSpace::golden_mean();
    let target = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let spectral = gm.topological_entropy();
    let words = ln_big(&gm.count_words(24)) / 24.0;
    let periodic = ln_big(&gm.count_periodic(30)) / 30.0;
    let mut f = Vec::new();
    if (spectral - target).abs() > 1e-9 {
        f.push(format!("spectral {spectral} vs {target}"));
    }
    if (words - target).abs() > 0.03 {
        f.push(format!("words(24) {words}"));
    }
    if (periodic - target).abs() > 0.02 {
        f.push(format!("periodic(30) {periodic}"));
    }
    let s = format!(
        "spectral err {:.1e}, words(24) err {:.4}, periodic(30) err {:.1e}",
        (spectral - target).abs(),
        (words - target).abs(),
        (periodic - target).abs()
    );
    outcome(f, s)
}

fn exact_combinatorics() -> Outcome {
    let mut f = Vec::new();
    let mut checked = 0;
    for (name, s) in test_shifts() {
        for n in 1..=12 {
            let w = brute_count_words(&s, n).unwrap().value;
            let c = brute_count_cycles(&s, n).unwrap().value;
            if s.count_words(n) != w {
                f.push(format!("{name} words n={n}"));
            }
            if s.count_periodic(n) != c {
                f.push(format!("{name} periodic n={n}"));
            }
            checked += 2;
        }
    }
    outcome(f, format!("{checked} counts equal on golden-mean, full-2, full-3, random-4"))
}

fn beta_entropy() -> Outcome {
    let mut f = Vec::new();
    let mut errs = Vec::new();
    for b in ["1.8", "golden", "2.5"] {
        let v = BetaValue::parse(b).unwrap();
        let spec = BetaShiftSpec::new(&v, DEFAULT_HORIZON, false).unwrap();
        let est = beta_entropy_estimate(&spec, 22).unwrap();
        let err = (est - v.ln()).abs();
        errs.push(format!("{b}: {err:.4}"));
        if err > 0.02 {
            f.push(format!("beta {b}: estimate {est} vs log {}", v.ln()));
        }
    }
    let spec = BetaShiftSpec::new(&BetaValue::parse("golden").unwrap(), DEFAULT_HORIZON, false).unwrap();
    let gm = ShiftSpace::golden_mean();
    let full = ShiftSpace::full(2);
    let mut compared = 0;
    for n in 1..=10 {
        for w in full.words(n) {
            compared += 1;
            if beta_admissible(&w, &spec).unwrap() != gm.is_admissible(&w).unwrap() {
                f.push(format!("golden language differs at {w:?}"));
            }
        }
    }
    outcome(f, format!("estimate errors {}; golden language equal on {compared} words", errs.join(", ")))
}

fn variational_spectrum() -> Outcome {
    let gm = ShiftSpace::golden_mean();
    let phi = ind(&gm);
    let mut f = Vec::new();
    let mut worst = 0f64;
    for i in 1..=9 {
        let a = 0.05 * i as f64;
        let psi = spectrum_point(&gm, &phi, a).unwrap().psi;
        let brute = brute_constrained_entropy(&gm, &phi, a, 40).unwrap();
        worst = worst.max((psi - brute).abs());
        if (psi - brute).abs() > 0.02 {
            f.push(format!("a={a}: {psi} vs oracle {brute}"));
        }
    }
    let curve = spectrum_curve(&gm, &phi, 33, Mode::Parallel).unwrap();
    if !check_concavity(&curve) {
        f.push("psi not concave on the 33-point grid".into());
    }
    if !sup_equals_htop(&curve) {
        f.push("grid maximum below h_top - 1e-4".into());
    }
    let max = curve.points.iter().map(|p| p.psi).fold(f64::NEG_INFINITY, f64::max);
    outcome(f, format!("max |psi - oracle| {worst:.4}; concave; h_top - max psi {:.1e}", curve.h_top - max))
}

fn irregularity() -> Outcome {
    let mut f = Vec::new();
    let mut shifts = test_shifts();
    for seed in 0..12u64 {
        shifts.push(("random", random_primitive(2 + (seed as usize % 3), 100 + seed)));
    }
    for (name, s) in &shifts {
        if has_irregular(s, &Potential::constant(s, 0.7)).unwrap() {
            f.push(format!("{name}: constant potential flagged"));
        }
        if !has_irregular(s, &ind(s)).unwrap() {
            f.push(format!("{name}: indicator not flagged"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.k() as u64);
        let vals: Vec<f64> = (0..s.k()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for phi in [ind(s), Potential::from_fn(s, 1, |w| vals[w[0]]).unwrap(), Potential::constant(s, -2.0)] {
            let (lo, hi) = brute_cycle_mean_range(s, &phi, 8).unwrap();
            if has_irregular(s, &phi).unwrap() != (hi - lo > 1e-12) {
                f.push(format!("{name}: disagrees with cycle means"));
            }
        }
    }
    outcome(f, format!("{} shifts agree with exhaustive cycle means", shifts.len()))
}

/// Named measures plus the chain elements, in certificate order.
fn all_measures(cert: &Certificate) -> Vec<(String, InvariantMeasure)> {
    let mut v: Vec<(String, InvariantMeasure)> = cert.measures.iter().map(|m| (m.name.clone(), m.measure.clone())).collect();
    if let KStructure::Chain { base, links } = &cert.k_structure {
        let b = cert.measure(base).unwrap();
        for (i, l) in links.iter().enumerate() {
            v.push((format!("nu_{}", i + 1), InvariantMeasure::mix(l.theta, b.clone(), cert.measure(&l.cycle).unwrap().clone())));
        }
    }
    v
}

fn certificate_bounds() -> Outcome {
    let s = ShiftSpace::full(2);
    let h = s.topological_entropy();
    let mut f = Vec::new();
    let mut zero_entropy = Vec::new();
    let mut ratios = Vec::new();
    for class in GapClass::ALL {
        let o = match synth(&s, class, N, SEED, None, &SynthesisParams::default()) {
            Ok(o) => o,
            Err(e) => {
                f.push(format!("{class}: {e}"));
                continue;
            }
        };
        if let Err(e) = certify(&o) {
            f.push(format!("{class}: {e}"));
        }
        let cert = &o.certificate;
        let bp = s.higher_block(cert.block_len);
        let phi = ind(&s).lift(&bp);
        let recomputed: Vec<_> = all_measures(cert).iter().map(|(n, m)| measure_fact(n, m, bp.shift(), &phi).unwrap()).collect();
        if recomputed.len() != cert.facts.len() {
            f.push(format!("{class}: {} facts stored, {} recomputed", cert.facts.len(), recomputed.len()));
        }
        for (a, b) in recomputed.iter().zip(&cert.facts) {
            let close = (a.entropy - b.entropy).abs() <= 1e-10 && (a.integral - b.integral).abs() <= 1e-10;
            if a.name != b.name || !close || a.full_support != b.full_support || a.ergodic != b.ergodic {
                f.push(format!("{class}: fact {} differs", b.name));
            }
        }
        let ratio = cert.inf_entropy_over_k / h;
        ratios.push(format!("{class} {ratio:.3}"));
        if cert.inf_entropy_over_k < 0.9 * h {
            if matches!(class, GapClass::AlmostPeriodicNotPer | GapClass::Periodic) {
                zero_entropy.push(format!("{class} {ratio:.3}"));
            } else {
                f.push(format!("{class}: inf entropy {ratio:.3} h_top"));
            }
        }
    }
    let summary = format!("inf/h_top: {}", ratios.join(", "));
    if !f.is_empty() {
        return outcome(f, summary);
    }
    if zero_entropy.is_empty() {
        return outcome(f, summary);
    }
    Outcome {
        pass: false,
        detail: format!(
            "zero-entropy classes cannot reach 0.9 h_top: {}; all 8 certify with facts within 1e-10 | {summary}",
            zero_entropy.join(", ")
        ),
        known_gap: true,
    }
}

/// Running averages of `phi` at every `n` in `[from, N]`.
fn exact_trace(x: &[Symbol], phi: &Potential, from: usize) -> Vec<f64> {
    let r = phi.range();
    let mut sum = 0.0;
    let mut out = Vec::new();
    for i in 0..x.len().saturating_sub(r - 1) {
        sum += phi.value(&x[i..i + r]);
        let n = i + 1;
        if n >= from {
            out.push(sum / n as f64);
        }
    }
    out
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Exact `(lower, upper)` density over `[N/2, N]` of the visits `t >= 1` to `w`.
fn word_density(x: &[Symbol], w: &[Symbol]) -> (f64, f64) {
    let l = w.len();
    brute_density(|t| t >= 1 && t + l <= x.len() && &x[t..t + l] == w, N).unwrap()
}

fn word_counts(x: &[Symbol], len: usize) -> std::collections::BTreeMap<Vec<Symbol>, usize> {
    let mut m = std::collections::BTreeMap::new();
    for w in x[..N.min(x.len() - len + 1)].windows(len) {
        *m.entry(w.to_vec()).or_insert(0) += 1;
    }
    m
}

fn failing(report: &RecurrenceReport) -> Vec<String> {
    report.verdicts.iter().filter(|v| !v.pass).map(|v| format!("verdict {}", v.detail)).collect()
}

fn has_stat(cert: &Certificate, pred: impl Fn(&ExpectedStatistic) -> bool) -> bool {
    cert.expected_statistics.iter().any(pred)
}

fn evidence_for(class: GapClass, s: &ShiftSpace, o: &OrbitPrefix, report: &RecurrenceReport) -> (Vec<String>, String) {
    let cert = &o.certificate;
    let x = &o.word[..];
    let phi = ind(s);
    let bp = s.higher_block(cert.block_len);
    let lifted = phi.lift(&bp);
    let mut f = failing(report);
    let detail;
    match class {
        GapClass::WNotQr => {
            let KStructure::Segment { left, right } = &cert.k_structure else { unreachable!() };
            let trace = exact_trace(x, &phi, N / 2);
            let mut dists = Vec::new();
            for name in [left, right] {
                let target = cert.measure(name).unwrap().integrate(&lifted).unwrap();
                let d = trace.iter().map(|a| (a - target).abs()).fold(f64::INFINITY, f64::min);
                dists.push(d);
                if d > 0.05 {
                    f.push(format!("trace stays {d:.4} from {name}"));
                }
            }
            let mut min_lower = f64::INFINITY;
            for len in [1, 2] {
                for w in s.words(len) {
                    min_lower = min_lower.min(word_density(x, &w).0);
                }
            }
            if min_lower < 0.01 {
                f.push(format!("cylinder lower density {min_lower:.4}"));
            }
            detail = format!("endpoint distances {:.4}/{:.4}, min 1/2-cylinder lower density {min_lower:.4}", dists[0], dists[1]);
        }
        GapClass::VNotW => {
            let anchor = cert.anchor.clone().unwrap();
            if o.word[..anchor.len()] != anchor[..] {
                f.push("orbit does not start with the anchor".into());
            }
            let (lo, hi) = word_density(x, &anchor);
            if lo > 0.01 {
                f.push(format!("anchor lower density {lo:.4} > 0.01"));
            }
            if hi < 0.05 {
                f.push(format!("anchor upper density {hi:.4} < 0.05"));
            }
            detail = format!("anchor {anchor} lower {lo:.4} upper {hi:.4}");
        }
        GapClass::QwNotV => {
            let counts = word_counts(x, 3);
            let min = s.words(3).iter().map(|w| counts.get(&w.0).copied().unwrap_or(0)).min().unwrap();
            if min < 8 {
                f.push(format!("a 3-cylinder has {min} visits"));
            }
            let KStructure::Chain { base, links } = &cert.k_structure else { unreachable!() };
            // supp ν_i = supp μ ∪ O(m_i) misses X when some word of X occurs in neither
            let b = cert.measure(base).unwrap();
            let witness = |cycle: &[Symbol]| {
                (6..=10).flat_map(|l| s.words(l)).any(|w| {
                    let orbit: Vec<Symbol> = (0..w.len() + cycle.len()).map(|i| cycle[i % cycle.len()]).collect();
                    !in_support_language(&bp, b, &w) && !orbit.windows(w.len()).any(|v| v == &w[..])
                })
            };
            let proper = links.iter().all(|l| match cert.measure(&l.cycle).unwrap() {
                InvariantMeasure::Periodic { cycle } => witness(&bp.decode_cycle(cycle)),
                _ => false,
            });
            if !proper || !cert.support_facts.contains(&SupportFact::ChainSupportsProper) {
                f.push("a K-support is not proper".into());
            }
            detail = format!("min 3-cylinder visits {min}; {} chain supports all proper", links.len() + 1);
        }
        GapClass::INotQw => {
            let ups: Vec<f64> = [4, 8, 12].iter().map(|&l| word_density(x, &x[..l]).1).collect();
            if !(ups[0] > ups[1] && ups[1] > ups[2] && ups[2] <= 0.02) {
                f.push(format!("self upper densities {ups:?}"));
            }
            let osc = spread(&exact_trace(x, &phi, N / 2));
            if osc < 0.2 {
                f.push(format!("oscillation {osc:.4} < 0.2"));
            }
            detail = format!("self upper densities {:.5} > {:.6} > {:.6}; oscillation {osc:.4}", ups[0], ups[1], ups[2]);
        }
        GapClass::QrNotErgNotA => {
            let KStructure::Singleton { measure } = &cert.k_structure else { unreachable!() };
            let rho = cert.measure(measure).unwrap();
            let target = rho.integrate(&lifted).unwrap();
            let trace = exact_trace(x, &phi, 3 * N / 4);
            let osc = spread(&trace);
            let last = *trace.last().unwrap();
            if osc > 0.01 {
                f.push(format!("last-quarter oscillation {osc:.4}"));
            }
            if (last - target).abs() > 0.01 {
                f.push(format!("trace {last:.4} vs {target:.4}"));
            }
            let flagged = cert.support_facts.iter().any(|sf| matches!(sf, SupportFact::NonErgodic { .. }));
            if rho.is_ergodic() || !flagged {
                f.push("measure not flagged non-ergodic".into());
            }
            detail = format!("last-quarter oscillation {osc:.5}; limit err {:.5}; non-ergodic", (last - target).abs());
        }
        GapClass::RFullSupport => {
            let parry = parry_measure(s).unwrap();
            let target = parry.integrate(&phi).unwrap();
            let last = *exact_trace(x, &phi, N).last().unwrap();
            if (last - target).abs() > 0.01 {
                f.push(format!("trace {last:.4} vs {target:.4}"));
            }
            let counts = word_counts(x, 3);
            let ratio = s
                .words(3)
                .iter()
                .map(|w| counts.get(&w.0).copied().unwrap_or(0) as f64 / N as f64 / parry.cylinder(w))
                .fold(f64::INFINITY, f64::min);
            if ratio < 0.2 {
                f.push(format!("3-cylinder frequency ratio {ratio:.3}"));
            }
            detail = format!("limit err {:.5}; min 3-cylinder ratio {ratio:.3}", (last - target).abs());
        }
        GapClass::AlmostPeriodicNotPer => {
            let KStructure::Minimal { generator } = &cert.k_structure else { unreachable!() };
            if generator.kind != MinimalKind::ThueMorse || o.word != thue_morse_word(N) {
                f.push("word is not the Thue-Morse word".into());
            }
            let gap = factor_max_gap(x, 8, N - 8).unwrap();
            if gap > THUE_MORSE_GAP_BOUND {
                f.push(format!("factor gap {gap} > {THUE_MORSE_GAP_BOUND}"));
            }
            if is_eventually_periodic(x) {
                f.push("eventually periodic".into());
            }
            detail = format!("max factor gap {gap} <= {THUE_MORSE_GAP_BOUND}; not eventually periodic");
        }
        GapClass::Periodic => unreachable!(),
    }
    if !has_stat(cert, |e| matches!(e, ExpectedStatistic::HorizonAtLeast { n } if *n == N)) {
        f.push("horizon statistic missing".into());
    }
    (f, detail)
}

const EVIDENCE: [GapClass; 7] = [
    GapClass::WNotQr,
    GapClass::VNotW,
    GapClass::QwNotV,
    GapClass::INotQw,
    GapClass::QrNotErgNotA,
    GapClass::RFullSupport,
    GapClass::AlmostPeriodicNotPer,
];

fn evidence_params(class: GapClass) -> SynthesisParams {
    match class {
        GapClass::VNotW => params(V_NOT_W_EVIDENCE_SLACK),
        GapClass::INotQw => params(I_NOT_QW_EVIDENCE_SLACK),
        _ => SynthesisParams::default(),
    }
}

/// Word whose schedule lacks the mechanism the class relies on.
fn swap_partner(class: GapClass) -> GapClass {
    match class {
        GapClass::WNotQr => GapClass::RFullSupport,
        GapClass::VNotW => GapClass::RFullSupport,
        GapClass::QwNotV => GapClass::AlmostPeriodicNotPer,
        GapClass::INotQw => GapClass::RFullSupport,
        GapClass::QrNotErgNotA => GapClass::INotQw,
        GapClass::RFullSupport => GapClass::QrNotErgNotA,
        _ => GapClass::Periodic,
    }
}

fn witness_evidence() -> Outcome {
    let s = ShiftSpace::full(2);
    let cfg = ClassifyConfig::default();
    let mut f = Vec::new();
    let mut details = Vec::new();
    let mut orbits = Vec::new();
    for class in EVIDENCE {
        let o = synth(&s, class, N, SEED, None, &evidence_params(class)).unwrap();
        if let Err(e) = certify(&o) {
            f.push(format!("{class}: {e}"));
        }
        let report = evaluate_certificate(&o.word, &o.certificate, &cfg).unwrap();
        let (fails, detail) = evidence_for(class, &s, &o, &report);
        f.extend(fails.into_iter().map(|m| format!("{class}: {m}")));
        details.push(format!("{class}: {detail}"));
        orbits.push((class, o));
    }
    for (class, o) in &orbits {
        let partner = swap_partner(*class);
        let other = synth(&s, partner, N, SEED, None, &evidence_params(partner)).unwrap();
        let report = evaluate_certificate(&other.word, &o.certificate, &cfg).unwrap();
        let failed = report.verdicts.iter().filter(|v| !v.pass).count();
        if failed == 0 {
            f.push(format!("negative control: {partner} word passes every {class} verdict"));
        }
    }
    details.push("negative controls: every swapped word fails at least one verdict".into());
    outcome(f, details.join(" | "))
}

fn random_prefix(s: &ShiftSpace, rng: &mut ChaCha8Rng) -> Word {
    let len = rng.gen_range(1..=8);
    let mut w = vec![rng.gen_range(0..s.k())];
    while w.len() < len {
        let succ: Vec<Symbol> = s.successors(*w.last().unwrap()).collect();
        w.push(succ[rng.gen_range(0..succ.len())]);
    }
    Word(w)
}

fn prefix_pinning() -> Outcome {
    let s = ShiftSpace::full(2);
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut f = Vec::new();
    let mut runs = 0;
    for i in 0..50u64 {
        let p = random_prefix(&s, &mut rng);
        for class in GapClass::ALL {
            runs += 1;
            match synth(&s, class, 1 << 14, i, Some(&p), &SynthesisParams::default()) {
                Ok(o) => {
                    if o.word[..p.len()] != p[..] {
                        f.push(format!("{class} prefix {p}"));
                    }
                    if let Err(e) = certify(&o) {
                        f.push(format!("{class} prefix {p}: {e}"));
                    }
                }
                Err(e) => f.push(format!("{class} prefix {p}: {e}")),
            }
        }
    }
    outcome(f, format!("{runs} witnesses start with their prefix and certify"))
}

fn cli(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_symdyn")).current_dir(dir).args(args).output().unwrap();
    out.status.code().unwrap_or(-1)
}

fn determinism() -> Outcome {
    const FILES: [&str; 7] = ["e.json", "s.csv", "s.csv.manifest.json", "o/orbit.txt", "o/certificate.json", "o/manifest.json", "r.json"];
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut f = Vec::new();
    for d in &dirs {
        let p = d.path();
        fs::write(p.join("gm.json"), r#"{"schema":"symdyn.shift/1","k":2,"matrix":[[1,1],[1,0]]}"#).unwrap();
        fs::write(
            p.join("phi.json"),
            r#"{"schema":"symdyn.potential/1","range":1,"values":[{"word":[0],"value":0.0},{"word":[1],"value":1.0}]}"#,
        )
        .unwrap();
        let cmds: [&[&str]; 4] = [
            &["entropy", "--shift", "gm.json", "--manifest", "e.json"],
            &["spectrum", "--shift", "gm.json", "--potential", "phi.json", "--points", "33", "--out", "s.csv"],
            &["synthesize", "--shift", "gm.json", "--potential", "phi.json", "--class", "I_NOT_QW", "--seed", "7", "--out", "o"],
            &["classify", "--orbit", "o", "--out", "r.json"],
        ];
        for c in cmds {
            let code = cli(p, c);
            if code != 0 {
                f.push(format!("{} exited {code}", c[0]));
            }
        }
    }
    for name in FILES {
        let a = fs::read(dirs[0].path().join(name));
        let b = fs::read(dirs[1].path().join(name));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            _ => f.push(format!("{name} differs or is missing")),
        }
    }
    outcome(f, format!("{} output files byte-identical across two runs", FILES.len()))
}

fn main() {
    let results = [
        run(1, "entropy triple agreement (golden mean)", 1.0, entropy_triple),
        run(2, "exact combinatorics vs enumeration", f64::INFINITY, exact_combinatorics),
        run(3, "beta-shift entropy and golden language", 10.0, beta_entropy),
        run(4, "variational spectrum vs oracle", 30.0, variational_spectrum),
        run(5, "irregularity detector", f64::INFINITY, irregularity),
        run(6, "certificate entropy bounds (full 2-shift)", f64::INFINITY, certificate_bounds),
        run(7, "witness evidence suite at N = 2^20", 180.0, witness_evidence),
        run(8, "prefix pinning, 50 prefixes x 8 classes", f64::INFINITY, prefix_pinning),
        run(9, "CLI determinism", f64::INFINITY, determinism),
    ];
    let passed = results.iter().filter(|o| o.pass).count();
    let known = results.iter().filter(|o| !o.pass && o.known_gap).count();
    let unexpected = results.len() - passed - known;
    println!("acceptance: {passed}/{} pass, {known} documented unattainable, {unexpected} unexpected failures", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
