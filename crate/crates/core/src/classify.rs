//! Finite-prefix recurrence and regularity evidence: Birkhoff averages,
//! empirical cylinder frequencies, visit-time sets and their windowed
//! densities, gaps between visits.
//!
//! Densities are read off the counting ratio `#(S ∩ [0, n)) / n` at 32
//! geometric checkpoints in `[N/2, N]`: the minimum stands in for the lower
//! density and the maximum for the upper density.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{parry_measure, InvariantMeasure};
use crate::par::{self, Mode};
use crate::potential::Potential;
use crate::shift::{ShiftSpace, Symbol, Word};
use crate::synthesis::Certificate;

pub const DENSITY_CHECKPOINTS: usize = 32;
pub const TRACE_CHECKPOINTS: usize = 1024;
pub const DEFAULT_LADDER: [usize; 5] = [1, 2, 4, 8, 12];
pub const DEFAULT_HORIZON: usize = 1 << 20;
/// Cylinder lengths whose coverage is reported.
pub const COVERAGE_LENS: [usize; 3] = [1, 2, 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisitStatistics {
    pub cylinder_len: usize,
    pub visits: usize,
    pub lower_density_est: f64,
    pub upper_density_est: f64,
    pub max_gap: usize,
    #[serde(skip)]
    pub visit_times: Vec<usize>,
}

/// `N/2 .. N` in 32 geometric steps, deduplicated.
pub fn density_checkpoints(horizon: usize) -> Vec<usize> {
    let half = (horizon as f64 / 2.0).max(1.0);
    let mut out: Vec<usize> = (0..DENSITY_CHECKPOINTS)
        .map(|i| {
            let t = i as f64 / (DENSITY_CHECKPOINTS - 1) as f64;
            ((half * 2f64.powf(t)).round() as usize).clamp(1, horizon.max(1))
        })
        .collect();
    out.dedup();
    out
}

/// Lower/upper windowed density of a sorted set of visit times.
pub fn windowed_density(sorted_times: &[usize], horizon: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in density_checkpoints(horizon) {
        let count = sorted_times.partition_point(|&t| t < c);
        let r = count as f64 / c as f64;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// Visit times `n` in `[1, N)` with `x[n .. n+|w|] = w`.
pub fn occurrences(x: &[Symbol], w: &[Symbol], horizon: usize) -> Result<Vec<usize>> {
    let need = horizon + w.len();
    if x.len() < need {
        return Err(Error::TooShort { needed: need, got: x.len() });
    }
    let l = w.len();
    Ok((1..horizon).filter(|&n| &x[n..n + l] == w).collect())
}

fn max_gap_of(times: &[usize], horizon: usize) -> usize {
    if times.len() < 2 {
        return horizon;
    }
    // time 0 counts as the first return of the orbit to its own cylinder
    let mut gap = times[0];
    for p in times.windows(2) {
        gap = gap.max(p[1] - p[0]);
    }
    gap.max(1)
}

/// Returns of `x` to its own cylinder `[x_0 .. x_{ℓ-1}]`.
pub fn visit_statistics(x: &[Symbol], len: usize, horizon: usize) -> Result<VisitStatistics> {
    if len == 0 || x.len() < len {
        return Err(Error::TooShort { needed: len.max(1), got: x.len() });
    }
    let times = occurrences(x, &x[..len], horizon)?;
    let (lo, hi) = windowed_density(&times, horizon);
    Ok(VisitStatistics {
        cylinder_len: len,
        visits: times.len(),
        lower_density_est: lo,
        upper_density_est: hi,
        max_gap: max_gap_of(&times, horizon),
        visit_times: times,
    })
}

/// Sliding-window frequencies of the `ℓ`-words starting at `0 .. N`.
pub fn empirical_measure(x: &[Symbol], len: usize, horizon: usize) -> Result<BTreeMap<Word, f64>> {
    let need = horizon + len.saturating_sub(1);
    if x.len() < need || horizon == 0 {
        return Err(Error::TooShort { needed: need.max(1), got: x.len() });
    }
    let mut counts: HashMap<&[Symbol], usize> = HashMap::new();
    for i in 0..horizon {
        *counts.entry(&x[i..i + len]).or_default() += 1;
    }
    Ok(counts.into_iter().map(|(w, c)| (Word(w.to_vec()), c as f64 / horizon as f64)).collect())
}

/// Running averages `(1/n) Σ_{i<n} φ(x_i .. x_{i+r-1})` at the checkpoints.
pub fn birkhoff_trace(x: &[Symbol], phi: &Potential, checkpoints: &[usize]) -> Result<Vec<(usize, f64)>> {
    let max = checkpoints.iter().copied().max().unwrap_or(0);
    let need = max + phi.range();
    if x.len() < need {
        return Err(Error::TooShort { needed: need, got: x.len() });
    }
    let mut sorted: Vec<usize> = checkpoints.to_vec();
    sorted.sort_unstable();
    let r = phi.range();
    let mut out = Vec::with_capacity(sorted.len());
    let mut sum = 0.0f64;
    let mut i = 0usize;
    for &c in &sorted {
        while i < c {
            sum += phi.value(&x[i..i + r]);
            i += 1;
        }
        if c > 0 {
            out.push((c, sum / c as f64));
        }
    }
    Ok(out)
}

/// Linear checkpoints `N j / 1024`.
pub fn trace_checkpoints(horizon: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=TRACE_CHECKPOINTS).map(|j| (horizon * j).div_ceil(TRACE_CHECKPOINTS)).collect();
    v.retain(|&c| c > 0);
    v.dedup();
    v
}

/// Whether the final half of `x` has a period at most a quarter of `|x|`,
/// i.e. repeats at least twice: the finite shadow of eventual periodicity.
pub fn is_eventually_periodic(x: &[Symbol]) -> bool {
    let tail = &x[x.len() / 2..];
    let n = tail.len();
    if n < 2 {
        return true;
    }
    // KMP failure function gives the longest proper border
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && tail[i] != tail[k] {
            k = fail[k - 1];
        }
        if tail[i] == tail[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let period = n - fail[n - 1];
    2 * period <= n
}

/// Per-word visit data for every `ℓ`-word occurring at positions `[1, N)`.
struct CylinderTable {
    /// word -> sorted visit times
    times: HashMap<Vec<Symbol>, Vec<usize>>,
}

impl CylinderTable {
    fn new(x: &[Symbol], len: usize, horizon: usize) -> Self {
        let mut times: HashMap<Vec<Symbol>, Vec<usize>> = HashMap::new();
        for n in 1..horizon {
            times.entry(x[n..n + len].to_vec()).or_default().push(n);
        }
        CylinderTable { times }
    }

    fn get(&self, w: &[Symbol]) -> &[usize] {
        self.times.get(w).map_or(&[], |v| v.as_slice())
    }
}

/// Maximum gap between consecutive occurrences of every factor of length at
/// most `max_len`, including the lead-in before the first occurrence and the
/// run-out after the last.
pub fn factor_max_gap(x: &[Symbol], max_len: usize, horizon: usize) -> Result<usize> {
    let need = horizon + max_len;
    if x.len() < need {
        return Err(Error::TooShort { needed: need, got: x.len() });
    }
    let mut worst = 0usize;
    for len in 1..=max_len {
        let mut last: HashMap<&[Symbol], usize> = HashMap::new();
        for n in 0..horizon {
            let w = &x[n..n + len];
            let prev = last.insert(w, n);
            let gap = match prev {
                Some(p) => n - p,
                None => n + 1,
            };
            worst = worst.max(gap);
        }
        for &p in last.values() {
            worst = worst.max(horizon - p);
        }
    }
    Ok(worst)
}

/// A measurable claim about an orbit prefix with its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedStatistic {
    /// The thresholds below are sized for at least this many symbols.
    HorizonAtLeast { n: usize },
    /// Some running average after `from_fraction · N` is within `tol` of `target`.
    TraceAttains { target: f64, tol: f64, from_fraction: f64 },
    /// `max - min` of the running averages after `from_fraction · N`.
    TraceOscillationAtLeast { min: f64, from_fraction: f64 },
    TraceOscillationAtMost { max: f64, from_fraction: f64 },
    /// The final running average is within `tol` of `target`.
    TraceLimit { target: f64, tol: f64 },
    /// Every admissible `len`-word has lower density at least `min`.
    CylinderLowerDensityAtLeast { len: usize, min: f64 },
    WordLowerDensityAtMost { word: Word, max: f64 },
    WordUpperDensityAtLeast { word: Word, min: f64 },
    /// Every admissible `len`-word is visited at least `min_visits` times.
    CylinderVisitsAtLeast { len: usize, min_visits: usize },
    /// Every admissible `len`-word has frequency at least `ratio` times its
    /// probability under the reference measure.
    CylinderFrequencyRatioAtLeast { len: usize, ratio: f64 },
    /// Self-cylinder upper densities strictly decrease along `lens` and end
    /// at most `final_max`.
    SelfUpperDensityDecreasing { lens: Vec<usize>, final_max: f64 },
    /// Self-cylinder lower and upper densities both within `tol` of `value`.
    SelfDensityEquals { len: usize, value: f64, tol: f64 },
    /// Every factor of length at most `max_len` recurs with gaps at most `bound`.
    FactorGapsAtMost { max_len: usize, bound: usize },
    NotEventuallyPeriodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub statistic: ExpectedStatistic,
    pub observed: f64,
    pub detail: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub cylinder_len: usize,
    pub admissible: usize,
    pub covered: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub from_fraction: f64,
    pub liminf_est: f64,
    pub limsup_est: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub schema: String,
    pub horizon: usize,
    pub ladder: Vec<VisitStatistics>,
    pub trace: Vec<(usize, f64)>,
    pub oscillation: Oscillation,
    pub coverage: Vec<Coverage>,
    pub verdicts: Vec<Verdict>,
}

impl RecurrenceReport {
    pub const SCHEMA: &'static str = "symdyn.report/1";

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Fixed-width verdict table.
    pub fn table(&self) -> String {
        let mut s = format!("{:<34} {:>14}  {:<4}  {}\n", "statistic", "observed", "pass", "detail");
        for v in &self.verdicts {
            let name = serde_json::to_value(&v.statistic)
                .ok()
                .and_then(|j| j.get("kind").and_then(|k| k.as_str().map(str::to_string)))
                .unwrap_or_default();
            s.push_str(&format!(
                "{:<34} {:>14.6} {:<5}  {}\n",
                name,
                v.observed,
                if v.pass { "yes" } else { "NO" },
                v.detail
            ));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub ladder: Vec<usize>,
    pub mode: Mode,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { ladder: DEFAULT_LADDER.to_vec(), mode: Mode::default() }
    }
}

/// What the evaluator needs besides the word.
pub struct Evidence<'a> {
    pub shift: &'a ShiftSpace,
    pub phi: &'a Potential,
    /// Full-support measure used for expected cylinder counts.
    pub reference: Option<&'a InvariantMeasure>,
    pub expected: &'a [ExpectedStatistic],
    pub horizon: usize,
}

fn tail_range(trace: &[(usize, f64)], from: f64, horizon: usize) -> (f64, f64) {
    let start = (from * horizon as f64).ceil() as usize;
    trace
        .iter()
        .filter(|(n, _)| *n >= start)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)))
}

/// Runs the ladder, the trace and the coverage, and grades every expected
/// statistic. Never fails: a word too short for a statistic fails its verdict.
pub fn evaluate(x: &[Symbol], ev: &Evidence, cfg: &ClassifyConfig) -> RecurrenceReport {
    let max_len = cfg
        .ladder
        .iter()
        .copied()
        .chain(COVERAGE_LENS)
        .chain(ev.expected.iter().filter_map(|e| match e {
            ExpectedStatistic::FactorGapsAtMost { max_len, .. } => Some(*max_len),
            ExpectedStatistic::WordLowerDensityAtMost { word, .. } | ExpectedStatistic::WordUpperDensityAtLeast { word, .. } => {
                Some(word.len())
            }
            ExpectedStatistic::SelfUpperDensityDecreasing { lens, .. } => lens.iter().copied().max(),
            _ => None,
        }))
        .max()
        .unwrap_or(1)
        .max(ev.phi.range());
    let horizon = ev.horizon.min(x.len().saturating_sub(max_len));
    if horizon < 2 {
        return RecurrenceReport {
            schema: RecurrenceReport::SCHEMA.to_string(),
            horizon,
            ladder: Vec::new(),
            trace: Vec::new(),
            oscillation: Oscillation { from_fraction: 0.5, liminf_est: 0.0, limsup_est: 0.0 },
            coverage: Vec::new(),
            verdicts: ev
                .expected
                .iter()
                .map(|e| Verdict { statistic: e.clone(), observed: f64::NAN, detail: "word too short".into(), pass: false })
                .collect(),
        };
    }
    let ladder: Vec<VisitStatistics> = par::map(cfg.mode, &cfg.ladder, |&l| visit_statistics(x, l, horizon))
        .into_iter()
        .collect::<Result<_>>()
        .expect("horizon leaves room for every ladder length");
    let trace = birkhoff_trace(x, ev.phi, &trace_checkpoints(horizon)).expect("room for the potential");
    let (lo, hi) = tail_range(&trace, 0.5, horizon);
    let oscillation = Oscillation { from_fraction: 0.5, liminf_est: lo, limsup_est: hi };
    let tables: BTreeMap<usize, CylinderTable> = COVERAGE_LENS
        .iter()
        .chain(ev.expected.iter().filter_map(|e| match e {
            ExpectedStatistic::CylinderLowerDensityAtLeast { len, .. }
            | ExpectedStatistic::CylinderVisitsAtLeast { len, .. }
            | ExpectedStatistic::CylinderFrequencyRatioAtLeast { len, .. } => Some(len),
            _ => None,
        }))
        .map(|&l| (l, CylinderTable::new(x, l, horizon)))
        .collect();
    let coverage = COVERAGE_LENS
        .iter()
        .map(|&l| {
            let words = ev.shift.words(l);
            let covered = words
                .iter()
                .filter(|w| {
                    let count = tables[&l].get(w).len() as f64;
                    let expected = ev.reference.map_or(0.0, |m| m.cylinder(w) * horizon as f64);
                    if expected >= 32.0 {
                        count >= expected / 4.0
                    } else {
                        count >= 8.0
                    }
                })
                .count();
            Coverage { cylinder_len: l, admissible: words.len(), covered, fraction: covered as f64 / words.len() as f64 }
        })
        .collect();
    let verdicts = ev
        .expected
        .iter()
        .map(|e| grade(e, x, ev, horizon, &trace, &tables))
        .collect();
    RecurrenceReport { schema: RecurrenceReport::SCHEMA.to_string(), horizon, ladder, trace, oscillation, coverage, verdicts }
}

fn grade(
    e: &ExpectedStatistic,
    x: &[Symbol],
    ev: &Evidence,
    horizon: usize,
    trace: &[(usize, f64)],
    tables: &BTreeMap<usize, CylinderTable>,
) -> Verdict {
    use ExpectedStatistic as E;
    let v = |observed: f64, pass: bool, detail: String| Verdict { statistic: e.clone(), observed, detail, pass };
    match e {
        E::HorizonAtLeast { n } => v(x.len() as f64, x.len() >= *n, format!("{} symbols, need {n}", x.len())),
        E::TraceAttains { target, tol, from_fraction } => {
            let start = (from_fraction * horizon as f64).ceil() as usize;
            let best = trace
                .iter()
                .filter(|(n, _)| *n >= start)
                .map(|(_, a)| (a - target).abs())
                .fold(f64::INFINITY, f64::min);
            v(best, best <= *tol, format!("closest running average to {target:.6} is {best:.6} away"))
        }
        E::TraceOscillationAtLeast { min, from_fraction } => {
            let (lo, hi) = tail_range(trace, *from_fraction, horizon);
            v(hi - lo, hi - lo >= *min, format!("averages in [{lo:.6}, {hi:.6}]"))
        }
        E::TraceOscillationAtMost { max, from_fraction } => {
            let (lo, hi) = tail_range(trace, *from_fraction, horizon);
            v(hi - lo, hi - lo <= *max, format!("averages in [{lo:.6}, {hi:.6}]"))
        }
        E::TraceLimit { target, tol } => {
            let last = trace.last().map_or(f64::NAN, |t| t.1);
            let d = (last - target).abs();
            v(last, d <= *tol, format!("final average {last:.6}, target {target:.6}"))
        }
        E::CylinderLowerDensityAtLeast { len, min } => {
            let mut worst = (f64::INFINITY, Word::default());
            for w in ev.shift.words(*len) {
                let (lo, _) = windowed_density(tables[len].get(&w), horizon);
                if lo < worst.0 {
                    worst = (lo, w);
                }
            }
            v(worst.0, worst.0 >= *min, format!("smallest lower density at [{}]", worst.1))
        }
        E::WordLowerDensityAtMost { word, max } => match occurrences(x, word, horizon) {
            Ok(t) => {
                let (lo, _) = windowed_density(&t, horizon);
                v(lo, lo <= *max, format!("lower density of [{word}]"))
            }
            Err(err) => v(f64::NAN, false, err.to_string()),
        },
        E::WordUpperDensityAtLeast { word, min } => match occurrences(x, word, horizon) {
            Ok(t) => {
                let (_, hi) = windowed_density(&t, horizon);
                v(hi, hi >= *min, format!("upper density of [{word}]"))
            }
            Err(err) => v(f64::NAN, false, err.to_string()),
        },
        E::CylinderVisitsAtLeast { len, min_visits } => {
            let mut worst = (usize::MAX, Word::default());
            for w in ev.shift.words(*len) {
                let c = tables[len].get(&w).len();
                if c < worst.0 {
                    worst = (c, w);
                }
            }
            v(worst.0 as f64, worst.0 >= *min_visits, format!("fewest visits at [{}]", worst.1))
        }
        E::CylinderFrequencyRatioAtLeast { len, ratio } => {
            let Some(reference) = ev.reference else {
                return v(f64::NAN, false, "no reference measure".into());
            };
            let mut worst = (f64::INFINITY, Word::default());
            for w in ev.shift.words(*len) {
                let p = reference.cylinder(&w);
                if p <= 0.0 {
                    continue;
                }
                let f = tables[len].get(&w).len() as f64 / (horizon - 1) as f64;
                if f / p < worst.0 {
                    worst = (f / p, w);
                }
            }
            v(worst.0, worst.0 >= *ratio, format!("smallest frequency ratio at [{}]", worst.1))
        }
        E::SelfUpperDensityDecreasing { lens, final_max } => {
            let mut uppers = Vec::new();
            for &l in lens {
                match visit_statistics(x, l, horizon) {
                    Ok(s) => uppers.push(s.upper_density_est),
                    Err(err) => return v(f64::NAN, false, err.to_string()),
                }
            }
            let decreasing = uppers.windows(2).all(|p| p[1] < p[0]);
            let last = *uppers.last().unwrap_or(&f64::NAN);
            let text: Vec<String> = uppers.iter().map(|u| format!("{u:.6}")).collect();
            v(last, decreasing && last <= *final_max, format!("upper densities {}", text.join(" > ")))
        }
        E::SelfDensityEquals { len, value, tol } => match visit_statistics(x, *len, horizon) {
            Ok(s) => {
                let d = (s.lower_density_est - value).abs().max((s.upper_density_est - value).abs());
                v(d, d <= *tol, format!("densities [{:.6}, {:.6}] vs {value:.6}", s.lower_density_est, s.upper_density_est))
            }
            Err(err) => v(f64::NAN, false, err.to_string()),
        },
        E::FactorGapsAtMost { max_len, bound } => match factor_max_gap(x, *max_len, horizon) {
            Ok(g) => v(g as f64, g <= *bound, format!("largest gap {g}, bound {bound}")),
            Err(err) => v(f64::NAN, false, err.to_string()),
        },
        E::NotEventuallyPeriodic => {
            let p = is_eventually_periodic(&x[..horizon]);
            v(if p { 1.0 } else { 0.0 }, !p, "final half checked for a repeated period".into())
        }
    }
}

/// Evaluates an orbit prefix against its certificate's expected statistics.
pub fn evaluate_certificate(x: &[Symbol], cert: &Certificate, cfg: &ClassifyConfig) -> Result<RecurrenceReport> {
    let shift = ShiftSpace::from_def(&cert.shift)?;
    let phi = Potential::from_def(&shift, &cert.potential)?;
    let reference = parry_measure(&shift)?;
    let ev = Evidence { shift: &shift, phi: &phi, reference: Some(&reference), expected: &cert.expected_statistics, horizon: cert.horizon };
    Ok(evaluate(x, &ev, cfg))
}
