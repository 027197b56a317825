//! Witness-orbit synthesis: measure-typical blocks glued by exact bridges
//! into finite orbit prefixes, one recipe per gap class, each with a
//! certificate of exact facts about the measure set `K` it targets.
//!
//! Proper-support measures live on a `b`-block presentation: `μ` is the Parry
//! measure of the best strongly connected subgraph obtained by deleting one
//! edge of the `b`-block graph, for the smallest `b` whose entropy is within
//! the subshift slack of `h_top`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::ExpectedStatistic;
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{parry_measure, parry_on_subgraph, rng_for, sample_with, InvariantMeasure, SupportGraph};
use crate::minimal::{MinimalGenerator, MinimalKind};
use crate::par::{self, Mode};
use crate::potential::{Potential, PotentialDef};
use crate::shift::{strongly_connected_components, BlockPresentation, ShiftDef, ShiftSpace, Symbol, Word};
use crate::spectrum::lphi_interval;

pub const ANCHOR_LEN: usize = 6;
pub const MAX_BLOCK_LEN: usize = 12;
pub const MAX_BLOCK_NODES: usize = 128;
/// Largest factor gap, over factors of length at most 8, of the Thue–Morse
/// word and of the Fibonacci word (measured on 2^20 symbols).
pub const THUE_MORSE_GAP_BOUND: usize = 36;
pub const FIBONACCI_GAP_BOUND: usize = 21;
pub const FACTOR_GAP_LEN: usize = 8;
const FACT_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GapClass {
    WNotQr,
    VNotW,
    QwNotV,
    INotQw,
    QrNotErgNotA,
    RFullSupport,
    AlmostPeriodicNotPer,
    Periodic,
}

impl GapClass {
    pub const ALL: [GapClass; 8] = [
        GapClass::WNotQr,
        GapClass::VNotW,
        GapClass::QwNotV,
        GapClass::INotQw,
        GapClass::QrNotErgNotA,
        GapClass::RFullSupport,
        GapClass::AlmostPeriodicNotPer,
        GapClass::Periodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GapClass::WNotQr => "W_NOT_QR",
            GapClass::VNotW => "V_NOT_W",
            GapClass::QwNotV => "QW_NOT_V",
            GapClass::INotQw => "I_NOT_QW",
            GapClass::QrNotErgNotA => "QR_NOT_ERG_NOT_A",
            GapClass::RFullSupport => "R_FULL_SUPPORT",
            GapClass::AlmostPeriodicNotPer => "ALMOST_PERIODIC_NOT_PER",
            GapClass::Periodic => "PERIODIC",
        }
    }

    /// Whether the recipe needs a proper subshift `S_μ ⊊ X`.
    pub fn needs_proper_subshift(self) -> bool {
        matches!(self, GapClass::VNotW | GapClass::QwNotV | GapClass::INotQw)
    }
}

impl fmt::Display for GapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GapClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        GapClass::ALL
            .into_iter()
            .find(|c| c.name() == up)
            .ok_or_else(|| Error::InvalidInput(format!("unknown gap class {s:?}")))
    }
}

/// Inserts between two symbols the `M` interior symbols of the
/// lexicographically smallest path with `M + 1` transitions.
struct Bridges<'a> {
    shift: &'a ShiftSpace,
    gap: usize,
    cache: HashMap<(Symbol, Symbol), Vec<Symbol>>,
}

impl<'a> Bridges<'a> {
    fn new(shift: &'a ShiftSpace) -> Result<Self> {
        let gap = shift.primitive_gap().ok_or(Error::NotPrimitive)?;
        Ok(Bridges { shift, gap, cache: HashMap::new() })
    }

    fn interior(&mut self, i: Symbol, j: Symbol) -> Result<&[Symbol]> {
        if !self.cache.contains_key(&(i, j)) {
            let path = self.shift.bridge(i, j, self.gap + 1)?;
            self.cache.insert((i, j), path.0[1..=self.gap].to_vec());
        }
        Ok(&self.cache[&(i, j)])
    }
}

/// `segment_1 · bridge · segment_2 · bridge · …` with bridges of exactly `M`
/// symbols, `M` the primitivity gap.
pub fn glue(s: &ShiftSpace, segments: &[Word]) -> Result<Word> {
    let mut bridges = Bridges::new(s)?;
    let mut out: Vec<Symbol> = Vec::new();
    for seg in segments {
        if seg.is_empty() || !s.is_admissible(seg)? {
            return Err(Error::NotAdmissible(seg.0.clone()));
        }
        if let Some(&last) = out.last() {
            out.extend_from_slice(bridges.interior(last, seg[0])?);
        }
        out.extend_from_slice(seg);
    }
    Ok(Word(out))
}

/// Tunable constants of the recipes.
#[derive(Clone, Debug)]
pub struct SynthesisParams {
    /// Target `ε`: the certificate aims at `inf h(K) ≥ (1 - ε) h_top`.
    pub entropy_slack: f64,
    /// Accept the first block length whose proper subshift reaches
    /// `(1 - slack) h_top`.
    pub subshift_slack: f64,
    /// Round `j` of a schedule has length `B j`.
    pub block_base: usize,
    /// Ratio between consecutive phase boundaries of sweep schedules.
    pub phase_ratio: f64,
    /// Parry weight inside the full-support measure of V_NOT_W.
    pub parry_share: f64,
    /// Symbols of the escape orbit written after the anchor in I_NOT_QW.
    pub lead_in: usize,
    pub mode: Mode,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        SynthesisParams {
            entropy_slack: 0.05,
            subshift_slack: 0.025,
            block_base: 64,
            phase_ratio: 20.0,
            parry_share: 0.1,
            lead_in: 2,
            mode: Mode::default(),
        }
    }
}

/// A strongly connected proper subgraph of a block presentation.
#[derive(Clone, Debug)]
pub struct ProperSubshift {
    pub presentation: BlockPresentation,
    pub support: SupportGraph,
    pub entropy: f64,
}

fn subgraph_entropy(nodes: &[usize], edges: &[(usize, usize)]) -> f64 {
    let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut m = vec![vec![0.0; nodes.len()]; nodes.len()];
    for &(i, j) in edges {
        m[pos[&i]][pos[&j]] = 1.0;
    }
    linalg::perron(&m, 1e-14).eigenvalue.max(f64::MIN_POSITIVE).ln()
}

type Candidate = (f64, Vec<usize>, Vec<(usize, usize)>);

/// Higher entropy wins; near-ties go to the smaller sorted edge list.
fn better(a: Candidate, b: Candidate) -> Candidate {
    if a.0 > b.0 + TIE_TOL {
        a
    } else if b.0 > a.0 + TIE_TOL {
        b
    } else if a.2 <= b.2 {
        a
    } else {
        b
    }
}

/// Searches single-edge deletions of the `b`-block graph, `b = 1, 2, …`, for
/// the strongly connected component of largest entropy.
pub fn proper_subshift(s: &ShiftSpace, slack: f64, mode: Mode) -> Result<ProperSubshift> {
    let h = s.topological_entropy();
    let mut best: Option<ProperSubshift> = None;
    for b in 1..=MAX_BLOCK_LEN {
        let bp = s.higher_block(b);
        let k = bp.shift().k();
        if b > 1 && k > MAX_BLOCK_NODES {
            break;
        }
        let edges = bp.shift().edges();
        let found: Vec<Option<Candidate>> = par::map_range(mode, edges.len(), |skip| {
            let rest: Vec<(usize, usize)> =
                edges.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &e)| e).collect();
            strongly_connected_components(k, &rest)
                .into_iter()
                .filter_map(|comp| {
                    let sub: Vec<(usize, usize)> = rest
                        .iter()
                        .filter(|(i, j)| comp.binary_search(i).is_ok() && comp.binary_search(j).is_ok())
                        .copied()
                        .collect();
                    let e = subgraph_entropy(&comp, &sub);
                    (e > TIE_TOL).then_some((e, comp, sub))
                })
                .reduce(better)
        });
        if let Some((e, comp, sub)) = found.into_iter().flatten().reduce(better) {
            let done = e >= (1.0 - slack) * h;
            if best.as_ref().is_none_or(|b0| e > b0.entropy + TIE_TOL) {
                let support = SupportGraph { symbols: comp.into_iter().collect(), edges: sub.into_iter().collect() };
                best = Some(ProperSubshift { presentation: bp, support, entropy: e });
            }
            if done {
                break;
            }
        }
    }
    best.ok_or(Error::NoProperSubshift)
}

/// Whether an ambient word occurs in the subshift of a presentation subgraph.
pub fn in_subgraph_language(bp: &BlockPresentation, g: &SupportGraph, w: &[Symbol]) -> bool {
    let b = bp.block_len();
    if w.len() >= b {
        bp.encode(w).is_some_and(|p| g.admits(&p))
    } else {
        g.symbols.iter().any(|&u| bp.nodes()[u][..w.len()] == *w)
    }
}

/// Whether an ambient word occurs in some point of the support of a measure
/// on the presentation.
pub fn in_support_language(bp: &BlockPresentation, m: &InvariantMeasure, w: &[Symbol]) -> bool {
    m.ergodic_components().into_iter().any(|(_, c)| match c {
        InvariantMeasure::Periodic { cycle } => {
            let orbit = bp.decode_cycle(cycle);
            let p = orbit.len();
            (0..p).any(|r| w.iter().enumerate().all(|(t, &s)| orbit[(r + t) % p] == s))
        }
        _ => in_subgraph_language(bp, &c.support(), w),
    })
}

/// Lexicographically smallest admissible word of length 6 (longer only if
/// needed) outside the language of the proper subshift.
pub fn anchor_word(s: &ShiftSpace, sub: &ProperSubshift) -> Result<Word> {
    anchor_where(s, sub, 0, |_| true)
}

/// Smallest word outside `L(S_μ)` that never occurs in the periodic orbit of
/// `cycle`.
pub fn anchor_avoiding(s: &ShiftSpace, sub: &ProperSubshift, cycle: &[Symbol]) -> Result<Word> {
    let p = cycle.len();
    anchor_where(s, sub, ANCHOR_LEN, |w| {
        let orbit: Vec<Symbol> = (0..w.len() + p).map(|i| cycle[i % p]).collect();
        !orbit.windows(w.len()).any(|v| v == w)
    })
}

fn anchor_where(s: &ShiftSpace, sub: &ProperSubshift, extra_len: usize, keep: impl Fn(&[Symbol]) -> bool) -> Result<Word> {
    let top = ANCHOR_LEN.max(sub.presentation.block_len() + 1) + extra_len;
    for len in ANCHOR_LEN..=top {
        let found = s
            .words(len)
            .into_iter()
            .find(|w| !in_subgraph_language(&sub.presentation, &sub.support, w) && keep(w));
        if let Some(w) = found {
            return Ok(w);
        }
    }
    Err(Error::NoProperSubshift)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMeasure {
    pub name: String,
    pub measure: InvariantMeasure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub theta: f64,
    /// Name of the periodic measure `m_i`.
    pub cycle: String,
}

/// How `K` is built from the named measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KStructure {
    /// `{τ left + (1 - τ) right : τ ∈ [0, 1]}`.
    Segment { left: String, right: String },
    /// Segments between consecutive `ν_i = θ_i base + (1 - θ_i) m_i`.
    Chain { base: String, links: Vec<ChainLink> },
    Singleton { measure: String },
    /// The unique invariant measure of the orbit closure of a minimal word.
    Minimal { generator: MinimalGenerator },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFact {
    pub name: String,
    pub entropy: f64,
    pub integral: f64,
    pub full_support: bool,
    pub ergodic: bool,
}

/// Exact graph statements a class requires.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum SupportFact {
    FullSupport { measure: String },
    ProperSupport { measure: String },
    /// Every chain element `ν_i` has support strictly inside `X`.
    ChainSupportsProper,
    DisjointSupports { a: String, b: String },
    DistinctIntegrals { a: String, b: String },
    Ergodic { measure: String },
    NonErgodic { measure: String },
    /// The ambient word occurs in no point of any listed support.
    WordOutsideSupports { word: Word, measures: Vec<String> },
    /// The generator only uses allowed transitions.
    MinimalWordAdmissible,
}

/// Where the symbols of a segment come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SegmentSource {
    Literal { word: Word },
    /// Sampled from a named Markov measure on the block presentation with the
    /// random stream numbered by the segment index.
    Markov { measure: String },
    /// An ambient cycle repeated from its first symbol.
    Cycle { cycle: Word },
    Minimal { generator: MinimalGenerator, offset: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub source: SegmentSource,
}

/// Segments in order; a bridge of `bridge_len` symbols separates neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub horizon: usize,
    pub bridge_len: usize,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub gap_class: GapClass,
    pub shift: ShiftDef,
    pub potential: PotentialDef,
    /// Measures below live on the presentation with this block length.
    pub block_len: usize,
    pub measures: Vec<NamedMeasure>,
    pub k_structure: KStructure,
    pub facts: Vec<MeasureFact>,
    pub support_facts: Vec<SupportFact>,
    pub inf_entropy_over_k: f64,
    pub h_top: f64,
    pub entropy_slack: f64,
    pub expected_statistics: Vec<ExpectedStatistic>,
    pub pinned_prefix: Option<Word>,
    pub anchor: Option<Word>,
    pub seed: u64,
    pub horizon: usize,
    pub schedule: Schedule,
}

impl Certificate {
    pub const SCHEMA: &'static str = "symdyn.certificate/1";

    pub fn measure(&self, name: &str) -> Option<&InvariantMeasure> {
        self.measures.iter().find(|m| m.name == name).map(|m| &m.measure)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPrefix {
    pub word: Word,
    pub certificate: Certificate,
}

impl OrbitPrefix {
    pub fn schedule(&self) -> &Schedule {
        &self.certificate.schedule
    }

    pub fn seed(&self) -> u64 {
        self.certificate.seed
    }
}

/// Orbit symbol as one ASCII character: digits, then lowercase letters.
fn symbol_char(s: Symbol) -> Result<char> {
    char::from_digit(s as u32, 36).ok_or_else(|| Error::InvalidInput(format!("symbol {s} has no stream character")))
}

/// Stream file text: one character per symbol, a newline every 120.
pub fn stream_text(w: &[Symbol]) -> Result<String> {
    let mut out = String::with_capacity(w.len() + w.len() / 120 + 1);
    for chunk in w.chunks(120) {
        for &s in chunk {
            out.push(symbol_char(s)?);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_stream(text: &str) -> Result<Word> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as Symbol)
                .ok_or_else(|| Error::InvalidInput(format!("bad stream character {c:?}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

pub fn measure_fact(name: &str, m: &InvariantMeasure, shift: &ShiftSpace, phi: &Potential) -> Result<MeasureFact> {
    Ok(MeasureFact {
        name: name.to_string(),
        entropy: m.entropy(),
        integral: m.integrate(phi)?,
        full_support: m.has_full_support(shift),
        ergodic: m.is_ergodic(),
    })
}

/// Named measures plus the chain elements `ν_i`, for fact bookkeeping.
fn all_measures(measures: &[NamedMeasure], k: &KStructure) -> Result<Vec<(String, InvariantMeasure)>> {
    let lookup = |name: &str| {
        measures
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.measure.clone())
            .ok_or_else(|| Error::CertificateMismatch(format!("K refers to unknown measure {name:?}")))
    };
    let mut out: Vec<(String, InvariantMeasure)> = measures.iter().map(|m| (m.name.clone(), m.measure.clone())).collect();
    if let KStructure::Chain { base, links } = k {
        let base = lookup(base)?;
        for (i, link) in links.iter().enumerate() {
            out.push((format!("nu_{}", i + 1), InvariantMeasure::mix(link.theta, base.clone(), lookup(&link.cycle)?)));
        }
    }
    Ok(out)
}

/// Names of the extreme points whose entropies bound `K` from below.
fn extreme_names(k: &KStructure) -> Vec<String> {
    match k {
        KStructure::Segment { left, right } => vec![left.clone(), right.clone()],
        KStructure::Chain { links, .. } => (1..=links.len()).map(|i| format!("nu_{i}")).collect(),
        KStructure::Singleton { measure } => vec![measure.clone()],
        KStructure::Minimal { .. } => Vec::new(),
    }
}

fn inf_entropy(k: &KStructure, facts: &[MeasureFact]) -> Result<f64> {
    if matches!(k, KStructure::Minimal { .. }) {
        // minimal words of linear complexity carry zero entropy
        return Ok(0.0);
    }
    extreme_names(k)
        .iter()
        .map(|n| {
            facts
                .iter()
                .find(|f| &f.name == n)
                .map(|f| f.entropy)
                .ok_or_else(|| Error::CertificateMismatch(format!("no fact for {n}")))
        })
        .try_fold(f64::INFINITY, |acc, e| Ok(acc.min(e?)))
}

/// Lengths of the parts of a schedule, fitted to the horizon exactly.
struct Planner {
    n: usize,
    gap: usize,
    min_len: usize,
    parts: Vec<(SegmentSource, usize)>,
    total: usize,
}

impl Planner {
    fn new(n: usize, gap: usize, min_len: usize) -> Self {
        Planner { n, gap, min_len, parts: Vec::new(), total: 0 }
    }

    fn is_full(&self) -> bool {
        self.total >= self.n
    }

    fn pos(&self) -> usize {
        self.total
    }

    fn room(&self) -> usize {
        if self.parts.is_empty() {
            self.n - self.total
        } else {
            self.n.saturating_sub(self.total + self.gap)
        }
    }

    fn push_literal(&mut self, w: Word) -> Result<()> {
        let room = self.room();
        if w.len() > room {
            return Err(Error::InvalidInput(format!("horizon {} too short for a literal of length {}", self.n, w.len())));
        }
        let bridge = if self.parts.is_empty() { 0 } else { self.gap };
        self.total += w.len() + bridge;
        self.parts.push((SegmentSource::Literal { word: w.clone() }, w.len()));
        Ok(())
    }

    /// Adds a part of about `len` symbols; the last part absorbs whatever
    /// would be too short to hold another bridge and part.
    fn push(&mut self, src: SegmentSource, len: usize) -> Result<()> {
        if self.is_full() {
            return Ok(());
        }
        let room = self.room();
        if room < self.min_len {
            let leftover = self.n - self.total;
            match self.parts.last_mut() {
                Some((SegmentSource::Literal { .. }, _)) | None => {
                    return Err(Error::InvalidInput(format!("horizon {} too short for the schedule", self.n)));
                }
                Some((_, l)) => *l += leftover,
            }
            self.total = self.n;
            return Ok(());
        }
        let mut len = len.clamp(self.min_len, room);
        if room - len < self.gap + self.min_len {
            len = room;
        }
        let bridge = if self.parts.is_empty() { 0 } else { self.gap };
        self.total += len + bridge;
        self.parts.push((src, len));
        Ok(())
    }

    fn finish(self) -> Result<Schedule> {
        if !self.is_full() {
            return Err(Error::InvalidInput(format!("schedule stops short of the horizon {}", self.n)));
        }
        let mut segments = Vec::with_capacity(self.parts.len());
        let mut start = 0;
        for (i, (source, len)) in self.parts.into_iter().enumerate() {
            if i > 0 {
                start += self.gap;
            }
            segments.push(Segment { start, len, source });
            start += len;
        }
        debug_assert_eq!(start, self.n);
        Ok(Schedule { horizon: self.n, bridge_len: self.gap, segments })
    }
}

fn split(s: usize, atoms: &[SegmentSource], weights: &[f64]) -> Vec<(SegmentSource, usize)> {
    atoms
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(a, w)| (a.clone(), ((w * s as f64).round() as usize).max(1)))
        .collect()
}

/// What each recipe produces before realization.
struct Recipe {
    presentation: BlockPresentation,
    measures: Vec<NamedMeasure>,
    k: KStructure,
    support_facts: Vec<SupportFact>,
    expected: Vec<ExpectedStatistic>,
    anchor: Option<Word>,
    schedule: Schedule,
}

struct Ctx<'a> {
    shift: &'a ShiftSpace,
    phi: &'a Potential,
    n: usize,
    prefix: Option<&'a Word>,
    params: &'a SynthesisParams,
    gap: usize,
    h: f64,
}

impl Ctx<'_> {
    fn planner(&self, b: usize) -> Planner {
        Planner::new(self.n, self.gap, b)
    }

    fn push_prefix(&self, plan: &mut Planner) -> Result<()> {
        if let Some(p) = self.prefix {
            plan.push_literal(p.clone())?;
        }
        Ok(())
    }

    /// Cycle through `w`: `w` itself when cyclically admissible, otherwise
    /// `w` followed by the bridge back to its first symbol.
    fn cycle_through(&self, w: &[Symbol]) -> Result<Word> {
        if self.shift.is_cyclically_admissible(w)? {
            return Ok(Word(w.to_vec()));
        }
        let mut br = Bridges::new(self.shift)?;
        let mut c = w.to_vec();
        c.extend_from_slice(br.interior(w[w.len() - 1], w[0])?);
        Ok(Word(c))
    }

    /// Geometric phases aligned backwards from `N`: `[N/2, N)` follows
    /// `last`, `[N/(2g), N/2)` follows `other`, and so on alternately.
    fn sweep(&self, plan: &mut Planner, atoms: &[SegmentSource], last: &[f64], other: &[f64]) -> Result<()> {
        let b = self.params.block_base;
        let mut ends = vec![self.n];
        let mut e = self.n / 2;
        while e >= 8 * b {
            ends.push(e);
            e = (e as f64 / self.params.phase_ratio) as usize;
        }
        let mut j = 1;
        while !plan.is_full() {
            let pos = plan.pos();
            let phase = ends.iter().filter(|&&e| e > pos).count() - 1;
            let weights = if phase % 2 == 0 { last } else { other };
            let s = (b * j).min(ends[phase] - pos).max(b);
            for (src, len) in split(s, atoms, weights) {
                plan.push(src, len)?;
            }
            j += 1;
        }
        Ok(())
    }

    /// Rounds of length `B j` split in fixed proportions.
    fn rounds(&self, plan: &mut Planner, atoms: &[SegmentSource], weights: &[f64]) -> Result<()> {
        let mut j = 1;
        while !plan.is_full() {
            for (src, len) in split(self.params.block_base * j, atoms, weights) {
                plan.push(src, len)?;
            }
            j += 1;
        }
        Ok(())
    }
}

fn named(name: &str, m: &InvariantMeasure) -> NamedMeasure {
    NamedMeasure { name: name.to_string(), measure: m.clone() }
}

fn markov(name: &str) -> SegmentSource {
    SegmentSource::Markov { measure: name.to_string() }
}

fn cycle_src(c: &Word) -> SegmentSource {
    SegmentSource::Cycle { cycle: c.clone() }
}

fn ambient_presentation(s: &ShiftSpace) -> BlockPresentation {
    s.higher_block(1)
}

fn periodic_on(bp: &BlockPresentation, c: &[Symbol]) -> InvariantMeasure {
    InvariantMeasure::periodic(&bp.encode_cycle(c).expect("admissible cycle"))
}

fn integral(m: &InvariantMeasure, phi: &Potential) -> f64 {
    m.integrate(phi).expect("lifted potential matches the presentation")
}

fn w_not_qr(cx: &Ctx) -> Result<Recipe> {
    let iv = lphi_interval(cx.shift, cx.phi)?;
    if iv.width() <= 1e-12 {
        return Err(Error::IrregularityUnavailable);
    }
    let bp = ambient_presentation(cx.shift);
    let phi = cx.phi.lift(&bp);
    let parry = parry_measure(bp.shift())?;
    let center = integral(&parry, &phi);
    // the extreme orbit farther from the Parry integral; ties go low
    let c = if (iv.hi - center) > (center - iv.lo) + 1e-12 { iv.hi_cycle.clone() } else { iv.lo_cycle.clone() };
    let nu = periodic_on(&bp, &c);
    let eps = cx.params.entropy_slack;
    let (t1, t2) = (1.0 - eps, 1.0 - eps / 2.0);
    let omega_1 = InvariantMeasure::mix(t1, parry.clone(), nu.clone());
    let omega_2 = InvariantMeasure::mix(t2, parry.clone(), nu.clone());
    let (i1, i2) = (integral(&omega_1, &phi), integral(&omega_2, &phi));
    let atoms = [markov("parry"), cycle_src(&c)];
    let mut plan = cx.planner(1);
    cx.push_prefix(&mut plan)?;
    cx.sweep(&mut plan, &atoms, &[t1, 1.0 - t1], &[t2, 1.0 - t2])?;
    Ok(Recipe {
        measures: vec![named("parry", &parry), named("nu", &nu), named("omega_1", &omega_1), named("omega_2", &omega_2)],
        k: KStructure::Segment { left: "omega_1".into(), right: "omega_2".into() },
        support_facts: vec![
            SupportFact::FullSupport { measure: "omega_1".into() },
            SupportFact::FullSupport { measure: "omega_2".into() },
            SupportFact::DistinctIntegrals { a: "omega_1".into(), b: "omega_2".into() },
        ],
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::TraceAttains { target: i1, tol: 0.05, from_fraction: 0.5 },
            ExpectedStatistic::TraceAttains { target: i2, tol: 0.05, from_fraction: 0.5 },
            ExpectedStatistic::TraceOscillationAtLeast { min: 0.25 * (i1 - i2).abs(), from_fraction: 0.5 },
            ExpectedStatistic::CylinderLowerDensityAtLeast { len: 1, min: 0.01 },
            ExpectedStatistic::CylinderLowerDensityAtLeast { len: 2, min: 0.01 },
        ],
        anchor: None,
        schedule: plan.finish()?,
        presentation: bp,
    })
}

/// `μ` on its presentation together with the anchor word outside `S_μ`.
fn proper_parts(cx: &Ctx) -> Result<(ProperSubshift, InvariantMeasure, Word)> {
    let sub = proper_subshift(cx.shift, cx.params.subshift_slack, cx.params.mode)?;
    let mu = parry_on_subgraph(sub.presentation.shift(), &sub.support);
    let anchor = anchor_word(cx.shift, &sub)?;
    Ok((sub, mu, anchor))
}

fn v_not_w(cx: &Ctx) -> Result<Recipe> {
    let (sub, mu, anchor) = proper_parts(cx)?;
    let bp = sub.presentation.clone();
    let parry = parry_measure(bp.shift())?;
    let kc = cx.cycle_through(&anchor)?;
    let kappa = periodic_on(&bp, &kc);
    let eta = cx.params.parry_share;
    let nu = InvariantMeasure::mix(eta, parry.clone(), kappa.clone());
    let target = (1.0 - cx.params.entropy_slack) * cx.h;
    let theta = ((target - eta * cx.h) / (sub.entropy - eta * cx.h)).clamp(0.0, 0.999);
    let omega = InvariantMeasure::mix(theta, mu.clone(), nu.clone());
    let mass = omega.cylinder(&bp.encode(&anchor).expect("admissible anchor"));
    let atoms = [markov("mu"), markov("parry"), cycle_src(&kc)];
    let mut plan = cx.planner(bp.block_len());
    cx.push_prefix(&mut plan)?;
    plan.push_literal(anchor.clone())?;
    cx.sweep(
        &mut plan,
        &atoms,
        &[theta, (1.0 - theta) * eta, (1.0 - theta) * (1.0 - eta)],
        &[1.0, 0.0, 0.0],
    )?;
    Ok(Recipe {
        measures: vec![
            named("parry", &parry),
            named("mu", &mu),
            named("kappa", &kappa),
            named("nu", &nu),
            named("omega", &omega),
        ],
        k: KStructure::Segment { left: "omega".into(), right: "mu".into() },
        support_facts: vec![
            SupportFact::FullSupport { measure: "omega".into() },
            SupportFact::ProperSupport { measure: "mu".into() },
            SupportFact::WordOutsideSupports { word: anchor.clone(), measures: vec!["mu".into()] },
        ],
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::WordLowerDensityAtMost { word: anchor.clone(), max: 0.01 },
            ExpectedStatistic::WordUpperDensityAtLeast { word: anchor.clone(), min: 0.4 * mass },
        ],
        anchor: Some(anchor),
        schedule: plan.finish()?,
        presentation: bp,
    })
}

/// Rounds needed for chain schedules of lengths `B i` to reach `N`.
fn rounds_needed(n: usize, base: usize, gap: usize) -> usize {
    let (mut total, mut i) = (0usize, 0usize);
    while total < n {
        i += 1;
        total += base * i + 2 * gap;
    }
    i
}

fn qw_not_v(cx: &Ctx) -> Result<Recipe> {
    let (sub, mu, _) = proper_parts(cx)?;
    let bp = sub.presentation.clone();
    let b = bp.block_len();
    let target = (1.0 - cx.params.entropy_slack) * cx.h;
    let c = (2.0 * (1.0 - target / sub.entropy)).clamp(1e-3, 1.0);
    let rounds = rounds_needed(cx.n, cx.params.block_base, cx.gap);
    let mut cycles = Vec::new();
    for p in 1..=16 {
        cycles = cx.shift.primitive_cycles(p);
        if cycles.len() >= rounds {
            break;
        }
    }
    let mut measures = vec![named("mu", &mu)];
    let mut links = Vec::new();
    let mut plan = cx.planner(b);
    cx.push_prefix(&mut plan)?;
    let mut i = 1;
    while !plan.is_full() {
        let cyc = &cycles[(i - 1) % cycles.len()];
        let name = format!("m_{i}");
        let theta = 1.0 - c / (i + 1) as f64;
        measures.push(named(&name, &periodic_on(&bp, cyc)));
        links.push(ChainLink { theta, cycle: name });
        let s = cx.params.block_base * i;
        plan.push(markov("mu"), (theta * s as f64).round() as usize)?;
        let periodic_len = (((1.0 - theta) * s as f64).round() as usize).max(cyc.len());
        plan.push(cycle_src(cyc), periodic_len)?;
        i += 1;
    }
    Ok(Recipe {
        measures,
        k: KStructure::Chain { base: "mu".into(), links },
        support_facts: vec![SupportFact::ProperSupport { measure: "mu".into() }, SupportFact::ChainSupportsProper],
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::CylinderVisitsAtLeast { len: 3, min_visits: 8 },
        ],
        anchor: None,
        schedule: plan.finish()?,
        presentation: bp,
    })
}

fn i_not_qw(cx: &Ctx) -> Result<Recipe> {
    let sub = proper_subshift(cx.shift, cx.params.subshift_slack, cx.params.mode)?;
    let mu = parry_on_subgraph(sub.presentation.shift(), &sub.support);
    let bp = sub.presentation.clone();
    let phi = cx.phi.lift(&bp);
    let mu_int = integral(&mu, &phi);
    // first orbit outside S_μ with a different integral
    let kc = cx
        .shift
        .primitive_cycles(16)
        .into_iter()
        .find(|c| {
            let enc = bp.encode_cycle(c).expect("admissible cycle");
            !mu.support_contains_cycle(&enc) && (cx.phi.cycle_average(c) - mu_int).abs() > 1e-9
        })
        .ok_or(Error::IrregularityUnavailable)?;
    let anchor = anchor_avoiding(cx.shift, &sub, &kc)?;
    let kappa = periodic_on(&bp, &kc);
    let target = (1.0 - cx.params.entropy_slack) * cx.h;
    let theta = (target / sub.entropy).clamp(0.0, 0.999);
    let omega = InvariantMeasure::mix(theta, mu.clone(), kappa.clone());
    let gap_size = (integral(&omega, &phi) - mu_int).abs();
    // the anchor continues into the escape orbit so that short self-cylinders
    // recur at the junctions where that orbit is entered
    let mut head = anchor.0.clone();
    let p = kc.len();
    if let Some(o) = (0..p).find(|&o| cx.shift.allowed(anchor[anchor.len() - 1], kc[o])) {
        head.extend((0..cx.params.lead_in).map(|t| kc[(o + t) % p]));
    }
    let atoms = [markov("mu"), cycle_src(&kc)];
    let mut plan = cx.planner(bp.block_len());
    cx.push_prefix(&mut plan)?;
    plan.push_literal(Word(head))?;
    cx.sweep(&mut plan, &atoms, &[theta, 1.0 - theta], &[1.0, 0.0])?;
    Ok(Recipe {
        measures: vec![named("mu", &mu), named("kappa", &kappa), named("omega", &omega)],
        k: KStructure::Segment { left: "mu".into(), right: "omega".into() },
        support_facts: vec![
            SupportFact::ProperSupport { measure: "mu".into() },
            SupportFact::DisjointSupports { a: "mu".into(), b: "kappa".into() },
            SupportFact::DistinctIntegrals { a: "mu".into(), b: "omega".into() },
            SupportFact::WordOutsideSupports { word: anchor.clone(), measures: vec!["mu".into(), "kappa".into()] },
        ],
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::SelfUpperDensityDecreasing { lens: vec![4, 8, 12], final_max: 0.02 },
            ExpectedStatistic::TraceOscillationAtLeast { min: 0.4 * gap_size, from_fraction: 0.5 },
        ],
        anchor: Some(anchor),
        schedule: plan.finish()?,
        presentation: bp,
    })
}

fn qr_not_erg(cx: &Ctx) -> Result<Recipe> {
    let bp = ambient_presentation(cx.shift);
    let phi = cx.phi.lift(&bp);
    let parry = parry_measure(bp.shift())?;
    let c = cx.shift.primitive_cycles(cx.shift.k().max(2)).into_iter().next().ok_or(Error::NotPrimitive)?;
    let nu = periodic_on(&bp, &c);
    let eps = cx.params.entropy_slack;
    let rho = InvariantMeasure::mix(1.0 - eps, parry.clone(), nu.clone());
    let mut plan = cx.planner(1);
    cx.push_prefix(&mut plan)?;
    cx.rounds(&mut plan, &[markov("parry"), cycle_src(&c)], &[1.0 - eps, eps])?;
    Ok(Recipe {
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::TraceOscillationAtMost { max: 0.01, from_fraction: 0.75 },
            ExpectedStatistic::TraceLimit { target: integral(&rho, &phi), tol: 0.01 },
        ],
        measures: vec![named("parry", &parry), named("nu", &nu), named("rho", &rho)],
        k: KStructure::Singleton { measure: "rho".into() },
        support_facts: vec![
            SupportFact::FullSupport { measure: "rho".into() },
            SupportFact::NonErgodic { measure: "rho".into() },
        ],
        anchor: None,
        schedule: plan.finish()?,
        presentation: bp,
    })
}

fn r_full_support(cx: &Ctx) -> Result<Recipe> {
    let bp = ambient_presentation(cx.shift);
    let phi = cx.phi.lift(&bp);
    let parry = parry_measure(bp.shift())?;
    let mut plan = cx.planner(1);
    cx.push_prefix(&mut plan)?;
    cx.rounds(&mut plan, &[markov("parry")], &[1.0])?;
    Ok(Recipe {
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::TraceLimit { target: integral(&parry, &phi), tol: 0.01 },
            ExpectedStatistic::CylinderFrequencyRatioAtLeast { len: 3, ratio: 0.2 },
        ],
        measures: vec![named("parry", &parry)],
        k: KStructure::Singleton { measure: "parry".into() },
        support_facts: vec![
            SupportFact::FullSupport { measure: "parry".into() },
            SupportFact::Ergodic { measure: "parry".into() },
        ],
        anchor: None,
        schedule: plan.finish()?,
        presentation: bp,
    })
}

fn almost_periodic(cx: &Ctx) -> Result<Recipe> {
    let g = MinimalGenerator::for_shift(cx.shift)?;
    let mut plan = cx.planner(1);
    let mut offset = 0;
    if let Some(p) = cx.prefix {
        match g.find(p, 1 << 12) {
            Some(o) => offset = o,
            None => plan.push_literal(p.clone())?,
        }
    }
    let room = plan.room();
    plan.push(SegmentSource::Minimal { generator: g, offset }, room)?;
    let bound = match g.kind {
        MinimalKind::ThueMorse => THUE_MORSE_GAP_BOUND,
        MinimalKind::Fibonacci => FIBONACCI_GAP_BOUND,
    };
    Ok(Recipe {
        presentation: ambient_presentation(cx.shift),
        measures: Vec::new(),
        k: KStructure::Minimal { generator: g },
        support_facts: vec![SupportFact::MinimalWordAdmissible],
        expected: vec![
            ExpectedStatistic::HorizonAtLeast { n: cx.n },
            ExpectedStatistic::FactorGapsAtMost { max_len: FACTOR_GAP_LEN, bound },
            ExpectedStatistic::NotEventuallyPeriodic,
        ],
        anchor: None,
        schedule: plan.finish()?,
    })
}

/// Fraction of rotations of `c^∞` that begin with its own first `len` symbols.
fn self_density(c: &[Symbol], len: usize) -> f64 {
    let p = c.len();
    let hits = (0..p).filter(|&r| (0..len).all(|t| c[(r + t) % p] == c[t % p])).count();
    hits as f64 / p as f64
}

fn periodic(cx: &Ctx) -> Result<Recipe> {
    let c = match cx.prefix {
        Some(p) => cx.cycle_through(p)?,
        None => {
            let cycles = cx.shift.primitive_cycles(16);
            cycles
                .iter()
                .find(|c| c.len() == 2)
                .or_else(|| cycles.iter().find(|c| c.len() >= 2))
                .or(cycles.first())
                .cloned()
                .ok_or(Error::NotPrimitive)?
        }
    };
    let bp = ambient_presentation(cx.shift);
    let m = periodic_on(&bp, &c);
    let mut plan = cx.planner(1);
    plan.push(cycle_src(&c), cx.n)?;
    let tol = 8.0 / cx.n as f64;
    let mut expected = vec![ExpectedStatistic::HorizonAtLeast { n: cx.n }];
    for len in crate::classify::DEFAULT_LADDER {
        expected.push(ExpectedStatistic::SelfDensityEquals { len, value: self_density(&c, len), tol });
    }
    expected.push(ExpectedStatistic::FactorGapsAtMost { max_len: FACTOR_GAP_LEN, bound: c.len() });
    Ok(Recipe {
        measures: vec![named("cycle", &m)],
        k: KStructure::Singleton { measure: "cycle".into() },
        support_facts: vec![SupportFact::Ergodic { measure: "cycle".into() }],
        expected,
        anchor: None,
        schedule: plan.finish()?,
        presentation: bp,
    })
}

/// Words of every segment, in order.
fn realize_segments(
    schedule: &Schedule,
    bp: &BlockPresentation,
    measures: &[NamedMeasure],
    seed: u64,
    mode: Mode,
) -> Result<Vec<Word>> {
    let b = bp.block_len();
    let idx: Vec<usize> = (0..schedule.segments.len()).collect();
    par::map(mode, &idx, |&i| {
        let seg = &schedule.segments[i];
        match &seg.source {
            SegmentSource::Literal { word } => Ok(word.clone()),
            SegmentSource::Cycle { cycle } => Ok(Word((0..seg.len).map(|t| cycle[t % cycle.len()]).collect())),
            SegmentSource::Minimal { generator, offset } => Ok(generator.generate(*offset, seg.len)),
            SegmentSource::Markov { measure } => {
                let m = measures
                    .iter()
                    .find(|m| &m.name == measure)
                    .ok_or_else(|| Error::CertificateMismatch(format!("segment {i} samples unknown measure {measure:?}")))?;
                if seg.len < b {
                    return Err(Error::CertificateMismatch(format!("segment {i} shorter than the block length")));
                }
                let path = sample_with(&m.measure, seg.len - b + 1, &mut rng_for(seed, i as u64), None)?;
                Ok(Word(bp.decode(&path)))
            }
        }
    })
    .into_iter()
    .collect()
}

fn assemble(shift: &ShiftSpace, parts: &[Word]) -> Result<Word> {
    let mut bridges = Bridges::new(shift)?;
    let mut out: Vec<Symbol> = Vec::new();
    for seg in parts {
        if let (Some(&last), Some(&first)) = (out.last(), seg.first()) {
            out.extend_from_slice(bridges.interior(last, first)?);
        }
        out.extend_from_slice(seg);
    }
    Ok(Word(out))
}

pub fn synthesize_witness(
    s: &ShiftSpace,
    class: GapClass,
    phi: &Potential,
    n: usize,
    seed: u64,
    pinned_prefix: Option<&Word>,
) -> Result<OrbitPrefix> {
    synthesize_with(s, class, phi, n, seed, pinned_prefix, &SynthesisParams::default())
}

pub fn synthesize_with(
    s: &ShiftSpace,
    class: GapClass,
    phi: &Potential,
    n: usize,
    seed: u64,
    pinned_prefix: Option<&Word>,
    params: &SynthesisParams,
) -> Result<OrbitPrefix> {
    let gap = s.primitive_gap().ok_or(Error::NotPrimitive)?;
    if n == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    if let Some(p) = pinned_prefix {
        if p.is_empty() || !s.is_admissible(p)? {
            return Err(Error::NotAdmissible(p.0.clone()));
        }
    }
    let cx = Ctx { shift: s, phi, n, prefix: pinned_prefix, params, gap, h: s.topological_entropy() };
    let recipe = match class {
        GapClass::WNotQr => w_not_qr(&cx),
        GapClass::VNotW => v_not_w(&cx),
        GapClass::QwNotV => qw_not_v(&cx),
        GapClass::INotQw => i_not_qw(&cx),
        GapClass::QrNotErgNotA => qr_not_erg(&cx),
        GapClass::RFullSupport => r_full_support(&cx),
        GapClass::AlmostPeriodicNotPer => almost_periodic(&cx),
        GapClass::Periodic => periodic(&cx),
    }?;
    let bp = &recipe.presentation;
    let parts = realize_segments(&recipe.schedule, bp, &recipe.measures, seed, params.mode)?;
    let word = assemble(s, &parts)?;
    debug_assert_eq!(word.len(), n);
    let lifted = phi.lift(bp);
    let facts = all_measures(&recipe.measures, &recipe.k)?
        .iter()
        .map(|(name, m)| measure_fact(name, m, bp.shift(), &lifted))
        .collect::<Result<Vec<_>>>()?;
    let inf = inf_entropy(&recipe.k, &facts)?;
    let certificate = Certificate {
        schema: Certificate::SCHEMA.to_string(),
        gap_class: class,
        shift: s.to_def(),
        potential: phi.to_def(),
        block_len: bp.block_len(),
        measures: recipe.measures,
        k_structure: recipe.k,
        facts,
        support_facts: recipe.support_facts,
        inf_entropy_over_k: inf,
        h_top: cx.h,
        entropy_slack: params.entropy_slack,
        expected_statistics: recipe.expected,
        // the anchor is the default pinned prefix of the classes that have one
        pinned_prefix: pinned_prefix.cloned().or_else(|| recipe.anchor.clone()),
        anchor: recipe.anchor,
        seed,
        horizon: n,
        schedule: recipe.schedule,
    };
    Ok(OrbitPrefix { word, certificate })
}

/// Support facts each class must state.
fn required_facts(class: GapClass) -> &'static [&'static str] {
    match class {
        GapClass::WNotQr => &["full_support", "distinct_integrals"],
        GapClass::VNotW => &["full_support", "proper_support", "word_outside_supports"],
        GapClass::QwNotV => &["proper_support", "chain_supports_proper"],
        GapClass::INotQw => &["proper_support", "disjoint_supports", "distinct_integrals", "word_outside_supports"],
        GapClass::QrNotErgNotA => &["full_support", "non_ergodic"],
        GapClass::RFullSupport => &["full_support", "ergodic"],
        GapClass::AlmostPeriodicNotPer => &["minimal_word_admissible"],
        GapClass::Periodic => &["ergodic"],
    }
}

fn fact_kind(f: &SupportFact) -> String {
    serde_json::to_value(f)
        .ok()
        .and_then(|v| v.get("fact").and_then(|k| k.as_str().map(str::to_string)))
        .unwrap_or_default()
}

/// Checks that passed, in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub checks: Vec<String>,
}

fn mismatch<T>(msg: String) -> Result<T> {
    Err(Error::CertificateMismatch(msg))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FACT_TOL
}

/// Recomputes every fact of the certificate and checks the word against its
/// schedule. Windows running past the end of a truncated word are compared on
/// their overlap only.
pub fn certify(o: &OrbitPrefix) -> Result<CertifyReport> {
    let cert = &o.certificate;
    let mut report = CertifyReport::default();
    if cert.schema != Certificate::SCHEMA {
        return mismatch(format!("schema {:?}", cert.schema));
    }
    let shift = ShiftSpace::from_def(&cert.shift)?;
    if !shift.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let phi = Potential::from_def(&shift, &cert.potential)?;
    if cert.block_len == 0 || cert.block_len > MAX_BLOCK_LEN {
        return mismatch(format!("block length {}", cert.block_len));
    }
    let bp = shift.higher_block(cert.block_len);
    let pshift = bp.shift();
    let lifted = phi.lift(&bp);

    let h = shift.topological_entropy();
    if !close(h, cert.h_top) {
        return mismatch(format!("h_top: stored {}, recomputed {h}", cert.h_top));
    }
    report.checks.push("h_top".into());

    for m in &cert.measures {
        m.measure
            .validate(pshift)
            .map_err(|e| Error::CertificateMismatch(format!("measure {}: {e}", m.name)))?;
    }
    let all = all_measures(&cert.measures, &cert.k_structure)?;
    if all.len() != cert.facts.len() {
        return mismatch(format!("{} facts for {} measures", cert.facts.len(), all.len()));
    }
    for ((name, m), stored) in all.iter().zip(&cert.facts) {
        let f = measure_fact(name, m, pshift, &lifted)?;
        if f.name != stored.name {
            return mismatch(format!("fact {:?} out of order, expected {:?}", stored.name, f.name));
        }
        if !close(f.entropy, stored.entropy) {
            return mismatch(format!("entropy of {name}: stored {}, recomputed {}", stored.entropy, f.entropy));
        }
        if !close(f.integral, stored.integral) {
            return mismatch(format!("integral of {name}: stored {}, recomputed {}", stored.integral, f.integral));
        }
        if f.full_support != stored.full_support || f.ergodic != stored.ergodic {
            return mismatch(format!("support or ergodicity flag of {name}"));
        }
    }
    report.checks.push(format!("{} measure facts", all.len()));

    let inf = inf_entropy(&cert.k_structure, &cert.facts)?;
    if !close(inf, cert.inf_entropy_over_k) {
        return mismatch(format!("inf entropy over K: stored {}, recomputed {inf}", cert.inf_entropy_over_k));
    }
    report.checks.push("inf entropy over K".into());

    check_support_facts(cert, &shift, &bp, &all, &lifted)?;
    report.checks.push(format!("{} support facts", cert.support_facts.len()));

    check_word(o, &shift, &bp)?;
    report.checks.push("word admissible and matches its schedule".into());
    Ok(report)
}

fn check_support_facts(
    cert: &Certificate,
    shift: &ShiftSpace,
    bp: &BlockPresentation,
    all: &[(String, InvariantMeasure)],
    phi: &Potential,
) -> Result<()> {
    let pshift = bp.shift();
    let find = |name: &str| {
        all.iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::CertificateMismatch(format!("support fact names unknown measure {name:?}")))
    };
    let kinds: BTreeSet<String> = cert.support_facts.iter().map(fact_kind).collect();
    for req in required_facts(cert.gap_class) {
        if !kinds.contains(*req) {
            return mismatch(format!("{} certificate lacks a {req} fact", cert.gap_class));
        }
    }
    for f in &cert.support_facts {
        let holds = match f {
            SupportFact::FullSupport { measure } => find(measure)?.has_full_support(pshift),
            SupportFact::ProperSupport { measure } => !find(measure)?.has_full_support(pshift),
            SupportFact::ChainSupportsProper => match &cert.k_structure {
                KStructure::Chain { links, .. } => (1..=links.len())
                    .map(|i| find(&format!("nu_{i}")))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .all(|m| !m.has_full_support(pshift)),
                _ => false,
            },
            SupportFact::DisjointSupports { a, b } => {
                let (ma, mb) = (find(a)?, find(b)?);
                // a periodic orbit and a support are either nested or disjoint
                let orbit_outside = |p: &InvariantMeasure, q: &InvariantMeasure| match p {
                    InvariantMeasure::Periodic { cycle } => !q.support_contains_cycle(cycle),
                    _ => false,
                };
                orbit_outside(mb, ma) || orbit_outside(ma, mb)
            }
            SupportFact::DistinctIntegrals { a, b } => (find(a)?.integrate(phi)? - find(b)?.integrate(phi)?).abs() > 1e-12,
            SupportFact::Ergodic { measure } => find(measure)?.is_ergodic(),
            SupportFact::NonErgodic { measure } => !find(measure)?.is_ergodic(),
            SupportFact::WordOutsideSupports { word, measures } => {
                shift.is_admissible(word)?
                    && measures
                        .iter()
                        .map(|m| find(m))
                        .collect::<Result<Vec<_>>>()?
                        .iter()
                        .all(|m| !in_support_language(bp, m, word))
            }
            SupportFact::MinimalWordAdmissible => match &cert.k_structure {
                KStructure::Minimal { generator } => {
                    let [a, b] = generator.symbols;
                    let used: &[(Symbol, Symbol)] = match generator.kind {
                        MinimalKind::ThueMorse => &[(a, a), (a, b), (b, a), (b, b)],
                        MinimalKind::Fibonacci => &[(a, b), (b, a), (b, b)],
                    };
                    a != b && a.max(b) < shift.k() && used.iter().all(|&(i, j)| shift.allowed(i, j))
                }
                _ => false,
            },
        };
        if !holds {
            return mismatch(format!("support fact fails: {}", serde_json::to_string(f)?));
        }
    }
    Ok(())
}

fn check_word(o: &OrbitPrefix, shift: &ShiftSpace, bp: &BlockPresentation) -> Result<()> {
    let cert = &o.certificate;
    let sched = &cert.schedule;
    let x = &o.word;
    if !shift.is_admissible(x)? {
        return mismatch("word is not admissible".into());
    }
    if let Some(p) = &cert.pinned_prefix {
        if !x.starts_with(p) {
            return mismatch(format!("word does not begin with the pinned prefix {p}"));
        }
    }
    let gap = shift.primitive_gap().ok_or(Error::NotPrimitive)?;
    if sched.bridge_len != gap || sched.horizon != cert.horizon {
        return mismatch("schedule bridge length or horizon".into());
    }
    let mut expect = 0;
    for (i, seg) in sched.segments.iter().enumerate() {
        if i > 0 {
            expect += gap;
        }
        if seg.start != expect || seg.len == 0 {
            return mismatch(format!("segment {i} starts at {}, expected {expect}", seg.start));
        }
        expect += seg.len;
    }
    if expect != sched.horizon {
        return mismatch(format!("segments cover {expect} symbols, horizon {}", sched.horizon));
    }
    let parts = realize_segments(sched, bp, &cert.measures, cert.seed, Mode::default())?;
    let mut bridges = Bridges::new(shift)?;
    for (i, (seg, part)) in sched.segments.iter().zip(&parts).enumerate() {
        if seg.start >= x.len() {
            break;
        }
        let end = (seg.start + seg.len).min(x.len());
        let window = &x[seg.start..end];
        if window != &part[..window.len()] {
            return mismatch(format!("segment {i} window differs from its scheduled block"));
        }
        // the schedule's own claim about the block, checked independently
        if let SegmentSource::Markov { measure } = &seg.source {
            let m = cert.measure(measure).expect("realized above");
            if window.len() >= bp.block_len() && !in_support_language(bp, m, window) {
                return mismatch(format!("segment {i} leaves the support of {measure}"));
            }
        }
        if i > 0 {
            let prev = &sched.segments[i - 1];
            let b_start = prev.start + prev.len;
            let want = bridges.interior(parts[i - 1][prev.len - 1], part[0])?;
            if x[b_start..seg.start] != *want {
                return mismatch(format!("bridge before segment {i}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_digits(s).unwrap()
    }

    #[test]
    fn class_names_round_trip() {
        for c in GapClass::ALL {
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.name()));
            assert_eq!(c.name().parse::<GapClass>().unwrap(), c);
        }
        assert!("NOPE".parse::<GapClass>().is_err());
    }

    #[test]
    fn glue_full_shift() {
        let full = ShiftSpace::full(2);
        assert_eq!(glue(&full, &[w("00"), w("11")]).unwrap(), w("00011"));
    }

    #[test]
    fn glue_golden_mean() {
        let gm = ShiftSpace::golden_mean();
        assert_eq!(glue(&gm, &[w("010"), w("1")]).unwrap(), w("010001"));
        assert!(matches!(glue(&gm, &[w("11")]), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn proper_subshift_of_full_two_shift() {
        let sub = proper_subshift(&ShiftSpace::full(2), 0.025, Mode::Sequential).unwrap();
        assert_eq!(sub.presentation.block_len(), 4);
        assert!((sub.entropy - 0.675_975_0).abs() < 1e-6, "{}", sub.entropy);
        assert_eq!(anchor_word(&ShiftSpace::full(2), &sub).unwrap(), w("011111"));
    }

    #[test]
    fn golden_mean_has_a_proper_subshift() {
        let gm = ShiftSpace::golden_mean();
        let sub = proper_subshift(&gm, 0.025, Mode::Sequential).unwrap();
        assert!(sub.entropy >= 0.975 * gm.topological_entropy());
        assert!(matches!(proper_subshift(&ShiftSpace::full(1), 0.025, Mode::Sequential), Err(Error::NoProperSubshift)));
    }

    #[test]
    fn periodic_word() {
        let full = ShiftSpace::full(2);
        let phi = Potential::indicator(&full, 1);
        let o = synthesize_witness(&full, GapClass::Periodic, &phi, 10, 1, None).unwrap();
        assert_eq!(o.word, w("0101010101"));
        assert_eq!(o.certificate.inf_entropy_over_k, 0.0);
        certify(&o).unwrap();
    }

    #[test]
    fn stream_round_trip() {
        let x = Word((0..250).map(|i| i % 3).collect());
        let text = stream_text(&x).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(parse_stream(&text).unwrap(), x);
    }
}
