//! Invariant measures with exact bookkeeping: Markov measures (including the
//! Parry measure of maximal entropy), periodic-orbit measures and finite convex
//! mixtures of these.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::potential::Potential;
use crate::shift::{canonical_cycle, strongly_connected_components, ShiftSpace, Symbol, Word};

/// Tolerance for stochasticity, stationarity and weight normalization.
pub const MEASURE_TOL: f64 = 1e-12;

/// The generator behind every random choice: ChaCha with 8 rounds seeded from
/// a 64-bit value, one independent stream per segment index.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InvariantMeasure {
    Markov { transition: Vec<Vec<f64>>, stationary: Vec<f64> },
    Periodic { cycle: Word },
    Mixture { weights: Vec<f64>, components: Vec<InvariantMeasure> },
}

/// Symbols and edges charged by a measure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportGraph {
    pub symbols: BTreeSet<Symbol>,
    pub edges: BTreeSet<(Symbol, Symbol)>,
}

impl SupportGraph {
    pub fn full(shift: &ShiftSpace) -> Self {
        SupportGraph { symbols: (0..shift.k()).collect(), edges: shift.edges().into_iter().collect() }
    }

    pub fn union(&self, other: &SupportGraph) -> SupportGraph {
        SupportGraph {
            symbols: self.symbols.union(&other.symbols).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn is_subgraph_of(&self, other: &SupportGraph) -> bool {
        self.symbols.is_subset(&other.symbols) && self.edges.is_subset(&other.edges)
    }

    pub fn is_full(&self, shift: &ShiftSpace) -> bool {
        *self == SupportGraph::full(shift)
    }

    /// Whether the word is a path in this graph.
    pub fn admits(&self, w: &[Symbol]) -> bool {
        w.iter().all(|s| self.symbols.contains(s)) && w.windows(2).all(|p| self.edges.contains(&(p[0], p[1])))
    }

    /// Whether the periodic point `cycle^∞` lives in the subshift of this graph.
    pub fn admits_cycle(&self, cycle: &[Symbol]) -> bool {
        let p = cycle.len();
        p > 0 && self.admits(cycle) && self.edges.contains(&(cycle[p - 1], cycle[0]))
    }

    pub fn is_strongly_connected(&self) -> bool {
        let syms: Vec<Symbol> = self.symbols.iter().copied().collect();
        if syms.is_empty() {
            return false;
        }
        let n = syms.iter().max().unwrap() + 1;
        let edges: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        let comps = strongly_connected_components(n, &edges);
        comps.len() == 1 && comps[0] == syms
    }

    /// The subshift on this graph, with symbols renumbered in increasing order.
    pub fn to_shift(&self) -> Result<(ShiftSpace, Vec<Symbol>)> {
        let syms: Vec<Symbol> = self.symbols.iter().copied().collect();
        let pos = |s: Symbol| syms.binary_search(&s).expect("edge endpoint in symbol set");
        let mut m = vec![vec![0u8; syms.len()]; syms.len()];
        for &(i, j) in &self.edges {
            m[pos(i)][pos(j)] = 1;
        }
        let shift = ShiftSpace::from_matrix(syms.len(), m)?;
        if shift.k() != syms.len() {
            return Err(Error::InvalidInput("support graph has dead ends".into()));
        }
        Ok((shift, syms))
    }
}

impl InvariantMeasure {
    pub fn periodic(cycle: &[Symbol]) -> Self {
        InvariantMeasure::Periodic { cycle: Word(canonical_cycle(cycle)) }
    }

    /// Markov measure of a row-stochastic matrix; the stationary vector is
    /// found by power iteration.
    pub fn markov(transition: Vec<Vec<f64>>) -> Self {
        let stationary = linalg::stationary(&transition, 1e-15);
        InvariantMeasure::Markov { transition, stationary }
    }

    /// Two-component mixture `θ a + (1 - θ) b`; degenerate weights collapse.
    pub fn mix(theta: f64, a: InvariantMeasure, b: InvariantMeasure) -> Self {
        if theta >= 1.0 {
            return a;
        }
        if theta <= 0.0 {
            return b;
        }
        InvariantMeasure::Mixture { weights: vec![theta, 1.0 - theta], components: vec![a, b] }
    }

    /// Rejects measures violating their invariants by more than the tolerance.
    pub fn validate(&self, shift: &ShiftSpace) -> Result<()> {
        let k = shift.k();
        let bad = |m: String| Err(Error::InvalidInput(m));
        match self {
            InvariantMeasure::Markov { transition: p, stationary: pi } => {
                if p.len() != k || pi.len() != k || p.iter().any(|r| r.len() != k) {
                    return bad(format!("markov measure must be {k}-dimensional"));
                }
                for i in 0..k {
                    let s: f64 = p[i].iter().sum();
                    if (s - 1.0).abs() > MEASURE_TOL {
                        return bad(format!("row {i} sums to {s}"));
                    }
                    for j in 0..k {
                        if p[i][j] < 0.0 || (p[i][j] > 0.0 && !shift.allowed(i, j)) {
                            return bad(format!("transition {i}->{j} has probability {}", p[i][j]));
                        }
                    }
                }
                if pi.iter().any(|&x| x < 0.0) || (pi.iter().sum::<f64>() - 1.0).abs() > MEASURE_TOL {
                    return bad("stationary vector is not a probability vector".into());
                }
                for j in 0..k {
                    let s: f64 = (0..k).map(|i| pi[i] * p[i][j]).sum();
                    if (s - pi[j]).abs() > 1e-11 {
                        return bad(format!("stationary vector fails at {j}: {s} vs {}", pi[j]));
                    }
                }
                Ok(())
            }
            InvariantMeasure::Periodic { cycle } => {
                if !shift.is_cyclically_admissible(cycle)? {
                    return Err(Error::NotAdmissible(cycle.0.clone()));
                }
                Ok(())
            }
            InvariantMeasure::Mixture { weights, components } => {
                if weights.len() != components.len() || weights.is_empty() {
                    return bad("mixture needs one weight per component".into());
                }
                if weights.iter().any(|&w| w <= 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > MEASURE_TOL {
                    return bad("mixture weights must be positive and sum to 1".into());
                }
                components.iter().try_for_each(|c| c.validate(shift))
            }
        }
    }

    /// Metric entropy (natural log). Affine over mixtures.
    pub fn entropy(&self) -> f64 {
        match self {
            InvariantMeasure::Markov { transition, stationary } => {
                let mut h = 0.0;
                for (i, row) in transition.iter().enumerate() {
                    if stationary[i] == 0.0 {
                        continue;
                    }
                    let hi: f64 = row.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
                    h += stationary[i] * hi;
                }
                h.max(0.0)
            }
            InvariantMeasure::Periodic { .. } => 0.0,
            InvariantMeasure::Mixture { weights, components } => {
                weights.iter().zip(components).map(|(w, c)| w * c.entropy()).sum()
            }
        }
    }

    /// Probability of the cylinder `[w]`.
    pub fn cylinder(&self, w: &[Symbol]) -> f64 {
        if w.is_empty() {
            return 1.0;
        }
        match self {
            InvariantMeasure::Markov { transition, stationary } => {
                if w.iter().any(|&s| s >= stationary.len()) {
                    return 0.0;
                }
                w.windows(2).fold(stationary[w[0]], |acc, p| acc * transition[p[0]][p[1]])
            }
            InvariantMeasure::Periodic { cycle } => {
                let p = cycle.len();
                let hits = (0..p).filter(|&r| (0..w.len()).all(|t| cycle[(r + t) % p] == w[t])).count();
                hits as f64 / p as f64
            }
            InvariantMeasure::Mixture { weights, components } => {
                weights.iter().zip(components).map(|(a, c)| a * c.cylinder(w)).sum()
            }
        }
    }

    /// Words of length `r` with positive probability, with their probabilities.
    pub fn word_distribution(&self, r: usize) -> Vec<(Vec<Symbol>, f64)> {
        match self {
            InvariantMeasure::Markov { transition, stationary } => {
                let mut out = Vec::new();
                let mut stack = Vec::with_capacity(r);
                fn rec(
                    p: &[Vec<f64>],
                    r: usize,
                    prob: f64,
                    stack: &mut Vec<Symbol>,
                    out: &mut Vec<(Vec<Symbol>, f64)>,
                ) {
                    if stack.len() == r {
                        out.push((stack.clone(), prob));
                        return;
                    }
                    let last = *stack.last().unwrap();
                    for (j, &q) in p[last].iter().enumerate() {
                        if q > 0.0 {
                            stack.push(j);
                            rec(p, r, prob * q, stack, out);
                            stack.pop();
                        }
                    }
                }
                for (i, &pi) in stationary.iter().enumerate() {
                    if pi > 0.0 {
                        stack.push(i);
                        rec(transition, r, pi, &mut stack, &mut out);
                        stack.pop();
                    }
                }
                out
            }
            InvariantMeasure::Periodic { cycle } => {
                let p = cycle.len();
                let mut out: Vec<(Vec<Symbol>, f64)> = Vec::new();
                for i in 0..p {
                    let w: Vec<Symbol> = (0..r).map(|t| cycle[(i + t) % p]).collect();
                    match out.iter_mut().find(|(x, _)| *x == w) {
                        Some(e) => e.1 += 1.0 / p as f64,
                        None => out.push((w, 1.0 / p as f64)),
                    }
                }
                out
            }
            InvariantMeasure::Mixture { weights, components } => {
                let mut out: Vec<(Vec<Symbol>, f64)> = Vec::new();
                for (a, c) in weights.iter().zip(components) {
                    for (w, q) in c.word_distribution(r) {
                        match out.iter_mut().find(|(x, _)| *x == w) {
                            Some(e) => e.1 += a * q,
                            None => out.push((w, a * q)),
                        }
                    }
                }
                out
            }
        }
    }

    /// `∫ φ dm`. Linear over mixtures.
    pub fn integrate(&self, phi: &Potential) -> Result<f64> {
        match self {
            InvariantMeasure::Periodic { cycle } => {
                check_words(phi, std::slice::from_ref(&cycle.0), true)?;
                Ok(phi.cycle_average(cycle))
            }
            InvariantMeasure::Mixture { weights, components } => {
                let mut s = 0.0;
                for (a, c) in weights.iter().zip(components) {
                    s += a * c.integrate(phi)?;
                }
                Ok(s)
            }
            InvariantMeasure::Markov { .. } => {
                let dist = self.word_distribution(phi.range());
                let words: Vec<Vec<Symbol>> = dist.iter().map(|(w, _)| w.clone()).collect();
                check_words(phi, &words, false)?;
                Ok(dist.iter().map(|(w, q)| q * phi.value(w)).sum())
            }
        }
    }

    /// Symbols and edges of positive probability; union over mixtures.
    pub fn support(&self) -> SupportGraph {
        match self {
            InvariantMeasure::Markov { transition, stationary } => {
                let mut g = SupportGraph::default();
                for (i, &pi) in stationary.iter().enumerate() {
                    if pi > 0.0 {
                        g.symbols.insert(i);
                        for (j, &q) in transition[i].iter().enumerate() {
                            if q > 0.0 {
                                g.edges.insert((i, j));
                            }
                        }
                    }
                }
                g
            }
            InvariantMeasure::Periodic { cycle } => {
                let p = cycle.len();
                SupportGraph {
                    symbols: cycle.iter().copied().collect(),
                    edges: (0..p).map(|i| (cycle[i], cycle[(i + 1) % p])).collect(),
                }
            }
            InvariantMeasure::Mixture { components, .. } => {
                components.iter().fold(SupportGraph::default(), |g, c| g.union(&c.support()))
            }
        }
    }

    /// Ergodic (not necessarily extreme among mixtures of equal parts)
    /// components, flattened.
    pub fn ergodic_components(&self) -> Vec<(f64, &InvariantMeasure)> {
        match self {
            InvariantMeasure::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .flat_map(|(a, c)| c.ergodic_components().into_iter().map(move |(b, m)| (a * b, m)))
                .collect(),
            other => vec![(1.0, other)],
        }
    }

    /// Markov measures are ergodic iff their support graph is strongly
    /// connected; mixtures of distinct components are not.
    pub fn is_ergodic(&self) -> bool {
        match self {
            InvariantMeasure::Markov { .. } => self.support().is_strongly_connected(),
            InvariantMeasure::Periodic { .. } => true,
            InvariantMeasure::Mixture { .. } => {
                let comps = self.ergodic_components();
                let first = comps[0].1;
                comps.iter().all(|(_, c)| *c == first) && first.is_ergodic()
            }
        }
    }

    /// Whether the support of the measure is the whole shift. A periodic
    /// orbit, or a union of proper pieces, has full support only when the shift
    /// itself is that small; the graph union of a mixture is not enough.
    pub fn has_full_support(&self, shift: &ShiftSpace) -> bool {
        let single_cycle = (0..shift.k()).all(|i| shift.successors(i).count() == 1);
        self.ergodic_components()
            .into_iter()
            .any(|(_, c)| match c {
                InvariantMeasure::Markov { .. } => c.support().is_full(shift),
                InvariantMeasure::Periodic { .. } => single_cycle && c.support().is_full(shift),
                InvariantMeasure::Mixture { .. } => unreachable!("flattened"),
            })
    }

    /// Whether `w` occurs in some point of the support.
    pub fn support_admits(&self, w: &[Symbol]) -> bool {
        self.ergodic_components().into_iter().any(|(_, c)| match c {
            InvariantMeasure::Markov { .. } => c.support().admits(w),
            InvariantMeasure::Periodic { .. } => c.cylinder(w) > 0.0,
            InvariantMeasure::Mixture { .. } => unreachable!("flattened"),
        })
    }

    /// Whether the periodic orbit of `cycle` lies in the support. Orbits are
    /// minimal, so otherwise they are disjoint from it.
    pub fn support_contains_cycle(&self, cycle: &[Symbol]) -> bool {
        let c = canonical_cycle(cycle);
        self.ergodic_components().into_iter().any(|(_, m)| match m {
            InvariantMeasure::Markov { .. } => m.support().admits_cycle(&c),
            InvariantMeasure::Periodic { cycle: own } => own.0 == c,
            InvariantMeasure::Mixture { .. } => unreachable!("flattened"),
        })
    }
}

fn check_words(phi: &Potential, words: &[Vec<Symbol>], cyclic: bool) -> Result<()> {
    for w in words {
        let probe: Vec<Vec<Symbol>> = if cyclic {
            let p = w.len();
            (0..p).map(|i| (0..phi.range()).map(|t| w[(i + t) % p]).collect()).collect()
        } else {
            vec![w.clone()]
        };
        for x in probe {
            if !phi.table().contains_key(&x) {
                return Err(Error::RangeMismatch(format!("potential undefined on {x:?}")));
            }
        }
    }
    Ok(())
}

/// Maximal-entropy Markov measure: `P_ij = A_ij v_j / (λ v_i)` and
/// `π_i ∝ u_i v_i` for left/right Perron vectors `u`, `v`.
pub fn parry_measure(shift: &ShiftSpace) -> Result<InvariantMeasure> {
    if !shift.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let full = SupportGraph::full(shift);
    Ok(parry_on_subgraph(shift, &full))
}

/// Parry measure of a strongly connected subgraph, as a measure on the
/// ambient alphabet. Rows of uncharged symbols are filled uniformly over
/// their ambient successors so the matrix stays stochastic.
pub fn parry_on_subgraph(shift: &ShiftSpace, g: &SupportGraph) -> InvariantMeasure {
    let k = shift.k();
    let syms: Vec<Symbol> = g.symbols.iter().copied().collect();
    let sub: Vec<Vec<f64>> = syms
        .iter()
        .map(|&i| syms.iter().map(|&j| if g.edges.contains(&(i, j)) { 1.0 } else { 0.0 }).collect())
        .collect();
    let right = linalg::perron(&sub, 1e-15);
    let left = linalg::perron(&linalg::transpose(&sub), 1e-15);
    let lambda = right.eigenvalue;
    let mut p = vec![vec![0.0; k]; k];
    let mut pi = vec![0.0; k];
    for (a, &i) in syms.iter().enumerate() {
        let mut row_sum = 0.0;
        for (b, &j) in syms.iter().enumerate() {
            if sub[a][b] > 0.0 {
                let v = right.vector[b] / (lambda * right.vector[a]);
                p[i][j] = v;
                row_sum += v;
            }
        }
        // remove the residual of the eigen-solve
        for &j in &syms {
            p[i][j] /= row_sum;
        }
        pi[i] = left.vector[a] * right.vector[a];
    }
    let z: f64 = pi.iter().sum();
    for x in pi.iter_mut() {
        *x /= z;
    }
    for i in 0..k {
        if !g.symbols.contains(&i) {
            let succ: Vec<Symbol> = shift.successors(i).collect();
            for &j in &succ {
                p[i][j] = 1.0 / succ.len() as f64;
            }
        }
    }
    InvariantMeasure::Markov { transition: p, stationary: pi }
}

/// Periodic orbits of period at most `bound` meeting the cylinder `[w]`.
pub fn periodic_measures_in_cylinder(shift: &ShiftSpace, w: &[Symbol], bound: usize) -> Result<Vec<InvariantMeasure>> {
    if !shift.is_admissible(w)? {
        return Err(Error::NotAdmissible(w.to_vec()));
    }
    if bound < w.len() {
        return Err(Error::InvalidInput(format!("bound {bound} is shorter than the word")));
    }
    Ok(shift
        .primitive_cycles(bound)
        .into_iter()
        .filter(|c| {
            let p = c.len();
            (0..p).any(|r| w.iter().enumerate().all(|(t, &s)| c[(r + t) % p] == s))
        })
        .map(|c| InvariantMeasure::Periodic { cycle: c })
        .collect())
}

/// Draws the next symbol from a stochastic row.
pub fn draw(row: &[f64], rng: &mut impl Rng) -> Symbol {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (j, &q) in row.iter().enumerate() {
        if q > 0.0 {
            acc += q;
            last = j;
            if u < acc {
                return j;
            }
        }
    }
    last
}

/// A word of length `n` typical for a Markov or periodic measure.
///
/// Markov words start from `start` or a draw from `π`; periodic words repeat
/// the cycle from `start`'s first occurrence (or from the cycle start).
pub fn sample_with(m: &InvariantMeasure, n: usize, rng: &mut impl Rng, start: Option<Symbol>) -> Result<Word> {
    match m {
        InvariantMeasure::Markov { transition, stationary } => {
            let mut out = Vec::with_capacity(n);
            if n == 0 {
                return Ok(Word(out));
            }
            let mut cur = match start {
                Some(s) => s,
                None => draw(stationary, rng),
            };
            out.push(cur);
            for _ in 1..n {
                cur = draw(&transition[cur], rng);
                out.push(cur);
            }
            Ok(Word(out))
        }
        InvariantMeasure::Periodic { cycle } => {
            let p = cycle.len();
            let offset = start.and_then(|s| cycle.iter().position(|&c| c == s)).unwrap_or(0);
            Ok(Word((0..n).map(|i| cycle[(offset + i) % p]).collect()))
        }
        InvariantMeasure::Mixture { .. } => {
            Err(Error::InvalidInput("mixtures are sampled block by block by the scheduler".into()))
        }
    }
}

pub fn sample_typical_word(m: &InvariantMeasure, n: usize, seed: u64, start: Option<Symbol>) -> Result<Word> {
    sample_with(m, n, &mut rng_for(seed, 0), start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn parry_golden_mean_closed_form() {
        let gm = ShiftSpace::golden_mean();
        let m = parry_measure(&gm).unwrap();
        m.validate(&gm).unwrap();
        let l = golden();
        let InvariantMeasure::Markov { transition: p, stationary: pi } = &m else { panic!() };
        assert!((p[0][0] - 1.0 / l).abs() < 1e-13);
        assert!((p[0][1] - 1.0 / (l * l)).abs() < 1e-13);
        assert!((p[1][0] - 1.0).abs() < 1e-13);
        assert!((pi[0] - l * l / (1.0 + l * l)).abs() < 1e-13);
        assert!((m.entropy() - l.ln()).abs() < 1e-12);
        let phi = Potential::indicator(&gm, 1);
        assert!((m.integrate(&phi).unwrap() - 1.0 / (1.0 + l * l)).abs() < 1e-12);
        assert!(m.support().is_full(&gm));
        assert!(m.has_full_support(&gm));
        assert!(m.is_ergodic());
    }

    #[test]
    fn parry_full_shifts_are_uniform() {
        for k in [2usize, 3] {
            let s = ShiftSpace::full(k);
            let m = parry_measure(&s).unwrap();
            let InvariantMeasure::Markov { transition: p, .. } = &m else { panic!() };
            assert!(p.iter().flatten().all(|&x| (x - 1.0 / k as f64).abs() < 1e-14));
            assert!((m.entropy() - (k as f64).ln()).abs() < 1e-12);
        }
        let diag = ShiftSpace::from_matrix(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(parry_measure(&diag), Err(Error::NotPrimitive)));
    }

    #[test]
    fn mixtures_are_affine() {
        let full = ShiftSpace::full(2);
        let p = parry_measure(&full).unwrap();
        let m = InvariantMeasure::mix(0.5, p, InvariantMeasure::periodic(&[0]));
        m.validate(&full).unwrap();
        assert!((m.entropy() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(!m.is_ergodic());
        let phi = Potential::indicator(&full, 1);
        assert!((m.integrate(&phi).unwrap() - 0.25).abs() < 1e-15);
        assert!(m.has_full_support(&full));
        let two = InvariantMeasure::mix(0.3, InvariantMeasure::periodic(&[0]), InvariantMeasure::periodic(&[1, 0]));
        let g = two.support();
        assert_eq!(g.symbols, [0, 1].into_iter().collect());
        assert_eq!(g.edges, [(0, 0), (0, 1), (1, 0)].into_iter().collect());
        let three = InvariantMeasure::Mixture {
            weights: vec![0.2, 0.3, 0.5],
            components: vec![
                InvariantMeasure::periodic(&[0]),
                InvariantMeasure::periodic(&[1]),
                InvariantMeasure::periodic(&[0, 1]),
            ],
        };
        assert!(three.support().is_full(&full));
        assert!(!three.has_full_support(&full));
    }

    #[test]
    fn periodic_integrals_and_supports() {
        let full = ShiftSpace::full(2);
        let phi = Potential::indicator(&full, 1);
        assert_eq!(InvariantMeasure::periodic(&[0, 1]).integrate(&phi).unwrap(), 0.5);
        let c = Potential::constant(&full, 3.5);
        assert!((parry_measure(&full).unwrap().integrate(&c).unwrap() - 3.5).abs() < 1e-14);
        let s = InvariantMeasure::periodic(&[0]).support();
        assert_eq!(s.edges, [(0, 0)].into_iter().collect());
    }

    #[test]
    fn cylinder_orbits() {
        let gm = ShiftSpace::golden_mean();
        let orbits = periodic_measures_in_cylinder(&gm, &[0], 3).unwrap();
        let cycles: Vec<String> = orbits
            .iter()
            .map(|m| match m {
                InvariantMeasure::Periodic { cycle } => cycle.to_string(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(cycles, vec!["0", "01", "001"]);
        let full = ShiftSpace::full(2);
        assert_eq!(periodic_measures_in_cylinder(&full, &[1], 1).unwrap(), vec![InvariantMeasure::periodic(&[1])]);
        assert!(matches!(periodic_measures_in_cylinder(&gm, &[1, 1], 3), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn sampling() {
        let full = ShiftSpace::full(2);
        assert_eq!(sample_typical_word(&InvariantMeasure::periodic(&[0, 1]), 5, 1, None).unwrap().to_string(), "01010");
        let gm = ShiftSpace::golden_mean();
        let m = parry_measure(&gm).unwrap();
        let w = sample_typical_word(&m, 1 << 16, 7, None).unwrap();
        assert!(gm.is_admissible(&w).unwrap());
        let f = w.iter().filter(|&&s| s == 1).count() as f64 / w.len() as f64;
        assert!((f - 0.276393).abs() < 0.01, "{f}");
        let b = sample_typical_word(&parry_measure(&full).unwrap(), 1 << 16, 11, None).unwrap();
        let f = b.iter().filter(|&&s| s == 1).count() as f64 / b.len() as f64;
        assert!((f - 0.5).abs() < 0.01);
    }

    #[test]
    fn json_tagging() {
        let m = InvariantMeasure::mix(0.25, InvariantMeasure::periodic(&[1, 0]), InvariantMeasure::periodic(&[1]));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"type\":\"mixture\""));
        assert!(s.contains("\"type\":\"periodic\",\"cycle\":[0,1]"));
        let back: InvariantMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
