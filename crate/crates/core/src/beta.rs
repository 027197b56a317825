//! β-shifts: sequences whose every shift is lexicographically dominated by the
//! expansion of 1 in base β.
//!
//! β is read as an exact decimal literal `p / 10^d`. With `r_1 = β`, the greedy
//! digits are `a_m = ⌊r_m⌋` and `r_{m+1} = β (r_m - a_m)`; writing
//! `r_m = x_m / q^m` with `q = 10^d` keeps every step in integer arithmetic.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::shift::{ln_big, strongly_connected_components, Symbol};

/// Remainders closer than this are identified: a remainder below it ends the
/// expansion, and two remainders within it close a period.
pub const SNAP_TOLERANCE_EXP10: u32 = 30;
pub const DEFAULT_HORIZON: usize = 512;

const GOLDEN: &str = "1.6180339887498948482045868343656381177203091798057628621354486227";
const E: &str = "2.7182818284590452353602874713526624977572470936999595749669676277";

/// An exact decimal β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaValue {
    literal: String,
    num: BigUint,
    den: BigUint,
}

impl BetaValue {
    /// Accepts a positive decimal literal, or `golden` / `e` for 64-digit
    /// truncations of those constants.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let literal = match s {
            "golden" | "phi" => GOLDEN,
            "e" => E,
            other => other,
        };
        let (int_part, frac_part) = match literal.split_once('.') {
            Some((i, f)) => (i, f),
            None => (literal, ""),
        };
        let bad = || Error::InvalidInput(format!("beta must be a decimal literal, got {s:?}"));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        let den = BigUint::from(10u32).pow(frac_part.len() as u32);
        let v = BetaValue { literal: literal.to_string(), num, den };
        if v.num <= v.den {
            return Err(Error::InvalidInput(format!("beta must exceed 1, got {s}")));
        }
        Ok(v)
    }

    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(&self.num, &self.den)
    }

    /// `ln β` computed from the exact literal.
    pub fn ln(&self) -> f64 {
        ln_big(&self.num) - ln_big(&self.den)
    }

    /// The integer `n` when `|β - n| < 1e-30`.
    pub fn as_integer(&self) -> Option<u64> {
        let (q, r) = self.num.div_rem(&self.den);
        let tol = BigUint::from(10u32).pow(SNAP_TOLERANCE_EXP10);
        if &r * &tol < self.den {
            return q.to_u64();
        }
        if (&self.den - &r) * &tol < self.den {
            return (q + 1u32).to_u64();
        }
        None
    }
}

fn ratio_f64(n: &BigUint, d: &BigUint) -> f64 {
    (ln_big(n) - ln_big(d)).exp()
}

/// How the greedy expansion of 1 ended within the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionKind {
    /// `a_1 .. a_len 0^∞`.
    Terminating { len: usize },
    /// `digits[..preperiod]` then `digits[preperiod..preperiod+period]` repeated.
    Periodic { preperiod: usize, period: usize },
    /// Neither detected; the digits are valid up to their length.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<Symbol>,
    pub kind: ExpansionKind,
}

/// Greedy digits of 1 in base β, up to `horizon` digits.
pub fn expand_one(beta: &BetaValue, horizon: usize) -> Result<Expansion> {
    if beta.as_integer().is_some() {
        return Err(Error::IntegerBeta);
    }
    let p = &beta.num;
    let q = &beta.den;
    let tol = BigUint::from(10u32).pow(SNAP_TOLERANCE_EXP10);
    let mut digits = Vec::new();
    // remainders r_m - a_m as exact fractions y / q^m, plus a float shadow
    let mut rems: Vec<(BigUint, f64)> = Vec::new();
    let mut x = p.clone();
    let mut qm = q.clone();
    for m in 1..=horizon {
        let (a, y) = x.div_rem(&qm);
        let a = a.to_usize().expect("digit fits in usize");
        // r_m within the tolerance of an integer ends the expansion
        if &y * &tol < qm {
            digits.push(a);
            return Ok(Expansion { digits, kind: ExpansionKind::Terminating { len: m } });
        }
        if (&qm - &y) * &tol < qm {
            digits.push(a + 1);
            return Ok(Expansion { digits, kind: ExpansionKind::Terminating { len: m } });
        }
        digits.push(a);
        let yf = ratio_f64(&y, &qm);
        // the next state is β·y/q^m; equal states give equal futures
        for (j, (yj, yjf)) in rems.iter().enumerate() {
            if (yf - yjf).abs() > 1e-12 {
                continue;
            }
            // |y/q^m - yj/q^(j+1)| < 1e-30
            let scaled = yj * q.pow((m - j - 1) as u32);
            let diff = if y > scaled { &y - &scaled } else { &scaled - &y };
            if diff * &tol < qm {
                return Ok(Expansion {
                    digits,
                    kind: ExpansionKind::Periodic { preperiod: j + 1, period: m - j - 1 },
                });
            }
        }
        x = p * &y;
        qm *= q;
        rems.push((y, yf));
    }
    Ok(Expansion { digits, kind: ExpansionKind::Truncated })
}

/// First `n` digits `a_1 .. a_n` of the greedy expansion of 1.
pub fn beta_expansion_of_one(beta: &BetaValue, n: usize) -> Result<Vec<Symbol>> {
    let e = expand_one(beta, n)?;
    let mut out = e.digits.clone();
    match e.kind {
        ExpansionKind::Terminating { .. } => out.resize(n, 0),
        ExpansionKind::Periodic { preperiod, period } => {
            while out.len() < n {
                let i = out.len();
                out.push(e.digits[preperiod + (i - preperiod) % period]);
            }
        }
        ExpansionKind::Truncated => {}
    }
    out.truncate(n);
    Ok(out)
}

/// A β-shift described by its (normalized) digit stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaShiftSpec {
    pub beta: String,
    pub is_integer: bool,
    /// Alphabet size: `⌊β⌋ + 1`, or `β` for integers.
    pub k: usize,
    pub preperiod: Vec<Symbol>,
    pub period: Vec<Symbol>,
    /// Number of trusted digits when no period was found; `None` when exact.
    pub validity: Option<usize>,
    /// True when a terminating expansion was kept literally (`0^∞` tail).
    pub raw: bool,
}

impl BetaShiftSpec {
    /// Builds the spec with the quasi-greedy correction, or with the literal
    /// greedy digits when `raw` is set.
    pub fn new(beta: &BetaValue, horizon: usize, raw: bool) -> Result<Self> {
        if let Some(n) = beta.as_integer() {
            return Ok(BetaShiftSpec {
                beta: beta.literal().to_string(),
                is_integer: true,
                k: n as usize,
                preperiod: Vec::new(),
                period: Vec::new(),
                validity: None,
                raw,
            });
        }
        let e = expand_one(beta, horizon)?;
        let mut spec = if raw { raw_digits(&e) } else { quasi_greedy_normalize(&e) };
        spec.beta = beta.literal().to_string();
        Ok(spec)
    }

    pub fn digit(&self, i: usize) -> Symbol {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Length up to which the stream is known.
    pub fn known_len(&self) -> usize {
        self.validity.unwrap_or(usize::MAX)
    }

    pub fn require_periodic(&self, horizon: usize) -> Result<()> {
        match self.validity {
            Some(_) => Err(Error::PeriodNotDetected { horizon }),
            None => Ok(()),
        }
    }

    /// Checks `σ^n(a) <= a` for every shift up to one full period.
    pub fn is_self_maximal(&self) -> bool {
        if self.is_integer {
            return true;
        }
        let (shifts, window) = match self.validity {
            Some(v) => (v, v),
            None => {
                let l = self.preperiod.len() + self.period.len();
                (l, 2 * l + self.period.len())
            }
        };
        for n in 1..shifts {
            let len = window.saturating_sub(n).min(window);
            for t in 0..len {
                let (x, y) = (self.digit(n + t), self.digit(t));
                if x != y {
                    if x > y {
                        return false;
                    }
                    break;
                }
            }
        }
        true
    }
}

/// Keeps a terminating expansion as `a_1 .. a_m 0^∞`.
pub fn raw_digits(e: &Expansion) -> BetaShiftSpec {
    let mut spec = quasi_greedy_normalize(e);
    if let ExpansionKind::Terminating { len } = e.kind {
        spec.preperiod = e.digits[..len].to_vec();
        spec.period = vec![0];
        spec.raw = true;
    }
    spec
}

/// Replaces a terminating expansion `a_1 .. a_m 0^∞` by the periodic stream
/// `(a_1 .. a_{m-1} (a_m - 1))^∞`; other streams are returned unchanged.
pub fn quasi_greedy_normalize(e: &Expansion) -> BetaShiftSpec {
    let k = e.digits[0] + 1;
    let base = BetaShiftSpec {
        beta: String::new(),
        is_integer: false,
        k,
        preperiod: Vec::new(),
        period: Vec::new(),
        validity: None,
        raw: false,
    };
    match e.kind {
        ExpansionKind::Terminating { len } => {
            let mut period = e.digits[..len].to_vec();
            period[len - 1] -= 1;
            BetaShiftSpec { period, ..base }
        }
        ExpansionKind::Periodic { preperiod, period } => BetaShiftSpec {
            preperiod: e.digits[..preperiod].to_vec(),
            period: e.digits[preperiod..preperiod + period].to_vec(),
            ..base
        },
        ExpansionKind::Truncated => BetaShiftSpec {
            preperiod: e.digits.clone(),
            validity: Some(e.digits.len()),
            ..base
        },
    }
}

/// True iff every suffix of `w` is lexicographically at most the digit
/// stream over the suffix's length.
pub fn beta_admissible(w: &[Symbol], spec: &BetaShiftSpec) -> Result<bool> {
    if let Some(&s) = w.iter().find(|&&s| s >= spec.k) {
        return Err(Error::SymbolOutOfRange { symbol: s, k: spec.k });
    }
    if spec.is_integer {
        return Ok(true);
    }
    if w.len() > spec.known_len() {
        return Err(Error::ValidityExceeded { n: w.len(), validity: spec.known_len() });
    }
    for i in 0..w.len() {
        for (t, &s) in w[i..].iter().enumerate() {
            let a = spec.digit(t);
            if s != a {
                if s > a {
                    return Ok(false);
                }
                break;
            }
        }
    }
    Ok(true)
}

/// Follower-set automaton. State `j` means the longest suffix read so far that
/// matches a prefix of the stream has length `j`; on symbol `s` the state goes
/// to 0 if `s < a_{j+1}`, to `j + 1` if equal, and the word is rejected if
/// greater. States past the preperiod wrap around the period.
#[derive(Clone, Debug)]
pub struct ParryAutomaton {
    /// `digits[j]` = `a_{j+1}` for each state.
    digits: Vec<Symbol>,
    /// Successor on a matching symbol.
    next: Vec<usize>,
}

impl ParryAutomaton {
    pub fn new(spec: &BetaShiftSpec, n: usize) -> Result<Self> {
        if spec.is_integer {
            return Err(Error::IntegerBeta);
        }
        match spec.validity {
            Some(v) => {
                if n > v {
                    return Err(Error::ValidityExceeded { n, validity: v });
                }
                let digits = spec.preperiod[..n.max(1).min(v)].to_vec();
                let len = digits.len();
                // the last state is never left by a match within n steps
                let next = (0..len).map(|j| (j + 1).min(len - 1)).collect();
                Ok(ParryAutomaton { digits, next })
            }
            None => {
                let pre = spec.preperiod.len();
                let len = pre + spec.period.len();
                let digits: Vec<Symbol> = (0..len).map(|j| spec.digit(j)).collect();
                let next = (0..len).map(|j| if j + 1 == len { pre } else { j + 1 }).collect();
                Ok(ParryAutomaton { digits, next })
            }
        }
    }

    pub fn states(&self) -> usize {
        self.digits.len()
    }

    /// Transition counts: `m[j][0]` gets the `a_{j+1}` smaller symbols and
    /// `m[j][next(j)]` the matching one.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.states();
        let mut m = vec![vec![0.0; n]; n];
        for j in 0..n {
            m[j][0] += self.digits[j] as f64;
            m[j][self.next[j]] += 1.0;
        }
        m
    }

    pub fn count_words(&self, n: usize) -> BigUint {
        let s = self.states();
        let mut v = vec![BigUint::zero(); s];
        v[0] = BigUint::one();
        for _ in 0..n {
            let mut w = vec![BigUint::zero(); s];
            for j in 0..s {
                if v[j].is_zero() {
                    continue;
                }
                let a = self.digits[j];
                if a > 0 {
                    w[0] += &v[j] * BigUint::from(a);
                }
                w[self.next[j]] += &v[j];
            }
            v = w;
        }
        v.into_iter().sum()
    }
}

/// Number of admissible words of length `n`.
pub fn beta_count_words(spec: &BetaShiftSpec, n: usize) -> Result<BigUint> {
    if spec.is_integer {
        return Ok(BigUint::from(spec.k).pow(n as u32));
    }
    Ok(ParryAutomaton::new(spec, n)?.count_words(n))
}

/// Exhaustive count by suffix comparison, for cross-checking the automaton.
pub fn beta_count_words_direct(spec: &BetaShiftSpec, n: usize) -> Result<BigUint> {
    if n > 16 {
        return Err(Error::BoundExceeded(format!("direct beta enumeration limited to n <= 16, got {n}")));
    }
    let k = spec.k;
    let mut count = BigUint::zero();
    let mut w = vec![0usize; n];
    loop {
        if beta_admissible(&w, spec)? {
            count += 1u32;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            w[i] += 1;
            if w[i] < k {
                break;
            }
            w[i] = 0;
        }
    }
}

/// `(1/n) ln #words(n)`.
pub fn beta_entropy_estimate(spec: &BetaShiftSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    Ok(ln_big(&beta_count_words(spec, n)?) / n as f64)
}

/// `ln` of the spectral radius of the automaton, for exactly periodic streams.
pub fn beta_entropy_spectral(spec: &BetaShiftSpec) -> Result<f64> {
    if spec.is_integer {
        return Ok((spec.k as f64).ln());
    }
    spec.require_periodic(spec.known_len())?;
    let m = ParryAutomaton::new(spec, 0)?.matrix();
    let n = m.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(|&j| m[i][j] > 0.0).map(|j| (i, j)).collect::<Vec<_>>())
        .collect();
    let rho = strongly_connected_components(n, &edges)
        .into_iter()
        .map(|c| {
            let sub: Vec<Vec<f64>> = c.iter().map(|&i| c.iter().map(|&j| m[i][j]).collect()).collect();
            linalg::perron(&sub, 1e-14).eigenvalue
        })
        .fold(0.0f64, f64::max);
    Ok(rho.ln())
}
