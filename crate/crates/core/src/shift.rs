//! One-sided subshifts of finite type given by a 0/1 transition matrix.
//!
//! Points are sequences `x_0 x_1 ...` with `A[x_i][x_{i+1}] = 1`. The metric is
//! `d(x, y) = 2^-min{n : x_n != y_n}`, so the ball of radius `2^-l` around `x`
//! is the cylinder of `x_0 .. x_l`. Logarithms are natural throughout.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::par::{self, Mode};

pub type Symbol = usize;

/// A finite sequence of alphabet indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Parses a string of decimal digits, e.g. `"0101"`.
    pub fn from_digits(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| Error::InvalidInput(format!("not a digit: {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl std::ops::Deref for Word {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// On-disk shift definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftDef {
    #[serde(default = "ShiftDef::schema_tag")]
    pub schema: String,
    pub k: usize,
    pub matrix: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ShiftDef {
    pub const SCHEMA: &'static str = "symdyn.shift/1";

    fn schema_tag() -> String {
        Self::SCHEMA.to_string()
    }
}

/// A trimmed subshift of finite type with its mixing data.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSpace {
    k: usize,
    matrix: Vec<Vec<u8>>,
    labels: Option<Vec<String>>,
    primitive_gap: Option<usize>,
}

impl ShiftSpace {
    /// Builds a shift from a square 0/1 matrix, removing symbols that cannot be
    /// extended forward or backward until none remain.
    pub fn from_matrix(k: usize, matrix: Vec<Vec<u8>>) -> Result<Self> {
        Self::with_labels(k, matrix, None)
    }

    pub fn with_labels(k: usize, matrix: Vec<Vec<u8>>, labels: Option<Vec<String>>) -> Result<Self> {
        if matrix.len() != k || matrix.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput(format!("matrix must be {k}x{k}")));
        }
        if matrix.iter().flatten().any(|&a| a > 1) {
            return Err(Error::InvalidInput("matrix entries must be 0 or 1".into()));
        }
        if let Some(l) = &labels {
            if l.len() != k {
                return Err(Error::InvalidInput(format!("expected {k} labels, got {}", l.len())));
            }
        }
        let mut alive: Vec<usize> = (0..k).collect();
        loop {
            let keep: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&i| {
                    alive.iter().any(|&j| matrix[i][j] == 1) && alive.iter().any(|&j| matrix[j][i] == 1)
                })
                .collect();
            if keep.len() == alive.len() {
                break;
            }
            alive = keep;
        }
        if alive.is_empty() {
            return Err(Error::EmptyShift);
        }
        let trimmed: Vec<Vec<u8>> = alive
            .iter()
            .map(|&i| alive.iter().map(|&j| matrix[i][j]).collect())
            .collect();
        let labels = labels.map(|l| alive.iter().map(|&i| l[i].clone()).collect());
        let n = alive.len();
        let primitive_gap = primitive_exponent(&trimmed);
        Ok(ShiftSpace { k: n, matrix: trimmed, labels, primitive_gap })
    }

    pub fn full(k: usize) -> Self {
        Self::from_matrix(k, vec![vec![1; k]; k]).expect("full shift is nonempty")
    }

    /// The shift on {0, 1} forbidding the word `11`.
    pub fn golden_mean() -> Self {
        Self::from_matrix(2, vec![vec![1, 1], vec![1, 0]]).expect("golden mean shift is nonempty")
    }

    pub fn from_def(def: &ShiftDef) -> Result<Self> {
        Self::with_labels(def.k, def.matrix.clone(), def.labels.clone())
    }

    pub fn to_def(&self) -> ShiftDef {
        ShiftDef {
            schema: ShiftDef::SCHEMA.to_string(),
            k: self.k,
            matrix: self.matrix.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn allowed(&self, i: Symbol, j: Symbol) -> bool {
        self.matrix[i][j] == 1
    }

    pub fn successors(&self, i: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.k).filter(move |&j| self.matrix[i][j] == 1)
    }

    pub fn edges(&self) -> Vec<(Symbol, Symbol)> {
        (0..self.k).flat_map(|i| self.successors(i).map(move |j| (i, j))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.matrix.iter().flatten().filter(|&&a| a == 1).count()
    }

    pub fn primitive_gap(&self) -> Option<usize> {
        self.primitive_gap
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_gap.is_some()
    }

    pub fn is_full_shift(&self) -> bool {
        self.matrix.iter().flatten().all(|&a| a == 1)
    }

    pub fn is_irreducible(&self) -> bool {
        strongly_connected_components(self.k, &self.edges()).len() == 1
    }

    pub fn check_symbols(&self, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|&&s| s >= self.k) {
            Some(&s) => Err(Error::SymbolOutOfRange { symbol: s, k: self.k }),
            None => Ok(()),
        }
    }

    /// Language membership; empty and one-symbol words are admissible.
    pub fn is_admissible(&self, w: &[Symbol]) -> Result<bool> {
        self.check_symbols(w)?;
        Ok(w.windows(2).all(|p| self.allowed(p[0], p[1])))
    }

    /// Admissibility of the periodic point `w w w ...`.
    pub fn is_cyclically_admissible(&self, w: &[Symbol]) -> Result<bool> {
        if w.is_empty() {
            return Ok(false);
        }
        Ok(self.is_admissible(w)? && self.allowed(w[w.len() - 1], w[0]))
    }

    /// Number of admissible words of length `n`: the entry sum of `A^(n-1)`.
    pub fn count_words(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        let mut v = vec![BigUint::one(); self.k];
        for _ in 1..n {
            v = (0..self.k)
                .map(|i| {
                    self.successors(i).fold(BigUint::zero(), |acc, j| acc + &v[j])
                })
                .collect();
        }
        v.into_iter().sum()
    }

    /// Number of points with `T^n x = x`: the trace of `A^n`.
    pub fn count_periodic(&self, n: usize) -> BigUint {
        let a: Vec<Vec<BigUint>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect();
        let p = big_matrix_power(&a, n);
        (0..self.k).map(|i| p[i][i].clone()).sum()
    }

    /// Natural log of the spectral radius of `A`; the maximum over strongly
    /// connected components when `A` is reducible.
    pub fn topological_entropy(&self) -> f64 {
        if self.is_full_shift() {
            return (self.k as f64).ln();
        }
        let edges = self.edges();
        strongly_connected_components(self.k, &edges)
            .into_iter()
            .map(|comp| spectral_radius_of(&self.matrix, &comp))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE)
            .ln()
            .max(0.0)
    }

    /// Lexicographically smallest admissible path `i -> ... -> j` with exactly
    /// `len` transitions, returned with both endpoints (`len + 1` symbols).
    pub fn bridge(&self, i: Symbol, j: Symbol, len: usize) -> Result<Word> {
        let m = self.primitive_gap.ok_or(Error::NotPrimitive)?;
        self.check_symbols(&[i, j])?;
        if len < m || len > 2 * m {
            return Err(Error::InvalidInput(format!("bridge length {len} outside [{m}, {}]", 2 * m)));
        }
        self.path_exact(i, j, len)
            .ok_or_else(|| Error::InvalidInput(format!("no path {i}->{j} of length {len}")))
    }

    /// Lexicographically smallest path with exactly `len` transitions, if any.
    pub fn path_exact(&self, i: Symbol, j: Symbol, len: usize) -> Option<Word> {
        // reach[t][v]: v reaches j in exactly t steps
        let mut reach = vec![vec![false; self.k]; len + 1];
        reach[0][j] = true;
        for t in 1..=len {
            for v in 0..self.k {
                reach[t][v] = self.successors(v).any(|w| reach[t - 1][w]);
            }
        }
        if !reach[len][i] {
            return None;
        }
        let mut path = Vec::with_capacity(len + 1);
        path.push(i);
        let mut cur = i;
        for step in 1..=len {
            cur = self.successors(cur).find(|&w| reach[len - step][w])?;
            path.push(cur);
        }
        Some(Word(path))
    }

    /// Every bridge for every ordered pair and every length in `[M, 2M]`.
    pub fn bridge_table(&self) -> Result<BTreeMap<(Symbol, Symbol, usize), Word>> {
        let m = self.primitive_gap.ok_or(Error::NotPrimitive)?;
        let mut table = BTreeMap::new();
        for i in 0..self.k {
            for j in 0..self.k {
                for len in m..=2 * m {
                    table.insert((i, j, len), self.bridge(i, j, len)?);
                }
            }
        }
        Ok(table)
    }

    /// All admissible words of length `n` in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            out.push(Word::default());
            return out;
        }
        let mut stack: Vec<Symbol> = Vec::with_capacity(n);
        fn rec(s: &ShiftSpace, n: usize, stack: &mut Vec<Symbol>, out: &mut Vec<Word>) {
            if stack.len() == n {
                out.push(Word(stack.clone()));
                return;
            }
            let cands: Vec<Symbol> = match stack.last() {
                None => (0..s.k).collect(),
                Some(&last) => s.successors(last).collect(),
            };
            for c in cands {
                stack.push(c);
                rec(s, n, stack, out);
                stack.pop();
            }
        }
        rec(self, n, &mut stack, &mut out);
        out
    }

    /// Primitive periodic orbits of period at most `max_period`, each given by
    /// its lexicographically smallest rotation, ordered by period then word.
    pub fn primitive_cycles(&self, max_period: usize) -> Vec<Word> {
        self.primitive_cycles_with(max_period, Mode::Sequential)
    }

    /// `primitive_cycles` with each (period, first symbol) branch searched as
    /// an independent task.
    pub fn primitive_cycles_with(&self, max_period: usize, mode: Mode) -> Vec<Word> {
        let tasks: Vec<(usize, Symbol)> = (1..=max_period).flat_map(|p| (0..self.k).map(move |s| (p, s))).collect();
        par::map(mode, &tasks, |&(p, start)| {
            let mut out = Vec::new();
            self.cycle_rec(p, &mut vec![start], &mut out);
            out
        })
        .into_iter()
        .flatten()
        .collect()
    }

    fn cycle_rec(&self, p: usize, stack: &mut Vec<Symbol>, out: &mut Vec<Word>) {
        if stack.len() == p {
            if self.allowed(stack[p - 1], stack[0]) && is_canonical_primitive(stack) {
                out.push(Word(stack.clone()));
            }
            return;
        }
        let last = *stack.last().unwrap();
        for c in self.successors(last).collect::<Vec<_>>() {
            // a canonical rotation never has a symbol smaller than its first
            if c < stack[0] {
                continue;
            }
            stack.push(c);
            self.cycle_rec(p, stack, out);
            stack.pop();
        }
    }

    /// The `b`-block presentation: symbols are the admissible `b`-words.
    pub fn higher_block(&self, b: usize) -> BlockPresentation {
        BlockPresentation::new(self, b)
    }
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Canonical rotation of a cyclic word together with its primitive root.
pub fn canonical_cycle(w: &[Symbol]) -> Vec<Symbol> {
    let n = w.len();
    let mut root = n;
    for p in 1..=n {
        if n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[i % p]) {
            root = p;
            break;
        }
    }
    let base = &w[..root];
    (0..root)
        .map(|r| base[r..].iter().chain(base[..r].iter()).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn is_canonical_primitive(w: &[Symbol]) -> bool {
    let n = w.len();
    for r in 1..n {
        // compare rotation r with w: must be strictly greater
        let mut ord = std::cmp::Ordering::Equal;
        for i in 0..n {
            let a = w[(i + r) % n];
            if a != w[i] {
                ord = a.cmp(&w[i]);
                break;
            }
        }
        if ord != std::cmp::Ordering::Greater {
            return false;
        }
    }
    true
}

/// Smallest `M <= k^2` with `A^M` entrywise positive.
fn primitive_exponent(a: &[Vec<u8>]) -> Option<usize> {
    let k = a.len();
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| a[i][j] == 1).map(move |j| (i, j)))
        .collect();
    if strongly_connected_components(k, &edges).len() != 1 {
        return None;
    }
    let base: Vec<Vec<bool>> = a.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect();
    let mut power = base.clone();
    for m in 1..=k * k {
        if power.iter().flatten().all(|&x| x) {
            return Some(m);
        }
        power = (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|l| power[i][l] && base[l][j])).collect())
            .collect();
    }
    None
}

/// Nontrivial strongly connected components (those containing a cycle).
pub fn strongly_connected_components(k: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(k, edges.len());
    let nodes: Vec<_> = (0..k).map(|_| g.add_node(())).collect();
    for &(i, j) in edges {
        g.add_edge(nodes[i], nodes[j], ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || edges.contains(&(c[0], c[0])))
        .collect();
    comps.sort();
    comps
}

fn spectral_radius_of(matrix: &[Vec<u8>], comp: &[usize]) -> f64 {
    let sub: Vec<Vec<f64>> = comp
        .iter()
        .map(|&i| comp.iter().map(|&j| matrix[i][j] as f64).collect())
        .collect();
    linalg::perron(&sub, 1e-13).eigenvalue
}

fn big_matrix_power(a: &[Vec<BigUint>], n: usize) -> Vec<Vec<BigUint>> {
    let k = a.len();
    let mul = |x: &[Vec<BigUint>], y: &[Vec<BigUint>]| -> Vec<Vec<BigUint>> {
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        (0..k).fold(BigUint::zero(), |acc, l| {
                            if x[i][l].is_zero() || y[l][j].is_zero() {
                                acc
                            } else {
                                acc + &x[i][l] * &y[l][j]
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let mut result: Vec<Vec<BigUint>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
        .collect();
    let mut base = a.to_vec();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

/// Higher-block recoding of a shift: symbol `u` stands for the admissible
/// `b`-word `nodes[u]`, and `u -> v` is allowed when the two words overlap in
/// `b - 1` symbols and their union is admissible.
#[derive(Clone, Debug)]
pub struct BlockPresentation {
    block_len: usize,
    nodes: Vec<Word>,
    index: HashMap<Vec<Symbol>, usize>,
    shift: ShiftSpace,
}

impl BlockPresentation {
    fn new(ambient: &ShiftSpace, b: usize) -> Self {
        assert!(b >= 1, "block length must be positive");
        let nodes = ambient.words(b);
        let index: HashMap<Vec<Symbol>, usize> =
            nodes.iter().enumerate().map(|(i, w)| (w.0.clone(), i)).collect();
        let n = nodes.len();
        let mut matrix = vec![vec![0u8; n]; n];
        for (u, w) in nodes.iter().enumerate() {
            let last = w[b - 1];
            for s in ambient.successors(last) {
                let mut next = w[1..].to_vec();
                next.push(s);
                matrix[u][index[&next]] = 1;
            }
        }
        let shift = ShiftSpace::from_matrix(n, matrix).expect("block presentation of a trimmed shift");
        debug_assert_eq!(shift.k(), n);
        BlockPresentation { block_len: b, nodes, index, shift }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn shift(&self) -> &ShiftSpace {
        &self.shift
    }

    pub fn nodes(&self) -> &[Word] {
        &self.nodes
    }

    pub fn node(&self, w: &[Symbol]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Sliding `b`-windows of an ambient word.
    pub fn encode(&self, w: &[Symbol]) -> Option<Vec<Symbol>> {
        if w.len() < self.block_len {
            return Some(Vec::new());
        }
        w.windows(self.block_len).map(|win| self.node(win)).collect()
    }

    /// Inverse of `encode` for nonempty paths.
    pub fn decode(&self, path: &[Symbol]) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(path.len() + self.block_len);
        if let Some(&first) = path.first() {
            out.extend_from_slice(&self.nodes[first]);
            for &u in &path[1..] {
                out.push(self.nodes[u][self.block_len - 1]);
            }
        }
        out
    }

    /// Presentation cycle of an ambient periodic orbit.
    pub fn encode_cycle(&self, cycle: &[Symbol]) -> Option<Vec<Symbol>> {
        let p = cycle.len();
        (0..p)
            .map(|i| {
                let win: Vec<Symbol> = (0..self.block_len).map(|t| cycle[(i + t) % p]).collect();
                self.node(&win)
            })
            .collect()
    }

    /// Ambient periodic orbit of a presentation cycle.
    pub fn decode_cycle(&self, cycle: &[Symbol]) -> Vec<Symbol> {
        cycle.iter().map(|&u| self.nodes[u][0]).collect()
    }
}
