//! Brute-force references on tiny instances. Nothing here shares code with the
//! transfer-matrix, spectral or estimator kernels it is used to check.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::shift::{ShiftSpace, Symbol};

pub const MAX_WORD_LEN: usize = 24;
pub const MAX_CYCLE_LEN: usize = 16;
pub const MAX_GRID_STEPS: usize = 40;
pub const MAX_FREE_PARAMS: usize = 4;
pub const MAX_DENSITY_HORIZON: usize = 1 << 22;

/// A value together with the number of candidates examined.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T> {
    pub value: T,
    pub enumerated: u64,
}

fn dfs_words(s: &ShiftSpace, n: usize, visit: &mut dyn FnMut(&[Symbol])) -> u64 {
    let mut stack: Vec<Symbol> = Vec::with_capacity(n);
    let mut examined = 0u64;
    fn rec(s: &ShiftSpace, n: usize, stack: &mut Vec<Symbol>, visit: &mut dyn FnMut(&[Symbol]), examined: &mut u64) {
        if stack.len() == n {
            visit(stack);
            return;
        }
        for c in 0..s.k() {
            *examined += 1;
            if let Some(&last) = stack.last() {
                if s.matrix()[last][c] != 1 {
                    continue;
                }
            }
            stack.push(c);
            rec(s, n, stack, visit, examined);
            stack.pop();
        }
    }
    rec(s, n, &mut stack, visit, &mut examined);
    examined
}

/// Admissible words of length `n <= 24`, by depth-first enumeration.
pub fn brute_count_words(s: &ShiftSpace, n: usize) -> Result<OracleResult<BigUint>> {
    if n > MAX_WORD_LEN {
        return Err(Error::BoundExceeded(format!("word length {n} > {MAX_WORD_LEN}")));
    }
    let mut count = 0u64;
    let enumerated = dfs_words(s, n, &mut |_| count += 1);
    Ok(OracleResult { value: BigUint::from(count), enumerated })
}

/// Points of period dividing `n <= 16`: admissible words whose wrap-around
/// transition is allowed.
pub fn brute_count_cycles(s: &ShiftSpace, n: usize) -> Result<OracleResult<BigUint>> {
    if n > MAX_CYCLE_LEN || n == 0 {
        return Err(Error::BoundExceeded(format!("cycle length {n} outside 1..={MAX_CYCLE_LEN}")));
    }
    let mut count = 0u64;
    let enumerated = dfs_words(s, n, &mut |w| {
        if s.matrix()[w[n - 1]][w[0]] == 1 {
            count += 1;
        }
    });
    Ok(OracleResult { value: BigUint::from(count), enumerated })
}

/// Minimum and maximum of the cycle averages of `φ` over every periodic point
/// of period at most `max_period` (at most 16).
pub fn brute_cycle_mean_range(s: &ShiftSpace, phi: &Potential, max_period: usize) -> Result<(f64, f64)> {
    if max_period > MAX_CYCLE_LEN || max_period == 0 {
        return Err(Error::BoundExceeded(format!("period {max_period} outside 1..={MAX_CYCLE_LEN}")));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let r = phi.range();
    for p in 1..=max_period {
        dfs_words(s, p, &mut |w| {
            if s.matrix()[w[p - 1]][w[0]] != 1 {
                return;
            }
            let mut sum = 0.0;
            for i in 0..p {
                let block: Vec<Symbol> = (0..r).map(|t| w[(i + t) % p]).collect();
                sum += phi.table()[&block];
            }
            let avg = sum / p as f64;
            lo = lo.min(avg);
            hi = hi.max(avg);
        });
    }
    Ok((lo, hi))
}

/// Solves `x P = x`, `Σx = 1` by Gaussian elimination with partial pivoting.
fn stationary_by_elimination(p: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = p.len();
    // rows: (P^T - I) x = 0 with the last equation replaced by Σx = 1
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        m[n - 1][j] = 1.0;
    }
    m[n - 1][n] = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

struct ChainSpace<'a> {
    shift: &'a ShiftSpace,
    phi: &'a Potential,
    succ: Vec<Vec<Symbol>>,
    /// Number of free stick-breaking parameters.
    params: usize,
}

impl ChainSpace<'_> {
    /// Stick-breaking: row `i` with successors `s_1..s_d` gets
    /// `t_1, (1-t_1) t_2, ..., rest`.
    fn matrix(&self, t: &[f64]) -> Vec<Vec<f64>> {
        let k = self.shift.k();
        let mut p = vec![vec![0.0; k]; k];
        let mut idx = 0;
        for i in 0..k {
            let mut rest = 1.0;
            let d = self.succ[i].len();
            for (pos, &j) in self.succ[i].iter().enumerate() {
                if pos + 1 == d {
                    p[i][j] = rest;
                } else {
                    let x = rest * t[idx];
                    idx += 1;
                    p[i][j] = x;
                    rest -= x;
                }
            }
        }
        p
    }

    /// (entropy, integral) of the chain, if its stationary law is unique.
    fn evaluate(&self, t: &[f64]) -> Option<(f64, f64)> {
        let p = self.matrix(t);
        let pi = stationary_by_elimination(&p)?;
        if pi.iter().any(|&x| x < -1e-12) {
            return None;
        }
        let k = p.len();
        let mut h = 0.0;
        let mut integral = 0.0;
        for i in 0..k {
            for j in 0..k {
                let q = p[i][j];
                if q > 0.0 {
                    h -= pi[i] * q * q.ln();
                    let v = if self.phi.range() == 1 { self.phi.value(&[i]) } else { self.phi.value(&[i, j]) };
                    integral += pi[i] * q * v;
                }
            }
        }
        Some((h, integral))
    }

    /// Best entropy over exact solutions of the constraint in the last
    /// parameter, with the other parameters fixed.
    fn best_on_line(&self, prefix: &[f64], a: f64, steps: usize, lo: f64, hi: f64) -> Option<(f64, Vec<f64>)> {
        let mut t = prefix.to_vec();
        t.push(0.0);
        let last = t.len() - 1;
        let mut gap = |x: f64| -> Option<f64> {
            t[last] = x;
            self.evaluate(&t).map(|(_, i)| i - a)
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let scan = steps * 4;
        let xs: Vec<f64> = (0..=scan).map(|i| lo + (hi - lo) * i as f64 / scan as f64).collect();
        let gs: Vec<Option<f64>> = xs.iter().map(|&x| gap(x)).collect();
        for i in 0..scan {
            let (Some(g0), Some(g1)) = (gs[i], gs[i + 1]) else { continue };
            if g0 == 0.0 || g0.signum() != g1.signum() {
                let (mut l, mut h) = (xs[i], xs[i + 1]);
                let mut gl = g0;
                for _ in 0..200 {
                    let m = 0.5 * (l + h);
                    let Some(gm) = gap(m) else { break };
                    if gm == 0.0 || (h - l) < 1e-16 {
                        l = m;
                        h = m;
                        break;
                    }
                    if gm.signum() == gl.signum() {
                        l = m;
                        gl = gm;
                    } else {
                        h = m;
                    }
                }
                let mut sol = prefix.to_vec();
                sol.push(0.5 * (l + h));
                if let Some((ent, integral)) = self.evaluate(&sol) {
                    if (integral - a).abs() <= 1e-9 && best.as_ref().is_none_or(|b| ent > b.0) {
                        best = Some((ent, sol));
                    }
                }
            }
        }
        best
    }
}

/// Largest entropy of a memory-1 Markov measure with `∫φ = a`, searched on a
/// grid of stochastic matrices compatible with the shift.
///
/// Every free parameter but the last runs over a `grid_steps` grid; the last
/// one is solved for the constraint by scanning and bisection. One refinement
/// pass repeats the search in a cell around the best point.
pub fn brute_constrained_entropy(s: &ShiftSpace, phi: &Potential, a: f64, grid_steps: usize) -> Result<f64> {
    if phi.range() > 2 {
        return Err(Error::BoundExceeded(format!("potential range {} > 2", phi.range())));
    }
    if grid_steps == 0 || grid_steps > MAX_GRID_STEPS {
        return Err(Error::BoundExceeded(format!("grid_steps {grid_steps} outside 1..={MAX_GRID_STEPS}")));
    }
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let succ: Vec<Vec<Symbol>> =
        (0..s.k()).map(|i| (0..s.k()).filter(|&j| s.matrix()[i][j] == 1).collect()).collect();
    let params: usize = succ.iter().map(|r| r.len() - 1).sum();
    if params > MAX_FREE_PARAMS {
        return Err(Error::BoundExceeded(format!("{params} free parameters > {MAX_FREE_PARAMS}")));
    }
    let space = ChainSpace { shift: s, phi, succ, params };
    if space.params == 0 {
        // a single stochastic matrix: the shift is one periodic orbit
        let (h, i) = space.evaluate(&[]).ok_or(Error::Infeasible)?;
        return if (i - a).abs() <= 1e-9 { Ok(h) } else { Err(Error::Infeasible) };
    }
    let eps = 1e-9;
    let search = |centre: Option<&[f64]>, half: f64| -> Option<(f64, Vec<f64>)> {
        let free = space.params - 1;
        let axis = |c: f64| -> (f64, f64) {
            match centre {
                Some(_) => ((c - half).max(eps), (c + half).min(1.0 - eps)),
                None => (eps, 1.0 - eps),
            }
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let total = grid_steps.pow(free as u32);
        for cell in 0..total {
            let mut prefix = Vec::with_capacity(free);
            let mut rem = cell;
            for d in 0..free {
                let idx = rem % grid_steps;
                rem /= grid_steps;
                let (lo, hi) = axis(centre.map_or(0.5, |c| c[d]));
                prefix.push(lo + (hi - lo) * (idx as f64 + 0.5) / grid_steps as f64);
            }
            let (lo, hi) = axis(centre.map_or(0.5, |c| c[free]));
            if let Some(found) = space.best_on_line(&prefix, a, grid_steps, lo, hi) {
                if best.as_ref().is_none_or(|b| found.0 > b.0) {
                    best = Some(found);
                }
            }
        }
        best
    };
    let coarse = search(None, 0.0).ok_or(Error::Infeasible)?;
    let refined = search(Some(&coarse.1), 1.0 / grid_steps as f64);
    Ok(match refined {
        Some(r) if r.0 > coarse.0 => r.0,
        _ => coarse.0,
    })
}

/// Exact `(min, max)` of `#(S ∩ [0, n)) / n` over every `n` in `[N/2, N]`.
pub fn brute_density(member: impl Fn(usize) -> bool, horizon: usize) -> Result<(f64, f64)> {
    if horizon > MAX_DENSITY_HORIZON || horizon == 0 {
        return Err(Error::BoundExceeded(format!("horizon {horizon} outside 1..={MAX_DENSITY_HORIZON}")));
    }
    let start = (horizon / 2).max(1);
    let mut count = 0usize;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=horizon {
        if member(n - 1) {
            count += 1;
        }
        if n >= start {
            let r = count as f64 / n as f64;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}
