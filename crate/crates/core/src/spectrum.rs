//! Birkhoff spectrum of a locally constant potential.
//!
//! The pressure `P(q) = ln ρ(B(q))` with `B(q)_ij = A_ij exp(q w_ij)` on the
//! edge-weighted recoding is convex, and the entropy of the level set
//! `{∫φ dρ = a}` is its conjugate `Ψ(a) = inf_q P(q) - q a`. The range of
//! integrals is spanned by the minimum and maximum mean cycles.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::parry_measure;
use crate::par::{self, Mode};
use crate::potential::{EdgeGraph, Potential};
use crate::shift::{canonical_cycle, strongly_connected_components, ShiftSpace, Symbol, Word};

/// Largest `|q|` the Legendre bracket may reach.
pub const Q_CAP: f64 = 500.0;
/// Pressure is refused beyond this `|q|`.
pub const Q_LIMIT: f64 = 1e6;
const DIFF_STEP: f64 = 1e-5;
const SECTION_WIDTH: f64 = 1e-10;

/// Extremal cycle means of an edge-weighted graph and their witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LphiInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_cycle: Word,
    pub hi_cycle: Word,
}

impl LphiInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_interior(&self, a: f64) -> bool {
        self.lo < a && a < self.hi
    }
}

/// Karp's maximum mean cycle value of a strongly connected weighted graph.
fn karp_max_mean(n: usize, w: &[Vec<Option<f64>>]) -> f64 {
    let neg = f64::NEG_INFINITY;
    let mut d = vec![vec![neg; n]; n + 1];
    d[0] = vec![0.0; n];
    for k in 1..=n {
        for i in 0..n {
            if d[k - 1][i] == neg {
                continue;
            }
            for j in 0..n {
                if let Some(x) = w[i][j] {
                    let v = d[k - 1][i] + x;
                    if v > d[k][j] {
                        d[k][j] = v;
                    }
                }
            }
        }
    }
    let mut best = neg;
    for v in 0..n {
        if d[n][v] == neg {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            if d[k][v] == neg {
                continue;
            }
            worst = worst.min((d[n][v] - d[k][v]) / (n - k) as f64);
        }
        best = best.max(worst);
    }
    best
}

/// An optimal cycle for the maximum mean: build longest-path potentials for
/// `w - λ`, keep the tight edges, and walk greedily (smallest successor) from
/// the smallest vertex lying on a tight cycle until a vertex repeats.
fn max_mean_witness(n: usize, w: &[Vec<Option<f64>>], lambda: f64) -> Vec<Symbol> {
    let scale = w.iter().flatten().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let eps = 1e-9 * scale;
    let mut h = vec![0.0f64; n];
    for _ in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let Some(x) = w[i][j] {
                    let v = h[i] + x - lambda;
                    if v > h[j] {
                        h[j] = v;
                    }
                }
            }
        }
    }
    let tight: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| w[i][j].is_some_and(|x| (h[i] + x - lambda - h[j]).abs() <= eps))
        .collect();
    let comps = strongly_connected_components(n, &tight);
    let comp = comps.iter().min_by_key(|c| c[0]).expect("an optimal cycle exists");
    let in_comp = |v: usize| comp.binary_search(&v).is_ok();
    let mut path = vec![comp[0]];
    loop {
        let cur = *path.last().unwrap();
        let next = (0..n)
            .find(|&j| in_comp(j) && tight.contains(&(cur, j)))
            .expect("tight component is strongly connected");
        if let Some(pos) = path.iter().position(|&v| v == next) {
            return path[pos..].to_vec();
        }
        path.push(next);
    }
}

fn negate(w: &[Vec<Option<f64>>]) -> Vec<Vec<Option<f64>>> {
    w.iter().map(|r| r.iter().map(|x| x.map(|v| -v)).collect()).collect()
}

fn extreme_cycles(eg: &EdgeGraph, phi: &Potential) -> Result<LphiInterval> {
    let g = &eg.graph;
    if !g.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.k();
    let hi_val = karp_max_mean(n, &eg.weights);
    let hi_c = canonical_cycle(&eg.ambient_cycle(&max_mean_witness(n, &eg.weights, hi_val)));
    let nw = negate(&eg.weights);
    let lo_val = -karp_max_mean(n, &nw);
    let lo_c = canonical_cycle(&eg.ambient_cycle(&max_mean_witness(n, &nw, -lo_val)));
    let (lo, hi) = (phi.cycle_average(&lo_c), phi.cycle_average(&hi_c));
    // witnesses define the endpoints; a constant potential gives lo == hi
    let (lo, hi) = if lo > hi { (hi, hi) } else { (lo, hi) };
    Ok(LphiInterval { lo, hi, lo_cycle: Word(lo_c), hi_cycle: Word(hi_c) })
}

/// `[inf ∫φ dμ, sup ∫φ dμ]` over invariant measures with extremal cycles.
pub fn lphi_interval(shift: &ShiftSpace, phi: &Potential) -> Result<LphiInterval> {
    if !shift.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    extreme_cycles(&phi.edge_graph(shift), phi)
}

/// Whether some point has divergent Birkhoff averages.
pub fn has_irregular(shift: &ShiftSpace, phi: &Potential) -> Result<bool> {
    Ok(lphi_interval(shift, phi)?.width() > 1e-12)
}

/// Cached pressure function of a potential on a primitive shift.
#[derive(Debug)]
pub struct PressureFunction {
    edges: EdgeGraph,
    interval: LphiInterval,
    h_top: f64,
    cache: Mutex<BTreeMap<u64, f64>>,
}

impl PressureFunction {
    pub fn new(shift: &ShiftSpace, phi: &Potential) -> Result<Self> {
        if !shift.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let edges = phi.edge_graph(shift);
        let interval = extreme_cycles(&edges, phi)?;
        Ok(PressureFunction { edges, interval, h_top: shift.topological_entropy(), cache: Mutex::new(BTreeMap::new()) })
    }

    pub fn interval(&self) -> &LphiInterval {
        &self.interval
    }

    pub fn h_top(&self) -> f64 {
        self.h_top
    }

    /// `P(q)`, evaluated as `m + ln ρ(exp(q w - m))` with `m = q` times the
    /// extremal cycle mean, so every cycle product is at most one and the
    /// spectral radius lies in `[1, k]`.
    pub fn eval(&self, q: f64) -> Result<f64> {
        if !q.is_finite() || q.abs() > Q_LIMIT {
            return Err(Error::Overflow(q));
        }
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&q.to_bits()) {
            return Ok(v);
        }
        let shift_by = if q >= 0.0 { q * self.interval.hi } else { q * self.interval.lo };
        let b: Vec<Vec<f64>> = self
            .edges
            .weights
            .iter()
            .map(|r| r.iter().map(|x| x.map_or(0.0, |w| (q * w - shift_by).exp())).collect())
            .collect();
        let rho = linalg::perron(&b, 1e-14).eigenvalue;
        let v = shift_by + rho.ln();
        self.cache.lock().expect("cache lock").insert(q.to_bits(), v);
        Ok(v)
    }

    /// Central-difference derivative.
    pub fn derivative(&self, q: f64) -> Result<f64> {
        Ok((self.eval(q + DIFF_STEP)? - self.eval(q - DIFF_STEP)?) / (2.0 * DIFF_STEP))
    }

    /// Midpoint convexity over every cached triple `q1 < q2 < q3`.
    pub fn cached_is_convex(&self) -> bool {
        let pts: Vec<(f64, f64)> =
            self.cache.lock().expect("cache lock").iter().map(|(&k, &v)| (f64::from_bits(k), v)).collect();
        let mut pts = pts;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.windows(3).all(|t| {
            let (q1, p1) = t[0];
            let (q2, p2) = t[1];
            let (q3, p3) = t[2];
            let lin = p1 + (p3 - p1) * (q2 - q1) / (q3 - q1);
            p2 <= lin + 1e-9
        })
    }

    /// `Ψ(a) = inf_q P(q) - q a` for `a` strictly inside the interval.
    pub fn conjugate(&self, a: f64) -> Result<SpectrumPoint> {
        let (lo, hi) = (self.interval.lo, self.interval.hi);
        if !(lo < a && a < hi) {
            return Err(Error::OutsideInterior { a, lo, hi });
        }
        let slope = |q: f64| -> Result<f64> { Ok(self.derivative(q)? - a) };
        let (mut ql, mut qh) = (-1.0f64, 1.0f64);
        while slope(ql)? >= 0.0 {
            ql *= 2.0;
            if ql < -Q_CAP {
                return Err(Error::EndpointSaturation { a, cap: Q_CAP });
            }
        }
        while slope(qh)? <= 0.0 {
            qh *= 2.0;
            if qh > Q_CAP {
                return Err(Error::EndpointSaturation { a, cap: Q_CAP });
            }
        }
        let f = |q: f64| -> Result<f64> { Ok(self.eval(q)? - q * a) };
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (qh - r * (qh - ql), ql + r * (qh - ql));
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        while qh - ql > SECTION_WIDTH {
            if f1 <= f2 {
                qh = x2;
                x2 = x1;
                f2 = f1;
                x1 = qh - r * (qh - ql);
                f1 = f(x1)?;
            } else {
                ql = x1;
                x1 = x2;
                f1 = f2;
                x2 = ql + r * (qh - ql);
                f2 = f(x2)?;
            }
        }
        let q_star = 0.5 * (ql + qh);
        let psi = f(q_star)?;
        Ok(SpectrumPoint { a, psi, q_star })
    }
}

/// `P(q)` for a single `q`.
pub fn pressure(shift: &ShiftSpace, phi: &Potential, q: f64) -> Result<f64> {
    PressureFunction::new(shift, phi)?.eval(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub a: f64,
    pub psi: f64,
    pub q_star: f64,
}

/// `Ψ(a)` and its minimizing `q`.
pub fn spectrum_point(shift: &ShiftSpace, phi: &Potential, a: f64) -> Result<SpectrumPoint> {
    PressureFunction::new(shift, phi)?.conjugate(a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub points: Vec<SpectrumPoint>,
    pub interval: LphiInterval,
    pub h_top: f64,
    /// Integral of the potential against the measure of maximal entropy.
    pub parry_integral: f64,
}

/// `npoints` equally spaced interior levels plus the Parry level.
pub fn spectrum_curve(shift: &ShiftSpace, phi: &Potential, npoints: usize, mode: Mode) -> Result<SpectrumCurve> {
    if npoints < 3 {
        return Err(Error::InvalidInput("spectrum needs at least 3 points".into()));
    }
    let pf = PressureFunction::new(shift, phi)?;
    let iv = pf.interval().clone();
    if iv.width() <= 1e-12 {
        return Err(Error::DegenerateInterval);
    }
    let parry_integral = parry_measure(shift)?.integrate(phi)?;
    let mut levels: Vec<f64> =
        (1..=npoints).map(|i| iv.lo + iv.width() * i as f64 / (npoints + 1) as f64).collect();
    if iv.contains_interior(parry_integral) && !levels.contains(&parry_integral) {
        levels.push(parry_integral);
        levels.sort_by(f64::total_cmp);
    }
    let points = par::map(mode, &levels, |&a| pf.conjugate(a)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve { points, interval: iv, h_top: pf.h_top(), parry_integral })
}

/// Every consecutive triple lies on or above its chord, up to `-1e-9`.
pub fn check_concavity(curve: &SpectrumCurve) -> bool {
    curve.points.windows(3).all(|t| {
        let (a1, a2, a3) = (t[0].a, t[1].a, t[2].a);
        let lin = t[0].psi + (t[2].psi - t[0].psi) * (a2 - a1) / (a3 - a1);
        t[1].psi - lin >= -1e-9
    })
}

/// The maximum over the grid reaches `h_top` within `1e-4`, provided the
/// grid has a level within `1e-3` of the Parry integral.
pub fn sup_equals_htop(curve: &SpectrumCurve) -> bool {
    let near = curve.points.iter().any(|p| (p.a - curve.parry_integral).abs() <= 1e-3);
    let max = curve.points.iter().map(|p| p.psi).fold(f64::NEG_INFINITY, f64::max);
    near && max >= curve.h_top - 1e-4
}

/// CSV with header `a,psi,q_star` and 12 significant digits.
pub fn curve_csv(curve: &SpectrumCurve) -> String {
    let mut s = String::from("a,psi,q_star\n");
    for p in &curve.points {
        s.push_str(&format!("{:.11e},{:.11e},{:.11e}\n", p.a, p.psi, p.q_star));
    }
    s
}
