//! Locally constant observables `φ(x) = table[x_0 .. x_{r-1}]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::{BlockPresentation, ShiftSpace, Symbol, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    range: usize,
    table: BTreeMap<Vec<Symbol>, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialEntry {
    pub word: Word,
    pub value: f64,
}

/// On-disk potential definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialDef {
    #[serde(default = "PotentialDef::schema_tag")]
    pub schema: String,
    pub range: usize,
    pub values: Vec<PotentialEntry>,
}

impl PotentialDef {
    pub const SCHEMA: &'static str = "symdyn.potential/1";

    fn schema_tag() -> String {
        Self::SCHEMA.to_string()
    }
}

impl Potential {
    /// Builds a potential whose table must cover exactly the admissible
    /// `range`-words of `shift`.
    pub fn new(shift: &ShiftSpace, range: usize, table: BTreeMap<Vec<Symbol>, f64>) -> Result<Self> {
        if range == 0 {
            return Err(Error::InvalidInput("potential range must be at least 1".into()));
        }
        for (w, v) in &table {
            if w.len() != range {
                return Err(Error::RangeMismatch(format!("word {w:?} has length {} not {range}", w.len())));
            }
            if !shift.is_admissible(w)? {
                return Err(Error::NotAdmissible(w.clone()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite value for {w:?}")));
            }
        }
        for w in shift.words(range) {
            if !table.contains_key(&w.0) {
                return Err(Error::RangeMismatch(format!("missing value for word {w}")));
            }
        }
        Ok(Potential { range, table })
    }

    pub fn from_fn(shift: &ShiftSpace, range: usize, f: impl Fn(&[Symbol]) -> f64) -> Result<Self> {
        let table = shift.words(range).into_iter().map(|w| {
            let v = f(&w);
            (w.0, v)
        });
        Self::new(shift, range, table.collect())
    }

    pub fn constant(shift: &ShiftSpace, c: f64) -> Self {
        Self::from_fn(shift, 1, |_| c).expect("constant potential")
    }

    /// `1_[s]`: one on the cylinder of symbol `s`, zero elsewhere.
    pub fn indicator(shift: &ShiftSpace, s: Symbol) -> Self {
        Self::from_fn(shift, 1, |w| if w[0] == s { 1.0 } else { 0.0 }).expect("indicator potential")
    }

    pub fn from_def(shift: &ShiftSpace, def: &PotentialDef) -> Result<Self> {
        let mut table = BTreeMap::new();
        for e in &def.values {
            if table.insert(e.word.0.clone(), e.value).is_some() {
                return Err(Error::InvalidInput(format!("duplicate potential word {}", e.word)));
            }
        }
        Self::new(shift, def.range, table)
    }

    pub fn to_def(&self) -> PotentialDef {
        PotentialDef {
            schema: PotentialDef::SCHEMA.to_string(),
            range: self.range,
            values: self
                .table
                .iter()
                .map(|(w, &value)| PotentialEntry { word: Word(w.clone()), value })
                .collect(),
        }
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn table(&self) -> &BTreeMap<Vec<Symbol>, f64> {
        &self.table
    }

    /// Value on a word of exactly `range` symbols.
    pub fn value(&self, w: &[Symbol]) -> f64 {
        match self.table.get(w) {
            Some(&v) => v,
            None => panic!("potential evaluated on inadmissible word {w:?}"),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.table.values().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_constant(&self) -> bool {
        let mut vals = self.table.values();
        match vals.next() {
            None => true,
            Some(&first) => vals.all(|&v| v == first),
        }
    }

    /// Sum of `φ` along the periodic point `cycle^∞` over one period.
    pub fn cycle_sum(&self, cycle: &[Symbol]) -> f64 {
        let p = cycle.len();
        (0..p)
            .map(|i| {
                let w: Vec<Symbol> = (0..self.range).map(|t| cycle[(i + t) % p]).collect();
                self.value(&w)
            })
            .sum()
    }

    pub fn cycle_average(&self, cycle: &[Symbol]) -> f64 {
        self.cycle_sum(cycle) / cycle.len() as f64
    }

    /// The same observable seen on a `b`-block presentation: the new range is
    /// `max(1, r - b + 1)` presentation symbols.
    pub fn lift(&self, bp: &BlockPresentation) -> Potential {
        let b = bp.block_len();
        let new_range = if self.range > b { self.range - b + 1 } else { 1 };
        let shift = bp.shift();
        Potential::from_fn(shift, new_range, |path| {
            let ambient = bp.decode(path);
            self.value(&ambient[..self.range])
        })
        .expect("lifted potential covers the presentation language")
    }

    /// Recodes to an edge-weighted graph: vertices are admissible
    /// `(r-1)`-words (or symbols when `r <= 2`) and the weight of an edge is
    /// the value on the `r`-word it spells. For `r = 1` the weight of `i -> j`
    /// is `φ(i)`.
    pub fn edge_graph(&self, shift: &ShiftSpace) -> EdgeGraph {
        if self.range <= 2 {
            let k = shift.k();
            let mut weights = vec![vec![None; k]; k];
            for (i, j) in shift.edges() {
                let v = if self.range == 1 { self.value(&[i]) } else { self.value(&[i, j]) };
                weights[i][j] = Some(v);
            }
            return EdgeGraph { graph: shift.clone(), weights, block: None };
        }
        let bp = shift.higher_block(self.range - 1);
        let g = bp.shift().clone();
        let k = g.k();
        let mut weights = vec![vec![None; k]; k];
        for (u, v) in g.edges() {
            let w = bp.decode(&[u, v]);
            weights[u][v] = Some(self.value(&w));
        }
        EdgeGraph { graph: g, weights, block: Some(bp) }
    }
}

/// A transition graph with real weights on its edges.
#[derive(Clone, Debug)]
pub struct EdgeGraph {
    pub graph: ShiftSpace,
    pub weights: Vec<Vec<Option<f64>>>,
    /// Present when vertices are blocks of the ambient shift.
    pub block: Option<BlockPresentation>,
}

impl EdgeGraph {
    /// Converts a vertex cycle of this graph to an ambient periodic orbit.
    pub fn ambient_cycle(&self, cycle: &[Symbol]) -> Vec<Symbol> {
        match &self.block {
            Some(bp) => bp.decode_cycle(cycle),
            None => cycle.to_vec(),
        }
    }

    pub fn cycle_mean(&self, cycle: &[Symbol]) -> f64 {
        let p = cycle.len();
        let s: f64 = (0..p)
            .map(|i| self.weights[cycle[i]][cycle[(i + 1) % p]].expect("cycle edge"))
            .sum();
        s / p as f64
    }
}
