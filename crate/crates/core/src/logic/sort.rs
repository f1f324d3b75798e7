//! Two-sort analysis for 2-dimensional interpretations.
//!
//! Each variable gets a sort in {1, 2} such that no comparison (`≤` or `=`)
//! relates variables of different sorts, with `x_i`, `y_i` seeded to sort
//! `i`. Bound variables are alpha-renamed apart first, so every binder is
//! sorted independently.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::Interpretation;
use crate::logic::formula::{Formula, Var};

/// Formula label (`order`, `letter a`, ...) → variable → sort.
pub type SortMap = BTreeMap<String, BTreeMap<Var, u8>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SortFailure {
    pub formula: String,
    /// The comparison that forced sorts 1 and 2 together.
    pub atom: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SortOutcome {
    Sortable(SortMap),
    Conflict(SortFailure),
}

impl SortOutcome {
    pub fn is_sortable(&self) -> bool {
        matches!(self, SortOutcome::Sortable(_))
    }
}

struct UnionFind {
    parent: Vec<usize>,
    sort: Vec<Option<u8>>,
}

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Merges the classes; `false` if that would equate sorts 1 and 2.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return true;
        }
        match (self.sort[ra], self.sort[rb]) {
            (Some(s), Some(t)) if s != t => false,
            (sa, sb) => {
                self.parent[rb] = ra;
                self.sort[ra] = sa.or(sb);
                true
            }
        }
    }
}

fn sort_formula(label: &str, f: &Formula, seeds: &[(&str, u8)]) -> std::result::Result<BTreeMap<Var, u8>, SortFailure> {
    let f = f.expand_macros().alpha_rename();
    let vars: Vec<Var> = f.all_vars().into_iter().collect();
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut uf = UnionFind { parent: (0..vars.len()).collect(), sort: vec![None; vars.len()] };
    for (v, s) in seeds {
        if let Some(&i) = index.get(v) {
            uf.sort[i] = Some(*s);
        }
    }
    for atom in f.comparisons() {
        let (Formula::Leq(x, y) | Formula::Eq(x, y)) = atom else { unreachable!() };
        if !uf.union(index[x.as_str()], index[y.as_str()]) {
            return Err(SortFailure { formula: label.to_string(), atom: atom.to_string() });
        }
    }
    Ok(vars
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = uf.find(i);
            (v.clone(), uf.sort[r].unwrap_or(1))
        })
        .collect())
}

/// Checks the two-sort criterion on every formula of a 2D interpretation.
pub fn check_sortable(interp: &Interpretation) -> Result<SortOutcome> {
    if interp.dim != 2 {
        return Err(Error::Dimension { expected: 2, found: interp.dim });
    }
    let mut map = SortMap::new();
    let order_seeds = [("x1", 1), ("y1", 1), ("x2", 2), ("y2", 2)];
    match sort_formula("order", &interp.order, &order_seeds) {
        Ok(m) => {
            map.insert("order".to_string(), m);
        }
        Err(e) => return Ok(SortOutcome::Conflict(e)),
    }
    for (c, f) in &interp.letters {
        let label = format!("letter {c}");
        match sort_formula(&label, f, &[("x1", 1), ("x2", 2)]) {
            Ok(m) => {
                map.insert(label, m);
            }
            Err(e) => return Ok(SortOutcome::Conflict(e)),
        }
    }
    Ok(SortOutcome::Sortable(map))
}
