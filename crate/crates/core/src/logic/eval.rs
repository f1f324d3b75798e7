//! Formula evaluation over a word.
//!
//! [`eval_formula`] is the reference evaluator: plain recursion over the AST,
//! quantifiers ranging over `1..=|w|`. [`CompiledFormula`] is the fast path
//! used by interpretations; it resolves variables to slots, miniscopes
//! existential/universal quantifiers and memoizes quantified subformulas on
//! the positions of their free variables. Both must agree on every input.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::logic::formula::{Formula, Var};
use crate::words::{Symbol, Word};

/// Variable → position assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(pub BTreeMap<Var, usize>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn with(mut self, var: &str, pos: usize) -> Assignment {
        self.0.insert(var.to_string(), pos);
        self
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }
}

impl<const N: usize> From<[(&str, usize); N]> for Assignment {
    fn from(pairs: [(&str, usize); N]) -> Assignment {
        Assignment(pairs.into_iter().map(|(v, p)| (v.to_string(), p)).collect())
    }
}

fn check_env(w: &Word, f: &Formula, env: &Assignment) -> Result<()> {
    for v in f.free_vars() {
        if env.get(&v).is_none() {
            return Err(Error::UnboundVariable(v));
        }
    }
    for (v, &p) in &env.0 {
        if p == 0 || p > w.len() {
            return Err(Error::PositionOutOfRange { var: v.clone(), pos: p, len: w.len() });
        }
    }
    Ok(())
}

/// Tarskian semantics of `f` on `w` under `env`.
pub fn eval_formula(w: &Word, f: &Formula, env: &Assignment) -> Result<bool> {
    check_env(w, f, env)?;
    let f = f.expand_macros();
    let mut stack: Vec<(&str, usize)> = env.0.iter().map(|(v, &p)| (v.as_str(), p)).collect();
    Ok(naive(w, &f, &mut stack))
}

fn lookup(stack: &[(&str, usize)], v: &str) -> usize {
    stack.iter().rev().find(|(n, _)| *n == v).map(|(_, p)| *p).expect("checked free variables")
}

fn naive<'f>(w: &Word, f: &'f Formula, stack: &mut Vec<(&'f str, usize)>) -> bool {
    match f {
        Formula::Letter(c, x) => w.get(lookup(stack, x)) == Some(c),
        Formula::Leq(x, y) => lookup(stack, x) <= lookup(stack, y),
        Formula::Eq(x, y) => lookup(stack, x) == lookup(stack, y),
        Formula::Not(g) => !naive(w, g, stack),
        Formula::And(gs) => gs.iter().all(|g| naive(w, g, stack)),
        Formula::Or(gs) => gs.iter().any(|g| naive(w, g, stack)),
        Formula::Implies(a, b) => !naive(w, a, stack) || naive(w, b, stack),
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            let universal = matches!(f, Formula::Forall(..));
            for p in 1..=w.len() {
                stack.push((x.as_str(), p));
                let v = naive(w, g, stack);
                stack.pop();
                if v != universal {
                    return v;
                }
            }
            universal
        }
        Formula::Max(_) | Formula::Min(_) => unreachable!("macros are expanded before evaluation"),
    }
}

/// Pushes quantifiers inward past conjuncts/disjuncts that do not mention
/// the bound variable. Only the rewrites valid over empty domains are used:
/// `∃x.(A ∧ B) ≡ A ∧ ∃x.B`, `∀x.(A ∨ B) ≡ A ∨ ∀x.B`,
/// `∀x.(A ⇒ B) ≡ A ⇒ ∀x.B` when `x ∉ free(A)`.
pub fn miniscope(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => Formula::Not(Box::new(miniscope(g))),
        Formula::And(gs) => Formula::And(flatten(gs.iter().map(miniscope), true)),
        Formula::Or(gs) => Formula::Or(flatten(gs.iter().map(miniscope), false)),
        Formula::Implies(a, b) => Formula::Implies(Box::new(miniscope(a)), Box::new(miniscope(b))),
        Formula::Exists(x, g) => match miniscope(g) {
            Formula::And(parts) => {
                let (outer, inner): (Vec<_>, Vec<_>) = parts.into_iter().partition(|p| !p.free_vars().contains(x));
                if outer.is_empty() {
                    return Formula::Exists(x.clone(), Box::new(Formula::And(inner)));
                }
                let mut all = outer;
                if !inner.is_empty() {
                    all.push(Formula::Exists(x.clone(), Box::new(single(inner, true))));
                } else {
                    // ∃x.A with x unused still requires a non-empty domain.
                    all.push(Formula::Exists(x.clone(), Box::new(Formula::And(vec![]))));
                }
                Formula::And(all)
            }
            body => Formula::Exists(x.clone(), Box::new(body)),
        },
        Formula::Forall(x, g) => match miniscope(g) {
            Formula::Or(parts) => {
                let (outer, inner): (Vec<_>, Vec<_>) = parts.into_iter().partition(|p| !p.free_vars().contains(x));
                if outer.is_empty() {
                    return Formula::Forall(x.clone(), Box::new(Formula::Or(inner)));
                }
                let mut all = outer;
                all.push(Formula::Forall(x.clone(), Box::new(single(inner, false))));
                Formula::Or(all)
            }
            Formula::Implies(a, b) if !a.free_vars().contains(x) => {
                Formula::Implies(a, Box::new(Formula::Forall(x.clone(), b)))
            }
            body => Formula::Forall(x.clone(), Box::new(body)),
        },
        atom => atom.clone(),
    }
}

fn flatten(parts: impl Iterator<Item = Formula>, conj: bool) -> Vec<Formula> {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Formula::And(inner) if conj => out.extend(inner),
            Formula::Or(inner) if !conj => out.extend(inner),
            other => out.push(other),
        }
    }
    out
}

fn single(mut parts: Vec<Formula>, conj: bool) -> Formula {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else if conj {
        Formula::And(parts)
    } else {
        Formula::Or(parts)
    }
}

#[derive(Clone, Debug)]
enum Op {
    Letter(u32, usize),
    Leq(usize, usize),
    Eq(usize, usize),
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Implies(usize, usize),
    Forall(usize, usize),
    Exists(usize, usize),
}

#[derive(Clone, Debug)]
struct Node {
    op: Op,
    /// Slots of the free variables, ascending.
    free: Vec<usize>,
}

/// Memo tables larger than this many entries are not allocated.
const MEMO_CAP: usize = 1 << 22;

/// A formula resolved to variable slots, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    root: usize,
    params: Vec<Var>,
    slots: usize,
    symbols: Vec<Symbol>,
}

impl CompiledFormula {
    /// Compiles `f` with `params` as its parameter slots, in order. Every
    /// free variable of `f` must be a parameter.
    pub fn new(f: &Formula, params: &[Var]) -> Result<CompiledFormula> {
        let f = miniscope(&f.expand_macros());
        let mut c = CompiledFormula {
            nodes: Vec::new(),
            root: 0,
            params: params.to_vec(),
            slots: params.len(),
            symbols: Vec::new(),
        };
        let mut scope: Vec<(Var, usize)> = params.iter().cloned().zip(0..).collect();
        let mut sym_ids = HashMap::new();
        c.root = c.build(&f, &mut scope, &mut sym_ids)?;
        Ok(c)
    }

    pub fn params(&self) -> &[Var] {
        &self.params
    }

    fn build(&mut self, f: &Formula, scope: &mut Vec<(Var, usize)>, syms: &mut HashMap<Symbol, u32>) -> Result<usize> {
        let slot = |scope: &Vec<(Var, usize)>, v: &Var| -> Result<usize> {
            scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, s)| *s)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))
        };
        let (op, free) = match f {
            Formula::Letter(c, x) => {
                let next = syms.len() as u32;
                let id = *syms.entry(c.clone()).or_insert(next);
                if id == next {
                    self.symbols.push(c.clone());
                }
                let s = slot(scope, x)?;
                (Op::Letter(id, s), vec![s])
            }
            Formula::Leq(x, y) | Formula::Eq(x, y) => {
                let (a, b) = (slot(scope, x)?, slot(scope, y)?);
                let mut free = vec![a, b];
                free.sort_unstable();
                free.dedup();
                let op = if matches!(f, Formula::Leq(..)) { Op::Leq(a, b) } else { Op::Eq(a, b) };
                (op, free)
            }
            Formula::Not(g) => {
                let g = self.build(g, scope, syms)?;
                (Op::Not(g), self.nodes[g].free.clone())
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let ids = gs.iter().map(|g| self.build(g, scope, syms)).collect::<Result<Vec<_>>>()?;
                let mut free: Vec<usize> = ids.iter().flat_map(|&i| self.nodes[i].free.iter().copied()).collect();
                free.sort_unstable();
                free.dedup();
                let op = if matches!(f, Formula::And(_)) { Op::And(ids) } else { Op::Or(ids) };
                (op, free)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.build(a, scope, syms)?, self.build(b, scope, syms)?);
                let mut free = self.nodes[a].free.clone();
                free.extend(self.nodes[b].free.iter().copied());
                free.sort_unstable();
                free.dedup();
                (Op::Implies(a, b), free)
            }
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                let s = self.slots;
                self.slots += 1;
                scope.push((x.clone(), s));
                let body = self.build(g, scope, syms);
                scope.pop();
                let body = body?;
                let free: Vec<usize> = self.nodes[body].free.iter().copied().filter(|&v| v != s).collect();
                let op = if matches!(f, Formula::Forall(..)) { Op::Forall(s, body) } else { Op::Exists(s, body) };
                (op, free)
            }
            Formula::Max(_) | Formula::Min(_) => unreachable!("macros are expanded before compiling"),
        };
        self.nodes.push(Node { op, free });
        Ok(self.nodes.len() - 1)
    }

    /// Prepares an evaluator for one word.
    pub fn on<'a>(&'a self, w: &Word) -> Evaluator<'a> {
        let letters = std::iter::once(u32::MAX)
            .chain(w.iter().map(|c| self.symbols.iter().position(|s| s == c).map_or(u32::MAX, |i| i as u32)))
            .collect();
        Evaluator {
            prog: self,
            letters,
            n: w.len(),
            env: vec![0; self.slots],
            memo: vec![None; self.nodes.len()],
        }
    }
}

/// Evaluation state for one compiled formula on one word.
pub struct Evaluator<'a> {
    prog: &'a CompiledFormula,
    letters: Vec<u32>,
    n: usize,
    env: Vec<usize>,
    memo: Vec<Option<Vec<u8>>>,
}

impl<'a> Evaluator<'a> {
    /// Evaluates with the parameters bound to `args` (1-based positions).
    pub fn eval(&mut self, args: &[usize]) -> bool {
        debug_assert_eq!(args.len(), self.prog.params.len());
        debug_assert!(args.iter().all(|&p| (1..=self.n).contains(&p)));
        self.env[..args.len()].copy_from_slice(args);
        self.go(self.prog.root)
    }

    fn memo_index(&self, free: &[usize]) -> usize {
        let mut key = 0;
        for &s in free.iter().rev() {
            key = key * self.n + (self.env[s] - 1);
        }
        key
    }

    fn go(&mut self, id: usize) -> bool {
        let prog = self.prog;
        let node = &prog.nodes[id];
        match &node.op {
            Op::Letter(c, s) => self.letters[self.env[*s]] == *c,
            Op::Leq(a, b) => self.env[*a] <= self.env[*b],
            Op::Eq(a, b) => self.env[*a] == self.env[*b],
            Op::Not(g) => !self.go(*g),
            Op::And(gs) => gs.iter().all(|&g| self.go(g)),
            Op::Or(gs) => gs.iter().any(|&g| self.go(g)),
            Op::Implies(a, b) => !self.go(*a) || self.go(*b),
            Op::Forall(s, body) | Op::Exists(s, body) => {
                let universal = matches!(node.op, Op::Forall(..));
                let size = self.n.checked_pow(node.free.len() as u32).filter(|&z| z <= MEMO_CAP);
                let key = size.map(|_| self.memo_index(&node.free));
                if let (Some(k), Some(table)) = (key, &self.memo[id]) {
                    match table[k] {
                        1 => return false,
                        2 => return true,
                        _ => {}
                    }
                }
                let saved = self.env[*s];
                let mut result = universal;
                for p in 1..=self.n {
                    self.env[*s] = p;
                    if self.go(*body) != universal {
                        result = !universal;
                        break;
                    }
                }
                self.env[*s] = saved;
                if let (Some(k), Some(size)) = (key, size) {
                    let table = self.memo[id].get_or_insert_with(|| vec![0; size]);
                    table[k] = if result { 2 } else { 1 };
                }
                result
            }
        }
    }
}
