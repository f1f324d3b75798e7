//! First-order formulas over word structures.
//!
//! The vocabulary is one unary predicate per letter plus `≤` and `=` on
//! positions. `Max`/`Min` are macros: they print and parse as `(max x)` /
//! `(min x)` but every semantic pass expands them first.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::{self, Sexp};
use crate::words::Symbol;

pub type Var = String;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Letter(Symbol, Var),
    Leq(Var, Var),
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    /// `∀y. y ≤ x`
    Max(Var),
    /// `∀y. x ≤ y`
    Min(Var),
}

pub fn letter(c: &str, x: &str) -> Formula {
    Formula::Letter(Symbol::new(c), x.to_string())
}

pub fn letter_sym(c: &Symbol, x: &str) -> Formula {
    Formula::Letter(c.clone(), x.to_string())
}

pub fn leq(x: &str, y: &str) -> Formula {
    Formula::Leq(x.to_string(), y.to_string())
}

/// `x < y`, spelled `¬(y ≤ x)`.
pub fn lt(x: &str, y: &str) -> Formula {
    not(leq(y, x))
}

pub fn eq(x: &str, y: &str) -> Formula {
    Formula::Eq(x.to_string(), y.to_string())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(fs: Vec<Formula>) -> Formula {
    Formula::And(fs)
}

pub fn or(fs: Vec<Formula>) -> Formula {
    Formula::Or(fs)
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn forall(x: &str, f: Formula) -> Formula {
    Formula::Forall(x.to_string(), Box::new(f))
}

pub fn exists(x: &str, f: Formula) -> Formula {
    Formula::Exists(x.to_string(), Box::new(f))
}

pub fn max(x: &str) -> Formula {
    Formula::Max(x.to_string())
}

pub fn min(x: &str) -> Formula {
    Formula::Min(x.to_string())
}

/// Hands out variable names not present in a given set.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    used: HashSet<String>,
}

impl FreshNames {
    pub fn avoiding<'a, I: IntoIterator<Item = &'a Var>>(vars: I) -> FreshNames {
        FreshNames { used: vars.into_iter().cloned().collect() }
    }

    pub fn reserve(&mut self, v: &str) {
        self.used.insert(v.to_string());
    }

    /// `base` itself if unused, else the first free `base_k`.
    pub fn fresh(&mut self, base: &str) -> Var {
        let name = if self.used.contains(base) {
            (1..).map(|k| format!("{base}_{k}")).find(|n| !self.used.contains(n)).unwrap()
        } else {
            base.to_string()
        };
        self.used.insert(name.clone());
        name
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Letter(_, x) | Formula::Max(x) | Formula::Min(x) => note(x, bound),
            Formula::Leq(x, y) | Formula::Eq(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Letter(_, x) | Formula::Max(x) | Formula::Min(x) => {
                out.insert(x.clone());
            }
            Formula::Leq(x, y) | Formula::Eq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn letters_used(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Letter(c, _) = f {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Number of quantifiers, counting each `Max`/`Min` macro as one.
    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, Formula::Forall(..) | Formula::Exists(..) | Formula::Max(_) | Formula::Min(_)) {
                n += 1;
            }
        });
        n
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Letter(..) | Formula::Leq(..) | Formula::Eq(..) => 0,
            Formula::Max(_) | Formula::Min(_) => 1,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Replaces `Max`/`Min` by their definitions, with fresh bound variables.
    pub fn expand_macros(&self) -> Formula {
        let mut fresh = FreshNames::avoiding(&self.all_vars());
        self.expand_with(&mut fresh)
    }

    fn expand_with(&self, fresh: &mut FreshNames) -> Formula {
        match self {
            Formula::Max(x) => {
                let y = fresh.fresh("m");
                forall(&y, leq(&y, x))
            }
            Formula::Min(x) => {
                let y = fresh.fresh("m");
                forall(&y, leq(x, &y))
            }
            _ => self.map_children(|g| g.expand_with(fresh)),
        }
    }

    fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Not(g) => not(f(g)),
            Formula::And(gs) => Formula::And(gs.iter().map(&mut f).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(&mut f).collect()),
            Formula::Implies(a, b) => {
                let a = f(a);
                implies(a, f(b))
            }
            Formula::Forall(x, g) => forall(x, f(g)),
            Formula::Exists(x, g) => exists(x, f(g)),
            atom => atom.clone(),
        }
    }

    /// Renames bound variables so that every binder has its own name,
    /// distinct from every free variable. Names are kept where possible.
    pub fn alpha_rename(&self) -> Formula {
        let mut fresh = FreshNames::avoiding(&self.free_vars());
        self.alpha_with(&mut fresh, &BTreeMap::new())
    }

    fn alpha_with(&self, fresh: &mut FreshNames, scope: &BTreeMap<Var, Var>) -> Formula {
        let r = |v: &Var| scope.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::Letter(c, x) => Formula::Letter(c.clone(), r(x)),
            Formula::Leq(x, y) => Formula::Leq(r(x), r(y)),
            Formula::Eq(x, y) => Formula::Eq(r(x), r(y)),
            Formula::Max(x) => Formula::Max(r(x)),
            Formula::Min(x) => Formula::Min(r(x)),
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                let nx = fresh.fresh(x);
                let mut inner = scope.clone();
                inner.insert(x.clone(), nx.clone());
                let body = g.alpha_with(fresh, &inner);
                match self {
                    Formula::Forall(..) => forall(&nx, body),
                    _ => exists(&nx, body),
                }
            }
            _ => self.map_children(|g| g.alpha_with(fresh, scope)),
        }
    }

    /// Capture-avoiding renaming of free variables.
    pub fn substitute(&self, map: &BTreeMap<Var, Var>) -> Formula {
        let mut avoid: BTreeSet<Var> = self.all_vars();
        avoid.extend(map.values().cloned());
        let mut fresh = FreshNames::avoiding(&avoid);
        self.subst_with(map, &mut fresh)
    }

    fn subst_with(&self, map: &BTreeMap<Var, Var>, fresh: &mut FreshNames) -> Formula {
        let r = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::Letter(c, x) => Formula::Letter(c.clone(), r(x)),
            Formula::Leq(x, y) => Formula::Leq(r(x), r(y)),
            Formula::Eq(x, y) => Formula::Eq(r(x), r(y)),
            Formula::Max(x) => Formula::Max(r(x)),
            Formula::Min(x) => Formula::Min(r(x)),
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                let mut inner = map.clone();
                inner.remove(x);
                let captures = inner.values().any(|v| v == x);
                let (nx, body) = if captures {
                    let nx = fresh.fresh(x);
                    inner.insert(x.clone(), nx.clone());
                    (nx, g.subst_with(&inner, fresh))
                } else {
                    (x.clone(), g.subst_with(&inner, fresh))
                };
                match self {
                    Formula::Forall(..) => forall(&nx, body),
                    _ => exists(&nx, body),
                }
            }
            _ => self.map_children(|g| g.subst_with(map, fresh)),
        }
    }

    /// Restricts every quantifier to positions not carrying `guard`:
    /// `∀z.φ` becomes `∀z. ¬guard(z) ⇒ φ` and `∃z.φ` becomes
    /// `∃z. ¬guard(z) ∧ φ`. Macros are expanded first.
    pub fn relativize(&self, guard: &Symbol) -> Formula {
        self.expand_macros().relativize_expanded(guard)
    }

    fn relativize_expanded(&self, guard: &Symbol) -> Formula {
        match self {
            Formula::Forall(z, g) => {
                forall(z, implies(not(letter_sym(guard, z)), g.relativize_expanded(guard)))
            }
            Formula::Exists(z, g) => {
                exists(z, and(vec![not(letter_sym(guard, z)), g.relativize_expanded(guard)]))
            }
            _ => self.map_children(|g| g.relativize_expanded(guard)),
        }
    }

    /// The `Leq`/`Eq` atoms, in pre-order.
    pub fn comparisons(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if matches!(f, Formula::Leq(..) | Formula::Eq(..)) {
                out.push(f);
            }
        });
        out
    }

    pub fn to_sexp(&self) -> Sexp {
        let atom = |s: &str| Sexp::Atom(s.to_string());
        let list = |v: Vec<Sexp>| Sexp::List(v);
        match self {
            Formula::Letter(c, x) => list(vec![atom("letter"), atom(c.as_str()), atom(x)]),
            Formula::Leq(x, y) => list(vec![atom("leq"), atom(x), atom(y)]),
            Formula::Eq(x, y) => list(vec![atom("eq"), atom(x), atom(y)]),
            Formula::Not(f) => list(vec![atom("not"), f.to_sexp()]),
            Formula::And(fs) => list(std::iter::once(atom("and")).chain(fs.iter().map(Formula::to_sexp)).collect()),
            Formula::Or(fs) => list(std::iter::once(atom("or")).chain(fs.iter().map(Formula::to_sexp)).collect()),
            Formula::Implies(a, b) => list(vec![atom("implies"), a.to_sexp(), b.to_sexp()]),
            Formula::Forall(x, f) => list(vec![atom("forall"), atom(x), f.to_sexp()]),
            Formula::Exists(x, f) => list(vec![atom("exists"), atom(x), f.to_sexp()]),
            Formula::Max(x) => list(vec![atom("max"), atom(x)]),
            Formula::Min(x) => list(vec![atom("min"), atom(x)]),
        }
    }

    pub fn from_sexp(e: &Sexp) -> Result<Formula> {
        let bad = || Error::Parse(format!("malformed formula `{e}`"));
        let (head, args) = e.head().ok_or_else(bad)?;
        let var = |s: &Sexp| -> Result<Var> {
            match s {
                Sexp::Atom(a) => Ok(a.clone()),
                _ => Err(bad()),
            }
        };
        let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(bad()) };
        Ok(match head {
            "letter" => {
                arity(2)?;
                Formula::Letter(Symbol::new(args[0].as_atom().ok_or_else(bad)?), var(&args[1])?)
            }
            "leq" => {
                arity(2)?;
                Formula::Leq(var(&args[0])?, var(&args[1])?)
            }
            "eq" => {
                arity(2)?;
                Formula::Eq(var(&args[0])?, var(&args[1])?)
            }
            "not" => {
                arity(1)?;
                not(Formula::from_sexp(&args[0])?)
            }
            "and" => Formula::And(args.iter().map(Formula::from_sexp).collect::<Result<_>>()?),
            "or" => Formula::Or(args.iter().map(Formula::from_sexp).collect::<Result<_>>()?),
            "implies" => {
                arity(2)?;
                implies(Formula::from_sexp(&args[0])?, Formula::from_sexp(&args[1])?)
            }
            "forall" | "exists" => {
                arity(2)?;
                let x = var(&args[0])?;
                let body = Formula::from_sexp(&args[1])?;
                if head == "forall" {
                    forall(&x, body)
                } else {
                    exists(&x, body)
                }
            }
            "max" => {
                arity(1)?;
                Formula::Max(var(&args[0])?)
            }
            "min" => {
                arity(1)?;
                Formula::Min(var(&args[0])?)
            }
            _ => return Err(Error::Parse(format!("unknown connective `{head}`"))),
        })
    }

    pub fn parse(src: &str) -> Result<Formula> {
        Formula::from_sexp(&sexpr::parse_one(src)?)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        Formula::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print_round_trip() {
        for src in [
            "(and (letter a x1) (not (max x2)))",
            "(forall y (or (letter a y) (leq x y)))",
            "(exists y (eq x y))",
            "(implies (min x) (and))",
        ] {
            assert_eq!(Formula::parse(src).unwrap().to_string(), src);
        }
        assert!(Formula::parse("(letter a)").is_err());
        assert!(Formula::parse("(frob x)").is_err());
    }

    #[test]
    fn free_variables() {
        let f = Formula::parse("(forall y (or (letter a y) (leq x y)))").unwrap();
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
    }

    #[test]
    fn relativize_existential() {
        let f = Formula::parse("(exists y (letter a y))").unwrap();
        let r = f.relativize(&Symbol::new("♣"));
        assert_eq!(r.to_string(), "(exists y (and (not (letter ♣ y)) (letter a y)))");
        let atom = Formula::parse("(leq x y)").unwrap();
        assert_eq!(atom.relativize(&Symbol::new("♣")), atom);
    }

    #[test]
    fn alpha_rename_separates_binders() {
        let f = Formula::parse("(and (exists y (letter a y)) (exists y (leq x y)) (letter b y))").unwrap();
        let g = f.alpha_rename();
        let mut binders = Vec::new();
        g.visit(&mut |h| {
            if let Formula::Exists(v, _) = h {
                binders.push(v.clone());
            }
        });
        assert_eq!(binders.len(), 2);
        assert_ne!(binders[0], binders[1]);
        assert!(!binders.contains(&"y".to_string()), "free y must stay distinct from binders");
        assert_eq!(g.free_vars(), f.free_vars());
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::parse("(exists y (leq x y))").unwrap();
        let g = f.substitute(&BTreeMap::from([("x".to_string(), "y".to_string())]));
        assert_eq!(g.free_vars().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
        match g {
            Formula::Exists(v, _) => assert_ne!(v, "y"),
            _ => panic!(),
        }
    }
}
