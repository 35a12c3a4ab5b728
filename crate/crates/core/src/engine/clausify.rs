//! NNF, Skolemization and clausification.
//!
//! Quantified variables are renamed to globally unique ids during NNF
//! conversion, so clauses can be instantiated independently. Existentials
//! are replaced by Skolem terms over the enclosing universals that actually
//! occur in their scope. Disjunctions whose naive distribution would grow
//! the clause set more than fourfold are split with definition predicates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::fol::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoTerm {
    Var(usize),
    Const(String),
    Func(String, Vec<FoTerm>),
}

impl FoTerm {
    pub fn is_ground(&self) -> bool {
        match self {
            FoTerm::Var(_) => false,
            FoTerm::Const(_) => true,
            FoTerm::Func(_, args) => args.iter().all(FoTerm::is_ground),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            FoTerm::Var(v) => {
                out.insert(*v);
            }
            FoTerm::Const(_) => {}
            FoTerm::Func(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn substitute(&self, var: usize, with: &FoTerm) -> FoTerm {
        match self {
            FoTerm::Var(v) if *v == var => with.clone(),
            FoTerm::Var(_) | FoTerm::Const(_) => self.clone(),
            FoTerm::Func(f, args) => FoTerm::Func(
                f.clone(),
                args.iter().map(|a| a.substitute(var, with)).collect(),
            ),
        }
    }

    pub(crate) fn instantiate(&self, binding: &BTreeMap<usize, FoTerm>) -> FoTerm {
        match self {
            FoTerm::Var(v) => binding[v].clone(),
            FoTerm::Const(_) => self.clone(),
            FoTerm::Func(f, args) => FoTerm::Func(
                f.clone(),
                args.iter().map(|a| a.instantiate(binding)).collect(),
            ),
        }
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTerm::Var(v) => write!(f, "X{v}"),
            FoTerm::Const(c) => f.write_str(c),
            FoTerm::Func(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<FoTerm>,
}

impl Literal {
    fn complements(&self, other: &Literal) -> bool {
        self.positive != other.positive
            && self.predicate == other.predicate
            && self.args == other.args
    }

    fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A disjunction of literals; variables are implicitly universal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for l in &self.literals {
            l.args.iter().for_each(|a| a.collect_vars(&mut out));
        }
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    /// Skolem symbol name to arity; arity 0 is a Skolem constant.
    pub skolem_symbols: BTreeMap<String, usize>,
    /// Definition predicates introduced by the structure-preserving split.
    pub definitions: BTreeMap<String, usize>,
}

impl ClauseSet {
    pub fn has_skolem_functions(&self) -> bool {
        self.skolem_symbols.values().any(|&a| a > 0)
    }

    pub fn skolem_constants(&self) -> impl Iterator<Item = &str> {
        self.skolem_symbols
            .iter()
            .filter(|(_, &a)| a == 0)
            .map(|(n, _)| n.as_str())
    }

    pub fn constants(&self) -> BTreeSet<String> {
        fn walk(t: &FoTerm, out: &mut BTreeSet<String>) {
            match t {
                FoTerm::Var(_) => {}
                FoTerm::Const(c) => {
                    out.insert(c.clone());
                }
                FoTerm::Func(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            for l in &c.literals {
                l.args.iter().for_each(|a| walk(a, &mut out));
            }
        }
        out
    }
}

enum Nnf {
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    ForAll(usize, Box<Nnf>),
    Exists(usize, Box<Nnf>),
}

impl Nnf {
    fn and(xs: Vec<Nnf>) -> Nnf {
        Nnf::And(
            xs.into_iter()
                .flat_map(|x| match x {
                    Nnf::And(inner) => inner,
                    other => vec![other],
                })
                .collect(),
        )
    }

    fn or(xs: Vec<Nnf>) -> Nnf {
        Nnf::Or(
            xs.into_iter()
                .flat_map(|x| match x {
                    Nnf::Or(inner) => inner,
                    other => vec![other],
                })
                .collect(),
        )
    }

    fn substitute(self, var: usize, with: &FoTerm) -> Nnf {
        match self {
            Nnf::Lit(mut l) => {
                l.args = l.args.iter().map(|a| a.substitute(var, with)).collect();
                Nnf::Lit(l)
            }
            Nnf::And(xs) => Nnf::And(xs.into_iter().map(|x| x.substitute(var, with)).collect()),
            Nnf::Or(xs) => Nnf::Or(xs.into_iter().map(|x| x.substitute(var, with)).collect()),
            Nnf::ForAll(v, b) => Nnf::ForAll(v, Box::new(b.substitute(var, with))),
            Nnf::Exists(v, b) => Nnf::Exists(v, Box::new(b.substitute(var, with))),
        }
    }

    fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            Nnf::Lit(l) => {
                let mut out = BTreeSet::new();
                l.args.iter().for_each(|a| a.collect_vars(&mut out));
                out
            }
            Nnf::And(xs) | Nnf::Or(xs) => xs.iter().flat_map(Nnf::free_vars).collect(),
            Nnf::ForAll(v, b) | Nnf::Exists(v, b) => {
                let mut out = b.free_vars();
                out.remove(v);
                out
            }
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Nnf::Lit(l) => l.args.iter().for_each(|a| a.collect_vars(out)),
            Nnf::And(xs) | Nnf::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Nnf::ForAll(_, b) | Nnf::Exists(_, b) => b.collect_vars(out),
        }
    }
}

struct Names {
    taken: BTreeSet<String>,
    next_sk: usize,
    next_def: usize,
}

impl Names {
    fn fresh(&mut self, prefix: &str, counter: fn(&mut Names) -> &mut usize) -> String {
        loop {
            let n = {
                let c = counter(self);
                *c += 1;
                *c
            };
            let name = format!("{prefix}{n}");
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

struct Clausifier {
    next_var: usize,
    names: Names,
    out: ClauseSet,
}

impl Clausifier {
    fn nnf(&mut self, f: &Formula, positive: bool, env: &mut Vec<(String, usize)>) -> Nnf {
        match f {
            Formula::Atom { predicate, args } => Nnf::Lit(Literal {
                positive,
                predicate: predicate.clone(),
                args: args
                    .iter()
                    .map(|t| match t {
                        Term::Constant(c) => FoTerm::Const(c.clone()),
                        Term::Variable(v) => env
                            .iter()
                            .rev()
                            .find(|(n, _)| n == v)
                            .map(|&(_, id)| FoTerm::Var(id))
                            .expect("formula is closed"),
                    })
                    .collect(),
            }),
            Formula::Not(g) => self.nnf(g, !positive, env),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let xs = vec![self.nnf(a, positive, env), self.nnf(b, positive, env)];
                if matches!(f, Formula::And(..)) == positive {
                    Nnf::and(xs)
                } else {
                    Nnf::or(xs)
                }
            }
            Formula::Implies(a, b) => {
                let xs = vec![self.nnf(a, !positive, env), self.nnf(b, positive, env)];
                if positive {
                    Nnf::or(xs)
                } else {
                    Nnf::and(xs)
                }
            }
            Formula::Iff(a, b) | Formula::Xor(a, b) => {
                // a ↔ b  ≡  (¬a ∨ b) ∧ (a ∨ ¬b);  a ⊕ b ≡ ¬(a ↔ b)
                let as_iff = matches!(f, Formula::Iff(..)) == positive;
                if as_iff {
                    Nnf::and(vec![
                        Nnf::or(vec![self.nnf(a, false, env), self.nnf(b, true, env)]),
                        Nnf::or(vec![self.nnf(a, true, env), self.nnf(b, false, env)]),
                    ])
                } else {
                    Nnf::or(vec![
                        Nnf::and(vec![self.nnf(a, false, env), self.nnf(b, true, env)]),
                        Nnf::and(vec![self.nnf(a, true, env), self.nnf(b, false, env)]),
                    ])
                }
            }
            Formula::ForAll(v, g) | Formula::Exists(v, g) => {
                let id = self.next_var;
                self.next_var += 1;
                env.push((v.clone(), id));
                let body = Box::new(self.nnf(g, positive, env));
                env.pop();
                if matches!(f, Formula::ForAll(..)) == positive {
                    Nnf::ForAll(id, body)
                } else {
                    Nnf::Exists(id, body)
                }
            }
        }
    }

    fn skolemize(&mut self, n: Nnf, universals: &mut Vec<usize>) -> Nnf {
        match n {
            Nnf::Lit(_) => n,
            Nnf::And(xs) => Nnf::And(
                xs.into_iter()
                    .map(|x| self.skolemize(x, universals))
                    .collect(),
            ),
            Nnf::Or(xs) => Nnf::Or(
                xs.into_iter()
                    .map(|x| self.skolemize(x, universals))
                    .collect(),
            ),
            Nnf::ForAll(v, body) => {
                universals.push(v);
                let body = self.skolemize(*body, universals);
                universals.pop();
                Nnf::ForAll(v, Box::new(body))
            }
            Nnf::Exists(v, body) => {
                let mut used = BTreeSet::new();
                body.collect_vars(&mut used);
                let deps: Vec<FoTerm> = universals
                    .iter()
                    .filter(|u| used.contains(u))
                    .map(|&u| FoTerm::Var(u))
                    .collect();
                let name = self.names.fresh("sk", |n| &mut n.next_sk);
                self.out.skolem_symbols.insert(name.clone(), deps.len());
                let witness = if deps.is_empty() {
                    FoTerm::Const(name)
                } else {
                    FoTerm::Func(name, deps)
                };
                let body = body.substitute(v, &witness);
                self.skolemize(body, universals)
            }
        }
    }

    fn define(&mut self, clauses: Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
        let mut vars = BTreeSet::new();
        for c in &clauses {
            for l in c {
                l.args.iter().for_each(|a| a.collect_vars(&mut vars));
            }
        }
        self.define_over(clauses, vars)
    }

    /// Name `clauses` by a fresh atom over `vars`; other variables in the
    /// clauses stay universally quantified under the definition.
    fn define_over(
        &mut self,
        clauses: Vec<Vec<Literal>>,
        vars: BTreeSet<usize>,
    ) -> Vec<Vec<Literal>> {
        let name = self.names.fresh("def", |n| &mut n.next_def);
        self.out.definitions.insert(name.clone(), vars.len());
        let def = Literal {
            positive: true,
            predicate: name,
            args: vars.into_iter().map(FoTerm::Var).collect(),
        };
        for mut c in clauses {
            c.push(def.negated());
            self.out.clauses.push(Clause { literals: c });
        }
        vec![vec![def]]
    }

    fn cnf(&mut self, n: Nnf) -> Vec<Vec<Literal>> {
        match n {
            Nnf::Lit(l) => vec![vec![l]],
            Nnf::And(xs) => xs.into_iter().flat_map(|x| self.cnf(x)).collect(),
            Nnf::Or(xs) => {
                let lits = |cs: &Vec<Vec<Literal>>| cs.iter().map(Vec::len).sum::<usize>();
                let several = xs.len() > 1;
                let parts: Vec<_> = xs
                    .into_iter()
                    .map(|x| match x {
                        Nnf::ForAll(..) if several => {
                            let free = x.free_vars();
                            let clauses = self.cnf(x);
                            self.define_over(clauses, free)
                        }
                        x => self.cnf(x),
                    })
                    .collect();
                let budget = 4 * parts.iter().map(lits).sum::<usize>();
                let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                for mut part in parts {
                    let naive = acc.len() * lits(&part) + part.len() * lits(&acc);
                    if acc.len() > 1 && part.len() > 1 && naive > budget {
                        if part.len() >= acc.len() {
                            part = self.define(part);
                        } else {
                            acc = self.define(acc);
                        }
                    }
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for p in &part {
                            let mut c = a.clone();
                            c.extend(p.iter().cloned());
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                acc
            }
            Nnf::ForAll(_, b) | Nnf::Exists(_, b) => self.cnf(*b),
        }
    }
}

fn tidy(mut lits: Vec<Literal>) -> Option<Clause> {
    lits.sort();
    lits.dedup();
    for (i, a) in lits.iter().enumerate() {
        if lits[i + 1..].iter().any(|b| a.complements(b)) {
            return None;
        }
    }
    Some(Clause { literals: lits })
}

/// Convert closed formulas into an equisatisfiable clause set.
pub fn clausify(fs: &[Formula]) -> ClauseSet {
    let mut taken = BTreeSet::new();
    for f in fs {
        taken.extend(f.constants());
        f.for_each_atom(&mut |p, _| {
            taken.insert(p.to_string());
        });
    }
    let mut c = Clausifier {
        next_var: 0,
        names: Names {
            taken,
            next_sk: 0,
            next_def: 0,
        },
        out: ClauseSet::default(),
    };
    for f in fs {
        let nnf = c.nnf(f, true, &mut Vec::new());
        let sk = c.skolemize(nnf, &mut Vec::new());
        let clauses = c.cnf(sk);
        c.out
            .clauses
            .extend(clauses.into_iter().map(|l| Clause { literals: l }));
    }
    let mut out = c.out;
    out.clauses = std::mem::take(&mut out.clauses)
        .into_iter()
        .filter_map(|cl| tidy(cl.literals))
        .collect();
    out
}
