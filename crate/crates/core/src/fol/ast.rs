use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }
}

/// First-order formula over predicates, constants and bound variables.
///
/// There are no function symbols and no equality: the surface language only
/// admits what the verification engine can decide.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// The binary connectives, used where code treats them uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

impl Formula {
    pub fn atom<S: Into<String>>(predicate: S, args: Vec<Term>) -> Self {
        Formula::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Ground atom over constant names, e.g. `Formula::fact("pet", &["leo"])`.
    pub fn fact(predicate: &str, constants: &[&str]) -> Self {
        Formula::atom(
            predicate,
            constants.iter().map(|c| Term::constant(*c)).collect(),
        )
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Self {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn binary(op: Connective, a: Formula, b: Formula) -> Self {
        match op {
            Connective::And => Formula::and(a, b),
            Connective::Or => Formula::or(a, b),
            Connective::Implies => Formula::implies(a, b),
            Connective::Iff => Formula::iff(a, b),
            Connective::Xor => Formula::xor(a, b),
        }
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjoin<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn as_binary(&self) -> Option<(Connective, &Formula, &Formula)> {
        match self {
            Formula::And(a, b) => Some((Connective::And, a, b)),
            Formula::Or(a, b) => Some((Connective::Or, a, b)),
            Formula::Implies(a, b) => Some((Connective::Implies, a, b)),
            Formula::Iff(a, b) => Some((Connective::Iff, a, b)),
            Formula::Xor(a, b) => Some((Connective::Xor, a, b)),
            _ => None,
        }
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(self, Formula::ForAll(..) | Formula::Exists(..))
    }

    /// Nesting depth; an atom has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            _ => {
                let (_, a, b) = self.as_binary().expect("binary");
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            _ => {
                let (_, a, b) = self.as_binary().expect("binary");
                1 + a.size() + b.size()
            }
        }
    }

    /// True when Xor or Iff occurs anywhere in the tree.
    pub fn has_derived_connectives(&self) -> bool {
        match self {
            Formula::Atom { .. } => false,
            Formula::Iff(..) | Formula::Xor(..) => true,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => {
                f.has_derived_connectives()
            }
            _ => {
                let (_, a, b) = self.as_binary().expect("binary");
                a.has_derived_connectives() || b.has_derived_connectives()
            }
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Visit every atom in the formula, left to right.
    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Atom { predicate, args } => visit(predicate, args),
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => {
                f.for_each_atom(visit)
            }
            _ => {
                let (_, a, b) = self.as_binary().expect("binary");
                a.for_each_atom(visit);
                b.for_each_atom(visit);
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |_, args| {
            for t in args {
                if let Term::Constant(c) = t {
                    out.insert(c.clone());
                }
            }
        });
        out
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { args, .. } => {
            for t in args {
                if let Term::Variable(v) = t {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.clone());
                    }
                }
            }
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::ForAll(v, g) | Formula::Exists(v, g) => {
            bound.push(v.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
        _ => {
            let (_, a, b) = f.as_binary().expect("binary");
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
    }
}
