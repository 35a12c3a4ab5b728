//! Test support: seeded formula generators, a brute-force model-enumeration
//! oracle, and a strict checker for the FOF subset of the TPTP syntax.
#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use chainprover::fol::{Formula, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct GenOpts {
    pub constants: Vec<&'static str>,
    pub predicates: Vec<(&'static str, usize)>,
    /// Maximum nesting depth; an atom has depth 1.
    pub max_depth: usize,
    pub quantifiers: bool,
    pub iff_xor: bool,
}

impl Default for GenOpts {
    fn default() -> Self {
        GenOpts {
            constants: vec!["a", "b", "c"],
            predicates: vec![("p", 1), ("q", 1), ("r", 2), ("s", 1)],
            max_depth: 4,
            quantifiers: true,
            iff_xor: true,
        }
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

/// A random closed formula of depth at most `opts.max_depth`.
pub fn gen_formula(rng: &mut impl Rng, opts: &GenOpts) -> Formula {
    let depth = rng.gen_range(1..=opts.max_depth.max(1));
    go(rng, opts, depth, &mut Vec::new())
}

fn go(rng: &mut impl Rng, opts: &GenOpts, depth: usize, scope: &mut Vec<&'static str>) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return gen_atom(rng, opts, scope);
    }
    let free: Vec<&'static str> = VARS
        .iter()
        .copied()
        .filter(|v| !scope.contains(v))
        .collect();
    let choice = rng.gen_range(
        0..if opts.quantifiers && !free.is_empty() {
            10
        } else {
            7
        },
    );
    match choice {
        0 => Formula::not(go(rng, opts, depth - 1, scope)),
        1..=6 => {
            let ops: &[fn(Formula, Formula) -> Formula] = if opts.iff_xor {
                &[
                    Formula::and,
                    Formula::or,
                    Formula::implies,
                    Formula::iff,
                    Formula::xor,
                ]
            } else {
                &[Formula::and, Formula::or, Formula::implies]
            };
            let op = ops[rng.gen_range(0..ops.len())];
            let a = go(rng, opts, depth - 1, scope);
            let b = go(rng, opts, depth - 1, scope);
            op(a, b)
        }
        _ => {
            let v = free[rng.gen_range(0..free.len())];
            scope.push(v);
            let body = go(rng, opts, depth - 1, scope);
            scope.pop();
            if rng.gen_bool(0.5) {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
    }
}

fn gen_atom(rng: &mut impl Rng, opts: &GenOpts, scope: &[&'static str]) -> Formula {
    let (p, arity) = opts.predicates[rng.gen_range(0..opts.predicates.len())];
    let args = (0..arity)
        .map(|_| {
            if !scope.is_empty() && rng.gen_bool(0.6) {
                Term::variable(*scope.choose(rng).expect("non-empty"))
            } else {
                Term::constant(*opts.constants.choose(rng).expect("constants"))
            }
        })
        .collect();
    Formula::atom(p, args)
}

/// Random entailment problem shaped like the oracle corpus: up to 3
/// constants, up to 4 predicates of arity at most 2, up to 6 axioms of
/// depth at most 4. Only problems that stay function-free after
/// Skolemization are returned.
pub fn gen_problem(rng: &mut impl Rng) -> (Vec<Formula>, Formula) {
    loop {
        let n_consts = rng.gen_range(1..=3);
        let mut preds = vec![("p", 1), ("q", 1), ("r", 2), ("s", 1)];
        preds.shuffle(rng);
        preds.truncate(rng.gen_range(1..=4));
        let opts = GenOpts {
            constants: ["a", "b", "c"][..n_consts].to_vec(),
            predicates: preds,
            max_depth: 4,
            quantifiers: true,
            iff_xor: true,
        };
        let n_axioms = rng.gen_range(0..=6);
        let axioms: Vec<Formula> = (0..n_axioms).map(|_| gen_formula(rng, &opts)).collect();
        let conj = if !axioms.is_empty() && rng.gen_bool(0.3) {
            // a weakening of an axiom makes entailed cases common
            let a = axioms.choose(rng).expect("non-empty").clone();
            Formula::or(
                a,
                gen_formula(
                    rng,
                    &GenOpts {
                        max_depth: 2,
                        ..opts.clone()
                    },
                ),
            )
        } else {
            gen_formula(
                rng,
                &GenOpts {
                    max_depth: 3,
                    ..opts.clone()
                },
            )
        };
        let mut all = axioms.clone();
        all.push(Formula::not(conj.clone()));
        if skolem_constant_count(&all).is_some() {
            return (axioms, conj);
        }
    }
}

/// Number of Skolem constants the formulas need, or `None` when some
/// existential sits under a universal (which would need a Skolem function).
pub fn skolem_constant_count(fs: &[Formula]) -> Option<usize> {
    let mut n = 0;
    for f in fs {
        if !effective_exists(f, true, false, &mut n) {
            return None;
        }
    }
    Some(n)
}

fn effective_exists(f: &Formula, positive: bool, under_all: bool, n: &mut usize) -> bool {
    match f {
        Formula::Atom { .. } => true,
        Formula::Not(g) => effective_exists(g, !positive, under_all, n),
        Formula::And(a, b) | Formula::Or(a, b) => {
            effective_exists(a, positive, under_all, n)
                && effective_exists(b, positive, under_all, n)
        }
        Formula::Implies(a, b) => {
            effective_exists(a, !positive, under_all, n)
                && effective_exists(b, positive, under_all, n)
        }
        Formula::Iff(a, b) | Formula::Xor(a, b) => [a, b].iter().all(|g| {
            effective_exists(g, true, under_all, n) && effective_exists(g, false, under_all, n)
        }),
        Formula::ForAll(_, g) | Formula::Exists(_, g) => {
            let existential = matches!(f, Formula::Exists(..)) == positive;
            if existential {
                if under_all {
                    return false;
                }
                *n += 1;
                effective_exists(g, positive, under_all, n)
            } else {
                effective_exists(g, positive, true, n)
            }
        }
    }
}

pub fn constants_of(fs: &[Formula]) -> BTreeSet<String> {
    fn walk(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom { args, .. } => {
                for t in args {
                    if let Term::Constant(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
            Formula::Not(g) | Formula::ForAll(_, g) | Formula::Exists(_, g) => walk(g, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Xor(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for f in fs {
        walk(f, &mut out);
    }
    out
}

pub fn predicates_of(fs: &[Formula]) -> BTreeMap<String, usize> {
    fn walk(f: &Formula, out: &mut BTreeMap<String, usize>) {
        match f {
            Formula::Atom { predicate, args } => {
                out.insert(predicate.clone(), args.len());
            }
            Formula::Not(g) | Formula::ForAll(_, g) | Formula::Exists(_, g) => walk(g, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Xor(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    for f in fs {
        walk(f, &mut out);
    }
    out
}

/// A partial interpretation over `0..size`; constants name the first
/// elements in sorted order.
pub struct Interpretation {
    pub size: usize,
    pub constants: BTreeMap<String, usize>,
    pub atoms: HashMap<(String, Vec<usize>), bool>,
    /// Unassigned atoms read by `eval`.
    missing: RefCell<BTreeSet<(String, Vec<usize>)>>,
}

impl Interpretation {
    /// Kleene three-valued evaluation; `None` when unassigned atoms decide.
    pub fn eval(&self, f: &Formula) -> Option<bool> {
        self.eval_in(f, &mut Vec::new())
    }

    fn eval_in<'a>(&self, f: &'a Formula, env: &mut Vec<(&'a str, usize)>) -> Option<bool> {
        match f {
            Formula::Atom { predicate, args } => {
                let tuple = args
                    .iter()
                    .map(|t| match t {
                        Term::Constant(c) => self.constants[c],
                        Term::Variable(v) => {
                            env.iter()
                                .rev()
                                .find(|(n, _)| n == v)
                                .expect("bound variable")
                                .1
                        }
                    })
                    .collect();
                let key = (predicate.clone(), tuple);
                let v = self.atoms.get(&key).copied();
                if v.is_none() {
                    self.missing.borrow_mut().insert(key);
                }
                v
            }
            Formula::Not(g) => self.eval_in(g, env).map(|b| !b),
            Formula::And(a, b) => kleene_and(self.eval_in(a, env), self.eval_in(b, env)),
            Formula::Or(a, b) => kleene_or(self.eval_in(a, env), self.eval_in(b, env)),
            Formula::Implies(a, b) => {
                kleene_or(self.eval_in(a, env).map(|x| !x), self.eval_in(b, env))
            }
            Formula::Iff(a, b) => Some(self.eval_in(a, env)? == self.eval_in(b, env)?),
            Formula::Xor(a, b) => Some(self.eval_in(a, env)? != self.eval_in(b, env)?),
            Formula::ForAll(v, g) | Formula::Exists(v, g) => {
                let universal = matches!(f, Formula::ForAll(..));
                let mut unknown = false;
                for d in 0..self.size {
                    env.push((v, d));
                    let r = self.eval_in(g, env);
                    env.pop();
                    match r {
                        Some(b) if b != universal => return Some(b),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(universal)
                }
            }
        }
    }
}

fn kleene_and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn kleene_or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn ground_atoms(preds: &BTreeMap<String, usize>, size: usize) -> Vec<(String, Vec<usize>)> {
    let mut out = Vec::new();
    for (p, &arity) in preds {
        let mut tuple = vec![0; arity];
        loop {
            out.push((p.clone(), tuple.clone()));
            let mut i = 0;
            while i < arity {
                tuple[i] += 1;
                if tuple[i] < size {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if i == arity {
                break;
            }
        }
    }
    out
}

fn interpretation(fs: &[Formula], extra: usize) -> (Interpretation, Vec<(String, Vec<usize>)>) {
    let consts = constants_of(fs);
    let size = (consts.len() + extra).max(1);
    let interp = Interpretation {
        size,
        constants: consts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect(),
        atoms: HashMap::new(),
        missing: RefCell::new(BTreeSet::new()),
    };
    let atoms = ground_atoms(&predicates_of(fs), size);
    (interp, atoms)
}

/// Whether the closed formulas have a model. Exact for sets that need no
/// Skolem functions: such a set is satisfiable iff it has a model whose
/// domain is its constants plus one element per effective existential.
/// Branches only on atoms that undecided formulas actually read.
pub fn satisfiable(fs: &[Formula]) -> bool {
    let extra = skolem_constant_count(fs).expect("oracle needs a function-free Skolem form");
    let (mut interp, _) = interpretation(fs, extra);
    search(fs, &mut interp)
}

fn search(fs: &[Formula], interp: &mut Interpretation) -> bool {
    // branch inside the undecided formula with the fewest open atoms
    let mut branch: Option<BTreeSet<(String, Vec<usize>)>> = None;
    for f in fs {
        interp.missing.borrow_mut().clear();
        match interp.eval(f) {
            Some(false) => return false,
            None => {
                let open = interp.missing.take();
                if branch.as_ref().is_none_or(|b| open.len() < b.len()) {
                    branch = Some(open);
                }
            }
            Some(true) => {}
        }
    }
    let Some(atom) = branch.and_then(|b| b.into_iter().next()) else {
        return true;
    };
    for v in [true, false] {
        interp.atoms.insert(atom.clone(), v);
        if search(fs, interp) {
            interp.atoms.remove(&atom);
            return true;
        }
    }
    interp.atoms.remove(&atom);
    false
}

pub fn entails(axioms: &[Formula], conj: &Formula) -> bool {
    let mut fs = axioms.to_vec();
    fs.push(Formula::not(conj.clone()));
    !satisfiable(&fs)
}

pub fn equivalent(f: &Formula, g: &Formula) -> bool {
    entails(std::slice::from_ref(f), g) && entails(std::slice::from_ref(g), f)
}

/// Truth value of `f` in every total interpretation over its constants.
pub fn truth_table(f: &Formula, preds: &BTreeMap<String, usize>) -> Vec<bool> {
    let (mut interp, _) = interpretation(std::slice::from_ref(f), 0);
    let atoms = ground_atoms(preds, interp.size);
    assert!(atoms.len() <= 16, "truth table too large");
    (0..1u32 << atoms.len())
        .map(|bits| {
            for (i, a) in atoms.iter().enumerate() {
                interp.atoms.insert(a.clone(), bits >> i & 1 == 1);
            }
            interp.eval(f).expect("total interpretation")
        })
        .collect()
}

/// Check a TPTP document against the FOF grammar: annotated formulas
/// `fof(name, role, formula).`, binary non-associative connectives only
/// between unitary formulas, associative chains of one connective, closed
/// formulas and uppercase variables.
pub fn check_tptp(doc: &str) -> Result<usize, String> {
    let toks = tptp_tokens(doc)?;
    let mut p = TptpChecker {
        toks,
        pos: 0,
        bound: Vec::new(),
    };
    let mut n = 0;
    while p.pos < p.toks.len() {
        p.annotated()?;
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Int,
    Sym(&'static str),
}

fn tptp_tokens(doc: &str) -> Result<Vec<Tok>, String> {
    const SYMS: [&str; 16] = [
        "<=>", "<~>", "=>", "<=", "~|", "~&", "(", ")", "[", "]", ",", ".", ":", "!", "?", "~",
    ];
    let mut out = Vec::new();
    let mut rest = doc;
    'outer: while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '%' {
            rest = rest.find('\n').map_or("", |i| &rest[i..]);
            continue;
        }
        for s in SYMS.iter().chain(&["&", "|"]) {
            if let Some(r) = rest.strip_prefix(s) {
                out.push(Tok::Sym(s));
                rest = r;
                continue 'outer;
            }
        }
        let word_len = |s: &str| {
            s.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(s.len())
        };
        if c.is_ascii_lowercase() {
            let n = word_len(rest);
            out.push(Tok::Lower(rest[..n].to_string()));
            rest = &rest[n..];
        } else if c.is_ascii_uppercase() {
            let n = word_len(rest);
            out.push(Tok::Upper(rest[..n].to_string()));
            rest = &rest[n..];
        } else if c == '$' {
            let n = 1 + word_len(&rest[1..]);
            out.push(Tok::Dollar(rest[..n].to_string()));
            rest = &rest[n..];
        } else if c.is_ascii_digit() {
            let n = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            out.push(Tok::Int);
            rest = &rest[n..];
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct TptpChecker {
    toks: Vec<Tok>,
    pos: usize,
    bound: Vec<String>,
}

const ROLES: [&str; 12] = [
    "axiom",
    "hypothesis",
    "definition",
    "assumption",
    "lemma",
    "theorem",
    "corollary",
    "conjecture",
    "negated_conjecture",
    "plain",
    "type",
    "unknown",
];

impl TptpChecker {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, String> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(t)
    }

    fn sym(&mut self, s: &str) -> Result<(), String> {
        match self.next()? {
            Tok::Sym(x) if x == s => Ok(()),
            t => Err(format!("expected `{s}`, found {t:?}")),
        }
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn annotated(&mut self) -> Result<(), String> {
        match self.next()? {
            Tok::Lower(w) if w == "fof" => {}
            t => return Err(format!("expected `fof`, found {t:?}")),
        }
        self.sym("(")?;
        match self.next()? {
            Tok::Lower(_) | Tok::Int => {}
            t => return Err(format!("bad formula name {t:?}")),
        }
        self.sym(",")?;
        match self.next()? {
            Tok::Lower(r) if ROLES.contains(&r.as_str()) => {}
            t => return Err(format!("bad role {t:?}")),
        }
        self.sym(",")?;
        self.logic()?;
        self.sym(")")?;
        self.sym(".")
    }

    fn logic(&mut self) -> Result<(), String> {
        self.unitary()?;
        for op in ["<=>", "=>", "<=", "<~>", "~|", "~&"] {
            if self.at_sym(op) {
                self.pos += 1;
                return self.unitary();
            }
        }
        for op in ["&", "|"] {
            if self.at_sym(op) {
                while self.at_sym(op) {
                    self.pos += 1;
                    self.unitary()?;
                }
                let other = if op == "&" { "|" } else { "&" };
                if self.at_sym(other) {
                    return Err(format!("`{op}` and `{other}` mixed without parentheses"));
                }
                return Ok(());
            }
        }
        Ok(())
    }

    fn unitary(&mut self) -> Result<(), String> {
        match self.next()? {
            Tok::Sym("!") | Tok::Sym("?") => {
                self.sym("[")?;
                let mark = self.bound.len();
                loop {
                    match self.next()? {
                        Tok::Upper(v) => self.bound.push(v),
                        t => return Err(format!("expected variable, found {t:?}")),
                    }
                    if self.at_sym(",") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.sym("]")?;
                self.sym(":")?;
                self.unitary()?;
                self.bound.truncate(mark);
                Ok(())
            }
            Tok::Sym("~") => self.unitary(),
            Tok::Sym("(") => {
                self.logic()?;
                self.sym(")")
            }
            Tok::Dollar(d) if d == "$true" || d == "$false" => Ok(()),
            Tok::Lower(_) => self.args(),
            t => Err(format!("expected a unitary formula, found {t:?}")),
        }
    }

    fn args(&mut self) -> Result<(), String> {
        if !self.at_sym("(") {
            return Ok(());
        }
        self.pos += 1;
        loop {
            self.term()?;
            if self.at_sym(",") {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.sym(")")
    }

    fn term(&mut self) -> Result<(), String> {
        match self.next()? {
            Tok::Upper(v) if self.bound.contains(&v) => Ok(()),
            Tok::Upper(v) => Err(format!("free variable `{v}`")),
            Tok::Lower(_) => self.args(),
            t => Err(format!("expected a term, found {t:?}")),
        }
    }
}

/// Random instance with consistent premises, a conclusion decided by them
/// (label set from the oracle) and a mix of entailed, refuted and
/// independent steps.
pub fn gen_instance(rng: &mut impl Rng, id: &str) -> chainprover::verifier::Instance {
    loop {
        let (premises, conj) = gen_problem(rng);
        let mut both = premises.clone();
        both.push(conj.clone());
        if premises.is_empty() || skolem_constant_count(&both).is_none() || !satisfiable(&premises)
        {
            continue;
        }
        let negated = Formula::not(conj.clone());
        let (conclusion, label) = if entails(&premises, &conj) {
            (conj, true)
        } else if entails(&premises, &negated) {
            (conj, false)
        } else if rng.gen_bool(0.5) {
            (premises[0].clone(), true)
        } else {
            (Formula::not(premises[0].clone()), false)
        };
        let mut constants: Vec<&'static str> =
            constants_of(&premises).iter().map(|c| leak(c)).collect();
        if constants.is_empty() {
            constants.push("a");
        }
        let opts = GenOpts {
            constants,
            predicates: predicates_of(&premises)
                .into_iter()
                .map(|(p, a)| (leak(&p), a))
                .collect(),
            max_depth: 3,
            ..GenOpts::default()
        };
        let n_steps = rng.gen_range(0..=5);
        let steps: Vec<Formula> = (0..n_steps)
            .map(|_| {
                let premise = premises.choose(rng).expect("non-empty").clone();
                let step = match rng.gen_range(0..6) {
                    0 => premise.clone(),
                    1 => Formula::or(premise.clone(), gen_formula(rng, &opts)),
                    2 => Formula::not(premise.clone()),
                    3 => conclusion.clone(),
                    _ => gen_formula(rng, &opts),
                };
                let mut check = premises.clone();
                check.push(step.clone());
                check.push(Formula::not(step.clone()));
                if skolem_constant_count(&check).is_some() {
                    step
                } else {
                    premise
                }
            })
            .collect();
        let answer = if rng.gen_bool(0.8) { label } else { !label };
        if let Ok(inst) =
            chainprover::verifier::Instance::new(id, premises, conclusion, label, steps, answer)
        {
            return inst;
        }
    }
}

fn leak(s: &str) -> &'static str {
    Box::leak(s.to_string().into_boxed_str())
}

/// A pair of closed formulas over one signature, equivalent about half the
/// time, whose mutual entailment queries stay function-free.
pub fn gen_equiv_pair(rng: &mut impl Rng) -> (Formula, Formula) {
    let opts = GenOpts {
        constants: vec!["a", "b"],
        predicates: vec![("p", 1), ("q", 1), ("r", 2)],
        max_depth: 3,
        ..GenOpts::default()
    };
    loop {
        let f = gen_formula(rng, &opts);
        let g = match rng.gen_range(0..6) {
            0 => chainprover::fol::normalize(&f).expect("generated formulas normalize"),
            1 => Formula::not(Formula::not(f.clone())),
            2 => match &f {
                Formula::And(a, b) => Formula::and((**b).clone(), (**a).clone()),
                Formula::Or(a, b) => Formula::or((**b).clone(), (**a).clone()),
                Formula::Implies(a, b) => Formula::or(Formula::not((**a).clone()), (**b).clone()),
                other => Formula::and(other.clone(), other.clone()),
            },
            3 => Formula::or(f.clone(), gen_formula(rng, &opts)),
            _ => gen_formula(rng, &opts),
        };
        let fwd = [f.clone(), Formula::not(g.clone())];
        let bwd = [g.clone(), Formula::not(f.clone())];
        if skolem_constant_count(&fwd).is_some() && skolem_constant_count(&bwd).is_some() {
            return (f, g);
        }
    }
}
