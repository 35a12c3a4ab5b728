//! DPLL over ground clauses: two-watched-literal unit propagation, pure
//! literal elimination at every decision point, chronological backtracking.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use super::ground::{GroundAtom, GroundClause};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Satisfiable(BTreeMap<GroundAtom, bool>),
    Unsatisfiable,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Satisfiable(_))
    }
}

type Lit = u32;

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

struct Decision {
    trail_len: usize,
    lit: Lit,
    flippable: bool,
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    trail: Vec<Lit>,
    qhead: usize,
    decisions: Vec<Decision>,
}

impl Solver {
    fn value(&self, l: Lit) -> Option<bool> {
        self.assign[var(l)].map(|v| v ^ (l & 1 == 1))
    }

    fn enqueue(&mut self, l: Lit) -> bool {
        match self.value(l) {
            Some(v) => v,
            None => {
                self.assign[var(l)] = Some(l & 1 == 0);
                self.trail.push(l);
                true
            }
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let watching = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = false;
            let mut iter = watching.into_iter();
            for ci in iter.by_ref() {
                let c = &mut self.clauses[ci];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.assign[var(first)].map(|v| v ^ (first & 1 == 1)) == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    if self.assign[var(l)].map(|v| v ^ (l & 1 == 1)) != Some(false) {
                        c.swap(1, k);
                        self.watches[c[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(ci);
                if !self.enqueue(first) {
                    conflict = true;
                    break;
                }
            }
            keep.extend(iter);
            self.watches[false_lit as usize] = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        for &l in &self.trail[trail_len..] {
            self.assign[var(l)] = None;
        }
        self.trail.truncate(trail_len);
        self.qhead = trail_len;
    }

    /// Chronological backtrack: flip the most recent untried decision.
    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            self.undo_to(d.trail_len);
            if d.flippable {
                let flipped = neg(d.lit);
                self.decisions.push(Decision {
                    trail_len: d.trail_len,
                    lit: flipped,
                    flippable: false,
                });
                self.enqueue(flipped);
                return true;
            }
        }
        false
    }

    /// Scan clauses not yet satisfied. Returns `None` when every clause is
    /// satisfied, otherwise pure literals (possibly empty) and the most
    /// frequent unassigned literal.
    fn survey(&self) -> Option<(Vec<Lit>, Lit)> {
        let mut counts: HashMap<Lit, usize> = HashMap::new();
        let mut open = false;
        for c in &self.clauses {
            if c.iter().any(|&l| self.value(l) == Some(true)) {
                continue;
            }
            open = true;
            for &l in c {
                if self.value(l).is_none() {
                    *counts.entry(l).or_default() += 1;
                }
            }
        }
        if !open {
            return None;
        }
        let mut pure: Vec<Lit> = counts
            .keys()
            .copied()
            .filter(|&l| !counts.contains_key(&neg(l)))
            .collect();
        pure.sort_unstable();
        let best = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&l, _)| l)
            .expect("an open clause under a conflict-free assignment has an unassigned literal");
        Some((pure, best))
    }
}

/// Decide satisfiability of a ground clause set.
pub fn sat(clauses: &[GroundClause]) -> SatResult {
    sat_with_deadline(clauses, None).expect("no deadline")
}

/// As [`sat`], giving up with `None` once `deadline` has passed.
pub fn sat_with_deadline(clauses: &[GroundClause], deadline: Option<Instant>) -> Option<SatResult> {
    let mut atoms: Vec<GroundAtom> = Vec::new();
    let mut index: HashMap<&GroundAtom, u32> = HashMap::new();
    let mut encoded: Vec<Vec<Lit>> = Vec::with_capacity(clauses.len());
    for c in clauses {
        let mut lits: Vec<Lit> = c
            .iter()
            .map(|l| {
                let v = *index.entry(&l.atom).or_insert_with(|| {
                    atoms.push(l.atom.clone());
                    (atoms.len() - 1) as u32
                });
                (v << 1) | u32::from(!l.positive)
            })
            .collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| var(w[0]) == var(w[1])) {
            continue;
        }
        encoded.push(lits);
    }
    if encoded.iter().any(Vec::is_empty) {
        return Some(SatResult::Unsatisfiable);
    }

    let n = atoms.len();
    let mut s = Solver {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * n],
        assign: vec![None; n],
        trail: Vec::new(),
        qhead: 0,
        decisions: Vec::new(),
    };
    let mut units = Vec::new();
    for c in encoded {
        if c.len() == 1 {
            units.push(c[0]);
        } else {
            let ci = s.clauses.len();
            s.watches[c[0] as usize].push(ci);
            s.watches[c[1] as usize].push(ci);
            s.clauses.push(c);
        }
    }
    for u in units {
        if !s.enqueue(u) {
            return Some(SatResult::Unsatisfiable);
        }
    }
    // Unit clauses are not in the watch lists, so keep them for the final
    // survey through the assignment itself.
    let mut steps: u64 = 0;
    loop {
        if !s.propagate() {
            if !s.backtrack() {
                return Some(SatResult::Unsatisfiable);
            }
            continue;
        }
        steps += 1;
        if steps.is_multiple_of(256) {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return None;
                }
            }
        }
        match s.survey() {
            None => break,
            Some((pure, best)) => {
                let trail_len = s.trail.len();
                if pure.is_empty() {
                    s.decisions.push(Decision {
                        trail_len,
                        lit: best,
                        flippable: true,
                    });
                    s.enqueue(best);
                } else {
                    s.decisions.push(Decision {
                        trail_len,
                        lit: pure[0],
                        flippable: false,
                    });
                    for l in pure {
                        s.enqueue(l);
                    }
                }
            }
        }
    }
    let model = atoms
        .into_iter()
        .enumerate()
        .map(|(i, a)| (a, s.assign[i].unwrap_or(false)))
        .collect();
    Some(SatResult::Satisfiable(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ground::GroundLiteral;

    fn lit(s: &str) -> GroundLiteral {
        let (positive, name) = match s.strip_prefix('-') {
            Some(rest) => (false, rest),
            None => (true, s),
        };
        GroundLiteral {
            positive,
            atom: GroundAtom {
                predicate: name.to_string(),
                args: vec![],
            },
        }
    }

    fn cnf(src: &[&[&str]]) -> Vec<GroundClause> {
        src.iter()
            .map(|c| c.iter().map(|l| lit(l)).collect())
            .collect()
    }

    fn satisfies(model: &BTreeMap<GroundAtom, bool>, clauses: &[GroundClause]) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|l| model[&l.atom] == l.positive))
    }

    #[test]
    fn contradiction() {
        assert_eq!(sat(&cnf(&[&["p"], &["-p"]])), SatResult::Unsatisfiable);
    }

    #[test]
    fn simple_disjunction() {
        let c = cnf(&[&["p", "q"]]);
        match sat(&c) {
            SatResult::Satisfiable(m) => {
                assert_eq!(m.len(), 2);
                assert!(satisfies(&m, &c));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn modus_ponens_refutation() {
        let c = cnf(&[&["pet"], &["-pet", "animal"], &["-animal"]]);
        assert_eq!(sat(&c), SatResult::Unsatisfiable);
    }

    #[test]
    fn empty_clause_set_is_sat() {
        assert!(sat(&[]).is_sat());
        assert_eq!(sat(&[vec![]]), SatResult::Unsatisfiable);
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p_ij: pigeon i in hole j
        let mut c: Vec<Vec<String>> = Vec::new();
        for i in 0..3 {
            c.push((0..2).map(|j| format!("p{i}{j}")).collect());
        }
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    c.push(vec![format!("-p{a}{j}"), format!("-p{b}{j}")]);
                }
            }
        }
        let clauses: Vec<GroundClause> = c
            .iter()
            .map(|cl| cl.iter().map(|l| lit(l)).collect())
            .collect();
        assert_eq!(sat(&clauses), SatResult::Unsatisfiable);
    }

    #[test]
    fn agrees_with_truth_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let names = ["a", "b", "c", "d", "e"];
        for _ in 0..400 {
            let n_clauses = rng.gen_range(1..12);
            let clauses: Vec<GroundClause> = (0..n_clauses)
                .map(|_| {
                    (0..rng.gen_range(1..4))
                        .map(|_| {
                            let n = names[rng.gen_range(0..names.len())];
                            if rng.gen_bool(0.5) {
                                lit(n)
                            } else {
                                lit(&format!("-{n}"))
                            }
                        })
                        .collect()
                })
                .collect();
            let brute = (0u32..32).any(|bits| {
                clauses.iter().all(|c| {
                    c.iter().any(|l| {
                        let i = names.iter().position(|n| *n == l.atom.predicate).unwrap();
                        ((bits >> i) & 1 == 1) == l.positive
                    })
                })
            });
            match sat(&clauses) {
                SatResult::Satisfiable(m) => {
                    assert!(brute);
                    assert!(satisfies(&m, &clauses));
                }
                SatResult::Unsatisfiable => assert!(!brute),
            }
        }
    }
}
