use std::collections::BTreeMap;

use super::ast::{Formula, Term};
use super::FolError;

/// Mapping from source names to their folded forms, kept so reports can be
/// traced back to the original predicate and constant spellings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    pub predicates: BTreeMap<String, String>,
    pub constants: BTreeMap<String, String>,
}

fn transliterate(c: char) -> Option<&'static str> {
    Some(match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'À' | 'Á' | 'Â' | 'Ã' | 'Ä' | 'Å' => "a",
        'æ' | 'Æ' => "ae",
        'ç' | 'Ç' => "c",
        'è' | 'é' | 'ê' | 'ë' | 'È' | 'É' | 'Ê' | 'Ë' => "e",
        'ì' | 'í' | 'î' | 'ï' | 'Ì' | 'Í' | 'Î' | 'Ï' => "i",
        'ñ' | 'Ñ' => "n",
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' | 'Ò' | 'Ó' | 'Ô' | 'Õ' | 'Ö' | 'Ø' => "o",
        'œ' | 'Œ' => "oe",
        'ß' => "ss",
        'ù' | 'ú' | 'û' | 'ü' | 'Ù' | 'Ú' | 'Û' | 'Ü' => "u",
        'ý' | 'ÿ' | 'Ý' => "y",
        _ => return None,
    })
}

/// Fold a predicate or constant name to a TPTP `lower_word`.
pub fn fold_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if c == '_' {
            out.push('_');
        } else if let Some(t) = transliterate(c) {
            out.push_str(t);
        } else {
            out.push('_');
        }
    }
    if !out.starts_with(|c: char| c.is_ascii_lowercase()) {
        out.insert(0, 'n');
    }
    out
}

#[derive(Default)]
struct Folder {
    map: NameMap,
    pred_targets: BTreeMap<String, String>,
    const_targets: BTreeMap<String, String>,
}

fn fold_into(
    name: &str,
    forward: &mut BTreeMap<String, String>,
    targets: &mut BTreeMap<String, String>,
) -> Result<String, FolError> {
    if let Some(t) = forward.get(name) {
        return Ok(t.clone());
    }
    let target = fold_name(name);
    if let Some(prev) = targets.get(&target) {
        if prev != name {
            let (first, second) = if prev.as_str() < name {
                (prev.clone(), name.to_string())
            } else {
                (name.to_string(), prev.clone())
            };
            return Err(FolError::NameCollision {
                first,
                second,
                target,
            });
        }
    }
    targets.insert(target.clone(), name.to_string());
    forward.insert(name.to_string(), target.clone());
    Ok(target)
}

impl Folder {
    fn formula(&mut self, f: &Formula) -> Result<Formula, FolError> {
        Ok(match f {
            Formula::Atom { predicate, args } => {
                let predicate =
                    fold_into(predicate, &mut self.map.predicates, &mut self.pred_targets)?;
                let args = args
                    .iter()
                    .map(|t| match t {
                        Term::Variable(v) => Ok(Term::Variable(v.clone())),
                        Term::Constant(c) => Ok(Term::Constant(fold_into(
                            c,
                            &mut self.map.constants,
                            &mut self.const_targets,
                        )?)),
                    })
                    .collect::<Result<_, FolError>>()?;
                Formula::Atom { predicate, args }
            }
            Formula::Not(g) => Formula::not(self.formula(g)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            Formula::Iff(a, b) => {
                let (a, b) = (self.formula(a)?, self.formula(b)?);
                Formula::and(
                    Formula::implies(a.clone(), b.clone()),
                    Formula::implies(b, a),
                )
            }
            Formula::Xor(a, b) => {
                let (a, b) = (self.formula(a)?, self.formula(b)?);
                Formula::or(
                    Formula::and(Formula::not(a.clone()), b.clone()),
                    Formula::and(a, Formula::not(b)),
                )
            }
            Formula::ForAll(v, g) => Formula::forall(v.clone(), self.formula(g)?),
            Formula::Exists(v, g) => Formula::exists(v.clone(), self.formula(g)?),
        })
    }
}

/// Normalize a set of formulas that belong to one problem. Names are folded
/// with a single shared map, so `Pet` in one formula and `pet` in another
/// resolve to the same symbol while `Pet` and `PET` never coexist.
pub fn normalize_all(fs: &[Formula]) -> Result<(Vec<Formula>, NameMap), FolError> {
    let mut folder = Folder::default();
    let out = fs
        .iter()
        .map(|f| folder.formula(f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((out, folder.map))
}

/// Eliminate `⊕`/`↔` and fold names to lowercase ASCII.
pub fn normalize(f: &Formula) -> Result<Formula, FolError> {
    let (mut out, _) = normalize_all(std::slice::from_ref(f))?;
    Ok(out.pop().expect("one formula in, one out"))
}
