use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Formula, Term};
use super::FolError;

/// Predicate arities and constant names of a problem, in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty() && self.constants.is_empty()
    }

    fn add(&mut self, f: &Formula) -> Result<(), FolError> {
        let mut err = None;
        f.for_each_atom(&mut |pred, args| {
            if err.is_some() {
                return;
            }
            match self.predicates.get(pred) {
                Some(&n) if n != args.len() => {
                    err = Some(FolError::ArityMismatch {
                        predicate: pred.to_string(),
                        expected: n,
                        found: args.len(),
                    });
                }
                Some(_) => {}
                None => {
                    self.predicates.insert(pred.to_string(), args.len());
                }
            }
            for t in args {
                if let Term::Constant(c) = t {
                    self.constants.insert(c.clone());
                }
            }
        });
        err.map_or(Ok(()), Err)
    }
}

pub fn signature_of<'a, I>(fs: I) -> Result<Signature, FolError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut sig = Signature::default();
    for f in fs {
        sig.add(f)?;
    }
    Ok(sig)
}
