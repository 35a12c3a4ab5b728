use chainprover::mutator::{
    mutate, mutate_with_labels, synthesize_gold, GoldChain, MutationKind, MutationSpec,
    NotMutableError,
};
use chainprover::verifier::{Category, TriLabel, Verifier};

const KINDS: [MutationKind; 3] = [MutationKind::T2, MutationKind::T3, MutationKind::T4];

#[test]
fn constructed_labels_match_verifier() {
    let v = Verifier::default();
    for seed in 0..200u64 {
        for depth in 2..=4 {
            let gold = synthesize_gold(depth, seed).unwrap();
            let r = v.verify_instance(&gold.instance);
            assert_eq!(r.category, Category::T1, "gold d{depth} s{seed}");
            assert!(r.step_labels.iter().all(|l| *l == TriLabel::True));
            for kind in KINDS {
                let spec = MutationSpec {
                    kind,
                    rng_seed: seed ^ 0x5eed,
                };
                let (inst, labels, category) = mutate_with_labels(&gold, spec).unwrap();
                let r = v.verify_instance(&inst);
                assert_eq!(r.category, category, "{kind} d{depth} s{seed}");
                assert_eq!(r.step_labels, labels, "{kind} d{depth} s{seed}");
                assert_eq!(inst.premises, gold.instance.premises);
                assert_eq!(inst.conclusion, gold.instance.conclusion);
                let text = inst.source_text.as_ref().unwrap();
                assert_eq!(text.steps.len(), inst.steps.len());
            }
        }
    }
}

#[test]
fn mutation_is_a_function_of_its_inputs() {
    for seed in 0..50u64 {
        let a = synthesize_gold(3, seed).unwrap();
        assert_eq!(a, synthesize_gold(3, seed).unwrap());
        for kind in KINDS {
            let spec = MutationSpec {
                kind,
                rng_seed: seed,
            };
            assert_eq!(mutate_with_labels(&a, spec), mutate_with_labels(&a, spec));
        }
    }
    let g = synthesize_gold(4, 1).unwrap();
    let outs: std::collections::BTreeSet<String> = (0..20)
        .map(|s| {
            let i = mutate(
                &g,
                MutationSpec {
                    kind: MutationKind::T2,
                    rng_seed: s,
                },
            )
            .unwrap();
            format!("{:?}", i.steps)
        })
        .collect();
    assert!(
        outs.len() > 1,
        "different seeds should give different mutations"
    );
}

#[test]
fn mutation_shapes() {
    let g = synthesize_gold(4, 7).unwrap();
    let m = g.instance.steps.len();
    for seed in 0..40 {
        let (t2, labels, _) = mutate_with_labels(
            &g,
            MutationSpec {
                kind: MutationKind::T2,
                rng_seed: seed,
            },
        )
        .unwrap();
        assert_eq!(t2.steps.len(), m + 1);
        assert_eq!(labels.iter().filter(|l| **l == TriLabel::False).count(), 1);
        let (t3, labels, _) = mutate_with_labels(
            &g,
            MutationSpec {
                kind: MutationKind::T3,
                rng_seed: seed,
            },
        )
        .unwrap();
        assert!(t3.steps.len() <= m);
        assert!(labels.iter().all(|l| *l == TriLabel::True));
        assert!(!t3.steps.contains(&g.instance.conclusion));
    }
}

#[test]
fn imported_chains_must_be_gold() {
    let v = Verifier::default();
    let g = synthesize_gold(2, 0).unwrap();
    let again = GoldChain::imported(g.instance.clone(), g.off_path_premises.clone(), &v).unwrap();
    assert_eq!(again.instance, g.instance);
    let (bad, _, _) = mutate_with_labels(
        &g,
        MutationSpec {
            kind: MutationKind::T2,
            rng_seed: 0,
        },
    )
    .unwrap();
    assert_eq!(
        GoldChain::imported(bad, vec![], &v),
        Err(NotMutableError::NotGold(Category::T2))
    );
}
