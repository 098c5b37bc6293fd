use proptest::prelude::*;
use qmfiber::harness::format::{emit_instance, parse_instance, Instance};
use qmfiber::harness::generate::{generate, GenKind, GenParams, Generated};
use qmfiber::poset::Side;
use qmfiber::reduction::{reduction_schedule, verify_main_bound, Verdict};
use qmfiber::{ExtNat, Prime};

fn instance(g: Generated) -> Instance {
    match g {
        Generated::Diagram(x) => Instance::Diagram(x),
        Generated::Map(f) => Instance::Map(f),
    }
}

fn map(kind: GenKind, seed: u64, params: GenParams) -> qmfiber::persistence::PersistencePosetMap {
    match generate(kind, seed, params).unwrap() {
        Generated::Map(f) => f,
        Generated::Diagram(_) => panic!("expected a map"),
    }
}

fn kinds() -> impl Strategy<Value = GenKind> {
    prop_oneof![Just(GenKind::RandomFiltration), Just(GenKind::FiberedMap), Just(GenKind::ConeCollapse)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_round_trip(kind in kinds(), seed in any::<u64>(), n in 1usize..6, t in 0usize..4, delay in 0usize..3) {
        let x = instance(generate(kind, seed, GenParams { n, t, delay: delay.min(t.max(1)), density: 0.5 }).unwrap());
        let text = emit_instance(&x).to_json();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(emit_instance(&back).to_json(), text);
    }

    #[test]
    fn upper_schedule_is_lower_schedule_of_dual(seed in any::<u64>(), n in 1usize..5, t in 1usize..4, delay in 0usize..3) {
        let f = map(GenKind::FiberedMap, seed, GenParams { n, t, delay: delay.min(t.max(1)), density: 0.5 });
        let upper = reduction_schedule(&f, Side::Upper, Prime::TWO, 1, false).unwrap();
        let lower = reduction_schedule(&f.dual(), Side::Lower, Prime::TWO, 1, false).unwrap();
        let key = |l: &qmfiber::reduction::ReductionLedger| {
            let mut v: Vec<(String, ExtNat)> = l.entries.iter().map(|e| (e.point.clone(), e.eps)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&upper), key(&lower));
        prop_assert_eq!(upper.measured, lower.measured);
    }
}

#[test]
fn cone_collapse_passes_on_both_sides() {
    for seed in 0..10 {
        let f = map(GenKind::ConeCollapse, seed, GenParams { n: 4, t: 3, delay: 2, density: 0.5 });
        for side in [Side::Lower, Side::Upper] {
            let r = verify_main_bound(&f, side, Prime::new(3).unwrap(), 2, true).unwrap();
            assert_ne!(r.verdict, Verdict::Fail, "seed {seed} side {side:?}");
            assert!(r.cylinder_equivalent);
        }
    }
}
