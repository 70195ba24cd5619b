mod common;

use common::{brute_force, fits, grid_instance};
use infersched::exact::{solve_dp, solve_naive_memo, QuantizationSpec};
use infersched::{Catalog, ChannelModel, ConstraintPair, JobSpec, Locality, ModelProfile, SlotInstance};
use proptest::prelude::*;

fn unit() -> QuantizationSpec {
    QuantizationSpec::new(1.0, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solvers_match_enumeration(inst in grid_instance()) {
        let dp = solve_dp(&inst, &unit()).unwrap();
        let naive = solve_naive_memo(&inst, &unit()).unwrap();
        let brute = brute_force(&inst);
        match (dp, naive, brute) {
            (None, None, None) => {}
            (Some(d), Some(n), Some(b)) => {
                prop_assert_eq!(d.objective, b.accuracy);
                prop_assert_eq!(n.objective, b.accuracy);
                prop_assert_eq!(d.assignment.genes(), &b.genes[..]);
                prop_assert_eq!(n.assignment.genes(), &b.genes[..]);
                prop_assert!(!d.optimal_under_quantization);
            }
            other => prop_assert!(false, "disagreement: {:?}", other),
        }
    }

    #[test]
    fn loosening_a_budget_never_hurts(inst in grid_instance(), extra_t in 0u32..50, extra_e in 0u32..20) {
        let c = inst.constraints();
        let wider = inst
            .with_constraints(ConstraintPair::new(c.time_budget_ms + extra_t as f64, c.energy_budget + extra_e as f64).unwrap())
            .unwrap();
        let tight = solve_dp(&inst, &unit()).unwrap().map(|s| s.objective);
        let loose = solve_dp(&wider, &unit()).unwrap().map(|s| s.objective);
        match (tight, loose) {
            (Some(a), Some(b)) => prop_assert!(b >= a),
            (Some(_), None) => prop_assert!(false, "wider budget lost feasibility"),
            _ => {}
        }
    }

    /// Off-grid costs with coarse quanta: the answer must still fit the real budgets and
    /// the two solvers must still agree.
    #[test]
    fn coarse_grid_stays_sound(
        sizes in prop::collection::vec(0.01f64..3.0, 1..=5),
        t in 60.0f64..400.0,
        e in 1.0f64..12.0,
        tq in prop::sample::select(vec![0.7, 1.0, 2.5, 5.0]),
        eq in prop::sample::select(vec![0.05, 0.1, 0.3, 1.0]),
    ) {
        let catalog = Catalog::new(vec![
            ModelProfile::new(1, 72.01986328, 28.07417981, 1.123, Locality::Local),
            ModelProfile::new(2, 76.79044298, 42.45949233, 1.698, Locality::Local),
            ModelProfile::new(3, 66.15977267, 19.44331129, 0.778, Locality::Local),
            ModelProfile::new(4, 87.05788745, 5.1610317, 0.0, Locality::Remote),
        ]).unwrap();
        let jobs = sizes.iter().enumerate().map(|(i, &s)| JobSpec::new(i as u64 + 1, s).unwrap()).collect();
        let inst = SlotInstance::new(jobs, catalog, ChannelModel::default(), ConstraintPair::new(t, e).unwrap()).unwrap();
        let q = QuantizationSpec::new(tq, eq);
        let dp = solve_dp(&inst, &q).unwrap();
        let naive = solve_naive_memo(&inst, &q).unwrap();
        prop_assert_eq!(&dp, &naive);
        if let Some(s) = dp {
            prop_assert!(fits(&inst, s.assignment.genes()));
            let best = brute_force(&inst).expect("grid-feasible implies feasible");
            prop_assert!(s.objective <= best.accuracy + 1e-9);
        }
    }
}

#[test]
fn toy_optimum() {
    let catalog = Catalog::new(vec![
        ModelProfile::new(1, 0.9, 30.0, 1.0, Locality::Local),
        ModelProfile::new(2, 0.5, 10.0, 0.2, Locality::Local),
    ])
    .unwrap();
    let jobs = vec![JobSpec::new(1, 1.0).unwrap(), JobSpec::new(2, 1.0).unwrap()];
    let inst =
        SlotInstance::new(jobs, catalog, ChannelModel::default(), ConstraintPair::new(45.0, 2.0).unwrap()).unwrap();
    for s in [solve_dp(&inst, &QuantizationSpec::default()), solve_naive_memo(&inst, &QuantizationSpec::default())] {
        let s = s.unwrap().unwrap();
        assert!((s.objective - 1.4).abs() < 1e-12);
        assert_eq!(s.assignment.model_ids(), vec![1, 2]);
    }
}
