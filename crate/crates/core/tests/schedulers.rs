mod common;

use common::{fits, grid_instance, totals};
use infersched::bench::{instance_suite, BENCH_QUANTIZATION};
use infersched::exact::solve_dp;
use infersched::{run_lgsto, schedule, LgstoParams, Scheme, SchemeParams, NEG_INF};
use proptest::prelude::*;

fn bench_params() -> SchemeParams {
    SchemeParams { quantization: BENCH_QUANTIZATION, ..Default::default() }
}

#[test]
fn every_scheme_honours_the_result_contract() {
    let params = bench_params();
    for (k, inst) in instance_suite(77, 40).iter().enumerate() {
        let optimum = solve_dp(inst, &BENCH_QUANTIZATION).unwrap().map(|s| s.objective);
        for scheme in Scheme::ALL {
            let r = schedule(scheme, inst, &params, k as u64).unwrap();
            let genes = r.assignment.genes();
            assert_eq!(genes.len(), inst.job_count(), "{scheme} on #{k}");
            assert!(genes.iter().all(|&g| g < inst.model_count()));
            let (acc, t, e) = totals(inst, genes);
            assert_eq!(r.feasible, fits(inst, genes), "{scheme} on #{k}");
            assert_eq!((r.est_time_ms, r.est_energy), (t, e));
            if r.feasible {
                assert_eq!(r.objective, acc);
                assert!(r.objective <= optimum.expect("a feasible answer implies an optimum") + 1e-9);
            } else {
                assert_eq!(r.objective, NEG_INF);
            }
            if scheme.is_exact() {
                assert_eq!(r.feasible, optimum.is_some());
                assert_eq!(r.feasible.then_some(r.objective), optimum);
            }
        }
    }
}

#[test]
fn same_seed_same_schedule() {
    let params = bench_params();
    for inst in instance_suite(5, 10) {
        for scheme in Scheme::ALL {
            let a = schedule(scheme, &inst, &params, 42).unwrap();
            let b = schedule(scheme, &inst, &params, 42).unwrap();
            assert_eq!(a.assignment, b.assignment, "{scheme}");
            assert_eq!(a.iterations, b.iterations, "{scheme}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn lgsto_finds_feasible_when_one_exists(inst in grid_instance(), seed in any::<u64>()) {
        let out = run_lgsto(&inst, &LgstoParams { seed, ..Default::default() }).unwrap();
        let exists = common::brute_force(&inst).is_some();
        prop_assert_eq!(out.best.is_feasible(), exists);
        prop_assert!(out.best_per_generation.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(*out.best_per_generation.last().unwrap(), out.best.fitness);
    }
}
