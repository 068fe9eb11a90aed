//! Invariants over seeded random instances, checked against enumeration.

use hypercover::augmentation::min_degree_vector;
use hypercover::brute;
use hypercover::cover_basic::{feasibility_certificate, weak_cover_basic, CoverInstance};
use hypercover::cover_uniform::{weak_cover_uniform_with, UniformCoverInstance, UniformOptions};
use hypercover::gen;
use hypercover::trace::CoverTrace;
use hypercover::verify::{audit_trace, check_laminar, projection_bound_holds, verify_cover, CoverMode, Flavor};
use hypercover::{DegreeVector, SetFunction, Subset, WeightedHypergraph};
use proptest::prelude::*;

/// `(seed, n, density)` for the generators.
fn shape(max_n: usize) -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 2..=max_n, prop::sample::select(vec![0.5, 1.0, 1.5]))
}

fn instance(seed: u64, n: usize, density: f64) -> (SetFunction, DegreeVector) {
    let mut rng = gen::rng(seed);
    let p = gen::skew_function(n, density, &mut rng).unwrap();
    let m = gen::feasible_degrees(&p, &mut rng).unwrap();
    (p, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_functions_are_skew_supermodular((seed, n, density) in shape(7)) {
        let mut rng = gen::rng(seed);
        let p = gen::skew_function(n, density, &mut rng).unwrap();
        prop_assert!(brute::skew_violation(&p).is_none());
        prop_assert_eq!(p.is_skew_supermodular(), true);
        let z = Subset::from_indices((0..n).filter(|i| seed >> i & 1 == 1));
        prop_assert!(brute::skew_violation(&p.contract_tabulated(z).unwrap()).is_none());
    }

    #[test]
    fn basic_cover_passes_verification((seed, n, density) in shape(8)) {
        let (p, m) = instance(seed, n, density);
        let (h, trace) = weak_cover_basic(&CoverInstance::new(p.clone(), m.clone()).unwrap()).unwrap();
        let report = verify_cover(std::slice::from_ref(&p), &m, &h, Flavor::Weak, CoverMode::Basic).unwrap();
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        let audit = audit_trace(std::slice::from_ref(&p), &m, &trace).unwrap();
        prop_assert!(audit.passed(), "{:?}", audit.failures().collect::<Vec<_>>());
    }

    #[test]
    fn uniform_cover_passes_verification((seed, n, density) in shape(7)) {
        let (p, m) = instance(seed, n, density);
        let opts = UniformOptions { diagnostics: true, ..UniformOptions::default() };
        let sol = weak_cover_uniform_with(&UniformCoverInstance::single(p.clone(), m.clone()).unwrap(), &opts).unwrap();
        let report = verify_cover(std::slice::from_ref(&p), &m, &sol.hypergraph, Flavor::Weak, CoverMode::Uniform).unwrap();
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        prop_assert!(sol.diagnostics.unwrap().ok());
        let audit = audit_trace(std::slice::from_ref(&p), &m, &sol.trace).unwrap();
        prop_assert!(audit.passed(), "{:?}", audit.failures().collect::<Vec<_>>());
    }

    #[test]
    fn feasibility_matches_enumeration((seed, n, density) in shape(6)) {
        let mut rng = gen::rng(seed);
        let p = gen::skew_function(n, density, &mut rng).unwrap();
        let m = gen::random_degrees(&p, &mut rng).unwrap();
        let k = p.ground().members().subsets().map(|x| p.value(x)).max().unwrap();
        let covered = p.ground().members().subsets().all(|x| m.sum(x) >= p.value(x));
        let capped = m.member_values().iter().all(|&d| d <= k);
        let cert = feasibility_certificate(&p, &m).unwrap();
        prop_assert_eq!(cert.is_none(), covered && capped);
    }

    #[test]
    fn min_degree_vector_is_minimum((seed, n) in (any::<u64>(), 2..=4usize)) {
        let mut rng = gen::rng(seed);
        let p = gen::skew_function(n, 1.0, &mut rng).unwrap();
        let k = p.max_value();
        prop_assume!(k <= 4);
        let m = min_degree_vector(&p).unwrap();
        prop_assert!(p.ground().members().subsets().all(|x| m.sum(x) >= p.value(x)));
        prop_assert_eq!(Some(m.total()), brute::min_degree_total(&p, k.max(0)));
    }

    #[test]
    fn laminar_projection_bound(seed in any::<u64>(), n in 1..=10usize, zbits in any::<u32>()) {
        let mut rng = gen::rng(seed);
        let family = gen::random_laminar(n, &mut rng);
        prop_assert!(check_laminar(&family));
        let z = Subset::from_bits(zbits) & Subset::full(n);
        prop_assert!(projection_bound_holds(&family, z));
    }

    #[test]
    fn trace_round_trips((seed, n, density) in shape(6)) {
        let (p, m) = instance(seed, n, density);
        let (_, trace) = weak_cover_basic(&CoverInstance::new(p, m).unwrap()).unwrap();
        let text = trace.to_json_lines();
        let back = CoverTrace::read_json_lines(text.as_bytes()).unwrap();
        prop_assert_eq!(back, trace);
    }

    #[test]
    fn coverage_is_submodular_and_posimodular(seed in any::<u64>(), n in 2..=6usize) {
        let mut rng = gen::rng(seed);
        let h: WeightedHypergraph = gen::random_hypergraph(&gen::ground(n).unwrap(), 1.5, &mut rng).unwrap();
        let all = Subset::full(n);
        for x in all.subsets() {
            for y in all.subsets() {
                let lhs = h.coverage(x) + h.coverage(y);
                prop_assert!(lhs >= h.coverage(x & y) + h.coverage(x | y));
                prop_assert!(lhs >= h.coverage(x - y) + h.coverage(y - x));
            }
        }
    }
}
