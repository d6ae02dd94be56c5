use std::collections::BTreeSet;

use proptest::prelude::*;
use vanet_core::connectivity::{
    clustered_link_probability, street_connected_clustered, street_connected_noncluster, LinkRule,
};
use vanet_core::{
    check_feasibility, kmeans_1d, kmeans_1d_exact, optimize_cluster_count, truncate_placement,
    vehicle_connection_probability, KMeansConfig, KMeansResult, VehicleId, VehicleSet,
};

const STREET: f64 = 1000.0;

fn sorted_positions(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=STREET, 1..=max_len).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

/// Positions with frequent exact duplicates.
fn clumpy_positions(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=40, 1..=max_len).prop_map(|v| {
        let mut p: Vec<f64> = v.into_iter().map(|x| x as f64 * 25.0).collect();
        p.sort_by(f64::total_cmp);
        p
    })
}

fn points_and_k() -> impl Strategy<Value = (Vec<f64>, usize)> {
    prop_oneof![sorted_positions(40), clumpy_positions(40)].prop_flat_map(|p| {
        let n = p.len();
        (Just(p), 1..=n)
    })
}

fn vehicle_set() -> impl Strategy<Value = VehicleSet> {
    (
        prop_oneof![sorted_positions(60), clumpy_positions(60)],
        1.0..400.0f64,
    )
        .prop_map(|(p, r)| VehicleSet::from_positions("s", STREET, &p, r).unwrap())
}

fn is_partition(result: &KMeansResult, n: usize, k: usize) -> bool {
    result.assignments.len() == n
        && result.centers.len() == k
        && result.assignments.iter().all(|&c| c < k)
}

/// Members of each center form one run of consecutive indices.
fn is_contiguous(result: &KMeansResult) -> bool {
    let groups = result.groups();
    let mut runs: Vec<(usize, usize)> = groups
        .iter()
        .map(|(_, idx)| (idx[0], idx[idx.len() - 1]))
        .collect();
    let runs_are_dense = groups
        .iter()
        .all(|(_, idx)| idx.windows(2).all(|w| w[1] == w[0] + 1));
    runs.sort_unstable();
    runs_are_dense && runs.windows(2).all(|w| w[0].1 < w[1].0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kmeans_partitions_into_contiguous_runs((points, k) in points_and_k()) {
        let r = kmeans_1d(&points, k, &KMeansConfig::default()).unwrap();
        prop_assert!(is_partition(&r, points.len(), k));
        prop_assert!(is_contiguous(&r));
    }

    #[test]
    fn exact_partitions_into_contiguous_runs((points, k) in points_and_k()) {
        let r = kmeans_1d_exact(&points, k).unwrap();
        prop_assert!(is_partition(&r, points.len(), k));
        prop_assert!(is_contiguous(&r));
        prop_assert_eq!(r.groups().len(), k);
    }

    #[test]
    fn wcss_history_never_increases((points, k) in points_and_k()) {
        let r = kmeans_1d(&points, k, &KMeansConfig::default()).unwrap();
        for w in r.wcss_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "{:?}", r.wcss_history);
        }
        prop_assert_eq!(*r.wcss_history.last().unwrap(), r.wcss);
    }

    #[test]
    fn lloyd_never_beats_exact((points, k) in points_and_k()) {
        let lloyd = kmeans_1d(&points, k, &KMeansConfig::default()).unwrap().wcss;
        let exact = kmeans_1d_exact(&points, k).unwrap().wcss;
        prop_assert!(lloyd >= exact - 1e-9 * exact.max(1.0));
    }

    #[test]
    fn structure_partitions_vehicles(vs in vehicle_set()) {
        let s = optimize_cluster_count(&vs, &KMeansConfig::default()).unwrap();
        let mut seen = BTreeSet::new();
        for id in s.clusters.iter().flat_map(|c| c.member_ids.iter()).chain(&s.singleton_ids) {
            prop_assert!(seen.insert(*id), "{id} appears twice");
        }
        let all: BTreeSet<VehicleId> = vs.vehicles.iter().map(|v| v.id).collect();
        prop_assert_eq!(seen, all);
        prop_assert_eq!(s.k, s.clusters.len());
        prop_assert_eq!(s.m, s.singleton_ids.len());
        prop_assert_eq!(s.k + s.m, s.group_count);
        prop_assert!(s.clusters.iter().all(|c| c.member_ids.len() >= 2));
    }

    #[test]
    fn gateways_reach_every_member(vs in vehicle_set()) {
        let s = optimize_cluster_count(&vs, &KMeansConfig::default()).unwrap();
        for c in &s.clusters {
            prop_assert!(c.member_ids.contains(&c.gateway_id));
            prop_assert!(check_feasibility(c, &vs));
            let g = vs.get(c.gateway_id).unwrap();
            for id in &c.member_ids {
                let v = vs.get(*id).unwrap();
                prop_assert!((v.position - g.position).abs() <= v.coverage_radius.min(g.coverage_radius));
            }
        }
    }

    #[test]
    fn group_count_non_increasing_in_radius(
        points in sorted_positions(50),
        r1 in 1.0..300.0f64,
        extra in 0.0..300.0f64,
    ) {
        let small = VehicleSet::from_positions("s", STREET, &points, r1).unwrap();
        let large = small.with_coverage_radius(r1 + extra).unwrap();
        let cfg = KMeansConfig::default();
        let a = optimize_cluster_count(&small, &cfg).unwrap().group_count;
        let b = optimize_cluster_count(&large, &cfg).unwrap().group_count;
        prop_assert!(b <= a, "R={r1}: {a}, R={}: {b}", r1 + extra);
    }

    #[test]
    fn bracket_dominates_single_link(
        density in 1e-4..1.0f64,
        radius in 1e-2..500.0f64,
        q in 0.0..=1.0f64,
    ) {
        let single = vehicle_connection_probability(density, radius).unwrap();
        let bracket = clustered_link_probability(density, radius, q).unwrap();
        prop_assert!(bracket >= single);
        if q > 0.0 && single < 1.0 - 1e-12 && q * (-density * radius).exp() > 1e-12 {
            prop_assert!(bracket > single);
        }
    }

    #[test]
    fn clustered_chain_holds_whenever_vehicle_chain_does(vs in vehicle_set()) {
        let s = optimize_cluster_count(&vs, &KMeansConfig::default()).unwrap();
        if street_connected_noncluster(&vs) {
            prop_assert!(street_connected_clustered(&vs, &s, LinkRule::NextVehicle));
        }
    }

    #[test]
    fn truncation_is_idempotent_and_monotone(
        vs in vehicle_set(),
        a in 1.0..=STREET,
        b in 1.0..=STREET,
    ) {
        let (short, long) = if a <= b { (a, b) } else { (b, a) };
        let once = truncate_placement(&vs, long).unwrap();
        prop_assert_eq!(&truncate_placement(&once, long).unwrap(), &once);
        let nested = truncate_placement(&once, short).unwrap();
        prop_assert_eq!(&nested, &truncate_placement(&vs, short).unwrap());
        prop_assert!(nested.len() <= once.len() && once.len() <= vs.len());
        let expected: Vec<f64> = vs.positions().into_iter().filter(|&p| p <= short).collect();
        prop_assert_eq!(nested.positions(), expected);
        nested.check_invariants().unwrap();
    }
}
