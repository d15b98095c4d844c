//! The pruned mesh search against plain enumeration of every mesh partition.

use qpart::catalog::CatalogSpec;
use qpart::optimize::{minimize_energy, partition_energy, EnergyKind, SearchOptions};
use qpart::partitions::{enumerate_partitions, DEFAULT_CANDIDATE_CAP};

fn brute_force(spec: &str, k: usize, kind: EnergyKind, mesh: usize) -> f64 {
    let g: CatalogSpec = spec.parse().unwrap();
    enumerate_partitions(&g.build(), k, mesh, 4, DEFAULT_CANDIDATE_CAP)
        .unwrap()
        .map(|p| partition_energy(&p, kind))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn mesh_search_finds_the_enumerated_optimum() {
    let cases = [("interval:1", 4), ("star:3", 4), ("loop:1", 4), ("lasso:1:1", 3), ("figure8:1:1", 2), ("path:1:2", 3)];
    for (spec, mesh) in cases {
        let g = spec.parse::<CatalogSpec>().unwrap().build();
        for k in 1..=3 {
            for kind in [EnergyKind::Dirichlet, EnergyKind::Natural] {
                let opts = SearchOptions { mesh, refine: false, ..Default::default() };
                let est = minimize_energy(&g, k, kind, &opts).unwrap();
                let expect = brute_force(spec, k, kind, mesh);
                assert!(
                    (est.value - expect).abs() <= 1e-7 * expect.max(1.0),
                    "{spec} {kind}_{k} M={mesh}: search {} enumeration {expect}",
                    est.value
                );
            }
        }
    }
}

#[test]
fn refinement_never_raises_the_mesh_value() {
    for spec in ["star:3:1:1:2", "lasso:1:2", "dumbbell:1:1:1"] {
        let g = spec.parse::<CatalogSpec>().unwrap().build();
        for k in 2..=3 {
            for kind in [EnergyKind::Dirichlet, EnergyKind::Natural] {
                let est = minimize_energy(&g, k, kind, &SearchOptions::default()).unwrap();
                // mesh values are only bisected to about 1e-8
                assert!(est.value <= est.mesh_value * (1.0 + 1e-7), "{spec} {kind}_{k}");
                assert_eq!(est.witness.k(), k);
                assert!(est.witness.is_exhaustive());
            }
        }
    }
}
