mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::random_graph;
use qpart::spectral::{count_below, eigenvalues, SpectralProblem, VertexCondition};

const N: usize = 8;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenpairs_solve_the_problem(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5);
        let conditions: Vec<VertexCondition> = (0..g.vertex_count())
            .map(|_| if rng.random_bool(0.3) { VertexCondition::Dirichlet } else { VertexCondition::Standard })
            .collect();
        let p = SpectralProblem::new(g, conditions).unwrap();
        let s = eigenvalues(&p, N).unwrap();
        for (j, (&l, f)) in s.eigenvalues.iter().zip(&s.eigenvectors).enumerate() {
            prop_assert!(p.residual(l, f) <= 1e-8, "eigenpair {} residual {}", j + 1, p.residual(l, f));
        }
        for w in s.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        // counts just below and above each distinct eigenvalue
        let mut seen = 0;
        for (l, m) in s.distinct() {
            if l > 0.0 {
                prop_assert_eq!(count_below(&p, l * (1.0 - 1e-7)), seen);
            }
            seen += m;
            if seen <= N {
                prop_assert_eq!(count_below(&p, l * (1.0 + 1e-7) + 1e-12), seen);
            }
        }
    }

    #[test]
    fn one_dirichlet_vertex_interlaces(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5);
        let v = rng.random_range(0..g.vertex_count());
        let mu = eigenvalues(&SpectralProblem::standard(&g), N + 1).unwrap().eigenvalues;
        let lambda = eigenvalues(&SpectralProblem::with_dirichlet(&g, &[v]), N).unwrap().eigenvalues;
        for k in 0..N {
            let tol = 1e-8 * mu[k + 1].max(1.0);
            prop_assert!(mu[k] <= lambda[k] + tol && lambda[k] <= mu[k + 1] + tol, "k = {}", k + 1);
        }
    }
}
