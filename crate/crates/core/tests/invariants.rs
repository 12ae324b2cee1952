use std::collections::BTreeSet;
use std::sync::Arc;

use cmhodge::acceptance::{random_nilpotent_blocks, random_orientation};
use cmhodge::algebra::{generated_subalgebra, AlgebraElement, HodgeAlgebra};
use cmhodge::arith::CyclotomicNumber;
use cmhodge::cm::{build_cyclotomic_cm, enumerate_orientations, validate_orientation};
use cmhodge::combinatorics::support_graph;
use cmhodge::verifiers::nondegeneracy_verdict;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebra(m: u64, seed: u64) -> Arc<HodgeAlgebra> {
    let g = build_cyclotomic_cm(m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HodgeAlgebra::new(validate_orientation(&g, &random_orientation(&g, 3, &mut rng)).unwrap())
}

fn element(alg: &Arc<HodgeAlgebra>, picks: &[(usize, i64)]) -> AlgebraElement {
    let roots = alg.roots();
    AlgebraElement::from_terms(
        alg,
        picks.iter().map(|&(k, c)| {
            let r = roots[k % roots.len()];
            (r.i, r.j, CyclotomicNumber::from_int(alg.conductor(), c))
        }),
    )
    .unwrap()
}

#[test]
fn orbit_rank_bounds_over_all_orientations() {
    for m in [7u64, 11] {
        let g = build_cyclotomic_cm(m).unwrap();
        let n = g.degree() / 2;
        let mut h = vec![0usize; 4];
        // every Hodge vector of weight 3 with symmetric entries
        for a in 0..=n {
            h[0] = a;
            h[3] = a;
            h[1] = n - a;
            h[2] = n - a;
            for o in enumerate_orientations(&g, 3, &h).unwrap() {
                let r = nondegeneracy_verdict(&validate_orientation(&g, &o).unwrap()).unwrap();
                assert!(r.orbit_rank <= n);
                if let Some(c) = r.circulant_rank {
                    assert!(c <= r.orbit_rank);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn averaged_edge_sets_are_galois_stable(
        m in prop::sample::select(vec![7u64, 9]),
        seed in 0u64..1000,
        picks in prop::collection::vec((0usize..100, 1i64..4), 1..4),
    ) {
        let alg = algebra(m, seed);
        let avg = element(&alg, &picks).reynolds_average().unwrap().element;
        let (graph, _) = support_graph(&avg);
        let galois = alg.field().galois();
        for g in galois.generators() {
            let moved: BTreeSet<(u64, u64)> = graph
                .edges
                .iter()
                .map(|&(a, b)| {
                    let x = galois.label(g.apply(galois.position(a).unwrap()));
                    let y = galois.label(g.apply(galois.position(b).unwrap()));
                    (x.min(y), x.max(y))
                })
                .collect();
            prop_assert_eq!(&moved, &graph.edges);
        }
    }

    #[test]
    fn closure_is_monotone(
        seed in 0u64..1000,
        picks in prop::collection::vec((0usize..100, 1i64..4), 1..4),
        extra in (0usize..100, 1i64..4),
    ) {
        let alg = algebra(7, seed);
        let base: Vec<AlgebraElement> = picks.iter().map(|&p| element(&alg, &[p])).collect();
        let mut more = base.clone();
        more.push(element(&alg, &[extra]));
        let d1 = generated_subalgebra(&base).unwrap().dimension;
        let d2 = generated_subalgebra(&more).unwrap().dimension;
        prop_assert!(d1 <= d2);
        prop_assert!(d2 <= alg.dimension());
    }

    #[test]
    fn nilpotents_have_degree_at_most_2n(seed in 0u64..1000) {
        let alg = algebra(9, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = random_nilpotent_blocks(alg.n(), &mut rng);
        let v = AlgebraElement::rational_nilpotent(&alg, &a, &b).unwrap();
        let l = v.nilpotency_degree().unwrap();
        prop_assert!(l <= 2 * alg.n());
        let (_, p) = support_graph(&v);
        prop_assert!(l <= p.max_block_size());
    }
}
