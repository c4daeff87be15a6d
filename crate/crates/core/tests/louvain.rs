// SPDX-License-Identifier: Apache-2.0

mod common;

use genrenet::community::louvain_traced;
use genrenet::{louvain, modularity, Partition};
use proptest::prelude::*;

proptest! {
    #[test]
    fn modularity_matches_dense_formula(n in 2usize..12, p in 0.1f64..0.9, k in 1usize..5, seed in any::<u64>()) {
        let g = common::random_graph(n, p, true, seed);
        let labels: Vec<usize> = (0..n).map(|i| (i * 7 + seed as usize) % k).collect();
        let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
        let oracle = common::modularity_oracle(&common::dense(&g), &labels);
        prop_assert!((q - oracle).abs() < 1e-12, "{} vs {}", q, oracle);
    }

    #[test]
    fn components_never_share_a_community(n in 2usize..30, p in 0.0f64..0.3, seed in any::<u64>()) {
        let g = common::random_graph(n, p, false, seed);
        let part = louvain(&g, seed);
        let comps = g.connected_components();
        for (i, a) in comps.iter().enumerate() {
            for b in &comps[i + 1..] {
                for &x in a {
                    for &y in b {
                        prop_assert_ne!(part.community_of(x), part.community_of(y));
                    }
                }
            }
        }
    }

    #[test]
    fn louvain_is_deterministic_with_monotone_trace(n in 2usize..30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let g = common::random_graph(n, p, true, seed);
        let a = louvain_traced(&g, seed);
        let b = louvain_traced(&g, seed);
        prop_assert_eq!(a.partition.assignment(), b.partition.assignment());
        prop_assert_eq!(&a.trace, &b.trace);
        for w in a.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        let q = modularity(&g, &a.partition).unwrap();
        if let Some(last) = a.trace.last() {
            prop_assert!((q - last).abs() < 1e-9);
        }
        prop_assert!((-0.5..1.0).contains(&q));
    }

    #[test]
    fn result_is_never_below_singletons_or_whole(n in 2usize..20, p in 0.1f64..0.8, seed in any::<u64>()) {
        let g = common::random_graph(n, p, true, seed);
        let q = modularity(&g, &louvain(&g, seed)).unwrap();
        prop_assert!(q >= modularity(&g, &Partition::singletons(n)).unwrap() - 1e-12);
        prop_assert!(q >= -1e-12);
    }
}
