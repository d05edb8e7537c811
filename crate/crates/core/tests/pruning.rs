use merge_trees::datasets::{gen_example1, gen_noisy_sine};
use merge_trees::merge_tree::MergeTree;
use merge_trees::pruning::{elbow_curve, linear_grid, prune, prune_function, threshold_from_fraction};

#[test]
fn example1_small_peaks_prune_away() {
    let data = gen_example1::<f64>();
    let trees: Vec<_> = data
        .functions
        .iter()
        .map(|f| MergeTree::from_function(f).truncate(5.0).unwrap())
        .collect();
    for t in &trees {
        assert_eq!(prune(t, 1.0).leaf_count(), 13);
        let p = prune(t, 1.5);
        assert_eq!(p.leaf_count(), 2);
        assert!(p.tree().equivalent(prune(&trees[0], 1.5).tree(), 0.0));
    }
    let curve = elbow_curve(&trees, &[0.5, 1.0, 1.01, 6.0]).unwrap();
    assert_eq!(curve.avg_leaves, vec![13.0, 13.0, 2.0, 1.0]);
}

#[test]
fn pruned_noisy_sine_stays_close() {
    let (clean, noisy) = gen_noisy_sine::<f64>(0, 100, 0.1).unwrap();
    let eps = threshold_from_fraction(0.1, noisy.min_value(), noisy.max_value()).unwrap();
    let g = prune_function(&noisy, eps).unwrap();
    assert!(noisy.sup_distance(&g).unwrap() < eps);
    assert_eq!(MergeTree::from_function(&g).leaf_count(), MergeTree::from_function(&clean).leaf_count());
    let t = MergeTree::from_function(&noisy).truncate(noisy.max_value()).unwrap();
    let curve = elbow_curve(&[t], &linear_grid(0.0, 1.0, 11)).unwrap();
    assert!(curve.avg_leaves.windows(2).all(|w| w[0] >= w[1]));
}
