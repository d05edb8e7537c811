use merge_trees::datasets::gen_example1;
use merge_trees::merge_tree::MergeTree;
use merge_trees::pl_function::PlFunction;

#[test]
fn example1_trees() {
    for f in gen_example1::<f64>().functions {
        let t = MergeTree::from_function(&f);
        assert_eq!(t.leaf_count(), 13);
        assert!(t.is_normalized());
        for h in [1.0, 2.5, 4.999] {
            assert_eq!(t.cut_at_height(h).len(), 2);
        }
        assert_eq!(t.cut_at_height(5.0).len(), 1);
        assert_eq!(t.lca(&t.leaves()).unwrap(), t.top());
        let mut internal: Vec<f64> = t.internal_vertices().iter().map(|&v| t.height(v)).collect();
        internal.dedup();
        assert_eq!(internal.len(), 2);
    }
}

#[test]
fn json_round_trip_through_a_file() {
    let f = PlFunction::on_integer_grid("f", vec![3.0, 0.0, 2.0, 1.0, 4.0, -1.0, 5.0]).unwrap();
    let t = MergeTree::from_function(&f);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.json");
    std::fs::write(&path, t.to_json(Some(6.0))).unwrap();
    let (back, k) = MergeTree::<f64>::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(k, Some(6.0));
    assert!(back.equivalent(&t, 0.0));
    let w = back.truncate(6.0).unwrap();
    assert_eq!(w.weight(back.top()), 6.0 - back.height(back.top()));
}

#[test]
fn f32_trees_agree_with_f64() {
    let ys = [0.0, 2.0, 1.0, 3.0, 0.5, 2.5];
    let a = MergeTree::from_function(&PlFunction::on_integer_grid("a", ys.to_vec()).unwrap());
    let b = MergeTree::from_function(&PlFunction::on_integer_grid("b", ys.map(|y| y as f32).to_vec()).unwrap());
    assert_eq!(a.canonical_form(), b.canonical_form());
}
