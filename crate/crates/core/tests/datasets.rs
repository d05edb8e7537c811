use merge_trees::datasets::{
    gen_example2, gen_example3, load_functions_csv, load_labels_csv, save_functions_csv, save_labels_csv,
    Scenario, ScenarioConfig,
};
use merge_trees::pl_function::PlFunction;

fn csv_bytes(fs: &[PlFunction<f64>]) -> Vec<u8> {
    let mut buf = Vec::new();
    save_functions_csv(fs, &mut buf).unwrap();
    buf
}

#[test]
fn seeds_reproduce_bytes() {
    for scenario in [Scenario::Example1, Scenario::Example2, Scenario::Example3, Scenario::NoisySine] {
        let cfg = ScenarioConfig::new(scenario, 42);
        let a = cfg.generate::<f64>().unwrap();
        let b = cfg.generate::<f64>().unwrap();
        assert_eq!(csv_bytes(&a.functions), csv_bytes(&b.functions));
    }
    assert_ne!(csv_bytes(&gen_example3(1).functions), csv_bytes(&gen_example3(2).functions));
}

#[test]
fn files_round_trip() {
    let data = gen_example2::<f64>(7);
    let dir = tempfile::tempdir().unwrap();
    let fpath = dir.path().join("functions.csv");
    let lpath = dir.path().join("labels.csv");
    save_functions_csv(&data.functions, std::fs::File::create(&fpath).unwrap()).unwrap();
    save_labels_csv(&data.ids(), &data.labels, std::fs::File::create(&lpath).unwrap()).unwrap();
    let back: Vec<PlFunction<f64>> = load_functions_csv(std::fs::File::open(&fpath).unwrap()).unwrap();
    assert_eq!(back, data.functions);
    let labels = load_labels_csv(std::fs::File::open(&lpath).unwrap()).unwrap();
    assert_eq!(labels.iter().map(|l| l.1).collect::<Vec<_>>(), data.labels);
}

#[test]
fn config_serializes() {
    let cfg = ScenarioConfig::new(Scenario::NoisySine, 3);
    let text = serde_json::to_string(&cfg).unwrap();
    assert!(text.contains("\"noisy_sine\"") && text.contains("ChaCha8"));
    assert_eq!(serde_json::from_str::<ScenarioConfig>(&text).unwrap(), cfg);
}
