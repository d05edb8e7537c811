//! `merge-trees`: simulate functional data, build and prune merge trees,
//! compute distances and run the downstream statistics.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use merge_trees::analysis::{classical_mds, grid_search, hclust, merging_heights, write_embedding_csv, DistanceMatrix, Linkage};
use merge_trees::datasets::{self, Scenario, ScenarioConfig};
use merge_trees::edit_distance::d_edit;
use merge_trees::merge_tree::{MergeTree, WeightedMergeTree};
use merge_trees::persistence::{pd_from_merge_tree, wasserstein, PersistenceDiagram};
use merge_trees::pruning::{elbow_curve, linear_grid, prune, threshold_from_fraction};
use merge_trees::tree_stats::{self, group_bands, height_grid, stat_curve, Statistic, DEFAULT_GRID_POINTS};
use merge_trees::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::io::{open, read_trees, write_atomic, write_json, write_metadata, write_trees, NamedTree};

#[derive(Parser)]
#[command(name = "merge-trees", version, about = "Merge-tree analysis of functional data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated dataset (functions, labels, metadata).
    Simulate(SimulateArgs),
    /// Build merge trees from a functions CSV.
    BuildTrees(BuildArgs),
    /// Prune every tree of a trees file at a common threshold.
    Prune(PruneArgs),
    /// Average leaf count after pruning, over a threshold grid.
    Elbow(ElbowArgs),
    /// Pairwise distance matrix.
    Dist(DistArgs),
    /// Persistence diagrams of the trees, one CSV per tree.
    Pd(PdArgs),
    /// Classical multidimensional scaling of a distance matrix.
    Mds(MdsArgs),
    /// Leave-one-out QDA accuracy on an MDS embedding.
    QdaLoocv(QdaArgs),
    /// Agglomerative clustering of a distance matrix.
    Hclust(HclustArgs),
    /// Height-indexed tree statistics and group bands.
    Stats(StatsArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    per_cluster: usize,
    #[arg(long, default_value_t = 400)]
    n_grid: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    sigma: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Truncation height: `auto` (largest value in the input) or a number.
    #[arg(long = "K", default_value = "auto")]
    k: String,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Threshold as a fraction of the height range of all trees.
    #[arg(long, allow_negative_numbers = true)]
    prune_frac: Option<f64>,
    /// Absolute threshold.
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
}

#[derive(Args)]
struct ElbowArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Largest threshold, as a fraction of the height range.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    max_frac: f64,
    #[arg(long, default_value_t = 51)]
    points: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Metric {
    Edit,
    Wasserstein,
    Mixed,
}

#[derive(Args)]
struct DistArgs {
    /// Trees file (edit, wasserstein).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Edit)]
    metric: Metric,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    p: f64,
    /// Mixing weight of `--dc` (mixed).
    #[arg(long, allow_negative_numbers = true)]
    w: Option<f64>,
    /// First distance matrix (mixed).
    #[arg(long)]
    dc: Option<PathBuf>,
    /// Second distance matrix (mixed).
    #[arg(long)]
    dr: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the optimal mapping of every pair (edit).
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Leave the essential class out of the diagrams (wasserstein).
    #[arg(long)]
    drop_essential: bool,
}

#[derive(Args)]
struct PdArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    drop_essential: bool,
}

#[derive(Args)]
struct MdsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    m: usize,
}

#[derive(Args)]
struct QdaArgs {
    /// Distance matrix (or the first matrix when `--dr` is given).
    #[arg(long)]
    input: PathBuf,
    /// Second matrix, mixed with the first by weight `w`.
    #[arg(long)]
    dr: Option<PathBuf>,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    w: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    /// Search w over 0, 0.05, ..., 1.
    #[arg(long)]
    grid_w: bool,
    /// Search m over 1..=15.
    #[arg(long)]
    grid_m: bool,
}

#[derive(Args)]
struct HclustArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_linkage, default_value = "average")]
    linkage: Linkage,
    /// Also write each unit's first merging height.
    #[arg(long)]
    heights: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Curves CSV.
    #[arg(long)]
    out: PathBuf,
    /// Labels CSV; enables group bands.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Bands CSV (requires `--labels`).
    #[arg(long)]
    bands: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_linkage(s: &str) -> std::result::Result<Linkage, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Collects flag problems so they can be reported together.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.0.push(message.into());
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(self.0.join("; ")))
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let mut p = Problems::default();
    p.check(a.per_cluster > 0, "--per-cluster must be positive");
    p.check(a.n_grid >= 2, "--n-grid must be at least 2");
    p.check(a.sigma.is_finite() && a.sigma >= 0.0, "--sigma must be finite and nonnegative");
    p.finish()?;
    let cfg = ScenarioConfig {
        per_cluster: a.per_cluster,
        n_grid: a.n_grid,
        sigma: a.sigma,
        ..ScenarioConfig::new(a.scenario, a.seed)
    };
    let data = cfg.generate::<f64>()?;
    write_atomic(&a.out.join("functions.csv"), |w| datasets::save_functions_csv(&data.functions, w))?;
    write_atomic(&a.out.join("labels.csv"), |w| datasets::save_labels_csv(&data.ids(), &data.labels, w))?;
    write_metadata(&a.out, true, "simulate", &[], serde_json::to_value(&cfg)?)?;
    println!("{} functions written to {}", data.len(), a.out.display());
    Ok(())
}

fn build_trees(a: &BuildArgs) -> Result<()> {
    let functions: Vec<merge_trees::PlFunction> = datasets::load_functions_csv(open(&a.input)?)?;
    if functions.is_empty() {
        return Err(Error::Ingestion {
            id: a.input.display().to_string(),
            line: 1,
            message: "no functions".into(),
        });
    }
    let top = functions.iter().map(|f| f.max_value()).fold(f64::NEG_INFINITY, f64::max);
    let k = if a.k == "auto" {
        top
    } else {
        let k: f64 = a
            .k
            .parse()
            .map_err(|_| Error::Parameter(format!("--K must be `auto` or a number, got {:?}", a.k)))?;
        if !k.is_finite() || k < top {
            return Err(Error::InvalidK { k, height: top });
        }
        k
    };
    let trees: Vec<(String, MergeTree<f64>)> = functions
        .iter()
        .map(|f| (f.id().to_string(), MergeTree::from_function(f)))
        .collect();
    write_trees(&a.out, &trees, k)?;
    write_metadata(&a.out, false, "build-trees", &[&a.input], json!({ "K": k, "trees": trees.len() }))?;
    println!("{} trees, K = {k}", trees.len());
    Ok(())
}

/// Lowest leaf and highest finite vertex over all trees.
fn height_range(trees: &[NamedTree]) -> (f64, f64) {
    trees.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        let tree = t.tree.tree();
        (lo.min(tree.min_height()), hi.max(tree.max_finite_height()))
    })
}

fn prune_cmd(a: &PruneArgs) -> Result<()> {
    let mut p = Problems::default();
    p.check(a.prune_frac.is_some() != a.eps.is_some(), "give exactly one of --prune-frac and --eps");
    p.check(a.eps.is_none_or(|e| e >= 0.0), "--eps must be nonnegative");
    p.finish()?;
    let trees = read_trees(&a.input)?;
    let (lo, hi) = height_range(&trees);
    let eps = match (a.prune_frac, a.eps) {
        (Some(frac), _) => threshold_from_fraction(frac, lo, hi)?,
        (_, Some(eps)) => eps,
        _ => unreachable!("checked above"),
    };
    let k = trees[0].tree.k();
    let pruned: Vec<(String, MergeTree<f64>)> = trees
        .iter()
        .map(|t| (t.id.clone(), prune(&t.tree, eps).into_tree()))
        .collect();
    let before: usize = trees.iter().map(|t| t.tree.leaf_count()).sum();
    let after: usize = pruned.iter().map(|(_, t)| t.leaf_count()).sum();
    write_trees(&a.out, &pruned, k)?;
    write_metadata(
        &a.out,
        false,
        "prune",
        &[&a.input],
        json!({ "prune_frac": a.prune_frac, "eps": eps, "height_range": [lo, hi], "leaves_before": before, "leaves_after": after }),
    )?;
    println!("eps = {eps}: {before} -> {after} leaves");
    Ok(())
}

fn elbow(a: &ElbowArgs) -> Result<()> {
    let mut p = Problems::default();
    p.check(a.max_frac > 0.0, "--max-frac must be positive");
    p.check(a.points >= 2, "--points must be at least 2");
    p.finish()?;
    let trees = read_trees(&a.input)?;
    let (lo, hi) = height_range(&trees);
    let top = threshold_from_fraction(a.max_frac, lo, hi)?;
    let weighted: Vec<WeightedMergeTree<f64>> = trees.into_iter().map(|t| t.tree).collect();
    let grid = if top > 0.0 { linear_grid(0.0, top, a.points) } else { vec![0.0] };
    let curve = elbow_curve(&weighted, &grid)?;
    write_atomic(&a.out, |w| curve.write_csv(w))?;
    write_metadata(&a.out, false, "elbow", &[&a.input], json!({ "max_frac": a.max_frac, "points": a.points, "height_range": [lo, hi] }))?;
    Ok(())
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build().map_err(|e| Error::Parameter(e.to_string()))
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

#[derive(Serialize)]
struct Certificate {
    a: String,
    b: String,
    distance: f64,
    /// Couples, deletions and ghostings by document node id.
    couples: Vec<(i64, i64)>,
    deletions1: Vec<i64>,
    deletions2: Vec<i64>,
    ghostings1: Vec<i64>,
    ghostings2: Vec<i64>,
}

fn diagrams(trees: &[NamedTree], drop_essential: bool) -> Vec<PersistenceDiagram<f64>> {
    trees
        .iter()
        .map(|t| {
            let d = pd_from_merge_tree(t.tree.tree());
            if drop_essential {
                PersistenceDiagram { essential: None, ..d }
            } else {
                d.with_k(t.tree.k())
            }
        })
        .collect()
}

/// Reads a matrix file. A matrix that fails validation is bad input, not a
/// numerical failure.
fn read_matrix(path: &Path) -> Result<DistanceMatrix<f64>> {
    DistanceMatrix::read_csv(open(path)?).map_err(|e| match e {
        Error::Numeric(m) => Error::Validation(format!("{}: {m}", path.display())),
        e => e,
    })
}

fn dist(a: &DistArgs) -> Result<()> {
    let mut p = Problems::default();
    match a.metric {
        Metric::Mixed => {
            p.check(a.dc.is_some() && a.dr.is_some(), "--metric mixed needs --dc and --dr");
            p.check(a.w.is_some_and(|w| (0.0..=1.0).contains(&w)), "--metric mixed needs --w in [0, 1]");
            p.check(a.input.is_none(), "--input is not used with --metric mixed");
        }
        _ => {
            p.check(a.input.is_some(), "--input is required");
            p.check(a.dc.is_none() && a.dr.is_none() && a.w.is_none(), "--dc, --dr and --w only apply to --metric mixed");
        }
    }
    p.check(a.p >= 1.0, "--p must be at least 1");
    p.check(a.jobs != Some(0), "--jobs must be positive");
    p.check(a.certificate.is_none() || matches!(a.metric, Metric::Edit), "--certificate only applies to --metric edit");
    p.check(!a.drop_essential || matches!(a.metric, Metric::Wasserstein), "--drop-essential only applies to --metric wasserstein");
    p.finish()?;

    let pool = thread_pool(a.jobs)?;
    let mut inputs: Vec<&Path> = Vec::new();
    let mut certificates = Vec::new();
    let matrix = match a.metric {
        Metric::Mixed => {
            let (dc, dr) = (a.dc.as_ref().unwrap(), a.dr.as_ref().unwrap());
            inputs.extend([dc.as_path(), dr.as_path()]);
            let dc = read_matrix(dc)?;
            let dr = read_matrix(dr)?;
            merge_trees::analysis::mixed_distance(&dc, &dr, a.w.unwrap())?
        }
        Metric::Edit | Metric::Wasserstein => {
            let input = a.input.as_ref().unwrap();
            inputs.push(input);
            let trees = read_trees(input)?;
            let ids: Vec<String> = trees.iter().map(|t| t.id.clone()).collect();
            let pairs = upper_pairs(trees.len());
            let values: Vec<(usize, usize, f64)> = match a.metric {
                Metric::Edit => {
                    let results: Vec<Result<(f64, merge_trees::edit_distance::Mapping)>> =
                        pool.install(|| pairs.par_iter().map(|&(i, j)| d_edit(&trees[i].tree, &trees[j].tree)).collect());
                    let mut values = Vec::with_capacity(pairs.len());
                    for (&(i, j), r) in pairs.iter().zip(results) {
                        let (d, m) = r?;
                        values.push((i, j, d));
                        if a.certificate.is_some() {
                            let (n1, n2) = (&trees[i].node_ids, &trees[j].node_ids);
                            certificates.push(Certificate {
                                a: ids[i].clone(),
                                b: ids[j].clone(),
                                distance: d,
                                couples: m.couples.iter().map(|&(x, y)| (n1[x], n2[y])).collect(),
                                deletions1: m.deletions1.iter().map(|&x| n1[x]).collect(),
                                deletions2: m.deletions2.iter().map(|&y| n2[y]).collect(),
                                ghostings1: m.ghostings1.iter().map(|&x| n1[x]).collect(),
                                ghostings2: m.ghostings2.iter().map(|&y| n2[y]).collect(),
                            });
                        }
                    }
                    values
                }
                _ => {
                    let pds = diagrams(&trees, a.drop_essential);
                    let results: Vec<Result<f64>> =
                        pool.install(|| pairs.par_iter().map(|&(i, j)| wasserstein(&pds[i], &pds[j], a.p)).collect());
                    pairs
                        .iter()
                        .zip(results)
                        .map(|(&(i, j), r)| r.map(|d| (i, j, d)))
                        .collect::<Result<_>>()?
                }
            };
            DistanceMatrix::from_pairs(ids, &values)?
        }
    };
    write_atomic(&a.out, |w| matrix.write_csv(w))?;
    if let Some(path) = &a.certificate {
        write_json(path, &certificates)?;
    }
    write_metadata(
        &a.out,
        false,
        "dist",
        &inputs,
        json!({ "metric": a.metric, "p": a.p, "w": a.w, "drop_essential": a.drop_essential, "size": matrix.len() }),
    )?;
    Ok(())
}

fn pd(a: &PdArgs) -> Result<()> {
    let trees = read_trees(&a.input)?;
    let pds = diagrams(&trees, a.drop_essential);
    let mut names = Vec::with_capacity(trees.len());
    for (t, d) in trees.iter().zip(&pds) {
        let name: String = t
            .id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
            .collect();
        let file = format!("{name}.csv");
        if names.contains(&file) {
            return Err(Error::Validation(format!("two trees map to the file name {file}")));
        }
        write_atomic(&a.out.join(&file), |w| d.write_csv(w))?;
        names.push(file);
    }
    write_metadata(&a.out, true, "pd", &[&a.input], json!({ "drop_essential": a.drop_essential, "files": names }))?;
    Ok(())
}

fn mds(a: &MdsArgs) -> Result<()> {
    let d = read_matrix(&a.input)?;
    let e = classical_mds(&d, a.m)?;
    write_atomic(&a.out, |w| write_embedding_csv(&e, w))?;
    write_metadata(
        &a.out,
        false,
        "mds",
        &[&a.input],
        json!({ "m": a.m, "eigenvalues": e.eigenvalues, "negative_eigenvalues": e.negative_eigenvalues, "clipped": e.clipped }),
    )?;
    if e.negative_eigenvalues > 0 {
        eprintln!("note: {} negative eigenvalues (matrix is not Euclidean)", e.negative_eigenvalues);
    }
    Ok(())
}

fn qda(a: &QdaArgs) -> Result<()> {
    let mut p = Problems::default();
    p.check(!(a.grid_w && a.w.is_some()), "--w and --grid-w are exclusive");
    p.check(!(a.grid_m && a.m.is_some()), "--m and --grid-m are exclusive");
    p.check(a.grid_m || a.m.is_some(), "give --m or --grid-m");
    p.check(a.dr.is_some() || (!a.grid_w && a.w.is_none()), "--w and --grid-w need --dr");
    p.check(a.dr.is_none() || a.grid_w || a.w.is_some(), "--dr needs --w or --grid-w");
    p.finish()?;
    let dc = read_matrix(&a.input)?;
    let dr = a.dr.as_ref().map(|p| read_matrix(p)).transpose()?;
    let rows = datasets::load_labels_csv(open(&a.labels)?)?;
    let labels = datasets::align_labels(dc.ids(), &rows)?;
    let mut classes = labels.clone();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Fit("the labels name fewer than two classes".into()));
    }
    let ws: Vec<f64> = if a.grid_w {
        (0..=20).map(|i| i as f64 / 20.0).collect()
    } else {
        a.w.into_iter().collect()
    };
    let ms: Vec<usize> = if a.grid_m { (1..=15).collect() } else { a.m.into_iter().collect() };
    let g = grid_search(&dc, dr.as_ref(), &labels, &ws, &ms)?;
    let report = json!({
        "w": dr.as_ref().map(|_| g.w),
        "m": g.m,
        "accuracy": g.report.accuracy,
        "classes": g.report.classes,
        "confusion": g.report.confusion,
        "failed_folds": g.report.predictions.iter().filter(|p| p.is_none()).count(),
        "negative_eigenvalues": g.report.negative_eigenvalues,
        "table": g.table.iter().map(|&(w, m, acc)| json!({ "w": w, "m": m, "accuracy": acc })).collect::<Vec<_>>(),
    });
    write_json(&a.out, &report)?;
    let mut inputs: Vec<&Path> = vec![&a.input, &a.labels];
    if let Some(dr) = &a.dr {
        inputs.push(dr);
    }
    write_metadata(&a.out, false, "qda-loocv", &inputs, json!({ "ws": ws, "ms": ms }))?;
    match &dr {
        Some(_) => println!("w = {}, m = {}, accuracy = {}", g.w, g.m, g.report.accuracy),
        None => println!("m = {}, accuracy = {}", g.m, g.report.accuracy),
    }
    println!("confusion (rows: true {:?}, columns: predicted)", g.report.classes);
    for row in &g.report.confusion {
        println!("  {}", row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

fn hclust_cmd(a: &HclustArgs) -> Result<()> {
    let d = read_matrix(&a.input)?;
    let dend = hclust(&d, a.linkage)?;
    write_atomic(&a.out, |w| dend.write_csv(w))?;
    if let Some(path) = &a.heights {
        let h = merging_heights(&dend);
        write_atomic(path, |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["id", "height"])?;
            for (id, h) in d.ids().iter().zip(&h) {
                c.write_record([id.clone(), h.to_string()])?;
            }
            c.flush()?;
            Ok(())
        })?;
    }
    let linkage = format!("{:?}", a.linkage).to_lowercase();
    write_metadata(&a.out, false, "hclust", &[&a.input], json!({ "linkage": linkage }))?;
    Ok(())
}

fn stats(a: &StatsArgs) -> Result<()> {
    let mut p = Problems::default();
    p.check(a.points >= 1, "--points must be positive");
    p.check(a.bands.is_none() || a.labels.is_some(), "--bands needs --labels");
    p.finish()?;
    let trees = read_trees(&a.input)?;
    let (lo, hi) = height_range(&trees);
    let grid = height_grid(lo, hi, a.points);
    let mut curves = Vec::with_capacity(3 * trees.len());
    for t in &trees {
        for s in Statistic::ALL {
            curves.push(stat_curve(t.tree.tree(), &t.id, s, &grid));
        }
    }
    write_atomic(&a.out, |w| tree_stats::write_curves_csv(&curves, w))?;
    let mut inputs: Vec<&Path> = vec![&a.input];
    if let Some(lp) = &a.labels {
        inputs.push(lp);
        let rows = datasets::load_labels_csv(open(lp)?)?;
        let ids: Vec<String> = trees.iter().map(|t| t.id.clone()).collect();
        let per_tree = datasets::align_labels(&ids, &rows)?;
        let labels: Vec<usize> = per_tree.iter().flat_map(|&l| [l; 3]).collect();
        let bands = group_bands(&curves, &labels)?;
        if let Some(bp) = &a.bands {
            write_atomic(bp, |w| tree_stats::write_bands_csv(&bands, w))?;
        }
    }
    write_metadata(&a.out, false, "stats", &inputs, json!({ "points": a.points, "height_range": [lo, hi] }))?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) => 2,
        Error::Numeric(_) | Error::Fit(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::BuildTrees(a) => build_trees(a),
        Command::Prune(a) => prune_cmd(a),
        Command::Elbow(a) => elbow(a),
        Command::Dist(a) => dist(a),
        Command::Pd(a) => pd(a),
        Command::Mds(a) => mds(a),
        Command::QdaLoocv(a) => qda(a),
        Command::Hclust(a) => hclust_cmd(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
