//! Simulated scenarios and CSV ingestion of functional data.
//!
//! Every random generator draws from a single `ChaCha8Rng` stream seeded
//! with a `u64`, so a seed fixes the output bit for bit.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pl_function::PlFunction;
use crate::scalar::{cmp, Scalar};

/// Name of the pseudo-random generator, as written to metadata.
pub const GENERATOR: &str = "ChaCha8";

/// Cluster ordering of the critical values in the second cluster of example 3.
pub const EXAMPLE3_ORDER: [usize; 10] = [3, 2, 1, 0, 8, 9, 7, 6, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Example1,
    Example2,
    Example3,
    NoisySine,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Example1 => "example1",
            Scenario::Example2 => "example2",
            Scenario::Example3 => "example3",
            Scenario::NoisySine => "noisy_sine",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Scenario::Example1),
            "example2" => Ok(Scenario::Example2),
            "example3" => Ok(Scenario::Example3),
            "noisy_sine" | "noisy-sine" => Ok(Scenario::NoisySine),
            other => Err(Error::Parameter(format!("unknown scenario {other:?}"))),
        }
    }
}

/// Parameters of a simulation run. Fields that do not apply to the chosen
/// scenario are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub per_cluster: usize,
    pub n_grid: usize,
    pub sigma: f64,
    pub generator: String,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            seed,
            per_cluster: 50,
            n_grid: 400,
            sigma: 0.1,
            generator: GENERATOR.to_string(),
        }
    }

    pub fn generate<T: Scalar>(&self) -> Result<Dataset<T>> {
        match self.scenario {
            Scenario::Example1 => Ok(gen_example1()),
            Scenario::Example2 => gen_example2_sized(self.seed, self.per_cluster),
            Scenario::Example3 => gen_example3_sized(self.seed, self.per_cluster),
            Scenario::NoisySine => {
                let (clean, noisy) = gen_noisy_sine(self.seed, self.n_grid, self.sigma)?;
                Ok(Dataset {
                    functions: vec![clean, noisy],
                    labels: vec![0, 1],
                })
            }
        }
    }
}

/// Functions with one class label each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub functions: Vec<PlFunction<T>>,
    pub labels: Vec<usize>,
}

impl<T: Scalar> Dataset<T> {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.functions.iter().map(|f| f.id().to_string()).collect()
    }
}

/// Ten functions on `[0, 11]`: eleven unit tents centred at `j + 1/2` plus
/// one tall tent of height 5 at `i + 3/4` for `f_i`. Labels are all zero.
pub fn gen_example1<T: Scalar>() -> Dataset<T> {
    let functions = (0..10)
        .map(|i| {
            let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
            for j in 0..11 {
                let j = j as f64;
                pts.push((j + 1.0 / 3.0, 0.0));
                pts.push((j + 0.5, 1.0));
                pts.push((j + 2.0 / 3.0, 0.0));
                if j as usize == i {
                    pts.push((j + 0.75, 5.0));
                    pts.push((j + 1.0, 0.0));
                }
            }
            pts.push((11.0, 0.0));
            let xs = pts.iter().map(|p| T::of(p.0)).collect();
            let ys = pts.iter().map(|p| T::of(p.1)).collect();
            PlFunction::new(format!("f{i}"), xs, ys).expect("breakpoints are increasing")
        })
        .collect();
    Dataset {
        functions,
        labels: vec![0; 10],
    }
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("finite nonnegative standard deviation")
}

/// Two clusters of 50 functions on a 16-node grid alternating minimum and
/// maximum. Each cluster owns 8 maxima and 8 minima; every function visits
/// them in one random order shared by both sets.
pub fn gen_example2<T: Scalar>(seed: u64) -> Dataset<T> {
    gen_example2_sized(seed, 50).expect("default size is valid")
}

pub fn gen_example2_sized<T: Scalar>(seed: u64, per_cluster: usize) -> Result<Dataset<T>> {
    if per_cluster == 0 {
        return Err(Error::Parameter("clusters must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maxima = normal(100.0, 50.0);
    let minima = normal(-100.0, 50.0);
    let values: Vec<(Vec<f64>, Vec<f64>)> = (0..2)
        .map(|_| {
            let max: Vec<f64> = (0..8).map(|_| maxima.sample(&mut rng)).collect();
            let min: Vec<f64> = (0..8).map(|_| minima.sample(&mut rng)).collect();
            (max, min)
        })
        .collect();
    let mut functions = Vec::with_capacity(2 * per_cluster);
    let mut labels = Vec::with_capacity(2 * per_cluster);
    for (c, (max, min)) in values.iter().enumerate() {
        for k in 0..per_cluster {
            let mut perm: Vec<usize> = (0..8).collect();
            perm.shuffle(&mut rng);
            let ys = perm.iter().flat_map(|&p| [T::of(min[p]), T::of(max[p])]).collect();
            functions.push(PlFunction::on_integer_grid(format!("c{c}_{k:03}"), ys)?);
            labels.push(c);
        }
    }
    Ok(Dataset { functions, labels })
}

/// Two clusters of 50 functions on a 20-node grid alternating maximum and
/// minimum. Ten maxima and ten minima are shared by both clusters; each
/// function jitters them, sorts them, and lays them out in the order of its
/// cluster (identity or [`EXAMPLE3_ORDER`]).
pub fn gen_example3<T: Scalar>(seed: u64) -> Dataset<T> {
    gen_example3_sized(seed, 50).expect("default size is valid")
}

pub fn gen_example3_sized<T: Scalar>(seed: u64, per_cluster: usize) -> Result<Dataset<T>> {
    if per_cluster == 0 {
        return Err(Error::Parameter("clusters must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max: Vec<f64> = (0..10).map(|_| normal(100.0, 200.0).sample(&mut rng)).collect();
    let min: Vec<f64> = (0..10).map(|_| normal(-100.0, 200.0).sample(&mut rng)).collect();
    let jitter = normal(0.0, 100.0);
    let identity: [usize; 10] = std::array::from_fn(|k| k);
    let mut functions = Vec::with_capacity(2 * per_cluster);
    let mut labels = Vec::with_capacity(2 * per_cluster);
    for (c, order) in [identity, EXAMPLE3_ORDER].iter().enumerate() {
        for k in 0..per_cluster {
            let mut jmax: Vec<f64> = max.iter().map(|v| v + jitter.sample(&mut rng)).collect();
            let mut jmin: Vec<f64> = min.iter().map(|v| v + jitter.sample(&mut rng)).collect();
            jmax.sort_by(f64::total_cmp);
            jmin.sort_by(f64::total_cmp);
            let ys = order
                .iter()
                .flat_map(|&o| [T::of(jmax[o]), T::of(jmin[o])])
                .collect();
            functions.push(PlFunction::on_integer_grid(format!("c{c}_{k:03}"), ys)?);
            labels.push(c);
        }
    }
    Ok(Dataset { functions, labels })
}

/// `sin(10 pi x) / (1 + x^2)` on `[0, 1]`.
pub fn sine_target(x: f64) -> f64 {
    (10.0 * std::f64::consts::PI * x).sin() / (1.0 + x * x)
}

/// Samples the target on `n_grid` equispaced nodes and returns it with a
/// copy perturbed by i.i.d. `N(0, sigma)` noise at each node.
pub fn gen_noisy_sine<T: Scalar>(seed: u64, n_grid: usize, sigma: f64) -> Result<(PlFunction<T>, PlFunction<T>)> {
    if n_grid < 2 {
        return Err(Error::Parameter(format!("grid needs at least two nodes, got {n_grid}")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Parameter(format!("noise level {sigma} must be finite and nonnegative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = normal(0.0, sigma);
    let xs: Vec<f64> = (0..n_grid).map(|k| k as f64 / (n_grid - 1) as f64).collect();
    let clean: Vec<f64> = xs.iter().map(|&x| sine_target(x)).collect();
    let noisy: Vec<f64> = clean.iter().map(|&y| y + noise.sample(&mut rng)).collect();
    let conv = |v: &[f64]| v.iter().map(|&y| T::of(y)).collect::<Vec<T>>();
    Ok((
        PlFunction::new("clean", conv(&xs), conv(&clean))?,
        PlFunction::new("noisy", conv(&xs), conv(&noisy))?,
    ))
}

fn parse<T: Scalar>(s: &str) -> std::result::Result<T, String> {
    let s = s.trim();
    T::from_str_radix(s, 10).map_err(|_| format!("cannot parse {s:?} as a number"))
}

/// Writes `id,x,y` rows, grouped by function.
pub fn save_functions_csv<T: Scalar, W: Write>(functions: &[PlFunction<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "x", "y"])?;
    for f in functions {
        for (x, y) in f.xs().iter().zip(f.ys()) {
            w.write_record([f.id().to_string(), x.to_string(), y.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads `id,x,y` rows. Rows of one id must be contiguous and strictly
/// increasing in `x`.
pub fn load_functions_csv<T: Scalar, R: Read>(reader: R) -> Result<Vec<PlFunction<T>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut records = r.records();
    let header = match records.next() {
        Some(h) => h?,
        None => {
            return Err(Error::Ingestion {
                id: String::new(),
                line: 1,
                message: "empty input".into(),
            })
        }
    };
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["id", "x", "y"] {
        return Err(Error::Ingestion {
            id: String::new(),
            line: 1,
            message: format!("expected header id,x,y, found {}", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<(String, Vec<T>, Vec<T>)> = None;
    let finish = |cur: Option<(String, Vec<T>, Vec<T>)>, out: &mut Vec<PlFunction<T>>, line: u64| -> Result<()> {
        if let Some((id, xs, ys)) = cur {
            let f = PlFunction::new(id.clone(), xs, ys).map_err(|e| Error::Ingestion {
                id,
                line,
                message: e.to_string(),
            })?;
            out.push(f);
        }
        Ok(())
    };
    let mut line = 1u64;
    for rec in records {
        let rec = rec?;
        line = rec.position().map_or(line + 1, |p| p.line());
        let id = rec.get(0).unwrap_or("").trim().to_string();
        let bad = |message: String| Error::Ingestion {
            id: id.clone(),
            line,
            message,
        };
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", rec.len())));
        }
        if id.is_empty() {
            return Err(bad("empty id".into()));
        }
        let x: T = parse(&rec[1]).map_err(bad)?;
        let y: T = parse(&rec[2]).map_err(bad)?;
        if !x.is_finite() || !y.is_finite() {
            return Err(bad("non-finite value".into()));
        }
        match current.as_mut() {
            Some((cid, xs, ys)) if *cid == id => {
                let last = *xs.last().expect("nonempty group");
                if x == last {
                    return Err(bad(format!("duplicate abscissa {x}")));
                }
                if x < last {
                    return Err(bad(format!("abscissa {x} follows {last}")));
                }
                xs.push(x);
                ys.push(y);
            }
            _ => {
                if !seen.insert(id.clone()) {
                    return Err(bad("rows of this id are not contiguous".into()));
                }
                finish(current.take(), &mut out, line - 1)?;
                current = Some((id, vec![x], vec![y]));
            }
        }
    }
    finish(current, &mut out, line)?;
    Ok(out)
}

/// Writes `id,label` rows.
pub fn save_labels_csv<W: Write>(ids: &[String], labels: &[usize], writer: W) -> Result<()> {
    if ids.len() != labels.len() {
        return Err(Error::Parameter(format!("{} ids but {} labels", ids.len(), labels.len())));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "label"])?;
    for (id, l) in ids.iter().zip(labels) {
        w.write_record([id.clone(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `id,label` rows in file order.
pub fn load_labels_csv<R: Read>(reader: R) -> Result<Vec<(String, usize)>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header != ["id", "label"] {
        return Err(Error::Ingestion {
            id: String::new(),
            line: 1,
            message: format!("expected header id,label, found {}", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = rec.get(0).unwrap_or("").trim().to_string();
        let label = rec.get(1).unwrap_or("").trim();
        let label = label.parse().map_err(|_| Error::Ingestion {
            id: id.clone(),
            line,
            message: format!("label {label:?} is not a nonnegative integer"),
        })?;
        out.push((id, label));
    }
    Ok(out)
}

/// Labels aligned with `ids`; every id must appear exactly once.
pub fn align_labels(ids: &[String], rows: &[(String, usize)]) -> Result<Vec<usize>> {
    let mut map = std::collections::HashMap::new();
    for (id, l) in rows {
        if map.insert(id.as_str(), *l).is_some() {
            return Err(Error::Parameter(format!("label given twice for {id}")));
        }
    }
    ids.iter()
        .map(|id| {
            map.get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Parameter(format!("no label for {id}")))
        })
        .collect()
}

/// Breakpoint values in increasing order.
pub fn sorted_values<T: Scalar>(f: &PlFunction<T>) -> Vec<T> {
    let mut v = f.ys().to_vec();
    v.sort_by(cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_shape() {
        let d = gen_example1::<f64>();
        assert_eq!(d.len(), 10);
        let f0 = &d.functions[0];
        assert_eq!(f0.evaluate(0.75).unwrap(), 5.0);
        assert_eq!(f0.evaluate(5.5).unwrap(), 1.0);
        assert_eq!(f0.domain(), (0.0, 11.0));
        assert_eq!(d.functions[9].evaluate(9.75).unwrap(), 5.0);
    }

    #[test]
    fn example2_clusters_share_values() {
        let d = gen_example2::<f64>(5);
        assert_eq!(d.len(), 100);
        assert_eq!(d.labels.iter().filter(|&&l| l == 1).count(), 50);
        let base = sorted_values(&d.functions[0]);
        assert!(d.functions[..50].iter().all(|f| sorted_values(f) == base));
        assert_ne!(sorted_values(&d.functions[50]), base);
        assert_eq!(d, gen_example2(5));
        assert_ne!(sorted_values(&gen_example2::<f64>(6).functions[0]), base);
    }

    #[test]
    fn example3_orders() {
        let d = gen_example3::<f64>(2);
        assert_eq!(d.len(), 100);
        let f = &d.functions[0];
        let max: Vec<f64> = f.ys().iter().step_by(2).copied().collect();
        assert!(max.windows(2).all(|w| w[0] <= w[1]));
        let g = &d.functions[50];
        let max: Vec<f64> = g.ys().iter().step_by(2).copied().collect();
        let mut sorted = max.clone();
        sorted.sort_by(f64::total_cmp);
        let expected: Vec<f64> = EXAMPLE3_ORDER.iter().map(|&o| sorted[o]).collect();
        assert_eq!(max, expected);
    }

    #[test]
    fn noisy_sine() {
        let (c, n) = gen_noisy_sine::<f64>(1, 400, 0.0).unwrap();
        assert_eq!(c.ys(), n.ys());
        let (c, n) = gen_noisy_sine::<f64>(1, 400, 0.1).unwrap();
        assert_eq!(c.len(), 400);
        assert!(c.sup_distance(&n).unwrap() > 0.0);
        assert!(gen_noisy_sine::<f64>(1, 1, 0.1).is_err());
        assert!(gen_noisy_sine::<f64>(1, 10, -1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = gen_example2::<f64>(3);
        let mut buf = Vec::new();
        save_functions_csv(&d.functions, &mut buf).unwrap();
        let back: Vec<PlFunction<f64>> = load_functions_csv(buf.as_slice()).unwrap();
        assert_eq!(back, d.functions);
    }

    #[test]
    fn csv_errors() {
        let dup = "id,x,y\na,0,1\na,0,2\n";
        match load_functions_csv::<f64, _>(dup.as_bytes()) {
            Err(Error::Ingestion { id, line, .. }) => assert_eq!((id.as_str(), line), ("a", 3)),
            other => panic!("{other:?}"),
        }
        let unsorted = "id,x,y\na,0,1\na,2,1\na,1,1\n";
        assert!(matches!(
            load_functions_csv::<f64, _>(unsorted.as_bytes()),
            Err(Error::Ingestion { line: 4, .. })
        ));
        let headless = "a,0,1\na,1,2\n";
        assert!(matches!(
            load_functions_csv::<f64, _>(headless.as_bytes()),
            Err(Error::Ingestion { line: 1, .. })
        ));
        let split = "id,x,y\na,0,1\na,1,1\nb,0,1\nb,1,1\na,2,1\n";
        assert!(matches!(
            load_functions_csv::<f64, _>(split.as_bytes()),
            Err(Error::Ingestion { line: 6, .. })
        ));
        let single = "id,x,y\na,0,1\n";
        assert!(matches!(
            load_functions_csv::<f64, _>(single.as_bytes()),
            Err(Error::Ingestion { .. })
        ));
    }

    #[test]
    fn labels() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let mut buf = Vec::new();
        save_labels_csv(&ids, &[1, 0], &mut buf).unwrap();
        let rows = load_labels_csv(buf.as_slice()).unwrap();
        let rev = vec!["b".to_string(), "a".to_string()];
        assert_eq!(align_labels(&rev, &rows).unwrap(), vec![0, 1]);
        assert!(align_labels(&["c".to_string()], &rows).is_err());
    }
}
