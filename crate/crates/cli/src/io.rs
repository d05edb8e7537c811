use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use merge_trees::merge_tree::{MergeTree, TreeDocument, WeightedMergeTree};
use merge_trees::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Ingestion {
        id: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Metadata sidecar for an output file: `<out>.meta.json`, or
/// `metadata.json` inside an output directory.
pub fn metadata_path(out: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        out.join("metadata.json")
    } else {
        let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".meta.json");
        out.with_file_name(name)
    }
}

pub fn write_metadata(out: &Path, is_dir: bool, command: &str, inputs: &[&Path], parameters: Value) -> Result<()> {
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "parameters": parameters,
    });
    write_json(&metadata_path(out, is_dir), &meta)
}

/// A named tree as stored in a trees file.
pub struct NamedTree {
    pub id: String,
    pub tree: WeightedMergeTree<f64>,
    /// Document node id of each internal node id.
    pub node_ids: Vec<i64>,
}

/// Reads a JSON array of tree documents sharing one `K`.
pub fn read_trees(path: &Path) -> Result<Vec<NamedTree>> {
    let docs: Vec<TreeDocument> = serde_json::from_reader(std::io::BufReader::new(open(path)?))?;
    if docs.is_empty() {
        return Err(Error::Ingestion {
            id: path.display().to_string(),
            line: 0,
            message: "no trees in file".into(),
        });
    }
    let mut out = Vec::with_capacity(docs.len());
    let mut common: Option<f64> = None;
    for (i, doc) in docs.iter().enumerate() {
        let id = doc.id.clone().unwrap_or_else(|| format!("tree{i}"));
        let (tree, k) = MergeTree::<f64>::from_document(doc)?;
        let k = k.ok_or_else(|| Error::Validation(format!("tree {id} has no K")))?;
        match common {
            Some(c) if c != k => {
                return Err(Error::Validation(format!("tree {id} has K = {k}, expected {c}")));
            }
            _ => common = Some(k),
        }
        out.push(NamedTree {
            id,
            tree: WeightedMergeTree::new(tree, k)?,
            node_ids: doc.nodes.iter().map(|n| n.id).collect(),
        });
    }
    Ok(out)
}

pub fn write_trees(path: &Path, trees: &[(String, MergeTree<f64>)], k: f64) -> Result<()> {
    let docs: Vec<TreeDocument> = trees
        .iter()
        .map(|(id, t)| t.compact().0.to_document(Some(id.clone()), Some(k)))
        .collect();
    write_json(path, &docs)
}
