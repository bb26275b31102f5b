//! Files on disk for command-line tests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mtpga_core::{Bdt, ScalarFieldGrid};
use rand::Rng;

use crate::gen::bumpy_field;

pub fn write_grid(field: &ScalarFieldGrid, path: &Path) {
    let [nx, ny, nz] = field.dims;
    let mut text = format!("dims {nx} {ny} {nz}\n");
    for row in field.values.chunks(nx) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(text, "{}", line.join(" ")).expect("string write");
    }
    fs::write(path, text).expect("write grid");
}

fn write_manifest(dir: &Path, files: &[String], tree_kind: &str) -> PathBuf {
    let members: Vec<serde_json::Value> = files
        .iter()
        .enumerate()
        .map(|(i, f)| serde_json::json!({ "id": format!("m{i:03}"), "path": f }))
        .collect();
    let manifest = serde_json::json!({ "members": members, "treeKind": tree_kind });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&manifest).expect("json")).expect("write manifest");
    path
}

/// `n` smooth random fields on a `size × size` grid plus a manifest.
pub fn field_ensemble<R: Rng>(rng: &mut R, dir: &Path, n: usize, size: usize, tree_kind: &str) -> PathBuf {
    let files: Vec<String> = (0..n)
        .map(|i| {
            let name = format!("m{i:03}.grid");
            write_grid(&bumpy_field(rng, size, size, 5, 0.02), &dir.join(&name));
            name
        })
        .collect();
    write_manifest(dir, &files, tree_kind)
}

/// BDT JSON members plus a manifest.
pub fn bdt_ensemble(dir: &Path, members: &[Bdt]) -> PathBuf {
    let files: Vec<String> = members
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let name = format!("m{i:03}.json");
            fs::write(dir.join(&name), serde_json::to_vec(b).expect("json")).expect("write bdt");
            name
        })
        .collect();
    write_manifest(dir, &files, "join")
}
