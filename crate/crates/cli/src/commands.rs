//! One function per subcommand. Each returns the JSON document the binary
//! prints, so tests can drive them without spawning processes.

use std::fs;
use std::path::{Path, PathBuf};

use mtpga_core::analysis::{
    compress, layout_2d, persistence_correlation, projected_variances, reconstruction_error,
    sim_indicator, BasisArchive, CompressionStats, CorrelationView, Layout2D, ReconstructionError,
};
use mtpga_core::pga::n1_from_ratio;
use mtpga_core::{
    bdt_to_merge_tree, fit_basis, reconstruct, wt2_bdts, Bdt, EnsembleKind, Error, FitReport,
    MergeTree, PgaParams, Preprocessing,
};
use serde::{Deserialize, Serialize};

use crate::manifest::{load_ensemble, load_member, EnsembleManifest, PreprocessingOverrides};
use crate::{CliError, Result};

pub struct FitOptions {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub d_max: usize,
    pub n1_ratio: f64,
    pub n2: usize,
    pub tree_kind: Option<EnsembleKind>,
    pub preprocessing: PreprocessingOverrides,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitOutput {
    pub archive: PathBuf,
    pub report: PathBuf,
    pub ensemble: PathBuf,
    pub members: usize,
    pub origin_branches: usize,
    pub axes: usize,
    pub compression_factor: f64,
    pub mean_reconstruction_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitReportFile {
    pub tree_kind: EnsembleKind,
    pub preprocessing: Preprocessing,
    pub params: PgaParams,
    pub fit: FitReport,
    pub reconstruction_error: ReconstructionError,
    pub compression: CompressionStats,
}

/// Normalized input BDTs stored next to an archive, used by `stats` and
/// `serve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnsembleFile {
    pub ids: Vec<String>,
    pub members: Vec<Bdt>,
}

/// `basis.json` → `basis.<suffix>.json`.
pub fn sidecar_path(archive: &Path, suffix: &str) -> PathBuf {
    let stem = archive.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    archive.with_file_name(format!("{stem}.{suffix}.json"))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    serde_json::to_vec_pretty(v).expect("serializable")
}

pub fn fit(opts: &FitOptions) -> Result<FitOutput> {
    if opts.d_max == 0 {
        return Err(CliError::Usage("--dmax must be at least 1".into()));
    }
    if opts.n2 < 2 {
        return Err(CliError::Usage("--n2 must be at least 2".into()));
    }
    if !(opts.n1_ratio > 0.0 && opts.n1_ratio <= 1.0) {
        return Err(CliError::Usage(format!("--n1-ratio must lie in (0,1], got {}", opts.n1_ratio)));
    }
    let manifest = EnsembleManifest::load(&opts.manifest)?;
    let kind = opts.tree_kind.or(manifest.tree_kind).unwrap_or(EnsembleKind::Join);
    let pre = opts.preprocessing.over(&manifest.preprocessing).resolve()?;
    let effective = pre.effective(kind);
    let ensemble = load_ensemble(&manifest, kind, &pre)?;
    if ensemble.len() < 2 {
        return Err(CliError::Data(format!("fitting needs at least 2 members, got {}", ensemble.len())));
    }

    let total: usize = ensemble.iter().map(Bdt::len).sum();
    let params = PgaParams {
        d_max: opts.d_max,
        n1: n1_from_ratio(opts.n1_ratio, total),
        n2: opts.n2,
        eps1: effective.eps1,
        eps2: effective.eps2,
        eps3: effective.eps3,
    };
    let (basis, report) = fit_basis(&ensemble, &params)?;
    let errors = match reconstruction_error(&ensemble, &basis) {
        Ok(e) => e,
        Err(Error::ZeroSpread) => ReconstructionError {
            per_member: vec![0.0; ensemble.len()],
            mean: 0.0,
            max_pairwise: 0.0,
        },
        Err(e) => return Err(e.into()),
    };

    let mut archive = BasisArchive::new(&basis);
    archive.member_ids = manifest.ids();
    archive.reconstruction_errors = errors.per_member.clone();
    archive.tree_kind = Some(kind.as_str().to_string());
    let bytes = archive.to_bytes();
    let (_, compression) = compress(&ensemble, &basis);
    let compression = CompressionStats {
        archive_bytes: bytes.len(),
        ..compression
    };

    let report_path = sidecar_path(&opts.out, "report");
    let ensemble_path = sidecar_path(&opts.out, "ensemble");
    write(&opts.out, &bytes)?;
    write(
        &report_path,
        &to_json(&FitReportFile {
            tree_kind: kind,
            preprocessing: effective,
            params,
            fit: report,
            reconstruction_error: errors.clone(),
            compression,
        }),
    )?;
    write(
        &ensemble_path,
        &serde_json::to_vec(&EnsembleFile {
            ids: manifest.ids(),
            members: ensemble.clone(),
        })
        .expect("serializable"),
    )?;
    Ok(FitOutput {
        archive: opts.out.clone(),
        report: report_path,
        ensemble: ensemble_path,
        members: ensemble.len(),
        origin_branches: basis.origin.len(),
        axes: basis.axes.len(),
        compression_factor: compression.compression_factor,
        mean_reconstruction_error: errors.mean,
    })
}

pub fn load_archive(path: &Path) -> Result<BasisArchive> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    BasisArchive::from_bytes(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_ensemble_file(archive_path: &Path) -> Result<EnsembleFile> {
    let path = sidecar_path(archive_path, "ensemble");
    let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn archive_kind(archive: &BasisArchive) -> EnsembleKind {
    match archive.tree_kind.as_deref() {
        Some("split") => EnsembleKind::Split,
        Some("diagram") => EnsembleKind::Diagram,
        _ => EnsembleKind::Join,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Reconstruction {
    pub bdt: Bdt,
    pub merge_tree: MergeTree,
}

/// Reconstructed BDT and the merge tree it inverts to. Branches that
/// collapsed onto the diagonal have no merge-tree counterpart and are left
/// out of the tree only.
pub fn reconstruction(archive: &BasisArchive, alpha: &[f64]) -> Result<Reconstruction> {
    let bdt = reconstruct(&archive.basis(), alpha)?;
    let merge_tree = bdt_to_merge_tree(&bdt.prune_zero_persistence(), archive_kind(archive).tree_kind())?;
    Ok(Reconstruction { bdt, merge_tree })
}

pub fn parse_alpha(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid alpha entry `{}`", s.trim())))
        })
        .collect()
}

pub fn cmd_reconstruct(basis: &Path, alpha: &[f64]) -> Result<Reconstruction> {
    reconstruction(&load_archive(basis)?, alpha)
}

pub fn layout(archive: &BasisArchive) -> Result<Layout2D> {
    Ok(layout_2d(&archive.basis(), archive.member_ids.clone())?)
}

pub fn cmd_layout(basis: &Path) -> Result<Layout2D> {
    layout(&load_archive(basis)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub projected_variances: Vec<f64>,
    /// Absent when the basis has fewer than two axes.
    pub sim: Option<f64>,
    pub correlation: CorrelationView,
    pub reconstruction_error: Vec<f64>,
    pub compression: CompressionStats,
}

pub fn stats(archive: &BasisArchive, ensemble: &[Bdt]) -> Result<Stats> {
    let basis = archive.basis();
    if ensemble.len() != basis.coords.len() {
        return Err(CliError::Data(format!(
            "ensemble has {} members but the archive has {} coordinates",
            ensemble.len(),
            basis.coords.len()
        )));
    }
    let sim = if basis.axes.len() >= 2 {
        Some(sim_indicator(&layout_2d(&basis, Vec::new())?, ensemble)?)
    } else {
        None
    };
    let (_, compression) = compress(ensemble, &basis);
    Ok(Stats {
        projected_variances: projected_variances(ensemble, &basis)?,
        sim,
        correlation: persistence_correlation(ensemble, &basis)?,
        reconstruction_error: archive.reconstruction_errors.clone(),
        compression,
    })
}

pub fn cmd_stats(basis: &Path) -> Result<Stats> {
    let archive = load_archive(basis)?;
    let ensemble = load_ensemble_file(basis)?;
    stats(&archive, &ensemble.members)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DistanceOutput {
    pub distance: f64,
    /// Matched branch pairs; `null` stands for the diagonal.
    pub assignment: Vec<(Option<usize>, Option<usize>)>,
}

pub fn cmd_distance(
    a: &Path,
    b: &Path,
    kind: EnsembleKind,
    pre: &PreprocessingOverrides,
) -> Result<DistanceOutput> {
    let pre = pre.resolve()?;
    let ba = load_member(a, kind, &pre)?;
    let bb = load_member(b, kind, &pre)?;
    let (distance, asg) = wt2_bdts(&ba, &bb)?;
    Ok(DistanceOutput {
        distance,
        assignment: asg.pairs,
    })
}
