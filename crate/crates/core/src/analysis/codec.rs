//! Basis archives: the compressed form of an ensemble.

use serde::{Deserialize, Serialize};

use crate::bdt::Bdt;
use crate::error::{Error, Result};
use crate::pga::{GeodesicAxis, PgaBasis, PgaParams};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk basis. The optional trailing fields carry metadata for the
/// command-line tools and are omitted when empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BasisArchive {
    pub origin: Bdt,
    pub axes: Vec<GeodesicAxis>,
    pub axis_lengths: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub params: PgaParams,
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub member_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reconstruction_errors: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_kind: Option<String>,
}

impl BasisArchive {
    pub fn new(basis: &PgaBasis) -> Self {
        Self {
            origin: basis.origin.clone(),
            axes: basis.axes.clone(),
            axis_lengths: basis.axis_lengths.clone(),
            coords: basis.coords.clone(),
            params: basis.params,
            format_version: FORMAT_VERSION,
            member_ids: Vec::new(),
            reconstruction_errors: Vec::new(),
            tree_kind: None,
        }
    }

    pub fn basis(&self) -> PgaBasis {
        PgaBasis {
            origin: self.origin.clone(),
            axes: self.axes.clone(),
            axis_lengths: self.axis_lengths.clone(),
            coords: self.coords.clone(),
            params: self.params,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("archive serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let archive: Self = serde_json::from_slice(bytes)?;
        if archive.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion(archive.format_version));
        }
        Ok(archive)
    }
}

/// Scalar counts behind the compression factor.
///
/// Value scalars are the stored reals: two per branch for the inputs; the
/// origin's branches, both vectors of every axis, and the coordinates for
/// the archive. Structure scalars (one parent index per branch) are
/// reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionStats {
    pub input_value_scalars: usize,
    pub archive_value_scalars: usize,
    pub input_structure_scalars: usize,
    pub archive_structure_scalars: usize,
    pub compression_factor: f64,
    pub compression_factor_with_structure: f64,
    pub archive_bytes: usize,
}

impl CompressionStats {
    pub fn new(ensemble: &[Bdt], basis: &PgaBasis, archive_bytes: usize) -> Self {
        let nb = basis.origin.len();
        let d = basis.axes.len();
        let n = basis.coords.len();
        let input_branches: usize = ensemble.iter().map(Bdt::len).sum();
        let input_value_scalars = 2 * input_branches;
        let archive_value_scalars = 2 * nb + d * 2 * (2 * nb) + n * d;
        let input_structure_scalars = input_branches;
        let archive_structure_scalars = nb;
        Self {
            input_value_scalars,
            archive_value_scalars,
            input_structure_scalars,
            archive_structure_scalars,
            compression_factor: input_value_scalars as f64 / archive_value_scalars as f64,
            compression_factor_with_structure: (input_value_scalars + input_structure_scalars)
                as f64
                / (archive_value_scalars + archive_structure_scalars) as f64,
            archive_bytes,
        }
    }
}

pub fn compress(ensemble: &[Bdt], basis: &PgaBasis) -> (Vec<u8>, CompressionStats) {
    let bytes = BasisArchive::new(basis).to_bytes();
    let stats = CompressionStats::new(ensemble, basis, bytes.len());
    (bytes, stats)
}

pub fn decompress(bytes: &[u8]) -> Result<PgaBasis> {
    Ok(BasisArchive::from_bytes(bytes)?.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::Branch;

    fn basis(nb: usize, d: usize, n: usize) -> PgaBasis {
        let children = (1..nb)
            .map(|i| Branch {
                birth: 0.1 / i as f64,
                death: 0.9 - 0.1 / (i as f64 + 2.0),
                parent: Some(0),
            })
            .collect();
        PgaBasis {
            origin: Bdt::normalized_from(children, [0.25, 3.5]).unwrap(),
            axes: (0..d)
                .map(|k| GeodesicAxis {
                    g: (0..2 * nb).map(|e| (e as f64 + k as f64) / 7.0).collect(),
                    g_prime: (0..2 * nb).map(|e| -(e as f64) / 13.0).collect(),
                })
                .collect(),
            axis_lengths: (0..d).map(|k| 0.1 * k as f64 + 1.0 / 3.0).collect(),
            coords: (0..n).map(|j| (0..d).map(|k| ((j + k) % 5) as f64 / 4.0).collect()).collect(),
            params: PgaParams {
                d_max: d,
                n1: nb,
                n2: 16,
                eps1: 0.05,
                eps2: 0.95,
                eps3: 0.9,
            },
        }
    }

    #[test]
    fn factor_example() {
        let ensemble: Vec<Bdt> = (0..10).map(|_| basis(100, 0, 0).origin).collect();
        let b = basis(40, 3, 10);
        let stats = CompressionStats::new(&ensemble, &b, 0);
        assert_eq!(stats.input_value_scalars, 2000);
        assert_eq!(stats.archive_value_scalars, 590);
        assert!((stats.compression_factor - 2000.0 / 590.0).abs() < 1e-15);
        assert_eq!(stats.input_structure_scalars, 1000);
        assert_eq!(stats.archive_structure_scalars, 40);
    }

    #[test]
    fn origin_only_factor() {
        let ensemble: Vec<Bdt> = (0..4).map(|_| basis(10, 0, 0).origin).collect();
        let b = basis(5, 0, 4);
        let stats = CompressionStats::new(&ensemble, &b, 0);
        assert_eq!(stats.compression_factor, 80.0 / 10.0);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let b = basis(6, 2, 5);
        let (bytes, _) = compress(&[], &b);
        let back = decompress(&bytes).unwrap();
        assert_eq!(back, b);
        assert_eq!(BasisArchive::new(&back).to_bytes(), bytes);
    }

    #[test]
    fn rejects_other_versions() {
        let mut a = BasisArchive::new(&basis(2, 1, 2));
        a.format_version = 7;
        let bytes = serde_json::to_vec(&a).unwrap();
        assert!(matches!(BasisArchive::from_bytes(&bytes), Err(Error::FormatVersion(7))));
    }
}
