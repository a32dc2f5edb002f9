//! JSON file formats for spectra, fields, symbols and systems, plus CSV
//! exports.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major lists of
//! rows. Field and symbol files record the SHA-256 of the canonical spectrum
//! encoding and are rejected when loaded against a different spectrum.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::hex_digest;
use crate::error::{Error, Result};
use crate::field::CoefficientField;
use crate::linalg::{CMat, CVec, C64};
use crate::spectrum::SpectrumModel;
use crate::symbol::{InvariantSymbol, SystemSymbol};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub manifold_dim: usize,
    pub elliptic_order: f64,
    pub blocks: Vec<BlockEntry>,
}

impl SpectrumFile {
    pub fn from_model(m: &SpectrumModel) -> Self {
        Self {
            manifold_dim: m.manifold_dim(),
            elliptic_order: m.elliptic_order(),
            blocks: m
                .blocks()
                .iter()
                .map(|b| BlockEntry {
                    eigenvalue: b.eigenvalue,
                    multiplicity: b.multiplicity,
                    label: b.label.clone(),
                })
                .collect(),
        }
    }

    pub fn into_model(self) -> Result<SpectrumModel> {
        SpectrumModel::new(
            self.manifold_dim,
            self.elliptic_order,
            self.blocks.into_iter().map(|b| (b.eigenvalue, b.multiplicity, b.label)),
        )
    }
}

pub fn spectrum_to_json(m: &SpectrumModel) -> String {
    serde_json::to_string_pretty(&SpectrumFile::from_model(m)).expect("spectrum serializes")
}

/// Parses and validates a spectrum file; violations name the offending block.
pub fn spectrum_from_json(text: &str) -> Result<SpectrumModel> {
    let file: SpectrumFile = serde_json::from_str(text)?;
    file.into_model()
}

pub fn spectrum_hash(m: &SpectrumModel) -> String {
    let bytes = serde_json::to_vec(&SpectrumFile::from_model(m)).expect("spectrum serializes");
    hex_digest(&bytes)
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub spectrum_hash: String,
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl FieldFile {
    pub fn from_field(u: &CoefficientField) -> Self {
        Self {
            spectrum_hash: u.spectrum().hash(),
            blocks: u.blocks().iter().map(|b| b.iter().map(pair).collect()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_field(self, spectrum: Arc<SpectrumModel>) -> Result<CoefficientField> {
        check_hash(&self.spectrum_hash, &spectrum)?;
        self.into_field_unverified(spectrum)
    }

    /// Shape-checked conversion that skips the spectrum hash comparison.
    pub fn into_field_unverified(self, spectrum: Arc<SpectrumModel>) -> Result<CoefficientField> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| CVec::from_iterator(b.len(), b.iter().map(unpair)))
            .collect();
        CoefficientField::new(spectrum, blocks)
    }
}

fn check_hash(found: &str, spectrum: &SpectrumModel) -> Result<()> {
    let expected = spectrum.hash();
    if found != expected {
        return Err(Error::SpectrumMismatch(format!(
            "file was written for spectrum {found}, loaded against {expected}"
        )));
    }
    Ok(())
}

pub fn field_to_json(u: &CoefficientField) -> String {
    serde_json::to_string(&FieldFile::from_field(u)).expect("field serializes")
}

pub fn field_from_json(text: &str, spectrum: Arc<SpectrumModel>) -> Result<CoefficientField> {
    FieldFile::from_json(text)?.into_field(spectrum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolFile {
    pub spectrum_hash: String,
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl SymbolFile {
    pub fn from_symbol(p: &InvariantSymbol) -> Self {
        Self {
            spectrum_hash: p.spectrum().hash(),
            blocks: p
                .blocks()
                .iter()
                .map(|m| m.row_iter().map(|r| r.iter().map(pair).collect()).collect())
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_symbol(self, spectrum: Arc<SpectrumModel>) -> Result<InvariantSymbol> {
        check_hash(&self.spectrum_hash, &spectrum)?;
        self.into_symbol_unverified(spectrum)
    }

    pub fn into_symbol_unverified(self, spectrum: Arc<SpectrumModel>) -> Result<InvariantSymbol> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (k, rows) in self.blocks.iter().enumerate() {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::ShapeMismatch {
                    index: k,
                    expected: format!("{n}x{n}"),
                    found: "ragged rows".into(),
                });
            }
            blocks.push(CMat::from_fn(n, n, |i, j| unpair(&rows[i][j])));
        }
        InvariantSymbol::new(spectrum, blocks)
    }
}

pub fn symbol_to_json(p: &InvariantSymbol) -> String {
    serde_json::to_string(&SymbolFile::from_symbol(p)).expect("symbol serializes")
}

pub fn symbol_from_json(text: &str, spectrum: Arc<SpectrumModel>) -> Result<InvariantSymbol> {
    SymbolFile::from_json(text)?.into_symbol(spectrum)
}

/// A system operator is either a path to a symbol file or an inline symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorEntry {
    Path(String),
    Inline(SymbolFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub operators: Vec<OperatorEntry>,
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves path entries through `load` (which returns file contents).
    pub fn into_system(
        self,
        spectrum: Arc<SpectrumModel>,
        mut load: impl FnMut(&str) -> Result<String>,
    ) -> Result<SystemSymbol> {
        let mut ops = Vec::with_capacity(self.operators.len());
        for entry in self.operators {
            let file = match entry {
                OperatorEntry::Inline(f) => f,
                OperatorEntry::Path(p) => SymbolFile::from_json(&load(&p)?)?,
            };
            ops.push(file.into_symbol(spectrum.clone())?);
        }
        SystemSymbol::new(ops)
    }
}

pub fn system_to_json(s: &SystemSymbol) -> String {
    let file = SystemFile {
        operators: s
            .operators()
            .iter()
            .map(|op| OperatorEntry::Inline(SymbolFile::from_symbol(op)))
            .collect(),
    };
    serde_json::to_string(&file).expect("system serializes")
}

/// `k,lambda,norm` rows for plotting coefficient decay.
pub fn field_norms_csv(u: &CoefficientField) -> String {
    let mut out = String::from("k,lambda,norm\n");
    for (k, n) in u.block_norms().iter().enumerate() {
        writeln!(out, "{k},{},{n:e}", u.spectrum().eigenvalue(k)).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(k: usize) -> Arc<SpectrumModel> {
        Arc::new(
            SpectrumModel::new(2, 2.0, (0..k).map(|k| ((k * (k + 1)) as f64, 2 * k + 1, Some(format!("l={k}")))))
                .unwrap(),
        )
    }

    #[test]
    fn spectrum_round_trip() {
        let s = sphere(4);
        let text = spectrum_to_json(&s);
        let back = spectrum_from_json(&text).unwrap();
        assert_eq!(back, *s);
        assert_eq!(back.hash(), s.hash());
    }

    #[test]
    fn loader_names_offending_block() {
        let text = r#"{"manifold_dim":1,"elliptic_order":2,"blocks":[{"eigenvalue":0,"multiplicity":1},{"eigenvalue":4,"multiplicity":2},{"eigenvalue":1,"multiplicity":2}]}"#;
        match spectrum_from_json(text) {
            Err(Error::InvalidSpectrum { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_and_symbol_round_trip() {
        let s = sphere(3);
        let u = CoefficientField::from_fn(s.clone(), |k, d| CVec::from_fn(d, |i, _| C64::new(k as f64 + 0.1, -(i as f64) / 3.0))).unwrap();
        let back = field_from_json(&field_to_json(&u), s.clone()).unwrap();
        assert_eq!(back, u);
        let p = InvariantSymbol::from_fn(s.clone(), |k, d| CMat::from_fn(d, d, |i, j| C64::new((i * d + j) as f64, k as f64 / 7.0))).unwrap();
        let back = symbol_from_json(&symbol_to_json(&p), s.clone()).unwrap();
        assert_eq!(back, p);
        let sys = SystemSymbol::new(vec![p.clone(), p.adjoint()]).unwrap();
        let back = SystemFile::from_json(&system_to_json(&sys))
            .unwrap()
            .into_system(s, |_| unreachable!())
            .unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn hash_mismatch_rejected() {
        let s = sphere(3);
        let u = CoefficientField::zeros(s);
        let other = sphere(4);
        assert!(matches!(
            field_from_json(&field_to_json(&u), other),
            Err(Error::SpectrumMismatch(_))
        ));
    }

    #[test]
    fn system_path_entries_resolve() {
        let s = sphere(2);
        let p = InvariantSymbol::identity(s.clone());
        let text = r#"{"operators":["a.json"]}"#;
        let sys = SystemFile::from_json(text)
            .unwrap()
            .into_system(s, |path| {
                assert_eq!(path, "a.json");
                Ok(symbol_to_json(&p))
            })
            .unwrap();
        assert_eq!(sys.operators()[0], p);
    }

    #[test]
    fn csv_header() {
        let s = sphere(2);
        let csv = field_norms_csv(&CoefficientField::zeros(s));
        assert!(csv.starts_with("k,lambda,norm\n0,0,0e0\n"));
    }
}
