//! On-disk formats: versioned JSON for covers and circuits, DOT graphs plus a
//! CSV manifest for bipartite edge covers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{LinearForm, ProductGate, SigmaPiSigmaCircuit, VarId, VariableSpace};
use crate::cover2d::{Rectangle, S2Construction, WeightedRectCover};
use crate::coverkd::{CellBox, HashStrategy, SkConstruction, WeightedBoxCover};
use crate::error::{Error, Result};
use crate::zmod::{factorize, mod_inverse, Modulus};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverKind {
    Rect,
    Box,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverItem {
    pub parts: Vec<Vec<usize>>,
    pub weight: u64,
}

/// Construction parameters recorded alongside a cover.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoverMeta {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<HashStrategy>,
    /// Number of items in the initial cover, the BBR `ell`.
    #[serde(default)]
    pub initial_items: usize,
    #[serde(default)]
    pub bbr_coeffs: Vec<u64>,
    #[serde(default)]
    pub bbr_degree: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub schema_version: u32,
    pub m: u64,
    pub factors: Vec<(u64, u32)>,
    pub n: usize,
    pub k: usize,
    pub kind: CoverKind,
    pub items: Vec<CoverItem>,
    pub meta: CoverMeta,
}

/// A cover read back from a [`CoverFile`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedCover {
    Rect(WeightedRectCover),
    Box(WeightedBoxCover),
}

fn factor_pairs(modulus: &Modulus) -> Vec<(u64, u32)> {
    modulus.factors().iter().map(|f| (f.prime, f.exponent)).collect()
}

fn artifact_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Artifact(msg.into()))
}

impl CoverFile {
    pub fn from_rect_cover(cover: &WeightedRectCover, meta: CoverMeta) -> Self {
        CoverFile {
            schema_version: SCHEMA_VERSION,
            m: cover.modulus().value(),
            factors: factor_pairs(cover.modulus()),
            n: cover.n(),
            k: 2,
            kind: CoverKind::Rect,
            items: cover
                .items()
                .iter()
                .map(|it| CoverItem {
                    parts: vec![it.rect.rows.clone(), it.rect.cols.clone()],
                    weight: it.weight,
                })
                .collect(),
            meta,
        }
    }

    pub fn from_box_cover(cover: &WeightedBoxCover, meta: CoverMeta) -> Self {
        CoverFile {
            schema_version: SCHEMA_VERSION,
            m: cover.modulus().value(),
            factors: factor_pairs(cover.modulus()),
            n: cover.n(),
            k: cover.k(),
            kind: CoverKind::Box,
            items: cover
                .items()
                .iter()
                .map(|it| CoverItem {
                    parts: it.cell_box.parts.clone(),
                    weight: it.weight,
                })
                .collect(),
            meta,
        }
    }

    pub fn from_s2(built: &S2Construction, seed: u64) -> Self {
        let meta = CoverMeta {
            base: Some(built.scheme.base),
            g: Some(built.scheme.digits),
            initial_items: built.initial.len(),
            bbr_coeffs: built.poly.coeffs().to_vec(),
            bbr_degree: built.poly.degree(),
            seed,
            ..CoverMeta::default()
        };
        CoverFile::from_rect_cover(&built.cover, meta)
    }

    pub fn from_sk(built: &SkConstruction, strategy: HashStrategy, seed: u64) -> Self {
        let meta = CoverMeta {
            u: Some(built.hash.u()),
            b: Some(built.hash.b),
            strategy: Some(strategy),
            initial_items: built.initial.len(),
            bbr_coeffs: built.poly.coeffs().to_vec(),
            bbr_degree: built.poly.degree(),
            seed,
            ..CoverMeta::default()
        };
        CoverFile::from_box_cover(&built.cover, meta)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cover serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Artifact(format!("cover file: {e}")))
    }

    fn modulus(&self) -> Result<Modulus> {
        if self.schema_version != SCHEMA_VERSION {
            return artifact_err(format!("unsupported schema version {}", self.schema_version));
        }
        let modulus = factorize(self.m).map_err(|e| Error::Artifact(e.to_string()))?;
        if factor_pairs(&modulus) != self.factors {
            return artifact_err(format!("factors {:?} do not match m = {}", self.factors, self.m));
        }
        Ok(modulus)
    }

    /// Validates the file and rebuilds the cover. Weights must lie in `1..m`.
    pub fn to_cover(&self) -> Result<LoadedCover> {
        let modulus = self.modulus()?;
        for (idx, it) in self.items.iter().enumerate() {
            if it.parts.len() != self.k {
                return artifact_err(format!("item {idx} has {} parts, expected {}", it.parts.len(), self.k));
            }
            if it.weight == 0 || it.weight >= self.m {
                return artifact_err(format!("item {idx} has weight {} outside 1..{}", it.weight, self.m));
            }
            if it.parts.iter().any(|p| p.is_empty()) {
                return artifact_err(format!("item {idx} has an empty part"));
            }
        }
        let wrap = |e: Error| Error::Artifact(e.to_string());
        match self.kind {
            CoverKind::Rect => {
                if self.k != 2 {
                    return artifact_err("rect covers must have k = 2");
                }
                let mut cover = WeightedRectCover::new(self.n, modulus);
                for it in &self.items {
                    cover
                        .push(Rectangle::new(it.parts[0].clone(), it.parts[1].clone()), it.weight)
                        .map_err(wrap)?;
                }
                Ok(LoadedCover::Rect(cover))
            }
            CoverKind::Box => {
                if self.k < 2 {
                    return artifact_err("box covers must have k >= 2");
                }
                let mut cover = WeightedBoxCover::new(self.n, self.k, modulus);
                for it in &self.items {
                    cover.push(CellBox::new(it.parts.clone()), it.weight).map_err(wrap)?;
                }
                Ok(LoadedCover::Box(cover))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateRecord {
    /// Each form as `(group, index, coefficient)` triples.
    pub forms: Vec<Vec<(usize, usize, u64)>>,
    pub repetition: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub schema_version: u32,
    pub m: u64,
    pub factors: Vec<(u64, u32)>,
    pub n: usize,
    pub groups: Vec<String>,
    pub gates: Vec<GateRecord>,
}

impl CircuitFile {
    pub fn from_circuit(c: &SigmaPiSigmaCircuit) -> Self {
        CircuitFile {
            schema_version: SCHEMA_VERSION,
            m: c.modulus.value(),
            factors: factor_pairs(&c.modulus),
            n: c.vars.n,
            groups: c.vars.groups.clone(),
            gates: c
                .gates
                .iter()
                .map(|g| GateRecord {
                    forms: g
                        .forms
                        .iter()
                        .map(|f| f.terms().iter().map(|&(v, a)| (v.group, v.index, a)).collect())
                        .collect(),
                    repetition: g.repetition,
                })
                .collect(),
        }
    }

    pub fn to_circuit(&self) -> Result<SigmaPiSigmaCircuit> {
        if self.schema_version != SCHEMA_VERSION {
            return artifact_err(format!("unsupported schema version {}", self.schema_version));
        }
        let modulus = factorize(self.m).map_err(|e| Error::Artifact(e.to_string()))?;
        if factor_pairs(&modulus) != self.factors {
            return artifact_err("factors do not match m");
        }
        let vars = VariableSpace {
            n: self.n,
            groups: self.groups.clone(),
        };
        let mut c = SigmaPiSigmaCircuit::new(modulus.clone(), vars.clone());
        for g in &self.gates {
            let mut forms = Vec::with_capacity(g.forms.len());
            for f in &g.forms {
                let terms: Vec<(VarId, u64)> = f.iter().map(|&(group, index, a)| (VarId { group, index }, a)).collect();
                if terms.iter().any(|(v, _)| !vars.contains(*v)) {
                    return artifact_err("gate references a variable outside the variable space");
                }
                let form = LinearForm::new(terms, &modulus);
                if form.is_zero() {
                    return artifact_err("gate contains an all-zero linear form");
                }
                forms.push(form);
            }
            c.gates.push(ProductGate {
                forms,
                repetition: g.repetition,
            });
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("circuit serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Artifact(format!("circuit file: {e}")))
    }
}

/// One DOT file per rectangle and the per-edge manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotExport {
    /// `(file name, contents)`.
    pub graphs: Vec<(String, String)>,
    /// CSV: `i,j,count,factor,prime_power`.
    pub manifest: String,
    /// Edges whose count is 1 modulo no prime power.
    pub bad_edges: Vec<(usize, usize)>,
}

/// Turns an `S_n^2(x, y)` rectangle cover into a bipartite cover of `K_n`.
///
/// Edge `{i, j}` is reached through both `(i, j)` and `(j, i)`, so every
/// repetition is halved (`weight · 2^{-1} mod m`). That needs `m` odd.
pub fn export_dot(cover: &WeightedRectCover) -> Result<DotExport> {
    let md = cover.modulus();
    let half = mod_inverse(2, md.value()).map_err(|_| Error::UnsupportedModulus {
        m: md.value(),
        reason: "graph export halves repetition counts, which needs m odd; \
                 for even m the per-edge count is doubled and no correction is known"
            .into(),
    })?;
    let n = cover.n();
    let width = cover.len().to_string().len().max(4);
    let mut counts = vec![0u128; n * n];
    let mut graphs = Vec::with_capacity(cover.len());
    for (idx, it) in cover.items().iter().enumerate() {
        let rep = md.mul(it.weight, half);
        let name = format!("rect_{:0width$}", idx + 1);
        let mut dot = String::new();
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(dot, "graph {name} {{");
        let _ = writeln!(dot, "  // repetition: {rep}");
        let _ = writeln!(dot, "  // left: {}", join(&it.rect.rows));
        let _ = writeln!(dot, "  // right: {}", join(&it.rect.cols));
        let _ = writeln!(dot, "  label=\"repetition {rep}\";");
        for &i in &it.rect.rows {
            for &j in &it.rect.cols {
                let _ = writeln!(dot, "  {i} -- {j};");
                let (a, b) = (i.min(j), i.max(j));
                counts[(a - 1) * n + (b - 1)] += rep as u128;
            }
        }
        dot.push_str("}\n");
        graphs.push((format!("{name}.dot"), dot));
    }
    let mut manifest = String::from("i,j,count,factor,prime_power\n");
    let mut bad_edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let c = counts[(i - 1) * n + (j - 1)];
            match md.prime_powers().position(|q| c % q as u128 == 1) {
                Some(f) => {
                    let q = md.factors()[f];
                    let _ = writeln!(manifest, "{i},{j},{c},{},{q}", f + 1);
                }
                None => {
                    bad_edges.push((i, j));
                    let _ = writeln!(manifest, "{i},{j},{c},,");
                }
            }
        }
    }
    Ok(DotExport {
        graphs,
        manifest,
        bad_edges,
    })
}
