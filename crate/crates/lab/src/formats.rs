//! On-disk instance and answer formats.

use anyhow::{bail, Result};
use qclab_core::bitstr::BitString;
use qclab_core::dyadic::Dyadic;
use qclab_core::family_box::BoxInstance;
use qclab_core::family_lp::{BasisMode, LpInstance, WorkingBasis};
use qclab_core::oracle::FirstOrder;
use qclab_core::perturbed::PerturbedLp;
use serde::{Deserialize, Serialize};

/// Box instance file: `{"n": 2, "m": 3, "strings": ["010", "110"]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoxInstanceFile {
    pub n: usize,
    pub m: usize,
    pub strings: Vec<String>,
}

impl BoxInstanceFile {
    pub fn from_instance(inst: &BoxInstance) -> Self {
        BoxInstanceFile {
            n: inst.n(),
            m: inst.depth(),
            strings: inst.strings().iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<BoxInstance> {
        if self.strings.len() != self.n {
            bail!("instance file: n does not match the string count");
        }
        let strings: Vec<BitString> = self
            .strings
            .iter()
            .map(|s| s.parse::<BitString>().map_err(|e| anyhow::anyhow!("{e}")))
            .collect::<Result<_>>()?;
        Ok(BoxInstance::new(strings, self.m)?)
    }
}

/// Lp instance file: `{"p": 1.5, "m": 8, "mode": "tensor", "signs": [1, -1, ...]}`.
/// The tensor basis is regenerated deterministically from `m`, never stored.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LpInstanceFile {
    pub p: f64,
    pub m: usize,
    pub mode: String,
    pub signs: Vec<i8>,
}

impl LpInstanceFile {
    pub fn from_instance(inst: &LpInstance) -> Self {
        LpInstanceFile {
            p: inst.basis.p(),
            m: inst.basis.m(),
            mode: match inst.basis.mode() {
                BasisMode::Standard => "standard".into(),
                BasisMode::Tensor => "tensor".into(),
            },
            signs: inst.signs().to_vec(),
        }
    }

    pub fn to_instance(&self) -> Result<LpInstance> {
        let basis = WorkingBasis::new(self.p, self.m)?;
        let expected = match basis.mode() {
            BasisMode::Standard => "standard",
            BasisMode::Tensor => "tensor",
        };
        if self.mode != expected {
            bail!("instance file: mode `{}` does not match p={}", self.mode, self.p);
        }
        Ok(LpInstance::new(basis, self.signs.clone())?)
    }
}

/// Perturbed Lp instance file: the base instance plus the perturbations and
/// the seed that produced them.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerturbedLpFile {
    #[serde(flatten)]
    pub base: LpInstanceFile,
    pub eps: f64,
    pub k_const: f64,
    pub delta: Vec<f64>,
    pub seed: u64,
}

impl PerturbedLpFile {
    pub fn from_instance(inst: &PerturbedLp, eps: f64, seed: u64) -> Self {
        PerturbedLpFile {
            base: LpInstanceFile::from_instance(&inst.base),
            eps,
            k_const: inst.k_const,
            delta: inst.delta().to_vec(),
            seed,
        }
    }

    pub fn to_instance(&self) -> Result<PerturbedLp> {
        Ok(PerturbedLp::new(
            self.base.to_instance()?,
            self.delta.clone(),
            self.eps,
            self.k_const,
        )?)
    }
}

/// First-order answer over the exact family, serialized as dyadic text.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DyadicAnswerFile {
    pub value: String,
    pub axis: usize,
    pub slope: String,
}

impl DyadicAnswerFile {
    pub fn from_answer(a: &FirstOrder<Dyadic>) -> Self {
        DyadicAnswerFile {
            value: a.value.to_string(),
            axis: a.axis,
            slope: a.slope.to_string(),
        }
    }

    pub fn to_answer(&self) -> Result<FirstOrder<Dyadic>> {
        Ok(FirstOrder {
            value: self.value.parse::<Dyadic>()?,
            axis: self.axis,
            slope: self.slope.parse::<Dyadic>()?,
        })
    }
}

/// One transcript line: `{"t": 1, "query": ..., "answer": ...}` in JSONL.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub t: usize,
    pub query: serde_json::Value,
    pub answer: serde_json::Value,
}

pub fn transcript_jsonl<Q: Serialize, A: Serialize>(entries: &[(Q, A)]) -> Result<String> {
    let mut out = String::new();
    for (i, (q, a)) in entries.iter().enumerate() {
        let line = TranscriptLine {
            t: i + 1,
            query: serde_json::to_value(q)?,
            answer: serde_json::to_value(a)?,
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}
