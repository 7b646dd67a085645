//! JSON wire formats. Matrices are nested arrays of rows, each entry a
//! `[re, im]` pair.
//!
//! - channel: `{ "n": 2, "kraus": [matrix, ...] }`
//! - state: `{ "n": 1, "rho": matrix }` or `{ "n": 1, "amplitudes": [[re, im], ...] }`
//! - Choi export: `{ "n": 1, "choi": matrix }`

use serde::{Deserialize, Serialize};

use crate::channels::{ChoiMatrix, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::state::DensityMatrix;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.dim())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|[a, b]| C64::new(*a, *b)).collect())
            .collect(),
    )
}

fn check_qubits(n: usize, dim: usize) -> Result<()> {
    if n >= usize::BITS as usize || 1usize << n != dim {
        return Err(Error::Format(format!(
            "declared n = {n} does not match dimension {dim}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub n: usize,
    pub kraus: Vec<JsonMatrix>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelJson {
            n: ch.n_qubits(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        }
    }

    /// Parses and validates trace preservation and complete positivity.
    pub fn to_channel(&self, tol: f64) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let ch = KrausChannel::checked(kraus, tol)?;
        check_qubits(self.n, ch.dim())?;
        Ok(ch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        StateJson {
            n: rho.n_qubits(),
            rho: Some(matrix_to_json(rho.mat())),
            amplitudes: None,
        }
    }

    pub fn to_state(&self, tol: f64) -> Result<DensityMatrix> {
        let rho = match (&self.rho, &self.amplitudes) {
            (Some(m), None) => DensityMatrix::new(matrix_from_json(m)?, tol)?,
            (None, Some(a)) => {
                let amps: Vec<C64> = a.iter().map(|[x, y]| C64::new(*x, *y)).collect();
                DensityMatrix::pure(&amps, tol)?
            }
            _ => {
                return Err(Error::Format(
                    "state needs exactly one of \"rho\" or \"amplitudes\"".into(),
                ))
            }
        };
        check_qubits(self.n, rho.dim())?;
        Ok(rho)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiJson {
    pub n: usize,
    pub choi: JsonMatrix,
}

impl ChoiJson {
    pub fn from_choi(c: &ChoiMatrix) -> Self {
        ChoiJson {
            n: c.n_qubits(),
            choi: matrix_to_json(c.mat()),
        }
    }
}

pub fn parse_channel(text: &str, tol: f64) -> Result<KrausChannel> {
    serde_json::from_str::<ChannelJson>(text)
        .map_err(|e| Error::Format(e.to_string()))?
        .to_channel(tol)
}

pub fn parse_state(text: &str, tol: f64) -> Result<DensityMatrix> {
    serde_json::from_str::<StateJson>(text)
        .map_err(|e| Error::Format(e.to_string()))?
        .to_state(tol)
}

pub fn channel_to_string(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson::from_channel(ch)).expect("plain data serializes")
}

pub fn state_to_string(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateJson::from_state(rho)).expect("plain data serializes")
}
