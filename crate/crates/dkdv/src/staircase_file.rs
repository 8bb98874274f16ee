//! Staircase input files.
//!
//! ```json
//! { "anchor": [2, -1],
//!   "steps": [ { "width": 1, "values": ["3", "1/2"] },
//!              { "width": 1, "values": ["-2", "0"] } ] }
//! ```
//!
//! A step of width w lists u_1, …, u_{w+1}; the value "0" marks ε.

use dkdv_core::exactnum::{format_rational, parse_rational};
use dkdv_core::lattice::{Staircase, Step};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::StepData;

#[derive(Debug, Error)]
pub enum StaircaseFileError {
    #[error("staircase JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {step}, value {index}: {message}")]
    Value {
        step: usize,
        index: usize,
        message: String,
    },
    #[error(transparent)]
    Lattice(#[from] dkdv_core::lattice::LatticeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseFile {
    pub anchor: [i64; 2],
    pub steps: Vec<StepData>,
}

impl StaircaseFile {
    pub fn parse(text: &str) -> Result<Staircase, StaircaseFileError> {
        let f: StaircaseFile = serde_json::from_str(text)?;
        f.to_staircase()
    }

    pub fn to_staircase(&self) -> Result<Staircase, StaircaseFileError> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for (j, s) in self.steps.iter().enumerate() {
            let values = s
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    parse_rational(v).map_err(|e| StaircaseFileError::Value {
                        step: j,
                        index: i,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            steps.push(Step {
                width: s.width,
                values,
            });
        }
        Ok(Staircase::new((self.anchor[0], self.anchor[1]), steps)?)
    }

    pub fn from_staircase(s: &Staircase) -> Self {
        StaircaseFile {
            anchor: [s.anchor.0, s.anchor.1],
            steps: step_data(s),
        }
    }
}

pub fn step_data(s: &Staircase) -> Vec<StepData> {
    s.steps
        .iter()
        .map(|st| StepData {
            width: st.width,
            values: st.values.iter().map(format_rational).collect(),
        })
        .collect()
}
