use serde::{Deserialize, Serialize};

use super::probability::success_probability;
use super::InferenceError;
use crate::rng::Stream;
use crate::squeezed::CoefficientTable;

/// X-basis measurement result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Outcome counts; the sufficient statistic of a record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub plus: f64,
    pub minus: f64,
}

impl Counts {
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

/// `shots` independent readouts at a fixed protocol phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub phi_true: f64,
    pub outcomes: Vec<Outcome>,
    pub seed: u64,
    pub shots: usize,
}

impl MeasurementRecord {
    pub fn counts(&self) -> Counts {
        let plus = self.outcomes.iter().filter(|o| **o == Outcome::Plus).count();
        Counts {
            plus: plus as f64,
            minus: (self.outcomes.len() - plus) as f64,
        }
    }
}

/// Draws `shots` outcomes with `P(+) = p(+|phi_true)` from the stream seeded by `seed`.
pub fn sample_outcomes(
    table: &CoefficientTable,
    phi_true: f64,
    shots: usize,
    seed: u64,
) -> Result<MeasurementRecord, InferenceError> {
    if shots == 0 {
        return Err(InferenceError::NoShots);
    }
    let p = success_probability(table, phi_true);
    let mut stream = Stream::new(seed);
    let outcomes = (0..shots)
        .map(|_| {
            if stream.bernoulli(p) {
                Outcome::Plus
            } else {
                Outcome::Minus
            }
        })
        .collect();
    Ok(MeasurementRecord {
        phi_true,
        outcomes,
        seed,
        shots,
    })
}

/// Number of `+` outcomes in `shots` draws at probability `p`; same stream
/// consumption as [`sample_outcomes`].
pub fn sample_plus_count(p: f64, shots: usize, seed: u64) -> usize {
    let mut stream = Stream::new(seed);
    (0..shots).filter(|_| stream.bernoulli(p)).count()
}
