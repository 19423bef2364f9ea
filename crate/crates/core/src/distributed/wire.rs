use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const WIRE_VERSION: u32 = 1;

/// What a worker reports at the end of a round. In-process workers pass it
/// over channels as is; [`GradientMessage::encode`] gives the JSON form for
/// workers in separate processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientMessage {
    pub version: u32,
    pub epoch: usize,
    pub worker: usize,
    /// This worker's share of the loss.
    pub loss: f64,
    /// Flattened `σ` rows (all rows, or only the worker's own), `W0`, `W1`.
    pub gradient: Vec<f64>,
    /// Fresh outputs of the worker's own nodes, in ascending node order.
    pub boundary: Vec<f64>,
}

impl GradientMessage {
    pub fn new(
        epoch: usize,
        worker: usize,
        loss: f64,
        gradient: Vec<f64>,
        boundary: Vec<f64>,
    ) -> Self {
        Self {
            version: WIRE_VERSION,
            epoch,
            worker,
            loss,
            gradient,
            boundary,
        }
    }

    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("message fields always serialize")
    }

    pub fn decode(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        let header: Header = serde_json::from_str(text).map_err(|e| Error::Wire(e.to_string()))?;
        if header.version != WIRE_VERSION {
            return Err(Error::UnsupportedVersion(header.version));
        }
        serde_json::from_str(text).map_err(|e| Error::Wire(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = GradientMessage::new(
            7,
            2,
            -0.1,
            vec![1.0 / 3.0, f64::MIN_POSITIVE, -2.5e-300, 0.0],
            vec![0.123_456_789_012_345_68],
        );
        assert_eq!(GradientMessage::decode(&m.encode()).unwrap(), m);
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let mut m = GradientMessage::new(0, 0, 0.0, vec![], vec![]);
        m.version = 2;
        assert!(matches!(
            GradientMessage::decode(&m.encode()),
            Err(Error::UnsupportedVersion(2))
        ));
        assert!(matches!(GradientMessage::decode("{"), Err(Error::Wire(_))));
        assert!(matches!(
            GradientMessage::decode(r#"{"version":1,"epoch":0}"#),
            Err(Error::Wire(_))
        ));
    }
}
