use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Weekly session plan read off a crisp output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecommendation {
    pub low_count: u32,
    pub high_count: u32,
    pub preferred: u32,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("session count must be finite and non-negative, got {0}")]
    InvalidOutput(f64),
}

/// Brackets `crisp_output` by its floor and ceiling and prefers the nearest
/// integer, rounding halves up.
pub fn interpret_sessions(crisp_output: f64) -> Result<SessionRecommendation, SessionError> {
    if !crisp_output.is_finite() || crisp_output < 0.0 || crisp_output > u32::MAX as f64 {
        return Err(SessionError::InvalidOutput(crisp_output));
    }
    let low_count = crisp_output.floor() as u32;
    let high_count = crisp_output.ceil() as u32;
    let preferred = if crisp_output - low_count as f64 >= 0.5 {
        high_count
    } else {
        low_count
    };
    Ok(SessionRecommendation {
        low_count,
        high_count,
        preferred,
        note: format!("{low_count} to {high_count} sessions per week ({preferred} preferred)"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_and_prefers_nearest() {
        let r = interpret_sessions(1.62).unwrap();
        assert_eq!((r.low_count, r.high_count, r.preferred), (1, 2, 2));
        assert_eq!(r.note, "1 to 2 sessions per week (2 preferred)");

        let r = interpret_sessions(2.0).unwrap();
        assert_eq!((r.low_count, r.high_count, r.preferred), (2, 2, 2));

        assert_eq!(interpret_sessions(1.5).unwrap().preferred, 2);
        assert_eq!(interpret_sessions(1.49).unwrap().preferred, 1);
        assert_eq!(interpret_sessions(0.0).unwrap().high_count, 0);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(interpret_sessions(-0.1).is_err());
        assert!(interpret_sessions(f64::NAN).is_err());
        assert!(interpret_sessions(f64::INFINITY).is_err());
    }
}
