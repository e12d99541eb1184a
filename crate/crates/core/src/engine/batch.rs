use super::{ConsultError, ConsultationResult, Engine, Inputs};
use crate::par::{self, Execution};

pub(super) fn run(
    engine: &Engine<'_>,
    batch: &[Inputs],
    execution: Execution,
) -> Vec<Result<ConsultationResult, ConsultError>> {
    par::map_slice(batch, execution, |inputs| engine.infer(inputs))
}

#[cfg(test)]
mod tests {
    use crate::fixture;
    use crate::par::Execution;

    use super::*;

    #[test]
    fn parallel_batch_matches_sequential() {
        let kb = fixture::speech_therapy_kb();
        let engine = Engine::new(&kb).unwrap();
        let batch: Vec<Inputs> = (0..64)
            .map(|i| {
                let t = i as f64 / 63.0;
                [
                    ("speech_problems_level".to_string(), 0.5 + 2.0 * t),
                    ("family_implication".to_string(), 1.2 + 1.6 * t),
                    ("child_age".to_string(), 3.0 + 4.0 * (1.0 - t)),
                ]
                .into()
            })
            .collect();
        let seq = engine.infer_batch(&batch, Execution::Sequential);
        let par = engine.infer_batch(&batch, Execution::Parallel);
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 64);
        for (inputs, result) in batch.iter().zip(&seq) {
            assert_eq!(result, &engine.infer(inputs));
        }
    }
}
