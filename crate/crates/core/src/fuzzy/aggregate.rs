use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{FuzzyError, LinguisticVariable, MembershipFunction};
use crate::par::{self, Execution};

/// Default number of centroid samples across the output universe.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// Samples handled per work unit when summing the centroid. Fixed so the
/// floating-point summation order does not depend on the thread count.
const CENTROID_CHUNK: usize = 2048;

/// Output term clipping levels after max-aggregation.
///
/// The set it denotes is `x ↦ max_t min(α_t, μ_t(x))`; see
/// [`AggregatedOutputSet::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedOutputSet {
    pub variable: String,
    pub term_alphas: IndexMap<String, f64>,
}

impl AggregatedOutputSet {
    pub fn alpha(&self, term: &str) -> Option<f64> {
        self.term_alphas.get(term).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.term_alphas.values().all(|&a| a <= 0.0)
    }

    /// Pointwise membership of the aggregated set at `x`.
    pub fn evaluate(&self, variable: &LinguisticVariable, x: f64) -> f64 {
        clipped_max(&self.clipped_terms(variable), x)
    }

    fn clipped_terms<'v>(
        &self,
        variable: &'v LinguisticVariable,
    ) -> Vec<(f64, &'v MembershipFunction)> {
        variable
            .terms()
            .iter()
            .filter_map(|t| {
                let alpha = self.alpha(&t.name)?;
                (alpha > 0.0).then_some((alpha, &t.mf))
            })
            .collect()
    }
}

fn clipped_max(terms: &[(f64, &MembershipFunction)], x: f64) -> f64 {
    terms
        .iter()
        .map(|(alpha, mf)| alpha.min(mf.degree(x)))
        .fold(0.0, f64::max)
}

/// Max-combines `(term, α)` contributions per output term. Terms without a
/// contribution get 0.
pub fn aggregate<'a, I>(
    contributions: I,
    variable: &LinguisticVariable,
) -> Result<AggregatedOutputSet, FuzzyError>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut term_alphas: IndexMap<String, f64> = variable
        .terms()
        .iter()
        .map(|t| (t.name.clone(), 0.0))
        .collect();
    for (term, alpha) in contributions {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(FuzzyError::DegreeOutOfRange {
                variable: variable.name().to_string(),
                term: term.to_string(),
                degree: alpha,
            });
        }
        let slot = term_alphas
            .get_mut(term)
            .ok_or_else(|| FuzzyError::UnknownTerm {
                variable: variable.name().to_string(),
                term: term.to_string(),
            })?;
        *slot = slot.max(alpha);
    }
    Ok(AggregatedOutputSet {
        variable: variable.name().to_string(),
        term_alphas,
    })
}

/// Center of gravity of the aggregated set, `Σ x·μ(x) / Σ μ(x)` over
/// `resolution` uniformly spaced samples with both endpoints included.
pub fn defuzzify_centroid(
    set: &AggregatedOutputSet,
    variable: &LinguisticVariable,
    resolution: usize,
) -> Result<f64, FuzzyError> {
    defuzzify_centroid_with(set, variable, resolution, Execution::default())
}

pub fn defuzzify_centroid_with(
    set: &AggregatedOutputSet,
    variable: &LinguisticVariable,
    resolution: usize,
    execution: Execution,
) -> Result<f64, FuzzyError> {
    if resolution < 2 {
        return Err(FuzzyError::InvalidResolution(resolution));
    }
    if set.variable != variable.name() {
        return Err(FuzzyError::VariableMismatch {
            expected: variable.name().to_string(),
            found: set.variable.clone(),
        });
    }
    if set.is_empty() {
        return Err(FuzzyError::NoRuleFired {
            variable: set.variable.clone(),
        });
    }
    let universe = variable.universe();
    let terms = set.clipped_terms(variable);
    let chunks = resolution.div_ceil(CENTROID_CHUNK);
    let partial = |chunk: usize| {
        let start = chunk * CENTROID_CHUNK;
        let end = (start + CENTROID_CHUNK).min(resolution);
        let mut moment = 0.0;
        let mut mass = 0.0;
        for i in start..end {
            let x = universe.sample(i, resolution);
            let mu = clipped_max(&terms, x);
            moment += x * mu;
            mass += mu;
        }
        (moment, mass)
    };
    let sums = par::map_indexed(chunks, execution, partial);
    let (moment, mass) = sums
        .into_iter()
        .fold((0.0, 0.0), |(m, w), (dm, dw)| (m + dm, w + dw));
    if mass <= 0.0 {
        // every clipped term falls between sample points
        return Err(FuzzyError::NoRuleFired {
            variable: set.variable.clone(),
        });
    }
    Ok((moment / mass).clamp(universe.lo(), universe.hi()))
}
