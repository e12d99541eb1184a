//! Brute-force reference for the centroid of a clipped, max-combined output
//! set. Shares no code with the engine: shapes are re-expressed as vertex
//! lists, evaluated by linear search and integrated with the trapezoid rule.

#![allow(dead_code)]

use fuzzyshell::{LinguisticVariable, MembershipFunction};

fn vertices(mf: &MembershipFunction) -> Vec<(f64, f64)> {
    match mf {
        MembershipFunction::Triangular { a, b, c } => vec![(*a, 0.0), (*b, 1.0), (*c, 0.0)],
        MembershipFunction::Trapezoidal { a, b, c, d } => {
            vec![(*a, 0.0), (*b, 1.0), (*c, 1.0), (*d, 0.0)]
        }
        MembershipFunction::PiecewiseLinear { points } => points.clone(),
    }
}

fn eval(vs: &[(f64, f64)], x: f64) -> f64 {
    if x < vs[0].0 || x > vs[vs.len() - 1].0 {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    let mut hit = false;
    for w in vs.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x >= x0 && x <= x1 {
            let y = if x1 == x0 {
                y0.max(y1)
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            };
            // at a vertical edge take the upper value
            best = if hit { best.max(y) } else { y };
            hit = true;
        }
    }
    if vs.len() == 1 && x == vs[0].0 {
        return vs[0].1;
    }
    best
}

/// `max_t min(alpha_t, mu_t(x))`.
pub fn clipped(variable: &LinguisticVariable, alphas: &[(String, f64)], x: f64) -> f64 {
    let mut out: f64 = 0.0;
    for term in variable.terms() {
        let alpha = alphas
            .iter()
            .find(|(t, _)| *t == term.name)
            .map_or(0.0, |(_, a)| *a);
        out = out.max(alpha.min(eval(&vertices(&term.mf), x)));
    }
    out
}

/// Centroid by trapezoid-rule integration over `samples` points.
pub fn centroid(variable: &LinguisticVariable, alphas: &[(String, f64)], samples: usize) -> f64 {
    let lo = variable.universe().lo();
    let hi = variable.universe().hi();
    let h = (hi - lo) / (samples - 1) as f64;
    let mut moment = 0.0;
    let mut mass = 0.0;
    for i in 0..samples {
        let x = lo + h * i as f64;
        let w = if i == 0 || i + 1 == samples { 0.5 } else { 1.0 };
        let mu = clipped(variable, alphas, x);
        moment += w * x * mu;
        mass += w * mu;
    }
    moment / mass
}

/// Oracle at ten times the engine's resolution.
pub fn centroid_10x(
    variable: &LinguisticVariable,
    alphas: &[(String, f64)],
    resolution: usize,
) -> f64 {
    centroid(variable, alphas, 10 * (resolution - 1) + 1)
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}
