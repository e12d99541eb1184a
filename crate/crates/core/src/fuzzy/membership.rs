use serde::{Deserialize, Serialize};

use super::FuzzyError;

/// Closed numeric interval a linguistic variable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniverseInterval {
    lo: f64,
    hi: f64,
}

impl UniverseInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuzzyError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(FuzzyError::InvalidUniverse { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `i`-th of `n` uniformly spaced samples, endpoints included.
    pub(crate) fn sample(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.hi
        } else {
            self.lo + self.width() * (i as f64) / ((n - 1) as f64)
        }
    }
}

/// Piecewise-linear membership shapes.
///
/// Every shape is zero outside its support and interpolates linearly between
/// its vertices. Triangles and trapezoids may have vertical edges (`a == b`
/// or `c == d`), which yields a shoulder at the universe boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
    PiecewiseLinear { points: Vec<(f64, f64)> },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        let mf = MembershipFunction::Triangular { a, b, c };
        mf.check()?;
        Ok(mf)
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        let mf = MembershipFunction::Trapezoidal { a, b, c, d };
        mf.check()?;
        Ok(mf)
    }

    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self, FuzzyError> {
        let mf = MembershipFunction::PiecewiseLinear { points };
        mf.check()?;
        Ok(mf)
    }

    /// Re-checks the shape invariants; deserialized values bypass the
    /// constructors.
    pub fn check(&self) -> Result<(), FuzzyError> {
        let bad = |reason: &str| Err(FuzzyError::InvalidShape(reason.to_string()));
        match *self {
            MembershipFunction::Triangular { a, b, c } => {
                if ![a, b, c].iter().all(|v| v.is_finite()) {
                    return bad("triangle vertices must be finite");
                }
                if !(a <= b && b <= c && a < c) {
                    return bad("triangle needs a <= b <= c and a < c");
                }
            }
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                if ![a, b, c, d].iter().all(|v| v.is_finite()) {
                    return bad("trapezoid vertices must be finite");
                }
                if !(a <= b && b <= c && c <= d && a < d) {
                    return bad("trapezoid needs a <= b <= c <= d and a < d");
                }
            }
            MembershipFunction::PiecewiseLinear { ref points } => {
                if points.is_empty() {
                    return bad("piecewise-linear shape needs at least one point");
                }
                for &(x, mu) in points {
                    if !x.is_finite() || !mu.is_finite() {
                        return bad("points must be finite");
                    }
                    if !(0.0..=1.0).contains(&mu) {
                        return bad("point degrees must lie in [0, 1]");
                    }
                }
                if points.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("point x-coordinates must be strictly increasing");
                }
            }
        }
        Ok(())
    }

    /// Smallest closed interval outside which the degree is zero.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            MembershipFunction::Triangular { a, c, .. } => (a, c),
            MembershipFunction::Trapezoidal { a, d, .. } => (a, d),
            MembershipFunction::PiecewiseLinear { ref points } => {
                (points[0].0, points[points.len() - 1].0)
            }
        }
    }

    /// Membership degree of `x`. Total: any real is accepted.
    pub fn degree(&self, x: f64) -> f64 {
        match *self {
            MembershipFunction::Triangular { a, b, c } => trapezoid(a, b, b, c, x),
            MembershipFunction::Trapezoidal { a, b, c, d } => trapezoid(a, b, c, d, x),
            MembershipFunction::PiecewiseLinear { ref points } => polyline(points, x),
        }
    }

    /// Vertex list describing the shape, suitable for plotting.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        match *self {
            MembershipFunction::Triangular { a, b, c } => vec![(a, 0.0), (b, 1.0), (c, 0.0)],
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                vec![(a, 0.0), (b, 1.0), (c, 1.0), (d, 0.0)]
            }
            MembershipFunction::PiecewiseLinear { ref points } => points.clone(),
        }
    }

    /// Same shape moved right by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        match *self {
            MembershipFunction::Triangular { a, b, c } => MembershipFunction::Triangular {
                a: a + delta,
                b: b + delta,
                c: c + delta,
            },
            MembershipFunction::Trapezoidal { a, b, c, d } => MembershipFunction::Trapezoidal {
                a: a + delta,
                b: b + delta,
                c: c + delta,
                d: d + delta,
            },
            MembershipFunction::PiecewiseLinear { ref points } => {
                MembershipFunction::PiecewiseLinear {
                    points: points.iter().map(|&(x, mu)| (x + delta, mu)).collect(),
                }
            }
        }
    }
}

/// Free-function form of [`MembershipFunction::degree`].
pub fn membership_degree(mf: &MembershipFunction, x: f64) -> f64 {
    mf.degree(x)
}

fn trapezoid(a: f64, b: f64, c: f64, d: f64, x: f64) -> f64 {
    if x < a || x > d {
        0.0
    } else if x < b {
        (x - a) / (b - a)
    } else if x <= c {
        1.0
    } else {
        (d - x) / (d - c)
    }
}

fn polyline(points: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (points[0], points[points.len() - 1]);
    if x < first.0 || x > last.0 {
        return 0.0;
    }
    // index of the first vertex strictly right of x
    let right = points.partition_point(|&(px, _)| px <= x);
    if right == 0 {
        return first.1;
    }
    if right == points.len() {
        return last.1;
    }
    let (x0, y0) = points[right - 1];
    let (x1, y1) = points[right];
    if x == x0 {
        return y0;
    }
    let t = (x - x0) / (x1 - x0);
    (y0 + t * (y1 - y0)).clamp(0.0, 1.0)
}
