//! Exact Euclidean projection onto the per-measurement feasible sets
//! `{ s (xi + x) w >= |y|, t w >= 0 }` and their slack-free analogues.
//!
//! Infeasible points project onto the hyperbola boundary; the stationarity
//! system reduces to one quartic in w, whose admissible real root determines
//! the multiplier and hence the projected point.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::poly::{real_roots, Quartic};

/// Sign data of one measurement: `y`, `s = sign(y)` and the branch selector `t`.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolaBranch {
    y: f64,
    s: f64,
    t: f64,
}

/// Which stationarity case produced the projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KktCase {
    /// Input already feasible (both multipliers zero).
    Feasible,
    /// Zero measurement: only the sign half-line is active.
    HalfLine,
    /// The hyperbola constraint is active; solved through the quartic.
    Hyperbola,
}

impl KktCase {
    /// Case number in the four-case analysis of the stationarity system.
    pub fn number(self) -> u8 {
        match self {
            KktCase::Feasible => 1,
            KktCase::HalfLine => 2,
            KktCase::Hyperbola => 4,
        }
    }
}

/// Roots this small are never the active-branch solution; `s (xi + x) w >= |y| > 0`
/// forbids w = 0 exactly.
const W_MIN: f64 = 1e-12;

/// Tolerance used by the quartic root extraction.
const ROOT_TOL: f64 = 1e-12;

impl HyperbolaBranch {
    pub fn new(y: f64, t: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::Degenerate("non-finite measurement".into()));
        }
        if t != 1.0 && t != -1.0 {
            return Err(Error::InvalidConfig("branch sign t must be -1 or +1".into()));
        }
        let s = if y == 0.0 {
            0.0
        } else if y > 0.0 {
            1.0
        } else {
            -1.0
        };
        Ok(HyperbolaBranch { y, s, t })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Constraint violation of a slack point (zero iff feasible).
    pub fn violation3(&self, x: f64, w: f64, xi: f64) -> f64 {
        let hyper = self.y.abs() - self.s * (xi + x) * w;
        hyper.max(0.0).max((-self.t * w).max(0.0))
    }

    /// Constraint violation of a slack-free point.
    pub fn violation2(&self, x: f64, w: f64) -> f64 {
        let hyper = self.y.abs() - self.s * x * w;
        hyper.max(0.0).max((-self.t * w).max(0.0))
    }
}

/// Projects `(x', w', xi')` onto `{ s (xi + x) w >= |y|, t w >= 0 }`.
pub fn project3(point: (f64, f64, f64), branch: &HyperbolaBranch) -> Result<(f64, f64, f64)> {
    project3_with_case(point, branch).map(|(p, _)| p)
}

/// As [`project3`], also reporting the active stationarity case.
pub fn project3_with_case(
    point: (f64, f64, f64),
    branch: &HyperbolaBranch,
) -> Result<((f64, f64, f64), KktCase)> {
    let (xp, wp, xip) = point;
    let (y, s, t) = (branch.y, branch.s, branch.t);
    let ay = y.abs();
    if y == 0.0 {
        // Only the half-line t w >= 0 constrains the point.
        return if t * wp >= 0.0 {
            Ok(((xp, wp, xip), KktCase::Feasible))
        } else {
            Ok(((xp, 0.0, xip), KktCase::HalfLine))
        };
    }
    if s * (xip + xp) * wp >= ay && t * wp >= 0.0 {
        return Ok(((xp, wp, xip), KktCase::Feasible));
    }
    // Active hyperbola: 2w^4 - 2w'w^3 + s|y|(x'+xi')w - y^2 = 0.
    let quartic = Quartic::new(2.0, -2.0 * wp, 0.0, s * ay * (xp + xip), -y * y);
    let roots = real_roots(&quartic, ROOT_TOL)?;
    let mut best: Option<((f64, f64, f64), f64)> = None;
    for &(w, _) in &roots {
        if t * w < 0.0 || w.abs() < W_MIN {
            continue;
        }
        let margin = ay - s * (xp + xip) * w;
        if margin < -1e-9 * (1.0 + ay + (s * (xp + xip) * w).abs()) {
            continue;
        }
        let mu = margin.max(0.0) / (2.0 * w * w);
        let x = xp + mu * s * w;
        let xi = xip + mu * s * w;
        let d = (x - xp).powi(2) + (w - wp).powi(2) + (xi - xip).powi(2);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some(((x, w, xi), d));
        }
    }
    match best {
        Some(((x, w, xi), _)) => {
            // Stationarity in w must be consistent with the multiplier from
            // the active-constraint elimination.
            debug_assert!(
                (w - wp - ((ay - s * (xp + xip) * w).max(0.0) / (2.0 * w * w)) * s * (x + xi)).abs()
                    <= 1e-8 * (1.0 + w.abs()),
                "multiplier inconsistent between stationarity equations"
            );
            Ok(((x, w, xi), KktCase::Hyperbola))
        }
        None => Err(Error::Projection(format!(
            "no admissible root for point ({xp}, {wp}, {xip}) on branch y={y}, t={t}"
        ))),
    }
}

/// Projects `(x', w')` onto `{ s x w >= |y|, t w >= 0 }`.
pub fn project2(point: (f64, f64), branch: &HyperbolaBranch) -> Result<(f64, f64)> {
    project2_with_case(point, branch).map(|(p, _)| p)
}

/// As [`project2`], also reporting the active stationarity case.
pub fn project2_with_case(
    point: (f64, f64),
    branch: &HyperbolaBranch,
) -> Result<((f64, f64), KktCase)> {
    let (xp, wp) = point;
    let (y, s, t) = (branch.y, branch.s, branch.t);
    let ay = y.abs();
    if y == 0.0 {
        return if t * wp >= 0.0 {
            Ok(((xp, wp), KktCase::Feasible))
        } else {
            Ok(((xp, 0.0), KktCase::HalfLine))
        };
    }
    if s * xp * wp >= ay && t * wp >= 0.0 {
        return Ok(((xp, wp), KktCase::Feasible));
    }
    // Active hyperbola: w^4 - w'w^3 + s|y| x' w - y^2 = 0.
    let quartic = Quartic::new(1.0, -wp, 0.0, s * ay * xp, -y * y);
    let roots = real_roots(&quartic, ROOT_TOL)?;
    let mut best: Option<((f64, f64), f64)> = None;
    for &(w, _) in &roots {
        if t * w < 0.0 || w.abs() < W_MIN {
            continue;
        }
        let margin = ay - s * xp * w;
        if margin < -1e-9 * (1.0 + ay + (s * xp * w).abs()) {
            continue;
        }
        let mu = margin.max(0.0) / (w * w);
        let x = xp + mu * s * w;
        let d = (x - xp).powi(2) + (w - wp).powi(2);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some(((x, w), d));
        }
    }
    match best {
        Some((p, _)) => Ok((p, KktCase::Hyperbola)),
        None => Err(Error::Projection(format!(
            "no admissible root for point ({xp}, {wp}) on branch y={y}, t={t}"
        ))),
    }
}

/// Projects a stacked `(x, w, xi)` (length 3L) or `(x, w)` (length 2L) vector
/// onto the product feasible set, coordinate by coordinate.
pub fn project_set(points: &DVector<f64>, instance: &ProblemInstance) -> Result<DVector<f64>> {
    let l = instance.l();
    let mut out = points.clone();
    if points.len() == 3 * l {
        for i in 0..l {
            let branch = HyperbolaBranch::new(instance.y()[i], instance.t()[i])?;
            let (x, w, xi) = project3((points[i], points[l + i], points[2 * l + i]), &branch)?;
            out[i] = x;
            out[l + i] = w;
            out[2 * l + i] = xi;
        }
    } else if points.len() == 2 * l {
        for i in 0..l {
            let branch = HyperbolaBranch::new(instance.y()[i], instance.t()[i])?;
            let (x, w) = project2((points[i], points[l + i]), &branch)?;
            out[i] = x;
            out[l + i] = w;
        }
    } else {
        return Err(Error::DimensionMismatch(format!(
            "point vector has length {}, expected {} or {}",
            points.len(),
            2 * l,
            3 * l
        )));
    }
    Ok(out)
}
