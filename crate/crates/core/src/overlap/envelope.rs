//! Modified envelope of a set of polylines in parallel coordinates.
//!
//! Between two adjacent axes every polyline is a segment
//! `y(t) = p + (q − p)·t`, `t ∈ [0, 1]`. The envelope of a strip is the
//! upper and lower boundary of those segments; both are piecewise linear
//! with breakpoints only at segment intersections. All geometry is done in
//! exact rational arithmetic, converted from the exact binary value of each
//! input, so membership tests never depend on rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Q = BigRational;

fn q(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| Error::InvalidInput(format!("non-finite coordinate {v}")))
}

/// Vertex of an envelope boundary within a strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub t: f64,
    pub value: f64,
    #[serde(skip)]
    exact: Option<(Q, Q)>,
}

impl Breakpoint {
    fn exact(t: Q, value: Q) -> Self {
        Breakpoint {
            t: t.to_f64().unwrap_or(f64::NAN),
            value: value.to_f64().unwrap_or(f64::NAN),
            exact: Some((t, value)),
        }
    }

    fn exact_pair(&self) -> Result<(Q, Q)> {
        match &self.exact {
            Some(pair) => Ok(pair.clone()),
            None => Ok((q(self.t)?, q(self.value)?)),
        }
    }
}

/// Envelope between the axes at positions `k` and `k + 1` of the axis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub from_axis: usize,
    pub to_axis: usize,
    pub upper: Vec<Breakpoint>,
    pub lower: Vec<Breakpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub axis_order: Vec<usize>,
    /// Value range covered on each axis, in axis-order positions.
    pub axis_bounds: Vec<(f64, f64)>,
    pub strips: Vec<Strip>,
}

impl Envelope {
    /// Piecewise-linear evaluation of the boundaries of strip `k` at `t`.
    pub fn bounds_at(&self, k: usize, t: f64) -> (f64, f64) {
        let strip = &self.strips[k];
        (interpolate(&strip.lower, t), interpolate(&strip.upper, t))
    }
}

fn interpolate(points: &[Breakpoint], t: f64) -> f64 {
    for w in points.windows(2) {
        if t <= w[1].t {
            let span = w[1].t - w[0].t;
            if span == 0.0 {
                return w[0].value;
            }
            let s = (t - w[0].t) / span;
            return w[0].value + s * (w[1].value - w[0].value);
        }
    }
    points.last().map_or(f64::NAN, |p| p.value)
}

/// Segment as `(intercept, slope)`.
type Line = (Q, Q);

/// Upper boundary of segments over `t ∈ [0, 1]`. Starts from the highest
/// segment at `t = 0` and repeatedly moves to the steeper segment it meets
/// first; on ties the steepest wins, since it dominates afterwards.
fn upper_chain(lines: &[Line]) -> Vec<(Q, Q)> {
    let one = Q::from_integer(BigInt::from(1));
    let mut current = 0;
    for (i, l) in lines.iter().enumerate().skip(1) {
        let c = &lines[current];
        if l.0 > c.0 || (l.0 == c.0 && l.1 > c.1) {
            current = i;
        }
    }
    let mut t = Q::zero();
    let mut out = vec![(t.clone(), lines[current].0.clone())];
    loop {
        let (p, m) = &lines[current];
        let mut next: Option<(Q, usize)> = None;
        for (j, (pj, mj)) in lines.iter().enumerate() {
            if mj <= m {
                continue;
            }
            let tj = (p - pj) / (mj - m);
            if tj <= t || tj >= one {
                continue;
            }
            let better = match &next {
                None => true,
                Some((tb, b)) => tj < *tb || (tj == *tb && *mj > lines[*b].1),
            };
            if better {
                next = Some((tj, j));
            }
        }
        match next {
            Some((tj, j)) => {
                out.push((tj.clone(), p + m * &tj));
                t = tj;
                current = j;
            }
            None => {
                out.push((one.clone(), p + m));
                return out;
            }
        }
    }
}

fn dedup_lines(mut lines: Vec<Line>) -> Vec<Line> {
    lines.sort();
    lines.dedup();
    lines
}

/// Builds the upper and lower envelope of every strip of `polylines`
/// (full attribute vectors) drawn in `axis_order`.
pub fn build_modified_envelope(polylines: &[Vec<f64>], axis_order: &[usize]) -> Result<Envelope> {
    if polylines.is_empty() {
        return Err(Error::InvalidInput("envelope needs at least one polyline".into()));
    }
    if axis_order.is_empty() {
        return Err(Error::InvalidInput("empty axis order".into()));
    }
    let dim = polylines[0].len();
    for p in polylines {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
    }
    if let Some(&bad) = axis_order.iter().find(|&&a| a >= dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad + 1 });
    }

    let axis_bounds = axis_order
        .iter()
        .map(|&a| polylines.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[a]), hi.max(p[a]))))
        .collect();

    let mut strips = Vec::with_capacity(axis_order.len().saturating_sub(1));
    for w in axis_order.windows(2) {
        let (from, to) = (w[0], w[1]);
        let mut up = Vec::with_capacity(polylines.len());
        let mut down = Vec::with_capacity(polylines.len());
        for p in polylines {
            let (a, b) = (q(p[from])?, q(p[to])?);
            let slope = &b - &a;
            down.push((-a.clone(), -slope.clone()));
            up.push((a, slope));
        }
        let upper = upper_chain(&dedup_lines(up)).into_iter().map(|(t, v)| Breakpoint::exact(t, v)).collect();
        let lower = upper_chain(&dedup_lines(down)).into_iter().map(|(t, v)| Breakpoint::exact(t, -v)).collect();
        strips.push(Strip { from_axis: from, to_axis: to, upper, lower });
    }
    Ok(Envelope { axis_order: axis_order.to_vec(), axis_bounds, strips })
}

/// Whether the polyline of `case` stays inside the envelope on every strip.
/// Both the case and the boundaries are linear between breakpoints, so
/// checking the breakpoints decides the whole strip.
pub fn envelope_contains(envelope: &Envelope, case: &[f64]) -> Result<bool> {
    if let Some(&bad) = envelope.axis_order.iter().find(|&&a| a >= case.len()) {
        return Err(Error::DimensionMismatch { expected: bad + 1, found: case.len() });
    }
    for (&axis, &(lo, hi)) in envelope.axis_order.iter().zip(&envelope.axis_bounds) {
        if !(lo <= case[axis] && case[axis] <= hi) {
            return Ok(false);
        }
    }
    for strip in &envelope.strips {
        let a = q(case[strip.from_axis])?;
        let slope = q(case[strip.to_axis])? - &a;
        let at = |t: &Q| &a + &slope * t;
        for bp in &strip.upper {
            let (t, v) = bp.exact_pair()?;
            if at(&t) > v {
                return Ok(false);
            }
        }
        for bp in &strip.lower {
            let (t, v) = bp.exact_pair()?;
            if at(&t) < v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_polyline_is_its_own_envelope() {
        let e = build_modified_envelope(&[vec![0.2, 0.8]], &[0, 1]).unwrap();
        let s = &e.strips[0];
        assert_eq!(s.upper.len(), 2);
        assert_eq!(s.upper, s.lower);
        assert!(envelope_contains(&e, &[0.2, 0.8]).unwrap());
        assert!(!envelope_contains(&e, &[0.2, 0.7]).unwrap());
    }

    #[test]
    fn crossing_segments_break_at_intersection() {
        // 0 -> 1 and 1 -> 0 cross at t = 0.5, value 0.5.
        let e = build_modified_envelope(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[0, 1]).unwrap();
        let s = &e.strips[0];
        let up: Vec<(f64, f64)> = s.upper.iter().map(|b| (b.t, b.value)).collect();
        let down: Vec<(f64, f64)> = s.lower.iter().map(|b| (b.t, b.value)).collect();
        assert_eq!(up, vec![(0.0, 1.0), (0.5, 0.5), (1.0, 1.0)]);
        assert_eq!(down, vec![(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]);
        // The region pinches to a point at t = 0.5.
        assert!(envelope_contains(&e, &[0.5, 0.5]).unwrap());
        assert!(!envelope_contains(&e, &[0.4, 0.4]).unwrap());
        assert!(envelope_contains(&e, &[0.25, 0.75]).unwrap());
        assert!(!envelope_contains(&e, &[0.0, 0.0]).unwrap());
    }

    #[test]
    fn concurrent_lines_yield_one_breakpoint() {
        // Three segments through (0.5, 0.5).
        let lines = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.25, 0.75]];
        let e = build_modified_envelope(&lines, &[0, 1]).unwrap();
        assert_eq!(e.strips[0].upper.len(), 3);
        assert_eq!(e.strips[0].lower.len(), 3);
    }

    #[test]
    fn axis_order_selects_and_permutes() {
        let e = build_modified_envelope(&[vec![0.0, 5.0, 1.0]], &[2, 0]).unwrap();
        assert_eq!(e.strips.len(), 1);
        assert_eq!((e.strips[0].from_axis, e.strips[0].to_axis), (2, 0));
        assert_eq!(e.axis_bounds, vec![(1.0, 1.0), (0.0, 0.0)]);
        assert!(envelope_contains(&e, &[0.0, 123.0, 1.0]).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_modified_envelope(&[], &[0]).is_err());
        assert!(build_modified_envelope(&[vec![0.0]], &[1]).is_err());
        let e = build_modified_envelope(&[vec![0.0, 1.0]], &[0, 1]).unwrap();
        assert!(envelope_contains(&e, &[0.0]).is_err());
    }

    #[test]
    fn exactness_is_kept_for_unrepresentable_intersections() {
        // Intersection at t = 1/3 is not a binary fraction.
        let e = build_modified_envelope(&[vec![0.0, 1.0], vec![0.5, 0.0]], &[0, 1]).unwrap();
        let (t, v) = e.strips[0].upper[1].exact_pair().unwrap();
        assert_eq!(t, Q::new(BigInt::from(1), BigInt::from(3)));
        assert_eq!(v, Q::new(BigInt::from(1), BigInt::from(3)));
    }
}
