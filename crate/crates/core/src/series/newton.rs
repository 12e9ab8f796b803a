//! Root valuations of a polynomial over the series field via the lower
//! convex hull of its coefficient valuations.

use crate::scalars::Rat;
use crate::valgroup::GroupElement;

use super::{SeriesError, TruncatedSeries, Val};

/// Computes the multiset of root valuations, with multiplicities, of
/// `a_0 + a_1 Z + ... + a_d Z^d`. Zero roots (when `a_0 = 0`) contribute
/// the +infinity valuation; finite slopes come from the lower convex hull
/// of the points `(i, val(a_i))`, with lex-valued slopes for rank > 1.
/// Multiplicities always sum to the degree.
///
/// Exactly zero coefficients are skipped; a coefficient whose valuation
/// is hidden by its truncation is an error, as is a zero leading
/// coefficient.
pub fn newton_polygon(
    coeffs: &[TruncatedSeries],
) -> Result<Vec<(Val, usize)>, SeriesError> {
    let d = match coeffs.len() {
        0 => return Err(SeriesError::ZeroLeadingCoefficient),
        n => n - 1,
    };
    if coeffs[d].is_exact_zero() {
        return Err(SeriesError::ZeroLeadingCoefficient);
    }
    let mut points: Vec<(usize, GroupElement)> = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        match c.val() {
            Ok(v) => points.push((i, v)),
            Err(SeriesError::IndeterminateValuation(_)) => {
                return Err(SeriesError::IndeterminateCoefficient { index: i })
            }
            Err(e) => return Err(e),
        }
    }
    let mut out = Vec::new();
    let i_min = points[0].0;
    if i_min > 0 {
        out.push((Val::Infinite, i_min));
    }
    if points.len() == 1 {
        // Z^d * unit: only the zero roots above.
        return Ok(out);
    }

    // Lower convex hull, left to right. A point is kept only while the
    // chain turns strictly upward; collinear points merge into one segment.
    let mut hull: Vec<(usize, GroupElement)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            if slope_le(a, b, &p) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (il, vl) = &w[0];
        let (ir, vr) = &w[1];
        let mult = ir - il;
        let inv_mult = Rat::new(1, mult as i64);
        let root_val = (vl - vr).scale(&inv_mult);
        slopes.push((Val::Finite(root_val), mult));
    }
    // Ascending root valuation, zero roots last.
    out.extend(slopes);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Whether slope(a,b) >= slope(b,c), i.e. b is not strictly below the
/// chord and must leave the lower hull. Exact comparison by clearing the
/// positive integer denominators.
fn slope_le(a: &(usize, GroupElement), b: &(usize, GroupElement), c: &(usize, GroupElement)) -> bool {
    let d_ab = Rat::from_int((b.0 - a.0) as i64);
    let d_bc = Rat::from_int((c.0 - b.0) as i64);
    // slope(a,b) >= slope(b,c)  <=>  (v_b - v_a) * d_bc >= (v_c - v_b) * d_ab
    let lhs = (&b.1 - &a.1).scale(&d_bc);
    let rhs = (&c.1 - &b.1).scale(&d_ab);
    lhs >= rhs
}
