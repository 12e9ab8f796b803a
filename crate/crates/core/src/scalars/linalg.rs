//! Exact linear algebra over a declared residue subfield.
//!
//! Residues live in Q(t1, ..., tm); the declared residue field k is the
//! subfield generated by a subset of the variables. Linear questions over
//! k reduce to linear algebra with k-entries after clearing denominators
//! and decomposing along the monomials in the outside variables.

use std::collections::{BTreeMap, BTreeSet};

use super::{MPoly, Monomial, RatFunc};

/// Solves `sum_i rho_i * basis_i = target` with every `rho_i` in the
/// subfield generated by the `inside` variables. Returns `None` when the
/// system has no such solution.
pub fn solve_over_subfield(
    basis: &[RatFunc],
    target: &RatFunc,
    inside: &BTreeSet<usize>,
) -> Option<Vec<RatFunc>> {
    let (matrix, rhs) = outside_system(basis, Some(target), inside);
    gauss_solve(matrix, rhs.expect("target supplied"))
}

/// Finds a nonzero `rho` over the subfield with `sum_i rho_i * residues_i
/// = 0`, or `None` when the family is linearly independent over it.
pub fn dependency_over_subfield(
    residues: &[RatFunc],
    inside: &BTreeSet<usize>,
) -> Option<Vec<RatFunc>> {
    let (matrix, _) = outside_system(residues, None, inside);
    gauss_kernel(matrix, residues.len())
}

/// Clears denominators jointly and decomposes by outside-variable
/// monomials: returns the row-major matrix (rows indexed by outside
/// monomials, columns by input index) and the matching right-hand side.
fn outside_system(
    entries: &[RatFunc],
    target: Option<&RatFunc>,
    inside: &BTreeSet<usize>,
) -> (Vec<Vec<RatFunc>>, Option<Vec<RatFunc>>) {
    // common multiplier: product of all denominators
    let all: Vec<&RatFunc> = entries.iter().chain(target).collect();
    let cleared: Vec<MPoly> = all
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut p = r.numer().clone();
            for (j, other) in all.iter().enumerate() {
                if i != j {
                    p = &p * other.denom();
                }
            }
            p
        })
        .collect();
    let buckets: Vec<BTreeMap<Monomial, MPoly>> = cleared
        .iter()
        .map(|p| decompose_by_outside(p, inside))
        .collect();
    let mut rows: BTreeSet<Monomial> = BTreeSet::new();
    for b in &buckets {
        rows.extend(b.keys().cloned());
    }
    let n = entries.len();
    let mut matrix = Vec::with_capacity(rows.len());
    let mut rhs = target.map(|_| Vec::with_capacity(rows.len()));
    for row in &rows {
        let mut r = Vec::with_capacity(n);
        for b in buckets.iter().take(n) {
            r.push(bucket_entry(b, row));
        }
        matrix.push(r);
        if let Some(rhs) = &mut rhs {
            rhs.push(bucket_entry(&buckets[n], row));
        }
    }
    (matrix, rhs)
}

fn bucket_entry(b: &BTreeMap<Monomial, MPoly>, row: &Monomial) -> RatFunc {
    b.get(row)
        .map(|p| RatFunc::from_poly(p.clone()))
        .unwrap_or_else(RatFunc::zero)
}

fn decompose_by_outside(p: &MPoly, inside: &BTreeSet<usize>) -> BTreeMap<Monomial, MPoly> {
    let mut out: BTreeMap<Monomial, MPoly> = BTreeMap::new();
    for (mono, coef) in p.terms() {
        let (im, om) = mono.split(inside);
        out.entry(om)
            .or_insert_with(MPoly::zero)
            .add_term(im, coef.clone());
    }
    out
}

/// Gaussian elimination for `A x = b`; free variables are set to zero.
fn gauss_solve(mut a: Vec<Vec<RatFunc>>, mut b: Vec<RatFunc>) -> Option<Vec<RatFunc>> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].recip().expect("nonzero pivot");
        for c in col..cols {
            a[row][c] = a[row][c].mul(&inv);
        }
        b[row] = b[row].mul(&inv);
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    a[r][c] = a[r][c].sub(&f.mul(&a[row][c]));
                }
                b[r] = b[r].sub(&f.mul(&b[row]));
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    // consistency of the remaining rows
    for r in row..rows {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![RatFunc::zero(); cols];
    for col in 0..cols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = b[r].clone();
        }
    }
    Some(x)
}

/// A nonzero kernel vector of `A`, or `None` when the columns are
/// independent.
fn gauss_kernel(mut a: Vec<Vec<RatFunc>>, cols: usize) -> Option<Vec<RatFunc>> {
    let rows = a.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip().expect("nonzero pivot");
        for c in col..cols {
            a[row][c] = a[row][c].mul(&inv);
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    a[r][c] = a[r][c].sub(&f.mul(&a[row][c]));
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free = (0..cols).find(|&c| pivot_of_col[c].is_none())?;
    let mut x = vec![RatFunc::zero(); cols];
    x[free] = RatFunc::one();
    for col in 0..cols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = -&a[r][free];
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn independent_over_q() {
        // 1 and t1 are independent over Q
        let r = dependency_over_subfield(&[RatFunc::one(), RatFunc::var(1)], &vars(&[]));
        assert!(r.is_none());
    }

    #[test]
    fn dependent_over_larger_field() {
        // t2 and t1*t2 are dependent over Q(t1): t1 * t2 - (t1 t2) = 0
        let f = [RatFunc::var(2), RatFunc::var(1).mul(&RatFunc::var(2))];
        let rho = dependency_over_subfield(&f, &vars(&[1])).unwrap();
        // check: sum rho_i f_i = 0
        let mut acc = RatFunc::zero();
        for (r, x) in rho.iter().zip(&f) {
            acc = acc.add(&r.mul(x));
        }
        assert!(acc.is_zero());
        assert!(rho.iter().any(|r| !r.is_zero()));
        // but independent over Q
        assert!(dependency_over_subfield(&f, &vars(&[])).is_none());
    }

    #[test]
    fn solve_mixed() {
        // rho1 * 1 + rho2 * t2 = 3 + 5 t2 over Q
        let basis = [RatFunc::one(), RatFunc::var(2)];
        let target = RatFunc::from_int(3).add(&RatFunc::var(2).scale(&crate::scalars::Rat::from_int(5)));
        let rho = solve_over_subfield(&basis, &target, &vars(&[])).unwrap();
        assert!(rho[0].equal(&RatFunc::from_int(3)));
        assert!(rho[1].equal(&RatFunc::from_int(5)));
        // t2 itself is not solvable from {1} over Q
        assert!(solve_over_subfield(&[RatFunc::one()], &RatFunc::var(2), &vars(&[])).is_none());
        // ... but solvable over Q(t2)
        assert!(solve_over_subfield(&[RatFunc::one()], &RatFunc::var(2), &vars(&[2])).is_some());
    }

    #[test]
    fn solution_entries_stay_in_subfield() {
        // t1*t2 = rho * t2 needs rho = t1 in Q(t1)
        let rho = solve_over_subfield(
            &[RatFunc::var(2)],
            &RatFunc::var(1).mul(&RatFunc::var(2)),
            &vars(&[1]),
        )
        .unwrap();
        assert!(rho[0].equal(&RatFunc::var(1)));
        // and is rejected over Q
        assert!(solve_over_subfield(
            &[RatFunc::var(2)],
            &RatFunc::var(1).mul(&RatFunc::var(2)),
            &vars(&[]),
        )
        .is_none());
    }
}
