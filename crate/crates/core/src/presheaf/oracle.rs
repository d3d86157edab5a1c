//! An independent homology computation for `K(π, 1)` and `K(π, 2)` through
//! classical (bi)simplicial bar constructions.
//!
//! For `n = 1` this is the normalized chain complex of the nerve of `π`.
//! For `n = 2` the pullback along the diagonal `Δ × Δ -> Θ_2` is the
//! bisimplicial set of `p × q` matrices over `π`, whose faces sum adjacent
//! rows (or columns) and drop the outer ones. Its diagonal has the same
//! homology as the total complex of the normalized double complex
//! (Eilenberg-Zilber), which is far smaller, so the total complex is used.

use std::collections::HashMap;

use crate::error::{Result, ThetaError};
use crate::gamma::{FiniteAbelianGroup, GroupElement};

use super::chain::BitMatrix;

/// A `rows × cols` matrix over `π`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<GroupElement>,
}

impl Matrix {
    fn at(&self, i: usize, j: usize) -> GroupElement {
        self.entries[i * self.cols + j]
    }

    fn transpose(&self) -> Matrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.at(i, j));
            }
        }
        Matrix { rows: self.cols, cols: self.rows, entries }
    }

    /// The `i`-th face of the bar construction on the rows, `0 <= i <= rows`.
    fn row_face(&self, pi: &FiniteAbelianGroup, i: usize) -> Matrix {
        let row = |r: usize| self.entries[r * self.cols..(r + 1) * self.cols].to_vec();
        let mut out: Vec<Vec<GroupElement>> = Vec::with_capacity(self.rows.saturating_sub(1));
        for r in 0..self.rows {
            if (i == 0 && r == 0) || (i == self.rows && r + 1 == self.rows) {
                continue;
            }
            if i > 0 && i < self.rows && r == i {
                let last = out.last_mut().expect("row i-1 already pushed");
                for (a, b) in last.iter_mut().zip(row(r)) {
                    *a = pi.add(*a, b);
                }
                continue;
            }
            out.push(row(r));
        }
        Matrix { rows: self.rows - 1, cols: self.cols, entries: out.concat() }
    }

    fn col_face(&self, pi: &FiniteAbelianGroup, j: usize) -> Matrix {
        self.transpose().row_face(pi, j).transpose()
    }

    /// Normalized: no all-neutral row and, when columns are a simplicial
    /// direction, no all-neutral column. The empty matrix is the basepoint.
    fn is_normalized(&self, zero: GroupElement, check_cols: bool) -> bool {
        let rows_ok = (0..self.rows).all(|i| (0..self.cols).any(|j| self.at(i, j) != zero));
        let cols_ok = (0..self.cols).all(|j| (0..self.rows).any(|i| self.at(i, j) != zero));
        rows_ok && (cols_ok || !check_cols)
    }
}

fn matrices(pi: &FiniteAbelianGroup, rows: usize, cols: usize, check_cols: bool) -> Vec<Matrix> {
    let zero = pi.zero();
    (0..rows * cols)
        .fold(vec![Vec::new()], |acc, _| {
            acc.into_iter()
                .flat_map(|prefix: Vec<GroupElement>| {
                    pi.elements().map(move |g| {
                        let mut p = prefix.clone();
                        p.push(g);
                        p
                    })
                })
                .collect()
        })
        .into_iter()
        .map(|entries| Matrix { rows, cols, entries })
        .filter(|m| m.is_normalized(zero, check_cols))
        .collect()
}

/// The face action used by the oracle, exposed for cross-checking against
/// `γ_2 ∘ δ_2`: applies the `i`-th row face then the `j`-th column face
/// (`None` leaves that direction alone). Entries are row-major.
pub fn oracle_action(
    pi: &FiniteAbelianGroup,
    rows: usize,
    cols: usize,
    entries: &[GroupElement],
    row_face: Option<usize>,
    col_face: Option<usize>,
) -> Vec<GroupElement> {
    let mut m = Matrix { rows, cols, entries: entries.to_vec() };
    if let Some(i) = row_face {
        m = m.row_face(pi, i);
    }
    if let Some(j) = col_face {
        m = m.col_face(pi, j);
    }
    m.entries
}

/// F₂ Betti numbers in degrees `0..max_dim` (degree `max_dim` itself would
/// need chains one degree higher).
pub fn oracle_multisimplicial(pi: &FiniteAbelianGroup, n: usize, max_dim: usize) -> Result<Vec<usize>> {
    // basis[d] lists the normalized generators in total degree d
    let basis: Vec<Vec<Matrix>> = match n {
        1 => (0..=max_dim).map(|d| matrices(pi, d, 1, false)).collect(),
        2 => (0..=max_dim)
            .map(|d| (0..=d).flat_map(|p| matrices(pi, p, d - p, true)).collect())
            .collect(),
        _ => {
            return Err(ThetaError::Unsupported(format!(
                "the multisimplicial oracle handles n <= 2, got n = {n}"
            )))
        }
    };
    let mut boundaries = vec![BitMatrix::zero(0, basis[0].len())];
    for d in 1..=max_dim {
        let index: HashMap<&Matrix, usize> = basis[d - 1].iter().enumerate().map(|(i, m)| (m, i)).collect();
        let columns = basis[d]
            .iter()
            .map(|m| {
                let mut faces = Vec::new();
                // n = 1 keeps a single column: the nerve's faces act on rows only
                for i in 0..=m.rows {
                    if m.rows > 0 {
                        faces.push(m.row_face(pi, i));
                    }
                }
                if n == 2 && m.cols > 0 {
                    for j in 0..=m.cols {
                        faces.push(m.col_face(pi, j));
                    }
                }
                // degenerate faces are absent from the index
                faces.iter().filter_map(|f| index.get(f).copied()).collect()
            })
            .collect();
        boundaries.push(BitMatrix::from_columns(basis[d - 1].len(), columns));
    }
    for d in 2..=max_dim {
        if !boundaries[d - 1].mul(&boundaries[d])?.is_zero() {
            return Err(ThetaError::Invariant(format!("oracle boundary squares to non-zero in degree {d}")));
        }
    }
    Ok((0..max_dim)
        .map(|d| basis[d].len() - boundaries[d].rank() - boundaries[d + 1].rank())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::h_pi_act;
    use crate::simplex::{hom_delta, SimplicialOperator};
    use crate::theta::{diagonal, gamma_n};

    #[test]
    fn nerve_of_z2() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        assert_eq!(oracle_multisimplicial(&z2, 1, 7).unwrap(), vec![1; 7]);
    }

    #[test]
    fn nerve_of_z3_has_trivial_mod_two_homology() {
        let z3 = FiniteAbelianGroup::cyclic(3);
        let b = oracle_multisimplicial(&z3, 1, 6).unwrap();
        assert_eq!(b, vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn bisimplicial_z2() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let b = oracle_multisimplicial(&z2, 2, 6).unwrap();
        assert_eq!(b[0], 1);
        assert_eq!((b[1], b[2]), (0, 1));
        // H*(K(Z/2,2); F2) is polynomial on classes in degrees 2, 3, 5, ...
        assert_eq!(b, vec![1, 0, 1, 1, 1, 2]);
    }

    #[test]
    fn unsupported_levels() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        assert!(matches!(oracle_multisimplicial(&z2, 3, 3), Err(ThetaError::Unsupported(_))));
    }

    /// All face operators `[m-1] -> [m]` plus the identity, as `None`.
    fn faces(m: usize) -> Vec<(Option<usize>, SimplicialOperator)> {
        let mut out = vec![(None, SimplicialOperator::identity(m))];
        if m > 0 {
            for i in 0..=m {
                let f = hom_delta(m - 1, m).into_iter().find(|f| f.is_injective() && !f.values().contains(&i)).unwrap();
                out.push((Some(i), f));
            }
        }
        out
    }

    #[test]
    fn matrix_faces_match_the_diagonal_action() {
        let pi = FiniteAbelianGroup::cyclic(3);
        for p in 0..=3 {
            for q in 0..=3 {
                for entries in (0..p * q).fold(vec![Vec::new()], |acc: Vec<Vec<GroupElement>>, _| {
                    acc.into_iter()
                        .flat_map(|pre| {
                            pi.elements().map(move |g| {
                                let mut v = pre.clone();
                                v.push(g);
                                v
                            })
                        })
                        .collect()
                }) {
                    for (i, f) in faces(p) {
                        for (j, g) in faces(q) {
                            let op = diagonal(&[f.clone(), g.clone()]).unwrap();
                            let expected = h_pi_act(&pi, &gamma_n(&op), &entries).unwrap();
                            // height-2 vertices of an empty row set collapse to nothing
                            let rows = if i.is_some() { p - 1 } else { p };
                            let cols = if j.is_some() { q - 1 } else { q };
                            let got = oracle_action(&pi, p, q, &entries, i, j);
                            assert_eq!(got.len(), rows * cols);
                            assert_eq!(got, expected, "p={p} q={q} i={i:?} j={j:?}");
                        }
                    }
                }
            }
        }
    }
}
