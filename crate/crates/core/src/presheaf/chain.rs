//! Mod-2 cellular chains of a finite `Θ_n`-set.

use std::collections::HashMap;

use rayon::prelude::*;

use super::ThetaSet;
use crate::error::{Result, ThetaError};
use crate::theta::monos_theta;
use crate::trees::LevelTree;

/// A matrix over F₂ stored as bit-packed columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    columns: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, columns: vec![vec![0; rows.div_ceil(64)]; cols] }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<usize>>) -> Self {
        let mut m = BitMatrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for &i in col {
                m.toggle(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.columns[j][i / 64] >> (i % 64) & 1 == 1
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.columns[j][i / 64] ^= 1 << (i % 64);
    }

    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    /// Rank by Gaussian elimination on the columns.
    pub fn rank(&self) -> usize {
        // pivots[bit] = reduced column with leading bit `bit`
        let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
        let mut rank = 0;
        for col in &self.columns {
            let mut v = col.clone();
            while let Some(lead) = leading_bit(&v) {
                match pivots.get(&lead) {
                    Some(p) => v.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                    None => {
                        pivots.insert(lead, v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// `self · other` over F₂.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols() != other.rows {
            return Err(ThetaError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let words = self.rows.div_ceil(64);
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut out = vec![0u64; words];
                for k in 0..other.rows {
                    if col[k / 64] >> (k % 64) & 1 == 1 {
                        out.iter_mut().zip(&self.columns[k]).for_each(|(a, b)| *a ^= b);
                    }
                }
                out
            })
            .collect();
        Ok(BitMatrix { rows: self.rows, columns })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&w| w == 0))
    }
}

fn leading_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| 64 * i + 63 - w.leading_zeros() as usize)
}

/// Mod-2 chains in degrees `0..=max_dim`; `boundaries[d]` maps degree `d` to
/// degree `d-1` (`boundaries[0]` is the zero map to nothing).
#[derive(Clone, Debug)]
pub struct F2ChainComplex {
    basis: Vec<Vec<String>>,
    boundaries: Vec<BitMatrix>,
}

impl F2ChainComplex {
    pub fn max_dim(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn rank_of_chains(&self, d: usize) -> usize {
        self.basis[d].len()
    }

    /// Human-readable names of the basis cells in degree `d`.
    pub fn basis(&self, d: usize) -> &[String] {
        &self.basis[d]
    }

    pub fn boundary(&self, d: usize) -> &BitMatrix {
        &self.boundaries[d]
    }
}

/// Builds the complex with `∂x = Σ φ^* x` over codimension-one monos
/// `φ: S ↣ T`, keeping the summands that are non-degenerate, and checks
/// `∂∂ = 0`.
pub fn chain_complex<X>(x_set: &X, max_dim: usize) -> Result<F2ChainComplex>
where
    X: ThetaSet + Sync,
    X::Element: Send + Sync,
{
    let n = x_set.level();
    let cells: Vec<Vec<(LevelTree, X::Element)>> = (0..=max_dim)
        .map(|d| {
            x_set
                .cell_trees(d)
                .into_iter()
                .flat_map(|t| x_set.nondegenerate(&t).into_iter().map(move |x| (t.clone(), x)))
                .collect()
        })
        .collect();
    let mut boundaries = vec![BitMatrix::zero(0, cells[0].len())];
    for d in 1..=max_dim {
        let index: HashMap<&(LevelTree, X::Element), usize> =
            cells[d - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let faces = x_set.cell_trees(d - 1);
        let mut targets: Vec<&LevelTree> = cells[d].iter().map(|(t, _)| t).collect();
        targets.dedup();
        let monos: HashMap<&LevelTree, Vec<_>> = targets
            .par_iter()
            .map(|&t| {
                let ms: Vec<_> = faces.iter().flat_map(|s| monos_theta(s, t, n).expect("heights bounded")).collect();
                (t, ms)
            })
            .collect();
        let columns: Vec<Vec<usize>> = cells[d]
            .par_iter()
            .map(|(t, x)| {
                let mut col: Vec<usize> = Vec::new();
                for phi in &monos[t] {
                    let face = (phi.source().clone(), x_set.act(phi, x));
                    if let Some(&i) = index.get(&face) {
                        col.push(i);
                    }
                }
                col
            })
            .collect();
        boundaries.push(BitMatrix::from_columns(cells[d - 1].len(), columns));
    }
    for d in 2..=max_dim {
        let square = boundaries[d - 1].mul(&boundaries[d])?;
        if let Some(j) = (0..square.cols()).find(|&j| !square.column_support(j).is_empty()) {
            let (t, x) = &cells[d][j];
            return Err(ThetaError::Invariant(format!("boundary of boundary of cell {t} {x:?} is not zero")));
        }
    }
    let basis = cells.iter().map(|cs| cs.iter().map(|(t, x)| format!("{t} {x:?}")).collect()).collect();
    Ok(F2ChainComplex { basis, boundaries })
}

/// The F₂ Betti number in degree `d`; needs the boundary out of degree
/// `d + 1`.
pub fn homology_f2(c: &F2ChainComplex, d: usize) -> Result<usize> {
    if d + 1 > c.max_dim() {
        return Err(ThetaError::Argument(format!(
            "degree {d} needs chains up to degree {}, complex stops at {}",
            d + 1,
            c.max_dim()
        )));
    }
    Ok(c.basis[d].len() - c.boundaries[d].rank() - c.boundaries[d + 1].rank())
}
