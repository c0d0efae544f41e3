use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVector};

/// Kind of a frozen symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Statically frozen: a unit row.
    Sfs,
    /// Dynamically frozen on a low-weight index (kills low-weight codewords).
    DfsA,
    /// Dynamically frozen on the next least reliable index.
    DfsB,
}

impl RowKind {
    pub fn is_dynamic(self) -> bool {
        !matches!(self, RowKind::Sfs)
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowKind::Sfs => "SFS",
            RowKind::DfsA => "DFS_A",
            RowKind::DfsB => "DFS_B",
        })
    }
}

impl FromStr for RowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SFS" => Ok(RowKind::Sfs),
            "DFS_A" => Ok(RowKind::DfsA),
            "DFS_B" => Ok(RowKind::DfsB),
            other => Err(Error::InvalidParameter(format!("unknown row kind {other:?}"))),
        }
    }
}

/// One constraint `Σ_s V[s]·u[s] = σ`, whose last non-zero coefficient sits
/// at the pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pivot: usize,
    coeffs: BitVector,
    kind: RowKind,
}

impl ConstraintRow {
    pub fn new(pivot: usize, coeffs: BitVector, kind: RowKind) -> Result<Self> {
        if coeffs.last_one() != Some(pivot) {
            return Err(Error::Construction(format!(
                "row with pivot {pivot} has last non-zero coefficient at {:?}",
                coeffs.last_one()
            )));
        }
        if kind == RowKind::Sfs && coeffs.count_ones() != 1 {
            return Err(Error::Construction(format!(
                "static row at pivot {pivot} has {} non-zero coefficients",
                coeffs.count_ones()
            )));
        }
        Ok(Self { pivot, coeffs, kind })
    }

    pub fn unit(n: usize, pivot: usize) -> Self {
        let mut coeffs = BitVector::zeros(n);
        coeffs.set(pivot, true);
        Self { pivot, coeffs, kind: RowKind::Sfs }
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn coeffs(&self) -> &BitVector {
        &self.coeffs
    }

    pub fn kind(&self) -> RowKind {
        self.kind
    }

    /// Row evaluated on `u` (pivot included).
    pub fn evaluate(&self, u: &BitVector) -> Result<bool> {
        self.coeffs.dot(u)
    }
}

/// Constraint matrix of a polar subcode: rows with distinct pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintMatrix {
    n: usize,
    rows: Vec<ConstraintRow>,
}

impl ConstraintMatrix {
    pub fn new(n: usize, rows: Vec<ConstraintRow>) -> Result<Self> {
        let m = Self { n, rows };
        m.validate()?;
        Ok(m)
    }

    /// Checks row lengths, pivot placement, and pivot distinctness.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        for row in &self.rows {
            if row.coeffs.len() != self.n {
                return Err(Error::LengthMismatch { left: row.coeffs.len(), right: self.n });
            }
            if row.pivot >= self.n {
                return Err(Error::IndexOutOfRange { index: row.pivot, len: self.n });
            }
            if row.coeffs.last_one() != Some(row.pivot) {
                return Err(Error::Construction(format!("pivot {} is not the last non-zero", row.pivot)));
            }
            if row.kind == RowKind::Sfs && row.coeffs.count_ones() != 1 {
                return Err(Error::Construction(format!("static row {} is not a unit row", row.pivot)));
            }
            if std::mem::replace(&mut seen[row.pivot], true) {
                return Err(Error::Construction(format!("duplicate pivot {}", row.pivot)));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[ConstraintRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }

    pub fn count_kind(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    pub fn to_binary_matrix(&self) -> BinaryMatrix {
        BinaryMatrix::from_rows(self.n, self.rows.iter().map(|r| r.coeffs.clone()).collect())
            .expect("rows validated to length n")
    }

    /// Syndrome `V · u^T`, one bit per row in row order.
    pub fn syndrome(&self, u: &BitVector) -> Result<BitVector> {
        self.to_binary_matrix().mul_vec(u)
    }
}
