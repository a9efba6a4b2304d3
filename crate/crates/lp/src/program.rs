use std::fmt::Write as _;

use crate::error::LpError;
use crate::scalar::Scalar;
use crate::simplex::{self, Workspace};
use crate::solution::LpSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    /// `a·x ≤ rhs`
    Le,
    /// `a·x = rhs`
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row<T> {
    pub sense: Sense,
    pub rhs: T,
}

#[derive(Debug, Clone)]
pub struct Column<T> {
    pub cost: T,
    pub lower: T,
    /// `None` is +∞.
    pub upper: Option<T>,
    /// Sorted by row, one entry per row.
    pub entries: Vec<(usize, T)>,
}

/// A minimisation LP over bounded columns, grown one column at a time.
///
/// The program keeps the last optimal basis and reuses it when the next
/// solve starts from a primal feasible point (columns added, bounds relaxed).
#[derive(Debug, Clone)]
pub struct LinearProgram<T: Scalar = f64> {
    rows: Vec<Row<T>>,
    cols: Vec<Column<T>>,
    workspace: Option<Workspace<T>>,
}

impl<T: Scalar> Default for LinearProgram<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new() -> Self {
        Self { rows: Vec::new(), cols: Vec::new(), workspace: None }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.cols
    }

    pub fn column(&self, j: usize) -> &Column<T> {
        &self.cols[j]
    }

    /// Adding a row discards the cached basis.
    pub fn add_row(&mut self, sense: Sense, rhs: T) -> usize {
        self.workspace = None;
        self.rows.push(Row { sense, rhs });
        self.rows.len() - 1
    }

    pub fn add_column(
        &mut self,
        cost: T,
        lower: T,
        upper: Option<T>,
        entries: &[(usize, T)],
    ) -> Result<usize, LpError> {
        check_bounds(&lower, upper.as_ref())?;
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (row, coef) in entries {
            if *row >= self.rows.len() {
                return Err(LpError::BadRow { row: *row, rows: self.rows.len() });
            }
            merged.push((*row, coef.clone()));
        }
        merged.sort_by_key(|e| e.0);
        merged.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 = earlier.1.clone() + later.1.clone();
                true
            } else {
                false
            }
        });
        merged.retain(|(_, c)| !c.is_zero());
        self.cols.push(Column { cost, lower, upper, entries: merged });
        if let Some(ws) = self.workspace.as_mut() {
            ws.push_column(&self.cols);
        }
        Ok(self.cols.len() - 1)
    }

    pub fn set_bounds(&mut self, col: usize, lower: T, upper: Option<T>) -> Result<(), LpError> {
        check_bounds(&lower, upper.as_ref())?;
        let c = self.cols.get_mut(col).ok_or(LpError::BadColumn { col })?;
        c.lower = lower;
        c.upper = upper;
        Ok(())
    }

    pub fn set_cost(&mut self, col: usize, cost: T) -> Result<(), LpError> {
        let c = self.cols.get_mut(col).ok_or(LpError::BadColumn { col })?;
        c.cost = cost;
        Ok(())
    }

    pub fn set_rhs(&mut self, row: usize, rhs: T) -> Result<(), LpError> {
        let rows = self.rows.len();
        let r = self.rows.get_mut(row).ok_or(LpError::BadRow { row, rows })?;
        r.rhs = rhs;
        Ok(())
    }

    /// Drops the cached basis so the next solve starts cold.
    pub fn reset_basis(&mut self) {
        self.workspace = None;
    }

    pub fn solve(&mut self) -> Result<LpSolution<T>, LpError> {
        simplex::solve(&self.rows, &self.cols, &mut self.workspace)
    }

    /// Fixed plain-text rendering for diffing programs across runs.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "min");
        for (j, c) in self.cols.iter().enumerate() {
            let _ = write!(out, " {}*x{}", c.cost, j);
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, "r{}:", i);
            for (j, c) in self.cols.iter().enumerate() {
                if let Ok(pos) = c.entries.binary_search_by_key(&i, |e| e.0) {
                    let _ = write!(out, " {}*x{}", c.entries[pos].1, j);
                }
            }
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {} {}", op, r.rhs);
        }
        for (j, c) in self.cols.iter().enumerate() {
            match &c.upper {
                Some(u) => {
                    let _ = writeln!(out, "{} <= x{} <= {}", c.lower, j, u);
                }
                None => {
                    let _ = writeln!(out, "{} <= x{} <= inf", c.lower, j);
                }
            }
        }
        out
    }
}

fn check_bounds<T: Scalar>(lower: &T, upper: Option<&T>) -> Result<(), LpError> {
    if let Some(u) = upper {
        if u < lower {
            return Err(LpError::BadBounds {
                lower: lower.to_f64_lossy(),
                upper: u.to_f64_lossy(),
            });
        }
    }
    Ok(())
}
