//! Degree-of-freedom bookkeeping and the assembled block system shared by
//! both schemes.
//!
//! The unknowns of one time step are the nodal values of the costate `Y`
//! (two components per node), the displacement `dX` (two components per
//! node) and the scalar curvature (one value per node).  Boundary conditions
//! remove some of these values: they are either fixed to zero or to a known
//! value.  Constraints are applied by elimination, so the assembled matrix
//! only has rows and columns for free values, and the contribution of fixed
//! values is moved to the right-hand side.
//!
//! The three test spaces of the schemes coincide with the three trial
//! spaces slot by slot (the position equations are tested with admissible
//! displacements, the curvature equation with admissible curvatures and the
//! position/curvature identity with admissible costate variations), so one
//! map serves for both rows and columns and the system is square.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryClass, GeneratingCurve, Vec2};
use crate::linsolve::SparseMatrix;

/// One scalar slot of the unknown vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Component `c` of the costate at node `n`.
    Costate(usize, usize),
    /// Component `c` of the displacement at node `n`.
    Displacement(usize, usize),
    /// Scalar curvature at node `n`.
    Curvature(usize),
}

/// Status of a slot after constraint elimination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlotState {
    /// Free unknown with its index in the reduced system.
    Free(usize),
    /// Known value, eliminated from the system.
    Fixed(f64),
}

/// Map from slots to reduced unknowns.
///
/// The reduced vector is ordered as all free costate values, then all free
/// displacement values, then all free curvature values, each block in node
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    num_nodes: usize,
    states: Vec<SlotState>,
    num_free: usize,
    costate_free: usize,
    displacement_free: usize,
}

impl DofMap {
    /// Builds the map for `curve`.
    ///
    /// * `costate_value(n)` returns the prescribed costate at endpoints
    ///   with a free conormal.
    /// * `curvature_on_axis` selects whether the curvature at axis nodes is
    ///   an unknown (`true`) or fixed to zero (`false`).
    pub fn new(
        curve: &GeneratingCurve,
        costate_value: impl Fn(usize) -> Vec2,
        curvature_on_axis: bool,
    ) -> Self {
        let n = curve.num_nodes();
        let mut states = vec![SlotState::Fixed(0.0); 5 * n];
        let mut next = 0;
        for i in 0..n {
            let class = curve.boundary_class(i);
            for c in 0..2 {
                let idx = Self::raw(n, Slot::Costate(i, c));
                states[idx] = match class {
                    Some(BoundaryClass::Axis) if c == 0 => SlotState::Fixed(0.0),
                    Some(b) if b.has_free_conormal() => SlotState::Fixed(costate_value(i)[c]),
                    _ => {
                        next += 1;
                        SlotState::Free(next - 1)
                    }
                };
            }
        }
        let costate_free = next;
        for i in 0..n {
            let class = curve.boundary_class(i);
            for c in 0..2 {
                let idx = Self::raw(n, Slot::Displacement(i, c));
                states[idx] = match class {
                    Some(b) if b.fixes_position_component(c) => SlotState::Fixed(0.0),
                    _ => {
                        next += 1;
                        SlotState::Free(next - 1)
                    }
                };
            }
        }
        let displacement_free = next - costate_free;
        for i in 0..n {
            let idx = Self::raw(n, Slot::Curvature(i));
            states[idx] = if curve.is_axis_node(i) && !curvature_on_axis {
                SlotState::Fixed(0.0)
            } else {
                next += 1;
                SlotState::Free(next - 1)
            };
        }
        Self {
            num_nodes: n,
            states,
            num_free: next,
            costate_free,
            displacement_free,
        }
    }

    fn raw(n: usize, slot: Slot) -> usize {
        match slot {
            Slot::Costate(i, c) => 2 * i + c,
            Slot::Displacement(i, c) => 2 * n + 2 * i + c,
            Slot::Curvature(i) => 4 * n + i,
        }
    }

    /// Number of nodes of the underlying curve.
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Dimension of the reduced system.
    pub fn num_free(&self) -> usize {
        self.num_free
    }

    /// Number of free costate, displacement and curvature values.
    pub fn block_sizes(&self) -> (usize, usize, usize) {
        (
            self.costate_free,
            self.displacement_free,
            self.num_free - self.costate_free - self.displacement_free,
        )
    }

    /// State of `slot`.
    #[inline]
    pub fn state(&self, slot: Slot) -> SlotState {
        self.states[Self::raw(self.num_nodes, slot)]
    }

    /// Reduced index of `slot` when it is free.
    #[inline]
    pub fn index(&self, slot: Slot) -> Option<usize> {
        match self.state(slot) {
            SlotState::Free(i) => Some(i),
            SlotState::Fixed(_) => None,
        }
    }

    /// Expands a reduced solution into nodal costate, displacement and
    /// curvature values, filling in the fixed values.
    pub fn expand(&self, reduced: &[f64]) -> (Vec<Vec2>, Vec<Vec2>, Vec<f64>) {
        let n = self.num_nodes;
        let value = |slot| match self.state(slot) {
            SlotState::Free(i) => reduced[i],
            SlotState::Fixed(v) => v,
        };
        let y = (0..n)
            .map(|i| Vec2::new(value(Slot::Costate(i, 0)), value(Slot::Costate(i, 1))))
            .collect();
        let dx = (0..n)
            .map(|i| {
                Vec2::new(
                    value(Slot::Displacement(i, 0)),
                    value(Slot::Displacement(i, 1)),
                )
            })
            .collect();
        let k = (0..n).map(|i| value(Slot::Curvature(i))).collect();
        (y, dx, k)
    }

    /// Reduced vector holding the displacement part of `reduced` only (the
    /// other blocks zeroed), as nodal vectors.
    pub fn displacement(&self, reduced: &[f64]) -> Vec<Vec2> {
        (0..self.num_nodes)
            .map(|i| {
                let v = |c| {
                    self.index(Slot::Displacement(i, c))
                        .map_or(0.0, |k| reduced[k])
                };
                Vec2::new(v(0), v(1))
            })
            .collect()
    }
}

/// Accumulates equations row by row with constraint elimination.
///
/// Each equation is identified by the slot of its test function; equations
/// whose test slot is fixed are dropped.  Coefficients of fixed unknowns are
/// multiplied by the fixed value and moved to the right-hand side.
pub(crate) struct Assembler<'a> {
    pub dofs: &'a DofMap,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
}

impl<'a> Assembler<'a> {
    pub fn new(dofs: &'a DofMap) -> Self {
        Self {
            dofs,
            matrix: SparseMatrix::new(dofs.num_free()),
            rhs: vec![0.0; dofs.num_free()],
        }
    }

    /// Adds `value * unknown(col)` to equation `row`.
    #[inline]
    pub fn add(&mut self, row: Slot, col: Slot, value: f64) {
        let Some(r) = self.dofs.index(row) else {
            return;
        };
        if value == 0.0 {
            return;
        }
        match self.dofs.state(col) {
            SlotState::Free(c) => self.matrix.push(r, c, value),
            SlotState::Fixed(v) => self.rhs[r] -= value * v,
        }
    }

    /// Adds `value` to the right-hand side of equation `row`.
    #[inline]
    pub fn add_rhs(&mut self, row: Slot, value: f64) {
        if let Some(r) = self.dofs.index(row) {
            self.rhs[r] += value;
        }
    }

    pub fn finish(mut self) -> Result<(SparseMatrix, Vec<f64>)> {
        self.matrix.finalize()?;
        if let Some(i) = self.rhs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteMatrix {
                row: i,
                col: usize::MAX,
            });
        }
        Ok((self.matrix, self.rhs))
    }
}

/// Assembled linear system of one time step.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    /// Reduced square matrix.
    pub matrix: SparseMatrix,
    /// Right-hand side.
    pub rhs: Vec<f64>,
    /// Slot bookkeeping.
    pub dofs: DofMap,
    /// Multiplier columns for conserved flows: the right-hand side
    /// contributions per unit surface-area and per unit volume multiplier.
    pub multiplier_columns: Option<[Vec<f64>; 2]>,
}

impl BlockSystem {
    /// Dimension of the reduced system.
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}
