//! Persistence modules: finite-dimensional `F_p`-spaces `M_0 → M_1 → …`,
//! constant from the stabilization index on.

use thiserror::Error;

use crate::field::{FieldMatrix, Prime};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("{dims} spaces need {expected} steps, got {found}")]
    StepCount { dims: usize, expected: usize, found: usize },
    #[error("step {index} has shape {found:?}, expected {expected:?}")]
    StepShape { index: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("step {index} is over F_{found}, module is over F_{expected}")]
    StepField { index: usize, expected: Prime, found: Prime },
    #[error("a module needs at least one space")]
    Empty,
    #[error("modules over different fields")]
    FieldMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceModule {
    p: Prime,
    dims: Vec<usize>,
    steps: Vec<FieldMatrix>,
    /// `composites[i][j - i]` is `φ_{i,j}` for `i ≤ j ≤ T`.
    composites: Vec<Vec<FieldMatrix>>,
}

impl PersistenceModule {
    pub fn new(p: Prime, dims: Vec<usize>, steps: Vec<FieldMatrix>) -> Result<Self, ModuleError> {
        if dims.is_empty() {
            return Err(ModuleError::Empty);
        }
        if steps.len() + 1 != dims.len() {
            return Err(ModuleError::StepCount {
                dims: dims.len(),
                expected: dims.len() - 1,
                found: steps.len(),
            });
        }
        for (i, s) in steps.iter().enumerate() {
            if s.prime() != p {
                return Err(ModuleError::StepField { index: i, expected: p, found: s.prime() });
            }
            let expected = (dims[i + 1], dims[i]);
            if s.shape() != expected {
                return Err(ModuleError::StepShape { index: i, expected, found: s.shape() });
            }
        }
        let t = steps.len();
        let composites = (0..=t)
            .map(|i| {
                let mut row = vec![FieldMatrix::identity(p, dims[i])];
                for j in i..t {
                    let next = steps[j].mul(row.last().unwrap()).expect("shapes checked");
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(PersistenceModule { p, dims, steps, composites })
    }

    /// The zero module over `0..=t`.
    pub fn zero(p: Prime, t: usize) -> Self {
        Self::new(p, vec![0; t + 1], vec![FieldMatrix::zeros(p, 0, 0); t]).expect("zero module")
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn stabilization(&self) -> usize {
        self.steps.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i.min(self.stabilization())]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn steps(&self) -> &[FieldMatrix] {
        &self.steps
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// `φ_{i,j}` for `i ≤ j`; indices past `T` act as `T`.
    pub fn map(&self, i: usize, j: usize) -> &FieldMatrix {
        assert!(i <= j, "structure maps go forward: {i} > {j}");
        let t = self.stabilization();
        let (i, j) = (i.min(t), j.min(t));
        &self.composites[i][j - i]
    }

    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.map(i, j).rank()
    }

    /// Same module with `T` raised to `t` (no-op when `t ≤ T`).
    pub fn padded(&self, t: usize) -> Self {
        let t0 = self.stabilization();
        if t <= t0 {
            return self.clone();
        }
        let mut dims = self.dims.clone();
        let mut steps = self.steps.clone();
        let top = self.dims[t0];
        for _ in t0..t {
            dims.push(top);
            steps.push(FieldMatrix::identity(self.p, top));
        }
        Self::new(self.p, dims, steps).expect("padding keeps shapes")
    }

    /// `M[s]_i = M_{i+s}`.
    pub fn shifted(&self, s: usize) -> Self {
        let t = self.stabilization();
        if s >= t {
            return Self::new(self.p, vec![self.dims[t]], vec![]).expect("single space");
        }
        Self::new(self.p, self.dims[s..].to_vec(), self.steps[s..].to_vec()).expect("shift keeps shapes")
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, ModuleError> {
        if self.p != other.p {
            return Err(ModuleError::FieldMismatch);
        }
        let t = self.stabilization().max(other.stabilization());
        let (a, b) = (self.padded(t), other.padded(t));
        let dims: Vec<usize> = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
        let steps = (0..t)
            .map(|i| {
                let (sa, sb) = (&a.steps[i], &b.steps[i]);
                let mut m = FieldMatrix::zeros(self.p, dims[i + 1], dims[i]);
                for r in 0..sa.rows() {
                    for c in 0..sa.cols() {
                        m.set(r, c, sa.get(r, c));
                    }
                }
                for r in 0..sb.rows() {
                    for c in 0..sb.cols() {
                        m.set(sa.rows() + r, sa.cols() + c, sb.get(r, c));
                    }
                }
                m
            })
            .collect();
        Self::new(self.p, dims, steps)
    }

    /// Conjugates by invertible `bases[i]` on `M_i`: steps become
    /// `B_{i+1} φ_i B_i⁻¹`. Returns `None` if some matrix is not invertible.
    pub fn change_basis(&self, bases: &[FieldMatrix]) -> Option<Self> {
        let t = self.stabilization();
        if bases.len() != t + 1 || bases.iter().zip(&self.dims).any(|(b, &d)| b.shape() != (d, d)) {
            return None;
        }
        let inverses = bases.iter().map(FieldMatrix::inverse).collect::<Option<Vec<_>>>()?;
        let steps = (0..t)
            .map(|i| bases[i + 1].mul(&self.steps[i]).and_then(|m| m.mul(&inverses[i])))
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        Self::new(self.p, self.dims.clone(), steps).ok()
    }
}
