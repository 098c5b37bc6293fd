//! Exhaustive search for `ε`-interleavings between small modules.
//!
//! Enumerates every `ε`-morphism `f : M → N[ε]` (the solutions of the
//! commutation equations), and for each one solves the linear system that a
//! partner `g : N → M[ε]` must satisfy. Morphisms are determined by their
//! components at `0..=T`, since all shifted indices clamp to `T`.

use thiserror::Error;

use crate::ext::ExtNat;
use crate::field::{FieldMatrix, Prime};
use crate::module::PersistenceModule;

pub const DEFAULT_CAP: usize = 6;
const MAX_T: usize = 5;
const MAX_CANDIDATES: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("total dimension {total} exceeds the cap {cap}")]
    CapExceeded { total: usize, cap: usize },
    #[error("stabilization index {t} exceeds {max}")]
    StabilizationTooLarge { t: usize, max: usize },
    #[error("{count} candidate morphisms exceed the enumeration limit")]
    TooManyCandidates { count: u64 },
    #[error("modules over different fields")]
    FieldMismatch,
}

#[derive(Clone, Copy)]
struct Block {
    offset: usize,
    rows: usize,
    cols: usize,
}

/// Blocks for the components `X_i → Y_{min(i+ε,T)}`, laid out consecutively.
fn layout(x: &PersistenceModule, y: &PersistenceModule, eps: usize) -> (Vec<Block>, usize) {
    let t = x.stabilization();
    let mut offset = 0;
    let blocks = (0..=t)
        .map(|i| {
            let b = Block { offset, rows: y.dim(i + eps), cols: x.dim(i) };
            offset += b.rows * b.cols;
            b
        })
        .collect();
    (blocks, offset)
}

struct System {
    p: Prime,
    vars: usize,
    rows: Vec<Vec<u64>>,
    rhs: Vec<u32>,
}

impl System {
    fn new(p: Prime, vars: usize) -> Self {
        System { p, vars, rows: Vec::new(), rhs: Vec::new() }
    }

    /// `Σ left·X·right = constant` over the given terms.
    fn equation(&mut self, terms: &[(&FieldMatrix, Block, &FieldMatrix)], constant: &FieldMatrix) {
        let p = self.p;
        for r in 0..constant.rows() {
            for c in 0..constant.cols() {
                let mut row = vec![0u64; self.vars];
                for (left, blk, right) in terms {
                    for s in 0..blk.rows {
                        let a = left.get(r, s);
                        if a == 0 {
                            continue;
                        }
                        for u in 0..blk.cols {
                            let b = right.get(u, c);
                            if b != 0 {
                                let slot = &mut row[blk.offset + s * blk.cols + u];
                                *slot = p.add(*slot as u32, p.mul(a, b)) as u64;
                            }
                        }
                    }
                }
                self.rows.push(row);
                self.rhs.push(constant.get(r, c));
            }
        }
    }

    fn matrix(&self) -> FieldMatrix {
        FieldMatrix::from_rows(self.p, self.vars, &self.rows).expect("rows have one entry per variable")
    }
}

fn negate(m: &FieldMatrix) -> FieldMatrix {
    FieldMatrix::zeros(m.prime(), m.rows(), m.cols()).sub(m).expect("same shape")
}

/// Commutation squares of an `ε`-morphism `X → Y[ε]`.
fn commutation(sys: &mut System, x: &PersistenceModule, y: &PersistenceModule, eps: usize, blocks: &[Block]) {
    let p = sys.p;
    for i in 0..x.stabilization() {
        let lhs_id = FieldMatrix::identity(p, y.dim(i + 1 + eps));
        let rhs_id = FieldMatrix::identity(p, x.dim(i));
        let shift = negate(y.map(i + eps, i + 1 + eps));
        sys.equation(
            &[(&lhs_id, blocks[i + 1], x.map(i, i + 1)), (&shift, blocks[i], &rhs_id)],
            &FieldMatrix::zeros(p, y.dim(i + 1 + eps), x.dim(i)),
        );
    }
}

fn component(values: &[u32], blk: Block, p: Prime) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(p, blk.rows, blk.cols);
    for r in 0..blk.rows {
        for c in 0..blk.cols {
            m.set(r, c, values[blk.offset + r * blk.cols + c]);
        }
    }
    m
}

/// Whether `M` and `N` are `ε`-interleaved, by exhaustive enumeration.
pub fn brute_force_interleaving_check(
    m: &PersistenceModule,
    n: &PersistenceModule,
    eps: usize,
    cap: usize,
) -> Result<bool, OracleError> {
    let (m, n) = admissible(m, n, cap)?;
    let p = m.prime();
    let t = m.stabilization();
    let (f_blocks, f_vars) = layout(&m, &n, eps);
    let (g_blocks, g_vars) = layout(&n, &m, eps);

    let mut f_sys = System::new(p, f_vars);
    commutation(&mut f_sys, &m, &n, eps, &f_blocks);
    let homs = f_sys.matrix().nullspace();
    let count = (p.get() as u64).checked_pow(homs.len() as u32).unwrap_or(u64::MAX);
    if count > MAX_CANDIDATES {
        return Err(OracleError::TooManyCandidates { count });
    }

    let mut g_base = System::new(p, g_vars);
    commutation(&mut g_base, &n, &m, eps, &g_blocks);

    let mut coeffs = vec![0u32; homs.len()];
    loop {
        let mut f = vec![0u32; f_vars];
        for (a, h) in coeffs.iter().zip(&homs) {
            if *a != 0 {
                for (slot, &v) in f.iter_mut().zip(h) {
                    *slot = p.add(*slot, p.mul(*a, v));
                }
            }
        }
        let fs: Vec<FieldMatrix> = f_blocks.iter().map(|&b| component(&f, b, p)).collect();

        let mut sys = System { p, vars: g_vars, rows: g_base.rows.clone(), rhs: g_base.rhs.clone() };
        for i in 0..=t {
            let j = (i + eps).min(t);
            let id_m = FieldMatrix::identity(p, m.dim(i + 2 * eps));
            sys.equation(&[(&id_m, g_blocks[j], &fs[i])], m.map(i, i + 2 * eps));
            let id_n = FieldMatrix::identity(p, n.dim(i));
            sys.equation(&[(&fs[j], g_blocks[i], &id_n)], n.map(i, i + 2 * eps));
        }
        if sys.matrix().solve(&sys.rhs).is_some() {
            return Ok(true);
        }

        let Some(k) = coeffs.iter().position(|&c| c + 1 < p.get()) else {
            return Ok(false);
        };
        coeffs[k] += 1;
        coeffs[..k].iter_mut().for_each(|c| *c = 0);
    }
}

fn admissible(
    m: &PersistenceModule,
    n: &PersistenceModule,
    cap: usize,
) -> Result<(PersistenceModule, PersistenceModule), OracleError> {
    if m.prime() != n.prime() {
        return Err(OracleError::FieldMismatch);
    }
    let t = m.stabilization().max(n.stabilization());
    if t > MAX_T {
        return Err(OracleError::StabilizationTooLarge { t, max: MAX_T });
    }
    for x in [m, n] {
        if x.total_dim() > cap {
            return Err(OracleError::CapExceeded { total: x.total_dim(), cap });
        }
    }
    Ok((m.padded(t), n.padded(t)))
}

/// Least `ε` accepted by [`brute_force_interleaving_check`]; `∞` if none.
/// Every `ε ≥ T` imposes the same conditions, so the search stops at `T`.
pub fn least_interleaving_eps(m: &PersistenceModule, n: &PersistenceModule, cap: usize) -> Result<ExtNat, OracleError> {
    let t = m.stabilization().max(n.stabilization());
    for eps in 0..=t {
        if brute_force_interleaving_check(m, n, eps, cap)? {
            return Ok(ExtNat::Fin(eps));
        }
    }
    Ok(ExtNat::Inf)
}
