//! Simplicial homology with `F_p` coefficients and the persistence modules
//! of persistence posets.
//!
//! Bases are found by sparse column reduction: each degree keeps a table of
//! reduced columns keyed by their largest nonzero row, one table shared by
//! boundaries and chosen cycle representatives. Reducing a cycle against the
//! table yields its coordinates in the chosen basis of `H_k`.

use std::collections::HashMap;

use thiserror::Error;

use crate::field::{FieldMatrix, Prime};
use crate::module::{ModuleError, PersistenceModule};
use crate::persistence::PersistencePoset;
use crate::poset::MonotoneMap;
use crate::simplicial::{order_complex_truncated, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("degree {degree} exceeds the computed range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("chain is not a cycle")]
    NotACycle,
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// A chain as `(simplex position, coefficient)` sorted by position, zeros omitted.
pub type Chain = Vec<(usize, u32)>;

/// `z ← z − f·c`.
fn axpy(p: Prime, z: &Chain, f: u32, c: &Chain) -> Chain {
    let mut out = Vec::with_capacity(z.len() + c.len());
    let (mut a, mut b) = (z.iter().peekable(), c.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some(&&(i, x)), Some(&&(j, y))) if i == j => {
                let v = p.sub(x, p.mul(f, y));
                if v != 0 {
                    out.push((i, v));
                }
                a.next();
                b.next();
            }
            (Some(&&(i, x)), Some(&&(j, _))) if i < j => {
                out.push((i, x));
                a.next();
            }
            (Some(_), Some(&&(j, y))) | (None, Some(&&(j, y))) => {
                out.push((j, p.neg(p.mul(f, y))));
                b.next();
            }
            (Some(&&(i, x)), None) => {
                out.push((i, x));
                a.next();
            }
            (None, None) => break,
        }
    }
    out
}

fn sign(p: Prime, odd: bool) -> u32 {
    if odd {
        p.neg(1)
    } else {
        1
    }
}

/// `∂σ` for a `k`-simplex, `k ≥ 1`, as a chain on the `(k−1)`-simplices.
fn boundary_chain(k: &SimplicialComplex, p: Prime, s: &[usize]) -> Chain {
    let mut chain: Chain = (0..s.len())
        .map(|skip| {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let pos = k.position(&face).expect("complex is closed under faces");
            (pos, sign(p, skip % 2 == 1))
        })
        .collect();
    chain.sort_unstable();
    chain
}

/// Dense `∂_k : C_k → C_{k−1}` for `k = 0..=top`; `∂_0` has no rows.
pub fn boundary_matrices(k: &SimplicialComplex, p: Prime, top: usize) -> Vec<FieldMatrix> {
    (0..=top)
        .map(|d| {
            let rows = if d == 0 { 0 } else { k.count(d - 1) };
            let mut m = FieldMatrix::zeros(p, rows, k.count(d));
            if d > 0 {
                for (c, s) in k.simplices(d).iter().enumerate() {
                    for (r, v) in boundary_chain(k, p, s) {
                        m.set(r, c, v);
                    }
                }
            }
            m
        })
        .collect()
}

/// Betti numbers from dense ranks: `β_k = c_k − rk ∂_k − rk ∂_{k+1}`.
/// Needs simplices up to dimension `max_degree + 1`.
pub fn betti_numbers(k: &SimplicialComplex, p: Prime, max_degree: usize) -> Vec<usize> {
    let ranks: Vec<usize> = boundary_matrices(k, p, max_degree + 1).iter().map(FieldMatrix::rank).collect();
    (0..=max_degree).map(|d| k.count(d) - ranks[d] - ranks[d + 1]).collect()
}

#[derive(Clone, Debug, Default)]
struct PivotTable {
    columns: HashMap<usize, (Chain, Option<usize>)>,
}

impl PivotTable {
    /// Reduces `z` to zero or to a column with a fresh pivot; also returns the
    /// accumulated coefficients on representatives.
    fn reduce(&self, p: Prime, mut z: Chain, reps: usize) -> (Chain, Vec<u32>) {
        let mut coords = vec![0u32; reps];
        while let Some(&(piv, v)) = z.last() {
            let Some((col, label)) = self.columns.get(&piv) else {
                break;
            };
            let lead = col.last().expect("stored columns are nonzero").1;
            let f = p.mul(v, p.inv(lead));
            if let Some(c) = label.and_then(|j| coords.get_mut(j)) {
                *c = p.add(*c, f);
            }
            z = axpy(p, &z, f, col);
        }
        (z, coords)
    }

    fn insert(&mut self, col: Chain, label: Option<usize>) {
        let piv = col.last().expect("nonzero column").0;
        self.columns.insert(piv, (col, label));
    }
}

#[derive(Clone, Debug)]
struct DegreeBasis {
    reps: Vec<Chain>,
    table: PivotTable,
}

/// A chosen basis of `H_k(K; F_p)` for `k ≤ max_degree`.
#[derive(Clone, Debug)]
pub struct Homology {
    p: Prime,
    degrees: Vec<DegreeBasis>,
}

impl Homology {
    /// `K` must contain its simplices up to dimension `max_degree + 1`.
    pub fn compute(k: &SimplicialComplex, p: Prime, max_degree: usize) -> Self {
        let degrees = (0..=max_degree).map(|d| Self::degree(k, p, d)).collect();
        Homology { p, degrees }
    }

    fn degree(k: &SimplicialComplex, p: Prime, d: usize) -> DegreeBasis {
        let mut table = PivotTable::default();
        for s in k.simplices(d + 1) {
            let (rest, _) = table.reduce(p, boundary_chain(k, p, s), 0);
            if !rest.is_empty() {
                table.insert(rest, None);
            }
        }
        let mut reps: Vec<Chain> = Vec::new();
        for z in cycle_basis(k, p, d) {
            let (rest, _) = table.reduce(p, z, 0);
            if !rest.is_empty() {
                table.insert(rest.clone(), Some(reps.len()));
                reps.push(rest);
            }
        }
        DegreeBasis { reps, table }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn betti(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, |b| b.reps.len())
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..self.degrees.len()).map(|d| self.betti(d)).collect()
    }

    /// Cycle representatives of the basis classes in degree `d`.
    pub fn representatives(&self, d: usize) -> Result<&[Chain], HomologyError> {
        self.basis(d).map(|b| b.reps.as_slice())
    }

    fn basis(&self, d: usize) -> Result<&DegreeBasis, HomologyError> {
        self.degrees.get(d).ok_or(HomologyError::DegreeOutOfRange { degree: d, max: self.max_degree() })
    }

    /// Coordinates of the class of a `d`-cycle.
    pub fn coordinates(&self, d: usize, z: Chain) -> Result<Vec<u32>, HomologyError> {
        let b = self.basis(d)?;
        let (rest, coords) = b.table.reduce(self.p, z, b.reps.len());
        if rest.is_empty() {
            Ok(coords)
        } else {
            Err(HomologyError::NotACycle)
        }
    }
}

/// Cycles spanning `Z_d`, from the columns of `∂_d` that reduce to zero.
fn cycle_basis(k: &SimplicialComplex, p: Prime, d: usize) -> Vec<Chain> {
    let n = k.count(d);
    if d == 0 {
        return (0..n).map(|i| vec![(i, 1)]).collect();
    }
    let mut pivots: HashMap<usize, (Chain, Chain)> = HashMap::new();
    let mut cycles = Vec::new();
    for (c, s) in k.simplices(d).iter().enumerate() {
        let mut col = boundary_chain(k, p, s);
        let mut v: Chain = vec![(c, 1)];
        while let Some(&(piv, x)) = col.last() {
            let Some((other, other_v)) = pivots.get(&piv) else {
                break;
            };
            let f = p.mul(x, p.inv(other.last().unwrap().1));
            col = axpy(p, &col, f, other);
            v = axpy(p, &v, f, other_v);
        }
        match col.last() {
            Some(&(piv, _)) => {
                pivots.insert(piv, (col, v));
            }
            None => cycles.push(v),
        }
    }
    cycles
}

/// Image of a chain under the chain map of a vertex map; degenerate
/// simplices go to zero.
pub fn push_chain(
    dom: &SimplicialComplex,
    cod: &SimplicialComplex,
    p: Prime,
    vertex_map: &[usize],
    d: usize,
    z: &Chain,
) -> Chain {
    let mut acc: HashMap<usize, u32> = HashMap::new();
    for &(pos, x) in z {
        let mut image: Vec<usize> = dom.simplices(d)[pos].iter().map(|&v| vertex_map[v]).collect();
        let mut odd = false;
        for i in 1..image.len() {
            let mut j = i;
            while j > 0 && image[j - 1] > image[j] {
                image.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if image.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let target = cod.position(&image).expect("simplicial map lands in the codomain");
        let e = acc.entry(target).or_insert(0);
        *e = p.add(*e, p.mul(x, sign(p, odd)));
    }
    let mut out: Chain = acc.into_iter().filter(|&(_, v)| v != 0).collect();
    out.sort_unstable();
    out
}

/// Matrix of `H_d(f)` in the chosen bases.
pub fn induced_homology_map(
    dom: (&SimplicialComplex, &Homology),
    cod: (&SimplicialComplex, &Homology),
    vertex_map: &[usize],
    d: usize,
) -> Result<FieldMatrix, HomologyError> {
    let p = dom.1.prime();
    let reps = dom.1.representatives(d)?;
    let columns = reps
        .iter()
        .map(|z| cod.1.coordinates(d, push_chain(dom.0, cod.0, p, vertex_map, d, z)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldMatrix::from_columns(p, cod.1.betti(d), &columns))
}

/// Homology of a single poset's order complex.
pub fn poset_homology(p: &crate::poset::FinitePoset, prime: Prime, max_degree: usize) -> (SimplicialComplex, Homology) {
    let k = order_complex_truncated(p, max_degree + 1);
    let h = Homology::compute(&k, prime, max_degree);
    (k, h)
}

/// `H_d(K(f))` for a monotone map.
pub fn monotone_homology_map(f: &MonotoneMap, prime: Prime, d: usize) -> FieldMatrix {
    let (kd, hd) = poset_homology(f.dom(), prime, d);
    let (kc, hc) = poset_homology(f.cod(), prime, d);
    induced_homology_map((&kd, &hd), (&kc, &hc), f.assignment(), d).expect("degree in range")
}

/// `H_j(X; F_p)` for every `j ≤ max_degree`.
pub fn persistence_modules(
    x: &PersistencePoset,
    prime: Prime,
    max_degree: usize,
) -> Result<Vec<PersistenceModule>, HomologyError> {
    let t = x.stabilization();
    let spaces: Vec<(SimplicialComplex, Homology)> =
        (0..=t).map(|i| poset_homology(x.poset(i), prime, max_degree)).collect();
    (0..=max_degree)
        .map(|d| {
            let dims = spaces.iter().map(|(_, h)| h.betti(d)).collect();
            let steps = (0..t)
                .map(|i| {
                    let (ka, ha) = &spaces[i];
                    let (kb, hb) = &spaces[i + 1];
                    induced_homology_map((ka, ha), (kb, hb), x.structure_map(i, i + 1), d)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PersistenceModule::new(prime, dims, steps)?)
        })
        .collect()
}

/// `H_d(X; F_p)`.
pub fn persistence_module_of(x: &PersistencePoset, prime: Prime, d: usize) -> Result<PersistenceModule, HomologyError> {
    Ok(persistence_modules(x, prime, d)?.pop().expect("at least one degree"))
}
