//! Seeded instance generators.
//!
//! * `random-filtration`: `n` elements with random births, a random DAG of
//!   relations each appearing at or after both endpoints, inclusions as steps.
//! * `fibered-map`: a random filtration `Q`, and `P` obtained by replacing
//!   each point of `Q` with a block having a least and a greatest element.
//!   Every fiber over a point then has that point's block extremum as a cone
//!   apex. With delay `k`, each generating relation of `P` appears up to `k`
//!   indices late, so every fiber is `k`-acyclic.
//! * `cone-collapse`: a random filtration plus an apex above everything,
//!   whose relations to the apex are delayed, mapped onto a single point.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::persistence::{PersistencePoset, PersistencePosetMap};
use crate::poset::FinitePoset;

pub const MAX_ELEMENTS: usize = 16;
pub const MAX_TARGET: usize = 8;
pub const MAX_T: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("{what} = {value} exceeds the cap {cap}")]
    SizeCapExceeded { what: &'static str, value: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    RandomFiltration,
    FiberedMap,
    ConeCollapse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Elements of the generated filtration (of `Q` for `fibered-map`).
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub delay: usize,
    /// Probability that a pair compatible with the hidden order is related.
    pub density: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 5, t: 3, delay: 0, density: 0.4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Diagram(PersistencePoset),
    Map(PersistencePosetMap),
}

fn cap(what: &'static str, value: usize, cap: usize) -> Result<(), GenerateError> {
    if value > cap {
        return Err(GenerateError::SizeCapExceeded { what, value, cap });
    }
    Ok(())
}

pub fn generate(kind: GenKind, seed: u64, params: GenParams) -> Result<Generated, GenerateError> {
    cap("T", params.t, MAX_T)?;
    cap("delay", params.delay, params.t.max(1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match kind {
        GenKind::RandomFiltration => {
            cap("n", params.n, MAX_ELEMENTS)?;
            let spec = random_spec(&mut rng, params.n, params.t, params.density, "e");
            Generated::Diagram(spec.build())
        }
        GenKind::FiberedMap => {
            cap("n", params.n, MAX_TARGET)?;
            Generated::Map(fibered_map(&mut rng, params))
        }
        GenKind::ConeCollapse => {
            cap("n", params.n, MAX_ELEMENTS - 1)?;
            Generated::Map(cone_collapse(&mut rng, params))
        }
    })
}

/// Elements with birth indices and relations with appearance indices.
#[derive(Clone, Debug, Default)]
struct FiltrationSpec {
    t: usize,
    names: Vec<String>,
    births: Vec<usize>,
    relations: Vec<(usize, usize, usize)>,
}

impl FiltrationSpec {
    fn build(&self) -> PersistencePoset {
        let posets = (0..=self.t)
            .map(|i| {
                let present: Vec<usize> = (0..self.names.len()).filter(|&k| self.births[k] <= i).collect();
                let pairs = self
                    .relations
                    .iter()
                    .filter(|r| r.2 <= i)
                    .map(|&(a, b, _)| (self.names[a].clone(), self.names[b].clone()));
                FinitePoset::new(present.iter().map(|&k| self.names[k].clone()), pairs)
                    .expect("relations follow a hidden linear order")
            })
            .collect();
        PersistencePoset::filtration_by_names(posets).expect("relations only accumulate")
    }
}

fn random_spec(rng: &mut ChaCha8Rng, n: usize, t: usize, density: f64, prefix: &str) -> FiltrationSpec {
    let names: Vec<String> = (0..n).map(|k| format!("{prefix}{k}")).collect();
    let births: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=t)).collect();
    let mut hidden: Vec<usize> = (0..n).collect();
    hidden.shuffle(rng);
    let mut relations = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                let (x, y) = (hidden[a], hidden[b]);
                let from = births[x].max(births[y]);
                relations.push((x, y, rng.gen_range(from..=t)));
            }
        }
    }
    FiltrationSpec { t, names, births, relations }
}

/// Block shapes, each with a least element `bot` and a greatest `top`.
const BLOCKS: [&[(&str, &str)]; 4] = [
    &[],
    &[("bot", "top")],
    &[("bot", "mid"), ("mid", "top")],
    &[("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
];

fn block_elements(shape: &[(&str, &str)]) -> Vec<&'static str> {
    match shape.len() {
        0 => vec!["top"],
        1 => vec!["bot", "top"],
        2 => vec!["bot", "mid", "top"],
        _ => vec!["bot", "l", "r", "top"],
    }
}

fn fibered_map(rng: &mut ChaCha8Rng, params: GenParams) -> PersistencePosetMap {
    let t = params.t;
    let q = random_spec(rng, params.n, t, params.density, "q");
    let late = |rng: &mut ChaCha8Rng, at: usize| (at + rng.gen_range(0..=params.delay)).min(t);

    let mut p = FiltrationSpec { t, ..Default::default() };
    let mut owner = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, qname) in q.names.iter().enumerate() {
        let shape = BLOCKS[rng.gen_range(0..BLOCKS.len())];
        let start = p.names.len();
        let elems = block_elements(shape);
        for e in &elems {
            p.names.push(format!("{qname}.{e}"));
            p.births.push(q.births[k]);
            owner.push(k);
        }
        let local = |name: &str| start + elems.iter().position(|e| *e == name).expect("block element");
        for (a, b) in shape {
            let at = late(rng, q.births[k]);
            p.relations.push((local(a), local(b), at));
        }
        blocks.push((start..start + elems.len()).collect());
    }
    for &(a, b, at) in &q.relations {
        let top_a = *blocks[a].last().expect("blocks are nonempty");
        let bot_b = blocks[b][0];
        let at = late(rng, at);
        p.relations.push((top_a, bot_b, at));
    }

    let source = p.build();
    let target = q.build();
    let components = (0..=t)
        .map(|i| {
            source
                .poset(i)
                .elements()
                .iter()
                .map(|e| {
                    let k = owner[p.names.iter().position(|n| n == e).expect("known element")];
                    target.poset(i).id(&q.names[k]).expect("owner present")
                })
                .collect()
        })
        .collect();
    PersistencePosetMap::new(source, target, components).expect("blocks map onto their points")
}

fn cone_collapse(rng: &mut ChaCha8Rng, params: GenParams) -> PersistencePosetMap {
    let t = params.t;
    let mut x = random_spec(rng, params.n, t, params.density, "x");
    let apex = x.names.len();
    x.names.push("apex".into());
    x.births.push(0);
    for k in 0..apex {
        let at = (x.births[k] + rng.gen_range(0..=params.delay)).min(t);
        x.relations.push((k, apex, at));
    }
    let source = x.build();
    let target = PersistencePoset::constant(FinitePoset::antichain(["*"])).padded(t);
    let components = (0..=t).map(|i| vec![0; source.poset(i).len()]).collect();
    PersistencePosetMap::new(source, target, components).expect("constant map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::acyclicity_measure;
    use crate::ext::ExtNat;
    use crate::field::Prime;
    use crate::persistence::{enumerate_persistence_points, persistence_fiber};
    use crate::poset::Side;

    #[test]
    fn deterministic_in_seed() {
        for kind in [GenKind::RandomFiltration, GenKind::FiberedMap, GenKind::ConeCollapse] {
            let params = GenParams { n: 5, t: 3, delay: 1, density: 0.5 };
            assert_eq!(generate(kind, 9, params).unwrap(), generate(kind, 9, params).unwrap());
        }
    }

    #[test]
    fn caps_are_enforced() {
        let big = GenParams { n: 40, ..Default::default() };
        assert!(matches!(
            generate(GenKind::FiberedMap, 0, big),
            Err(GenerateError::SizeCapExceeded { what: "n", .. })
        ));
        let long = GenParams { t: 20, ..Default::default() };
        assert!(generate(GenKind::RandomFiltration, 0, long).is_err());
    }

    #[test]
    fn filtrations_are_filtrations() {
        for seed in 0..20 {
            let Generated::Diagram(x) = generate(GenKind::RandomFiltration, seed, GenParams::default()).unwrap() else {
                panic!()
            };
            assert!(x.is_filtration());
            assert_eq!(x.poset(x.stabilization()).len(), 5);
        }
    }

    #[test]
    fn fiber_acyclicity_is_bounded_by_delay() {
        let p = Prime::TWO;
        for seed in 0..15 {
            for delay in 0..=2 {
                let params = GenParams { n: 4, t: 3, delay, density: 0.5 };
                let Generated::Map(f) = generate(GenKind::FiberedMap, seed, params).unwrap() else { panic!() };
                for side in [Side::Lower, Side::Upper] {
                    for v in enumerate_persistence_points(f.target()).unwrap() {
                        let fiber = persistence_fiber(&f, &v, side).unwrap();
                        let eps = acyclicity_measure(&fiber, p, 2).unwrap().eps;
                        assert!(eps <= ExtNat::Fin(delay), "seed {seed} delay {delay}: {eps}");
                    }
                }
            }
        }
    }
}
