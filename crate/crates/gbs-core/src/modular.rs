//! The modular homomorphism, restricted to what the decision procedures
//! need: the single generator of the modular group for Betti number at most
//! one, its orientation sign, and the unimodularity and integrality tests.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::graph::{Edge, EdgePath, LabeledGraph};
use crate::moves::path_modulus;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ModularError {
    #[error("Betti number exceeds one")]
    BettiTooLarge,
    #[error("Betti number is zero")]
    BettiZero,
}

/// Orientation value of a cycle: the sign of its label product.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn of(q: &BigRational) -> Orientation {
        if q.is_negative() {
            Orientation::Minus
        } else {
            Orientation::Plus
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Plus => 1,
            Orientation::Minus => -1,
        }
    }
}

/// Generator of the modular group of a graph with Betti number at most one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ModulusGenerator {
    /// Betti number zero: the modular image is trivial.
    Trivial,
    /// Betti number one: `q` is the modulus of the embedded cycle, oriented
    /// so that `|q| >= 1`.
    Cycle {
        q: BigRational,
        orientation: Orientation,
        cycle: EdgePath,
    },
}

impl ModulusGenerator {
    pub fn q(&self) -> Option<&BigRational> {
        match self {
            ModulusGenerator::Trivial => None,
            ModulusGenerator::Cycle { q, .. } => Some(q),
        }
    }
}

/// The embedded cycle of a Betti-one graph, as an edge path from its least
/// vertex. Returns `None` for trees. Only defined up to orientation; this
/// returns the direction whose first edge has the smaller index.
pub fn embedded_cycle(g: &LabeledGraph) -> Result<Option<EdgePath>, ModularError> {
    match g.betti_number() {
        0 => return Ok(None),
        1 => {}
        _ => return Err(ModularError::BettiTooLarge),
    }
    // strip valence-one vertices until only the cycle remains
    let mut alive_edge = vec![true; g.geometric_edge_count()];
    let mut alive_vertex = vec![true; g.vertex_count()];
    loop {
        let mut changed = false;
        for v in g.vertices() {
            if !alive_vertex[v.index()] {
                continue;
            }
            let ends: Vec<Edge> = g
                .edges()
                .filter(|&e| alive_edge[e.geometric_index()] && g.origin(e) == v)
                .collect();
            if ends.is_empty() {
                alive_vertex[v.index()] = false;
                changed = true;
            } else if ends.len() == 1 && !g.is_loop(ends[0]) {
                alive_edge[ends[0].geometric_index()] = false;
                alive_vertex[v.index()] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // walk the remaining cycle from its least vertex; every surviving
    // vertex has exactly two surviving edge ends
    let start = g
        .vertices()
        .find(|v| alive_vertex[v.index()])
        .expect("Betti one graph has a cycle");
    let mut path: Vec<Edge> = Vec::new();
    let mut at = start;
    loop {
        let next = g
            .edges_at(at)
            .filter(|e| alive_edge[e.geometric_index()])
            .find(|&e| path.last().map_or(true, |&l| e != l.rev()))
            .expect("cycle vertex has a continuing edge");
        path.push(next);
        at = g.terminus(next);
        if at == start {
            break;
        }
    }
    Ok(Some(EdgePath(path)))
}

/// The generator `q` of the modular group, for Betti number at most one:
/// trivial for trees, otherwise the modulus of the embedded cycle with the
/// orientation chosen so `|q| >= 1`.
pub fn modulus_generator(g: &LabeledGraph) -> Result<ModulusGenerator, ModularError> {
    let cycle = match embedded_cycle(g)? {
        None => return Ok(ModulusGenerator::Trivial),
        Some(c) => c,
    };
    let q = path_modulus(g, &cycle)
        .expect("embedded cycle is a path")
        .value()
        .clone();
    let (q, cycle) = if q.abs() >= BigRational::one() {
        (q, cycle)
    } else {
        (q.recip(), cycle.reversed())
    };
    let orientation = Orientation::of(&q);
    Ok(ModulusGenerator::Cycle { q, orientation, cycle })
}

/// True iff the modular group is trivial in absolute value.
pub fn is_unimodular(g: &LabeledGraph) -> Result<bool, ModularError> {
    match modulus_generator(g)? {
        ModulusGenerator::Trivial => Ok(true),
        ModulusGenerator::Cycle { q, .. } => Ok(q.abs().is_one()),
    }
}

/// True iff the Betti-one generator with `|q| >= 1` is an integer.
pub fn has_integral_modulus(g: &LabeledGraph) -> Result<bool, ModularError> {
    match modulus_generator(g)? {
        ModulusGenerator::Trivial => Err(ModularError::BettiZero),
        ModulusGenerator::Cycle { q, .. } => Ok(q.is_integer()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::*;
    use num_bigint::BigInt;

    fn q_of(g: &LabeledGraph) -> BigRational {
        match modulus_generator(g).unwrap() {
            ModulusGenerator::Cycle { q, .. } => q,
            ModulusGenerator::Trivial => panic!("expected a cycle"),
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(q_of(&f3g()), BigRational::from(BigInt::from(2)));
        assert_eq!(
            q_of(&bs(2, 3)),
            BigRational::new(3.into(), 2.into())
        );
        assert_eq!(q_of(&d1()), BigRational::from(BigInt::from(4)));
        assert_eq!(
            modulus_generator(&segment(2, 3)).unwrap(),
            ModulusGenerator::Trivial
        );
        assert!(matches!(
            modulus_generator(&f1l()),
            Err(ModularError::BettiTooLarge)
        ));
    }

    #[test]
    fn orientation_examples() {
        match modulus_generator(&bs(1, -1)).unwrap() {
            ModulusGenerator::Cycle { q, orientation, .. } => {
                assert_eq!(q, BigRational::from(BigInt::from(-1)));
                assert_eq!(orientation, Orientation::Minus);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unimodularity() {
        assert!(is_unimodular(&segment(2, 3)).unwrap());
        assert!(is_unimodular(&bs(1, -1)).unwrap());
        assert!(!is_unimodular(&d1()).unwrap());
    }

    #[test]
    fn integrality() {
        assert!(has_integral_modulus(&d1()).unwrap());
        assert!(!has_integral_modulus(&bs(2, 3)).unwrap());
        assert!(has_integral_modulus(&f3g()).unwrap());
        assert_eq!(
            has_integral_modulus(&segment(2, 3)),
            Err(ModularError::BettiZero)
        );
    }

    #[test]
    fn reversed_cycle_inverts_q() {
        for g in [bs(2, 3), d1(), f3g()] {
            if let ModulusGenerator::Cycle { q, cycle, .. } = modulus_generator(&g).unwrap() {
                let back = path_modulus(&g, &cycle.reversed()).unwrap();
                assert_eq!(back.value() * &q, BigRational::one());
            }
        }
    }
}
