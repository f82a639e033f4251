use std::collections::HashSet;
use std::sync::OnceLock;

use super::blocks::BlockPartition;
use super::chain::StabChain;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// A permutation group on `{0..degree-1}` given by generators, with a lazily
/// built stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be positive".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("positive degree")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.generators, &[]))
    }

    pub fn order(&self) -> u64 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    pub fn base(&self) -> Vec<usize> {
        self.chain().base()
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.chain().basic_orbit_lengths()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    /// All elements, in the canonical (lexicographic) order.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut els = self.chain().elements();
        els.sort();
        els
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// The orbit partition; cells are sorted and ordered by least element.
    pub fn orbits(&self) -> BlockPartition {
        let mut cell_of = vec![usize::MAX; self.degree];
        let mut cells = Vec::new();
        for p in 0..self.degree {
            if cell_of[p] != usize::MAX {
                continue;
            }
            let orbit = self.orbit(p);
            for &x in &orbit {
                cell_of[x] = cells.len();
            }
            cells.push(orbit);
        }
        BlockPartition::new(self.degree, cells).expect("orbits form a partition")
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree
    }

    /// Only the identity fixes a point; equivalently every orbit has length |G|.
    pub fn is_semiregular(&self) -> bool {
        let order = self.order();
        self.orbits()
            .cells()
            .iter()
            .all(|c| c.len() as u64 == order)
    }

    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree as u64
    }

    /// Pointwise stabilizer of `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> PermGroup {
        let chain = StabChain::build(self.degree, &self.generators, points);
        let gens = chain.stabilizer_generators(points.len());
        PermGroup::new(self.degree, gens).expect("same degree")
    }

    pub fn stabilizer(&self, point: usize) -> PermGroup {
        self.pointwise_stabilizer(&[point])
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && self.order() == other.order()
    }

    pub fn is_normal_in(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other)
            && other.generators.iter().all(|g| {
                self.generators
                    .iter()
                    .all(|n| self.contains(&n.conjugate_by(g)))
            })
    }

    /// `σ⁻¹ G σ`.
    pub fn conjugate(&self, sigma: &Permutation) -> PermGroup {
        PermGroup::new(
            self.degree,
            self.generators.iter().map(|g| g.conjugate_by(sigma)).collect(),
        )
        .expect("same degree")
    }

    /// Smallest normal subgroup of `self` containing `seed`.
    pub fn normal_closure(&self, seed: &[Permutation]) -> Result<PermGroup> {
        for s in seed {
            if !self.contains(s) {
                return Err(Error::NotInGroup(s.to_string()));
            }
        }
        let mut gens: Vec<Permutation> = seed
            .iter()
            .filter(|s| !s.is_identity())
            .cloned()
            .collect();
        let mut closure = PermGroup::new(self.degree, gens.clone())?;
        let mut k = 0;
        while k < gens.len() {
            let n = gens[k].clone();
            for g in &self.generators {
                let c = n.conjugate_by(g);
                if !closure.contains(&c) {
                    gens.push(c);
                    closure = PermGroup::new(self.degree, gens.clone())?;
                }
            }
            k += 1;
        }
        Ok(closure)
    }

    /// The group generated by `self` and `extra`.
    pub fn join(&self, extra: &[Permutation]) -> Result<PermGroup> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().cloned());
        PermGroup::new(self.degree, gens)
    }

    /// Conjugacy classes, each sorted, in order of least representative.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Permutation>> {
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut classes = Vec::new();
        for x in self.elements() {
            if seen.contains(&x) {
                continue;
            }
            let mut class = vec![x.clone()];
            seen.insert(x);
            let mut k = 0;
            while k < class.len() {
                let y = class[k].clone();
                for g in &self.generators {
                    let z = y.conjugate_by(g);
                    if seen.insert(z.clone()) {
                        class.push(z);
                    }
                }
                k += 1;
            }
            class.sort();
            classes.push(class);
        }
        classes
    }
}
