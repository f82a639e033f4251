//! Semiprimitivity and the witness data the rank-two construction needs.

use std::collections::{HashMap, HashSet};

use super::blocks::{kernel_on_blocks, BlockAction};
use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum Semiprimitivity {
    Semiprimitive,
    /// A normal subgroup that is neither transitive nor semiregular, and the
    /// point-fixing element whose normal closure it is.
    Witness { subgroup: PermGroup, seed: Permutation },
}

impl Semiprimitivity {
    pub fn is_semiprimitive(&self) -> bool {
        matches!(self, Semiprimitivity::Semiprimitive)
    }
}

/// Decides semiprimitivity of a transitive group.
///
/// `G` fails iff some nontrivial element fixing a point has an intransitive
/// normal closure, so only the stabilizer of point 0 is scanned, in canonical
/// order and one conjugacy class of `G_0` at a time.
pub fn is_semiprimitive(g: &PermGroup) -> Result<Semiprimitivity> {
    if !g.is_transitive() {
        return Err(Error::Intransitive);
    }
    let stab = g.stabilizer(0);
    let mut tried: HashSet<Permutation> = HashSet::new();
    for x in stab.elements() {
        if x.is_identity() || tried.contains(&x) {
            continue;
        }
        let closure = g.normal_closure(std::slice::from_ref(&x))?;
        if !closure.is_transitive() {
            return Ok(Semiprimitivity::Witness {
                subgroup: closure,
                seed: x,
            });
        }
        // Conjugates of x inside G_0 have the same closure.
        let mut queue = vec![x.clone()];
        tried.insert(x);
        while let Some(y) = queue.pop() {
            for s in stab.generators() {
                let z = y.conjugate_by(s);
                if tried.insert(z.clone()) {
                    queue.push(z);
                }
            }
        }
    }
    Ok(Semiprimitivity::Semiprimitive)
}

/// The data extracted from a non-semiprimitive `L`: the block kernel `K`,
/// the cells `Δ` (orbits of `K`), the induced group `S` with projection `π`,
/// a base cell `δ`, a point `λ ∈ δ`, and the stabilizers `L_λ`, `K_λ`, `S_δ`.
#[derive(Clone, Debug)]
pub struct WitnessData {
    l: PermGroup,
    k: PermGroup,
    blocks: BlockAction,
    delta: usize,
    lambda: usize,
    l_lambda: PermGroup,
    k_lambda: PermGroup,
    s_delta: PermGroup,
}

impl WitnessData {
    /// Builds the witness from a normal subgroup that is neither transitive nor
    /// semiregular, replacing it by the kernel of `L` on its orbits.
    pub fn from_normal_subgroup(l: &PermGroup, n: &PermGroup) -> Result<Self> {
        if !l.is_transitive() {
            return Err(Error::Intransitive);
        }
        if !n.is_normal_in(l) {
            return Err(Error::NotSubgroup("witness is not normal in L".into()));
        }
        if n.is_transitive() || n.is_semiregular() {
            return Err(Error::InvalidParameter(
                "witness must be intransitive and not semiregular".into(),
            ));
        }
        let cells = n.orbits();
        let blocks = kernel_on_blocks(l, &cells)?;
        let k = blocks.kernel().clone();
        let lambda = 0;
        let delta = cells.cell_of(lambda);
        let l_lambda = l.stabilizer(lambda);
        let k_lambda = k.stabilizer(lambda);
        let s_delta = blocks.image().stabilizer(delta);
        let w = WitnessData {
            l: l.clone(),
            k,
            blocks,
            delta,
            lambda,
            l_lambda,
            k_lambda,
            s_delta,
        };
        w.check()?;
        Ok(w)
    }

    /// Re-verifies the invariants of the bundle.
    pub fn check(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Construction(m.to_string()));
        if !self.k.is_normal_in(&self.l) {
            return fail("K is not normal in L");
        }
        if self.k.is_transitive() || self.k.is_semiregular() {
            return fail("K must be intransitive and not semiregular");
        }
        if self.k.orbits() != *self.blocks.partition() {
            return fail("cells are not the orbits of K");
        }
        // K is the kernel of π: every K-generator projects to 1, and
        // |L| = |K|·|S| forces equality.
        if self.k.generators().iter().any(|x| !self.pi(x).is_identity())
            || self.l.order() != self.k.order() * self.s().order()
        {
            return fail("K is not the kernel of the action on cells");
        }
        if self.blocks.partition().cell_of(self.lambda) != self.delta {
            return fail("λ does not lie in δ");
        }
        if self.k_lambda.order() < 2 {
            return fail("|K_λ| < 2");
        }
        Ok(())
    }

    pub fn l(&self) -> &PermGroup {
        &self.l
    }
    pub fn k(&self) -> &PermGroup {
        &self.k
    }
    pub fn blocks(&self) -> &BlockAction {
        &self.blocks
    }
    /// The induced group on the cells.
    pub fn s(&self) -> &PermGroup {
        self.blocks.image()
    }
    pub fn delta(&self) -> usize {
        self.delta
    }
    pub fn lambda(&self) -> usize {
        self.lambda
    }
    pub fn l_lambda(&self) -> &PermGroup {
        &self.l_lambda
    }
    pub fn k_lambda(&self) -> &PermGroup {
        &self.k_lambda
    }
    pub fn s_delta(&self) -> &PermGroup {
        &self.s_delta
    }
    pub fn num_cells(&self) -> usize {
        self.blocks.partition().len()
    }
    pub fn pi(&self, g: &Permutation) -> Permutation {
        self.blocks.project(g)
    }
}

/// Finds witness data for a transitive `L`; `None` when `L` is semiprimitive.
pub fn find_witness(l: &PermGroup) -> Result<Option<WitnessData>> {
    match is_semiprimitive(l)? {
        Semiprimitivity::Semiprimitive => Ok(None),
        Semiprimitivity::Witness { subgroup, .. } => {
            WitnessData::from_normal_subgroup(l, &subgroup).map(Some)
        }
    }
}

/// A right transversal `T` of `S_δ` in `S` and the map `τ: S → T` with
/// `S_δ s = S_δ τ(s)`. Each representative is the least element of its coset,
/// so the identity comes first.
#[derive(Clone, Debug)]
pub struct TransversalTau {
    reps: Vec<Permutation>,
    coset_of: HashMap<Permutation, usize>,
    s_delta: PermGroup,
}

pub fn build_transversal_tau(s: &PermGroup, s_delta: &PermGroup) -> Result<TransversalTau> {
    if !s_delta.is_subgroup_of(s) {
        return Err(Error::NotSubgroup("S_δ is not a subgroup of S".into()));
    }
    let sub = s_delta.elements();
    let mut reps = Vec::new();
    let mut coset_of = HashMap::new();
    for x in s.elements() {
        if coset_of.contains_key(&x) {
            continue;
        }
        let idx = reps.len();
        for h in &sub {
            coset_of.insert(h * &x, idx);
        }
        reps.push(x);
    }
    Ok(TransversalTau {
        reps,
        coset_of,
        s_delta: s_delta.clone(),
    })
}

impl TransversalTau {
    pub fn reps(&self) -> &[Permutation] {
        &self.reps
    }

    pub fn coset_index(&self, s: &Permutation) -> usize {
        self.coset_of[s]
    }

    pub fn tau(&self, s: &Permutation) -> &Permutation {
        &self.reps[self.coset_index(s)]
    }

    pub fn subgroup(&self) -> &PermGroup {
        &self.s_delta
    }

    /// `τ(x s⁻¹) · s · τ(x)⁻¹`, which always lies in `S_δ`.
    pub fn cocycle(&self, x: &Permutation, s: &Permutation) -> Permutation {
        let left = self.tau(&(x * &s.inverse()));
        &(left * s) * &self.tau(x).inverse()
    }

    /// Checks the cocycle lies in `S_δ` for all pairs; returns the first
    /// offending pair.
    pub fn check_cocycle(&self, s: &PermGroup) -> std::result::Result<(), (Permutation, Permutation)> {
        let els = s.elements();
        for x in &els {
            for y in &els {
                if !self.s_delta.contains(&self.cocycle(x, y)) {
                    return Err((x.clone(), y.clone()));
                }
            }
        }
        Ok(())
    }
}

/// A section `ε: S_δ → L_λ` of `π`, choosing the least preimage.
#[derive(Clone, Debug)]
pub struct SectionEpsilon {
    map: HashMap<Permutation, Permutation>,
}

pub fn build_section_epsilon(w: &WitnessData) -> Result<SectionEpsilon> {
    let mut map = HashMap::new();
    for e in w.l_lambda().elements() {
        map.entry(w.pi(&e)).or_insert(e);
    }
    for s in w.s_delta().elements() {
        if !map.contains_key(&s) {
            return Err(Error::Construction(format!(
                "π(L_λ) misses {s} in S_δ"
            )));
        }
    }
    Ok(SectionEpsilon { map })
}

impl SectionEpsilon {
    pub fn get(&self, s: &Permutation) -> &Permutation {
        &self.map[s]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
