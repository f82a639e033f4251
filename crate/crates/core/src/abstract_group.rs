//! Finite groups given by an explicit element type and multiplication rule,
//! rather than as point permutations.
//!
//! Subgroups are explicit element collections ([`Elements`]). Everything here
//! is exact and brute force, so every entry point takes an enumeration cap.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};

/// Default element cap for brute-force enumeration.
pub const DEFAULT_CAP: usize = 1 << 20;

/// An explicit element collection in discovery order.
pub type Elements<E> = IndexSet<E>;

/// Element type and group law shared by every member of an amalgam.
pub trait GroupOps: Send + Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Injective byte encoding.
    fn encode(&self, a: &Self::Elem) -> Vec<u8>;

    /// A faithful permutation image, when the element type has one. Lets
    /// orders be computed by a stabilizer chain instead of enumeration.
    fn permutation_image(&self, _a: &Self::Elem) -> Option<Permutation> {
        None
    }

    fn conj(&self, x: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(g), x), g)
    }
}

/// A group presented by generators over a [`GroupOps`] element type.
pub struct GroupSpec<O: GroupOps> {
    name: String,
    ops: Arc<O>,
    generators: Vec<O::Elem>,
    elements: OnceLock<Elements<O::Elem>>,
}

impl<O: GroupOps> Clone for GroupSpec<O> {
    fn clone(&self) -> Self {
        GroupSpec {
            name: self.name.clone(),
            ops: self.ops.clone(),
            generators: self.generators.clone(),
            elements: self.elements.clone(),
        }
    }
}

impl<O: GroupOps> Debug for GroupSpec<O> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupSpec")
            .field("name", &self.name)
            .field("generators", &self.generators.len())
            .finish()
    }
}

impl<O: GroupOps> GroupSpec<O> {
    pub fn new(name: impl Into<String>, ops: Arc<O>, generators: Vec<O::Elem>) -> Self {
        GroupSpec {
            name: name.into(),
            ops,
            generators,
            elements: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ops(&self) -> &Arc<O> {
        &self.ops
    }

    pub fn generators(&self) -> &[O::Elem] {
        &self.generators
    }

    /// All elements reachable from the generators, or a cap error.
    pub fn enumerate(&self, cap: usize) -> Result<&Elements<O::Elem>> {
        if let Some(els) = self.elements.get() {
            if els.len() > cap {
                return Err(Error::cap(format!("enumerating {}", self.name), cap));
            }
            return Ok(els);
        }
        let els = enumerate_closure(&*self.ops, &self.generators, cap)
            .map_err(|_| Error::cap(format!("enumerating {}", self.name), cap))?;
        Ok(self.elements.get_or_init(|| els))
    }

    pub fn is_enumerated(&self) -> bool {
        self.elements.get().is_some()
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        self.enumerate(cap).map(|e| e.len())
    }

    /// The group generated by the faithful permutation images of the generators.
    pub fn permutation_group(&self) -> Option<PermGroup> {
        let id = self.ops.permutation_image(&self.ops.identity())?;
        let gens: Option<Vec<Permutation>> = self
            .generators
            .iter()
            .map(|g| self.ops.permutation_image(g))
            .collect();
        PermGroup::new(id.degree(), gens?).ok()
    }

    /// Order via the faithful permutation image; no enumeration.
    pub fn order_via_representation(&self) -> Option<u64> {
        self.permutation_group().map(|g| g.order())
    }
}

fn enumerate_closure<O: GroupOps>(
    ops: &O,
    generators: &[O::Elem],
    cap: usize,
) -> std::result::Result<Elements<O::Elem>, ()> {
    let mut set = Elements::new();
    set.insert(ops.identity());
    let mut k = 0;
    while k < set.len() {
        let x = set[k].clone();
        for g in generators {
            let y = ops.mul(&x, g);
            if set.insert(y) && set.len() > cap {
                return Err(());
            }
        }
        k += 1;
    }
    Ok(set)
}

/// Closure of `generators` under the group law, as a bare element set.
pub fn enumerate<O: GroupOps>(
    ops: &O,
    generators: &[O::Elem],
    cap: usize,
) -> Result<Elements<O::Elem>> {
    enumerate_closure(ops, generators, cap).map_err(|_| Error::cap("enumeration", cap))
}

type MapFn<E> = Arc<dyn Fn(&E) -> E + Send + Sync>;

/// An injective homomorphism between two groups over the same element type.
pub struct Embedding<E> {
    label: String,
    map: MapFn<E>,
}

impl<E> Clone for Embedding<E> {
    fn clone(&self) -> Self {
        Embedding {
            label: self.label.clone(),
            map: self.map.clone(),
        }
    }
}

impl<E: Clone + 'static> Embedding<E> {
    pub fn identity() -> Self {
        Embedding {
            label: "identity".into(),
            map: Arc::new(|e: &E| e.clone()),
        }
    }

    pub fn new(label: impl Into<String>, map: impl Fn(&E) -> E + Send + Sync + 'static) -> Self {
        Embedding {
            label: label.into(),
            map: Arc::new(map),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, e: &E) -> E {
        (self.map)(e)
    }
}

/// Checks the homomorphism and injectivity properties of `emb` on `source`.
/// With `full` every pair of elements is checked, otherwise generator pairs.
pub fn check_embedding<O: GroupOps>(
    emb: &Embedding<O::Elem>,
    source: &GroupSpec<O>,
    full: bool,
    cap: usize,
) -> Result<()> {
    let ops = source.ops();
    if emb.apply(&ops.identity()) != ops.identity() {
        return Err(Error::Construction(format!(
            "embedding {} does not fix the identity",
            emb.label()
        )));
    }
    let sample: Vec<O::Elem> = if full {
        source.enumerate(cap)?.iter().cloned().collect()
    } else {
        source.generators().to_vec()
    };
    for x in &sample {
        for y in &sample {
            if emb.apply(&ops.mul(x, y)) != ops.mul(&emb.apply(x), &emb.apply(y)) {
                return Err(Error::Construction(format!(
                    "embedding {} is not multiplicative at {x:?}, {y:?}",
                    emb.label()
                )));
            }
        }
    }
    if full {
        let images: IndexSet<O::Elem> = sample.iter().map(|x| emb.apply(x)).collect();
        if images.len() != sample.len() {
            return Err(Error::Construction(format!(
                "embedding {} is not injective",
                emb.label()
            )));
        }
    }
    Ok(())
}

/// Groups `P_1..P_k` with a common subgroup `B` embedded in each.
pub struct Amalgam<O: GroupOps> {
    groups: Vec<GroupSpec<O>>,
    borel: GroupSpec<O>,
    embeddings: Vec<Embedding<O::Elem>>,
}

impl<O: GroupOps> Clone for Amalgam<O> {
    fn clone(&self) -> Self {
        Amalgam {
            groups: self.groups.clone(),
            borel: self.borel.clone(),
            embeddings: self.embeddings.clone(),
        }
    }
}

impl<O: GroupOps> Amalgam<O> {
    pub fn new(
        groups: Vec<GroupSpec<O>>,
        borel: GroupSpec<O>,
        embeddings: Vec<Embedding<O::Elem>>,
    ) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InvalidParameter("an amalgam has rank at least 2".into()));
        }
        if groups.len() != embeddings.len() {
            return Err(Error::InvalidParameter(
                "one embedding per member group is required".into(),
            ));
        }
        Ok(Amalgam {
            groups,
            borel,
            embeddings,
        })
    }

    pub fn rank(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[GroupSpec<O>] {
        &self.groups
    }

    pub fn borel(&self) -> &GroupSpec<O> {
        &self.borel
    }

    pub fn embeddings(&self) -> &[Embedding<O::Elem>] {
        &self.embeddings
    }

    pub fn ops(&self) -> &Arc<O> {
        self.borel.ops()
    }
}

/// The action of `P` on the right cosets of an embedded `B`.
#[derive(Clone, Debug)]
pub struct CosetAction<E> {
    image: PermGroup,
    transversal: Vec<E>,
    transversal_inv: Vec<E>,
    /// `ι(b) ↦ b` over the whole of `B`.
    pullback: HashMap<E, E>,
}

impl<E: Clone + Eq + Hash> CosetAction<E> {
    pub fn image(&self) -> &PermGroup {
        &self.image
    }

    /// Coset representatives; entry `i` represents point `i`, the identity first.
    pub fn transversal(&self) -> &[E] {
        &self.transversal
    }

    pub fn index(&self) -> usize {
        self.transversal.len()
    }

    /// Writes `y = ι(b) · t_i`; `None` if `y` lies in no coset, i.e. outside `P`.
    pub fn locate<O: GroupOps<Elem = E>>(&self, ops: &O, y: &E) -> Option<(usize, E)> {
        self.transversal_inv.iter().enumerate().find_map(|(i, tinv)| {
            self.pullback
                .get(&ops.mul(y, tinv))
                .map(|b| (i, b.clone()))
        })
    }
}

/// Permutation image of `P` on the right cosets of `ι(B)`, cosets numbered
/// breadth-first from the identity coset using generators in order.
pub fn coset_action<O: GroupOps>(
    p: &GroupSpec<O>,
    emb: &Embedding<O::Elem>,
    borel: &GroupSpec<O>,
    cap: usize,
) -> Result<CosetAction<O::Elem>> {
    let ops = p.ops();
    let b_elems = borel.enumerate(cap)?;
    let pullback: HashMap<O::Elem, O::Elem> =
        b_elems.iter().map(|b| (emb.apply(b), b.clone())).collect();
    let mut reps = vec![ops.identity()];
    let mut reps_inv = vec![ops.identity()];
    let mut actions: Vec<Vec<usize>> = vec![Vec::new(); p.generators().len()];
    let mut k = 0;
    while k < reps.len() {
        for (gi, g) in p.generators().iter().enumerate() {
            let y = ops.mul(&reps[k], g);
            let found = reps_inv
                .iter()
                .position(|tinv| pullback.contains_key(&ops.mul(&y, tinv)));
            let j = match found {
                Some(j) => j,
                None => {
                    if !pullback.contains_key(&ops.identity()) {
                        return Err(Error::NotSubgroup("B does not contain the identity".into()));
                    }
                    reps_inv.push(ops.inv(&y));
                    reps.push(y);
                    if reps.len() > cap {
                        return Err(Error::cap("coset enumeration", cap));
                    }
                    reps.len() - 1
                }
            };
            actions[gi].push(j);
        }
        k += 1;
    }
    let degree = reps.len();
    let gens = actions
        .into_iter()
        .map(|images| {
            Permutation::from_images(images).map_err(|_| {
                Error::NotSubgroup("image of B is not a subgroup of P".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CosetAction {
        image: PermGroup::new(degree, gens)?,
        transversal: reps,
        transversal_inv: reps_inv,
        pullback,
    })
}

/// Cheap closure check: exhaustive for small sets, otherwise a strided sample
/// of left factors against every right factor.
fn check_closed<O: GroupOps>(ops: &O, n: &Elements<O::Elem>) -> Result<()> {
    if !n.contains(&ops.identity()) {
        return Err(Error::NotSubgroup("collection lacks the identity".into()));
    }
    let stride = if n.len() <= 2048 { 1 } else { n.len() / 32 };
    for x in n.iter().step_by(stride) {
        for y in n {
            if !n.contains(&ops.mul(x, y)) {
                return Err(Error::NotSubgroup(format!(
                    "collection not closed: {x:?} * {y:?}"
                )));
            }
        }
    }
    Ok(())
}

/// The largest subgroup of `N ≤ B` normal in `P`: elements whose every
/// `P`-conjugate (through `ι`) stays inside `ι(N)`.
pub fn core_in<O: GroupOps>(
    p: &GroupSpec<O>,
    emb: &Embedding<O::Elem>,
    n: &Elements<O::Elem>,
) -> Result<Elements<O::Elem>> {
    let ops = p.ops();
    check_closed(&**ops, n)?;
    let image: Elements<O::Elem> = n.iter().map(|x| emb.apply(x)).collect();
    let gens = p.generators();
    let mut alive = vec![true; image.len()];
    loop {
        let mut changed = false;
        for idx in 0..image.len() {
            if !alive[idx] {
                continue;
            }
            let y = &image[idx];
            let escapes = gens.iter().any(|g| match image.get_index_of(&ops.conj(y, g)) {
                Some(j) => !alive[j],
                None => true,
            });
            if escapes {
                alive[idx] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(n
        .iter()
        .zip(alive)
        .filter(|&(_, a)| a)
        .map(|(x, _)| x.clone())
        .collect())
}

/// Largest subgroup of `B` normalised by every member: the fixpoint of
/// `N ↦ ⋂ core_in(P_i, ι_i, N)` from `N = B`. Trivial iff the amalgam is faithful.
pub fn largest_common_normal<O: GroupOps>(
    am: &Amalgam<O>,
    cap: usize,
) -> Result<Elements<O::Elem>> {
    let mut n = am.borel().enumerate(cap)?.clone();
    loop {
        let mut next = n.clone();
        for (p, emb) in am.groups().iter().zip(am.embeddings()) {
            let core = core_in(p, emb, &n)?;
            next.retain(|x| core.contains(x));
        }
        if next.len() == n.len() {
            return Ok(next);
        }
        n = next;
    }
}

/// When every coset image is regular, `B` is normal in every member, so a
/// faithful amalgam must have `|B| = 1`. Returns whether `|B| = 1`; errors
/// if the amalgam is not faithful or some image is not regular.
pub fn assert_regular_implies_trivial_borel<O: GroupOps>(am: &Amalgam<O>, cap: usize) -> Result<bool> {
    for (i, (p, emb)) in am.groups().iter().zip(am.embeddings()).enumerate() {
        let act = coset_action(p, emb, am.borel(), cap)?;
        if !act.image().is_regular() {
            return Err(Error::hypothesis(
                format!("coset image of member {} is not regular", i + 1),
                "all local actions regular",
            ));
        }
    }
    if largest_common_normal(am, cap)?.len() != 1 {
        return Err(Error::hypothesis(
            "amalgam is not faithful",
            "all local actions regular",
        ));
    }
    Ok(am.borel().order(cap)? == 1)
}

/// Point permutations of a fixed degree as a [`GroupOps`] element type.
#[derive(Clone, Debug)]
pub struct PermOps {
    degree: usize,
}

impl PermOps {
    pub fn new(degree: usize) -> Self {
        PermOps { degree }
    }

    /// A [`GroupSpec`] with the generators of `g`.
    pub fn spec(self: &Arc<Self>, name: &str, g: &PermGroup) -> GroupSpec<PermOps> {
        GroupSpec::new(name, self.clone(), g.generators().to_vec())
    }
}

impl GroupOps for PermOps {
    type Elem = Permutation;

    fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }
    fn mul(&self, a: &Permutation, b: &Permutation) -> Permutation {
        a * b
    }
    fn inv(&self, a: &Permutation) -> Permutation {
        a.inverse()
    }
    fn encode(&self, a: &Permutation) -> Vec<u8> {
        a.images()
            .iter()
            .flat_map(|&x| (x as u32).to_le_bytes())
            .collect()
    }
    fn permutation_image(&self, a: &Permutation) -> Option<Permutation> {
        Some(a.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::catalog;

    fn p(n: usize, cs: &[&[usize]]) -> Permutation {
        let cs: Vec<Vec<usize>> = cs.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(n, &cs).unwrap()
    }

    #[test]
    fn enumerate_trivial_and_cap() {
        let ops = Arc::new(PermOps::new(4));
        let t = GroupSpec::new("1", ops.clone(), vec![]);
        assert_eq!(t.order(10).unwrap(), 1);
        let s4 = ops.spec("S4", &catalog::symmetric(4).unwrap());
        assert!(matches!(s4.enumerate(23), Err(Error::CapExceeded { .. })));
        assert_eq!(s4.order(24).unwrap(), 24);
        assert_eq!(s4.order_via_representation(), Some(24));
    }

    #[test]
    fn coset_action_of_s4_on_s3() {
        let ops = Arc::new(PermOps::new(4));
        let s4 = ops.spec("S4", &catalog::symmetric(4).unwrap());
        let b = ops.spec("S4_3", &catalog::symmetric(4).unwrap().stabilizer(3));
        let act = coset_action(&s4, &Embedding::identity(), &b, DEFAULT_CAP).unwrap();
        assert_eq!(act.index(), 4);
        assert!(act.transversal()[0].is_identity());
        assert_eq!(act.image().order(), 24);
        assert!(act.image().is_transitive());
        for x in s4.enumerate(100).unwrap() {
            let (i, bb) = act.locate(&*ops, x).unwrap();
            assert_eq!(&(&bb * &act.transversal()[i]), x);
        }
        // B = P
        let act = coset_action(&b, &Embedding::identity(), &b, DEFAULT_CAP).unwrap();
        assert_eq!(act.index(), 1);
    }

    #[test]
    fn core_examples() {
        let ops = Arc::new(PermOps::new(4));
        let s4 = ops.spec("S4", &catalog::symmetric(4).unwrap());
        let id = Embedding::identity();
        let triv: Elements<Permutation> = [Permutation::identity(4)].into_iter().collect();
        assert_eq!(core_in(&s4, &id, &triv).unwrap().len(), 1);
        // core of D4 in S4 is the Klein four-group
        let d4 = ops.spec("D4", &catalog::dihedral(4).unwrap());
        let core = core_in(&s4, &id, d4.enumerate(100).unwrap()).unwrap();
        assert_eq!(core.len(), 4);
        assert!(core.contains(&p(4, &[&[0, 1], &[2, 3]])));
        // not closed
        let bad: Elements<Permutation> =
            [Permutation::identity(4), p(4, &[&[0, 1, 2]])].into_iter().collect();
        assert!(core_in(&s4, &id, &bad).is_err());
    }

    #[test]
    fn degenerate_amalgam_keeps_all_of_b() {
        let ops = Arc::new(PermOps::new(3));
        let s3 = ops.spec("S3", &catalog::symmetric(3).unwrap());
        let am = Amalgam::new(
            vec![s3.clone(), s3.clone()],
            s3.clone(),
            vec![Embedding::identity(), Embedding::identity()],
        )
        .unwrap();
        assert_eq!(largest_common_normal(&am, 100).unwrap().len(), 6);
    }

    #[test]
    fn regular_members_force_trivial_borel() {
        // C2, C2 and C3 acting on disjoint supports of a degree-7 set, trivial B.
        let ops = Arc::new(PermOps::new(7));
        let a = GroupSpec::new("C2", ops.clone(), vec![p(7, &[&[0, 1]])]);
        let b = GroupSpec::new("C2'", ops.clone(), vec![p(7, &[&[2, 3]])]);
        let c = GroupSpec::new("C3", ops.clone(), vec![p(7, &[&[4, 5, 6]])]);
        let one = GroupSpec::new("1", ops.clone(), vec![]);
        let id = || Embedding::identity();
        let rank2 = Amalgam::new(vec![a.clone(), b.clone()], one.clone(), vec![id(), id()]).unwrap();
        assert!(assert_regular_implies_trivial_borel(&rank2, 100).unwrap());
        let rank3 = Amalgam::new(vec![a, b, c], one, vec![id(), id(), id()]).unwrap();
        assert!(assert_regular_implies_trivial_borel(&rank3, 100).unwrap());
    }

    #[test]
    fn non_regular_member_is_a_precondition_failure() {
        let ops = Arc::new(PermOps::new(3));
        let s3 = ops.spec("S3", &catalog::symmetric(3).unwrap());
        let b = ops.spec("S3_0", &catalog::symmetric(3).unwrap().stabilizer(0));
        let am = Amalgam::new(
            vec![s3.clone(), s3],
            b,
            vec![Embedding::identity(), Embedding::identity()],
        )
        .unwrap();
        assert!(matches!(
            assert_regular_implies_trivial_borel(&am, 100),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn amalgam_needs_rank_two() {
        let ops = Arc::new(PermOps::new(2));
        let g = GroupSpec::new("1", ops, vec![]);
        assert!(Amalgam::new(vec![g.clone()], g, vec![Embedding::identity()]).is_err());
    }
}
