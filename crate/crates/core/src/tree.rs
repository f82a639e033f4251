//! Finite balls in the tree of a rank-two amalgam `P1 *_B P2`.
//!
//! Every group element has a unique normal form `b · t_1 ⋯ t_k` with `b ∈ B`
//! and the `t_j` alternating between non-identity right coset
//! representatives of `B` in `P1` and in `P2`. A vertex `P_i g` is stored as
//! the reduced word of `g` with its `B`-part dropped and with any leading
//! letter from `P_i` absorbed, so a type-1 word never starts with a `P1`
//! letter. Words grow to the left as one moves away from the root edge `B`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::abstract_group::{coset_action, Amalgam, CosetAction, Embedding, GroupOps};
use crate::error::{Error, Result};
use crate::perm::{perm_isomorphic, PermGroup, Permutation};
use crate::verdict::Verdict;

pub const DEFAULT_VERTEX_CAP: usize = 100_000;

/// An element of `P1` (side 0) or `P2` (side 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter<E> {
    pub side: usize,
    pub elem: E,
}

/// `b · t_1 ⋯ t_k`, each `t_j` given as `(side, transversal index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm<E> {
    pub b: E,
    pub word: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    /// 1 for cosets of `P1`, 2 for cosets of `P2`.
    pub kind: usize,
    pub word: Vec<(usize, usize)>,
}

impl TreeVertex {
    pub fn root(kind: usize) -> Self {
        TreeVertex {
            kind,
            word: Vec::new(),
        }
    }

    /// `t<type>:<indices>`, indices joined by `.`.
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.word.iter().map(|(_, i)| i.to_string()).collect();
        format!("t{}:{}", self.kind, idx.join("."))
    }
}

/// Transversals and embeddings of a rank-two amalgam.
pub struct TreeContext<O: GroupOps> {
    ops: Arc<O>,
    actions: [CosetAction<O::Elem>; 2],
    embeddings: [Embedding<O::Elem>; 2],
    generators: [Vec<O::Elem>; 2],
    borel_generators: Vec<O::Elem>,
    borel_order: usize,
}

impl<O: GroupOps> TreeContext<O> {
    pub fn new(am: &Amalgam<O>, cap: usize) -> Result<Self> {
        if am.rank() != 2 {
            return Err(Error::InvalidParameter("the tree needs a rank-two amalgam".into()));
        }
        let act = |i: usize| coset_action(&am.groups()[i], &am.embeddings()[i], am.borel(), cap);
        Ok(TreeContext {
            ops: am.ops().clone(),
            actions: [act(0)?, act(1)?],
            embeddings: [am.embeddings()[0].clone(), am.embeddings()[1].clone()],
            generators: [
                am.groups()[0].generators().to_vec(),
                am.groups()[1].generators().to_vec(),
            ],
            borel_generators: am.borel().generators().to_vec(),
            borel_order: am.borel().order(cap)?,
        })
    }

    /// `[P1 : B]` and `[P2 : B]`.
    pub fn degrees(&self) -> [usize; 2] {
        [self.actions[0].index(), self.actions[1].index()]
    }

    pub fn coset_action(&self, side: usize) -> &CosetAction<O::Elem> {
        &self.actions[side]
    }

    pub fn borel_order(&self) -> usize {
        self.borel_order
    }

    pub fn letter(&self, side: usize, elem: O::Elem) -> Letter<O::Elem> {
        Letter { side, elem }
    }

    /// The `B`-element `b` as a letter of `P1`.
    pub fn borel_letter(&self, b: &O::Elem) -> Letter<O::Elem> {
        self.letter(0, self.embeddings[0].apply(b))
    }

    /// Normal form of a product of letters, folding from the right.
    pub fn normalize(&self, letters: &[Letter<O::Elem>]) -> Result<NormalForm<O::Elem>> {
        let ops = &*self.ops;
        let mut b = ops.identity();
        let mut word: VecDeque<(usize, usize)> = VecDeque::new();
        for Letter { side, elem } in letters.iter().rev() {
            let s = *side;
            if s > 1 {
                return Err(Error::InvalidParameter(format!("letter side {s}")));
            }
            let mut y = ops.mul(elem, &self.embeddings[s].apply(&b));
            if let Some(&(s2, idx)) = word.front() {
                if s2 == s {
                    y = ops.mul(&y, &self.actions[s].transversal()[idx]);
                    word.pop_front();
                }
            }
            let (i, b2) = self.actions[s]
                .locate(ops, &y)
                .ok_or_else(|| Error::NotInGroup(format!("letter is not in P{}", s + 1)))?;
            if i != 0 {
                word.push_front((s, i));
            }
            b = b2;
        }
        Ok(NormalForm {
            b,
            word: word.into(),
        })
    }

    /// The transversal letters spelling a reduced word.
    pub fn letters(&self, word: &[(usize, usize)]) -> Vec<Letter<O::Elem>> {
        word.iter()
            .map(|&(s, i)| self.letter(s, self.actions[s].transversal()[i].clone()))
            .collect()
    }

    /// `B`-part followed by the word, as letters.
    pub fn expand(&self, nf: &NormalForm<O::Elem>) -> Vec<Letter<O::Elem>> {
        let mut out = vec![self.borel_letter(&nf.b)];
        out.extend(self.letters(&nf.word));
        out
    }

    pub fn inverse(&self, letters: &[Letter<O::Elem>]) -> Vec<Letter<O::Elem>> {
        letters
            .iter()
            .rev()
            .map(|l| self.letter(l.side, self.ops.inv(&l.elem)))
            .collect()
    }

    /// The vertex `P_kind · g` for `g` the product of `letters`.
    pub fn vertex_of(&self, kind: usize, letters: &[Letter<O::Elem>]) -> Result<TreeVertex> {
        let mut word = self.normalize(letters)?.word;
        if word.first().is_some_and(|&(s, _)| s == kind - 1) {
            word.remove(0);
        }
        Ok(TreeVertex { kind, word })
    }

    /// Neighbours of `v` in transversal order: `P_other · t_j g` for `t_j`
    /// running over the transversal of `B` in `P_kind`.
    pub fn neighbors(&self, v: &TreeVertex) -> Result<Vec<TreeVertex>> {
        let side = v.kind - 1;
        let other = 3 - v.kind;
        let tail = self.letters(&v.word);
        self.actions[side]
            .transversal()
            .iter()
            .map(|t| {
                let mut ls = vec![self.letter(side, t.clone())];
                ls.extend(tail.iter().cloned());
                self.vertex_of(other, &ls)
            })
            .collect()
    }

    /// Right multiplication of a vertex by a group element given as letters.
    pub fn act(&self, v: &TreeVertex, g: &[Letter<O::Elem>]) -> Result<TreeVertex> {
        let mut ls = self.letters(&v.word);
        ls.extend(g.iter().cloned());
        self.vertex_of(v.kind, &ls)
    }

    pub fn ball(&self, radius: usize, vertex_cap: usize) -> Result<TreeBall> {
        let mut ball = TreeBall {
            radius,
            degrees: self.degrees(),
            vertices: vec![TreeVertex::root(1), TreeVertex::root(2)],
            distance: vec![0, 0],
            edges: vec![(0, 1)],
            neighbors: vec![None, None],
            index: HashMap::new(),
        };
        ball.index.insert(ball.vertices[0].clone(), 0);
        ball.index.insert(ball.vertices[1].clone(), 1);
        let mut queue: VecDeque<usize> = VecDeque::from([0, 1]);
        while let Some(x) = queue.pop_front() {
            if ball.distance[x] >= radius {
                continue;
            }
            let mut list = Vec::new();
            for n in self.neighbors(&ball.vertices[x])? {
                let id = match ball.index.get(&n) {
                    Some(&id) => id,
                    None => {
                        let id = ball.vertices.len();
                        if id >= vertex_cap {
                            return Err(Error::cap("tree ball vertices", vertex_cap));
                        }
                        ball.index.insert(n.clone(), id);
                        ball.vertices.push(n);
                        ball.distance.push(ball.distance[x] + 1);
                        ball.neighbors.push(None);
                        ball.edges.push((x, id));
                        queue.push_back(id);
                        id
                    }
                };
                list.push(id);
            }
            ball.neighbors[x] = Some(list);
        }
        Ok(ball)
    }

    /// The group induced on the neighbours of an interior vertex `P_i g` by
    /// its stabiliser `g⁻¹ P_i g`, computed by moving neighbour words.
    pub fn local_action(&self, ball: &TreeBall, vertex: usize) -> Result<PermGroup> {
        let v = &ball.vertices[vertex];
        let nbrs = ball.neighbors[vertex]
            .as_ref()
            .ok_or_else(|| Error::BoundaryVertex(v.label()))?;
        let position: HashMap<&TreeVertex, usize> =
            nbrs.iter().enumerate().map(|(j, &n)| (&ball.vertices[n], j)).collect();
        let side = v.kind - 1;
        let w = self.letters(&v.word);
        let w_inv = self.inverse(&w);
        let mut gens = Vec::new();
        for p in &self.generators[side] {
            let mut g = w_inv.clone();
            g.push(self.letter(side, p.clone()));
            g.extend(w.iter().cloned());
            let images = nbrs
                .iter()
                .map(|&n| {
                    let image = self.act(&ball.vertices[n], &g)?;
                    position.get(&image).copied().ok_or_else(|| {
                        Error::Construction(format!("{} leaves the neighbourhood", image.label()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            gens.push(Permutation::from_images(images)?);
        }
        PermGroup::new(nbrs.len(), gens)
    }

    /// `|B|` and the orbit sizes of `B` on each sphere around the root edge.
    pub fn root_edge_stabilizer_action(&self, ball: &TreeBall) -> Result<RootEdgeAction> {
        let letters: Vec<Letter<O::Elem>> =
            self.borel_generators.iter().map(|b| self.borel_letter(b)).collect();
        let mut parent: Vec<usize> = (0..ball.vertices.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        let mut fixes_roots = true;
        for l in &letters {
            for (i, v) in ball.vertices.iter().enumerate() {
                let image = self.act(v, std::slice::from_ref(l))?;
                let j = *ball.index.get(&image).ok_or_else(|| {
                    Error::Construction(format!("B moves {} out of the ball", v.label()))
                })?;
                if i < 2 && j != i {
                    fixes_roots = false;
                }
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
        let mut spheres: Vec<HashMap<usize, usize>> = vec![HashMap::new(); ball.radius + 1];
        for i in 0..ball.vertices.len() {
            let r = find(&mut parent, i);
            *spheres[ball.distance[i]].entry(r).or_insert(0) += 1;
        }
        let sphere_orbits = spheres
            .into_iter()
            .map(|m| {
                let mut sizes: Vec<usize> = m.into_values().collect();
                sizes.sort_unstable();
                sizes
            })
            .collect();
        Ok(RootEdgeAction {
            borel_order: self.borel_order,
            fixes_roots,
            sphere_orbits,
        })
    }

    /// Structure checks on a ball plus, at every interior vertex, the local
    /// action against `expected[kind - 1]`.
    pub fn check_ball(&self, ball: &TreeBall, expected: [&PermGroup; 2]) -> Vec<Verdict> {
        let mut out = Vec::new();
        let n = ball.vertices.len();
        let symmetric = (0..n).all(|x| {
            ball.neighbors[x].iter().flatten().all(|&y| match &ball.neighbors[y] {
                Some(list) => list.contains(&x),
                None => ball.edges.contains(&(x, y)) || ball.edges.contains(&(y, x)),
            })
        });
        out.push(if ball.edges.len() + 1 == n && symmetric {
            Verdict::pass("ball_is_tree")
        } else {
            Verdict::fail("ball_is_tree", format!("{n} vertices, {} edges", ball.edges.len()))
        });
        let want = sphere_sizes(ball.degrees, ball.radius);
        let got = ball.sphere_sizes();
        out.push(if want == got {
            Verdict::pass("ball_sphere_sizes")
        } else {
            Verdict::fail("ball_sphere_sizes", format!("got {got:?}, expected {want:?}"))
        });
        let irregular = (0..n).find(|&x| match &ball.neighbors[x] {
            Some(list) => {
                let mut l = list.clone();
                l.sort_unstable();
                l.dedup();
                l.len() != ball.degrees[ball.vertices[x].kind - 1]
            }
            None => false,
        });
        out.push(match irregular {
            None => Verdict::pass("ball_biregular"),
            Some(x) => Verdict::fail("ball_biregular", ball.vertices[x].label()),
        });
        let mut local = Verdict::pass("local_actions");
        for x in (0..n).filter(|&x| ball.is_interior(x)) {
            let kind = ball.vertices[x].kind;
            let ok = self
                .local_action(ball, x)
                .and_then(|g| perm_isomorphic(&g, expected[kind - 1]));
            match ok {
                Ok(Some(_)) => {}
                Ok(None) => {
                    local = Verdict::fail("local_actions", ball.vertices[x].label());
                    break;
                }
                Err(e) => {
                    local = Verdict::skipped("local_actions", e.to_string());
                    break;
                }
            }
        }
        out.push(local);
        out
    }
}

/// Closed-form sphere sizes of the bi-regular tree around an edge.
pub fn sphere_sizes(degrees: [usize; 2], radius: usize) -> Vec<usize> {
    let mut out = vec![2];
    let (mut a, mut b) = (1usize, 1usize);
    for r in 1..=radius {
        // a: grows from the type-1 root, b: from the type-2 root
        let (da, db) = if r % 2 == 1 { (degrees[0], degrees[1]) } else { (degrees[1], degrees[0]) };
        a = a.saturating_mul(da - 1);
        b = b.saturating_mul(db - 1);
        out.push(a.saturating_add(b));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootEdgeAction {
    pub borel_order: usize,
    pub fixes_roots: bool,
    /// Orbit sizes of `B` on each sphere, sorted.
    pub sphere_orbits: Vec<Vec<usize>>,
}

/// The vertices within `radius` of the root edge.
#[derive(Clone, Debug)]
pub struct TreeBall {
    radius: usize,
    degrees: [usize; 2],
    vertices: Vec<TreeVertex>,
    distance: Vec<usize>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Option<Vec<usize>>>,
    index: HashMap<TreeVertex, usize>,
}

impl TreeBall {
    pub fn radius(&self) -> usize {
        self.radius
    }
    pub fn degrees(&self) -> [usize; 2] {
        self.degrees
    }
    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }
    pub fn distance(&self, v: usize) -> usize {
        self.distance[v]
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    /// Neighbour ids in transversal order; `None` on the boundary.
    pub fn neighbors(&self, v: usize) -> Option<&[usize]> {
        self.neighbors[v].as_deref()
    }
    pub fn is_interior(&self, v: usize) -> bool {
        self.neighbors[v].is_some()
    }
    pub fn find(&self, v: &TreeVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.distance {
            out[d] += 1;
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ball {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if v.kind == 1 { "circle" } else { "box" };
            let _ = writeln!(s, "  v{i} [label=\"{}\", shape={shape}];", v.label());
        }
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let style = if k == 0 { " [color=red, penwidth=3]" } else { "" };
            let _ = writeln!(s, "  v{a} -- v{b}{style};");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstract_group::{GroupSpec, PermOps, DEFAULT_CAP};
    use crate::perm::catalog;
    use crate::rank2::{build_from_groups, Rank2Ops};

    fn d4_c2_context() -> (Amalgam<Rank2Ops>, TreeContext<Rank2Ops>) {
        let inst = build_from_groups(
            &catalog::dihedral(4).unwrap(),
            &catalog::cyclic(2).unwrap(),
            1,
        )
        .unwrap();
        let am = inst.assemble_amalgam().unwrap();
        let ctx = TreeContext::new(&am, DEFAULT_CAP).unwrap();
        (am, ctx)
    }

    #[test]
    fn closed_form_sphere_sizes() {
        assert_eq!(sphere_sizes([4, 2], 0), vec![2]);
        assert_eq!(sphere_sizes([4, 2], 2), vec![2, 4, 6]);
        assert_eq!(sphere_sizes([3, 3], 3), vec![2, 4, 8, 16]);
    }

    #[test]
    fn normal_forms() {
        let (am, ctx) = d4_c2_context();
        let ops = am.ops().clone();
        let nf = ctx.normalize(&[]).unwrap();
        assert_eq!(nf.b, ops.identity());
        assert!(nf.word.is_empty());
        for b in am.borel().enumerate(DEFAULT_CAP).unwrap().iter().take(8) {
            let nf = ctx.normalize(&[ctx.borel_letter(b)]).unwrap();
            assert_eq!((&nf.b, nf.word.len()), (b, 0));
        }
        let p1 = am.groups()[0].enumerate(DEFAULT_CAP).unwrap();
        let p2 = am.groups()[1].enumerate(DEFAULT_CAP).unwrap();
        let b = am.borel().enumerate(DEFAULT_CAP).unwrap();
        let mut pairs = 0;
        for p in p1.iter().filter(|x| !b.contains(*x)) {
            for q in p2.iter().filter(|x| !b.contains(*x)) {
                let letters = [ctx.letter(0, p.clone()), ctx.letter(1, q.clone())];
                let nf = ctx.normalize(&letters).unwrap();
                assert_eq!(nf.word.len(), 2);
                assert_eq!(ctx.normalize(&ctx.expand(&nf)).unwrap(), nf);
                // p q (b t1 t2)⁻¹ = 1
                let mut check = letters.to_vec();
                check.extend(ctx.inverse(&ctx.expand(&nf)));
                let one = ctx.normalize(&check).unwrap();
                assert!(one.word.is_empty() && one.b == ops.identity());
                pairs += 1;
            }
        }
        assert_eq!(pairs, 96 * 32);
    }

    #[test]
    fn normalize_is_multiplicative() {
        let (am, ctx) = d4_c2_context();
        let gens: Vec<Letter<_>> = (0..2)
            .flat_map(|s| am.groups()[s].generators().iter().map(move |g| (s, g.clone())))
            .map(|(s, g)| ctx.letter(s, g))
            .collect();
        let mut word = Vec::new();
        for k in 0..40 {
            let x = gens[(k * 7 + 3) % gens.len()].clone();
            let nf = ctx.normalize(&word).unwrap();
            let mut lhs = ctx.expand(&nf);
            lhs.push(x.clone());
            word.push(x);
            assert_eq!(ctx.normalize(&lhs).unwrap(), ctx.normalize(&word).unwrap());
        }
    }

    #[test]
    fn letters_outside_the_groups_are_rejected() {
        let (am, ctx) = d4_c2_context();
        // an R-element of P2 offered as a P1 letter
        let r = am.groups()[1].generators().last().unwrap().clone();
        assert!(ctx.normalize(&[ctx.letter(0, r)]).is_err());
    }

    #[test]
    fn ball_radius_two() {
        let (am, ctx) = d4_c2_context();
        assert_eq!(ctx.degrees(), [4, 2]);
        let ball = ctx.ball(2, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(ball.vertices().len(), 12);
        assert_eq!(ball.sphere_sizes(), vec![2, 4, 6]);
        let d4 = catalog::dihedral(4).unwrap();
        let c2 = catalog::cyclic(2).unwrap();
        for v in ctx.check_ball(&ball, [&d4, &c2]) {
            assert!(v.is_pass(), "{v:?}");
        }
        let root1 = ctx.local_action(&ball, 0).unwrap();
        assert!(root1.same_group(ctx.coset_action(0).image()));
        assert_eq!(ctx.local_action(&ball, 1).unwrap().order(), 2);
        let boundary = (0..12).find(|&v| !ball.is_interior(v)).unwrap();
        assert!(matches!(
            ctx.local_action(&ball, boundary),
            Err(Error::BoundaryVertex(_))
        ));
        let rs = ctx.root_edge_stabilizer_action(&ball).unwrap();
        assert_eq!(rs.borel_order, 32);
        assert!(rs.fixes_roots);
        assert_eq!(rs.sphere_orbits[0], vec![1, 1]);
        // B fixes the edge, so on the type-1 root's other neighbours it acts
        // like the point stabilizer of D4: orbits {2}, {1, 3}
        assert_eq!(rs.sphere_orbits[1], vec![1, 1, 2]);
        assert_eq!(am.rank(), 2);
    }

    #[test]
    fn ball_small_radii_and_cap() {
        let (_, ctx) = d4_c2_context();
        let ball = ctx.ball(0, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!((ball.vertices().len(), ball.edges().len()), (2, 1));
        let rs = ctx.root_edge_stabilizer_action(&ball).unwrap();
        assert_eq!(rs.sphere_orbits, vec![vec![1, 1]]);
        let ball = ctx.ball(1, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(ball.vertices().len(), 2 + 3 + 1);
        assert!(matches!(ctx.ball(6, 50), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn dot_export() {
        let (_, ctx) = d4_c2_context();
        let dot = ctx.ball(2, DEFAULT_VERTEX_CAP).unwrap().to_dot();
        assert!(dot.starts_with("graph ball {"));
        assert!(dot.contains("v0 -- v1 [color=red, penwidth=3];"));
        assert_eq!(dot.matches(" -- ").count(), 11);
        assert!(dot.contains("label=\"t1:\""));
        assert!(dot.contains("label=\"t2:\""));
    }

    #[test]
    fn permutation_amalgam_tree() {
        // Sym(3) over a point stabilizer and C2 x C2 over C2: degrees 3 and 2.
        let ops = Arc::new(PermOps::new(5));
        let p = |cs: &[&[usize]]| {
            let cs: Vec<Vec<usize>> = cs.iter().map(|c| c.to_vec()).collect();
            Permutation::from_cycles(5, &cs).unwrap()
        };
        let t = p(&[&[1, 2]]);
        let p1 = GroupSpec::new("P1", ops.clone(), vec![p(&[&[0, 1, 2]]), t.clone()]);
        let p2 = GroupSpec::new("P2", ops.clone(), vec![t.clone(), p(&[&[3, 4]])]);
        let b = GroupSpec::new("B", ops, vec![t]);
        let am = Amalgam::new(
            vec![p1, p2],
            b,
            vec![Embedding::identity(), Embedding::identity()],
        )
        .unwrap();
        let ctx = TreeContext::new(&am, DEFAULT_CAP).unwrap();
        let ball = ctx.ball(3, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(ball.sphere_sizes(), sphere_sizes([3, 2], 3));
        let s3 = catalog::symmetric(3).unwrap();
        let c2 = catalog::cyclic(2).unwrap();
        for v in ctx.check_ball(&ball, [&s3, &c2]) {
            assert!(v.is_pass(), "{v:?}");
        }
    }
}
