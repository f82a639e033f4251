//! The rank-two amalgam over a non-semiprimitive `L` and a transitive `R`.
//!
//! Elements of `L ⋉ V^m`, extended by an `R`-coordinate for the semidirect
//! products, are stored as flat byte strings:
//!
//! ```text
//! [ g : n | f_1(0) .. f_1(|Δ|-1) | .. | f_m(|Δ|-1) : each n | r : m2 ]
//! ```
//!
//! where `n = deg L`, `m2 = deg R`, every `f_i(σ)` is an element of `L_λ` and
//! every permutation is stored as its image sequence. The layout index of
//! `f_i` is `i - 1`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::abstract_group::{
    core_in, coset_action, enumerate, largest_common_normal, Amalgam, Elements, Embedding,
    GroupOps, GroupSpec,
};
use crate::error::{Error, Result};
use crate::perm::{
    build_section_epsilon, build_transversal_tau, find_witness, perm_isomorphic, PermGroup,
    Permutation, SectionEpsilon, TransversalTau, WitnessData,
};
use crate::verdict::{Verdict, VerifyMode};

pub type Elem = Vec<u8>;

/// Name of the result refused for semiprimitive `L`.
pub const RANK2_THEOREM: &str = "unbounded Borel order for a non-semiprimitive rank-two type";

/// `Ω = {0..m2-1} × {0..ℓ-1}` with `R` acting on the first coordinate and
/// fixing the extra point `m`.
///
/// Points are numbered `(y, z) ↦ z·m2 + y`, so every `R`-orbit on `{0..m}` is
/// a run of consecutive integers. Faithfulness depends on this: with the
/// `y`-major numbering `y·ℓ + z` and `ℓ ≥ 2` the amalgam has a nontrivial
/// normal subgroup inside `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaIndex {
    m2: usize,
    ell: usize,
}

impl OmegaIndex {
    pub fn new(m2: usize, ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("ell must be at least 1".into()));
        }
        if m2 < 2 {
            return Err(Error::InvalidParameter("R must have degree at least 2".into()));
        }
        Ok(OmegaIndex { m2, ell })
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.m2 * self.ell
    }

    pub fn index(&self, y: usize, z: usize) -> usize {
        z * self.m2 + y
    }

    pub fn pair(&self, j: usize) -> (usize, usize) {
        (j % self.m2, j / self.m2)
    }

    /// Image of `j ∈ {0..m}` under the point permutation `r` of `{0..m2-1}`.
    pub fn act(&self, j: usize, r: &[usize]) -> usize {
        if j == self.m() {
            return j;
        }
        let (y, z) = self.pair(j);
        self.index(r[y], z)
    }

    /// The permutation of `{0..m}` induced by `r`.
    pub fn extended(&self, r: &Permutation) -> Permutation {
        let images = (0..=self.m()).map(|j| self.act(j, r.images())).collect();
        Permutation::from_images(images).expect("R acts on Ω")
    }
}

/// The `((g_0..g_m), (h_0..h_{m-1}))` view of an element of `L ⋉ V^m`:
/// `g_0 = g`, `g_i = f_i(δ)` and `h_{i-1}` is `f_i` off `δ`, listed by cell
/// with `δ` skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleView {
    pub gs: Vec<Permutation>,
    pub hs: Vec<Vec<Permutation>>,
}

/// Group law shared by `A`, `C`, `M`, `P1`, `P2` and `B`.
#[derive(Clone, Debug)]
pub struct Rank2Ops {
    n: usize,
    cells: usize,
    delta: usize,
    omega: OmegaIndex,
    cell_of: Vec<usize>,
    cell_rep: Vec<usize>,
}

fn to_bytes(p: &Permutation) -> impl Iterator<Item = u8> + '_ {
    p.images().iter().map(|&x| x as u8)
}

fn from_bytes(b: &[u8]) -> Permutation {
    Permutation::from_images(b.iter().map(|&x| x as usize).collect()).expect("stored permutation")
}

fn is_identity_bytes(b: &[u8]) -> bool {
    b.iter().enumerate().all(|(i, &x)| i == x as usize)
}

impl Rank2Ops {
    fn new(w: &WitnessData, omega: OmegaIndex) -> Result<Self> {
        let n = w.l().degree();
        if n > 256 || omega.m2() > 256 {
            return Err(Error::InvalidParameter(
                "degrees above 256 are not supported".into(),
            ));
        }
        let partition = w.blocks().partition();
        let cell_of = (0..n).map(|p| partition.cell_of(p)).collect();
        let cell_rep = partition.cells().iter().map(|c| c[0]).collect();
        Ok(Rank2Ops {
            n,
            cells: partition.len(),
            delta: w.delta(),
            omega,
            cell_of,
            cell_rep,
        })
    }

    pub fn omega(&self) -> &OmegaIndex {
        &self.omega
    }

    fn m(&self) -> usize {
        self.omega.m()
    }

    fn f_off(&self, i: usize, sigma: usize) -> usize {
        self.n + (i * self.cells + sigma) * self.n
    }

    fn r_off(&self) -> usize {
        self.n + self.m() * self.cells * self.n
    }

    fn len(&self) -> usize {
        self.r_off() + self.omega.m2()
    }

    fn top_bytes<'a>(&self, e: &'a [u8]) -> &'a [u8] {
        &e[..self.n]
    }

    fn f_bytes<'a>(&self, e: &'a [u8], i: usize, sigma: usize) -> &'a [u8] {
        let o = self.f_off(i, sigma);
        &e[o..o + self.n]
    }

    fn r_bytes<'a>(&self, e: &'a [u8]) -> &'a [u8] {
        &e[self.r_off()..]
    }

    /// Slot `G_k`: the top for `k = 0`, otherwise `f_k(δ)`.
    fn g_slot<'a>(&self, e: &'a [u8], k: usize) -> &'a [u8] {
        if k == 0 {
            self.top_bytes(e)
        } else {
            self.f_bytes(e, k - 1, self.delta)
        }
    }

    /// `σ ↦ σ^{π(g)}` on cell indices.
    fn pi_cells(&self, g: &[u8]) -> Vec<usize> {
        self.cell_rep
            .iter()
            .map(|&p| self.cell_of[g[p] as usize])
            .collect()
    }

    pub fn element(
        &self,
        g: &Permutation,
        f: impl Fn(usize, usize) -> Permutation,
        r: &Permutation,
    ) -> Elem {
        let mut e = Vec::with_capacity(self.len());
        e.extend(to_bytes(g));
        for i in 0..self.m() {
            for sigma in 0..self.cells {
                e.extend(to_bytes(&f(i, sigma)));
            }
        }
        e.extend(to_bytes(r));
        e
    }

    pub fn top(&self, e: &[u8]) -> Permutation {
        from_bytes(self.top_bytes(e))
    }

    /// `f_{i+1}(σ)`.
    pub fn f_value(&self, e: &[u8], i: usize, sigma: usize) -> Permutation {
        from_bytes(self.f_bytes(e, i, sigma))
    }

    pub fn r_part(&self, e: &[u8]) -> Permutation {
        from_bytes(self.r_bytes(e))
    }

    pub fn tuple_view(&self, e: &[u8]) -> TupleView {
        let gs = (0..=self.m()).map(|k| from_bytes(self.g_slot(e, k))).collect();
        let hs = (0..self.m())
            .map(|i| {
                (0..self.cells)
                    .filter(|&s| s != self.delta)
                    .map(|s| self.f_value(e, i, s))
                    .collect()
            })
            .collect();
        TupleView { gs, hs }
    }

    /// Inverse of [`Rank2Ops::tuple_view`], with trivial `R`-coordinate.
    pub fn from_tuple(&self, t: &TupleView) -> Elem {
        let others: Vec<usize> = (0..self.cells).filter(|&s| s != self.delta).collect();
        self.element(
            &t.gs[0],
            |i, s| {
                if s == self.delta {
                    t.gs[i + 1].clone()
                } else {
                    t.hs[i][others.iter().position(|&x| x == s).unwrap()].clone()
                }
            },
            &Permutation::identity(self.omega.m2()),
        )
    }

    /// Product in `L ⋉ V^m`; the `R`-coordinate of the result is copied from `a`.
    fn wreath_mul(&self, a: &[u8], b: &[u8]) -> Elem {
        let n = self.n;
        let mut out = vec![0u8; self.len()];
        let (ga, gb) = (self.top_bytes(a), self.top_bytes(b));
        for p in 0..n {
            out[p] = gb[ga[p] as usize];
        }
        // F_i(σ) = f_i(σ^{π(g')⁻¹}) · f'_i(σ)
        let pb = self.pi_cells(gb);
        let mut pre = vec![0; self.cells];
        for (s, &t) in pb.iter().enumerate() {
            pre[t] = s;
        }
        for i in 0..self.m() {
            for sigma in 0..self.cells {
                let fa = self.f_bytes(a, i, pre[sigma]);
                let fb = self.f_bytes(b, i, sigma);
                let o = self.f_off(i, sigma);
                for p in 0..n {
                    out[o + p] = fb[fa[p] as usize];
                }
            }
        }
        let ro = self.r_off();
        out[ro..].copy_from_slice(&a[ro..]);
        out
    }

    /// Inverse in `L ⋉ V^m`: `(g⁻¹, σ ↦ f_i(σ^{π(g)})⁻¹)`.
    fn wreath_inv(&self, a: &[u8]) -> Elem {
        let n = self.n;
        let mut out = vec![0u8; self.len()];
        let ga = self.top_bytes(a);
        for p in 0..n {
            out[ga[p] as usize] = p as u8;
        }
        let pa = self.pi_cells(ga);
        for i in 0..self.m() {
            for sigma in 0..self.cells {
                let fa = self.f_bytes(a, i, pa[sigma]);
                let o = self.f_off(i, sigma);
                for p in 0..n {
                    out[o + fa[p] as usize] = p as u8;
                }
            }
        }
        let ro = self.r_off();
        out[ro..].copy_from_slice(&a[ro..]);
        out
    }

    /// Re-indexing with `G'_j = G_{j^s}` and `H'_j = H_{j^s}`; `c^r` is the
    /// case `s = r⁻¹`.
    fn reindex_by(&self, a: &[u8], s: &[usize]) -> Elem {
        let mut out = a.to_vec();
        let n = self.n;
        let src = self.g_slot(a, self.omega.act(0, s));
        out[..n].copy_from_slice(src);
        for j in 1..=self.m() {
            let src = self.g_slot(a, self.omega.act(j, s));
            let o = self.f_off(j - 1, self.delta);
            out[o..o + n].copy_from_slice(src);
        }
        for j in 0..self.m() {
            let k = self.omega.act(j, s);
            for sigma in (0..self.cells).filter(|&x| x != self.delta) {
                let o = self.f_off(j, sigma);
                out[o..o + n].copy_from_slice(self.f_bytes(a, k, sigma));
            }
        }
        out
    }

    /// `c^r = r⁻¹ c r`, ignoring and preserving any `R`-coordinate of `c`.
    pub fn act(&self, c: &[u8], r: &Permutation) -> Elem {
        self.reindex_by(c, r.inverse().images())
    }

    /// Faithful image of an element of `L ⋉ V^m` with trivial `R`-coordinate,
    /// on `n + m·|Δ|·n` points: the top copy of `{0..n-1}` followed by
    /// `(i, σ, p)` with `(i, σ, p) ↦ (i, σ^{π(g)}, p^{f_i(σ^{π(g)})})`.
    pub fn wreath_image(&self, e: &[u8]) -> Option<Permutation> {
        if !is_identity_bytes(self.r_bytes(e)) {
            return None;
        }
        let n = self.n;
        let g = self.top_bytes(e);
        let pg = self.pi_cells(g);
        let mut images: Vec<usize> = g.iter().map(|&x| x as usize).collect();
        for i in 0..self.m() {
            for sigma in 0..self.cells {
                let t = pg[sigma];
                let f = self.f_bytes(e, i, t);
                let base = n + (i * self.cells + t) * n;
                images.extend(f.iter().map(|&x| base + x as usize));
            }
        }
        Some(Permutation::from_images(images).expect("wreath image"))
    }

    /// Faithful image of an element of `C ⋊ R`: one copy of `{0..n-1}` per
    /// slot `G_j` (`0 ≤ j ≤ m`) acted on by `g_j`, one copy of
    /// `(Δ∖{δ}) × {0..n-1}` per slot `H_j` acted on through `g_0`, and the
    /// `R`-coordinate permuting the slots. `None` outside `C ⋊ R`, where this
    /// is not a homomorphism.
    pub fn cr_image(&self, e: &[u8]) -> Option<Permutation> {
        let n = self.n;
        let m = self.m();
        let g0 = self.top_bytes(e);
        if self.cell_of[g0[self.cell_rep[self.delta]] as usize] != self.delta {
            return None;
        }
        let pg = self.pi_cells(g0);
        let others: Vec<usize> = (0..self.cells).filter(|&s| s != self.delta).collect();
        let mut slot = vec![usize::MAX; self.cells];
        for (k, &s) in others.iter().enumerate() {
            slot[s] = k;
        }
        let hblock = (self.cells - 1) * n;
        let hbase = (m + 1) * n;
        let r: Vec<usize> = self.r_bytes(e).iter().map(|&x| x as usize).collect();
        let mut images = vec![0; hbase + m * hblock];
        for j in 0..=m {
            let gj = self.g_slot(e, j);
            let jr = self.omega.act(j, &r);
            for p in 0..n {
                images[j * n + p] = jr * n + gj[p] as usize;
            }
        }
        for j in 0..m {
            let jr = self.omega.act(j, &r);
            for &s in &others {
                let t = pg[s];
                let h = self.f_bytes(e, j, t);
                for p in 0..n {
                    images[hbase + j * hblock + slot[s] * n + p] =
                        hbase + jr * hblock + slot[t] * n + h[p] as usize;
                }
            }
        }
        Permutation::from_images(images).ok()
    }
}

impl GroupOps for Rank2Ops {
    type Elem = Elem;

    fn identity(&self) -> Elem {
        let id = Permutation::identity(self.n);
        self.element(&id, |_, _| id.clone(), &Permutation::identity(self.omega.m2()))
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let ra = self.r_bytes(a);
        let mut out = if is_identity_bytes(ra) {
            self.wreath_mul(a, b)
        } else {
            let s: Vec<usize> = ra.iter().map(|&x| x as usize).collect();
            self.wreath_mul(a, &self.reindex_by(b, &s))
        };
        let rb = self.r_bytes(b);
        let ro = self.r_off();
        for y in 0..self.omega.m2() {
            out[ro + y] = rb[ra[y] as usize];
        }
        out
    }

    fn inv(&self, a: &Elem) -> Elem {
        let ainv = self.wreath_inv(a);
        let ra = self.r_bytes(a);
        let mut out = if is_identity_bytes(ra) {
            ainv
        } else {
            let s: Vec<usize> = ra.iter().map(|&x| x as usize).collect();
            let mut s_inv = vec![0; s.len()];
            for (y, &t) in s.iter().enumerate() {
                s_inv[t] = y;
            }
            self.reindex_by(&ainv, &s_inv)
        };
        let ro = self.r_off();
        for y in 0..self.omega.m2() {
            out[ro + ra[y] as usize] = y as u8;
        }
        out
    }

    fn encode(&self, a: &Elem) -> Vec<u8> {
        a.clone()
    }
}

/// Orders of the constructed groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rank2Orders {
    pub l: u64,
    pub r: u64,
    pub r1: u64,
    pub cells: usize,
    pub l_lambda: u64,
    pub k_lambda: u64,
    pub s_delta: u64,
    pub m: u64,
    pub a: u64,
    pub c: u64,
    pub b: u64,
    pub p1: u64,
    pub p2: u64,
    /// `|K_λ|^{|Δ|m}`.
    pub m_predicted: u128,
}

/// All data of one rank-two construction.
#[derive(Clone)]
pub struct Rank2Instance {
    witness: WitnessData,
    tau: TransversalTau,
    eps: SectionEpsilon,
    r: PermGroup,
    r1: PermGroup,
    ops: Arc<Rank2Ops>,
    a: GroupSpec<Rank2Ops>,
    c: GroupSpec<Rank2Ops>,
    m: GroupSpec<Rank2Ops>,
    p1: GroupSpec<Rank2Ops>,
    p2: GroupSpec<Rank2Ops>,
    b: GroupSpec<Rank2Ops>,
}

impl std::fmt::Debug for Rank2Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rank2Instance")
            .field("omega", self.ops.omega())
            .finish_non_exhaustive()
    }
}

/// Refuses semiprimitive `L`, otherwise builds from the canonical witness.
pub fn build_from_groups(l: &PermGroup, r: &PermGroup, ell: usize) -> Result<Rank2Instance> {
    match find_witness(l)? {
        Some(w) => Rank2Instance::build(w, r, ell),
        None => Err(Error::hypothesis("L is semiprimitive", RANK2_THEOREM)),
    }
}

impl Rank2Instance {
    pub fn build(witness: WitnessData, r: &PermGroup, ell: usize) -> Result<Self> {
        let omega = OmegaIndex::new(r.degree(), ell)?;
        if !r.is_transitive() {
            return Err(Error::Intransitive);
        }
        let tau = build_transversal_tau(witness.s(), witness.s_delta())?;
        let eps = build_section_epsilon(&witness)?;
        let ops = Arc::new(Rank2Ops::new(&witness, omega)?);
        let r1 = r.stabilizer(0);
        let mut inst = Rank2Instance {
            witness,
            tau,
            eps,
            r: r.clone(),
            r1,
            ops: ops.clone(),
            a: GroupSpec::new("A", ops.clone(), vec![]),
            c: GroupSpec::new("C", ops.clone(), vec![]),
            m: GroupSpec::new("M", ops.clone(), vec![]),
            p1: GroupSpec::new("P1", ops.clone(), vec![]),
            p2: GroupSpec::new("P2", ops.clone(), vec![]),
            b: GroupSpec::new("B", ops.clone(), vec![]),
        };
        let m_gens = inst.m_generators();
        let lifts = |gens: &[Permutation]| -> Vec<Elem> {
            gens.iter().map(|g| inst.lift_f_g(g)).collect()
        };
        let a_gens = [lifts(inst.witness.l().generators()), m_gens.clone()].concat();
        let c_gens = [lifts(inst.witness.l_lambda().generators()), m_gens.clone()].concat();
        let r_elem = |g: &Permutation| ops.element(
            &Permutation::identity(ops.n),
            |_, _| Permutation::identity(ops.n),
            g,
        );
        let r_gens: Vec<Elem> = inst.r.generators().iter().map(r_elem).collect();
        let r1_gens: Vec<Elem> = inst.r1.generators().iter().map(r_elem).collect();
        inst.a = GroupSpec::new("A", ops.clone(), a_gens.clone());
        inst.c = GroupSpec::new("C", ops.clone(), c_gens.clone());
        inst.m = GroupSpec::new("M", ops.clone(), m_gens);
        inst.p1 = GroupSpec::new("P1", ops.clone(), [a_gens, r1_gens.clone()].concat());
        inst.p2 = GroupSpec::new("P2", ops.clone(), [c_gens.clone(), r_gens].concat());
        inst.b = GroupSpec::new("B", ops.clone(), [c_gens, r1_gens].concat());
        Ok(inst)
    }

    /// `K_λ`-generators placed at each coordinate `(i, σ)`.
    fn m_generators(&self) -> Vec<Elem> {
        let n = self.ops.n;
        let id = Permutation::identity(n);
        let rid = Permutation::identity(self.ops.omega.m2());
        let mut gens = Vec::new();
        for i in 0..self.ops.m() {
            for sigma in 0..self.ops.cells {
                for k in self.witness.k_lambda().generators() {
                    gens.push(self.ops.element(
                        &id,
                        |a, b| if (a, b) == (i, sigma) { k.clone() } else { id.clone() },
                        &rid,
                    ));
                }
            }
        }
        gens
    }

    pub fn witness(&self) -> &WitnessData {
        &self.witness
    }
    pub fn tau(&self) -> &TransversalTau {
        &self.tau
    }
    pub fn ops(&self) -> &Arc<Rank2Ops> {
        &self.ops
    }
    pub fn omega(&self) -> &OmegaIndex {
        self.ops.omega()
    }
    pub fn r(&self) -> &PermGroup {
        &self.r
    }
    pub fn r1(&self) -> &PermGroup {
        &self.r1
    }
    pub fn a(&self) -> &GroupSpec<Rank2Ops> {
        &self.a
    }
    pub fn c(&self) -> &GroupSpec<Rank2Ops> {
        &self.c
    }
    pub fn m(&self) -> &GroupSpec<Rank2Ops> {
        &self.m
    }
    pub fn p1(&self) -> &GroupSpec<Rank2Ops> {
        &self.p1
    }
    pub fn p2(&self) -> &GroupSpec<Rank2Ops> {
        &self.p2
    }
    pub fn b(&self) -> &GroupSpec<Rank2Ops> {
        &self.b
    }

    /// `(g, f_g, .., f_g)` with `f_g(δ^x) = ε(τ(x·π(g)⁻¹) · π(g) · τ(x)⁻¹)`.
    pub fn lift_f_g(&self, g: &Permutation) -> Elem {
        let s = self.witness.pi(g);
        let mut f = vec![Permutation::identity(self.ops.n); self.ops.cells];
        for x in self.tau.reps() {
            f[x.apply(self.witness.delta())] = self.eps.get(&self.tau.cocycle(x, &s)).clone();
        }
        self.ops.element(g, |_, sigma| f[sigma].clone(), &Permutation::identity(self.ops.omega.m2()))
    }

    /// The defining condition of `A`, checked over the transversal: `g ∈ L`,
    /// all `f`-values in `L_λ`, and `π(f_i(δ^x)) = τ(x·π(g)⁻¹)·π(g)·τ(x)⁻¹`.
    pub fn membership_a(&self, e: &[u8]) -> bool {
        if e.len() != self.ops.len() || !is_identity_bytes(self.ops.r_bytes(e)) {
            return false;
        }
        let g = self.ops.top(e);
        if !self.witness.l().contains(&g) {
            return false;
        }
        let s = self.witness.pi(&g);
        for x in self.tau.reps() {
            let want = self.tau.cocycle(x, &s);
            let cell = x.apply(self.witness.delta());
            for i in 0..self.ops.m() {
                let v = self.ops.f_value(e, i, cell);
                if !self.witness.l_lambda().contains(&v) || self.witness.pi(&v) != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn membership_c(&self, e: &[u8]) -> bool {
        self.membership_a(e) && self.witness.l_lambda().contains(&self.ops.top(e))
    }

    pub fn phi(&self, e: &[u8]) -> Permutation {
        self.ops.top(e)
    }

    /// The re-indexing action of `R` on `C`.
    pub fn r_action(&self, c: &[u8], r: &Permutation) -> Result<Elem> {
        if !self.r.contains(r) {
            return Err(Error::NotInGroup(format!("{r} is not in R")));
        }
        if !self.membership_c(c) {
            return Err(Error::NotInGroup("element is not in C".into()));
        }
        Ok(self.ops.act(c, r))
    }

    /// The same re-indexing applied to `A`, for `r` fixing `0`.
    pub fn r1_action_on_a(&self, a: &[u8], r: &Permutation) -> Result<Elem> {
        if !self.r.contains(r) || !r.fixes(0) {
            return Err(Error::NotInGroup(format!("{r} is not in R_1")));
        }
        if !self.membership_a(a) {
            return Err(Error::NotInGroup("element is not in A".into()));
        }
        Ok(self.ops.act(a, r))
    }

    fn wreath_group(&self, g: &GroupSpec<Rank2Ops>) -> PermGroup {
        let gens = g.generators().iter().map(|e| self.ops.wreath_image(e).unwrap()).collect();
        PermGroup::new(self.wreath_degree(), gens).expect("wreath image")
    }

    fn wreath_degree(&self) -> usize {
        self.ops.n * (1 + self.ops.m() * self.ops.cells)
    }

    fn cr_group(&self, g: &GroupSpec<Rank2Ops>) -> PermGroup {
        let gens: Vec<Permutation> = g
            .generators()
            .iter()
            .map(|e| self.ops.cr_image(e).expect("generator of C ⋊ R"))
            .collect();
        let degree = self.ops.identity_cr_degree();
        PermGroup::new(degree, gens).expect("C ⋊ R image")
    }

    /// Orders from the faithful permutation images. `|P1|` is `|A|·|R1|`;
    /// the semidirect product is only formed after the action check in
    /// [`Rank2Instance::assemble_amalgam`].
    pub fn orders(&self) -> Rank2Orders {
        let w = &self.witness;
        let a = self.wreath_group(&self.a).order();
        let c = self.wreath_group(&self.c).order();
        let m = self.wreath_group(&self.m).order();
        let b = self.cr_group(&self.b).order();
        let p2 = self.cr_group(&self.p2).order();
        let exponent = (w.num_cells() * self.ops.m()) as u32;
        Rank2Orders {
            l: w.l().order(),
            r: self.r.order(),
            r1: self.r1.order(),
            cells: w.num_cells(),
            l_lambda: w.l_lambda().order(),
            k_lambda: w.k_lambda().order(),
            s_delta: w.s_delta().order(),
            m,
            a,
            c,
            b,
            p1: a * self.r1.order(),
            p2,
            m_predicted: (w.k_lambda().order() as u128).saturating_pow(exponent),
        }
    }

    /// Spot-checks the action axioms on generators and forms the amalgam
    /// `(P1, P2)` over `B`, with `B` sitting in both by the identity.
    pub fn assemble_amalgam(&self) -> Result<Amalgam<Rank2Ops>> {
        if let Err(c) = self.check_action_on_generators(&self.c, &self.r) {
            return Err(Error::Construction(format!("R does not act on C: {c}")));
        }
        if let Err(c) = self.check_action_on_generators(&self.a, &self.r1) {
            return Err(Error::Construction(format!(
                "the re-indexing is not an action of R_1 on A: {c}"
            )));
        }
        Amalgam::new(
            vec![self.p1.clone(), self.p2.clone()],
            self.b.clone(),
            vec![Embedding::identity(), Embedding::identity()],
        )
    }

    /// `(xy)^r = x^r y^r` and `x^r` in the group, for generator pairs.
    fn check_action_on_generators(
        &self,
        group: &GroupSpec<Rank2Ops>,
        r: &PermGroup,
    ) -> std::result::Result<(), String> {
        let member = |e: &Elem| {
            if group.name() == "C" {
                self.membership_c(e)
            } else {
                self.membership_a(e)
            }
        };
        let ops = &*self.ops;
        for rr in r.generators() {
            for x in group.generators() {
                let xr = ops.act(x, rr);
                if !member(&xr) {
                    return Err(format!("x^r leaves {} for r = {rr}", group.name()));
                }
                for y in group.generators() {
                    if ops.act(&ops.mul(x, y), rr) != ops.mul(&xr, &ops.act(y, rr)) {
                        return Err(format!("(xy)^r != x^r y^r for r = {rr}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn verify(&self, mode: VerifyMode, cap: usize) -> Vec<Verdict> {
        Verifier {
            inst: self,
            mode,
            cap,
        }
        .run()
    }
}

impl Rank2Ops {
    fn identity_cr_degree(&self) -> usize {
        (self.m() + 1) * self.n + self.m() * (self.cells - 1) * self.n
    }
}

struct Verifier<'a> {
    inst: &'a Rank2Instance,
    mode: VerifyMode,
    cap: usize,
}

fn same_set(a: &Elements<Elem>, b: &Elements<Elem>) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

fn expect_eq<T: PartialEq + std::fmt::Display>(label: &str, got: T, want: T) -> Verdict {
    if got == want {
        Verdict::pass(label)
    } else {
        Verdict::fail(label, format!("got {got}, expected {want}"))
    }
}

impl Verifier<'_> {
    fn full(&self) -> bool {
        self.mode == VerifyMode::Full
    }

    fn run(&self) -> Vec<Verdict> {
        let inst = self.inst;
        let o = inst.orders();
        let mut out = vec![
            expect_eq("m_order", o.m as u128, o.m_predicted),
            expect_eq("a_order", o.a, o.l * o.m),
            expect_eq("c_order", o.c, o.l_lambda * o.m),
            expect_eq("b_order", o.b, o.c * o.r1),
            expect_eq("p2_order", o.p2, o.c * o.r),
        ];
        out.push(self.enumeration_agrees(&o));
        out.push(self.a_closed());
        out.push(self.phi_kernel());
        out.push(self.core_c_in_a());
        out.push(self.r_action_on_c());
        out.push(Verdict::from_check(
            "r1_action_on_a",
            inst.check_action_on_generators(&inst.a, &inst.r1),
        ));
        let amalgam = inst.assemble_amalgam();
        match &amalgam {
            Ok(am) => {
                out.push(self.core_b_in_p2());
                out.push(self.core_b_in_p1());
                out.push(self.coset_type("coset_p1_type", &inst.p1, inst.witness.l()));
                out.push(self.coset_type("coset_p2_type", &inst.p2, &inst.r));
                out.push(self.faithful(am));
            }
            Err(e) => {
                for label in [
                    "core_b_in_p2",
                    "core_b_in_p1",
                    "coset_p1_type",
                    "coset_p2_type",
                    "faithful",
                ] {
                    out.push(Verdict::skipped(label, format!("no amalgam: {e}")));
                }
            }
        }
        out
    }

    fn too_big(&self, order: u64) -> bool {
        order > self.cap as u64
    }

    fn enumeration_agrees(&self, o: &Rank2Orders) -> Verdict {
        const L: &str = "enumeration_agrees";
        if !self.full() {
            return Verdict::skipped(L, "fast mode");
        }
        let inst = self.inst;
        let mut checks = vec![(&inst.a, o.a), (&inst.c, o.c), (&inst.m, o.m), (&inst.b, o.b), (&inst.p2, o.p2)];
        if o.r1 == 1 {
            checks.push((&inst.p1, o.p1));
        }
        for (g, want) in checks {
            if self.too_big(want) {
                return Verdict::skipped(L, format!("|{}| = {want} exceeds the cap", g.name()));
            }
            match g.order(self.cap) {
                Ok(n) if n as u64 == want => {}
                Ok(n) => {
                    return Verdict::fail(L, format!("|{}|: enumerated {n}, image {want}", g.name()))
                }
                Err(e) => return Verdict::skipped(L, e.to_string()),
            }
        }
        Verdict::pass(L)
    }

    fn a_closed(&self) -> Verdict {
        const L: &str = "a_closed";
        let inst = self.inst;
        let ops = &*inst.ops;
        let gens = inst.a.generators();
        if !self.full() || self.too_big(inst.orders().a) {
            for x in gens {
                for y in gens {
                    if !inst.membership_a(&ops.mul(x, y)) {
                        return Verdict::fail(L, "product of generators outside A");
                    }
                }
            }
            return Verdict::pass(L);
        }
        let els = match inst.a.enumerate(self.cap) {
            Ok(e) => e,
            Err(e) => return Verdict::skipped(L, e.to_string()),
        };
        if let Some(x) = els.iter().find(|x| !inst.membership_a(x)) {
            return Verdict::fail(L, format!("{:?} fails the membership test", ops.tuple_view(x)));
        }
        let right: Vec<&Elem> = if els.len() <= 256 {
            els.iter().collect()
        } else {
            gens.iter().collect()
        };
        for x in els {
            for y in &right {
                if !inst.membership_a(&ops.mul(x, y)) {
                    return Verdict::fail(L, "product outside A");
                }
            }
        }
        Verdict::pass(L)
    }

    fn phi_kernel(&self) -> Verdict {
        const L: &str = "phi_surjective_kernel_m";
        let inst = self.inst;
        let l = inst.witness.l();
        for g in l.generators() {
            if inst.phi(&inst.lift_f_g(g)) != *g {
                return Verdict::fail(L, format!("φ(lift({g})) != {g}"));
            }
        }
        if !self.full() {
            return Verdict::pass(L);
        }
        let (a, m) = match (inst.a.enumerate(self.cap), inst.m.enumerate(self.cap)) {
            (Ok(a), Ok(m)) => (a, m),
            (Err(e), _) | (_, Err(e)) => return Verdict::skipped(L, e.to_string()),
        };
        let image: HashSet<Permutation> = a.iter().map(|x| inst.phi(x)).collect();
        if image.len() as u64 != l.order() || !image.iter().all(|g| l.contains(g)) {
            return Verdict::fail(L, format!("image of φ has {} elements", image.len()));
        }
        let kernel: Elements<Elem> = a.iter().filter(|x| inst.phi(x).is_identity()).cloned().collect();
        if !same_set(&kernel, m) {
            return Verdict::fail(L, format!("kernel has {} elements, |M| = {}", kernel.len(), m.len()));
        }
        Verdict::pass(L)
    }

    fn core_c_in_a(&self) -> Verdict {
        const L: &str = "core_c_in_a";
        if !self.full() {
            return Verdict::skipped(L, "fast mode");
        }
        let inst = self.inst;
        let run = || -> Result<bool> {
            let c = inst.c.enumerate(self.cap)?;
            let core = core_in(&inst.a, &Embedding::identity(), c)?;
            Ok(same_set(&core, inst.m.enumerate(self.cap)?))
        };
        match run() {
            Ok(true) => Verdict::pass(L),
            Ok(false) => Verdict::fail(L, "core of C in A differs from M"),
            Err(e) => Verdict::skipped(L, e.to_string()),
        }
    }

    fn r_action_on_c(&self) -> Verdict {
        const L: &str = "r_action_on_c";
        let inst = self.inst;
        let ops = &*inst.ops;
        if !self.full() {
            return Verdict::from_check(L, inst.check_action_on_generators(&inst.c, &inst.r));
        }
        let c = match inst.c.enumerate(self.cap) {
            Ok(c) => c,
            Err(e) => return Verdict::skipped(L, e.to_string()),
        };
        let rs = inst.r.elements();
        let work = (c.len() as u128).pow(2) * rs.len() as u128;
        let right: Vec<&Elem> = if work <= 1 << 24 {
            c.iter().collect()
        } else {
            inst.c.generators().iter().collect()
        };
        let mut cache: HashMap<(usize, usize), Elem> = HashMap::new();
        for (ri, r) in rs.iter().enumerate() {
            for (ci, x) in c.iter().enumerate() {
                let xr = ops.act(x, r);
                if !c.contains(&xr) {
                    return Verdict::fail(L, format!("c^r leaves C for r = {r}"));
                }
                cache.insert((ci, ri), xr);
            }
        }
        for (ri, r) in rs.iter().enumerate() {
            for (ci, x) in c.iter().enumerate() {
                let xr = &cache[&(ci, ri)];
                for y in &right {
                    let yi = c.get_index_of(*y).unwrap();
                    let lhs = ops.act(&ops.mul(x, y), r);
                    let rhs = ops.mul(xr, &cache[&(yi, ri)]);
                    if lhs != rhs {
                        return Verdict::fail(L, format!("(cd)^r != c^r d^r for r = {r}"));
                    }
                }
                for r2 in rs.iter().step_by(1.max(rs.len() / 8)) {
                    if ops.act(xr, r2) != ops.act(x, &(r * r2)) {
                        return Verdict::fail(L, format!("c^(rr') != (c^r)^r' for r = {r}, r' = {r2}"));
                    }
                }
            }
        }
        Verdict::pass(L)
    }

    fn core_b_in_p2(&self) -> Verdict {
        const L: &str = "core_b_in_p2";
        if !self.full() {
            return Verdict::skipped(L, "fast mode");
        }
        let inst = self.inst;
        let run = || -> Result<bool> {
            let b = inst.b.enumerate(self.cap)?;
            let core = core_in(&inst.p2, &Embedding::identity(), b)?;
            Ok(same_set(&core, inst.c.enumerate(self.cap)?))
        };
        match run() {
            Ok(true) => Verdict::pass(L),
            Ok(false) => Verdict::fail(L, "core of B in P2 differs from C"),
            Err(e) => Verdict::skipped(L, e.to_string()),
        }
    }

    fn core_b_in_p1(&self) -> Verdict {
        const L: &str = "core_b_in_p1";
        if !self.full() {
            return Verdict::skipped(L, "fast mode");
        }
        let inst = self.inst;
        let ops = &*inst.ops;
        let run = || -> Result<bool> {
            let b = inst.b.enumerate(self.cap)?;
            let core = core_in(&inst.p1, &Embedding::identity(), b)?;
            let r1_gens = &inst.b.generators()[inst.c.generators().len()..];
            let gens = [inst.m.generators(), r1_gens].concat();
            let m_r1 = enumerate(ops, &gens, self.cap)?;
            Ok(same_set(&core, &m_r1))
        };
        match run() {
            Ok(true) => Verdict::pass(L),
            Ok(false) => Verdict::fail(L, "core of B in P1 differs from M ⋊ R1"),
            Err(e) => Verdict::skipped(L, e.to_string()),
        }
    }

    fn coset_type(&self, label: &str, p: &GroupSpec<Rank2Ops>, expected: &PermGroup) -> Verdict {
        let inst = self.inst;
        let act = match coset_action(p, &Embedding::identity(), &inst.b, self.cap) {
            Ok(a) => a,
            Err(e) => return Verdict::skipped(label, e.to_string()),
        };
        if act.index() != expected.degree() {
            return Verdict::fail(
                label,
                format!("{} cosets, expected {}", act.index(), expected.degree()),
            );
        }
        match perm_isomorphic(act.image(), expected) {
            Ok(Some(_)) => Verdict::pass(label),
            Ok(None) => Verdict::fail(
                label,
                format!("coset image of order {} not permutation isomorphic", act.image().order()),
            ),
            Err(e) => Verdict::skipped(label, e.to_string()),
        }
    }

    fn faithful(&self, am: &Amalgam<Rank2Ops>) -> Verdict {
        const L: &str = "faithful";
        if !self.full() {
            return Verdict::skipped(L, "fast mode");
        }
        match largest_common_normal(am, self.cap) {
            Ok(n) if n.len() == 1 => Verdict::pass(L),
            Ok(n) => {
                let id = self.inst.ops.identity();
                let x = n.iter().find(|x| **x != id).expect("nontrivial");
                Verdict::fail(
                    L,
                    format!(
                        "normal subgroup of order {} inside B, e.g. {:?}",
                        n.len(),
                        self.inst.ops.tuple_view(x)
                    ),
                )
            }
            Err(e) => Verdict::skipped(L, e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests;
