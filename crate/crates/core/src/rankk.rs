//! The rank-k amalgam (k ≥ 3) over a non-regular `L1`.
//!
//! `L2` and `L3` are made to act together on `Ω = Δ × Λ × Z_ℓ` by
//! [`InterleavedAction`]; the Borel subgroup contains `U = V^Ω` with
//! `V = (L1)_0`, so its order grows like `|V|^{ℓ·m2·m3}`.
//!
//! Every member group uses one element layout:
//!
//! ```text
//! [ l1 : m1 | u(ω) for ω ∈ Ω : each m1 | l2 : m2 | l3 : m3 | l4 .. lk ]
//! ```
//!
//! with product `(l1 l1', u · u'^{x⁻¹}, l2 l2', l3 l3', t t')`, where
//! `x = ρ_H(l2) ρ_K(l3)` and `u^y(ω) = u(ω^{y⁻¹})`. Factors absent from a
//! member are stored as identities.

use std::sync::Arc;

use serde::Serialize;

use crate::abstract_group::{
    check_embedding, core_in, coset_action, enumerate, largest_common_normal, Amalgam, Elements,
    Embedding, GroupOps, GroupSpec,
};
use crate::error::{Error, Result};
use crate::perm::{perm_isomorphic, PermGroup, Permutation};
use crate::verdict::{Verdict, VerifyMode};

pub type Elem = Vec<u8>;

/// Name of the result refused when every local group is regular.
pub const RANKK_THEOREM: &str = "rank-k Borel unboundedness";

/// Faithful actions `ρ_H`, `ρ_K` of `H ≤ Sym(Δ)` and `K ≤ Sym(Λ)` on
/// `Ω = Δ × Λ × Z_ℓ`, numbered `(d, λ, i) ↦ (d·|Λ| + λ)·ℓ + i`.
///
/// `ρ_H` moves the first coordinate; `ρ_K(k) = g⁻¹ ρ'_K(k) g` where `ρ'_K`
/// moves the second and `g` advances `(δ0, λ0, i)` to `(δ0, λ0, i+1)`.
#[derive(Clone, Debug)]
pub struct InterleavedAction {
    h: PermGroup,
    k: PermGroup,
    delta0: usize,
    lambda0: usize,
    ell: usize,
    g: Permutation,
}

pub fn interleave(
    h: &PermGroup,
    k: &PermGroup,
    delta0: usize,
    lambda0: usize,
    ell: usize,
) -> Result<InterleavedAction> {
    if h.degree() < 2 || k.degree() < 2 {
        return Err(Error::InvalidParameter(
            "both factors need degree at least 2".into(),
        ));
    }
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    if !h.is_transitive() || !k.is_transitive() {
        return Err(Error::Intransitive);
    }
    if delta0 >= h.degree() || lambda0 >= k.degree() {
        return Err(Error::InvalidParameter("base point out of range".into()));
    }
    let mut ia = InterleavedAction {
        h: h.clone(),
        k: k.clone(),
        delta0,
        lambda0,
        ell,
        g: Permutation::identity(1),
    };
    let images = (0..ia.size())
        .map(|w| {
            let (d, l, i) = ia.triple(w);
            if d == delta0 && l == lambda0 {
                ia.index(d, l, (i + 1) % ell)
            } else {
                w
            }
        })
        .collect();
    ia.g = Permutation::from_images(images)?;
    if let Some(bad) = ia.verify().into_iter().find(Verdict::is_fail) {
        return Err(Error::Construction(format!("{}: {:?}", bad.label, bad.outcome)));
    }
    Ok(ia)
}

impl InterleavedAction {
    pub fn size(&self) -> usize {
        self.h.degree() * self.k.degree() * self.ell
    }

    pub fn index(&self, d: usize, l: usize, i: usize) -> usize {
        (d * self.k.degree() + l) * self.ell + i
    }

    pub fn triple(&self, w: usize) -> (usize, usize, usize) {
        let i = w % self.ell;
        let rest = w / self.ell;
        (rest / self.k.degree(), rest % self.k.degree(), i)
    }

    /// The base point `ω = (δ0, λ0, 0)`.
    pub fn omega0(&self) -> usize {
        self.index(self.delta0, self.lambda0, 0)
    }

    pub fn g(&self) -> &Permutation {
        &self.g
    }

    pub fn rho_h(&self, x: &Permutation) -> Permutation {
        let images = (0..self.size())
            .map(|w| {
                let (d, l, i) = self.triple(w);
                self.index(x.apply(d), l, i)
            })
            .collect();
        Permutation::from_images(images).expect("ρ_H image")
    }

    pub fn rho_k_prime(&self, x: &Permutation) -> Permutation {
        let images = (0..self.size())
            .map(|w| {
                let (d, l, i) = self.triple(w);
                self.index(d, x.apply(l), i)
            })
            .collect();
        Permutation::from_images(images).expect("ρ'_K image")
    }

    pub fn rho_k(&self, x: &Permutation) -> Permutation {
        self.rho_k_prime(x).conjugate_by(&self.g)
    }

    fn image(&self, gens: impl Iterator<Item = Permutation>) -> PermGroup {
        PermGroup::new(self.size(), gens.collect()).expect("degree |Ω|")
    }

    pub fn rho_h_group(&self) -> PermGroup {
        self.image(self.h.generators().iter().map(|x| self.rho_h(x)))
    }

    pub fn rho_k_group(&self) -> PermGroup {
        self.image(self.k.generators().iter().map(|x| self.rho_k(x)))
    }

    /// Checks the three defining properties plus faithfulness, exhaustively
    /// over group elements.
    pub fn verify(&self) -> Vec<Verdict> {
        let w = self.omega0();
        let rh = self.rho_h_group();
        let rk = self.rho_k_group();
        let rh_w = rh.stabilizer(w);
        let rk_w = rk.stabilizer(w);
        let mut out = Vec::new();

        let faithful = rh.order() == self.h.order() && rk.order() == self.k.order();
        out.push(if faithful {
            Verdict::pass("interleave_faithful")
        } else {
            Verdict::fail("interleave_faithful", format!("|ρ_H(H)| = {}, |ρ_K(K)| = {}", rh.order(), rk.order()))
        });

        let hd = self.image(self.h.stabilizer(self.delta0).generators().iter().map(|x| self.rho_h(x)));
        let kl = self.image(self.k.stabilizer(self.lambda0).generators().iter().map(|x| self.rho_k(x)));
        out.push(if !rh_w.same_group(&hd) {
            Verdict::fail("interleave_stabilizers", "ρ_H(H)_ω != ρ_H(H_δ0)")
        } else if !rk_w.same_group(&kl) {
            Verdict::fail("interleave_stabilizers", "ρ_K(K)_ω != ρ_K(K_λ0)")
        } else {
            Verdict::pass("interleave_stabilizers")
        });

        out.push(Verdict::from_check(
            "interleave_direct_products",
            direct_product(&rh, &rk_w).and_then(|_| direct_product(&rh_w, &rk)),
        ));

        let full = self.image(rh.generators().iter().chain(rk.generators()).cloned());
        out.push(if full.is_transitive() {
            Verdict::pass("interleave_transitive")
        } else {
            Verdict::fail("interleave_transitive", format!("orbit of ω has {} points", full.orbit(w).len()))
        });
        out
    }
}

/// `⟨X, Y⟩ = X × Y`: elementwise commuting with trivial intersection.
fn direct_product(x: &PermGroup, y: &PermGroup) -> std::result::Result<(), String> {
    let xs = x.elements();
    let ys = y.elements();
    for a in &xs {
        for b in &ys {
            if a * b != b * a {
                return Err(format!("{a} and {b} do not commute"));
            }
        }
    }
    if let Some(a) = xs.iter().find(|a| !a.is_identity() && y.contains(a)) {
        return Err(format!("{a} lies in both factors"));
    }
    Ok(())
}

/// Group law of the universal tuple layout.
#[derive(Clone, Debug)]
pub struct RankKOps {
    degrees: Vec<usize>,
    inter: InterleavedAction,
    g: Vec<usize>,
    g_inv: Vec<usize>,
}

impl RankKOps {
    fn m1(&self) -> usize {
        self.degrees[0]
    }

    fn omega(&self) -> usize {
        self.inter.size()
    }

    fn u_off(&self, w: usize) -> usize {
        self.m1() * (1 + w)
    }

    /// Offset of the `L_i` slot, `i` counted from 0; `i = 0` is `L1`.
    fn slot_off(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.m1() * (1 + self.omega()) + self.degrees[1..i].iter().sum::<usize>()
        }
    }

    fn len(&self) -> usize {
        self.slot_off(self.degrees.len())
    }

    fn slot<'a>(&self, e: &'a [u8], i: usize) -> &'a [u8] {
        let o = self.slot_off(i);
        &e[o..o + self.degrees[i]]
    }

    fn u_at<'a>(&self, e: &'a [u8], w: usize) -> &'a [u8] {
        let o = self.u_off(w);
        &e[o..o + self.m1()]
    }

    /// `x = ρ_H(l2) ρ_K(l3)` on `Ω`, with `ρ_K(k) = g⁻¹ ρ'_K(k) g`.
    fn x_of(&self, e: &[u8]) -> Vec<usize> {
        let l2 = self.slot(e, 1);
        let l3 = self.slot(e, 2);
        let ia = &self.inter;
        (0..self.omega())
            .map(|w| {
                let (d, l, i) = ia.triple(w);
                let w1 = ia.index(l2[d] as usize, l, i);
                let (d, l, i) = ia.triple(self.g_inv[w1]);
                self.g[ia.index(d, l3[l] as usize, i)]
            })
            .collect()
    }

    /// Builds an element from its parts; `u[w]` is `u(ω_w)`.
    pub fn element(&self, l1: &Permutation, u: &[Permutation], rest: &[Permutation]) -> Elem {
        let mut e = Vec::with_capacity(self.len());
        e.extend(l1.images().iter().map(|&x| x as u8));
        for v in u {
            e.extend(v.images().iter().map(|&x| x as u8));
        }
        for r in rest {
            e.extend(r.images().iter().map(|&x| x as u8));
        }
        debug_assert_eq!(e.len(), self.len());
        e
    }

    pub fn part(&self, e: &[u8], i: usize) -> Permutation {
        Permutation::from_images(self.slot(e, i).iter().map(|&x| x as usize).collect())
            .expect("stored permutation")
    }

    pub fn u_value(&self, e: &[u8], w: usize) -> Permutation {
        Permutation::from_images(self.u_at(e, w).iter().map(|&x| x as usize).collect())
            .expect("stored permutation")
    }

    fn rep_degree(&self) -> usize {
        self.m1() * (1 + self.omega()) + self.degrees[1..].iter().sum::<usize>()
    }
}

fn compose_into(out: &mut [u8], a: &[u8], b: &[u8]) {
    for (p, o) in out.iter_mut().enumerate() {
        *o = b[a[p] as usize];
    }
}

impl GroupOps for RankKOps {
    type Elem = Elem;

    fn identity(&self) -> Elem {
        let mut e = Vec::with_capacity(self.len());
        for _ in 0..=self.omega() {
            e.extend((0..self.m1()).map(|p| p as u8));
        }
        for &d in &self.degrees[1..] {
            e.extend((0..d).map(|p| p as u8));
        }
        e
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = vec![0u8; self.len()];
        let x = self.x_of(a);
        let m1 = self.m1();
        compose_into(&mut out[..m1], self.slot(a, 0), self.slot(b, 0));
        for w in 0..self.omega() {
            let o = self.u_off(w);
            compose_into(&mut out[o..o + m1], self.u_at(a, w), self.u_at(b, x[w]));
        }
        for i in 1..self.degrees.len() {
            let o = self.slot_off(i);
            compose_into(&mut out[o..o + self.degrees[i]], self.slot(a, i), self.slot(b, i));
        }
        out
    }

    fn inv(&self, a: &Elem) -> Elem {
        let mut out = vec![0u8; self.len()];
        let x = self.x_of(a);
        let invert = |out: &mut [u8], src: &[u8]| {
            for (p, &q) in src.iter().enumerate() {
                out[q as usize] = p as u8;
            }
        };
        let m1 = self.m1();
        invert(&mut out[..m1], self.slot(a, 0));
        // (u⁻¹)^x at ω^x is u(ω)⁻¹
        for w in 0..self.omega() {
            let o = self.u_off(x[w]);
            invert(&mut out[o..o + m1], self.u_at(a, w));
        }
        for i in 1..self.degrees.len() {
            let o = self.slot_off(i);
            invert(&mut out[o..o + self.degrees[i]], self.slot(a, i));
        }
        out
    }

    fn encode(&self, a: &Elem) -> Vec<u8> {
        a.clone()
    }

    /// `l1` on its own points, `(ω, p) ↦ (ω^x, p^{u(ω)})` on `Ω × {0..m1-1}`,
    /// then `l2, l3, ..` on their own points.
    fn permutation_image(&self, a: &Elem) -> Option<Permutation> {
        let m1 = self.m1();
        let x = self.x_of(a);
        let mut images: Vec<usize> = self.slot(a, 0).iter().map(|&q| q as usize).collect();
        images.resize(m1 * (1 + self.omega()), 0);
        for w in 0..self.omega() {
            let u = self.u_at(a, w);
            for p in 0..m1 {
                images[m1 * (1 + w) + p] = m1 * (1 + x[w]) + u[p] as usize;
            }
        }
        let mut base = m1 * (1 + self.omega());
        for i in 1..self.degrees.len() {
            images.extend(self.slot(a, i).iter().map(|&q| base + q as usize));
            base += self.degrees[i];
        }
        debug_assert_eq!(images.len(), self.rep_degree());
        Permutation::from_images(images).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankKOrders {
    pub degrees: Vec<usize>,
    pub locals: Vec<u64>,
    pub omega: usize,
    pub v: u64,
    pub u: u64,
    pub u_prime: u64,
    pub b: u64,
    pub p: Vec<u64>,
    /// `|V|^{ℓ·m2·m3}`.
    pub borel_bound: u128,
}

#[derive(Clone)]
pub struct RankKInstance {
    locals: Vec<PermGroup>,
    input_order: Vec<usize>,
    ell: usize,
    v: PermGroup,
    ops: Arc<RankKOps>,
    u: GroupSpec<RankKOps>,
    u_prime: GroupSpec<RankKOps>,
    groups: Vec<GroupSpec<RankKOps>>,
    b: GroupSpec<RankKOps>,
    embeddings: Vec<Embedding<Elem>>,
}

impl std::fmt::Debug for RankKInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankKInstance")
            .field("input_order", &self.input_order)
            .field("ell", &self.ell)
            .finish_non_exhaustive()
    }
}

/// Builds the amalgam from `L1..Lk` in input order. The first non-regular
/// group becomes `L1`; the others keep their relative order.
pub fn build_rankk(locals: &[PermGroup], ell: usize) -> Result<RankKInstance> {
    if locals.len() < 3 {
        return Err(Error::InvalidParameter("rank-k construction needs k >= 3".into()));
    }
    for (i, l) in locals.iter().enumerate() {
        if l.degree() < 2 || !l.is_transitive() {
            return Err(Error::InvalidParameter(format!(
                "local group {} must be nontrivial and transitive",
                i + 1
            )));
        }
        if l.degree() > 256 {
            return Err(Error::InvalidParameter("degrees above 256 are not supported".into()));
        }
    }
    let first = locals.iter().position(|l| !l.is_regular()).ok_or_else(|| {
        Error::hypothesis(
            "all local groups are regular, which forces a trivial Borel subgroup",
            RANKK_THEOREM,
        )
    })?;
    let mut input_order = vec![first];
    input_order.extend((0..locals.len()).filter(|&i| i != first));
    let locals: Vec<PermGroup> = input_order.iter().map(|&i| locals[i].clone()).collect();
    let inter = interleave(&locals[1], &locals[2], 0, 0, ell)?;
    let v = locals[0].stabilizer(0);
    let degrees: Vec<usize> = locals.iter().map(|l| l.degree()).collect();
    let omega = inter.size();
    let g = inter.g().images().to_vec();
    let g_inv = inter.g().inverse().images().to_vec();
    let ops = Arc::new(RankKOps {
        degrees: degrees.clone(),
        inter: inter.clone(),
        g,
        g_inv,
    });
    let k = locals.len();
    let ids: Vec<Permutation> = degrees.iter().map(|&d| Permutation::identity(d)).collect();
    let id_u = vec![ids[0].clone(); omega];
    // element with slot i set to x and everything else trivial
    let in_slot = |i: usize, x: &Permutation| {
        let mut rest = ids[1..].to_vec();
        if i == 0 {
            ops.element(x, &id_u, &rest)
        } else {
            rest[i - 1] = x.clone();
            ops.element(&ids[0], &id_u, &rest)
        }
    };
    let u_at = |w: usize, x: &Permutation| {
        let mut u = id_u.clone();
        u[w] = x.clone();
        ops.element(&ids[0], &u, &ids[1..])
    };
    let w0 = inter.omega0();
    let u_gens: Vec<Elem> = (0..omega)
        .flat_map(|w| v.generators().iter().map(move |x| (w, x)))
        .map(|(w, x)| u_at(w, x))
        .collect();
    let u_prime_gens: Vec<Elem> = (0..omega)
        .filter(|&w| w != w0)
        .flat_map(|w| v.generators().iter().map(move |x| (w, x)))
        .map(|(w, x)| u_at(w, x))
        .collect();
    let full_gens = |i: usize| -> Vec<Elem> {
        locals[i].generators().iter().map(|x| in_slot(i, x)).collect()
    };
    let stab_gens = |i: usize| -> Vec<Elem> {
        locals[i]
            .stabilizer(0)
            .generators()
            .iter()
            .map(|x| in_slot(i, x))
            .collect()
    };
    // factors 1..k-1: full for `j`, point stabilizer otherwise
    let top_gens = |j: Option<usize>| -> Vec<Elem> {
        (1..k)
            .flat_map(|i| if Some(i) == j { full_gens(i) } else { stab_gens(i) })
            .collect()
    };
    let spec = |name: String, gens: Vec<Elem>| GroupSpec::new(name, ops.clone(), gens);
    let mut groups = vec![spec(
        "P1".into(),
        [full_gens(0), u_prime_gens.clone(), top_gens(None)].concat(),
    )];
    for i in 1..k {
        groups.push(spec(
            format!("P{}", i + 1),
            [u_gens.clone(), top_gens(Some(i))].concat(),
        ));
    }
    let b = spec("B".into(), [u_gens.clone(), top_gens(None)].concat());
    let m1 = degrees[0];
    let iota1 = Embedding::new("iota_1", move |e: &Elem| {
        // u(ω0) moves into the L1 slot; B has trivial L1 part
        let mut out = e.clone();
        let o = m1 * (1 + w0);
        out[..m1].copy_from_slice(&e[o..o + m1]);
        for (p, x) in out[o..o + m1].iter_mut().enumerate() {
            *x = p as u8;
        }
        out
    });
    let mut embeddings = vec![iota1];
    embeddings.extend((1..k).map(|_| Embedding::identity()));
    Ok(RankKInstance {
        locals,
        input_order,
        ell,
        v,
        u: spec("U".into(), u_gens),
        u_prime: spec("U'".into(), u_prime_gens),
        groups,
        b,
        embeddings,
        ops,
    })
}

impl RankKInstance {
    /// Local groups after reordering, `L1` first.
    pub fn locals(&self) -> &[PermGroup] {
        &self.locals
    }

    /// `input_order[i]` is the input position of `L_{i+1}`.
    pub fn input_order(&self) -> &[usize] {
        &self.input_order
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn v(&self) -> &PermGroup {
        &self.v
    }

    pub fn ops(&self) -> &Arc<RankKOps> {
        &self.ops
    }

    pub fn interleaved(&self) -> &InterleavedAction {
        &self.ops.inter
    }

    pub fn u(&self) -> &GroupSpec<RankKOps> {
        &self.u
    }

    pub fn u_prime(&self) -> &GroupSpec<RankKOps> {
        &self.u_prime
    }

    pub fn groups(&self) -> &[GroupSpec<RankKOps>] {
        &self.groups
    }

    pub fn b(&self) -> &GroupSpec<RankKOps> {
        &self.b
    }

    pub fn embeddings(&self) -> &[Embedding<Elem>] {
        &self.embeddings
    }

    pub fn amalgam(&self) -> Amalgam<RankKOps> {
        Amalgam::new(self.groups.clone(), self.b.clone(), self.embeddings.clone())
            .expect("rank at least 3")
    }

    pub fn orders(&self) -> RankKOrders {
        let ord = |g: &GroupSpec<RankKOps>| g.order_via_representation().expect("faithful image");
        let v = self.v.order();
        let exp = (self.ell * self.locals[1].degree() * self.locals[2].degree()) as u32;
        RankKOrders {
            degrees: self.locals.iter().map(|l| l.degree()).collect(),
            locals: self.locals.iter().map(|l| l.order()).collect(),
            omega: self.ops.omega(),
            v,
            u: ord(&self.u),
            u_prime: ord(&self.u_prime),
            b: ord(&self.b),
            p: self.groups.iter().map(ord).collect(),
            borel_bound: (v as u128).saturating_pow(exp),
        }
    }

    /// Core of `B` in each `P_i`, as subsets of `B`.
    pub fn compute_cores(&self, cap: usize) -> Result<Vec<Elements<Elem>>> {
        let b = self.b.enumerate(cap)?;
        self.groups
            .iter()
            .zip(&self.embeddings)
            .map(|(p, e)| core_in(p, e, b))
            .collect()
    }

    pub fn verify(&self, mode: VerifyMode, cap: usize) -> Vec<Verdict> {
        let full = mode == VerifyMode::Full;
        let mut out = self.ops.inter.verify();
        let o = self.orders();
        let expect = |label: &str, got: u128, want: u128| {
            if got == want {
                Verdict::pass(label)
            } else {
                Verdict::fail(label, format!("got {got}, expected {want}"))
            }
        };
        out.push(expect("u_order", o.u as u128, (o.v as u128).pow(o.omega as u32)));
        let stabs: u128 = self.locals[1..].iter().map(|l| l.stabilizer(0).order() as u128).product();
        out.push(expect("b_order", o.b as u128, o.u as u128 * stabs));
        let bad_index = o
            .p
            .iter()
            .zip(&o.degrees)
            .position(|(&p, &d)| p as u128 != o.b as u128 * d as u128);
        out.push(match bad_index {
            None => Verdict::pass("p_orders"),
            Some(i) => Verdict::fail("p_orders", format!("|P{}| = {}", i + 1, o.p[i])),
        });
        out.push(if o.b as u128 >= o.borel_bound {
            Verdict::pass("borel_bound")
        } else {
            Verdict::fail("borel_bound", format!("|B| = {} < {}", o.b, o.borel_bound))
        });
        out.push(self.check_embeddings(full, cap));
        for (i, (p, l)) in self.groups.iter().zip(&self.locals).enumerate() {
            out.push(self.coset_type(i, p, l, cap));
        }
        if !full {
            out.push(Verdict::skipped("cores_intersection", "fast mode"));
            out.push(Verdict::skipped("faithful", "fast mode"));
            return out;
        }
        out.push(self.cores_intersection(&o, cap));
        let am = self.amalgam();
        out.push(match largest_common_normal(&am, cap) {
            Ok(n) if n.len() == 1 => Verdict::pass("faithful"),
            Ok(n) => Verdict::fail("faithful", format!("normal subgroup of order {} inside B", n.len())),
            Err(e) => Verdict::skipped("faithful", e.to_string()),
        });
        out
    }

    fn check_embeddings(&self, full: bool, cap: usize) -> Verdict {
        const L: &str = "embeddings";
        let small = full && self.b.order_via_representation().is_some_and(|n| n <= 4096);
        for (i, (p, e)) in self.groups.iter().zip(&self.embeddings).enumerate() {
            if let Err(err) = check_embedding(e, &self.b, small, cap) {
                return Verdict::fail(L, format!("P{}: {err}", i + 1));
            }
            let image = p.permutation_group().expect("faithful image");
            for x in self.b.generators() {
                let y = self.ops.permutation_image(&e.apply(x)).expect("faithful image");
                if !image.contains(&y) {
                    return Verdict::fail(L, format!("image of B is not inside P{}", i + 1));
                }
            }
        }
        Verdict::pass(L)
    }

    fn coset_type(&self, i: usize, p: &GroupSpec<RankKOps>, l: &PermGroup, cap: usize) -> Verdict {
        let label = format!("coset_p{}_type", i + 1);
        let act = match coset_action(p, &self.embeddings[i], &self.b, cap) {
            Ok(a) => a,
            Err(e) => return Verdict::skipped(&label, e.to_string()),
        };
        if act.index() != l.degree() {
            return Verdict::fail(&label, format!("{} cosets, expected {}", act.index(), l.degree()));
        }
        match perm_isomorphic(act.image(), l) {
            Ok(Some(_)) => Verdict::pass(&label),
            Ok(None) => Verdict::fail(&label, "coset image not permutation isomorphic"),
            Err(e) => Verdict::skipped(&label, e.to_string()),
        }
    }

    fn cores_intersection(&self, o: &RankKOrders, cap: usize) -> Verdict {
        const L: &str = "cores_intersection";
        let run = || -> Result<std::result::Result<(), String>> {
            let cores = self.compute_cores(cap)?;
            for (i, core) in cores.iter().enumerate() {
                // the kernel of the coset action has index |image| in P_i
                let act = coset_action(&self.groups[i], &self.embeddings[i], &self.b, cap)?;
                if core.len() as u64 * act.image().order() != o.p[i] {
                    return Ok(Err(format!("|K{}| = {} does not match the coset image", i + 1, core.len())));
                }
            }
            let mut meet = cores[0].clone();
            for c in &cores[1..] {
                meet.retain(|x| c.contains(x));
            }
            let u_prime = enumerate(&*self.ops, self.u_prime.generators(), cap)?;
            if meet.len() != u_prime.len() || !meet.iter().all(|x| u_prime.contains(x)) {
                return Ok(Err(format!("intersection has order {}, |U'| = {}", meet.len(), u_prime.len())));
            }
            Ok(Ok(()))
        };
        match run() {
            Ok(r) => Verdict::from_check(L, r),
            Err(e) => Verdict::skipped(L, e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests;
