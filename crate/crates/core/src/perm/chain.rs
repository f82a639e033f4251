//! Deterministic Schreier–Sims: base and strong generating set with explicit
//! transversals at every level.

use super::permutation::Permutation;

#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    /// Strong generators fixing every earlier base point.
    gens: Vec<Permutation>,
    /// `transversal[x] = Some(u)` with `point^u = x`, for `x` in the basic orbit.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut level = Level {
            point,
            gens: Vec::new(),
            transversal: Vec::new(),
            orbit: Vec::new(),
        };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.point] = Some(Permutation::identity(degree));
        self.orbit = vec![self.point];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for g in &self.gens {
                let y = g.apply(x);
                if self.transversal[y].is_none() {
                    let u = self.transversal[x].as_ref().unwrap() * g;
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

impl StabChain {
    /// Builds a chain whose base starts with `prefix` (kept even where redundant).
    pub(crate) fn build(degree: usize, generators: &[Permutation], prefix: &[usize]) -> Self {
        let gens: Vec<Permutation> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        let mut base: Vec<usize> = prefix.to_vec();
        for g in &gens {
            if base.iter().all(|&b| g.fixes(b)) {
                let moved = (0..degree).find(|&x| !g.fixes(x)).unwrap();
                base.push(moved);
            }
        }
        let mut levels: Vec<Level> = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            let mut level = Level {
                point: b,
                gens: gens
                    .iter()
                    .filter(|g| base[..i].iter().all(|&p| g.fixes(p)))
                    .cloned()
                    .collect(),
                transversal: Vec::new(),
                orbit: Vec::new(),
            };
            level.rebuild(degree);
            levels.push(level);
        }
        let mut chain = StabChain { degree, levels };
        chain.complete();
        chain
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let iu = i as usize;
            let orbit = self.levels[iu].orbit.clone();
            let gens = self.levels[iu].gens.clone();
            for &x in &orbit {
                for s in &gens {
                    let level = &self.levels[iu];
                    let ux = level.transversal[x].as_ref().unwrap();
                    let uy = level.transversal[s.apply(x)].as_ref().unwrap();
                    let h = &(ux * s) * &uy.inverse();
                    if h.is_identity() {
                        continue;
                    }
                    let (residue, j) = self.strip(&h, iu + 1);
                    if residue.is_identity() {
                        continue;
                    }
                    if j == self.levels.len() {
                        let moved = (0..self.degree).find(|&p| !residue.fixes(p)).unwrap();
                        self.levels.push(Level::new(moved, self.degree));
                    }
                    for l in iu + 1..=j {
                        self.levels[l].gens.push(residue.clone());
                        self.levels[l].rebuild(self.degree);
                    }
                    i = j as isize;
                    continue 'outer;
                }
            }
            i -= 1;
        }
    }

    /// Sifts `g` through the levels from `start`; returns the residue and the
    /// level at which sifting stopped (`levels.len()` if it went through).
    fn strip(&self, g: &Permutation, start: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (k, level) in self.levels[start..].iter().enumerate() {
            let b = h.apply(level.point);
            match &level.transversal[b] {
                None => return (h, start + k),
                Some(u) => h = &h * &u.inverse(),
            }
        }
        (h, self.levels.len())
    }

    pub(crate) fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip(g, 0).0.is_identity()
    }

    pub(crate) fn order(&self) -> u64 {
        self.levels.iter().fold(1u64, |acc, l| {
            acc.checked_mul(l.orbit.len() as u64)
                .expect("group order overflows u64")
        })
    }

    pub(crate) fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Generators of the stabilizer of the first `depth` base points.
    pub(crate) fn stabilizer_generators(&self, depth: usize) -> Vec<Permutation> {
        self.levels
            .get(depth)
            .map(|l| l.gens.clone())
            .unwrap_or_default()
    }

    pub(crate) fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Every element, as the products `u_{k-1} ⋯ u_1 u_0` of transversal entries.
    pub(crate) fn elements(&self) -> Vec<Permutation> {
        let mut acc = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(acc.len() * level.orbit.len());
            for a in &acc {
                for &x in &level.orbit {
                    next.push(a * level.transversal[x].as_ref().unwrap());
                }
            }
            acc = next;
        }
        acc
    }
}
