//! Permutation isomorphism: a point bijection conjugating one group onto another.

use std::collections::BTreeMap;

use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 12;

/// Groups up to this order get the cycle-type histogram screen.
const HISTOGRAM_ORDER_LIMIT: u64 = 50_000;

/// Finds `σ` with `σ⁻¹ G σ = H`, searching degrees up to [`DEFAULT_DEGREE_CAP`].
pub fn perm_isomorphic(g: &PermGroup, h: &PermGroup) -> Result<Option<Permutation>> {
    perm_isomorphic_with_cap(g, h, DEFAULT_DEGREE_CAP)
}

pub fn perm_isomorphic_with_cap(
    g: &PermGroup,
    h: &PermGroup,
    cap: usize,
) -> Result<Option<Permutation>> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: h.degree(),
        });
    }
    let n = g.degree();
    if n > cap {
        return Err(Error::DegreeTooLarge { degree: n, cap });
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if g.order() <= HISTOGRAM_ORDER_LIMIT && cycle_histogram(g) != cycle_histogram(h) {
        return Ok(None);
    }
    let og = OrbitTable::new(g);
    let oh = OrbitTable::new(h);
    let mut lens_g = og.orbit_len.clone();
    let mut lens_h = oh.orbit_len.clone();
    lens_g.sort_unstable();
    lens_h.sort_unstable();
    if lens_g != lens_h {
        return Ok(None);
    }

    let mut search = Search {
        g,
        h,
        og: &og,
        oh: &oh,
        assignment: vec![usize::MAX; n],
        used: vec![false; n],
    };
    Ok(search.run(0))
}

fn cycle_histogram(g: &PermGroup) -> BTreeMap<Vec<usize>, usize> {
    let mut hist = BTreeMap::new();
    for x in g.elements() {
        *hist.entry(x.cycle_type()).or_insert(0) += 1;
    }
    hist
}

/// `orbit_len[i]` = |i^G| and `pair[i][j]` = |j^{G_i}|; both are preserved by
/// any conjugating bijection.
struct OrbitTable {
    orbit_len: Vec<usize>,
    orbit_rep: Vec<usize>,
    pair: Vec<Vec<usize>>,
}

impl OrbitTable {
    fn new(g: &PermGroup) -> Self {
        let n = g.degree();
        let mut orbit_len = vec![0; n];
        let mut orbit_rep = vec![0; n];
        for cell in g.orbits().cells() {
            for &x in cell {
                orbit_len[x] = cell.len();
                orbit_rep[x] = cell[0];
            }
        }
        let pair = (0..n)
            .map(|i| {
                let st = g.stabilizer(i);
                let mut row = vec![0; n];
                for cell in st.orbits().cells() {
                    for &x in cell {
                        row[x] = cell.len();
                    }
                }
                row
            })
            .collect();
        OrbitTable {
            orbit_len,
            orbit_rep,
            pair,
        }
    }
}

struct Search<'a> {
    g: &'a PermGroup,
    h: &'a PermGroup,
    og: &'a OrbitTable,
    oh: &'a OrbitTable,
    assignment: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn run(&mut self, j: usize) -> Option<Permutation> {
        let n = self.assignment.len();
        if j == n {
            let sigma = Permutation::from_images_unchecked(self.assignment.clone());
            let ok = self
                .g
                .generators()
                .iter()
                .all(|x| self.h.contains(&x.conjugate_by(&sigma)));
            return ok.then_some(sigma);
        }
        for y in 0..n {
            if self.used[y] || self.og.orbit_len[j] != self.oh.orbit_len[y] {
                continue;
            }
            // σ may be right-multiplied by elements of H, so the image of the
            // first point can be taken to be an H-orbit representative.
            if j == 0 && self.oh.orbit_rep[y] != y {
                continue;
            }
            let consistent = (0..j).all(|i| {
                let x = self.assignment[i];
                self.og.pair[i][j] == self.oh.pair[x][y] && self.og.pair[j][i] == self.oh.pair[y][x]
            });
            if !consistent {
                continue;
            }
            self.assignment[j] = y;
            self.used[y] = true;
            if let Some(s) = self.run(j + 1) {
                return Some(s);
            }
            self.used[y] = false;
            self.assignment[j] = usize::MAX;
        }
        None
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

    fn all_perms(n: usize) -> Vec<Permutation> {
        catalog::symmetric(n).unwrap().elements()
    }

    fn brute_conjugators(g: &PermGroup, h: &PermGroup) -> Vec<Permutation> {
        all_perms(g.degree())
            .into_iter()
            .filter(|s| g.conjugate(s).same_group(h))
            .collect()
    }

    #[test]
    fn identical_groups() {
        let d4 = catalog::dihedral(4).unwrap();
        let s = perm_isomorphic(&d4, &d4).unwrap().unwrap();
        assert!(d4.conjugate(&s).same_group(&d4));
    }

    #[test]
    fn conjugate_cyclic_groups() {
        let g = PermGroup::new(4, vec![p(4, &[&[0, 1, 2, 3]])]).unwrap();
        let h = PermGroup::new(4, vec![p(4, &[&[0, 2, 1, 3]])]).unwrap();
        let brute = brute_conjugators(&g, &h);
        assert!(!brute.is_empty());
        let s = perm_isomorphic(&g, &h).unwrap().unwrap();
        assert!(brute.contains(&s));
    }

    #[test]
    fn cyclic_versus_klein() {
        let c4 = catalog::cyclic(4).unwrap();
        assert!(perm_isomorphic(&c4, &catalog::klein4()).unwrap().is_none());
    }

    #[test]
    fn same_abstract_group_different_actions() {
        // C2 acting regularly on {0,1} plus two fixed points, versus a double transposition
        let a = PermGroup::new(4, vec![p(4, &[&[0, 1]])]).unwrap();
        let b = PermGroup::new(4, vec![p(4, &[&[0, 1], &[2, 3]])]).unwrap();
        assert!(perm_isomorphic(&a, &b).unwrap().is_none());
        let c = PermGroup::new(4, vec![p(4, &[&[2, 3]])]).unwrap();
        let s = perm_isomorphic(&a, &c).unwrap().unwrap();
        assert!(a.conjugate(&s).same_group(&c));
    }

    #[test]
    fn agrees_with_brute_force_on_degree_four_subgroups() {
        // All cyclic subgroups of Sym(4), pairwise.
        let groups: Vec<PermGroup> = all_perms(4)
            .into_iter()
            .map(|x| PermGroup::new(4, vec![x]).unwrap())
            .collect();
        for a in &groups {
            for b in &groups {
                let fast = perm_isomorphic(a, b).unwrap();
                let brute = brute_conjugators(a, b);
                assert_eq!(fast.is_some(), !brute.is_empty(), "{a:?} {b:?}");
                if let Some(s) = fast {
                    for x in a.generators() {
                        assert!(b.contains(&x.conjugate_by(&s)));
                    }
                }
            }
        }
    }

    #[test]
    fn errors() {
        let a = catalog::cyclic(3).unwrap();
        let b = catalog::cyclic(4).unwrap();
        assert!(matches!(
            perm_isomorphic(&a, &b),
            Err(Error::DegreeMismatch { .. })
        ));
        let big = catalog::cyclic(13).unwrap();
        assert!(matches!(
            perm_isomorphic(&big, &big),
            Err(Error::DegreeTooLarge { .. })
        ));
    }
}
