use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// A bijection of `{0..n-1}`, stored as its image sequence.
///
/// Products read left to right: `p * q` applies `p` first and then `q`, so
/// `i^(p*q) = (i^p)^q`. The derived ordering is lexicographic on the image
/// sequence, which is the canonical order used for every deterministic choice
/// in this crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::NotAPermutation(format!(
                        "point {x} outside 0..{degree}"
                    )));
                }
                if touched[x] {
                    return Err(Error::NotAPermutation(format!(
                        "point {x} appears in more than one place"
                    )));
                }
                touched[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of `point`.
    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    #[inline]
    fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `other⁻¹ · self · other`.
    pub fn conjugate_by(&self, other: &Permutation) -> Permutation {
        &(&other.inverse() * self) * other
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixes(&self, point: usize) -> bool {
        self.images[point] == point
    }

    pub fn has_fixed_point(&self) -> bool {
        self.images.iter().enumerate().any(|(i, &j)| i == j)
    }

    pub fn pow(&self, mut e: usize) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Nontrivial cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted multiset of cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let moved: usize = lens.iter().sum();
        lens.extend(std::iter::repeat_n(1, self.degree() - moved));
        lens.sort_unstable();
        lens
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(Vec::len)
            .fold(1, |a, b| a / gcd(a, b) * b)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// Left-to-right product. Panics on a degree mismatch; use
    /// [`Permutation::compose`] for the checked form.
    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch in product");
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cs: &[&[usize]]) -> Permutation {
        let cs: Vec<Vec<usize>> = cs.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(n, &cs).unwrap()
    }

    #[test]
    fn square_of_four_cycle() {
        let p = cyc(4, &[&[0, 1, 2, 3]]);
        assert_eq!(p.compose(&p).unwrap(), cyc(4, &[&[0, 2], &[1, 3]]));
    }

    #[test]
    fn compose_is_left_to_right() {
        // 0 -(1 3)-> 0 -(0 1 2 3)-> 1, 1 -> 3 -> 0, 2 -> 2 -> 3, 3 -> 1 -> 2
        let p = cyc(4, &[&[1, 3]]);
        let q = cyc(4, &[&[0, 1, 2, 3]]);
        let pq = p.compose(&q).unwrap();
        assert_eq!(pq.images(), &[1, 0, 3, 2]);
        assert_eq!(pq, cyc(4, &[&[0, 1], &[2, 3]]));
    }

    #[test]
    fn identity_is_neutral() {
        let p = cyc(5, &[&[0, 3], &[1, 4, 2]]);
        let e = Permutation::identity(5);
        assert_eq!(p.compose(&e).unwrap(), p);
        assert_eq!(e.compose(&p).unwrap(), p);
        assert!((&p * &p.inverse()).is_identity());
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let p = Permutation::identity(3);
        let q = Permutation::identity(4);
        assert_eq!(
            p.compose(&q),
            Err(Error::DegreeMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_cycles(4, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn display_and_cycle_type() {
        let p = cyc(6, &[&[2, 4], &[0, 5, 1]]);
        assert_eq!(p.to_string(), "(0 5 1)(2 4)");
        assert_eq!(p.cycle_type(), vec![1, 2, 3]);
        assert_eq!(p.order(), 6);
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(p.pow(6), Permutation::identity(6));
        assert_eq!(p.pow(7), p);
    }
}
