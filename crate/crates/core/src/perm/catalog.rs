//! Built-in groups: `Sym(n)`, `Alt(n)`, `Cyclic(n)`, `Dihedral(n)`, `Klein4`.

use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

fn check_degree(n: usize, min: usize, name: &str) -> Result<()> {
    if n < min {
        Err(Error::InvalidParameter(format!(
            "{name}(n) needs n >= {min}, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn cycle(n: usize, points: &[usize]) -> Permutation {
    Permutation::from_cycles(n, &[points.to_vec()]).expect("valid cycle")
}

pub fn symmetric(n: usize) -> Result<PermGroup> {
    check_degree(n, 1, "Sym")?;
    if n == 1 {
        return Ok(PermGroup::trivial(1));
    }
    let full: Vec<usize> = (0..n).collect();
    let mut gens = vec![cycle(n, &[0, 1])];
    if n > 2 {
        gens.insert(0, cycle(n, &full));
    }
    PermGroup::new(n, gens)
}

pub fn alternating(n: usize) -> Result<PermGroup> {
    check_degree(n, 1, "Alt")?;
    let gens = (2..n).map(|i| cycle(n, &[0, 1, i])).collect();
    PermGroup::new(n, gens)
}

pub fn cyclic(n: usize) -> Result<PermGroup> {
    check_degree(n, 1, "Cyclic")?;
    if n == 1 {
        return Ok(PermGroup::trivial(1));
    }
    let full: Vec<usize> = (0..n).collect();
    PermGroup::new(n, vec![cycle(n, &full)])
}

/// The dihedral group of order `2n` on the vertices of an `n`-gon.
pub fn dihedral(n: usize) -> Result<PermGroup> {
    check_degree(n, 3, "Dihedral")?;
    let full: Vec<usize> = (0..n).collect();
    let reflection = Permutation::from_images((0..n).map(|i| (n - i) % n).collect())?;
    PermGroup::new(n, vec![cycle(n, &full), reflection])
}

pub fn klein4() -> PermGroup {
    let a = Permutation::from_cycles(4, &[vec![0, 1], vec![2, 3]]).unwrap();
    let b = Permutation::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
    PermGroup::new(4, vec![a, b]).unwrap()
}

/// Resolves a catalog name such as `Dihedral(4)`; `None` if `name` is not a
/// catalog expression at all.
pub fn lookup(name: &str) -> Option<Result<PermGroup>> {
    let name = name.trim();
    if name == "Klein4" {
        return Some(Ok(klein4()));
    }
    let open = name.find('(')?;
    if !name.ends_with(')') {
        return None;
    }
    let head = &name[..open];
    let arg = name[open + 1..name.len() - 1].trim();
    let ctor: fn(usize) -> Result<PermGroup> = match head {
        "Sym" => symmetric,
        "Alt" => alternating,
        "Cyclic" => cyclic,
        "Dihedral" => dihedral,
        _ => return None,
    };
    Some(match arg.parse::<usize>() {
        Ok(n) => ctor(n),
        Err(_) => Err(Error::Parse {
            line: 1,
            column: open + 2,
            message: format!("expected a positive integer in {name}"),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> u64 {
        (1..=n).product()
    }

    #[test]
    fn orders() {
        for n in 1..=6u64 {
            assert_eq!(symmetric(n as usize).unwrap().order(), factorial(n));
            let alt = if n < 2 { 1 } else { factorial(n) / 2 };
            assert_eq!(alternating(n as usize).unwrap().order(), alt);
            assert_eq!(cyclic(n as usize).unwrap().order(), n);
        }
        for n in 3..=8u64 {
            assert_eq!(dihedral(n as usize).unwrap().order(), 2 * n);
        }
        assert_eq!(klein4().order(), 4);
    }

    #[test]
    fn dihedral_four_generators() {
        let d4 = dihedral(4).unwrap();
        assert_eq!(d4.generators()[0].to_string(), "(0 1 2 3)");
        assert_eq!(d4.generators()[1].to_string(), "(1 3)");
    }

    #[test]
    fn lookup_names() {
        assert_eq!(lookup("Sym(4)").unwrap().unwrap().order(), 24);
        assert_eq!(lookup(" Klein4 ").unwrap().unwrap().degree(), 4);
        assert!(lookup("Dihedral(2)").unwrap().is_err());
        assert!(lookup("Foo(3)").is_none());
        assert!(lookup("Cyclic(x)").unwrap().is_err());
    }
}
