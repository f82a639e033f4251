use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// A partition of `{0..degree-1}` into nonempty cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    degree: usize,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl BlockPartition {
    pub fn new(degree: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut cell_of = vec![usize::MAX; degree];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidParameter("empty cell".into()));
            }
            for &x in cell {
                if x >= degree || cell_of[x] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "point {x} missing from 0..{degree} or repeated"
                    )));
                }
                cell_of[x] = c;
            }
        }
        if let Some(x) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidParameter(format!("point {x} not covered")));
        }
        Ok(BlockPartition {
            degree,
            cells,
            cell_of,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_of(&self, point: usize) -> usize {
        self.cell_of[point]
    }

    /// The permutation of cells induced by `g`, or `None` if `g` breaks a cell.
    pub fn induced(&self, g: &Permutation) -> Option<Permutation> {
        let mut images = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let target = self.cell_of[g.apply(cell[0])];
            if cell.iter().any(|&x| self.cell_of[g.apply(x)] != target) {
                return None;
            }
            images.push(target);
        }
        Permutation::from_images(images).ok()
    }
}

/// The action of a group on the cells of an invariant partition: the block
/// kernel `K'`, the induced group `S`, and the projection `π: G → S`.
#[derive(Clone, Debug)]
pub struct BlockAction {
    partition: BlockPartition,
    kernel: PermGroup,
    image: PermGroup,
}

impl BlockAction {
    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn kernel(&self) -> &PermGroup {
        &self.kernel
    }

    pub fn image(&self) -> &PermGroup {
        &self.image
    }

    /// `π(g)`; `g` must preserve the partition.
    pub fn project(&self, g: &Permutation) -> Permutation {
        self.partition
            .induced(g)
            .expect("element preserves the partition")
    }
}

/// Block kernel and induced action of `g` on the cells of `partition`.
pub fn kernel_on_blocks(g: &PermGroup, partition: &BlockPartition) -> Result<BlockAction> {
    if partition.degree() != g.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: partition.degree(),
        });
    }
    let n = g.degree();
    let c = partition.len();
    let mut induced = Vec::with_capacity(g.generators().len());
    let mut combined = Vec::with_capacity(g.generators().len());
    for x in g.generators() {
        let on_cells = partition
            .induced(x)
            .ok_or_else(|| Error::NotInvariant(format!("generator {x} splits a cell")))?;
        let mut images: Vec<usize> = x.images().to_vec();
        images.extend(on_cells.images().iter().map(|&k| n + k));
        combined.push(Permutation::from_images_unchecked(images));
        induced.push(on_cells);
    }
    // Kernel = pointwise stabilizer of the cell points in the action on points ⊔ cells.
    let big = PermGroup::new(n + c, combined)?;
    let cell_points: Vec<usize> = (n..n + c).collect();
    let kernel_gens = big
        .pointwise_stabilizer(&cell_points)
        .generators()
        .iter()
        .map(|k| Permutation::from_images_unchecked(k.images()[..n].to_vec()))
        .collect();
    Ok(BlockAction {
        partition: partition.clone(),
        kernel: PermGroup::new(n, kernel_gens)?,
        image: PermGroup::new(c, induced)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::catalog;

    #[test]
    fn dihedral_on_two_blocks() {
        let d4 = catalog::dihedral(4).unwrap();
        let p = BlockPartition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let act = kernel_on_blocks(&d4, &p).unwrap();
        assert_eq!(act.kernel().order(), 4);
        assert_eq!(act.image().degree(), 2);
        assert_eq!(act.image().order(), 2);
        // elementwise oracle
        let brute = d4
            .elements()
            .into_iter()
            .filter(|x| act.project(x).is_identity())
            .count();
        assert_eq!(brute, 4);
    }

    #[test]
    fn singleton_and_whole_partitions() {
        let d4 = catalog::dihedral(4).unwrap();
        let singles = BlockPartition::new(4, (0..4).map(|i| vec![i]).collect()).unwrap();
        let act = kernel_on_blocks(&d4, &singles).unwrap();
        assert_eq!(act.kernel().order(), 1);
        assert_eq!(act.image().order(), 8);

        let whole = BlockPartition::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let act = kernel_on_blocks(&d4, &whole).unwrap();
        assert!(act.kernel().same_group(&d4));
        assert_eq!(act.image().order(), 1);
    }

    #[test]
    fn rejects_non_invariant_partition() {
        let d4 = catalog::dihedral(4).unwrap();
        let p = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            kernel_on_blocks(&d4, &p),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(BlockPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(BlockPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(BlockPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
    }
}
