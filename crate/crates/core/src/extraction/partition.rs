use std::collections::HashMap;

use crate::error::{Error, Result};

enum Node {
    Leaf(usize),
    Split { coord: usize, thr: f64, lo: usize, hi: usize },
}

/// Refinable map from points of [0,1]^dim to abstract cell ids: a uniform
/// grid of the given per-dimension granularity, with an axis-aligned split
/// tree grown on demand inside each grid box. Refinement only ever splits
/// cells; ids of split cells are retired, never reused.
pub struct AbstractionPartition {
    dim: usize,
    granularity: usize,
    nodes: Vec<Node>,
    roots: HashMap<Vec<u32>, usize>,
    next_cell: usize,
    refinements: usize,
}

impl AbstractionPartition {
    pub fn new(dim: usize, granularity: usize) -> Result<Self> {
        if granularity == 0 {
            return Err(Error::InvalidParameter("granularity must be positive".into()));
        }
        Ok(AbstractionPartition {
            dim,
            granularity,
            nodes: Vec::new(),
            roots: HashMap::new(),
            next_cell: 0,
            refinements: 0,
        })
    }

    pub fn refinements(&self) -> usize {
        self.refinements
    }

    fn grid_key(&self, p: &[f64]) -> Vec<u32> {
        let g = self.granularity as f64;
        p.iter()
            .map(|&x| (x.clamp(0.0, 1.0) * g).floor().min(self.granularity as f64 - 1.0) as u32)
            .collect()
    }

    fn leaf_index_of(&mut self, p: &[f64]) -> usize {
        let key = self.grid_key(p);
        let mut node = match self.roots.get(&key) {
            Some(&n) => n,
            None => {
                let n = self.nodes.len();
                self.nodes.push(Node::Leaf(self.next_cell));
                self.next_cell += 1;
                self.roots.insert(key, n);
                n
            }
        };
        loop {
            match self.nodes[node] {
                Node::Leaf(_) => return node,
                Node::Split { coord, thr, lo, hi } => {
                    node = if p[coord] < thr { lo } else { hi };
                }
            }
        }
    }

    pub fn cell_of(&mut self, p: &[f64]) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        let leaf = self.leaf_index_of(p);
        match self.nodes[leaf] {
            Node::Leaf(id) => id,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Splits the common cell of `a` and `b` along the coordinate where they
    /// differ most, at their midpoint. Fails if the points are in different
    /// cells already or coincide.
    pub fn refine(&mut self, a: &[f64], b: &[f64]) -> Result<()> {
        let leaf_a = self.leaf_index_of(a);
        let leaf_b = self.leaf_index_of(b);
        if leaf_a != leaf_b {
            return Err(Error::InvalidParameter(
                "refine requires both points in one cell".into(),
            ));
        }
        let coord = (0..self.dim)
            .max_by(|&i, &j| {
                (a[i] - b[i]).abs().partial_cmp(&(a[j] - b[j]).abs()).unwrap()
            })
            .ok_or_else(|| Error::InvalidParameter("zero-dimensional partition".into()))?;
        if a[coord] == b[coord] {
            return Err(Error::InvalidParameter(
                "points coincide; the cell cannot be split".into(),
            ));
        }
        let thr = (a[coord] + b[coord]) / 2.0;
        let lo = self.nodes.len();
        self.nodes.push(Node::Leaf(self.next_cell));
        self.nodes.push(Node::Leaf(self.next_cell + 1));
        self.next_cell += 2;
        self.nodes[leaf_a] = Node::Split { coord, thr, lo, hi: lo + 1 };
        self.refinements += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_separates_one_hot_corners() {
        let mut p = AbstractionPartition::new(3, 2).unwrap();
        let e0 = [1.0, 0.0, 0.0];
        let e1 = [0.0, 1.0, 0.0];
        let e2 = [0.0, 0.0, 1.0];
        let cells = [p.cell_of(&e0), p.cell_of(&e1), p.cell_of(&e2)];
        assert_ne!(cells[0], cells[1]);
        assert_ne!(cells[1], cells[2]);
        assert_ne!(cells[0], cells[2]);
        // stable on repeat lookups
        assert_eq!(p.cell_of(&e0), cells[0]);
    }

    #[test]
    fn granularity_one_is_a_single_cell() {
        let mut p = AbstractionPartition::new(2, 1).unwrap();
        let c = p.cell_of(&[0.1, 0.9]);
        assert_eq!(p.cell_of(&[0.8, 0.2]), c);
    }

    #[test]
    fn refinement_splits_and_never_merges() {
        let mut p = AbstractionPartition::new(2, 1).unwrap();
        let a = [0.2, 0.3];
        let b = [0.21, 0.8];
        let c = [0.9, 0.85];
        assert_eq!(p.cell_of(&a), p.cell_of(&b));
        p.refine(&a, &b).unwrap();
        assert_ne!(p.cell_of(&a), p.cell_of(&b));
        // b and c stayed together (split hit coordinate 1 at 0.55)
        assert_eq!(p.cell_of(&b), p.cell_of(&c));
        p.refine(&b, &c).unwrap();
        assert_ne!(p.cell_of(&b), p.cell_of(&c));
        assert_ne!(p.cell_of(&a), p.cell_of(&b));
        assert_eq!(p.refinements(), 2);
    }

    #[test]
    fn refine_rejects_separated_or_equal_points() {
        let mut p = AbstractionPartition::new(1, 2).unwrap();
        assert!(p.refine(&[0.1], &[0.9]).is_err());
        assert!(p.refine(&[0.1], &[0.1]).is_err());
    }
}
