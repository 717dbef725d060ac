use crate::error::{Error, Result};

/// Signed literal over variable `atom` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub atom: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(atom: usize) -> Lit {
        Lit { atom, positive: true }
    }

    pub fn neg(atom: usize) -> Lit {
        Lit { atom, positive: false }
    }

    /// From the DIMACS convention: positive integers are positive literals.
    pub fn from_dimacs(v: i64) -> Result<Lit> {
        if v == 0 {
            return Err(Error::MalformedFormula("literal 0".into()));
        }
        Ok(Lit { atom: v.unsigned_abs() as usize, positive: v > 0 })
    }
}

/// 3-CNF formula over variables x_1..x_n. Clause literals are kept sorted
/// by atom index; repeated atoms within a clause are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatFormula {
    pub n: usize,
    pub clauses: Vec<[Lit; 3]>,
}

impl SatFormula {
    pub fn new(n: usize, mut clauses: Vec<[Lit; 3]>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedFormula("no variables".into()));
        }
        if clauses.is_empty() {
            return Err(Error::MalformedFormula("no clauses".into()));
        }
        for clause in &mut clauses {
            for lit in clause.iter() {
                if lit.atom == 0 || lit.atom > n {
                    return Err(Error::MalformedFormula(format!(
                        "atom {} out of range 1..={n}",
                        lit.atom
                    )));
                }
            }
            clause.sort_by_key(|l| l.atom);
        }
        Ok(SatFormula { n, clauses })
    }

    pub fn k(&self) -> usize {
        self.clauses.len()
    }

    /// DIMACS CNF, restricted to exactly three literals per clause.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut n = None;
        let mut expected_clauses = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Lit> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::MalformedFormula(format!("bad problem line {line:?}")));
                }
                n = Some(
                    fields[1]
                        .parse::<usize>()
                        .map_err(|_| Error::MalformedFormula("bad variable count".into()))?,
                );
                expected_clauses = Some(
                    fields[2]
                        .parse::<usize>()
                        .map_err(|_| Error::MalformedFormula("bad clause count".into()))?,
                );
                continue;
            }
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::MalformedFormula(format!("bad token {tok:?}")))?;
                if v == 0 {
                    let lits: [Lit; 3] = current
                        .as_slice()
                        .try_into()
                        .map_err(|_| Error::MalformedFormula(format!(
                            "clause with {} literals, expected 3",
                            current.len()
                        )))?;
                    clauses.push(lits);
                    current.clear();
                } else {
                    current.push(Lit::from_dimacs(v)?);
                }
            }
        }
        if !current.is_empty() {
            return Err(Error::MalformedFormula("unterminated clause".into()));
        }
        let n = n.ok_or_else(|| Error::MalformedFormula("missing problem line".into()))?;
        if let Some(k) = expected_clauses {
            if clauses.len() != k {
                return Err(Error::MalformedFormula(format!(
                    "header declares {k} clauses, found {}",
                    clauses.len()
                )));
            }
        }
        SatFormula::new(n, clauses)
    }

    /// Does assigning x_`atom` = `value` satisfy some literal of clause `ci`?
    pub fn bit_satisfies(&self, ci: usize, atom: usize, value: bool) -> bool {
        self.clauses[ci].iter().any(|l| l.atom == atom && l.positive == value)
    }

    /// Clause truth value under a full assignment (index 0 holds x_1).
    pub fn clause_satisfied(&self, ci: usize, assignment: &[bool]) -> bool {
        self.clauses[ci].iter().any(|l| assignment[l.atom - 1] == l.positive)
    }

    /// Number of satisfied clauses under a full assignment.
    pub fn num_satisfied(&self, assignment: &[bool]) -> usize {
        (0..self.k()).filter(|&i| self.clause_satisfied(i, assignment)).count()
    }

    /// Brute force over all 2^n assignments.
    pub fn is_satisfiable(&self) -> bool {
        let mut assignment = vec![false; self.n];
        for bits in 0u64..(1u64 << self.n) {
            for (j, a) in assignment.iter_mut().enumerate() {
                *a = bits >> j & 1 == 1;
            }
            if self.num_satisfied(&assignment) == self.k() {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// F = (x1 ∨ x2 ∨ x3) ∧ (¬x2 ∨ x3 ∨ x4).
    pub(crate) fn example_formula() -> SatFormula {
        SatFormula::new(
            4,
            vec![
                [Lit::pos(1), Lit::pos(2), Lit::pos(3)],
                [Lit::neg(2), Lit::pos(3), Lit::pos(4)],
            ],
        )
        .unwrap()
    }

    /// (x1 ∨ x1 ∨ x1) ∧ (¬x1 ∨ ¬x1 ∨ ¬x1), unsatisfiable.
    pub(crate) fn contradiction() -> SatFormula {
        SatFormula::new(
            1,
            vec![
                [Lit::pos(1), Lit::pos(1), Lit::pos(1)],
                [Lit::neg(1), Lit::neg(1), Lit::neg(1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn dimacs_round_trip() {
        let f = SatFormula::from_dimacs("c comment\np cnf 4 2\n1 2 3 0\n-2 3 4 0\n").unwrap();
        assert_eq!(f, example_formula());
    }

    #[test]
    fn clauses_are_sorted_by_atom() {
        let f = SatFormula::new(3, vec![[Lit::pos(3), Lit::neg(1), Lit::pos(2)]]).unwrap();
        let atoms: Vec<usize> = f.clauses[0].iter().map(|l| l.atom).collect();
        assert_eq!(atoms, vec![1, 2, 3]);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(SatFormula::new(2, vec![[Lit::pos(1), Lit::pos(2), Lit::pos(3)]]).is_err());
        assert!(SatFormula::new(2, vec![]).is_err());
        assert!(SatFormula::from_dimacs("p cnf 2 1\n1 2 0\n").is_err());
        assert!(SatFormula::from_dimacs("p cnf 2 2\n1 2 -1 0\n").is_err());
        assert!(SatFormula::from_dimacs("1 2 3 0\n").is_err());
    }

    #[test]
    fn satisfiability_brute_force() {
        assert!(example_formula().is_satisfiable());
        assert!(!contradiction().is_satisfiable());
        assert!(example_formula().clause_satisfied(0, &[true, false, false, false]));
        assert!(!example_formula().clause_satisfied(1, &[false, true, false, false]));
        assert_eq!(example_formula().num_satisfied(&[true, true, true, true]), 2);
    }
}
