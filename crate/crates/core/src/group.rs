//! Finite groups addressed by element index: abelian descriptors or explicit tables.

use serde::{Deserialize, Serialize};

use crate::abelian::{element_order, AbelianElement, FiniteAbelianGroup};
use crate::error::{Error, Result};

/// Multiplication table on `0..n`, `table[a*n + b] = a·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationTable {
    name: String,
    n: usize,
    identity: usize,
    labels: Vec<String>,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

/// On-disk form of a multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub name: String,
    pub order: usize,
    pub identity: usize,
    pub labels: Vec<String>,
    pub table: Vec<usize>,
}

impl MultiplicationTable {
    /// Checks closure, identity, inverses and associativity.
    pub fn new(name: impl Into<String>, identity: usize, labels: Vec<String>, table: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        let name = name.into();
        if n == 0 {
            return Err(Error::Group(format!("{}: empty group", name)));
        }
        if table.len() != n * n {
            return Err(Error::Group(format!("{}: table has {} entries, expected {}", name, table.len(), n * n)));
        }
        if identity >= n {
            return Err(Error::Group(format!("{}: identity index {} out of range", name, identity)));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= n) {
            return Err(Error::Group(format!("{}: entry {} out of range", name, bad)));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Group(format!("{}: duplicate label {}", name, dup)));
        }
        let mul = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            if mul(identity, a) != a || mul(a, identity) != a {
                return Err(Error::Group(format!("{}: {} is not a two-sided identity", name, identity)));
            }
        }
        let mut inverses = vec![0; n];
        for a in 0..n {
            match (0..n).find(|&b| mul(a, b) == identity && mul(b, a) == identity) {
                Some(b) => inverses[a] = b,
                None => return Err(Error::Group(format!("{}: element {} has no inverse", name, labels[a]))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::Group(format!(
                            "{}: ({}·{})·{} differs from {}·({}·{})",
                            name, labels[a], labels[b], labels[c], labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(MultiplicationTable { name, n, identity, labels, table, inverses })
    }

    pub fn from_file(f: TableFile) -> Result<Self> {
        if f.order != f.labels.len() {
            return Err(Error::Group(format!("{}: order {} but {} labels", f.name, f.order, f.labels.len())));
        }
        Self::new(f.name, f.identity, f.labels, f.table)
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            name: self.name.clone(),
            order: self.n,
            identity: self.identity,
            labels: self.labels.clone(),
            table: self.table.clone(),
        }
    }

    /// Builds the table of a group given by a closed set of elements and a product.
    pub fn from_elements<T: PartialEq + Clone>(
        name: &str,
        elements: &[T],
        label: impl Fn(&T) -> String,
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Self> {
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in elements {
            for b in elements {
                let c = mul(a, b);
                match elements.iter().position(|x| *x == c) {
                    Some(k) => table.push(k),
                    None => return Err(Error::Group(format!("{}: element set is not closed", name))),
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e * n + a] == a))
            .ok_or_else(|| Error::Group(format!("{}: no identity", name)))?;
        Self::new(name, identity, elements.iter().map(label).collect(), table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A finite group whose elements are the indices `0..order()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteGroupModel {
    /// Elements indexed in lexicographic coordinate order.
    Abelian(FiniteAbelianGroup),
    Table(MultiplicationTable),
}

impl FiniteGroupModel {
    pub fn order(&self) -> usize {
        match self {
            FiniteGroupModel::Abelian(g) => g.order() as usize,
            FiniteGroupModel::Table(t) => t.n,
        }
    }

    pub fn identity(&self) -> usize {
        match self {
            FiniteGroupModel::Abelian(_) => 0,
            FiniteGroupModel::Table(t) => t.identity,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            FiniteGroupModel::Abelian(_) => true,
            FiniteGroupModel::Table(t) => {
                (0..t.n).all(|a| (0..t.n).all(|b| t.table[a * t.n + b] == t.table[b * t.n + a]))
            }
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match self {
            FiniteGroupModel::Abelian(g) => {
                let x = self.abelian_element(a);
                let y = self.abelian_element(b);
                Self::abelian_index(g, &(&x + &y))
            }
            FiniteGroupModel::Table(t) => t.table[a * t.n + b],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        match self {
            FiniteGroupModel::Abelian(g) => Self::abelian_index(g, &-&self.abelian_element(a)),
            FiniteGroupModel::Table(t) => t.inverses[a],
        }
    }

    pub fn element_order(&self, a: usize) -> usize {
        match self {
            FiniteGroupModel::Abelian(_) => element_order(&self.abelian_element(a)) as usize,
            FiniteGroupModel::Table(_) => {
                let e = self.identity();
                let mut x = a;
                let mut k = 1;
                while x != e {
                    x = self.mul(x, a);
                    k += 1;
                }
                k
            }
        }
    }

    pub fn label(&self, a: usize) -> String {
        match self {
            FiniteGroupModel::Abelian(_) => self.abelian_element(a).to_string(),
            FiniteGroupModel::Table(t) => t.labels[a].clone(),
        }
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        match self {
            FiniteGroupModel::Abelian(_) => (0..self.order()).find(|&a| self.label(a) == label),
            FiniteGroupModel::Table(t) => t.labels.iter().position(|l| l == label),
        }
    }

    /// The abelian element with index `a`. Panics for table groups.
    pub fn abelian_element(&self, mut a: usize) -> AbelianElement {
        let FiniteGroupModel::Abelian(g) = self else {
            panic!("abelian_element on a table group");
        };
        let mut coords = vec![0i64; g.rank()];
        for (j, &n) in g.factors().iter().enumerate().rev() {
            coords[j] = (a % n as usize) as i64;
            a /= n as usize;
        }
        g.element(&coords).expect("coordinate count matches")
    }

    pub fn abelian_index(g: &FiniteAbelianGroup, x: &AbelianElement) -> usize {
        x.coords()
            .iter()
            .zip(g.factors())
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    /// Subgroup generated by `gens`, as a membership mask.
    pub fn generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order()];
        let e = self.identity();
        inside[e] = true;
        let mut stack = vec![e];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    stack.push(y);
                }
            }
        }
        inside
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity(), |acc, _| self.mul(acc, a))
    }

    /// `a·b·a⁻¹·b⁻¹`
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ab_ai = self.mul(ab, self.inv(a));
        self.mul(ab_ai, self.inv(b))
    }
}

/// Bundled multiplication tables.
pub mod bundled {
    use super::*;

    pub const NAMES: [&str; 4] = ["sl2_z3", "d4", "q8", "d6"];

    fn source(name: &str) -> Option<&'static str> {
        Some(match name {
            "sl2_z3" => include_str!("../data/groups/sl2_z3.json"),
            "d4" => include_str!("../data/groups/d4.json"),
            "q8" => include_str!("../data/groups/q8.json"),
            "d6" => include_str!("../data/groups/d6.json"),
            _ => return None,
        })
    }

    pub fn table(name: &str) -> Result<MultiplicationTable> {
        let src = source(name).ok_or_else(|| Error::Group(format!("no bundled group named {}", name)))?;
        let file: TableFile = serde_json::from_str(src).map_err(|e| Error::Schema(format!("{}: {}", name, e)))?;
        MultiplicationTable::from_file(file)
    }

    pub fn group(name: &str) -> Result<FiniteGroupModel> {
        table(name).map(FiniteGroupModel::Table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_model_indices() {
        let g = FiniteGroupModel::Abelian(FiniteAbelianGroup::new(vec![2, 3]).unwrap());
        assert_eq!(g.order(), 6);
        assert_eq!(g.label(5), "(1,2)");
        assert_eq!(g.mul(5, 5), g.find_label("(0,1)").unwrap());
        assert_eq!(g.element_order(1), 3);
        assert_eq!(g.inv(1), 2);
        assert!(g.is_abelian());
    }

    #[test]
    fn rejects_non_group() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(MultiplicationTable::new("bad", 0, labels.clone(), vec![0, 1, 1, 1]).is_err());
        assert!(MultiplicationTable::new("short", 0, labels, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn bundled_tables_load() {
        for name in bundled::NAMES {
            let g = bundled::group(name).unwrap();
            assert!(!g.is_abelian(), "{}", name);
        }
        assert_eq!(bundled::group("sl2_z3").unwrap().order(), 24);
        assert!(bundled::group("a5").is_err());
    }
}
