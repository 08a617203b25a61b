//! Finite groups given by Cayley tables.

use thiserror::Error;

use crate::alphabet::{Alphabet, Symbol};
use crate::quasigroup::{
    bits, union_closure_sweep, Quasigroup, MAX_ENUM_ORDER, MAX_EXHAUSTIVE_ORDER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("operation is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(String, String, String),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("`{0}` is not the identity of the table")]
    WrongIdentity(String),
    #[error("order {n} exceeds the enumeration bound {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("map is not a permutation of the alphabet")]
    NotAPermutation,
    #[error("permutation does not fix the identity")]
    MovesIdentity,
    #[error("{0:?} is not a subgroup")]
    NotASubgroup(Vec<Symbol>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    table: Quasigroup,
    identity: Symbol,
    inverse: Vec<Symbol>,
    abelian: bool,
}

impl GroupTable {
    /// Verifies associativity, finds the identity and tabulates inverses.
    pub fn new(table: Quasigroup) -> Result<Self, GroupError> {
        if let Some((a, b, c)) = table.associativity_witness() {
            let name = |s| table.alphabet().name(s).to_string();
            return Err(GroupError::NotAssociative(name(a), name(b), name(c)));
        }
        let identity = table.identity().ok_or(GroupError::NoIdentity)?;
        let n = table.order() as Symbol;
        let inverse = (0..n)
            .map(|a| table.row(a).iter().position(|&x| x == identity).unwrap() as Symbol)
            .collect();
        let abelian = (0..n).all(|a| (0..a).all(|b| table.mul(a, b) == table.mul(b, a)));
        Ok(Self { table, identity, inverse, abelian })
    }

    /// Like [`GroupTable::new`] but also checks a declared identity.
    pub fn with_identity(table: Quasigroup, identity: Symbol) -> Result<Self, GroupError> {
        let g = Self::new(table)?;
        if g.identity != identity {
            return Err(GroupError::WrongIdentity(g.alphabet().name(identity).to_string()));
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.table.alphabet()
    }

    pub fn quasigroup(&self) -> &Quasigroup {
        &self.table
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.table.mul(a, b)
    }

    #[inline]
    pub fn inv(&self, a: Symbol) -> Symbol {
        self.inverse[a as usize]
    }

    pub fn identity(&self) -> Symbol {
        self.identity
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn is_subgroup(&self, members: &[Symbol]) -> bool {
        let n = self.order() as Symbol;
        if members.is_empty() || members.iter().any(|&m| m >= n) {
            return false;
        }
        let mut inside = vec![false; self.order()];
        for &m in members {
            inside[m as usize] = true;
        }
        members.iter().all(|&a| {
            inside[self.inv(a) as usize] && members.iter().all(|&b| inside[self.mul(a, b) as usize])
        })
    }

    /// Checks that `rho` is a permutation fixing the identity.
    pub fn check_rho(&self, rho: &[Symbol]) -> Result<(), GroupError> {
        let n = self.order();
        let mut seen = vec![false; n];
        if rho.len() != n
            || rho.iter().any(|&r| r as usize >= n || std::mem::replace(&mut seen[r as usize], true))
        {
            return Err(GroupError::NotAPermutation);
        }
        if rho[self.identity as usize] != self.identity {
            return Err(GroupError::MovesIdentity);
        }
        Ok(())
    }

    fn close_under(&self, seed: u64, rho: &[Symbol]) -> u64 {
        let mut set = seed | 1 << self.identity;
        loop {
            let mut next = set;
            for a in bits(set) {
                next |= 1 << self.inv(a) | 1 << rho[a as usize];
                for b in bits(set) {
                    next |= 1 << self.mul(a, b);
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    /// All `rho`-invariant subgroups, including `{e}` and the whole group,
    /// sorted lexicographically by member list.
    pub fn invariant_subgroups(&self, rho: &[Symbol]) -> Result<Vec<Vec<Symbol>>, GroupError> {
        let n = self.order();
        if n > MAX_ENUM_ORDER {
            return Err(GroupError::OrderTooLarge { n, max: MAX_ENUM_ORDER });
        }
        self.check_rho(rho)?;
        let seeds = (0..n).flat_map(|a| (a..n).map(move |b| (1u64 << a) | (1u64 << b)));
        let mut family =
            union_closure_sweep(seeds.map(|s| self.close_under(s, rho)), |s| self.close_under(s, rho));
        family.insert(1 << self.identity);
        Ok(sorted_members(family))
    }

    /// Exhaustive `2^N` scan; the oracle for [`GroupTable::invariant_subgroups`].
    pub fn invariant_subgroups_exhaustive(
        &self,
        rho: &[Symbol],
    ) -> Result<Vec<Vec<Symbol>>, GroupError> {
        let n = self.order();
        if n > MAX_EXHAUSTIVE_ORDER {
            return Err(GroupError::OrderTooLarge { n, max: MAX_EXHAUSTIVE_ORDER });
        }
        self.check_rho(rho)?;
        let family = (1u64..1 << n).filter(|&s| {
            bits(s).all(|a| {
                s >> rho[a as usize] & 1 == 1 && bits(s).all(|b| s >> self.mul(a, b) & 1 == 1)
            })
        });
        Ok(sorted_members(family))
    }

    pub fn subgroups(&self) -> Result<Vec<Vec<Symbol>>, GroupError> {
        let id: Vec<Symbol> = (0..self.order() as Symbol).collect();
        self.invariant_subgroups(&id)
    }

    /// `log₂` of the largest proper subgroup order (0 for the trivial group).
    pub fn h_max(&self) -> Result<f64, GroupError> {
        let n = self.order();
        let largest = self
            .subgroups()?
            .iter()
            .map(Vec::len)
            .filter(|&k| k < n)
            .max()
            .unwrap_or(1);
        Ok((largest as f64).log2())
    }

    /// Right coset `C·x`.
    pub fn right_coset(&self, subgroup: &[Symbol], x: Symbol) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = subgroup.iter().map(|&c| self.mul(c, x)).collect();
        out.sort_unstable();
        out
    }
}

fn sorted_members(family: impl IntoIterator<Item = u64>) -> Vec<Vec<Symbol>> {
    let mut out: Vec<Vec<Symbol>> = family.into_iter().map(|s| bits(s).collect()).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn group(q: Quasigroup) -> GroupTable {
        GroupTable::new(q).unwrap()
    }

    #[test]
    fn detects_non_groups() {
        assert!(matches!(GroupTable::new(builtins::d7()), Err(GroupError::NotAssociative(..))));
        let g = builtins::cyclic(4).unwrap();
        assert_eq!(GroupTable::with_identity(g, 1), Err(GroupError::WrongIdentity("1".into())));
    }

    #[test]
    fn quaternion_basics() {
        let q = group(builtins::quaternion());
        assert!(!q.is_abelian());
        for a in 0..8 {
            assert_eq!(q.mul(a, q.inv(a)), q.identity());
        }
    }

    #[test]
    fn cyclic_three_identity_rho() {
        let g = group(builtins::cyclic(3).unwrap());
        let subs = g.invariant_subgroups(&[0, 1, 2]).unwrap();
        assert_eq!(subs, vec![vec![0], vec![0, 1, 2]]);
    }

    #[test]
    fn klein_swap_rho() {
        let g = group(builtins::product(&builtins::cyclic(2).unwrap(), &builtins::cyclic(2).unwrap()));
        // (x, y) -> (y, x): indices 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
        let rho = [0, 2, 1, 3];
        let subs = g.invariant_subgroups(&rho).unwrap();
        assert_eq!(subs, g.invariant_subgroups_exhaustive(&rho).unwrap());
        assert!(subs.contains(&vec![0, 3]));
        assert!(!subs.contains(&vec![0, 1]));
        assert!(!subs.contains(&vec![0, 2]));
        assert_eq!(subs.len(), 3);
    }

    #[test]
    fn order_21_subgroups_and_h_max() {
        let g = group(builtins::nonabelian21());
        let mut sizes: Vec<usize> = g.subgroups().unwrap().iter().map(Vec::len).collect();
        sizes.sort();
        sizes.dedup();
        assert_eq!(sizes, vec![1, 3, 7, 21]);
        assert!((g.h_max().unwrap() - 7f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn quaternion_subgroup_orders() {
        let g = group(builtins::quaternion());
        let mut sizes: Vec<usize> = g.subgroups().unwrap().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 4, 4, 4, 8]);
        assert_eq!(g.h_max().unwrap(), 2.0);
    }

    #[test]
    fn prime_h_max_is_zero() {
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(group(builtins::cyclic(p).unwrap()).h_max().unwrap(), 0.0);
        }
    }

    #[test]
    fn rho_validation() {
        let g = group(builtins::cyclic(3).unwrap());
        assert_eq!(g.invariant_subgroups(&[1, 0, 2]), Err(GroupError::MovesIdentity));
        assert_eq!(g.invariant_subgroups(&[0, 1, 1]), Err(GroupError::NotAPermutation));
    }
}
