//! Variable partitions for the split transformation.
//!
//! A [`Partition`] assigns the variables of a disjunction to ordered,
//! pairwise-disjoint groups. Splitting a constraint applies the partition to
//! the constraint's own support: groups are intersected with the support and
//! empty intersections are skipped.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::VarRef;

/// Ordered partition of a variable set into nonempty, disjoint groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    groups: Vec<Vec<VarRef>>,
}

impl Partition {
    /// Builds a partition from explicit groups, enforcing the invariants:
    /// every group nonempty, groups pairwise disjoint.
    pub fn new(groups: Vec<Vec<VarRef>>) -> Result<Self, PartitionError> {
        let mut seen = BTreeSet::new();
        for (gi, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(PartitionError::EmptyGroup { group: gi });
            }
            for v in g {
                if !seen.insert(*v) {
                    return Err(PartitionError::DuplicateVariable { var: v.0 });
                }
            }
        }
        Ok(Self { groups })
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<VarRef>] {
        &self.groups
    }

    pub fn group(&self, s: usize) -> &[VarRef] {
        &self.groups[s]
    }

    /// Union of all groups.
    pub fn covered(&self) -> BTreeSet<VarRef> {
        self.groups.iter().flatten().copied().collect()
    }

    /// True iff every variable of `vars` lies in some group.
    pub fn covers(&self, vars: &[VarRef]) -> bool {
        let cov = self.covered();
        vars.iter().all(|v| cov.contains(v))
    }

    /// Restriction of each group to `support`, preserving group order and
    /// dropping empty intersections. Returns `(original group index, members)`.
    pub fn restrict_to(&self, support: &[VarRef]) -> Vec<(usize, Vec<VarRef>)> {
        let sup: BTreeSet<VarRef> = support.iter().copied().collect();
        self.groups
            .iter()
            .enumerate()
            .filter_map(|(s, g)| {
                let members: Vec<VarRef> = g.iter().copied().filter(|v| sup.contains(v)).collect();
                if members.is_empty() {
                    None
                } else {
                    Some((s, members))
                }
            })
            .collect()
    }

    /// Splits group `group_index` into two contiguous halves (first half gets
    /// the extra element for odd sizes), leaving all other groups unchanged.
    /// The result is a nested refinement of `self`.
    pub fn refine(&self, group_index: usize) -> Result<Partition, PartitionError> {
        let g = self
            .groups
            .get(group_index)
            .ok_or(PartitionError::GroupOutOfRange { group: group_index, count: self.groups.len() })?;
        if g.len() < 2 {
            return Err(PartitionError::SingletonGroup { group: group_index });
        }
        let mid = g.len().div_ceil(2);
        let mut groups = Vec::with_capacity(self.groups.len() + 1);
        for (i, grp) in self.groups.iter().enumerate() {
            if i == group_index {
                groups.push(grp[..mid].to_vec());
                groups.push(grp[mid..].to_vec());
            } else {
                groups.push(grp.clone());
            }
        }
        Ok(Partition { groups })
    }

    /// Refines every non-singleton group once, doubling the split granularity
    /// while preserving nesting. Used to build the P = 1, 2, 4, ... chains.
    pub fn refine_all(&self) -> Partition {
        let mut p = self.clone();
        for g in (0..self.groups.len()).rev() {
            if p.groups[g].len() >= 2 {
                p = p.refine(g).expect("group has >= 2 elements");
            }
        }
        p
    }

    /// True iff every group of `self` is a subset of exactly one group of
    /// `coarser`.
    pub fn nests_in(&self, coarser: &Partition) -> bool {
        self.groups.iter().all(|g| {
            coarser
                .groups
                .iter()
                .filter(|cg| {
                    let cset: BTreeSet<VarRef> = cg.iter().copied().collect();
                    g.iter().all(|v| cset.contains(v))
                })
                .count()
                == 1
        })
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = PartitionError;

    fn try_from(raw: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        Partition::new(raw.into_iter().map(|g| g.into_iter().map(VarRef).collect()).collect())
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.groups.into_iter().map(|g| g.into_iter().map(|v| v.0).collect()).collect()
    }
}

/// Contiguous split of `var_ids` into `p` groups of size `ceil(n/p)` or
/// `floor(n/p)`, in the given order. The first `n mod p` groups take the
/// larger size.
pub fn even_index_partition(var_ids: &[VarRef], p: usize) -> Result<Partition, PartitionError> {
    let n = var_ids.len();
    if p < 1 || p > n {
        return Err(PartitionError::BadGroupCount { p, n });
    }
    let base = n / p;
    let extra = n % p;
    let mut groups = Vec::with_capacity(p);
    let mut at = 0;
    for s in 0..p {
        let size = base + usize::from(s < extra);
        groups.push(var_ids[at..at + size].to_vec());
        at += size;
    }
    Ok(Partition { groups })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    BadGroupCount { p: usize, n: usize },
    EmptyGroup { group: usize },
    DuplicateVariable { var: usize },
    SingletonGroup { group: usize },
    GroupOutOfRange { group: usize, count: usize },
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::BadGroupCount { p, n } => {
                write!(f, "cannot split {n} variable(s) into {p} group(s)")
            }
            PartitionError::EmptyGroup { group } => write!(f, "group {group} is empty"),
            PartitionError::DuplicateVariable { var } => {
                write!(f, "variable x{var} appears in more than one group")
            }
            PartitionError::SingletonGroup { group } => {
                write!(f, "group {group} has a single element and cannot be refined")
            }
            PartitionError::GroupOutOfRange { group, count } => {
                write!(f, "group index {group} out of range (partition has {count} groups)")
            }
        }
    }
}

impl std::error::Error for PartitionError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(ids: &[usize]) -> Vec<VarRef> {
        ids.iter().copied().map(VarRef).collect()
    }

    #[test]
    fn even_split_four_into_two() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3]), 2).unwrap();
        assert_eq!(p.groups(), &[vars(&[0, 1]), vars(&[2, 3])]);
    }

    #[test]
    fn even_split_four_into_singletons() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3]), 4).unwrap();
        assert_eq!(p.num_groups(), 4);
        assert!(p.groups().iter().all(|g| g.len() == 1));
    }

    #[test]
    fn even_split_five_into_two() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3, 4]), 2).unwrap();
        assert_eq!(p.groups(), &[vars(&[0, 1, 2]), vars(&[3, 4])]);
    }

    #[test]
    fn even_split_rejects_bad_counts() {
        assert!(even_index_partition(&vars(&[0, 1]), 3).is_err());
        assert!(even_index_partition(&vars(&[0, 1]), 0).is_err());
    }

    #[test]
    fn one_group_covers_everything() {
        let ids = vars(&[3, 5, 7]);
        let p = even_index_partition(&ids, 1).unwrap();
        assert_eq!(p.groups(), &[ids.clone()]);
        assert!(p.covers(&ids));
    }

    #[test]
    fn refine_halves_selected_group() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3]), 2).unwrap();
        let r = p.refine(0).unwrap();
        assert_eq!(r.groups(), &[vars(&[0]), vars(&[1]), vars(&[2, 3])]);
        assert!(r.nests_in(&p));
    }

    #[test]
    fn refine_single_group_into_halves() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3]), 1).unwrap();
        let r = p.refine(0).unwrap();
        assert_eq!(r.groups(), &[vars(&[0, 1]), vars(&[2, 3])]);
        assert!(r.nests_in(&p));
    }

    #[test]
    fn refine_rejects_singleton() {
        let p = even_index_partition(&vars(&[0, 1]), 2).unwrap();
        assert!(matches!(p.refine(0), Err(PartitionError::SingletonGroup { .. })));
    }

    #[test]
    fn restriction_drops_empty_groups() {
        let p = even_index_partition(&vars(&[0, 1, 2, 3]), 2).unwrap();
        let restricted = p.restrict_to(&vars(&[2, 3]));
        assert_eq!(restricted, vec![(1, vars(&[2, 3]))]);
    }

    #[test]
    fn duplicate_variable_rejected() {
        assert!(matches!(
            Partition::new(vec![vars(&[0, 1]), vars(&[1, 2])]),
            Err(PartitionError::DuplicateVariable { var: 1 })
        ));
    }
}
