//! Grouped p-value sets: the validated input of every procedure.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{CastError, Result, Violation};
use crate::scalar::Real;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of a tested feature, e.g. a CpG probe name.
    FeatureId
);
string_id!(
    /// Identifier of a group of features, e.g. a gene symbol.
    GroupId
);

/// One unvalidated input record.
#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub feature: String,
    pub group: String,
    pub p: T,
}

impl<T> Record<T> {
    pub fn new(feature: impl Into<String>, group: impl Into<String>, p: T) -> Self {
        Record { feature: feature.into(), group: group.into(), p }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry<T> {
    pub feature: FeatureId,
    pub group: GroupId,
    pub p: T,
}

/// Members of one group, stored as entry indices in canonical rank order
/// (ascending p, ties broken by ascending feature id).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMembers {
    pub id: GroupId,
    pub members: Vec<usize>,
}

impl GroupMembers {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Features with p-values partitioned into non-overlapping groups.
///
/// Groups are kept sorted by id so every derived output is independent of
/// the order in which records were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedPValueSet<T> {
    entries: Vec<Entry<T>>,
    groups: Vec<GroupMembers>,
}

impl<T: Real> GroupedPValueSet<T> {
    /// Validates raw records, reporting every violation found.
    pub fn validate<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = Record<T>>,
    {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (index, rec) in records.into_iter().enumerate() {
            if rec.feature.is_empty() {
                violations.push(Violation::EmptyFeatureId { index });
                continue;
            }
            if rec.group.is_empty() {
                violations.push(Violation::EmptyGroupId { feature: rec.feature.clone() });
            }
            if !seen.insert(rec.feature.clone()) {
                violations.push(Violation::DuplicateFeature(rec.feature.clone()));
            }
            // NaN fails both comparisons
            if !(rec.p >= T::zero() && rec.p <= T::one()) {
                violations.push(Violation::PValueOutOfRange {
                    feature: rec.feature.clone(),
                    value: rec.p.to_f64().unwrap_or(f64::NAN),
                });
            }
            entries.push(Entry { feature: FeatureId(rec.feature), group: GroupId(rec.group), p: rec.p });
        }
        if entries.is_empty() && violations.is_empty() {
            violations.push(Violation::EmptyInput);
        }
        if !violations.is_empty() {
            return Err(CastError::Validation(violations));
        }

        let mut by_group: BTreeMap<GroupId, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_group.entry(e.group.clone()).or_default().push(i);
        }
        let groups = by_group
            .into_iter()
            .map(|(id, mut members)| {
                members.sort_by(|&a, &b| rank_order(&entries[a], &entries[b]));
                GroupMembers { id, members }
            })
            .collect();
        Ok(GroupedPValueSet { entries, groups })
    }

    /// Total number of features, `M`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct groups, `G`.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[GroupMembers] {
        &self.groups
    }

    pub fn entries(&self) -> &[Entry<T>] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &Entry<T> {
        &self.entries[index]
    }

    pub fn group_sizes(&self) -> BTreeMap<&GroupId, usize> {
        self.groups.iter().map(|g| (&g.id, g.size())).collect()
    }

    /// All entry indices in canonical rank order, ignoring groups.
    pub fn pooled_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| rank_order(&self.entries[a], &self.entries[b]));
        order
    }

    pub fn to_records(&self) -> Vec<Record<T>> {
        self.entries
            .iter()
            .map(|e| Record { feature: e.feature.0.clone(), group: e.group.0.clone(), p: e.p })
            .collect()
    }

    /// Returns a copy whose entry storage is in canonical order (group, rank).
    pub fn canonical(&self) -> Self {
        let records: Vec<_> = self
            .groups
            .iter()
            .flat_map(|g| g.members.iter().map(|&i| &self.entries[i]))
            .map(|e| Record { feature: e.feature.0.clone(), group: e.group.0.clone(), p: e.p })
            .collect();
        Self::validate(records).expect("canonical copy of a valid set")
    }
}

fn rank_order<T: Real>(a: &Entry<T>, b: &Entry<T>) -> Ordering {
    a.p.partial_cmp(&b.p).unwrap_or(Ordering::Equal).then_with(|| a.feature.cmp(&b.feature))
}
