//! Coalition structures (partitions of the agent set).
//!
//! A structure is stored as a total assignment `agent -> coalition index`
//! with indices in `0..n`; unused indices are empty coalitions. Index labels
//! are bookkeeping only: equality, hashing and ordering go through the
//! canonical form (coalitions sorted by smallest member, members ascending,
//! empties dropped).

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PartitionFile", into = "PartitionFile")]
pub struct CoalitionStructure {
    assignment: Vec<usize>,
}

/// Wire form: `{"n": <int>, "coalitions": [[ids...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub n: usize,
    pub coalitions: Vec<Vec<usize>>,
}

impl TryFrom<PartitionFile> for CoalitionStructure {
    type Error = Error;

    fn try_from(file: PartitionFile) -> Result<Self> {
        Self::from_coalitions(file.n, &file.coalitions)
    }
}

impl From<CoalitionStructure> for PartitionFile {
    fn from(c: CoalitionStructure) -> Self {
        PartitionFile {
            n: c.n(),
            coalitions: c.canonical(),
        }
    }
}

impl CoalitionStructure {
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Self> {
        let n = assignment.len();
        if let Some(&index) = assignment.iter().find(|&&j| j >= n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(Self { assignment })
    }

    /// Coalition `j` of the list gets index `j`. Every agent must appear
    /// exactly once; empty lists are allowed up to `n` coalitions total.
    pub fn from_coalitions(n: usize, coalitions: &[Vec<usize>]) -> Result<Self> {
        if coalitions.len() > n {
            return Err(Error::InvalidPartition(format!(
                "{} coalitions for {n} agents",
                coalitions.len()
            )));
        }
        let mut assignment = vec![usize::MAX; n];
        for (j, members) in coalitions.iter().enumerate() {
            for &i in members {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "agent {i} out of range for {n} agents"
                    )));
                }
                if assignment[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "agent {i} appears in more than one coalition"
                    )));
                }
                assignment[i] = j;
            }
        }
        if let Some(i) = assignment.iter().position(|&j| j == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "agent {i} is not assigned"
            )));
        }
        Ok(Self { assignment })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }

    pub fn grand(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Index of the coalition containing `i`.
    pub fn coalition_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Members of coalition index `j`, ascending (empty if unused).
    pub fn members(&self, j: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignment[i] == j).collect()
    }

    /// Member lists for every index `0..n` (unused indices are empty).
    pub fn member_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.n()];
        for (i, &j) in self.assignment.iter().enumerate() {
            lists[j].push(i);
        }
        lists
    }

    /// Non-empty coalitions as `(index, members)`, by increasing index.
    pub fn coalitions(&self) -> Vec<(usize, Vec<usize>)> {
        self.member_lists()
            .into_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .collect()
    }

    pub fn coalition_count(&self) -> usize {
        let mut used = vec![false; self.n()];
        self.assignment.iter().for_each(|&j| used[j] = true);
        used.into_iter().filter(|&u| u).count()
    }

    /// Smallest index with no members, if any.
    pub fn first_empty_index(&self) -> Option<usize> {
        let mut used = vec![false; self.n()];
        self.assignment.iter().for_each(|&j| used[j] = true);
        used.iter().position(|&u| !u)
    }

    /// Restricted-growth labelling: coalitions numbered by first appearance.
    pub fn rgs(&self) -> Vec<usize> {
        let mut relabel = vec![usize::MAX; self.n()];
        let mut next = 0;
        self.assignment
            .iter()
            .map(|&j| {
                if relabel[j] == usize::MAX {
                    relabel[j] = next;
                    next += 1;
                }
                relabel[j]
            })
            .collect()
    }

    /// Same partition relabelled so index `t` is the coalition with the
    /// `t`-th smallest minimum member.
    pub fn normalized(&self) -> Self {
        Self {
            assignment: self.rgs(),
        }
    }

    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let rgs = self.rgs();
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (i, &j) in rgs.iter().enumerate() {
            out[j].push(i);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidPartition(e.to_string()))
    }

    pub(crate) fn set(&mut self, agent: usize, index: usize) {
        self.assignment[agent] = index;
    }
}

impl PartialEq for CoalitionStructure {
    fn eq(&self, other: &Self) -> bool {
        self.rgs() == other.rgs()
    }
}

impl Eq for CoalitionStructure {}

impl Hash for CoalitionStructure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rgs().hash(state);
    }
}

/// Lexicographic order of canonical forms.
impl Ord for CoalitionStructure {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

impl PartialOrd for CoalitionStructure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
