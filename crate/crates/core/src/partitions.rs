//! Enumeration of set partitions as restricted growth strings.
//!
//! `a[0] = 0` and `a[i] <= 1 + max(a[..i])`; each partition of `0..n` has
//! exactly one such string, and strings are produced in lexicographic order.

use crate::structure::CoalitionStructure;

#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    /// `prefix_max[i] = max(rgs[..=i])`
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        // rightmost position that may still grow
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for k in i + 1..n {
                    self.rgs[k] = 0;
                    self.prefix_max[k] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.rgs.clone());
        }
        if self.advance() {
            Some(self.rgs.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// All coalition structures on `n` agents, in RGS order.
pub fn all_structures(n: usize) -> impl Iterator<Item = CoalitionStructure> {
    SetPartitions::new(n)
        .map(|rgs| CoalitionStructure::from_assignment(rgs).expect("rgs labels are < n"))
}

/// Bell number `B(n)`, saturating.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for x in &row {
            let v = next.last().unwrap().saturating_add(*x);
            next.push(v);
        }
        row = next;
    }
    row[0]
}
