//! Exact, exhaustive stability predicates with replayable witnesses.
//!
//! Every check scans in a fixed order (agents by id, coalitions by smallest
//! member, deviating sets by size then lexicographically), so the witness
//! returned for a given input never changes between runs.
//!
//! Agents already at their utility cap `max(0, max incident weight)` cannot
//! strictly improve and are skipped wherever a strict improvement is
//! required; this is what keeps the exponential searches tractable at the
//! instance sizes the experiments use.

mod kind;
mod witness;

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::game::check_compatible;
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::structure::CoalitionStructure;

pub use kind::StabilityKind;
pub use witness::{
    BlockingMode, CheckOptions, DeviationMode, DeviationWitness, Stability, WitnessKind,
    DEFAULT_GUARD_LIMIT,
};

/// Per-graph tables shared by repeated checks on the same game.
pub struct Checker<'g, S> {
    g: &'g WeightedGraph<S>,
    dense: Vec<S>,
    caps: Vec<S>,
    options: CheckOptions,
}

impl<S> fmt::Debug for Checker<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Checker")
            .field("n", &self.caps.len())
            .field("options", &self.options)
            .finish()
    }
}

/// A coalition structure together with everything the checks derive from it.
struct View<'c, S> {
    c: &'c CoalitionStructure,
    sizes: Vec<usize>,
    /// non-empty coalition indices ordered by smallest member
    order: Vec<usize>,
    fresh: Option<usize>,
    utilities: Vec<S>,
    improvable: Vec<bool>,
}

impl<'g, S: Scalar> Checker<'g, S> {
    pub fn new(g: &'g WeightedGraph<S>) -> Self {
        Self::with_options(g, CheckOptions::default())
    }

    pub fn with_options(g: &'g WeightedGraph<S>, options: CheckOptions) -> Self {
        let n = g.n();
        let mut dense = vec![S::zero(); n * n];
        for (u, v, w) in g.edges() {
            dense[u * n + v] = w.clone();
            dense[v * n + u] = w.clone();
        }
        let caps = (0..n).map(|i| g.utility_cap(i)).collect();
        Self {
            g,
            dense,
            caps,
            options,
        }
    }

    pub fn graph(&self) -> &'g WeightedGraph<S> {
        self.g
    }

    fn w(&self, i: usize, j: usize) -> &S {
        &self.dense[i * self.g.n() + j]
    }

    fn view<'c>(&self, c: &'c CoalitionStructure) -> Result<View<'c, S>> {
        check_compatible(self.g, c)?;
        let n = c.n();
        let mut sizes = vec![0usize; n];
        let mut first = vec![usize::MAX; n];
        for (i, &j) in c.assignment().iter().enumerate() {
            sizes[j] += 1;
            first[j] = first[j].min(i);
        }
        let mut order: Vec<usize> = (0..n).filter(|&j| sizes[j] > 0).collect();
        order.sort_by_key(|&j| first[j]);
        let fresh = (0..n).find(|&j| sizes[j] == 0);
        let mut utilities = Vec::with_capacity(n);
        for i in 0..n {
            let own = c.coalition_of(i);
            if sizes[own] <= 1 {
                utilities.push(S::zero());
                continue;
            }
            let mut total = S::zero();
            for (j, w) in self.g.neighbors(i) {
                if c.coalition_of(*j) == own {
                    total += w.clone();
                }
            }
            utilities.push(total / S::from_count(sizes[own] - 1));
        }
        let improvable = (0..n).map(|i| utilities[i] < self.caps[i]).collect();
        Ok(View {
            c,
            sizes,
            order,
            fresh,
            utilities,
            improvable,
        })
    }

    /// `(target, utility after the move)` for every unilateral move of `i`,
    /// in scan order; a single empty index stands for "a new coalition".
    fn moves_of(&self, v: &View<'_, S>, i: usize) -> Vec<(usize, S)> {
        let n = self.g.n();
        let own = v.c.coalition_of(i);
        let mut towards = vec![S::zero(); n];
        for (j, w) in self.g.neighbors(i) {
            towards[v.c.coalition_of(*j)] += w.clone();
        }
        let mut out = Vec::with_capacity(v.order.len() + 1);
        for &j in &v.order {
            if j != own {
                let after =
                    std::mem::replace(&mut towards[j], S::zero()) / S::from_count(v.sizes[j]);
                out.push((j, after));
            }
        }
        if let Some(f) = v.fresh {
            if v.sizes[own] > 1 {
                out.push((f, S::zero()));
            }
        }
        out
    }

    fn improving_in(&self, v: &View<'_, S>, i: usize) -> Vec<(usize, S)> {
        if !v.improvable[i] {
            return Vec::new();
        }
        let before = &v.utilities[i];
        self.moves_of(v, i)
            .into_iter()
            .filter(|(_, after)| after > before)
            .collect()
    }

    pub fn improving_moves(&self, c: &CoalitionStructure, i: usize) -> Result<Vec<(usize, S)>> {
        let v = self.view(c)?;
        if i >= c.n() {
            return Err(Error::AgentOutOfRange { agent: i, n: c.n() });
        }
        Ok(self.improving_in(&v, i))
    }

    pub fn best_response(&self, c: &CoalitionStructure, i: usize) -> Result<usize> {
        let v = self.view(c)?;
        if i >= c.n() {
            return Err(Error::AgentOutOfRange { agent: i, n: c.n() });
        }
        let mut best = (c.coalition_of(i), v.utilities[i].clone());
        for (j, after) in self.moves_of(&v, i) {
            if after > best.1 {
                best = (j, after);
            }
        }
        Ok(best.0)
    }

    fn nash_in(&self, v: &View<'_, S>) -> Option<DeviationWitness<S>> {
        for i in 0..v.c.n() {
            if let Some((j, after)) = self.improving_in(v, i).into_iter().next() {
                return Some(DeviationWitness {
                    kind: WitnessKind::Unilateral,
                    agents: vec![i],
                    targets: vec![j],
                    before: vec![v.utilities[i].clone()],
                    after: vec![after],
                });
            }
        }
        None
    }

    pub fn nash(&self, c: &CoalitionStructure) -> Result<Stability<S>> {
        let v = self.view(c)?;
        Ok(self.nash_in(&v).into())
    }

    pub fn k_strong(
        &self,
        c: &CoalitionStructure,
        k: usize,
        mode: DeviationMode,
    ) -> Result<Stability<S>> {
        let n = c.n();
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        let v = self.view(c)?;
        Ok(self.strong_in(&v, k, mode, &mut self.budget())?.into())
    }

    pub fn blocking_coalition(
        &self,
        c: &CoalitionStructure,
        mode: BlockingMode,
    ) -> Result<Option<DeviationWitness<S>>> {
        let v = self.view(c)?;
        self.blocking_in(&v, mode, c.n(), &mut self.budget())
    }

    pub fn core(&self, c: &CoalitionStructure) -> Result<Stability<S>> {
        Ok(self.blocking_coalition(c, BlockingMode::Strong)?.into())
    }

    pub fn strict_core(&self, c: &CoalitionStructure) -> Result<Stability<S>> {
        Ok(self.blocking_coalition(c, BlockingMode::Weak)?.into())
    }

    /// Dispatches on `kind`. For strict k-strong checks the cheap
    /// necessary conditions (Nash, no strongly blocking coalition of size
    /// at most k) run first; any witness they return is also a valid k-strong
    /// witness.
    pub fn check(&self, c: &CoalitionStructure, kind: StabilityKind) -> Result<Stability<S>> {
        let v = self.view(c)?;
        let budget = &mut self.budget();
        let witness = match kind {
            StabilityKind::Nash => self.nash_in(&v),
            StabilityKind::Core => self.blocking_in(&v, BlockingMode::Strong, c.n(), budget)?,
            StabilityKind::StrictCore => self.blocking_in(&v, BlockingMode::Weak, c.n(), budget)?,
            StabilityKind::KStrong { k, mode } => {
                let n = c.n();
                let k = k.unwrap_or(n);
                if k == 0 || k > n {
                    return Err(Error::KOutOfRange { k, n });
                }
                if mode == DeviationMode::Strict {
                    if let Some(w) = self.nash_in(&v) {
                        return Ok(Stability::Unstable(w));
                    }
                    if let Some(b) = self.blocking_in(&v, BlockingMode::Strong, k, budget)? {
                        return Ok(Stability::Unstable(as_fresh_deviation(&v, b)));
                    }
                }
                self.strong_in(&v, k, mode, budget)?
            }
        };
        Ok(witness.into())
    }

    fn blocking_in(
        &self,
        v: &View<'_, S>,
        mode: BlockingMode,
        max_size: usize,
        budget: &mut Budget,
    ) -> Result<Option<DeviationWitness<S>>> {
        let pool: Vec<usize> = match mode {
            BlockingMode::Strong => (0..v.c.n()).filter(|&i| v.improvable[i]).collect(),
            BlockingMode::Weak => (0..v.c.n()).collect(),
        };
        for s in 1..=max_size.min(pool.len()) {
            for set in pool.iter().copied().combinations(s) {
                if mode == BlockingMode::Weak && !set.iter().any(|&i| v.improvable[i]) {
                    continue;
                }
                budget.spend()?;
                if let Some(after) = self.blocks(v, &set, mode) {
                    let before = set.iter().map(|&i| v.utilities[i].clone()).collect();
                    return Ok(Some(DeviationWitness {
                        kind: WitnessKind::BlockingCoalition,
                        agents: set.clone(),
                        targets: set,
                        before,
                        after,
                    }));
                }
            }
        }
        Ok(None)
    }

    fn blocks(&self, v: &View<'_, S>, set: &[usize], mode: BlockingMode) -> Option<Vec<S>> {
        let denom = S::from_count(set.len().saturating_sub(1).max(1));
        let mut after = Vec::with_capacity(set.len());
        let mut strict = false;
        for &i in set {
            let mut total = S::zero();
            if set.len() > 1 {
                for &j in set {
                    if j != i {
                        total += self.w(i, j).clone();
                    }
                }
                total /= denom.clone();
            }
            let before = &v.utilities[i];
            match mode {
                BlockingMode::Strong if total <= *before => return None,
                BlockingMode::Weak if total < *before => return None,
                _ => {}
            }
            strict |= total > *before;
            after.push(total);
        }
        strict.then_some(after)
    }

    fn strong_in(
        &self,
        v: &View<'_, S>,
        k: usize,
        mode: DeviationMode,
        budget: &mut Budget,
    ) -> Result<Option<DeviationWitness<S>>> {
        let pool: Vec<usize> = match mode {
            DeviationMode::Strict => (0..v.c.n()).filter(|&i| v.improvable[i]).collect(),
            DeviationMode::Relaxed => (0..v.c.n()).collect(),
        };
        for s in 1..=k.min(pool.len()) {
            for deviators in pool.iter().copied().combinations(s) {
                if mode == DeviationMode::Relaxed && !deviators.iter().any(|&i| v.improvable[i]) {
                    continue;
                }
                let mut search = JointSearch::new(self, v, deviators, mode);
                if let Some(w) = search.descend(0, 0, budget)? {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    }

    fn budget(&self) -> Budget {
        Budget {
            used: 0,
            limit: self.options.guard_limit,
        }
    }
}

/// Counts candidate deviations examined by one check.
struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::GuardExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Rewrites a blocking-coalition witness as the equivalent joint deviation
/// of its members into one new coalition.
fn as_fresh_deviation<S: Scalar>(v: &View<'_, S>, b: DeviationWitness<S>) -> DeviationWitness<S> {
    let n = v.c.n();
    let mut occupied = vec![false; n];
    for (i, &j) in v.c.assignment().iter().enumerate() {
        if !b.agents.contains(&i) {
            occupied[j] = true;
        }
    }
    let target = (0..n)
        .find(|&j| !occupied[j])
        .expect("deviators vacate an index");
    DeviationWitness {
        kind: WitnessKind::Joint,
        targets: vec![target; b.agents.len()],
        agents: b.agents,
        before: b.before,
        after: b.after,
    }
}

/// Backtracking over the destinations of one fixed deviating set.
///
/// Destinations are group keys: `0..targets.len()` are existing coalitions
/// that keep at least one non-deviator (in scan order), the rest are
/// unlabelled new groups opened in first-fit order. A partial assignment is
/// cut as soon as some placed deviator cannot reach the required utility
/// even if every still-unplaced deviator joined it in the most favourable way.
struct JointSearch<'a, 'c, 'g, S> {
    checker: &'a Checker<'g, S>,
    view: &'a View<'c, S>,
    mode: DeviationMode,
    deviators: Vec<usize>,
    targets: Vec<usize>,
    remaining: Vec<usize>,
    /// weight from deviator `a` to the non-deviators left in `targets[t]`
    towards: Vec<Vec<S>>,
    own_target: Vec<Option<usize>>,
    choice: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

impl<'a, 'c, 'g, S: Scalar> JointSearch<'a, 'c, 'g, S> {
    fn new(
        checker: &'a Checker<'g, S>,
        view: &'a View<'c, S>,
        deviators: Vec<usize>,
        mode: DeviationMode,
    ) -> Self {
        let c = view.c;
        let n = c.n();
        let mut deviating = vec![false; n];
        let mut remaining = view.sizes.clone();
        for &i in &deviators {
            deviating[i] = true;
            remaining[c.coalition_of(i)] -= 1;
        }
        let targets: Vec<usize> = view
            .order
            .iter()
            .copied()
            .filter(|&j| remaining[j] > 0)
            .collect();
        let mut slot = vec![usize::MAX; n];
        for (t, &j) in targets.iter().enumerate() {
            slot[j] = t;
        }
        let towards = deviators
            .iter()
            .map(|&i| {
                let mut row = vec![S::zero(); targets.len()];
                for (x, w) in checker.g.neighbors(i) {
                    if !deviating[*x] {
                        row[slot[c.coalition_of(*x)]] += w.clone();
                    }
                }
                row
            })
            .collect();
        let own_target = deviators
            .iter()
            .map(|&i| {
                let s = slot[c.coalition_of(i)];
                (s != usize::MAX).then_some(s)
            })
            .collect();
        let s = deviators.len();
        let groups = vec![Vec::new(); targets.len() + s];
        Self {
            checker,
            view,
            mode,
            choice: vec![0; s],
            deviators,
            targets,
            remaining,
            towards,
            own_target,
            groups,
        }
    }

    fn descend(
        &mut self,
        a: usize,
        fresh_used: usize,
        budget: &mut Budget,
    ) -> Result<Option<DeviationWitness<S>>> {
        let s = self.deviators.len();
        if a == s {
            return Ok(self.evaluate());
        }
        let existing = self.targets.len();
        for key in 0..existing + fresh_used + 1 {
            if self.own_target[a] == Some(key) {
                continue;
            }
            budget.spend()?;
            self.choice[a] = key;
            self.groups[key].push(a);
            if self.feasible(key, a) {
                let next = if key >= existing {
                    fresh_used.max(key - existing + 1)
                } else {
                    fresh_used
                };
                if let Some(w) = self.descend(a + 1, next, budget)? {
                    return Ok(Some(w));
                }
            }
            self.groups[key].pop();
        }
        Ok(None)
    }

    /// Numerator and denominator of `m`'s utility in group `key` as it
    /// currently stands.
    fn current(&self, key: usize, m: usize) -> (S, usize) {
        let me = self.deviators[m];
        let (mut total, others) = match self.targets.get(key) {
            Some(&j) => (self.towards[m][key].clone(), self.remaining[j]),
            None => (S::zero(), 0),
        };
        for &b in &self.groups[key] {
            if b != m {
                total += self.checker.w(me, self.deviators[b]).clone();
            }
        }
        (total, others + self.groups[key].len() - 1)
    }

    fn acceptable(&self, value: &S, m: usize) -> bool {
        let before = &self.view.utilities[self.deviators[m]];
        match self.mode {
            DeviationMode::Strict => value > before,
            DeviationMode::Relaxed => value >= before,
        }
    }

    fn feasible(&self, key: usize, a: usize) -> bool {
        self.groups[key].iter().all(|&m| {
            let (mut total, mut others) = self.current(key, m);
            let mut best = ratio(&total, others);
            let me = self.deviators[m];
            let mut future: Vec<S> = (a + 1..self.deviators.len())
                .map(|b| self.checker.w(me, self.deviators[b]).clone())
                .collect();
            future.sort_by(|x, y| y.partial_cmp(x).expect("comparable weights"));
            for w in future {
                total += w;
                others += 1;
                let r = ratio(&total, others);
                if r > best {
                    best = r;
                }
            }
            self.acceptable(&best, m)
        })
    }

    fn evaluate(&self) -> Option<DeviationWitness<S>> {
        let mut after = Vec::with_capacity(self.deviators.len());
        let mut strict = false;
        for (m, &key) in self.choice.iter().enumerate() {
            let (total, others) = self.current(key, m);
            let utility = ratio(&total, others);
            if !self.acceptable(&utility, m) {
                return None;
            }
            strict |= utility > self.view.utilities[self.deviators[m]];
            after.push(utility);
        }
        strict.then(|| self.witness(after))
    }

    fn witness(&self, after: Vec<S>) -> DeviationWitness<S> {
        let n = self.view.c.n();
        let mut occupied = vec![false; n];
        for &j in &self.targets {
            occupied[j] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&j| !occupied[j]).collect();
        let targets = self
            .choice
            .iter()
            .map(|&key| match self.targets.get(key) {
                Some(&j) => j,
                None => free[key - self.targets.len()],
            })
            .collect();
        DeviationWitness {
            kind: if self.deviators.len() == 1 {
                WitnessKind::Unilateral
            } else {
                WitnessKind::Joint
            },
            agents: self.deviators.clone(),
            targets,
            before: self
                .deviators
                .iter()
                .map(|&i| self.view.utilities[i].clone())
                .collect(),
            after,
        }
    }
}

fn ratio<S: Scalar>(total: &S, others: usize) -> S {
    if others == 0 {
        S::zero()
    } else {
        total.clone() / S::from_count(others)
    }
}

/// Improving unilateral moves of `i`: `(target index, new utility)`.
pub fn improving_moves<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    i: usize,
) -> Result<Vec<(usize, S)>> {
    Checker::new(g).improving_moves(c, i)
}

/// Utility-maximizing target for `i`; keeps the current coalition on ties.
pub fn best_response<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    i: usize,
) -> Result<usize> {
    Checker::new(g).best_response(c, i)
}

pub fn is_nash<S: Scalar>(g: &WeightedGraph<S>, c: &CoalitionStructure) -> Result<Stability<S>> {
    Checker::new(g).nash(c)
}

/// No group of at most `k` agents has a joint deviation that is improving
/// under `mode`.
pub fn is_k_strong<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    k: usize,
    mode: DeviationMode,
    options: CheckOptions,
) -> Result<Stability<S>> {
    Checker::with_options(g, options).k_strong(c, k, mode)
}

pub fn find_blocking_coalition<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    mode: BlockingMode,
    options: CheckOptions,
) -> Result<Option<DeviationWitness<S>>> {
    Checker::with_options(g, options).blocking_coalition(c, mode)
}

pub fn is_core<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    options: CheckOptions,
) -> Result<Stability<S>> {
    Checker::with_options(g, options).core(c)
}

pub fn is_strict_core<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
    options: CheckOptions,
) -> Result<Stability<S>> {
    Checker::with_options(g, options).strict_core(c)
}
