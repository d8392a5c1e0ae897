//! Improvement dynamics with exact cycle detection, and the singleton
//! congestion dynamics used by the strong-equilibrium construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{apply_move, check_compatible};
use crate::graph::WeightedGraph;
use crate::scalar::{text, Scalar};
use crate::stability::Checker;
use crate::structure::CoalitionStructure;

/// One scripted move. Without a target the agent plays its best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedMove {
    pub agent: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

impl ScriptedMove {
    pub fn best_response(agent: usize) -> Self {
        Self {
            agent,
            target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheduler {
    /// lowest-id agent with an improving move takes its first one
    FirstImprove,
    /// lowest-id agent with an improving move plays a best response
    BestResponse,
    Scripted(Vec<ScriptedMove>),
    /// uniformly random improving move, reproducible from the seed
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct Step<S> {
    pub agent: usize,
    pub from: usize,
    pub to: usize,
    #[serde(serialize_with = "text::serialize")]
    pub before: S,
    #[serde(serialize_with = "text::serialize")]
    pub after: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "terminal", rename_all = "kebab-case")]
pub enum Terminal {
    /// no agent has an improving move
    Converged {
        structure: CoalitionStructure,
    },
    /// the structure after `first_repeat_step + cycle_length` moves equals
    /// the one after `first_repeat_step` moves
    CycleDetected {
        first_repeat_step: usize,
        cycle_length: usize,
    },
    StepCapReached,
    /// the script ran out while improving moves remained
    ScriptExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace<S> {
    pub initial: CoalitionStructure,
    pub steps: Vec<Step<S>>,
    pub terminal: Terminal,
    pub last: CoalitionStructure,
}

#[derive(Serialize)]
struct TerminalRecord<'a> {
    #[serde(flatten)]
    terminal: &'a Terminal,
    steps: usize,
    last: &'a CoalitionStructure,
}

#[derive(Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
struct StepRecord<'a, S> {
    step: usize,
    #[serde(flatten)]
    inner: &'a Step<S>,
}

impl<S: Scalar> DynamicsTrace<S> {
    /// One JSON object per step, then a terminal record.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (t, step) in self.steps.iter().enumerate() {
            let record = StepRecord {
                step: t,
                inner: step,
            };
            out.push_str(&serde_json::to_string(&record).expect("step serializes"));
            out.push('\n');
        }
        let record = TerminalRecord {
            terminal: &self.terminal,
            steps: self.steps.len(),
            last: &self.last,
        };
        out.push_str(&serde_json::to_string(&record).expect("terminal serializes"));
        out.push('\n');
        out
    }
}

/// Runs improving moves from `initial` until convergence, a repeated
/// structure, or `max_steps` moves.
///
/// Scripted moves must be improving when taken; a non-improving one is an
/// error naming the step, even when the structure is already stable.
pub fn run_dynamics<S: Scalar>(
    g: &WeightedGraph<S>,
    initial: &CoalitionStructure,
    scheduler: &Scheduler,
    max_steps: usize,
) -> Result<DynamicsTrace<S>> {
    check_compatible(g, initial)?;
    let checker = Checker::new(g);
    let mut rng = match scheduler {
        Scheduler::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut current = initial.clone();
    let mut steps: Vec<Step<S>> = Vec::new();
    let mut seen: HashMap<CoalitionStructure, usize> = HashMap::new();
    seen.insert(current.clone(), 0);

    let terminal = loop {
        let movers: Vec<(usize, Vec<(usize, S)>)> = (0..g.n())
            .map(|i| Ok((i, checker.improving_moves(&current, i)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, m)| !m.is_empty())
            .collect();
        let scripted_left = matches!(scheduler, Scheduler::Scripted(s) if s.len() > steps.len());
        if movers.is_empty() && !scripted_left {
            break Terminal::Converged {
                structure: current.clone(),
            };
        }
        if steps.len() >= max_steps {
            break Terminal::StepCapReached;
        }
        let t = steps.len();
        let (agent, to, after) = match scheduler {
            Scheduler::FirstImprove => {
                let (i, moves) = &movers[0];
                (*i, moves[0].0, moves[0].1.clone())
            }
            Scheduler::BestResponse => {
                let (i, moves) = &movers[0];
                let j = checker.best_response(&current, *i)?;
                let after = moves
                    .iter()
                    .find(|m| m.0 == j)
                    .expect("best response improves")
                    .1
                    .clone();
                (*i, j, after)
            }
            Scheduler::Random { .. } => {
                let rng = rng.as_mut().expect("seeded");
                let (i, moves) = movers.choose(rng).expect("non-empty");
                let (j, after) = moves.choose(rng).expect("non-empty");
                (*i, *j, after.clone())
            }
            Scheduler::Scripted(script) => {
                let Some(mv) = script.get(t) else {
                    break Terminal::ScriptExhausted;
                };
                if mv.agent >= g.n() {
                    return Err(Error::AgentOutOfRange {
                        agent: mv.agent,
                        n: g.n(),
                    });
                }
                let j = match mv.target {
                    Some(j) => j,
                    None => checker.best_response(&current, mv.agent)?,
                };
                if j >= g.n() {
                    return Err(Error::IndexOutOfRange { index: j, n: g.n() });
                }
                // every empty index means the same thing: a new coalition
                let key = if current.assignment().contains(&j) {
                    j
                } else {
                    current.first_empty_index().expect("j is empty")
                };
                let improving = movers
                    .iter()
                    .find(|(i, _)| *i == mv.agent)
                    .and_then(|(_, moves)| moves.iter().find(|m| m.0 == key).cloned());
                match improving {
                    Some((_, after)) => (mv.agent, j, after),
                    None => {
                        return Err(Error::NonImprovingMove {
                            step: t,
                            message: format!(
                                "agent {} cannot improve by moving to coalition {j}",
                                mv.agent
                            ),
                        })
                    }
                }
            }
        };
        let from = current.coalition_of(agent);
        let before = crate::game::utility(g, &current, agent)?;
        current = apply_move(&current, agent, to)?;
        steps.push(Step {
            agent,
            from,
            to,
            before,
            after,
        });
        if let Some(&first) = seen.get(&current) {
            break Terminal::CycleDetected {
                first_repeat_step: first,
                cycle_length: steps.len() - first,
            };
        }
        seen.insert(current.clone(), steps.len());
    };

    Ok(DynamicsTrace {
        initial: initial.clone(),
        steps,
        terminal,
        last: current,
    })
}

/// Singleton congestion dynamics: each leftover picks one allowed anchor and
/// pays the number of leftovers sharing it.
///
/// Starts with every leftover on its lowest allowed anchor, then repeatedly
/// lets leftovers (in id order) switch to the least-loaded allowed anchor
/// (lowest id on ties) whenever that strictly lowers their load. Returns the
/// resulting `leftover -> anchor` map, which admits no improving switch.
pub fn residual_congestion_dynamics(
    anchors: &[usize],
    allowed: &BTreeMap<usize, Vec<usize>>,
) -> Result<BTreeMap<usize, usize>> {
    let mut start = BTreeMap::new();
    for (&x, options) in allowed {
        start.insert(x, *options.iter().min().ok_or(Error::EmptyAllowedSet(x))?);
    }
    residual_congestion_dynamics_from(anchors, allowed, &start)
}

/// [`residual_congestion_dynamics`] from a given assignment. Improving
/// switches never empty an anchor, so anchors loaded at the start stay
/// loaded.
pub fn residual_congestion_dynamics_from(
    anchors: &[usize],
    allowed: &BTreeMap<usize, Vec<usize>>,
    start: &BTreeMap<usize, usize>,
) -> Result<BTreeMap<usize, usize>> {
    let anchor_set: BTreeSet<usize> = anchors.iter().copied().collect();
    let mut load: BTreeMap<usize, usize> = anchor_set.iter().map(|&a| (a, 0)).collect();
    for (&x, options) in allowed {
        if options.is_empty() {
            return Err(Error::EmptyAllowedSet(x));
        }
        if let Some(bad) = options.iter().find(|a| !anchor_set.contains(a)) {
            return Err(Error::InvalidParams(format!(
                "agent {x} lists {bad}, which is not an anchor"
            )));
        }
        match start.get(&x) {
            Some(a) if options.contains(a) => *load.get_mut(a).expect("anchor") += 1,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "agent {x} does not start on an allowed anchor"
                )))
            }
        }
    }
    let mut choice: BTreeMap<usize, usize> = allowed.keys().map(|x| (*x, start[x])).collect();
    loop {
        let mut moved = false;
        for (&x, options) in allowed {
            let current = choice[&x];
            let best = options
                .iter()
                .copied()
                .filter(|&a| a != current)
                .min_by_key(|&a| (load[&a], a));
            if let Some(b) = best {
                if load[&b] + 1 < load[&current] {
                    *load.get_mut(&current).expect("anchor") -= 1;
                    *load.get_mut(&b).expect("anchor") += 1;
                    choice.insert(x, b);
                    moved = true;
                }
            }
        }
        if !moved {
            return Ok(choice);
        }
    }
}
