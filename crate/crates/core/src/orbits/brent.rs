/// How an orbit ends, as seen by [`brent`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitOutcome<S> {
    /// The target appears first at step `depth`.
    ReachedTarget { depth: u64 },
    /// The orbit settles on a cycle that avoids the target: `tail` steps to
    /// reach it, period `cycle_len`, and `witness` is the first point on it.
    EnteredCycle { tail: u64, cycle_len: u64, witness: S },
    /// Neither happened within `steps` map evaluations.
    BudgetExhausted { steps: u64 },
}

impl<S> OrbitOutcome<S> {
    pub fn depth(&self) -> Option<u64> {
        match self {
            OrbitOutcome::ReachedTarget { depth } => Some(*depth),
            _ => None,
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, OrbitOutcome::EnteredCycle { .. })
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, OrbitOutcome::BudgetExhausted { .. })
    }
}

/// Follow `start` under `step`, reporting the first visit to `target` or the
/// exact rho shape `(μ, λ)` of the orbit.
///
/// Brent's power-of-two scheme keeps two states in memory. Every new state is
/// compared against `target` before the cycle test, so a fixed-point target
/// is reported as reached, never as a 1-cycle. `budget` caps the number of
/// `step` calls in the detection phase; locating `μ` afterwards costs at most
/// another `μ + λ` calls on top.
pub fn brent<S, F>(start: S, target: Option<&S>, mut step: F, budget: u64) -> OrbitOutcome<S>
where
    S: Clone + PartialEq,
    F: FnMut(&S) -> S,
{
    if target == Some(&start) {
        return OrbitOutcome::ReachedTarget { depth: 0 };
    }
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = start.clone();
    let mut hare = step(&start);
    let mut steps = 1u64;
    loop {
        if target == Some(&hare) {
            return OrbitOutcome::ReachedTarget { depth: steps };
        }
        if hare == tortoise {
            break;
        }
        if steps >= budget {
            return OrbitOutcome::BudgetExhausted { steps };
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        steps += 1;
        lam += 1;
    }

    let mut tortoise = start.clone();
    let mut hare = start;
    for _ in 0..lam {
        hare = step(&hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        mu += 1;
    }
    OrbitOutcome::EnteredCycle {
        tail: mu,
        cycle_len: lam,
        witness: tortoise,
    }
}

/// Reference implementation that remembers every visited state.
pub fn naive_rho<S, F>(start: S, mut step: F, budget: u64) -> Option<(u64, u64)>
where
    S: Clone + Eq + std::hash::Hash,
    F: FnMut(&S) -> S,
{
    let mut seen = std::collections::HashMap::new();
    let mut cur = start;
    for i in 0..=budget {
        if let Some(&first) = seen.get(&cur) {
            return Some((first, i - first));
        }
        seen.insert(cur.clone(), i);
        cur = step(&cur);
    }
    None
}
