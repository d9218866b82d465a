use serde::Serialize;

use super::scenario::{ConfigError, Scenario};
use super::workload::generate_tasks;
use crate::offload::{commit, plan_offload, DelayBreakdown, NetworkState, OffloadPlan, PlanError, Scheme, Task};

/// A task together with the plan it was served by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub task: Task,
    pub plan: OffloadPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub num_tasks: usize,
    /// Ids of tasks that could not reach their destination.
    pub dropped: Vec<u64>,
    pub mean_delay_s: f64,
    pub mean_breakdown: DelayBreakdown,
    pub records: Vec<TaskRecord>,
}

impl MetricsReport {
    fn new(scheme: Scheme, seed: u64, num_tasks: usize, records: Vec<TaskRecord>, dropped: Vec<u64>) -> Self {
        let n = records.len();
        let (mut total, mut b) = (0.0, DelayBreakdown::default());
        for r in &records {
            total += r.plan.overall_delay_s;
            b.isl_tx_s += r.plan.breakdown.isl_tx_s;
            b.sgl_tx_s += r.plan.breakdown.sgl_tx_s;
            b.compute_s += r.plan.breakdown.compute_s;
        }
        let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
        Self {
            scheme,
            seed,
            num_tasks,
            dropped,
            mean_delay_s: mean(total),
            mean_breakdown: DelayBreakdown {
                isl_tx_s: mean(b.isl_tx_s),
                sgl_tx_s: mean(b.sgl_tx_s),
                compute_s: mean(b.compute_s),
            },
            records,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Greedy in-order planner: each task is planned on the reservations left
/// by the tasks before it, then its own reservations are committed.
#[derive(Debug, Clone)]
pub struct Simulation {
    net: NetworkState,
    scheme: Scheme,
    seed: u64,
    tasks: Vec<Task>,
    next: usize,
    records: Vec<TaskRecord>,
    dropped: Vec<u64>,
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        Ok(Self::with_tasks(scenario, generate_tasks(scenario)))
    }

    /// A simulation over an explicit task list, which must be sorted by
    /// generation time.
    pub fn with_tasks(scenario: &Scenario, tasks: Vec<Task>) -> Self {
        Self {
            net: NetworkState::new(scenario.network_params(), scenario.ground_nodes()),
            scheme: scenario.simulation.scheme,
            seed: scenario.simulation.seed,
            tasks,
            next: 0,
            records: Vec::new(),
            dropped: Vec::new(),
        }
    }

    pub fn network(&self) -> &NetworkState {
        &self.net
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn records(&self) -> &[TaskRecord] {
        &self.records
    }

    /// Plans and commits the next task. Returns `Ok(None)` when all tasks
    /// are done; unreachable tasks are recorded as dropped.
    pub fn step(&mut self) -> Result<Option<&TaskRecord>, SimError> {
        while let Some(task) = self.tasks.get(self.next).cloned() {
            self.next += 1;
            task.validate(self.net.ground_sites().len())
                .map_err(|e| ConfigError { key: "workload".into(), reason: e.to_string() })?;
            match plan_offload(&self.net, &task, self.scheme) {
                Ok(plan) => {
                    commit(&mut self.net, &plan)?;
                    self.records.push(TaskRecord { task, plan });
                    return Ok(self.records.last());
                }
                Err(PlanError::Unreachable(id)) => self.dropped.push(id),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(None)
    }

    pub fn finish(mut self) -> Result<MetricsReport, SimError> {
        while self.step()?.is_some() {}
        Ok(MetricsReport::new(self.scheme, self.seed, self.tasks.len(), self.records, self.dropped))
    }
}

/// Runs one scenario to completion.
pub fn run(scenario: &Scenario) -> Result<MetricsReport, SimError> {
    Simulation::new(scenario)?.finish()
}
