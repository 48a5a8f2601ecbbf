// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Seeded Monte-Carlo sweeps over random multi-agent layouts.
//!
//! Scenario 1 compares the cost increase of rank-1 and sparse designs with
//! matched communication; scenarios 2 and 3 perturb the same designs with
//! channel noise and link removals; scenario 4 matches the sparse design's
//! busiest agent to the low-rank broadcast budget.

pub mod config;
pub mod designs;
pub mod report;

use std::time::Instant;

use lqrlr_core::is_stabilizing;
use lqrlr_core::network::{perturb_offdiag_noise, remove_links, LinkMetric, STATES_PER_AGENT};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{AdmmSettings, NoiseMode, ScenarioConfig};
pub use designs::{sub_seed, Design, DesignSpec, DesignStatus, Family, Harness};
pub use report::{aggregate, Aggregate, RunManifest, ScenarioReport, SweepValue, Timing, TrialRow};

use crate::modelfile::FieldError;

const NOISE_TAG: u64 = 0x4e4f_4953_45;
const ATTACK_TAG: u64 = 0x4154_5441_434b;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] FieldError),
    #[error("trial agents={agents} trial={trial}: {source}")]
    Trial {
        agents: usize,
        trial: usize,
        source: lqrlr_core::Error,
    },
    #[error("harness was built for different design settings")]
    HarnessMismatch,
}

type Outcome<T> = Result<T, ScenarioError>;

fn trial_err(agents: usize, trial: usize) -> impl Fn(lqrlr_core::Error) -> ScenarioError {
    move |source| ScenarioError::Trial { agents, trial, source }
}

/// Designs compared in scenarios 1 to 3: rank-1 broadcast against a sparse
/// gain with as many links as the broadcast sends numbers.
fn matched_specs(agents: usize) -> [DesignSpec; 3] {
    [
        DesignSpec::Standard,
        DesignSpec::LowRank { rank: 1 },
        DesignSpec::Sparse {
            metric: LinkMetric::OffBlockEntries,
            target: STATES_PER_AGENT * agents,
        },
    ]
}

/// Runs `config` with a fresh harness.
pub fn run_scenario(config: &ScenarioConfig, on_point: impl FnMut(&Timing)) -> Outcome<ScenarioReport> {
    let harness = Harness::new(config.design_settings());
    run_scenario_with(config, &harness, on_point)
}

/// Runs `config`, reusing designs cached in `harness`. `on_point` sees the
/// timing of every finished sweep point.
pub fn run_scenario_with(
    config: &ScenarioConfig,
    harness: &Harness,
    mut on_point: impl FnMut(&Timing),
) -> Outcome<ScenarioReport> {
    config.validate()?;
    if harness.settings() != &config.design_settings() {
        return Err(ScenarioError::HarnessMismatch);
    }
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut timed = |point: String, start: Instant, timings: &mut Vec<Timing>| {
        let t = Timing {
            point,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_point(&t);
        timings.push(t);
    };
    let trials: Vec<usize> = (0..config.trials_outer).collect();

    for &agents in &config.agent_counts {
        match config.scenario {
            1 => {
                let start = Instant::now();
                let mut specs = matched_specs(agents).to_vec();
                if config.control_row {
                    specs.push(DesignSpec::Control);
                }
                let per_trial = trials
                    .par_iter()
                    .map(|&trial| design_rows(config, harness, agents, trial, SweepValue::None, &specs))
                    .collect::<Outcome<Vec<_>>>()?;
                rows.extend(per_trial.into_iter().flatten());
                timed(format!("agents={agents}"), start, &mut timings);
            }
            2 | 3 => {
                let start = Instant::now();
                let specs = matched_specs(agents);
                let designs = trials
                    .par_iter()
                    .map(|&trial| {
                        let inst = harness.instance(agents, trial).map_err(trial_err(agents, trial))?;
                        let ds = specs
                            .iter()
                            .map(|&s| harness.design(agents, trial, s))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(trial_err(agents, trial))?;
                        Ok((inst, ds))
                    })
                    .collect::<Outcome<Vec<_>>>()?;
                timed(format!("agents={agents} designs"), start, &mut timings);

                let sweep: Vec<SweepValue> = if config.scenario == 2 {
                    config.noise_variances.iter().map(|&v| SweepValue::Sigma2(v)).collect()
                } else {
                    config.attack_counts.iter().map(|&l| SweepValue::Attacks(l)).collect()
                };
                for point in sweep {
                    let start = Instant::now();
                    let cell = designs
                        .par_iter()
                        .map(|(inst, ds)| {
                            ds.iter()
                                .map(|d| {
                                    let mut row = TrialRow::new(
                                        config.scenario,
                                        point,
                                        inst.trial,
                                        inst.layout_seed,
                                        agents,
                                        d,
                                    );
                                    if d.usable() {
                                        row.robustness = Some(
                                            perturb(config, inst, d, point)
                                                .map_err(trial_err(agents, inst.trial))?,
                                        );
                                    }
                                    Ok(row)
                                })
                                .collect::<Outcome<Vec<_>>>()
                        })
                        .collect::<Outcome<Vec<_>>>()?;
                    rows.extend(cell.into_iter().flatten());
                    let label = match point {
                        SweepValue::Sigma2(v) => format!("agents={agents} sigma2={v}"),
                        SweepValue::Attacks(l) => format!("agents={agents} attacks={l}"),
                        _ => unreachable!(),
                    };
                    timed(label, start, &mut timings);
                }
            }
            4 => {
                for &rank in &config.rank_sweep {
                    let start = Instant::now();
                    let specs = [
                        DesignSpec::LowRank { rank },
                        // A rank-r broadcast costs each agent 2r sends; a
                        // unicast agent with r receivers costs the same.
                        DesignSpec::Sparse {
                            metric: LinkMetric::CriticalNode,
                            target: rank,
                        },
                    ];
                    let per_trial = trials
                        .par_iter()
                        .map(|&trial| {
                            let mut rs =
                                design_rows(config, harness, agents, trial, SweepValue::Rank(rank), &specs)?;
                            let low = rs[0].cost_ratio.map(|_| rs[0].cost);
                            for r in &mut rs {
                                r.relative_cost = match (r.cost_ratio, low) {
                                    (Some(_), Some(low)) => Some(r.cost / low),
                                    _ => None,
                                };
                            }
                            Ok(rs)
                        })
                        .collect::<Outcome<Vec<_>>>()?;
                    rows.extend(per_trial.into_iter().flatten());
                    timed(format!("agents={agents} rank={rank}"), start, &mut timings);
                }
            }
            _ => unreachable!("validated"),
        }
    }

    let aggregates = aggregate(&rows);
    Ok(ScenarioReport {
        config: config.clone(),
        rows,
        aggregates,
        timings,
    })
}

fn design_rows(
    config: &ScenarioConfig,
    harness: &Harness,
    agents: usize,
    trial: usize,
    sweep: SweepValue,
    specs: &[DesignSpec],
) -> Outcome<Vec<TrialRow>> {
    let inst = harness.instance(agents, trial).map_err(trial_err(agents, trial))?;
    specs
        .iter()
        .map(|&spec| {
            let d = harness.design(agents, trial, spec).map_err(trial_err(agents, trial))?;
            Ok(TrialRow::new(config.scenario, sweep, trial, inst.layout_seed, agents, &d))
        })
        .collect()
}

/// Replays `trials_inner` noise draws or link removals on one design.
fn perturb(
    config: &ScenarioConfig,
    inst: &designs::Instance,
    d: &Design,
    point: SweepValue,
) -> lqrlr_core::Result<report::Robustness> {
    let family = d.spec.family() as u64;
    let (tag, value) = match point {
        SweepValue::Sigma2(v) => (NOISE_TAG, v.to_bits()),
        SweepValue::Attacks(l) => (ATTACK_TAG, l as u64),
        _ => unreachable!("only scenarios 2 and 3 perturb"),
    };
    let seed = sub_seed(config.seed, &[tag, inst.agents as u64, value, inst.trial as u64, family]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    let mut shortfall = 0;
    for _ in 0..config.trials_inner {
        let k = match point {
            SweepValue::Sigma2(v) => perturb_offdiag_noise(
                &d.gain,
                &inst.structure,
                v.sqrt(),
                config.noise_targets(d.link_tol),
                &mut rng,
            )?,
            SweepValue::Attacks(l) => {
                let cut = remove_links(&d.gain, &inst.structure, l, d.link_tol, &mut rng);
                shortfall += cut.shortfall;
                cut.k
            }
            _ => unreachable!(),
        };
        if is_stabilizing(&inst.model, &k)? {
            successes += 1;
        }
    }
    Ok(report::Robustness {
        inner_trials: config.trials_inner,
        successes,
        shortfall,
    })
}
