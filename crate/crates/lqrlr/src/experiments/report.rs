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


use serde::Serialize;

use crate::experiments::config::ScenarioConfig;
use crate::experiments::designs::{Design, Family};
use crate::format::{num, opt_num, to_json};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    None,
    Sigma2(f64),
    Attacks(usize),
    Rank(usize),
}

impl SweepValue {
    pub fn name(self) -> &'static str {
        match self {
            SweepValue::None => "none",
            SweepValue::Sigma2(_) => "sigma2",
            SweepValue::Attacks(_) => "attacks",
            SweepValue::Rank(_) => "rank",
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            SweepValue::None => None,
            SweepValue::Sigma2(v) => Some(v),
            SweepValue::Attacks(l) => Some(l as f64),
            SweepValue::Rank(r) => Some(r as f64),
        }
    }

    fn cell(self) -> String {
        match self {
            SweepValue::None => String::new(),
            SweepValue::Sigma2(v) => num(v),
            SweepValue::Attacks(v) | SweepValue::Rank(v) => v.to_string(),
        }
    }
}

/// Bernoulli outcome of perturbing one design `inner_trials` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Robustness {
    pub inner_trials: usize,
    pub successes: usize,
    /// Requested link removals that found nothing left to remove.
    pub shortfall: usize,
}

/// One design of one trial.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub scenario: u8,
    pub agents: usize,
    pub sweep: SweepValue,
    pub trial: usize,
    pub layout_seed: u64,
    pub family: Family,
    pub status: &'static str,
    pub iterations: usize,
    pub gamma: Option<f64>,
    pub cost: f64,
    pub standard_cost: f64,
    pub cost_ratio: Option<f64>,
    /// Cost over the same trial's low-rank cost (scenario 4).
    pub relative_cost: Option<f64>,
    pub off_block_entries: usize,
    pub total_links: usize,
    pub critical_node_links: usize,
    pub transmissions: usize,
    pub robustness: Option<Robustness>,
}

impl TrialRow {
    pub fn new(scenario: u8, sweep: SweepValue, trial: usize, layout_seed: u64, agents: usize, d: &Design) -> Self {
        Self {
            scenario,
            agents,
            sweep,
            trial,
            layout_seed,
            family: d.spec.family(),
            status: d.status.name(),
            iterations: d.iterations,
            gamma: d.gamma,
            cost: d.cost,
            standard_cost: d.standard_cost,
            cost_ratio: d.usable().then(|| d.cost_ratio()),
            relative_cost: None,
            off_block_entries: d.links.off_block_entries,
            total_links: d.links.total_links,
            critical_node_links: d.links.critical_node_links(),
            transmissions: d.transmissions,
            robustness: None,
        }
    }

    pub fn usable(&self) -> bool {
        self.cost_ratio.is_some()
    }
}

pub const CSV_HEADER: [&str; 21] = [
    "scenario",
    "agents",
    "sweep",
    "sweep_value",
    "trial",
    "layout_seed",
    "family",
    "status",
    "iterations",
    "gamma",
    "cost",
    "standard_cost",
    "cost_ratio",
    "relative_cost",
    "off_block_entries",
    "total_links",
    "critical_node_links",
    "transmissions",
    "inner_trials",
    "success_count",
    "shortfall",
];

pub fn write_csv(rows: &[TrialRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let rb = r.robustness;
        let record = [
            r.scenario.to_string(),
            r.agents.to_string(),
            r.sweep.name().to_string(),
            r.sweep.cell(),
            r.trial.to_string(),
            r.layout_seed.to_string(),
            r.family.name().to_string(),
            r.status.to_string(),
            r.iterations.to_string(),
            opt_num(r.gamma),
            num(r.cost),
            num(r.standard_cost),
            opt_num(r.cost_ratio),
            opt_num(r.relative_cost),
            r.off_block_entries.to_string(),
            r.total_links.to_string(),
            r.critical_node_links.to_string(),
            r.transmissions.to_string(),
            rb.map(|b| b.inner_trials.to_string()).unwrap_or_default(),
            rb.map(|b| b.successes.to_string()).unwrap_or_default(),
            rb.map(|b| b.shortfall.to_string()).unwrap_or_default(),
        ];
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of ASCII fields")
}

/// Summary of the rows sharing `(agents, sweep value, family)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub agents: usize,
    pub sweep: &'static str,
    pub sweep_value: Option<f64>,
    pub family: &'static str,
    pub designs: usize,
    /// Designs with a stabilizing gain; only these enter the statistics.
    pub usable: usize,
    pub mean_cost_ratio: Option<f64>,
    pub min_cost_ratio: Option<f64>,
    pub max_cost_ratio: Option<f64>,
    pub mean_off_block_entries: Option<f64>,
    pub mean_total_links: Option<f64>,
    pub mean_critical_node_links: Option<f64>,
    pub mean_transmissions: Option<f64>,
    pub samples: Option<usize>,
    pub successes: Option<usize>,
    pub success_probability: Option<f64>,
    pub median_relative_cost: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Groups in order of first appearance.
pub fn aggregate(rows: &[TrialRow]) -> Vec<Aggregate> {
    let mut keys: Vec<(usize, Option<u64>, Family)> = Vec::new();
    for r in rows {
        let key = (r.agents, r.sweep.value().map(f64::to_bits), r.family);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|key| {
            let group: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| (r.agents, r.sweep.value().map(f64::to_bits), r.family) == key)
                .collect();
            let usable: Vec<&&TrialRow> = group.iter().filter(|r| r.usable()).collect();
            let field = |f: fn(&TrialRow) -> f64| -> Vec<f64> { usable.iter().map(|r| f(r)).collect() };
            let ratios = field(|r| r.cost_ratio.expect("usable"));
            let robust: Vec<Robustness> = usable.iter().filter_map(|r| r.robustness).collect();
            let (samples, successes) = if robust.is_empty() {
                (None, None)
            } else {
                (
                    Some(robust.iter().map(|b| b.inner_trials).sum::<usize>()),
                    Some(robust.iter().map(|b| b.successes).sum::<usize>()),
                )
            };
            let relative: Vec<f64> = usable.iter().filter_map(|r| r.relative_cost).collect();
            Aggregate {
                agents: key.0,
                sweep: group[0].sweep.name(),
                sweep_value: group[0].sweep.value(),
                family: key.2.name(),
                designs: group.len(),
                usable: usable.len(),
                mean_cost_ratio: mean(&ratios),
                min_cost_ratio: ratios.iter().copied().reduce(f64::min),
                max_cost_ratio: ratios.iter().copied().reduce(f64::max),
                mean_off_block_entries: mean(&field(|r| r.off_block_entries as f64)),
                mean_total_links: mean(&field(|r| r.total_links as f64)),
                mean_critical_node_links: mean(&field(|r| r.critical_node_links as f64)),
                mean_transmissions: mean(&field(|r| r.transmissions as f64)),
                samples,
                successes,
                success_probability: match (samples, successes) {
                    (Some(n), Some(k)) if n > 0 => Some(k as f64 / n as f64),
                    _ => None,
                },
                median_relative_cost: median(&relative),
            }
        })
        .collect()
}

/// Wall-clock time of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub point: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<Aggregate>,
    pub timings: Vec<Timing>,
}

/// Everything needed to reproduce a document.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

#[derive(Serialize)]
struct TimingHeader<'a> {
    total_seconds: f64,
    points: &'a [Timing],
}

#[derive(Serialize)]
struct AggregateDoc<'a> {
    /// Wall-clock data; the only part that changes between replays.
    timing: TimingHeader<'a>,
    manifest: RunManifest,
    aggregates: &'a [Aggregate],
}

impl ScenarioReport {
    pub fn csv(&self) -> String {
        write_csv(&self.rows)
    }

    pub fn json(&self) -> String {
        to_json(&AggregateDoc {
            timing: TimingHeader {
                total_seconds: self.timings.iter().map(|t| t.seconds).sum(),
                points: &self.timings,
            },
            manifest: RunManifest::new(&self.config),
            aggregates: &self.aggregates,
        })
    }

    pub fn aggregates_for(&self, family: Family) -> impl Iterator<Item = &Aggregate> {
        self.aggregates.iter().filter(move |a| a.family == family.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn csv_header_and_line_endings() {
        let text = write_csv(&[]);
        assert_eq!(text, CSV_HEADER.join(",") + "\n");
    }
}
