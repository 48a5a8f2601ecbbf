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


use lqrlr_core::admm::{AdmmConfig, BlockStructure};
use lqrlr_core::lqr::solve_standard_lqr;
use lqrlr_core::network::*;
use lqrlr_core::Matrix;

fn coupled(agents: usize, seed: u64) -> (lqrlr_core::StateSpaceModel, BlockStructure) {
    build_coupled_model(&generate_layout(agents, DEFAULT_EXTENT, seed).unwrap(), CouplingSign::Decaying).unwrap()
}

#[test]
fn model_dimensions_and_local_blocks() {
    let (model, s) = coupled(4, 9);
    assert_eq!((model.n(), model.m(), model.l()), (8, 4, 4));
    for i in 0..4 {
        assert_eq!(model.a().submatrix(2 * i, 2 * i, 2, 2), Matrix::from_rows(&[[1.0, 1.0], [1.0, 3.0]]));
        let col = model.b1().column(i);
        for (row, v) in col.iter().enumerate() {
            assert_eq!(*v, if row == 2 * i + 1 { 1.0 } else { 0.0 });
        }
    }
    assert_eq!(s.input_groups(), [0, 1, 2, 3]);
    assert_eq!(s.state_groups(), [0, 0, 1, 1, 2, 2, 3, 3]);
}

#[test]
fn coupling_decays_with_distance() {
    let layout = AgentLayout::new(vec![(1.0, 1.0), (1.0, 2.0), (4.0, 5.0)], 10.0).unwrap();
    let (model, _) = build_coupled_model(&layout, CouplingSign::Decaying).unwrap();
    assert!((model.a()[(0, 2)] - 0.36788).abs() < 1e-5);
    assert_eq!(model.a()[(0, 3)], 0.0);
    assert_eq!(model.a()[(4, 0)], (-5.0f64).exp());
    assert_eq!(model.a()[(0, 4)], model.a()[(4, 0)]);
}

#[test]
fn calibration_bracket_ends() {
    let (model, s) = coupled(5, 2);
    let standard = solve_standard_lqr(&model).unwrap();
    let dense_count = s.off_block_positions().len();
    let tol = |k: &Matrix| relative_link_tol(k, 1e-6);

    let low = lqrlr_core::admm::admm_solve_from(&model, &s, &AdmmConfig::sparse(GAMMA_RANGE.0), &standard, |_| {})
        .unwrap();
    let g = low.gain();
    assert!(count_links(&g, &s, tol(&g)).off_block_entries >= dense_count - 2);

    let high = lqrlr_core::admm::admm_solve_from(&model, &s, &AdmmConfig::sparse(GAMMA_RANGE.1), &standard, |_| {});
    if let Ok(high) = high {
        let g = high.gain();
        assert!(!high.is_feasible() || count_links(&g, &s, tol(&g)).off_block_entries <= 2);
    }
}

#[test]
fn calibration_hits_a_nearby_link_count() {
    let (model, s) = coupled(5, 4);
    let standard = solve_standard_lqr(&model).unwrap();
    let target = 10;
    let c =
        calibrate_sparse_gamma(&model, &s, target, LinkMetric::OffBlockEntries, &AdmmConfig::default(), &standard)
            .unwrap();
    assert!(c.design.is_feasible());
    assert!(c.metric.abs_diff(target) <= 2, "{} links at gamma {}", c.metric, c.gamma);
    assert_eq!(c.metric, c.links.off_block_entries);
    assert!(c.trajectory.iter().any(|&(g, _)| g == c.gamma));
    let critical =
        calibrate_sparse_gamma(&model, &s, 2, LinkMetric::CriticalNode, &AdmmConfig::default(), &standard).unwrap();
    assert_eq!(critical.metric, critical.links.critical_node_links());
}

#[test]
fn transmissions_follow_rank_and_receivers() {
    let s = BlockStructure::uniform(3, 1, STATES_PER_AGENT);
    let u = [1.0, 2.0, -1.0];
    let v = [0.5, 1.0, 2.0, -1.0, 0.3, 0.7];
    let rank_one = Matrix::from_fn(3, 6, |i, j| u[i] * v[j]);
    assert_eq!(transmission_count(&rank_one, &s, 2, Communication::Broadcast, 1e-9).unwrap(), [2; 3]);
    let mut rank_two = rank_one.clone();
    rank_two[(0, 0)] += 1.0;
    assert_eq!(transmission_count(&rank_two, &s, 2, Communication::Broadcast, 1e-9).unwrap(), [4; 3]);
}
