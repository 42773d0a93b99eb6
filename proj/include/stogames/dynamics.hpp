// Copyright 2026 The stogames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STOGAMES_DYNAMICS_HPP_
#define STOGAMES_DYNAMICS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stogames/game.hpp"
#include "stogames/rng.hpp"

namespace stogames {

/// Three-timescale step schedule:
///   lambda_k = (k+1)^-rho_lambda   (fast critic)
///   alpha_k  = (k+1)^-rho_alpha    (actor)
///   beta_k   = min(1, c/(k+1))     (slow critic)
/// with 1/2 < rho_lambda < rho_alpha < 1 and c >= 1.
struct StepSchedule {
  double rho_lambda = 0.60;
  double rho_alpha = 0.95;
  double beta_scale = 10.0;
};

inline void validate_schedule(const StepSchedule& s) {
  if (!(s.rho_lambda > 0.5 && s.rho_lambda < s.rho_alpha && s.rho_alpha < 1.0))
    throw std::invalid_argument("StepSchedule: requires 1/2 < rho_lambda < rho_alpha < 1");
  if (!(s.beta_scale >= 1.0))
    throw std::invalid_argument("StepSchedule: beta_scale must be >= 1");
}

/// Extra exponent conditions required for identical-interest games:
/// rho_alpha >= (3/2) rho_lambda and rho_alpha + rho_lambda > 3/2.
inline bool satisfies_identical_interest_conditions(const StepSchedule& s) {
  return s.rho_alpha >= 1.5 * s.rho_lambda && s.rho_alpha + s.rho_lambda > 1.5;
}

struct StepSizes {
  double lambda = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
};

inline StepSizes step_sizes(long long k, const StepSchedule& s) {
  if (k < 0) throw std::invalid_argument("step_sizes: stage index must be >= 0");
  const double t = static_cast<double>(k + 1);
  return {std::pow(t, -s.rho_lambda), std::pow(t, -s.rho_alpha),
          std::min(1.0, s.beta_scale / t)};
}

/// One agent's learning state: fast critic q, actor pi with its
/// exploration-free companion mu, and slow critic v. The identity
/// pi(s) = (1-eps) mu(s) + eps * uniform holds at every stage because pi
/// is always derived from mu.
struct LearnerState {
  int agent = 0;
  int n_states = 0;
  int n_actions = 0;
  double epsilon = 0.0;
  std::vector<double> q;                     // [state][own action]
  std::vector<std::vector<double>> pi;       // [state] -> simplex
  std::vector<std::vector<double>> mu;       // [state] -> simplex
  std::vector<double> v;                     // [state]

  double q_at(int s, int a) const { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  double& q_at(int s, int a) { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  std::span<const double> q_row(int s) const {
    return {q.data() + static_cast<std::size_t>(s) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
};

/// Environment feedback for one stage.
struct StageRecord {
  long long k = 0;
  int state = 0;
  std::vector<int> joint_action;   // per agent
  std::vector<double> rewards;     // per agent, noise included
  int next_state = 0;
};

namespace detail {

inline int argmax_lowest(std::span<const double> row) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(row.size()); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

/// Keeps a probability row an exact simplex; the residual goes to the
/// largest entry, which stays far from zero.
inline void renormalize_exact(std::vector<double>& row) {
  double sum = 0.0;
  for (double x : row) sum += x;
  auto biggest = std::max_element(row.begin(), row.end());
  *biggest += 1.0 - sum;
}

inline void derive_pi_from_mu(LearnerState& ln, int s) {
  const double floor = ln.epsilon / ln.n_actions;
  for (int a = 0; a < ln.n_actions; ++a)
    ln.pi[s][a] = (1.0 - ln.epsilon) * ln.mu[s][a] + floor;
}

}  // namespace detail

/// q = v = 0 and uniform actors. The decomposition identity holds at
/// stage 0 since a uniform mixture of uniforms is uniform.
inline std::vector<LearnerState> init_learners(const StochasticGame& g, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("init_learners: epsilon must be in (0,1)");
  std::vector<LearnerState> learners(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) {
    LearnerState& ln = learners[i];
    ln.agent = i;
    ln.n_states = g.n_states;
    ln.n_actions = g.action_counts[i];
    ln.epsilon = epsilon;
    ln.q.assign(static_cast<std::size_t>(g.n_states) * ln.n_actions, 0.0);
    ln.v.assign(g.n_states, 0.0);
    ln.mu.assign(g.n_states, std::vector<double>(ln.n_actions, 1.0 / ln.n_actions));
    ln.pi.resize(g.n_states);
    for (int s = 0; s < g.n_states; ++s) {
      ln.pi[s].resize(ln.n_actions);
      detail::derive_pi_from_mu(ln, s);
    }
  }
  return learners;
}

/// Fast-critic update for the previously visited pair only; the step is
/// normalized by the execution probability so all pairs advance at the
/// same expected rate. All other entries are untouched (asynchronous).
/// Reads the learner's current (pre-commit) v and pi.
inline void q_update(LearnerState& ln, double lambda, const StageRecord& prev) {
  const int s = prev.state;
  const int a = prev.joint_action[ln.agent];
  const double r = prev.rewards[ln.agent];
  const double gamma_v = ln.v[prev.next_state];
  const double prob = ln.pi[s][a];
  double& entry = ln.q_at(s, a);
  entry += lambda * (r + gamma_v - entry) / prob;
}

struct EpsilonBestResponse {
  std::vector<double> distribution;
  int argmax = 0;
};

/// eps-greedy response to one q row: exploration kernel centered on the
/// argmax, ties to the lowest index.
inline EpsilonBestResponse epsilon_best_response(std::span<const double> q_row, double epsilon) {
  if (q_row.empty()) throw std::invalid_argument("epsilon_best_response: empty row");
  for (double x : q_row)
    if (!std::isfinite(x)) throw std::invalid_argument("epsilon_best_response: non-finite entry");
  EpsilonBestResponse out;
  out.argmax = detail::argmax_lowest(q_row);
  out.distribution = exploration_kernel(epsilon, static_cast<int>(q_row.size()), out.argmax);
  return out;
}

/// Synchronous actor sweep: mu moves toward the pure greedy indicator in
/// every state, and pi is re-derived from mu so the decomposition is exact
/// by construction. Reads the current (pre-commit) q.
inline void actor_update(LearnerState& ln, double alpha) {
  for (int s = 0; s < ln.n_states; ++s) {
    const int target = detail::argmax_lowest(ln.q_row(s));
    auto& row = ln.mu[s];
    for (int a = 0; a < ln.n_actions; ++a) {
      const double indicator = (a == target) ? 1.0 : 0.0;
      row[a] += alpha * (indicator - row[a]);
    }
    detail::renormalize_exact(row);
    detail::derive_pi_from_mu(ln, s);
  }
}

/// Synchronous slow-critic sweep toward the actor-weighted q values.
/// Reads the current (pre-commit) pi and q.
inline void v_update(LearnerState& ln, double beta) {
  for (int s = 0; s < ln.n_states; ++s) {
    double target = 0.0;
    for (int a = 0; a < ln.n_actions; ++a) target += ln.pi[s][a] * ln.q_at(s, a);
    ln.v[s] += beta * (target - ln.v[s]);
  }
}

/// One stage of the dynamics. For k > 0 all three updates are computed
/// from stage-(k-1) snapshots: the commit order (q target first, then v
/// sweep, then actor sweep, then the q commit) guarantees no update reads
/// another's result within the stage. Afterwards each agent samples its
/// action from its own stream and the environment samples rewards and the
/// next state. Agents never read each other's state.
inline StageRecord advance_stage(const StochasticGame& g, const StepSchedule& schedule,
                                 std::vector<LearnerState>& learners, long long k,
                                 const StageRecord* prev, int current_state,
                                 std::span<Rng> agent_streams, Rng& env_stream) {
  if ((k > 0) != (prev != nullptr))
    throw std::invalid_argument("advance_stage: prev record required exactly when k > 0");
  if (current_state < 0 || current_state >= g.n_states)
    throw std::out_of_range("advance_stage: state index");

  if (k > 0) {
    const StepSizes sz = step_sizes(k - 1, schedule);
    for (LearnerState& ln : learners) {
      const int ps = prev->state;
      const int pa = prev->joint_action[ln.agent];
      const double target = prev->rewards[ln.agent] + g.gamma * ln.v[prev->next_state];
      const double increment = sz.lambda * (target - ln.q_at(ps, pa)) / ln.pi[ps][pa];
      v_update(ln, sz.beta);
      actor_update(ln, sz.alpha);
      ln.q_at(ps, pa) += increment;
    }
  }

  StageRecord rec;
  rec.k = k;
  rec.state = current_state;
  rec.joint_action.resize(g.n_agents);
  rec.rewards.resize(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i)
    rec.joint_action[i] = agent_streams[i].categorical(learners[i].pi[current_state]);
  const int joint = encode_joint_action(g.action_counts, rec.joint_action);
  for (int i = 0; i < g.n_agents; ++i) {
    double r = g.reward(i, current_state, joint);
    if (!g.noise.empty() && !g.noise[i].support.empty())
      r += g.noise[i].support[agent_streams[i].categorical(g.noise[i].probs)];
    rec.rewards[i] = r;
  }
  rec.next_state = env_stream.categorical(g.transition_row(current_state, joint));
  return rec;
}

}  // namespace stogames

#endif  // STOGAMES_DYNAMICS_HPP_
