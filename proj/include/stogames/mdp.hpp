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

#ifndef STOGAMES_MDP_HPP_
#define STOGAMES_MDP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stogames/game.hpp"
#include "stogames/strategy.hpp"

namespace stogames {

/// Per-state values for one agent, with solve metadata.
struct ValueVector {
  std::vector<double> values;
  int agent = -1;
  double residual = 0.0;   // max-norm residual of the defining equation
  int iterations = 0;      // sweeps used (0 for direct solves)
};

namespace detail {

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[perm[col] * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[perm[r] * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    std::swap(perm[col], perm[pivot]);
    const int prow = perm[col];
    for (int r = col + 1; r < n; ++r) {
      const int row = perm[r];
      const double f = a[row * n + col] / a[prow * n + col];
      if (f == 0.0) continue;
      a[row * n + col] = 0.0;
      for (int c = col + 1; c < n; ++c) a[row * n + c] -= f * a[prow * n + c];
      b[row] -= f * b[prow];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    const int row = perm[i];
    double acc = b[row];
    for (int c = i + 1; c < n; ++c) acc -= a[row * n + c] * x[c];
    x[i] = acc / a[row * n + i];
  }
  return x;
}

struct PolicyInducedChain {
  std::vector<double> transition;  // [s][s'] row-stochastic
  std::vector<double> reward;      // [s]
};

inline PolicyInducedChain induced_chain(const StochasticGame& g, int agent,
                                        const StrategyProfile& profile) {
  PolicyInducedChain chain;
  chain.transition.assign(static_cast<std::size_t>(g.n_states) * g.n_states, 0.0);
  chain.reward.assign(g.n_states, 0.0);
  const int joint = g.n_joint_actions();
  for (int s = 0; s < g.n_states; ++s) {
    for (int a = 0; a < joint; ++a) {
      const double w = joint_action_probability(g, profile, s, a);
      if (w == 0.0) continue;
      chain.reward[s] += w * g.reward(agent, s, a);
      for (int s2 = 0; s2 < g.n_states; ++s2)
        chain.transition[s * g.n_states + s2] += w * g.transition(s, a, s2);
    }
  }
  return chain;
}

}  // namespace detail

/// Exact value of `profile` for one agent: solves (I - gamma P) v = r by
/// direct elimination with partial pivoting. The system is nonsingular
/// since ||gamma P|| < 1.
inline ValueVector policy_evaluation(const StochasticGame& g, int agent,
                                     const StrategyProfile& profile) {
  if (agent < 0 || agent >= g.n_agents) throw std::out_of_range("policy_evaluation: agent");
  const auto chain = detail::induced_chain(g, agent, profile);
  const int n = g.n_states;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int s2 = 0; s2 < n; ++s2) a[s * n + s2] = -g.gamma * chain.transition[s * n + s2];
    a[s * n + s] += 1.0;
  }
  ValueVector out;
  out.agent = agent;
  out.values = detail::solve_dense(a, chain.reward, n);
  for (int s = 0; s < n; ++s) {
    double lhs = out.values[s];
    for (int s2 = 0; s2 < n; ++s2) lhs -= g.gamma * chain.transition[s * n + s2] * out.values[s2];
    out.residual = std::max(out.residual, std::abs(lhs - chain.reward[s]));
  }
  return out;
}

/// Agent i's single-agent problem once opponents are frozen: tables are
/// materialized up front because downstream solvers re-read them many
/// times per call.
struct InducedMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> reward;      // [s][a_i]
  std::vector<double> transition;  // [s][a_i][s']
};

/// Marginalizes rewards and transitions over the opponents' strategies.
/// Only rows of `opponents` for agents other than `agent` are read.
inline InducedMdp marginalize_opponents(const StochasticGame& g, int agent,
                                        const StrategyProfile& opponents) {
  InducedMdp mdp;
  mdp.n_states = g.n_states;
  mdp.n_actions = g.action_counts[agent];
  mdp.reward.assign(static_cast<std::size_t>(g.n_states) * mdp.n_actions, 0.0);
  mdp.transition.assign(static_cast<std::size_t>(g.n_states) * mdp.n_actions * g.n_states, 0.0);
  const int joint = g.n_joint_actions();
  std::vector<int> actions(g.n_agents);
  for (int s = 0; s < g.n_states; ++s) {
    for (int a = 0; a < joint; ++a) {
      decode_joint_action(g.action_counts, a, actions);
      double w = 1.0;
      for (int j = 0; j < g.n_agents; ++j) {
        if (j == agent) continue;
        w *= opponents.policies[j][s][actions[j]];
        if (w == 0.0) break;
      }
      if (w == 0.0) continue;
      const int own = actions[agent];
      mdp.reward[s * mdp.n_actions + own] += w * g.reward(agent, s, a);
      for (int s2 = 0; s2 < g.n_states; ++s2)
        mdp.transition[(s * mdp.n_actions + own) * g.n_states + s2] += w * g.transition(s, a, s2);
    }
  }
  return mdp;
}

struct BestResponse {
  ValueVector value;
  std::vector<int> greedy;  // deterministic policy, ties to the lowest index
};

/// Optimal value against frozen opponents via value iteration on the
/// induced MDP. Stops when successive sweeps differ by at most
/// tol * (1 - gamma) / (2 gamma), which bounds the value error by tol.
inline BestResponse best_response_value(const StochasticGame& g, int agent,
                                        const StrategyProfile& opponents, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("best_response_value: tol must be positive");
  if (agent < 0 || agent >= g.n_agents) throw std::out_of_range("best_response_value: agent");
  const InducedMdp mdp = marginalize_opponents(g, agent, opponents);
  const int n = mdp.n_states;
  const int m = mdp.n_actions;

  std::vector<double> v(n, 0.0), next(n, 0.0);
  const double stop =
      g.gamma > 0.0 ? tol * (1.0 - g.gamma) / (2.0 * g.gamma) : std::numeric_limits<double>::max();
  int iterations = 0;
  double diff = 0.0;
  do {
    diff = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) {
        double q = mdp.reward[s * m + a];
        for (int s2 = 0; s2 < n; ++s2)
          q += g.gamma * mdp.transition[(s * m + a) * n + s2] * v[s2];
        if (q > best) best = q;
      }
      next[s] = best;
      diff = std::max(diff, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    ++iterations;
  } while (diff > stop && g.gamma > 0.0);

  BestResponse br;
  br.value.agent = agent;
  br.value.values = v;
  br.value.iterations = iterations;
  br.value.residual = diff;
  br.greedy.assign(n, 0);
  for (int s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a) {
      double q = mdp.reward[s * m + a];
      for (int s2 = 0; s2 < n; ++s2)
        q += g.gamma * mdp.transition[(s * m + a) * n + s2] * v[s2];
      if (q > best) {
        best = q;
        br.greedy[s] = a;
      }
    }
  }
  return br;
}

/// Testing oracle: enumerates every deterministic Markov stationary policy
/// of the agent, evaluates each exactly, and takes the statewise maximum.
inline ValueVector brute_force_best_response(const StochasticGame& g, int agent,
                                             const StrategyProfile& opponents) {
  if (agent < 0 || agent >= g.n_agents)
    throw std::out_of_range("brute_force_best_response: agent");
  const int m = g.action_counts[agent];
  double policy_count = std::pow(static_cast<double>(m), g.n_states);
  if (policy_count > 1e6)
    throw std::invalid_argument("brute_force_best_response: policy space exceeds enumeration guard");

  ValueVector best;
  best.agent = agent;
  best.values.assign(g.n_states, -std::numeric_limits<double>::infinity());

  StrategyProfile composed = opponents;
  std::vector<int> choice(g.n_states, 0);
  while (true) {
    composed.policies[agent].assign(g.n_states, std::vector<double>(m, 0.0));
    for (int s = 0; s < g.n_states; ++s) composed.policies[agent][s][choice[s]] = 1.0;
    ValueVector v = policy_evaluation(g, agent, composed);
    best.residual = std::max(best.residual, v.residual);
    for (int s = 0; s < g.n_states; ++s) best.values[s] = std::max(best.values[s], v.values[s]);
    int pos = 0;
    while (pos < g.n_states && ++choice[pos] == m) choice[pos++] = 0;
    if (pos == g.n_states) break;
  }
  return best;
}

}  // namespace stogames

#endif  // STOGAMES_MDP_HPP_
