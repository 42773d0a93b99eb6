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

#ifndef STOGAMES_STRATEGY_HPP_
#define STOGAMES_STRATEGY_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stogames/game.hpp"

namespace stogames {

/// Markov stationary strategy profile: policies[agent][state] is a
/// probability row over that agent's actions.
struct StrategyProfile {
  std::vector<std::vector<std::vector<double>>> policies;
};

inline StrategyProfile uniform_profile(const StochasticGame& g) {
  StrategyProfile p;
  p.policies.resize(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) {
    const int n = g.action_counts[i];
    p.policies[i].assign(g.n_states, std::vector<double>(n, 1.0 / n));
  }
  return p;
}

inline void validate_profile(const StochasticGame& g, const StrategyProfile& p) {
  if (static_cast<int>(p.policies.size()) != g.n_agents)
    throw std::invalid_argument("profile: agent count mismatch");
  for (int i = 0; i < g.n_agents; ++i) {
    if (static_cast<int>(p.policies[i].size()) != g.n_states)
      throw std::invalid_argument("profile: state count mismatch");
    for (int s = 0; s < g.n_states; ++s) {
      const auto& row = p.policies[i][s];
      if (static_cast<int>(row.size()) != g.action_counts[i])
        throw std::invalid_argument("profile: action count mismatch");
      double sum = 0.0;
      for (double x : row) {
        if (x < 0.0) throw std::invalid_argument("profile: negative probability");
        sum += x;
      }
      if (std::abs(sum - 1.0) > kSimplexTolerance)
        throw std::invalid_argument("profile: row does not sum to 1");
    }
  }
}

/// pi = (1 - eps) * mu + eps * uniform, rowwise.
inline StrategyProfile perturb_with_uniform(const StrategyProfile& mu, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("perturb_with_uniform: epsilon must be in (0,1)");
  StrategyProfile out = mu;
  for (auto& per_state : out.policies)
    for (auto& row : per_state) {
      const double u = epsilon / static_cast<double>(row.size());
      for (double& x : row) x = (1.0 - epsilon) * x + u;
    }
  return out;
}

/// Deterministic profile from per-agent, per-state action choices.
inline StrategyProfile pure_profile(const StochasticGame& g,
                                    const std::vector<std::vector<int>>& actions) {
  StrategyProfile p;
  p.policies.resize(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) {
    p.policies[i].assign(g.n_states, std::vector<double>(g.action_counts[i], 0.0));
    for (int s = 0; s < g.n_states; ++s) p.policies[i][s][actions[i][s]] = 1.0;
  }
  return p;
}

/// Probability that joint action `joint` is played at state s under p.
inline double joint_action_probability(const StochasticGame& g, const StrategyProfile& p,
                                       int s, int joint) {
  double w = 1.0;
  int rest = joint;
  for (int i = 0; i < g.n_agents; ++i) {
    w *= p.policies[i][s][rest % g.action_counts[i]];
    if (w == 0.0) return 0.0;
    rest /= g.action_counts[i];
  }
  return w;
}

}  // namespace stogames

#endif  // STOGAMES_STRATEGY_HPP_
