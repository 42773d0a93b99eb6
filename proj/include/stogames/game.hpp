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

#ifndef STOGAMES_GAME_HPP_
#define STOGAMES_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stogames/rng.hpp"

namespace stogames {

inline constexpr double kSimplexTolerance = 1e-12;

enum class GameClass { kZeroSum, kIdenticalInterest, kGeneral };

inline std::string to_string(GameClass c) {
  switch (c) {
    case GameClass::kZeroSum: return "zero_sum";
    case GameClass::kIdenticalInterest: return "identical_interest";
    case GameClass::kGeneral: return "general";
  }
  throw std::logic_error("unknown GameClass");
}

inline GameClass game_class_from_string(const std::string& s) {
  if (s == "zero_sum") return GameClass::kZeroSum;
  if (s == "identical_interest") return GameClass::kIdenticalInterest;
  if (s == "general") return GameClass::kGeneral;
  throw std::invalid_argument("unknown game_class: " + s);
}

/// Finite zero-mean additive reward noise for one agent.
struct RewardNoise {
  std::vector<double> support;
  std::vector<double> probs;
};

// Flat joint-action indexing, agent 0 varying fastest:
//   flat = sum_i a_i * prod_{j<i} |A_j|.

inline int joint_action_count(std::span<const int> action_counts) {
  int n = 1;
  for (int c : action_counts) n *= c;
  return n;
}

inline int encode_joint_action(std::span<const int> action_counts,
                               std::span<const int> actions) {
  if (actions.size() != action_counts.size())
    throw std::invalid_argument("encode_joint_action: arity mismatch");
  int flat = 0;
  int stride = 1;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts[i])
      throw std::out_of_range("encode_joint_action: action index out of range");
    flat += actions[i] * stride;
    stride *= action_counts[i];
  }
  return flat;
}

inline void decode_joint_action(std::span<const int> action_counts, int flat,
                                std::span<int> actions_out) {
  if (actions_out.size() != action_counts.size())
    throw std::invalid_argument("decode_joint_action: arity mismatch");
  for (std::size_t i = 0; i < action_counts.size(); ++i) {
    actions_out[i] = flat % action_counts[i];
    flat /= action_counts[i];
  }
  if (flat != 0) throw std::out_of_range("decode_joint_action: flat index out of range");
}

/// Extracts one agent's action from a flat joint index.
inline int joint_action_component(std::span<const int> action_counts, int flat, int agent) {
  for (int i = 0; i < agent; ++i) flat /= action_counts[i];
  return flat % action_counts[agent];
}

/// A finite discounted stochastic game in tabular form. Immutable after
/// construction by convention; safe to share read-only across threads.
struct StochasticGame {
  int n_agents = 0;
  int n_states = 0;
  std::vector<int> action_counts;       // |A^i| per agent
  std::vector<double> rewards;          // [agent][state][flat joint action]
  std::vector<double> transitions;      // [state][flat joint action][next state]
  double gamma = 0.0;
  GameClass game_class = GameClass::kGeneral;
  std::vector<RewardNoise> noise;       // empty, or one entry per agent

  int n_joint_actions() const { return joint_action_count(action_counts); }

  double reward(int agent, int s, int joint) const {
    return rewards[(static_cast<std::size_t>(agent) * n_states + s) * n_joint_actions() + joint];
  }
  double& reward(int agent, int s, int joint) {
    return rewards[(static_cast<std::size_t>(agent) * n_states + s) * n_joint_actions() + joint];
  }
  double transition(int s, int joint, int next) const {
    return transitions[(static_cast<std::size_t>(s) * n_joint_actions() + joint) * n_states + next];
  }
  double& transition(int s, int joint, int next) {
    return transitions[(static_cast<std::size_t>(s) * n_joint_actions() + joint) * n_states + next];
  }
  std::span<const double> transition_row(int s, int joint) const {
    return {transitions.data() + (static_cast<std::size_t>(s) * n_joint_actions() + joint) * n_states,
            static_cast<std::size_t>(n_states)};
  }

  double max_abs_reward() const {
    double m = 0.0;
    for (double r : rewards) m = std::max(m, std::abs(r));
    return m;
  }
};

/// Parameters for the random game generator.
struct GameSpec {
  int n_agents = 2;
  int n_states = 3;
  std::vector<int> action_counts;
  double gamma = 0.8;
  GameClass game_class = GameClass::kGeneral;
  double reward_lo = 0.0;
  double reward_hi = 1.0;
  double transition_floor = 0.0;  // guaranteed minimum kernel entry, > 0
};

/// Floor such that the generator's raw draw range starts at 0.1, the
/// default generation behavior.
inline double default_transition_floor(int n_states) { return 0.1 / n_states; }

inline void validate_spec(const GameSpec& spec) {
  if (spec.n_agents < 1) throw std::invalid_argument("GameSpec: n_agents must be positive");
  if (spec.n_states < 1) throw std::invalid_argument("GameSpec: n_states must be positive");
  if (static_cast<int>(spec.action_counts.size()) != spec.n_agents)
    throw std::invalid_argument("GameSpec: action_counts size must equal n_agents");
  for (int c : spec.action_counts)
    if (c < 1) throw std::invalid_argument("GameSpec: action counts must be positive");
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0))
    throw std::invalid_argument("GameSpec: gamma must be in [0,1)");
  if (spec.reward_lo > spec.reward_hi)
    throw std::invalid_argument("GameSpec: reward range is empty");
  if (!(spec.transition_floor > 0.0))
    throw std::invalid_argument("GameSpec: transition_floor must be positive");
  if (spec.transition_floor * spec.n_states > 1.0)
    throw std::invalid_argument("GameSpec: transition_floor * n_states must be <= 1");
  if (spec.game_class == GameClass::kZeroSum && spec.n_agents != 2)
    throw std::invalid_argument("GameSpec: zero-sum games require exactly 2 agents");
}

struct Violation {
  std::string rule;
  std::string location;
  double magnitude = 0.0;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;

  void add(std::string rule, std::string location, double magnitude) {
    passed = false;
    violations.push_back({std::move(rule), std::move(location), magnitude});
  }
};

namespace detail {

inline std::string cell_location(int s, int joint) {
  std::ostringstream os;
  os << "s=" << s << ",a=" << joint;
  return os.str();
}

inline void check_game_shape(const StochasticGame& g) {
  if (g.n_agents < 1 || g.n_states < 1)
    throw std::invalid_argument("game: agent and state counts must be positive");
  if (static_cast<int>(g.action_counts.size()) != g.n_agents)
    throw std::invalid_argument("game: action_counts size must equal n_agents");
  for (int c : g.action_counts)
    if (c < 1) throw std::invalid_argument("game: action counts must be positive");
  const std::size_t joint = static_cast<std::size_t>(g.n_joint_actions());
  if (g.rewards.size() != static_cast<std::size_t>(g.n_agents) * g.n_states * joint)
    throw std::invalid_argument("game: reward table shape mismatch");
  if (g.transitions.size() != static_cast<std::size_t>(g.n_states) * joint * g.n_states)
    throw std::invalid_argument("game: transition table shape mismatch");
  if (!(g.gamma >= 0.0 && g.gamma < 1.0))
    throw std::invalid_argument("game: gamma must be in [0,1)");
  if (!g.noise.empty() && static_cast<int>(g.noise.size()) != g.n_agents)
    throw std::invalid_argument("game: noise must be empty or have one entry per agent");
  for (const RewardNoise& nz : g.noise)
    if (nz.support.size() != nz.probs.size())
      throw std::invalid_argument("game: noise support/probs size mismatch");
}

}  // namespace detail

/// Structural problems (shape mismatches) throw; rule violations are
/// reported. Rules: transition rows are simplexes, every transition entry
/// is strictly positive (reachability), rewards match the declared class,
/// and configured noise is a zero-mean distribution.
inline ValidationReport validate_game(const StochasticGame& g) {
  detail::check_game_shape(g);
  ValidationReport report;
  const int joint = g.n_joint_actions();

  for (int s = 0; s < g.n_states; ++s) {
    for (int a = 0; a < joint; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < g.n_states; ++s2) {
        const double p = g.transition(s, a, s2);
        sum += p;
        if (p < 0.0)
          report.add("simplex", detail::cell_location(s, a) + ",s'=" + std::to_string(s2), p);
        if (p <= 0.0)
          report.add("reachability", detail::cell_location(s, a) + ",s'=" + std::to_string(s2), p);
      }
      if (std::abs(sum - 1.0) > kSimplexTolerance)
        report.add("simplex", detail::cell_location(s, a), std::abs(sum - 1.0));
    }
  }

  if (g.game_class == GameClass::kZeroSum) {
    if (g.n_agents != 2) {
      report.add("zero-sum", "n_agents", g.n_agents);
    } else {
      for (int s = 0; s < g.n_states; ++s)
        for (int a = 0; a < joint; ++a) {
          const double resid = g.reward(0, s, a) + g.reward(1, s, a);
          if (std::abs(resid) > kSimplexTolerance)
            report.add("zero-sum", detail::cell_location(s, a), std::abs(resid));
        }
    }
  } else if (g.game_class == GameClass::kIdenticalInterest) {
    for (int i = 1; i < g.n_agents; ++i)
      for (int s = 0; s < g.n_states; ++s)
        for (int a = 0; a < joint; ++a) {
          const double diff = g.reward(i, s, a) - g.reward(0, s, a);
          if (std::abs(diff) > kSimplexTolerance)
            report.add("identical-interest",
                       "i=" + std::to_string(i) + "," + detail::cell_location(s, a),
                       std::abs(diff));
        }
  }

  for (std::size_t i = 0; i < g.noise.size(); ++i) {
    const RewardNoise& nz = g.noise[i];
    if (nz.support.empty()) continue;
    double psum = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < nz.support.size(); ++j) {
      if (nz.probs[j] < 0.0) report.add("noise", "i=" + std::to_string(i), nz.probs[j]);
      psum += nz.probs[j];
      mean += nz.probs[j] * nz.support[j];
    }
    if (std::abs(psum - 1.0) > kSimplexTolerance)
      report.add("noise", "i=" + std::to_string(i), std::abs(psum - 1.0));
    if (std::abs(mean) > kSimplexTolerance)
      report.add("noise", "i=" + std::to_string(i) + ",mean", std::abs(mean));
  }

  return report;
}

/// Expected reward for (agent, s, a). Noise is zero-mean by invariant, so
/// this is the stored table entry.
inline double expected_reward(const StochasticGame& g, int agent, int s, int joint) {
  if (agent < 0 || agent >= g.n_agents) throw std::out_of_range("expected_reward: agent");
  if (s < 0 || s >= g.n_states) throw std::out_of_range("expected_reward: state");
  if (joint < 0 || joint >= g.n_joint_actions()) throw std::out_of_range("expected_reward: action");
  return g.reward(agent, s, joint);
}

/// Probability row placing 1 - eps + eps/n on the chosen action and eps/n
/// elsewhere. The last entry is computed as a residual so the row sums to
/// 1 exactly.
inline std::vector<double> exploration_kernel(double epsilon, int n_actions, int action) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("exploration_kernel: epsilon must be in (0,1)");
  if (n_actions < 1) throw std::invalid_argument("exploration_kernel: n_actions must be >= 1");
  if (action < 0 || action >= n_actions)
    throw std::out_of_range("exploration_kernel: action index out of range");
  if (n_actions == 1) return {1.0};
  std::vector<double> row(n_actions, epsilon / n_actions);
  row[action] = 1.0 - epsilon + epsilon / n_actions;
  double partial = 0.0;
  for (int i = 0; i + 1 < n_actions; ++i) partial += row[i];
  row[n_actions - 1] = 1.0 - partial;
  return row;
}

namespace detail {

/// Renormalizes a nonnegative row to an exact simplex. The residual is
/// absorbed by the largest entry, which cannot be driven negative and
/// leaves any minimum-entry guarantee intact.
inline void normalize_row_exact(std::span<double> row) {
  double sum = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& x : row) x /= sum;
  double partial = std::accumulate(row.begin(), row.end(), 0.0);
  auto biggest = std::max_element(row.begin(), row.end());
  *biggest += 1.0 - partial;
}

}  // namespace detail

/// Deterministic function of (spec, seed). Rewards are uniform on the
/// declared range; zero-sum games draw agent 0 and negate for agent 1,
/// identical-interest games share a single draw. Transition rows are drawn
/// entrywise uniform on [floor * n_states, 1] and renormalized, which
/// keeps every entry at or above the declared floor.
inline StochasticGame generate_random_game(const GameSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  StochasticGame g;
  g.n_agents = spec.n_agents;
  g.n_states = spec.n_states;
  g.action_counts = spec.action_counts;
  g.gamma = spec.gamma;
  g.game_class = spec.game_class;
  const int joint = g.n_joint_actions();
  g.rewards.assign(static_cast<std::size_t>(g.n_agents) * g.n_states * joint, 0.0);
  g.transitions.assign(static_cast<std::size_t>(g.n_states) * joint * g.n_states, 0.0);

  Rng rng(derive_stream_key(seed, 0x67616d65ULL));  // "game"

  switch (spec.game_class) {
    case GameClass::kZeroSum:
      for (int s = 0; s < g.n_states; ++s)
        for (int a = 0; a < joint; ++a) {
          const double r = rng.uniform(spec.reward_lo, spec.reward_hi);
          g.reward(0, s, a) = r;
          g.reward(1, s, a) = -r;
        }
      break;
    case GameClass::kIdenticalInterest:
      for (int s = 0; s < g.n_states; ++s)
        for (int a = 0; a < joint; ++a) {
          const double r = rng.uniform(spec.reward_lo, spec.reward_hi);
          for (int i = 0; i < g.n_agents; ++i) g.reward(i, s, a) = r;
        }
      break;
    case GameClass::kGeneral:
      for (int i = 0; i < g.n_agents; ++i)
        for (int s = 0; s < g.n_states; ++s)
          for (int a = 0; a < joint; ++a)
            g.reward(i, s, a) = rng.uniform(spec.reward_lo, spec.reward_hi);
      break;
  }

  const double raw_lo = spec.transition_floor * spec.n_states;
  for (int s = 0; s < g.n_states; ++s)
    for (int a = 0; a < joint; ++a) {
      std::span<double> row{
          g.transitions.data() + (static_cast<std::size_t>(s) * joint + a) * g.n_states,
          static_cast<std::size_t>(g.n_states)};
      for (double& x : row) x = rng.uniform(raw_lo, 1.0);
      detail::normalize_row_exact(row);
    }

  return g;
}

/// Exploration-perturbed companion game: rewards and transitions are
/// averaged over independent per-agent eps-uniform action perturbation, so
/// pure decisions in the output are distributionally equivalent to
/// eps-greedy play in the input. Discount, states and action sets carry
/// over; reachability is preserved because rows are convex mixtures of
/// strictly positive rows.
inline StochasticGame build_effective_game(const StochasticGame& g, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("build_effective_game: epsilon must be in (0,1)");
  detail::check_game_shape(g);
  const int joint = g.n_joint_actions();

  // Per-agent kernels, indexed [chosen][executed].
  std::vector<std::vector<std::vector<double>>> kernels(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) {
    kernels[i].resize(g.action_counts[i]);
    for (int a = 0; a < g.action_counts[i]; ++a)
      kernels[i][a] = exploration_kernel(epsilon, g.action_counts[i], a);
  }

  StochasticGame out;
  out.n_agents = g.n_agents;
  out.n_states = g.n_states;
  out.action_counts = g.action_counts;
  out.gamma = g.gamma;
  out.game_class = g.game_class;
  out.rewards.assign(g.rewards.size(), 0.0);
  out.transitions.assign(g.transitions.size(), 0.0);
  // Effective tables average over executed actions; the zero-mean reward
  // noise integrates out, so the output carries expected rewards only.

  std::vector<int> chosen(g.n_agents), executed(g.n_agents);
  for (int a = 0; a < joint; ++a) {
    decode_joint_action(g.action_counts, a, chosen);
    for (int e = 0; e < joint; ++e) {
      decode_joint_action(g.action_counts, e, executed);
      double w = 1.0;
      for (int i = 0; i < g.n_agents; ++i) w *= kernels[i][chosen[i]][executed[i]];
      if (w == 0.0) continue;
      for (int s = 0; s < g.n_states; ++s) {
        for (int i = 0; i < g.n_agents; ++i)
          out.reward(i, s, a) += w * g.reward(i, s, e);
        for (int s2 = 0; s2 < g.n_states; ++s2)
          out.transition(s, a, s2) += w * g.transition(s, e, s2);
      }
    }
  }
  return out;
}

}  // namespace stogames

#endif  // STOGAMES_GAME_HPP_
