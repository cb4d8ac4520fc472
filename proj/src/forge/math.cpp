// SPDX-License-Identifier: Apache-2.0
#include "microforge/forge/math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "microforge/common/errors.hpp"

namespace microforge::forge {

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pop_std(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / v.size());
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ContractViolation(std::string(what) + " must be finite");
}

}  // namespace

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw ContractViolation("group advantages need at least 2 rewards");
  const double mean = mean_of(rewards);
  const double sd = pop_std(rewards, mean);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < 1e-9) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

double dpo_loss(const DpoInputs& in) {
  require_finite(in.beta, "beta");
  require_finite(in.policy_chosen, "log pi_theta(chosen)");
  require_finite(in.reference_chosen, "log pi_ref(chosen)");
  require_finite(in.policy_rejected, "log pi_theta(rejected)");
  require_finite(in.reference_rejected, "log pi_ref(rejected)");
  if (in.beta <= 0.0) throw ContractViolation("beta must be positive");
  const double z = in.beta * ((in.policy_chosen - in.reference_chosen) - (in.policy_rejected - in.reference_rejected));
  // softplus(-z)
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double clipped_term(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_penalty(double log_policy, double log_ref) {
  const double d = log_ref - log_policy;
  return std::max(0.0, std::expm1(d) - d);
}

double grpo_objective(const GrpoGroup& group) {
  std::vector<double> rewards;
  for (const auto& s : group.samples) {
    if (!s.ratio || !s.log_policy || !s.log_ref) {
      throw ContractViolation("GRPO sample in group " + group.question_id + " lacks ratio or log-probs");
    }
    rewards.push_back(s.reward);
  }
  const auto adv = group_advantages(rewards);
  double total = 0.0;
  for (std::size_t i = 0; i < group.samples.size(); ++i) {
    const auto& s = group.samples[i];
    total += clipped_term(*s.ratio, adv[i], group.epsilon) - group.beta * kl_penalty(*s.log_policy, *s.log_ref);
  }
  return total / group.samples.size();
}

StatLine stat_line(std::string scenario, std::span<const double> rewards) {
  StatLine line;
  line.scenario = std::move(scenario);
  line.count = rewards.size();
  if (rewards.empty()) return line;
  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::sort(sorted.begin(), sorted.end());
  line.mean = mean_of(sorted);
  line.std = pop_std(sorted, line.mean);
  line.min = sorted.front();
  line.max = sorted.back();
  const std::size_t n = sorted.size();
  line.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  return line;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("pearson: series lengths differ");
  if (x.size() < 3) throw ContractViolation("pearson: need at least 3 points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw ContractViolation("moving average window must be positive");
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out.push_back(sum / static_cast<double>(std::min(i + 1, window)));
  }
  return out;
}

std::size_t char_length(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace microforge::forge
