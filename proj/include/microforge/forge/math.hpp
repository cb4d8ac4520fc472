// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace microforge::forge {

/// A_i = (r_i - mean) / std with the population std. All zeros when
/// std < 1e-9. Throws ContractViolation for fewer than two rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

struct DpoInputs {
  double beta = 0.1;
  double policy_chosen = 0.0;     // log pi_theta(y_c | x)
  double reference_chosen = 0.0;  // log pi_ref(y_c | x)
  double policy_rejected = 0.0;
  double reference_rejected = 0.0;
};

/// -log sigmoid(beta * (chosen margin - rejected margin)), computed without
/// overflow. Throws ContractViolation on non-finite input or beta <= 0.
double dpo_loss(const DpoInputs& in);

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_term(double ratio, double advantage, double epsilon);

/// exp(d) - d - 1 with d = log_ref - log_policy. Never negative.
double kl_penalty(double log_policy, double log_ref);

struct GrpoSample {
  std::string response;
  double reward = 0.0;
  std::optional<double> ratio;
  std::optional<double> log_policy;
  std::optional<double> log_ref;
};

struct GrpoGroup {
  std::string question_id;
  std::vector<GrpoSample> samples;
  double epsilon = 0.2;
  double beta = 0.04;
};

/// (1/G) * sum_i [clipped_term(ratio_i, A_i, eps) - beta * kl_i].
/// Throws ContractViolation when a sample lacks ratio or log-probs.
double grpo_objective(const GrpoGroup& group);

struct StatLine {
  std::string scenario;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

/// Population std; midpoint median for even counts. An empty series gives
/// count 0 and zeros elsewhere.
StatLine stat_line(std::string scenario, std::span<const double> rewards);

/// Pearson correlation; nullopt when either series has zero variance.
/// Throws ContractViolation on length mismatch or fewer than 3 points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Trailing moving average: entry i averages values[max(0, i-window+1)..i].
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// Number of Unicode code points in UTF-8 text.
std::size_t char_length(std::string_view text);

}  // namespace microforge::forge
