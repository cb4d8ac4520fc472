// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "microforge/policy/ast.hpp"

namespace microforge::policy {

/// Policy with user identifiers renamed canonically (name "P", consts C0..,
/// vars V0.. in declaration order) plus its canonical token stream.
struct NormalizedAst {
  PolicyAst ast;
  std::vector<std::string> tokens;
};

NormalizedAst normalize(const PolicyAst& ast);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// 100 * 2 * LCS / (|a| + |b|) over canonical token streams.
double similarity(const NormalizedAst& a, const NormalizedAst& b);
double similarity(std::span<const std::string> a, std::span<const std::string> b);

inline constexpr double kDefaultDedupThreshold = 90.0;

struct DedupDrop {
  std::string dropped;
  std::optional<std::string> kept;
  std::optional<double> similarity;
  std::string reason;  // "duplicate" or "parse-failure"
};

struct DedupResult {
  std::vector<PolicySource> kept;
  std::vector<DedupDrop> dropped;
};

/// Greedy scan in corpus order; a member is dropped iff it is at least
/// `threshold` similar to an already kept member. Members that fail to parse
/// are dropped with reason "parse-failure".
DedupResult dedup(std::span<const PolicySource> corpus, double threshold = kDefaultDedupThreshold);

nlohmann::json to_json(const DedupResult& result);

}  // namespace microforge::policy
