// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/clone.hpp"

#include <algorithm>
#include <map>

#include "microforge/policy/lexer.hpp"
#include "microforge/policy/parser.hpp"
#include "microforge/policy/printer.hpp"

namespace microforge::policy {

namespace {

using Renames = std::map<std::string, std::string>;

void rename_expr(Expr& e, const Renames& consts, const Renames& vars) {
  if (e.kind == ExprKind::ref) {
    if (e.ref == RefKind::constant) e.name = consts.at(e.name);
    if (e.ref == RefKind::variable) e.name = vars.at(e.name);
  }
  for (Expr& child : e.operands) rename_expr(child, consts, vars);
}

void rename_body(std::vector<Stmt>& body, const Renames& consts, const Renames& vars) {
  for (Stmt& s : body) {
    for (Expr& arg : s.args) rename_expr(arg, consts, vars);
    if (s.kind == StmtKind::set) s.target = vars.at(s.target);
    for (Branch& b : s.branches) {
      rename_expr(b.condition, consts, vars);
      rename_body(b.body, consts, vars);
    }
    rename_body(s.else_body, consts, vars);
  }
}

}  // namespace

NormalizedAst normalize(const PolicyAst& ast) {
  NormalizedAst out;
  out.ast = ast;
  out.ast.name = "P";
  Renames consts;
  for (std::size_t i = 0; i < out.ast.consts.size(); ++i) {
    std::string fresh = "C" + std::to_string(i);
    consts[out.ast.consts[i].name] = fresh;
    out.ast.consts[i].name = fresh;
  }
  std::size_t var_counter = 0;
  for (UnitBlock& block : out.ast.blocks) {
    Renames vars;
    for (VarDecl& v : block.vars) {
      std::string fresh = "V" + std::to_string(var_counter++);
      vars[v.name] = fresh;
      v.name = fresh;
    }
    rename_body(block.body, consts, vars);
  }
  for (const Token& t : tokenize(pretty_print(out.ast))) {
    if (t.kind == TokenKind::end) continue;
    out.tokens.push_back(t.kind == TokenKind::string ? "\"" + t.text + "\"" : t.text);
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double similarity(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 100.0;
  if (a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin())) return 100.0;
  double lcs = static_cast<double>(lcs_length(a, b));
  return 100.0 * (2.0 * lcs) / static_cast<double>(a.size() + b.size());
}

double similarity(const NormalizedAst& a, const NormalizedAst& b) { return similarity(a.tokens, b.tokens); }

DedupResult dedup(std::span<const PolicySource> corpus, double threshold) {
  if (!(threshold > 0.0 && threshold <= 100.0)) throw ContractViolation("dedup threshold must be in (0, 100]");
  DedupResult result;
  std::vector<NormalizedAst> kept_forms;
  for (const PolicySource& source : corpus) {
    NormalizedAst form;
    try {
      form = normalize(parse(source));
    } catch (const Error&) {
      result.dropped.push_back({source.id, std::nullopt, std::nullopt, "parse-failure"});
      continue;
    }
    std::optional<std::size_t> best;
    double best_sim = -1.0;
    for (std::size_t k = 0; k < kept_forms.size(); ++k) {
      double s = similarity(form, kept_forms[k]);
      if (s > best_sim) {
        best_sim = s;
        best = k;
      }
    }
    if (best && best_sim >= threshold) {
      result.dropped.push_back({source.id, result.kept[*best].id, best_sim, "duplicate"});
    } else {
      result.kept.push_back(source);
      kept_forms.push_back(std::move(form));
    }
  }
  return result;
}

nlohmann::json to_json(const DedupResult& result) {
  nlohmann::json out = nlohmann::json::array();
  for (const DedupDrop& d : result.dropped) {
    nlohmann::json row = {{"dropped", d.dropped}, {"reason", d.reason}};
    row["kept"] = d.kept ? nlohmann::json(*d.kept) : nlohmann::json(nullptr);
    row["similarity"] = d.similarity ? nlohmann::json(*d.similarity) : nlohmann::json(nullptr);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace microforge::policy
