// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "microforge/policy/ast.hpp"

namespace microforge::policy {

/// Canonical formatting: 2-space indent, one statement per line, minimal
/// parentheses. parse(pretty_print(ast)) is structurally equal to ast.
std::string pretty_print(const PolicyAst& ast);
std::string print_expr(const Expr& expr);

}  // namespace microforge::policy
