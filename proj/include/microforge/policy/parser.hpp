// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "microforge/common/errors.hpp"
#include "microforge/policy/ast.hpp"

namespace microforge::policy {

class ParseError : public Error {
 public:
  ParseError(Span span, const std::string& message, std::vector<std::string> expected = {});
  const Span& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Span span_;
  std::vector<std::string> expected_;
};

/// An identifier that does not resolve, or a declaration that clashes.
class NameError : public Error {
 public:
  NameError(Span span, std::string name, const std::string& message);
  const Span& span() const { return span_; }
  const std::string& name() const { return name_; }

 private:
  Span span_;
  std::string name_;
};

PolicyAst parse(const PolicySource& source);
PolicyAst parse(std::string_view text);

}  // namespace microforge::policy
