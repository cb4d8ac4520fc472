// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "microforge/common/errors.hpp"

namespace microforge::llm {

class RenderError : public Error {
 public:
  explicit RenderError(std::string placeholder);
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Placeholders appear in template files as `{{NAME}}`.
const std::set<std::string, std::less<>>& known_placeholders();

/// The template ids shipped in templates/<id>.txt.
const std::vector<std::string>& template_ids();

struct PromptTemplate {
  std::string id;
  std::string text;
  std::set<std::string> placeholders;

  /// Throws LoadError if the text uses a placeholder outside the known set.
  static PromptTemplate from_text(std::string id, std::string text);
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every placeholder; throws RenderError on the first unbound one.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

class TemplateSet {
 public:
  /// Loads every template id from `dir`. Files found in `override_dir`
  /// replace the ones in `dir`.
  static TemplateSet load(const std::filesystem::path& dir, const std::filesystem::path& override_dir = {});
  static TemplateSet from_map(const std::map<std::string, std::string>& texts);

  const PromptTemplate& get(std::string_view id) const;
  bool contains(std::string_view id) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

/// `id` is either a full template id ("critic.user" gives one user message)
/// or a role group ("critic" gives the system and user messages).
std::vector<ChatMessage> render_prompt(const TemplateSet& templates, std::string_view id, const Bindings& bindings);

}  // namespace microforge::llm
