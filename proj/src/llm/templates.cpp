// SPDX-License-Identifier: Apache-2.0
#include "microforge/llm/templates.hpp"

#include <fstream>
#include <sstream>

namespace microforge::llm {

RenderError::RenderError(std::string placeholder)
    : Error("unbound placeholder: " + placeholder), placeholder_(std::move(placeholder)) {}

const std::set<std::string, std::less<>>& known_placeholders() {
  static const std::set<std::string, std::less<>> names = {"TASK INFORMATION", "PROMOTION", "TACTICS",
                                                           "CODE",             "RESULT",    "HISTORY"};
  return names;
}

const std::vector<std::string>& template_ids() {
  static const std::vector<std::string> ids = {"planner.system", "planner.user", "coder.system",
                                               "coder.user",     "critic.system", "critic.user",
                                               "grpo.system",    "grpo.user",     "augment.user"};
  return ids;
}

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

template <typename F>
void scan(std::string_view text, F&& on_placeholder) {
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string_view::npos) {
    auto end = text.find(kClose, pos + kOpen.size());
    if (end == std::string_view::npos) return;
    on_placeholder(pos, end + kClose.size(), text.substr(pos + kOpen.size(), end - pos - kOpen.size()));
    pos = end + kClose.size();
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

PromptTemplate PromptTemplate::from_text(std::string id, std::string text) {
  PromptTemplate t{std::move(id), std::move(text), {}};
  scan(t.text, [&](std::size_t, std::size_t, std::string_view name) {
    if (!known_placeholders().contains(name)) {
      throw LoadError("template " + t.id + ": unknown placeholder {{" + std::string(name) + "}}");
    }
    t.placeholders.emplace(name);
  });
  return t;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::string out;
  std::size_t last = 0;
  scan(tmpl.text, [&](std::size_t begin, std::size_t end, std::string_view name) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw RenderError(std::string(name));
    out.append(tmpl.text, last, begin - last);
    out += it->second;
    last = end;
  });
  out.append(tmpl.text, last);
  return out;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir, const std::filesystem::path& override_dir) {
  TemplateSet set;
  for (const std::string& id : template_ids()) {
    std::filesystem::path file = dir / (id + ".txt");
    if (!override_dir.empty() && std::filesystem::exists(override_dir / (id + ".txt"))) {
      file = override_dir / (id + ".txt");
    }
    set.templates_.emplace(id, PromptTemplate::from_text(id, read_text(file)));
  }
  return set;
}

TemplateSet TemplateSet::from_map(const std::map<std::string, std::string>& texts) {
  TemplateSet set;
  for (const auto& [id, text] : texts) set.templates_.emplace(id, PromptTemplate::from_text(id, text));
  return set;
}

const PromptTemplate& TemplateSet::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ContractViolation("unknown template id: " + std::string(id));
  return it->second;
}

bool TemplateSet::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

std::vector<ChatMessage> render_prompt(const TemplateSet& templates, std::string_view id, const Bindings& bindings) {
  auto role_of = [](std::string_view full) {
    return full.ends_with(".system") ? std::string("system") : std::string("user");
  };
  if (id.find('.') != std::string_view::npos) return {{role_of(id), render(templates.get(id), bindings)}};
  std::string group(id);
  return {{"system", render(templates.get(group + ".system"), bindings)},
          {"user", render(templates.get(group + ".user"), bindings)}};
}

}  // namespace microforge::llm
