#pragma once

#include <optional>
#include <sstream>
#include <string>

#include "chain_model.hpp"
#include "cycle.hpp"

namespace mclim {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

// Transition network as a Graphviz digraph. Nodes and edges follow model
// order; edge labels reuse the parsed token when available. Edges of
// `highlight` are drawn dashed and heavy.
inline std::string to_dot(const ChainModel& model, const std::optional<Cycle>& highlight = std::nullopt) {
  const std::size_t n = model.size();
  const bool text = model.has_text();
  std::ostringstream os;
  os << "digraph mclim {\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string t = text ? model.sojourn_text[i] : detail::format_g(model.sojourn[i], 12);
    os << "  " << detail::dot_quote(model.names[i]) << " [label="
       << detail::dot_quote(model.names[i] + " (T=" + t + ")") << "];\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(model.trans(i, j) > 0.0)) continue;
      const std::string label = text ? model.trans_text[i * n + j] : detail::format_g(model.trans(i, j), 12);
      os << "  " << detail::dot_quote(model.names[i]) << " -> " << detail::dot_quote(model.names[j])
         << " [label=" << detail::dot_quote(label);
      if (highlight && highlight->contains(i) && highlight->successor(i) == j) os << ", style=dashed, penwidth=3";
      os << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace mclim
