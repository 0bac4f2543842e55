#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace mclim {

using StateIndex = std::size_t;

// Tolerance on row sums when reading a model; rows are rescaled afterwards.
inline constexpr double kRowSumTolerance = 1e-9;

// A continuous-time chain with fixed mean sojourn times and an embedded
// one-step matrix with zero diagonal. The *_text members keep the tokens the
// values were read from so reports and drawings can echo "1/2" verbatim;
// they are empty for models built in code.
struct ChainModel {
  std::vector<std::string> names;
  std::vector<double> sojourn;
  Matrix trans;
  std::vector<std::string> sojourn_text;
  std::vector<std::string> trans_text;  // row-major, n*n

  std::size_t size() const noexcept { return names.size(); }

  std::optional<StateIndex> find(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<StateIndex>(it - names.begin());
  }

  StateIndex index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw UnknownStateError("unknown state '" + std::string(name) + "'");
  }

  bool has_text() const noexcept {
    return sojourn_text.size() == sojourn.size() && trans_text.size() == trans.rows() * trans.cols();
  }
};

enum class Severity { warning, error };

struct Issue {
  Severity severity;
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(), [s](const Issue& i) { return i.severity == s; }));
  }
  std::size_t tie_warnings() const { return count(Severity::warning); }
};

namespace detail {

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::optional<double> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "10", "0.5", "1/2". Returns nullopt on malformed input or zero denominator.
inline std::optional<double> parse_number(std::string_view tok) {
  auto slash = tok.find('/');
  if (slash == std::string_view::npos) return parse_decimal(tok);
  auto num = parse_decimal(tok.substr(0, slash));
  auto den = parse_decimal(tok.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

struct Token {
  std::string_view text;
  std::size_t position;  // 1-based within the line
};

inline std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), out.size() + 1});
    i = j;
  }
  return out;
}

inline bool is_significant(std::string_view line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c != '#';
  }
  return false;
}

}  // namespace detail

// Reads the model-file grammar (states:, sojourn:, matrix: + n rows).
// Checks syntax and dimensions only; chain invariants are left to validate().
inline ChainModel read_model(std::string_view text) {
  struct Line {
    std::size_t number;
    std::string_view content;
  };
  std::vector<Line> lines;
  {
    std::size_t number = 0, pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      auto content = text.substr(pos, end - pos);
      if (!content.empty() && content.back() == '\r') content.remove_suffix(1);
      ++number;
      if (detail::is_significant(content)) lines.push_back({number, content});
      pos = end + 1;
    }
  }

  auto header = [](const Line& l, std::string_view key) -> std::optional<std::vector<detail::Token>> {
    auto toks = detail::split_tokens(l.content);
    if (toks.empty()) return std::nullopt;
    auto first = toks.front().text;
    if (first == key) {
      toks.erase(toks.begin());
      return toks;
    }
    // "states:A B" without a space after the colon
    if (first.substr(0, key.size()) == key && first.size() > key.size()) {
      toks.front().text = first.substr(key.size());
      return toks;
    }
    return std::nullopt;
  };

  if (lines.empty()) throw ParseError(0, 0, "empty model file");

  ChainModel model;
  std::size_t cursor = 0;

  auto states = header(lines[cursor], "states:");
  if (!states) throw ParseError(lines[cursor].number, 1, "expected 'states:' as the first significant line");
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : *states) {
      if (!seen.insert(t.text).second)
        throw ParseError(lines[cursor].number, t.position, "duplicate state name '" + std::string(t.text) + "'");
      model.names.emplace_back(t.text);
    }
  }
  const std::size_t n = model.names.size();
  if (n < 2)
    throw ParseError(lines[cursor].number, 0,
                     "dimension error: a chain needs at least 2 states (got " + std::to_string(n) + ")");
  ++cursor;

  auto number_at = [](const Line& l, const detail::Token& t, std::size_t shown) {
    auto v = detail::parse_number(t.text);
    if (!v) throw ParseError(l.number, shown, "malformed number '" + std::string(t.text) + "'");
    return *v;
  };

  if (cursor >= lines.size()) throw ParseError(0, 0, "missing 'sojourn:' line");
  auto soj = header(lines[cursor], "sojourn:");
  if (!soj) throw ParseError(lines[cursor].number, 1, "expected 'sojourn:'");
  if (soj->size() != n)
    throw ParseError(lines[cursor].number, 0,
                     "dimension error: sojourn has " + std::to_string(soj->size()) + " entries, expected " +
                         std::to_string(n));
  for (const auto& t : *soj) {
    model.sojourn.push_back(number_at(lines[cursor], t, t.position));
    model.sojourn_text.emplace_back(t.text);
  }
  ++cursor;

  if (cursor >= lines.size()) throw ParseError(0, 0, "missing 'matrix:' line");
  auto mat = header(lines[cursor], "matrix:");
  if (!mat) throw ParseError(lines[cursor].number, 1, "expected 'matrix:'");
  if (!mat->empty()) throw ParseError(lines[cursor].number, 2, "unexpected tokens after 'matrix:'");
  ++cursor;

  model.trans = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r, ++cursor) {
    if (cursor >= lines.size())
      throw ParseError(0, 0, "dimension error: matrix has " + std::to_string(r) + " rows, expected " +
                                 std::to_string(n));
    auto toks = detail::split_tokens(lines[cursor].content);
    if (toks.size() != n)
      throw ParseError(lines[cursor].number, 0,
                       "dimension error: row " + std::to_string(r) + " has " + std::to_string(toks.size()) +
                           " entries, expected " + std::to_string(n));
    for (std::size_t c = 0; c < n; ++c) {
      model.trans(r, c) = number_at(lines[cursor], toks[c], toks[c].position);
      model.trans_text.emplace_back(toks[c].text);
    }
  }
  if (cursor < lines.size())
    throw ParseError(lines[cursor].number, 1,
                     "dimension error: more than " + std::to_string(n) + " matrix rows");
  return model;
}

// Columns attaining the maximum of a row (exact comparison).
inline std::vector<std::size_t> argmax_columns(std::span<const double> row) {
  std::vector<std::size_t> cols;
  double best = -1.0;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c] > best) {
      best = row[c];
      cols.assign(1, c);
    } else if (row[c] == best) {
      cols.push_back(c);
    }
  }
  return cols;
}

inline ValidationReport validate(const ChainModel& model) {
  ValidationReport rep;
  auto error = [&](std::optional<std::size_t> r, std::optional<std::size_t> c, std::string msg) {
    rep.issues.push_back({Severity::error, r, c, std::move(msg)});
    rep.ok = false;
  };
  auto cell = [](std::size_t r, std::size_t c) {
    return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
  };

  const std::size_t n = model.size();
  if (n < 2) error(std::nullopt, std::nullopt, "need at least 2 states");
  if (model.sojourn.size() != n || model.trans.rows() != n || model.trans.cols() != n) {
    error(std::nullopt, std::nullopt, "dimension mismatch between states, sojourn and matrix");
    return rep;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (model.names[i].empty() ||
        std::any_of(model.names[i].begin(), model.names[i].end(),
                    [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }))
      error(i, std::nullopt, "invalid state name at index " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j)
      if (model.names[i] == model.names[j]) error(i, std::nullopt, "duplicate state name '" + model.names[i] + "'");
    if (!(model.sojourn[i] > 0.0) || !std::isfinite(model.sojourn[i]))
      error(i, std::nullopt, "nonpositive sojourn time for state " + std::to_string(i));
  }

  for (std::size_t r = 0; r < n; ++r) {
    bool row_ok = true;
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      double p = model.trans(r, c);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        error(r, c, "entry out of [0,1] at " + cell(r, c));
        row_ok = false;
      }
      sum += p;
    }
    if (model.trans(r, r) != 0.0) {
      error(r, r, "nonzero diagonal at " + cell(r, r));
      row_ok = false;
    }
    if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
      error(r, std::nullopt, "row " + std::to_string(r) + " sums to " + detail::format_g(sum, 12) + ", expected 1");
      row_ok = false;
    }
    if (!row_ok) continue;
    auto top = argmax_columns(model.trans.row(r));
    if (top.size() > 1) {
      std::string cols;
      for (auto c : top) cols += (cols.empty() ? "" : ",") + std::to_string(c);
      rep.issues.push_back({Severity::warning, r, std::nullopt,
                            "row " + std::to_string(r) + " has tied maximum in columns " + cols});
    }
  }
  return rep;
}

inline std::string describe(const ValidationReport& rep) {
  std::string out;
  for (const auto& i : rep.issues)
    out += (i.severity == Severity::error ? "error: " : "warning: ") + i.message + "\n";
  return out;
}

inline void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double sum = 0.0;
    for (double p : row) sum += p;
    for (double& p : row) p /= sum;
  }
}

// read_model + validate; throws ModelError when any error-severity issue is
// found, otherwise rescales every row to sum to 1 in working precision.
inline ChainModel parse_model(std::string_view text) {
  ChainModel model = read_model(text);
  auto rep = validate(model);
  if (!rep.ok) throw ModelError(describe(rep));
  normalize_rows(model.trans);
  return model;
}

// Inverse of parse_model up to the row rescaling: numbers are written with
// 17 significant digits.
inline std::string serialize(const ChainModel& model) {
  std::ostringstream os;
  os << "states:";
  for (const auto& s : model.names) os << ' ' << s;
  os << "\nsojourn:";
  for (double t : model.sojourn) os << ' ' << detail::format_g(t, 17);
  os << "\nmatrix:\n";
  for (std::size_t r = 0; r < model.trans.rows(); ++r) {
    for (std::size_t c = 0; c < model.trans.cols(); ++c)
      os << (c ? " " : "") << detail::format_g(model.trans(r, c), 17);
    os << '\n';
  }
  return os.str();
}

// Breaks tied row maxima: the k-th tied cell (left to right, k from 0) gets
// magnitude*(k+1) added before the row is rescaled, so the rightmost tied
// cell wins. Tie-free rows are untouched.
inline ChainModel perturb_ties(const ChainModel& model, double magnitude) {
  if (!(magnitude > 0.0 && magnitude < 1e-3))
    throw std::invalid_argument("perturbation magnitude must be in (0, 1e-3)");
  ChainModel out = model;
  const std::size_t n = model.size();
  for (std::size_t r = 0; r < n; ++r) {
    auto top = argmax_columns(model.trans.row(r));
    if (top.size() < 2) continue;
    auto row = out.trans.row(r);
    for (std::size_t k = 0; k < top.size(); ++k) row[top[k]] += magnitude * static_cast<double>(k + 1);
    double sum = 0.0;
    for (double p : row) sum += p;
    for (double& p : row) p /= sum;
    if (argmax_columns(row).size() > 1)
      throw TieError(r, "perturbation of " + detail::format_g(magnitude, 3) + " too small to separate row " +
                            std::to_string(r));
    if (out.has_text())
      for (std::size_t c = 0; c < n; ++c) out.trans_text[r * n + c] = detail::format_g(row[c], 17);
  }
  return out;
}

// Column of the strict maximum of row s.
inline StateIndex row_max_successor(const ChainModel& model, StateIndex s) {
  auto top = argmax_columns(model.trans.row(s));
  if (top.size() != 1)
    throw TieError(s, "row " + model.names[s] + " has a tied maximum; rerun with a tie perturbation");
  return top.front();
}

}  // namespace mclim
