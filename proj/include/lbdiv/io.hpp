#pragma once

// Text and JSON formats: comma-separated permutations and vectors, CSV
// matrices, and JSON encodings of generators, models and clustering results.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lbdiv/aggregate.hpp"
#include "lbdiv/divergence.hpp"
#include "lbdiv/error.hpp"
#include "lbdiv/mallows.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"

namespace lbdiv {

using json = nlohmann::json;

namespace io {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based character offset in the line
};

inline std::vector<Field> split_fields(std::string_view line, char sep = ',') {
  std::vector<Field> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back({line.substr(start, pos == std::string_view::npos ? pos : pos - start), start + 1});
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// "0.3,0.7" -> {0.3, 0.7}.
inline std::vector<double> parse_vector(std::string_view text, std::size_t line = 1) {
  std::vector<double> out;
  for (const auto& f : split_fields(trim(text))) {
    double v;
    if (!parse_double(f.text, v))
      throw ParseError("expected a number, got '" + std::string(trim(f.text)) + "'", line, f.column);
    out.push_back(v);
  }
  return out;
}

// "3,1,2" -> the permutation with sigma(1)=3, sigma(2)=1, sigma(3)=2.
inline Permutation parse_permutation(std::string_view text) {
  std::vector<std::size_t> items;
  for (const auto& f : split_fields(trim(text))) {
    const auto t = trim(f.text);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw ParseError("expected a positive integer, got '" + std::string(t) + "'", 1, f.column);
    items.push_back(v);
  }
  return Permutation(items);
}

inline std::vector<std::size_t> parse_items(std::string_view text) {
  std::vector<std::size_t> items;
  for (const auto& f : split_fields(trim(text))) {
    const auto t = trim(f.text);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw ParseError("expected a positive integer, got '" + std::string(t) + "'", 1, f.column);
    items.push_back(v);
  }
  return items;
}

inline std::string format_permutation(const Permutation& p) {
  std::string s;
  for (std::size_t r = 1; r <= p.size(); ++r) {
    if (r > 1) s += ",";
    s += std::to_string(p(r));
  }
  return s;
}

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

// Comma-separated numbers; a first row that does not parse as numbers is a
// header. Blank lines are skipped, CRLF is accepted.
inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0, width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    std::vector<double> row;
    row.reserve(fields.size());
    std::size_t bad = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i].text, v)) {
        if (!bad) bad = i + 1;
        continue;
      }
      row.push_back(v);
    }
    if (first && bad) {
      for (const auto& f : fields) table.header.emplace_back(trim(f.text));
      width = fields.size();
      first = false;
      continue;
    }
    if (bad)
      throw ParseError("row " + std::to_string(lineno) + ": field " + std::to_string(bad) +
                           " is not a number ('" + std::string(trim(fields[bad - 1].text)) + "')",
                       lineno, fields[bad - 1].column);
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError("row " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                           " fields, expected " + std::to_string(width),
                       lineno);
    first = false;
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw ParseError("CSV input has no data rows");
  return table;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

inline ScoreMatrix read_score_matrix_csv(std::istream& in) { return ScoreMatrix(read_csv(in).rows); }

inline WeightMatrix read_weight_matrix_csv(std::istream& in) {
  const auto t = read_csv(in);
  const std::size_t n = t.rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (t.rows[r].size() != n)
      throw ParseError("weight matrix must be square (" + std::to_string(n) + " columns)");
    flat.insert(flat.end(), t.rows[r].begin(), t.rows[r].end());
  }
  WeightMatrix w(n, std::move(flat));
  w.validate();
  return w;
}

inline std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(std::istream& in) {
  try {
    return json::parse(slurp(in));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// Accepts [[...], ...] or {"rows": [[...], ...], "ids": [...]}.
inline ScoreMatrix score_matrix_from_json(const json& j) {
  try {
    if (j.is_array()) return ScoreMatrix(j.get<std::vector<std::vector<double>>>());
    std::vector<std::string> ids;
    if (j.contains("ids")) ids = j.at("ids").get<std::vector<std::string>>();
    return ScoreMatrix(j.at("rows").get<std::vector<std::vector<double>>>(), std::move(ids));
  } catch (const json::exception& e) {
    throw ParseError(std::string("score matrix JSON: ") + e.what());
  }
}

inline GainTable gain_table_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("gain table must be a JSON array");
  return GainTable(j.get<std::vector<double>>());
}

// {"<mask>": value, ...}; missing masks are an error.
inline SetFunction explicit_table_from_json(std::size_t n, const json& j) {
  if (n > kMaxExhaustiveGroundSet) throw LimitError("explicit table needs n <= 20");
  std::vector<double> values(std::size_t{1} << n, 0.0);
  std::vector<char> seen(values.size(), 0);
  if (!j.is_object()) throw ParseError("explicit table must be a JSON object of mask -> value");
  for (const auto& [key, value] : j.items()) {
    std::uint64_t mask = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), mask);
    if (ec != std::errc() || ptr != key.data() + key.size() || mask >= values.size())
      throw ParseError("explicit table key '" + key + "' is not a mask below 2^" + std::to_string(n));
    values[mask] = value.get<double>();
    seen[mask] = 1;
  }
  for (std::size_t m = 0; m < seen.size(); ++m)
    if (!seen[m]) throw ParseError("explicit table is missing mask " + std::to_string(m));
  return SetFunction::explicit_table(n, std::move(values));
}

inline PartialOrder partial_order_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("partial order must be a JSON array");
  std::vector<OrderConstraint> cs;
  try {
    for (const auto& c : j)
      cs.push_back({c.at("above").get<std::size_t>(), c.at("below").get<std::size_t>(),
                    c.value("weight", 1.0)});
  } catch (const json::exception& e) {
    throw ParseError(std::string("partial order JSON: ") + e.what());
  }
  return PartialOrder(std::move(cs));
}

// A JSON array of discounts, or the string "log2" (then `cutoff` applies).
inline DiscountProfile discount_from_json(const json& j, std::size_t cutoff) {
  if (j.is_string()) {
    if (j.get<std::string>() != "log2")
      throw ParseError("unknown discount profile '" + j.get<std::string>() + "'");
    return DiscountProfile::log2(cutoff);
  }
  if (!j.is_array()) throw ParseError("discount profile must be an array or \"log2\"");
  return DiscountProfile(j.get<std::vector<double>>());
}

// Shortest decimal form of v rounded to 12 significant digits.
inline double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline json rounded(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(round12(x));
  return a;
}

}  // namespace io

inline void to_json(json& j, const Permutation& p) { j = p.one_based(); }
inline void from_json(const json& j, Permutation& p) {
  p = Permutation(j.get<std::vector<std::size_t>>());
}

inline json generator_to_json(const SetFunction& f) {
  const std::size_t n = f.ground_size();
  return std::visit(
      detail::overloaded{
          [&](const generators::CardinalityConcave& g) -> json {
            return {{"type", "cardinality"}, {"n", n}, {"gains", std::vector<double>(g.gains.gains().begin(), g.gains.gains().end())}};
          },
          [&](const generators::TruncatedCardinality& g) -> json {
            return {{"type", "truncated_cardinality"},
                    {"n", n},
                    {"m", g.cutoff},
                    {"gains", std::vector<double>(g.gains.gains().begin(), g.gains.gains().end())}};
          },
          [&](const generators::GraphCut& g) -> json {
            json rows = json::array();
            for (std::size_t i = 0; i < n; ++i) {
              std::vector<double> row(n);
              for (std::size_t k = 0; k < n; ++k) row[k] = g.weights.at0(i, k);
              rows.push_back(row);
            }
            return {{"type", "graph_cut"}, {"n", n}, {"weights", rows}};
          },
          [&](const generators::MaxTruncation&) -> json { return {{"type", "max"}, {"n", n}}; },
          [&](const generators::RangeIndicator&) -> json { return {{"type", "range"}, {"n", n}}; },
          [&](const generators::ProperSubsetIndicator&) -> json {
            return {{"type", "proper_subset"}, {"n", n}};
          },
          [&](const generators::ExplicitTable& t) -> json {
            json table = json::object();
            for (std::size_t m = 0; m < t.values.size(); ++m) table[std::to_string(m)] = t.values[m];
            return {{"type", "table"}, {"n", n}, {"values", table}};
          },
          [&](const generators::Modular& m) -> json {
            return {{"type", "modular"}, {"n", n}, {"weights", m.weights}};
          },
          [&](const generators::Sum& s) -> json {
            json terms = json::array();
            for (const auto& t : s.terms) terms.push_back(generator_to_json(t));
            return {{"type", "sum"}, {"n", n}, {"terms", terms}};
          }},
      f.descriptor());
}

inline SetFunction generator_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    const auto n = j.at("n").get<std::size_t>();
    const auto checked = [n](SetFunction f) {
      detail::require_same_length("generator JSON: n", n, f.ground_size());
      return f;
    };
    if (type == "cardinality") return checked(SetFunction::cardinality(io::gain_table_from_json(j.at("gains"))));
    if (type == "truncated_cardinality")
      return checked(SetFunction::truncated(io::gain_table_from_json(j.at("gains")), j.at("m").get<std::size_t>()));
    if (type == "graph_cut") {
      const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
      std::vector<double> flat;
      for (const auto& r : rows) {
        if (r.size() != n) throw DimensionError("graph cut weight row", n, r.size());
        flat.insert(flat.end(), r.begin(), r.end());
      }
      return SetFunction::graph_cut(WeightMatrix(n, std::move(flat)));
    }
    if (type == "max") return SetFunction::max_truncation(n);
    if (type == "range") return SetFunction::range_indicator(n);
    if (type == "proper_subset") return SetFunction::proper_subset_indicator(n);
    if (type == "table") return io::explicit_table_from_json(n, j.at("values"));
    if (type == "modular") return checked(SetFunction::modular(j.at("weights").get<std::vector<double>>()));
    if (type == "sum") {
      std::vector<SetFunction> terms;
      for (const auto& t : j.at("terms")) terms.push_back(generator_from_json(t));
      return checked(SetFunction::sum(std::move(terms)));
    }
    throw ParseError("unknown generator type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator JSON: ") + e.what());
  }
}

inline json model_to_json(const LovaszMallows& m) {
  return {{"generator", generator_to_json(m.generator)},
          {"reference", m.reference},
          {"theta", m.concentration}};
}

inline LovaszMallows lovasz_mallows_from_json(const json& j) {
  try {
    return LovaszMallows(generator_from_json(j.at("generator")), j.at("reference").get<Permutation>(),
                         j.at("theta").get<double>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

inline json model_to_json(const ExtendedLovaszMallows& m) {
  return {{"generator", generator_to_json(m.generator)},
          {"scores", m.scores.data()},
          {"theta", m.concentrations}};
}

inline ExtendedLovaszMallows extended_mallows_from_json(const json& j) {
  try {
    return ExtendedLovaszMallows(generator_from_json(j.at("generator")),
                                 io::score_matrix_from_json(j.at("scores")),
                                 j.at("theta").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

// Cluster labels are 1-based in the serialised form.
inline json clustering_to_json(const ClusteringResult& r) {
  std::vector<std::size_t> labels(r.assignments.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = r.assignments[i] + 1;
  json reps = json::array();
  for (const auto& p : r.representatives) reps.push_back(p);
  return {{"assignments", labels},
          {"representatives", reps},
          {"objective", io::round12(r.objective)},
          {"objective_history", io::rounded(r.objective_history)},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

}  // namespace lbdiv
