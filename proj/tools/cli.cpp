#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lbdiv/io.hpp"
#include "lbdiv/lbdiv.hpp"

namespace lbdiv::cli {
namespace {

using ojson = nlohmann::ordered_json;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "-" is standard input.
std::string read_text(const std::string& path) {
  if (path == "-") return io::slurp(std::cin);
  auto in = io::open_input(path);
  return io::slurp(in);
}

json read_json_file(const std::string& path) {
  std::istringstream in(read_text(path));
  return io::parse_json(in);
}

ScoreMatrix read_matrix(const std::string& path) {
  if (ends_with(path, ".json")) return io::score_matrix_from_json(read_json_file(path));
  std::istringstream in(read_text(path));
  try {
    return io::read_score_matrix_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<double> flag_vector(const char* flag, const std::string& text) {
  try {
    return io::parse_vector(text);
  } catch (const ParseError& e) {
    throw ParseError(std::string(flag) + ": " + e.what());
  }
}

Permutation flag_permutation(const char* flag, const std::string& text) {
  try {
    return io::parse_permutation(text);
  } catch (const ParseError& e) {
    throw ParseError(std::string(flag) + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string(flag) + ": " + e.what());
  }
}

std::string file_argument(std::string_view spec, std::string_view arg) {
  if (arg.substr(0, 5) != "file=" || arg.size() == 5)
    throw ParseError("generator '" + std::string(spec) + "': expected file=<path>");
  return std::string(arg.substr(5));
}

GainTable read_gains(const std::string& path) {
  if (ends_with(path, ".json")) return io::gain_table_from_json(read_json_file(path));
  std::istringstream in(read_text(path));
  std::vector<double> g;
  for (const auto& row : io::read_csv(in).rows) g.insert(g.end(), row.begin(), row.end());
  return GainTable(std::move(g));
}

WeightMatrix read_weights(const std::string& path) {
  if (ends_with(path, ".json")) {
    const auto rows = read_json_file(path).get<std::vector<std::vector<double>>>();
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw ParseError(path + ": weight matrix must be square");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    WeightMatrix w(rows.size(), std::move(flat));
    w.validate();
    return w;
  }
  std::istringstream in(read_text(path));
  return io::read_weight_matrix_csv(in);
}

SetFunction sized(SetFunction f, std::size_t n, std::string_view spec) {
  if (f.ground_size() != n)
    throw DimensionError("generator '" + std::string(spec) + "' ground set", n, f.ground_size());
  return f;
}

// Recursively rounds every floating-point value to 12 significant digits.
void round_numbers(ojson& j) {
  if (j.is_number_float()) {
    j = io::round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v);
  }
}

std::string csv_cell(const ojson& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += v[i].is_array() ? "|" : ";";
      s += v[i].is_array() ? csv_cell(v[i]) : v[i].dump();
    }
    return s;
  }
  if (v.is_object()) return csv_cell(ojson(v.dump()));
  return v.dump();
}

// Objects become a header plus one row; arrays of objects one row each.
std::string to_csv(const ojson& report) {
  std::vector<ojson> records;
  if (report.is_array()) {
    records.assign(report.begin(), report.end());
  } else {
    records.push_back(report);
  }
  std::string s;
  if (records.empty()) return s;
  bool first = true;
  for (const auto& [key, _] : records.front().items()) {
    s += (first ? "" : ",") + key;
    first = false;
  }
  s += "\n";
  for (const auto& r : records) {
    first = true;
    for (const auto& [_, value] : r.items()) {
      s += (first ? "" : ",") + csv_cell(value);
      first = false;
    }
    s += "\n";
  }
  return s;
}

ojson permutation_json(const Permutation& p) { return p.one_based(); }

struct Globals {
  std::string generator = "cardinality:sqrt";
  std::string tie_rule = "lowest-index";
  std::uint64_t seed = 0x5eed;
  std::string format = "json";
  std::string output;

  TieRule rule() const { return tie_rule == "reject" ? TieRule::Reject : TieRule::LowestIndexFirst; }
  SetFunction make(std::size_t n) const { return parse_generator(generator, n); }
};

ojson divergence_record(const Globals& g, const SetFunction& f, std::span<const double> x,
                        const Permutation& sigma) {
  const auto sigma_x = induced_ordering(x, g.rule());
  ojson r;
  r["value"] = lb_divergence(f, x, sigma, g.rule());
  r["generator"] = g.generator;
  r["sigma"] = permutation_json(sigma);
  r["sigma_x"] = permutation_json(sigma_x);
  r["confidence_bound"] = confidence_bound(f, x);
  r["x"] = std::vector<double>(x.begin(), x.end());
  return r;
}

}  // namespace

SetFunction parse_generator(std::string_view spec, std::size_t n) {
  const auto colon = spec.find(':');
  const auto family = spec.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const auto bad = [&] { return ParseError("unknown generator '" + std::string(spec) + "'"); };

  if (family == "cardinality") {
    if (arg == "sqrt") return SetFunction::cardinality_sqrt(n);
    if (arg == "log") return SetFunction::cardinality(GainTable::log(n));
    return sized(SetFunction::cardinality(read_gains(file_argument(spec, arg))), n, spec);
  }
  if (family == "cut") {
    if (arg == "uniform") return SetFunction::uniform_cut(n);
    return sized(SetFunction::graph_cut(read_weights(file_argument(spec, arg))), n, spec);
  }
  if (family == "topm") {
    std::size_t m = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), m);
    if (arg.empty() || ec != std::errc() || ptr != arg.data() + arg.size())
      throw ParseError("generator '" + std::string(spec) + "': expected topm:<m>");
    if (m < 1 || m > n)
      throw DomainError("topm:" + std::to_string(m) + " needs 1 <= m <= " + std::to_string(n));
    return SetFunction::top_m(n, m);
  }
  if (family == "table") {
    const auto j = read_json_file(file_argument(spec, arg));
    if (j.is_object() && j.contains("type")) return sized(generator_from_json(j), n, spec);
    return io::explicit_table_from_json(n, j);
  }
  if (!arg.empty()) throw bad();
  if (family == "max") return SetFunction::max_truncation(n);
  if (family == "range") return SetFunction::range_indicator(n);
  throw bad();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lovasz-Bregman divergences between score vectors and permutations"};
  app.name("lbdiv");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--generator", g.generator,
                 "cardinality:sqrt | cardinality:log | cardinality:file=<path> | cut:uniform |\n"
                 "cut:file=<path> | topm:<m> | max | range | table:file=<path>")
      ->capture_default_str();
  app.add_option("--tie-rule", g.tie_rule, "how tied scores are ordered")
      ->check(CLI::IsMember({"lowest-index", "reject"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  auto* format_opt =
      app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", g.output, "write the report here instead of standard output");

  // divergence
  auto* div = app.add_subcommand("divergence", "d(x || sigma) for one vector or each row of a file");
  std::string x_text, x_file, sigma_text;
  auto* x_opt = div->add_option("--x", x_text, "comma-separated scores");
  div->add_option("--input", x_file, "CSV/JSON file, one score vector per row")->excludes(x_opt);
  div->add_option("--sigma", sigma_text, "comma-separated 1-based permutation")->required();

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "mean ordering of the rows of a score matrix");
  std::string matrix_file, weights_text;
  double low_confidence = 1e-9;
  agg->add_option("--input", matrix_file, "CSV/JSON score matrix")->required();
  agg->add_option("--weights", weights_text, "comma-separated positive row weights");
  agg->add_option("--low-confidence", low_confidence, "flag means whose total variation is at most this")
      ->capture_default_str();

  // cluster
  auto* clu = app.add_subcommand("cluster", "LB k-means over the rows of a score matrix");
  std::size_t k = 2, max_iter = 100;
  double tol = 1e-9;
  std::vector<std::string> init;
  clu->add_option("--input", matrix_file, "CSV/JSON score matrix")->required();
  clu->add_option("-k,--clusters", k, "number of clusters")->capture_default_str();
  clu->add_option("--max-iter", max_iter)->capture_default_str();
  clu->add_option("--tol", tol)->capture_default_str();
  clu->add_option("--init", init, "initial representative permutation (repeat k times)");

  // eval
  auto* ev = app.add_subcommand("eval", "ranking measures: ndcg, auc, kendall, spearman");
  std::string metric, pi_text, relevance_text, discount_text = "log2", good_text, bad_text;
  std::size_t cutoff = 0;
  ev->add_option("metric", metric)->required()->check(CLI::IsMember({"ndcg", "auc", "kendall", "spearman"}));
  ev->add_option("--sigma", sigma_text, "ordering under evaluation")->required();
  ev->add_option("--pi", pi_text, "second permutation (kendall, spearman)");
  ev->add_option("--relevance", relevance_text, "non-negative relevance per item (ndcg)");
  ev->add_option("--cutoff", cutoff, "ndcg cutoff k (default n)");
  ev->add_option("--discount", discount_text, "log2 or comma-separated discounts (ndcg)")
      ->capture_default_str();
  ev->add_option("--good", good_text, "good items (auc)");
  ev->add_option("--bad", bad_text, "bad items (auc)");

  // mallows
  auto* mal = app.add_subcommand("mallows", "Lovasz-Mallows densities: density, logZ, map");
  std::string action, model_file, theta_text = "1";
  std::size_t samples = 100000;
  unsigned workers = 0;
  bool normalize = false;
  mal->add_option("action", action)->required()->check(CLI::IsMember({"density", "logZ", "map"}));
  mal->add_option("--model", model_file, "model JSON");
  mal->add_option("--sigma", sigma_text, "reference permutation");
  mal->add_option("--theta", theta_text, "concentration (comma-separated per row for map)")
      ->capture_default_str();
  mal->add_option("--x", x_text, "scores in the unit cube (density)");
  mal->add_option("--input", matrix_file, "score matrix (map)");
  mal->add_option("--samples", samples, "Monte-Carlo samples for log Z")->capture_default_str();
  mal->add_option("--workers", workers, "threads for log Z (0 = hardware)")->capture_default_str();
  mal->add_flag("--normalize", normalize, "also estimate log Z and report the normalised density");

  // grid
  auto* grid = app.add_subcommand("grid", "d(x || sigma) over a uniform lattice on [0,1]^n, n = 2 or 3");
  std::size_t resolution = 11;
  grid->add_option("--sigma", sigma_text, "reference permutation of length 2 or 3")->required();
  grid->add_option("--resolution", resolution, "points per axis")->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const auto fail = [&](int code, const std::string& msg) {
    err << "lbdiv: error: " << msg << "\n";
    return code;
  };

  try {
    ojson report;
    bool csv_by_default = false;

    if (*div) {
      const auto sigma = flag_permutation("--sigma", sigma_text);
      const auto f = g.make(sigma.size());
      if (!x_file.empty()) {
        const auto m = read_matrix(x_file);
        report = ojson::array();
        for (std::size_t r = 0; r < m.rows(); ++r) report.push_back(divergence_record(g, f, m.row(r), sigma));
      } else {
        if (x_text.empty()) return fail(kUsage, "divergence needs --x or --input");
        report = divergence_record(g, f, flag_vector("--x", x_text), sigma);
      }
    } else if (*agg) {
      const auto m = read_matrix(matrix_file);
      const auto f = g.make(m.cols());
      std::optional<std::vector<double>> w;
      if (!weights_text.empty()) w = flag_vector("--weights", weights_text);
      const auto mean = mean_ordering(m, f, w, g.rule());
      const double tv = total_variation(mean.mean);
      report["mean_vector"] = mean.mean;
      report["ordering"] = permutation_json(mean.ordering);
      report["objective"] = aggregation_objective(m, f, mean.ordering, w);
      report["total_variation_of_mean"] = tv;
      report["low_confidence"] = tv <= low_confidence;
      report["generator"] = g.generator;
      report["rows"] = m.rows();
    } else if (*clu) {
      const auto m = read_matrix(matrix_file);
      const auto f = g.make(m.cols());
      KMeansOptions opts{.k = k, .max_iter = max_iter, .tol = tol, .seed = g.seed};
      if (!init.empty()) {
        std::vector<Permutation> reps;
        for (const auto& s : init) reps.push_back(flag_permutation("--init", s));
        opts.init = ProvidedInit{std::move(reps)};
      }
      const auto res = lb_kmeans(m, f, opts);
      report = ojson::parse(clustering_to_json(res).dump());
      report["k"] = k;
      report["generator"] = g.generator;
      report["seed"] = g.seed;
    } else if (*ev) {
      const auto sigma = flag_permutation("--sigma", sigma_text);
      report["metric"] = metric;
      if (metric == "kendall" || metric == "spearman") {
        if (pi_text.empty()) return fail(kUsage, metric + " needs --pi");
        const auto pi = flag_permutation("--pi", pi_text);
        if (metric == "kendall") {
          report["value"] = kendall_tau(sigma, pi);
        } else {
          report["value"] = spearman_footrule(sigma, pi);
          report["rank_correlation"] = rank_correlation(sigma, pi);
        }
      } else if (metric == "ndcg") {
        if (relevance_text.empty()) return fail(kUsage, "ndcg needs --relevance");
        const auto r = flag_vector("--relevance", relevance_text);
        const std::size_t kk = cutoff ? cutoff : r.size();
        const auto d = discount_text == "log2" ? DiscountProfile::log2(kk)
                                               : DiscountProfile(flag_vector("--discount", discount_text));
        const auto t = ndcg_terms(r, sigma, d, g.rule());
        report["value"] = t.loss;
        report["ideal_dcg"] = t.ideal_dcg;
        report["dcg"] = t.dcg;
        report["cutoff"] = d.cutoff();
      } else {
        if (good_text.empty() || bad_text.empty()) return fail(kUsage, "auc needs --good and --bad");
        report["value"] = auc_loss(io::parse_items(good_text), io::parse_items(bad_text), sigma);
      }
    } else if (*mal) {
      if (action == "map") {
        std::optional<ExtendedLovaszMallows> model;
        if (!model_file.empty()) {
          model = extended_mallows_from_json(read_json_file(model_file));
        } else {
          if (matrix_file.empty()) return fail(kUsage, "mallows map needs --model or --input");
          auto m = read_matrix(matrix_file);
          auto thetas = flag_vector("--theta", theta_text);
          if (thetas.size() == 1) thetas.assign(m.rows(), thetas.front());
          const std::size_t n = m.cols();
          model.emplace(g.make(n), std::move(m), std::move(thetas));
        }
        const auto map = map_permutation(*model, g.rule());
        const auto d = extended_log_density(*model, map);
        report["map"] = permutation_json(map);
        report["log_density"] = d.value;
        report["normalized"] = d.normalized;
      } else {
        std::optional<LovaszMallows> model;
        if (!model_file.empty()) {
          model = lovasz_mallows_from_json(read_json_file(model_file));
        } else {
          if (sigma_text.empty()) return fail(kUsage, "mallows " + action + " needs --model or --sigma");
          const auto sigma = flag_permutation("--sigma", sigma_text);
          const auto theta = flag_vector("--theta", theta_text);
          if (theta.size() != 1) return fail(kUsage, "--theta must be a single value for " + action);
          model.emplace(g.make(sigma.size()), sigma, theta.front());
        }
        report["sigma"] = permutation_json(model->reference);
        report["theta"] = model->concentration;
        std::optional<LogZEstimate> z;
        if (action == "logZ" || normalize) z = estimate_log_Z(*model, samples, g.seed, workers);
        if (action == "density") {
          if (x_text.empty()) return fail(kUsage, "mallows density needs --x");
          const auto x = flag_vector("--x", x_text);
          const double lp = log_density_unnormalized(*model, x);
          report["x"] = x;
          report["log_density_unnormalized"] = lp;
          if (z) report["log_density"] = lp - z->estimate;
        }
        if (z) {
          report["log_Z"] = z->estimate;
          report["log_Z_std_error"] = z->std_error;
          report["samples"] = samples;
          report["seed"] = g.seed;
        }
      }
    } else if (*grid) {
      const auto sigma = flag_permutation("--sigma", sigma_text);
      const std::size_t n = sigma.size();
      if (n != 2 && n != 3) return fail(kDomain, "grid needs a permutation of length 2 or 3");
      if (resolution < 2) return fail(kDomain, "grid needs --resolution >= 2");
      const auto f = g.make(n);
      csv_by_default = true;
      report = ojson::array();
      std::vector<std::size_t> idx(n, 0);
      std::vector<double> x(n);
      for (;;) {
        for (std::size_t i = 0; i < n; ++i)
          x[i] = static_cast<double>(idx[i]) / static_cast<double>(resolution - 1);
        ojson row;
        for (std::size_t i = 0; i < n; ++i) row["x" + std::to_string(i + 1)] = x[i];
        row["value"] = lb_divergence(f, x, sigma);
        report.push_back(std::move(row));
        std::size_t d = n;
        while (d > 0 && ++idx[d - 1] == resolution) idx[--d] = 0;
        if (d == 0) break;
      }
    }

    round_numbers(report);
    const bool csv = format_opt->count() ? g.format == "csv" : csv_by_default;
    const std::string text = csv ? to_csv(report) : report.dump(2) + "\n";
    if (g.output.empty()) {
      out << text;
    } else {
      std::ofstream file(g.output);
      if (!file) return fail(kInput, "cannot write '" + g.output + "'");
      file << text;
    }
    return kOk;
  } catch (const ParseError& e) {
    return fail(kInput, e.what());
  } catch (const TieError& e) {
    return fail(kDomain, e.what());
  } catch (const DimensionError& e) {
    return fail(kDomain, e.what());
  } catch (const DomainError& e) {
    return fail(kDomain, e.what());
  } catch (const LimitError& e) {
    return fail(kDomain, e.what());
  } catch (const Error& e) {
    return fail(kInput, e.what());
  } catch (const json::exception& e) {
    return fail(kInput, e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, e.what());
  }
}

}  // namespace lbdiv::cli
