#include "sumtdp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "sumtdp/csv.hpp"
#include "sumtdp/generators.hpp"
#include "sumtdp/inference.hpp"
#include "sumtdp/oracle.hpp"
#include "sumtdp/simharness.hpp"

namespace sumtdp {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Options {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool trace = false;
  std::string out;
  std::string manifest;
  std::string format = "json";

  std::string stats_path;
  std::string data_path;
  std::size_t b_count = 200;
  std::string scheme = "signflip";
  std::size_t group_size = 0;

  std::string combiner = "identity";
  std::optional<double> truncate;
  double ground = 0.0;
  std::optional<std::size_t> truncate_rank;
  std::string reduce = "auto";
  std::string max_iter = "50";
  std::string budget_mode = "per-evaluation";

  std::string sets;
  std::string order;
  double gamma = 0.5;
  std::string config;
  bool full_scale = false;
};

/// Raised for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << x;
  return s.str();
}

BranchBudget parse_budget(const std::string& text) {
  if (text == "inf" || text == "unlimited") return BranchBudget::unlimited();
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty() || text[0] == '-') {
    throw UsageError("--max-iter expects a nonnegative integer or 'inf', got '" + text + "'");
  }
  return {static_cast<std::size_t>(v)};
}

struct Problem {
  StatisticMatrix stats;
  EngineOptions engine;
  std::optional<TruncationRule> truncation;
};

StatisticMatrix load_raw(const Options& opt, const Combiner& combiner) {
  if (!opt.stats_path.empty() && !opt.data_path.empty()) throw UsageError("give either --stats or --data, not both");
  if (!opt.stats_path.empty()) return read_statistic_matrix_file(opt.stats_path);
  if (opt.data_path.empty()) throw UsageError("an input is required: --stats <csv> or --data <csv>");

  const NumericTable table = read_numeric_table_file(opt.data_path);
  const RawData data(table.rows, table.header.size(), table.values);
  TransformationScheme scheme;
  scheme.b_count = opt.b_count;
  scheme.seed = opt.seed;
  ColumnStatistic stat;
  if (opt.scheme == "signflip") {
    scheme.kind = SchemeKind::SignFlip;
    if (combiner.takes_pvalues()) {
      stat = [](const RawData& d) {
        const boost::math::students_t dist(static_cast<double>(d.n() - 1));
        auto t = one_sample_t(d);
        for (double& x : t) x = std::max(2.0 * boost::math::cdf(boost::math::complement(dist, x)), 1e-300);
        return t;
      };
    } else {
      stat = [](const RawData& d) { return one_sample_t(d); };
    }
  } else if (opt.scheme == "permutation") {
    scheme.kind = SchemeKind::RowPermutation;
    if (opt.group_size == 0) throw UsageError("--scheme permutation needs --group-size");
    if (combiner.takes_pvalues()) throw UsageError("p-value combiners with --data need --scheme signflip");
    const std::size_t n1 = opt.group_size;
    stat = [n1](const RawData& d) { return two_sample_t(d, n1); };
  } else {
    throw UsageError("unknown --scheme '" + opt.scheme + "'");
  }
  StatisticMatrix raw = transformed_statistics(data, scheme, stat);
  return StatisticMatrix(raw.b_count(), raw.hyp_count(), raw.values(), table.header);
}

Problem prepare(const Options& opt) {
  const Combiner combiner = parse_combiner(opt.combiner);
  Problem p;
  p.stats = apply_combiner(load_raw(opt, combiner), combiner);
  if (opt.truncate && opt.truncate_rank) throw UsageError("--truncate and --truncate-rank are exclusive");
  if (opt.truncate || opt.truncate_rank) {
    TruncationRule rule;
    rule.t_ring = opt.ground;
    rule.t_star = opt.truncate ? *opt.truncate : threshold_from_rank(p.stats, *opt.truncate_rank);
    p.stats = truncate(p.stats, rule);
    p.truncation = rule;
  }
  if (opt.reduce == "on") {
    p.engine.reduce = true;
  } else if (opt.reduce == "auto") {
    p.engine.reduce = p.truncation.has_value();
  } else if (opt.reduce != "off") {
    throw UsageError("--reduce expects on, off or auto");
  }
  p.engine.t_ring = opt.ground;
  p.engine.budget = parse_budget(opt.max_iter);
  p.engine.mode = parse_budget_mode(opt.budget_mode);
  p.engine.threads = std::max<std::size_t>(opt.threads, 1);
  return p;
}

Index resolve(const json& item, const std::vector<std::string>& names) {
  if (item.is_number_integer()) {
    const long long k = item.get<long long>();
    if (k < 1 || static_cast<std::size_t>(k) > names.size()) {
      throw InputError("index " + std::to_string(k) + " outside 1.." + std::to_string(names.size()));
    }
    return static_cast<Index>(k - 1);
  }
  if (item.is_string()) {
    const auto name = item.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    throw InputError("unknown hypothesis name '" + name + "'");
  }
  throw InputError("set members must be 1-based integers or column names");
}

json parse_json_argument(const std::string& text, const char* flag) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const std::string body = first != std::string::npos && text[first] == '[' ? text : slurp(text);
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(flag) + ": " + e.what());
  }
}

std::vector<IndexSet> parse_sets(const std::string& text, const std::vector<std::string>& names) {
  if (text.empty()) {
    IndexSet all(names.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return {all};
  }
  const json j = parse_json_argument(text, "--sets");
  if (!j.is_array() || j.empty()) throw InputError("--sets: expected a nonempty JSON array");
  const bool flat = !j.front().is_array();
  std::vector<IndexSet> out;
  const auto one = [&](const json& arr) {
    if (!arr.is_array() || arr.empty()) throw InputError("--sets: every set must be a nonempty array");
    std::vector<Index> idx;
    for (const auto& item : arr) idx.push_back(resolve(item, names));
    out.push_back(make_index_set(std::move(idx), names.size()));
  };
  if (flat) {
    one(j);
  } else {
    for (const auto& arr : j) one(arr);
  }
  return out;
}

std::vector<Index> parse_order(const std::string& text, const std::vector<std::string>& names) {
  if (text.empty()) throw UsageError("largest needs --order");
  json j;
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool inline_text = (first != std::string::npos && text[first] == '[') || !std::filesystem::exists(text);
  std::string body = inline_text ? text : slurp(text);
  const auto lead = body.find_first_not_of(" \t\r\n");
  if (lead != std::string::npos && body[lead] == '[') {
    j = parse_json_argument(body, "--order");
  } else {
    // Plain list: tokens separated by whitespace or commas.
    for (char& c : body) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(body);
    j = json::array();
    for (std::string tok; in >> tok;) {
      std::size_t pos = 0;
      long long k = 0;
      try {
        k = std::stoll(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == tok.size()) {
        j.push_back(k);
      } else {
        j.push_back(tok);
      }
    }
  }
  if (!j.is_array()) throw InputError("--order: expected a list");
  std::vector<Index> order;
  for (const auto& item : j) order.push_back(resolve(item, names));
  return order;
}

json one_based(const IndexSet& set) {
  json arr = json::array();
  for (Index i : set) arr.push_back(i + 1);
  return arr;
}

struct Output {
  std::ostream* stream;
  std::unique_ptr<std::ofstream> file;
};

Output open_output(const std::string& path, std::ostream& fallback) {
  if (path.empty()) return {&fallback, nullptr};
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw InputError("cannot write '" + path + "'");
  std::ostream* s = f.get();
  return {s, std::move(f)};
}

void write_records(std::ostream& out, const json& records, const std::vector<std::string>& columns,
                   const std::string& format) {
  if (format == "json") {
    out << records.dump(2) << '\n';
    return;
  }
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      if (!r.contains(columns[c])) continue;
      const json& v = r.at(columns[c]);
      if (v.is_string()) {
        out << '"' << v.get<std::string>() << '"';
      } else if (v.is_number_float()) {
        out << format_double(v.get<double>());
      } else {
        out << v.dump();
      }
    }
    out << '\n';
  }
}

json options_json(const Options& o, const std::string& command) {
  json j = {{"command", command},         {"alpha", o.alpha},       {"seed", o.seed},
            {"threads", o.threads},       {"format", o.format},     {"combiner", o.combiner},
            {"ground", o.ground},         {"reduce", o.reduce},     {"max_iter", o.max_iter},
            {"budget_mode", o.budget_mode}};
  if (!o.stats_path.empty()) j["stats"] = o.stats_path;
  if (!o.data_path.empty()) {
    j["data"] = o.data_path;
    j["b"] = o.b_count;
    j["scheme"] = o.scheme;
    if (o.group_size) j["group_size"] = o.group_size;
  }
  if (o.truncate) j["truncate"] = *o.truncate;
  if (o.truncate_rank) j["truncate_rank"] = *o.truncate_rank;
  if (!o.sets.empty()) j["sets"] = o.sets;
  if (command == "largest") {
    j["order"] = o.order;
    j["gamma"] = o.gamma;
  }
  if (command == "simulate") {
    j["config"] = o.config;
    j["full_scale"] = o.full_scale;
  }
  return j;
}

int cmd_test(const Options& opt, std::ostream& out) {
  const Problem p = prepare(opt);
  const auto sets = parse_sets(opt.sets, p.stats.names());
  const CenteredMatrix c = center(p.stats);
  const TestConfig cfg(opt.alpha, p.stats.b_count());
  json records = json::array();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    json r = {{"set_id", k + 1}, {"size", sets[k].size()}};
    if (cfg.has_power()) {
      r["quantile"] = subset_quantile(c, sets[k], cfg);
      r["reject"] = reject(c, sets[k], cfg);
    } else {
      r["reject"] = false;
    }
    records.push_back(r);
  }
  write_records(out, records, {"set_id", "size", "quantile", "reject"}, opt.format);
  return 0;
}

void write_trace(std::ostream& trace, std::size_t set_id, const DiscoveryEngine& engine, const IndexSet& set,
                 const DiscoveryBound& bound) {
  const TestConfig& cfg = engine.config();
  if (!cfg.has_power()) return;
  CenteredMatrix c = engine.centered();
  IndexSet query = set;
  if (engine.options().reduce) {
    const ReducedProblem red = reduce(engine.statistics(), set, engine.options().t_ring);
    c = center(red.matrix);
    query = red.query;
  }
  for (const auto& [z, verdict] : bound.steps) {
    if (z < 1 || z > query.size()) continue;
    for (const auto& row : bound_path_table(c, query, z, cfg)) {
      trace << set_id << ',' << z << ',' << to_string(verdict) << ',' << row.size << ',' << format_double(row.bound)
            << ',' << format_double(row.path) << '\n';
    }
  }
}

int cmd_tdp(const Options& opt, std::ostream& out, std::ostream& err) {
  Problem p = prepare(opt);
  const auto sets = parse_sets(opt.sets, p.stats.names());
  const DiscoveryEngine engine(std::move(p.stats), opt.alpha, p.engine);
  const auto results = simultaneous_report(engine, sets);

  json records = json::array();
  bool failed = false;
  for (std::size_t k = 0; k < results.size(); ++k) {
    json r = {{"set_id", k + 1}, {"size", sets[k].size()}};
    if (results[k].bound) {
      const auto& b = *results[k].bound;
      r["d"] = b.d;
      r["tdp"] = b.tdp;
      r["converged"] = b.converged;
      r["iterations"] = b.iterations;
    } else {
      r["error"] = results[k].error;
      failed = true;
    }
    records.push_back(r);
  }
  write_records(out, records, {"set_id", "size", "d", "tdp", "converged", "iterations", "error"}, opt.format);

  if (opt.trace) {
    Output trace = open_output(opt.out.empty() ? "" : opt.out + ".trace.csv", err);
    *trace.stream << "set_id,z,verdict,v,bound,path\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (results[k].bound) write_trace(*trace.stream, k + 1, engine, sets[k], *results[k].bound);
    }
  }
  return failed ? 2 : 0;
}

int cmd_largest(const Options& opt, std::ostream& out) {
  Problem p = prepare(opt);
  const auto names = p.stats.names();
  NestedQuery nested{parse_order(opt.order, names), opt.gamma};
  const DiscoveryEngine engine(std::move(p.stats), opt.alpha, p.engine);
  const LargestSubset r = largest_subset(nested, engine);
  IndexSet set(nested.ordering.begin(), nested.ordering.begin() + static_cast<std::ptrdiff_t>(r.size));
  std::sort(set.begin(), set.end());
  json rec = {{"size", r.size}, {"d", r.d}, {"tdp", r.tdp}, {"gamma", opt.gamma}, {"set", one_based(set)}};
  if (opt.format == "json") {
    out << rec.dump(2) << '\n';
  } else {
    json flat = rec;
    flat.erase("set");
    write_records(out, json::array({flat}), {"size", "d", "tdp", "gamma"}, opt.format);
  }
  return 0;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  Options unlimited = opt;
  unlimited.max_iter = "inf";
  Problem p = prepare(unlimited);
  const std::size_t m = p.stats.hyp_count();
  const DiscoveryEngine engine(p.stats, opt.alpha, p.engine);
  const ExhaustiveOracle oracle(center(p.stats), engine.config());

  std::vector<IndexSet> subsets;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
    IndexSet s;
    for (Index i = 0; i < m; ++i) {
      if (mask >> i & 1u) s.push_back(i);
    }
    subsets.push_back(std::move(s));
  }
  const auto results = simultaneous_report(engine, subsets);
  json mismatches = json::array();
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const std::size_t expected = subsets[k].size() - oracle.q(subsets[k]);
    if (!results[k].bound || results[k].bound->d != expected) {
      json r = {{"set", one_based(subsets[k])}, {"oracle_d", expected}};
      if (results[k].bound) {
        r["d"] = results[k].bound->d;
      } else {
        r["error"] = results[k].error;
      }
      mismatches.push_back(r);
    }
  }
  const json rec = {{"subsets", subsets.size()},
                    {"matches", subsets.size() - mismatches.size()},
                    {"mismatches", mismatches}};
  out << rec.dump(2) << '\n';
  return mismatches.empty() ? 0 : 1;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  if (opt.config.empty() && !opt.full_scale) throw UsageError("simulate needs --config or --paper-scale");
  SimulationConfig cfg = opt.config.empty() ? SimulationConfig{} : load_simulation_config_file(opt.config);
  if (opt.full_scale) {
    cfg.base.m = 1000;
    cfg.base.reps = 1000;
    cfg.a = {0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.9};
    cfg.beta = {0.5, 0.8, 0.95};
    cfg.rho = {0, 0.3, 0.6, 0.9};
    cfg.p_star = {0.005, 0.01, 0.05, 0.1, std::nullopt};
    cfg.base.combiners = {"pearson", "liptak", "cauchy", "vw:-2", "vw:-1", "vw:-0.5", "vw:0", "vw:1", "vw:2"};
  }
  if (opt.threads > 1) cfg.threads = opt.threads;
  cfg.validate();
  write_results_csv(out, run_grid(cfg));
  return 0;
}

void add_input_flags(CLI::App* app, Options& o) {
  app->add_option("--stats", o.stats_path, "CSV of statistics: header, observed row, then transformed rows");
  app->add_option("--data", o.data_path, "CSV of raw observations (rows) by variables (columns)");
  app->add_option("--b", o.b_count, "Number of transformations drawn for --data (identity included)")
      ->check(CLI::PositiveNumber);
  app->add_option("--scheme", o.scheme, "signflip (one-sample t) or permutation (two-sample t)")
      ->check(CLI::IsMember({"signflip", "permutation"}));
  app->add_option("--group-size", o.group_size, "Rows in the first group for --scheme permutation");
  app->add_option("--combiner", o.combiner, "fisher|pearson|liptak|edgington|cauchy|vw:<r>|identity");
  app->add_option("--truncate", o.truncate, "Threshold t*: combined statistics below it become --ground");
  app->add_option("--ground", o.ground, "Ground value for truncation");
  app->add_option("--truncate-rank", o.truncate_rank, "Take t* as the k-th greatest combined statistic")
      ->check(CLI::PositiveNumber);
  app->add_option("--reduce", o.reduce, "Column reduction: on, off, or auto (on when truncating)")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  app->add_option("--max-iter", o.max_iter, "Branch and bound steps per phi evaluation, or 'inf'");
  app->add_option("--budget-mode", o.budget_mode, "per-evaluation or shared")
      ->check(CLI::IsMember({"per-evaluation", "per-z", "shared"}));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Options o;
  CLI::App app{"Closed testing with sum-based permutation tests: true discovery bounds"};
  app.name("sumtdp");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", o.seed, "Seed for drawn transformations and simulations");
  app.add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);
  app.add_flag("--trace", o.trace, "Dump bound/path tables for every evaluated z (CSV)");
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--manifest", o.manifest, "Run manifest path (default <out>.manifest.json, else stderr)");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* test = app.add_subcommand("test", "Permutation test of the intersection hypothesis of each set");
  add_input_flags(test, o);
  test->add_option("--sets", o.sets, "JSON list of sets (1-based indices or names), inline or a file");

  auto* tdp = app.add_subcommand("tdp", "Lower confidence bounds for true discoveries and TDP");
  add_input_flags(tdp, o);
  tdp->add_option("--sets", o.sets, "JSON list of sets (1-based indices or names), inline or a file");

  auto* largest = app.add_subcommand("largest", "Largest prefix of an ordering with TDP bound >= gamma");
  add_input_flags(largest, o);
  largest->add_option("--order", o.order, "Ordering of all hypotheses, inline JSON or a file")->required();
  largest->add_option("--gamma", o.gamma, "Required TDP lower bound")->check(CLI::Range(0.0, 1.0));

  auto* simulate = app.add_subcommand("simulate", "Simulation grid: mean TDP and FWER per combiner");
  simulate->add_option("--config", o.config, "JSON simulation config");
  simulate->add_flag("--paper-scale", o.full_scale, "Full grid with m = 1000 and 1000 replications");

  auto* verify = app.add_subcommand("verify", "Compare d for every subset with exhaustive closed testing");
  add_input_flags(verify, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  int code = 0;
  json inputs = json::array();
  try {
    for (const auto& path : {o.stats_path, o.data_path, o.config}) {
      if (!path.empty()) inputs.push_back({{"path", path}, {"fnv1a64", hex(fnv1a(slurp(path)))}});
    }
    Output target = open_output(o.out, out);
    std::ostream& dest = *target.stream;
    if (command == "test") code = cmd_test(o, dest);
    else if (command == "tdp") code = cmd_tdp(o, dest, err);
    else if (command == "largest") code = cmd_largest(o, dest);
    else if (command == "verify") code = cmd_verify(o, dest);
    else code = cmd_simulate(o, dest);
  } catch (const UsageError& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const std::length_error& e) {
    err << "sumtdp: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "sumtdp: internal error: " << e.what() << '\n';
    return 1;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"command", command},
                   {"config", options_json(o, command)},
                   {"seed", o.seed},
                   {"versions", {{"sumtdp", kVersion}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}}},
                   {"wall_seconds", seconds},
                   {"inputs", inputs},
                   {"exit_code", code}};
  json args = json::array();
  for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  manifest["argv"] = args;
  const std::string path = !o.manifest.empty() ? o.manifest : o.out.empty() ? "" : o.out + ".manifest.json";
  if (path.empty()) {
    err << manifest.dump() << '\n';
  } else {
    std::ofstream f(path);
    if (!f) {
      err << "sumtdp: cannot write manifest '" << path << "'\n";
      return 2;
    }
    f << manifest.dump(2) << '\n';
  }
  return code;
}

}  // namespace sumtdp
