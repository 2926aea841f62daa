#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>

#include "lossgame/lossgame.hpp"

namespace lossgame::cli {

namespace {

constexpr const char* kDefaultGrid = "0.3:300:20log";
constexpr std::uint64_t kDefaultHorizon = 1'000'000;

constexpr const char* kExitCodes =
    "Exit codes: 0 ok, 1 solver did not converge, 2 parse error, 3 validation error, 4 size limit, "
    "5 Monte-Carlo coverage failure.";

std::string quoted(const std::string& s) { return '"' + s + '"'; }

std::string user_block(const SystemSpec& spec, CoalitionSet c) {
  std::string s;
  for (int a : to_user_labels(spec, c).members()) {
    if (!s.empty()) s += ',';
    s += std::to_string(a);
  }
  return s;
}

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// Output sink: the --out file if given, else the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ParseError("cannot open output file " + path);
      stream_ = &file_;
    }
    stream_->imbue(std::locale::classic());
  }
  std::ostream& operator*() { return *stream_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

Partition user_partition(const SystemSpec& spec, const std::string& text) {
  return from_user_labels(spec, parse_partition(spec.agent_count(), text));
}

// Block indices of `p` in the order the caller's labels would list them.
std::vector<std::size_t> user_block_order(const SystemSpec& spec, const Partition& p) {
  std::vector<std::size_t> order;
  const Partition user = to_user_labels(spec, p);
  for (CoalitionSet ub : user.blocks()) {
    order.push_back(*p.find_block(from_user_labels(spec, ub)));
  }
  return order;
}

int cmd_wardrop(const RunConfig& cfg, const std::string& partition_text, std::ostream& out) {
  const SystemSpec& spec = *cfg.spec;
  const Partition p = user_partition(spec, partition_text);
  const WardropResult we = wardrop_cached(spec, p);
  Sink sink(cfg.output_path, out);
  *sink << "block,servers,rate,rate_per_server,blocking\n";
  for (std::size_t b : user_block_order(spec, p)) {
    const int n_c = server_count(spec, p[b]);
    *sink << quoted(user_block(spec, p[b])) << ',' << n_c << ',' << format_number(we.rates[b])
          << ',' << format_number(we.rates[b] / n_c) << ',' << format_number(we.common_blocking)
          << '\n';
  }
  return kOk;
}

int cmd_stable(const RunConfig& cfg, std::ostream& out) {
  const SystemSpec& spec = *cfg.spec;
  const auto rows = stable_set_scan(spec, cfg.rule,
                                    cfg.oracle ? PessimalMode::Oracle : PessimalMode::Fast);
  Sink sink(cfg.output_path, out);
  *sink << "rgs,partition,size,rule,stable,witness_mask,witness_kind,scope\n";
  for (const ScanRow& r : rows) {
    const Partition user = to_user_labels(spec, r.partition);
    *sink << user.rgs_string() << ',' << quoted(user.to_string()) << ',' << r.partition.size()
          << ',' << to_string(r.verdict.rule) << ',' << (r.verdict.stable ? "yes" : "no") << ',';
    if (r.verdict.witness) {
      *sink << to_user_labels(spec, r.verdict.witness->blocker).mask() << ','
            << to_string(r.verdict.witness->kind);
    } else {
      *sink << ',';
    }
    *sink << ',' << (r.scope == VerdictScope::AllPayoffs ? "all-payoffs" : "proportional")
          << '\n';
  }
  return kOk;
}

int cmd_kstar_sweep(const RunConfig& cfg, std::ostream& out) {
  const SystemSpec& spec = *cfg.spec;
  const std::vector<double> grid = cfg.grid ? *cfg.grid : parse_grid(kDefaultGrid);
  const RegimeTable table = regime_crosscheck(spec, grid);

  std::vector<int> ks;
  for (int k : achievable_server_counts(spec)) {
    if (2 * k >= spec.total_servers() && k < spec.total_servers()) ks.push_back(k);
  }
  Sink sink(cfg.output_path, out);
  *sink << "lambda,kstar,kstar_set,grand_blocking";
  for (int k : ks) *sink << ",psi_over_lambda_" << k;
  *sink << '\n';
  for (const RegimeRow& row : table.rows) {
    const SystemSpec at = spec.with_total_rate(row.total_rate);
    *sink << format_number(row.total_rate) << ',';
    if (!row.k_star.maximizers.empty()) *sink << row.k_star.representative();
    *sink << ',' << join_ints(row.k_star.maximizers, ' ') << ','
          << format_number(row.grand_blocking);
    for (int k : ks) *sink << ',' << format_number(psi(at, k).psi / row.total_rate);
    *sink << '\n';
  }
  return kOk;
}

int cmd_dynamics(const RunConfig& cfg, const std::string& start_text, std::ostream& out) {
  const SystemSpec& spec = *cfg.spec;
  const Partition p0 = start_text.empty() ? Partition::singletons(spec.agent_count())
                                          : user_partition(spec, start_text);
  const DynamicsTrace trace =
      run(spec, Configuration{p0, proportional_payoff(spec, p0)}, cfg.rule, cfg.seed,
          cfg.max_steps);
  {
    Sink sink(cfg.output_path, out);
    write_trace_csv(*sink, spec, trace);
  }
  out << "# terminal=" << to_string(trace.terminal) << " steps=" << trace.length()
      << " partition=" << to_user_labels(spec, trace.final_config().partition).to_string()
      << '\n';
  return kOk;
}

int cmd_validate(const RunConfig& cfg, const std::string& partition_text,
                 std::uint64_t horizon, std::ostream& out) {
  const SystemSpec& spec = *cfg.spec;
  const Partition p = partition_text.empty() ? Partition::singletons(spec.agent_count())
                                             : user_partition(spec, partition_text);
  const auto reports = validate_we(spec, p, horizon, cfg.seed);
  bool all = true;
  Sink sink(cfg.output_path, out);
  *sink << "block,servers,rate,analytic,simulated,half_width,covered\n";
  for (std::size_t b : user_block_order(spec, p)) {
    const BlockReport& r = reports[b];
    *sink << quoted(user_block(spec, r.block)) << ',' << server_count(spec, r.block) << ','
          << format_number(r.rate) << ',' << format_number(r.analytic) << ','
          << format_number(r.estimate.blocked_fraction) << ','
          << format_number(r.estimate.half_width_95) << ',' << (r.covered ? "yes" : "no")
          << '\n';
    all = all && r.covered;
  }
  return all ? kOk : kSimulation;
}

}  // namespace

std::string format_number(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(12);
  s << v;
  return s.str();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string field; std::getline(in, field, ':');) parts.push_back(field);
  if (parts.size() != 3 && parts.size() != 4) {
    throw ParseError("grid must look like start:stop:points[log|lin], got \"" + text + "\"");
  }
  std::string count_text = parts[2];
  std::string scale = parts.size() == 4 ? parts[3] : "";
  for (const char* suffix : {"log", "lin"}) {
    if (count_text.size() > 3 && count_text.ends_with(suffix)) {
      scale = suffix;
      count_text.resize(count_text.size() - 3);
    }
  }
  if (scale.empty()) scale = "log";
  if (scale != "log" && scale != "lin") throw ParseError("grid scale must be log or lin");

  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  try {
    std::size_t used = 0;
    start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    points = std::stoi(count_text, &used);
    if (used != count_text.size()) throw std::invalid_argument("points");
  } catch (const std::logic_error&) {
    throw ParseError("bad number in grid \"" + text + "\"");
  }
  if (!(start > 0.0) || !(stop >= start) || points < 1) {
    throw ParseError("grid needs 0 < start <= stop and at least one point");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] =
        scale == "log" ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                       : start + t * (stop - start);
  }
  grid.front() = start;
  grid.back() = stop;
  return grid;
}

SystemSpec read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
    return SystemSpec(j.at("agents").get<std::vector<int>>(), j.at("lambda").get<double>(),
                      j.value("mu", 1.0));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
}

std::string config_json(const SystemSpec& spec) {
  nlohmann::json j;
  j["agents"] = spec.user_server_counts();
  j["lambda"] = spec.total_rate();
  j["mu"] = spec.service_rate();
  return j.dump() + "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wardrop splits and coalition stability for loss-system providers", "lossgame"};
  app.footer(kExitCodes);
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::vector<int> agents;
  double lambda = 0.0;
  double mu = 1.0;
  std::string rule_text = "rb-ia";
  std::string grid_text;
  std::string config_path;
  bool emit_config = false;
  RunConfig cfg;

  auto* agents_opt = app.add_option("--agents", agents, "Servers per agent, e.g. 9,7,6,5,3")
                         ->delimiter(',');
  auto* lambda_opt = app.add_option("--lambda", lambda, "Total arrival rate");
  auto* mu_opt = app.add_option("--mu", mu, "Service rate per server (default 1)");
  app.add_option("--rule", rule_text, "Stability rule: rb-ia, rb-pa or gb-pa")
      ->check(CLI::IsMember({"rb-ia", "rb-pa", "gb-pa", "rb_ia", "rb_pa", "gb_pa"},
                            CLI::ignore_case));
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--grid", grid_text, "Rate grid start:stop:points[log|lin]");
  app.add_option("--out", cfg.output_path, "Write the main output to this file");
  app.add_option("--config", config_path, "JSON system file; flags override its values");
  app.add_flag("--oracle", cfg.oracle, "Exact pessimal values by enumeration");
  app.add_option("--max-steps", cfg.max_steps, "Step cap for dynamics")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--emit-config", emit_config, "Print the resolved system as JSON and exit");

  std::string partition_text;
  auto* wardrop = app.add_subcommand("wardrop", "Equilibrium split for a partition");
  wardrop->add_option("partition", partition_text, "Blocks like 0,1|2|3,4")->required();

  auto* stable = app.add_subcommand("stable", "Classify every partition under --rule");
  auto* sweep = app.add_subcommand("kstar-sweep", "k*, grand-coalition blocking and Psi/Lambda along --grid");

  std::string start_text;
  auto* dynamics = app.add_subcommand("dynamics", "Random blocking dynamics under --rule");
  dynamics->add_option("--start", start_text, "Initial partition (default all singletons)");

  std::string validate_partition_text;
  std::uint64_t horizon = kDefaultHorizon;
  auto* validate = app.add_subcommand("validate", "Monte-Carlo check of the equilibrium split");
  validate->add_option("--partition", validate_partition_text,
                       "Partition to simulate (default all singletons)");
  validate->add_option("--horizon", horizon, "Arrivals per block")->check(CLI::Range(10'000, 1'000'000'000));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  try {
    const auto rule = parse_rule(rule_text);
    if (!rule) throw ParseError("unknown rule " + rule_text);
    cfg.rule = *rule;
    if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);

    std::optional<SystemSpec> base;
    if (!config_path.empty()) base = read_config(config_path);
    std::vector<int> counts = agents_opt->count() ? agents
                              : base            ? base->user_server_counts()
                                                : std::vector<int>{};
    if (counts.empty()) throw ParseError("no agents given (use --agents or --config)");
    const double total = lambda_opt->count() ? lambda : base ? base->total_rate() : -1.0;
    if (!lambda_opt->count() && !base) throw ParseError("no arrival rate given (use --lambda)");
    const double service = mu_opt->count() ? mu : base ? base->service_rate() : mu;
    cfg.spec = SystemSpec(std::move(counts), total, service);

    if (emit_config) {
      Sink sink(cfg.output_path, out);
      *sink << config_json(*cfg.spec);
      return kOk;
    }
    if (*wardrop) return cmd_wardrop(cfg, partition_text, out);
    if (*stable) return cmd_stable(cfg, out);
    if (*sweep) return cmd_kstar_sweep(cfg, out);
    if (*dynamics) return cmd_dynamics(cfg, start_text, out);
    if (*validate) return cmd_validate(cfg, validate_partition_text, horizon, out);
    err << app.help();
    return kParse;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kSize;
  } catch (const NoConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace lossgame::cli
