#include "qwlift/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "qwlift/analysis.hpp"
#include "qwlift/bridge.hpp"
#include "qwlift/error.hpp"
#include "qwlift/io.hpp"
#include "qwlift/kernels.hpp"
#include "qwlift/quantum_walk.hpp"

#ifndef QWLIFT_VERSION
#define QWLIFT_VERSION "0.0.0"
#endif

namespace qwlift::cli {

namespace {

using io::json;
using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::InvalidArgument, "SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

// Doubles in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> read_decimals(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, what + ": bad number '" + tok + "'");
    }
  }
  return values;
}

class Session {
 public:
  Session(const RunConfig& config, std::ostream& err) : config_(config), err_(err) {}

  std::shared_ptr<const Graph> graph(const std::string& path) {
    const std::string text = read_file(path);
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    return std::make_shared<const Graph>(io::parse_graph(text, path));
  }

  std::shared_ptr<const Graph> only_graph() {
    if (config_.graph_paths.size() != 1) {
      fail(ErrorCode::InvalidArgument, config_.command + " takes exactly one graph file");
    }
    return graph(config_.graph_paths.front());
  }

  WalkOperator walk(const std::shared_ptr<const Graph>& g) {
    if (!g->rotation_map()) {
      fail(ErrorCode::RotationMismatch, "a coined walk needs a graph with a rotation map");
    }
    const std::size_t m = g->rotation_map()->front().size();
    if (config_.coin == "fourier") return coined_walk(g, fourier_coin(m));
    const std::string text = read_file(config_.coin);
    inputs_.push_back({{"path", config_.coin}, {"sha256", sha256_hex(text)}});
    const auto values = read_decimals(text, config_.coin);
    if (values.size() != 2 * m * m) {
      fail(ErrorCode::DimMismatch, "coin file has " + std::to_string(values.size()) +
                                       " numbers, expected " + std::to_string(2 * m * m));
    }
    Eigen::MatrixXcd C(idx(m), idx(m));
    for (std::size_t i = 0; i < m * m; ++i) {
      C(idx(i / m), idx(i % m)) = Complex(values[2 * i], values[2 * i + 1]);
    }
    return coined_walk(g, CoinOperator(std::move(C)));
  }

  QuantumState state(const WalkOperator& w) {
    if (!config_.state_path.empty()) {
      const std::string text = read_file(config_.state_path);
      inputs_.push_back({{"path", config_.state_path}, {"sha256", sha256_hex(text)}});
      const auto values = read_decimals(text, config_.state_path);
      if (values.size() != 2 * w.dimension()) {
        fail(ErrorCode::DimMismatch, "state file has " + std::to_string(values.size()) +
                                         " numbers, expected " + std::to_string(2 * w.dimension()));
      }
      Eigen::VectorXcd psi(idx(w.dimension()));
      for (std::size_t i = 0; i < w.dimension(); ++i) psi[idx(i)] = Complex(values[2 * i], values[2 * i + 1]);
      return QuantumState(std::move(psi));
    }
    const auto comma = config_.start.find(',');
    if (comma == std::string::npos) {
      fail(ErrorCode::ParseError, "--start expects 'k,v', got '" + config_.start + "'");
    }
    const std::string coin = config_.start.substr(0, comma);
    const std::string vertex = config_.start.substr(comma + 1);
    std::size_t k = 0;
    if (coin == "L" || coin == "R") {
      if (w.coin_dim() != 2) fail(ErrorCode::InvalidArgument, "L/R coin labels need m = 2");
      k = coin == "L" ? 0 : 1;
    } else {
      k = parse_count(coin, "--start coin");
    }
    return QuantumState::basis(w.coin_dim(), w.vertices(), k, parse_count(vertex, "--start vertex"));
  }

  Distribution target(const std::shared_ptr<const Graph>& g) {
    if (config_.target == "uniform") return Distribution::uniform(g->size());
    if (config_.target != "pi-q") fail(ErrorCode::InvalidArgument, "unknown target " + config_.target);
    const WalkOperator w = walk(g);
    return average_mixing_distribution(w, state(w));
  }

  BridgeKind bridge_kind() const {
    if (config_.bridge == "maxflow") return BridgeKind::MaxFlow;
    if (config_.bridge == "tree") return BridgeKind::TreeRoute;
    fail(ErrorCode::InvalidArgument, "unknown bridge kind " + config_.bridge);
  }

  TransitionMatrix chain(const std::shared_ptr<const Graph>& g) const {
    if (config_.chain == "simple") return simple_walk(g);
    if (config_.chain == "lazy") return lazy(simple_walk(g));
    fail(ErrorCode::InvalidArgument, "unknown chain " + config_.chain);
  }

  json manifest() const {
    json params = {{"coin", config_.coin},
                   {"start", config_.state_path.empty() ? config_.start : "state-file"},
                   {"epsilon", config_.epsilon},
                   {"horizon", config_.horizon ? json(*config_.horizon) : json(nullptr)},
                   {"seed", config_.seed},
                   {"root", config_.root},
                   {"target", config_.target},
                   {"bridge", config_.bridge},
                   {"chain", config_.chain}};
    if (config_.command == "cycle-demo") {
      params["sizes"] = config_.sizes;
      params["samples"] = config_.samples;
    }
    return {{"tool", "qwlift"},
            {"version", QWLIFT_VERSION},
            {"schema_version", io::kSchemaVersion},
            {"command", config_.command},
            {"inputs", inputs_},
            {"parameters", std::move(params)},
            {"tolerances",
             {{"negative_clamp", kNegativeTolerance},
              {"column_sum", kSumTolerance},
              {"unitarity", kUnitarityTolerance},
              {"state_norm", kStateNormTolerance},
              {"phase_cluster", kDefaultPhaseTolerance},
              {"flow_augment", kAugmentThreshold},
              {"stationarity", kStationarityTolerance},
              {"diameter_mixing", kDiameterMixingTolerance}}}};
  }

  std::ostream& err() { return err_; }

 private:
  static std::size_t parse_count(const std::string& s, const std::string& what) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, what + ": expected a non-negative integer, got '" + s + "'");
    }
  }

  const RunConfig& config_;
  std::ostream& err_;
  json inputs_ = json::array();
};

struct Artifact {
  json result;
  std::string csv;  // filled when the command has a CSV form
  bool claim_failed = false;
};

std::string curve_csv(const std::vector<double>& curve) {
  std::ostringstream out;
  io::write_curve_csv(out, curve);
  return out.str();
}

Artifact cmd_pi_q(const RunConfig&, Session& s) {
  const auto g = s.only_graph();
  const WalkOperator w = s.walk(g);
  const QuantumState psi = s.state(w);
  const SpectralDecomposition spectrum = spectral_projectors(w);
  const Distribution pi_q = average_mixing_distribution(spectrum, w.vertices(), psi);
  const auto residuals = spectrum.residuals(w.matrix());
  Artifact a;
  a.result = {{"n", w.vertices()},
              {"coin_dim", w.coin_dim()},
              {"pi_q", io::to_json(pi_q)},
              {"spectrum", io::to_json(spectrum)},
              {"unitarity_residual", unitarity_residual(w.matrix())},
              {"projector_residuals",
               {{"idempotent", residuals.idempotent},
                {"self_adjoint", residuals.self_adjoint},
                {"completeness", residuals.completeness},
                {"reconstruction", residuals.reconstruction},
                {"orthogonality", residuals.orthogonality}}}};
  std::ostringstream csv;
  csv << "v,pi_q\n";
  for (std::size_t v = 0; v < pi_q.size(); ++v) csv << v << ',' << io::format_double(pi_q[v]) << '\n';
  a.csv = csv.str();
  return a;
}

Artifact cmd_bridge(const RunConfig& c, Session& s) {
  const auto g = s.only_graph();
  const Distribution target = s.target(g);
  const StochasticBridge b = make_bridge(s.bridge_kind(), g, c.root, target);
  Artifact a;
  a.result = {{"bridge", io::to_json(b)},
              {"target", io::to_json(target)},
              {"product_tv_error", bridge_product_error(b, target)}};
  std::ostringstream csv;
  csv << "step,row,col,value\n";
  for (std::size_t t = 0; t < b.matrices.size(); ++t) {
    const auto& P = b.matrices[t].entries();
    for (Index j = 0; j < P.cols(); ++j) {
      for (Index i = 0; i < P.rows(); ++i) {
        if (P(i, j) != 0.0) csv << t + 1 << ',' << i << ',' << j << ',' << io::format_double(P(i, j)) << '\n';
      }
    }
  }
  a.csv = csv.str();
  return a;
}

Artifact cmd_lift(const RunConfig&, Session& s) {
  const auto g = s.only_graph();
  const Distribution target = s.target(g);
  const LiftedChain chain = assemble_d_lift(g, target, metropolis_chain(g, target), s.bridge_kind());
  const LiftConsistencyReport rep = check_lift_consistency(chain);
  Artifact a;
  a.result = {{"lifted_chain", io::to_json(chain)},
              {"target", io::to_json(target)},
              {"consistency",
               {{"stochasticity_residual", rep.stochasticity_residual},
                {"min_entry", rep.min_entry},
                {"locality_violations", rep.locality_violations},
                {"layer_locality_violations", d_lift_locality_violations(chain)},
                {"init_marginal_residual", rep.init_marginal_residual},
                {"commuting_residual", rep.commuting_residual ? json(*rep.commuting_residual)
                                                               : json(nullptr)}}}};
  std::ostringstream csv;
  csv << "row,col,value\n";
  for (Index j = 0; j < chain.transition.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(chain.transition, j); it; ++it) {
      csv << it.row() << ',' << j << ',' << io::format_double(it.value()) << '\n';
    }
  }
  a.csv = csv.str();
  return a;
}

Artifact cmd_verify(const RunConfig& c, Session& s) {
  const auto g = s.only_graph();
  const Distribution target = s.target(g);
  const LiftedChain chain = assemble_d_lift(g, target, metropolis_chain(g, target), s.bridge_kind());
  const std::size_t D = diameter(*g);
  const DiameterMixingReport rep =
      verify_diameter_mixing(chain, target, c.horizon.value_or(4 * std::max<std::size_t>(D, 1)));
  Artifact a;
  a.result = {{"report", io::to_json(rep)},
              {"target", io::to_json(target)},
              {"lifted_states", chain.lifted_size()}};
  a.csv = curve_csv(rep.tv_curve);
  a.claim_failed = !rep.passed;
  if (!rep.passed) {
    s.err() << "verify: TV after D = " << D << " reached " << rep.max_after_diameter << " > "
            << kDiameterMixingTolerance << '\n';
  }
  return a;
}

Artifact cmd_mix_time(const RunConfig& c, Session& s) {
  const auto g = s.only_graph();
  const MixingReport rep = mixing_report(s.chain(g), c.epsilon, c.horizon);
  Artifact a;
  a.result = {{"chain", c.chain}, {"report", io::to_json(rep)}};
  a.csv = curve_csv(rep.tv_curve);
  return a;
}

Artifact cmd_conductance(const RunConfig& c, Session& s) {
  const auto g = s.only_graph();
  const TransitionMatrix P = s.chain(g);
  const ConductanceReport rep = conductance(P, c.epsilon);
  Artifact a;
  a.result = {{"chain", c.chain}, {"report", io::to_json(rep)}};
  try {
    const SinclairReport sandwich = sinclair_check(P, c.epsilon, c.horizon);
    a.result["mixing_time"] = sandwich.mixing_time;
    a.result["sinclair_holds"] = sandwich.holds;
  } catch (const Error& e) {
    a.result["mixing_time"] = nullptr;
    a.result["sinclair_note"] = std::string(to_string(e.code()));
  }
  std::ostringstream csv;
  csv << "phi,lower_bound,upper_bound,subset\n"
      << io::format_double(rep.phi) << ',' << io::format_double(rep.lower_bound) << ','
      << io::format_double(rep.upper_bound) << ',';
  for (std::size_t i = 0; i < rep.argmin_subset.size(); ++i) {
    csv << (i ? " " : "") << rep.argmin_subset[i];
  }
  csv << '\n';
  a.csv = csv.str();
  return a;
}

Artifact cmd_compare(const RunConfig& c, Session& s) {
  if (c.graph_paths.empty()) fail(ErrorCode::InvalidArgument, "compare needs at least one graph");
  std::vector<ComparisonRow> rows;
  for (const auto& path : c.graph_paths) {
    const auto g = s.graph(path);
    const WalkOperator w = s.walk(g);
    CompareOptions opts;
    opts.timings = c.timings;
    if (c.horizon) opts.quantum_horizon = *c.horizon;
    std::string name = std::filesystem::path(path).stem().string();
    rows.push_back(compare_methods(g, w, s.state(w), c.epsilon, std::move(name), opts));
  }
  Artifact a;
  a.result = json::array();
  for (const auto& r : rows) a.result.push_back(io::to_json(r));
  std::ostringstream csv;
  io::write_comparison_csv(csv, rows);
  a.csv = csv.str();
  return a;
}

// Fraction of `samples` independent walkers of the two-sign cycle lift
// found at each vertex after t steps, all started from vertex 0.
Eigen::VectorXd simulate_diaconis(std::size_t n, std::size_t t, std::size_t samples,
                                  std::mt19937_64& rng) {
  const double flip = 1.0 / static_cast<double>(n);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(idx(n));
  for (std::size_t s = 0; s < samples; ++s) {
    int sign = uniform01(rng) < 0.5 ? +1 : -1;
    std::size_t k = 0;
    for (std::size_t step = 0; step < t; ++step) {
      if (uniform01(rng) < flip) sign = -sign;
      k = sign > 0 ? (k + 1) % n : (k + n - 1) % n;
    }
    counts[idx(k)] += 1.0;
  }
  return counts / static_cast<double>(samples);
}

Artifact cmd_cycle_demo(const RunConfig& c, Session&) {
  std::mt19937_64 rng(c.seed);
  json rows = json::array();
  std::vector<std::optional<std::size_t>> lazy_times, lifted_times;
  std::ostringstream csv;
  csv << "n,lazy_mixing,diaconis_mixing,quantum_mixing,monte_carlo_tv\n";
  for (std::size_t n : c.sizes) {
    const auto g = std::make_shared<const Graph>(generators::cycle(n));
    const Distribution uniform = Distribution::uniform(n);
    const MixingReport lazy_rep = mixing_report(lazy(simple_walk(g)), c.epsilon, c.horizon);
    const LiftedChain lift = diaconis_lift(n);
    const MixingReport lift_rep = marginal_mixing_report(lift, uniform, c.epsilon, c.horizon);

    const WalkOperator w = coined_walk(g, fourier_coin(2));
    const QuantumState psi = QuantumState::basis(2, n, 0, 0);
    std::optional<std::size_t> quantum;
    try {
      quantum = quantum_mixing_time(w, psi, c.epsilon, c.horizon.value_or(20 * n * n));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotMixedWithinHorizon) throw;
    }

    // Exact marginal from vertex 0 at the lift's mixing time vs sampled walkers.
    const std::size_t t_check = lift_rep.mixing_time.value_or(n);
    Eigen::VectorXd x = lift.init.col(0);
    for (std::size_t t = 0; t < t_check; ++t) x = lift.transition * x;
    const Distribution exact = marginalize(lift, x);
    const double mc_tv =
        tv_distance(exact.values(), simulate_diaconis(n, t_check, c.samples, rng));

    auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
    rows.push_back({{"n", n},
                    {"lazy_mixing", opt(lazy_rep.mixing_time)},
                    {"diaconis_mixing", opt(lift_rep.mixing_time)},
                    {"quantum_mixing", opt(quantum)},
                    {"monte_carlo_t", t_check},
                    {"monte_carlo_tv", mc_tv}});
    auto cell = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
    csv << n << ',' << cell(lazy_rep.mixing_time) << ',' << cell(lift_rep.mixing_time) << ','
        << cell(quantum) << ',' << io::format_double(mc_tv) << '\n';
    lazy_times.push_back(lazy_rep.mixing_time);
    lifted_times.push_back(lift_rep.mixing_time);
  }
  auto ratios = [](const std::vector<std::optional<std::size_t>>& v) {
    json out = json::array();
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] && v[i - 1] && *v[i - 1] > 0) {
        out.push_back(static_cast<double>(*v[i]) / static_cast<double>(*v[i - 1]));
      } else {
        out.push_back(nullptr);
      }
    }
    return out;
  };
  Artifact a;
  a.result = {{"epsilon", c.epsilon},
              {"rows", std::move(rows)},
              {"lazy_ratios", ratios(lazy_times)},
              {"diaconis_ratios", ratios(lifted_times)}};
  a.csv = csv.str();
  return a;
}

int exit_code_for(const Error& e) {
  return e.category() == ErrorCategory::Input ? kInputError : kNumericError;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "json" && config.format != "csv") {
      fail(ErrorCode::InvalidArgument, "--format must be json or csv");
    }
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
      fail(ErrorCode::InvalidArgument, "--epsilon must lie in (0, 1)");
    }
    if (config.horizon && *config.horizon < 1) {
      fail(ErrorCode::InvalidArgument, "--horizon must be at least 1");
    }
    Session session(config, err);
    Artifact a;
    const std::string& cmd = config.command;
    if (cmd == "pi-q") {
      a = cmd_pi_q(config, session);
    } else if (cmd == "bridge") {
      a = cmd_bridge(config, session);
    } else if (cmd == "lift") {
      a = cmd_lift(config, session);
    } else if (cmd == "verify") {
      a = cmd_verify(config, session);
    } else if (cmd == "mix-time") {
      a = cmd_mix_time(config, session);
    } else if (cmd == "conductance") {
      a = cmd_conductance(config, session);
    } else if (cmd == "compare") {
      a = cmd_compare(config, session);
    } else if (cmd == "cycle-demo") {
      a = cmd_cycle_demo(config, session);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown command '" + cmd + "'");
    }

    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output, std::ios::binary);
      if (!file) fail(ErrorCode::InvalidArgument, "cannot write " + config.output);
    }
    std::ostream& sink = config.output.empty() ? out : file;
    if (config.format == "csv") {
      sink << "# manifest " << session.manifest().dump() << '\n' << a.csv;
    } else {
      sink << json{{"manifest", session.manifest()}, {"result", std::move(a.result)}}.dump(2)
           << '\n';
    }
    return a.claim_failed ? kClaimFailed : kOk;
  } catch (const Error& e) {
    err << "qwlift " << config.command << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Quantum-walk mixing distributions and diameter-time lifted chains"};
  app.require_subcommand(1);
  RunConfig config;
  std::string horizon;
  std::string sizes;

  auto common = [&](CLI::App* sub, bool graphs, bool walk) {
    if (graphs) sub->add_option("graphs", config.graph_paths, "graph file(s)")->required();
    if (walk) {
      sub->add_option("--coin", config.coin, "fourier or a file of m*m 're im' pairs");
      sub->add_option("--start", config.start, "basis start 'k,v' (k may be L or R)");
      sub->add_option("--state", config.state_path, "file of m*n 're im' amplitude pairs");
    }
    sub->add_option("--epsilon", config.epsilon, "TV threshold");
    sub->add_option("--horizon", horizon, "time horizon");
    sub->add_option("--output,-o", config.output, "output file (default stdout)");
    sub->add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto target_opts = [&](CLI::App* sub) {
    sub->add_option("--target", config.target, "pi-q or uniform")->check(CLI::IsMember({"pi-q", "uniform"}));
    sub->add_option("--bridge", config.bridge, "maxflow or tree")->check(CLI::IsMember({"maxflow", "tree"}));
  };

  common(app.add_subcommand("pi-q", "average mixing distribution of a coined walk"), true, true);
  auto* bridge = app.add_subcommand("bridge", "stochastic bridge from one root");
  common(bridge, true, true);
  target_opts(bridge);
  bridge->add_option("--root", config.root, "bridge root vertex");
  auto* lift = app.add_subcommand("lift", "assemble the d-lifted chain");
  common(lift, true, true);
  target_opts(lift);
  auto* verify = app.add_subcommand("verify", "check marginal mixing at t = D(G)");
  common(verify, true, true);
  target_opts(verify);
  auto* mix = app.add_subcommand("mix-time", "mixing time of a classical walk");
  common(mix, true, false);
  mix->add_option("--chain", config.chain, "simple or lazy")->check(CLI::IsMember({"simple", "lazy"}));
  auto* cond = app.add_subcommand("conductance", "conductance and Sinclair bounds");
  common(cond, true, false);
  cond->add_option("--chain", config.chain, "simple or lazy")->check(CLI::IsMember({"simple", "lazy"}));
  auto* compare = app.add_subcommand("compare", "compare mixing across methods");
  common(compare, true, true);
  compare->add_flag("--timings", config.timings, "record wall-clock times (not deterministic)");
  auto* demo = app.add_subcommand("cycle-demo", "cycle walk, two-sign lift and Hadamard walk");
  common(demo, false, false);
  demo->add_option("--sizes", sizes, "comma-separated cycle sizes");
  demo->add_option("--samples", config.samples, "Monte-Carlo walkers per size");
  demo->add_option("--seed", config.seed, "Monte-Carlo seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  config.command = app.get_subcommands().front()->get_name();
  try {
    if (!horizon.empty()) config.horizon = static_cast<std::size_t>(std::stoull(horizon));
    if (!sizes.empty()) {
      config.sizes.clear();
      std::istringstream in(sizes);
      std::string part;
      while (std::getline(in, part, ',')) config.sizes.push_back(std::stoull(part));
    }
  } catch (const std::exception&) {
    std::cerr << "qwlift: bad --horizon or --sizes value\n";
    return kInputError;
  }
  return run(config, std::cout, std::cerr);
}

}  // namespace qwlift::cli
