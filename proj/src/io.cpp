#include "qwlift/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "qwlift/error.hpp"

namespace qwlift::io {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

class Diagnostics {
 public:
  explicit Diagnostics(const std::string& name) : name_(name) {}

  [[noreturn]] void error(ErrorCode code, std::size_t line, std::size_t col,
                          const std::string& msg) const {
    fail(code, name_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  std::size_t number(const Token& tok, std::size_t line) const {
    std::size_t value = 0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      error(ErrorCode::ParseError, line, tok.column,
            "expected a non-negative integer, got '" + std::string(tok.text) + "'");
    }
    return value;
  }

 private:
  const std::string& name_;
};

struct RotationEntry {
  Vertex to;
  std::size_t line;
  std::size_t column;
};

}  // namespace

Graph parse_graph(std::string_view text, const std::string& name) {
  const Diagnostics diag(name);
  bool have_header = false;
  std::size_t n = 0;
  std::size_t m = 0;
  GraphOptions options;
  std::vector<Arc> arcs;
  std::map<Arc, std::size_t> arc_line;
  std::vector<std::vector<RotationEntry>> rotation;
  std::vector<std::size_t> rotation_line;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }

    if (!have_header) {
      if (tokens.size() < 2) {
        diag.error(ErrorCode::ParseError, line_no, tokens.front().column,
                   "header must be '<n> <m> [symmetric] [self-loops]'");
      }
      n = diag.number(tokens[0], line_no);
      m = diag.number(tokens[1], line_no);
      if (n == 0) diag.error(ErrorCode::ParseError, line_no, tokens[0].column, "empty graph");
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        if (tokens[i].text == "symmetric") {
          options.require_symmetric = true;
        } else if (tokens[i].text == "self-loops") {
          options.allow_self_loops = true;
        } else {
          diag.error(ErrorCode::ParseError, line_no, tokens[i].column,
                     "unknown flag '" + std::string(tokens[i].text) + "'");
        }
      }
      if (m > 0) {
        rotation.resize(n);
        rotation_line.assign(n, 0);
      }
      have_header = true;
      continue;
    }

    if (tokens.front().text == "rot") {
      if (m == 0) {
        diag.error(ErrorCode::ValidationError, line_no, tokens.front().column,
                   "rotation line but the header declares m = 0");
      }
      if (tokens.size() < 2) {
        diag.error(ErrorCode::ParseError, line_no, tokens.front().column, "expected 'rot u: ...'");
      }
      // Accept both "rot 3: ..." and "rot 3 : ...".
      Token vertex = tokens[1];
      std::size_t first_entry = 2;
      if (!vertex.text.empty() && vertex.text.back() == ':') {
        vertex.text.remove_suffix(1);
      } else if (tokens.size() > 2 && tokens[2].text == ":") {
        first_entry = 3;
      } else {
        diag.error(ErrorCode::ParseError, line_no, vertex.column + vertex.text.size(),
                   "expected ':' after the vertex");
      }
      const Vertex u = diag.number(vertex, line_no);
      if (u >= n) {
        diag.error(ErrorCode::ParseError, line_no, vertex.column,
                   "vertex " + std::to_string(u) + " outside 0.." + std::to_string(n - 1));
      }
      if (rotation_line[u] != 0) {
        diag.error(ErrorCode::ValidationError, line_no, vertex.column,
                   "second rotation line for vertex " + std::to_string(u) + " (first on line " +
                       std::to_string(rotation_line[u]) + ")");
      }
      rotation_line[u] = line_no;
      if (tokens.size() - first_entry != m) {
        diag.error(ErrorCode::ValidationError, line_no, tokens.front().column,
                   "rotation of vertex " + std::to_string(u) + " lists " +
                       std::to_string(tokens.size() - first_entry) + " neighbours, expected " +
                       std::to_string(m));
      }
      for (std::size_t i = first_entry; i < tokens.size(); ++i) {
        const Vertex v = diag.number(tokens[i], line_no);
        if (v >= n) {
          diag.error(ErrorCode::ParseError, line_no, tokens[i].column,
                     "dangling rotation entry " + std::to_string(v));
        }
        rotation[u].push_back({v, line_no, tokens[i].column});
      }
      continue;
    }

    if (tokens.size() != 2) {
      diag.error(ErrorCode::ParseError, line_no, tokens.front().column,
                 "expected an arc 'u v' or a rotation line");
    }
    const Vertex u = diag.number(tokens[0], line_no);
    const Vertex v = diag.number(tokens[1], line_no);
    if (u >= n) {
      diag.error(ErrorCode::ParseError, line_no, tokens[0].column,
                 "dangling arc endpoint " + std::to_string(u) + " (n = " + std::to_string(n) + ")");
    }
    if (v >= n) {
      diag.error(ErrorCode::ParseError, line_no, tokens[1].column,
                 "dangling arc endpoint " + std::to_string(v) + " (n = " + std::to_string(n) + ")");
    }
    const auto [it, fresh] = arc_line.emplace(Arc{u, v}, line_no);
    if (!fresh) {
      diag.error(ErrorCode::ValidationError, line_no, tokens[0].column,
                 "arc " + std::to_string(u) + " " + std::to_string(v) + " repeats line " +
                     std::to_string(it->second));
    }
    arcs.push_back({u, v});
  }
  if (!have_header) diag.error(ErrorCode::ParseError, line_no, 1, "missing header line");

  std::optional<RotationMap> rot;
  if (m > 0) {
    rot.emplace(n);
    for (Vertex u = 0; u < n; ++u) {
      if (rotation_line[u] == 0) {
        diag.error(ErrorCode::ValidationError, line_no, 1,
                   "no rotation line for vertex " + std::to_string(u));
      }
      for (const auto& e : rotation[u]) {
        if (!arc_line.contains(Arc{u, e.to})) {
          diag.error(ErrorCode::ValidationError, e.line, e.column,
                     "rotation entry " + std::to_string(u) + " -> " + std::to_string(e.to) +
                         " is not an arc");
        }
        (*rot)[u].push_back(e.to);
      }
    }
  }
  try {
    return Graph::build(n, std::move(arcs), std::move(rot), options);
  } catch (const Error& e) {
    fail(ErrorCode::ValidationError, name + ": " + e.what());
  }
}

Graph parse_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str(), path.string());
}

std::string format_graph(const Graph& g) {
  std::ostringstream out;
  const auto& rot = g.rotation_map();
  out << g.size() << ' ' << (rot ? rot->front().size() : 0);
  if (g.symmetric()) out << " symmetric";
  if (g.self_loops_allowed()) out << " self-loops";
  out << '\n';
  for (const Arc& a : g.arcs()) out << a.from << ' ' << a.to << '\n';
  if (rot) {
    for (Vertex u = 0; u < g.size(); ++u) {
      out << "rot " << u << ':';
      for (Vertex v : (*rot)[u]) out << ' ' << v;
      out << '\n';
    }
  }
  return out.str();
}

namespace {

json dense_rows(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_dense(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.at(0).size();
  Eigen::MatrixXd M(idx(r), idx(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (rows.at(i).size() != c) fail(ErrorCode::ParseError, "ragged matrix in JSON");
    for (std::size_t j = 0; j < c; ++j) M(idx(i), idx(j)) = rows[i][j].get<double>();
  }
  return M;
}

SparseMatrix rows_to_sparse(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.at(0).size();
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < r; ++i) {
    if (rows.at(i).size() != c) fail(ErrorCode::ParseError, "ragged matrix in JSON");
    for (std::size_t j = 0; j < c; ++j) {
      const double x = rows[i][j].get<double>();
      if (x != 0.0) entries.emplace_back(idx(i), idx(j), x);
    }
  }
  SparseMatrix M(idx(r), idx(c));
  M.setFromTriplets(entries.begin(), entries.end());
  return M;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

void expect_kind(const json& j, const char* kind) {
  if (j.contains("kind") && j.at("kind").get<std::string>() != kind) {
    fail(ErrorCode::ParseError, std::string("expected a ") + kind + ", got " +
                                    j.at("kind").get<std::string>());
  }
}

template <class T>
json optional_json(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const Graph& g) {
  json arcs = json::array();
  for (const Arc& a : g.arcs()) arcs.push_back({a.from, a.to});
  return {{"kind", "graph"},
          {"n", g.size()},
          {"arcs", std::move(arcs)},
          {"rotation", g.rotation_map() ? json(*g.rotation_map()) : json(nullptr)},
          {"symmetric", g.symmetric()},
          {"self_loops", g.self_loops_allowed()}};
}

Graph graph_from_json(const json& j) {
  return guarded("graph", [&] {
    expect_kind(j, "graph");
    std::vector<Arc> arcs;
    for (const auto& a : j.at("arcs")) arcs.push_back({a.at(0).get<Vertex>(), a.at(1).get<Vertex>()});
    std::optional<RotationMap> rot;
    if (!j.at("rotation").is_null()) rot = j.at("rotation").get<RotationMap>();
    return Graph::build(j.at("n").get<std::size_t>(), std::move(arcs), std::move(rot),
                        {.require_symmetric = j.at("symmetric").get<bool>(),
                         .allow_self_loops = j.at("self_loops").get<bool>()});
  });
}

json to_json(const Distribution& p) {
  return {{"kind", "distribution"},
          {"values", std::vector<double>(p.values().data(), p.values().data() + p.size())}};
}

Distribution distribution_from_json(const json& j) {
  return guarded("distribution", [&] {
    expect_kind(j, "distribution");
    const auto v = j.at("values").get<std::vector<double>>();
    return Distribution(Eigen::Map<const Eigen::VectorXd>(v.data(), idx(v.size())));
  });
}

json to_json(const TransitionMatrix& P) {
  return {{"kind", "transition_matrix"},
          {"convention", "column-stochastic"},
          {"layout", "row-major"},
          {"n", P.size()},
          {"allow_diag", P.allow_diag()},
          {"entries", dense_rows(P.entries())}};
}

TransitionMatrix transition_from_json(const json& j, std::shared_ptr<const Graph> locality) {
  return guarded("transition matrix", [&] {
    expect_kind(j, "transition_matrix");
    return TransitionMatrix(rows_to_dense(j.at("entries")), std::move(locality),
                            j.value("allow_diag", false));
  });
}

json to_json(const StochasticBridge& b) {
  json mats = json::array();
  for (const auto& P : b.matrices) mats.push_back(dense_rows(P.entries()));
  return {{"kind", "stochastic_bridge"},
          {"convention", "column-stochastic"},
          {"layout", "row-major"},
          {"root", b.root},
          {"D", b.matrices.size()},
          {"matrices", std::move(mats)}};
}

StochasticBridge bridge_from_json(const json& j, std::shared_ptr<const Graph> g) {
  return guarded("bridge", [&] {
    expect_kind(j, "stochastic_bridge");
    StochasticBridge b;
    b.root = j.at("root").get<Vertex>();
    for (const auto& m : j.at("matrices")) b.matrices.emplace_back(rows_to_dense(m), g, true);
    if (b.matrices.size() != j.at("D").get<std::size_t>()) {
      fail(ErrorCode::ParseError, "bridge D does not match its matrix count");
    }
    return b;
  });
}

json to_json(const LiftedChain& chain) {
  const std::size_t D = chain.base ? diameter(*chain.base) : 0;
  return {{"kind", "lifted_chain"},
          {"convention", "column-stochastic"},
          {"layout", "row-major"},
          {"index", "t + layers*(v + n*v0)"},
          {"n", chain.coarse_size()},
          {"D", D},
          {"layers", chain.layers},
          {"states", chain.lifted_size()},
          {"graph", to_json(*chain.base)},
          {"P_lift", dense_rows(Eigen::MatrixXd(chain.transition))},
          {"coarse_of", chain.coarse_of},
          {"init", dense_rows(Eigen::MatrixXd(chain.init))},
          {"coarse", chain.coarse ? to_json(*chain.coarse) : json(nullptr)}};
}

LiftedChain lifted_chain_from_json(const json& j) {
  return guarded("lifted chain", [&] {
    expect_kind(j, "lifted_chain");
    LiftedChain chain;
    chain.base = std::make_shared<const Graph>(graph_from_json(j.at("graph")));
    chain.layers = j.at("layers").get<std::size_t>();
    chain.transition = rows_to_sparse(j.at("P_lift"));
    chain.coarse_of = j.at("coarse_of").get<std::vector<Vertex>>();
    chain.init = rows_to_sparse(j.at("init"));
    if (!j.at("coarse").is_null()) chain.coarse = transition_from_json(j.at("coarse"));
    if (chain.lifted_size() != static_cast<std::size_t>(chain.transition.rows())) {
      fail(ErrorCode::ParseError, "lifted chain sizes disagree");
    }
    return chain;
  });
}

json to_json(const SpectralDecomposition& s) {
  std::vector<std::size_t> ranks;
  for (const auto& B : s.bases) ranks.push_back(static_cast<std::size_t>(B.cols()));
  return {{"kind", "spectrum"},
          {"phases", s.phases},
          {"ranks", ranks},
          {"cluster_ambiguity", s.cluster_ambiguity}};
}

json to_json(const MixingReport& r) {
  return {{"kind", "mixing_report"},
          {"epsilon", r.epsilon},
          {"mixing_time", optional_json(r.mixing_time)},
          {"horizon", r.horizon},
          {"tv_curve", r.tv_curve}};
}

MixingReport mixing_report_from_json(const json& j) {
  return guarded("mixing report", [&] {
    expect_kind(j, "mixing_report");
    MixingReport r;
    r.epsilon = j.at("epsilon").get<double>();
    r.mixing_time = optional_from<std::size_t>(j, "mixing_time");
    r.horizon = j.at("horizon").get<std::size_t>();
    r.tv_curve = j.at("tv_curve").get<std::vector<double>>();
    return r;
  });
}

json to_json(const ConductanceReport& r) {
  return {{"kind", "conductance_report"},
          {"phi", r.phi},
          {"argmin_subset", r.argmin_subset},
          {"epsilon", r.epsilon},
          {"lower_bound", r.lower_bound},
          {"upper_bound", r.upper_bound},
          {"degenerate", r.degenerate}};
}

ConductanceReport conductance_from_json(const json& j) {
  return guarded("conductance report", [&] {
    expect_kind(j, "conductance_report");
    ConductanceReport r;
    r.phi = j.at("phi").get<double>();
    r.argmin_subset = j.at("argmin_subset").get<std::vector<Vertex>>();
    r.epsilon = j.at("epsilon").get<double>();
    r.lower_bound = j.at("lower_bound").get<double>();
    r.upper_bound = j.at("upper_bound").get<double>();
    r.degenerate = j.at("degenerate").get<bool>();
    return r;
  });
}

json to_json(const DiameterMixingReport& r) {
  return {{"kind", "diameter_mixing_report"},
          {"diameter", r.diameter},
          {"horizon", r.horizon},
          {"tolerance", kDiameterMixingTolerance},
          {"tv_curve", r.tv_curve},
          {"tv_at_diameter", r.tv_at_diameter},
          {"max_after_diameter", r.max_after_diameter},
          {"passed", r.passed}};
}

DiameterMixingReport diameter_report_from_json(const json& j) {
  return guarded("diameter mixing report", [&] {
    expect_kind(j, "diameter_mixing_report");
    DiameterMixingReport r;
    r.diameter = j.at("diameter").get<std::size_t>();
    r.horizon = j.at("horizon").get<std::size_t>();
    r.tv_curve = j.at("tv_curve").get<std::vector<double>>();
    r.tv_at_diameter = j.at("tv_at_diameter").get<double>();
    r.max_after_diameter = j.at("max_after_diameter").get<double>();
    r.passed = j.at("passed").get<bool>();
    return r;
  });
}

json to_json(const ComparisonRow& r) {
  return {{"kind", "comparison_row"},
          {"name", r.name},
          {"n", r.n},
          {"diameter", r.diameter},
          {"lifted_states", r.lifted_states},
          {"simple_walk_mixing", optional_json(r.simple_walk_mixing)},
          {"simple_walk_note", r.simple_walk_note},
          {"quantum_mixing", optional_json(r.quantum_mixing)},
          {"quantum_note", r.quantum_note},
          {"d_lift_mixing", r.d_lift_mixing},
          {"ms_pi_q", optional_json(r.ms_pi_q)},
          {"ms_lift", optional_json(r.ms_lift)}};
}

ComparisonRow comparison_from_json(const json& j) {
  return guarded("comparison row", [&] {
    expect_kind(j, "comparison_row");
    ComparisonRow r;
    r.name = j.at("name").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.diameter = j.at("diameter").get<std::size_t>();
    r.lifted_states = j.at("lifted_states").get<std::size_t>();
    r.simple_walk_mixing = optional_from<std::size_t>(j, "simple_walk_mixing");
    r.simple_walk_note = j.at("simple_walk_note").get<std::string>();
    r.quantum_mixing = optional_from<std::size_t>(j, "quantum_mixing");
    r.quantum_note = j.at("quantum_note").get<std::string>();
    r.d_lift_mixing = j.at("d_lift_mixing").get<std::size_t>();
    r.ms_pi_q = optional_from<double>(j, "ms_pi_q");
    r.ms_lift = optional_from<double>(j, "ms_lift");
    return r;
  });
}

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_curve_csv(std::ostream& out, const std::vector<double>& curve) {
  out << "t,tv\n";
  for (std::size_t t = 0; t < curve.size(); ++t) out << t << ',' << format_double(curve[t]) << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "name,n,diameter,lifted_states,simple_walk_mixing,quantum_mixing,d_lift_mixing,"
         "ms_pi_q,ms_lift\n";
  auto opt = [](const auto& x) {
    if constexpr (std::is_same_v<std::decay_t<decltype(*x)>, double>) {
      return x ? format_double(*x) : std::string();
    } else {
      return x ? std::to_string(*x) : std::string();
    }
  };
  for (const auto& r : rows) {
    out << r.name << ',' << r.n << ',' << r.diameter << ',' << r.lifted_states << ','
        << (r.simple_walk_mixing ? std::to_string(*r.simple_walk_mixing) : r.simple_walk_note)
        << ',' << (r.quantum_mixing ? std::to_string(*r.quantum_mixing) : r.quantum_note) << ','
        << r.d_lift_mixing << ',' << opt(r.ms_pi_q) << ',' << opt(r.ms_lift) << '\n';
  }
}

}  // namespace qwlift::io
