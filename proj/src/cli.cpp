#include "ncmart/cli.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ncmart/counterexample.hpp"
#include "ncmart/ergodic.hpp"
#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"

#ifndef NCMART_VERSION
#define NCMART_VERSION "0.0.0"
#endif

namespace ncmart::cli {

std::string version() { return NCMART_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<V, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<V, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, double>) {
          if (!std::isfinite(v)) return format_double(v);
        }
        return v;
      },
      c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Cell idx(Index v) { return static_cast<long long>(v); }

ExperimentResult start(const ExperimentConfig& c, std::vector<std::string> columns) {
  ExperimentResult r;
  r.config = c;
  r.columns = std::move(columns);
  return r;
}

PhaseConvention parse_convention(const std::string& s) {
  if (s == "reciprocal") return PhaseConvention::reciprocal;
  if (s == "shifted") return PhaseConvention::shifted;
  throw std::invalid_argument("unknown phase convention '" + s + "' (reciprocal|shifted)");
}

}  // namespace

void ExperimentConfig::apply_defaults() {
  if (command == "tn-bounds") {
    if (n_list.empty())
      for (Index n = 1; n <= 64; ++n) n_list.push_back(n);
    if (p_list.empty()) p_list = {0.1, 0.25, 0.4, 0.49};
  } else if (command == "mu") {
    if (n_list.empty()) n_list = {8, 16, 32, 64, 128};
    if (t < 0) t = 0.1;
  } else if (command == "chain") {
    if (n_list.empty()) n_list = {8};
    if (p_list.empty()) p_list = {0.25};
    if (t < 0) t = 0.125;
    if (trials == 0) trials = 50;
  } else if (command == "obstruction") {
    if (p_list.empty()) p_list = {1.0};
    if (n_list.empty()) n_list = {100};
    if (t < 0) t = 1e-3;
  } else if (command == "ergodic") {
    if (n_list.empty()) n_list = {2, 3};
    if (p_list.empty()) p_list = {1.0};
    if (k_list.empty())
      for (Index k = 2; k <= 1024; k *= 2) k_list.push_back(k);
    if (trials == 0) trials = 100;
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e{{"command", command}};
  if (!n_list.empty()) e.emplace_back("n-list", join(n_list));
  if (!p_list.empty()) e.emplace_back("p-list", join(p_list));
  if (command == "ergodic") {
    e.emplace_back("k-list", join(k_list));
    e.emplace_back("convention", convention);
  }
  if (t >= 0) e.emplace_back("t", format_double(t));
  if (command == "mu") {
    e.emplace_back("p-cert", format_double(p_cert));
    e.emplace_back("budget", std::to_string(budget));
  }
  if (trials > 0) e.emplace_back("trials", std::to_string(trials));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("dim-cap", std::to_string(dim_cap));
  e.emplace_back("format", format);
  return e;
}

ExperimentResult cmd_tn_bounds(const ExperimentConfig& c) {
  ExperimentResult r = start(c, {"n", "p", "lower", "value", "upper", "pass"});
  Index n_max = 1;
  for (Index n : c.n_list) {
    if (n < 1 || n > c.dim_cap) throw std::invalid_argument("n outside [1, dim-cap]");
    n_max = std::max(n_max, n);
  }
  for (double p : c.p_list)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p outside (0, 1)");
  std::vector<std::vector<Cell>> rows(c.n_list.size() * c.p_list.size());
  std::vector<char> ok(rows.size(), 0);
  const long total = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < total; ++k) {
    const Index n = c.n_list[static_cast<std::size_t>(k) / c.p_list.size()];
    const double p = c.p_list[static_cast<std::size_t>(k) % c.p_list.size()];
    const TnBoundsReport b = tn_bounds_check(n, p);
    rows[static_cast<std::size_t>(k)] = {idx(n), p, b.lower, b.value, b.upper, b.holds};
    ok[static_cast<std::size_t>(k)] = b.holds;
  }
  r.rows = std::move(rows);
  long failures = 0;
  for (char o : ok) failures += !o;
  const int kmax = static_cast<int>(std::floor(std::log2(static_cast<double>(n_max))));
  bool vk_ok = true;
  for (double p : c.p_list) {
    const VkRecursionReport v = vk_recursion_check(kmax, p, c.dim_cap);
    r.summary.emplace_back("vk_recursion_p=" + format_double(p), v.holds());
    vk_ok = vk_ok && v.holds();
  }
  r.summary.emplace_back("rows", static_cast<long long>(r.rows.size()));
  r.summary.emplace_back("violations", static_cast<long long>(failures));
  r.passed = failures == 0 && vk_ok;
  return r;
}

ExperimentResult cmd_mu(const ExperimentConfig& c) {
  for (Index n : c.n_list)
    if (n < 1 || n > c.dim_cap) throw std::invalid_argument("N outside [1, dim-cap]");
  ExperimentResult r = start(c, {"N", "corank", "certified_lower", "certificate_applies",
                                 "searched_upper", "diagonal_upper", "ordering_ok"});
  const GrowthReport g = growth_experiment(c.p_cert, c.t, c.n_list, c.budget, c.seed);
  for (const GrowthRow& row : g.rows)
    r.rows.push_back({idx(row.N), idx(row.corank), row.certified, row.certificate_applies,
                      row.searched, row.diagonal ? Cell(*row.diagonal) : Cell(std::string()),
                      row.ordering_ok});
  r.summary.emplace_back("slope", g.slope);
  r.summary.emplace_back("ordering_ok", g.ordering_ok);
  r.passed = g.ordering_ok;
  return r;
}

ExperimentResult cmd_chain(const ExperimentConfig& c) {
  ExperimentResult r = start(
      c, {"N", "trial", "corank", "m", "norm_A", "bound_A", "norm_B", "bound_B", "norm_C",
          "bound_C", "triangle_lhs", "triangle_rhs", "decomposition_error", "max_contraction",
          "lower_A", "upper_B", "upper_C", "triangle", "implied", "decomposition", "contraction",
          "pass"});
  const double p = c.p_list.front();
  const ChainConstants k = chain_constants(p);  // validates p before the parallel loop
  if (!(c.t >= 0.0 && c.t <= 1.0)) throw std::invalid_argument("t must lie in [0,1]");
  for (Index N : c.n_list) {
    if (N < 1 || N * N > c.dim_cap) throw std::invalid_argument("N^2 exceeds dim-cap");
    const Index corank = corank_budget(N, c.t);
    std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(c.trials));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < c.trials; ++k) {
      Rng rng(derive_seed(derive_seed(c.seed, static_cast<std::uint64_t>(N)),
                          static_cast<std::uint64_t>(k)));
      const Projection e = random_projection(TracialAlgebra::normalized(N), corank, rng);
      const ChainReport cr = chain_verify(N, p, c.t, e);
      rows[static_cast<std::size_t>(k)] = {
          idx(N),          static_cast<long long>(k), cr.corank,        cr.m,
          cr.norm_A,       cr.bound_A,                cr.norm_B,        cr.bound_B,
          cr.norm_C,       cr.bound_C,                cr.triangle_lhs,  cr.triangle_rhs,
          cr.decomposition_error, cr.max_contraction, cr.lower_A_ok,    cr.upper_B_ok,
          cr.upper_C_ok,   cr.triangle_ok,            cr.implied_ok,    cr.decomposition_ok,
          cr.contraction_ok, cr.passed()};
    }
    for (auto& row : rows) {
      r.passed = r.passed && std::get<bool>(row.back());
      r.rows.push_back(std::move(row));
    }
  }
  long long passing = 0;
  for (const auto& row : r.rows) passing += std::get<bool>(row.back());
  r.summary.emplace_back("c_p", k.c_p);
  r.summary.emplace_back("C_p", k.C_p);
  r.summary.emplace_back("t_prime", k.t_prime);
  r.summary.emplace_back("delta", k.delta);
  r.summary.emplace_back("passing_rows", passing);
  r.summary.emplace_back("rows", static_cast<long long>(r.rows.size()));
  return r;
}

ExperimentResult cmd_obstruction(const ExperimentConfig& c) {
  ExperimentResult r = start(c, {"N", "log_bound", "bound"});
  const double p = c.p_list.front();
  const Index n_max = c.n_list.empty() ? 100 : c.n_list.front();
  const ObstructionReport o = au_obstruction_report(p, c.t, c.p_cert, n_max);
  for (const ObstructionRow& row : o.rows) r.rows.push_back({idx(row.N), row.log_bound, row.bound});
  r.summary.emplace_back("p_chain", o.p_chain);
  r.summary.emplace_back("delta", o.delta);
  r.summary.emplace_back("exponent", o.exponent);
  r.summary.emplace_back("certificate_applies", o.certificate_applies);
  r.summary.emplace_back("increasing_from", idx(o.increasing_from));
  r.summary.emplace_back("first_above_one",
                         o.first_above_one ? idx(*o.first_above_one) : Cell(std::string()));
  r.summary.emplace_back("diverges", o.diverges);
  r.summary.emplace_back("conclusion", o.conclusion);
  r.passed = o.certificate_applies && o.diverges;
  return r;
}

ExperimentResult cmd_ergodic(const ExperimentConfig& c) {
  ExperimentResult r = start(c, {"N", "K", "worst_ratio", "holds"});
  const PhaseConvention conv = parse_convention(c.convention);
  for (Index N : c.n_list) {
    if (N < 1 || N > c.dim_cap) throw std::invalid_argument("N outside [1, dim-cap]");
    const UnitaryApproxReport u =
        unitary_approx_check(N, c.k_list, c.p_list.front(), c.trials,
                             derive_seed(c.seed, static_cast<std::uint64_t>(N)), conv);
    for (const UnitaryKRow& row : u.rows)
      r.rows.push_back({idx(N), idx(row.K), row.worst_ratio, row.holds});
    const std::string tag = "N=" + std::to_string(N) + ":";
    r.summary.emplace_back(tag + "minimal_K", u.minimal_K ? idx(*u.minimal_K) : Cell(std::string()));
    r.summary.emplace_back(tag + "unit_lhs", u.unit_lhs);
    r.summary.emplace_back(tag + "u_minus_one", u.u_minus_one);
    r.summary.emplace_back(tag + "u_target", u.u_target);
    r.passed = r.passed && u.minimal_K.has_value();
  }
  r.summary.emplace_back("phase_convention", to_string(conv));
  return r;
}

ExperimentResult run(ExperimentConfig config) {
  config.apply_defaults();
  if (config.format != "csv" && config.format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (config.trials < 0) throw std::invalid_argument("trials must be positive");
  if (config.budget < 0) throw std::invalid_argument("budget must be non-negative");
  ExperimentResult r;
  if (config.command == "tn-bounds")
    r = cmd_tn_bounds(config);
  else if (config.command == "mu")
    r = cmd_mu(config);
  else if (config.command == "chain")
    r = cmd_chain(config);
  else if (config.command == "obstruction")
    r = cmd_obstruction(config);
  else if (config.command == "ergodic")
    r = cmd_ergodic(config);
  else
    throw std::invalid_argument("unknown command '" + config.command + "'");
  r.summary.emplace_back("passed", r.passed);
  return r;
}

void write_csv(const ExperimentResult& r, std::ostream& os) {
  os << "# ncmart " << version() << '\n';
  for (const auto& [k, v] : r.config.echo()) os << "# config " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
    os << '\n';
  }
  for (const auto& [k, v] : r.summary) os << "# summary " << k << '=' << cell_text(v) << '\n';
}

void write_json(const ExperimentResult& r, std::ostream& os) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config.echo()) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) summary[k] = cell_json(v);
  j["summary"] = std::move(summary);
  j["version"] = version();
  os << j.dump(2) << '\n';
}

void write(const ExperimentResult& r, std::ostream& os) {
  if (r.config.format == "json")
    write_json(r, os);
  else
    write_csv(r, os);
}

}  // namespace ncmart::cli
