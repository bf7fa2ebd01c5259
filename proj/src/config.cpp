#include "plainwalk/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "plainwalk/drift_entropy.hpp"
#include "plainwalk/util.hpp"

namespace plainwalk {

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto& [key, val] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_num(const Json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j[key].get<double>();
}

}  // namespace

Matrix matrix_from_json(const Json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw ConfigError(where + " must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int u = 0; u < rows; ++u) {
    const Json& row = j[u];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ConfigError(where + " row " + std::to_string(u) + " must have " + std::to_string(cols) + " entries");
    for (int v = 0; v < cols; ++v) {
      if (!row[v].is_number()) throw ConfigError(where + " entries must be numbers");
      m(u, v) = row[v].get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int u = 0; u < m.rows(); ++u) {
    Json row = Json::array();
    for (int v = 0; v < m.cols(); ++v) row.push_back(m(u, v));
    rows.push_back(row);
  }
  return rows;
}

static std::shared_ptr<const PlainGroup> group_from_json(const Json& j) {
  require_keys(j, {"free_rank", "finite_factors"}, "group");
  if (!j.contains("free_rank") || !j["free_rank"].is_number_integer())
    throw ConfigError("group.free_rank must be an integer");
  int d = j["free_rank"].get<int>();
  std::vector<FactorSpec> factors;
  if (j.contains("finite_factors")) {
    if (!j["finite_factors"].is_array()) throw ConfigError("group.finite_factors must be an array");
    for (const Json& f : j["finite_factors"]) {
      require_keys(f, {"type", "order", "table"}, "finite factor");
      std::string type = f.value("type", "cyclic");
      if (type == "cyclic") {
        if (!f.contains("order")) throw ConfigError("cyclic factor needs an order");
        factors.push_back(FactorSpec::cyclic(f["order"].get<int>()));
      } else if (type == "table") {
        if (!f.contains("table") || !f["table"].is_array()) throw ConfigError("table factor needs a table");
        int n = static_cast<int>(f["table"].size());
        std::vector<int> flat;
        for (const Json& row : f["table"]) {
          if (!row.is_array() || static_cast<int>(row.size()) != n) throw ConfigError("factor table must be square");
          for (const Json& e : row) flat.push_back(e.get<int>());
        }
        factors.push_back(FactorSpec::finite(n, std::move(flat)));
      } else {
        throw ConfigError("unknown factor type '" + type + "'");
      }
    }
  }
  return std::make_shared<PlainGroup>(d, std::move(factors));
}

Json group_to_json(const PlainGroup& g) {
  Json j;
  j["free_rank"] = g.free_rank();
  Json factors = Json::array();
  for (int i = 0; i < g.num_finite_factors(); ++i) {
    const FactorSpec& f = g.finite_factor(i);
    Json jf;
    jf["type"] = "table";
    Json table = Json::array();
    for (int a = 0; a < f.order; ++a) {
      Json row = Json::array();
      for (int b = 0; b < f.order; ++b) row.push_back(f.product(a, b));
      table.push_back(row);
    }
    jf["table"] = table;
    factors.push_back(jf);
  }
  j["finite_factors"] = factors;
  return j;
}

static ScalarWalkSpec scalar_from_json(const Json& j, std::shared_ptr<const PlainGroup> group) {
  ScalarWalkSpec w;
  w.group = group;
  if (!j.contains("entries") || !j["entries"].is_array()) throw ConfigError("walk.entries must be an array");
  for (const Json& e : j["entries"]) {
    require_keys(e, {"word", "prob"}, "walk entry");
    if (!e.contains("word") || !e["word"].is_string()) throw ConfigError("walk entry needs a word string");
    w.support.push_back(group->word_from_names(e["word"].get<std::string>()));
    w.probs.push_back(get_num(e, "prob", -1.0, "walk entry"));
  }
  w.check();
  return w;
}

static ColoredKernel colored_from_json(const Json& j, std::shared_ptr<const PlainGroup> group) {
  if (!j.contains("r") || !j["r"].is_number_integer()) throw ConfigError("colored walk needs integer r");
  ColoredKernel k(group, j["r"].get<int>());
  if (!j.contains("entries") || !j["entries"].is_array()) throw ConfigError("walk.entries must be an array");
  for (const Json& e : j["entries"]) {
    require_keys(e, {"letter", "matrix"}, "walk entry");
    if (!e.contains("letter") || !e["letter"].is_string()) throw ConfigError("colored entry needs a letter name");
    auto g = group->letter_from_name(e["letter"].get<std::string>());
    if (!g) throw ConfigError("unknown letter '" + e["letter"].get<std::string>() + "'");
    if (!e.contains("matrix")) throw ConfigError("colored entry needs a matrix");
    k.p[*g] += matrix_from_json(e["matrix"], k.r, k.r, "walk entry matrix");
  }
  if (j.contains("identity_matrix")) k.p_e = matrix_from_json(j["identity_matrix"], k.r, k.r, "identity_matrix");
  return k;
}

Json scalar_walk_to_json(const ScalarWalkSpec& w) {
  Json j;
  j["type"] = "scalar";
  Json entries = Json::array();
  for (size_t i = 0; i < w.support.size(); ++i) {
    Json e;
    e["word"] = w.group->word_name(w.support[i]);
    e["prob"] = w.probs[i];
    entries.push_back(e);
  }
  j["entries"] = entries;
  return j;
}

Json colored_walk_to_json(const ColoredKernel& k) {
  Json j;
  j["type"] = "colored";
  j["r"] = k.r;
  Json entries = Json::array();
  for (Gen g : k.support_letters()) {
    Json e;
    e["letter"] = k.group->letter_name(g);
    e["matrix"] = matrix_to_json(k.p[g]);
    entries.push_back(e);
  }
  j["entries"] = entries;
  if (k.has_identity_mass()) j["identity_matrix"] = matrix_to_json(k.p_e);
  return j;
}

RunConfig parse_config(const Json& j) {
  require_keys(j, {"group", "walk", "solver", "mc", "output"}, "config");
  if (!j.contains("group")) throw ConfigError("config needs a group");
  if (!j.contains("walk")) throw ConfigError("config needs a walk");
  RunConfig c;
  c.group = group_from_json(j["group"]);
  const Json& w = j["walk"];
  require_keys(w, {"type", "r", "entries", "identity_matrix"}, "walk");
  std::string type = w.value("type", "scalar");
  if (type == "scalar")
    c.scalar = scalar_from_json(w, c.group);
  else if (type == "colored")
    c.colored = colored_from_json(w, c.group);
  else
    throw ConfigError("walk.type must be 'scalar' or 'colored'");
  if (j.contains("solver")) {
    require_keys(j["solver"], {"tol", "max_iter"}, "solver");
    c.solver.tol = get_num(j["solver"], "tol", c.solver.tol, "solver");
    c.solver.max_iter = static_cast<long>(get_num(j["solver"], "max_iter", static_cast<double>(c.solver.max_iter), "solver"));
    if (c.solver.tol <= 0) throw ConfigError("solver.tol must be positive");
  }
  if (j.contains("mc")) {
    const Json& m = j["mc"];
    require_keys(m, {"n_paths", "horizon", "seed", "nu_depth", "nu_samples", "perm_size", "logp_horizon",
                     "logp_samples", "threads"},
                 "mc");
    c.mc.n_paths = static_cast<long>(get_num(m, "n_paths", static_cast<double>(c.mc.n_paths), "mc"));
    c.mc.horizon = static_cast<long>(get_num(m, "horizon", static_cast<double>(c.mc.horizon), "mc"));
    c.mc.seed = static_cast<std::uint64_t>(get_num(m, "seed", static_cast<double>(c.mc.seed), "mc"));
    c.mc.nu_depth = static_cast<int>(get_num(m, "nu_depth", c.mc.nu_depth, "mc"));
    c.mc.nu_samples = static_cast<long>(get_num(m, "nu_samples", static_cast<double>(c.mc.nu_samples), "mc"));
    c.mc.perm_size = static_cast<long>(get_num(m, "perm_size", static_cast<double>(c.mc.perm_size), "mc"));
    c.mc.logp_horizon = static_cast<long>(get_num(m, "logp_horizon", static_cast<double>(c.mc.logp_horizon), "mc"));
    c.mc.logp_samples = static_cast<long>(get_num(m, "logp_samples", static_cast<double>(c.mc.logp_samples), "mc"));
    c.mc.threads = static_cast<int>(get_num(m, "threads", c.mc.threads, "mc"));
  }
  if (j.contains("output")) {
    require_keys(j["output"], {"dir"}, "output");
    if (j["output"].contains("dir")) c.out_dir = j["output"]["dir"].get<std::string>();
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["group"] = group_to_json(*c.group);
  j["walk"] = c.is_scalar() ? scalar_walk_to_json(*c.scalar) : colored_walk_to_json(*c.colored);
  j["solver"] = Json{{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
  j["mc"] = Json{{"n_paths", c.mc.n_paths},     {"horizon", c.mc.horizon},
                 {"seed", c.mc.seed},           {"nu_depth", c.mc.nu_depth},
                 {"nu_samples", c.mc.nu_samples}, {"perm_size", c.mc.perm_size},
                 {"logp_horizon", c.mc.logp_horizon}, {"logp_samples", c.mc.logp_samples},
                 {"threads", c.mc.threads}};
  j["output"] = Json{{"dir", c.out_dir}};
  return j;
}

namespace {

ScalarWalkSpec make_walk(std::shared_ptr<const PlainGroup> g, const std::vector<std::pair<std::string, double>>& entries) {
  ScalarWalkSpec w;
  w.group = g;
  for (auto& [name, prob] : entries) {
    w.support.push_back(g->word_from_names(name));
    w.probs.push_back(prob);
  }
  w.check();
  return w;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"srw-f2", "srw-f3", "z3z3-uniform", "rand-len2-f2", "fig1-desk", "application-sec6"};
}

RunConfig preset_config(const std::string& spec) {
  std::istringstream is(spec);
  std::string name;
  is >> name;
  std::map<std::string, double> kv;
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("preset parameter '" + tok + "' is not key=value");
    kv[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
  }

  RunConfig c;
  c.preset_name = spec;
  if (name == "srw-f2" || name == "srw-f3") {
    int d = name == "srw-f2" ? 2 : 3;
    auto g = std::make_shared<PlainGroup>(d);
    std::vector<std::pair<std::string, double>> entries;
    for (int i = 1; i <= d; ++i) {
      entries.push_back({"a" + std::to_string(i), 1.0 / (2 * d)});
      entries.push_back({"a" + std::to_string(i) + "'", 1.0 / (2 * d)});
    }
    c.group = g;
    c.scalar = make_walk(g, entries);
  } else if (name == "z3z3-uniform") {
    auto g = std::make_shared<PlainGroup>(0, std::vector<FactorSpec>{FactorSpec::cyclic(3), FactorSpec::cyclic(3)});
    c.group = g;
    c.scalar = make_walk(g, {{"G1.1", 0.25}, {"G1.2", 0.25}, {"G2.1", 0.25}, {"G2.2", 0.25}});
  } else if (name == "rand-len2-f2") {
    // fixed generic symmetric length-<=2 walk on F2, p_e = 0
    auto g = std::make_shared<PlainGroup>(2);
    c.group = g;
    c.scalar = make_walk(g, {{"a1", 0.287}, {"a1'", 0.287}, {"a1 a2", 0.213}, {"a2' a1'", 0.213}});
  } else if (name == "fig1-desk") {
    // 12 generators of lengths 1..3 with fixed generic probabilities; the
    // dominant length-3 word keeps the entropy low enough for the
    // permutation-action estimator window at desk-scale n
    auto g = std::make_shared<PlainGroup>(2);
    c.group = g;
    c.scalar = make_walk(g, {{"a1", 0.045},
                             {"a1'", 0.020},
                             {"a2", 0.035},
                             {"a2'", 0.020},
                             {"a1 a2", 0.040},
                             {"a2' a1'", 0.015},
                             {"a1 a1", 0.040},
                             {"a1' a1'", 0.015},
                             {"a1 a2 a1", 0.700},
                             {"a1' a2' a1'", 0.025},
                             {"a2 a2 a2", 0.030},
                             {"a2' a2' a2'", 0.015}});
    c.mc.horizon = 600;
    c.mc.nu_samples = 10000;
    c.mc.perm_size = 2000000;
  } else if (name == "application-sec6") {
    ApplicationWalkParams p;
    p.L = kv.count("L") ? static_cast<int>(kv["L"]) : 3;
    p.k1 = kv.count("k1") ? static_cast<int>(kv["k1"]) : 2;
    p.k2 = kv.count("k2") ? static_cast<int>(kv["k2"]) : 2;
    p.p1.assign(p.L, 0.5 / p.L);
    p.p2.assign(p.L, 0.5 / p.L);
    ScalarWalkSpec w = application_walk(p);
    c.group = w.group;
    c.scalar = std::move(w);
    return c;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += " " + n;
    throw ConfigError("unknown preset '" + name + "'; available:" + known);
  }
  return c;
}

}  // namespace plainwalk
