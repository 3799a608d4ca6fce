#include "sbs/config.hpp"

#include "sbs/csv.hpp"
#include "sbs/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sbs {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cur = trim(cur);
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

double parse_double(const std::string& v, int line) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not a number");
  }
}

long parse_int(const std::string& v, int line) {
  try {
    size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not an integer");
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not a boolean");
}

std::vector<int> parse_k_range(const std::string& v, int line) {
  const auto colon = v.find(':');
  std::vector<int> ks;
  if (colon != std::string::npos) {
    const int lo = static_cast<int>(parse_int(trim(v.substr(0, colon)), line));
    const int hi = static_cast<int>(parse_int(trim(v.substr(colon + 1)), line));
    if (lo < 1 || hi < lo)
      throw ParseError("line " + std::to_string(line) + ": bad k range '" + v + "'");
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
  } else {
    for (const auto& item : split_list(v))
      ks.push_back(static_cast<int>(parse_int(item, line)));
  }
  if (ks.empty())
    throw ParseError("line " + std::to_string(line) + ": empty k range");
  return ks;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingRequired("config file '" + path + "' does not exist");

  RunConfig cfg;
  bool have_k = false, have_candidates = false;
  std::string section, line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "data" && section != "constraints" && section != "transform" &&
          section != "sarima" && section != "run")
        throw UnknownKey("line " + std::to_string(lineno) + ": unknown section [" +
                         section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key or value");

    auto unknown = [&]() -> void {
      throw UnknownKey("line " + std::to_string(lineno) + ": unknown key '" + key +
                       "' in section [" + section + "]");
    };

    if (section == "data") {
      if (key == "file") cfg.files.push_back(value);
      else if (key == "response") cfg.response_column = value;
      else if (key == "date_column") cfg.date_column = value;
      else if (key == "predictors") cfg.predictor_columns = split_list(value);
      else unknown();
    } else if (section == "constraints") {
      if (key == "k") {
        cfg.k_range = {static_cast<int>(parse_int(value, lineno))};
        have_k = true;
      } else if (key == "k_range") {
        cfg.k_range = parse_k_range(value, lineno);
        have_k = true;
      } else if (key == "must_include") cfg.must_include = split_list(value);
      else if (key == "positive") cfg.positive = split_list(value);
      else if (key == "negative") cfg.negative = split_list(value);
      else if (key == "rho") cfg.rho = parse_double(value, lineno);
      else if (key == "lambda") cfg.lambda = parse_double(value, lineno);
      else if (key == "equality") cfg.equality = parse_bool(value, lineno);
      else if (key == "time_limit") cfg.time_limit = parse_double(value, lineno);
      else unknown();
    } else if (section == "transform") {
      if (key == "smooth") {
        const auto colon = value.find(':');
        if (colon == std::string::npos)
          throw ParseError("line " + std::to_string(lineno) +
                           ": smooth needs 'column: alpha, alpha, ...'");
        RunConfig::Smooth sm;
        sm.base = trim(value.substr(0, colon));
        for (const auto& item : split_list(value.substr(colon + 1)))
          sm.alphas.push_back(parse_double(item, lineno));
        if (sm.base.empty() || sm.alphas.empty())
          throw ParseError("line " + std::to_string(lineno) + ": empty smooth spec");
        cfg.smooths.push_back(std::move(sm));
      } else unknown();
    } else if (section == "sarima") {
      if (key == "candidates") {
        for (const auto& item : split_list(value, ';'))
          cfg.candidates.push_back(SarimaOrder::parse(item));
        have_candidates = true;
      } else if (key == "criterion") {
        if (value == "AIC") cfg.criterion = Criterion::AIC;
        else if (value == "BIC") cfg.criterion = Criterion::BIC;
        else throw ParseError("line " + std::to_string(lineno) +
                              ": criterion must be AIC or BIC");
      } else if (key == "maxiter") cfg.maxiter = static_cast<int>(parse_int(value, lineno));
      else if (key == "beta_tol") cfg.beta_tol = parse_double(value, lineno);
      else unknown();
    } else if (section == "run") {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, lineno));
      else if (key == "out") cfg.out_dir = value;
      else if (key == "lambda_n") cfg.lambda_n = static_cast<int>(parse_int(value, lineno));
      else if (key == "acf_lags") cfg.acf_lags = static_cast<int>(parse_int(value, lineno));
      else unknown();
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": key outside any section");
    }
  }

  if (cfg.files.empty()) throw MissingRequired("no [data] file entries in the config");
  if (cfg.response_column.empty())
    throw MissingRequired("the [data] response key is required");
  if (!have_k && cfg.k_range.empty()) cfg.k_range = {1, 2, 3, 4, 5};
  if (!have_candidates)
    cfg.candidates = {SarimaOrder{0, 0, 0, 0, 0, 0, 1}, SarimaOrder{1, 0, 0, 0, 0, 0, 1},
                      SarimaOrder{2, 0, 0, 0, 0, 0, 1}, SarimaOrder{0, 0, 1, 0, 0, 0, 1},
                      SarimaOrder{1, 0, 1, 0, 0, 0, 1}};
  if (cfg.maxiter < 1) throw ParseError("maxiter must be >= 1");
  return cfg;
}

LoadedPanel load_panel(const RunConfig& cfg) {
  LoadedPanel out;

  std::vector<std::string> predictor_names;
  for (size_t fi = 0; fi < cfg.files.size(); ++fi) {
    const csv::Table table = csv::read_file(cfg.files[fi]);
    const int yc = table.col(cfg.response_column);
    if (yc < 0)
      throw MissingRequired("response column '" + cfg.response_column +
                            "' not found in " + cfg.files[fi]);
    int dc = -1;
    if (!cfg.date_column.empty()) {
      dc = table.col(cfg.date_column);
      if (dc < 0)
        throw MissingRequired("date column '" + cfg.date_column + "' not found in " +
                              cfg.files[fi]);
    }

    std::vector<std::string> names;
    if (!cfg.predictor_columns.empty()) {
      names = cfg.predictor_columns;
    } else if (fi == 0) {
      for (size_t c = 0; c < table.header.size(); ++c)
        if (static_cast<int>(c) != yc && static_cast<int>(c) != dc)
          names.push_back(table.header[c]);
    } else {
      names = predictor_names;
    }
    if (fi == 0) predictor_names = names;

    const int T = table.n_rows();
    if (T == 0) throw MissingRequired("no data rows in " + cfg.files[fi]);
    VectorXd y(T);
    MatrixXd X(T, static_cast<int>(names.size()));
    auto cell_value = [&](int r, int c) -> double {
      const std::string& s = table.rows[r][c];
      try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw ParseError("bad numeric value '" + s + "' at row " + std::to_string(r + 2) +
                         " of " + cfg.files[fi]);
      }
    };
    for (int r = 0; r < T; ++r) y[r] = cell_value(r, yc);
    for (size_t ci = 0; ci < names.size(); ++ci) {
      const int c = table.col(names[ci]);
      if (c < 0)
        throw MissingRequired("predictor column '" + names[ci] + "' not found in " +
                              cfg.files[fi]);
      for (int r = 0; r < T; ++r) X(r, ci) = cell_value(r, c);
    }
    if (fi == 0 && dc >= 0)
      for (int r = 0; r < T; ++r) out.dates.push_back(table.rows[r][dc]);

    out.data.responses.push_back(std::move(y));
    out.data.predictors.push_back(std::move(X));
    std::string base = cfg.files[fi];
    const auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    out.data.response_names.push_back(base);
  }
  out.data.predictor_names = predictor_names;

  // Smoothing expansions, each contributing one transformation group.
  std::vector<IndexSet> groups;
  for (const auto& sm : cfg.smooths) {
    const auto it = std::find(out.data.predictor_names.begin(),
                              out.data.predictor_names.end(), sm.base);
    if (it == out.data.predictor_names.end())
      throw MissingRequired("smooth base column '" + sm.base + "' not found");
    const int base = static_cast<int>(it - out.data.predictor_names.begin());
    auto [expanded, group] = expand_transform_grid(out.data, base, sm.alphas);
    out.data = std::move(expanded);
    groups.push_back(std::move(group));
  }

  out.data = validate_dataset(std::move(out.data));

  auto name_index = [&](const std::string& name) -> int {
    const auto it = std::find(out.data.predictor_names.begin(),
                              out.data.predictor_names.end(), name);
    if (it == out.data.predictor_names.end())
      throw MissingRequired("predictor '" + name + "' referenced in the config is absent");
    return static_cast<int>(it - out.data.predictor_names.begin());
  };

  ConstraintSet cs;
  cs.sparsity_k = cfg.k_range.back();
  for (const auto& n : cfg.must_include) cs.must_include.push_back(name_index(n));
  if (cfg.positive.size() == 1 && cfg.positive[0] == "all") {
    for (int p = 0; p < out.data.n_predictors(); ++p) cs.positive_signs.push_back(p);
  } else {
    for (const auto& n : cfg.positive) cs.positive_signs.push_back(name_index(n));
  }
  for (const auto& n : cfg.negative) cs.negative_signs.push_back(name_index(n));
  if (cfg.rho) {
    cs.corr_threshold = *cfg.rho;
    cs.exclusion_pairs = build_hc_set(out.data, *cfg.rho);
  }
  cs.groups = std::move(groups);
  cs.shrink_lambda = cfg.lambda;
  cs.equality_sparsity = cfg.equality;
  cs.time_limit = cfg.time_limit;
  cs.validate(out.data.n_predictors());
  out.constraints = std::move(cs);
  return out;
}

}  // namespace sbs
