#include "wfpl_cli/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "wfpl/error.hpp"

namespace wfpl::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("key '" + key + "': not a number: " + v);
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer: " + v);
  return x;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto num = [&] { return to_double(key, value); };
  auto integer = [&] { return to_int(key, value); };
  if (key == "experiment") c.experiment = value;
  else if (key == "N") c.spec.dim = static_cast<int>(integer());
  else if (key == "s") c.spec.s = num();
  else if (key == "p") c.spec.p = num();
  else if (key == "beta") c.spec.beta = num();
  else if (key == "lambda") c.spec.lambda = num();
  else if (key == "q") c.spec.q_exponent = num();
  else if (key == "domain_radius") c.spec.domain_radius = num();
  else if (key == "exterior_radius") c.spec.exterior_radius = num();
  else if (key == "n_cells") {
    const long long n = integer();
    if (n < 2) throw ConfigError("n_cells must be at least 2");
    c.n_cells = static_cast<std::size_t>(n);
  } else if (key == "grading") c.grading = num();
  else if (key == "quadrature_order") c.quadrature_order = static_cast<int>(integer());
  else if (key == "tol") c.tol = num();
  else if (key == "max_iterations") c.max_iterations = static_cast<int>(integer());
  else if (key == "data") c.data = value;
  else if (key == "data_value") c.data_value = num();
  else if (key == "seed") {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
    if (ec != std::errc() || ptr != value.data() + value.size()) throw ConfigError("key 'seed': not a u64: " + value);
    c.seed = s;
  } else if (key == "levels") {
    c.levels.clear();
    for (const auto& item : split(value, ',')) c.levels.push_back(to_double(key, item));
  } else if (key == "m") c.m = num();
  else if (key == "alpha") c.alpha = num();
  else if (key == "samples") c.samples = static_cast<int>(integer());
  else if (key == "trials") c.trials = static_cast<int>(integer());
  else if (key == "besov_pairs") {
    c.besov_pairs.clear();
    for (const auto& item : split(value, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError("besov_pairs entries must read q:s1");
      c.besov_pairs.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
    }
  } else if (key == "output_dir") c.output_dir = value;
  else if (key == "kernel_cache") c.kernel_cache = value;
  else throw ConfigError("unknown key '" + key + "'");
}

void validate(const ExperimentConfig& c) {
  try {
    c.spec.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }
  if (c.spec.dim != 1) throw ConfigError("only N = 1 grids are implemented");
  if (c.n_cells % 2 != 0) throw ConfigError("n_cells must be even so the origin is a cell face");
  if (!(c.grading >= 1.0)) throw ConfigError("grading must be >= 1");
  if (c.quadrature_order < 2 || c.quadrature_order > 64) throw ConfigError("quadrature_order must lie in [2, 64]");
  if (c.tol < 0.0) throw ConfigError("tol must be nonnegative");
  if (c.max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (c.samples < 1 || c.trials < 1) throw ConfigError("samples and trials must be positive");
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (c.m < 0.0) throw ConfigError("m must be nonnegative");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  std::stringstream ss{std::string(text)};
  std::string line;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    try {
      apply_setting(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config_text(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty() || t.front() != '{') return parse_config(text);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(t);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("summary JSON: ") + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("summary JSON has no config object");
  ExperimentConfig c;
  for (const auto& [key, value] : j["config"].items()) {
    if (!value.is_string()) throw ConfigError("summary config values must be strings");
    apply_setting(c, key, value.get<std::string>());
  }
  validate(c);
  return c;
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
  std::map<std::string, std::string> m;
  m["experiment"] = experiment;
  m["N"] = std::to_string(spec.dim);
  m["s"] = fmt(spec.s);
  m["p"] = fmt(spec.p);
  m["beta"] = fmt(spec.beta);
  m["lambda"] = fmt(spec.lambda);
  m["q"] = fmt(spec.q_exponent);
  m["domain_radius"] = fmt(spec.domain_radius);
  m["exterior_radius"] = fmt(spec.exterior_radius);
  m["n_cells"] = std::to_string(n_cells);
  m["grading"] = fmt(grading);
  m["quadrature_order"] = std::to_string(quadrature_order);
  m["tol"] = fmt(tol);
  m["max_iterations"] = std::to_string(max_iterations);
  m["data"] = data;
  m["data_value"] = fmt(data_value);
  m["seed"] = std::to_string(seed);
  std::string lv;
  for (double x : levels) lv += (lv.empty() ? "" : ",") + fmt(x);
  m["levels"] = lv;
  m["m"] = fmt(this->m);
  m["alpha"] = fmt(alpha);
  m["samples"] = std::to_string(samples);
  m["trials"] = std::to_string(trials);
  std::string bp;
  for (const auto& [q, s1] : besov_pairs) bp += (bp.empty() ? "" : ",") + fmt(q) + ":" + fmt(s1);
  m["besov_pairs"] = bp;
  return m;
}

}  // namespace wfpl::cli
