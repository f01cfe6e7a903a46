#include "tikgamma/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace tikgamma {

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::fem_rate: return "fem-rate";
    case StudyKind::integral_demo: return "integral-demo";
    case StudyKind::inf_study: return "inf-study";
    case StudyKind::alpha_zero: return "alpha-zero";
    case StudyKind::gamma_estimate: return "gamma-estimate";
    case StudyKind::coercivity: return "coercivity";
    case StudyKind::eps_chain: return "eps-chain";
  }
  return "?";
}

std::string format_error(const ConfigError& error) {
  if (error.line == 0) return error.message;
  return "line " + std::to_string(error.line) + ": " + error.message;
}

namespace {

const std::vector<std::string> kStudies = {"fem-rate",       "integral-demo", "inf-study", "alpha-zero",
                                           "gamma-estimate", "coercivity",    "eps-chain"};
const std::set<std::string> kSections = {"", "problem", "schedule", "study", "solver", "output"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

// Typed readers over one `key = value` entry; each records an error instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<ConfigError>& errors) : errors_(errors) {}

  void number(const Entry& e, const std::string& key, double& out) {
    static const std::regex pattern(R"(^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$)");
    if (!std::regex_match(e.value, pattern)) return fail(e, "malformed number for '" + key + "': '" + e.value + "'");
    out = std::strtod(e.value.c_str(), nullptr);
  }

  void count(const Entry& e, const std::string& key, std::size_t& out) {
    static const std::regex pattern(R"(^\d+$)");
    if (!std::regex_match(e.value, pattern))
      return fail(e, "malformed non-negative integer for '" + key + "': '" + e.value + "'");
    out = static_cast<std::size_t>(std::strtoull(e.value.c_str(), nullptr, 10));
  }

  void seed(const Entry& e, std::uint64_t& out) {
    std::size_t v = 0;
    count(e, "seed", v);
    out = v;
  }

  void flag(const Entry& e, const std::string& key, bool& out) {
    if (e.value == "true" || e.value == "1") out = true;
    else if (e.value == "false" || e.value == "0") out = false;
    else fail(e, "'" + key + "' must be true or false, got '" + e.value + "'");
  }

  void label(const Entry& e, const std::string& key, const std::vector<std::string>& allowed, std::string& out) {
    if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end())
      return fail(e, "unknown " + key + " label '" + e.value + "'; available: " + join(allowed));
    out = e.value;
  }

  void numbers(const Entry& e, const std::string& key, std::vector<double>& out) {
    out.clear();
    for (const auto& item : split(e.value)) {
      double v = 0;
      const std::size_t before = errors_.size();
      number({item, e.line}, key, v);
      if (errors_.size() != before) return;
      out.push_back(v);
    }
  }

  void counts(const Entry& e, const std::string& key, std::vector<std::size_t>& out) {
    out.clear();
    for (const auto& item : split(e.value)) {
      std::size_t v = 0;
      const std::size_t before = errors_.size();
      count({item, e.line}, key, v);
      if (errors_.size() != before) return;
      out.push_back(v);
    }
  }

  void fail(const Entry& e, std::string message) { errors_.push_back({e.line, std::move(message)}); }

 private:
  static std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) items.push_back(trim(item));
    return items;
  }

  std::vector<ConfigError>& errors_;
};

void apply_study_defaults(StudyConfig& c) {
  auto& pr = c.problem;
  auto& sc = c.schedule;
  auto& st = c.study_params;
  switch (c.study) {
    case StudyKind::fem_rate:
      pr.operator_kind = "fem";
      sc.levels = {7, 15, 31, 63, 127};
      break;
    case StudyKind::integral_demo:
      sc.levels = {9, 17, 33, 65};
      pr.reference = 1025;
      break;
    case StudyKind::inf_study:
    case StudyKind::eps_chain:
    case StudyKind::coercivity:
      sc.levels = {9, 17, 33, 65, 129};
      break;
    case StudyKind::alpha_zero:
      pr.family = "exact";
      sc.levels = {64, 128, 256, 512};
      sc.alpha = "power";
      sc.alpha_limit = 0.0;
      sc.alpha_amplitude = 1.0;
      sc.alpha_exponent = 0.5;
      st.tol = 1e-3;
      break;
    case StudyKind::gamma_estimate:
      st.tol = 0.05;  // points and radii depend on the family and are filled in by run_study
      break;
  }
  if (c.study == StudyKind::coercivity) st.thresholds = {0.1, 1.0, 10.0};
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  auto& errors = result.errors;

  // Pass 1: collect entries per section.
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({line_no, "malformed section header '" + line + "'"});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        errors.push_back({line_no, "unknown section [" + section + "]; available: problem, schedule, study, solver, output"});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({line_no, "expected 'key = value', got '" + line + "'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back({line_no, "missing key before '='"});
      continue;
    }
    auto& bucket = sections[section];
    if (bucket.count(key)) {
      errors.push_back({line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(bucket[key].line) + ")"});
      continue;
    }
    bucket[key] = {value, line_no};
  }

  StudyConfig c;
  Reader read(errors);

  // The study kind decides the defaults, so it is read first.
  const auto& top = sections[""];
  const auto study_it = top.find("study");
  if (study_it == top.end()) {
    errors.push_back({0, "missing 'study' key; available: " + join(kStudies)});
  } else {
    const auto pos = std::find(kStudies.begin(), kStudies.end(), study_it->second.value);
    if (pos == kStudies.end())
      read.fail(study_it->second, "unknown study '" + study_it->second.value + "'; available: " + join(kStudies));
    else
      c.study = static_cast<StudyKind>(pos - kStudies.begin());
  }
  apply_study_defaults(c);

  using Handler = std::function<void(const Entry&)>;
  auto& pr = c.problem;
  auto& sc = c.schedule;
  auto& st = c.study_params;
  auto& sv = c.solver;
  auto& out = c.output;
  const std::vector<std::string> norms = {"L2", "Linf", "H1_0"};

  std::map<std::string, std::map<std::string, Handler>> handlers;
  handlers[""]["study"] = [](const Entry&) {};
  auto& hp = handlers["problem"];
  hp["operator"] = [&](const Entry& e) { read.label(e, "operator", {"integral", "fem", "identity"}, pr.operator_kind); };
  hp["family"] = [&](const Entry& e) { read.label(e, "family", {"approximate", "exact"}, pr.family); };
  hp["kernel"] = [&](const Entry& e) { read.label(e, "kernel", {"constant", "separable", "gaussian"}, pr.kernel); };
  hp["sigma"] = [&](const Entry& e) { read.number(e, "sigma", pr.sigma); };
  hp["kappa"] = [&](const Entry& e) { read.number(e, "kappa", pr.kappa); };
  hp["potential"] = [&](const Entry& e) {
    read.label(e, "potential", {"zero", "one", "sin_pi", "custom-table"}, pr.potential);
  };
  hp["potential_table"] = [&](const Entry& e) { read.numbers(e, "potential_table", pr.potential_table); };
  hp["solution"] = [&](const Entry& e) { read.label(e, "solution", {"sin_pi", "quadratic"}, pr.solution); };
  hp["truth"] = [&](const Entry& e) { read.label(e, "truth", {"sin_pi", "ramp", "bump", "zero"}, pr.truth); };
  hp["reference"] = [&](const Entry& e) { read.count(e, "reference", pr.reference); };
  hp["x_nodes"] = [&](const Entry& e) { read.count(e, "x_nodes", pr.x_nodes); };
  hp["domain"] = [&](const Entry& e) { read.label(e, "domain", {"whole", "ball", "ball_nonneg"}, pr.domain); };
  hp["radius"] = [&](const Entry& e) { read.number(e, "radius", pr.radius); };
  hp["domain_norm"] = [&](const Entry& e) { read.label(e, "domain_norm", norms, pr.domain_norm); };
  hp["strict_subdomain"] = [&](const Entry& e) { read.flag(e, "strict_subdomain", pr.strict_subdomain); };

  auto& hs = handlers["schedule"];
  hs["levels"] = [&](const Entry& e) { read.counts(e, "levels", sc.levels); };
  hs["alpha"] = [&](const Entry& e) { read.label(e, "alpha", {"constant", "power", "offset_power"}, sc.alpha); };
  hs["alpha_limit"] = [&](const Entry& e) { read.number(e, "alpha_limit", sc.alpha_limit); };
  hs["alpha_amplitude"] = [&](const Entry& e) { read.number(e, "alpha_amplitude", sc.alpha_amplitude); };
  hs["alpha_exponent"] = [&](const Entry& e) { read.number(e, "alpha_exponent", sc.alpha_exponent); };
  hs["noise"] = [&](const Entry& e) { read.label(e, "noise", {"none", "power", "random"}, sc.noise); };
  hs["noise_amplitude"] = [&](const Entry& e) { read.number(e, "noise_amplitude", sc.noise_amplitude); };
  hs["noise_exponent"] = [&](const Entry& e) { read.number(e, "noise_exponent", sc.noise_exponent); };
  hs["p"] = [&](const Entry& e) { read.number(e, "p", sc.p); };
  hs["penalty"] = [&](const Entry& e) { read.label(e, "penalty", {"half_sq_l2", "linf", "p_power_norm"}, sc.penalty); };
  hs["penalty_q"] = [&](const Entry& e) { read.number(e, "penalty_q", sc.penalty_q); };
  hs["penalty_norm"] = [&](const Entry& e) { read.label(e, "penalty_norm", norms, sc.penalty_norm); };
  hs["eps_scale"] = [&](const Entry& e) { read.number(e, "eps_scale", sc.eps_scale); };

  auto& hst = handlers["study"];
  hst["tol"] = [&](const Entry& e) { read.number(e, "tol", st.tol); };
  hst["slope_min"] = [&](const Entry& e) { read.number(e, "slope_min", st.slope_min); };
  hst["slope_max"] = [&](const Entry& e) { read.number(e, "slope_max", st.slope_max); };
  hst["family"] = [&](const Entry& e) { read.label(e, "family", {"oscillating", "constant", "uniform"}, st.family); };
  hst["constant_value"] = [&](const Entry& e) { read.number(e, "constant_value", st.constant_value); };
  hst["grid"] = [&](const Entry& e) { read.count(e, "grid", st.grid); };
  hst["window"] = [&](const Entry& e) { read.count(e, "window", st.window); };
  hst["points"] = [&](const Entry& e) { read.numbers(e, "points", st.points); };
  hst["radii"] = [&](const Entry& e) { read.numbers(e, "radii", st.radii); };
  hst["samples"] = [&](const Entry& e) { read.count(e, "samples", st.samples); };
  hst["thresholds"] = [&](const Entry& e) { read.numbers(e, "thresholds", st.thresholds); };
  hst["cauchy_tol"] = [&](const Entry& e) { read.number(e, "cauchy_tol", st.cauchy_tol); };
  hst["value_tol"] = [&](const Entry& e) { read.number(e, "value_tol", st.value_tol); };

  auto& hv = handlers["solver"];
  hv["max_iter"] = [&](const Entry& e) { read.count(e, "max_iter", sv.max_iter); };
  hv["grad_tol"] = [&](const Entry& e) { read.number(e, "grad_tol", sv.grad_tol); };
  hv["initial_step"] = [&](const Entry& e) { read.number(e, "initial_step", sv.initial_step); };
  hv["shrink"] = [&](const Entry& e) { read.number(e, "shrink", sv.shrink); };
  hv["sufficient_decrease"] = [&](const Entry& e) { read.number(e, "sufficient_decrease", sv.sufficient_decrease); };
  hv["restarts"] = [&](const Entry& e) { read.count(e, "restarts", sv.restarts); };

  auto& ho = handlers["output"];
  ho["format"] = [&](const Entry& e) { read.label(e, "format", {"csv", "json-lines"}, out.format); };
  ho["path"] = [&](const Entry& e) { out.path = e.value; };
  ho["seed"] = [&](const Entry& e) { read.seed(e, out.seed); };
  ho["timing"] = [&](const Entry& e) { read.flag(e, "timing", out.timing); };

  // Pass 2: dispatch in line order so errors come out sorted.
  std::vector<std::tuple<std::size_t, std::string, std::string, Entry>> ordered;
  for (const auto& [name, entries] : sections)
    for (const auto& [key, entry] : entries) ordered.emplace_back(entry.line, name, key, entry);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  for (const auto& [line, name, key, entry] : ordered) {
    if (!kSections.count(name)) continue;  // already reported
    const auto& table = handlers[name];
    const auto it = table.find(key);
    if (it == table.end()) {
      std::vector<std::string> known;
      for (const auto& kv : table) known.push_back(kv.first);
      const std::string where = name.empty() ? "the top level" : "[" + name + "]";
      errors.push_back({line, "unknown key '" + key + "' in " + where + "; available: " + join(known)});
      continue;
    }
    it->second(entry);
  }

  // Cross-field validation.
  auto line_of = [&](const std::string& name, const std::string& key) -> std::size_t {
    const auto s = sections.find(name);
    if (s == sections.end()) return 0;
    const auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  };
  const bool uses_levels = c.study != StudyKind::gamma_estimate;
  if (uses_levels) {
    if (sc.levels.empty()) errors.push_back({line_of("schedule", "levels"), "levels must be nonempty"});
    for (std::size_t i = 1; i < sc.levels.size(); ++i)
      if (sc.levels[i] <= sc.levels[i - 1]) {
        errors.push_back({line_of("schedule", "levels"), "levels must be strictly increasing"});
        break;
      }
    if (!sc.levels.empty() && sc.levels.front() == 0)
      errors.push_back({line_of("schedule", "levels"), "levels must be positive"});
  }
  if (c.study == StudyKind::fem_rate && sc.levels.size() < 3)
    errors.push_back({line_of("schedule", "levels"), "fem-rate needs at least 3 levels"});
  if (pr.potential == "custom-table" && pr.potential_table.size() < 2)
    errors.push_back({line_of("problem", "potential"), "custom-table potential needs potential_table with >= 2 values"});
  for (double v : pr.potential_table)
    if (v < 0.0) {
      errors.push_back({line_of("problem", "potential_table"), "potential values must be >= 0"});
      break;
    }
  if (!(pr.sigma > 0.0)) errors.push_back({line_of("problem", "sigma"), "sigma must be positive"});
  if (pr.x_nodes < 2) errors.push_back({line_of("problem", "x_nodes"), "x_nodes must be at least 2"});
  if (!(pr.radius > 0.0)) errors.push_back({line_of("problem", "radius"), "radius must be positive"});
  if (!(sc.p >= 1.0)) errors.push_back({line_of("schedule", "p"), "p must be >= 1"});
  if (!(sc.penalty_q >= 1.0)) errors.push_back({line_of("schedule", "penalty_q"), "penalty_q must be >= 1"});
  if (sc.alpha_limit < 0.0) errors.push_back({line_of("schedule", "alpha_limit"), "alpha_limit must be >= 0"});
  if (!(sc.eps_scale > 0.0)) errors.push_back({line_of("schedule", "eps_scale"), "eps_scale must be positive"});
  if (uses_levels && !sc.levels.empty() && c.study != StudyKind::fem_rate && sc.levels.back() > pr.reference &&
      pr.family == "approximate")
    errors.push_back({line_of("schedule", "levels"), "largest level exceeds the reference resolution"});
  if (c.study == StudyKind::gamma_estimate) {
    for (std::size_t i = 1; i < st.radii.size(); ++i)
      if (!(st.radii[i] < st.radii[i - 1])) {
        errors.push_back({line_of("study", "radii"), "radii must be strictly decreasing"});
        break;
      }
    if (st.grid < 2) errors.push_back({line_of("study", "grid"), "grid must have at least 2 nodes"});
    if (st.window < 2) errors.push_back({line_of("study", "window"), "window must be at least 2"});
  }
  if (c.study == StudyKind::coercivity && st.thresholds.empty())
    errors.push_back({line_of("study", "thresholds"), "thresholds must be nonempty"});
  try {
    sv.validate();
  } catch (const std::exception& ex) {
    errors.push_back({0, std::string("[solver] ") + ex.what()});
  }

  std::stable_sort(errors.begin(), errors.end(), [](const ConfigError& a, const ConfigError& b) {
    return a.line < b.line;
  });
  if (errors.empty()) result.config = c;
  return result;
}

}  // namespace tikgamma
