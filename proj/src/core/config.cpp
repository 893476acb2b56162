#include "config.hpp"

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"
#include "ergodic.hpp"

namespace horocover {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ValidationError(key, "key '" + key + "': expected a number, got '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ValidationError(key, "key '" + key + "': expected an integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  if (!s.empty() && s[0] == '-') throw ValidationError(key, "key '" + key + "': must be non-negative");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ValidationError(key, "key '" + key + "': expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& w : words(s)) out.push_back(parse_double(key, w));
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValidationError(key, "key '" + key + "': expected true or false, got '" + s + "'");
}

std::vector<std::array<std::int64_t, 4>> parse_projection(const std::string& key, const std::string& s) {
  std::vector<std::array<std::int64_t, 4>> rows;
  for (const auto& row : split(s, ';')) {
    const auto w = words(row);
    if (w.size() != 4) throw ValidationError(key, "key '" + key + "': each row needs 4 integers");
    std::array<std::int64_t, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = parse_int(key, w[i]);
    rows.push_back(r);
  }
  return rows;
}

std::string fmt_projection(const std::vector<std::array<std::int64_t, 4>>& rows) {
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r) out += "; ";
    for (int i = 0; i < 4; ++i) out += (i ? " " : "") + std::to_string(rows[r][i]);
  }
  return out;
}

using Copies = std::vector<std::pair<std::vector<std::int64_t>, double>>;

Copies parse_copies(const std::string& key, const std::string& s) {
  Copies out;
  for (const auto& item : split(s, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ValidationError(key, "key '" + key + "': copies are written 'D_1 .. D_d : coefficient'");
    }
    std::vector<std::int64_t> D;
    for (const auto& w : words(item.substr(0, colon))) D.push_back(parse_int(key, w));
    out.emplace_back(D, parse_double(key, trim(item.substr(colon + 1))));
  }
  return out;
}

std::string fmt_copies(const Copies& copies) {
  std::string out;
  for (std::size_t k = 0; k < copies.size(); ++k) {
    if (k) out += "; ";
    for (std::size_t i = 0; i < copies[k].first.size(); ++i) {
      out += (i ? " " : "") + std::to_string(copies[k].first[i]);
    }
    out += ":" + fmt(copies[k].second);
  }
  return out;
}

struct KeySpec {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> parse;
  std::function<std::string(const ExperimentConfig&)> format;
};

#define HC_DOUBLE(key, field)                                                          \
  KeySpec {                                                                            \
    key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_double(key, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); }                         \
  }
#define HC_INT(key, field)                                                                          \
  KeySpec {                                                                                         \
    key,                                                                                            \
        [](ExperimentConfig& c, const std::string& v) {                                             \
          c.field = static_cast<decltype(c.field)>(parse_int(key, v));                              \
        },                                                                                          \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                           \
  }
#define HC_LIST(key, field)                                                                   \
  KeySpec {                                                                                   \
    key, [](ExperimentConfig& c, const std::string& v) { c.field = parse_list(key, v); },     \
        [](const ExperimentConfig& c) { return fmt_list(c.field); }                          \
  }
#define HC_STRING(key, field)                                                 \
  KeySpec {                                                                   \
    key, [](ExperimentConfig& c, const std::string& v) { c.field = v; },      \
        [](const ExperimentConfig& c) { return c.field; }                     \
  }

std::vector<KeySpec> observable_keys(const std::string& prefix, ObservableConfig ExperimentConfig::*member) {
  // Names must outlive the specs.
  static std::map<std::string, std::string> names;
  auto name = [&](const char* suffix) {
    const std::string k = prefix + "." + suffix;
    return names.emplace(k, k).first->second.c_str();
  };
  std::vector<KeySpec> out;
  const char* center = name("center");
  out.push_back({center,
                 [member, center](ExperimentConfig& c, const std::string& v) {
                   const auto xs = parse_list(center, v);
                   if (xs.size() != 2) throw ValidationError(center, std::string("key '") + center + "': expected 'x y'");
                   (c.*member).center = {xs[0], xs[1]};
                 },
                 [member](const ExperimentConfig& c) {
                   return fmt((c.*member).center[0]) + " " + fmt((c.*member).center[1]);
                 }});
  const char* radius = name("radius");
  out.push_back({radius,
                 [member, radius](ExperimentConfig& c, const std::string& v) {
                   (c.*member).radius = parse_double(radius, v);
                 },
                 [member](const ExperimentConfig& c) { return fmt((c.*member).radius); }});
  const char* angle = name("angle");
  out.push_back({angle,
                 [member, angle](ExperimentConfig& c, const std::string& v) {
                   (c.*member).angle = parse_double(angle, v);
                 },
                 [member](const ExperimentConfig& c) { return fmt((c.*member).angle); }});
  const char* hw = name("angle_halfwidth");
  out.push_back({hw,
                 [member, hw](ExperimentConfig& c, const std::string& v) {
                   (c.*member).angle_halfwidth = parse_double(hw, v);
                 },
                 [member](const ExperimentConfig& c) { return fmt((c.*member).angle_halfwidth); }});
  const char* copies = name("copies");
  out.push_back({copies,
                 [member, copies](ExperimentConfig& c, const std::string& v) {
                   (c.*member).copies = parse_copies(copies, v);
                 },
                 [member](const ExperimentConfig& c) { return fmt_copies((c.*member).copies); }});
  return out;
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    s.push_back({"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_uint("seed", v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    s.push_back(HC_INT("threads", threads));
    s.push_back(HC_INT("cover.d", cover_d));
    s.push_back({"cover.projection",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.projection = parse_projection("cover.projection", v);
                 },
                 [](const ExperimentConfig& c) { return fmt_projection(c.projection); }});
    s.push_back(HC_STRING("curvature.model", curvature_model));
    s.push_back(HC_DOUBLE("curvature.mean", curvature_mean));
    s.push_back(HC_DOUBLE("curvature.amplitude", curvature_amplitude));
    s.push_back(HC_DOUBLE("curvature.frequency", curvature_frequency));
    s.push_back(HC_DOUBLE("curvature.h_top", curvature_h_top));
    for (auto& k : observable_keys("observable", &ExperimentConfig::observable)) s.push_back(k);
    for (auto& k : observable_keys("observable2", &ExperimentConfig::observable2)) s.push_back(k);
    s.push_back(HC_STRING("sigma.file", sigma_file));
    s.push_back(HC_LIST("schedule.T", schedule_T));
    s.push_back(HC_LIST("schedule.t", schedule_t));
    s.push_back(HC_INT("schedule.x_count", schedule_x_count));
    s.push_back(HC_DOUBLE("numeric.step", numeric_step));
    s.push_back(HC_DOUBLE("numeric.flow_step", numeric_flow_step));
    s.push_back(HC_INT("mc.samples", mc_samples));
    s.push_back(HC_LIST("mc.times", mc_times));
    s.push_back(HC_INT("clt.samples", clt_samples));
    s.push_back(HC_DOUBLE("clt.time", clt_time));
    s.push_back(HC_INT("clt.seeds", clt_seeds));
    s.push_back({"ulam.cells",
                 [](ExperimentConfig& c, const std::string& v) {
                   const auto w = words(v);
                   if (w.size() != 3) throw ValidationError("ulam.cells", "key 'ulam.cells': expected 'n1 n2 n3'");
                   for (int i = 0; i < 3; ++i) c.ulam_cells[i] = static_cast<int>(parse_int("ulam.cells", w[i]));
                 },
                 [](const ExperimentConfig& c) {
                   return std::to_string(c.ulam_cells[0]) + " " + std::to_string(c.ulam_cells[1]) + " " +
                          std::to_string(c.ulam_cells[2]);
                 }});
    s.push_back(HC_INT("ulam.samples_per_cell", ulam_samples_per_cell));
    s.push_back(HC_DOUBLE("ulam.time", ulam_time));
    s.push_back(HC_DOUBLE("ulam.omega_max", ulam_omega_max));
    s.push_back(HC_DOUBLE("ulam.omega_step", ulam_omega_step));
    s.push_back(HC_DOUBLE("ulam.fit_radius", ulam_fit_radius));
    s.push_back(HC_STRING("ulam.dump", ulam_dump));
    s.push_back(HC_DOUBLE("theorem_b.sigma_len", theorem_b_sigma_len));
    s.push_back(HC_LIST("tau.s", tau_s));
    s.push_back(HC_LIST("tau.t", tau_t));
    s.push_back(HC_DOUBLE("tau.step", tau_step));
    s.push_back(HC_INT("tau.points", tau_points));
    s.push_back(HC_DOUBLE("winding.time", winding_time));
    s.push_back(HC_DOUBLE("winding.step", winding_step));
    s.push_back(HC_INT("reconstruct.grid", reconstruct_grid));
    s.push_back(HC_INT("reconstruct.points", reconstruct_points));
    s.push_back({"reconstruct.allow_aliasing",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.reconstruct_allow_aliasing = parse_bool("reconstruct.allow_aliasing", v);
                 },
                 [](const ExperimentConfig& c) { return std::string(c.reconstruct_allow_aliasing ? "true" : "false"); }});
    s.push_back(HC_INT("geometry.samples", geometry_samples));
    s.push_back(HC_INT("geometry.drift_steps", geometry_drift_steps));
    return s;
  }();
  return specs;
}

#undef HC_DOUBLE
#undef HC_INT
#undef HC_LIST
#undef HC_STRING

std::vector<std::array<std::int64_t, 4>> unit_projection(int d) {
  std::vector<std::array<std::int64_t, 4>> rows(static_cast<std::size_t>(std::clamp(d, 1, 4)));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i][i] = 1;
  return rows;
}

Copies origin_copy(int d) { return {{std::vector<std::int64_t>(static_cast<std::size_t>(std::clamp(d, 1, 4)), 0), 1.0}}; }

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ValidationError(key, std::string("key '") + key + "': " + what);
}

bool ascending(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace

ExperimentConfig default_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.projection = unit_projection(1);
  c.observable.copies = origin_copy(1);
  c.observable2 = ObservableConfig{{0.2, -0.1}, 0.5, 1.0, 1.5, origin_copy(1)};
  c.schedule_T = geometric_schedule(100.0, 1e6, std::sqrt(10.0));
  c.schedule_t = {6.0, 8.0, 10.0, 12.0};
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c = default_config(0);
  std::map<std::string, const KeySpec*> index;
  for (const KeySpec& k : key_specs()) index.emplace(k.name, &k);
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(lineno),
                            "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ValidationError(key, "unknown configuration key '" + key + "'");
    if (!seen.insert(key).second) throw ValidationError(key, "duplicate configuration key '" + key + "'");
    it->second->parse(c, value);
  }
  if (!seen.count("seed")) throw ValidationError("seed", "missing required key 'seed'");
  if (!seen.count("cover.projection")) c.projection = unit_projection(c.cover_d);
  if (!seen.count("observable.copies")) c.observable.copies = origin_copy(c.cover_d);
  if (!seen.count("observable2.copies")) c.observable2.copies = origin_copy(c.cover_d);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const KeySpec& k : key_specs()) out += std::string(k.name) + " = " + k.format(config) + "\n";
  return out;
}

void validate_config(const ExperimentConfig& c) {
  require(c.threads >= 1 && c.threads <= 1024, "threads", "must lie in [1, 1024]");
  require(c.cover_d >= 1 && c.cover_d <= 4, "cover.d", "must lie in [1, 4]");
  require(static_cast<int>(c.projection.size()) == c.cover_d, "cover.projection",
          "needs exactly cover.d rows");
  require(c.curvature_model == "constant" || c.curvature_model == "sinusoidal", "curvature.model",
          "must be 'constant' or 'sinusoidal'");
  if (c.curvature_model == "sinusoidal") {
    require(c.curvature_mean - std::abs(c.curvature_amplitude) > 0.0, "curvature.mean",
            "must exceed |curvature.amplitude| so that K < 0");
    require(c.curvature_frequency > 0.0, "curvature.frequency", "must be positive");
  }
  require(c.curvature_h_top >= 0.0, "curvature.h_top", "must be non-negative (0 = unknown)");
  for (int which = 0; which < 2; ++which) {
    const ObservableConfig& o = which == 0 ? c.observable : c.observable2;
    const char* key = which == 0 ? "observable.copies" : "observable2.copies";
    require(!o.copies.empty(), key, "needs at least one copy");
    for (const auto& copy : o.copies) {
      require(static_cast<int>(copy.first.size()) == c.cover_d, key, "each copy needs cover.d coordinates");
    }
    make_observable(c, which);
  }
  require(ascending(c.schedule_T) && !c.schedule_T.empty() && c.schedule_T.front() > 0.0, "schedule.T",
          "must be a non-empty increasing list of positive lengths");
  require(ascending(c.schedule_t) && !c.schedule_t.empty() && c.schedule_t.front() >= 0.0, "schedule.t",
          "must be a non-empty increasing list of non-negative times");
  require(c.schedule_x_count >= 1, "schedule.x_count", "must be at least 1");
  require(c.numeric_step > 0.0, "numeric.step", "must be positive");
  require(c.numeric_flow_step > 0.0 && c.numeric_flow_step <= 1.0, "numeric.flow_step", "must lie in (0, 1]");
  require(c.mc_samples >= 2, "mc.samples", "must be at least 2");
  require(!c.mc_times.empty(), "mc.times", "must list at least one time");
  for (double t : c.mc_times) require(t > 0.0, "mc.times", "times must be positive");
  require(c.clt_samples >= 2, "clt.samples", "must be at least 2");
  require(c.clt_time >= 0.0, "clt.time", "must be non-negative");
  require(c.clt_seeds >= 1, "clt.seeds", "must be at least 1");
  for (int n : c.ulam_cells) require(n >= 1 && n <= 256, "ulam.cells", "entries must lie in [1, 256]");
  require(c.ulam_samples_per_cell >= 1, "ulam.samples_per_cell", "must be at least 1");
  require(c.ulam_time > 0.0, "ulam.time", "must be positive");
  require(c.ulam_omega_max >= 0.0 && c.ulam_omega_max <= 0.5, "ulam.omega_max", "must lie in [0, 0.5]");
  require(c.ulam_omega_step > 0.0, "ulam.omega_step", "must be positive");
  require(c.ulam_fit_radius > 0.0, "ulam.fit_radius", "must be positive");
  require(c.theorem_b_sigma_len > 0.0, "theorem_b.sigma_len", "must be positive");
  require(!c.tau_s.empty() && !c.tau_t.empty(), "tau.s", "tau.s and tau.t must be non-empty");
  require(c.tau_step > 0.0 && c.tau_step <= 0.1, "tau.step", "must lie in (0, 0.1]");
  require(c.tau_points >= 1, "tau.points", "must be at least 1");
  require(c.winding_time >= 0.0, "winding.time", "must be non-negative");
  require(c.winding_step > 0.0 && c.winding_step <= 1.0, "winding.step", "must lie in (0, 1]");
  require(c.reconstruct_grid >= 0, "reconstruct.grid", "must be non-negative (0 = automatic)");
  require(c.reconstruct_points >= 1, "reconstruct.points", "must be at least 1");
  require(c.geometry_samples >= 1, "geometry.samples", "must be at least 1");
  require(c.geometry_drift_steps >= 1, "geometry.drift_steps", "must be at least 1");
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

Cover make_cover(const ExperimentConfig& config) {
  std::vector<Homology> rows;
  for (const auto& r : config.projection) rows.push_back(Homology{r[0], r[1], r[2], r[3]});
  return Cover(default_group(), AbelianizationMap(rows));
}

CurvatureModel make_model(const ExperimentConfig& config) {
  if (config.curvature_model == "constant") return CurvatureModel::constant();
  CurvatureModel m = CurvatureModel::sinusoidal(config.curvature_mean, config.curvature_amplitude,
                                                config.curvature_frequency);
  if (config.curvature_h_top > 0.0) m = m.with_h_top(config.curvature_h_top);
  return m;
}

CoverObservable make_observable(const ExperimentConfig& config, int which) {
  const ObservableConfig& o = which == 0 ? config.observable : config.observable2;
  const std::string prefix = which == 0 ? "observable" : "observable2";
  try {
    BaseBump bump(Complex{o.center[0], o.center[1]}, o.radius, o.angle, o.angle_halfwidth);
    std::vector<std::pair<DeckVector, double>> copies;
    for (const auto& [D, coef] : o.copies) {
      DeckVector v = DeckVector::zero(static_cast<int>(D.size()));
      for (std::size_t i = 0; i < D.size() && i < 4; ++i) v.v[i] = D[i];
      copies.emplace_back(v, coef);
    }
    return CoverObservable(bump, copies);
  } catch (const ValidationError& e) {
    // Report the key under the right prefix.
    std::string key = e.key();
    if (key.rfind("observable.", 0) == 0) key = prefix + key.substr(std::string("observable").size());
    throw ValidationError(key, "key '" + key + "': " + e.what());
  }
}

}  // namespace horocover
