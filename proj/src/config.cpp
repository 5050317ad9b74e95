#include "autores/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "autores/csv.hpp"
#include "autores/error.hpp"

namespace autores {

std::vector<double> SweepSpec::values() const {
  if (parameter == "none") return {};
  std::vector<double> v;
  for (int k = 0; k < steps; ++k) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
    // Snap linear grids so 0.1-style steps print as written.
    v.push_back(log_spacing ? start * std::pow(stop / start, t)
                            : std::round((start + (stop - start) * t) * 1e12) / 1e12);
  }
  if (steps > 1) v.back() = stop;
  return v;
}

std::vector<double> AmplitudeGridSpec::values() const {
  std::vector<double> v;
  for (int k = 0; k < steps; ++k) v.push_back(steps == 1 ? start : start + (stop - start) * k / (steps - 1));
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& path) {
  double x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) throw ConfigError(path + ": expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& v, const std::string& path) {
  long long x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(path + ": expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& v, const std::string& path) {
  const long long x = to_integer(v, path);
  if (x < -1'000'000'000 || x > 1'000'000'000) throw ConfigError(path + ": integer out of range");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& v, const std::string& path) {
  std::uint64_t x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(path + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& path) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(path + ": expected true or false, got '" + v + "'");
}

template <class T, class Parse>
std::vector<T> to_list(const std::string& v, const std::string& path, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(trim(item), path));
  if (out.empty()) throw ConfigError(path + ": empty list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_number(v[k]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define NUM(sec, key, member)                                                              \
  Field { sec, key, [](const RunConfig& c) { return format_number(c.member); },           \
          [](RunConfig& c, const std::string& v, const std::string& p) { c.member = to_double(v, p); } }
#define INT(sec, key, member)                                                              \
  Field { sec, key, [](const RunConfig& c) { return format_number(c.member); },           \
          [](RunConfig& c, const std::string& v, const std::string& p) { c.member = to_int(v, p); } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      NUM("system", "cavity_freq", system.cavity_freq),
      NUM("system", "kerr", system.kerr),
      NUM("system", "ej", system.ej),
      NUM("system", "ec", system.ec),
      NUM("system", "g01", system.g01),
      NUM("system", "detuning", system.detuning),
      INT("system", "n_levels", system.n_levels),
      INT("system", "n_photons", system.n_photons),
      NUM("system", "kappa", system.kappa),
      NUM("system", "gamma1", system.gamma1),
      NUM("pulse", "f_start", pulse.f_start),
      NUM("pulse", "f_stop", pulse.f_stop),
      NUM("pulse", "duration", pulse.duration),
      NUM("pulse", "amplitude", pulse.amplitude),
      {"pulse", "envelope",
       [](const RunConfig& c) {
         return std::string(c.pulse.envelope == Envelope::rectangular ? "rectangular" : "raised_cosine");
       },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v == "rectangular") c.pulse.envelope = Envelope::rectangular;
         else if (v == "raised_cosine") c.pulse.envelope = Envelope::raised_cosine;
         else throw ConfigError(p + ": expected rectangular or raised_cosine, got '" + v + "'");
       }},
      NUM("pulse", "ramp", pulse.ramp),
      {"sweep", "parameter", [](const RunConfig& c) { return c.sweep.parameter; },
       [](RunConfig& c, const std::string& v, const std::string&) { c.sweep.parameter = v; }},
      NUM("sweep", "start", sweep.start),
      NUM("sweep", "stop", sweep.stop),
      INT("sweep", "steps", sweep.steps),
      {"sweep", "spacing", [](const RunConfig& c) { return std::string(c.sweep.log_spacing ? "log" : "linear"); },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v != "log" && v != "linear") throw ConfigError(p + ": expected linear or log, got '" + v + "'");
         c.sweep.log_spacing = v == "log";
       }},
      {"scurve", "grid", [](const RunConfig& c) { return std::string(c.scurve.relative ? "relative" : "absolute"); },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v != "relative" && v != "absolute") throw ConfigError(p + ": expected relative or absolute, got '" + v + "'");
         c.scurve.relative = v == "relative";
       }},
      NUM("scurve", "start", scurve.start),
      NUM("scurve", "stop", scurve.stop),
      INT("scurve", "steps", scurve.steps),
      INT("ensemble", "n_runs", n_runs),
      {"ensemble", "seed0", [](const RunConfig& c) { return std::to_string(c.seed0); },
       [](RunConfig& c, const std::string& v, const std::string& p) { c.seed0 = to_u64(v, p); }},
      {"engine", "name", [](const RunConfig& c) { return engine_name(c.engine); },
       [](RunConfig& c, const std::string& v, const std::string&) { c.engine = parse_engine(v); }},
      NUM("engine", "sample_dt", sample_dt),
      NUM("engine", "rtol", rtol),
      NUM("engine", "atol", atol),
      INT("analysis", "qubit_init", analysis.qubit_init),
      NUM("analysis", "cut_fraction", analysis.cut_fraction),
      {"analysis", "noise",
       [](const RunConfig& c) { return std::string(c.analysis.noise == InitialNoise::vacuum ? "vacuum" : "none"); },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v != "vacuum" && v != "none") throw ConfigError(p + ": expected vacuum or none, got '" + v + "'");
         c.analysis.noise = v == "vacuum" ? InitialNoise::vacuum : InitialNoise::none;
       }},
      {"analysis", "t_capture",
       [](const RunConfig& c) {
         return c.analysis.t_capture ? format_number(*c.analysis.t_capture) : std::string("median");
       },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v == "median") c.analysis.t_capture.reset();
         else c.analysis.t_capture = to_double(v, p);
       }},
      {"analysis", "coupling",
       [](const RunConfig& c) { return std::string(c.analysis.coupling == Coupling::rwa ? "rwa" : "full"); },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         if (v != "rwa" && v != "full") throw ConfigError(p + ": expected rwa or full, got '" + v + "'");
         c.analysis.coupling = v == "rwa" ? Coupling::rwa : Coupling::full;
       }},
      INT("analysis", "max_excitation", analysis.max_excitation),
      {"analysis", "manifolds", [](const RunConfig& c) { return join(c.analysis.manifolds); },
       [](RunConfig& c, const std::string& v, const std::string& p) { c.analysis.manifolds = to_list<int>(v, p, to_int); }},
      {"analysis", "all_pairs", [](const RunConfig& c) { return std::string(c.analysis.all_pairs ? "true" : "false"); },
       [](RunConfig& c, const std::string& v, const std::string& p) { c.analysis.all_pairs = to_bool(v, p); }},
      INT("analysis", "n_fit", analysis.n_fit),
      NUM("analysis", "crossing_window", analysis.crossing_window),
      {"analysis", "dynamical", [](const RunConfig& c) { return std::string(c.analysis.dynamical ? "true" : "false"); },
       [](RunConfig& c, const std::string& v, const std::string& p) { c.analysis.dynamical = to_bool(v, p); }},
      NUM("analysis", "pump_detuning", analysis.pump_detuning),
      {"analysis", "pump_nbar", [](const RunConfig& c) { return join(c.analysis.pump_nbar); },
       [](RunConfig& c, const std::string& v, const std::string& p) {
         c.analysis.pump_nbar = to_list<double>(v, p, to_double);
       }},
      NUM("analysis", "probe_amp", analysis.probe_amp),
  };
  return table;
}

#undef NUM
#undef INT

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void apply_values(RunConfig& c, const std::map<std::string, std::pair<std::string, std::string>>& values) {
  // values: "section.key" -> (value, location)
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[std::string(f.section) + "." + f.key] = &f;
  for (const auto& [path, entry] : values) {
    if (path == "system.quality" || path == "system.t1_ns" || path == "output.dir") continue;
    auto it = index.find(path);
    if (it == index.end()) throw ConfigError(entry.second + ": unknown key " + path);
    it->second->set(c, entry.first, path);
  }
  if (auto it = values.find("output.dir"); it != values.end()) c.output_dir = it->second.first;
  if (auto it = values.find("system.quality"); it != values.end()) {
    require(!values.contains("system.kappa"), "system.quality and system.kappa are mutually exclusive");
    c.system.kappa = kappa_from_quality(c.system.cavity_freq, to_double(it->second.first, "system.quality"));
  }
  if (auto it = values.find("system.t1_ns"); it != values.end()) {
    require(!values.contains("system.gamma1"), "system.t1_ns and system.gamma1 are mutually exclusive");
    c.system.gamma1 = gamma1_from_t1(to_double(it->second.first, "system.t1_ns"));
  }
}

}  // namespace

void RunConfig::validate() const {
  system.validate();
  pulse.validate();
  const auto& s = sweep.parameter;
  require(s == "none" || s == "detuning" || s == "amplitude" || s == "rate",
          "sweep.parameter must be none, detuning, amplitude or rate");
  if (s != "none") {
    require(sweep.steps >= 1, "sweep.steps must be >= 1");
    require(sweep.steps <= 100000, "sweep.steps must be <= 100000");
    require(!sweep.log_spacing || (sweep.start > 0 && sweep.stop > 0), "sweep.spacing = log needs positive bounds");
  }
  if (s == "amplitude") require(sweep.start >= 0 && sweep.stop >= 0, "sweep.start/stop amplitudes must be >= 0");
  if (s == "rate") require(sweep.start > 0 && sweep.stop > 0, "sweep.start/stop rates must be > 0");
  require(scurve.steps >= 3, "scurve.steps must be >= 3");
  require(scurve.start >= 0 && scurve.stop > scurve.start, "scurve.stop must exceed scurve.start >= 0");
  require(n_runs >= 1, "ensemble.n_runs must be >= 1");
  require(sample_dt > 0, "engine.sample_dt must be > 0");
  require(rtol > 0 && atol > 0, "engine.rtol and engine.atol must be > 0");
  require(analysis.qubit_init == 0 || analysis.qubit_init == 1, "analysis.qubit_init must be 0 or 1");
  require(analysis.cut_fraction > 0 && analysis.cut_fraction < 1, "analysis.cut_fraction must be in (0, 1)");
  require(!analysis.t_capture || *analysis.t_capture >= 0, "analysis.t_capture must be >= 0");
  require(analysis.max_excitation >= 1, "analysis.max_excitation must be >= 1");
  require(analysis.max_excitation <= system.n_photons - 1, "analysis.max_excitation must be <= system.n_photons - 1");
  for (int m : analysis.manifolds)
    require(m >= 1 && m <= analysis.max_excitation, "analysis.manifolds must lie in [1, analysis.max_excitation]");
  require(analysis.n_fit >= 3, "analysis.n_fit must be >= 3");
  require(analysis.n_fit <= system.n_photons - 1, "analysis.n_fit must be <= system.n_photons - 1");
  require(analysis.crossing_window >= 0, "analysis.crossing_window must be >= 0");
  require(analysis.probe_amp > 0, "analysis.probe_amp must be > 0");
  require(std::abs(analysis.pump_detuning) > 5 * system.kappa,
          "analysis.pump_detuning must exceed 5 kappa in magnitude");
  require(analysis.pump_nbar.size() >= 2, "analysis.pump_nbar needs at least two values");
  for (double n : analysis.pump_nbar) require(n >= 0, "analysis.pump_nbar values must be >= 0");
  require(!output_dir.empty(), "output.dir must not be empty");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(std::string(f.section) + "." + f.key, f.get(*this));
  return out;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(*this) << '\n';
  }
  return os.str();
}

std::string RunConfig::content_hash() const { return git_blob_sha1(to_text()); }

EnsembleSettings RunConfig::ensemble(int jobs) const {
  EnsembleSettings s;
  s.engine = engine;
  s.n_runs = n_runs;
  s.seed0 = seed0;
  s.jobs = jobs;
  s.cut_fraction = analysis.cut_fraction;
  s.noise = analysis.noise;
  s.traj.sample_dt = sample_dt;
  s.traj.rtol = rtol;
  s.traj.atol = atol;
  s.integ.sample_dt = sample_dt;
  s.integ.rtol = rtol;
  s.integ.atol = std::max(atol, 1e-8);
  return s;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, std::pair<std::string, std::string>> values;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, where + ": expected key = value");
    require(!section.empty(), where + ": key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string path = section + "." + key;
    require(!values.contains(path), where + ": duplicate key " + path);
    values[path] = {trim(line.substr(eq + 1)), where};
  }
  RunConfig c;
  apply_values(c, values);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

RunConfig config_from_metadata(const std::vector<std::pair<std::string, std::string>>& meta) {
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[std::string(f.section) + "." + f.key] = &f;
  std::map<std::string, std::pair<std::string, std::string>> values;
  for (const auto& [k, v] : meta)
    if (index.contains(k)) values[k] = {v, "metadata"};
  RunConfig c;
  apply_values(c, values);
  return c;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw NumericalError("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

}  // namespace autores
