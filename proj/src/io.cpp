#include "esdg/io.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace esdg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config ---

struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string path;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

IniFile parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  IniFile ini;
  ini.path = path;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    ini.sections[section][key] = value;
  }
  return ini;
}

class SectionReader {
 public:
  SectionReader(const IniFile& ini, const std::string& name) : ini_(ini), name_(name) {
    const auto it = ini.sections.find(name);
    if (it != ini.sections.end()) entries_ = it->second;
  }

  ~SectionReader() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return entries_.count(key) > 0;
  }
  std::string raw(const std::string& key) {
    seen_.insert(key);
    return entries_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw(key), &pos);
      if (pos != raw(key).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(ini_.path + ": [" + name_ + "] " + key + ": not a number");
    }
  }

  long integer(const std::string& key, long fallback) {
    const double v = number(key, static_cast<double>(fallback));
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
      throw ConfigError(ini_.path + ": [" + name_ + "] " + key + ": not an integer");
    return n;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(ini_.path + ": [" + name_ + "] " + key + ": not a boolean");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
  }

  std::vector<std::string> tokens(const std::string& key) {
    std::vector<std::string> out;
    if (!has(key)) return out;
    std::istringstream ss(raw(key));
    std::string tok;
    while (ss >> tok) {
      if (!tok.empty() && tok.back() == ',') tok.pop_back();
      if (!tok.empty()) out.push_back(tok);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : entries_)
      if (!seen_.count(key))
        throw ConfigError(ini_.path + ": [" + name_ + "] unknown key: " + key);
  }

 private:
  const IniFile& ini_;
  std::string name_;
  std::map<std::string, std::string> entries_;
  std::set<std::string> seen_;
};

void check_sections(const IniFile& ini, const std::vector<std::string>& allowed) {
  for (const auto& [name, entries] : ini.sections)
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      throw ConfigError(ini.path + ": unknown section [" + name + "]");
}

RunSetup read_run_sections(const IniFile& ini) {
  RunSetup setup;

  SectionReader scheme(ini, "scheme");
  setup.scheme.degree = static_cast<int>(scheme.integer("degree", 1));
  if (setup.scheme.degree < 1 || setup.scheme.degree > 20)
    throw ConfigError(ini.path + ": [scheme] degree out of range");
  const std::string vol = scheme.text("volume_flux", "ranocha");
  if (vol == "ranocha")
    setup.scheme.flux_choice.volume_flux = VolumeFlux::Ranocha;
  else if (vol == "chandrashekar")
    setup.scheme.flux_choice.volume_flux = VolumeFlux::Chandrashekar;
  else
    throw ConfigError(ini.path + ": [scheme] volume_flux must be ranocha or chandrashekar");
  const std::string surf = scheme.text("surface_flux", "llf");
  if (surf == "llf")
    setup.scheme.flux_choice.surface_flux = SurfaceFlux::LocalLaxFriedrichs;
  else if (surf == "ranocha")
    setup.scheme.flux_choice.surface_flux = SurfaceFlux::Ranocha;
  else
    throw ConfigError(ini.path + ": [scheme] surface_flux must be llf or ranocha");
  setup.scheme.gas.gamma = scheme.number("gamma", 1.4);
  if (!(setup.scheme.gas.gamma > 1.0))
    throw ConfigError(ini.path + ": [scheme] gamma must be > 1");
  setup.scheme.bounds.rho_min = scheme.number("rho_min", 1e-6);
  setup.scheme.bounds.p_min = scheme.number("p_min", 1e-6);
  setup.scheme.shock_capturing.enabled = scheme.flag("shock_capturing", false);
  setup.scheme.shock_capturing.alpha_max = scheme.number("alpha_max", 0.002);
  setup.scheme.shock_capturing.alpha_min = scheme.number("alpha_min", 0.0001);
  if (!(setup.scheme.shock_capturing.alpha_min >= 0.0 &&
        setup.scheme.shock_capturing.alpha_min <= setup.scheme.shock_capturing.alpha_max &&
        setup.scheme.shock_capturing.alpha_max <= 1.0))
    throw ConfigError(ini.path + ": [scheme] need 0 <= alpha_min <= alpha_max <= 1");
  scheme.reject_unknown();

  SectionReader time(ini, "time");
  setup.time.cfl = time.number("cfl", 1.3);
  setup.time.t_end = time.number("t_end", 2.0);
  setup.time.relaxation_enabled = time.flag("relaxation", false);
  setup.time.max_steps = time.integer("max_steps", 20000000);
  if (!(setup.time.cfl > 0.0)) throw ConfigError(ini.path + ": [time] cfl must be > 0");
  if (setup.time.t_end < 0.0) throw ConfigError(ini.path + ": [time] t_end must be >= 0");
  time.reject_unknown();

  SectionReader problem(ini, "problem");
  const std::string type = problem.text("type", "kh");
  if (type != "kh")
    throw ConfigError(ini.path + ": [problem] only type = kh is supported");
  setup.resolution = static_cast<int>(problem.integer("n", 32));
  if (setup.resolution < 2) throw ConfigError(ini.path + ": [problem] n must be >= 2");
  setup.seed = static_cast<std::uint64_t>(problem.integer("seed", 20220119));
  setup.epsilon = problem.number("epsilon", 0.01);
  setup.modes = static_cast<int>(problem.integer("modes", 10));
  if (setup.modes < 1) throw ConfigError(ini.path + ": [problem] modes must be >= 1");
  problem.reject_unknown();

  SectionReader output(ini, "output");
  setup.output_dir = output.text("dir", "out");
  output.reject_unknown();

  return setup;
}

// ------------------------------------------------------------ binary i/o ---

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(u);
}

constexpr char kMagic[8] = {'E', 'S', 'D', 'G', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kFieldVersion = 1;

// ----------------------------------------------------------------- json ----

json scheme_json(const SchemeConfig& s) {
  return json{{"degree", s.degree},
              {"volume_flux", s.flux_choice.volume_flux == VolumeFlux::Ranocha
                                  ? "ranocha"
                                  : "chandrashekar"},
              {"surface_flux", s.flux_choice.surface_flux == SurfaceFlux::LocalLaxFriedrichs
                                   ? "llf"
                                   : "ranocha"},
              {"gamma", s.gas.gamma},
              {"rho_min", s.bounds.rho_min},
              {"p_min", s.bounds.p_min},
              {"shock_capturing", s.shock_capturing.enabled},
              {"alpha_max", s.shock_capturing.alpha_max},
              {"alpha_min", s.shock_capturing.alpha_min}};
}

json summary_json(const RunSummary& s) {
  return json{{"steps", s.steps},
              {"wall_time_s", s.wall_time_s},
              {"initial_totals", s.initial_totals},
              {"max_abs_drift", s.max_abs_drift},
              {"initial_entropy", s.initial_entropy},
              {"final_entropy", s.final_entropy},
              {"max_entropy_step_increase", s.max_entropy_step_increase},
              {"integrated_weak_bv", s.integrated_weak_bv},
              {"min_theta", s.min_theta}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.steps = j.at("steps").get<long>();
  s.wall_time_s = j.at("wall_time_s").get<double>();
  s.initial_totals = j.at("initial_totals").get<std::array<double, 4>>();
  s.max_abs_drift = j.at("max_abs_drift").get<std::array<double, 4>>();
  s.initial_entropy = j.at("initial_entropy").get<double>();
  s.final_entropy = j.at("final_entropy").get<double>();
  s.max_entropy_step_increase = j.at("max_entropy_step_increase").get<double>();
  s.integrated_weak_bv = j.at("integrated_weak_bv").get<double>();
  s.min_theta = j.at("min_theta").get<double>();
  return s;
}

void write_manifest(const std::string& path, const RunSetup& setup, const KHParams& params,
                    const RunSummary& summary) {
  json m;
  m["code_version"] = kCodeVersion;
  m["signature"] = run_signature(setup);
  m["resolution"] = setup.resolution;
  m["scheme"] = scheme_json(setup.scheme);
  m["time"] = {{"cfl", setup.time.cfl},
               {"t_end", setup.time.t_end},
               {"relaxation", setup.time.relaxation_enabled},
               {"max_steps", setup.time.max_steps}};
  m["problem"] = {{"type", "kh"},     {"seed", setup.seed}, {"epsilon", setup.epsilon},
                  {"modes", setup.modes}, {"j1", params.j1},    {"j2", params.j2},
                  {"a", params.a},    {"b", params.b}};
  m["summary"] = summary_json(summary);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << m.dump(2) << "\n";
}

}  // namespace

RunSetup parse_run_config(const std::string& path) {
  const IniFile ini = parse_ini(path);
  check_sections(ini, {"scheme", "time", "problem", "output"});
  return read_run_sections(ini);
}

StudySetup parse_study_config(const std::string& path) {
  const IniFile ini = parse_ini(path);
  check_sections(ini, {"scheme", "time", "problem", "output", "study"});
  StudySetup setup;
  setup.base = read_run_sections(ini);

  SectionReader study(ini, "study");
  if (study.has("resolutions")) {
    setup.resolutions.clear();
    for (const std::string& tok : study.tokens("resolutions")) {
      try {
        setup.resolutions.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw ConfigError(path + ": [study] resolutions: not an integer: " + tok);
      }
    }
  }
  setup.reference = static_cast<int>(study.integer("reference", 256));
  if (study.has("variables")) {
    setup.variables.clear();
    for (const std::string& tok : study.tokens("variables")) {
      if (tok == "density")
        setup.variables.push_back(Variable::Density);
      else if (tok == "momentum_x")
        setup.variables.push_back(Variable::MomentumX);
      else if (tok == "momentum_y")
        setup.variables.push_back(Variable::MomentumY);
      else if (tok == "energy")
        setup.variables.push_back(Variable::Energy);
      else if (tok == "entropy")
        setup.variables.push_back(Variable::Entropy);
      else
        throw ConfigError(path + ": [study] unknown variable: " + tok);
    }
  }
  study.reject_unknown();

  if (setup.resolutions.empty()) throw ConfigError(path + ": [study] resolutions is empty");
  for (std::size_t k = 1; k < setup.resolutions.size(); ++k)
    if (setup.resolutions[k] != 2 * setup.resolutions[k - 1])
      throw ConfigError(path + ": [study] resolutions must double at every step");
  if (setup.reference != 2 * setup.resolutions.back())
    throw ConfigError(path + ": [study] reference must double the last ladder entry");
  if (setup.variables.empty()) throw ConfigError(path + ": [study] variables is empty");
  return setup;
}

std::string run_signature(const RunSetup& s) {
  std::ostringstream sig;
  sig << "n=" << s.resolution << ";degree=" << s.scheme.degree << ";volume_flux="
      << (s.scheme.flux_choice.volume_flux == VolumeFlux::Ranocha ? "ranocha" : "chandrashekar")
      << ";surface_flux="
      << (s.scheme.flux_choice.surface_flux == SurfaceFlux::LocalLaxFriedrichs ? "llf"
                                                                               : "ranocha")
      << ";gamma=" << format_double(s.scheme.gas.gamma)
      << ";rho_min=" << format_double(s.scheme.bounds.rho_min)
      << ";p_min=" << format_double(s.scheme.bounds.p_min)
      << ";sc=" << (s.scheme.shock_capturing.enabled ? 1 : 0)
      << ";alpha_max=" << format_double(s.scheme.shock_capturing.alpha_max)
      << ";alpha_min=" << format_double(s.scheme.shock_capturing.alpha_min)
      << ";cfl=" << format_double(s.time.cfl) << ";t_end=" << format_double(s.time.t_end)
      << ";relaxation=" << (s.time.relaxation_enabled ? 1 : 0) << ";seed=" << s.seed
      << ";epsilon=" << format_double(s.epsilon) << ";modes=" << s.modes
      << ";version=" << kCodeVersion;
  return sig.str();
}

RunSummary summarize(const RunResult& result) {
  RunSummary s;
  s.steps = result.steps;
  s.integrated_weak_bv = result.integrated_weak_bv;
  const StepRecord& first = result.series.front();
  s.initial_totals = {first.mass, first.mom_x, first.mom_y, first.energy};
  s.initial_entropy = first.total_entropy;
  s.final_entropy = result.series.back().total_entropy;
  double prev_entropy = first.total_entropy;
  for (const StepRecord& r : result.series) {
    s.max_abs_drift[0] = std::max(s.max_abs_drift[0], std::abs(r.mass - first.mass));
    s.max_abs_drift[1] = std::max(s.max_abs_drift[1], std::abs(r.mom_x - first.mom_x));
    s.max_abs_drift[2] = std::max(s.max_abs_drift[2], std::abs(r.mom_y - first.mom_y));
    s.max_abs_drift[3] = std::max(s.max_abs_drift[3], std::abs(r.energy - first.energy));
    s.max_entropy_step_increase =
        std::max(s.max_entropy_step_increase, r.total_entropy - prev_entropy);
    prev_entropy = r.total_entropy;
    s.min_theta = std::min(s.min_theta, r.min_theta);
  }
  return s;
}

void dump_field(const std::string& path, const SolutionField& u, double gamma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write field file: " + path);
  out.write(kMagic, 8);
  put_u32(out, kFieldVersion);
  put_u32(out, static_cast<std::uint32_t>(u.mesh().n()));
  put_u32(out, static_cast<std::uint32_t>(u.basis().degree));
  put_f64(out, gamma);
  for (std::size_t k = 0; k < u.size(); ++k) put_f64(out, u.data()[k]);
  if (!out) throw std::runtime_error("short write on field file: " + path);
}

SolutionField load_field(const std::string& path, double* gamma) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kMagic))
    throw std::runtime_error("bad magic in field file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kFieldVersion)
    throw std::runtime_error("unsupported field file version in " + path);
  const std::uint32_t n = get_u32(in);
  const std::uint32_t degree = get_u32(in);
  const double g = get_f64(in);
  if (!in || n < 2 || degree < 1 || degree > 20)
    throw std::runtime_error("corrupt header in field file: " + path);
  SolutionField u(CartesianMesh2D(static_cast<int>(n)),
                  build_lobatto_basis(static_cast<int>(degree)));
  for (std::size_t k = 0; k < u.size(); ++k) u.data()[k] = get_f64(in);
  if (!in) throw std::runtime_error("truncated field file: " + path);
  if (gamma) *gamma = g;
  return u;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_timeseries_csv(const std::string& path, const std::vector<StepRecord>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write time series: " + path);
  out << "step,t,dt,mass,mom_x,mom_y,energy,total_entropy,weak_bv,min_theta,elements_limited\n";
  for (const StepRecord& r : series) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.dt) << ','
        << format_double(r.mass) << ',' << format_double(r.mom_x) << ','
        << format_double(r.mom_y) << ',' << format_double(r.energy) << ','
        << format_double(r.total_entropy) << ',' << format_double(r.weak_bv) << ','
        << format_double(r.min_theta) << ',' << r.elements_limited << '\n';
  }
}

void write_error_table_csv(const std::string& path, const ErrorTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write error table: " + path);
  out << "n,E1-error,E1-order,E2-error,E2-order\n";
  for (std::size_t k = 0; k < table.resolutions.size(); ++k) {
    out << table.resolutions[k] << ',' << format_double(table.e1[k]) << ',';
    if (std::isnan(table.e1_order[k]))
      out << '-';
    else
      out << format_double(table.e1_order[k]);
    out << ',' << format_double(table.e2[k]) << ',';
    if (std::isnan(table.e2_order[k]))
      out << '-';
    else
      out << format_double(table.e2_order[k]);
    out << '\n';
  }
}

RunArtifacts execute_run(const RunSetup& setup) {
  fs::create_directories(setup.output_dir);
  const KHParams params = kh_params(setup.seed, setup.modes, setup.epsilon);
  const CartesianMesh2D mesh(setup.resolution);
  const LobattoBasis1D basis = build_lobatto_basis(setup.scheme.degree);
  const SolutionField u0 = project_initial(mesh, basis, params, setup.scheme.gas);

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult result = run(u0, setup.scheme, setup.time);
  const auto t1 = std::chrono::steady_clock::now();

  RunSummary summary = summarize(result);
  summary.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

  RunArtifacts artifacts;
  artifacts.summary = summary;
  artifacts.field_path = (fs::path(setup.output_dir) / "final.field").string();
  artifacts.manifest_path = (fs::path(setup.output_dir) / "manifest.json").string();
  write_timeseries_csv((fs::path(setup.output_dir) / "timeseries.csv").string(),
                       result.series);
  dump_field(artifacts.field_path, result.state, setup.scheme.gas.gamma);
  write_manifest(artifacts.manifest_path, setup, params, summary);
  return artifacts;
}

RunArtifacts execute_run_cached(const RunSetup& setup) {
  const std::string manifest_path = (fs::path(setup.output_dir) / "manifest.json").string();
  const std::string field_path = (fs::path(setup.output_dir) / "final.field").string();
  if (fs::exists(manifest_path) && fs::exists(field_path)) {
    try {
      std::ifstream in(manifest_path);
      json m = json::parse(in);
      if (m.at("signature").get<std::string>() == run_signature(setup)) {
        RunArtifacts artifacts;
        artifacts.summary = summary_from_json(m.at("summary"));
        artifacts.field_path = field_path;
        artifacts.manifest_path = manifest_path;
        return artifacts;
      }
    } catch (const std::exception&) {
      // stale or unreadable cache entry; recompute below
    }
  }
  return execute_run(setup);
}

StudyOutcome execute_study(const StudySetup& setup) {
  StudyOutcome outcome;
  std::vector<int> all = setup.resolutions;
  all.push_back(setup.reference);
  outcome.resolutions = all;

  const fs::path root(setup.base.output_dir);
  fs::create_directories(root / "runs");

  MeshFamilySolution family;
  for (int n : all) {
    RunSetup member = setup.base;
    member.resolution = n;
    member.output_dir = (root / "runs" / ("n" + std::to_string(n))).string();
    const RunArtifacts artifacts = execute_run_cached(member);
    outcome.run_summaries[n] = artifacts.summary;
    family.members.push_back(load_field(artifacts.field_path));
  }

  for (Variable v : setup.variables) {
    outcome.tables[v] = e1_e2_errors(family, v, setup.base.scheme.gas);
    const std::string path =
        (root / (std::string("error_") + variable_name(v) + ".csv")).string();
    write_error_table_csv(path, outcome.tables[v]);
    outcome.table_paths.push_back(path);
  }

  // log-log plot data: E2 per variable against n, plus a first-order slope
  // reference anchored at the first ladder point of the first variable.
  {
    std::ofstream out((root / "errors_loglog.csv").string());
    out << "n";
    for (Variable v : setup.variables) out << ",E2_" << variable_name(v);
    out << ",ref_slope1\n";
    const ErrorTable& anchor = outcome.tables.at(setup.variables.front());
    for (std::size_t k = 0; k < anchor.resolutions.size(); ++k) {
      out << anchor.resolutions[k];
      for (Variable v : setup.variables)
        out << ',' << format_double(outcome.tables.at(v).e2[k]);
      const double ref =
          anchor.e2.front() * anchor.resolutions.front() / anchor.resolutions[k];
      out << ',' << format_double(ref) << '\n';
    }
  }
  return outcome;
}

int cli_run(const std::string& config_path) {
  RunSetup setup;
  try {
    setup = parse_run_config(config_path);
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  }
  try {
    const RunArtifacts artifacts = execute_run(setup);
    std::printf("run complete: %ld steps, wall %.1f s, outputs in %s\n",
                artifacts.summary.steps, artifacts.summary.wall_time_s,
                setup.output_dir.c_str());
    return 0;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "simulation failed: %s\n", err.what());
    return 3;
  }
}

int cli_study(const std::string& config_path) {
  StudySetup setup;
  try {
    setup = parse_study_config(config_path);
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  }
  try {
    const StudyOutcome outcome = execute_study(setup);
    for (const std::string& path : outcome.table_paths)
      std::printf("wrote %s\n", path.c_str());
    return 0;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "study failed: %s\n", err.what());
    return 3;
  }
}

int cli_export_vtk(const std::string& field_path, const std::string& out_path) {
  double gamma = 1.4;
  SolutionField u(CartesianMesh2D(2), build_lobatto_basis(1));
  try {
    u = load_field(field_path, &gamma);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "cannot read field: %s\n", err.what());
    return 2;
  }
  try {
    const GasModel gas{gamma};
    const int nn = u.nodes_per_dir();
    const int ne = u.mesh().num_elements();

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "# vtk DataFile Version 3.0\nsolution field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << ne * nn * nn << " double\n";
    for (int e = 0; e < ne; ++e) {
      const auto [i, j] = u.mesh().coords(e);
      for (int b = 0; b < nn; ++b)
        for (int a = 0; a < nn; ++a) {
          const auto [x, y] = physical_node(u.mesh(), i, j, u.basis(), a, b);
          out << format_double(x) << ' ' << format_double(y) << " 0\n";
        }
    }
    const int cells_per_element = (nn - 1) * (nn - 1);
    out << "CELLS " << ne * cells_per_element << ' ' << ne * cells_per_element * 5 << '\n';
    for (int e = 0; e < ne; ++e) {
      const int base = e * nn * nn;
      for (int b = 0; b + 1 < nn; ++b)
        for (int a = 0; a + 1 < nn; ++a)
          out << "4 " << base + b * nn + a << ' ' << base + b * nn + a + 1 << ' '
              << base + (b + 1) * nn + a + 1 << ' ' << base + (b + 1) * nn + a << '\n';
    }
    out << "CELL_TYPES " << ne * cells_per_element << '\n';
    for (int k = 0; k < ne * cells_per_element; ++k) out << "9\n";

    out << "POINT_DATA " << ne * nn * nn << '\n';
    out << "SCALARS density double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e)
      for (int k = 0; k < nn * nn; ++k) out << format_double(u.state(e, k).rho) << '\n';
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e)
      for (int k = 0; k < nn * nn; ++k)
        out << format_double(pressure(u.state(e, k), gas)) << '\n';
    out << "SCALARS entropy double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e)
      for (int k = 0; k < nn * nn; ++k)
        out << format_double(math_entropy(u.state(e, k), gas)) << '\n';
    out << "VECTORS velocity double\n";
    for (int e = 0; e < ne; ++e)
      for (int k = 0; k < nn * nn; ++k) {
        const ConservedState s = u.state(e, k);
        out << format_double(s.m1 / s.rho) << ' ' << format_double(s.m2 / s.rho) << " 0\n";
      }
    return 0;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "export failed: %s\n", err.what());
    return 3;
  }
}

}  // namespace esdg
