#include "experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rsopt/errors.hpp"

namespace rsopt::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for '" + key + "', got '" + v + "'", key);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("expected an integer for '" + key + "', got '" + v + "'", key);
  return out;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError("integer out of range", key);
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true/false for '" + key + "', got '" + v + "'", key);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
  return s;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  SystemConfig& s = cfg.system;
  HarnessConfig& h = cfg.harness;
  if (key == "system.K") s.K = to_int32(key, v);
  else if (key == "system.Nt") s.Nt = to_int32(key, v);
  else if (key == "system.sigma_n2") s.sigma_n2 = to_double(key, v);
  else if (key == "system.alpha") s.alpha = to_double(key, v);
  else if (key == "system.beta") s.beta = to_double(key, v);
  else if (key == "system.M") s.M = to_int32(key, v);
  else if (key == "system.eps_R") s.eps_R = to_double(key, v);
  else if (key == "system.max_iters") s.max_iters = to_int32(key, v);
  else if (key == "system.seed") {
    const long long x = to_int(key, v);
    if (x < 0) throw ConfigError("seed must be nonnegative", key);
    s.seed = static_cast<std::uint64_t>(x);
  } else if (key == "system.snr_db") cfg.snr_db = to_double(key, v);
  else if (key == "harness.channels") h.channels = to_int32(key, v);
  else if (key == "harness.init") {
    try {
      h.init = parse_init_scheme(v);
    } catch (const std::exception&) {
      throw ConfigError("unknown initialization '" + v + "'", key);
    }
  } else if (key == "harness.m_val") h.m_val = to_int32(key, v);
  else if (key == "harness.jobs") h.jobs = to_int32(key, v);
  else if (key == "harness.snr_list") {
    cfg.snr_list.clear();
    for (const auto& x : split_list(v)) cfg.snr_list.push_back(to_double(key, x));
  } else if (key == "harness.schemes") {
    cfg.schemes.clear();
    for (const auto& x : split_list(v)) {
      try {
        cfg.schemes.push_back(parse_scheme(x));
      } catch (const ConfigError&) {
        throw ConfigError("unknown scheme '" + x + "'", key);
      }
    }
  } else if (key == "harness.slope_window_db") cfg.slope_window_db = to_double(key, v);
  else if (key == "harness.m_list") {
    cfg.m_list.clear();
    for (const auto& x : split_list(v)) cfg.m_list.push_back(to_int32(key, x));
  } else if (key == "harness.m_sweep_snr_db") cfg.m_sweep_snr_db = to_double(key, v);
  else if (key == "harness.region_snr_db") cfg.region_snr_db = to_double(key, v);
  else if (key == "harness.traces") cfg.traces = to_bool(key, v);
  else if (key == "solver.weight_scaling") {
    if (v == "exact") h.ao.scaling = WeightScaling::kExact;
    else if (v == "plain") h.ao.scaling = WeightScaling::kPlain;
    else throw ConfigError("weight_scaling must be 'exact' or 'plain'", key);
  } else if (key == "solver.gap_tol") h.ao.qcqp.gap_tol = to_double(key, v);
  else if (key == "solver.feas_tol") h.ao.qcqp.feas_tol = to_double(key, v);
  else if (key == "solver.max_iterations") h.ao.qcqp.max_iterations = to_int32(key, v);
  else throw ConfigError("unknown config key '" + key + "'", key);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg) {
  std::istringstream in(text);
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
        throw ConfigError("malformed section header on line " + std::to_string(lineno), line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value on line " + std::to_string(lineno), line);
    std::string key = trim(line.substr(0, eq));
    if (key.find('.') == std::string::npos) {
      if (section.empty())
        throw ConfigError("key '" + key + "' is outside any section", key);
      key = section + "." + key;
    }
    apply_setting(cfg, key, line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'", "config");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: '" + assignment + "'",
                      assignment);
  apply_setting(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void validate(const ExperimentConfig& cfg) {
  cfg.system.validate();
  SystemConfig at = cfg.system;
  for (double snr : cfg.snr_list) {
    at.Pt = SystemConfig::pt_from_snr_db(snr, cfg.system.sigma_n2);
    try {
      at.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " at snr " + fmt(snr), "harness.snr_list");
    }
  }
  const auto& h = cfg.harness;
  if (h.channels < 1) throw ConfigError("channels must be >= 1", "harness.channels");
  if (h.m_val < 1) throw ConfigError("m_val must be >= 1", "harness.m_val");
  if (h.jobs < 1) throw ConfigError("jobs must be >= 1", "harness.jobs");
  if (cfg.snr_list.empty()) throw ConfigError("snr_list must not be empty", "harness.snr_list");
  if (cfg.schemes.empty()) throw ConfigError("schemes must not be empty", "harness.schemes");
  if (cfg.m_list.empty()) throw ConfigError("m_list must not be empty", "harness.m_list");
  for (int M : cfg.m_list)
    if (M < 1) throw ConfigError("m_list entries must be >= 1", "harness.m_list");
  if (!(cfg.slope_window_db > 0.0))
    throw ConfigError("slope_window_db must be positive", "harness.slope_window_db");
  if (!(h.ao.qcqp.gap_tol > 0.0)) throw ConfigError("gap_tol must be positive", "solver.gap_tol");
  if (!(h.ao.qcqp.feas_tol > 0.0))
    throw ConfigError("feas_tol must be positive", "solver.feas_tol");
  if (h.ao.qcqp.max_iterations < 1)
    throw ConfigError("max_iterations must be >= 1", "solver.max_iterations");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  const auto& s = system;
  const auto& h = harness;
  os << "[system]\n"
     << "K = " << s.K << "\nNt = " << s.Nt << "\nsigma_n2 = " << fmt(s.sigma_n2)
     << "\nalpha = " << fmt(s.alpha) << "\nbeta = " << fmt(s.beta) << "\nM = " << s.M
     << "\neps_R = " << fmt(s.eps_R) << "\nmax_iters = " << s.max_iters << "\nseed = " << s.seed
     << "\nsnr_db = " << fmt(snr_db) << "\n\n[harness]\n"
     << "channels = " << h.channels << "\ninit = " << to_string(h.init)
     << "\nm_val = " << h.m_val << "\njobs = " << h.jobs
     << "\nsnr_list = " << join(snr_list, fmt)
     << "\nschemes = " << join(schemes, [](Scheme x) { return std::string(to_string(x)); })
     << "\nslope_window_db = " << fmt(slope_window_db)
     << "\nm_list = " << join(m_list, [](int x) { return std::to_string(x); })
     << "\nm_sweep_snr_db = " << fmt(m_sweep_snr_db)
     << "\nregion_snr_db = " << fmt(region_snr_db)
     << "\ntraces = " << (traces ? "true" : "false") << "\n\n[solver]\n"
     << "weight_scaling = " << (h.ao.scaling == WeightScaling::kExact ? "exact" : "plain")
     << "\ngap_tol = " << fmt(h.ao.qcqp.gap_tol) << "\nfeas_tol = " << fmt(h.ao.qcqp.feas_tol)
     << "\nmax_iterations = " << h.ao.qcqp.max_iterations << "\n";
  return os.str();
}

}  // namespace rsopt::cli
