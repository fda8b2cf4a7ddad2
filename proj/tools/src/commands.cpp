#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rsopt/errors.hpp"
#include "rsopt/qcqp_solver.hpp"
#include "rsopt/saa_engine.hpp"

#ifndef RSOPT_VERSION
#define RSOPT_VERSION "unknown"
#endif

namespace rsopt::cli {

namespace fs = std::filesystem;

const char* code_version() { return RSOPT_VERSION; }

Command parse_command(const std::string& name) {
  for (Command c : {Command::kSolveOne, Command::kEsrSweep, Command::kDof, Command::kMSweep,
                    Command::kRegion, Command::kSelftest})
    if (name == to_string(c)) return c;
  throw ConfigError("unknown command '" + name + "'", "command");
}

const char* to_string(Command c) {
  switch (c) {
    case Command::kSolveOne: return "solve-one";
    case Command::kEsrSweep: return "esr-sweep";
    case Command::kDof: return "dof";
    case Command::kMSweep: return "m-sweep";
    case Command::kRegion: return "region";
    case Command::kSelftest: return "selftest";
  }
  return "unknown";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'", "out");
  return f;
}

void write_manifest(const fs::path& dir, Command cmd, const ExperimentConfig& cfg,
                    const std::string& extra) {
  auto f = open_out(dir / "manifest.txt");
  f << "# command: " << to_string(cmd) << "\n# seed: " << cfg.system.seed
    << "\n# code_version: " << code_version() << "\n";
  if (!extra.empty()) f << extra;
  f << cfg.to_text();
}

HarnessConfig harness_of(const ExperimentConfig& cfg) {
  HarnessConfig hc = cfg.harness;
  hc.base = cfg.system;
  return hc;
}

int report_failures(std::ostream& log, int failures) {
  if (failures > 0) log << "warning: " << failures << " uncertified QCQP solves\n";
  return kExitOk;
}

std::string trace_name(Scheme s, double snr, int c) {
  return "trace_" + std::string(to_string(s)) + "_snr" + fmt(snr) + "_ch" + std::to_string(c) +
         ".csv";
}

TraceSink make_sink(const ExperimentConfig& cfg, const fs::path& dir) {
  if (!cfg.traces) return {};
  return [dir](Scheme s, double snr, int c, const AoTrace& t) {
    auto f = open_out(dir / trace_name(s, snr, c));
    t.write_csv(f);
  };
}

int solve_one(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  SystemConfig sys = cfg.system;
  sys.Pt = SystemConfig::pt_from_snr_db(cfg.snr_db, sys.sigma_n2);
  sys.validate();
  const ChannelPool pool = make_channel_pool(sys, 1, sys.M);
  const ChannelEstimate est = pool.estimate(0, sys.sigma_e2());
  const ConditionalSample sample = pool.sample(0, sys.sigma_e2(), sys.M);
  std::ostringstream csv;
  csv << "scheme,asr,common_rate,private_sum,iterations,converged\n";
  int failures = 0;
  for (Scheme s : cfg.schemes) {
    const SchemeOutcome o = run_scheme(s, est, sample, sys, cfg.harness.init, cfg.harness.ao);
    failures += o.solver_failures;
    const double priv = average_rates(sample, o.P, sys.sigma_n2).R.sum();
    const bool optimized = !o.trace.iterations.empty();
    csv << to_string(s) << ',' << fmt(o.asr) << ',' << fmt(o.asr - priv) << ',' << fmt(priv) << ','
        << (optimized ? static_cast<int>(o.trace.iterations.size()) - 1 : 0) << ','
        << (optimized ? (o.trace.converged ? "true" : "false") : "n/a") << '\n';
    if (optimized) {
      auto f = open_out(dir / ("trace_" + std::string(to_string(s)) + ".csv"));
      o.trace.write_csv(f);
    }
    log << to_string(s) << ": ASR " << fmt(o.asr) << " bps/Hz\n";
  }
  auto f = open_out(dir / "solve.csv");
  f << csv.str();
  return report_failures(log, failures);
}

int esr_sweep_cmd(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const auto pts = esr_sweep(harness_of(cfg), cfg.snr_list, cfg.schemes, make_sink(cfg, dir));
  auto f = open_out(dir / "esr.csv");
  write_esr_csv(f, pts);
  int failures = 0;
  for (const auto& p : pts) {
    failures += p.solver_failures;
    log << p.scheme << " @ " << fmt(p.snr_db) << " dB: " << fmt(p.esr) << " +- "
        << fmt(p.std_err) << '\n';
  }
  return report_failures(log, failures);
}

int dof_cmd(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  std::vector<Scheme> schemes;
  for (Scheme s : cfg.schemes)
    if (s == Scheme::kRsOpt || s == Scheme::kNoRsOpt || s == Scheme::kNoRsZf ||
        s == Scheme::kRsZfSvd)
      schemes.push_back(s);
  if (schemes.empty()) throw ConfigError("dof needs at least one ESR scheme", "harness.schemes");
  const auto pts = esr_sweep(harness_of(cfg), cfg.snr_list, schemes, make_sink(cfg, dir));
  {
    auto f = open_out(dir / "esr.csv");
    write_esr_csv(f, pts);
  }
  double hi = cfg.snr_list.front();
  for (double s : cfg.snr_list) hi = std::max(hi, s);
  const double lo = hi - cfg.slope_window_db;
  std::vector<SlopeRow> rows;
  int failures = 0;
  for (Scheme s : schemes) {
    std::vector<EsrPoint> mine;
    for (const auto& p : pts)
      if (p.scheme == to_string(s)) {
        mine.push_back(p);
        failures += p.solver_failures;
      }
    double slope = 0.0;
    try {
      slope = dof_slope(mine, lo, hi);
    } catch (const std::invalid_argument&) {
      throw ConfigError("the slope window holds fewer than three SNR points",
                        "harness.slope_window_db");
    }
    rows.push_back({to_string(s), cfg.system.alpha, cfg.system.K, slope});
    log << to_string(s) << " slope over " << fmt(lo) << "-" << fmt(hi) << " dB: " << fmt(slope)
        << '\n';
  }
  auto f = open_out(dir / "slopes.csv");
  write_slopes_csv(f, rows);
  return report_failures(log, failures);
}

int m_sweep_cmd(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const auto pts = m_sensitivity(harness_of(cfg), cfg.m_sweep_snr_db, cfg.m_list);
  auto f = open_out(dir / "esr.csv");
  write_esr_csv(f, pts);
  int failures = 0;
  for (const auto& p : pts) {
    failures += p.solver_failures;
    log << p.scheme << ": validated ESR " << fmt(p.esr) << " +- " << fmt(p.std_err) << '\n';
  }
  return report_failures(log, failures);
}

int region_cmd(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const RegionResult r = rate_region(harness_of(cfg), cfg.region_snr_db, default_region_weights());
  {
    auto f = open_out(dir / "region.csv");
    write_region_csv(f, r.points);
  }
  auto f = open_out(dir / "region_hull.csv");
  f << "scheme,er1,er2\n";
  for (const auto& p : r.rs_hull) f << "RS," << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
  for (const auto& p : r.nors_hull) f << "NoRS," << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
  int failures = 0;
  for (const auto& p : r.points) failures += p.solver_failures;
  log << r.points.size() << " region points written\n";
  return report_failures(log, failures);
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int selftest(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  std::vector<Check> checks;
  Rng rng(mix_seed(cfg.system.seed, 99));

  // Rate-WMMSE identity on random links.
  {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int K = 2 + t % 3, Nt = 2 + (t / 3) % 3;
      Precoder P = Precoder::zeros(Nt, K, PrecodingMode::kRS);
      P.common = rng.complex_normal_matrix(Nt, 1).col(0);
      P.priv = rng.complex_normal_matrix(Nt, K);
      const CVec h = rng.complex_normal_matrix(Nt, 1).col(0);
      const auto w = rate_wmmse_identity_check(h, P, 1.0, t % K);
      worst = std::max({worst, std::abs(w.xi_c_min - (1.0 - w.R_c)),
                        std::abs(w.xi_min - (1.0 - w.R))});
    }
    checks.push_back({"rate-wmmse identity", worst < 1e-9, "max deviation " + fmt(worst)});
  }

  // AO monotonicity, dominance and KKT certification on small instances.
  int violations = 0, dominance_fail = 0, uncertified = 0;
  double worst_kkt = 0.0;
  for (int t = 0; t < 6; ++t) {
    SystemConfig sys = cfg.system;
    sys.K = 2 + t % 2;
    sys.Nt = sys.K + (t / 2) % 2;
    sys.M = 20;
    sys.Pt = SystemConfig::pt_from_snr_db(20.0 + 5.0 * (t % 3), sys.sigma_n2);
    sys.seed = mix_seed(cfg.system.seed, 7, static_cast<std::uint64_t>(t));
    Rng r(sys.seed);
    const Scenario sc = generate_scenario(sys, r);
    const ConditionalSample s = sample_conditional(sc.estimate, sys.M, r);
    const AsrResult rs = ao_solve(s, sys, init_precoder(sc.estimate, sys, InitScheme::kMrcSvd),
                                  PrecodingMode::kRS, cfg.harness.ao);
    const AsrResult nr =
        ao_solve(s, sys,
                 init_precoder(sc.estimate, sys, InitScheme::kMrcSvd, PrecodingMode::kNoRS),
                 PrecodingMode::kNoRS, cfg.harness.ao);
    violations += rs.trace.monotonicity_violations + nr.trace.monotonicity_violations;
    if (rs.asr < nr.asr - sys.eps_R) ++dominance_fail;
    // One more precoder update from the final point, certified by KKT.
    QcqpProblem prob;
    prob.users = accumulate_safs(
        s, update_equalizers_weights(s, rs.P, sys.sigma_n2, cfg.harness.ao.scaling));
    prob.sigma_n2 = sys.sigma_n2;
    prob.Pt = sys.Pt;
    prob.structure = CommonStructure::kEpigraph;
    const QcqpSolution sol = solve_precoder_update(prob, rs.P, cfg.harness.ao.qcqp);
    if (!sol.certified()) ++uncertified;
    worst_kkt = std::max(worst_kkt, check_kkt(prob, sol).max());
  }
  checks.push_back({"ao monotonicity", violations == 0,
                    std::to_string(violations) + " objective increases"});
  checks.push_back({"rs dominance", dominance_fail == 0,
                    std::to_string(dominance_fail) + " instances with RS below NoRS"});
  checks.push_back({"qcqp kkt", uncertified == 0 && worst_kkt <= 1e-7,
                    "max residual " + fmt(worst_kkt)});

  bool all = true;
  std::ostringstream csv;
  csv << "check,result,detail\n";
  for (const auto& c : checks) {
    all = all && c.pass;
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    csv << c.name << ',' << (c.pass ? "pass" : "fail") << ',' << c.detail << '\n';
  }
  auto f = open_out(dir / "selftest.csv");
  f << csv.str();
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int run_command(Command cmd, const ExperimentConfig& cfg, const fs::path& out_dir,
                std::ostream& log) {
  validate(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "'", "out");
  std::string extra;
  if (cmd == Command::kMSweep || cmd == Command::kSelftest)
    extra = "# validation_sample_size: " + std::to_string(cfg.harness.m_val) + "\n";
  write_manifest(out_dir, cmd, cfg, extra);
  switch (cmd) {
    case Command::kSolveOne: return solve_one(cfg, out_dir, log);
    case Command::kEsrSweep: return esr_sweep_cmd(cfg, out_dir, log);
    case Command::kDof: return dof_cmd(cfg, out_dir, log);
    case Command::kMSweep: return m_sweep_cmd(cfg, out_dir, log);
    case Command::kRegion: return region_cmd(cfg, out_dir, log);
    case Command::kSelftest: return selftest(cfg, out_dir, log);
  }
  return kExitConfig;
}

}  // namespace rsopt::cli
