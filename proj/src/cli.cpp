#include "modclass/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <omp.h>

#include <CLI11.hpp>

#include "modclass/alrt.hpp"
#include "modclass/config.hpp"
#include "modclass/divergence.hpp"
#include "modclass/experiments.hpp"
#include "modclass/likelihood.hpp"
#include "modclass/manifest.hpp"
#include "modclass/report.hpp"

#ifndef MODCLASS_VERSION
#define MODCLASS_VERSION "0.0.0"
#endif

namespace modclass {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::string seed;
  std::string out = "results";
  bool fast = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "master seed (overrides MODCLASS_SEED and the config)");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_flag("--fast", f.fast, "one tenth of the configured trials or samples");
  cmd->add_option("--workers", f.workers, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
}

std::uint64_t parse_seed(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
    throw UsageError(std::string(what) + ": expected an unsigned 64-bit integer, got '" + std::string(text) + "'");
  return v;
}

// --seed, then MODCLASS_SEED, then the config file.
std::uint64_t resolve_seed(const CommonFlags& f, std::uint64_t config_seed) {
  if (!f.seed.empty()) return parse_seed(f.seed, "--seed");
  if (const char* env = std::getenv("MODCLASS_SEED"); env && *env) return parse_seed(env, "MODCLASS_SEED");
  return config_seed;
}

ConfigFile load_or_default(const CommonFlags& f) {
  if (f.config.empty()) return config_from_json(nlohmann::json::object());
  return load_config(f.config);
}

struct RunContext {
  ConfigFile file;
  RunManifest manifest;
  fs::path out_dir;
  std::string stem;
};

RunContext begin_run(const std::string& command, const CommonFlags& f) {
  RunContext ctx;
  ctx.manifest.started_at = utc_timestamp();
  ctx.file = load_or_default(f);
  ctx.file.experiment.seed = resolve_seed(f, ctx.file.experiment.seed);
  if (f.fast) ctx.file.experiment = fast_variant(ctx.file.experiment);
  ctx.out_dir = f.out;
  ctx.stem = f.config.empty() ? command : fs::path(f.config).stem().string();
  ctx.manifest.command = command;
  ctx.manifest.config_path = f.config;
  ctx.manifest.config_sha256 = sha256_hex(ctx.file.text);
  ctx.manifest.seed = ctx.file.experiment.seed;
  ctx.manifest.fast = f.fast;
  ctx.manifest.workers = f.workers;
  ctx.manifest.version = tool_version();
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + f.out + "': " + ec.message());
  return ctx;
}

void finish_run(RunContext& ctx, std::ostream& out) {
  ctx.manifest.finished_at = utc_timestamp();
  const auto path = ctx.out_dir / (ctx.stem + ".manifest.json");
  ctx.manifest.write(path);
  for (const auto& o : ctx.manifest.outputs) out << "wrote " << o << '\n';
  out << "wrote " << path.string() << '\n';
}

void validate_experiment(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid experiment: ") + e.what());
  }
}

std::string pe_line(const CurvePoint& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  N=%-6d L=%-6d Pe=%.5f  [%.5f, %.5f]  trials=%lld", p.samples_per_sensor, p.sensors,
                p.pe.pe, p.pe.ci_low, p.pe.ci_high, static_cast<long long>(p.pe.trials));
  return buf;
}

int run_sweep(const CommonFlags& f, std::ostream& out) {
  auto ctx = begin_run("sweep", f);
  validate_experiment(ctx.file.experiment);
  const auto curves = run_pe_sweep(ctx.file.experiment, Execution{true, f.workers});
  for (const auto& c : curves) {
    out << c.series << " at " << format_double(c.snr_db) << " dB\n";
    for (const auto& p : c.points) out << pe_line(p) << '\n';
  }
  const auto csv = ctx.out_dir / (ctx.stem + ".csv");
  const auto svg = ctx.out_dir / (ctx.stem + ".svg");
  write_csv(curves, csv);
  render_plot(curves, svg, ctx.stem);
  ctx.manifest.outputs = {csv.string(), svg.string()};
  finish_run(ctx, out);
  return 0;
}

int run_theorem5(const CommonFlags& f, std::ostream& out) {
  auto ctx = begin_run("theorem5", f);
  validate_experiment(ctx.file.experiment);
  if (ctx.file.experiment.sweep.var != SweepVar::NL)
    throw ConfigError("theorem5 needs [sweep] over = \"LN\" with a fixed product");
  const auto studies = run_theorem5_study(ctx.file.experiment, Execution{true, f.workers});
  std::vector<PeCurve> curves;
  std::string delta = "snr_db,N,L,delta,ci_half_width,statistically_zero\n";
  for (const auto& s : studies) {
    out << "L*N = " << ctx.file.experiment.sweep.product << " at " << format_double(s.disjoint.snr_db) << " dB\n";
    for (std::size_t k = 0; k < s.comparisons.size(); ++k) {
      const auto& c = s.comparisons[k];
      char buf[200];
      std::snprintf(buf, sizeof buf, "  N=%-6d L=%-6d disjoint=%.5f overlap=%.5f |dPe|=%.5f +/- %.5f%s", c.samples_per_sensor,
                    c.sensors, s.disjoint.points[k].pe.pe, s.overlap.points[k].pe.pe, c.delta, c.ci_half_width(),
                    c.statistically_zero() ? "  (zero within CI)" : "");
      out << buf << '\n';
      delta += format_double(s.disjoint.snr_db) + ',' + std::to_string(c.samples_per_sensor) + ',' +
               std::to_string(c.sensors) + ',' + format_double(c.delta) + ',' + format_double(c.ci_half_width()) +
               ',' + (c.statistically_zero() ? "true" : "false") + '\n';
    }
    curves.push_back(s.disjoint);
    curves.push_back(s.overlap);
  }
  const auto csv = ctx.out_dir / (ctx.stem + ".csv");
  const auto dcsv = ctx.out_dir / (ctx.stem + "_delta.csv");
  const auto svg = ctx.out_dir / (ctx.stem + ".svg");
  write_csv(curves, csv);
  write_file_atomic(dcsv, delta);
  render_plot(curves, svg, ctx.stem);
  ctx.manifest.outputs = {csv.string(), dcsv.string(), svg.string()};
  finish_run(ctx, out);
  return 0;
}

struct KlRow {
  std::string check;
  std::string p;
  std::string q;
  double snr_db = 0.0;
  KlEstimate kl;
  bool certified = false;
};

int run_kl_certify(const CommonFlags& f, std::ostream& out) {
  auto ctx = begin_run("kl-certify", f);
  auto& c = ctx.file.experiment;
  auto kl = ctx.file.kl;
  if (f.fast) {
    kl.samples = std::max<std::int64_t>(1000, kl.samples / 10);
    kl.alrt_samples = std::max<std::int64_t>(1000, kl.alrt_samples / 10);
  }
  if (c.schemes.size() < 2) throw ConfigError("kl-certify needs at least two schemes");
  const auto schemes = scheme_catalog(c.schemes);
  const ScanGrid grid{kl.scan_amplitudes, kl.scan_phases, kl.scan_noise};
  const int saved_workers = omp_get_max_threads();
  if (f.workers > 0) omp_set_num_threads(f.workers);

  std::vector<KlRow> rows;
  std::uint64_t pair = 0;
  for (double snr : c.snr_db) {
    const double n0 = snr_to_noise_power(snr);
    for (std::size_t i = 0; i < schemes.size(); ++i)
      for (std::size_t j = 0; j < schemes.size(); ++j) {
        if (i == j) continue;
        ++pair;
        const auto& p = schemes[i];
        const auto& q = schemes[j];
        Rng rng = make_stream(c.seed, {static_cast<std::uint64_t>(Stream::Sampler), pair, 0});
        const auto gmm = kl_gmm(GmmModel(p, {1.0, 0.0, n0}), GmmModel(q, {1.0, 0.0, n0}), kl.samples, rng);
        rows.push_back({"gmm", p.label(), q.label(), snr, gmm, gmm.positive_with_margin(kl.margin)});

        const auto scan = lemma1_scan(p, q, grid, grid, kl.samples / 10, derive_seed(c.seed, {pair, 1}));
        rows.push_back({"scan_min", p.label(), q.label(), snr, scan.minimum().kl, scan.all_positive_with_margin(kl.margin)});

        const double count = std::pow(static_cast<double>(std::max(p.order(), q.order())), kl.alrt_length);
        if (count <= static_cast<double>(c.alrt.exhaustive_cap)) {
          Rng arng = make_stream(c.seed, {static_cast<std::uint64_t>(Stream::Sampler), pair, 2});
          const AlrtPriors priors{c.gamma, n0};
          const auto a = kl_alrt(AlrtMarginalModel(p, priors, kl.alrt_length),
                                 AlrtMarginalModel(q, priors, kl.alrt_length), kl.alrt_samples, arng);
          rows.push_back({"alrt", p.label(), q.label(), snr, a, a.positive_with_margin(kl.margin)});
        }
      }
  }

  std::string csv = "check,scheme_p,scheme_q,snr_db,value,std_error,n_samples,certified\n";
  bool all = true;
  for (const auto& r : rows) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-9s %-7s || %-7s %6s dB  D=%.6f  se=%.6f  %s", r.check.c_str(), r.p.c_str(),
                  r.q.c_str(), format_double(r.snr_db).c_str(), r.kl.value, r.kl.std_error,
                  r.certified ? "certified" : "NOT certified");
    out << buf << '\n';
    csv += r.check + ',' + r.p + ',' + r.q + ',' + format_double(r.snr_db) + ',' + format_double(r.kl.value) + ',' +
           format_double(r.kl.std_error) + ',' + std::to_string(r.kl.n_samples) + ',' +
           (r.certified ? "true" : "false") + '\n';
    all = all && r.certified;
  }
  omp_set_num_threads(saved_workers);
  const auto path = ctx.out_dir / (ctx.stem + "_kl.csv");
  write_file_atomic(path, csv);
  ctx.manifest.outputs = {path.string()};
  finish_run(ctx, out);
  return all ? 0 : 1;
}

int run_catalog(const std::vector<std::string>& labels, std::ostream& out) {
  for (const auto& label : labels) {
    ConstellationSet s = [&] {
      try {
        return parse_scheme(label);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }();
    out << "# " << s.label() << " (" << s.order() << " symbols)\n";
    char buf[96];
    for (int m = 0; m < s.order(); ++m) {
      std::snprintf(buf, sizeof buf, "%4d  % .6f  % .6f", m, s.symbol(m).real(), s.symbol(m).imag());
      out << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "power %.6f\nmin_distance %.6f", s.mean_power(), s.min_distance());
    out << buf << '\n';
  }
  return 0;
}

int run_selftest(std::ostream& out) {
  struct Check {
    std::string name;
    bool ok;
  };
  std::vector<Check> checks;
  const double pi = std::acos(-1.0);

  // A single-sample ALRT statistic is the same for every PSK order.
  {
    Rng rng = make_stream(7, {static_cast<std::uint64_t>(Stream::Sampler)});
    const AlrtPriors priors{1.0, 0.25};
    const auto samples = draw_unit_noise(64, rng);
    bool equal = true;
    for (const auto& r : samples) {
      const std::vector<Complex> one{r};
      const double a = alrt_log_likelihood(one, psk_set(2), priors);
      equal = equal && a == alrt_log_likelihood(one, psk_set(4), priors) &&
              a == alrt_log_likelihood(one, psk_set(8), priors);
    }
    checks.push_back({"single-sample ALRT identical for BPSK, QPSK, 8PSK", equal});
  }
  {
    const std::vector<double> two{1000.0, 1000.0};
    const std::vector<double> spread{-2000.0, 0.0, -1e300};
    checks.push_back({"log-sum-exp of equal large terms", std::abs(log_sum_exp(two) - (1000.0 + std::log(2.0))) < 1e-12});
    checks.push_back({"log-sum-exp with dominated terms", std::abs(log_sum_exp(spread)) < 1e-12});
  }
  {
    bool unit = true;
    for (const char* l : {"BPSK", "QPSK", "8PSK", "16PSK", "16QAM", "32QAM", "64QAM", "128QAM", "256QAM"}) {
      const auto s = parse_scheme(l);
      unit = unit && std::abs(s.mean_power() - 1.0) <= 1e-12;
    }
    checks.push_back({"unit average power for all catalog schemes", unit});
  }
  {
    const auto bpsk = psk_set(2);
    const double at_origin = sample_log_likelihood({0.0, 0.0}, bpsk, {1.0, 0.0, 1.0});
    checks.push_back({"BPSK log-likelihood at r = 0", std::abs(at_origin - (-1.0 - std::log(pi))) < 1e-12});
    const double at_one = sample_log_likelihood({1.0, 0.0}, bpsk, {1.0, 0.0, 1.0});
    checks.push_back({"BPSK log-likelihood at r = 1",
                      std::abs(at_one - std::log((1.0 + std::exp(-4.0)) / (2.0 * pi))) < 1e-12});
  }
  {
    const auto w = wilson_interval(0, 1000);
    checks.push_back({"Wilson upper bound for 0/1000", std::abs(w.high - kZ95 * kZ95 / (1000.0 + kZ95 * kZ95)) < 1e-15});
  }

  bool all = true;
  for (const auto& c : checks) {
    out << (c.ok ? "ok    " : "FAIL  ") << c.name << '\n';
    all = all && c.ok;
  }
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

const char* tool_version() { return MODCLASS_VERSION; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-based modulation classification simulator", "modclass"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  CommonFlags sweep_f, t5_f, kl_f;
  std::vector<std::string> labels;
  auto* sweep = app.add_subcommand("sweep", "Pe versus N or L for one scenario");
  add_common(sweep, sweep_f, true);
  auto* t5 = app.add_subcommand("theorem5", "disjoint vs full-overlap fusion at fixed L*N");
  add_common(t5, t5_f, true);
  auto* klc = app.add_subcommand("kl-certify", "Monte Carlo KL positivity between hypotheses");
  add_common(klc, kl_f, false);
  auto* catalog = app.add_subcommand("catalog", "print normalized constellation points");
  catalog->add_option("labels", labels, "labels such as 16QAM or 8PSK")->required();
  auto* selftest = app.add_subcommand("selftest", "analytic self checks");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (sweep->parsed()) return run_sweep(sweep_f, out);
    if (t5->parsed()) return run_theorem5(t5_f, out);
    if (klc->parsed()) return run_kl_certify(kl_f, out);
    if (catalog->parsed()) return run_catalog(labels, out);
    if (selftest->parsed()) return run_selftest(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace modclass
