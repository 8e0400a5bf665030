#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modclass/cli.hpp"
#include "modclass/config.hpp"
#include "modclass/manifest.hpp"
#include "modclass/report.hpp"

using namespace modclass;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("modclass_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "modclass");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallSweep = R"(scenario = "coherent_known_snr"
schemes = ["BPSK", "QPSK"]
snr_db = [0.0, 6.0]
trials = 200
seed = 5

[sweep]
over = "N"
values = [1, 2, 4]
)";

PeCurve sample_curve() {
  PeCurve c;
  c.series = "coherent_known_snr";
  c.snr_db = 6;
  c.sweep_var = "N";
  c.seed = 9;
  for (int k = 0; k < 3; ++k) {
    const std::vector<std::int64_t> e{10 / (k + 1), 0}, n{100, 100};
    c.points.push_back({static_cast<double>(k + 1), k + 1, 1, estimate_pe(e, n)});
  }
  return c;
}

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) {
    if (value)
      setenv("MODCLASS_SEED", value, 1);
    else
      unsetenv("MODCLASS_SEED");
  }
  ~EnvGuard() { unsetenv("MODCLASS_SEED"); }
};

}  // namespace

TEST(ConfigText, ParsesScalarsArraysAndSections) {
  const auto doc = parse_config_text(R"(# comment
name = "a \"b\"\n"
count = 1_000
neg = -3
x = 2.5e-1
flag = true
list = [1, 2.5, "s"]  # trailing

[sec]
k = false
)");
  EXPECT_EQ(doc["name"], "a \"b\"\n");
  EXPECT_EQ(doc["count"], 1000);
  EXPECT_EQ(doc["neg"], -3);
  EXPECT_DOUBLE_EQ(doc["x"].get<double>(), 0.25);
  EXPECT_EQ(doc["flag"], true);
  ASSERT_EQ(doc["list"].size(), 3u);
  EXPECT_EQ(doc["list"][2], "s");
  EXPECT_EQ(doc["sec"]["k"], false);
}

TEST(ConfigText, ErrorsCarryLineNumbers) {
  try {
    parse_config_text("a = 1\nb = \n", "f.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.toml:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_text("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[s]\n[s]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("a = [1, [2]]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("a = \"open\n"), ConfigError);
}

TEST(ConfigMapping, BuildsExperiment) {
  const auto cfg = config_from_json(parse_config_text(kSmallSweep));
  const auto& e = cfg.experiment;
  EXPECT_EQ(e.scenario, Scenario::CoherentKnownSnr);
  EXPECT_EQ(e.schemes, (std::vector<std::string>{"BPSK", "QPSK"}));
  EXPECT_EQ(e.snr_db, (std::vector<double>{0.0, 6.0}));
  EXPECT_EQ(e.trials, 200);
  EXPECT_EQ(e.seed, 5u);
  EXPECT_EQ(e.sweep.values, (std::vector<int>{1, 2, 4}));
  EXPECT_NO_THROW(e.validate());
}

TEST(ConfigMapping, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(config_from_json(parse_config_text("bogus = 1\n")), ConfigError);
  EXPECT_THROW(config_from_json(parse_config_text("[nope]\nx = 1\n")), ConfigError);
  EXPECT_THROW(config_from_json(parse_config_text("[sweep]\nover = \"Q\"\n")), ConfigError);
  EXPECT_THROW(config_from_json(parse_config_text("trials = \"many\"\n")), ConfigError);
}

TEST(ConfigMapping, PartialDefaultsToRayleighAndUniformPhase) {
  const auto cfg = config_from_json(parse_config_text("scenario = \"partial_hlrt\"\n"));
  EXPECT_TRUE(cfg.experiment.partial.amplitude.has_value());
  EXPECT_TRUE(cfg.experiment.partial.phase.has_value());
  EXPECT_FALSE(cfg.experiment.partial.noise.has_value());
}

TEST(Csv, HeaderAndRows) {
  const auto c = sample_curve();
  const auto text = curves_to_csv(std::span<const PeCurve>(&c, 1));
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kCsvHeader);
  EXPECT_EQ(lines[1].substr(0, 6), "N,1,0.");

  PeCurve empty = c;
  empty.points.clear();
  EXPECT_EQ(curves_to_csv(std::span<const PeCurve>(&empty, 1)), std::string(kCsvHeader) + "\n");
}

TEST(Csv, RoundTripIsExact) {
  std::vector<PeCurve> curves{sample_curve(), sample_curve()};
  curves[1].snr_db = 0.1;
  const auto back = curves_from_csv(curves_to_csv(curves));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].series, curves[k].series);
    EXPECT_EQ(back[k].snr_db, curves[k].snr_db);
    EXPECT_EQ(back[k].seed, curves[k].seed);
    ASSERT_EQ(back[k].points.size(), 3u);
    for (std::size_t p = 0; p < 3; ++p) {
      EXPECT_EQ(back[k].points[p].pe.pe, curves[k].points[p].pe.pe);
      EXPECT_EQ(back[k].points[p].pe.ci_low, curves[k].points[p].pe.ci_low);
      EXPECT_EQ(back[k].points[p].pe.ci_high, curves[k].points[p].pe.ci_high);
      EXPECT_EQ(back[k].points[p].pe.trials, curves[k].points[p].pe.trials);
    }
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
}

TEST(Csv, RejectsSeparatorsInNames) {
  auto c = sample_curve();
  c.series = "a,b";
  EXPECT_THROW(curves_to_csv(std::span<const PeCurve>(&c, 1)), std::invalid_argument);
}

namespace {
std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}
}  // namespace

TEST(Svg, MarkersSeriesAndFloorNote) {
  PeCurve a;
  a.series = "s1";
  a.sweep_var = "N";
  const std::vector<std::int64_t> e{3, 5}, z{0, 0}, n{100, 100};
  a.points.push_back({1, 1, 1, estimate_pe(e, n)});
  a.points.push_back({10, 10, 1, estimate_pe(z, n)});
  PeCurve b = a;
  b.series = "s2";
  const std::vector<PeCurve> curves{a, b};
  const auto svg = render_svg(curves, "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "class=\"series\""), 2u);
  EXPECT_EQ(count(svg, "class=\"marker\""), 4u);
  EXPECT_EQ(count(svg, "class=\"floor-note\""), 1u);

  const std::vector<PeCurve> only_a{a};
  const std::vector<PeCurve> no_floor{[&] {
    PeCurve c = a;
    c.points.pop_back();
    return c;
  }()};
  EXPECT_EQ(count(render_svg(no_floor), "floor-note"), 0u);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, JsonFields) {
  RunManifest m;
  m.command = "sweep";
  m.seed = 42;
  m.outputs = {"a.csv"};
  const auto j = nlohmann::json::parse(m.to_json());
  for (const char* k : {"command", "config_path", "config_sha256", "seed", "fast", "workers", "version", "started_at",
                        "finished_at", "outputs"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

TEST(Dispatch, Catalog) {
  const auto r = run({"catalog", "16QAM", "BPSK"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("16QAM"), std::string::npos);
  EXPECT_NE(r.out.find("power 1.000000"), std::string::npos);
  EXPECT_EQ(run({"catalog", "5QAM"}).code, 2);
}

TEST(Dispatch, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"sweep"}).code, 2);
  EXPECT_EQ(run({"sweep", "--config", "/nonexistent/x.toml"}).code, 2);
  EXPECT_EQ(run({"selftest", "--frobnicate"}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST(Dispatch, Selftest) {
  const auto r = run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Dispatch, SweepWritesOutputs) {
  EnvGuard env(nullptr);
  const auto dir = scratch_dir("sweep");
  spill(dir / "small.toml", kSmallSweep);
  const auto r = run({"sweep", "--config", (dir / "small.toml").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto curves = read_csv(dir / "out" / "small.csv");
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].points.size(), 3u);
  EXPECT_EQ(curves[0].seed, 5u);
  EXPECT_TRUE(fs::exists(dir / "out" / "small.svg"));
  const auto m = nlohmann::json::parse(slurp(dir / "out" / "small.manifest.json"));
  EXPECT_EQ(m["config_sha256"], sha256_hex(kSmallSweep));
  EXPECT_EQ(m["seed"], 5);
}

TEST(Dispatch, CsvIndependentOfWorkers) {
  EnvGuard env(nullptr);
  const auto dir = scratch_dir("workers");
  spill(dir / "small.toml", kSmallSweep);
  const auto cfg = (dir / "small.toml").string();
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", (dir / "a").string(), "--workers", "1"}).code, 0);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", (dir / "b").string(), "--workers", "4"}).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "small.csv"), slurp(dir / "b" / "small.csv"));
}

TEST(Dispatch, SeedPrecedence) {
  const auto dir = scratch_dir("seed");
  spill(dir / "small.toml", kSmallSweep);
  const auto cfg = (dir / "small.toml").string();
  const auto out = (dir / "o").string();
  auto seed_of = [&] { return nlohmann::json::parse(slurp(dir / "o" / "small.manifest.json"))["seed"].get<long>(); };
  {
    EnvGuard env("11");
    ASSERT_EQ(run({"sweep", "--config", cfg, "--out", out}).code, 0);
    EXPECT_EQ(seed_of(), 11);
    ASSERT_EQ(run({"sweep", "--config", cfg, "--out", out, "--seed", "12"}).code, 0);
    EXPECT_EQ(seed_of(), 12);
    EXPECT_EQ(run({"sweep", "--config", cfg, "--out", out, "--seed", "x1"}).code, 2);
  }
  {
    EnvGuard env("not-a-number");
    EXPECT_EQ(run({"sweep", "--config", cfg, "--out", out}).code, 2);
  }
}

TEST(Dispatch, ConfigAndOutputErrors) {
  EnvGuard env(nullptr);
  const auto dir = scratch_dir("errors");
  spill(dir / "bad.toml", "trials = = 3\n");
  const auto r = run({"sweep", "--config", (dir / "bad.toml").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":1"), std::string::npos) << r.err;

  spill(dir / "few.toml", std::string(kSmallSweep) + "\n");
  spill(dir / "few.toml", "trials = 10\n[sweep]\nvalues = [1]\n");
  EXPECT_EQ(run({"sweep", "--config", (dir / "few.toml").string(), "--out", (dir / "o").string()}).code, 2);

  spill(dir / "small.toml", kSmallSweep);
  spill(dir / "blocker", "file");
  EXPECT_EQ(run({"sweep", "--config", (dir / "small.toml").string(), "--out", (dir / "blocker").string()}).code, 1);
}

TEST(Dispatch, Theorem5WritesDeltaTable) {
  EnvGuard env(nullptr);
  const auto dir = scratch_dir("t5");
  spill(dir / "t5.toml", R"(scenario = "fusion_theorem5"
schemes = ["BPSK", "QPSK"]
snr_db = 0
trials = 100
[sweep]
over = "LN"
product = 8
values = [2, 4]
)");
  const auto r = run({"theorem5", "--config", (dir / "t5.toml").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto delta = slurp(dir / "t5_delta.csv");
  EXPECT_EQ(delta.rfind("snr_db,N,L,delta,ci_half_width,statistically_zero\n", 0), 0u);
  EXPECT_EQ(std::count(delta.begin(), delta.end(), '\n'), 3);
  EXPECT_EQ(read_csv(dir / "t5.csv").size(), 2u);
}

TEST(Dispatch, KlCertifyDefault) {
  EnvGuard env(nullptr);
  const auto dir = scratch_dir("kl");
  spill(dir / "kl.toml", R"(schemes = ["BPSK", "QPSK"]
snr_db = 6
[kl]
samples = 20000
alrt_samples = 2000
)");
  const auto r = run({"kl-certify", "--config", (dir / "kl.toml").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto table = slurp(dir / "kl_kl.csv");
  EXPECT_EQ(table.rfind("check,scheme_p,scheme_q,snr_db,value,std_error,n_samples,certified\n", 0), 0u);
  // 2 ordered pairs x (gmm, scan_min, alrt).
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 7);
}
