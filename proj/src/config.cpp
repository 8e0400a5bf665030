#include "modclass/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace modclass {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

bool is_identifier(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_key_char); }

class LineParser {
 public:
  LineParser(std::string_view text, std::string_view source, int line) : s_(text), source_(source), line_(line) {}

  json value() {
    skip_space();
    if (at_end()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return string();
    if (c == '[') return array();
    return bare();
  }

  void expect_end() {
    skip_space();
    if (!at_end()) fail("unexpected trailing text '" + std::string(s_.substr(pos_)) + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  json string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
  }

  json array() {
    ++pos_;
    json out = json::array();
    while (true) {
      skip_space();
      if (at_end()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      json v = value();
      if (v.is_array()) fail("nested arrays are not supported");
      out.push_back(std::move(v));
      skip_space();
      if (at_end()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
      } else if (s_[pos_] != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json bare() {
    const std::size_t start = pos_;
    while (!at_end() && s_[pos_] != ',' && s_[pos_] != ']' && !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;

    std::string digits;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        const bool between = i > 0 && i + 1 < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i - 1])) &&
                             std::isdigit(static_cast<unsigned char>(tok[i + 1]));
        if (!between) fail("misplaced '_' in number '" + std::string(tok) + "'");
        continue;
      }
      digits.push_back(tok[i]);
    }
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (!digits.empty() && digits.front() == '+') ++first;
    const bool integral =
        first != last && std::all_of(first + (*first == '-' ? 1 : 0), last,
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (integral) {
      if (*first == '-') {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || p != last) fail("integer out of range: " + std::string(tok));
        return v;
      }
      std::uint64_t v = 0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || p != last) fail("integer out of range: " + std::string(tok));
      return v;
    }
    double v = 0.0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last || !std::isfinite(v)) fail("invalid value '" + std::string(tok) + "'");
    return v;
  }

  std::string_view s_;
  std::string_view source_;
  int line_;
  std::size_t pos_ = 0;
};

// Strips a trailing comment, ignoring '#' inside strings.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

// Typed, key-checked view of one table of the document.
class Table {
 public:
  Table(const json& doc, std::string name, std::string_view source, std::vector<std::string_view> allowed)
      : name_(std::move(name)), source_(source) {
    static const json kEmpty = json::object();
    obj_ = &kEmpty;
    if (name_.empty()) {
      obj_ = &doc;
    } else if (doc.contains(name_)) {
      obj_ = &doc.at(name_);
    }
    for (const auto& [k, v] : obj_->items()) {
      if (name_.empty() && v.is_object()) continue;
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail(k, "unknown key");
    }
  }

  bool present() const { return !obj_->empty(); }
  bool has(const std::string& key) const { return obj_->contains(key); }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  std::int64_t integer(const std::string& key, std::int64_t lo = std::numeric_limits<std::int64_t>::min(),
                       std::int64_t hi = std::numeric_limits<std::int64_t>::max()) const {
    return as_integer(key, at(key), lo, hi);
  }
  std::uint64_t unsigned_integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : list(key)) {
      if (!v.is_number()) fail(key, "expected an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::vector<std::int64_t> integers(const std::string& key, std::int64_t lo, std::int64_t hi) const {
    std::vector<std::int64_t> out;
    for (const auto& v : list(key)) out.push_back(as_integer(key, v, lo, hi));
    return out;
  }
  std::vector<std::string> strings(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& v : list(key)) {
      if (!v.is_string()) fail(key, "expected an array of strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string where = name_.empty() ? key : "[" + name_ + "] " + key;
    throw ConfigError(std::string(source_) + ": " + where + ": " + msg);
  }

 private:
  const json& at(const std::string& key) const {
    if (!obj_->contains(key)) fail(key, "missing required key");
    return obj_->at(key);
  }
  // Scalars are accepted where a list is expected.
  json list(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_array()) return v;
    return json::array({v});
  }
  std::int64_t as_integer(const std::string& key, const json& v, std::int64_t lo, std::int64_t hi) const {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
      fail(key, "must be <= " + std::to_string(hi));
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::string name_;
  std::string_view source_;
  const json* obj_;
};

constexpr std::int64_t kIntMax = std::numeric_limits<int>::max();

Sweep read_sweep(const Table& t) {
  Sweep s;
  if (!t.present()) return s;
  const auto over = t.has("over") ? t.string("over") : std::string("N");
  if (over == "N") {
    s.var = SweepVar::N;
  } else if (over == "L") {
    s.var = SweepVar::L;
  } else if (over == "LN" || over == "NL") {
    s.var = SweepVar::NL;
  } else {
    t.fail("over", "expected \"N\", \"L\" or \"LN\"");
  }
  if (t.has("values"))
    for (auto v : t.integers("values", 1, kIntMax)) s.values.push_back(static_cast<int>(v));
  if (t.has("fixed_n")) s.fixed_n = static_cast<int>(t.integer("fixed_n", 1, kIntMax));
  if (t.has("fixed_l")) s.fixed_l = static_cast<int>(t.integer("fixed_l", 1, kIntMax));
  if (t.has("product")) s.product = static_cast<int>(t.integer("product", 1, kIntMax));
  return s;
}

void read_channel(const Table& t, ExperimentConfig& c) {
  if (t.has("gamma")) {
    c.gamma = t.number("gamma");
    if (!(c.gamma > 0.0)) t.fail("gamma", "must be > 0");
  }
  if (t.has("amplitude")) {
    const auto kind = t.string("amplitude");
    if (kind == "fixed") {
      c.amplitude = FixedAmplitude{t.has("amplitude_value") ? t.number("amplitude_value") : 1.0};
    } else if (kind == "rayleigh") {
      c.amplitude = RayleighAmplitude{c.gamma};
    } else {
      t.fail("amplitude", "expected \"fixed\" or \"rayleigh\"");
    }
  } else if (t.has("amplitude_value")) {
    c.amplitude = FixedAmplitude{t.number("amplitude_value")};
  }
  if (t.has("phase")) {
    const auto kind = t.string("phase");
    if (kind == "fixed") {
      c.phase = FixedPhase{t.has("phase_value") ? t.number("phase_value") : 0.0};
    } else if (kind == "uniform") {
      c.phase = UniformPhase{};
    } else {
      t.fail("phase", "expected \"fixed\" or \"uniform\"");
    }
  } else if (t.has("phase_value")) {
    c.phase = FixedPhase{t.number("phase_value")};
  }
  if (t.has("overlap")) {
    const auto kind = t.string("overlap");
    if (kind == "disjoint") {
      c.overlap = Disjoint{};
    } else if (kind == "full") {
      c.overlap = FullOverlap{};
    } else if (kind == "custom") {
      if (!t.has("offsets")) t.fail("offsets", "required when overlap = \"custom\"");
      c.overlap = CustomOffsets{t.integers("offsets", 0, std::numeric_limits<std::int64_t>::max() / 2)};
    } else {
      t.fail("overlap", "expected \"disjoint\", \"full\" or \"custom\"");
    }
  }
}

void read_hlrt(const Table& t, HlrtSettings& h) {
  if (t.has("amplitude_max")) h.amplitude_max = t.number("amplitude_max");
  if (t.has("noise_max")) h.noise_max = t.number("noise_max");
  if (t.has("grid_points")) h.grid_points = static_cast<int>(t.integer("grid_points", 2, 1000));
  if (t.has("refine_levels")) h.refine_levels = static_cast<int>(t.integer("refine_levels", 0, 30));
}

MarginalSpec read_partial(const Table& t, Scenario scenario, double gamma) {
  MarginalSpec spec;
  if (!t.present()) {
    if (scenario == Scenario::PartialHlrt) {
      spec.amplitude = RayleighPrior{gamma};
      spec.phase = UniformPhasePrior{};
    }
    return spec;
  }
  const auto axes = t.has("marginalize") ? t.strings("marginalize") : std::vector<std::string>{"amplitude", "phase"};
  for (const auto& axis : axes) {
    if (axis == "amplitude") {
      RayleighPrior p{t.has("gamma") ? t.number("gamma") : gamma};
      if (t.has("amplitude_nodes")) p.nodes = static_cast<int>(t.integer("amplitude_nodes", 1, 4096));
      spec.amplitude = p;
    } else if (axis == "phase") {
      UniformPhasePrior p;
      if (t.has("phase_nodes")) p.nodes = static_cast<int>(t.integer("phase_nodes", 1, 4096));
      spec.phase = p;
    } else if (axis == "noise") {
      const auto kind = t.has("noise") ? t.string("noise") : std::string("fixed");
      if (kind == "fixed") {
        spec.noise = FixedNoisePrior{t.number("noise_value")};
      } else if (kind == "uniform") {
        UniformNoisePrior p{t.number("noise_low"), t.number("noise_high")};
        if (t.has("noise_nodes")) p.nodes = static_cast<int>(t.integer("noise_nodes", 1, 4096));
        spec.noise = p;
      } else {
        t.fail("noise", "expected \"fixed\" or \"uniform\"");
      }
    } else {
      t.fail("marginalize", "unknown axis '" + axis + "' (expected amplitude, phase or noise)");
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    t.fail("marginalize", e.what());
  }
  return spec;
}

void read_alrt(const Table& t, AlrtSettings& a) {
  if (t.has("exhaustive_cap")) a.exhaustive_cap = static_cast<std::uint64_t>(t.integer("exhaustive_cap", 1));
  if (t.has("phase_nodes")) a.nodes.phase = static_cast<int>(t.integer("phase_nodes", 16, 100000));
  if (t.has("amplitude_nodes")) a.nodes.amplitude = static_cast<int>(t.integer("amplitude_nodes", 16, 1000));
  if (t.has("numeric_fallback")) a.numeric_fallback = t.boolean("numeric_fallback");
}

void read_kl(const Table& t, KlSettings& k) {
  if (t.has("samples")) k.samples = t.integer("samples", 2);
  if (t.has("alrt_samples")) k.alrt_samples = t.integer("alrt_samples", 2);
  if (t.has("alrt_length")) k.alrt_length = static_cast<int>(t.integer("alrt_length", 1, 64));
  if (t.has("scan_amplitudes")) k.scan_amplitudes = t.numbers("scan_amplitudes");
  if (t.has("scan_phases")) k.scan_phases = t.numbers("scan_phases");
  if (t.has("scan_noise")) k.scan_noise = t.numbers("scan_noise");
  if (t.has("margin")) k.margin = t.number("margin");
  try {
    ScanGrid{k.scan_amplitudes, k.scan_phases, k.scan_noise}.validate();
  } catch (const std::invalid_argument& e) {
    t.fail("scan_amplitudes", e.what());
  }
}

}  // namespace

nlohmann::json parse_config_text(std::string_view text, std::string_view source) {
  json doc = json::object();
  json* table = &doc;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const auto line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    LineParser lp(line, source, line_no);
    if (line.front() == '[') {
      if (line.back() != ']') lp.fail("malformed section header");
      const auto name = std::string(trim(line.substr(1, line.size() - 2)));
      if (!is_identifier(name)) lp.fail("invalid section name '" + name + "'");
      if (doc.contains(name)) lp.fail("duplicate section [" + name + "]");
      doc[name] = json::object();
      table = &doc[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) lp.fail("expected 'key = value'");
    const auto key = std::string(trim(line.substr(0, eq)));
    if (!is_identifier(key)) lp.fail("invalid key '" + key + "'");
    if (table->contains(key)) lp.fail("duplicate key '" + key + "'");
    LineParser vp(line.substr(eq + 1), source, line_no);
    (*table)[key] = vp.value();
    vp.expect_end();
  }
  return doc;
}

ConfigFile config_from_json(const nlohmann::json& doc, std::string_view source) {
  static const std::vector<std::string_view> kSections{"sweep", "channel", "hlrt", "partial", "alrt", "kl"};
  for (const auto& [k, v] : doc.items())
    if (v.is_object() && std::find(kSections.begin(), kSections.end(), k) == kSections.end())
      throw ConfigError(std::string(source) + ": unknown section [" + k + "]");

  ConfigFile out;
  auto& c = out.experiment;
  const Table top(doc, "", source, {"scenario", "schemes", "snr_db", "trials", "seed"});
  if (top.has("scenario")) {
    try {
      c.scenario = parse_scenario(top.string("scenario"));
    } catch (const std::invalid_argument& e) {
      top.fail("scenario", e.what());
    }
  }
  c.schemes = top.has("schemes") ? top.strings("schemes") : std::vector<std::string>{"BPSK", "QPSK"};
  try {
    (void)scheme_catalog(c.schemes);
  } catch (const std::invalid_argument& e) {
    top.fail("schemes", e.what());
  }
  c.snr_db = top.has("snr_db") ? top.numbers("snr_db") : std::vector<double>{6.0};
  if (top.has("trials")) c.trials = static_cast<int>(top.integer("trials", 100, kIntMax));
  if (top.has("seed")) c.seed = top.unsigned_integer("seed");

  c.sweep = read_sweep(Table(doc, "sweep", source, {"over", "values", "fixed_n", "fixed_l", "product"}));
  read_channel(Table(doc, "channel", source,
                     {"amplitude", "amplitude_value", "gamma", "phase", "phase_value", "overlap", "offsets"}),
               c);
  read_hlrt(Table(doc, "hlrt", source, {"amplitude_max", "noise_max", "grid_points", "refine_levels"}), c.hlrt);
  c.partial = read_partial(Table(doc, "partial", source,
                                 {"marginalize", "gamma", "amplitude_nodes", "phase_nodes", "noise", "noise_value",
                                  "noise_low", "noise_high", "noise_nodes"}),
                           c.scenario, c.gamma);
  read_alrt(Table(doc, "alrt", source, {"exhaustive_cap", "phase_nodes", "amplitude_nodes", "numeric_fallback"}),
            c.alrt);
  read_kl(Table(doc, "kl", source,
                {"samples", "alrt_samples", "alrt_length", "scan_amplitudes", "scan_phases", "scan_noise", "margin"}),
          out.kl);
  return out;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  auto out = config_from_json(parse_config_text(text, path.string()), path.string());
  out.text = text;
  out.path = path;
  return out;
}

}  // namespace modclass
