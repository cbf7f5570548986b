#include "bsgd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace bsgd {

std::string to_string(Method m) {
  switch (m) {
    case Method::Bsgd: return "bsgd";
    case Method::BsgdIm: return "bsgd_im";
    case Method::BsgdRan: return "bsgd_ran";
    case Method::BsgdTv: return "bsgd_tv";
    case Method::Sirt: return "sirt";
    case Method::Cav: return "cav";
    case Method::Gd: return "gd";
    case Method::GdBb: return "gd_bb";
    case Method::Sag: return "sag";
    case Method::Svrg: return "svrg";
    case Method::Ista: return "ista";
    case Method::Fista: return "fista";
  }
  return "bsgd";
}

Method method_from_string(const std::string& text) {
  static const std::map<std::string, Method> names = {
      {"bsgd", Method::Bsgd}, {"bsgd_im", Method::BsgdIm}, {"bsgd_ran", Method::BsgdRan},
      {"bsgd_tv", Method::BsgdTv}, {"sirt", Method::Sirt}, {"cav", Method::Cav},
      {"gd", Method::Gd}, {"gd_bb", Method::GdBb}, {"sag", Method::Sag},
      {"svrg", Method::Svrg}, {"ista", Method::Ista}, {"fista", Method::Fista}};
  const auto it = names.find(text);
  if (it == names.end()) throw Error("unknown method '" + text + "'");
  return it->second;
}

bool is_block_method(Method m) {
  return m == Method::Bsgd || m == Method::BsgdIm || m == Method::BsgdRan || m == Method::BsgdTv;
}

namespace {

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e, const std::string& key) {
  const std::string v = e.value;
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(e.line, "'" + key + "' expects a number, got '" + v + "'");
  return out;
}

Index to_index(const Entry& e, const std::string& key) {
  Index out = 0;
  const std::string& v = e.value;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(e.line, "'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_seed(const Entry& e, const std::string& key) {
  std::uint64_t out = 0;
  const std::string& v = e.value;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(e.line, "'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  fail(e.line, "'" + key + "' expects true or false, got '" + e.value + "'");
}

/// "start:step:stop" or a comma-separated list.
std::vector<double> to_angles(const Entry& e) {
  if (e.value.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_double({trim(item), e.line}, "angles"));
    if (parts.size() != 3) fail(e.line, "'angles' range must be start:step:stop");
    try {
      return angle_range(parts[0], parts[1], parts[2]);
    } catch (const Error& err) {
      fail(e.line, err.what());
    }
  }
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double({trim(item), e.line}, "angles"));
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  static const std::map<std::string, std::set<std::string>> known = {
      {"geometry",
       {"mode", "source_to_center", "center_to_detector", "detector_elements", "detector_pitch",
        "angles", "volume_side", "voxel_size"}},
      {"partition", {"row_blocks", "col_blocks", "tiles_per_angle", "grouping"}},
      {"method", {"name", "step", "relaxation"}},
      {"fractions", {"node_num", "alpha", "gamma"}},
      {"tuning", {"mode", "epsilon", "delta", "t1", "t2", "period"}},
      {"tv", {"lambda", "iters", "tol"}},
      {"phantom", {"kind"}},
      {"noise", {"snr_db", "seed"}},
      {"run",
       {"name", "epochs", "metric_period", "output_dir", "seed", "threads", "plots", "lsqr_tol",
        "lsqr_max_iters", "node_budget"}},
  };
  static const std::vector<std::string> required_sections = {"geometry", "partition", "method",
                                                             "noise", "run"};

  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
      current = trim(s.substr(1, s.size() - 2));
      if (!known.contains(current)) fail(line, "unknown section [" + current + "]");
      if (sections.contains(current)) fail(line, "duplicate section [" + current + "]");
      sections[current];
      section_line[current] = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    if (current.empty()) fail(line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!known.at(current).contains(key)) fail(line, "unknown key '" + key + "' in [" + current + "]");
    if (value.empty()) fail(line, "empty value for '" + key + "'");
    if (sections[current].contains(key)) fail(line, "duplicate key '" + key + "'");
    sections[current][key] = {value, line};
  }

  std::vector<std::string> missing;
  for (const auto& name : required_sections)
    if (!sections.contains(name)) missing.push_back(name);
  if (!missing.empty()) {
    std::string msg = "missing required sections:";
    for (const auto& m : missing) msg += " [" + m + "]";
    throw ParseError(msg);
  }

  auto need = [&](const std::string& sec, const std::string& key) -> const Entry& {
    const auto& s = sections.at(sec);
    const auto it = s.find(key);
    if (it == s.end())
      fail(section_line.at(sec), "section [" + sec + "] is missing required key '" + key + "'");
    return it->second;
  };
  auto opt = [&](const std::string& sec, const std::string& key) -> const Entry* {
    const auto sit = sections.find(sec);
    if (sit == sections.end()) return nullptr;
    const auto it = sit->second.find(key);
    return it == sit->second.end() ? nullptr : &it->second;
  };
  auto checked = [](const Entry& e, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      fail(e.line, err.what());
    }
  };

  ExperimentConfig c;

  // geometry
  {
    const Entry& mode = need("geometry", "mode");
    checked(mode, [&] { c.geometry.mode = scan_mode_from_string(mode.value); });
    c.geometry.source_to_center = to_double(need("geometry", "source_to_center"), "source_to_center");
    c.geometry.center_to_detector =
        to_double(need("geometry", "center_to_detector"), "center_to_detector");
    c.geometry.detector_elements =
        to_index(need("geometry", "detector_elements"), "detector_elements");
    if (const Entry* e = opt("geometry", "detector_pitch"))
      c.geometry.detector_pitch = to_double(*e, "detector_pitch");
    c.geometry.angles_deg = to_angles(need("geometry", "angles"));
    c.geometry.volume_side = to_index(need("geometry", "volume_side"), "volume_side");
    if (const Entry* e = opt("geometry", "voxel_size")) c.geometry.voxel_size = to_double(*e, "voxel_size");
  }

  // partition
  c.row_blocks = to_index(need("partition", "row_blocks"), "row_blocks");
  c.col_blocks = to_index(need("partition", "col_blocks"), "col_blocks");
  if (const Entry* e = opt("partition", "tiles_per_angle")) c.tiles_per_angle = to_index(*e, "tiles_per_angle");
  if (const Entry* e = opt("partition", "grouping"))
    checked(*e, [&] { c.grouping = row_grouping_from_string(e->value); });

  // method
  {
    const Entry& name = need("method", "name");
    checked(name, [&] { c.method = method_from_string(name.value); });
    const bool needs_step = c.method != Method::Sirt && c.method != Method::Cav;
    if (needs_step) {
      const Entry& e = need("method", "step");
      c.step = to_double(e, "step");
      if (!(c.step > 0.0)) fail(e.line, "'step' must be > 0");
    } else if (const Entry* e = opt("method", "step")) {
      c.step = to_double(*e, "step");
    }
    if (const Entry* e = opt("method", "relaxation")) c.relaxation = to_double(*e, "relaxation");
  }

  // fractions
  if (const Entry* e = opt("fractions", "node_num")) {
    c.node_num = to_index(*e, "node_num");
    if (*c.node_num < 1) fail(e->line, "'node_num' must be >= 1");
    if (opt("fractions", "alpha") || opt("fractions", "gamma"))
      fail(e->line, "give either node_num or alpha/gamma, not both");
  }
  if (const Entry* e = opt("fractions", "alpha")) c.alpha = to_double(*e, "alpha");
  if (const Entry* e = opt("fractions", "gamma")) c.gamma = to_double(*e, "gamma");

  // tuning
  c.tuning.period = c.row_blocks;
  if (const Entry* e = opt("tuning", "mode")) checked(*e, [&] { c.tuning_mode = tuning_mode_from_string(e->value); });
  if (const Entry* e = opt("tuning", "epsilon")) c.tuning.epsilon = to_double(*e, "epsilon");
  if (const Entry* e = opt("tuning", "delta")) c.tuning.delta = to_double(*e, "delta");
  if (const Entry* e = opt("tuning", "t1")) c.tuning.t1 = to_double(*e, "t1");
  if (const Entry* e = opt("tuning", "t2")) c.tuning.t2 = to_double(*e, "t2");
  if (const Entry* e = opt("tuning", "period")) c.tuning.period = to_index(*e, "period");
  if (sections.contains("tuning")) checked(need("tuning", "mode"), [&] { c.tuning.validate(); });

  // tv
  const bool needs_tv = c.method == Method::BsgdTv || c.method == Method::Ista || c.method == Method::Fista;
  if (needs_tv && !sections.contains("tv"))
    throw ParseError("method '" + to_string(c.method) + "' requires a [tv] section");
  if (sections.contains("tv")) {
    const Entry& e = need("tv", "lambda");
    c.lambda = to_double(e, "lambda");
    if (c.lambda < 0.0) fail(e.line, "'lambda' must be >= 0");
    if (const Entry* it = opt("tv", "iters")) c.tv.iters = static_cast<int>(to_index(*it, "iters"));
    if (const Entry* it = opt("tv", "tol")) c.tv.tol = to_double(*it, "tol");
  }

  // phantom
  if (const Entry* e = opt("phantom", "kind")) {
    if (e->value == "shepp_logan")
      c.phantom = PhantomKind::SheppLogan;
    else if (e->value == "skull_cube")
      c.phantom = PhantomKind::SkullCube;
    else
      fail(e->line, "unknown phantom '" + e->value + "' (expected shepp_logan or skull_cube)");
  }

  // noise
  c.snr_db = to_double(need("noise", "snr_db"), "snr_db");
  c.noise_seed = to_seed(need("noise", "seed"), "seed");

  // run
  c.epochs = to_index(need("run", "epochs"), "epochs");
  c.seed = to_seed(need("run", "seed"), "seed");
  if (const Entry* e = opt("run", "name")) c.name = e->value;
  if (const Entry* e = opt("run", "metric_period")) {
    c.metric_period = to_index(*e, "metric_period");
    if (c.metric_period < 1) fail(e->line, "'metric_period' must be >= 1");
  }
  if (const Entry* e = opt("run", "output_dir")) c.output_dir = e->value;
  if (const Entry* e = opt("run", "threads")) {
    c.threads = static_cast<int>(to_index(*e, "threads"));
    if (c.threads < 1) fail(e->line, "'threads' must be >= 1");
  }
  if (const Entry* e = opt("run", "plots")) c.plots = to_bool(*e, "plots");
  if (const Entry* e = opt("run", "lsqr_tol")) c.lsqr_tol = to_double(*e, "lsqr_tol");
  if (const Entry* e = opt("run", "lsqr_max_iters")) c.lsqr_max_iters = to_index(*e, "lsqr_max_iters");
  if (const Entry* e = opt("run", "node_budget")) c.node_budget = to_seed(*e, "node_budget");
  if (c.epochs < 0) fail(need("run", "epochs").line, "'epochs' must be >= 0");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace bsgd
