#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace multibai::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail(line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(line, "not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range: '" + s + "'");
  }
}

long long parse_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) fail(line, "trailing characters in integer '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(line, "not an integer: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(line, "integer out of range: '" + s + "'");
  }
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(line, "not a boolean: '" + s + "'");
}

std::string fmt_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::vector<double> parse_means_list(const std::string& csv) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty entry in means list '" + csv + "'");
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (...) {
      throw std::invalid_argument("bad mean value '" + item + "'");
    }
    if (pos != item.size()) throw std::invalid_argument("bad mean value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("means list is empty");
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "instance" && section != "algorithm" && section != "experiment" &&
          section != "output") {
        fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail(line_no, "key outside any section");

    if (section == "instance") {
      if (key == "family") {
        cfg.family = value;
      } else if (key == "sigma") {
        cfg.sigma = parse_double(value, line_no);
      } else if (key == "means") {
        try {
          cfg.means = parse_means_list(value);
        } catch (const std::invalid_argument& e) {
          fail(line_no, e.what());
        }
      } else if (key == "m") {
        cfg.m = static_cast<int>(parse_int(value, line_no));
      } else {
        fail(line_no, "unknown key '" + key + "' in [instance]");
      }
    } else if (section == "algorithm") {
      if (key == "rule") {
        cfg.rule = value;
      } else if (key == "delta") {
        cfg.delta = parse_double(value, line_no);
      } else {
        fail(line_no, "unknown key '" + key + "' in [algorithm]");
      }
    } else if (section == "experiment") {
      if (key == "trials") {
        cfg.trials = static_cast<int>(parse_int(value, line_no));
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
      } else if (key == "max_rounds") {
        cfg.max_rounds = parse_int(value, line_no);
      } else if (key == "trace") {
        cfg.trace = parse_bool(value, line_no);
      } else {
        fail(line_no, "unknown key '" + key + "' in [experiment]");
      }
    } else {  // output
      if (key == "dir") {
        cfg.out_dir = value;
      } else {
        fail(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[instance]\n";
  out << "family = " << cfg.family << "\n";
  out << "sigma = " << fmt_full(cfg.sigma) << "\n";
  out << "means = ";
  for (std::size_t i = 0; i < cfg.means.size(); ++i) {
    if (i > 0) out << ", ";
    out << fmt_full(cfg.means[i]);
  }
  out << "\n";
  out << "m = " << cfg.m << "\n\n";
  out << "[algorithm]\n";
  out << "rule = " << cfg.rule << "\n";
  out << "delta = " << fmt_full(cfg.delta) << "\n\n";
  out << "[experiment]\n";
  out << "trials = " << cfg.trials << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "max_rounds = " << cfg.max_rounds << "\n";
  out << "trace = " << (cfg.trace ? "true" : "false") << "\n\n";
  out << "[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

Family family_from(const RunConfig& cfg) {
  if (cfg.family == "bernoulli") return Family::bernoulli();
  if (cfg.family == "gaussian") return Family::gaussian(cfg.sigma);
  if (cfg.family == "poisson") return Family::poisson();
  throw std::invalid_argument("unknown family '" + cfg.family +
                              "' (expected bernoulli, gaussian, or poisson)");
}

ExperimentConfig to_experiment_config(const RunConfig& cfg) {
  if (cfg.rule != "c" && cfg.rule != "d") {
    throw std::invalid_argument("rule must be 'c' or 'd'");
  }
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  ExperimentConfig out{
      BanditInstance(family_from(cfg), cfg.means, cfg.m),
      cfg.rule == "c" ? TrackingRule::kCTracking : TrackingRule::kDTracking,
      cfg.delta,
      cfg.trials,
      cfg.seed,
      cfg.max_rounds,
      cfg.trace};
  return out;
}

}  // namespace multibai::cli
