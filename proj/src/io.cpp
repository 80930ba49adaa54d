#include "pcsf/io.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace pcsf::io {

namespace fs = std::filesystem;

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

json to_json(const State& s) {
  json re = json::array(), im = json::array();
  for (int n = -s.radius(); n <= s.radius(); ++n) {
    re.push_back(s[n].real());
    im.push_back(s[n].imag());
  }
  return json{{"N", s.radius()}, {"re", re}, {"im", im}, {"t", s.time_stamp()}};
}

State state_from_json(const json& j) {
  try {
    const int radius = j.at("N").get<int>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (radius < 0) throw ConfigError("state N must be non-negative");
    const auto size = static_cast<std::size_t>(2 * radius + 1);
    if (re.size() != size || im.size() != size) throw ConfigError("state re/im arrays must have 2N+1 entries");
    State s(make_mode_set(radius), j.value("t", 0.0));
    for (int n = -radius; n <= radius; ++n) {
      const auto i = static_cast<std::size_t>(n + radius);
      s[n] = {re[i], im[i]};
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed state JSON: ") + e.what());
  }
}

json to_json(const SupportSpec& spec) {
  json harmonics = json::object();
  for (const auto& [n, ab] : spec.harmonics) harmonics[std::to_string(n)] = json::array({ab.first, ab.second});
  json seed = spec.seed ? json(*spec.seed) : json(nullptr);
  return json{{"base", spec.base}, {"harmonics", harmonics}, {"seed", seed}};
}

SupportSpec support_from_json(const json& j) {
  try {
    SupportSpec spec;
    spec.base = j.value("base", 1.0);
    if (j.contains("harmonics")) {
      for (const auto& [key, value] : j.at("harmonics").items()) {
        std::size_t used = 0;
        const int n = std::stoi(key, &used);
        if (used != key.size()) throw ConfigError("harmonic key '" + key + "' is not an integer");
        const auto ab = value.get<std::vector<double>>();
        if (ab.size() != 2) throw ConfigError("harmonic " + key + " needs [a, b]");
        spec.harmonics[n] = {ab[0], ab[1]};
      }
    }
    if (j.contains("seed") && !j.at("seed").is_null()) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed support spec: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("harmonic keys must be integers");
  }
}

json to_json(const BlowupEstimate& e) {
  return json{{"T", e.T},
              {"uncertainty", e.uncertainty},
              {"fit_window", json::array({e.fit_window.first, e.fit_window.second})},
              {"fit_residual", e.fit_residual},
              {"fit_samples", e.fit_samples}};
}

json to_json(const RateReport& r) {
  return json{{"quantity", r.quantity},
              {"fitted", r.fitted},
              {"predicted", r.predicted},
              {"window", json::array({r.window.first, r.window.second})},
              {"rms", r.rms_residual},
              {"pass", r.pass},
              {"tolerance", r.tolerance},
              {"kind", to_string(r.kind)}};
}

json to_json(const std::vector<RateReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

json to_json(const FlowParams& params) {
  return json{{"p", params.p}, {"N", params.N}, {"rhs_method", to_string(params.rhs_method)}};
}

json to_json(const IntegratorOptions& o) {
  return json{{"rel_tol", o.rel_tol},     {"abs_tol", o.abs_tol},     {"dt_init", o.dt_init},
              {"dt_min", o.dt_min},       {"blowup_cap", o.blowup_cap}, {"max_steps", o.max_steps},
              {"sample_stride", o.sample_stride}};
}

std::string trajectory_csv(const Trajectory& traj) {
  const int radius = traj.params.N;
  std::string out = traj.domain == TimeDomain::normalized_tau ? "tau" : "t";
  out += ",khat0_re";
  for (int n = 1; n <= radius; ++n) out += fmt::format(",khat{0}_re,khat{0}_im", n);
  out += '\n';
  for (const auto& s : traj.samples) {
    out += format_real(s.time_stamp());
    out += ',';
    out += format_real(s[0].real());
    for (int n = 1; n <= radius; ++n) {
      out += ',';
      out += format_real(s.at(n).real());
      out += ',';
      out += format_real(s.at(n).imag());
    }
    out += '\n';
  }
  return out;
}

std::string summary_table(const std::vector<RateReport>& reports) {
  std::string out = fmt::format("{:<20} {:>14} {:>14} {:>6}\n", "quantity", "fitted", "predicted", "pass");
  for (const auto& r : reports) {
    out += fmt::format("{:<20} {:>14.6f} {:>14.6f} {:>6}\n", r.quantity, r.fitted, r.predicted, r.pass ? "yes" : "no");
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) throw IoError("output directory does not exist: " + parent.string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

json json_from_text_or_file(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid inline JSON: ") + e.what());
    }
  }
  return read_json_file(text);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pcsf::io
