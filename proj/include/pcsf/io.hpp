#pragma once

// JSON and CSV encodings of states, support specs, estimates and reports,
// plus atomic file output.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcsf/datagen.hpp"
#include "pcsf/integrator.hpp"
#include "pcsf/rates.hpp"

namespace pcsf::io {

using json = nlohmann::ordered_json;

/// {"N", "re": [...], "im": [...], "t"}, modes ordered -N..N.
json to_json(const State& s);
State state_from_json(const json& j);

/// {"base", "harmonics": {"n": [a, b]}, "seed": int | null}.
json to_json(const SupportSpec& spec);
SupportSpec support_from_json(const json& j);

json to_json(const BlowupEstimate& e);
json to_json(const RateReport& r);
json to_json(const std::vector<RateReport>& reports);
json to_json(const FlowParams& params);
json to_json(const IntegratorOptions& opts);

/// 17 significant digits.
std::string format_real(double v);

/// Header `t,khat0_re,khat1_re,khat1_im,...` (`tau` for normalized runs).
std::string trajectory_csv(const Trajectory& traj);

/// Fixed-width table with columns quantity | fitted | predicted | pass.
std::string summary_table(const std::vector<RateReport>& reports);

/// Writes via a temporary sibling and rename. The parent directory must
/// already exist; IoError otherwise.
void write_atomic(const std::filesystem::path& path, const std::string& content);

json read_json_file(const std::filesystem::path& path);

/// Parses `text` as JSON if it looks like a document, otherwise reads it
/// as a file path.
json json_from_text_or_file(const std::string& text);

/// The current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace pcsf::io
