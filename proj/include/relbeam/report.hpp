#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>
#include <relbeam/config.hpp>

namespace relbeam {

/// Instance in the config schema with every component explicit (weights,
/// sets, matrices), so a serialized instance parses back via parse_instance
/// and evaluates to the same numbers.
nlohmann::json instance_to_json(const Instance& instance);

nlohmann::json exact_json(const Instance& instance, const ExactReport& report);

/// Counts, per-field estimates, and the exact comparison for one run. An
/// estimate whose exact counterpart is undefined keeps its value but carries
/// a null "exact" plus the reason.
nlohmann::json simulate_json(const SimulateConfig& config,
                             const FrequencyTable& table,
                             const Estimates& estimates);

nlohmann::json scan_json(const ScanReport& report);
std::string scan_csv(const ScanReport& report);

nlohmann::json violate_json(const ViolationReport& report);

nlohmann::json convergence_json(const ConvergenceTable& table);
std::string convergence_csv(const ConvergenceTable& table);

/// Canonical two-space-indented dump with a trailing newline. Object keys
/// come out sorted and doubles in shortest round-trip form, so equal reports
/// render byte-identically.
std::string render_json(const nlohmann::json& value);

/// Atomic file write (sibling temp file, then rename) so readers never see a
/// partial report; no path means stdout.
void write_output(const std::optional<std::string>& path,
                  std::string_view text);

}  // namespace relbeam
