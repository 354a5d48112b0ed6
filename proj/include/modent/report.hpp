#pragma once

// Serialization of protocol reports, scans and capacity results.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "modent/capacity.hpp"
#include "modent/protocols.hpp"

namespace modent {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json params_json(const ProtocolParams& params);
/// Versioned report: variant, params, channel (row-major), capacity,
/// outcome tables, SSR checks and fidelities.
Json report_json(const ProtocolReport& report);
Json capacity_json(const CapacityResult& result);

/// Per-trial CSV with columns trial,outcome,fidelity.
std::string teleport_csv(const ProtocolReport& report);
/// Mean and minimum sampled fidelity; null when there are no trials.
Json teleport_summary(const ProtocolReport& report);

/// Two-column CSV with a header line.
std::string series_csv(const std::string& parameter, const std::vector<std::pair<double, double>>& rows);

/// Reads {"probs": [[...]]} or the "channel" field of a dense-coding report.
ChannelMatrix channel_from_json(const Json& doc);

/// Shortest decimal that round-trips, used for every number written to CSV.
std::string format_number(double x);

/// Writes `content` to a temporary file next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace modent
