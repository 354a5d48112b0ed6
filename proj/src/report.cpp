#include "modent/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>

namespace modent {

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

Json params_json(const ProtocolParams& p) {
  Json j;
  j["J"] = p.J;
  j["V"] = p.V;
  j["omega"] = p.omega;
  j["nbar"] = p.nbar;
  j["theta"] = p.theta;
  j["exact"] = p.exact;
  j["seed"] = p.seed;
  j["theta_grid"] = p.theta_grid;
  j["tol"] = p.tol;
  j["gate"] = p.gate == GateConvention::kJordanWignerEvolution ? "jordan-wigner" : "exchange-sign-rule";
  return j;
}

Json capacity_json(const CapacityResult& r) {
  Json j;
  j["capacity_bits"] = r.capacity;
  j["lower_bound"] = r.lower;
  j["upper_bound"] = r.upper;
  j["prior"] = std::vector<double>(r.prior.data(), r.prior.data() + r.prior.size());
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

Json report_json(const ProtocolReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = r.variant;
  j["params"] = params_json(r.params);
  j["theta_model"] = r.theta_model;
  if (r.channel.size() > 0) {
    j["messages"] = r.messages;
    j["outcomes"] = r.outcomes;
    Json rows = Json::array();
    Json tables = Json::object();
    for (Eigen::Index i = 0; i < r.channel.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(r.channel.cols()));
      Json table = Json::object();
      for (Eigen::Index k = 0; k < r.channel.cols(); ++k) {
        row[static_cast<std::size_t>(k)] = r.channel(i, k);
        if (r.channel(i, k) > 0.0) table[r.outcomes[static_cast<std::size_t>(k)]] = r.channel(i, k);
      }
      rows.push_back(row);
      tables[r.messages[static_cast<std::size_t>(i)]] = table;
    }
    j["channel"] = rows;
    j["outcome_tables"] = tables;
  }
  if (r.capacity) {
    j["capacity_bits"] = r.capacity->capacity;
    j["capacity"] = capacity_json(*r.capacity);
  }
  if (!r.outcome_frequencies.empty() || !r.trials.empty()) {
    Json freq = Json::object();
    for (const auto& [k, v] : r.outcome_frequencies) freq[k] = v;
    j["outcome_frequencies"] = freq;
    std::vector<double> fids;
    for (const auto& t : r.trials) fids.push_back(t.fidelity);
    j["fidelities"] = fids;
  }
  Json checks = Json::array();
  for (const auto& c : r.ssr_checks)
    checks.push_back({{"operation", c.operation},
                      {"number_conserving", c.verdict.conserving},
                      {"max_commutator_norm", c.verdict.max_commutator_norm}});
  j["ssr_checks"] = checks;
  return j;
}

std::string teleport_csv(const ProtocolReport& r) {
  std::string out = "trial,outcome,fidelity\n";
  for (const auto& t : r.trials)
    out += std::to_string(t.trial) + "," + outcome_key(t.outcome) + "," + format_number(t.fidelity) + "\n";
  return out;
}

Json teleport_summary(const ProtocolReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = r.variant;
  j["params"] = params_json(r.params);
  j["theta_model"] = r.theta_model;
  j["trials"] = r.trials.size();
  if (r.trials.empty()) {
    j["mean"] = nullptr;
    j["min"] = nullptr;
  } else {
    double sum = 0.0, lo = 1.0;
    for (const auto& t : r.trials) {
      sum += t.fidelity;
      lo = std::min(lo, t.fidelity);
    }
    j["mean"] = sum / static_cast<double>(r.trials.size());
    j["min"] = lo;
  }
  Json freq = Json::object();
  for (const auto& [k, v] : r.outcome_frequencies) freq[k] = v;
  j["outcome_frequencies"] = freq;
  return j;
}

std::string series_csv(const std::string& parameter, const std::vector<std::pair<double, double>>& rows) {
  std::string out = parameter + ",trace_distance\n";
  for (const auto& [x, d] : rows) out += format_number(x) + "," + format_number(d) + "\n";
  return out;
}

ChannelMatrix channel_from_json(const Json& doc) {
  const char* key = doc.contains("probs") ? "probs" : "channel";
  if (!doc.is_object() || !doc.contains(key)) throw Error("channel JSON needs a \"probs\" array");
  const auto& rows = doc.at(key);
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
    throw Error("channel matrix must be a non-empty array of rows");
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd p(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) throw Error("channel rows differ in length");
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw Error("channel entries must be numbers");
      p(i, c) = v.get<double>();
    }
  }
  return ChannelMatrix(p);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace modent
