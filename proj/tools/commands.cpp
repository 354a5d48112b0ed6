#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "modent/report.hpp"

namespace modent::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty())
    out << content;
  else
    write_file_atomic(path, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

GateConvention parse_gate(const std::string& name) {
  if (name == "jordan-wigner") return GateConvention::kJordanWignerEvolution;
  if (name == "exchange-sign-rule") return GateConvention::kExchangeSignRule;
  throw UsageError("unknown gate convention " + name);
}

struct Options {
  ProtocolParams params;
  std::string gate = "jordan-wigner";
  std::string out;

  // densecode
  std::string variant;

  // teleport
  int trials = 0;
  bool unshared = false;
  std::string summary;

  // scan
  std::vector<double> list;
  double angle = kPi;

  // capacity
  std::string matrix;
};

void add_physics(CLI::App* cmd, Options& o) {
  cmd->add_option("--nbar", o.params.nbar, "Mean reservoir occupation")->check(CLI::PositiveNumber);
  cmd->add_option("--theta", o.params.theta, "Reservoir phase");
  cmd->add_option("--J", o.params.J, "Tunneling amplitude")->check(CLI::PositiveNumber);
  cmd->add_option("--V", o.params.V, "Bias energy")->check(CLI::PositiveNumber);
  cmd->add_option("--omega", o.params.omega, "Reservoir coupling")->check(CLI::PositiveNumber);
  cmd->add_option("--theta-grid", o.params.theta_grid, "Points in the unshared phase average")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gate", o.gate, "Exchange gate convention")
      ->check(CLI::IsMember({"jordan-wigner", "exchange-sign-rule"}));
  cmd->add_flag("--exact", o.params.exact, "Couple to an explicit reservoir mode");
}

int densecode(Options& o, std::ostream& out) {
  const auto report = run_dense_coding(parse_variant(o.variant), o.params);
  if (!o.out.empty()) write_file_atomic(o.out, dump(report_json(report)));
  out << "capacity_bits: " << fixed6(report.capacity->capacity) << "\n";
  return kExitOk;
}

std::string summary_path(const Options& o) {
  if (!o.summary.empty()) return o.summary;
  if (o.out.empty()) return {};
  std::filesystem::path p(o.out);
  p.replace_extension(".summary.json");
  return p.string();
}

int teleport(Options& o, std::ostream& out) {
  std::mt19937_64 rng(o.params.seed);
  std::vector<TeleportInput> inputs;
  for (int i = 0; i < o.trials; ++i) inputs.push_back(random_teleport_input(rng));
  const auto report = run_teleportation(inputs, !o.unshared, rng, o.params);
  const auto summary = teleport_summary(report);
  const auto summary_file = summary_path(o);
  // Write the summary first so a failure leaves no CSV behind either.
  if (!summary_file.empty()) write_file_atomic(summary_file, dump(summary));
  emit(o.out, teleport_csv(report), out);
  if (!o.out.empty()) {
    auto show = [](const Json& v) { return v.is_null() ? std::string("null") : fixed6(v.get<double>()); };
    out << "mean_fidelity: " << show(summary["mean"]) << "\n";
    out << "min_fidelity: " << show(summary["min"]) << "\n";
  }
  return kExitOk;
}

int scan(const std::string& kind, Options& o, std::ostream& out, std::ostream& err) {
  if (o.list.empty()) throw UsageError("scan needs a non-empty parameter list");
  for (double x : o.list)
    if (!(x > 0.0)) throw UsageError("scan parameters must be positive");
  std::vector<std::pair<double, double>> rows;
  if (kind == "reservoir") {
    for (const auto& p : convergence_scan(o.list, o.angle, o.params.theta, o.params.omega))
      rows.emplace_back(p.nbar, p.trace_distance);
  } else {
    const auto probe = cphase_probe_state(o.params.theta);
    for (const auto& p : cphase_bosonic_sweep(probe, o.list, o.params.J, o.params.V))
      rows.emplace_back(p.U, p.trace_distance);
  }
  const bool monotone = distance_nonincreasing(rows);
  const std::string header = kind == "reservoir" ? "nbar" : "u";
  emit(o.out, series_csv(header, rows), out);
  if (!monotone) {
    err << "error: trace distance is not monotone in " << header << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int capacity(Options& o, std::ostream& out) {
  std::ifstream f(o.matrix);
  if (!f) throw UsageError("cannot read " + o.matrix);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
  std::optional<ChannelMatrix> channel;
  try {
    channel = channel_from_json(doc);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto result = blahut_arimoto(*channel, o.params.tol);
  if (!o.out.empty()) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["matrix"] = o.matrix;
    j["tol"] = o.params.tol;
    const Json cap = capacity_json(result);
    for (const auto& [k, v] : cap.items()) j[k] = v;
    write_file_atomic(o.out, dump(j));
  }
  out << "capacity_bits: " << fixed6(result.capacity) << "\n";
  out << "prior:";
  for (Eigen::Index i = 0; i < result.prior.size(); ++i) out << " " << fixed6(result.prior[i]);
  out << "\n";
  if (!result.converged) out << "warning: not converged; gap " << result.upper - result.lower << " bits\n";
  return kExitOk;
}

}  // namespace

bool distance_nonincreasing(const std::vector<std::pair<double, double>>& rows) {
  std::vector<std::pair<double, double>> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].second > sorted[i - 1].second) return false;
  return true;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Single-particle mode entanglement protocols", "modent");
  app.require_subcommand(1);
  Options o;

  auto* dc = app.add_subcommand("densecode", "Dense coding channel and capacity");
  dc->add_option("--variant", o.variant, "Protocol variant")
      ->required()
      ->check(CLI::IsMember({"isolated", "extra", "full-shared", "full-unshared"}));
  add_physics(dc, o);
  dc->add_option("--seed", o.params.seed, "Seed (echoed into the report)");
  dc->add_option("--out", o.out, "Report JSON file");

  auto* tp = app.add_subcommand("teleport", "Teleportation trials");
  tp->add_option("--trials", o.trials, "Number of random input states")->required()->check(CLI::NonNegativeNumber);
  auto* shared = tp->add_flag("--shared", "Shared reservoir phase (default)");
  auto* unshared = tp->add_flag("--unshared", o.unshared, "Unknown relative phase between the parties");
  shared->excludes(unshared);
  add_physics(tp, o);
  tp->add_option("--seed", o.params.seed, "Seed for inputs and sampled outcomes");
  tp->add_option("--out", o.out, "Per-trial CSV file (standard output when absent)");
  tp->add_option("--summary", o.summary, "Summary JSON file (defaults next to --out)");

  auto* sc = app.add_subcommand("scan", "Convergence scans");
  sc->require_subcommand(1);
  auto* sr = sc->add_subcommand("reservoir", "Exact coupling against the effective rotation");
  sr->add_option("--nbar-list", o.list, "Comma separated mean occupations")->required()->delimiter(',');
  sr->add_option("--angle", o.angle, "Rotation angle");
  sr->add_option("--theta", o.params.theta, "Reservoir phase");
  sr->add_option("--omega", o.params.omega, "Reservoir coupling")->check(CLI::PositiveNumber);
  sr->add_option("--out", o.out, "CSV file (standard output when absent)");
  auto* scp = sc->add_subcommand("cphase", "Bosonic exchange against the hardcore gate");
  scp->add_option("--u-list", o.list, "Comma separated onsite energies")->required()->delimiter(',');
  scp->add_option("--J", o.params.J, "Tunneling amplitude")->check(CLI::PositiveNumber);
  scp->add_option("--V", o.params.V, "Bias energy")->check(CLI::PositiveNumber);
  scp->add_option("--theta", o.params.theta, "Reservoir phase of the probe state");
  scp->add_option("--out", o.out, "CSV file (standard output when absent)");

  auto* cap = app.add_subcommand("capacity", "Capacity of a channel matrix");
  cap->add_option("--matrix", o.matrix, "JSON with a \"probs\" array")->required();
  cap->add_option("--tol", o.params.tol, "Stopping gap in bits")->check(CLI::PositiveNumber);
  cap->add_option("--out", o.out, "Result JSON file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    o.params.gate = parse_gate(o.gate);
    if (dc->parsed()) return densecode(o, out);
    if (tp->parsed()) return teleport(o, out);
    if (sr->parsed()) return scan("reservoir", o, out, err);
    if (scp->parsed()) return scan("cphase", o, out, err);
    if (cap->parsed()) return capacity(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace modent::cli
