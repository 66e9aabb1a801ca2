#include "delaynet/classifier.hpp"
#include "delaynet/conjugacy.hpp"
#include "delaynet/ddesim.hpp"
#include "delaynet/invariants.hpp"
#include "delaynet/lyapunov.hpp"
#include "delaynet/report.hpp"
#include "delaynet/structure.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace delaynet;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes.
constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotCertified = 2;

struct Flags {
  std::string network;
  std::string witness;
  double tol = 1e-9;
  double t_end = 100.0;
  double step = 0.01;
  double stride = 0.5;
  std::vector<std::string> history;
  std::string out;
  std::string out_dir;
  std::string format = "json";
  std::string kind = "auto";
  bool no_meta = false;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_vector(const std::string& text) {
  std::string cleaned = text;
  std::replace_if(cleaned.begin(), cleaned.end(), [](char c) { return c == ',' || c == '(' || c == ')' || c == '[' || c == ']'; }, ' ');
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw InputError("history: cannot parse '" + tok + "' as a number");
    }
    out.push_back(v);
  }
  return out;
}

// Each --history value is an inline vector or a file with one vector per line.
std::vector<State> load_histories(const std::vector<std::string>& specs, std::size_t n) {
  std::vector<State> out;
  for (const auto& spec : specs) {
    std::vector<std::string> lines;
    if (fs::is_regular_file(spec)) {
      std::ifstream in(spec);
      std::string line;
      while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
          line.resize(hash);
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          lines.push_back(line);
        }
      }
    } else {
      lines.push_back(spec);
    }
    for (const auto& line : lines) {
      State x = parse_vector(line);
      if (x.size() != n) {
        throw InputError("history '" + line + "' has " + std::to_string(x.size()) + " entries, network has " +
                         std::to_string(n) + " species");
      }
      if (std::any_of(x.begin(), x.end(), [](double v) { return !(v > 0) || !std::isfinite(v); })) {
        throw InputError("history '" + line + "' must be positive");
      }
      out.push_back(std::move(x));
    }
  }
  return out;
}

DelayedNetwork load_checked_network(const std::string& path) {
  if (path.empty()) {
    throw InputError("--network is required");
  }
  DelayedNetwork net = load_network(path);
  const auto diags = validate_network(net);
  if (!diags.empty()) {
    std::string msg = path + ": invalid network";
    for (const auto& d : diags) {
      msg += "\n  " + (d.reaction ? "reaction " + std::to_string(*d.reaction + 1) + ": " : std::string()) + d.reason;
    }
    throw InputError(msg);
  }
  return net;
}

std::optional<ConjugacyWitness> load_checked_witness(const std::string& path, const DelayedNetwork& net) {
  if (path.empty()) {
    return std::nullopt;
  }
  ConjugacyWitness w = load_witness(path, net);
  const auto diags = validate_witness(w, net);
  if (!diags.empty()) {
    std::string msg = path + ": invalid witness";
    for (const auto& d : diags) {
      msg += "\n  " + d.reason;
    }
    throw InputError(msg);
  }
  return w;
}

Json envelope(const Flags& flags, const std::string& command) {
  Json out{{"schema", kSchema}, {"command", command}};
  if (!flags.no_meta) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out["meta"] = Json{{"tool", "delaynet"}, {"version", kVersion}, {"generated", buf}};
  }
  return out;
}

void emit(const Flags& flags, const std::string& text) {
  if (flags.out.empty() || flags.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out);
  if (!out) {
    throw InputError("cannot write " + flags.out);
  }
  out << text;
}

void emit_json(const Flags& flags, const Json& j) { emit(flags, j.dump(2) + "\n"); }

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  body(out);
}

InvariantKind pick_kind(const std::string& name, const StabilityCertificate& cert) {
  if (name == "scc") return InvariantKind::scc;
  if (name == "de12") return InvariantKind::new_scc_de12;
  if (name == "de3") return InvariantKind::new_scc_de3;
  if (name != "auto") {
    throw InputError("--kind must be auto, scc, de12 or de3");
  }
  if (cert.theorem == Theorem::thm3) {
    return InvariantKind::new_scc_de3;
  }
  return cert.witness.is_identity() ? InvariantKind::new_scc_de12 : InvariantKind::scc;
}

std::vector<double> coordinate_delta(const State& a, const State& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
  }
  return d;
}

double max_abs(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) {
    out = std::max(out, std::abs(x));
  }
  return out;
}

struct RunOutcome {
  Json json;
  bool ok = false;
};

// One certified run: equilibrium of the invariant set through psi, V along
// the trajectory, conservation drift.
RunOutcome certify_run(const DelayedNetwork& net, const StabilityCertificate& cert, InvariantKind kind,
                       const State& psi, std::size_t id, const Flags& flags) {
  const InvariantSetSpec spec = invariant_set(net, cert.witness, psi, kind);
  const EquilibriumResult eq = equilibrium_in_set(net, cert.witness, spec, {}, 1e-12);
  Json run{{"id", id}, {"history", psi}, {"invariant_set", to_json(spec, net)}, {"equilibrium", to_json(eq)}};
  if (!eq.converged) {
    run["ok"] = false;
    run["error"] = "equilibrium solve did not converge";
    return {run, false};
  }
  const LyapunovFunctional V = build_functional(cert, eq.x, 1e-8);
  const Trajectory traj = simulate(net, psi, flags.t_end, flags.step);
  const VTrace tr = trace(V, traj, flags.stride);
  const double v_scale = std::max(1.0, max_abs(tr.V));
  const double max_inc = tr.max_increment();
  const double drift = conservation_check(net, traj, spec, flags.stride);
  const State end = traj.final_state();
  const bool descent = max_inc <= 1e-6 * v_scale;
  const bool conserved = drift <= 1e-6;
  run["lyapunov"] = to_json(V, net);
  run["final_state"] = end;
  run["distance_to_equilibrium"] = max_abs(coordinate_delta(end, eq.x));
  run["V_initial"] = tr.V.front();
  run["V_final"] = tr.V.back();
  run["max_increment"] = max_inc;
  run["descent_tolerance"] = 1e-6 * v_scale;
  run["drift"] = drift;
  run["descent_ok"] = descent;
  run["conservation_ok"] = conserved;
  if (!flags.out_dir.empty()) {
    fs::create_directories(flags.out_dir);
    const fs::path traj_file = fs::path(flags.out_dir) / ("run_" + std::to_string(id) + "_trajectory.csv");
    const fs::path trace_file = fs::path(flags.out_dir) / ("run_" + std::to_string(id) + "_V.csv");
    write_file(traj_file, [&](std::ostream& o) { write_trajectory_csv(o, net, traj, flags.stride); });
    write_file(trace_file, [&](std::ostream& o) { write_trace_csv(o, tr); });
    run["trajectory_file"] = traj_file.filename().string();
    run["trace_file"] = trace_file.filename().string();
  }
  run["ok"] = descent && conserved;
  return {run, descent && conserved};
}

std::vector<State> histories_or_default(const Flags& flags, const DelayedNetwork& net) {
  auto psis = load_histories(flags.history, net.n());
  if (psis.empty()) {
    psis.push_back(State(net.n(), 1.0));
  }
  return psis;
}

int cmd_structure(const Flags& flags) {
  const DelayedNetwork net = load_checked_network(flags.network);
  Json out = envelope(flags, "structure");
  out["network"] = to_json(net);
  out["structure"] = to_json(analyze_structure(net), net);
  emit_json(flags, out);
  return kOk;
}

int cmd_conjugacy(const Flags& flags) {
  const DelayedNetwork net = load_checked_network(flags.network);
  const auto witness = load_checked_witness(flags.witness, net);
  if (!witness) {
    throw InputError("conjugacy: --witness is required");
  }
  ConjugacyOptions opts;
  opts.tol = flags.tol;
  const ConjugacyReport report = check_linear_conjugacy(net, *witness, opts);
  Json out = envelope(flags, "conjugacy");
  out["conjugacy"] = to_json(report, net);
  emit_json(flags, out);
  return report.kind == ConjugacyReport::Kind::neither ? kNotCertified : kOk;
}

int cmd_classify(const Flags& flags) {
  const DelayedNetwork net = load_checked_network(flags.network);
  const auto witness = load_checked_witness(flags.witness, net);
  const StabilityCertificate cert = classify(net, witness);
  Json out = envelope(flags, "classify");
  out["certificate"] = to_json(cert, net);
  emit_json(flags, out);
  return cert.accepted() ? kOk : kNotCertified;
}

int cmd_simulate(const Flags& flags) {
  const DelayedNetwork net = load_checked_network(flags.network);
  const auto psis = load_histories(flags.history, net.n());
  if (psis.size() != 1) {
    throw InputError("simulate: exactly one --history vector is required");
  }
  const Trajectory traj = simulate(net, psis.front(), flags.t_end, flags.step);
  if (flags.format == "csv") {
    std::ostringstream csv;
    write_trajectory_csv(csv, net, traj, flags.stride);
    emit(flags, csv.str());
    return kOk;
  }
  Json out = envelope(flags, "simulate");
  Json samples = Json::array();
  const double stride = flags.stride;
  const auto count = static_cast<std::size_t>(std::floor(traj.t_end() / stride + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::min(static_cast<double>(i) * stride, traj.t_end());
    samples.push_back(Json{{"t", t}, {"x", traj.at(t)}});
  }
  out["species"] = net.species;
  out["step"] = flags.step;
  out["final_state"] = traj.final_state();
  out["samples"] = samples;
  emit_json(flags, out);
  return kOk;
}

int cmd_certify(const Flags& flags, const std::string& command, bool with_reports) {
  const DelayedNetwork net = load_checked_network(flags.network);
  const auto witness = load_checked_witness(flags.witness, net);
  const StabilityCertificate cert = classify(net, witness);
  Json out = envelope(flags, command);
  if (with_reports) {
    out["network"] = to_json(net);
    out["structure"] = to_json(analyze_structure(net), net);
    ConjugacyOptions opts;
    opts.tol = flags.tol;
    out["conjugacy"] = to_json(check_linear_conjugacy(net, cert.witness, opts), net);
  }
  out["certificate"] = to_json(cert, net);
  if (!cert.accepted()) {
    out["runs"] = Json::array();
    emit_json(flags, out);
    return kNotCertified;
  }
  const InvariantKind kind = pick_kind(flags.kind, cert);
  bool all_ok = true;
  Json runs = Json::array();
  const auto psis = histories_or_default(flags, net);
  for (std::size_t i = 0; i < psis.size(); ++i) {
    RunOutcome r = certify_run(net, cert, kind, psis[i], i + 1, flags);
    all_ok = all_ok && r.ok;
    runs.push_back(std::move(r.json));
  }
  out["runs"] = runs;
  out["ok"] = all_ok;
  emit_json(flags, out);
  return all_ok ? kOk : kNotCertified;
}

int cmd_equilibrium(const Flags& flags) {
  const DelayedNetwork net = load_checked_network(flags.network);
  const auto witness = load_checked_witness(flags.witness, net);
  const StabilityCertificate cert = classify(net, witness);
  const InvariantKind kind = pick_kind(flags.kind, cert);
  Json out = envelope(flags, "equilibrium");
  out["theorem"] = theorem_name(cert.theorem);
  Json results = Json::array();
  bool ok = true;
  for (const auto& psi : histories_or_default(flags, net)) {
    const InvariantSetSpec spec = invariant_set(net, cert.witness, psi, kind);
    const EquilibriumResult eq = equilibrium_in_set(net, cert.witness, spec, {}, 1e-12);
    const UniquenessProbe probe = uniqueness_probe(net, cert.witness, spec);
    ok = ok && eq.converged && probe.all_converged;
    results.push_back(Json{{"history", psi},
                           {"invariant_set", to_json(spec, net)},
                           {"equilibrium", to_json(eq)},
                           {"uniqueness", Json{{"starts", probe.runs.size()},
                                               {"all_converged", probe.all_converged},
                                               {"max_pairwise", probe.max_pairwise}}}});
  }
  out["results"] = results;
  emit_json(flags, out);
  return ok ? kOk : kNotCertified;
}

constexpr const char* kScpak = R"(species E EP EPP
reaction 2E -> E : k=1 tau=1
reaction 2E -> 2E + EP : k=1 tau=1
reaction EP -> E : k=1 tau=1
reaction EP -> EPP : k=1 tau=1
reaction EPP -> EP : k=1 tau=1
)";

constexpr const char* kScpakWitness = R"(L 1/2 1 1
target:
reaction 2E -> EP : k=1/4
reaction EP -> 2E : k=1
reaction EP -> EPP : k=1
reaction EPP -> EP : k=1
)";

int cmd_repro_fig6(const Flags& flags) {
  if (flags.out_dir.empty()) {
    throw InputError("repro-fig6: --out-dir is required");
  }
  fs::create_directories(flags.out_dir);
  const DelayedNetwork net = parse_network(kScpak);
  const ConjugacyWitness witness = parse_witness(kScpakWitness, net);
  const StabilityCertificate cert = classify(net, witness);
  if (!cert.accepted()) {
    throw std::runtime_error("repro-fig6: built-in scPAK network was not certified");
  }
  const std::vector<State> thetas = {{0.1, 0.9, 11.2}, {2.2, 0.7, 0.79}, {0.1, 0.4, 2.61}, {1.1, 0.2, 0.01}};
  const double T = flags.t_end;
  const double h = flags.step;
  const auto trajs = simulate_many(net, thetas, T, h);

  Json runs = Json::array();
  std::vector<double> levels;
  std::vector<State> ends;
  bool ok = true;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const InvariantSetSpec spec = invariant_set(net, witness, thetas[i], InvariantKind::new_scc_de3);
    const EquilibriumResult eq = equilibrium_in_set(net, witness, spec, {}, 1e-12);
    const double drift = conservation_check(net, trajs[i], spec, flags.stride);
    const State end = trajs[i].final_state();
    const std::string file = "theta" + std::to_string(i + 1) + ".csv";
    write_file(fs::path(flags.out_dir) / file, [&](std::ostream& o) { write_trajectory_csv(o, net, trajs[i], 0.1); });
    const double dist = max_abs(coordinate_delta(end, eq.x));
    ok = ok && eq.converged && drift <= 1e-6 && dist <= 1e-2;
    levels.push_back(spec.levels.front());
    ends.push_back(end);
    runs.push_back(Json{{"theta", thetas[i]},
                        {"level", spec.levels.front()},
                        {"equilibrium", eq.x},
                        {"final_state", end},
                        {"distance_to_equilibrium", dist},
                        {"drift", drift},
                        {"trajectory_file", file}});
  }
  Json pairs = Json::array();
  for (std::size_t i = 0; i + 1 < ends.size(); i += 2) {
    const double d = max_abs(coordinate_delta(ends[i], ends[i + 1]));
    ok = ok && d < 1e-3;
    pairs.push_back(Json{{"runs", {i + 1, i + 2}}, {"endpoint_distance", d}});
  }
  Json surfaces = Json::array();
  for (std::size_t s = 0; s < 2; ++s) {
    const double level = levels[2 * s];
    const InvariantSetSpec spec = invariant_set(net, witness, thetas[2 * s], InvariantKind::new_scc_de3);
    const std::string file = "level_surface_" + std::to_string(s + 1) + ".csv";
    write_file(fs::path(flags.out_dir) / file,
               [&](std::ostream& o) { write_level_grid_csv(o, net, spec, level, 0.0, 3.0, 31); });
    surfaces.push_back(Json{{"level", level}, {"file", file}});
  }
  Json out = envelope(flags, "repro-fig6");
  out["network"] = to_json(net);
  out["theorem"] = theorem_name(cert.theorem);
  out["t_end"] = T;
  out["step"] = h;
  out["runs"] = runs;
  out["pairs"] = pairs;
  out["level_surfaces"] = surfaces;
  out["ok"] = ok;
  const std::string text = out.dump(2) + "\n";
  write_file(fs::path(flags.out_dir) / "summary.json", [&](std::ostream& o) { o << text; });
  emit(flags, text);
  return ok ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates for mass-action networks with constant delays"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub, bool needs_network) {
    auto* opt = sub->add_option("--network,network", flags.network, "network file");
    if (needs_network) {
      opt->required();
    }
    sub->add_option("--out", flags.out, "output file (stdout when omitted)");
    sub->add_flag("--no-meta", flags.no_meta, "omit the timestamped meta block");
  };
  auto add_witness = [&](CLI::App* sub) { sub->add_option("--witness", flags.witness, "conjugacy witness file"); };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--t-end", flags.t_end, "integration horizon")->check(CLI::NonNegativeNumber);
    sub->add_option("--step", flags.step, "RK4 step")->check(CLI::PositiveNumber);
    sub->add_option("--stride", flags.stride, "sampling stride for CSV and V traces")->check(CLI::PositiveNumber);
  };
  auto add_history = [&](CLI::App* sub) {
    sub->add_option("--history", flags.history, "constant history: inline vector \"a,b,c\" or file, repeatable");
  };

  auto* structure = app.add_subcommand("structure", "complexes, linkage classes, deficiency");
  add_common(structure, true);

  auto* conjugacy = app.add_subcommand("conjugacy", "check a linear conjugacy witness");
  add_common(conjugacy, true);
  add_witness(conjugacy);
  conjugacy->add_option("--tol", flags.tol, "residual tolerance");

  auto* classify_cmd = app.add_subcommand("classify", "find a stability certificate");
  add_common(classify_cmd, true);
  add_witness(classify_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate from a constant history");
  add_common(simulate_cmd, true);
  add_sim(simulate_cmd);
  add_history(simulate_cmd);
  simulate_cmd->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  flags.format = "csv";

  auto add_certify = [&](CLI::App* sub) {
    add_common(sub, true);
    add_witness(sub);
    add_sim(sub);
    add_history(sub);
    sub->add_option("--out-dir", flags.out_dir, "directory for trajectory and V-trace CSVs");
    sub->add_option("--kind", flags.kind, "invariant set: auto, scc, de12, de3");
    sub->add_option("--tol", flags.tol, "conjugacy residual tolerance");
  };
  auto* certify = app.add_subcommand("certify", "classify, then check V descent and conservation along runs");
  add_certify(certify);
  auto* analyze = app.add_subcommand("analyze", "full pipeline report");
  add_certify(analyze);

  auto* equilibrium = app.add_subcommand("equilibrium", "equilibrium in the invariant set through each history");
  add_common(equilibrium, true);
  add_witness(equilibrium);
  add_history(equilibrium);
  equilibrium->add_option("--kind", flags.kind, "invariant set: auto, scc, de12, de3");

  auto* fig6 = app.add_subcommand("repro-fig6", "four scPAK runs, level surfaces and a summary");
  fig6->add_option("--out-dir", flags.out_dir, "output directory")->required();
  fig6->add_option("--out", flags.out, "also write the summary here");
  fig6->add_flag("--no-meta", flags.no_meta, "omit the timestamped meta block");
  fig6->add_option("--t-end", flags.t_end, "integration horizon")->check(CLI::PositiveNumber);
  fig6->add_option("--step", flags.step, "RK4 step (default 0.005)")->check(CLI::PositiveNumber);
  fig6->add_option("--stride", flags.stride, "drift sampling stride")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (*fig6 && fig6->count("--step") == 0) {
      // the 2E-heavy runs need a finer grid to keep c^u drift under 1e-6
      flags.step = 0.005;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*structure) return cmd_structure(flags);
    if (*conjugacy) return cmd_conjugacy(flags);
    if (*classify_cmd) return cmd_classify(flags);
    if (*simulate_cmd) return cmd_simulate(flags);
    if (*certify) return cmd_certify(flags, "certify", false);
    if (*analyze) return cmd_certify(flags, "analyze", true);
    if (*equilibrium) return cmd_equilibrium(flags);
    if (*fig6) return cmd_repro_fig6(flags);
  } catch (const ParseError& e) {
    std::cerr << "error: " << flags.network << ": " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SimulationError& e) {
    std::cerr << "simulation failed: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
