// ns: batch front end for the norms, solver and verification harness.
//
//   ns norms|solve|verify --config <path> --out <dir> [--threads K] [--seed S]
//
// Exit codes: 0 ok, 1 check failure, 2 usage or input error, 3 solver failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "nsbmo/errors.hpp"
#include "nsbmo/field_io.hpp"
#include "nsbmo/harness.hpp"
#include "nsbmo/norm_catalog.hpp"
#include "nsbmo/parallel.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/report.hpp"
#include "nsbmo/solver.hpp"

#ifndef NSBMO_VERSION
#define NSBMO_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace nsbmo;

namespace {

enum Exit { kOk = 0, kCheckFailure = 1, kUsage = 2, kSolverFailure = 3 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Thrown by the commands for a solver stage that did not succeed.
struct SolverFailure {
  solver::StageReport stage;
};

struct Run {
  std::string command;
  fs::path config_path;
  fs::path out;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  int threads = 0;
  json inputs = json::array();
  std::vector<std::string> outputs;
  json stages = json::array();
  json summary = json::object();
  Clock::time_point start = Clock::now();

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : config_path.parent_path() / path;
  }
  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
  template <class F>
  auto timed(const std::string& stage, F&& body) {
    const auto t0 = Clock::now();
    struct Stamp {
      Run* run;
      std::string stage;
      Clock::time_point t0;
      ~Stamp() { run->stages.push_back({{"stage", stage}, {"seconds", seconds_since(t0)}}); }
    } stamp{this, stage, t0};
    return body();
  }

  void write_manifest(const std::string& status, int code, const std::string& message) const {
    json m{{"command", command},
           {"config_path", fs::absolute(config_path).string()},
           {"config", config},
           {"inputs", inputs},
           {"outputs", outputs},
           {"seed", seed ? json(*seed) : json(nullptr)},
           {"threads", threads},
           {"version", NSBMO_VERSION},
           {"wall_seconds", seconds_since(start)},
           {"stage_timings", stages},
           {"summary", summary},
           {"status", status},
           {"exit_code", code},
           {"message", message}};
    write_text(out / "manifest.json", m.dump(2) + "\n");
  }
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed config " + path.string() + ": " + e.what());
  }
}

void reject_unknown(const json& j, const std::vector<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw InputError("unknown key '" + k + "' in " + where);
  }
}

// ---------------------------------------------------------------- inputs

// {"kind": random|taylor_green|shear|zero, "L", "N", "seed", "slope", "max_mode", "amplitude", "mode"}
VectorField generate_field(const json& g, const Run& run) {
  reject_unknown(g, {"kind", "L", "N", "seed", "slope", "max_mode", "amplitude", "mode"}, "generate");
  const Grid grid(g.value("L", 6.283185307179586), g.value("N", 32));
  const std::string kind = g.value("kind", "random");
  const double amp = g.value("amplitude", 1.0);
  if (kind == "zero") return VectorField(grid);
  if (kind == "taylor_green") return sampling::taylor_green(grid, amp);
  if (kind == "shear") return sampling::shear_mode(grid, g.value("mode", 1), amp);
  if (kind == "random") {
    const std::uint64_t seed = run.seed ? *run.seed : g.value("seed", std::uint64_t{1});
    return sampling::random_divergence_free(grid, seed, {.slope = g.value("slope", 2.0), .max_mode = g.value("max_mode", 0), .l2_norm = amp});
  }
  throw InputError("unknown generated field kind '" + kind + "'");
}

int trajectory_components(const fs::path& dir) {
  const json index = read_json_file(dir / "index.json");
  const auto& files = index.at("files");
  if (files.empty()) throw FormatError("empty trajectory " + dir.string());
  return io::peek_components(dir / files.front().get<std::string>());
}

// ---------------------------------------------------------------- norms

template <class Source>
void evaluate_all(const std::vector<norms::NormSpec>& specs, const std::string& label, const Source& eval,
                  std::vector<NormReport>& reports, std::vector<std::pair<std::string, NormReport>>& rows) {
  for (const auto& s : specs) {
    NormReport r = eval(s);
    r.params["input"] = label;
    rows.emplace_back(label, r);
    reports.push_back(std::move(r));
  }
}

int cmd_norms(Run& run) {
  reject_unknown(run.config, {"inputs", "norms", "carleson"}, "norms config");
  const auto settings = carleson_from_json(run.config.value("carleson", json::object()));
  std::vector<norms::NormSpec> specs;
  for (const auto& n : run.config.at("norms")) specs.push_back(norms::norm_spec_from_json(n));
  if (specs.empty()) throw InputError("empty norm list");
  if (!run.config.contains("inputs") || run.config.at("inputs").empty()) throw InputError("no inputs");

  std::vector<NormReport> reports;
  std::vector<std::pair<std::string, NormReport>> rows;
  int index = 0;
  for (const auto& in : run.config.at("inputs")) {
    reject_unknown(in, {"label", "path", "trajectory", "T", "generate"}, "input");
    const std::string label = in.value("label", "input" + std::to_string(index++));
    run.timed("norms:" + label, [&] {
      if (in.contains("generate")) {
        const auto f = generate_field(in.at("generate"), run);
        run.inputs.push_back({{"label", label}, {"generate", in.at("generate")}, {"seed", run.seed ? json(*run.seed) : json(nullptr)}});
        evaluate_all(specs, label, [&](const norms::NormSpec& s) { return norms::evaluate(s, f, settings); }, reports, rows);
      } else if (in.contains("path")) {
        const auto path = run.resolve(in.at("path").get<std::string>());
        run.inputs.push_back({{"label", label}, {"path", path.string()}});
        const int c = io::peek_components(path);
        auto eval = [&](const auto& f) {
          evaluate_all(specs, label, [&](const norms::NormSpec& s) { return norms::evaluate(s, f, settings); }, reports, rows);
        };
        if (c == 1) eval(io::read_field<1>(path));
        else if (c == 2) eval(io::read_field<2>(path));
        else if (c == 4) eval(io::read_field<4>(path));
        else throw FormatError("unsupported component count " + std::to_string(c));
      } else if (in.contains("trajectory")) {
        const auto dir = run.resolve(in.at("trajectory").get<std::string>());
        run.inputs.push_back({{"label", label}, {"trajectory", dir.string()}});
        auto eval = [&](const auto& traj) {
          const double T = in.value("T", traj.horizon());
          evaluate_all(specs, label, [&](const norms::NormSpec& s) { return norms::evaluate(s, traj, T, settings); }, reports, rows);
        };
        const int c = trajectory_components(dir);
        if (c == 1) eval(io::read_trajectory<1>(dir));
        else if (c == 2) eval(io::read_trajectory<2>(dir));
        else if (c == 4) eval(io::read_trajectory<4>(dir));
        else throw FormatError("unsupported component count " + std::to_string(c));
      } else {
        throw InputError("input '" + label + "' needs path, trajectory or generate");
      }
    });
  }
  write_reports_json(reports, run.output("norms.json"));
  write_reports_csv(rows, run.output("norms.csv"));
  run.summary["reports"] = reports.size();
  return kOk;
}

// ---------------------------------------------------------------- solve

void write_series(const fs::path& path, const std::vector<double>& t, const std::vector<double>& dbmo) {
  std::ostringstream s;
  s.precision(17);
  s << "time,dbmo\n";
  for (std::size_t i = 0; i < t.size(); ++i) s << t[i] << ',' << dbmo[i] << '\n';
  write_text(path, s.str());
}

json stages_json(const std::vector<solver::StageReport>& stages) {
  json j = json::array();
  for (const auto& s : stages) {
    j.push_back({{"stage", s.stage}, {"status", s.status}, {"message", s.message}, {"diagnostics", s.diagnostics}});
  }
  return j;
}

int cmd_solve(Run& run) {
  reject_unknown(run.config, {"mode", "input", "force", "split", "solver"}, "solve config");
  const std::string mode = run.config.value("mode", "global");
  if (mode != "small_data" && mode != "global") throw InputError("mode must be small_data or global");
  auto cfg = solver::solver_config_from_json(run.config.value("solver", json::object()));
  if (!cfg.calibration_file.empty()) cfg.calibration_file = run.resolve(cfg.calibration_file.string());
  if (run.seed) cfg.probe_seed = *run.seed;
  cfg.validate();

  const json& in = run.config.at("input");
  reject_unknown(in, {"path", "generate"}, "input");
  VectorField u0 = [&] {
    if (in.contains("generate")) {
      run.inputs.push_back({{"generate", in.at("generate")}});
      return generate_field(in.at("generate"), run);
    }
    const auto path = run.resolve(in.at("path").get<std::string>());
    run.inputs.push_back({{"path", path.string()}});
    return io::read_field<2>(path);
  }();
  std::optional<TensorTrajectory> force;
  if (run.config.contains("force")) {
    const auto dir = run.resolve(run.config.at("force").get<std::string>());
    run.inputs.push_back({{"force", dir.string()}});
    force = io::read_trajectory<4>(dir);
    if (mode == "small_data") throw InputError("force is only taken by the global mode");
  }
  // Without splitting the global mode is restricted to the small-data branch.
  const bool split = run.config.value("split", true);

  std::vector<solver::StageReport> stages;
  std::optional<VectorTrajectory> solution;
  std::vector<double> series_t, series_d;
  if (mode == "small_data" || !split) {
    const auto r = run.timed("small_data", [&] { return solver::solve_small_data(u0, cfg); });
    stages.push_back(r.report);
    write_text(run.output("stages.json"), stages_json(stages).dump(2) + "\n");
    run.summary["iterations"] = r.picard.iterations;
    run.summary["eta"] = r.eta;
    run.summary["residual"] = r.residual;
    if (!r.report.ok()) throw SolverFailure{r.report};
    solution = *r.solution;
    run.timed("series", [&] {
      for (std::size_t m = 0; m < solution->size(); ++m) {
        series_t.push_back(solution->time(m));
        series_d.push_back(norms::dbmo_norm(solution->slice(m), cfg.carleson));
      }
    });
  } else {
    const auto r = run.timed("global", [&] { return solver::solve_global(u0, cfg, force ? &*force : nullptr); });
    stages = r.stages;
    write_text(run.output("stages.json"), stages_json(stages).dump(2) + "\n");
    if (!r.ok()) throw SolverFailure{r.failure};
    solution = *r.solution;
    series_t = r.series_times;
    series_d = r.series_dbmo;
    run.summary["growth_exponent"] = r.growth_exponent;
    run.summary["growth_constant"] = r.growth_constant;
    run.summary["tau"] = r.tau;
    run.summary["overlap_discrepancy"] = r.overlap_discrepancy;
  }
  run.timed("write", [&] {
    io::write_trajectory(*solution, run.out / "trajectory");
    run.outputs.push_back("trajectory");
    write_series(run.output("series.csv"), series_t, series_d);
  });
  run.summary["nodes"] = solution->size();
  return kOk;
}

// ---------------------------------------------------------------- verify

void write_checks_csv(const fs::path& path, const std::vector<harness::SuiteResult>& suites) {
  std::ostringstream s;
  s.precision(17);
  s << "suite,check,passed,value,relation,tolerance\n";
  for (const auto& suite : suites) {
    for (const auto& c : suite.checks) {
      s << suite.name << ',' << c.name << ',' << (c.passed ? 1 : 0) << ',' << c.value << ',' << c.relation << ','
        << c.tolerance << '\n';
    }
  }
  write_text(path, s.str());
}

int cmd_verify(Run& run) {
  reject_unknown(run.config, {"checks", "experiment", "overrides"}, "verify config");
  if (!run.config.contains("checks") || !run.config.at("checks").is_array() || run.config.at("checks").empty()) {
    throw InputError("empty check list");
  }
  const json base = run.config.value("experiment", json::object());
  const json overrides = run.config.value("overrides", json::object());
  std::vector<std::pair<std::string, harness::ExperimentSpec>> plan;
  for (const auto& c : run.config.at("checks")) {
    const std::string name = c.get<std::string>();
    const auto names = harness::suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw InputError("unknown check '" + name + "'");
    json e = base;
    if (overrides.contains(name)) e.merge_patch(overrides.at(name));
    auto spec = harness::experiment_from_json(e);
    if (run.seed) spec.seed = *run.seed;
    spec.validate();
    plan.emplace_back(name, std::move(spec));
  }

  const fs::path cal_path = solver::calibration_path(run.out / "calibration.json");
  auto cal = fs::exists(cal_path) ? solver::Calibration::load(cal_path) : solver::Calibration{};
  bool calibrated = false;
  std::vector<harness::SuiteResult> suites;
  for (const auto& [name, spec] : plan) {
    suites.push_back(run.timed(name, [&] { return harness::run_suite(name, spec, &cal); }));
    calibrated = calibrated || name == "bilinear";
    std::cerr << name << ": " << (suites.back().passed() ? "pass" : "FAIL") << '\n';
  }
  write_text(run.output("report.json"), json(suites).dump(2) + "\n");
  write_checks_csv(run.output("checks.csv"), suites);
  if (calibrated) {
    cal.save(cal_path);
    run.outputs.push_back(cal_path.string());
  }
  int failed = 0;
  for (const auto& s : suites) failed += s.passed() ? 0 : 1;
  run.summary["suites"] = suites.size();
  run.summary["failed"] = failed;
  return failed ? kCheckFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D periodic Navier-Stokes norms, solver and verification harness"};
  app.require_subcommand(1, 1);
  std::string config, out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"norms", "solve", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "overrides the seeds of the config");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  run.config_path = config;
  run.out = out;
  run.seed = seed;
  run.threads = threads;
  set_thread_count(threads);
  try {
    fs::create_directories(run.out);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ns: " << e.what() << '\n';
    return kUsage;
  }

  int code = kOk;
  std::string status = "ok", message;
  try {
    run.config = read_json_file(run.config_path);
    if (run.command == "norms") code = cmd_norms(run);
    else if (run.command == "solve") code = cmd_solve(run);
    else code = cmd_verify(run);
    if (code == kCheckFailure) status = "check_failure";
  } catch (const SolverFailure& f) {
    code = kSolverFailure;
    status = f.stage.status;
    message = "[" + f.stage.stage + "] " + f.stage.message;
    run.summary["failed_stage"] = f.stage.stage;
  } catch (const InputError& e) {
    code = kUsage;
    status = "usage_error";
    message = e.what();
  } catch (const FormatError& e) {
    code = kUsage;
    status = "input_error";
    message = e.what();
  } catch (const json::exception& e) {
    code = kUsage;
    status = "usage_error";
    message = std::string("config: ") + e.what();
  } catch (const std::exception& e) {
    code = kSolverFailure;
    status = "failed";
    message = e.what();
  }
  if (!message.empty()) std::cerr << "ns " << run.command << ": " << message << '\n';
  try {
    run.write_manifest(status, code, message);
  } catch (const std::exception& e) {
    std::cerr << "ns: cannot write manifest: " << e.what() << '\n';
    if (code == kOk) code = kCheckFailure;
  }
  return code;
}
