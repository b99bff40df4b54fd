#include "lob/cli/commands.hpp"

#include <fstream>
#include <ostream>

#include "lob/assumptions.hpp"
#include "lob/cli/reports.hpp"
#include "lob/drift.hpp"
#include "lob/oracle.hpp"
#include "lob/scaling.hpp"
#include "lob/scan.hpp"
#include "lob/shape.hpp"

namespace lob::cli {

using nlohmann::json;

namespace {

void print_violations(const ConstraintReport& r, std::ostream& err) {
  for (const auto& v : r)
    err << "violation: " << v.constraint << (v.detail.empty() ? "" : " (" + v.detail + ")")
        << (v.structural ? " [structural]" : "") << "\n";
}

class FileCsvSink final : public EventSink {
 public:
  FileCsvSink(const std::filesystem::path& path, const BookParams& book, std::uint64_t every, const std::string& header)
      : file_(open(path)), csv_(file_, book, every, header) {}
  void on_event(const EventRecord& r) override { csv_.on_event(r); }
  void finish() override {
    csv_.finish();
    file_.flush();
  }

 private:
  static std::ofstream open(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
  }
  std::ofstream file_;
  CsvEventSink csv_;
};

std::string path_file(const char* stem, std::uint64_t k, const char* ext) {
  return std::string(stem) + "_path" + std::to_string(k) + ext;
}

StateScan make_scan(const RunConfig& c, const RateModel& model, json& scan_notes) {
  const QueueSize cap = c.scan_cap.value_or(default_scan_cap(c.book.K, 2'000'000, 30));
  std::vector<OrderBookState> extra;
  if (c.scan_samples > 0) {
    try {
      extra = sample_states(model, c.scan_samples, c.seed);
    } catch (const std::exception& e) {
      scan_notes.push_back(std::string("no sampled states: ") + e.what());
    }
  }
  return StateScan(c.book.K, cap, std::move(extra), &model);
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const BuiltModel bm = build_model(c);
  if (!bm.report.empty()) {
    print_violations(bm.report, err);
    return kExitConfigViolation;
  }
  std::filesystem::create_directories(c.out_dir);
  SimulationOptions opt;
  opt.stop.max_events = c.max_events;
  if (c.max_time) opt.stop.max_time = *c.max_time;
  opt.burn_in_events = c.burn_in;
  SinkFactory sinks;
  if (c.wants("csv")) {
    const std::string header = csv_header_comment(c, "simulate");
    sinks = [&c, header](std::uint64_t k) {
      std::vector<std::unique_ptr<EventSink>> v;
      v.push_back(std::make_unique<FileCsvSink>(c.out_dir / path_file("events", k, ".csv"), c.book, c.log_every,
                                                header));
      return v;
    };
  }
  const auto paths = batch_simulate(*bm.model, bm.initial, c.n_paths, opt, c.seed, c.threads, sinks);
  int code = kExitOk;
  for (const auto& p : paths) {
    if (c.wants("json")) {
      json doc = artifact_header(c, "simulate");
      doc["model"] = std::string(bm.model->name());
      doc["summary"] = to_json(p, c.book.tick);
      write_json(c.out_dir / path_file("summary", p.path, ".json"), doc);
    }
    if (!p.ok()) {
      err << "path " << p.path << ": " << p.error << "\n";
      if (p.absorbed)
        code = kExitAbsorbing;
      else if (code == kExitOk)
        code = kExitFailure;
    }
  }
  out << "simulated " << paths.size() << " path(s) into " << c.out_dir.string() << "\n";
  return code;
}

int cmd_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const BuiltModel bm = build_model(c);
  print_violations(bm.report, err);
  const RateModel& model = *bm.model;
  json notes = json::array();
  const StateScan scan = make_scan(c, model, notes);

  AssumptionOptions aopt;
  aopt.mc_draws = c.mc_draws;
  aopt.seed = c.seed;
  const AssumptionReport ar = check_assumptions(model, scan, c.z_grid, c.U_grid, aopt, c.threads);

  json ctmc = json::array(), embedded = json::array();
  bool ctmc_ok = false, embedded_ok = false;
  EmbeddedOptions eopt;
  eopt.mc_draws = c.mc_draws;
  eopt.seed = c.seed;
  for (double z : c.z_grid) {
    for (double U : c.U_grid) {
      try {
        const auto cert = drift_check_ctmc(model, z, U, scan, c.threads);
        ctmc_ok = ctmc_ok || !cert.violated;
        ctmc.push_back(to_json(cert));
      } catch (const std::exception& e) {
        ctmc.push_back({{"z", z}, {"U", U}, {"error", e.what()}});
      }
      try {
        const auto cert = drift_check_embedded(model, z, U, scan, eopt, c.threads);
        embedded_ok = embedded_ok || !cert.violated;
        embedded.push_back(to_json(cert));
      } catch (const std::exception& e) {
        embedded.push_back({{"z", z}, {"U", U}, {"error", e.what()}});
      }
    }
  }

  json head = artifact_header(c, "check");
  head["model"] = std::string(model.name());
  head["parameter_violations"] = to_json(bm.report);
  if (!notes.empty()) head["notes"] = notes;
  json a = head;
  a["report"] = to_json(ar);
  json d1 = head;
  d1["certificates"] = ctmc;
  d1["certified"] = ctmc_ok;
  json d2 = head;
  d2["certificates"] = embedded;
  d2["certified"] = embedded_ok;
  write_json(c.out_dir / "assumptions.json", a);
  write_json(c.out_dir / "drift_ctmc.json", d1);
  write_json(c.out_dir / "drift_embedded.json", d2);

  for (const auto& e : ar.entries) {
    out << "assumption " << e.number << ": " << to_string(e.status);
    if (e.status == AssumptionStatus::Violated && e.witness) out << " witness " << e.witness->to_string();
    out << "\n";
  }
  out << "ctmc drift certificate: " << (ctmc_ok ? "found" : "none on the grid") << "\n";
  out << "embedded drift certificate: " << (embedded_ok ? "found" : "none on the grid") << "\n";
  const bool violated = ar.any_violated() || !ctmc_ok || !embedded_ok || !bm.report.empty();
  return violated ? kExitAssumptionViolated : kExitOk;
}

int cmd_scaling(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const BuiltModel bm = build_model(c);
  print_violations(bm.report, err);
  ScalingConfig sc;
  sc.initial = bm.initial;
  sc.seed = c.seed;
  sc.threads = c.threads;
  sc.series_paths = c.n_paths;
  sc.series_events = c.max_events;
  sc.lag = c.lag;
  sc.calendar_paths = c.calendar_paths.value_or(c.n_paths);
  sc.scales = c.scales;
  sc.times = c.times;
  sc.burn_in = c.scaling_burn_in;
  const ScalingReport r = scaling_report(*bm.model, sc);

  json doc = artifact_header(c, "scaling");
  doc["model"] = std::string(bm.model->name());
  doc["parameter_violations"] = to_json(bm.report);
  doc["report"] = to_json(r);
  if (c.wants("json")) write_json(c.out_dir / "scaling.json", doc);
  if (c.wants("csv")) {
    const std::string head = comment_block(csv_header_comment(c, "scaling"));
    std::string t = head + "path,rescaled_terminal\n";
    for (std::size_t k = 0; k < r.rescaled_terminal.size(); ++k)
      t += std::to_string(k) + "," + csv_number(r.rescaled_terminal[k]) + "\n";
    write_text(c.out_dir / "rescaled_terminal.csv", t);
    std::string a = head + "lag,autocovariance\n";
    for (std::size_t k = 0; k < r.sigma2_event.autocov.size(); ++k)
      a += std::to_string(k) + "," + csv_number(r.sigma2_event.autocov[k]) + "\n";
    write_text(c.out_dir / "autocovariance.csv", a);
  }
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  out << "sigma2 = " << r.sigma2_event.sigma2 << " (se " << r.sigma2_event.se << ", M = " << r.sigma2_event.window
      << "), E[tau] = " << r.e_tau.mean << ", sigma2/E[tau] = " << r.sigma2_calendar << "\n";
  for (const auto& v : r.ratios)
    out << "n = " << v.n << ", t = " << v.t << ": ratio " << v.ratio << " +- " << v.ratio_se << "\n";
  if (r.nonzero_drift && c.symmetric) {
    err << "error: the config declares a symmetric model but the mean price increment is nonzero\n";
    return kExitNonzeroDrift;
  }
  return kExitOk;
}

int cmd_oracle(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const BuiltModel bm = build_model(c);
  print_violations(bm.report, err);
  const TruncatedGenerator gen = truncated_generator(*bm.model, c.truncation_cap, c.oracle_price_mode, c.max_states);
  const StationaryResult st = stationary_solve(gen);

  const auto sim_model = c.oracle_price_mode == PriceMode::Frozen ? freeze_price(bm.model) : bm.model;
  SimulationOptions opt;
  opt.stop.max_events = c.oracle_events;
  if (c.max_time) opt.stop.max_time = *c.max_time;
  opt.burn_in_events = c.burn_in;
  opt.record_occupation = true;
  Rng rng = make_path_rng(c.seed, 0);
  const PathSummary p = simulate(*sim_model, bm.initial, opt, rng);
  if (!p.ok()) {
    err << "simulation stopped: " << p.error << "\n";
    if (p.absorbed) return kExitAbsorbing;
  }
  const ProjectedOccupation proj = project_occupation(gen, p.occupation);
  const std::vector<double>& occ = proj.p;
  const double tv = total_variation(st.pi, occ);

  json doc = artifact_header(c, "oracle");
  doc["model"] = std::string(bm.model->name());
  doc["parameter_violations"] = to_json(bm.report);
  doc["truncation_cap"] = c.truncation_cap;
  doc["price_mode"] = to_string(c.oracle_price_mode);
  doc["states"] = gen.size();
  doc["relative_residual"] = st.relative_residual;
  doc["transient_states"] = st.transient_states;
  doc["events"] = p.events;
  doc["total_variation"] = tv;
  doc["occupation_outside_box"] = proj.outside_mass;
  doc["shape_oracle"] = to_json(shape_statistics(gen, st.pi));
  doc["shape_simulation"] = to_json(shape_statistics(gen, occ));
  if (c.wants("json")) write_json(c.out_dir / "oracle.json", doc);
  if (c.wants("csv")) {
    std::string t = comment_block(csv_header_comment(c, "oracle"));
    for (int s = 0; s < 2 * c.book.K; ++s) t += "q" + std::to_string(index_of_slot(s, c.book.K)) + ",";
    t += "stationary,occupation\n";
    for (std::size_t k = 0; k < gen.size(); ++k) {
      for (auto v : gen.states[k].slots()) t += std::to_string(v) + ",";
      t += csv_number(st.pi[k]) + "," + csv_number(occ[k]) + "\n";
    }
    write_text(c.out_dir / "distribution.csv", t);
  }
  out << "states " << gen.size() << ", residual " << st.relative_residual << ", total variation " << tv << "\n";
  return p.ok() ? kExitOk : kExitFailure;
}

int run_command(const std::string& command, const std::filesystem::path& config_path, const Overrides& ov,
                std::ostream& out, std::ostream& err) {
  try {
    RunConfig c = load_config(config_path);
    if (ov.seed) c.seed = *ov.seed;
    if (ov.out_dir) c.out_dir = *ov.out_dir;
    std::filesystem::create_directories(c.out_dir);
    if (command == "simulate") return cmd_simulate(c, out, err);
    if (command == "check") return cmd_check(c, out, err);
    if (command == "scaling") return cmd_scaling(c, out, err);
    if (command == "oracle") return cmd_oracle(c, out, err);
    err << "unknown command " << command << "\n";
    return kExitFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    print_violations(e.violations(), err);
    return kExitConfigViolation;
  } catch (const SignPatternViolation& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigViolation;
  } catch (const StateSpaceTooLarge& e) {
    err << "state space too large: " << e.count() << " states exceed the bound " << e.bound() << "\n";
    return kExitStateSpaceTooLarge;
  } catch (const AbsorbingState& e) {
    err << "absorbing state: " << e.what() << "\n";
    return kExitAbsorbing;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace lob::cli
