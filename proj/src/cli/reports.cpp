#include "lob/cli/reports.hpp"

#include <cmath>
#include <fstream>

namespace lob::cli {

using nlohmann::json;

json artifact_header(const RunConfig& c, const std::string& command) {
  return {{"tool", kToolName},       {"version", kToolVersion}, {"schema_version", kSchemaVersion},
          {"command", command},      {"config_hash", c.hash},  {"seed", c.seed}};
}

std::string csv_header_comment(const RunConfig& c, const std::string& command) {
  return std::string("tool: ") + kToolName + "\nversion: " + kToolVersion +
         "\nschema_version: " + std::to_string(kSchemaVersion) + "\ncommand: " + command +
         "\nconfig_hash: " + c.hash + "\nseed: " + std::to_string(c.seed);
}

std::string comment_block(const std::string& text) {
  std::string out = "# ";
  for (char ch : text) out += ch == '\n' ? std::string("\n# ") : std::string(1, ch);
  return out + "\n";
}

json book_json(const OrderBookState& q) {
  json a = json::array();
  for (auto v : q.slots()) a.push_back(v);
  return a;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json mean_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"se", m.se}, {"n", m.n}}; }

}  // namespace

json to_json(const ConstraintReport& r) {
  json a = json::array();
  for (const auto& v : r)
    a.push_back({{"constraint", v.constraint}, {"detail", v.detail}, {"structural", v.structural}});
  return a;
}

json to_json(const PathSummary& p, double tick) {
  json j = {{"path", p.path},
            {"initial", {{"q", book_json(p.initial.book)}, {"p_ref", p.initial.p_ref.value(tick)}}},
            {"final", {{"q", book_json(p.final_state.book)}, {"p_ref", p.final_state.p_ref.value(tick)}}},
            {"events", p.events},
            {"elapsed", p.elapsed},
            {"z_ticks", p.z_ticks},
            {"z", static_cast<double>(p.z_ticks) * tick},
            {"up_moves", p.up_moves},
            {"down_moves", p.down_moves},
            {"mean_tau", p.events > 0 ? json(p.sum_tau / static_cast<double>(p.events)) : json(nullptr)},
            {"ok", p.ok()}};
  if (!p.ok()) {
    j["error"] = p.error;
    j["absorbed"] = p.absorbed;
  }
  return j;
}

json to_json(const DriftCertificate& c) {
  json j = {{"z", c.z},
            {"U", c.U},
            {"scan", c.scan_description},
            {"scanned_states", c.scanned_states},
            {"core_threshold", finite_or_null(c.core_threshold)},
            {"gamma", finite_or_null(c.gamma_hat)},
            {"B", finite_or_null(c.B_hat)},
            {"B_se", finite_or_null(c.B_stderr)},
            {"worst_state", book_json(c.worst_state)},
            {"worst_drift", finite_or_null(c.worst_drift)},
            {"violated", c.violated},
            {"reason", c.reason}};
  if (c.max_price_share > 0.0 || c.price_share_violated) {
    j["max_price_share"] = c.max_price_share;
    j["price_share_violated"] = c.price_share_violated;
    if (c.price_share_witness) j["price_share_witness"] = book_json(*c.price_share_witness);
  }
  return j;
}

json to_json(const AssumptionReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json m = json::object();
    for (const auto& [k, v] : e.margins) m[k] = finite_or_null(v);
    json j = {{"number", e.number}, {"title", e.title}, {"status", to_string(e.status)}, {"margins", m}};
    if (e.witness) j["witness"] = book_json(*e.witness);
    if (!e.note.empty()) j["note"] = e.note;
    entries.push_back(std::move(j));
  }
  return {{"scan", r.scan_description}, {"scanned_states", r.scanned_states}, {"z_grid", r.z_grid},
          {"U_grid", r.U_grid},         {"z_limit", r.z_limit},                {"any_violated", r.any_violated()},
          {"assumptions", entries}};
}

json to_json(const Sigma2Estimate& s) {
  return {{"sigma2", s.sigma2},          {"se", s.se},
          {"window", s.window},          {"n", s.n},
          {"kernel", to_string(s.kernel)}, {"window_capped", s.window_capped},
          {"decay_rate", s.decay_rate},  {"decay_r2", s.decay_r2},
          {"diagnostic", s.diagnostic}};
}

json to_json(const ScalingReport& r) {
  json ratios = json::array();
  for (const auto& v : r.ratios)
    ratios.push_back({{"n", v.n},
                      {"t", v.t},
                      {"horizon", v.horizon},
                      {"variance", v.variance},
                      {"variance_se", v.variance_se},
                      {"ratio", finite_or_null(v.ratio)},
                      {"ratio_se", finite_or_null(v.ratio_se)},
                      {"paths", v.paths}});
  json j = {{"tick", r.tick},
            {"burn_in", r.burn_in},
            {"series_events", r.series_events},
            {"mean_c", mean_json(r.mean_c)},
            {"sigma2_event", to_json(r.sigma2_event)},
            {"sigma2_batch", {{"value", r.sigma2_batch.value}, {"se", r.sigma2_batch.se},
                              {"blocks", r.sigma2_batch.blocks}, {"block", r.sigma2_batch.block}}},
            {"e_tau", mean_json(r.e_tau)},
            {"e_tau_halves", {mean_json(r.e_tau_first_half), mean_json(r.e_tau_second_half)}},
            {"sigma2_calendar", finite_or_null(r.sigma2_calendar)},
            {"sigma2_calendar_se", finite_or_null(r.sigma2_calendar_se)},
            {"variance_ratios", ratios},
            {"terminal",
             {{"horizon", r.terminal_horizon},
              {"paths", r.rescaled_terminal.size()},
              {"mean", r.terminal_moments.mean},
              {"variance", r.terminal_moments.variance},
              {"skewness", r.terminal_moments.skewness},
              {"excess_kurtosis", r.terminal_moments.excess_kurtosis},
              {"ks_statistic", r.terminal_ks.statistic},
              {"ks_pvalue", r.terminal_ks.pvalue}}},
            {"nonzero_drift", r.nonzero_drift},
            {"warnings", r.warnings}};
  json b = {{"burn_in", r.burn_in}, {"doubled_burn_in", r.doubled_burn_in}, {"sensitive", r.burn_in_sensitive}};
  if (r.sigma2_doubled) b["sigma2_doubled"] = *r.sigma2_doubled;
  if (r.e_tau_doubled) b["e_tau_doubled"] = *r.e_tau_doubled;
  j["burn_in_check"] = b;
  return j;
}

json to_json(const ShapeStatistics& s) {
  json idx = json::array();
  for (int k = 0; k < 2 * s.K; ++k) {
    const auto u = static_cast<std::size_t>(k);
    idx.push_back({{"i", index_of_slot(k, s.K)}, {"mean_abs", s.mean_abs[u]}, {"mean", s.mean_signed[u]}});
  }
  json spread = json::array(), mid = json::array();
  for (const auto& [v, p] : s.spread) spread.push_back({{"ticks", v}, {"probability", p}});
  for (const auto& [v, p] : s.mid_index) mid.push_back({{"i_mid", v}, {"probability", p}});
  return {{"K", s.K}, {"queues", idx}, {"spread", spread}, {"i_mid", mid}, {"saturated_mass", s.saturated_mass}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_number(double x) {
  std::string s;
  append_double(s, x);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace lob::cli
