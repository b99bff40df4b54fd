#include "lob/cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace lob::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key " + where + "." + key);
}

template <class T>
T get(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::uint64_t get_count(const json& obj, const std::string& where, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  // Counts may be written as 1e6.
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) throw ConfigError(where + "." + key + " must be a count");
    return static_cast<std::uint64_t>(d);
  }
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(where + "." + key + " must be a count");
  return v.get<std::uint64_t>();
}

std::vector<double> get_grid(const json& obj, const std::string& where, const char* key, std::vector<double> fallback) {
  auto g = get<std::vector<double>>(obj, where, key, std::move(fallback));
  if (g.empty()) throw ConfigError(where + "." + key + " must not be empty");
  return g;
}

RedrawParams parse_redraw(const json& p, RedrawParams r) {
  r.reinit_probability = get(p, "model.params", "reinit_probability", r.reinit_probability);
  r.boundary_p = get(p, "model.params", "boundary_p", r.boundary_p);
  r.reinit_p = get(p, "model.params", "reinit_p", r.reinit_p);
  return r;
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::string config_hash(const json& document) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : document.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  c.document = doc;
  check_keys(doc, "config", {"model", "book", "initial", "simulation", "analysis", "output"});

  if (!doc.contains("model")) throw ConfigError("config.model is required");
  const json& m = doc.at("model");
  check_keys(m, "model", {"name", "params", "price_rates"});
  if (!m.contains("name")) throw ConfigError("model.name is required");
  c.model_name = get<std::string>(m, "model", "name", "");
  if (m.contains("params")) {
    if (!m.at("params").is_object()) throw ConfigError("model.params must be an object");
    c.model_params = m.at("params");
  }
  if (m.contains("price_rates")) {
    const json& pr = m.at("price_rates");
    check_keys(pr, "model.price_rates", {"mode", "a", "b"});
    c.price_rates = get<std::string>(pr, "model.price_rates", "mode", "model");
    c.price_a = get(pr, "model.price_rates", "a", 0.0);
    c.price_b = get(pr, "model.price_rates", "b", 0.0);
    static const std::set<std::string> modes{"model", "frozen", "constant", "mid_chasing"};
    if (!modes.count(c.price_rates)) throw ConfigError("model.price_rates.mode: unknown mode " + c.price_rates);
  }

  if (doc.contains("book")) {
    const json& b = doc.at("book");
    check_keys(b, "book", {"K", "tick"});
    c.book.K = get(b, "book", "K", c.book.K);
    c.book.tick = get(b, "book", "tick", c.book.tick);
  } else if (c.model_name != "poisson_k1") {
    c.book.K = 2;
  }
  try {
    c.book.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("book: ") + e.what());
  }
  c.initial_p_ref = 0.5 * c.book.tick;
  if (doc.contains("initial")) {
    const json& in = doc.at("initial");
    check_keys(in, "initial", {"q", "p_ref"});
    if (in.contains("q")) c.initial_q = get<std::vector<QueueSize>>(in, "initial", "q", {});
    c.initial_p_ref = get(in, "initial", "p_ref", c.initial_p_ref);
  }

  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    check_keys(s, "simulation", {"max_events", "max_time", "seed", "n_paths", "burn_in", "log_every", "threads"});
    c.max_events = get_count(s, "simulation", "max_events", c.max_events);
    if (s.contains("max_time")) c.max_time = get(s, "simulation", "max_time", 0.0);
    c.seed = get_count(s, "simulation", "seed", c.seed);
    c.n_paths = get_count(s, "simulation", "n_paths", c.n_paths);
    c.burn_in = get_count(s, "simulation", "burn_in", c.burn_in);
    c.log_every = get_count(s, "simulation", "log_every", c.log_every);
    c.threads = static_cast<unsigned>(get_count(s, "simulation", "threads", 0));
    if (c.n_paths == 0) throw ConfigError("simulation.n_paths must be positive");
    if (c.max_time && !(*c.max_time > 0.0)) throw ConfigError("simulation.max_time must be positive");
  }

  if (doc.contains("analysis")) {
    const json& a = doc.at("analysis");
    check_keys(a, "analysis",
               {"z_grid", "U_grid", "scan_cap", "scan_samples", "mc_draws", "lag_window", "lag_kernel",
                "truncation_cap", "oracle_price_mode", "max_states", "oracle_events", "symmetric",
                "scaling_burn_in", "calendar_paths", "scales", "times"});
    c.z_grid = get_grid(a, "analysis", "z_grid", c.z_grid);
    c.U_grid = get_grid(a, "analysis", "U_grid", c.U_grid);
    for (double z : c.z_grid)
      if (!(z > 1.0)) throw ConfigError("analysis.z_grid entries must exceed 1");
    for (double U : c.U_grid)
      if (!(U >= 0.0)) throw ConfigError("analysis.U_grid entries must be nonnegative");
    if (a.contains("scan_cap")) c.scan_cap = static_cast<QueueSize>(get_count(a, "analysis", "scan_cap", 0));
    c.scan_samples = get_count(a, "analysis", "scan_samples", c.scan_samples);
    c.mc_draws = get_count(a, "analysis", "mc_draws", c.mc_draws);
    if (a.contains("lag_window")) {
      const json& w = a.at("lag_window");
      if (w.is_string()) {
        if (w.get<std::string>() != "adaptive") throw ConfigError("analysis.lag_window: \"adaptive\" or a count");
      } else {
        c.lag.adaptive = false;
        c.lag.fixed_window = get_count(a, "analysis", "lag_window", 0);
      }
    }
    const auto kernel = get<std::string>(a, "analysis", "lag_kernel", "flat");
    if (kernel == "flat")
      c.lag.kernel = LagKernel::Flat;
    else if (kernel == "bartlett")
      c.lag.kernel = LagKernel::Bartlett;
    else
      throw ConfigError("analysis.lag_kernel: flat or bartlett");
    c.truncation_cap = static_cast<QueueSize>(get_count(a, "analysis", "truncation_cap", 3));
    const auto pm = get<std::string>(a, "analysis", "oracle_price_mode", "frozen");
    if (pm == "frozen")
      c.oracle_price_mode = PriceMode::Frozen;
    else if (pm == "collapsed")
      c.oracle_price_mode = PriceMode::Collapsed;
    else
      throw ConfigError("analysis.oracle_price_mode: frozen or collapsed");
    c.max_states = get_count(a, "analysis", "max_states", c.max_states);
    c.oracle_events = get_count(a, "analysis", "oracle_events", c.oracle_events);
    c.symmetric = get(a, "analysis", "symmetric", false);
    if (a.contains("scaling_burn_in")) c.scaling_burn_in = get_count(a, "analysis", "scaling_burn_in", 0);
    if (a.contains("calendar_paths")) c.calendar_paths = get_count(a, "analysis", "calendar_paths", 0);
    c.scales = get_grid(a, "analysis", "scales", c.scales);
    c.times = get_grid(a, "analysis", "times", c.times);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"directory", "formats"});
    c.out_dir = get<std::string>(o, "output", "directory", "out");
    c.formats = get(o, "output", "formats", c.formats);
    for (const auto& f : c.formats)
      if (f != "csv" && f != "json") throw ConfigError("output.formats: csv and/or json");
  }

  // The seed is recorded next to the hash, so it is kept out of the hash itself.
  json identity = doc;
  if (identity.contains("simulation") && identity["simulation"].is_object()) identity["simulation"].erase("seed");
  c.hash = config_hash(identity);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

namespace {

void require_K(const RunConfig& c, int K) {
  if (c.book.K != K) throw ConfigError("book.K = " + std::to_string(c.book.K) + " but the model has K = " + std::to_string(K));
}

std::shared_ptr<const RateModel> build_base(const RunConfig& c, ConstraintReport& report) {
  const json& p = c.model_params;
  const std::string where = "model.params";
  try {
    if (c.model_name == "poisson_k1") {
      check_keys(p, where, {"lambda", "mu", "theta", "reinit_p"});
      require_K(c, 1);
      PoissonK1Params q;
      q.lambda = get(p, where, "lambda", q.lambda);
      q.mu = get(p, where, "mu", q.mu);
      q.theta = get(p, where, "theta", q.theta);
      q.reinit_p = get(p, where, "reinit_p", q.reinit_p);
      report = validate_params(q);
      if (has_structural(report)) return nullptr;
      return std::make_shared<PoissonK1Model>(q, c.book.tick);
    }
    if (c.model_name == "poisson_k") {
      check_keys(p, where, {"lambda", "mu", "gamma", "theta", "reinit_probability", "boundary_p", "reinit_p"});
      auto q = PoissonKParams::defaults(c.book.K);
      q.lambda = get(p, where, "lambda", q.lambda);
      q.mu = get(p, where, "mu", q.mu);
      q.gamma = get(p, where, "gamma", q.gamma);
      q.theta = get(p, where, "theta", q.theta);
      q.redraw = parse_redraw(p, q.redraw);
      report = validate_params(q);
      if (has_structural(report)) return nullptr;
      return std::make_shared<PoissonKModel>(q, c.book.tick);
    }
    if (c.model_name == "zero_intelligence") {
      check_keys(p, where,
                 {"lambda_by_distance", "mu_by_distance", "gamma", "theta", "reinit_probability", "boundary_p",
                  "reinit_p"});
      auto q = ZeroIntelligenceParams::defaults(c.book.K);
      q.lambda_by_distance = get(p, where, "lambda_by_distance", q.lambda_by_distance);
      q.mu_by_distance = get(p, where, "mu_by_distance", q.mu_by_distance);
      q.gamma = get(p, where, "gamma", q.gamma);
      q.theta = get(p, where, "theta", q.theta);
      q.redraw = parse_redraw(p, q.redraw);
      report = validate_params(q);
      if (has_structural(report)) return nullptr;
      return std::make_shared<ZeroIntelligenceModel>(q, c.book.tick);
    }
    if (c.model_name == "queue_reactive") {
      check_keys(p, where, {"lambda", "mu", "theta", "reinit_probability", "boundary_p", "reinit_p"});
      auto q = QueueReactiveParams::defaults(c.book.K);
      q.lambda = get(p, where, "lambda", q.lambda);
      q.mu = get(p, where, "mu", q.mu);
      q.theta = get(p, where, "theta", q.theta);
      q.redraw = parse_redraw(p, q.redraw);
      report = validate_params(q);
      if (has_structural(report)) return nullptr;
      return std::make_shared<QueueReactiveModel>(q, c.book.tick);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what(), report);
  }
  throw ConfigError("model.name: unknown model " + c.model_name +
                    " (poisson_k1, poisson_k, zero_intelligence, queue_reactive)");
}

}  // namespace

BuiltModel build_model(const RunConfig& c) {
  BuiltModel out;
  auto base = build_base(c, out.report);
  if (!base) throw ConfigError("model parameters violate structural constraints", out.report);
  try {
    if (c.price_rates == "frozen")
      out.model = freeze_price(base);
    else if (c.price_rates == "constant")
      out.model = with_constant_price_rates(base, c.price_a, c.price_b);
    else if (c.price_rates == "mid_chasing")
      out.model = with_mid_chasing(base, c.price_a, c.price_b);
    else
      out.model = base;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model.price_rates: ") + e.what());
  }

  try {
    out.initial.p_ref = reference_price_from_value(c.initial_p_ref, c.book.tick);
    out.initial.book = c.initial_q ? validate_state(*c.initial_q) : OrderBookState(c.book.K);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("initial: ") + e.what());
  }
  if (out.initial.book.depth() != c.book.K) throw ConfigError("initial.q must have 2K entries");
  if (!out.model->admits(out.initial.book))
    throw ConfigError("initial.q is outside the state space of " + std::string(out.model->name()));
  return out;
}

}  // namespace lob::cli
