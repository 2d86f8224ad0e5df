#include "config.hpp"

#include <cmath>
#include <set>

namespace ogc::app {

namespace {

// Strict reader for one JSON object: typed getters record the keys they consume,
// finish() rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw ConfigError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return ptr_ + "/" + key; }
  const std::string& pointer() const { return ptr_; }

  const json* raw(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const char* key, double& out) {
    if (const json* v = raw(key)) out = number(*v, at(key));
  }
  void get(const char* key, int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key), "expected a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (const json* v = raw(key)) out = numbers(*v, at(key));
  }
  void get(const char* key, std::vector<Monomial>& out) {
    const json* v = raw(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of terms");
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = at(key) + "/" + std::to_string(i);
      Reader t((*v)[i], p);
      Monomial m;
      std::vector<double> pw;
      t.need("coef", m.coef);
      t.need("pow", pw);
      if (pw.empty() || static_cast<int>(pw.size()) > kMaxDim)
        throw ConfigError(p + "/pow", "exponent list must have 1 to 4 entries");
      for (std::size_t k = 0; k < pw.size(); ++k) {
        if (pw[k] < 0 || pw[k] != std::floor(pw[k]))
          throw ConfigError(p + "/pow/" + std::to_string(k), "exponents must be nonnegative integers");
        m.pow[k] = static_cast<int>(pw[k]);
      }
      t.finish();
      out.push_back(m);
    }
  }

  template <class T>
  void need(const char* key, T& out) {
    if (!has(key)) throw ConfigError(at(key), "required key missing");
    get(key, out);
  }

  Reader child(const char* key) {
    used_.insert(key);
    return Reader(j_.at(key), at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(ptr_ + "/" + it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> used_;

  static double number(const json& v, const std::string& p) {
    if (!v.is_number()) throw ConfigError(p, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(p, "expected a finite number");
    return x;
  }
  static std::vector<double> numbers(const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], p + "/" + std::to_string(i)));
    return out;
  }
};

void check(bool ok, const std::string& ptr, const std::string& msg) {
  if (!ok) throw ConfigError(ptr, msg);
}

WellSpec read_well(Reader r) {
  WellSpec w;
  r.get("lambda", w.lambda);
  r.get("dim", w.dim);
  r.get("terms", w.terms);
  r.need("energy", w.energy);
  r.finish();
  check(w.energy > 0.0, r.at("energy"), "energy must be positive");
  check(w.lambda.empty() != w.terms.empty(), r.at("lambda"), "give either lambda or terms");
  if (!w.lambda.empty()) {
    check(static_cast<int>(w.lambda.size()) <= kMaxDim, r.at("lambda"), "at most 4 frequencies");
    for (std::size_t i = 0; i < w.lambda.size(); ++i)
      check(w.lambda[i] > 0.0, r.at("lambda") + "/" + std::to_string(i), "frequencies must be positive");
    check(w.dim == 0 || w.dim == static_cast<int>(w.lambda.size()), r.at("dim"),
          "dim disagrees with the number of frequencies");
    w.dim = static_cast<int>(w.lambda.size());
  } else {
    check(w.dim >= 1 && w.dim <= kMaxDim, r.at("dim"), "polynomial wells need dim in [1, 4]");
  }
  return w;
}

DomainSpec read_domain(Reader r) {
  DomainSpec d;
  r.need("kind", d.kind);
  r.get("center", d.center);
  r.get("radius", d.radius);
  r.get("semi_axes", d.semi_axes);
  r.get("dim", d.dim);
  r.get("terms", d.terms);
  r.get("delta_star", d.delta_star);
  r.get("delta", d.delta);
  r.finish();
  check(d.delta_star >= 0.0, r.at("delta_star"), "delta_star must be nonnegative");
  if (d.kind == "disk") {
    if (d.center.empty()) d.center = {0.0, 0.0};
    check(d.center.size() >= 2 && static_cast<int>(d.center.size()) <= kMaxDim, r.at("center"),
          "center needs 2 to 4 coordinates");
    check(d.radius > 0.0, r.at("radius"), "radius must be positive");
    d.dim = static_cast<int>(d.center.size());
  } else if (d.kind == "ellipse") {
    check(d.semi_axes.size() >= 2 && static_cast<int>(d.semi_axes.size()) <= kMaxDim, r.at("semi_axes"),
          "semi_axes needs 2 to 4 entries");
    for (std::size_t i = 0; i < d.semi_axes.size(); ++i)
      check(d.semi_axes[i] > 0.0, r.at("semi_axes") + "/" + std::to_string(i), "semi-axes must be positive");
    d.dim = static_cast<int>(d.semi_axes.size());
  } else if (d.kind == "implicit") {
    check(d.dim >= 2 && d.dim <= kMaxDim, r.at("dim"), "dim must be in [2, 4]");
    check(!d.terms.empty(), r.at("terms"), "implicit domains need terms");
  } else if (d.kind == "jacobi") {
    check(d.delta > 0.0, r.at("delta"), "jacobi domains need delta > 0");
  } else {
    throw ConfigError(r.at("kind"), "kind must be disk, ellipse, implicit or jacobi");
  }
  return d;
}

void read_settings(Reader r, DomainSettings& s) {
  std::vector<double> x0;
  r.get("ladder", s.ladder);
  r.get("concavity_samples", s.concavity_samples);
  r.get("k0_samples", s.k0_samples);
  r.get("k0_safety", s.k0_safety);
  r.get("x0", x0);
  r.get("rho0", s.rho0);
  r.finish();
  for (std::size_t i = 0; i < s.ladder.size(); ++i)
    check(s.ladder[i] > 0.0, r.at("ladder") + "/" + std::to_string(i), "ladder rungs must be positive");
  check(s.concavity_samples >= 1, r.at("concavity_samples"), "must be >= 1");
  check(s.k0_samples >= 1, r.at("k0_samples"), "must be >= 1");
  check(s.k0_safety >= 1.0, r.at("k0_safety"), "must be >= 1");
  check(s.rho0 >= 0.0, r.at("rho0"), "must be nonnegative");
  if (!x0.empty()) {
    check(static_cast<int>(x0.size()) <= kMaxDim, r.at("x0"), "at most 4 coordinates");
    Vec v(static_cast<Eigen::Index>(x0.size()));
    for (std::size_t i = 0; i < x0.size(); ++i) v[static_cast<Eigen::Index>(i)] = x0[i];
    s.x0 = v;
  }
}

void read_flow(Reader r, FlowConfig& f) {
  r.get("initial_step", f.initial_step);
  r.get("backtrack", f.backtrack);
  r.get("max_backtracks", f.max_backtracks);
  r.get("armijo", f.armijo);
  r.get("max_iterations", f.max_iterations);
  r.get("stall", f.stall);
  r.get("boundary_tol", f.boundary_tol);
  r.get("contact_tol", f.contact_tol);
  r.get("delta1", f.delta1);
  r.get("Delta_star", f.Delta_star);
  r.get("escape_amplitude", f.escape_amplitude);
  r.get("escape_rungs", f.escape_rungs);
  if (const json* v = r.raw("M0_sq"); v && !v->is_null()) {
    check(v->is_number(), r.at("M0_sq"), "expected a number or null");
    f.M0_sq = v->get<double>();
  }
  r.get("trivial_energy", f.trivial_energy);
  r.get("orth_tol", f.orth_tol);
  r.get("residual_tol", f.residual_tol);
  r.get("multiplier_tol", f.multiplier_tol);
  r.get("tangential_tol", f.tangential_tol);
  r.get("gamma_band", f.gamma_band);
  r.get("pinned_endpoints", f.pinned_endpoints);
  r.get("coarse_segments", f.coarse_segments);
  r.finish();
  try {
    f.validate();
  } catch (const Error& e) {
    throw ConfigError(r.pointer(), e.what());
  }
}

json monomials(const std::vector<Monomial>& terms, int dim) {
  json a = json::array();
  for (const auto& t : terms) {
    json pw = json::array();
    for (int k = 0; k < dim; ++k) pw.push_back(t.pow[k]);
    a.push_back({{"coef", t.coef}, {"pow", pw}});
  }
  return a;
}

int terms_dim(const std::vector<Monomial>& terms) {
  int d = 1;
  for (const auto& t : terms)
    for (int k = 0; k < kMaxDim; ++k)
      if (t.pow[k] != 0) d = std::max(d, k + 1);
  return d;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  Reader r(doc, "");
  std::string schema;
  r.need("schema", schema);
  check(schema == kConfigSchema, "/schema", std::string("unsupported schema; expected ") + kConfigSchema);

  RunConfig c;
  if (r.has("well")) c.well = read_well(r.child("well"));
  if (r.has("domain")) c.domain = read_domain(r.child("domain"));
  r.get("metric", c.metric);
  if (r.has("domain_settings")) read_settings(r.child("domain_settings"), c.settings);
  if (r.has("omega")) {
    Reader o = r.child("omega");
    o.get("width", c.omega_width);
    o.get("certify_samples", c.certify_samples);
    o.get("force", c.omega_force);
    o.finish();
    check(c.omega_width >= 0.0, "/omega/width", "must be nonnegative");
    check(c.certify_samples >= 1, "/omega/certify_samples", "must be >= 1");
  }
  if (r.has("flow")) read_flow(r.child("flow"), c.flow);
  if (r.has("sweep")) {
    Reader s = r.child("sweep");
    s.get("grid", c.sweep.grid);
    s.get("segments", c.sweep.segments);
    s.get("dedup_tol", c.sweep.dedup_tol);
    s.get("keep_traces", c.sweep.keep_traces);
    s.finish();
    check(c.sweep.grid >= 1, "/sweep/grid", "must be >= 1");
    check(c.sweep.segments >= 2, "/sweep/segments", "must be >= 2");
    check(c.sweep.dedup_tol >= 0.0, "/sweep/dedup_tol", "must be nonnegative");
  }
  if (r.has("brake")) {
    Reader b = r.child("brake");
    b.get("rtol", c.brake.rtol);
    b.get("atol", c.brake.atol);
    b.get("t_max", c.brake.t_max);
    b.get("samples", c.orbit_samples);
    b.finish();
    check(c.brake.rtol > 0.0, "/brake/rtol", "must be positive");
    check(c.brake.atol > 0.0, "/brake/atol", "must be positive");
    check(c.brake.t_max > 0.0, "/brake/t_max", "must be positive");
    check(c.orbit_samples >= 2, "/brake/samples", "must be >= 2");
  }
  if (r.has("oracle")) {
    Reader o = r.child("oracle");
    o.get("grid", c.oracle_grid);
    o.get("tol", c.shoot.tol);
    o.get("zero_tol", c.shoot.zero_tol);
    o.get("length_budget", c.shoot.length_budget);
    o.get("segments", c.shoot.segments);
    o.get("merge_tol", c.shoot.merge_tol);
    o.finish();
    check(c.oracle_grid >= 2, "/oracle/grid", "must be >= 2");
    check(c.shoot.tol > 0.0, "/oracle/tol", "must be positive");
    check(c.shoot.zero_tol >= 0.0, "/oracle/zero_tol", "must be nonnegative");
    check(c.shoot.length_budget >= 0.0, "/oracle/length_budget", "must be nonnegative");
    check(c.shoot.segments >= 2, "/oracle/segments", "must be >= 2");
    check(c.shoot.merge_tol >= 0.0, "/oracle/merge_tol", "must be nonnegative");
  }
  if (r.has("compare")) {
    Reader o = r.child("compare");
    o.get("tolerance", c.compare_tolerance);
    o.finish();
    check(c.compare_tolerance > 0.0, "/compare/tolerance", "must be positive");
  }
  if (r.has("check")) {
    Reader o = r.child("check");
    o.get("verify_samples", c.verify_samples);
    o.finish();
    check(c.verify_samples >= 1, "/check/verify_samples", "must be >= 1");
  }
  r.finish();

  if (c.metric.empty()) c.metric = c.domain && c.domain->kind == "jacobi" ? "jacobi" : "euclidean";
  check(c.metric == "euclidean" || c.metric == "jacobi", "/metric", "metric must be euclidean or jacobi");
  if (c.domain && c.domain->kind == "jacobi") {
    check(c.well.has_value(), "/well", "jacobi domains need a well");
    check(c.metric == "jacobi", "/metric", "jacobi domains carry the jacobi metric");
  }
  if (c.metric == "jacobi") check(c.well.has_value(), "/well", "the jacobi metric needs a well");
  if (c.domain && c.domain->kind == "implicit") {
    check(terms_dim(c.domain->terms) <= c.domain->dim, "/domain/terms", "exponent beyond dim");
  }
  if (c.well && !c.well->terms.empty())
    check(terms_dim(c.well->terms) <= c.well->dim, "/well/terms", "exponent beyond dim");
  if (c.well && c.domain && c.domain->kind != "jacobi" && c.metric == "jacobi")
    check(c.domain->dim == c.well->dim, "/domain", "domain and well dimensions differ");
  if (c.settings.x0) {
    const int d = c.domain ? (c.domain->kind == "jacobi" && c.well ? c.well->dim : c.domain->dim) : -1;
    check(d < 0 || c.settings.x0->size() == d, "/domain_settings/x0", "x0 dimension differs from the domain");
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  if (c.well) {
    json w;
    if (!c.well->lambda.empty()) {
      w["lambda"] = c.well->lambda;
    } else {
      w["dim"] = c.well->dim;
      w["terms"] = monomials(c.well->terms, c.well->dim);
    }
    w["energy"] = c.well->energy;
    j["well"] = w;
  }
  if (c.domain) {
    const DomainSpec& d = *c.domain;
    json o;
    o["kind"] = d.kind;
    if (d.kind == "disk") {
      o["center"] = d.center;
      o["radius"] = d.radius;
    } else if (d.kind == "ellipse") {
      o["semi_axes"] = d.semi_axes;
    } else if (d.kind == "implicit") {
      o["dim"] = d.dim;
      o["terms"] = monomials(d.terms, d.dim);
    } else {
      o["delta"] = d.delta;
    }
    if (d.kind != "jacobi") o["delta_star"] = d.delta_star;
    j["domain"] = o;
  }
  j["metric"] = c.metric;
  json s;
  s["ladder"] = c.settings.ladder;
  s["concavity_samples"] = c.settings.concavity_samples;
  s["k0_samples"] = c.settings.k0_samples;
  s["k0_safety"] = c.settings.k0_safety;
  if (c.settings.x0) s["x0"] = std::vector<double>(c.settings.x0->begin(), c.settings.x0->end());
  s["rho0"] = c.settings.rho0;
  j["domain_settings"] = s;
  j["omega"] = {{"width", c.omega_width}, {"certify_samples", c.certify_samples}, {"force", c.omega_force}};
  const FlowConfig& f = c.flow;
  j["flow"] = {{"initial_step", f.initial_step},
               {"backtrack", f.backtrack},
               {"max_backtracks", f.max_backtracks},
               {"armijo", f.armijo},
               {"max_iterations", f.max_iterations},
               {"stall", f.stall},
               {"boundary_tol", f.boundary_tol},
               {"contact_tol", f.contact_tol},
               {"delta1", f.delta1},
               {"Delta_star", f.Delta_star},
               {"escape_amplitude", f.escape_amplitude},
               {"escape_rungs", f.escape_rungs},
               {"M0_sq", std::isfinite(f.M0_sq) ? json(f.M0_sq) : json(nullptr)},
               {"trivial_energy", f.trivial_energy},
               {"orth_tol", f.orth_tol},
               {"residual_tol", f.residual_tol},
               {"multiplier_tol", f.multiplier_tol},
               {"tangential_tol", f.tangential_tol},
               {"gamma_band", f.gamma_band},
               {"pinned_endpoints", f.pinned_endpoints},
               {"coarse_segments", f.coarse_segments}};
  j["sweep"] = {{"grid", c.sweep.grid},
                {"segments", c.sweep.segments},
                {"dedup_tol", c.sweep.dedup_tol},
                {"keep_traces", c.sweep.keep_traces}};
  j["brake"] = {{"rtol", c.brake.rtol}, {"atol", c.brake.atol}, {"t_max", c.brake.t_max}, {"samples", c.orbit_samples}};
  j["oracle"] = {{"grid", c.oracle_grid},
                 {"tol", c.shoot.tol},
                 {"zero_tol", c.shoot.zero_tol},
                 {"length_budget", c.shoot.length_budget},
                 {"segments", c.shoot.segments},
                 {"merge_tol", c.shoot.merge_tol}};
  j["compare"] = {{"tolerance", c.compare_tolerance}};
  j["check"] = {{"verify_samples", c.verify_samples}};
  return j;
}

Problem build_problem(const RunConfig& cfg, bool force_omega) {
  if (!cfg.domain) throw ConfigError("/domain", "this command needs a domain");
  Problem p;
  if (cfg.well) {
    const WellSpec& w = *cfg.well;
    p.well = std::make_shared<PotentialWell>(w.lambda.empty()
                                                 ? PotentialWell::polynomial(w.dim, w.terms, w.energy)
                                                 : PotentialWell::oscillator(w.lambda, w.energy));
  }
  const DomainSpec& d = *cfg.domain;
  if (d.kind == "jacobi") {
    OmegaOptions o;
    o.width = cfg.omega_width;
    o.settings = cfg.settings;
    o.certify_samples = cfg.certify_samples;
    o.force = cfg.omega_force || force_omega;
    p.omega = build_omega_delta(p.well, d.delta, o);
    p.domain = p.omega->domain;
    p.metric = p.omega->metric;
    return p;
  }
  DomainDescriptor desc;
  desc.kind = d.kind;
  if (d.kind == "disk") {
    desc.center = Vec(static_cast<Eigen::Index>(d.center.size()));
    for (std::size_t i = 0; i < d.center.size(); ++i) desc.center[static_cast<Eigen::Index>(i)] = d.center[i];
    desc.radius = d.radius;
  }
  desc.semi_axes = d.semi_axes;
  desc.dim = d.dim;
  desc.terms = d.terms;
  desc.delta_star = d.delta_star;
  p.metric = cfg.metric == "jacobi" ? jacobi_metric_from_well(p.well) : MetricField::euclidean(d.dim);
  p.domain = prepare_domain(build_domain(desc), p.metric, cfg.settings);
  return p;
}

}  // namespace ogc::app
