#include "nbound/run.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "nbound/errors.hpp"
#include "nbound/fem/spectrum.hpp"
#include "nbound/parallel.hpp"
#include "nbound/quadrature.hpp"
#include "nbound/report.hpp"

namespace nb {

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::bound: return "bound";
    case Command::classical: return "classical";
    case Command::verify_constants: return "verify-constants";
    case Command::eig: return "eig";
    case Command::capacity: return "capacity";
    case Command::sweep: return "sweep";
  }
  return "?";
}

const char* to_string(Format f) noexcept { return f == Format::json ? "json" : "csv"; }

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::bound, Command::classical, Command::verify_constants, Command::eig,
                    Command::capacity, Command::sweep}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

std::optional<Format> parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  return std::nullopt;
}

namespace {

// Typed access to the flat config; every key read is recorded so leftovers can be rejected.
class Keys {
 public:
  Keys(const KeyValues& kv, Command cmd) : kv_(kv), cmd_(cmd) {}

  bool has(const std::string& k) const { return kv_.count(k) != 0; }

  std::string text(const std::string& k) {
    used_.insert(k);
    auto it = kv_.find(k);
    if (it == kv_.end()) throw ConfigError(k, std::string("missing required key for '") + to_string(cmd_) + "'");
    return it->second;
  }
  std::string text_or(const std::string& k, const std::string& fallback) {
    return has(k) ? text(k) : (used_.insert(k), fallback);
  }
  double number(const std::string& k) { return parse_double(k, text(k)); }
  double number_or(const std::string& k, double fallback) { return has(k) ? number(k) : fallback; }
  int integer_or(const std::string& k, int fallback) {
    if (!has(k)) return fallback;
    const double v = number(k);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(k, "expected an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& k) { return parse_double_list(k, text(k)); }

  double positive(const std::string& k) {
    const double v = number(k);
    if (!(v > 0.0)) throw ConfigError(k, "must be positive");
    return v;
  }
  double exponent(const std::string& k) {
    const double v = number(k);
    if (!(v > 1.0)) throw ConfigError(k, "must exceed 1");
    return v;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw ConfigError(k, std::string("unknown key for '") + to_string(cmd_) + "'");
    }
  }

 private:
  const KeyValues& kv_;
  Command cmd_;
  std::set<std::string> used_;
};

CuspProfile profile_from(const std::string& key, const std::vector<double>& gammas, int n) {
  try {
    return CuspProfile(n > 0 ? n : static_cast<int>(gammas.size()) + 1, gammas);
  } catch (const InvalidInput& e) {
    throw ConfigError(key, e.what());
  }
}

CuspProfile read_profile_keys(Keys& keys) {
  const auto gammas = keys.list("gammas");
  return profile_from("gammas", gammas, keys.integer_or("n", 0));
}

std::string join_gammas(const std::vector<double>& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) out += (i ? ";" : "") + format_double(g[i]);
  return out;
}

// A rendered report: JSON body plus the same content as CSV rows.
struct Report {
  Json body = Json::object();
  std::vector<std::string> columns;
  Json rows = Json::array();
  std::string column_doc;
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return cell(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kBoundColumns = {
    "variant", "status", "n", "gammas", "p", "q", "r", "a", "a_lo", "a_hi", "a_on_boundary",
    "extrapolated", "radicand", "k_pq", "m_rp", "m_rp_shortcut", "b_rq", "mu_lower"};

Json bound_row(const BoundReport& rep) {
  Json r;
  r["variant"] = to_string(rep.variant);
  r["status"] = to_string(rep.status);
  r["n"] = rep.profile.dimension();
  r["gammas"] = join_gammas(rep.profile.gammas());
  r["p"] = number(rep.exponents.p);
  r["q"] = number(rep.exponents.q);
  r["r"] = number(rep.exponents.r);
  r["a"] = number(rep.a_star);
  r["a_lo"] = number(rep.a_lo);
  r["a_hi"] = number(rep.a_hi);
  r["a_on_boundary"] = rep.a_on_boundary;
  r["extrapolated"] = rep.extrapolated;
  r["radicand"] = number(rep.radicand);
  r["k_pq"] = number(rep.k_pq);
  r["m_rp"] = number(rep.m_rp);
  r["m_rp_shortcut"] = number(rep.m_rp_shortcut);
  r["b_rq"] = number(rep.b_rq);
  r["mu_lower"] = number(rep.mu_lower);
  return r;
}

Report do_bound(Keys& keys) {
  const CuspProfile profile = read_profile_keys(keys);
  const double p = keys.exponent("p");
  SearchOpts opts;
  opts.q_points = keys.integer_or("q_points", opts.q_points);
  opts.r_points = keys.integer_or("r_points", opts.r_points);
  opts.refine_sweeps = keys.integer_or("refine_sweeps", opts.refine_sweeps);
  keys.reject_unknown();
  if (!(p < profile.gamma_total())) throw ConfigError("p", "must be below gamma_total = 1 + sum(gammas)");
  if (opts.q_points < 1 || opts.r_points < 1 || opts.refine_sweeps < 0) {
    throw ConfigError("q_points", "search grid sizes must be positive");
  }

  Report out;
  out.columns = kBoundColumns;
  out.column_doc = "one row per distortion variant; a is the optimizer";
  for (auto variant : {DistortionVariant::corrected, DistortionVariant::paper_simplified}) {
    const BoundReport rep = cusp_mu_lower(profile, p, opts, variant);
    out.body[variant == DistortionVariant::corrected ? "corrected" : "paper_simplified"] = to_json(rep);
    out.rows.push_back(bound_row(rep));
  }
  return out;
}

Report do_classical(Keys& keys) {
  const int n = keys.integer_or("n", 2);
  const double p = keys.exponent("p");
  const double d = keys.positive("diameter");
  const double vol = keys.positive("volume");
  keys.reject_unknown();
  if (n != 2 && n != 3) throw ConfigError("n", "supported dimensions are 2 and 3");
  const ClassicalBounds cb = classical_bounds(n, p, d, vol);
  Report out;
  out.body["classical"] = to_json(cb);
  out.columns = {"n", "p", "diameter", "volume", "ball_radius", "pw_lower", "ent_lower", "sw_upper"};
  out.column_doc = "pw_lower is defined for p = 2 only";
  Json row;
  for (const auto& [k, v] : out.body["classical"].items()) row[k] = v;
  out.rows.push_back(row);
  return out;
}

// ---------------------------------------------------------------------------

Report do_verify(Keys& keys) {
  const CuspProfile profile = read_profile_keys(keys);
  const auto as = keys.list("a");
  const auto ps = keys.list("p");
  const auto qs = keys.list("q");
  const auto rs = keys.list("r");
  QuadSpec spec;
  spec.nodes_1d = keys.integer_or("nodes_1d", spec.nodes_1d);
  spec.levels = keys.integer_or("levels", spec.levels);
  spec.tol = keys.number_or("tol", spec.tol);
  keys.reject_unknown();
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("levels", e.what());
  }
  for (double a : as)
    if (!(a > 0.0)) throw ConfigError("a", "entries must be positive");

  struct Tuple {
    double a, p, q, r;
  };
  std::vector<Tuple> tuples;
  for (double a : as)
    for (double p : ps)
      for (double q : qs)
        for (double r : rs) tuples.push_back({a, p, q, r});

  std::vector<Json> rows(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t i) {
    const auto [a, p, q, r] = tuples[i];
    const double nan = std::nan("");
    const double inf = std::numeric_limits<double>::infinity();
    Json row;
    row["a"] = a;
    row["gammas"] = join_gammas(profile.gammas());
    row["p"] = p;
    row["q"] = q;
    row["r"] = r;
    if (!(1.0 < q && q < p && p < r)) {
      for (const char* k : {"k_closed_corrected", "k_closed_paper", "k_numeric", "m_exact", "m_numeric"})
        row[k] = number(nan);
      row["status"] = "inadmissible";
      rows[i] = row;
      return;
    }
    bool precision = false;
    const auto guarded = [&](auto&& f) -> double {
      try {
        return f();
      } catch (const DivergenceError&) {
        return inf;
      } catch (const PrecisionError&) {
        precision = true;
        return nan;
      } catch (const InvalidInput&) {
        return nan;
      }
    };
    const CuspMap map(a, profile);
    const double kc = guarded([&] {
      return k_pq_closed(a, profile, p, q, DistortionVariant::corrected).value_or(nan);
    });
    const double kp = guarded([&] {
      return k_pq_closed(a, profile, p, q, DistortionVariant::paper_simplified).value_or(nan);
    });
    const double kn = guarded([&] { return k_pq_numeric(map, p, q, spec); });
    const double me = guarded([&] { return m_rp_exact(a, profile, r, p); });
    const double mn = guarded([&] { return m_rp_numeric(map, r, p, spec); });
    row["k_closed_corrected"] = number(kc);
    row["k_closed_paper"] = number(kp);
    row["k_numeric"] = number(kn);
    row["m_exact"] = number(me);
    row["m_numeric"] = number(mn);
    std::string status;
    if (precision) {
      status = "precision";
    } else if (std::isinf(kn) || std::isinf(mn)) {
      status = "divergent";
    } else if (kn <= kc * (1.0 + 1e-6) && std::abs(mn - me) <= 1e-7 * me) {
      status = "ok";
    } else {
      status = "mismatch";
    }
    row["status"] = status;
    rows[i] = row;
  });

  Report out;
  out.columns = {"a", "gammas", "p", "q", "r", "k_closed_corrected", "k_closed_paper",
                 "k_numeric", "m_exact", "m_numeric", "status"};
  out.column_doc = "rows in order a, p, q, r; status ok means k_numeric <= k_closed_corrected and m_numeric = m_exact";
  for (auto& r : rows) out.rows.push_back(std::move(r));
  out.body["rows"] = out.rows;
  return out;
}

// ---------------------------------------------------------------------------

struct Domain {
  std::string kind;
  fem::TriMesh mesh;
  double diameter = 0.0;   // of the continuous domain
  std::optional<CuspProfile> cusp;
};

Domain read_domain(Keys& keys, const std::string& fallback) {
  Domain d;
  d.kind = keys.text_or("domain", fallback);
  const double h = keys.positive("h");
  if (!(h < 0.5)) throw ConfigError("h", "must be below 0.5");
  if (d.kind == "square") {
    d.mesh = fem::mesh_rectangle(1.0, 1.0, h);
    d.diameter = std::sqrt(2.0);
  } else if (d.kind == "rectangle") {
    const double w = keys.number_or("width", 2.0);
    const double t = keys.number_or("height", 1.0);
    if (!(w > 0.0 && t > 0.0)) throw ConfigError("width", "rectangle sides must be positive");
    d.mesh = fem::mesh_rectangle(w, t, h);
    d.diameter = std::hypot(w, t);
  } else if (d.kind == "disc") {
    const double rad = keys.number_or("radius", 1.0);
    if (!(rad > 0.0)) throw ConfigError("radius", "must be positive");
    d.mesh = fem::mesh_disc(rad, h);
    d.diameter = 2.0 * rad;
  } else if (d.kind == "cusp") {
    const double g1 = keys.number("gamma1");
    if (!(g1 >= 1.0)) throw ConfigError("gamma1", "must be at least 1");
    const int levels = keys.integer_or("grading_levels", 12);
    if (levels < 1) throw ConfigError("grading_levels", "must be positive");
    d.mesh = fem::mesh_cusp_2d(g1, h, levels);
    d.cusp = CuspProfile(2, {g1});
  } else {
    throw ConfigError("domain", "expected square, rectangle, disc or cusp");
  }
  return d;
}

Report do_eig(Keys& keys, std::uint64_t seed) {
  Domain dom = read_domain(keys, "square");
  const double p = keys.has("p") ? keys.exponent("p") : 2.0;
  fem::RayleighOpts ro;
  ro.restarts = keys.integer_or("restarts", ro.restarts);
  ro.iters = keys.integer_or("iters", ro.iters);
  ro.seed = seed;
  keys.reject_unknown();
  if (ro.restarts < 0) throw ConfigError("restarts", "must be non-negative");
  if (ro.iters < 1) throw ConfigError("iters", "must be positive");

  const auto au = fem::audit(dom.mesh);
  if (!au.ok()) throw NumericalError("mesh audit failed: " + au.problem);
  const fem::NeumannEigen e2 = fem::mu2_fem(dom.mesh);
  const fem::RayleighResult rq = fem::mup_rayleigh(dom.mesh, p, ro);

  const double area = dom.mesh.area();
  const double upper = szego_weinberger_upper(2, area);
  double lower = std::nan("");
  std::string lower_kind = "none";
  if (dom.cusp) {
    if (p < dom.cusp->gamma_total()) {
      const BoundReport br = cusp_mu_lower(*dom.cusp, p);
      if (br.ok()) {
        lower = br.mu_lower;
        lower_kind = "cusp-corrected-extrapolated";
      }
    }
  } else {
    lower = ent_lower(dom.diameter, p);
    lower_kind = "convex-diameter";
  }
  std::string bracket = "not-applicable";
  if (!std::isnan(lower)) bracket = (lower <= rq.value && rq.value <= upper * 1.02) ? "ok" : "violated";

  Report out;
  Json mesh;
  mesh["domain"] = dom.kind;
  mesh["vertices"] = dom.mesh.vertices.size();
  mesh["triangles"] = dom.mesh.triangles.size();
  mesh["area"] = area;
  mesh["min_angle_deg"] = au.min_angle_deg;
  out.body["mesh"] = mesh;
  out.body["mu2_fem"] = {{"value", e2.value}, {"residual", number(e2.residual)}, {"dense", e2.dense}};
  out.body["mup_rayleigh"] = {{"p", p},
                              {"value", rq.value},
                              {"best_start", rq.best_start},
                              {"iterations", rq.iterations},
                              {"converged", rq.converged},
                              {"discretization", rq.discretization}};
  out.body["bracket"] = {{"lower", number(lower)},
                         {"lower_kind", lower_kind},
                         {"upper", upper},
                         {"upper_slack", 1.02},
                         {"status", bracket}};
  out.columns = {"domain", "vertices", "area", "p", "mu2_fem", "mup_rayleigh", "lower", "upper", "bracket"};
  out.column_doc = "upper is the equal-area disc value; bracket ok means lower <= mup_rayleigh <= 1.02 upper";
  out.rows.push_back({{"domain", dom.kind},
                      {"vertices", dom.mesh.vertices.size()},
                      {"area", area},
                      {"p", p},
                      {"mu2_fem", e2.value},
                      {"mup_rayleigh", rq.value},
                      {"lower", number(lower)},
                      {"upper", upper},
                      {"bracket", bracket}});
  return out;
}

// ---------------------------------------------------------------------------

// "rect:x0,y0,x1,y1;disc:cx,cy,r"
fem::Plate parse_plate(const std::string& key, const std::string& text) {
  fem::Plate plate;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw ConfigError(key, "expected rect:x0,y0,x1,y1 or disc:cx,cy,r");
    std::string kind = part.substr(0, colon);
    kind.erase(0, kind.find_first_not_of(" \t"));
    const auto v = parse_double_list(key, part.substr(colon + 1));
    if (kind == "rect" && v.size() == 4) {
      if (!(v[0] <= v[2] && v[1] <= v[3])) throw ConfigError(key, "rectangle corners out of order");
      plate.rects.push_back({{v[0], v[1]}, {v[2], v[3]}});
    } else if (kind == "disc" && v.size() == 3) {
      if (!(v[2] >= 0.0)) throw ConfigError(key, "disc radius must be non-negative");
      plate.discs.push_back({{v[0], v[1]}, v[2]});
    } else {
      throw ConfigError(key, "expected rect:x0,y0,x1,y1 or disc:cx,cy,r");
    }
  }
  if (plate.empty()) throw ConfigError(key, "empty plate");
  return plate;
}

Report do_capacity(Keys& keys) {
  const std::string domain = keys.text_or("domain", "annulus");
  Report out;
  if (domain == "annulus") {
    const double inner = keys.number_or("inner", 1.0);
    const double outer = keys.number_or("outer", 2.0);
    const double h = keys.positive("h");
    const double p = keys.exponent("p");
    keys.reject_unknown();
    if (!(inner > 0.0 && outer > inner)) throw ConfigError("outer", "need 0 < inner < outer");
    const fem::TriMesh mesh = fem::mesh_annulus(inner, outer, h);
    fem::Pins pins(mesh.vertices.size(), -1);
    for (std::size_t i = 0; i < pins.size(); ++i) {
      const double rad = mesh.vertices[i].norm();
      if (rad <= inner * (1.0 + 1e-9)) pins[i] = 0;
      if (rad >= outer * (1.0 - 1e-9)) pins[i] = 1;
    }
    const fem::CapacityResult c = fem::capacity_p(mesh, pins, p);
    const double exact = fem::annulus_capacity(inner, outer, p);
    out.body["capacity"] = {{"domain", "annulus"},
                            {"p", p},
                            {"vertices", mesh.vertices.size()},
                            {"value", c.value},
                            {"radial", exact},
                            {"relative_error", std::abs(c.value - exact) / exact},
                            {"gradient_norm", c.gradient_norm},
                            {"newton_steps", c.newton_steps}};
    out.body["transfer"] = nullptr;
    out.columns = {"domain", "p", "vertices", "value", "radial", "relative_error"};
    out.column_doc = "radial is the closed-form capacity of the round annulus";
    out.rows.push_back({{"domain", "annulus"},
                        {"p", p},
                        {"vertices", mesh.vertices.size()},
                        {"value", c.value},
                        {"radial", exact},
                        {"relative_error", std::abs(c.value - exact) / exact}});
    return out;
  }
  if (domain != "cusp") throw ConfigError("domain", "expected annulus or cusp");
  const CuspProfile profile = read_profile_keys(keys);
  if (profile.dimension() != 2) throw ConfigError("gammas", "capacity transfer is planar: give one exponent");
  const double a = keys.positive("a");
  const double p = keys.exponent("p");
  const double h = keys.positive("h");
  if (!(h < 0.5)) throw ConfigError("h", "must be below 0.5");
  const int levels = keys.integer_or("grading_levels", 12);
  const double tol = keys.number_or("mesh_tol", 0.02);
  fem::CondenserSpec cond;
  cond.plate0 = parse_plate("plate0", keys.text_or("plate0", "rect:0,0.9,1,1"));
  cond.plate1 = parse_plate("plate1", keys.text_or("plate1", "rect:0,0,1,0.5"));
  keys.reject_unknown();
  if (levels < 1) throw ConfigError("grading_levels", "must be positive");
  if (!std::isfinite(fem::transfer_distortion(profile, a, p))) {
    throw ConfigError("a", "distortion K is infinite: need p(a-1) >= a gamma - 2");
  }

  const fem::TransferReport rep = fem::capacity_transfer_check(profile, a, p, cond, h, levels, tol);
  out.body["capacity"] = {{"domain", "cusp"}, {"p", p}, {"value", rep.cap_original}};
  out.body["transfer"] = to_json(rep);
  out.columns = {"gammas", "a", "p", "h", "k", "cap_pullback", "cap_original", "ratio", "pass"};
  out.column_doc = "ratio = (cap_pullback / cap_original)^(1/p); pass means ratio <= k (1 + mesh_tol)";
  out.rows.push_back({{"gammas", join_gammas(profile.gammas())},
                      {"a", a},
                      {"p", p},
                      {"h", h},
                      {"k", number(rep.k)},
                      {"cap_pullback", rep.cap_pullback},
                      {"cap_original", rep.cap_original},
                      {"ratio", rep.ratio},
                      {"pass", rep.pass}});
  return out;
}

// ---------------------------------------------------------------------------

Report do_sweep(Keys& keys) {
  // Profiles separated by ';', exponents within a profile by ','.
  std::vector<CuspProfile> profiles;
  {
    std::stringstream ss(keys.text("gammas"));
    std::string one;
    while (std::getline(ss, one, ';')) profiles.push_back(profile_from("gammas", parse_double_list("gammas", one), 0));
    if (profiles.empty()) throw ConfigError("gammas", "empty list");
  }
  const auto ps = keys.list("p");
  const auto qs = keys.list("q");
  const auto rs = keys.list("r");
  std::vector<double> as;
  if (keys.has("a")) as = keys.list("a");
  keys.reject_unknown();
  const bool optimize = as.empty();
  if (optimize) as.push_back(std::nan(""));

  struct Job {
    const CuspProfile* profile;
    double p, q, r, a;
    DistortionVariant variant;
  };
  std::vector<Job> jobs;
  for (const auto& prof : profiles)
    for (double p : ps)
      for (double q : qs)
        for (double r : rs)
          for (double a : as)
            for (auto v : {DistortionVariant::corrected, DistortionVariant::paper_simplified})
              jobs.push_back({&prof, p, q, r, a, v});

  std::vector<Json> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const ExponentConfig e{job.p, job.q, job.r};
    BoundReport rep{*job.profile};
    rep.exponents = e;
    rep.variant = job.variant;
    rep.a_star = job.a;
    rep.radicand = rep.k_pq = rep.m_rp = rep.m_rp_shortcut = rep.b_rq = rep.mu_lower = std::nan("");
    rep.a_lo = rep.a_hi = std::nan("");
    std::string status;
    try {
      rep = optimize ? bound_for_exponents(*job.profile, e, job.variant)
                     : bound_at(*job.profile, e, job.a, job.variant);
      status = to_string(rep.status);
    } catch (const InvalidInput&) {
      status = "inadmissible";
    } catch (const DivergenceError&) {
      status = "divergent";
    }
    Json row = bound_row(rep);
    row["status"] = status;
    rows[i] = std::move(row);
  });

  Report out;
  out.columns = kBoundColumns;
  out.column_doc = optimize ? "rows in order gammas, p, q, r, variant; a optimized per row"
                            : "rows in order gammas, p, q, r, a, variant";
  for (auto& r : rows) out.rows.push_back(std::move(r));
  out.body["rows"] = out.rows;
  return out;
}

Report dispatch(Command command, Keys& keys, std::uint64_t seed) {
  switch (command) {
    case Command::bound: return do_bound(keys);
    case Command::classical: return do_classical(keys);
    case Command::verify_constants: return do_verify(keys);
    case Command::eig: return do_eig(keys, seed);
    case Command::capacity: return do_capacity(keys);
    case Command::sweep: return do_sweep(keys);
  }
  throw InvalidInput("unknown command");
}

}  // namespace

std::string render(Command command, Format format, const KeyValues& kv, std::uint64_t seed) {
  Keys keys(kv, command);
  const Report rep = dispatch(command, keys, seed);

  if (format == Format::json) {
    Json doc;
    doc["version"] = kVersion;
    doc["command"] = to_string(command);
    doc["seed"] = seed;
    Json input = Json::object();
    for (const auto& [k, v] : kv) input[k] = v;
    doc["input"] = input;
    for (const auto& [k, v] : rep.body.items()) doc[k] = v;
    return doc.dump(2) + "\n";
  }

  CsvTable table(rep.columns);
  table.add_comment(std::string(kVersion) + " command=" + to_string(command) + " seed=" + std::to_string(seed));
  for (const auto& [k, v] : kv) table.add_comment("input " + k + " = " + v);
  table.add_comment("columns: " + rep.column_doc);
  for (const auto& row : rep.rows) {
    std::vector<std::string> cells;
    for (const auto& c : rep.columns) cells.push_back(row.contains(c) ? csv_cell(row[c]) : "");
    table.add_row(std::move(cells));
  }
  return table.str();
}

int run(const RunConfig& config, std::ostream& err) {
  try {
    KeyValues kv;
    if (!config.input.empty()) {
      std::ifstream in(config.input);
      if (!in) throw ConfigError("--config", "cannot read '" + config.input + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      kv = parse_key_values(buf.str());
    }
    for (const auto& [k, v] : config.overrides) kv[k] = v;

    const std::string text = render(config.command, config.format, kv, config.seed);
    if (config.output.empty() || config.output == "-") {
      std::cout << text;
    } else {
      std::ofstream out(config.output, std::ios::binary);
      if (!out) throw ConfigError("--out", "cannot write '" + config.output + "'");
      out << text;
      if (!out) throw ConfigError("--out", "write failed for '" + config.output + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace nb
