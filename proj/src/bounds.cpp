#include "nbound/bounds.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "nbound/errors.hpp"
#include "nbound/special.hpp"

namespace nb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_p(double p, const char* who) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput(std::string(who) + ": p must exceed 1");
}

}  // namespace

double pi_p(double p) {
  require_p(p, "pi_p");
  const double pi = std::numbers::pi;
  if (p == 2.0) return pi;
  return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p));
}

double ent_lower(double d, double p) {
  if (!(d > 0.0)) throw InvalidInput("ent_lower: diameter must be positive");
  return std::pow(pi_p(p) / d, p);
}

double payne_weinberger_lower(double d) {
  if (!(d > 0.0)) throw InvalidInput("payne_weinberger_lower: diameter must be positive");
  return ent_lower(d, 2.0);
}

double szego_weinberger_upper(int n, double volume) {
  if (n != 2 && n != 3) throw InvalidInput("szego_weinberger_upper: only n = 2 and n = 3 supported");
  if (!(volume > 0.0)) throw InvalidInput("szego_weinberger_upper: volume must be positive");
  const double radius = std::pow(volume / unit_ball_volume(n), 1.0 / n);
  const double freq = ball_neumann_frequency(n);
  return freq * freq / (radius * radius);
}

ClassicalBounds classical_bounds(int n, double p, double diameter, double volume) {
  ClassicalBounds cb{};
  cb.n = n;
  cb.p = p;
  cb.diameter = diameter;
  cb.volume = volume;
  cb.ball_radius = std::pow(volume / unit_ball_volume(n), 1.0 / n);
  cb.pw_lower = payne_weinberger_lower(diameter);
  cb.ent_lower = ent_lower(diameter, p);
  cb.sw_upper = szego_weinberger_upper(n, volume);
  return cb;
}

std::optional<double> k_pq_radical(double a, const CuspProfile& profile, double p,
                                   DistortionVariant variant) {
  require_p(p, "k_pq_radical");
  if (!(a > 0.0)) throw InvalidInput("k_pq_radical: a must be positive");
  const double rad = distortion_radicand(a, profile, variant);
  if (rad < 0.0) return std::nullopt;
  return std::pow(a, -1.0 / p) * std::sqrt(rad);
}

double k_tail_factor(double a, const CuspProfile& profile, double p, double q) {
  if (!(1.0 < q && q < p)) throw InvalidInput("k_tail_factor: need 1 < q < p");
  const double n = profile.dimension();
  const double g = profile.gamma_total();
  const double e = (p * (a - 1.0) - (a * g - n)) * q / (p - q) + n;
  if (!(e > 0.0)) throw DivergenceError("K_{p,q}: distortion integral diverges for this a");
  return std::pow(1.0 / e, (p - q) / (p * q));
}

std::optional<double> k_pq_closed(double a, const CuspProfile& profile, double p, double q,
                                  DistortionVariant variant) {
  const double tail = k_tail_factor(a, profile, p, q);
  const auto k = k_pq_radical(a, profile, p, variant);
  if (!k) return std::nullopt;
  if (variant == DistortionVariant::paper_simplified) return *k;
  return *k * std::max(1.0, tail);
}

double m_rp_exact(double a, const CuspProfile& profile, double r, double p) {
  require_p(p, "m_rp_exact");
  if (!(r > p)) throw InvalidInput("m_rp_exact: need r > p");
  if (!(a > 0.0)) throw InvalidInput("m_rp_exact: a must be positive");
  const double n = profile.dimension();
  const double beta = (a * profile.gamma_total() - n) * r / (r - p) + n - 1.0;
  if (!(beta > -1.0)) throw DivergenceError("M_{r,p}: Jacobian integral diverges (a <= np/(gamma r))");
  return std::pow(a, 1.0 / p) * std::pow(1.0 / (beta + 1.0), (r - p) / (r * p));
}

double m_rp_shortcut(double a, double p) {
  require_p(p, "m_rp_shortcut");
  return std::pow(a, 1.0 / p);
}

double b_rq_h1(int n, double q, double r) {
  if (n < 2) throw InvalidInput("b_rq_h1: n must be at least 2");
  if (!(q > 1.0) || !(r >= q)) throw InvalidInput("b_rq_h1: need 1 < q <= r");
  const double delta = 1.0 / q - 1.0 / r;
  const double inv_n = 1.0 / n;
  if (!(delta < inv_n)) throw DivergenceError("B_{r,q}(H_1): bound is infinite for delta >= 1/n");
  double factorial = 1.0;
  for (int k = 2; k <= n + 1; ++k) factorial *= k;
  return n * std::pow((1.0 - delta) / (inv_n - delta), 1.0 - delta) *
         std::pow(unit_ball_volume(n), 1.0 - inv_n) * std::pow(1.0 / factorial, inv_n - delta);
}

double composite_mu_lower(double k, double m, double b, double p) {
  return std::pow(k * m * b, -p);
}

const char* to_string(BoundStatus s) noexcept {
  switch (s) {
    case BoundStatus::ok:
      return "ok";
    case BoundStatus::no_admissible_interval:
      return "no-admissible-interval";
    case BoundStatus::invalid_variant:
      return "invalid-variant";
  }
  return "unknown";
}

AInterval effective_a_interval(const CuspProfile& profile, double p, double q, double r) {
  AInterval iv = admissible_a_interval(profile, p, q);
  const double m_cut = profile.dimension() * p / (profile.gamma_total() * r);
  iv.lo = std::max(iv.lo, m_cut);
  iv.nonempty = iv.lo < iv.hi;
  return iv;
}

double clamped_radicand_vertex(const CuspProfile& profile, const AInterval& iv, bool& on_boundary) {
  const double vertex = profile.gamma_sum() / (profile.gamma_square_sum() + 1.0);
  const double a = iv.clamp(vertex);
  on_boundary = a != vertex;
  return a;
}

namespace {

void require_exponents(const CuspProfile& profile, const ExponentConfig& e) {
  if (!e.admissible_for(profile)) throw InvalidInput("bound: need 1 < q < p < gamma_total");
  if (!(e.r > e.p)) throw InvalidInput("bound: need r > p");
}

BoundReport empty_report(const CuspProfile& profile, const ExponentConfig& exps,
                         DistortionVariant variant) {
  BoundReport rep{profile};
  rep.exponents = exps;
  rep.variant = variant;
  rep.extrapolated = profile.dimension() == 2;
  return rep;
}

double m_exact_or_inf(double a, const CuspProfile& profile, double r, double p) {
  try {
    return m_rp_exact(a, profile, r, p);
  } catch (const DivergenceError&) {
    return kInf;
  }
}

// log(K M) for the corrected variant, +inf where either factor diverges.
double corrected_log_objective(double a, const CuspProfile& profile, const ExponentConfig& e) {
  try {
    const auto k = k_pq_closed(a, profile, e.p, e.q, DistortionVariant::corrected);
    return std::log(*k) + std::log(m_rp_exact(a, profile, e.r, e.p));
  } catch (const DivergenceError&) {
    return kInf;
  }
}

}  // namespace

BoundReport bound_at(const CuspProfile& profile, const ExponentConfig& exps, double a,
                     DistortionVariant variant) {
  require_exponents(profile, exps);
  BoundReport rep = empty_report(profile, exps, variant);
  const AInterval iv = effective_a_interval(profile, exps.p, exps.q, exps.r);
  rep.a_lo = iv.lo;
  rep.a_hi = iv.hi;
  rep.a_star = a;
  rep.a_on_boundary = a <= iv.lo || a >= iv.hi;
  rep.radicand = distortion_radicand(a, profile, variant);
  rep.b_rq = b_rq_h1(profile.dimension(), exps.q, exps.r);
  rep.m_rp_shortcut = m_rp_shortcut(a, exps.p);
  rep.m_rp = m_exact_or_inf(a, profile, exps.r, exps.p);
  const auto k = k_pq_closed(a, profile, exps.p, exps.q, variant);
  if (!k) {
    rep.status = BoundStatus::invalid_variant;
    return rep;
  }
  rep.k_pq = *k;
  if (!std::isfinite(rep.m_rp)) {
    throw DivergenceError("M_{r,p}: Jacobian integral diverges (a <= np/(gamma r))");
  }
  rep.mu_lower = composite_mu_lower(rep.k_pq, rep.m_rp, rep.b_rq, exps.p);
  rep.status = BoundStatus::ok;
  return rep;
}

BoundReport bound_for_exponents(const CuspProfile& profile, const ExponentConfig& exps,
                                DistortionVariant variant) {
  require_exponents(profile, exps);
  const AInterval iv = effective_a_interval(profile, exps.p, exps.q, exps.r);
  if (!iv.nonempty) {
    BoundReport rep = empty_report(profile, exps, variant);
    rep.a_lo = iv.lo;
    rep.a_hi = iv.hi;
    return rep;
  }

  if (variant == DistortionVariant::paper_simplified) {
    bool on_boundary = false;
    const double a = clamped_radicand_vertex(profile, iv, on_boundary);
    BoundReport rep = bound_at(profile, exps, a, variant);
    rep.a_on_boundary = on_boundary;
    return rep;
  }

  // Corrected variant: minimize K(a) M(a) over the interval. A coarse scan picks
  // the basin, Brent polishes it; the finite lower endpoint is checked separately.
  constexpr int kScan = 64;
  const double width = iv.hi - iv.lo;
  int best = -1;
  double best_val = kInf;
  for (int i = 0; i < kScan; ++i) {
    const double a = iv.lo + width * (i + 0.5) / kScan;
    const double v = corrected_log_objective(a, profile, exps);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < 0) {
    BoundReport rep = empty_report(profile, exps, variant);
    rep.a_lo = iv.lo;
    rep.a_hi = iv.hi;
    return rep;
  }
  const double left = iv.lo + width * std::max(best - 0.5, 0.0) / kScan;
  const double right = iv.lo + width * std::min(best + 1.5, double(kScan)) / kScan;
  const auto f = [&](double a) { return corrected_log_objective(a, profile, exps); };
  auto [a_best, v_best] = boost::math::tools::brent_find_minima(f, left, right, 40);
  bool on_boundary = false;
  const double v_lo = f(iv.lo);
  if (v_lo <= v_best) {
    a_best = iv.lo;
    on_boundary = true;
  }
  BoundReport rep = bound_at(profile, exps, a_best, variant);
  rep.a_on_boundary = on_boundary;
  return rep;
}

namespace {

struct Candidate {
  double q;
  double t;
  BoundReport report;
};

double r_from(double q, double t, double p, int n) {
  const double d_lo = 1.0 / q - 1.0 / p;
  const double d_hi = std::min(1.0 / n, 1.0 / q);
  return 1.0 / (1.0 / q - (d_lo + (d_hi - d_lo) * t));
}

bool r_range_nonempty(double q, double p, int n) {
  return 1.0 / q - 1.0 / p < std::min(1.0 / n, 1.0 / q);
}

std::optional<BoundReport> evaluate(const CuspProfile& profile, double p, double q, double t,
                                    DistortionVariant variant, bool* saw_invalid = nullptr) {
  const int n = profile.dimension();
  if (!(q > 1.0 && q < p) || !(t > 0.0 && t < 1.0) || !r_range_nonempty(q, p, n)) {
    return std::nullopt;
  }
  ExponentConfig e{p, q, r_from(q, t, p, n)};
  if (!std::isfinite(e.r) || !(e.r > p)) return std::nullopt;
  try {
    BoundReport rep = bound_for_exponents(profile, e, variant);
    if (saw_invalid && rep.status == BoundStatus::invalid_variant) *saw_invalid = true;
    if (!rep.ok() || !(rep.mu_lower > 0.0) || !std::isfinite(rep.mu_lower)) return std::nullopt;
    return rep;
  } catch (const DivergenceError&) {
    return std::nullopt;
  }
}

}  // namespace

BoundReport cusp_mu_lower(const CuspProfile& profile, double p, const SearchOpts& opts,
                          DistortionVariant variant) {
  require_p(p, "cusp_mu_lower");
  if (!(p < profile.gamma_total())) throw InvalidInput("cusp_mu_lower: need p < gamma_total");
  if (opts.q_points < 1 || opts.r_points < 1) throw InvalidInput("cusp_mu_lower: empty search grid");

  const auto q_at = [&](int i) {
    if (i < 0) return 1.0;
    if (i >= opts.q_points) return p;
    return std::pow(p, (i + 1.0) / (opts.q_points + 1.0));
  };
  const auto t_at = [&](int j) {
    if (j < 0) return 0.0;
    if (j >= opts.r_points) return 1.0;
    return (j + 1.0) / (opts.r_points + 1.0);
  };

  std::optional<Candidate> best;
  bool saw_invalid = false;
  int best_i = 0;
  int best_j = 0;
  // Strict improvement only: ties keep the smaller q, then the smaller r.
  for (int i = 0; i < opts.q_points; ++i) {
    for (int j = 0; j < opts.r_points; ++j) {
      auto rep = evaluate(profile, p, q_at(i), t_at(j), variant, &saw_invalid);
      if (rep && (!best || rep->mu_lower > best->report.mu_lower)) {
        best = Candidate{q_at(i), t_at(j), *rep};
        best_i = i;
        best_j = j;
      }
    }
  }
  if (!best) {
    BoundReport rep{profile};
    rep.exponents = ExponentConfig{p, 0.0, 0.0};
    rep.variant = variant;
    rep.extrapolated = profile.dimension() == 2;
    rep.status = saw_invalid ? BoundStatus::invalid_variant : BoundStatus::no_admissible_interval;
    return rep;
  }

  // Coordinate-wise Brent refinement inside the neighbouring cells.
  const double q_lo = q_at(best_i - 1), q_hi = q_at(best_i + 1);
  const double t_lo = t_at(best_j - 1), t_hi = t_at(best_j + 1);
  const auto neg_log_mu = [&](double q, double t) {
    auto rep = evaluate(profile, p, q, t, variant);
    return rep ? -std::log(rep->mu_lower) : kInf;
  };
  double q = best->q;
  double t = best->t;
  for (int sweep = 0; sweep < opts.refine_sweeps; ++sweep) {
    auto [qn, vq] = boost::math::tools::brent_find_minima(
        [&](double x) { return neg_log_mu(x, t); }, q_lo, q_hi, 40);
    if (vq < neg_log_mu(q, t)) q = qn;
    auto [tn, vt] = boost::math::tools::brent_find_minima(
        [&](double x) { return neg_log_mu(q, x); }, t_lo, t_hi, 40);
    if (vt < neg_log_mu(q, t)) t = tn;
  }
  auto refined = evaluate(profile, p, q, t, variant);
  if (refined && refined->mu_lower > best->report.mu_lower) return *refined;
  return best->report;
}

}  // namespace nb
