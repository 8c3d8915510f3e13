#pragma once

#include <map>
#include <string>
#include <vector>

namespace nb {

/// Power-law cusp H_g = {0 < x_n < 1, 0 < x_i < x_n^{gamma_i}} in R^n.
///
/// gamma_total is the effective exponent 1 + sum(gamma_i); it equals n exactly
/// for the Lipschitz reference domain H_1 (all gamma_i = 1).
class CuspProfile {
 public:
  /// Throws InvalidInput when n < 2, gammas.size() != n - 1 or any gamma_i < 1.
  CuspProfile(int n, std::vector<double> gammas);

  int dimension() const noexcept { return n_; }
  const std::vector<double>& gammas() const noexcept { return gammas_; }
  double gamma_total() const noexcept { return gamma_total_; }
  double gamma_sum() const noexcept { return gamma_total_ - 1.0; }
  double gamma_square_sum() const noexcept;
  bool is_reference() const noexcept;

  bool operator==(const CuspProfile&) const = default;

 private:
  int n_;
  std::vector<double> gammas_;
  double gamma_total_;
};

CuspProfile cusp_profile_new(int n, std::vector<double> gammas);

/// Sobolev exponents (p, q, r) of the transfer argument.
struct ExponentConfig {
  double p;
  double q;
  double r;

  double delta() const noexcept { return 1.0 / q - 1.0 / r; }

  /// 1 < q < p.
  bool ordered() const noexcept { return 1.0 < q && q < p; }
  /// 1 < q < p < gamma_total of the profile.
  bool admissible_for(const CuspProfile& profile) const noexcept;
  /// q <= r < nq/(n-q) (no upper limit when q >= n).
  bool sobolev_range(int n) const noexcept;
  /// 0 <= delta < 1/n, where the H_1 Poincare bound is finite.
  bool poincare_finite(int n) const noexcept;
};

/// Parameter interval for the map exponent a, stored by endpoint value.
struct AInterval {
  double lo;
  double hi;
  bool nonempty;

  bool contains(double a) const noexcept { return nonempty && lo < a && a < hi; }
  double clamp(double a) const noexcept;
};

/// I_a = (max{(n-p)/(gamma-p), p(n-q)/(gamma q)}, p(n-q)/(q(gamma-p))).
/// Requires 1 < q < p < gamma_total; throws InvalidInput otherwise.
AInterval admissible_a_interval(const CuspProfile& profile, double p, double q);

/// Volume of H_1, i.e. 1/n.
double h1_volume(int n);

/// Volume of the unit n-ball.
double unit_ball_volume(int n);

// Flat key-value configuration (`key = value`, '#' comments).
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
std::string format_key_values(const KeyValues& kv);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double x);
double parse_double(const std::string& key, const std::string& text);
std::vector<double> parse_double_list(const std::string& key, const std::string& text);
std::string format_double_list(const std::vector<double>& xs);

void write_profile(KeyValues& kv, const CuspProfile& profile);
CuspProfile read_profile(const KeyValues& kv);
void write_exponents(KeyValues& kv, const ExponentConfig& exponents);
ExponentConfig read_exponents(const KeyValues& kv);

}  // namespace nb
