#include "nbound/core.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nbound/errors.hpp"

namespace nb {

CuspProfile::CuspProfile(int n, std::vector<double> gammas) : n_(n), gammas_(std::move(gammas)) {
  if (n_ < 2) throw InvalidInput("cusp profile: dimension must be at least 2");
  if (static_cast<int>(gammas_.size()) != n_ - 1) {
    throw InvalidInput("cusp profile: expected " + std::to_string(n_ - 1) + " exponents, got " +
                       std::to_string(gammas_.size()));
  }
  for (double g : gammas_) {
    if (!std::isfinite(g) || g < 1.0) {
      throw InvalidInput("cusp profile: exponents must be >= 1 (got " + format_double(g) + ")");
    }
  }
  gamma_total_ = 1.0 + std::accumulate(gammas_.begin(), gammas_.end(), 0.0);
}

double CuspProfile::gamma_square_sum() const noexcept {
  double s = 0.0;
  for (double g : gammas_) s += g * g;
  return s;
}

bool CuspProfile::is_reference() const noexcept {
  for (double g : gammas_)
    if (g != 1.0) return false;
  return true;
}

CuspProfile cusp_profile_new(int n, std::vector<double> gammas) {
  return CuspProfile(n, std::move(gammas));
}

bool ExponentConfig::admissible_for(const CuspProfile& profile) const noexcept {
  return ordered() && p < profile.gamma_total();
}

bool ExponentConfig::sobolev_range(int n) const noexcept {
  if (r < q) return false;
  if (q >= n) return true;
  return r < n * q / (n - q);
}

bool ExponentConfig::poincare_finite(int n) const noexcept {
  const double d = delta();
  return d >= 0.0 && d < 1.0 / n;
}

double AInterval::clamp(double a) const noexcept {
  if (a < lo) return lo;
  if (a > hi) return hi;
  return a;
}

AInterval admissible_a_interval(const CuspProfile& profile, double p, double q) {
  const double n = profile.dimension();
  const double g = profile.gamma_total();
  if (!(1.0 < q && q < p)) throw InvalidInput("admissible interval: need 1 < q < p");
  if (!(p < g)) throw InvalidInput("admissible interval: need p < gamma_total (gamma - p > 0)");
  AInterval iv{};
  iv.lo = std::max((n - p) / (g - p), p * (n - q) / (g * q));
  iv.hi = p * (n - q) / (q * (g - p));
  iv.nonempty = iv.lo < iv.hi;
  return iv;
}

double h1_volume(int n) {
  if (n < 2) throw InvalidInput("h1_volume: n must be at least 2");
  return 1.0 / n;
}

double unit_ball_volume(int n) {
  if (n < 1) throw InvalidInput("unit_ball_volume: n must be positive");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(key, "duplicate key on line " + std::to_string(line_no));
    }
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key, "not a number: '" + t + "'");
  }
  return x;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> xs;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) xs.push_back(parse_double(key, item));
  if (xs.empty()) throw ConfigError(key, "empty list");
  return xs;
}

std::string format_double_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

namespace {

const std::string& require(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

}  // namespace

void write_profile(KeyValues& kv, const CuspProfile& profile) {
  kv["n"] = std::to_string(profile.dimension());
  kv["gammas"] = format_double_list(profile.gammas());
}

CuspProfile read_profile(const KeyValues& kv) {
  const double n = parse_double("n", require(kv, "n"));
  if (n != std::floor(n)) throw ConfigError("n", "dimension must be an integer");
  auto gammas = parse_double_list("gammas", require(kv, "gammas"));
  try {
    return CuspProfile(static_cast<int>(n), std::move(gammas));
  } catch (const InvalidInput& e) {
    throw ConfigError("gammas", e.what());
  }
}

void write_exponents(KeyValues& kv, const ExponentConfig& exponents) {
  kv["p"] = format_double(exponents.p);
  kv["q"] = format_double(exponents.q);
  kv["r"] = format_double(exponents.r);
}

ExponentConfig read_exponents(const KeyValues& kv) {
  ExponentConfig e{};
  e.p = parse_double("p", require(kv, "p"));
  e.q = parse_double("q", require(kv, "q"));
  e.r = parse_double("r", require(kv, "r"));
  if (!(e.p > 1.0)) throw ConfigError("p", "must exceed 1");
  if (!(e.q > 1.0)) throw ConfigError("q", "must exceed 1");
  if (!(e.r >= e.q)) throw ConfigError("r", "must be at least q");
  return e;
}

}  // namespace nb
