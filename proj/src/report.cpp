#include "nbound/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nb {

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string cell(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

Json to_json(const CuspProfile& profile) {
  Json j;
  j["n"] = profile.dimension();
  j["gammas"] = profile.gammas();
  j["gamma_total"] = profile.gamma_total();
  return j;
}

Json to_json(const BoundReport& rep) {
  Json j;
  j["variant"] = to_string(rep.variant);
  j["status"] = to_string(rep.status);
  j["profile"] = to_json(rep.profile);
  j["exponents"] = {{"p", rep.exponents.p}, {"q", rep.exponents.q}, {"r", number(rep.exponents.r)}};
  j["extrapolated"] = rep.extrapolated;
  j["a_star"] = number(rep.a_star);
  j["a_interval"] = {number(rep.a_lo), number(rep.a_hi)};
  j["a_on_boundary"] = rep.a_on_boundary;
  j["radicand"] = number(rep.radicand);
  j["k_pq"] = number(rep.k_pq);
  j["m_rp"] = number(rep.m_rp);
  j["m_rp_shortcut"] = number(rep.m_rp_shortcut);
  j["b_rq"] = number(rep.b_rq);
  j["mu_lower"] = number(rep.mu_lower);
  return j;
}

Json to_json(const ClassicalBounds& cb) {
  Json j;
  j["n"] = cb.n;
  j["p"] = cb.p;
  j["diameter"] = number(cb.diameter);
  j["volume"] = number(cb.volume);
  j["ball_radius"] = number(cb.ball_radius);
  j["pw_lower"] = number(cb.pw_lower);
  j["ent_lower"] = number(cb.ent_lower);
  j["sw_upper"] = number(cb.sw_upper);
  return j;
}

Json to_json(const fem::TransferReport& rep) {
  Json j;
  j["a"] = rep.a;
  j["p"] = rep.p;
  j["h"] = rep.h;
  j["k"] = number(rep.k);
  j["cap_pullback"] = number(rep.cap_pullback);
  j["cap_original"] = number(rep.cap_original);
  j["ratio"] = number(rep.ratio);
  j["mesh_tol"] = rep.mesh_tol;
  j["pass"] = rep.pass;
  return j;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_comment(const std::string& line) { comments_.push_back(line); }

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("CsvTable: row width differs from header");
  rows_.push_back(std::move(cells));
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void join(std::ostringstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << quoted(cells[i]);
  }
  out << '\n';
}

}  // namespace

std::string CsvTable::str() const {
  std::ostringstream out;
  for (const auto& c : comments_) out << "# " << c << '\n';
  join(out, columns_);
  for (const auto& r : rows_) join(out, r);
  return out.str();
}

}  // namespace nb
