#pragma once

// Check reports and their JSON / CSV / table renderings.
//
// CSV columns (fixed order):
//   id, params, computed_re, computed_im, expected_re, expected_im,
//   abs_error, tol, pass, quad_sizes, runtime_ms
// params is rendered as "name=value;name=value", quad_sizes as "N1xN2x...".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "leray/types.hpp"

namespace leray {

inline constexpr const char* report_version = "1.0.0";

struct CheckReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;
  cplx computed{};
  cplx expected{};
  double abs_error = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<int> quad_sizes;
  double runtime_ms = 0.0;

  CheckReport& param(std::string name, std::string value) {
    params.emplace_back(std::move(name), std::move(value));
    return *this;
  }
  CheckReport& param(std::string name, double value) { return param(std::move(name), format_number(value)); }
  CheckReport& param(std::string name, cplx value) { return param(std::move(name), format_complex(value)); }

  const std::string* find_param(const std::string& name) const {
    for (const auto& [k, v] : params)
      if (k == name) return &v;
    return nullptr;
  }

  static std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static std::string format_complex(cplx v) {
    return format_number(v.real()) + (std::signbit(v.imag()) ? "-" : "+") + format_number(std::abs(v.imag())) + "i";
  }
};

/// pass <=> |computed - expected| <= tol.
inline CheckReport value_check(std::string id, cplx computed, cplx expected, double tol,
                               std::vector<int> quad_sizes = {}) {
  CheckReport r;
  r.id = std::move(id);
  r.computed = computed;
  r.expected = expected;
  r.abs_error = std::abs(computed - expected);
  r.tol = tol;
  r.pass = std::isfinite(r.abs_error) && r.abs_error <= tol;
  r.quad_sizes = std::move(quad_sizes);
  return r;
}

/// Predicate "measured < bound" (or "measured > bound" when `above`).
/// expected and tol both carry the bound; the predicate text goes to params.
inline CheckReport bound_check(std::string id, double measured, double bound, bool above,
                               const std::string& predicate) {
  CheckReport r;
  r.id = std::move(id);
  r.computed = measured;
  r.expected = bound;
  r.abs_error = above ? std::max(0.0, bound - measured) : measured;
  r.tol = bound;
  r.pass = std::isfinite(measured) && (above ? measured > bound : measured < bound);
  r.param("predicate", predicate);
  return r;
}

/// Measures wall time of a report-producing callable into runtime_ms.
template <typename Fn>
CheckReport timed(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  CheckReport r = fn();
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline bool all_pass(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const CheckReport& r) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  return nlohmann::ordered_json{
      {"id", r.id},
      {"params", params},
      {"computed_re", r.computed.real()},
      {"computed_im", r.computed.imag()},
      {"expected_re", r.expected.real()},
      {"expected_im", r.expected.imag()},
      {"abs_error", r.abs_error},
      {"tol", r.tol},
      {"pass", r.pass},
      {"quad_sizes", r.quad_sizes},
      {"runtime_ms", r.runtime_ms},
  };
}

inline nlohmann::ordered_json to_json(const std::vector<CheckReport>& reports, std::uint64_t seed) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& r : reports) checks.push_back(to_json(r));
  return nlohmann::ordered_json{
      {"version", report_version}, {"seed", seed}, {"all_pass", all_pass(reports)}, {"checks", checks}};
}

inline void write_json(std::ostream& os, const std::vector<CheckReport>& reports, std::uint64_t seed) {
  os << to_json(reports, seed).dump(2) << '\n';
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string joined_params(const CheckReport& r) {
  std::string s;
  for (const auto& [k, v] : r.params) s += (s.empty() ? "" : ";") + k + "=" + v;
  return s;
}

inline std::string joined_sizes(const CheckReport& r) {
  std::string s;
  for (int n : r.quad_sizes) s += (s.empty() ? "" : "x") + std::to_string(n);
  return s;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<CheckReport>& reports) {
  os << "id,params,computed_re,computed_im,expected_re,expected_im,abs_error,tol,pass,quad_sizes,runtime_ms\r\n";
  auto num = CheckReport::format_number;
  for (const auto& r : reports) {
    os << detail::csv_field(r.id) << ',' << detail::csv_field(detail::joined_params(r)) << ','
       << num(r.computed.real()) << ',' << num(r.computed.imag()) << ',' << num(r.expected.real()) << ','
       << num(r.expected.imag()) << ',' << num(r.abs_error) << ',' << num(r.tol) << ','
       << (r.pass ? "true" : "false") << ',' << detail::joined_sizes(r) << ',' << num(r.runtime_ms) << "\r\n";
  }
}

inline void write_table(std::ostream& os, const std::vector<CheckReport>& reports) {
  std::size_t w = 2;
  for (const auto& r : reports) w = std::max(w, r.id.size());
  auto short_complex = [](cplx v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.10g%+.10gi", v.real(), v.imag());
    return std::string(b);
  };
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-4s  %-24s  %-24s  %-10s  %-10s\n", static_cast<int>(w), "id", "pass",
                "computed", "expected", "abs_error", "tol");
  os << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s  %-4s  %-24s  %-24s  %-10.3g  %-10.3g\n", static_cast<int>(w), r.id.c_str(),
                  r.pass ? "ok" : "FAIL", short_complex(r.computed).c_str(),
                  short_complex(r.expected).c_str(), r.abs_error, r.tol);
    os << buf;
  }
  os << (all_pass(reports) ? "all checks passed\n" : "some checks FAILED\n");
}

}  // namespace leray
