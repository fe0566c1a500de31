#pragma once

// MBSP cost model. Costs are doubles in units of G with n/p as real
// division; lg is log base 2.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsort/types.hpp"

namespace mcsort::mbsp {

/// Septuplet (p, l, g, m, L, G, M).
struct MbspParams {
  double p = 1;
  double l = 0;  // BSP latency
  double g = 5;  // per-word slow-memory (RAM) cost
  double m = 1;  // memory units
  double L = 0;  // memory-unit latency
  double G = 1;  // per-word fast-memory cost
  double M = std::numeric_limits<double>::infinity();  // fast-memory words

  /// m = p, l = L = 0, M unbounded, g = (g/G) G with g/G = 5 by default.
  static MbspParams simplified(double p, double G = 1.0, double g_over_G = 5.0) {
    return MbspParams{p, 0.0, g_over_G * G, p, 0.0, G, std::numeric_limits<double>::infinity()};
  }

  bool follows_simplified_profile(double g_over_G = 5.0) const {
    return m == p && l == 0 && L == 0 && std::isinf(M) && g == g_over_G * G;
  }
};

struct CostTerm {
  std::string name;  // local-compute, slow-memory, counter-exchange, merge, low-order
  double value = 0;
};

struct CostEstimate {
  std::vector<CostTerm> terms;
  double total = 0;                 // sum of terms, in the order listed
  std::optional<double> n_max;      // predicted max keys per worker

  double term(std::string_view name) const {
    double v = 0;
    for (const auto& t : terms) {
      if (t.name == name) v += t.value;
    }
    return v;
  }
};

namespace detail {

inline CostEstimate make(std::vector<CostTerm> terms, std::optional<double> n_max = std::nullopt) {
  CostEstimate e;
  e.terms = std::move(terms);
  for (const auto& t : e.terms) e.total += t.value;
  e.n_max = n_max;
  return e;
}

inline double rounds_for(double r) {
  if (!(r >= 2) || std::exp2(std::round(std::log2(r))) != r) {
    throw ParameterError("radix must be a power of two, got " + std::to_string(r));
  }
  return 32.0 / std::log2(r);
}

inline double lg(double x) { return std::log2(x); }

}  // namespace detail

/// T_s(N, g, G, r) = (32 / lg r) (3Ng + 2NG).
inline CostEstimate cost_sr4(double N, double g, double G, double r = 256) {
  const double rounds = detail::rounds_for(r);
  return detail::make({{"local-compute", rounds * 2 * N * G}, {"slow-memory", rounds * 3 * N * g}});
}

/// T_p(N, g, G, p, r) = (32 / lg r) (4Ng + 2NG + 2prg), N = n/p.
inline CostEstimate cost_pr(double n, double p, double g, double G, double r) {
  const double rounds = detail::rounds_for(r);
  const double N = n / p;
  return detail::make({{"local-compute", rounds * 2 * N * G},
                       {"slow-memory", rounds * 4 * N * g},
                       {"counter-exchange", rounds * 2 * p * r * g}});
}

/// T_o = T_s(n/p) + p (4n/p) g.
inline CostEstimate cost_oet(double n, double p, double g, double G) {
  auto local = cost_sr4(n / p, g, G);
  local.terms.push_back({"merge", p * (4 * n / p) * g});
  return detail::make(std::move(local.terms));
}

/// T_b = T_s(n/p) + (lg p (lg p + 1) / 2) (4n/p) g.
inline CostEstimate cost_btn(double n, double p, double g, double G) {
  const double lp = detail::lg(p);
  if (!(p >= 1) || std::exp2(std::round(lp)) != p) {
    throw ParameterError("BTN cost needs a power-of-two p, got " + std::to_string(p));
  }
  auto local = cost_sr4(n / p, g, G);
  local.terms.push_back({"merge", (lp * (lp + 1) / 2) * (4 * n / p) * g});
  return detail::make(std::move(local.terms));
}

/// (1 + 1/ceil(w)) (n/p) + ceil(w) p. An infinite w means the sample is the
/// whole input and the buckets are exact.
inline double gsd_n_max(double n, double p, double omega) {
  if (std::isinf(omega)) return n / p;
  const double r = std::ceil(omega);
  return (1 + 1 / r) * (n / p) + r * p;
}

/// T_s(n/p) + g n_max lg p, optionally with the low-order terms
/// pG + p lg(n/p) g of splitter handling and binary search.
inline CostEstimate cost_gsd(double n, double p, double G, double omega, double g_over_G = 5.0,
                             bool low_order = false) {
  const double g = g_over_G * G;
  const double n_max = gsd_n_max(n, p, omega);
  auto est = cost_sr4(n / p, g, G);
  est.terms.push_back({"merge", g * n_max * detail::lg(p)});
  if (low_order) est.terms.push_back({"low-order", p * G + p * (n > p ? detail::lg(n / p) : 0.0) * g});
  return detail::make(std::move(est.terms), n_max);
}

/// T_s(n_max) + g (n/p) lg p with n_max = (1 + 1/w) (n/p).
inline CostEstimate cost_ger(double n, double p, double G, double omega, double g_over_G = 5.0) {
  const double g = g_over_G * G;
  const double n_max = std::isinf(omega) ? n / p : (1 + 1 / omega) * (n / p);
  auto est = cost_sr4(n_max, g, G);
  est.terms.push_back({"merge", g * (n / p) * detail::lg(p)});
  return detail::make(std::move(est.terms), n_max);
}

enum class Model { sr4, pr4, pr2, btn, oet, gsd, ger };

inline std::optional<Model> model_for(std::string_view algo) {
  if (algo == "sr4") return Model::sr4;
  if (algo == "pr4") return Model::pr4;
  if (algo == "pr2") return Model::pr2;
  if (algo == "btn") return Model::btn;
  if (algo == "oet") return Model::oet;
  if (algo == "gsd") return Model::gsd;
  if (algo == "ger") return Model::ger;
  return std::nullopt;
}

/// Default w = max(1, ceil(lg lg n)).
inline double model_default_omega(double n) {
  if (n < 4) return 1.0;
  return std::max(1.0, std::ceil(detail::lg(detail::lg(n))));
}

inline CostEstimate estimate(Model model, double n, double p, double G = 1.0, double g_over_G = 5.0,
                             std::optional<double> omega = std::nullopt) {
  const double g = g_over_G * G;
  const double w = omega.value_or(model_default_omega(n));
  switch (model) {
    case Model::sr4: return cost_sr4(n, g, G);
    case Model::pr4: return cost_pr(n, p, g, G, 256);
    case Model::pr2: return cost_pr(n, p, g, G, 65536);
    case Model::btn: return cost_btn(n, p, g, G);
    case Model::oet: return cost_oet(n, p, g, G);
    case Model::gsd: return cost_gsd(n, p, G, w, g_over_G);
    case Model::ger: return cost_ger(n, p, G, w, g_over_G);
  }
  return {};
}

/// T_s(n) / T_algo(n, p).
inline double predicted_speedup(Model model, double n, double p, double G = 1.0, double g_over_G = 5.0,
                                std::optional<double> omega = std::nullopt) {
  if (model == Model::sr4) return 1.0;
  const double serial = cost_sr4(n, g_over_G * G, G).total;
  return serial / estimate(model, n, p, G, g_over_G, omega).total;
}

/// Smallest integer s with
///   s >= (1+e)/e^2 (2 rho log n + log(2 pi p^2 (ps-1) e^{1/(3(ps-1))})),
/// found by iterating s <- ceil(rhs(s)) from s = 1. Throws once p s >= n/2.
inline std::uint64_t min_oversampling(double n, double p, double epsilon, double rho, double log_base = 2.0) {
  if (!(epsilon > 0 && epsilon < 1)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(rho > 0)) throw ParameterError("rho must be positive");
  if (!(p >= 2)) throw ParameterError("p must be at least 2");
  if (!(log_base > 1)) throw ParameterError("log base must exceed 1");
  const double ln_base = std::log(log_base);
  const auto log_b = [&](double x) { return std::log(x) / ln_base; };
  const double lead = (1 + epsilon) / (epsilon * epsilon);

  std::uint64_t s = 1;
  for (int iter = 0; iter < 10000; ++iter) {
    if (p * static_cast<double>(s) >= n / 2) {
      throw ParameterError("no feasible oversampling factor: p s reaches n/2 at s = " + std::to_string(s));
    }
    const double q = p * static_cast<double>(s) - 1;
    const double rhs =
        lead * (2 * rho * log_b(n) + log_b(2 * std::numbers::pi * p * p * q) + 1 / (3 * q) / ln_base);
    const auto next = static_cast<std::uint64_t>(std::ceil(rhs));
    if (next <= s) return s;
    s = next;
  }
  throw ParameterError("oversampling iteration did not converge");
}

}  // namespace mcsort::mbsp
