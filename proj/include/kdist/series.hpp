#ifndef KDIST_SERIES_HPP
#define KDIST_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>

#include "kdist/special_functions.hpp"

// Generic evaluator for series of the form  sum_j s^j g_j H_j(x)  where the
// g_j are probability weights and the H_j are incomplete-beta ratios,
// nonincreasing in j. Three summation strategies are provided:
//
//   Method1 — forward accumulation from index 0 (where H_j is largest);
//   Method2 — bidirectional accumulation seeded at the mode of the g_j;
//   Hybrid  — Method2 with an underflow-avoiding start index: the mode is
//             lowered (multiplied by the incomplete-beta argument) when its
//             seed is unrepresentable or negligible next to H_0, and index 0
//             is used outright when g_0 H_0 dominates the seed product.
//
// Truncation control: while the window floor sits above 0 the error is
// bounded by H_0(x) * [1 - sum of covered weights]; once the floor reaches 0
// by H_top(x) * [1 - sum of covered weights]. Iterations count window
// expansions beyond the directly seeded indices, which is the convention the
// benchmark tables use.

namespace kdist {

enum class SignMode { AllPositive, Alternating };
enum class Strategy { Method1, Method2, Hybrid, Auto };
enum class EvalStatus { Converged, NotConverged, Underflow };

struct EvalOptions {
  double tolerance = 1e-12;        // absolute truncation error target
  Strategy strategy = Strategy::Auto;
  std::int64_t max_iterations = 200000;
  double hybrid_threshold = 0.01;  // lower the start index when H_k/H_0 drops below
};

struct EvalReport {
  double value = 0.0;              // partial sum, in [0,1]
  std::int64_t iterations = 0;     // window expansions beyond the seeds
  double achieved_bound = std::numeric_limits<double>::infinity();
  std::int64_t start_index = 0;
  Strategy strategy_used = Strategy::Method1;
  bool underflow_adjusted = false;
  bool converged = false;
  EvalStatus status = EvalStatus::NotConverged;
  double sum_even = 0.0;           // parity accumulators (diagnostics)
  double sum_odd = 0.0;
};

// Supplier contract for one concrete series: weights, incomplete-beta terms,
// their recurrence ratios/increments, parity step and sign pattern. All
// log-space seeds are evaluated directly; ratios are exact rationals.
template <typename S>
concept mixture_series = requires(const S& s, std::int64_t j) {
  { s.parity_step() } -> std::convertible_to<int>;
  { s.sign_mode() } -> std::convertible_to<SignMode>;
  { s.beta_argument() } -> std::convertible_to<double>;
  { s.log_weight_at(j) } -> std::convertible_to<double>;
  { s.weight_ratio_fwd(j) } -> std::convertible_to<double>;
  { s.weight_ratio_bwd(j) } -> std::convertible_to<double>;
  { s.h_at(j) } -> std::convertible_to<double>;
  { s.log_h_at(j) } -> std::convertible_to<double>;
  { s.log_h_increment_at(j) } -> std::convertible_to<double>;
  { s.h_increment_ratio_fwd(j) } -> std::convertible_to<double>;
};

namespace detail {

// ln(DBL_MIN) plus a 40-nat margin: log-space seeds below this cannot be
// exponentiated into a usable recurrence.
inline constexpr double kLogUnderflow = -708.3964185322641 + 40.0;

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

template <mixture_series S>
EvalReport run_window(const S& series, std::int64_t start, const EvalOptions& opt,
                      Strategy used, bool adjusted) {
  const int step = series.parity_step();
  const bool alternating = series.sign_mode() == SignMode::Alternating;

  EvalReport rep;
  rep.strategy_used = used;
  rep.underflow_adjusted = adjusted;
  rep.start_index = start;

  struct Chain {
    std::int64_t top = 0, bot = 0;
    double h_top = 0.0, h_bot = 0.0;
    double ln_d_top = 0.0, ln_d_bot = 0.0;  // ln of the H-recurrence increment
    double ln_g_top = 0.0, ln_g_bot = 0.0;
  };
  Chain ch[2];

  KahanSum even, odd, wsum;
  std::int64_t lo = start;
  std::int64_t hi = start + step - 1;
  double h_at_hi = 0.0;
  const double h0 = start > 0 ? series.h_at(0) : 0.0;

  auto add_term = [&](std::int64_t j, double h, double ln_g) {
    const double g = std::exp(ln_g);
    wsum.add(g);
    const double t = g * h;
    if (j & 1) {
      odd.add(t);
    } else {
      even.add(t);
    }
  };
  auto bound = [&]() {
    const double rem = std::max(0.0, 1.0 - wsum.value());
    return (lo > 0 ? h0 : h_at_hi) * rem;
  };
  auto finish = [&](EvalStatus st) {
    rep.sum_even = even.value();
    rep.sum_odd = odd.value();
    const double v = alternating ? rep.sum_even - rep.sum_odd
                                 : rep.sum_even + rep.sum_odd;
    rep.value = std::clamp(v, 0.0, 1.0);
    rep.achieved_bound = bound();
    rep.status = st;
    rep.converged = st == EvalStatus::Converged;
    return rep;
  };

  for (int c = 0; c < step; ++c) {
    const std::int64_t j = start + c;
    Chain& k = ch[c];
    k.top = k.bot = j;
    k.h_top = k.h_bot = series.h_at(j);
    k.ln_d_top = k.ln_d_bot = series.log_h_increment_at(j);
    k.ln_g_top = k.ln_g_bot = series.log_weight_at(j);
    h_at_hi = k.h_top;
    add_term(j, k.h_top, k.ln_g_top);
  }
  if (bound() <= opt.tolerance) return finish(EvalStatus::Converged);

  auto chain_of = [&](std::int64_t j) -> Chain& {
    return ch[((j - start) % step + step) % step];
  };

  bool up_turn = true;
  while (rep.iterations < opt.max_iterations) {
    if (lo == 0 || up_turn) {
      const std::int64_t j = hi + 1;
      Chain& k = chain_of(j);
      double h = k.h_top - std::exp(k.ln_d_top);
      if (h < 0.0) h = 0.0;
      k.ln_g_top += std::log(series.weight_ratio_fwd(k.top));
      k.ln_d_top += std::log(series.h_increment_ratio_fwd(k.top));
      k.top = j;
      k.h_top = h;
      hi = j;
      h_at_hi = h;
      add_term(j, h, k.ln_g_top);
    } else {
      const std::int64_t j = lo - 1;
      Chain& k = chain_of(j);
      const double ln_d = k.ln_d_bot - std::log(series.h_increment_ratio_fwd(j));
      const double h = k.h_bot + std::exp(ln_d);
      const double ln_g = k.ln_g_bot + std::log(series.weight_ratio_bwd(k.bot));
      k.bot = j;
      k.h_bot = h;
      k.ln_d_bot = ln_d;
      k.ln_g_bot = ln_g;
      lo = j;
      add_term(j, h, ln_g);
    }
    if (lo > 0) up_turn = !up_turn;
    ++rep.iterations;
    if (bound() <= opt.tolerance) return finish(EvalStatus::Converged);
  }
  return finish(EvalStatus::NotConverged);
}

template <mixture_series S>
bool seeds_underflow(const S& series, std::int64_t k) {
  for (int c = 0; c < series.parity_step(); ++c) {
    if (series.log_h_at(k + c) < kLogUnderflow ||
        series.log_h_increment_at(k + c) < kLogUnderflow) {
      return true;
    }
  }
  return false;
}

inline EvalReport underflow_report(Strategy used, std::int64_t start) {
  EvalReport rep;
  rep.strategy_used = used;
  rep.start_index = start;
  rep.status = EvalStatus::Underflow;
  rep.converged = false;
  return rep;
}

}  // namespace detail

/// Forward accumulation from index 0.
template <mixture_series S>
EvalReport evaluate_method1(const S& series, const EvalOptions& opt = {}) {
  return detail::run_window(series, 0, opt, Strategy::Method1, false);
}

/// Bidirectional accumulation seeded at the weight mode. Reports Underflow
/// when a seed H or its recurrence increment is unrepresentable.
template <mixture_series S>
EvalReport evaluate_method2(const S& series, std::int64_t mode_index,
                            const EvalOptions& opt = {}) {
  if (mode_index > 0 && detail::seeds_underflow(series, mode_index)) {
    return detail::underflow_report(Strategy::Method2, mode_index);
  }
  return detail::run_window(series, mode_index, opt, Strategy::Method2, false);
}

/// Underflow-avoiding tactic: lower the mode while its seed is
/// unrepresentable (repeatable), lower once more when H_k is negligible next
/// to H_0, then start wherever g_j H_j(x) is larger, 0 or the adjusted mode.
template <mixture_series S>
EvalReport evaluate_hybrid(const S& series, std::int64_t mode_index,
                           const EvalOptions& opt = {}) {
  constexpr int kMaxLowerings = 60;
  const double z = series.beta_argument();
  const double ln_h0 = series.log_h_at(0);
  std::int64_t k = mode_index;
  int lowerings = 0;

  auto lower_while_impossible = [&]() {
    while (k > 0 && detail::seeds_underflow(series, k)) {
      if (++lowerings > kMaxLowerings) return false;
      k = static_cast<std::int64_t>(static_cast<double>(k) * z);
    }
    return true;
  };

  if (!lower_while_impossible()) {
    return detail::underflow_report(Strategy::Hybrid, k);
  }
  if (k > 0 && series.log_h_at(k) - ln_h0 < std::log(opt.hybrid_threshold)) {
    k = static_cast<std::int64_t>(static_cast<double>(k) * z);
    if (!lower_while_impossible()) {
      return detail::underflow_report(Strategy::Hybrid, k);
    }
  }
  if (k > 0 &&
      series.log_weight_at(0) + ln_h0 >=
          series.log_weight_at(k) + series.log_h_at(k) &&
      !detail::seeds_underflow(series, 0)) {
    k = 0;
  }
  if (k == 0 && detail::seeds_underflow(series, 0)) {
    return detail::underflow_report(Strategy::Hybrid, 0);
  }
  return detail::run_window(series, k, opt, Strategy::Hybrid, k != mode_index);
}

/// Dispatch on options.strategy (Auto resolves to the hybrid tactic).
template <mixture_series S>
EvalReport evaluate(const S& series, std::int64_t mode_index,
                    const EvalOptions& opt = {}) {
  switch (opt.strategy) {
    case Strategy::Method1:
      return evaluate_method1(series, opt);
    case Strategy::Method2:
      return evaluate_method2(series, mode_index, opt);
    case Strategy::Hybrid:
    case Strategy::Auto:
      return evaluate_hybrid(series, mode_index, opt);
  }
  return evaluate_hybrid(series, mode_index, opt);
}

}  // namespace kdist

#endif  // KDIST_SERIES_HPP
