#pragma once

// Reference implementations used only by tests. They are deliberately written
// as plain index loops over std::vector and share no code with the library.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline double brier(const std::vector<double>& f, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] - y[i]) * (f[i] - y[i]);
  return s / static_cast<double>(f.size());
}

// Enumerates the signed grid {k/m} around v and returns the closest point,
// ties to the larger one.
inline double round_grid(double v, int m) {
  const long lo = static_cast<long>(std::floor(v * m)) - 2;
  double best = 0.0;
  double best_err = INFINITY;
  for (long k = lo; k <= lo + 4; ++k) {
    const double c = static_cast<double>(k) / m;
    const double e = std::fabs(c - v);
    if (e < best_err || (e == best_err && c > best)) {
      best = c;
      best_err = e;
    }
  }
  return best;
}

struct Step {
  int model;   // 1 or 2
  char dir;    // '>' or '<'
  double delta_raw;
  double delta;
};

struct Run {
  std::vector<Step> steps;
  std::vector<double> f1, f2;
};

// Straight transcription of the reconcile loop on a uniform distribution with
// projection to [0,1].
inline Run reconcile(std::vector<double> f1, std::vector<double> f2, const std::vector<double>& y,
                     double alpha, double eps, int max_steps = 100000) {
  const std::size_t n = y.size();
  const int m = static_cast<int>(std::ceil(2.0 / (std::sqrt(alpha) * eps)));
  Run run;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<std::size_t> gt, lt;
    for (std::size_t i = 0; i < n; ++i) {
      if (f1[i] - f2[i] > eps) gt.push_back(i);
      if (f2[i] - f1[i] > eps) lt.push_back(i);
    }
    const double mass = static_cast<double>(gt.size() + lt.size()) / static_cast<double>(n);
    if (mass < alpha) break;

    double best_score = -1.0;
    int best_model = 0;
    char best_dir = '>';
    for (int model = 1; model <= 2; ++model) {
      for (char dir : {'>', '<'}) {
        const auto& idx = dir == '>' ? gt : lt;
        double score = 0.0;
        if (!idx.empty()) {
          double sy = 0.0, sf = 0.0;
          for (auto i : idx) {
            sy += y[i];
            sf += model == 1 ? f1[i] : f2[i];
          }
          const double k = static_cast<double>(idx.size());
          const double gap = sy / k - sf / k;
          score = (k / static_cast<double>(n)) * gap * gap;
        }
        if (score > best_score) {
          best_score = score;
          best_model = model;
          best_dir = dir;
        }
      }
    }
    const auto& idx = best_dir == '>' ? gt : lt;
    auto& f = best_model == 1 ? f1 : f2;
    double sy = 0.0, sf = 0.0;
    for (auto i : idx) {
      sy += y[i];
      sf += f[i];
    }
    const double k = static_cast<double>(idx.size());
    const double raw = sy / k - sf / k;
    const double delta = round_grid(raw, m);
    for (auto i : idx) f[i] = std::fmin(1.0, std::fmax(0.0, f[i] + delta));
    run.steps.push_back({best_model, best_dir, raw, delta});
  }
  run.f1 = std::move(f1);
  run.f2 = std::move(f2);
  return run;
}

// Random instance with a planted region where the second model is shifted.
struct Instance {
  std::vector<double> y, f1, f2;
};

inline Instance random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  const double shift = u(rng) < 0.5 ? 0.45 : -0.45;
  const double region = 0.05 + 0.3 * u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = u(rng);
    inst.y.push_back(u(rng) < p ? 1.0 : 0.0);
    const double a = std::fmin(1.0, std::fmax(0.0, p + 0.1 * (u(rng) - 0.5)));
    double b = std::fmin(1.0, std::fmax(0.0, p + 0.1 * (u(rng) - 0.5)));
    if (u(rng) < region) b = std::fmin(1.0, std::fmax(0.0, b + shift));
    inst.f1.push_back(a);
    inst.f2.push_back(b);
  }
  return inst;
}

// Paired t statistic on xs - ys, computed directly from the definition.
inline double paired_t(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += xs[i] - ys[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (xs[i] - ys[i] - mean) * (xs[i] - ys[i] - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return mean / (sd / std::sqrt(static_cast<double>(n)));
}

}  // namespace oracle
