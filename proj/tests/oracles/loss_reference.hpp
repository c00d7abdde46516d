#pragma once

// Long-double recomputation of the detection losses, written from the loss
// definitions without sharing code with the library.

#include <cmath>
#include <random>
#include <vector>

#include "graspwise/losses.hpp"

namespace oracle {

inline long double huber(long double d) {
  d = std::fabs(d);
  return d < 1.0L ? 0.5L * d * d : d - 0.5L;
}

inline long double neg_log(long double p) { return -std::log(std::max(p, 1e-12L)); }

template <std::size_t N>
long double box_term(const std::array<double, N>& a, const std::array<double, N>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < N; ++i) s += huber(static_cast<long double>(a[i]) - b[i]);
  return s;
}

inline long double loss_p(const std::vector<graspwise::ProposalPrediction>& b,
                          long double lambda1, bool mean) {
  long double s = 0.0L;
  for (const auto& x : b) {
    s += neg_log(x.p[x.p_star]);
    if (x.p_star == 1) s += lambda1 * box_term(x.t, x.t_star);
  }
  return mean && !b.empty() ? s / b.size() : s;
}

inline long double loss_g(const std::vector<graspwise::OrientationPrediction>& b,
                          long double lambda2, bool mean) {
  long double s = 0.0L;
  for (const auto& x : b) {
    s += neg_log(x.rho[x.rho_star]);
    if (x.rho_star > 0) s += lambda2 * box_term(x.beta, x.beta_star);
  }
  return mean && !b.empty() ? s / b.size() : s;
}

inline long double loss_s(const std::vector<graspwise::SurfacePrediction>& b, bool mean) {
  long double s = 0.0L;
  for (const auto& x : b) s += neg_log(x.s[x.s_star]);
  return mean && !b.empty() ? s / b.size() : s;
}

template <std::size_t N>
std::array<double, N> random_distribution(std::mt19937_64& rng) {
  std::array<double, N> p{};
  double sum = 0.0;
  for (auto& v : p) {
    v = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <std::size_t N>
std::array<double, N> random_box(std::mt19937_64& rng, double spread) {
  std::array<double, N> t{};
  for (auto& v : t) v = std::uniform_real_distribution<double>(-spread, spread)(rng);
  return t;
}

struct Batch {
  std::vector<graspwise::ProposalPrediction> p;
  std::vector<graspwise::OrientationPrediction> g;
  std::vector<graspwise::SurfacePrediction> s;
};

inline Batch random_batch(std::mt19937_64& rng, std::size_t n) {
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    graspwise::ProposalPrediction p;
    p.p = random_distribution<2>(rng);
    p.p_star = static_cast<int>(rng() % 2);
    p.t = random_box<4>(rng, 3.0);
    p.t_star = random_box<4>(rng, 3.0);
    b.p.push_back(p);
    graspwise::OrientationPrediction g;
    g.rho = random_distribution<19>(rng);
    g.rho_star = static_cast<int>(rng() % 19);
    g.beta = random_box<4>(rng, 3.0);
    g.beta_star = random_box<4>(rng, 3.0);
    b.g.push_back(g);
    graspwise::SurfacePrediction s;
    s.s = random_distribution<2>(rng);
    s.s_star = static_cast<int>(rng() % 2);
    b.s.push_back(s);
  }
  return b;
}

}  // namespace oracle
