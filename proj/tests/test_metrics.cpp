#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"

#include "fbe/metrics.hpp"
#include "oracles.hpp"

using fbe::Vector;
using oracle::to_vector;

namespace {

// Calls f(bits) for every n-bit pattern.
template <typename F>
void for_each_pattern(int n_bits, F&& f) {
  for (unsigned long m = 0; m < (1UL << n_bits); ++m) f(m);
}

std::vector<int> bits(unsigned long m, int offset, int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>((m >> (offset + i)) & 1UL);
  return out;
}

bool has_both(const std::vector<int>& v) {
  return std::find(v.begin(), v.end(), 0) != v.end() && std::find(v.begin(), v.end(), 1) != v.end();
}

}  // namespace

TEST_CASE("spd: examples") {
  CHECK(fbe::spd(Vector{{1, 1, 0, 0}}, Vector{{1, 1, 0, 0}}) == 1.0);
  CHECK(fbe::spd(Vector{{1, 0, 1, 0}}, Vector{{1, 1, 0, 0}}) == 0.0);
  CHECK(fbe::spd(Vector{{1, 1, 0, 1, 0, 0}}, Vector{{1, 1, 1, 0, 0, 0}}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(fbe::spd(Vector{{1, 0}}, Vector{{1, 1}}), fbe::DegenerateFitError);
  CHECK_THROWS_AS(fbe::spd(Vector{{1, 0}}, Vector{{1, 1, 0}}), fbe::ValidationError);
}

TEST_CASE("eod: examples") {
  const Vector y{{1, 0, 1, 1, 0, 1}};
  const Vector z{{1, 1, 1, 0, 0, 0}};
  CHECK(fbe::eod(y, y, z) == 0.0);
  CHECK(fbe::eod(Vector{{1, 0, 0, 0}}, Vector{{1, 1, 1, 1}}, Vector{{1, 1, 0, 0}}) == 0.5);
  CHECK(fbe::eod(Vector::Ones(6), y, z) == 0.0);
  CHECK_THROWS_AS(fbe::eod(Vector{{1, 0}}, Vector{{1, 0}}, Vector{{1, 0}}), fbe::DegenerateFitError);
}

TEST_CASE("fe and sfe: examples") {
  CHECK(fbe::fe(Vector{{-0.3, 0.3}}, Vector{{0, 1}}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(fbe::sfe(Vector{{-0.3, 0.3}}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(fbe::fe(Vector::Zero(3), Vector{{0, 1, 1}}) == 0.0);
  CHECK(fbe::sfe(Vector::Zero(3)) == 0.0);
  CHECK(fbe::fe(Vector{{1, 1}}, Vector{{0, 1}}) == 0.0);
  CHECK(fbe::sfe(Vector{{1, 1}}) == 1.0);
  CHECK_THROWS_AS(fbe::fe(Vector{{1, 1}}, Vector{{1, 1}}), fbe::DegenerateFitError);
}

TEST_CASE("auc: examples") {
  CHECK(fbe::auc(Vector{{0.1, 0.2, 0.8, 0.9}}, Vector{{0, 0, 1, 1}}) == 1.0);
  CHECK(fbe::auc(Vector{{0.9, 0.8, 0.2, 0.1}}, Vector{{0, 0, 1, 1}}) == 0.0);
  CHECK(fbe::auc(Vector::Constant(5, 0.4), Vector{{0, 1, 0, 1, 1}}) == 0.5);
  CHECK_THROWS_AS(fbe::auc(Vector{{0.1, 0.2}}, Vector{{1, 1}}), fbe::DegenerateFitError);
}

TEST_CASE("accuracy and precision: examples") {
  const Vector y{{1, 0, 1, 0}};
  CHECK(fbe::accuracy(y, y) == 1.0);
  CHECK(fbe::precision(Vector{{1, 1}}, Vector{{1, 0}}).value() == 0.5);
  CHECK_FALSE(fbe::precision(Vector{{0, 0}}, Vector{{1, 0}}).has_value());
  CHECK_THROWS_AS(fbe::accuracy(Vector(0), Vector(0)), fbe::ValidationError);
}

TEST_CASE("threshold_scores: examples") {
  CHECK(fbe::threshold_scores(Vector{{0.4, 0.6}}, 0.5) == Vector{{0, 1}});
  CHECK(fbe::threshold_scores(Vector{{0.5}}, 0.5) == Vector{{1}});
  CHECK(fbe::threshold_scores(Vector{{0.86, 0.84}}, 0.85) == Vector{{1, 0}});
  CHECK_THROWS_AS(fbe::threshold_scores(Vector{{0.5}}, 0.0), fbe::ValidationError);
  CHECK_THROWS_AS(fbe::threshold_scores(Vector{{0.5}}, 1.0), fbe::ValidationError);
}

TEST_CASE("spd matches brute force on every input up to 8 rows") {
  long compared = 0;
  for (int n = 2; n <= 8; ++n) {
    for_each_pattern(2 * n, [&](unsigned long m) {
      const auto yhat = bits(m, 0, n);
      const auto z = bits(m, n, n);
      if (!has_both(z)) return;
      CHECK(fbe::spd(to_vector(yhat), to_vector(z)) == oracle::spd(yhat, z));
      ++compared;
    });
  }
  CHECK(compared > 60000);
}

TEST_CASE("eod matches brute force on every input up to 6 rows") {
  for (int n = 2; n <= 6; ++n) {
    for_each_pattern(3 * n, [&](unsigned long m) {
      const auto yhat = bits(m, 0, n);
      const auto y = bits(m, n, n);
      const auto z = bits(m, 2 * n, n);
      bool z1 = false, z0 = false;
      for (int i = 0; i < n; ++i) {
        if (y[static_cast<std::size_t>(i)] != 1) continue;
        (z[static_cast<std::size_t>(i)] == 1 ? z1 : z0) = true;
      }
      if (!(z1 && z0)) {
        CHECK_THROWS_AS(fbe::eod(to_vector(yhat), to_vector(y), to_vector(z)), fbe::DegenerateFitError);
        return;
      }
      CHECK(fbe::eod(to_vector(yhat), to_vector(y), to_vector(z)) == oracle::eod(yhat, y, z));
    });
  }
}

TEST_CASE("metrics match brute force on random inputs of 9 to 12 rows") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> level(0, 4);
  std::uniform_int_distribution<int> size(9, 12);
  int done = 0;
  while (done < 5000) {
    const int n = size(rng);
    std::vector<int> yhat(n), y(n), z(n);
    std::vector<double> score(n), phi(n);
    for (int i = 0; i < n; ++i) {
      yhat[i] = coin(rng);
      y[i] = coin(rng);
      z[i] = coin(rng);
      score[i] = 0.25 * level(rng);
      phi[i] = 0.5 * (level(rng) - 2);
    }
    if (!has_both(z) || !has_both(y)) continue;
    ++done;
    CHECK(fbe::spd(to_vector(yhat), to_vector(z)) == oracle::spd(yhat, z));
    CHECK(fbe::auc(to_vector(score), to_vector(y)) == oracle::auc(score, y));

    // fe/sfe from the definitions; quarter-integer values keep every sum exact
    double s1 = 0, s0 = 0, abs_sum = 0;
    int n1 = 0, n0 = 0;
    for (int i = 0; i < n; ++i) {
      (z[i] ? s1 : s0) += phi[i];
      (z[i] ? n1 : n0) += 1;
      abs_sum += std::abs(phi[i]);
    }
    CHECK(fbe::fe(to_vector(phi), to_vector(z)) == std::abs(s1 / n1 - s0 / n0));
    CHECK(fbe::sfe(to_vector(phi)) == abs_sum / n);
  }
}

TEST_CASE("auc matches brute force on every tie pattern up to 7 rows") {
  // scores from {0, 1, 2}: 3^n score patterns times 2^n label patterns
  for (int n = 2; n <= 7; ++n) {
    long score_patterns = 1;
    for (int i = 0; i < n; ++i) score_patterns *= 3;
    for (long sp = 0; sp < score_patterns; ++sp) {
      std::vector<double> s(n);
      long rest = sp;
      for (int i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rest % 3);
        rest /= 3;
      }
      for_each_pattern(n, [&](unsigned long m) {
        const auto y = bits(m, 0, n);
        if (!has_both(y)) return;
        CHECK(fbe::auc(to_vector(s), to_vector(y)) == oracle::auc(s, y));
      });
    }
  }
}

TEST_CASE("metric properties: permutation, complement, constant outcomes, monotone transforms") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 300; ++t) {
    const int n = 30;
    Vector yhat(n), y(n), z(n), s(n), phi(n);
    for (int i = 0; i < n; ++i) {
      yhat(i) = coin(rng);
      y(i) = coin(rng);
      z(i) = coin(rng);
      s(i) = std::round(4.0 * normal(rng)) / 4.0;  // includes ties
      phi(i) = normal(rng);
    }
    z(0) = 0;
    z(1) = 1;
    y(0) = 0;
    y(1) = 1;
    y(2) = 1;
    z(2) = 0;
    y(3) = 1;
    z(3) = 1;

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
    for (int i = 0; i < n; ++i) P.indices()(i) = static_cast<int>(perm[static_cast<std::size_t>(i)]);

    CHECK(fbe::spd(P * yhat, P * z) == doctest::Approx(fbe::spd(yhat, z)).epsilon(1e-15));
    CHECK(fbe::eod(P * yhat, P * y, P * z) == doctest::Approx(fbe::eod(yhat, y, z)).epsilon(1e-15));
    CHECK(fbe::fe(P * phi, P * z) == doctest::Approx(fbe::fe(phi, z)).epsilon(1e-12));
    CHECK(fbe::sfe(P * phi) == doctest::Approx(fbe::sfe(phi)).epsilon(1e-12));
    CHECK(fbe::auc(P * s, P * y) == fbe::auc(s, y));
    CHECK(fbe::accuracy(P * yhat, P * y) == fbe::accuracy(yhat, y));

    const Vector flipped = (1.0 - yhat.array()).matrix();
    CHECK(fbe::spd(flipped, z) == doctest::Approx(fbe::spd(yhat, z)).epsilon(1e-15));

    CHECK(fbe::spd(Vector::Ones(n), z) == 0.0);
    CHECK(fbe::eod(Vector::Zero(n), y, z) == 0.0);

    const Vector transformed = s.unaryExpr([](double v) { return std::exp(3.0 * v) + 7.0; });
    CHECK(fbe::auc(transformed, y) == fbe::auc(s, y));
  }
}

TEST_CASE("report bounds: fe <= 2 max|phi| and sfe <= max|phi|") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 300; ++t) {
    Vector phi(12), z(12);
    for (int i = 0; i < 12; ++i) {
      phi(i) = normal(rng);
      z(i) = i % 2;
    }
    const double m = phi.cwiseAbs().maxCoeff();
    CHECK(fbe::fe(phi, z) <= 2.0 * m);
    CHECK(fbe::sfe(phi) <= m);
  }
}
