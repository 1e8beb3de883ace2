#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinflip/quench.hpp"
#include "spinflip/randomfield.hpp"

using namespace spinflip;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<Gamma> kGammas{{1, 0, -2, 1}, {1, 1, -2, 0}, {1, 2, 0, -3}, {0, 0, 0, 0}, {2, -1, 0.5, -1.5}};

}  // namespace

TEST_CASE("site integral invariants") {
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double t : {0.0, 0.3, 1.7}) {
      const auto orth = site_integrals(beta, t, t + kPi / 2);
      CHECK(std::abs(orth.T) <= 1e-13);
      const auto same = site_integrals(beta, t, t);
      CHECK(same.T == doctest::Approx(same.S2t).epsilon(1e-13));
      CHECK(same.S2t == doctest::Approx(same.S2s).epsilon(1e-13));
      const auto anti = site_integrals(beta, t, t + kPi);
      CHECK(anti.T == doctest::Approx(-anti.S2t).epsilon(1e-13));
      CHECK(anti.T22 == doctest::Approx(same.T22).epsilon(1e-12));
      for (double s : {0.0, 0.9, 2.5}) {
        const auto x = site_integrals(beta, t, s);
        CHECK(x.rho == doctest::Approx(std::cos(t - s)));
        CHECK(std::abs(x.T) <= std::min(x.S2t, x.S2s) + 1e-14);
        CHECK(x.S2t <= 1.0);
        CHECK(x.T22 <= x.S2t + 1e-14);
        const auto fine = site_integrals(beta, t, s, 256);
        const auto shifted = site_integrals(beta, t + 0.4, s + 0.4, 256);
        CHECK(std::abs(shifted.T - fine.T) <= 1e-7);
        CHECK(std::abs(shifted.T22 - fine.T22) <= 1e-7);
      }
    }
  }
  CHECK_THROWS(site_integrals(1.0, 0.0, 0.0, 7));
}

TEST_CASE("site integrals: grid matches pointwise evaluation") {
  const std::vector<double> angles{0.0, 0.4, 1.3, 2.9};
  const SiteIntegralGrid grid(1.2, angles, 48);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (std::size_t j = 0; j < angles.size(); ++j) {
      const auto a = grid.at(i, j);
      const auto b = site_integrals(1.2, angles[i], angles[j], 48);
      CHECK(a.T == doctest::Approx(b.T).epsilon(1e-13));
      CHECK(a.T22 == doctest::Approx(b.T22).epsilon(1e-13));
      CHECK(a.S2t == doctest::Approx(b.S2t).epsilon(1e-13));
    }
  }
}

TEST_CASE("site integrals are stable when the order is doubled") {
  for (double t : {0.0, 0.3, 1.1, 2.0}) {
    for (double s : {0.0, 0.7, 1.1, 3.0}) {
      const auto a = site_integrals(1.0, t, s, 128);
      const auto b = site_integrals(1.0, t, s, 256);
      CHECK(std::abs(a.T - b.T) < 1e-10);
      CHECK(std::abs(a.S2t - b.S2t) < 1e-10);
      CHECK(std::abs(a.S2s - b.S2s) < 1e-10);
      CHECK(std::abs(a.T22 - b.T22) < 1e-10);
    }
  }
}

TEST_CASE("moment set assembly") {
  SUBCASE("one site") {
    const auto m = rf_moments(1, 1.0, 0.3, 1.1);
    CHECK(m.Q == 0.0);
    CHECK(m.c12_sq == 1.0);
  }
  SUBCASE("high temperature") {
    const auto m = rf_moments(5, 1e-8, 0.3, 1.1);
    CHECK(std::abs(m.c12) <= 1e-12);
    CHECK(m.c12_sq == doctest::Approx(5.0));
    CHECK(std::abs(m.c12c34) <= 1e-12);
  }
  SUBCASE("closed forms and the cross-term double sum") {
    for (std::size_t N : {1u, 2u, 3u, 4u}) {
      const auto x = site_integrals(1.3, 0.2, 2.1);
      const auto m = rf_moments(N, x);
      double q = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
          if (i != j) q += x.T * x.T;
        }
      }
      CHECK(m.Q == doctest::Approx(q).epsilon(1e-14));
      CHECK(m.c12 == doctest::Approx(N * x.T));
      CHECK(m.c12_sq == doctest::Approx(N + q));
      CHECK(m.c12_mean_sq == doctest::Approx(N * x.T * x.T + q));
      CHECK(m.c12c23_sts == doctest::Approx(N * x.S2s + q));
      CHECK(m.c12c23_tst == doctest::Approx(N * x.S2t + q));
      CHECK(m.c12c34 == doctest::Approx(N * x.T22 + q));
      const auto qm = rf_overlap_moments(m);
      const double n2 = static_cast<double>(N * N);
      CHECK(qm.q_sq == doctest::Approx(m.c12_sq / n2));
      CHECK(qm.q_mean_sq == doctest::Approx(m.c12_mean_sq / n2));
      CHECK(qm.q12q23 == doctest::Approx(m.c12c23_sts / n2));
      CHECK(qm.q12q34 == doctest::Approx(m.c12c34 / n2));
    }
  }
}

TEST_CASE("closed-form moments against quenched Monte Carlo") {
  const std::size_t N = 4;
  const double t = 0.3, s = 1.1;
  const auto model = build_model(ModelKind::random_field, {N, {}, {}}, 1.0);
  const auto flip = full_region(model);
  const McPlan plan{2024, 100000, 4.0, 0};
  const NormalStream stream(plan.seed);
  const ReplicaSpec rt{t, +1}, rs{s, +1};
  const std::vector<ReplicaSpec> ts{rt, rs}, tst{rt, rs, rt}, sts{rs, rt, rs}, tsst{rt, rs, rs, rt};
  const std::vector<ReplicaPair> single{{0, 1}}, square{{0, 1}, {0, 1}}, chain{{0, 1}, {1, 2}},
      split{{0, 1}, {2, 3}};
  const auto acc = run_samples(plan, 6, [&](std::uint64_t i, std::span<double> out) {
    const auto e = make_ensemble(model, flip, stream, i);
    out[0] = covariance_moment(e, ts, single, flip);
    out[1] = out[0] * out[0];
    out[2] = covariance_moment(e, ts, square, flip);
    out[3] = covariance_moment(e, sts, chain, flip);
    out[4] = covariance_moment(e, tst, chain, flip);
    out[5] = covariance_moment(e, tsst, split, flip);
  });
  const auto closed = rf_moments(N, 1.0, t, s);
  CHECK(closed.c12_mean_sq == doctest::Approx(closed.c12 * closed.c12).epsilon(1e-14));
  // Av[omega(C12)^2] is the four-replica moment, not the squared mean.
  const double expected[6] = {closed.c12, closed.c12c34, closed.c12_sq,
                              closed.c12c23_sts, closed.c12c23_tst, closed.c12c34};
  for (std::size_t k = 0; k < 6; ++k) {
    const auto c = compare(estimate(acc[k]), Estimate{expected[k], 0.0, 0}, plan.z_threshold);
    CHECK_MESSAGE(c.pass, "moment " << k << " z = " << c.z_score);
  }
}

TEST_CASE("Theorem-3 bound on a grid of angles") {
  for (std::size_t N : {1u, 2u, 3u, 4u, 8u, 16u, 32u, 64u}) {
    for (const auto& gamma : kGammas) {
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          const auto r = gg_bound_check(N, 1.0, kPi * i / 4, kPi * j / 4, gamma);
          CHECK(r.pass);
          CHECK(r.lhs <= r.rhs);
        }
      }
    }
  }
  CHECK(gg_bound(4, {1, 0, -2, 1}) == doctest::Approx(3.0 / 4 + 1.0 / 16));
  CHECK(gg_bound(4, {0, 0, 0, 0}) == 0.0);
  CHECK_THROWS(gg_bound_check(4, 1.0, 0.0, 0.0, {1, 0, 0, 0}));
  CHECK_THROWS(gg_bound_check(4, 1.0, 0.0, 0.0, {1, 1, -2, 1e-9}));
}

TEST_CASE("triviality residual") {
  SUBCASE("exact decomposition into two Theorem-3 combinations") {
    for (std::size_t N : {1u, 3u, 10u}) {
      for (double t : {0.0, 0.8}) {
        for (double s : {0.0, 2.3}) {
          const auto q = rf_overlap_moments(rf_moments(N, 1.0, t, s));
          const double expected = gg_combination(q, {1, 1, -2, 0}) - gg_combination(q, {1, 2, 0, -3}) / 3.0;
          CHECK(roma_residual(N, 1.0, t, s) == doctest::Approx(expected).epsilon(1e-13));
          CHECK(std::abs(roma_residual(N, 1.0, t, s)) <= roma_bound(N) + kQuadratureSlack);
        }
      }
    }
    CHECK(roma_bound(2) == doctest::Approx((3.0 / 2 + 1.0 / 4) + (5.0 / 2 + 1.0 / 4) / 3));
  }
  SUBCASE("residual is of order 1/N with an N-independent coefficient") {
    const double ref = roma_residual(8, 1.0, 0.0, 0.0) * 8;
    for (std::size_t N : {2u, 4u, 16u, 32u, 64u}) {
      CHECK(roma_residual(N, 1.0, 0.0, 0.0) * N == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  SUBCASE("high temperature") {
    for (std::size_t N : {1u, 4u, 9u}) {
      CHECK(std::abs(roma_residual(N, 1e-8, 0.3, 1.1) - 2.0 / (3.0 * N)) < 1e-6);
    }
  }
  SUBCASE("overlap variance falls like 1/N") {
    double previous = 1e300;
    for (std::size_t N = 8; N <= 64; N *= 2) {
      const auto q = rf_overlap_moments(rf_moments(N, 1.0, 0.0, 0.0));
      const double d = q.q_sq - q.q_mean_sq;
      CHECK(d < previous);
      previous = d;
    }
  }
}

TEST_CASE("Lemma 1 in closed form") {
  CHECK(log_cosh(0.0) == 0.0);
  CHECK(log_cosh(800.0) == doctest::Approx(800.0 - std::log(2.0)));
  CHECK(log_cosh(-3.0) == doctest::Approx(std::log(std::cosh(3.0))).epsilon(1e-15));
  SUBCASE("full turn of half the circle") {
    for (std::size_t N : {1u, 2u, 4u}) {
      const auto r = rf_lemma1_closed(N, 1.0, 0.0, kPi);
      CHECK(std::abs(r.lhs) <= 1e-14);
      CHECK(std::abs(r.rhs) <= 1e-6);
    }
  }
  SUBCASE("quarter circle") {
    for (std::size_t N : {1u, 2u, 4u}) {
      const auto r = rf_lemma1_closed(N, 1.0, 0.0, kPi / 2);
      CHECK(r.lhs > 0.0);
      CHECK(std::abs(r.lhs - r.rhs) <= 1e-6 * std::max(1.0, std::abs(r.lhs)));
    }
  }
  SUBCASE("lhs is extensive") {
    CHECK(rf_lemma1_lhs(4, 1.0, 0.2, 1.4) == doctest::Approx(4 * rf_lemma1_lhs(1, 1.0, 0.2, 1.4)));
  }
  SUBCASE("degenerate interval") {
    const auto r = rf_lemma1_closed(3, 1.0, 0.7, 0.7);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  SUBCASE("every middle-term assignment gives the same integral") {
    const double tst = rf_lemma1_rhs(3, 1.0, 0.1, 2.0, 32, 64, MiddleTerm::tst);
    CHECK(rf_lemma1_rhs(3, 1.0, 0.1, 2.0, 32, 64, MiddleTerm::sts) == doctest::Approx(tst).epsilon(1e-12));
    CHECK(rf_lemma1_rhs(3, 1.0, 0.1, 2.0, 32, 64, MiddleTerm::symmetric) == doctest::Approx(tst).epsilon(1e-12));
  }
  CHECK_THROWS(rf_lemma1_closed(2, 1.0, 1.0, 0.5));
  CHECK_THROWS(rf_lemma1_closed(2, 1.0, -0.1, 0.5));
  CHECK_THROWS(rf_lemma1_closed(2, 1.0, 0.0, 7.0));
}

TEST_CASE("per-sample closed forms against enumeration") {
  const NormalStream stream(31);
  for (std::size_t N : {1u, 2u, 6u}) {
    const auto model = build_model(ModelKind::random_field, {N, {}, {}}, 1.0);
    const auto flip = full_region(model);
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto rows = rf_per_sample_suite(make_ensemble(model, flip, stream, i), 0.3, 1.1);
      CHECK(rows.size() == 5);
      for (const auto& r : rows) {
        CHECK_MESSAGE(r.pass, r.name << " N=" << N << " err=" << r.abs_err);
        CHECK(r.abs_err <= 1e-10);
      }
    }
  }
  const auto sk = build_model(ModelKind::sk, {3, {}, {}}, 1.0);
  CHECK_THROWS(rf_per_sample_suite(make_ensemble(sk, full_region(sk), stream, 0), 0.3, 1.1));
  const auto rf = build_model(ModelKind::random_field, {3, {}, {}}, 1.0);
  CHECK_THROWS(rf_per_sample_suite(make_ensemble(rf, make_flip_region(rf, {0}), stream, 0), 0.3, 1.1));
}
