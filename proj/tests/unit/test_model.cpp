#include <doctest.h>

#include <cmath>
#include <random>

#include "spinflip/model.hpp"

using namespace spinflip;

namespace {

ModelSpec chain(std::size_t n) { return build_model(ModelKind::ea_chain, {n, {}, {}}, 1.0); }

SpinConfig spins(std::vector<int> s) { return SpinConfig::from_spins(std::move(s)); }

std::vector<ModelSpec> small_models() {
  std::vector<ModelSpec> models;
  models.push_back(build_model(ModelKind::random_field, {5, {}, {}}, 1.0));
  models.push_back(build_model(ModelKind::sk, {5, {}, {}}, 1.0));
  models.push_back(build_model(ModelKind::ea_chain, {6, {}, {}}, 1.0));
  models.push_back(build_model(ModelKind::ea_grid, {0, {2, 3}, {}}, 1.0));
  models.push_back(build_model(ModelKind::custom,
                               {4, {}, {{{0, 1, 2}, 0.7}, {{3}, 1.3}, {{1, 3}, 0.4}}}, 1.0));
  return models;
}

}  // namespace

TEST_CASE("standard families") {
  SUBCASE("random field, N = 3") {
    const auto m = build_model(ModelKind::random_field, {3, {}, {}}, 1.0);
    REQUIRE(m.interactions.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(m.interactions[i].sites == std::vector<std::size_t>{i});
      CHECK(m.interactions[i].delta == 1.0);
    }
    CHECK(m.stability_constant == 1.0);
  }
  SUBCASE("chain, N = 2") {
    const auto m = chain(2);
    REQUIRE(m.interactions.size() == 1);
    CHECK(m.interactions[0].sites == std::vector<std::size_t>{0, 1});
    CHECK(m.interactions[0].delta == 1.0);
    CHECK(m.stability_constant == 0.5);
  }
  SUBCASE("sk, N = 2") {
    const auto m = build_model(ModelKind::sk, {2, {}, {}}, 1.0);
    REQUIRE(m.interactions.size() == 1);
    CHECK(m.interactions[0].variance() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.stability_constant == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("sk diagonal covariance is (N - 1) / 2") {
    const auto m = build_model(ModelKind::sk, {6, {}, {}}, 1.0);
    CHECK(m.variance_sum() == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.stability_constant <= 0.5);
  }
  SUBCASE("grid 4x4 has 24 open bonds") {
    const auto m = build_model(ModelKind::ea_grid, {0, {4, 4}, {}}, 1.0);
    CHECK(m.size() == 16);
    CHECK(m.interactions.size() == 24);
    CHECK(m.stability_constant == 1.5);
    CHECK(m.sites.label(5) == SiteLabel{1, 1});
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(parse_model_kind("potts"), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::random_field, {0, {}, {}}, 1.0), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::random_field, {3, {}, {}}, 0.0), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::random_field, {3, {}, {}}, -1.0), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::ea_chain, {1, {}, {}}, 1.0), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::ea_grid, {0, {}, {}}, 1.0), ModelError);
  CHECK_THROWS_AS(build_model(ModelKind::ea_grid, {0, {3, 0}, {}}, 1.0), ModelError);
  CHECK_THROWS_AS(SiteSet(std::vector<SiteLabel>{}), ModelError);
  CHECK_THROWS_AS(SiteSet({{1}, {1}}), ModelError);
  CHECK_THROWS_AS(make_model(ModelKind::custom, SiteSet::range(2), {{{}, 1.0}}, 1.0), ModelError);
  CHECK_THROWS_AS(make_model(ModelKind::custom, SiteSet::range(2), {{{0, 2}, 1.0}}, 1.0),
                  ModelError);
  CHECK_THROWS_AS(make_model(ModelKind::custom, SiteSet::range(2), {{{0, 0}, 1.0}}, 1.0),
                  ModelError);
  CHECK_THROWS_AS(
      make_model(ModelKind::custom, SiteSet::range(2), {{{0, 1}, 1.0}, {{1, 0}, 2.0}}, 1.0),
      ModelError);
  CHECK_THROWS_AS(make_model(ModelKind::custom, SiteSet::range(2), {{{0}, -1.0}}, 1.0), ModelError);
}

TEST_CASE("zero-delta interactions are dropped") {
  const auto m =
      make_model(ModelKind::custom, SiteSet::range(3), {{{0}, 0.0}, {{1, 2}, 2.0}, {{2}, 0.0}}, 1.0);
  REQUIRE(m.interactions.size() == 1);
  CHECK(m.interactions[0].sites == std::vector<std::size_t>{1, 2});
  CHECK(m.stability_constant == doctest::Approx(4.0 / 3.0));
  const auto sample = sample_disorder(m, NormalStream(1), 0, 0);
  CHECK(sample.couplings.size() == 1);
}

TEST_CASE("site order is lexicographic over labels") {
  const SiteSet s({{1, 0}, {0, 1}, {0, 0}});
  CHECK(s.label(0) == SiteLabel{0, 0});
  CHECK(s.label(1) == SiteLabel{0, 1});
  CHECK(s.label(2) == SiteLabel{1, 0});
  CHECK(s.index_of({1, 0}) == 2);
  CHECK_THROWS_AS(s.index_of({2, 2}), ModelError);
}

TEST_CASE("spin configurations and indices are a bijection") {
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    const auto c = SpinConfig::from_index(6, idx);
    CHECK(SpinConfig::from_spins(c.spins).index == idx);
  }
  CHECK(SpinConfig::from_index(3, 0).spins == std::vector<int>{1, 1, 1});
  CHECK(SpinConfig::from_index(3, 5).spins == std::vector<int>{-1, 1, -1});
  CHECK_THROWS(SpinConfig::from_spins({1, 0}));
}

TEST_CASE("disorder sampling") {
  const auto m = build_model(ModelKind::custom, {2, {}, {{{0}, 0.5}, {{0, 1}, 2.0}}}, 1.0);
  const NormalStream stream(9);
  SUBCASE("deterministic per address") {
    const auto a = sample_disorder(m, stream, 17, 1);
    const auto b = sample_disorder(m, stream, 17, 1);
    CHECK(a.couplings == b.couplings);
    CHECK(a.copy_id == 1);
    CHECK(a.sample_index == 17);
    CHECK(sample_disorder(m, stream, 17, 2).couplings != a.couplings);
  }
  SUBCASE("empirical variance matches delta^2") {
    const int n = 100000;
    std::vector<double> s1(2, 0.0), s2(2, 0.0), s4(2, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto s = sample_disorder(m, stream, i, 0);
      for (int k = 0; k < 2; ++k) {
        const double x2 = s.couplings[k] * s.couplings[k];
        s1[k] += s.couplings[k];
        s2[k] += x2;
        s4[k] += x2 * x2;
      }
    }
    for (int k = 0; k < 2; ++k) {
      const double var = m.interactions[k].variance();
      const double mean_sq = s2[k] / n;
      const double err = std::sqrt((s4[k] / n - mean_sq * mean_sq) / n);
      CHECK(std::abs(mean_sq - var) <= 5.0 * err);
      CHECK(std::abs(s1[k] / n) <= 5.0 * std::sqrt(var / n));
    }
  }
}

TEST_CASE("hamiltonian") {
  SUBCASE("single random field site") {
    const auto m = build_model(ModelKind::random_field, {1, {}, {}}, 1.0);
    DisorderSample s{{0.8}, 0, 0};
    CHECK(hamiltonian(m, s, spins({1}), full_region(m), false) == -0.8);
    CHECK(hamiltonian(m, s, spins({1}), full_region(m), true) == 0.8);
  }
  SUBCASE("empty flip region changes nothing") {
    const auto m = chain(4);
    const auto s = sample_disorder(m, NormalStream(3), 0, 0);
    const auto sigma = spins({1, -1, -1, 1});
    CHECK(hamiltonian(m, s, sigma, empty_region(m), true) ==
          hamiltonian(m, s, sigma, empty_region(m), false));
  }
  SUBCASE("chain of three against a bond sum") {
    const auto m = chain(3);
    DisorderSample s{{0.3, -1.7}, 0, 0};
    const auto sigma = spins({1, -1, 1});
    CHECK(hamiltonian(m, s, sigma, full_region(m), false) == doctest::Approx(-(0.3 * -1 + -1.7 * -1)));
    const auto region = make_flip_region(m, {0, 1});
    CHECK(hamiltonian(m, s, sigma, region, true) == doctest::Approx(-(-0.3 * -1 + -1.7 * -1)));
  }
  SUBCASE("flipping twice is the identity") {
    for (const auto& m : small_models()) {
      const auto s = sample_disorder(m, NormalStream(5), 2, 0);
      const auto region = make_flip_region(m, {0, 1, 2});
      const auto twice = flip_inside(flip_inside(s, region), region);
      CHECK(twice.couplings == s.couplings);
      const auto sigma = SpinConfig::from_index(m.size(), 5);
      CHECK(hamiltonian(m, twice, sigma, region, false) == hamiltonian(m, s, sigma, region, false));
      CHECK(hamiltonian(m, flip_inside(s, region), sigma, region, false) ==
            hamiltonian(m, s, sigma, region, true));
    }
  }
  SUBCASE("size mismatch") {
    const auto m = chain(3);
    CHECK_THROWS(hamiltonian(m, DisorderSample{{1.0}, 0, 0}, spins({1, 1, 1}), full_region(m), false));
  }
}

TEST_CASE("flip regions partition by subset inclusion") {
  const auto m = build_model(ModelKind::custom,
                             {4, {}, {{{0, 1}, 1.0}, {{1, 2}, 1.0}, {{2}, 1.0}, {{0, 3}, 1.0}}}, 1.0);
  const auto r = make_flip_region(m, {2, 1});
  CHECK(r.sites == std::vector<std::size_t>{1, 2});
  CHECK(r.inside == std::vector<std::size_t>{1, 2});
  CHECK(r.outside == std::vector<std::size_t>{0, 3});
  CHECK(full_region(m).inside.size() == 4);
  CHECK(empty_region(m).outside.size() == 4);
  CHECK(empty_region(m).volume() == 0);
  CHECK_THROWS(make_flip_region(m, {7}));
}

TEST_CASE("covariance examples") {
  const auto rf = build_model(ModelKind::random_field, {3, {}, {}}, 1.0);
  CHECK(covariance(rf, spins({1, -1, 1}), spins({1, -1, 1})) == 3.0);
  const auto rf2 = build_model(ModelKind::random_field, {2, {}, {}}, 1.0);
  CHECK(covariance(rf2, spins({1, 1}), spins({1, -1})) == 0.0);
  const auto c3 = chain(3);
  CHECK(covariance(c3, spins({1, 1, -1}), spins({1, -1, -1})) == -2.0);
  CHECK(normalized_overlap(c3, spins({1, 1, -1}), spins({1, -1, -1}), full_region(c3)) ==
        doctest::Approx(-2.0 / 3.0));
  CHECK(normalized_overlap(rf, spins({1, 1, -1}), spins({1, 1, -1}), full_region(rf)) == 1.0);
  CHECK_THROWS(normalized_overlap(rf, spins({1, 1, 1}), spins({1, 1, 1}), empty_region(rf)));
}

TEST_CASE("covariance properties, exhaustive") {
  for (const auto& m : small_models()) {
    const std::uint64_t count = std::uint64_t{1} << m.size();
    const double diag = m.variance_sum();
    const double cap = m.stability_constant * static_cast<double>(m.size());
    for (std::uint64_t a = 0; a < count; ++a) {
      const auto sa = SpinConfig::from_index(m.size(), a);
      CHECK(covariance(m, sa, sa) == doctest::Approx(diag));
      for (std::uint64_t b = 0; b < count; ++b) {
        const auto sb = SpinConfig::from_index(m.size(), b);
        const double c = covariance(m, sa, sb);
        CHECK(c == covariance(m, sb, sa));
        CHECK(std::abs(c) <= diag + 1e-12);
        CHECK(c <= cap + 1e-12);
      }
    }
  }
}

TEST_CASE("normalized overlap is bounded on random pairs") {
  std::mt19937_64 rng(11);
  for (const auto& m : small_models()) {
    const auto region = make_flip_region(m, {0, 1});
    const double cap = m.stability_constant * m.size() / static_cast<double>(region.volume());
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << m.size()) - 1);
    for (int k = 0; k < 100; ++k) {
      const auto a = SpinConfig::from_index(m.size(), pick(rng));
      const auto b = SpinConfig::from_index(m.size(), pick(rng));
      CHECK(std::abs(normalized_overlap(m, a, b, region)) <= cap + 1e-12);
    }
  }
}

TEST_CASE("model documents") {
  const auto m = model_from_json(nlohmann::json::parse(
      R"({"kind": "custom", "sites": 3, "beta": 0.5,
          "interactions": [{"sites": [0, 2], "delta": 1.5}, {"sites": [1], "delta": 0}]})"));
  CHECK(m.beta == 0.5);
  REQUIRE(m.interactions.size() == 1);
  CHECK(m.interactions[0].sites == std::vector<std::size_t>{0, 2});

  const auto g = model_from_json(nlohmann::json::parse(R"({"kind": "ea_grid", "dims": [2, 2]})"));
  CHECK(g.interactions.size() == 4);
  const auto summary = model_to_json(g);
  CHECK(summary["kind"] == "ea_grid");
  CHECK(summary["sites"] == 4);
  CHECK(summary["interactions"] == 4);
  CHECK(summary["stability_constant"] == g.stability_constant);

  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"kind": "sk", "sites": 3, "colour": 1})")),
                  ModelError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"sites": 3})")), ModelError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"kind": "sk"})")), ModelError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"kind": "sk", "sites": 3, "beta": 0})")),
                  ModelError);
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(
          R"({"kind": "custom", "sites": 2, "interactions": [{"sites": [0], "delta": 1, "x": 0}]})")),
      ModelError);
}
