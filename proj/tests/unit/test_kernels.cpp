#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mfchaos/config.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/kernels.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/torus.hpp"

using namespace mfchaos;

namespace {

TorusPoint tp(double a, double b) { return TorusPoint(std::vector<double>{a, b}); }

SimConfig base_config(const std::string& interaction, DomainKind domain, std::size_t dim) {
  SimConfig c;
  c.domain = domain;
  c.dim = dim;
  c.n_particles = 4;
  c.interaction.name = interaction;
  if (interaction == "smooth_divfree") c.interaction.params["m"] = {1};
  c.initial.kind = domain == DomainKind::torus ? InitialLaw::Kind::uniform : InitialLaw::Kind::gaussian;
  return c;
}

// Direct (n-1)^{-1} sum_{j != i} b(X^i, X^j) through evaluate().
std::vector<double> brute_average(const InteractionTerm& term, const std::vector<double>& states, std::size_t n,
                                  std::size_t dim) {
  std::vector<double> out(n * dim, 0.0), tmp(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const PathView xi(states.data() + i * dim, n * dim, dim, 0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const PathView xj(states.data() + j * dim, n * dim, dim, 0, 0.0);
      term.evaluate(xi, xj, tmp);
      for (std::size_t c = 0; c < dim; ++c) out[i * dim + c] += tmp[c] / static_cast<double>(n - 1);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("free Biot-Savart kernel values and symmetries") {
    const Vec2 k = biot_savart_free({0.25, 0.0});
    CHECK(k[0] == doctest::Approx(0.0));
    CHECK(k[1] == doctest::Approx(-0.6366197723675813).epsilon(1e-14));
    const Vec2 a = biot_savart_free({0.1, 0.2});
    const Vec2 b = biot_savart_free({-0.1, -0.2});
    CHECK(std::abs(a[0] + b[0]) <= 1e-12);
    CHECK(std::abs(a[1] + b[1]) <= 1e-12);
    CHECK(0.1 * a[0] + 0.2 * a[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(biot_savart_free({0.0, 0.0}), SingularityError);
  }

  TEST_CASE("periodic Biot-Savart matches an independent high-precision lattice sum") {
    const Vec2 k = biot_savart_periodic(tp(0.2, 0.1), 8, 0.0);
    CHECK(k[0] == doctest::Approx(0.3238166450512185685).epsilon(1e-12));
    CHECK(k[1] == doctest::Approx(-0.6356369920356574810).epsilon(1e-12));
    const Vec2 m = biot_savart_periodic(tp(-0.3, 0.35), 8, 0.0);
    CHECK(m[0] == doctest::Approx(0.2872502767322393820).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.2635960388605047205).epsilon(1e-12));
  }

  TEST_CASE("periodic Biot-Savart with an empty lattice equals the free kernel") {
    const Vec2 p = biot_savart_periodic(tp(0.25, 0.0), 0, 0.0);
    const Vec2 f = biot_savart_free({0.25, 0.0});
    CHECK(p[0] == f[0]);
    CHECK(p[1] == f[1]);
  }

  TEST_CASE("periodic Biot-Savart is exactly odd and exactly periodic") {
    RngStream rng(5, 0, 0);
    for (int i = 0; i < 500; ++i) {
      const double a = rng.uniform() - 0.5, b = rng.uniform() - 0.5;
      if (std::hypot(a, b) < 0.05 || a == -0.5 || b == -0.5) continue;
      const Vec2 plus = biot_savart_periodic(tp(a, b), 8, 0.0);
      const Vec2 minus = biot_savart_periodic(tp(-a, -b), 8, 0.0);
      REQUIRE(plus[0] == -minus[0]);
      REQUIRE(plus[1] == -minus[1]);
      const Vec2 shifted = biot_savart_periodic(tp(a + 1.0, b - 3.0), 8, 0.0);
      REQUIRE(shifted[0] == doctest::Approx(plus[0]).epsilon(1e-9));
      REQUIRE(shifted[1] == doctest::Approx(plus[1]).epsilon(1e-9));
    }
  }

  TEST_CASE("periodic Biot-Savart lattice tail settles between R = 8 and R = 16") {
    for (int i = -4; i <= 4; ++i) {
      for (int j = -4; j <= 4; ++j) {
        const double a = 0.1 * i, b = 0.1 * j + 0.05;
        if (std::hypot(a, b) < 0.1) continue;
        const Vec2 r8 = biot_savart_periodic(tp(a, b), 8, 0.0);
        const Vec2 r16 = biot_savart_periodic(tp(a, b), 16, 0.0);
        REQUIRE(std::hypot(r8[0] - r16[0], r8[1] - r16[1]) < 1e-2);
      }
    }
  }

  TEST_CASE("periodic Biot-Savart refuses the eps-ball and the regularized variant freezes") {
    CHECK_THROWS_AS(biot_savart_periodic(tp(0.001, 0.0), 8, 0.01), SingularityError);
    CHECK_THROWS_AS(biot_savart_periodic(tp(0.0, 0.0), 8, 0.0), SingularityError);
    const Vec2 inside = biot_savart_periodic_regularized({0.001, 0.0}, 8, 0.01);
    const Vec2 sphere = biot_savart_periodic(tp(0.01, 0.0), 8, 0.0);
    CHECK(inside[0] == doctest::Approx(sphere[0]).epsilon(1e-12));
    CHECK(inside[1] == doctest::Approx(sphere[1]).epsilon(1e-12));
    const Vec2 origin = biot_savart_periodic_regularized({0.0, 0.0}, 8, 0.01);
    CHECK(origin[0] == 0.0);
    CHECK(origin[1] == 0.0);
    const Vec2 outside = biot_savart_periodic_regularized({0.2, 0.1}, 8, 0.01);
    CHECK(outside[0] == biot_savart_periodic(tp(0.2, 0.1), 8, 0.01)[0]);
  }

  TEST_CASE("periodic Biot-Savart divergence at the reference probe") {
    auto k = [](Vec2 x) { return biot_savart_periodic(wrap_torus(std::vector<double>{x[0], x[1]}), 8, 0.0); };
    CHECK(std::abs(numeric_divergence(k, {0.2, 0.3}, 1e-4)) < 1e-3);
  }

  TEST_CASE("smooth divergence-free kernel") {
    const Vec2 z = smooth_divfree_kernel(tp(0.0, 0.0), 3);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    double sup = 0.0;
    for (int i = 0; i < 64; ++i) {
      for (int j = 0; j < 64; ++j) {
        const Vec2 v = smooth_divfree_kernel(tp(-0.5 + i / 64.0, -0.5 + j / 64.0), 1);
        sup = std::max({sup, std::abs(v[0]), std::abs(v[1])});
      }
    }
    CHECK(sup == doctest::Approx(1.0).epsilon(1e-9));
    auto k = [](Vec2 x) { return smooth_divfree_kernel(wrap_torus(std::vector<double>{x[0], x[1]}), 2); };
    CHECK(std::abs(numeric_divergence(k, {0.13, -0.31}, 1e-4)) < 1e-6);
  }

  TEST_CASE("grid L^p quadrature stabilizes for p < 2 and grows for p = 2") {
    auto k = [](Vec2 x) { return biot_savart_periodic_regularized(x, 8, 0.0); };
    const double a = grid_lp_integral(k, 64, 1.5);
    const double b = grid_lp_integral(k, 128, 1.5);
    CHECK(std::abs(b - a) / b < 0.05);
    const double c = grid_lp_integral(k, 32, 2.0);
    const double d = grid_lp_integral(k, 256, 2.0);
    CHECK(d > c + 0.2);
  }

  TEST_CASE("KernelSpec validation") {
    KernelSpec s;
    s.kind = KernelSpec::Kind::biot_savart_periodic;
    s.dim = 3;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.dim = 2;
    s.truncation_radius = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.truncation_radius = 8;
    s.regularization_eps = -1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.regularization_eps = 0.01;
    CHECK_NOTHROW(s.validate());
    s.kind = KernelSpec::Kind::custom;
    CHECK_THROWS_AS(s.validate(), DomainError);
  }

  TEST_CASE("fast population averages agree with the pairwise loop") {
    struct Case {
      std::string name;
      DomainKind domain;
      std::size_t dim;
    };
    for (const Case& c : {Case{"smooth_divfree", DomainKind::torus, 2}, Case{"linear_sum", DomainKind::euclidean, 1},
                          Case{"attraction", DomainKind::euclidean, 2}, Case{"mean_linear", DomainKind::euclidean, 3},
                          Case{"biot_savart_periodic", DomainKind::torus, 2},
                          Case{"sin_indicator", DomainKind::euclidean, 1}}) {
      const SimConfig cfg = base_config(c.name, c.domain, c.dim);
      const auto term = make_interaction(cfg);
      const std::size_t n = 37;
      std::vector<double> states(n * c.dim);
      RngStream rng(17, 0, 0);
      for (double& v : states) v = rng.uniform() - 0.5;
      const Population pop{states.data(), n, c.dim, 0, 0, 0.0};
      std::vector<double> fast(n * c.dim);
      term->population_average(pop, fast);
      const auto slow = brute_average(*term, states, n, c.dim);
      for (std::size_t q = 0; q < fast.size(); ++q) {
        INFO(c.name);
        REQUIRE(fast[q] == doctest::Approx(slow[q]).epsilon(1e-10).scale(1.0));
      }
    }
  }

  TEST_CASE("linear growth validation") {
    const TimeGrid grid(0.0, 0.1, 10);
    std::vector<Path> paths;
    RngStream rng(23, 0, 0);
    for (int p = 0; p < 6; ++p) {
      Path path{1, std::vector<double>(grid.points())};
      for (double& v : path.values) v = 4.0 * (rng.uniform() - 0.5);
      paths.push_back(path);
    }
    const std::vector<double> times{0.0, 0.3, 0.7, 1.0};

    SimConfig zero = base_config("zero", DomainKind::euclidean, 1);
    const auto rz = validate_linear_growth(make_drift(zero), paths, grid, times);
    CHECK(rz.max_ratio == 0.0);
    CHECK(rz.pass);

    SimConfig lin = base_config("linear_sum", DomainKind::euclidean, 1);
    const DriftSpec dl = make_drift(lin);
    CHECK(dl.growth_constant == 1.0);
    const auto rl = validate_linear_growth(dl, paths, grid, times);
    CHECK(rl.max_ratio <= 1.0);
    CHECK(rl.pass);

    SimConfig quad = base_config("quadratic", DomainKind::euclidean, 1);
    quad.interaction.params["growth_constant"] = {5.0};
    const DriftSpec dq = make_drift(quad);
    CHECK(dq.growth_constant == 5.0);
    paths[0].values.assign(grid.points(), 10.0);
    const auto rq = validate_linear_growth(dq, paths, grid, times);
    CHECK_FALSE(rq.pass);
  }

  TEST_CASE("drift evaluation at time t ignores the path after t") {
    SimConfig cfg = base_config("path_sup", DomainKind::euclidean, 1);
    cfg.b0.name = "ou";
    cfg.b0.params["theta"] = {1.5};
    const DriftSpec drift = make_drift(cfg);
    std::vector<double> x{0.0, 1.0, -2.0, 0.5, 0.1}, y{0.3, 0.2, 0.7, -0.1, 0.0};
    auto eval = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
      std::vector<double> b(1), b0(1);
      drift.interaction->evaluate(PathView(xs.data(), 1, 1, 2, 0.2), PathView(ys.data(), 1, 1, 2, 0.2), b);
      drift.b0->evaluate(PathView(xs.data(), 1, 1, 2, 0.2), b0);
      return std::make_pair(b[0], b0[0]);
    };
    const auto before = eval(x, y);
    x[3] = 100.0;
    x[4] = -100.0;
    y[3] = 50.0;
    CHECK(eval(x, y) == before);
    CHECK(before.first == doctest::Approx(0.7 - (-2.0)));
  }
}
