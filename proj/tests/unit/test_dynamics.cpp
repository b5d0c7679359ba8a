#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mfchaos/config.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/mean_field.hpp"
#include "stats.hpp"

using namespace mfchaos;
namespace st = mfchaos::test;

namespace {

SimConfig line_config(const std::string& interaction, std::vector<std::vector<double>> points, double dt,
                      std::size_t steps) {
  SimConfig c;
  c.domain = DomainKind::euclidean;
  c.dim = static_cast<std::size_t>(points.front().size());
  c.n_particles = std::max<std::size_t>(2, points.size());
  c.grid = TimeGrid(0.0, dt, steps);
  c.noise_scale = 0.0;
  c.interaction.name = interaction;
  c.initial.kind = InitialLaw::Kind::points;
  c.initial.points = std::move(points);
  c.seed = 3;
  c.replicas = 1;
  return c;
}

SimConfig smooth_torus(std::size_t n, std::size_t replicas, std::size_t steps) {
  SimConfig c;
  c.domain = DomainKind::torus;
  c.dim = 2;
  c.n_particles = n;
  c.grid = TimeGrid(0.0, 1e-2, steps);
  c.interaction.name = "smooth_divfree";
  c.interaction.params["m"] = {1};
  c.seed = 77;
  c.replicas = replicas;
  c.mean_field.samples = 2000;
  c.mean_field.iterations = 2;
  return c;
}

double terminal(const ParticleEnsemble& e, std::size_t replica, std::size_t particle) {
  return e.state(replica, e.recorded_steps.size() - 1, particle)[0];
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("zero drift and zero noise keep every particle in place") {
    SimConfig c = line_config("zero", {{0.25, -1.0}, {3.0, 0.5}, {-2.0, 7.0}}, 0.01, 50);
    const auto e = simulate_particle_system(c);
    for (std::size_t rec = 0; rec < e.recorded_steps.size(); ++rec) {
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(e.state(0, rec, i)[0] == c.initial.points[i][0]);
        CHECK(e.state(0, rec, i)[1] == c.initial.points[i][1]);
      }
    }
  }

  TEST_CASE("Ornstein-Uhlenbeck drift decays geometrically") {
    SimConfig c = line_config("zero", {{1.0}}, 1e-3, 1000);
    c.b0.name = "ou";
    c.b0.params["theta"] = {1.0};
    const auto e = simulate_particle_system(c);
    const double x = terminal(e, 0, 0);
    CHECK(x == doctest::Approx(0.36769542477096404).epsilon(1e-12));
    CHECK(std::abs(x - std::exp(-1.0)) < 2e-3);
  }

  TEST_CASE("two-body attraction contracts the gap at rate 2") {
    SimConfig c = line_config("attraction", {{1.0}, {-1.0}}, 1e-3, 1000);
    const auto e = simulate_particle_system(c);
    CHECK(terminal(e, 0, 0) == doctest::Approx(0.13506452244668361).epsilon(1e-12));
    CHECK(terminal(e, 0, 1) == doctest::Approx(-0.13506452244668361).epsilon(1e-12));
  }

  TEST_CASE("Euler scheme converges at first order in dt") {
    std::vector<double> errors;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
      SimConfig c = line_config("linear_sum", {{1.0}, {0.5}}, dt, static_cast<std::size_t>(std::lround(0.5 / dt)));
      const auto e = simulate_particle_system(c);
      errors.push_back(std::abs(terminal(e, 0, 0) + terminal(e, 0, 1) - 1.5 * std::exp(1.0)));
    }
    CHECK(errors[0] / errors[1] == doctest::Approx(2.0).epsilon(0.1));
    CHECK(errors[1] / errors[2] == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("linear growth keeps noiseless paths inside the Gronwall envelope") {
    SimConfig c = line_config("linear_sum", {{0.0}}, 1e-3, 500);
    c.n_particles = 8;
    c.initial = InitialLaw{};
    c.initial.kind = InitialLaw::Kind::gaussian;
    c.replicas = 40;
    const auto e = simulate_particle_system(c);
    for (std::size_t r = 0; r < e.replicas; ++r) {
      double start = 0.0;
      for (std::size_t i = 0; i < e.n; ++i) start = std::max(start, std::abs(e.state(r, 0, i)[0]));
      for (std::size_t rec = 0; rec < e.recorded_steps.size(); ++rec) {
        const double t = e.grid.time(e.recorded_steps[rec]);
        for (std::size_t i = 0; i < e.n; ++i) REQUIRE(std::abs(e.state(r, rec, i)[0]) <= start * std::exp(2.0 * t) + 1e-12);
      }
    }
  }

  TEST_CASE("simulation is bit-identical across thread counts") {
    SimConfig c = smooth_torus(6, 12, 20);
    SimulationOptions one, many;
    one.threads = 1;
    many.threads = 3;
    const auto a = simulate_particle_system(c, one);
    const auto b = simulate_particle_system(c, many);
    CHECK(a.states == b.states);
  }

  TEST_CASE("marginal extraction shape and the uniform start") {
    SimConfig c = smooth_torus(5, 3000, 10);
    SimulationOptions o;
    o.record_steps = {0, 5, 10};
    const auto e = simulate_particle_system(c, o);
    const Marginal m0 = extract_marginal(e, 2, 0.0);
    CHECK(m0.samples.rows == 3000);
    CHECK(m0.samples.cols == 4);
    CHECK_FALSE(m0.snapped);
    std::vector<double> xs;
    for (std::size_t r = 0; r < m0.samples.rows; ++r) xs.push_back(m0.samples.row(r)[3]);
    CHECK(st::ks_one_sample_pvalue(xs, [](double v) { return std::clamp(v + 0.5, 0.0, 1.0); }) > 1e-3);
    const Marginal snapped = extract_marginal(e, 1, 0.031);
    CHECK(snapped.snapped);
    CHECK(snapped.step == 5);
    CHECK_THROWS_AS(extract_marginal(e, 0, 0.05), DomainError);
    CHECK_THROWS_AS(extract_marginal(e, 6, 0.05), DomainError);
  }

  TEST_CASE("particles are exchangeable") {
    SimConfig c = smooth_torus(4, 4000, 20);
    const auto e = simulate_particle_system(c);
    std::vector<double> first, last;
    const std::size_t rec = e.recorded_steps.size() - 1;
    for (std::size_t r = 0; r < e.replicas; ++r) {
      (r % 2 == 0 ? first : last).push_back(e.state(r, rec, r % 2 == 0 ? 0 : 3)[1]);
    }
    CHECK(st::ks_two_sample_pvalue(first, last) > 1e-3);
  }

  TEST_CASE("mean-field law without interaction is the free diffusion") {
    SimConfig c = line_config("zero", {{0.0}}, 1e-2, 50);
    c.noise_scale = 1.0;
    c.mean_field.samples = 4000;
    c.mean_field.iterations = 1;
    const auto law = solve_mckean_vlasov_picard(c);
    std::vector<double> x;
    for (std::size_t j = 0; j < law.samples; ++j) x.push_back(law.state(50, j)[0]);
    CHECK(st::ks_one_sample_pvalue(x, [](double v) { return st::normal_cdf(v / std::sqrt(0.5)); }) > 1e-3);
    CHECK(law.residuals.size() == 1);
  }

  TEST_CASE("mean-field law with mean attraction grows the mean exponentially") {
    SimConfig c = line_config("mean_linear", {{1.0}}, 1e-3, 500);
    c.noise_scale = 1.0;
    c.mean_field.samples = 4000;
    c.mean_field.iterations = 6;
    const auto law = solve_mckean_vlasov_picard(c);
    std::vector<double> x;
    for (std::size_t j = 0; j < law.samples; ++j) x.push_back(law.state(500, j)[0]);
    CHECK(st::mean(x) == doctest::Approx(std::exp(0.5)).epsilon(0.05 / std::exp(0.5)));
    CHECK(law.converged);
  }

  TEST_CASE("the uniform law is stationary under a divergence-free kernel") {
    SimConfig c = smooth_torus(2, 1, 20);
    c.mean_field.samples = 6400;
    const auto law = solve_mckean_vlasov_picard(c);
    std::vector<double> counts(32, 0.0);
    for (std::size_t j = 0; j < law.samples; ++j) {
      const double v = law.state(20, j)[0];
      counts[std::min<std::size_t>(31, static_cast<std::size_t>((v + 0.5) * 32.0))] += 1.0;
    }
    CHECK(st::chi_square_pvalue(counts, std::vector<double>(32, 200.0)) > 1e-3);
  }

  TEST_CASE("reference copies follow the configured streams") {
    SimConfig c = smooth_torus(3, 5, 10);
    const auto law = solve_mckean_vlasov_picard(c);
    ReferenceOptions a, b;
    a.threads = 1;
    b.threads = 2;
    CHECK(sample_reference_copies(c, law, a).states == sample_reference_copies(c, law, b).states);
    SimConfig other = c;
    other.grid = TimeGrid(0.0, 1e-2, 12);
    CHECK_THROWS_AS(sample_reference_copies(other, law), ConfigError);
  }

  TEST_CASE("strided record steps include the terminal step") {
    const TimeGrid grid(0.0, 0.1, 10);
    CHECK(strided_steps(grid, 3) == std::vector<std::size_t>{0, 3, 6, 9, 10});
    CHECK(strided_steps(grid, 1).size() == 11);
  }
}
