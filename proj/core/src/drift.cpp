#include "mfchaos/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfchaos/errors.hpp"
#include "mfchaos/torus.hpp"

namespace mfchaos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Population law_population(const double* states, std::size_t samples, std::size_t dim,
                          const TimeGrid& grid, std::size_t step) {
  return {states, samples, dim, step, step, grid.time(step)};
}

class GenericAverager final : public LawAverager {
 public:
  GenericAverager(const InteractionTerm& term, const double* states, std::size_t samples,
                  std::size_t dim, const TimeGrid& grid, std::size_t cap)
      : term_(term), states_(states), samples_(std::min(samples, cap)), all_(samples), dim_(dim),
        grid_(grid) {}

  void average(std::size_t grid_step, const PathView& x, std::span<double> out) const override {
    const Population law = law_population(states_, all_, dim_, grid_, grid_step);
    std::vector<double> tmp(dim_);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < samples_; ++j) {
      term_.evaluate(x, law.particle(j), tmp);
      for (std::size_t c = 0; c < dim_; ++c) out[c] += tmp[c];
    }
    const double inv = 1.0 / static_cast<double>(samples_);
    for (std::size_t c = 0; c < dim_; ++c) out[c] *= inv;
  }

 private:
  const InteractionTerm& term_;
  const double* states_;
  std::size_t samples_;
  std::size_t all_;
  std::size_t dim_;
  TimeGrid grid_;
};

// ---- b0 terms ------------------------------------------------------------

class ZeroB0 final : public B0Term {
 public:
  std::string name() const override { return "zero"; }
  void evaluate(const PathView&, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
};

class OuB0 final : public B0Term {
 public:
  explicit OuB0(double theta) : theta_(theta) {}
  std::string name() const override { return "ou"; }
  void evaluate(const PathView& x, std::span<double> out) const override {
    const auto xt = x.current();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = -theta_ * xt[c];
  }

 private:
  double theta_;
};

class ConstantB0 final : public B0Term {
 public:
  explicit ConstantB0(std::vector<double> c) : c_(std::move(c)) {}
  std::string name() const override { return "constant"; }
  void evaluate(const PathView&, std::span<double> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c_[i];
  }

 private:
  std::vector<double> c_;
};

class QuadraticB0 final : public B0Term {
 public:
  std::string name() const override { return "quadratic"; }
  void evaluate(const PathView& x, std::span<double> out) const override {
    const auto xt = x.current();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = xt[c] * xt[c];
  }
};

// ---- interaction terms ---------------------------------------------------

class ZeroInteraction final : public InteractionTerm {
 public:
  std::string name() const override { return "zero"; }
  void evaluate(const PathView&, const PathView&, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  void population_average(const Population&, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  class Averager final : public LawAverager {
   public:
    void average(std::size_t, const PathView&, std::span<double> out) const override {
      std::fill(out.begin(), out.end(), 0.0);
    }
  };
  std::unique_ptr<LawAverager> averager(const double*, std::size_t, std::size_t, const TimeGrid&,
                                        std::size_t) const override {
    return std::make_unique<Averager>();
  }
};

class KernelInteraction final : public InteractionTerm {
 public:
  KernelInteraction(KernelSpec kernel, bool torus) : kernel_(std::move(kernel)), torus_(torus) {
    kernel_.validate();
  }

  std::string name() const override {
    switch (kernel_.kind) {
      case KernelSpec::Kind::biot_savart_free:
        return "biot_savart_free";
      case KernelSpec::Kind::biot_savart_periodic:
        return "biot_savart_periodic";
      case KernelSpec::Kind::smooth_divfree:
        return "smooth_divfree";
      case KernelSpec::Kind::custom:
        break;
    }
    return "custom";
  }

  void evaluate(const PathView& x, const PathView& y, std::span<double> out) const override {
    double disp[3];
    displacement(x.current(), y.current(), disp);
    kernel_.evaluate({disp, x.dim()}, out);
  }

  void population_average(const Population& pop, std::span<double> out) const override {
    if (kernel_.kind == KernelSpec::Kind::smooth_divfree) {
      smooth_population(pop, out);
      return;
    }
    if (kernel_.kind == KernelSpec::Kind::custom) {
      InteractionTerm::population_average(pop, out);
      return;
    }
    // Odd kernels: each unordered pair is evaluated once.
    const std::size_t d = pop.dim;
    std::fill(out.begin(), out.end(), 0.0);
    double disp[3];
    double v[3];
    for (std::size_t i = 0; i < pop.n; ++i) {
      const auto xi = pop.current(i);
      for (std::size_t j = i + 1; j < pop.n; ++j) {
        displacement(xi, pop.current(j), disp);
        kernel_.evaluate({disp, d}, {v, d});
        for (std::size_t c = 0; c < d; ++c) {
          out[i * d + c] += v[c];
          out[j * d + c] -= v[c];
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(pop.n - 1);
    for (double& o : out) o *= inv;
  }

  std::unique_ptr<LawAverager> averager(const double* states, std::size_t samples, std::size_t dim,
                                        const TimeGrid& grid, std::size_t cap) const override {
    if (kernel_.kind == KernelSpec::Kind::smooth_divfree) {
      return std::make_unique<SmoothAverager>(states, samples, grid, frequency());
    }
    return std::make_unique<GenericAverager>(*this, states, samples, dim, grid, cap);
  }

 private:
  // sum_j sin(w (a_i - a_j)) = sin(w a_i) sum_j cos(w a_j) - cos(w a_i) sum_j sin(w a_j);
  // the j = i term cancels exactly.
  class SmoothAverager final : public LawAverager {
   public:
    SmoothAverager(const double* states, std::size_t samples, const TimeGrid& grid, double w)
        : w_(w), moments_(grid.points() * 4, 0.0) {
      for (std::size_t s = 0; s < grid.points(); ++s) {
        const double* p = states + s * samples * 2;
        double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0;
        for (std::size_t j = 0; j < samples; ++j) {
          s1 += std::sin(w * p[2 * j]);
          c1 += std::cos(w * p[2 * j]);
          s2 += std::sin(w * p[2 * j + 1]);
          c2 += std::cos(w * p[2 * j + 1]);
        }
        const double inv = 1.0 / static_cast<double>(samples);
        moments_[4 * s + 0] = s1 * inv;
        moments_[4 * s + 1] = c1 * inv;
        moments_[4 * s + 2] = s2 * inv;
        moments_[4 * s + 3] = c2 * inv;
      }
    }
    void average(std::size_t grid_step, const PathView& x, std::span<double> out) const override {
      const double* m = moments_.data() + 4 * grid_step;
      const auto xt = x.current();
      out[0] = std::sin(w_ * xt[1]) * m[3] - std::cos(w_ * xt[1]) * m[2];
      out[1] = std::sin(w_ * xt[0]) * m[1] - std::cos(w_ * xt[0]) * m[0];
    }

   private:
    double w_;
    std::vector<double> moments_;
  };

  double frequency() const { return 2.0 * std::numbers::pi * kernel_.frequency; }

  void smooth_population(const Population& pop, std::span<double> out) const {
    const double w = frequency();
    const std::size_t n = pop.n;
    std::vector<double> trig(4 * n);
    double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = pop.current(i);
      trig[4 * i + 0] = std::sin(w * x[0]);
      trig[4 * i + 1] = std::cos(w * x[0]);
      trig[4 * i + 2] = std::sin(w * x[1]);
      trig[4 * i + 3] = std::cos(w * x[1]);
      s1 += trig[4 * i + 0];
      c1 += trig[4 * i + 1];
      s2 += trig[4 * i + 2];
      c2 += trig[4 * i + 3];
    }
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double* t = trig.data() + 4 * i;
      out[2 * i + 0] = (t[2] * c2 - t[3] * s2) * inv;
      out[2 * i + 1] = (t[0] * c1 - t[1] * s1) * inv;
    }
  }

  void displacement(std::span<const double> x, std::span<const double> y, double* out) const {
    for (std::size_t c = 0; c < x.size(); ++c) {
      out[c] = torus_ ? wrap_coordinate(x[c] - y[c]) : x[c] - y[c];
    }
  }

  KernelSpec kernel_;
  bool torus_;
};

// b(t, x, y) = a x_t + c y_t.
class LinearInteraction final : public InteractionTerm {
 public:
  LinearInteraction(std::string name, double a, double c) : name_(std::move(name)), a_(a), c_(c) {}
  std::string name() const override { return name_; }

  void evaluate(const PathView& x, const PathView& y, std::span<double> out) const override {
    const auto xt = x.current();
    const auto yt = y.current();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a_ * xt[i] + c_ * yt[i];
  }

  void population_average(const Population& pop, std::span<double> out) const override {
    const std::size_t d = pop.dim;
    double sum[3] = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < pop.n; ++j) {
      const auto x = pop.current(j);
      for (std::size_t c = 0; c < d; ++c) sum[c] += x[c];
    }
    const double inv = 1.0 / static_cast<double>(pop.n - 1);
    for (std::size_t i = 0; i < pop.n; ++i) {
      const auto x = pop.current(i);
      for (std::size_t c = 0; c < d; ++c) out[i * d + c] = a_ * x[c] + c_ * (sum[c] - x[c]) * inv;
    }
  }

  class Averager final : public LawAverager {
   public:
    Averager(const double* states, std::size_t samples, std::size_t dim, const TimeGrid& grid,
             double a, double c)
        : dim_(dim), a_(a), c_(c), means_(grid.points() * dim, 0.0) {
      for (std::size_t s = 0; s < grid.points(); ++s) {
        const double* p = states + s * samples * dim;
        for (std::size_t j = 0; j < samples; ++j) {
          for (std::size_t k = 0; k < dim; ++k) means_[s * dim + k] += p[j * dim + k];
        }
        for (std::size_t k = 0; k < dim; ++k) means_[s * dim + k] /= static_cast<double>(samples);
      }
    }
    void average(std::size_t grid_step, const PathView& x, std::span<double> out) const override {
      const auto xt = x.current();
      for (std::size_t k = 0; k < dim_; ++k) out[k] = a_ * xt[k] + c_ * means_[grid_step * dim_ + k];
    }

   private:
    std::size_t dim_;
    double a_;
    double c_;
    std::vector<double> means_;
  };

  std::unique_ptr<LawAverager> averager(const double* states, std::size_t samples, std::size_t dim,
                                        const TimeGrid& grid, std::size_t) const override {
    return std::make_unique<Averager>(states, samples, dim, grid, a_, c_);
  }

 private:
  std::string name_;
  double a_;
  double c_;
};

// b(t, x, y) = x_t * x_t componentwise; independent of y.
class QuadraticInteraction final : public InteractionTerm {
 public:
  std::string name() const override { return "quadratic"; }
  void evaluate(const PathView& x, const PathView&, std::span<double> out) const override {
    const auto xt = x.current();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = xt[c] * xt[c];
  }
  void population_average(const Population& pop, std::span<double> out) const override {
    for (std::size_t i = 0; i < pop.n; ++i) {
      const auto x = pop.current(i);
      for (std::size_t c = 0; c < pop.dim; ++c) out[i * pop.dim + c] = x[c] * x[c];
    }
  }
  class Averager final : public LawAverager {
   public:
    void average(std::size_t, const PathView& x, std::span<double> out) const override {
      const auto xt = x.current();
      for (std::size_t c = 0; c < out.size(); ++c) out[c] = xt[c] * xt[c];
    }
  };
  std::unique_ptr<LawAverager> averager(const double*, std::size_t, std::size_t, const TimeGrid&,
                                        std::size_t) const override {
    return std::make_unique<Averager>();
  }
};

// b(t, x, y) = h(x_t - y_t) componentwise with h(u) = u 1{sin u > 0}.
class SinIndicatorInteraction final : public InteractionTerm {
 public:
  explicit SinIndicatorInteraction(bool torus) : torus_(torus) {}
  std::string name() const override { return "sin_indicator"; }
  void evaluate(const PathView& x, const PathView& y, std::span<double> out) const override {
    const auto xt = x.current();
    const auto yt = y.current();
    for (std::size_t c = 0; c < out.size(); ++c) {
      const double u = torus_ ? wrap_coordinate(xt[c] - yt[c]) : xt[c] - yt[c];
      out[c] = std::sin(u) > 0.0 ? u : 0.0;
    }
  }

 private:
  bool torus_;
};

// b(t, x, y) = |y|_t - x_t componentwise, |y|_t the running sup norm.
class PathSupInteraction final : public InteractionTerm {
 public:
  std::string name() const override { return "path_sup"; }
  bool state_dependent() const override { return false; }

  void evaluate(const PathView& x, const PathView& y, std::span<double> out) const override {
    const double sup = y.sup_norm();
    const auto xt = x.current();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = sup - xt[c];
  }

  void population_average(const Population& pop, std::span<double> out) const override {
    std::vector<double> sups(pop.n);
    double total = 0.0;
    for (std::size_t j = 0; j < pop.n; ++j) {
      sups[j] = pop.particle(j).sup_norm();
      total += sups[j];
    }
    const double inv = 1.0 / static_cast<double>(pop.n - 1);
    for (std::size_t i = 0; i < pop.n; ++i) {
      const auto x = pop.current(i);
      for (std::size_t c = 0; c < pop.dim; ++c) out[i * pop.dim + c] = (total - sups[i]) * inv - x[c];
    }
  }

  class Averager final : public LawAverager {
   public:
    Averager(const double* states, std::size_t samples, std::size_t dim, const TimeGrid& grid)
        : mean_sup_(grid.points(), 0.0) {
      std::vector<double> running(samples, 0.0);
      for (std::size_t s = 0; s < grid.points(); ++s) {
        double total = 0.0;
        for (std::size_t j = 0; j < samples; ++j) {
          const double* p = states + (s * samples + j) * dim;
          double sq = 0.0;
          for (std::size_t c = 0; c < dim; ++c) sq += p[c] * p[c];
          running[j] = std::max(running[j], std::sqrt(sq));
          total += running[j];
        }
        mean_sup_[s] = total / static_cast<double>(samples);
      }
    }
    void average(std::size_t grid_step, const PathView& x, std::span<double> out) const override {
      const auto xt = x.current();
      for (std::size_t c = 0; c < out.size(); ++c) out[c] = mean_sup_[grid_step] - xt[c];
    }

   private:
    std::vector<double> mean_sup_;
  };

  std::unique_ptr<LawAverager> averager(const double* states, std::size_t samples, std::size_t dim,
                                        const TimeGrid& grid, std::size_t) const override {
    return std::make_unique<Averager>(states, samples, dim, grid);
  }
};

double interaction_growth(const SimConfig& config) {
  const auto& p = config.interaction.params;
  if (p.count("growth_constant")) return param_or(p, "growth_constant", kInf);
  const std::string& name = config.interaction.name;
  if (name == "zero") return 0.0;
  if (name == "linear_sum" || name == "attraction" || name == "mean_linear" ||
      name == "sin_indicator") {
    return 1.0;
  }
  if (name == "path_sup") return std::sqrt(static_cast<double>(config.dim));
  if (name == "smooth_divfree") return std::sqrt(2.0);
  return kInf;
}

double b0_growth(const TermSpec& spec) {
  if (spec.name == "zero") return 0.0;
  if (spec.name == "ou") return std::abs(param_or(spec.params, "theta", 1.0));
  if (spec.name == "constant") {
    double s = 0.0;
    for (double v : spec.params.at("c")) s += v * v;
    return std::sqrt(s);
  }
  return kInf;
}

}  // namespace

void InteractionTerm::population_average(const Population& pop, std::span<double> out) const {
  const std::size_t d = pop.dim;
  std::vector<double> tmp(d);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < pop.n; ++i) {
    const PathView xi = pop.particle(i);
    for (std::size_t j = 0; j < pop.n; ++j) {
      if (j == i) continue;
      evaluate(xi, pop.particle(j), tmp);
      for (std::size_t c = 0; c < d; ++c) out[i * d + c] += tmp[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(pop.n - 1);
  for (double& o : out) o *= inv;
}

std::unique_ptr<LawAverager> InteractionTerm::averager(const double* law_states,
                                                       std::size_t samples, std::size_t dim,
                                                       const TimeGrid& grid,
                                                       std::size_t cap) const {
  return std::make_unique<GenericAverager>(*this, law_states, samples, dim, grid, cap);
}

std::shared_ptr<const InteractionTerm> make_kernel_interaction(KernelSpec kernel, bool torus) {
  return std::make_shared<KernelInteraction>(std::move(kernel), torus);
}

std::shared_ptr<const B0Term> make_b0(const TermSpec& spec, std::size_t dim) {
  if (spec.name == "zero") return std::make_shared<ZeroB0>();
  if (spec.name == "ou") return std::make_shared<OuB0>(param_or(spec.params, "theta", 1.0));
  if (spec.name == "quadratic") return std::make_shared<QuadraticB0>();
  if (spec.name == "constant") {
    const auto it = spec.params.find("c");
    if (it == spec.params.end()) throw ConfigError("b0 constant: missing 'c'");
    std::vector<double> c = it->second;
    if (c.size() == 1) c.assign(dim, c.front());
    if (c.size() != dim) throw ConfigError("b0 constant: 'c' must have length dim");
    return std::make_shared<ConstantB0>(std::move(c));
  }
  throw ConfigError("unknown b0 '" + spec.name + "'");
}

std::shared_ptr<const InteractionTerm> make_interaction(const SimConfig& config) {
  const std::string& name = config.interaction.name;
  const bool torus = config.on_torus();
  if (name == "zero") return std::make_shared<ZeroInteraction>();
  if (name == "linear_sum") return std::make_shared<LinearInteraction>(name, 1.0, 1.0);
  if (name == "attraction") return std::make_shared<LinearInteraction>(name, -1.0, 1.0);
  if (name == "mean_linear") return std::make_shared<LinearInteraction>(name, 0.0, 1.0);
  if (name == "quadratic") return std::make_shared<QuadraticInteraction>();
  if (name == "sin_indicator") return std::make_shared<SinIndicatorInteraction>(torus);
  if (name == "path_sup") return std::make_shared<PathSupInteraction>();
  KernelSpec kernel;
  kernel.dim = config.dim;
  kernel.regularization_eps = config.regularization_eps();
  kernel.truncation_radius = config.numerics.lattice_radius;
  if (name == "smooth_divfree") {
    kernel.kind = KernelSpec::Kind::smooth_divfree;
    kernel.frequency = static_cast<int>(param_or(config.interaction.params, "m", 1.0));
  } else if (name == "biot_savart_free") {
    kernel.kind = KernelSpec::Kind::biot_savart_free;
  } else if (name == "biot_savart_periodic") {
    kernel.kind = KernelSpec::Kind::biot_savart_periodic;
  } else {
    throw ConfigError("unknown interaction '" + name + "'");
  }
  try {
    return make_kernel_interaction(kernel, torus);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

DriftSpec make_drift(const SimConfig& config) {
  DriftSpec drift;
  drift.b0 = make_b0(config.b0, config.dim);
  drift.interaction = make_interaction(config);
  drift.growth_constant = b0_growth(config.b0) + interaction_growth(config);
  drift.state_dependent = drift.b0->state_dependent() && drift.interaction->state_dependent();
  return drift;
}

GrowthReport validate_linear_growth(const DriftSpec& drift, const std::vector<Path>& paths,
                                    const TimeGrid& grid, const std::vector<double>& times) {
  if (paths.empty() || times.empty()) throw DomainError("validate_linear_growth: empty samples");
  const std::size_t d = paths.front().dim;
  std::vector<double> b0v(d), bv(d);
  GrowthReport report;
  for (double t : times) {
    const std::size_t s = grid.nearest(t).step;
    const double ts = grid.time(s);
    for (const Path& x : paths) {
      if (x.dim != d || x.points() <= s) throw DomainError("validate_linear_growth: path too short");
      const PathView xv = x.view(s, ts);
      const double xsup = xv.sup_norm();
      drift.b0->evaluate(xv, b0v);
      const double b0n = norm(b0v);
      for (const Path& y : paths) {
        if (y.dim != d || y.points() <= s) throw DomainError("validate_linear_growth: path too short");
        const PathView yv = y.view(s, ts);
        drift.interaction->evaluate(xv, yv, bv);
        const double ratio = (b0n + norm(bv)) / (1.0 + xsup + yv.sup_norm());
        report.max_ratio = std::max(report.max_ratio, ratio);
      }
    }
  }
  report.pass = report.max_ratio <= drift.growth_constant + 1e-9;
  return report;
}

}  // namespace mfchaos
