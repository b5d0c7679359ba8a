#include "mfchaos/noise.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "mfchaos/errors.hpp"
#include "mfchaos/parallel.hpp"

namespace mfchaos {

namespace {

// The FFTW planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
}

}  // namespace

double fbm_covariance(double t, double s, double hurst) {
  check_hurst(hurst);
  if (!(t >= 0.0) || !(s >= 0.0)) throw DomainError("fbm_covariance: times must be >= 0");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(std::size_t lag, double hurst) {
  check_hurst(hurst);
  const double h2 = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  const double km1 = lag == 0 ? 1.0 : k - 1.0;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(km1, h2));
}

struct FbmGenerator::Impl {
  // Circulant route.
  std::vector<double> sqrt_eigen;  // sqrt(lambda_j / M)
  fftw_plan plan = nullptr;
  // Cholesky route.
  Eigen::MatrixXd lower;

  ~Impl() {
    if (plan != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FbmGenerator::FbmGenerator(std::size_t steps, double dt, double hurst, Method method)
    : steps_(steps), dt_(dt), hurst_(hurst), method_(method), impl_(std::make_unique<Impl>()) {
  check_hurst(hurst);
  if (steps < 1) throw DomainError("FbmGenerator: steps must be >= 1");
  if (!(dt > 0.0)) throw DomainError("FbmGenerator: dt must be > 0");

  if (method != Method::cholesky) {
    const std::size_t m = 2 * steps;
    std::vector<std::complex<double>> c(m), lambda(m);
    for (std::size_t k = 0; k <= steps; ++k) c[k] = fgn_autocovariance(k, hurst);
    for (std::size_t k = 1; k < steps; ++k) c[m - k] = c[k];
    {
      std::lock_guard lock(planner_mutex());
      impl_->plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(c.data()),
                                     reinterpret_cast<fftw_complex*>(lambda.data()), FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(impl_->plan);
    double largest = 0.0;
    double smallest = 0.0;
    for (const auto& l : lambda) {
      largest = std::max(largest, l.real());
      smallest = std::min(smallest, l.real());
    }
    if (smallest < -1e-12 * largest) {
      if (method == Method::circulant) {
        throw DomainError("FbmGenerator: circulant embedding is not nonnegative definite");
      }
      fallback_ = true;
    } else {
      impl_->sqrt_eigen.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        impl_->sqrt_eigen[j] = std::sqrt(std::max(lambda[j].real(), 0.0) / static_cast<double>(m));
      }
      method_ = Method::circulant;
    }
  }

  if (method == Method::cholesky || fallback_) {
    const auto n = static_cast<Eigen::Index>(steps);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        cov(i, j) = fgn_autocovariance(static_cast<std::size_t>(std::abs(i - j)), hurst);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DomainError("FbmGenerator: covariance is not positive definite");
    impl_->lower = llt.matrixL();
    method_ = Method::cholesky;
  }
}

FbmGenerator::~FbmGenerator() = default;
FbmGenerator::FbmGenerator(FbmGenerator&&) noexcept = default;
FbmGenerator& FbmGenerator::operator=(FbmGenerator&&) noexcept = default;

void FbmGenerator::increments(RngStream& rng, std::span<double> out) const {
  if (out.size() != steps_) throw DomainError("FbmGenerator: output length must equal steps");
  const double scale = std::pow(dt_, hurst_);
  if (method_ == Method::circulant) {
    const std::size_t m = 2 * steps_;
    std::vector<std::complex<double>> z(m), y(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double a = rng.normal();
      const double b = rng.normal();
      z[j] = impl_->sqrt_eigen[j] * std::complex<double>(a, b);
    }
    fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(z.data()),
                     reinterpret_cast<fftw_complex*>(y.data()));
    for (std::size_t k = 0; k < steps_; ++k) out[k] = scale * y[k].real();
    return;
  }
  const auto n = static_cast<Eigen::Index>(steps_);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = impl_->lower.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = scale * x(i);
}

NoisePath sample_brownian(const TimeGrid& grid, std::size_t dim, RngStream& rng) {
  NoisePath path;
  path.grid = grid;
  path.dim = dim;
  path.hurst = 0.5;
  path.values.assign(grid.points() * dim, 0.0);
  const double sd = std::sqrt(grid.dt());
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t k = 0; k < grid.steps(); ++k) {
      path.values[(k + 1) * dim + c] = path.values[k * dim + c] + sd * rng.normal();
    }
  }
  return path;
}

NoisePath sample_fbm(const TimeGrid& grid, double hurst, std::size_t dim, RngStream& rng) {
  const FbmGenerator gen(grid.steps(), grid.dt(), hurst);
  NoisePath path;
  path.grid = grid;
  path.dim = dim;
  path.hurst = hurst;
  path.used_fallback = gen.used_fallback();
  path.values.assign(grid.points() * dim, 0.0);
  std::vector<double> inc(grid.steps());
  for (std::size_t c = 0; c < dim; ++c) {
    gen.increments(rng, inc);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
      path.values[(k + 1) * dim + c] = path.values[k * dim + c] + inc[k];
    }
  }
  return path;
}

CovarianceCheck fbm_covariance_check(std::size_t points, double horizon, double hurst, std::size_t paths,
                                     std::uint64_t seed, double sigmas, std::size_t threads,
                                     FbmGenerator::Method method) {
  if (points < 1 || paths < 2) throw DomainError("fbm_covariance_check: need points >= 1 and paths >= 2");
  if (!(horizon > 0.0)) throw DomainError("fbm_covariance_check: horizon must be > 0");
  const double dt = horizon / static_cast<double>(points);
  const FbmGenerator gen(points, dt, hurst, method);
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (paths + kChunk - 1) / kChunk;
  const std::size_t cells = points * points;
  std::vector<double> sum(chunks * cells, 0.0), sum_sq(chunks * cells, 0.0);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    std::vector<double> inc(points), b(points);
    double* s1 = sum.data() + chunk * cells;
    double* s2 = sum_sq.data() + chunk * cells;
    const std::size_t end = std::min(paths, (chunk + 1) * kChunk);
    for (std::size_t p = chunk * kChunk; p < end; ++p) {
      RngStream rng(seed, p, 0, kStreamNoise);
      gen.increments(rng, inc);
      double acc = 0.0;
      for (std::size_t i = 0; i < points; ++i) b[i] = acc += inc[i];
      for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t j = 0; j < points; ++j) {
          const double v = b[i] * b[j];
          s1[i * points + j] += v;
          s2[i * points + j] += v * v;
        }
      }
    }
  });
  CovarianceCheck check;
  check.hurst = hurst;
  check.paths = paths;
  check.used_fallback = gen.used_fallback();
  check.pass = true;
  const double m = static_cast<double>(paths);
  for (std::size_t c = 0; c < cells; ++c) {
    double a = 0.0, a2 = 0.0;
    for (std::size_t ch = 0; ch < chunks; ++ch) {
      a += sum[ch * cells + c];
      a2 += sum_sq[ch * cells + c];
    }
    CovarianceCell cell;
    cell.t = static_cast<double>(c / points + 1) * dt;
    cell.s = static_cast<double>(c % points + 1) * dt;
    cell.empirical = a / m;
    cell.exact = fbm_covariance(cell.t, cell.s, hurst);
    const double var = std::max(0.0, (a2 / m - cell.empirical * cell.empirical) * m / (m - 1.0));
    cell.std_error = std::sqrt(var / m);
    const double z = std::abs(cell.empirical - cell.exact) / cell.std_error;
    check.max_abs_z = std::max(check.max_abs_z, z);
    if (!(std::abs(cell.empirical - cell.exact) <= sigmas * cell.std_error)) check.pass = false;
    check.cells.push_back(cell);
  }
  return check;
}

}  // namespace mfchaos
