#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <Eigen/LU>
#include <unistd.h>

#include "gplmk/shapes.hpp"

namespace gplmk::test {

std::vector<Eigen::Vector3d> random_cloud(Rng& rng, std::size_t n) {
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform());
  return pts;
}

KernelMatrix random_gram(Rng& rng, std::size_t n, std::size_t rank) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  KernelMatrix k;
  k.entries = a * a.transpose();
  k.bandwidth = 1.0;
  return k;
}

KernelMatrix random_psd(Rng& rng, std::size_t n, int kind) {
  switch (kind % 3) {
    case 0: {
      const double t = 0.02 + 0.2 * rng.uniform();
      return plain_kernel(random_cloud(rng, n), t);
    }
    case 1: {
      const double t = 0.02 + 0.2 * rng.uniform();
      const KernelMatrix plain = plain_kernel(random_cloud(rng, n), t);
      Eigen::VectorXd measure(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < measure.size(); ++i) measure[i] = 0.1 + rng.uniform();
      return reweighted_kernel(plain, measure);
    }
    default:
      return random_gram(rng, n, n);
  }
}

Eigen::VectorXd oracle_variance(const Eigen::MatrixXd& k, const std::vector<VertexId>& picks) {
  const Eigen::Index n = k.rows();
  const auto m = static_cast<Eigen::Index>(picks.size());
  Eigen::VectorXd sigma = k.diagonal();
  if (m == 0) return sigma;
  Eigen::MatrixXd sub(m, m);
  Eigen::MatrixXd cross(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    cross.row(a) = k.row(picks[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = k(picks[static_cast<std::size_t>(a)], picks[static_cast<std::size_t>(b)]);
  }
  const Eigen::MatrixXd inv = sub.inverse();
  for (Eigen::Index x = 0; x < n; ++x) sigma[x] -= cross.col(x).dot(inv * cross.col(x));
  return sigma;
}

std::vector<VertexId> oracle_greedy(const Eigen::MatrixXd& k, std::size_t count) {
  std::vector<VertexId> picks;
  const double slack = 1e-12 * k.diagonal().maxCoeff();
  while (picks.size() < count) {
    Eigen::VectorXd sigma = oracle_variance(k, picks);
    for (VertexId p : picks) sigma[p] = 0.0;
    const double best = sigma.maxCoeff();
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma[i] >= best - slack) {
        picks.push_back(static_cast<VertexId>(i));
        break;
      }
    }
  }
  return picks;
}

double pearson_upper(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  std::vector<double> x, y;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      x.push_back(a(i, j));
      y.push_back(b(i, j));
    }
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double anova_f(const std::vector<double>& x, const std::vector<int>& groups) {
  const int a = *std::max_element(groups.begin(), groups.end()) + 1;
  std::vector<double> sum(static_cast<std::size_t>(a), 0.0);
  std::vector<double> cnt(static_cast<std::size_t>(a), 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum[static_cast<std::size_t>(groups[i])] += x[i];
    cnt[static_cast<std::size_t>(groups[i])] += 1.0;
    grand += x[i];
  }
  grand /= static_cast<double>(x.size());
  double among = 0.0, within = 0.0;
  for (int g = 0; g < a; ++g) {
    const double mean = sum[static_cast<std::size_t>(g)] / cnt[static_cast<std::size_t>(g)];
    among += cnt[static_cast<std::size_t>(g)] * (mean - grand) * (mean - grand);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mean = sum[static_cast<std::size_t>(groups[i])] / cnt[static_cast<std::size_t>(groups[i])];
    within += (x[i] - mean) * (x[i] - mean);
  }
  const double n = static_cast<double>(x.size());
  return (among / (a - 1)) / (within / (n - a));
}

TriMesh crown_fixture(int rings, int variant) {
  std::vector<shapes::Bump> cusps = shapes::molar_cusps();
  if (variant != 0) {
    Rng rng(derive_seed(99, static_cast<std::uint64_t>(variant)));
    for (auto& c : cusps) {
      c.amplitude *= 1.0 + 0.15 * (2.0 * rng.uniform() - 1.0);
      c.center.x() += 0.04 * (2.0 * rng.uniform() - 1.0);
      c.center.y() += 0.04 * (2.0 * rng.uniform() - 1.0);
    }
  }
  return shapes::crown(rings, 0.3, cusps);
}

TriMesh family_surface(int family, int member, int rings) {
  std::vector<shapes::Bump> cusps;
  if (family == 0) {
    cusps = shapes::molar_cusps();
  } else {
    cusps = {{Eigen::Vector3d(-0.4, 0.05, 0), 0.34, 0.2}, {Eigen::Vector3d(0.4, -0.05, 0), 0.26, 0.2}};
  }
  Rng rng(derive_seed(static_cast<std::uint64_t>(1000 + family), static_cast<std::uint64_t>(member)));
  for (auto& c : cusps) {
    c.amplitude *= 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
    c.center.x() += 0.03 * (2.0 * rng.uniform() - 1.0);
    c.center.y() += 0.03 * (2.0 * rng.uniform() - 1.0);
  }
  return shapes::crown(rings, 0.3, cusps);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("gplmk-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gplmk::test
