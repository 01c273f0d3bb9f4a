#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace elastica {
namespace {

using testing::random_point;
using testing::random_vector;

// Embedding oracles: the sphere chart is inverse stereographic projection onto
// the unit sphere in R^{n+1}; the ball chart maps onto the hyperboloid.
struct Embedded {
  VecX point;
  VecX velocity;
};

Embedded embed(const Manifold& model, const VecX& x, const VecX& v) {
  const int n = static_cast<int>(x.size());
  const double r2 = x.squaredNorm();
  const double xv = x.dot(v);
  Embedded e{VecX(n + 1), VecX(n + 1)};
  if (model.kind() == ModelKind::Sphere) {
    const double d = 1.0 + r2;
    e.point << 2.0 * x / d, (1.0 - r2) / d;
    e.velocity << (2.0 * v * d - 4.0 * x * xv) / (d * d), -4.0 * xv / (d * d);
  } else {
    const double d = 1.0 - r2;
    e.point << (1.0 + r2) / d, 2.0 * x / d;
    e.velocity << 4.0 * xv / (d * d), 2.0 * v / d + 4.0 * x * xv / (d * d);
  }
  return e;
}

VecX unembed(const Manifold& model, const VecX& P) {
  const int n = static_cast<int>(P.size()) - 1;
  if (model.kind() == ModelKind::Sphere) return P.head(n) / (1.0 + P[n]);
  return P.tail(n) / (1.0 + P[0]);
}

double minkowski(const VecX& a, const VecX& b) { return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1)); }

double oracle_distance(const Manifold& model, const VecX& x, const VecX& y) {
  if (model.kind() == ModelKind::Euclidean) return (x - y).norm();
  const VecX zero = VecX::Zero(x.size());
  const VecX P = embed(model, x, zero).point;
  const VecX Q = embed(model, y, zero).point;
  if (model.kind() == ModelKind::Sphere) return std::acos(std::clamp(P.dot(Q), -1.0, 1.0));
  return std::acosh(std::max(1.0, -minkowski(P, Q)));
}

VecX oracle_exp(const Manifold& model, const VecX& x, const VecX& v) {
  if (model.kind() == ModelKind::Euclidean) return x + v;
  const Embedded e = embed(model, x, v);
  if (model.kind() == ModelKind::Sphere) {
    const double s = e.velocity.norm();
    return unembed(model, std::cos(s) * e.point + std::sin(s) / s * e.velocity);
  }
  const double s = std::sqrt(minkowski(e.velocity, e.velocity));
  return unembed(model, std::cosh(s) * e.point + std::sinh(s) / s * e.velocity);
}

// Gamma^k_ij from central differences of the metric.
ChristoffelSymbols<double> fd_christoffel(const Manifold& model, const VecX& x) {
  const int n = static_cast<int>(x.size());
  const double eps = 1e-5;
  std::vector<MatX> dg(n);
  for (int l = 0; l < n; ++l) {
    VecX xp = x, xm = x;
    xp[l] += eps;
    xm[l] -= eps;
    dg[l] = (metric<double>(model, xp) - metric<double>(model, xm)) / (2 * eps);
  }
  const MatX ginv = metric<double>(model, x).inverse();
  ChristoffelSymbols<double> gamma(n, MatX::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return gamma;
}

// (R(X,Y)Z)^l = (d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik) X^i Y^j Z^k.
VecX fd_riemann(const Manifold& model, const VecX& x, const VecX& X, const VecX& Y, const VecX& Z) {
  const int n = static_cast<int>(x.size());
  const double eps = 1e-5;
  const auto G = christoffel<double>(model, x);
  std::vector<ChristoffelSymbols<double>> dG(n);
  for (int i = 0; i < n; ++i) {
    VecX xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    const auto Gp = christoffel<double>(model, xp);
    const auto Gm = christoffel<double>(model, xm);
    dG[i].resize(n);
    for (int l = 0; l < n; ++l) dG[i][l] = (Gp[l] - Gm[l]) / (2 * eps);
  }
  VecX out = VecX::Zero(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double r = dG[i][l](j, k) - dG[j][l](i, k);
          for (int m = 0; m < n; ++m) r += G[l](i, m) * G[m](j, k) - G[l](j, m) * G[m](i, k);
          out[l] += r * X[i] * Y[j] * Z[k];
        }
  return out;
}

class ModelTest : public ::testing::TestWithParam<ModelKind> {
 protected:
  Manifold model(int dim = 3) const { return {GetParam(), dim}; }
  std::mt19937_64 rng{20240611};
};

TEST_P(ModelTest, ChristoffelMatchesMetricDerivatives) {
  const Manifold m = model();
  for (int trial = 0; trial < 20; ++trial) {
    const VecX x = random_point(m, rng);
    const auto exact = christoffel<double>(m, x);
    const auto fd = fd_christoffel(m, x);
    for (int k = 0; k < 3; ++k) EXPECT_LT((exact[k] - fd[k]).cwiseAbs().maxCoeff(), 1e-7);
    const VecX u = random_vector(3, rng);
    const VecX v = random_vector(3, rng);
    VecX contracted = VecX::Zero(3);
    for (int k = 0; k < 3; ++k) contracted[k] = u.dot(exact[k] * v);
    EXPECT_LT((christoffel_contract<double>(m, x, u, v) - contracted).norm(), 1e-12);
  }
}

TEST_P(ModelTest, RiemannMatchesChristoffelDerivatives) {
  const Manifold m = model();
  for (int trial = 0; trial < 20; ++trial) {
    const VecX x = random_point(m, rng);
    const VecX X = random_vector(3, rng), Y = random_vector(3, rng), Z = random_vector(3, rng);
    const VecX closed = riemann<double>(m, x, X, Y, Z);
    const VecX fd = fd_riemann(m, x, X, Y, Z);
    EXPECT_LT((closed - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_P(ModelTest, RiemannSymmetriesAndSectionalCurvature) {
  const Manifold m = model();
  for (int trial = 0; trial < 100; ++trial) {
    const VecX x = random_point(m, rng);
    const VecX X = random_vector(3, rng), Y = random_vector(3, rng), Z = random_vector(3, rng),
               W = random_vector(3, rng);
    auto R4 = [&](const VecX& a, const VecX& b, const VecX& c, const VecX& d) {
      return inner<double>(m, x, riemann<double>(m, x, a, b, c), d);
    };
    const double base = R4(X, Y, Z, W);
    const double scale = std::max(1.0, std::abs(base));
    EXPECT_NEAR(base, -R4(Y, X, Z, W), 1e-10 * scale);
    EXPECT_NEAR(base, -R4(X, Y, W, Z), 1e-10 * scale);
    const VecX bianchi = riemann<double>(m, x, X, Y, Z) + riemann<double>(m, x, Y, Z, X) +
                         riemann<double>(m, x, Z, X, Y);
    EXPECT_LT(norm<double>(m, x, bianchi), 1e-10 * scale);
    const double area = inner<double>(m, x, X, X) * inner<double>(m, x, Y, Y) -
                        std::pow(inner<double>(m, x, X, Y), 2);
    EXPECT_NEAR(R4(X, Y, Y, X) / area, m.curvature_sign(), 1e-8);
  }
}

TEST_P(ModelTest, ExpAndDistanceMatchEmbedding) {
  const Manifold m = model();
  for (int trial = 0; trial < 100; ++trial) {
    const VecX x = random_point(m, rng);
    VecX v = random_vector(3, rng);
    v *= 0.8 / norm<double>(m, x, v);
    const VecX y = exp_map(m, x, v);
    EXPECT_LT((y - oracle_exp(m, x, v)).norm(), 1e-10);
    EXPECT_NEAR(distance(m, x, y), 0.8, 1e-10);
    const VecX z = random_point(m, rng);
    EXPECT_NEAR(distance(m, x, z), oracle_distance(m, x, z), 1e-10);
  }
}

TEST_P(ModelTest, ExpLogRoundTrip) {
  const Manifold m = model();
  for (int trial = 0; trial < 100; ++trial) {
    const VecX x = random_point(m, rng);
    const VecX y = random_point(m, rng);
    const VecX v = log_map(m, x, y);
    EXPECT_LT((exp_map(m, x, v) - y).norm(), 1e-8);
    EXPECT_NEAR(norm<double>(m, x, v), distance(m, x, y), 1e-10);
  }
}

TEST_P(ModelTest, DistanceGradientIsUnitAndMatchesDifferences) {
  const Manifold m = model();
  for (int trial = 0; trial < 20; ++trial) {
    const VecX x = random_point(m, rng);
    const VecX y = random_point(m, rng);
    const VecX g = distance_gradient(m, x, y);
    VecX fd(3);
    for (int k = 0; k < 3; ++k) {
      VecX xp = x, xm = x;
      xp[k] += 1e-6;
      xm[k] -= 1e-6;
      fd[k] = (distance(m, xp, y) - distance(m, xm, y)) / 2e-6;
    }
    EXPECT_LT((g - fd).norm(), 1e-7);
    const double lambda = conformal_factor<double>(m, x);
    EXPECT_NEAR(g.norm() / lambda, 1.0, 1e-10);
  }
}

TEST_P(ModelTest, GeodesicPointSplitsDistance) {
  const Manifold m = model();
  for (int trial = 0; trial < 20; ++trial) {
    const VecX a = random_point(m, rng);
    const VecX b = random_point(m, rng);
    const VecX mid = geodesic_point(m, a, b, 0.3);
    EXPECT_NEAR(distance(m, a, mid), 0.3 * distance(m, a, b), 1e-10);
    EXPECT_NEAR(distance(m, mid, b), 0.7 * distance(m, a, b), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, ModelTest,
                         ::testing::Values(ModelKind::Euclidean, ModelKind::Sphere, ModelKind::Hyperbolic),
                         [](const auto& info) { return Manifold(info.param, 2).id(); });

TEST(Manifold, FromIdRoundTripsAndRejectsUnknown) {
  for (const char* id : {"euclidean", "sphere", "hyperbolic"}) EXPECT_EQ(Manifold::from_id(id, 2).id(), id);
  EXPECT_THROW(Manifold::from_id("torus", 2), Error);
}

TEST(Manifold, HyperbolicChartGuard) {
  const Manifold m(ModelKind::Hyperbolic, 2);
  EXPECT_TRUE(m.in_domain(testing::vec2(0.9, 0.0)));
  EXPECT_FALSE(m.in_domain(testing::vec2(1.0, 0.0)));
  try {
    (void)distance(m, testing::vec2(0, 0), testing::vec2(1.2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfChartDomain);
  }
}

TEST(Manifold, SphereAntipodalLogThrows) {
  const Manifold m(ModelKind::Sphere, 2);
  // The antipode of x in this chart is -x / |x|^2.
  try {
    (void)log_map(m, testing::vec2(0.5, 0), testing::vec2(-2.0000000001, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BeyondInjectivityRadius);
  }
}

TEST(Manifold, RiemannRejectsMixedBasePoints) {
  const Manifold m(ModelKind::Sphere, 2);
  const TangentVector<double> X{testing::vec2(0, 0), testing::vec2(1, 0)};
  const TangentVector<double> Y{testing::vec2(0.1, 0), testing::vec2(0, 1)};
  try {
    (void)riemann<double>(m, X, Y, Y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedBasePoints);
  }
}

TEST(Manifold, EuclideanIsFlat) {
  const Manifold m(ModelKind::Euclidean, 2);
  const VecX x = testing::vec2(3, -4);
  EXPECT_DOUBLE_EQ(conformal_factor<double>(m, x), 1.0);
  EXPECT_EQ(riemann<double>(m, x, testing::vec2(1, 0), testing::vec2(0, 1), testing::vec2(0, 1)).norm(), 0.0);
}

}  // namespace
}  // namespace elastica
