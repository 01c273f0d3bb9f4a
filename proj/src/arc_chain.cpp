#include "elastica/verifier.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace elastica {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

using Vec2 = Eigen::Vector2d;

double mod2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

Vec2 heading(double theta) { return {std::cos(theta), std::sin(theta)}; }
Vec2 left_normal(double theta) { return {-std::sin(theta), std::cos(theta)}; }
double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }
double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Pose {
  Vec2 x;
  double theta;
};

// A chain family: piece kinds plus discrete choices; lengths follow from K.
struct Family {
  std::string word;
  std::array<int, 3> turn;  // +1 left, -1 right, 0 straight
  int branch = 0;           // CCC middle-circle side
  std::array<int, 3> winds{0, 0, 0};
};

using Pieces = std::vector<ChainPiece>;

std::optional<Pieces> csc(const Pose& a, const Pose& b, double K, const Family& f) {
  const double r = 1.0 / K;
  const int s1 = f.turn[0];
  const int s3 = f.turn[2];
  const Vec2 c1 = a.x + s1 * r * left_normal(a.theta);
  const Vec2 c3 = b.x + s3 * r * left_normal(b.theta);
  const Vec2 d = c3 - c1;
  const double offset = (s3 - s1) * r;
  double straight;
  double psi;
  if (s1 == s3 && d.norm() < 1e-14 * std::max(1.0, r)) {
    straight = 0.0;
    psi = b.theta;
  } else {
    const double sq = d.squaredNorm() - offset * offset;
    if (sq < 0.0) return std::nullopt;
    straight = std::sqrt(sq);
    psi = angle_of(d) - std::atan2(offset, straight);
  }
  const double phi1 = mod2pi(s1 * (psi - a.theta)) + kTwoPi * f.winds[0];
  const double phi3 = mod2pi(s3 * (b.theta - psi)) + kTwoPi * f.winds[2];
  return Pieces{{PieceType::Arc, s1 * K, r * phi1}, {PieceType::Segment, 0.0, straight}, {PieceType::Arc, s3 * K, r * phi3}};
}

std::optional<Pieces> ccc(const Pose& a, const Pose& b, double K, const Family& f) {
  const double r = 1.0 / K;
  const int s = f.turn[0];
  const Vec2 c1 = a.x + s * r * left_normal(a.theta);
  const Vec2 c3 = b.x + s * r * left_normal(b.theta);
  const Vec2 d = c3 - c1;
  const double dist = d.norm();
  if (dist > 4.0 * r || dist == 0.0) return std::nullopt;
  const Vec2 perp(-d.y() / dist, d.x() / dist);
  const Vec2 c2 = c1 + 0.5 * d + f.branch * std::sqrt(std::max(0.0, 4.0 * r * r - 0.25 * dist * dist)) * perp;
  const Vec2 q1 = 0.5 * (c1 + c2);
  const Vec2 q2 = 0.5 * (c2 + c3);
  // heading psi at a tangency point with left normal n: psi = atan2(-n_x, n_y)
  const Vec2 n1 = s * (c1 - q1) / r;
  const Vec2 n2 = s * (c3 - q2) / r;
  const double psi1 = std::atan2(-n1.x(), n1.y());
  const double psi2 = std::atan2(-n2.x(), n2.y());
  const double phi1 = mod2pi(s * (psi1 - a.theta)) + kTwoPi * f.winds[0];
  const double phi2 = mod2pi(-s * (psi2 - psi1)) + kTwoPi * f.winds[1];
  const double phi3 = mod2pi(s * (b.theta - psi2)) + kTwoPi * f.winds[2];
  return Pieces{{PieceType::Arc, s * K, r * phi1}, {PieceType::Arc, -s * K, r * phi2}, {PieceType::Arc, s * K, r * phi3}};
}

std::optional<Pieces> scs(const Pose& a, const Pose& b, double K, const Family& f) {
  const double r = 1.0 / K;
  const int s = f.turn[1];
  const Vec2 u1 = heading(a.theta);
  const Vec2 u2 = heading(b.theta);
  const double det = cross(u1, u2);
  if (std::abs(det) < 1e-12) return std::nullopt;
  const Vec2 rhs = b.x - a.x - s * r * (left_normal(a.theta) - left_normal(b.theta));
  const double l1 = cross(rhs, u2) / det;
  const double l3 = cross(u1, rhs) / det;
  if (l1 < 0.0 || l3 < 0.0) return std::nullopt;
  const double phi = mod2pi(s * (b.theta - a.theta)) + kTwoPi * f.winds[1];
  return Pieces{{PieceType::Segment, 0.0, l1}, {PieceType::Arc, s * K, r * phi}, {PieceType::Segment, 0.0, l3}};
}

std::optional<Pieces> pieces_for(const Pose& a, const Pose& b, double K, const Family& f) {
  if (f.turn[0] == 0) return scs(a, b, K, f);
  if (f.turn[1] == 0) return csc(a, b, K, f);
  return ccc(a, b, K, f);
}

double total_length(const Pieces& pieces) {
  double total = 0.0;
  for (const auto& piece : pieces) total += piece.length;
  return total;
}

Pose advance(Pose pose, const ChainPiece& piece, double length) {
  if (piece.type == PieceType::Segment || piece.signed_curvature == 0.0) {
    pose.x += length * heading(pose.theta);
    return pose;
  }
  const double k = piece.signed_curvature;
  const double end = pose.theta + k * length;
  pose.x += Vec2(std::sin(end) - std::sin(pose.theta), std::cos(pose.theta) - std::cos(end)) / k;
  pose.theta = end;
  return pose;
}

Pose integrate(const Pose& start, const Pieces& pieces) {
  Pose pose = start;
  for (const auto& piece : pieces) pose = advance(pose, piece, piece.length);
  return pose;
}

std::vector<Family> families() {
  std::vector<Family> out;
  const std::array<std::pair<const char*, std::array<int, 3>>, 8> words{{{"LSL", {1, 0, 1}},
                                                                          {"RSR", {-1, 0, -1}},
                                                                          {"LSR", {1, 0, -1}},
                                                                          {"RSL", {-1, 0, 1}},
                                                                          {"LRL", {1, -1, 1}},
                                                                          {"RLR", {-1, 1, -1}},
                                                                          {"SLS", {0, 1, 0}},
                                                                          {"SRS", {0, -1, 0}}}};
  for (const auto& [word, turn] : words) {
    const bool is_ccc = turn[0] != 0 && turn[1] != 0;
    for (int branch : is_ccc ? std::vector<int>{-1, 1} : std::vector<int>{0}) {
      for (int w0 = 0; w0 <= 1; ++w0) {
        for (int w1 = 0; w1 <= 1; ++w1) {
          for (int w2 = 0; w2 <= 1; ++w2) {
            // windings only on arc pieces
            if ((turn[0] == 0 && w0) || (turn[1] == 0 && w1) || (turn[2] == 0 && w2)) continue;
            out.push_back({word, turn, branch, {w0, w1, w2}});
          }
        }
      }
    }
  }
  return out;
}

bool matches(const Pose& start, const Pose& goal, const Pieces& pieces, double L) {
  const Pose end = integrate(start, pieces);
  const double turn_error = std::abs(std::remainder(end.theta - goal.theta, kTwoPi));
  const double scale = std::max(1.0, L);
  return (end.x - goal.x).norm() <= 1e-8 * scale && turn_error <= 1e-8 && std::abs(total_length(pieces) - L) <= 1e-8;
}

Pose pose_of(const VecX& x, const VecX& v) { return {Vec2(x[0], x[1]), std::atan2(v[1], v[0])}; }

void check_planar(const BoundaryConditions& bc) {
  if (bc.x1.size() != 2 || bc.x2.size() != 2 || bc.v1.size() != 2 || bc.v2.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "oracle requires euclidean n=2");
  }
}

}  // namespace

ArcChainSolution arc_chain_oracle(const BoundaryConditions& bc, int max_pieces) {
  check_planar(bc);
  if (max_pieces < 1 || max_pieces > 3) throw Error(ErrorCode::InvalidArgument, "max_pieces must be 1, 2 or 3");
  bc.validate(Manifold(ModelKind::Euclidean, 2));
  const Pose start = pose_of(bc.x1, bc.v1);
  const Pose goal = pose_of(bc.x2, bc.v2);
  const double L = bc.L;

  // straight segment
  {
    const Pieces line{{PieceType::Segment, 0.0, L}};
    if (matches(start, goal, line, L)) return {line, 0.0, "S"};
  }

  std::optional<ArcChainSolution> best;
  constexpr int kGrid = 600;
  const double k_lo = 1e-3 / L;
  const double k_hi = 1e3 / L;
  for (const Family& family : families()) {
    auto residual = [&](double K) -> std::optional<double> {
      const auto pieces = pieces_for(start, goal, K, family);
      if (!pieces) return std::nullopt;
      return total_length(*pieces) - L;
    };
    double prev_k = 0.0;
    std::optional<double> prev_f;
    for (int g = 0; g <= kGrid; ++g) {
      const double K = k_lo * std::pow(k_hi / k_lo, static_cast<double>(g) / kGrid);
      const auto f = residual(K);
      if (best && K > best->K_max * (1.0 + 1e-9)) break;
      if (f && prev_f && ((*prev_f < 0.0) != (*f < 0.0) || *f == 0.0)) {
        double a = prev_k;
        double fa = *prev_f;
        double b = K;
        double fb = *f;
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
          const double mid = 0.5 * (a + b);
          const auto fm = residual(mid);
          if (!fm) break;
          if ((*fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = *fm;
          } else {
            b = mid;
            fb = *fm;
          }
        }
        const double root = std::abs(fa) <= std::abs(fb) ? a : b;
        const auto pieces = pieces_for(start, goal, root, family);
        if (pieces && matches(start, goal, *pieces, L)) {
          Pieces kept;
          for (const auto& piece : *pieces) {
            if (piece.length > 1e-12 * L) kept.push_back(piece);
          }
          if (static_cast<int>(kept.size()) <= max_pieces && (!best || root < best->K_max)) {
            std::string word;
            for (const auto& piece : kept) {
              word += piece.type == PieceType::Segment ? 'S' : (piece.signed_curvature > 0.0 ? 'L' : 'R');
            }
            best = ArcChainSolution{kept, root, word};
          }
        }
      }
      prev_k = K;
      prev_f = f;
    }
  }
  if (!best) throw Error(ErrorCode::NoChainFound, "no chain of at most " + std::to_string(max_pieces) + " pieces fits");
  return *best;
}

std::pair<VecX, VecX> chain_state(const ArcChainSolution& chain, const BoundaryConditions& bc, double s) {
  check_planar(bc);
  Pose pose = pose_of(bc.x1, bc.v1);
  double remaining = std::max(0.0, s);
  for (const auto& piece : chain.pieces) {
    const double step = std::min(remaining, piece.length);
    pose = advance(pose, piece, step);
    remaining -= step;
    if (remaining <= 0.0) break;
  }
  if (remaining > 0.0) pose.x += remaining * heading(pose.theta);
  return {VecX(pose.x), VecX(heading(pose.theta))};
}

DiscreteCurve sample_arc_chain(const ArcChainSolution& chain, const BoundaryConditions& bc, int N) {
  NodeMatrix nodes(N + 1, 2);
  for (int i = 0; i <= N; ++i) nodes.row(i) = chain_state(chain, bc, bc.L * i / N).first.transpose();
  return {Manifold(ModelKind::Euclidean, 2), std::move(nodes), bc.L};
}

}  // namespace elastica
