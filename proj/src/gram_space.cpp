#include "chaosbound/gram_space.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "chaosbound/error.hpp"

namespace chaosbound {

namespace {

constexpr double kPsdTolerance = 1e-10;
constexpr double kMaxJitter = 1e-12;

Eigen::MatrixXd compute_factor(const Eigen::MatrixXd& gram) {
  const Eigen::Index d = gram.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double scale = std::max(gram.cwiseAbs().maxCoeff(), 1.0);
  Eigen::LLT<Eigen::MatrixXd> jittered(
      gram + kMaxJitter * scale * Eigen::MatrixXd::Identity(d, d));
  if (jittered.info() == Eigen::Success) return jittered.matrixL();

  // Rank-deficient G: any square root works for the Gaussian representation.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

GramSpace::GramSpace(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  if (gram_.rows() < 1 || gram_.rows() != gram_.cols())
    throw InvalidArgument("GramSpace: Gram matrix must be square and non-empty");
  const Eigen::Index d = gram_.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (gram_(i, j) != gram_(j, i))
        throw InvalidArgument("GramSpace: Gram matrix is not symmetric");
  if (!gram_.allFinite()) throw InvalidArgument("GramSpace: non-finite entry");

  identity_ = gram_.isIdentity(0.0);
  if (identity_) {
    factor_ = Eigen::MatrixXd::Identity(d, d);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_, Eigen::EigenvaluesOnly);
  const double norm = gram_.norm();
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance * std::max(norm, 1e-300))
    throw InvalidArgument("GramSpace: Gram matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(eig.eigenvalues().minCoeff()) + ")");
  factor_ = compute_factor(gram_);
}

std::shared_ptr<const GramSpace> GramSpace::identity(int dim) {
  if (dim < 1) throw InvalidArgument("GramSpace: dimension must be positive");
  return std::make_shared<const GramSpace>(Eigen::MatrixXd::Identity(dim, dim));
}

std::shared_ptr<const GramSpace> GramSpace::make(Eigen::MatrixXd gram) {
  return std::make_shared<const GramSpace>(std::move(gram));
}

double GramSpace::inner(std::span<const double> h, std::span<const double> g) const {
  if (static_cast<int>(h.size()) != dim() || static_cast<int>(g.size()) != dim())
    throw InvalidArgument("GramSpace::inner: vector dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> hv(h.data(), dim()), gv(g.data(), dim());
  return hv.dot(gram_ * gv);
}

bool GramSpace::operator==(const GramSpace& other) const {
  return gram_.rows() == other.gram_.rows() && gram_ == other.gram_;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (!same_space(a, b)) throw SpaceMismatch(std::string(where) + ": operands live in different spaces");
}

}  // namespace chaosbound
