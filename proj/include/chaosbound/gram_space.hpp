#pragma once

#include <memory>
#include <span>

#include <Eigen/Dense>

namespace chaosbound {

/// Finite-dimensional model of the Hilbert space: R^d with <e_i, e_j> = G(i, j).
///
/// G must be symmetric (exactly) and positive semidefinite up to a relative
/// tolerance of 1e-10. A factor L with G = L L^T is computed once at
/// construction; it maps coordinates of an i.i.d. standard normal vector to
/// the Gaussian variables X(e_i).
class GramSpace {
 public:
  explicit GramSpace(Eigen::MatrixXd gram);

  static std::shared_ptr<const GramSpace> identity(int dim);
  static std::shared_ptr<const GramSpace> make(Eigen::MatrixXd gram);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  bool is_identity() const { return identity_; }

  double inner(std::span<const double> h, std::span<const double> g) const;

  bool operator==(const GramSpace& other) const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd factor_;
  bool identity_ = false;
};

using SpacePtr = std::shared_ptr<const GramSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

/// Throws SpaceMismatch unless both pointers describe the same space.
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where);

}  // namespace chaosbound
