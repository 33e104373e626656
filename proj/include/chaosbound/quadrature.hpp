#pragma once

#include <functional>
#include <span>

namespace chaosbound {

using RealFunction = std::function<double(double)>;

struct QuadratureOptions {
  double tolerance = 1e-12;       // requested relative accuracy
  double acceptance = 1e-6;       // largest error estimate relative to the L1 norm
};

/// Integral of f over (a, b), either end possibly infinite. The range is split
/// at the breakpoints lying strictly inside it; each piece uses a
/// double-exponential rule (tanh-sinh, exp-sinh or sinh-sinh), which tolerates
/// integrable endpoint singularities. Throws AccuracyError when the error
/// estimate stays above the acceptance threshold.
double integrate(const RealFunction& f, double a, double b, std::span<const double> breakpoints = {},
                 const QuadratureOptions& options = {});

/// Integration node with its distances to the limits a and b of the whole
/// range. Next to a finite limit the distance is exact even where x itself
/// rounds onto the limit, which matters for strong endpoint singularities.
struct Node {
  double x;
  double from_a;  // x - a, infinite when a is
  double from_b;  // b - x, infinite when b is
};

using NodeFunction = std::function<double(const Node&)>;

double integrate_nodes(const NodeFunction& f, double a, double b, std::span<const double> breakpoints = {},
                       const QuadratureOptions& options = {});

}  // namespace chaosbound
