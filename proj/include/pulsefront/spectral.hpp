#pragma once

#include <Eigen/Dense>

#include "pulsefront/cell.hpp"

namespace pulsefront {

/// Dense first-derivative matrix of trigonometric interpolation on n
/// equispaced nodes of a period L.
Eigen::MatrixXd periodic_diff_matrix(int n, double period);

/// Derivative of nodal samples along one axis: trigonometric on periodic
/// axes, second-order differences (one-sided at the ends) on wall axes.
class NodalDifferentiator {
 public:
  explicit NodalDifferentiator(const Grid& grid);

  Field derivative(const Field& u, int axis) const;
  VectorField gradient(const Field& u) const;

 private:
  const Grid* grid_;
  std::array<Eigen::MatrixXd, 2> d_;
};

}  // namespace pulsefront
