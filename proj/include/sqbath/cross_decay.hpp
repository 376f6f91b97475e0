#pragma once

// Cross-pumping rate read off the subsystem master equation.
//
// In the weakly driven subsystem, population leaves g- (through the linear
// channel to g+) on a time scale much longer than the upper-level lifetimes.
// g+ is dark, so the block of the generator acting on matrix elements with
// both indices in {g-, e+, a+} is closed. Its slowest eigenvector is the
// dressed g- state with adiabatically following upper-level coherences; the
// circular emission rate per g- population in that state is the rate with
// which g- is re-pumped into itself through the cross channel.

#include <sqbath/error.hpp>
#include <sqbath/liouville.hpp>
#include <sqbath/models.hpp>

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <optional>

namespace sqbath {

inline double extract_cross_pumping_rate(const SubsystemParams& p,
                                         std::optional<SubsystemCouplings> couplings = std::nullopt) {
  const LindbladModel model = interference_subsystem_model(p, couplings);
  const Liouvillian l = build_liouvillian(model);
  const auto& sp = model.space();
  const Eigen::Index d = sp.dim();
  const std::array<Eigen::Index, 3> keep{sp.index("g-"), sp.index("e+"), sp.index("a+")};

  // vec index of |i><j| is i + j*d
  std::array<Eigen::Index, 9> idx{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      idx[i + 3 * j] = keep[i] + keep[j] * d;
    }
  }
  Matrix block(9, 9);
  for (std::size_t r = 0; r < 9; ++r) {
    for (std::size_t c = 0; c < 9; ++c) {
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = l.matrix()(idx[r], idx[c]);
    }
  }
  Eigen::ComplexEigenSolver<Matrix> es(block);
  if (es.info() != Eigen::Success) {
    throw NumericalError("extract_cross_pumping_rate: eigen solver failed");
  }
  Eigen::Index slow = 0;
  for (Eigen::Index k = 1; k < 9; ++k) {
    if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(slow))) {
      slow = k;
    }
  }
  const Vector v = es.eigenvectors().col(slow);
  Matrix rho = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      rho(keep[i], keep[j]) = v(static_cast<Eigen::Index>(i + 3 * j));
    }
  }
  const Complex pop = rho(keep[0], keep[0]);
  if (std::abs(pop) == 0.0) {
    throw NumericalError("extract_cross_pumping_rate: slow mode carries no g- population");
  }
  const Matrix& c = model.jumps()[0].op.matrix();
  const Complex emitted = (c * rho * c.adjoint()).trace();
  return (emitted / pop).real();
}

} // namespace sqbath
