#pragma once

#include <sqbath/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sqbath {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Ordered set of level names. The construction order is the basis order of
/// every matrix built on the space. Copies share the label storage.
class HilbertSpace {
public:
  HilbertSpace(std::initializer_list<std::string> labels)
      : HilbertSpace(std::vector<std::string>(labels)) {}

  explicit HilbertSpace(std::vector<std::string> labels) {
    if (labels.size() < 2) {
      throw InvariantError("HilbertSpace: dim >= 2 required, got " +
                           std::to_string(labels.size()));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        if (labels[i] == labels[j]) {
          throw InvariantError("HilbertSpace: duplicate label " + labels[i]);
        }
      }
    }
    labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
  }

  [[nodiscard]] Eigen::Index dim() const {
    return static_cast<Eigen::Index>(labels_->size());
  }
  [[nodiscard]] const std::vector<std::string>& labels() const { return *labels_; }

  [[nodiscard]] bool contains(std::string_view label) const {
    return std::find(labels_->begin(), labels_->end(), label) != labels_->end();
  }

  [[nodiscard]] Eigen::Index index(std::string_view label) const {
    auto it = std::find(labels_->begin(), labels_->end(), label);
    if (it == labels_->end()) {
      throw LabelError("unknown label " + std::string(label));
    }
    return static_cast<Eigen::Index>(it - labels_->begin());
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
  }

private:
  std::shared_ptr<const std::vector<std::string>> labels_;
};

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b,
                               std::string_view what) {
  if (!(a == b)) {
    throw SpaceMismatch(std::string(what) + ": operands live on different Hilbert spaces");
  }
}

/// Linear operator on a HilbertSpace, stored densely in the space's basis order.
class Operator {
public:
  Operator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), m_(std::move(matrix)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
      throw SpaceMismatch("Operator: matrix is " + std::to_string(m_.rows()) + "x" +
                          std::to_string(m_.cols()) + " but space dim is " +
                          std::to_string(space_.dim()));
    }
  }

  static Operator zero(const HilbertSpace& space) {
    return {space, Matrix::Zero(space.dim(), space.dim())};
  }
  static Operator identity(const HilbertSpace& space) {
    return {space, Matrix::Identity(space.dim(), space.dim())};
  }

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] Eigen::Index dim() const { return space_.dim(); }

  [[nodiscard]] Operator adjoint() const { return {space_, m_.adjoint()}; }

  [[nodiscard]] bool is_hermitian(double tol = 1e-12) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator +");
    return {a.space_, a.m_ + b.m_};
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator -");
    return {a.space_, a.m_ - b.m_};
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "operator *");
    return {a.space_, a.m_ * b.m_};
  }
  friend Operator operator*(Complex s, const Operator& a) { return {a.space_, s * a.m_}; }
  friend Operator operator*(double s, const Operator& a) { return {a.space_, s * a.m_}; }

private:
  HilbertSpace space_;
  Matrix m_;
};

/// |ket><bra| on the given space.
inline Operator basis_operator(const HilbertSpace& space, std::string_view ket,
                               std::string_view bra) {
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  m(space.index(ket), space.index(bra)) = 1.0;
  return {space, std::move(m)};
}

inline Operator projector(const HilbertSpace& space, std::string_view label) {
  return basis_operator(space, label, label);
}

/// Validated density matrix: Hermitian and unit trace to 1e-10, smallest
/// eigenvalue above the -1e-8 positivity floor. Positivity is asserted, never
/// projected.
class DensityMatrix {
public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityFloor = -1e-8;

  DensityMatrix(HilbertSpace space, Matrix matrix) : space_(std::move(space)), m_(std::move(matrix)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
      throw SpaceMismatch("DensityMatrix: matrix size does not match space dim");
    }
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
      throw InvariantError("DensityMatrix: not Hermitian, max |rho - rho^dag| = " +
                           std::to_string(herm));
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
      throw InvariantError("DensityMatrix: trace must be 1, got " + std::to_string(tr.real()) +
                           (tr.imag() != 0.0 ? " + " + std::to_string(tr.imag()) + "i" : ""));
    }
    const Matrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < kPositivityFloor) {
      throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(lo) +
                           " below positivity floor -1e-8");
    }
  }

  static DensityMatrix pure(const HilbertSpace& space, const Vector& psi) {
    if (psi.size() != space.dim()) {
      throw SpaceMismatch("DensityMatrix::pure: state size does not match space dim");
    }
    const double n = psi.norm();
    if (n == 0.0) {
      throw InvariantError("DensityMatrix::pure: zero state vector");
    }
    const Vector v = psi / n;
    return {space, v * v.adjoint()};
  }

  static DensityMatrix basis_state(const HilbertSpace& space, std::string_view label) {
    return {space, projector(space, label).matrix()};
  }

  static DensityMatrix maximally_mixed(const HilbertSpace& space) {
    const auto d = space.dim();
    return {space, Matrix::Identity(d, d) / static_cast<double>(d)};
  }

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }

private:
  HilbertSpace space_;
  Matrix m_;
};

/// Tr(A rho).
inline Complex expectation(const DensityMatrix& rho, const Operator& a) {
  require_same_space(rho.space(), a.space(), "expectation");
  return (a.matrix() * rho.matrix()).trace();
}

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] double norm2() const { return x * x + y * y + z * z; }
};

/// Bloch vector of the two-level subspace {lower, upper} with lowering
/// operator sigma = |lower><upper|:
///   S_x = <sigma^dag + sigma>, S_y = <i (sigma^dag - sigma)>, S_z = <P_upper - P_lower>.
/// The S_y sign is the one under which the driven Bloch equations of the
/// analytics module hold for the models built in models.hpp.
inline BlochVector bloch_vector(const DensityMatrix& rho, std::string_view lower,
                                std::string_view upper) {
  const auto& sp = rho.space();
  const auto l = sp.index(lower);
  const auto u = sp.index(upper);
  const Matrix& m = rho.matrix();
  // <sigma> = rho(u, l), <sigma^dag> = rho(l, u)
  const Complex s_dn = m(u, l);
  const Complex s_up = m(l, u);
  return {(s_up + s_dn).real(), (kI * (s_up - s_dn)).real(), (m(u, u) - m(l, l)).real()};
}

} // namespace sqbath
