#include "haltsim/fock.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace haltsim::fock {

Matrix annihilation(int n_max) {
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix expm_antihermitian(const Matrix& generator) {
  const Matrix hermitian = Complex{0.0, 1.0} * generator;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (hermitian + hermitian.adjoint()));
  const Vector phases = (Complex{0.0, -1.0} * eig.eigenvalues().cast<Complex>()).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix squeeze_operator(Complex z, int n_max) {
  const Matrix a = annihilation(n_max);
  const Matrix a2 = a * a;
  const Matrix g = 0.5 * (z * a2 - std::conj(z) * a2.adjoint());
  return expm_antihermitian(g);
}

Matrix rotation_operator(double phi, int n_max) {
  Vector d(n_max + 1);
  for (int n = 0; n <= n_max; ++n) d(n) = std::polar(1.0, -phi * n);
  return d.asDiagonal();
}

Matrix displacement_operator(Complex beta, int n_max) {
  const Matrix a = annihilation(n_max);
  const Matrix g = beta * a.adjoint() - std::conj(beta) * a;
  return expm_antihermitian(g);
}

}  // namespace haltsim::fock
