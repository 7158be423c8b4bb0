#pragma once

#include <complex>

#include <Eigen/Dense>

namespace haltsim::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Ladder operator a on span{|0>, ..., |n_max>}.
Matrix annihilation(int n_max);

/// exp(G) for anti-Hermitian G, through the eigendecomposition of the Hermitian iG.
Matrix expm_antihermitian(const Matrix& generator);

/// S(z) = exp[(z a^2 - z* a^dag^2) / 2], truncated.
Matrix squeeze_operator(Complex z, int n_max);

/// exp(-i phi a^dag a).
Matrix rotation_operator(double phi, int n_max);

/// D(beta) = exp(beta a^dag - beta* a), truncated.
Matrix displacement_operator(Complex beta, int n_max);

}  // namespace haltsim::fock
