#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace pcvx {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid caller input: wrong dimension, point outside the domain, bad config.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

/// An iteration failed to converge or a linear solve was too ill-conditioned.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// A sampled certificate (positivity, containment, residual bound) failed.
class CertificationError : public Error {
public:
    explicit CertificationError(const std::string& what) : Error(what) {}
};

/// A structural assumption of the construction does not hold at the input
/// (rank drift along the boundary, indefinite Levi form, missing leaf data).
class StructureError : public Error {
public:
    explicit StructureError(const std::string& what) : Error(what) {}
};

/// Deterministic RNG used everywhere sampling is needed.  Fixed seeds make
/// every certificate in the test suite reproducible.
using Rng = std::mt19937_64;

/// First and second Wirtinger derivative data of a real-valued function at a
/// point: grad[j] = d/dz_j, hermitian(j,k) = d^2/dz_j dzbar_k (a Hermitian
/// matrix), holomorphic(j,k) = d^2/dz_j dz_k (symmetric).  For real-valued
/// functions the remaining blocks are conjugates of these.
struct DerivativeBundle {
    double value = 0.0;
    CVec grad;
    CMat hermitian;
    CMat holomorphic;
};

/// Hermitian pairing sum_j u_j * conj(v_j).
inline Complex hermitian_dot(const CVec& u, const CVec& v) {
    return (u.array() * v.array().conjugate()).sum();
}

/// Real directional pairing <grad, X> = sum_j grad_j X_j used for tangency
/// tests: X is tangent to a level set of rho iff this vanishes.
inline Complex holomorphic_pairing(const CVec& grad, const CVec& X) {
    return (grad.array() * X.array()).sum();
}

}  // namespace pcvx
