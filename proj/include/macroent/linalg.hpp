#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace macroent {

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

// Tolerances shared across the library. Matrices stay tiny (<= a few
// hundred), so double precision leaves several orders of headroom.
constexpr double kHermTol = 1e-10;
constexpr double kProjTol = 1e-12;
constexpr double kDegenerateGap = 1e-9;

struct EigenSystem {
    std::vector<double> eigenvalues;   // sorted descending, degenerate ones merged
    std::vector<CMatrix> projectors;   // orthogonal projectors onto eigenspaces
};

CMatrix tensor(const CMatrix& a, const CMatrix& b);

// Reduce `m` over the subsystems not listed in `keep`. `keep` indices refer
// to positions in `dims`; the result orders kept factors as in `dims`.
CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

double operator_norm(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double tol = kHermTol);

EigenSystem eig_hermitian(const CMatrix& m);

Complex expect(const CMatrix& state, const CMatrix& op);

CMatrix identity(int dim);

CMatrix dagger(const CMatrix& m);

// Nearest (Frobenius) PSD matrix: clip negative eigenvalues at zero.
CMatrix psd_clip(const CMatrix& m);

// Nearest Hermitian matrix with operator norm <= bound: clip eigenvalues
// into [-bound, bound].
CMatrix norm_clip(const CMatrix& m, double bound);

double frobenius_norm(const CMatrix& m);

}  // namespace macroent
