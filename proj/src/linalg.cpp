#include "macroent/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace macroent {

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix dagger(const CMatrix& m) { return m.adjoint(); }

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep) {
    if (m.rows() != m.cols()) throw std::invalid_argument("partial_trace: matrix not square");
    long total = 1;
    for (int d : dims) total *= d;
    if (total != m.rows()) throw std::invalid_argument("partial_trace: dims do not factor the matrix");

    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }

    long dim_keep = 1, dim_drop = 1;
    for (int i = 0; i < n; ++i) (kept[i] ? dim_keep : dim_drop) *= dims[i];

    // strides of each factor in the flattened composite index
    std::vector<long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    // enumerate kept and dropped multi-indices separately
    auto offsets = [&](bool want_kept) {
        std::vector<long> offs{0};
        for (int i = 0; i < n; ++i) {
            if (kept[i] != want_kept) continue;
            std::vector<long> next;
            next.reserve(offs.size() * dims[i]);
            for (long base : offs)
                for (int v = 0; v < dims[i]; ++v) next.push_back(base + v * stride[i]);
            offs.swap(next);
        }
        return offs;
    };
    std::vector<long> keep_off = offsets(true);
    std::vector<long> drop_off = offsets(false);

    CMatrix out = CMatrix::Zero(dim_keep, dim_keep);
    for (long r = 0; r < dim_keep; ++r)
        for (long c = 0; c < dim_keep; ++c) {
            Complex s = 0.0;
            for (long d : drop_off) s += m(keep_off[r] + d, keep_off[c] + d);
            out(r, c) = s;
        }
    return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("commutator: dimension mismatch");
    return a * b - b * a;
}

double operator_norm(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("operator_norm: matrix not square");
    if (m.rows() == 0) return 0.0;
    if (is_hermitian(m)) {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

EigenSystem eig_hermitian(const CMatrix& m) {
    if (!is_hermitian(m)) throw std::invalid_argument("eig_hermitian: input not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: solver failed");

    const auto& vals = solver.eigenvalues();   // ascending
    const auto& vecs = solver.eigenvectors();
    const int n = static_cast<int>(vals.size());

    EigenSystem sys;
    int i = n - 1;
    while (i >= 0) {
        int j = i;
        while (j - 1 >= 0 && vals(i) - vals(j - 1) < kDegenerateGap) --j;
        CMatrix proj = CMatrix::Zero(n, n);
        double lam = 0.0;
        for (int k = j; k <= i; ++k) {
            proj += vecs.col(k) * vecs.col(k).adjoint();
            lam += vals(k);
        }
        sys.eigenvalues.push_back(lam / (i - j + 1));
        sys.projectors.push_back(proj);
        i = j - 1;
    }
    return sys;
}

Complex expect(const CMatrix& state, const CMatrix& op) {
    if (state.rows() != op.rows() || state.cols() != op.cols())
        throw std::invalid_argument("expect: dimension mismatch");
    // tr(state * op) without forming the product
    Complex s = 0.0;
    for (int i = 0; i < state.rows(); ++i)
        for (int j = 0; j < state.cols(); ++j) s += state(i, j) * op(j, i);
    return s;
}

CMatrix psd_clip(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

CMatrix norm_clip(const CMatrix& m, double bound) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(-bound).cwiseMin(bound);
    return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

double frobenius_norm(const CMatrix& m) { return m.norm(); }

}  // namespace macroent
