#include "macroent/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace macroent {

namespace {
const Complex kI(0.0, 1.0);
}

void Ket::validate() const {
    if (amplitudes.size() == 0 || dim <= 0) throw std::invalid_argument("Ket: empty");
    double n2 = amplitudes.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-10) throw std::invalid_argument("Ket: not normalized");
}

CMatrix Ket::density() const { return amplitudes * amplitudes.adjoint(); }

void Observable::validate() const {
    if (!is_hermitian(matrix)) throw std::invalid_argument("Observable: not Hermitian");
    if (operator_norm(matrix) > norm_bound + 1e-9)
        throw std::invalid_argument("Observable: operator norm exceeds bound");
}

PovmValidation validate_povm(const Povm& p) {
    PovmValidation v;
    if (p.elements.empty() || p.elements.size() != p.outcomes.size()) return v;
    const int d = static_cast<int>(p.elements[0].rows());
    CMatrix sum = CMatrix::Zero(d, d);
    v.min_eigenvalue = 1.0;
    for (const auto& e : p.elements) {
        v.hermiticity = std::max(v.hermiticity, (e - e.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<CMatrix> s((e + e.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        v.min_eigenvalue = std::min(v.min_eigenvalue, s.eigenvalues().minCoeff());
        sum += e;
    }
    v.completeness = (sum - identity(d)).cwiseAbs().maxCoeff();
    v.passes = v.hermiticity <= kHermTol && v.min_eigenvalue >= -1e-9 && v.completeness <= 1e-10;
    return v;
}

void PairScenario::validate() const {
    if (dim <= 0) throw std::invalid_argument("PairScenario: bad dim");
    const int d2 = dim * dim;
    if (sigma.rows() != d2 || sigma.cols() != d2)
        throw std::invalid_argument("PairScenario: sigma dimension mismatch");
    if (std::abs(sigma.trace().real() - 1.0) > 1e-10 || std::abs(sigma.trace().imag()) > 1e-10)
        throw std::invalid_argument("PairScenario: sigma trace not 1");
    if (!is_hermitian(sigma)) throw std::invalid_argument("PairScenario: sigma not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> s(sigma, Eigen::EigenvaluesOnly);
    if (s.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("PairScenario: sigma not PSD");
    for (const Observable* o : {&a1, &a2, &b1, &b2}) {
        if (o->dim() != dim) throw std::invalid_argument("PairScenario: observable dim mismatch");
        o->validate();
    }
}

void DepolarizingChannel::validate() const {
    if (dim <= 0) throw std::invalid_argument("DepolarizingChannel: bad dim");
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("DepolarizingChannel: lambda outside [0,1]");
}

CMatrix sigma_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix sigma_y() {
    CMatrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

CMatrix sigma_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix spin1_x() {
    CMatrix m(3, 3);
    const double r = 1.0 / std::sqrt(2.0);
    m << 0, r, 0, r, 0, r, 0, r, 0;
    return m;
}

CMatrix spin1_y() {
    CMatrix m(3, 3);
    const Complex r = kI / std::sqrt(2.0);
    m << 0, -r, 0, r, 0, -r, 0, r, 0;
    return m;
}

CMatrix spin1_z() {
    CMatrix m(3, 3);
    m << 1, 0, 0, 0, 0, 0, 0, 0, -1;
    return m;
}

Observable spin_plane_observable(int dim, double phi) {
    CMatrix m;
    if (dim == 2)
        m = std::cos(phi) * sigma_x() + std::sin(phi) * sigma_y();
    else if (dim == 3)
        m = std::cos(phi) * spin1_x() + std::sin(phi) * spin1_y();
    else
        throw std::invalid_argument("spin_plane_observable: dim must be 2 or 3");
    return Observable{m, 1.0};
}

Observable commutator_observable(const Observable& a1, const Observable& a2) {
    CMatrix k = -kI * commutator(a1.matrix, a2.matrix);
    k = (k + k.adjoint()) / 2.0;  // scrub roundoff, [H1,H2] is exactly i*Hermitian
    return Observable{k, operator_norm(k)};
}

Ket rme_ket() {
    Ket psi;
    psi.dim = 4;
    psi.amplitudes = CVector::Zero(4);
    psi.amplitudes(0) = std::cos(M_PI / 8.0);
    psi.amplitudes(3) = -std::sin(M_PI / 8.0);
    return psi;
}

PairScenario rme_state() {
    PairScenario s;
    s.dim = 2;
    s.sigma = rme_ket().density();
    s.a1 = Observable{sigma_x(), 1.0};
    s.b1 = Observable{sigma_x(), 1.0};
    s.a2 = Observable{sigma_y(), 1.0};
    s.b2 = Observable{sigma_y(), 1.0};
    return s;
}

Ket ime_ket() {
    // two-decimal amplitudes, symmetric under index exchange; their squared
    // norm is ~0.997 so renormalize
    CVector v = CVector::Zero(9);
    v(0) = Complex(0.34, -0.87);  // |00>
    v(2) = Complex(0.07, 0.0);    // |02>
    v(6) = Complex(0.07, 0.0);    // |20>
    v(4) = Complex(-0.33, 0.0);   // |11>
    v(8) = Complex(0.03, 0.07);   // |22>
    v /= v.norm();
    Ket psi;
    psi.dim = 9;
    psi.amplitudes = v;
    return psi;
}

PairScenario ime_state() {
    const double phi = 1.20;
    PairScenario s;
    s.dim = 3;
    s.sigma = ime_ket().density();
    s.a1 = Observable{spin1_x(), 1.0};
    s.a2 = spin_plane_observable(3, phi);
    s.b1 = spin_plane_observable(3, phi);
    s.b2 = Observable{-spin1_x(), 1.0};
    return s;
}

CMatrix depolarize_pair(const CMatrix& sigma, const DepolarizingChannel& channel) {
    channel.validate();
    const int d = channel.dim;
    if (sigma.rows() != d * d || sigma.cols() != d * d)
        throw std::invalid_argument("depolarize_pair: dimension mismatch");
    const double l = channel.lambda;
    CMatrix eye = identity(d) / static_cast<double>(d);
    CMatrix rho_a = partial_trace(sigma, {d, d}, {0});
    CMatrix rho_b = partial_trace(sigma, {d, d}, {1});
    return (1.0 - l) * (1.0 - l) * sigma +
           l * (1.0 - l) * (tensor(rho_a, eye) + tensor(eye, rho_b)) +
           l * l * tensor(eye, eye);
}

std::vector<double> schmidt_coefficients(const Ket& pair_ket) {
    const int d2 = static_cast<int>(pair_ket.amplitudes.size());
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    if (d * d != d2) throw std::invalid_argument("schmidt_coefficients: not a pair ket");
    CMatrix amp(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) amp(i, j) = pair_ket.amplitudes(i * d + j);
    Eigen::JacobiSVD<CMatrix> svd(amp);
    std::vector<double> out(svd.singularValues().data(),
                            svd.singularValues().data() + d);
    return out;
}

Ket dominant_ket(const CMatrix& sigma, int dim) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sigma);
    const int n = static_cast<int>(sigma.rows());
    if (solver.eigenvalues()(n - 1) < 1.0 - 1e-6)
        throw std::runtime_error("dominant_ket: state is not pure");
    Ket k;
    k.dim = dim;
    k.amplitudes = solver.eigenvectors().col(n - 1);
    return k;
}

PairScenario make_pure_scenario(int dim, const CVector& amplitudes,
                                const Observable& a1, const Observable& a2,
                                const Observable& b1, const Observable& b2) {
    PairScenario s;
    s.dim = dim;
    CVector v = amplitudes;
    double n = v.norm();
    if (n < 1e-12) {
        v = CVector::Zero(dim * dim);
        v(0) = 1.0;
    } else {
        v /= n;
    }
    s.sigma = v * v.adjoint();
    s.a1 = a1;
    s.a2 = a2;
    s.b1 = b1;
    s.b2 = b2;
    return s;
}

}  // namespace macroent
