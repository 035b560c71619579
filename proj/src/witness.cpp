#include "macroent/witness.hpp"

#include <cmath>
#include <iostream>

namespace macroent {

double WitnessReport::reconstruct() const {
    auto t = [&](const char* name) {
        auto it = terms.find(name);
        return it == terms.end() ? 0.0 : it->second;
    };
    return t("var_xa") + t("var_xb") + 2.0 * t("cov_x") + t("var_pa") + t("var_pb") -
           2.0 * t("cov_p") - t("comm_a") - t("comm_b");
}

void NoiseSpec::validate() const {
    if (kind == Kind::depolarize || kind == Kind::loss) {
        if (level < 0.0 || level > 1.0)
            throw std::invalid_argument("NoiseSpec: level outside [0,1]");
    } else if (kind == Kind::povm) {
        if (level < 0.0) throw std::invalid_argument("NoiseSpec: negative epsilon");
    }
}

double pair_expect(const CMatrix& sigma, const CMatrix& X, const CMatrix& Y) {
    const int dx = static_cast<int>(X.rows());
    const int dy = static_cast<int>(Y.rows());
    if (sigma.rows() != dx * dy) throw std::invalid_argument("pair_expect: dimension mismatch");
    // tr[sigma (X (x) Y)] = sum sigma[(a,i),(b,j)] X[b,a] Y[j,i]
    Complex s = 0.0;
    for (int a = 0; a < dx; ++a)
        for (int b = 0; b < dx; ++b) {
            Complex xs = X(b, a);
            if (xs == Complex(0.0, 0.0)) continue;
            for (int i = 0; i < dy; ++i)
                for (int j = 0; j < dy; ++j) s += sigma(a * dy + i, b * dy + j) * xs * Y(j, i);
        }
    return s.real();
}

double sym_mean(const CMatrix& sigma, const CMatrix& X) {
    const int d = static_cast<int>(X.rows());
    CMatrix eye = identity(d);
    return 0.5 * (pair_expect(sigma, X, eye) + pair_expect(sigma, eye, X));
}

double sym_joint(const CMatrix& sigma, const CMatrix& X, const CMatrix& Y) {
    return 0.5 * (pair_expect(sigma, X, Y) + pair_expect(sigma, Y, X));
}

namespace {

WitnessReport assemble(std::map<std::string, double> terms) {
    WitnessReport r;
    r.terms = std::move(terms);
    r.f = r.reconstruct();
    return r;
}

// magnitude of the commutator expectation on one side: |<[X1, X2]>| = |<K>|
// with K = -i[X1, X2]
double comm_mag_slot(const CMatrix& sigma, const Observable& o1, const Observable& o2,
                     bool slot_a) {
    CMatrix k = commutator_observable(o1, o2).matrix;
    const int d = static_cast<int>(k.rows());
    CMatrix eye = identity(d);
    return std::abs(slot_a ? pair_expect(sigma, k, eye) : pair_expect(sigma, eye, k));
}

double comm_mag_sym(const CMatrix& sigma, const Observable& o1, const Observable& o2) {
    CMatrix k = commutator_observable(o1, o2).matrix;
    return std::abs(sym_mean(sigma, k));
}

// Eq.-style quadratic-in-q terms evaluated from slot-symmetrized moments,
// with the loss survival factor u = 1-p folded in (u = 1 when lossless).
struct BipartitionMoments {
    double mean_a1, mean_b1, mean_a2, mean_b2;
    double sq_a1, sq_b1, sq_a2, sq_b2;
    double joint_a1a1, joint_b1b1, joint_a2a2, joint_b2b2;
    double cross_x, cross_p;
    double comm_a, comm_b;
};

BipartitionMoments bipartition_moments(const PairScenario& s) {
    BipartitionMoments m;
    const CMatrix &A1 = s.a1.matrix, &A2 = s.a2.matrix, &B1 = s.b1.matrix, &B2 = s.b2.matrix;
    m.mean_a1 = sym_mean(s.sigma, A1);
    m.mean_b1 = sym_mean(s.sigma, B1);
    m.mean_a2 = sym_mean(s.sigma, A2);
    m.mean_b2 = sym_mean(s.sigma, B2);
    m.sq_a1 = sym_mean(s.sigma, A1 * A1);
    m.sq_b1 = sym_mean(s.sigma, B1 * B1);
    m.sq_a2 = sym_mean(s.sigma, A2 * A2);
    m.sq_b2 = sym_mean(s.sigma, B2 * B2);
    m.joint_a1a1 = pair_expect(s.sigma, A1, A1);
    m.joint_b1b1 = pair_expect(s.sigma, B1, B1);
    m.joint_a2a2 = pair_expect(s.sigma, A2, A2);
    m.joint_b2b2 = pair_expect(s.sigma, B2, B2);
    m.cross_x = sym_joint(s.sigma, A1, B1);
    m.cross_p = sym_joint(s.sigma, A2, B2);
    m.comm_a = comm_mag_sym(s.sigma, s.a1, s.a2);
    m.comm_b = comm_mag_sym(s.sigma, s.b1, s.b2);
    return m;
}

std::map<std::string, double> q_terms(const BipartitionMoments& m, double q, double u) {
    const double qb = 1.0 - q;
    return {
        {"var_xa", 2.0 * q * u * m.sq_a1 + 2.0 * q * q * u * u * m.joint_a1a1 -
                       4.0 * q * q * u * u * m.mean_a1 * m.mean_a1},
        {"var_xb", 2.0 * qb * u * m.sq_b1 + 2.0 * qb * qb * u * u * m.joint_b1b1 -
                       4.0 * qb * qb * u * u * m.mean_b1 * m.mean_b1},
        {"cov_x", 2.0 * q * qb * u * u * (m.cross_x - 2.0 * m.mean_a1 * m.mean_b1)},
        {"var_pa", 2.0 * q * u * m.sq_a2 + 2.0 * q * q * u * u * m.joint_a2a2 -
                       4.0 * q * q * u * u * m.mean_a2 * m.mean_a2},
        {"var_pb", 2.0 * qb * u * m.sq_b2 + 2.0 * qb * qb * u * u * m.joint_b2b2 -
                       4.0 * qb * qb * u * u * m.mean_b2 * m.mean_b2},
        {"cov_p", 2.0 * q * qb * u * u * (m.cross_p - 2.0 * m.mean_a2 * m.mean_b2)},
        {"comm_a", 2.0 * q * u * m.comm_a},
        {"comm_b", 2.0 * qb * u * m.comm_b},
    };
}

// exact q-integrals of the terms above: int 2q = 1, int 2q^2 = 2/3,
// int 4q^2 = 4/3, int 2q(1-q) = 1/3
std::map<std::string, double> avg_terms(const BipartitionMoments& m, double u) {
    return {
        {"var_xa", u * m.sq_a1 + (2.0 / 3.0) * u * u * m.joint_a1a1 -
                       (4.0 / 3.0) * u * u * m.mean_a1 * m.mean_a1},
        {"var_xb", u * m.sq_b1 + (2.0 / 3.0) * u * u * m.joint_b1b1 -
                       (4.0 / 3.0) * u * u * m.mean_b1 * m.mean_b1},
        {"cov_x", (1.0 / 3.0) * u * u * (m.cross_x - 2.0 * m.mean_a1 * m.mean_b1)},
        {"var_pa", u * m.sq_a2 + (2.0 / 3.0) * u * u * m.joint_a2a2 -
                       (4.0 / 3.0) * u * u * m.mean_a2 * m.mean_a2},
        {"var_pb", u * m.sq_b2 + (2.0 / 3.0) * u * u * m.joint_b2b2 -
                       (4.0 / 3.0) * u * u * m.mean_b2 * m.mean_b2},
        {"cov_p", (1.0 / 3.0) * u * u * (m.cross_p - 2.0 * m.mean_a2 * m.mean_b2)},
        {"comm_a", u * m.comm_a},
        {"comm_b", u * m.comm_b},
    };
}

std::map<std::string, double> iid_terms(const PairScenario& s, double u) {
    const CMatrix &A1 = s.a1.matrix, &A2 = s.a2.matrix, &B1 = s.b1.matrix, &B2 = s.b2.matrix;
    const CMatrix eye = identity(s.dim);
    double ma1 = pair_expect(s.sigma, A1, eye), mb1 = pair_expect(s.sigma, eye, B1);
    double ma2 = pair_expect(s.sigma, A2, eye), mb2 = pair_expect(s.sigma, eye, B2);
    double sa1 = pair_expect(s.sigma, A1 * A1, eye), sb1 = pair_expect(s.sigma, eye, B1 * B1);
    double sa2 = pair_expect(s.sigma, A2 * A2, eye), sb2 = pair_expect(s.sigma, eye, B2 * B2);
    double cx = pair_expect(s.sigma, A1, B1), cp = pair_expect(s.sigma, A2, B2);
    double ka = comm_mag_slot(s.sigma, s.a1, s.a2, true);
    double kb = comm_mag_slot(s.sigma, s.b1, s.b2, false);
    return {
        {"var_xa", u * sa1 - u * u * ma1 * ma1},
        {"var_xb", u * sb1 - u * u * mb1 * mb1},
        {"cov_x", u * u * (cx - ma1 * mb1)},
        {"var_pa", u * sa2 - u * u * ma2 * ma2},
        {"var_pb", u * sb2 - u * u * mb2 * mb2},
        {"cov_p", u * u * (cp - ma2 * mb2)},
        {"comm_a", u * ka},
        {"comm_b", u * kb},
    };
}

PairScenario depolarized(const PairScenario& s, double lambda) {
    PairScenario out = s;
    out.sigma = depolarize_pair(s.sigma, DepolarizingChannel{s.dim, lambda});
    return out;
}

}  // namespace

WitnessReport f_general(const CMatrix& rho, const Observable& x_a, const Observable& p_a,
                        const Observable& x_b, const Observable& p_b,
                        std::pair<int, int> split) {
    const int da = split.first, db = split.second;
    if (rho.rows() != static_cast<long>(da) * db || rho.rows() != rho.cols())
        throw std::invalid_argument("f_general: split does not factor rho");
    if (x_a.dim() != da || p_a.dim() != da || x_b.dim() != db || p_b.dim() != db)
        throw std::invalid_argument("f_general: observable dims do not match split");

    const CMatrix Ia = identity(da), Ib = identity(db);
    double mxa = pair_expect(rho, x_a.matrix, Ib), mxb = pair_expect(rho, Ia, x_b.matrix);
    double mpa = pair_expect(rho, p_a.matrix, Ib), mpb = pair_expect(rho, Ia, p_b.matrix);
    double sxa = pair_expect(rho, x_a.matrix * x_a.matrix, Ib);
    double sxb = pair_expect(rho, Ia, x_b.matrix * x_b.matrix);
    double spa = pair_expect(rho, p_a.matrix * p_a.matrix, Ib);
    double spb = pair_expect(rho, Ia, p_b.matrix * p_b.matrix);
    double cx = pair_expect(rho, x_a.matrix, x_b.matrix);
    double cp = pair_expect(rho, p_a.matrix, p_b.matrix);
    CMatrix ka = commutator_observable(x_a, p_a).matrix;
    CMatrix kb = commutator_observable(x_b, p_b).matrix;

    WitnessReport r = assemble({
        {"var_xa", sxa - mxa * mxa},
        {"var_xb", sxb - mxb * mxb},
        {"cov_x", cx - mxa * mxb},
        {"var_pa", spa - mpa * mpa},
        {"var_pb", spb - mpb * mpb},
        {"cov_p", cp - mpa * mpb},
        {"comm_a", std::abs(pair_expect(rho, ka, Ib))},
        {"comm_b", std::abs(pair_expect(rho, Ia, kb))},
    });
    return r;
}

WitnessReport f_iid(const PairScenario& s) { return assemble(iid_terms(s, 1.0)); }

WitnessReport f_q(const PairScenario& s, double q) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("f_q: q outside [0,1]");
    WitnessReport r = assemble(q_terms(bipartition_moments(s), q, 1.0));
    r.q = q;
    return r;
}

bool is_permutation_symmetric(const CMatrix& sigma, int dim, double tol) {
    for (int a = 0; a < dim; ++a)
        for (int i = 0; i < dim; ++i)
            for (int b = 0; b < dim; ++b)
                for (int j = 0; j < dim; ++j)
                    if (std::abs(sigma(a * dim + i, b * dim + j) -
                                 sigma(i * dim + a, j * dim + b)) > tol)
                        return false;
    return true;
}

WitnessReport f_avg(const PairScenario& s) {
    if (!is_permutation_symmetric(s.sigma, s.dim))
        std::cerr << "warning: f_avg on a non-permutation-symmetric state\n";
    return assemble(avg_terms(bipartition_moments(s), 1.0));
}

WitnessReport f_iid_noisy(const PairScenario& s, const NoiseSpec& noise) {
    noise.validate();
    switch (noise.kind) {
        case NoiseSpec::Kind::none:
            return f_iid(s);
        case NoiseSpec::Kind::depolarize: {
            WitnessReport r = assemble(iid_terms(depolarized(s, noise.level), 1.0));
            r.regime = "depolarized";
            r.level = noise.level;
            return r;
        }
        case NoiseSpec::Kind::loss: {
            WitnessReport r = assemble(iid_terms(s, 1.0 - noise.level));
            r.regime = "lossy";
            r.level = noise.level;
            return r;
        }
        default:
            throw std::invalid_argument("f_iid_noisy: use f_iid_povm_worstcase for povm noise");
    }
}

WitnessReport f_avg_noisy(const PairScenario& s, const NoiseSpec& noise) {
    noise.validate();
    switch (noise.kind) {
        case NoiseSpec::Kind::none:
            return f_avg(s);
        case NoiseSpec::Kind::depolarize: {
            WitnessReport r =
                assemble(avg_terms(bipartition_moments(depolarized(s, noise.level)), 1.0));
            r.regime = "depolarized";
            r.level = noise.level;
            return r;
        }
        case NoiseSpec::Kind::loss: {
            WitnessReport r = assemble(avg_terms(bipartition_moments(s), 1.0 - noise.level));
            r.regime = "lossy";
            r.level = noise.level;
            return r;
        }
        default:
            throw std::invalid_argument("f_avg_noisy: use f_avg_povm_worstcase for povm noise");
    }
}

}  // namespace macroent
