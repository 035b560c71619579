#include "macroent/mcsim.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "macroent/linalg.hpp"

namespace macroent {

void RunConfig::validate() const {
    if (pairs < 1) throw std::invalid_argument("need at least one pair");
    if (shots < 2) throw std::invalid_argument("need at least two shots");
    if (!(loss_p >= 0.0 && loss_p <= 1.0))
        throw std::invalid_argument("loss probability must lie in [0,1]");
    if (!(depolarize_lambda >= 0.0 && depolarize_lambda <= 1.0))
        throw std::invalid_argument("depolarization strength must lie in [0,1]");
    if (bipartition == Bipartition::fixed_q && !(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("bipartition probability must lie in [0,1]");
}

namespace {

// schedule-independent deterministic reduction
double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double mean_of(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

struct MeasuredObservable {
    std::vector<double> values;
    std::vector<CMatrix> projs;
    std::vector<double> unif;  // outcome probabilities on I/d

    MeasuredObservable() = default;
    MeasuredObservable(const CMatrix& O, int d) {
        EigenSystem es = eig_hermitian(O);
        values = es.eigenvalues;
        projs = es.projectors;
        for (const CMatrix& P : projs) unif.push_back(P.trace().real() / d);
    }
};

// Joint outcome tables for measuring m0 on slot 0 and m1 on slot 1, one table
// per depolarization branch combination (keep/replace per particle).
struct JointTables {
    int n0 = 0, n1 = 0;
    std::vector<double> v0, v1;
    std::array<std::vector<double>, 4> t;

    std::pair<double, double> sample(SplitMix64& rng, bool r0, bool r1) const {
        const std::vector<double>& tab = t[(r0 ? 2 : 0) + (r1 ? 1 : 0)];
        const int k = rng.categorical(tab.data(), n0 * n1);
        return {v0[k / n1], v1[k % n1]};
    }
};

JointTables make_joint(const CMatrix& sigma, const MeasuredObservable& m0,
                       const MeasuredObservable& m1) {
    JointTables jt;
    jt.n0 = static_cast<int>(m0.values.size());
    jt.n1 = static_cast<int>(m1.values.size());
    jt.v0 = m0.values;
    jt.v1 = m1.values;
    std::vector<double> kk(jt.n0 * jt.n1), marg0(jt.n0, 0.0), marg1(jt.n1, 0.0);
    for (int a = 0; a < jt.n0; ++a)
        for (int b = 0; b < jt.n1; ++b) {
            const double pr = std::max(pair_expect(sigma, m0.projs[a], m1.projs[b]), 0.0);
            kk[a * jt.n1 + b] = pr;
            marg0[a] += pr;
            marg1[b] += pr;
        }
    std::vector<double> kr(jt.n0 * jt.n1), rk(jt.n0 * jt.n1), rr(jt.n0 * jt.n1);
    for (int a = 0; a < jt.n0; ++a)
        for (int b = 0; b < jt.n1; ++b) {
            kr[a * jt.n1 + b] = marg0[a] * m1.unif[b];
            rk[a * jt.n1 + b] = m0.unif[a] * marg1[b];
            rr[a * jt.n1 + b] = m0.unif[a] * m1.unif[b];
        }
    jt.t = {std::move(kk), std::move(kr), std::move(rk), std::move(rr)};
    return jt;
}

struct MarginalTables {
    std::vector<double> v;
    std::array<std::vector<double>, 2> t;  // [replaced]

    double sample(SplitMix64& rng, bool repl) const {
        const std::vector<double>& tab = t[repl ? 1 : 0];
        return v[rng.categorical(tab.data(), static_cast<int>(tab.size()))];
    }
};

MarginalTables make_marginal(const CMatrix& sigma, const MeasuredObservable& m, int slot, int d) {
    MarginalTables mt;
    mt.v = m.values;
    const CMatrix eye = identity(d);
    std::vector<double> keep;
    for (const CMatrix& P : m.projs) {
        const double pr = slot == 0 ? pair_expect(sigma, P, eye) : pair_expect(sigma, eye, P);
        keep.push_back(std::max(pr, 0.0));
    }
    mt.t = {std::move(keep), m.unif};
    return mt;
}

// kind 0: x pair; 1: p pair (Bob negated); 2: K_A on Alice's particles;
// 3: K_B on Bob's.
struct SettingSampler {
    int kind = 0;
    std::array<std::array<JointTables, 2>, 2> by_assignment;  // [alice0][alice1]
    JointTables both;
    MarginalTables m0, m1;
};

std::vector<double> run_setting(const RunConfig& cfg, const SettingSampler& ss, int setting_idx) {
    const int N = cfg.pairs, S = cfg.shots;
    const double lam = cfg.depolarize_lambda, loss = cfg.loss_p;
    const bool split = cfg.bipartition == RunConfig::Bipartition::fixed_split;
    const bool random_q = cfg.bipartition == RunConfig::Bipartition::random_q;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<double> out(S);
    for (int shot = 0; shot < S; ++shot) {
        double qshot = cfg.q;
        if (random_q) {
            SplitMix64 qr = substream(cfg.seed, setting_idx, shot, 0);
            qshot = qr.uniform();
        }
        double total = 0.0;
        for (int pair = 0; pair < N; ++pair) {
            SplitMix64 rng = substream(cfg.seed, setting_idx, shot, pair + 1);
            bool a0 = true, a1 = false;
            if (!split) {
                a0 = rng.uniform() < qshot;
                a1 = rng.uniform() < qshot;
            }
            const bool r0 = rng.uniform() < lam;
            const bool r1 = rng.uniform() < lam;
            double v0 = 0.0, v1 = 0.0, sign0 = 1.0, sign1 = 1.0;
            bool use0 = false, use1 = false;
            if (ss.kind <= 1) {
                const auto [w0, w1] = ss.by_assignment[a0][a1].sample(rng, r0, r1);
                v0 = w0;
                v1 = w1;
                use0 = use1 = true;
                if (ss.kind == 1) {
                    sign0 = a0 ? 1.0 : -1.0;
                    sign1 = a1 ? 1.0 : -1.0;
                }
            } else {
                const bool on0 = ss.kind == 2 ? a0 : !a0;
                const bool on1 = ss.kind == 2 ? a1 : !a1;
                if (on0 && on1) {
                    const auto [w0, w1] = ss.both.sample(rng, r0, r1);
                    v0 = w0;
                    v1 = w1;
                    use0 = use1 = true;
                } else if (on0) {
                    v0 = ss.m0.sample(rng, r0);
                    use0 = true;
                } else if (on1) {
                    v1 = ss.m1.sample(rng, r1);
                    use1 = true;
                }
            }
            const bool l0 = rng.uniform() < loss;
            const bool l1 = rng.uniform() < loss;
            if (use0 && !l0) total += sign0 * v0;
            if (use1 && !l1) total += sign1 * v1;
        }
        out[shot] = total * inv_sqrt;
    }
    return out;
}

double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    return mean_of(sq) - m * m;
}

constexpr int kBatches = 16;

// per-batch recomputation of a term estimate, spread -> standard error
double batch_stderr(const std::vector<double>& samples,
                    const std::function<double(const std::vector<double>&)>& estimate) {
    const std::size_t S = samples.size();
    std::vector<double> vals;
    for (int b = 0; b < kBatches; ++b) {
        const std::size_t lo = S * b / kBatches, hi = S * (b + 1) / kBatches;
        std::vector<double> part(samples.begin() + lo, samples.begin() + hi);
        vals.push_back(estimate(part));
    }
    const double m = mean_of(vals);
    double ss = 0.0;
    for (double v : vals) ss += (v - m) * (v - m);
    return std::sqrt(ss / (kBatches - 1) / kBatches);
}

McEstimate run_estimate(const PairScenario& s, const RunConfig& cfg) {
    s.validate();
    cfg.validate();
    if (cfg.shots < 2 * kBatches)
        throw std::invalid_argument("too few shots to form 16 error batches");
    const int d = s.dim;
    const MeasuredObservable A1(s.a1.matrix, d), B1(s.b1.matrix, d);
    const MeasuredObservable A2(s.a2.matrix, d), B2(s.b2.matrix, d);
    const MeasuredObservable KA(commutator_observable(s.a1, s.a2).matrix, d);
    const MeasuredObservable KB(commutator_observable(s.b1, s.b2).matrix, d);

    SettingSampler settings[4];
    for (int k = 0; k < 4; ++k) settings[k].kind = k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            settings[0].by_assignment[i][j] = make_joint(s.sigma, i ? A1 : B1, j ? A1 : B1);
            settings[1].by_assignment[i][j] = make_joint(s.sigma, i ? A2 : B2, j ? A2 : B2);
        }
    settings[2].both = make_joint(s.sigma, KA, KA);
    settings[2].m0 = make_marginal(s.sigma, KA, 0, d);
    settings[2].m1 = make_marginal(s.sigma, KA, 1, d);
    settings[3].both = make_joint(s.sigma, KB, KB);
    settings[3].m0 = make_marginal(s.sigma, KB, 0, d);
    settings[3].m1 = make_marginal(s.sigma, KB, 1, d);

    const std::vector<double> xs = run_setting(cfg, settings[0], 0);
    const std::vector<double> ps = run_setting(cfg, settings[1], 1);
    const std::vector<double> ka = run_setting(cfg, settings[2], 2);
    const std::vector<double> kb = run_setting(cfg, settings[3], 3);

    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.pairs));
    const auto comm_est = [inv_sqrt](const std::vector<double>& v) {
        return std::abs(mean_of(v)) * inv_sqrt;
    };

    McEstimate e;
    e.config = cfg;
    const double var_x = variance_of(xs), var_p = variance_of(ps);
    const double comm_a = comm_est(ka), comm_b = comm_est(kb);
    const double se_x = batch_stderr(xs, variance_of);
    const double se_p = batch_stderr(ps, variance_of);
    const double se_a = batch_stderr(ka, comm_est);
    const double se_b = batch_stderr(kb, comm_est);
    e.terms = {{"var_x", {var_x, se_x}},
               {"var_p", {var_p, se_p}},
               {"comm_a", {comm_a, se_a}},
               {"comm_b", {comm_b, se_b}}};
    e.f_hat = var_x + var_p - comm_a - comm_b;
    e.std_error = std::sqrt(se_x * se_x + se_p * se_p + se_a * se_a + se_b * se_b);
    return e;
}

}  // namespace

std::pair<double, double> sample_pair(const CMatrix& sigma, const Povm& e_a, const Povm& e_b,
                                      SplitMix64& rng) {
    const PovmValidation va = validate_povm(e_a), vb = validate_povm(e_b);
    if (!va.passes || !vb.passes) throw std::invalid_argument("invalid POVM");
    const int na = static_cast<int>(e_a.elements.size()), nb = static_cast<int>(e_b.elements.size());
    const Eigen::Index da = e_a.elements[0].rows(), db = e_b.elements[0].rows();
    if (sigma.rows() != da * db)
        throw std::invalid_argument("POVM dimensions do not match the pair state");
    std::vector<double> probs(na * nb);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            probs[a * nb + b] = std::max(pair_expect(sigma, e_a.elements[a], e_b.elements[b]), 0.0);
    const int k = rng.categorical(probs.data(), na * nb);
    return {e_a.outcomes[k / nb], e_b.outcomes[k % nb]};
}

McEstimate estimate_f_iid(const PairScenario& s, const RunConfig& cfg) {
    if (cfg.bipartition != RunConfig::Bipartition::fixed_split)
        throw std::invalid_argument("fixed-split estimator requires the fixed_split bipartition");
    return run_estimate(s, cfg);
}

McEstimate estimate_f_bipartition(const PairScenario& s, const RunConfig& cfg) {
    if (cfg.bipartition == RunConfig::Bipartition::fixed_split)
        throw std::invalid_argument("bipartition estimator needs fixed_q or random_q");
    return run_estimate(s, cfg);
}

WitnessReport exact_loss_oracle(const PairScenario& s, int pairs, double p) {
    s.validate();
    if (pairs < 1 || pairs > 4)
        throw std::invalid_argument("loss-pattern enumeration supports 1 to 4 pairs");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("loss probability must lie in [0,1]");

    const CMatrix eye = identity(s.dim);
    const CMatrix &A1 = s.a1.matrix, &A2 = s.a2.matrix, &B1 = s.b1.matrix, &B2 = s.b2.matrix;
    const double ma1 = pair_expect(s.sigma, A1, eye), mb1 = pair_expect(s.sigma, eye, B1);
    const double ma2 = pair_expect(s.sigma, A2, eye), mb2 = pair_expect(s.sigma, eye, B2);
    const double sa1 = pair_expect(s.sigma, A1 * A1, eye), sb1 = pair_expect(s.sigma, eye, B1 * B1);
    const double sa2 = pair_expect(s.sigma, A2 * A2, eye), sb2 = pair_expect(s.sigma, eye, B2 * B2);
    const double cx = pair_expect(s.sigma, A1, B1), cp = pair_expect(s.sigma, A2, B2);
    const double kA = pair_expect(s.sigma, commutator_observable(s.a1, s.a2).matrix, eye);
    const double kB = pair_expect(s.sigma, eye, commutator_observable(s.b1, s.b2).matrix);

    const int n = pairs;
    const double dn = n;
    // pooled first and second moments of the four intensities
    double ExA = 0, ExB = 0, ExA2 = 0, ExB2 = 0, ExAB = 0;
    double EpA = 0, EpB = 0, EpA2 = 0, EpB2 = 0, EpAB = 0;
    double EkA = 0, EkB = 0;
    for (unsigned pat = 0; pat < (1u << (2 * n)); ++pat) {
        const unsigned maskA = pat & ((1u << n) - 1);  // kept A particles
        const unsigned maskB = pat >> n;
        const int nA = std::popcount(maskA), nB = std::popcount(maskB);
        const int lost = 2 * n - nA - nB;
        double w = 1.0;
        for (int i = 0; i < lost; ++i) w *= p;
        for (int i = 0; i < nA + nB; ++i) w *= 1.0 - p;
        if (w == 0.0) continue;
        const int both = std::popcount(maskA & maskB);  // pairs intact on both sides
        const double sn = std::sqrt(dn);
        ExA += w * nA * ma1 / sn;
        ExB += w * nB * mb1 / sn;
        ExA2 += w * (nA * sa1 + double(nA) * (nA - 1) * ma1 * ma1) / dn;
        ExB2 += w * (nB * sb1 + double(nB) * (nB - 1) * mb1 * mb1) / dn;
        ExAB += w * (both * cx + (double(nA) * nB - both) * ma1 * mb1) / dn;
        EpA += w * nA * ma2 / sn;
        EpB += w * nB * mb2 / sn;
        EpA2 += w * (nA * sa2 + double(nA) * (nA - 1) * ma2 * ma2) / dn;
        EpB2 += w * (nB * sb2 + double(nB) * (nB - 1) * mb2 * mb2) / dn;
        EpAB += w * (both * cp + (double(nA) * nB - both) * ma2 * mb2) / dn;
        EkA += w * nA * kA / sn;
        EkB += w * nB * kB / sn;
    }

    WitnessReport r;
    const double sn = std::sqrt(dn);
    r.terms = {{"var_xa", ExA2 - ExA * ExA}, {"var_xb", ExB2 - ExB * ExB},
               {"cov_x", ExAB - ExA * ExB},  {"var_pa", EpA2 - EpA * EpA},
               {"var_pb", EpB2 - EpB * EpB}, {"cov_p", EpAB - EpA * EpB},
               {"comm_a", std::abs(EkA) / sn}, {"comm_b", std::abs(EkB) / sn}};
    r.f = r.reconstruct();
    r.regime = "loss_enumeration";
    r.level = p;
    return r;
}

double collective_commutator_norm(const Observable& a, const Observable& b, int n, double alpha) {
    a.validate();
    b.validate();
    if (a.matrix.rows() != b.matrix.rows())
        throw std::invalid_argument("observables act on different dimensions");
    if (n < 1) throw std::invalid_argument("need at least one particle");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("scaling exponent must lie in [0,1]");
    return std::pow(static_cast<double>(n), 1.0 - 2.0 * alpha) *
           operator_norm(commutator_observable(a, b).matrix);
}

}  // namespace macroent
