// Worst-case measured witness under outcome-perturbed detectors.
//
// Every measured observable O is read out through its eigen-decomposition
// {P_k, o_k}; an adversary shifts each effect by eps*C_k with sum_k C_k = 0,
// ||C_k|| <= 1, and (optionally) P_k + eps*C_k >= 0. Measured moments then
// become m1 = <O> + eps<C->, m2 = <O^2> + eps<C+> with C- = sum o_k C_k,
// C+ = sum o_k^2 C_k, and joint moments use the shifted effective observable
// O + eps*C-. The witness splits exactly into four independent blocks: the
// x-pair (A1,B1), the p-pair (A2,B2), and one commutator magnitude per side,
// so the global worst case is the sum of per-block optima.
//
// Each pair block is a quadratic polynomial in the perturbation entries; we
// recover it exactly by finite differences and maximize with projected
// gradient ascent, projecting onto the intersection of the constraint sets
// with Dykstra's algorithm. Commutator blocks are linear, so their reachable
// interval comes from projected steepest ascent/descent and the adversary
// shrinks |<K>| toward (or across) zero.

#include "macroent/povm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "macroent/linalg.hpp"
#include "macroent/rng.hpp"

namespace macroent {

namespace {

using MatTuple = std::vector<CMatrix>;
using ProjOp = std::function<MatTuple(const MatTuple&)>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr std::uint64_t kAdversarySeed = 0x70766d2d61647600ull;

CMatrix family_cminus(const std::vector<double>& outs, const std::vector<CMatrix>& fams) {
    CMatrix acc = CMatrix::Zero(fams[0].rows(), fams[0].cols());
    for (std::size_t k = 0; k < fams.size(); ++k) acc += outs[k] * fams[k];
    return acc;
}

CMatrix family_cplus(const std::vector<double>& outs, const std::vector<CMatrix>& fams) {
    CMatrix acc = CMatrix::Zero(fams[0].rows(), fams[0].cols());
    for (std::size_t k = 0; k < fams.size(); ++k) acc += outs[k] * outs[k] * fams[k];
    return acc;
}

// Perturbation variables for one measured observable. Two-outcome measures
// carry one free matrix (family C, -C); three-outcome measures carry two
// (family C1, -C1-C2, C2, ordered along descending outcomes).
struct FamSpace {
    EigenSystem es;
    int d = 0;
    int nmat = 0;
    double eps = 0.0;
    bool pos = true;

    FamSpace(const CMatrix& O, double eps_, bool pos_)
        : es(eig_hermitian(O)), d(static_cast<int>(O.rows())), eps(eps_), pos(pos_) {
        const int n = static_cast<int>(es.eigenvalues.size());
        if (n > 3)
            throw std::invalid_argument(
                "adversarial measurement model supports at most three distinct outcomes");
        nmat = n - 1;
        if (nmat < 0) nmat = 0;
    }

    int params() const { return nmat * d * d; }

    std::vector<CMatrix> fams(const MatTuple& mats) const {
        const int n = static_cast<int>(es.eigenvalues.size());
        if (n == 1) return {CMatrix::Zero(d, d)};
        if (n == 2) return {mats[0], -mats[0]};
        return {mats[0], -mats[0] - mats[1], mats[1]};
    }

    // The feasible set as an intersection of sets with cheap exact
    // projections. Positivity projections act through the shifted effect:
    // C' = (psd_clip(P + eps*C) - P)/eps.
    std::vector<ProjOp> project_sets() const {
        std::vector<ProjOp> ops;
        if (nmat == 0) return ops;
        const double e = eps;
        if (nmat == 1) {
            ops.push_back([](const MatTuple& t) -> MatTuple { return {norm_clip(t[0], 1.0)}; });
            if (pos && e > 0.0) {
                const CMatrix P0 = es.projectors[0], P1 = es.projectors[1];
                ops.push_back([P0, e](const MatTuple& t) -> MatTuple {
                    return {(psd_clip(P0 + e * t[0]) - P0) / e};
                });
                ops.push_back([P1, e](const MatTuple& t) -> MatTuple {
                    return {-(psd_clip(P1 - e * t[0]) - P1) / e};
                });
            }
            return ops;
        }
        ops.push_back([](const MatTuple& t) -> MatTuple { return {norm_clip(t[0], 1.0), t[1]}; });
        ops.push_back([](const MatTuple& t) -> MatTuple { return {t[0], norm_clip(t[1], 1.0)}; });
        // middle element is -(C1 + C2); clip its norm, splitting the
        // correction evenly (Frobenius projection onto the slab)
        ops.push_back([](const MatTuple& t) -> MatTuple {
            const CMatrix S = t[0] + t[1];
            const CMatrix D = (norm_clip(S, 1.0) - S) / 2.0;
            return {t[0] + D, t[1] + D};
        });
        if (pos && e > 0.0) {
            const CMatrix Pp = es.projectors[0], P0 = es.projectors[1], Pm = es.projectors[2];
            ops.push_back([Pp, e](const MatTuple& t) -> MatTuple {
                return {(psd_clip(Pp + e * t[0]) - Pp) / e, t[1]};
            });
            ops.push_back([Pm, e](const MatTuple& t) -> MatTuple {
                return {t[0], (psd_clip(Pm + e * t[1]) - Pm) / e};
            });
            ops.push_back([P0, e](const MatTuple& t) -> MatTuple {
                const CMatrix S = t[0] + t[1];
                const CMatrix S2 = (P0 - psd_clip(P0 - e * S)) / e;
                const CMatrix D = (S2 - S) / 2.0;
                return {t[0] + D, t[1] + D};
            });
        }
        return ops;
    }
};

// Frobenius-isometric real coordinates: diagonal entries as-is, off-diagonal
// real/imag parts scaled by sqrt(2), so the packed Euclidean norm equals the
// Frobenius norm and Euclidean projections commute with packing.
void pack_into(const MatTuple& mats, double* out) {
    const double s2 = std::sqrt(2.0);
    std::size_t k = 0;
    for (const CMatrix& M : mats) {
        const int d = static_cast<int>(M.rows());
        for (int i = 0; i < d; ++i) {
            out[k++] = M(i, i).real();
            for (int j = i + 1; j < d; ++j) {
                out[k++] = s2 * M(i, j).real();
                out[k++] = s2 * M(i, j).imag();
            }
        }
    }
}

MatTuple unpack_from(const double* x, int nmat, int d) {
    const double inv = 1.0 / std::sqrt(2.0);
    MatTuple mats;
    mats.reserve(nmat);
    std::size_t k = 0;
    for (int m = 0; m < nmat; ++m) {
        CMatrix M = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            M(i, i) = x[k++];
            for (int j = i + 1; j < d; ++j) {
                M(i, j) = Complex(x[k] * inv, x[k + 1] * inv);
                M(j, i) = std::conj(M(i, j));
                k += 2;
            }
        }
        mats.push_back(std::move(M));
    }
    return mats;
}

MatTuple dykstra(MatTuple t, const std::vector<ProjOp>& ops, int sweeps = 40) {
    if (ops.empty() || t.empty()) return t;
    std::vector<MatTuple> incr(ops.size());
    for (auto& inc : incr)
        for (const CMatrix& M : t) inc.push_back(CMatrix::Zero(M.rows(), M.cols()));
    for (int s = 0; s < sweeps; ++s) {
        double moved = 0.0;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            MatTuple t0(t.size());
            for (std::size_t k = 0; k < t.size(); ++k) t0[k] = t[k] + incr[i][k];
            MatTuple t1 = ops[i](t0);
            for (std::size_t k = 0; k < t.size(); ++k) {
                incr[i][k] = t0[k] - t1[k];
                moved += frobenius_norm(t[k] - t1[k]);
            }
            t = std::move(t1);
        }
        if (moved < 1e-13) break;
    }
    return t;
}

// One optimization block: the variables of one or two measures.
struct BlockCtx {
    std::vector<FamSpace> spaces;
    std::vector<std::vector<ProjOp>> ops;
    std::vector<int> lens;
    int n = 0;

    explicit BlockCtx(std::vector<FamSpace> sp) : spaces(std::move(sp)) {
        for (const FamSpace& s : spaces) {
            ops.push_back(s.project_sets());
            lens.push_back(s.params());
            n += lens.back();
        }
    }

    std::vector<MatTuple> split(const Vec& x) const {
        std::vector<MatTuple> out;
        int k = 0;
        for (std::size_t i = 0; i < spaces.size(); ++i) {
            out.push_back(unpack_from(x.data() + k, spaces[i].nmat, spaces[i].d));
            k += lens[i];
        }
        return out;
    }

    Vec proj(const Vec& x) const {
        Vec out(n);
        int k = 0;
        for (std::size_t i = 0; i < spaces.size(); ++i) {
            MatTuple t = dykstra(unpack_from(x.data() + k, spaces[i].nmat, spaces[i].d), ops[i]);
            pack_into(t, out.data() + k);
            k += lens[i];
        }
        return out;
    }
};

// The block objective is a quadratic polynomial in the packed coordinates;
// unit finite differences recover it exactly.
struct Quad {
    double c = 0.0;
    Vec g;
    Mat H;
};

Quad quad_fit(const std::function<double(const Vec&)>& fun, int n) {
    Quad q;
    q.g = Vec::Zero(n);
    q.H = Mat::Zero(n, n);
    Vec z = Vec::Zero(n);
    q.c = fun(z);
    Vec fp(n), fm(n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        fp[i] = fun(e);
        e[i] = -1.0;
        fm[i] = fun(e);
        q.g[i] = 0.5 * (fp[i] - fm[i]);
        q.H(i, i) = fp[i] + fm[i] - 2.0 * q.c;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec e = Vec::Zero(n);
            e[i] = 1.0;
            e[j] = 1.0;
            q.H(i, j) = q.H(j, i) = fun(e) - fp[i] - fp[j] + q.c;
        }
    return q;
}

struct PgResult {
    double best = 0.0;
    Vec x;
};

PgResult block_max_pg(const std::function<double(const Vec&)>& fun, const BlockCtx& ctx,
                      std::uint64_t seed, int iters = 400, int nrand = 8) {
    const int n = ctx.n;
    if (n == 0) return {fun(Vec::Zero(0)), Vec::Zero(0)};
    const Quad q = quad_fit(fun, n);
    Eigen::SelfAdjointEigenSolver<Mat> hes(q.H);
    const double L = std::max(hes.eigenvalues().cwiseAbs().maxCoeff(), 1e-9);
    const double alpha = 1.0 / L;
    auto qval = [&](const Vec& x) { return q.c + q.g.dot(x) + 0.5 * x.dot(q.H * x); };

    std::vector<Vec> starts;
    const double gn = std::max(q.g.norm(), 1e-12);
    starts.push_back(ctx.proj(q.g / gn * std::sqrt(double(n))));
    starts.push_back(ctx.proj(-q.g / gn * std::sqrt(double(n))));
    starts.push_back(Vec::Zero(n));
    for (int r = 0; r < nrand; ++r) {
        SplitMix64 rng = substream(kAdversarySeed, seed, static_cast<std::uint64_t>(r), 1);
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        starts.push_back(ctx.proj(v));
    }

    PgResult res;
    res.best = -std::numeric_limits<double>::infinity();
    for (const Vec& x0 : starts) {
        Vec x = x0;
        double fx = qval(x);
        for (int it = 0; it < iters; ++it) {
            const Vec grad = q.g + q.H * x;
            Vec xn = ctx.proj(x + alpha * grad);
            double fn = qval(xn);
            if (fn <= fx + 1e-14) {
                double a = alpha;
                bool improved = false;
                for (int bt = 0; bt < 20; ++bt) {
                    a *= 0.5;
                    Vec xt = ctx.proj(x + a * grad);
                    const double ft = qval(xt);
                    if (ft > fx + 1e-14) {
                        xn = std::move(xt);
                        fn = ft;
                        improved = true;
                        break;
                    }
                }
                if (!improved) break;
            }
            x = std::move(xn);
            fx = fn;
        }
        if (fx > res.best) {
            res.best = fx;
            res.x = x;
        }
    }
    return res;
}

// Reachable interval of a linear functional over the feasible set.
std::pair<double, double> lin_range(const std::function<double(const Vec&)>& tfun,
                                    const BlockCtx& ctx, int iters = 400) {
    const int n = ctx.n;
    const double base = tfun(Vec::Zero(n));
    if (n == 0) return {base, base};
    Vec g(n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        g[i] = tfun(e) - base;
    }
    const Vec ghat = g / std::max(g.norm(), 1e-12);
    double lo = base, hi = base;
    for (const double sgn : {1.0, -1.0}) {
        Vec x = ctx.proj(sgn * g * 10.0);
        for (int it = 0; it < iters; ++it) {
            Vec xn = ctx.proj(x + 0.5 * sgn * ghat);
            if ((xn - x).norm() < 1e-12) {
                x = std::move(xn);
                break;
            }
            x = std::move(xn);
        }
        const double v = base + g.dot(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

// var_a, var_b, cov of one measured pair (x pair or p pair) as a function of
// the two outcome families. iid uses fixed-slot moments; averaged uses the
// exact q-integral coefficients.
using PairTerms =
    std::function<std::array<double, 3>(const std::vector<CMatrix>&, const std::vector<CMatrix>&)>;

PairTerms make_pair_terms(const PairScenario& s, const CMatrix& OA, const CMatrix& OB,
                          const FamSpace& spA, const FamSpace& spB, double eps, WitnessForm form,
                          const CMatrix& rA, const CMatrix& rB) {
    const CMatrix OA2 = OA * OA, OB2 = OB * OB;
    const CMatrix sigma = s.sigma;
    const std::vector<double> outsA = spA.es.eigenvalues, outsB = spB.es.eigenvalues;
    if (form == WitnessForm::iid) {
        return [=](const std::vector<CMatrix>& famsA,
                   const std::vector<CMatrix>& famsB) -> std::array<double, 3> {
            const CMatrix Cm = family_cminus(outsA, famsA), Dm = family_cminus(outsB, famsB);
            const CMatrix Cp = family_cplus(outsA, famsA), Dp = family_cplus(outsB, famsB);
            const double a2 = expect(rA, OA2).real() + eps * expect(rA, Cp).real();
            const double b2 = expect(rB, OB2).real() + eps * expect(rB, Dp).real();
            const double a1 = expect(rA, OA).real() + eps * expect(rA, Cm).real();
            const double b1 = expect(rB, OB).real() + eps * expect(rB, Dm).real();
            const double ab = pair_expect(sigma, OA + eps * Cm, OB + eps * Dm);
            return {a2 - a1 * a1, b2 - b1 * b1, ab - a1 * b1};
        };
    }
    return [=](const std::vector<CMatrix>& famsA,
               const std::vector<CMatrix>& famsB) -> std::array<double, 3> {
        const CMatrix Cm = family_cminus(outsA, famsA), Dm = family_cminus(outsB, famsB);
        const CMatrix Cp = family_cplus(outsA, famsA), Dp = family_cplus(outsB, famsB);
        const double a2 = sym_mean(sigma, OA2) + eps * sym_mean(sigma, Cp);
        const double b2 = sym_mean(sigma, OB2) + eps * sym_mean(sigma, Dp);
        const double a1 = sym_mean(sigma, OA) + eps * sym_mean(sigma, Cm);
        const double b1 = sym_mean(sigma, OB) + eps * sym_mean(sigma, Dm);
        const CMatrix PA = OA + eps * Cm, PB = OB + eps * Dm;
        const double var_a =
            a2 + (2.0 / 3.0) * pair_expect(sigma, PA, PA) - (4.0 / 3.0) * a1 * a1;
        const double var_b =
            b2 + (2.0 / 3.0) * pair_expect(sigma, PB, PB) - (4.0 / 3.0) * b1 * b1;
        const double cov = (1.0 / 3.0) * (sym_joint(sigma, PA, PB) - 2.0 * a1 * b1);
        return {var_a, var_b, cov};
    };
}

struct WorstCaseParts {
    std::array<double, 3> x_terms;  // var_xa, var_xb, cov_x
    std::array<double, 3> p_terms;  // var_pa, var_pb, cov_p
    double comm_a = 0.0, comm_b = 0.0;
};

// Worst residual |<K>| after perturbation: the adversary picks the family
// minimizing the magnitude over the reachable interval.
double worst_comm(double k0, double eps, const std::function<double(const Vec&)>& tfun,
                  const BlockCtx& ctx) {
    const auto [tlo, thi] = lin_range(tfun, ctx);
    const double lo = k0 + eps * tlo, hi = k0 + eps * thi;
    if (lo <= 0.0 && 0.0 <= hi) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
}

WitnessReport povm_worstcase(const PairScenario& s, double eps, bool positivity,
                             WitnessForm form) {
    s.validate();
    if (eps < 0.0 || !std::isfinite(eps))
        throw std::invalid_argument("perturbation strength must be nonnegative");
    const int d = s.dim;
    const std::vector<int> dims = {d, d};
    const CMatrix rA = partial_trace(s.sigma, dims, {0});
    const CMatrix rB = partial_trace(s.sigma, dims, {1});
    const CMatrix KA = commutator_observable(s.a1, s.a2).matrix;
    const CMatrix KB = commutator_observable(s.b1, s.b2).matrix;

    WorstCaseParts parts;
    std::uint64_t block_id = 0;

    // x pair (A1,B1) adds 2*cov, p pair (A2,B2) subtracts it
    const std::array<std::tuple<const CMatrix*, const CMatrix*, double>, 2> pairs = {
        std::make_tuple(&s.a1.matrix, &s.b1.matrix, 1.0),
        std::make_tuple(&s.a2.matrix, &s.b2.matrix, -1.0)};
    for (const auto& [pOA, pOB, sign] : pairs) {
        FamSpace spA(*pOA, eps, positivity), spB(*pOB, eps, positivity);
        const PairTerms terms = make_pair_terms(s, *pOA, *pOB, spA, spB, eps, form, rA, rB);
        BlockCtx ctx({spA, spB});
        const int nA = spA.params();
        auto fun = [&](const Vec& x) {
            const MatTuple matsA = unpack_from(x.data(), spA.nmat, spA.d);
            const MatTuple matsB = unpack_from(x.data() + nA, spB.nmat, spB.d);
            const std::array<double, 3> t = terms(spA.fams(matsA), spB.fams(matsB));
            return t[0] + t[1] + sign * 2.0 * t[2];
        };
        const PgResult pg = block_max_pg(fun, ctx, block_id++);
        Vec xb = pg.x.size() ? pg.x : Vec::Zero(ctx.n);
        const MatTuple matsA = unpack_from(xb.data(), spA.nmat, spA.d);
        const MatTuple matsB = unpack_from(xb.data() + nA, spB.nmat, spB.d);
        const std::array<double, 3> t = terms(spA.fams(matsA), spB.fams(matsB));
        if (sign > 0)
            parts.x_terms = t;
        else
            parts.p_terms = t;
    }

    for (const bool side_a : {true, false}) {
        const CMatrix& K = side_a ? KA : KB;
        FamSpace spK(K, eps, positivity);
        BlockCtx ctx({spK});
        const std::vector<double> outs = spK.es.eigenvalues;
        double k0;
        std::function<double(const Vec&)> tfun;
        if (form == WitnessForm::iid) {
            const CMatrix rr = side_a ? rA : rB;
            k0 = expect(rr, K).real();
            tfun = [&, rr, outs](const Vec& x) {
                const MatTuple mats = unpack_from(x.data(), spK.nmat, spK.d);
                return expect(rr, family_cminus(outs, spK.fams(mats))).real();
            };
        } else {
            k0 = sym_mean(s.sigma, K);
            tfun = [&, outs](const Vec& x) {
                const MatTuple mats = unpack_from(x.data(), spK.nmat, spK.d);
                return sym_mean(s.sigma, family_cminus(outs, spK.fams(mats)));
            };
        }
        const double value = worst_comm(k0, eps, tfun, ctx);
        (side_a ? parts.comm_a : parts.comm_b) = value;
        ++block_id;
    }

    WitnessReport r;
    r.terms = {{"var_xa", parts.x_terms[0]}, {"var_xb", parts.x_terms[1]},
               {"cov_x", parts.x_terms[2]},  {"var_pa", parts.p_terms[0]},
               {"var_pb", parts.p_terms[1]}, {"cov_p", parts.p_terms[2]},
               {"comm_a", parts.comm_a},     {"comm_b", parts.comm_b}};
    r.f = r.reconstruct();
    r.regime = positivity ? "povm_worstcase" : "povm_worstcase_unconstrained";
    r.level = eps;
    return r;
}

}  // namespace

WitnessReport f_iid_povm_worstcase(const PairScenario& s, double eps, bool positivity) {
    return povm_worstcase(s, eps, positivity, WitnessForm::iid);
}

WitnessReport f_avg_povm_worstcase(const PairScenario& s, double eps, bool positivity) {
    return povm_worstcase(s, eps, positivity, WitnessForm::averaged);
}

FamilyPerturbation sample_admissible_families(const PairScenario& s, double eps, bool positivity,
                                              std::uint64_t seed) {
    s.validate();
    const CMatrix KA = commutator_observable(s.a1, s.a2).matrix;
    const CMatrix KB = commutator_observable(s.b1, s.b2).matrix;
    const std::array<const CMatrix*, 6> obs = {&s.a1.matrix, &s.a2.matrix, &s.b1.matrix,
                                               &s.b2.matrix, &KA, &KB};
    FamilyPerturbation out;
    std::array<std::vector<CMatrix>*, 6> slots = {&out.a1, &out.a2, &out.b1,
                                                  &out.b2, &out.ka, &out.kb};
    for (int i = 0; i < 6; ++i) {
        FamSpace sp(*obs[i], eps, positivity);
        SplitMix64 rng = substream(seed, 0x73616d70ull, static_cast<std::uint64_t>(i), 2);
        MatTuple mats;
        for (int m = 0; m < sp.nmat; ++m) {
            CMatrix M(sp.d, sp.d);
            for (int r = 0; r < sp.d; ++r) {
                M(r, r) = rng.normal();
                for (int c = r + 1; c < sp.d; ++c) {
                    M(r, c) = Complex(rng.normal(), rng.normal());
                    M(c, r) = std::conj(M(r, c));
                }
            }
            mats.push_back(std::move(M));
        }
        // Gaussian draws start far outside the feasible set, so give the
        // projection enough sweeps to actually reach its fixed point; the
        // early-out keeps converged cases cheap.
        *slots[i] = sp.fams(dykstra(std::move(mats), sp.project_sets(), 4000));
    }
    return out;
}

double f_measured_with_families(const PairScenario& s, double eps, const FamilyPerturbation& fams,
                                WitnessForm form) {
    s.validate();
    if (eps < 0.0 || !std::isfinite(eps))
        throw std::invalid_argument("perturbation strength must be nonnegative");
    const int d = s.dim;
    const std::vector<int> dims = {d, d};
    const CMatrix rA = partial_trace(s.sigma, dims, {0});
    const CMatrix rB = partial_trace(s.sigma, dims, {1});
    const CMatrix KA = commutator_observable(s.a1, s.a2).matrix;
    const CMatrix KB = commutator_observable(s.b1, s.b2).matrix;

    FamSpace spA1(s.a1.matrix, eps, true), spB1(s.b1.matrix, eps, true);
    FamSpace spA2(s.a2.matrix, eps, true), spB2(s.b2.matrix, eps, true);
    FamSpace spKA(KA, eps, true), spKB(KB, eps, true);
    const std::array<std::pair<const FamSpace*, const std::vector<CMatrix>*>, 6> check = {
        std::make_pair(&spA1, &fams.a1), std::make_pair(&spA2, &fams.a2),
        std::make_pair(&spB1, &fams.b1), std::make_pair(&spB2, &fams.b2),
        std::make_pair(&spKA, &fams.ka), std::make_pair(&spKB, &fams.kb)};
    for (const auto& [sp, fam] : check)
        if (fam->size() != sp->es.eigenvalues.size())
            throw std::invalid_argument("family size does not match observable outcome count");

    const PairTerms x_terms =
        make_pair_terms(s, s.a1.matrix, s.b1.matrix, spA1, spB1, eps, form, rA, rB);
    const PairTerms p_terms =
        make_pair_terms(s, s.a2.matrix, s.b2.matrix, spA2, spB2, eps, form, rA, rB);
    const std::array<double, 3> tx = x_terms(fams.a1, fams.b1);
    const std::array<double, 3> tp = p_terms(fams.a2, fams.b2);

    auto comm_val = [&](const FamSpace& sp, const CMatrix& K, const std::vector<CMatrix>& fam,
                        bool side_a) {
        const CMatrix shift = family_cminus(sp.es.eigenvalues, fam);
        if (form == WitnessForm::iid)
            return std::abs(expect(side_a ? rA : rB, K + eps * shift).real());
        return std::abs(sym_mean(s.sigma, K + eps * shift));
    };
    const double ca = comm_val(spKA, KA, fams.ka, true);
    const double cb = comm_val(spKB, KB, fams.kb, false);

    return tx[0] + tx[1] + 2.0 * tx[2] + tp[0] + tp[1] - 2.0 * tp[2] - ca - cb;
}

}  // namespace macroent
