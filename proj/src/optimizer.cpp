#include "macroent/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "macroent/linalg.hpp"
#include "macroent/rng.hpp"
#include "macroent/witness.hpp"

namespace macroent {

int ParamLayout::state_params() const {
    if (fix_state_phiplus) return 0;
    if (symmetric_state) return dim * (dim + 1);  // upper triangle, complex
    return 2 * dim * dim;
}

int ParamLayout::observable_params() const {
    return mode == SearchMode::spin_plane ? 4 : 4 * dim * dim;
}

void ParamLayout::validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("search supports dim 2 or 3 only");
    if (fix_state_phiplus && symmetric_state)
        throw std::invalid_argument("fixed-state search has no state parameters");
}

namespace {

// Hermitian matrix from d*d reals: diagonal entry then re/im of each
// upper-triangle entry, row by row.
CMatrix herm_from(const double* x, int d) {
    CMatrix H = CMatrix::Zero(d, d);
    std::size_t k = 0;
    for (int i = 0; i < d; ++i) {
        H(i, i) = x[k++];
        for (int j = i + 1; j < d; ++j) {
            H(i, j) = Complex(x[k], x[k + 1]);
            H(j, i) = std::conj(H(i, j));
            k += 2;
        }
    }
    return H;
}

void herm_into(const CMatrix& H, double* x) {
    const int d = static_cast<int>(H.rows());
    std::size_t k = 0;
    for (int i = 0; i < d; ++i) {
        x[k++] = H(i, i).real();
        for (int j = i + 1; j < d; ++j) {
            x[k++] = H(i, j).real();
            x[k++] = H(i, j).imag();
        }
    }
}

// Bounded eigenvalue squashing: w -> sin(clip(w, -pi/2, pi/2)) maps the reals
// onto [-1,1] with the endpoints reachable, so norm-1 observables are inside
// the search space.
CMatrix squash(const CMatrix& H) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    Eigen::VectorXd w = es.eigenvalues();
    for (int i = 0; i < w.size(); ++i)
        w[i] = std::sin(std::clamp(w[i], -M_PI / 2.0, M_PI / 2.0));
    const CMatrix V = es.eigenvectors();
    return V * w.cast<Complex>().asDiagonal() * V.adjoint();
}

CMatrix unsquash(const CMatrix& O) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(O);
    Eigen::VectorXd w = es.eigenvalues();
    for (int i = 0; i < w.size(); ++i) w[i] = std::asin(std::clamp(w[i], -1.0, 1.0));
    const CMatrix V = es.eigenvectors();
    return V * w.cast<Complex>().asDiagonal() * V.adjoint();
}

double planar_angle(const CMatrix& O) { return -std::arg(O(0, 1)); }

}  // namespace

PairScenario decode(const ParamVector& p) {
    p.layout.validate();
    const ParamLayout& L = p.layout;
    const int d = L.dim;
    if (static_cast<int>(p.values.size()) != L.total())
        throw std::invalid_argument("parameter vector length does not match layout");
    const double* x = p.values.data();

    CVector amp = CVector::Zero(d * d);
    if (L.fix_state_phiplus) {
        for (int i = 0; i < d; ++i) amp[i * d + i] = 1.0 / std::sqrt(double(d));
    } else if (L.symmetric_state) {
        std::size_t k = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                const Complex c(x[k], x[k + 1]);
                amp[i * d + j] = c;
                amp[j * d + i] = c;
                k += 2;
            }
    } else {
        for (int i = 0; i < d * d; ++i) amp[i] = Complex(x[2 * i], x[2 * i + 1]);
    }

    const double* ox = x + L.state_params();
    Observable obs[4];
    if (L.mode == SearchMode::spin_plane) {
        for (int i = 0; i < 4; ++i) obs[i] = spin_plane_observable(d, ox[i]);
    } else {
        for (int i = 0; i < 4; ++i) {
            obs[i].matrix = squash(herm_from(ox + i * d * d, d));
            obs[i].norm_bound = 1.0;
        }
    }
    return make_pure_scenario(d, amp, obs[0], obs[1], obs[2], obs[3]);
}

ParamVector encode(const PairScenario& s, const ParamLayout& layout) {
    layout.validate();
    const int d = layout.dim;
    if (s.dim != d) throw std::invalid_argument("scenario dimension does not match layout");
    ParamVector p{layout, std::vector<double>(layout.total(), 0.0)};
    double* x = p.values.data();

    if (!layout.fix_state_phiplus) {
        Ket ket = dominant_ket(s.sigma, d * d);
        CVector amp = ket.amplitudes;
        int imax = 0;
        for (int i = 1; i < amp.size(); ++i)
            if (std::abs(amp[i]) > std::abs(amp[imax])) imax = i;
        if (std::abs(amp[imax]) > 0)
            amp *= std::polar(1.0, -std::arg(amp[imax]));
        if (layout.symmetric_state) {
            std::size_t k = 0;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    if (std::abs(amp[i * d + j] - amp[j * d + i]) > 1e-8)
                        throw std::invalid_argument("state is not permutation-symmetric");
                    x[k++] = amp[i * d + j].real();
                    x[k++] = amp[i * d + j].imag();
                }
        } else {
            for (int i = 0; i < d * d; ++i) {
                x[2 * i] = amp[i].real();
                x[2 * i + 1] = amp[i].imag();
            }
        }
    }

    double* ox = x + layout.state_params();
    const Observable* obs[4] = {&s.a1, &s.a2, &s.b1, &s.b2};
    if (layout.mode == SearchMode::spin_plane) {
        for (int i = 0; i < 4; ++i) ox[i] = planar_angle(obs[i]->matrix);
    } else {
        for (int i = 0; i < 4; ++i) herm_into(unsquash(obs[i]->matrix), ox + i * d * d);
    }
    return p;
}

namespace {

using Vec = Eigen::VectorXd;

struct NmResult {
    Vec x;
    double f = 0.0;
};

// Nelder-Mead simplex descent: reflection 1, expansion 2, contraction 1/2,
// shrink 1/2; initial simplex perturbs each coordinate by 5% (absolute
// 2.5e-4 at zero).
NmResult nelder_mead(const std::function<double(const Vec&)>& fun, const Vec& x0,
                     int max_iters = 2000, double diameter_tol = 1e-9) {
    const int n = static_cast<int>(x0.size());
    std::vector<Vec> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 0; i < n; ++i) {
        if (xs[i + 1][i] != 0.0)
            xs[i + 1][i] *= 1.05;
        else
            xs[i + 1][i] = 2.5e-4;
    }
    for (int i = 0; i <= n; ++i) fs[i] = fun(xs[i]);
    std::vector<int> idx(n + 1);

    for (int it = 0; it < max_iters; ++it) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        {
            std::vector<Vec> xs2(n + 1);
            std::vector<double> fs2(n + 1);
            for (int i = 0; i <= n; ++i) {
                xs2[i] = xs[idx[i]];
                fs2[i] = fs[idx[i]];
            }
            xs.swap(xs2);
            fs.swap(fs2);
        }
        double diam = 0.0;
        for (int i = 1; i <= n; ++i) diam = std::max(diam, (xs[i] - xs[0]).norm());
        if (diam < diameter_tol) break;

        Vec centroid = Vec::Zero(n);
        for (int i = 0; i < n; ++i) centroid += xs[i];
        centroid /= n;

        const Vec xr = centroid + (centroid - xs[n]);
        const double fr = fun(xr);
        if (fr < fs[0]) {
            const Vec xe = centroid + 2.0 * (centroid - xs[n]);
            const double fe = fun(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else if (fr < fs[n]) {
            const Vec xc = centroid + 0.5 * (xr - centroid);
            const double fc = fun(xc);
            if (fc <= fr) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = fun(xs[i]);
                }
            }
        } else {
            const Vec xc = centroid + 0.5 * (xs[n] - centroid);
            const double fc = fun(xc);
            if (fc < fs[n]) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = fun(xs[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best]};
}

constexpr std::uint64_t kStartStreamTag = 0x6f70742d73746172ull;

Vec random_start(const ParamLayout& L, std::uint64_t seed, int start_index) {
    SplitMix64 rng = substream(seed, kStartStreamTag, static_cast<std::uint64_t>(start_index), 0);
    Vec x(L.total());
    int k = 0;
    for (int i = 0; i < L.state_params(); ++i) x[k++] = rng.uniform(-1.0, 1.0);
    if (L.mode == SearchMode::spin_plane) {
        for (int i = 0; i < 4; ++i) x[k++] = rng.uniform(0.0, 2.0 * M_PI);
    } else {
        for (int i = 0; i < L.observable_params(); ++i) x[k++] = rng.uniform(-M_PI / 2, M_PI / 2);
    }
    return x;
}

OptResult multistart(const ParamLayout& L, const std::function<double(const PairScenario&)>& obj,
                     int starts, std::uint64_t seed) {
    if (starts < 1) throw std::invalid_argument("need at least one start");
    auto fun = [&](const Vec& v) {
        ParamVector p{L, std::vector<double>(v.data(), v.data() + v.size())};
        return obj(decode(p));
    };
    OptResult out;
    out.starts = starts;
    out.seed = seed;
    out.per_start_bests.resize(starts);
    NmResult best;
    best.f = std::numeric_limits<double>::infinity();
    int best_start = 0;
    for (int k = 0; k < starts; ++k) {
        const NmResult r = nelder_mead(fun, random_start(L, seed, k));
        out.per_start_bests[k] = r.f;
        if (r.f < best.f) {
            best = r;
            best_start = k;
        }
    }
    // two polish restarts continue the winning start's local descent
    for (int polish = 0; polish < 2; ++polish) {
        const NmResult r = nelder_mead(fun, best.x);
        if (r.f < best.f) best = r;
    }
    out.per_start_bests[best_start] = best.f;
    out.best_f = best.f;
    ParamVector p{L, std::vector<double>(best.x.data(), best.x.data() + best.x.size())};
    out.scenario = decode(p);
    return out;
}

}  // namespace

OptResult optimize_rme(int starts, std::uint64_t seed, SearchMode mode, bool fix_state_phiplus) {
    ParamLayout L;
    L.dim = 2;
    L.symmetric_state = false;
    L.fix_state_phiplus = fix_state_phiplus;
    L.mode = mode;
    return multistart(L, [](const PairScenario& s) { return f_iid(s).f; }, starts, seed);
}

OptResult optimize_ime(int dim, int starts, std::uint64_t seed) {
    ParamLayout L;
    L.dim = dim;
    L.symmetric_state = true;
    L.mode = SearchMode::spin_plane;
    return multistart(L, [](const PairScenario& s) { return f_avg(s).f; }, starts, seed);
}

}  // namespace macroent
