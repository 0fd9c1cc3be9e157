#include "gapscope/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gapscope/parallel.hpp"

namespace gapscope {

namespace {

constexpr double kLowDiscrepancyStep = 0.6180339887498949;  // {j*phi} sequence

double frac(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

TridiagonalOperator truncated_tridiagonal(double lambda, const Frequency& alpha,
                                          double theta, int n) {
    if (n < 1) throw std::invalid_argument("truncated_tridiagonal: n >= 1");
    TridiagonalOperator t;
    t.diagonal.resize(n);
    for (int j = 0; j < n; ++j)
        t.diagonal[j] =
            2.0 * lambda *
            std::cos(2.0 * M_PI * (static_cast<double>(j) * alpha.value + theta));
    t.norm_bound = 2.0 + 2.0 * std::fabs(lambda);
    return t;
}

int sturm_count(const TridiagonalOperator& t, double E) {
    const double tiny =
        std::numeric_limits<double>::epsilon() * (t.norm_bound + std::fabs(E));
    int count = 0;
    double d = 1.0;
    for (std::size_t j = 0; j < t.diagonal.size(); ++j) {
        d = (j == 0) ? t.diagonal[0] - E : t.diagonal[j] - E - 1.0 / d;
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

double ids(double lambda, const Frequency& alpha, double E, int n,
           int n_phases, std::uint64_t seed) {
    if (n < 1 || n_phases < 1) throw std::invalid_argument("ids: bad sizes");
    std::mt19937_64 rng(seed);
    double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (int j = 0; j < n_phases; ++j) {
        double theta = frac(offset + j * kLowDiscrepancyStep);
        auto t = truncated_tridiagonal(lambda, alpha, theta, n);
        acc += static_cast<double>(sturm_count(t, E)) / n;
    }
    return acc / n_phases;
}

MembershipVerdict spectrum_member(double lambda, const Frequency& alpha,
                                  double E, const UhParams& params) {
    SchrodingerCocycle c{lambda, E, 0.0, alpha};
    auto uh = is_uniformly_hyperbolic(c, params);
    MembershipVerdict v;
    v.member = !uh.hyperbolic;
    v.margin = uh.margin;
    v.indeterminate = uh.indeterminate;
    return v;
}

SpectrumApproximation spectrum_intervals(double lambda, const Frequency& alpha,
                                         const SpectrumScanParams& params) {
    SpectrumApproximation out;
    out.lambda = lambda;
    out.alpha_value = alpha.value;
    out.grid_step = params.grid_step;
    out.e_min = -2.0 - 2.0 * std::fabs(lambda);
    out.e_max = 2.0 + 2.0 * std::fabs(lambda);
    const auto npts = static_cast<std::size_t>(
                          std::floor((out.e_max - out.e_min) / params.grid_step +
                                     0.5)) + 1;
    out.member.assign(npts, 0);
    out.margin.assign(npts, 0.0);
    out.ids_values.assign(npts, 0.0);

    parallel_for(npts, [&](std::size_t i) {
        double E = out.e_min + static_cast<double>(i) * params.grid_step;
        out.ids_values[i] =
            ids(lambda, alpha, E, params.n_ids, params.ids_phases, params.seed);
    }, params.threads);

    double quantum = 1.0 / (static_cast<double>(params.n_ids) *
                            static_cast<double>(params.ids_phases));
    double growth_tol = params.ids_growth_tol > 0.0 ? params.ids_growth_tol
                                                    : 6.0 * quantum;

    parallel_for(npts, [&](std::size_t i) {
        std::size_t lo = i > 0 ? i - 1 : 0;
        std::size_t hi = i + 1 < npts ? i + 1 : npts - 1;
        double growth = out.ids_values[hi] - out.ids_values[lo];
        if (growth > growth_tol) {
            out.member[i] = 1;  // IDS strictly grows: in spectrum
            return;
        }
        double E = out.e_min + static_cast<double>(i) * params.grid_step;
        SchrodingerCocycle c{lambda, E, 0.0, alpha};
        auto uh = is_uniformly_hyperbolic(c, params.uh);
        // escalate: a genuine gap margin is n-independent while the
        // adaptive growth threshold 2 ln(n)/n keeps falling
        UhParams esc = params.uh;
        for (int tries = 0; (!uh.hyperbolic || uh.indeterminate) && tries < 2;
             ++tries) {
            esc.n_iter *= 4;
            uh = is_uniformly_hyperbolic(c, esc);
        }
        out.margin[i] = uh.margin;
        // indeterminate verdicts conservatively count as spectrum
        out.member[i] = (!uh.hyperbolic || uh.indeterminate) ? 1 : 0;
    }, params.threads);

    for (std::size_t i = 0; i < npts; ++i) {
        if (!out.member[i]) continue;
        std::size_t j = i;
        while (j + 1 < npts && out.member[j + 1]) ++j;
        out.intervals.push_back(
            {out.e_min + static_cast<double>(i) * params.grid_step,
             out.e_min + static_cast<double>(j) * params.grid_step});
        i = j;
    }
    return out;
}

std::vector<Interval> rational_spectrum(double lambda, std::int64_t p,
                                        std::int64_t q, int theta_samples,
                                        double grid_step) {
    if (q < 1) throw std::invalid_argument("rational_spectrum: q >= 1");
    if (p == 0 ? q != 1
               : std::gcd(static_cast<long long>(std::llabs(p)),
                          static_cast<long long>(q)) != 1)
        throw std::invalid_argument("rational_spectrum: gcd(p,q) must be 1");
    if (theta_samples < 1)
        throw std::invalid_argument("rational_spectrum: theta_samples >= 1");
    const double alpha = static_cast<double>(p) / static_cast<double>(q);
    const double e_min = -2.0 - 2.0 * std::fabs(lambda);
    const double e_max = 2.0 + 2.0 * std::fabs(lambda);
    const auto npts =
        static_cast<std::size_t>(std::floor((e_max - e_min) / grid_step + 0.5)) +
        1;
    std::vector<std::uint8_t> member(npts, 0);
    parallel_for(npts, [&](std::size_t i) {
        double E = e_min + static_cast<double>(i) * grid_step;
        for (int s = 0; s < theta_samples; ++s) {
            // one period of q*theta
            double theta = static_cast<double>(s) /
                           (static_cast<double>(theta_samples) *
                            static_cast<double>(q));
            Mat2 m = Mat2::identity();
            for (std::int64_t k = 0; k < q; ++k) {
                double t = E - 2.0 * lambda *
                                   std::cos(2.0 * M_PI *
                                            (theta + static_cast<double>(k) * alpha));
                m = Mat2{t, -1.0, 1.0, 0.0} * m;
            }
            if (std::fabs(m.a11 + m.a22) <= 2.0) {
                member[i] = 1;
                break;
            }
        }
    });
    std::vector<Interval> out;
    for (std::size_t i = 0; i < npts; ++i) {
        if (!member[i]) continue;
        std::size_t j = i;
        while (j + 1 < npts && member[j + 1]) ++j;
        out.push_back({e_min + static_cast<double>(i) * grid_step,
                       e_min + static_cast<double>(j) * grid_step});
        i = j;
    }
    return out;
}

namespace {

double point_to_set(double x, const std::vector<Interval>& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : s) {
        if (x < iv.lo)
            best = std::min(best, iv.lo - x);
        else if (x > iv.hi)
            best = std::min(best, x - iv.hi);
        else
            return 0.0;
    }
    return best;
}

double directed_hausdorff(const std::vector<Interval>& a,
                          const std::vector<Interval>& b) {
    // sup over points of a of distance to b; attained at endpoints of a or
    // at endpoints of gaps of b projected into a
    double worst = 0.0;
    for (const auto& iv : a) {
        worst = std::max(worst, point_to_set(iv.lo, b));
        worst = std::max(worst, point_to_set(iv.hi, b));
    }
    // interior candidates: midpoints between consecutive b-intervals
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double mid = 0.5 * (b[i].hi + b[i + 1].lo);
        for (const auto& iv : a)
            if (mid >= iv.lo && mid <= iv.hi)
                worst = std::max(worst, point_to_set(mid, b));
    }
    return worst;
}

}  // namespace

double hausdorff_distance(const std::vector<Interval>& a,
                          const std::vector<Interval>& b) {
    if (a.empty() || b.empty())
        return a.empty() && b.empty()
                   ? 0.0
                   : std::numeric_limits<double>::infinity();
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::string SpectrumApproximation::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "E,member,margin,ids\n";
    for (std::size_t i = 0; i < member.size(); ++i) {
        double E = e_min + static_cast<double>(i) * grid_step;
        os << E << ',' << int(member[i]) << ',' << margin[i] << ','
           << ids_values[i] << '\n';
    }
    return os.str();
}

std::string SpectrumApproximation::intervals_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "[";
    for (std::size_t i = 0; i < intervals.size(); ++i)
        os << (i ? ", [" : "[") << intervals[i].lo << ", " << intervals[i].hi
           << "]";
    os << "]";
    return os.str();
}

}  // namespace gapscope
