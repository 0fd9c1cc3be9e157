#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gapscope/spectrum.hpp"

using namespace gapscope;

namespace {

// Independent oracle: cyclic Jacobi eigenvalue iteration on the dense
// symmetric matrix built from a tridiagonal operator.
std::vector<double> jacobi_eigenvalues(const std::vector<double>& diag) {
    int n = static_cast<int>(diag.size());
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * n + j];
    };
    for (int i = 0; i < n; ++i) {
        at(i, i) = diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) at(i, i + 1) = at(i + 1, i) = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(at(p, q)) < 1e-15) continue;
                double theta = 0.5 * std::atan2(2.0 * at(p, q),
                                                at(q, q) - at(p, p));
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
    return ev;
}

int count_below(const std::vector<double>& ev, double E) {
    int c = 0;
    for (double v : ev)
        if (v < E) ++c;
    return c;
}

}  // namespace

TEST_CASE("truncated tridiagonal diagonals") {
    auto g = golden_frequency();
    auto t0 = truncated_tridiagonal(0.0, g, 0.3, 3);
    REQUIRE(t0.diagonal.size() == 3);
    for (double v : t0.diagonal) CHECK(v == 0.0);

    auto t1 = truncated_tridiagonal(1.0, g, 0.0, 2);
    CHECK(t1.diagonal[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t1.diagonal[1] ==
          doctest::Approx(2.0 * std::cos(2.0 * M_PI * g.value)).epsilon(1e-9));
    CHECK(t1.diagonal[1] == doctest::Approx(-1.474745).epsilon(1e-4));

    auto t2 = truncated_tridiagonal(0.5, g, 0.25, 1);
    CHECK(t2.diagonal[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sturm_count basics") {
    TridiagonalOperator one{{0.0}, 2.0};
    CHECK(sturm_count(one, 1.0) == 1);
    CHECK(sturm_count(one, -1.0) == 0);

    // free 3-site section: eigenvalues -sqrt 2, 0, sqrt 2
    TridiagonalOperator three{{0.0, 0.0, 0.0}, 2.0};
    CHECK(sturm_count(three, 1.0) == 2);
    CHECK(sturm_count(three, -1.41) == 1);
    CHECK(sturm_count(three, 1.42) == 3);

    CHECK(sturm_count(three, -5.0) == 0);
    CHECK(sturm_count(three, 5.0) == 3);
}

TEST_CASE("sturm counts equal Jacobi eigenvalue counts exactly") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<int> size(1, 8);
    for (int trial = 0; trial < 300; ++trial) {
        int n = size(rng);
        std::vector<double> diag(static_cast<std::size_t>(n));
        for (auto& v : diag) v = u(rng);
        TridiagonalOperator t{diag, 8.0};
        auto ev = jacobi_eigenvalues(diag);
        for (int probe = 0; probe < 4; ++probe) {
            double E = u(rng);
            CHECK(sturm_count(t, E) == count_below(ev, E));
        }
    }
}

TEST_CASE("ids boundary and symmetry values") {
    auto g = golden_frequency();
    CHECK(ids(0.5, g, -2.0 - 1.0 - 1.0, 500, 8, 0) == 0.0);
    CHECK(ids(0.5, g, 2.0 + 1.0 + 1.0, 500, 8, 0) == 1.0);
    CHECK(ids(0.5, g, 0.0, 2000, 16, 0) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(ids(0.0, g, 0.0, 2000, 16, 0) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("ids is monotone in E") {
    auto g = golden_frequency();
    double prev = -1.0;
    for (double E = -3.2; E <= 3.2; E += 0.1) {
        double v = ids(0.5, g, E, 500, 8, 0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("ids symmetry E <-> -E") {
    // u_n -> (-1)^n u_n conjugates H to -H up to a phase shift, so the
    // spectrum is symmetric and N(-E) = 1 - N(E^-)
    auto g = golden_frequency();
    for (double E : {0.5, 1.0, 1.7, 2.4}) {
        double a = ids(0.5, g, E, 1000, 16, 0);
        double b = ids(0.5, g, -E, 1000, 16, 0);
        CHECK(a + b == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("spectrum membership verdicts") {
    auto g = golden_frequency();
    CHECK(!spectrum_member(0.5, g, 10.0).member);
    CHECK(spectrum_member(0.5, g, 0.0).member);
    CHECK(spectrum_member(0.0, g, 1.0).member);
    CHECK(spectrum_member(0.0, g, -1.5).member);
    CHECK(!spectrum_member(0.0, g, 2.4).member);
    CHECK(!spectrum_member(0.0, g, -2.4).member);
}

TEST_CASE("free spectrum is a single interval") {
    auto g = golden_frequency();
    SpectrumScanParams p;
    p.grid_step = 5e-3;
    p.n_ids = 500;
    auto spec = spectrum_intervals(0.0, g, p);
    REQUIRE(spec.intervals.size() == 1);
    CHECK(spec.intervals[0].lo == doctest::Approx(-2.0).epsilon(0.01));
    CHECK(spec.intervals[0].hi == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("subcritical spectrum splits into several intervals") {
    auto g = golden_frequency();
    SpectrumScanParams p;
    p.grid_step = 2e-3;
    p.n_ids = 1000;
    auto spec = spectrum_intervals(0.5, g, p);
    CHECK(spec.intervals.size() >= 3);
    for (const auto& iv : spec.intervals) {
        CHECK(iv.lo >= -3.0 - 2e-3);
        CHECK(iv.hi <= 3.0 + 2e-3);
    }
    // symmetry under E -> -E within grid resolution
    const auto& iv = spec.intervals;
    for (std::size_t i = 0; i < iv.size(); ++i) {
        const auto& mirror = iv[iv.size() - 1 - i];
        CHECK(std::fabs(iv[i].lo + mirror.hi) < 3.0 * p.grid_step);
    }
}

TEST_CASE("rational spectrum base cases") {
    auto iv = rational_spectrum(0.0, 0, 1, 4, 1e-3);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0].lo == doctest::Approx(-2.0).epsilon(1e-2));
    CHECK(iv[0].hi == doctest::Approx(2.0).epsilon(1e-2));

    auto iv2 = rational_spectrum(0.7, 0, 1, 1, 1e-3);
    REQUIRE(iv2.size() == 1);
    CHECK(iv2[0].lo == doctest::Approx(-2.0 + 1.4).epsilon(1e-2));
    CHECK(iv2[0].hi == doctest::Approx(2.0 + 1.4).epsilon(1e-2));

    CHECK_THROWS(rational_spectrum(0.5, 2, 4, 4));
    CHECK_THROWS(rational_spectrum(0.5, 0, 3, 4));
}

TEST_CASE("rational approximant spectrum close to irrational scan") {
    auto g = golden_frequency();
    auto rational = rational_spectrum(0.5, 13, 21, 64, 1e-3);
    SpectrumScanParams p;
    p.grid_step = 2e-3;
    p.n_ids = 1000;
    auto irr = spectrum_intervals(0.5, g, p);
    CHECK(hausdorff_distance(rational, irr.intervals) < 0.05);
}

TEST_CASE("hausdorff distance on simple interval unions") {
    std::vector<Interval> a = {{0.0, 1.0}};
    std::vector<Interval> b = {{0.0, 1.2}};
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.2).epsilon(1e-12));
    std::vector<Interval> c = {{0.0, 0.4}, {0.6, 1.0}};
    CHECK(hausdorff_distance(a, c) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("membership false implies locally constant ids") {
    auto g = golden_frequency();
    double E = 0.8162;  // inside the widest gap at lambda = 0.5
    REQUIRE(!spectrum_member(0.5, g, E).member);
    double lo = ids(0.5, g, E - 0.05, 2000, 16, 0);
    double hi = ids(0.5, g, E + 0.05, 2000, 16, 0);
    CHECK(hi - lo < 1e-3);
}
