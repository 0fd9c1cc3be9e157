#include "gapscope/kam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gapscope {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::complex<double> unit(double turns) {
    return std::polar(1.0, kTwoPi * turns);
}

}  // namespace

std::complex<double> FourierSeries::eval(double theta) const {
    std::complex<double> acc(0.0);
    for (int k = -L_; k <= L_; ++k) acc += at(k) * unit(k * theta);
    return acc;
}

FourierSeries FourierSeries::shifted(double alpha) const {
    FourierSeries out(L_);
    for (int k = -L_; k <= L_; ++k) out.at(k) = at(k) * unit(k * alpha);
    return out;
}

double FourierSeries::l1_norm(double h) const {
    double acc = 0.0;
    for (int k = -L_; k <= L_; ++k)
        acc += std::abs(at(k)) * std::exp(std::abs(k) * h);
    return acc;
}

bool FourierSeries::is_real_symmetric(double tol) const {
    for (int k = 0; k <= L_; ++k)
        if (std::abs(at(-k) - std::conj(at(k))) > tol) return false;
    return true;
}

void FourierSeries::symmetrize_real() {
    for (int k = 1; k <= L_; ++k) {
        auto avg = 0.5 * (at(k) + std::conj(at(-k)));
        at(k) = avg;
        at(-k) = std::conj(avg);
    }
    at(0) = std::complex<double>(at(0).real(), 0.0);
}

namespace {

FourierSeries combine(const FourierSeries& a, const FourierSeries& b,
                      double sb) {
    int L = std::max(a.degree_bound(), b.degree_bound());
    FourierSeries out(L);
    for (int k = -L; k <= L; ++k) {
        std::complex<double> v(0.0);
        if (std::abs(k) <= a.degree_bound()) v += a.at(k);
        if (std::abs(k) <= b.degree_bound()) v += sb * b.at(k);
        out.at(k) = v;
    }
    return out;
}

}  // namespace

FourierSeries FourierSeries::operator+(const FourierSeries& o) const {
    return combine(*this, o, 1.0);
}
FourierSeries FourierSeries::operator-(const FourierSeries& o) const {
    return combine(*this, o, -1.0);
}
FourierSeries FourierSeries::operator*(double s) const {
    FourierSeries out(L_);
    for (int k = -L_; k <= L_; ++k) out.at(k) = at(k) * s;
    return out;
}

std::string FourierSeries::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    bool first = true;
    for (int k = -L_; k <= L_; ++k) {
        os << (first ? "[" : ", [") << k << ", " << at(k).real() << ", "
           << at(k).imag() << "]";
        first = false;
    }
    os << "]";
    return os.str();
}

FourierSeries truncate_low(const FourierSeries& f, int L) {
    if (L < 0) throw std::invalid_argument("truncate_low: L >= 0");
    FourierSeries out(f.degree_bound());
    for (int k = -f.degree_bound(); k <= f.degree_bound(); ++k)
        if (std::abs(k) < L) out.at(k) = f.at(k);
    return out;
}

FourierSeries truncate_high(const FourierSeries& f, int L) {
    if (L < 0) throw std::invalid_argument("truncate_high: L >= 0");
    FourierSeries out(f.degree_bound());
    for (int k = -f.degree_bound(); k <= f.degree_bound(); ++k)
        if (std::abs(k) >= L) out.at(k) = f.at(k);
    return out;
}

double SlMatSeries::norm(double h) const {
    return std::max({m11.l1_norm(h), m12.l1_norm(h), m21.l1_norm(h)});
}

SlMatSeries SlMatSeries::shifted(double alpha) const {
    SlMatSeries out(degree_bound());
    out.m11 = m11.shifted(alpha);
    out.m12 = m12.shifted(alpha);
    out.m21 = m21.shifted(alpha);
    return out;
}

SlMatSeries SlMatSeries::operator+(const SlMatSeries& o) const {
    SlMatSeries out;
    out.m11 = m11 + o.m11;
    out.m12 = m12 + o.m12;
    out.m21 = m21 + o.m21;
    return out;
}
SlMatSeries SlMatSeries::operator-(const SlMatSeries& o) const {
    SlMatSeries out;
    out.m11 = m11 - o.m11;
    out.m12 = m12 - o.m12;
    out.m21 = m21 - o.m21;
    return out;
}
SlMatSeries SlMatSeries::operator*(double s) const {
    SlMatSeries out;
    out.m11 = m11 * s;
    out.m12 = m12 * s;
    out.m21 = m21 * s;
    return out;
}

std::string SlMatSeries::to_json() const {
    std::ostringstream os;
    os << "{\"m11\": " << m11.to_json() << ", \"m12\": " << m12.to_json()
       << ", \"m21\": " << m21.to_json() << "}";
    return os.str();
}

ResonantSplit resonant_split(const SlMatSeries& m, const Frequency& alpha,
                             std::int64_t q_next) {
    if (q_next < 1) throw std::invalid_argument("resonant_split: q_next >= 1");
    const double floor_bound = 1.0 / (7.0 * static_cast<double>(q_next));
    const int L = m.degree_bound();
    ResonantSplit out;
    out.nonresonant = SlMatSeries(L);
    out.resonant = SlMatSeries(L);
    for (int k = -L; k <= L; ++k) {
        bool nonres =
            torus_distance(static_cast<double>(k) * alpha.value) >= floor_bound;
        auto& dst = nonres ? out.nonresonant : out.resonant;
        dst.m11.at(k) = m.m11.at(k);
        dst.m12.at(k) = m.m12.at(k);
        dst.m21.at(k) = m.m21.at(k);
        if (!nonres) out.resonant_modes.push_back(k);
    }
    return out;
}

namespace {

// y(theta+alpha) - y(theta) = g(theta), solved modewise.
FourierSeries solve_cohomological(const FourierSeries& g, double alpha,
                                  std::int64_t q_next) {
    const int L = g.degree_bound();
    const double scale = g.l1_norm();
    const double negligible = 1e-15 * (1.0 + scale);
    const double floor_bound =
        q_next > 0 ? 1.0 / (7.0 * static_cast<double>(q_next)) : 0.0;
    FourierSeries y(L);
    for (int k = -L; k <= L; ++k) {
        if (std::abs(g.at(k)) <= negligible) continue;
        if (k == 0)
            throw std::runtime_error(
                "solve_cohomological: mean (k=0) mode has no solution");
        if (q_next > 0 &&
            torus_distance(static_cast<double>(k) * alpha) < floor_bound)
            throw std::runtime_error(
                "solve_cohomological: mode violates the divisor floor");
        std::complex<double> divisor = unit(k * alpha) - 1.0;
        y.at(k) = g.at(k) / divisor;
    }
    return y;
}

}  // namespace

SlMatSeries solve_homological_parabolic(const ParabolicConstant& d,
                                        const Frequency& alpha,
                                        const SlMatSeries& m,
                                        std::int64_t q_next) {
    // For D = [[1,d],[0,1]] the system Ad_D Y(.+a) - Y = M is triangular:
    // the lower-left component decouples, then the diagonal, then the
    // upper-right, each picking up shifted lower-order terms.
    const double dv = d.d;
    SlMatSeries y(m.degree_bound());
    y.m21 = solve_cohomological(m.m21, alpha.value, q_next);
    FourierSeries y21s = y.m21.shifted(alpha.value);
    y.m11 = solve_cohomological(m.m11 + y21s * dv, alpha.value, q_next);
    FourierSeries y11s = y.m11.shifted(alpha.value);
    y.m12 = solve_cohomological(m.m12 + y21s * (dv * dv) - y11s * (2.0 * dv),
                                alpha.value, q_next);
    y.m11.symmetrize_real();
    y.m12.symmetrize_real();
    y.m21.symmetrize_real();
    return y;
}

namespace {

// Gaussian elimination with partial pivoting, n = 4.
void solve4(std::complex<double> a[4][4], std::complex<double> b[4]) {
    int perm[4] = {0, 1, 2, 3};
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col]))
                piv = r;
        std::swap(perm[col], perm[piv]);
        auto diag = a[perm[col]][col];
        if (std::abs(diag) < 1e-14)
            throw std::runtime_error(
                "solve_homological_constant: near-singular mode system");
        for (int r = col + 1; r < 4; ++r) {
            auto f = a[perm[r]][col] / diag;
            for (int c = col; c < 4; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    std::complex<double> x[4];
    for (int row = 3; row >= 0; --row) {
        auto acc = b[perm[row]];
        for (int c = row + 1; c < 4; ++c) acc -= a[perm[row]][c] * x[c];
        x[row] = acc / a[perm[row]][row];
    }
    for (int i = 0; i < 4; ++i) b[i] = x[i];
}

}  // namespace

SlMatSeries solve_homological_constant(const Mat2& a_const,
                                       const Frequency& alpha,
                                       const SlMatSeries& m,
                                       std::int64_t q_next) {
    double tr = a_const.a11 + a_const.a22;
    if (std::fabs(std::fabs(tr) - 2.0) < 1e-8) {
        if (std::fabs(a_const.a11 - 1.0) < 1e-12 &&
            std::fabs(a_const.a22 - 1.0) < 1e-12 &&
            std::fabs(a_const.a21) < 1e-12)
            return solve_homological_parabolic({a_const.a12}, alpha, m, q_next);
        throw std::invalid_argument(
            "solve_homological_constant: near-parabolic constant not in "
            "normal form [[1,d],[0,1]]");
    }
    Mat2 inv = a_const.adjugate() * (1.0 / a_const.det());
    const int L = m.degree_bound();
    SlMatSeries y(L);
    const double scale = m.norm();
    const double negligible = 1e-15 * (1.0 + scale);
    for (int k = -L; k <= L; ++k) {
        std::complex<double> mv[4] = {m.m11.at(k), m.m12.at(k), m.m21.at(k),
                                      -m.m11.at(k)};
        if (std::abs(mv[0]) <= negligible && std::abs(mv[1]) <= negligible &&
            std::abs(mv[2]) <= negligible)
            continue;
        // rho * inv * Y * A - Y = M, vectorized row-major (y11,y12,y21,y22)
        std::complex<double> rho = unit(k * alpha.value);
        std::complex<double> sys[4][4];
        // (inv Y A)_{ij} = sum_{p,q} inv_{ip} A_{qj} Y_{pq}
        const double I[2][2] = {{inv.a11, inv.a12}, {inv.a21, inv.a22}};
        const double A[2][2] = {{a_const.a11, a_const.a12},
                                {a_const.a21, a_const.a22}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q) {
                        int row = 2 * i + j, col = 2 * p + q;
                        std::complex<double> v = rho * I[i][p] * A[q][j];
                        if (row == col) v -= 1.0;
                        sys[row][col] = v;
                    }
        solve4(sys, mv);
        y.m11.at(k) = mv[0];
        y.m12.at(k) = mv[1];
        y.m21.at(k) = mv[2];
    }
    if (m.m11.is_real_symmetric(1e-10 * (1.0 + scale)) &&
        m.m12.is_real_symmetric(1e-10 * (1.0 + scale)) &&
        m.m21.is_real_symmetric(1e-10 * (1.0 + scale))) {
        y.m11.symmetrize_real();
        y.m12.symmetrize_real();
        y.m21.symmetrize_real();
    }
    return y;
}

double homological_residual(const Mat2& a_const, const SlMatSeries& y,
                            const Frequency& alpha, const SlMatSeries& m,
                            int n_samples) {
    Mat2 inv = a_const.adjugate() * (1.0 / a_const.det());
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double theta = static_cast<double>(i) / n_samples;
        Mat2 ys = y.eval(theta + alpha.value);
        Mat2 r = inv * ys * a_const - y.eval(theta) - m.eval(theta);
        worst = std::max(worst, r.norm2());
    }
    return worst;
}

Mat2 sl2_exp(const Mat2& x) {
    double delta = x.det();  // x traceless: x^2 = -det(x) I
    double c, s;
    if (delta > 1e-24) {
        double w = std::sqrt(delta);
        c = std::cos(w);
        s = std::sin(w) / w;
    } else if (delta < -1e-24) {
        double w = std::sqrt(-delta);
        c = std::cosh(w);
        s = std::sinh(w) / w;
    } else {
        c = 1.0;
        s = 1.0;
    }
    return {c + s * x.a11, s * x.a12, s * x.a21, c + s * x.a22};
}

KamStepResult newton_step(const Mat2& a_const, const SlMatSeries& f,
                          const Frequency& alpha, std::int64_t q_next,
                          const KamStepOptions& opts) {
    if (q_next < 1) throw std::invalid_argument("newton_step: q_next >= 1");
    KamStepResult res;
    res.input_norm = f.norm();
    double q3 = std::pow(static_cast<double>(q_next), 3.0);
    if (res.input_norm * q3 > opts.smallness_gate)
        throw std::runtime_error("newton_step: smallness gate violated: "
                                 "||f|| * q_next^3 too large");

    auto split = resonant_split(f, alpha, q_next);
    res.resonant_modes = split.resonant_modes;
    res.kept = split.resonant;

    double nres_norm = split.nonresonant.norm();
    if (nres_norm == 0.0) {
        res.conjugation = SlMatSeries(f.degree_bound());
        res.remainder_norm = 0.0;
        res.solution_ratio = 0.0;
        if (res.input_norm == 0.0) return res;
    }
    res.conjugation =
        solve_homological_constant(a_const, alpha, split.nonresonant, q_next);
    res.solution_ratio =
        nres_norm > 0.0 ? res.conjugation.norm() / nres_norm : 0.0;

    // measured remainder of e^{-Y(.+a)} (A e^{F}) e^{Y} - (A + A F_re)
    double worst = 0.0;
    for (int i = 0; i < opts.remainder_samples; ++i) {
        double theta = static_cast<double>(i) / opts.remainder_samples;
        Mat2 expF = sl2_exp(f.eval(theta));
        Mat2 eY = sl2_exp(res.conjugation.eval(theta));
        Mat2 eYs_inv = sl2_exp(res.conjugation.eval(theta + alpha.value) * -1.0);
        Mat2 conjugated = eYs_inv * (a_const * expF) * eY;
        Mat2 target = a_const + a_const * res.kept.eval(theta);
        worst = std::max(worst, (conjugated - target).norm2());
    }
    res.remainder_norm = worst;
    return res;
}

}  // namespace gapscope
