#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gapscope/arithmetic.hpp"
#include "gapscope/mat2.hpp"

namespace gapscope {

// Finite trigonometric polynomial sum_{|k|<=L} c_k e^{2 pi i k theta}.
// Real-valued series satisfy c(-k) = conj(c(k)).
class FourierSeries {
  public:
    FourierSeries() = default;
    explicit FourierSeries(int degree_bound)
        : L_(degree_bound), c_(2 * degree_bound + 1) {}

    int degree_bound() const { return L_; }
    std::complex<double>& at(int k) { return c_[static_cast<std::size_t>(k + L_)]; }
    const std::complex<double>& at(int k) const {
        return c_[static_cast<std::size_t>(k + L_)];
    }

    std::complex<double> eval(double theta) const;
    double eval_real(double theta) const { return eval(theta).real(); }
    FourierSeries shifted(double alpha) const;  // theta -> theta + alpha
    double l1_norm(double h = 0.0) const;       // sum |c_k| e^{|k| h}
    bool is_real_symmetric(double tol = 1e-12) const;
    void symmetrize_real();  // enforce c(-k) = conj(c(k))

    FourierSeries operator+(const FourierSeries& o) const;
    FourierSeries operator-(const FourierSeries& o) const;
    FourierSeries operator*(double s) const;

    std::string to_json() const;  // array of (k, re, im) triples

  private:
    int L_ = 0;
    std::vector<std::complex<double>> c_{std::complex<double>(0.0)};
};

// T_L: modes |k| < L.  R_L: modes |k| >= L.  Exact split f = T_L f + R_L f.
FourierSeries truncate_low(const FourierSeries& f, int L);
FourierSeries truncate_high(const FourierSeries& f, int L);

// sl(2,R)-valued trigonometric polynomial [[m11, m12],[m21, -m11]];
// traceless by construction.
struct SlMatSeries {
    FourierSeries m11, m12, m21;

    explicit SlMatSeries(int degree_bound = 0)
        : m11(degree_bound), m12(degree_bound), m21(degree_bound) {}

    int degree_bound() const { return m11.degree_bound(); }
    Mat2 eval(double theta) const {
        double a = m11.eval_real(theta);
        return {a, m12.eval_real(theta), m21.eval_real(theta), -a};
    }
    // sup-norm proxy: max of the component l1 norms
    double norm(double h = 0.0) const;
    SlMatSeries shifted(double alpha) const;
    SlMatSeries operator+(const SlMatSeries& o) const;
    SlMatSeries operator-(const SlMatSeries& o) const;
    SlMatSeries operator*(double s) const;

    std::string to_json() const;
};

// The unipotent constant part D = [[1, d],[0, 1]].
struct ParabolicConstant {
    double d = 0.0;
    Mat2 matrix() const { return {1.0, d, 0.0, 1.0}; }
};

// Modes with ||k*alpha|| >= 1/(7*q_next) are non-resonant; the rest
// (including k = 0) are resonant.
struct ResonantSplit {
    SlMatSeries nonresonant;
    SlMatSeries resonant;
    std::vector<int> resonant_modes;
};
ResonantSplit resonant_split(const SlMatSeries& m, const Frequency& alpha,
                             std::int64_t q_next);

// Solves Ad_D Y(theta+alpha) - Y(theta) = M(theta) for parabolic D,
// triangular in the order y12, y11, y21; each scalar equation
// y(theta+alpha) - y(theta) = g solved modewise by division by
// e^{2 pi i k alpha} - 1. Throws if an input mode violates the divisor
// floor 1/(7*q_next) (pass q_next = 0 to skip the floor assertion).
SlMatSeries solve_homological_parabolic(const ParabolicConstant& d,
                                        const Frequency& alpha,
                                        const SlMatSeries& m,
                                        std::int64_t q_next = 0);

// General constant part (elliptic/hyperbolic handled through the per-mode
// 4x4 linear system; near-parabolic constants in normal form are routed to
// the triangular solver). Extension beyond the parabolic case.
SlMatSeries solve_homological_constant(const Mat2& a_const,
                                       const Frequency& alpha,
                                       const SlMatSeries& m,
                                       std::int64_t q_next = 0);

// Residual sup-norm of Ad_A Y(.+alpha) - Y - M on a dense sample.
double homological_residual(const Mat2& a_const, const SlMatSeries& y,
                            const Frequency& alpha, const SlMatSeries& m,
                            int n_samples = 1024);

// exp of a traceless 2x2 (closed form via X^2 = -det(X) I).
Mat2 sl2_exp(const Mat2& x);

struct KamStepOptions {
    double smallness_gate = 1e-2;  // bound on ||f|| * q_next^3
    int remainder_samples = 1024;
};

struct KamStepResult {
    SlMatSeries conjugation;      // Y
    SlMatSeries kept;             // resonant part of f (retained)
    double input_norm = 0.0;      // ||f||
    double remainder_norm = 0.0;  // measured after conjugation
    double solution_ratio = 0.0;  // ||Y|| / ||f_nonres||
    std::vector<int> resonant_modes;
};

// One Newton/averaging step: conjugates A e^{F} by e^{Y} so that the
// non-resonant part of the perturbation is removed to quadratic order.
KamStepResult newton_step(const Mat2& a_const, const SlMatSeries& f,
                          const Frequency& alpha, std::int64_t q_next,
                          const KamStepOptions& opts = {});

}  // namespace gapscope
