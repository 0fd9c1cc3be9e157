#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "gapscope/arithmetic.hpp"
#include "gapscope/mat2.hpp"

namespace gapscope {

// theta is always in turn units: the potential is 2*lambda*cos(2*pi*theta)
// and the cocycle base map is theta -> theta + alpha mod 1.
using CocycleMap = std::function<Mat2(double)>;
using CocycleMapC = std::function<Mat2C(double)>;

// Parameters (lambda, E, epsilon) of theta -> S_E^lambda(theta + i eps).
// epsilon is the imaginary part of the phase in natural units, i.e. the
// complexified potential is 2*lambda*cos(2*pi*theta + i*epsilon).
struct SchrodingerCocycle {
    double lambda = 0.0;
    double energy = 0.0;
    double epsilon = 0.0;
    Frequency alpha;
};

Mat2 transfer_matrix(const SchrodingerCocycle& c, double theta);
Mat2C transfer_matrix_complex(const SchrodingerCocycle& c, double theta);
CocycleMap transfer_map(const SchrodingerCocycle& c);

// n-step product in renormalized form M * exp(log_scale), ||M||_2 = 1.
// Negative n gives A_{-n}(theta) = A_n(theta - n alpha)^{-1}.
struct RenormalizedProduct {
    Mat2 matrix;
    double log_scale = 0.0;
};
RenormalizedProduct cocycle_product(const CocycleMap& a, const Frequency& alpha,
                                    double theta, long n);

struct RenormalizedProductC {
    Mat2C matrix;
    double log_scale = 0.0;
};
RenormalizedProductC cocycle_product_complex(const CocycleMapC& a,
                                             const Frequency& alpha,
                                             double theta, long n);

// Phase-averaged Lyapunov exponent log||A_n||/n over n_phases equidistributed
// phases (deterministic given seed).
double lyapunov_exponent(const SchrodingerCocycle& c, long n_iter, int n_phases,
                         std::uint64_t seed);
double lyapunov_exponent(const CocycleMap& a, const Frequency& alpha,
                         long n_iter, int n_phases, std::uint64_t seed);

// Lyapunov exponent of the SL(2,C) cocycle at phase theta + i*epsilon.
double lyapunov_complexified(const SchrodingerCocycle& c, long n_iter,
                             int n_phases, std::uint64_t seed);

// Fibered rotation number: Birkhoff average of the lift displacement of the
// projective action. The lift splits each step into its polar rotation part
// (exact angle) plus the positive-definite part's displacement, which is
// strictly below a quarter turn and hence branch-unambiguous.
struct RotationNumber {
    double raw = 0.0;     // lift average mod 1, in [0,1)
    double folded = 0.0;  // distance to nearest integer, in [0,1/2]
    bool converged = true;
};
RotationNumber rotation_number(const CocycleMap& a, const Frequency& alpha,
                               long n_iter, double t0 = 0.0,
                               double tol = 0.0);

struct UhParams {
    long n_iter = 2000;
    int n_theta = 64;
    double growth_threshold = 0.0;  // 0 -> adaptive 2*ln(n)/n
    double angle_tol = 1e-3;        // min |sin| of stable/unstable angle
};

struct UhVerdict {
    bool hyperbolic = false;
    double margin = 0.0;      // minimal observed growth exponent
    double min_angle = 0.0;   // minimal |sin| splitting transversality
    bool indeterminate = false;
};

// Uniform hyperbolicity test: uniform exponential growth across a phase
// sample plus transversality of finite-time stable/unstable directions.
UhVerdict is_uniformly_hyperbolic(const CocycleMap& a, const Frequency& alpha,
                                  const UhParams& params = {});
// Fast path for the AMO transfer cocycle (epsilon is ignored).
UhVerdict is_uniformly_hyperbolic(const SchrodingerCocycle& c,
                                  const UhParams& params = {});

// Winding number of theta -> [first column of B(theta)] in the projective
// circle over one period; theta -> R_{theta/2} has degree 1.
// Throws if consecutive samples jump by a quarter turn or more.
int degree(const CocycleMap& b, int n_samples = 512);

// theta -> B(theta+alpha)^{-1} A(theta) B(theta).
CocycleMap conjugate(const CocycleMap& a, const CocycleMap& b,
                     const Frequency& alpha, double det_tol = 1e-12);

}  // namespace gapscope
