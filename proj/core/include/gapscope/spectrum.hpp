#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gapscope/arithmetic.hpp"
#include "gapscope/cocycle.hpp"

namespace gapscope {

// n x n Dirichlet section of the AMO: diagonal 2*lambda*cos(2*pi*(j*alpha+theta)),
// off-diagonal ones.
struct TridiagonalOperator {
    std::vector<double> diagonal;
    double norm_bound = 2.0;  // 2 + 2*lambda
};

TridiagonalOperator truncated_tridiagonal(double lambda, const Frequency& alpha,
                                          double theta, int n);

// Number of eigenvalues strictly below E (Sturm pivot recurrence).
int sturm_count(const TridiagonalOperator& t, double E);

// Integrated density of states: phase-averaged sturm_count/n over a
// deterministic low-discrepancy theta sequence.
double ids(double lambda, const Frequency& alpha, double E, int n,
           int n_phases, std::uint64_t seed);

struct MembershipVerdict {
    bool member = false;
    double margin = 0.0;
    bool indeterminate = false;
};

// Johnson's criterion: E is in the spectrum iff the cocycle is not
// uniformly hyperbolic.
MembershipVerdict spectrum_member(double lambda, const Frequency& alpha,
                                  double E, const UhParams& params = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct SpectrumScanParams {
    double grid_step = 1e-3;
    int n_ids = 2000;
    int ids_phases = 16;
    double ids_growth_tol = 0.0;  // 0 -> 6 quanta of the ids resolution
    UhParams uh;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 -> hardware concurrency
};

struct SpectrumApproximation {
    double lambda = 0.0;
    double alpha_value = 0.0;
    double e_min = 0.0, e_max = 0.0, grid_step = 0.0;
    std::vector<std::uint8_t> member;   // per grid point
    std::vector<double> margin;        // UH margin (0 where ids growth decided)
    std::vector<double> ids_values;
    std::vector<Interval> intervals;   // merged member runs

    std::string to_csv() const;
    std::string intervals_json() const;
};

// Grid scan over [-2-2*lambda, 2+2*lambda] combining IDS growth with the
// UH test; indeterminate points count as spectrum.
SpectrumApproximation spectrum_intervals(double lambda, const Frequency& alpha,
                                         const SpectrumScanParams& params = {});

// Periodic-approximant spectrum for alpha = p/q: energies where the q-step
// transfer trace has modulus <= 2 for at least one sampled theta.
std::vector<Interval> rational_spectrum(double lambda, std::int64_t p,
                                        std::int64_t q, int theta_samples,
                                        double grid_step = 1e-3);

// Hausdorff distance between two finite unions of closed intervals.
double hausdorff_distance(const std::vector<Interval>& a,
                          const std::vector<Interval>& b);

}  // namespace gapscope
