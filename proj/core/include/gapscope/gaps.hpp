#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gapscope/arithmetic.hpp"
#include "gapscope/spectrum.hpp"

namespace gapscope {

// An open gap (e_minus, e_plus) of the spectrum with its constant IDS value
// and gap-labelling integer k: N = {k*alpha} on the gap, k != 0.
struct SpectralGap {
    double e_minus = 0.0;
    double e_plus = 0.0;
    double ids_value = 0.0;
    int label = 0;
    double label_residual = 0.0;
    double width() const { return e_plus - e_minus; }
};

enum class LabelStatus { ok, no_label, ambiguous };

struct LabelResult {
    int k = 0;
    double residual = 0.0;
    LabelStatus status = LabelStatus::ok;
};

// k minimizing ||ids_value - k*alpha|| over 0 < |k| <= k_max.
LabelResult label_gap(double ids_value, const Frequency& alpha, int k_max,
                      double tol);

// Complement intervals of a spectrum approximation, interior to
// [min S, max S], wider than min_width, annotated with midpoint IDS.
// Throws if the IDS varies beyond ids_tol inside a claimed gap.
std::vector<SpectralGap> detect_gaps(
    const SpectrumApproximation& spec,
    const std::function<double(double)>& ids_fn, double min_width,
    double ids_tol = 1e-3);

struct DryMartiniParams {
    int n_ids = 2000;
    int ids_phases = 16;
    std::uint64_t seed = 0;
    long rot_n_iter = 200000;  // rotation-number iterations for edge search
    double rot_eta = 0.0;      // level offset bracketing the edges; 0 -> 4/rot_n_iter
    long uh_n_iter = 10000;
    int uh_n_theta = 33;
    int label_k_max = 30;
    double label_tol = 1e-2;
};

struct DryMartiniEntry {
    int k = 0;
    bool found = false;
    bool resolution_limited = false;  // plateau narrower than the grid
    bool uh_indeterminate = false;
    SpectralGap gap;
    double width = 0.0;
};

struct DryMartiniReport {
    double lambda = 0.0;
    Frequency alpha;
    int k_max = 0;
    double grid_step = 0.0;
    double min_width = 0.0;
    std::vector<DryMartiniEntry> labels;  // k = -k_max..-1, 1..k_max
    bool all_open = false;
    std::string note;

    std::string to_json(const std::string& tool_version) const;
    std::string to_csv(const std::string& tool_version) const;
};

// For each 0 < |k| <= k_max, locate the IDS plateau at {k*alpha} by
// monotone bisection and test it for an open gap (UH at the midpoint plus
// IDS constancy).
DryMartiniReport dry_martini_check(double lambda, const Frequency& alpha,
                                   int k_max, double grid_step,
                                   double min_width = 0.0,
                                   const DryMartiniParams& params = {});

struct GapEdgeSample {
    double energy = 0.0;
    double uh_margin = 0.0;
    bool hyperbolic = false;
    bool indeterminate = false;
    double rot_folded = 0.0;
};

struct GapEdgeProbe {
    std::vector<GapEdgeSample> from_lower;  // stepping up from e_minus
    std::vector<GapEdgeSample> from_upper;  // stepping down from e_plus
    bool margin_monotone = false;
    double rot_spread = 0.0;  // max - min folded rotation number observed
};

GapEdgeProbe gap_edge_probe(double lambda, const Frequency& alpha,
                            const SpectralGap& gap, int n_tau,
                            long uh_n_iter = 10000, long rot_n_iter = 100000);

struct DualityReport {
    bool skipped = false;  // lambda == 1
    double lambda = 0.0;
    double hausdorff = 0.0;       // d(lambda * S_{1/lambda}, S_lambda)
    double ids_discrepancy = 0.0; // sup |N_{1/lambda}(E) - N_lambda(lambda E)|
    std::vector<Interval> spectrum_direct;  // S_lambda
    std::vector<Interval> spectrum_dual;    // lambda * S_{1/lambda}
};

// Aubry duality cross-check for lambda > 1: spectra computed independently
// at lambda and 1/lambda, compared under E -> lambda*E.
DualityReport duality_check(double lambda, const Frequency& alpha,
                            double grid_step,
                            const SpectrumScanParams& scan_base = {});

}  // namespace gapscope
