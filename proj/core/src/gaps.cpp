#include "gapscope/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gapscope {

namespace {

double frac(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

LabelResult label_gap(double ids_value, const Frequency& alpha, int k_max,
                      double tol) {
    if (!(ids_value > 0.0 && ids_value < 1.0))
        throw std::invalid_argument("label_gap: ids_value must lie in (0,1)");
    if (k_max < 1) throw std::invalid_argument("label_gap: k_max >= 1");
    LabelResult best, second;
    best.residual = second.residual = 1.0;
    for (int k = -k_max; k <= k_max; ++k) {
        if (k == 0) continue;
        double r = torus_distance(ids_value - static_cast<double>(k) * alpha.value);
        if (r < best.residual) {
            second = best;
            best.k = k;
            best.residual = r;
        } else if (r < second.residual) {
            second.k = k;
            second.residual = r;
        }
    }
    if (best.residual > tol) {
        best.status = LabelStatus::no_label;
    } else if (second.residual - best.residual < 0.5 * tol) {
        best.status = LabelStatus::ambiguous;
    }
    return best;
}

std::vector<SpectralGap> detect_gaps(
    const SpectrumApproximation& spec,
    const std::function<double(double)>& ids_fn, double min_width,
    double ids_tol) {
    std::vector<SpectralGap> out;
    const auto& iv = spec.intervals;
    for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
        SpectralGap g;
        g.e_minus = iv[i].hi;
        g.e_plus = iv[i + 1].lo;
        if (g.width() <= min_width) continue;
        double mid = 0.5 * (g.e_minus + g.e_plus);
        g.ids_value = ids_fn(mid);
        // IDS constancy across the claimed gap
        double lo = 1.0, hi = 0.0;
        for (int s = 0; s < 5; ++s) {
            double E = g.e_minus + (s + 1) * g.width() / 6.0;
            double v = ids_fn(E);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > ids_tol)
            throw std::runtime_error(
                "detect_gaps: IDS varies inside a claimed gap");
        out.push_back(g);
    }
    return out;
}

namespace {

struct IdsFn {
    double lambda;
    const Frequency* alpha;
    const DryMartiniParams* p;
    double operator()(double E) const {
        return ids(lambda, *alpha, E, p->n_ids, p->ids_phases, p->seed);
    }
};

// 1 - 2*rho(E): matches the IDS but converges like 1/n_iter, so it
// resolves gaps far narrower than the Sturm estimate can.
struct RotFn {
    double lambda;
    const Frequency* alpha;
    long n_iter;
    double operator()(double E) const {
        SchrodingerCocycle c{lambda, E, 0.0, *alpha};
        auto r = rotation_number(transfer_map(c), *alpha, n_iter);
        return 1.0 - 2.0 * r.folded;
    }
};

// Largest E in [lo,hi] with f(E) <= level (assumes monotone f and
// f(lo) <= level <= f(hi)); tolerance = resolution.
template <class Fn>
double bisect_level(const Fn& f, double lo, double hi, double level,
                    double resolution) {
    while (hi - lo > resolution) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) <= level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DryMartiniReport dry_martini_check(double lambda, const Frequency& alpha,
                                   int k_max, double grid_step,
                                   double min_width,
                                   const DryMartiniParams& params) {
    if (k_max < 1) throw std::invalid_argument("dry_martini_check: k_max >= 1");
    if (grid_step <= 0.0)
        throw std::invalid_argument("dry_martini_check: grid_step > 0");
    DryMartiniReport rep;
    rep.lambda = lambda;
    rep.alpha = alpha;
    rep.k_max = k_max;
    rep.grid_step = grid_step;
    // edges are located to 0.1*grid_step, so half a grid step is resolvable
    rep.min_width = min_width > 0.0 ? min_width : 0.5 * grid_step;

    if (lambda == 0.0)
        rep.note = "free operator: IDS has no nontrivial plateaus, no gaps";

    const double e_lo = -2.0 - 2.0 * std::fabs(lambda) - 0.5;
    const double e_hi = 2.0 + 2.0 * std::fabs(lambda) + 0.5;
    IdsFn f{lambda, &alpha, &params};
    RotFn rot{lambda, &alpha, params.rot_n_iter};
    const double eta = params.rot_eta > 0.0
                           ? params.rot_eta
                           : 4.0 / static_cast<double>(params.rot_n_iter);

    std::vector<int> ks;
    for (int k = -k_max; k <= k_max; ++k)
        if (k != 0) ks.push_back(k);

    bool all = true;
    for (int k : ks) {
        DryMartiniEntry entry;
        entry.k = k;
        double target = frac(static_cast<double>(k) * alpha.value);
        // edges of the rotation-number plateau at level {k*alpha}
        double e_minus =
            bisect_level(rot, e_lo, e_hi, target - eta, 0.1 * grid_step);
        double e_plus =
            bisect_level(rot, e_lo, e_hi, target + eta, 0.1 * grid_step);
        double width = e_plus - e_minus;
        entry.width = width;
        if (width <= rep.min_width) {
            entry.resolution_limited = width > 0.0;
            entry.found = false;
        } else {
            double mid = 0.5 * (e_minus + e_plus);
            double mid_ids = f(mid);
            SchrodingerCocycle c{lambda, mid, 0.0, alpha};
            UhParams uh;
            uh.n_iter = params.uh_n_iter;
            uh.n_theta = params.uh_n_theta;
            auto v = is_uniformly_hyperbolic(c, uh);
            // narrow gaps have a small but genuine margin that can fall
            // below the adaptive threshold 2 ln(n)/n at the base iteration
            // count; escalating n lowers the threshold while a true margin
            // stays put, so retry before concluding the gap is closed
            for (int tries = 0;
                 (!v.hyperbolic || v.indeterminate) && tries < 3; ++tries) {
                uh.n_iter *= 4;
                v = is_uniformly_hyperbolic(c, uh);
            }
            entry.uh_indeterminate = v.indeterminate;
            auto lab = label_gap(mid_ids, alpha, params.label_k_max,
                                 params.label_tol);
            entry.gap.e_minus = e_minus;
            entry.gap.e_plus = e_plus;
            entry.gap.ids_value = mid_ids;
            entry.gap.label = lab.k;
            entry.gap.label_residual = lab.residual;
            entry.found = v.hyperbolic && !v.indeterminate &&
                          lab.status == LabelStatus::ok && lab.k == k;
        }
        all = all && entry.found;
        rep.labels.push_back(entry);
    }
    rep.all_open = all;
    return rep;
}

GapEdgeProbe gap_edge_probe(double lambda, const Frequency& alpha,
                            const SpectralGap& gap, int n_tau, long uh_n_iter,
                            long rot_n_iter) {
    if (!(gap.width() > 0.0))
        throw std::invalid_argument("gap_edge_probe: gap must have positive width");
    if (n_tau < 1) throw std::invalid_argument("gap_edge_probe: n_tau >= 1");
    GapEdgeProbe probe;
    auto sample_at = [&](double E) {
        GapEdgeSample s;
        s.energy = E;
        SchrodingerCocycle c{lambda, E, 0.0, alpha};
        UhParams uh;
        uh.n_iter = uh_n_iter;
        auto v = is_uniformly_hyperbolic(c, uh);
        s.uh_margin = v.margin;
        s.hyperbolic = v.hyperbolic;
        s.indeterminate = v.indeterminate;
        auto r = rotation_number(transfer_map(c), alpha, rot_n_iter);
        s.rot_folded = r.folded;
        return s;
    };
    double half = 0.5 * gap.width();
    double rot_lo = 1.0, rot_hi = 0.0;
    bool monotone = true;
    double prev = -1.0;
    for (int j = 1; j <= n_tau; ++j) {
        double tau = half * static_cast<double>(j) / n_tau;
        auto s = sample_at(gap.e_minus + tau);
        if (s.uh_margin < prev) monotone = false;
        prev = s.uh_margin;
        rot_lo = std::min(rot_lo, s.rot_folded);
        rot_hi = std::max(rot_hi, s.rot_folded);
        probe.from_lower.push_back(s);
    }
    prev = -1.0;
    for (int j = 1; j <= n_tau; ++j) {
        double tau = half * static_cast<double>(j) / n_tau;
        auto s = sample_at(gap.e_plus - tau);
        if (s.uh_margin < prev) monotone = false;
        prev = s.uh_margin;
        rot_lo = std::min(rot_lo, s.rot_folded);
        rot_hi = std::max(rot_hi, s.rot_folded);
        probe.from_upper.push_back(s);
    }
    probe.margin_monotone = monotone;
    probe.rot_spread = rot_hi - rot_lo;
    return probe;
}

DualityReport duality_check(double lambda, const Frequency& alpha,
                            double grid_step,
                            const SpectrumScanParams& scan_base) {
    DualityReport rep;
    rep.lambda = lambda;
    if (lambda == 1.0) {
        rep.skipped = true;
        return rep;
    }
    if (lambda < 1.0)
        throw std::invalid_argument("duality_check: lambda > 1 required");

    SpectrumScanParams direct = scan_base;
    direct.grid_step = grid_step;
    auto spec_direct = spectrum_intervals(lambda, alpha, direct);
    rep.spectrum_direct = spec_direct.intervals;

    SpectrumScanParams dual = scan_base;
    dual.grid_step = grid_step / lambda;  // comparable resolution after scaling
    auto spec_dual = spectrum_intervals(1.0 / lambda, alpha, dual);
    rep.spectrum_dual.reserve(spec_dual.intervals.size());
    for (const auto& iv : spec_dual.intervals)
        rep.spectrum_dual.push_back({lambda * iv.lo, lambda * iv.hi});

    rep.hausdorff = hausdorff_distance(rep.spectrum_dual, rep.spectrum_direct);

    // IDS duality under the E -> lambda*E rescaling
    double sup = 0.0;
    double lo = -2.0 - 2.0 / lambda, hi = 2.0 + 2.0 / lambda;
    int n_pts = 200;
    for (int i = 0; i <= n_pts; ++i) {
        double E = lo + (hi - lo) * static_cast<double>(i) / n_pts;
        double a = ids(1.0 / lambda, alpha, E, direct.n_ids, direct.ids_phases,
                       direct.seed);
        double b = ids(lambda, alpha, lambda * E, direct.n_ids,
                       direct.ids_phases, direct.seed);
        sup = std::max(sup, std::fabs(a - b));
    }
    rep.ids_discrepancy = sup;
    return rep;
}

std::string DryMartiniReport::to_json(const std::string& tool_version) const {
    std::ostringstream os;
    os.precision(12);
    os << "{\"tool_version\": \"" << tool_version << "\", ";
    os << "\"lambda\": " << lambda << ", ";
    os << "\"alpha\": " << alpha.to_json() << ", ";
    os << "\"k_max\": " << k_max << ", ";
    os << "\"grid_step\": " << grid_step << ", ";
    os << "\"min_width\": " << min_width << ", ";
    os << "\"labels\": [";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& e = labels[i];
        os << (i ? ", {" : "{");
        os << "\"k\": " << e.k << ", \"found\": " << (e.found ? "true" : "false")
           << ", \"resolution_limited\": "
           << (e.resolution_limited ? "true" : "false")
           << ", \"e_minus\": " << e.gap.e_minus
           << ", \"e_plus\": " << e.gap.e_plus << ", \"width\": " << e.width
           << ", \"ids\": " << e.gap.ids_value
           << ", \"residual\": " << e.gap.label_residual << "}";
    }
    os << "], \"all_open\": " << (all_open ? "true" : "false");
    if (!note.empty()) os << ", \"note\": \"" << note << "\"";
    os << "}";
    return os.str();
}

std::string DryMartiniReport::to_csv(const std::string& tool_version) const {
    std::ostringstream os;
    os.precision(12);
    os << "# gapscope " << tool_version << " dry-check lambda=" << lambda
       << " alpha=" << alpha.value << " k_max=" << k_max
       << " grid_step=" << grid_step << "\n";
    os << "k,found,resolution_limited,e_minus,e_plus,width,ids,residual\n";
    for (const auto& e : labels)
        os << e.k << ',' << int(e.found) << ',' << int(e.resolution_limited)
           << ',' << e.gap.e_minus << ',' << e.gap.e_plus << ',' << e.width
           << ',' << e.gap.ids_value << ',' << e.gap.label_residual << '\n';
    return os.str();
}

}  // namespace gapscope
