#include "gapscope/arithmetic.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gapscope {

double torus_distance(double x) {
    double d = std::fabs(x - std::nearbyint(x));
    return d > 0.5 ? 0.5 : d;
}

namespace {

void push_convergent(Frequency& f, std::int64_t a) {
    const auto& cv = f.convergents;
    std::int64_t p_prev2, q_prev2, p_prev, q_prev;
    if (cv.size() == 1) {
        p_prev2 = 1; q_prev2 = 0;  // p_{-1}/q_{-1}
        p_prev = cv[0].p; q_prev = cv[0].q;
    } else {
        p_prev2 = cv[cv.size() - 2].p; q_prev2 = cv[cv.size() - 2].q;
        p_prev = cv.back().p; q_prev = cv.back().q;
    }
    Approximant next;
    next.p = a * p_prev + p_prev2;
    next.q = a * q_prev + q_prev2;
    next.index = static_cast<int>(cv.size());
    f.convergents.push_back(next);
}

bool would_overflow(const Frequency& f, std::int64_t a) {
    if (f.convergents.empty()) return false;
    std::int64_t q = f.convergents.back().q;
    const std::int64_t limit = std::int64_t(1) << 62;
    return a > 0 && q > limit / a;
}

}  // namespace

Frequency continued_fraction_expand(double x, int max_terms) {
    if (!(x > 0.0 && x < 1.0))
        throw std::domain_error("continued_fraction_expand: x must lie in (0,1)");
    if (max_terms < 1)
        throw std::invalid_argument("continued_fraction_expand: max_terms >= 1");

    Frequency f;
    f.value = x;
    f.convergents.push_back({0, 1, 0});

    double r = x;
    for (int i = 0; i < max_terms; ++i) {
        if (r < 1e-14) break;  // rational remainder exhausted
        double inv = 1.0 / r;
        auto a = static_cast<std::int64_t>(std::floor(inv));
        if (a < 1) a = 1;
        if (would_overflow(f, a)) {
            f.truncated = true;
            break;
        }
        f.quotients.push_back(a);
        push_convergent(f, a);
        r = inv - static_cast<double>(a);
        if (r < 0.0) r = 0.0;
    }
    if (f.quotients.empty())
        throw std::domain_error("continued_fraction_expand: no quotients produced");
    return f;
}

Frequency frequency_from_quotients(const std::vector<std::int64_t>& quotients) {
    if (quotients.empty())
        throw std::invalid_argument("frequency_from_quotients: empty quotient list");
    Frequency f;
    f.convergents.push_back({0, 1, 0});
    for (auto a : quotients) {
        if (a < 1)
            throw std::invalid_argument("frequency_from_quotients: quotients must be >= 1");
        if (would_overflow(f, a)) {
            f.truncated = true;
            break;
        }
        f.quotients.push_back(a);
        push_convergent(f, a);
    }
    const auto& last = f.convergents.back();
    f.value = static_cast<double>(last.p) / static_cast<double>(last.q);
    return f;
}

Frequency golden_frequency(int terms) {
    return frequency_from_quotients(std::vector<std::int64_t>(terms, 1));
}

Frequency silver_frequency(int terms) {
    return frequency_from_quotients(std::vector<std::int64_t>(terms, 2));
}

double beta_estimate(const Frequency& f) {
    if (f.convergents.size() < 3)
        throw std::runtime_error("beta_estimate: need at least 3 convergents");
    double best = 0.0;
    for (std::size_t n = 1; n + 1 < f.convergents.size(); ++n) {
        double qn = static_cast<double>(f.convergents[n].q);
        double qn1 = static_cast<double>(f.convergents[n + 1].q);
        best = std::max(best, std::log(qn1) / qn);
    }
    return best;
}

std::vector<DivisorEntry> divisor_profile(const Frequency& f, int n,
                                          std::int64_t k_max) {
    if (n < 0 || static_cast<std::size_t>(n) + 1 >= f.convergents.size())
        throw std::out_of_range("divisor_profile: convergent index out of range");
    const std::int64_t qn = f.convergents[n].q;
    const double floor_bound = 1.0 / (7.0 * static_cast<double>(qn));
    std::vector<DivisorEntry> out;
    out.reserve(static_cast<std::size_t>(k_max));
    for (std::int64_t k = 1; k <= k_max; ++k) {
        DivisorEntry e;
        e.k = k;
        e.distance = torus_distance(static_cast<double>(k) * f.value);
        e.exempt = (k % qn == 0);
        e.violation = !e.exempt && e.distance < floor_bound;
        out.push_back(e);
    }
    return out;
}

std::string Frequency::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"value\": " << value << ", \"quotients\": [";
    for (std::size_t i = 0; i < quotients.size(); ++i)
        os << (i ? ", " : "") << quotients[i];
    os << "], \"convergents\": [";
    for (std::size_t i = 0; i < convergents.size(); ++i)
        os << (i ? ", [" : "[") << convergents[i].p << ", " << convergents[i].q << "]";
    os << "]}";
    return os.str();
}

}  // namespace gapscope
