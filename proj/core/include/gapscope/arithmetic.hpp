#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapscope {

// One convergent p_n/q_n of a continued fraction, gcd(p,q)=1.
struct Approximant {
    std::int64_t p = 0;
    std::int64_t q = 1;
    int index = 0;
};

// An irrational (or rational surrogate) in (0,1) together with its
// continued fraction expansion [0; a_1, a_2, ...] and convergents.
// Convergents follow q_0 = 1, q_1 = a_1, q_{n+1} = a_{n+1} q_n + q_{n-1}.
struct Frequency {
    double value = 0.0;
    std::vector<std::int64_t> quotients;   // a_1..a_m
    std::vector<Approximant> convergents;  // index 0 is p_0/q_0 = 0/1
    bool truncated = false;                // stopped before int64 overflow

    std::string to_json() const;
};

// Distance from x to the nearest integer, in [0, 1/2].
double torus_distance(double x);

// Euclidean continued fraction expansion of x in (0,1).
// Expansion terminates early on (near-)rational input or if the next
// denominator would overflow 64-bit range (truncated flag set).
Frequency continued_fraction_expand(double x, int max_terms);

// Builds the Frequency directly from partial quotients; value is the
// limit of the convergents evaluated in double precision.
Frequency frequency_from_quotients(const std::vector<std::int64_t>& quotients);

// Presets used throughout: golden = (sqrt(5)-1)/2, silver = sqrt(2)-1.
Frequency golden_frequency(int terms = 40);
Frequency silver_frequency(int terms = 28);

// Finite-data proxy for beta(alpha) = limsup ln(q_{n+1})/q_n: the max over
// stored convergents. An estimate, not the limit.
double beta_estimate(const Frequency& f);

struct DivisorEntry {
    std::int64_t k = 0;
    double distance = 0.0;  // ||k*alpha||
    bool exempt = false;    // k is a multiple of q_n
    bool violation = false; // distance < 1/(7 q_n) while not exempt
};

// Torus distances ||k*alpha|| for 1 <= k <= k_max, flagged against the
// small-divisor bound 1/(7 q_n) (multiples of q_n are exempt).
std::vector<DivisorEntry> divisor_profile(const Frequency& f, int n,
                                          std::int64_t k_max);

}  // namespace gapscope
