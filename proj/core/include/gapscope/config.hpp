#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapscope/arithmetic.hpp"

namespace gapscope {

inline constexpr const char* kToolVersion = "0.1.0";

// Frequency specification: preset name, literal value, quotient list, or a
// rational p/q routed to the periodic-spectrum path.
struct AlphaSpec {
    enum class Kind { preset, value, quotients, rational };
    Kind kind = Kind::preset;
    std::string preset = "golden";
    double value = 0.0;
    std::vector<std::int64_t> quotients;
    std::int64_t p = 0, q = 1;

    static AlphaSpec parse(const std::string& text);
    Frequency resolve() const;
    std::string describe() const;
};

struct RunConfig {
    std::string subcommand;
    double lambda = 0.5;
    AlphaSpec alpha;
    double energy = 0.0;
    double epsilon = 0.0;
    double grid_step = 1e-3;
    int n = 2000;
    long n_iter = 100000;
    int n_phases = 16;
    std::uint64_t seed = 0;
    int k_max = 5;
    int q_max = 50;
    double kam_norm = 1e-4;
    std::int64_t q_next = 8;
    double kam_gate = 0.1;
    std::string output_path;
    std::string cache_dir;

    // stable-key-order serialization; identical configs hash identically
    std::string canonical_json() const;
};

std::uint64_t stable_hash(const std::string& s);

// File cache keyed by config hash + tool version; writes are
// temp-then-rename so parallel sweeps never observe partial entries.
class Cache {
  public:
    explicit Cache(std::string dir);
    static std::string key_for(const RunConfig& config);
    std::optional<std::string> load(const std::string& key) const;
    void store(const std::string& key, const std::string& payload) const;

  private:
    std::string dir_;
};

}  // namespace gapscope
