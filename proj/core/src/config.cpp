#include "gapscope/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapscope {

namespace fs = std::filesystem;

AlphaSpec AlphaSpec::parse(const std::string& text) {
    AlphaSpec spec;
    if (text == "golden" || text == "silver") {
        spec.kind = Kind::preset;
        spec.preset = text;
        return spec;
    }
    if (text.find('/') != std::string::npos) {
        spec.kind = Kind::rational;
        auto slash = text.find('/');
        spec.p = std::stoll(text.substr(0, slash));
        spec.q = std::stoll(text.substr(slash + 1));
        if (spec.q < 1) throw std::invalid_argument("alpha: q must be >= 1");
        return spec;
    }
    if (text.find(',') != std::string::npos || text.find('[') == 0) {
        spec.kind = Kind::quotients;
        std::string body = text;
        if (!body.empty() && body.front() == '[') body = body.substr(1);
        if (!body.empty() && body.back() == ']') body.pop_back();
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ','))
            spec.quotients.push_back(std::stoll(tok));
        if (spec.quotients.empty())
            throw std::invalid_argument("alpha: empty quotient list");
        return spec;
    }
    spec.kind = Kind::value;
    spec.value = std::stod(text);
    if (!(spec.value > 0.0 && spec.value < 1.0))
        throw std::invalid_argument("alpha: literal value must lie in (0,1)");
    return spec;
}

Frequency AlphaSpec::resolve() const {
    switch (kind) {
        case Kind::preset:
            if (preset == "golden") return golden_frequency();
            if (preset == "silver") return silver_frequency();
            throw std::invalid_argument("alpha: unknown preset " + preset);
        case Kind::value:
            return continued_fraction_expand(value, 30);
        case Kind::quotients:
            return frequency_from_quotients(quotients);
        case Kind::rational: {
            double v = static_cast<double>(p) / static_cast<double>(q);
            if (!(v > 0.0 && v < 1.0))
                throw std::invalid_argument("alpha: p/q must lie in (0,1)");
            return continued_fraction_expand(v, 64);
        }
    }
    throw std::logic_error("alpha: unreachable");
}

std::string AlphaSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::preset: return preset;
        case Kind::value: os << value; return os.str();
        case Kind::rational: os << p << "/" << q; return os.str();
        case Kind::quotients: {
            os << "[";
            for (std::size_t i = 0; i < quotients.size(); ++i)
                os << (i ? "," : "") << quotients[i];
            os << "]";
            return os.str();
        }
    }
    return "?";
}

std::string RunConfig::canonical_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"subcommand\": \"" << subcommand << "\""
       << ", \"lambda\": " << lambda
       << ", \"alpha\": \"" << alpha.describe() << "\""
       << ", \"energy\": " << energy
       << ", \"epsilon\": " << epsilon
       << ", \"grid_step\": " << grid_step
       << ", \"n\": " << n
       << ", \"n_iter\": " << n_iter
       << ", \"n_phases\": " << n_phases
       << ", \"seed\": " << seed
       << ", \"k_max\": " << k_max
       << ", \"q_max\": " << q_max
       << ", \"kam_norm\": " << kam_norm
       << ", \"q_next\": " << q_next
       << ", \"kam_gate\": " << kam_gate
       << ", \"version\": \"" << kToolVersion << "\"}";
    return os.str();
}

std::uint64_t stable_hash(const std::string& s) {
    // FNV-1a
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Cache::Cache(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

std::string Cache::key_for(const RunConfig& config) {
    std::ostringstream os;
    os << std::hex << stable_hash(config.canonical_json());
    return os.str();
}

std::optional<std::string> Cache::load(const std::string& key) const {
    fs::path file = fs::path(dir_) / (key + ".json");
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void Cache::store(const std::string& key, const std::string& payload) const {
    fs::path file = fs::path(dir_) / (key + ".json");
    fs::path tmp = fs::path(dir_) / (key + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << payload;
    }
    fs::rename(tmp, file);
}

}  // namespace gapscope
