// gapscope: spectral toolkit for the almost Mathieu operator.
// Subcommands wrap the core library; every run is deterministic given its
// configuration (fixed seed, fixed merge order).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "gapscope/cocycle.hpp"
#include "gapscope/config.hpp"
#include "gapscope/gaps.hpp"
#include "gapscope/kam.hpp"
#include "gapscope/spectrum.hpp"

namespace fs = std::filesystem;
using namespace gapscope;

namespace {

void write_file(const std::string& path, const std::string& payload) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << payload;
    }
    fs::rename(tmp, p);
}

std::string header_comment(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# gapscope " << kToolVersion << " " << cfg.canonical_json() << "\n";
    return os.str();
}

void banner(const RunConfig& cfg) {
    std::cerr << "gapscope " << kToolVersion
              << " effective config: " << cfg.canonical_json() << "\n";
}

std::string default_cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GAPSCOPE_CACHE_DIR")) return env;
    return ".gapscope-cache";
}

struct KamSweepRow {
    double norm;
    double remainder;
    double solution_ratio;
};

// Deterministic non-resonant test perturbation of unit norm, rescaled.
SlMatSeries make_test_perturbation(const Frequency& alpha, std::int64_t q_next,
                                   int degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SlMatSeries m(degree);
    for (int k = 1; k <= degree; ++k) {
        for (FourierSeries* comp : {&m.m11, &m.m12, &m.m21}) {
            std::complex<double> c(u(rng), u(rng));
            comp->at(k) = c;
            comp->at(-k) = std::conj(c);
        }
    }
    auto split = resonant_split(m, alpha, q_next);
    auto nres = split.nonresonant;
    double n = nres.norm();
    return nres * (1.0 / n);
}

int run_kam_step(const RunConfig& cfg) {
    auto alpha = cfg.alpha.resolve();
    Mat2 parabolic{1.0, 0.1, 0.0, 1.0};
    std::vector<KamSweepRow> rows;
    for (double norm : {cfg.kam_norm, cfg.kam_norm / 10.0, cfg.kam_norm / 100.0}) {
        auto base = make_test_perturbation(alpha, cfg.q_next, 8, cfg.seed + 1);
        KamStepOptions opts;
        opts.smallness_gate = cfg.kam_gate;
        auto res = newton_step(parabolic, base * norm, alpha, cfg.q_next, opts);
        rows.push_back({norm, res.remainder_norm, res.solution_ratio});
    }
    std::ostringstream csv;
    csv << header_comment(cfg);
    csv.precision(12);
    csv << "norm,remainder,solution_ratio\n";
    for (const auto& r : rows)
        csv << r.norm << ',' << r.remainder << ',' << r.solution_ratio << '\n';
    double p = std::log(rows[0].remainder / rows[1].remainder) /
               std::log(rows[0].norm / rows[1].norm);
    std::cout << "contraction exponent (fitted): " << p << "\n";
    std::string out =
        (cfg.output_path.empty() ? "kam-step" : cfg.output_path) + ".csv";
    write_file(out, csv.str());
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_butterfly(const RunConfig& cfg) {
    if (cfg.q_max > 200) {
        std::cerr << "butterfly: --qmax must be <= 200\n";
        return 2;
    }
    std::ostringstream csv;
    csv << header_comment(cfg);
    csv.precision(10);
    csv << "p,q,alpha,E\n";
    for (int q = 1; q <= cfg.q_max; ++q) {
        for (int p = 0; p <= q / 2; ++p) {
            if (p == 0 && q != 1) continue;
            if (std::gcd(p, q) != 1) continue;
            auto intervals =
                rational_spectrum(cfg.lambda, p, q, 4, cfg.grid_step);
            for (const auto& iv : intervals) {
                int pts = std::max(1, int(iv.width() / (4.0 * cfg.grid_step)));
                for (int i = 0; i <= pts; ++i) {
                    double E = iv.lo + iv.width() * i / std::max(1, pts);
                    csv << p << ',' << q << ','
                        << double(p) / double(q) << ',' << E << '\n';
                    if (p != 0) {
                        csv << (q - p) << ',' << q << ','
                            << double(q - p) / double(q) << ',' << E << '\n';
                    }
                }
            }
        }
    }
    std::string out =
        (cfg.output_path.empty() ? "butterfly" : cfg.output_path) + ".csv";
    write_file(out, csv.str());
    std::cout << "wrote " << out << "\n";
    return 0;
}

SpectrumScanParams scan_params(const RunConfig& cfg) {
    SpectrumScanParams sp;
    sp.grid_step = cfg.grid_step;
    sp.n_ids = cfg.n;
    sp.ids_phases = cfg.n_phases;
    sp.seed = cfg.seed;
    return sp;
}

int run_spectrum(const RunConfig& cfg, bool with_gaps) {
    auto alpha = cfg.alpha.resolve();
    auto spec = spectrum_intervals(cfg.lambda, alpha, scan_params(cfg));
    std::string base = cfg.output_path.empty()
                           ? (with_gaps ? "gaps" : "spectrum")
                           : cfg.output_path;
    write_file(base + ".csv", header_comment(cfg) + spec.to_csv());
    std::ostringstream json;
    json.precision(12);
    json << "{\"tool_version\": \"" << kToolVersion << "\", \"config\": "
         << cfg.canonical_json() << ", \"intervals\": "
         << spec.intervals_json();
    if (with_gaps) {
        auto ids_fn = [&](double E) {
            return ids(cfg.lambda, alpha, E, cfg.n, cfg.n_phases, cfg.seed);
        };
        auto gaps = detect_gaps(spec, ids_fn, 2.0 * cfg.grid_step);
        json << ", \"gaps\": [";
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            auto lab = label_gap(gaps[i].ids_value, alpha, 30, 1e-2);
            json << (i ? ", {" : "{") << "\"e_minus\": " << gaps[i].e_minus
                 << ", \"e_plus\": " << gaps[i].e_plus
                 << ", \"ids\": " << gaps[i].ids_value << ", \"label\": "
                 << (lab.status == LabelStatus::ok ? lab.k : 0)
                 << ", \"residual\": " << lab.residual << "}";
        }
        json << "]";
    }
    json << "}";
    write_file(base + ".json", json.str());
    std::cout << "wrote " << base << ".csv and " << base << ".json ("
              << spec.intervals.size() << " spectrum intervals)\n";
    return 0;
}

int run_dry_check(const RunConfig& cfg) {
    if (cfg.lambda == 1.0) {
        std::cerr << "dry-check: lambda = 1 is the critical coupling and is "
                     "excluded; the all-gaps-open statement requires "
                     "lambda != 1\n";
        return 2;
    }
    auto alpha = cfg.alpha.resolve();
    DryMartiniParams p;
    p.n_ids = cfg.n;
    p.ids_phases = cfg.n_phases;
    p.seed = cfg.seed;
    auto rep = dry_martini_check(cfg.lambda, alpha, cfg.k_max, cfg.grid_step,
                                 0.0, p);
    std::string base = cfg.output_path.empty() ? "dry-check" : cfg.output_path;
    write_file(base + ".json", rep.to_json(kToolVersion));
    write_file(base + ".csv", rep.to_csv(kToolVersion));
    std::cout << "all_open: " << (rep.all_open ? "true" : "false") << "\n";
    std::cout << "wrote " << base << ".json and " << base << ".csv\n";
    return rep.all_open || cfg.lambda == 0.0 ? 0 : 1;
}

int run_duality(const RunConfig& cfg) {
    if (cfg.lambda <= 1.0) {
        std::cerr << "duality: requires --lambda > 1 (the check compares "
                     "lambda against its dual 1/lambda)\n";
        return 2;
    }
    auto alpha = cfg.alpha.resolve();
    auto rep = duality_check(cfg.lambda, alpha, cfg.grid_step, scan_params(cfg));
    std::ostringstream json;
    json.precision(12);
    json << "{\"tool_version\": \"" << kToolVersion << "\", \"config\": "
         << cfg.canonical_json() << ", \"hausdorff\": " << rep.hausdorff
         << ", \"ids_discrepancy\": " << rep.ids_discrepancy << "}";
    std::string base = cfg.output_path.empty() ? "duality" : cfg.output_path;
    write_file(base + ".json", json.str());
    std::cout << "hausdorff distance: " << rep.hausdorff
              << "\nids discrepancy: " << rep.ids_discrepancy << "\n";
    std::cout << "wrote " << base << ".json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gapscope: almost Mathieu spectral toolkit"};
    app.set_config("--config", "", "optional config file (TOML)");
    RunConfig cfg;
    std::string alpha_text = "golden";
    std::string cache_flag;
    bool no_cache = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--lambda", cfg.lambda, "coupling lambda")
            ->envname("GAPSCOPE_LAMBDA");
        sub->add_option("--alpha", alpha_text,
                        "frequency: golden|silver|0.42|p/q|[a1,a2,...]")
            ->envname("GAPSCOPE_ALPHA");
        sub->add_option("--seed", cfg.seed, "rng seed (default 0)")
            ->envname("GAPSCOPE_SEED");
        sub->add_option("--output,-o", cfg.output_path, "output path prefix");
        sub->add_option("--cache-dir", cache_flag, "cache directory");
        sub->add_flag("--no-cache", no_cache, "bypass the result cache");
        return sub;
    };

    auto* lyap = add_common(app.add_subcommand("lyap", "Lyapunov exponent"));
    lyap->add_option("--E", cfg.energy, "energy");
    lyap->add_option("--eps", cfg.epsilon, "imaginary phase part");
    lyap->add_option("--iters", cfg.n_iter, "iterations");
    lyap->add_option("--phases", cfg.n_phases, "phase samples");

    auto* rot = add_common(app.add_subcommand("rot", "fibered rotation number"));
    rot->add_option("--E", cfg.energy, "energy");
    rot->add_option("--iters", cfg.n_iter, "iterations");

    auto* idsc = add_common(app.add_subcommand("ids", "integrated density of states"));
    idsc->add_option("--E", cfg.energy, "energy");
    idsc->add_option("--n", cfg.n, "truncation size");
    idsc->add_option("--phases", cfg.n_phases, "phase samples");

    auto* spec = add_common(app.add_subcommand("spectrum", "spectrum scan"));
    spec->add_option("--grid", cfg.grid_step, "energy grid step");
    spec->add_option("--n", cfg.n, "IDS truncation size");

    auto* gapsub = add_common(app.add_subcommand("gaps", "gap detection"));
    gapsub->add_option("--grid", cfg.grid_step, "energy grid step");
    gapsub->add_option("--n", cfg.n, "IDS truncation size");

    auto* dry = add_common(app.add_subcommand("dry-check", "all-labels-open report"));
    dry->add_option("--kmax", cfg.k_max, "labels to check: |k| <= kmax");
    dry->add_option("--grid", cfg.grid_step, "resolution");
    dry->add_option("--n", cfg.n, "IDS truncation size");

    auto* dual = add_common(app.add_subcommand("duality", "Aubry duality check"));
    dual->add_option("--grid", cfg.grid_step, "energy grid step");

    auto* kam = add_common(app.add_subcommand("kam-step", "one KAM Newton step"));
    kam->add_option("--norm", cfg.kam_norm, "largest perturbation norm");
    kam->add_option("--qnext", cfg.q_next, "convergent denominator");
    kam->add_option("--gate", cfg.kam_gate, "smallness gate on ||f|| q^3");

    auto* butterfly = add_common(app.add_subcommand("butterfly", "rational p/q sweep"));
    butterfly->add_option("--qmax", cfg.q_max, "max denominator (<= 200)");
    butterfly->add_option("--grid", cfg.grid_step, "energy grid step");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors exit 2
    }

    try {
        cfg.alpha = AlphaSpec::parse(alpha_text);
        CLI::App* sub = app.get_subcommands().front();
        cfg.subcommand = sub->get_name();
        if (!(cfg.lambda >= 0.0)) {
            std::cerr << "error: --lambda must be >= 0\n";
            return 2;
        }
        banner(cfg);

        // cached subcommands replay byte-identical artifacts
        bool cacheable = cfg.subcommand == "dry-check" ||
                         cfg.subcommand == "spectrum" ||
                         cfg.subcommand == "gaps" ||
                         cfg.subcommand == "duality";
        Cache cache(default_cache_dir(cache_flag));
        std::string key = Cache::key_for(cfg);
        if (cacheable && !no_cache) {
            if (auto hit = cache.load(key)) {
                std::string base = cfg.output_path.empty() ? cfg.subcommand
                                                           : cfg.output_path;
                write_file(base + ".json", *hit);
                std::cout << "cache hit; wrote " << base << ".json\n";
                return 0;
            }
        }

        int rc = 2;
        if (sub == lyap) {
            auto alpha = cfg.alpha.resolve();
            SchrodingerCocycle c{cfg.lambda, cfg.energy, cfg.epsilon, alpha};
            double l = lyapunov_exponent(c, cfg.n_iter, cfg.n_phases, cfg.seed);
            std::cout.precision(10);
            std::cout << "L = " << l << "\n";
            rc = 0;
        } else if (sub == rot) {
            auto alpha = cfg.alpha.resolve();
            SchrodingerCocycle c{cfg.lambda, cfg.energy, 0.0, alpha};
            auto r = rotation_number(transfer_map(c), alpha, cfg.n_iter);
            std::cout.precision(10);
            std::cout << "rot (raw mod 1) = " << r.raw
                      << "\nrot (folded)    = " << r.folded
                      << "\nconverged       = " << (r.converged ? "yes" : "no")
                      << "\n";
            rc = r.converged ? 0 : 1;
        } else if (sub == idsc) {
            auto alpha = cfg.alpha.resolve();
            double v = ids(cfg.lambda, alpha, cfg.energy, cfg.n, cfg.n_phases,
                           cfg.seed);
            std::cout.precision(10);
            std::cout << "N(E) = " << v << "\n";
            rc = 0;
        } else if (sub == spec) {
            rc = run_spectrum(cfg, false);
        } else if (sub == gapsub) {
            rc = run_spectrum(cfg, true);
        } else if (sub == dry) {
            rc = run_dry_check(cfg);
        } else if (sub == dual) {
            rc = run_duality(cfg);
        } else if (sub == kam) {
            rc = run_kam_step(cfg);
        } else if (sub == butterfly) {
            rc = run_butterfly(cfg);
        }

        if (cacheable && !no_cache && rc == 0) {
            std::string base =
                cfg.output_path.empty() ? cfg.subcommand : cfg.output_path;
            std::ifstream in(base + ".json", std::ios::binary);
            if (in) {
                std::ostringstream os;
                os << in.rdbuf();
                cache.store(key, os.str());
            }
        }
        return rc;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
