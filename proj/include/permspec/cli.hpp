#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "permspec/io.hpp"
#include "permspec/verify.hpp"

namespace permspec {

// Everything a run needs; the echo string in output headers reproduces it.
struct RunConfig {
    std::string command;
    double theta = 1.0;
    std::string law_text = "dirac1";
    std::uint64_t n = 100;        // dimension; 0 means the N = infinity limit where supported
    std::uint64_t seed = 1;
    std::uint64_t samples = 1;
    std::string out_path;         // empty = stdout
    double h = 1e-3;
    double x_max = 10.0;
    std::uint64_t k_max = 10000;
    double window_lo = -10.0;
    double window_hi = 10.0;
    double tol = 1e-10;
    std::string method = "volterra";
    std::string suite = "all";
    std::uint64_t q = 1;
    std::vector<std::string> fns;
    std::uint64_t k_power = 8;
    double lambda_max = 4000.0;
    std::uint64_t n_freq = 200000;

    std::string echo() const {
        std::ostringstream os;
        os << "cmd=" << command << " theta=" << fmt_g(theta) << " law=" << law_text << " n=" << n
           << " seed=" << seed << " samples=" << samples;
        if (command == "gap")
            os << " method=" << method << " h=" << fmt_g(h) << " x-max=" << fmt_g(x_max)
               << " lambda-max=" << fmt_g(lambda_max) << " n-freq=" << n_freq;
        if (command == "sample-angles" || command == "sample-spectrum")
            os << " window=" << fmt_g(window_lo) << ":" << fmt_g(window_hi) << " tol=" << fmt_g(tol)
               << " k-max=" << k_max;
        if (command == "mean-measure") os << " k-max=" << k_max;
        if (command == "correlation") {
            os << " q=" << q;
            for (const auto& f : fns) os << " f=" << f;
        }
        if (command == "trace") os << " k=" << k_power;
        if (command == "verify") os << " suite=" << suite;
        return os.str();
    }
};

inline TestFn parse_testfn(const std::string& text) {
    auto nums = [&](const std::string& body, std::size_t want) {
        std::vector<double> v;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw parameter_error("bad test-function number '" + item + "'");
            }
        }
        if (v.size() != want) throw parameter_error("test function '" + text + "' needs " +
                                                    std::to_string(want) + " numbers");
        return v;
    };
    if (text == "one") return FnOne{};
    if (text.rfind("radial:", 0) == 0) {
        const auto v = nums(text.substr(7), 2);
        return FnRadialInterval{v[0], v[1]};
    }
    if (text.rfind("angular:", 0) == 0) {
        const auto v = nums(text.substr(8), 2);
        return FnAngularInterval{v[0], v[1]};
    }
    if (text.rfind("plateau:", 0) == 0) {
        const auto v = nums(text.substr(8), 1);
        return FnRadialPlateau{v[0]};
    }
    if (text.rfind("bump:", 0) == 0) {
        const auto v = nums(text.substr(5), 2);
        return FnSmoothBump{v[0], v[1]};
    }
    throw parameter_error("unknown test function '" + text + "'");
}

namespace detail {

class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw parameter_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

inline int execute(const RunConfig& cfg) {
    detail::OutputSink sink(cfg.out_path);
    std::ostream& os = sink.stream();
    const DistributionSpec law = parse_law(cfg.law_text);

    if (cfg.command == "sample-spectrum") {
        if (cfg.n == 0) throw parameter_error("sample-spectrum: n must be >= 1");
        FiniteSpectrumSampler sampler(cfg.theta, std::uint32_t(cfg.n), law);
        for (std::uint64_t s = 0; s < cfg.samples; ++s) {
            RandomStream rng(cfg.seed, s);
            const auto measure = eigenvalues_from_cycles(sampler.sample(rng));
            os << "# sample=" << s << "\n";
            write_measure_csv(os, measure, s == 0 ? cfg.echo() : "");
        }
        return 0;
    }
    if (cfg.command == "sample-angles") {
        const std::pair<double, double> window{cfg.window_lo, cfg.window_hi};
        for (std::uint64_t s = 0; s < cfg.samples; ++s) {
            RandomStream rng(cfg.seed, s);
            EigenPointMeasure measure;
            if (cfg.n == 0) {
                const auto shift = limit_shift_law(law);
                measure = sample_tau_infinity(cfg.theta, shift.shift, window, cfg.tol, rng);
            } else {
                CrpCycleSampler sampler(cfg.theta, std::uint32_t(cfg.n));
                const auto data = sample_cycle_data(law, sampler.sample_lengths(rng), rng);
                measure = scaled_eigenangles(data, cfg.n, window);
            }
            os << "# sample=" << s << "\n";
            write_measure_csv(os, measure, s == 0 ? cfg.echo() : "");
        }
        return 0;
    }
    if (cfg.command == "mean-measure") {
        const auto mix = cfg.n == 0 ? mean_measure(std::nullopt, cfg.theta, law, cfg.k_max)
                                    : mean_measure(cfg.n, cfg.theta, law, cfg.k_max);
        auto j = to_json(mix);
        j["config"] = cfg.echo();
        os << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.command == "correlation") {
        std::vector<TestFn> fns;
        for (const auto& t : cfg.fns) fns.push_back(parse_testfn(t));
        if (fns.size() != cfg.q) throw parameter_error("correlation: need one --f per coordinate");
        const auto r = cfg.n == 0 ? q_correlation(std::nullopt, cfg.theta, law, cfg.q, fns, cfg.k_max)
                                  : q_correlation(cfg.n, cfg.theta, law, cfg.q, fns, cfg.k_max);
        nlohmann::json j{{"value", r.value}, {"abs_error", r.abs_error}, {"config", cfg.echo()}};
        os << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.command == "gap") {
        GridFunction g;
        if (cfg.method == "volterra") {
            g = solve_volterra(cfg.theta, cfg.h, cfg.x_max);
        } else if (cfg.method == "fourier") {
            g = fourier_gap(cfg.theta, cfg.lambda_max, cfg.n_freq, cfg.x_max, cfg.h);
        } else if (cfg.method == "mc") {
            RandomStream rng(cfg.seed, 0);
            g = mc_gap(cfg.theta, cfg.samples, cfg.tol, cfg.h, cfg.x_max, rng);
        } else {
            throw parameter_error("gap: method must be volterra, fourier or mc");
        }
        write_grid_csv(os, g, cfg.echo());
        return 0;
    }
    if (cfg.command == "trace") {
        if (cfg.n == 0) throw parameter_error("trace: n must be >= 1");
        RandomStream rng(cfg.seed, 0);
        FiniteSpectrumSampler sampler(cfg.theta, std::uint32_t(cfg.n), law);
        const auto& data = sampler.sample(rng);
        os << "# config: " << cfg.echo() << "\n";
        os << "k,re,im\n";
        for (std::uint64_t k = 1; k <= cfg.k_power; ++k) {
            const auto t = trace_power(data, k);
            os << k << ',' << fmt_g(t.real()) << ',' << fmt_g(t.imag()) << "\n";
        }
        return 0;
    }
    if (cfg.command == "verify") {
        const auto results = verify::run_suite(cfg.suite, cfg.seed);
        os << verify::format_report(cfg.suite, cfg.seed, results);
        for (const auto& r : results)
            if (!r.passed) return 5;
        return 0;
    }
    throw parameter_error("unknown command '" + cfg.command + "'");
}

}  // namespace detail

// Exit codes: 0 success, 2 usage, 3 capability, 4 numerical failure,
// 5 verification failure.
inline int cli_main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"eigenvalue point processes of Ewens-distributed permutation matrices"};
    app.set_help_flag("--help", "print usage");  // frees -h / --h for the grid step
    app.set_config("--config")->description("key=value config file (flags take precedence)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    app.add_option("--theta", cfg.theta, "Ewens parameter")->capture_default_str();
    app.add_option("--law", cfg.law_text,
                   "entry law: dirac1 | uniform | roots:p0,p1,... | log-stable:alpha=A,rho=R")
        ->capture_default_str();
    app.add_option("--n", cfg.n, "matrix dimension (0 = limit process where supported)")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "number of samples")->capture_default_str();
    app.add_option("--out", cfg.out_path, "output file (default stdout)");
    app.add_option("--h", cfg.h, "grid step")->capture_default_str();
    app.add_option("--x-max", cfg.x_max, "grid end")->capture_default_str();
    app.add_option("--k-max", cfg.k_max, "cycle-length truncation for limit measures")
        ->capture_default_str();
    app.add_option("--window-lo", cfg.window_lo, "window lower end")->capture_default_str();
    app.add_option("--window-hi", cfg.window_hi, "window upper end")->capture_default_str();
    app.add_option("--tol", cfg.tol, "stick-breaking truncation tolerance")->capture_default_str();
    app.add_option("--method", cfg.method, "gap method: volterra | fourier | mc")->capture_default_str();
    app.add_option("--suite", cfg.suite, "verify suite name or 'all'")->capture_default_str();
    app.add_option("--q", cfg.q, "correlation order (1..3)")->capture_default_str();
    app.add_option("--f", cfg.fns,
                   "test function: one | radial:r1,r2 | angular:a1,a2 | plateau:c | bump:a,b");
    app.add_option("--k", cfg.k_power, "largest trace power")->capture_default_str();
    app.add_option("--lambda-max", cfg.lambda_max, "fourier frequency cutoff")->capture_default_str();
    app.add_option("--n-freq", cfg.n_freq, "fourier frequency samples")->capture_default_str();

    for (const char* name : {"sample-spectrum", "sample-angles", "mean-measure", "correlation", "gap",
                             "trace", "verify"}) {
        app.add_subcommand(name)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return detail::execute(cfg);
    } catch (const parameter_error& e) {
        std::cerr << "error (usage): " << e.what() << "\n";
        return 2;
    } catch (const capability_error& e) {
        std::cerr << "error (capability): " << e.what() << "\n";
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 4;
    }
}

}  // namespace permspec
