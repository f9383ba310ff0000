#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "permspec/estimators.hpp"
#include "permspec/exact_measures.hpp"
#include "permspec/gap_solver.hpp"
#include "permspec/oracle.hpp"
#include "permspec/spectrum.hpp"

namespace permspec {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// CSV: UTF-8, LF line ends, one header row, '#'-prefixed metadata comments.

inline void write_measure_csv(std::ostream& os, const EigenPointMeasure& m,
                              const std::string& config_echo) {
    if (!config_echo.empty()) os << "# config: " << config_echo << "\n";
    if (m.kind == EigenPointMeasure::Kind::Complex) {
        os << "# kind=complex\n";
        os << "re,im,mult\n";
        for (const auto& a : m.atoms) {
            const auto v = m.complex_value(a);
            os << fmt_g(v.real()) << ',' << fmt_g(v.imag()) << ',' << a.mult << "\n";
        }
    } else {
        os << "# kind=angle\n";
        if (m.window)
            os << "# window: " << fmt_g(m.window->first) << ' ' << fmt_g(m.window->second) << "\n";
        if (m.infinite_atom_at_zero) os << "# infinite-atom-at-zero: true\n";
        if (m.truncation_bound > 0.0) os << "# truncation-bound: " << fmt_g(m.truncation_bound) << "\n";
        os << "angle,mult\n";
        for (const auto& a : m.atoms) os << fmt_g(a.x) << ',' << a.mult << "\n";
    }
}

inline void write_grid_csv(std::ostream& os, const GridFunction& g, const std::string& config_echo) {
    if (!config_echo.empty()) os << "# config: " << config_echo << "\n";
    os << "# theta=" << fmt_g(g.theta) << " method=" << g.method << " h=" << fmt_g(g.h) << "\n";
    os << "x,value\n";
    for (std::size_t i = 0; i < g.values.size(); ++i)
        os << fmt_g(g.x_at(i)) << ',' << fmt_g(g.values[i]) << "\n";
}

inline void write_table_csv(std::ostream& os, const oracle::WeightedPermutationTable& table) {
    os << "# ewens table n=" << table.n << " theta=" << table.theta.num << '/' << table.theta.den
       << "\n";
    os << "permutation,num,den\n";
    for (const auto& [sigma, prob] : table.rows)
        os << sigma.to_string() << ',' << prob.num << ',' << prob.den << "\n";
}

inline nlohmann::json to_json(const MixtureMeasure& m) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : m.terms) terms.push_back({{"k", t.k}, {"weight", t.weight}, {"law_tag", m.law_tag}});
    return {{"terms", terms}, {"truncated", m.truncated}};
}

inline nlohmann::json to_json(const TestReport& r) {
    return {{"description", r.description},
            {"statistic", r.statistic},
            {"threshold", r.threshold},
            {"n", r.n},
            {"passed", r.passed}};
}

}  // namespace permspec
