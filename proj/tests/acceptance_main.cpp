// Integration gate: runs every verification criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "permspec/verify.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 7;
    if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
    int failures = 0;
    std::size_t total = 0;
    for (const auto& [name, fn] : permspec::verify::suites()) {
        const auto start = std::chrono::steady_clock::now();
        const auto results = fn(seed);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& r : results) {
            std::printf("%s %-32s | %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            if (!r.passed) ++failures;
            ++total;
        }
        std::fflush(stdout);
        std::fprintf(stderr, "[suite %-12s %5.1fs]\n", name.c_str(), secs);
    }
    std::printf("RESULT %s (%zu/%zu)\n", failures == 0 ? "PASS" : "FAIL", total - std::size_t(failures),
                total);
    return failures == 0 ? 0 : 1;
}
