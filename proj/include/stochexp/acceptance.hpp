#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochexp {

struct CriterionOutcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    unsigned workers = 1;
    std::string scratch_dir = ".";  // reproducibility check writes CSVs here
};

// Runs every acceptance criterion, printing one PASS/FAIL line per criterion.
std::vector<CriterionOutcome> run_acceptance(std::ostream& log, const AcceptanceOptions& options);

// Independent oracles used by the acceptance checks and the tests.
namespace oracle {

// E[r0 / R_t] for R a BES(3) started at r0, by composite Simpson integration
// of the noncentral chi(3) density.
double bes3_inverse_mean(double r0, double t);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// E f(xi) for xi ~ Uniform[0, 1] when f may blow up like (1 - x)^(-1/2) at 1:
// substitutes x = 1 - u^2 and integrates 2u f(1 - u^2) over (0, 1).
template <class F>
double uniform_expectation_sqrt_singular(const F& f, int panels = 200, int order = 16) {
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(order, x, w);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        for (int i = 0; i < order; ++i) {
            const double u = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
            sum += 0.5 * (b - a) * w[i] * 2.0 * u * f(1.0 - u * u);
        }
    }
    return sum;
}

}  // namespace oracle

}  // namespace stochexp
