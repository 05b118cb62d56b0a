// Tracks a slowly drifting sparse regression problem with one ADMM pass per
// time step and prints the gap to the per-step optimum every 10 steps.

#include <cstdio>
#include <vector>

#include "dynadmm/dynadmm.hpp"

int main() {
  using namespace dynadmm;
  RngStream rng(7);
  const auto slices = lasso_stream({.m = 10, .p = 30, .q = 2, .eta = 0.01, .sigma = 0.1}, 0.2, 100, rng);

  std::vector<ProblemInstance> stream;
  for (std::size_t i = 0; i < slices.size(); ++i) stream.push_back(assemble(slices[i].problem, std::int64_t(i) + 1));

  const auto states = run_dynamic(stream, {.rho = 1.0});
  const auto optima = solve_stream(stream, OracleConfig{});

  std::printf("%4s  %12s  %12s\n", "k", "|x - x*|", "|x - truth|");
  for (std::size_t i = 9; i < states.size(); i += 10) {
    std::printf("%4zu  %12.6f  %12.6f\n", i + 1, (states[i].x - optima[i].x_star).norm(),
                (states[i].x - slices[i].truth.values).norm());
  }
}
