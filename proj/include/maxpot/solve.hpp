#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxpot/lp.hpp"
#include "maxpot/program.hpp"

namespace maxpot {

enum class SolveStatus { exact, local, infeasible };

const char* to_string(SolveStatus s);
// The weaker of two statuses.
SolveStatus combine(SolveStatus a, SolveStatus b);

struct Optimum {
    double value = 0;
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> x;
    double residual = 0;
};

struct BoundsResult {
    double lower = 0;
    double upper = 0;
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> witness_lower;
    std::vector<double> witness_upper;

    double width() const { return upper - lower; }
};

struct SolverOptions {
    int restarts = 32;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = OpenMP default
    double residual_tol = 1e-6;
    int max_sweeps = 200;
    lp::Options lp;
    // Extra starting points tried before the random restarts; infeasible
    // ones are repaired by the phase-1 sweeps.
    std::vector<std::vector<double>> starts;
};

// Exact optimum of a degree <= 1 program.
Optimum solve_lp(const PolyProgram& p, Sense sense, const lp::Options& opts = {});

// Multi-start block-coordinate ascent: each block is one district (both
// copies), and with the other blocks fixed every constraint and the objective
// are linear in it, so each step is an exact LP. Degree <= 1 programs are
// delegated to solve_lp.
Optimum solve_poly(const PolyProgram& p, Sense sense, const SolverOptions& opts = {});
Optimum solve_poly_serial(const PolyProgram& p, Sense sense, const SolverOptions& opts = {});

Optimum solve(const PolyProgram& p, Sense sense, const SolverOptions& opts = {});
BoundsResult solve_bounds(const PolyProgram& p, const SolverOptions& opts = {});

}  // namespace maxpot
