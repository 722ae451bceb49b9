#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lemni/core.hpp"
#include "lemni/critical.hpp"

namespace lemni {

struct VerifyConfig {
    double rel_gap = 0.1;  // bracket half-width as a fraction of the rung spacing
    int grid = 512;        // starting grid nodes per axis
    int max_grid = 2048;   // refinement cap (grid doubles on OrphanRoot)
    double margin = 0.5;   // extra window padding
    int threads = 0;       // 0 = LEMNI_THREADS / hardware
    // When set, verify exactly these levels instead of deriving them from the
    // ladder (used by cluster_experiment to compare two instances).
    std::optional<std::vector<double>> explicit_levels;
};

// The invariant check for one component at one level: the zero count of f
// must exceed the zero count of f' by exactly one.
struct ComponentVerdict {
    double level = 0.0;
    int component_index = -1;
    int n_f = 0;
    int n_fprime = 0;
    bool macdonald_ok = false;        // n_f == n_fprime + 1
    bool count_agreement = false;     // argument-principle counts match membership counts
    double residual_f = 0.0;          // winding quadrature residuals
    double residual_fprime = 0.0;
    std::string note;                 // populated when the winding count failed
};

struct SkippedLevel {
    double level = 0.0;
    std::string reason;
};

struct StaircaseStep {
    double level = 0.0;
    int component_count = 0;
};

struct VerificationReport {
    VerificationReport(std::string digest_, Instance instance_)
        : digest(std::move(digest_)), instance(std::move(instance_)) {}

    std::string digest;
    Instance instance;
    CriticalLadder ladder;
    BracketSet brackets;
    std::vector<double> levels;          // levels actually verified, ascending
    std::vector<SkippedLevel> skipped;
    std::vector<ComponentVerdict> verdicts;
    std::vector<StaircaseStep> staircase;
    bool overall_pass = false;
    int grid_used = 0;
    double solver_ms = 0.0;
    double topology_ms = 0.0;
    double counting_ms = 0.0;
    double total_ms = 0.0;
};

// Component counts per level with consecutive duplicates collapsed: "2,1".
std::string staircase_compact(const VerificationReport& report);

// Full protocol for one instance: critical ladder -> brackets -> level sweep
// (below-ladder, each bracket low/high, above-ladder) -> per-component counts
// by membership and by argument principle.  Tied rungs are skipped with a
// note; OrphanRoot triggers grid doubling up to max_grid.
VerificationReport verify_instance(const Instance& inst, const VerifyConfig& cfg = {});

struct TrialResult {
    int trial = 0;
    std::uint64_t instance_seed = 0;
    int degree = 0;
    int distinct_roots = 0;
    std::string digest;
    bool pass = false;            // overall_pass of the report
    bool all_macdonald = false;   // every verdict satisfied n_f == n_fprime + 1
    bool all_agreement = false;   // every verdict had matching count methods
    bool had_ties = false;
    std::vector<int> staircase_counts;
    std::vector<int> bracket_multiplicities;
    std::vector<double> residuals;  // winding residuals, two per verdict
    int verdict_count = 0;
    int agreement_count = 0;
    std::string error;              // nonempty if the trial raised
};

struct BatchSummary {
    int n_trials = 0;
    int n_pass = 0;
    std::uint64_t seed = 0;
    std::pair<int, int> degree_range{0, 0};
    std::vector<TrialResult> trials;

    int total_verdicts() const;
    int total_agreements() const;
    double median_residual() const;
    bool all_pass() const { return n_pass == n_trials; }
};

// Generates n_trials instances (degree uniform in degree_range, all zeros
// simple) from per-trial streams derived from (seed, trial index) and runs
// verify_instance on each.  Results are identical at any parallelism level.
BatchSummary verify_batch(int n_trials, std::pair<int, int> degree_range, std::uint64_t seed,
                          const VerifyConfig& cfg = {});

// Replaces the multiplicity-m root at root_index by m simple zeros equally
// spaced on a circle of radius epsilon around it, then verifies the original
// and the perturbed instance at the original's test levels so their verdicts
// can be compared one-to-one.  epsilon must stay below 1e-2 times the
// distance to the nearest other root (EpsilonTooLarge otherwise); the target
// root must have multiplicity >= 2.
std::pair<VerificationReport, VerificationReport> cluster_experiment(
    const Instance& base, int root_index, double epsilon, const VerifyConfig& cfg = {});

}  // namespace lemni
