#include "lemni/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lemni/counting.hpp"
#include "lemni/errors.hpp"
#include "lemni/generator.hpp"
#include "lemni/levelset.hpp"
#include "lemni/threads.hpp"

namespace lemni {

namespace {

constexpr double kExclusionBand = 1e-9;

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

bool level_too_critical(const CriticalLadder& ladder, double level) {
    for (const auto& p : ladder.points) {
        if (!std::isfinite(p.log_critical_modulus)) continue;
        if (std::abs(level - p.log_critical_modulus) <= kExclusionBand) return true;
    }
    return false;
}

// Default level plan: one level below the whole ladder, the two bracket
// levels of every untied rung, one level above the whole ladder.  A ladder
// with no finite rung (single distinct root) gets a fixed pair instead.
std::vector<double> plan_levels(const BracketSet& brackets, std::vector<SkippedLevel>& skipped) {
    std::vector<double> levels;
    if (brackets.rungs.empty()) {
        levels.push_back(std::log(0.5));
        levels.push_back(std::log(1.5));
        return levels;
    }
    levels.push_back(brackets.rungs.front().log_modulus - 3.0 * brackets.delta);
    for (const auto& rung : brackets.rungs) {
        if (rung.tied) {
            skipped.push_back({rung.log_modulus,
                               "tied critical moduli: bracket levels would not separate them"});
            continue;
        }
        levels.push_back(rung.log_modulus - brackets.delta);
        levels.push_back(rung.log_modulus + brackets.delta);
    }
    levels.push_back(brackets.rungs.back().log_modulus + 3.0 * brackets.delta);
    std::sort(levels.begin(), levels.end());
    return levels;
}

}  // namespace

std::string staircase_compact(const VerificationReport& report) {
    std::string out;
    int prev = -1;
    for (const auto& step : report.staircase) {
        if (step.component_count == prev) continue;
        prev = step.component_count;
        if (!out.empty()) out += ',';
        out += std::to_string(step.component_count);
    }
    return out;
}

VerificationReport verify_instance(const Instance& inst, const VerifyConfig& cfg) {
    if (cfg.grid < 16 || cfg.max_grid < cfg.grid)
        throw std::invalid_argument("verify_instance: need 16 <= grid <= max_grid");

    const double t0 = now_ms();
    VerificationReport report{inst.digest(), inst};

    report.ladder = critical_points(inst);
    report.brackets = bracket_ladder(report.ladder, cfg.rel_gap);
    const double t1 = now_ms();
    report.solver_ms = t1 - t0;

    std::vector<double> levels;
    if (cfg.explicit_levels) {
        for (double lvl : *cfg.explicit_levels) {
            if (!std::isfinite(lvl))
                throw std::invalid_argument("verify_instance: explicit level must be finite");
            if (level_too_critical(report.ladder, lvl)) {
                report.skipped.push_back(
                    {lvl, "level within 1e-9 of a critical modulus"});
                continue;
            }
            levels.push_back(lvl);
        }
        std::sort(levels.begin(), levels.end());
    } else {
        levels = plan_levels(report.brackets, report.skipped);
    }

    double topo_ms = 0.0, count_ms = 0.0;

    if (levels.empty())
        throw std::invalid_argument("verify_instance: no usable level remains");

    // Saddle-neck scale of a rung: at a bracket level c -+ delta the two lobes
    // approach to ~2 sqrt(2 delta / |f''/f|).  The grid must resolve that gap
    // or the flood fill will report the wrong component count.
    auto rung_neck = [&](const Rung& rung) {
        double q = 0.0;
        for (int pi : rung.point_indices) {
            const Complex c = report.ladder.points[pi].location;
            Complex R(0, 0), Rp(0, 0);
            for (const auto& r : inst.roots()) {
                const Complex w = c - r.location;
                R += static_cast<double>(r.multiplicity) / w;
                Rp -= static_cast<double>(r.multiplicity) / (w * w);
            }
            q = std::max(q, std::abs(Rp + R * R));
        }
        return q > 0.0 ? std::sqrt(2.0 * report.brackets.delta / q)
                       : std::numeric_limits<double>::infinity();
    };

    // Fallbacks for a below-ladder level whose root islands fall between grid
    // nodes at the maximum resolution: raise it toward the first rung.
    std::vector<double> below_variants;
    if (!cfg.explicit_levels && !report.brackets.rungs.empty()) {
        const double first = report.brackets.rungs.front().log_modulus;
        const double d = report.brackets.delta;
        below_variants = {first - 2.0 * d, first - 1.5 * d, first - 1.1 * d};
    }
    size_t next_variant = 0;

    // One field grid per resolution serves every level: the window is built
    // for the top level, whose sublevel set contains all the lower ones.
    int grid = cfg.grid;
    std::vector<double> kept_levels;
    std::vector<LevelTopology> topologies;
    for (;;) {
        const double top = *std::max_element(levels.begin(), levels.end());
        const Window win = auto_window(inst, top, cfg.margin, grid);
        const double dx = std::max((win.x_max - win.x_min) / (win.nx - 1),
                                   (win.y_max - win.y_min) / (win.ny - 1));

        if (!cfg.explicit_levels) {
            std::vector<const Rung*> unresolved;
            for (const auto& rung : report.brackets.rungs)
                if (!rung.tied && rung_neck(rung) < 2.0 * dx) unresolved.push_back(&rung);
            if (!unresolved.empty()) {
                if (grid < cfg.max_grid) {
                    grid *= 2;
                    continue;
                }
                for (const Rung* rung : unresolved) {
                    for (double lvl : {rung->log_modulus - report.brackets.delta,
                                       rung->log_modulus + report.brackets.delta}) {
                        auto it = std::find(levels.begin(), levels.end(), lvl);
                        if (it == levels.end()) continue;
                        levels.erase(it);
                        report.skipped.push_back(
                            {lvl, "bracket neck narrower than the maximum grid resolution"});
                    }
                }
                if (levels.empty())
                    throw OrphanRoot(
                        "verify_instance: no level resolvable at the maximum grid", -1);
            }
        }

        kept_levels.clear();
        topologies.clear();
        const double tw0 = now_ms();
        FieldGrid field(inst, win, cfg.threads);
        double orphaned_level = 0.0;
        bool orphaned = false;
        std::vector<SkippedLevel> level_skips;
        for (double lvl : levels) {
            try {
                topologies.push_back(components(field, report.ladder, lvl));
                kept_levels.push_back(lvl);
            } catch (const OrphanRoot&) {
                orphaned = true;
                orphaned_level = lvl;
                break;
            } catch (const SaddleAtLevel& e) {
                level_skips.push_back({lvl, e.what()});
            } catch (const LevelTooCritical& e) {
                // Near-tied rungs can squeeze a bracket level into the
                // exclusion band; skip it rather than fail the run.
                level_skips.push_back({lvl, e.what()});
            }
        }
        topo_ms += now_ms() - tw0;
        if (!orphaned) {
            for (auto& s : level_skips) report.skipped.push_back(std::move(s));
            report.grid_used = grid;
            break;
        }
        if (grid < cfg.max_grid) {
            grid *= 2;
            continue;
        }
        const bool is_below = !levels.empty() && orphaned_level == levels.front() &&
                              !cfg.explicit_levels && !report.brackets.rungs.empty();
        if (is_below && next_variant < below_variants.size()) {
            // Raise the below-ladder level until every root island spans nodes.
            levels.front() = below_variants[next_variant++];
            continue;
        }
        auto it = std::find(levels.begin(), levels.end(), orphaned_level);
        if (it != levels.end()) levels.erase(it);
        report.skipped.push_back(
            {orphaned_level, "sublevel point unresolved at the maximum grid"});
        if (levels.empty())
            throw OrphanRoot(
                "verify_instance: sublevel point still unresolved at the maximum grid", -1);
    }

    levels = std::move(kept_levels);
    report.levels = levels;

    const double tc0 = now_ms();
    for (size_t li = 0; li < levels.size(); ++li) {
        const LevelTopology& topo = topologies[li];
        int closed_components = 0;
        for (size_t k = 0; k < topo.components.size(); ++k) {
            const Component& comp = topo.components[k];
            if (comp.outer_contour < 0) continue;
            ++closed_components;
            ComponentVerdict v;
            v.level = levels[li];
            v.component_index = static_cast<int>(k);
            v.n_f = membership_count(topo, static_cast<int>(k), Target::function);
            v.n_fprime = membership_count(topo, static_cast<int>(k), Target::derivative);
            v.macdonald_ok = v.n_f == v.n_fprime + 1;
            try {
                const ContourPolyline& outer = topo.contours[comp.outer_contour];
                const WindingCount wf = argument_principle_count(inst, outer, Target::function);
                const WindingCount wd =
                    argument_principle_count(inst, outer, Target::derivative, &report.ladder);
                v.residual_f = wf.integral_residual;
                v.residual_fprime = wd.integral_residual;
                v.count_agreement = wf.count == v.n_f && wd.count == v.n_fprime;
                if (!v.count_agreement)
                    v.note = "winding counts (" + std::to_string(wf.count) + "," +
                             std::to_string(wd.count) + ") disagree with membership";
            } catch (const Error& e) {
                v.count_agreement = false;
                v.note = e.what();
            }
            report.verdicts.push_back(std::move(v));
        }
        report.staircase.push_back({levels[li], closed_components});
    }
    count_ms += now_ms() - tc0;

    report.topology_ms = topo_ms;
    report.counting_ms = count_ms;
    report.total_ms = now_ms() - t0;

    bool ok = !report.verdicts.empty();
    for (const auto& v : report.verdicts) ok = ok && v.macdonald_ok && v.count_agreement;
    report.overall_pass = ok;
    return report;
}

int BatchSummary::total_verdicts() const {
    int n = 0;
    for (const auto& t : trials) n += t.verdict_count;
    return n;
}

int BatchSummary::total_agreements() const {
    int n = 0;
    for (const auto& t : trials) n += t.agreement_count;
    return n;
}

double BatchSummary::median_residual() const {
    std::vector<double> all;
    for (const auto& t : trials) all.insert(all.end(), t.residuals.begin(), t.residuals.end());
    if (all.empty()) return 0.0;
    std::sort(all.begin(), all.end());
    const size_t n = all.size();
    return n % 2 ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
}

BatchSummary verify_batch(int n_trials, std::pair<int, int> degree_range, std::uint64_t seed,
                          const VerifyConfig& cfg) {
    if (n_trials < 1) throw std::invalid_argument("verify_batch: n_trials must be >= 1");
    if (degree_range.first < 1 || degree_range.second < degree_range.first)
        throw std::invalid_argument("verify_batch: bad degree range");

    BatchSummary summary;
    summary.n_trials = n_trials;
    summary.seed = seed;
    summary.degree_range = degree_range;
    summary.trials.resize(n_trials);

    const int workers = resolve_thread_count(cfg.threads);
    const std::uint64_t span =
        static_cast<std::uint64_t>(degree_range.second - degree_range.first + 1);

    // Each trial draws from its own stream, so the schedule cannot change the
    // numbers; the inner verification runs single-threaded.
    parallel_for(n_trials, workers, [&](int i) {
        TrialResult& tr = summary.trials[i];
        tr.trial = i;
        SplitMix64 rng{derive_seed(seed, static_cast<std::uint64_t>(i))};
        const int n_zeros = degree_range.first + static_cast<int>(rng.next() % span);
        tr.instance_seed = rng.next();
        try {
            const Instance inst = generate({n_zeros, tr.instance_seed, std::nullopt});
            tr.degree = inst.degree();
            tr.distinct_roots = inst.distinct_count();
            tr.digest = inst.digest();
            VerifyConfig inner = cfg;
            inner.threads = 1;
            const VerificationReport rep = verify_instance(inst, inner);
            tr.pass = rep.overall_pass;
            tr.all_macdonald = true;
            tr.all_agreement = true;
            for (const auto& v : rep.verdicts) {
                tr.all_macdonald = tr.all_macdonald && v.macdonald_ok;
                tr.all_agreement = tr.all_agreement && v.count_agreement;
                tr.residuals.push_back(v.residual_f);
                tr.residuals.push_back(v.residual_fprime);
                if (v.count_agreement) ++tr.agreement_count;
            }
            tr.verdict_count = static_cast<int>(rep.verdicts.size());
            tr.had_ties = false;
            for (const auto& rung : rep.brackets.rungs) tr.had_ties |= rung.tied;
            for (const auto& step : rep.staircase) tr.staircase_counts.push_back(step.component_count);
            for (const auto& b : rep.brackets.brackets)
                tr.bracket_multiplicities.push_back(b.merge_multiplicity);
        } catch (const std::exception& e) {
            tr.error = e.what();
            tr.pass = false;
        }
    });

    for (const auto& t : summary.trials) summary.n_pass += t.pass ? 1 : 0;
    return summary;
}

std::pair<VerificationReport, VerificationReport> cluster_experiment(
    const Instance& base, int root_index, double epsilon, const VerifyConfig& cfg) {
    const auto& roots = base.roots();
    if (root_index < 0 || static_cast<size_t>(root_index) >= roots.size())
        throw std::invalid_argument("cluster_experiment: root index out of range");
    const RootEntry target = roots[root_index];
    if (target.multiplicity < 2)
        throw std::invalid_argument(
            "cluster_experiment: target root must have multiplicity >= 2");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("cluster_experiment: epsilon must be positive");

    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < roots.size(); ++i) {
        if (static_cast<int>(i) == root_index) continue;
        min_dist = std::min(min_dist, std::abs(roots[i].location - target.location));
    }
    if (std::isfinite(min_dist) && !(epsilon < 1e-2 * min_dist))
        throw EpsilonTooLarge(
            "cluster_experiment: epsilon must stay below 1e-2 of the nearest root distance");

    std::vector<RootEntry> perturbed;
    for (size_t i = 0; i < roots.size(); ++i) {
        if (static_cast<int>(i) == root_index) continue;
        perturbed.push_back(roots[i]);
    }
    const int m = target.multiplicity;
    for (int j = 0; j < m; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / m;
        perturbed.push_back(
            {target.location + epsilon * Complex(std::cos(phi), std::sin(phi)), 1});
    }

    VerificationReport base_report = verify_instance(base, cfg);

    // The split moves each critical modulus by O(epsilon^2) at most, far less
    // than the bracket width, so the base levels remain valid for the
    // perturbed instance and the verdicts line up level-for-level.
    VerifyConfig perturbed_cfg = cfg;
    perturbed_cfg.explicit_levels = base_report.levels;
    VerificationReport perturbed_report = verify_instance(Instance(perturbed), perturbed_cfg);

    return {std::move(base_report), std::move(perturbed_report)};
}

}  // namespace lemni
