#include "lemni/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lemni/errors.hpp"

namespace lemni {

namespace {

using ordered = nlohmann::ordered_json;

// -inf (the log-modulus at a root) has no JSON number; it serializes as null.
ordered log_value(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

ordered instance_to_json(const Instance& inst, std::optional<std::uint64_t> seed) {
    ordered j;
    j["schema_version"] = "1";
    if (seed) j["seed"] = *seed;
    ordered roots = ordered::array();
    for (const auto& r : inst.roots()) {
        ordered e;
        e["re"] = r.location.real();
        e["im"] = r.location.imag();
        e["multiplicity"] = r.multiplicity;
        roots.push_back(std::move(e));
    }
    j["degree"] = inst.degree();
    j["digest"] = inst.digest();
    j["roots"] = std::move(roots);
    return j;
}

Instance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("roots") || !j["roots"].is_array())
        throw std::invalid_argument("instance_from_json: expected object with a roots array");
    std::vector<RootEntry> roots;
    for (const auto& e : j["roots"]) {
        RootEntry r;
        r.location = Complex(e.at("re").get<double>(), e.at("im").get<double>());
        r.multiplicity = e.value("multiplicity", 1);
        roots.push_back(r);
    }
    return Instance(roots);
}

std::string write_instance_text(const Instance& inst, std::optional<std::uint64_t> seed) {
    return instance_to_json(inst, seed).dump(2) + "\n";
}

Instance read_instance_file(const std::string& path, std::optional<std::uint64_t>* seed_out) {
    const std::string text = read_text_file(path);
    const nlohmann::json j = nlohmann::json::parse(text);
    if (seed_out) {
        *seed_out = std::nullopt;
        if (j.contains("seed") && j["seed"].is_number_unsigned())
            *seed_out = j["seed"].get<std::uint64_t>();
    }
    return instance_from_json(j);
}

ordered ladder_to_json(const CriticalLadder& ladder, const BracketSet& brackets) {
    ordered j;
    j["schema_version"] = "1";
    j["total_multiplicity"] = ladder.total_multiplicity;
    ordered pts = ordered::array();
    for (const auto& p : ladder.points) {
        ordered e;
        e["re"] = p.location.real();
        e["im"] = p.location.imag();
        e["multiplicity"] = p.multiplicity;
        e["log_critical_modulus"] = log_value(p.log_critical_modulus);
        e["residual"] = p.residual;
        pts.push_back(std::move(e));
    }
    j["critical_points"] = std::move(pts);
    ordered rungs = ordered::array();
    for (const auto& r : brackets.rungs) {
        ordered e;
        e["log_modulus"] = r.log_modulus;
        e["merge_multiplicity"] = r.merge_multiplicity;
        e["tied"] = r.tied;
        e["point_indices"] = r.point_indices;
        rungs.push_back(std::move(e));
    }
    j["rungs"] = std::move(rungs);
    bool degenerate = false;
    for (const auto& r : brackets.rungs) degenerate = degenerate || r.tied;
    j["degenerate"] = degenerate;
    ordered br = ordered::array();
    for (const auto& b : brackets.brackets) {
        ordered e;
        e["lo"] = b.lo;
        e["hi"] = b.hi;
        e["center"] = b.center;
        e["merge_multiplicity"] = b.merge_multiplicity;
        br.push_back(std::move(e));
    }
    j["brackets"] = std::move(br);
    j["delta"] = brackets.delta;
    return j;
}

ordered report_to_json(const VerificationReport& report) {
    ordered j;
    j["schema_version"] = "1";
    j["digest"] = report.digest;
    j["instance"] = instance_to_json(report.instance);
    j["ladder"] = ladder_to_json(report.ladder, report.brackets);
    j["levels"] = report.levels;
    ordered skipped = ordered::array();
    for (const auto& s : report.skipped) {
        ordered e;
        e["level"] = s.level;
        e["reason"] = s.reason;
        skipped.push_back(std::move(e));
    }
    j["skipped_levels"] = std::move(skipped);
    ordered verdicts = ordered::array();
    for (const auto& v : report.verdicts) {
        ordered e;
        e["level"] = v.level;
        e["component"] = v.component_index;
        e["n_f"] = v.n_f;
        e["n_fprime"] = v.n_fprime;
        e["macdonald_ok"] = v.macdonald_ok;
        e["count_agreement"] = v.count_agreement;
        e["residual_f"] = v.residual_f;
        e["residual_fprime"] = v.residual_fprime;
        if (!v.note.empty()) e["note"] = v.note;
        verdicts.push_back(std::move(e));
    }
    j["verdicts"] = std::move(verdicts);
    ordered staircase = ordered::array();
    for (const auto& s : report.staircase) {
        ordered e;
        e["level"] = s.level;
        e["components"] = s.component_count;
        staircase.push_back(std::move(e));
    }
    j["staircase"] = std::move(staircase);
    j["staircase_compact"] = staircase_compact(report);
    j["overall_pass"] = report.overall_pass;
    j["grid_used"] = report.grid_used;
    ordered timing;
    timing["solver_ms"] = report.solver_ms;
    timing["topology_ms"] = report.topology_ms;
    timing["counting_ms"] = report.counting_ms;
    timing["total_ms"] = report.total_ms;
    j["timing"] = std::move(timing);
    return j;
}

ordered batch_to_json(const BatchSummary& batch) {
    ordered j;
    j["schema_version"] = "1";
    j["n_trials"] = batch.n_trials;
    j["n_pass"] = batch.n_pass;
    j["seed"] = batch.seed;
    j["degree_min"] = batch.degree_range.first;
    j["degree_max"] = batch.degree_range.second;
    j["total_verdicts"] = batch.total_verdicts();
    j["total_agreements"] = batch.total_agreements();
    j["median_residual"] = batch.median_residual();
    ordered trials = ordered::array();
    for (const auto& t : batch.trials) {
        ordered e;
        e["trial"] = t.trial;
        e["instance_seed"] = t.instance_seed;
        e["degree"] = t.degree;
        e["distinct_roots"] = t.distinct_roots;
        e["digest"] = t.digest;
        e["pass"] = t.pass;
        e["all_macdonald"] = t.all_macdonald;
        e["all_agreement"] = t.all_agreement;
        e["had_ties"] = t.had_ties;
        e["staircase"] = t.staircase_counts;
        e["bracket_multiplicities"] = t.bracket_multiplicities;
        e["verdicts"] = t.verdict_count;
        e["agreements"] = t.agreement_count;
        if (!t.error.empty()) e["error"] = t.error;
        trials.push_back(std::move(e));
    }
    j["trials"] = std::move(trials);
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_text_file: cannot open " + path);
    out << text;
    if (!out) throw Error("write_text_file: short write to " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_text_file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace lemni
