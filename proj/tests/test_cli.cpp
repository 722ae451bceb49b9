#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <json.hpp>

#include "lemni/json_io.hpp"

namespace {

const std::string kBin = LEMNI_BIN;
const std::string kFixtures = LEMNI_FIXTURE_DIR;

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) { return lemni::read_text_file(path); }

}  // namespace

TEST_CASE("gen writes a valid instance and is byte-deterministic") {
    CHECK(run("gen --n 2 --seed 7 --out cli_a.json > /dev/null") == 0);
    CHECK(run("gen --n 2 --seed 7 --out cli_b.json > /dev/null") == 0);
    CHECK(slurp("cli_a.json") == slurp("cli_b.json"));

    const auto j = nlohmann::json::parse(slurp("cli_a.json"));
    CHECK(j["schema_version"] == "1");
    CHECK(j["seed"] == 7);
    REQUIRE(j["roots"].size() == 2);
    for (const auto& r : j["roots"]) {
        const double re = r["re"].get<double>(), im = r["im"].get<double>();
        CHECK(re * re + im * im < 1.0);
        CHECK(r["multiplicity"] == 1);
    }
}

TEST_CASE("gen usage errors") {
    CHECK(run("gen --n 0 2> /dev/null") == 2);
    CHECK(run("gen 2> /dev/null") == 2);                      // --n required
    CHECK(run("gen --n 2 --bogus 1 2> /dev/null") == 2);      // unknown flag
    CHECK(run("2> /dev/null") == 2);                          // subcommand required
    CHECK(run("--version > /dev/null") == 0);
}

TEST_CASE("verify a committed fixture") {
    CHECK(run("verify --input " + kFixtures + "/z2m1.json --out cli_r.json 2> /dev/null") == 0);
    const auto j = nlohmann::json::parse(slurp("cli_r.json"));
    CHECK(j["schema_version"] == "1");
    CHECK(j["overall_pass"] == true);
    CHECK(j["staircase_compact"] == "2,1");
    CHECK(j["verdicts"].size() == 6);
    CHECK(j["grid_used"] == 512);
}

TEST_CASE("verify handles ties and inline generation") {
    CHECK(run("verify --input " + kFixtures + "/three_roots.json --out cli_t.json 2> /dev/null") ==
          0);
    const auto j = nlohmann::json::parse(slurp("cli_t.json"));
    CHECK(j["overall_pass"] == true);
    CHECK(j["skipped_levels"].size() == 1);
    CHECK(j["ladder"]["degenerate"] == true);

    CHECK(run("verify --n 2 --seed 7 --out cli_g.json 2> /dev/null") == 0);
}

TEST_CASE("verify batch mode") {
    CHECK(run("verify --trials 3 --degrees 2:3 --seed 11 --out cli_batch.json 2> /dev/null") == 0);
    const auto j = nlohmann::json::parse(slurp("cli_batch.json"));
    CHECK(j["n_trials"] == 3);
    CHECK(j["n_pass"] == 3);
    CHECK(j["trials"].size() == 3);

    CHECK(run("verify --trials 3 --seed 11 2> /dev/null") == 2);  // missing --degrees
    CHECK(run("verify 2> /dev/null") == 2);                       // no mode selected
}

TEST_CASE("corrupted input exits 3") {
    lemni::write_text_file("cli_bad.json", "{\"roots\": [ oops");
    CHECK(run("verify --input cli_bad.json 2> /dev/null > /dev/null") == 3);
    CHECK(run("verify --input cli_missing_file.json 2> /dev/null > /dev/null") == 3);
}

TEST_CASE("critical ladder output") {
    CHECK(run("critical --input " + kFixtures + "/z2m1.json --out cli_c1.json") == 0);
    auto j = nlohmann::json::parse(slurp("cli_c1.json"));
    REQUIRE(j["critical_points"].size() == 1);
    CHECK(std::abs(j["critical_points"][0]["re"].get<double>()) <= 1e-10);
    CHECK(std::abs(j["critical_points"][0]["log_critical_modulus"].get<double>()) <= 1e-10);
    CHECK(j["degenerate"] == false);

    // Multiple root: the -inf modulus renders as null.
    CHECK(run("critical --input " + kFixtures + "/z3.json --out cli_c2.json") == 0);
    j = nlohmann::json::parse(slurp("cli_c2.json"));
    REQUIRE(j["critical_points"].size() == 1);
    CHECK(j["critical_points"][0]["multiplicity"] == 2);
    CHECK(j["critical_points"][0]["log_critical_modulus"].is_null());

    CHECK(run("critical --input " + kFixtures + "/three_roots.json --out cli_c3.json") == 0);
    j = nlohmann::json::parse(slurp("cli_c3.json"));
    CHECK(j["degenerate"] == true);
}

TEST_CASE("plot emits deterministic SVG") {
    const std::string levels = "-0.6931471805599453,0.4054651081081644";  // ln .5, ln 1.5
    CHECK(run("plot --input " + kFixtures + "/z2m1.json --levels " + levels +
              " --out cli_p1.svg") == 0);
    CHECK(run("plot --input " + kFixtures + "/z2m1.json --levels " + levels +
              " --out cli_p2.svg") == 0);
    const std::string svg = slurp("cli_p1.svg");
    CHECK(svg == slurp("cli_p2.svg"));

    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    // Two lobes at the low level + one outer curve at the high level.
    size_t polygons = 0, pos = 0;
    while ((pos = svg.find("<polygon", pos)) != std::string::npos) {
        ++polygons;
        pos += 8;
    }
    CHECK(polygons == 3);
    // Both zeros drawn as red dots.
    size_t circles = 0;
    pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) {
        ++circles;
        pos += 7;
    }
    CHECK(circles == 2);
    CHECK(svg.find("#cc0000") != std::string::npos);
    CHECK(svg.find("ln|f|") != std::string::npos);            // legend
    CHECK(svg.find("--show-critical") == std::string::npos);  // sanity

    CHECK(run("plot --input " + kFixtures + "/z2m1.json --levels auto --show-critical "
              "--out cli_p3.svg") == 0);
    CHECK(slurp("cli_p3.svg").find("<line") != std::string::npos);  // critical cross
}

TEST_CASE("instance files round-trip losslessly") {
    CHECK(run("gen --n 5 --seed 123456789 --out cli_rt1.json > /dev/null") == 0);
    const lemni::Instance inst = lemni::read_instance_file("cli_rt1.json");
    lemni::write_text_file("cli_rt2.json", lemni::write_instance_text(inst));
    const lemni::Instance again = lemni::read_instance_file("cli_rt2.json");
    lemni::write_text_file("cli_rt3.json", lemni::write_instance_text(again));
    // First rewrite may drop the seed field; after that the bytes are stable.
    CHECK(slurp("cli_rt2.json") == slurp("cli_rt3.json"));
    CHECK(inst.digest() == again.digest());
    for (int i = 0; i < inst.distinct_count(); ++i)
        CHECK(inst.roots()[i].location == again.roots()[i].location);
}

TEST_CASE("golden fixtures stay byte-identical") {
    const struct {
        const char* args;
        const char* golden;
    } cases[] = {
        {"gen --n 2 --seed 1 --out cli_gold_a.json > /dev/null", "gen_n2_s1.json"},
        {"gen --n 3 --seed 7 --out cli_gold_b.json > /dev/null", "gen_n3_s7.json"},
        {"gen --n 5 --seed 42 --out cli_gold_c.json > /dev/null", "gen_n5_s42.json"},
    };
    int idx = 0;
    for (const auto& c : cases) {
        CHECK(run(c.args) == 0);
        const std::string produced =
            std::string("cli_gold_") + static_cast<char>('a' + idx) + ".json";
        CHECK(slurp(produced) == slurp(kFixtures + "/" + c.golden));
        ++idx;
    }
}
