#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "specdet/cli.hpp"
#include "specdet/table.hpp"
#include "specdet/types.hpp"

using namespace specdet;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "")
        : path("/tmp/specdet_test_" + name) {
        if (!content.empty()) {
            std::ofstream out(path);
            out << content;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("regdet subcommand on bundled and file spectra") {
    TempFile out("regdet.csv");
    CHECK(run({"regdet", "--model", "integers", "--out", out.path,
               "--format", "csv"}) == 0);
    Table t = parse_csv(slurp(out.path));
    CHECK(t.rows[0][0] == doctest::Approx(2.5066282746310005).epsilon(1e-10));

    TempFile spec("finite.json", R"({"epsilon": 1.0, "k": 1, "entries": [
        {"re": 2.0, "mult": 1}, {"re": 3.0, "mult": 1}]})");
    TempFile out2("regdet2.csv");
    CHECK(run({"regdet", "--spectrum", spec.path, "--out", out2.path}) == 0);
    CHECK(parse_csv(slurp(out2.path)).rows[0][0] ==
          doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("exit codes distinguish input from numeric failures") {
    CHECK(run({"regdet", "--model", "no-such-model"}) == 2);
    CHECK(run({"regdet", "--spectrum", "/nonexistent.json"}) == 2);
    CHECK(run({"nonsense-subcommand"}) == 2);
    CHECK(run({"charfn", "--model", "circle-full"}) == 2);  // missing lambda
    CHECK(run({"l2det", "--model", "flat"}) == 2);  // missing lengths
    CHECK(run({"regdet", "--model", "integers", "--tol-rel", "-1"}) == 2);
    // Numeric nonconvergence: an expansion window too small for the job.
    TempFile spec("bad_exp.json", R"({"epsilon": 1.0, "k": 1, "entries": [
        {"re": 1.0, "mult": 2}]})");
    TempFile exp("exp.json",
                 R"({"terms":[{"alpha":-0.5,"c_re":1.0}],
                     "remainder":{"C":1.0,"alpha_next":0.0}})");
    CHECK(run({"regdet", "--spectrum", spec.path, "--expansion", exp.path}) ==
          3);
}

TEST_CASE("determinism: identical runs produce byte-identical outputs") {
    TempFile a("det_a.csv"), b("det_b.csv");
    const std::vector<std::string> args{
        "tower",  "--model", "circle", "--lambda", "1",
        "--levels", "1,2,4",  "--experiment", "det", "--format", "csv"};
    auto with_out = [&](const std::string& p) {
        auto v = args;
        v.push_back("--out");
        v.push_back(p);
        return v;
    };
    CHECK(run(with_out(a.path)) == 0);
    CHECK(run(with_out(b.path)) == 0);
    const std::string ca = slurp(a.path);
    CHECK(ca == slurp(b.path));
    CHECK(!ca.empty());
    // Last gap beats the first (tower example from the interface contract).
    Table t = parse_csv(ca);
    CHECK(t.rows.back()[4] < t.rows.front()[4]);
}

TEST_CASE("CSV round-trips through the loader at full precision") {
    Table t;
    t.columns = {"x", "y"};
    t.rows = {{1.0 / 3.0, 2.5066282746310005},
              {1e-300, -4.9406564584124654e-321}};
    Table back = parse_csv(table_to_csv(t));
    REQUIRE(back.rows.size() == 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(back.rows[r][c] == t.rows[r][c]);
    // Empty table: header only.
    Table empty;
    empty.columns = {"a", "b"};
    CHECK(table_to_csv(empty) == "a,b\n");
}

TEST_CASE("json output validates against the documented shape") {
    TempFile out("charfn.json");
    CHECK(run({"charfn", "--model", "circle-full", "--lambda", "1", "--out",
               out.path, "--format", "json"}) == 0);
    const std::string payload = slurp(out.path);
    CHECK(payload.find("\"columns\"") != std::string::npos);
    CHECK(payload.find("\"rows\"") != std::string::npos);
    CHECK(payload.find("det_re") != std::string::npos);
}

TEST_CASE("surface subcommand emits the documented columns") {
    TempFile spec("lengths.json", R"({"genus": 2, "primitives": [
        {"length": 3.0, "count": 2}, {"length": 3.5, "count": 2}]})");
    TempFile out("surface.csv");
    CHECK(run({"surface", "--spectrum", spec.path, "--lambda-grid",
               "0.5:2:4", "--out", out.path}) == 0);
    Table t = parse_csv(slurp(out.path));
    REQUIRE(t.columns.size() == 5);
    CHECK(t.columns[1] == "identity_term");
    CHECK(t.rows.size() == 4);
    for (const auto& row : t.rows) CHECK(row[3] > 0.0);
}

TEST_CASE("tol overrides reach the numeric layer") {
    TempFile out("tol.csv");
    CHECK(run({"charfn", "--model", "circle-full", "--lambda", "1",
               "--tol-rel", "1e-6", "--out", out.path}) == 0);
    Table t = parse_csv(slurp(out.path));
    // The reported error estimate scales with the requested tolerance.
    CHECK(t.rows[0][4] > 1e-5);
}
