#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <curvhom/cli.hpp>

using namespace curvhom;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"curvhom"};
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(int(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

ordered_json results_of(const CliRun& r) {
    return ordered_json::parse(r.out)["results"];
}

struct TempScenario {
    std::string path;
    explicit TempScenario(const std::string& text) : path("curvhom_cli_test_tmp.scn") {
        std::ofstream f(path);
        f << text;
    }
    ~TempScenario() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("usage errors exit with code 2") {
    REQUIRE(run({}).code == 2);
    REQUIRE(run({"frobnicate"}).code == 2);
    REQUIRE(run({"jacobi", "--p", "1"}).code == 2); // scenario-file task, not a subcommand

    CliRun k9 = run({"stabdim", "--p", "1", "--k", "9"});
    REQUIRE(k9.code == 2);
    REQUIRE(k9.err.find("--k must lie in [0, 3]") != std::string::npos);

    REQUIRE(run({"model", "--p", "1", "--k", "13"}).code == 2);
    REQUIRE(run({"okp", "--p", "2", "--k", "3"}).code == 2);
    REQUIRE(run({"stabdim", "--p", "0", "--k", "0"}).code == 2);
    REQUIRE(run({"verify-thm15"}).code == 2); // --p is required

    CliRun badf = run({"curvature", "--p", "1", "--F", "q+1"});
    REQUIRE(badf.code == 2);
    REQUIRE(badf.err.find("unexpected character 'q'") != std::string::npos);

    CliRun badat = run({"curvature", "--p", "1", "--k", "1", "--at", "q=1"});
    REQUIRE(badat.code == 2);
    REQUIRE(badat.err.find("unknown coordinate 'q'") != std::string::npos);

    CliRun nof = run({"run", "no_such_file.scn"});
    REQUIRE(nof.code == 2);
    REQUIRE(nof.err.find("cannot open") != std::string::npos);
}

TEST_CASE("help text") {
    CliRun h = run({"--help"});
    REQUIRE(h.code == 0);
    REQUIRE(h.out.find("curvature") != std::string::npos);
    REQUIRE(h.out.find("verify-thm15") != std::string::npos);
    REQUIRE(h.out.find("okp") != std::string::npos);
}

TEST_CASE("stabdim output") {
    CliRun j = run({"stabdim", "--p", "1", "--k", "1", "--format", "json"});
    REQUIRE(j.code == 0);
    ordered_json res = results_of(j);
    REQUIRE(res[0]["status"] == "ok");
    REQUIRE(res[0]["values"]["dim"] == 15);
    REQUIRE(res[0]["values"]["closed_under_bracket"] == true);

    CliRun t = run({"stabdim", "--p", "1", "--k", "1"});
    REQUIRE(t.code == 0);
    REQUIRE(t.out.find("task: stabdim\n") != std::string::npos);
    REQUIRE(t.out.find("dim: 15\n") != std::string::npos);
    REQUIRE(t.out.find("closed_under_bracket: true\n") != std::string::npos);

    CliRun aff = run({"stabdim", "--p", "2", "--k", "2", "--affine", "--format", "json"});
    REQUIRE(aff.code == 0);
    REQUIRE(results_of(aff)[0]["values"]["dim"] == 8);
}

TEST_CASE("dimension table subcommand reports the mismatch") {
    CliRun j = run({"verify-thm15", "--p", "1", "--format", "json"});
    REQUIRE(j.code == 1);
    ordered_json res = results_of(j);
    REQUIRE(res[0]["status"] == "fail");
    REQUIRE(res[0]["message"] == "computed dimensions differ from the closed formulas");
    ordered_json rows = res[0]["values"]["rows"];
    REQUIRE(rows.size() == 5);
    REQUIRE(rows[0]["pass"] == true);
    REQUIRE(rows[0]["computed"] == 31);
    REQUIRE(rows[1]["pass"] == false);
    REQUIRE(rows[1]["computed"] == 25);
    REQUIRE(rows[1]["formula"] == 29);
    REQUIRE(rows[4]["k"] == "psi");
    REQUIRE(rows[4]["computed"] == 22);

    CliRun t = run({"verify-thm15", "--p", "1"});
    REQUIRE(t.code == 1);
    REQUIRE(t.out.find("k      computed  formula  pass") != std::string::npos);
    REQUIRE(t.out.find("yes") != std::string::npos);
    REQUIRE(t.out.find("NO") != std::string::npos);
}

TEST_CASE("alpha and okp subcommands") {
    CliRun a = run({"alpha", "--p", "1", "--psi", "exp(y)+exp(2*y)", "--nu", "2",
                    "--format", "json"});
    REQUIRE(a.code == 0);
    ordered_json res = results_of(a);
    REQUIRE(res[0]["status"] == "ok");
    REQUIRE(res[0]["values"]["exact_alpha"] == "1105/1089");

    CliRun o = run({"okp", "--p", "2", "--k", "1", "--format", "json"});
    REQUIRE(o.code == 0);
    ordered_json ores = results_of(o);
    REQUIRE(ores[0]["values"]["dim"] == 3);
    REQUIRE(ores[0]["values"]["orbit_rank"] == 2);
    REQUIRE(ores[0]["values"]["pass"] == true);

    CliRun c = run({"classify-psi", "--p", "1", "--psi", "exp(y)+exp(2*y)",
                    "--format", "json"});
    REQUIRE(c.code == 0);
    REQUIRE(results_of(c)[0]["values"]["verdict"] == "admissible-nonhomogeneous");
}

TEST_CASE("model extraction subcommand") {
    CliRun m = run({"model", "--p", "1", "--k", "0", "--format", "json"});
    REQUIRE(m.code == 0);
    ordered_json res = results_of(m);
    REQUIRE(res[0]["values"]["exact"] == true);
    REQUIRE(res[0]["values"]["model"]["tensors"][0]["entries"].size() == 16);

    CliRun c = run({"curvature", "--p", "1", "--k", "1", "--order", "1",
                    "--check-closed-form", "--format", "json"});
    REQUIRE(c.code == 0);
    REQUIRE(results_of(c)[0]["values"]["closed_form"] == "pass");
}

TEST_CASE("output is deterministic") {
    std::vector<std::string> argv = {"stabdim", "--p", "1", "--k", "1", "--format", "json"};
    CliRun one = run(argv), two = run(argv);
    REQUIRE(one.out == two.out);
    REQUIRE(one.code == two.code);

    std::vector<std::string> om = {"orbit-map", "--p", "1", "--k", "0", "--format", "json"};
    CliRun o1 = run(om), o2 = run(om);
    REQUIRE(o1.out == o2.out);
    REQUIRE(o1.code == 0);
}

TEST_CASE("seed sources") {
    unsetenv("CURVHOM_SEED");
    CliRun def = run({"orbit-map", "--p", "1", "--k", "0", "--format", "json"});
    std::string def_xi = ordered_json::parse(def.out)["scenario"]["tasks"][0]["options"]["xi"];
    REQUIRE(def_xi == cli_detail::xi_text(cli_detail::random_xi(12345, 5)));

    CliRun s7a = run({"orbit-map", "--p", "1", "--k", "0", "--seed", "7", "--format", "json"});
    CliRun s7b = run({"orbit-map", "--p", "1", "--k", "0", "--seed", "7", "--format", "json"});
    REQUIRE(s7a.out == s7b.out);
    std::string s7_xi = ordered_json::parse(s7a.out)["scenario"]["tasks"][0]["options"]["xi"];
    REQUIRE(s7_xi == cli_detail::xi_text(cli_detail::random_xi(7, 5)));
    REQUIRE(s7_xi != def_xi);

    setenv("CURVHOM_SEED", "777", 1);
    CliRun env = run({"orbit-map", "--p", "1", "--k", "0", "--format", "json"});
    std::string env_xi = ordered_json::parse(env.out)["scenario"]["tasks"][0]["options"]["xi"];
    REQUIRE(env_xi == cli_detail::xi_text(cli_detail::random_xi(777, 5)));

    CliRun beats = run({"orbit-map", "--p", "1", "--k", "0", "--seed", "9", "--format", "json"});
    std::string beats_xi =
        ordered_json::parse(beats.out)["scenario"]["tasks"][0]["options"]["xi"];
    REQUIRE(beats_xi == cli_detail::xi_text(cli_detail::random_xi(9, 5)));
    unsetenv("CURVHOM_SEED");

    // an explicit --xi bypasses the seed entirely
    CliRun fixed = run({"orbit-map", "--p", "1", "--k", "1", "--xi", "1,0,0,1,0",
                        "--format", "json"});
    REQUIRE(fixed.code == 0);
    ordered_json fres = results_of(fixed);
    REQUIRE(fres[0]["values"]["status"] == "verified");
}

TEST_CASE("scenario files run end to end") {
    TempScenario ok(
        "p = 1\n"
        "family = Mk\n"
        "k = 1\n"
        "task.1 = stabdim affine=true\n"
        "task.2 = jacobi xi=1,0,0,0,0\n");
    CliRun r = run({"run", ok.path});
    REQUIRE(r.code == 0);
    ordered_json res = results_of(r);
    REQUIRE(res.size() == 2);
    REQUIRE(res[0]["values"]["dim"] == 5);
    REQUIRE(res[1]["values"]["rank"] == 4);
    REQUIRE(res[1]["values"]["signature"]["positive"] == 2);

    CliRun table = run({"run", ok.path, "--format", "table"});
    REQUIRE(table.code == 0);
    REQUIRE(table.out.find("task: stabdim") != std::string::npos);
    REQUIRE(table.out.find("task: jacobi") != std::string::npos);

    TempScenario failing(
        "p = 1\n"
        "family = Mk\n"
        "k = 1\n"
        "task.1 = orbit-map xi=1,1,0,0,0 k=1\n");
    CliRun f = run({"run", failing.path});
    REQUIRE(f.code == 1);
    REQUIRE(results_of(f)[0]["status"] == "fail");

    TempScenario broken("p = 1\nfamily = Mk\nk = 9\n");
    CliRun b = run({"run", broken.path});
    REQUIRE(b.code == 2);
    REQUIRE(b.err.find("k must lie in [0, 3]") != std::string::npos);
}
