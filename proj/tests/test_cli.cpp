#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = FLATCRIT_CLI;
const std::string kFixtures = FLATCRIT_FIXTURES;

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) r.out += buf;
    int status = pclose(pipe);
    r.code = WEXITSTATUS(status);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string tmp(const std::string& name) { return "/tmp/flatcrit_test_" + name; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate: clean fixture exits 0, broken exits 2 naming the violation") {
    auto good = run("validate --surface " + kFixtures + "/torus.tsf --report " +
                    tmp("v.json"));
    CHECK(good.code == 0);
    CHECK(good.out.find("valid") != std::string::npos);

    auto bad = run("validate --surface " + kFixtures + "/broken.tsf --report " +
                   tmp("vb.json"));
    CHECK(bad.code == 2);
    CHECK(bad.out.find("holonomy mismatch") != std::string::npos);
    CHECK(bad.out.find("edge") != std::string::npos);
}

TEST_CASE("criterion matches the closed form and runs fast") {
    auto r = run("criterion --surface " + kFixtures + "/torus.tsf --T 5 --report " +
                 tmp("c.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("0.4999773") != std::string::npos);
    std::string json = slurp(tmp("c.json"));
    CHECK(json.find("\"command\": \"criterion\"") != std::string::npos);
    CHECK(json.find("integral") != std::string::npos);
}

TEST_CASE("systole-curve emits the csv contract") {
    auto r = run("systole-curve --surface " + kFixtures + "/octagon.tsf --T 3 --out " +
                 tmp("curve.csv") + " --report " + tmp("sc.json"));
    CHECK(r.code == 0);
    std::string csv = slurp(tmp("curve.csv"));
    CHECK(csv.rfind("t,delta_prime,d_prime,integral_to_t\n", 0) == 0);
}

TEST_CASE("area prints the exact value") {
    auto r = run("area --surface " + kFixtures + "/octagon.tsf --report " + tmp("a.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("2 + 2*sqrt(2)") != std::string::npos);
}

TEST_CASE("veech-verify accepts the shipped certificates") {
    auto r = run("veech-verify --surface " + kFixtures + "/torus.tsf --cert " + kFixtures +
                 "/torus-shear.cert --report " + tmp("vv.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("verifies exactly") != std::string::npos);

    auto rc = run("veech-verify --surface " + kFixtures + "/chamanara5.tsf --cert " +
                  kFixtures + "/chamanara-baker.cert --report " + tmp("vc.json"));
    CHECK(rc.code == 0);
    CHECK(rc.out.find("verifies exactly") != std::string::npos);
    CHECK(rc.out.find("truncated") != std::string::npos);
}

TEST_CASE("seeded commands refuse to run without a seed") {
    auto r = run("escape --surface " + kFixtures + "/chamanara5.tsf --T 5 --samples 10");
    CHECK(r.code != 0);
    CHECK(r.out.find("--seed") != std::string::npos);
}

TEST_CASE("flow subcommand traces and reports status") {
    auto r = run("flow --surface " + kFixtures + "/torus.tsf --start 0:1/3,1/7 "
                 "--direction 1,1 --length 5 --out " +
                 tmp("traj.csv") + " --report " + tmp("f.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("completed") != std::string::npos);
    CHECK(slurp(tmp("traj.csv")).rfind("segment,polygon,", 0) == 0);
}

TEST_CASE("thm12 reports the integral and a verdict") {
    auto r = run("thm12 --profile " + kFixtures + "/profile-const.csv --report " +
                 tmp("t12.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("0.001") != std::string::npos);
}

TEST_CASE("chamanara round-trips through the surface format") {
    auto r = run("chamanara --level 3 --out " + tmp("cham3.tsf") + " --report " +
                 tmp("ch.json"));
    CHECK(r.code == 0);
    auto v = run("validate --surface " + tmp("cham3.tsf") + " --report " + tmp("chv.json"));
    CHECK(v.code == 0);
}

TEST_CASE("plots are deterministic byte-for-byte") {
    run("systole-curve --surface " + kFixtures + "/torus.tsf --T 2 --out " + tmp("p.csv") +
        " --report " + tmp("p.json"));
    auto p1 = run("plot --csv " + tmp("p.csv") + " --kind systole --out " + tmp("p1.svg"));
    auto p2 = run("plot --csv " + tmp("p.csv") + " --kind systole --out " + tmp("p2.svg"));
    CHECK(p1.code == 0);
    CHECK(p2.code == 0);
    std::string svg1 = slurp(tmp("p1.svg"));
    CHECK(svg1 == slurp(tmp("p2.svg")));
    CHECK(svg1.find("<polyline") != std::string::npos);

    std::ofstream empty(tmp("empty.csv"));
    empty << "t,delta_prime\n";
    empty.close();
    auto pe = run("plot --csv " + tmp("empty.csv") + " --kind systole --out " + tmp("pe.svg"));
    CHECK(pe.code == 2);
    CHECK(pe.out.find("no rows") != std::string::npos);
}

TEST_CASE("equidist emits histogram json and an svg renders from it") {
    auto r = run("equidist --surface " + kFixtures +
                 "/torus.tsf --direction '1,1/2+1/2*sqrt(5)' --T 500 --bins 5 --seed 9 --out " +
                 tmp("hist.json") + " --report " + tmp("eq.json"));
    CHECK(r.code == 0);
    auto p = run("plot --csv " + tmp("hist.json") + " --kind histogram --out " +
                 tmp("hist.svg"));
    CHECK(p.code == 0);
    CHECK(slurp(tmp("hist.svg")).find("<rect") != std::string::npos);
}

TEST_CASE("reports serialize floats at 17 significant digits") {
    run("criterion --surface " + kFixtures + "/torus.tsf --T 2 --report " + tmp("r17.json"));
    std::string json = slurp(tmp("r17.json"));
    // (1 - e^-4)/2 to 17 digits
    CHECK(json.find("0.49084218055563289") != std::string::npos);
}

TEST_CASE("reports conform to the published schema") {
    run("area --surface " + kFixtures + "/torus.tsf --report " + tmp("schema.json"));
    auto rep = nlohmann::json::parse(slurp(tmp("schema.json")));
    auto schema = nlohmann::json::parse(slurp(std::string(FLATCRIT_FIXTURES) +
                                              "/../../docs/report.schema.json"));
    for (const auto& key : schema["required"]) CHECK(rep.contains(key.get<std::string>()));
    CHECK(rep["command"].is_string());
    CHECK(rep["inputs_digest"].is_string());
    CHECK(rep["inputs_digest"].get<std::string>().size() == 16);
    CHECK(rep["outputs"].is_array());
    for (const auto& o : rep["outputs"]) {
        CHECK(o.contains("name"));
        CHECK(o.contains("value"));
        CHECK(o.contains("unit"));
        CHECK(o["value"].is_number());
    }
    CHECK(rep["warnings"].is_array());
}

TEST_CASE("exit 3 on precondition violations") {
    auto r = run("criterion --surface " + kFixtures + "/torus.tsf --T -1 --report " +
                 tmp("neg.json"));
    CHECK(r.code == 3);
}

}  // TEST_SUITE
