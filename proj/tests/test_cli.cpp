#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "movsing/cli.hpp"

using namespace movsing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("analyze is byte-for-byte deterministic") {
    const auto a = run({"analyze"});
    const auto b = run({"analyze"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(parse(a)["schema_version"] == "1.0");
}

TEST_CASE("analyze reports the branch family and the pole-family verdict") {
    const auto r = run({"analyze", "--ode", "y'' + omega^2*y - y^-3", "--param", "omega=1", "--order", "12"});
    REQUIRE(r.code == 0);
    const auto j = parse(r);
    CHECK(j["consistent_family_count"] == 1);
    bool half = false;
    for (const auto& f : j["families"])
        if (f["consistent"].get<bool>()) half = f["p"] == "1/2";
    CHECK(half);
    CHECK(j["claimed_pole_family"]["consistent"] == false);
    CHECK(j["claimed_pole_family"]["q_uncleared"] == "-3");
    CHECK(j["coefficient_comparison"]["rows"].size() == 5);
}

TEST_CASE("verify-exact pinney example") {
    const auto r = run({"verify-exact", "--case", "pinney", "--A", "2", "--B", "1", "--C", "1", "--omega", "1"});
    REQUIRE(r.code == 0);
    const auto p = parse(r)["pinney"];
    CHECK(p["ep_residual_max"].get<double>() < 1e-8);
    CHECK(p["constraint"]["verdict"] == "AC-B^2 convention");
}

TEST_CASE("probe example") {
    const auto r = run({"probe", "--omega", "0", "--ic", "1,0", "--path", "0:0.999i"});
    REQUIRE(r.code == 0);
    const auto j = parse(r);
    const auto t = j["t_star"][0];
    CHECK(std::abs(t[0].get<double>()) < 1e-3);
    CHECK(std::abs(t[1].get<double>() - 1.0) < 1e-3);
    CHECK(std::abs(j["runs"][0]["exponent"]["nu"].get<double>() - 0.5) < 0.02);
    CHECK(j["confinement"]["conjugate_pair"] == true);
}

TEST_CASE("series subcommand with forcing and free values") {
    const auto r = run({"series", "--family", "-1", "--force", "--leading", "1i", "--order", "4"});
    REQUIRE(r.code == 0);
    CHECK(parse(r)["local_series"]["forced"] == true);
    CHECK(run({"series", "--family", "-1"}).code == 2);
    const auto f = run({"series", "--free", "1=0.5"});
    REQUIRE(f.code == 0);
    CHECK(parse(f)["local_series"]["free_parameters"][0]["value"][0] == 0.5);
}

TEST_CASE("text format and output file") {
    const auto r = run({"verify-exact", "--case", "mobius", "--format", "text"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("schema_version = \"1.0\"") != std::string::npos);
    CHECK(r.out.find("mobius.degenerate_rejected = true") != std::string::npos);
}

TEST_CASE("exit codes for input errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"analyze", "--bogus"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"analyze", "--ode", "@/nonexistent/file.ode"}).code == 2);
    CHECK(run({"analyze", "--ode", "y'' + q*y"}).code == 2);
    CHECK(run({"analyze", "--ode", "y'' + (y"}).code == 2);
    CHECK(run({"analyze", "--param", "omega"}).code == 2);
    CHECK(run({"verify-exact", "--case", "nope"}).code == 2);
    CHECK(run({"integrate", "--path", "0"}).code == 2);
    CHECK(run({"integrate", "--tol", "1e-3"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("report carries a claims ledger with anchors") {
    const auto r = run({"report"});
    REQUIRE(r.code == 0);
    const auto j = parse(r);
    REQUIRE(j["claims"].is_array());
    for (const auto& c : j["claims"]) {
        CHECK_FALSE(c["anchor"].get<std::string>().empty());
        const auto s = c["status"].get<std::string>();
        CHECK((s == "confirmed" || s == "refuted" || s == "not-applicable"));
    }
}
