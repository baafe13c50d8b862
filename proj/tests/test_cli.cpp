#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "spb/sweep.hpp"

using namespace spb;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    const std::string out_path = "/tmp/spb_cli_test_out.txt";
    const std::string cmd = std::string(SPB_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CmdResult res;
    res.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("bound command exit codes") {
    // finite bound
    auto ok = run_cli("bound --channel bec --p 0.5 --n 1000 --rate-bits 0.3 --bound isp");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("ln P_e >=") != std::string::npos);
    // sp59 needs a Euclidean signal space
    auto usage = run_cli("bound --channel bec --p 0.5 --n 1000 --rate-bits 0.3 --bound sp59");
    CHECK(usage.exit_code == 2);
    // unknown channel
    CHECK(run_cli("bound --channel qam --ebn0-db 1 --n 10 --rate-bits 0.5 --bound isp")
              .exit_code == 2);
    // missing operating point
    CHECK(run_cli("bound --channel bec --n 10 --rate-bits 0.5 --bound isp").exit_code == 2);
    // deep waterfall: tiny but finite, no crash
    auto deep =
        run_cli("bound --channel bpsk-awgn --ebn0-db 20 --n 100 --rate-bits 0.5 --bound isp");
    CHECK((deep.exit_code == 0 || deep.exit_code == 4));
    // trivial outcome reported as exit 4
    auto trivial = run_cli("bound --channel bec --p 0 --n 500 --rate-bits 0.5 --bound isp");
    CHECK(trivial.exit_code == 4);
    CHECK(trivial.output.find("trivial (P_e >= 0)") != std::string::npos);
}

TEST_CASE("bound command json output") {
    auto r = run_cli("--json bound --channel bec --p 0.4 --n 800 --rate-bits 0.35 --bound vf");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["status"] == "ok");
    CHECK(j["bound"] == "vf");
    const double ln_pe = std::stod(j["ln_pe"].get<std::string>());
    CHECK(ln_pe < 0.0);
    CHECK(j["diagnostics"].contains("x_opt"));
    CHECK(j["diagnostics"].contains("composition_penalty"));
}

TEST_CASE("sweep: csv schema, determinism, exit codes") {
    const std::string base =
        "sweep --channel bec --var p --start 0.35 --stop 0.45 --step 0.05 --n 500 "
        "--rate-bits 0.3 --bounds isp,vf,sp67,rcb";
    auto a = run_cli(base + " --out /tmp/spb_sweep_a.csv");
    REQUIRE(a.exit_code == 0);
    const std::string csv = slurp("/tmp/spb_sweep_a.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "var,isp_ln_pe,isp_log10_pe,isp_status,vf_ln_pe,vf_log10_pe,vf_status,"
          "sp67_ln_pe,sp67_log10_pe,sp67_status,rcb_ln_pe,rcb_log10_pe,rcb_status");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
    // byte-identical rerun
    auto b = run_cli(base + " --out /tmp/spb_sweep_b.csv");
    REQUIRE(b.exit_code == 0);
    CHECK(slurp("/tmp/spb_sweep_b.csv") == csv);
    // LF only, no CR
    CHECK(csv.find('\r') == std::string::npos);
    // empty bounds list is a usage error
    CHECK(run_cli("sweep --channel bec --var p --start 0.3 --stop 0.4 --step 0.1 --n 100 "
                  "--rate-bits 0.3 --bounds ''")
              .exit_code == 2);
    // sp59 on bec rejected up front
    CHECK(run_cli("sweep --channel bec --var p --start 0.3 --stop 0.4 --step 0.1 --n 100 "
                  "--rate-bits 0.3 --bounds sp59")
              .exit_code == 2);
    // unwritable output path
    CHECK(run_cli(base + " --out /nonexistent-dir/x.csv").exit_code == 2);
}

TEST_CASE("sweep: json round-trips the csv content") {
    const std::string base =
        "sweep --channel bec --var p --start 0.4 --stop 0.5 --count 3 --n 400 "
        "--rate-bits 0.25 --bounds isp,rcb";
    REQUIRE(run_cli(base + " --out /tmp/spb_sweep.json --format json").exit_code == 0);
    REQUIRE(run_cli(base + " --out /tmp/spb_sweep.csv --format csv").exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp("/tmp/spb_sweep.json"));
    REQUIRE(doc.contains("meta"));
    REQUIRE(doc.contains("rows"));
    CHECK(doc["meta"]["bounds"] == nlohmann::json::array({"isp", "rcb"}));
    // rebuild the CSV from the JSON and compare byte for byte
    std::ostringstream rebuilt;
    rebuilt << "var,isp_ln_pe,isp_log10_pe,isp_status,rcb_ln_pe,rcb_log10_pe,rcb_status\n";
    for (const auto& row : doc["rows"]) {
        rebuilt << row["var"].get<std::string>();
        for (const std::string b : {"isp", "rcb"}) {
            const std::string status = row[b + "_status"].get<std::string>();
            if (status == "ok") {
                rebuilt << "," << row[b + "_ln_pe"].get<std::string>() << ","
                        << row[b + "_log10_pe"].get<std::string>() << ",ok";
            } else {
                rebuilt << ",,," << status;
            }
        }
        rebuilt << "\n";
    }
    CHECK(rebuilt.str() == slurp("/tmp/spb_sweep.csv"));
}

TEST_CASE("sweep config file with flag override") {
    {
        std::ofstream cfg("/tmp/spb_sweep.cfg");
        cfg << "# criterion-style spec\n"
               "channel = bec\n"
               "var = p\n"
               "start = 0.40\n"
               "stop = 0.44\n"
               "step = 0.02\n"
               "n = 300\n"
               "rate-bits = 0.3\n"
               "bounds = isp\n";
    }
    auto r = run_cli("sweep --config /tmp/spb_sweep.cfg --out /tmp/spb_cfg_a.csv");
    REQUIRE(r.exit_code == 0);
    const std::string a = slurp("/tmp/spb_cfg_a.csv");
    CHECK(a.find("isp_ln_pe") != std::string::npos);
    // flags override the file
    auto r2 = run_cli(
        "sweep --config /tmp/spb_sweep.cfg --bounds isp,rcb --out /tmp/spb_cfg_b.csv");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp("/tmp/spb_cfg_b.csv").find("rcb_status") != std::string::npos);
}

TEST_CASE("parse_config rejects malformed lines") {
    std::istringstream good("a = 1\n # comment\n\nb=2\n");
    const auto kv = parse_config(good);
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "2");
    std::istringstream bad("not a pair\n");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}

TEST_CASE("minlen command") {
    auto r = run_cli("minlen --channel bpsk-awgn --bound sp59 --rate-bits 0.5 "
                     "--target-pe 1e-5 --gaps-db 2.76");
    REQUIRE(r.exit_code == 0);
    // the reported minimal length sits at the documented 133-bit scale
    const auto pos = r.output.rfind(',');
    REQUIRE(pos != std::string::npos);
    const long n = std::strtol(r.output.c_str() + pos + 1, nullptr, 10);
    CHECK(n >= 131);
    CHECK(n <= 136);
    // operating point beyond capacity: infeasible report, not a crash
    auto inf = run_cli("minlen --channel bec --bound rcb --rate-bits 0.9 --target-pe 1e-5 "
                       "--gaps-db -0.05");
    CHECK(inf.output.find("infeasible") != std::string::npos);
}

TEST_CASE("awgn sweeps and channel aliases") {
    auto r = run_cli("sweep --channel bpsk-awgn --var ebn0_db --start 2.0 --stop 3.0 "
                     "--count 3 --n 200 --rate-bits 0.5 --bounds isp,sp59,clb "
                     "--out /tmp/spb_awgn.csv");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp("/tmp/spb_awgn.csv");
    CHECK(csv.find("sp59_status") != std::string::npos);
    CHECK(csv.find("clb_status") != std::string::npos);
    // block-length sweep at a fixed operating point
    auto rn = run_cli("sweep --channel bec --var n --start 100 --stop 300 --step 100 "
                      "--p 0.4 --rate-bits 0.3 --bounds isp --out /tmp/spb_nsweep.csv");
    CHECK(rn.exit_code == 0);
    // the generic mpsk spelling
    auto r16 = run_cli("bound --channel mpsk-awgn:16 --ebn0-db 9 --n 64 --rate-bits 3.0 "
                       "--bound rcb");
    CHECK(r16.exit_code == 0);
    CHECK(run_cli("bound --channel mpsk-awgn:3 --ebn0-db 9 --n 64 --rate-bits 1.0 "
                  "--bound rcb")
              .exit_code == 2);
}

TEST_CASE("region command") {
    auto r = run_cli("region --channel bpsk-awgn --rates 0.75 0.85 --n-grid 300 900 "
                     "--target-pe 1e-5 --out /tmp/spb_region.csv");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp("/tmp/spb_region.csv");
    CHECK(csv.find("rate_bits,n,winner,sp59_db,ispvf_db,clb_db,status") == 0);
    // four cells, each resolved
    int ok_rows = 0;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        if (line.find(",ok") != std::string::npos) ++ok_rows;
    }
    CHECK(ok_rows == 4);
    // deterministic rerun
    REQUIRE(run_cli("region --channel bpsk-awgn --rates 0.75 0.85 --n-grid 300 900 "
                    "--target-pe 1e-5 --out /tmp/spb_region2.csv")
                .exit_code == 0);
    CHECK(slurp("/tmp/spb_region2.csv") == csv);
}

TEST_CASE("selftest command") {
    auto r = run_cli("selftest --suite numerics");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    // report form is json
    auto rep = run_cli("selftest --suite numerics --report");
    CHECK(rep.exit_code == 0);
    CHECK(nlohmann::json::parse(rep.output).is_array());
    // the injected perturbation must flip the suite to failure
    auto bad = run_cli("selftest --suite channels --perturb");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("FAIL") != std::string::npos);
}
