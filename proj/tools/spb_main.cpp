// Command-line surface for the sphere-packing bound library: single-point
// bound evaluation, parameter sweeps, minimal-blocklength queries, dominance
// region maps, and the invariant self-test.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "spb/compare.hpp"
#include "spb/selftest.hpp"
#include "spb/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTrivial = 4;

constexpr double kLn2 = 0.6931471805599453094172321215;
constexpr double kLn10 = 2.302585092994045684017991;

struct GlobalOptions {
    bool json = false;
    int jobs = 0;  // 0: use hardware concurrency
    double quad_tol = 1e-10;
    bool vf_original = false;
    std::string sp59_cone = "theta1";

    spb::BoundOptions bound_options() const {
        spb::BoundOptions o;
        o.quad.rel_tol = quad_tol;
        o.vf_original = vf_original;
        o.sp59_cone = sp59_cone == "theta-star" ? spb::ConeMode::shannon_theta_star
                                                : spb::ConeMode::exact_theta1;
        return o;
    }
    int effective_jobs() const {
        if (jobs > 0) return jobs;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }
};

std::string format_db(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct BoundCmdArgs {
    std::string channel;
    std::string bound;
    std::int64_t n = 0;
    double rate_bits = 0.0;
    std::int64_t list_size = 1;
    std::optional<double> ebn0_db;
    std::optional<double> p;
};

int run_bound(const BoundCmdArgs& args, const GlobalOptions& global) {
    const auto family = spb::channel_family_from_name(args.channel);
    const auto kind = spb::bound_kind_from_name(args.bound);
    if (kind == spb::BoundKind::clb)
        throw CLI::ValidationError("bound", "clb is a threshold; use minlen or region");
    if (family.is_bec && !args.p)
        throw CLI::ValidationError("bound", "--p required for the bec channel");
    if (!family.is_bec && !args.ebn0_db)
        throw CLI::ValidationError("bound", "--ebn0-db required for AWGN channels");
    const double op = family.is_bec ? *args.p : *args.ebn0_db;
    const auto code = spb::code_from_rate_bits(args.n, args.rate_bits, args.list_size);
    const auto opts = global.bound_options();

    // keep the full diagnostic set for the SP67-family bounds
    nlohmann::ordered_json diag;
    spb::PointEval ev;
    if (kind == spb::BoundKind::isp || kind == spb::BoundKind::vf) {
        const auto ch = family.is_bec
                            ? spb::SymmetricChannel{spb::BecChannel(op)}
                            : spb::SymmetricChannel{spb::MPskAwgnChannel(
                                  family.m, spb::sigma_from_esn0(spb::esn0_from_ebn0_db(
                                                op, code.rate_nats / kLn2)))};
        if (kind == spb::BoundKind::isp) {
            const auto r = spb::isp_bound(ch, code, opts.quad);
            ev.status = r.status == spb::BoundStatus::ok ? spb::EvalStatus::ok
                                                         : spb::EvalStatus::trivial;
            ev.ln_pe = r.ln_pe_lower;
            diag["x_opt"] = r.x_opt;
            diag["s_opt"] = r.s_opt;
            diag["rho_opt"] = r.rho_opt;
            diag["exponent"] = r.exponent;
            diag["o1"] = r.o1;
            diag["o2"] = r.o2;
            diag["x_capped"] = r.x_capped;
        } else {
            const auto r =
                spb::vf_bound(ch, code, spb::alphabet_size(ch), opts.quad, opts.vf_original);
            ev.status = r.status == spb::BoundStatus::ok ? spb::EvalStatus::ok
                                                         : spb::EvalStatus::trivial;
            ev.ln_pe = r.ln_pe_lower;
            diag["x_opt"] = r.x_opt;
            diag["s_opt"] = r.s_opt;
            diag["rho_opt"] = r.rho_opt;
            diag["exponent"] = r.exponent;
            diag["composition_penalty"] = r.composition_penalty;
            diag["o1"] = r.o1;
            diag["o2"] = r.o2;
        }
    } else if (kind == spb::BoundKind::sp59) {
        if (family.is_bec)
            throw CLI::ValidationError("bound", "sp59 needs a Euclidean signal space (AWGN)");
        const double sigma =
            spb::sigma_from_esn0(spb::esn0_from_ebn0_db(op, code.rate_nats / kLn2));
        const auto params = spb::sp59_params_for_psk(family.m, sigma, code);
        const auto r = spb::sp59_bound(params, opts.sp59_cone, opts.quad);
        ev.status = spb::EvalStatus::ok;
        ev.ln_pe = r.ln_pe_lower;
        diag["theta"] = r.cone.theta;
        diag["ln_solid_angle_ratio"] = r.cone.ln_solid_angle_ratio;
        diag["n_dims"] = params.n_dims;
        diag["a"] = params.a;
    } else {
        ev = spb::eval_bound_ln(kind, family, code, op, opts);
        if (ev.status == spb::EvalStatus::error)
            throw spb::NumericalError(ev.message, 0.0, 0.0);
    }

    if (ev.status == spb::EvalStatus::trivial) {
        if (global.json) {
            nlohmann::ordered_json out;
            out["bound"] = args.bound;
            out["status"] = "trivial";
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << args.bound << ": trivial (P_e >= 0)\n";
        }
        return kExitTrivial;
    }
    if (global.json) {
        nlohmann::ordered_json out;
        out["bound"] = args.bound;
        out["status"] = "ok";
        out["ln_pe"] = spb::format_number(ev.ln_pe);
        out["log10_pe"] = spb::format_number(ev.ln_pe / kLn10);
        out["diagnostics"] = diag;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << args.bound << ": ln P_e >= " << spb::format_number(ev.ln_pe)
                  << "  (log10 P_e >= " << spb::format_number(ev.ln_pe / kLn10) << ")\n";
        for (const auto& [key, value] : diag.items()) {
            std::cout << "  " << key << " = " << value.dump() << "\n";
        }
    }
    return kExitOk;
}

struct SweepCmdArgs {
    std::string channel;
    std::string var = "ebn0_db";
    double start = 0.0, stop = 0.0, step = 0.0;
    int count = 0;
    std::int64_t n = 0;
    double rate_bits = 0.0;
    std::int64_t list_size = 1;
    double ebn0_db = 0.0;
    double p = 0.0;
    std::string bounds = "isp";
    std::string out_path;
    std::string format;  // csv | json | deduced from extension
    std::string config_path;
};

void apply_config(SweepCmdArgs& args, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("sweep", "cannot read config file: " + path);
    const auto kv = spb::parse_config(in);
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("channel")) args.channel = *v;
    if (auto v = get("var")) args.var = *v;
    if (auto v = get("start")) args.start = std::stod(*v);
    if (auto v = get("stop")) args.stop = std::stod(*v);
    if (auto v = get("step")) args.step = std::stod(*v);
    if (auto v = get("count")) args.count = std::stoi(*v);
    if (auto v = get("n")) args.n = std::stoll(*v);
    if (auto v = get("rate-bits")) args.rate_bits = std::stod(*v);
    if (auto v = get("list-size")) args.list_size = std::stoll(*v);
    if (auto v = get("ebn0-db")) args.ebn0_db = std::stod(*v);
    if (auto v = get("p")) args.p = std::stod(*v);
    if (auto v = get("bounds")) args.bounds = *v;
    if (auto v = get("out")) args.out_path = *v;
    if (auto v = get("format")) args.format = *v;
}

int run_sweep_cmd(const SweepCmdArgs& args, const GlobalOptions& global) {
    spb::SweepSpec spec;
    spec.family = spb::channel_family_from_name(args.channel);
    if (args.var == "ebn0_db") {
        spec.var = spb::SweepVar::ebn0_db;
    } else if (args.var == "p") {
        spec.var = spb::SweepVar::erasure_p;
    } else if (args.var == "n") {
        spec.var = spb::SweepVar::block_length;
    } else {
        throw CLI::ValidationError("sweep", "unknown sweep variable: " + args.var);
    }
    if (spec.var == spb::SweepVar::ebn0_db && spec.family.is_bec)
        throw CLI::ValidationError("sweep", "ebn0_db sweeps need an AWGN channel");
    if (spec.var == spb::SweepVar::erasure_p && !spec.family.is_bec)
        throw CLI::ValidationError("sweep", "p sweeps need the bec channel");
    spec.start = args.start;
    spec.stop = args.stop;
    spec.step = args.step;
    spec.count = args.count;
    spec.n = args.n;
    spec.rate_bits = args.rate_bits;
    spec.list_size = args.list_size;
    spec.operating_point = spec.family.is_bec ? args.p : args.ebn0_db;
    std::stringstream names(args.bounds);
    std::string token;
    while (std::getline(names, token, ',')) {
        if (!token.empty()) spec.bounds.push_back(spb::bound_kind_from_name(token));
    }

    const auto rows = spb::run_sweep(spec, global.bound_options(), global.effective_jobs());
    bool any_ok = false;
    for (const auto& row : rows) {
        for (const auto& cell : row.cells) any_ok = any_ok || cell.status == "ok";
    }
    std::string format = args.format;
    if (format.empty()) {
        format = args.out_path.size() > 5 &&
                         args.out_path.substr(args.out_path.size() - 5) == ".json"
                     ? "json"
                     : "csv";
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path, std::ios::binary);
        if (!file) throw CLI::ValidationError("sweep", "cannot write: " + args.out_path);
        os = &file;
    }
    if (format == "json") {
        spb::write_sweep_json(*os, spec, rows);
    } else if (format == "csv") {
        spb::write_sweep_csv(*os, spec, rows);
    } else {
        throw CLI::ValidationError("sweep", "unknown format: " + format);
    }
    return any_ok ? kExitOk : kExitNumerical;
}

struct MinlenCmdArgs {
    std::string channel;
    std::string bound = "isp";
    double rate_bits = 0.0;
    double target_pe = 1e-5;
    std::vector<double> gaps_db;
    std::optional<double> p;
};

int run_minlen(const MinlenCmdArgs& args, const GlobalOptions& global) {
    const auto family = spb::channel_family_from_name(args.channel);
    const auto kind = spb::bound_kind_from_name(args.bound);
    const double rate_nats = args.rate_bits * kLn2;
    const auto opts = global.bound_options();
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    if (!global.json) {
        std::cout << "bound=" << args.bound << " rate_bits=" << args.rate_bits
                  << " target_pe=" << args.target_pe << "\n";
        std::cout << "gap_db,operating_point,min_n\n";
    }
    bool any = false;
    for (double gap : args.gaps_db) {
        spb::MinLenQuery q;
        q.bound_kind = kind;
        q.family = family;
        q.rate_nats = rate_nats;
        q.target_ln_pe = std::log(args.target_pe);
        std::string op_str;
        if (family.is_bec) {
            const double p_clb = spb::capacity_limit_erasure_p(rate_nats);
            q.operating_point = args.p ? *args.p : p_clb - gap;
            op_str = "p=" + spb::format_number(q.operating_point);
        } else {
            const double clb = spb::capacity_limit_ebn0_db(family.m, rate_nats, opts.quad);
            q.operating_point = clb + gap;
            op_str = format_db(q.operating_point) + " dB";
        }
        if ((family.is_bec && (q.operating_point < 0.0 || q.operating_point > 1.0)) ||
            gap < 0.0) {
            if (global.json) {
                nlohmann::ordered_json r;
                r["gap_db"] = gap;
                r["status"] = "infeasible (operating point beyond capacity)";
                jrows.push_back(r);
            } else {
                std::cout << format_db(gap) << "," << op_str << ",infeasible\n";
            }
            continue;
        }
        const auto res = spb::min_blocklength(q, opts);
        any = any || res.feasible;
        if (global.json) {
            nlohmann::ordered_json r;
            r["gap_db"] = gap;
            r["operating_point"] = q.operating_point;
            if (res.feasible) {
                r["min_n"] = res.n;
            } else {
                r["status"] = res.diagnostic;
            }
            jrows.push_back(r);
        } else {
            if (res.feasible) {
                std::cout << format_db(gap) << "," << op_str << "," << res.n << "\n";
            } else {
                std::cout << format_db(gap) << "," << op_str << ",infeasible ("
                          << res.diagnostic << ")\n";
            }
        }
    }
    if (global.json) std::cout << jrows.dump(2) << "\n";
    return any ? kExitOk : kExitNumerical;
}

struct RegionCmdArgs {
    std::string channel = "bpsk-awgn";
    std::string variant = "isp";
    std::vector<double> rates;
    std::vector<std::int64_t> n_grid;
    double target_pe = 1e-5;
    std::string out_path;
};

int run_region(const RegionCmdArgs& args, const GlobalOptions& global) {
    const auto family = spb::channel_family_from_name(args.channel);
    const auto variant = spb::bound_kind_from_name(args.variant);
    if (variant != spb::BoundKind::isp && variant != spb::BoundKind::vf)
        throw CLI::ValidationError("region", "variant must be isp or vf");
    const auto cells =
        spb::dominance_region(args.rates, args.n_grid, std::log(args.target_pe), family,
                              variant, global.bound_options(), global.effective_jobs());
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path, std::ios::binary);
        if (!file) throw CLI::ValidationError("region", "cannot write: " + args.out_path);
        os = &file;
    }
    *os << "rate_bits,n,winner,sp59_db,ispvf_db,clb_db,status\n";
    for (const auto& c : cells) {
        const char* winner = c.winner == spb::RegionWinner::sp59      ? "sp59"
                             : c.winner == spb::RegionWinner::isp_or_vf ? "isp_or_vf"
                                                                        : "clb";
        if (c.ok) {
            *os << spb::format_number(c.rate_bits) << "," << c.n << "," << winner << ","
                << format_db(c.sp59_db) << "," << format_db(c.ispvf_db) << ","
                << format_db(c.clb_db) << ",ok\n";
        } else {
            *os << spb::format_number(c.rate_bits) << "," << c.n << ",,,,,"
                << "error:" << c.diagnostic << "\n";
        }
    }
    return kExitOk;
}

int run_selftest_cmd(const std::string& suite, bool report, bool perturb,
                     const GlobalOptions& global) {
    const auto results = spb::run_selftest(suite, perturb);
    bool all_pass = true;
    for (const auto& r : results) all_pass = all_pass && r.pass;
    if (report || global.json) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& r : results) {
            nlohmann::ordered_json j;
            j["suite"] = r.suite;
            j["name"] = r.name;
            j["pass"] = r.pass;
            if (!r.detail.empty()) j["detail"] = r.detail;
            out.push_back(j);
        }
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.name;
            if (!r.pass && !r.detail.empty()) std::cout << "  -- " << r.detail;
            std::cout << "\n";
        }
    }
    return all_pass ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sphere-packing lower bounds on block error probability (ISP, VF, SP67, "
                 "SP59) with random-coding references"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_flag("--json", global.json, "machine-readable output");
    app.add_option("--jobs", global.jobs, "worker threads (default: hardware concurrency)");
    app.add_option("--quad-tol", global.quad_tol, "quadrature relative tolerance");
    app.add_flag("--vf-original", global.vf_original,
                 "use the originally published VF constant (ln 4)");
    app.add_option("--sp59-cone", global.sp59_cone, "cone angle mode: theta1 | theta-star")
        ->check(CLI::IsMember({"theta1", "theta-star"}));

    BoundCmdArgs bound_args;
    auto* bound = app.add_subcommand("bound", "evaluate one bound at one operating point");
    bound->add_option("--channel", bound_args.channel,
                      "bpsk-awgn | qpsk-awgn | 8psk-awgn | mpsk-awgn:<m> | bec")
        ->required();
    bound->add_option("--bound", bound_args.bound, "isp | vf | sp67 | sp59 | rcb")->required();
    bound->add_option("--n", bound_args.n, "block length in channel uses")->required();
    bound->add_option("--rate-bits", bound_args.rate_bits, "code rate, bits per channel use")
        ->required();
    bound->add_option("--list-size", bound_args.list_size, "list decoder size L");
    bound->add_option("--ebn0-db", [&bound_args](const CLI::results_t& v) {
        bound_args.ebn0_db = std::stod(v[0]);
        return true;
    }, "operating Eb/N0 in dB (AWGN)");
    bound->add_option("--p", [&bound_args](const CLI::results_t& v) {
        bound_args.p = std::stod(v[0]);
        return true;
    }, "erasure probability (bec)");

    SweepCmdArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "sweep one variable, emit CSV/JSON rows");
    sweep->add_option("--config", sweep_args.config_path, "key = value config file");
    sweep->add_option("--channel", sweep_args.channel, "channel family");
    sweep->add_option("--var", sweep_args.var, "ebn0_db | p | n");
    sweep->add_option("--start", sweep_args.start, "range start");
    sweep->add_option("--stop", sweep_args.stop, "range stop");
    sweep->add_option("--step", sweep_args.step, "range step");
    sweep->add_option("--count", sweep_args.count, "point count (alternative to step)");
    sweep->add_option("--n", sweep_args.n, "fixed block length");
    sweep->add_option("--rate-bits", sweep_args.rate_bits, "code rate, bits per channel use");
    sweep->add_option("--list-size", sweep_args.list_size, "list decoder size L");
    sweep->add_option("--ebn0-db", sweep_args.ebn0_db, "fixed Eb/N0 when sweeping n");
    sweep->add_option("--p", sweep_args.p, "fixed erasure probability when sweeping n");
    sweep->add_option("--bounds", sweep_args.bounds, "comma list of bounds");
    sweep->add_option("--out", sweep_args.out_path, "output file (default: stdout)");
    sweep->add_option("--format", sweep_args.format, "csv | json");

    MinlenCmdArgs minlen_args;
    auto* minlen = app.add_subcommand("minlen", "minimal blocklength for a target P_e");
    minlen->add_option("--channel", minlen_args.channel, "channel family")->required();
    minlen->add_option("--bound", minlen_args.bound, "isp | vf | sp67 | sp59 | rcb");
    minlen->add_option("--rate-bits", minlen_args.rate_bits, "code rate, bits per channel use")
        ->required();
    minlen->add_option("--target-pe", minlen_args.target_pe, "target block error probability");
    minlen->add_option("--gaps-db", minlen_args.gaps_db,
                       "gap(s) to the capacity limit (dB for AWGN, erasure-probability "
                       "offset for bec)")
        ->required();
    minlen->add_option("--p", [&minlen_args](const CLI::results_t& v) {
        minlen_args.p = std::stod(v[0]);
        return true;
    }, "explicit erasure probability (overrides the gap for bec)");

    RegionCmdArgs region_args;
    auto* region = app.add_subcommand("region", "dominance map over a (rate, N) grid");
    region->add_option("--channel", region_args.channel, "AWGN channel family");
    region->add_option("--variant", region_args.variant, "isp | vf");
    region->add_option("--rates", region_args.rates, "rate grid, bits per channel use")
        ->required();
    region->add_option("--n-grid", region_args.n_grid, "block length grid")->required();
    region->add_option("--target-pe", region_args.target_pe, "target block error probability");
    region->add_option("--out", region_args.out_path, "output file (default: stdout)");

    std::string selftest_suite;
    bool selftest_report = false;
    bool selftest_perturb = false;
    auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
    selftest->add_option("--suite", selftest_suite, "restrict to one suite")
        ->check(CLI::IsMember(spb::selftest_suite_names()));
    selftest->add_flag("--report", selftest_report, "emit per-invariant JSON");
    auto* perturb_flag =
        selftest->add_flag("--perturb", selftest_perturb, "inject a sign flip (test only)");
    perturb_flag->group("");  // hidden

    try {
        app.parse(argc, argv);
        if (bound->parsed()) return run_bound(bound_args, global);
        if (sweep->parsed()) {
            if (!sweep_args.config_path.empty()) {
                // config provides defaults; explicit flags already in
                // sweep_args win, so re-parse on top of the config values
                SweepCmdArgs merged;
                apply_config(merged, sweep_args.config_path);
                auto keep = [](auto& dst, const auto& src, const auto& unset) {
                    if (dst == unset) dst = src;
                };
                keep(sweep_args.channel, merged.channel, std::string());
                if (sweep_args.var == "ebn0_db" && merged.var != "ebn0_db" &&
                    !merged.var.empty()) {
                    sweep_args.var = merged.var;
                }
                keep(sweep_args.start, merged.start, 0.0);
                keep(sweep_args.stop, merged.stop, 0.0);
                keep(sweep_args.step, merged.step, 0.0);
                keep(sweep_args.count, merged.count, 0);
                keep(sweep_args.n, merged.n, static_cast<std::int64_t>(0));
                keep(sweep_args.rate_bits, merged.rate_bits, 0.0);
                if (sweep_args.list_size == 1 && merged.list_size != 1) {
                    sweep_args.list_size = merged.list_size;
                }
                keep(sweep_args.ebn0_db, merged.ebn0_db, 0.0);
                keep(sweep_args.p, merged.p, 0.0);
                if (sweep_args.bounds == "isp" && !merged.bounds.empty()) {
                    sweep_args.bounds = merged.bounds;
                }
                keep(sweep_args.out_path, merged.out_path, std::string());
                keep(sweep_args.format, merged.format, std::string());
            }
            return run_sweep_cmd(sweep_args, global);
        }
        if (minlen->parsed()) return run_minlen(minlen_args, global);
        if (region->parsed()) return run_region(region_args, global);
        if (selftest->parsed()) {
            return run_selftest_cmd(selftest_suite, selftest_report, selftest_perturb, global);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const spb::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const spb::RateTooLowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
