#include "spb/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;

const char* var_name(SweepVar v) {
    switch (v) {
        case SweepVar::ebn0_db: return "ebn0_db";
        case SweepVar::erasure_p: return "p";
        case SweepVar::block_length: return "n";
    }
    return "?";
}

SweepCell eval_cell(const SweepSpec& spec, BoundKind kind, double var_value,
                    const BoundOptions& opts) {
    SweepCell cell;
    const std::int64_t n =
        spec.var == SweepVar::block_length ? static_cast<std::int64_t>(var_value) : spec.n;
    const double op =
        spec.var == SweepVar::block_length ? spec.operating_point : var_value;
    try {
        const auto code = code_from_rate_bits(n, spec.rate_bits, spec.list_size);
        if (kind == BoundKind::clb) {
            // threshold pseudo-bound: below the capacity limit the error
            // probability stays bounded away from zero
            const bool impossible =
                spec.family.is_bec
                    ? op > capacity_limit_erasure_p(code.rate_nats)
                    : op < capacity_limit_ebn0_db(spec.family.m, code.rate_nats, opts.quad);
            cell.status = impossible ? "ok" : "trivial";
            cell.ln_pe = 0.0;
            return cell;
        }
        const auto ev = eval_bound_ln(kind, spec.family, code, op, opts);
        switch (ev.status) {
            case EvalStatus::ok:
                cell.status = "ok";
                cell.ln_pe = ev.ln_pe;
                break;
            case EvalStatus::trivial:
                cell.status = "trivial";
                break;
            case EvalStatus::error:
                cell.status = "error:" + ev.message;
                break;
        }
    } catch (const std::exception& e) {
        cell.status = std::string("error:") + e.what();
    }
    return cell;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> SweepSpec::points() const {
    if (bounds.empty()) throw std::invalid_argument("sweep: at least one bound required");
    for (BoundKind b : bounds) {
        if (family.is_bec && b == BoundKind::sp59)
            throw std::invalid_argument("sweep: sp59 needs a Euclidean signal space (AWGN)");
        if (!family.is_bec && b == BoundKind::sp67)
            throw std::invalid_argument("sweep: sp67 needs a finite output alphabet (BEC)");
    }
    std::vector<double> pts;
    if (count >= 2) {
        for (int i = 0; i < count; ++i) {
            pts.push_back(start + (stop - start) * i / (count - 1));
        }
    } else if (step > 0.0 && stop >= start) {
        for (double v = start; v <= stop + 1e-12 * std::fabs(step); v += step) pts.push_back(v);
    }
    if (pts.empty()) throw std::invalid_argument("sweep: empty range");
    return pts;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const BoundOptions& opts, int jobs) {
    const auto pts = spec.points();
    std::vector<SweepRow> rows(pts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            rows[i].var_value = pts[i];
            rows[i].cells.resize(spec.bounds.size());
            for (std::size_t b = 0; b < spec.bounds.size(); ++b) {
                rows[i].cells[b] = eval_cell(spec, spec.bounds[b], pts[i], opts);
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows) {
    os << "var";
    for (BoundKind b : spec.bounds) {
        const std::string name = bound_kind_name(b);
        os << "," << name << "_ln_pe," << name << "_log10_pe," << name << "_status";
    }
    os << "\n";
    for (const auto& row : rows) {
        os << format_number(row.var_value);
        for (const auto& cell : row.cells) {
            if (cell.status == "ok") {
                os << "," << format_number(cell.ln_pe) << ","
                   << format_number(cell.ln_pe / std::log(10.0)) << ",ok";
            } else {
                os << ",,," << csv_escape(cell.status);
            }
        }
        os << "\n";
    }
}

void write_sweep_json(std::ostream& os, const SweepSpec& spec,
                      const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json meta;
    meta["channel"] = spec.family.is_bec ? "bec" : "mpsk-awgn";
    if (!spec.family.is_bec) meta["m"] = spec.family.m;
    meta["var"] = var_name(spec.var);
    meta["rate_bits"] = spec.rate_bits;
    meta["list_size"] = spec.list_size;
    if (spec.var != SweepVar::block_length) meta["n"] = spec.n;
    if (spec.var == SweepVar::block_length) meta["operating_point"] = spec.operating_point;
    nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
    for (BoundKind b : spec.bounds) bounds.push_back(bound_kind_name(b));
    meta["bounds"] = bounds;

    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["var"] = format_number(row.var_value);
        for (std::size_t b = 0; b < spec.bounds.size(); ++b) {
            const std::string name = bound_kind_name(spec.bounds[b]);
            const auto& cell = row.cells[b];
            if (cell.status == "ok") {
                r[name + "_ln_pe"] = format_number(cell.ln_pe);
                r[name + "_log10_pe"] = format_number(cell.ln_pe / std::log(10.0));
            } else {
                r[name + "_ln_pe"] = nullptr;
                r[name + "_log10_pe"] = nullptr;
            }
            r[name + "_status"] = cell.status;
        }
        jrows.push_back(std::move(r));
    }
    nlohmann::ordered_json doc;
    doc["meta"] = std::move(meta);
    doc["rows"] = std::move(jrows);
    os << doc.dump(2) << "\n";
}

std::map<std::string, std::string> parse_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key");
        kv[key] = value;
    }
    return kv;
}

BoundKind bound_kind_from_name(const std::string& name) {
    if (name == "isp") return BoundKind::isp;
    if (name == "vf") return BoundKind::vf;
    if (name == "sp67") return BoundKind::sp67;
    if (name == "sp59") return BoundKind::sp59;
    if (name == "rcb") return BoundKind::rcb;
    if (name == "clb") return BoundKind::clb;
    throw std::invalid_argument("unknown bound: " + name);
}

ChannelFamily channel_family_from_name(const std::string& name) {
    ChannelFamily f;
    if (name == "bec") {
        f.is_bec = true;
        return f;
    }
    if (name == "bpsk-awgn") {
        f.m = 2;
        return f;
    }
    if (name == "qpsk-awgn") {
        f.m = 4;
        return f;
    }
    if (name == "8psk-awgn") {
        f.m = 8;
        return f;
    }
    const std::string prefix = "mpsk-awgn:";
    if (name.rfind(prefix, 0) == 0) {
        const int m = std::stoi(name.substr(prefix.size()));
        if (m < 2 || (m & (m - 1)) != 0)
            throw std::invalid_argument("mpsk-awgn: m must be a power of two >= 2");
        f.m = m;
        return f;
    }
    throw std::invalid_argument("unknown channel: " + name);
}

}  // namespace spb
