#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spb/compare.hpp"

namespace spb {

enum class SweepVar { ebn0_db, erasure_p, block_length };

struct SweepSpec {
    ChannelFamily family{};
    SweepVar var = SweepVar::ebn0_db;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;       // step > 0 or count >= 2
    int count = 0;
    std::int64_t n = 0;      // fixed block length (unless sweeping n)
    double rate_bits = 0.0;
    std::int64_t list_size = 1;
    double operating_point = 0.0;  // fixed Eb/N0 dB or p when sweeping n
    std::vector<BoundKind> bounds;

    std::vector<double> points() const;  // validates and expands the range
};

struct SweepCell {
    std::string status;  // "ok", "trivial", or "error:<reason>"
    double ln_pe = 0.0;  // meaningful only when status == "ok"
};

struct SweepRow {
    double var_value = 0.0;
    std::vector<SweepCell> cells;  // one per requested bound, in order
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const BoundOptions& opts = {},
                                int jobs = 1);

// RFC-4180-style CSV with LF line endings; header
// var,<bound>_ln_pe,<bound>_log10_pe,<bound>_status,... in request order.
void write_sweep_csv(std::ostream& os, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows);

// One top-level object {"meta": ..., "rows": [...]}; loses nothing the CSV
// carries.
void write_sweep_json(std::ostream& os, const SweepSpec& spec,
                      const std::vector<SweepRow>& rows);

// Flat "key = value" per line; '#' starts a comment. Keys mirror flag names.
std::map<std::string, std::string> parse_config(std::istream& is);

BoundKind bound_kind_from_name(const std::string& name);
ChannelFamily channel_family_from_name(const std::string& name);

// 12 significant digits; the serialization used by both CSV and JSON.
std::string format_number(double v);

}  // namespace spb
