#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "evac/simulation.hpp"

namespace evac {

enum class StatsFormat { Table, Csv };
enum class FrameFormat { Text, Graymap };

namespace detail {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string num2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string ci_cell(const MetricStats& m) {
    return num2(m.mean) + " [" + num2(m.interval.lower) + ", " + num2(m.interval.upper) + "]";
}

inline void pad_to(std::string& s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
}

} // namespace detail

// Statistics table for one or more scenarios. The CSV flavor is
// locale-independent ('.' decimals) and prints 12 significant digits so the
// numbers survive a parse round-trip.
inline std::string emit_stats(const std::vector<ReplicationStats>& all, StatsFormat format) {
    if (all.empty()) throw std::invalid_argument("emit_stats: no replication statistics");
    const ReplicationStats& head = all.front();
    bool mixed = false;
    for (const ReplicationStats& s : all) mixed = mixed || s.mixed_behaviors;

    if (format == StatsFormat::Csv) {
        std::ostringstream out;
        out << "case,replications,tet_mean,tet_lo,tet_hi,metxi_mean,metxi_lo,metxi_hi,"
               "mdxi_mean,mdxi_lo,mdxi_hi";
        for (int id : head.exit_ids) out << ",exit" << id << "_mean";
        if (mixed) {
            for (int id : head.exit_ids) out << ",exit" << id << "_ne_mean,exit" << id << "_bpe_mean";
        }
        out << ",trapped_mean\n";
        for (const ReplicationStats& s : all) {
            out << s.scenario_name << "," << s.replications;
            for (const MetricStats* m : {&s.tet, &s.metxi, &s.mdxi}) {
                out << "," << detail::num(m->mean) << "," << detail::num(m->interval.lower) << ","
                    << detail::num(m->interval.upper);
            }
            for (int id : s.exit_ids) out << "," << detail::num(s.exits.at(id).mean);
            if (mixed) {
                for (int id : s.exit_ids) {
                    out << "," << detail::num(s.exits_ne.at(id).mean) << ","
                        << detail::num(s.exits_bpe.at(id).mean);
                }
            }
            out << "," << detail::num(s.trapped.mean) << "\n";
        }
        return out.str();
    }

    std::vector<std::string> header = {"case", "n", "TET (s)", "METxI (s)", "MDxI (m)"};
    for (int id : head.exit_ids) header.push_back("#E" + std::to_string(id));
    if (mixed) {
        for (int id : head.exit_ids) {
            header.push_back("#E" + std::to_string(id) + " NE");
            header.push_back("#E" + std::to_string(id) + " BPE");
        }
    }
    header.push_back("trapped");

    std::vector<std::vector<std::string>> rows;
    for (const ReplicationStats& s : all) {
        std::vector<std::string> row = {s.scenario_name, std::to_string(s.replications),
                                        detail::ci_cell(s.tet), detail::ci_cell(s.metxi),
                                        detail::ci_cell(s.mdxi)};
        for (int id : s.exit_ids) row.push_back(detail::num2(s.exits.at(id).mean));
        if (mixed) {
            for (int id : s.exit_ids) {
                row.push_back(detail::num2(s.exits_ne.at(id).mean));
                row.push_back(detail::num2(s.exits_bpe.at(id).mean));
            }
        }
        row.push_back(detail::num2(s.trapped.mean));
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }
    std::ostringstream out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::string cell = row[c];
            detail::pad_to(cell, widths[c]);
            out << cell << (c + 1 < row.size() ? "  " : "");
        }
        out << "\n";
    };
    emit_row(header);
    for (const auto& row : rows) emit_row(row);
    return out.str();
}

inline std::string emit_stats(const ReplicationStats& stats, StatsFormat format) {
    return emit_stats(std::vector<ReplicationStats>{stats}, format);
}

// ---------------------------------------------------------------------------
// Frame rendering
// ---------------------------------------------------------------------------

struct FrameDump {
    long tick = 0;
    std::string bytes;
};

namespace detail {

// Fixed gray levels per cell state for the graymap flavor.
inline unsigned char gray_of(QState q) {
    switch (q) {
        case QState::W: return 0;
        case QState::O: return 64;
        case QState::SF: return 96;
        case QState::PS: return 128;
        case QState::S: return 176;
        case QState::P: return 32;
        case QState::E: return 255;
    }
    return 255;
}

} // namespace detail

// Text frames are exactly height lines of width characters over the
// alphabet W E P O S F X (F = smoke+fire, X = person in smoke). Graymap
// frames are binary PGM with one byte per cell.
inline FrameDump render_frame(const Grid& grid, long tick, FrameFormat format) {
    FrameDump dump;
    dump.tick = tick;
    if (format == FrameFormat::Text) {
        dump.bytes.reserve(static_cast<std::size_t>(grid.height) * (grid.width + 1));
        for (int y = 0; y < grid.height; ++y) {
            for (int x = 0; x < grid.width; ++x) dump.bytes += q_char(state_of(grid.at({x, y})));
            dump.bytes += '\n';
        }
    } else {
        std::ostringstream head;
        head << "P5\n# tick " << tick << "\n" << grid.width << " " << grid.height << "\n255\n";
        dump.bytes = head.str();
        for (int y = 0; y < grid.height; ++y) {
            for (int x = 0; x < grid.width; ++x) {
                dump.bytes += static_cast<char>(detail::gray_of(state_of(grid.at({x, y}))));
            }
        }
    }
    return dump;
}

// One-run summary for the CLI.
inline std::string run_summary(const RunResult& r, const std::string& name) {
    std::ostringstream out;
    out << "scenario " << name << "\n";
    out << "ticks " << r.ticks << "\n";
    out << "tet_seconds " << detail::num(r.tet_seconds) << "\n";
    out << "metxi_seconds " << detail::num(r.metxi_seconds) << "\n";
    out << "mdxi_meters " << detail::num(r.mdxi_meters) << "\n";
    for (const auto& [id, count] : r.exit_counts) out << "exit" << id << " " << count << "\n";
    out << "trapped " << r.trapped_count << "\n";
    return out.str();
}

} // namespace evac
