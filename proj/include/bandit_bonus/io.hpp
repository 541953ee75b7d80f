#pragma once
/**
 * @file io.hpp
 * @brief Artifact emitters: CSV tables and the summary JSON document.
 *
 * Every floating-point value is printed with 12 significant digits (%.12g) so
 * golden-file comparisons are meaningful across platforms.  Emitters build the
 * whole document in memory; callers write files only after a run has fully
 * succeeded, so a failed run leaves no partial artifacts behind.
 */

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bandit_bonus/continuous.hpp"
#include "bandit_bonus/discrete.hpp"
#include "bandit_bonus/planner.hpp"
#include "bandit_bonus/sim.hpp"
#include "bandit_bonus/strategy.hpp"

namespace bb {

/// Formats a double with 12 significant digits, the project-wide output format.
inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// Dense policy / value table: one row per display-grid belief.
inline std::string policy_csv(const ValueCurve& curve) {
    std::string out = "alpha,value,bonus,region\n";
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
        out += fmt12(curve.alphas[i]);
        out += ',';
        out += fmt12(curve.values[i]);
        out += ',';
        out += fmt12(curve.bonuses[i]);
        out += ',';
        out += to_string(curve.regions[i]);
        out += '\n';
    }
    return out;
}

/// Discrete-model bonus schedule: one row per period, t starting at 1.
inline std::string schedule_csv(const BonusSchedule& schedule) {
    std::string out = "t,bonus,strategy\n";
    for (std::size_t i = 0; i < schedule.bonuses.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += fmt12(schedule.bonuses[i]);
        out += ',';
        out += to_string(schedule.strategy);
        out += '\n';
    }
    return out;
}

/// Welfare comparison table: planner optimum W, planner-under-monopolist-
/// policy surplus Lambda, and monopolist profit Pi on a common belief grid.
inline std::string welfare_csv(const WelfareTable& table) {
    std::string out = "alpha,W,Lambda,Pi\n";
    for (std::size_t i = 0; i < table.alphas.size(); ++i) {
        out += fmt12(table.alphas[i]);
        out += ',';
        out += fmt12(table.planner[i]);
        out += ',';
        out += fmt12(table.surplus[i]);
        out += ',';
        out += fmt12(table.profit[i]);
        out += '\n';
    }
    return out;
}

/// Safe-value sweep table: per-strategy profits and the winner at each R2.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "r2,pi_fc,pi_pc,pi_sa,pi_nb,pi_ir,winner\n";
    for (const SweepRow& row : rows) {
        out += fmt12(row.r2);
        out += ',';
        out += fmt12(row.pi_fc);
        out += ',';
        out += fmt12(row.pi_pc);
        out += ',';
        out += fmt12(row.pi_sa);
        out += ',';
        out += fmt12(row.pi_nb);
        out += ',';
        out += fmt12(row.pi_ir);
        out += ',';
        out += to_string(row.winner);
        out += '\n';
    }
    return out;
}

/// Direct-mechanism table sampled on (belief, cost) pairs; the experimentation
/// flag q is printed as "-" where no allocation is made (p = 0).
inline std::string mechanism_csv(const PlannerSolution& planner,
                                 const std::vector<double>& alphas,
                                 const std::vector<double>& costs) {
    std::string out = "alpha,c,p,q,t\n";
    for (const double a : alphas)
        for (const double c : costs) {
            const MechanismRule rule = mechanism_at(planner, a, c);
            out += fmt12(a);
            out += ',';
            out += fmt12(c);
            out += ',';
            out += std::to_string(rule.p);
            out += ',';
            out += rule.q ? std::to_string(*rule.q) : std::string("-");
            out += ',';
            out += fmt12(rule.t);
            out += '\n';
        }
    return out;
}

/// Per-period simulation trace for the first trace_paths paths.
inline std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "path_id,t,alpha,strategy,bonus,cost,reported,cash_flow\n";
    for (const TraceRow& row : rows) {
        out += std::to_string(row.path_id);
        out += ',';
        out += fmt12(row.t);
        out += ',';
        out += fmt12(row.alpha);
        out += ',';
        out += to_string(row.strategy);
        out += ',';
        out += fmt12(row.bonus);
        out += ',';
        out += fmt12(row.cost);
        out += ',';
        out += (row.reported ? '1' : '0');
        out += ',';
        out += fmt12(row.cash_flow);
        out += '\n';
    }
    return out;
}

/**
 * @brief Minimal JSON document builder with deterministic key order.
 *
 * The summary document is flat (scalars plus one nested config object and a
 * few arrays), so a purpose-built emitter keeps full control of the number
 * format; parsing on the way back in is delegated to a real JSON library.
 */
class JsonWriter {
public:
    JsonWriter() { out_ = "{"; }

    void field(const std::string& key, const std::string& text_value) {
        sep();
        out_ += quote(key) + ": " + quote(text_value);
    }
    void field(const std::string& key, const char* text_value) {
        field(key, std::string(text_value));
    }
    void field(const std::string& key, double value) {
        sep();
        out_ += quote(key) + ": " + fmt12(value);
    }
    void field(const std::string& key, int value) {
        sep();
        out_ += quote(key) + ": " + std::to_string(value);
    }
    void field(const std::string& key, std::size_t value) {
        sep();
        out_ += quote(key) + ": " + std::to_string(value);
    }
    void field(const std::string& key, bool value) {
        sep();
        out_ += quote(key) + ": " + (value ? "true" : "false");
    }
    void field(const std::string& key, const std::vector<double>& values) {
        sep();
        out_ += quote(key) + ": [";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) out_ += ", ";
            out_ += fmt12(values[i]);
        }
        out_ += ']';
    }
    /// Nested object of section -> key -> string value (the resolved config).
    void field(const std::string& key,
               const std::map<std::string, std::map<std::string, std::string>>& sections) {
        sep();
        out_ += quote(key) + ": {";
        bool first_section = true;
        for (const auto& [section, entries] : sections) {
            if (!first_section) out_ += ", ";
            first_section = false;
            out_ += quote(section) + ": {";
            bool first_entry = true;
            for (const auto& [k, v] : entries) {
                if (!first_entry) out_ += ", ";
                first_entry = false;
                out_ += quote(k) + ": " + quote(v);
            }
            out_ += '}';
        }
        out_ += '}';
    }

    std::string str() const { return out_ + "}\n"; }

private:
    static std::string quote(const std::string& text) {
        std::string out = "\"";
        for (const char ch : text) {
            switch (ch) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default: out += ch;
            }
        }
        return out + "\"";
    }
    void sep() {
        if (!first_) out_ += ", ";
        first_ = false;
    }

    std::string out_;
    bool first_ = true;
};

/// Writes a fully built artifact to disk, throwing on any filesystem failure.
inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw std::runtime_error("failed writing output file: " + path);
}

} // namespace bb
