#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rtmix::dataio {

/// Measurement scale of a trial table. RawMs holds response times in
/// milliseconds; ShiftedLog holds ln(rt_ms - shift_ms) per trial.
struct Scale {
    enum Kind { RawMs, ShiftedLog } kind = RawMs;
    double shift_ms = 0.0;  // meaningful only for ShiftedLog

    bool operator==(const Scale&) const = default;
};

/// Trial-level observations in structure-of-arrays form. Row order is the
/// input file's order and is preserved by every transform. Subjects are kept
/// as opaque labels; `subject_idx` maps each row to the label's position in
/// `subjects` (order of first appearance), which is also the column order of
/// every design matrix built from this table.
struct TrialTable {
    std::vector<std::string> subjects;
    std::vector<int> subject_idx;
    std::vector<int> condition;  // 0 = baseline, 1 = treatment
    std::vector<double> rt;      // in `scale` units
    Scale scale;
    std::array<std::string, 2> condition_names{"0", "1"};

    std::size_t n_rows() const { return rt.size(); }
    int n_subjects() const { return static_cast<int>(subjects.size()); }
};

/// Per-cell counts produced by validate_design.
struct DesignSummary {
    int n_subjects = 0;
    // (subject index, condition) -> trial count
    std::map<std::pair<int, int>, long> trials_per_cell;
    long total_trials = 0;
};

/// How to read a delimited file: column names plus the condition label that
/// is coded 0 (the condition subtracted FROM when effects are computed).
/// If `baseline` is empty the condition column must already be literal 0/1.
/// The optional rt filter drops rows outside [rt_min, rt_max]; both default
/// to off.
struct Schema {
    std::string subject_col = "subject";
    std::string condition_col = "condition";
    std::string rt_col = "rt";
    std::string baseline;
    std::optional<double> rt_min;
    std::optional<double> rt_max;
};

/// Read a delimited text file (header row; delimiter auto-detected among
/// comma, tab, semicolon) into a TrialTable on the RawMs scale.
///
/// Throws SchemaError for unreadable files, missing columns, or rows whose
/// rt is non-numeric or non-positive (offending row numbers are listed);
/// DesignError when the condition column does not have exactly two levels.
TrialTable load_trials(const std::string& path, const Schema& schema);

/// Check that every subject has at least one trial in each condition and
/// return the cell counts. Throws DesignError naming the first offending
/// (subject, condition) pair, or for an empty table.
DesignSummary validate_design(const TrialTable& t);

/// Replace each rt (milliseconds) by ln(rt - shift_ms) and tag the scale.
/// All rows must satisfy rt > shift_ms; violations are a TransformError
/// listing the offending rows, never silently dropped. Row count and order
/// are unchanged.
TrialTable apply_shift_log(const TrialTable& t, double shift_ms);

/// Per-subject observed effect: mean(rt | condition 1) - mean(rt | condition
/// 0), in the table's scale units, sorted ascending by effect.
std::vector<std::pair<std::string, double>> observed_effects(const TrialTable& t);

/// Write "subject,observed_effect" rows (with header) for observed_effects
/// output.
void write_observed_effects(const std::string& path,
                            const std::vector<std::pair<std::string, double>>& effects);

/// Write a TrialTable as "subject,condition,rt" with the table's condition
/// labels. rt is printed with round-trip precision so reloading reproduces
/// the exact doubles.
void write_trials(const std::string& path, const TrialTable& t);

/// Round-trip formatting for doubles used by all text outputs (%.17g).
std::string format_double(double v);

/// Read a "key = value" config file. '#' starts a comment; blank lines are
/// skipped; order is preserved; duplicate keys are a SchemaError.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path);

/// Write "key = value" lines in the given order.
void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace rtmix::dataio
