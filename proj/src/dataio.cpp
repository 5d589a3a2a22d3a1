#include "rtmix/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "rtmix/errors.hpp"

namespace rtmix::dataio {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

char detect_delimiter(const std::string& header) {
    char best = ',';
    std::size_t best_count = 0;
    for (char cand : {',', '\t', ';'}) {
        std::size_t count = std::count(header.begin(), header.end(), cand);
        if (count > best_count) {
            best = cand;
            best_count = count;
        }
    }
    return best;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e && std::isfinite(out);
}

std::string list_rows(const std::vector<long>& rows) {
    std::ostringstream os;
    std::size_t shown = std::min<std::size_t>(rows.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) os << ", ";
        os << rows[i];
    }
    if (rows.size() > shown) os << ", ... (" << rows.size() << " total)";
    return os.str();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TrialTable load_trials(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw SchemaError("load_trials: cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) throw SchemaError("load_trials: '" + path + "' is empty");
    char delim = detect_delimiter(header);
    std::vector<std::string> cols = split(header, delim);

    auto find_col = [&](const std::string& name) {
        auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end())
            throw SchemaError("load_trials: column '" + name + "' not found in '" + path + "'");
        return static_cast<std::size_t>(it - cols.begin());
    };
    std::size_t ci_subject = find_col(schema.subject_col);
    std::size_t ci_condition = find_col(schema.condition_col);
    std::size_t ci_rt = find_col(schema.rt_col);

    // first pass: collect raw fields, validate rt
    std::vector<std::string> subj_raw, cond_raw;
    std::vector<double> rt_raw;
    std::vector<long> bad_rows;
    std::string line;
    long rowno = 0;
    while (std::getline(in, line)) {
        ++rowno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split(line, delim);
        if (fields.size() <= std::max({ci_subject, ci_condition, ci_rt})) {
            bad_rows.push_back(rowno);
            continue;
        }
        double rt;
        if (!parse_double(fields[ci_rt], rt) || rt <= 0.0) {
            bad_rows.push_back(rowno);
            continue;
        }
        if ((schema.rt_min && rt < *schema.rt_min) || (schema.rt_max && rt > *schema.rt_max))
            continue;  // optional filter, documented as off by default
        subj_raw.push_back(fields[ci_subject]);
        cond_raw.push_back(fields[ci_condition]);
        rt_raw.push_back(rt);
    }
    if (!bad_rows.empty())
        throw SchemaError("load_trials: rows with missing, non-numeric, or non-positive rt: " +
                          list_rows(bad_rows));

    // condition levels
    std::vector<std::string> levels;
    for (const auto& c : cond_raw)
        if (std::find(levels.begin(), levels.end(), c) == levels.end()) levels.push_back(c);
    if (levels.size() != 2) {
        std::ostringstream os;
        os << "load_trials: condition column has " << levels.size() << " level(s), need exactly 2";
        throw DesignError(os.str());
    }
    std::string label0, label1;
    if (schema.baseline.empty()) {
        bool literal01 = (levels[0] == "0" && levels[1] == "1") ||
                         (levels[0] == "1" && levels[1] == "0");
        if (!literal01)
            throw SchemaError(
                "load_trials: condition labels are '" + levels[0] + "'/'" + levels[1] +
                "'; name the baseline condition (coded 0) explicitly");
        label0 = "0";
        label1 = "1";
    } else {
        if (schema.baseline != levels[0] && schema.baseline != levels[1])
            throw SchemaError("load_trials: baseline '" + schema.baseline +
                              "' does not match any condition label");
        label0 = schema.baseline;
        label1 = (levels[0] == label0) ? levels[1] : levels[0];
    }

    TrialTable t;
    t.scale = Scale{Scale::RawMs, 0.0};
    t.condition_names = {label0, label1};
    std::unordered_map<std::string, int> subj_index;
    for (std::size_t i = 0; i < rt_raw.size(); ++i) {
        auto [it, inserted] = subj_index.try_emplace(subj_raw[i], t.n_subjects());
        if (inserted) t.subjects.push_back(subj_raw[i]);
        t.subject_idx.push_back(it->second);
        t.condition.push_back(cond_raw[i] == label0 ? 0 : 1);
        t.rt.push_back(rt_raw[i]);
    }
    return t;
}

DesignSummary validate_design(const TrialTable& t) {
    if (t.n_rows() == 0) throw DesignError("validate_design: table has no rows");
    DesignSummary s;
    s.n_subjects = t.n_subjects();
    for (std::size_t i = 0; i < t.n_rows(); ++i)
        ++s.trials_per_cell[{t.subject_idx[i], t.condition[i]}];
    s.total_trials = static_cast<long>(t.n_rows());
    for (int subj = 0; subj < s.n_subjects; ++subj)
        for (int cond = 0; cond < 2; ++cond)
            if (!s.trials_per_cell.count({subj, cond}))
                throw DesignError("validate_design: subject '" + t.subjects[subj] +
                                  "' has no trials in condition '" +
                                  t.condition_names[cond] + "'");
    return s;
}

TrialTable apply_shift_log(const TrialTable& t, double shift_ms) {
    if (t.scale.kind != Scale::RawMs)
        throw DomainError("apply_shift_log: table is not on the raw millisecond scale");
    if (!(shift_ms > 0.0)) throw DomainError("apply_shift_log: shift must be positive");
    std::vector<long> bad_rows;
    for (std::size_t i = 0; i < t.n_rows(); ++i)
        if (t.rt[i] <= shift_ms) bad_rows.push_back(static_cast<long>(i) + 1);
    if (!bad_rows.empty())
        throw TransformError("apply_shift_log: rows with rt <= shift (" +
                             format_double(shift_ms) + " ms): " + list_rows(bad_rows));
    TrialTable out = t;
    for (double& v : out.rt) v = std::log(v - shift_ms);
    out.scale = Scale{Scale::ShiftedLog, shift_ms};
    return out;
}

std::vector<std::pair<std::string, double>> observed_effects(const TrialTable& t) {
    validate_design(t);
    int n = t.n_subjects();
    std::vector<double> sum0(n, 0.0), sum1(n, 0.0);
    std::vector<long> n0(n, 0), n1(n, 0);
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        if (t.condition[i] == 0) {
            sum0[t.subject_idx[i]] += t.rt[i];
            ++n0[t.subject_idx[i]];
        } else {
            sum1[t.subject_idx[i]] += t.rt[i];
            ++n1[t.subject_idx[i]];
        }
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.emplace_back(t.subjects[i],
                         sum1[i] / static_cast<double>(n1[i]) - sum0[i] / static_cast<double>(n0[i]));
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

void write_observed_effects(const std::string& path,
                            const std::vector<std::pair<std::string, double>>& effects) {
    std::ofstream out(path);
    if (!out) throw SchemaError("write_observed_effects: cannot write '" + path + "'");
    out << "subject,observed_effect\n";
    for (const auto& [subj, eff] : effects) out << subj << ',' << format_double(eff) << '\n';
}

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("read_kv_file: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string s = trim(line);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "read_kv_file: '" << path << "' line " << lineno << ": expected key = value";
            throw SchemaError(os.str());
        }
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw SchemaError("read_kv_file: empty key in '" + path + "'");
        for (const auto& [k, v] : kv)
            if (k == key) throw SchemaError("read_kv_file: duplicate key '" + key + "'");
        kv.emplace_back(key, val);
    }
    return kv;
}

void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path);
    if (!out) throw SchemaError("write_kv_file: cannot write '" + path + "'");
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

void write_trials(const std::string& path, const TrialTable& t) {
    std::ofstream out(path);
    if (!out) throw SchemaError("write_trials: cannot write '" + path + "'");
    out << "subject,condition,rt\n";
    for (std::size_t i = 0; i < t.n_rows(); ++i)
        out << t.subjects[t.subject_idx[i]] << ',' << t.condition_names[t.condition[i]] << ','
            << format_double(t.rt[i]) << '\n';
}

}  // namespace rtmix::dataio
