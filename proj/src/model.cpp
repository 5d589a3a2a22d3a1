#include "rtmix/model.hpp"

#include <cmath>

#include "rtmix/errors.hpp"

namespace rtmix::model {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Unconstrained: return "unconstrained";
        case ModelKind::PositiveEffects: return "positive";
        case ModelKind::CommonEffect: return "common";
        case ModelKind::Null: return "null";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "unconstrained") return ModelKind::Unconstrained;
    if (s == "positive") return ModelKind::PositiveEffects;
    if (s == "common") return ModelKind::CommonEffect;
    if (s == "null") return ModelKind::Null;
    throw DomainError("unknown model kind '" + s + "'");
}

void PriorConfig::validate() const {
    if (!(r_alpha > 0.0 && r_nu > 0.0 && r_delta > 0.0))
        throw DomainError("PriorConfig: r scales must be strictly positive");
    if (!(sigma_guess_ms > 0.0 && shift_ms > 0.0))
        throw DomainError("PriorConfig: sigma_guess_ms and shift_ms must be positive");
}

std::vector<std::pair<std::string, std::string>> PriorConfig::to_kv() const {
    return {{"r_alpha", dataio::format_double(r_alpha)},
            {"r_nu", dataio::format_double(r_nu)},
            {"r_delta", dataio::format_double(r_delta)},
            {"sigma_guess_ms", dataio::format_double(sigma_guess_ms)},
            {"shift_ms", dataio::format_double(shift_ms)}};
}

PriorConfig PriorConfig::from_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
    PriorConfig p;
    for (const auto& [key, val] : kv) {
        double* target = nullptr;
        if (key == "r_alpha") target = &p.r_alpha;
        else if (key == "r_nu") target = &p.r_nu;
        else if (key == "r_delta") target = &p.r_delta;
        else if (key == "sigma_guess_ms") target = &p.sigma_guess_ms;
        else if (key == "shift_ms") target = &p.shift_ms;
        else throw SchemaError("PriorConfig: unknown key '" + key + "'");
        try {
            *target = std::stod(val);
        } catch (const std::exception&) {
            throw SchemaError("PriorConfig: bad value for '" + key + "': " + val);
        }
    }
    p.validate();
    return p;
}

int DesignMatrix::n_g_groups() const {
    int hi = -1;
    for (const auto& b : blocks) hi = std::max(hi, b.g_group);
    return hi + 1;
}

std::size_t DesignMatrix::n_cols() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.cols.size();
    return n;
}

std::vector<std::vector<double>> DesignMatrix::all_columns() const {
    std::vector<std::vector<double>> out;
    for (const auto& b : blocks)
        for (const auto& c : b.cols) out.push_back(c);
    return out;
}

DesignMatrix build_design(const dataio::TrialTable& t, ModelKind kind) {
    dataio::validate_design(t);
    std::size_t n = t.n_rows();
    int N = t.n_subjects();

    DesignMatrix d;
    d.n_rows = n;
    d.response = t.rt;

    DesignBlock intercept{BlockLabel::Intercept, -1, {std::vector<double>(n, 1.0)}};
    d.blocks.push_back(std::move(intercept));

    DesignBlock subj{BlockLabel::SubjectDev, kGAlpha, {}};
    subj.cols.assign(N, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) subj.cols[t.subject_idx[i]][i] = 1.0;
    d.blocks.push_back(std::move(subj));

    bool has_common = kind != ModelKind::Null;
    bool has_effdev = kind == ModelKind::Unconstrained || kind == ModelKind::PositiveEffects;

    if (has_common) {
        DesignBlock common{BlockLabel::CommonEffect, kGNu, {std::vector<double>(n, 0.0)}};
        for (std::size_t i = 0; i < n; ++i) common.cols[0][i] = static_cast<double>(t.condition[i]);
        d.blocks.push_back(std::move(common));
    }
    if (has_effdev) {
        DesignBlock effdev{BlockLabel::EffectDev, kGDelta, {}};
        effdev.cols.assign(N, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            if (t.condition[i] == 1) effdev.cols[t.subject_idx[i]][i] = 1.0;
        d.blocks.push_back(std::move(effdev));
    }
    return d;
}

double prior_density_g(double g, double r) {
    if (!(g > 0.0)) throw DomainError("prior_density_g: g must be positive");
    if (!(r > 0.0)) throw DomainError("prior_density_g: r must be positive");
    return r / std::sqrt(2.0 * M_PI) * std::pow(g, -1.5) * std::exp(-r * r / (2.0 * g));
}

double prior_cdf_g(double g, double r) {
    if (!(g > 0.0)) throw DomainError("prior_cdf_g: g must be positive");
    if (!(r > 0.0)) throw DomainError("prior_cdf_g: r must be positive");
    return std::erfc(r / std::sqrt(2.0 * g));
}

double sample_g(double r, rng::Stream& stream) {
    if (!(r > 0.0)) throw DomainError("sample_g: r must be positive");
    return r * r / stream.chi2_1();
}

}  // namespace rtmix::model
