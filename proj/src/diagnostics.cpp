#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rtmix/errors.hpp"
#include "rtmix/gibbs.hpp"
#include "rtmix/stats.hpp"

// Convergence diagnostics: rank-normalized split-Rhat and bulk effective
// sample size. Each chain is split in half, all halves are pooled and
// converted to normal scores through their fractional ranks, and Rhat / ESS
// are computed on the scores. ESS uses per-sequence autocovariances combined
// by Geyer's initial monotone positive-pair rule.

namespace rtmix::gibbs {

namespace {

std::vector<std::vector<double>> split_halves(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> out;
    for (const auto& ch : chains) {
        std::size_t half = ch.size() / 2;
        out.emplace_back(ch.begin(), ch.begin() + half);
        out.emplace_back(ch.end() - half, ch.end());
    }
    return out;
}

// normal scores from average fractional ranks, pooled over all sequences
std::vector<std::vector<double>> rank_normalize(const std::vector<std::vector<double>>& seqs) {
    struct Item {
        double v;
        std::size_t seq, idx;
    };
    std::vector<Item> items;
    for (std::size_t s = 0; s < seqs.size(); ++s)
        for (std::size_t i = 0; i < seqs[s].size(); ++i) items.push_back({seqs[s][i], s, i});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

    double S = static_cast<double>(items.size());
    std::vector<std::vector<double>> z(seqs.size());
    for (std::size_t s = 0; s < seqs.size(); ++s) z[s].assign(seqs[s].size(), 0.0);

    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].v == items[i].v) ++j;
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
        double score = stats::normal_quantile((avg_rank - 0.375) / (S + 0.25));
        for (std::size_t k = i; k < j; ++k) z[items[k].seq][items[k].idx] = score;
        i = j;
    }
    return z;
}

struct RhatEss {
    double rhat;
    double ess;
};

RhatEss rhat_and_ess(const std::vector<std::vector<double>>& z) {
    std::size_t K = z.size();
    std::size_t L = z[0].size();
    double S = static_cast<double>(K * L);

    std::vector<double> seq_mean(K), seq_var(K);
    for (std::size_t k = 0; k < K; ++k) {
        seq_mean[k] = stats::mean(z[k]);
        seq_var[k] = stats::variance(z[k]);
    }
    double W = stats::mean(seq_var);
    double B = static_cast<double>(L) * stats::variance(seq_mean);
    double Ld = static_cast<double>(L);
    double var_plus = (Ld - 1.0) / Ld * W + B / Ld;

    if (!(W > 0.0)) return {1.0, S};  // constant draws: nothing to diagnose

    double rhat = std::sqrt(var_plus / W);

    // mean autocovariance across sequences at a given lag (biased 1/L form)
    auto acov = [&](std::size_t t) {
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double s = 0.0;
            for (std::size_t idx = 0; idx + t < L; ++idx)
                s += (z[k][idx] - seq_mean[k]) * (z[k][idx + t] - seq_mean[k]);
            total += s / Ld;
        }
        return total / static_cast<double>(K);
    };
    auto rho = [&](std::size_t t) { return 1.0 - (W - acov(t)) / var_plus; };

    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < L; t += 2) {
        double pair = rho(t) + rho(t + 1);
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);  // enforce monotone decrease
        tau += 2.0 * pair;
        prev_pair = pair;
    }
    tau = std::max(tau, 1.0 / 50.0);  // keep ESS finite on pathological input
    return {rhat, S / tau};
}

RhatEss diagnose_one(const std::vector<std::vector<double>>& chains) {
    return rhat_and_ess(rank_normalize(split_halves(chains)));
}

}  // namespace

Diagnostics diagnose(const PosteriorDraws& d) {
    std::set<int> ids(d.chain_id.begin(), d.chain_id.end());
    if (ids.size() < 2) throw DomainError("diagnose: need draws from at least 2 chains");

    std::vector<std::string> params = {"mu", "nu", "sigma2", "g_alpha", "g_nu", "g_delta"};
    for (int i = 1; i <= d.n_subjects; ++i) params.push_back("delta_" + std::to_string(i));

    Diagnostics diag;
    for (const auto& name : params) {
        std::vector<std::vector<double>> chains;
        for (int id : ids) chains.push_back(d.chain_column(name, id));
        std::size_t len = chains[0].size();
        for (const auto& ch : chains)
            if (ch.size() != len) throw DomainError("diagnose: chains have unequal lengths");
        if (len < 4) throw DomainError("diagnose: chains too short");
        RhatEss r = diagnose_one(chains);
        diag.entries.push_back({name, r.rhat, r.ess});
    }
    return diag;
}

}  // namespace rtmix::gibbs
