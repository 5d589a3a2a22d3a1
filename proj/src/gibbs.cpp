#include "rtmix/gibbs.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rtmix/errors.hpp"
#include "rtmix/solver.hpp"
#include "rtmix/stats.hpp"

namespace rtmix::gibbs {

void McmcConfig::validate() const {
    if (n_chains < 2) throw DomainError("McmcConfig: need at least 2 chains");
    if (burn_in < 0 || burn_in >= n_iterations)
        throw DomainError("McmcConfig: burn_in must lie in [0, n_iterations)");
    if (thin < 1) throw DomainError("McmcConfig: thin must be >= 1");
    if (retained_per_chain() < 100)
        throw DomainError("McmcConfig: fewer than 100 retained draws per chain");
    if (frozen_g)
        for (double g : *frozen_g)
            if (!(g > 0.0)) throw DomainError("McmcConfig: frozen g values must be positive");
}

PosteriorDraws gibbs_fit(const dataio::TrialTable& t, const model::PriorConfig& p,
                         const McmcConfig& m) {
    p.validate();
    m.validate();
    dataio::validate_design(t);

    const solver::Collapsed c = solver::collapse(t, model::ModelKind::Unconstrained);
    const int N = c.n_subjects;
    const double n = c.n_total;
    const double q = 2.0 * N + 1.0;  // penalized coefficients: alpha, nu, theta

    // overall response variance seeds sigma^2
    double grand_mean = c.sum_all / n;
    double total_ss = 0.0;
    for (const auto& s : c.subj) {
        total_ss += s.ss0 + s.n0 * (s.mean0 - grand_mean) * (s.mean0 - grand_mean);
        total_ss += s.ss1 + s.n1 * (s.mean1 - grand_mean) * (s.mean1 - grand_mean);
    }
    double sigma2_init = (n > 1) ? total_ss / (n - 1.0) : 1.0;
    if (!(sigma2_init > 0.0)) sigma2_init = 1.0;

    const long retained = m.retained_per_chain();
    PosteriorDraws out;
    out.n_subjects = N;
    std::size_t total = static_cast<std::size_t>(retained) * m.n_chains;
    out.chain_id.reserve(total);
    out.draw_index.reserve(total);
    out.mu.reserve(total);
    out.nu.reserve(total);
    out.sigma2.reserve(total);
    out.g_alpha.reserve(total);
    out.g_nu.reserve(total);
    out.g_delta.reserve(total);
    out.eta2.reserve(total);
    out.alpha.reserve(total * N);
    out.theta.reserve(total * N);
    out.delta.reserve(total * N);

    solver::ArrowheadSystem sys(c);
    std::vector<double> beta;

    for (int chain = 1; chain <= m.n_chains; ++chain) {
        rng::Stream stream = rng::make_stream(m.seed, "chain", static_cast<std::uint64_t>(chain));
        double sigma2 = sigma2_init;
        double ga = m.frozen_g ? (*m.frozen_g)[0] : p.r_alpha * p.r_alpha;
        double gn = m.frozen_g ? (*m.frozen_g)[1] : p.r_nu * p.r_nu;
        double gd = m.frozen_g ? (*m.frozen_g)[2] : p.r_delta * p.r_delta;

        for (long it = 0; it < m.n_iterations; ++it) {
            // (a) joint location block
            if (!sys.factor(ga, gn, gd)) {
                std::ostringstream os;
                os << "gibbs_fit: penalized system lost positivity at chain " << chain
                   << " iteration " << it;
                throw NumericError(os.str());
            }
            sys.sample(std::sqrt(sigma2), stream, beta);

            double nu = beta[1 + N];
            double ss_alpha = 0.0, ss_theta = 0.0;
            for (int i = 0; i < N; ++i) {
                ss_alpha += beta[1 + i] * beta[1 + i];
                double th = beta[2 + N + i];
                ss_theta += th * th;
            }

            // (b) sigma^2 | location, g: inverse-gamma
            double sse = sys.sse(beta);
            double prior_ss = ss_alpha / ga + nu * nu / gn + ss_theta / gd;
            double shape = 0.5 * (n + q);
            double rate = 0.5 * (sse + prior_ss);
            sigma2 = rate / stream.gamma(shape);
            if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) {
                std::ostringstream os;
                os << "gibbs_fit: non-finite sigma^2 at chain " << chain << " iteration " << it;
                throw NumericError(os.str());
            }

            // (c) g conditionals, shape (k+1)/2 for k coefficients
            if (!m.frozen_g) {
                ga = 0.5 * (ss_alpha / sigma2 + p.r_alpha * p.r_alpha) /
                     stream.gamma(0.5 * (N + 1.0));
                gn = 0.5 * (nu * nu / sigma2 + p.r_nu * p.r_nu) / stream.gamma(1.0);
                gd = 0.5 * (ss_theta / sigma2 + p.r_delta * p.r_delta) /
                     stream.gamma(0.5 * (N + 1.0));
            }

            if (it >= m.burn_in && (it - m.burn_in) % m.thin == 0) {
                out.chain_id.push_back(chain);
                out.draw_index.push_back((it - m.burn_in) / m.thin);
                out.mu.push_back(beta[0]);
                out.nu.push_back(nu);
                out.sigma2.push_back(sigma2);
                out.g_alpha.push_back(ga);
                out.g_nu.push_back(gn);
                out.g_delta.push_back(gd);
                out.eta2.push_back(gd * sigma2);
                for (int i = 0; i < N; ++i) {
                    out.alpha.push_back(beta[1 + i]);
                    double th = beta[2 + N + i];
                    out.theta.push_back(th);
                    out.delta.push_back(nu + th);
                }
            }
        }
    }
    return out;
}

double sample_truncated_normal(double mean, double sd, double lower, rng::Stream& stream) {
    return stream.truncated_normal(mean, sd, lower);
}

std::vector<std::string> PosteriorDraws::column_names() const {
    std::vector<std::string> names = {"chain",   "draw",    "mu",      "nu", "sigma2",
                                      "g_alpha", "g_nu",    "g_delta", "eta2"};
    for (const char* base : {"alpha_", "theta_", "delta_"})
        for (int i = 1; i <= n_subjects; ++i) names.push_back(base + std::to_string(i));
    return names;
}

std::vector<double> PosteriorDraws::chain_column(const std::string& name, int chain) const {
    std::vector<double> out;
    auto pick = [&](auto getter) {
        for (std::size_t d = 0; d < n_draws(); ++d)
            if (chain_id[d] == chain) out.push_back(getter(d));
    };
    if (name == "mu") pick([&](std::size_t d) { return mu[d]; });
    else if (name == "nu") pick([&](std::size_t d) { return nu[d]; });
    else if (name == "sigma2") pick([&](std::size_t d) { return sigma2[d]; });
    else if (name == "g_alpha") pick([&](std::size_t d) { return g_alpha[d]; });
    else if (name == "g_nu") pick([&](std::size_t d) { return g_nu[d]; });
    else if (name == "g_delta") pick([&](std::size_t d) { return g_delta[d]; });
    else if (name == "eta2") pick([&](std::size_t d) { return eta2[d]; });
    else if (name.rfind("alpha_", 0) == 0)
        pick([&, i = std::stoi(name.substr(6)) - 1](std::size_t d) { return alpha_at(d, i); });
    else if (name.rfind("theta_", 0) == 0)
        pick([&, i = std::stoi(name.substr(6)) - 1](std::size_t d) { return theta_at(d, i); });
    else if (name.rfind("delta_", 0) == 0)
        pick([&, i = std::stoi(name.substr(6)) - 1](std::size_t d) { return delta_at(d, i); });
    else throw DomainError("chain_column: unknown column '" + name + "'");
    return out;
}

void write_draws(const std::string& path, const PosteriorDraws& d) {
    std::ofstream out(path);
    if (!out) throw SchemaError("write_draws: cannot write '" + path + "'");
    auto names = d.column_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (std::size_t r = 0; r < d.n_draws(); ++r) {
        out << d.chain_id[r] << ',' << d.draw_index[r];
        out << ',' << dataio::format_double(d.mu[r]) << ',' << dataio::format_double(d.nu[r])
            << ',' << dataio::format_double(d.sigma2[r]) << ','
            << dataio::format_double(d.g_alpha[r]) << ',' << dataio::format_double(d.g_nu[r])
            << ',' << dataio::format_double(d.g_delta[r]) << ','
            << dataio::format_double(d.eta2[r]);
        for (int i = 0; i < d.n_subjects; ++i) out << ',' << dataio::format_double(d.alpha_at(r, i));
        for (int i = 0; i < d.n_subjects; ++i) out << ',' << dataio::format_double(d.theta_at(r, i));
        for (int i = 0; i < d.n_subjects; ++i) out << ',' << dataio::format_double(d.delta_at(r, i));
        out << '\n';
    }
}

PosteriorDraws read_draws(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("read_draws: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw SchemaError("read_draws: '" + path + "' is empty");

    // subject count from the trailing delta_N column
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 9 || cols[0] != "chain" || cols[1] != "draw")
        throw SchemaError("read_draws: unrecognized draw file header");
    int N = static_cast<int>((cols.size() - 9) / 3);
    if (cols.size() != 9 + 3 * static_cast<std::size_t>(N))
        throw SchemaError("read_draws: inconsistent column count");

    PosteriorDraws d;
    d.n_subjects = N;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<double> v;
        v.reserve(cols.size());
        while (std::getline(ss, f, ',')) v.push_back(std::strtod(f.c_str(), nullptr));
        if (v.size() != cols.size()) throw SchemaError("read_draws: short row in '" + path + "'");
        d.chain_id.push_back(static_cast<int>(v[0]));
        d.draw_index.push_back(static_cast<long>(v[1]));
        d.mu.push_back(v[2]);
        d.nu.push_back(v[3]);
        d.sigma2.push_back(v[4]);
        d.g_alpha.push_back(v[5]);
        d.g_nu.push_back(v[6]);
        d.g_delta.push_back(v[7]);
        d.eta2.push_back(v[8]);
        for (int i = 0; i < N; ++i) d.alpha.push_back(v[9 + i]);
        for (int i = 0; i < N; ++i) d.theta.push_back(v[9 + N + i]);
        for (int i = 0; i < N; ++i) d.delta.push_back(v[9 + 2 * N + i]);
    }
    return d;
}

void write_diagnostics(const std::string& path, const Diagnostics& diag) {
    std::ofstream out(path);
    if (!out) throw SchemaError("write_diagnostics: cannot write '" + path + "'");
    out << "parameter,rhat,ess\n";
    for (const auto& e : diag.entries)
        out << e.name << ',' << dataio::format_double(e.rhat) << ','
            << dataio::format_double(e.ess) << '\n';
}

}  // namespace rtmix::gibbs
