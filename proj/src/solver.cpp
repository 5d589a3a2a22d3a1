#include "rtmix/solver.hpp"

#include <cmath>

#include "rtmix/errors.hpp"

namespace rtmix::solver {

using model::BlockLabel;
using model::ModelKind;

Collapsed collapse(const dataio::TrialTable& t, ModelKind kind) {
    Collapsed c;
    c.n_subjects = t.n_subjects();
    c.has_common = kind != ModelKind::Null;
    c.has_effdev = kind == ModelKind::Unconstrained || kind == ModelKind::PositiveEffects;
    c.subj.assign(c.n_subjects, SubjectStats{});

    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        SubjectStats& s = c.subj[t.subject_idx[i]];
        if (t.condition[i] == 0) {
            s.n0 += 1.0;
            s.mean0 += t.rt[i];  // sums for now
        } else {
            s.n1 += 1.0;
            s.mean1 += t.rt[i];
        }
    }
    for (SubjectStats& s : c.subj) {
        if (s.n0 > 0) s.mean0 /= s.n0;
        if (s.n1 > 0) s.mean1 /= s.n1;
    }
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        SubjectStats& s = c.subj[t.subject_idx[i]];
        double d = t.rt[i] - (t.condition[i] == 0 ? s.mean0 : s.mean1);
        (t.condition[i] == 0 ? s.ss0 : s.ss1) += d * d;
    }
    for (const SubjectStats& s : c.subj) {
        c.n_total += s.n0 + s.n1;
        c.n1_total += s.n1;
        c.sum_all += s.n0 * s.mean0 + s.n1 * s.mean1;
        c.sum1 += s.n1 * s.mean1;
    }
    return c;
}

Collapsed collapse(const model::DesignMatrix& d) {
    const std::vector<double>* common_col = nullptr;
    const std::vector<std::vector<double>>* subj_cols = nullptr;
    const std::vector<std::vector<double>>* effdev_cols = nullptr;
    for (const auto& b : d.blocks) {
        switch (b.label) {
            case BlockLabel::Intercept: break;
            case BlockLabel::SubjectDev: subj_cols = &b.cols; break;
            case BlockLabel::CommonEffect: common_col = &b.cols.at(0); break;
            case BlockLabel::EffectDev: effdev_cols = &b.cols; break;
        }
    }
    if (!subj_cols || subj_cols->empty())
        throw DesignError("collapse: design has no subject block");
    int N = static_cast<int>(subj_cols->size());
    std::size_t n = d.n_rows;

    // membership from the indicator columns
    std::vector<int> subject(n, -1);
    for (int j = 0; j < N; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if ((*subj_cols)[j][i] == 1.0) {
                if (subject[i] != -1) throw DesignError("collapse: overlapping subject indicators");
                subject[i] = j;
            }
    for (std::size_t i = 0; i < n; ++i)
        if (subject[i] == -1) throw DesignError("collapse: row belongs to no subject");

    std::vector<int> cond(n, 0);
    if (common_col)
        for (std::size_t i = 0; i < n; ++i) cond[i] = ((*common_col)[i] == 1.0) ? 1 : 0;

    // structural identity: shared-effect column equals the row sum of the
    // effect-deviation block, exactly
    if (common_col && effdev_cols)
        for (std::size_t i = 0; i < n; ++i) {
            double rowsum = 0.0;
            for (const auto& col : *effdev_cols) rowsum += col[i];
            if (rowsum != (*common_col)[i])
                throw DesignError("collapse: effect block row sum differs from shared column");
        }

    Collapsed c;
    c.n_subjects = N;
    c.has_common = common_col != nullptr;
    c.has_effdev = effdev_cols != nullptr;
    c.subj.assign(N, SubjectStats{});
    for (std::size_t i = 0; i < n; ++i) {
        SubjectStats& s = c.subj[subject[i]];
        if (cond[i] == 0) {
            s.n0 += 1.0;
            s.mean0 += d.response[i];
        } else {
            s.n1 += 1.0;
            s.mean1 += d.response[i];
        }
    }
    for (SubjectStats& s : c.subj) {
        if (s.n0 > 0) s.mean0 /= s.n0;
        if (s.n1 > 0) s.mean1 /= s.n1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        SubjectStats& s = c.subj[subject[i]];
        double dev = d.response[i] - (cond[i] == 0 ? s.mean0 : s.mean1);
        (cond[i] == 0 ? s.ss0 : s.ss1) += dev * dev;
    }
    for (const SubjectStats& s : c.subj) {
        c.n_total += s.n0 + s.n1;
        c.n1_total += s.n1;
        c.sum_all += s.n0 * s.mean0 + s.n1 * s.mean1;
        c.sum1 += s.n1 * s.mean1;
    }
    return c;
}

ArrowheadSystem::ArrowheadSystem(const Collapsed& c)
    : c_(c), ps_(c.has_effdev ? 2 : 1), pg_(c.has_common ? 2 : 1) {
    if (c.has_effdev && !c.has_common)
        throw DesignError("ArrowheadSystem: effect deviations require the shared-effect column");
    beta_hat_.assign(c.n_cols(), 0.0);
    int N = c.n_subjects;
    L_.assign(static_cast<std::size_t>(N) * (ps_ == 2 ? 3 : 1), 0.0);
    Dinv_b_.assign(static_cast<std::size_t>(N) * ps_, 0.0);
    Dinv_C_.assign(static_cast<std::size_t>(N) * ps_ * pg_, 0.0);
}

bool ArrowheadSystem::factor(double g_alpha, double g_nu, double g_delta) {
    g_alpha_ = g_alpha;
    g_nu_ = g_nu;
    g_delta_ = g_delta;
    ok_ = false;
    logdet_ = 0.0;
    const int N = c_.n_subjects;
    const double inv_ga = 1.0 / g_alpha;
    const double inv_gn = 1.0 / g_nu;
    const double inv_gd = 1.0 / g_delta;

    // Schur complement S = A - sum_i C_i' D_i^{-1} C_i and reduced rhs
    double S[4] = {c_.n_total, c_.n1_total, c_.n1_total, c_.n1_total + inv_gn};
    double rhs[2] = {c_.sum_all, c_.sum1};

    const int strideL = (ps_ == 2) ? 3 : 1;
    for (int i = 0; i < N; ++i) {
        const SubjectStats& s = c_.subj[i];
        const double ni = s.n0 + s.n1;
        double b[2] = {s.n0 * s.mean0 + s.n1 * s.mean1, s.n1 * s.mean1};
        // C_i rows: alpha x (mu, nu), theta x (mu, nu)
        double C[4] = {ni, s.n1, s.n1, s.n1};
        double* L = &L_[static_cast<std::size_t>(i) * strideL];
        double* db = &Dinv_b_[static_cast<std::size_t>(i) * ps_];
        double* dc = &Dinv_C_[static_cast<std::size_t>(i) * ps_ * pg_];

        if (ps_ == 1) {
            double d00 = ni + inv_ga;
            if (!(d00 > 0.0) || !std::isfinite(d00)) return false;
            L[0] = std::sqrt(d00);
            logdet_ += std::log(d00);
            db[0] = b[0] / d00;
            for (int gcol = 0; gcol < pg_; ++gcol) dc[gcol] = C[gcol] / d00;
        } else {
            double d00 = ni + inv_ga, d01 = s.n1, d11 = s.n1 + inv_gd;
            double l00 = std::sqrt(d00);
            double l10 = d01 / l00;
            double t = d11 - l10 * l10;
            if (!(t > 0.0) || !std::isfinite(t)) return false;
            double l11 = std::sqrt(t);
            L[0] = l00;
            L[1] = l10;
            L[2] = l11;
            logdet_ += 2.0 * (std::log(l00) + std::log(l11));
            // D^{-1} v via forward/back substitution
            auto dinv = [&](double v0, double v1, double& o0, double& o1) {
                double y0 = v0 / l00;
                double y1 = (v1 - l10 * y0) / l11;
                o1 = y1 / l11;
                o0 = (y0 - l10 * o1) / l00;
            };
            dinv(b[0], b[1], db[0], db[1]);
            for (int gcol = 0; gcol < pg_; ++gcol)
                dinv(C[gcol], C[2 + gcol], dc[gcol], dc[pg_ + gcol]);
        }
        // S -= C' (D^{-1} C); rhs -= C' (D^{-1} b)
        for (int grow = 0; grow < pg_; ++grow) {
            for (int gcol = 0; gcol < pg_; ++gcol) {
                double acc = 0.0;
                for (int k = 0; k < ps_; ++k) acc += C[k * 2 + grow] * dc[k * pg_ + gcol];
                S[grow * 2 + gcol] -= acc;
            }
            double acc = 0.0;
            for (int k = 0; k < ps_; ++k) acc += C[k * 2 + grow] * db[k];
            rhs[grow] -= acc;
        }
    }

    // factor the (<= 2x2) Schur complement
    if (pg_ == 1) {
        if (!(S[0] > 0.0) || !std::isfinite(S[0])) return false;
        S_chol_[0] = std::sqrt(S[0]);
        logdet_ += std::log(S[0]);
        zg_[0] = rhs[0] / S[0];
        zg_[1] = 0.0;
    } else {
        double l00sq = S[0];
        if (!(l00sq > 0.0) || !std::isfinite(l00sq)) return false;
        double l00 = std::sqrt(l00sq);
        double l10 = S[2] / l00;
        double t = S[3] - l10 * l10;
        if (!(t > 0.0) || !std::isfinite(t)) return false;
        double l11 = std::sqrt(t);
        S_chol_[0] = l00;
        S_chol_[1] = l10;
        S_chol_[2] = l11;
        logdet_ += 2.0 * (std::log(l00) + std::log(l11));
        double y0 = rhs[0] / l00;
        double y1 = (rhs[1] - l10 * y0) / l11;
        zg_[1] = y1 / l11;
        zg_[0] = (y0 - l10 * zg_[1]) / l00;
    }

    // back-substitute subject blocks and pack beta in design order
    beta_hat_[0] = zg_[0];
    if (c_.has_common) beta_hat_[1 + N] = zg_[1];
    for (int i = 0; i < N; ++i) {
        const double* db = &Dinv_b_[static_cast<std::size_t>(i) * ps_];
        const double* dc = &Dinv_C_[static_cast<std::size_t>(i) * ps_ * pg_];
        double a = db[0];
        for (int gcol = 0; gcol < pg_; ++gcol) a -= dc[gcol] * zg_[gcol];
        beta_hat_[1 + i] = a;
        if (ps_ == 2) {
            double th = db[1];
            for (int gcol = 0; gcol < pg_; ++gcol) th -= dc[pg_ + gcol] * zg_[gcol];
            beta_hat_[2 + N + i] = th;
        }
    }
    ok_ = true;
    compute_rss();
    return true;
}

double ArrowheadSystem::sse(const std::vector<double>& beta) const {
    const int N = c_.n_subjects;
    double mu = beta[0];
    double nu = c_.has_common ? beta[1 + N] : 0.0;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const SubjectStats& s = c_.subj[i];
        double fit0 = mu + beta[1 + i];
        double fit1 = fit0 + nu + (c_.has_effdev ? beta[2 + N + i] : 0.0);
        double d0 = s.mean0 - fit0;
        double d1 = s.mean1 - fit1;
        acc += s.ss0 + s.n0 * d0 * d0 + s.ss1 + s.n1 * d1 * d1;
    }
    return acc;
}

void ArrowheadSystem::compute_rss() {
    const int N = c_.n_subjects;
    double penalty = 0.0;
    for (int i = 0; i < N; ++i) {
        double a = beta_hat_[1 + i];
        penalty += a * a / g_alpha_;
    }
    if (c_.has_common) {
        double nu = beta_hat_[1 + N];
        penalty += nu * nu / g_nu_;
    }
    if (c_.has_effdev)
        for (int i = 0; i < N; ++i) {
            double th = beta_hat_[2 + N + i];
            penalty += th * th / g_delta_;
        }
    rss_ = sse(beta_hat_) + penalty;
}

void ArrowheadSystem::sample(double sigma, rng::Stream& stream, std::vector<double>& out) const {
    if (!ok_) throw NumericError("ArrowheadSystem::sample: factorization not available");
    const int N = c_.n_subjects;
    out.assign(beta_hat_.size(), 0.0);

    // global block: zg_draw = zg + sigma * L_S^{-T} w
    double zg_draw[2] = {zg_[0], zg_[1]};
    if (pg_ == 1) {
        double w = stream.normal();
        zg_draw[0] += sigma * (w / S_chol_[0]);
    } else {
        double w0 = stream.normal();
        double w1 = stream.normal();
        double x1 = w1 / S_chol_[2];
        double x0 = (w0 - S_chol_[1] * x1) / S_chol_[0];
        zg_draw[0] += sigma * x0;
        zg_draw[1] += sigma * x1;
    }
    double dzg[2] = {zg_draw[0] - zg_[0], zg_draw[1] - zg_[1]};

    out[0] = zg_draw[0];
    if (c_.has_common) out[1 + N] = zg_draw[1];

    const int strideL = (ps_ == 2) ? 3 : 1;
    for (int i = 0; i < N; ++i) {
        const double* L = &L_[static_cast<std::size_t>(i) * strideL];
        const double* db = &Dinv_b_[static_cast<std::size_t>(i) * ps_];
        const double* dc = &Dinv_C_[static_cast<std::size_t>(i) * ps_ * pg_];
        if (ps_ == 1) {
            double w = stream.normal();
            double corr = 0.0;
            for (int gcol = 0; gcol < pg_; ++gcol) corr += dc[gcol] * dzg[gcol];
            double m = db[0];
            for (int gcol = 0; gcol < pg_; ++gcol) m -= dc[gcol] * zg_[gcol];
            out[1 + i] = m + sigma * (w / L[0]) - corr;
        } else {
            double w0 = stream.normal();
            double w1 = stream.normal();
            // L^{-T} w
            double x1 = w1 / L[2];
            double x0 = (w0 - L[1] * x1) / L[0];
            double m0 = db[0], m1 = db[1];
            for (int gcol = 0; gcol < pg_; ++gcol) {
                m0 -= dc[gcol] * zg_[gcol];
                m1 -= dc[pg_ + gcol] * zg_[gcol];
            }
            double corr0 = 0.0, corr1 = 0.0;
            for (int gcol = 0; gcol < pg_; ++gcol) {
                corr0 += dc[gcol] * dzg[gcol];
                corr1 += dc[pg_ + gcol] * dzg[gcol];
            }
            out[1 + i] = m0 + sigma * x0 - corr0;
            out[2 + N + i] = m1 + sigma * x1 - corr1;
        }
    }
}

}  // namespace rtmix::solver
