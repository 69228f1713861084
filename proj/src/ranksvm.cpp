#include <algorithm>
#include <cmath>

#include <hobj/errors.hpp>
#include <hobj/ranksvm.hpp>

namespace hobj
{

namespace
{

double rbf(std::span<const double> a, std::span<const double> b, double gamma)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return std::exp(-gamma * s);
}

} // namespace

UtilityModel fit_utility(const RankedArchive &archive, const ActiveMask &d, const SvmParams &params)
{
    UtilityModel model;
    model.m_snapshot = d;
    model.m_params = params;
    const std::size_t dim = d.count();

    std::vector<std::vector<double>> rows;
    struct Pair {
        std::size_t better, worse;
    };
    std::vector<Pair> pairs;
    for (const auto &batch : archive) {
        if (batch.shown.size() != batch.ranks.size()) throw dimension_error("fit_utility: ranks and samples differ in length");
        const std::size_t base = rows.size();
        for (const auto &f : batch.shown) rows.push_back(project(f, d));
        for (std::size_t i = 0; i < batch.shown.size(); ++i) {
            for (std::size_t j = 0; j < batch.shown.size(); ++j) {
                if (batch.ranks[i] < batch.ranks[j]) pairs.push_back({base + i, base + j});
            }
        }
    }
    if (rows.size() < 2) throw insufficient_data_error("fit_utility: need at least two ranked samples");
    model.m_training_size = rows.size();
    model.m_pairs = pairs.size();

    // standardization
    model.m_mean.assign(dim, 0.0);
    model.m_scale.assign(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        double mean = 0.0;
        for (const auto &r : rows) mean += r[k];
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto &r : rows) var += (r[k] - mean) * (r[k] - mean);
        var /= static_cast<double>(rows.size());
        model.m_mean[k] = mean;
        const double sd = std::sqrt(var);
        model.m_scale[k] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? 1.0 / sd : 0.0;
    }
    const bool any_feature = std::any_of(model.m_scale.begin(), model.m_scale.end(), [](double s) { return s > 0.0; });
    if (pairs.empty() || !any_feature) {
        model.m_constant = true;
        model.m_w.assign(dim, 0.0);
        return model;
    }
    std::vector<std::vector<double>> z(rows.size(), std::vector<double>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) z[i][k] = (rows[i][k] - model.m_mean[k]) * model.m_scale[k];
    }

    const std::size_t np = pairs.size();
    // Q[p][q] = <phi(worse_p) - phi(better_p), phi(worse_q) - phi(better_q)>
    std::vector<double> Q(np * np);
    const bool linear = params.kernel == SvmParams::Kernel::linear;
    auto kern = [&](std::size_t a, std::size_t b) {
        if (linear) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += z[a][k] * z[b][k];
            return s;
        }
        return rbf(z[a], z[b], params.gamma);
    };
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t q = p; q < np; ++q) {
            const double v = kern(pairs[p].worse, pairs[q].worse) - kern(pairs[p].worse, pairs[q].better)
                             - kern(pairs[p].better, pairs[q].worse) + kern(pairs[p].better, pairs[q].better);
            Q[p * np + q] = v;
            Q[q * np + p] = v;
        }
    }

    // Dual coordinate descent for the hinge-loss problem without bias:
    // min 1/2 a'Qa - sum(a), 0 <= a <= C.
    std::vector<double> alpha(np, 0.0);
    std::vector<double> Qa(np, 0.0);
    std::size_t it = 0;
    for (; it < params.max_iterations; ++it) {
        double max_pg = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            const double G = Qa[p] - 1.0;
            double pg = G;
            if (alpha[p] <= 0.0) pg = std::min(G, 0.0);
            else if (alpha[p] >= params.C) pg = std::max(G, 0.0);
            max_pg = std::max(max_pg, std::abs(pg));
            const double qpp = Q[p * np + p];
            if (pg == 0.0 || qpp <= 0.0) continue;
            const double old = alpha[p];
            alpha[p] = std::clamp(old - G / qpp, 0.0, params.C);
            const double delta = alpha[p] - old;
            if (delta != 0.0) {
                for (std::size_t q = 0; q < np; ++q) Qa[q] += delta * Q[p * np + q];
            }
        }
        if (max_pg < params.tolerance) break;
    }
    model.m_iterations = it;

    if (linear) {
        model.m_w.assign(dim, 0.0);
        for (std::size_t p = 0; p < np; ++p) {
            for (std::size_t k = 0; k < dim; ++k) {
                model.m_w[k] += alpha[p] * (z[pairs[p].worse][k] - z[pairs[p].better][k]);
            }
        }
        model.m_constant = std::all_of(model.m_w.begin(), model.m_w.end(), [](double w) { return w == 0.0; });
    } else {
        for (std::size_t p = 0; p < np; ++p) {
            if (alpha[p] == 0.0) continue;
            model.m_alpha.push_back(alpha[p]);
            model.m_better.push_back(z[pairs[p].better]);
            model.m_worse.push_back(z[pairs[p].worse]);
        }
        model.m_constant = model.m_alpha.empty();
    }

    std::size_t wrong = 0;
    for (const auto &pr : pairs) {
        if (!(model.raw_score(rows[pr.better]) < model.raw_score(rows[pr.worse]))) ++wrong;
    }
    model.m_violation = static_cast<double>(wrong) / static_cast<double>(np);
    return model;
}

UtilityModel fit_utility(const std::vector<ObjectiveVector> &shown, std::span<const int> ranks, const ActiveMask &d,
                         const SvmParams &params)
{
    RankedArchive archive{RankedBatch{shown, std::vector<int>(ranks.begin(), ranks.end())}};
    return fit_utility(archive, d, params);
}

double UtilityModel::raw_score(std::span<const double> f_active) const
{
    if (m_constant) return 0.0;
    const std::size_t dim = m_mean.size();
    std::vector<double> z(dim);
    for (std::size_t k = 0; k < dim; ++k) z[k] = (f_active[k] - m_mean[k]) * m_scale[k];
    if (m_params.kernel == SvmParams::Kernel::linear) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += m_w[k] * z[k];
        return s;
    }
    double s = 0.0;
    for (std::size_t p = 0; p < m_alpha.size(); ++p) {
        s += m_alpha[p] * (rbf(z, m_worse[p], m_params.gamma) - rbf(z, m_better[p], m_params.gamma));
    }
    return s;
}

double UtilityModel::predict(std::span<const double> f_active) const
{
    if (f_active.size() != m_mean.size()) throw dimension_error("predict_score: vector does not match the model's active objectives");
    return raw_score(f_active);
}

double UtilityModel::predict_full(std::span<const double> f, const ActiveMask &current) const
{
    if (!(current == m_snapshot)) throw state_error("predict_score: active objectives changed since the model was trained");
    return raw_score(project(f, m_snapshot));
}

double predict_score(const UtilityModel &model, std::span<const double> f_active)
{
    return model.predict(f_active);
}

} // namespace hobj
