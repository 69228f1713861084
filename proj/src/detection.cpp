#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/math/distributions/fisher_f.hpp>

#include <hobj/detection.hpp>
#include <hobj/errors.hpp>

namespace hobj
{

void DetectionConfig::validate(std::size_t m) const
{
    if (policy == Policy::fixed_k) {
        if (k < 2) throw config_error("detection: k must be at least 2");
        if (k > m) throw config_error("detection: k exceeds the number of objectives");
    } else if (!(tau > 0.0 && tau <= 1.0) && method == Method::univariate) {
        throw config_error("detection: tau must lie in (0, 1]");
    }
    if (method == Method::rfe && permutations == 0) throw config_error("detection: RFE needs at least one permutation");
}

std::string DetectionConfig::variant_name() const
{
    std::string s = policy == Policy::fixed_k ? "k-HD" : "tau-HD";
    if (method == Method::rfe) s += "R";
    return s;
}

DetectionConfig::Method parse_method(const std::string &s)
{
    if (s == "univariate") return DetectionConfig::Method::univariate;
    if (s == "rfe") return DetectionConfig::Method::rfe;
    throw config_error("unknown detection method '" + s + "'");
}

DetectionConfig::Policy parse_policy(const std::string &s)
{
    if (s == "fixed_k" || s == "k") return DetectionConfig::Policy::fixed_k;
    if (s == "threshold_tau" || s == "threshold" || s == "tau") return DetectionConfig::Policy::threshold;
    throw config_error("unknown detection policy '" + s + "'");
}

UnivariateScores univariate_scores(const std::vector<ObjectiveVector> &samples, std::span<const int> ranks)
{
    const std::size_t n = samples.size();
    if (n != ranks.size()) throw dimension_error("univariate_scores: ranks and samples differ in length");
    if (n < 3) throw insufficient_data_error("univariate_scores: F-test needs at least three samples");
    const std::size_t m = samples.front().size();
    for (const auto &f : samples) {
        if (f.size() != m) throw dimension_error("univariate_scores: ragged objective vectors");
    }

    const double dn = static_cast<double>(n);
    const double dof = dn - 2.0;
    double rmean = 0.0;
    for (int r : ranks) rmean += r;
    rmean /= dn;
    double rss = 0.0;
    for (int r : ranks) rss += (r - rmean) * (r - rmean);

    UnivariateScores s;
    s.rho.assign(m, 0.0);
    s.f_stat.assign(m, 0.0);
    s.p_value.assign(m, 1.0);
    const boost::math::fisher_f_distribution<double> dist(1.0, dof);

    for (std::size_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (const auto &f : samples) mean += f[i];
        mean /= dn;
        double fss = 0.0;
        double cross = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double df = samples[j][i] - mean;
            fss += df * df;
            cross += df * (ranks[j] - rmean);
        }
        if (!(fss > 0.0) || !(rss > 0.0)) continue;
        const double rho = std::clamp(cross / std::sqrt(fss * rss), -1.0, 1.0);
        s.rho[i] = rho;
        const double r2 = rho * rho;
        if (r2 >= 1.0) {
            s.f_stat[i] = std::numeric_limits<double>::infinity();
            s.p_value[i] = min_p_value;
            continue;
        }
        const double F = r2 / (1.0 - r2) * dof;
        s.f_stat[i] = F;
        s.p_value[i] = std::max(boost::math::cdf(boost::math::complement(dist, F)), min_p_value);
    }
    return s;
}

namespace
{

// The k entries with the smallest value, ties to the smaller index.
std::vector<std::size_t> k_smallest(const std::vector<double> &v, std::size_t k)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

ActiveMask select_univariate(const UnivariateScores &scores, const DetectionConfig &cfg)
{
    const auto &p = scores.p_value;
    const std::size_t m = p.size();
    if (m < 2) throw dimension_error("select_univariate: need at least two objectives");
    if (cfg.policy == DetectionConfig::Policy::fixed_k) {
        return ActiveMask::from_indices(m, k_smallest(p, std::max<std::size_t>(cfg.k, 2)));
    }
    if (cfg.tau >= 1.0) return ActiveMask::all(m);
    auto d = ActiveMask::none(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i] < cfg.tau) d.set(i, true);
    }
    if (d.count() < 2) return ActiveMask::from_indices(m, k_smallest(p, 2));
    return d;
}

PairSet make_pairs(const RankedArchive &archive)
{
    PairSet data;
    for (const auto &batch : archive) {
        if (batch.shown.size() != batch.ranks.size()) throw dimension_error("make_pairs: ranks and samples differ in length");
        const std::size_t base = data.samples.size();
        data.samples.insert(data.samples.end(), batch.shown.begin(), batch.shown.end());
        for (std::size_t i = 0; i < batch.ranks.size(); ++i) {
            for (std::size_t j = i + 1; j < batch.ranks.size(); ++j) {
                if (batch.ranks[i] < batch.ranks[j]) data.pairs.emplace_back(base + i, base + j);
                else if (batch.ranks[j] < batch.ranks[i]) data.pairs.emplace_back(base + j, base + i);
            }
        }
    }
    return data;
}

PairwiseLogit fit_pairwise_logit(const PairSet &data, const std::vector<std::size_t> &features, double l2)
{
    PairwiseLogit model;
    model.features = features;
    const std::size_t dim = features.size();
    const std::size_t n = data.samples.size();
    model.mean.assign(dim, 0.0);
    model.scale.assign(dim, 0.0);
    model.weights.assign(dim, 0.0);
    if (n == 0) return model;
    for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t col = features[k];
        double mean = 0.0;
        for (const auto &f : data.samples) mean += f[col];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto &f : data.samples) var += (f[col] - mean) * (f[col] - mean);
        var /= static_cast<double>(n);
        model.mean[k] = mean;
        const double sd = std::sqrt(var);
        model.scale[k] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? 1.0 / sd : 0.0;
    }
    if (data.pairs.empty()) return model;

    // Each pair is a positive example on z = s(worse) - s(better):
    // P(better ranked first) = sigmoid(w . z). Newton iterations on the
    // L2-penalized negative log-likelihood.
    const std::size_t np = data.pairs.size();
    Eigen::MatrixXd Z(np, dim);
    for (std::size_t p = 0; p < np; ++p) {
        const auto &b = data.samples[data.pairs[p].first];
        const auto &w = data.samples[data.pairs[p].second];
        for (std::size_t k = 0; k < dim; ++k) Z(p, k) = (w[features[k]] - b[features[k]]) * model.scale[k];
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd u = Z * w;
        Eigen::VectorXd grad = l2 * w;
        Eigen::MatrixXd H = l2 * Eigen::MatrixXd::Identity(dim, dim);
        for (std::size_t p = 0; p < np; ++p) {
            const double s = 1.0 / (1.0 + std::exp(-u(p)));
            grad -= (1.0 - s) * Z.row(p).transpose();
            H += s * (1.0 - s) * Z.row(p).transpose() * Z.row(p);
        }
        const Eigen::VectorXd step = H.llt().solve(grad);
        w -= step;
        if (step.norm() < 1e-12) break;
    }
    for (std::size_t k = 0; k < dim; ++k) model.weights[k] = model.scale[k] > 0.0 ? w(k) : 0.0;
    return model;
}

double pairwise_accuracy(const PairwiseLogit &model, const PairSet &data, std::size_t feature,
                         const std::vector<double> *column_override)
{
    if (data.pairs.empty()) return 0.0;
    const std::size_t dim = model.features.size();
    auto value = [&](std::size_t sample, std::size_t k) {
        const std::size_t col = model.features[k];
        if (column_override && col == feature) return (*column_override)[sample];
        return data.samples[sample][col];
    };
    double correct = 0.0;
    for (const auto &[better, worse] : data.pairs) {
        double u = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            if (model.weights[k] == 0.0) continue;
            u += model.weights[k] * (value(worse, k) - value(better, k)) * model.scale[k];
        }
        if (u > 0.0) correct += 1.0;
        else if (u == 0.0) correct += 0.5;
    }
    return correct / static_cast<double>(data.pairs.size());
}

double feature_contribution(const PairwiseLogit &model, const PairSet &data, std::size_t feature,
                            std::span<const std::vector<std::size_t>> permutations)
{
    if (std::find(model.features.begin(), model.features.end(), feature) == model.features.end()) {
        throw parameter_error("feature_contribution: feature not in the model");
    }
    if (permutations.empty()) throw parameter_error("feature_contribution: need at least one permutation");
    const double base = pairwise_accuracy(model, data);
    const std::size_t n = data.samples.size();
    std::vector<double> column(n);
    double permuted = 0.0;
    for (const auto &perm : permutations) {
        if (perm.size() != n) throw dimension_error("feature_contribution: permutation has wrong length");
        for (std::size_t s = 0; s < n; ++s) column[s] = data.samples[perm[s]][feature];
        permuted += pairwise_accuracy(model, data, feature, &column);
    }
    return base - permuted / static_cast<double>(permutations.size());
}

double feature_contribution(const PairwiseLogit &model, const PairSet &data, std::size_t feature, std::size_t count,
                            Rng &rng)
{
    std::vector<std::vector<std::size_t>> perms(count, std::vector<std::size_t>(data.samples.size()));
    for (auto &p : perms) {
        std::iota(p.begin(), p.end(), std::size_t{0});
        rng.shuffle(p);
    }
    return feature_contribution(model, data, feature, perms);
}

RfeResult rfe_select(const RankedArchive &archive, const DetectionConfig &cfg, Rng &rng)
{
    std::size_t total = 0;
    for (const auto &b : archive) total += b.shown.size();
    if (total < 3) throw insufficient_data_error("rfe_select: need at least three ranked samples");
    const std::size_t m = archive.front().shown.front().size();
    cfg.validate(m);

    const auto data = make_pairs(archive);
    std::vector<std::size_t> features(m);
    std::iota(features.begin(), features.end(), std::size_t{0});

    RfeResult result;
    while (true) {
        const auto model = fit_pairwise_logit(data, features);
        RfeStep step;
        step.features = features;
        for (auto f : features) step.contribution.push_back(feature_contribution(model, data, f, cfg.permutations, rng));
        const auto weakest = static_cast<std::size_t>(
            std::min_element(step.contribution.begin(), step.contribution.end()) - step.contribution.begin());
        step.weakest = features[weakest];
        const bool stop = features.size() <= 2
                          || (cfg.policy == DetectionConfig::Policy::fixed_k && features.size() <= cfg.k)
                          || (cfg.policy == DetectionConfig::Policy::threshold && step.contribution[weakest] > cfg.tau);
        step.eliminated = !stop;
        result.steps.push_back(step);
        if (stop) break;
        features.erase(features.begin() + static_cast<std::ptrdiff_t>(weakest));
    }
    result.mask = ActiveMask::from_indices(m, features);
    return result;
}

DetectionResult detect(const RankedArchive &archive, const DetectionConfig &cfg, Rng &rng)
{
    if (archive.empty()) throw insufficient_data_error("detect: no ranked samples");
    if (cfg.method == DetectionConfig::Method::univariate) {
        std::vector<ObjectiveVector> samples;
        std::vector<int> ranks;
        for (const auto &b : archive) {
            samples.insert(samples.end(), b.shown.begin(), b.shown.end());
            ranks.insert(ranks.end(), b.ranks.begin(), b.ranks.end());
        }
        const auto scores = univariate_scores(samples, ranks);
        return {select_univariate(scores, cfg), scores.p_value};
    }
    auto rfe = rfe_select(archive, cfg, rng);
    const std::size_t m = rfe.mask.size();
    std::vector<double> scores(m, 0.0);
    for (const auto &step : rfe.steps) {
        for (std::size_t k = 0; k < step.features.size(); ++k) scores[step.features[k]] = step.contribution[k];
    }
    return {std::move(rfe.mask), std::move(scores)};
}

} // namespace hobj
