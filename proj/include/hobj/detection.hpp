#ifndef HOBJ_DETECTION_HPP
#define HOBJ_DETECTION_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <hobj/rng.hpp>
#include <hobj/types.hpp>

namespace hobj
{

/// How the active set is re-derived from ranked samples.
/**
 * Univariate + threshold keeps objectives whose F-test p-value is below tau
 * (tau >= 1 keeps everything). RFE + threshold stops eliminating once the
 * weakest contribution exceeds tau, so there a larger tau means fewer
 * survivors. Every policy returns at least two objectives.
 */
struct DetectionConfig {
    enum class Method { univariate, rfe };
    enum class Policy { fixed_k, threshold };

    Method method = Method::univariate;
    Policy policy = Policy::threshold;
    std::size_t k = 2;
    double tau = 0.05;
    // RFE permutation importance
    std::size_t permutations = 10;

    void validate(std::size_t m) const;
    // k-HD, tau-HD, k-HDR, tau-HDR
    std::string variant_name() const;
};

DetectionConfig::Method parse_method(const std::string &s);
DetectionConfig::Policy parse_policy(const std::string &s);

struct UnivariateScores {
    std::vector<double> rho;
    std::vector<double> f_stat;
    std::vector<double> p_value;
};

inline constexpr double min_p_value = 1e-300;

UnivariateScores univariate_scores(const std::vector<ObjectiveVector> &samples, std::span<const int> ranks);

ActiveMask select_univariate(const UnivariateScores &scores, const DetectionConfig &cfg);

/// Pairwise-preference logistic model used inside recursive elimination.
/**
 * Predicts which of two solutions from the same interaction ranks better
 * from the difference of their standardized objective values.
 */
struct PairwiseLogit {
    std::vector<std::size_t> features; // objective indices, ascending
    std::vector<double> mean;
    std::vector<double> scale; // 0 for constant columns
    std::vector<double> weights;
};

struct PairSet {
    // sample indices into the flattened archive; first is the better one
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<ObjectiveVector> samples;
};

PairSet make_pairs(const RankedArchive &archive);

PairwiseLogit fit_pairwise_logit(const PairSet &data, const std::vector<std::size_t> &features, double l2 = 1.0);

// Fraction of pairs ordered correctly; ties of the decision value count one half.
// column_override, when non-null, replaces the named feature's column.
double pairwise_accuracy(const PairwiseLogit &model, const PairSet &data, std::size_t feature = 0,
                         const std::vector<double> *column_override = nullptr);

// Accuracy drop when one feature's column is permuted, averaged over permutations.
double feature_contribution(const PairwiseLogit &model, const PairSet &data, std::size_t feature,
                            std::span<const std::vector<std::size_t>> permutations);
double feature_contribution(const PairwiseLogit &model, const PairSet &data, std::size_t feature, std::size_t count,
                            Rng &rng);

struct RfeStep {
    std::vector<std::size_t> features;
    std::vector<double> contribution; // aligned with features
    std::size_t weakest = 0;          // objective index
    bool eliminated = false;
};

struct RfeResult {
    ActiveMask mask;
    std::vector<RfeStep> steps;
};

RfeResult rfe_select(const RankedArchive &archive, const DetectionConfig &cfg, Rng &rng);

/// Per-interaction detection output: the new mask plus the evidence behind it.
struct DetectionResult {
    ActiveMask mask;
    // univariate: p-values; rfe: contribution of each objective at the step it
    // was removed or at the last step for survivors
    std::vector<double> scores;
};

DetectionResult detect(const RankedArchive &archive, const DetectionConfig &cfg, Rng &rng);

} // namespace hobj

#endif
