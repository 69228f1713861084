#ifndef HOBJ_RANKSVM_HPP
#define HOBJ_RANKSVM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <hobj/types.hpp>

namespace hobj
{

struct SvmParams {
    enum class Kernel { linear, rbf };

    double C = 1.0;
    double tolerance = 1e-6;
    std::size_t max_iterations = 10000;
    Kernel kernel = Kernel::linear;
    // rbf only, on standardized features
    double gamma = 1.0;
};

/// Learned surrogate utility over the active objectives at training time.
/**
 * Trained on (better, worse) pairs taken within each interaction's ranking;
 * ranks from different interactions are never compared. Features are
 * standardized on the training set, so only the induced order matters.
 * Lower score means preferred.
 */
class UtilityModel
{
public:
    UtilityModel() = default;

    // f_active has one entry per active objective of the snapshot.
    double predict(std::span<const double> f_active) const;
    // Full m-vector under the caller's current mask; throws state_error if the
    // mask differs from the training snapshot.
    double predict_full(std::span<const double> f, const ActiveMask &current) const;

    bool constant() const { return m_constant; }
    const ActiveMask &snapshot() const { return m_snapshot; }
    std::size_t training_set_size() const { return m_training_size; }
    std::size_t training_pairs() const { return m_pairs; }
    // Share of training pairs the model orders wrongly.
    double training_violation() const { return m_violation; }
    std::size_t iterations() const { return m_iterations; }
    // Linear weights in standardized units (empty for rbf).
    const std::vector<double> &weights() const { return m_w; }

    friend UtilityModel fit_utility(const RankedArchive &archive, const ActiveMask &d, const SvmParams &params);

private:
    double raw_score(std::span<const double> f_active) const;

    ActiveMask m_snapshot;
    std::size_t m_training_size = 0;
    std::size_t m_pairs = 0;
    std::size_t m_iterations = 0;
    bool m_constant = true;
    double m_violation = 0.0;
    SvmParams m_params;
    std::vector<double> m_mean;
    std::vector<double> m_scale; // 0 marks a dropped feature
    std::vector<double> m_w;
    // rbf expansion: standardized endpoints and dual coefficients
    std::vector<std::vector<double>> m_better;
    std::vector<std::vector<double>> m_worse;
    std::vector<double> m_alpha;
};

UtilityModel fit_utility(const RankedArchive &archive, const ActiveMask &d, const SvmParams &params = {});
UtilityModel fit_utility(const std::vector<ObjectiveVector> &shown, std::span<const int> ranks, const ActiveMask &d,
                         const SvmParams &params = {});

double predict_score(const UtilityModel &model, std::span<const double> f_active);

} // namespace hobj

#endif
