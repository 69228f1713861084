#ifndef HOBJ_BCEMOA_HPP
#define HOBJ_BCEMOA_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <hobj/detection.hpp>
#include <hobj/mdm.hpp>
#include <hobj/nsga2.hpp>
#include <hobj/problems.hpp>
#include <hobj/ranksvm.hpp>
#include <hobj/rng.hpp>
#include <hobj/types.hpp>

namespace hobj
{

enum class Mode { golden, only_learning, detection };
enum class DmKind { machine, human };

Mode parse_mode(const std::string &s);
std::string to_string(Mode m);

struct UtilitySpec {
    UtilityKind kind = UtilityKind::uf1;
    // 0-based
    std::vector<std::size_t> relevant;
    std::vector<double> weights;
    std::vector<double> ideal;
};

struct RunConfig {
    ProblemSpec problem = DtlzSpec::make(2, 4);
    // optional pre-generated rho-MNK instance (rmnk-v1 JSON); overrides generation
    std::string rmnk_file;
    // absent only when a human plays the DM
    std::optional<UtilitySpec> utility;
    Mode mode = Mode::detection;
    DmKind dm = DmKind::machine;
    DetectionConfig detection;

    std::size_t interactions = 6;
    std::size_t examples = 5;
    std::size_t gen_first = 200;
    std::size_t gen_between = 30;
    std::size_t total_generations = 500;
    std::size_t population = 100;

    std::optional<ActiveMask> initial_mask;
    std::uint64_t seed = 1;

    SvmParams svm;
    VariationParams variation;
    // Re-show the DM's last favourite at the next interaction.
    bool elitist_examples = true;

    std::size_t objectives() const;
    // total - gen_first - gen_between * (interactions - 1)
    long long trailing_generations() const;
    // Mask the run starts from once defaults are resolved.
    ActiveMask resolved_initial_mask() const;
    void validate() const;

    // Shrinks the schedule to the CI profile: 150 generations, 60 before the
    // first interaction, 15 between interactions.
    void apply_smoke();
};

nlohmann::json to_json(const RunConfig &cfg);
RunConfig run_config_from_json(const nlohmann::json &j);

struct InteractionRecord {
    std::size_t index = 0; // 1-based
    std::size_t generation = 0;
    std::vector<ObjectiveVector> shown;
    std::vector<int> ranks;
    ActiveMask mask_before;
    ActiveMask mask_after;
    // p-values (univariate) or contributions (RFE); empty without detection
    std::vector<double> scores;
    std::optional<double> best_utility_so_far;
    std::uint64_t interaction_charges = 0;
    std::uint64_t reevaluation_charges = 0;
    EvalCounter counter_after;
    bool model_constant = false;
    double model_violation = 0.0;
};

struct RunRecord {
    RunConfig config;
    ActiveMask initial_mask;
    ActiveMask final_mask;
    std::vector<InteractionRecord> interactions;

    DecisionVector final_x;
    ObjectiveVector final_f;
    std::optional<double> final_utility;

    EvalCounter counter;
    // snapshot taken just before the first interaction evaluates anything
    std::optional<EvalCounter> counter_before_first_interaction;
    std::uint64_t initial_charges = 0;
    std::uint64_t generation_charges = 0;
    // (generations, active objectives) for each evolution phase
    std::vector<std::pair<std::size_t, std::size_t>> phases;
    std::size_t model_fits = 0;

    // not serialized, so records of identical runs compare byte for byte
    double wall_clock_seconds = 0.0;

    std::uint64_t post_first_interaction_evaluations() const;
    std::uint64_t post_first_interaction_relevant() const;
};

nlohmann::json to_json(const RunRecord &rec);
RunRecord run_record_from_json(const nlohmann::json &j);

// Header plus one row per interaction and a final row.
std::string run_record_csv_header();
std::vector<std::string> run_record_csv_rows(const RunRecord &rec);

/// One interactive run as a resumable state machine.
/**
 * Construction evolves up to the first interaction (or to the end in golden
 * mode). Each submit() feeds one ranking, updates the active set in detection
 * mode, refits the learned utility and evolves to the next interaction.
 */
class Bcemoa
{
public:
    enum class Phase { awaiting_ranking, finished };

    explicit Bcemoa(RunConfig cfg);
    ~Bcemoa();
    Bcemoa(Bcemoa &&) noexcept;
    Bcemoa &operator=(Bcemoa &&) noexcept;

    Phase phase() const { return m_phase; }
    // 1-based index of the pending interaction
    std::size_t interaction_index() const { return m_record.interactions.size() + 1; }
    const ActiveMask &mask() const { return m_mask; }
    const RunConfig &config() const { return m_cfg; }
    const RunRecord &record() const { return m_record; }
    const EvalCounter &counter() const { return m_eval->counter(); }
    const Population &population() const { return m_pop; }

    // Full m-dimensional objective vectors of the pending candidates.
    std::vector<ObjectiveVector> candidates() const;

    // Ranks aligned with candidates(); 1 = best, ties allowed.
    void submit(const std::vector<int> &ranks);

    // Ranks the pending candidates with the configured machine DM.
    std::vector<int> machine_ranks() const;

    nlohmann::json checkpoint() const;
    static Bcemoa restore(const nlohmann::json &j);

private:
    struct RestoreTag {};
    Bcemoa(RunConfig cfg, RestoreTag);

    void setup();
    void evolve_phase(std::size_t generations);
    void prepare_interaction();
    void finish();
    SecondaryCriterion criterion() const;
    std::vector<std::size_t> select_examples();

    RunConfig m_cfg;
    std::unique_ptr<Problem> m_problem;
    std::unique_ptr<Evaluator> m_eval;
    std::optional<UtilityFunction> m_uf;
    Rng m_rng;
    Rng m_detect_rng;

    Phase m_phase = Phase::awaiting_ranking;
    Population m_pop;
    ActiveMask m_mask;
    RankedArchive m_archive;
    std::optional<UtilityModel> m_model;
    bool m_true_utility_criterion = false;
    std::optional<Individual> m_previous_best;
    std::vector<Individual> m_shown;
    InteractionRecord m_pending;
    std::optional<double> m_best_so_far;
    RunRecord m_record;
};

struct ExampleSelection {
    // population indices, best first
    std::vector<std::size_t> picks;
    // true when the previous favourite took the last slot
    bool previous_best_inserted = false;
};

// The n best individuals by (front, secondary key); the previous favourite, if
// given and not among them, replaces the worst pick.
ExampleSelection select_examples(const std::vector<Individual> &pop, const Ranking &ranking, std::size_t n,
                                 const Individual *previous_best);

// Machine-DM run from start to finish.
RunRecord run(const RunConfig &cfg);

} // namespace hobj

#endif
