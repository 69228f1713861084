#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <hobj/bcemoa.hpp>
#include <hobj/errors.hpp>

namespace hobj
{

namespace
{

constexpr std::uint64_t detection_stream = 0xD37EC7;

bool same_decision(const Individual &a, const Individual &b)
{
    return a.x == b.x;
}

bool all_ranks_tied(const RankedArchive &archive)
{
    for (const auto &b : archive) {
        for (int r : b.ranks) {
            if (r != b.ranks.front()) return false;
        }
    }
    return true;
}

} // namespace

Mode parse_mode(const std::string &s)
{
    if (s == "golden") return Mode::golden;
    if (s == "only_learning") return Mode::only_learning;
    if (s == "detection") return Mode::detection;
    throw config_error("unknown mode '" + s + "'");
}

std::string to_string(Mode m)
{
    switch (m) {
        case Mode::golden: return "golden";
        case Mode::only_learning: return "only_learning";
        case Mode::detection: return "detection";
    }
    return "?";
}

std::size_t RunConfig::objectives() const
{
    return std::visit([](const auto &p) { return p.m; }, problem);
}

long long RunConfig::trailing_generations() const
{
    const long long between = interactions == 0 ? 0 : static_cast<long long>(gen_between) * static_cast<long long>(interactions - 1);
    return static_cast<long long>(total_generations) - static_cast<long long>(gen_first) - between;
}

ActiveMask RunConfig::resolved_initial_mask() const
{
    const std::size_t m = objectives();
    if (mode == Mode::golden) {
        if (!utility) throw config_error("golden mode needs the true utility function");
        return ActiveMask::from_indices(m, utility->relevant);
    }
    if (initial_mask) return *initial_mask;
    if (detection.policy == DetectionConfig::Policy::threshold) return ActiveMask::all(m);
    // Fixed-k default: objectives 2, 4, ..., 2k (1-based), wrapping onto the
    // remaining odd ones when m < 2k.
    auto d = ActiveMask::none(m);
    std::size_t placed = 0;
    for (std::size_t i = 1; i < m && placed < detection.k; i += 2, ++placed) d.set(i, true);
    for (std::size_t i = 0; i < m && placed < detection.k; i += 2) {
        if (!d[i]) {
            d.set(i, true);
            ++placed;
        }
    }
    return d;
}

void RunConfig::validate() const
{
    const std::size_t m = objectives();
    if (m < 2) throw config_error("need at least two objectives");
    if (population < 2) throw config_error("population must hold at least two individuals");
    if (trailing_generations() < 0) {
        throw config_error("infeasible schedule: total_generations - gen_first - gen_between*(interactions-1) is negative");
    }
    if (utility) {
        RelevantSet c(utility->relevant, m);
        UtilityFunction uf(utility->kind, c, utility->weights, utility->ideal);
        (void)uf;
    }
    if (dm == DmKind::machine && !utility) throw config_error("machine decision maker needs a utility function");
    if (mode == Mode::golden) {
        if (!utility) throw config_error("golden mode needs the true utility function");
        if (dm == DmKind::human) throw config_error("golden mode has no interactions");
        if (utility->relevant.size() < 2) throw config_error("golden mode needs at least two relevant objectives");
        return;
    }
    if (interactions == 0) throw config_error("learning modes need at least one interaction");
    if (examples < 2) throw config_error("each interaction must show at least two solutions");
    if (examples > population) throw config_error("more examples than individuals");
    if (mode == Mode::detection) detection.validate(m);
    const auto d = resolved_initial_mask();
    if (d.size() != m) throw config_error("initial mask has the wrong length");
    if (d.count() < 2) throw config_error("initial mask must activate at least two objectives");
}

void RunConfig::apply_smoke()
{
    total_generations = 150;
    gen_first = 60;
    gen_between = 15;
}

std::uint64_t RunRecord::post_first_interaction_evaluations() const
{
    if (!counter_before_first_interaction) return 0;
    return counter.total() - counter_before_first_interaction->total();
}

std::uint64_t RunRecord::post_first_interaction_relevant() const
{
    if (!counter_before_first_interaction) return 0;
    return counter.relevant_total - counter_before_first_interaction->relevant_total;
}

ExampleSelection select_examples(const std::vector<Individual> &pop, const Ranking &ranking, std::size_t n,
                                 const Individual *previous_best)
{
    if (n > pop.size()) throw config_error("select_examples: more examples than individuals");
    ExampleSelection sel;
    const auto order = ranking.order();
    sel.picks.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    if (!previous_best || n == 0) return sel;
    const bool present = std::any_of(sel.picks.begin(), sel.picks.end(),
                                     [&](std::size_t i) { return same_decision(pop[i], *previous_best); });
    if (!present) {
        sel.picks.pop_back();
        sel.previous_best_inserted = true;
    }
    return sel;
}

Bcemoa::Bcemoa(RunConfig cfg) : Bcemoa(std::move(cfg), RestoreTag{})
{
    const auto start = std::chrono::steady_clock::now();
    m_mask = m_cfg.resolved_initial_mask();
    m_record.initial_mask = m_mask;

    m_pop = initial_population(*m_eval, m_mask, m_cfg.population, m_rng);
    m_record.initial_charges = m_eval->counter().total();

    if (m_cfg.mode == Mode::golden) {
        evolve_phase(m_cfg.gen_first);
        m_true_utility_criterion = true;
        evolve_phase(m_cfg.total_generations - m_cfg.gen_first);
        finish();
    } else {
        evolve_phase(m_cfg.gen_first);
        prepare_interaction();
    }
    m_record.wall_clock_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Bcemoa::Bcemoa(RunConfig cfg, RestoreTag) : m_cfg(std::move(cfg)), m_rng(m_cfg.seed), m_detect_rng(mix_seed(m_cfg.seed, detection_stream))
{
    m_cfg.validate();
    setup();
}

Bcemoa::~Bcemoa() = default;
Bcemoa::Bcemoa(Bcemoa &&) noexcept = default;
Bcemoa &Bcemoa::operator=(Bcemoa &&) noexcept = default;

void Bcemoa::setup()
{
    if (!m_cfg.rmnk_file.empty()) {
        m_problem = std::make_unique<Problem>(rmnk_load(m_cfg.rmnk_file));
    } else {
        m_problem = std::make_unique<Problem>(m_cfg.problem);
    }
    const std::size_t m = m_problem->objectives();
    RelevantSet c;
    if (m_cfg.utility) {
        c = RelevantSet(m_cfg.utility->relevant, m);
        m_uf.emplace(m_cfg.utility->kind, c, m_cfg.utility->weights, m_cfg.utility->ideal);
    } else {
        c = RelevantSet({}, m);
    }
    m_eval = std::make_unique<Evaluator>(*m_problem, c);
    m_record.config = m_cfg;
}

SecondaryCriterion Bcemoa::criterion() const
{
    if (m_true_utility_criterion) {
        const auto *uf = &*m_uf;
        return SecondaryCriterion::utility(SecondaryCriterion::Kind::true_utility,
                                           [uf](const Individual &ind) { return (*uf)(ind.f); });
    }
    if (m_model && !m_model->constant()) {
        const auto *model = &*m_model;
        const auto mask = m_mask;
        return SecondaryCriterion::utility(SecondaryCriterion::Kind::learned_utility,
                                           [model, mask](const Individual &ind) { return model->predict_full(ind.f, mask); });
    }
    return SecondaryCriterion::crowding();
}

void Bcemoa::evolve_phase(std::size_t generations)
{
    if (generations == 0) return;
    const auto before = m_eval->counter().total();
    EngineParams params;
    params.population_size = m_cfg.population;
    params.variation = m_cfg.variation;
    m_pop = evolve(std::move(m_pop), *m_eval, m_mask, generations, criterion(), m_rng, params);
    m_record.generation_charges += m_eval->counter().total() - before;
    m_record.phases.emplace_back(generations, m_mask.count());
}

std::vector<std::size_t> Bcemoa::select_examples()
{
    const auto ranking = rank_population(m_pop.individuals, m_mask, criterion());
    const Individual *prev = m_cfg.elitist_examples && m_previous_best ? &*m_previous_best : nullptr;
    auto sel = hobj::select_examples(m_pop.individuals, ranking, m_cfg.examples, prev);
    m_shown.clear();
    for (auto i : sel.picks) {
        m_eval->ensure_all(m_pop.individuals[i]);
        m_shown.push_back(m_pop.individuals[i]);
    }
    if (sel.previous_best_inserted) {
        m_eval->ensure_all(*m_previous_best);
        m_shown.push_back(*m_previous_best);
    }
    return sel.picks;
}

void Bcemoa::prepare_interaction()
{
    if (!m_record.counter_before_first_interaction) m_record.counter_before_first_interaction = m_eval->counter();
    const auto before = m_eval->counter().total();
    select_examples();
    InteractionRecord rec;
    rec.index = m_record.interactions.size() + 1;
    rec.generation = m_pop.generation;
    rec.mask_before = m_mask;
    rec.interaction_charges = m_eval->counter().total() - before;
    for (const auto &ind : m_shown) rec.shown.push_back(ind.f);
    m_pending = std::move(rec);
    m_phase = Phase::awaiting_ranking;
}

std::vector<ObjectiveVector> Bcemoa::candidates() const
{
    if (m_phase != Phase::awaiting_ranking) throw state_error("no interaction pending");
    return m_pending.shown;
}

std::vector<int> Bcemoa::machine_ranks() const
{
    if (!m_uf) throw state_error("no machine decision maker configured");
    return mdm_rank(candidates(), *m_uf);
}

void Bcemoa::submit(const std::vector<int> &ranks)
{
    if (m_phase != Phase::awaiting_ranking) throw state_error("no interaction pending");
    if (ranks.size() != m_shown.size()) {
        throw dimension_error("expected " + std::to_string(m_shown.size()) + " ranks, got " + std::to_string(ranks.size()));
    }
    for (int r : ranks) {
        if (r < 1) throw parameter_error("ranks must be positive integers");
    }
    const auto start = std::chrono::steady_clock::now();

    auto rec = std::move(m_pending);
    rec.ranks = ranks;
    m_archive.push_back(RankedBatch{rec.shown, ranks});

    if (m_uf) {
        for (const auto &f : rec.shown) {
            const double u = (*m_uf)(f);
            if (!m_best_so_far || u < *m_best_so_far) m_best_so_far = u;
        }
        rec.best_utility_so_far = m_best_so_far;
    }

    const auto best = static_cast<std::size_t>(std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
    m_previous_best = m_shown[best];

    if (m_cfg.mode == Mode::detection && !all_ranks_tied(m_archive)) {
        auto result = detect(m_archive, m_cfg.detection, m_detect_rng);
        if (result.mask.count() < 2) throw state_error("detection returned fewer than two objectives");
        rec.scores = std::move(result.scores);
        m_mask = std::move(result.mask);
    }
    rec.mask_after = m_mask;

    const auto before = m_eval->counter().total();
    for (auto &ind : m_pop.individuals) m_eval->ensure(ind, m_mask);
    rec.reevaluation_charges = m_eval->counter().total() - before;

    m_model = fit_utility(m_archive, m_mask, m_cfg.svm);
    ++m_record.model_fits;
    rec.model_constant = m_model->constant();
    rec.model_violation = m_model->training_violation();
    m_record.interactions.push_back(std::move(rec));

    if (m_record.interactions.size() < m_cfg.interactions) {
        evolve_phase(m_cfg.gen_between);
        m_record.interactions.back().counter_after = m_eval->counter();
        prepare_interaction();
    } else {
        evolve_phase(static_cast<std::size_t>(m_cfg.trailing_generations()));
        m_record.interactions.back().counter_after = m_eval->counter();
        finish();
    }
    m_record.wall_clock_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void Bcemoa::finish()
{
    const auto order = rank_population(m_pop.individuals, m_mask, criterion()).order();
    const auto &best = m_pop.individuals[order.front()];
    m_record.final_x = best.x;
    // reporting only; not charged to the run
    m_record.final_f = m_problem->evaluate_all(best.x);
    if (m_uf) m_record.final_utility = (*m_uf)(m_record.final_f);
    m_record.final_mask = m_mask;
    m_record.counter = m_eval->counter();
    m_phase = Phase::finished;
}

RunRecord run(const RunConfig &cfg)
{
    Bcemoa b(cfg);
    while (b.phase() == Bcemoa::Phase::awaiting_ranking) b.submit(b.machine_ranks());
    return b.record();
}

} // namespace hobj
