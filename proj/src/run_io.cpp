#include <hobj/bcemoa.hpp>
#include <hobj/csv.hpp>
#include <hobj/errors.hpp>

namespace hobj
{

using nlohmann::json;

namespace
{

json mask_json(const ActiveMask &d)
{
    std::vector<std::size_t> one_based;
    for (auto i : d.indices()) one_based.push_back(i + 1);
    return json{{"bits", d.str()}, {"active", one_based}};
}

ActiveMask mask_from_json(const json &j)
{
    if (j.is_array()) {
        std::vector<std::uint8_t> bits;
        for (const auto &b : j) bits.push_back(b.get<int>() ? 1 : 0);
        return ActiveMask(std::move(bits));
    }
    const auto s = j.at("bits").get<std::string>();
    std::vector<std::uint8_t> bits;
    for (char c : s) bits.push_back(c == '1' ? 1 : 0);
    return ActiveMask(std::move(bits));
}

json counter_json(const EvalCounter &c)
{
    return json{{"per_objective", c.per_objective}, {"relevant", c.relevant_total}, {"irrelevant", c.irrelevant_total},
                {"total", c.total()}};
}

EvalCounter counter_from_json(const json &j)
{
    EvalCounter c;
    c.per_objective = j.at("per_objective").get<std::vector<std::uint64_t>>();
    c.relevant_total = j.at("relevant").get<std::uint64_t>();
    c.irrelevant_total = j.at("irrelevant").get<std::uint64_t>();
    return c;
}

json optional_json(const std::optional<double> &v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json &j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json individual_json(const Individual &ind)
{
    return json{{"x", ind.x}, {"f", ind.f}, {"evaluated", ind.evaluated}};
}

Individual individual_from_json(const json &j)
{
    Individual ind;
    ind.x = j.at("x").get<DecisionVector>();
    ind.f = j.at("f").get<ObjectiveVector>();
    ind.evaluated = j.at("evaluated").get<std::vector<std::uint8_t>>();
    return ind;
}

json interaction_json(const InteractionRecord &r)
{
    return json{{"index", r.index},
                {"generation", r.generation},
                {"shown", r.shown},
                {"ranks", r.ranks},
                {"mask_before", mask_json(r.mask_before)},
                {"mask_after", mask_json(r.mask_after)},
                {"scores", r.scores},
                {"best_utility_so_far", optional_json(r.best_utility_so_far)},
                {"interaction_charges", r.interaction_charges},
                {"reevaluation_charges", r.reevaluation_charges},
                {"counter_after", counter_json(r.counter_after)},
                {"model_constant", r.model_constant},
                {"model_violation", r.model_violation}};
}

InteractionRecord interaction_from_json(const json &r)
{
    InteractionRecord ir;
    ir.index = r.at("index").get<std::size_t>();
    ir.generation = r.at("generation").get<std::size_t>();
    ir.shown = r.at("shown").get<std::vector<ObjectiveVector>>();
    ir.ranks = r.at("ranks").get<std::vector<int>>();
    ir.mask_before = mask_from_json(r.at("mask_before"));
    ir.mask_after = mask_from_json(r.at("mask_after"));
    ir.scores = r.at("scores").get<std::vector<double>>();
    ir.best_utility_so_far = optional_from_json(r.at("best_utility_so_far"));
    ir.interaction_charges = r.at("interaction_charges").get<std::uint64_t>();
    ir.reevaluation_charges = r.at("reevaluation_charges").get<std::uint64_t>();
    if (!r.at("counter_after").is_null()) ir.counter_after = counter_from_json(r.at("counter_after"));
    ir.model_constant = r.at("model_constant").get<bool>();
    ir.model_violation = r.at("model_violation").get<double>();
    return ir;
}

std::string join_active(const ActiveMask &d)
{
    std::string s;
    for (auto i : d.indices()) {
        if (!s.empty()) s += ';';
        s += std::to_string(i + 1);
    }
    return s;
}

std::string opt_str(const std::optional<double> &v)
{
    return v ? format_double(*v) : std::string{};
}

} // namespace

json to_json(const RunConfig &cfg)
{
    json j;
    if (const auto *d = std::get_if<DtlzSpec>(&cfg.problem)) {
        j["problem"] = {{"type", "dtlz"}, {"variant", d->variant}, {"m", d->m}, {"n", d->n}};
    } else {
        const auto &r = std::get<RmnkParams>(cfg.problem);
        j["problem"] = {{"type", "rmnk"}, {"m", r.m}, {"n", r.n}, {"K", r.K}, {"rho", r.rho}, {"seed", r.seed}};
        if (!cfg.rmnk_file.empty()) j["problem"]["file"] = cfg.rmnk_file;
    }
    if (cfg.utility) {
        std::vector<std::size_t> one_based;
        for (auto i : cfg.utility->relevant) one_based.push_back(i + 1);
        j["utility"] = {{"kind", to_string(cfg.utility->kind)}, {"relevant", one_based}};
        if (!cfg.utility->weights.empty()) j["utility"]["weights"] = cfg.utility->weights;
        if (!cfg.utility->ideal.empty()) j["utility"]["ideal"] = cfg.utility->ideal;
    } else {
        j["utility"] = nullptr;
    }
    j["mode"] = to_string(cfg.mode);
    j["dm"] = cfg.dm == DmKind::machine ? "machine" : "human";
    j["detection"] = {{"method", cfg.detection.method == DetectionConfig::Method::univariate ? "univariate" : "rfe"},
                      {"policy", cfg.detection.policy == DetectionConfig::Policy::fixed_k ? "fixed_k" : "threshold_tau"},
                      {"k", cfg.detection.k},
                      {"tau", cfg.detection.tau},
                      {"permutations", cfg.detection.permutations}};
    j["interactions"] = cfg.interactions;
    j["examples"] = cfg.examples;
    j["gen_first"] = cfg.gen_first;
    j["gen_between"] = cfg.gen_between;
    j["total_generations"] = cfg.total_generations;
    j["population"] = cfg.population;
    if (cfg.initial_mask) {
        j["initial_mask"] = cfg.initial_mask->bits();
    }
    j["seed"] = cfg.seed;
    j["svm"] = {{"C", cfg.svm.C},
                {"tolerance", cfg.svm.tolerance},
                {"max_iterations", cfg.svm.max_iterations},
                {"kernel", cfg.svm.kernel == SvmParams::Kernel::linear ? "linear" : "rbf"},
                {"gamma", cfg.svm.gamma}};
    const auto &v = cfg.variation;
    j["variation"] = {{"sbx_probability", v.sbx_probability},
                      {"sbx_eta", v.sbx_eta},
                      {"mutation_probability", v.mutation_probability},
                      {"mutation_eta", v.mutation_eta},
                      {"uniform_crossover_probability", v.uniform_crossover_probability},
                      {"bit_flip_rate", v.bit_flip_rate}};
    j["elitist_examples"] = cfg.elitist_examples;
    return j;
}

RunConfig run_config_from_json(const json &j)
{
    RunConfig cfg;
    try {
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("problem")) {
            const auto &p = j.at("problem");
            const auto type = p.at("type").get<std::string>();
            if (type == "dtlz") {
                cfg.problem = DtlzSpec::make(p.at("variant").get<int>(), p.at("m").get<std::size_t>(), p.value("n", std::size_t{0}));
            } else if (type == "rmnk") {
                cfg.problem = RmnkParams::make(p.at("m").get<std::size_t>(), p.at("K").get<std::size_t>(),
                                               p.value("rho", 0.0), p.value("seed", cfg.seed), p.value("n", std::size_t{0}));
                cfg.rmnk_file = p.value("file", std::string{});
            } else {
                throw config_error("unknown problem type '" + type + "'");
            }
        }
        if (j.contains("utility") && !j.at("utility").is_null()) {
            const auto &u = j.at("utility");
            UtilitySpec spec;
            spec.kind = parse_utility_kind(u.at("kind").get<std::string>());
            for (auto i : u.at("relevant").get<std::vector<std::size_t>>()) {
                if (i == 0) throw config_error("relevant objectives are 1-based");
                spec.relevant.push_back(i - 1);
            }
            spec.weights = u.value("weights", std::vector<double>{});
            spec.ideal = u.value("ideal", std::vector<double>{});
            cfg.utility = spec;
        } else {
            cfg.utility.reset();
        }
        if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("dm")) {
            const auto dm = j.at("dm").get<std::string>();
            if (dm == "machine") cfg.dm = DmKind::machine;
            else if (dm == "human") cfg.dm = DmKind::human;
            else throw config_error("unknown dm '" + dm + "'");
        }
        if (j.contains("detection")) {
            const auto &d = j.at("detection");
            if (d.contains("method")) cfg.detection.method = parse_method(d.at("method").get<std::string>());
            if (d.contains("policy")) cfg.detection.policy = parse_policy(d.at("policy").get<std::string>());
            cfg.detection.k = d.value("k", cfg.detection.k);
            cfg.detection.tau = d.value("tau", cfg.detection.tau);
            cfg.detection.permutations = d.value("permutations", cfg.detection.permutations);
        }
        cfg.interactions = j.value("interactions", cfg.interactions);
        cfg.examples = j.value("examples", cfg.examples);
        cfg.gen_first = j.value("gen_first", cfg.gen_first);
        cfg.gen_between = j.value("gen_between", cfg.gen_between);
        cfg.total_generations = j.value("total_generations", cfg.total_generations);
        cfg.population = j.value("population", cfg.population);
        if (j.contains("initial_mask") && !j.at("initial_mask").is_null()) cfg.initial_mask = mask_from_json(j.at("initial_mask"));
        if (j.contains("svm")) {
            const auto &s = j.at("svm");
            cfg.svm.C = s.value("C", cfg.svm.C);
            cfg.svm.tolerance = s.value("tolerance", cfg.svm.tolerance);
            cfg.svm.max_iterations = s.value("max_iterations", cfg.svm.max_iterations);
            const auto kernel = s.value("kernel", std::string("linear"));
            if (kernel == "linear") cfg.svm.kernel = SvmParams::Kernel::linear;
            else if (kernel == "rbf") cfg.svm.kernel = SvmParams::Kernel::rbf;
            else throw config_error("unknown svm kernel '" + kernel + "'");
            cfg.svm.gamma = s.value("gamma", cfg.svm.gamma);
        }
        if (j.contains("variation")) {
            const auto &v = j.at("variation");
            auto &o = cfg.variation;
            o.sbx_probability = v.value("sbx_probability", o.sbx_probability);
            o.sbx_eta = v.value("sbx_eta", o.sbx_eta);
            o.mutation_probability = v.value("mutation_probability", o.mutation_probability);
            o.mutation_eta = v.value("mutation_eta", o.mutation_eta);
            o.uniform_crossover_probability = v.value("uniform_crossover_probability", o.uniform_crossover_probability);
            o.bit_flip_rate = v.value("bit_flip_rate", o.bit_flip_rate);
        }
        cfg.elitist_examples = j.value("elitist_examples", cfg.elitist_examples);
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed run config: ") + e.what());
    } catch (const parameter_error &e) {
        throw config_error(e.what());
    }
    return cfg;
}

json to_json(const RunRecord &rec)
{
    json j;
    j["format"] = "runrecord-v1";
    j["config"] = to_json(rec.config);
    j["initial_mask"] = mask_json(rec.initial_mask);
    j["final_mask"] = mask_json(rec.final_mask);
    json inter = json::array();
    for (const auto &r : rec.interactions) inter.push_back(interaction_json(r));
    j["interactions"] = std::move(inter);
    j["final"] = {{"x", rec.final_x}, {"f", rec.final_f}, {"utility", optional_json(rec.final_utility)}};
    j["counter"] = counter_json(rec.counter);
    j["counter_before_first_interaction"] =
        rec.counter_before_first_interaction ? counter_json(*rec.counter_before_first_interaction) : json(nullptr);
    j["post_first_interaction"] = {{"total", rec.post_first_interaction_evaluations()},
                                   {"relevant", rec.post_first_interaction_relevant()}};
    j["initial_charges"] = rec.initial_charges;
    j["generation_charges"] = rec.generation_charges;
    j["phases"] = rec.phases;
    j["model_fits"] = rec.model_fits;
    return j;
}

RunRecord run_record_from_json(const json &j)
{
    if (j.value("format", std::string{}) != "runrecord-v1") throw config_error("not a runrecord-v1 document");
    RunRecord rec;
    rec.config = run_config_from_json(j.at("config"));
    rec.initial_mask = mask_from_json(j.at("initial_mask"));
    rec.final_mask = mask_from_json(j.at("final_mask"));
    for (const auto &r : j.at("interactions")) rec.interactions.push_back(interaction_from_json(r));
    rec.final_x = j.at("final").at("x").get<DecisionVector>();
    rec.final_f = j.at("final").at("f").get<ObjectiveVector>();
    rec.final_utility = optional_from_json(j.at("final").at("utility"));
    rec.counter = counter_from_json(j.at("counter"));
    if (!j.at("counter_before_first_interaction").is_null()) {
        rec.counter_before_first_interaction = counter_from_json(j.at("counter_before_first_interaction"));
    }
    rec.initial_charges = j.at("initial_charges").get<std::uint64_t>();
    rec.generation_charges = j.at("generation_charges").get<std::uint64_t>();
    rec.phases = j.at("phases").get<std::vector<std::pair<std::size_t, std::size_t>>>();
    rec.model_fits = j.at("model_fits").get<std::size_t>();
    return rec;
}

std::string run_record_csv_header()
{
    return csv_row({"schema", "seed", "mode", "variant", "row_type", "interaction", "generation", "active_count",
                    "active_set", "best_utility_so_far", "evals_total", "evals_relevant", "evals_irrelevant",
                    "final_utility"});
}

std::vector<std::string> run_record_csv_rows(const RunRecord &rec)
{
    const auto &cfg = rec.config;
    const std::string variant = cfg.mode == Mode::detection ? cfg.detection.variant_name() : "";
    std::vector<std::string> rows;
    for (const auto &r : rec.interactions) {
        rows.push_back(csv_row({"ho-run-v1", std::to_string(cfg.seed), to_string(cfg.mode), variant, "interaction",
                                std::to_string(r.index), std::to_string(r.generation),
                                std::to_string(r.mask_after.count()), join_active(r.mask_after),
                                opt_str(r.best_utility_so_far), std::to_string(r.counter_after.total()),
                                std::to_string(r.counter_after.relevant_total),
                                std::to_string(r.counter_after.irrelevant_total), ""}));
    }
    rows.push_back(csv_row({"ho-run-v1", std::to_string(cfg.seed), to_string(cfg.mode), variant, "final", "",
                            std::to_string(cfg.total_generations), std::to_string(rec.final_mask.count()),
                            join_active(rec.final_mask), "", std::to_string(rec.counter.total()),
                            std::to_string(rec.counter.relevant_total), std::to_string(rec.counter.irrelevant_total),
                            opt_str(rec.final_utility)}));
    return rows;
}

json Bcemoa::checkpoint() const
{
    json j;
    j["format"] = "bcemoa-checkpoint-v1";
    j["config"] = to_json(m_cfg);
    j["phase"] = m_phase == Phase::finished ? "finished" : "awaiting_ranking";
    j["rng"] = m_rng.state();
    j["detect_rng"] = m_detect_rng.state();
    j["generation"] = m_pop.generation;
    json pop = json::array();
    for (const auto &ind : m_pop.individuals) pop.push_back(individual_json(ind));
    j["population"] = std::move(pop);
    j["mask"] = m_mask.bits();
    j["counter"] = counter_json(m_eval->counter());
    json archive = json::array();
    for (const auto &b : m_archive) archive.push_back({{"shown", b.shown}, {"ranks", b.ranks}});
    j["archive"] = std::move(archive);
    j["previous_best"] = m_previous_best ? individual_json(*m_previous_best) : json(nullptr);
    json shown = json::array();
    for (const auto &ind : m_shown) shown.push_back(individual_json(ind));
    j["shown"] = std::move(shown);
    j["best_so_far"] = optional_json(m_best_so_far);
    j["pending"] = interaction_json(m_pending);
    j["record"] = to_json(m_record);
    j["record_wall_clock"] = m_record.wall_clock_seconds;
    return j;
}

Bcemoa Bcemoa::restore(const json &j)
{
    if (j.value("format", std::string{}) != "bcemoa-checkpoint-v1") throw config_error("not a bcemoa checkpoint");
    Bcemoa b(run_config_from_json(j.at("config")), RestoreTag{});
    b.m_phase = j.at("phase").get<std::string>() == "finished" ? Phase::finished : Phase::awaiting_ranking;
    b.m_rng.restore(j.at("rng").get<std::string>());
    b.m_detect_rng.restore(j.at("detect_rng").get<std::string>());
    b.m_pop.generation = j.at("generation").get<std::size_t>();
    for (const auto &ind : j.at("population")) b.m_pop.individuals.push_back(individual_from_json(ind));
    b.m_mask = mask_from_json(j.at("mask"));
    b.m_eval->counter() = counter_from_json(j.at("counter"));
    for (const auto &bt : j.at("archive")) {
        b.m_archive.push_back(RankedBatch{bt.at("shown").get<std::vector<ObjectiveVector>>(), bt.at("ranks").get<std::vector<int>>()});
    }
    if (!j.at("previous_best").is_null()) b.m_previous_best = individual_from_json(j.at("previous_best"));
    for (const auto &ind : j.at("shown")) b.m_shown.push_back(individual_from_json(ind));
    b.m_best_so_far = optional_from_json(j.at("best_so_far"));
    b.m_record = run_record_from_json(j.at("record"));
    b.m_record.config = b.m_cfg;
    b.m_record.wall_clock_seconds = j.value("record_wall_clock", 0.0);
    b.m_pending = interaction_from_json(j.at("pending"));
    if (!b.m_archive.empty()) b.m_model = fit_utility(b.m_archive, b.m_mask, b.m_cfg.svm);
    return b;
}

} // namespace hobj
