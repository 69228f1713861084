#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <hobj/errors.hpp>
#include <hobj/session.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace hobj
{

namespace
{

json mask_json(const ActiveMask &d)
{
    std::vector<std::size_t> active;
    for (auto i : d.indices()) active.push_back(i + 1);
    return {{"bits", d.str()}, {"active", active}};
}

std::string phase_name(Bcemoa::Phase p)
{
    return p == Bcemoa::Phase::finished ? "finished" : "awaiting_ranking";
}

} // namespace

SessionManager::SessionManager(std::string state_dir) : m_dir(std::move(state_dir))
{
    if (m_dir.empty()) return;
    fs::create_directories(m_dir);
    for (const auto &e : fs::directory_iterator(m_dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        try {
            std::ifstream in(e.path());
            auto b = Bcemoa::restore(json::parse(in));
            m_sessions.emplace(e.path().stem().string(), std::make_shared<Session>(std::move(b)));
        } catch (const std::exception &ex) {
            std::cerr << "warning: ignoring session file " << e.path().string() << ": " << ex.what() << "\n";
        }
    }
}

std::string SessionManager::fresh_id()
{
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    while (true) {
        std::ostringstream ss;
        ss << std::hex << gen() << gen();
        auto id = ss.str();
        if (!m_sessions.count(id)) return id;
    }
}

std::string SessionManager::create(const json &config)
{
    if (!config.is_object()) throw config_error("session config must be a JSON object");
    json body = config;
    if (!body.contains("dm")) body["dm"] = "human";
    if (!body.contains("mode")) body["mode"] = "detection";
    auto cfg = run_config_from_json(body);
    if (cfg.mode == Mode::golden) throw config_error("golden mode has no interactions to serve");
    // evolves up to the first interaction outside the manager lock
    auto session = std::make_shared<Session>(Bcemoa(std::move(cfg)));
    std::string id;
    {
        std::lock_guard<std::mutex> lock(m_mutex);
        id = fresh_id();
        m_sessions.emplace(id, session);
    }
    std::lock_guard<std::mutex> lock(session->mutex);
    persist(id, *session);
    return id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string &id) const
{
    std::lock_guard<std::mutex> lock(m_mutex);
    auto it = m_sessions.find(id);
    if (it == m_sessions.end()) throw session_not_found("unknown session '" + id + "'");
    return it->second;
}

json SessionManager::candidates(const std::string &id) const
{
    auto s = find(id);
    std::lock_guard<std::mutex> lock(s->mutex);
    const auto &b = s->machine;
    if (b.phase() != Bcemoa::Phase::awaiting_ranking) throw session_conflict("session has finished");
    json list = json::array();
    const auto cands = b.candidates();
    for (std::size_t k = 0; k < cands.size(); ++k) list.push_back({{"index", k}, {"objectives", cands[k]}});
    json j = {{"id", id},
              {"interaction", b.interaction_index()},
              {"objectives", b.config().objectives()},
              {"mask", mask_json(b.mask())},
              {"candidates", list}};
    const auto &hist = b.record().interactions;
    j["last_scores"] = hist.empty() ? json(nullptr) : json(hist.back().scores);
    return j;
}

json SessionManager::submit(const std::string &id, const json &body)
{
    auto s = find(id);
    std::unique_lock<std::mutex> lock(s->mutex, std::try_to_lock);
    if (!lock.owns_lock()) throw session_conflict("a ranking for this session is already being processed");
    auto &b = s->machine;
    if (b.phase() != Bcemoa::Phase::awaiting_ranking) throw session_conflict("session has finished");

    const json *ranks_json = &body;
    if (body.is_object()) {
        if (!body.contains("ranks")) throw parameter_error("body must carry a \"ranks\" array");
        ranks_json = &body.at("ranks");
    }
    if (!ranks_json->is_array()) throw parameter_error("ranks must be an array of positive integers");
    std::vector<int> ranks;
    for (const auto &r : *ranks_json) {
        if (!r.is_number_integer()) throw parameter_error("ranks must be an array of positive integers");
        const auto v = r.get<long long>();
        if (v < 1 || v > 1000000) throw parameter_error("ranks must be positive integers");
        ranks.push_back(static_cast<int>(v));
    }
    b.submit(ranks);
    persist(id, *s);
    lock.unlock();
    return status(id);
}

json SessionManager::status(const std::string &id) const
{
    auto s = find(id);
    std::lock_guard<std::mutex> lock(s->mutex);
    const auto &b = s->machine;
    const auto &rec = b.record();
    json history = json::array();
    for (const auto &it : rec.interactions) {
        history.push_back({{"index", it.index},
                           {"generation", it.generation},
                           {"shown", it.shown},
                           {"ranks", it.ranks},
                           {"mask_before", mask_json(it.mask_before)},
                           {"mask_after", mask_json(it.mask_after)},
                           {"scores", it.scores}});
    }
    json j = {{"id", id},
              {"phase", phase_name(b.phase())},
              {"interaction", b.interaction_index()},
              {"interactions", b.config().interactions},
              {"mask", mask_json(b.mask())},
              {"initial_mask", mask_json(rec.initial_mask)},
              {"history", history},
              {"evaluations", {{"total", b.counter().total()}}}};
    if (b.phase() == Bcemoa::Phase::finished) {
        j["final"] = {{"x", rec.final_x}, {"f", rec.final_f}};
    } else {
        j["final"] = nullptr;
    }
    return j;
}

std::size_t SessionManager::size() const
{
    std::lock_guard<std::mutex> lock(m_mutex);
    return m_sessions.size();
}

void SessionManager::persist(const std::string &id, const Session &s) const
{
    if (m_dir.empty()) return;
    const auto path = fs::path(m_dir) / (id + ".json");
    const auto tmp = fs::path(m_dir) / (id + ".json.tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw state_error("cannot write session checkpoint " + tmp.string());
        out << s.machine.checkpoint().dump();
    }
    fs::rename(tmp, path);
}

} // namespace hobj
