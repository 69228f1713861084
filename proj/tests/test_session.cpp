#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <future>
#include <thread>

#include <httplib.h>

#include <hobj/bcemoa.hpp>
#include <hobj/http_service.hpp>
#include <hobj/mdm.hpp>

using namespace hobj;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

/// Service on an ephemeral localhost port for the lifetime of the fixture.
struct Service {
    explicit Service(std::string dir = {}) : sessions(std::move(dir))
    {
        mount_session_routes(server, sessions);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Service()
    {
        server.stop();
        thread.join();
    }

    httplib::Client client() const
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(120, 0);
        return c;
    }

    SessionManager sessions;
    httplib::Server server;
    int port = 0;
    std::thread thread;
};

json smoke_config(std::uint64_t seed)
{
    return {{"problem", {{"type", "dtlz"}, {"variant", 2}, {"m", 4}}},
            {"mode", "detection"},
            {"interactions", 3},
            {"gen_first", 60},
            {"gen_between", 15},
            {"total_generations", 150},
            {"population", 40},
            {"seed", seed}};
}

std::string create(httplib::Client &c, const json &cfg)
{
    auto res = c.Post("/sessions", cfg.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    return json::parse(res->body).at("id").get<std::string>();
}

std::vector<int> uf1_ranks(const json &cands)
{
    UtilityFunction uf(UtilityKind::uf1, RelevantSet({0, 1}, 4));
    std::vector<ObjectiveVector> shown;
    for (const auto &c : cands.at("candidates")) shown.push_back(c.at("objectives").get<ObjectiveVector>());
    return mdm_rank(shown, uf);
}

json post_ranks(httplib::Client &c, const std::string &id, const std::vector<int> &r, int expect)
{
    auto res = c.Post("/sessions/" + id + "/ranking", json{{"ranks", r}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
}

} // namespace

TEST_CASE("create, inspect and finish a session")
{
    Service svc;
    auto c = svc.client();

    auto res = c.Post("/sessions", "{}", "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    auto st = json::parse(res->body);
    CHECK(st.at("phase") == "awaiting_ranking");
    const auto id = st.at("id").get<std::string>();

    auto cand = c.Get("/sessions/" + id + "/candidates");
    REQUIRE(cand);
    CHECK(cand->status == 200);
    auto cj = json::parse(cand->body);
    REQUIRE(cj.at("candidates").size() == 5);
    for (const auto &k : cj.at("candidates")) CHECK(k.at("objectives").size() == 4);
    CHECK(cj.at("mask") == st.at("mask"));
    CHECK(cj.at("interaction") == 1);

    CHECK(create(c, json::object()) != id);
}

TEST_CASE("validation, not-found and conflict mapping")
{
    Service svc;
    auto c = svc.client();

    auto bad = smoke_config(1);
    bad["gen_between"] = 100;
    auto res = c.Post("/sessions", bad.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(json::parse(res->body).at("error") == "validation");

    res = c.Post("/sessions", "{ nope", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    auto golden = smoke_config(1);
    golden["mode"] = "golden";
    golden["utility"] = {{"kind", "UF1"}, {"relevant", {1, 2}}};
    res = c.Post("/sessions", golden.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    auto missing = c.Get("/sessions/deadbeef");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(c.Get("/sessions/deadbeef/candidates")->status == 404);

    const auto id = create(c, smoke_config(2));
    post_ranks(c, id, {1, 2, 3, 4}, 400);
    post_ranks(c, id, {1, 2, 0, 4, 5}, 400);
    post_ranks(c, id, {1, 2, 2, 4, -5}, 400);
    auto raw = c.Post("/sessions/" + id + "/ranking", R"({"ranks": [1, "2", 3, 4, 5]})", "application/json");
    CHECK(raw->status == 400);

    auto after = post_ranks(c, id, {1, 2, 2, 4, 5}, 200);
    CHECK(after.at("history").at(0).at("ranks") == json::array({1, 2, 2, 4, 5}));
    post_ranks(c, id, {5, 4, 3, 2, 1}, 200);
    auto done = post_ranks(c, id, {1, 1, 1, 1, 1}, 200);
    CHECK(done.at("phase") == "finished");
    CHECK(done.at("final").at("f").size() == 4);

    CHECK(c.Get("/sessions/" + id + "/candidates")->status == 409);
    post_ranks(c, id, {1, 2, 3, 4, 5}, 409);
    CHECK(c.Get("/sessions/" + id)->status == 200);
}

TEST_CASE("counters stay frozen while awaiting a ranking")
{
    Service svc;
    auto c = svc.client();
    const auto id = create(c, smoke_config(3));
    auto before = json::parse(c.Get("/sessions/" + id)->body).at("evaluations");
    c.Get("/sessions/" + id + "/candidates");
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    c.Get("/sessions/" + id + "/candidates");
    CHECK(json::parse(c.Get("/sessions/" + id)->body).at("evaluations") == before);
}

TEST_CASE("session replay reproduces the machine decision maker run")
{
    Service svc;
    auto c = svc.client();
    for (std::uint64_t seed : {11u, 12u}) {
        const auto id = create(c, smoke_config(seed));
        json st;
        for (int k = 0; k < 3; ++k) {
            auto cands = json::parse(c.Get("/sessions/" + id + "/candidates")->body);
            CHECK(cands.at("candidates").size() == 5);
            st = post_ranks(c, id, uf1_ranks(cands), 200);
            CHECK(st.at("mask") == st.at("history").back().at("mask_after"));
        }
        REQUIRE(st.at("phase") == "finished");

        auto cfg_json = smoke_config(seed);
        cfg_json["utility"] = {{"kind", "UF1"}, {"relevant", {1, 2}}};
        auto rec = run(run_config_from_json(cfg_json));
        CHECK(st.at("final").at("x").get<DecisionVector>() == rec.final_x);
        CHECK(st.at("final").at("f").get<ObjectiveVector>() == rec.final_f);
        for (std::size_t k = 0; k < rec.interactions.size(); ++k) {
            CHECK(st.at("history").at(k).at("mask_after").at("bits") == rec.interactions[k].mask_after.str());
        }
    }
}

TEST_CASE("concurrent submissions are rejected")
{
    Service svc;
    auto c = svc.client();
    auto cfg = smoke_config(4);
    cfg["population"] = 100;
    cfg["interactions"] = 2;
    cfg["gen_first"] = 5;
    cfg["gen_between"] = 1500;
    cfg["total_generations"] = 1505;
    const auto id = create(c, cfg);

    auto slow = std::async(std::launch::async, [&] {
        auto c2 = svc.client();
        return c2.Post("/sessions/" + id + "/ranking", R"({"ranks": [1, 2, 3, 4, 5]})", "application/json")->status;
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    auto second = c.Post("/sessions/" + id + "/ranking", R"({"ranks": [1, 2, 3, 4, 5]})", "application/json");
    REQUIRE(second);
    CHECK(second->status == 409);
    CHECK(slow.get() == 200);
    auto st = json::parse(c.Get("/sessions/" + id)->body);
    CHECK(st.at("history").size() == 1);
}

TEST_CASE("sessions survive a service restart")
{
    const auto dir = fs::temp_directory_path() / "hobj_session_state";
    fs::remove_all(dir);
    std::string id;
    json mid;
    {
        Service svc(dir.string());
        auto c = svc.client();
        id = create(c, smoke_config(21));
        auto cands = json::parse(c.Get("/sessions/" + id + "/candidates")->body);
        post_ranks(c, id, uf1_ranks(cands), 200);
        mid = json::parse(c.Get("/sessions/" + id + "/candidates")->body);
    }
    CHECK(fs::exists(dir / (id + ".json")));
    Service again(dir.string());
    auto c = again.client();
    auto cands = json::parse(c.Get("/sessions/" + id + "/candidates")->body);
    CHECK(cands == mid);
    json st;
    for (int k = 0; k < 2; ++k) {
        st = post_ranks(c, id, uf1_ranks(cands), 200);
        if (st.at("phase") == "awaiting_ranking") cands = json::parse(c.Get("/sessions/" + id + "/candidates")->body);
    }
    auto cfg_json = smoke_config(21);
    cfg_json["utility"] = {{"kind", "UF1"}, {"relevant", {1, 2}}};
    CHECK(st.at("final").at("x").get<DecisionVector>() == run(run_config_from_json(cfg_json)).final_x);
    fs::remove_all(dir);
}
