#include <httplib.h>

#include <hobj/errors.hpp>
#include <hobj/http_service.hpp>

using nlohmann::json;

namespace hobj
{

namespace
{

void reply(httplib::Response &res, int status, const json &body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void error(httplib::Response &res, int status, const std::string &kind, const std::string &message)
{
    reply(res, status, {{"error", kind}, {"message", message}});
}

template <typename F> void guarded(httplib::Response &res, F &&f)
{
    try {
        f();
    } catch (const session_not_found &e) {
        error(res, 404, "not_found", e.what());
    } catch (const session_conflict &e) {
        error(res, 409, "conflict", e.what());
    } catch (const state_error &e) {
        error(res, 409, "conflict", e.what());
    } catch (const json::exception &e) {
        error(res, 400, "validation", e.what());
    } catch (const std::invalid_argument &e) {
        // config, parameter, dimension and data errors
        error(res, 400, "validation", e.what());
    } catch (const std::domain_error &e) {
        error(res, 400, "validation", e.what());
    } catch (const std::exception &e) {
        error(res, 500, "internal", e.what());
    }
}

json parse_body(const httplib::Request &req)
{
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
}

} // namespace

void mount_session_routes(httplib::Server &server, SessionManager &sessions)
{
    server.Post("/sessions", [&sessions](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] {
            const auto id = sessions.create(parse_body(req));
            reply(res, 201, sessions.status(id));
        });
    });
    server.Get(R"(/sessions/([0-9a-zA-Z]+)/candidates)", [&sessions](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] { reply(res, 200, sessions.candidates(req.matches[1])); });
    });
    server.Post(R"(/sessions/([0-9a-zA-Z]+)/ranking)", [&sessions](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] { reply(res, 200, sessions.submit(req.matches[1], parse_body(req))); });
    });
    server.Get(R"(/sessions/([0-9a-zA-Z]+))", [&sessions](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] { reply(res, 200, sessions.status(req.matches[1])); });
    });
}

} // namespace hobj
