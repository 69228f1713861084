// HTTP service that lets a human play the decision maker of a paused run.
#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include <hobj/http_service.hpp>

namespace
{
httplib::Server *g_server = nullptr;

void stop(int)
{
    if (g_server) g_server->stop();
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Session service for human-in-the-loop runs"};
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string state_dir = "sessions";
    app.add_option("--host", host, "Bind address");
    app.add_option("--port", port, "Bind port")->check(CLI::Range(0, 65535));
    app.add_option("--state-dir", state_dir, "Directory for session checkpoints");
    CLI11_PARSE(app, argc, argv);

    try {
        hobj::SessionManager sessions(state_dir);
        httplib::Server server;
        hobj::mount_session_routes(server, sessions);
        g_server = &server;
        std::signal(SIGINT, stop);
        std::signal(SIGTERM, stop);
        if (port == 0) port = server.bind_to_any_port(host);
        else if (!server.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
        std::cout << "listening on " << host << ":" << port << " (" << sessions.size() << " sessions restored)" << std::endl;
        server.listen_after_bind();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
