#ifndef HOBJ_HTTP_SERVICE_HPP
#define HOBJ_HTTP_SERVICE_HPP

#include <hobj/session.hpp>

namespace httplib
{
class Server;
}

namespace hobj
{

// Registers the session routes on an httplib server:
//   POST /sessions                  create, body = RunConfig JSON
//   GET  /sessions/{id}/candidates  pending candidates
//   POST /sessions/{id}/ranking     body = {"ranks": [...]}
//   GET  /sessions/{id}             status and history
// Errors map to 400 (validation), 404 (unknown id) and 409 (conflict).
void mount_session_routes(httplib::Server &server, SessionManager &sessions);

} // namespace hobj

#endif
