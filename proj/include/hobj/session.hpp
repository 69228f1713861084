#ifndef HOBJ_SESSION_HPP
#define HOBJ_SESSION_HPP

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include <hobj/bcemoa.hpp>

namespace hobj
{

struct session_not_found : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wrong phase, or another request is already mutating the session.
struct session_conflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Paused interactive runs driven by an external (human) decision maker.
/**
 * Each session owns a Bcemoa state machine. Mutations of one session are
 * serialized by its own mutex; a submission that finds the mutex taken is
 * rejected instead of queued. When a state directory is given, every session
 * is written there as a checkpoint after each change and reloaded on startup.
 */
class SessionManager
{
public:
    explicit SessionManager(std::string state_dir = {});

    // Body is a RunConfig document; dm defaults to human. Returns the new id.
    std::string create(const nlohmann::json &config);

    nlohmann::json candidates(const std::string &id) const;
    nlohmann::json submit(const std::string &id, const nlohmann::json &ranks);
    nlohmann::json status(const std::string &id) const;

    std::size_t size() const;

private:
    struct Session {
        explicit Session(Bcemoa b) : machine(std::move(b)) {}
        mutable std::mutex mutex;
        Bcemoa machine;
    };

    std::shared_ptr<Session> find(const std::string &id) const;
    void persist(const std::string &id, const Session &s) const;
    std::string fresh_id();

    std::string m_dir;
    mutable std::mutex m_mutex;
    std::map<std::string, std::shared_ptr<Session>> m_sessions;
};

} // namespace hobj

#endif
