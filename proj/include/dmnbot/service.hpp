#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dmnbot/bundle_io.hpp"
#include "dmnbot/dialog.hpp"

namespace httplib {
class Server;
}

namespace dmnbot {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "data";
    std::uint64_t seed = 0;  // used when a request gives none
    std::size_t max_phrases = 500;
    std::optional<std::filesystem::path> static_dir;
    std::chrono::seconds session_idle{30 * 60};
};

// Parses "host:port", ":port" or "port". Throws std::invalid_argument.
void parse_bind(const std::string& text, ServiceConfig& config);

struct AgentRecord {
    std::string id;
    std::shared_ptr<const AgentBundle> bundle;
    std::string source_dmn;
    Customization customization;
    std::string created_at;  // ISO 8601, UTC
};

Json response_to_json(const Response& r, const Session& s);
Json session_context_json(const Session& s);
Json agent_summary_json(const AgentRecord& r);

// Error carrying an HTTP status and the {code, message, details} envelope.
class ApiError : public Error {
public:
    ApiError(int status, std::string code, const std::string& message, Json details = Json::object())
        : Error(std::move(code), message), status_(status), details_(std::move(details)) {}

    int status() const noexcept { return status_; }
    const Json& details() const noexcept { return details_; }

private:
    int status_;
    Json details_;
};

class Service {
public:
    using Clock = std::chrono::steady_clock;

    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Restores persisted agents. Unreadable records are skipped and reported
    // through the returned warnings (also written to the log sink).
    std::vector<std::string> load();

    // Operations behind the routes. All throw ApiError.
    Json validate(const std::string& dmn_text) const;
    AgentRecord create_agent(const std::string& dmn_text, const Json& customization,
                             std::optional<std::uint64_t> seed, std::optional<std::size_t> max_phrases);
    std::vector<AgentRecord> agents() const;
    AgentRecord agent(const std::string& id) const;
    Json export_archive(const std::string& id) const;
    std::pair<std::string, Json> open_session(const std::string& agent_id);
    Json post_message(const std::string& session_id, const std::string& text);
    Json session_context(const std::string& session_id);
    Json session_help(const std::string& session_id, const std::optional<std::string>& input);
    void close_session(const std::string& session_id);

    // Drops sessions idle since before `now - session_idle`. Returns how many.
    std::size_t evict_idle(Clock::time_point now);
    std::size_t session_count() const;

    // HTTP. listen() blocks until stop().
    httplib::Server& http();
    bool listen();
    // Binds to an ephemeral port on `host`; returns it. Serve with listen_after_bind().
    int bind_any_port();
    bool listen_after_bind();
    void stop();

    void set_log_sink(std::function<void(const std::string&)> sink);

private:
    struct SessionSlot {
        std::mutex mutex;
        Session session;
        Clock::time_point last_used;
    };

    void install_routes();
    void log(const std::string& line) const;
    std::shared_ptr<SessionSlot> find_session(const std::string& id);
    void persist(const AgentRecord& record) const;

    ServiceConfig config_;
    std::unique_ptr<httplib::Server> server_;
    mutable std::shared_mutex agents_mutex_;
    std::map<std::string, AgentRecord> agents_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
    std::function<void(const std::string&)> log_sink_;
};

}  // namespace dmnbot
