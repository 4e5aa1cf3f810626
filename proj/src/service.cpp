#include "dmnbot/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <ctime>
#include <iostream>
#include <random>
#include <stdexcept>

#include "dmnbot/botgen.hpp"
#include "dmnbot/errors.hpp"

namespace dmnbot {

namespace fs = std::filesystem;

namespace {

const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>Decision chat</title>
<style>
body{font-family:sans-serif;max-width:40em;margin:2em auto}
#log div{margin:.3em 0}.user{text-align:right}.bot{color:#124}
.chip{margin:.2em;padding:.2em .6em;border:1px solid #88a;border-radius:1em;background:#eef;cursor:pointer}
</style></head><body>
<p><select id="agent"></select> <button id="start">Start</button></p>
<div id="log"></div><div id="chips"></div>
<form id="form"><input id="text" size="50" autocomplete="off"> <button>Send</button></form>
<script>
let session = null;
const $ = id => document.getElementById(id);
function say(role, text) { const d = document.createElement('div'); d.className = role; d.textContent = text; $('log').appendChild(d); }
function chips(list) {
  $('chips').innerHTML = '';
  for (const s of list || []) { const b = document.createElement('button'); b.className = 'chip'; b.textContent = s; b.onclick = () => send(s); $('chips').appendChild(b); }
}
function show(r) { say('bot', r.text); chips(r.suggestions); if (r.done) $('text').disabled = true; }
async function send(text) {
  if (!session) return;
  say('user', text);
  const r = await fetch('/sessions/' + session + '/messages', {method: 'POST', headers: {'Content-Type': 'application/json'}, body: JSON.stringify({text})});
  const j = await r.json();
  if (r.ok) show(j); else say('bot', j.message);
}
fetch('/agents').then(r => r.json()).then(j => {
  for (const a of j.agents) { const o = document.createElement('option'); o.value = a.id; o.textContent = a.name + ' (' + a.id + ')'; $('agent').appendChild(o); }
});
$('start').onclick = async () => {
  const r = await fetch('/agents/' + $('agent').value + '/sessions', {method: 'POST'});
  const j = await r.json();
  session = j.session_id; $('log').innerHTML = ''; $('text').disabled = false; show(j.response);
};
$('form').onsubmit = e => { e.preventDefault(); const t = $('text').value.trim(); if (t) { $('text').value = ''; send(t); } };
</script></body></html>
)";

std::string random_hex(std::size_t n) {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    static const char* hex = "0123456789abcdef";
    std::string out;
    while (out.size() < n) {
        auto v = gen();
        for (int i = 0; i < 16 && out.size() < n; ++i) out.push_back(hex[(v >> (4 * i)) & 0xf]);
    }
    return out;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int status_for(const std::string& code) {
    if (code == "NOT_FOUND" || code == "UNKNOWN_INPUT") return 404;
    if (code == "SESSION_CLOSED") return 409;
    if (code == "CUSTOMIZATION_ERROR") return 422;
    if (code == "IO_ERROR") return 500;
    return 400;
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const Json& details) {
    send_json(res, status, {{"code", code}, {"message", message}, {"details", details}});
}

ApiError not_found(const std::string& what, const std::string& id) {
    return ApiError(404, "NOT_FOUND", "unknown " + what + " '" + id + "'");
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw ApiError(400, "BAD_REQUEST", std::string("request body is not valid JSON: ") + e.what());
    }
}

std::string required_string(const Json& body, const char* key) {
    if (!body.is_object() || !body.contains(key) || !body[key].is_string()) {
        throw ApiError(400, "BAD_REQUEST", std::string("missing string field '") + key + "'");
    }
    return body[key].get<std::string>();
}

bool is_json(const httplib::Request& req) {
    return req.get_header_value("Content-Type").find("json") != std::string::npos;
}

}  // namespace

void parse_bind(const std::string& text, ServiceConfig& config) {
    auto colon = text.rfind(':');
    std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
    if (colon != std::string::npos && colon > 0) config.host = text.substr(0, colon);
    std::size_t used = 0;
    int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("bad port in '" + text + "'");
    config.port = p;
}

Json response_to_json(const Response& r, const Session& s) {
    return {{"text", r.text},
            {"suggestions", r.suggestions},
            {"help", r.help ? Json(*r.help) : Json(nullptr)},
            {"done", r.done},
            {"decision_value", r.decision_value ? value_to_json(*r.decision_value) : Json(nullptr)},
            {"intent", r.intent},
            {"status", std::string(to_string(s.status))}};
}

Json session_context_json(const Session& s) {
    Json collected = Json::object();
    for (const auto& [name, v] : s.collected) collected[name] = value_to_json(v);
    Json transcript = Json::array();
    for (const auto& line : s.transcript) transcript.push_back({{"role", line.role}, {"text", line.text}});
    return {{"session_id", s.id},
            {"summary", context_summary(s)},
            {"collected", collected},
            {"active_decision", s.active_decision ? Json(*s.active_decision) : Json(nullptr)},
            {"status", std::string(to_string(s.status))},
            {"contexts", s.contexts},
            {"pending", s.pending ? Json(*s.pending) : Json(nullptr)},
            {"decision_value", s.decision_value ? value_to_json(*s.decision_value) : Json(nullptr)},
            {"trace", s.trace ? trace_to_json(*s.trace) : Json::array()},
            {"transcript", transcript}};
}

Json agent_summary_json(const AgentRecord& r) {
    const AgentBundle& b = *r.bundle;
    Json intents = Json::array();
    for (const auto& i : b.intents) {
        intents.push_back({{"name", i.name},
                           {"kind", std::string(to_string(i.kind))},
                           {"phrases", i.training_phrases.size()}});
    }
    Json entities = Json::array();
    for (const auto& e : b.entities) entities.push_back(e.name);
    Json decisions = Json::array();
    for (const auto& d : b.decisions) decisions.push_back({{"name", d.name}, {"label", d.label}, {"inputs", d.inputs}});
    return {{"id", r.id},
            {"name", b.model->name},
            {"main_decision", b.model->main_decision},
            {"seed", b.seed},
            {"max_phrases", b.max_phrases},
            {"created_at", r.created_at},
            {"decisions", decisions},
            {"entities", entities},
            {"intents", intents}};
}

Service::Service(ServiceConfig config) : config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    log_sink_ = [](const std::string& line) { std::cerr << line << "\n"; };
    install_routes();
}

Service::~Service() { stop(); }

void Service::set_log_sink(std::function<void(const std::string&)> sink) { log_sink_ = std::move(sink); }

void Service::log(const std::string& line) const {
    if (log_sink_) log_sink_(line);
}

std::vector<std::string> Service::load() {
    std::vector<std::string> warnings;
    auto root = config_.data_dir / "agents";
    std::error_code ec;
    if (!fs::is_directory(root, ec)) return warnings;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (entry.is_directory() && entry.path().filename().string().front() != '.') dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        auto id = dir.filename().string();
        try {
            AgentRecord r;
            r.id = id;
            auto bundle = import_agent(dir);
            r.source_dmn = read_text_file(dir / "source.dmn");
            r.customization = parse_customization(read_text_file(dir / "customization.json"));
            auto meta = Json::parse(read_text_file(dir / "record.json"));
            r.created_at = meta.at("created_at").get<std::string>();
            r.bundle = std::make_shared<const AgentBundle>(std::move(bundle));
            std::unique_lock lock(agents_mutex_);
            agents_[id] = std::move(r);
        } catch (const std::exception& e) {
            warnings.push_back("warning: skipping agent " + id + ": " + e.what());
            log(warnings.back());
        }
    }
    return warnings;
}

void Service::persist(const AgentRecord& r) const {
    auto root = config_.data_dir / "agents";
    auto tmp = root / ("." + r.id + ".tmp");
    std::error_code ec;
    fs::remove_all(tmp, ec);
    export_agent(*r.bundle, tmp);
    write_text_file(tmp / "source.dmn", r.source_dmn);
    write_text_file(tmp / "customization.json", customization_to_json(r.customization).dump(2) + "\n");
    write_text_file(tmp / "record.json", Json{{"id", r.id}, {"created_at", r.created_at}}.dump(2) + "\n");
    fs::rename(tmp, root / r.id, ec);
    if (ec) throw IoError("cannot store agent " + r.id + ": " + ec.message());
}

Json Service::validate(const std::string& dmn_text) const {
    auto report = validation_report(dmn_text);
    if (!report["valid"].get<bool>()) {
        std::string message = "model has " + std::to_string(report["errors"].get<int>()) + " error(s) and " +
                               std::to_string(report["overlaps"].size()) + " overlapping rule pair(s)";
        throw ApiError(400, "INVALID_MODEL", message, report);
    }
    return report;
}

AgentRecord Service::create_agent(const std::string& dmn_text, const Json& customization,
                                  std::optional<std::uint64_t> seed, std::optional<std::size_t> max_phrases) {
    validate(dmn_text);
    AgentRecord r;
    r.source_dmn = dmn_text;
    try {
        r.customization = customization_from_json(customization);
    } catch (const CustomizationError& e) {
        throw ApiError(422, e.code(), e.what());
    }
    try {
        auto model = parse_dmn(dmn_text);
        auto bundle = assemble_agent(model, r.customization, seed.value_or(config_.seed),
                                     max_phrases.value_or(config_.max_phrases), dmn_text);
        r.bundle = std::make_shared<const AgentBundle>(std::move(bundle));
    } catch (const CustomizationError& e) {
        throw ApiError(422, e.code(), e.what());
    } catch (const ApiError&) {
        throw;
    } catch (const Error& e) {
        throw ApiError(400, e.code(), e.what());
    }
    r.created_at = utc_now();
    {
        std::unique_lock lock(agents_mutex_);
        do {
            r.id = "a" + random_hex(12);
        } while (agents_.count(r.id));
        agents_[r.id] = r;
    }
    try {
        persist(r);
    } catch (const Error& e) {
        std::unique_lock lock(agents_mutex_);
        agents_.erase(r.id);
        throw ApiError(500, e.code(), e.what());
    }
    return r;
}

std::vector<AgentRecord> Service::agents() const {
    std::shared_lock lock(agents_mutex_);
    std::vector<AgentRecord> out;
    for (const auto& [_, r] : agents_) out.push_back(r);
    return out;
}

AgentRecord Service::agent(const std::string& id) const {
    std::shared_lock lock(agents_mutex_);
    auto it = agents_.find(id);
    if (it == agents_.end()) throw not_found("agent", id);
    return it->second;
}

Json Service::export_archive(const std::string& id) const {
    auto r = agent(id);
    return {{"format", kAgentFormat}, {"id", id}, {"files", export_files(*r.bundle)}};
}

std::pair<std::string, Json> Service::open_session(const std::string& agent_id) {
    auto r = agent(agent_id);
    evict_idle(Clock::now());
    auto slot = std::make_shared<SessionSlot>();
    std::string id;
    {
        std::lock_guard lock(sessions_mutex_);
        do {
            id = "s" + random_hex(16);
        } while (sessions_.count(id));
        auto [session, response] = new_session(r.bundle, id);
        slot->session = std::move(session);
        slot->last_used = Clock::now();
        sessions_[id] = slot;
        return {id, response_to_json(response, slot->session)};
    }
}

std::shared_ptr<Service::SessionSlot> Service::find_session(const std::string& id) {
    evict_idle(Clock::now());
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw not_found("session", id);
    it->second->last_used = Clock::now();
    return it->second;
}

Json Service::post_message(const std::string& session_id, const std::string& text) {
    auto slot = find_session(session_id);
    std::lock_guard lock(slot->mutex);
    try {
        auto r = handle_turn(slot->session, text);
        return response_to_json(r, slot->session);
    } catch (const SessionClosed& e) {
        throw ApiError(409, e.code(), e.what());
    }
}

Json Service::session_context(const std::string& session_id) {
    auto slot = find_session(session_id);
    std::lock_guard lock(slot->mutex);
    return session_context_json(slot->session);
}

Json Service::session_help(const std::string& session_id, const std::optional<std::string>& input) {
    auto slot = find_session(session_id);
    std::lock_guard lock(slot->mutex);
    try {
        auto r = help_response(slot->session, input ? std::optional<std::string>(normalize_name(*input)) : std::nullopt);
        return response_to_json(r, slot->session);
    } catch (const UnknownInput& e) {
        throw ApiError(404, e.code(), e.what());
    }
}

void Service::close_session(const std::string& session_id) {
    std::lock_guard lock(sessions_mutex_);
    if (!sessions_.erase(session_id)) throw not_found("session", session_id);
}

std::size_t Service::evict_idle(Clock::time_point now) {
    std::lock_guard lock(sessions_mutex_);
    std::size_t n = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second->last_used > config_.session_idle) {
            it = sessions_.erase(it);
            ++n;
        } else {
            ++it;
        }
    }
    return n;
}

std::size_t Service::session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

void Service::install_routes() {
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
    auto wrap = [this](Handler fn) -> httplib::Server::Handler {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const ApiError& e) {
                send_error(res, e.status(), e.code(), e.what(), e.details());
            } catch (const Json::exception& e) {
                send_error(res, 400, "BAD_REQUEST", e.what(), Json::object());
            } catch (const Error& e) {
                send_error(res, status_for(e.code()), e.code(), e.what(), Json::object());
            } catch (const std::exception& e) {
                log(std::string("error: ") + e.what());
                send_error(res, 500, "INTERNAL", e.what(), Json::object());
            }
        };
    };
    auto& s = *server_;

    s.Post("/models", wrap([this](const httplib::Request& req, httplib::Response& res) {
        std::string dmn = is_json(req) ? required_string(parse_body(req), "dmn") : req.body;
        send_json(res, 200, validate(dmn));
    }));
    s.Post("/agents", wrap([this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto dmn = required_string(body, "dmn");
        Json custom = body.value("customization", Json::object());
        if (custom.is_string()) {
            try {
                custom = Json::parse(custom.get<std::string>());
            } catch (const Json::parse_error& e) {
                throw ApiError(422, "CUSTOMIZATION_ERROR", e.what());
            }
        }
        std::optional<std::uint64_t> seed;
        if (body.contains("seed") && !body["seed"].is_null()) seed = body["seed"].get<std::uint64_t>();
        std::optional<std::size_t> max;
        if (body.contains("max_phrases") && !body["max_phrases"].is_null()) max = body["max_phrases"].get<std::size_t>();
        auto r = create_agent(dmn, custom, seed, max);
        send_json(res, 201, agent_summary_json(r));
    }));
    s.Get("/agents", wrap([this](const httplib::Request&, httplib::Response& res) {
        Json list = Json::array();
        for (const auto& r : agents()) list.push_back(agent_summary_json(r));
        send_json(res, 200, {{"agents", list}});
    }));
    s.Get(R"(/agents/([A-Za-z0-9_-]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, agent_summary_json(agent(req.matches[1])));
    }));
    s.Get(R"(/agents/([A-Za-z0-9_-]+)/export)", wrap([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, export_archive(req.matches[1]));
    }));
    s.Post(R"(/agents/([A-Za-z0-9_-]+)/sessions)", wrap([this](const httplib::Request& req, httplib::Response& res) {
        auto [id, response] = open_session(req.matches[1]);
        send_json(res, 201, {{"session_id", id}, {"response", response}});
    }));
    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/messages)", wrap([this](const httplib::Request& req, httplib::Response& res) {
        auto text = required_string(parse_body(req), "text");
        send_json(res, 200, post_message(req.matches[1], text));
    }));
    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/context)", wrap([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, session_context(req.matches[1]));
    }));
    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/help)", wrap([this](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> input;
        if (req.has_param("input") && !req.get_param_value("input").empty()) input = req.get_param_value("input");
        send_json(res, 200, session_help(req.matches[1], input));
    }));
    s.Delete(R"(/sessions/([A-Za-z0-9_-]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
        close_session(req.matches[1]);
        send_json(res, 200, {{"deleted", std::string(req.matches[1])}});
    }));
    s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });

    if (config_.static_dir) {
        if (!s.set_mount_point("/", config_.static_dir->string())) {
            throw IoError("static directory not found: " + config_.static_dir->string());
        }
    } else {
        s.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kIndexPage, "text/html"); });
    }
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

httplib::Server& Service::http() { return *server_; }

bool Service::listen() {
    log("listening on " + config_.host + ":" + std::to_string(config_.port));
    return server_->listen(config_.host, config_.port);
}

int Service::bind_any_port() { return server_->bind_to_any_port(config_.host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

}  // namespace dmnbot
