#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dmnbot/botgen.hpp"
#include "dmnbot/bundle_io.hpp"
#include "dmnbot/dialog.hpp"
#include "dmnbot/engine.hpp"
#include "dmnbot/service.hpp"

namespace py = pybind11;
using namespace dmnbot;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
std::string dump(const Json& j) { return j.dump(); }

Assignment assignment_from_json(const std::string& text) {
    auto j = Json::parse(text.empty() ? "{}" : text);
    if (!j.is_object()) throw TypeError("inputs must be a JSON object");
    Assignment a;
    for (const auto& [k, v] : j.items()) a[normalize_name(k)] = value_from_json(v);
    return a;
}

class Agent {
public:
    explicit Agent(AgentBundle b) : bundle_(std::make_shared<const AgentBundle>(std::move(b))) {}

    static Agent from_text(const std::string& dmn, const std::string& customization, std::uint64_t seed,
                           std::size_t max_phrases) {
        auto c = customization.empty() ? Customization{} : parse_customization(customization);
        return Agent(assemble_agent_from_text(dmn, c, seed, max_phrases));
    }

    std::string manifest() const { return dump(agent_manifest_json(*bundle_)); }
    std::vector<std::string> export_to(const std::filesystem::path& dir) const { return export_agent(*bundle_, dir); }
    std::map<std::string, std::string> files() const { return export_files(*bundle_); }
    std::vector<std::string> intents() const {
        std::vector<std::string> out;
        for (const auto& i : bundle_->intents) out.push_back(i.name);
        return out;
    }

    const std::shared_ptr<const AgentBundle>& bundle() const { return bundle_; }

private:
    std::shared_ptr<const AgentBundle> bundle_;
};

class Chat {
public:
    Chat(const Agent& agent, std::string id) {
        auto [s, r] = new_session(agent.bundle(), std::move(id));
        session_ = std::move(s);
        welcome_ = dump(response_to_json(r, session_));
    }

    std::string say(const std::string& text) {
        auto r = handle_turn(session_, text);
        return dump(response_to_json(r, session_));
    }
    std::string context() const { return dump(session_context_json(session_)); }
    std::string help(std::optional<std::string> input) const {
        return help_response(session_, input ? std::optional(normalize_name(*input)) : std::nullopt).text;
    }

    const std::string& id() const { return session_.id; }
    const std::string& welcome() const { return welcome_; }
    std::string status() const { return std::string(to_string(session_.status)); }
    std::vector<std::pair<std::string, std::string>> transcript() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& l : session_.transcript) out.emplace_back(l.role, l.text);
        return out;
    }

private:
    Session session_;
    std::string welcome_;
};

std::string evaluate(const std::string& dmn, const std::string& decision, const std::string& inputs) {
    auto model = parse_dmn(dmn);
    auto r = evaluate_drd(model, normalize_name(decision), assignment_from_json(inputs));
    return dump(Json{{"value", value_to_json(r.value)}, {"trace", trace_to_json(r.trace)}});
}

}  // namespace

PYBIND11_MODULE(_dmnbot, m) {
    m.doc() = "DMN decision models compiled into chat agents";

    // The module keeps the type alive; `code` carries the stable error code.
    static PyObject* error = py::exception<Error>(m, "Error").ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
            exc.attr("code") = e.code();
            PyErr_SetObject(error, exc.ptr());
        }
    });

    m.def("validate", [](const std::string& dmn) { return dump(validation_report(dmn)); }, py::arg("dmn"));
    m.def("evaluate", &evaluate, py::arg("dmn"), py::arg("decision"), py::arg("inputs") = "{}");

    py::class_<Agent>(m, "Agent")
        .def_static("from_text", &Agent::from_text, py::arg("dmn"), py::arg("customization") = "",
                    py::arg("seed") = 42, py::arg("max_phrases") = kDefaultMaxPhrases)
        .def_static("load", [](const std::filesystem::path& dir) { return Agent(import_agent(dir)); },
                    py::arg("path"))
        .def("manifest", &Agent::manifest)
        .def("export", &Agent::export_to, py::arg("path"))
        .def("files", &Agent::files)
        .def_property_readonly("intents", &Agent::intents);

    py::class_<Chat>(m, "Chat")
        .def(py::init<const Agent&, std::string>(), py::arg("agent"), py::arg("id") = "", py::keep_alive<1, 2>())
        .def("say", &Chat::say, py::arg("text"))
        .def("context", &Chat::context)
        .def("help", &Chat::help, py::arg("input") = py::none())
        .def_property_readonly("id", &Chat::id)
        .def_property_readonly("welcome", &Chat::welcome)
        .def_property_readonly("status", &Chat::status)
        .def_property_readonly("transcript", &Chat::transcript);
}
