// Command-line driver: validate, generate, chat, serve.

#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "dmnbot/botgen.hpp"
#include "dmnbot/bundle_io.hpp"
#include "dmnbot/dialog.hpp"
#include "dmnbot/errors.hpp"
#include "dmnbot/service.hpp"

using namespace dmnbot;
namespace fs = std::filesystem;

namespace {

std::string witness_text(const Json& witness) {
    std::string out;
    for (const auto& [k, v] : witness.items()) {
        if (!out.empty()) out += ", ";
        out += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    return out;
}

int run_validate(const std::string& path, bool as_json) {
    auto report = validation_report(read_text_file(path));
    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& d : report["diagnostics"]) {
            std::string where = d["element"].get<std::string>();
            std::cout << d["severity"].get<std::string>() << " [" << d["code"].get<std::string>() << "]";
            if (!where.empty()) std::cout << " " << where;
            if (d["rule"].get<int>() > 0) std::cout << " rule " << d["rule"].get<int>();
            if (d["column"].get<int>() > 0) std::cout << " column " << d["column"].get<int>();
            std::cout << ": " << d["message"].get<std::string>() << "\n";
        }
        for (const auto& o : report["overlaps"]) {
            std::cout << "error [OVERLAP] " << o["decision"].get<std::string>() << ": rules " << o["rules"][0]
                      << " and " << o["rules"][1] << " both match " << witness_text(o["witness"]) << "\n";
        }
        int errors = report["errors"].get<int>() + static_cast<int>(report["overlaps"].size());
        std::cout << errors << " errors, " << report["warnings"].get<int>() << " warnings\n";
    }
    return report["valid"].get<bool>() ? 0 : 1;
}

Customization load_customization(const std::optional<std::string>& path) {
    return path ? parse_customization(read_text_file(*path)) : Customization{};
}

int run_generate(const std::string& dmn, const std::string& out, const std::optional<std::string>& custom,
                 std::uint64_t seed, std::size_t max_phrases) {
    auto bundle = assemble_agent_from_text(read_text_file(dmn), load_customization(custom), seed, max_phrases);
    auto files = export_agent(bundle, out);
    std::size_t phrases = 0;
    for (const auto& i : bundle.intents) phrases += i.training_phrases.size();
    std::cout << "wrote " << files.size() << " files to " << out << " (" << bundle.intents.size() << " intents, "
              << phrases << " training phrases)\n";
    return 0;
}

void print_response(const Response& r) {
    std::cout << r.text;
    if (!r.suggestions.empty()) {
        std::cout << " [";
        for (std::size_t i = 0; i < r.suggestions.size(); ++i) std::cout << (i ? " | " : "") << r.suggestions[i];
        std::cout << "]";
    }
    std::cout << "\n";
}

int run_chat(const std::string& path, const std::optional<std::string>& custom, std::uint64_t seed,
             std::size_t max_phrases) {
    std::shared_ptr<const AgentBundle> bundle;
    if (fs::is_directory(path)) {
        bundle = std::make_shared<const AgentBundle>(import_agent(path));
    } else {
        bundle = std::make_shared<const AgentBundle>(
            assemble_agent_from_text(read_text_file(path), load_customization(custom), seed, max_phrases));
    }
    const bool echo = !isatty(fileno(stdin));
    auto [session, welcome] = new_session(bundle, "cli");
    print_response(welcome);
    std::string line;
    while (!session.closed && std::getline(std::cin, line)) {
        if (line.empty()) continue;
        if (echo) std::cout << "> " << line << "\n";
        if (line == "/quit") break;
        if (line == "/context") {
            std::cout << context_summary(session) << "\n";
            continue;
        }
        if (line.rfind("/help", 0) == 0) {
            std::string arg = line.size() > 5 ? line.substr(6) : "";
            std::optional<std::string> input;
            if (!arg.empty()) input = normalize_name(arg);
            else if (session.pending) input = session.pending;
            try {
                print_response(help_response(session, input));
            } catch (const UnknownInput& e) {
                std::cout << e.what() << "\n";
            }
            continue;
        }
        if (line == "/cancel") line = "cancel";
        print_response(handle_turn(session, line));
    }
    return 0;
}

int run_serve(const std::string& bind, const std::string& data_dir, std::uint64_t seed, std::size_t max_phrases,
              const std::optional<std::string>& static_dir) {
    ServiceConfig config;
    parse_bind(bind, config);
    config.data_dir = data_dir;
    config.seed = seed;
    config.max_phrases = max_phrases;
    if (static_dir) config.static_dir = *static_dir;
    Service service(config);
    service.load();
    return service.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turns a DMN decision model into a decision-support chatbot."};
    app.require_subcommand(1);

    std::string dmn, out, path, bind = "127.0.0.1:8080", data_dir = "data";
    std::optional<std::string> custom, static_dir;
    std::uint64_t seed = 0;
    std::size_t max_phrases = kDefaultMaxPhrases;
    bool as_json = false;

    auto* validate = app.add_subcommand("validate", "Check a DMN model and report diagnostics");
    validate->add_option("dmn", dmn, "DMN file")->required();
    validate->add_flag("--json", as_json, "Print the report as JSON");

    auto* generate = app.add_subcommand("generate", "Assemble and export a chatbot agent");
    generate->add_option("dmn", dmn, "DMN file")->required();
    generate->add_option("-o,--output", out, "Output directory")->required();
    generate->add_option("--custom", custom, "Customization JSON file");
    generate->add_option("--seed", seed, "Generation seed");
    generate->add_option("--max-phrases", max_phrases, "Training phrases per intent")->check(CLI::PositiveNumber);

    auto* chat = app.add_subcommand("chat", "Chat with an agent directory or a DMN file");
    chat->add_option("agent", path, "Agent directory or DMN file")->required();
    chat->add_option("--custom", custom, "Customization JSON file (DMN input only)");
    chat->add_option("--seed", seed, "Generation seed (DMN input only)");
    chat->add_option("--max-phrases", max_phrases, "Training phrases per intent")->check(CLI::PositiveNumber);

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--bind", bind, "host:port to listen on");
    serve->add_option("--data-dir", data_dir, "Agent storage directory");
    serve->add_option("--seed", seed, "Default generation seed");
    serve->add_option("--max-phrases", max_phrases, "Default training phrases per intent")->check(CLI::PositiveNumber);
    serve->add_option("--static-dir", static_dir, "Directory with web chat assets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return run_validate(dmn, as_json);
        if (*generate) return run_generate(dmn, out, custom, seed, max_phrases);
        if (*chat) return run_chat(path, custom, seed, max_phrases);
        if (*serve) return run_serve(bind, data_dir, seed, max_phrases, static_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
