// Command-line front end: host scenario services, run the execution engine,
// match patterns, classify maturity, and inspect knowledge bases.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "smartws/smartws.hpp"

namespace fs = std::filesystem;
using namespace smartws;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return bool(out);
}

int cmd_serve(const std::string& desc_path, const std::string& handler_name, int port) {
    auto raw = read_file(desc_path);
    if (!raw) {
        std::cerr << "error: cannot read description file '" << desc_path << "'\n";
        return kExitDomainError;
    }
    ServiceDescription description;
    try {
        description = parse_description(*raw);
    } catch (const std::exception& e) {
        std::cerr << "error: invalid description '" << desc_path << "': " << e.what() << "\n";
        return kExitDomainError;
    }
    const auto& catalog = handler_catalog();
    auto it = catalog.find(handler_name);
    if (it == catalog.end()) {
        std::cerr << "error: unknown handler '" << handler_name << "'. Available handlers:\n";
        for (const auto& [name, fn] : catalog) std::cerr << "  " << name << "\n";
        return kExitDomainError;
    }
    auto violations = validate_description(description);
    if (!violations.empty()) {
        std::cerr << "error: description '" << description.name << "' is invalid:\n";
        for (const auto& v : violations) std::cerr << "  " << v << "\n";
        return kExitDomainError;
    }
    std::unique_ptr<ServiceHost> host;
    try {
        host = host_service(description, it->second, port, *raw);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    std::cout << "serving " << description.name << " at http://127.0.0.1:" << host->port()
              << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    host->stop();
    return kExitOk;
}

int cmd_run(const std::string& kb_path, const std::string& registry_dir, int max_rounds,
            const std::string& report_path, const std::string& final_kb_path,
            const std::string& scope, const std::vector<std::string>& only) {
    auto kb_text = read_file(kb_path);
    if (!kb_text) {
        std::cerr << "error: cannot read kb file '" << kb_path << "'\n";
        return kExitUsageError;
    }
    KnowledgeBase kb;
    try {
        kb.insert(parse_document(*kb_text, vocab::prefixes()));
    } catch (const ParseError& e) {
        std::cerr << "error: " << kb_path << ": " << e.what() << "\n";
        return kExitUsageError;
    }

    Registry registry;
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(registry_dir, ec))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    if (ec) {
        std::cerr << "error: cannot read registry directory '" << registry_dir << "'\n";
        return kExitUsageError;
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        auto text = read_file(file.string());
        if (!text) {
            std::cerr << "error: cannot read '" << file.string() << "'\n";
            return kExitUsageError;
        }
        try {
            registry.register_service(parse_description(*text));
        } catch (const std::exception& e) {
            std::cerr << "error: " << file.string() << ": " << e.what() << "\n";
            return kExitUsageError;
        }
    }

    EngineConfig config;
    config.max_rounds = max_rounds;
    if (!scope.empty()) {
        try {
            config.scope_filter = parse_pattern(scope, vocab::prefixes());
        } catch (const ParseError& e) {
            std::cerr << "error: --scope: " << e.what() << "\n";
            return kExitUsageError;
        }
    }
    if (!only.empty()) {
        std::set<std::string> names;
        for (const auto& entry : only) {
            std::stringstream ss(entry);
            std::string name;
            while (std::getline(ss, name, ','))
                if (!name.empty()) names.insert(name);
        }
        config.allowed_services = std::move(names);
    }

    RunReport report = run_to_fixpoint(registry, kb, config);

    for (const auto& r : report.records) {
        std::cout << "round " << r.round << "  " << r.key.service_name << "  "
                  << outcome_name(r.outcome) << "  +" << r.triples_added << "\n";
    }
    std::cout << (report.terminated_by == Termination::fixpoint ? "fixpoint" : "max-rounds cap")
              << " after " << report.rounds_executed << " round(s); " << report.records.size()
              << " invocation(s); kb size " << report.final_kb_size << std::endl;

    if (!report_path.empty() && !write_file(report_path, report_to_json(report).dump(2) + "\n")) {
        std::cerr << "error: cannot write report to '" << report_path << "'\n";
        return kExitUsageError;
    }
    if (!final_kb_path.empty() && !write_file(final_kb_path, serialize(kb))) {
        std::cerr << "error: cannot write kb to '" << final_kb_path << "'\n";
        return kExitUsageError;
    }
    return report.terminated_by == Termination::fixpoint ? kExitOk : kExitDomainError;
}

int cmd_match(const std::string& kb_path, const std::string& pattern_arg) {
    auto kb_text = read_file(kb_path);
    if (!kb_text) {
        std::cerr << "error: cannot read kb file '" << kb_path << "'\n";
        return kExitUsageError;
    }
    std::string pattern_text = pattern_arg;
    if (fs::exists(pattern_arg)) {
        auto from_file = read_file(pattern_arg);
        if (from_file) pattern_text = *from_file;
    }
    KnowledgeBase kb;
    GraphPattern pattern;
    try {
        kb.insert(parse_document(*kb_text, vocab::prefixes()));
        pattern = parse_pattern(pattern_text, vocab::prefixes());
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    }

    auto bindings = kb.match(pattern);
    auto var_set = pattern.vars();
    std::vector<std::string> vars(var_set.begin(), var_set.end());
    std::vector<std::size_t> widths;
    for (const auto& v : vars) widths.push_back(v.size() + 1);
    for (const auto& b : bindings)
        for (std::size_t c = 0; c < vars.size(); ++c)
            widths[c] = std::max(widths[c], term_text(b.at(vars[c])).size());

    auto print_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::cout << cells[c];
            if (c + 1 < cells.size())
                std::cout << std::string(widths[c] - cells[c].size() + 2, ' ');
        }
        std::cout << "\n";
    };
    std::vector<std::string> header;
    for (const auto& v : vars) header.push_back("?" + v);
    if (!vars.empty()) print_row(header);
    for (const auto& b : bindings) {
        std::vector<std::string> cells;
        for (const auto& v : vars) cells.push_back(term_text(b.at(v)));
        print_row(cells);
    }
    std::cerr << bindings.size() << " binding(s)\n";
    return kExitOk;
}

int cmd_classify(const std::string& desc_path, bool probe) {
    auto raw = read_file(desc_path);
    if (!raw) {
        std::cerr << "error: cannot read description file '" << desc_path << "'\n";
        return kExitUsageError;
    }
    ServiceDescription description;
    try {
        description = parse_description(*raw);
    } catch (const std::exception& e) {
        std::cerr << "error: " << desc_path << ": " << e.what() << "\n";
        return kExitUsageError;
    }
    std::optional<ProbeResults> probe_results;
    if (probe) probe_results = probe_endpoint(description.endpoint);
    MaturityReport report = classify(description, probe_results);
    std::cout << maturity_report_to_json(report).dump(2) << std::endl;
    return kExitOk;
}

int cmd_kb_dump(const std::string& kb_path) {
    auto kb_text = read_file(kb_path);
    if (!kb_text) {
        std::cerr << "error: cannot read kb file '" << kb_path << "'\n";
        return kExitUsageError;
    }
    try {
        KnowledgeBase kb;
        kb.insert(parse_document(*kb_text, vocab::prefixes()));
        std::cout << serialize(kb);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    }
    return kExitOk;
}

int cmd_kb_diff(const std::string& left_path, const std::string& right_path) {
    auto left_text = read_file(left_path);
    auto right_text = read_file(right_path);
    if (!left_text || !right_text) {
        std::cerr << "error: cannot read input files\n";
        return kExitUsageError;
    }
    std::set<std::string> left, right;
    try {
        for (const auto& t : parse_document(*left_text, vocab::prefixes()))
            left.insert(triple_line(t));
        for (const auto& t : parse_document(*right_text, vocab::prefixes()))
            right.insert(triple_line(t));
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    }
    bool differ = false;
    for (const auto& line : left)
        if (!right.count(line)) {
            std::cout << "- " << line << "\n";
            differ = true;
        }
    for (const auto& line : right)
        if (!left.count(line)) {
            std::cout << "+ " << line << "\n";
            differ = true;
        }
    return differ ? kExitDomainError : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SmartWS toolkit: semantic service hosting, data-driven composition, "
                 "pattern matching and maturity auditing"};
    app.require_subcommand(1);

    std::string desc_path, handler_name, kb_path, registry_dir, report_path, final_kb_path;
    std::string scope, pattern_arg, left_path, right_path;
    std::vector<std::string> only;
    int port = 0;
    int max_rounds = 32;
    bool probe = false;

    auto* serve = app.add_subcommand("serve", "Host a described service with a catalog handler");
    serve->add_option("--desc", desc_path, "description file (JSON)")->required();
    serve->add_option("--handler", handler_name, "handler name from the scenario catalog")
        ->required();
    serve->add_option("--port", port, "TCP port (0 picks a free one)")->required();

    auto* run = app.add_subcommand("run", "Run the execution engine to fixpoint");
    run->add_option("--kb", kb_path, "seed knowledge base file")->required();
    run->add_option("--registry", registry_dir, "directory of description files")->required();
    run->add_option("--max-rounds", max_rounds, "round cap (default 32)");
    run->add_option("--report", report_path, "write the run report JSON here")->required();
    run->add_option("--final-kb", final_kb_path, "write the final kb here (canonical form)");
    run->add_option("--scope", scope, "extra pattern every processed binding must satisfy");
    run->add_option("--only", only, "comma-separated allow-list of service names");

    auto* match = app.add_subcommand("match", "Match a graph pattern against a knowledge base");
    match->add_option("--kb", kb_path, "knowledge base file")->required();
    match->add_option("--pattern", pattern_arg, "pattern file or inline pattern text")->required();

    auto* classify_cmd = app.add_subcommand("classify", "Classify a service's maturity level");
    classify_cmd->add_option("--desc", desc_path, "description file (JSON)")->required();
    classify_cmd->add_flag("--probe", probe, "probe the live endpoint too");

    auto* kb_dump = app.add_subcommand("kb-dump", "Print a knowledge base in canonical form");
    kb_dump->add_option("file", kb_path, "knowledge base file")->required();

    auto* kb_diff = app.add_subcommand("kb-diff", "Compare two knowledge bases");
    kb_diff->add_option("left", left_path, "left knowledge base file")->required();
    kb_diff->add_option("right", right_path, "right knowledge base file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsageError;
    }

    try {
        if (serve->parsed()) return cmd_serve(desc_path, handler_name, port);
        if (run->parsed())
            return cmd_run(kb_path, registry_dir, max_rounds, report_path, final_kb_path, scope,
                           only);
        if (match->parsed()) return cmd_match(kb_path, pattern_arg);
        if (classify_cmd->parsed()) return cmd_classify(desc_path, probe);
        if (kb_dump->parsed()) return cmd_kb_dump(kb_path);
        if (kb_diff->parsed()) return cmd_kb_diff(left_path, right_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitUsageError;
}
