// Command-line front end; all numerics run behind the C API of the shared
// library. Exit codes: 0 success, 1 domain failure, 2 usage/parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "circarma/circarma.h"

namespace {

struct CommonOpts {
    std::string input;
    std::string output;
    std::string format = "json";
    std::optional<std::int64_t> seed;
    std::optional<double> lambda;
    bool reproducible = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool input_required = true) {
    auto* in = cmd->add_option("--input,-i", opts.input, "input file path or inline JSON");
    if (input_required) in->required();
    cmd->add_option("--output,-o", opts.output, "output path (default: stdout)");
    cmd->add_option("--format,-f", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "simulation seed");
    cmd->add_option("--lambda", opts.lambda, "cepstral regularization weight");
    cmd->add_flag("--reproducible", opts.reproducible, "suppress the timestamp field");
}

int load_request(const CommonOpts& opts, nlohmann::json& request) {
    std::string text = opts.input;
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        std::cerr << "circarma: empty input\n";
        return 2;
    }
    if (text[first] != '{' && text[first] != '[') {
        std::ifstream in(opts.input);
        if (!in) {
            std::cerr << "circarma: cannot open input file '" << opts.input << "'\n";
            return 2;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        request = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "circarma: invalid input JSON: " << e.what() << "\n";
        return 2;
    }
    if (!request.is_object()) {
        std::cerr << "circarma: request must be a JSON object\n";
        return 2;
    }
    if (opts.seed) request["seed"] = *opts.seed;
    if (opts.lambda) request["lambda"] = *opts.lambda;
    if (opts.reproducible) request["reproducible"] = true;
    if (opts.format == "csv") request["format"] = "csv";
    return 0;
}

int emit(const CommonOpts& opts, const circarma_result* result) {
    const char* payload =
        opts.format == "csv" ? circarma_result_csv(result) : circarma_result_json(result);
    if (!payload) {
        std::cerr << "circarma: no " << opts.format << " payload for this command\n";
        return 2;
    }
    if (opts.output.empty()) {
        std::cout << payload;
        return 0;
    }
    std::ofstream out(opts.output);
    if (!out) {
        std::cerr << "circarma: cannot write '" << opts.output << "'\n";
        return 2;
    }
    out << payload;
    return 0;
}

int run(const std::string& command, const CommonOpts& opts) {
    nlohmann::json request;
    if (int rc = load_request(opts, request)) return rc;

    circarma_result* result = nullptr;
    const int status = circarma_run(command.c_str(), request.dump().c_str(), &result);
    int exit_code = 0;
    switch (status) {
        case CIRCARMA_OK: exit_code = 0; break;
        case CIRCARMA_ERR_DOMAIN: exit_code = 1; break;
        case CIRCARMA_ERR_INPUT: exit_code = 2; break;
        default: exit_code = 1; break;
    }
    if (!result) {
        std::cerr << "circarma: " << circarma_last_error() << "\n";
        return exit_code;
    }
    if (int rc = emit(opts, result)) exit_code = rc;
    if (status == CIRCARMA_ERR_DOMAIN) std::cerr << "circarma: " << circarma_last_error() << "\n";
    circarma_result_free(result);
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circulant rational covariance extension toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(circarma_version()));

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"check", "feasibility of covariance data (Toeplitz + cone membership)"},
        {"solve", "scalar dual solve: spectrum P/Q matching the lags"},
        {"cepstral-solve", "joint covariance + cepstral fit (scalar or block data)"},
        {"block-solve", "matrix dual solve for block covariance data"},
        {"extend", "full-period covariance extension of a (P, Q) pair"},
        {"factor", "outer banded spectral factor of a pseudo-polynomial"},
        {"simulate", "periodic realizations by spectral sampling"},
        {"sweep", "approximation-error sweep over N against a truth model"},
    };

    std::vector<std::pair<std::string, CommonOpts>> cmds;
    cmds.reserve(std::size(subs));
    for (const Sub& s : subs) {
        cmds.emplace_back(s.name, CommonOpts{});
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, cmds.back().second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (auto& [name, opts] : cmds)
        if (app.get_subcommand(name)->parsed()) return run(name, opts);
    return 2;
}
