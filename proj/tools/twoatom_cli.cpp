#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "twoatom/runner.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, numerical_error = 2 };

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw twoatom::ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_result(const twoatom::ResultTable& t, const std::string& out) {
    std::string csv = twoatom::to_csv(t);
    if (out.empty() || out == "-") {
        std::cout << csv;
        return;
    }
    std::ofstream f(out);
    if (!f) throw twoatom::ValidationError("cannot write '" + out + "'");
    f << csv;
    if (!t.records.empty()) {
        auto dot = out.rfind('.');
        std::string side = (dot == std::string::npos ? out : out.substr(0, dot)) + ".jsonl";
        std::ofstream j(side);
        j << twoatom::to_jsonl(t);
    }
    std::cerr << "wrote " << out << " (" << t.rows.size() << " rows)\n";
}

template <class F>
int guarded(F&& body) {
    try {
        body();
        return ok;
    } catch (const twoatom::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const twoatom::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const twoatom::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << " (last time " << e.last_time << ")\n";
        return numerical_error;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-atom collective emission engine"};
    app.require_subcommand(1);

    std::string config_path, out, figure_id;
    auto* run = app.add_subcommand("run", "Run a scenario from a config file");
    run->add_option("config", config_path, "key = value config file")->required();
    run->add_option("-o,--out", out, "CSV output path (default: config output or stdout)");

    auto* fig = app.add_subcommand("figure", "Regenerate a figure preset");
    fig->add_option("id", figure_id, "Preset id, e.g. fig4")->required();
    fig->add_option("-o,--out", out, "CSV output path (default: stdout)");

    auto* check = app.add_subcommand("validate", "Parse a config and print it with defaults filled in");
    check->add_option("config", config_path)->required();

    auto* list = app.add_subcommand("presets", "List figure presets");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        return guarded([&] {
            auto cfg = twoatom::parse_config(read_file(config_path));
            write_result(twoatom::run_scenario(cfg), out.empty() ? cfg.output : out);
        });
    }
    if (*fig) {
        return guarded([&] { write_result(twoatom::run_scenario(twoatom::figure_preset(figure_id)), out); });
    }
    if (*check) {
        return guarded([&] { std::cout << twoatom::serialize(twoatom::parse_config(read_file(config_path))); });
    }
    if (*list) {
        for (auto& id : twoatom::figure_ids()) std::cout << id << '\n';
    }
    return ok;
}
