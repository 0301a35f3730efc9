#include "cli/commands.hpp"

#include "galpha/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace galpha::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << content;
    if (!f) throw ConfigError("failed writing output file '" + path + "'");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-stage generalized-alpha time integration and spectral analysis", "galpha"};
    std::string command, config_path, out_path;
    bool svg = false;
    app.add_option("command", command, "spectrum | stability-map | converge | order-check | solve")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_path, "CSV output path (default: standard output)");
    app.add_flag("--svg", svg, "also write an SVG plot next to the CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        cfg.command = command;
        if (!out_path.empty()) cfg.out = out_path;
        if (svg) cfg.svg = true;
        validate(cfg);

        const CommandOutput result = run_command(cfg);
        std::ostringstream csv;
        result.table.write(csv);
        if (cfg.out.empty()) {
            out << csv.str();
        } else {
            write_file(cfg.out, csv.str());
        }
        if (cfg.svg) {
            const std::string path = std::filesystem::path(cfg.out).replace_extension(".svg").string();
            const std::string doc = std::visit(
                [](const auto& fig) -> std::string {
                    if constexpr (std::is_same_v<std::decay_t<decltype(fig)>, std::monostate>) return {};
                    else return render_svg(fig);
                },
                result.figure);
            if (!doc.empty()) write_file(path, doc);
        }
        for (const auto& note : result.notes) err << note << '\n';
        return 0;
    } catch (const ConfigError& e) {
        err << "galpha: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "galpha: numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "galpha: numerical failure: " << e.what() << '\n';
        return 1;
    }
}

} // namespace galpha::cli
