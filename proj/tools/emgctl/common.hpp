#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace CLI {
class App;
}

namespace emgctl {

void register_model(CLI::App& app);
void register_eval(CLI::App& app);
void register_io(CLI::App& app);
void register_robot(CLI::App& app);
void register_serve(CLI::App& app);

/// Set by SIGINT/SIGTERM once install_signal_handlers() ran.
extern std::atomic<bool> g_stop;
void install_signal_handlers();

/// Writes `text` to `path`, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& doc);
std::string read_text(const std::filesystem::path& path);

}  // namespace emgctl
