#include "common.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "emg/error.hpp"

namespace emgctl {

std::atomic<bool> g_stop{false};

namespace {
extern "C" void on_signal(int) { g_stop = true; }
}  // namespace

void install_signal_handlers() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw emg::Error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void write_json(const std::string& path, const nlohmann::json& doc) { emit(path, doc.dump(2)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw emg::DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace emgctl
