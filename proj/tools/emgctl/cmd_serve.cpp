#include <chrono>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/gateway/server.hpp"
#include "emg/robot/config.hpp"

namespace emgctl {

void register_serve(CLI::App& app) {
  auto* serve = app.add_subcommand("serve", "Gateway: WebSocket events and commands, GET /state");
  static struct {
    std::string listen = ":" + std::to_string(emg::gateway::kDefaultGatewayPort), source, bundle, sim, event_log,
                work_dir, robot_config;
    double speed = 1.0;
    bool decode = false;
  } o;
  serve->add_option("--listen", o.listen, "host:port for HTTP and WebSocket");
  serve->add_option("--source", o.source, "recording:<path>, synth:<seed>[:preset] or tcp:host:port");
  serve->add_option("--speed", o.speed, "Pacing of recording and synthetic sources")->check(CLI::PositiveNumber);
  serve->add_option("--bundle", o.bundle, "Model bundle to load at startup")->check(CLI::ExistingFile);
  serve->add_option("--sim", o.sim, "Remote simulator host:port (default: in-process)");
  serve->add_option("--robot-config", o.robot_config, "Robot config JSON for the in-process simulator")
      ->check(CLI::ExistingFile);
  serve->add_option("--event-log", o.event_log, "Append every event as JSONL");
  serve->add_option("--work-dir", o.work_dir, "Where calibration captures and new bundles go");
  serve->add_flag("--decode", o.decode, "Start decoding right away (needs --bundle)");
  serve->callback([] {
    emg::gateway::ServerOptions options;
    options.listen = emg::net::Endpoint::parse(o.listen);
    if (!o.source.empty()) options.source = o.source;
    options.source_speed = o.speed;
    if (!o.bundle.empty()) options.bundle = o.bundle;
    if (!o.sim.empty()) options.sim = emg::net::Endpoint::parse(o.sim);
    if (!o.event_log.empty()) options.event_log = o.event_log;
    if (!o.work_dir.empty()) options.session.work_dir = o.work_dir;
    if (!o.robot_config.empty()) options.session.robot = emg::robot::load_robot_config(o.robot_config);
    options.start_decoding = o.decode;
    emg::gateway::GatewayServer server(options);
    std::cerr << "gateway on port " << server.port() << " (ws /ws, GET /state)\n";
    install_signal_handlers();
    std::thread watcher([&server] {
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    });
    server.run();
    g_stop = true;
    watcher.join();
  });
}

}  // namespace emgctl
