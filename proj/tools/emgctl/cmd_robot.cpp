#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/error.hpp"
#include "emg/robot/config.hpp"
#include "emg/robot/sim_server.hpp"
#include "emg/robot/wire.hpp"

namespace emgctl {

void register_robot(CLI::App& app) {
  auto* sim = app.add_subcommand("simulate", "Run the robot simulator behind its UDP command port");
  static struct {
    std::string listen = ":" + std::to_string(emg::robot::kDefaultSimPort), config, record, dump_config;
    bool headless = false;
    double duration = 0.0;
  } o;
  sim->add_option("--listen", o.listen, "host:port for joint commands");
  sim->add_option("--config", o.config, "Robot config JSON (default: built-in)")->check(CLI::ExistingFile);
  sim->add_option("--record", o.record, "Append every tick's state as JSONL");
  sim->add_option("--duration", o.duration, "Stop after this many seconds (0 runs until interrupted)")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--dump-config", o.dump_config, "Write the effective config JSON here and exit");
  sim->add_flag("--headless", o.headless, "No status line");
  sim->callback([] {
    const auto config = o.config.empty() ? emg::robot::default_robot_config() : emg::robot::load_robot_config(o.config);
    if (!o.dump_config.empty()) {
      emit(o.dump_config, emg::robot::robot_config_to_json(config));
      return;
    }
    emg::robot::SimServer server(config, emg::net::Endpoint::parse(o.listen));
    std::cerr << "simulator on udp port " << server.port() << '\n';
    std::ofstream record;
    if (!o.record.empty()) {
      record.open(o.record, std::ios::app);
      if (!record) throw emg::Error("cannot write " + o.record);
    }
    install_signal_handlers();
    std::thread timer;
    if (o.duration > 0.0) {
      timer = std::thread([] {
        const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(o.duration);
        while (!g_stop && std::chrono::steady_clock::now() < end) std::this_thread::sleep_for(std::chrono::milliseconds(20));
        g_stop = true;
      });
    }
    server.run(g_stop, [&](const emg::robot::RobotState& s) {
      if (record.is_open()) record << emg::robot::robot_state_to_json(s) << '\n';
      if (!o.headless && s.tick % 6 == 0) {
        std::fprintf(stderr, "\rt=%7.1fs base=(%+.2f,%+.2f,%+.2f) lift=%.3f arm=%.3f grip=%.2f mode=%s   ", s.time_s,
                     s.base.x, s.base.y, s.base.heading, s.lift(), s.arm_extension(), s.gripper(),
                     std::string(emg::mode_wire_tag(s.mode)).c_str());
      }
    });
    if (timer.joinable()) timer.join();
    if (!o.headless) std::fprintf(stderr, "\n");
    std::cerr << "dropped " << server.dropped() << " stale, " << server.malformed() << " malformed datagrams\n";
  });
}

}  // namespace emgctl
