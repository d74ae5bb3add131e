#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"
#include "emg/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"emgctl: EMG gesture decoding, robot simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "emgctl 0.1.0");
  emgctl::register_model(app);
  emgctl::register_eval(app);
  emgctl::register_io(app);
  emgctl::register_robot(app);
  emgctl::register_serve(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const emg::Error& e) {
    std::cerr << "emgctl: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "emgctl: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
