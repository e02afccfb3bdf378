// Regenerates the shipped scenario and trace fixtures from the case-study
// models. Run with the target directory as the only argument.
#include <iostream>

#include "stmon/harness/io.hpp"

using namespace stmon;

int main(int argc, char **argv) {
  const std::string dir = argc > 1 ? argv[1] : "fixtures";
  try {
    const harness::Model drone = harness::build_drone_model();
    const auto drone_inputs = harness::drone_reference_inputs();
    harness::save_scenario(dir + "/drone.json",
                           harness::scenario_of_model(drone, harness::drone_initial_state(),
                                                      drone_inputs));
    harness::write_trace_csv(dir + "/drone_reference.csv",
                             harness::simulate_plant(drone.sys, harness::drone_initial_state(),
                                                     drone_inputs));
    harness::write_trace_csv(dir + "/drone_hover.csv",
                             harness::simulate_plant(drone.sys, harness::drone_initial_state(),
                                                     harness::drone_hover_inputs()));

    const harness::Model craft = harness::build_spacecraft_model();
    const auto craft_inputs = harness::spacecraft_reference_inputs(craft);
    harness::save_scenario(dir + "/spacecraft.json",
                           harness::scenario_of_model(craft, harness::spacecraft_initial_state(),
                                                      craft_inputs));
    harness::write_trace_csv(
        dir + "/spacecraft_reference.csv",
        harness::simulate_plant(craft.sys, harness::spacecraft_initial_state(), craft_inputs));
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
