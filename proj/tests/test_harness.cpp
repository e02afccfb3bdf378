#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stmon/harness/io.hpp"
#include "stmon/oracle/oracle.hpp"

using namespace stmon;

namespace {

std::string fixture(const std::string &name) {
  return std::string(STMON_FIXTURES_DIR) + "/" + name;
}

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("numbers and traces round-trip through text") {
  const std::vector<double> samples = {0.0,       -0.0,  0.1,    1.0 / 3.0, 13.0,
                                       -2.5e-17,  1e300, -7.25,  3.4000000000000004,
                                       9.9999999999999995e-07};
  for (double v : samples) {
    const double back = harness::parse_double(harness::format_double(v));
    CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
  }

  stl::Trace tr;
  tr.start = 3;
  tr.states = {{0.1, -5.0}, {1.0 / 3.0, 2.5e-17}, {100.0, -0.0}};
  const std::string path = temp_path("stmon_trace_roundtrip.csv");
  harness::write_trace_csv(path, tr);
  const stl::Trace back = harness::read_trace_csv(path);
  REQUIRE(back.start == tr.start);
  REQUIRE(back.states.size() == tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) CHECK(back.states[k] == tr.states[k]);

  CHECK_THROWS(harness::read_trace_csv(fixture("drone.json")));  // not a trace
}

TEST_CASE("region literals round-trip through JSON") {
  const geom::Region box = geom::Region::box({{0.0, 100.0}, {-5.0, 5.0}});
  CHECK(geom::region_equal(harness::region_from_json_text(harness::region_to_json_text(box)),
                           box));

  // A two-part union with a non-axis-aligned facet.
  geom::ConvexPolytope wedge;
  wedge.dim = 2;
  wedge.facets = {{{std::tan(0.5), -1.0}, 0.0}, {{-1.0, 0.0}, 10.0}, {{0.0, 1.0}, 3.0}};
  geom::Region r = geom::Region::from_parts(
      2, {wedge, geom::Region::box({{20.0, 21.0}, {0.0, 1.0}}).parts.front()});
  CHECK(geom::region_equal(harness::region_from_json_text(harness::region_to_json_text(r)), r));

  const geom::Region empty = geom::Region::empty(3);
  CHECK(harness::region_from_json_text(harness::region_to_json_text(empty)).is_empty());

  // Box shorthand on input.
  const geom::Region shorthand =
      harness::region_from_json_text("{\"box\": [[0, 1], [2.5, 3.5]]}");
  CHECK(geom::region_equal(shorthand, geom::Region::box({{0.0, 1.0}, {2.5, 3.5}})));
}

TEST_CASE("plant simulation follows the dynamics exactly") {
  SUBCASE("identity system holds still") {
    geom::AffineSystem sys;
    sys.A = geom::Mat::identity(2);
    sys.B = geom::Mat(2, 1);
    sys.c = {0.0, 0.0};
    sys.domain = geom::Region::box({{-1.0, 1.0}, {-1.0, 1.0}});
    sys.input = geom::Region::box({{-1.0, 1.0}});
    const stl::Trace tr =
        harness::simulate_plant(sys, {0.25, -0.5}, std::vector<geom::Vec>(5, geom::Vec{0.0}));
    REQUIRE(tr.states.size() == 6);
    for (const geom::Vec &x : tr.states) CHECK(x == geom::Vec{0.25, -0.5});
  }

  SUBCASE("coasting climb gains one unit of altitude per step") {
    const harness::Model m = harness::build_drone_model();
    const stl::Trace tr =
        harness::simulate_plant(m.sys, {50.0, 2.0}, std::vector<geom::Vec>(4, geom::Vec{0.0}));
    for (int t = 0; t <= 4; ++t) {
      CHECK(tr.at(t)[0] == doctest::Approx(50.0 + t).epsilon(1e-12));
      CHECK(tr.at(t)[1] == doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  SUBCASE("one full-thrust step from the corridor midpoint") {
    const harness::Model m = harness::build_drone_model();
    const stl::Trace tr = harness::simulate_plant(m.sys, {50.0, 0.0}, {{2.5}});
    CHECK(tr.at(1)[0] == doctest::Approx(51.25).epsilon(1e-12));
    CHECK(tr.at(1)[1] == doctest::Approx(2.5).epsilon(1e-12));
  }

  SUBCASE("out-of-range inputs and domain exits are reported") {
    const harness::Model m = harness::build_drone_model();
    CHECK_THROWS(harness::simulate_plant(m.sys, {50.0, 0.0}, {{3.0}}));
    CHECK_THROWS(harness::simulate_plant(
        m.sys, {99.0, 4.0}, std::vector<geom::Vec>(3, geom::Vec{2.5})));
  }
}

TEST_CASE("the altitude model matches its published parameters") {
  const harness::Model m = harness::build_drone_model();
  CHECK(m.sys.A.a == std::vector<double>{1.0, 0.5, 0.0, 1.0});
  CHECK(m.sys.B.a == std::vector<double>{0.5, 1.0});
  CHECK(m.sys.c == geom::Vec{0.0, 0.0});
  CHECK(geom::region_equal(m.sys.domain, geom::Region::box({{0.0, 100.0}, {-5.0, 5.0}})));
  CHECK(geom::region_equal(m.sys.input, geom::Region::box({{-2.5, 2.5}})));
  REQUIRE(m.spec.count() == 3);
  CHECK(m.spec.horizon == 50);
  // Sorted by window start: the two reach-tasks over [0,20], then the
  // corridor-until over [40,50].
  CHECK(m.spec.sub(1).a == 0);
  CHECK(m.spec.sub(1).b == 20);
  CHECK(m.spec.sub(2).a == 0);
  CHECK(m.spec.sub(2).b == 20);
  CHECK(m.spec.sub(3).a == 40);
  CHECK(m.spec.sub(3).b == 50);
  CHECK(m.spec.sub(3).op == stl::Op::Until);
}

TEST_CASE("the rendezvous model matches its published parameters") {
  const harness::Model m = harness::build_spacecraft_model();

  SUBCASE("drift and thrust matrices come from the orbital-rate series") {
    const double mu = 3.698e14 * 60.0 * 60.0;  // m^3 per minute^2
    const double r = 42164e3;
    const double n = std::sqrt(mu / (r * r * r));
    const double dt = 0.5;
    const double accel = 60.0 * 60.0 / 500.0;  // N to m per minute^2, 500 kg
    geom::Mat ac(4, 4);
    ac(0, 2) = 1.0;
    ac(1, 3) = 1.0;
    ac(2, 0) = 3.0 * n * n;
    ac(2, 3) = 2.0 * n;
    ac(3, 2) = -2.0 * n;
    geom::Mat bc(4, 2);
    bc(2, 0) = accel;
    bc(3, 1) = accel;
    // Exact zero-order-hold: A = e^{ac dt}, B = (integral of e^{ac s} ds) bc,
    // both summed as power series; n dt is tiny so 30 terms is far past
    // convergence.
    geom::Mat sum_int(4, 4);
    geom::Mat pow = geom::Mat::identity(4);
    double fact = 1.0;
    double dtp = dt;
    for (int k = 0; k < 30; ++k) {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum_int(i, j) += pow(i, j) * dtp / (fact * (k + 1));
      pow = pow * ac;
      fact *= (k + 1);
      dtp *= dt;
    }
    geom::Mat ad_sum = geom::Mat::identity(4);
    geom::Mat powa = geom::Mat::identity(4);
    double facta = 1.0;
    double dta = 1.0;
    for (int k = 1; k < 30; ++k) {
      powa = powa * ac;
      facta *= k;
      dta *= dt;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ad_sum(i, j) += powa(i, j) * dta / facta;
    }
    const geom::Mat bd = sum_int * bc;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(m.sys.A(i, j) == doctest::Approx(ad_sum(i, j)).epsilon(1e-10));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(m.sys.B(i, j) == doctest::Approx(bd(i, j)).epsilon(1e-10));
  }

  SUBCASE("regions and bounds") {
    CHECK(geom::region_equal(
        m.sys.domain,
        geom::Region::box({{-100.0, 0.0}, {-70.0, 70.0}, {0.0, 10.0}, {0.0, 10.0}})));
    CHECK(geom::region_equal(m.sys.input, geom::Region::box({{-3.0, 3.0}, {-3.0, 3.0}})));
    CHECK(geom::region_equal(
        m.symbols.regions.at("Goal"),
        geom::Region::box({{-6.0, 0.0}, {-2.0, 2.0}, {0.0, 3.0}, {0.0, 3.0}})));

    // The visibility cone |y| <= -x tan 30 as two halfspaces through the origin.
    const double tan30 = std::tan(M_PI / 6.0);
    const geom::Region &los = m.symbols.regions.at("LOS");
    REQUIRE(los.parts.size() == 1);
    for (const geom::Vec &probe :
         {geom::Vec{-50.0, 20.0, 1.0, 1.0}, geom::Vec{-50.0, -20.0, 1.0, 1.0}})
      CHECK(geom::region_contains_point(los, probe));
    CHECK(!geom::region_contains_point(los, {-50.0, 50.0 * tan30 + 0.1, 1.0, 1.0}));
    CHECK(!geom::region_contains_point(los, {-50.0, -50.0 * tan30 - 0.1, 1.0, 1.0}));
    CHECK(geom::region_contains_point(los, {-50.0, 50.0 * tan30 - 0.1, 1.0, 1.0}));

    // Debris is configuration; the complement region must tile the domain.
    const harness::SpacecraftOptions opts;
    const geom::Region debris = geom::Region::box({{opts.debris_x_lo, opts.debris_x_hi},
                                                   {opts.debris_y_lo, opts.debris_y_hi},
                                                   {0.0, 10.0},
                                                   {0.0, 10.0}});
    CHECK(geom::region_equal(m.symbols.regions.at("Debris"), debris));
    CHECK(geom::region_equal(
        geom::region_union(m.symbols.regions.at("NoDebris"), debris), m.sys.domain));
  }

  SUBCASE("formula shape") {
    REQUIRE(m.spec.count() == 3);
    CHECK(m.spec.horizon == 50);
    CHECK(m.t_max == 5);
    int untils = 0;
    for (int i = 1; i <= 3; ++i) untils += m.spec.sub(i).op == stl::Op::Until ? 1 : 0;
    CHECK(untils == 1);
  }
}

TEST_CASE("scenario files round-trip exactly") {
  const harness::Scenario sc = harness::load_scenario(fixture("drone.json"));
  CHECK(sc.name == "drone");
  CHECK(sc.t_max == 5);
  CHECK(sc.state_dim() == 2);
  CHECK(sc.inputs.size() == 50);
  const stl::StlSpec spec = sc.parse();
  CHECK(spec.count() == 3);

  const std::string once = harness::scenario_to_json_text(sc);
  const std::string twice =
      harness::scenario_to_json_text(harness::scenario_from_json_text(once));
  CHECK(once == twice);

  const harness::Scenario craft = harness::load_scenario(fixture("spacecraft.json"));
  CHECK(craft.state_dim() == 4);
  CHECK(craft.regions.count("Debris") == 1);
  CHECK(harness::scenario_to_json_text(craft) ==
        harness::scenario_to_json_text(
            harness::scenario_from_json_text(harness::scenario_to_json_text(craft))));

  // A grid scenario goes through the same file format.
  harness::Scenario gs;
  gs.name = "ring";
  backend::GridSystem g;
  g.cells = {{0.0}, {1.0}, {2.0}};
  g.succ = {{1}, {2}, {0}};
  g.initial = 0;
  g.domain = geom::Region::box({{-0.5, 2.5}});
  gs.grid = g;
  gs.formula = "G[0,4] x1 in [-0.5, 2.5]";
  gs.t_max = 2;
  gs.initial = {0.0};
  const std::string gtext = harness::scenario_to_json_text(gs);
  const harness::Scenario gback = harness::scenario_from_json_text(gtext);
  CHECK(gback.grid.has_value());
  CHECK(gback.grid->succ == g.succ);
  CHECK(harness::scenario_to_json_text(gback) == gtext);
}

TEST_CASE("the reference control sequence reproduces the stored golden trace") {
  const harness::Scenario sc = harness::load_scenario(fixture("drone.json"));
  REQUIRE(sc.affine.has_value());
  const stl::Trace fresh = harness::simulate_plant(*sc.affine, sc.initial, sc.inputs);
  const stl::Trace golden = harness::read_trace_csv(fixture("drone_reference.csv"));
  REQUIRE(fresh.states.size() == golden.states.size());
  for (std::size_t k = 0; k < fresh.states.size(); ++k) CHECK(fresh.states[k] == golden.states[k]);

  const harness::Scenario craft = harness::load_scenario(fixture("spacecraft.json"));
  const stl::Trace cfresh = harness::simulate_plant(*craft.affine, craft.initial, craft.inputs);
  const stl::Trace cgolden = harness::read_trace_csv(fixture("spacecraft_reference.csv"));
  REQUIRE(cfresh.states.size() == cgolden.states.size());
  for (std::size_t k = 0; k < cfresh.states.size(); ++k)
    CHECK(cfresh.states[k] == cgolden.states[k]);
}

TEST_CASE("feasible-set tables round-trip through their file format") {
  SUBCASE("affine backend") {
    const harness::Model m = harness::build_drone_model();
    backend::ContinuousBackend bk{m.sys};
    const auto tab = feasible::compute_feasible_table(bk, m.spec);
    const std::string text = harness::table_to_json_text(tab);
    const auto back = harness::table_from_json_text(text, bk, m.spec);
    REQUIRE(back.has_value());
    CHECK(back->horizon == tab.horizon);
    for (std::size_t t = 0; t < tab.layers.size(); ++t) {
      REQUIRE(back->layers[t].size() == tab.layers[t].size());
      for (const auto &[I, set] : tab.layers[t])
        CHECK(geom::region_equal(back->layers[t].at(I), set));
    }
    // A different formula must reject the artifact.
    const stl::StlSpec other = stl::parse_spec("G[0,50] z in [0, 100]", 2,
                                               stl::default_symbols(2));
    CHECK(!harness::table_from_json_text(text, bk, other).has_value());
  }

  SUBCASE("grid backend") {
    const oracle::Instance inst = oracle::random_instance(7);
    backend::GridBackend bk{&inst.grid};
    const auto tab = feasible::compute_feasible_table(bk, inst.spec);
    const auto back =
        harness::table_from_json_text(harness::table_to_json_text(tab), bk, inst.spec);
    REQUIRE(back.has_value());
    for (std::size_t t = 0; t < tab.layers.size(); ++t) {
      REQUIRE(back->layers[t].size() == tab.layers[t].size());
      for (const auto &[I, set] : tab.layers[t]) CHECK(back->layers[t].at(I) == set);
    }
  }
}

TEST_CASE("reports serialize completely and expand to plot files") {
  SUBCASE("an empty report is well-formed JSON with zero observations") {
    const harness::RunReport empty;
    const harness::RunReport back = harness::report_from_json_text(
        harness::report_to_json_text(empty));
    CHECK(back.self_observations() == 0);
    CHECK(back.periodic_observations() == 0);
    CHECK(back.trace.states.empty());
  }

  SUBCASE("a full run round-trips and its plot files agree with the logs") {
    const harness::Scenario sc = harness::load_scenario(fixture("drone.json"));
    backend::ContinuousBackend bk{*sc.affine};
    const stl::StlSpec spec = sc.parse();
    const auto tab = feasible::compute_feasible_table(bk, spec, feasible::PendingCellMode::Relaxed,
                                                      sc.part_budget);
    const stl::Trace trace = harness::simulate_plant(*sc.affine, sc.initial, sc.inputs);
    const harness::RunReport rep =
        harness::run_report(bk, spec, sc.name, sc.t_max, trace, tab);

    CHECK(rep.self_log.status == monitor::MonitorStatus::Completed);
    CHECK(rep.periodic_log.status == monitor::MonitorStatus::Completed);
    CHECK(rep.self_observations() < rep.periodic_observations());

    const harness::RunReport back =
        harness::report_from_json_text(harness::report_to_json_text(rep));
    CHECK(back.self_observations() == rep.self_observations());
    CHECK(back.belief_boxes.size() == rep.belief_boxes.size());
    CHECK(back.trace.states.size() == rep.trace.states.size());

    const std::string dir = temp_path("stmon_plot_test");
    harness::write_plot_csvs(rep, dir);
    std::ifstream traj(dir + "/trajectory.csv");
    REQUIRE(traj.good());
    std::string line;
    std::getline(traj, line);  // header
    std::size_t rows = 0, observed = 0;
    while (std::getline(traj, line)) {
      ++rows;
      if (line.find(",1,") != std::string::npos) ++observed;
    }
    CHECK(rows == rep.trace.states.size());
    CHECK(observed == rep.self_observations());

    std::ifstream beliefs(dir + "/beliefs.csv");
    std::getline(beliefs, line);
    rows = 0;
    while (std::getline(beliefs, line)) ++rows;
    CHECK(rows == rep.belief_boxes.size());
  }
}

namespace {

// Minimal bidirectional pipe driver for the streaming protocol.
struct ChildProcess {
  pid_t pid = -1;
  FILE *to_child = nullptr;
  FILE *from_child = nullptr;

  ~ChildProcess() {
    if (to_child) fclose(to_child);
    if (from_child) fclose(from_child);
  }

  int wait_exit() {
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

ChildProcess spawn_monitor(const std::string &scenario) {
  int to_pipe[2], from_pipe[2];
  REQUIRE(pipe(to_pipe) == 0);
  REQUIRE(pipe(from_pipe) == 0);
  ChildProcess child;
  child.pid = fork();
  REQUIRE(child.pid >= 0);
  if (child.pid == 0) {
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    close(to_pipe[0]);
    close(to_pipe[1]);
    close(from_pipe[0]);
    close(from_pipe[1]);
    execl(STMON_BINARY, STMON_BINARY, "monitor", "--scenario", scenario.c_str(),
          static_cast<char *>(nullptr));
    _exit(127);
  }
  close(to_pipe[0]);
  close(from_pipe[1]);
  child.to_child = fdopen(to_pipe[1], "w");
  child.from_child = fdopen(from_pipe[0], "r");
  return child;
}

std::optional<std::string> read_line(FILE *f) {
  std::string line;
  int ch;
  while ((ch = fgetc(f)) != EOF) {
    if (ch == '\n') return line;
    line += static_cast<char>(ch);
  }
  return line.empty() ? std::nullopt : std::optional<std::string>(line);
}

}  // namespace

TEST_CASE("the streaming monitor speaks its wire protocol") {
  const stl::Trace golden = harness::read_trace_csv(fixture("drone_reference.csv"));
  ChildProcess child = spawn_monitor(fixture("drone.json"));
  std::size_t requests = 0, decisions = 0;
  std::string status_line;
  while (auto line = read_line(child.from_child)) {
    std::istringstream in(*line);
    std::string word;
    in >> word;
    if (word == "REQ") {
      int t = -1;
      in >> t;
      REQUIRE(t >= 0);
      REQUIRE(t <= golden.end());
      ++requests;
      fprintf(child.to_child, "%d %s %s\n", t,
              harness::format_double(golden.at(t)[0]).c_str(),
              harness::format_double(golden.at(t)[1]).c_str());
      fflush(child.to_child);
    } else if (word == "DEC") {
      ++decisions;
    } else {
      CHECK(word == "STATUS");
      status_line = *line;
    }
  }
  CHECK(requests == decisions);
  CHECK(requests < 51);  // fewer observations than the periodic baseline
  CHECK(status_line == "STATUS completed");
  CHECK(child.wait_exit() == 0);
}

TEST_CASE("the streaming monitor raises and exits on a violating plant") {
  const stl::Trace hover = harness::read_trace_csv(fixture("drone_hover.csv"));
  ChildProcess child = spawn_monitor(fixture("drone.json"));
  std::string last_dec, status_line;
  while (auto line = read_line(child.from_child)) {
    std::istringstream in(*line);
    std::string word;
    in >> word;
    if (word == "REQ") {
      int t = -1;
      in >> t;
      fprintf(child.to_child, "%d %s %s\n", t,
              harness::format_double(hover.at(t)[0]).c_str(),
              harness::format_double(hover.at(t)[1]).c_str());
      fflush(child.to_child);
    } else if (word == "DEC") {
      last_dec = *line;
    } else {
      status_line = *line;
    }
  }
  CHECK(last_dec == "DEC 1 TAU 0");
  CHECK(status_line.substr(0, 22) == "STATUS violated-alarm ");
  CHECK(child.wait_exit() == 2);
}
