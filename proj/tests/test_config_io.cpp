#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <limits>
#include <fstream>
#include <sstream>

#include "phreg/config_io.hpp"
#include "phreg/reference_models.hpp"
#include "phreg/report_io.hpp"

using namespace phreg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "phreg_tests";
    fs::create_directories(dir);
    return dir / name;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvariantViolation;  // "did not throw" marker, never an input error
}

json beam_doc() {
    std::ifstream in(fs::path(PHREG_SOURCE_DIR) / "configs" / "beam.json");
    return json::parse(in);
}

}  // namespace

TEST_CASE("beam config parses to the reference beam") {
    const ScenarioConfig c = parse_config(beam_doc());
    const PHModel ref = beam_model();
    CHECK(c.model.order == 2);
    CHECK(c.model.dim == 2);
    CHECK((c.model.W_B - ref.W_B).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((c.model.W_C - ref.W_C).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(c.grid.nodes == 21);
    REQUIRE(c.exo.has_value());
    CHECK((c.exo->E - beam_exosystem().E).norm() < 1e-15);
    CHECK((c.exo->F - beam_exosystem().F).norm() < 1e-15);
    CHECK(c.controller.kappa == 1.0);
    CHECK(c.controller.epsilon == 0.17);
    CHECK(c.simulation.T == 20.0);
    CHECK(c.v0.size() == 4);
}

TEST_CASE("config rejects unknown keys and malformed values") {
    json doc = beam_doc();
    doc["model"]["colour"] = "blue";
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    doc = beam_doc();
    doc["extra"] = 1;
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    doc = beam_doc();
    doc["simulation"]["dt_typo"] = 0.1;
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    doc = beam_doc();
    doc["exosystem"]["E"][0][0] = json::array({1.0});
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    doc = beam_doc();
    doc["exosystem"]["freqs"] = json::array({1.0, 1.0, 2.0, 3.0});
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    doc = beam_doc();
    doc["grid"] = json{{"nodes", 21}, {"h", 0.05}};
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);

    const fs::path broken = scratch("broken.json");
    std::ofstream(broken) << "{ \"model\": [1, 2,";
    CHECK(kind_of([&] { load_config(broken); }) == ErrorKind::InputError);
    CHECK(kind_of([&] { load_config(scratch("does_not_exist.json")); }) == ErrorKind::InputError);
}

TEST_CASE("presets") {
    json doc{{"model", {{"preset", "beam"}, {"rho", 1.1}}}, {"grid", {{"nodes", 21}}}};
    const ScenarioConfig c = parse_config(doc);
    CHECK((c.model.H.at(0) - beam_model(1.1, 1.0).H.at(0)).norm() == 0.0);
    doc["model"]["preset"] = "string";
    CHECK(kind_of([&] { parse_config(doc); }) == ErrorKind::InputError);
}

TEST_CASE("controller JSON round trip is bit exact") {
    const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
    const Controller c = synthesize(beam_exosystem(), dp, 1.0, 0.17);
    const std::string text = controller_to_json(c).dump();
    const Controller r = controller_from_json(json::parse(text));
    CHECK((r.G1.array() == c.G1.array()).all());
    CHECK((r.G2.array() == c.G2.array()).all());
    CHECK((r.K.array() == c.K.array()).all());
    CHECK((r.K0.array() == c.K0.array()).all());
    CHECK(r.kappa == c.kappa);
    CHECK(r.epsilon == c.epsilon);
    CHECK(r.freqs == c.freqs);
}

TEST_CASE("trajectory CSV layout") {
    Trajectory tr;
    for (int j = 0; j < 5; ++j) {
        tr.t.push_back(0.1 * j);
        CVector e(3);
        e << Complex(j, 1), Complex(0, -j), Complex(2, 0);
        tr.error.push_back(e);
        tr.err_norm.push_back(e.norm());
        tr.energy.push_back(1.0 / (j + 1));
    }
    const fs::path p = scratch("traj.csv");
    write_trajectory_csv(p, tr);
    std::ifstream in(p);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        CHECK(cols == 2 * 3 + 3);
        if (rows == 0) CHECK(line == "t,re(e_1),im(e_1),re(e_2),im(e_2),re(e_3),im(e_3),err_norm,energy");
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("metrics JSON encodes a degenerate fit as null") {
    ErrorMetrics m;
    m.degenerate = true;
    m.decay_rate = -std::numeric_limits<double>::infinity();
    const json j = metrics_to_json(m);
    CHECK(j["decay_rate"].is_null());
    CHECK(j["degenerate_fit"].get<bool>());
}
