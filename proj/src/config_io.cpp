#include "phreg/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "phreg/reference_models.hpp"

namespace phreg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InputError, what); }

void allow_keys(const json& obj, const char* where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) bad(std::string(where) + " must be an object");
    for (const auto& [k, _] : obj.items()) {
        bool known = false;
        for (const char* allowed : keys) known = known || k == allowed;
        if (!known) bad("unknown key '" + k + "' in " + where);
    }
}

double number(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + " must be a number");
    return j.get<double>();
}

int positive_int(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 1) bad(std::string(what) + " must be a positive integer");
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number(x, what));
    return out;
}

MatrixField field_from_json(const json& j, const char* what) {
    if (j.is_object()) {
        allow_keys(j, what, {"samples"});
        if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].empty())
            bad(std::string(what) + ".samples must be a non-empty array of matrices");
        std::vector<CMatrix> s;
        for (const auto& m : j["samples"]) s.push_back(matrix_from_json(m));
        return MatrixField::sampled(std::move(s));
    }
    return MatrixField::constant(matrix_from_json(j));
}

JetSelection selection_from_json(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array of rows");
    JetSelection sel;
    for (const auto& row : j) {
        if (!row.is_array()) bad(std::string(what) + " rows must be arrays of terms");
        std::vector<JetTerm> terms;
        for (const auto& t : row) {
            allow_keys(t, what, {"end", "derivative", "component", "coef"});
            JetTerm term;
            const std::string end = t.value("end", "");
            if (end == "a") term.end = End::a;
            else if (end == "b") term.end = End::b;
            else bad(std::string(what) + ": end must be \"a\" or \"b\"");
            if (!t.contains("derivative") || !t["derivative"].is_number_integer()) bad("jet term needs an integer derivative");
            if (!t.contains("component") || !t["component"].is_number_integer()) bad("jet term needs an integer component");
            term.derivative = t["derivative"].get<int>();
            term.component = t["component"].get<int>();
            if (t.contains("coef")) term.coef = complex_from_json(t["coef"]);
            terms.push_back(term);
        }
        sel.push_back(std::move(terms));
    }
    return sel;
}

PHModel preset_model(const json& j) {
    allow_keys(j, "model", {"preset", "rho", "EI"});
    const std::string name = j["preset"].is_string() ? j["preset"].get<std::string>() : "";
    if (name == "transport") {
        if (j.contains("rho") || j.contains("EI")) bad("transport preset takes no parameters");
        return transport_model();
    }
    if (name == "beam") {
        const double rho = j.contains("rho") ? number(j["rho"], "rho") : 1.0;
        const double ei = j.contains("EI") ? number(j["EI"], "EI") : 1.0;
        if (!(rho > 0.0) || !(ei > 0.0)) bad("beam preset needs rho > 0 and EI > 0");
        return beam_model(rho, ei);
    }
    bad("unknown model preset '" + name + "'");
}

PHModel model_from_json(const json& j) {
    if (j.is_object() && j.contains("preset")) return preset_model(j);
    allow_keys(j, "model", {"order", "dim", "interval", "P", "P0", "H", "h_bounds", "W_B", "W_C", "boundary"});
    for (const char* k : {"order", "dim", "P", "H", "h_bounds"})
        if (!j.contains(k)) bad(std::string("model.") + k + " is required");

    PHModel m;
    m.order = positive_int(j["order"], "model.order");
    m.dim = positive_int(j["dim"], "model.dim");
    if (j.contains("interval")) {
        const auto iv = numbers(j["interval"], "model.interval");
        if (iv.size() != 2) bad("model.interval must be [a, b]");
        m.a = iv[0];
        m.b = iv[1];
    }
    if (!j["P"].is_array() || j["P"].size() != static_cast<std::size_t>(m.order))
        bad("model.P must list one matrix per derivative order");
    for (const auto& p : j["P"]) m.P.push_back(matrix_from_json(p));
    m.P0 = j.contains("P0") ? field_from_json(j["P0"], "model.P0") : MatrixField::constant(CMatrix::Zero(m.dim, m.dim));
    m.H = field_from_json(j["H"], "model.H");
    const auto hb = numbers(j["h_bounds"], "model.h_bounds");
    if (hb.size() != 2) bad("model.h_bounds must be [m, M]");
    m.h_lower = hb[0];
    m.h_upper = hb[1];

    const bool explicit_w = j.contains("W_B") || j.contains("W_C");
    if (explicit_w == j.contains("boundary")) bad("model needs either W_B and W_C or a boundary selection, not both");
    if (explicit_w) {
        if (!j.contains("W_B") || !j.contains("W_C")) bad("model needs both W_B and W_C");
        m.W_B = matrix_from_json(j["W_B"]);
        m.W_C = matrix_from_json(j["W_C"]);
    } else {
        const json& bj = j["boundary"];
        allow_keys(bj, "model.boundary", {"input", "output"});
        if (!bj.contains("input") || !bj.contains("output")) bad("model.boundary needs input and output");
        for (const auto& p : m.P)
            if (p.rows() != m.dim || p.cols() != m.dim) bad("model.P entries must be dim x dim");
        try {
            const PortMatrices pm = build_port_matrices(m);
            m.W_B = boundary_map_from_selection(selection_from_json(bj["input"], "model.boundary.input"), pm, m.dim, m.order);
            m.W_C = boundary_map_from_selection(selection_from_json(bj["output"], "model.boundary.output"), pm, m.dim, m.order);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InputError) throw;
            bad(std::string("boundary selection: ") + e.what());
        }
    }
    return m;
}

Grid grid_from_json(const json& j, const PHModel& m) {
    allow_keys(j, "grid", {"nodes", "h"});
    if (j.contains("nodes") == j.contains("h")) bad("grid needs exactly one of nodes or h");
    if (j.contains("nodes")) return Grid::with_nodes(m.a, m.b, static_cast<std::size_t>(positive_int(j["nodes"], "grid.nodes")));
    return Grid::with_spacing(m.a, m.b, number(j["h"], "grid.h"));
}

Exosystem exo_from_json(const json& j) {
    allow_keys(j, "exosystem", {"freqs", "E", "F"});
    for (const char* k : {"freqs", "E", "F"})
        if (!j.contains(k)) bad(std::string("exosystem.") + k + " is required");
    Exosystem exo{numbers(j["freqs"], "exosystem.freqs"), matrix_from_json(j["E"]), matrix_from_json(j["F"])};
    try {
        exo.validate();
    } catch (const Error& e) {
        bad(e.what());
    }
    return exo;
}

ControllerOptions controller_from_config(const json& j) {
    allow_keys(j, "controller", {"kappa", "epsilon", "gain_rule", "K0", "sweep"});
    ControllerOptions c;
    if (j.contains("kappa")) c.kappa = number(j["kappa"], "controller.kappa");
    if (j.contains("epsilon")) c.epsilon = number(j["epsilon"], "controller.epsilon");
    if (!(c.kappa > 0.0) || !(c.epsilon > 0.0)) bad("controller kappa and epsilon must be positive");
    const std::string rule = j.value("gain_rule", "pseudoinverse");
    if (rule == "user") {
        c.user_gain = true;
        if (!j.contains("K0") || !j["K0"].is_array()) bad("gain_rule user needs controller.K0 blocks");
        for (const auto& k : j["K0"]) c.K0.push_back(matrix_from_json(k));
    } else if (rule == "pseudoinverse") {
        if (j.contains("K0")) bad("controller.K0 is only used with gain_rule user");
    } else {
        bad("gain_rule must be pseudoinverse or user");
    }
    if (j.contains("sweep")) c.sweep = numbers(j["sweep"], "controller.sweep");
    return c;
}

Scalings scalings_from_json(const json& j) {
    allow_keys(j, "perturbation", {"rho", "ei", "e", "f"});
    Scalings s;
    if (j.contains("rho")) s.rho = number(j["rho"], "rho");
    if (j.contains("ei")) s.ei = number(j["ei"], "ei");
    if (j.contains("e")) s.e = number(j["e"], "e");
    if (j.contains("f")) s.f = number(j["f"], "f");
    return s;
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad("complex entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMatrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(complex_to_json(M(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) bad("matrices must be non-empty row-major arrays of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) bad("matrix rows differ in length");
        for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    return M;
}

json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

CVector vector_from_json(const json& j) {
    if (!j.is_array()) bad("vectors must be arrays of [re, im] pairs");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

ScenarioConfig parse_config(const json& doc) {
    allow_keys(doc, "config", {"model", "grid", "exosystem", "controller", "simulation", "perturbations"});
    if (!doc.contains("model")) bad("config.model is required");
    if (!doc.contains("grid")) bad("config.grid is required");
    ScenarioConfig c;
    c.model = model_from_json(doc["model"]);
    c.grid = grid_from_json(doc["grid"], c.model);
    if (doc.contains("exosystem")) c.exo = exo_from_json(doc["exosystem"]);
    if (doc.contains("controller")) c.controller = controller_from_config(doc["controller"]);
    if (doc.contains("simulation")) {
        const json& s = doc["simulation"];
        allow_keys(s, "simulation", {"T", "dt", "v0", "xi0"});
        if (s.contains("T")) c.simulation.T = number(s["T"], "simulation.T");
        if (s.contains("dt")) c.simulation.dt = number(s["dt"], "simulation.dt");
        if (!(c.simulation.dt > 0.0) || !(c.simulation.T >= c.simulation.dt)) bad("simulation needs dt > 0 and T >= dt");
        if (s.contains("v0")) c.v0 = vector_from_json(s["v0"]);
        if (s.contains("xi0")) c.xi0 = vector_from_json(s["xi0"]);
    }
    if (c.exo && c.v0.size() && c.v0.size() != c.exo->q()) bad("simulation.v0 length differs from the exosystem");
    if (doc.contains("perturbations")) {
        if (!doc["perturbations"].is_array()) bad("perturbations must be an array");
        for (const auto& p : doc["perturbations"]) c.perturbations.push_back(scalings_from_json(p));
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const json::exception& e) {
        bad(std::string("config: ") + e.what());
    }
}

ScenarioConfig beam_scenario() {
    ScenarioConfig c;
    c.model = beam_model();
    c.grid = Grid::with_spacing(c.model.a, c.model.b, 0.05);
    c.exo = beam_exosystem();
    c.controller.kappa = 1.0;
    c.controller.epsilon = 0.17;
    c.controller.sweep = {0.01, 0.02, 0.05, 0.1, 0.12, 0.15, 0.17, 0.2, 0.22, 0.25, 0.3, 0.4, 0.5};
    c.simulation.T = 20.0;
    c.simulation.dt = 1e-3;
    c.v0 = CVector::Ones(4);
    return c;
}

json controller_to_json(const Controller& c) {
    json j;
    j["kappa"] = c.kappa;
    j["epsilon"] = c.epsilon;
    j["freqs"] = c.freqs;
    j["G1"] = matrix_to_json(c.G1);
    j["G2"] = matrix_to_json(c.G2);
    j["K"] = matrix_to_json(c.K);
    j["K0"] = matrix_to_json(c.K0);
    return j;
}

Controller controller_from_json(const json& j) {
    allow_keys(j, "controller", {"kappa", "epsilon", "freqs", "G1", "G2", "K", "K0"});
    for (const char* k : {"kappa", "epsilon", "freqs", "G1", "G2", "K", "K0"})
        if (!j.contains(k)) bad(std::string("controller.") + k + " is required");
    Controller c;
    c.kappa = number(j["kappa"], "kappa");
    c.epsilon = number(j["epsilon"], "epsilon");
    c.freqs = numbers(j["freqs"], "freqs");
    c.G1 = matrix_from_json(j["G1"]);
    c.G2 = matrix_from_json(j["G2"]);
    c.K = matrix_from_json(j["K"]);
    c.K0 = matrix_from_json(j["K0"]);
    return c;
}

}  // namespace phreg
