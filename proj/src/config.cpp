#include "ebsc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ebsc/io.hpp"

namespace ebsc {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, int rows, int cols, const std::string& field) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (rows == cols) return v * Eigen::MatrixXd::Identity(rows, cols);
        if (rows == 1 && cols == 1) return Eigen::MatrixXd::Constant(1, 1, v);
        throw ConfigError("field '" + field + "': scalar shorthand needs a square shape");
    }
    if (!j.is_array()) throw ConfigError("field '" + field + "': expected number or matrix");
    // accept [a, b, ...] for a single row/column and [[...], ...] otherwise
    Eigen::MatrixXd m(rows, cols);
    if (!j.empty() && !j[0].is_array()) {
        if (int(j.size()) != rows * cols)
            throw ConfigError("field '" + field + "': expected " + std::to_string(rows * cols) +
                              " entries");
        for (int i = 0; i < rows * cols; ++i) m(i / cols, i % cols) = j[i].get<double>();
        return m;
    }
    if (int(j.size()) != rows) throw ConfigError("field '" + field + "': wrong row count");
    for (int r = 0; r < rows; ++r) {
        if (int(j[r].size()) != cols)
            throw ConfigError("field '" + field + "': wrong column count in row " +
                              std::to_string(r));
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

CoefficientPath parse_coefficient(const json& j, int rows, int cols, const TimeGrid& grid,
                                  const std::string& field) {
    if (j.is_object()) {
        if (!j.contains("times") || !j.contains("values"))
            throw ConfigError("field '" + field + "': path spec needs 'times' and 'values'");
        std::vector<double> times = j.at("times").get<std::vector<double>>();
        std::vector<Eigen::MatrixXd> values;
        for (const auto& v : j.at("values")) values.push_back(parse_matrix(v, rows, cols, field));
        return CoefficientPath::piecewise_linear(times, values, grid);
    }
    return CoefficientPath::constant(parse_matrix(j, rows, cols, field), grid);
}

ReferenceMeasure parse_reference(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "standard_gaussian") return ReferenceMeasure::standard_gaussian();
        if (s == "flat") return ReferenceMeasure::flat();
        throw ConfigError("unknown reference measure '" + s + "'");
    }
    if (j.is_object() && j.value("type", "") == "grid_potential") {
        const ControlGrid g(j.at("a_min").get<double>(), j.at("a_max").get<double>(),
                            j.at("n_points").get<int>());
        return ReferenceMeasure::grid_potential(g, j.at("values").get<std::vector<double>>());
    }
    throw ConfigError("reference must be 'standard_gaussian', 'flat' or a grid_potential object");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    try {
        if (!j.contains("model")) throw ConfigError("missing 'model' section");
        const json& jm = j.at("model");
        const json jg = j.value("grid", json::object());
        const TimeGrid grid(jg.value("t_end", 1.0), jg.value("n_steps", 1000));

        LQModel m;
        m.n = jm.value("n", 1);
        m.p = jm.value("p", 1);
        m.grid = grid;
        m.A = parse_coefficient(jm.value("A", json(0.0)), m.n, m.n, grid, "A");
        m.B = parse_coefficient(jm.value("B", json(0.0)), m.n, m.p, grid, "B");
        m.C = parse_coefficient(jm.value("C", json(0.0)), m.n, m.n, grid, "C");
        m.H = parse_coefficient(jm.value("H", json(0.0)), m.n, m.n, grid, "H");
        m.N = parse_coefficient(jm.value("N", json(0.0)), m.n, m.n, grid, "N");
        m.R = parse_coefficient(jm.value("R", json(0.0)), m.p, m.p, grid, "R");
        m.G = parse_matrix(jm.value("G", json(0.0)), m.n, m.n, "G");
        m.sigma = jm.value("sigma", 1.0);

        if (!jm.contains("terminal")) throw ConfigError("missing 'model.terminal'");
        const json& jt = jm.at("terminal");
        m.terminal.c = parse_matrix(jt.at("c"), m.n, 1, "terminal.c").col(0);
        if (jt.contains("q"))
            m.terminal.q = parse_matrix(jt.at("q"), m.n, 1, "terminal.q").col(0);
        m.reference = parse_reference(jm.value("reference", json("standard_gaussian")));

        ExperimentConfig cfg;
        cfg.model = validate_model(m);

        const json jr = j.value("run", json::object());
        cfg.n_paths = jr.value("n_paths", 10000);
        cfg.seed = jr.value("seed", std::uint64_t(42));
        cfg.threads = jr.value("threads", 0u);
        if (const char* env = std::getenv("EBSC_SEED")) {
            cfg.seed = std::strtoull(env, nullptr, 10);
            cfg.seed_from_env = true;
        }
        cfg.output_dir = j.value("output_dir", std::string("out"));

        if (j.contains("gibbs")) {
            const json& jb = j.at("gibbs");
            GibbsConfig gc;
            gc.spec.c0 = jb.value("c0", 0.0);
            gc.spec.c1 = jb.value("c1", 0.0);
            gc.spec.c2 = jb.value("c2", 0.0);
            gc.spec.d1 = jb.value("d1", 0.0);
            gc.damping = jb.value("damping", 0.5);
            gc.tol = jb.value("tol", 1e-10);
            gc.max_iter = jb.value("max_iter", 500);
            if (jb.contains("grid")) {
                const json& jgg = jb.at("grid");
                gc.grid = ControlGrid(jgg.value("a_min", -10.0), jgg.value("a_max", 10.0),
                                      jgg.value("n_points", 2001));
            }
            cfg.gibbs = gc;
        }

        if (j.contains("verify")) {
            const json& jv = j.at("verify");
            cfg.verify.delta = jv.value("delta", cfg.verify.delta);
            cfg.verify.sigmas = jv.value("sigmas", cfg.verify.sigmas);
            cfg.verify.path_counts = jv.value("path_counts", cfg.verify.path_counts);
            cfg.verify.lln_seeds = jv.value("lln_seeds", cfg.verify.lln_seeds);
            cfg.verify.epsilons = jv.value("epsilons", cfg.verify.epsilons);
            cfg.verify.mean_shifts = jv.value("mean_shifts", cfg.verify.mean_shifts);
            cfg.verify.stationarity_paths =
                jv.value("stationarity_paths", cfg.verify.stationarity_paths);
        }

        cfg.config_hash = io::fnv1a_hex(json_text);
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return parse_config(os.str());
}

}  // namespace ebsc
