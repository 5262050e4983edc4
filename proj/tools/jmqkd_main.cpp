#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jmqkd/bounds.hpp"
#include "jmqkd/gaussian.hpp"
#include "jmqkd/jm_solver.hpp"
#include "jmqkd/keyrate.hpp"
#include "jmqkd/qop.hpp"

using json = nlohmann::json;
using namespace jmqkd;

namespace {

constexpr double kPi = std::numbers::pi;

int thread_budget() {
    if (const char* env = std::getenv("THREADS")) {
        int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Deterministic parallel map: results land by index regardless of schedule.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers)
                fn(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

struct Row {
    double x = 0.0;
    double y = 0.0;
    std::string formula;
};

void emit_rows(const std::vector<Row>& rows, const std::string& format, std::ostream& os) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"x", r.x}, {"y", r.y}, {"formula", r.formula}});
        os << arr.dump(2) << "\n";
        return;
    }
    os << "x,y,formula\n";
    for (const auto& r : rows)
        os << fmt9(r.x) << "," << fmt9(r.y) << "," << r.formula << "\n";
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
    if (path.empty())
        return std::cout;
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot open output file: " + path);
    return file;
}

Vec3 parse_direction(const std::string& tok) {
    if (tok == "x")
        return kXAxis;
    if (tok == "y")
        return kYAxis;
    if (tok == "z")
        return kZAxis;
    if (tok == "-x")
        return -kXAxis;
    if (tok == "-y")
        return -kYAxis;
    if (tok == "-z")
        return -kZAxis;
    std::stringstream ss(tok);
    std::string part;
    std::vector<double> comps;
    while (std::getline(ss, part, ':'))
        comps.push_back(std::stod(part));
    if (comps.size() != 3)
        throw std::runtime_error("direction must be x|y|z|-x|-y|-z or ax:ay:az, got: " + tok);
    return Vec3{comps[0], comps[1], comps[2]}.normalized();
}

std::vector<Vec3> parse_directions(const std::string& arg) {
    std::vector<Vec3> dirs;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ','))
        dirs.push_back(parse_direction(tok));
    if (dirs.empty())
        throw std::runtime_error("no directions given");
    return dirs;
}

keyrate::Count parse_count(const std::string& s) {
    if (s == "inf" || s == "INF")
        return keyrate::Count::infinite();
    return keyrate::Count::of(std::stol(s));
}

struct TableCase {
    const char* name;
    keyrate::DiqkdScenario scenario;
    bool theta_opt;
    double ref_eta;  // percent
    double ref_v;    // percent
};

std::vector<TableCase> table_cases(bool binning) {
    using keyrate::Count;
    keyrate::DiqkdScenario s321{Count::of(3), Count::of(2), Count::of(1), binning,
                                keyrate::MeasurementClass::kBinaryQubit, 2};
    keyrate::DiqkdScenario sii1{Count::infinite(), Count::infinite(), Count::of(1), binning,
                                keyrate::MeasurementClass::kBinaryQubit, 2};
    keyrate::DiqkdScenario siii{Count::infinite(), Count::infinite(), Count::infinite(), binning,
                                keyrate::MeasurementClass::kBinaryQubit, 2};
    if (!binning) {
        return {{"(3,2,1)", s321, false, 88.3, 89.8},
                {"(inf,inf,1)", sii1, false, 87.4, 88.8},
                {"(inf,inf,inf)", siii, false, 85.3, 87.1}};
    }
    return {{"(3,2,1)", s321, true, 72.7, 89.8},
            {"(inf,inf,1)", sii1, true, 68.3, 88.8},
            {"(inf,inf,inf)", siii, false, 74.2, 87.1}};
}

int cmd_jm_threshold(const std::string& dirs_arg, double v, double tol,
                     const std::string& format, const std::string& out) {
    auto dirs = parse_directions(dirs_arg);
    if (dirs.size() > 6)
        throw std::runtime_error("the exact solver supports at most 6 directions");
    int n = static_cast<int>(dirs.size());

    auto problem = jm::JmProblem::pvm(dirs, v);
    auto thr = jm::jm_threshold_eta(problem, tol);

    struct Line {
        std::string name;
        double value;
    };
    std::vector<Line> lines;
    lines.push_back({"solver-threshold", thr.eta});
    lines.push_back({"loss-only", bounds::ub_loss(n).value});
    if (n >= 2) {
        lines.push_back({"white-noise", bounds::ub_whitenoise(n, 2, v).value});
        lines.push_back({"binary-qubit", bounds::ub_binary_qubit(n, v).value});
    }
    double vstar = bounds::jm_vis_set(dirs);
    if (v >= vstar)
        lines.push_back({"direction-specific", bounds::ub_concat(1.0 / n, vstar, v).value});
    if (n == 3) {
        // exact three-setting visibility alongside the generic sign-pattern
        // one; the two need not coincide and both are reported
        double vtriple = bounds::jm_vis_triple(dirs[0], dirs[1], dirs[2]);
        if (v >= vtriple)
            lines.push_back(
                {"direction-specific-triple", bounds::ub_concat(1.0 / n, vtriple, v).value});
    }
    lines.push_back({"all-qubit-pvms", bounds::ub_all_qubit_pvms(v).value});

    std::ofstream file;
    auto& os = open_sink(out, file);
    if (format == "json") {
        json j;
        j["directions"] = dirs_arg;
        j["v"] = v;
        j["indeterminate"] = thr.had_indeterminate;
        for (const auto& l : lines)
            j[l.name] = l.value;
        json gaps = json::object();
        for (std::size_t i = 1; i < lines.size(); ++i)
            gaps[lines[i].name] = thr.eta - lines[i].value;
        j["gaps"] = gaps;
        os << j.dump(2) << "\n";
        return 0;
    }
    os << "directions: " << dirs_arg << "  v: " << fmt9(v) << "\n";
    for (const auto& l : lines) {
        os << l.name << ": " << fmt9(l.value);
        if (l.name != "solver-threshold")
            os << "  (gap " << fmt9(thr.eta - l.value) << ")";
        os << "\n";
    }
    if (thr.had_indeterminate)
        os << "note: some probes hit the iteration cap; threshold is the largest certified eta\n";
    return 0;
}

double curve_value(const std::string& id, double x) {
    auto diqkd_at = [&](bool binning, int which, double v) {
        auto cases = table_cases(binning);
        const auto& tc = cases[which];
        auto f = [&](double eta) {
            if (tc.theta_opt)
                return keyrate::diqkd_bound_max_theta(tc.scenario, eta, v).value;
            return keyrate::diqkd_bound(tc.scenario, eta, v, 0.25 * kPi).value;
        };
        if (f(1.0) <= 0.0)
            return std::numeric_limits<double>::quiet_NaN();  // zero key up to eta = 1
        auto bracket = optim::RootBracket::make(f, 1e-3, 1.0, 1e-7);
        return optim::bisect(f, bracket);
    };

    if (id == "fig4-solid-2")
        return bounds::ub_whitenoise(2, 2, x).value;
    if (id == "fig4-solid-3")
        return bounds::ub_whitenoise(3, 2, x).value;
    if (id == "fig4-solid-4")
        return bounds::ub_whitenoise(4, 2, x).value;
    if (id == "fig4-dashed-2")
        return bounds::ub_binary_qubit(2, x).value;
    if (id == "fig4-dashed-3")
        return bounds::ub_binary_qubit(3, x).value;
    if (id == "fig4-dashed-4")
        return bounds::ub_binary_qubit(4, x).value;
    if (id == "fig4-dashed-inf")
        return bounds::ub_all_qubit_pvms(x).value;
    if (id == "fig6-321")
        return diqkd_at(false, 0, x);
    if (id == "fig6-inf-inf-1")
        return diqkd_at(false, 1, x);
    if (id == "fig6-inf-inf-inf")
        return diqkd_at(false, 2, x);
    if (id == "fig7-321")
        return diqkd_at(true, 0, x);
    if (id == "fig7-inf-inf-1")
        return diqkd_at(true, 1, x);
    if (id == "fig7-inf-inf-inf")
        return diqkd_at(true, 2, x);
    throw std::runtime_error("unknown curve id: " + id);
}

int cmd_curve(const std::string& id, double lo, double hi, int points, const std::string& format,
              const std::string& out) {
    if (points < 2)
        throw std::runtime_error("grid needs at least 2 points");
    if (lo < 0.0 || hi > 1.0 || !(lo < hi))
        throw std::runtime_error("grid must satisfy 0 <= min < max <= 1");
    curve_value(id, hi);  // validate the id before spawning workers

    std::vector<Row> rows(points);
    parallel_for(points, [&](int i) {
        double x = lo + (hi - lo) * i / (points - 1);
        rows[i] = Row{x, curve_value(id, x), id};
    });
    std::ofstream file;
    emit_rows(rows, format, open_sink(out, file));
    return 0;
}

int cmd_tables(const std::string& format, const std::string& out) {
    json j;
    j["threshold-tables"] = json::array();
    for (bool binning : {false, true}) {
        for (const auto& tc : table_cases(binning)) {
            double eta = keyrate::diqkd_threshold(tc.scenario, keyrate::ThresholdAxis::kEtaAtV1,
                                                  tc.theta_opt);
            double v = keyrate::diqkd_threshold(tc.scenario, keyrate::ThresholdAxis::kVAtEta1,
                                                tc.theta_opt);
            j["threshold-tables"].push_back({{"table", binning ? "binned" : "no-binning"},
                                             {"setting", tc.name},
                                             {"eta_pct", 100.0 * eta},
                                             {"eta_ref_pct", tc.ref_eta},
                                             {"eta_dev_pp", 100.0 * eta - tc.ref_eta},
                                             {"v_pct", 100.0 * v},
                                             {"v_ref_pct", tc.ref_v},
                                             {"v_dev_pp", 100.0 * v - tc.ref_v}});
        }
    }
    j["attack-dispatch"] = json::array();
    auto cell = [&](const std::string& k, const std::string& n) {
        auto a = keyrate::best_attack_p(parse_count(k), parse_count(n), 0.9, 0.95);
        j["attack-dispatch"].push_back({{"K", k}, {"N", n}, {"family", a.family}});
    };
    for (const char* k : {"1", "2"})
        for (const char* n : {"2", "3", "4", "inf"})
            cell(k, n);
    cell("3", "3");
    cell("3", "4");
    cell("3", "inf");
    cell("4", "4");
    cell("4", "inf");
    cell("inf", "inf");

    std::ofstream file;
    auto& os = open_sink(out, file);
    if (format == "json") {
        os << j.dump(2) << "\n";
        return 0;
    }
    os << "table,setting,eta_pct,eta_ref_pct,eta_dev_pp,v_pct,v_ref_pct,v_dev_pp\n";
    for (const auto& row : j["threshold-tables"]) {
        os << row["table"].get<std::string>() << "," << row["setting"].get<std::string>() << ","
           << fmt9(row["eta_pct"].get<double>()) << "," << fmt9(row["eta_ref_pct"].get<double>())
           << "," << fmt9(row["eta_dev_pp"].get<double>()) << ","
           << fmt9(row["v_pct"].get<double>()) << "," << fmt9(row["v_ref_pct"].get<double>())
           << "," << fmt9(row["v_dev_pp"].get<double>()) << "\n";
    }
    os << "\nK,N,attack-family\n";
    for (const auto& row : j["attack-dispatch"])
        os << row["K"].get<std::string>() << "," << row["N"].get<std::string>() << ","
           << row["family"].get<std::string>() << "\n";
    return 0;
}

int cmd_gaussian(double eta, double eps, int n, const std::string& format,
                 const std::string& out) {
    auto params = gauss::ThermalParams::make(eta, eps);
    auto channel = gauss::thermal_xy(params);
    bool extendable = gauss::n_extendable_gaussian(channel, n);
    auto ub7 = gauss::ub_thermal(n, eps);
    auto ub8 = gauss::ub_gaussian_meas(eps);

    json j;
    j["eta"] = eta;
    j["eps"] = eps;
    j["N"] = n;
    j["extendable"] = extendable;
    j["thermal-extendibility-threshold"] = ub7.value;
    j["gaussian-measurement-threshold"] = ub8.value;
    j["no-convex-gaussian-attack"] = gauss::no_gauss_cc_attack(eta, eps, n);
    double sigma2 = 0.5 * (1.0 - 2.0 * eta + eps * eta);
    if (sigma2 >= 0.0) {
        auto sim = gauss::homodyne_sim_params(eta, eps);
        j["homodyne-sim"] = {{"gain", sim.gain}, {"sigma2", sim.sigma2}};
    } else {
        j["homodyne-sim"] = {{"violated", "eta <= 1/(2-eps)"}, {"sigma2", sigma2}};
    }

    std::ofstream file;
    auto& os = open_sink(out, file);
    if (format == "json") {
        os << j.dump(2) << "\n";
        return 0;
    }
    os << "thermal channel eta=" << fmt9(eta) << " eps=" << fmt9(eps) << " N=" << n << "\n";
    os << (extendable ? "extendable" : "not extendable") << "\n";
    os << "thermal-extendibility-threshold: " << fmt9(ub7.value) << "\n";
    os << "gaussian-measurement-threshold: " << fmt9(ub8.value) << "\n";
    if (sigma2 >= 0.0) {
        os << "homodyne-sim gain: " << fmt9(j["homodyne-sim"]["gain"].get<double>())
           << " sigma2: " << fmt9(j["homodyne-sim"]["sigma2"].get<double>()) << "\n";
    } else {
        os << "homodyne-sim unavailable: violates eta <= 1/(2-eps) (sigma2 = " << fmt9(sigma2)
           << ")\n";
    }
    return 0;
}

int cmd_keyrate(const std::string& protocol, double eta, double v, double theta, bool binning,
                const std::string& na, const std::string& nb, const std::string& kb,
                const std::string& n_arg, const std::string& threshold_axis,
                const std::string& format, const std::string& out) {
    json j;
    j["protocol"] = protocol;
    j["eta"] = eta;
    j["v"] = v;

    keyrate::KeyRateBound b;
    if (protocol == "bb84") {
        b = keyrate::bb84_bound(eta, v, binning);
        if (!threshold_axis.empty()) {
            if (threshold_axis != "eta")
                throw std::runtime_error("bb84 threshold axis must be eta");
            j["threshold-eta"] = keyrate::bb84_threshold_eta(v, binning);
        }
    } else if (protocol == "rdi") {
        b = keyrate::rdi_bound(eta, v, theta, parse_count(n_arg));
        if (!threshold_axis.empty()) {
            if (threshold_axis != "v")
                throw std::runtime_error("rdi threshold axis must be v");
            j["threshold-v"] = keyrate::rdi_visibility_threshold(eta);
        }
    } else if (protocol == "diqkd") {
        keyrate::DiqkdScenario sc{parse_count(na), parse_count(nb), parse_count(kb), binning,
                                  keyrate::MeasurementClass::kBinaryQubit, 2};
        b = keyrate::diqkd_bound(sc, eta, v, theta);
        auto split = keyrate::diqkd_attack_split(sc, eta, v);
        j["split"] = {{"p_a", split.p_a}, {"p_b", split.p_b}, {"q", split.q}, {"t", split.t},
                      {"alice-family", split.alice.family}, {"bob-family", split.bob.family}};
        if (!threshold_axis.empty()) {
            bool theta_opt = binning && !(sc.n_a.inf && sc.n_b.inf && sc.k_b.inf);
            auto axis = threshold_axis == "eta" ? keyrate::ThresholdAxis::kEtaAtV1
                                                : keyrate::ThresholdAxis::kVAtEta1;
            j["threshold-" + threshold_axis] = keyrate::diqkd_threshold(sc, axis, theta_opt);
        }
    } else {
        throw std::runtime_error("unknown protocol: " + protocol);
    }

    j["value"] = b.value;
    j["weight"] = b.weight;
    j["h_key"] = b.h_key;
    j["h_cond"] = b.h_cond;
    j["zero_key"] = b.zero_key;

    std::ofstream file;
    auto& os = open_sink(out, file);
    if (format == "json") {
        os << j.dump(2) << "\n";
        return 0;
    }
    os << protocol << " bound: " << fmt9(b.value) << " (weight " << fmt9(b.weight) << ", h_key "
       << fmt9(b.h_key) << ", h_cond " << fmt9(b.h_cond) << ")\n";
    os << "zero_key: " << (b.zero_key ? "true" : "false") << "\n";
    for (auto& [key, val] : j.items()) {
        if (key.rfind("threshold-", 0) == 0)
            os << key << ": " << fmt9(val.get<double>()) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-measurability thresholds and key-rate upper bounds for lossy/noisy "
                 "measurement units"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string out;
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out, "write output to this file instead of stdout");

    auto* jm_cmd = app.add_subcommand("jm-threshold", "exact threshold vs analytic bounds");
    std::string dirs = "z,x";
    double v = 1.0;
    double tol = 1e-5;
    jm_cmd->add_option("--dirs", dirs, "comma list: x,y,z,-x,... or ax:ay:az triples");
    jm_cmd->add_option("--v", v, "visibility")->check(CLI::Range(0.0, 1.0));
    jm_cmd->add_option("--tol", tol, "bisection tolerance");

    auto* curve_cmd = app.add_subcommand("curve", "threshold curve on a grid");
    std::string curve_id;
    double grid_min = 0.0, grid_max = 1.0;
    int grid_points = 50;
    curve_cmd->add_option("--id", curve_id,
                          "fig4-solid-N, fig4-dashed-N|inf, fig6-<case>, fig7-<case> with case "
                          "321|inf-inf-1|inf-inf-inf")
        ->required();
    curve_cmd->add_option("--min", grid_min, "grid start");
    curve_cmd->add_option("--max", grid_max, "grid end");
    curve_cmd->add_option("--points", grid_points, "grid size");

    auto* tables_cmd = app.add_subcommand("tables", "recompute the threshold tables");

    auto* gauss_cmd = app.add_subcommand("gaussian", "thermal-channel extendibility report");
    double g_eta = 0.5, g_eps = 0.0;
    int g_n = 2;
    gauss_cmd->add_option("--eta", g_eta, "transmittance")->check(CLI::Range(0.0, 1.0));
    gauss_cmd->add_option("--eps", g_eps, "excess noise");
    gauss_cmd->add_option("--N", g_n, "number of measurements");

    auto* key_cmd = app.add_subcommand("keyrate", "protocol key-rate upper bounds");
    std::string protocol = "bb84";
    double k_eta = 1.0, k_v = 1.0, k_theta = kPi / 4.0;
    bool bin_flag = false, nobin_flag = false;
    std::string na = "3", nb = "2", kb = "1", n_arg = "inf", threshold_axis;
    key_cmd->add_option("--protocol", protocol, "bb84, rdi or diqkd");
    key_cmd->add_option("--eta", k_eta)->check(CLI::Range(0.0, 1.0));
    key_cmd->add_option("--v", k_v)->check(CLI::Range(0.0, 1.0));
    key_cmd->add_option("--theta", k_theta, "state angle in radians");
    key_cmd->add_flag("--bin", bin_flag, "bin the no-click outcome");
    key_cmd->add_flag("--no-bin", nobin_flag, "keep the no-click outcome distinct (default)");
    key_cmd->add_option("--NA", na, "Alice settings (int or inf)");
    key_cmd->add_option("--NB", nb, "Bob settings (int or inf)");
    key_cmd->add_option("--KB", kb, "Bob key settings (int or inf)");
    key_cmd->add_option("--N", n_arg, "preparation count for rdi (int or inf)");
    key_cmd->add_option("--threshold", threshold_axis, "root-find along this axis: eta or v")
        ->check(CLI::IsMember({"eta", "v"}));

    for (auto* sub : {jm_cmd, curve_cmd, tables_cmd, gauss_cmd, key_cmd})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (jm_cmd->parsed())
            return cmd_jm_threshold(dirs, v, tol, format, out);
        if (curve_cmd->parsed())
            return cmd_curve(curve_id, grid_min, grid_max, grid_points, format, out);
        if (tables_cmd->parsed())
            return cmd_tables(format, out);
        if (gauss_cmd->parsed())
            return cmd_gaussian(g_eta, g_eps, g_n, format, out);
        if (key_cmd->parsed()) {
            if (bin_flag && nobin_flag)
                throw std::runtime_error("--bin and --no-bin are mutually exclusive");
            return cmd_keyrate(protocol, k_eta, k_v, k_theta, bin_flag, na, nb, kb, n_arg,
                               threshold_axis, format, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
