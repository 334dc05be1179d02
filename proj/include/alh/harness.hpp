#pragma once

// Run orchestration: configuration parsing, metric-family construction, and
// the pipelines behind each command-line subcommand. Every runner appends to
// a Report and returns a process exit code: 0 for verified, 1 when a numeric
// check failed. Input and usage errors throw (mapped to exit 2 / 3 by main).

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alh/charts.hpp"
#include "alh/eigenfunction.hpp"
#include "alh/fd.hpp"
#include "alh/grid.hpp"
#include "alh/random.hpp"
#include "alh/regularity.hpp"
#include "alh/report.hpp"
#include "alh/riccati.hpp"
#include "alh/windows.hpp"
#include "alh/zoo.hpp"

namespace alh {

struct Settings {
    // grid
    int n = 1;
    double w0 = 0.0, w_max = 10.0;
    int nw = 161, nx = 33;
    double l = 1.0;
    // metric family
    std::string family = "hyperbolic";  // hyperbolic | warped | perturbed
    double a = 0.5;
    double eps = 0.1, eps_n = 0.05;  // perturbed amplitudes
    double amp = 0.1;                // warped amplitude
    // riccati
    double ric_ds = 0.005, ric_smax = 15.0, ric_lambda0 = 1.5, ric_j = 0.5;
    // charts
    bool chart_odd = true;
    double chart_delta = 0.5;
    double zoom_alpha = 0.5, zoom_target = 0.05;
    int zoom_nodes = 0;  // 0 = solver default
    // compactify
    int nrho = 257;
    // lemma sampling
    int transport_trials = 100, oscillation_trials = 100, gronwall_trials = 50;
    unsigned long long seed = 12345;
};

// ---------------------------------------------------------------------------
// Configuration files: [section] headers, key = value lines, # comments.

namespace detail {

inline std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw data_error("malformed number for " + key + ": '" + v + "'");
    }
    if (used != v.size()) throw data_error("malformed number for " + key + ": '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw data_error("malformed integer for " + key + ": '" + v + "'");
    }
    if (used != v.size()) throw data_error("malformed integer for " + key + ": '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw data_error("malformed flag for " + key + ": '" + v + "'");
}

} // namespace detail

inline std::map<std::string, std::string> parse_config_stream(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw data_error("unterminated section header at line " + std::to_string(lineno));
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw data_error("expected key = value at line " + std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw data_error("empty key or value at line " + std::to_string(lineno));
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full)) throw data_error("duplicate configuration key: " + full);
        out[full] = val;
    }
    return out;
}

inline std::map<std::string, std::string> parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open configuration file: " + path);
    return parse_config_stream(in);
}

inline Settings settings_from_config(const std::map<std::string, std::string>& cfg) {
    Settings s;
    for (const auto& [key, val] : cfg) {
        if (key == "grid.n") s.n = static_cast<int>(detail::parse_int(key, val));
        else if (key == "grid.w0") s.w0 = detail::parse_double(key, val);
        else if (key == "grid.w_max") s.w_max = detail::parse_double(key, val);
        else if (key == "grid.nw") s.nw = static_cast<int>(detail::parse_int(key, val));
        else if (key == "grid.nx") s.nx = static_cast<int>(detail::parse_int(key, val));
        else if (key == "grid.l") s.l = detail::parse_double(key, val);
        else if (key == "metric.family") s.family = val;
        else if (key == "metric.a") s.a = detail::parse_double(key, val);
        else if (key == "metric.eps") s.eps = detail::parse_double(key, val);
        else if (key == "metric.eps_n") s.eps_n = detail::parse_double(key, val);
        else if (key == "metric.amp") s.amp = detail::parse_double(key, val);
        else if (key == "riccati.ds") s.ric_ds = detail::parse_double(key, val);
        else if (key == "riccati.smax") s.ric_smax = detail::parse_double(key, val);
        else if (key == "riccati.lambda0") s.ric_lambda0 = detail::parse_double(key, val);
        else if (key == "riccati.j") s.ric_j = detail::parse_double(key, val);
        else if (key == "charts.odd") s.chart_odd = detail::parse_bool(key, val);
        else if (key == "charts.delta") s.chart_delta = detail::parse_double(key, val);
        else if (key == "charts.zoom_alpha") s.zoom_alpha = detail::parse_double(key, val);
        else if (key == "charts.zoom_target") s.zoom_target = detail::parse_double(key, val);
        else if (key == "charts.zoom_nodes") s.zoom_nodes = static_cast<int>(detail::parse_int(key, val));
        else if (key == "compactify.nrho") s.nrho = static_cast<int>(detail::parse_int(key, val));
        else if (key == "lemmas.transport_trials")
            s.transport_trials = static_cast<int>(detail::parse_int(key, val));
        else if (key == "lemmas.oscillation_trials")
            s.oscillation_trials = static_cast<int>(detail::parse_int(key, val));
        else if (key == "lemmas.gronwall_trials")
            s.gronwall_trials = static_cast<int>(detail::parse_int(key, val));
        else if (key == "lemmas.seed")
            s.seed = static_cast<unsigned long long>(detail::parse_int(key, val));
        else throw precondition_error("unknown configuration key: " + key);
    }
    if (s.family != "hyperbolic" && s.family != "warped" && s.family != "perturbed")
        throw precondition_error("unknown metric family: " + s.family);
    return s;
}

inline HalfSpaceGrid make_grid(const Settings& s) {
    return HalfSpaceGrid(s.n, s.w0, s.w_max, s.nw, s.l, s.nx);
}

inline ZeroShiftMetric build_family(const Settings& s, const HalfSpaceGrid& g) {
    if (s.family == "hyperbolic") return make_hyperbolic(g);
    if (s.family == "warped") return make_warped(g, s.a, s.amp).m;
    PerturbParams p;
    p.a = s.a;
    p.eps = s.eps;
    p.eps_n = s.eps_n;
    return make_perturbed(g, p);
}

// Boundary-limit metric of the family as a callback for the zoom solvers.
// Only the perturbed family has a nontrivial boundary metric.
inline BoundaryMetricFn boundary_metric_of_family(const Settings& s) {
    const int n = s.n;
    const double l = s.l, eps = (s.family == "perturbed") ? s.eps : 0.0;
    return [n, l, eps](const std::array<double, 2>& x, std::array<double, 4>& out) {
        double u = 0.0;
        for (int axi = 0; axi < n; ++axi) {
            const double z = x[static_cast<std::size_t>(axi)] / (0.9 * l);
            u += z * z;
        }
        const double k = (u < 1.0) ? std::pow(1.0 - u, 4) : 0.0;
        if (n == 1) {
            out = {1.0 + eps * k, 0.0, 0.0, 1.0};
        } else {
            out = {1.0 + eps * k * 0.6, eps * k * 0.8, eps * k * 0.8, 1.0 - eps * k * 0.6};
        }
    };
}

// ---------------------------------------------------------------------------
// Subcommand pipelines.

inline int run_riccati(const Settings& s, Report& rep) {
    Eigen::MatrixXd S0 = s.ric_lambda0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::Matrix2d P;
    P << 0.6, 0.8, 0.8, -0.6;
    const double a = s.a, J = s.ric_j;
    MatrixSource F = [a, J, P](double t) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Identity(2, 2) + J * std::exp(-a * t) * P;
    };
    RiccatiOptions opts;
    opts.ds = s.ric_ds;
    opts.smax = s.ric_smax;
    RiccatiTrajectory traj = riccati_evolve(S0, g0, F, opts);
    rep.add_flag("riccati", "blew-up", traj.blew_up);
    if (traj.blew_up) {
        rep.add("riccati", "s-blowup", traj.s_blowup);
        return 1;
    }
    ShapeBoundsCheck chk = verify_shape_bounds(traj, a, J);
    rep.add("riccati", "c-matrix", chk.c_matrix);
    rep.add("riccati", "c-scalar", chk.c_scalar);
    rep.add_flag("riccati", "envelope-pass", chk.pass);
    rep.add("riccati", "logdet-residual", logdet_flow_residual(traj));

    EigenTrack tr = shape_eigenvalues(traj);
    std::vector<double> ws, dev;
    for (std::size_t k = 0; k < traj.s.size(); ++k) {
        if (traj.s[k] < 1.0) continue;
        ws.push_back(traj.s[k]);
        dev.push_back(std::max(std::abs(tr.hi[k] - 1.0), std::abs(tr.lo[k] - 1.0)));
    }
    DecayFit fit = fit_decay_rate(ws, dev);
    if (fit.usable) rep.add("riccati", "shape-decay-rate", fit.rate);
    rep.add("riccati", "shape-decay-expected", a);
    const bool rate_ok = fit.usable && std::abs(fit.rate - a) <= 0.05;
    rep.add_flag("riccati", "rate-pass", rate_ok);
    return (chk.pass && rate_ok) ? 0 : 1;
}

inline int run_eigenfunction(const Settings& s, Report& rep) {
    HalfSpaceGrid g = make_grid(s);
    ZeroShiftMetric m = build_family(s, g);
    FdOps fd(g);
    EigenfunctionResult ef = solve_radial_eigenfunction(m, fd);
    ReportRegion reg = make_report_region(g);
    rep.add_int("eigenfunction", "cg-iterations", ef.stats.iterations);
    rep.add("eigenfunction", "correction-max", ef.t1.raw().empty() ? 0.0 : [&] {
        double v = 0.0;
        for (double x : ef.t1.raw()) v = std::max(v, std::abs(x));
        return v;
    }());
    rep.add("eigenfunction", "residual-sup", sup_over_region(ef.residual, reg));
    rep.add("eigenfunction", "vertical-sup", sup_over_region(ef.vertical_gnorm, reg));
    AlhOrder order = measure_vertical_decay(m, ef, s.a - 1.0);
    if (order.fit.usable) {
        rep.add("eigenfunction", "vertical-rate", order.fit.rate);
        rep.add("eigenfunction", "vertical-rate-expected", s.a - 1.0);
    } else {
        rep.add_text("eigenfunction", "vertical-rate", "floor");
    }
    const bool ok =
        !order.fit.usable || std::abs(order.fit.rate - (s.a - 1.0)) <= 0.15;
    rep.add_flag("eigenfunction", "pass", ok);
    return ok ? 0 : 1;
}

inline int run_charts(const Settings& s, Report& rep) {
    HalfSpaceGrid g = make_grid(s);
    ZeroShiftMetric m = build_family(s, g);
    FdOps fd(g);
    InteriorChartOptions opts;
    opts.odd_reflection = s.chart_odd && s.n == 1;
    opts.delta_weight = s.chart_delta;
    InteriorChart chart = solve_interior_chart(
        m, fd, [](std::array<double, 3> px) { return px[0]; }, opts);
    rep.add("charts", "rhs-max", chart.rhs_max);
    double corr = 0.0;
    for (double v : chart.correction.raw()) corr = std::max(corr, std::abs(v));
    rep.add("charts", "correction-max", corr);
    std::vector<double> stations = norm_stations(g);
    DecayFit fit = station_decay_fit(g, chart.pairing, stations);
    bool ok = true;
    if (fit.usable) {
        rep.add("charts", "pairing-rate", fit.rate);
        rep.add("charts", "pairing-rate-floor", 1.0 + s.a);
        ok = fit.rate >= 1.0 + s.a - 0.1;
    } else {
        rep.add_text("charts", "pairing-rate", "floor");
    }

    ZoomSearch zoom = zoom_lambda_search(s.n, boundary_metric_of_family(s),
                                         {0.25 * s.l, (s.n == 2) ? 0.1 * s.l : 0.0}, s.zoom_alpha,
                                         s.zoom_target, s.zoom_nodes);
    rep.add_flag("charts", "zoom-found", zoom.ok);
    if (zoom.ok) {
        rep.add("charts", "zoom-lambda", zoom.lambda);
        rep.add("charts", "zoom-norm", zoom.c1a_norm);
        rep.add("charts", "zoom-min-jacobian", zoom.min_jac);
    }
    ok = ok && zoom.ok;
    rep.add_flag("charts", "pass", ok);
    return ok ? 0 : 1;
}

inline int run_compactify(const Settings& s, Report& rep) {
    HalfSpaceGrid g = make_grid(s);
    ZeroShiftMetric m = build_family(s, g);
    FdOps fd(g);
    EigenfunctionResult ef = solve_radial_eigenfunction(m, fd);
    RhoSlab slab = compactify(m, ef.t, fd, s.nrho);
    rep.add("compactify", "rho-lo", slab.rho_lo);
    rep.add("compactify", "rho-hi", slab.rho_hi);
    HolderEstimate est = holder_exponent(slab);
    rep.add("compactify", "alpha-hat", est.alpha_hat);
    rep.add_flag("compactify", "alpha-saturated", est.saturated);
    rep.add_flag("compactify", "alpha-at-floor", est.at_floor);
    for (std::size_t c = 0; c < est.class_alpha.size(); ++c)
        rep.add("compactify", "alpha-class-" + std::to_string(c), est.class_alpha[c]);
    if (s.a > 1.0) {
        HolderEstimate mu = holder_exponent_christoffels(slab);
        rep.add("compactify", "mu-hat", mu.alpha_hat);
        rep.add_flag("compactify", "mu-saturated", mu.saturated);
    }
    return 0;
}

inline int run_battery(const Settings& s, Report& rep) {
    HalfSpaceGrid g = make_grid(s);
    ZeroShiftMetric m = build_family(s, g);
    FdOps fd(g);
    EigenfunctionResult ef = solve_radial_eigenfunction(m, fd);

    InteriorChart chart;
    const InteriorChart* chart_ptr = nullptr;
    if (s.n == 1) {
        InteriorChartOptions opts;
        opts.odd_reflection = s.chart_odd;
        opts.delta_weight = s.chart_delta;
        chart = solve_interior_chart(m, fd, [](std::array<double, 3> px) { return px[0]; }, opts);
        chart_ptr = &chart;
    }
    BatteryResult bat = component_order_battery(m, fd, ef, s.a, chart_ptr);
    for (const BatteryRow& row : bat.rows) {
        if (row.sentinel) {
            rep.add_text("battery", row.name + "-rate", "sentinel");
        } else {
            rep.add("battery", row.name + "-rate", row.rate);
        }
        rep.add("battery", row.name + "-expected", row.predicted);
        rep.add_flag("battery", row.name + "-ok", row.ok);
    }
    rep.add("battery", "pair-gap", bat.pair_gap);
    rep.add_flag("battery", "all-ok", bat.all_ok);
    return bat.all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Randomized estimate verification.

namespace detail {

inline ScalarField random_smooth_scalar(const HalfSpaceGrid& g, Rng& rng) {
    const double amp = rng.uniform(0.5, 2.0);
    const double rate = rng.uniform(-0.5, 1.2);
    const double k1 = rng.uniform(0.5, 3.0);
    const double ph = rng.uniform(0.0, 6.283185307179586);
    const double base = rng.uniform(-1.0, 1.0);
    return ScalarField::from(g, [=](double w, std::array<double, 3> px) {
        double tang = 1.0;
        for (int axi = 0; axi < 3; ++axi) tang *= std::cos(k1 * px[static_cast<std::size_t>(axi)] + ph);
        return base + amp * std::exp(-rate * w) * tang;
    });
}

inline TensorField random_smooth_tensor(const HalfSpaceGrid& g, int rank, Rng& rng) {
    TensorField t(g, rank);
    for (int c = 0; c < t.ncomp(); ++c) {
        ScalarField f = random_smooth_scalar(g, rng);
        t.assign_component(c, f);
    }
    return t;
}

} // namespace detail

inline int run_verify_lemmas(const Settings& s, Report& rep) {
    HalfSpaceGrid g(1, 0.0, 6.0, 121, 1.0, 33);
    FdOps fd(g);
    Rng rng(s.seed);

    int transport_pass = 0;
    for (int trial = 0; trial < s.transport_trials; ++trial) {
        const int rank = rng.uniform_int(0, 2);
        TensorField t = detail::random_smooth_tensor(g, rank, rng);
        const double r = rng.uniform(0.3, 0.8);
        const double w0 = rng.uniform(0.0 + r + 0.05, 2.0);
        const double w1 = rng.uniform(w0 + 0.5, 6.0 - r - 0.05);
        const double p = rng.uniform(1.5, 4.0);
        MwResult res = check_moving_window_transport(g, fd, t, {0.0, 0.0, 0.0}, r, w0, w1, p);
        if (res.pass) ++transport_pass;
    }
    rep.add_int("lemmas", "transport-pass", transport_pass);
    rep.add_int("lemmas", "transport-trials", s.transport_trials);

    int osc_pass = 0;
    for (int trial = 0; trial < s.oscillation_trials; ++trial) {
        ScalarField f = detail::random_smooth_scalar(g, rng);
        const double r = rng.uniform(0.3, 0.8);
        const double w0 = rng.uniform(0.0 + r + 0.05, 2.0);
        const double w1 = rng.uniform(w0 + 0.5, 6.0 - r - 0.05);
        const double p = rng.uniform(2.2, 5.0);
        MwResult res = check_moving_window_oscillation(g, fd, f, {0.0, 0.0, 0.0}, r, w0, w1, p);
        if (res.pass) ++osc_pass;
    }
    rep.add_int("lemmas", "oscillation-pass", osc_pass);
    rep.add_int("lemmas", "oscillation-trials", s.oscillation_trials);

    int gron_pass = 0;
    for (int trial = 0; trial < s.gronwall_trials; ++trial) {
        const int mpts = 101;
        std::vector<double> ws(mpts), fvals(mpts), avals(mpts), bvals(mpts);
        const double a0 = rng.uniform(0.5, 2.0);
        const double b0 = rng.uniform(0.0, 0.5);
        const double b1 = rng.uniform(0.0, 0.5);
        const double q = rng.uniform(0.5, 0.95);
        double bint = 0.0;
        for (int i = 0; i < mpts; ++i) {
            const double w = 5.0 * i / (mpts - 1);
            ws[static_cast<std::size_t>(i)] = w;
            avals[static_cast<std::size_t>(i)] = a0;
            bvals[static_cast<std::size_t>(i)] = b0 + b1 * std::exp(-w);
        }
        for (int i = 0; i < mpts; ++i) {
            if (i > 0)
                bint += 0.5 * (ws[static_cast<std::size_t>(i)] - ws[static_cast<std::size_t>(i) - 1]) *
                        (bvals[static_cast<std::size_t>(i)] + bvals[static_cast<std::size_t>(i) - 1]);
            fvals[static_cast<std::size_t>(i)] = q * a0 * std::exp(bint);
        }
        GronwallResult res = gronwall_bound(ws, fvals, avals, bvals);
        if (res.premise_ok && res.conclusion_ok) ++gron_pass;
    }
    rep.add_int("lemmas", "gronwall-pass", gron_pass);
    rep.add_int("lemmas", "gronwall-trials", s.gronwall_trials);

    const bool ok = transport_pass == s.transport_trials && osc_pass == s.oscillation_trials &&
                    gron_pass == s.gronwall_trials;
    rep.add_flag("lemmas", "all-ok", ok);
    return ok ? 0 : 1;
}

inline int run_all(const Settings& s, Report& rep) {
    int worst = 0;
    worst = std::max(worst, run_eigenfunction(s, rep));
    worst = std::max(worst, run_battery(s, rep));
    worst = std::max(worst, run_compactify(s, rep));
    return worst;
}

} // namespace alh
