// phaselock command-line front end. Every subcommand prints one JSON value
// on stdout; errors go to stderr with exit code 2 (validation), 3
// (numerical) or 1 (I/O).

#include <phaselock/phaselock.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace phaselock;

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

// Floats with 9 significant digits, integers verbatim, non-finite as null.
void dump(const json& j, std::string& out) {
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ',';
            first = false;
            out += json(k).dump();
            out += ':';
            dump(v, out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            dump(j[i], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);
            out += buf;
        }
        break;
    }
    default:
        out += j.dump();
    }
}

void emit(const json& j) {
    std::string s;
    dump(j, s);
    std::cout << s << '\n';
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw domain_error(flag + ": '" + item + "' is not a number");
        v.push_back(x);
    }
    if (v.size() != n) throw domain_error(flag + " expects " + std::to_string(n) + " comma-separated values");
    return v;
}

RootSign parse_root(const std::string& s) {
    if (s == "+") return RootSign::Plus;
    if (s == "-") return RootSign::Minus;
    throw domain_error("--root must be + or -");
}

// Off the real axis and away from 0, 1/alpha, alpha, 1.
std::vector<cplx> ghe_samples(double alpha) {
    const double m = 0.5 * (1.0 + alpha);
    return {cplx(0.3, 0.4), cplx(-0.5, 0.2), cplx(m, 0.7), cplx(alpha + 0.5, -0.6),
            cplx(0.1, -0.9), cplx(-1.2, -0.3), cplx(m, -1.5), cplx(2.0 * alpha, 1.0)};
}

std::vector<cplx> che_samples() {
    return {cplx(0.3, 0.4), cplx(-0.5, 0.2), cplx(1.5, 0.7), cplx(2.5, -0.6),
            cplx(0.1, -0.9), cplx(-1.2, -0.3), cplx(0.8, -1.5), cplx(3.0, 1.0)};
}

struct Torus {
    double omega = 1.0, delta = 0.0, bigd = 0.0, b = 0.0, a = 0.0;
    TorusParams params() const { return {omega, delta, bigd, b, a}; }
};

void add_torus_flags(CLI::App* c, Torus& t, bool with_a) {
    c->add_option("--omega", t.omega, "frequency omega")->required();
    c->add_option("--delta", t.delta, "deformation delta in [0,1)")->required();
    c->add_option("--bigd", t.bigd, "constant drift D");
    c->add_option("--b", t.b, "bias B")->required();
    if (with_a) c->add_option("--a", t.a, "modulation amplitude A");
}

std::string class_json(MapKind k) { return std::string(to_string(k)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-lock areas of deformed RSJ torus flows"};
    app.require_subcommand(1);

    double atol = 1e-10, rtol = 1e-10;
    unsigned workers = default_workers();
    app.add_option("--atol", atol, "integrator absolute tolerance")->check(CLI::PositiveNumber);
    app.add_option("--rtol", rtol, "integrator relative tolerance")->check(CLI::PositiveNumber);

    auto integrator = [&] {
        IntegratorOptions o;
        o.atol = atol;
        o.rtol = rtol;
        return o;
    };
    auto rotation = [&] {
        RotationOptions o;
        o.integrator = integrator();
        return o;
    };

    Torus tr;
    auto* rotnum = app.add_subcommand("rotnum", "rotation number and Lyapunov exponent");
    add_torus_flags(rotnum, tr, true);

    double bmin = 0, bmax = 0, amin = 0, amax = 0;
    int nb = 0, na = 0;
    std::string out_csv, out_pgm, channel = "rho", clip;
    auto* portrait = app.add_subcommand("portrait", "raster of rho and Lyapunov exponent over (B, A)");
    portrait->add_option("--omega", tr.omega)->required();
    portrait->add_option("--delta", tr.delta)->required();
    portrait->add_option("--bigd", tr.bigd);
    portrait->add_option("--bmin", bmin)->required();
    portrait->add_option("--bmax", bmax)->required();
    portrait->add_option("--amin", amin)->required();
    portrait->add_option("--amax", amax)->required();
    portrait->add_option("--nb", nb)->required()->check(CLI::PositiveNumber);
    portrait->add_option("--na", na)->required()->check(CLI::PositiveNumber);
    portrait->add_option("--out", out_csv, "CSV output path")->required();
    portrait->add_option("--pgm", out_pgm, "optional PGM output path");
    portrait->add_option("--channel", channel)->check(CLI::IsMember({"rho", "lyapunov"}));
    portrait->add_option("--clip", clip, "lo,hi");
    portrait->add_option("--workers", workers)->check(CLI::PositiveNumber);

    int nmax = 0;
    auto* growth = app.add_subcommand("growth", "growth points B_n on the A = 0 axis");
    growth->add_option("--omega", tr.omega)->required();
    growth->add_option("--delta", tr.delta)->required();
    growth->add_option("--nmax", nmax)->required();

    auto* closed = app.add_subcommand("closed-form", "closed-form rotation number at A = D = 0");
    closed->add_option("--omega", tr.omega)->required();
    closed->add_option("--delta", tr.delta)->required();
    closed->add_option("--b", tr.b)->required();

    double threshold = 1e-2;
    auto* scan = app.add_subcommand("scan", "scalar distance of the Poincare matrix along a vertical line");
    add_torus_flags(scan, tr, false);
    scan->add_option("--amin", amin)->required();
    scan->add_option("--amax", amax)->required();
    scan->add_option("--na", na)->required();
    scan->add_option("--threshold", threshold)->check(CLI::PositiveNumber);
    scan->add_option("--workers", workers)->check(CLI::PositiveNumber);

    auto* heun = app.add_subcommand("heun", "Heun equations of the linear systems");
    heun->require_subcommand(1);
    double alpha = 2.0, hb = 1.0, hc = 0.0, hg = 0.0, nu_re = 0.0, nu_im = 0.0;
    std::string root = "+", branch = "conj";
    bool verify = false;
    auto* ghe = heun->add_subcommand("ghe", "general Heun equation");
    ghe->add_option("--alpha", alpha)->required();
    ghe->add_option("--b", hb)->required();
    ghe->add_option("--c", hc)->required();
    ghe->add_option("--nu-re", nu_re)->required();
    ghe->add_option("--nu-im", nu_im)->required();
    ghe->add_option("--root", root);
    ghe->add_option("--branch", branch)->check(CLI::IsMember({"conj", "complement"}));
    ghe->add_flag("--verify", verify);
    auto* che = heun->add_subcommand("che", "confluent Heun equation");
    che->add_option("--b", hb)->required();
    che->add_option("--g", hg)->required();
    che->add_option("--nu-re", nu_re)->required();
    che->add_option("--nu-im", nu_im)->required();
    che->add_option("--root", root);
    che->add_flag("--verify", verify);

    auto* mono = app.add_subcommand("monodromy", "Poincare (monodromy) matrix");
    add_torus_flags(mono, tr, true);

    std::string rect = "-4,4,-4,4";
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    auto* audit = app.add_subcommand("audit-quantization", "locked samples must have integer rotation number");
    audit->add_option("--omega", tr.omega)->required();
    audit->add_option("--delta", tr.delta)->required();
    audit->add_option("--bigd", tr.bigd);
    audit->add_option("--rect", rect, "bmin,bmax,amin,amax");
    audit->add_option("--samples", samples);
    audit->add_option("--seed", seed);
    audit->add_option("--workers", workers)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (*rotnum) {
            const TorusParams t = tr.params();
            t.validate();
            const PoincareResult r = rotation_number(lift_field(t), rotation());
            emit(json{{"rho", r.rho},
                      {"lyapunov", r.lyapunov},
                      {"class", class_json(r.cls.kind)},
                      {"winding_periods", r.winding_periods}});
        } else if (*portrait) {
            const TorusParams t = tr.params();
            t.validate();
            const bool lyap = channel == "lyapunov";
            std::optional<std::pair<double, double>> range;
            if (!clip.empty()) {
                const auto v = parse_list(clip, 2, "--clip");
                if (!(v[0] < v[1])) throw domain_error("--clip requires lo < hi");
                range.emplace(v[0], v[1]);
            }
            const PortraitGrid g = sweep(t, bmin, bmax, amin, amax, nb, na, workers, rotation());
            write_csv(g, out_csv);
            if (!out_pgm.empty()) {
                // Without --clip the finite range of the channel is used.
                if (!range) {
                    double lo = INFINITY, hi = -INFINITY;
                    for (double x : lyap ? g.lyapunov : g.rho) {
                        if (std::isfinite(x)) {
                            lo = std::min(lo, x);
                            hi = std::max(hi, x);
                        }
                    }
                    if (!(lo < hi)) {
                        lo = std::isfinite(lo) ? lo : 0.0;
                        hi = lo + 1.0;
                    }
                    range.emplace(lo, hi);
                }
                write_pgm(g, lyap ? Channel::Lyapunov : Channel::Rho, out_pgm, range->first, range->second);
            }
            emit(json{{"nb", g.nB},
                      {"na", g.nA},
                      {"failures", g.failures},
                      {"quantization_violations", g.quantization_violations}});
        } else if (*growth) {
            json list = json::array();
            for (const auto& p : growth_points(tr.omega, tr.delta, nmax)) list.push_back(json{{"n", p.n}, {"B", p.B}});
            emit(list);
        } else if (*closed) {
            emit(json{{"rho", closed_form_rho(tr.omega, tr.delta, tr.b)}});
        } else if (*scan) {
            ScanOptions o;
            o.threshold = threshold;
            o.workers = workers;
            o.integrator = integrator();
            const ScanReport r = scan_scalar_distance(tr.omega, tr.delta, tr.bigd, tr.b, amin, amax, na, o);
            json minima = json::array();
            for (std::size_t k = 0; k < r.minima.size(); ++k) {
                const auto& m = r.minima[k];
                minima.push_back(json{{"A", m.A}, {"d", m.d}, {"candidate", m.d < r.threshold}});
            }
            json samples_json = json::array();
            for (const auto& s : r.samples) samples_json.push_back(json{{"A", s.A}, {"d", s.d}});
            emit(json{{"threshold", r.threshold},
                      {"min_sampled", r.min_sampled},
                      {"candidates", r.candidates.size()},
                      {"minima", minima},
                      {"samples", samples_json}});
        } else if (*ghe) {
            GheSystemParams p;
            p.alpha = alpha;
            p.b = hb;
            p.c = hc;
            p.nu = cplx(nu_re, nu_im);
            p.validate();
            p = ghe_solve_diagonal(p, parse_root(root), branch == "conj" ? PsiBranch::Conjugate : PsiBranch::Complement);
            const HeunGeneralCoeffs h = ghe_coefficients(p);
            json j{{"phi", complex_json(p.phi)}, {"psi", complex_json(p.psi)}, {"alpha", h.alpha},
                   {"p", complex_json(h.p)},     {"q", complex_json(h.q)},     {"s", complex_json(h.s)},
                   {"u", complex_json(h.u)},     {"d", complex_json(h.d)}};
            if (verify) j["residual"] = ghe_equivalence_residual(p, h, ghe_samples(p.alpha));
            emit(j);
        } else if (*che) {
            const RootSign rs = parse_root(root);
            const cplx nu(nu_re, nu_im);
            const CheDiagonal diag = che_solve_diagonal(hb, hg, nu, rs);
            if (diag.kind == CheSolveCase::NoSolution) {
                emit(json{{"case", "no-solution"}});
            } else if (diag.kind == CheSolveCase::OneParameterFamily) {
                emit(json{{"case", "one-parameter-family"}});
            } else {
                CheSystemParams p{hb, hg, nu, diag.a1, diag.a2};
                const HeunConfluentCoeffs h = che_coefficients(p);
                json j{{"case", "solved"},         {"a1", complex_json(p.a1)}, {"a2", complex_json(p.a2)},
                       {"p", complex_json(h.p)},   {"q", complex_json(h.q)},   {"s", complex_json(h.s)},
                       {"u", complex_json(h.u)},   {"d", complex_json(h.d)}};
                if (verify) j["residual"] = che_equivalence_residual(p, h, che_samples());
                emit(j);
            }
        } else if (*mono) {
            const TorusParams t = tr.params();
            t.validate();
            const Su11Matrix m = poincare_matrix(lift_field(t), integrator());
            const Mat2 x = m.matrix();
            json rows = json::array();
            for (int i = 0; i < 2; ++i) rows.push_back(json::array({complex_json(x(i, 0)), complex_json(x(i, 1))}));
            emit(json{{"matrix", rows}, {"scalar_distance", scalar_distance(m)}, {"class", class_json(classify(m).kind)}});
        } else if (*audit) {
            const auto v = parse_list(rect, 4, "--rect");
            detail::require(v[0] <= v[1] && v[2] <= v[3], "--rect requires bmin <= bmax and amin <= amax");
            TorusParams{tr.omega, tr.delta, tr.bigd, 0.0, 0.0}.validate();
            const auto pts = seeded_samples(tr.omega, tr.delta, tr.bigd, {v[0], v[1], v[2], v[3]}, samples, seed);
            AuditOptions o;
            o.workers = workers;
            o.rotation = rotation();
            const QuantizationReport r = quantization_audit(pts, o);
            json viol = json::array();
            for (const auto& x : r.violations) {
                viol.push_back(json{{"index", x.index},
                                    {"B", x.params.B},
                                    {"A", x.params.A},
                                    {"rho", x.rho},
                                    {"lyapunov", x.lyapunov}});
            }
            emit(json{{"samples", r.samples},
                      {"seed", seed},
                      {"locked", r.locked},
                      {"violations", viol},
                      {"max_det_defect", r.max_det_defect}});
        }
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
