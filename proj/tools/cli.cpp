#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "robinlab/io.hpp"
#include "robinlab/kernels.hpp"
#include "robinlab/oracle/fem.hpp"
#include "robinlab/planar_optimality.hpp"
#include "robinlab/robin_energy.hpp"
#include "robinlab/shape_calculus.hpp"
#include "robinlab/steklov.hpp"
#include "robinlab/torsion.hpp"

namespace robinlab::cli {

namespace {

using io::json;
using io::Table;

const std::vector<std::string> kCommands = {"spectrum",         "energy",          "split",        "alpha0",
                                            "first-variation",  "second-variation", "j-variations", "pw-check",
                                            "corollary-check",  "oracle-verify",   "corpus"};

struct Common {
    bool json = false;
    std::string output;
    std::string config;
};

struct DomainOpts {
    std::string kind = "ball";
    int dim = 2;
    double radius = 1.0;
    double kappa = 0.5;
    double t = 0.1;
    double side = std::sqrt(kPi);
    std::vector<double> rho_cos, rho_sin;
    int nodes = 256;
};

struct PerturbOpts {
    std::vector<double> b;
    std::string modes;
    std::string w_mode = "compensating";
    std::vector<double> w;
    double t_max = 0.05;
};

struct FdOpts {
    bool enabled = false;
    std::vector<double> t_grid = {-0.03, -0.02, -0.01, 0.01, 0.02, 0.03};
    int fit_degree = 2;
    std::string method = "series";
};

struct FemOpts {
    int rings = 16, angles = 64, levels = 3;

    [[nodiscard]] fem::FemOptions options() const
    {
        fem::FemOptions o;
        o.base_rings = rings;
        o.base_angles = angles;
        o.levels = levels;
        return o;
    }
};

struct Options {
    Common common;
    DomainOpts domain;
    PerturbOpts perturb;
    FdOpts fd, fd_first;
    FemOpts fem;
    std::optional<double> alpha;
    std::string alpha_grid;
    int kmax = 5;
    int modes = kDefaultEnergyModes;
    bool direct = false;
    bool use_fem = false;
    bool sign_table = false;
    std::optional<double> area, perimeter;
    int steklov_modes = 0;
    std::string dump_mesh;
    StarCorpusOptions corpus;
};

// ---------------------------------------------------------------------------
// JSON config: keys are long option names; values given on the command line win.

std::string config_value(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return io::format_double(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_value(v[i]);
        return s;
    }
    throw ValidationError("config: unsupported value " + v.dump());
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag)
{
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (!cfg.is_object()) throw ValidationError("config: expected a JSON object");

    const bool has_command = std::any_of(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
    });
    if (!has_command && cfg.contains("command")) args.insert(args.begin(), cfg["command"].get<std::string>());

    std::vector<std::string> extra;
    auto add = [&](std::string key, const json& v) {
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (has_flag(args, flag)) return;
        if (v.is_boolean()) {
            if (v.get<bool>()) extra.push_back(flag);
            return;
        }
        extra.push_back(flag + "=" + config_value(v));
    };
    for (const auto& [key, v] : cfg.items()) {
        if (key == "command") continue;
        if (key == "domain" && v.is_object()) {
            for (const auto& [dk, dv] : v.items()) {
                if (dk == "kind") add("domain", dv);
                else if (dk == "R") add("radius", dv);
                else if (dk == "rho_coeffs") {
                    if (dv.contains("cos")) add("rho-cos", dv["cos"]);
                    if (dv.contains("sin")) add("rho-sin", dv["sin"]);
                } else add(dk, dv);
            }
            continue;
        }
        add(key, v);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

// ---------------------------------------------------------------------------
// Option groups

void add_common(CLI::App* sub, Common& c)
{
    sub->add_flag("--json", c.json, "Emit JSON instead of CSV");
    sub->add_option("-o,--output", c.output, "Write to this file instead of stdout");
    sub->add_option("--config", c.config, "JSON file of option values");
}

void add_domain(CLI::App* sub, DomainOpts& d, bool allow_square = false)
{
    std::vector<std::string> kinds = {"ball", "annulus", "star2d", "ellipse"};
    if (allow_square) kinds.push_back("square");
    sub->add_option("--domain", d.kind, "Domain kind")->check(CLI::IsMember(kinds));
    sub->add_option("--dim", d.dim, "Dimension n (ball, annulus)")->check(CLI::Range(2, 64));
    sub->add_option("--radius", d.radius, "Outer radius, or the scale of rho");
    sub->add_option("--kappa", d.kappa, "Annulus inner-to-outer radius ratio");
    sub->add_option("--t", d.t, "Ellipse parameter");
    sub->add_option("--side", d.side, "Square side (oracle-verify only)");
    sub->add_option("--rho-cos", d.rho_cos, "Cosine coefficients of rho, comma separated")->delimiter(',');
    sub->add_option("--rho-sin", d.rho_sin, "Sine coefficients of rho, comma separated")->delimiter(',');
    sub->add_option("--nodes", d.nodes, "Boundary quadrature nodes (star domains)")->check(CLI::Range(16, 1 << 14));
}

void add_perturbation(CLI::App* sub, PerturbOpts& p)
{
    sub->add_option("--b", p.b, "Coefficients of v.nu in the ordered ball basis")->delimiter(',');
    sub->add_option("--modes", p.modes, "Sparse coefficients, e.g. k2=1,k3.1=0.5 (degree.slot=value)");
    sub->add_option("--w-mode", p.w_mode, "Second-order field")
        ->check(CLI::IsMember({"compensating", "none", "explicit"}));
    sub->add_option("--w", p.w, "Coefficients of w.nu (w-mode explicit)")->delimiter(',');
    sub->add_option("--t-max", p.t_max, "Admissible |t|");
}

void add_fd(CLI::App* sub, FdOpts& f, int default_degree)
{
    f.fit_degree = default_degree;
    sub->add_flag("--fd-check", f.enabled, "Fit finite differences of star-domain energies (n = 2)");
    sub->add_option("--t-grid", f.t_grid, "Perturbation parameters for the fit")->delimiter(',');
    sub->add_option("--fit-degree", f.fit_degree, "Polynomial degree of the fit")->check(CLI::Range(2, 8));
    sub->add_option("--fd-method", f.method, "Energy solver for the fit")->check(CLI::IsMember({"series", "layer"}));
}

void add_fem(CLI::App* sub, FemOpts& f)
{
    sub->add_option("--rings", f.rings, "FEM base rings")->check(CLI::Range(2, 4096));
    sub->add_option("--angles", f.angles, "FEM base angular nodes")->check(CLI::Range(8, 1 << 16));
    sub->add_option("--levels", f.levels, "FEM refinement levels")->check(CLI::Range(1, 6));
}

// ---------------------------------------------------------------------------
// Builders

Domain make_domain(const DomainOpts& o)
{
    if (o.kind == "ball") return Domain::ball(o.dim, o.radius);
    if (o.kind == "annulus") return Domain::annulus(o.dim, o.radius, o.kappa);
    if (o.kind == "ellipse") return make_ellipse(o.radius, o.t, o.nodes);
    if (o.kind == "star2d") {
        TrigPolynomial p;
        p.cos_coeffs = o.rho_cos.empty() ? std::vector<double>{1.0} : o.rho_cos;
        p.sin_coeffs = o.rho_sin;
        return Domain::star2d(std::move(p), o.radius, o.nodes);
    }
    throw ValidationError("domain kind '" + o.kind + "' is not valid here");
}

Domain make_planar(const DomainOpts& o)
{
    Domain d = make_domain(o);
    if (d.dim() != 2) throw ValidationError("this command needs a planar domain");
    return d;
}

// FEM works on star domains; a disc becomes ρ ≡ R.
Domain as_star(const Domain& d, int nodes)
{
    if (d.kind() == DomainKind::Star2D) return d;
    if (d.kind() == DomainKind::Ball && d.dim() == 2) return Domain::star2d(TrigPolynomial::constant(1.0), d.radius(), nodes);
    throw ValidationError("the FEM oracle needs a planar star domain");
}

// Index of the slot-th harmonic of degree k in the ordered ball basis.
int ball_index(int dim, int k, int slot)
{
    if (k < 0 || slot < 0 || slot >= harmonic_dimension(dim, k))
        throw ValidationError("mode k" + std::to_string(k) + "." + std::to_string(slot) + " does not exist");
    return (k == 0 ? 0 : ball_mode_count(dim, k - 1)) + slot;
}

PerturbationField make_perturbation(int dim, const PerturbOpts& o)
{
    PerturbationField p;
    if (!o.modes.empty() && !o.b.empty()) throw ValidationError("give either --b or --modes, not both");
    p.b = o.b;
    if (!o.modes.empty()) {
        std::stringstream ss(o.modes);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto eq = tok.find('=');
            if (tok.size() < 4 || tok[0] != 'k' || eq == std::string::npos)
                throw ValidationError("--modes: bad token '" + tok + "'");
            const std::string key = tok.substr(1, eq - 1);
            int k = 0, slot = 0;
            double value = 0.0;
            try {
                const auto dot = key.find('.');
                k = std::stoi(key.substr(0, dot));
                if (dot != std::string::npos) slot = std::stoi(key.substr(dot + 1));
                value = std::stod(tok.substr(eq + 1));
            } catch (const std::exception&) {
                throw ValidationError("--modes: bad token '" + tok + "'");
            }
            const int i = ball_index(dim, k, slot);
            if (static_cast<int>(p.b.size()) <= i) p.b.resize(i + 1, 0.0);
            p.b[i] = value;
        }
    }
    if (p.b.empty()) throw ValidationError("no perturbation given (use --b or --modes)");
    p.w_mode = second_order_mode_from_string(o.w_mode);
    p.w_coeffs = o.w;
    p.t_max = o.t_max;
    return p;
}

// ρ_t = Rλ(t)(1 + tη) with Rη = v·ν; φ = cos kθ/√(πR) on ∂B_R. Degrees 0 and 1
// are dropped to match the barycentre normalisation.
TrigPolynomial eta_from_b(const PerturbationField& p, double R)
{
    TrigPolynomial eta;
    eta.cos_coeffs = {0.0};
    eta.sin_coeffs = {0.0};
    const double scale = 1.0 / (R * std::sqrt(kPi * R));
    for (int i = 0; i < static_cast<int>(p.b.size()); ++i) {
        const int k = ball_mode_degree(2, i);
        if (k < 2 || p.b[i] == 0.0) continue;
        auto& c = (i % 2 == 1) ? eta.cos_coeffs : eta.sin_coeffs;
        if (static_cast<int>(c.size()) <= k) c.resize(k + 1, 0.0);
        c[k] += p.b[i] * scale;
    }
    return eta;
}

FiniteDifferenceFit fd_fit(const Options& o, const FdOpts& fd, const PerturbationField& p, double alpha)
{
    if (o.domain.dim != 2) throw ValidationError("--fd-check is available for n = 2 only");
    const TrigPolynomial eta = eta_from_b(p, o.domain.radius);
    const double R = o.domain.radius;
    const int nodes = o.domain.nodes;
    const EnergyMethod m = fd.method == "layer" ? EnergyMethod::Layer : EnergyMethod::Series;
    return finite_difference_check([&](double t) { return volume_corrected_star(eta, R, t, nodes); }, alpha,
                                   fd.t_grid, m, fd.fit_degree);
}

struct Solved {
    SteklovBasis basis;
    TorsionSolution ts;
};

Solved solve_basis(const Domain& d, int modes)
{
    Solved s{steklov_basis(d, modes), {}};
    s.ts = s.basis.has_layer() ? solve_torsion(d, s.basis.layer_ptr()) : solve_torsion(d);
    return s;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Output

void emit(const Options& o, const std::string& command, const Table& t, std::ostream& out, json extra = json::object())
{
    std::ofstream file;
    std::ostream* os = &out;
    if (!o.common.output.empty()) {
        file.open(o.common.output);
        if (!file) throw ValidationError("cannot write '" + o.common.output + "'");
        os = &file;
    }
    if (o.common.json) {
        json j = std::move(extra);
        j["command"] = command;
        j["rows"] = t.to_json();
        *os << j.dump(2) << '\n';
    } else {
        t.write_csv(*os);
    }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_spectrum(const Options& o, std::ostream& out)
{
    const Domain d = make_domain(o.domain);
    SteklovBasis b;
    switch (d.kind()) {
    case DomainKind::Ball: b = spectrum_ball(d.dim(), d.radius(), o.kmax, o.domain.nodes); break;
    case DomainKind::Annulus: b = spectrum_annulus(d.dim(), d.radius(), d.kappa(), o.kmax); break;
    case DomainKind::Star2D: b = spectrum_star2d(d, o.modes == kDefaultEnergyModes ? 16 : o.modes, o.domain.nodes); break;
    }
    Table t({"index", "degree", "mu", "residual"});
    for (const SpectrumRow& r : spectrum_table(b)) t.add_row({r.index, r.degree, r.mu, r.residual});
    emit(o, "spectrum", t, out,
         {{"domain", io::domain_to_json(d)}, {"orthonormality_residual", b.orthonormality_residual()}});
}

void cmd_energy(const Options& o, std::ostream& out, std::ostream& err)
{
    const Domain d = make_domain(o.domain);
    std::vector<double> grid;
    if (!o.alpha_grid.empty()) grid = io::parse_grid(o.alpha_grid);
    else if (o.alpha) grid = {*o.alpha};
    else throw ValidationError("energy: give --alpha or --alpha-grid");
    const Solved s = solve_basis(d, o.modes);
    const PoleScan scan = pole_scan(d, grid, s.basis, s.ts, o.modes);
    for (double a : scan.excluded) err << "robinlab: excluded alpha=" << io::format_double(a) << " (pole)\n";
    std::ostringstream poles;
    for (std::size_t i = 0; i < scan.poles.size(); ++i) poles << (i ? ", " : "") << io::format_double(scan.poles[i]);
    err << "robinlab: poles {" << poles.str() << "}\n";

    std::vector<std::string> cols = {"alpha", "T",     "E_plus",    "E_minus",       "E_total",      "status",
                                     "p",     "N_modes", "tail_bound", "eigen_distance", "nearest_pole",
                                     "pole_distance", "bounds_hold"};
    if (o.direct) cols.push_back("E_direct");
    Table t(cols);
    for (const EnergyReport& r : scan.rows) {
        double nearest = std::numeric_limits<double>::quiet_NaN();
        for (double mu : scan.poles)
            if (std::isnan(nearest) || std::abs(r.alpha - mu) < std::abs(r.alpha - nearest)) nearest = mu;
        std::vector<json> row = {r.alpha,  r.T,      opt(r.E_plus),    opt(r.E_minus),  opt(r.E_total),
                                 to_string(r.status), r.p, r.N_modes, r.tail_bound, r.pole_distance,
                                 std::isnan(nearest) ? json(nullptr) : json(nearest),
                                 std::isnan(nearest) ? json(nullptr) : json(std::abs(r.alpha - nearest)), r.bounds_hold()};
        if (o.direct) row.push_back(energy_direct(solve_robin_direct(d, r.alpha)));
        t.add_row(std::move(row));
    }
    emit(o, "energy", t, out, {{"domain", io::domain_to_json(d)}, {"poles", scan.poles}, {"excluded", scan.excluded}});
}

void cmd_split(const Options& o, std::ostream& out)
{
    const Domain d = make_domain(o.domain);
    if (!o.alpha) throw ValidationError("split: --alpha is required");
    const Solved s = solve_basis(d, o.modes);
    const EnergyReport r = energy_series(d, *o.alpha, s.basis, s.ts, o.modes);
    const VariationalSplit v = energy_split_variational(d, *o.alpha, s.basis, s.ts, r.p);
    Table t({"alpha", "p", "T", "E_plus", "E_minus", "E_total", "E_plus_max", "E_minus_restricted",
             "E_minus_constrained", "E_minus_trial_bound", "E_plus_lower", "E_plus_upper", "E_minus_lower",
             "bounds_hold"});
    t.add_row({r.alpha, r.p, r.T, opt(r.E_plus), opt(r.E_minus), opt(r.E_total), v.E_plus_max, v.E_minus_restricted,
               opt(v.E_minus_constrained), v.E_minus_trial_bound, r.E_plus_lower, r.E_plus_upper, r.E_minus_lower,
               r.bounds_hold()});
    emit(o, "split", t, out, {{"domain", io::domain_to_json(d)}});
}

double planar_T(const Options& o, const Domain& d)
{
    return o.use_fem ? fem::fem_dirichlet_T(as_star(d, o.domain.nodes), o.fem.options()).energy : rigidity(d).value;
}

void cmd_alpha0(const Options& o, std::ostream& out)
{
    const Domain d = make_planar(o.domain);
    const double T = planar_T(o, d);
    const double A = volume(d), L = surface_area(d);
    const PWBound pw = pw_upper_bound(A, L);
    const double T_ball = ball_rigidity(2, pw.R);
    const double a0 = alpha0(d, T);
    const bool below = j_functional(d, 0.5 * a0, T) < j_functional_equal_ball(d, 0.5 * a0);
    const bool above = j_functional(d, 2.0 * a0, T) > j_functional_equal_ball(d, 2.0 * a0);
    Table t({"A", "L", "R", "y2", "T", "T_ball", "eps0", "eps0_upper", "alpha0", "alpha_threshold",
             "alpha0_ge_threshold", "J_below_ball_at_half", "J_above_ball_at_double"});
    t.add_row({A, L, pw.R, pw.y2, T, T_ball, T - T_ball, epsilon0_upper(A, L), a0, pw.alpha_threshold,
               a0 >= pw.alpha_threshold, below, above});
    emit(o, "alpha0", t, out, {{"domain", io::domain_to_json(d)}, {"T_source", o.use_fem ? "fem" : "layer"}});
}

void cmd_first_variation(const Options& o, std::ostream& out)
{
    if (!o.alpha) throw ValidationError("first-variation: --alpha is required");
    const Domain ball = Domain::ball(o.domain.dim, o.domain.radius);
    const PerturbationField p = make_perturbation(o.domain.dim, o.perturb);
    const double e_dot = first_variation_ball(o.domain.dim, o.domain.radius, *o.alpha, p);
    const VolumeCheck v1 = check_volume_preserving(p, ball, 1);
    std::vector<std::string> cols = {"dim", "R", "alpha", "E_dot", "volume1", "volume1_residual"};
    std::vector<json> row = {o.domain.dim, o.domain.radius, *o.alpha, e_dot, v1.passed, v1.residual};
    if (o.fd_first.enabled) {
        const FiniteDifferenceFit f = fd_fit(o, o.fd_first, p, *o.alpha);
        cols.insert(cols.end(), {"E_dot_fit", "E_ddot_fit", "fit_residual", "energy_scale"});
        row.insert(row.end(), {f.E_dot, f.E_ddot, f.residual, std::abs(ball_energy(2, o.domain.radius, *o.alpha))});
    }
    Table t(cols);
    t.add_row(std::move(row));
    emit(o, "first-variation", t, out, {{"perturbation", io::perturbation_to_json(p)}});
}

void cmd_sign_table(const Options& o, std::ostream& out)
{
    if (!o.alpha) throw ValidationError("second-variation: --alpha is required");
    const double xi = *o.alpha * o.domain.radius;
    const int kp = static_cast<int>(std::floor(xi));
    Table t({"dim", "xi", "k", "d", "sign", "k_le_kp"});
    for (int k = 2; k <= o.kmax; ++k) {
        const double dk = d_coefficient(o.domain.dim, k, xi);
        t.add_row({o.domain.dim, xi, k, dk, dk > 0 ? "positive" : dk < 0 ? "negative" : "zero", k <= kp});
    }
    emit(o, "second-variation", t, out);
}

void cmd_second_variation(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.sign_table) return cmd_sign_table(o, out);
    if (!o.alpha) throw ValidationError("second-variation: --alpha is required");
    const PerturbationField p = make_perturbation(o.domain.dim, o.perturb);
    const VariationReport r = second_variation_ball(o.domain.dim, o.domain.radius, *o.alpha, p);
    for (const std::string& w : r.warnings) err << "robinlab: " << w << '\n';
    std::vector<std::string> cols = {"dim",     "R",       "alpha",          "xi",           "E_dot",
                                     "E_ddot",  "E_ddot_radial", "S_ddot",   "J_dot",        "J_ddot",
                                     "Q",       "vnu_norm2",     "classification", "small_xi_bound", "small_xi_holds",
                                     "mid_xi_bound", "mid_xi_holds"};
    auto bound = [](const TheoremBound& b) { return b.applies ? json(b.value) : json(nullptr); };
    auto holds = [](const TheoremBound& b) { return b.applies ? json(b.holds) : json(nullptr); };
    std::vector<json> row = {r.dim,    r.R,     r.alpha, r.xi,  r.E_dot, r.E_ddot, r.E_ddot_radial,
                             r.S_ddot, r.J_dot, r.J_ddot, r.Q, r.vnu_norm2, to_string(r.sign.classification),
                             bound(r.small_xi), holds(r.small_xi), bound(r.mid_xi), holds(r.mid_xi)};
    if (o.fd.enabled) {
        const FiniteDifferenceFit f = fd_fit(o, o.fd, p, *o.alpha);
        cols.insert(cols.end(), {"E_dot_fit", "E_ddot_fit", "fit_residual", "relative_difference"});
        row.insert(row.end(), {f.E_dot, f.E_ddot, f.residual, std::abs(f.E_ddot - r.E_ddot) / std::abs(r.E_ddot)});
    }
    Table t(cols);
    t.add_row(std::move(row));
    emit(o, "second-variation", t, out, {{"report", io::to_json(r)}, {"perturbation", io::perturbation_to_json(p)}});
}

void cmd_j_variations(const Options& o, std::ostream& out)
{
    if (!o.alpha) throw ValidationError("j-variations: --alpha is required");
    const PerturbationField p = make_perturbation(o.domain.dim, o.perturb);
    const JVariations j = j_variations(o.domain.dim, o.domain.radius, *o.alpha, p);
    Table t({"dim", "R", "alpha", "J_dot", "J_ddot", "I", "S_ddot_sprime", "lower", "upper", "bounds_hold",
             "maximizer_criterion"});
    t.add_row({o.domain.dim, o.domain.radius, *o.alpha, j.J_dot, j.J_ddot, j.I, j.S_ddot_sprime, j.lower, j.upper,
               j.bounds_hold, j.maximizer_criterion});
    emit(o, "j-variations", t, out);
}

void cmd_pw_check(const Options& o, std::ostream& out)
{
    std::vector<std::string> cols = {"A", "L", "y2", "Rtilde", "rtilde", "R", "T_star", "g", "alpha_threshold"};
    std::vector<json> row;
    auto pw_row = [&](const PWBound& b) {
        row = {b.A, b.L, b.y2, b.Rtilde, b.rtilde, b.R, b.T_star, b.g_val, b.alpha_threshold};
    };
    if (o.area || o.perimeter) {
        if (!o.area || !o.perimeter) throw ValidationError("pw-check: give both --area and --perimeter");
        pw_row(pw_upper_bound(*o.area, *o.perimeter));
    } else {
        const Domain d = make_planar(o.domain);
        const PWBound b = pw_upper_bound(volume(d), surface_area(d));
        pw_row(b);
        const double T = planar_T(o, d);
        cols.insert(cols.end(), {"T", "pw_holds"});
        row.insert(row.end(), {T, T <= b.T_star + 1e-12 * std::abs(b.T_star)});
        if (o.alpha) {
            const JCheck c = theorem_J_check(d, *o.alpha, T);
            cols.insert(cols.end(), {"alpha", "verdict", "J_domain", "J_ball", "J_holds"});
            row.insert(row.end(), {c.alpha, to_string(c.verdict), c.J_domain, c.J_ball, c.numeric_holds});
        }
    }
    Table t(cols);
    t.add_row(std::move(row));
    emit(o, "pw-check", t, out);
}

std::vector<std::string> corollary_columns()
{
    return {"alpha",  "mu2",      "two_pi_over_L", "inv_R",  "chain_holds", "E_domain", "E_ball",
            "E_holds", "J_domain", "J_ball",        "J_holds", "verdict"};
}

std::vector<json> corollary_row(const Domain& d, std::optional<double> alpha, int modes)
{
    const Solved s = solve_basis(d, modes);
    if (s.basis.count() < 2) throw SolverError("corollary-check: basis has fewer than two modes");
    const double R = equal_volume_radius(d);
    const double a = alpha ? *alpha : std::min(1.0 / R, 0.9 * s.basis.mu(1));
    const CorollaryCheck c = corollary_disc_max(d, a, s.basis, s.ts);
    const JCheck j = theorem_J_check(d, a, s.ts.T);
    return {c.alpha,  c.mu2,     c.weinstock, c.inv_R,  c.chain_holds, c.E_domain,
            c.E_ball, c.numeric_holds, j.J_domain, j.J_ball, j.numeric_holds, to_string(j.verdict)};
}

void cmd_corollary_check(const Options& o, std::ostream& out)
{
    const Domain d = make_planar(o.domain);
    Table t(corollary_columns());
    t.add_row(corollary_row(d, o.alpha, o.modes));
    emit(o, "corollary-check", t, out, {{"domain", io::domain_to_json(d)}});
}

void cmd_oracle_verify(const Options& o, std::ostream& out)
{
    const fem::FemOptions fo = o.fem.options();
    Table t({"quantity", "reference", "fem", "fem_error", "difference"});
    json extra = json::object();
    if (o.domain.kind == "square") {
        const fem::FemSolution s = fem::fem_dirichlet_T_square(o.domain.side, 2 * o.fem.rings, o.fem.levels);
        const double ref = fem::square_torsion_series(o.domain.side);
        t.add_row({"T", ref, s.energy, s.error, s.energy - ref});
        if (!o.dump_mesh.empty()) std::ofstream(o.dump_mesh) << io::to_json(s).dump() << '\n';
        return emit(o, "oracle-verify", t, out);
    }
    const Domain d = as_star(make_planar(o.domain), o.domain.nodes);
    const fem::FemSolution ts = fem::fem_dirichlet_T(d, fo);
    const double T = rigidity(d).value;
    t.add_row({"T", T, ts.energy, ts.error, ts.energy - T});
    const fem::FemSolution* dump = &ts;
    fem::FemSolution es;
    if (o.alpha) {
        es = fem::fem_robin_energy(d, *o.alpha, fo);
        const double E = energy_direct(solve_robin_direct(d, *o.alpha));
        t.add_row({"E", E, es.energy, es.error, es.energy - E});
        dump = &es;
    }
    if (o.steklov_modes > 0) {
        const SteklovBasis b = spectrum_star2d(d, o.steklov_modes, d.quadrature_nodes());
        const fem::SteklovResidual r = fem::steklov_residual(b, o.steklov_modes, fo);
        t.add_row({"steklov_residual", 0.0, r.max_residual, nullptr, r.max_residual});
    }
    if (!o.dump_mesh.empty()) {
        std::ofstream f(o.dump_mesh);
        if (!f) throw ValidationError("cannot write '" + o.dump_mesh + "'");
        f << io::to_json(*dump).dump() << '\n';
    }
    emit(o, "oracle-verify", t, out, {{"domain", io::domain_to_json(d)}});
}

void cmd_corpus(const Options& o, std::ostream& out)
{
    StarCorpusOptions co = o.corpus;
    co.radius = o.domain.radius;
    co.quadrature_nodes = o.domain.nodes;
    const std::vector<Domain> domains = random_star_corpus(co);

    std::vector<std::string> cols = {"id"};
    for (int k = co.k_min; k <= co.k_max; ++k) {
        cols.push_back("c" + std::to_string(k));
        cols.push_back("s" + std::to_string(k));
    }
    cols.insert(cols.end(), {"A", "L", "y2", "T", "T_star", "pw_holds"});
    const std::vector<std::string> cc = corollary_columns();
    cols.insert(cols.end(), cc.begin(), cc.end());
    if (o.use_fem) cols.insert(cols.end(), {"T_fem", "pw_holds_fem"});

    std::vector<std::vector<json>> rows(domains.size());
    std::vector<std::exception_ptr> errors(domains.size());
    kernels::for_each_index(static_cast<int>(domains.size()), kernels::Exec::Parallel, [&](int n) {
        try {
            const Domain& d = domains[n];
            std::vector<json> row = {n};
            for (int k = co.k_min; k <= co.k_max; ++k) {
                row.push_back(d.shape().cos_coeffs[k]);
                row.push_back(d.shape().sin_coeffs[k]);
            }
            const double A = volume(d), L = surface_area(d);
            const PWBound b = pw_upper_bound(A, L);
            const double T = rigidity(d).value;
            row.insert(row.end(), {A, L, b.y2, T, b.T_star, T <= b.T_star});
            const std::vector<json> c = corollary_row(d, o.alpha, o.modes);
            row.insert(row.end(), c.begin(), c.end());
            if (o.use_fem) {
                const double Tf = fem::fem_dirichlet_T(d, o.fem.options()).energy;
                row.insert(row.end(), {Tf, Tf <= b.T_star});
            }
            rows[n] = std::move(row);
        } catch (...) {
            errors[n] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    Table t(cols);
    for (auto& r : rows) t.add_row(std::move(r));
    emit(o, "corpus", t, out, {{"seed", co.seed}, {"amplitude", co.amplitude}});
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    kernels::apply_thread_cap_from_env();
    Options o;
    CLI::App app{"Robin torsion energy laboratory", "robinlab"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::map<std::string, CLI::App*> subs;
    auto sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        add_common(s, o.common);
        subs[name] = s;
        return s;
    };

    CLI::App* s = sub("spectrum", "Steklov eigenvalues of a domain");
    add_domain(s, o.domain);
    s->add_option("--kmax", o.kmax, "Highest degree (ball, annulus)")->check(CLI::Range(0, 500));
    s->add_option("--modes", o.modes, "Number of eigenpairs (star domains)")->check(CLI::Range(1, 4096));

    s = sub("energy", "Series energy over an alpha grid, with poles");
    add_domain(s, o.domain);
    s->add_option("--alpha", o.alpha, "Robin parameter");
    s->add_option("--alpha-grid", o.alpha_grid, "start:stop:count");
    s->add_option("--modes", o.modes, "Series length N")->check(CLI::Range(1, 4096));
    s->add_flag("--direct", o.direct, "Add an energy column from the direct solver");

    s = sub("split", "E+ and E- with their variational characterisations");
    add_domain(s, o.domain);
    s->add_option("--alpha", o.alpha, "Robin parameter");
    s->add_option("--modes", o.modes, "Series length N")->check(CLI::Range(1, 4096));

    s = sub("alpha0", "Crossover parameter of the J functional (planar)");
    add_domain(s, o.domain);
    add_fem(s, o.fem);
    s->add_flag("--fem", o.use_fem, "Compute T with the FEM oracle");

    s = sub("first-variation", "First shape derivative at the ball");
    add_domain(s, o.domain);
    add_perturbation(s, o.perturb);
    add_fd(s, o.fd_first, 4);
    s->add_option("--alpha", o.alpha, "Robin parameter");

    s = sub("second-variation", "Second shape derivative at the ball");
    add_domain(s, o.domain);
    add_perturbation(s, o.perturb);
    add_fd(s, o.fd, 2);
    s->add_option("--alpha", o.alpha, "Robin parameter");
    s->add_flag("--sign-table", o.sign_table, "Print d_k for 2 <= k <= kmax instead");
    s->add_option("--kmax", o.kmax, "Highest degree of the sign table")->check(CLI::Range(2, 100000));

    s = sub("j-variations", "Variations of the J functional at the ball");
    add_domain(s, o.domain);
    add_perturbation(s, o.perturb);
    s->add_option("--alpha", o.alpha, "Robin parameter");

    s = sub("pw-check", "Parallel-lines upper bound for T (planar)");
    add_domain(s, o.domain);
    add_fem(s, o.fem);
    s->add_option("--area", o.area, "Area A (bound only)");
    s->add_option("--perimeter", o.perimeter, "Perimeter L (bound only)");
    s->add_option("--alpha", o.alpha, "Also compare J with the equal-area disc");
    s->add_flag("--fem", o.use_fem, "Compute T with the FEM oracle");

    s = sub("corollary-check", "Disc maximality of the energy for small alpha (planar)");
    add_domain(s, o.domain);
    s->add_option("--alpha", o.alpha, "Robin parameter (default min(1/R, 0.9 mu2))");
    s->add_option("--modes", o.modes, "Series length N")->check(CLI::Range(2, 4096));

    s = sub("oracle-verify", "Compare the FEM oracle with the boundary-integral solvers");
    add_domain(s, o.domain, true);
    add_fem(s, o.fem);
    s->add_option("--alpha", o.alpha, "Also compare the Robin energy");
    s->add_option("--steklov-modes", o.steklov_modes, "Also check this many Steklov pairs")->check(CLI::Range(0, 512));
    s->add_option("--dump-mesh", o.dump_mesh, "Write the finest mesh and solution as JSON");

    s = sub("corpus", "Random star domains: bound and maximality checks");
    add_domain(s, o.domain);
    add_fem(s, o.fem);
    s->add_option("--count", o.corpus.count, "Number of domains")->check(CLI::Range(1, 100000));
    s->add_option("--seed", o.corpus.seed, "RNG seed");
    s->add_option("--amplitude", o.corpus.amplitude, "Coefficient amplitude");
    s->add_option("--kmin", o.corpus.k_min, "Lowest perturbed degree")->check(CLI::Range(1, 1000));
    s->add_option("--kmax", o.corpus.k_max, "Highest perturbed degree")->check(CLI::Range(1, 1000));
    s->add_option("--alpha", o.alpha, "Robin parameter (default per-domain min(1/R, 0.9 mu2))");
    s->add_option("--modes", o.modes, "Series length N")->check(CLI::Range(2, 4096));
    s->add_flag("--fem", o.use_fem, "Add FEM torsion values");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        err << "robinlab: " << e.what() << '\n';
        return 2;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "spectrum") cmd_spectrum(o, out);
        else if (name == "energy") cmd_energy(o, out, err);
        else if (name == "split") cmd_split(o, out);
        else if (name == "alpha0") cmd_alpha0(o, out);
        else if (name == "first-variation") cmd_first_variation(o, out);
        else if (name == "second-variation") cmd_second_variation(o, out, err);
        else if (name == "j-variations") cmd_j_variations(o, out);
        else if (name == "pw-check") cmd_pw_check(o, out);
        else if (name == "corollary-check") cmd_corollary_check(o, out);
        else if (name == "oracle-verify") cmd_oracle_verify(o, out);
        else if (name == "corpus") cmd_corpus(o, out);
    } catch (const ValidationError& e) {
        err << "robinlab: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        err << "robinlab: solver failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "robinlab: solver failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace robinlab::cli
