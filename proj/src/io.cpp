#include "robinlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace robinlab::io {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;   // drop the sign of −0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add_row(std::vector<json> row)
{
    if (row.size() != columns_.size()) throw ValidationError("Table::add_row: column count mismatch");
    rows_.push_back(std::move(row));
}

namespace {

std::string cell_text(const json& c)
{
    if (c.is_null()) return "";
    if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
    if (c.is_number_integer()) return std::to_string(c.get<long long>());
    if (c.is_number()) return format_double(c.get<double>());
    if (c.is_string()) {
        const std::string s = c.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return c.dump();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_value(const std::optional<double>& v) { return v ? finite_or_null(*v) : json(nullptr); }

}  // namespace

void Table::write_csv(std::ostream& os) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

json Table::to_json() const
{
    json arr = json::array();
    for (const auto& row : rows_) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const json& c = row[i];
            obj[columns_[i]] = (c.is_number_float() && !std::isfinite(c.get<double>())) ? json(nullptr) : c;
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

// ---------------------------------------------------------------------------

Domain domain_from_json(const json& j)
{
    if (!j.is_object()) throw ValidationError("domain: expected a JSON object");
    const std::string kind = j.value("kind", std::string("ball"));
    const int dim = j.value("dim", 2);
    const double R = j.value("R", 1.0);
    const int nodes = j.value("nodes", 256);
    if (kind == "ball") return Domain::ball(dim, R);
    if (kind == "annulus") {
        if (!j.contains("kappa")) throw ValidationError("domain: annulus needs kappa");
        return Domain::annulus(dim, R, j.at("kappa").get<double>());
    }
    if (kind == "ellipse") return make_ellipse(R, j.value("t", 0.0), nodes);
    if (kind == "star2d" || kind == "Star2D") {
        if (j.contains("dim") && dim != 2) throw ValidationError("domain: star2d is planar (dim must be 2)");
        TrigPolynomial p;
        if (j.contains("rho_coeffs")) {
            const json& rc = j.at("rho_coeffs");
            p.cos_coeffs = rc.value("cos", std::vector<double>{1.0});
            p.sin_coeffs = rc.value("sin", std::vector<double>{});
        } else {
            p.cos_coeffs = {1.0};
        }
        return Domain::star2d(p, R, nodes);
    }
    throw ValidationError("domain: unknown kind '" + kind + "'");
}

json domain_to_json(const Domain& d)
{
    json j;
    j["kind"] = d.kind() == DomainKind::Ball ? "ball" : d.kind() == DomainKind::Annulus ? "annulus" : "star2d";
    j["dim"] = d.dim();
    j["R"] = d.radius();
    if (d.kind() == DomainKind::Annulus) j["kappa"] = d.kappa();
    if (d.kind() == DomainKind::Star2D) {
        j["rho_coeffs"] = {{"cos", d.shape().cos_coeffs}, {"sin", d.shape().sin_coeffs}};
        j["nodes"] = d.quadrature_nodes();
    }
    return j;
}

PerturbationField perturbation_from_json(const json& j)
{
    if (!j.is_object()) throw ValidationError("perturbation: expected a JSON object");
    PerturbationField p;
    p.b = j.value("b", std::vector<double>{});
    p.w_mode = second_order_mode_from_string(j.value("w_mode", std::string("compensating")));
    p.w_coeffs = j.value("w", std::vector<double>{});
    p.t_max = j.value("t_max", 0.05);
    return p;
}

json perturbation_to_json(const PerturbationField& p)
{
    json j = {{"b", p.b}, {"w_mode", to_string(p.w_mode)}, {"t_max", p.t_max}};
    if (p.w_mode == SecondOrderMode::Explicit) j["w"] = p.w_coeffs;
    return j;
}

json to_json(const EnergyReport& r)
{
    return {{"alpha", r.alpha},
            {"T", r.T},
            {"E_plus", optional_value(r.E_plus)},
            {"E_minus", optional_value(r.E_minus)},
            {"E_total", optional_value(r.E_total)},
            {"N_modes", r.N_modes},
            {"p", r.p},
            {"tail_bound", finite_or_null(r.tail_bound)},
            {"status", to_string(r.status)},
            {"pole_distance", finite_or_null(r.pole_distance)},
            {"bounds_hold", r.bounds_hold()}};
}

json to_json(const VariationReport& r)
{
    json modes = json::array();
    for (const ModeRow& m : r.sign.modes)
        modes.push_back({{"i", m.index}, {"k", m.degree}, {"b", m.b}, {"d", m.d}, {"contribution", m.contribution}});
    auto bound = [](const TheoremBound& b) {
        return json{{"applies", b.applies}, {"value", b.value}, {"holds", b.holds}};
    };
    return {{"dim", r.dim},
            {"R", r.R},
            {"alpha", r.alpha},
            {"xi", r.xi},
            {"E_dot", r.E_dot},
            {"E_ddot", r.E_ddot},
            {"E_ddot_radial", r.E_ddot_radial},
            {"S_dot", r.S_dot},
            {"S_ddot", r.S_ddot},
            {"J_dot", r.J_dot},
            {"J_ddot", r.J_ddot},
            {"Q", r.Q},
            {"vnu_norm2", r.vnu_norm2},
            {"classification", to_string(r.sign.classification)},
            {"modes", modes},
            {"bound_small_xi", bound(r.small_xi)},
            {"bound_mid_xi", bound(r.mid_xi)},
            {"volume1", {{"passed", r.volume1.passed}, {"residual", r.volume1.residual}}},
            {"volume2", {{"passed", r.volume2.passed}, {"residual", r.volume2.residual}}},
            {"warnings", r.warnings}};
}

json to_json(const PWBound& b)
{
    return {{"A", b.A},           {"L", b.L},       {"y2", b.y2},       {"Rtilde", b.Rtilde},
            {"rtilde", b.rtilde}, {"R", b.R},       {"T_star", b.T_star}, {"g", b.g_val},
            {"alpha_threshold", b.alpha_threshold}};
}

json to_json(const JCheck& c)
{
    return {{"alpha", c.alpha},         {"y2", c.y2},
            {"g", c.g_val},             {"threshold", c.threshold},
            {"verdict", to_string(c.verdict)},
            {"J_domain", c.J_domain},   {"J_ball", c.J_ball},
            {"numeric_holds", c.numeric_holds}};
}

json to_json(const CorollaryCheck& c)
{
    return {{"alpha", c.alpha},       {"mu2", c.mu2},         {"two_pi_over_L", c.weinstock},
            {"inv_R", c.inv_R},       {"chain_holds", c.chain_holds},
            {"E_domain", c.E_domain}, {"E_ball", c.E_ball},   {"numeric_holds", c.numeric_holds}};
}

json to_json(const JVariations& j)
{
    return {{"J_dot", j.J_dot},   {"J_ddot", j.J_ddot}, {"I", j.I},
            {"S_ddot_sprime", j.S_ddot_sprime},
            {"lower", j.lower},   {"upper", j.upper},   {"bounds_hold", j.bounds_hold},
            {"maximizer_criterion", j.maximizer_criterion}};
}

json to_json(const fem::FemSolution& s)
{
    json tris = json::array();
    for (const auto& t : s.mesh.triangles) tris.push_back({t[0], t[1], t[2]});
    return {{"energy", s.energy},
            {"error", s.error},
            {"levels", s.level_values},
            {"h_max", s.h_max},
            {"boundary_residual", s.boundary_residual},
            {"mesh", {{"rings", s.mesh.rings}, {"angles", s.mesh.angles}, {"x", s.mesh.x}, {"y", s.mesh.y},
                      {"triangles", tris}, {"boundary", s.mesh.boundary}}},
            {"values", s.values}};
}

std::vector<double> parse_grid(const std::string& spec)
{
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? std::string::npos : spec.find(':', a + 1);
    if (b == std::string::npos) throw ValidationError("grid '" + spec + "': expected start:stop:count");
    double start, stop;
    long count;
    try {
        std::size_t pos = 0;
        start = std::stod(spec.substr(0, a), &pos);
        if (pos != a) throw std::invalid_argument("start");
        const std::string s2 = spec.substr(a + 1, b - a - 1);
        stop = std::stod(s2, &pos);
        if (pos != s2.size()) throw std::invalid_argument("stop");
        const std::string s3 = spec.substr(b + 1);
        count = std::stol(s3, &pos);
        if (pos != s3.size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw ValidationError("grid '" + spec + "': expected start:stop:count");
    }
    if (count < 1) throw ValidationError("grid '" + spec + "': count must be positive");
    std::vector<double> g(count);
    for (long i = 0; i < count; ++i) g[i] = count == 1 ? start : start + (stop - start) * i / (count - 1.0);
    return g;
}

}  // namespace robinlab::io
