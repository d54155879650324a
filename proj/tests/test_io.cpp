#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "robinlab/io.hpp"

using namespace robinlab;
using io::json;

TEST(Io, FormatDoubleRoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, kPi}) {
        const std::string s = io::format_double(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
    EXPECT_EQ(io::format_double(5.0), "5");
    EXPECT_EQ(io::format_double(-0.0), "0");
    EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Io, TableCsvAndJson)
{
    io::Table t({"alpha", "status", "E"});
    t.add_row({0.5, "unique", 1.25});
    t.add_row({5.0, "no_solution", nullptr});
    std::ostringstream os;
    t.write_csv(os);
    EXPECT_EQ(os.str(), "alpha,status,E\n0.5,unique,1.25\n5,no_solution,\n");
    const json j = t.to_json();
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["status"], "unique");
    EXPECT_TRUE(j[1]["E"].is_null());
    EXPECT_THROW(t.add_row({1.0}), ValidationError);
}

TEST(Io, CsvQuotesSeparators)
{
    io::Table t({"note"});
    t.add_row({"a,b"});
    std::ostringstream os;
    t.write_csv(os);
    EXPECT_EQ(os.str(), "note\n\"a,b\"\n");
}

TEST(Io, ParseGrid)
{
    const auto g = io::parse_grid("0.1:8:200");
    ASSERT_EQ(g.size(), 200u);
    EXPECT_EQ(g.front(), 0.1);
    EXPECT_EQ(g.back(), 8.0);
    EXPECT_EQ(io::parse_grid("2:3:1"), std::vector<double>{2.0});
    EXPECT_THROW((void)io::parse_grid("1:2"), ValidationError);
    EXPECT_THROW((void)io::parse_grid("1:2:x"), ValidationError);
    EXPECT_THROW((void)io::parse_grid("1:2:0"), ValidationError);
}

TEST(Io, DomainJsonRoundTrip)
{
    const json spec = {{"kind", "star2d"}, {"R", 1.5}, {"rho_coeffs", {{"cos", {1.0, 0.0, 0.1}}, {"sin", {0.0, 0.0, 0.05}}}},
                       {"nodes", 128}};
    const Domain d = io::domain_from_json(spec);
    EXPECT_EQ(d.kind(), DomainKind::Star2D);
    EXPECT_EQ(d.quadrature_nodes(), 128);
    const Domain back = io::domain_from_json(io::domain_to_json(d));
    EXPECT_EQ(back.shape().cos_coeffs, d.shape().cos_coeffs);
    EXPECT_EQ(back.shape().sin_coeffs, d.shape().sin_coeffs);
    EXPECT_EQ(back.radius(), 1.5);

    const Domain a = io::domain_from_json({{"kind", "annulus"}, {"dim", 3}, {"R", 1.0}, {"kappa", 0.5}});
    EXPECT_EQ(a.kind(), DomainKind::Annulus);
    EXPECT_EQ(io::domain_to_json(a)["kappa"], 0.5);
    EXPECT_THROW((void)io::domain_from_json({{"kind", "annulus"}}), ValidationError);
    EXPECT_THROW((void)io::domain_from_json({{"kind", "torus"}}), ValidationError);
    EXPECT_THROW((void)io::domain_from_json(json::array()), ValidationError);
}

TEST(Io, PerturbationJson)
{
    const PerturbationField p = io::perturbation_from_json({{"b", {0.0, 0.0, 0.0, 1.0}}, {"w_mode", "none"}});
    EXPECT_EQ(p.w_mode, SecondOrderMode::None);
    const json j = io::perturbation_to_json(p);
    EXPECT_EQ(j["b"].size(), 4u);
    EXPECT_EQ(j["w_mode"], "none");
    EXPECT_THROW((void)io::perturbation_from_json({{"w_mode", "maybe"}}), ValidationError);
}

TEST(Io, ReportJsonUsesNullForMissing)
{
    EnergyReport r;
    r.status = ExpansionStatus::NoSolution;
    r.tail_bound = std::numeric_limits<double>::infinity();
    const json j = io::to_json(r);
    EXPECT_TRUE(j["E_total"].is_null());
    EXPECT_TRUE(j["tail_bound"].is_null());
    EXPECT_EQ(j["status"], "no_solution");
}
