#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "robinlab/geometry.hpp"
#include "robinlab/oracle/fem.hpp"
#include "robinlab/planar_optimality.hpp"
#include "robinlab/robin_energy.hpp"
#include "robinlab/shape_calculus.hpp"
#include "robinlab/steklov.hpp"

namespace robinlab::io {

using nlohmann::json;

/// 17 significant digits, so values round-trip exactly.
[[nodiscard]] std::string format_double(double v);

/// Rectangular table written as CSV or as a JSON array of objects.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<json> row);
    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] std::size_t rows() const { return rows_.size(); }

    void write_csv(std::ostream& os) const;
    [[nodiscard]] json to_json() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
};

[[nodiscard]] Domain domain_from_json(const json& j);
[[nodiscard]] json domain_to_json(const Domain& d);

[[nodiscard]] PerturbationField perturbation_from_json(const json& j);
[[nodiscard]] json perturbation_to_json(const PerturbationField& p);

[[nodiscard]] json to_json(const EnergyReport& r);
[[nodiscard]] json to_json(const VariationReport& r);
[[nodiscard]] json to_json(const PWBound& b);
[[nodiscard]] json to_json(const JCheck& c);
[[nodiscard]] json to_json(const CorollaryCheck& c);
[[nodiscard]] json to_json(const JVariations& j);
/// Mesh and nodal values for debugging.
[[nodiscard]] json to_json(const fem::FemSolution& s);

/// start:stop:count, inclusive endpoints.
[[nodiscard]] std::vector<double> parse_grid(const std::string& spec);

}  // namespace robinlab::io
