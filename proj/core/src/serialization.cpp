#include "dgrecon/serialization.hpp"

#include <stdexcept>

#include "json.hpp"

namespace dgrecon {

namespace {

using json = nlohmann::ordered_json;

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
}

std::vector<double> nodes_of(const json& j)
{
    if (!j.contains("nodes") || !j["nodes"].is_array())
        throw std::invalid_argument("JSON object lacks a \"nodes\" array");
    return j["nodes"].get<std::vector<double>>();
}

} // namespace

std::string to_json(const TimePartition& partition)
{
    json j;
    j["nodes"] = std::vector<double>(partition.nodes().begin(), partition.nodes().end());
    return j.dump();
}

TimePartition partition_from_json(const std::string& text)
{
    return TimePartition(nodes_of(parse(text)));
}

std::string to_json(const PiecewisePoly& u)
{
    json j;
    j["nodes"] = std::vector<double>(u.partition().nodes().begin(), u.partition().nodes().end());
    j["degree"] = u.degree();
    j["space_dim"] = u.space_dim();
    auto rows = json::array();
    for (Eigen::Index c = 0; c < u.coefficients().cols(); ++c) {
        const Vector col = u.coefficients().col(c);
        rows.push_back(std::vector<double>(col.data(), col.data() + col.size()));
    }
    j["coefficients"] = std::move(rows);
    return j.dump();
}

PiecewisePoly piecewise_poly_from_json(const std::string& text)
{
    const json j = parse(text);
    TimePartition partition(nodes_of(j));
    const int degree = j.at("degree").get<int>();
    const int dim = j.at("space_dim").get<int>();
    const auto& rows = j.at("coefficients");
    if (!rows.is_array() || static_cast<int>(rows.size()) != partition.size() * (degree + 1))
        throw std::invalid_argument("coefficient table has the wrong number of rows");
    Matrix coeffs(dim, partition.size() * (degree + 1));
    for (std::size_t c = 0; c < rows.size(); ++c) {
        const auto row = rows[c].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != dim)
            throw std::invalid_argument("coefficient row has the wrong length");
        for (int k = 0; k < dim; ++k)
            coeffs(k, static_cast<Eigen::Index>(c)) = row[static_cast<std::size_t>(k)];
    }
    return PiecewisePoly(std::move(partition), degree, std::move(coeffs));
}

} // namespace dgrecon
