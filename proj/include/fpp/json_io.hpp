#pragma once

// Serialization helpers: JSON views of the core types (nlohmann::json) and
// CSV assembly. Doubles are printed with std::to_chars shortest round-trip
// so identical runs produce byte-identical files.

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "busemann.hpp"
#include "geodesic.hpp"
#include "lattice.hpp"
#include "order.hpp"
#include "shape.hpp"

namespace fpp {

inline const char* to_string(Restriction r)
{
    return r == Restriction::HalfPlane ? "half-plane" : "full";
}

inline const char* to_string(Side s) { return s == Side::L ? "L" : "R"; }

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline nlohmann::json to_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

inline nlohmann::json path_json(const std::vector<Point>& vertices)
{
    nlohmann::json arr = nlohmann::json::array();
    for (Point v : vertices) arr.push_back(to_json(v));
    return arr;
}

inline nlohmann::json to_json(const Geodesic& g)
{
    return {{"vertices", path_json(g.vertices)},
            {"time", g.time},
            {"restriction", to_string(g.restriction)}};
}

inline nlohmann::json verdict_record(std::uint64_t seed, int n_target, const OrderVerdict& v)
{
    return {{"seed", seed},
            {"n_target", n_target},
            {"relation", to_string(v.relation)},
            {"first_stable_line", v.first_stable_line}};
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size())
    {
        append_row(header);
    }

    void row(const std::vector<std::string>& cells) { append_row(cells); }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }

    const std::string& str() const { return out_; }

    void save(const std::string& path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("CsvWriter: cannot open '" + path + "'");
        f << out_;
    }

private:
    void append_row(const std::vector<std::string>& cells)
    {
        if (cells.size() != columns_)
            throw std::invalid_argument("CsvWriter: row width does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }

    std::size_t columns_;
    std::string out_;
};

inline std::vector<std::string> busemann_csv_header()
{
    return {"seed", "x", "y", "side", "restriction", "value", "converged_at_anchor_index"};
}

// One CSV row per sample; x and y are rendered as "px py" coordinate pairs
// and an unconverged sample carries empty value/index cells.
inline void append_busemann_row(CsvWriter& csv, std::uint64_t seed, const BusemannSample& s)
{
    std::string value, index;
    if (s.converged_value) value = format_double(*s.converged_value);
    if (s.converged_at) index = std::to_string(*s.converged_at);
    csv.row({std::to_string(seed),
             std::to_string(s.x.x) + " " + std::to_string(s.x.y),
             std::to_string(s.y.x) + " " + std::to_string(s.y.y),
             to_string(s.side),
             to_string(s.restriction),
             value,
             index});
}

inline void save_json(const nlohmann::json& j, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_json: cannot open '" + path + "'");
    f << j.dump(2) << '\n';
}

}  // namespace fpp
