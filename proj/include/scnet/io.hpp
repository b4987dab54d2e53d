#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "scnet/complex.hpp"
#include "scnet/graph.hpp"
#include "scnet/swl.hpp"

namespace scnet {

using json = nlohmann::json;

// Complex files: {"dims": p, "simplices": [[...dim 0 tuples...], ...]}.
// The loader applies closure, the writer emits sorted tuples.

inline json complex_to_json(const SimplicialComplex& k)
{
    json dims = json::array();
    for (int d = 0; d <= k.top_dimension(); ++d) {
        json level = json::array();
        for (const auto& tuple : k.simplices(d))
            level.push_back(tuple);
        dims.push_back(level);
    }
    return json{{"dims", k.top_dimension()}, {"simplices", dims}};
}

inline SimplicialComplex complex_from_json(const json& j)
{
    if (!j.contains("simplices"))
        throw std::runtime_error("complex JSON: missing 'simplices'");
    std::vector<std::vector<std::vector<int>>> lists;
    for (const auto& level : j.at("simplices"))
        lists.push_back(level.get<std::vector<std::vector<int>>>());
    return build_complex(lists);
}

// Graph files: {"n": ..., "edges": [[u,v],...]}

inline json graph_to_json(const Graph& g)
{
    json edges = json::array();
    for (auto [u, v] : g.edges)
        edges.push_back(json::array({u, v}));
    json j{{"n", g.n}, {"edges", edges}};
    if (!g.labels.empty())
        j["labels"] = g.labels;
    return j;
}

inline Graph graph_from_json(const json& j)
{
    Graph g;
    g.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges"))
        g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    g.normalise();
    if (j.contains("labels"))
        g.labels = j.at("labels").get<std::vector<int>>();
    return g;
}

inline json verdict_to_json(const Verdict& v)
{
    json j;
    j["distinguished"] = v.distinguished;
    j["dim"] = v.witness_dimension ? json(*v.witness_dimension) : json(nullptr);
    j["iter"] = v.witness_iteration ? json(*v.witness_iteration) : json(nullptr);
    return j;
}

inline json colour_histograms_json(const Colouring& c)
{
    json hists = json::object();
    for (int d = 0; d < static_cast<int>(c.colours.size()); ++d) {
        std::map<int, int> h;
        for (int colour : c.colours[d])
            ++h[colour];
        json level = json::object();
        for (auto [colour, count] : h)
            level[std::to_string(colour)] = count;
        hists[std::to_string(d)] = level;
    }
    return hists;
}

inline json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << text;
}

}  // namespace scnet
