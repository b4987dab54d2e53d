#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scnet/graph.hpp"

namespace scnet {

struct Graph6Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Decode one graph6 record. Only the short form (n <= 62, single size byte)
 * is supported; the optional ">>graph6<<" header is accepted. The pair bits
 * follow the upper triangle in column-major order (0,1),(0,2),(1,2),(0,3),...
 * packed six per byte, most significant bit first, each byte offset by 63.
 */
inline Graph parse_graph6(const std::string& line)
{
    std::string s = line;
    const std::string header = ">>graph6<<";
    if (s.rfind(header, 0) == 0)
        s = s.substr(header.size());
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
        s.pop_back();
    if (s.empty())
        throw Graph6Error("graph6: empty record");

    for (std::size_t i = 0; i < s.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 63 || c > 126)
            throw Graph6Error("graph6: byte out of range 63..126 at offset " + std::to_string(i));
    }
    if (s[0] == 126)
        throw Graph6Error("graph6: long-form size (n > 62) not supported");

    Graph g;
    g.n = s[0] - 63;
    const long pair_bits = static_cast<long>(g.n) * (g.n - 1) / 2;
    const long need_bytes = (pair_bits + 5) / 6;
    if (static_cast<long>(s.size()) - 1 < need_bytes)
        throw Graph6Error("graph6: truncated bit field, need " + std::to_string(need_bytes) +
                          " data bytes, got " + std::to_string(s.size() - 1));

    long bit = 0;
    for (int v = 1; v < g.n; ++v) {
        for (int u = 0; u < v; ++u, ++bit) {
            const int byte = static_cast<int>(s[1 + bit / 6]) - 63;
            if ((byte >> (5 - bit % 6)) & 1)
                g.add_edge(u, v);
        }
    }
    g.normalise();
    return g;
}

/** Encode a graph (n <= 62) as a graph6 record. */
inline std::string serialize_graph6(const Graph& g)
{
    if (g.n < 0 || g.n > 62)
        throw Graph6Error("graph6: only graphs with at most 62 vertices can be encoded");
    std::string out;
    out.push_back(static_cast<char>(63 + g.n));
    const long pair_bits = static_cast<long>(g.n) * (g.n - 1) / 2;
    std::vector<char> data((pair_bits + 5) / 6, 0);
    long bit = 0;
    for (int v = 1; v < g.n; ++v)
        for (int u = 0; u < v; ++u, ++bit)
            if (g.has_edge(u, v))
                data[bit / 6] |= static_cast<char>(1 << (5 - bit % 6));
    for (char d : data)
        out.push_back(static_cast<char>(63 + d));
    return out;
}

/** Load a file of newline-separated graph6 records; blank lines are skipped. */
inline std::vector<Graph> load_family(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Graph6Error("cannot open graph6 file: " + path);
    std::vector<Graph> graphs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == '\r'))
            trimmed.pop_back();
        if (trimmed.empty())
            continue;
        try {
            graphs.push_back(parse_graph6(trimmed));
        } catch (const Graph6Error& e) {
            throw Graph6Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return graphs;
}

}  // namespace scnet
