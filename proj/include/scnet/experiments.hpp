#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scnet/flows.hpp"
#include "scnet/graph6.hpp"
#include "scnet/io.hpp"
#include "scnet/lifting.hpp"
#include "scnet/regions.hpp"
#include "scnet/sin.hpp"
#include "scnet/swl.hpp"
#include "scnet/train.hpp"

namespace scnet {

// ------------------------------------------------------------------
// Input loading shared by the driver commands
// ------------------------------------------------------------------

/** "fixture:<name>" resolves to a generated graph, anything else is a path. */
inline Graph load_graph_input(const std::string& spec_str)
{
    const std::string prefix = "fixture:";
    if (spec_str.rfind(prefix, 0) == 0)
        return builtin_fixture(spec_str.substr(prefix.size()));
    std::ifstream in(spec_str);
    if (!in)
        throw std::runtime_error("cannot open graph file: " + spec_str);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
            line.pop_back();
        if (!line.empty())
            break;
    }
    if (line.empty())
        throw std::runtime_error("no graph6 record in " + spec_str);
    if (!line.empty() && (line[0] == '{'))
        return graph_from_json(load_json_file(spec_str));
    return parse_graph6(line);
}

// ------------------------------------------------------------------
// swl: pairwise distinguishability of two inputs
// ------------------------------------------------------------------

struct SwlCommandConfig {
    std::string a;
    std::string b;
    std::string format = "graph6";  // graph6 | complex
    int lift_dim = 3;
    std::string variant = "full";  // full | sparse
    int max_iter = -1;

    json to_json() const
    {
        return json{{"a", a},
                    {"b", b},
                    {"format", format},
                    {"lift_dim", lift_dim},
                    {"variant", variant},
                    {"max_iter", max_iter}};
    }
};

inline json run_swl_command(const SwlCommandConfig& cfg)
{
    SimplicialComplex ka, kb;
    if (cfg.format == "complex") {
        ka = complex_from_json(load_json_file(cfg.a));
        kb = complex_from_json(load_json_file(cfg.b));
    } else if (cfg.format == "graph6") {
        ka = clique_lift(load_graph_input(cfg.a), cfg.lift_dim);
        kb = clique_lift(load_graph_input(cfg.b), cfg.lift_dim);
    } else {
        throw std::invalid_argument("swl: format must be graph6 or complex");
    }
    const SwlVariant variant =
        cfg.variant == "sparse" ? SwlVariant::sparse() : SwlVariant::full();
    SwlResult res = swl_refine(ka, kb, variant, cfg.max_iter);
    json out = verdict_to_json(res.verdict);
    out["histograms"] =
        json{{"a", colour_histograms_json(res.first)}, {"b", colour_histograms_json(res.second)}};
    return out;
}

// ------------------------------------------------------------------
// sr-family: failure rates over all pairs of a graph family
// ------------------------------------------------------------------

struct SrFamilyConfig {
    std::string file;
    int lift_dim = -1;  // default: largest clique size in the family minus one
    std::string mode = "swl";  // swl | sin
    double eps = 0.01;
    int seeds = 10;
    std::uint64_t master_seed = 1;
    int sin_layers = 5;

    json to_json() const
    {
        return json{{"file", file},     {"lift_dim", lift_dim}, {"mode", mode},
                    {"eps", eps},       {"seeds", seeds},       {"master_seed", master_seed},
                    {"sin_layers", sin_layers}};
    }
};

struct SrFamilyResult {
    int graphs = 0;
    int pairs = 0;
    int lift_dim = 0;
    std::vector<double> per_seed_failure;
    double mean_failure = 0.0;
    double std_error = 0.0;

    std::string csv() const
    {
        std::ostringstream os;
        os << "graphs,pairs,lift_dim,seeds,mean_failure_rate,std_error\n";
        os << graphs << "," << pairs << "," << lift_dim << "," << per_seed_failure.size()
           << "," << mean_failure << "," << std_error << "\n";
        return os.str();
    }

    json to_json() const
    {
        return json{{"graphs", graphs},
                    {"pairs", pairs},
                    {"lift_dim", lift_dim},
                    {"per_seed_failure", per_seed_failure},
                    {"mean_failure_rate", mean_failure},
                    {"std_error", std_error}};
    }
};

inline SrFamilyResult run_sr_family(const SrFamilyConfig& cfg)
{
    std::vector<Graph> graphs = load_family(cfg.file);
    SrFamilyResult res;
    res.graphs = static_cast<int>(graphs.size());

    int lift_dim = cfg.lift_dim;
    if (lift_dim < 0) {
        int largest = 2;
        for (const Graph& g : graphs)
            largest = std::max(largest, max_clique_size(g));
        lift_dim = largest - 1;
    }
    res.lift_dim = lift_dim;

    std::vector<SimplicialComplex> lifts;
    for (const Graph& g : graphs)
        lifts.push_back(clique_lift(g, lift_dim));
    res.pairs = res.graphs * (res.graphs - 1) / 2;
    if (res.pairs == 0) {
        res.per_seed_failure.assign(std::max(1, cfg.seeds), 0.0);
        return res;
    }

    if (cfg.mode == "swl") {
        int failures = 0;
        for (std::size_t i = 0; i < lifts.size(); ++i)
            for (std::size_t j = i + 1; j < lifts.size(); ++j)
                if (!swl_refine(lifts[i], lifts[j], SwlVariant::sparse()).verdict.distinguished)
                    ++failures;
        const double rate = static_cast<double>(failures) / res.pairs;
        res.per_seed_failure.assign(std::max(1, cfg.seeds), rate);
    } else if (cfg.mode == "sin") {
        int max_dims = 0;
        for (const SimplicialComplex& k : lifts)
            max_dims = std::max(max_dims, k.top_dimension() + 1);
        for (int s = 0; s < cfg.seeds; ++s) {
            Rng rng(derive_seed(cfg.master_seed, s));
            SinModel model =
                make_sin_model(rng, std::vector<int>(max_dims, 1), cfg.sin_layers);
            std::vector<Vector> embeddings;
            for (const SimplicialComplex& k : lifts)
                embeddings.push_back(sin_embed_lift(k, model));
            int failures = 0;
            for (std::size_t i = 0; i < lifts.size(); ++i)
                for (std::size_t j = i + 1; j < lifts.size(); ++j)
                    if ((embeddings[i] - embeddings[j]).norm() < cfg.eps)
                        ++failures;
            res.per_seed_failure.push_back(static_cast<double>(failures) / res.pairs);
        }
    } else {
        throw std::invalid_argument("sr-family: mode must be swl or sin");
    }

    double sum = 0.0;
    for (double f : res.per_seed_failure)
        sum += f;
    res.mean_failure = sum / res.per_seed_failure.size();
    double var = 0.0;
    for (double f : res.per_seed_failure)
        var += (f - res.mean_failure) * (f - res.mean_failure);
    if (res.per_seed_failure.size() > 1) {
        var /= res.per_seed_failure.size() - 1;
        res.std_error = std::sqrt(var / res.per_seed_failure.size());
    }
    return res;
}

// ------------------------------------------------------------------
// regions: counts, bounds and slices per architecture
// ------------------------------------------------------------------

struct RegionsConfig {
    std::string arch = "gnn";
    std::string complex_file;  // empty: the full triangle
    std::vector<int> d{1};
    int m = 3;
    std::string mode = "whitney";  // whitney | bound | slice
    int trials = 1;
    std::uint64_t seed = 1;
    int slice_resolution = 200;
    std::string self_operator = "shifted";  // shifted | laplacian | identity

    json to_json() const
    {
        return json{{"arch", arch},   {"complex_file", complex_file},
                    {"d", d},         {"m", m},
                    {"mode", mode},   {"trials", trials},
                    {"seed", seed},   {"slice_resolution", slice_resolution},
                    {"self_operator", self_operator}};
    }
};

inline SelfOperator self_operator_from_name(const std::string& name)
{
    if (name == "shifted")
        return SelfOperator::shifted_laplacian;
    if (name == "laplacian")
        return SelfOperator::laplacian;
    if (name == "identity")
        return SelfOperator::identity;
    throw std::invalid_argument("unknown self operator: " + name);
}

namespace detail {

inline Matrix generic_weight_matrix(Rng& rng, int rows, int cols)
{
    // rejection keeps every entry away from zero so sampled weights stay
    // generic for the rank arguments
    Matrix w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double v = 0.0;
            while (std::abs(v) < 1e-3)
                v = rng.uniform(-1.0, 1.0);
            w(i, j) = v;
        }
    return w;
}

}  // namespace detail

struct SliceArtifacts {
    std::string arch;
    std::string csv;
    long long distinct = 0;
};

inline json run_regions(const RegionsConfig& cfg, std::vector<SliceArtifacts>* slices = nullptr)
{
    SimplicialComplex k = cfg.complex_file.empty()
                              ? build_complex({{{0, 1, 2}}})
                              : complex_from_json(load_json_file(cfg.complex_file));
    Boundaries b = boundaries_of(k);
    const int p = b.top();
    std::vector<int> d = cfg.d;
    if (static_cast<int>(d.size()) == 1)
        d.assign(p + 1, cfg.d[0]);
    if (static_cast<int>(d.size()) != p + 1)
        throw std::invalid_argument("regions: need one input width per dimension");
    const SelfOperator self = self_operator_from_name(cfg.self_operator);
    const Arch arch = arch_from_name(cfg.arch);

    json out;
    out["arch"] = cfg.arch;
    out["complex"] = k.summary();
    out["sizes"] = k.dim_counts();

    if (cfg.mode == "bound") {
        std::vector<int> s_used = k.dim_counts();
        std::vector<int> d_used = d;
        if (arch == Arch::gnn) {
            s_used.assign(1, k.size(0));
            d_used.assign(1, d[0]);
        }
        out["closed_form"] = closed_form_bound(arch, s_used, d_used, cfg.m).str();
        if (arch == Arch::mpsn) {
            MpsnBounds bounds = mpsn_bounds(s_used, d_used, cfg.m);
            out["product_bound"] = bounds.product_form.str();
            out["trivial_bound"] = bounds.trivial.str();
        }
        out["method"] = "closed_form";
        return out;
    }

    json trials = json::array();
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng(derive_seed(cfg.seed, trial));
        std::vector<Matrix> w;
        for (int n = 0; n <= p; ++n)
            w.push_back(detail::generic_weight_matrix(rng, d[n], cfg.m));
        json row;
        if (cfg.mode == "whitney") {
            Arrangement a = build_arrangement(b, arch, d, cfg.m, w, self);
            RegionCount count = whitney_count(a);
            row["count"] = count.count.str();
            row["method"] = "whitney";
            std::vector<int> s_used = k.dim_counts();
            std::vector<int> d_used = d;
            if (arch == Arch::gnn) {
                s_used.assign(1, k.size(0));
                d_used.assign(1, d[0]);
            }
            const BigInt bound = closed_form_bound(arch, s_used, d_used, cfg.m);
            row["closed_form"] = bound.str();
            if (arch == Arch::mpsn)
                row["within_bound"] = count.count <= bound;
            else
                row["matches_closed_form"] = count.count == bound;
        } else if (cfg.mode == "slice") {
            // Figure-style side-by-side grids for the three architectures
            for (Arch slice_arch : {Arch::gnn, Arch::scnn, Arch::mpsn}) {
                Arrangement a = build_arrangement(b, slice_arch, d, cfg.m, w, self);
                SlicePlane plane = random_slice_plane(rng, a.normals.cols());
                SliceResult slice = slice_regions(a, plane, cfg.slice_resolution);
                const char* name = slice_arch == Arch::gnn
                                       ? "gnn"
                                       : slice_arch == Arch::scnn ? "scnn" : "mpsn";
                row[std::string(name) + "_distinct"] = slice.distinct;
                if (slices)
                    slices->push_back({name, slice.csv(), slice.distinct});
            }
            row["method"] = "slice_lower_bound";
        } else {
            throw std::invalid_argument("regions: mode must be whitney, bound or slice");
        }
        trials.push_back(row);
    }
    out["trials"] = trials;
    return out;
}

// ------------------------------------------------------------------
// flow: dataset generation and model training
// ------------------------------------------------------------------

struct FlowGenConfig {
    int n_points = 300;
    int n_train = 200;
    int n_test = 50;
    double greedy_prob = 0.9;
    std::uint64_t seed = 1;
    bool full_scale = false;  // the published sizes: 1000 points, 1000/200 samples

    json to_json() const
    {
        return json{{"n_points", n_points},       {"n_train", n_train}, {"n_test", n_test},
                    {"greedy_prob", greedy_prob}, {"seed", seed},       {"full_scale", full_scale}};
    }
};

inline json flow_sample_to_json(const FlowSample& s)
{
    std::vector<double> flow(s.flow.data(), s.flow.data() + s.flow.size());
    std::vector<double> flip(s.flip.data(), s.flip.data() + s.flip.size());
    return json{{"flow", flow}, {"label", s.label}, {"flip", flip}};
}

inline FlowSample flow_sample_from_json(const json& j)
{
    FlowSample s;
    auto flow = j.at("flow").get<std::vector<double>>();
    s.flow = Eigen::Map<const Vector>(flow.data(), flow.size());
    s.label = j.at("label").get<int>();
    if (j.contains("flip")) {
        auto flip = j.at("flip").get<std::vector<double>>();
        s.flip = Eigen::Map<const Vector>(flip.data(), flip.size());
    } else {
        s.flip = Vector::Ones(s.flow.size());
    }
    return s;
}

inline json flow_dataset_to_json(const FlowDataset& ds, const std::string& complex_file)
{
    json points = json::array();
    for (const Point2& p : ds.complex.points)
        points.push_back(json::array({p.x, p.y}));
    json train = json::array(), test = json::array();
    for (const FlowSample& s : ds.train)
        train.push_back(flow_sample_to_json(s));
    for (const FlowSample& s : ds.test)
        test.push_back(flow_sample_to_json(s));
    return json{{"complex_file", complex_file},
                {"seed", ds.seed},
                {"points", points},
                {"train", train},
                {"test", test}};
}

inline FlowDataset flow_dataset_from_json(const json& j, const SimplicialComplex& complex)
{
    FlowDataset ds;
    ds.complex.complex = complex;
    ds.seed = j.value("seed", 0ULL);
    if (j.contains("points"))
        for (const auto& p : j.at("points"))
            ds.complex.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& s : j.at("train"))
        ds.train.push_back(flow_sample_from_json(s));
    for (const auto& s : j.at("test"))
        ds.test.push_back(flow_sample_from_json(s));
    return ds;
}

inline FlowDataset load_flow_dataset(const std::string& dataset_path)
{
    json j = load_json_file(dataset_path);
    std::filesystem::path base = std::filesystem::path(dataset_path).parent_path();
    const std::string complex_file = j.at("complex_file").get<std::string>();
    std::filesystem::path cpath = complex_file;
    if (cpath.is_relative())
        cpath = base / cpath;
    SimplicialComplex k = complex_from_json(load_json_file(cpath.string()));
    return flow_dataset_from_json(j, k);
}

struct FlowTrainCommandConfig {
    std::string dataset_file;  // empty: generate the desk-scale dataset in memory
    FlowGenConfig gen;
    std::string model = "mpsn-tanh";
    int seeds = 5;
    std::uint64_t master_seed = 1;
    FlowModelConfig model_cfg;
    FlowTrainConfig train_cfg;
    bool randomize_test = true;

    json to_json() const
    {
        return json{{"dataset_file", dataset_file},
                    {"model", model},
                    {"seeds", seeds},
                    {"master_seed", master_seed},
                    {"epochs", train_cfg.epochs},
                    {"batch_size", train_cfg.batch_size},
                    {"learning_rate", train_cfg.learning_rate},
                    {"decay_every", train_cfg.decay_every},
                    {"decay_factor", train_cfg.decay_factor},
                    {"layers", model_cfg.layers},
                    {"hidden", model_cfg.hidden},
                    {"randomize_test", randomize_test}};
    }
};

struct FlowExperimentResult {
    std::vector<FlowTrainResult> runs;
    double mean_train = 0.0, mean_test = 0.0;
    double std_train = 0.0, std_test = 0.0;

    json to_json() const
    {
        json per_seed = json::array();
        for (const FlowTrainResult& r : runs)
            per_seed.push_back(json{{"train_acc", r.final_train_acc},
                                    {"test_acc", r.final_test_acc}});
        return json{{"per_seed", per_seed},
                    {"mean_train_acc", mean_train},
                    {"mean_test_acc", mean_test},
                    {"std_train_acc", std_train},
                    {"std_test_acc", std_test}};
    }
};

inline FlowExperimentResult run_flow_training(const FlowDataset& ds,
                                              const FlowTrainCommandConfig& cfg)
{
    FlowExperimentResult res;
    for (int s = 0; s < cfg.seeds; ++s) {
        FlowTrainConfig tc = cfg.train_cfg;
        tc.seed = derive_seed(cfg.master_seed, s);
        res.runs.push_back(train_flow_model(ds, cfg.model_cfg, tc));
    }
    auto stats = [&](auto getter, double& mean, double& stddev) {
        double sum = 0.0;
        for (const FlowTrainResult& r : res.runs)
            sum += getter(r);
        mean = sum / res.runs.size();
        double var = 0.0;
        for (const FlowTrainResult& r : res.runs)
            var += (getter(r) - mean) * (getter(r) - mean);
        stddev = res.runs.size() > 1 ? std::sqrt(var / (res.runs.size() - 1)) : 0.0;
    };
    stats([](const FlowTrainResult& r) { return r.final_train_acc; }, res.mean_train,
          res.std_train);
    stats([](const FlowTrainResult& r) { return r.final_test_acc; }, res.mean_test,
          res.std_test);
    return res;
}

/** The desk-scale dataset pipeline: generate, then randomize test orientations. */
inline FlowDataset prepare_flow_dataset(const FlowGenConfig& gen, bool randomize_test)
{
    FlowGenConfig g = gen;
    if (g.full_scale) {
        g.n_points = 1000;
        g.n_train = 1000;
        g.n_test = 200;
    }
    FlowDatasetConfig dc;
    dc.n_points = g.n_points;
    dc.n_train = g.n_train;
    dc.n_test = g.n_test;
    dc.greedy_prob = g.greedy_prob;
    dc.seed = g.seed;
    FlowDataset ds = generate_flow_dataset(dc);
    if (randomize_test)
        ds = randomize_test_orientations(ds, derive_seed(g.seed, 0x7E57));
    return ds;
}

}  // namespace scnet
