#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "scnet/experiments.hpp"

using namespace scnet;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("swl command on fixtures")
{
    SwlCommandConfig cfg;
    cfg.a = "fixture:rook4x4";
    cfg.b = "fixture:shrikhande";
    cfg.lift_dim = 3;
    cfg.variant = "sparse";
    json verdict = run_swl_command(cfg);
    CHECK(verdict["distinguished"] == true);
    CHECK(verdict["dim"] == 3);

    cfg.a = "fixture:decalin";
    cfg.b = "fixture:bicyclopentyl";
    cfg.lift_dim = 2;
    verdict = run_swl_command(cfg);
    CHECK(verdict["distinguished"] == false);
    CHECK(verdict["dim"].is_null());

    // the same input twice can never be distinguished
    cfg.b = "fixture:decalin";
    verdict = run_swl_command(cfg);
    CHECK(verdict["distinguished"] == false);
}

TEST_CASE("swl command on complex files")
{
    TempFile a("swl_a.json"), b("swl_b.json");
    write_json_file(a.path, complex_to_json(build_complex({{{0, 1, 2}}})));
    write_json_file(b.path, complex_to_json(build_complex({{{0, 1}, {1, 2}, {0, 2}}})));
    SwlCommandConfig cfg;
    cfg.a = a.path;
    cfg.b = b.path;
    cfg.format = "complex";
    json verdict = run_swl_command(cfg);
    CHECK(verdict["distinguished"] == true);
    CHECK(verdict["dim"] == 2);  // the filled triangle has a 2-simplex
}

TEST_CASE("sr-family sweeps")
{
    TempFile family("sr16622.g6");
    {
        std::ofstream out(family.path);
        out << serialize_graph6(builtin_fixture("rook4x4")) << "\n";
        out << serialize_graph6(builtin_fixture("shrikhande")) << "\n";
    }

    SrFamilyConfig cfg;
    cfg.file = family.path;
    cfg.mode = "swl";
    SrFamilyResult swl = run_sr_family(cfg);
    CHECK(swl.graphs == 2);
    CHECK(swl.pairs == 1);
    CHECK(swl.lift_dim == 3);  // largest clique in the family is a 4-clique
    CHECK(swl.mean_failure == 0.0);

    cfg.mode = "sin";
    cfg.seeds = 10;
    SrFamilyResult sin = run_sr_family(cfg);
    CHECK(sin.per_seed_failure.size() == 10);
    CHECK(sin.mean_failure <= 0.1);

    // a single-graph family has no pairs
    TempFile single("single.g6");
    {
        std::ofstream out(single.path);
        out << serialize_graph6(builtin_fixture("rook4x4")) << "\n";
    }
    cfg.file = single.path;
    cfg.mode = "swl";
    SrFamilyResult none = run_sr_family(cfg);
    CHECK(none.pairs == 0);
    CHECK(none.mean_failure == 0.0);

    CHECK(swl.csv().find("mean_failure_rate") != std::string::npos);
}

TEST_CASE("regions command modes")
{
    RegionsConfig cfg;
    cfg.arch = "gnn";
    cfg.d = {1};
    cfg.m = 3;
    cfg.mode = "whitney";
    cfg.trials = 3;
    json gnn = run_regions(cfg);
    for (const auto& trial : gnn["trials"]) {
        CHECK(trial["count"] == "8");
        CHECK(trial["matches_closed_form"] == true);
    }

    // ordering across the three architectures, per trial
    cfg.trials = 2;
    cfg.arch = "scnn";
    json scnn = run_regions(cfg);
    cfg.arch = "mpsn";
    json mpsn = run_regions(cfg);
    for (int t = 0; t < 2; ++t) {
        const long long g = 8;
        const long long s = std::stoll(scnn["trials"][t]["count"].get<std::string>());
        const long long m = std::stoll(mpsn["trials"][t]["count"].get<std::string>());
        CHECK(g <= s);
        CHECK(s <= m);
        CHECK(mpsn["trials"][t]["within_bound"] == true);
    }

    cfg.mode = "bound";
    json bound = run_regions(cfg);
    CHECK(bound.contains("product_bound"));
    CHECK(bound.contains("trivial_bound"));
    CHECK(bound["closed_form"] == "120920");

    cfg.mode = "slice";
    cfg.trials = 1;
    cfg.slice_resolution = 64;
    std::vector<SliceArtifacts> slices;
    json slice = run_regions(cfg, &slices);
    REQUIRE(slices.size() == 3);
    CHECK(slices[0].csv.rfind("x,y,region_label\n", 0) == 0);
    long long gnn_d = slice["trials"][0]["gnn_distinct"].get<long long>();
    long long scnn_d = slice["trials"][0]["scnn_distinct"].get<long long>();
    long long mpsn_d = slice["trials"][0]["mpsn_distinct"].get<long long>();
    CHECK(gnn_d <= scnn_d);
    CHECK(scnn_d <= mpsn_d);
}

TEST_CASE("flow dataset files round-trip")
{
    FlowGenConfig gen;
    gen.n_points = 120;
    gen.n_train = 10;
    gen.n_test = 4;
    gen.seed = 31;
    FlowDataset ds = prepare_flow_dataset(gen, true);

    TempFile cfile("rt_complex.json"), dfile("rt_dataset.json");
    write_json_file(cfile.path, complex_to_json(ds.complex.complex));
    write_json_file(dfile.path, flow_dataset_to_json(ds, cfile.path));
    FlowDataset back = load_flow_dataset(dfile.path);
    REQUIRE(back.train.size() == ds.train.size());
    REQUIRE(back.test.size() == ds.test.size());
    CHECK(back.complex.complex.dim_counts() == ds.complex.complex.dim_counts());
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        CHECK(back.train[i].label == ds.train[i].label);
        CHECK((back.train[i].flow - ds.train[i].flow).cwiseAbs().maxCoeff() == 0.0);
    }
    for (std::size_t i = 0; i < ds.test.size(); ++i)
        CHECK((back.test[i].flip - ds.test[i].flip).cwiseAbs().maxCoeff() == 0.0);

    // regenerating with the same seed is byte identical
    FlowDataset again = prepare_flow_dataset(gen, true);
    CHECK(flow_dataset_to_json(again, cfile.path).dump() ==
          flow_dataset_to_json(ds, cfile.path).dump());
}
