#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scnet/experiments.hpp"

namespace fs = std::filesystem;
using namespace scnet;

namespace {

fs::path ensure_out_dir(const std::string& out)
{
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    return dir;
}

void write_outputs(const fs::path& dir, const std::string& stem, const json& config,
                   const json& result)
{
    write_json_file((dir / (stem + "_config.json")).string(), config);
    write_json_file((dir / (stem + "_result.json")).string(), result);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"simplicial complex networks: isomorphism tests, linear regions and "
                 "edge-flow learning"};
    app.require_subcommand(1);
    app.fallthrough();  // let subcommands inherit the global options

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory (config echo and results)");

    // ---------------- swl ----------------
    SwlCommandConfig swl_cfg;
    auto* swl = app.add_subcommand("swl", "compare two graphs or complexes by colour refinement");
    swl->add_option("--a", swl_cfg.a, "first input (path or fixture:<name>)")->required();
    swl->add_option("--b", swl_cfg.b, "second input (path or fixture:<name>)")->required();
    swl->add_option("--format", swl_cfg.format, "graph6 | complex");
    swl->add_option("--lift-dim", swl_cfg.lift_dim, "clique lift dimension for graphs");
    swl->add_option("--variant", swl_cfg.variant, "full | sparse");
    swl->add_option("--max-iter", swl_cfg.max_iter, "refinement iteration cap");

    // ---------------- sr-family ----------------
    SrFamilyConfig sr_cfg;
    auto* sr = app.add_subcommand("sr-family", "pairwise distinguishability over a graph6 family");
    sr->add_option("--file", sr_cfg.file, "graph6 family file")->required();
    sr->add_option("--lift-dim", sr_cfg.lift_dim,
                   "clique lift dimension (default: largest clique size - 1)");
    sr->add_option("--mode", sr_cfg.mode, "swl | sin");
    sr->add_option("--eps", sr_cfg.eps, "embedding distance threshold");
    sr->add_option("--seeds", sr_cfg.seeds, "weight draws for the sin mode");
    sr->add_option("--seed", sr_cfg.master_seed, "master seed");

    // ---------------- regions ----------------
    RegionsConfig reg_cfg;
    std::string d_list = "1";
    auto* regions = app.add_subcommand("regions", "linear-region counts, bounds and slices");
    regions->add_option("--arch", reg_cfg.arch, "gnn | scnn | mpsn");
    regions->add_option("--complex", reg_cfg.complex_file,
                        "complex JSON file (default: the full triangle)");
    regions->add_option("--d", d_list, "input widths, comma separated (one or one per dimension)");
    regions->add_option("--m", reg_cfg.m, "output width");
    regions->add_option("--mode", reg_cfg.mode, "whitney | bound | slice");
    regions->add_option("--trials", reg_cfg.trials, "fresh generic weight draws");
    regions->add_option("--seed", reg_cfg.seed, "master seed");
    regions->add_option("--resolution", reg_cfg.slice_resolution, "slice grid resolution");
    regions->add_option("--self-op", reg_cfg.self_operator, "shifted | laplacian | identity");

    // ---------------- flow ----------------
    auto* flow = app.add_subcommand("flow", "trajectory classification benchmark");
    flow->require_subcommand(1);

    FlowGenConfig gen_cfg;
    auto* flow_gen = flow->add_subcommand("gen", "generate a flow dataset");
    flow_gen->add_option("--points", gen_cfg.n_points, "points in the unit square");
    flow_gen->add_option("--train", gen_cfg.n_train, "training trajectories");
    flow_gen->add_option("--test", gen_cfg.n_test, "test trajectories");
    flow_gen->add_option("--greedy", gen_cfg.greedy_prob, "greedy step probability");
    flow_gen->add_option("--seed", gen_cfg.seed, "master seed");
    flow_gen->add_flag("--full-scale", gen_cfg.full_scale,
                       "published sizes (1000 points, 1000/200 samples)");

    FlowTrainCommandConfig train_cmd;
    bool no_randomize = false;
    auto* flow_train = flow->add_subcommand("train", "train a named model");
    flow_train->add_option("--dataset", train_cmd.dataset_file,
                           "dataset JSON (default: generate the desk-scale benchmark)");
    flow_train->add_option("--model", train_cmd.model,
                           "mpsn-tanh | mpsn-id | mpsn-relu | mpsn-l0inv | gnn-l0inv");
    flow_train->add_option("--seeds", train_cmd.seeds, "training repetitions");
    flow_train->add_option("--seed", train_cmd.master_seed, "master seed");
    flow_train->add_option("--epochs", train_cmd.train_cfg.epochs, "training epochs");
    flow_train->add_option("--batch", train_cmd.train_cfg.batch_size, "batch size");
    flow_train->add_option("--lr", train_cmd.train_cfg.learning_rate, "initial learning rate");
    flow_train->add_option("--decay-every", train_cmd.train_cfg.decay_every,
                           "epochs between learning-rate halvings");
    flow_train->add_option("--layers", train_cmd.model_cfg.layers, "message passing layers");
    flow_train->add_option("--hidden", train_cmd.model_cfg.hidden, "hidden width");
    flow_train->add_option("--points", train_cmd.gen.n_points, "points when generating");
    flow_train->add_option("--train-samples", train_cmd.gen.n_train, "train trajectories");
    flow_train->add_option("--test-samples", train_cmd.gen.n_test, "test trajectories");
    flow_train->add_flag("--no-randomize-test", no_randomize,
                         "keep the canonical orientation on the test split");

    // ---------------- fixture ----------------
    std::string fixture_name, fixture_format = "graph6";
    auto* fixture = app.add_subcommand("fixture", "emit a generated fixture graph");
    fixture->add_option("--name", fixture_name,
                        "rook4x4 | shrikhande | decalin | bicyclopentyl | c6 | two_c3")
        ->required();
    fixture->add_option("--format", fixture_format, "graph6 | json");

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir = ensure_out_dir(out_dir);

        if (swl->parsed()) {
            json result = run_swl_command(swl_cfg);
            write_outputs(dir, "swl", swl_cfg.to_json(), result);
            std::cout << result.dump(2) << "\n";
            return 0;
        }

        if (sr->parsed()) {
            SrFamilyResult result = run_sr_family(sr_cfg);
            write_outputs(dir, "sr_family", sr_cfg.to_json(), result.to_json());
            write_text_file((dir / "sr_family.csv").string(), result.csv());
            std::cout << result.to_json().dump(2) << "\n";
            return 0;
        }

        if (regions->parsed()) {
            reg_cfg.d.clear();
            std::stringstream ss(d_list);
            std::string token;
            while (std::getline(ss, token, ','))
                reg_cfg.d.push_back(std::stoi(token));
            std::vector<SliceArtifacts> slices;
            json result = run_regions(reg_cfg, &slices);
            write_outputs(dir, "regions", reg_cfg.to_json(), result);
            for (const SliceArtifacts& s : slices)
                write_text_file((dir / ("slice_" + s.arch + ".csv")).string(), s.csv);
            std::cout << result.dump(2) << "\n";
            return 0;
        }

        if (flow_gen->parsed()) {
            FlowDataset ds = prepare_flow_dataset(gen_cfg, true);
            write_json_file((dir / "complex.json").string(),
                            complex_to_json(ds.complex.complex));
            write_json_file((dir / "dataset.json").string(),
                            flow_dataset_to_json(ds, "complex.json"));
            json summary{{"points", static_cast<int>(ds.complex.points.size())},
                         {"sizes", ds.complex.complex.dim_counts()},
                         {"euler_characteristic", ds.complex.euler_characteristic()},
                         {"harmonic_dimension", harmonic_dimension(ds.complex.complex)},
                         {"train", static_cast<int>(ds.train.size())},
                         {"test", static_cast<int>(ds.test.size())}};
            write_outputs(dir, "flow_gen", gen_cfg.to_json(), summary);
            std::cout << summary.dump(2) << "\n";
            return 0;
        }

        if (flow_train->parsed()) {
            train_cmd.randomize_test = !no_randomize;
            const std::string model_name = train_cmd.model;
            const int layers = train_cmd.model_cfg.layers;
            const int hidden = train_cmd.model_cfg.hidden;
            train_cmd.model_cfg = flow_model_config(model_name);
            train_cmd.model_cfg.layers = layers;
            train_cmd.model_cfg.hidden = hidden;

            FlowDataset ds = train_cmd.dataset_file.empty()
                                 ? prepare_flow_dataset(train_cmd.gen, train_cmd.randomize_test)
                                 : load_flow_dataset(train_cmd.dataset_file);
            FlowExperimentResult result = run_flow_training(ds, train_cmd);
            json summary = result.to_json();
            summary["model"] = model_name;
            write_outputs(dir, "flow_train_" + model_name, train_cmd.to_json(), summary);
            for (std::size_t s = 0; s < result.runs.size(); ++s)
                write_text_file(
                    (dir / ("metrics_" + model_name + "_seed" + std::to_string(s) + ".csv"))
                        .string(),
                    metrics_csv(result.runs[s].history));
            std::cout << summary.dump(2) << "\n";
            return 0;
        }

        if (fixture->parsed()) {
            Graph g = builtin_fixture(fixture_name);
            if (fixture_format == "graph6")
                std::cout << serialize_graph6(g) << "\n";
            else
                std::cout << graph_to_json(g).dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
