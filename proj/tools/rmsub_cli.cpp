// Command-line front end: code construction, plan inspection, Monte-Carlo
// simulation, and projection-weight training for RM subcodes.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rmsub/construct.hpp"
#include "rmsub/decode.hpp"
#include "rmsub/prune.hpp"
#include "rmsub/sim.hpp"
#include "rmsub/train.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_grid(const std::string& s) {
    // "a:step:b", "a,b,c", or a single value
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double a, step, b;
        char c1, c2;
        std::istringstream is(s);
        if (!(is >> a >> c1 >> step >> c2 >> b) || c1 != ':' || c2 != ':' || step <= 0)
            throw CLI::ValidationError("grid", "expected start:step:stop with positive step");
        for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
    } else {
        std::istringstream is(s);
        std::string tok;
        while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

rmsub::GeneratorSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("spec", "cannot open " + path);
    rmsub::GeneratorSpec spec = json::parse(in).get<rmsub::GeneratorSpec>();
    spec.validate();
    return spec;
}

struct PruningChoice {
    rmsub::PruningProfile profile;
    std::string label;
};

PruningChoice resolve_pruning(const std::string& name, const rmsub::DecodingPlan& plan,
                              std::size_t q0, std::uint64_t seed) {
    if (name == "full") return {rmsub::PruningProfile::full(), "full"};
    if (name == "minrank" || name == "maxrank") {
        if (q0 == 0) throw CLI::ValidationError("pruning", "rank pruning needs --q0");
        const auto dir = name == "minrank" ? rmsub::RankDirection::min : rmsub::RankDirection::max;
        return {rmsub::select_by_rank(plan, q0, dir), name};
    }
    if (name == "random") {
        if (q0 == 0) throw CLI::ValidationError("pruning", "random pruning needs --q0");
        return {rmsub::select_random(plan, q0, seed), "random"};
    }
    std::ifstream in(name);
    if (!in) throw CLI::ValidationError("pruning", "cannot open profile " + name);
    PruningChoice pc;
    pc.profile = json::parse(in).get<rmsub::PruningProfile>();
    pc.label = name;
    // loaded profiles decode with their stored subsets
    for (auto& [path, np] : pc.profile.nodes)
        if (np.mode == rmsub::PruneMode::weighted && !np.subset.empty())
            np.mode = rmsub::PruneMode::subset;
    return pc;
}

int cmd_construct(std::size_t m, std::size_t k, const std::string& objective, std::size_t q0,
                  std::size_t budget, std::uint64_t seed, const std::string& out_path) {
    rmsub::SearchObjective obj;
    if (objective == "min-full-L") obj = rmsub::SearchObjective::min_full_L;
    else if (objective == "max-full-L") obj = rmsub::SearchObjective::max_full_L;
    else if (objective == "min-subset-L") obj = rmsub::SearchObjective::min_subset_L;
    else throw CLI::ValidationError("objective", "unknown objective " + objective);

    rmsub::SearchOptions opt;
    opt.q0 = q0;
    opt.seed = seed;
    if (budget) opt.random_budget = budget;
    const rmsub::GeneratorSpec spec = rmsub::search_selection(m, k, obj, opt);
    const rmsub::ComplexityScore score = rmsub::complexity_score(spec);

    std::ofstream out(out_path);
    out << json(spec).dump(2) << "\n";
    std::cout << "spec written to " << out_path << "\n";
    std::cout << "full_L = " << score.full_L << "\n";
    if (q0) std::cout << "best_subset_L(" << q0 << ") = " << score.best_subset_L(q0) << "\n";
    return 0;
}

int cmd_inspect(const std::string& spec_path, bool as_json) {
    const rmsub::GeneratorSpec spec = load_spec(spec_path);
    const rmsub::DecodingPlan plan = rmsub::build_plan(spec);
    if (as_json) {
        std::cout << rmsub::plan_summary(plan).dump(2) << "\n";
        return 0;
    }
    const rmsub::ComplexityScore score = rmsub::complexity_score(spec);
    std::cout << "(" << (1u << spec.m) << "," << spec.k << ") RM subcode, order r = "
              << plan.order << ", bottom nodes T = " << rmsub::count_bottom_nodes(plan.root)
              << "\n";
    if (plan.order == 2) {
        std::cout << "z_q  rank  2^R\n";
        for (std::size_t q = 0; q < plan.root.children.size(); ++q)
            std::cout << (q + 1) << "  " << plan.root.children[q].rank << "  "
                      << (1u << plan.root.children[q].rank) << "\n";
    }
    std::cout << "full_L = " << score.full_L << "\n";
    return 0;
}

int cmd_simulate(const std::string& spec_path, const std::string& decoder,
                 const std::string& pruning, std::size_t q0, const std::string& grid_str,
                 std::uint64_t trials, std::uint64_t seed, std::size_t nmax,
                 const std::string& channel, std::size_t threads, bool deterministic,
                 const std::string& out_path) {
    if (channel != "awgn")
        throw CLI::ValidationError("channel", "decoders take AWGN LLR input only");
    const rmsub::GeneratorSpec spec = load_spec(spec_path);
    const rmsub::DecodingPlan plan = rmsub::build_plan(spec);

    rmsub::DecoderKind kind;
    if (decoder == "map") kind = rmsub::DecoderKind::map;
    else if (decoder == "subrpa") kind = rmsub::DecoderKind::subrpa;
    else if (decoder == "soft-subrpa") kind = rmsub::DecoderKind::soft_subrpa;
    else if (decoder == "soft-subrpa-logsum") kind = rmsub::DecoderKind::soft_subrpa_logsum;
    else throw CLI::ValidationError("decoder", "unknown decoder " + decoder);

    const PruningChoice pc = resolve_pruning(pruning, plan, q0, seed);
    rmsub::SimOptions opt;
    opt.n_max = nmax;
    opt.threads = deterministic ? 1 : threads;
    const rmsub::SimReport rep = rmsub::run_bler(plan, kind, pc.profile, parse_grid(grid_str),
                                                 trials, seed, opt, pc.label, q0);
    std::ofstream out(out_path);
    rmsub::write_csv(out, {rep});
    std::cout << "report written to " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& spec_path, std::size_t q0, double snr_db, std::size_t batch,
              std::size_t iters, double lr, double epsilon, std::uint64_t seed,
              const std::string& out_path) {
    const rmsub::GeneratorSpec spec = load_spec(spec_path);
    const rmsub::DecodingPlan plan = rmsub::build_plan(spec);
    rmsub::TrainConfig cfg;
    cfg.q0 = q0;
    cfg.training_snr_db = snr_db;
    cfg.batch_size = batch;
    cfg.iterations = iters;
    cfg.learning_rate = lr;
    cfg.topk_epsilon = epsilon;
    cfg.seed = seed;
    const rmsub::PruningProfile prof = rmsub::train_weights(plan, cfg);
    std::ofstream out(out_path);
    out << json(prof).dump(2) << "\n";
    std::cout << "profile written to " << out_path << "\n";
    for (const auto& [path, np] : prof.nodes) {
        std::cout << "node [";
        for (std::size_t i = 0; i < path.size(); ++i) std::cout << (i ? "," : "") << path[i];
        std::cout << "] subset:";
        for (std::size_t s : np.subset) std::cout << " " << s;
        std::cout << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::vector<std::string>& decoders,
              const std::vector<std::string>& prunings, std::size_t q0,
              const std::string& grid_str, std::uint64_t trials, std::uint64_t seed,
              std::size_t nmax, const std::string& out_path) {
    const rmsub::GeneratorSpec spec = load_spec(spec_path);
    const rmsub::DecodingPlan plan = rmsub::build_plan(spec);
    const std::vector<double> grid = parse_grid(grid_str);
    std::vector<rmsub::SimReport> reports;
    for (const auto& dec : decoders) {
        rmsub::DecoderKind kind;
        if (dec == "map") kind = rmsub::DecoderKind::map;
        else if (dec == "subrpa") kind = rmsub::DecoderKind::subrpa;
        else if (dec == "soft-subrpa") kind = rmsub::DecoderKind::soft_subrpa;
        else if (dec == "soft-subrpa-logsum") kind = rmsub::DecoderKind::soft_subrpa_logsum;
        else throw CLI::ValidationError("decoders", "unknown decoder " + dec);
        for (const auto& pr : prunings) {
            if (kind == rmsub::DecoderKind::map && pr != "full") continue;
            const PruningChoice pc = resolve_pruning(pr, plan, q0, seed);
            rmsub::SimOptions opt;
            opt.n_max = nmax;
            reports.push_back(
                rmsub::run_bler(plan, kind, pc.profile, grid, trials, seed, opt, pc.label, q0));
        }
    }
    std::ofstream out(out_path);
    rmsub::write_csv(out, reports);
    std::cout << "sweep written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reed-Muller subcode construction, decoding, and simulation"};
    app.require_subcommand(1);

    // construct
    std::size_t m = 6, k = 14, q0 = 0, budget = 0, nmax = 3, batch = 128, iters = 2000,
                threads = 0;
    std::uint64_t seed = 7, trials = 10000;
    double snr_db = 0.0, lr = 0.01, epsilon = 0.01;
    std::string objective = "min-full-L", out_path = "spec.json", spec_path, decoder = "map",
                pruning = "full", grid = "0:0.5:5", channel = "awgn";
    bool as_json = false, deterministic = false;
    std::vector<std::string> decoders{"map", "subrpa", "soft-subrpa"};
    std::vector<std::string> prunings{"full"};

    auto* construct = app.add_subcommand("construct", "search an extra-row selection");
    construct->add_option("--m", m, "log2 blocklength")->required();
    construct->add_option("--k", k, "code dimension")->required();
    construct->add_option("--objective", objective, "min-full-L | max-full-L | min-subset-L");
    construct->add_option("--q0", q0, "subset size for min-subset-L");
    construct->add_option("--budget", budget, "random-search budget when over the cap");
    construct->add_option("--seed", seed, "search seed");
    construct->add_option("-o,--output", out_path, "output spec JSON");

    auto* inspect = app.add_subcommand("inspect", "rank profile and complexity of a spec");
    inspect->add_option("spec", spec_path, "spec JSON")->required();
    inspect->add_flag("--json", as_json, "dump the full plan summary as JSON");

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo BLER over a channel grid");
    simulate->add_option("spec", spec_path, "spec JSON")->required();
    simulate->add_option("--decoder", decoder, "map | subrpa | soft-subrpa | soft-subrpa-logsum");
    simulate->add_option("--pruning", pruning, "full | minrank | maxrank | random | profile.json");
    simulate->add_option("--q0", q0, "retained projections per node");
    simulate->add_option("--ebn0", grid, "Eb/N0 grid in dB: start:step:stop or list");
    simulate->add_option("--trials", trials, "trials per grid point");
    simulate->add_option("--seed", seed, "simulation seed");
    simulate->add_option("--nmax", nmax, "outer iterations");
    simulate->add_option("--channel", channel, "awgn (bsc generation exists but is not decodable)");
    simulate->add_option("--threads", threads, "worker threads (default RMSUB_THREADS)");
    simulate->add_flag("--deterministic", deterministic, "force sequential summation order");
    simulate->add_option("-o,--output", out_path, "output CSV");

    auto* train = app.add_subcommand("train", "train projection weights");
    train->add_option("spec", spec_path, "spec JSON")->required();
    train->add_option("--q0", q0, "projections to retain")->required();
    train->add_option("--snr-db", snr_db, "training SNR in dB");
    train->add_option("--batch", batch, "batch size");
    train->add_option("--iters", iters, "training iterations");
    train->add_option("--lr", lr, "learning rate");
    train->add_option("--epsilon", epsilon, "top-k smoothing strength");
    train->add_option("--seed", seed, "training seed");
    train->add_option("-o,--output", out_path, "output profile JSON");

    auto* sweep = app.add_subcommand("sweep", "batched simulate with paired seeds");
    sweep->add_option("spec", spec_path, "spec JSON")->required();
    sweep->add_option("--decoders", decoders, "decoders to run")->delimiter(',');
    sweep->add_option("--prunings", prunings, "pruning schemes to run")->delimiter(',');
    sweep->add_option("--q0", q0, "retained projections per node");
    sweep->add_option("--ebn0", grid, "Eb/N0 grid in dB");
    sweep->add_option("--trials", trials, "trials per grid point");
    sweep->add_option("--seed", seed, "shared seed (paired noise across decoders)");
    sweep->add_option("--nmax", nmax, "outer iterations");
    sweep->add_option("-o,--output", out_path, "output CSV");

    try {
        app.parse(argc, argv);
        if (construct->parsed())
            return cmd_construct(m, k, objective, q0, budget, seed, out_path);
        if (inspect->parsed()) return cmd_inspect(spec_path, as_json);
        if (simulate->parsed())
            return cmd_simulate(spec_path, decoder, pruning, q0, grid, trials, seed, nmax,
                                channel, threads, deterministic, out_path);
        if (train->parsed())
            return cmd_train(spec_path, q0, snr_db, batch, iters, lr, epsilon, seed, out_path);
        if (sweep->parsed())
            return cmd_sweep(spec_path, decoders, prunings, q0, grid, trials, seed, nmax,
                             out_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
