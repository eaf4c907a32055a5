#include "ssae/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>

#include "ssae/io.hpp"
#include "ssae/synth.hpp"

namespace ssae::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
    std::uint64_t seed = 0;
    bool quiet = false;
    bool json = false;
};

Index resolve_concept(const ConceptDictionary& dict, const std::string& token) {
    if (dict.contains(token)) return dict.index_of(token);
    if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos) {
        const Index k = std::stol(token);
        if (k < dict.size()) return k;
        throw DataError("concept index " + token + " out of range (K = " + std::to_string(dict.size()) + ")");
    }
    throw DataError("unknown concept '" + token + "'");
}

std::pair<std::string, std::string> split_pair(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size() ||
        text.find(':', colon + 1) != std::string::npos)
        throw UsageError("expected 'a:b', got '" + text + "'");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

ConceptPair resolve_pair(const ConceptDictionary& dict, const std::string& text) {
    const auto [a, b] = split_pair(text);
    return {resolve_concept(dict, a), resolve_concept(dict, b)};
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        if (!item.empty()) out.push_back(std::move(item));
        start = end + 1;
    }
    return out;
}

json names_of(const ConceptDictionary& dict, const ConceptSet& s) {
    json out = json::array();
    for (Index k : s) out.push_back(dict.name(k));
    return out;
}

void ensure_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

const std::map<std::string, Activation> kActivations{{"relu", Activation::relu},
                                                     {"identity", Activation::identity}};
const std::map<std::string, Variant> kVariants{{"decoder-only", Variant::decoder_only},
                                               {"masked-encoder", Variant::masked_encoder}};
const std::map<std::string, OptimizerKind> kOptimizers{{"adam", OptimizerKind::adam},
                                                       {"sgd", OptimizerKind::sgd}};
const std::map<std::string, io::Dtype> kDtypes{{"f64", io::Dtype::f64}, {"f32", io::Dtype::f32}};

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    SynthSpec spec;
    std::vector<std::string> holdout;
    std::string out_dir = ".";
    io::Dtype dtype = io::Dtype::f64;
};

void add_synth(CLI::App& app, SynthArgs& a) {
    app.add_option("--dim-n", a.spec.N, "Embedding dimension N")->capture_default_str();
    app.add_option("--concepts-k", a.spec.K, "Number of concepts K")->capture_default_str();
    app.add_option("--latent-d", a.spec.d, "Latent sub-vector dimension d")->capture_default_str();
    app.add_option("--samples", a.spec.n, "Number of samples n")->capture_default_str();
    app.add_option("--noise", a.spec.noise_sigma, "Per-entry Gaussian noise sigma")->capture_default_str();
    app.add_option("--min-concepts", a.spec.min_concepts, "Smallest concept set")->capture_default_str();
    app.add_option("--max-concepts", a.spec.max_concepts, "Largest concept set (capped at K)")
        ->capture_default_str();
    app.add_option("--holdout", a.holdout, "Concept pair k1:k2 never sampled together (repeatable)");
    app.add_option("--out", a.out_dir, "Output directory")->capture_default_str();
    app.add_option("--dtype", a.dtype, "Payload type of X.mat and truth.mat")
        ->transform(CLI::CheckedTransformer(kDtypes, CLI::ignore_case));
}

int cmd_synth(SynthArgs a, const Globals& g, std::ostream& out) {
    a.spec.seed = g.seed;
    a.spec.max_concepts = std::min(a.spec.max_concepts, a.spec.K);
    a.spec.min_concepts = std::min(a.spec.min_concepts, a.spec.max_concepts);
    if (a.spec.K < 1) throw UsageError("synth: concept count must be >= 1");
    const auto dict = ConceptDictionary::numbered(a.spec.K);
    for (const auto& h : a.holdout) {
        const auto [x, y] = split_pair(h);
        try {
            a.spec.holdout_pairs.push_back({resolve_concept(dict, x), resolve_concept(dict, y)});
        } catch (const DataError& e) {
            throw UsageError(std::string("--holdout: ") + e.what());
        }
    }
    const auto ds = generate<double>(a.spec);

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    io::write_matrix((dir / "X.mat").string(), ds.x, a.dtype);
    io::write_matrix((dir / "truth.mat").string(), ds.truth, a.dtype);
    io::write_concepts((dir / "concepts.json").string(), dict);
    io::write_realizations((dir / "realizations.jsonl").string(), ds.real, dict);

    const SparseDesign design(a.spec.d, a.spec.K);
    const Matrix<double> b = membership_matrix<double>(design, ds.real);
    const Index rank = a.spec.K - static_cast<Index>(dependent_rows(b).size());
    std::vector<Index> coverage(static_cast<std::size_t>(a.spec.K));
    for (Index k = 0; k < a.spec.K; ++k) coverage[std::size_t(k)] = static_cast<Index>(b.row(k).sum());

    if (g.json) {
        json j{{"command", "synth"}, {"out_dir", a.out_dir}, {"rank", rank}, {"K", a.spec.K},
               {"samples", a.spec.n}, {"coverage", coverage}};
        out << j.dump() << "\n";
    } else if (!g.quiet) {
        out << "wrote X.mat (" << ds.x.rows() << "x" << ds.x.cols() << "), truth.mat, concepts.json, "
            << "realizations.jsonl to " << a.out_dir << "\n";
        out << "membership rank " << rank << " of " << a.spec.K << "\n";
        out << "coverage:";
        for (Index k = 0; k < a.spec.K; ++k) out << ' ' << dict.name(k) << '=' << coverage[std::size_t(k)];
        out << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string concepts, realizations, x;
    std::string out_dir = ".";
    std::string model_out, report_out;
    Index d = 10;
    TrainConfig config;
    bool timing = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
    app.add_option("--concepts", a.concepts, "Concept dictionary (JSON array)")->required();
    app.add_option("--realizations", a.realizations, "Realizations (JSON lines)")->required();
    app.add_option("--x", a.x, "Embedding matrix file (N x n)")->required();
    app.add_option("--out", a.out_dir, "Output directory for model.ckpt and report.json")
        ->capture_default_str();
    app.add_option("--model-out", a.model_out, "Checkpoint path (overrides --out)");
    app.add_option("--report-out", a.report_out, "Report path (overrides --out)");
    app.add_option("--latent-d", a.d, "Latent sub-vector dimension d")->capture_default_str();
    app.add_option("--epochs", a.config.epochs)->capture_default_str();
    app.add_option("--batch-size", a.config.batch_size, "0 = full batch")->capture_default_str();
    app.add_option("--lr", a.config.learning_rate)->capture_default_str();
    app.add_option("--optimizer", a.config.optimizer)
        ->transform(CLI::CheckedTransformer(kOptimizers, CLI::ignore_case));
    app.add_option("--beta1", a.config.beta1)->capture_default_str();
    app.add_option("--beta2", a.config.beta2)->capture_default_str();
    app.add_option("--eps", a.config.epsilon)->capture_default_str();
    app.add_option("--init-scale-w2", a.config.init_scale_w2)->capture_default_str();
    app.add_option("--init-scale-y", a.config.init_scale_y)->capture_default_str();
    app.add_option("--activation", a.config.activation)
        ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case));
    app.add_option("--variant", a.config.variant)
        ->transform(CLI::CheckedTransformer(kVariants, CLI::ignore_case));
    app.add_flag("--timing", a.timing, "Record wall-clock duration in report.json");
}

json config_json(const TrainConfig& c, Index d) {
    return json{{"latent_d", d},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"learning_rate", c.learning_rate},
                {"optimizer", to_string(c.optimizer)},
                {"beta1", c.beta1},
                {"beta2", c.beta2},
                {"epsilon", c.epsilon},
                {"init_scale_w2", c.init_scale_w2},
                {"init_scale_y", c.init_scale_y},
                {"seed", c.seed},
                {"variant", to_string(c.variant)},
                {"activation", to_string(c.activation)}};
}

int cmd_train(TrainArgs a, const Globals& g, std::ostream& out) {
    a.config.seed = g.seed;
    const auto dict = io::read_concepts(a.concepts);
    const auto real = io::read_realizations(a.realizations, dict);
    const auto x = io::read_matrix(a.x);
    if (x.cols() != real.size())
        throw DataError(a.x + " has " + std::to_string(x.cols()) + " columns but " + a.realizations +
                        " lists " + std::to_string(real.size()) + " samples");
    if (a.d < 1) throw UsageError("--latent-d must be >= 1");
    if (a.config.epochs < 0) throw UsageError("--epochs must be >= 0");

    const SparseDesign design(a.d, dict.size());
    auto model = init_model<double>(design, x.rows(), a.config);
    auto [trained, report] = train(std::move(model), x, real, a.config);

    const std::string model_path =
        a.model_out.empty() ? (fs::path(a.out_dir) / "model.ckpt").string() : a.model_out;
    const std::string report_path =
        a.report_out.empty() ? (fs::path(a.out_dir) / "report.json").string() : a.report_out;
    ensure_parent(model_path);
    ensure_parent(report_path);
    io::save_checkpoint(model_path, trained, dict);

    json rep = io::to_json(report);
    if (!a.timing) rep.erase("duration_seconds");
    rep["config"] = config_json(a.config, a.d);
    io::write_file(report_path, rep.dump(2) + "\n");

    const double final_loss = report.epoch_loss.empty() ? report.initial_loss : report.epoch_loss.back();
    if (g.json) {
        out << json{{"command", "train"},
                    {"model", model_path},
                    {"report", report_path},
                    {"initial_loss", report.initial_loss},
                    {"final_loss", final_loss},
                    {"duration_seconds", report.duration_seconds}}
                   .dump()
            << "\n";
    } else if (!g.quiet) {
        out << std::setprecision(6) << "trained " << to_string(a.config.variant) << " model (K="
            << design.K << ", d=" << design.d << ", N=" << x.rows() << ", n=" << x.cols() << ") for "
            << a.config.epochs << " epochs in " << report.duration_seconds << " s\n"
            << "loss " << report.initial_loss << " -> " << final_loss << "\n"
            << "wrote " << model_path << " and " << report_path << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// compose

struct ComposeArgs {
    std::string model;
    std::string base;
    std::vector<std::string> swaps, removes, inserts;
    std::string realizations;
    std::string out = "embedding.mat";
    std::string provenance;
    io::Dtype dtype = io::Dtype::f64;
    CLI::Option* swap_opt = nullptr;
    CLI::Option* remove_opt = nullptr;
    CLI::Option* insert_opt = nullptr;
};

void add_compose(CLI::App& app, ComposeArgs& a) {
    app.add_option("--model", a.model, "Checkpoint")->required();
    app.add_option("--base", a.base, "Comma-separated starting concept set")->required();
    a.swap_opt = app.add_option("--swap", a.swaps, "Swap a:b (repeatable, applied in order)");
    a.remove_opt = app.add_option("--remove", a.removes, "Remove a concept (repeatable)");
    a.insert_opt = app.add_option("--insert", a.inserts, "Insert a concept (repeatable)");
    app.add_option("--realizations", a.realizations, "Training realizations, for seen/unseen flags");
    app.add_option("--out", a.out, "Decoded embedding (N x 1 matrix file)")->capture_default_str();
    app.add_option("--provenance", a.provenance, "Provenance JSON (default: <out>.json)");
    app.add_option("--dtype", a.dtype)->transform(CLI::CheckedTransformer(kDtypes, CLI::ignore_case));
}

int cmd_compose(const ComposeArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
    const auto ck = io::load_checkpoint(a.model);
    const auto& dict = ck.concepts;
    const auto& model = ck.model;

    ConceptSet base;
    for (const auto& name : split_list(a.base)) base.push_back(resolve_concept(dict, name));
    const ConceptSet base_sorted = normalize_set(base);
    if (base_sorted.size() != base.size()) throw UsageError("--base lists a concept twice");
    LatentCode code(model.design, base_sorted);

    json edits = json::array();
    std::map<const CLI::Option*, std::size_t> used;
    int step = 0;
    for (const CLI::Option* opt : sub.parse_order()) {
        if (opt != a.swap_opt && opt != a.remove_opt && opt != a.insert_opt) continue;
        const std::size_t idx = used[opt]++;
        ++step;
        const std::string op = opt == a.swap_opt ? "swap" : opt == a.remove_opt ? "remove" : "insert";
        const std::string arg = opt == a.swap_opt     ? a.swaps.at(idx)
                                : opt == a.remove_opt ? a.removes.at(idx)
                                                      : a.inserts.at(idx);
        try {
            if (opt == a.swap_opt) {
                const auto [k1, k2] = resolve_pair(dict, arg);
                code = swap(code, k1, k2);
            } else if (opt == a.remove_opt) {
                code = remove(code, resolve_concept(dict, arg));
            } else {
                code = insert(code, resolve_concept(dict, arg));
            }
        } catch (const Error& e) {
            const std::string msg = "edit step " + std::to_string(step) + " (--" + op + " " + arg + "): " + e.what();
            if (e.kind() == ErrorKind::data) throw DataError(msg);
            throw UsageError(msg);
        }
        edits.push_back({{"step", step}, {"op", op}, {"arg", arg}, {"active", names_of(dict, code.active())}});
    }

    const Vector<double> embedding = decode(model, code);
    const std::string prov_path = a.provenance.empty() ? a.out + ".json" : a.provenance;

    json pairs = json::array();
    std::optional<RealizationSet> real;
    if (!a.realizations.empty()) real = io::read_realizations(a.realizations, dict);
    const auto& act = code.active();
    for (std::size_t p = 0; p < act.size(); ++p)
        for (std::size_t q = p + 1; q < act.size(); ++q) {
            json entry{{"pair", {dict.name(act[p]), dict.name(act[q])}}};
            entry["seen"] = real ? json(!check_composability(*real, act[p], act[q])) : json(nullptr);
            pairs.push_back(std::move(entry));
        }
    json prov{{"model", a.model},
              {"base", names_of(dict, base_sorted)},
              {"edits", edits},
              {"active", names_of(dict, act)},
              {"pairs", pairs},
              {"embedding", a.out}};

    ensure_parent(a.out);
    ensure_parent(prov_path);
    io::write_matrix(a.out, Matrix<double>(embedding), a.dtype);
    io::write_file(prov_path, prov.dump(2) + "\n");

    if (g.json) {
        out << json{{"command", "compose"}, {"embedding", a.out}, {"provenance", prov_path},
                    {"active", names_of(dict, act)}, {"norm", embedding.norm()}}
                   .dump()
            << "\n";
    } else if (!g.quiet) {
        out << "active set: {";
        for (std::size_t p = 0; p < act.size(); ++p) out << (p ? ", " : "") << dict.name(act[p]);
        out << "}\nwrote " << a.out << " and " << prov_path << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string model, x, realizations, truth;
    std::vector<std::string> holdout;
    bool recovery = false;
    std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
    app.add_option("--model", a.model, "Checkpoint")->required();
    auto* x = app.add_option("--x", a.x, "Embedding matrix for reconstruction errors");
    auto* r = app.add_option("--realizations", a.realizations, "Realizations matching --x");
    x->needs(r);
    r->needs(x);
    app.add_option("--truth", a.truth, "Ground-truth concept vectors (N x K)");
    app.add_option("--holdout", a.holdout, "Pair a:b to score against truth (repeatable)");
    app.add_flag("--recovery", a.recovery, "Require per-concept recovery errors");
    app.add_option("--out", a.out, "Report path");
}

json cosine_json(const CosineMatrix<double>& c) {
    return json{{"matrix", io::to_json(c.cosine)}, {"zero_norm", c.zero_norm}};
}

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
    if ((a.recovery || !a.holdout.empty()) && a.truth.empty())
        throw UsageError("eval: --recovery and --holdout need --truth");
    const auto ck = io::load_checkpoint(a.model);
    const auto& dict = ck.concepts;
    const auto& model = ck.model;

    json rep;
    rep["concepts"] = dict.names();
    rep["gram"] = io::to_json(concept_gram(model));
    rep["cosine"] = cosine_json(concept_cosine(model));
    rep["decoded_cosine"] = cosine_json(decoded_cosine(model));
    if (!a.x.empty()) {
        const auto real = io::read_realizations(a.realizations, dict);
        const auto x = io::read_matrix(a.x);
        rep["reconstruction"] = io::to_json(recon_errors(model, x, real), dict);
        rep["loss"] = variant_loss(model, x, real);
    }
    if (!a.truth.empty()) {
        const auto truth = io::read_matrix(a.truth);
        rep["recovery"] = recovery_error(model, truth);
        std::vector<ConceptPair> pairs;
        for (const auto& h : a.holdout) pairs.push_back(resolve_pair(dict, h));
        json scores = json::array();
        for (const auto& s : holdout_eval(model, truth, pairs))
            scores.push_back({{"pair", {dict.name(s.pair.first), dict.name(s.pair.second)}},
                              {"relative_error", s.relative_error}});
        rep["holdout"] = scores;
    }
    if (!a.out.empty()) {
        ensure_parent(a.out);
        io::write_file(a.out, rep.dump(2) + "\n");
    }
    if (g.json) {
        out << rep.dump() << "\n";
    } else if (!g.quiet) {
        out << std::setprecision(6);
        out << "concept cosine (tied sub-vectors):\n" << concept_cosine(model).cosine << "\n";
        if (rep.contains("loss")) out << "loss " << rep["loss"].get<double>() << "\n";
        if (rep.contains("recovery")) {
            out << "recovery relative error:";
            for (double e : rep["recovery"]) out << ' ' << e;
            out << "\n";
        }
        if (rep.contains("holdout"))
            for (const auto& s : rep["holdout"])
                out << "holdout " << s["pair"][0].get<std::string>() << "+" << s["pair"][1].get<std::string>()
                    << " relative error " << s["relative_error"].get<double>() << "\n";
        if (!a.out.empty()) out << "wrote " << a.out << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
    std::string model, x, realizations;
    Index n_dim = 5, k = 3, d = 2, samples = 8;
    Activation activation = Activation::relu;
    Variant variant = Variant::decoder_only;
    GradcheckOptions options;
    Index corrupt = -1;
    std::string out;
};

void add_gradcheck(CLI::App& app, GradcheckArgs& a) {
    auto* m = app.add_option("--model", a.model, "Checkpoint to check instead of a small instance");
    auto* x = app.add_option("--x", a.x, "Embedding matrix for --model");
    auto* r = app.add_option("--realizations", a.realizations, "Realizations for --model");
    m->needs(x)->needs(r);
    x->needs(m);
    r->needs(m);
    app.add_option("--dim-n", a.n_dim)->capture_default_str();
    app.add_option("--concepts-k", a.k)->capture_default_str();
    app.add_option("--latent-d", a.d)->capture_default_str();
    app.add_option("--samples", a.samples)->capture_default_str();
    app.add_option("--activation", a.activation)
        ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case));
    app.add_option("--variant", a.variant)->transform(CLI::CheckedTransformer(kVariants, CLI::ignore_case));
    app.add_option("--step", a.options.h, "Central difference step")->capture_default_str();
    app.add_option("--tolerance", a.options.tolerance, "Max relative error")->capture_default_str();
    app.add_option("--max-coords", a.options.max_coordinates)->capture_default_str();
    app.add_option("--corrupt-gradient", a.corrupt, "Debug: perturb this analytic coordinate by 1e-3");
    app.add_option("--out", a.out, "Report path");
}

int cmd_gradcheck(GradcheckArgs a, const Globals& g, std::ostream& out) {
    a.options.seed = g.seed;
    if (a.corrupt >= 0) a.options.corrupt_coordinate = a.corrupt;
    if (!(a.options.h > 0.0)) throw UsageError("--step must be > 0");

    SsaeModel<double> model;
    Matrix<double> x;
    RealizationSet real;
    if (!a.model.empty()) {
        auto ck = io::load_checkpoint(a.model);
        real = io::read_realizations(a.realizations, ck.concepts);
        x = io::read_matrix(a.x);
        model = std::move(ck.model);
    } else {
        SynthSpec spec;
        spec.N = a.n_dim;
        spec.K = a.k;
        spec.d = a.d;
        spec.n = a.samples;
        spec.noise_sigma = 0.1;
        spec.min_concepts = 1;
        spec.max_concepts = a.k;
        spec.seed = g.seed;
        const auto ds = generate<double>(spec);
        TrainConfig cfg;
        cfg.seed = g.seed;
        cfg.activation = a.activation;
        cfg.variant = a.variant;
        model = init_model<double>(SparseDesign(a.d, a.k), a.n_dim, cfg);
        x = ds.x;
        real = ds.real;
    }
    if (x.rows() != model.N || x.cols() != real.size())
        throw DataError("gradcheck: X is " + shape_of(x) + ", expected " + shape_string(model.N, real.size()));

    const auto res = gradcheck(model, x, real, a.options);
    json rep{{"pass", res.pass},
             {"tolerance", a.options.tolerance},
             {"h", a.options.h},
             {"max_relative_error", res.max_relative_error},
             {"checked", res.checked},
             {"total", res.total},
             {"worst", {{"parameter", res.worst_parameter},
                        {"row", res.worst_row},
                        {"col", res.worst_col},
                        {"coordinate", res.worst_flat},
                        {"analytic", res.worst_analytic},
                        {"numeric", res.worst_numeric}}}};
    if (!a.out.empty()) {
        ensure_parent(a.out);
        io::write_file(a.out, rep.dump(2) + "\n");
    }
    if (g.json) {
        out << rep.dump() << "\n";
    } else if (!g.quiet || !res.pass) {
        out << std::setprecision(6) << (res.pass ? "PASS" : "FAIL") << ": max relative error "
            << res.max_relative_error << " over " << res.checked << " coordinates (tolerance "
            << a.options.tolerance << ")\n"
            << "worst " << res.worst_parameter << "(" << res.worst_row << "," << res.worst_col
            << "): analytic " << res.worst_analytic << ", numeric " << res.worst_numeric << "\n";
    }
    return res.pass ? kOk : kNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Supervised sparse auto-encoder toolkit", "ssae"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress the human-readable summary");
    app.add_flag("--json", g.json, "Machine-readable JSON on stdout");

    SynthArgs synth_args;
    TrainArgs train_args;
    ComposeArgs compose_args;
    EvalArgs eval_args;
    GradcheckArgs gradcheck_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic additive concept world");
    auto* train_cmd = app.add_subcommand("train", "Train a model on embeddings and realizations");
    auto* compose = app.add_subcommand("compose", "Edit a latent code and decode it");
    auto* eval = app.add_subcommand("eval", "Diagnostics report for a trained model");
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
    add_synth(*synth, synth_args);
    add_train(*train_cmd, train_args);
    add_compose(*compose, compose_args);
    add_eval(*eval, eval_args);
    add_gradcheck(*gradcheck_cmd, gradcheck_args);

    std::vector<std::string> argv_store{"ssae"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_args, g, out);
        if (train_cmd->parsed()) return cmd_train(train_args, g, out);
        if (compose->parsed()) return cmd_compose(compose_args, *compose, g, out);
        if (eval->parsed()) return cmd_eval(eval_args, g, out);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck_args, g, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace ssae::cli
