#include "ulr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "ulr/evaluation.hpp"
#include "ulr/io.hpp"
#include "ulr/refinement.hpp"
#include "ulr/report.hpp"

namespace ulr::cli {

namespace {

struct ConfigFlags {
    RefinementConfig config;
    std::string metric;
    std::string early_stopping;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& flags, bool with_weights) {
    flags.metric = std::string(to_string(flags.config.metric));
    flags.early_stopping = std::string(to_string(flags.config.early_stopping));
    cmd.add_option("--metric", flags.metric, "Distance: cosine | squared-l2")
        ->check(CLI::IsMember({"cosine", "squared-l2"}))
        ->capture_default_str();
    cmd.add_option("--max-iters", flags.config.max_iters, "Iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (with_weights) {
        cmd.add_option("--w-mean", flags.config.weights.mean, "Weight of the assigned-document mean")
            ->capture_default_str();
        cmd.add_option("--w-anchor", flags.config.weights.anchor, "Weight of the labeled-anchor mean")
            ->capture_default_str();
        cmd.add_option("--w-category", flags.config.weights.category, "Weight of the initial category embedding")
            ->capture_default_str();
        cmd.add_option("--renormalize-centroids", flags.config.renormalize_centroids,
                       "Re-project centroids to unit length under cosine (true|false)")
            ->capture_default_str();
    }
    cmd.add_option("--early-stopping", flags.early_stopping, "min-objective | last-iteration")
        ->check(CLI::IsMember({"min-objective", "last-iteration"}))
        ->capture_default_str();
    cmd.add_option("--seed", flags.config.seed, "Random seed")->capture_default_str();
}

RefinementConfig resolve(const ConfigFlags& flags) {
    RefinementConfig config = flags.config;
    config.metric = parse_metric(flags.metric);
    config.early_stopping = parse_early_stopping(flags.early_stopping);
    return config;
}

std::unordered_set<std::string> vocabulary_of(const std::vector<std::string>& texts, bool lowercase) {
    std::unordered_set<std::string> vocab;
    for (const auto& text : texts) {
        std::istringstream in(text);
        for (std::string token; in >> token;) {
            if (lowercase) {
                std::transform(token.begin(), token.end(), token.begin(),
                               [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            }
            vocab.insert(std::move(token));
        }
    }
    return vocab;
}

WordVectorTable load_table_for(const std::filesystem::path& path, const std::vector<std::string>& texts,
                               bool lowercase, bool skip_malformed) {
    const auto vocab = vocabulary_of(texts, lowercase);
    LoadVectorsOptions options;
    options.lowercase = lowercase;
    options.vocabulary = &vocab;
    options.skip_malformed = skip_malformed;
    return load_vectors(path, options);
}

struct CategoryInputs {
    std::vector<std::string> names;
    std::optional<EmbeddingMatrix> embeddings;
};

// Category names come from cats=; embeddings from cat_vectors=, or by
// averaging word vectors (vectors=) over the names.
CategoryInputs load_categories(const Manifest& manifest, bool need_embeddings, bool skip_malformed) {
    CategoryInputs out;
    if (auto cats = manifest.get("cats")) {
        out.names = load_lines(*cats);
    }
    if (!need_embeddings) {
        return out;
    }
    if (auto vectors = manifest.get("cat_vectors")) {
        out.embeddings = load_embeddings(*vectors);
        if (out.names.empty()) {
            out.names = out.embeddings->ids();
        } else if (out.names.size() != out.embeddings->rows()) {
            throw Error(ErrorCode::LengthMismatch, std::to_string(out.names.size()) + " category names for " +
                                                       std::to_string(out.embeddings->rows()) + " category vectors");
        }
    } else if (auto table_path = manifest.get("vectors")) {
        if (out.names.empty()) {
            throw Error(ErrorCode::InvalidArgument, "encoding categories with vectors= needs cats=");
        }
        const auto table = load_table_for(*table_path, out.names, true, skip_malformed);
        out.embeddings = encode_texts(out.names, table);
    } else {
        throw Error(ErrorCode::InvalidArgument, "manifest needs cat_vectors= or vectors= for category embeddings");
    }
    return out;
}

std::optional<Labels> load_gold(const Manifest& manifest, const std::vector<std::string>& names, std::size_t k) {
    if (auto gold = manifest.get("gold")) {
        return load_labels(*gold, names, k);
    }
    return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

bool is_report(const std::string& text) {
    return text.starts_with("ulr-report ");
}

// Final predictions of any report kind that carries them, or a plain
// one-label-per-line file.
Labels load_predictions(const std::filesystem::path& path, const std::vector<std::string>& names, std::size_t k) {
    const std::string text = read_file(path);
    if (!is_report(text)) {
        return load_labels(path, names, k);
    }
    std::istringstream in(text);
    std::string line;
    auto skip = [&](std::size_t n) {
        for (std::size_t i = 0; i < n && std::getline(in, line); ++i) {
        }
    };
    while (std::getline(in, line)) {
        std::istringstream words(line);
        std::string key;
        std::size_t a = 0;
        words >> key;
        if (key == "categories" && (words >> a)) {
            skip(a);
        } else if ((key == "final_centroids" || key == "final_distances" || key == "predictions_per_iter") &&
                   (words >> a)) {
            skip(a);
        } else if (key == "predictions" && (words >> a)) {
            Labels preds;
            for (std::size_t i = 0; i < a && std::getline(in, line); ++i) {
                std::istringstream row(line);
                long long pos = 0;
                long long label = 0;
                if (!(row >> pos >> label) || label < 0 || static_cast<std::size_t>(label) >= k) {
                    throw Error(ErrorCode::ParseError, "bad prediction row in '" + path.string() + "'", i);
                }
                preds.push_back(static_cast<Label>(label));
            }
            return preds;
        }
    }
    throw Error(ErrorCode::ParseError, "no predictions table in '" + path.string() + "'");
}

void add_metrics(RefinementReport& report, const std::optional<Labels>& gold) {
    if (!gold) {
        return;
    }
    const std::size_t k = report.result.final_distances.cols();
    GoldLabels checked(*gold, k);
    report.accuracy = accuracy(report.result.final_predictions, checked);
    report.one_to_one_accuracy = one_to_one_accuracy(report.result.final_predictions, *gold, k).accuracy;
}

void add_metrics(PredictionReport& report, const std::optional<Labels>& gold, std::size_t k) {
    if (!gold) {
        return;
    }
    GoldLabels checked(*gold, k);
    report.accuracy = accuracy(report.predictions, checked);
    const auto matched = one_to_one_accuracy(report.predictions, *gold, k);
    report.one_to_one_accuracy = matched.accuracy;
    report.one_to_one_mapping = matched.mapping;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? " " : "") + format_double(values[i]);
    }
    return out;
}

std::vector<std::vector<std::string>> load_semicolon_lists(const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> lists;
    for (const auto& line : load_lines(path)) {
        std::vector<std::string> items;
        std::istringstream in(line);
        for (std::string item; std::getline(in, item, ';');) {
            const auto first = item.find_first_not_of(" \t");
            if (first == std::string::npos) {
                continue;
            }
            const auto last = item.find_last_not_of(" \t");
            items.push_back(item.substr(first, last - first + 1));
        }
        lists.push_back(std::move(items));
    }
    return lists;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unsupervised label refinement for dataless text classification", "ulr"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "ulr 0.1.0");

    std::string manifest_path;
    std::string output_path;
    bool skip_malformed = false;

    // encode
    std::string vectors_path;
    std::string input_path;
    bool no_lowercase = false;
    auto* encode = app.add_subcommand("encode", "Average word vectors over each line of a text file");
    encode->add_option("--vectors", vectors_path, "Word vectors (word2vec text format)")->required();
    encode->add_option("--input", input_path, "Text file, one document or category per line")->required();
    encode->add_option("-o,--output", output_path, "Output embedding file")->required();
    encode->add_flag("--no-lowercase", no_lowercase, "Match tokens case-sensitively");
    encode->add_flag("--skip-malformed", skip_malformed, "Skip malformed vector lines instead of failing");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-m,--manifest", manifest_path, "Dataset manifest (key=value lines)")->required();
        cmd->add_option("-o,--output", output_path, "Report path")->required();
        cmd->add_flag("--skip-malformed", skip_malformed, "Skip malformed vector lines instead of failing");
    };

    ConfigFlags dual_flags{RefinementConfig::dual_defaults()};
    auto* dual = app.add_subcommand("refine-dual", "Refine dual-encoder predictions (interpolated k-means)");
    add_common(dual);
    add_config_flags(*dual, dual_flags, true);

    ConfigFlags single_flags{RefinementConfig::single_defaults()};
    auto* single = app.add_subcommand("refine-single", "Refine single-encoder scores (Jensen-Shannon k-means)");
    add_common(single);
    add_config_flags(*single, single_flags, false);

    ConfigFlags fewshot_flags{RefinementConfig::fewshot_defaults()};
    auto* fewshot = app.add_subcommand("refine-fewshot", "Refine with labeled anchors in every centroid update");
    add_common(fewshot);
    add_config_flags(*fewshot, fewshot_flags, true);

    ConfigFlags random_flags{RefinementConfig::dual_defaults()};
    std::size_t random_k = 0;
    auto* random = app.add_subcommand("cluster-random", "Plain k-means from randomly chosen documents");
    add_common(random);
    random->add_option("--k", random_k, "Number of clusters (default: number of categories in cats=)");
    add_config_flags(*random, random_flags, false);

    std::vector<std::string> ensemble_inputs;
    std::string optional_manifest;
    auto* ens = app.add_subcommand("ensemble", "Sum distance/score matrices from several runs");
    ens->add_option("-i,--input", ensemble_inputs, "Refinement report or score TSV (repeatable)")->required();
    ens->add_option("-m,--manifest", optional_manifest, "Manifest with cats=/gold= for names and metrics");
    ens->add_option("-o,--output", output_path, "Report path")->required();

    std::string predictions_path;
    auto* eval = app.add_subcommand("eval", "Accuracy and one-to-one accuracy of predictions");
    eval->add_option("-p,--predictions", predictions_path, "Report or one-label-per-line file")->required();
    add_common(eval);

    ConfigFlags sweep_flags{RefinementConfig::dual_defaults()};
    std::string pools_path;
    std::string label_sets_path;
    std::size_t sample_count = 0;
    std::size_t jobs = 1;
    std::string scatter_path;
    auto* sweep = app.add_subcommand("sweep", "Refinement over many label-name choices");
    add_common(sweep);
    add_config_flags(*sweep, sweep_flags, true);
    sweep->add_option("--pools", pools_path, "Synonym pools: one category per line, names separated by ';'");
    sweep->add_option("--label-sets", label_sets_path, "Label sets: one set per line, names separated by ';'");
    sweep->add_option("--samples", sample_count, "Sample this many label sets (0 = all)")->capture_default_str();
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--scatter", scatter_path, "Also write (run_id, initial_accuracy, gain) TSV here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "usage: ulr <encode|refine-dual|refine-single|refine-fewshot|cluster-random|ensemble|eval|sweep> "
               "[options]; see ulr <subcommand> --help\n";
        return kExitUsageError;
    }

    try {
        if (encode->parsed()) {
            const auto texts = load_lines(input_path);
            if (texts.empty()) {
                throw Error(ErrorCode::EmptyInput, "no text lines in '" + input_path + "'");
            }
            const auto table = load_table_for(vectors_path, texts, !no_lowercase, skip_malformed);
            write_embeddings(encode_texts(texts, table), output_path);
            return kExitOk;
        }

        if (dual->parsed() || fewshot->parsed()) {
            const bool is_fewshot = fewshot->parsed();
            RefinementConfig config = resolve(is_fewshot ? fewshot_flags : dual_flags);
            const Manifest manifest = Manifest::load(manifest_path);
            const auto cats = load_categories(manifest, true, skip_malformed);
            EmbeddingMatrix docs = load_embeddings(manifest.require("docs"));
            const auto gold = load_gold(manifest, cats.names, cats.embeddings->rows());
            const Dataset data = validate_dataset(std::move(docs), *cats.embeddings, gold);

            RefinementReport report;
            report.category_names = cats.names;
            if (is_fewshot) {
                const EmbeddingMatrix anchor_docs = load_embeddings(manifest.require("anchors"));
                const Labels anchor_labels =
                    load_labels(manifest.require("anchor_labels"), cats.names, data.categories.rows());
                const LabeledAnchors anchors(anchor_docs, anchor_labels, data.categories.rows());
                report.algorithm = "refine-fewshot";
                report.result = refine_fewshot(data.docs, data.categories, anchors, config);
            } else {
                std::optional<AugmentedInputs> augmented;
                if (manifest.has("aug_cats") || manifest.has("aug_text")) {
                    augmented.emplace();
                    if (auto p = manifest.get("aug_cats")) {
                        augmented->extra_categories = load_embeddings(*p).values();
                    }
                    if (auto p = manifest.get("aug_text")) {
                        augmented->extra_texts = load_embeddings(*p).values();
                    }
                    config.n_augmented_categories = augmented->extra_categories.rows();
                    config.n_augmented_texts = augmented->extra_texts.rows();
                }
                report.algorithm = "refine-dual";
                report.result = refine_dual(data.docs, data.categories, config, augmented);
            }
            report.config = config;
            add_metrics(report, gold);
            write_report(report, output_path);
            return kExitOk;
        }

        if (single->parsed()) {
            const RefinementConfig config = resolve(single_flags);
            const Manifest manifest = Manifest::load(manifest_path);
            const ScoreMatrix scores = load_score_matrix(manifest.require("scores"));
            const auto cats = load_categories(manifest, false, skip_malformed);
            if (!cats.names.empty() && cats.names.size() != scores.k()) {
                throw Error(ErrorCode::DimensionMismatch, std::to_string(cats.names.size()) +
                                                              " category names for " + std::to_string(scores.k()) +
                                                              " score columns");
            }
            RefinementReport report;
            report.algorithm = "refine-single";
            report.config = config;
            report.category_names = cats.names;
            report.result = refine_single(scores, config);
            add_metrics(report, load_gold(manifest, cats.names, scores.k()));
            write_report(report, output_path);
            return kExitOk;
        }

        if (random->parsed()) {
            const RefinementConfig config = resolve(random_flags);
            const Manifest manifest = Manifest::load(manifest_path);
            const auto cats = load_categories(manifest, false, skip_malformed);
            const EmbeddingMatrix docs = load_embeddings(manifest.require("docs"));
            const std::size_t k = random_k > 0 ? random_k : cats.names.size();
            if (k == 0) {
                throw Error(ErrorCode::InvalidArgument, "pass --k or provide cats= in the manifest");
            }
            const auto clusters = cluster_random_init(docs, k, config.seed, config.metric, config.max_iters);

            PredictionReport report;
            report.algorithm = "cluster-random";
            std::string initial;
            for (std::size_t i = 0; i < clusters.initial_indices.size(); ++i) {
                initial += (i ? " " : "") + std::to_string(clusters.initial_indices[i]);
            }
            report.fields = {{"metric", std::string(to_string(config.metric))},
                             {"k", std::to_string(k)},
                             {"seed", std::to_string(config.seed)},
                             {"max_iters", std::to_string(config.max_iters)},
                             {"initial_indices", initial},
                             {"iterations_run", std::to_string(clusters.iterations_run)},
                             {"converged", clusters.converged ? "true" : "false"},
                             {"objective_per_iter", join(clusters.objective_per_iter)}};
            report.predictions = clusters.assignments;
            const auto gold = load_gold(manifest, cats.names, k);
            if (gold) {
                if (cats.names.size() == k) {
                    report.category_names = cats.names;
                }
                const auto before = one_to_one_accuracy(clusters.assignments_per_iter.front(), *gold, k);
                report.fields.emplace_back("initial_one_to_one_accuracy", format_double(before.accuracy));
            }
            add_metrics(report, gold, k);
            // Cluster ids are not category ids; plain accuracy is not meaningful here.
            report.accuracy.reset();
            report.category_names.clear();
            write_report(report, output_path);
            return kExitOk;
        }

        if (ens->parsed()) {
            std::vector<ScoreMatrix> runs;
            for (const auto& input : ensemble_inputs) {
                const std::string text = read_file(input);
                if (is_report(text)) {
                    runs.emplace_back(parse_refinement_report(text).result.final_distances, Polarity::LowerBetter);
                } else {
                    runs.push_back(load_score_matrix(input));
                }
            }
            PredictionReport report;
            report.algorithm = "ensemble";
            report.fields = {{"runs", std::to_string(runs.size())},
                             {"polarity", std::string(to_string(runs.front().polarity()))}};
            report.predictions = ensemble(runs);
            if (!optional_manifest.empty()) {
                const Manifest manifest = Manifest::load(optional_manifest);
                const auto cats = load_categories(manifest, false, skip_malformed);
                const std::size_t k = runs.front().k();
                if (cats.names.size() == k) {
                    report.category_names = cats.names;
                }
                add_metrics(report, load_gold(manifest, cats.names, k), k);
            }
            write_report(report, output_path);
            return kExitOk;
        }

        if (eval->parsed()) {
            const Manifest manifest = Manifest::load(manifest_path);
            const auto cats = load_categories(manifest, false, skip_malformed);
            if (cats.names.empty()) {
                throw Error(ErrorCode::InvalidArgument, "eval needs cats= to know the category count");
            }
            const std::size_t k = cats.names.size();
            PredictionReport report;
            report.algorithm = "eval";
            report.category_names = cats.names;
            report.predictions = load_predictions(predictions_path, cats.names, k);
            const auto gold = load_gold(manifest, cats.names, k);
            if (!gold) {
                throw Error(ErrorCode::InvalidArgument, "eval needs gold= in the manifest");
            }
            add_metrics(report, gold, k);
            write_report(report, output_path);
            return kExitOk;
        }

        if (sweep->parsed()) {
            const RefinementConfig config = resolve(sweep_flags);
            const Manifest manifest = Manifest::load(manifest_path);
            SweepSpec spec;
            if (!pools_path.empty()) {
                spec.synonym_pools = load_semicolon_lists(pools_path);
            }
            if (!label_sets_path.empty()) {
                spec.label_sets = load_semicolon_lists(label_sets_path);
            }
            spec.sample_count = sample_count;
            spec.seed = config.seed;
            const auto sets = generate_label_sets(spec);

            std::vector<std::string> all_names;
            for (const auto& set : sets) {
                all_names.insert(all_names.end(), set.names().begin(), set.names().end());
            }
            const auto table = load_table_for(manifest.require("vectors"), all_names, true, skip_malformed);
            const EmbeddingMatrix docs = load_embeddings(manifest.require("docs"));
            const auto cats = load_categories(manifest, false, skip_malformed);
            const std::size_t k = sets.front().k();
            const GoldLabels gold(load_labels(manifest.require("gold"), cats.names, k), k);

            const CategoryEncoder encoder = [&table](const CategorySet& names) {
                return encode_texts(names.names(), table);
            };
            const EvaluationReport report = run_sweep(docs, gold, spec, config, encoder, jobs);
            write_report(report, "sweep", config, output_path);
            if (!scatter_path.empty()) {
                write_scatter(report, scatter_path);
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitUsageError;
}

}  // namespace ulr::cli
