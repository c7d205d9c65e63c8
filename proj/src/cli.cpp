#include "xlmap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <utility>
#include <variant>

#include "text_util.hpp"
#include "xlmap/aligner.hpp"
#include "xlmap/embed_io.hpp"
#include "xlmap/evalkit.hpp"
#include "xlmap/fixtures.hpp"
#include "xlmap/linmap.hpp"
#include "xlmap/model_merge.hpp"
#include "xlmap/pair_extract.hpp"

namespace xlmap::cli {

namespace {

// Ordered key/value report, rendered as "key: value" lines or one JSON object.
class Report {
   public:
    using Value = std::variant<std::string, std::int64_t, double, bool>;

    template <typename T>
    void set(std::string key, const T& v) {
        if constexpr (std::is_same_v<T, bool>) {
            fields_.emplace_back(std::move(key), v);
        } else if constexpr (std::is_floating_point_v<T>) {
            fields_.emplace_back(std::move(key), static_cast<double>(v));
        } else if constexpr (std::is_integral_v<T>) {
            fields_.emplace_back(std::move(key), static_cast<std::int64_t>(v));
        } else {
            fields_.emplace_back(std::move(key), std::string(v));
        }
    }

    void render(std::ostream& out, bool json) const {
        if (json) {
            nlohmann::ordered_json j = nlohmann::ordered_json::object();
            for (const auto& [k, v] : fields_) std::visit([&](const auto& x) { j[k] = x; }, v);
            out << j.dump() << '\n';
            return;
        }
        for (const auto& [k, v] : fields_) {
            out << k << ": ";
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, double>) {
                        std::string s = detail::format_double(x);
                        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
                        out << s;
                    } else if constexpr (std::is_same_v<T, bool>) {
                        out << (x ? "true" : "false");
                    } else {
                        out << x;
                    }
                },
                v);
            out << '\n';
        }
    }

   private:
    std::vector<std::pair<std::string, Value>> fields_;
};

struct CorpusArgs {
    std::string src, tgt, joined;

    void add_to(CLI::App* cmd) {
        auto* s = cmd->add_option("--src", src, "source side of the parallel corpus, one sentence per line");
        auto* t = cmd->add_option("--tgt", tgt, "target side of the parallel corpus");
        auto* c = cmd->add_option("--corpus", joined, "single file with 'source ||| target' lines");
        s->needs(t);
        t->needs(s);
        c->excludes(s)->excludes(t);
    }

    Corpus load() const {
        if (!joined.empty()) return read_joined_corpus_file(joined);
        if (src.empty()) throw CLI::RequiredError("--src/--tgt or --corpus");
        return read_parallel_corpus_files(src, tgt);
    }
};

VocabModel load_model(const std::string& path, std::ostream& err) {
    auto loaded = load_text_model_file(path);
    if (!loaded.duplicates.empty()) {
        err << "warning: " << path << ": " << loaded.duplicates.size()
            << " duplicate tokens ignored (first occurrence kept)\n";
    }
    return std::move(loaded.model);
}

void add_eval_fields(Report& r, const std::string& prefix, const EvalReport& e) {
    r.set(prefix + "score", e.score);
    r.set(prefix + "evaluated", e.evaluated);
    r.set(prefix + "skipped_items", e.skipped_items);
    r.set(prefix + "unseen_words", e.unseen_words);
    r.set(prefix + "oov_slots", e.oov_slots);
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
    auto out = detail::open_out(path);
    fn(out);
    out.flush();
    if (!out) throw IoError("write failure on '" + path + "'");
}

void write_similarity(const SimilarityDataset& ds, std::ostream& out) {
    for (const auto& it : ds.items) out << it.w1 << '\t' << it.w2 << '\t' << detail::format_double(it.human) << '\n';
}

void write_analogy(const AnalogyDataset& ds, std::ostream& out) {
    for (const auto& it : ds.items) out << it.a << ' ' << it.a_star << ' ' << it.b << ' ' << it.b_star << '\n';
}

void write_frequencies(const FrequencyTable& freqs, const std::vector<std::string>& order, std::ostream& out) {
    for (const auto& w : order) {
        if (auto it = freqs.find(w); it != freqs.end()) out << w << ' ' << it->second << '\n';
    }
}

void write_sentences(const Corpus& corpus, bool source, std::ostream& out) {
    for (const auto& p : corpus) {
        const auto& toks = source ? p.src : p.tgt;
        for (std::size_t i = 0; i < toks.size(); ++i) out << (i ? " " : "") << toks[i];
        out << '\n';
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learn and apply linear maps between word-embedding spaces", "xlmap"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string report_format = "text";
    app.add_option("--report", report_format, "report encoding")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // --- align -------------------------------------------------------------
    auto* align = app.add_subcommand("align", "word-align a parallel corpus with IBM Model 1 in both directions");
    CorpusArgs align_corpus_args;
    align_corpus_args.add_to(align);
    std::string align_out;
    std::string sym = "union";
    int iterations = 5;
    std::size_t max_len = kDefaultMaxSentenceLength;
    align->add_option("--out", align_out, "alignment file to write ('i-j' per line)")->required();
    align->add_option("--sym", sym, "symmetrization")->check(CLI::IsMember({"union", "intersection"}))->capture_default_str();
    align->add_option("--iterations", iterations, "EM iterations")->check(CLI::PositiveNumber)->capture_default_str();
    align->add_option("--max-len", max_len, "skip sentence pairs longer than this")->capture_default_str();

    // --- extract-pairs -----------------------------------------------------
    auto* extract = app.add_subcommand("extract-pairs", "extract one-to-one translation pairs from alignments");
    CorpusArgs extract_corpus_args;
    extract_corpus_args.add_to(extract);
    std::string align_in, pairs_out, src_freqs_path, tgt_freqs_path, freq_side = "both";
    std::string model_a_path, model_b_path, shared_freqs_path;
    std::uint64_t min_count = kDefaultMinCount;
    double min_fraction = kDefaultMinFraction;
    std::uint64_t min_freq = kDefaultMinFreq;
    extract->add_option("--align", align_in, "alignment file parallel to the corpus");
    extract->add_option("--out", pairs_out, "pairs TSV to write")->required();
    extract->add_option("--min-count", min_count, "minimum alignment count (inclusive)")->capture_default_str();
    extract->add_option("--min-fraction", min_fraction, "minimum fraction of the source word's links (inclusive)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    extract->add_option("--min-freq", min_freq, "minimum corpus frequency (inclusive)")->capture_default_str();
    extract->add_option("--src-freqs", src_freqs_path, "source frequency list 'token count' (default: corpus counts)");
    extract->add_option("--tgt-freqs", tgt_freqs_path, "target frequency list 'token count' (default: corpus counts)");
    extract->add_option("--freq-side", freq_side, "which words must pass --min-freq")
        ->check(CLI::IsMember({"both", "source", "target"}))
        ->capture_default_str();
    auto* ma = extract->add_option("--model-a", model_a_path, "same-language mode: first model");
    auto* mb = extract->add_option("--model-b", model_b_path, "same-language mode: second model");
    extract->add_option("--freqs", shared_freqs_path, "same-language mode: reference frequency list");
    ma->needs(mb);
    mb->needs(ma);

    // --- fit ---------------------------------------------------------------
    auto* fitcmd = app.add_subcommand("fit", "fit the transformation matrix from translation pairs");
    std::string fit_pairs, fit_src, fit_tgt, fit_out, solver_name = "pseudoinverse";
    std::optional<std::size_t> max_pairs;
    bool normalize = false;
    fitcmd->add_option("--pairs", fit_pairs, "pairs TSV")->required();
    fitcmd->add_option("--src-model", fit_src, "source-space embeddings")->required();
    fitcmd->add_option("--tgt-model", fit_tgt, "target-space embeddings")->required();
    fitcmd->add_option("--out", fit_out, "map file to write")->required();
    fitcmd->add_option("--solver", solver_name)->check(CLI::IsMember({"pseudoinverse", "normal_equations"}))->capture_default_str();
    fitcmd->add_option("--max-pairs", max_pairs, "use at most this many pairs (default: all)");
    fitcmd->add_flag("--normalize", normalize, "unit-normalize embeddings before fitting");

    // --- transform ---------------------------------------------------------
    auto* transform = app.add_subcommand("transform", "map every vector of a model through a fitted map");
    std::string tr_map, tr_model, tr_out;
    transform->add_option("--map", tr_map)->required();
    transform->add_option("--model", tr_model)->required();
    transform->add_option("--out", tr_out)->required();

    // --- merge -------------------------------------------------------------
    auto* merge = app.add_subcommand("merge", "import mapped donor vectors for words missing from a base model");
    std::string mg_base, mg_donor, mg_map, mg_out, mg_imported;
    merge->add_option("--base", mg_base)->required();
    merge->add_option("--donor", mg_donor)->required();
    merge->add_option("--map", mg_map, "donor -> base map")->required();
    merge->add_option("--out", mg_out)->required();
    merge->add_option("--imported-out", mg_imported, "imported token list (default: <out>.imported)");

    // --- eval-sim ----------------------------------------------------------
    auto* evsim = app.add_subcommand("eval-sim", "Spearman rho x 100 on a word-similarity dataset");
    std::string es_model, es_data;
    evsim->add_option("--model", es_model)->required();
    evsim->add_option("--dataset", es_data)->required();

    // --- eval-sim-translated -----------------------------------------------
    auto* evtr = app.add_subcommand("eval-sim-translated",
                                    "score a target-language dataset with mapped source-language vectors");
    std::string et_src, et_map, et_table, et_data;
    evtr->add_option("--src-model", et_src)->required();
    evtr->add_option("--map", et_map, "source -> target map")->required();
    evtr->add_option("--table", et_table, "translation table 'target<TAB>source'")->required();
    evtr->add_option("--dataset", et_data)->required();

    // --- eval-analogy ------------------------------------------------------
    auto* evan = app.add_subcommand("eval-analogy", "CosSum and CosMul analogy accuracy");
    std::string ea_model, ea_data;
    double epsilon = kDefaultCosMulEpsilon;
    evan->add_option("--model", ea_model)->required();
    evan->add_option("--dataset", ea_data)->required();
    evan->add_option("--epsilon", epsilon, "CosMul denominator offset")->check(CLI::PositiveNumber)->capture_default_str();

    // --- gen-fixture -------------------------------------------------------
    auto* gen = app.add_subcommand("gen-fixture", "write seeded synthetic models, corpora and datasets");
    std::uint64_t seed = 0;
    std::string gen_out;
    int gen_dim = 10;
    std::size_t gen_sentences = 20000, gen_vocab = 60;
    gen->add_option("--seed", seed)->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--dim", gen_dim)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--sentences", gen_sentences)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--vocab", gen_vocab)->check(CLI::Range(std::size_t{2}, std::size_t{100000}))->capture_default_str();

    std::vector<const char*> argv{"xlmap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    Report report;
    try {
        if (*align) {
            const Corpus corpus = align_corpus_args.load();
            Model1Options opts{iterations, max_len};
            auto fwd = train_model1(corpus, opts);
            auto rev = train_model1(reversed(corpus), opts);
            const auto links = align_corpus(corpus, fwd.table, rev.table, parse_symmetrization(sym), max_len);
            write_file(align_out, [&](std::ostream& o) { write_alignments(links, o); });
            std::size_t n_links = 0;
            for (const auto& l : links) n_links += l.size();
            report.set("command", "align");
            report.set("sentences", corpus.size());
            report.set("skipped_sentences", fwd.skipped_pairs);
            report.set("links", n_links);
            report.set("symmetrization", sym);
            report.set("forward_log_likelihood", fwd.log_likelihood.back());
            report.set("reverse_log_likelihood", rev.log_likelihood.back());
        } else if (*extract) {
            std::vector<TranslationPair> pairs;
            report.set("command", "extract-pairs");
            if (!model_a_path.empty()) {
                if (shared_freqs_path.empty()) throw CLI::RequiredError("--freqs");
                const auto a = load_model(model_a_path, err);
                const auto b = load_model(model_b_path, err);
                pairs = shared_vocab_pairs(a, b, read_frequency_table_file(shared_freqs_path), min_freq);
                report.set("mode", "shared-vocabulary");
            } else {
                if (align_in.empty()) throw CLI::RequiredError("--align");
                const Corpus corpus = extract_corpus_args.load();
                const auto counted = accumulate_counts(corpus, parse_alignment_file(align_in));
                for (const auto& bad : counted.out_of_range) {
                    err << "warning: sentence " << bad.sentence + 1 << ": link " << bad.link.first << '-'
                        << bad.link.second << " out of range, skipped\n";
                }
                auto freqs = corpus_frequencies(corpus);
                if (!src_freqs_path.empty()) freqs.src = read_frequency_table_file(src_freqs_path);
                if (!tgt_freqs_path.empty()) freqs.tgt = read_frequency_table_file(tgt_freqs_path);
                const auto extracted = extract_pairs(counted.counts, min_count, min_fraction);
                pairs = filter_by_frequency(extracted, freqs.src, freqs.tgt, min_freq, parse_frequency_side(freq_side));
                report.set("mode", "bilingual");
                report.set("source_types", counted.counts.counts.size());
                report.set("one_to_one_pairs", extracted.size());
                report.set("out_of_range_links", counted.out_of_range.size());
                report.set("min_count", static_cast<std::int64_t>(min_count));
                report.set("min_fraction", min_fraction);
            }
            report.set("min_freq", static_cast<std::int64_t>(min_freq));
            report.set("pairs", pairs.size());
            write_file(pairs_out, [&](std::ostream& o) { write_pairs(pairs, o); });
        } else if (*fitcmd) {
            const auto pairs = read_pairs_file(fit_pairs);
            const auto src = load_model(fit_src, err);
            const auto tgt = load_model(fit_tgt, err);
            const auto pm = build_matrices(pairs, src, tgt, BuildOptions{max_pairs, normalize});
            const auto map = fit(pm, parse_solver(solver_name));
            if (map.rank_deficient()) {
                err << "warning: A has numerical rank " << *map.rank << " < source dim " << map.source_dim() << '\n';
            }
            save_map_file(map, fit_out);
            report.set("command", "fit");
            report.set("solver", to_string(map.solver));
            report.set("pairs_used", pm.used.size());
            report.set("pairs_skipped_oov", pm.skipped.size());
            report.set("source_dim", static_cast<std::int64_t>(map.source_dim()));
            report.set("target_dim", static_cast<std::int64_t>(map.target_dim()));
            report.set("rank", map.rank.value_or(-1));
            report.set("fit_residual", map.fit_residual);
        } else if (*transform) {
            const auto map = load_map_file(tr_map);
            const auto model = load_model(tr_model, err);
            save_text_model_file(transform_model(map, model), tr_out);
            report.set("command", "transform");
            report.set("words", model.size());
            report.set("dim", static_cast<std::int64_t>(map.target_dim()));
        } else if (*merge) {
            const auto base = load_model(mg_base, err);
            const auto donor = load_model(mg_donor, err);
            const auto map = load_map_file(mg_map);
            const auto merged = import_missing(base, donor, map);
            save_text_model_file(merged.merged, mg_out);
            const std::string imported_path = mg_imported.empty() ? mg_out + ".imported" : mg_imported;
            write_file(imported_path, [&](std::ostream& o) { write_token_list(merged.imported, o); });
            report.set("command", "merge");
            report.set("base_words", base.size());
            report.set("imported", merged.imported.size());
            report.set("merged_words", merged.merged.size());
        } else if (*evsim) {
            const auto model = load_model(es_model, err);
            report.set("command", "eval-sim");
            add_eval_fields(report, "", eval_similarity(model, read_similarity_dataset_file(es_data)));
        } else if (*evtr) {
            const auto src = load_model(et_src, err);
            const auto map = load_map_file(et_map);
            const auto table = read_translation_table_file(et_table);
            report.set("command", "eval-sim-translated");
            add_eval_fields(report, "",
                            eval_similarity_translated(src, map, table, read_similarity_dataset_file(et_data)));
        } else if (*evan) {
            const auto model = load_model(ea_model, err);
            const auto r = eval_analogy(model, read_analogy_dataset_file(ea_data), epsilon);
            report.set("command", "eval-analogy");
            report.set("epsilon", epsilon);
            add_eval_fields(report, "cossum_", r.cossum);
            add_eval_fields(report, "cosmul_", r.cosmul);
        } else if (*gen) {
            namespace fs = std::filesystem;
            fs::create_directories(gen_out);
            auto path = [&](const char* name) { return (fs::path(gen_out) / name).string(); };

            fixtures::ParallelCorpusSpec spec;
            spec.sentences = gen_sentences;
            spec.vocab = gen_vocab;
            spec.min_len = 8;
            spec.max_len = 24;
            spec.zipf_exponent = 0.5;
            const auto bi = fixtures::make_bilingual_fixture(spec, gen_dim, seed);
            write_file(path("corpus.src"), [&](std::ostream& o) { write_sentences(bi.parallel.corpus, true, o); });
            write_file(path("corpus.tgt"), [&](std::ostream& o) { write_sentences(bi.parallel.corpus, false, o); });
            write_file(path("gold.align"), [&](std::ostream& o) { write_alignments(bi.parallel.links, o); });
            save_text_model_file(bi.src_model, path("src.vec"));
            save_text_model_file(bi.tgt_model, path("tgt.vec"));
            write_file(path("tgt.sim.txt"), [&](std::ostream& o) { write_similarity(bi.tgt_similarity, o); });
            write_file(path("table.tsv"), [&](std::ostream& o) {
                std::vector<std::string> keys;
                for (const auto& [k, v] : bi.table.entries) keys.push_back(k);
                std::sort(keys.begin(), keys.end());
                for (const auto& k : keys) o << k << '\t' << bi.table.entries.at(k) << '\n';
            });

            fixtures::MergeFixtureSpec mspec;
            mspec.dim = gen_dim;
            const auto mf = fixtures::make_merge_fixture(mspec, seed + 1);
            save_text_model_file(mf.base, path("base.vec"));
            save_text_model_file(mf.donor, path("donor.vec"));
            write_file(path("freqs.txt"), [&](std::ostream& o) { write_frequencies(mf.freqs, mf.truth.words(), o); });
            write_file(path("sim.txt"), [&](std::ostream& o) { write_similarity(mf.similarity, o); });
            write_file(path("analogy.txt"), [&](std::ostream& o) { write_analogy(mf.analogy, o); });

            report.set("command", "gen-fixture");
            report.set("seed", static_cast<std::int64_t>(seed));
            report.set("dim", gen_dim);
            report.set("sentences", bi.parallel.corpus.size());
            report.set("source_words", bi.src_model.size());
            report.set("target_words", bi.tgt_model.size());
            report.set("base_words", mf.base.size());
            report.set("donor_words", mf.donor.size());
        }
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    report.render(out, report_format == "json");
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace xlmap::cli
