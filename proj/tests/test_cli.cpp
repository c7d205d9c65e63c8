#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xlmap/cli.hpp"
#include "xlmap/embed_io.hpp"
#include "xlmap/fixtures.hpp"
#include "xlmap/pair_extract.hpp"

namespace fs = std::filesystem;
using namespace xlmap;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("xlmap_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"eval-sim", "--model"}).code == 2);
    CHECK(run({"eval-sim", "--model", "m", "--dataset", "d", "--bogus"}).code == 2);
    CHECK(run({"gen-fixture", "--out", "x"}).code == 2);
    CHECK(run({"fit", "--pairs", "p", "--src-model", "a", "--tgt-model", "b", "--out", "o", "--solver", "lsqr"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("data errors exit with 1 and name the path") {
    auto r = run({"eval-sim", "--model", "/nonexistent/model.vec", "--dataset", "/nonexistent/ds.txt"});
    CHECK(r.code == 1);
    CHECK(r.err.find("/nonexistent/model.vec") != std::string::npos);

    TempDir dir("bad");
    write(dir / "bad.vec", "1 2\na 1 2 3\n");
    auto b = run({"transform", "--map", dir / "bad.vec", "--model", dir / "bad.vec", "--out", dir / "o"});
    CHECK(b.code == 1);
}

TEST_CASE("eval-sim on a perfect-ranking model prints 100.0") {
    TempDir dir("sim");
    write(dir / "m.vec", "4 2\nc0 1 0\nc1 0.9 0.1\nc2 0.5 0.5\nc3 0 1\n");
    write(dir / "ds.txt", "c0 c1 9\nc0 c2 5\nc0 c3 1\n");
    auto r = run({"eval-sim", "--model", dir / "m.vec", "--dataset", dir / "ds.txt"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("score: 100.0\n") != std::string::npos);

    auto j = run({"--report", "json", "eval-sim", "--model", dir / "m.vec", "--dataset", dir / "ds.txt"});
    REQUIRE(j.code == 0);
    auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["score"].get<double>() == 100.0);
    CHECK(parsed["evaluated"].get<int>() == 3);
}

TEST_CASE("fit then transform with identity pairs reproduces the model") {
    TempDir dir("ident");
    fixtures::Rng rng(3);
    const auto m = fixtures::random_model("w", 40, 8, rng);
    save_text_model_file(m, dir / "m.vec");
    std::ofstream(dir / "pairs.tsv") << [&] {
        std::ostringstream s;
        for (const auto& w : m.words()) s << w << '\t' << w << "\t1000\t1\n";
        return s.str();
    }();
    REQUIRE(run({"fit", "--pairs", dir / "pairs.tsv", "--src-model", dir / "m.vec", "--tgt-model", dir / "m.vec",
                 "--out", dir / "map.txt"})
                .code == 0);
    REQUIRE(run({"transform", "--map", dir / "map.txt", "--model", dir / "m.vec", "--out", dir / "t.vec"}).code == 0);
    const auto t = load_text_model_file(dir / "t.vec").model;
    CHECK(t.words() == m.words());
    CHECK((t.matrix() - m.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("gen-fixture, align and extract-pairs produce thresholded pairs") {
    TempDir dir("pipe");
    REQUIRE(run({"gen-fixture", "--seed", "5", "--out", dir / "fx", "--sentences", "4000", "--vocab", "30"}).code == 0);
    const std::string fx = dir / "fx";
    REQUIRE(run({"align", "--src", fx + "/corpus.src", "--tgt", fx + "/corpus.tgt", "--out", dir / "a.align"}).code == 0);
    auto r = run({"extract-pairs", "--src", fx + "/corpus.src", "--tgt", fx + "/corpus.tgt", "--align",
                  dir / "a.align", "--out", dir / "pairs.tsv"});
    REQUIRE(r.code == 0);
    const auto pairs = read_pairs_file(dir / "pairs.tsv");
    REQUIRE_FALSE(pairs.empty());
    const auto corpus = read_parallel_corpus_files(fx + "/corpus.src", fx + "/corpus.tgt");
    const auto freqs = corpus_frequencies(corpus);
    for (const auto& p : pairs) {
        CHECK(p.count >= 25);
        CHECK(p.fraction >= 0.5);
        CHECK(freqs.src.at(p.src) >= 500);
        CHECK(freqs.tgt.at(p.tgt) >= 500);
    }

    // gold alignments go through the same path
    CHECK(run({"extract-pairs", "--src", fx + "/corpus.src", "--tgt", fx + "/corpus.tgt", "--align",
               fx + "/gold.align", "--out", dir / "gold.tsv", "--min-freq", "0"})
              .code == 0);
}

TEST_CASE("same-language merge pipeline") {
    TempDir dir("merge");
    REQUIRE(run({"gen-fixture", "--seed", "9", "--out", dir / "fx", "--sentences", "100"}).code == 0);
    const std::string fx = dir / "fx";
    REQUIRE(run({"extract-pairs", "--model-a", fx + "/donor.vec", "--model-b", fx + "/base.vec", "--freqs",
                 fx + "/freqs.txt", "--out", dir / "shared.tsv"})
                .code == 0);
    REQUIRE(run({"fit", "--pairs", dir / "shared.tsv", "--src-model", fx + "/donor.vec", "--tgt-model",
                 fx + "/base.vec", "--out", dir / "map.txt"})
                .code == 0);
    auto m = run({"merge", "--base", fx + "/base.vec", "--donor", fx + "/donor.vec", "--map", dir / "map.txt", "--out",
                  dir / "merged.vec"});
    REQUIRE(m.code == 0);
    CHECK(fs::exists(dir / "merged.vec.imported"));
    auto a = run({"--report", "json", "eval-analogy", "--model", dir / "merged.vec", "--dataset", fx + "/analogy.txt"});
    REQUIRE(a.code == 0);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["cossum_unseen_words"].get<int>() == 0);
    CHECK(j["epsilon"].get<double>() == 0.001);

    CHECK(run({"extract-pairs", "--model-a", fx + "/donor.vec", "--model-b", fx + "/base.vec", "--out",
               dir / "x.tsv"})
              .code == 2);
}
