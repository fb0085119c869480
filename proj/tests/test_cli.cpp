#include "support.hpp"

#include "dxtrust/cli.hpp"
#include "dxtrust/text.hpp"
#include "dxtrust/jsonl.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace dxtrust;

namespace {

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    std::ostringstream out, err;
    int code = dispatch(args, out, err);
    if (out_text)
        *out_text = out.str();
    if (err_text)
        *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("unknown subcommands are usage errors")
{
    std::string err;
    CHECK(run({"frobnicate"}, nullptr, &err) == kExitUsage);
    CHECK(run({}) == kExitUsage);
    CHECK(run({"score", "--alpha"}) == kExitUsage);
    CHECK(run({"--help"}) == kExitOk);
}

TEST_CASE("kg validate")
{
    std::string out;
    CHECK(run({"kg", "validate"}, &out) == kExitOk);
    CHECK(out.find("entities") != std::string::npos);

    auto dir = dxtrust::test::scratch_dir("cli_kg");
    write_text_file(dir / "bad.jsonl", R"({"type":"entity","id":"d","name":"D","kind":"Disorder"})" "\n");
    std::string err;
    CHECK(run({"kg", "validate", "--kg", (dir / "bad.jsonl").string()}, nullptr, &err) == kExitValidation);
    CHECK_FALSE(err.empty());
    write_text_file(dir / "junk.jsonl", "{{{\n");
    CHECK(run({"kg", "validate", "--kg", (dir / "junk.jsonl").string()}) == kExitValidation);
    CHECK(run({"kg", "validate", "--kg", (dir / "missing.jsonl").string()}) != kExitOk);
}

TEST_CASE("diagnose writes hypotheses and a manifest")
{
    auto dir = dxtrust::test::scratch_dir("cli_diag");
    const auto& corpus = dxtrust::test::shipped_corpus();
    std::vector<Dialogue> subset(corpus.begin(), corpus.begin() + 3);
    write_text_file(dir / "corpus.jsonl", serialize_dialogues(subset));

    auto out = dir / "hyps.jsonl";
    CHECK(run({"diagnose", "--mode", "egdr", "--corpus", (dir / "corpus.jsonl").string(), "--out", out.string(),
               "--max-concurrency", "2"}) == kExitOk);
    auto lines = split_lines(read_text_file(out));
    CHECK(lines.size() == 3);
    auto manifest = json::parse(read_text_file(out.string() + ".manifest.json"));
    CHECK(manifest["command"] == "diagnose");
    CHECK(manifest["counts"]["processed"] == 3);
    CHECK(manifest["counts"]["failed"] == 0);

    auto scores = dir / "scores.jsonl";
    CHECK(run({"score", "--hypotheses", out.string(), "--out", scores.string()}) == kExitOk);
    CHECK(split_lines(read_text_file(scores)).size() == 3);

    // Script misses are per-item failures.
    CHECK(run({"diagnose", "--mode", "egdr", "--corpus", (dir / "corpus.jsonl").string(), "--out",
               (dir / "miss.jsonl").string(), "--seed", "17"}) == kExitRuntime);
    auto miss = json::parse(read_text_file((dir / "miss.jsonl").string() + ".manifest.json"));
    CHECK(miss["counts"]["failed"] == 3);

    CHECK(run({"diagnose", "--mode", "oracle", "--corpus", (dir / "corpus.jsonl").string(), "--out",
               (dir / "x.jsonl").string()}) == kExitUsage);
    CHECK(run({"score", "--hypotheses", out.string(), "--out", scores.string(), "--alpha", "1.5"}) ==
          kExitUsage);
}
