// Regenerates the committed stub scripts and scoring fixtures.
//
//   dxtrust-scriptgen --mode egdr --corpus data/corpus/synthetic.jsonl --out data/stub/egdr_v1.jsonl
//   dxtrust-scriptgen --mode fig5 --out data/fixtures/fig5_script.jsonl

#include "fixture_responder.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/templates.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace dxtrust;

int main(int argc, char** argv)
{
    std::string mode = "egdr", corpus_path, out, hypothesis_out;
    std::string kg_path = (default_data_root() / "kg" / "dsm5_depressive.jsonl").string();
    std::string criteria_path = (default_data_root() / "criteria" / "dsm5_criteria.jsonl").string();
    bool flawed = false;
    CLI::App app{"Stub script generator"};
    app.add_option("--mode", mode, "egdr, direct, cot or fig5");
    app.add_option("--corpus", corpus_path);
    app.add_option("--kg", kg_path);
    app.add_option("--criteria", criteria_path);
    app.add_option("--out", out)->required();
    app.add_option("--hypothesis-out", hypothesis_out, "fig5: also write the hypothesis record");
    app.add_flag("--flawed", flawed, "Baselines overcall below-threshold cases");
    CLI11_PARSE(app, argc, argv);

    try {
        KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path));
        CriteriaMap criteria = load_criteria(std::filesystem::path(criteria_path), kg);
        TemplateSet templates = TemplateSet::load(default_template_root(), "v1");
        if (mode == "fig5") {
            ScoringConfig config;
            config.lambda = 0.5;
            auto fx = fixtures::build_fig5_fixture(kg, criteria, templates, config, 0.582);
            write_text_file(out, serialize_script(fx.script));
            if (!hypothesis_out.empty())
                write_text_file(hypothesis_out, to_jsonl({to_json(fixtures::fig5_hypothesis())}));
            std::cout << "kas " << fx.report.kas << " lcs " << fx.report.lcs << " dcs " << fx.report.dcs << "\n";
            for (std::size_t i = 0; i < fx.labels.size(); ++i)
                std::cout << "  " << to_string(fx.labels[i]) << "  tms " << fx.report.claims[i].tms << "  "
                          << fx.report.claims[i].text << "\n";
            return 0;
        }
        auto m = parse_prompting_mode(mode);
        if (!m) {
            std::cerr << "unknown mode " << mode << "\n";
            return 64;
        }
        auto corpus = load_dialogues(std::filesystem::path(corpus_path));
        auto script = fixtures::generate_script(corpus, *m, kg, criteria, templates, EgdrConfig{"gpt-4o-mini", 0, 1024},
                                                flawed);
        write_text_file(out, serialize_script(script));
        std::cout << script.size() << " responses\n";
    } catch (const Error& e) {
        std::cerr << e.describe() << "\n";
        return 2;
    }
    return 0;
}
