#include "dxtrust/cli.hpp"

#include "dxtrust/claims.hpp"
#include "dxtrust/confidence.hpp"
#include "dxtrust/criteria.hpp"
#include "dxtrust/datasets.hpp"
#include "dxtrust/egdr.hpp"
#include "dxtrust/errors.hpp"
#include "dxtrust/evalharness.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/kgstore.hpp"
#include "dxtrust/providers.hpp"
#include "dxtrust/templates.hpp"
#include "dxtrust/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

namespace dxtrust {

namespace {

struct Options {
    std::string kg;
    std::string criteria;
    std::string corpus;
    std::string hypotheses;
    std::string scores;
    std::vector<std::string> results;
    std::string out;
    std::string mode = "egdr";
    std::string provider;
    std::string script;
    std::string model = "gpt-4o-mini";
    std::string embedder = "local";
    std::string embed_model = "text-embedding-3-small";
    std::string template_version = "v1";
    std::string templates_dir;
    std::string formats = "json,csv,svg";
    std::string alphas = "0,0.25,0.5,0.75,1";
    std::string lambdas = "0,0.25,0.5,0.75,1";
    double alpha = 0.5;
    double lambda = 0.75;
    int budget = kDefaultRetrievalBudget;
    int retry_limit = 3;
    std::uint64_t seed = 0;
    int max_concurrency = 4;
    bool kas_mean = false;
};

std::string utc_now()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split_csv(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

std::vector<double> parse_grid(const std::string& s, const char* flag)
{
    std::vector<double> out;
    for (const auto& item : split_csv(s)) {
        try {
            std::size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError(std::string(flag) + ": not a number: " + item);
        }
    }
    if (out.empty())
        throw UsageError(std::string(flag) + " needs at least one value");
    return out;
}

/// Invocation record written beside every output.
class Manifest {
public:
    Manifest(std::string command, const Options& o) : command_(std::move(command)), started_(utc_now())
    {
        config_ = json{{"alpha", o.alpha},
                       {"lambda", o.lambda},
                       {"budget", o.budget},
                       {"seed", o.seed},
                       {"template_version", o.template_version},
                       {"model", o.model},
                       {"max_concurrency", o.max_concurrency}};
    }

    void set(const std::string& key, json value) { config_[key] = std::move(value); }
    void input(const std::string& key, const std::string& path) { inputs_[key] = path; }
    void output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }
    void processed(std::size_t n) { processed_ = n; }
    void fail(const std::string& item, const std::string& message)
    {
        failures_.push_back(json{{"item", item}, {"error", message}});
    }
    std::size_t failed() const { return failures_.size(); }

    void write(const std::filesystem::path& path) const
    {
        json j{{"command", command_},
               {"config", config_},
               {"inputs", inputs_},
               {"outputs", outputs_},
               {"started_at", started_},
               {"finished_at", utc_now()},
               {"counts", json{{"processed", processed_}, {"failed", failures_.size()},
                               {"total", processed_ + failures_.size()}}},
               {"failures", failures_}};
        write_text_file(path, j.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string started_;
    json config_ = json::object();
    json inputs_ = json::object();
    std::vector<std::string> outputs_;
    std::size_t processed_ = 0;
    json failures_ = json::array();
};

std::filesystem::path manifest_beside(const std::filesystem::path& out)
{
    return out.string() + ".manifest.json";
}

std::string kg_path(const Options& o)
{
    return o.kg.empty() ? (default_data_root() / "kg" / "dsm5_depressive.jsonl").string() : o.kg;
}

std::string criteria_path(const Options& o)
{
    return o.criteria.empty() ? (default_data_root() / "criteria" / "dsm5_criteria.jsonl").string() : o.criteria;
}

TemplateSet load_templates(const Options& o)
{
    std::filesystem::path root = o.templates_dir.empty() ? default_template_root() : std::filesystem::path(o.templates_dir);
    return TemplateSet::load(root, o.template_version);
}

void require(const std::string& value, const char* flag)
{
    if (value.empty())
        throw UsageError(std::string(flag) + " is required");
}

/// `default_script` is used by the stub when --script is not given.
std::unique_ptr<ChatProvider> make_provider(const Options& o, const std::string& fallback,
                                            const std::string& default_script = {})
{
    std::string kind = o.provider.empty() ? fallback : o.provider;
    if (kind == "none")
        return nullptr;
    if (kind == "stub") {
        std::string script = o.script.empty() ? default_script : o.script;
        require(script, "--script");
        return std::make_unique<StubChatProvider>(StubChatProvider::from_file(script));
    }
    if (kind == "remote") {
        ProviderEnvironment env = provider_environment();
        if (env.api_key.empty())
            throw ProviderFailure(0, "LLM_API_KEY is not set");
        RetryPolicy policy;
        policy.max_retries = o.retry_limit;
        return std::make_unique<RemoteChatProvider>(make_http_transport(env.base_url), env.api_key, policy);
    }
    throw UsageError("--provider must be none, stub or remote");
}

std::unique_ptr<Embedder> make_embedder(const Options& o)
{
    if (o.embedder == "local")
        return std::make_unique<LocalHashEmbedder>();
    if (o.embedder == "remote") {
        ProviderEnvironment env = provider_environment();
        if (env.api_key.empty())
            throw ProviderFailure(0, "LLM_API_KEY is not set");
        RetryPolicy policy;
        policy.max_retries = o.retry_limit;
        return std::make_unique<RemoteEmbedder>(make_http_transport(env.embed_base_url.value_or(env.base_url)),
                                                env.api_key, o.embed_model, policy);
    }
    throw UsageError("--embedder must be local or remote");
}

/// Runs `work(i)` for i in [0, n) on up to `workers` threads.
template <typename Work>
void parallel_for(std::size_t n, int workers, Work work)
{
    std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < n; i = next++)
            work(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(loop);
    loop();
    for (auto& th : pool)
        th.join();
}

/// Per-item outcome collected by the workers; merged in input order.
struct ItemResult {
    std::optional<json> record;
    std::string error;
};

std::string describe(const std::exception& e)
{
    if (auto* err = dynamic_cast<const Error*>(&e))
        return err->describe();
    return e.what();
}

int finish_items(const std::vector<std::string>& ids, std::vector<ItemResult>& items, const std::string& out,
                 Manifest& manifest, std::ostream& err)
{
    std::vector<json> records;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].record)
            records.push_back(std::move(*items[i].record));
        else {
            manifest.fail(ids[i], items[i].error);
            err << ids[i] << ": " << items[i].error << "\n";
        }
    }
    manifest.processed(records.size());
    write_text_file(out, to_jsonl(records));
    manifest.output(out);
    manifest.write(manifest_beside(out));
    return manifest.failed() ? kExitRuntime : kExitOk;
}

// --- subcommands ------------------------------------------------------------

int cmd_kg_validate(const Options& o, std::ostream& out)
{
    KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path(o)));
    out << "entities " << kg.entities().size() << "\n";
    for (EntityKind k : {EntityKind::Disorder, EntityKind::Symptom, EntityKind::Criterion, EntityKind::Exclusion,
                         EntityKind::Specifier, EntityKind::Modifier})
        out << "  " << to_string(k) << " " << kg.entities_of_kind(k).size() << "\n";
    out << "triplets " << kg.triplets().size() << "\n";
    if (!o.criteria.empty()) {
        CriteriaMap c = load_criteria(std::filesystem::path(o.criteria), kg);
        out << "criteria " << c.size() << "\n";
    }
    return kExitOk;
}

int cmd_diagnose(const Options& o, std::ostream& err)
{
    require(o.corpus, "--corpus");
    require(o.out, "--out");
    auto mode = parse_prompting_mode(o.mode);
    if (!mode)
        throw UsageError("--mode must be egdr, direct or cot");
    KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path(o)));
    CriteriaMap criteria = load_criteria(std::filesystem::path(criteria_path(o)), kg);
    std::vector<Dialogue> corpus = load_dialogues(std::filesystem::path(o.corpus));
    TemplateSet templates = load_templates(o);
    const std::string shipped_script =
        (default_data_root() / "stub" / (to_lower_ascii(to_string(*mode)) + "_" + o.template_version + ".jsonl"))
            .string();
    auto provider = make_provider(o, "stub", shipped_script);
    if (!provider)
        throw UsageError("diagnose needs --provider stub or remote");

    Manifest manifest("diagnose", o);
    manifest.set("mode", std::string(to_string(*mode)));
    manifest.set("provider", provider->identity());
    if (provider->identity() == "stub")
        manifest.input("script", o.script.empty() ? shipped_script : o.script);
    manifest.input("corpus", o.corpus);
    manifest.input("kg", kg_path(o));
    manifest.input("criteria", criteria_path(o));

    EgdrContext ctx{kg, criteria, templates, *provider, EgdrConfig{o.model, o.seed, 1024}};
    std::vector<ItemResult> items(corpus.size());
    std::vector<std::string> ids;
    for (const auto& d : corpus)
        ids.push_back(d.id);
    parallel_for(corpus.size(), o.max_concurrency, [&](std::size_t i) {
        try {
            DiagnosticHypothesis h = *mode == PromptingMode::EGDR ? run_egdr(corpus[i], ctx)
                                                                  : run_baseline(corpus[i], ctx, *mode);
            items[i].record = to_json(h);
        } catch (const std::exception& e) {
            items[i].error = describe(e);
        }
    });
    return finish_items(ids, items, o.out, manifest, err);
}

int cmd_score(const Options& o, std::ostream& err)
{
    require(o.hypotheses, "--hypotheses");
    require(o.out, "--out");
    KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path(o)));
    CriteriaMap criteria = load_criteria(std::filesystem::path(criteria_path(o)), kg);
    std::vector<DiagnosticHypothesis> hyps = load_hypotheses(o.hypotheses);
    auto provider = make_provider(o, "none");
    std::optional<TemplateSet> templates;
    if (provider)
        templates = load_templates(o);
    auto base_embedder = make_embedder(o);
    CachingEmbedder embedder(*base_embedder);

    ScoringConfig config;
    config.alpha = o.alpha;
    config.lambda = o.lambda;
    config.retrieval_budget = o.budget;
    config.provider_retry_limit = o.retry_limit;
    config.seed = o.seed;
    config.kas_mean_normalized = o.kas_mean;
    config.model = o.model;
    config.validate();

    Manifest manifest("score", o);
    manifest.set("provider", provider ? provider->identity() : std::string("none"));
    manifest.set("embedder", embedder.identity());
    manifest.set("kas_mean_normalized", o.kas_mean);
    manifest.input("hypotheses", o.hypotheses);
    manifest.input("kg", kg_path(o));
    manifest.input("criteria", criteria_path(o));

    ScoringProviders providers{provider.get(), templates ? &*templates : nullptr, &embedder};
    std::vector<ItemResult> items(hyps.size());
    std::vector<std::string> ids;
    for (const auto& h : hyps)
        ids.push_back(h.dialogue_id);
    parallel_for(hyps.size(), o.max_concurrency, [&](std::size_t i) {
        try {
            items[i].record = to_json(score_reasoning(hyps[i], kg, criteria, config, providers));
        } catch (const std::exception& e) {
            items[i].error = describe(e);
        }
    });
    return finish_items(ids, items, o.out, manifest, err);
}

int cmd_label(const Options& o, std::ostream& err)
{
    require(o.corpus, "--corpus");
    require(o.out, "--out");
    KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path(o)));
    CriteriaMap criteria = load_criteria(std::filesystem::path(criteria_path(o)), kg);
    std::vector<Dialogue> corpus = load_dialogues(std::filesystem::path(o.corpus));
    auto provider = make_provider(o, "none");
    std::optional<TemplateSet> templates;
    if (provider)
        templates = load_templates(o);

    Manifest manifest("label", o);
    manifest.set("labeler", provider ? "direct:" + provider->identity() : std::string("rules"));
    manifest.input("corpus", o.corpus);
    manifest.input("kg", kg_path(o));
    manifest.input("criteria", criteria_path(o));

    std::vector<std::string> errors(corpus.size());
    parallel_for(corpus.size(), o.max_concurrency, [&](std::size_t i) {
        Dialogue& d = corpus[i];
        try {
            if (provider) {
                EgdrContext ctx{kg, criteria, *templates, *provider, EgdrConfig{o.model, o.seed, 1024}};
                d.silver_label = run_baseline(d, ctx, PromptingMode::Direct).final_diagnosis;
                return;
            }
            if (!d.gold)
                throw SchemaError(0, "gold", "dialogue " + d.id + " has no gold annotation");
            std::vector<std::string> unresolved;
            auto symptoms = resolve_surface_forms(kg, d.gold->symptoms, EntityKind::Symptom, &unresolved);
            auto exclusions = resolve_surface_forms(kg, d.gold->exclusions, EntityKind::Exclusion, &unresolved);
            if (!unresolved.empty())
                throw SchemaError(0, "gold", "unresolved entity '" + unresolved.front() + "' in " + d.id);
            d.silver_label = silver_label(criteria, kg, symptoms, exclusions, d.gold->duration_days);
        } catch (const std::exception& e) {
            errors[i] = describe(e);
        }
    });
    std::size_t processed = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (errors[i].empty()) {
            ++processed;
            continue;
        }
        manifest.fail(corpus[i].id, errors[i]);
        err << corpus[i].id << ": " << errors[i] << "\n";
    }
    manifest.processed(processed);
    write_text_file(o.out, serialize_dialogues(corpus));
    manifest.output(o.out);
    manifest.write(manifest_beside(o.out));
    return manifest.failed() ? kExitRuntime : kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out)
{
    require(o.corpus, "--corpus");
    require(o.hypotheses, "--hypotheses");
    require(o.out, "--out");
    KnowledgeGraph kg = load_kg(std::filesystem::path(kg_path(o)));
    CriteriaMap criteria = load_criteria(std::filesystem::path(criteria_path(o)), kg);
    std::vector<Dialogue> corpus = load_dialogues(std::filesystem::path(o.corpus));
    std::vector<DiagnosticHypothesis> hyps = load_hypotheses(o.hypotheses);
    std::vector<ConfidenceReport> scores;
    if (!o.scores.empty())
        scores = load_reports(o.scores);

    std::vector<std::string> labels{kNoDiagnosis};
    for (const auto& [d, c] : criteria)
        labels.push_back(d);

    auto records = join_predictions(corpus, hyps, scores);
    ReportResults results;
    results.metrics = compute_metrics(records, labels);
    results.subgroups = subgroup_accuracy(records);
    if (!o.scores.empty())
        results.dcs = dcs_by_correctness(records);

    Manifest manifest("eval", o);
    manifest.input("corpus", o.corpus);
    manifest.input("hypotheses", o.hypotheses);
    if (!o.scores.empty())
        manifest.input("scores", o.scores);
    write_text_file(o.out, to_json(results).dump(2) + "\n");
    manifest.output(o.out);
    manifest.processed(records.size());
    manifest.write(manifest_beside(o.out));

    const Metrics& m = *results.metrics;
    out << "records " << m.total << "\naccuracy " << format_fixed(m.accuracy, 4) << "\nprecision "
        << format_fixed(m.precision, 4) << "\nrecall " << format_fixed(m.recall, 4) << "\nf1 "
        << format_fixed(m.f1, 4) << " (support-weighted)\n";
    if (results.dcs)
        out << "mean dcs correct " << format_fixed(results.dcs->correct.mean, 4) << " (n=" << results.dcs->correct.count
            << "), incorrect " << format_fixed(results.dcs->incorrect.mean, 4) << " (n="
            << results.dcs->incorrect.count << ")\n";
    return kExitOk;
}

int cmd_ablate(const Options& o, std::ostream& out)
{
    require(o.scores, "--scores");
    require(o.out, "--out");
    auto alphas = parse_grid(o.alphas, "--alphas");
    auto lambdas = parse_grid(o.lambdas, "--lambdas");
    std::vector<ConfidenceReport> scores = load_reports(o.scores);
    AblationDefaults defaults{o.alpha, o.lambda, o.kas_mean};
    ReportResults results;
    results.ablation = ablation_sweep(scores, alphas, lambdas, defaults);

    Manifest manifest("ablate", o);
    manifest.set("alpha_grid", alphas);
    manifest.set("lambda_grid", lambdas);
    manifest.input("scores", o.scores);
    write_text_file(o.out, to_json(results).dump(2) + "\n");
    manifest.output(o.out);
    manifest.processed(scores.size());
    manifest.write(manifest_beside(o.out));

    for (const auto& a : results.ablation)
        out << a.parameter << "=" << format_fixed(a.value, 2) << " mean " << format_fixed(a.dcs.mean, 4) << " sd "
            << format_fixed(a.dcs.std_dev, 4) << "\n";
    return kExitOk;
}

int cmd_report(const Options& o)
{
    if (o.results.empty())
        throw UsageError("--results is required");
    require(o.out, "--out");
    ReportResults merged;
    Manifest manifest("report", o);
    for (std::size_t i = 0; i < o.results.size(); ++i) {
        ReportResults r = results_from_json(json::parse(read_text_file(o.results[i])));
        if (r.metrics)
            merged.metrics = r.metrics;
        if (r.dcs)
            merged.dcs = r.dcs;
        if (!r.subgroups.empty())
            merged.subgroups = r.subgroups;
        if (!r.ablation.empty())
            merged.ablation = r.ablation;
        manifest.input("results" + std::to_string(i), o.results[i]);
    }
    auto formats = split_csv(o.formats);
    manifest.set("formats", formats);
    for (const auto& p : emit_report(merged, o.out, formats))
        manifest.output(p);
    manifest.processed(o.results.size());
    manifest.write(std::filesystem::path(o.out) / "manifest.json");
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Knowledge-grounded diagnostic reasoning and confidence scoring", "dxtrust"};
    app.require_subcommand(1);

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--kg", o.kg, "Knowledge graph JSONL");
        sub->add_option("--criteria", o.criteria, "Diagnostic criteria JSONL");
        sub->add_option("--seed", o.seed, "Provider seed");
        sub->add_option("--model", o.model, "Model name sent to the provider");
        sub->add_option("--max-concurrency", o.max_concurrency, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto prompting = [&o](CLI::App* sub) {
        sub->add_option("--provider", o.provider, "none, stub or remote");
        sub->add_option("--script", o.script, "Stub response script (JSONL)");
        sub->add_option("--template-version", o.template_version, "Prompt template version");
        sub->add_option("--templates-dir", o.templates_dir, "Prompt template root");
        sub->add_option("--retry-limit", o.retry_limit, "Provider retries")->check(CLI::NonNegativeNumber);
    };

    CLI::App* kg = app.add_subcommand("kg", "Knowledge graph tools");
    kg->require_subcommand(1);
    CLI::App* validate = kg->add_subcommand("validate", "Load and integrity-check a knowledge graph");
    validate->add_option("--kg", o.kg, "Knowledge graph JSONL");
    validate->add_option("--criteria", o.criteria, "Also bind a criteria file");

    CLI::App* diagnose = app.add_subcommand("diagnose", "Run EGDR or a baseline over a corpus");
    common(diagnose);
    prompting(diagnose);
    diagnose->add_option("--mode", o.mode, "egdr, direct or cot");
    diagnose->add_option("--corpus", o.corpus, "Dialogue corpus JSONL");
    diagnose->add_option("--out", o.out, "Hypotheses JSONL");

    CLI::App* score = app.add_subcommand("score", "Compute KAS, LCS and DCS for hypotheses");
    common(score);
    prompting(score);
    score->add_option("--hypotheses", o.hypotheses, "Hypotheses JSONL");
    score->add_option("--out", o.out, "Scores JSONL");
    score->add_option("--alpha", o.alpha, "Similarity weight in TMS")->check(CLI::Range(0.0, 1.0));
    score->add_option("--lambda", o.lambda, "KAS weight in DCS")->check(CLI::Range(0.0, 1.0));
    score->add_option("--budget", o.budget, "Retrieval triplet budget")->check(CLI::NonNegativeNumber);
    score->add_option("--embedder", o.embedder, "local or remote");
    score->add_option("--embed-model", o.embed_model, "Remote embedding model");
    score->add_flag("--kas-mean", o.kas_mean, "Aggregate KAS over the mean claim weight");

    CLI::App* label = app.add_subcommand("label", "Attach silver labels to a corpus");
    common(label);
    prompting(label);
    label->add_option("--corpus", o.corpus, "Dialogue corpus JSONL");
    label->add_option("--out", o.out, "Labeled corpus JSONL");

    CLI::App* eval = app.add_subcommand("eval", "Classification metrics, subgroups and DCS by correctness");
    common(eval);
    eval->add_option("--corpus", o.corpus, "Labeled corpus JSONL");
    eval->add_option("--hypotheses", o.hypotheses, "Hypotheses JSONL");
    eval->add_option("--scores", o.scores, "Scores JSONL");
    eval->add_option("--out", o.out, "Results JSON");

    CLI::App* ablate = app.add_subcommand("ablate", "Sweep alpha and lambda over cached scores");
    ablate->add_option("--scores", o.scores, "Scores JSONL");
    ablate->add_option("--alphas", o.alphas, "Comma-separated alpha grid");
    ablate->add_option("--lambdas", o.lambdas, "Comma-separated lambda grid");
    ablate->add_option("--alpha", o.alpha, "Alpha used by the lambda rows' stored KAS")->check(CLI::Range(0.0, 1.0));
    ablate->add_option("--lambda", o.lambda, "Lambda used by the alpha rows")->check(CLI::Range(0.0, 1.0));
    ablate->add_flag("--kas-mean", o.kas_mean, "Aggregate KAS over the mean claim weight");
    ablate->add_option("--out", o.out, "Ablation JSON");

    CLI::App* report = app.add_subcommand("report", "Render results as JSON, CSV and SVG files");
    report->add_option("--results", o.results, "Results JSON (repeatable)");
    report->add_option("--formats", o.formats, "Subset of json,csv,svg");
    report->add_option("--out", o.out, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (validate->parsed())
            return cmd_kg_validate(o, out);
        if (diagnose->parsed())
            return cmd_diagnose(o, err);
        if (score->parsed())
            return cmd_score(o, err);
        if (label->parsed())
            return cmd_label(o, err);
        if (eval->parsed())
            return cmd_eval(o, out);
        if (ablate->parsed())
            return cmd_ablate(o, out);
        if (report->parsed())
            return cmd_report(o);
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.describe() << "\n";
        return kExitValidation;
    } catch (const IntegrityError& e) {
        err << "error: " << e.describe() << "\n";
        return kExitValidation;
    } catch (const SchemaError& e) {
        err << "error: " << e.describe() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        err << "error: " << e.describe() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int dispatch(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace dxtrust
