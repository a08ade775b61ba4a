#include "delib/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "delib/backend.hpp"
#include "delib/errors.hpp"
#include "delib/finetune.hpp"
#include "delib/fixtures.hpp"
#include "delib/io.hpp"
#include "delib/model.hpp"
#include "delib/orchestrator.hpp"
#include "delib/report.hpp"
#include "delib/scoring.hpp"
#include "delib/strings.hpp"

namespace delib {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_data_dir() {
    if (const char* env = std::getenv("DELIB_DATA_DIR")) return fs::path(env);
    return fs::path(".");
}

EvaluationModel model_from_arg(const std::string& arg, const fs::path& data_dir) {
    if (arg.empty() || arg == "default") {
        fs::path bundled = data_dir / "configs" / "default_model.json";
        if (fs::exists(bundled)) return load_model(read_file(bundled));
        return default_model();
    }
    return load_model(read_file(arg));
}

ConceptInput concept_from_file(const fs::path& path) {
    json doc = read_json_file(path);
    ConceptInput concept_input;
    try {
        concept_input.id = doc.contains("concept_id") ? doc.at("concept_id").get<std::string>()
                                                : doc.at("id").get<std::string>();
        concept_input.title = doc.at("title").get<std::string>();
        concept_input.description = doc.at("description").get<std::string>();
    } catch (const json::exception& e) {
        throw SchemaError("concept file " + path.string() + ": " + e.what());
    }
    return concept_input;
}

json run_to_json(const RunConfig& run) {
    return {{"current_date", run.current_date},
            {"max_turns", run.max_turns},
            {"tool_limits", run.tool_limits},
            {"recent_window", run.recent_window},
            {"retrieval_k", run.retrieval_k},
            {"prompt_char_budget", run.prompt_char_budget},
            {"report_sections", run.report_sections}};
}

RunConfig run_from_json(const json& doc, const RatingScale& scale) {
    RunConfig run;
    try {
        run.current_date = doc.at("current_date").get<std::string>();
        run.max_turns = doc.at("max_turns").get<int>();
        run.tool_limits = doc.at("tool_limits").get<std::map<std::string, int>>();
        run.recent_window = doc.at("recent_window").get<int>();
        run.retrieval_k = doc.at("retrieval_k").get<int>();
        run.prompt_char_budget = doc.at("prompt_char_budget").get<int>();
        run.report_sections = doc.at("report_sections").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed run config in session meta: ") + e.what());
    }
    run.rating_scale = scale;
    return run;
}

struct RunArtifacts {
    ConceptScorecard scorecard;
    std::vector<std::string> conversation_order;
};

/// Runs one concept and writes the fixed output layout:
/// transcripts/, reports/, scorecard.(json|md), session.jsonl.
RunArtifacts evaluate_concept(const ConceptInput& concept_input, const EvaluationModel& model,
                              EngineDeps& deps, const RunConfig& run, const fs::path& out_dir,
                              int jobs) {
    SessionRecorder recorder;
    deps.recorder = &recorder;
    json meta{{"concept",
               {{"concept_id", concept_input.id},
                {"title", concept_input.title},
                {"description", concept_input.description}}},
              {"model_config", model_to_json(model)},
              {"run", run_to_json(run)}};
    recorder.set_meta(meta);

    ConceptScorecard scorecard = run_concept(concept_input, model, deps, run, jobs);

    std::vector<std::string> order;
    for (const auto& criterion : model.criteria)
        order.push_back(conversation_id_for(concept_input.id, criterion.id));

    std::vector<json> session = {recorder.meta()};
    for (size_t i = 0; i < model.criteria.size(); ++i) {
        for (auto& rec : recorder.turns_for(order[i])) session.push_back(std::move(rec));
        for (const auto& call : scorecard.outcomes[i].tool_audit)
            session.push_back(tool_call_to_json(call));
    }
    write_jsonl(out_dir / "session.jsonl", session);

    for (const auto& outcome : scorecard.outcomes) {
        write_jsonl(out_dir / "transcripts" / (outcome.criterion_id + ".jsonl"),
                    transcript_records(outcome));
        write_file(out_dir / "reports" / (outcome.criterion_id + ".md"),
                   criterion_report_markdown(outcome, model, concept_input.title));
        write_file(out_dir / "reports" / (outcome.criterion_id + ".json"),
                   criterion_outcome_to_json(outcome).dump(2) + "\n");
    }
    write_file(out_dir / "scorecard.json", scorecard_to_json(scorecard).dump(2) + "\n");
    write_file(out_dir / "scorecard.md", scorecard_markdown(scorecard, model));

    deps.recorder = nullptr;
    return {std::move(scorecard), std::move(order)};
}

void print_scorecard(const ConceptScorecard& scorecard, std::ostream& out) {
    out << "Scorecard for " << scorecard.title << ":\n";
    for (const auto& [criterion_id, rating] : scorecard.ratings)
        out << "  " << criterion_id << ": " << (rating ? format_rating(*rating) : "-") << "\n";
    auto total = scorecard.aggregate();
    out << "  aggregate: " << (total ? format_rating(*total) : "-")
        << (scorecard.partial ? " (partial)" : "") << "\n";
}

RatingTable table_from_file(const fs::path& path) {
    std::string ext = path.extension().string();
    if (ext == ".csv") return RatingTable::from_csv(read_file(path));
    json doc = read_json_file(path);
    if (doc.contains("cells")) {
        RatingTable table;
        for (const auto& [concept_id, row] : doc.at("cells").items())
            for (const auto& [criterion_id, value] : row.items())
                table.add({concept_id, criterion_id, value.get<double>(),
                           doc.value("rater", "system")});
        if (doc.contains("printed_aggregates"))
            for (const auto& [concept_id, total] : doc.at("printed_aggregates").items())
                table.set_printed_total(concept_id, total.get<double>());
        return table;
    }
    if (doc.contains("ratings")) {  // a scorecard.json
        RatingTable table;
        std::string concept_id = doc.at("concept_id").get<std::string>();
        for (const auto& [criterion_id, value] : doc.at("ratings").items())
            if (!value.is_null())
                table.add({concept_id, criterion_id, value.get<double>(), "system"});
        return table;
    }
    throw SchemaError("unrecognized rating table format: " + path.string());
}

int cmd_validate(const std::string& config_path, std::ostream& out) {
    EvaluationModel model = load_model(read_file(config_path));
    out << "OK: " << model.agents.size() << " agents, " << model.criteria.size()
        << " criteria, " << model.tool_specs.size() << " tools, "
        << model.dimensions.size() << " dimensions\n";
    return 0;
}

struct EvaluateOptions {
    std::string model_arg;
    std::string concept_path;
    std::string backend_arg = "live";
    std::string out_dir;
    std::string date;
    std::string tool_fixtures;
    std::string tool_endpoints;
    bool strict_tools = false;
    int jobs = 2;
    int max_turns = 24;
    int recent_window = 6;
    int retrieval_k = 3;
    int prompt_budget = 8000;
};

std::shared_ptr<ChatBackend> chat_backend_from_arg(const std::string& arg) {
    if (arg.rfind("scripted:", 0) == 0) return scripted_from_file(arg.substr(9));
    if (arg == "live") {
        LiveChatBackend::Config config;
        const char* endpoint = std::getenv("DELIB_LLM_ENDPOINT");
        const char* model = std::getenv("DELIB_LLM_MODEL");
        if (!endpoint || !model)
            throw SchemaError(
                "live backend requires DELIB_LLM_ENDPOINT and DELIB_LLM_MODEL environment "
                "variables");
        config.endpoint = endpoint;
        config.model = model;
        return std::make_shared<LiveChatBackend>(config);
    }
    throw SchemaError("unknown backend '" + arg + "' (expected live or scripted:<scenario>)");
}

std::shared_ptr<ToolBackend> tool_backend_from_options(const EvaluateOptions& opt) {
    if (!opt.tool_endpoints.empty()) {
        LiveToolBackend::Config config;
        json doc = read_json_file(opt.tool_endpoints);
        for (const auto& [tool_id, url] : doc.items())
            config.endpoints[tool_id] = url.get<std::string>();
        return std::make_shared<LiveToolBackend>(config);
    }
    if (!opt.tool_fixtures.empty()) {
        auto backend = load_fixtures_file(opt.tool_fixtures);
        if (opt.strict_tools) backend->set_strict(true);
        return backend;
    }
    auto backend = std::make_shared<FixtureToolBackend>();
    backend->set_strict(opt.strict_tools);
    return backend;
}

int cmd_evaluate(const EvaluateOptions& opt, const fs::path& data_dir, std::ostream& out) {
    EvaluationModel model = model_from_arg(opt.model_arg, data_dir);
    ConceptInput concept_input = concept_from_file(opt.concept_path);

    RunConfig run;
    run.current_date = opt.date;
    run.max_turns = opt.max_turns;
    run.recent_window = opt.recent_window;
    run.retrieval_k = opt.retrieval_k;
    run.prompt_char_budget = opt.prompt_budget;
    run.rating_scale = model.rating_scale;
    if (run.current_date.empty())
        throw SchemaError("--date is required (the engine never defaults the evaluation date)");

    PromptSet prompts = PromptSet::load_dir(data_dir / "prompts");
    EngineDeps deps;
    deps.backend = chat_backend_from_arg(opt.backend_arg);
    deps.tool_backend = tool_backend_from_options(opt);
    deps.prompts = &prompts;
    deps.embedder = std::make_shared<HashingEmbedder>();

    RunArtifacts artifacts =
        evaluate_concept(concept_input, model, deps, run, opt.out_dir, opt.jobs);
    print_scorecard(artifacts.scorecard, out);
    out << "Outputs written to " << opt.out_dir << "\n";
    return artifacts.scorecard.partial ? 1 : 0;
}

int cmd_replay(const std::string& session_path, const std::string& out_dir,
               const fs::path& data_dir, int jobs, std::ostream& out) {
    auto records = read_jsonl(session_path);
    if (records.empty() || records.front().value("type", "") != "meta")
        throw SchemaError("session record must begin with a meta line");
    const json& meta = records.front();

    EvaluationModel model = load_model_json(meta.at("model_config"));
    ConceptInput concept_input;
    concept_input.id = meta.at("concept").at("concept_id").get<std::string>();
    concept_input.title = meta.at("concept").at("title").get<std::string>();
    concept_input.description = meta.at("concept").at("description").get<std::string>();
    RunConfig run = run_from_json(meta.at("run"), model.rating_scale);

    std::vector<ToolCall> audit;
    for (const auto& rec : records)
        if (rec.value("type", "") == "tool") audit.push_back(tool_call_from_json(rec));

    PromptSet prompts = PromptSet::load_dir(data_dir / "prompts");
    EngineDeps deps;
    deps.backend = scripted_from_session(records);
    deps.tool_backend = fixtures_from_audit(audit, /*strict=*/true);
    deps.prompts = &prompts;
    deps.embedder = std::make_shared<HashingEmbedder>();

    RunArtifacts artifacts = evaluate_concept(concept_input, model, deps, run, out_dir, jobs);
    print_scorecard(artifacts.scorecard, out);
    out << "Replay written to " << out_dir << "\n";
    return artifacts.scorecard.partial ? 1 : 0;
}

int cmd_compare(const std::string& system_path, const std::string& expert_path, bool bundled,
                const std::string& out_path, const fs::path& data_dir, std::ostream& out) {
    RatingTable system_table, expert_table;
    std::optional<ComparisonFixture> fixture;
    if (bundled) {
        FixtureLibrary library(data_dir / "fixtures");
        fixture = library.comparison();
        system_table = fixture->system;
        expert_table = fixture->expert;
    } else {
        system_table = table_from_file(system_path);
        expert_table = table_from_file(expert_path);
    }

    ComparisonReport report = compare(system_table, expert_table);
    if (fixture) {
        char computed[64], printed[64];
        std::snprintf(computed, sizeof computed, "%.4f", report.mean_delta);
        std::snprintf(printed, sizeof printed, "%.2f", fixture->printed_mean_delta);
        if (std::abs(report.mean_delta - fixture->printed_mean_delta) > 1e-9)
            report.discrepancies.push_back("sheet prints mean delta " + std::string(printed) +
                                           " but cells compute to " + computed);
        for (const auto& [concept_id, printed] : fixture->printed_delta_subtotals) {
            double computed = report.subtotal_delta.at(concept_id);
            if (std::abs(computed - printed) > 1e-9)
                report.discrepancies.push_back("sheet prints delta subtotal " +
                                               format_rating(printed) + " for '" + concept_id +
                                               "' but cells compute to " +
                                               format_rating(computed));
        }
    }

    std::string markdown = comparison_to_markdown(report);
    out << markdown;
    if (!out_path.empty()) {
        write_file(out_path, markdown);
        fs::path sidecar = fs::path(out_path).replace_extension(".json");
        write_file(sidecar, comparison_to_json(report).dump(2) + "\n");
        out << "Comparison written to " << out_path << "\n";
    }
    return 0;
}

int cmd_finetune_prep(const std::string& ratings_path, const std::string& dimension_arg,
                      const std::string& out_path, bool single_metric, std::ostream& out) {
    CsvTable csv = parse_csv(read_file(ratings_path));
    Dimension dimension;
    if (dimension_arg == "technical")
        dimension = {"technical_feasibility", "Technical Feasibility"};
    else if (dimension_arg == "market")
        dimension = {"market_feasibility", "Market Feasibility"};
    else
        throw SchemaError("--dimension must be technical or market");

    FinetunePrep prep = build_finetune_records(csv, dimension, single_metric);
    write_file(out_path, finetune_records_to_jsonl(prep.records));
    out << "wrote " << prep.records.size() << " records (skipped " << prep.skipped_rows
        << " rows) to " << out_path << "\n";
    return 0;
}

int cmd_demo(const std::string& out_dir, const fs::path& data_dir, int jobs, std::ostream& out) {
    FixtureLibrary library(data_dir / "fixtures");
    EvaluationModel model = model_from_arg("default", data_dir);
    PromptSet prompts = PromptSet::load_dir(data_dir / "prompts");

    RunConfig run;
    run.current_date = "2025-06-02";
    run.rating_scale = model.rating_scale;

    std::map<std::string, double> totals;
    std::map<std::string, std::string> titles;
    for (const auto& concept_fixture : library.concepts()) {
        ConceptInput concept_input{concept_fixture.concept_id, concept_fixture.title,
                             concept_fixture.description};
        EngineDeps deps;
        deps.backend = scripted_from(library.scenario(concept_input.id));
        deps.tool_backend = library.tool_fixtures();
        deps.prompts = &prompts;
        deps.embedder = std::make_shared<HashingEmbedder>();

        RunArtifacts artifacts = evaluate_concept(
            concept_input, model, deps, run, fs::path(out_dir) / concept_input.id, jobs);
        auto total = artifacts.scorecard.aggregate();
        if (!total) throw Error("demo scorecard for '" + concept_input.id + "' is partial");
        totals[concept_input.id] = *total;
        titles[concept_input.id] = concept_input.title;
        print_scorecard(artifacts.scorecard, out);
    }

    out << "Ranking:\n";
    for (const auto& entry : rank(totals))
        out << entry.rank << ". " << titles[entry.concept_id] << " ("
            << format_rating(entry.total) << ")\n";
    out << "Outputs written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coordinator-led multi-agent deliberation engine for product concept evaluation"};
    app.require_subcommand(1);

    std::string data_dir_arg = default_data_dir().string();
    app.add_option("--data-dir", data_dir_arg,
                   "Directory holding prompts/, configs/, fixtures/ (env DELIB_DATA_DIR)");

    // validate
    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Validate a model config document");
    validate->add_option("config", validate_config, "Model config file")->required();

    // evaluate
    EvaluateOptions eval;
    auto* evaluate = app.add_subcommand("evaluate", "Run a full concept evaluation");
    evaluate->add_option("--model", eval.model_arg, "Model config file or 'default'");
    evaluate->add_option("--concept", eval.concept_path, "Concept JSON file")->required();
    evaluate->add_option("--backend", eval.backend_arg, "live or scripted:<scenario file>")
        ->required();
    evaluate->add_option("--out", eval.out_dir, "Output directory")->required();
    evaluate->add_option("--date", eval.date, "Evaluation anchor date (ISO)");
    evaluate->add_option("--tool-fixtures", eval.tool_fixtures, "Tool fixture file");
    evaluate->add_option("--tool-endpoints", eval.tool_endpoints,
                         "JSON file mapping tool id to live endpoint URL");
    evaluate->add_flag("--strict-tools", eval.strict_tools, "Fixture misses become errors");
    evaluate->add_option("--jobs", eval.jobs, "Criteria run in parallel on N threads");
    evaluate->add_option("--max-turns", eval.max_turns, "Turn cap per conversation");
    evaluate->add_option("--recent-window", eval.recent_window, "Verbatim chat window");
    evaluate->add_option("--retrieval-k", eval.retrieval_k, "Retrieved chunks per memory");
    evaluate->add_option("--prompt-budget", eval.prompt_budget,
                         "Prompt length warning threshold (chars)");

    // replay
    std::string replay_session, replay_out;
    int replay_jobs = 2;
    auto* replay = app.add_subcommand("replay", "Deterministically re-run a recorded session");
    replay->add_option("--session", replay_session, "session.jsonl from an evaluate run")
        ->required();
    replay->add_option("--out", replay_out, "Output directory")->required();
    replay->add_option("--jobs", replay_jobs, "Criteria run in parallel on N threads");

    // compare
    std::string cmp_system, cmp_expert, cmp_out;
    bool cmp_bundled = false;
    auto* comparec = app.add_subcommand("compare", "Compare system vs expert rating sheets");
    comparec->add_option("--system", cmp_system, "System ratings (csv or json)");
    comparec->add_option("--expert", cmp_expert, "Expert ratings (csv or json)");
    comparec->add_flag("--bundled", cmp_bundled, "Use the bundled comparison fixture");
    comparec->add_option("--out", cmp_out, "Write markdown (+ json sidecar) here");

    // finetune-prep
    std::string ft_ratings, ft_dimension, ft_out;
    bool ft_single = false;
    auto* finetune = app.add_subcommand("finetune-prep", "Prepare fine-tuning records");
    finetune->add_option("--ratings", ft_ratings, "Ratings CSV with header")->required();
    finetune->add_option("--dimension", ft_dimension, "technical or market")->required();
    finetune->add_option("--out", ft_out, "Output JSONL file")->required();
    finetune->add_flag("--single-metric", ft_single, "One record per metric instead of multi-label");

    // demo
    std::string demo_out = "demo_output";
    int demo_jobs = 2;
    auto* demo = app.add_subcommand("demo", "Run the bundled three-concept scripted evaluation");
    demo->add_option("--out", demo_out, "Output directory");
    demo->add_option("--jobs", demo_jobs, "Criteria run in parallel on N threads");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: usage: " << e.what() << "\n";
        return 2;
    }

    fs::path data_dir(data_dir_arg);
    try {
        if (validate->parsed()) return cmd_validate(validate_config, out);
        if (evaluate->parsed()) return cmd_evaluate(eval, data_dir, out);
        if (replay->parsed())
            return cmd_replay(replay_session, replay_out, data_dir, replay_jobs, out);
        if (comparec->parsed()) {
            if (!cmp_bundled && (cmp_system.empty() || cmp_expert.empty()))
                throw SchemaError("compare needs --system and --expert, or --bundled");
            return cmd_compare(cmp_system, cmp_expert, cmp_bundled, cmp_out, data_dir, out);
        }
        if (finetune->parsed())
            return cmd_finetune_prep(ft_ratings, ft_dimension, ft_out, ft_single, out);
        if (demo->parsed()) return cmd_demo(demo_out, data_dir, demo_jobs, out);
    } catch (const ConfigError& e) {
        err << "error: validation: " << e.what() << "\n";
        return 2;
    } catch (const FixtureError& e) {
        err << "error: fixture: " << e.what() << "\n";
        return 2;
    } catch (const TableError& e) {
        err << "error: table: " << e.what() << "\n";
        return 2;
    } catch (const RenderError& e) {
        err << "error: prompt: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "error: input: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: runtime: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: runtime: " << e.what() << "\n";
        return 1;
    }
    err << "error: usage: no subcommand\n";
    return 2;
}

}  // namespace delib
