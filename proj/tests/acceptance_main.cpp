// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code equals the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "delib/backend.hpp"
#include "delib/cli.hpp"
#include "delib/errors.hpp"
#include "delib/finetune.hpp"
#include "delib/fixtures.hpp"
#include "delib/io.hpp"
#include "delib/memory.hpp"
#include "delib/orchestrator.hpp"
#include "delib/protocol.hpp"
#include "delib/report.hpp"
#include "delib/scoring.hpp"
#include "delib/strings.hpp"
#include "delib/tools.hpp"

using namespace delib;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_data_dir;
fs::path g_cli;
fs::path g_self;
fs::path g_scratch;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
    if (!condition) throw Failure(what);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
    if (!(got == want)) {
        std::ostringstream msg;
        msg << what << " (got " << got << ", want " << want << ")";
        throw Failure(msg.str());
    }
}

struct CommandResult {
    int code;
    std::string output;
};

CommandResult run_command(const std::string& command) {
    std::string full = command + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    require(pipe != nullptr, "popen failed for: " + command);
    std::string output;
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// ---------------------------------------------------------------------------
// 1. Aggregation exactness (tolerance 0, runtime < 1s)
// ---------------------------------------------------------------------------
void criterion_aggregation() {
    auto start = Clock::now();
    FixtureLibrary library(g_data_dir / "fixtures");
    std::vector<std::string> criteria;
    for (const auto& c : default_model().criteria) criteria.push_back(c.id);

    RatingTable pre = library.table_pre();
    require(aggregate_for(pre, "depthview_3d", criteria) == 44.5, "pre depthview != 44.5");
    require(aggregate_for(pre, "precisioncad", criteria) == 45.5, "pre precisioncad != 45.5");
    require(aggregate_for(pre, "pixelmaster", criteria) == 45.0, "pre pixelmaster != 45.0");

    RatingTable post = library.table_post();
    require(aggregate_for(post, "precisioncad", criteria) == 41.5, "post precisioncad != 41.5");
    require(aggregate_for(post, "pixelmaster", criteria) == 44.0, "post pixelmaster != 44.0");
    require(aggregate_for(post, "depthview_3d", criteria) == 37.5,
            "post depthview must compute to 37.5");

    // The printed 38.5 must surface as a discrepancy flag from the comparison tool.
    ComparisonFixture fixture = library.comparison();
    ComparisonReport report = compare(fixture.system, fixture.expert);
    bool flagged = false;
    for (const auto& d : report.discrepancies)
        if (d.find("depthview_3d") != std::string::npos && d.find("38.5") != std::string::npos &&
            d.find("37.5") != std::string::npos)
            flagged = true;
    require(flagged, "computed 37.5 vs printed 38.5 not flagged");

    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    require(elapsed.count() < 1000, "aggregation checks exceeded 1s");
}

// ---------------------------------------------------------------------------
// 2. Ranking concordance
// ---------------------------------------------------------------------------
void criterion_ranking() {
    FixtureLibrary library(g_data_dir / "fixtures");
    ComparisonFixture fixture = library.comparison();
    ComparisonReport report = compare(fixture.system, fixture.expert);

    require(report.expert_ranking.size() == 3, "expected three ranked concepts");
    require_eq(report.expert_ranking[0].concept_id, std::string("pixelmaster"), "rank 1");
    require_eq(report.expert_ranking[1].concept_id, std::string("precisioncad"), "rank 2");
    require_eq(report.expert_ranking[2].concept_id, std::string("depthview_3d"), "rank 3");
    require(report.exact_rank_match, "exact_rank_match must be true");
    require(report.tau == 1.0, "kendall tau must be exactly 1.0");
}

// ---------------------------------------------------------------------------
// 3. Mean delta by direct enumeration
// ---------------------------------------------------------------------------
void criterion_mean_delta() {
    FixtureLibrary library(g_data_dir / "fixtures");
    ComparisonFixture fixture = library.comparison();
    ComparisonReport report = compare(fixture.system, fixture.expert);

    require(report.cells.size() == 18, "expected 18 comparison cells");
    double oracle = 0.0;
    for (const auto& cell : report.cells) oracle += cell.expert - cell.system;
    oracle /= 18.0;
    require(std::abs(report.mean_delta - oracle) == 0.0, "mean delta differs from enumeration");
    require(std::abs(report.mean_delta - 5.0 / 18.0) < 0.0001, "mean delta != 5/18 +- 0.0001");
    // The sheet's rounded value is flagged, never matched.
    require(std::abs(fixture.printed_mean_delta - 0.31) < 1e-12, "fixture printed mean drifted");
    require(std::abs(report.mean_delta - fixture.printed_mean_delta) > 0.01,
            "computed mean should differ from the printed 0.31");
}

// ---------------------------------------------------------------------------
// 4. Protocol grammar property suite (runtime < 5s)
// ---------------------------------------------------------------------------
void criterion_protocol_grammar() {
    auto start = Clock::now();
    EvaluationModel model = default_model();
    RatingScale scale = model.rating_scale;

    for (double v : scale.grid_values()) {
        for (RatingStance stance :
             {RatingStance::propose, RatingStance::suggest_revision, RatingStance::agree}) {
            auto parsed = parse_rating(format_rating_phrase(stance, v), scale);
            require(parsed.has_value(), "grid phrase failed to parse");
            require(std::abs(parsed->value - v) < 1e-12, "grid value mismatch");
            require(parsed->stance == stance, "stance mismatch");
        }
    }

    NameTable names;
    for (const auto& agent : model.agents) names.add(agent.id, agent.display_name);
    names.add_report_generator();
    for (const auto& agent : model.agents) {
        RoutingDirective d = parse_routing("analysis text\n" + agent.display_name, names);
        require(d == RoutingDirective::to_agent(agent.id), "routing display-name failure");
    }
    require(parse_routing("done\nReport_Generator", names) == RoutingDirective::to_report(),
            "sentinel routing failure");

    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> len(4, 20);
    std::uniform_int_distribution<int> ch('a', 'z');
    int rejected = 0;
    for (int i = 0; i < 100; ++i) {
        std::string tail = "qq";
        int n = len(rng);
        for (int j = 0; j < n; ++j) tail.push_back(static_cast<char>(ch(rng)));
        try {
            parse_routing("body\n" + tail, names);
        } catch (const MalformedRoutingError&) {
            ++rejected;
        }
    }
    require(rejected == 100, "random non-name tails must all be rejected");

    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    require(elapsed.count() < 5000, "protocol grammar suite exceeded 5s");
}

// ---------------------------------------------------------------------------
// 5. State-machine soundness against hand-traced oracles
// ---------------------------------------------------------------------------
struct ScenarioHarness {
    EvaluationModel model = default_model();
    PromptSet prompts = PromptSet::load_dir(g_data_dir / "prompts");
    std::shared_ptr<ScriptedBackend> backend = std::make_shared<ScriptedBackend>();
    ConceptInput concept_input{"gadget", "Gadget", "A compact creative-work gadget."};
    RunConfig run;

    ScenarioHarness() {
        run.current_date = "2025-06-02";
        run.rating_scale = model.rating_scale;
    }

    CriterionOutcome run_scripted(
        const std::string& criterion,
        const std::vector<std::pair<std::string, std::string>>& lines) {
        std::string conv = conversation_id_for(concept_input.id, criterion);
        for (const auto& [agent, text] : lines) backend->push_line(conv, agent, text);
        EngineDeps deps;
        deps.backend = backend;
        deps.tool_backend = std::make_shared<FixtureToolBackend>();
        deps.prompts = &prompts;
        deps.embedder = std::make_shared<HashingEmbedder>(64);
        return run_criterion(concept_input, criterion, model, deps, run);
    }
};

void criterion_state_machine() {
    const std::string report_body = "Wrap-up.\n\nRating Evolution: recorded.\n\nFINAL_ANSWER";

    {  // happy path to consensus
        ScenarioHarness h;
        auto outcome = h.run_scripted(
            "patentability",
            {{"rnd_director", "TOOL google_trends: gadget\nGo.\nIP Expert"},
             {"ip_expert", "TOOL google_patents: art\nI rate this concept 7.0/10.\nTechnical Expert"},
             {"technical_expert",
              "TOOL google_scholar: std\nI agree with the current rating of 7.0/10 because "
              "fine.\nReport_Generator"},
             {"report_generator", report_body}});
        std::vector<std::string> oracle = {"coordinator_turn", "expert_turn(ip_expert)",
                                           "expert_turn(technical_expert)", "report_generation",
                                           "done"};
        require(outcome.phase_trace == oracle, "happy-path phase trace mismatch");
        require(outcome.consensus && !outcome.forced_report, "happy path must reach consensus");
        require(outcome.final_rating && *outcome.final_rating == 7.0, "happy-path final rating");
    }
    {  // premature Report_Generator repaired to the holdout
        ScenarioHarness h;
        auto outcome = h.run_scripted(
            "patentability",
            {{"rnd_director", "TOOL google_trends: gadget\nGo.\nIP Expert"},
             {"ip_expert", "TOOL google_patents: art\nI rate this concept 7.0/10.\nReport_Generator"},
             {"technical_expert",
              "TOOL google_scholar: std\nI agree with the current rating of 7.0/10 because "
              "fine.\nReport_Generator"},
             {"report_generator", report_body}});
        std::vector<std::string> oracle = {"coordinator_turn", "expert_turn(ip_expert)",
                                           "expert_turn(technical_expert)", "report_generation",
                                           "done"};
        require(outcome.phase_trace == oracle, "premature-routing phase trace mismatch");
        bool premature_flag = false;
        for (const auto& v : outcome.violations)
            if (v.find("premature") != std::string::npos) premature_flag = true;
        require(premature_flag, "premature routing must be logged");
    }
    {  // malformed routing repaired once, then rerouted in declared order
        ScenarioHarness h;
        auto outcome = h.run_scripted(
            "patentability",
            {{"rnd_director", "TOOL google_trends: gadget\nGo.\nIP Expert"},
             {"ip_expert", "TOOL google_patents: art\nI rate this concept 7.0/10.\nSee you later"},
             {"ip_expert", "Still no routing line"},
             {"technical_expert",
              "TOOL google_scholar: std\nI agree with the current rating of 7.0/10 because "
              "fine.\nReport_Generator"},
             {"report_generator", report_body}});
        std::vector<std::string> oracle = {
            "coordinator_turn", "expert_turn(ip_expert)", "expert_turn(ip_expert)",
            "expert_turn(technical_expert)", "report_generation", "done"};
        require(outcome.phase_trace == oracle, "malformed-routing phase trace mismatch");
    }
    {  // turn cap forces the report without consensus
        ScenarioHarness h;
        h.run.max_turns = 4;
        auto outcome = h.run_scripted(
            "patentability",
            {{"rnd_director", "TOOL google_trends: gadget\nGo.\nIP Expert"},
             {"ip_expert", "TOOL google_patents: art\nI rate this concept 7.0/10.\nTechnical Expert"},
             {"technical_expert",
              "TOOL google_scholar: std\nToo generous. I suggest a rating of 6.0/10.\nIP Expert"},
             {"report_generator", report_body}});
        std::vector<std::string> oracle = {"coordinator_turn", "expert_turn(ip_expert)",
                                           "expert_turn(technical_expert)", "report_generation",
                                           "done"};
        require(outcome.phase_trace == oracle, "turn-cap phase trace mismatch");
        require(outcome.forced_report, "turn cap must force the report");
        require(!outcome.consensus, "forced report must not claim consensus");
        require(outcome.final_rating && *outcome.final_rating == 6.0,
                "forced report carries the last rated value");
    }
}

// ---------------------------------------------------------------------------
// 6. Budget conservation over randomized sequences
// ---------------------------------------------------------------------------
void criterion_budget_conservation() {
    EvaluationModel model = default_model();
    std::mt19937 rng(31337);
    const std::vector<std::pair<std::string, std::string>> bindings = {
        {"ip_expert", "google_patents"},     {"rnd_director", "google_trends"},
        {"market_analyst", "google_search"}, {"customer_advocate", "reddit"},
        {"technical_expert", "google_scholar"}, {"rnd_engineer", "google_search"},
    };
    const std::vector<std::string> conversations = {"alpha:patentability", "beta:patentability",
                                                    "gamma:market_potential"};

    int total_invocations = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto backend = std::make_shared<FixtureToolBackend>();
        if (trial % 2) backend->set_strict(true);  // failed attempts also consume budget
        std::map<std::string, int> limits;
        for (const auto& spec : model.tool_specs)
            limits[spec.id] = 1 + static_cast<int>(rng() % 4);
        ToolPool pool(model, backend, limits);

        std::map<std::pair<std::string, std::string>, int> consumed;
        int calls = 30 + static_cast<int>(rng() % 20);
        for (int i = 0; i < calls; ++i) {
            const auto& [agent, tool] = bindings[rng() % bindings.size()];
            const auto& conv = conversations[rng() % conversations.size()];
            ToolCall call = pool.invoke(conv, agent, tool, "q" + std::to_string(rng() % 7), i);
            ++total_invocations;
            if (call.status != ToolCallStatus::budget_exhausted) ++consumed[{conv, tool}];
        }
        for (const auto& conv : conversations) {
            for (const auto& spec : model.tool_specs) {
                int remaining = pool.remaining_budget(conv, spec.id);
                require(remaining >= 0, "remaining budget must never go negative");
                require(limits[spec.id] - remaining == consumed[{conv, spec.id}],
                        "budget conservation violated");
            }
        }
    }
    require(total_invocations >= 1000, "property suite must cover >= 1000 invocations");

    // Cross-conversation isolation.
    ToolPool pool(model, std::make_shared<FixtureToolBackend>(), {{"google_patents", 2}});
    pool.invoke("conv_a", "ip_expert", "google_patents", "q", 1);
    pool.invoke("conv_a", "ip_expert", "google_patents", "q", 2);
    require(pool.remaining_budget("conv_a", "google_patents") == 0, "conv_a should be exhausted");
    require(pool.remaining_budget("conv_b", "google_patents") == 2,
            "conv_b must keep its full limit");
}

// ---------------------------------------------------------------------------
// 7. Retrieval correctness + cross-process determinism
// ---------------------------------------------------------------------------
std::string retrieval_digest() {
    HashingEmbedder embedder(32);
    std::mt19937 rng(777);
    static const std::vector<std::string> vocab = {
        "panel", "oled", "contrast", "market", "patent", "latency", "gamut",
        "pivot", "sensor", "depth", "render", "editor"};
    auto words = [&](int n) {
        std::string out;
        for (int i = 0; i < n; ++i) {
            if (i) out += ' ';
            out += vocab[rng() % vocab.size()];
        }
        return out;
    };

    std::ostringstream digest;
    for (int trial = 0; trial < 10; ++trial) {
        MemoryStore store(32);
        int count = 30 + static_cast<int>(rng() % 71);  // up to 100 chunks
        for (int i = 0; i < count; ++i) {
            if (rng() % 3 == 0)
                store.append(ChunkSource::tool("google_search", i), words(4), embedder);
            else
                store.append(ChunkSource::chat("agent", i), words(4), embedder);
        }
        std::string query = words(3);
        for (size_t k : {1u, 3u, 10u}) {
            auto hits = store.retrieve(query, k, MemoryScope::both, embedder);
            digest << trial << "/" << k << ":";
            for (const auto& hit : hits) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.12f", hit.score);
                digest << " " << hit.chunk.id << "=" << buf;
            }
            digest << "\n";
        }
    }
    return digest.str();
}

void criterion_retrieval() {
    HashingEmbedder embedder(32);
    std::mt19937 rng(2468);
    static const std::vector<std::string> vocab = {
        "panel", "oled", "contrast", "market", "patent", "latency", "gamut", "pivot"};
    auto words = [&](int n) {
        std::string out;
        for (int i = 0; i < n; ++i) {
            if (i) out += ' ';
            out += vocab[rng() % vocab.size()];
        }
        return out;
    };

    for (int trial = 0; trial < 25; ++trial) {
        MemoryStore store(32);
        int count = 7 + static_cast<int>(rng() % 91);  // <= 100 chunks with the dups below
        for (int i = 0; i < count; ++i) {
            if (rng() % 3 == 0)
                store.append(ChunkSource::tool("google_search", i), words(4), embedder);
            else
                store.append(ChunkSource::chat("agent", i), words(4), embedder);
        }
        // Force exact ties so the tie-break order is actually exercised:
        // identical text at the same recency (id decides) and at a later one.
        std::string dup = words(4);
        store.append(ChunkSource::chat("agent", count), dup, embedder);
        store.append(ChunkSource::chat("agent", count), dup, embedder);
        store.append(ChunkSource::chat("agent", count + 1), dup, embedder);
        std::string query = words(3);
        auto query_vec = embedder.embed(query);

        for (size_t k : {1u, 3u, 10u}) {
            auto got = store.retrieve(query, k, MemoryScope::both, embedder);

            struct Scored {
                std::uint64_t id;
                std::uint64_t recency;
                double score;
            };
            std::vector<Scored> oracle;
            for (const auto& chunks : {store.chat_chunks(), store.tool_chunks()})
                for (const auto& c : chunks)
                    oracle.push_back(
                        {c.id, c.source.recency(), cosine_similarity(query_vec, c.embedding)});
            std::sort(oracle.begin(), oracle.end(), [](const Scored& a, const Scored& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.recency != b.recency) return a.recency > b.recency;
                return a.id > b.id;
            });
            if (oracle.size() > k) oracle.resize(k);

            require(got.size() == oracle.size(), "retrieval size mismatch vs oracle");
            for (size_t i = 0; i < got.size(); ++i) {
                require(got[i].chunk.id == oracle[i].id,
                        "retrieval order mismatch vs brute-force oracle (tie-breaks included)");
                require(got[i].score == oracle[i].score, "retrieval score mismatch");
            }
        }
    }

    // Byte-identical ranking across two separate process runs.
    auto run1 = run_command(q(g_self) + " --retrieval-digest");
    auto run2 = run_command(q(g_self) + " --retrieval-digest");
    require(run1.code == 0 && run2.code == 0, "digest subprocess failed");
    require(!run1.output.empty() && run1.output == run2.output,
            "retrieval digests differ across process runs");
}

// ---------------------------------------------------------------------------
// 8. Record/replay fixpoint through the CLI
// ---------------------------------------------------------------------------
void criterion_record_replay() {
    fs::path out1 = g_scratch / "evaluate_run";
    fs::path out2 = g_scratch / "replay_run";
    fs::remove_all(out1);
    fs::remove_all(out2);

    std::string base = q(g_cli) + " --data-dir " + q(g_data_dir);
    auto evaluate = run_command(
        base + " evaluate --concept " + q(g_data_dir / "fixtures/concepts/pixelmaster.json") +
        " --backend scripted:" + (g_data_dir / "fixtures/scenarios/pixelmaster.json").string() +
        " --tool-fixtures " + q(g_data_dir / "fixtures/tools/demo_tools.json") +
        " --date 2025-06-02 --out " + q(out1));
    require(evaluate.code == 0, "evaluate failed: " + evaluate.output);

    auto replay =
        run_command(base + " replay --session " + q(out1 / "session.jsonl") + " --out " + q(out2));
    require(replay.code == 0, "replay failed: " + replay.output);

    std::vector<std::string> files = {"scorecard.json", "scorecard.md"};
    for (const auto& criterion : default_model().criteria) {
        files.push_back("transcripts/" + criterion.id + ".jsonl");
        files.push_back("reports/" + criterion.id + ".md");
        files.push_back("reports/" + criterion.id + ".json");
    }
    for (const auto& file : files) {
        require(fs::exists(out1 / file), "missing evaluate output " + file);
        require(read_file(out1 / file) == read_file(out2 / file),
                "replay output differs for " + file);
    }
}

// ---------------------------------------------------------------------------
// 9. End-to-end offline demo (runtime < 10s)
// ---------------------------------------------------------------------------
void criterion_demo() {
    fs::path out = g_scratch / "demo_run";
    fs::remove_all(out);
    auto start = Clock::now();
    auto demo = run_command(q(g_cli) + " --data-dir " + q(g_data_dir) + " demo --out " + q(out));
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    require(demo.code == 0, "demo failed: " + demo.output);
    require(elapsed.count() < 10000, "demo exceeded 10s");

    size_t p1 = demo.output.find("1. PixelMaster");
    size_t p2 = demo.output.find("2. PrecisionCAD");
    size_t p3 = demo.output.find("3. DepthView 3D");
    require(p1 != std::string::npos && p2 != std::string::npos && p3 != std::string::npos,
            "demo must print the published ranking");
    require(p1 < p2 && p2 < p3, "ranking lines out of order");

    int reports = 0;
    for (const auto& concept_id : {"depthview_3d", "precisioncad", "pixelmaster"}) {
        for (const auto& criterion : default_model().criteria) {
            fs::path path = out / concept_id / "reports" / (criterion.id + ".md");
            require(fs::exists(path), "missing demo report " + path.string());
            std::string text = read_file(path);
            require(text.find("Rating Evolution") != std::string::npos,
                    "report lacks a Rating Evolution section: " + path.string());
            require(last_nonempty_line(text) == "FINAL_ANSWER",
                    "report does not end with FINAL_ANSWER: " + path.string());
            ++reports;
        }
    }
    require(reports == 18, "expected six criterion reports per concept");
}

// ---------------------------------------------------------------------------
// 10. Finetune-prep on the bundled synthetic table
// ---------------------------------------------------------------------------
void criterion_finetune_prep() {
    FixtureLibrary library(g_data_dir / "fixtures");
    CsvTable table = parse_csv(library.ratings_csv());
    require(table.rows.size() == 10, "fixture ratings table must have 10 rows");

    auto technical = build_finetune_records(table, {"technical_feasibility", "Technical"});
    require(technical.records.size() == 10, "expected 10 technical records");
    require(technical.skipped_rows == 0, "no technical row should be skipped");
    for (const auto& record : technical.records)
        require(record.labels.size() == 5, "technical records carry 5 labels");

    auto market = build_finetune_records(table, {"market_feasibility", "Market"});
    require(market.records.size() == 10, "expected 10 market records");
    for (const auto& record : market.records)
        require(record.labels.size() == 3, "market records carry 3 labels");

    // A row with a missing metric is skipped with an explicit count.
    CsvTable flawed = table;
    auto row = table.rows[0];
    row[table.column("editing")] = "";
    flawed.rows.push_back(row);
    auto prep = build_finetune_records(flawed, {"market_feasibility", "Market"});
    require(prep.records.size() == 10, "flawed row must not produce a record");
    require(prep.skipped_rows == 1, "flawed row must be counted as skipped");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--retrieval-digest") {
        std::cout << retrieval_digest();
        return 0;
    }

    if (const char* env = std::getenv("DELIB_DATA_DIR"))
        g_data_dir = env;
    else
        g_data_dir = DELIB_SOURCE_DIR;
    g_self = fs::absolute(argv[0]);
    if (const char* env = std::getenv("DELIB_CLI"))
        g_cli = env;
    else
        g_cli = g_self.parent_path() / "delib";
    g_scratch = fs::temp_directory_path() / "delib_acceptance";
    fs::create_directories(g_scratch);

    struct Criterion {
        const char* name;
        std::function<void()> check;
    };
    const std::vector<Criterion> criteria = {
        {"1 aggregation-exactness", criterion_aggregation},
        {"2 ranking-concordance", criterion_ranking},
        {"3 mean-delta", criterion_mean_delta},
        {"4 protocol-grammar", criterion_protocol_grammar},
        {"5 state-machine-soundness", criterion_state_machine},
        {"6 budget-conservation", criterion_budget_conservation},
        {"7 retrieval-correctness", criterion_retrieval},
        {"8 record-replay-fixpoint", criterion_record_replay},
        {"9 end-to-end-demo", criterion_demo},
        {"10 finetune-prep", criterion_finetune_prep},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        auto start = Clock::now();
        try {
            criterion.check();
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
            std::printf("[PASS] %s (%lld ms)\n", criterion.name,
                        static_cast<long long>(ms.count()));
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] %s: %s\n", criterion.name, e.what());
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
