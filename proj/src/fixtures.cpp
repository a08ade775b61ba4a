#include "delib/fixtures.hpp"

#include "delib/errors.hpp"
#include "delib/io.hpp"
#include "delib/strings.hpp"

namespace delib {

using nlohmann::json;

FixtureLibrary::FixtureLibrary(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::path manifest = root_ / "checksums.json";
    if (!std::filesystem::exists(manifest))
        throw FixtureError("fixture checksum manifest not found: " + manifest.string());
    checksums_ = read_json_file(manifest);
}

std::string FixtureLibrary::verified_read(const std::string& relative) const {
    if (!checksums_.contains(relative))
        throw FixtureError("fixture '" + relative + "' has no checksum entry");
    std::filesystem::path path = root_ / relative;
    if (!std::filesystem::exists(path))
        throw FixtureError("fixture file missing: " + path.string());
    std::string content = read_file(path);
    std::string expected = checksums_.at(relative).get<std::string>();
    std::string actual = fnv1a64_hex(content);
    if (actual != expected)
        throw FixtureError("checksum mismatch for '" + relative + "' (expected " + expected +
                           ", got " + actual + ")");
    return content;
}

namespace {

const std::vector<std::string>& concept_files() {
    static const std::vector<std::string> files = {
        "concepts/depthview_3d.json",
        "concepts/precisioncad.json",
        "concepts/pixelmaster.json",
    };
    return files;
}

RatingTable table_from_cells(const json& cells, const std::string& default_rater,
                             const json* rater_by_criterion = nullptr) {
    RatingTable table;
    for (const auto& [concept_id, row] : cells.items()) {
        for (const auto& [criterion_id, value] : row.items()) {
            std::string rater = default_rater;
            if (rater_by_criterion && rater_by_criterion->contains(criterion_id))
                rater = rater_by_criterion->at(criterion_id).get<std::string>();
            table.add({concept_id, criterion_id, value.get<double>(), rater});
        }
    }
    return table;
}

void attach_printed(RatingTable& table, const json& doc, const char* key) {
    if (!doc.contains(key)) return;
    for (const auto& [concept_id, total] : doc.at(key).items())
        table.set_printed_total(concept_id, total.get<double>());
}

}  // namespace

std::vector<ConceptFixture> FixtureLibrary::concepts() const {
    std::vector<ConceptFixture> out;
    for (const auto& file : concept_files()) {
        json doc = json::parse(verified_read(file));
        ConceptFixture fixture;
        fixture.concept_id = doc.at("concept_id").get<std::string>();
        fixture.title = doc.at("title").get<std::string>();
        fixture.description = doc.at("description").get<std::string>();
        if (fixture.description.empty())
            throw FixtureError("concept fixture '" + fixture.concept_id + "' has no description");
        out.push_back(std::move(fixture));
    }
    return out;
}

RatingTable FixtureLibrary::table_pre() const {
    json doc = json::parse(verified_read("tables/table_pre.json"));
    RatingTable table = table_from_cells(doc.at("cells"), "system");
    attach_printed(table, doc, "printed_aggregates");
    return table;
}

RatingTable FixtureLibrary::table_post() const {
    json doc = json::parse(verified_read("tables/table_post.json"));
    RatingTable table = table_from_cells(doc.at("cells"), "system");
    attach_printed(table, doc, "printed_aggregates");
    return table;
}

ComparisonFixture FixtureLibrary::comparison() const {
    json doc = json::parse(verified_read("tables/comparison.json"));
    ComparisonFixture fixture;
    const json* raters =
        doc.contains("expert_rater_by_criterion") ? &doc.at("expert_rater_by_criterion") : nullptr;
    fixture.system = table_from_cells(doc.at("system_cells"), "system");
    fixture.expert = table_from_cells(doc.at("expert_cells"), "expert", raters);
    const json& printed = doc.at("printed");
    for (const auto& [concept_id, total] : printed.at("system_totals").items())
        fixture.system.set_printed_total(concept_id, total.get<double>());
    for (const auto& [concept_id, total] : printed.at("expert_totals").items())
        fixture.expert.set_printed_total(concept_id, total.get<double>());
    for (const auto& [concept_id, delta] : printed.at("delta_subtotals").items())
        fixture.printed_delta_subtotals[concept_id] = delta.get<double>();
    fixture.printed_mean_delta = printed.at("mean_delta").get<double>();
    for (const auto& [concept_id, r] : printed.at("expert_ranks").items())
        fixture.printed_ranks[concept_id] = r.get<int>();
    return fixture;
}

json FixtureLibrary::scenario(const std::string& concept_id) const {
    return json::parse(verified_read("scenarios/" + concept_id + ".json"));
}

std::shared_ptr<FixtureToolBackend> FixtureLibrary::tool_fixtures() const {
    return load_fixtures(json::parse(verified_read("tools/demo_tools.json")));
}

std::string FixtureLibrary::ratings_csv() const { return verified_read("ratings/monitor_ratings.csv"); }

FixtureBundle load_fixture_set(const std::filesystem::path& root, const std::string& name) {
    FixtureLibrary library(root);
    FixtureBundle bundle;
    bundle.name = name;
    if (name == "concepts") {
        bundle.concepts = library.concepts();
        if (bundle.concepts.size() != 3)
            throw FixtureError("concept fixture set must hold exactly three concepts");
    } else if (name == "table_pre") {
        bundle.table = library.table_pre();
    } else if (name == "table_post") {
        bundle.table = library.table_post();
    } else if (name == "comparison") {
        bundle.comparison = library.comparison();
    } else if (name == "scenarios") {
        for (const auto& concept_fixture : library.concepts())
            bundle.scenarios.push_back(library.scenario(concept_fixture.concept_id));
    } else if (name == "tools") {
        bundle.tools = library.tool_fixtures();
    } else {
        throw FixtureError("unknown fixture set '" + name + "'");
    }
    return bundle;
}

}  // namespace delib
