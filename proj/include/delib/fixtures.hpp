#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delib/scoring.hpp"
#include "delib/tools.hpp"

namespace delib {

struct ConceptFixture {
    std::string concept_id;
    std::string title;
    std::string description;
};

/// Table of system and expert cells plus the values printed in the source
/// sheet (kept as printed so discrepancies stay visible).
struct ComparisonFixture {
    RatingTable system;
    RatingTable expert;
    std::map<std::string, double> printed_delta_subtotals;
    double printed_mean_delta = 0.0;
    std::map<std::string, int> printed_ranks;
};

/// Checksummed access to the bundled fixture files. Every read verifies the
/// file against fixtures/checksums.json to catch silent drift.
class FixtureLibrary {
public:
    explicit FixtureLibrary(std::filesystem::path root);

    std::vector<ConceptFixture> concepts() const;
    /// Pre- and post-calibration rating sheets, printed aggregates attached.
    RatingTable table_pre() const;
    RatingTable table_post() const;
    ComparisonFixture comparison() const;
    nlohmann::json scenario(const std::string& concept_id) const;
    std::shared_ptr<FixtureToolBackend> tool_fixtures() const;
    std::string ratings_csv() const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::string verified_read(const std::string& relative) const;
    std::filesystem::path root_;
    nlohmann::json checksums_;
};

struct FixtureBundle {
    std::string name;
    std::vector<ConceptFixture> concepts;
    std::optional<RatingTable> table;
    std::optional<ComparisonFixture> comparison;
    std::shared_ptr<FixtureToolBackend> tools;
    std::vector<nlohmann::json> scenarios;
};

/// Named fixture sets: "concepts", "table_pre", "table_post", "comparison",
/// "scenarios", "tools". Unknown names and checksum mismatches raise
/// FixtureError.
FixtureBundle load_fixture_set(const std::filesystem::path& root, const std::string& name);

}  // namespace delib
