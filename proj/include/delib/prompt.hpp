#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "delib/model.hpp"
#include "delib/run_config.hpp"

namespace delib {

enum class PromptLayer { system, coordinator, expert, report_generator };

/// A prompt layer body containing placeholder tokens.
///
/// Token grammar (see docs/prompt-grammar.md): an uppercase name wrapped in
/// [] or {}, e.g. [CURRENT DATE] or {TOOL_NAMES}. Names start with A-Z and
/// continue with A-Z, 0-9, '_', ' ', or '&'. Bracketed text that does not fit
/// the grammar ("[1-N sentences ...]") is ordinary prose. An opening bracket
/// whose candidate token never closes is malformed.
struct PromptTemplate {
    PromptLayer layer = PromptLayer::system;
    std::string body;
};

/// Distinct placeholder token names in body order of first appearance.
/// Throws MalformedTokenError on an unterminated token.
std::vector<std::string> extract_placeholders(const PromptTemplate& tmpl);

struct RenderOptions {
    /// Tokens left verbatim for the model to fill ("[X]", "[BRIEF REASON]").
    std::set<std::string> passthrough;
};

struct Rendered {
    std::string text;
    std::vector<std::string> warnings;  // e.g. unused bindings
};

/// Single-pass substitution: every token is replaced from bindings exactly
/// once; binding values are never re-scanned for tokens. A token without a
/// binding raises MissingBindingError unless listed as passthrough. Unused
/// bindings produce warnings, not errors. Deterministic.
Rendered render(const PromptTemplate& tmpl, const std::map<std::string, std::string>& bindings,
                const RenderOptions& options = {});

/// The four layer templates, loaded from prompts/<layer>.txt.
struct PromptSet {
    PromptTemplate system;
    PromptTemplate coordinator;
    PromptTemplate expert;
    PromptTemplate report_generator;

    static PromptSet load_dir(const std::filesystem::path& dir);
};

struct ComposedPrompt {
    std::string system_prompt;
    std::string role_prompt;
    std::vector<std::string> warnings;
};

/// Tokens the engine leaves for the model to fill.
const std::set<std::string>& model_facing_tokens();

/// Renders the system layer plus the agent's role layer for one criterion
/// conversation. The agent must participate in the criterion (coordinator,
/// expert, or the report generator). Fails hard when run.current_date is empty.
ComposedPrompt compose_prompts(const EvaluationModel& model, const std::string& agent_id,
                               const std::string& criterion_id, const RunConfig& run,
                               const PromptSet& prompts);

}  // namespace delib
