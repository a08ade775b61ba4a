#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delib/backend.hpp"
#include "delib/memory.hpp"
#include "delib/model.hpp"
#include "delib/prompt.hpp"
#include "delib/protocol.hpp"
#include "delib/run_config.hpp"
#include "delib/tools.hpp"

namespace delib {

/// Deliberation phases of one criterion conversation:
///   coordinator_turn -> (expert_turn)+ -> report_generation -> done
/// with repair re-asks that stay in place and a turn cap that forces report
/// generation without consensus. Failures terminate in `failed`.
enum class Phase { coordinator_turn, expert_turn, report_generation, done, failed };

struct DeliberationState {
    std::string conversation_id;
    std::string criterion_id;
    Phase phase = Phase::coordinator_turn;
    std::string active_agent;  // expert expected next while phase == expert_turn
    int turn_index = 0;        // completions consumed so far
    std::vector<RatingEvent> rating_history;
    std::vector<RoutingDirective> routing_trace;
    int repair_count = 0;  // repair re-asks used for the pending speaker
    bool consensus = false;
    bool forced_report = false;
    std::string report_text;
    std::string failure_reason;
    std::vector<std::string> phase_trace;  // labels, one per state incl. initial

    bool terminal() const { return phase == Phase::done || phase == Phase::failed; }
};

std::string phase_label(const DeliberationState& state);

/// Static inputs of the transition function for one criterion.
struct StepContext {
    const EvaluationModel* model = nullptr;
    const Criterion* criterion = nullptr;
    Participants participants;
    NameTable names;
    RatingScale scale;
    int max_turns = 24;
    std::set<std::string> known_tools;

    std::vector<std::string> expert_ids() const;
    /// Declaration-order fallback: the expert after `agent_id`, wrapping; the
    /// first expert when the agent is the coordinator or unknown.
    std::string next_expert_after(const std::string& agent_id) const;
};

StepContext make_step_context(const EvaluationModel& model, const std::string& criterion_id,
                              const RunConfig& run);

DeliberationState make_initial_state(const std::string& conversation_id,
                                     const std::string& criterion_id);

/// Who must produce the next completion for this state.
std::string expected_speaker(const DeliberationState& state, const StepContext& ctx);

/// Side effects of one transition, returned as commands for the runner.
struct StepEffects {
    std::vector<ToolRequest> tool_requests;
    std::optional<std::string> repair_instruction;  // re-ask the same agent
    std::vector<std::string> violations;            // advisory, never fatal
    std::optional<RatingEvent> rating;
    std::optional<RoutingDirective> routing;
};

/// Pure transition: consumes one completion for the expected speaker and
/// returns the successor state. All protocol failures become repair commands,
/// reroutes, or advisory violations; nothing throws for message content.
DeliberationState step(const DeliberationState& state, const std::string& completion_text,
                       const StepContext& ctx, StepEffects& effects);

struct ConceptInput {
    std::string id;
    std::string title;
    std::string description;
};

struct TranscriptEntry {
    Message message;
    std::optional<RatingEvent> rating;
    std::optional<std::string> routing;  // resolved target id
    std::vector<ToolCall> tool_calls;
};

struct CriterionOutcome {
    std::string concept_id;
    std::string criterion_id;
    std::string conversation_id;
    bool failed = false;
    std::string failure_reason;
    bool consensus = false;
    bool forced_report = false;
    std::optional<double> final_rating;
    std::vector<std::pair<std::string, std::vector<double>>> rating_evolution;  // expert order
    std::string report_text;
    std::vector<TranscriptEntry> transcript;
    std::vector<ToolCall> tool_audit;
    std::vector<RatingEvent> rating_history;
    std::vector<std::string> violations;
    std::vector<std::string> phase_trace;
    int turns = 0;
};

struct ConceptScorecard {
    std::string concept_id;
    std::string title;
    /// One entry per model criterion in declaration order; absent rating
    /// marks a failed criterion.
    std::vector<std::pair<std::string, std::optional<double>>> ratings;
    std::vector<CriterionOutcome> outcomes;
    bool partial = false;

    std::optional<double> aggregate() const;
};

struct EngineDeps {
    std::shared_ptr<ChatBackend> backend;
    std::shared_ptr<ToolBackend> tool_backend;
    const PromptSet* prompts = nullptr;
    std::shared_ptr<Embedder> embedder;
    SessionRecorder* recorder = nullptr;  // optional
};

/// Conversation ids are "<concept_id>:<criterion_id>".
std::string conversation_id_for(const std::string& concept_id, const std::string& criterion_id);

/// Drives one criterion conversation to done or failed. Backend errors
/// (exhaustion, divergence, transport) yield a failed outcome with the
/// partial transcript preserved; configuration errors propagate.
CriterionOutcome run_criterion(const ConceptInput& concept_input, const std::string& criterion_id,
                               const EvaluationModel& model, const EngineDeps& deps,
                               const RunConfig& run);

/// Runs every model criterion with a fresh memory store and fresh tool
/// budgets each; criteria execute on up to `jobs` threads.
ConceptScorecard run_concept(const ConceptInput& concept_input, const EvaluationModel& model,
                             const EngineDeps& deps, const RunConfig& run, int jobs = 1);

}  // namespace delib
