#include "delib/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

namespace {
constexpr const char* kFinalAnswer = "FINAL_ANSWER";
}

std::string phase_label(const DeliberationState& state) {
    switch (state.phase) {
        case Phase::coordinator_turn: return "coordinator_turn";
        case Phase::expert_turn: return "expert_turn(" + state.active_agent + ")";
        case Phase::report_generation: return "report_generation";
        case Phase::done: return "done";
        case Phase::failed: return "failed(" + state.failure_reason + ")";
    }
    return "?";
}

std::vector<std::string> StepContext::expert_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : participants.experts) ids.push_back(e.id);
    return ids;
}

std::string StepContext::next_expert_after(const std::string& agent_id) const {
    const auto& experts = participants.experts;
    for (size_t i = 0; i < experts.size(); ++i)
        if (experts[i].id == agent_id) return experts[(i + 1) % experts.size()].id;
    return experts.front().id;
}

StepContext make_step_context(const EvaluationModel& model, const std::string& criterion_id,
                              const RunConfig& run) {
    const Criterion* criterion = model.find_criterion(criterion_id);
    if (!criterion) throw ReferenceError("unknown criterion id '" + criterion_id + "'");
    StepContext ctx;
    ctx.model = &model;
    ctx.criterion = criterion;
    ctx.participants = participants_for(model, criterion_id);
    ctx.names = NameTable::for_criterion(model, criterion_id);
    ctx.scale = model.rating_scale;
    ctx.max_turns = run.max_turns;
    for (const auto& spec : model.tool_specs) ctx.known_tools.insert(spec.id);

    int min_turns = static_cast<int>(ctx.participants.experts.size()) + 2;
    if (run.max_turns < min_turns)
        throw SchemaError("max_turns " + std::to_string(run.max_turns) + " below minimum " +
                          std::to_string(min_turns) + " for criterion '" + criterion_id + "'");
    return ctx;
}

DeliberationState make_initial_state(const std::string& conversation_id,
                                     const std::string& criterion_id) {
    DeliberationState state;
    state.conversation_id = conversation_id;
    state.criterion_id = criterion_id;
    state.phase_trace.push_back(phase_label(state));
    return state;
}

std::string expected_speaker(const DeliberationState& state, const StepContext& ctx) {
    switch (state.phase) {
        case Phase::coordinator_turn: return ctx.participants.coordinator.id;
        case Phase::expert_turn: return state.active_agent;
        case Phase::report_generation: return EvaluationModel::report_generator().id;
        default: throw Error("no speaker for terminal state");
    }
}

namespace {

bool ends_with_sentinel(const std::string& body) {
    return last_nonempty_line(body) == kFinalAnswer;
}

std::string turn_tag(int turn_index, const std::string& speaker) {
    return "turn " + std::to_string(turn_index) + " (" + speaker + ")";
}

}  // namespace

DeliberationState step(const DeliberationState& prev, const std::string& body,
                       const StepContext& ctx, StepEffects& fx) {
    if (prev.terminal()) throw Error("step called on a terminal state");
    DeliberationState s = prev;
    s.turn_index = prev.turn_index + 1;
    const std::string speaker = expected_speaker(prev, ctx);

    if (prev.phase == Phase::report_generation) {
        if (!parse_tool_requests(body).empty())
            fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                    ": report generator issued a tool request; tools are "
                                    "prohibited for this role");
        if (ends_with_sentinel(body)) {
            s.report_text = body;
            s.phase = Phase::done;
            s.repair_count = 0;
        } else if (prev.repair_count == 0) {
            s.repair_count = 1;
            fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                    ": report missing the FINAL_ANSWER sentinel; repair re-ask");
            fx.repair_instruction =
                "Repair: re-issue the full report and end it with 'FINAL_ANSWER' on its own line.";
        } else {
            s.phase = Phase::failed;
            s.failure_reason = "report generator omitted the FINAL_ANSWER sentinel twice";
        }
        s.phase_trace.push_back(phase_label(s));
        return s;
    }

    const bool coordinator_speaking = prev.phase == Phase::coordinator_turn;

    // Tool commands are collected here and executed by the runner before the
    // next completion is requested.
    fx.tool_requests = parse_tool_requests(body);
    bool has_limit_notice = false;
    try {
        has_limit_notice = parse_tool_notice(body, ctx.known_tools).has_value();
    } catch (const UnknownToolNoticeError& e) {
        fx.violations.push_back(turn_tag(s.turn_index, speaker) + ": " + e.what());
    }
    if (fx.tool_requests.empty() && !has_limit_notice)
        fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                ": no tool request and no limit notice");

    if (const AgentRole* agent = ctx.model->find_agent(speaker)) {
        if (agent->max_sentences > 0) {
            int sentences = count_sentences(body);
            if (sentences > agent->max_sentences)
                fx.violations.push_back(turn_tag(s.turn_index, speaker) + ": " +
                                        std::to_string(sentences) + " sentences exceed limit " +
                                        std::to_string(agent->max_sentences));
        }
    }

    // Coordinators do not emit ratings; only expert messages are scanned.
    if (!coordinator_speaking) {
        try {
            if (auto parsed = parse_rating(body, ctx.scale)) {
                double snapped = ctx.scale.snap(parsed->value);
                if (std::abs(snapped - parsed->value) > 1e-9)
                    fx.violations.push_back(turn_tag(s.turn_index, speaker) + ": off-grid rating " +
                                            std::to_string(parsed->value) + " snapped to " +
                                            format_rating(snapped));
                RatingEvent event{speaker, s.turn_index, snapped, parsed->stance};
                s.rating_history.push_back(event);
                fx.rating = event;
            }
        } catch (const OffScaleRatingError& e) {
            fx.violations.push_back(turn_tag(s.turn_index, speaker) + ": " + e.what() +
                                    "; rating ignored");
        }
    }

    std::optional<RoutingDirective> directive;
    try {
        RoutingDirective parsed = parse_routing(body, ctx.names);
        if (parsed.kind == RoutingDirective::Kind::next_expert &&
            parsed.agent_id == ctx.participants.coordinator.id) {
            // The coordinator's role concludes after its opening turn.
            fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                    ": routing to the coordinator after its opening turn");
        } else {
            directive = parsed;
        }
    } catch (const MalformedRoutingError& e) {
        fx.violations.push_back(turn_tag(s.turn_index, speaker) + ": malformed routing line '" +
                                e.line + "'");
    }

    if (!directive) {
        if (prev.repair_count == 0) {
            s.repair_count = 1;
            fx.repair_instruction =
                "Repair: end your message with exactly one participant name on its own line, or "
                "'Report_Generator' once consensus is reached.";
            s.phase_trace.push_back(phase_label(s));
            return s;
        }
        std::string fallback = ctx.next_expert_after(speaker);
        fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                ": repeated malformed routing; falling back to declared order "
                                "expert '" +
                                fallback + "'");
        directive = RoutingDirective::to_agent(fallback);
    }
    s.repair_count = 0;
    fx.routing = directive;
    s.routing_trace.push_back(*directive);

    if (directive->kind == RoutingDirective::Kind::report_generator) {
        ConsensusStatus status = detect_consensus(s.rating_history, ctx.expert_ids());
        if (status.reached) {
            s.consensus = true;
            s.phase = Phase::report_generation;
            s.active_agent.clear();
        } else {
            std::string holdout = status.holdouts.empty() ? ctx.participants.experts.front().id
                                                          : status.holdouts.front();
            fx.violations.push_back(turn_tag(s.turn_index, speaker) +
                                    ": premature Report_Generator routing; rerouted to holdout '" +
                                    holdout + "'");
            s.phase = Phase::expert_turn;
            s.active_agent = holdout;
        }
    } else {
        s.phase = Phase::expert_turn;
        s.active_agent = directive->agent_id;
    }

    // Turn cap. The final slot is reserved for the report turn.
    if (s.phase == Phase::expert_turn && s.turn_index >= ctx.max_turns - 1) {
        fx.violations.push_back("turn cap " + std::to_string(ctx.max_turns) +
                                " reached; forcing report generation without consensus");
        s.phase = Phase::report_generation;
        s.active_agent.clear();
        s.forced_report = true;
        s.consensus = false;
    }

    s.phase_trace.push_back(phase_label(s));
    return s;
}

std::string conversation_id_for(const std::string& concept_id, const std::string& criterion_id) {
    return concept_id + ":" + criterion_id;
}

namespace {

std::string turn_instruction(const ConceptInput& concept_input, const DeliberationState& state,
                             const StepContext& ctx,
                             const std::optional<std::string>& repair) {
    std::string text = "Product concept: " + concept_input.title + "\n" + concept_input.description + "\n\n";
    switch (state.phase) {
        case Phase::coordinator_turn:
            text += "Open the deliberation for criterion '" + ctx.criterion->display_name +
                    "' and name the first expert.";
            break;
        case Phase::expert_turn:
            text += "Continue the deliberation.";
            break;
        case Phase::report_generation:
            text += "Synthesize the deliberation into the criterion report.";
            break;
        default:
            break;
    }
    if (repair) text += "\n" + *repair;
    return text;
}

}  // namespace

std::optional<double> ConceptScorecard::aggregate() const {
    double sum = 0.0;
    for (const auto& [criterion, rating] : ratings) {
        if (!rating) return std::nullopt;
        sum += *rating;
    }
    return sum;
}

CriterionOutcome run_criterion(const ConceptInput& concept_input, const std::string& criterion_id,
                               const EvaluationModel& model, const EngineDeps& deps,
                               const RunConfig& run) {
    StepContext ctx = make_step_context(model, criterion_id, run);

    CriterionOutcome outcome;
    outcome.concept_id = concept_input.id;
    outcome.criterion_id = criterion_id;
    outcome.conversation_id = conversation_id_for(concept_input.id, criterion_id);

    MemoryStore store(deps.embedder->dimension());
    ToolPool pool(model, deps.tool_backend, run.tool_limits);
    DeliberationState state = make_initial_state(outcome.conversation_id, criterion_id);
    std::optional<std::string> repair;

    while (!state.terminal()) {
        std::string speaker = expected_speaker(state, ctx);
        ComposedPrompt composed = compose_prompts(model, speaker, criterion_id, run, *deps.prompts);
        for (const auto& warning : composed.warnings) outcome.violations.push_back(warning);

        // Retrieval query: the latest hand-off message, or the concept text
        // at the opening turn.
        const auto& messages = store.chat_messages();
        std::string query = messages.empty() ? concept_input.title + " " + concept_input.description
                                             : messages.back().text;
        TurnRequest request;
        request.conversation_id = outcome.conversation_id;
        request.agent_id = speaker;
        request.system_prompt = composed.system_prompt;
        request.role_prompt = composed.role_prompt;
        request.context = store.build_context(speaker, run.recent_window, run.retrieval_k, query,
                                              *deps.embedder);
        request.instruction = turn_instruction(concept_input, state, ctx, repair);

        Completion completion;
        try {
            completion = deps.backend->complete(request);
        } catch (const BackendError& e) {
            state.failure_reason = e.what();
            state.phase = Phase::failed;
            state.phase_trace.push_back(phase_label(state));
            break;
        }
        if (deps.recorder)
            deps.recorder->add(outcome.conversation_id, speaker, request.digest(),
                               completion.text);

        StepEffects fx;
        state = step(state, completion.text, ctx, fx);

        TranscriptEntry entry;
        entry.message = {speaker, state.turn_index, completion.text};
        entry.rating = fx.rating;
        if (fx.routing)
            entry.routing = fx.routing->kind == RoutingDirective::Kind::report_generator
                                ? EvaluationModel::report_generator().id
                                : fx.routing->agent_id;

        // Evidence lands in tool memory before the chat message and before
        // the next completion is requested.
        for (const auto& tool_request : fx.tool_requests) {
            try {
                ToolCall call = pool.invoke(outcome.conversation_id, speaker,
                                            tool_request.tool_id, tool_request.query,
                                            state.turn_index);
                entry.tool_calls.push_back(call);
                if (call.status == ToolCallStatus::ok)
                    store.append(ChunkSource::tool(call.tool_id, call.call_id), call.result_text,
                                 *deps.embedder);
                else if (call.status == ToolCallStatus::budget_exhausted)
                    outcome.violations.push_back(turn_tag(state.turn_index, speaker) +
                                                 ": tool budget exhausted for '" +
                                                 call.tool_id + "'");
            } catch (const ToolError& e) {
                outcome.violations.push_back(turn_tag(state.turn_index, speaker) + ": " +
                                             e.what());
            }
        }
        store.append(ChunkSource::chat(speaker, state.turn_index), completion.text,
                     *deps.embedder);

        for (auto& v : fx.violations) outcome.violations.push_back(std::move(v));
        repair = fx.repair_instruction;
        outcome.transcript.push_back(std::move(entry));
    }

    outcome.failed = state.phase == Phase::failed;
    outcome.failure_reason = state.failure_reason;
    outcome.consensus = state.consensus;
    outcome.forced_report = state.forced_report;
    outcome.report_text = state.report_text;
    outcome.rating_history = state.rating_history;
    outcome.phase_trace = state.phase_trace;
    outcome.turns = state.turn_index;
    outcome.tool_audit = pool.audit_for(outcome.conversation_id);
    if (!outcome.failed && !state.rating_history.empty())
        outcome.final_rating = state.rating_history.back().value;

    // Rating evolution in expert declaration order, then any other speakers.
    std::vector<std::string> order = ctx.expert_ids();
    for (const auto& event : state.rating_history)
        if (std::find(order.begin(), order.end(), event.speaker) == order.end())
            order.push_back(event.speaker);
    for (const auto& agent_id : order) {
        std::vector<double> values;
        for (const auto& event : state.rating_history)
            if (event.speaker == agent_id) values.push_back(event.value);
        if (!values.empty()) outcome.rating_evolution.emplace_back(agent_id, std::move(values));
    }
    return outcome;
}

ConceptScorecard run_concept(const ConceptInput& concept_input, const EvaluationModel& model,
                             const EngineDeps& deps, const RunConfig& run, int jobs) {
    ConceptScorecard scorecard;
    scorecard.concept_id = concept_input.id;
    scorecard.title = concept_input.title;
    scorecard.outcomes.resize(model.criteria.size());

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= model.criteria.size()) return;
            try {
                scorecard.outcomes[i] =
                    run_criterion(concept_input, model.criteria[i].id, model, deps, run);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(model.criteria.size())));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (size_t i = 0; i < model.criteria.size(); ++i) {
        const CriterionOutcome& outcome = scorecard.outcomes[i];
        std::optional<double> rating =
            outcome.failed ? std::nullopt : outcome.final_rating;
        if (!rating) scorecard.partial = true;
        scorecard.ratings.emplace_back(model.criteria[i].id, rating);
    }
    return scorecard;
}

}  // namespace delib
