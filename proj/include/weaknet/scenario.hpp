#ifndef WEAKNET_SCENARIO_HPP
#define WEAKNET_SCENARIO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "weaknet/beliefs.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/predict.hpp"

namespace weaknet::sim {
struct SimulationTrace;
struct ConvergenceReport;
}

namespace weaknet::scenario {

/// A fully validated experiment definition: network, state space, per-agent
/// likelihoods, block truths, priors and (optionally) awareness weights.
struct Scenario {
    std::string name;
    std::string description;
    graph::CombinationMatrix matrix;
    graph::NetworkPartition partition;
    beliefs::StateSpace space;
    beliefs::LikelihoodModel models;
    beliefs::TrueStateAssignment truth;
    Matrix priors;                                          // n_agents x n_states
    std::optional<beliefs::AwarenessSchedule> awareness;

    Index n_agents() const { return matrix.size(); }
    Index n_states() const { return space.size(); }
};

/// Loads and validates a scenario file (see the README for the format).
/// Throws IoError for unreadable paths, ParseError for malformed content
/// and ValidationError when a section violates a model invariant.
Scenario load(const std::string& path);

/// Serializes a scenario back to the canonical file format.
void save(const Scenario& s, const std::string& path);

/// Which closed-form result the scenario supports, derived without
/// simulation.
enum class PredictionRegime {
    exact_limit,     // plain diffusion with indistinguishability satisfied
    confined_band,   // self-aware updates; beliefs confined around the limit
    unsupported      // neither set of preconditions holds
};

/// Static feasibility report for the closed-form predictions.
struct AssumptionReport {
    struct SendingBlock {
        std::vector<Index> agents;                 // original indices
        Index true_state = 0;
        bool identifiable = false;
        std::vector<Index> leftover;               // impostor states when not
        bool prevailing_all = false;               // every member has a prevailing signal
        std::vector<Index> missing_prevailing;     // members without one
        bool positive_prior = false;               // some member starts positive at the truth
    };
    struct ReceivingAgent {
        Index agent = 0;                           // original index
        bool indistinguishable = false;            // every sending truth inside the agent's set
        std::vector<Index> violating_truths;       // sending truths outside the set
    };

    std::vector<SendingBlock> sending;
    std::vector<ReceivingAgent> receiving;
    bool sending_ok = false;
    bool receiving_ok = false;
    PredictionRegime regime = PredictionRegime::unsupported;
};

AssumptionReport check_assumptions(const Scenario& s);

/// Writes a trace as CSV: one row per (trial, time, agent) with the belief
/// per state, then forecast and diagnostic columns when the trace carries
/// them. Numerals use 12 significant digits and '.' decimals; column order
/// follows the state space.
void export_trace(const sim::SimulationTrace& trace, const Scenario& s, const std::string& path);
void export_trace(const sim::SimulationTrace& trace, const Scenario& s, std::ostream& out);

/// Side-by-side report of predicted versus empirical limits, the assumption
/// report and band status. Plain text or JSON.
struct ReportInputs {
    const Scenario& scenario;
    const AssumptionReport& assumptions;
    const predict::LimitPrediction& prediction;
    const predict::ConfinementBand* bands = nullptr;          // optional
    const sim::ConvergenceReport* convergence = nullptr;      // optional
};

void write_report(const ReportInputs& in, std::ostream& out, bool as_json);

} // namespace weaknet::scenario

#endif // WEAKNET_SCENARIO_HPP
