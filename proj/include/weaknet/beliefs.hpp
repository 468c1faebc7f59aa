#ifndef WEAKNET_BELIEFS_HPP
#define WEAKNET_BELIEFS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weaknet/graph.hpp"

namespace weaknet::beliefs {

/// Finite set of possible states of nature, shared by all agents.
struct StateSpace {
    std::vector<std::string> states;

    Index size() const { return static_cast<Index>(states.size()); }
    Index index_of(const std::string& name) const;
};

/// Per-agent likelihood tables over a shared state space.
///
/// Agent k's table is M x |Z_k|: row theta is the signal distribution
/// L_k(.|theta). Signal spaces may differ across agents.
struct LikelihoodModel {
    struct AgentModel {
        std::vector<std::string> signals;
        Matrix table;

        Index n_signals() const { return static_cast<Index>(signals.size()); }
    };

    std::vector<AgentModel> agents;

    Index n_agents() const { return static_cast<Index>(agents.size()); }
};

/// Beliefs for all agents at one time instant: row k is agent k's pmf over
/// the state space.
using BeliefState = Matrix;

/// One true state per discovered block; sending truths deduplicate into the
/// support set that receiving agents are eventually confined to.
struct TrueStateAssignment {
    std::vector<Index> sending_truths;    // per sending block
    std::vector<Index> receiving_truths;  // per receiving block
    std::vector<Index> per_agent;         // resolved, original agent order
    std::vector<Index> distinct_sending;  // deduplicated sending truths, ascending
};

/// Per-agent self-awareness weights gamma in [0,1], constant per agent with
/// optional step changes over time. gamma scales the Bayesian term of the
/// intermediate update; gamma_max is the supremum over agents and times.
struct AwarenessSchedule {
    std::vector<double> base;                                  // per-agent constant
    std::vector<std::vector<std::pair<Index, double>>> steps;  // (from_time, gamma), sorted

    static AwarenessSchedule constant(std::vector<double> per_agent);

    Index n_agents() const { return static_cast<Index>(base.size()); }
    double gamma(Index agent, Index time) const;
    double gamma_max() const;
    /// Supremum of gamma over one subset of agents (original indices).
    double gamma_max_over(const std::vector<Index>& agents) const;
    /// tau = gamma / gamma_max; zero when gamma_max is zero.
    double tau(Index agent, Index time) const;
};

/// Posterior from one observed signal: prior(theta) * L(signal|theta),
/// renormalized. `likelihood` holds L(signal|theta) per state. Zero prior
/// mass stays zero. Throws ZeroEvidenceError when the evidence term
/// vanishes for every believed state.
Vector bayesian_update(const Vector& prior, const Vector& likelihood);

/// Convex-combination step: output row k = sum_l a_lk * intermediate row l.
BeliefState diffusion_combine(const BeliefState& intermediates, const graph::CombinationMatrix& m);

/// Self-aware intermediate update: (1-gamma) * prior + gamma * posterior.
/// gamma = 0 returns the prior without touching the evidence (this also
/// models the lack of an observation), so ZeroEvidenceError can only occur
/// for gamma > 0.
Vector self_aware_intermediate(const Vector& prior, const Vector& likelihood, double gamma);

/// Predicted distribution of the agent's next signal: m(z) = sum_theta
/// belief(theta) L(z|theta).
Vector forecast(const Vector& belief, const LikelihoodModel::AgentModel& model);

/// States whose likelihoods coincide with the true state's for every
/// signal, within an absolute per-entry tolerance. Always contains the true
/// state itself. Returned ascending.
std::vector<Index> indistinguishable_set(const LikelihoodModel::AgentModel& model,
                                         Index true_state, double tol = 1e-9);

struct IdentifiabilityResult {
    bool identifiable = false;
    std::vector<Index> leftover;   // states other than the truth surviving the intersection
};

/// Whether the intersection of the block members' indistinguishable sets is
/// exactly the true state; the witness lists the surviving impostors.
IdentifiabilityResult globally_identifiable(const LikelihoodModel& model,
                                            const std::vector<Index>& block, Index true_state,
                                            double tol = 1e-9);

/// A signal whose likelihood under the truth weakly dominates its
/// likelihood under every distinguishable state. When no state is
/// distinguishable every signal qualifies vacuously and the first is
/// returned. Returns the first qualifying signal in signal order, or
/// nullopt.
std::optional<Index> prevailing_signal(const LikelihoodModel::AgentModel& model, Index true_state,
                                       double tol = 1e-9);

} // namespace weaknet::beliefs

#endif // WEAKNET_BELIEFS_HPP
