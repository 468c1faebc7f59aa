#ifndef WEAKNET_DIAG_HPP
#define WEAKNET_DIAG_HPP

#include "weaknet/beliefs.hpp"

namespace weaknet::diag {

/// One diagnostic sample attached to an agent and a time step.
struct DiagnosticValue {
    enum class Kind { regret_weak, regret_true, aggregate_risk, forecast_kl, h_value };
    Kind kind;
    double value;
    Index agent;
    Index time;
};

/// -log of the belief mass on the sending-truth support; zero exactly when
/// the full mass sits on the support. Natural log throughout.
double regret_weak(const Vector& belief, const std::vector<Index>& support);

/// -log of the belief at the true state (the KL divergence from the
/// point-mass truth distribution).
double regret_true(const Vector& belief, Index true_state);

/// Network risk: regrets weighted by the Perron vector entries.
double aggregate_risk(const Vector& regrets, const Vector& perron);

/// KL divergence of the agent's forecast from the signal distribution under
/// the truth, with the 0*log(0) = 0 convention. Throws UndefinedKLError if
/// the forecast vanishes somewhere on the truth's support.
double forecast_kl(const Vector& belief, const beliefs::LikelihoodModel::AgentModel& model,
                   Index true_state);

/// Bounded update increment of the self-aware intermediate step:
/// tau * belief(state) * (L(signal|state) / m(signal) - 1), always in [-1,1].
double h_value(const Vector& belief, const beliefs::LikelihoodModel::AgentModel& model,
               Index state, Index signal, double tau);

} // namespace weaknet::diag

#endif // WEAKNET_DIAG_HPP
