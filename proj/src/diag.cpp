#include "weaknet/diag.hpp"

#include <cmath>

namespace weaknet::diag {

double regret_weak(const Vector& belief, const std::vector<Index>& support)
{
    double mass = 0.0;
    for (Index theta : support) mass += belief(theta);
    if (mass <= 0.0) throw UndefinedRegretError();
    return -std::log(std::min(mass, 1.0));
}

double regret_true(const Vector& belief, Index true_state)
{
    double mass = belief(true_state);
    if (mass <= 0.0) throw UndefinedRegretError();
    return -std::log(std::min(mass, 1.0));
}

double aggregate_risk(const Vector& regrets, const Vector& perron)
{
    return perron.dot(regrets);
}

double forecast_kl(const Vector& belief, const beliefs::LikelihoodModel::AgentModel& model,
                   Index true_state)
{
    Vector m = beliefs::forecast(belief, model);
    double kl = 0.0;
    for (Index z = 0; z < model.n_signals(); ++z) {
        double p = model.table(true_state, z);
        if (p <= 0.0) continue;   // 0*log(0) = 0
        if (m(z) <= 0.0) throw UndefinedKLError();
        kl += p * std::log(p / m(z));
    }
    return std::max(kl, 0.0);
}

double h_value(const Vector& belief, const beliefs::LikelihoodModel::AgentModel& model,
               Index state, Index signal, double tau)
{
    if (tau == 0.0) return 0.0;
    double m = beliefs::forecast(belief, model)(signal);
    if (m <= 0.0) throw ZeroEvidenceError(-1, -1);
    return tau * belief(state) * (model.table(state, signal) / m - 1.0);
}

} // namespace weaknet::diag
