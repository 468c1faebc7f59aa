#include "weaknet/beliefs.hpp"

#include <algorithm>
#include <cmath>

namespace weaknet::beliefs {

Index StateSpace::index_of(const std::string& name) const
{
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) throw ValidationError("states", "unknown state '" + name + "'");
    return static_cast<Index>(it - states.begin());
}

AwarenessSchedule AwarenessSchedule::constant(std::vector<double> per_agent)
{
    AwarenessSchedule s;
    s.base = std::move(per_agent);
    s.steps.resize(s.base.size());
    return s;
}

double AwarenessSchedule::gamma(Index agent, Index time) const
{
    double g = base[agent];
    if (agent < static_cast<Index>(steps.size()))
        for (const auto& [from, value] : steps[agent]) {
            if (time < from) break;
            g = value;
        }
    return g;
}

double AwarenessSchedule::gamma_max() const
{
    double g = 0.0;
    for (double b : base) g = std::max(g, b);
    for (const auto& agent_steps : steps)
        for (const auto& [from, value] : agent_steps) g = std::max(g, value);
    return g;
}

double AwarenessSchedule::gamma_max_over(const std::vector<Index>& agents) const
{
    double g = 0.0;
    for (Index k : agents) {
        g = std::max(g, base[k]);
        if (k < static_cast<Index>(steps.size()))
            for (const auto& [from, value] : steps[k]) g = std::max(g, value);
    }
    return g;
}

double AwarenessSchedule::tau(Index agent, Index time) const
{
    double gmax = gamma_max();
    return gmax > 0.0 ? gamma(agent, time) / gmax : 0.0;
}

Vector bayesian_update(const Vector& prior, const Vector& likelihood)
{
    double evidence = prior.dot(likelihood);
    if (evidence <= 0.0) throw ZeroEvidenceError(-1, -1);
    return (prior.array() * likelihood.array()).matrix() / evidence;
}

BeliefState diffusion_combine(const BeliefState& intermediates, const graph::CombinationMatrix& m)
{
    return m.weights.transpose() * intermediates;
}

Vector self_aware_intermediate(const Vector& prior, const Vector& likelihood, double gamma)
{
    if (gamma == 0.0) return prior;
    return (1.0 - gamma) * prior + gamma * bayesian_update(prior, likelihood);
}

Vector forecast(const Vector& belief, const LikelihoodModel::AgentModel& model)
{
    return model.table.transpose() * belief;
}

std::vector<Index> indistinguishable_set(const LikelihoodModel::AgentModel& model,
                                         Index true_state, double tol)
{
    std::vector<Index> set;
    for (Index theta = 0; theta < model.table.rows(); ++theta) {
        bool match = true;
        for (Index z = 0; z < model.table.cols() && match; ++z)
            match = std::abs(model.table(theta, z) - model.table(true_state, z)) <= tol;
        if (match) set.push_back(theta);
    }
    return set;
}

IdentifiabilityResult globally_identifiable(const LikelihoodModel& model,
                                            const std::vector<Index>& block, Index true_state,
                                            double tol)
{
    const Index m = model.agents.empty() ? 0 : model.agents.front().table.rows();
    std::vector<char> survives(m, 1);
    for (Index k : block) {
        std::vector<char> in_set(m, 0);
        for (Index theta : indistinguishable_set(model.agents[k], true_state, tol))
            in_set[theta] = 1;
        for (Index theta = 0; theta < m; ++theta) survives[theta] &= in_set[theta];
    }
    IdentifiabilityResult r;
    for (Index theta = 0; theta < m; ++theta)
        if (survives[theta] && theta != true_state) r.leftover.push_back(theta);
    r.identifiable = r.leftover.empty();
    return r;
}

std::optional<Index> prevailing_signal(const LikelihoodModel::AgentModel& model, Index true_state,
                                       double tol)
{
    auto set = indistinguishable_set(model, true_state, tol);
    std::vector<Index> distinguishable;
    for (Index theta = 0; theta < model.table.rows(); ++theta)
        if (std::find(set.begin(), set.end(), theta) == set.end())
            distinguishable.push_back(theta);
    if (distinguishable.empty()) return model.n_signals() > 0 ? std::optional<Index>(0) : std::nullopt;

    for (Index z = 0; z < model.n_signals(); ++z) {
        bool dominates = true;
        for (Index theta : distinguishable)
            if (model.table(true_state, z) - model.table(theta, z) < 0.0) {
                dominates = false;
                break;
            }
        if (dominates) return z;
    }
    return std::nullopt;
}

} // namespace weaknet::beliefs
