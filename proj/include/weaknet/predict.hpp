#ifndef WEAKNET_PREDICT_HPP
#define WEAKNET_PREDICT_HPP

#include "weaknet/beliefs.hpp"
#include "weaknet/graph.hpp"

namespace weaknet::predict {

/// Closed-form limiting beliefs for every agent, in original agent order.
///
/// Sending rows are point masses at the block truth; receiving rows are the
/// influence-weighted mixtures q_k, supported only on the sending truths.
struct LimitPrediction {
    Matrix q;                             // n_agents x n_states
    std::vector<Index> sending_agents;    // original indices, canonical order
    std::vector<Index> receiving_agents;  // original indices, canonical order
    std::vector<Index> support;           // distinct sending truths

    Index n_states() const { return q.cols(); }
};

/// Limiting belief of each receiving agent: q_k(theta) sums the entries of
/// the agent's influence column over every sending block whose truth is
/// theta; blocks sharing a truth accumulate. Off-support states are exactly
/// zero.
LimitPrediction limiting_beliefs(const Matrix& influence, const graph::NetworkPartition& p,
                                 const beliefs::TrueStateAssignment& truth,
                                 const beliefs::StateSpace& space);

/// Interval bounds on self-aware receiving agents' limiting beliefs:
/// q_k +- gamma_max * (C 1)_k per state. Raw bounds follow the theory as
/// stated; clamped bounds intersect them with [0,1] since beliefs are pmfs.
struct ConfinementBand {
    std::vector<Index> receiving_agents;  // original indices, canonical order
    Vector half_width;                    // per receiving agent
    Matrix lower_raw, upper_raw;          // n_receiving x n_states
    Matrix lower, upper;                  // clamped to [0,1]
    double gamma_max = 0.0;
};

ConfinementBand confinement_bands(const LimitPrediction& prediction, const Matrix& confinement,
                                  double gamma_max);

/// Pairwise total-variation distances between receiving agents' limiting
/// beliefs; a symmetric matrix indexed like prediction.receiving_agents.
Matrix predicted_social_disagreement(const LimitPrediction& prediction);

} // namespace weaknet::predict

#endif // WEAKNET_PREDICT_HPP
