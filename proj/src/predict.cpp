#include "weaknet/predict.hpp"

#include <algorithm>
#include <cmath>

namespace weaknet::predict {

LimitPrediction limiting_beliefs(const Matrix& influence, const graph::NetworkPartition& p,
                                 const beliefs::TrueStateAssignment& truth,
                                 const beliefs::StateSpace& space)
{
    LimitPrediction out;
    out.q = Matrix::Zero(p.size(), space.size());
    out.support = truth.distinct_sending;

    for (Index b = 0; b < static_cast<Index>(p.sending_blocks.size()); ++b)
        for (Index agent : p.sending_blocks[b]) {
            out.q(agent, truth.sending_truths[b]) = 1.0;
            out.sending_agents.push_back(agent);
        }
    std::sort(out.sending_agents.begin(), out.sending_agents.end(),
              [&](Index a, Index b) { return p.permutation[a] < p.permutation[b]; });

    // Column j of the influence matrix belongs to the receiving agent in
    // canonical slot n_sending + j; its rows follow the canonical sending
    // order, so block s occupies a contiguous run of rows.
    for (const auto& block : p.receiving_blocks)
        out.receiving_agents.insert(out.receiving_agents.end(), block.begin(), block.end());
    std::sort(out.receiving_agents.begin(), out.receiving_agents.end(),
              [&](Index a, Index b) { return p.permutation[a] < p.permutation[b]; });

    for (Index j = 0; j < static_cast<Index>(out.receiving_agents.size()); ++j) {
        Index agent = out.receiving_agents[j];
        Index row = 0;
        for (Index b = 0; b < static_cast<Index>(p.sending_blocks.size()); ++b) {
            const Index size = static_cast<Index>(p.sending_blocks[b].size());
            out.q(agent, truth.sending_truths[b]) += influence.col(j).segment(row, size).sum();
            row += size;
        }
    }
    return out;
}

ConfinementBand confinement_bands(const LimitPrediction& prediction, const Matrix& confinement,
                                  double gamma_max)
{
    const Index r = static_cast<Index>(prediction.receiving_agents.size());
    const Index m = prediction.n_states();

    ConfinementBand band;
    band.receiving_agents = prediction.receiving_agents;
    band.gamma_max = gamma_max;
    band.half_width = gamma_max * confinement.rowwise().sum();
    band.lower_raw.resize(r, m);
    band.upper_raw.resize(r, m);
    for (Index j = 0; j < r; ++j) {
        const auto q = prediction.q.row(prediction.receiving_agents[j]);
        band.lower_raw.row(j) = q.array() - band.half_width(j);
        band.upper_raw.row(j) = q.array() + band.half_width(j);
    }
    band.lower = band.lower_raw.cwiseMax(0.0).cwiseMin(1.0);
    band.upper = band.upper_raw.cwiseMax(0.0).cwiseMin(1.0);
    return band;
}

Matrix predicted_social_disagreement(const LimitPrediction& prediction)
{
    const Index r = static_cast<Index>(prediction.receiving_agents.size());
    Matrix tv = Matrix::Zero(r, r);
    for (Index i = 0; i < r; ++i)
        for (Index j = i + 1; j < r; ++j) {
            double d = 0.5 * (prediction.q.row(prediction.receiving_agents[i]) -
                              prediction.q.row(prediction.receiving_agents[j]))
                                 .cwiseAbs()
                                 .sum();
            tv(i, j) = tv(j, i) = d;
        }
    return tv;
}

} // namespace weaknet::predict
