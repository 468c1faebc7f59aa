#ifndef WEAKNET_SIM_HPP
#define WEAKNET_SIM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "weaknet/beliefs.hpp"
#include "weaknet/predict.hpp"
#include "weaknet/rng.hpp"
#include "weaknet/scenario.hpp"

namespace weaknet::sim {

enum class UpdateModel { diffusion, self_aware };

/// Monte Carlo run parameters. Runs are deterministic given the scenario
/// and this config: trial t is seeded with child_seed(base_seed, t) and
/// owns its generator, so results do not depend on the thread count.
struct SimulationConfig {
    UpdateModel model = UpdateModel::diffusion;
    Index steps = 1;
    Index trials = 1;
    std::uint64_t base_seed = 1;
    Index record_stride = 1;
    std::optional<beliefs::AwarenessSchedule> awareness;   // required for self_aware
    int threads = 1;
    bool record_forecasts = false;
    bool record_diagnostics = false;
};

/// Recorded beliefs (and optional forecasts/diagnostics) over one or many
/// trials. Storage is flat [trial][time][agent][...]; recorded times are
/// the multiples of the stride, starting at 0.
struct SimulationTrace {
    std::vector<Index> times;
    Index n_agents = 0;
    Index n_states = 0;
    Index trials = 0;
    Index max_signals = 0;                 // width of the forecast block, 0 if disabled
    std::vector<double> beliefs;           // trials * times * agents * states
    std::vector<double> forecasts;         // trials * times * agents * max_signals, -1 padded
    std::vector<double> regret_weak;       // trials * times * agents (empty if disabled)
    std::vector<double> regret_true;
    std::vector<double> forecast_kl;
    std::vector<std::uint64_t> trial_seeds;

    Index n_times() const { return static_cast<Index>(times.size()); }
    double belief(Index trial, Index time_idx, Index agent, Index state) const
    {
        return beliefs[((trial * n_times() + time_idx) * n_agents + agent) * n_states + state];
    }
    double diagnostic(const std::vector<double>& channel, Index trial, Index time_idx,
                      Index agent) const
    {
        return channel[(trial * n_times() + time_idx) * n_agents + agent];
    }
};

/// Draws one signal for an agent from its likelihood row under the truth.
Index sample_signal(const beliefs::LikelihoodModel::AgentModel& model, Index true_state, Rng& rng);

/// One synchronous round: every agent forms its intermediate belief from
/// its observed signal (plain Bayesian or self-aware), then all agents
/// combine. `signals` holds one observed signal index per agent.
/// ZeroEvidenceError carries the offending agent and the time.
beliefs::BeliefState step(const beliefs::BeliefState& beliefs_before, const std::vector<Index>& signals,
                 const graph::CombinationMatrix& m, const beliefs::LikelihoodModel& models,
                 const beliefs::AwarenessSchedule* schedule, Index time);

SimulationTrace run(const scenario::Scenario& s, const SimulationConfig& config);

/// Empirical convergence measured over the trailing window of a trace.
struct ConvergenceReport {
    struct Agent {
        Index agent = 0;                 // original index
        bool receiving = false;
        Vector empirical;                // window-and-trial mean per state
        Vector predicted;                // q row
        double max_deviation = 0.0;
        Vector oscillation;              // per-state variance over the window
        double max_oscillation = 0.0;
        bool band_checked = false;
        bool inside_band = true;         // against the raw (unclamped) bounds
    };
    std::vector<Agent> agents;
    Index window = 0;                    // trailing recorded samples used
    double max_receiving_deviation = 0.0;
    bool all_receiving_inside_band = true;
};

/// Default window: the last 10% of recorded samples, at least 100 (clamped
/// to what was recorded).
Index default_window(const SimulationTrace& trace);

ConvergenceReport assess(const SimulationTrace& trace, const predict::LimitPrediction& prediction,
                         const predict::ConfinementBand* bands, Index window);

} // namespace weaknet::sim

#endif // WEAKNET_SIM_HPP
