#include "weaknet/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "weaknet/diag.hpp"

namespace weaknet::sim {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Long runs drive off-support mass below representable magnitudes; clamp
// and renormalize so rows stay valid pmfs.
void clamp_underflow(beliefs::BeliefState& state)
{
    bool touched = false;
    for (Index k = 0; k < state.rows(); ++k)
        for (Index t = 0; t < state.cols(); ++t)
            if (state(k, t) != 0.0 && state(k, t) < kUnderflow) {
                state(k, t) = 0.0;
                touched = true;
            }
    if (touched)
        for (Index k = 0; k < state.rows(); ++k) state.row(k) /= state.row(k).sum();
}

} // namespace

Index sample_signal(const beliefs::LikelihoodModel::AgentModel& model, Index true_state, Rng& rng)
{
    return rng.categorical(model.table.row(true_state));
}

beliefs::BeliefState step(const beliefs::BeliefState& beliefs_before,
                          const std::vector<Index>& signals, const graph::CombinationMatrix& m,
                          const beliefs::LikelihoodModel& models,
                          const beliefs::AwarenessSchedule* schedule, Index time)
{
    const Index n = beliefs_before.rows();
    beliefs::BeliefState intermediates(n, beliefs_before.cols());
    for (Index k = 0; k < n; ++k) {
        const auto& model = models.agents[k];
        Vector likelihood = model.table.col(signals[k]);
        Vector prior = beliefs_before.row(k);
        try {
            intermediates.row(k) =
                schedule ? beliefs::self_aware_intermediate(prior, likelihood,
                                                            schedule->gamma(k, time))
                         : beliefs::bayesian_update(prior, likelihood);
        } catch (const ZeroEvidenceError&) {
            throw ZeroEvidenceError(k, time);
        }
    }
    return beliefs::diffusion_combine(intermediates, m);
}

SimulationTrace run(const scenario::Scenario& s, const SimulationConfig& config)
{
    if (config.steps < 0 || config.trials < 1 || config.record_stride < 1)
        throw ValidationError("simulation", "steps must be >= 0, trials and stride >= 1");
    const beliefs::AwarenessSchedule* schedule = nullptr;
    if (config.model == UpdateModel::self_aware) {
        if (!config.awareness)
            throw ValidationError("simulation", "self-aware model requires an awareness schedule");
        schedule = &*config.awareness;
    }

    const Index n = s.n_agents();
    const Index m = s.n_states();

    SimulationTrace trace;
    trace.n_agents = n;
    trace.n_states = m;
    trace.trials = config.trials;
    for (Index i = 0; i <= config.steps; i += config.record_stride) trace.times.push_back(i);
    const Index n_times = trace.n_times();

    trace.beliefs.assign(static_cast<std::size_t>(config.trials) * n_times * n * m, 0.0);
    if (config.record_forecasts) {
        for (const auto& agent : s.models.agents)
            trace.max_signals = std::max(trace.max_signals, agent.n_signals());
        trace.forecasts.assign(
            static_cast<std::size_t>(config.trials) * n_times * n * trace.max_signals, -1.0);
    }
    if (config.record_diagnostics) {
        std::size_t cells = static_cast<std::size_t>(config.trials) * n_times * n;
        trace.regret_weak.assign(cells, kNaN);
        trace.regret_true.assign(cells, kNaN);
        trace.forecast_kl.assign(cells, kNaN);
    }
    trace.trial_seeds.resize(config.trials);
    for (Index t = 0; t < config.trials; ++t)
        trace.trial_seeds[t] = child_seed(config.base_seed, static_cast<std::uint64_t>(t));

    auto record = [&](Index trial, Index slot, const beliefs::BeliefState& state) {
        std::size_t base = (static_cast<std::size_t>(trial) * n_times + slot) * n;
        for (Index k = 0; k < n; ++k) {
            for (Index t = 0; t < m; ++t) trace.beliefs[(base + k) * m + t] = state(k, t);
            if (config.record_forecasts) {
                Vector f = beliefs::forecast(state.row(k), s.models.agents[k]);
                for (Index z = 0; z < f.size(); ++z)
                    trace.forecasts[(base + k) * trace.max_signals + z] = f(z);
            }
            if (config.record_diagnostics) {
                Vector row = state.row(k);
                try {
                    trace.regret_weak[base + k] = diag::regret_weak(row, s.truth.distinct_sending);
                } catch (const UndefinedRegretError&) {}
                try {
                    trace.regret_true[base + k] = diag::regret_true(row, s.truth.per_agent[k]);
                } catch (const UndefinedRegretError&) {}
                try {
                    trace.forecast_kl[base + k] =
                        diag::forecast_kl(row, s.models.agents[k], s.truth.per_agent[k]);
                } catch (const UndefinedKLError&) {}
            }
        }
    };

    auto run_trial = [&](Index trial) {
        Rng rng(trace.trial_seeds[trial]);
        beliefs::BeliefState state = s.priors;
        Index slot = 0;
        record(trial, slot++, state);
        std::vector<Index> signals(n);
        for (Index i = 1; i <= config.steps; ++i) {
            for (Index k = 0; k < n; ++k)
                signals[k] = sample_signal(s.models.agents[k], s.truth.per_agent[k], rng);
            state = step(state, signals, s.matrix, s.models, schedule, i);
            clamp_underflow(state);
            if (i % config.record_stride == 0) record(trial, slot++, state);
        }
    };

    int threads = std::max(1, config.threads);
    if (threads == 1 || config.trials == 1) {
        for (Index t = 0; t < config.trials; ++t) run_trial(t);
    } else {
        std::atomic<Index> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (Index t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
                    try {
                        run_trial(t);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return trace;
}

Index default_window(const SimulationTrace& trace)
{
    Index w = std::max<Index>(trace.n_times() / 10, 100);
    return std::min(w, trace.n_times());
}

ConvergenceReport assess(const SimulationTrace& trace, const predict::LimitPrediction& prediction,
                         const predict::ConfinementBand* bands, Index window)
{
    if (window < 1 || window > trace.n_times()) throw WindowError(window, trace.n_times());
    const Index n = trace.n_agents;
    const Index m = trace.n_states;
    const Index first = trace.n_times() - window;

    std::vector<Index> band_row(n, -1);
    if (bands)
        for (Index j = 0; j < static_cast<Index>(bands->receiving_agents.size()); ++j)
            band_row[bands->receiving_agents[j]] = j;
    std::vector<char> receiving(n, 0);
    for (Index k : prediction.receiving_agents) receiving[k] = 1;

    ConvergenceReport report;
    report.window = window;
    for (Index k = 0; k < n; ++k) {
        ConvergenceReport::Agent a;
        a.agent = k;
        a.receiving = receiving[k] != 0;
        a.predicted = prediction.q.row(k);
        a.empirical = Vector::Zero(m);
        a.oscillation = Vector::Zero(m);

        for (Index trial = 0; trial < trace.trials; ++trial) {
            Vector mean = Vector::Zero(m);
            Vector sq = Vector::Zero(m);
            Vector lo = Vector::Constant(m, 2.0), hi = Vector::Constant(m, -1.0);
            for (Index w = first; w < trace.n_times(); ++w)
                for (Index t = 0; t < m; ++t) {
                    double v = trace.belief(trial, w, k, t);
                    mean(t) += v;
                    sq(t) += v * v;
                    lo(t) = std::min(lo(t), v);
                    hi(t) = std::max(hi(t), v);
                }
            mean /= static_cast<double>(window);
            a.empirical += mean;
            // a constant window has exactly zero variance; the one-pass
            // formula would leave rounding residue
            if (window > 1)
                for (Index t = 0; t < m; ++t)
                    if (lo(t) != hi(t))
                        a.oscillation(t) += std::max(
                            (sq(t) - window * mean(t) * mean(t)) / static_cast<double>(window - 1),
                            0.0);
        }
        a.empirical /= static_cast<double>(trace.trials);
        a.oscillation /= static_cast<double>(trace.trials);
        a.max_deviation = (a.empirical - a.predicted).cwiseAbs().maxCoeff();
        a.max_oscillation = a.oscillation.maxCoeff();

        if (bands && band_row[k] >= 0) {
            a.band_checked = true;
            Index j = band_row[k];
            for (Index t = 0; t < m; ++t)
                if (a.empirical(t) < bands->lower_raw(j, t) ||
                    a.empirical(t) > bands->upper_raw(j, t))
                    a.inside_band = false;
            report.all_receiving_inside_band &= a.inside_band;
        }
        if (a.receiving)
            report.max_receiving_deviation =
                std::max(report.max_receiving_deviation, a.max_deviation);
        report.agents.push_back(std::move(a));
    }
    return report;
}

} // namespace weaknet::sim
