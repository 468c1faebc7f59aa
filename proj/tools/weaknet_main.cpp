// weaknet — analyze, predict, simulate and verify social learning over
// weakly-connected directed networks.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "weaknet/diag.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/predict.hpp"
#include "weaknet/scenario.hpp"
#include "weaknet/sim.hpp"

using namespace weaknet;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kVerification = 2, kIo = 3 };

std::string resolve_path(const std::string& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("WEAKNET_FIXTURES")) {
        fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
        candidate += ".scn";
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_vector(const Vector& v)
{
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v(i));
    }
    return out + "]";
}

nlohmann::json json_vector(const Vector& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

nlohmann::json json_matrix(const Matrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) rows.push_back(json_vector(m.row(i)));
    return rows;
}

std::ostream& open_output(std::ofstream& file, const std::string& out_path)
{
    if (out_path.empty()) return std::cout;
    file.open(out_path);
    if (!file) throw IoError(out_path);
    return file;
}

// gamma_max for the confinement bands: the supremum over receiving agents,
// whose update noise is what keeps the limit from being exact.
double receiving_gamma_max(const scenario::Scenario& s)
{
    if (!s.awareness) return 0.0;
    std::vector<Index> receiving;
    for (const auto& block : s.partition.receiving_blocks)
        receiving.insert(receiving.end(), block.begin(), block.end());
    return s.awareness->gamma_max_over(receiving);
}

int cmd_analyze(const std::string& path, const std::string& out_path, bool as_json)
{
    scenario::Scenario s = scenario::load(resolve_path(path));
    graph::SpectralSummary spectral = graph::summarize(s.matrix, s.partition);
    scenario::AssumptionReport assumptions = scenario::check_assumptions(s);

    std::ofstream file;
    std::ostream& out = open_output(file, out_path);

    if (as_json) {
        nlohmann::json j;
        j["scenario"] = s.name;
        j["agents"] = s.n_agents();
        j["states"] = s.space.states;
        j["sending_blocks"] = nlohmann::json::array();
        for (std::size_t b = 0; b < s.partition.sending_blocks.size(); ++b) {
            nlohmann::json blk;
            blk["agents"] = nlohmann::json::array();
            for (Index k : s.partition.sending_blocks[b]) blk["agents"].push_back(s.matrix.labels[k]);
            blk["true_state"] = s.space.states[s.truth.sending_truths[b]];
            blk["perron"] = json_vector(spectral.sending_perron[b]);
            j["sending_blocks"].push_back(std::move(blk));
        }
        j["receiving_blocks"] = nlohmann::json::array();
        for (std::size_t b = 0; b < s.partition.receiving_blocks.size(); ++b) {
            nlohmann::json blk;
            blk["agents"] = nlohmann::json::array();
            for (Index k : s.partition.receiving_blocks[b])
                blk["agents"].push_back(s.matrix.labels[k]);
            blk["true_state"] = s.space.states[s.truth.receiving_truths[b]];
            blk["spectral_radius"] = spectral.receiving_radii[b];
            if (spectral.receiving_perron[b])
                blk["perron"] = json_vector(*spectral.receiving_perron[b]);
            j["receiving_blocks"].push_back(std::move(blk));
        }
        if (s.partition.n_receiving > 0) {
            j["influence_T"] = json_matrix(spectral.influence.transpose());
            j["confinement"] = json_matrix(spectral.confinement);
            j["confinement_row_sums"] = json_vector(spectral.confinement.rowwise().sum());
        }
        j["limiting_power"] = json_matrix(spectral.limit_power);
        j["sending_ok"] = assumptions.sending_ok;
        j["receiving_ok"] = assumptions.receiving_ok;
        j["warnings"] = s.partition.warnings;
        out << j.dump(2) << "\n";
        return kOk;
    }

    out << "scenario: " << s.name << " (" << s.n_agents() << " agents, " << s.n_states()
        << " states)\n";
    out << "sending blocks:\n";
    for (std::size_t b = 0; b < s.partition.sending_blocks.size(); ++b) {
        out << "  {";
        const auto& block = s.partition.sending_blocks[b];
        for (std::size_t i = 0; i < block.size(); ++i)
            out << (i ? "," : "") << s.matrix.labels[block[i]];
        out << "}  truth " << s.space.states[s.truth.sending_truths[b]] << "  y = "
            << fmt_vector(spectral.sending_perron[b]) << "\n";
    }
    if (s.partition.receiving_blocks.empty()) {
        out << "receiving blocks: none (network is strongly connected)\n";
    } else {
        out << "receiving blocks:\n";
        for (std::size_t b = 0; b < s.partition.receiving_blocks.size(); ++b) {
            out << "  {";
            const auto& block = s.partition.receiving_blocks[b];
            for (std::size_t i = 0; i < block.size(); ++i)
                out << (i ? "," : "") << s.matrix.labels[block[i]];
            out << "}  truth " << s.space.states[s.truth.receiving_truths[b]]
                << "  rho = " << fmt(spectral.receiving_radii[b]);
            if (spectral.receiving_perron[b])
                out << "  y = " << fmt_vector(*spectral.receiving_perron[b]);
            out << "\n";
        }
        out << "influence columns (one row per receiving agent):\n";
        Index j = 0;
        for (const auto& block : s.partition.receiving_blocks)
            for (Index k : block) {
                out << "  agent " << s.matrix.labels[k] << ": "
                    << fmt_vector(spectral.influence.col(j)) << "\n";
                ++j;
            }
        out << "confinement row sums (C*1):\n";
        j = 0;
        Vector row_sums = spectral.confinement.rowwise().sum();
        for (const auto& block : s.partition.receiving_blocks)
            for (Index k : block) {
                out << "  agent " << s.matrix.labels[k] << ": " << fmt(row_sums(j)) << "\n";
                ++j;
            }
    }
    out << "limiting power (original agent order):\n";
    for (Index i = 0; i < spectral.limit_power.rows(); ++i)
        out << "  " << fmt_vector(spectral.limit_power.row(i)) << "\n";

    scenario::ReportInputs inputs{s, assumptions,
                                  predict::limiting_beliefs(spectral.influence, s.partition,
                                                            s.truth, s.space)};
    out << "\n";
    scenario::write_report(inputs, out, false);
    return kOk;
}

int cmd_predict(const std::string& path, const std::string& out_path, bool as_json,
                std::optional<double> gamma_max_override)
{
    scenario::Scenario s = scenario::load(resolve_path(path));
    scenario::AssumptionReport assumptions = scenario::check_assumptions(s);
    Matrix influence = graph::influence_matrix(s.partition);
    predict::LimitPrediction prediction =
        predict::limiting_beliefs(influence, s.partition, s.truth, s.space);

    std::optional<predict::ConfinementBand> bands;
    double gamma_max = gamma_max_override ? *gamma_max_override : receiving_gamma_max(s);
    if ((s.awareness || gamma_max_override) && s.partition.n_receiving > 0)
        bands = predict::confinement_bands(prediction, graph::confinement_matrix(s.partition),
                                           gamma_max);

    std::ofstream file;
    std::ostream& out = open_output(file, out_path);
    scenario::ReportInputs inputs{s, assumptions, prediction, bands ? &*bands : nullptr};
    scenario::write_report(inputs, out, as_json);

    if (!as_json && prediction.receiving_agents.size() > 1) {
        Matrix tv = predict::predicted_social_disagreement(prediction);
        out << "\npredicted disagreement (total variation):\n";
        for (Index i = 0; i < tv.rows(); ++i)
            for (Index j = i + 1; j < tv.cols(); ++j)
                out << "  agents " << s.matrix.labels[prediction.receiving_agents[i]] << " vs "
                    << s.matrix.labels[prediction.receiving_agents[j]] << ": " << fmt(tv(i, j))
                    << "\n";
    }
    return kOk;
}

sim::SimulationConfig make_config(const scenario::Scenario& s, const std::string& model,
                                  Index steps, Index trials, std::uint64_t seed, Index stride,
                                  int threads, bool forecasts, bool diagnostics)
{
    sim::SimulationConfig config;
    if (model == "diffusion") {
        config.model = sim::UpdateModel::diffusion;
    } else if (model == "self-aware") {
        config.model = sim::UpdateModel::self_aware;
    } else {   // auto: self-aware when the scenario carries a schedule
        config.model =
            s.awareness ? sim::UpdateModel::self_aware : sim::UpdateModel::diffusion;
    }
    if (config.model == sim::UpdateModel::self_aware) {
        if (!s.awareness)
            throw ValidationError("awareness",
                                  "self-aware model requested but the scenario has no schedule");
        config.awareness = s.awareness;
    }
    config.steps = steps;
    config.trials = trials;
    config.base_seed = seed;
    config.record_stride = stride;
    config.threads = threads;
    config.record_forecasts = forecasts;
    config.record_diagnostics = diagnostics;
    return config;
}

int cmd_simulate(const std::string& path, const std::string& model, Index steps, Index trials,
                 std::uint64_t seed, Index stride, int threads, const std::string& out_path,
                 bool forecasts, bool diagnostics)
{
    scenario::Scenario s = scenario::load(resolve_path(path));
    sim::SimulationConfig config =
        make_config(s, model, steps, trials, seed, stride, threads, forecasts, diagnostics);
    sim::SimulationTrace trace = sim::run(s, config);
    scenario::export_trace(trace, s, out_path);

    Matrix influence = graph::influence_matrix(s.partition);
    predict::LimitPrediction prediction =
        predict::limiting_beliefs(influence, s.partition, s.truth, s.space);
    sim::ConvergenceReport report =
        sim::assess(trace, prediction, nullptr, sim::default_window(trace));

    std::cout << "wrote " << out_path << " (" << trace.trials << " trial(s), "
              << trace.n_times() << " recorded steps)\n";
    std::cout << "terminal window means (last " << report.window << " recorded):\n";
    for (const auto& a : report.agents)
        std::cout << "  agent " << s.matrix.labels[a.agent] << ": " << fmt_vector(a.empirical)
                  << (a.receiving ? "  (receiving, predicted " + fmt_vector(a.predicted) + ")"
                                  : "")
                  << "\n";
    return kOk;
}

int cmd_verify(const std::string& path, Index steps, Index trials, std::uint64_t seed,
               double tol, int threads, const std::string& out_path, bool as_json)
{
    scenario::Scenario s = scenario::load(resolve_path(path));
    scenario::AssumptionReport assumptions = scenario::check_assumptions(s);
    Matrix influence = graph::influence_matrix(s.partition);
    predict::LimitPrediction prediction =
        predict::limiting_beliefs(influence, s.partition, s.truth, s.space);

    std::optional<predict::ConfinementBand> bands;
    if (s.awareness && s.partition.n_receiving > 0)
        bands = predict::confinement_bands(prediction, graph::confinement_matrix(s.partition),
                                           receiving_gamma_max(s));

    sim::SimulationConfig config =
        make_config(s, "auto", steps, trials, seed, 1, threads, false, false);
    sim::SimulationTrace trace = sim::run(s, config);
    sim::ConvergenceReport report =
        sim::assess(trace, prediction, bands ? &*bands : nullptr, sim::default_window(trace));

    std::ofstream file;
    std::ostream& out = open_output(file, out_path);
    scenario::ReportInputs inputs{s, assumptions, prediction, bands ? &*bands : nullptr, &report};
    scenario::write_report(inputs, out, as_json);

    bool band_regime = bands.has_value();
    bool pass = band_regime ? report.all_receiving_inside_band
                            : report.max_receiving_deviation <= tol;
    if (pass) {
        if (!as_json)
            out << "\nverify: PASS ("
                << (band_regime ? "all receiving window means inside bands"
                                : "max receiving deviation " +
                                      fmt(report.max_receiving_deviation) + " <= " + fmt(tol))
                << ")\n";
        return kOk;
    }

    const sim::ConvergenceReport::Agent* worst = nullptr;
    for (const auto& a : report.agents) {
        if (!a.receiving) continue;
        if (band_regime && a.band_checked && !a.inside_band) worst = &a;
        if (!band_regime && (!worst || a.max_deviation > worst->max_deviation)) worst = &a;
    }
    if (!as_json && worst) {
        out << "\nverify: FAIL — agent " << s.matrix.labels[worst->agent];
        if (band_regime) {
            out << " outside the confinement band\n";
        } else {
            out << " deviates by " << fmt(worst->max_deviation) << " > " << fmt(tol) << "\n";
            if (assumptions.regime == scenario::PredictionRegime::unsupported)
                out << "note: no closed-form limit applies to this scenario (oscillation score "
                    << fmt(worst->max_oscillation) << "); there is no fixed distribution to verify\n";
        }
    }
    return kVerification;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"analysis, closed-form prediction and Monte Carlo verification of social "
                 "learning over weakly-connected networks"};
    app.require_subcommand(1);

    std::string path, out_path, model = "auto";
    bool as_json = false, forecasts = false, diagnostics = false;
    Index steps = 7000, trials = 1, stride = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    double tol = 0.02;
    std::optional<double> gamma_max_override;

    auto* analyze = app.add_subcommand("analyze", "block structure and spectral objects");
    analyze->add_option("scenario", path, "scenario file")->required();
    analyze->add_option("--out", out_path, "write output to a file");
    analyze->add_flag("--json", as_json, "machine-readable output");

    auto* predict_cmd = app.add_subcommand("predict", "closed-form limiting beliefs");
    predict_cmd->add_option("scenario", path, "scenario file")->required();
    predict_cmd->add_option("--out", out_path, "write output to a file");
    predict_cmd->add_flag("--json", as_json, "machine-readable output");
    double gamma_max_value = 0.0;
    auto* gopt = predict_cmd->add_option("--gamma-max", gamma_max_value,
                                         "override the band half-width factor");

    auto* simulate = app.add_subcommand("simulate", "run the diffusion and write a trace CSV");
    simulate->add_option("scenario", path, "scenario file")->required();
    simulate->add_option("--model", model, "diffusion | self-aware | auto")
        ->check(CLI::IsMember({"diffusion", "self-aware", "auto"}));
    simulate->add_option("--steps", steps, "time steps")->check(CLI::PositiveNumber);
    simulate->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "base seed");
    simulate->add_option("--stride", stride, "record every n-th step")->check(CLI::PositiveNumber);
    simulate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--out", out_path, "trace CSV path")->required();
    simulate->add_flag("--forecasts", forecasts, "record per-signal forecasts");
    simulate->add_flag("--diagnostics", diagnostics, "record regret and forecast-KL columns");

    auto* verify = app.add_subcommand("verify", "simulate and check the closed-form prediction");
    verify->add_option("scenario", path, "scenario file")->required();
    verify->add_option("--steps", steps, "time steps")->check(CLI::PositiveNumber);
    verify->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "base seed");
    verify->add_option("--tol", tol, "allowed window-mean deviation");
    verify->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--out", out_path, "write the report to a file");
    verify->add_flag("--json", as_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(path, out_path, as_json);
        if (app.got_subcommand(predict_cmd))
            return cmd_predict(path, out_path, as_json,
                               gopt->count() ? std::optional<double>(gamma_max_value)
                                             : gamma_max_override);
        if (app.got_subcommand(simulate))
            return cmd_simulate(path, model, steps, trials, seed, stride, threads, out_path,
                                forecasts, diagnostics);
        if (app.got_subcommand(verify))
            return cmd_verify(path, steps, trials, seed, tol, threads, out_path, as_json);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
