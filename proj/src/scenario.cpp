#include "weaknet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "weaknet/sim.hpp"

#include <json.hpp>

namespace weaknet::scenario {

namespace {

constexpr double kRowTolerance = 1e-12;

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, std::int64_t line)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(line, "trailing characters in number '" + tok + "'");
    return v;
}

// Parsed key/value pairs plus matrix blocks, per section.
struct RawSection {
    std::map<std::string, std::pair<std::string, std::int64_t>> values;  // key -> (text, line)
    std::map<std::string, Matrix> matrices;
};

struct RawFile {
    std::map<std::string, RawSection> sections;
    std::vector<std::string> section_order;
};

// Grammar: "key = value" lines grouped under "[section]" headers. A value
// of the form "R C" followed by a matrix keyword introduces R data rows of
// C numbers each. '#' starts a comment.
RawFile parse_file(std::istream& in)
{
    RawFile file;
    std::string current = "";
    file.sections[current];
    std::string line;
    std::int64_t lineno = 0;

    std::vector<std::string> physical;
    while (std::getline(in, line)) physical.push_back(line);

    auto logical = [&](std::size_t i) {
        std::string l = physical[i];
        std::size_t hash = l.find('#');
        if (hash != std::string::npos) l = l.substr(0, hash);
        return trim(l);
    };

    static const std::vector<std::string> matrix_keys = {"matrix", "table", "priors"};
    for (std::size_t i = 0; i < physical.size(); ++i) {
        lineno = static_cast<std::int64_t>(i) + 1;
        std::string l = logical(i);
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ParseError(lineno, "unterminated section header");
            current = trim(l.substr(1, l.size() - 2));
            if (file.sections.count(current))
                throw ParseError(lineno, "duplicate section [" + current + "]");
            file.sections[current];
            file.section_order.push_back(current);
            continue;
        }
        std::size_t eq = l.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
        std::string key = trim(l.substr(0, eq));
        std::string value = trim(l.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");

        bool is_matrix = std::find(matrix_keys.begin(), matrix_keys.end(), key) != matrix_keys.end();
        if (is_matrix && value != "uniform") {
            auto dims = split(value);
            if (dims.size() != 2)
                throw ParseError(lineno, "'" + key + "' needs explicit dimensions 'rows cols'");
            Index rows = static_cast<Index>(parse_number(dims[0], lineno));
            Index cols = static_cast<Index>(parse_number(dims[1], lineno));
            if (rows < 1 || cols < 1) throw ParseError(lineno, "dimensions must be positive");
            Matrix mat(rows, cols);
            for (Index r = 0; r < rows; ++r) {
                std::string row;
                do {
                    if (++i >= physical.size())
                        throw ParseError(lineno, "unexpected end of file inside '" + key + "'");
                    row = logical(i);
                } while (row.empty());
                auto toks = split(row);
                if (static_cast<Index>(toks.size()) != cols)
                    throw ParseError(static_cast<std::int64_t>(i) + 1,
                                     "expected " + std::to_string(cols) + " numbers");
                for (Index c = 0; c < cols; ++c)
                    mat(r, c) = parse_number(toks[c], static_cast<std::int64_t>(i) + 1);
            }
            file.sections[current].matrices[key] = std::move(mat);
        } else {
            file.sections[current].values[key] = {value, lineno};
        }
    }
    return file;
}

const RawSection& need_section(const RawFile& f, const std::string& name)
{
    auto it = f.sections.find(name);
    if (it == f.sections.end()) throw ValidationError(name, "missing section [" + name + "]");
    return it->second;
}

std::string need_value(const RawSection& s, const std::string& section, const std::string& key)
{
    auto it = s.values.find(key);
    if (it == s.values.end()) throw ValidationError(section, "missing '" + key + "'");
    return it->second.first;
}

Vector normalized_row(const Matrix& table, Index row, const std::string& component,
                      const std::string& what)
{
    Vector r = table.row(row);
    for (Index i = 0; i < r.size(); ++i)
        if (r(i) < 0.0)
            throw ValidationError(component, what + " has a negative entry");
    double sum = r.sum();
    if (std::abs(sum - 1.0) > kRowTolerance)
        throw ValidationError(component,
                              what + " sums to " + std::to_string(sum) + ", expected 1");
    return r / sum;
}

void print_number(std::ostream& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
}

void print_exact(std::ostream& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

} // namespace

Scenario load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError(path);

    RawFile raw = parse_file(in);
    Scenario s;

    const RawSection& top = raw.sections.at("");
    if (auto it = top.values.find("name"); it != top.values.end()) s.name = it->second.first;
    if (auto it = top.values.find("description"); it != top.values.end())
        s.description = it->second.first;

    // [network]
    const RawSection& network = need_section(raw, "network");
    Index n = static_cast<Index>(parse_number(need_value(network, "network", "agents"), 0));
    auto mit = network.matrices.find("matrix");
    if (mit == network.matrices.end()) throw ValidationError("network", "missing 'matrix'");
    if (mit->second.rows() != n || mit->second.cols() != n)
        throw ValidationError("network", "matrix dimensions do not match 'agents'");
    std::vector<std::string> labels;
    if (auto it = network.values.find("labels"); it != network.values.end())
        labels = split(it->second.first);
    try {
        s.matrix = graph::validate(mit->second, std::move(labels));
        s.partition = graph::classify(s.matrix);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("network", e.what());
    }

    // [states]
    s.space.states = split(need_value(need_section(raw, "states"), "states", "states"));
    if (s.space.size() < 1) throw ValidationError("states", "empty state list");
    for (Index i = 0; i < s.space.size(); ++i)
        for (Index j = i + 1; j < s.space.size(); ++j)
            if (s.space.states[i] == s.space.states[j])
                throw ValidationError("states", "duplicate state '" + s.space.states[i] + "'");
    const Index m = s.space.size();

    // [likelihoods.k], one section per agent, 1-based keys
    s.models.agents.resize(n);
    for (Index k = 0; k < n; ++k) {
        std::string name = "likelihoods." + std::to_string(k + 1);
        const RawSection& sec = need_section(raw, name);
        beliefs::LikelihoodModel::AgentModel agent;
        agent.signals = split(need_value(sec, name, "signals"));
        if (agent.signals.empty()) throw ValidationError(name, "empty signal list");
        auto tit = sec.matrices.find("table");
        if (tit == sec.matrices.end()) throw ValidationError(name, "missing 'table'");
        if (tit->second.rows() != m ||
            tit->second.cols() != static_cast<Index>(agent.signals.size()))
            throw ValidationError(name, "table must be states x signals");
        agent.table.resize(m, tit->second.cols());
        for (Index theta = 0; theta < m; ++theta)
            agent.table.row(theta) = normalized_row(
                tit->second, theta, name, "row for state " + s.space.states[theta]);
        s.models.agents[k] = std::move(agent);
    }

    // [truth]: one state name per agent, consistent within each block
    auto truth_names = split(need_value(need_section(raw, "truth"), "truth", "truth"));
    if (static_cast<Index>(truth_names.size()) != n)
        throw ValidationError("truth", "need one true state per agent");
    s.truth.per_agent.resize(n);
    for (Index k = 0; k < n; ++k) {
        try {
            s.truth.per_agent[k] = s.space.index_of(truth_names[k]);
        } catch (const Error&) {
            throw ValidationError("truth", "unknown state '" + truth_names[k] + "'");
        }
    }
    auto block_truth = [&](const std::vector<Index>& block) {
        Index t = s.truth.per_agent[block.front()];
        for (Index k : block)
            if (s.truth.per_agent[k] != t)
                throw ValidationError("truth", "agents of one sub-network disagree on the truth");
        return t;
    };
    for (const auto& block : s.partition.sending_blocks)
        s.truth.sending_truths.push_back(block_truth(block));
    for (const auto& block : s.partition.receiving_blocks)
        s.truth.receiving_truths.push_back(block_truth(block));
    s.truth.distinct_sending = s.truth.sending_truths;
    std::sort(s.truth.distinct_sending.begin(), s.truth.distinct_sending.end());
    s.truth.distinct_sending.erase(
        std::unique(s.truth.distinct_sending.begin(), s.truth.distinct_sending.end()),
        s.truth.distinct_sending.end());

    // [priors]: uniform or an explicit agents x states matrix
    const RawSection& priors = need_section(raw, "priors");
    if (auto it = priors.values.find("priors");
        it != priors.values.end() && it->second.first == "uniform") {
        s.priors = Matrix::Constant(n, m, 1.0 / static_cast<double>(m));
    } else {
        auto pit = priors.matrices.find("priors");
        if (pit == priors.matrices.end())
            throw ValidationError("priors", "expected 'priors = uniform' or an explicit matrix");
        if (pit->second.rows() != n || pit->second.cols() != m)
            throw ValidationError("priors", "priors must be agents x states");
        s.priors.resize(n, m);
        for (Index k = 0; k < n; ++k)
            s.priors.row(k) = normalized_row(pit->second, k, "priors",
                                             "prior of agent " + s.matrix.labels[k]);
    }

    // [awareness], optional
    if (raw.sections.count("awareness")) {
        auto toks = split(need_value(raw.sections.at("awareness"), "awareness", "gamma"));
        if (static_cast<Index>(toks.size()) != n)
            throw ValidationError("awareness", "need one gamma per agent");
        std::vector<double> gammas(n);
        for (Index k = 0; k < n; ++k) {
            gammas[k] = parse_number(toks[k], 0);
            if (gammas[k] < 0.0 || gammas[k] > 1.0)
                throw ValidationError("awareness", "gamma must lie in [0,1]");
        }
        s.awareness = beliefs::AwarenessSchedule::constant(std::move(gammas));
    }
    return s;
}

void save(const Scenario& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw IoError(path);
    const Index n = s.n_agents();
    const Index m = s.n_states();

    if (!s.name.empty()) out << "name = " << s.name << "\n";
    if (!s.description.empty()) out << "description = " << s.description << "\n";
    out << "\n[network]\nagents = " << n << "\nlabels =";
    for (const auto& l : s.matrix.labels) out << " " << l;
    out << "\nmatrix = " << n << " " << n << "\n";
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            if (c) out << " ";
            print_exact(out, s.matrix.weights(r, c));
        }
        out << "\n";
    }

    out << "\n[states]\nstates =";
    for (const auto& st : s.space.states) out << " " << st;
    out << "\n";

    for (Index k = 0; k < n; ++k) {
        const auto& agent = s.models.agents[k];
        out << "\n[likelihoods." << (k + 1) << "]\nsignals =";
        for (const auto& z : agent.signals) out << " " << z;
        out << "\ntable = " << m << " " << agent.n_signals() << "\n";
        for (Index theta = 0; theta < m; ++theta) {
            for (Index z = 0; z < agent.n_signals(); ++z) {
                if (z) out << " ";
                print_exact(out, agent.table(theta, z));
            }
            out << "\n";
        }
    }

    out << "\n[truth]\ntruth =";
    for (Index k = 0; k < n; ++k) out << " " << s.space.states[s.truth.per_agent[k]];
    out << "\n\n[priors]\npriors = " << n << " " << m << "\n";
    for (Index k = 0; k < n; ++k) {
        for (Index t = 0; t < m; ++t) {
            if (t) out << " ";
            print_exact(out, s.priors(k, t));
        }
        out << "\n";
    }

    if (s.awareness) {
        out << "\n[awareness]\ngamma =";
        for (Index k = 0; k < n; ++k) {
            out << " ";
            print_exact(out, s.awareness->base[k]);
        }
        out << "\n";
    }
    if (!out) throw IoError(path);
}

AssumptionReport check_assumptions(const Scenario& s)
{
    AssumptionReport report;

    for (Index b = 0; b < static_cast<Index>(s.partition.sending_blocks.size()); ++b) {
        AssumptionReport::SendingBlock sb;
        sb.agents = s.partition.sending_blocks[b];
        sb.true_state = s.truth.sending_truths[b];
        auto ident = beliefs::globally_identifiable(s.models, sb.agents, sb.true_state);
        sb.identifiable = ident.identifiable;
        sb.leftover = std::move(ident.leftover);
        sb.prevailing_all = true;
        for (Index k : sb.agents) {
            if (!beliefs::prevailing_signal(s.models.agents[k], sb.true_state)) {
                sb.prevailing_all = false;
                sb.missing_prevailing.push_back(k);
            }
            if (s.priors(k, sb.true_state) > 0.0) sb.positive_prior = true;
        }
        report.sending.push_back(std::move(sb));
    }
    report.sending_ok = std::all_of(report.sending.begin(), report.sending.end(), [](auto& sb) {
        return sb.identifiable && sb.prevailing_all && sb.positive_prior;
    });

    for (Index b = 0; b < static_cast<Index>(s.partition.receiving_blocks.size()); ++b) {
        Index own_truth = s.truth.receiving_truths[b];
        for (Index k : s.partition.receiving_blocks[b]) {
            AssumptionReport::ReceivingAgent ra;
            ra.agent = k;
            auto set = beliefs::indistinguishable_set(s.models.agents[k], own_truth);
            ra.indistinguishable = true;
            for (Index t : s.truth.distinct_sending)
                if (std::find(set.begin(), set.end(), t) == set.end()) {
                    ra.indistinguishable = false;
                    ra.violating_truths.push_back(t);
                }
            report.receiving.push_back(std::move(ra));
        }
    }
    report.receiving_ok = std::all_of(report.receiving.begin(), report.receiving.end(),
                                      [](auto& ra) { return ra.indistinguishable; });

    if (s.awareness) {
        bool sending_gamma_positive = true;
        for (const auto& block : s.partition.sending_blocks)
            for (Index k : block)
                if (s.awareness->gamma(k, std::numeric_limits<Index>::max()) <= 0.0)
                    sending_gamma_positive = false;
        report.regime = (report.sending_ok && sending_gamma_positive)
                            ? PredictionRegime::confined_band
                            : PredictionRegime::unsupported;
    } else {
        report.regime = (report.sending_ok && report.receiving_ok)
                            ? PredictionRegime::exact_limit
                            : PredictionRegime::unsupported;
    }
    return report;
}

void export_trace(const sim::SimulationTrace& trace, const Scenario& s, std::ostream& out)
{
    out << "trial,time,agent";
    for (const auto& st : s.space.states) out << ",mu_" << st;
    for (Index z = 0; z < trace.max_signals; ++z) out << ",forecast_" << (z + 1);
    if (!trace.regret_weak.empty()) out << ",regret_weak,regret_true,forecast_kl";
    out << "\n";

    for (Index trial = 0; trial < trace.trials; ++trial)
        for (Index w = 0; w < trace.n_times(); ++w)
            for (Index k = 0; k < trace.n_agents; ++k) {
                out << trial << "," << trace.times[w] << "," << s.matrix.labels[k];
                for (Index t = 0; t < trace.n_states; ++t) {
                    out << ",";
                    print_number(out, trace.belief(trial, w, k, t));
                }
                for (Index z = 0; z < trace.max_signals; ++z) {
                    std::size_t idx =
                        ((static_cast<std::size_t>(trial) * trace.n_times() + w) * trace.n_agents +
                         k) *
                            trace.max_signals +
                        z;
                    out << ",";
                    if (trace.forecasts[idx] >= 0.0)
                        print_number(out, trace.forecasts[idx]);
                }
                if (!trace.regret_weak.empty()) {
                    for (const auto* channel :
                         {&trace.regret_weak, &trace.regret_true, &trace.forecast_kl}) {
                        out << ",";
                        print_number(out, trace.diagnostic(*channel, trial, w, k));
                    }
                }
                out << "\n";
            }
}

void export_trace(const sim::SimulationTrace& trace, const Scenario& s, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path);
    export_trace(trace, s, out);
    if (!out) throw IoError(path);
}

namespace {

nlohmann::json vector_json(const Vector& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

const char* regime_name(PredictionRegime r)
{
    switch (r) {
        case PredictionRegime::exact_limit: return "exact-limit";
        case PredictionRegime::confined_band: return "confined-band";
        default: return "unsupported";
    }
}

} // namespace

void write_report(const ReportInputs& in, std::ostream& out, bool as_json)
{
    const Scenario& s = in.scenario;
    const Index m = s.n_states();

    std::vector<Index> band_row(s.n_agents(), -1);
    if (in.bands)
        for (Index j = 0; j < static_cast<Index>(in.bands->receiving_agents.size()); ++j)
            band_row[in.bands->receiving_agents[j]] = j;

    std::vector<const sim::ConvergenceReport::Agent*> conv(s.n_agents(), nullptr);
    if (in.convergence)
        for (const auto& a : in.convergence->agents) conv[a.agent] = &a;

    std::vector<char> receiving(s.n_agents(), 0);
    for (Index k : in.prediction.receiving_agents) receiving[k] = 1;

    if (as_json) {
        nlohmann::json j;
        j["scenario"] = s.name;
        j["regime"] = regime_name(in.assumptions.regime);
        j["states"] = s.space.states;
        j["agents"] = nlohmann::json::array();
        for (Index k = 0; k < s.n_agents(); ++k) {
            nlohmann::json a;
            a["agent"] = s.matrix.labels[k];
            a["role"] = receiving[k] ? "receiving" : "sending";
            a["predicted"] = vector_json(in.prediction.q.row(k));
            if (conv[k]) {
                a["empirical"] = vector_json(conv[k]->empirical);
                a["max_deviation"] = conv[k]->max_deviation;
                a["oscillation"] = vector_json(conv[k]->oscillation);
            }
            if (in.bands && band_row[k] >= 0) {
                Index r = band_row[k];
                a["band"] = {{"half_width", in.bands->half_width(r)},
                             {"lower", vector_json(in.bands->lower_raw.row(r))},
                             {"upper", vector_json(in.bands->upper_raw.row(r))}};
                if (conv[k]) a["band"]["inside"] = conv[k]->inside_band;
            }
            j["agents"].push_back(std::move(a));
        }
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& sb : in.assumptions.sending) {
            nlohmann::json b;
            b["agents"] = nlohmann::json::array();
            for (Index k : sb.agents) b["agents"].push_back(s.matrix.labels[k]);
            b["true_state"] = s.space.states[sb.true_state];
            b["identifiable"] = sb.identifiable;
            b["prevailing_signal_all"] = sb.prevailing_all;
            b["positive_prior"] = sb.positive_prior;
            blocks.push_back(std::move(b));
        }
        j["assumptions"] = {{"sending_blocks", blocks},
                            {"sending_ok", in.assumptions.sending_ok},
                            {"receiving_ok", in.assumptions.receiving_ok}};
        nlohmann::json recv = nlohmann::json::array();
        for (const auto& ra : in.assumptions.receiving)
            recv.push_back({{"agent", s.matrix.labels[ra.agent]},
                            {"indistinguishable", ra.indistinguishable}});
        j["assumptions"]["receiving_agents"] = recv;
        out << j.dump(2) << "\n";
        return;
    }

    out << "scenario: " << s.name << "\nregime: " << regime_name(in.assumptions.regime) << "\n";
    out << "\npredicted limiting beliefs";
    if (in.convergence) out << " vs empirical window means";
    out << "\n";
    for (Index k = 0; k < s.n_agents(); ++k) {
        out << "  agent " << s.matrix.labels[k] << (receiving[k] ? " (receiving)" : " (sending)  ")
            << "  q = [";
        for (Index t = 0; t < m; ++t) {
            if (t) out << ", ";
            print_number(out, in.prediction.q(k, t));
        }
        out << "]";
        if (conv[k]) {
            out << "  empirical = [";
            for (Index t = 0; t < m; ++t) {
                if (t) out << ", ";
                print_number(out, conv[k]->empirical(t));
            }
            out << "]  max dev = ";
            print_number(out, conv[k]->max_deviation);
        }
        if (in.bands && band_row[k] >= 0) {
            out << "  band half-width = ";
            print_number(out, in.bands->half_width(band_row[k]));
            if (conv[k]) out << (conv[k]->inside_band ? "  inside" : "  OUTSIDE");
        }
        out << "\n";
    }

    out << "\nassumption report\n";
    for (const auto& sb : in.assumptions.sending) {
        out << "  sending block {";
        for (std::size_t i = 0; i < sb.agents.size(); ++i)
            out << (i ? "," : "") << s.matrix.labels[sb.agents[i]];
        out << "} truth " << s.space.states[sb.true_state] << ": identifiable "
            << (sb.identifiable ? "yes" : "no") << ", prevailing signals "
            << (sb.prevailing_all ? "yes" : "no") << ", positive prior "
            << (sb.positive_prior ? "yes" : "no") << "\n";
    }
    for (const auto& ra : in.assumptions.receiving)
        out << "  receiving agent " << s.matrix.labels[ra.agent] << ": sending truths "
            << (ra.indistinguishable ? "indistinguishable" : "DISTINGUISHABLE") << "\n";
    for (const auto& w : s.partition.warnings) out << "  warning: " << w << "\n";
}

} // namespace weaknet::scenario
