#include "weaknet/graph.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace weaknet::graph {

namespace {

constexpr double kIngestTolerance = 1e-9;
constexpr Index kMaxPowerIterations = 100000;

// Adjacency lists of the non-zero pattern: out[l] holds every k with
// weights(l,k) > 0, i.e. every agent k that listens to l.
std::vector<std::vector<Index>> out_edges(const Matrix& w)
{
    const Index n = w.rows();
    std::vector<std::vector<Index>> out(n);
    for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k)
            if (w(l, k) > 0.0) out[l].push_back(k);
    return out;
}

// Iterative Tarjan over the out-edge pattern. Components are emitted in
// reverse topological order of the condensation.
std::vector<std::vector<Index>> tarjan_components(const std::vector<std::vector<Index>>& out)
{
    const Index n = static_cast<Index>(out.size());
    std::vector<Index> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<Index>> components;
    Index counter = 0;

    struct Frame { Index v; std::size_t edge; };
    for (Index root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < out[f.v].size()) {
                Index w = out[f.v][f.edge++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<Index> comp;
                    Index w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                    } while (w != f.v);
                    std::sort(comp.begin(), comp.end());
                    components.push_back(std::move(comp));
                }
                Index v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return components;
}

// gcd of cycle lengths in a strongly-connected pattern; 1 means aperiodic.
Index pattern_period(const Matrix& w, const std::vector<Index>& comp)
{
    const Index n = static_cast<Index>(comp.size());
    std::vector<Index> pos(w.rows(), -1);
    for (Index i = 0; i < n; ++i) pos[comp[i]] = i;

    std::vector<Index> level(n, -1);
    std::vector<Index> queue{0};
    level[0] = 0;
    Index g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Index u = queue[head];
        for (Index j = 0; j < n; ++j) {
            if (w(comp[u], comp[j]) <= 0.0) continue;
            if (level[j] == -1) {
                level[j] = level[u] + 1;
                queue.push_back(j);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[j]));
            }
        }
    }
    return g == 0 ? 1 : g;
}

bool strongly_connected_block(const Matrix& w, const std::vector<Index>& comp)
{
    const Index n = static_cast<Index>(comp.size());
    auto reach = [&](bool reverse) {
        std::vector<char> seen(n, 0);
        std::vector<Index> queue{0};
        seen[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            Index u = queue[head];
            for (Index j = 0; j < n; ++j) {
                double v = reverse ? w(comp[j], comp[u]) : w(comp[u], comp[j]);
                if (v > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    queue.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

struct PowerResult { Vector vec; double value; };

// Power iteration on (A + I); the shift preserves the Perron pair of a
// non-negative matrix and removes periodicity. Stops on the residual of
// the unshifted matrix.
PowerResult shifted_power_iteration(const Matrix& a, double tol)
{
    const Index n = a.rows();
    Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
    double lambda = 0.0;
    for (Index it = 0; it < kMaxPowerIterations; ++it) {
        Vector next = a * v + v;
        double norm = next.lpNorm<1>();   // >= 1 since a is non-negative
        next /= norm;
        lambda = norm - 1.0;
        double residual = (a * next - lambda * next).lpNorm<Eigen::Infinity>();
        v = next;
        if (residual <= tol * std::max(1.0, std::abs(lambda))) return {v, lambda};
    }
    throw NoConvergenceError(kMaxPowerIterations);
}

} // namespace

CombinationMatrix validate(const Matrix& raw, std::vector<std::string> labels)
{
    if (raw.rows() != raw.cols() || raw.rows() < 1) throw NonSquareError(raw.rows(), raw.cols());
    const Index n = raw.rows();

    for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l)
            if (raw(l, k) < 0.0) throw NegativeEntryError(l, k, raw(l, k));

    Matrix w = raw;
    for (Index k = 0; k < n; ++k) {
        double sum = w.col(k).sum();
        if (std::abs(sum - 1.0) > kIngestTolerance) throw ColumnSumError(k, sum);
        w.col(k) /= sum;
    }

    if (labels.empty()) {
        labels.reserve(n);
        for (Index k = 0; k < n; ++k) labels.push_back(std::to_string(k + 1));
    } else if (static_cast<Index>(labels.size()) != n) {
        throw ValidationError("network", "label count does not match matrix size");
    }
    return {std::move(w), std::move(labels)};
}

std::vector<std::vector<Index>> strongly_connected_components(const CombinationMatrix& m)
{
    auto out = out_edges(m.weights);
    auto comps = tarjan_components(out);

    // Kahn topological sort of the condensation, tie-broken by smallest
    // original agent index. Closed components have in-degree zero.
    const Index c = static_cast<Index>(comps.size());
    std::vector<Index> comp_of(m.size());
    for (Index i = 0; i < c; ++i)
        for (Index v : comps[i]) comp_of[v] = i;

    std::vector<Index> indegree(c, 0);
    std::vector<std::vector<Index>> succ(c);
    for (Index l = 0; l < m.size(); ++l) {
        for (Index k : out[l]) {
            Index a = comp_of[l], b = comp_of[k];
            if (a != b) succ[a].push_back(b);
        }
    }
    for (auto& s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (Index b : s) ++indegree[b];
    }

    std::vector<Index> order;
    std::vector<char> placed(c, 0);
    while (static_cast<Index>(order.size()) < c) {
        Index best = -1;
        for (Index i = 0; i < c; ++i)
            if (!placed[i] && indegree[i] == 0 && (best == -1 || comps[i][0] < comps[best][0]))
                best = i;
        placed[best] = 1;
        order.push_back(best);
        for (Index b : succ[best]) --indegree[b];
    }

    std::vector<std::vector<Index>> result;
    result.reserve(c);
    for (Index i : order) result.push_back(std::move(comps[i]));
    return result;
}

Index NetworkPartition::block_of(Index original) const
{
    const auto& family = is_sending(original) ? sending_blocks : receiving_blocks;
    for (Index b = 0; b < static_cast<Index>(family.size()); ++b)
        if (std::find(family[b].begin(), family[b].end(), original) != family[b].end()) return b;
    return -1;
}

NetworkPartition classify(const CombinationMatrix& m)
{
    const Matrix& w = m.weights;
    const Index n = m.size();
    auto comps = strongly_connected_components(m);

    // A component is closed when no agent in it listens to an outsider.
    auto is_closed = [&](const std::vector<Index>& comp) {
        std::vector<char> inside(n, 0);
        for (Index v : comp) inside[v] = 1;
        for (Index k : comp)
            for (Index l = 0; l < n; ++l)
                if (w(l, k) > 0.0 && !inside[l]) return false;
        return true;
    };

    NetworkPartition p;
    std::vector<Index> receiving_agents;
    for (const auto& comp : comps) {
        if (is_closed(comp)) {
            bool self_loop = std::any_of(comp.begin(), comp.end(),
                                         [&](Index v) { return w(v, v) > 0.0; });
            if (!self_loop && pattern_period(w, comp) != 1)
                throw NotWeaklyStructuredError("closed component containing agent " +
                                               m.labels[comp[0]] + " is not primitive");
            p.sending_blocks.push_back(comp);
        } else {
            receiving_agents.insert(receiving_agents.end(), comp.begin(), comp.end());
        }
    }
    if (p.sending_blocks.empty()) throw NoSendingSubnetworkError();

    // Group the non-closed agents by connectivity of the undirected pattern.
    if (!receiving_agents.empty()) {
        std::sort(receiving_agents.begin(), receiving_agents.end());
        std::vector<Index> group(n, -1);
        Index groups = 0;
        for (Index seed : receiving_agents) {
            if (group[seed] != -1) continue;
            std::vector<Index> queue{seed};
            group[seed] = groups;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                Index u = queue[head];
                for (Index v : receiving_agents) {
                    if (group[v] == -1 && (w(u, v) > 0.0 || w(v, u) > 0.0)) {
                        group[v] = groups;
                        queue.push_back(v);
                    }
                }
            }
            ++groups;
        }
        p.receiving_blocks.assign(groups, {});
        for (Index v : receiving_agents) p.receiving_blocks[group[v]].push_back(v);
    }

    auto by_first = [](const std::vector<Index>& a, const std::vector<Index>& b) {
        return a.front() < b.front();
    };
    std::sort(p.sending_blocks.begin(), p.sending_blocks.end(), by_first);
    std::sort(p.receiving_blocks.begin(), p.receiving_blocks.end(), by_first);

    p.permutation.assign(n, -1);
    p.inverse.clear();
    for (const auto& block : p.sending_blocks) {
        p.subnet_sizes.push_back(static_cast<Index>(block.size()));
        for (Index v : block) {
            p.permutation[v] = static_cast<Index>(p.inverse.size());
            p.inverse.push_back(v);
        }
    }
    p.n_sending = static_cast<Index>(p.inverse.size());
    for (const auto& block : p.receiving_blocks) {
        p.subnet_sizes.push_back(static_cast<Index>(block.size()));
        for (Index v : block) {
            p.permutation[v] = static_cast<Index>(p.inverse.size());
            p.inverse.push_back(v);
        }
    }
    p.n_receiving = n - p.n_sending;

    p.canonical.resize(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) p.canonical(i, j) = w(p.inverse[i], p.inverse[j]);

    p.t_ss = p.canonical.topLeftCorner(p.n_sending, p.n_sending);
    p.t_sr = p.canonical.topRightCorner(p.n_sending, p.n_receiving);
    p.t_rr = p.canonical.bottomRightCorner(p.n_receiving, p.n_receiving);

    for (const auto& block : p.receiving_blocks) {
        double rho = spectral_radius([&] {
            const Index b = static_cast<Index>(block.size());
            Matrix sub(b, b);
            for (Index i = 0; i < b; ++i)
                for (Index j = 0; j < b; ++j) sub(i, j) = w(block[i], block[j]);
            return sub;
        }());
        if (rho >= 1.0)
            throw NotWeaklyStructuredError("receiving block containing agent " +
                                           m.labels[block[0]] + " has spectral radius " +
                                           std::to_string(rho));
        if (!strongly_connected_block(w, block))
            p.warnings.push_back("receiving block containing agent " + m.labels[block[0]] +
                                 " is connected but not strongly connected");
    }
    return p;
}

Vector perron_vector(const Matrix& block, double tol)
{
    if (block.rows() != block.cols() || block.rows() < 1)
        throw NonSquareError(block.rows(), block.cols());
    if (block.rows() > 1) {
        std::vector<Index> all(block.rows());
        std::iota(all.begin(), all.end(), Index{0});
        if (!strongly_connected_block(block, all)) throw NotIrreducibleError();
    }
    auto [v, lambda] = shifted_power_iteration(block, tol);
    (void)lambda;
    return v / v.sum();
}

double spectral_radius(const Matrix& block, double tol)
{
    if (block.rows() != block.cols() || block.rows() < 1)
        throw NonSquareError(block.rows(), block.cols());
    return shifted_power_iteration(block, tol).value;
}

Matrix influence_matrix(const NetworkPartition& p)
{
    if (p.n_receiving == 0) return Matrix::Zero(p.n_sending, 0);
    double rho = spectral_radius(p.t_rr);
    if (rho > 1.0 - 1e-9) throw SingularSystemError(rho);
    Matrix system = Matrix::Identity(p.n_receiving, p.n_receiving) - p.t_rr.transpose();
    // W = T_SR (I - T_RR)^-1 via the transposed solve.
    return Eigen::PartialPivLU<Matrix>(system).solve(p.t_sr.transpose()).transpose();
}

Matrix sending_limit_matrix(const CombinationMatrix& m, const NetworkPartition& p)
{
    Matrix e = Matrix::Zero(p.n_sending, p.n_sending);
    Index offset = 0;
    for (const auto& block : p.sending_blocks) {
        const Index b = static_cast<Index>(block.size());
        Matrix sub(b, b);
        for (Index i = 0; i < b; ++i)
            for (Index j = 0; j < b; ++j) sub(i, j) = m.weights(block[i], block[j]);
        Vector y = perron_vector(sub);
        e.block(offset, offset, b, b) = y * Eigen::RowVectorXd::Ones(b);
        offset += b;
    }
    return e;
}

Matrix limiting_power(const CombinationMatrix& m, const NetworkPartition& p)
{
    const Index n = p.size();
    Matrix e = sending_limit_matrix(m, p);
    Matrix canon = Matrix::Zero(n, n);
    canon.topLeftCorner(p.n_sending, p.n_sending) = e;
    if (p.n_receiving > 0)
        canon.topRightCorner(p.n_sending, p.n_receiving) = e * influence_matrix(p);

    Matrix original(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) original(i, j) = canon(p.permutation[i], p.permutation[j]);
    return original;
}

Matrix confinement_matrix(const NetworkPartition& p)
{
    if (p.n_receiving == 0) return Matrix::Zero(0, 0);
    double rho = spectral_radius(p.t_rr);
    if (rho > 1.0 - 1e-9) throw SingularSystemError(rho);
    Matrix system = Matrix::Identity(p.n_receiving, p.n_receiving) - p.t_rr.transpose();
    return Eigen::PartialPivLU<Matrix>(system).solve(
        Matrix::Identity(p.n_receiving, p.n_receiving));
}

SpectralSummary summarize(const CombinationMatrix& m, const NetworkPartition& p)
{
    SpectralSummary s;
    for (const auto& block : p.sending_blocks) {
        const Index b = static_cast<Index>(block.size());
        Matrix sub(b, b);
        for (Index i = 0; i < b; ++i)
            for (Index j = 0; j < b; ++j) sub(i, j) = m.weights(block[i], block[j]);
        s.sending_perron.push_back(perron_vector(sub));
    }
    for (const auto& block : p.receiving_blocks) {
        const Index b = static_cast<Index>(block.size());
        Matrix sub(b, b);
        for (Index i = 0; i < b; ++i)
            for (Index j = 0; j < b; ++j) sub(i, j) = m.weights(block[i], block[j]);
        s.receiving_radii.push_back(spectral_radius(sub));
        if (strongly_connected_block(m.weights, block))
            s.receiving_perron.push_back(perron_vector(sub));
        else
            s.receiving_perron.push_back(std::nullopt);
    }
    s.influence = influence_matrix(p);
    s.sending_limit = sending_limit_matrix(m, p);
    s.limit_power = limiting_power(m, p);
    s.confinement = confinement_matrix(p);
    return s;
}

} // namespace weaknet::graph
