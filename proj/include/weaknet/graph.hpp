#ifndef WEAKNET_GRAPH_HPP
#define WEAKNET_GRAPH_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "weaknet/errors.hpp"

namespace weaknet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace graph {

/// Left-stochastic weight matrix over a directed network.
///
/// Entry (l,k) is the weight agent k applies to data arriving from agent l;
/// the zero pattern is the graph. Columns sum to one, entries are
/// non-negative. Instances are produced by validate() and immutable after.
struct CombinationMatrix {
    Matrix weights;
    std::vector<std::string> labels;

    Index size() const { return weights.rows(); }
};

/// Validates a raw square matrix as a combination matrix.
///
/// Columns may deviate from unit sum by up to 1e-9 (config files carry
/// rounded decimals) and are renormalized exactly on ingestion. Labels
/// default to "1".."N". Throws NonSquareError, NegativeEntryError or
/// ColumnSumError naming the first violation.
CombinationMatrix validate(const Matrix& raw, std::vector<std::string> labels = {});

/// Maximal sets of mutually reachable agents, in topological order of the
/// condensation: components with no external in-edges come first. Ties are
/// broken by smallest original agent index so the order is deterministic.
std::vector<std::vector<Index>> strongly_connected_components(const CombinationMatrix& m);

/// Sending/receiving block structure of a weakly-connected network.
///
/// The canonical ordering places sending-block agents first, then receiving
/// agents, yielding a block upper-triangular permuted matrix with diagonal
/// sending blocks T_SS, the cross coupling T_SR and the internal receiving
/// weights T_RR.
struct NetworkPartition {
    std::vector<std::vector<Index>> sending_blocks;    // original indices
    std::vector<std::vector<Index>> receiving_blocks;  // original indices
    std::vector<Index> permutation;                    // permutation[orig] = canonical slot
    std::vector<Index> inverse;                        // inverse[canonical] = orig
    Matrix canonical;                                  // permuted weights
    Matrix t_ss;                                       // n_sending x n_sending
    Matrix t_sr;                                       // n_sending x n_receiving
    Matrix t_rr;                                       // n_receiving x n_receiving
    std::vector<Index> subnet_sizes;                   // sending sizes, then receiving sizes
    Index n_sending = 0;
    Index n_receiving = 0;
    std::vector<std::string> warnings;

    Index size() const { return n_sending + n_receiving; }
    bool is_sending(Index original) const { return permutation[original] < n_sending; }

    /// Index of the block containing an agent, counted within its own family
    /// (sending blocks and receiving blocks are numbered separately from 0).
    Index block_of(Index original) const;
};

/// Discovers the weak-graph structure of a validated matrix.
///
/// Sending blocks are the closed strongly-connected components (no in-edge
/// from outside) and must be primitive; a self-loop is accepted as
/// sufficient, otherwise the cycle-length gcd is checked. The remaining
/// agents are grouped into receiving blocks by connectivity of the
/// undirected zero pattern; each must satisfy rho(block) < 1. A receiving
/// block that is connected but not strongly connected is accepted with a
/// warning on the partition.
///
/// Throws NotWeaklyStructuredError or NoSendingSubnetworkError.
NetworkPartition classify(const CombinationMatrix& m);

/// Perron eigenvector of an irreducible non-negative block: the positive
/// right eigenvector at the spectral radius, normalized to sum one.
/// Power iteration with an identity shift (the shift keeps periodic blocks
/// from stalling and moves the Perron value to rho+1); at most 100000
/// iterations, final residual |block*y - rho*y|_inf <= tol.
Vector perron_vector(const Matrix& block, double tol = 1e-12);

/// Spectral radius of a square non-negative matrix by shifted power
/// iteration. Unlike perron_vector this accepts reducible blocks.
double spectral_radius(const Matrix& block, double tol = 1e-12);

/// Influence matrix W = T_SR (I - T_RR)^-1.
///
/// Column k gives the limiting dependence of the k-th receiving agent on
/// each sending agent; every column sums to one. Dense partial-pivot solve;
/// throws SingularSystemError when rho(T_RR) > 1 - 1e-9.
Matrix influence_matrix(const NetworkPartition& p);

/// Block-diagonal matrix E of rank-one sending limits y_s 1^T.
Matrix sending_limit_matrix(const CombinationMatrix& m, const NetworkPartition& p);

/// Closed-form limit of the matrix powers: [E, E*W; 0, 0] in canonical
/// order, returned re-permuted to the original agent order.
Matrix limiting_power(const CombinationMatrix& m, const NetworkPartition& p);

/// Confinement matrix C = (I - T_RR^T)^-1, the Neumann sum of the
/// transposed receiving weights. Throws SingularSystemError.
Matrix confinement_matrix(const NetworkPartition& p);

/// All spectral objects derived from one classified network.
struct SpectralSummary {
    std::vector<Vector> sending_perron;                 // y_s per sending block
    std::vector<double> receiving_radii;                // rho per receiving block
    std::vector<std::optional<Vector>> receiving_perron; // y_r when the block is irreducible
    Matrix influence;                                   // W
    Matrix sending_limit;                               // E
    Matrix limit_power;                                 // original agent order
    Matrix confinement;                                 // C
};

SpectralSummary summarize(const CombinationMatrix& m, const NetworkPartition& p);

} // namespace graph
} // namespace weaknet

#endif // WEAKNET_GRAPH_HPP
