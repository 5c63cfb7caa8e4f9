#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace sedlqr {

/// An undirected edge between two agents. `weight` is carried along for
/// generators that need it (line susceptances); hop distances ignore it.
struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

/// Which block partition of a matrix dimension: agent states or agent inputs.
enum class Space { kState, kInput };

/// Agent network with all-pairs hop distances and per-agent block sizes.
///
/// Immutable after construction. Distances are BFS shortest-path hop counts;
/// pairs in different connected components hold `kUnreachable`.
class Topology {
 public:
  static constexpr int kUnreachable = -1;

  /// Cycle Z_N with edges {i, i+1 mod N}. Requires N >= 3.
  static Topology Cycle(int n, int state_dim, int input_dim);

  /// rows x cols 4-neighbour lattice, agents numbered row-major.
  static Topology Grid(int rows, int cols, int state_dim, int input_dim);

  /// Arbitrary graph. Duplicate edges are merged (first weight wins). Throws
  /// invalid-edge for out-of-range endpoints or self loops.
  static Topology FromEdgeList(int n, std::vector<Edge> edges,
                               std::vector<int> state_dims,
                               std::vector<int> input_dims);

  int agent_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& state_dims() const { return state_dims_; }
  const std::vector<int>& input_dims() const { return input_dims_; }
  const std::vector<int>& dims(Space space) const {
    return space == Space::kState ? state_dims_ : input_dims_;
  }

  int distance(int i, int j) const;
  bool reachable(int i, int j) const { return distance(i, j) != kUnreachable; }
  bool connected() const { return connected_; }
  /// Largest finite distance.
  int diameter() const { return diameter_; }

  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }
  int state_offset(int i) const { return state_offsets_.at(i); }
  int input_offset(int i) const { return input_offsets_.at(i); }

  /// Same graph with new block sizes.
  Topology WithDims(std::vector<int> state_dims,
                    std::vector<int> input_dims) const;

 private:
  Topology() = default;
  void Finalize();

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> state_dims_;
  std::vector<int> input_dims_;
  std::vector<int> state_offsets_;
  std::vector<int> input_offsets_;
  std::vector<int> distance_;
  int n_x_ = 0;
  int n_u_ = 0;
  int diameter_ = 0;
  bool connected_ = true;
};

/// Parsed edge-list file: a "N=<int>" header, then one "i j [weight]" per line.
/// Blank lines and lines starting with '#' are skipped.
struct EdgeList {
  int n = 0;
  std::vector<Edge> edges;
};

EdgeList ParseEdgeList(std::istream& in);
EdgeList ReadEdgeList(const std::string& path);
void WriteEdgeList(std::ostream& out, const Topology& topology);

}  // namespace sedlqr
