#include "sedlqr/topology.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "sedlqr/error.h"

namespace sedlqr {

namespace {

std::vector<int> Uniform(int n, int value) { return std::vector<int>(n, value); }

}  // namespace

Topology Topology::Cycle(int n, int state_dim, int input_dim) {
  if (n < 3) {
    throw Error(ErrorKind::kInvalidTopology, "cycle needs N >= 3");
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return FromEdgeList(n, std::move(edges), Uniform(n, state_dim),
                      Uniform(n, input_dim));
}

Topology Topology::Grid(int rows, int cols, int state_dim, int input_dim) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::kInvalidTopology, "grid dimensions must be >= 1");
  }
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      if (c + 1 < cols) edges.push_back({id, id + 1, 1.0});
      if (r + 1 < rows) edges.push_back({id, id + cols, 1.0});
    }
  }
  const int n = rows * cols;
  return FromEdgeList(n, std::move(edges), Uniform(n, state_dim),
                      Uniform(n, input_dim));
}

Topology Topology::FromEdgeList(int n, std::vector<Edge> edges,
                                std::vector<int> state_dims,
                                std::vector<int> input_dims) {
  if (n < 1) throw Error(ErrorKind::kInvalidTopology, "N must be >= 1");
  if (static_cast<int>(state_dims.size()) != n ||
      static_cast<int>(input_dims.size()) != n) {
    throw Error(ErrorKind::kInvalidTopology, "dims lists must have length N");
  }
  for (int d : state_dims) {
    if (d < 1) throw Error(ErrorKind::kInvalidTopology, "state dims must be >= 1");
  }
  for (int d : input_dims) {
    if (d < 0) throw Error(ErrorKind::kInvalidTopology, "input dims must be >= 0");
  }
  Topology t;
  t.n_ = n;
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
      throw Error(ErrorKind::kInvalidEdge, "endpoint out of range: " +
                                               std::to_string(e.i) + " " +
                                               std::to_string(e.j));
    }
    if (e.i == e.j) {
      throw Error(ErrorKind::kInvalidEdge,
                  "self loop at agent " + std::to_string(e.i));
    }
    const auto key = std::minmax(e.i, e.j);
    if (seen.insert(key).second) t.edges_.push_back(e);
  }
  t.state_dims_ = std::move(state_dims);
  t.input_dims_ = std::move(input_dims);
  t.Finalize();
  return t;
}

Topology Topology::WithDims(std::vector<int> state_dims,
                            std::vector<int> input_dims) const {
  return FromEdgeList(n_, edges_, std::move(state_dims), std::move(input_dims));
}

void Topology::Finalize() {
  std::vector<std::vector<int>> adjacency(n_);
  for (const Edge& e : edges_) {
    adjacency[e.i].push_back(e.j);
    adjacency[e.j].push_back(e.i);
  }
  distance_.assign(static_cast<std::size_t>(n_) * n_, kUnreachable);
  diameter_ = 0;
  connected_ = true;
  for (int source = 0; source < n_; ++source) {
    int* row = distance_.data() + static_cast<std::size_t>(source) * n_;
    std::queue<int> frontier;
    row[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int w : adjacency[v]) {
        if (row[w] == kUnreachable) {
          row[w] = row[v] + 1;
          frontier.push(w);
        }
      }
    }
    for (int j = 0; j < n_; ++j) {
      if (row[j] == kUnreachable) {
        connected_ = false;
      } else {
        diameter_ = std::max(diameter_, row[j]);
      }
    }
  }
  state_offsets_.resize(n_);
  input_offsets_.resize(n_);
  std::exclusive_scan(state_dims_.begin(), state_dims_.end(),
                      state_offsets_.begin(), 0);
  std::exclusive_scan(input_dims_.begin(), input_dims_.end(),
                      input_offsets_.begin(), 0);
  n_x_ = std::accumulate(state_dims_.begin(), state_dims_.end(), 0);
  n_u_ = std::accumulate(input_dims_.begin(), input_dims_.end(), 0);
}

int Topology::distance(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) {
    throw Error(ErrorKind::kInvalidIndex, "agent index out of range");
  }
  return distance_[static_cast<std::size_t>(i) * n_ + j];
}

EdgeList ParseEdgeList(std::istream& in) {
  EdgeList result;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!have_header) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || line.substr(first, eq - first) != "N") {
        throw Error(ErrorKind::kIoError, "edge list must start with N=<int>");
      }
      result.n = std::stoi(line.substr(eq + 1));
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    Edge e;
    if (!(fields >> e.i >> e.j)) {
      throw Error(ErrorKind::kIoError,
                  "malformed edge on line " + std::to_string(line_no));
    }
    if (!(fields >> e.weight)) e.weight = 1.0;
    result.edges.push_back(e);
  }
  if (!have_header) throw Error(ErrorKind::kIoError, "missing N= header");
  return result;
}

EdgeList ReadEdgeList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return ParseEdgeList(in);
}

void WriteEdgeList(std::ostream& out, const Topology& topology) {
  out << "N=" << topology.agent_count() << "\n";
  out << std::setprecision(17);
  for (const Edge& e : topology.edges()) {
    out << e.i << " " << e.j << " " << e.weight << "\n";
  }
}

}  // namespace sedlqr
