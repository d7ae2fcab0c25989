#ifndef ELCA_HYPERGRAPH_HPP
#define ELCA_HYPERGRAPH_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elca/types.hpp"

namespace elca {

/// Hypergraph as an N x M binary incidence matrix: cell (i, j) is 1 iff
/// vertex i belongs to hyperedge j. Hyperedges form a multiset, so duplicate
/// columns and duplicate edge labels are allowed; vertex labels are unique.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;

  /// Labels default to "v1".."vN" and "e1".."eM" when left empty.
  /// Throws ValidationError on non-binary cells, duplicate vertex labels or
  /// label vectors of the wrong length.
  explicit IncidenceMatrix(BinaryMatrix cells, std::vector<std::string> vertex_labels = {},
                           std::vector<std::string> edge_labels = {});

  Index n_vertices() const { return cells_.rows(); }
  Index n_edges() const { return cells_.cols(); }

  const BinaryMatrix& cells() const { return cells_; }
  bool operator()(Index vertex, Index edge) const { return cells_(vertex, edge) != 0; }

  const std::vector<std::string>& vertex_labels() const { return vertex_labels_; }
  const std::vector<std::string>& edge_labels() const { return edge_labels_; }

  /// Cells as a dense real matrix, for linear-algebra kernels.
  Matrix to_real() const { return cells_.cast<double>(); }

  /// Sub-hypergraph made of the listed hyperedges, in the given order.
  IncidenceMatrix select_edges(std::span<const Index> edges) const;

  friend bool operator==(const IncidenceMatrix& lhs, const IncidenceMatrix& rhs) {
    return lhs.cells_ == rhs.cells_ && lhs.vertex_labels_ == rhs.vertex_labels_ &&
           lhs.edge_labels_ == rhs.edge_labels_;
  }

 private:
  BinaryMatrix cells_;
  std::vector<std::string> vertex_labels_;
  std::vector<std::string> edge_labels_;
};

struct SizeHistogram {
  std::map<Index, Index> counts;
  Index total = 0;
};

std::vector<Index> edge_sizes(const IncidenceMatrix& m);
SizeHistogram size_histogram(const IncidenceMatrix& m);

enum class Format { EdgeList, Bipartite, DenseCsv };

Format parse_format(std::string_view name);
std::string_view format_name(Format f);

// One hyperedge per line, whitespace-separated vertex labels; an empty line
// is an empty hyperedge. Vertices are ordered by first appearance.
IncidenceMatrix parse_hyperedge_list(std::istream& in);
void write_hyperedge_list(std::ostream& out, const IncidenceMatrix& m);

// "vertex edge" pairs, one incidence per line; blank lines are skipped.
IncidenceMatrix parse_bipartite_edges(std::istream& in);
void write_bipartite_edges(std::ostream& out, const IncidenceMatrix& m);

// Rows of 0/1 separated by commas. A non-numeric first cell marks a header
// row of edge labels; a leading vertex-label column is present when the
// header's corner cell is empty or the first data cell is non-numeric.
IncidenceMatrix parse_dense_csv(std::istream& in);
void write_dense_csv(std::ostream& out, const IncidenceMatrix& m);

IncidenceMatrix parse(Format f, std::istream& in);
IncidenceMatrix parse_string(Format f, std::string_view text);
IncidenceMatrix read_file(Format f, const std::string& path);

}  // namespace elca

#endif  // ELCA_HYPERGRAPH_HPP
