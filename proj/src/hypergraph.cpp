#include "elca/hypergraph.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace elca {

namespace {

std::vector<std::string> default_labels(char prefix, Index n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Reads every line, dropping a trailing '\r' so CRLF input parses like LF.
std::vector<std::string> read_lines(std::istream& in) {
  if (!in) throw InputError("input stream is not readable");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw InputError("read error on input stream");
  return lines;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    std::string field = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    // Tolerate spaces around fields.
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t");
    fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool is_numeric(const std::string& s) {
  if (s.empty()) return false;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

// Assigns column indices to labels by first appearance.
class LabelIndex {
 public:
  Index intern(const std::string& label) {
    auto [it, inserted] = index_.try_emplace(label, static_cast<Index>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  Index size() const { return static_cast<Index>(labels_.size()); }
  std::vector<std::string> release() { return std::move(labels_); }

 private:
  std::unordered_map<std::string, Index> index_;
  std::vector<std::string> labels_;
};

BinaryMatrix build_cells(Index rows, Index cols, const std::vector<std::pair<Index, Index>>& ones) {
  BinaryMatrix cells = BinaryMatrix::Zero(rows, cols);
  for (const auto& [i, j] : ones) cells(i, j) = 1;
  return cells;
}

}  // namespace

IncidenceMatrix::IncidenceMatrix(BinaryMatrix cells, std::vector<std::string> vertex_labels,
                                 std::vector<std::string> edge_labels)
    : cells_(std::move(cells)), vertex_labels_(std::move(vertex_labels)), edge_labels_(std::move(edge_labels)) {
  if (cells_.rows() < 1) throw ValidationError("hypergraph needs at least one vertex");
  for (Index j = 0; j < cells_.cols(); ++j)
    for (Index i = 0; i < cells_.rows(); ++i)
      if (cells_(i, j) > 1)
        throw ValidationError("cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") not in {0,1}");

  if (vertex_labels_.empty()) vertex_labels_ = default_labels('v', cells_.rows());
  if (edge_labels_.empty() && cells_.cols() > 0) edge_labels_ = default_labels('e', cells_.cols());
  if (static_cast<Index>(vertex_labels_.size()) != cells_.rows())
    throw ValidationError("expected " + std::to_string(cells_.rows()) + " vertex labels, got " +
                          std::to_string(vertex_labels_.size()));
  if (static_cast<Index>(edge_labels_.size()) != cells_.cols())
    throw ValidationError("expected " + std::to_string(cells_.cols()) + " edge labels, got " +
                          std::to_string(edge_labels_.size()));

  std::unordered_set<std::string> seen;
  for (const auto& label : vertex_labels_)
    if (!seen.insert(label).second) throw ValidationError("duplicate vertex label '" + label + "'");
}

IncidenceMatrix IncidenceMatrix::select_edges(std::span<const Index> edges) const {
  BinaryMatrix sub(n_vertices(), static_cast<Index>(edges.size()));
  std::vector<std::string> labels;
  labels.reserve(edges.size());
  for (std::size_t c = 0; c < edges.size(); ++c) {
    const Index j = edges[c];
    if (j < 0 || j >= n_edges()) throw ValidationError("edge index out of range");
    sub.col(static_cast<Index>(c)) = cells_.col(j);
    labels.push_back(edge_labels_[static_cast<std::size_t>(j)]);
  }
  return IncidenceMatrix(std::move(sub), vertex_labels_, std::move(labels));
}

std::vector<Index> edge_sizes(const IncidenceMatrix& m) {
  std::vector<Index> sizes(static_cast<std::size_t>(m.n_edges()));
  const auto sums = m.cells().cast<Index>().colwise().sum();
  for (Index j = 0; j < m.n_edges(); ++j) sizes[static_cast<std::size_t>(j)] = sums(j);
  return sizes;
}

SizeHistogram size_histogram(const IncidenceMatrix& m) {
  SizeHistogram h;
  for (Index s : edge_sizes(m)) ++h.counts[s];
  h.total = m.n_edges();
  return h;
}

Format parse_format(std::string_view name) {
  if (name == "edges") return Format::EdgeList;
  if (name == "bipartite") return Format::Bipartite;
  if (name == "csv") return Format::DenseCsv;
  throw ValidationError("unknown format '" + std::string(name) + "' (expected edges, bipartite or csv)");
}

std::string_view format_name(Format f) {
  switch (f) {
    case Format::EdgeList: return "edges";
    case Format::Bipartite: return "bipartite";
    case Format::DenseCsv: return "csv";
  }
  return "edges";
}

IncidenceMatrix parse_hyperedge_list(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw InputError("empty hypergraph: no hyperedge lines");

  LabelIndex vertices;
  std::vector<std::pair<Index, Index>> ones;
  for (std::size_t j = 0; j < lines.size(); ++j)
    for (const auto& tok : split_whitespace(lines[j])) ones.emplace_back(vertices.intern(tok), static_cast<Index>(j));

  if (vertices.size() == 0) throw InputError("empty hypergraph: no vertex labels");
  const Index n = vertices.size();
  return IncidenceMatrix(build_cells(n, static_cast<Index>(lines.size()), ones), vertices.release());
}

void write_hyperedge_list(std::ostream& out, const IncidenceMatrix& m) {
  for (Index j = 0; j < m.n_edges(); ++j) {
    bool first = true;
    for (Index i = 0; i < m.n_vertices(); ++i) {
      if (!m(i, j)) continue;
      if (!first) out << ' ';
      out << m.vertex_labels()[static_cast<std::size_t>(i)];
      first = false;
    }
    out << '\n';
  }
}

IncidenceMatrix parse_bipartite_edges(std::istream& in) {
  const auto lines = read_lines(in);
  LabelIndex vertices;
  LabelIndex edges;
  std::vector<std::pair<Index, Index>> ones;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto tokens = split_whitespace(lines[l]);
    if (tokens.empty()) continue;
    if (tokens.size() != 2)
      throw ParseError("expected 2 tokens (vertex edge), got " + std::to_string(tokens.size()),
                       static_cast<Index>(l + 1));
    const Index i = vertices.intern(tokens[0]);
    const Index j = edges.intern(tokens[1]);
    ones.emplace_back(i, j);
  }
  if (vertices.size() == 0) throw InputError("empty hypergraph: no incidences");
  const Index n = vertices.size();
  const Index m = edges.size();
  return IncidenceMatrix(build_cells(n, m, ones), vertices.release(), edges.release());
}

void write_bipartite_edges(std::ostream& out, const IncidenceMatrix& m) {
  for (Index j = 0; j < m.n_edges(); ++j)
    for (Index i = 0; i < m.n_vertices(); ++i)
      if (m(i, j))
        out << m.vertex_labels()[static_cast<std::size_t>(i)] << ' ' << m.edge_labels()[static_cast<std::size_t>(j)]
            << '\n';
}

IncidenceMatrix parse_dense_csv(std::istream& in) {
  auto lines = read_lines(in);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw InputError("empty hypergraph: no CSV rows");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  for (const auto& line : lines) rows.push_back(split_commas(line));

  const bool has_header = !is_numeric(rows.front().front());
  const std::size_t first_data = has_header ? 1 : 0;
  if (first_data >= rows.size()) throw InputError("empty hypergraph: header row without data rows");

  const bool has_row_labels =
      (has_header && rows.front().front().empty()) || !is_numeric(rows[first_data].front());
  const std::size_t first_col = has_row_labels ? 1 : 0;

  const std::size_t width = rows[first_data].size();
  if (width <= first_col && !(has_header && rows.front().size() == first_col))
    throw ParseError("row has no cells", static_cast<Index>(first_data + 1));

  std::vector<std::string> edge_labels;
  if (has_header) {
    if (rows.front().size() != width)
      throw ParseError("header has " + std::to_string(rows.front().size()) + " fields, data rows have " +
                           std::to_string(width),
                       1);
    edge_labels.assign(rows.front().begin() + static_cast<std::ptrdiff_t>(first_col), rows.front().end());
  }

  const Index n = static_cast<Index>(rows.size() - first_data);
  const Index m = static_cast<Index>(width - first_col);
  BinaryMatrix cells(n, m);
  std::vector<std::string> vertex_labels;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const Index line = static_cast<Index>(r + 1);
    if (row.size() != width)
      throw ParseError("ragged row: expected " + std::to_string(width) + " fields, got " + std::to_string(row.size()),
                       line);
    if (has_row_labels) vertex_labels.push_back(row.front());
    for (std::size_t c = first_col; c < width; ++c) {
      const auto& cell = row[c];
      if (cell != "0" && cell != "1")
        throw ParseError("cell not in {0,1}: '" + cell + "'", line, static_cast<Index>(c + 1));
      cells(static_cast<Index>(r - first_data), static_cast<Index>(c - first_col)) = cell == "1" ? 1 : 0;
    }
  }
  return IncidenceMatrix(std::move(cells), std::move(vertex_labels), std::move(edge_labels));
}

void write_dense_csv(std::ostream& out, const IncidenceMatrix& m) {
  // Empty corner cell: marks both the header row and the label column.
  for (const auto& label : m.edge_labels()) out << ',' << label;
  out << '\n';
  for (Index i = 0; i < m.n_vertices(); ++i) {
    out << m.vertex_labels()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m.n_edges(); ++j) out << ',' << (m(i, j) ? '1' : '0');
    out << '\n';
  }
}

IncidenceMatrix parse(Format f, std::istream& in) {
  switch (f) {
    case Format::EdgeList: return parse_hyperedge_list(in);
    case Format::Bipartite: return parse_bipartite_edges(in);
    case Format::DenseCsv: return parse_dense_csv(in);
  }
  throw ValidationError("unknown format");
}

IncidenceMatrix parse_string(Format f, std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(f, in);
}

IncidenceMatrix read_file(Format f, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse(f, in);
}

}  // namespace elca
