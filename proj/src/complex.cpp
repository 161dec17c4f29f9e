#include "topostat/complex.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "topostat/rng.hpp"

namespace topostat {

namespace {

std::string show(const Simplex& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

}  // namespace

SimplicialComplex::SimplicialComplex(int order, std::vector<std::vector<Simplex>> simplices)
    : order_(order), simplices_(std::move(simplices)) {
  if (order_ < 0) fail(ErrorCode::InvalidArgument, "OrderOutOfRange: negative order");
  if (simplices_.size() != static_cast<size_t>(order_) + 1)
    fail(ErrorCode::InvalidArgument,
         "OrderOutOfRange: expected " + std::to_string(order_ + 1) + " per-order lists, got " +
             std::to_string(simplices_.size()));
}

int SimplicialComplex::count(int k) const {
  if (k < 0 || k > order_) return 0;
  return static_cast<int>(simplices_[k].size());
}

int SimplicialComplex::total_size() const {
  int n = 0;
  for (int k = 0; k <= order_; ++k) n += count(k);
  return n;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
  if (k < 0 || k > order_)
    fail(ErrorCode::InvalidArgument, "OrderOutOfRange: k=" + std::to_string(k));
  return simplices_[k];
}

int SimplicialComplex::index_of(int k, const Simplex& s) const {
  if (k < 0 || k > order_) return -1;
  const auto& list = simplices_[k];
  const auto it = std::lower_bound(list.begin(), list.end(), s);
  if (it != list.end() && *it == s) return static_cast<int>(it - list.begin());
  return -1;
}

std::vector<int> SimplicialComplex::order_offsets() const {
  std::vector<int> off(order_ + 1, 0);
  for (int k = 1; k <= order_; ++k) off[k] = off[k - 1] + count(k - 1);
  return off;
}

SimplicialComplex SimplicialComplex::random(int n0, double p_edge, double p_tri,
                                            std::uint64_t seed) {
  if (n0 < 1) fail(ErrorCode::InvalidArgument, "InvalidArgument: n0 must be >= 1");
  if (p_edge < 0 || p_edge > 1 || p_tri < 0 || p_tri > 1)
    fail(ErrorCode::InvalidArgument, "InvalidArgument: probabilities must lie in [0,1]");

  std::vector<Simplex> vertices;
  vertices.reserve(n0);
  for (int v = 0; v < n0; ++v) vertices.push_back({v});

  // Draws happen in lexicographic enumeration order from dedicated streams so
  // the result depends only on (n0, p_edge, p_tri, seed).
  SplitMix64 edge_rng(mix_seed(seed, 0));
  std::vector<Simplex> edges;
  std::set<std::pair<int, int>> edge_set;
  for (int i = 0; i < n0; ++i)
    for (int j = i + 1; j < n0; ++j)
      if (edge_rng.next_unit() <= p_edge) {
        edges.push_back({i, j});
        edge_set.insert({i, j});
      }

  SplitMix64 tri_rng(mix_seed(seed, 1));
  std::vector<Simplex> triangles;
  for (int i = 0; i < n0; ++i)
    for (int j = i + 1; j < n0; ++j) {
      if (!edge_set.count({i, j})) continue;
      for (int k = j + 1; k < n0; ++k)
        if (edge_set.count({i, k}) && edge_set.count({j, k}) && tri_rng.next_unit() <= p_tri)
          triangles.push_back({i, j, k});
    }

  return SimplicialComplex(2, {std::move(vertices), std::move(edges), std::move(triangles)});
}

void validate(const SimplicialComplex& complex) {
  const int order = complex.order();
  const int n0 = complex.count(0);
  if (n0 < 1) fail(ErrorCode::Validation, "VertexOutOfRange: complex has no vertices");

  for (int k = 0; k <= order; ++k) {
    const auto& list = complex.simplices(k);
    for (size_t m = 0; m < list.size(); ++m) {
      const Simplex& s = list[m];
      if (static_cast<int>(s.size()) != k + 1)
        fail(ErrorCode::Validation,
             "UnsortedSimplex: simplex " + show(s) + " has wrong size for order " +
                 std::to_string(k));
      for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] >= s[i + 1])
          fail(ErrorCode::Validation,
               "UnsortedSimplex: vertex list " + show(s) + " is not strictly ascending");
      for (int v : s)
        if (v < 0 || v >= n0)
          fail(ErrorCode::Validation,
               "VertexOutOfRange: vertex " + std::to_string(v) + " in " + show(s) +
                   " is outside 0.." + std::to_string(n0 - 1));
      if (m > 0) {
        if (list[m - 1] == s)
          fail(ErrorCode::Validation, "DuplicateSimplex: " + show(s) + " listed twice");
        if (!(list[m - 1] < s))
          fail(ErrorCode::Validation,
               "UnsortedSimplex: order-" + std::to_string(k) +
                   " list is not lexicographically sorted at " + show(s));
      }
    }
  }

  // Vertices must be exactly {0},...,{n0-1}: sorted, distinct, in range.
  for (int v = 0; v < n0; ++v)
    if (complex.simplices(0)[v] != Simplex{v})
      fail(ErrorCode::Validation, "VertexOutOfRange: vertex list is not 0..N0-1");

  // Inclusion: every face of every simplex is present one order down.
  for (int k = 1; k <= order; ++k)
    for (const Simplex& s : complex.simplices(k)) {
      Simplex face(s.size() - 1);
      for (size_t i = 0; i < s.size(); ++i) {
        face.clear();
        for (size_t j = 0; j < s.size(); ++j)
          if (j != i) face.push_back(s[j]);
        if (complex.index_of(k - 1, face) < 0)
          fail(ErrorCode::Validation,
               "MissingFace: " + show(s) + " lacks face " + show(face));
      }
    }
}

IncidenceMatrix build_incidence(const SimplicialComplex& complex, int k) {
  if (k < 1 || k > complex.order())
    fail(ErrorCode::InvalidArgument,
         "OrderOutOfRange: incidence defined for 1 <= k <= " + std::to_string(complex.order()));

  const auto& upper = complex.simplices(k);
  const int rows = complex.count(k - 1);
  const int cols = static_cast<int>(upper.size());

  std::vector<Eigen::Triplet<int>> triplets;
  triplets.reserve(static_cast<size_t>(cols) * (k + 1));
  for (int m = 0; m < cols; ++m) {
    const Simplex& s = upper[m];
    Simplex face;
    face.reserve(s.size() - 1);
    for (size_t i = 0; i < s.size(); ++i) {
      face.clear();
      for (size_t j = 0; j < s.size(); ++j)
        if (j != i) face.push_back(s[j]);
      const int row = complex.index_of(k - 1, face);
      if (row < 0)
        fail(ErrorCode::Validation, "MissingFace: " + show(s) + " lacks face " + show(face));
      triplets.emplace_back(row, m, (i % 2 == 0) ? 1 : -1);
    }
  }

  IncidenceMatrix out;
  out.k = k;
  out.entries.resize(rows, cols);
  out.entries.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SimplicialComplex read_scf(std::istream& in) {
  std::string line;
  int line_no = 0;

  auto next_line = [&](bool allow_comment) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (allow_comment && line[0] == '#') continue;
      return true;
    }
    return false;
  };

  auto parse_fail = [&](const std::string& what) {
    fail(ErrorCode::Parse, "ParseError: line " + std::to_string(line_no) + ": " + what);
  };

  if (!next_line(false) || line != "#SCF v1")
    fail(ErrorCode::Parse,
         "ParseError: line " + std::to_string(line_no) + ": expected '#SCF v1' header");

  if (!next_line(true)) parse_fail("missing 'order' line");
  int order = -1;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> order) || tag != "order" || order < 0)
      parse_fail("expected 'order <K>', got '" + line + "'");
  }

  std::vector<std::vector<Simplex>> lists(order + 1);
  for (int k = 0; k <= order; ++k) {
    if (!next_line(true)) parse_fail("missing 'k " + std::to_string(k) + " <count>' header");
    int kk = -1, cnt = -1;
    {
      std::istringstream ls(line);
      std::string tag;
      if (!(ls >> tag >> kk >> cnt) || tag != "k" || kk != k || cnt < 0)
        parse_fail("expected 'k " + std::to_string(k) + " <count>', got '" + line + "'");
    }
    lists[k].reserve(cnt);
    for (int m = 0; m < cnt; ++m) {
      if (!next_line(true))
        parse_fail("expected " + std::to_string(cnt) + " simplices at order " +
                   std::to_string(k) + ", got " + std::to_string(m));
      std::istringstream ls(line);
      Simplex s;
      int v;
      while (ls >> v) s.push_back(v);
      if (!ls.eof()) parse_fail("invalid vertex id in '" + line + "'");
      if (static_cast<int>(s.size()) != k + 1)
        parse_fail("expected " + std::to_string(k + 1) + " vertex ids, got '" + line + "'");
      lists[k].push_back(std::move(s));
    }
  }

  SimplicialComplex complex(order, std::move(lists));
  validate(complex);
  return complex;
}

SimplicialComplex read_scf(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "IoError: cannot open '" + path + "' for reading");
  return read_scf(in);
}

void write_scf(const SimplicialComplex& complex, std::ostream& out) {
  out << "#SCF v1\n";
  out << "order " << complex.order() << "\n";
  for (int k = 0; k <= complex.order(); ++k) {
    out << "k " << k << " " << complex.count(k) << "\n";
    for (const Simplex& s : complex.simplices(k)) {
      for (size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << "\n";
    }
  }
}

void write_scf(const SimplicialComplex& complex, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "IoError: cannot open '" + path + "' for writing");
  write_scf(complex, out);
  if (!out) fail(ErrorCode::Io, "IoError: failed writing '" + path + "'");
}

}  // namespace topostat
