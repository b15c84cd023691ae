#include "adi/matrix_market.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/SparseCore>

namespace adi {

namespace {

enum class Storage { Array, Coordinate };
enum class Symmetry { General, Symmetric, SkewSymmetric };

struct Header {
  Storage storage;
  Symmetry symmetry;
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;  // coordinate only
};

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("matrix market: " + what);
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Reads the banner, comment lines, and the size line.
Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream banner(line);
  std::string tag, object, storage, field, symmetry;
  banner >> tag >> object >> storage >> field >> symmetry;
  if (tag != "%%MatrixMarket") fail("missing %%MatrixMarket banner");
  if (lower(object) != "matrix") fail("unsupported object '" + object + "'");

  Header h;
  const std::string st = lower(storage);
  if (st == "array") {
    h.storage = Storage::Array;
  } else if (st == "coordinate") {
    h.storage = Storage::Coordinate;
  } else {
    fail("unsupported storage '" + storage + "'");
  }

  const std::string f = lower(field);
  if (f != "real" && f != "integer" && f != "double") {
    fail("unsupported value field '" + field + "'");
  }

  const std::string sy = lower(symmetry);
  if (sy == "general") {
    h.symmetry = Symmetry::General;
  } else if (sy == "symmetric") {
    h.symmetry = Symmetry::Symmetric;
  } else if (sy == "skew-symmetric") {
    h.symmetry = Symmetry::SkewSymmetric;
  } else {
    fail("unsupported symmetry '" + symmetry + "'");
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '%') continue;
    std::istringstream sizes(line);
    long long r = -1, c = -1, z = -1;
    if (h.storage == Storage::Coordinate) {
      if (!(sizes >> r >> c >> z) || r < 0 || c < 0 || z < 0) fail("bad size line '" + line + "'");
      h.nnz = Index(z);
    } else {
      if (!(sizes >> r >> c) || r < 0 || c < 0) fail("bad size line '" + line + "'");
    }
    h.rows = Index(r);
    h.cols = Index(c);
    return h;
  }
  fail("missing size line");
}

double next_value(std::istream& in) {
  double v;
  if (!(in >> v)) fail("truncated or non-numeric data");
  return v;
}

DenseMatrix<double> read_dense(std::istream& in, const Header& h) {
  DenseMatrix<double> M = DenseMatrix<double>::Zero(h.rows, h.cols);
  if (h.storage == Storage::Array) {
    // Array data is column-major; symmetric files store the lower triangle.
    for (Index j = 0; j < h.cols; ++j) {
      const Index i0 = (h.symmetry == Symmetry::General) ? 0
                       : (h.symmetry == Symmetry::Symmetric) ? j
                                                             : j + 1;
      for (Index i = i0; i < h.rows; ++i) {
        const double v = next_value(in);
        M(i, j) = v;
        if (i != j) {
          if (h.symmetry == Symmetry::Symmetric) M(j, i) = v;
          if (h.symmetry == Symmetry::SkewSymmetric) M(j, i) = -v;
        }
      }
    }
  } else {
    for (Index e = 0; e < h.nnz; ++e) {
      long long i, j;
      if (!(in >> i >> j)) fail("truncated coordinate entry");
      const double v = next_value(in);
      if (i < 1 || i > h.rows || j < 1 || j > h.cols) fail("coordinate index out of range");
      M(Index(i) - 1, Index(j) - 1) += v;
      if (i != j) {
        if (h.symmetry == Symmetry::Symmetric) M(Index(j) - 1, Index(i) - 1) += v;
        if (h.symmetry == Symmetry::SkewSymmetric) M(Index(j) - 1, Index(i) - 1) -= v;
      }
    }
  }
  return M;
}

void format_value(char* buf, std::size_t cap, double v) {
  // %.17g round-trips every finite double through decimal text.
  std::snprintf(buf, cap, "%.17g", v);
}

}  // namespace

DenseMatrix<double> read_dense_matrix_market(std::istream& in) {
  const Header h = read_header(in);
  return read_dense(in, h);
}

SparseMatrix<double> read_sparse_matrix_market(std::istream& in) {
  const Header h = read_header(in);
  if (h.storage == Storage::Array) {
    return read_dense(in, h).sparseView();
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(h.nnz) * (h.symmetry == Symmetry::General ? 1 : 2));
  for (Index e = 0; e < h.nnz; ++e) {
    long long i, j;
    if (!(in >> i >> j)) fail("truncated coordinate entry");
    const double v = next_value(in);
    if (i < 1 || i > h.rows || j < 1 || j > h.cols) fail("coordinate index out of range");
    trip.emplace_back(int(i - 1), int(j - 1), v);
    if (i != j) {
      if (h.symmetry == Symmetry::Symmetric) trip.emplace_back(int(j - 1), int(i - 1), v);
      if (h.symmetry == Symmetry::SkewSymmetric) trip.emplace_back(int(j - 1), int(i - 1), -v);
    }
  }
  SparseMatrix<double> M(h.rows, h.cols);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

DenseMatrix<double> read_dense_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "' for reading");
  return read_dense_matrix_market(in);
}

SparseMatrix<double> read_sparse_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "' for reading");
  return read_sparse_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DenseMatrix<double>& M) {
  out << "%%MatrixMarket matrix array real general\n";
  out << M.rows() << " " << M.cols() << "\n";
  char buf[64];
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      format_value(buf, sizeof(buf), M(i, j));
      out << buf << "\n";
    }
  }
  if (!out) fail("write failed");
}

void write_matrix_market(std::ostream& out, const SparseMatrix<double>& M) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.rows() << " " << M.cols() << " " << M.nonZeros() << "\n";
  char buf[64];
  for (Index k = 0; k < M.outerSize(); ++k) {
    for (SparseMatrix<double>::InnerIterator it(M, k); it; ++it) {
      format_value(buf, sizeof(buf), it.value());
      out << (it.row() + 1) << " " << (it.col() + 1) << " " << buf << "\n";
    }
  }
  if (!out) fail("write failed");
}

void write_matrix_market(const std::string& path, const DenseMatrix<double>& M) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path + "' for writing");
  write_matrix_market(out, M);
}

void write_matrix_market(const std::string& path, const SparseMatrix<double>& M) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path + "' for writing");
  write_matrix_market(out, M);
}

}  // namespace adi
