#pragma once

#include <iosfwd>
#include <string>

#include "adi/types.hpp"

namespace adi {

// Matrix Market I/O for real matrices, double precision.
//
// Readers accept both "array" and "coordinate" storage with general,
// symmetric, or skew-symmetric symmetry; the value field may be real or
// integer. Writers emit "array general" for dense matrices and
// "coordinate general" for sparse ones, with values printed so that they
// round-trip bit-exactly through the text form.
//
// All functions throw std::runtime_error with a descriptive message on
// malformed input or I/O failure.

DenseMatrix<double> read_dense_matrix_market(std::istream& in);
DenseMatrix<double> read_dense_matrix_market(const std::string& path);

SparseMatrix<double> read_sparse_matrix_market(std::istream& in);
SparseMatrix<double> read_sparse_matrix_market(const std::string& path);

void write_matrix_market(std::ostream& out, const DenseMatrix<double>& M);
void write_matrix_market(std::ostream& out, const SparseMatrix<double>& M);

void write_matrix_market(const std::string& path, const DenseMatrix<double>& M);
void write_matrix_market(const std::string& path, const SparseMatrix<double>& M);

}  // namespace adi
