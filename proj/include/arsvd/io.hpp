#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arsvd/lmm.hpp"
#include "arsvd/types.hpp"

namespace arsvd {

/// Dense TSV matrix: optional single '#'-prefixed header line, then one
/// tab-separated row per matrix row. Numbers are written with 17
/// significant digits so writes round-trip exactly.
void write_matrix_tsv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});
Matrix read_matrix_tsv(const std::string& path);

void write_vector_tsv(const std::string& path, const Vector& v);
Vector read_vector_tsv(const std::string& path);

/// Genotype TSV: one row per variant, first column variant_id, remaining
/// columns individuals, entries in {0, 1, 2}. Returned matrix is
/// individuals x variants.
void write_genotypes_tsv(const std::string& path, const Matrix& genotypes,
                         const std::vector<std::string>& variant_ids);
std::pair<Matrix, std::vector<std::string>> read_genotypes_tsv(
    const std::string& path);

/// Groups TSV: variant_id <tab> group name, one line per variant.
std::vector<std::pair<std::string, std::string>> read_groups_tsv(
    const std::string& path);

void write_assoc_tsv(const std::string& path, const AssocResult& res);

/// Shortest-round-trip text for a double (17 significant digits).
std::string format_double(double x);

}  // namespace arsvd
