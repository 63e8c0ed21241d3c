#include "arsvd/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace arsvd {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             std::size_t col, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                  ": " + what);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

double parse_number(const std::string& field, const std::string& path,
                    std::size_t line, std::size_t col) {
  if (field.empty()) parse_fail(path, line, col, "empty field");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) {
    parse_fail(path, line, col, "not a number: '" + field + "'");
  }
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

void write_matrix_tsv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) {
    out << '#';
    for (std::size_t j = 0; j < header.size(); ++j) {
      out << (j ? "\t" : " ") << header[j];
    }
    out << '\n';
  }
  std::string row;
  for (Index i = 0; i < m.rows(); ++i) {
    row.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) row += '\t';
      row += format_double(m(i, j));
    }
    row += '\n';
    out << row;
  }
}

Matrix read_matrix_tsv(const std::string& path) {
  const auto lines = read_lines(path);
  std::size_t first = 0;
  if (!lines.empty() && !lines[0].empty() && lines[0][0] == '#') first = 1;

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;  // trailing newline
    const auto fields = split_tabs(lines[li]);
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      parse_fail(path, li + 1, fields.size(),
                 "expected " + std::to_string(width) + " columns, found " +
                     std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row.push_back(parse_number(fields[c], path, li + 1, c + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_vector_tsv(const std::string& path, const Vector& v) {
  auto out = open_out(path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

Vector read_vector_tsv(const std::string& path) {
  const Matrix m = read_matrix_tsv(path);
  if (m.cols() != 1) {
    throw DataError(path + ": expected a single column, found " +
                    std::to_string(m.cols()));
  }
  return m.col(0);
}

void write_genotypes_tsv(const std::string& path, const Matrix& genotypes,
                         const std::vector<std::string>& variant_ids) {
  if (static_cast<Index>(variant_ids.size()) != genotypes.cols()) {
    throw DataError("write_genotypes_tsv: id count does not match variants");
  }
  auto out = open_out(path);
  std::string row;
  for (Index j = 0; j < genotypes.cols(); ++j) {
    row = variant_ids[static_cast<std::size_t>(j)];
    for (Index i = 0; i < genotypes.rows(); ++i) {
      row += '\t';
      row += std::to_string(static_cast<int>(genotypes(i, j)));
    }
    row += '\n';
    out << row;
  }
}

std::pair<Matrix, std::vector<std::string>> read_genotypes_tsv(
    const std::string& path) {
  const auto lines = read_lines(path);
  std::size_t first = 0;
  if (!lines.empty() && !lines[0].empty() && lines[0][0] == '#') first = 1;

  std::vector<std::string> ids;
  std::vector<std::vector<double>> variants;
  std::size_t n = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;
    const auto fields = split_tabs(lines[li]);
    if (fields.size() < 2) parse_fail(path, li + 1, 1, "missing genotype columns");
    if (n == 0) {
      n = fields.size() - 1;
    } else if (fields.size() - 1 != n) {
      parse_fail(path, li + 1, fields.size(),
                 "expected " + std::to_string(n) + " individuals, found " +
                     std::to_string(fields.size() - 1));
    }
    ids.push_back(fields[0]);
    std::vector<double> row;
    row.reserve(n);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], path, li + 1, c + 1);
      if (v != 0.0 && v != 1.0 && v != 2.0) {
        parse_fail(path, li + 1, c + 1, "genotype not in {0, 1, 2}");
      }
      row.push_back(v);
    }
    variants.push_back(std::move(row));
  }
  if (variants.empty()) throw DataError(path + ": no variants");

  Matrix g(static_cast<Index>(n), static_cast<Index>(variants.size()));
  for (std::size_t j = 0; j < variants.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      g(static_cast<Index>(i), static_cast<Index>(j)) = variants[j][i];
    }
  }
  return {std::move(g), std::move(ids)};
}

std::vector<std::pair<std::string, std::string>> read_groups_tsv(
    const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<std::string, std::string>> groups;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    if (lines[li][0] == '#') continue;
    const auto fields = split_tabs(lines[li]);
    if (fields.size() != 2) {
      parse_fail(path, li + 1, fields.size(), "expected variant_id<TAB>group");
    }
    groups.emplace_back(fields[0], fields[1]);
  }
  if (groups.empty()) throw DataError(path + ": no group assignments");
  return groups;
}

void write_assoc_tsv(const std::string& path, const AssocResult& res) {
  auto out = open_out(path);
  out << "# variant_id\tbeta\tse\tstat\tp\n";
  for (std::size_t j = 0; j < res.variant_id.size(); ++j) {
    const auto i = static_cast<Index>(j);
    out << res.variant_id[j] << '\t' << format_double(res.beta[i]) << '\t'
        << format_double(res.se[i]) << '\t' << format_double(res.stat[i])
        << '\t' << format_double(res.p[i]) << '\n';
  }
}

}  // namespace arsvd
