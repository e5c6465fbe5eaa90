#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcfgscm {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Records read from JSON Lines. Every record must be an object of string
/// values; `fields` is the key order of the first record.
struct Dataset {
  std::vector<std::string> fields;
  std::vector<std::vector<std::string>> records;  // values in `fields` order

  std::size_t field_index(std::string_view name) const;  // throws DatasetError
};

/// Blank lines are skipped. Throws DatasetError naming the line on malformed
/// JSON, non-string values, or a key set differing from the first record.
Dataset read_jsonl(std::istream& in);

struct ContingencyTest {
  std::vector<std::string> row_values;
  std::vector<std::string> col_values;
  std::vector<std::vector<std::size_t>> counts;
  std::size_t n = 0;
  double chi_square = 0;
  std::size_t dof = 0;
  double p_value = 1;
  double mi_bits = 0;
  double min_expected = 0;
  bool low_expected = false;  // some expected count below 5
};

/// Pearson chi-square test of independence on a count table, with the p-value
/// from the regularized upper incomplete gamma function, and plug-in mutual
/// information in bits. Throws DatasetError when the table is smaller than
/// 2x2 or has an empty row or column.
ContingencyTest contingency_test(std::vector<std::string> row_values, std::vector<std::string> col_values,
                                 std::vector<std::vector<std::size_t>> counts);

struct EmpiricalVerdict {
  std::string feature;
  std::string label;
  ContingencyTest test;
};

/// Tabulates two fields (values sorted) and runs contingency_test. Throws
/// DatasetError on a missing field or a column with a single observed value.
EmpiricalVerdict empirical_audit(const Dataset& data, std::string_view feature, std::string_view label);

}  // namespace pcfgscm
