#include "pcfgscm/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

namespace pcfgscm {

std::size_t Dataset::field_index(std::string_view name) const {
  const auto it = std::find(fields.begin(), fields.end(), name);
  if (it == fields.end()) throw DatasetError("dataset has no field '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - fields.begin());
}

Dataset read_jsonl(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw DatasetError(where + "malformed JSON");
    }
    if (!obj.is_object()) throw DatasetError(where + "expected a JSON object");
    if (data.records.empty()) {
      for (const auto& [k, v] : obj.items()) data.fields.push_back(k);
    }
    if (obj.size() != data.fields.size()) throw DatasetError(where + "record has a different set of fields");
    std::vector<std::string> row;
    row.reserve(data.fields.size());
    for (const auto& f : data.fields) {
      const auto it = obj.find(f);
      if (it == obj.end()) throw DatasetError(where + "missing field '" + f + "'");
      if (!it->is_string()) throw DatasetError(where + "field '" + f + "' is not a string");
      row.push_back(it->get<std::string>());
    }
    data.records.push_back(std::move(row));
  }
  return data;
}

ContingencyTest contingency_test(std::vector<std::string> row_values, std::vector<std::string> col_values,
                                 std::vector<std::vector<std::size_t>> counts) {
  const auto r = row_values.size(), c = col_values.size();
  if (r < 2 || c < 2) throw DatasetError("a contingency test needs at least two values on each side");
  if (counts.size() != r) throw DatasetError("count table has the wrong number of rows");
  for (const auto& row : counts) {
    if (row.size() != c) throw DatasetError("count table has the wrong number of columns");
  }

  std::vector<double> row_sum(r, 0), col_sum(c, 0);
  double n = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      row_sum[i] += counts[i][k];
      col_sum[k] += counts[i][k];
      n += counts[i][k];
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    if (row_sum[i] == 0) throw DatasetError("value '" + row_values[i] + "' has no observations");
  }
  for (std::size_t k = 0; k < c; ++k) {
    if (col_sum[k] == 0) throw DatasetError("value '" + col_values[k] + "' has no observations");
  }

  ContingencyTest t;
  t.n = static_cast<std::size_t>(n);
  t.min_expected = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const double expected = row_sum[i] * col_sum[k] / n;
      const double observed = counts[i][k];
      t.min_expected = std::min(t.min_expected, expected);
      t.chi_square += (observed - expected) * (observed - expected) / expected;
      if (observed > 0) t.mi_bits += observed / n * std::log2(observed / expected);
    }
  }
  t.mi_bits = std::max(t.mi_bits, 0.0);
  t.low_expected = t.min_expected < 5;
  t.dof = (r - 1) * (c - 1);
  t.p_value = boost::math::gamma_q(static_cast<double>(t.dof) / 2, t.chi_square / 2);
  t.row_values = std::move(row_values);
  t.col_values = std::move(col_values);
  t.counts = std::move(counts);
  return t;
}

EmpiricalVerdict empirical_audit(const Dataset& data, std::string_view feature, std::string_view label) {
  const auto fi = data.field_index(feature);
  const auto li = data.field_index(label);
  if (fi == li) throw DatasetError("feature and label must be different fields");

  std::map<std::string, std::map<std::string, std::size_t>> table;
  std::map<std::string, std::size_t> cols;
  for (const auto& rec : data.records) {
    ++table[rec[fi]][rec[li]];
    cols[rec[li]];
  }
  if (table.size() < 2) throw DatasetError("field '" + std::string(feature) + "' has fewer than two observed values");
  if (cols.size() < 2) throw DatasetError("field '" + std::string(label) + "' has fewer than two observed values");

  std::vector<std::string> row_values, col_values;
  for (const auto& [v, _] : table) row_values.push_back(v);
  for (const auto& [v, _] : cols) col_values.push_back(v);
  std::vector<std::vector<std::size_t>> counts;
  for (const auto& rv : row_values) {
    std::vector<std::size_t> row;
    for (const auto& cv : col_values) {
      const auto& inner = table[rv];
      const auto it = inner.find(cv);
      row.push_back(it == inner.end() ? 0 : it->second);
    }
    counts.push_back(std::move(row));
  }
  return {std::string(feature), std::string(label),
          contingency_test(std::move(row_values), std::move(col_values), std::move(counts))};
}

}  // namespace pcfgscm
