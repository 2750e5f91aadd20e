#include "dpbyz/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dpbyz {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                           ": " + what);
}

}  // namespace

Dataset parse_sparse(std::istream& in, std::optional<std::size_t> feature_count) {
  struct SparseRow {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank or comment-only line

    SparseRow row;
    char* end = nullptr;
    const double raw_label = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') parse_fail(line_no, "bad label '" + tok + "'");
    if (raw_label == -1.0) {
      row.label = 0.0;
    } else if (raw_label == 0.0 || raw_label == 1.0) {
      row.label = raw_label;
    } else {
      parse_fail(line_no, "label must be one of {-1, 0, +1}");
    }

    std::size_t prev_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(line_no, "expected idx:val, got '" + tok + "'");
      std::size_t idx = 0;
      try {
        std::size_t consumed = 0;
        idx = std::stoul(tok.substr(0, colon), &consumed);
        if (consumed != colon) parse_fail(line_no, "bad index in '" + tok + "'");
      } catch (const std::logic_error&) {
        parse_fail(line_no, "bad index in '" + tok + "'");
      }
      if (idx == 0) parse_fail(line_no, "indices are 1-based");
      if (idx <= prev_index) parse_fail(line_no, "indices must be strictly increasing");
      prev_index = idx;
      const std::string val_str = tok.substr(colon + 1);
      end = nullptr;
      const double val = std::strtod(val_str.c_str(), &end);
      if (end == val_str.c_str() || *end != '\0' || !std::isfinite(val)) {
        parse_fail(line_no, "bad value in '" + tok + "'");
      }
      row.entries.emplace_back(idx, val);
      if (idx > max_index) max_index = idx;
    }
    rows.push_back(std::move(row));
  }

  Dataset data;
  data.feature_count = feature_count.value_or(max_index);
  if (max_index > data.feature_count) {
    throw std::runtime_error("feature index " + std::to_string(max_index) +
                             " exceeds declared feature count " +
                             std::to_string(data.feature_count));
  }
  data.samples.reserve(rows.size());
  for (const SparseRow& row : rows) {
    Sample s;
    s.label = row.label;
    s.features.assign(data.feature_count, 0.0);
    for (const auto& [idx, val] : row.entries) s.features[idx - 1] = val;
    data.samples.push_back(std::move(s));
  }
  return data;
}

Dataset parse_sparse_file(const std::string& path,
                          std::optional<std::size_t> feature_count) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_sparse(in, feature_count);
}

std::string serialize_sparse(const Dataset& data) {
  std::string out;
  char buf[64];
  for (const Sample& s : data.samples) {
    std::snprintf(buf, sizeof(buf), "%g", s.label);
    out += buf;
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      if (s.features[j] == 0.0) continue;
      std::snprintf(buf, sizeof(buf), " %zu:%.17g", j + 1, s.features[j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t train_count,
                                  RandomStream& stream) {
  if (train_count > data.size()) {
    throw std::invalid_argument("split: train_count exceeds dataset size");
  }
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates on the stream; the modulo bias is immaterial here.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = stream.next_u64() % i;
    std::swap(order[i - 1], order[j]);
  }
  Dataset train{{}, data.feature_count};
  Dataset test{{}, data.feature_count};
  train.samples.reserve(train_count);
  test.samples.reserve(data.size() - train_count);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_count ? train : test).samples.push_back(data.samples[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

Batch sample_batch(const Dataset& train, std::size_t b, RandomStream& stream) {
  if (train.empty()) throw std::logic_error("sample_batch: empty training set");
  if (b == 0) throw std::invalid_argument("sample_batch: b must be >= 1");
  Batch batch;
  batch.reserve(b);
  for (std::size_t k = 0; k < b; ++k) {
    batch.push_back(train.samples[stream.next_u64() % train.size()]);
  }
  return batch;
}

}  // namespace dpbyz
