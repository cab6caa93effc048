#pragma once

#include <stdexcept>

namespace idks {

// Invalid algorithm parameter or run configuration.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dataset ingestion failure; the message names the offending row/column.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metric undefined on the given input (e.g. single-class AUC).
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent streaming/model state (batch bookkeeping, malformed snapshot).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idks
