// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <stdexcept>
#include <string>

namespace vset {

enum class Errc {
  // corpus
  kMalformedDocument,
  kMissingExpansion,
  kMissingTitle,
  kEmptyCorpus,
  kInvalidConfig,
  // embed / index
  kBadHeader,
  kBadRecord,
  kDimensionMismatch,
  kDuplicateKey,
  kMissingEmbedding,
  kMissingTitleEmbedding,
  // pool
  kEmptyRetrieval,
  kEmptyPools,
  // split
  kInvalidRatios,
  // model
  kInvalidDims,
  kShapeMismatch,
  kEmptySplit,
  kNonFiniteLoss,
  kDegenerateLabels,
  // eval
  kEmptyInput,
  kUnknownOid,
  kMissingManifestRow,
  // theory
  kInfeasibleTarget,
  // persistence
  kIoError,
  kIntegrityError,
  kVersionError,
  kKindMismatch,
  // cli
  kConfigError,
};

const char* errc_name(Errc c);

// Process exit classes, matching the CLI contract:
// 0 success, 1 usage, 2 data error, 3 internal.
int errc_exit_code(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }
  int exit_code() const { return errc_exit_code(code_); }

 private:
  Errc code_;
};

}  // namespace vset
