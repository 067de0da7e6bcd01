// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace refmatte {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs were readable but inconsistent (missing stack members, mismatched
/// sample sets, a generated sample failing its self-check).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace refmatte
