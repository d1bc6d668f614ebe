// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace semimesh {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition on an argument was violated.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

/// Isosurface extraction found no cell crossing the iso level, or a mesh operation got no faces.
class EmptyMeshError : public Error {
  public:
    using Error::Error;
};

/// Parity voxelization disagreed across axes on too many cells.
class NonWatertightError : public Error {
  public:
    using Error::Error;
};

class NonFiniteError : public Error {
  public:
    using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
  public:
    using Error::Error;
};

}  // namespace semimesh
