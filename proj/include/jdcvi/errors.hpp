#pragma once

#include <stdexcept>
#include <string>

namespace jdcvi {

/// Base class for all recoverable domain errors. Index sweeps catch this
/// (and nothing broader) to record an undefined value instead of aborting.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class EmptyClusterError : public Error {
public:
    explicit EmptyClusterError(const std::string& what) : Error(what) {}
};

class DegenerateCentersError : public Error {
public:
    explicit DegenerateCentersError(const std::string& what) : Error(what) {}
};

class InsufficientClustersError : public Error {
public:
    explicit InsufficientClustersError(const std::string& what) : Error(what) {}
};

class InsufficientPointsError : public Error {
public:
    explicit InsufficientPointsError(const std::string& what) : Error(what) {}
};

class ZeroDispersionError : public Error {
public:
    explicit ZeroDispersionError(const std::string& what) : Error(what) {}
};

class ZeroSeparationError : public Error {
public:
    explicit ZeroSeparationError(const std::string& what) : Error(what) {}
};

class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

class UndefinedSimilarityError : public Error {
public:
    explicit UndefinedSimilarityError(const std::string& what) : Error(what) {}
};

class MissingLabelsError : public Error {
public:
    explicit MissingLabelsError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class DimensionMismatchError : public Error {
public:
    explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace jdcvi
