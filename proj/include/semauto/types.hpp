#ifndef SEMAUTO_TYPES_HPP
#define SEMAUTO_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>

namespace semauto {

using Real = double;

using UserId = std::int64_t;
using ItemId = std::int64_t;

// Index into the global feature vocabulary of an ItemFeatureMap.
using FeatureId = std::uint32_t;

using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
// Row-major so that per-row nonzero runs are contiguous in the value array.
using SparseMat = Eigen::SparseMatrix<Real, Eigen::RowMajor>;
using SpIndex = SparseMat::StorageIndex;

}  // namespace semauto

#endif  // SEMAUTO_TYPES_HPP
