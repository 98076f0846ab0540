#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "sbmlab/model.hpp"

namespace sbmlab {

struct GeneratedInstance;

/// Writes `%%MatrixMarket matrix coordinate pattern symmetric`, lower
/// triangle, 1-based.
void write_matrix_market(std::ostream& os, const AdjacencyMatrix& a);
/// Reads a coordinate pattern symmetric file. Entries from either triangle are
/// accepted and mirrored; a diagonal entry is rejected as NonZeroDiagonal.
AdjacencyMatrix read_matrix_market(std::istream& is);

/// One 1-based label per line.
void write_labels(std::ostream& os, const CommunityAssignment& z);
/// When k is not given, the largest label read is used.
CommunityAssignment read_labels(std::istream& is, std::optional<int> k = std::nullopt);

AdjacencyMatrix load_matrix_market(const std::filesystem::path& path);
void save_matrix_market(const std::filesystem::path& path, const AdjacencyMatrix& a);
CommunityAssignment load_labels(const std::filesystem::path& path, std::optional<int> k = std::nullopt);
void save_labels(const std::filesystem::path& path, const CommunityAssignment& z);

/// Writes `<prefix>.mtx`, `<prefix>.labels` and `<prefix>.meta.json`
/// (n, k, beta, b, seed, rho, alpha, latent).
void save_instance(const std::filesystem::path& prefix, const GeneratedInstance& instance);

}  // namespace sbmlab
