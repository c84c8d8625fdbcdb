#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ssv/complex_matrix.hpp"

namespace ssv {

/// delta * I_v, one complex scalar repeated v times on the diagonal.
struct RepeatedScalar {
    std::size_t v;
};

/// One unconstrained complex block of the given size.
struct FullBlock {
    std::size_t dim;
};

/// I_v (x) Delta1 with Delta1 an m1 x n1 complex block. n1 == m1 (square
/// block) everywhere except the experimental rectangular solver paths.
struct RepeatedFullBlock {
    std::size_t v;
    std::size_t m1;
    std::size_t n1;
};

using Block = std::variant<RepeatedScalar, FullBlock, RepeatedFullBlock>;

/// Ordered description of an uncertainty set.
///
/// A structure containing a RepeatedFullBlock consists of exactly that one
/// block; mixing it with other block kinds is rejected since no solver
/// handles the combination.
class BlockStructure {
public:
    explicit BlockStructure(std::vector<Block> blocks);

    static BlockStructure repeated_scalar(std::size_t v);
    static BlockStructure full(std::size_t dim);
    static BlockStructure repeated_full(std::size_t v, std::size_t m1);
    static BlockStructure repeated_full_rect(std::size_t v, std::size_t m1, std::size_t n1);

    const std::vector<Block>& blocks() const noexcept { return blocks_; }

    /// Rows of an admissible perturbation (equals cols of the matrix it
    /// applies to).
    std::size_t row_dim() const noexcept { return row_dim_; }
    /// Cols of an admissible perturbation (equals rows of the matrix).
    std::size_t col_dim() const noexcept { return col_dim_; }
    bool is_square() const noexcept { return row_dim_ == col_dim_; }

    bool has_repeated_full() const noexcept;
    /// True when every block is a RepeatedScalar or FullBlock.
    bool is_non_repeated() const noexcept { return !has_repeated_full(); }

    /// Block sizes of the diagonal (non-repeated) scaling set used by
    /// Osborne balancing: v ones for a RepeatedScalar, dim for a FullBlock,
    /// and v copies of m1 for a RepeatedFullBlock (its non-repeated
    /// relaxation). Square structures only.
    std::vector<std::size_t> scaling_block_dims() const;

private:
    std::vector<Block> blocks_;
    std::size_t row_dim_ = 0;
    std::size_t col_dim_ = 0;
};

/// A concrete structured perturbation with its assembled block-diagonal
/// matrix and spectral norm.
class Perturbation {
public:
    Perturbation() = default;

    /// block_values holds one matrix per structural block: 1x1 for a
    /// RepeatedScalar, dim x dim for a FullBlock, and a single m1 x n1
    /// matrix for a RepeatedFullBlock.
    Perturbation(BlockStructure structure, std::vector<ComplexMatrix> block_values);

    bool empty() const noexcept { return assembled_.empty(); }
    const BlockStructure& structure() const noexcept { return structure_; }
    const std::vector<ComplexMatrix>& block_values() const noexcept { return block_values_; }
    const ComplexMatrix& assembled() const noexcept { return assembled_; }
    /// Maximum singular value of the assembled matrix.
    double norm() const noexcept { return norm_; }

    /// Returns the perturbation with every block multiplied by factor.
    Perturbation scaled(const Complex& factor) const;

private:
    BlockStructure structure_{std::vector<Block>{FullBlock{1}}};
    std::vector<ComplexMatrix> block_values_;
    ComplexMatrix assembled_;
    double norm_ = 0.0;
};

}  // namespace ssv
