#include "ssv/block_structure.hpp"

#include <stdexcept>

#include "ssv/linalg.hpp"

namespace ssv {

BlockStructure::BlockStructure(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
        throw std::invalid_argument("BlockStructure: at least one block required");
    }
    bool has_repeated = false;
    for (const Block& b : blocks_) {
        if (std::holds_alternative<RepeatedScalar>(b)) {
            const auto& rs = std::get<RepeatedScalar>(b);
            if (rs.v < 1) throw std::invalid_argument("BlockStructure: repetition count must be >= 1");
            row_dim_ += rs.v;
            col_dim_ += rs.v;
        } else if (std::holds_alternative<FullBlock>(b)) {
            const auto& fb = std::get<FullBlock>(b);
            if (fb.dim < 1) throw std::invalid_argument("BlockStructure: block size must be >= 1");
            row_dim_ += fb.dim;
            col_dim_ += fb.dim;
        } else {
            const auto& rf = std::get<RepeatedFullBlock>(b);
            if (rf.v < 1 || rf.m1 < 1 || rf.n1 < 1) {
                throw std::invalid_argument("BlockStructure: repeated full-block sizes must be >= 1");
            }
            has_repeated = true;
            row_dim_ += rf.v * rf.m1;
            col_dim_ += rf.v * rf.n1;
        }
    }
    if (has_repeated && blocks_.size() != 1) {
        throw std::invalid_argument(
            "BlockStructure: a RepeatedFullBlock must be the only block in the structure");
    }
}

BlockStructure BlockStructure::repeated_scalar(std::size_t v) {
    return BlockStructure({Block{RepeatedScalar{v}}});
}

BlockStructure BlockStructure::full(std::size_t dim) {
    return BlockStructure({Block{FullBlock{dim}}});
}

BlockStructure BlockStructure::repeated_full(std::size_t v, std::size_t m1) {
    return BlockStructure({Block{RepeatedFullBlock{v, m1, m1}}});
}

BlockStructure BlockStructure::repeated_full_rect(std::size_t v, std::size_t m1, std::size_t n1) {
    return BlockStructure({Block{RepeatedFullBlock{v, m1, n1}}});
}

bool BlockStructure::has_repeated_full() const noexcept {
    for (const Block& b : blocks_) {
        if (std::holds_alternative<RepeatedFullBlock>(b)) return true;
    }
    return false;
}

std::vector<std::size_t> BlockStructure::scaling_block_dims() const {
    if (!is_square()) {
        throw std::invalid_argument("BlockStructure: diagonal scaling requires a square structure");
    }
    std::vector<std::size_t> dims;
    for (const Block& b : blocks_) {
        if (std::holds_alternative<RepeatedScalar>(b)) {
            dims.insert(dims.end(), std::get<RepeatedScalar>(b).v, 1);
        } else if (std::holds_alternative<FullBlock>(b)) {
            dims.push_back(std::get<FullBlock>(b).dim);
        } else {
            const auto& rf = std::get<RepeatedFullBlock>(b);
            dims.insert(dims.end(), rf.v, rf.m1);
        }
    }
    return dims;
}

Perturbation::Perturbation(BlockStructure structure, std::vector<ComplexMatrix> block_values)
    : structure_(std::move(structure)), block_values_(std::move(block_values)) {
    if (block_values_.size() != structure_.blocks().size()) {
        throw std::invalid_argument("Perturbation: one block value per structural block required");
    }

    std::vector<Complex> entries(structure_.row_dim() * structure_.col_dim(), Complex(0.0, 0.0));
    const std::size_t cols = structure_.col_dim();
    std::size_t r0 = 0, c0 = 0;
    for (std::size_t k = 0; k < block_values_.size(); ++k) {
        const Block& b = structure_.blocks()[k];
        const ComplexMatrix& val = block_values_[k];
        if (std::holds_alternative<RepeatedScalar>(b)) {
            if (val.rows() != 1 || val.cols() != 1) {
                throw std::invalid_argument("Perturbation: repeated scalar block value must be 1x1");
            }
            const std::size_t v = std::get<RepeatedScalar>(b).v;
            for (std::size_t i = 0; i < v; ++i) entries[(r0 + i) * cols + (c0 + i)] = val(0, 0);
            r0 += v;
            c0 += v;
        } else if (std::holds_alternative<FullBlock>(b)) {
            const std::size_t d = std::get<FullBlock>(b).dim;
            if (val.rows() != d || val.cols() != d) {
                throw std::invalid_argument("Perturbation: full-block value has wrong size");
            }
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) entries[(r0 + i) * cols + (c0 + j)] = val(i, j);
            r0 += d;
            c0 += d;
        } else {
            const auto& rf = std::get<RepeatedFullBlock>(b);
            if (val.rows() != rf.m1 || val.cols() != rf.n1) {
                throw std::invalid_argument("Perturbation: repeated full-block value has wrong size");
            }
            for (std::size_t rep = 0; rep < rf.v; ++rep) {
                for (std::size_t i = 0; i < rf.m1; ++i)
                    for (std::size_t j = 0; j < rf.n1; ++j)
                        entries[(r0 + rep * rf.m1 + i) * cols + (c0 + rep * rf.n1 + j)] = val(i, j);
            }
            r0 += rf.v * rf.m1;
            c0 += rf.v * rf.n1;
        }
    }
    assembled_ = ComplexMatrix(structure_.row_dim(), structure_.col_dim(), std::move(entries));
    norm_ = sigma_max(assembled_);
}

Perturbation Perturbation::scaled(const Complex& factor) const {
    std::vector<ComplexMatrix> vals;
    vals.reserve(block_values_.size());
    for (const ComplexMatrix& v : block_values_) vals.push_back(factor * v);
    return Perturbation(structure_, std::move(vals));
}

}  // namespace ssv
