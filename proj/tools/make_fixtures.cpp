// Writes the golden fixture tensors, built from their CP descriptions.
//   usage: make_fixtures OUTDIR

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "tensorspec/tensorspec.hpp"

using namespace tensorspec;

namespace {

// One term of a 0/1 CP description: which unit vector sits in each mode.
using Term = std::vector<std::size_t>;

DenseTensor from_terms(const std::vector<Term>& terms, std::size_t dim)
{
    CpDecomposition cp;
    cp.weights.assign(terms.size(), 1.0);
    for (std::size_t o = 0; o < terms.front().size(); ++o) {
        std::vector<Vector> cols;
        for (const auto& term : terms) cols.push_back(unit_vector(dim, term[o]).entries());
        cp.factors.push_back(tensorspec::detail::matrix_from_columns(cols, dim));
    }
    return cp_eval(cp);
}

} // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: make_fixtures OUTDIR\n";
        return 4;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    // T = (1,1) ⊗ (1,1) ⊗ (1,2): T[:,:,1] all ones, T[:,:,2] all twos
    CpDecomposition t;
    t.weights = {1.0};
    t.factors = {DenseTensor::matrix({{1}, {1}}), DenseTensor::matrix({{1}, {1}}), DenseTensor::matrix({{1}, {2}})};
    io::write_tensor((dir / "paperT.json").string(), cp_eval(t));

    const std::vector<std::vector<Term>> eight = {
        {{1, 1, 1}, {1, 2, 2}, {2, 1, 2}},
        {{1, 1, 1}, {1, 2, 2}, {2, 2, 1}},
        {{1, 1, 1}, {2, 1, 2}, {2, 2, 1}},
        {{1, 1, 2}, {1, 2, 1}, {2, 1, 1}},
        {{1, 1, 2}, {1, 2, 1}, {2, 2, 2}},
        {{1, 1, 2}, {2, 1, 1}, {2, 2, 2}},
        {{1, 2, 1}, {2, 1, 1}, {2, 2, 2}},
        {{1, 2, 2}, {2, 1, 2}, {2, 2, 1}},
    };
    for (std::size_t k = 0; k < eight.size(); ++k)
        io::write_tensor((dir / ("eight_" + std::to_string(k + 1) + ".json")).string(), from_terms(eight[k], 2));
    return 0;
}
