#pragma once

// Finite-difference and counting references for the network layers.

#include <cstdint>

#include "dupliq/neural.hpp"

namespace nncheck {

dupliq::neural::Tensor random_tensor(std::vector<std::size_t> shape, dupliq::Rng& rng, double scale = 1.0);
dupliq::neural::Tensor random_indices(std::size_t batch, std::size_t steps, std::size_t vocab, dupliq::Rng& rng);

// Largest relative error between back-propagated and central-difference
// gradients of sum(output * w) for random fixed w, over every input
// coordinate (skipped for index inputs) and every trainable coordinate.
// The forward rng is reseeded per evaluation so dropout masks repeat.
double layer_gradcheck(dupliq::neural::Layer& layer, dupliq::neural::Tensor x, dupliq::neural::Mode mode,
                       bool input_is_indices = false);

// Parameter counts of build_architecture written out per layer, frozen
// tables and running statistics included (all) or excluded (trainable).
std::size_t expected_parameters(int id, std::size_t vocab, std::size_t glove, const dupliq::neural::ArchDims& d);
std::size_t expected_trainable(int id, std::size_t vocab, std::size_t glove, const dupliq::neural::ArchDims& d);

}  // namespace nncheck
