#pragma once

#include "dupliq/neural/architectures.hpp"
#include "dupliq/neural/layers.hpp"
#include "dupliq/neural/network.hpp"
#include "dupliq/neural/tensor.hpp"
#include "dupliq/neural/training.hpp"
#include "dupliq/neural/vocabulary.hpp"
#include "dupliq/neural/weights.hpp"
