#pragma once

#include "dupliq/learn/grid.hpp"
#include "dupliq/learn/importance.hpp"
#include "dupliq/learn/matrix.hpp"
#include "dupliq/learn/metrics.hpp"
#include "dupliq/learn/model.hpp"
#include "dupliq/learn/spec.hpp"
#include "dupliq/learn/tree.hpp"
