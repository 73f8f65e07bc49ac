#pragma once

#include "fdht/dht.hpp"
#include "fdht/factorization.hpp"
#include "fdht/kernels.hpp"
#include "fdht/passes.hpp"
#include "fdht/slp.hpp"
#include "fdht/sparse.hpp"
#include "fdht/verify.hpp"
