#ifndef NBLDPC_NBLDPC_HPP
#define NBLDPC_NBLDPC_HPP

#include "nbldpc/de.hpp"
#include "nbldpc/decode.hpp"
#include "nbldpc/degree.hpp"
#include "nbldpc/design.hpp"
#include "nbldpc/field.hpp"
#include "nbldpc/graph.hpp"
#include "nbldpc/rng.hpp"
#include "nbldpc/sim.hpp"

#endif
