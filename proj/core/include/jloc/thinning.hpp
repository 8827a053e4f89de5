#pragma once

#include "jloc/grid.hpp"

namespace jloc {

/// Zhang-Suen two-subiteration thinning. Each subiteration marks pixels with the
/// classic parallel test; marked pixels are then removed in raster order, and a
/// pixel is only removed if it is still simple (one 0->1 transition, at least two
/// neighbours) at that moment. That keeps two-pixel-thick parts (e.g. a 2x2 block)
/// from vanishing, so 8-connected components are preserved.
BinaryGrid zhang_suen_thin(const BinaryGrid& g);

/// Removes skeleton spurs. Branch pixels are those whose 8-neighbourhood has
/// three or more separate runs of foreground; the arcs left after removing them
/// are spurs when they contain an end pixel, touch exactly one cluster of branch
/// pixels and reach less than `max_length` pixels from where they attach. Branch pixels are kept, so
/// connectivity is unchanged. Repeats until nothing changes, so forked spur
/// tips go first and their stems next; isolated segments are left alone.
BinaryGrid prune_spurs(const BinaryGrid& skeleton, int max_length);

}  // namespace jloc
