#pragma once

namespace wds {

/// Resolve a requested worker count: 0 means "auto" (hardware concurrency,
/// at least 1); anything else is returned unchanged.
unsigned effective_threads(unsigned requested);

} // namespace wds
