#include "wds/threads.hpp"

#include <thread>

namespace wds {

unsigned effective_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace wds
