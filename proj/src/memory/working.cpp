#include "vwm/memory/working.hpp"

#include <string>

namespace vwm {

WorkingMemory::WorkingMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1) throw ValidationError("working memory: capacity must be positive");
}

void WorkingMemory::push(const Frame& frame) {
    if (!window_.empty() && frame.index != window_.back().index + 1)
        throw ValidationError("working memory: frame index " + std::to_string(frame.index) +
                              " does not continue the stream (last was " +
                              std::to_string(window_.back().index) + ")");
    window_.push_back(frame);
    if (window_.size() > capacity_) window_.pop_front();
}

}  // namespace vwm
